//! Doc-test harness for the guide: every fenced Rust block in the book
//! chapters runs under `cargo test --doc`, which keeps the book and the
//! library from drifting apart. One module per chapter so a failure
//! names its source file.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/evaluation.md")]
mod evaluation {}

#[doc = include_str!("../../../book/src/zeros.md")]
mod zeros {}

#[doc = include_str!("../../../book/src/spectrum.md")]
mod spectrum {}

#[doc = include_str!("../../../book/src/factorization.md")]
mod factorization {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
