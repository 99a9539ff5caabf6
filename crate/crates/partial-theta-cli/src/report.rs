//! Serialized report documents. Every document carries schema_version;
//! complex numbers are {re, im} objects so nothing ever round-trips
//! through string parsing.

use num_complex::Complex64;
use partial_theta::spectrum::{Provenance, SpectralValue, SpectrumTable};
use partial_theta::{EvalResult, Zero, ZeroSet};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
pub struct EvalDoc {
    pub schema_version: u32,
    pub command: &'static str,
    pub q: Cx,
    pub x: Cx,
    pub function: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub value: Cx,
    pub error_bound: f64,
    pub terms_used: usize,
}

impl EvalDoc {
    pub fn new(
        q: Complex64,
        x: Complex64,
        function: &str,
        method: Option<&str>,
        r: &EvalResult,
    ) -> Self {
        EvalDoc {
            schema_version: SCHEMA_VERSION,
            command: "eval",
            q: q.into(),
            x: x.into(),
            function: function.to_string(),
            method: method.map(|m| m.to_string()),
            value: r.value.into(),
            error_bound: r.error_bound,
            terms_used: r.terms_used,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ZeroDoc {
    pub re: f64,
    pub im: f64,
    pub multiplicity: u32,
    pub residual: f64,
    pub certified: bool,
    pub cert_radius: f64,
}

impl From<&Zero> for ZeroDoc {
    fn from(z: &Zero) -> Self {
        ZeroDoc {
            re: z.location.re,
            im: z.location.im,
            multiplicity: z.multiplicity,
            residual: z.residual,
            certified: z.certified,
            cert_radius: z.cert_radius,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ZerosDoc {
    pub schema_version: u32,
    pub command: &'static str,
    pub q: Cx,
    pub disk_radius: f64,
    pub tail_start_k: usize,
    pub total_multiplicity: u64,
    pub complex_pair_count: usize,
    pub zeros: Vec<ZeroDoc>,
}

impl ZerosDoc {
    pub fn new(set: &ZeroSet) -> Self {
        ZerosDoc {
            schema_version: SCHEMA_VERSION,
            command: "zeros",
            q: set.q.value().into(),
            disk_radius: set.disk_radius,
            tail_start_k: set.tail_start_k,
            total_multiplicity: set.total_multiplicity(),
            complex_pair_count: set.complex_pairs().len(),
            zeros: set.zeros.iter().map(ZeroDoc::from).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpectralEntryDoc {
    pub j: u32,
    pub q: f64,
    pub x: f64,
    pub res_theta: f64,
    pub res_dtheta: f64,
}

impl From<&SpectralValue> for SpectralEntryDoc {
    fn from(sv: &SpectralValue) -> Self {
        SpectralEntryDoc {
            j: sv.index,
            q: sv.q_value,
            x: sv.double_zero_x,
            res_theta: sv.residuals.0,
            res_dtheta: sv.residuals.1,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumDoc {
    pub schema_version: u32,
    pub command: &'static str,
    pub tolerance: f64,
    pub provenance: Provenance,
    pub budget_exhausted: bool,
    pub entries: Vec<SpectralEntryDoc>,
}

impl SpectrumDoc {
    pub fn new(table: &SpectrumTable, budget_exhausted: bool) -> Self {
        SpectrumDoc {
            schema_version: SCHEMA_VERSION,
            command: "spectrum",
            tolerance: table.tolerance,
            provenance: table.provenance,
            budget_exhausted,
            entries: table.entries.iter().map(SpectralEntryDoc::from).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyPart {
    pub part: u32,
    pub name: &'static str,
    pub pass: bool,
    pub details: serde_json::Value,
}

#[derive(Debug, Serialize)]
pub struct VerifyDoc {
    pub schema_version: u32,
    pub command: &'static str,
    pub q: Cx,
    pub parts: Vec<VerifyPart>,
    pub all_pass: bool,
}

#[derive(Debug, Serialize)]
pub struct SweepDoc {
    pub schema_version: u32,
    pub command: &'static str,
    pub report: String,
    pub rows: Vec<serde_json::Value>,
}
