//! JSON report envelope and the serializations of library results.

use coherence::bounds::{BoundsReport, IsotropicRow};
use coherence::moments::{MomentReport, ScanPoint, Verdict};
use coherence::multicopy::{CascadeReport, CascadeStep};
use serde::Serialize;
use serde_json::{json, Value};

pub const TOOL: &str = "cohwit";

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub flags: Vec<String>,
    pub seed: Option<u64>,
}

impl Envelope {
    pub fn new(command: &str, inputs: Value, outputs: Value) -> Self {
        Self {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            inputs,
            outputs,
            flags: Vec::new(),
            seed: None,
        }
    }

    pub fn with_flags(mut self, flags: Vec<String>) -> Self {
        self.flags = flags;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn verdict(v: &Verdict) -> Value {
    match v {
        Verdict::Coherent { first_k, gap } => json!({"kind": "coherent", "first_k": first_k, "gap": gap}),
        Verdict::Undetermined => json!({"kind": "undetermined"}),
    }
}

pub fn moments(r: &MomentReport) -> Value {
    json!({
        "state_moments": r.state_moments,
        "pt_moments": r.pt_moments,
        "char_coeffs": r.char_coeffs,
        "gaps": r.gaps,
        "verdict": verdict(&r.verdict),
    })
}

pub fn cascade_step(s: &CascadeStep) -> Value {
    json!({
        "copies": s.copies,
        "pattern": s.pattern.to_string(),
        "wiring": s.wiring,
        "value": s.value,
        "detected": s.detected,
        "note": s.note,
    })
}

pub fn cascade(r: &CascadeReport) -> Value {
    json!({
        "steps": r.steps.iter().map(cascade_step).collect::<Vec<_>>(),
        "detected": r.detected(),
        "detection": r.detection().map(|s| json!({
            "copies": s.copies,
            "wiring": s.wiring,
            "value": s.value,
        })),
        "detect_tol": r.tol,
    })
}

pub fn bounds(r: &BoundsReport) -> Value {
    json!({
        "lambda_plus": r.lambda_plus,
        "lambda_minus": r.lambda_minus,
        "L_WN": r.l_wn,
        "L_R": r.l_r,
        "L1": r.l1,
        "L2": r.l2,
        "E": r.e.as_ref().map(|e| e.e),
        "E_ratio": r.e_ratio,
        "E_certified_gap": r.e.as_ref().map(|e| e.certified_gap),
        "E_iterations": r.e.as_ref().map(|e| e.iterations),
    })
}

pub fn bound_flags(r: &BoundsReport) -> Vec<String> {
    r.flags.iter().map(|f| f.tag().to_string()).collect()
}

/// Seventeen significant digits, enough to identify any `f64`.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(csv_float).unwrap_or_default()
}

pub const GAP_HEADER: &str = "a,b,gap";
pub const ISOTROPIC_HEADER: &str = "v,L1,L2,LR,flag";

pub fn gap_csv(points: &[ScanPoint]) -> String {
    let mut out = String::from(GAP_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!("{},{},{}\n", csv_float(p.a), csv_float(p.b), csv_float(p.gap)));
    }
    out
}

pub fn row_flag(r: &IsotropicRow) -> String {
    if r.flags.is_empty() {
        "ok".to_string()
    } else {
        r.flags.iter().map(|f| f.tag()).collect::<Vec<_>>().join("|")
    }
}

pub fn isotropic_csv(rows: &[IsotropicRow]) -> String {
    let mut out = String::from(ISOTROPIC_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_float(r.v),
            csv_opt(r.l1),
            csv_float(r.l2),
            csv_opt(r.l_r),
            row_flag(r)
        ));
    }
    out
}
