use carburettor::{optimize_single_bs, run_cascade, run_single_bs, Amplitude64, BranchEnsemble64, Objective};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reflectivity {
    Value(f64),
    /// Maximize the single-stage success probability.
    Opt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRequest {
    pub alpha: f64,
    pub r_sq: Reflectivity,
    pub eta: f64,
    pub stages: u8,
    pub r2_sq: Option<f64>,
}

/// Populations with the numerically empty tail dropped.
fn distribution(e: Option<&BranchEnsemble64>) -> Vec<f64> {
    let mut d = e.map(|e| e.photon_distribution()).unwrap_or_default();
    while d.last().is_some_and(|&p| p < 1e-16) {
        d.pop();
    }
    d
}

pub fn evaluate(req: &RunRequest) -> Result<Value, CliError> {
    if !req.alpha.is_finite() {
        return Err(CliError::InvalidParam {
            key: "alpha",
            value: req.alpha,
            domain: "finite reals",
        });
    }
    let alpha = Amplitude64::new(req.alpha, 0.0);
    let r1 = match req.r_sq {
        Reflectivity::Value(r) => r,
        Reflectivity::Opt => optimize_single_bs(alpha, req.eta, Objective::Probability)?.reflectivity,
    };
    match (req.stages, req.r2_sq) {
        (1, None) => {
            let out = run_single_bs(alpha, r1, req.eta)?;
            Ok(json!({
                "alpha": req.alpha,
                "r_sq": r1,
                "eta": req.eta,
                "p_success": out.p_success,
                "fidelity_vs_bare": out.fidelity_vs_bare,
                "output_distribution": distribution(out.output.as_ref()),
            }))
        }
        (1, Some(_)) => Err(CliError::Usage("--r2-sq requires --stages 2".into())),
        (2, None) => Err(CliError::Usage("--stages 2 requires --r2-sq".into())),
        (2, Some(r2)) => {
            let out = run_cascade(alpha, r1, r2, req.eta)?;
            Ok(json!({
                "alpha": req.alpha,
                "r1_sq": r1,
                "r2_sq": r2,
                "eta": req.eta,
                "p1_0": out.p1_0,
                "f1": out.f1,
                "p1_1": out.p1_1,
                "p2_0": out.p2_0,
                "f2": out.f2,
                "f_mean": out.f_mean,
                "p_total": out.p_total,
                "output_distribution": distribution(out.output.as_ref()),
            }))
        }
        (s, _) => Err(CliError::Usage(format!("--stages must be 1 or 2, got {s}"))),
    }
}
