//! Closed-form bound on the expected number of calculated entries for a
//! random text and query under a scoring scheme.

use crate::error::AnalysisError;
use crate::scoring::{q_value, ScoringScheme};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisParams {
    /// `1 + |s_b| / s_a`.
    pub s: f64,
    pub q: usize,
    pub sigma: usize,
    pub k1: f64,
    pub k2: f64,
}

impl AnalysisParams {
    /// `k1 * k2^d`, the bound on ungapped positive-scoring strings of length `d`.
    pub fn f_bound(&self, d: u32) -> f64 {
        self.k1 * self.k2.powi(d as i32)
    }
}

/// The constants `k1`, `k2` of the ungapped count bound `f(d) <= k1 k2^d`.
pub fn ungapped_bound_params(scheme: &ScoringScheme, sigma: usize) -> Result<AnalysisParams, AnalysisError> {
    if sigma < 3 {
        return Err(AnalysisError::SigmaTooSmall(sigma));
    }
    let s = 1.0 + (-scheme.mismatch) as f64 / scheme.matched as f64;
    let q = q_value(scheme);
    let sg = sigma as f64;
    let k1 = (1.0 - 1.0 / s).powi(q as i32) * ((sg - 1.0) / (sg - 2.0)) * s
        / (2.0 * std::f64::consts::PI * (s - 1.0)).sqrt();
    let k2 = s * ((sg - 1.0) / (s - 1.0).powf(s - 1.0)).powf(1.0 / s);
    Ok(AnalysisParams {
        s,
        q,
        sigma,
        k1,
        k2,
    })
}

/// `(coefficient, exponent)` with the bound reading `coefficient * m * n^exponent`.
pub fn entry_bound(scheme: &ScoringScheme, sigma: usize) -> Result<(f64, f64), AnalysisError> {
    let a = ungapped_bound_params(scheme, sigma)?;
    let sg = sigma as f64;
    // k2 never exceeds sigma; it reaches it at s = sigma / (sigma - 1),
    // where rounding can land either side.
    if a.k2 >= sg - 1e-9 {
        return Err(AnalysisError::Divergent { k2: a.k2, sigma });
    }
    let coefficient = a.k1 / (a.k2 - 1.0) + a.k1 * sg * sg / (sg - a.k2);
    Ok((coefficient, a.k2.ln() / sg.ln()))
}

/// `"4.47 · m · n^0.6038"`.
pub fn format_bound(coefficient: f64, exponent: f64) -> String {
    format!("{coefficient:.2} · m · n^{exponent:.4}")
}
