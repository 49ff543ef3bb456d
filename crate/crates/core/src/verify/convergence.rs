//! Convergence-order estimates from grid-refinement sequences.

use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares slope of `log(norm)` against `log(Δ)`.
///
/// Needs at least three pairs with `Δ` halving at each step.
pub fn convergence_order(norms: &[f64], deltas: &[f64]) -> Result<f64> {
    if norms.len() != deltas.len() || norms.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 matched (norm, delta) pairs, got {} norms and {} deltas",
            norms.len(),
            deltas.len()
        )));
    }
    for w in deltas.windows(2) {
        if !(w[0] > 0.0 && ((w[0] / w[1]) - 2.0).abs() < 1e-9) {
            return Err(Error::InvalidParameter("deltas must decrease by a factor of 2".into()));
        }
    }
    fit_slope(norms, deltas)
}

fn fit_slope(norms: &[f64], deltas: &[f64]) -> Result<f64> {
    if norms.iter().any(|n| !(n.is_finite() && *n > f64::MIN_POSITIVE)) {
        return Err(Error::DegenerateFit("residual norms underflow the arithmetic floor".into()));
    }
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Outcome of a refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    /// Vanishes at the expected order, or sits at the floor throughout.
    Pass,
    /// Converges to a nonzero function.
    Fail,
    /// Neither.
    Inconclusive,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Pass => "pass",
            Classification::Fail => "fail",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

/// Thresholds for [`classify`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdjudicationPolicy {
    /// Norms at or below this are treated as noise.
    pub floor: f64,
    pub target_order: f64,
    pub order_tolerance: f64,
    /// Orders below this, with norms above the floor, mean no convergence.
    pub stall_order: f64,
}

impl Default for AdjudicationPolicy {
    fn default() -> Self {
        AdjudicationPolicy { floor: 1e-8, target_order: 2.0, order_tolerance: 0.3, stall_order: 1.0 }
    }
}

/// Classify one refinement series. Norms at the floor are dropped from the
/// fit; the order comes from the remaining leading pairs.
pub fn classify(norms: &[f64], deltas: &[f64], policy: &AdjudicationPolicy) -> (Classification, Option<f64>) {
    let above = norms.iter().take_while(|n| **n > policy.floor).count();
    if above == 0 {
        return (Classification::Pass, None);
    }
    if above < 2 {
        return (Classification::Inconclusive, None);
    }
    let order = match fit_slope(&norms[..above], &deltas[..above]) {
        Ok(q) => q,
        Err(_) => return (Classification::Inconclusive, None),
    };
    let class = if (order - policy.target_order).abs() <= policy.order_tolerance {
        Classification::Pass
    } else if order < policy.stall_order {
        Classification::Fail
    } else {
        Classification::Inconclusive
    };
    (class, Some(order))
}
