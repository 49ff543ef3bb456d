//! Finite-difference checks of the assembled flow field.

use super::convergence::{classify, convergence_order, AdjudicationPolicy, Classification};
use super::fd::{fd_pde_residual, heat_kernel_residual, Equation, FdResiduals, FlowField, ProfileField, Quadratic, QuadraticField};
use super::report::{CheckResult, Family, Verdict};
use crate::error::Result;
use crate::fields::GridSpec;
use crate::precision::{PrecisionConfig, Real};
use crate::reduction::{complete_profiles, FlowParams, GInit, ProfileSet, Variant};

fn joined(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

/// Heat kernel `t^(-1/2) exp(-x²/4t)` on `x ∈ [-1, 1]` (21 points), `t = 1`.
pub fn heat_selftest(deltas: &[f64], prec: &PrecisionConfig) -> CheckResult {
    let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
    let dt = 1e-10;
    let res: Vec<(f64, f64)> = deltas.iter().map(|&d| heat_kernel_residual(1.0, &xs, 1.0, d, dt, prec)).collect();
    let sups: Vec<f64> = res.iter().map(|r| r.0).collect();
    let id = "fd_heat_selftest";
    match convergence_order(&sups, deltas) {
        Ok(q) => CheckResult::new(id, Family::Pde, Verdict::from_bool((q - 2.0).abs() <= 0.1), true)
            .norms(sups[sups.len() - 1], res[res.len() - 1].1)
            .order(Some(q))
            .notes(format!("T_t - T_xx, nu = 1, dt = {dt:e}; sup norms {} at deltas {deltas:?}; order must be 2 +- 0.1", joined(&sups))),
        Err(e) => CheckResult::errored(id, Family::Pde, true, &e),
    }
}

/// A fixed quadratic field: every stencil is exact, so the difference
/// residuals equal the analytic ones.
pub fn stencil_quadratic() -> QuadraticField {
    let q = |s: f64| {
        let mut c = [0.0; 15];
        for (k, v) in c.iter_mut().enumerate() {
            *v = s * ((k as f64 + 1.0) * 0.37).sin();
        }
        Quadratic(c)
    };
    QuadraticField { components: [q(1.0), q(-0.5), q(0.8), q(2.0)], bits: 0 }
}

pub fn stencil_exactness(p: &FlowParams, grid: &GridSpec, deltas: &[f64], prec: &PrecisionConfig) -> CheckResult {
    let id = "fd_stencil_exactness";
    let run = || -> Result<CheckResult> {
        let mut field = stencil_quadratic();
        field.bits = prec.work_bits();
        let nodes = grid.points(prec);
        let mut worst = 0.0f64;
        for &d in deltas {
            let rows = super::fd::fd_node_residuals(&field, &nodes, p, d, grid.dt, prec)?;
            for (pt, row) in nodes.iter().zip(&rows) {
                let exact = field.analytic_residuals(pt, &p.nu, &p.rho, &p.accel);
                for k in 0..4 {
                    let diff = Real::with_val(field.bits, &row[k].0 - &exact[k]).abs().to_f64();
                    worst = worst.max(diff);
                }
            }
        }
        Ok(CheckResult::new(id, Family::Pde, Verdict::from_bool(worst <= 1e-12), true)
            .norms(worst, worst)
            .notes(format!("quadratic field in (x, y, z, t): difference residuals vs analytic, {} nodes, deltas {deltas:?}; limit 1e-12", nodes.len())))
    };
    run().unwrap_or_else(|e| CheckResult::errored(id, Family::Pde, true, &e))
}

/// Residual norms at each `Δ` for one profile set.
pub fn refinement(ps: &ProfileSet, p: &FlowParams, grid: &GridSpec, deltas: &[f64], prec: &PrecisionConfig) -> Result<Vec<FdResiduals>> {
    let field = ProfileField { profiles: ps, prec };
    deltas.iter().map(|&d| fd_pde_residual(&field as &dyn FlowField, grid, p, d, prec)).collect()
}

/// The `c1 = c2 = 0, a = 0` field, built for both variants.
pub fn constant_solution(p: &FlowParams, omega_grid: &[Real], grid: &GridSpec, deltas: &[f64], prec: &PrecisionConfig) -> CheckResult {
    let id = "constant_solution";
    let run = || -> Result<CheckResult> {
        let mut q = p.clone();
        q.c1 = prec.real(0.0);
        q.c2 = prec.real(0.0);
        q.accel = prec.real(0.0);
        let init = GInit::symmetric(&q, prec);
        let mut worst = 0.0f64;
        let mut l2 = 0.0f64;
        let mut notes = Vec::new();
        for v in Variant::ALL {
            let ps = complete_profiles(&q, v, &init, omega_grid, prec)?;
            let rs = refinement(&ps, &q, grid, deltas, prec)?;
            let m = rs.iter().flat_map(|r| r.equations.iter().map(|e| e.sup)).fold(0.0, f64::max);
            l2 = l2.max(rs.iter().flat_map(|r| r.equations.iter().map(|e| e.l2)).fold(0.0, f64::max));
            notes.push(format!("{v}: {m:.3e}"));
            worst = worst.max(m);
        }
        Ok(CheckResult::new(id, Family::Pde, Verdict::from_bool(worst <= 1e-12), true)
            .norms(worst, l2)
            .notes(format!("f = g = h = c/3, linear pressure; largest residual over all equations and deltas {deltas:?}: {}; limit 1e-12", notes.join(", "))))
    };
    run().unwrap_or_else(|e| CheckResult::errored(id, Family::Pde, true, &e))
}

fn combine(classes: &[Classification]) -> Classification {
    if classes.contains(&Classification::Fail) {
        Classification::Fail
    } else if classes.contains(&Classification::Inconclusive) {
        Classification::Inconclusive
    } else {
        Classification::Pass
    }
}

fn verdict_of(c: Classification) -> Verdict {
    match c {
        Classification::Pass => Verdict::Pass,
        Classification::Fail => Verdict::Fail,
        Classification::Inconclusive => Verdict::Inconclusive,
    }
}

/// Per-equation informational results plus the variant's classification.
pub fn variant_checks(
    variant: Variant,
    rs: &[FdResiduals],
    deltas: &[f64],
    policy: &AdjudicationPolicy,
) -> (Vec<CheckResult>, Classification) {
    let mut out = Vec::new();
    let mut classes = Vec::new();
    let mut summary = Vec::new();
    for e in Equation::ALL {
        let sups: Vec<f64> = rs.iter().map(|r| r.get(e).sup).collect();
        let normalized: Vec<f64> = rs.iter().map(|r| r.get(e).sup_normalized).collect();
        let last = rs[rs.len() - 1].get(e);
        let (class, order) = classify(&sups, deltas, policy);
        classes.push(class);
        summary.push(format!("{} {}", e.as_str(), class.as_str()));
        out.push(
            CheckResult::new(format!("{}_{variant}", e.as_str()), Family::Pde, Verdict::Informational, false)
                .norms(last.sup, last.l2)
                .order(order)
                .notes(format!(
                    "sup norms {} and normalised {} at deltas {deltas:?}, dt = {:e}, {} nodes; classified {}",
                    joined(&sups),
                    joined(&normalized),
                    rs[0].dt,
                    rs[0].nodes,
                    class.as_str()
                )),
        );
    }
    let class = combine(&classes);
    out.push(
        CheckResult::new(format!("adjudication_{variant}"), Family::Pde, verdict_of(class), false).notes(format!(
            "{}; floor {:e}, target order {} +- {}",
            summary.join(", "),
            policy.floor,
            policy.target_order,
            policy.order_tolerance
        )),
    );
    (out, class)
}

/// Gated: at least one variant classifies as pass.
pub fn adjudication(classes: &[(Variant, Classification)], accel_zero: bool) -> CheckResult {
    let any = classes.iter().any(|(_, c)| *c == Classification::Pass);
    let list: Vec<String> = classes.iter().map(|(v, c)| format!("{v} {}", c.as_str())).collect();
    let mut notes = list.join(", ");
    if !accel_zero {
        notes.push_str("; a != 0: neither reduction is an exact solution of the full equations");
    }
    CheckResult::new("adjudication", Family::Pde, Verdict::from_bool(any), true).notes(notes)
}
