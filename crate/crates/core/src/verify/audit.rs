//! Audits of the reduced ODEs, the tabulated profiles and the Fushchich
//! reference solution.

use rug::ops::Pow;
use rug::Float;

use super::report::{CheckResult, Family, Verdict};
use crate::error::{Error, Result};
use crate::kummer::whittaker_w;
use crate::precision::{format_sci, PrecisionConfig, Real};
use crate::reduction::{
    eliminate_pressure_oracle, f_closed_derivs, g_by_quadrature, g_ode_residuals, reduced_ode_residual,
    solve_h_by_difference, FlowParams, ForceSign, ProfileSet, ReducedOde, Variant,
};

fn sup_rms(v: &[f64]) -> (f64, f64) {
    let sup = v.iter().cloned().fold(0.0, f64::max);
    let l2 = (v.iter().map(|x| x * x).sum::<f64>() / v.len().max(1) as f64).sqrt();
    (sup, l2)
}

/// Normalised residual of `ode` on the closed form at each node.
fn closed_form_residuals(ode: &ReducedOde, p: &FlowParams, omega_grid: &[Real], prec: &PrecisionConfig) -> Result<Vec<f64>> {
    omega_grid
        .iter()
        .map(|w| {
            let pt = f_closed_derivs(w, p, prec)?;
            let r = reduced_ode_residual(ode, &pt.f, &pt.f1, &pt.f2, w).to_f64().abs();
            let scale = ode.residual_scale(&pt.f, &pt.f1, &pt.f2, w);
            Ok(if scale > 0.0 { r / scale } else { r })
        })
        .collect()
}

const WEIGHTS: [(f64, f64); 3] = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];

/// Both reduced ODEs against the closed form for `(c1, c2)` in
/// `(1,0), (0,1), (1,1)`, plus the coefficient comparison.
pub fn audit_reduction(p: &FlowParams, omega_grid: &[Real], prec: &PrecisionConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for variant in Variant::ALL {
        let id = format!("reduced_ode_{variant}");
        let gating = variant == Variant::Printed;
        let run = || -> Result<CheckResult> {
            let mut all = Vec::new();
            let mut per = Vec::new();
            for (c1, c2) in WEIGHTS {
                let mut q = p.clone();
                q.c1 = prec.real(c1);
                q.c2 = prec.real(c2);
                let ode = ReducedOde::for_variant(variant, &q, prec);
                let r = closed_form_residuals(&ode, &q, omega_grid, prec)?;
                per.push(format!("(c1,c2)=({c1},{c2}): {:.3e}", sup_rms(&r).0));
                all.extend(r);
            }
            let (sup, l2) = sup_rms(&all);
            let limit = 10f64.powi(8 - prec.digits as i32);
            let verdict = if gating { Verdict::from_bool(sup <= limit) } else { Verdict::Informational };
            Ok(CheckResult::new(id.clone(), Family::Reduction, verdict, gating).norms(sup, l2).notes(format!(
                "{variant} coefficients applied to the closed form on {} points in [{}, {}], residual over max(|k2 f''|, |(k1w w + k1c) f'|, |k0 f|); {}{}",
                omega_grid.len(),
                omega_grid[0].to_f64(),
                omega_grid[omega_grid.len() - 1].to_f64(),
                per.join("; "),
                if gating { format!("; limit {limit:e}") } else { String::new() }
            )))
        };
        out.push(run().unwrap_or_else(|e| CheckResult::errored(id.clone(), Family::Reduction, gating, &e)));
    }
    out.push(elimination_check(p, prec));
    out
}

fn elimination_check(p: &FlowParams, prec: &PrecisionConfig) -> CheckResult {
    let b = prec.work_bits();
    let printed = ReducedOde::printed(p, prec);
    let (grad, derived) = eliminate_pressure_oracle(p, prec);

    // Summing Φ over f, g, h with f + g + h = c gives c/2 on the left and
    // 3 l'/ρ - a on the right.
    let c = &p.mass_rate;
    let lhs = Float::with_val(b, c / 2u32);
    let rhs = Float::with_val(b, &grad * 3u32) - &p.accel;
    let sum_err = Float::with_val(b, &lhs - &rhs).abs().to_f64();

    let k2_diff = Float::with_val(b, &printed.k2 - &derived.k2).abs().to_f64();
    let k0_diff = Float::with_val(b, &printed.k0 - &derived.k0).abs().to_f64();
    let k1c_diff = Float::with_val(b, &printed.k1_const - &derived.k1_const).abs().to_f64();
    let k1w_diff = Float::with_val(b, &printed.k1_omega - &derived.k1_omega).to_f64();
    let kin_diff = Float::with_val(b, &printed.k_inhom - &derived.k_inhom).to_f64();

    let tail = p.constant_tail(b);
    let zero = Float::with_val(b, 0);
    let w = Float::with_val(b, 0);
    let const_printed = reduced_ode_residual(&printed, &tail, &zero, &zero, &w);
    let const_derived = reduced_ode_residual(&derived, &tail, &zero, &zero, &w);

    let eps = 10f64.powi(4 - prec.digits as i32);
    let ok = k2_diff <= eps && k0_diff <= eps && sum_err <= eps;
    CheckResult::new("elimination_coefficients", Family::Reduction, Verdict::from_bool(ok), true)
        .norms(k2_diff.max(k0_diff), sum_err)
        .notes(format!(
            "l'/rho = c/6 + a/3 = {}; k2 and k0 agree (|dk2| = {k2_diff:.1e}, |dk0| = {k0_diff:.1e}); omega coefficient printed - derived = {k1w_diff}; constant f' coefficient difference {k1c_diff:.1e}; inhomogeneous term difference {kin_diff}; constant profile c/3 - 2a/3 leaves residual {} (printed) and {} (derived, equals -2a)",
            format_sci(&grad, 12),
            format_sci(&const_printed, 6),
            format_sci(&const_derived, 6),
        ))
}

/// `g` ODE residual relative to the largest term, against 50× the
/// integrator tolerance.
pub fn g_ode_check(ps: &ProfileSet) -> CheckResult {
    let r = g_ode_residuals(ps);
    let (sup, l2) = sup_rms(&r);
    let limit = 50.0 * ps.tolerance;
    CheckResult::new(format!("g_ode_{}", ps.variant), Family::Profile, Verdict::from_bool(sup <= limit), true)
        .norms(sup, l2)
        .notes(format!("-3nu g'' + (c - w/2) g' - g/2 + Phi[f] over {} nodes, {} steps; limit {limit:e}", ps.len(), ps.steps))
}

/// `|f + g + h - c|` and `|f' + g' + h'|` over every profile set.
pub fn continuity_check(sets: &[&ProfileSet], prec: &PrecisionConfig) -> CheckResult {
    let b = prec.work_bits();
    let mut sum_err = Vec::new();
    let mut slope_err = Vec::new();
    let mut tol = 0.0f64;
    for ps in sets {
        tol = tol.max(ps.tolerance);
        for i in 0..ps.len() {
            let s = Float::with_val(b, &ps.f[i] + &ps.g[i]) + &ps.h[i] - &ps.params.mass_rate;
            sum_err.push(s.to_f64().abs());
            let d = Float::with_val(b, &ps.f1[i] + &ps.g1[i]) + &ps.h1[i];
            slope_err.push(d.to_f64().abs());
        }
    }
    let (sup, l2) = sup_rms(&sum_err);
    let (slope_sup, _) = sup_rms(&slope_err);
    let limit = 10f64.powi(10 - prec.digits as i32);
    let slope_limit = 50.0 * tol;
    let ok = sup <= limit && slope_sup <= slope_limit;
    let variants: Vec<&str> = sets.iter().map(|p| p.variant.as_str()).collect();
    CheckResult::new("profile_continuity", Family::Profile, Verdict::from_bool(ok), true).norms(sup, l2).notes(format!(
        "variants {variants:?}: sup |f+g+h-c| = {sup:.3e} (limit {limit:e}), sup |f'+g'+h'| = {slope_sup:.3e} (limit {slope_limit:e})"
    ))
}

/// Taylor-integrated `g` against the nested quadrature at five nodes.
pub fn quadrature_check(sets: &[&ProfileSet], prec: &PrecisionConfig) -> CheckResult {
    let run = || -> Result<CheckResult> {
        let mut rel = Vec::new();
        let mut notes = Vec::new();
        for ps in sets {
            let n = ps.len();
            let idx: Vec<usize> = [0.1, 0.3, 0.45, 0.7, 0.9].iter().map(|f| ((n - 1) as f64 * f).round() as usize).collect();
            let pts: Vec<Real> = idx.iter().map(|&i| ps.omega_grid[i].clone()).collect();
            let q = g_by_quadrature(&ps.params, ps.variant, &ps.init, &pts, prec)?;
            let mut worst = 0.0f64;
            for (k, &i) in idx.iter().enumerate() {
                let g = ps.g[i].to_f64();
                let r = (q[k] - g).abs() / g.abs().max(1e-300);
                worst = worst.max(r);
                rel.push(r);
            }
            notes.push(format!("{}: {worst:.3e} at omega = {:?}", ps.variant, pts.iter().map(|w| w.to_f64()).collect::<Vec<_>>()));
        }
        let (sup, l2) = sup_rms(&rel);
        Ok(CheckResult::new("g_quadrature", Family::Profile, Verdict::from_bool(sup <= 1e-8), true)
            .norms(sup, l2)
            .notes(format!("relative difference of the integrated g and the double-precision nested quadrature; {}; limit 1e-8", notes.join("; "))))
    };
    run().unwrap_or_else(|e| CheckResult::errored("g_quadrature", Family::Profile, true, &e))
}

/// `h = c - f - g` against `h` integrated from its own momentum-difference
/// ODE with either sign of the force term. Informational.
pub fn h_consistency_check(ps: &ProfileSet, sign: ForceSign, prec: &PrecisionConfig) -> CheckResult {
    let id = format!("h_consistency_{}_{}", ps.variant, sign.as_str());
    let run = || -> Result<CheckResult> {
        let h = solve_h_by_difference(&ps.params, ps.variant, &ps.init, sign, &ps.omega_grid, prec)?;
        let b = prec.work_bits();
        let d: Vec<f64> = h.iter().zip(&ps.h).map(|(a, c)| Float::with_val(b, a - c).abs().to_f64()).collect();
        let (sup, l2) = sup_rms(&d);
        Ok(CheckResult::new(id.clone(), Family::Profile, Verdict::Informational, false)
            .norms(sup, l2)
            .notes(format!(
                "h from subtraction vs h from -3nu h'' + (c - w/2) h' - h/2 + Phi[f] {} a = 0",
                if sign == ForceSign::Plus { "+" } else { "-" }
            )))
    };
    run().unwrap_or_else(|e| CheckResult::errored(id.clone(), Family::Profile, false, &e))
}

/// The reference solution: `φ = 3ω/2 - c`,
/// `f, g = φ^(-1/2) e^(-φ²/6) W(κ, 1/4, φ²/3)` with `κ = -1/12, -5/12`,
/// `h = c - ω`, `l = 3cω/2 - ω² + c1`.
pub struct Fushchich<'a> {
    pub c: Real,
    pub c1: Real,
    pub prec: &'a PrecisionConfig,
}

impl Fushchich<'_> {
    /// `[f, g, h, l]` at `ω`.
    pub fn eval(&self, w: &Real) -> Result<[Real; 4]> {
        let prec = self.prec;
        let b = w.prec();
        let phi = Float::with_val(b, w * 1.5f64) - &self.c;
        if !(phi > 0) {
            return Err(Error::Domain(format!(
                "reference solution needs 3w/2 - c > 0, got w = {}",
                w.to_f64()
            )));
        }
        let phi2 = Float::with_val(b, phi.square_ref());
        let z = Float::with_val(b, &phi2 / 3u32);
        let pref = (-Float::with_val(b, &phi2 / 6u32)).exp() / Float::with_val(b, phi.sqrt_ref());
        let mu = prec.ratio(1, 4);
        let f = Float::with_val(b, &pref * whittaker_w(&prec.ratio(-1, 12), &mu, &z, prec)?);
        let g = Float::with_val(b, &pref * whittaker_w(&prec.ratio(-5, 12), &mu, &z, prec)?);
        let h = Float::with_val(b, &self.c - w);
        let l = Float::with_val(b, Float::with_val(b, &self.c * w) * 1.5f64) - Float::with_val(b, w.square_ref()) + &self.c1;
        Ok([f, g, h, l])
    }
}

/// The four lines of the reference system, with derivatives from central
/// differences at `P + 30` digits:
///
/// ```text
/// 1  h' + 1
/// 2  -(f + ω f')/2 + h f' - f''
/// 3  (g + ω g')/2 + h g' - g''
/// 4  -(h + ω h')/2 + h h' + l' - h''      (4f: with f'' in place of h'')
/// ```
pub fn audit_fushchich(c: f64, c1: f64, omega_grid: &[f64], prec: &PrecisionConfig) -> Vec<CheckResult> {
    let ids = ["fushchich_line1", "fushchich_line2", "fushchich_line3", "fushchich_line4", "fushchich_line4_f"];
    let run = || -> Result<Vec<CheckResult>> {
        let fine = PrecisionConfig::new(prec.digits + 30)?;
        let b = fine.work_bits();
        let sol = Fushchich { c: fine.real(c), c1: fine.real(c1), prec: &fine };
        let h = Pow::pow(Float::with_val(b, 10u32), -10i32);
        let two_h = Float::with_val(b, &h * 2u32);
        let h2 = Float::with_val(b, h.square_ref());
        let mut lines: [Vec<f64>; 5] = Default::default();
        for &wf in omega_grid {
            let w = fine.real(wf);
            let c0 = sol.eval(&w)?;
            let cp = sol.eval(&Float::with_val(b, &w + &h))?;
            let cm = sol.eval(&Float::with_val(b, &w - &h))?;
            let d1 = |k: usize| Float::with_val(b, &cp[k] - &cm[k]) / &two_h;
            let d2 = |k: usize| (Float::with_val(b, &cp[k] + &cm[k]) - Float::with_val(b, &c0[k] * 2u32)) / &h2;
            let [f, g, hh, _] = &c0;
            let (f1, g1, h1, l1) = (d1(0), d1(1), d1(2), d1(3));
            let (f2, g2, h2v) = (d2(0), d2(1), d2(2));
            let line1 = Float::with_val(b, &h1 + 1u32);
            let line2 = -(Float::with_val(b, f + Float::with_val(b, &w * &f1)) / 2u32) + Float::with_val(b, hh * &f1) - &f2;
            let line3 = Float::with_val(b, g + Float::with_val(b, &w * &g1)) / 2u32 + Float::with_val(b, hh * &g1) - &g2;
            let common = -(Float::with_val(b, hh + Float::with_val(b, &w * &h1)) / 2u32) + Float::with_val(b, hh * &h1) + &l1;
            let line4 = Float::with_val(b, &common - &h2v);
            let line4f = Float::with_val(b, &common - &f2);
            for (k, v) in [line1, line2, line3, line4, line4f].iter().enumerate() {
                lines[k].push(v.to_f64().abs());
            }
        }
        let exact_limit = 10f64.powi(10 - prec.digits as i32);
        let notes = [
            "h' + 1 with h = c - w".to_string(),
            "-(f + w f')/2 + h f' - f'' with the Whittaker f".to_string(),
            "(g + w g')/2 + h g' - g'' with the Whittaker g".to_string(),
            "-(h + w h')/2 + h h' + l' - h'': polynomial, identically zero".to_string(),
            "-(h + w h')/2 + h h' + l' - f'': reduces to -f''".to_string(),
        ];
        Ok(ids
            .iter()
            .enumerate()
            .map(|(k, id)| {
                let (sup, l2) = sup_rms(&lines[k]);
                let gating = k == 0 || k == 3;
                let verdict = if gating { Verdict::from_bool(sup <= exact_limit) } else { Verdict::Informational };
                let finite = sup.is_finite();
                CheckResult::new(*id, Family::Fushchich, verdict, gating).norms(sup, l2).notes(format!(
                    "{}; c = {c}, c1 = {c1}, nu = 1, {} points in [{}, {}]{}{}",
                    notes[k],
                    omega_grid.len(),
                    omega_grid[0],
                    omega_grid[omega_grid.len() - 1],
                    if gating { format!("; limit {exact_limit:e}") } else { String::new() },
                    if finite { "" } else { "; non-finite residual" },
                ))
            })
            .collect())
    };
    run().unwrap_or_else(|e| ids.iter().map(|id| CheckResult::errored(*id, Family::Fushchich, true, &e)).collect())
}
