//! Checks on the special functions.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::report::{CheckResult, Family, Verdict};
use crate::error::Result;
use crate::kummer::{
    gamma, kummer_m, kummer_m_deriv_n, kummer_u, kummer_u_deriv, kummer_u_deriv2, kummer_u_deriv2_printed,
    kummer_u_deriv_identity, kummer_u_deriv_n, kummer_u_fixed_digits, whittaker_w, KummerArgs,
};
use crate::precision::{format_sci, rel_diff, PrecisionConfig, Real};

fn tol(prec: &PrecisionConfig, shift: i32) -> f64 {
    10f64.powi(shift - prec.digits as i32)
}

fn args(a: (i64, i64), b: (i64, i64), z: Real, prec: &PrecisionConfig) -> KummerArgs {
    KummerArgs::rational(a.0, a.1, b.0, b.1, z, prec)
}

fn max_rms(v: &[f64]) -> (f64, f64) {
    let sup = v.iter().cloned().fold(0.0, f64::max);
    let l2 = (v.iter().map(|x| x * x).sum::<f64>() / v.len().max(1) as f64).sqrt();
    (sup, l2)
}

/// `M(1,2,1) = e - 1`, `M(a,b,0) = 1`, `U(0,1/2,z) = 1`.
pub fn kummer_values(prec: &PrecisionConfig) -> Result<CheckResult> {
    let bits = prec.work_bits();
    let e_minus_1 = Float::with_val(bits, 1).exp() - 1u32;
    let m = kummer_m(&args((1, 1), (2, 1), prec.real(1.0), prec), prec)?;
    let mut errs = vec![rel_diff(&m, &e_minus_1)];
    let mut exact_at_zero = true;
    for (a, b) in [((-1, 4), (1, 2)), ((3, 1), (5, 2)), ((-7, 3), (-1, 2))] {
        exact_at_zero &= kummer_m(&args(a, b, prec.real(0.0), prec), prec)? == 1;
    }
    for z in [0.1, 1.0, 10.0] {
        let u = kummer_u(&args((0, 1), (1, 2), prec.real(z), prec), prec)?;
        errs.push(rel_diff(&u, &prec.real(1.0)));
    }
    let (sup, l2) = max_rms(&errs);
    let limit = tol(prec, 2);
    Ok(CheckResult::new("kummer_values", Family::Kummer, Verdict::from_bool(sup <= limit && exact_at_zero), true)
        .norms(sup, l2)
        .notes(format!("relative errors of M(1,2,1) against e-1 and U(0,1/2,z) against 1 for z in 0.1, 1, 10; limit {limit:e}; M(a,b,0) == 1 exactly: {exact_at_zero}")))
}

/// `z F'' + (b - z) F' - a F` for `F = M, U` at `(a, b) = (-1/4, 1/2)`, 50
/// log-spaced `z` in `(1e-3, 50]`, relative to `max(|F|, 1)`.
pub fn kummer_ode(prec: &PrecisionConfig) -> Result<CheckResult> {
    let bits = prec.work_bits();
    let a = prec.ratio(-1, 4);
    let b = prec.ratio(1, 2);
    let mut rel = Vec::with_capacity(100);
    let lo = 1e-3f64.ln();
    let hi = 50f64.ln();
    for k in 1..=50 {
        let z = if k == 50 { prec.real(50.0) } else { prec.real((lo + (hi - lo) * k as f64 / 50.0).exp()) };
        let ka = KummerArgs::new(a.clone(), b.clone(), z.clone());
        for is_u in [false, true] {
            let d = |n| if is_u { kummer_u_deriv_n(&ka, n, prec) } else { kummer_m_deriv_n(&ka, n, prec) };
            let (f0, f1, f2) = (d(0)?, d(1)?, d(2)?);
            let r = Float::with_val(bits, &z * &f2) + Float::with_val(bits, &b - &z) * &f1 - Float::with_val(bits, &a * &f0);
            rel.push(r.to_f64().abs() / f0.to_f64().abs().max(1.0));
        }
    }
    let (sup, l2) = max_rms(&rel);
    let limit = tol(prec, 8);
    Ok(CheckResult::new("kummer_ode", Family::Kummer, Verdict::from_bool(sup <= limit), true)
        .norms(sup, l2)
        .notes(format!("M and U at (a,b) = (-1/4,1/2), 50 log-spaced z in (1e-3, 50]; derivatives from the b-shifted identities; limit {limit:e}")))
}

/// `U(-1/4, 1/2, z)` on `[40, 80]`: 15-digit evaluation against the
/// reference, and `P-5` against `P+5` digits.
pub fn precision_sentinel(prec: &PrecisionConfig) -> Result<CheckResult> {
    let lo = PrecisionConfig::new(prec.digits.saturating_sub(5).max(15))?;
    let hi = PrecisionConfig::new(prec.digits + 5)?;
    let p30 = PrecisionConfig::new(30)?;
    let mut low_dev = 0.0f64;
    let mut spread = 0.0f64;
    let mut mono = 0.0f64;
    for k in 0..=20 {
        let z = 40.0 + 2.0 * k as f64;
        let ka = |p: &PrecisionConfig| args((-1, 4), (1, 2), p.real(z), p);
        let reference = kummer_u(&ka(prec), prec)?;
        let crude = kummer_u_fixed_digits(&ka(prec), 15, prec)?;
        low_dev = low_dev.max(rel_diff(&crude, &reference));
        let a = kummer_u(&ka(&lo), &lo)?;
        let b = kummer_u(&ka(&hi), &hi)?;
        spread = spread.max(rel_diff(&a, &b));
        let c = kummer_u(&ka(&p30), &p30)?;
        mono = mono.max(rel_diff(&c, &reference));
    }
    let agree_limit = 10f64.powi(-(lo.digits as i32 - 5));
    let ok = low_dev > 1e-6 && spread <= agree_limit && (prec.digits < 40 || mono <= 1e-28);
    Ok(CheckResult::new("precision_sentinel", Family::Kummer, Verdict::from_bool(ok), true)
        .norms(spread, spread)
        .notes(format!(
            "z in [40, 80]: max relative deviation of the 15-digit evaluation from P = {} is {}; P = {} vs P = {} differ by at most {} (limit {agree_limit:e}); P = 30 vs P = {}: {}",
            prec.digits,
            format_f(low_dev),
            lo.digits,
            hi.digits,
            format_f(spread),
            prec.digits,
            format_f(mono),
        )))
}

fn format_f(v: f64) -> String {
    format!("{v:.3e}")
}

/// `|Γ(x)Γ(1-x) - π/sin(πx)|` relative, for `x = 1/4, 1/3, 3/4`.
pub fn gamma_reflection(prec: &PrecisionConfig) -> Result<CheckResult> {
    let bits = prec.work_bits();
    let pi = Float::with_val(bits, Constant::Pi);
    let mut errs = Vec::new();
    for (n, d) in [(1, 4), (1, 3), (3, 4)] {
        let x = prec.ratio(n, d);
        let one_minus = Float::with_val(bits, 1 - &x);
        let lhs = gamma(&x, prec)? * gamma(&one_minus, prec)?;
        let rhs = Float::with_val(bits, &pi / Float::with_val(bits, &pi * &x).sin());
        errs.push(rel_diff(&lhs, &rhs));
    }
    let (sup, l2) = max_rms(&errs);
    let limit = tol(prec, 6);
    Ok(CheckResult::new("gamma_reflection", Family::Kummer, Verdict::from_bool(sup <= limit), true)
        .norms(sup, l2)
        .notes(format!("x in 1/4, 1/3, 3/4; limit {limit:e}")))
}

/// Sample points of the derivative audits.
pub const DERIV_POINTS: [f64; 10] = [0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 40.0];

/// Central first and five-point second difference of `U(-1/4, 1/2, ·)` at
/// `z`, evaluated `P + 30` digits with step `10^-8`.
fn u_finite_differences(z: f64, prec: &PrecisionConfig) -> Result<(Real, Real)> {
    let fine = PrecisionConfig::new(prec.digits + 30)?;
    let bits = fine.work_bits();
    let h = Pow::pow(Float::with_val(bits, 10u32), -8i32);
    let at = |k: i32| -> Result<Real> {
        let zz = Float::with_val(bits, fine.real(z) + Float::with_val(bits, &h * k));
        kummer_u(&args((-1, 4), (1, 2), zz, &fine), &fine)
    };
    let (m2, m1, c, p1, p2) = (at(-2)?, at(-1)?, at(0)?, at(1)?, at(2)?);
    let d1 = Float::with_val(bits, &p1 - &m1) / Float::with_val(bits, &h * 2u32);
    // (-f(z+2h) + 16 f(z+h) - 30 f(z) + 16 f(z-h) - f(z-2h)) / (12 h²)
    let num = Float::with_val(bits, &p1 + &m1) * 16u32 - Float::with_val(bits, &p2 + &m2) - Float::with_val(bits, &c * 30u32);
    let d2 = num / (Float::with_val(bits, h.square_ref()) * 12u32);
    Ok((d1, d2))
}

/// The contiguous-relation first derivative, the differentiation identity and
/// a central difference, pairwise.
pub fn deriv_eq21(prec: &PrecisionConfig) -> Result<CheckResult> {
    let mut errs = Vec::new();
    for z in DERIV_POINTS {
        let ka = args((-1, 4), (1, 2), prec.real(z), prec);
        let rec = kummer_u_deriv(&ka, prec)?;
        let ident = kummer_u_deriv_identity(&ka, prec)?;
        let (fd, _) = u_finite_differences(z, prec)?;
        errs.push(rel_diff(&rec, &ident).max(rel_diff(&rec, &fd)).max(rel_diff(&ident, &fd)));
    }
    let (sup, l2) = max_rms(&errs);
    let limit = 1e-10;
    Ok(CheckResult::new("deriv_eq21", Family::Kummer, Verdict::from_bool(sup <= limit), true)
        .norms(sup, l2)
        .notes(format!(
            "U'(-1/4,1/2,z): recurrence [(z+a-b)U - U(a-1,b,z)]/z, identity -a U(a+1,b+1,z), central difference h = 1e-8; largest pairwise relative difference over z in {DERIV_POINTS:?}; limit {limit:e}"
        )))
}

/// The expanded second-derivative expression against the identity route and
/// a five-point difference. Informational.
pub fn deriv_eq22(prec: &PrecisionConfig) -> Result<CheckResult> {
    let mut vs_ident = Vec::new();
    let mut vs_fd = Vec::new();
    let mut ident_vs_fd = 0.0f64;
    let mut example = String::new();
    for z in DERIV_POINTS {
        let ka = args((-1, 4), (1, 2), prec.real(z), prec);
        let printed = kummer_u_deriv2_printed(&ka, prec)?;
        let ident = kummer_u_deriv2(&ka, prec)?;
        let (_, fd) = u_finite_differences(z, prec)?;
        vs_ident.push(rel_diff(&printed, &ident));
        vs_fd.push(rel_diff(&printed, &fd));
        ident_vs_fd = ident_vs_fd.max(rel_diff(&ident, &fd));
        if z == 2.0 {
            example = format!("at z = 2: expanded {}, identity {}", format_sci(&printed, 20), format_sci(&ident, 20));
        }
    }
    let (sup, l2) = max_rms(&vs_ident);
    let (fd_sup, _) = max_rms(&vs_fd);
    Ok(CheckResult::new("deriv_eq22", Family::Kummer, Verdict::Informational, false)
        .norms(sup, l2)
        .notes(format!(
            "U''(-1/4,1/2,z): expanded closed form vs identity a(a+1)U(a+2,b+2,z), max relative difference {}; expanded vs five-point difference {}; identity vs difference {}; {example}",
            format_f(sup),
            format_f(fd_sup),
            format_f(ident_vs_fd)
        )))
}

/// `W(κ, μ, z)` from its definition against Kummer's transformation
/// `e^{z/2} z^{1/2+μ} M(1/2+μ+κ, 1+2μ, -z)`.
pub fn whittaker_identity(prec: &PrecisionConfig) -> Result<CheckResult> {
    let bits = prec.work_bits();
    let mut errs = Vec::new();
    for (kn, kd) in [(-1, 12), (-5, 12)] {
        let kappa = prec.ratio(kn, kd);
        let mu = prec.ratio(1, 4);
        for z in [0.5, 1.0, 3.0] {
            let zr = prec.real(z);
            let lhs = whittaker_w(&kappa, &mu, &zr, prec)?;
            let half_mu = Float::with_val(bits, &mu + 0.5f64);
            let a = Float::with_val(bits, &half_mu + &kappa);
            let b = Float::with_val(bits, &mu * 2u32) + 1u32;
            let m = kummer_m(&KummerArgs::new(a, b, Float::with_val(bits, -&zr)), prec)?;
            let rhs = Float::with_val(bits, &zr / 2u32).exp() * Float::with_val(bits, Pow::pow(&zr, &half_mu)) * m;
            errs.push(rel_diff(&lhs, &rhs));
        }
    }
    let (sup, l2) = max_rms(&errs);
    let limit = tol(prec, 6);
    Ok(CheckResult::new("whittaker_identity", Family::Kummer, Verdict::from_bool(sup <= limit), true)
        .norms(sup, l2)
        .notes(format!(
            "(kappa, mu) in (-1/12, 1/4), (-5/12, 1/4); z in 0.5, 1, 3; definition vs Kummer transformation; limit {limit:e}"
        )))
}
