//! Confluent hypergeometric functions at configurable precision.
//!
//! `M(a, b, z)` is summed directly from its power series. `U(a, b, z)` is
//! assembled from two `M` evaluations through the sine/Gamma reflection
//! formula; that combination cancels catastrophically for large `z`, so every
//! evaluation carries a cancellation margin that is measured after the fact
//! and enlarged until the measured loss fits inside it.

use rug::ops::Pow;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::precision::{bits_for_digits, log10_abs, PrecisionConfig, Real};

/// Hard ceiling on the adaptive cancellation margin, in decimal digits.
const MAX_MARGIN_DIGITS: u32 = 4000;

/// Parameters and argument of a Kummer function evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct KummerArgs {
    pub a: Real,
    pub b: Real,
    pub z: Real,
}

impl KummerArgs {
    pub fn new(a: Real, b: Real, z: Real) -> Self {
        KummerArgs { a, b, z }
    }

    /// Rational parameters `a = an/ad`, `b = bn/bd` and an arbitrary argument.
    pub fn rational(an: i64, ad: i64, bn: i64, bd: i64, z: Real, prec: &PrecisionConfig) -> Self {
        KummerArgs { a: prec.ratio(an, ad), b: prec.ratio(bn, bd), z }
    }

    fn shifted(&self, da: i64, db: i64) -> Self {
        let bits = self.a.prec().max(self.b.prec());
        KummerArgs {
            a: Float::with_val(bits, &self.a + da),
            b: Float::with_val(bits, &self.b + db),
            z: self.z.clone(),
        }
    }
}

pub(crate) fn is_nonpositive_integer(x: &Real) -> bool {
    x.is_integer() && *x <= 0
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`, computed
/// at the precision of `a`.
pub fn pochhammer(a: &Real, n: u32) -> Real {
    let mut acc = Float::with_val(a.prec(), 1);
    for k in 0..n {
        let factor = Float::with_val(a.prec(), a + k);
        acc *= factor;
    }
    acc
}

/// `Γ(x)` to `prec.digits` significant digits.
pub fn gamma(x: &Real, prec: &PrecisionConfig) -> Result<Real> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(format!("Gamma has a pole at x = {}", x.to_f64())));
    }
    let g = Float::with_val(prec.work_bits(), x).gamma();
    if !g.is_finite() {
        return Err(Error::Domain(format!("Gamma overflow at x = {}", x.to_f64())));
    }
    Ok(prec.round(&g))
}

/// `1/Γ(x)` at `bits`, zero at the poles.
fn recip_gamma(x: &Real, bits: u32) -> Real {
    if is_nonpositive_integer(x) {
        return Float::with_val(bits, 0);
    }
    let g = Float::with_val(bits, x).gamma();
    Float::with_val(bits, 1) / g
}

/// Raw result of a series summation at fixed working precision.
#[derive(Debug, Clone)]
pub(crate) struct SeriesSum {
    pub value: Real,
    /// Largest partial-sum magnitude seen, as log10.
    pub log10_peak: f64,
}

impl SeriesSum {
    /// Decimal digits lost to cancellation: log10(peak partial sum / |result|).
    pub fn cancellation_digits(&self) -> f64 {
        let lv = log10_abs(&self.value);
        if lv == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        (self.log10_peak - lv).max(0.0)
    }
}

/// Sum `M(a,b,z)` at `bits` with the two-consecutive-small-terms stopping rule.
pub(crate) fn m_series(a: &Real, b: &Real, z: &Real, bits: u32, rel_tol: f64, max_terms: usize) -> Result<SeriesSum> {
    let a = Float::with_val(bits, a);
    let b = Float::with_val(bits, b);
    let z = Float::with_val(bits, z);
    let tol = Float::with_val(bits, rel_tol);
    let zabs = z.to_f64().abs();

    let mut term = Float::with_val(bits, 1);
    let mut sum = Float::with_val(bits, 1);
    let mut log10_peak = 0.0f64;
    let mut small_run = 0u32;
    let mut num = Float::new(bits);
    let mut den = Float::new(bits);

    for n in 0..max_terms {
        // term_{n+1} = term_n (a+n) z / ((b+n)(n+1))
        num.assign_add(&a, n as u64);
        den.assign_add(&b, n as u64);
        term *= &num;
        term *= &z;
        den *= (n + 1) as u64;
        term /= &den;
        sum += &term;

        let lp = log10_abs(&sum);
        if lp > log10_peak {
            log10_peak = lp;
        }

        // Only trust smallness once the terms are decreasing in magnitude.
        let past_peak = (n + 1) as f64 > zabs;
        let threshold = Float::with_val(bits, sum.abs_ref()) * &tol;
        let small = term.is_zero() || term.cmp_abs(&threshold) != Some(std::cmp::Ordering::Greater);
        if past_peak && small {
            small_run += 1;
            if small_run >= 2 {
                return Ok(SeriesSum { value: sum, log10_peak });
            }
        } else {
            small_run = 0;
        }
        if !sum.is_finite() {
            return Err(Error::Domain(format!("M series overflowed at z = {}", zabs)));
        }
    }
    Err(Error::NoConvergence { what: "Kummer M series".into(), terms: max_terms })
}

trait AssignAdd {
    fn assign_add(&mut self, x: &Real, n: u64);
}

impl AssignAdd for Float {
    fn assign_add(&mut self, x: &Real, n: u64) {
        self.assign(x);
        *self += n;
    }
}

fn check_m_params(b: &Real) -> Result<()> {
    if is_nonpositive_integer(b) {
        return Err(Error::Pole(format!("Kummer M is undefined for b = {}", b.to_f64())));
    }
    Ok(())
}

/// `M(a,b,z)` carried at `digits + margin` digits, with the margin enlarged
/// until the measured cancellation fits. Result is not rounded.
pub(crate) fn kummer_m_raw(a: &Real, b: &Real, z: &Real, digits: u32, prec: &PrecisionConfig) -> Result<Real> {
    check_m_params(b)?;
    if z.is_zero() {
        return Ok(Float::with_val(bits_for_digits(digits), 1));
    }
    let mut margin = 0u32;
    loop {
        let bits = bits_for_digits(digits + margin);
        let tol = prec.series_rel_tol.min(10f64.powi(-(digits as i32))) * 10f64.powi(-(margin as i32));
        let s = m_series(a, b, z, bits, tol.max(f64::MIN_POSITIVE), prec.max_terms)?;
        let lost = s.cancellation_digits();
        if lost <= margin as f64 || margin >= MAX_MARGIN_DIGITS {
            return Ok(s.value);
        }
        margin = (2 * margin).max(lost.ceil() as u32 + 2).min(MAX_MARGIN_DIGITS);
    }
}

/// Kummer's function of the first kind, `M(a,b,z)`, to `prec.digits` digits.
pub fn kummer_m(args: &KummerArgs, prec: &PrecisionConfig) -> Result<Real> {
    let v = kummer_m_raw(&args.a, &args.b, &args.z, prec.digits + prec.guard_digits, prec)?;
    Ok(prec.round(&v))
}

/// Diagnostics of a `U` evaluation.
#[derive(Debug, Clone)]
pub struct UEvaluation {
    pub value: Real,
    /// Cancellation margin (decimal digits) the final attempt carried.
    pub margin_digits: u32,
    /// Measured loss in the reflection combination.
    pub cancellation_digits: f64,
    pub attempts: u32,
}

fn check_u_args(args: &KummerArgs) -> Result<()> {
    if args.b.is_integer() {
        return Err(Error::Pole(format!(
            "Kummer U via reflection needs non-integer b, got {}",
            args.b.to_f64()
        )));
    }
    if args.z <= 0 {
        return Err(Error::Domain(format!("Kummer U needs z > 0, got {}", args.z.to_f64())));
    }
    Ok(())
}

/// Reflection formula at a fixed number of digits for every intermediate
/// (both `M` sums, Gamma factors, and the combination). Returns `U` and the
/// two bracket terms whose difference it is built from.
fn reflection(args: &KummerArgs, digits: u32, prec: &PrecisionConfig, adaptive_m: bool) -> Result<(Real, Real, Real)> {
    let bits = bits_for_digits(digits);
    let one = Float::with_val(bits, 1);
    let a = Float::with_val(bits, &args.a);
    let b = Float::with_val(bits, &args.b);
    let z = Float::with_val(bits, &args.z);

    let a2 = Float::with_val(bits, &a - &b) + 1u32; // 1 + a - b
    let b2 = Float::with_val(bits, 2u32 - Float::with_val(bits, &b)); // 2 - b

    let (m1, m2) = if adaptive_m {
        (kummer_m_raw(&a, &b, &z, digits, prec)?, kummer_m_raw(&a2, &b2, &z, digits, prec)?)
    } else {
        let tol = 10f64.powi(-(digits as i32));
        (
            m_series(&a, &b, &z, bits, tol, prec.max_terms)?.value,
            m_series(&a2, &b2, &z, bits, tol, prec.max_terms)?.value,
        )
    };

    let t1 = Float::with_val(bits, &m1 * recip_gamma(&a2, bits)) * recip_gamma(&b, bits);
    let zpow = Float::with_val(bits, &one - &b);
    let zpow = Float::with_val(bits, Pow::pow(&z, &zpow));
    let t2 = Float::with_val(bits, &zpow * &m2) * recip_gamma(&a, bits) * recip_gamma(&b2, bits);

    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let sin_pib = Float::with_val(bits, &pi * &b).sin();
    let prefactor = pi / sin_pib;
    let u = Float::with_val(bits, &t1 - &t2) * prefactor;
    Ok((u, t1, t2))
}

/// `U(a,b,z)` with diagnostics about the cancellation margin.
pub fn kummer_u_detailed(args: &KummerArgs, prec: &PrecisionConfig) -> Result<UEvaluation> {
    check_u_args(args)?;
    let target = prec.digits + prec.guard_digits;
    // First guess: M grows like e^z, so the bracket loses about z*log10(e) digits.
    let mut margin = (args.z.to_f64().max(0.0) * std::f64::consts::LOG10_E).ceil() as u32;
    let mut attempts = 0;
    loop {
        attempts += 1;
        let (u, t1, t2) = reflection(args, target + margin, prec, true)?;
        let peak = log10_abs(&t1).max(log10_abs(&t2));
        let lu = log10_abs(&u);
        let diff = Float::with_val(u.prec(), &t1 - &t2);
        let lost = if diff.is_zero() {
            if lu == f64::NEG_INFINITY && peak == f64::NEG_INFINITY {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (peak - log10_abs(&diff)).max(0.0)
        };
        if lost <= margin as f64 || margin >= MAX_MARGIN_DIGITS {
            return Ok(UEvaluation {
                value: prec.round(&u),
                margin_digits: margin,
                cancellation_digits: lost,
                attempts,
            });
        }
        margin = (2 * margin).max(lost.min(MAX_MARGIN_DIGITS as f64).ceil() as u32 + 2).min(MAX_MARGIN_DIGITS);
    }
}

/// Kummer's function of the second kind, `U(a,b,z)`, for non-integer `b` and
/// `z > 0`, via the reflection formula at adaptive internal precision.
pub fn kummer_u(args: &KummerArgs, prec: &PrecisionConfig) -> Result<Real> {
    Ok(kummer_u_detailed(args, prec)?.value)
}

/// `U(a,b,z)` with every intermediate held at exactly `digits` digits and no
/// cancellation margin. Low `digits` reproduces the loss of accuracy the
/// reflection formula suffers at large `z`.
pub fn kummer_u_fixed_digits(args: &KummerArgs, digits: u32, prec: &PrecisionConfig) -> Result<Real> {
    check_u_args(args)?;
    Ok(reflection(args, digits, prec, false)?.0)
}

/// n-th z-derivative of `M`: `(a)_n/(b)_n M(a+n, b+n, z)`.
pub fn kummer_m_deriv_n(args: &KummerArgs, n: u32, prec: &PrecisionConfig) -> Result<Real> {
    check_m_params(&args.b)?;
    let bits = prec.work_bits();
    let pa = pochhammer(&Float::with_val(bits, &args.a), n);
    if pa.is_zero() {
        return Ok(Float::with_val(prec.bits(), 0));
    }
    let shifted = args.shifted(n as i64, n as i64);
    check_m_params(&shifted.b)?;
    let pb = pochhammer(&Float::with_val(bits, &args.b), n);
    let m = kummer_m_raw(&shifted.a, &shifted.b, &args.z, prec.digits + prec.guard_digits, prec)?;
    Ok(prec.round(&(Float::with_val(bits, &pa / &pb) * m)))
}

/// n-th z-derivative of `U`: `(-1)^n (a)_n U(a+n, b+n, z)`.
pub fn kummer_u_deriv_n(args: &KummerArgs, n: u32, prec: &PrecisionConfig) -> Result<Real> {
    check_u_args(args)?;
    let bits = prec.work_bits();
    let pa = pochhammer(&Float::with_val(bits, &args.a), n);
    if pa.is_zero() {
        return Ok(Float::with_val(prec.bits(), 0));
    }
    let inner = prec.with_extra_guard(5);
    let u = kummer_u(&args.shifted(n as i64, n as i64), &inner)?;
    let mut v = Float::with_val(bits, &pa * &u);
    if n % 2 == 1 {
        v = -v;
    }
    Ok(prec.round(&v))
}

/// First derivative of `U` from the contiguous-function recurrence
/// `dU/dz = [(z + a - b) U(a,b,z) - U(a-1,b,z)] / z`.
pub fn kummer_u_deriv(args: &KummerArgs, prec: &PrecisionConfig) -> Result<Real> {
    check_u_args(args)?;
    let bits = prec.work_bits();
    let inner = prec.with_extra_guard(5);
    let u0 = kummer_u(args, &inner)?;
    let um1 = kummer_u(&args.shifted(-1, 0), &inner)?;
    let z = Float::with_val(bits, &args.z);
    let coef = Float::with_val(bits, &z + &args.a) - &args.b;
    let v = (coef * u0 - um1) / z;
    Ok(prec.round(&v))
}

/// First derivative of `U` from the differentiation identity
/// `dU/dz = -a U(a+1, b+1, z)`.
pub fn kummer_u_deriv_identity(args: &KummerArgs, prec: &PrecisionConfig) -> Result<Real> {
    kummer_u_deriv_n(args, 1, prec)
}

/// Second derivative of `U` from the differentiation identity
/// `d²U/dz² = a (a+1) U(a+2, b+2, z)`.
pub fn kummer_u_deriv2(args: &KummerArgs, prec: &PrecisionConfig) -> Result<Real> {
    kummer_u_deriv_n(args, 2, prec)
}

/// Second derivative of `U` from the expanded closed form
/// `z⁻² a [ z a U₁ - z b U₁ + z U₁ - a b U₁ + b U₀ + b² U₁ - b U₁ ]`
/// with `U₀ = U(a,b,z)` and `U₁ = U(a+1,b,z)`. Kept as an audited route.
pub fn kummer_u_deriv2_printed(args: &KummerArgs, prec: &PrecisionConfig) -> Result<Real> {
    check_u_args(args)?;
    let bits = prec.work_bits();
    let inner = prec.with_extra_guard(5);
    let u0 = kummer_u(args, &inner)?;
    let u1 = kummer_u(&args.shifted(1, 0), &inner)?;
    let a = Float::with_val(bits, &args.a);
    let b = Float::with_val(bits, &args.b);
    let z = Float::with_val(bits, &args.z);

    let za = Float::with_val(bits, &z * &a);
    let zb = Float::with_val(bits, &z * &b);
    let ab = Float::with_val(bits, &a * &b);
    let b2 = Float::with_val(bits, b.square_ref());
    // coefficient of U₁: z a - z b + z - a b + b² - b
    let c1 = Float::with_val(bits, &za - &zb) + &z - &ab + &b2 - &b;
    let brace = Float::with_val(bits, &c1 * &u1) + Float::with_val(bits, &b * &u0);
    let z2 = Float::with_val(bits, z.square_ref());
    let v = a * brace / z2;
    Ok(prec.round(&v))
}

/// `e^{-z/2} z^{1/2+μ} M(1/2 + μ - κ, 1 + 2μ, z)`.
pub fn whittaker_w(kappa: &Real, mu: &Real, z: &Real, prec: &PrecisionConfig) -> Result<Real> {
    let bits = prec.work_bits();
    let half = Float::with_val(bits, 0.5);
    let b = Float::with_val(bits, mu * 2u32) + 1u32;
    if is_nonpositive_integer(&b) {
        return Err(Error::Pole(format!("Whittaker function needs 1+2mu not a nonpositive integer, got {}", b.to_f64())));
    }
    if *z <= 0 {
        return Err(Error::Domain(format!("Whittaker function needs z > 0, got {}", z.to_f64())));
    }
    let a = Float::with_val(bits, &half + mu) - kappa;
    let m = kummer_m_raw(&a, &b, z, prec.digits + prec.guard_digits, prec)?;
    let zz = Float::with_val(bits, z);
    let expo = Float::with_val(bits, &zz * -0.5f64).exp();
    let pw = Float::with_val(bits, &half + mu);
    let zpow = Float::with_val(bits, Pow::pow(&zz, &pw));
    Ok(prec.round(&(expo * zpow * m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::rel_diff;

    fn p40() -> PrecisionConfig {
        PrecisionConfig::new(40).unwrap()
    }

    #[test]
    fn pochhammer_examples() {
        let p = p40();
        assert_eq!(pochhammer(&p.real(7.3), 0), 1);
        assert_eq!(pochhammer(&p.real(2.0), 3), 24);
        assert_eq!(pochhammer(&p.ratio(-1, 4), 2), p.ratio(-3, 16));
    }

    #[test]
    fn pochhammer_recurrence_is_exact() {
        let p = p40();
        let a = p.ratio(-5, 12);
        for n in 0..30u32 {
            let lhs = pochhammer(&a, n + 1);
            let rhs = Float::with_val(a.prec(), pochhammer(&a, n) * Float::with_val(a.prec(), &a + n));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn gamma_poles_and_values() {
        let p = p40();
        assert!(matches!(gamma(&p.real(0.0), &p), Err(Error::Pole(_))));
        assert!(matches!(gamma(&p.real(-3.0), &p), Err(Error::Pole(_))));
        assert_eq!(gamma(&p.real(1.0), &p).unwrap(), 1);
        let sqrt_pi = p.pi().sqrt();
        assert!(rel_diff(&gamma(&p.real(0.5), &p).unwrap(), &sqrt_pi) < 1e-39);
    }

    #[test]
    fn m_at_zero_is_one() {
        let p = p40();
        let args = KummerArgs::new(p.ratio(-1, 4), p.ratio(1, 2), p.real(0.0));
        assert_eq!(kummer_m(&args, &p).unwrap(), 1);
    }

    #[test]
    fn m_pole_and_nonconvergence() {
        let p = p40();
        let args = KummerArgs::new(p.real(1.0), p.real(-2.0), p.real(1.0));
        assert!(matches!(kummer_m(&args, &p), Err(Error::Pole(_))));
        let mut tight = p.clone();
        tight.max_terms = 5;
        let args = KummerArgs::new(p.real(1.0), p.real(2.0), p.real(30.0));
        assert!(matches!(kummer_m(&args, &tight), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn m_closed_form() {
        let p = p40();
        let args = KummerArgs::new(p.real(1.0), p.real(2.0), p.real(1.0));
        let e_minus_1 = p.real(1.0).exp() - 1u32;
        assert!(rel_diff(&kummer_m(&args, &p).unwrap(), &e_minus_1) < 1e-38);
    }

    #[test]
    fn m_negative_argument_uses_margin() {
        // M(1,2,-z) = (1 - e^{-z})/z; the series alternates with large partial sums.
        let p = p40();
        let z = p.real(-40.0);
        let args = KummerArgs::new(p.real(1.0), p.real(2.0), z.clone());
        let bits = p.work_bits();
        let expected = (Float::with_val(bits, z.exp_ref()) - 1u32) / &z;
        assert!(rel_diff(&kummer_m(&args, &p).unwrap(), &expected) < 1e-38);
    }

    #[test]
    fn u_errors() {
        let p = p40();
        let int_b = KummerArgs::new(p.real(0.5), p.real(1.0), p.real(1.0));
        assert!(matches!(kummer_u(&int_b, &p), Err(Error::Pole(_))));
        let neg_z = KummerArgs::new(p.real(0.5), p.real(0.5), p.real(-1.0));
        assert!(matches!(kummer_u(&neg_z, &p), Err(Error::Domain(_))));
        let zero_z = KummerArgs::new(p.real(0.5), p.real(0.5), p.real(0.0));
        assert!(matches!(kummer_u(&zero_z, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn u_with_a_zero_is_one() {
        let p = p40();
        for z in [0.1, 1.0, 5.0, 10.0] {
            let args = KummerArgs::new(p.real(0.0), p.ratio(1, 2), p.real(z));
            let u = kummer_u(&args, &p).unwrap();
            assert!(rel_diff(&u, &p.real(1.0)) < 1e-38, "z={z}: {u}");
        }
    }

    #[test]
    fn u_minus_one_is_linear() {
        let p = p40();
        let args = KummerArgs::new(p.real(-1.0), p.ratio(1, 2), p.real(3.0));
        assert!(rel_diff(&kummer_u(&args, &p).unwrap(), &p.real(2.5)) < 1e-38);
    }

    #[test]
    fn u_margin_grows_with_z() {
        let p = p40();
        let small = kummer_u_detailed(&KummerArgs::rational(-1, 4, 1, 2, p.real(1.0), &p), &p).unwrap();
        let large = kummer_u_detailed(&KummerArgs::rational(-1, 4, 1, 2, p.real(80.0), &p), &p).unwrap();
        assert!(large.cancellation_digits > 30.0);
        assert!(large.margin_digits as f64 >= large.cancellation_digits);
        assert!(small.cancellation_digits < 5.0);
    }

    #[test]
    fn derivative_routes_vanish_for_a_zero() {
        let p = p40();
        let args = KummerArgs::rational(0, 1, 1, 2, p.real(2.5), &p);
        assert!(kummer_u_deriv(&args, &p).unwrap().to_f64().abs() < 1e-38);
        assert_eq!(kummer_u_deriv_identity(&args, &p).unwrap(), 0);
        assert_eq!(kummer_u_deriv2(&args, &p).unwrap(), 0);
        assert!(kummer_u_deriv2_printed(&args, &p).unwrap().to_f64().abs() < 1e-38);
    }

    #[test]
    fn whittaker_reduces_when_m_parameter_vanishes() {
        let p = p40();
        let mu = p.ratio(1, 4);
        let kappa = p.ratio(3, 4);
        let z = p.real(2.0);
        let w = whittaker_w(&kappa, &mu, &z, &p).unwrap();
        let expected = Float::with_val(p.work_bits(), -1.0f64).exp() * Float::with_val(p.work_bits(), Pow::pow(&z, &p.ratio(3, 4)));
        assert!(rel_diff(&w, &expected) < 1e-38);
    }

    #[test]
    fn whittaker_errors() {
        let p = p40();
        assert!(matches!(whittaker_w(&p.real(0.0), &p.real(-1.0), &p.real(1.0), &p), Err(Error::Pole(_))));
        assert!(matches!(whittaker_w(&p.real(0.0), &p.ratio(1, 4), &p.real(0.0), &p), Err(Error::Domain(_))));
    }
}
