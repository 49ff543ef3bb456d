//! Working precision and the arbitrary-precision scalar used by every module.

use rug::float::Constant;
use rug::{Float, Rational};

use crate::error::{Error, Result};

/// Arbitrary-precision real scalar (MPFR).
pub type Real = Float;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Number of mantissa bits needed to carry `digits` significant decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + 4
}

/// Precision settings shared by all numerics. Passed explicitly; there is no
/// process-global precision.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionConfig {
    /// Working decimal precision P of returned results.
    pub digits: u32,
    /// Extra digits carried internally.
    pub guard_digits: u32,
    /// Term-to-sum stopping ratio for series.
    pub series_rel_tol: f64,
    /// Series cutoff.
    pub max_terms: usize,
}

impl PrecisionConfig {
    pub const DEFAULT_GUARD: u32 = 10;
    pub const DEFAULT_MAX_TERMS: usize = 100_000;

    pub fn new(digits: u32) -> Result<Self> {
        let cfg = PrecisionConfig {
            digits,
            guard_digits: Self::DEFAULT_GUARD,
            series_rel_tol: 10f64.powi(-((digits + Self::DEFAULT_GUARD) as i32)),
            max_terms: Self::DEFAULT_MAX_TERMS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.digits < 15 {
            return Err(Error::InvalidParameter(format!(
                "precision digits must be >= 15, got {}",
                self.digits
            )));
        }
        if self.guard_digits < 5 {
            return Err(Error::InvalidParameter(format!(
                "guard digits must be >= 5, got {}",
                self.guard_digits
            )));
        }
        if !(self.series_rel_tol > 0.0 && self.series_rel_tol < 10f64.powi(-(self.digits as i32))) {
            return Err(Error::InvalidParameter(format!(
                "series_rel_tol must lie in (0, 1e-{}), got {:e}",
                self.digits, self.series_rel_tol
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidParameter("max_terms must be positive".into()));
        }
        Ok(())
    }

    /// Bits for results rounded to P digits.
    pub fn bits(&self) -> u32 {
        bits_for_digits(self.digits)
    }

    /// Bits for internal work: P + guard digits.
    pub fn work_bits(&self) -> u32 {
        bits_for_digits(self.digits + self.guard_digits)
    }

    /// Copy with `extra` additional guard digits.
    pub fn with_extra_guard(&self, extra: u32) -> Self {
        PrecisionConfig {
            guard_digits: self.guard_digits + extra,
            series_rel_tol: self.series_rel_tol * 10f64.powi(-(extra as i32)),
            ..self.clone()
        }
    }

    /// Unit roundoff at P digits, 10^(1-P).
    pub fn epsilon(&self) -> f64 {
        10f64.powi(1 - self.digits as i32)
    }

    pub fn real(&self, x: f64) -> Real {
        Float::with_val(self.work_bits(), x)
    }

    pub fn ratio(&self, num: i64, den: i64) -> Real {
        ratio(num, den, self.work_bits())
    }

    pub fn parse(&self, s: &str) -> Result<Real> {
        parse_real(s, self.work_bits())
    }

    pub fn pi(&self) -> Real {
        Float::with_val(self.work_bits(), Constant::Pi)
    }

    /// Round a value to the P-digit result precision.
    pub fn round(&self, x: &Real) -> Real {
        Float::with_val(self.bits(), x)
    }
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig::new(40).expect("default precision is valid")
    }
}

pub fn ratio(num: i64, den: i64, bits: u32) -> Real {
    Float::with_val(bits, Rational::from((num, den)))
}

/// Parse a decimal literal (e.g. "0.1", "-1/4" is not accepted) into a Real.
pub fn parse_real(s: &str, bits: u32) -> Result<Real> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        let d: i64 = d.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        if d == 0 {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(ratio(n, d, bits));
    }
    let parsed = Float::parse(s).map_err(|e| Error::Parse(format!("bad number '{s}': {e}")))?;
    let x = Float::with_val(bits, parsed);
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite number '{s}'")));
    }
    Ok(x)
}

/// Format with `digits` significant digits in scientific notation, locale
/// independent, e.g. `-1.2500000000e-1`.
pub fn format_sci(x: &Real, digits: u32) -> String {
    let d = digits.max(1) as usize;
    if x.is_zero() {
        return format!("{:.*e}", d - 1, 0.0f64);
    }
    format!("{:.*e}", d, x)
}

/// log10 |x| as f64; -inf for zero.
pub fn log10_abs(x: &Real) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log10() + e as f64 * std::f64::consts::LOG10_2
}

/// Relative difference |a-b| / max(|b|, floor).
pub fn rel_diff(a: &Real, b: &Real) -> f64 {
    let prec = a.prec().max(b.prec());
    let d = Float::with_val(prec, a - b).abs();
    let scale = Float::with_val(prec, b.abs_ref());
    if scale.is_zero() {
        return d.to_f64();
    }
    Float::with_val(prec, d / scale).to_f64()
}
