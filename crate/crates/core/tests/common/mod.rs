//! Independent oracles: plain term-by-term series at generous precision,
//! and reference values tabulated to 50 digits with mpmath.
#![allow(dead_code)]

use rug::ops::Pow;
use rug::Float;

pub const BITS: u32 = 400;

pub fn f(s: &str) -> Float {
    Float::with_val(BITS, Float::parse(s).unwrap())
}

pub fn q(n: i64, d: i64) -> Float {
    Float::with_val(BITS, n) / d
}

/// `Σ (a)_k/(b)_k z^k/k!` summed until the term drops below 2^-BITS of the
/// running total, at `BITS` bits.
pub fn series_m(a: &Float, b: &Float, z: &Float) -> Float {
    let mut term = Float::with_val(BITS, 1);
    let mut sum = Float::with_val(BITS, 1);
    for k in 0..100_000u32 {
        term *= Float::with_val(BITS, a + k);
        term /= Float::with_val(BITS, b + k);
        term *= z;
        term /= k + 1;
        sum += &term;
        if term.is_zero() || (k > 10 && term.clone().abs() < Float::with_val(BITS, sum.clone().abs() >> (BITS as i32))) {
            break;
        }
    }
    sum
}

/// `U` from the two-`M` reflection formula with the series above. At
/// `BITS = 400` the cancellation at `z ≤ 100` is harmless.
pub fn series_u(a: &Float, b: &Float, z: &Float) -> Float {
    let one = Float::with_val(BITS, 1);
    let a2 = Float::with_val(BITS, a - b) + 1u32;
    let b2 = Float::with_val(BITS, 2u32 - b.clone());
    let m1 = series_m(a, b, z);
    let m2 = series_m(&a2, &b2, z);
    let rg = |x: &Float| Float::with_val(BITS, x.gamma_ref()).recip();
    let t1 = m1 * rg(&a2) * rg(b);
    let zp = Float::with_val(BITS, Pow::pow(z, Float::with_val(BITS, &one - b)));
    let t2 = zp * m2 * rg(a) * rg(&b2);
    let pi = Float::with_val(BITS, rug::float::Constant::Pi);
    let s = Float::with_val(BITS, &pi * b).sin();
    (t1 - t2) * pi / s
}

pub fn rel(a: &Float, b: &Float) -> f64 {
    let d = Float::with_val(BITS, a - b).abs();
    if b.is_zero() {
        return d.to_f64();
    }
    (d / Float::with_val(BITS, b.abs_ref())).to_f64()
}

/// mpmath, 50 digits.
pub mod mpmath {
    /// `hyp1f1(-1/4, 1/2, 1)`
    pub const M_Q_1: &str = "0.33899232248896665958183673524951689346738450563741";
    /// `hyperu(-1/4, 1/2, 1)`
    pub const U_Q_1: &str = "1.0474262413208410947074745171298266192364002458708";
    /// `hyperu(-1/4, 1/2, z)` at `z = 40, 60, 80`
    pub const U_Q_LARGE: [(f64, &str); 3] = [
        (40.0, "2.518751722918526407695628097676035822703310418558"),
        (60.0, "2.7860346348282599253174249522684715570330176745735"),
        (80.0, "2.9930205731575854577094814659388804494680543493423"),
    ];
    /// `diff(hyperu(-1/4, 1/2, t), 2)` and the second derivative.
    pub const DU_Q_2: &str = "0.13887274872047061132933127559186500845638289793024";
    pub const D2U_Q_2: &str = "-0.048426135655477742141645565281096921742189523751694";
    /// `whitm(kappa, 1/4, z)` for kappa = -1/12 then -5/12, z = 0.5, 1, 3.
    pub const WHITM: [(i64, f64, &str); 6] = [
        (-1, 0.5, "0.6188458195564548443492316001479950264447341364082"),
        (-1, 1.0, "1.1089463065562371755805241268276944528116182231616"),
        (-1, 3.0, "3.9608736995385834314976141212760256752213503919659"),
        (-5, 0.5, "0.68881622165473325485907619107797364662582010515512"),
        (-5, 1.0, "1.3617935265923905073669354301815156389544673172879"),
        (-5, 3.0, "6.5705753809977729772991077366762807368144126293209"),
    ];
    /// Figure kernels at `z = (w+1)²/0.6`, `w = 0, 2, 4`: `(w, U, M)`.
    pub const FIGURE_KERNELS: [(f64, &str, &str); 3] = [
        (0.0, "1.1713869440613858640112122027189005471053098410981", "-0.37577835481931986421952399145897877258620448709027"),
        (2.0, "1.975953022923995985424528343115091737152339702953", "-166413.34270424715407615022852838313742885501919181"),
        (4.0, "2.5444331458306067672743038617539109562818362906289", "-28128294035050158.748735121144038568267483823896129"),
    ];
    /// `gamma(1/4)`
    pub const GAMMA_QUARTER: &str = "3.6256099082219083119306851558676720029951676828801";
}
