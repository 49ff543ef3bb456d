//! Chebyshev interpolants on a panel, used for nested quadrature.

use std::f64::consts::PI;

/// Degree-(n-1) Chebyshev interpolant of a function on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct ChebPanel {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl ChebPanel {
    /// First-kind Chebyshev nodes mapped onto `[lo, hi]`.
    pub fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| {
                let t = (PI * (k as f64 + 0.5) / n as f64).cos();
                0.5 * (lo + hi) + 0.5 * (hi - lo) * t
            })
            .collect()
    }

    /// Build from samples taken at [`ChebPanel::nodes`].
    pub fn from_samples(lo: f64, hi: f64, samples: &[f64]) -> Self {
        let n = samples.len();
        let coeffs = (0..n)
            .map(|j| {
                let s: f64 = samples
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                    .sum();
                let c = 2.0 * s / n as f64;
                if j == 0 {
                    c / 2.0
                } else {
                    c
                }
            })
            .collect();
        ChebPanel { lo, hi, coeffs }
    }

    #[cfg(test)]
    pub fn from_fn(lo: f64, hi: f64, n: usize, mut f: impl FnMut(f64) -> f64) -> Self {
        let samples: Vec<f64> = Self::nodes(lo, hi, n).into_iter().map(&mut f).collect();
        Self::from_samples(lo, hi, &samples)
    }

    fn to_unit(&self, x: f64) -> f64 {
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }

    #[cfg(test)]
    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, self.to_unit(x))
    }

    /// `∫_lo^x` of the interpolant.
    pub fn integral_to(&self, x: f64) -> f64 {
        let n = self.coeffs.len();
        // Antiderivative coefficients in T_k.
        let mut anti = vec![0.0; n + 1];
        for (j, &c) in self.coeffs.iter().enumerate() {
            match j {
                0 => anti[1] += c,
                1 => {
                    anti[2] += c / 4.0;
                    anti[0] += c / 4.0;
                }
                _ => {
                    anti[j + 1] += c / (2.0 * (j as f64 + 1.0));
                    anti[j - 1] -= c / (2.0 * (j as f64 - 1.0));
                }
            }
        }
        let half_width = 0.5 * (self.hi - self.lo);
        half_width * (clenshaw(&anti, self.to_unit(x)) - clenshaw(&anti, -1.0))
    }
}

fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + coeffs.first().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_exponential() {
        let p = ChebPanel::from_fn(0.5, 1.5, 24, f64::exp);
        assert!((p.eval(0.8) - 0.8f64.exp()).abs() < 1e-14);
        let exact = 1.2f64.exp() - 0.5f64.exp();
        assert!((p.integral_to(1.2) - exact).abs() < 1e-14);
        assert!(p.integral_to(0.5).abs() < 1e-15);
    }

    #[test]
    fn integrates_polynomial_exactly() {
        let p = ChebPanel::from_fn(-2.0, 1.0, 8, |x| 3.0 * x * x - x + 2.0);
        let anti = |x: f64| x * x * x - 0.5 * x * x + 2.0 * x;
        assert!((p.integral_to(0.3) - (anti(0.3) - anti(-2.0))).abs() < 1e-12);
    }
}
