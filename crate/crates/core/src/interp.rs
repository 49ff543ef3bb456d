//! Local quintic interpolation on a tabulated grid.

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::Real;

/// Index of the interval `[xs[i], xs[i+1]]` containing `x`, or `None` when
/// `x` is outside the hull.
pub fn locate(xs: &[Real], x: &Real) -> Option<usize> {
    let n = xs.len();
    if n < 2 || *x < xs[0] || *x > xs[n - 1] {
        return None;
    }
    let i = xs.partition_point(|v| v <= x);
    Some(i.saturating_sub(1).min(n - 2))
}

/// Exact node index if `x` coincides with a grid node.
pub fn node_index(xs: &[Real], x: &Real) -> Option<usize> {
    let i = xs.partition_point(|v| v < x);
    (i < xs.len() && xs[i] == *x).then_some(i)
}

pub fn hull_error(xs: &[Real], x: &Real) -> Error {
    Error::OutOfHull {
        omega: x.to_f64(),
        lo: xs.first().map(|v| v.to_f64()).unwrap_or(f64::NAN),
        hi: xs.last().map(|v| v.to_f64()).unwrap_or(f64::NAN),
    }
}

/// Values, first and second derivatives of one tabulated profile.
#[derive(Debug, Clone, Copy)]
pub struct Column<'a> {
    pub y: &'a [Real],
    pub d1: &'a [Real],
    pub d2: &'a [Real],
}

/// Quintic Hermite basis on `[0, 1]`, ordered as the data
/// `(y0, h y0', h² y0'', y1, h y1', h² y1'')`.
fn basis(t: &Real) -> [Real; 6] {
    let b = t.prec();
    let t2 = Float::with_val(b, t.square_ref());
    let t3 = Float::with_val(b, &t2 * t);
    let t4 = Float::with_val(b, &t3 * t);
    let t5 = Float::with_val(b, &t4 * t);
    let poly = |c: [i32; 6], den: u32| -> Real {
        let mut acc = Float::with_val(b, c[0]);
        for (ck, tk) in c[1..].iter().zip([t, &t2, &t3, &t4, &t5]) {
            if *ck != 0 {
                acc += Float::with_val(b, tk * *ck);
            }
        }
        acc / den
    };
    [
        poly([1, 0, 0, -10, 15, -6], 1),
        poly([0, 1, 0, -6, 8, -3], 1),
        poly([0, 0, 1, -3, 3, -1], 2),
        poly([0, 0, 0, 10, -15, 6], 1),
        poly([0, 0, 0, -4, 7, -3], 1),
        poly([0, 0, 0, 1, -2, 1], 2),
    ]
}

/// Interpolate each column at `x` with the piecewise quintic Hermite
/// interpolant, which is twice continuously differentiable across nodes.
/// Returns tabulated values verbatim at grid nodes.
pub fn interpolate_many(xs: &[Real], columns: &[Column<'_>], x: &Real) -> Result<Vec<Real>> {
    if let Some(j) = node_index(xs, x) {
        return Ok(columns.iter().map(|c| c.y[j].clone()).collect());
    }
    let i = locate(xs, x).ok_or_else(|| hull_error(xs, x))?;
    let bits = x.prec().max(xs[0].prec());
    let h = Float::with_val(bits, &xs[i + 1] - &xs[i]);
    let h2 = Float::with_val(bits, h.square_ref());
    let t = Float::with_val(bits, x - &xs[i]) / &h;
    let w = basis(&t);
    Ok(columns
        .iter()
        .map(|c| {
            let data = [
                Float::with_val(bits, &c.y[i]),
                Float::with_val(bits, &c.d1[i] * &h),
                Float::with_val(bits, &c.d2[i] * &h2),
                Float::with_val(bits, &c.y[i + 1]),
                Float::with_val(bits, &c.d1[i + 1] * &h),
                Float::with_val(bits, &c.d2[i + 1] * &h2),
            ];
            let mut acc = Float::with_val(bits, 0);
            for (wk, dk) in w.iter().zip(&data) {
                acc += Float::with_val(bits, wk * dk);
            }
            acc
        })
        .collect())
}

pub fn interpolate(xs: &[Real], col: Column<'_>, x: &Real) -> Result<Real> {
    Ok(interpolate_many(xs, &[col], x)?.pop().expect("one column"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<Real> {
        (0..n).map(|i| Float::with_val(128, i as f64 * 0.25 - 1.0)).collect()
    }

    fn table(xs: &[Real], f: impl Fn(f64) -> [f64; 3]) -> [Vec<Real>; 3] {
        let mut out = [Vec::new(), Vec::new(), Vec::new()];
        for x in xs {
            let v = f(x.to_f64());
            for k in 0..3 {
                out[k].push(Float::with_val(128, v[k]));
            }
        }
        out
    }

    #[test]
    fn reproduces_quintics_exactly() {
        let xs = grid(20);
        let p = |x: f64| [0.3 * x.powi(5) - 2.0 * x * x + 1.5, 1.5 * x.powi(4) - 4.0 * x, 6.0 * x.powi(3) - 4.0];
        let [y, d1, d2] = table(&xs, p);
        let col = Column { y: &y, d1: &d1, d2: &d2 };
        for q in [-0.97, -0.5, 0.1, 2.3, 3.74] {
            let x = Float::with_val(128, q);
            let v = interpolate(&xs, col, &x).unwrap();
            let d = (v.to_f64() - p(q)[0]).abs();
            assert!(d < 1e-13, "x={q} err={d}");
        }
    }

    #[test]
    fn converges_at_sixth_order() {
        let err = |n: usize| {
            let xs: Vec<Real> = (0..=n).map(|i| Float::with_val(128, i as f64 / n as f64)).collect();
            let [y, d1, d2] = table(&xs, |x| [x.sin(), x.cos(), -x.sin()]);
            let col = Column { y: &y, d1: &d1, d2: &d2 };
            (0..n)
                .map(|i| {
                    let q = (i as f64 + 0.37) / n as f64;
                    (interpolate(&xs, col, &Float::with_val(128, q)).unwrap().to_f64() - q.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(8) / err(16);
        assert!(ratio > 40.0 && ratio < 90.0, "ratio {ratio}");
    }

    #[test]
    fn nodes_are_returned_verbatim_and_hull_enforced() {
        let xs = grid(10);
        let [y, d1, d2] = table(&xs, |x| [x.sin(), x.cos(), -x.sin()]);
        let col = Column { y: &y, d1: &d1, d2: &d2 };
        for (x, v) in xs.iter().zip(&y) {
            assert_eq!(interpolate(&xs, col, x).unwrap(), *v);
        }
        let outside = Float::with_val(128, 5.0);
        assert!(matches!(interpolate(&xs, col, &outside), Err(Error::OutOfHull { .. })));
    }
}
