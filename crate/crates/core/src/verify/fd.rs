//! Second-order central finite differences of the Navier-Stokes system.
//!
//! At each node the residuals
//!
//! ```text
//! continuity  u_x + v_y + w_z
//! momentum_x  u_t + u u_x + v u_y + w u_z - ν Δu + p_x/ρ
//! momentum_y  v_t + u v_x + v v_y + w v_z - ν Δv + p_y/ρ
//! momentum_z  w_t + u w_x + v w_y + w w_z - ν Δw + p_z/ρ - a
//! ```
//!
//! are assembled from nine field evaluations (centre, ±Δ along each axis,
//! ±dt in time).

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::error::Result;
use crate::fields::{evaluate_field, GridSpec, SpaceTimePoint};
use crate::precision::{PrecisionConfig, Real};
use crate::reduction::{FlowParams, ProfileSet};

/// Anything that yields `(u, v, w, p)` at a space-time point.
pub trait FlowField: Sync {
    fn eval(&self, pt: &SpaceTimePoint) -> Result<[Real; 4]>;
}

/// The field assembled from a profile set.
pub struct ProfileField<'a> {
    pub profiles: &'a ProfileSet,
    pub prec: &'a PrecisionConfig,
}

impl FlowField for ProfileField<'_> {
    fn eval(&self, pt: &SpaceTimePoint) -> Result<[Real; 4]> {
        let s = evaluate_field(pt, self.profiles, self.prec)?;
        Ok([s.u, s.v, s.w, s.p])
    }
}

/// Quadratic polynomial in `(x, y, z, t)`: coefficients of
/// `1, x, y, z, t, x², y², z², t², xy, xz, xt, yz, yt, zt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic(pub [f64; 15]);

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Quadratic {
    fn coords(pt: &SpaceTimePoint) -> [&Real; 4] {
        [&pt.x, &pt.y, &pt.z, &pt.t]
    }

    pub fn value(&self, pt: &SpaceTimePoint, bits: u32) -> Real {
        let c = &self.0;
        let q = Self::coords(pt);
        let mut v = Float::with_val(bits, c[0]);
        for i in 0..4 {
            v += Float::with_val(bits, q[i] * c[1 + i]);
            v += Float::with_val(bits, q[i] * q[i]) * c[5 + i];
        }
        for (k, (i, j)) in PAIRS.iter().enumerate() {
            v += Float::with_val(bits, q[*i] * q[*j]) * c[9 + k];
        }
        v
    }

    /// Partial derivative along coordinate `i` (x, y, z, t).
    pub fn gradient(&self, pt: &SpaceTimePoint, i: usize, bits: u32) -> Real {
        let c = &self.0;
        let q = Self::coords(pt);
        let mut v = Float::with_val(bits, c[1 + i]);
        v += Float::with_val(bits, q[i] * (2.0 * c[5 + i]));
        for (k, (a, b)) in PAIRS.iter().enumerate() {
            if *a == i {
                v += Float::with_val(bits, q[*b] * c[9 + k]);
            } else if *b == i {
                v += Float::with_val(bits, q[*a] * c[9 + k]);
            }
        }
        v
    }

    /// Second derivative along spatial axis `i`.
    pub fn second(&self, i: usize) -> f64 {
        2.0 * self.0[5 + i]
    }
}

/// Field whose four components are quadratic polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticField {
    pub components: [Quadratic; 4],
    pub bits: u32,
}

impl FlowField for QuadraticField {
    fn eval(&self, pt: &SpaceTimePoint) -> Result<[Real; 4]> {
        Ok([0, 1, 2, 3].map(|k| self.components[k].value(pt, self.bits)))
    }
}

impl QuadraticField {
    /// The four residuals assembled from exact derivatives.
    pub fn analytic_residuals(&self, pt: &SpaceTimePoint, nu: &Real, rho: &Real, accel: &Real) -> [Real; 4] {
        let b = self.bits;
        let vals = self.eval(pt).expect("polynomial");
        let grad = |k: usize, i: usize| self.components[k].gradient(pt, i, b);
        let lap = |k: usize| (0..3).map(|i| self.components[k].second(i)).sum::<f64>();
        let cont = grad(0, 0) + grad(1, 1) + grad(2, 2);
        let mut out = [cont, Float::new(b), Float::new(b), Float::new(b)];
        for k in 0..3 {
            let mut r = grad(k, 3);
            for i in 0..3 {
                r += Float::with_val(b, &vals[i] * grad(k, i));
            }
            r -= Float::with_val(b, nu * lap(k));
            r += Float::with_val(b, grad(3, k) / rho);
            if k == 2 {
                r -= accel;
            }
            out[k + 1] = r;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Continuity,
    MomentumX,
    MomentumY,
    MomentumZ,
}

impl Equation {
    pub const ALL: [Equation; 4] = [Equation::Continuity, Equation::MomentumX, Equation::MomentumY, Equation::MomentumZ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Equation::Continuity => "continuity",
            Equation::MomentumX => "momentum_x",
            Equation::MomentumY => "momentum_y",
            Equation::MomentumZ => "momentum_z",
        }
    }
}

/// Norms of one equation's residual over the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationNorms {
    pub equation: Equation,
    pub sup: f64,
    /// Root mean square over nodes.
    pub l2: f64,
    /// Sup of the residual divided by the largest term magnitude at each node.
    pub sup_normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdResiduals {
    pub delta: f64,
    pub dt: f64,
    pub nodes: usize,
    pub equations: [EquationNorms; 4],
}

impl FdResiduals {
    pub fn get(&self, e: Equation) -> &EquationNorms {
        &self.equations[e as usize]
    }
}

/// Raw and normalised residuals at every node of `nodes`.
pub fn fd_node_residuals(
    field: &dyn FlowField,
    nodes: &[SpaceTimePoint],
    p: &FlowParams,
    delta: f64,
    dt: f64,
    prec: &PrecisionConfig,
) -> Result<Vec<[(Real, f64); 4]>> {
    let b = prec.work_bits();
    let d = prec.real(delta);
    let dtr = prec.real(dt);
    let two_d = Float::with_val(b, &d * 2u32);
    let d2 = Float::with_val(b, d.square_ref());
    let two_dt = Float::with_val(b, &dtr * 2u32);
    nodes
        .par_iter()
        .map(|pt| {
            let centre = field.eval(pt)?;
            // plus[i][k], minus[i][k]: component k shifted along axis i (x, y, z, t)
            let mut plus: Vec<[Real; 4]> = Vec::with_capacity(4);
            let mut minus: Vec<[Real; 4]> = Vec::with_capacity(4);
            for axis in 0..4 {
                let step = if axis == 3 { &dtr } else { &d };
                let mut hi = pt.clone();
                let mut lo = pt.clone();
                let (ch, cl) = match axis {
                    0 => (&mut hi.x, &mut lo.x),
                    1 => (&mut hi.y, &mut lo.y),
                    2 => (&mut hi.z, &mut lo.z),
                    _ => (&mut hi.t, &mut lo.t),
                };
                *ch += step;
                *cl -= step;
                plus.push(field.eval(&hi)?);
                minus.push(field.eval(&lo)?);
            }
            let first = |axis: usize, k: usize| -> Real {
                let den = if axis == 3 { &two_dt } else { &two_d };
                Float::with_val(b, &plus[axis][k] - &minus[axis][k]) / den
            };
            let second = |axis: usize, k: usize| -> Real {
                let mut s = Float::with_val(b, &plus[axis][k] + &minus[axis][k]);
                s -= Float::with_val(b, &centre[k] * 2u32);
                s / &d2
            };

            let cont_terms = [first(0, 0), first(1, 1), first(2, 2)];
            let noise = prec.epsilon().sqrt();
            let mut out = vec![assemble(&cont_terms, b, noise)];
            for k in 0..3 {
                let mut terms = vec![first(3, k)];
                for i in 0..3 {
                    terms.push(Float::with_val(b, &centre[i] * first(i, k)));
                }
                let lap = second(0, k) + second(1, k) + second(2, k);
                terms.push(-Float::with_val(b, &p.nu * lap));
                terms.push(first(k, 3) / &p.rho);
                if k == 2 {
                    terms.push(-Float::with_val(b, &p.accel));
                }
                out.push(assemble(&terms, b, noise));
            }
            Ok(out.try_into().expect("four equations"))
        })
        .collect()
}

/// Sum of `terms` and its size relative to the largest term; terms below
/// `noise` count as `noise`.
fn assemble(terms: &[Real], b: u32, noise: f64) -> (Real, f64) {
    let mut r = Float::with_val(b, 0);
    let mut scale = noise;
    for t in terms {
        r += t;
        scale = scale.max(t.to_f64().abs());
    }
    let norm = r.to_f64().abs() / scale;
    (r, norm)
}

/// Residual norms of the four equations over the nodes of `grid`, with
/// spatial step `delta` and temporal step `grid.dt`.
pub fn fd_pde_residual(
    field: &dyn FlowField,
    grid: &GridSpec,
    p: &FlowParams,
    delta: f64,
    prec: &PrecisionConfig,
) -> Result<FdResiduals> {
    grid.validate()?;
    let nodes = grid.points(prec);
    let per_node = fd_node_residuals(field, &nodes, p, delta, grid.dt, prec)?;
    let equations = Equation::ALL.map(|e| {
        let k = e as usize;
        let mut sup = 0.0f64;
        let mut sq = 0.0f64;
        let mut sup_n = 0.0f64;
        for row in &per_node {
            let v = row[k].0.to_f64().abs();
            sup = sup.max(v);
            sq += v * v;
            sup_n = sup_n.max(row[k].1);
        }
        EquationNorms { equation: e, sup, l2: (sq / per_node.len() as f64).sqrt(), sup_normalized: sup_n }
    });
    Ok(FdResiduals { delta, dt: grid.dt, nodes: nodes.len(), equations })
}

/// Sup and RMS of `T_t - ν T_xx` for the heat kernel `T = t^(-1/2) exp(-x²/(4νt))`
/// at the nodes `xs`, time `t`, spatial step `delta` and temporal step `dt`.
pub fn heat_kernel_residual(nu: f64, xs: &[f64], t: f64, delta: f64, dt: f64, prec: &PrecisionConfig) -> (f64, f64) {
    let b = prec.work_bits();
    let nu_r = prec.real(nu);
    let kernel = |x: &Real, t: &Real| -> Real {
        let arg = -Float::with_val(b, x.square_ref()) / (Float::with_val(b, &nu_r * t) * 4u32);
        arg.exp() / Float::with_val(b, t.sqrt_ref())
    };
    let d = prec.real(delta);
    let dtr = prec.real(dt);
    let tr = prec.real(t);
    let res: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let x = prec.real(x);
            let centre = kernel(&x, &tr);
            let tp = kernel(&x, &Float::with_val(b, &tr + &dtr));
            let tm = kernel(&x, &Float::with_val(b, &tr - &dtr));
            let xp = kernel(&Float::with_val(b, &x + &d), &tr);
            let xm = kernel(&Float::with_val(b, &x - &d), &tr);
            let ut = (tp - tm) / Float::with_val(b, &dtr * 2u32);
            let uxx = (xp + xm - Float::with_val(b, &centre * 2u32)) / Float::with_val(b, d.square_ref());
            (ut - Float::with_val(b, &nu_r * uxx)).to_f64().abs()
        })
        .collect();
    let sup = res.iter().cloned().fold(0.0, f64::max);
    let l2 = (res.iter().map(|v| v * v).sum::<f64>() / res.len() as f64).sqrt();
    (sup, l2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::AxisRange;

    #[test]
    fn stencils_are_exact_on_quadratics() {
        let prec = PrecisionConfig::new(30).unwrap();
        let b = prec.work_bits();
        let mut coeffs = [[0.0; 15]; 4];
        for (k, row) in coeffs.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = ((k * 15 + j) as f64 * 0.37).sin();
            }
        }
        let field = QuadraticField { components: coeffs.map(Quadratic), bits: b };
        let mut p = crate::reduction::FlowParams::figure_defaults(&prec);
        p.accel = prec.real(0.4);
        let grid = GridSpec::new(
            AxisRange::new(-1.0, 1.0, 3).unwrap(),
            AxisRange::new(0.0, 1.0, 2).unwrap(),
            AxisRange::new(-0.5, 0.5, 2).unwrap(),
            2.0,
            1e-6,
        )
        .unwrap();
        let nodes = grid.points(&prec);
        let fd = fd_node_residuals(&field, &nodes, &p, 0.3, grid.dt, &prec).unwrap();
        for (pt, row) in nodes.iter().zip(&fd) {
            let exact = field.analytic_residuals(pt, &p.nu, &p.rho, &p.accel);
            for k in 0..4 {
                let d = Float::with_val(b, &row[k].0 - &exact[k]).abs().to_f64();
                assert!(d < 1e-12, "equation {k}: {d:e}");
            }
        }
    }

    #[test]
    fn heat_kernel_is_second_order() {
        let prec = PrecisionConfig::new(30).unwrap();
        let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let r: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|&d| heat_kernel_residual(1.0, &xs, 1.0, d, 1e-10, &prec).0).collect();
        let q1 = (r[0] / r[1]).log2();
        let q2 = (r[1] / r[2]).log2();
        assert!((q1 - 2.0).abs() < 0.1 && (q2 - 2.0).abs() < 0.1, "{q1} {q2}");
    }
}
