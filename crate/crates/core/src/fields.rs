//! Space-time velocity and pressure fields assembled from the profiles.
//!
//! With `ω = (x+y+z)/√t`:
//!
//! ```text
//! u = f(ω)/√t,  v = g(ω)/√t,  w = h(ω)/√t,  p = l(ω)/t.
//! ```

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::interp::{hull_error, interpolate_many, Column};
use crate::precision::{PrecisionConfig, Real};
use crate::reduction::{f_closed, ProfileSet, Variant};

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimePoint {
    pub x: Real,
    pub y: Real,
    pub z: Real,
    pub t: Real,
}

impl SpaceTimePoint {
    pub fn new(x: Real, y: Real, z: Real, t: Real) -> Self {
        SpaceTimePoint { x, y, z, t }
    }

    pub fn from_f64(x: f64, y: f64, z: f64, t: f64, prec: &PrecisionConfig) -> Self {
        SpaceTimePoint { x: prec.real(x), y: prec.real(y), z: prec.real(z), t: prec.real(t) }
    }
}

/// `min, ..., max` with `count` uniformly spaced nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let r = AxisRange { min, max, count };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::InvalidParameter(format!("axis range needs min < max, got {}:{}", self.min, self.max)));
        }
        if self.count < 2 {
            return Err(Error::InvalidParameter(format!("axis range needs at least 2 points, got {}", self.count)));
        }
        Ok(())
    }

    pub fn nodes(&self, prec: &PrecisionConfig) -> Vec<Real> {
        let b = prec.work_bits();
        let lo = Float::with_val(b, self.min);
        let span = Float::with_val(b, self.max) - &lo;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    Float::with_val(b, self.max)
                } else {
                    Float::with_val(b, &span * i as u32) / (self.count as u32 - 1) + &lo
                }
            })
            .collect()
    }
}

/// Sampling box, time and temporal finite-difference step.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub x_range: AxisRange,
    pub y_range: AxisRange,
    pub z_range: AxisRange,
    pub t: f64,
    pub dt: f64,
}

impl GridSpec {
    pub fn new(x_range: AxisRange, y_range: AxisRange, z_range: AxisRange, t: f64, dt: f64) -> Result<Self> {
        let g = GridSpec { x_range, y_range, z_range, t, dt };
        g.validate()?;
        Ok(g)
    }

    /// Cube `[-half, half]³` with `count` nodes per axis.
    pub fn cube(half: f64, count: usize, t: f64, prec: &PrecisionConfig) -> Result<Self> {
        let r = AxisRange::new(-half, half, count)?;
        Self::new(r.clone(), r.clone(), r, t, Self::default_dt(prec))
    }

    /// `10^(-⌈P/3⌉)`.
    pub fn default_dt(prec: &PrecisionConfig) -> f64 {
        10f64.powi(-(prec.digits.div_ceil(3) as i32))
    }

    pub fn validate(&self) -> Result<()> {
        self.x_range.validate()?;
        self.y_range.validate()?;
        self.z_range.validate()?;
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::Domain(format!("time must be positive, got {}", self.t)));
        }
        if !(self.dt > 0.0 && self.t - self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("need 0 < dt < t, got dt = {} at t = {}", self.dt, self.t)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x_range.count * self.y_range.count * self.z_range.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All nodes at time `t`, x fastest, then y, then z.
    pub fn points(&self, prec: &PrecisionConfig) -> Vec<SpaceTimePoint> {
        let xs = self.x_range.nodes(prec);
        let ys = self.y_range.nodes(prec);
        let zs = self.z_range.nodes(prec);
        let t = prec.real(self.t);
        let mut out = Vec::with_capacity(self.len());
        for z in &zs {
            for y in &ys {
                for x in &xs {
                    out.push(SpaceTimePoint::new(x.clone(), y.clone(), z.clone(), t.clone()));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let axis = |r: &AxisRange| serde_json::json!({ "min": r.min, "max": r.max, "count": r.count });
        serde_json::json!({
            "x": axis(&self.x_range),
            "y": axis(&self.y_range),
            "z": axis(&self.z_range),
            "t": self.t,
            "dt": self.dt,
        })
    }
}

/// Velocity and pressure at one space-time point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub point: SpaceTimePoint,
    pub u: Real,
    pub v: Real,
    pub w: Real,
    pub p: Real,
}

/// `(x+y+z)/√t`.
pub fn similarity_coordinate(pt: &SpaceTimePoint) -> Result<Real> {
    if !(pt.t > 0) {
        return Err(Error::Domain(format!("time must be positive, got t = {}", pt.t.to_f64())));
    }
    let b = pt.x.prec().max(pt.t.prec());
    let s = Float::with_val(b, &pt.x + &pt.y) + &pt.z;
    Ok(s / Float::with_val(b, pt.t.sqrt_ref()))
}

/// Profile values `f, g, h, l` at `omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileValues {
    pub f: Real,
    pub g: Real,
    pub h: Real,
    pub l: Real,
}

/// `f` analytic (Printed) or interpolated (Derived); `g` and `l` interpolated;
/// `h = c - f - g`.
pub fn profile_values(ps: &ProfileSet, omega: &Real, prec: &PrecisionConfig) -> Result<ProfileValues> {
    let xs = &ps.omega_grid;
    let (lo, hi) = ps.hull();
    if *omega < *lo || *omega > *hi {
        return Err(hull_error(xs, omega));
    }
    let g_col = Column { y: &ps.g, d1: &ps.g1, d2: &ps.g2 };
    let l_col = Column { y: &ps.l, d1: &ps.l1, d2: &ps.l2 };
    let b = prec.work_bits();
    let (f, g, l) = match ps.variant {
        Variant::Printed => {
            let mut v = interpolate_many(xs, &[g_col, l_col], omega)?;
            let l = v.pop().expect("l");
            let g = v.pop().expect("g");
            (Float::with_val(b, f_closed(omega, &ps.params, prec)?), g, l)
        }
        Variant::Derived => {
            let f_col = Column { y: &ps.f, d1: &ps.f1, d2: &ps.f2 };
            let mut v = interpolate_many(xs, &[f_col, g_col, l_col], omega)?;
            let l = v.pop().expect("l");
            let g = v.pop().expect("g");
            (v.pop().expect("f"), g, l)
        }
    };
    let h = Float::with_val(b, &ps.params.mass_rate - &f) - &g;
    Ok(ProfileValues { f, g, h, l })
}

pub fn evaluate_field(pt: &SpaceTimePoint, ps: &ProfileSet, prec: &PrecisionConfig) -> Result<FieldSample> {
    let omega = similarity_coordinate(pt)?;
    let pv = profile_values(ps, &omega, prec)?;
    let b = prec.work_bits();
    let t = Float::with_val(b, &pt.t);
    let rt = Float::with_val(b, t.sqrt_ref());
    Ok(FieldSample {
        point: pt.clone(),
        u: pv.f / &rt,
        v: pv.g / &rt,
        w: pv.h / &rt,
        p: pv.l / &t,
    })
}

fn check_in_hull(pt: &SpaceTimePoint, ps: &ProfileSet) -> Result<()> {
    let omega = similarity_coordinate(pt)?;
    let (lo, hi) = ps.hull();
    if omega < *lo || omega > *hi {
        return Err(Error::OutOfHull { omega: omega.to_f64(), lo: lo.to_f64(), hi: hi.to_f64() });
    }
    Ok(())
}

/// Evaluate every node of `grid` at time `grid.t`, x fastest. Every node must
/// stay in the profile hull at `t - dt`, `t` and `t + dt`.
pub fn sample_grid(grid: &GridSpec, ps: &ProfileSet, prec: &PrecisionConfig) -> Result<Vec<FieldSample>> {
    grid.validate()?;
    let pts = grid.points(prec);
    for pt in &pts {
        for dt in [-grid.dt, 0.0, grid.dt] {
            let mut shifted = pt.clone();
            shifted.t += dt;
            check_in_hull(&shifted, ps)?;
        }
    }
    pts.par_iter().map(|pt| evaluate_field(pt, ps, prec)).collect()
}

/// Options of [`level_set_points`].
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetOptions {
    pub level: Real,
    /// Compare `u` itself (true) or `u` without the constant tail `(c/3 - 2a/3)/√t`.
    pub includes_tail: bool,
    /// Bracketing tolerance on `|u - level|`.
    pub tolerance: f64,
}

impl LevelSetOptions {
    pub fn new(level: Real, includes_tail: bool, prec: &PrecisionConfig) -> Self {
        LevelSetOptions { level, includes_tail, tolerance: Self::default_tolerance(prec) }
    }

    /// `10^-(P/2)`.
    pub fn default_tolerance(prec: &PrecisionConfig) -> f64 {
        10f64.powi(-(prec.digits as i32 / 2))
    }
}

/// `u - level` (or the tail-free part of `u` minus `level`).
pub fn level_function(pt: &SpaceTimePoint, ps: &ProfileSet, opts: &LevelSetOptions, prec: &PrecisionConfig) -> Result<Real> {
    let s = evaluate_field(pt, ps, prec)?;
    let b = prec.work_bits();
    let mut q = Float::with_val(b, &s.u - &opts.level);
    if !opts.includes_tail {
        let rt = Float::with_val(b, pt.t.sqrt_ref());
        q -= ps.params.constant_tail(b) / rt;
    }
    Ok(q)
}

/// Points of the box where `u(x, y, z, t) = level`: sign changes along each
/// `(y, z)` line of x nodes are refined by the Illinois method until
/// `|u - level| < tolerance`. Nodes already within tolerance are returned
/// as they are.
pub fn level_set_points(
    ps: &ProfileSet,
    t: f64,
    bbox: &GridSpec,
    opts: &LevelSetOptions,
    prec: &PrecisionConfig,
) -> Result<Vec<SpaceTimePoint>> {
    let xs = bbox.x_range.nodes(prec);
    let ys = bbox.y_range.nodes(prec);
    let zs = bbox.z_range.nodes(prec);
    let tt = prec.real(t);
    let mut lines = Vec::with_capacity(ys.len() * zs.len());
    for z in &zs {
        for y in &ys {
            lines.push((y.clone(), z.clone()));
        }
    }
    let per_line: Vec<Vec<SpaceTimePoint>> = lines
        .par_iter()
        .map(|(y, z)| {
            let at = |x: &Real| SpaceTimePoint::new(x.clone(), y.clone(), z.clone(), tt.clone());
            let q: Vec<Real> = xs.iter().map(|x| level_function(&at(x), ps, opts, prec)).collect::<Result<_>>()?;
            let mut out = Vec::new();
            for i in 0..xs.len() {
                if q[i].to_f64().abs() < opts.tolerance {
                    out.push(at(&xs[i]));
                    continue;
                }
                if i + 1 < xs.len()
                    && q[i + 1].to_f64().abs() >= opts.tolerance
                    && q[i].is_sign_negative() != q[i + 1].is_sign_negative()
                {
                    let x = illinois(&xs[i], &xs[i + 1], &q[i], &q[i + 1], opts.tolerance, prec, |x| {
                        level_function(&at(x), ps, opts, prec)
                    })?;
                    out.push(at(&x));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_line.into_iter().flatten().collect())
}

fn illinois(
    a: &Real,
    b: &Real,
    qa: &Real,
    qb: &Real,
    tol: f64,
    prec: &PrecisionConfig,
    f: impl Fn(&Real) -> Result<Real>,
) -> Result<Real> {
    let bits = prec.work_bits();
    let (mut a, mut b) = (Float::with_val(bits, a), Float::with_val(bits, b));
    let (mut fa, mut fb) = (Float::with_val(bits, qa), Float::with_val(bits, qb));
    let width_floor = Pow::pow(Float::with_val(bits, 10u32), -(prec.digits as i32));
    let mut side = 0i8;
    for _ in 0..400 {
        let dx = Float::with_val(bits, &b - &a);
        let df = Float::with_val(bits, &fb - &fa);
        let mut c = Float::with_val(bits, &b - Float::with_val(bits, &fb * &dx) / &df);
        if !(c > a && c < b) && !(c > b && c < a) {
            c = Float::with_val(bits, &a + &b) / 2u32;
        }
        let fc = f(&c)?;
        if fc.to_f64().abs() < tol || dx.abs() < width_floor {
            return Ok(c);
        }
        if fc.is_sign_negative() == fb.is_sign_negative() {
            b = c;
            fb = fc;
            if side == -1 {
                fa /= 2u32;
            }
            side = -1;
        } else {
            a = b;
            fa = fb;
            b = c;
            fb = fc;
            side = 1;
        }
    }
    Err(Error::NoConvergence { what: "level-set root refinement".into(), terms: 400 })
}
