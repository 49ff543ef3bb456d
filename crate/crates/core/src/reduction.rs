//! Reduced profile ODEs and the profile solver.
//!
//! Substituting `u = f(ω)/√t`, `v = g(ω)/√t`, `w = h(ω)/√t`, `p = l(ω)/t`
//! with `ω = (x+y+z)/√t` into the Navier-Stokes system gives the continuity
//! integral `f + g + h = c` and three momentum lines of the form
//!
//! ```text
//! -q/2 - ω q'/2 + c q' = 3ν q'' - l'/ρ (+ a for q = h).
//! ```
//!
//! The `f` line reduces to a single linear ODE, `k2 f'' + (k1ω ω + k1c) f' +
//! k0 f + kin = 0`, in two variants:
//!
//! * [`Variant::Printed`]: `(9ν, -3, -3c, 3/2, a - c/2)`, whose solutions are
//!   Kummer functions of `(ω+c)²/(6ν)` ([`f_closed`]).
//! * [`Variant::Derived`]: the coefficients obtained by eliminating the
//!   pressure gradient from the three momentum lines
//!   ([`eliminate_pressure_oracle`]).

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::chebyshev::ChebPanel;
use crate::error::{Error, Result};
use crate::kummer::{kummer_m_deriv_n, kummer_u_deriv_n, KummerArgs};
use crate::precision::{format_sci, PrecisionConfig, Real};
use crate::taylor::{DenseRow, State, TaylorSystem};

/// Physical and integration constants of a self-similar flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowParams {
    /// Kinematic viscosity ν.
    pub nu: Real,
    /// External force `a` acting on the z-momentum line.
    pub accel: Real,
    /// Density ρ.
    pub rho: Real,
    /// Continuity constant `c` in `f + g + h = c`.
    pub mass_rate: Real,
    /// Weight of the Kummer `U` kernel.
    pub c1: Real,
    /// Weight of the Kummer `M` kernel.
    pub c2: Real,
    /// Pressure gauge, `l(0)`.
    pub l0: Real,
}

impl FlowParams {
    pub fn new(nu: Real, accel: Real, rho: Real, mass_rate: Real, c1: Real, c2: Real, l0: Real) -> Result<Self> {
        let p = FlowParams { nu, accel, rho, mass_rate, c1, c2, l0 };
        p.validate()?;
        Ok(p)
    }

    /// The parameter set used for the KummerM/KummerU profile plots and the
    /// implicit surface: `c1 = 1, c2 = 0, a = 0, c = 1, ν = 0.1`, `ρ = 1`, `l0 = 0`.
    pub fn figure_defaults(prec: &PrecisionConfig) -> Self {
        FlowParams {
            nu: prec.ratio(1, 10),
            accel: prec.real(0.0),
            rho: prec.real(1.0),
            mass_rate: prec.real(1.0),
            c1: prec.real(1.0),
            c2: prec.real(0.0),
            l0: prec.real(0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0) {
            return Err(Error::InvalidParameter(format!("viscosity must be positive, got {}", self.nu.to_f64())));
        }
        if !(self.rho > 0) {
            return Err(Error::InvalidParameter(format!("density must be positive, got {}", self.rho.to_f64())));
        }
        for (name, v) in self.named() {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn named(&self) -> [(&'static str, &Real); 7] {
        [
            ("nu", &self.nu),
            ("accel", &self.accel),
            ("rho", &self.rho),
            ("mass_rate", &self.mass_rate),
            ("c1", &self.c1),
            ("c2", &self.c2),
            ("l0", &self.l0),
        ]
    }

    /// Constant tail of the closed form, `c/3 - 2a/3`.
    pub fn constant_tail(&self, bits: u32) -> Real {
        (Float::with_val(bits, &self.mass_rate) - Float::with_val(bits, &self.accel * 2u32)) / 3u32
    }

    /// Decimal-string rendering for reports.
    pub fn to_json(&self, digits: u32) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (name, v) in self.named() {
            map.insert(name.to_string(), serde_json::Value::String(format_sci(v, digits)));
        }
        serde_json::Value::Object(map)
    }
}

/// Which reduced ODE generates the `f` profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Printed,
    Derived,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Printed, Variant::Derived];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Printed => "printed",
            Variant::Derived => "derived",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "printed" => Ok(Variant::Printed),
            "derived" => Ok(Variant::Derived),
            other => Err(Error::Parse(format!("unknown variant '{other}' (expected printed or derived)"))),
        }
    }
}

/// `k2 f'' + (k1_omega ω + k1_const) f' + k0 f + k_inhom = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOde {
    pub k2: Real,
    pub k1_omega: Real,
    pub k1_const: Real,
    pub k0: Real,
    pub k_inhom: Real,
}

impl ReducedOde {
    /// `9ν f'' - 3(ω + c) f' + (3/2) f - c/2 + a = 0`.
    pub fn printed(p: &FlowParams, prec: &PrecisionConfig) -> Self {
        let b = prec.work_bits();
        let c = Float::with_val(b, &p.mass_rate);
        ReducedOde {
            k2: Float::with_val(b, &p.nu * 9u32),
            k1_omega: prec.real(-3.0),
            k1_const: Float::with_val(b, &c * -3i32),
            k0: prec.ratio(3, 2),
            k_inhom: Float::with_val(b, &p.accel - Float::with_val(b, &c / 2u32)),
        }
    }

    pub fn derived(p: &FlowParams, prec: &PrecisionConfig) -> Self {
        eliminate_pressure_oracle(p, prec).1
    }

    pub fn for_variant(v: Variant, p: &FlowParams, prec: &PrecisionConfig) -> Self {
        match v {
            Variant::Printed => Self::printed(p, prec),
            Variant::Derived => Self::derived(p, prec),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k2.is_zero() {
            return Err(Error::InvalidParameter("leading coefficient k2 must be nonzero".into()));
        }
        Ok(())
    }

    /// The four terms of the residual, in order `f''`, `f'`, `f`, constant.
    pub fn terms(&self, f: &Real, f1: &Real, f2: &Real, omega: &Real) -> [Real; 4] {
        let b = f.prec().max(self.k2.prec());
        let slope = Float::with_val(b, &self.k1_omega * omega) + &self.k1_const;
        [
            Float::with_val(b, &self.k2 * f2),
            slope * f1,
            Float::with_val(b, &self.k0 * f),
            Float::with_val(b, &self.k_inhom),
        ]
    }

    /// max(|k2 f''|, |(k1ω ω + k1c) f'|, |k0 f|).
    pub fn residual_scale(&self, f: &Real, f1: &Real, f2: &Real, omega: &Real) -> f64 {
        let t = self.terms(f, f1, f2, omega);
        t[..3].iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }
}

/// `k2 f'' + (k1_omega ω + k1_const) f' + k0 f + k_inhom`.
pub fn reduced_ode_residual(ode: &ReducedOde, f: &Real, f1: &Real, f2: &Real, omega: &Real) -> Real {
    let [a, b, c, d] = ode.terms(f, f1, f2, omega);
    a + b + c + d
}

/// Eliminate the pressure gradient from the three momentum lines.
///
/// With `S = f + g + h = c` (so `S' = S'' = 0`), each line reads
/// `3ν q'' + (ω/2 - c) q' + q/2 = l'/ρ` (minus `a` on the right for `q = h`).
/// Summing the three lines gives `c/2 = 3 l'/ρ - a`, hence the constant
///
/// ```text
/// l'/ρ = c/6 + a/3.
/// ```
///
/// Putting it back into the `f` line and multiplying by 3:
///
/// ```text
/// 9ν f'' + (3ω/2 - 3c) f' + (3/2) f - c/2 - a = 0.
/// ```
///
/// Returns `(l'/ρ, derived ODE)`.
pub fn eliminate_pressure_oracle(p: &FlowParams, prec: &PrecisionConfig) -> (Real, ReducedOde) {
    let b = prec.work_bits();
    let c = Float::with_val(b, &p.mass_rate);
    let a = Float::with_val(b, &p.accel);
    let grad = Float::with_val(b, &c / 6u32) + Float::with_val(b, &a / 3u32);
    let ode = ReducedOde {
        k2: Float::with_val(b, &p.nu * 9u32),
        k1_omega: prec.ratio(3, 2),
        k1_const: Float::with_val(b, &c * -3i32),
        k0: prec.ratio(3, 2),
        k_inhom: -(Float::with_val(b, &c / 2u32) + a),
    };
    (grad, ode)
}

/// `f`, `f'`, `f''` at one abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePoint {
    pub f: Real,
    pub f1: Real,
    pub f2: Real,
}

const KUMMER_A: (i64, i64) = (-1, 4);
const KUMMER_B: (i64, i64) = (1, 2);

/// `s = ω + c` and `z = s²/(6ν)`; at `s = 0` the argument is moved to
/// `z = 10^(-2P)` on the branch `side` (±1).
fn kernel_argument(omega: &Real, p: &FlowParams, side: i8, prec: &PrecisionConfig, b: u32) -> (Real, Real) {
    let mut s = Float::with_val(b, omega + &p.mass_rate);
    if s.is_zero() {
        // s = ±sqrt(6ν)·10^(-P)  ⇒  z = 10^(-2P)
        let tiny = Pow::pow(Float::with_val(b, 10u32), -(prec.digits as i32));
        s = Float::with_val(b, &p.nu * 6u32).sqrt() * tiny;
        if side < 0 {
            s = -s;
        }
    }
    let z = Float::with_val(b, s.square_ref()) / Float::with_val(b, &p.nu * 6u32);
    (s, z)
}

/// Kernel `K(z) = c1 U(-1/4,1/2,z) + c2 M(-1/4,1/2,z)` and its z-derivatives
/// up to `order`.
fn kernel_derivs(z: &Real, p: &FlowParams, order: u32, prec: &PrecisionConfig) -> Result<Vec<Real>> {
    let inner = prec.with_extra_guard(5);
    let b = inner.work_bits();
    let args = KummerArgs::rational(KUMMER_A.0, KUMMER_A.1, KUMMER_B.0, KUMMER_B.1, z.clone(), &inner);
    let mut out = Vec::with_capacity(order as usize + 1);
    for n in 0..=order {
        let mut k = Float::with_val(b, 0);
        if !p.c1.is_zero() {
            k += Float::with_val(b, &p.c1 * kummer_u_deriv_n(&args, n, &inner)?);
        }
        if !p.c2.is_zero() {
            k += Float::with_val(b, &p.c2 * kummer_m_deriv_n(&args, n, &inner)?);
        }
        out.push(k);
    }
    Ok(out)
}

/// Closed-form profile
/// `f(ω) = c1 U(-1/4, 1/2, (ω+c)²/(6ν)) + c2 M(-1/4, 1/2, (ω+c)²/(6ν)) + c/3 - 2a/3`.
pub fn f_closed(omega: &Real, p: &FlowParams, prec: &PrecisionConfig) -> Result<Real> {
    let (_, z) = kernel_argument(omega, p, 1, prec, prec.work_bits());
    let k = kernel_derivs(&z, p, 0, prec)?;
    let b = prec.work_bits();
    Ok(prec.round(&(Float::with_val(b, &k[0]) + p.constant_tail(b))))
}

/// `f`, `f'`, `f''` of the closed form via the Kummer differentiation
/// identities and the chain rule through `z(ω)`.
pub fn f_closed_derivs(omega: &Real, p: &FlowParams, prec: &PrecisionConfig) -> Result<ProfilePoint> {
    f_closed_branch(omega, p, 1, 2, prec)
}

/// Closed form on the branch `side` of the kink at `ω = -c`, with `order`
/// derivatives (1 or 2). Values are carried at working precision.
pub(crate) fn f_closed_branch(omega: &Real, p: &FlowParams, side: i8, order: u32, prec: &PrecisionConfig) -> Result<ProfilePoint> {
    // At the kink f'' is a difference of two terms of size z^(-1/2) = 10^P.
    let at_kink = Float::with_val(prec.work_bits(), omega + &p.mass_rate).is_zero();
    let wide;
    let kp = if at_kink && order >= 2 {
        wide = PrecisionConfig { digits: 2 * prec.digits + 10, ..prec.with_extra_guard(prec.digits + 10) };
        &wide
    } else {
        prec
    };
    let b = kp.work_bits();
    let (s, z) = kernel_argument(omega, p, side, prec, b);
    let k = kernel_derivs(&z, p, order, kp)?;
    let three_nu = Float::with_val(b, &p.nu * 3u32);
    let dz = Float::with_val(b, &s / &three_nu);
    let d2z = Float::with_val(b, 1u32) / &three_nu;
    let f = Float::with_val(b, &k[0]) + p.constant_tail(b);
    let f1 = Float::with_val(b, &k[1] * &dz);
    let f2 = if order >= 2 {
        Float::with_val(b, &k[2] * Float::with_val(b, dz.square_ref())) + Float::with_val(b, &k[1] * &d2z)
    } else {
        Float::with_val(b, 0)
    };
    let wb = prec.work_bits();
    Ok(ProfilePoint { f: Float::with_val(wb, f), f1: Float::with_val(wb, f1), f2: Float::with_val(wb, f2) })
}

/// `Φ[q] = 3ν q'' + (ω/2 - c) q' + q/2`, the operator shared by the three
/// momentum lines once `f + g + h = c` is used.
pub fn momentum_operator(q: &Real, q1: &Real, q2: &Real, omega: &Real, p: &FlowParams) -> Real {
    let b = q.prec().max(p.nu.prec());
    let drift = Float::with_val(b, omega / 2u32) - &p.mass_rate;
    Float::with_val(b, &p.nu * 3u32) * q2 + drift * q1 + Float::with_val(b, q / 2u32)
}

/// Initial data for the `g` profile.
#[derive(Debug, Clone, PartialEq)]
pub struct GInit {
    pub omega0: Real,
    pub g0: Real,
    pub g0_prime: Real,
}

impl GInit {
    /// `g(0) = c/3`, `g'(0) = 0`: the symmetric branch.
    pub fn symmetric(p: &FlowParams, prec: &PrecisionConfig) -> Self {
        GInit {
            omega0: prec.real(0.0),
            g0: Float::with_val(prec.work_bits(), &p.mass_rate / 3u32),
            g0_prime: prec.real(0.0),
        }
    }
}

/// Local error tolerance of the profile integrator, `10^-min(P-5, 25)`.
pub fn integrator_tolerance(prec: &PrecisionConfig) -> f64 {
    10f64.powi(-((prec.digits as i32 - 5).min(25)))
}

fn integrator_order(tol: f64) -> usize {
    ((-tol.log10()) * 1.2).ceil() as usize + 10
}

/// Uniform grid `min, ..., max` with `count` points.
pub fn uniform_grid(min: &Real, max: &Real, count: usize, prec: &PrecisionConfig) -> Result<Vec<Real>> {
    if count < 2 || !(*min < *max) {
        return Err(Error::InvalidParameter(format!(
            "grid needs min < max and at least 2 points, got [{}, {}] x {count}",
            min.to_f64(),
            max.to_f64()
        )));
    }
    let b = prec.work_bits();
    let span = Float::with_val(b, max - min);
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                Float::with_val(b, max)
            } else {
                Float::with_val(b, &span * i as u32) / (count as u32 - 1) + min
            }
        })
        .collect())
}

fn check_grid(grid: &[Real]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidParameter("omega grid needs at least 2 points".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("omega grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Output of [`solve_g_profile`]: dense values of `f` (as seen by the
/// integrator), `g`, and the pressure quadrature on the grid.
#[derive(Debug, Clone)]
pub struct GProfile {
    pub omega_grid: Vec<Real>,
    pub f: Vec<Real>,
    pub f1: Vec<Real>,
    pub f2: Vec<Real>,
    pub g: Vec<Real>,
    pub g1: Vec<Real>,
    pub g2: Vec<Real>,
    /// `∫_{ω0}^{ω} ρ Φ[f]`, the pressure up to its gauge.
    pub l_raw: Vec<Real>,
    pub l1: Vec<Real>,
    pub l2: Vec<Real>,
    pub steps: usize,
    pub tolerance: f64,
}

struct IvpOutput {
    rows: Vec<DenseRow>,
    steps: usize,
}

/// Run the Taylor integrator for a `y` profile obeying
/// `-3ν y'' + (c - ω/2) y' - y/2 + Φ[f] + shift = 0`.
fn integrate_profile(
    p: &FlowParams,
    variant: Variant,
    omega0: &Real,
    y0: &Real,
    y0_prime: &Real,
    shift: &Real,
    targets: &[Real],
    prec: &PrecisionConfig,
) -> Result<IvpOutput> {
    let b = prec.work_bits();
    let tol = integrator_tolerance(prec);
    let kink = Float::with_val(b, -&p.mass_rate);
    let anchor_fn = |w: &Real, side: i8| -> Result<(Real, Real)> {
        let pt = f_closed_branch(w, p, side, 1, prec)?;
        Ok((pt.f, pt.f1))
    };
    let f_start = f_closed_branch(omega0, p, 1, 1, prec)?;
    let (anchor, breakpoints): (Option<&crate::taylor::Anchor>, Vec<Real>) = match variant {
        Variant::Printed => (Some(&anchor_fn), vec![kink]),
        Variant::Derived => (None, vec![]),
    };
    let sys = TaylorSystem {
        nu: Float::with_val(b, &p.nu),
        c: Float::with_val(b, &p.mass_rate),
        rho: Float::with_val(b, &p.rho),
        f_ode: ReducedOde::for_variant(variant, p, prec),
        forcing_shift: Float::with_val(b, shift),
        anchor,
        bits: b,
        order: integrator_order(tol),
        tol,
    };
    let state0 = State {
        f: f_start.f,
        f1: f_start.f1,
        y: Float::with_val(b, y0),
        y1: Float::with_val(b, y0_prime),
        l: Float::with_val(b, 0),
    };
    let (rows, stats) = sys.integrate(omega0, &state0, targets, &breakpoints)?;
    Ok(IvpOutput { rows, steps: stats.steps })
}

/// Integrate the `g` momentum-difference ODE
/// `-3ν g'' + (c - ω/2) g' - g/2 + Φ[f] = 0` from `(g0, g0')` at `omega0`.
///
/// Under [`Variant::Printed`] `f` is the closed form, re-anchored at every
/// step; under [`Variant::Derived`] `f` is integrated from the derived ODE
/// starting at the closed-form value and slope at `omega0`.
pub fn solve_g_profile(
    p: &FlowParams,
    variant: Variant,
    init: &GInit,
    omega_grid: &[Real],
    prec: &PrecisionConfig,
) -> Result<GProfile> {
    p.validate()?;
    check_grid(omega_grid)?;
    let zero = prec.real(0.0);
    let out = integrate_profile(p, variant, &init.omega0, &init.g0, &init.g0_prime, &zero, omega_grid, prec)?;
    let mut gp = GProfile {
        omega_grid: omega_grid.to_vec(),
        f: Vec::new(),
        f1: Vec::new(),
        f2: Vec::new(),
        g: Vec::new(),
        g1: Vec::new(),
        g2: Vec::new(),
        l_raw: Vec::new(),
        l1: Vec::new(),
        l2: Vec::new(),
        steps: out.steps,
        tolerance: integrator_tolerance(prec),
    };
    for r in out.rows {
        gp.f.push(r.f);
        gp.f1.push(r.f1);
        gp.f2.push(r.f2);
        gp.g.push(r.y);
        gp.g1.push(r.y1);
        gp.g2.push(r.y2);
        gp.l_raw.push(r.l);
        gp.l1.push(r.l1);
        gp.l2.push(r.l2);
    }
    Ok(gp)
}

/// Sign convention for the force term in the `f - h` momentum difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ForceSign {
    Plus,
    Minus,
}

impl ForceSign {
    pub fn as_str(&self) -> &'static str {
        match self {
            ForceSign::Plus => "plus",
            ForceSign::Minus => "minus",
        }
    }
}

/// `h` obtained by integrating its own momentum-difference ODE
/// `-3ν h'' + (c - ω/2) h' - h/2 + Φ[f] ± a = 0` from the data implied by
/// `h = c - f - g` at `init.omega0`.
pub fn solve_h_by_difference(
    p: &FlowParams,
    variant: Variant,
    init: &GInit,
    sign: ForceSign,
    omega_grid: &[Real],
    prec: &PrecisionConfig,
) -> Result<Vec<Real>> {
    p.validate()?;
    check_grid(omega_grid)?;
    let b = prec.work_bits();
    let f0 = f_closed_branch(&init.omega0, p, 1, 1, prec)?;
    let h0 = Float::with_val(b, &p.mass_rate - &f0.f) - &init.g0;
    let h0p = -(Float::with_val(b, &f0.f1 + &init.g0_prime));
    let shift = match sign {
        ForceSign::Plus => Float::with_val(b, &p.accel),
        ForceSign::Minus => -Float::with_val(b, &p.accel),
    };
    let out = integrate_profile(p, variant, &init.omega0, &h0, &h0p, &shift, omega_grid, prec)?;
    Ok(out.rows.into_iter().map(|r| r.y).collect())
}

/// Complete set of tabulated profiles.
#[derive(Debug, Clone)]
pub struct ProfileSet {
    pub omega_grid: Vec<Real>,
    pub f: Vec<Real>,
    pub g: Vec<Real>,
    pub h: Vec<Real>,
    pub l: Vec<Real>,
    pub f1: Vec<Real>,
    pub g1: Vec<Real>,
    pub h1: Vec<Real>,
    pub l1: Vec<Real>,
    pub f2: Vec<Real>,
    pub g2: Vec<Real>,
    pub h2: Vec<Real>,
    pub l2: Vec<Real>,
    pub params: FlowParams,
    pub variant: Variant,
    pub init: GInit,
    pub precision: PrecisionConfig,
    /// Local error tolerance the `g` integrator ran at.
    pub tolerance: f64,
    pub steps: usize,
}

impl ProfileSet {
    pub fn len(&self) -> usize {
        self.omega_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_grid.is_empty()
    }

    pub fn hull(&self) -> (&Real, &Real) {
        (&self.omega_grid[0], &self.omega_grid[self.omega_grid.len() - 1])
    }
}

/// Build `f, g, h, l` and their derivatives on `omega_grid`.
///
/// `f` comes from the closed form (Printed) or the derived ODE (Derived), `g`
/// from [`solve_g_profile`], `h = c - f - g`, and `l` from the pressure
/// gradient of the `f` line (Printed: `l' = ρ Φ[f]` by quadrature; Derived:
/// the constant `l'/ρ = c/6 + a/3`), with `l(0) = l0`.
pub fn complete_profiles(
    p: &FlowParams,
    variant: Variant,
    init: &GInit,
    omega_grid: &[Real],
    prec: &PrecisionConfig,
) -> Result<ProfileSet> {
    p.validate()?;
    check_grid(omega_grid)?;
    let b = prec.work_bits();

    // Integrate on the grid plus ω = 0 for the pressure gauge.
    let zero = prec.real(0.0);
    let mut targets = omega_grid.to_vec();
    let gauge_idx = match targets.binary_search_by(|w| w.partial_cmp(&zero).expect("finite grid")) {
        Ok(i) => i,
        Err(i) => {
            targets.insert(i, zero.clone());
            i
        }
    };
    let gp = solve_g_profile(p, variant, init, &targets, prec)?;
    let keep: Vec<usize> = (0..targets.len())
        .filter(|&i| omega_grid.len() == targets.len() || i != gauge_idx)
        .collect();

    let c = Float::with_val(b, &p.mass_rate);
    let (f, f1, f2) = match variant {
        Variant::Printed => {
            let pts = omega_grid
                .iter()
                .map(|w| f_closed_derivs(w, p, prec))
                .collect::<Result<Vec<_>>>()?;
            let mut f = Vec::with_capacity(pts.len());
            let mut f1 = Vec::with_capacity(pts.len());
            let mut f2 = Vec::with_capacity(pts.len());
            for pt in pts {
                f.push(pt.f);
                f1.push(pt.f1);
                f2.push(pt.f2);
            }
            (f, f1, f2)
        }
        Variant::Derived => (
            keep.iter().map(|&i| gp.f[i].clone()).collect::<Vec<_>>(),
            keep.iter().map(|&i| gp.f1[i].clone()).collect::<Vec<_>>(),
            keep.iter().map(|&i| gp.f2[i].clone()).collect::<Vec<_>>(),
        ),
    };
    let pick = |v: &Vec<Real>| keep.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
    let g = pick(&gp.g);
    let g1 = pick(&gp.g1);
    let g2 = pick(&gp.g2);

    let h: Vec<Real> = f.iter().zip(&g).map(|(fv, gv)| Float::with_val(b, &c - fv) - gv).collect();
    let h1: Vec<Real> = f1.iter().zip(&g1).map(|(a, bb)| -Float::with_val(b, a + bb)).collect();
    let h2: Vec<Real> = f2.iter().zip(&g2).map(|(a, bb)| -Float::with_val(b, a + bb)).collect();

    let (l, l1, l2) = match variant {
        Variant::Printed => {
            let shift = Float::with_val(b, &p.l0 - &gp.l_raw[gauge_idx]);
            let l: Vec<Real> = pick(&gp.l_raw).into_iter().map(|v| v + &shift).collect();
            let l1: Vec<Real> = omega_grid
                .iter()
                .zip(f.iter().zip(f1.iter().zip(&f2)))
                .map(|(w, (fv, (f1v, f2v)))| Float::with_val(b, &p.rho * momentum_operator(fv, f1v, f2v, w, p)))
                .collect();
            let l2 = pick(&gp.l2);
            (l, l1, l2)
        }
        Variant::Derived => {
            let (grad, _) = eliminate_pressure_oracle(p, prec);
            let slope = Float::with_val(b, &p.rho * &grad);
            let l = omega_grid.iter().map(|w| Float::with_val(b, &slope * w) + &p.l0).collect();
            let l1 = omega_grid.iter().map(|_| slope.clone()).collect();
            let l2 = omega_grid.iter().map(|_| Float::with_val(b, 0)).collect();
            (l, l1, l2)
        }
    };

    Ok(ProfileSet {
        omega_grid: omega_grid.to_vec(),
        f,
        g,
        h,
        l,
        f1,
        g1,
        h1,
        l1,
        f2,
        g2,
        h2,
        l2,
        params: p.clone(),
        variant,
        init: init.clone(),
        precision: prec.clone(),
        tolerance: gp.tolerance,
        steps: gp.steps,
    })
}

/// Residual of the `g` ODE, `-3ν g'' + (c - ω/2) g' - g/2 + Φ[f]`, at each
/// node, relative to the largest term at the node.
pub fn g_ode_residuals(ps: &ProfileSet) -> Vec<f64> {
    let p = &ps.params;
    ps.omega_grid
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let b = w.prec().max(ps.g[i].prec());
            let phi = momentum_operator(&ps.f[i], &ps.f1[i], &ps.f2[i], w, p);
            let t1 = Float::with_val(b, &p.nu * -3i32) * &ps.g2[i];
            let t2 = (Float::with_val(b, &p.mass_rate) - Float::with_val(b, w / 2u32)) * &ps.g1[i];
            let t3 = Float::with_val(b, &ps.g[i] / -2i32);
            let scale = [&t1, &t2, &t3, &phi].iter().map(|v| v.to_f64().abs()).fold(1.0, f64::max);
            let r = t1 + t2 + t3 + &phi;
            r.to_f64().abs() / scale
        })
        .collect()
}

/// `g` at `points` from the nested quadrature
///
/// ```text
/// g(ω) = E(ω) [ C2 + ∫_{ω0}^{ω} (I(s) - K) / (3ν E(s)) ds ],
/// I(s) = ∫_{ω0}^{s} Φ[f],   E(ω) = exp((cω - ω²/4) / (3ν)),
/// ```
///
/// with `C2 = g0 / E(ω0)` and `K = -3ν g0' + (c - ω0/2) g0`. An independent
/// cross-check of [`solve_g_profile`]; runs in double precision with
/// Chebyshev panels no wider than `panel_width`.
pub fn g_by_quadrature(
    p: &FlowParams,
    variant: Variant,
    init: &GInit,
    points: &[Real],
    prec: &PrecisionConfig,
) -> Result<Vec<f64>> {
    const PANEL_NODES: usize = 28;
    let panel_width = 0.125;
    let nu = p.nu.to_f64();
    let c = p.mass_rate.to_f64();
    let w0 = init.omega0.to_f64();
    let g0 = init.g0.to_f64();
    let g0p = init.g0_prime.to_f64();
    let three_nu = 3.0 * nu;
    let phi_exp = |w: f64| (c * w - 0.25 * w * w) / three_nu;
    let k_const = -three_nu * g0p + (c - 0.5 * w0) * g0;
    let c2 = g0 * (-phi_exp(w0)).exp();

    // Φ[f] as a function of ω.
    let (grad, _) = eliminate_pressure_oracle(p, prec);
    let grad = grad.to_f64();
    let forcing = |w: f64| -> Result<f64> {
        match variant {
            Variant::Derived => Ok(grad),
            Variant::Printed => {
                let wr = prec.real(w);
                let pt = f_closed_branch(&wr, p, 1, 2, prec)?;
                Ok(momentum_operator(&pt.f, &pt.f1, &pt.f2, &wr, p).to_f64())
            }
        }
    };

    let mut out = Vec::with_capacity(points.len());
    for target in points {
        let target = target.to_f64();
        let dir = if target >= w0 { 1.0 } else { -1.0 };
        // Panel boundaries from ω0 to target, split at the kink of f.
        let mut cuts = vec![w0];
        let kink = -c;
        if variant == Variant::Printed && (kink - w0) * dir > 0.0 && (target - kink) * dir > 0.0 {
            cuts.push(kink);
        }
        cuts.push(target);
        let mut bounds = vec![w0];
        for seg in cuts.windows(2) {
            let n = ((seg[1] - seg[0]).abs() / panel_width).ceil().max(1.0) as usize;
            for k in 1..=n {
                bounds.push(seg[0] + (seg[1] - seg[0]) * k as f64 / n as f64);
            }
        }
        let mut inner = 0.0; // I at panel start
        let mut outer = 0.0; // ∫ (I - K)/(3ν E) at panel start
        for pw in bounds.windows(2) {
            let (lo, hi) = (pw[0].min(pw[1]), pw[0].max(pw[1]));
            let nodes = ChebPanel::nodes(lo, hi, PANEL_NODES);
            // Interior Chebyshev nodes never land on the kink itself.
            let samples = nodes.iter().map(|&w| forcing(w)).collect::<Result<Vec<f64>>>()?;
            let fpanel = ChebPanel::from_samples(lo, hi, &samples);
            // I(s) = inner + ∫_{pw[0]}^{s} Φ
            let i_at = |s: f64| -> f64 {
                if dir > 0.0 {
                    inner + fpanel.integral_to(s)
                } else {
                    inner - (fpanel.integral_to(hi) - fpanel.integral_to(s))
                }
            };
            let outer_samples: Vec<f64> = nodes
                .iter()
                .map(|&s| (i_at(s) - k_const) * (-phi_exp(s)).exp() / three_nu)
                .collect();
            let opanel = ChebPanel::from_samples(lo, hi, &outer_samples);
            let seg_outer = opanel.integral_to(hi);
            let seg_inner = fpanel.integral_to(hi);
            if dir > 0.0 {
                outer += seg_outer;
                inner += seg_inner;
            } else {
                outer -= seg_outer;
                inner -= seg_inner;
            }
        }
        out.push(phi_exp(target).exp() * (c2 + outer));
    }
    Ok(out)
}
