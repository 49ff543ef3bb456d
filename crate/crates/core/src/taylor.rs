//! Adaptive Taylor-series integrator for the linear profile system.
//!
//! The unknowns are the `f` profile (either carried by its reduced ODE or
//! re-anchored at every step from an exact evaluator), a second profile `y`
//! obeying
//!
//! ```text
//! -3ν y'' + (c - ω/2) y' - y/2 + Φ(ω) + shift = 0,
//! Φ = 3ν f'' + (ω/2 - c) f' + f/2,
//! ```
//!
//! and the pressure `l` with `l' = ρ Φ`. All coefficients are polynomial in
//! `ω`, so Taylor coefficients follow from three-term recurrences; the step
//! length is chosen from the size of the trailing coefficients.

use rug::Float;

use crate::error::{Error, Result};
use crate::precision::Real;
use crate::reduction::ReducedOde;

/// Exact `(f, f')` at `ω`, taken from the branch on `side` (±1) at a kink.
pub(crate) type Anchor<'a> = dyn Fn(&Real, i8) -> Result<(Real, Real)> + Sync + 'a;

pub(crate) struct TaylorSystem<'a> {
    pub nu: Real,
    pub c: Real,
    pub rho: Real,
    pub f_ode: ReducedOde,
    pub forcing_shift: Real,
    pub anchor: Option<&'a Anchor<'a>>,
    pub bits: u32,
    pub order: usize,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct State {
    pub f: Real,
    pub f1: Real,
    pub y: Real,
    pub y1: Real,
    pub l: Real,
}

/// Dense output at one target abscissa.
#[derive(Debug, Clone)]
pub(crate) struct DenseRow {
    pub f: Real,
    pub f1: Real,
    pub f2: Real,
    pub y: Real,
    pub y1: Real,
    pub y2: Real,
    pub l: Real,
    pub l1: Real,
    pub l2: Real,
}

struct Expansion {
    f: Vec<Real>,
    y: Vec<Real>,
    l: Vec<Real>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct IntegrationStats {
    pub steps: usize,
    /// Largest mismatch between a carried `f` and its exact anchor, relative.
    pub max_anchor_jump: f64,
}

impl<'a> TaylorSystem<'a> {
    fn real(&self, x: f64) -> Real {
        Float::with_val(self.bits, x)
    }

    fn expand(&self, center: &Real, st: &State) -> Expansion {
        let n = self.order;
        let b = self.bits;
        let ode = &self.f_ode;
        let mut f = vec![Float::new(b); n + 3];
        f[0].assign_round(&st.f);
        f[1].assign_round(&st.f1);
        let slope = Float::with_val(b, &ode.k1_omega * center) + &ode.k1_const;
        for k in 0..=n {
            // k2 (k+2)(k+1) F_{k+2} = -[(k1ω ω_c + k1c)(k+1) F_{k+1} + (k1ω k + k0) F_k + kin δ_k0]
            let mut rhs = Float::with_val(b, &slope * &f[k + 1]) * (k as u32 + 1);
            let c0 = Float::with_val(b, &ode.k1_omega * k as u32) + &ode.k0;
            rhs += c0 * &f[k];
            if k == 0 {
                rhs += &ode.k_inhom;
            }
            let den = Float::with_val(b, &ode.k2 * ((k as u32 + 2) * (k as u32 + 1)));
            f[k + 2] = -rhs / den;
        }

        let three_nu = Float::with_val(b, &self.nu * 3u32);
        let half_center = Float::with_val(b, center / 2u32);
        let drift = Float::with_val(b, &half_center - &self.c); // ω_c/2 - c
        let mut phi = vec![Float::new(b); n + 1];
        for k in 0..=n {
            let kk = k as u32;
            let mut v = Float::with_val(b, &three_nu * &f[k + 2]) * ((kk + 2) * (kk + 1));
            v += Float::with_val(b, &drift * &f[k + 1]) * (kk + 1);
            v += Float::with_val(b, &f[k] * (kk + 1)) / 2u32;
            phi[k] = v;
        }

        let mut y = vec![Float::new(b); n + 1];
        y[0].assign_round(&st.y);
        y[1].assign_round(&st.y1);
        for k in 0..n - 1 {
            let kk = k as u32;
            // 3ν (k+2)(k+1) Y_{k+2} = (c - ω_c/2)(k+1) Y_{k+1} - (k+1)/2 Y_k + Φ_k + shift δ_k0
            let mut rhs = -Float::with_val(b, &drift * &y[k + 1]) * (kk + 1);
            rhs -= Float::with_val(b, &y[k] * (kk + 1)) / 2u32;
            rhs += &phi[k];
            if k == 0 {
                rhs += &self.forcing_shift;
            }
            y[k + 2] = rhs / Float::with_val(b, &three_nu * ((kk + 2) * (kk + 1)));
        }

        let mut l = vec![Float::new(b); n + 1];
        l[0].assign_round(&st.l);
        for k in 0..n {
            l[k + 1] = Float::with_val(b, &self.rho * &phi[k]) / (k as u32 + 1);
        }

        Expansion { f: f[..=n].to_vec(), y, l }
    }

    /// Largest admissible |step| from the trailing coefficients.
    fn step_bound(&self, e: &Expansion) -> f64 {
        let n = self.order;
        let mut h = f64::INFINITY;
        for coeffs in [&e.f, &e.y, &e.l] {
            let scale = coeffs[0].to_f64().abs().max(1.0);
            for k in [n - 1, n] {
                let ck = coeffs[k].to_f64().abs();
                if ck > 0.0 && ck.is_finite() {
                    h = h.min(0.5 * (self.tol * scale / ck).powf(1.0 / k as f64));
                }
            }
        }
        h
    }

    fn eval(&self, e: &Expansion, tau: &Real) -> DenseRow {
        let (f, f1, f2) = horner3(&e.f, tau, self.bits);
        let (y, y1, y2) = horner3(&e.y, tau, self.bits);
        let (l, l1, l2) = horner3(&e.l, tau, self.bits);
        DenseRow { f, f1, f2, y, y1, y2, l, l1, l2 }
    }

    /// Integrate from `omega0` in both directions, returning dense output at
    /// each of the sorted `targets`. Steps never cross a breakpoint.
    pub fn integrate(
        &self,
        omega0: &Real,
        state0: &State,
        targets: &[Real],
        breakpoints: &[Real],
    ) -> Result<(Vec<DenseRow>, IntegrationStats)> {
        let mut out: Vec<Option<DenseRow>> = vec![None; targets.len()];
        let mut stats = IntegrationStats::default();
        let split = targets.partition_point(|t| t < omega0);
        // Forward covers [omega0, max], backward covers [min, omega0).
        let fwd: Vec<usize> = (split..targets.len()).collect();
        let bwd: Vec<usize> = (0..split).rev().collect();
        for (dir, idx) in [(1i8, fwd), (-1i8, bwd)] {
            if idx.is_empty() {
                continue;
            }
            let end = targets[*idx.last().unwrap()].clone();
            self.sweep(dir, omega0, state0, &end, targets, &idx, breakpoints, &mut out, &mut stats)?;
        }
        Ok((out.into_iter().map(|r| r.expect("every target visited")).collect(), stats))
    }

    #[allow(clippy::too_many_arguments)]
    fn sweep(
        &self,
        dir: i8,
        omega0: &Real,
        state0: &State,
        end: &Real,
        targets: &[Real],
        idx: &[usize],
        breakpoints: &[Real],
        out: &mut [Option<DenseRow>],
        stats: &mut IntegrationStats,
    ) -> Result<()> {
        let b = self.bits;
        let mut omega = Float::with_val(b, omega0);
        let mut state = state0.clone();
        let mut next = 0usize;
        let span = Float::with_val(b, end - omega0).abs().to_f64().max(1e-300);
        let max_steps = 1_000_000usize;

        while next < idx.len() {
            if stats.steps > max_steps {
                return Err(Error::IntegratorFailure { omega: omega.to_f64(), reason: "step limit exceeded".into() });
            }
            let e = self.anchored_expansion(&omega, &mut state, dir, stats)?;
            // Targets at the step origin take the branch the step is entering.
            while next < idx.len() && targets[idx[next]] == omega {
                out[idx[next]] = Some(self.eval(&e, &self.real(0.0)));
                next += 1;
            }
            if next >= idx.len() {
                break;
            }
            let hmax = self.step_bound(&e);
            if !(hmax > span * 1e-14) {
                return Err(Error::IntegratorFailure {
                    omega: omega.to_f64(),
                    reason: format!("step size underflow (h = {hmax:e})"),
                });
            }
            // Step target: omega + dir*hmax, clipped to the range end and breakpoints.
            let mut stop = Float::with_val(b, &omega + hmax * dir as f64);
            if (dir > 0 && stop >= *end) || (dir < 0 && stop <= *end) {
                stop = end.clone();
            }
            let mut at_breakpoint = false;
            for bp in breakpoints {
                let ahead = if dir > 0 { *bp > omega && *bp <= stop } else { *bp < omega && *bp >= stop };
                if ahead {
                    stop = bp.clone();
                    at_breakpoint = true;
                }
            }

            // A target on a breakpoint is served from its right-hand side.
            while next < idx.len() {
                let t = &targets[idx[next]];
                let inside = if dir > 0 {
                    *t < stop || (*t == stop && !at_breakpoint)
                } else {
                    *t >= stop
                };
                if !inside {
                    break;
                }
                let tau = Float::with_val(b, t - &omega);
                out[idx[next]] = Some(self.eval(&e, &tau));
                next += 1;
            }

            let tau = Float::with_val(b, &stop - &omega);
            let row = self.eval(&e, &tau);
            state = State { f: row.f, f1: row.f1, y: row.y, y1: row.y1, l: row.l };
            omega = stop;
            stats.steps += 1;
        }
        if next < idx.len() {
            return Err(Error::IntegratorFailure { omega: omega.to_f64(), reason: "targets left unvisited".into() });
        }
        Ok(())
    }

    fn anchored_expansion(&self, omega: &Real, state: &mut State, dir: i8, stats: &mut IntegrationStats) -> Result<Expansion> {
        if let Some(anchor) = self.anchor {
            let (f, f1) = anchor(omega, dir)?;
            if stats.steps > 0 {
                let scale = f.to_f64().abs().max(1.0);
                let jump = Float::with_val(self.bits, &f - &state.f).abs().to_f64() / scale;
                if jump.is_finite() {
                    stats.max_anchor_jump = stats.max_anchor_jump.max(jump);
                }
            }
            state.f = f;
            state.f1 = f1;
        }
        Ok(self.expand(omega, state))
    }
}

trait AssignRound {
    fn assign_round(&mut self, x: &Real);
}

impl AssignRound for Float {
    fn assign_round(&mut self, x: &Real) {
        use rug::Assign;
        self.assign(x);
    }
}

/// Value, first and second derivative of `Σ c_k τ^k`.
fn horner3(c: &[Real], tau: &Real, bits: u32) -> (Real, Real, Real) {
    let n = c.len() - 1;
    let mut p = Float::with_val(bits, &c[n]);
    let mut d1 = Float::with_val(bits, 0);
    let mut d2 = Float::with_val(bits, 0);
    for k in (0..n).rev() {
        d2 = Float::with_val(bits, &d2 * tau) + Float::with_val(bits, &d1 * 2u32);
        d1 = Float::with_val(bits, &d1 * tau) + &p;
        p = Float::with_val(bits, &p * tau) + &c[k];
    }
    (p, d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_derivatives() {
        // 1 + 2τ + 3τ² + 4τ³ at τ = 0.5
        let c: Vec<Real> = [1.0, 2.0, 3.0, 4.0].iter().map(|v| Float::with_val(100, *v)).collect();
        let (p, d1, d2) = horner3(&c, &Float::with_val(100, 0.5), 100);
        assert_eq!(p, 1.0 + 1.0 + 0.75 + 0.5);
        assert_eq!(d1, 2.0 + 3.0 + 3.0);
        assert_eq!(d2, 6.0 + 12.0);
    }
}
