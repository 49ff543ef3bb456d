mod common;

use common::{rel, series_m};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::Float;
use ssns_core::fields::{evaluate_field, profile_values, SpaceTimePoint};
use ssns_core::precision::{format_sci, parse_real, PrecisionConfig};
use ssns_core::reduction::{
    complete_profiles, f_closed_derivs, reduced_ode_residual, solve_g_profile, uniform_grid, FlowParams, GInit,
    ReducedOde, Variant,
};
use ssns_core::verify::convergence::convergence_order;
use ssns_core::verify::fd::heat_kernel_residual;
use ssns_core::verify::suite::{run_suite, CheckFilter, SuiteOptions};
use ssns_core::{kummer_m, kummer_m_deriv_n, kummer_u, kummer_u_deriv_n, pochhammer, KummerArgs, Real};

fn p40() -> PrecisionConfig {
    PrecisionConfig::new(40).unwrap()
}

fn dec(prec: &PrecisionConfig, x: f64) -> Real {
    prec.parse(&format!("{x:.6}")).unwrap()
}

fn params(prec: &PrecisionConfig, nu: f64, a: f64, c: f64, c1: f64, c2: f64) -> FlowParams {
    FlowParams::new(dec(prec, nu), dec(prec, a), prec.real(1.0), dec(prec, c), dec(prec, c1), dec(prec, c2), prec.real(0.0)).unwrap()
}

fn off_integer(b: f64) -> bool {
    (b - b.round()).abs() > 1e-3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kummer_ode_holds(a in -2.0f64..2.0, b in 0.1f64..3.0, lz in -3.0f64..1.69) {
        prop_assume!(off_integer(b));
        let prec = p40();
        let z = 10f64.powf(lz);
        let args = KummerArgs::new(dec(&prec, a), dec(&prec, b), dec(&prec, z));
        let bits = prec.work_bits();
        for which in 0..2 {
            let d = |n| if which == 0 { kummer_m_deriv_n(&args, n, &prec) } else { kummer_u_deriv_n(&args, n, &prec) };
            let (f0, f1, f2) = (d(0).unwrap(), d(1).unwrap(), d(2).unwrap());
            let bz = Float::with_val(bits, &args.b - &args.z);
            let r = Float::with_val(bits, &args.z * &f2) + bz * &f1 - Float::with_val(bits, &args.a * &f0);
            let scale = f0.to_f64().abs().max(1.0);
            prop_assert!(r.to_f64().abs() <= 1e-32 * scale, "residual {} at a={a} b={b} z={z}", r.to_f64());
        }
    }

    #[test]
    fn m_matches_plain_series(a in -3.0f64..3.0, b in 0.2f64..4.0, z in -20.0f64..30.0) {
        prop_assume!(off_integer(b));
        let prec = p40();
        let args = KummerArgs::new(dec(&prec, a), dec(&prec, b), dec(&prec, z));
        let m = kummer_m(&args, &prec).unwrap();
        let want = series_m(&Float::with_val(400, &args.a), &Float::with_val(400, &args.b), &Float::with_val(400, &args.z));
        prop_assume!(want.to_f64().abs() > 1e-20);
        prop_assert!(rel(&Float::with_val(400, &m), &want) <= 1e-37);
    }

    #[test]
    fn kummer_transformation(a in -2.0f64..2.0, b in 0.2f64..3.0, z in 0.0f64..15.0) {
        prop_assume!(off_integer(b));
        let prec = p40();
        let bits = prec.work_bits();
        let (ar, br, zr) = (dec(&prec, a), dec(&prec, b), dec(&prec, z));
        let lhs = kummer_m(&KummerArgs::new(ar.clone(), br.clone(), zr.clone()), &prec).unwrap();
        let bma = Float::with_val(bits, &br - &ar);
        let rhs = kummer_m(&KummerArgs::new(bma, br, Float::with_val(bits, -&zr)), &prec).unwrap() * zr.exp();
        prop_assume!(lhs.to_f64().abs() > 1e-12);
        prop_assert!(ssns_core::precision::rel_diff(&lhs, &rhs) <= 1e-36);
    }

    #[test]
    fn pochhammer_recurrence(a in -5.0f64..5.0, n in 0u32..30) {
        let prec = p40();
        let ar = dec(&prec, a);
        let next = pochhammer(&ar, n + 1);
        let step = Float::with_val(prec.work_bits(), pochhammer(&ar, n) * Float::with_val(prec.work_bits(), &ar + n));
        prop_assert_eq!(next, step);
    }

    #[test]
    fn precision_monotonicity(z in 0.1f64..60.0) {
        let lo = PrecisionConfig::new(30).unwrap();
        let hi = p40();
        let u30 = kummer_u(&KummerArgs::rational(-1, 4, 1, 2, dec(&lo, z), &lo), &lo).unwrap();
        let u40 = kummer_u(&KummerArgs::rational(-1, 4, 1, 2, dec(&hi, z), &hi), &hi).unwrap();
        prop_assert!(ssns_core::precision::rel_diff(&u30, &u40) <= 1e-28);
    }

    #[test]
    fn sci_format_round_trips(m in -1.0f64..1.0, e in -300i32..300) {
        let prec = p40();
        let x = Float::with_val(prec.work_bits(), m) * Float::with_val(prec.work_bits(), 10u32).pow(e);
        let s = format_sci(&x, prec.digits);
        let back = parse_real(&s, prec.work_bits()).unwrap();
        prop_assert_eq!(format_sci(&back, prec.digits), s);
    }

    #[test]
    fn convergence_order_recovers_power(cst in 1e-6f64..1e3, order in 0.5f64..4.0) {
        let d = [0.4, 0.2, 0.1, 0.05];
        let norms: Vec<f64> = d.iter().map(|h: &f64| cst * h.powf(order)).collect();
        prop_assert!((convergence_order(&norms, &d).unwrap() - order).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn printed_ode_holds_for_closed_form(c in -2.0f64..2.0, a in -2.0f64..2.0, nu in 0.01f64..1.0, c1 in -1.0f64..1.0, c2 in -1.0f64..1.0) {
        let prec = p40();
        let p = params(&prec, nu, a, c, c1, c2);
        let ode = ReducedOde::printed(&p, &prec);
        for k in 0..21 {
            let w = dec(&prec, -5.0 + 0.5 * k as f64 + 0.013);
            let pt = f_closed_derivs(&w, &p, &prec).unwrap();
            let r = reduced_ode_residual(&ode, &pt.f, &pt.f1, &pt.f2, &w).to_f64().abs();
            let s = ode.residual_scale(&pt.f, &pt.f1, &pt.f2, &w).max(1e-300);
            prop_assert!(r / s <= 1e-32, "normalised residual {} at w = {}", r / s, w.to_f64());
        }
    }

    #[test]
    fn g_is_affine_in_initial_data(g0a in -1.0f64..1.0, g1a in -1.0f64..1.0, g0b in -1.0f64..1.0, g1b in -1.0f64..1.0, t in 0.1f64..0.9) {
        let prec = p40();
        let p = FlowParams::figure_defaults(&prec);
        let grid = uniform_grid(&prec.real(-2.0), &prec.real(2.0), 21, &prec).unwrap();
        let init = |g0: f64, g1: f64| GInit { omega0: prec.real(0.0), g0: dec(&prec, g0), g0_prime: dec(&prec, g1) };
        let tr = dec(&prec, t);
        let b = prec.work_bits();
        let one_minus = Float::with_val(b, 1u32 - tr.clone());
        let a = solve_g_profile(&p, Variant::Derived, &init(g0a, g1a), &grid, &prec).unwrap();
        let bb = solve_g_profile(&p, Variant::Derived, &init(g0b, g1b), &grid, &prec).unwrap();
        let mix = |x: &Real, y: &Real| Float::with_val(b, &tr * x) + Float::with_val(b, &one_minus * y);
        let im = GInit { omega0: prec.real(0.0), g0: mix(&init(g0a, g1a).g0, &init(g0b, g1b).g0), g0_prime: mix(&init(g0a, g1a).g0_prime, &init(g0b, g1b).g0_prime) };
        let m = solve_g_profile(&p, Variant::Derived, &im, &grid, &prec).unwrap();
        for i in 0..grid.len() {
            let d = Float::with_val(b, &m.g[i] - mix(&a.g[i], &bb.g[i])).abs().to_f64();
            prop_assert!(d <= 1e-20 * (1.0 + m.g[i].to_f64().abs()));
        }
    }

    #[test]
    fn profile_continuity_holds(c in 0.2f64..2.0, nu in 0.05f64..1.0, c1 in -1.0f64..1.0, c2 in -0.2f64..0.2) {
        let prec = p40();
        let p = params(&prec, nu, 0.0, c, c1, c2);
        let grid = uniform_grid(&prec.real(-2.0), &prec.real(2.0), 41, &prec).unwrap();
        for v in Variant::ALL {
            let ps = complete_profiles(&p, v, &GInit::symmetric(&p, &prec), &grid, &prec).unwrap();
            let b = prec.work_bits();
            for i in 0..ps.len() {
                let s = Float::with_val(b, &ps.f[i] + &ps.g[i]) + &ps.h[i] - &p.mass_rate;
                prop_assert!(s.to_f64().abs() <= 10.0 * prec.epsilon());
                let d = Float::with_val(b, &ps.f1[i] + &ps.g1[i]) + &ps.h1[i];
                prop_assert!(d.to_f64().abs() <= 50.0 * ps.tolerance);
            }
        }
    }

    #[test]
    fn similarity_collapse(x in -0.5f64..0.5, y in -0.5f64..0.5, z in -0.5f64..0.5, lambda in 0.1f64..10.0) {
        let prec = p40();
        let p = FlowParams::figure_defaults(&prec);
        let grid = uniform_grid(&prec.real(-3.0), &prec.real(3.0), 121, &prec).unwrap();
        let ps = complete_profiles(&p, Variant::Derived, &GInit::symmetric(&p, &prec), &grid, &prec).unwrap();
        let b = prec.work_bits();
        let l = dec(&prec, lambda);
        let base = SpaceTimePoint::from_f64(x, y, z, 1.0, &prec);
        let scaled = SpaceTimePoint::new(
            Float::with_val(b, &base.x * &l),
            Float::with_val(b, &base.y * &l),
            Float::with_val(b, &base.z * &l),
            Float::with_val(b, l.square_ref()),
        );
        let s0 = evaluate_field(&base, &ps, &prec).unwrap();
        let s1 = evaluate_field(&scaled, &ps, &prec).unwrap();
        let lu = |v: &Real| Float::with_val(b, v * &l);
        prop_assert!(ssns_core::precision::rel_diff(&lu(&s1.u), &s0.u) <= 1e-35);
        prop_assert!(ssns_core::precision::rel_diff(&lu(&s1.w), &s0.w) <= 1e-35);
        let pp = Float::with_val(b, &s1.p * Float::with_val(b, l.square_ref()));
        prop_assert!(Float::with_val(b, &pp - &s0.p).abs().to_f64() <= 1e-35 * (1.0 + s0.p.to_f64().abs()));
    }
}

#[test]
fn constant_profile_is_a_fixed_point_of_the_printed_ode() {
    let prec = p40();
    for a in [-1.0, 0.0, 0.7] {
        let p = params(&prec, 0.1, a, 1.0, 0.0, 0.0);
        let ode = ReducedOde::printed(&p, &prec);
        for w in [-3.0, 0.5, 4.0] {
            let wr = prec.real(w);
            let pt = f_closed_derivs(&wr, &p, &prec).unwrap();
            assert_eq!(reduced_ode_residual(&ode, &pt.f, &pt.f1, &pt.f2, &wr), 0);
        }
    }
}

#[test]
fn interpolation_returns_tabulated_nodes() {
    let prec = p40();
    let p = FlowParams::figure_defaults(&prec);
    let grid = uniform_grid(&prec.real(-2.0), &prec.real(2.0), 41, &prec).unwrap();
    for v in Variant::ALL {
        let ps = complete_profiles(&p, v, &GInit::symmetric(&p, &prec), &grid, &prec).unwrap();
        for i in (0..41).step_by(5) {
            let pv = profile_values(&ps, &ps.omega_grid[i], &prec).unwrap();
            assert_eq!(pv.g, ps.g[i]);
            assert_eq!(pv.l, ps.l[i]);
        }
    }
}

#[test]
fn halving_both_steps_quarters_the_heat_residual() {
    let prec = p40();
    let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
    let sups: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|&d| heat_kernel_residual(1.0, &xs, 1.0, d, d, &prec).0).collect();
    for w in sups.windows(2) {
        let r = w[0] / w[1];
        assert!((3.2..=4.8).contains(&r), "ratio {r}");
    }
}

#[test]
fn report_is_deterministic_apart_from_timestamp() {
    let prec = PrecisionConfig::new(30).unwrap();
    let p = FlowParams::figure_defaults(&prec);
    let mut opts = SuiteOptions::new(prec).unwrap();
    opts.filter = CheckFilter::parse("kummer,fushchich").unwrap();
    let strip = |mut v: serde_json::Value| {
        v["meta"]["timestamp"] = serde_json::Value::Null;
        serde_json::to_string(&v).unwrap()
    };
    let a = strip(run_suite(&p, &opts).unwrap().to_json());
    let b = strip(run_suite(&p, &opts).unwrap().to_json());
    assert_eq!(a, b);
}
