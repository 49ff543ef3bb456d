//! The full residual suite behind `ssns verify`.

use std::collections::BTreeSet;

use serde_json::json;

use super::audit::{
    audit_fushchich, audit_reduction, continuity_check, g_ode_check, h_consistency_check, quadrature_check,
};
use super::convergence::AdjudicationPolicy;
use super::kummer_checks as kc;
use super::pde_checks::{adjudication, constant_solution, heat_selftest, refinement, stencil_exactness, variant_checks};
use super::report::{CheckResult, Family, ReportMeta, ResidualReport};
use crate::error::{Error, Result};
use crate::fields::GridSpec;
use crate::precision::{PrecisionConfig, Real};
use crate::reduction::{complete_profiles, uniform_grid, FlowParams, ForceSign, GInit, ProfileSet, Variant};

/// Every check id the suite can emit, with its family.
pub fn check_catalogue() -> Vec<(String, Family)> {
    let mut out: Vec<(String, Family)> = [
        "kummer_values",
        "kummer_ode",
        "precision_sentinel",
        "gamma_reflection",
        "deriv_eq21",
        "deriv_eq22",
        "whittaker_identity",
    ]
    .iter()
    .map(|s| (s.to_string(), Family::Kummer))
    .collect();
    for id in ["reduced_ode_printed", "reduced_ode_derived", "elimination_coefficients"] {
        out.push((id.into(), Family::Reduction));
    }
    out.push(("profile_continuity".into(), Family::Profile));
    out.push(("g_quadrature".into(), Family::Profile));
    for v in Variant::ALL {
        out.push((format!("g_ode_{v}"), Family::Profile));
        for s in [ForceSign::Plus, ForceSign::Minus] {
            out.push((format!("h_consistency_{v}_{}", s.as_str()), Family::Profile));
        }
    }
    for id in ["fd_heat_selftest", "fd_stencil_exactness", "constant_solution"] {
        out.push((id.into(), Family::Pde));
    }
    for v in Variant::ALL {
        for e in ["continuity", "momentum_x", "momentum_y", "momentum_z"] {
            out.push((format!("{e}_{v}"), Family::Pde));
        }
        out.push((format!("adjudication_{v}"), Family::Pde));
    }
    out.push(("adjudication".into(), Family::Pde));
    for id in ["fushchich_line1", "fushchich_line2", "fushchich_line3", "fushchich_line4", "fushchich_line4_f"] {
        out.push((id.into(), Family::Fushchich));
    }
    out
}

/// Which checks to run: the union of whole families and single ids. Empty
/// means everything.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckFilter {
    pub families: BTreeSet<Family>,
    pub ids: BTreeSet<String>,
}

impl CheckFilter {
    /// Comma-separated family names and check ids.
    pub fn parse(spec: &str) -> Result<Self> {
        let known: Vec<(String, Family)> = check_catalogue();
        let mut f = CheckFilter::default();
        for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if let Ok(fam) = tok.parse::<Family>() {
                f.families.insert(fam);
            } else if known.iter().any(|(id, _)| id == tok) {
                f.ids.insert(tok.to_string());
            } else {
                return Err(Error::Parse(format!("unknown check or family '{tok}'")));
            }
        }
        Ok(f)
    }

    pub fn is_all(&self) -> bool {
        self.families.is_empty() && self.ids.is_empty()
    }

    pub fn selects(&self, id: &str, family: Family) -> bool {
        self.is_all() || self.families.contains(&family) || self.ids.contains(id)
    }

    fn wants_family(&self, family: Family) -> bool {
        self.is_all() || self.families.contains(&family) || check_catalogue().iter().any(|(id, f)| *f == family && self.ids.contains(id))
    }

    fn wants_any(&self, ids: &[&str]) -> bool {
        self.is_all() || ids.iter().any(|id| self.ids.contains(*id))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub precision: PrecisionConfig,
    /// Profile grid `(min, max, count)`.
    pub omega_grid: (f64, f64, usize),
    /// `None`: the symmetric branch `g(0) = c/3, g'(0) = 0`.
    pub init: Option<GInit>,
    pub fd_box: GridSpec,
    pub deltas: Vec<f64>,
    pub reduction_grid: (f64, f64, usize),
    pub policy: AdjudicationPolicy,
    pub filter: CheckFilter,
}

impl SuiteOptions {
    pub fn new(precision: PrecisionConfig) -> Result<Self> {
        let fd_box = GridSpec::cube(0.25, 5, 1.0, &precision)?;
        Ok(SuiteOptions {
            precision,
            omega_grid: (-8.0, 8.0, 801),
            init: None,
            fd_box,
            deltas: vec![0.2, 0.1, 0.05],
            reduction_grid: (-5.0, 5.0, 201),
            policy: AdjudicationPolicy::default(),
            filter: CheckFilter::default(),
        })
    }
}

fn fushchich_grid(c: f64) -> Vec<f64> {
    (0..25).map(|i| 2.0 * c / 3.0 + 0.25 + 0.125 * i as f64).collect()
}

fn grid(range: (f64, f64, usize), prec: &PrecisionConfig) -> Result<Vec<Real>> {
    uniform_grid(&prec.real(range.0), &prec.real(range.1), range.2, prec)
}

fn wrap(id: &str, family: Family, gating: bool, r: Result<CheckResult>) -> CheckResult {
    r.unwrap_or_else(|e| CheckResult::errored(id, family, gating, &e))
}

/// Run the selected checks. A check that errors is recorded as failed (or
/// inconclusive when not gating); it never stops the others.
pub fn run_suite(p: &FlowParams, opts: &SuiteOptions) -> Result<ResidualReport> {
    p.validate()?;
    opts.fd_box.validate()?;
    let prec = &opts.precision;
    let filter = &opts.filter;
    let mut checks: Vec<CheckResult> = Vec::new();

    if filter.wants_family(Family::Kummer) {
        let kummer: [(&str, bool, fn(&PrecisionConfig) -> Result<CheckResult>); 7] = [
            ("kummer_values", true, kc::kummer_values),
            ("kummer_ode", true, kc::kummer_ode),
            ("precision_sentinel", true, kc::precision_sentinel),
            ("gamma_reflection", true, kc::gamma_reflection),
            ("deriv_eq21", true, kc::deriv_eq21),
            ("deriv_eq22", false, kc::deriv_eq22),
            ("whittaker_identity", true, kc::whittaker_identity),
        ];
        for (id, gating, f) in kummer {
            if filter.selects(id, Family::Kummer) {
                checks.push(wrap(id, Family::Kummer, gating, f(prec)));
            }
        }
    }

    if filter.wants_family(Family::Reduction) {
        match grid(opts.reduction_grid, prec) {
            Ok(g) => checks.extend(audit_reduction(p, &g, prec)),
            Err(e) => checks.push(CheckResult::errored("reduced_ode_printed", Family::Reduction, true, &e)),
        }
    }

    let omega = grid(opts.omega_grid, prec)?;
    let init = opts.init.clone().unwrap_or_else(|| GInit::symmetric(p, prec));
    let needs_profiles = filter.wants_family(Family::Profile) || filter.wants_family(Family::Pde);
    let mut sets: Vec<(Variant, Result<ProfileSet>)> = Vec::new();
    if needs_profiles {
        for v in Variant::ALL {
            sets.push((v, complete_profiles(p, v, &init, &omega, prec)));
        }
    }
    let built: Vec<&ProfileSet> = sets.iter().filter_map(|(_, r)| r.as_ref().ok()).collect();

    if filter.wants_family(Family::Profile) {
        for (v, r) in &sets {
            if let Err(e) = r {
                checks.push(CheckResult::errored(format!("g_ode_{v}"), Family::Profile, true, e));
            }
        }
        if filter.selects("profile_continuity", Family::Profile) && !built.is_empty() {
            checks.push(continuity_check(&built, prec));
        }
        if filter.selects("g_quadrature", Family::Profile) && !built.is_empty() {
            checks.push(quadrature_check(&built, prec));
        }
        for ps in &built {
            let id = format!("g_ode_{}", ps.variant);
            if filter.selects(&id, Family::Profile) {
                checks.push(g_ode_check(ps));
            }
            for s in [ForceSign::Plus, ForceSign::Minus] {
                let id = format!("h_consistency_{}_{}", ps.variant, s.as_str());
                if filter.selects(&id, Family::Profile) {
                    checks.push(h_consistency_check(ps, s, prec));
                }
            }
        }
    }

    if filter.wants_family(Family::Pde) {
        let sel = |id: &str| filter.selects(id, Family::Pde);
        if sel("fd_heat_selftest") {
            checks.push(heat_selftest(&opts.deltas, prec));
        }
        if sel("fd_stencil_exactness") {
            checks.push(stencil_exactness(p, &opts.fd_box, &opts.deltas, prec));
        }
        if sel("constant_solution") {
            checks.push(constant_solution(p, &omega, &opts.fd_box, &opts.deltas, prec));
        }
        let variant_ids: Vec<String> = Variant::ALL
            .iter()
            .flat_map(|v| {
                ["continuity", "momentum_x", "momentum_y", "momentum_z", "adjudication"]
                    .iter()
                    .map(move |e| format!("{e}_{v}"))
            })
            .chain(std::iter::once("adjudication".to_string()))
            .collect();
        let id_refs: Vec<&str> = variant_ids.iter().map(String::as_str).collect();
        if filter.families.contains(&Family::Pde) || filter.wants_any(&id_refs) {
            let mut classes = Vec::new();
            for (v, r) in &sets {
                let res = r.as_ref().map_err(Clone::clone).and_then(|ps| refinement(ps, p, &opts.fd_box, &opts.deltas, prec));
                match res {
                    Ok(rs) => {
                        let (list, class) = variant_checks(*v, &rs, &opts.deltas, &opts.policy);
                        classes.push((*v, class));
                        checks.extend(list.into_iter().filter(|c| sel(&c.id)));
                    }
                    Err(e) => {
                        if sel(&format!("adjudication_{v}")) {
                            checks.push(CheckResult::errored(format!("adjudication_{v}"), Family::Pde, false, &e));
                        }
                    }
                }
            }
            if sel("adjudication") {
                checks.push(adjudication(&classes, p.accel.is_zero()));
            }
        }
    }

    if filter.wants_family(Family::Fushchich) {
        let c = p.mass_rate.to_f64();
        let l0 = p.l0.to_f64();
        checks.extend(
            audit_fushchich(c, l0, &fushchich_grid(c), prec)
                .into_iter()
                .filter(|r| filter.selects(&r.id, Family::Fushchich)),
        );
    }
    // Family-level passes may compute more than was asked for.
    checks.retain(|c| filter.selects(&c.id, c.family));

    let grid_json = json!({
        "omega": { "min": opts.omega_grid.0, "max": opts.omega_grid.1, "count": opts.omega_grid.2 },
        "reduction_omega": { "min": opts.reduction_grid.0, "max": opts.reduction_grid.1, "count": opts.reduction_grid.2 },
        "fd_box": opts.fd_box.to_json(),
        "deltas": opts.deltas,
        "init": {
            "omega0": init.omega0.to_f64(),
            "g0": crate::precision::format_sci(&init.g0, prec.digits),
            "g0_prime": crate::precision::format_sci(&init.g0_prime, prec.digits),
        },
    });
    let mut assumptions = vec![
        "h = c - f - g".to_string(),
        "Printed l' from quadrature of rho Phi[f]; Derived l'/rho = c/6 + a/3".to_string(),
        "the reference solution uses nu = 1".to_string(),
        format!("adjudication floor {:e}", opts.policy.floor),
    ];
    if !p.accel.is_zero() {
        assumptions.push("a != 0: the field is not an exact solution for either variant".into());
    }
    Ok(ResidualReport {
        params: p.to_json(prec.digits),
        grid: grid_json,
        checks,
        meta: ReportMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            precision_digits: prec.digits,
            assumptions,
        },
    })
}
