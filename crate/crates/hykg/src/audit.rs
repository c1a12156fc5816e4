//! Cross-engine comparison and numerical identity checks.
//!
//! Every engine is attempted for every `n`; failures become flags in the row
//! instead of aborting the report. Magnitudes of disagreements are findings,
//! not assertions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{appendix_constants_with_abc, Abc, HylleraasParams};
use crate::nu::{self, FactorForm, NUSolution};
use crate::oracle::{oracle_state, OracleSettings, OracleState, RadialGrid};
use crate::pipeline::{
    energy_eq45, energy_implicit, energy_mechanical, format_flags, intermediates_with,
    mark_order_violations, Engine, Levels, ScanSettings,
};
use crate::wavefunction::{
    closed_form_radial, exponents_with, ode_residual, overlap, WaveVariant,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Residuals above this count as violated identities in the summary.
pub const IDENTITY_TOL: f64 = 1e-8;

/// Names of the identity-check columns, in report order.
pub const IDENTITY_COLUMNS: [&str; 6] = [
    "disc_residual",
    "tau_prime_sign",
    "eq42_vs_derivative",
    "eq44_vs_eq12",
    "eq20_vs_eq23",
    "delta_a9_vs_eq35",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub params: HylleraasParams,
    pub n_max: u32,
    pub grid: RadialGrid,
    pub scan: ScanSettings,
    pub oracle: OracleSettings,
}

impl AuditConfig {
    pub fn new(params: HylleraasParams, n_max: u32) -> Result<Self> {
        let grid = RadialGrid::for_params(&params)?;
        Ok(AuditConfig { params, n_max, grid, scan: ScanSettings::default(), oracle: OracleSettings::default() })
    }
}

/// Levels of every engine, indexed by `n`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EngineLevels {
    pub eq45: Vec<Levels>,
    pub implicit: Vec<Levels>,
    pub mechanical: Vec<Levels>,
    pub oracle: Vec<Levels>,
}

impl EngineLevels {
    fn get(&self, engine: Engine) -> &[Levels] {
        match engine {
            Engine::Eq45Verbatim => &self.eq45,
            Engine::ImplicitLambda => &self.implicit,
            Engine::MechanicalNU => &self.mechanical,
            Engine::Oracle => &self.oracle,
        }
    }

    fn energy(&self, engine: Engine, n: u32) -> Option<f64> {
        self.get(engine).get(n as usize).and_then(|l| l.first()).map(|l| l.energy)
    }

    fn flags(&self, engine: Engine, n: u32) -> String {
        let Some(levels) = self.get(engine).get(n as usize) else {
            return "NotRun".into();
        };
        let mut all = levels.flags.clone();
        if let Some(l) = levels.first() {
            all.extend(l.flags.iter().copied());
        }
        format_flags(&all)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDiff {
    pub a: Engine,
    pub b: Engine,
    /// `|E_a - E_b| / M`, null when either level is missing.
    pub diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub n: u32,
    pub energies: BTreeMap<Engine, Option<f64>>,
    pub engine_flags: BTreeMap<Engine, String>,
    pub diffs: Vec<PairDiff>,
    /// Lowest level of the first available engine (mechanical, oracle,
    /// implicit, explicit).
    pub reference_energy: f64,
    /// Engine that supplied `reference_energy`, or `WindowCentre`.
    pub reference_source: String,
    /// Energy at which the identity checks were evaluated: the reference
    /// energy, or the nearest scan energy where every printed radicand is
    /// real (flagged `IdentityEnergyShifted`).
    pub identity_energy: f64,
    pub disc_residual: Option<f64>,
    /// `true` when the mechanical `τ'` is negative.
    pub tau_prime_sign: Option<bool>,
    pub eq42_vs_derivative: Option<f64>,
    pub eq44_vs_eq12: Option<f64>,
    pub eq20_vs_eq23: Option<f64>,
    pub delta_a9_vs_eq35: Option<f64>,
    pub ode_residual_closedform: Option<f64>,
    /// ODE residual of each exponent reading and placement.
    pub ode_residual_variants: BTreeMap<String, Option<f64>>,
    pub overlap_closed_oracle: Option<f64>,
    pub k_printed: Option<f64>,
    pub k_mechanical: Vec<f64>,
    /// Closed-form `(D/2, F/2)` on `(s+a, s+c)`.
    pub closed_exponents: Option<[f64; 2]>,
    /// Mechanical `φ` exponents on `(s+a, s+c)`.
    pub mechanical_exponents: Option<[f64; 2]>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub version: String,
    pub config: AuditConfig,
    pub rows: Vec<AuditRow>,
    /// Rows in which each check exceeded its tolerance or was unavailable.
    pub summary: BTreeMap<String, usize>,
}

impl AuditReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Runs every engine and assembles the report.
pub fn run_audit(params: &HylleraasParams, n_max: u32) -> Result<AuditReport> {
    run_audit_config(&AuditConfig::new(*params, n_max)?)
}

pub fn run_audit_config(config: &AuditConfig) -> Result<AuditReport> {
    let levels = compute_levels(config)?;
    assemble(config, &levels)
}

/// Runs the four engines; only configuration errors escape.
pub fn compute_levels(config: &AuditConfig) -> Result<EngineLevels> {
    let p = &config.params;
    validate_config(config)?;
    let mut out = EngineLevels::default();
    for n in 0..=config.n_max {
        out.eq45.push(energy_eq45(p, n, &config.scan)?);
        out.implicit.push(energy_implicit(p, n, &config.scan)?);
        out.mechanical.push(energy_mechanical(p, n, &config.scan)?);
        out.oracle.push(oracle_levels(config, n)?);
    }
    for list in [&mut out.eq45, &mut out.implicit, &mut out.mechanical, &mut out.oracle] {
        mark_order_violations(list);
    }
    Ok(out)
}

fn validate_config(config: &AuditConfig) -> Result<()> {
    config.params.validate()?;
    if config.n_max > 10 {
        return Err(Error::InvalidParams(format!("n_max = {} exceeds 10", config.n_max)));
    }
    Ok(())
}

fn oracle_levels(config: &AuditConfig, n: u32) -> Result<Levels> {
    match oracle_state(&config.params, n, &config.grid, &config.oracle) {
        Ok(s) => Ok(Levels { levels: vec![s.level], flags: Default::default() }),
        Err(Error::NoRoot(_)) => {
            let mut l = Levels::default();
            l.flags.insert(crate::pipeline::LevelFlag::NoRoot);
            Ok(l)
        }
        Err(e @ (Error::InvalidGrid(_) | Error::DegenerateParams(_) | Error::InvalidParams(_))) => Err(e),
        Err(_) => {
            let mut l = Levels::default();
            l.flags.insert(crate::pipeline::LevelFlag::NoRoot);
            Ok(l)
        }
    }
}

/// Builds the report from precomputed (or injected) level lists.
pub fn assemble(config: &AuditConfig, levels: &EngineLevels) -> Result<AuditReport> {
    validate_config(config)?;
    let abc = config.params.validate()?;
    let rows = (0..=config.n_max)
        .map(|n| row(config, &abc, levels, n))
        .collect::<Vec<_>>();
    let summary = summarize(&rows);
    Ok(AuditReport { version: VERSION.to_string(), config: config.clone(), rows, summary })
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// The candidate used for identity checks: the selected branch when one
/// exists, else the candidate with the most negative `τ'`.
fn best_candidate(cands: &[NUSolution]) -> (NUSolution, bool) {
    match nu::select_branch(cands) {
        Ok(sel) => (sel.chosen, true),
        Err(_) => {
            let best = cands
                .iter()
                .min_by(|x, y| x.tau_prime().total_cmp(&y.tau_prime()).then(x.k.total_cmp(&y.k)))
                .expect("candidates are nonempty");
            (*best, false)
        }
    }
}

fn row(config: &AuditConfig, abc: &Abc, levels: &EngineLevels, n: u32) -> AuditRow {
    let p = &config.params;
    let m = p.mass;
    let mut flags = Vec::new();

    let energies: BTreeMap<Engine, Option<f64>> =
        Engine::ALL.iter().map(|&e| (e, levels.energy(e, n))).collect();
    let engine_flags = Engine::ALL.iter().map(|&e| (e, levels.flags(e, n))).collect();
    let mut diffs = Vec::new();
    for (i, &a) in Engine::ALL.iter().enumerate() {
        for &b in &Engine::ALL[i + 1..] {
            let diff = energies[&a].zip(energies[&b]).map(|(x, y)| (x - y).abs() / m);
            diffs.push(PairDiff { a, b, diff });
        }
    }

    let order = [Engine::MechanicalNU, Engine::Oracle, Engine::ImplicitLambda, Engine::Eq45Verbatim];
    let (reference_energy, reference_source) = order
        .iter()
        .find_map(|&e| energies[&e].map(|x| (x, e.name().to_string())))
        .unwrap_or((0.0, "WindowCentre".to_string()));
    let (e, shifted) = identity_energy(config, abc, n, reference_energy);
    if shifted {
        flags.push("IdentityEnergyShifted".into());
    }

    let consts = appendix_constants_with_abc(p, abc, e);
    let printed = intermediates_with(p, abc, e, n);
    if !printed.negative_radicands.is_empty() {
        flags.push(format!("NegativeUnderSqrt({})", printed.negative_radicands.join(",")));
    }

    let mut disc_residual = None;
    let mut tau_prime_sign = None;
    let mut eq42_vs_derivative = None;
    let mut eq44_vs_eq12 = None;
    let mut k_mechanical = Vec::new();
    let mut mechanical_exponents = None;
    match crate::pipeline::build_nu_input(p, e).and_then(|input| {
        let cands = nu::pi_candidates(&input)?;
        Ok((input, cands))
    }) {
        Ok((input, cands)) => {
            let (best, valid) = best_candidate(&cands);
            if !valid {
                flags.push("NoValidBranch".into());
            }
            k_mechanical = nu::solve_k(&input).map(|ks| ks.iter().map(|k| k.k).collect()).unwrap_or_default();
            k_mechanical.dedup();
            let q = nu::under_root_quadratic(&input, best.k);
            disc_residual = finite(best.residual_square / (1.0 + q.max_abs()).powi(2));
            tau_prime_sign = Some(best.tau_prime() < 0.0);
            let tp = best.tau_prime();
            eq42_vs_derivative = printed.tau_prime.and_then(|t| finite((t - tp).abs() / tp.abs().max(1.0)));
            let ln_mech = nu::lambda_n(&input, &best, n);
            eq44_vs_eq12 = printed
                .lambda_n
                .and_then(|l| finite((l - ln_mech).abs() / ln_mech.abs().max(1.0)));
            if let Ok(wf) = nu::wavefactor_exponents(&input, &best) {
                mechanical_exponents = phi_on_ac(&wf.phi, abc);
            }
        }
        Err(err) => flags.push(format!("MechanicalUnavailable({err})")),
    }

    let eq20_vs_eq23 = finite((consts.gamma2_direct - consts.gamma2).abs() / consts.gamma2.abs().max(1.0));
    let delta_a9_vs_eq35 = finite(
        (consts.delta_explicit * consts.delta_explicit - consts.delta2).abs() / consts.delta2.abs().max(1.0),
    );

    let (ode, variants, overlap_closed_oracle, closed_exponents) = wave_checks(config, abc, levels, n, reference_energy, &mut flags);

    AuditRow {
        n,
        energies,
        engine_flags,
        diffs,
        reference_energy,
        reference_source,
        identity_energy: e,
        disc_residual,
        tau_prime_sign,
        eq42_vs_derivative,
        eq44_vs_eq12,
        eq20_vs_eq23,
        delta_a9_vs_eq35,
        ode_residual_closedform: ode,
        ode_residual_variants: variants,
        overlap_closed_oracle,
        k_printed: printed.k.and_then(finite),
        k_mechanical,
        closed_exponents,
        mechanical_exponents,
        flags,
    }
}

fn identities_defined(config: &AuditConfig, abc: &Abc, n: u32, e: f64) -> bool {
    let printed = intermediates_with(&config.params, abc, e, n);
    let mech = crate::pipeline::build_nu_input(&config.params, e).and_then(|i| nu::pi_candidates(&i));
    printed.tau_prime.is_some() && printed.lambda_n.is_some() && mech.is_ok()
}

/// The identities hold (or fail) at any energy, so when the printed
/// expressions are not real at the reference energy they are evaluated at
/// the closest scan energy where they are.
fn identity_energy(config: &AuditConfig, abc: &Abc, n: u32, reference: f64) -> (f64, bool) {
    if identities_defined(config, abc, n, reference) {
        return (reference, false);
    }
    let (lo, hi) = config.scan.window(config.params.mass);
    let k = config.scan.brackets.max(1);
    let step = (hi - lo) / k as f64;
    let mut grid: Vec<f64> = (0..=k).map(|i| lo + step * i as f64).collect();
    grid.sort_by(|x, y| (x - reference).abs().total_cmp(&(y - reference).abs()).then(x.total_cmp(y)));
    grid.into_iter()
        .find(|&e| identities_defined(config, abc, n, e))
        .map_or((reference, false), |e| (e, true))
}

/// Exponents of a two-root factor form on `(s+a, s+c)`.
fn phi_on_ac(form: &FactorForm, abc: &Abc) -> Option<[f64; 2]> {
    let FactorForm::TwoRoots { r1, r2, p1, p2 } = *form else {
        return None;
    };
    // Roots are -a and -c; r1 > r2.
    let on_a = if (r1 + abc.a).abs() <= (r2 + abc.a).abs() { p1 } else { p2 };
    let on_c = if on_a == p1 { p2 } else { p1 };
    Some([on_a, on_c])
}

type WaveChecks = (Option<f64>, BTreeMap<String, Option<f64>>, Option<f64>, Option<[f64; 2]>);

fn wave_checks(
    config: &AuditConfig,
    abc: &Abc,
    levels: &EngineLevels,
    n: u32,
    e: f64,
    flags: &mut Vec<String>,
) -> WaveChecks {
    let p = &config.params;
    let mut variants = BTreeMap::new();
    let wf = match exponents_with(p, abc, e) {
        Ok(wf) => wf,
        Err(err) => {
            flags.push(format!("ClosedFormUnavailable({err})"));
            for v in WaveVariant::ALL {
                variants.insert(v.label().to_string(), None);
            }
            return (None, variants, None, None);
        }
    };
    let level = crate::pipeline::EnergyLevel::new(n, e, p.mass, Engine::MechanicalNU, 0.0);
    let grid = config.grid.points();
    let mut default_values = None;
    for v in WaveVariant::ALL {
        let res = closed_form_radial(p, &level, v, &grid)
            .and_then(|rf| ode_residual(p, e, &rf.grid, &rf.values).map(|r| (r, rf.values)));
        let value = match res {
            Ok((r, values)) => {
                if v == WaveVariant::DEFAULT {
                    default_values = Some(values);
                }
                finite(r)
            }
            Err(_) => None,
        };
        variants.insert(v.label().to_string(), value);
    }
    let ode = variants[WaveVariant::DEFAULT.label()];
    if ode.is_none() {
        flags.push("OdeResidualUnavailable".into());
    }
    let overlap_closed_oracle = match (default_values, levels.energy(Engine::Oracle, n)) {
        (Some(vals), Some(_)) => oracle_vector(config, n)
            .and_then(|s| overlap(&s.grid, &vals, &s.vector).ok())
            .and_then(finite),
        _ => None,
    };
    let exps = [0.5 * wf.d, 0.5 * wf.f];
    (ode, variants, overlap_closed_oracle, exps.iter().all(|x| x.is_finite()).then_some(exps))
}

fn oracle_vector(config: &AuditConfig, n: u32) -> Option<OracleState> {
    oracle_state(&config.params, n, &config.grid, &config.oracle).ok()
}

fn summarize(rows: &[AuditRow]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    let over = |x: Option<f64>| x.map_or(true, |v| v > IDENTITY_TOL);
    for r in rows {
        let checks = [
            ("disc_residual", over(r.disc_residual)),
            ("tau_prime_sign", r.tau_prime_sign != Some(true)),
            ("eq42_vs_derivative", over(r.eq42_vs_derivative)),
            ("eq44_vs_eq12", over(r.eq44_vs_eq12)),
            ("eq20_vs_eq23", over(r.eq20_vs_eq23)),
            ("delta_a9_vs_eq35", over(r.delta_a9_vs_eq35)),
            ("ode_residual_closedform", over(r.ode_residual_closedform)),
        ];
        for (name, bad) in checks {
            *out.entry(name.to_string()).or_insert(0) += bad as usize;
        }
    }
    out
}

/// One row of [`identity_checks`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySample {
    pub energy: f64,
    /// `|β² - (ε² - β'²)|`, zero by construction.
    pub beta2_identity: f64,
    /// `|γ² - (ε² - γ'²)|`, zero by construction.
    pub gamma2_identity: f64,
    /// Direct `γ²` against `ε² - γ'²`, relative.
    pub gamma2_direct_vs_difference: f64,
    /// `|δ_explicit² - (Λ3² + 12Λ1)|`, relative.
    pub delta_forms: f64,
    /// Printed `τ'` against the slope of the printed `τ`, relative.
    pub tau_prime_vs_slope: Option<f64>,
    /// Printed against mechanical `λ_n` for `n = 1, 2`, relative.
    pub lambda_n_vs_mechanical: [Option<f64>; 2],
}

/// Identity residuals at each sample energy.
pub fn identity_checks(params: &HylleraasParams, samples: &[f64]) -> Result<Vec<IdentitySample>> {
    let abc = params.validate()?;
    Ok(samples
        .iter()
        .map(|&e| {
            let c = appendix_constants_with_abc(params, &abc, e);
            let scale = |x: f64| x.abs().max(1.0);
            let printed1 = intermediates_with(params, &abc, e, 1);
            let tau_prime_vs_slope = printed1
                .tau_prime
                .zip(printed1.tau_slope())
                .map(|(t, s)| (t - s).abs() / scale(s));
            let mech = crate::pipeline::build_nu_input(params, e)
                .and_then(|input| nu::pi_candidates(&input).map(|c| (input, best_candidate(&c).0)));
            let lambda_n_vs_mechanical = [1u32, 2].map(|n| {
                let printed = intermediates_with(params, &abc, e, n).lambda_n?;
                let (input, best) = mech.as_ref().ok()?;
                let ln = nu::lambda_n(input, best, n);
                finite((printed - ln).abs() / scale(ln))
            });
            IdentitySample {
                energy: e,
                beta2_identity: (c.beta2 - (c.eps2 - c.betap2)).abs(),
                gamma2_identity: (c.gamma2 - (c.eps2 - c.gammap2)).abs(),
                gamma2_direct_vs_difference: (c.gamma2_direct - c.gamma2).abs() / scale(c.gamma2),
                delta_forms: (c.delta_explicit * c.delta_explicit - c.delta2).abs() / scale(c.delta2),
                tau_prime_vs_slope,
                lambda_n_vs_mechanical,
            }
        })
        .collect())
}

/// Flat CSV rendering of a report: one line per row, fixed column order.
pub fn report_csv(report: &AuditReport) -> String {
    let mut out = String::new();
    let mut header = vec!["n".to_string()];
    for e in Engine::ALL {
        header.push(format!("E_{}", e.name()));
    }
    for e in Engine::ALL {
        header.push(format!("flags_{}", e.name()));
    }
    header.extend(
        [
            "reference_energy",
            "reference_source",
            "identity_energy",
            "disc_residual",
            "tau_prime_sign",
            "eq42_vs_derivative",
            "eq44_vs_eq12",
            "eq20_vs_eq23",
            "delta_a9_vs_eq35",
            "ode_residual_closedform",
            "overlap_closed_oracle",
            "flags",
        ]
        .map(String::from),
    );
    out.push_str(&header.join(","));
    out.push('\n');
    let num = |x: Option<f64>| x.map(format_float).unwrap_or_default();
    for r in &report.rows {
        let mut cells = vec![r.n.to_string()];
        for e in Engine::ALL {
            cells.push(num(r.energies[&e]));
        }
        for e in Engine::ALL {
            cells.push(r.engine_flags[&e].clone());
        }
        cells.push(format_float(r.reference_energy));
        cells.push(r.reference_source.clone());
        cells.push(format_float(r.identity_energy));
        cells.push(num(r.disc_residual));
        cells.push(r.tau_prime_sign.map(|b| b.to_string()).unwrap_or_default());
        cells.push(num(r.eq42_vs_derivative));
        cells.push(num(r.eq44_vs_eq12));
        cells.push(num(r.eq20_vs_eq23));
        cells.push(num(r.delta_a9_vs_eq35));
        cells.push(num(r.ode_residual_closedform));
        cells.push(num(r.overlap_closed_oracle));
        cells.push(r.flags.iter().map(|f| f.replace(',', ";")).collect::<Vec<_>>().join("|"));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Shortest text that parses back to the identical `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}
