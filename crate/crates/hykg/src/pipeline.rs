//! The closed-form Hylleraas derivation and its energy-level root finders.
//!
//! Three engines live here. [`energy_eq45`] solves the printed explicit
//! energy formula, [`energy_implicit`] solves the printed `λ = λ_n`
//! condition, and [`energy_mechanical`] feeds the printed base polynomials
//! through the generic NU engine instead of the hand algebra.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{appendix_constants_with_abc, Abc, AppendixConstants, HylleraasParams};
use crate::nu::{self, NUInput, PolyCoeffs, Quantization, SignChoice};
use crate::roots::{dedup_roots, scan_roots, Root};

/// Which solver produced a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Engine {
    Eq45Verbatim,
    ImplicitLambda,
    MechanicalNU,
    Oracle,
}

impl Engine {
    pub const ALL: [Engine; 4] =
        [Engine::Eq45Verbatim, Engine::ImplicitLambda, Engine::MechanicalNU, Engine::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Eq45Verbatim => "Eq45Verbatim",
            Engine::ImplicitLambda => "ImplicitLambda",
            Engine::MechanicalNU => "MechanicalNU",
            Engine::Oracle => "Oracle",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown engine `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LevelFlag {
    Eps2Negative,
    BranchGap,
    NoRoot,
    DuplicateMerged,
    NegativeUnderSqrt,
    OrderViolation,
    /// The state does not decay inside the grid (box-quantised continuum).
    Unconfined,
    NodeMismatch,
    /// Converged sign change accepted on the slope test although the raw
    /// residual exceeds the engine tolerance.
    SteepResidual,
}

impl LevelFlag {
    pub fn name(self) -> &'static str {
        match self {
            LevelFlag::Eps2Negative => "Eps2Negative",
            LevelFlag::BranchGap => "BranchGap",
            LevelFlag::NoRoot => "NoRoot",
            LevelFlag::DuplicateMerged => "DuplicateMerged",
            LevelFlag::NegativeUnderSqrt => "NegativeUnderSqrt",
            LevelFlag::OrderViolation => "OrderViolation",
            LevelFlag::Unconfined => "Unconfined",
            LevelFlag::NodeMismatch => "NodeMismatch",
            LevelFlag::SteepResidual => "SteepResidual",
        }
    }
}

/// Joins flags with `|` in their canonical order; empty string for none.
pub fn format_flags(flags: &BTreeSet<LevelFlag>) -> String {
    flags.iter().map(|f| f.name()).collect::<Vec<_>>().join("|")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub n: u32,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "Ebar")]
    pub ebar: f64,
    pub engine: Engine,
    pub residual: f64,
    pub flags: BTreeSet<LevelFlag>,
    /// Sign of the explicit formula's `±` that produced the level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<SignChoice>,
}

impl EnergyLevel {
    pub fn new(n: u32, energy: f64, mass: f64, engine: Engine, residual: f64) -> Self {
        EnergyLevel {
            n,
            energy,
            ebar: energy * energy - mass * mass,
            engine,
            residual,
            flags: BTreeSet::new(),
            sign: None,
        }
    }
}

/// Result of one root search: the levels found plus search-wide flags
/// (`NoRoot`, `BranchGap`, `NegativeUnderSqrt`).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Levels {
    pub levels: Vec<EnergyLevel>,
    pub flags: BTreeSet<LevelFlag>,
}

impl Levels {
    pub fn first(&self) -> Option<&EnergyLevel> {
        self.levels.first()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Energy-scan protocol shared by the closed-form engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSettings {
    /// Number of equal subintervals of the bound-state window.
    pub brackets: usize,
    /// Bisection tolerance, absolute in `E`.
    pub e_tol: f64,
    /// Roots closer than `dedup_rel · M` are merged.
    pub dedup_rel: f64,
    /// The window is `(-M + edge_rel·M, M - edge_rel·M)`.
    pub edge_rel: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        ScanSettings { brackets: 2000, e_tol: 1e-12, dedup_rel: 1e-9, edge_rel: 1e-9 }
    }
}

impl ScanSettings {
    pub fn window(&self, mass: f64) -> (f64, f64) {
        (-mass + self.edge_rel * mass, mass - self.edge_rel * mass)
    }
}

/// Relative tolerance of the `λ`-type engines.
pub const LAMBDA_TOL: f64 = 1e-8;
/// Tolerance of `|Ē - RHS| / M²` for the explicit formula.
pub const EXPLICIT_TOL: f64 = 1e-10;

/// The hypergeometric-type base polynomials at energy `E`:
/// `σ = 2α1(s+a)(s+c)`, `τ̃ = 2α1(s+c)`, `σ̃ = -ε²s² + β²s + γ²`.
pub fn build_nu_input(params: &HylleraasParams, energy: f64) -> Result<NUInput> {
    let abc = params.validate()?;
    let c = appendix_constants_with_abc(params, &abc, energy);
    nu_input_from(&abc, &c)
}

fn nu_input_from(abc: &Abc, c: &AppendixConstants) -> Result<NUInput> {
    let two_a1 = 2.0 * c.alpha1;
    let sigma = PolyCoeffs::new(two_a1 * abc.a * abc.c, two_a1 * (abc.a + abc.c), two_a1);
    let tau_tilde = PolyCoeffs::linear(two_a1 * abc.c, two_a1);
    let sigma_tilde = PolyCoeffs::new(c.gamma2, c.beta2, -c.eps2);
    NUInput::new(sigma, tau_tilde, sigma_tilde)
}

/// The printed intermediate quantities of the closed-form derivation at
/// `(E, n)`. Fields whose radicand is negative are `None`, and the radicand's
/// name is listed in `negative_radicands`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrintedIntermediates {
    pub energy: f64,
    pub n: u32,
    pub constants: AppendixConstants,
    /// `√(A² - B)`
    pub sqrt_v2: Option<f64>,
    pub mu_j: Option<f64>,
    pub nu_j: Option<f64>,
    /// `k = -(Λ2 + Λ3ε²) - √(U² - V²)`
    pub k: Option<f64>,
    /// `π = α1(s + a) - [μJ s + νJ]`
    pub pi: Option<PolyCoeffs>,
    /// `τ = 2α1[2s + (a + c)] - 2[μJ s - νJ]`, as printed.
    pub tau: Option<PolyCoeffs>,
    /// `τ' = -2[μJ - 4α1]`, as printed.
    pub tau_prime: Option<f64>,
    pub lambda: Option<f64>,
    /// `λ_n = 2n√(U + V) - 2α1 n(n+3)`
    pub lambda_n: Option<f64>,
    pub u2: f64,
    pub v2: f64,
    pub negative_radicands: Vec<&'static str>,
}

impl PrintedIntermediates {
    /// Slope of the printed `τ` polynomial, for comparison with `tau_prime`.
    pub fn tau_slope(&self) -> Option<f64> {
        self.tau.map(|t| t.c1)
    }
}

fn checked_sqrt(x: f64, name: &'static str, bad: &mut Vec<&'static str>) -> Option<f64> {
    if x >= 0.0 {
        Some(x.sqrt())
    } else {
        bad.push(name);
        None
    }
}

pub fn printed_intermediates(
    params: &HylleraasParams,
    energy: f64,
    n: u32,
) -> Result<PrintedIntermediates> {
    let abc = params.validate()?;
    Ok(intermediates_with(params, &abc, energy, n))
}

pub(crate) fn intermediates_with(
    params: &HylleraasParams,
    abc: &Abc,
    energy: f64,
    n: u32,
) -> PrintedIntermediates {
    let c = appendix_constants_with_abc(params, abc, energy);
    let mut bad = Vec::new();
    let a1 = c.alpha1;
    let inner = c.delta_explicit * (c.eps2 + c.a_const);

    let sqrt_v2 = checked_sqrt(c.v2, "A^2 - B", &mut bad);
    let (mu_j, nu_j) = match sqrt_v2 {
        Some(sv) => (
            checked_sqrt(inner + sv, "muJ", &mut bad),
            checked_sqrt(inner - sv, "nuJ", &mut bad),
        ),
        None => (None, None),
    };
    let sqrt_uv = checked_sqrt(c.u2 - c.v2, "U^2 - V^2", &mut bad);
    let k = sqrt_uv.map(|r| -(c.lam2 + c.lam3 * c.eps2) - r);
    let pi = mu_j
        .zip(nu_j)
        .map(|(m, v)| PolyCoeffs::linear(a1 * abc.a - v, a1 - m));
    let tau = mu_j
        .zip(nu_j)
        .map(|(m, v)| PolyCoeffs::linear(2.0 * a1 * (abc.a + abc.c) + 2.0 * v, 4.0 * a1 - 2.0 * m));
    let tau_prime = mu_j.map(|m| -2.0 * (m - 4.0 * a1));
    let lambda = k;
    let nf = n as f64;
    let lambda_n = sqrt_v2.map(|v| {
        let u = c.u2.sqrt();
        2.0 * nf * (u + v).sqrt() - 2.0 * a1 * nf * (nf + 3.0)
    });

    PrintedIntermediates {
        energy,
        n,
        constants: c,
        sqrt_v2,
        mu_j,
        nu_j,
        k,
        pi,
        tau,
        tau_prime,
        lambda,
        lambda_n,
        u2: c.u2,
        v2: c.v2,
        negative_radicands: bad,
    }
}

/// Right-hand side of the explicit energy formula for both signs,
/// `[minus, plus]`, or `None` where a radicand is negative.
///
/// Printed form, with `S = √(A² - B)` and `P = ω²(1+K)²/(2μ(1+b)δ²)`:
///
/// ```text
/// Ē = P·S·[Λ3 + (A/S)(1 + (Λ3/A)S - δ(1+2n)/S)]
///   ± P·S·√( [Λ3 + (A/S)(1 + (Λ3/A)S - δ(1+2n)/S)] · (2δ/S)²
///            · [(A/S)(A/2 - δ(1+2n)/S) + α1(1 + 2n(n+3)) - Λ3 - S]² )
/// ```
///
/// `δ` is the explicit polynomial form. `(A/S)(Λ3/A)S` is evaluated as `Λ3`
/// so that `A = 0` is not a removable 0/0.
pub fn explicit_rhs(params: &HylleraasParams, c: &AppendixConstants, n: u32) -> Option<[f64; 2]> {
    if c.v2 <= 0.0 {
        return None;
    }
    let s = c.v2.sqrt();
    let d = c.delta_explicit;
    let m = 1.0 + 2.0 * n as f64;
    let p = params.scale2() / (2.0 * params.mu * c.alpha1 * d * d);
    let x = c.lam3 + c.a_const / s + c.lam3 - c.a_const * d * m / (s * s);
    let y = (c.a_const / s) * (c.a_const / 2.0 - d * m / s)
        + c.alpha1 * (1.0 + 2.0 * n as f64 * (n as f64 + 3.0))
        - c.lam3
        - s;
    let two_d_s = 2.0 * d / s;
    let rad = x * two_d_s * two_d_s * y * y;
    if !(rad >= 0.0) {
        return None;
    }
    let base = p * s * x;
    let spread = p * s * rad.sqrt();
    let out = [base - spread, base + spread];
    out.iter().all(|v| v.is_finite()).then_some(out)
}

/// Accepts a converged sign change as a root when the residual is within
/// `tol`, or when it is consistent with the local slope of the bracket
/// (steep but continuous functions). Poles and jumps fail both tests.
fn accept(root: &Root, tol: f64, slope: f64, settings: &ScanSettings) -> Option<bool> {
    if root.f.abs() <= tol {
        Some(false)
    } else if root.f.abs() <= 1e3 * settings.e_tol * slope {
        Some(true)
    } else {
        None
    }
}

fn local_slope<F: Fn(f64) -> Option<f64>>(f: &F, x: f64, settings: &ScanSettings, mass: f64) -> f64 {
    let h = 0.5 * (2.0 * mass / settings.brackets.max(1) as f64);
    match (f(x - h), f(x + h)) {
        (Some(a), Some(b)) => ((b - a) / (2.0 * h)).abs(),
        _ => 0.0,
    }
}

struct Found {
    x: f64,
    residual: f64,
    steep: bool,
    sign: Option<SignChoice>,
}

fn collect_levels(
    mut found: Vec<Found>,
    n: u32,
    engine: Engine,
    params: &HylleraasParams,
    abc: &Abc,
    settings: &ScanSettings,
    mut list_flags: BTreeSet<LevelFlag>,
) -> Levels {
    found.sort_by(|p, q| p.x.total_cmp(&q.x));
    let mass = params.mass;
    let roots: Vec<Root> = found.iter().map(|f| Root { x: f.x, f: f.residual }).collect();
    let merged = dedup_roots(roots, settings.dedup_rel * mass);
    let mut levels = Vec::with_capacity(merged.len());
    for (root, was_merged) in merged {
        let src = found.iter().find(|f| f.x == root.x).expect("root comes from found");
        let mut level = EnergyLevel::new(n, root.x, mass, engine, root.f);
        level.sign = src.sign;
        if was_merged {
            level.flags.insert(LevelFlag::DuplicateMerged);
        }
        if src.steep {
            level.flags.insert(LevelFlag::SteepResidual);
        }
        if appendix_constants_with_abc(params, abc, root.x).eps2 <= 0.0 {
            level.flags.insert(LevelFlag::Eps2Negative);
        }
        levels.push(level);
    }
    if levels.is_empty() {
        list_flags.insert(LevelFlag::NoRoot);
    }
    Levels { levels, flags: list_flags }
}

/// Levels from the explicit energy formula, both signs.
pub fn energy_eq45(params: &HylleraasParams, n: u32, settings: &ScanSettings) -> Result<Levels> {
    let abc = params.validate()?;
    let m2 = params.mass * params.mass;
    let (lo, hi) = settings.window(params.mass);
    let mut list_flags = BTreeSet::new();
    let mut found = Vec::new();
    for (idx, sign) in [SignChoice::Minus, SignChoice::Plus].into_iter().enumerate() {
        let f = |e: f64| {
            let c = appendix_constants_with_abc(params, &abc, e);
            explicit_rhs(params, &c, n).map(|rhs| (c.ebar - rhs[idx]) / m2)
        };
        if sample_has_gap(&f, lo, hi, settings) {
            list_flags.insert(LevelFlag::NegativeUnderSqrt);
        }
        for root in scan_roots(&f, lo, hi, settings.brackets, settings.e_tol) {
            let slope = local_slope(&f, root.x, settings, params.mass);
            if let Some(steep) = accept(&root, EXPLICIT_TOL, slope, settings) {
                found.push(Found { x: root.x, residual: root.f.abs(), steep, sign: Some(sign) });
            }
        }
    }
    Ok(collect_levels(found, n, Engine::Eq45Verbatim, params, &abc, settings, list_flags))
}

/// Levels from the printed `λ(E) = λ_n(E)` condition.
pub fn energy_implicit(params: &HylleraasParams, n: u32, settings: &ScanSettings) -> Result<Levels> {
    let abc = params.validate()?;
    let (lo, hi) = settings.window(params.mass);
    let eval = |e: f64| {
        let p = intermediates_with(params, &abc, e, n);
        p.lambda.zip(p.lambda_n)
    };
    let f = |e: f64| eval(e).map(|(l, ln)| l - ln);
    let mut list_flags = BTreeSet::new();
    if sample_has_gap(&f, lo, hi, settings) {
        list_flags.insert(LevelFlag::BranchGap);
    }
    let mut found = Vec::new();
    for root in scan_roots(&f, lo, hi, settings.brackets, settings.e_tol) {
        let Some((l, ln)) = eval(root.x) else { continue };
        let tol = LAMBDA_TOL * (l.abs() + ln.abs()).max(1.0);
        let slope = local_slope(&f, root.x, settings, params.mass);
        if let Some(steep) = accept(&root, tol, slope, settings) {
            found.push(Found { x: root.x, residual: root.f.abs(), steep, sign: None });
        }
    }
    Ok(collect_levels(found, n, Engine::ImplicitLambda, params, &abc, settings, list_flags))
}

/// Levels from the generic NU engine applied to [`build_nu_input`].
pub fn energy_mechanical(params: &HylleraasParams, n: u32, settings: &ScanSettings) -> Result<Levels> {
    let abc = params.validate()?;
    let (lo, hi) = settings.window(params.mass);
    let eval = |e: f64| {
        let c = appendix_constants_with_abc(params, &abc, e);
        match nu_input_from(&abc, &c) {
            Ok(input) => nu::quantization_residual(&input, n),
            Err(_) => Quantization::BranchGap(nu::GapReason::InvalidInput),
        }
    };
    let f = |e: f64| eval(e).residual();
    let mut list_flags = BTreeSet::new();
    if sample_has_gap(&f, lo, hi, settings) {
        list_flags.insert(LevelFlag::BranchGap);
    }
    let mut found = Vec::new();
    for root in scan_roots(&f, lo, hi, settings.brackets, settings.e_tol) {
        let Quantization::Value { lambda, lambda_n, .. } = eval(root.x) else { continue };
        let tol = LAMBDA_TOL * (lambda.abs() + lambda_n.abs()).max(1.0);
        let slope = local_slope(&f, root.x, settings, params.mass);
        if let Some(steep) = accept(&root, tol, slope, settings) {
            found.push(Found { x: root.x, residual: root.f.abs(), steep, sign: None });
        }
    }
    Ok(collect_levels(found, n, Engine::MechanicalNU, params, &abc, settings, list_flags))
}

fn sample_has_gap<F: Fn(f64) -> Option<f64>>(f: &F, lo: f64, hi: f64, settings: &ScanSettings) -> bool {
    let k = settings.brackets.max(1);
    let step = (hi - lo) / k as f64;
    (0..=k).any(|i| f(lo + step * i as f64).is_none())
}

/// Runs one engine for `n = 0..=n_max`, returning one [`Levels`] per `n`.
pub fn closed_form_spectrum(
    params: &HylleraasParams,
    engine: Engine,
    n_max: u32,
    settings: &ScanSettings,
) -> Result<Vec<Levels>> {
    let solve = match engine {
        Engine::Eq45Verbatim => energy_eq45,
        Engine::ImplicitLambda => energy_implicit,
        Engine::MechanicalNU => energy_mechanical,
        Engine::Oracle => {
            return Err(crate::error::Error::InvalidParams(
                "the oracle engine is solved by the oracle module".into(),
            ))
        }
    };
    let mut out = (0..=n_max)
        .map(|n| solve(params, n, settings))
        .collect::<Result<Vec<_>>>()?;
    mark_order_violations(&mut out);
    Ok(out)
}

/// Flags the lowest level of each `n` whose energy does not exceed the
/// lowest level of the previous `n`. Nothing is reordered.
pub fn mark_order_violations(per_n: &mut [Levels]) {
    let mut prev: Option<f64> = None;
    for levels in per_n.iter_mut() {
        if let Some(level) = levels.levels.first_mut() {
            if let Some(p) = prev {
                if level.energy <= p {
                    level.flags.insert(LevelFlag::OrderViolation);
                }
            }
            prev = Some(level.energy);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SSign;

    fn default_params() -> HylleraasParams {
        HylleraasParams::default()
    }

    #[test]
    fn nu_input_shape_for_b0_a0_c0() {
        // K = k1 = k2 = 0 gives a = b = c = 0.
        let p = HylleraasParams { shape: 0.0, k1: 0.0, k2: 0.0, ..default_params() };
        let input = build_nu_input(&p, 0.3).unwrap();
        assert_eq!(input.sigma, PolyCoeffs::new(0.0, 0.0, 2.0));
        assert_eq!(input.tau_tilde, PolyCoeffs::linear(0.0, 2.0));
    }

    #[test]
    fn nu_input_linear_coefficient_is_beta2() {
        let p = default_params();
        let c = crate::model::appendix_constants(&p, 0.5).unwrap();
        let input = build_nu_input(&p, 0.5).unwrap();
        assert_eq!(input.sigma_tilde.c1, c.beta2);
        assert_eq!(input.sigma_tilde.c1, c.eps2 - c.betap2);
        assert_eq!(input.sigma_tilde.c2, -c.eps2);
    }

    #[test]
    fn lambda_n_vanishes_for_ground_state() {
        let p = printed_intermediates(&default_params(), 0.5, 0).unwrap();
        assert_eq!(p.lambda_n, Some(0.0));
    }

    #[test]
    fn lambda_reduces_when_radicand_vanishes() {
        // With U² = V² the square root term drops out.
        let p = printed_intermediates(&default_params(), 0.5, 1).unwrap();
        let c = p.constants;
        let k = p.k.unwrap();
        let sqrt_term = -(c.lam2 + c.lam3 * c.eps2) - k;
        assert!((sqrt_term - (c.u2 - c.v2).sqrt()).abs() < 1e-9 * c.u2.sqrt());
    }

    #[test]
    fn printed_tau_slope_differs_from_printed_tau_prime_by_4_alpha1() {
        let p = printed_intermediates(&default_params(), 0.5, 1).unwrap();
        let a1 = p.constants.alpha1;
        let diff = p.tau_prime.unwrap() - p.tau_slope().unwrap();
        assert!((diff - 4.0 * a1).abs() < 1e-12 * p.tau_prime.unwrap().abs().max(1.0));
    }

    #[test]
    fn free_particle_has_no_levels() {
        let p = HylleraasParams { dissociation: 0.0, ..default_params() };
        let s = ScanSettings::default();
        for n in 0..3 {
            let eq45 = energy_eq45(&p, n, &s).unwrap();
            assert!(eq45.is_empty());
            assert!(eq45.flags.contains(&LevelFlag::NoRoot));
        }
    }

    #[test]
    fn default_params_mechanical_engine_has_no_valid_branch() {
        let p = default_params().with_sign(SSign::NegativeExponent);
        let levels = energy_mechanical(&p, 0, &ScanSettings::default()).unwrap();
        assert!(levels.is_empty());
        assert!(levels.flags.contains(&LevelFlag::BranchGap));
    }

    #[test]
    fn mechanical_roots_satisfy_tolerance() {
        let p = HylleraasParams {
            shape: 2.94,
            k1: 2.79,
            k2: 1.44,
            omega: 0.38,
            dissociation: 3.42,
            mass: 1.0,
            mu: 10.0,
            s_sign: SSign::PositiveExponent,
        };
        let levels = energy_mechanical(&p, 0, &ScanSettings::default()).unwrap();
        assert!(!levels.is_empty(), "{levels:?}");
        for l in &levels.levels {
            assert!(l.energy > -1.0 && l.energy < 1.0);
            let Quantization::Value { residual, lambda, lambda_n, .. } =
                nu::quantization_residual(&build_nu_input(&p, l.energy).unwrap(), 0)
            else {
                panic!("gap at a returned level");
            };
            assert!(residual.abs() <= LAMBDA_TOL * (lambda.abs() + lambda_n.abs()).max(1.0));
        }
    }

    #[test]
    fn mechanical_ground_state_is_a_root_of_lambda() {
        let p = HylleraasParams {
            shape: 1.9,
            k1: 1.63,
            k2: 0.02,
            omega: 0.44,
            dissociation: 1.47,
            mass: 1.0,
            mu: 2.0,
            s_sign: SSign::PositiveExponent,
        };
        let levels = energy_mechanical(&p, 0, &ScanSettings::default()).unwrap();
        let e = levels.first().expect("level").energy;
        let Quantization::Value { lambda, .. } =
            nu::quantization_residual(&build_nu_input(&p, e).unwrap(), 0)
        else {
            panic!("gap");
        };
        assert!(lambda.abs() < 1e-8);
    }

    #[test]
    fn order_violations_are_flagged_not_reordered() {
        let mk = |n, e| Levels {
            levels: vec![EnergyLevel::new(n, e, 1.0, Engine::Oracle, 0.0)],
            flags: BTreeSet::new(),
        };
        let mut v = vec![mk(0, 0.2), mk(1, 0.1), mk(2, 0.3)];
        mark_order_violations(&mut v);
        assert!(v[1].levels[0].flags.contains(&LevelFlag::OrderViolation));
        assert!(!v[2].levels[0].flags.contains(&LevelFlag::OrderViolation));
        assert_eq!(v[1].levels[0].energy, 0.1);
    }

    #[test]
    fn scans_are_deterministic() {
        let p = default_params();
        let s = ScanSettings::default();
        let a = energy_eq45(&p, 1, &s).unwrap();
        let b = energy_eq45(&p, 1, &s).unwrap();
        assert_eq!(a, b);
    }
}
