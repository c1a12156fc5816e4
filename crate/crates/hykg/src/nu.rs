//! Potential-agnostic Nikiforov-Uvarov machinery.
//!
//! Input is the equation
//!
//! ```text
//! ψ'' + (τ̃/σ) ψ' + (σ̃/σ²) ψ = 0,     deg σ, deg σ̃ ≤ 2,  deg τ̃ ≤ 1
//! ```
//!
//! and everything downstream (`k`, `π`, `τ`, `λ`, `λ_n`, factor exponents) is
//! derived mechanically with floating-point residuals kept alongside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative window inside which two `τ'` values count as tied.
const TAU_TIE_REL: f64 = 1e-9;

/// `c0 + c1 s + c2 s²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PolyCoeffs {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl PolyCoeffs {
    pub const ZERO: PolyCoeffs = PolyCoeffs { c0: 0.0, c1: 0.0, c2: 0.0 };

    pub fn new(c0: f64, c1: f64, c2: f64) -> Self {
        PolyCoeffs { c0, c1, c2 }
    }

    pub fn constant(c0: f64) -> Self {
        Self::new(c0, 0.0, 0.0)
    }

    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::new(c0, c1, 0.0)
    }

    /// Degree of the highest nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.c2 != 0.0 {
            Some(2)
        } else if self.c1 != 0.0 {
            Some(1)
        } else if self.c0 != 0.0 {
            Some(0)
        } else {
            None
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.c2 * s + self.c1) * s + self.c0
    }

    pub fn derivative(&self) -> PolyCoeffs {
        PolyCoeffs::linear(self.c1, 2.0 * self.c2)
    }

    pub fn add(&self, other: &PolyCoeffs) -> PolyCoeffs {
        PolyCoeffs::new(self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2)
    }

    pub fn sub(&self, other: &PolyCoeffs) -> PolyCoeffs {
        PolyCoeffs::new(self.c0 - other.c0, self.c1 - other.c1, self.c2 - other.c2)
    }

    pub fn scale(&self, f: f64) -> PolyCoeffs {
        PolyCoeffs::new(self.c0 * f, self.c1 * f, self.c2 * f)
    }

    /// Square of a polynomial of degree ≤ 1 (the `c2` term is ignored).
    pub fn square_linear(&self) -> PolyCoeffs {
        PolyCoeffs::new(self.c0 * self.c0, 2.0 * self.c0 * self.c1, self.c1 * self.c1)
    }

    /// Discriminant `c1² - 4 c2 c0`.
    pub fn discriminant(&self) -> f64 {
        self.c1 * self.c1 - 4.0 * self.c2 * self.c0
    }

    pub fn max_abs(&self) -> f64 {
        self.c0.abs().max(self.c1.abs()).max(self.c2.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.c1.is_finite() && self.c2.is_finite()
    }
}

/// The three base polynomials of the NU equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NUInput {
    pub sigma: PolyCoeffs,
    pub tau_tilde: PolyCoeffs,
    pub sigma_tilde: PolyCoeffs,
}

impl NUInput {
    pub fn new(sigma: PolyCoeffs, tau_tilde: PolyCoeffs, sigma_tilde: PolyCoeffs) -> Result<Self> {
        let input = NUInput { sigma, tau_tilde, sigma_tilde };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.tau_tilde.is_finite() && self.sigma_tilde.is_finite()) {
            return Err(Error::InvalidParams("non-finite NU coefficient".into()));
        }
        if self.sigma.degree().is_none() {
            return Err(Error::InvalidParams("sigma is identically zero".into()));
        }
        if self.tau_tilde.degree().unwrap_or(0) > 1 {
            return Err(Error::InvalidParams("tau~ must have degree <= 1".into()));
        }
        Ok(())
    }

    /// `(σ' - τ̃)/2`.
    pub fn half_difference(&self) -> PolyCoeffs {
        self.sigma.derivative().sub(&self.tau_tilde).scale(0.5)
    }

    /// Coefficients `(A2, A1, A0)` of `disc(Q_k) = A2 k² + A1 k + A0`.
    pub fn k_polynomial(&self) -> PolyCoeffs {
        let q = under_root_quadratic(self, 0.0);
        let s = &self.sigma;
        PolyCoeffs::new(
            q.c1 * q.c1 - 4.0 * q.c2 * q.c0,
            2.0 * q.c1 * s.c1 - 4.0 * (q.c2 * s.c0 + s.c2 * q.c0),
            s.c1 * s.c1 - 4.0 * s.c2 * s.c0,
        )
    }
}

/// `Q_k(s) = ((σ' - τ̃)/2)² - σ̃ + kσ`.
pub fn under_root_quadratic(input: &NUInput, k: f64) -> PolyCoeffs {
    input
        .half_difference()
        .square_linear()
        .sub(&input.sigma_tilde)
        .add(&input.sigma.scale(k))
}

/// A real solution of the perfect-square condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KRoot {
    pub k: f64,
    /// `|disc(Q_k)|` after refinement.
    pub residual: f64,
}

/// Real `k` values that make `Q_k` a perfect square, sorted ascending.
pub fn solve_k(input: &NUInput) -> Result<Vec<KRoot>> {
    input.validate()?;
    let q0 = under_root_quadratic(input, 0.0);
    let s = &input.sigma;
    if q0.c2 == 0.0 && s.c2 == 0.0 && q0.c1 == 0.0 && s.c1 == 0.0 {
        return Err(Error::DegenerateSigma);
    }
    let kp = input.k_polynomial();
    let disc_at = |k: f64| under_root_quadratic(input, k).discriminant();
    let slope_at = |k: f64| kp.c1 + 2.0 * kp.c2 * k;

    let mut ks: Vec<f64> = if kp.c2 == 0.0 {
        if kp.c1 == 0.0 {
            return if kp.c0 == 0.0 { Err(Error::DegenerateSigma) } else { Err(Error::NoRealK) };
        }
        vec![-kp.c0 / kp.c1]
    } else {
        let d = kp.c1 * kp.c1 - 4.0 * kp.c2 * kp.c0;
        let scale = kp.c1 * kp.c1 + (4.0 * kp.c2 * kp.c0).abs();
        if d < 0.0 && d < -1e-14 * scale {
            return Err(Error::NoRealK);
        }
        let sq = d.max(0.0).sqrt();
        let q = -0.5 * (kp.c1 + kp.c1.signum() * sq);
        if q == 0.0 {
            vec![0.0, 0.0]
        } else {
            vec![q / kp.c2, kp.c0 / q]
        }
    };

    // One Newton step per root, kept only if it shrinks the defect.
    for k in ks.iter_mut() {
        let d = disc_at(*k);
        let ds = slope_at(*k);
        if ds != 0.0 {
            let cand = *k - d / ds;
            if cand.is_finite() && disc_at(cand).abs() < d.abs() {
                *k = cand;
            }
        }
    }
    ks.sort_by(|a, b| a.total_cmp(b));
    ks.dedup();
    Ok(ks
        .into_iter()
        .map(|k| KRoot { k, residual: disc_at(k).abs() })
        .collect())
}

/// Sign in front of the square root in `π(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SignChoice {
    Minus,
    Plus,
}

impl SignChoice {
    pub fn factor(self) -> f64 {
        match self {
            SignChoice::Plus => 1.0,
            SignChoice::Minus => -1.0,
        }
    }
}

/// One `(k, ±)` candidate of the NU construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NUSolution {
    pub k: f64,
    pub pi: PolyCoeffs,
    pub sign_choice: SignChoice,
    pub tau: PolyCoeffs,
    pub lambda: f64,
    /// `|disc(Q_k)|`.
    pub residual_square: f64,
    /// The linear square root of `Q_k` with nonnegative leading coefficient.
    pub root: PolyCoeffs,
}

impl NUSolution {
    pub fn tau_prime(&self) -> f64 {
        self.tau.c1
    }
}

/// Tolerance of the perfect-square condition for a given `Q_k`.
pub fn square_tolerance(q: &PolyCoeffs) -> f64 {
    let m = 1.0 + q.max_abs();
    1e-10 * m * m
}

/// Square root of a quadratic that is (numerically) a perfect square.
fn linear_sqrt(q: &PolyCoeffs) -> Option<PolyCoeffs> {
    let scale = q.max_abs().max(f64::MIN_POSITIVE);
    if q.c2 > 1e-14 * scale {
        let p = q.c2.sqrt();
        Some(PolyCoeffs::linear(q.c1 / (2.0 * p), p))
    } else if q.c2.abs() <= 1e-14 * scale {
        if q.c0 < -1e-12 * scale || q.c1.abs() > 1e-7 * scale {
            None
        } else {
            Some(PolyCoeffs::constant(q.c0.max(0.0).sqrt()))
        }
    } else {
        None
    }
}

/// All `π(s) = (σ' - τ̃)/2 ± √Q_k` candidates, each with `τ` and `λ`.
pub fn pi_candidates(input: &NUInput) -> Result<Vec<NUSolution>> {
    let roots = solve_k(input)?;
    let h = input.half_difference();
    let mut out = Vec::with_capacity(4);
    for KRoot { k, residual } in roots {
        let q = under_root_quadratic(input, k);
        if residual > square_tolerance(&q) {
            continue;
        }
        let Some(root) = linear_sqrt(&q) else {
            continue;
        };
        for sign_choice in [SignChoice::Minus, SignChoice::Plus] {
            let pi = h.add(&root.scale(sign_choice.factor()));
            let tau = input.tau_tilde.add(&pi.scale(2.0));
            out.push(NUSolution {
                k,
                pi,
                sign_choice,
                tau,
                lambda: k + pi.c1,
                residual_square: residual,
                root,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::ImperfectSquare);
    }
    Ok(out)
}

/// Outcome of [`select_branch`]; rejected candidates are kept for the audit trail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSelection {
    pub chosen: NUSolution,
    pub rejected: Vec<NUSolution>,
}

/// Picks the candidate whose `τ` has a negative derivative.
///
/// Several qualifying candidates are ranked by most negative `τ'`; exact
/// ties (up to a relative 1e-9) fall back to the smaller `k`, then to the
/// minus sign.
pub fn select_branch(candidates: &[NUSolution]) -> Result<BranchSelection> {
    let mut valid: Vec<&NUSolution> = candidates.iter().filter(|c| c.tau_prime() < 0.0).collect();
    if valid.is_empty() {
        return Err(Error::NoValidBranch);
    }
    valid.sort_by(|x, y| rank(x, y));
    let chosen = *valid[0];
    let rejected = candidates.iter().filter(|c| **c != chosen).copied().collect();
    Ok(BranchSelection { chosen, rejected })
}

fn rank(x: &NUSolution, y: &NUSolution) -> std::cmp::Ordering {
    let (tx, ty) = (x.tau_prime(), y.tau_prime());
    let tie = (tx - ty).abs() <= TAU_TIE_REL * tx.abs().max(ty.abs()).max(1.0);
    if !tie {
        return tx.total_cmp(&ty);
    }
    x.k.total_cmp(&y.k).then(x.sign_choice.cmp(&y.sign_choice))
}

/// `λ_n = -n τ' - n(n-1)/2 σ''`.
pub fn lambda_n(input: &NUInput, solution: &NUSolution, n: u32) -> f64 {
    let n = n as f64;
    let sigma2 = 2.0 * input.sigma.c2;
    -n * solution.tau_prime() - 0.5 * n * (n - 1.0) * sigma2
}

/// Why the quantization condition has no value at some energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GapReason {
    InvalidInput,
    NoRealK,
    DegenerateSigma,
    ImperfectSquare,
    NoValidBranch,
}

impl GapReason {
    fn from_error(e: &Error) -> GapReason {
        match e {
            Error::NoRealK => GapReason::NoRealK,
            Error::DegenerateSigma => GapReason::DegenerateSigma,
            Error::ImperfectSquare => GapReason::ImperfectSquare,
            Error::NoValidBranch => GapReason::NoValidBranch,
            _ => GapReason::InvalidInput,
        }
    }
}

/// `λ - λ_n` on the selected branch, or a gap marker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Quantization {
    Value {
        residual: f64,
        lambda: f64,
        lambda_n: f64,
        solution: NUSolution,
    },
    BranchGap(GapReason),
}

impl Quantization {
    pub fn residual(&self) -> Option<f64> {
        match self {
            Quantization::Value { residual, .. } => Some(*residual),
            Quantization::BranchGap(_) => None,
        }
    }
}

/// Quantization residual of one input.
pub fn quantization_residual(input: &NUInput, n: u32) -> Quantization {
    let selected = pi_candidates(input).and_then(|c| select_branch(&c));
    match selected {
        Ok(sel) => {
            let lambda = sel.chosen.lambda;
            let ln = lambda_n(input, &sel.chosen, n);
            let residual = lambda - ln;
            if residual.is_finite() {
                Quantization::Value { residual, lambda, lambda_n: ln, solution: sel.chosen }
            } else {
                Quantization::BranchGap(GapReason::InvalidInput)
            }
        }
        Err(e) => Quantization::BranchGap(GapReason::from_error(&e)),
    }
}

/// Quantization residual of an energy-parameterised family of inputs.
pub fn quantization_residual_at<B>(builder: B, energy: f64, n: u32) -> Quantization
where
    B: Fn(f64) -> Result<NUInput>,
{
    match builder(energy) {
        Ok(input) => quantization_residual(&input, n),
        Err(_) => Quantization::BranchGap(GapReason::InvalidInput),
    }
}

/// Closed form of `exp(∫ N(s)/σ(s) ds)` for a linear numerator `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FactorForm {
    /// `(s - r1)^p1 (s - r2)^p2`, `r1 > r2`.
    TwoRoots { r1: f64, r2: f64, p1: f64, p2: f64 },
    /// `(s - r1)^p1 exp(exp_coeff · s)` for linear `σ`.
    SimpleRoot { r1: f64, p1: f64, exp_coeff: f64 },
    /// `(s - r)^p exp(pole_coeff / (s - r))` for `σ` with a double root.
    RepeatedRoot { r: f64, p: f64, pole_coeff: f64 },
}

/// Exponents of `φ` (from `φ'/φ = π/σ`) and `ρ` (from `(σρ)' = τρ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveFactors {
    pub phi: FactorForm,
    pub rho: FactorForm,
}

pub fn wavefactor_exponents(input: &NUInput, solution: &NUSolution) -> Result<WaveFactors> {
    let sigma = &input.sigma;
    let phi = factor_form(sigma, &solution.pi)?;
    let rho_num = solution.tau.sub(&sigma.derivative());
    let rho = factor_form(sigma, &rho_num)?;
    Ok(WaveFactors { phi, rho })
}

fn factor_form(sigma: &PolyCoeffs, num: &PolyCoeffs) -> Result<FactorForm> {
    match sigma.degree() {
        Some(2) => {
            let d = sigma.discriminant();
            let scale = sigma.c1 * sigma.c1 + (4.0 * sigma.c2 * sigma.c0).abs();
            if d.abs() <= 1e-14 * scale {
                let r = -sigma.c1 / (2.0 * sigma.c2);
                Ok(FactorForm::RepeatedRoot {
                    r,
                    p: num.c1 / sigma.c2,
                    pole_coeff: -num.eval(r) / sigma.c2,
                })
            } else if d < 0.0 {
                Err(Error::ComplexRoots)
            } else {
                let sq = d.sqrt();
                let q = -0.5 * (sigma.c1 + sigma.c1.signum() * sq);
                let (x1, x2) = if q == 0.0 {
                    (sq / (2.0 * sigma.c2), -sq / (2.0 * sigma.c2))
                } else {
                    (q / sigma.c2, sigma.c0 / q)
                };
                let (r1, r2) = if x1 >= x2 { (x1, x2) } else { (x2, x1) };
                Ok(FactorForm::TwoRoots {
                    r1,
                    r2,
                    p1: num.eval(r1) / (sigma.c2 * (r1 - r2)),
                    p2: num.eval(r2) / (sigma.c2 * (r2 - r1)),
                })
            }
        }
        Some(1) => {
            let r1 = -sigma.c0 / sigma.c1;
            Ok(FactorForm::SimpleRoot {
                r1,
                p1: num.eval(r1) / sigma.c1,
                exp_coeff: num.c1 / sigma.c1,
            })
        }
        _ => Err(Error::DomainError("sigma of degree 0 has no roots".into())),
    }
}
