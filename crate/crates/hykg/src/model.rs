//! The six-parameter Hylleraas potential and its constant cascade.
//!
//! ```text
//! V(r) = D_e [1 - (1+a)(1+c)(s+b) / ((s+a)(s+c)(1+b))],   s = exp(±2(1+K)ωr)
//! ```
//!
//! `a`, `b`, `c` are fixed by the shape parameters `K`, `k1`, `k2`. Every
//! energy-dependent constant used by the closed-form pipeline is produced by
//! [`appendix_constants`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest exponent accepted by [`s_of_r`] before reporting overflow.
const MAX_EXPONENT: f64 = 709.0;

/// Sign of the exponent in the change of variable `s = exp(±2(1+K)ωr)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SSign {
    /// `s = exp(+2(1+K)ωr)`, the convention as printed.
    #[default]
    PositiveExponent,
    /// `s = exp(-2(1+K)ωr)`, decaying with r.
    NegativeExponent,
}

impl SSign {
    pub fn factor(self) -> f64 {
        match self {
            SSign::PositiveExponent => 1.0,
            SSign::NegativeExponent => -1.0,
        }
    }
}

/// Physical inputs of the potential.
///
/// `mu` multiplies `Ē` and `E` in the transformed equation even though the
/// natural-unit convention leaves no room for a separate mass factor. It is
/// kept as a free input with default 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HylleraasParams {
    #[serde(rename = "K")]
    pub shape: f64,
    pub k1: f64,
    pub k2: f64,
    pub omega: f64,
    #[serde(rename = "D_e")]
    pub dissociation: f64,
    #[serde(rename = "M")]
    pub mass: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default)]
    pub s_sign: SSign,
}

fn default_mu() -> f64 {
    1.0
}

impl Default for HylleraasParams {
    /// `K = 2, k1 = k2 = 1, ω = 0.25, D_e = M = μ = 1` with the printed
    /// (positive) exponent.
    fn default() -> Self {
        HylleraasParams {
            shape: 2.0,
            k1: 1.0,
            k2: 1.0,
            omega: 0.25,
            dissociation: 1.0,
            mass: 1.0,
            mu: 1.0,
            s_sign: SSign::PositiveExponent,
        }
    }
}

impl HylleraasParams {
    pub fn with_sign(mut self, s_sign: SSign) -> Self {
        self.s_sign = s_sign;
        self
    }

    /// Checks every invariant and returns the derived `a`, `b`, `c`.
    ///
    /// `D_e = 0` is accepted: it is the free-particle limit used by the
    /// no-bound-state fixtures.
    pub fn validate(&self) -> Result<Abc> {
        let finite = [
            self.shape,
            self.k1,
            self.k2,
            self.omega,
            self.dissociation,
            self.mass,
            self.mu,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParams(format!("omega must be > 0, got {}", self.omega)));
        }
        if self.dissociation < 0.0 {
            return Err(Error::InvalidParams(format!(
                "D_e must be >= 0, got {}",
                self.dissociation
            )));
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidParams(format!("M must be > 0, got {}", self.mass)));
        }
        if self.mu <= 0.0 {
            return Err(Error::InvalidParams(format!("mu must be > 0, got {}", self.mu)));
        }
        if 1.0 + self.shape == 0.0 {
            return Err(Error::DegenerateParams("1 + K = 0 freezes s at 1".into()));
        }
        derive_abc(self.shape, self.k1, self.k2)
    }

    /// `2(1+K)ω`, the rate in the exponent of `s`.
    pub fn rate(&self) -> f64 {
        2.0 * (1.0 + self.shape) * self.omega
    }

    /// `(1+K)²ω²`, the denominator shared by the transformed-equation constants.
    pub fn scale2(&self) -> f64 {
        let v = (1.0 + self.shape) * self.omega;
        v * v
    }
}

/// The intermediate quantities `a`, `b`, `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Abc {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// `a = (K-k2)/(1+k2)`, `b = (K-k1+k2)/(1+k1+k2)`, `c = (K-k1)/(1+k1)`.
pub fn derive_abc(shape: f64, k1: f64, k2: f64) -> Result<Abc> {
    let den_a = 1.0 + k2;
    let den_b = 1.0 + k1 + k2;
    let den_c = 1.0 + k1;
    if den_a == 0.0 || den_b == 0.0 || den_c == 0.0 {
        return Err(Error::DegenerateParams(format!(
            "zero denominator in a/b/c (1+k2 = {den_a}, 1+k1+k2 = {den_b}, 1+k1 = {den_c})"
        )));
    }
    let abc = Abc {
        a: (shape - k2) / den_a,
        b: (shape - k1 + k2) / den_b,
        c: (shape - k1) / den_c,
    };
    if 1.0 + abc.a == 0.0 || 1.0 + abc.b == 0.0 || 1.0 + abc.c == 0.0 {
        return Err(Error::DegenerateParams(format!(
            "1+a, 1+b or 1+c vanishes (a = {}, b = {}, c = {})",
            abc.a, abc.b, abc.c
        )));
    }
    Ok(abc)
}

/// `s = exp(±2(1+K)ωr)`.
///
/// Returns [`Error::OutOfRange`] instead of infinity when the exponent would
/// overflow.
pub fn s_of_r(r: f64, shape: f64, omega: f64, s_sign: SSign) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::OutOfRange(format!("r must be >= 0, got {r}")));
    }
    let x = s_sign.factor() * 2.0 * (1.0 + shape) * omega * r;
    if x > MAX_EXPONENT {
        return Err(Error::OutOfRange(format!("s = exp({x}) overflows")));
    }
    Ok(x.exp())
}

/// The potential as a function of `s` (no overflow concerns).
pub fn potential_of_s(s: f64, abc: &Abc, dissociation: f64) -> Option<f64> {
    let Abc { a, b, c } = *abc;
    let den = (s + a) * (s + c) * (1.0 + b);
    if den == 0.0 {
        return None;
    }
    let v = dissociation * (1.0 - (1.0 + a) * (1.0 + c) * (s + b) / den);
    v.is_finite().then_some(v)
}

/// `V(r)`.
pub fn potential_v(r: f64, params: &HylleraasParams) -> Result<f64> {
    let abc = params.validate()?;
    potential_with_abc(r, params, &abc)
}

/// `V(r)` with `a`, `b`, `c` already derived; used in grid loops.
pub(crate) fn potential_with_abc(r: f64, params: &HylleraasParams, abc: &Abc) -> Result<f64> {
    let s = s_of_r(r, params.shape, params.omega, params.s_sign)?;
    potential_of_s(s, abc, params.dissociation).ok_or(Error::SingularPotential { r })
}

/// `dV/dr`, analytic.
pub fn potential_derivative(r: f64, params: &HylleraasParams, abc: &Abc) -> Result<f64> {
    let s = s_of_r(r, params.shape, params.omega, params.s_sign)?;
    let Abc { a, b, c } = *abc;
    let p = (s + a) * (s + c);
    if p == 0.0 {
        return Err(Error::SingularPotential { r });
    }
    let coef = (1.0 + a) * (1.0 + c) / (1.0 + b);
    let dv_ds = -params.dissociation * coef * (p - (s + b) * (2.0 * s + a + c)) / (p * p);
    let ds_dr = params.s_sign.factor() * params.rate() * s;
    Ok(dv_ds * ds_dr)
}

/// Every constant of the transformed equation at a trial energy `E`.
///
/// Several symbols of the reference derivation have two printed forms. The
/// explicit parameter-level forms are the primary fields; the alternative
/// readings (`beta2_direct`, `gamma2_direct`, `a_from_lambda`,
/// `b_from_lambda`, `delta2`) are stored alongside for the audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppendixConstants {
    pub energy: f64,
    /// `Ē = E² - M²`
    pub ebar: f64,
    /// `V̄ = 2 D_e (E + M)`
    pub vbar: f64,
    pub eps2: f64,
    pub beta2: f64,
    pub gamma2: f64,
    pub betap2: f64,
    pub gammap2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub lam1: f64,
    pub lam2: f64,
    pub lam3: f64,
    pub lam4: f64,
    /// `Λ3² + 12 Λ1`
    pub delta2: f64,
    /// The explicit polynomial `δ` (not the square root of `delta2`).
    pub delta_explicit: f64,
    pub a_const: f64,
    pub b_const: f64,
    /// `(δ (ε² + A))²` with the explicit `δ`.
    pub u2: f64,
    /// `A² - B`
    pub v2: f64,
    pub beta2_direct: f64,
    pub gamma2_direct: f64,
    /// `(2Λ2α3 + 16Λ1α1² + 16Λ1ξ1)/δ²` with `δ² = Λ3² + 12Λ1`.
    pub a_from_lambda: f64,
    /// `(Λ2² - 4Λ1Λ4)/δ²` with `δ² = Λ3² + 12Λ1`.
    pub b_from_lambda: f64,
}

/// Evaluates the constant cascade at energy `E`.
pub fn appendix_constants(params: &HylleraasParams, energy: f64) -> Result<AppendixConstants> {
    let abc = params.validate()?;
    Ok(appendix_constants_with_abc(params, &abc, energy))
}

pub(crate) fn appendix_constants_with_abc(
    params: &HylleraasParams,
    abc: &Abc,
    energy: f64,
) -> AppendixConstants {
    let Abc { a, b, c } = *abc;
    let m = params.mass;
    let mu = params.mu;
    let sc = params.scale2();
    let ebar = energy * energy - m * m;
    let vbar = 2.0 * params.dissociation * (energy + m);
    let opa = 1.0 + a;
    let opb = 1.0 + b;
    let opc = 1.0 + c;

    let eps2 = -2.0 * mu * opb * ebar / sc;
    let betap2 = opa * opc * vbar / sc;
    let gammap2 = opb * opa * opc * vbar / sc;
    let beta2 = eps2 - betap2;
    let gamma2 = eps2 - gammap2;
    let beta2_direct = (2.0 * mu * opb * (a + c) * energy - opa * opc * vbar) / sc;
    let gamma2_direct = (2.0 * opb * energy - opa * opc * vbar) / sc;

    let alpha1 = opb;
    let alpha2 = 2.0 * opb * (a + c);
    let alpha3 = 2.0 * a * c * opb;

    let xi1 = 2.0 * a * opb * opb - betap2;
    let xi2 = a * a * opb * opb - gammap2;

    let lam1 = 4.0 * opb * opb * (a * a - 14.0 * a * c + c * c);
    let lam2 = 4.0 * a * opb.powi(3) * (2.0 * a - c + 1.0)
        - 2.0 * opa * opb * opc * (4.0 * b - 3.0) * vbar / sc;
    let lam3 = 4.0 * opb * (a + c - 2.0 * a * c - 2.0);
    let lam4 = betap2 * (b * opb * opb + betap2);

    let delta2 = lam3 * lam3 + 12.0 * lam1;
    let delta_explicit = 64.0
        * opb
        * opb
        * (a * (1.0 - c) - a * (8.0 * c + 1.0) + c * c * (1.0 - a) + a + 4.0);

    // Shared denominator of the explicit A and B.
    let q = a * a - a * a * c - 8.0 * a * c - a + 4.0 - a * c * c - c + c * c;
    let den_ab = 1024.0 * opb * opb * q * q;
    let p1 = 16.0 * a.powi(3) + 12.0 * a * a * c - a * a * c * c - 63.0 * a * a * c + 8.0 * a * a
        - 12.0 * a * c
        + 16.0 * a * c * c
        + 8.0 * c * c;
    let p2 = 16.0 * a * a + 4.0 * b * c - a * c * c - 64.0 * a * c + 16.0 * c * c;
    // The printed numerator has no operator between its V̄-free and V̄ parts;
    // read as a difference, like the neighbouring B.
    let a_const = (2.0 * opb * opb * p1 - opa * opc / sc * p2 * vbar) / den_ab;
    let b_const = (a * opb.powi(4) * (2.0 * a - c + 1.0)
        - 2.0 * opb * opb * opc * vbar / sc
            * (2.0 * a * a * b + 2.0 * b * c * c - 28.0 * a * b * c + 4.0 * a * b - 3.0 * a)
        + betap2 * betap2 * (16.0 * b * b - 4.0 * a * a * c * c - 56.0 * a * c + a - 24.0 * b))
        / den_ab;

    let a_from_lambda = (2.0 * lam2 * alpha3 + 16.0 * lam1 * alpha1 * alpha1 + 16.0 * lam1 * xi1) / delta2;
    let b_from_lambda = (lam2 * lam2 - 4.0 * lam1 * lam4) / delta2;

    let u = delta_explicit * (eps2 + a_const);
    AppendixConstants {
        energy,
        ebar,
        vbar,
        eps2,
        beta2,
        gamma2,
        betap2,
        gammap2,
        alpha1,
        alpha2,
        alpha3,
        xi1,
        xi2,
        lam1,
        lam2,
        lam3,
        lam4,
        delta2,
        delta_explicit,
        a_const,
        b_const,
        u2: u * u,
        v2: a_const * a_const - b_const,
        beta2_direct,
        gamma2_direct,
        a_from_lambda,
        b_from_lambda,
    }
}

/// A stationary point of a sampled function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub r: f64,
    pub value: f64,
}

/// Stationary points of `V` on `[0, r_max]`.
///
/// Detection uses sign changes of a central-difference derivative on
/// `n_samples` points; each hit is refined by bisection on the analytic
/// derivative until `|V'| < 1e-10 D_e ω`.
pub fn potential_extrema(
    params: &HylleraasParams,
    r_max: f64,
    n_samples: usize,
) -> Result<Vec<Extremum>> {
    let abc = params.validate()?;
    let v = |r: f64| potential_with_abc(r, params, &abc).ok();
    let dv = |r: f64| potential_derivative(r, params, &abc).ok();
    let tol = 1e-10 * params.dissociation.max(f64::MIN_POSITIVE) * params.omega;
    find_extrema(v, dv, r_max, n_samples, tol)
}

/// Generic stationary-point finder behind [`potential_extrema`].
///
/// `f` and `df` return `None` where the function is undefined; sign changes
/// touching such points are skipped.
pub fn find_extrema<F, D>(
    f: F,
    df: D,
    r_max: f64,
    n_samples: usize,
    tol: f64,
) -> Result<Vec<Extremum>>
where
    F: Fn(f64) -> Option<f64>,
    D: Fn(f64) -> Option<f64>,
{
    if !(r_max > 0.0) {
        return Err(Error::InvalidParams(format!("r_max must be > 0, got {r_max}")));
    }
    if n_samples < 100 {
        return Err(Error::InvalidParams(format!(
            "need at least 100 samples, got {n_samples}"
        )));
    }
    let h = r_max / (n_samples - 1) as f64;
    let values: Vec<Option<f64>> = (0..n_samples).map(|i| f(i as f64 * h)).collect();
    let slope: Vec<Option<f64>> = (1..n_samples - 1)
        .map(|i| match (values[i - 1], values[i + 1]) {
            (Some(lo), Some(hi)) => Some((hi - lo) / (2.0 * h)),
            _ => None,
        })
        .collect();

    let mut out = Vec::new();
    for w in 0..slope.len().saturating_sub(1) {
        let (Some(d0), Some(d1)) = (slope[w], slope[w + 1]) else {
            continue;
        };
        if d0 == 0.0 || d0.signum() == d1.signum() {
            continue;
        }
        // slope[w] sits at sample w + 1; widen by one sample on each side so
        // the analytic derivative brackets the zero too.
        let mut lo = w as f64 * h;
        let mut hi = ((w + 3).min(n_samples - 1)) as f64 * h;
        let (Some(mut dlo), Some(dhi)) = (df(lo), df(hi)) else {
            continue;
        };
        let mut mid = 0.5 * (lo + hi);
        if dlo == 0.0 {
            mid = lo;
        } else if dhi == 0.0 {
            mid = hi;
        } else if dlo.signum() != dhi.signum() {
            for _ in 0..200 {
                mid = 0.5 * (lo + hi);
                let Some(dm) = df(mid) else { break };
                if dm.abs() < tol || hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
                    break;
                }
                if dm.signum() == dlo.signum() {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
            }
        }
        if let Some(value) = f(mid) {
            out.push(Extremum { r: mid, value });
        }
    }
    Ok(out)
}
