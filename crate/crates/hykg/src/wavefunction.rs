//! Closed-form radial wavefunctions: exponents, Jacobi/Rodrigues polynomial
//! part, assembly on a grid, normalization and node counting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{appendix_constants_with_abc, potential_with_abc, s_of_r, Abc, HylleraasParams};
use crate::pipeline::EnergyLevel;
use crate::quad::simpson;

/// Largest order evaluated through the Leibniz expansion.
pub const RODRIGUES_MAX_N: u32 = 12;

/// Exponents of the closed-form wavefunction at one energy.
///
/// `d` is the printed reading `(1 - (μJ c + νJ)) / (α1 (c - a))`;
/// `d_symmetric` is `-(μJ c + νJ) / (2 α1 (c - a))`, the reading that
/// mirrors `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavefactorParams {
    pub d: f64,
    pub d_symmetric: f64,
    pub f: f64,
    pub mu_j: f64,
    pub nu_j: f64,
}

/// Which reading of `D` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DReading {
    Printed,
    Symmetric,
}

/// Placement of the exponents on the two base factors: `Standard` is
/// `(s+a)^{D/2} (s+c)^{F/2}`, `Swapped` is `(s+a)^{F/2} (s+c)^{D/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Placement {
    Standard,
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WaveVariant {
    pub reading: DReading,
    pub placement: Placement,
}

impl WaveVariant {
    pub const DEFAULT: WaveVariant =
        WaveVariant { reading: DReading::Printed, placement: Placement::Standard };

    pub const ALL: [WaveVariant; 4] = [
        WaveVariant { reading: DReading::Printed, placement: Placement::Standard },
        WaveVariant { reading: DReading::Printed, placement: Placement::Swapped },
        WaveVariant { reading: DReading::Symmetric, placement: Placement::Standard },
        WaveVariant { reading: DReading::Symmetric, placement: Placement::Swapped },
    ];

    pub fn label(self) -> &'static str {
        match (self.reading, self.placement) {
            (DReading::Printed, Placement::Standard) => "printed_standard",
            (DReading::Printed, Placement::Swapped) => "printed_swapped",
            (DReading::Symmetric, Placement::Standard) => "symmetric_standard",
            (DReading::Symmetric, Placement::Swapped) => "symmetric_swapped",
        }
    }
}

impl WavefactorParams {
    pub fn d_for(&self, reading: DReading) -> f64 {
        match reading {
            DReading::Printed => self.d,
            DReading::Symmetric => self.d_symmetric,
        }
    }
}

pub fn exponents_df(params: &HylleraasParams, energy: f64) -> Result<WavefactorParams> {
    let abc = params.validate()?;
    exponents_with(params, &abc, energy)
}

pub(crate) fn exponents_with(params: &HylleraasParams, abc: &Abc, energy: f64) -> Result<WavefactorParams> {
    let Abc { a, c, .. } = *abc;
    if a == c {
        return Err(Error::DegenerateAC);
    }
    let k = appendix_constants_with_abc(params, abc, energy);
    if k.v2 < 0.0 {
        return Err(Error::NotRepresentable("A^2 - B < 0".into()));
    }
    let inner = k.delta_explicit * (k.eps2 + k.a_const);
    let root = k.v2.sqrt();
    let (mu2, nu2) = (inner + root, inner - root);
    if mu2 < 0.0 || nu2 < 0.0 {
        return Err(Error::NotRepresentable(format!(
            "negative radicand (muJ^2 = {mu2:e}, nuJ^2 = {nu2:e})"
        )));
    }
    let (mu_j, nu_j) = (mu2.sqrt(), nu2.sqrt());
    let a1 = k.alpha1;
    Ok(WavefactorParams {
        d: (1.0 - (mu_j * c + nu_j)) / (a1 * (c - a)),
        d_symmetric: -(mu_j * c + nu_j) / (2.0 * a1 * (c - a)),
        f: (mu_j * a + nu_j) / (2.0 * a1 * (c - a)),
        mu_j,
        nu_j,
    })
}

/// `true` when both Jacobi parameters exceed -1 (the orthogonality range).
pub fn jacobi_is_classical(alpha: f64, beta: f64) -> bool {
    alpha > -1.0 && beta > -1.0
}

/// `P_n^{(α,β)}(x)` by the three-term recurrence in `n`.
pub fn jacobi_p(n: u32, alpha: f64, beta: f64, x: f64) -> f64 {
    let p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let ab = alpha + beta;
    let p1 = 0.5 * ((ab + 2.0) * x + (alpha - beta));
    let (mut pm, mut p) = (p0, p1);
    for k in 2..=n {
        let k = k as f64;
        let t = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (t - 2.0);
        let a2 = (t - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (t - 2.0) * (t - 1.0) * t;
        let a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * t;
        let next = ((a2 + a3 * x) * p - a4 * pm) / a1;
        pm = p;
        p = next;
    }
    p
}

fn falling(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x - i as f64))
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(s+a)^{-D} (s+c)^{-F} dⁿ/dsⁿ[(s+a)^{n+D} (s+c)^{n+F}]` by the Leibniz rule.
pub fn rodrigues_chi(n: u32, d: f64, f: f64, a: f64, c: f64, s: f64) -> Result<f64> {
    if n > RODRIGUES_MAX_N {
        return Err(Error::DomainError(format!("order {n} exceeds {RODRIGUES_MAX_N}")));
    }
    let (sa, sc) = (s + a, s + c);
    if !(sa > 0.0 && sc > 0.0) {
        return Err(Error::DomainError(format!("s + a = {sa}, s + c = {sc} must be positive")));
    }
    let nf = n as f64;
    Ok((0..=n)
        .map(|j| {
            binomial(n, j)
                * falling(nf + d, n - j)
                * falling(nf + f, j)
                * sa.powi(j as i32)
                * sc.powi((n - j) as i32)
        })
        .sum())
}

/// `x = (2s + a + c)/(c - a)`: sends the root `s = -a` of `σ` to `x = 1`
/// and `s = -c` to `x = -1`, so the `(s+a)` exponent pairs with `α`.
pub fn jacobi_argument(s: f64, a: f64, c: f64) -> f64 {
    (2.0 * s + a + c) / (c - a)
}

/// `χ_n(s) = n! (c - a)ⁿ P_n^{(D,F)}(x)`; the constant relating the
/// Rodrigues form to the recurrence.
pub fn rodrigues_constant(n: u32, a: f64, c: f64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64 * (c - a))
}

/// The polynomial part at `s`: Leibniz form up to [`RODRIGUES_MAX_N`], the
/// recurrence (with the same normalization) above it.
pub fn polynomial_part(n: u32, d: f64, f: f64, a: f64, c: f64, s: f64) -> Result<f64> {
    if n <= RODRIGUES_MAX_N {
        rodrigues_chi(n, d, f, a, c, s)
    } else {
        Ok(rodrigues_constant(n, a, c) * jacobi_p(n, d, f, jacobi_argument(s, a, c)))
    }
}

/// `R(r) = [a + s]^{D/2} [c + s]^{F/2} χ_n(s)` with `s = s(r)`.
pub fn radial_r(
    params: &HylleraasParams,
    wf: &WavefactorParams,
    n: u32,
    variant: WaveVariant,
    r: f64,
) -> Result<f64> {
    let abc = params.validate()?;
    radial_with(params, &abc, wf, n, variant, r)
}

fn radial_with(
    params: &HylleraasParams,
    abc: &Abc,
    wf: &WavefactorParams,
    n: u32,
    variant: WaveVariant,
    r: f64,
) -> Result<f64> {
    let s = s_of_r(r, params.shape, params.omega, params.s_sign)?;
    let d = wf.d_for(variant.reading);
    let (ea, ec) = match variant.placement {
        Placement::Standard => (d, wf.f),
        Placement::Swapped => (wf.f, d),
    };
    let chi = polynomial_part(n, d, wf.f, abc.a, abc.c, s)?;
    let value = (abc.a + s).powf(0.5 * ea) * (abc.c + s).powf(0.5 * ec) * chi;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::OutOfRange(format!("R({r}) is not finite")))
    }
}

/// Samples of a radial function on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialFunction {
    pub level: EnergyLevel,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub norm_constant: f64,
    pub node_count: usize,
}

impl RadialFunction {
    pub fn new(level: EnergyLevel, grid: Vec<f64>, values: Vec<f64>) -> Self {
        let node_count = count_nodes(&values);
        RadialFunction { level, grid, values, norm_constant: 1.0, node_count }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `|R(r_min)| / max|R|`, small for a regular solution.
    pub fn regularity_ratio(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            0.0
        } else {
            self.values.first().map_or(0.0, |v| v.abs() / m)
        }
    }
}

/// Closed-form `R` on `grid` for `level`, unnormalized.
pub fn closed_form_radial(
    params: &HylleraasParams,
    level: &EnergyLevel,
    variant: WaveVariant,
    grid: &[f64],
) -> Result<RadialFunction> {
    let abc = params.validate()?;
    let wf = exponents_with(params, &abc, level.energy)?;
    let values = grid
        .iter()
        .map(|&r| radial_with(params, &abc, &wf, level.n, variant, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialFunction::new(level.clone(), grid.to_vec(), values))
}

/// Uniform spacing of `grid`, or `InvalidGrid`.
pub fn uniform_step(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::InvalidGrid("fewer than two points".into()));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
    }
    let uniform = grid
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.max(w[1].abs()));
    if uniform {
        Ok(h)
    } else {
        Err(Error::InvalidGrid("grid is not uniform".into()))
    }
}

/// Outer-tail threshold of [`normalize`], relative to `max|R|`.
pub const TAIL_TOL: f64 = 1e-8;

/// Scales `R` to unit `∫|R|² dr` (composite Simpson on the stored grid).
///
/// The outer end must have decayed below [`TAIL_TOL`]·max|R|; otherwise
/// the integral is truncated and `TailNotConverged` is returned.
pub fn normalize(radial: RadialFunction) -> Result<RadialFunction> {
    let h = uniform_step(&radial.grid)?;
    let m = radial.max_abs();
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::NotRepresentable("zero or non-finite samples".into()));
    }
    let tail = radial.values.last().map_or(0.0, |v| v.abs()) / m;
    if tail >= TAIL_TOL {
        return Err(Error::TailNotConverged { ratio: tail });
    }
    let sq: Vec<f64> = radial.values.iter().map(|v| v * v).collect();
    let norm = simpson(&sq, h);
    let scale = 1.0 / norm.sqrt();
    let values: Vec<f64> = radial.values.iter().map(|v| v * scale).collect();
    Ok(RadialFunction { norm_constant: scale, node_count: count_nodes(&values), values, ..radial })
}

/// Strict sign changes, ignoring samples below 1e-9·max|R|.
pub fn count_nodes(values: &[f64]) -> usize {
    let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let band = 1e-9 * m;
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &v in values {
        if v.abs() <= band {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            nodes += 1;
        }
        last = v;
    }
    nodes
}

/// `|⟨u, v⟩| / (‖u‖ ‖v‖)` on a shared uniform grid.
pub fn overlap(grid: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
    let h = uniform_step(grid)?;
    if u.len() != grid.len() || v.len() != grid.len() {
        return Err(Error::InvalidGrid("sample count differs from grid".into()));
    }
    let uv: Vec<f64> = u.iter().zip(v).map(|(x, y)| x * y).collect();
    let uu: Vec<f64> = u.iter().map(|x| x * x).collect();
    let vv: Vec<f64> = v.iter().map(|x| x * x).collect();
    let denom = (simpson(&uu, h) * simpson(&vv, h)).sqrt();
    if denom == 0.0 {
        return Err(Error::NotRepresentable("zero norm".into()));
    }
    Ok(simpson(&uv, h).abs() / denom)
}

/// Relative residual of `R'' + (Ē - W) R = 0`, `W = 2(E + M) V`, on the
/// interior of a uniform grid (second differences):
/// `‖R'' + (Ē - W)R‖ / (‖R''‖ + ‖(Ē - W)R‖)`.
pub fn ode_residual(params: &HylleraasParams, energy: f64, grid: &[f64], values: &[f64]) -> Result<f64> {
    let abc = params.validate()?;
    let h = uniform_step(grid)?;
    if values.len() != grid.len() || grid.len() < 3 {
        return Err(Error::InvalidGrid("need matching samples on at least three points".into()));
    }
    let ebar = energy * energy - params.mass * params.mass;
    let (mut num, mut d2n, mut potn) = (0.0, 0.0, 0.0);
    for i in 1..grid.len() - 1 {
        let d2 = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
        let v = potential_with_abc(grid[i], params, &abc)?;
        let w = 2.0 * (energy + params.mass) * v;
        let term = (ebar - w) * values[i];
        num += (d2 + term).powi(2);
        d2n += d2 * d2;
        potn += term * term;
    }
    let denom = d2n.sqrt() + potn.sqrt();
    let out = if denom == 0.0 { 0.0 } else { num.sqrt() / denom };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::OutOfRange("residual is not finite".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::Engine;

    #[test]
    fn jacobi_low_orders() {
        assert_eq!(jacobi_p(0, 0.3, -0.7, 0.4), 1.0);
        assert_eq!(jacobi_p(1, 0.0, 0.0, 0.37), 0.37);
        // Legendre P_2.
        let x = 0.3;
        assert!((jacobi_p(2, 0.0, 0.0, x) - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn rodrigues_first_order_by_hand() {
        let (d, f, a, c, s) = (0.3, -0.2, 0.5, 1.5, 2.0);
        let want = (1.0 + d) * (s + c) + (1.0 + f) * (s + a);
        assert!((rodrigues_chi(1, d, f, a, c, s).unwrap() - want).abs() < 1e-14);
        assert_eq!(rodrigues_chi(0, d, f, a, c, s).unwrap(), 1.0);
    }

    #[test]
    fn rodrigues_rejects_bad_domain_and_order() {
        assert!(matches!(rodrigues_chi(2, 0.1, 0.1, -3.0, 0.0, 1.0), Err(Error::DomainError(_))));
        assert!(matches!(rodrigues_chi(13, 0.1, 0.1, 0.0, 0.0, 1.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn degenerate_ac_is_reported() {
        let p = HylleraasParams::default();
        assert_eq!(exponents_df(&p, 0.5), Err(Error::DegenerateAC));
    }

    #[test]
    fn nodes_of_simple_shapes() {
        assert_eq!(count_nodes(&[1.0, 2.0, 0.5]), 0);
        let l = 1.0;
        let v: Vec<f64> = (0..=200)
            .map(|i| (3.0 * std::f64::consts::PI * i as f64 / 200.0 / l).sin())
            .collect();
        assert_eq!(count_nodes(&v), 2);
    }

    fn level() -> EnergyLevel {
        EnergyLevel::new(0, 0.0, 1.0, Engine::Oracle, 0.0)
    }

    fn gaussian(scale: f64) -> RadialFunction {
        let grid: Vec<f64> = (0..=2400).map(|i| 12.0 * i as f64 / 2400.0).collect();
        let values = grid.iter().map(|r| scale * (-0.5 * r * r).exp()).collect();
        RadialFunction::new(level(), grid, values)
    }

    #[test]
    fn gaussian_normalization_matches_analytic() {
        let rf = normalize(gaussian(1.0)).unwrap();
        let want = (std::f64::consts::PI.sqrt() / 2.0).powf(-0.5);
        assert!((rf.norm_constant - want).abs() < 1e-8 * want);
    }

    #[test]
    fn normalization_is_idempotent_and_linear() {
        let once = normalize(gaussian(1.0)).unwrap();
        let twice = normalize(once.clone()).unwrap();
        assert!((twice.norm_constant - 1.0).abs() < 1e-10);
        let seven = normalize(gaussian(7.0)).unwrap();
        assert!((seven.norm_constant - once.norm_constant / 7.0).abs() < 1e-12);
    }

    #[test]
    fn growing_tail_is_reported() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let values = grid.iter().map(|r| r.exp()).collect();
        let err = normalize(RadialFunction::new(level(), grid, values)).unwrap_err();
        assert!(matches!(err, Error::TailNotConverged { .. }));
    }

    #[test]
    fn overlap_of_function_with_itself_is_one() {
        let g = gaussian(3.0);
        assert!((overlap(&g.grid, &g.values, &g.values).unwrap() - 1.0).abs() < 1e-14);
    }
}
