//! Numerical ground truth for the radial problem.
//!
//! With equal scalar and vector potentials the radial equation reads
//! `-R'' + W(r) R = Ē R` with `W = 2(E + M) V` and `Ē = E² - M²`. For a
//! fixed trial `E` this is a linear eigenproblem; the physical levels are the
//! energies where its `n`-th eigenvalue equals `E² - M²`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{potential_with_abc, Abc, HylleraasParams};
use crate::pipeline::{Engine, EnergyLevel, LevelFlag};
use crate::wavefunction::count_nodes;

/// Uniform interior grid `r_i = r_min + i·h`, `i = 0..n`, with Dirichlet
/// conditions one step beyond each end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
}

impl RadialGrid {
    pub const MIN_POINTS: usize = 200;
    pub const DEFAULT_POINTS: usize = 4000;

    pub fn new(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGrid(format!("{n} points is too few")));
        }
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::InvalidGrid(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
        }
        Ok(RadialGrid { r_min, r_max, n })
    }

    /// Half line `(0, r_max]`: `h = r_max / n`, first point at `h`, so the
    /// regular boundary condition `R(0) = 0` sits one step inside.
    pub fn half_line(r_max: f64, n: usize) -> Result<Self> {
        let h = r_max / n as f64;
        RadialGrid::new(h, r_max, n)
    }

    /// Interior of the box `[0, L]` with both walls one step outside the grid.
    pub fn box_interior(length: f64, n: usize) -> Result<Self> {
        let h = length / (n + 1) as f64;
        RadialGrid::new(h, length - h, n)
    }

    /// Default grid for a parameter set: `r_max = 30/((1+K)ω)`, 4000 points.
    pub fn for_params(params: &HylleraasParams) -> Result<Self> {
        let rate = ((1.0 + params.shape) * params.omega).abs();
        RadialGrid::half_line(30.0 / rate, Self::DEFAULT_POINTS)
    }

    /// Halves the step while keeping both Dirichlet walls in place, so
    /// successive refinements differ only by discretization error.
    pub fn refined(&self) -> Result<Self> {
        let h = self.h();
        RadialGrid::new(self.r_min - h / 2.0, self.r_max + h / 2.0, 2 * self.n + 1)
    }

    pub fn h(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.r_max } else { self.r_min + h * i as f64 })
            .collect()
    }

    /// Heuristic warnings: few points or a short tail.
    pub fn warnings(&self, params: &HylleraasParams) -> Vec<String> {
        let mut out = Vec::new();
        if self.n < Self::MIN_POINTS {
            out.push(format!("grid has {} points (< {})", self.n, Self::MIN_POINTS));
        }
        let reach = self.r_max * ((1.0 + params.shape) * params.omega).abs();
        if reach < 20.0 {
            out.push(format!("r_max·(1+K)ω = {reach:.3} < 20; tail may be truncated"));
        }
        out
    }
}

/// Symmetric tridiagonal operator `-d²/dr² + W` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveProblem {
    pub e_param: f64,
    pub h: f64,
    pub potential: Vec<f64>,
    pub diagonal: Vec<f64>,
    pub offdiagonal: f64,
}

impl EffectiveProblem {
    /// Operator with an arbitrary sampled `W`.
    pub fn from_potential(grid: &RadialGrid, e_param: f64, w: Vec<f64>) -> Result<Self> {
        if w.len() != grid.n {
            return Err(Error::InvalidGrid("potential length differs from grid".into()));
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid("non-finite effective potential".into()));
        }
        let h = grid.h();
        let diagonal = w.iter().map(|x| 2.0 / (h * h) + x).collect();
        Ok(EffectiveProblem { e_param, h, potential: w, diagonal, offdiagonal: -1.0 / (h * h) })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &RadialGrid, e_param: f64, w: F) -> Result<Self> {
        let w = grid.points().into_iter().map(w).collect();
        Self::from_potential(grid, e_param, w)
    }

    /// General scalar/vector coupling: `W = S² - V² + 2(E V + M S)`.
    pub fn scalar_vector<S, V>(grid: &RadialGrid, e_param: f64, mass: f64, scalar: S, vector: V) -> Result<Self>
    where
        S: Fn(f64) -> Result<f64>,
        V: Fn(f64) -> Result<f64>,
    {
        let w = grid
            .points()
            .into_iter()
            .map(|r| {
                let (s, v) = (scalar(r)?, vector(r)?);
                Ok(s * s - v * v + 2.0 * (e_param * v + mass * s))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_potential(grid, e_param, w)
    }

    /// Equal scalar and vector Hylleraas potential: `W = 2(E + M) V`.
    pub fn hylleraas(params: &HylleraasParams, e_param: f64, grid: &RadialGrid) -> Result<Self> {
        let abc = params.validate()?;
        let v = hylleraas_samples(params, &abc, grid)?;
        Ok(Self::from_samples(grid, e_param, 2.0 * (e_param + params.mass), &v))
    }

    fn from_samples(grid: &RadialGrid, e_param: f64, factor: f64, v: &[f64]) -> Self {
        let h = grid.h();
        let potential: Vec<f64> = v.iter().map(|x| factor * x).collect();
        let diagonal = potential.iter().map(|x| 2.0 / (h * h) + x).collect();
        EffectiveProblem { e_param, h, potential, diagonal, offdiagonal: -1.0 / (h * h) }
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence of `T - x`).
    pub fn count_below(&self, x: f64) -> usize {
        let b2 = self.offdiagonal * self.offdiagonal;
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + self.offdiagonal.abs());
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in self.diagonal.iter().enumerate() {
            d = if i == 0 { a - x } else { a - x - b2 / d };
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let b = 2.0 * self.offdiagonal.abs();
        let lo = self.diagonal.iter().fold(f64::INFINITY, |m, &a| m.min(a)) - b;
        let hi = self.diagonal.iter().fold(f64::NEG_INFINITY, |m, &a| m.max(a)) + b;
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection on the count.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-12 * mid.abs().max(1.0) * 1e-3 {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `m` smallest eigenvalues, ascending.
    pub fn eigenvalues(&self, m: usize) -> Vec<f64> {
        (0..m.min(self.len())).map(|k| self.eigenvalue(k)).collect()
    }

    /// Eigenvector for an eigenvalue by inverse iteration, normalized to
    /// `h Σ y² = 1` and signed so the first significant sample is positive.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let shift = lambda + 1e-10 * lambda.abs().max(1e-3);
        let mut y = vec![1.0; n];
        for _ in 0..4 {
            y = self.solve_shifted(shift, &y);
            let norm = (y.iter().map(|v| v * v).sum::<f64>() * self.h).sqrt();
            if norm > 0.0 && norm.is_finite() {
                y.iter_mut().for_each(|v| *v /= norm);
            }
        }
        let m = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(first) = y.iter().find(|v| v.abs() > 1e-6 * m) {
            if *first < 0.0 {
                y.iter_mut().for_each(|v| *v = -*v);
            }
        }
        y
    }

    /// Solves `(T - shift) x = rhs` (Thomas algorithm).
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let b = self.offdiagonal;
        let tiny = 1e-300;
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = self.diagonal[0] - shift;
        if piv == 0.0 {
            piv = tiny;
        }
        c[0] = b / piv;
        d[0] = rhs[0] / piv;
        for i in 1..n {
            let mut p = self.diagonal[i] - shift - b * c[i - 1];
            if p == 0.0 {
                p = tiny;
            }
            c[i] = b / p;
            d[i] = (rhs[i] - b * d[i - 1]) / p;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }
}

fn hylleraas_samples(params: &HylleraasParams, abc: &Abc, grid: &RadialGrid) -> Result<Vec<f64>> {
    grid.points().into_iter().map(|r| potential_with_abc(r, params, abc)).collect()
}

/// The `m` smallest eigenvalues `Ē` of `-d²/dr² + 2(E + M)V` at `E = e_param`.
pub fn effective_eigen(params: &HylleraasParams, e_param: f64, grid: &RadialGrid, m: usize) -> Result<Vec<f64>> {
    Ok(EffectiveProblem::hylleraas(params, e_param, grid)?.eigenvalues(m))
}

/// Outer root-finding protocol of [`solve_relativistic`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSettings {
    /// Initial scan points over `(-M, M)`.
    pub seeds: usize,
    /// Bisection tolerance relative to `M`.
    pub e_tol_rel: f64,
    /// Relative offset of the scan ends from `±M`.
    pub edge_rel: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings { seeds: 64, e_tol_rel: 1e-10, edge_rel: 1e-12 }
    }
}

/// Residual tolerance of oracle levels, relative to `max(M², |Ē|)`.
pub const ORACLE_TOL: f64 = 1e-8;

/// Samples `g` at the scan points, halving any interval whose change is
/// more than ten times what its neighbours' slopes predict.
fn adaptive_scan<G: Fn(f64) -> Result<f64>>(g: &G, lo: f64, hi: f64, seeds: usize) -> Result<Vec<(f64, f64)>> {
    let seeds = seeds.max(2);
    let step = (hi - lo) / (seeds - 1) as f64;
    let mut pts: Vec<(f64, f64)> = (0..seeds)
        .map(|i| {
            let x = if i + 1 == seeds { hi } else { lo + step * i as f64 };
            g(x).map(|v| (x, v))
        })
        .collect::<Result<_>>()?;
    for _ in 0..6 {
        let mut refine = Vec::new();
        for i in 0..pts.len() - 1 {
            let jump = (pts[i + 1].1 - pts[i].1).abs();
            let width = pts[i + 1].0 - pts[i].0;
            let mut slopes = Vec::new();
            if i > 0 {
                slopes.push((pts[i].1 - pts[i - 1].1).abs() / (pts[i].0 - pts[i - 1].0));
            }
            if i + 2 < pts.len() {
                slopes.push((pts[i + 2].1 - pts[i + 1].1).abs() / (pts[i + 2].0 - pts[i + 1].0));
            }
            if let Some(local) = slopes.into_iter().reduce(f64::max) {
                if jump > 10.0 * local * width && jump > 1e-12 {
                    refine.push(0.5 * (pts[i].0 + pts[i + 1].0));
                }
            }
        }
        if refine.is_empty() {
            break;
        }
        for x in refine {
            pts.push((x, g(x)?));
        }
        pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    }
    Ok(pts)
}

fn bisect_result<G: Fn(f64) -> Result<f64>>(g: &G, mut a: f64, mut b: f64, mut ga: f64, tol: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= tol || m <= a || m >= b {
            break;
        }
        let gm = g(m)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// A relativistic oracle level with its eigenvector on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleState {
    pub level: EnergyLevel,
    pub grid: Vec<f64>,
    pub vector: Vec<f64>,
}

/// The lowest `E ∈ (-M, M)` with `Ē_n(E) = E² - M²`.
pub fn solve_relativistic(params: &HylleraasParams, n: u32, grid: &RadialGrid) -> Result<EnergyLevel> {
    oracle_state(params, n, grid, &OracleSettings::default()).map(|s| s.level)
}

/// [`solve_relativistic`] with explicit settings, returning the eigenvector.
///
/// Levels whose eigenvalue lies above the effective potential at the outer
/// grid edge do not decay there; they are box-quantized continuum states and
/// carry `Unconfined`. A node count different from `n` sets `NodeMismatch`.
pub fn oracle_state(
    params: &HylleraasParams,
    n: u32,
    grid: &RadialGrid,
    settings: &OracleSettings,
) -> Result<OracleState> {
    let abc = params.validate()?;
    let v = hylleraas_samples(params, &abc, grid)?;
    let m = params.mass;
    let k = n as usize;
    if k >= grid.n {
        return Err(Error::InvalidGrid(format!("grid has no eigenvalue index {n}")));
    }
    let problem = |e: f64| EffectiveProblem::from_samples(grid, e, 2.0 * (e + m), &v);
    let g = |e: f64| Ok(problem(e).eigenvalue(k) - (e * e - m * m));
    let edge = m * (1.0 - settings.edge_rel);
    let pts = adaptive_scan(&g, -edge, edge, settings.seeds)?;
    let bracket = pts.windows(2).find(|w| w[0].1 == 0.0 || w[0].1.signum() != w[1].1.signum());
    let Some(w) = bracket else {
        return Err(Error::NoRoot(format!("no bound state with index {n} in (-M, M)")));
    };
    let e = if w[0].1 == 0.0 {
        w[0].0
    } else {
        bisect_result(&g, w[0].0, w[1].0, w[0].1, settings.e_tol_rel * m)?
    };
    let p = problem(e);
    let ebar_n = p.eigenvalue(k);
    let residual = (ebar_n - (e * e - m * m)).abs();
    let mut level = EnergyLevel::new(n, e, m, Engine::Oracle, residual);
    let vector = p.eigenvector(ebar_n);
    if count_nodes(&vector) != k {
        level.flags.insert(LevelFlag::NodeMismatch);
    }
    if ebar_n >= *p.potential.last().expect("grid is nonempty") {
        level.flags.insert(LevelFlag::Unconfined);
    }
    if residual > ORACLE_TOL * (m * m).max(ebar_n.abs()) {
        level.flags.insert(LevelFlag::SteepResidual);
    }
    Ok(OracleState { level, grid: grid.points(), vector })
}

/// Oracle levels for `n = 0..=n_max`; missing indices are skipped.
pub fn oracle_spectrum(
    params: &HylleraasParams,
    n_max: u32,
    grid: &RadialGrid,
    settings: &OracleSettings,
) -> Result<Vec<Option<OracleState>>> {
    (0..=n_max)
        .map(|n| match oracle_state(params, n, grid, settings) {
            Ok(s) => Ok(Some(s)),
            Err(Error::NoRoot(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// Outcome of a Numerov eigenvalue search on a fixed potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumerovEigen {
    pub value: f64,
    pub nodes: usize,
    pub matching_index: usize,
}

/// Numerov solution of `y'' = (W - λ) y` with `y = 0` one step outside
/// both grid ends.
struct Numerov<'a> {
    w: &'a [f64],
    h: f64,
}

const RENORM: f64 = 1e100;

impl Numerov<'_> {
    fn weight(&self, lambda: f64, i: isize) -> f64 {
        // Indices -1 and n are the Dirichlet points; their value never
        // matters because y vanishes there.
        let g = if i < 0 || i as usize >= self.w.len() { 0.0 } else { lambda - self.w[i as usize] };
        1.0 + self.h * self.h * g / 12.0
    }

    fn step(&self, lambda: f64, i: isize, y_i: f64, y_prev: f64, toward: isize) -> f64 {
        let h2 = self.h * self.h;
        let g_i = lambda - self.w[i as usize];
        (2.0 * (1.0 - 5.0 * h2 * g_i / 12.0) * y_i - self.weight(lambda, i - toward) * y_prev)
            / self.weight(lambda, i + toward)
    }

    /// Outward solution over the whole grid plus the value at the far wall.
    fn outward(&self, lambda: f64) -> (Vec<f64>, f64) {
        let n = self.w.len();
        let mut y = vec![0.0; n];
        y[0] = 1e-20;
        let mut prev = 0.0;
        for i in 0..n {
            let next = self.step(lambda, i as isize, y[i], prev, 1);
            prev = y[i];
            if i + 1 < n {
                y[i + 1] = next;
                if next.abs() > RENORM {
                    let s = 1.0 / RENORM;
                    y[..=i + 1].iter_mut().for_each(|v| *v *= s);
                    prev *= s;
                }
            } else {
                return (y, next);
            }
        }
        unreachable!("loop returns at the last point")
    }

    fn inward(&self, lambda: f64, stop: usize) -> Vec<f64> {
        let n = self.w.len();
        let mut y = vec![0.0; n];
        y[n - 1] = 1e-20;
        let mut prev = 0.0;
        let mut i = n - 1;
        while i > stop {
            let next = self.step(lambda, i as isize, y[i], prev, -1);
            prev = y[i];
            y[i - 1] = next;
            if next.abs() > RENORM {
                let s = 1.0 / RENORM;
                y[i - 1..].iter_mut().for_each(|v| *v *= s);
                prev *= s;
            }
            i -= 1;
        }
        y
    }

    /// Eigenvalues below `λ`: sign changes of the outward solution,
    /// including a crossing at the far wall.
    fn count_below(&self, lambda: f64) -> usize {
        let (y, wall) = self.outward(lambda);
        let mut count = 0;
        let mut last = y[0];
        for &v in y.iter().skip(1).chain(std::iter::once(&wall)) {
            if v == 0.0 {
                continue;
            }
            if v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Outermost index where `λ - W` changes from positive to negative,
    /// else the midpoint; kept away from the walls.
    fn matching_index(&self, lambda: f64) -> usize {
        let n = self.w.len();
        let turning = (1..n).rev().find(|&i| lambda - self.w[i - 1] > 0.0 && lambda - self.w[i] <= 0.0);
        turning.unwrap_or(n / 2).clamp(2, n - 3)
    }

    /// Casoratian of the outward and inward solutions at `m`.
    fn defect(&self, lambda: f64, m: usize) -> f64 {
        let (out, _) = self.outward(lambda);
        let inn = self.inward(lambda, m);
        let a = out[m] * inn[m + 1] - out[m + 1] * inn[m];
        let scale = (out[m].abs() + out[m + 1].abs()) * (inn[m].abs() + inn[m + 1].abs());
        if scale == 0.0 {
            0.0
        } else {
            a / scale
        }
    }

    fn assembled(&self, lambda: f64, m: usize) -> Vec<f64> {
        let (mut out, _) = self.outward(lambda);
        let inn = self.inward(lambda, m);
        let ratio = if inn[m] != 0.0 { out[m] / inn[m] } else { 1.0 };
        for i in m + 1..out.len() {
            out[i] = inn[i] * ratio;
        }
        out
    }
}

/// The `k`-th eigenvalue of `-y'' + W y = λ y` by Numerov: node counting
/// isolates the eigenvalue, then the matching-point Casoratian is bisected.
pub fn numerov_eigen(w: &[f64], h: f64, k: usize) -> Result<NumerovEigen> {
    if w.len() < 6 {
        return Err(Error::InvalidGrid("Numerov needs at least six points".into()));
    }
    let num = Numerov { w, h };
    let wmin = w.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    let mut lo = wmin - 1.0;
    while num.count_below(lo) > k {
        lo -= (wmin.abs() + 1.0) * 2.0;
    }
    let mut span = 1.0;
    let mut hi = wmin + span;
    while num.count_below(hi) <= k {
        span *= 2.0;
        hi = wmin + span;
        if span > 1e12 {
            return Err(Error::NoRoot(format!("Numerov could not bracket level {k}")));
        }
    }
    // Isolate: count(lo) = k, count(hi) = k + 1.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let c = num.count_below(mid);
        if c <= k {
            lo = mid;
        } else if c > k + 1 {
            hi = mid;
        } else {
            hi = mid;
            if num.count_below(lo) == k {
                break;
            }
        }
    }
    let m = num.matching_index(0.5 * (lo + hi));
    let tol = 1e-14 * lo.abs().max(hi.abs()).max(1.0);
    let f = |x: f64| num.defect(x, m);
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    let value = if fa.signum() == fb.signum() {
        // Same sign at both ends: fall back to the node-count bracket.
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if b - a <= tol || mid <= a || mid >= b {
                break;
            }
            if num.count_below(mid) <= k {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if b - a <= tol || mid <= a || mid >= b {
                break;
            }
            let fm = f(mid);
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };
    let nodes = count_nodes(&num.assembled(value, m));
    Ok(NumerovEigen { value, nodes, matching_index: m })
}

/// Numerov counterpart of [`solve_relativistic`] inside a given energy
/// bracket, which must contain a sign change of `Ē_n(E) - (E² - M²)`.
pub fn numerov_shoot(
    params: &HylleraasParams,
    n: u32,
    grid: &RadialGrid,
    bracket: (f64, f64),
) -> Result<EnergyLevel> {
    let abc = params.validate()?;
    let v = hylleraas_samples(params, &abc, grid)?;
    let m = params.mass;
    let h = grid.h();
    let k = n as usize;
    let eig = |e: f64| {
        let w: Vec<f64> = v.iter().map(|x| 2.0 * (e + m) * x).collect();
        numerov_eigen(&w, h, k)
    };
    let g = |e: f64| eig(e).map(|r| r.value - (e * e - m * m));
    let (a, b) = bracket;
    let (ga, gb) = (g(a)?, g(b)?);
    if ga.signum() == gb.signum() && ga != 0.0 && gb != 0.0 {
        return Err(Error::NoRoot(format!("bracket [{a}, {b}] has no sign change")));
    }
    let e = if ga == 0.0 { a } else { bisect_result(&g, a, b, ga, 1e-10 * m)? };
    let r = eig(e)?;
    let residual = (r.value - (e * e - m * m)).abs();
    let mut level = EnergyLevel::new(n, e, m, Engine::Oracle, residual);
    if r.nodes != k {
        level.flags.insert(LevelFlag::NodeMismatch);
    }
    Ok(level)
}

/// Non-relativistic counterpart: the `n`-th eigenvalue of
/// `-(1/(2M)) d²/dr² + 2V`, with the reduced mass taken as `M`.
pub fn schrodinger_limit(params: &HylleraasParams, n: u32, grid: &RadialGrid) -> Result<f64> {
    let abc = params.validate()?;
    let v = hylleraas_samples(params, &abc, grid)?;
    let two_m = 2.0 * params.mass;
    // (-d² + 4M V) / (2M)
    let p = EffectiveProblem::from_samples(grid, 0.0, 2.0 * two_m, &v);
    Ok(p.eigenvalue(n as usize) / two_m)
}

/// Least-squares slope of `log|E(h) - E(h/2)|` against `log h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceFit {
    pub slope: f64,
    /// Differences are at rounding level; the slope carries no information.
    pub low_signal: bool,
}

/// Fits the convergence order from `(h, E)` pairs on a geometric sequence
/// of grids (at least three).
pub fn fit_order(samples: &[(f64, f64)]) -> Result<ConvergenceFit> {
    if samples.len() < 3 {
        return Err(Error::InvalidGrid("need at least three grids".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut low_signal = false;
    for w in samples.windows(2) {
        let (h, e) = w[0];
        let diff = (e - w[1].1).abs();
        if diff <= 64.0 * f64::EPSILON * e.abs().max(f64::MIN_POSITIVE) {
            low_signal = true;
        }
        xs.push(h.ln());
        ys.push(diff.max(f64::MIN_POSITIVE).ln());
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    Ok(ConvergenceFit { slope, low_signal })
}

/// Convergence order of a solver over a sequence of grids.
pub fn convergence_order<F>(solve: F, grids: &[RadialGrid]) -> Result<ConvergenceFit>
where
    F: Fn(&RadialGrid) -> Result<f64>,
{
    let samples = grids
        .iter()
        .map(|g| solve(g).map(|e| (g.h(), e)))
        .collect::<Result<Vec<_>>>()?;
    fit_order(&samples)
}

/// Flags shared by a list of oracle states (for reports).
pub fn union_flags<'a>(levels: impl IntoIterator<Item = &'a EnergyLevel>) -> BTreeSet<LevelFlag> {
    levels.into_iter().flat_map(|l| l.flags.iter().copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SSign;
    use std::f64::consts::PI;

    fn box_problem(n: usize) -> (RadialGrid, EffectiveProblem) {
        let g = RadialGrid::box_interior(20.0, n).unwrap();
        let p = EffectiveProblem::from_fn(&g, 0.0, |_| 0.0).unwrap();
        (g, p)
    }

    #[test]
    fn box_eigenvalues() {
        let (_, p) = box_problem(4000);
        for (k, ev) in p.eigenvalues(3).into_iter().enumerate() {
            let want = ((k + 1) as f64 * PI / 20.0).powi(2);
            assert!((ev - want).abs() < 1e-4 * want, "{ev} vs {want}");
        }
    }

    #[test]
    fn sturm_count_matches_eigenvalues() {
        let (_, p) = box_problem(300);
        let evs = p.eigenvalues(5);
        for (k, ev) in evs.iter().enumerate() {
            assert_eq!(p.count_below(ev - 1e-9), k);
            assert_eq!(p.count_below(ev + 1e-9), k + 1);
        }
        assert!(evs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn eigenvector_nodes_follow_index() {
        let (_, p) = box_problem(400);
        for k in 0..4 {
            let v = p.eigenvector(p.eigenvalue(k));
            assert_eq!(count_nodes(&v), k);
        }
    }

    #[test]
    fn numerov_box_is_fourth_order_accurate() {
        let g = RadialGrid::box_interior(20.0, 400).unwrap();
        let w = vec![0.0; g.n];
        for k in 0..3 {
            let r = numerov_eigen(&w, g.h(), k).unwrap();
            let want = ((k + 1) as f64 * PI / 20.0).powi(2);
            assert!((r.value - want).abs() < 1e-8 * want, "{} vs {want}", r.value);
            assert_eq!(r.nodes, k);
        }
    }

    #[test]
    fn free_particle_has_no_bound_state() {
        let p = HylleraasParams { dissociation: 0.0, ..HylleraasParams::default() };
        let g = RadialGrid::half_line(20.0, 400).unwrap();
        assert!(matches!(solve_relativistic(&p, 0, &g), Err(Error::NoRoot(_))));
    }

    #[test]
    fn default_negative_exponent_states_are_unconfined() {
        let p = HylleraasParams::default().with_sign(SSign::NegativeExponent);
        let g = RadialGrid::for_params(&p).unwrap();
        let s = oracle_state(&p, 0, &g, &OracleSettings::default()).unwrap();
        assert!(s.level.energy > -1.0 && s.level.energy < 1.0);
        assert!(s.level.flags.contains(&LevelFlag::Unconfined));
    }

    #[test]
    fn order_fit_on_synthetic_sequences() {
        let quad: Vec<(f64, f64)> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&h| (h, 1.0 + h * h)).collect();
        let fit = fit_order(&quad).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9);
        assert!(!fit.low_signal);
        let flat: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h| (h, 1.0)).collect();
        assert!(fit_order(&flat).unwrap().low_signal);
    }

    #[test]
    fn schrodinger_box_without_potential() {
        let p = HylleraasParams { dissociation: 0.0, ..HylleraasParams::default() };
        let g = RadialGrid::box_interior(10.0, 2000).unwrap();
        let e = schrodinger_limit(&p, 1, &g).unwrap();
        let want = (2.0 * PI / 10.0).powi(2) / 2.0;
        assert!((e - want).abs() < 1e-4 * want);
    }
}
