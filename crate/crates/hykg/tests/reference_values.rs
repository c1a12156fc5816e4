//! Checks against independently computed numbers: extended-precision
//! special-function values, analytic fixtures and grid refinement.

use hykg::model::{potential_extrema, HylleraasParams, SSign};
use hykg::oracle::{effective_eigen, EffectiveProblem, RadialGrid};
use hykg::selftest::{hydrogen_like_roots, oscillator_levels};
use hykg::wavefunction::{count_nodes, jacobi_p, normalize, rodrigues_chi, RadialFunction};
use hykg::{Engine, EnergyLevel};

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn well() -> HylleraasParams {
    HylleraasParams { shape: -0.3, k1: 0.3, k2: -0.3, ..Default::default() }
}

// Values from tests/oracles/special_mp.py at 40 digits.
#[test]
fn jacobi_matches_extended_precision() {
    assert!(rel(jacobi_p(3, 0.5, -0.3, 0.2), -0.491652) < 1e-13);
    assert!(rel(jacobi_p(7, 1.25, 0.75, -0.6), -0.569998093994140625) < 1e-13);
}

#[test]
fn rodrigues_matches_extended_precision() {
    let chi = rodrigues_chi(4, 0.7, -0.35, 0.5, 1.5, 2.2).unwrap();
    assert!(rel(chi, 231836.100626525625) < 1e-12, "{chi}");
}

#[test]
fn rodrigues_rejects_high_order() {
    assert!(rodrigues_chi(13, 0.7, -0.35, 0.5, 1.5, 2.2).is_err());
}

#[test]
fn extrema_agree_with_finer_scan() {
    let p = well();
    let coarse = potential_extrema(&p, 20.0, 2_000).unwrap();
    let fine = potential_extrema(&p, 20.0, 20_000).unwrap();
    assert_eq!(coarse.len(), 1, "{coarse:?}");
    assert_eq!(coarse.len(), fine.len());
    for (c, f) in coarse.iter().zip(&fine) {
        assert!((c.r - f.r).abs() < 1e-8, "{c:?} vs {f:?}");
        assert!((c.value - f.value).abs() < 1e-12, "{c:?} vs {f:?}");
    }
    assert!(coarse[0].value < 0.0);
}

#[test]
fn effective_eigenvalues_stable_under_grid_doubling() {
    for p in [HylleraasParams::default(), HylleraasParams::default().with_sign(SSign::NegativeExponent)] {
        let g = RadialGrid::for_params(&p).unwrap();
        let fine = g.refined().unwrap();
        let a = effective_eigen(&p, 0.5, &g, 4).unwrap();
        let b = effective_eigen(&p, 0.5, &fine, 4).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(rel(*x, *y) < 1e-6, "{x} vs {y}");
        }
    }
}

#[test]
fn eigenvectors_obey_node_theorem() {
    let p = well();
    let grid = RadialGrid::half_line(20.0, 4000).unwrap();
    let problem = EffectiveProblem::hylleraas(&p, -0.5, &grid).unwrap();
    for k in 0..=5 {
        let v = problem.eigenvector(problem.eigenvalue(k));
        assert_eq!(count_nodes(&v), k);
    }
}

#[test]
fn hydrogen_like_levels() {
    for beta in [0.7, 1.3, 4.0] {
        for l in 0..=2 {
            for n in 0..=5 {
                let roots = hydrogen_like_roots(n, l, beta);
                assert_eq!(roots.len(), 1, "n={n} l={l}: {roots:?}");
                let want = beta / (2.0 * (n + l + 1) as f64);
                assert!(rel(roots[0], want) < 1e-10, "n={n} l={l}: {} vs {want}", roots[0]);
            }
        }
    }
}

#[test]
fn oscillator_levels_converge_quadratically() {
    let coarse = oscillator_levels(1.0, 10.0, 2000, 4);
    let fine = oscillator_levels(1.0, 10.0, 4000, 4);
    for (n, (c, f)) in coarse.iter().zip(&fine).enumerate() {
        let want = (4 * n + 3) as f64;
        let ratio = (c - want).abs() / (f - want).abs();
        assert!((3.5..4.5).contains(&ratio), "n={n}: ratio {ratio}");
    }
}

#[test]
fn gaussian_normalization() {
    let grid: Vec<f64> = (0..=2400).map(|i| 12.0 * i as f64 / 2400.0).collect();
    let values: Vec<f64> = grid.iter().map(|r| (-r * r / 2.0).exp()).collect();
    let level = EnergyLevel::new(0, 0.0, 1.0, Engine::Oracle, 0.0);
    let out = normalize(RadialFunction::new(level, grid, values)).unwrap();
    let want = (std::f64::consts::PI.sqrt() / 2.0).powf(-0.5);
    assert!(rel(out.norm_constant, want) < 1e-10, "{}", out.norm_constant);
}

#[test]
fn truncated_tail_is_rejected() {
    let grid: Vec<f64> = (0..=400).map(|i| 3.0 * i as f64 / 400.0).collect();
    let values: Vec<f64> = grid.iter().map(|r| (-r * r / 2.0).exp()).collect();
    let level = EnergyLevel::new(0, 0.0, 1.0, Engine::Oracle, 0.0);
    assert!(normalize(RadialFunction::new(level, grid, values)).is_err());
}
