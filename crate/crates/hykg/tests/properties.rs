use hykg::model::{appendix_constants, derive_abc, potential_v, HylleraasParams, SSign};
use hykg::nu::{self, NUInput, PolyCoeffs};
use hykg::wavefunction::{jacobi_p, normalize, RadialFunction};
use hykg::{Engine, EnergyLevel};
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = HylleraasParams> {
    (
        -0.8f64..4.0,
        -0.8f64..4.0,
        -0.8f64..4.0,
        0.05f64..2.0,
        0.01f64..5.0,
        0.1f64..10.0,
        0.1f64..10.0,
        any::<bool>(),
    )
        .prop_map(|(shape, k1, k2, omega, dissociation, mass, mu, neg)| HylleraasParams {
            shape,
            k1,
            k2,
            omega,
            dissociation,
            mass,
            mu,
            s_sign: if neg { SSign::NegativeExponent } else { SSign::PositiveExponent },
        })
        .prop_filter("valid parameters", |p| p.validate().is_ok())
}

fn poly(max_degree: usize) -> impl Strategy<Value = PolyCoeffs> {
    (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(move |(c0, c1, c2)| match max_degree {
        1 => PolyCoeffs::linear(c0, c1),
        _ => PolyCoeffs::new(c0, c1, c2),
    })
}

fn nu_input_with_real_k() -> impl Strategy<Value = NUInput> {
    (poly(2), poly(1), poly(2))
        .prop_filter_map("input admits real k", |(s, t, st)| {
            let input = NUInput::new(s, t, st).ok()?;
            nu::pi_candidates(&input).ok()?;
            Some(input)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn potential_vanishes_at_origin(p in params_strategy()) {
        let v = potential_v(0.0, &p).unwrap();
        prop_assert!(v.abs() <= 1e-14 * p.dissociation, "V(0) = {v}");
    }

    #[test]
    fn potential_tends_to_dissociation_energy(p in params_strategy()) {
        prop_assume!(p.shape > -1.0);
        let p = p.with_sign(SSign::PositiveExponent);
        let rate = (1.0 + p.shape) * p.omega;
        let r = 50.0 / rate;
        prop_assume!(2.0 * rate * r < 700.0);
        let v = potential_v(r, &p).unwrap();
        let bound = p.dissociation * (-rate * r).exp() * 1e3;
        prop_assert!((v - p.dissociation).abs() <= bound, "V = {v}, D_e = {}", p.dissociation);
    }

    #[test]
    fn shape_equal_to_k2_zeroes_a(k1 in -0.8f64..4.0, k2 in -0.8f64..4.0) {
        prop_assume!((1.0 + k1 + k2).abs() > 1e-3);
        if let Ok(abc) = derive_abc(k2, k1, k2) {
            prop_assert_eq!(abc.a, 0.0);
        }
    }

    #[test]
    fn constructed_identities_hold(p in params_strategy(), e in -0.99f64..0.99) {
        let c = appendix_constants(&p, e * p.mass).unwrap();
        prop_assert_eq!(c.beta2, c.eps2 - c.betap2);
        prop_assert_eq!(c.gamma2, c.eps2 - c.gammap2);
        prop_assert_eq!(c.delta2, c.lam3 * c.lam3 + 12.0 * c.lam1);
        prop_assert_eq!(c.alpha1, 1.0 + derive_abc(p.shape, p.k1, p.k2).unwrap().b);
    }

    #[test]
    fn symmetric_constants_ignore_a_c_swap(
        a in -0.9f64..3.0, b in -0.9f64..3.0, c in -0.9f64..3.0,
    ) {
        // Λ1, α2 and α3 depend on (a, c) symmetrically; evaluate both orders.
        let lam1 = |a: f64, c: f64| 4.0 * (1.0 + b).powi(2) * (a * a - 14.0 * a * c + c * c);
        let alpha2 = |a: f64, c: f64| 2.0 * (1.0 + b) * (a + c);
        let alpha3 = |a: f64, c: f64| 2.0 * a * c * (1.0 + b);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-14 * (1.0 + x.abs());
        prop_assert!(close(lam1(a, c), lam1(c, a)));
        prop_assert!(close(alpha2(a, c), alpha2(c, a)));
        prop_assert!(close(alpha3(a, c), alpha3(c, a)));
    }

    #[test]
    fn perfect_square_at_every_solved_k(input in nu_input_with_real_k()) {
        for root in nu::solve_k(&input).unwrap() {
            let q = nu::under_root_quadratic(&input, root.k);
            let m = 1.0 + q.max_abs();
            prop_assert!(root.residual <= 1e-10 * m * m, "k = {}, residual = {:e}", root.k, root.residual);
        }
    }

    #[test]
    fn candidates_satisfy_structural_identities(input in nu_input_with_real_k()) {
        let h = input.half_difference();
        for cand in nu::pi_candidates(&input).unwrap() {
            prop_assert_eq!(cand.lambda, cand.k + cand.pi.c1);
            prop_assert_eq!(cand.tau, input.tau_tilde.add(&cand.pi.scale(2.0)));
            // (π - (σ' - τ̃)/2)² reproduces Q_k.
            let q = nu::under_root_quadratic(&input, cand.k);
            let back = cand.pi.sub(&h).square_linear();
            let scale = 1.0 + q.max_abs();
            for (x, y) in [(back.c0, q.c0), (back.c1, q.c1), (back.c2, q.c2)] {
                prop_assert!((x - y).abs() <= 1e-8 * scale, "{back:?} vs {q:?}");
            }
        }
    }

    #[test]
    fn branch_selection_is_deterministic(input in nu_input_with_real_k()) {
        let cands = nu::pi_candidates(&input).unwrap();
        let first = nu::select_branch(&cands);
        for _ in 0..3 {
            prop_assert_eq!(&nu::select_branch(&cands), &first);
        }
    }

    #[test]
    fn jacobi_reflection(n in 0u32..=10, a in -0.9f64..3.0, b in -0.9f64..3.0, x in -1.0f64..1.0) {
        let lhs = jacobi_p(n, a, b, -x);
        let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * jacobi_p(n, b, a, x);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1e-300));
    }

    #[test]
    fn jacobi_endpoint_value(n in 0u32..=10, a in -0.9f64..3.0, b in -0.9f64..3.0) {
        let want = (1..=n).fold(1.0, |acc, k| acc * (a + k as f64) / k as f64);
        let got = jacobi_p(n, a, b, 1.0);
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300));
    }

    #[test]
    fn normalization_scales_inversely(scale in 0.01f64..100.0, width in 0.5f64..1.5) {
        let grid: Vec<f64> = (0..=1200).map(|i| 12.0 * i as f64 / 1200.0).collect();
        let values: Vec<f64> = grid.iter().map(|r| r * (-r * r / (2.0 * width * width)).exp()).collect();
        let level = EnergyLevel::new(0, 0.0, 1.0, Engine::Oracle, 0.0);
        let base = normalize(RadialFunction::new(level.clone(), grid.clone(), values.clone())).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
        let other = normalize(RadialFunction::new(level, grid, scaled)).unwrap();
        prop_assert!((other.norm_constant * scale - base.norm_constant).abs() <= 1e-12 * base.norm_constant);
        let again = normalize(base).unwrap();
        prop_assert!((again.norm_constant - 1.0).abs() <= 1e-10);
    }
}
