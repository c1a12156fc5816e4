//! Frozen extended-precision values of the constant cascade.
//!
//! Generated by `tests/oracles/constants_mp.py` (mpmath, 50 digits). The Rust
//! build must agree to 12 significant digits.

use hykg::model::{appendix_constants, AppendixConstants, HylleraasParams, SSign};

fn field(c: &AppendixConstants, name: &str) -> f64 {
    match name {
        "ebar" => c.ebar,
        "vbar" => c.vbar,
        "eps2" => c.eps2,
        "betap2" => c.betap2,
        "gammap2" => c.gammap2,
        "beta2" => c.beta2,
        "gamma2" => c.gamma2,
        "beta2_direct" => c.beta2_direct,
        "gamma2_direct" => c.gamma2_direct,
        "alpha1" => c.alpha1,
        "alpha2" => c.alpha2,
        "alpha3" => c.alpha3,
        "xi1" => c.xi1,
        "xi2" => c.xi2,
        "lam1" => c.lam1,
        "lam2" => c.lam2,
        "lam3" => c.lam3,
        "lam4" => c.lam4,
        "delta2" => c.delta2,
        "delta_explicit" => c.delta_explicit,
        "a_const" => c.a_const,
        "b_const" => c.b_const,
        "u2" => c.u2,
        "v2" => c.v2,
        "a_from_lambda" => c.a_from_lambda,
        "b_from_lambda" => c.b_from_lambda,
        other => panic!("unknown field {other}"),
    }
}

fn check(params: HylleraasParams, energy: f64, expected: &[(&str, f64)]) {
    let c = appendix_constants(&params, energy).unwrap();
    for &(name, want) in expected {
        let got = field(&c, name);
        let scale = want.abs().max(1e-300);
        // Values that vanish exactly are compared absolutely.
        let err = if want == 0.0 { got.abs() } else { (got - want).abs() / scale };
        assert!(err < 1e-12, "{name}: got {got:e}, want {want:e}, rel err {err:e}");
    }
}

#[test]
fn default_params_at_half() {
    let params = HylleraasParams {
        shape: 2.0,
        k1: 1.0,
        k2: 1.0,
        omega: 0.25,
        dissociation: 1.0,
        mass: 1.0,
        mu: 1.0,
        s_sign: SSign::PositiveExponent,
    };
    check(
        params,
        0.5,
        &[
            ("ebar", -0.75),
            ("vbar", 3.0),
            ("eps2", 4.444444444444445),
            ("betap2", 12.0),
            ("gammap2", 20.0),
            ("beta2", -7.555555555555555),
            ("gamma2", -15.555555555555555),
            ("beta2_direct", -9.037037037037036),
            ("gamma2_direct", -9.037037037037036),
            ("alpha1", 1.6666666666666667),
            ("alpha2", 3.3333333333333335),
            ("alpha3", 0.8333333333333334),
            ("xi1", -9.222222222222221),
            ("xi2", -19.305555555555557),
            ("lam1", -33.333333333333336),
            ("lam2", 27.22222222222222),
            ("lam3", -10.0),
            ("lam4", 166.22222222222223),
            ("delta2", -300.0),
            ("delta_explicit", 422.22222222222223),
            ("a_const", 0.016540625),
            ("b_const", -0.69053125),
            ("u2", 3547674.070182745),
            ("v2", 0.6908048422753906),
            ("a_from_lambda", -11.608024691358025),
            ("b_from_lambda", -76.34670781893004),
        ],
    );
}

#[test]
fn well_params_below_zero() {
    let params = HylleraasParams {
        shape: -0.3,
        k1: 0.3,
        k2: -0.3,
        omega: 0.25,
        dissociation: 1.0,
        mass: 1.0,
        mu: 1.0,
        s_sign: SSign::PositiveExponent,
    };
    check(
        params,
        -0.3,
        &[
            ("ebar", -0.91),
            ("vbar", 1.4),
            ("eps2", 5.942857142857145),
            ("betap2", 24.615384615384617),
            ("gammap2", 2.4615384615384626),
            ("beta2", -18.67252747252747),
            ("gamma2", 3.4813186813186823),
            ("beta2_direct", -23.71114599686028),
            ("gamma2_direct", -26.574568288854003),
            ("alpha1", 0.10000000000000003),
            ("alpha2", -0.09230769230769234),
            ("alpha3", 0.0),
            ("xi1", -24.615384615384617),
            ("xi2", -2.4615384615384626),
            ("lam1", 0.008520710059171602),
            ("lam2", 32.492307692307705),
            ("lam3", -0.9846153846153849),
            ("lam4", 605.6956213017752),
            ("delta2", 1.0717159763313617),
            ("delta_explicit", 2.6963313609467474),
            ("a_const", -0.5575708019548146),
            ("b_const", 93.58584601826624),
            ("u2", 210.8453979356055),
            ("v2", -93.2749608190737),
            ("a_from_lambda", -3.130013590649633),
            ("b_from_lambda", 965.840068580509),
        ],
    );
}
