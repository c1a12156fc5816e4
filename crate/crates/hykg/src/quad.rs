//! Composite Simpson quadrature.

/// Integrates uniformly spaced samples with step `h`.
///
/// An even number of intervals uses plain composite Simpson; an odd number
/// closes the last three intervals with Simpson's 3/8 rule. One interval
/// falls back to the trapezoid.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let m = values.len();
    match m {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        _ => {
            let intervals = m - 1;
            if intervals % 2 == 0 {
                simpson_even(values, h)
            } else if intervals == 3 {
                three_eighths(values, h)
            } else {
                simpson_even(&values[..m - 3], h) + three_eighths(&values[m - 4..], h)
            }
        }
    }
}

fn simpson_even(v: &[f64], h: f64) -> f64 {
    let last = v.len() - 1;
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, x) in v.iter().enumerate().take(last).skip(1) {
        if i % 2 == 1 {
            odd += x;
        } else {
            even += x;
        }
    }
    h / 3.0 * (v[0] + 4.0 * odd + 2.0 * even + v[last])
}

fn three_eighths(v: &[f64], h: f64) -> f64 {
    3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3])
}

/// Composite Simpson on `[a, b]`, doubling the panel count until two
/// successive estimates differ by less than `rel_tol` (relative).
pub fn simpson_doubling<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let mut panels = 16usize;
    let mut prev = f64::NAN;
    loop {
        let h = (b - a) / panels as f64;
        let samples: Vec<f64> = (0..=panels).map(|i| f(a + h * i as f64)).collect();
        let est = simpson(&samples, h);
        if (est - prev).abs() <= rel_tol * est.abs() || panels >= 1 << 22 {
            return est;
        }
        prev = est;
        panels *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics_with_either_parity() {
        let f = |x: f64| x * x * x - 2.0 * x + 1.0;
        let exact = 0.25 * 16.0 - 4.0 + 2.0;
        for m in [3usize, 4, 5, 8, 11] {
            let h = 2.0 / (m - 1) as f64;
            let v: Vec<f64> = (0..m).map(|i| f(h * i as f64)).collect();
            assert!((simpson(&v, h) - exact).abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn doubling_converges_on_sine() {
        let got = simpson_doubling(f64::sin, 0.0, std::f64::consts::PI, 1e-12);
        assert!((got - 2.0).abs() < 1e-11);
    }
}
