//! Bracket scanning and bisection on functions that may be undefined in places.

/// A converged root together with the function value there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub f: f64,
}

/// Scans `[lo, hi]` with `brackets` equal subintervals and bisects every sign
/// change to an interval width of `xtol`.
///
/// `f` returns `None` where it is undefined. Subintervals touching an
/// undefined sample are skipped, and a bisection that lands in an undefined
/// region is abandoned. Roots are returned in ascending order; callers decide
/// whether a converged sign change is a genuine root or a pole.
pub fn scan_roots<F>(f: F, lo: f64, hi: f64, brackets: usize, xtol: f64) -> Vec<Root>
where
    F: Fn(f64) -> Option<f64>,
{
    let brackets = brackets.max(1);
    let step = (hi - lo) / brackets as f64;
    let xs: Vec<f64> = (0..=brackets)
        .map(|i| if i == brackets { hi } else { lo + step * i as f64 })
        .collect();
    let fs: Vec<Option<f64>> = xs.iter().map(|&x| f(x).filter(|v| v.is_finite())).collect();

    let mut roots = Vec::new();
    for i in 0..brackets {
        let (Some(fa), Some(fb)) = (fs[i], fs[i + 1]) else {
            continue;
        };
        if fa == 0.0 {
            roots.push(Root { x: xs[i], f: 0.0 });
            continue;
        }
        if i + 1 == brackets && fb == 0.0 {
            roots.push(Root { x: xs[i + 1], f: 0.0 });
            continue;
        }
        if fa.signum() != fb.signum() && fb != 0.0 {
            if let Some(r) = bisect(&f, xs[i], xs[i + 1], fa, xtol) {
                roots.push(r);
            }
        }
    }
    roots
}

/// Bisection on a bracket with `f(a) = fa` of opposite sign to `f(b)`.
pub fn bisect<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64, xtol: f64) -> Option<Root>
where
    F: Fn(f64) -> Option<f64>,
{
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m).filter(|v| v.is_finite())?;
        if fm == 0.0 {
            return Some(Root { x: m, f: 0.0 });
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x).filter(|v| v.is_finite())?;
    Some(Root { x, f: fx })
}

/// Merges roots closer than `tol` (input sorted ascending). The boolean marks
/// entries that absorbed at least one neighbour.
pub fn dedup_roots(roots: Vec<Root>, tol: f64) -> Vec<(Root, bool)> {
    let mut out: Vec<(Root, bool)> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last_mut() {
            Some((prev, merged)) if (r.x - prev.x).abs() <= tol => {
                *merged = true;
                if r.f.abs() < prev.f.abs() {
                    *prev = r;
                }
            }
            _ => out.push((r, false)),
        }
    }
    out
}
