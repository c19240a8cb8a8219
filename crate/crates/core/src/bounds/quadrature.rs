//! Adaptive Simpson quadrature with a relative tolerance.

use crate::error::{Error, Result};

/// Subdivisions always performed before the error test is trusted.
const MIN_DEPTH: usize = 4;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

/// Integrates `f` over `[a, b]` to relative tolerance `rel_tol`.
///
/// On failure to converge within `max_depth` halvings the error carries the
/// best estimate found.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_depth: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    // Absolute target scaled by a coarse estimate of ∫|f|, so an integral
    // that cancels to zero does not force refinement to full depth.
    let coarse = composite_simpson(&|x| f(x).abs(), a, b, 64).max(whole.abs());
    let abs_tol = rel_tol * coarse.max(f64::MIN_POSITIVE);

    let mut converged = true;
    let estimate = refine(
        &f,
        Panel { a, b, fa, fm, fb, whole },
        abs_tol,
        0,
        max_depth,
        &mut converged,
    );
    if converged {
        Ok(estimate)
    } else {
        Err(Error::Quadrature {
            estimate,
            tolerance: rel_tol,
            max_depth,
        })
    }
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    panel: Panel,
    tol: f64,
    depth: usize,
    max_depth: usize,
    converged: &mut bool,
) -> f64 {
    let Panel { a, b, fa, fm, fb, whole } = panel;
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;

    if depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth >= max_depth {
        *converged = false;
        return left + right + delta / 15.0;
    }
    refine(
        f,
        Panel { a, b: m, fa, fm: flm, fb: fm, whole: left },
        0.5 * tol,
        depth + 1,
        max_depth,
        converged,
    ) + refine(
        f,
        Panel { a: m, b, fa: fm, fm: frm, fb, whole: right },
        0.5 * tol,
        depth + 1,
        max_depth,
        converged,
    )
}

fn composite_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let x0 = a + i as f64 * h;
            h / 6.0 * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h))
        })
        .sum()
}
