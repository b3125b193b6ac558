//! Bracketed root finding: bisection with a secant step whenever the secant
//! iterate stays strictly inside the bracket and the previous step made
//! enough progress.

use super::Bracket;
use crate::error::{Error, Result};

const MAX_ITER: usize = 400;

/// Find a root of `f` inside `bracket`.
///
/// Returns once `f(x) == 0` or the bracket has shrunk below `tol`, in which
/// case the endpoint with the smaller residual is returned.
pub fn find_root<F>(f: F, bracket: Bracket, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "root tolerance must be positive, got {tol}"
        )));
    }
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::NonFinite(
            "root function returned NaN at a bracket end",
        ));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut last_width = b - a;
    let mut use_secant = true;
    for _ in 0..MAX_ITER {
        let width = b - a;
        if width <= tol {
            break;
        }
        let mid = a + 0.5 * width;
        let mut x = mid;
        if use_secant && fa.is_finite() && fb.is_finite() {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a && s < b {
                x = s;
            }
        }
        if x <= a || x >= b {
            x = mid;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.is_nan() {
            return Err(Error::NonFinite(
                "root function returned NaN inside the bracket",
            ));
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // A secant step that failed to halve the bracket twice in a row is
        // replaced by plain bisection on the next iteration.
        let new_width = b - a;
        use_secant = new_width <= 0.5 * last_width;
        last_width = width;
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::cdf;

    fn bracket(lo: f64, hi: f64) -> Bracket {
        Bracket::new(lo, hi).unwrap()
    }

    #[test]
    fn linear_root() {
        let x = find_root(|x| x - 2.0, bracket(0.0, 5.0), 1e-12).unwrap();
        assert!((x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn square_root_of_two() {
        let x = find_root(|x| x * x - 2.0, bracket(1.0, 2.0), 1e-12).unwrap();
        assert!((x - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn inverts_the_normal_cdf() {
        let x = find_root(|x| cdf(x) - 0.975, bracket(0.0, 5.0), 1e-13).unwrap();
        assert!((x - 1.959_963_984_5).abs() < 1e-10);
    }

    #[test]
    fn no_sign_change_is_a_bracket_error() {
        let err = find_root(|x| x * x + 1.0, bracket(-1.0, 1.0), 1e-12).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn discontinuous_sign_change_converges_by_bisection() {
        let x = find_root(
            |x| if x < 0.3 { -1.0 } else { 1.0 },
            bracket(0.0, 1.0),
            1e-12,
        )
        .unwrap();
        assert!((x - 0.3).abs() < 1e-11);
    }

    #[test]
    fn steep_flat_function_still_converges() {
        // Secant steps crawl on this shape; the bisection fallback must kick in.
        let f = |x: f64| (x - 0.7).powi(3) * 1e6 + (x - 0.7) * 1e-9;
        let x = find_root(f, bracket(0.0, 1.0), 1e-13).unwrap();
        assert!((x - 0.7).abs() < 1e-4);
    }
}
