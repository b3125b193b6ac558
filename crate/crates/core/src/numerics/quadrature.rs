//! Globally adaptive Simpson quadrature.
//!
//! Panels are kept in a max-heap keyed by their local error estimate
//! `|S_fine - S_coarse| / 15`; the worst panel is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol·|I|)` or the subdivision budget runs
//! out. Each panel contributes its Richardson-corrected value.
//!
//! The local estimate is a fourth difference, so it can vanish by accident
//! where `f''''` changes sign inside a panel while the panel's true error
//! does not. Simpson's error scales like `h⁵`, so a child's estimate is
//! floored at its parent's over 32. Initial panels are themselves children of
//! a coarser grid so that they carry a floor too.
//!
//! Narrow features that a coarse initial grid could step over (the test's
//! transition band at `±c/√n` is one) must be announced through breakpoints;
//! every segment between breakpoints starts with `MIN_PANELS` panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Interval, QuadratureSpec};
use crate::error::{Error, Result};

const MIN_PANELS: usize = 8;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    // f at a, a+h/4, a+h/2, a+3h/4, b
    f: [f64; 5],
    value: f64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        [fa, fm, fb]: [f64; 3],
        error_floor: f64,
    ) -> Self {
        let h = b - a;
        let fl = f(a + 0.25 * h);
        let fr = f(a + 0.75 * h);
        let coarse = h / 6.0 * (fa + 4.0 * fm + fb);
        let fine = h / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb);
        let diff = fine - coarse;
        let mut error = (diff.abs() / 15.0).max(error_floor);
        if !error.is_finite() {
            error = f64::INFINITY;
        }
        Panel {
            a,
            b,
            f: [fa, fl, fm, fr, fb],
            value: fine + diff / 15.0,
            error,
        }
    }

    fn split<F: Fn(f64) -> f64>(&self, f: &F) -> (Panel, Panel) {
        let m = 0.5 * (self.a + self.b);
        let [fa, fl, fm, fr, fb] = self.f;
        let floor = self.error / 32.0;
        (
            Panel::new(f, self.a, m, [fa, fl, fm], floor),
            Panel::new(f, m, self.b, [fm, fr, fb], floor),
        )
    }

    /// Too narrow to bisect meaningfully in double precision.
    fn is_atomic(&self) -> bool {
        let scale = self.a.abs().max(self.b.abs()).max(1.0);
        self.b - self.a <= 64.0 * f64::EPSILON * scale
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over `window`.
pub fn integrate<F>(f: F, window: Interval, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_with_breaks(f, window, &[], spec)
}

/// Integrate `f` over `window`, forcing panel boundaries at `breaks`.
///
/// Breakpoints outside the window are ignored; duplicates are harmless.
pub fn integrate_with_breaks<F>(
    f: F,
    window: Interval,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if !(window.lo.is_finite() && window.hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "quadrature window must be finite, got [{}, {}]",
            window.lo, window.hi
        )));
    }
    if window.lo == window.hi {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if window.lo < window.hi {
        (window.lo, window.hi, 1.0)
    } else {
        (window.hi, window.lo, -1.0)
    };

    let mut nodes: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    nodes.push(lo);
    nodes.push(hi);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let mut heap = BinaryHeap::new();
    for seg in nodes.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let parents = MIN_PANELS / 2;
        let h = (b - a) / parents as f64;
        let mut left = a;
        let mut f_left = f(a);
        for k in 1..=parents {
            let right = if k == parents { b } else { a + h * k as f64 };
            let f_right = f(right);
            let f_mid = f(0.5 * (left + right));
            let parent = Panel::new(&f, left, right, [f_left, f_mid, f_right], 0.0);
            let (l, r) = parent.split(&f);
            heap.push(l);
            heap.push(r);
            left = right;
            f_left = f_right;
        }
    }

    let mut finished: Vec<Panel> = Vec::new();
    let mut subdivisions = 0usize;
    let (mut value, mut error) = totals(heap.iter());
    loop {
        if !value.is_finite() {
            return Err(Error::NonFinite("integrand produced a non-finite value"));
        }
        let target = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= target || subdivisions.is_multiple_of(1024) {
            // Running sums drift; confirm against a fresh total.
            (value, error) = totals(heap.iter());
            value += finished.iter().map(|p| p.value).sum::<f64>();
            let target = spec.abs_tol.max(spec.rel_tol * value.abs());
            if error <= target {
                return Ok(sign * value);
            }
        }
        let Some(worst) = heap.pop() else {
            // Only atomic panels are left; this is as good as it gets.
            return Ok(sign * value);
        };
        if worst.is_atomic() {
            finished.push(worst);
            // An atomic panel's error is final; stop chasing it.
            error -= worst.error;
            continue;
        }
        if subdivisions >= spec.max_subdivisions {
            heap.push(worst);
            let (value, error) = totals(heap.iter().chain(finished.iter()));
            return Err(Error::Convergence {
                estimate: sign * value,
                error_bound: error,
            });
        }
        let (l, r) = worst.split(&f);
        value += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        subdivisions += 1;
    }
}

fn totals<'a>(panels: impl Iterator<Item = &'a Panel>) -> (f64, f64) {
    panels.fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}
