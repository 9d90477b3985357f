//! Derivative-free 1-D maximization: a coarse grid scan picks the bracket,
//! golden-section search refines it.
//!
//! The scan matters because objectives built on integer cell allocations
//! are only piecewise smooth; a bare golden-section search started on the
//! whole interval can lock onto the wrong side of a jump.

const INV_PHI: f64 = 0.618_033_988_749_894_848_204_586_834_365_638_118;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`, stopping when
/// the bracket is narrower than `tol`. Returns the best point evaluated.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Maximum {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    let mut best = if fd > fc { (d, fd) } else { (c, fc) };

    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd > best.1 {
                best = (d, fd);
            }
        }
        evaluations += 1;
    }

    Maximum {
        x: best.0,
        value: best.1,
        evaluations,
    }
}

/// Scans `[lo, hi]` at `step`, then refines around the best grid point with
/// golden-section search to `tol`. Never returns a point worse than the
/// best grid sample.
pub fn scan_then_refine<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    step: f64,
    tol: f64,
) -> Maximum {
    assert!(
        lo < hi && step > 0.0 && tol > 0.0,
        "invalid search interval"
    );
    let n = ((hi - lo) / step).ceil() as usize;
    let mut grid_best = (lo, f64::NEG_INFINITY);
    for k in 0..=n {
        let x = (lo + k as f64 * step).min(hi);
        let v = f(x);
        if v > grid_best.1 {
            grid_best = (x, v);
        }
    }
    let a = (grid_best.0 - step).max(lo);
    let b = (grid_best.0 + step).min(hi);
    let refined = golden_section_max(&mut f, a, b, tol);
    let evaluations = n + 1 + refined.evaluations;
    if refined.value >= grid_best.1 {
        Maximum {
            evaluations,
            ..refined
        }
    } else {
        Maximum {
            x: grid_best.0,
            value: grid_best.1,
            evaluations,
        }
    }
}
