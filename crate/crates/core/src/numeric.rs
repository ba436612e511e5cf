//! Small scalar routines shared by the analysis code.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` inside `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // 200 iterations shrink any finite bracket far below f64 resolution.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bisection on a sign predicate: `positive(lo) != positive(hi)` must hold.
/// Returns the midpoint of the final bracket of width at most `tol`.
pub fn bisect_sign<F: FnMut(f64) -> Option<bool>>(
    mut positive: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> f64 {
    let Some(lo_sign) = positive(lo) else { return lo };
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return mid;
        }
        match positive(mid) {
            None => return mid,
            Some(s) if s == lo_sign => lo = mid,
            Some(_) => hi = mid,
        }
    }
}

/// Vertex of the parabola through three points. Falls back to the middle
/// abscissa when the points are collinear.
pub fn parabola_vertex(p: [(f64, f64); 3]) -> (f64, f64) {
    let [(x0, y0), (x1, y1), (x2, y2)] = p;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curv = (d12 - d01) / (x2 - x0);
    if curv == 0.0 || !curv.is_finite() {
        return (x1, y1);
    }
    // y = y1 + d*(x - x1) + curv*(x - x1)^2 with d the slope at x1
    let slope = d01 + curv * (x1 - x0);
    let x = x1 - slope / (2.0 * curv);
    let y = y1 + slope * (x - x1) + curv * (x - x1) * (x - x1);
    (x, y)
}

/// Evenly spaced values from `start` to `stop` (inclusive, up to rounding)
/// computed as `start + i * step` to avoid drift.
pub fn linspace_step(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return vec![start];
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}
