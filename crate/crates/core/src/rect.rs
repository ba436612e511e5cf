//! Exact solution of the rectangular double well with infinite walls at `+-3`.
//!
//! The wall-to-wall propagation uses the closed-form fundamental solutions
//! of each constant region (trigonometric above the plateau, hyperbolic below,
//! linear exactly at it). Levels are counted with a Prüfer phase, so the
//! eigenvalue search is a bisection on an integer count and does not depend
//! on sampling the matching determinant finely enough.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectDoubleWell {
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
}

/// `(psi, psi')` carried across region boundaries.
type State = (f64, f64);

impl RectDoubleWell {
    pub const WALL: f64 = 3.0;
    pub const BREAK: f64 = 1.0;

    pub fn new(a2: f64, b2: f64, c2: f64) -> Result<Self> {
        if !(a2 >= 0.0 && c2 >= 0.0) || !a2.is_finite() || !c2.is_finite() || !b2.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "plateaus need a2 >= 0, c2 >= 0 and finite b2, got ({a2}, {b2}, {c2})"
            )));
        }
        Ok(Self { a2, b2, c2 })
    }

    /// `(start, end, height)` of the three regions, left to right.
    pub fn regions(&self) -> [(f64, f64, f64); 3] {
        [(-3.0, -1.0, self.a2), (-1.0, 1.0, self.b2), (1.0, 3.0, self.c2)]
    }

    /// Potential inside the box; infinite outside `[-3, 3]`.
    pub fn value(&self, r: f64) -> f64 {
        if r.abs() > Self::WALL {
            f64::INFINITY
        } else if r < -Self::BREAK {
            self.a2
        } else if r <= Self::BREAK {
            self.b2
        } else {
            self.c2
        }
    }

    /// Plateaus joined by `tanh` ramps of half-width `ramp` at `+-1`.
    pub fn smooth_value(&self, r: f64, ramp: f64) -> f64 {
        if r.abs() > Self::WALL {
            return f64::INFINITY;
        }
        let step = |x: f64| 0.5 * (1.0 + (x / ramp).tanh());
        self.a2 + (self.b2 - self.a2) * step(r + 1.0) + (self.c2 - self.b2) * step(r - 1.0)
    }

    fn max_height(&self) -> f64 {
        self.a2.max(self.b2).max(self.c2)
    }

    /// Number of eigenvalues `<= e`.
    ///
    /// Solutions started at both walls are followed to `r = 0`, the middle of
    /// the barrier, which keeps the subdominant exponential above rounding
    /// noise. With `z_L`, `z_R` their zeros on `(-3, 0)` and `(0, 3)` and
    /// `phi = atan2(psi, psi') mod pi` their reduced Prüfer angles at 0,
    /// the count is `z_L + z_R + [phi_L >= phi_R]`.
    pub fn count_below(&self, e: f64) -> usize {
        let (zl, sl) = half_count(self.regions(), e);
        let (zr, sr) = half_count(self.mirrored().regions(), e);
        let phi = |(p, dp): State| {
            if p == 0.0 {
                0.0
            } else {
                let t = p.atan2(dp);
                if t < 0.0 { t + PI } else { t }
            }
        };
        // the mirrored solution runs backwards: flip psi' before taking the angle
        let (pl, pr) = (phi(sl), phi((sr.0, -sr.1)));
        // zeros exactly at 0 are counted in z_L; step back to the open interval
        let at_zero = (sl.0 == 0.0) as usize;
        zl + zr + (pl >= pr) as usize - at_zero
    }

    /// Wronskian of the two wall solutions at 0; changes sign at each simple level.
    pub fn mismatch(&self, e: f64) -> f64 {
        let (pl, dl) = normalize(self.shoot_left(e, 0.0));
        let (pr, dr) = normalize(self.shoot_right(e, 0.0));
        pl * dr - dl * pr
    }

    fn mirrored(&self) -> RectDoubleWell {
        RectDoubleWell { a2: self.c2, b2: self.b2, c2: self.a2 }
    }

    /// Left-wall solution `(psi, psi')` at `x`, with `psi'(-3) = 1`.
    fn shoot_left(&self, e: f64, x: f64) -> State {
        let mut st: State = (0.0, 1.0);
        for (lo, hi, v) in self.regions() {
            if x <= lo {
                break;
            }
            st = propagate(st, e - v, x.min(hi) - lo);
        }
        st
    }

    /// Right-wall solution at `x`, with `psi'(3) = -1`.
    fn shoot_right(&self, e: f64, x: f64) -> State {
        // the right solution of this well is the left solution of the reflected well
        let (p, dp) = self.mirrored().shoot_left(e, -x);
        (p, -dp)
    }
}

/// Zeros on `(-3, 0]` of the left-wall solution and its normalized state at 0.
fn half_count(regions: [(f64, f64, f64); 3], e: f64) -> (usize, State) {
    let mut st: State = (0.0, 1.0);
    let mut zeros = 0usize;
    for (lo, hi, v) in regions {
        if lo >= 0.0 {
            break;
        }
        let len = hi.min(0.0) - lo;
        let d = e - v;
        let end = propagate(st, d, len);
        if d > 0.0 {
            let k = d.sqrt();
            let mut th = if st.0 == 0.0 { 0.0 } else { (k * st.0).atan2(st.1) };
            if th < 0.0 {
                th += PI;
            }
            zeros += ((th + k * len) / PI).floor() as usize;
        } else if st.0 != 0.0 && st.0 * end.0 <= 0.0 {
            // at most one zero where the solution is exponential or linear
            zeros += 1;
        }
        st = normalize(end);
    }
    (zeros, st)
}

fn normalize((p, dp): State) -> State {
    let n = p.hypot(dp);
    if n > 0.0 && n.is_finite() {
        (p / n, dp / n)
    } else {
        (p, dp)
    }
}

/// Exact propagation over a constant region of length `t` with `d = E - V`.
fn propagate((p, dp): State, d: f64, t: f64) -> State {
    if d > 0.0 {
        let k = d.sqrt();
        let (s, c) = (k * t).sin_cos();
        (p * c + dp * s / k, -p * k * s + dp * c)
    } else if d < 0.0 {
        let q = (-d).sqrt();
        let (s, c) = ((q * t).sinh(), (q * t).cosh());
        (p * c + dp * s / q, p * q * s + dp * c)
    } else {
        (p + dp * t, dp)
    }
}

/// The lowest `n_levels` exact eigenvalues.
///
/// Each level is bracketed by bisection on `count_below` down to adjacent
/// floats. If an odd number of levels lies within 1e-9 (relative) of the
/// result, the wall mismatch must change sign across that bracket; otherwise
/// the count is inconsistent and a resolution error is raised. Pairs whose splitting is below double
/// precision come back as equal values.
pub fn rdw_spectrum(well: &RectDoubleWell, n_levels: usize) -> Result<Vec<f64>> {
    if n_levels == 0 {
        return Err(Error::InvalidArgument("n_levels must be at least 1".into()));
    }
    let floor = well.a2.min(well.b2).min(well.c2);
    // the box levels above the tallest plateau bound the spectrum from above
    let mut top = well.max_height() + ((n_levels as f64 + 1.0) * PI / 6.0).powi(2) + 1.0;
    while well.count_below(top) < n_levels {
        top = 2.0 * top + 1.0;
        if !top.is_finite() {
            return Err(Error::Resolution("could not bracket the requested levels".into()));
        }
    }
    let mut out = Vec::with_capacity(n_levels);
    for n in 0..n_levels {
        let (mut lo, mut hi) = (floor.min(out.last().copied().unwrap_or(floor)), top);
        // invariant: count(lo) <= n < count(hi)
        while well.count_below(lo) > n {
            lo -= 1.0 + lo.abs();
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi.abs().max(1.0) {
                break;
            }
            if well.count_below(mid) > n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // cross-check against the wall mismatch on a bracket wide enough to
        // rise above rounding noise: an odd number of levels inside must flip its sign
        let d = 1e-9 * hi.abs().max(1.0);
        let jump = well.count_below(hi + d) - well.count_below(hi - d);
        if jump % 2 == 1 && well.mismatch(hi - d) * well.mismatch(hi + d) > 0.0 {
            return Err(Error::Resolution(format!(
                "level {n}: count jumps near {hi} but the wall mismatch keeps its sign"
            )));
        }
        out.push(hi);
    }
    Ok(out)
}

/// Levels of the isolated wells: `a2 + ((p+1) pi/2)^2` and `c2 + ((q+1) pi/2)^2`
/// for `p = 0..=p_max`, `q = 0..=q_max`.
pub fn rdw_approx(well: &RectDoubleWell, p_max: usize, q_max: usize) -> (Vec<f64>, Vec<f64>) {
    let k = |p: usize| ((p as f64 + 1.0) * PI / 2.0).powi(2);
    (
        (0..=p_max).map(|p| well.a2 + k(p)).collect(),
        (0..=q_max).map(|q| well.c2 + k(q)).collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RectWavefunction {
    pub energy: f64,
    pub r: Vec<f64>,
    pub psi: Vec<f64>,
    /// `int psi^2` over the left and right plateaus.
    pub weight_left: f64,
    pub weight_right: f64,
    /// `max |psi|` over the left and right plateaus.
    pub sup_left: f64,
    pub sup_right: f64,
}

const QUAD_POINTS: usize = 24_000;

/// Normalized eigenfunction at `energy`, sampled at `grid`.
///
/// Solutions shot from both walls are joined at `r = 0` with the
/// least-squares scale on `(psi, psi')`, so the exponential growth of a
/// single shot through the barrier never amplifies the residual error of
/// `energy`. The sign is fixed by `psi > 0` just right of the left wall.
pub fn rdw_wavefunction(well: &RectDoubleWell, energy: f64, grid: &[f64]) -> Result<RectWavefunction> {
    let tol = 1e-9 * energy.abs().max(1.0);
    if well.count_below(energy + tol) == well.count_below(energy - tol) {
        return Err(Error::NoNormalizableSolution { energy });
    }
    if let Some(&r) = grid.iter().find(|r| !(r.abs() <= RectDoubleWell::WALL)) {
        return Err(Error::InvalidArgument(format!("sample point {r} lies outside the walls")));
    }
    let (pl, dl) = well.shoot_left(energy, 0.0);
    let (pr, dr) = well.shoot_right(energy, 0.0);
    let scale = (pl * pr + dl * dr) / (pr * pr + dr * dr);
    let raw = |x: f64| if x <= 0.0 { well.shoot_left(energy, x).0 } else { scale * well.shoot_right(energy, x).0 };

    let h = 2.0 * RectDoubleWell::WALL / QUAD_POINTS as f64;
    let mut norm = 0.0;
    let (mut wl, mut wr, mut sl, mut sr) = (0.0, 0.0, 0.0f64, 0.0f64);
    for i in 0..=QUAD_POINTS {
        let x = -RectDoubleWell::WALL + i as f64 * h;
        let p = raw(x);
        let w = if i == 0 || i == QUAD_POINTS { 0.5 * h } else { h };
        norm += w * p * p;
        if x <= -RectDoubleWell::BREAK {
            wl += w * p * p;
            sl = sl.max(p.abs());
        } else if x >= RectDoubleWell::BREAK {
            wr += w * p * p;
            sr = sr.max(p.abs());
        }
    }
    let c = norm.sqrt().recip();
    Ok(RectWavefunction {
        energy,
        r: grid.to_vec(),
        psi: grid.iter().map(|&x| c * raw(x)).collect(),
        weight_left: wl * c * c,
        weight_right: wr * c * c,
        sup_left: sl * c,
        sup_right: sr * c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1.0)
    }

    #[test]
    fn uniform_box() {
        let w = RectDoubleWell::new(0.0, 0.0, 0.0).unwrap();
        let e = rdw_spectrum(&w, 6).unwrap();
        for (n, en) in e.iter().enumerate() {
            let exact = ((n as f64 + 1.0) * PI / 6.0).powi(2);
            assert!(rel(*en, exact) < 1e-12, "{n}: {en} vs {exact}");
        }
    }

    #[test]
    fn thick_barrier_pairs() {
        let w = RectDoubleWell::new(0.0, 400.0, 0.0).unwrap();
        let e = rdw_spectrum(&w, 4).unwrap();
        assert!((e[1] - e[0]).abs() < 1e-10, "{e:?}");
        // both members of the pair against a 40-digit reference
        assert!((e[0] - 2.3483954971828864).abs() < 1e-13, "{e:?}");
        assert!((e[1] - 2.3483954971828864).abs() < 1e-13, "{e:?}");
        assert!((e[3] - e[2]).abs() < 1e-10);
        // below the bare well values, approaching them as the barrier grows
        let (l, _) = rdw_approx(&w, 1, 1);
        assert!(e[0] < l[0] && rel(e[0], l[0]) < 0.05);
        let taller = rdw_spectrum(&RectDoubleWell::new(0.0, 4000.0, 0.0).unwrap(), 1).unwrap();
        assert!((taller[0] - l[0]).abs() < (e[0] - l[0]).abs());
    }

    #[test]
    fn asymmetric_ground_state() {
        let w = RectDoubleWell::new(0.0, 400.0, 25.0).unwrap();
        let e = rdw_spectrum(&w, 1).unwrap();
        assert!(rel(e[0], PI * PI / 4.0) < 0.05, "{}", e[0]);
        let grid: Vec<f64> = (0..=600).map(|i| -3.0 + i as f64 * 0.01).collect();
        let wf = rdw_wavefunction(&w, e[0], &grid).unwrap();
        assert!(wf.sup_left > 100.0 * wf.sup_right, "{} vs {}", wf.sup_left, wf.sup_right);
    }

    #[test]
    fn symmetric_ground_state_is_even() {
        let w = RectDoubleWell::new(4.0, 30.0, 4.0).unwrap();
        let e = rdw_spectrum(&w, 2).unwrap();
        let grid: Vec<f64> = (0..=60).map(|i| -3.0 + i as f64 * 0.1).collect();
        let wf = rdw_wavefunction(&w, e[0], &grid).unwrap();
        assert!(rel(wf.weight_left, wf.weight_right) < 1e-9);
        for i in 0..=60 {
            assert!((wf.psi[i] - wf.psi[60 - i]).abs() < 1e-9);
        }
        let wf1 = rdw_wavefunction(&w, e[1], &grid).unwrap();
        for i in 0..=60 {
            assert!((wf1.psi[i] + wf1.psi[60 - i]).abs() < 1e-9);
        }
    }

    #[test]
    fn non_eigenvalue_rejected() {
        let w = RectDoubleWell::new(0.0, 10.0, 0.0).unwrap();
        let e = rdw_spectrum(&w, 1).unwrap()[0];
        assert!(matches!(rdw_wavefunction(&w, e + 0.1, &[0.0]), Err(Error::NoNormalizableSolution { .. })));
    }

    #[test]
    fn approximations() {
        let w = RectDoubleWell::new(0.0, 1.0, 9.0).unwrap();
        let (l, r) = rdw_approx(&w, 2, 1);
        assert!((l[0] - PI * PI / 4.0).abs() < 1e-14);
        assert!((r[1] - (9.0 + PI * PI)).abs() < 1e-13);
        assert_eq!(l.len(), 3);
        let s = RectDoubleWell::new(2.0, 1.0, 2.0).unwrap();
        let (l, r) = rdw_approx(&s, 3, 3);
        assert_eq!(l, r);
    }

    #[test]
    fn smooth_profile_limits() {
        let w = RectDoubleWell::new(1.0, 7.0, 3.0).unwrap();
        assert!((w.smooth_value(-2.0, 0.01) - 1.0).abs() < 1e-12);
        assert!((w.smooth_value(0.0, 0.01) - 7.0).abs() < 1e-12);
        assert!((w.smooth_value(2.0, 0.01) - 3.0).abs() < 1e-12);
        assert!(w.value(3.5).is_infinite());
    }

    proptest! {
        #[test]
        fn weyl_count(a2 in 0.0f64..20.0, b2 in -5.0f64..50.0, c2 in 0.0f64..20.0, e in 60.0f64..2000.0) {
            let w = RectDoubleWell::new(a2, b2, c2).unwrap();
            let weyl: f64 = w.regions().iter().map(|&(lo, hi, v)| (hi - lo) * (e - v).max(0.0).sqrt()).sum::<f64>() / PI;
            let n = w.count_below(e) as f64;
            prop_assert!(n <= 2.0 * weyl + 1.0 && n >= 0.5 * weyl - 1.0, "{} vs {}", n, weyl);
        }

        #[test]
        fn levels_ascend_and_match_counts(a2 in 0.0f64..10.0, b2 in 0.0f64..60.0, c2 in 0.0f64..10.0) {
            let w = RectDoubleWell::new(a2, b2, c2).unwrap();
            let e = rdw_spectrum(&w, 5).unwrap();
            prop_assert!(e.windows(2).all(|p| p[0] <= p[1]));
            for (n, en) in e.iter().enumerate() {
                prop_assert!(w.count_below(*en) >= n + 1);
                prop_assert!(w.count_below(en - 1e-9 * en.abs().max(1.0)) <= n);
                prop_assert!(rdw_wavefunction(&w, *en, &[0.0]).is_ok());
            }
        }
    }
}
