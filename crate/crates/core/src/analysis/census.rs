use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::golden_min;
use crate::potential::PotentialSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Minimum {
    pub location: f64,
    pub value: f64,
    pub curvature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Maximum {
    pub location: f64,
    pub value: f64,
}

/// Local extrema of `V` on an interval, in ascending `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellCensus {
    pub interval: [f64; 2],
    pub minima: Vec<Minimum>,
    pub maxima: Vec<Maximum>,
}

pub const DEFAULT_SCAN_POINTS: usize = 4096;
const CURVATURE_STEP: f64 = 1e-4;

impl WellCensus {
    pub fn centers(&self) -> Vec<f64> {
        self.minima.iter().map(|m| m.location).collect()
    }

    /// Smallest distance between neighbouring minima.
    pub fn min_well_distance(&self) -> Option<f64> {
        self.minima.windows(2).map(|w| w[1].location - w[0].location).reduce(f64::min)
    }
}

/// Sign changes of the central-difference `V'` on a uniform scan, each
/// refined by golden section to a 1e-9 bracket.
pub fn well_census(potential: &PotentialSpec, interval: [f64; 2], scan_points: usize) -> Result<WellCensus> {
    let [lo, hi] = interval;
    if !(lo < hi) || scan_points < 3 {
        return Err(Error::InvalidArgument(format!("bad census interval [{lo}, {hi}] / {scan_points} points")));
    }
    let v = |r: f64| potential.value(r);
    let step = (hi - lo) / (scan_points - 1) as f64;
    let dh = 1e-3 * step;
    let slope = |r: f64| -> Result<f64> { Ok((v(r + dh)? - v(r - dh)?) / (2.0 * dh)) };

    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..scan_points {
        let r = lo + i as f64 * step;
        let s = slope(r)?;
        if s == 0.0 {
            continue;
        }
        if let Some((pr, ps)) = prev {
            if (ps < 0.0) != (s < 0.0) {
                let vf = |x: f64| v(x).unwrap_or(f64::INFINITY);
                if ps < 0.0 {
                    let (x, fx) = golden_min(vf, pr, r, 1e-9);
                    let h = CURVATURE_STEP;
                    let curv = (v(x + h)? - 2.0 * fx + v(x - h)?) / (h * h);
                    minima.push(Minimum { location: x, value: fx, curvature: curv.max(0.0) });
                } else {
                    let (x, fx) = golden_min(|x| -vf(x), pr, r, 1e-9);
                    maxima.push(Maximum { location: x, value: -fx });
                }
            }
        }
        prev = Some((r, s));
    }
    Ok(WellCensus { interval, minima, maxima })
}

/// Harmonic estimate of the ground level seated in one well.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadingOrder {
    /// `V(a) + sqrt(V''(a)/2)`, exact for `V = w^2 (r-a)^2 + C`.
    #[default]
    SquareRoot,
    /// `V(a) + V''(a)/2`
    Literal,
}

pub fn leading_order_energy(well: &Minimum, form: LeadingOrder) -> Result<f64> {
    if !(well.curvature > 0.0) {
        return Err(Error::InvalidWell(format!(
            "curvature {} at r = {} is not positive",
            well.curvature, well.location
        )));
    }
    Ok(match form {
        LeadingOrder::SquareRoot => well.value + (0.5 * well.curvature).sqrt(),
        LeadingOrder::Literal => well.value + 0.5 * well.curvature,
    })
}
