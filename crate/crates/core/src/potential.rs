//! Potentials the eigensolver can discretize, and their JSON configs.

use serde::{Deserialize, Serialize};

use crate::ansatz::GaussianSuperposition;
use crate::error::{Error, Result};
use crate::qes::{reconstruct, sextic_qes, EnergyGauge, QesPotential, SexticQes};
use crate::rect::RectDoubleWell;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Qes(QesPotential),
    Sextic(SexticQes),
    Rect(RectDoubleWell),
    /// The rectangular profile with `tanh` ramps of the given width at `+-1`.
    SmoothRect { well: RectDoubleWell, ramp: f64 },
    /// `sum_k coeffs[k] r^k`
    Polynomial(Vec<f64>),
    /// Linear interpolation of samples; undefined outside the sampled range.
    Tabulated { r: Vec<f64>, v: Vec<f64> },
}

impl PotentialSpec {
    pub fn value(&self, r: f64) -> Result<f64> {
        let v = match self {
            PotentialSpec::Qes(q) => q.value(r)?,
            PotentialSpec::Sextic(s) => s.value(r),
            PotentialSpec::Rect(w) => w.value(r),
            PotentialSpec::SmoothRect { well, ramp } => well.smooth_value(r, *ramp),
            PotentialSpec::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * r + ck),
            PotentialSpec::Tabulated { r: xs, v: vs } => interpolate(xs, vs, r)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::SingularPotential { r })
        }
    }

    /// First pole of a signed QES potential, if any.
    pub fn singular_point(&self) -> Option<f64> {
        match self {
            PotentialSpec::Qes(q) if q.singular => {
                let (lo, hi) = q.ansatz.center_range();
                let nodes = q.ansatz.find_nodes(lo - 1.0, hi + 1.0, 1e-2).ok()?;
                Some(nodes.first().copied().unwrap_or(0.5 * (lo + hi)))
            }
            _ => None,
        }
    }

    /// Default truncation half-width: `max(3 c, c + 4)` with `c` the
    /// outermost feature, or the fixed walls of the rectangular model.
    pub fn default_half_width(&self) -> f64 {
        let outer = match self {
            PotentialSpec::Rect(_) | PotentialSpec::SmoothRect { .. } => return RectDoubleWell::WALL,
            PotentialSpec::Tabulated { r, .. } => {
                return r.first().map(|a| a.abs()).unwrap_or(1.0).min(r.last().map(|b| b.abs()).unwrap_or(1.0))
            }
            PotentialSpec::Qes(q) => q.ansatz.outermost_center(),
            PotentialSpec::Sextic(_) | PotentialSpec::Polynomial(_) => 0.0,
        };
        (3.0 * outer).max(outer + 4.0)
    }

    /// The ground state known in closed form (unnormalized), when there is one.
    pub fn exact_ground_state(&self, r: f64) -> Option<f64> {
        match self {
            PotentialSpec::Qes(q) if !q.singular => Some(q.ansatz.psi(r)),
            PotentialSpec::Sextic(s) => Some(s.psi(r)),
            _ => None,
        }
    }

    /// The ground energy known in closed form, when there is one.
    pub fn exact_ground_energy(&self) -> Option<f64> {
        match self {
            PotentialSpec::Qes(q) if !q.singular => Some(q.ground_energy),
            PotentialSpec::Sextic(s) => Some(s.ground_energy),
            _ => None,
        }
    }
}

fn interpolate(xs: &[f64], vs: &[f64], r: f64) -> Result<f64> {
    let n = xs.len();
    if n == 0 || r < xs[0] || r > xs[n - 1] {
        return Err(Error::SingularPotential { r });
    }
    let i = xs.partition_point(|&x| x <= r).clamp(1, n.max(2) - 1);
    if n == 1 {
        return Ok(vs[0]);
    }
    let t = (r - xs[i - 1]) / (xs[i] - xs[i - 1]);
    Ok(vs[i - 1] + t * (vs[i] - vs[i - 1]))
}

pub const DEFAULT_RAMP: f64 = 0.01;

fn default_ramp() -> f64 {
    DEFAULT_RAMP
}

/// JSON form of a potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    Qes {
        ansatz: GaussianSuperposition,
        #[serde(default)]
        gauge: EnergyGauge,
    },
    Sextic {
        alpha: f64,
    },
    Rect {
        a2: f64,
        b2: f64,
        c2: f64,
    },
    SmoothRect {
        a2: f64,
        b2: f64,
        c2: f64,
        #[serde(default = "default_ramp")]
        ramp: f64,
    },
    Polynomial {
        coeffs: Vec<f64>,
    },
    Tabulated {
        r: Vec<f64>,
        v: Vec<f64>,
    },
}

impl PotentialConfig {
    pub fn build(&self) -> Result<PotentialSpec> {
        Ok(match self {
            PotentialConfig::Qes { ansatz, gauge } => PotentialSpec::Qes(reconstruct(ansatz, *gauge)?),
            PotentialConfig::Sextic { alpha } => PotentialSpec::Sextic(sextic_qes(*alpha)),
            PotentialConfig::Rect { a2, b2, c2 } => PotentialSpec::Rect(RectDoubleWell::new(*a2, *b2, *c2)?),
            PotentialConfig::SmoothRect { a2, b2, c2, ramp } => {
                if !(*ramp > 0.0) {
                    return Err(Error::InvalidArgument(format!("ramp must be positive, got {ramp}")));
                }
                PotentialSpec::SmoothRect { well: RectDoubleWell::new(*a2, *b2, *c2)?, ramp: *ramp }
            }
            PotentialConfig::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidArgument("polynomial needs finite coefficients".into()));
                }
                PotentialSpec::Polynomial(coeffs.clone())
            }
            PotentialConfig::Tabulated { r, v } => {
                if r.len() != v.len() || r.len() < 2 {
                    return Err(Error::InvalidArgument("tabulated potential needs matching r and v, length >= 2".into()));
                }
                if r.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::InvalidArgument("tabulated r must be strictly increasing".into()));
                }
                PotentialSpec::Tabulated { r: r.clone(), v: v.clone() }
            }
        })
    }
}
