use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::census::{well_census, WellCensus, DEFAULT_SCAN_POINTS};
use crate::ansatz::{equidistant_centers, make_equidistant_ansatz, GaussianSuperposition, GaussianTerm};
use crate::csvfmt;
use crate::error::{Error, Result};
use crate::fd::{solve, Grid, ARGMAX_TIE};
use crate::numeric::{linspace_step, parabola_vertex};
use crate::potential::{PotentialConfig, PotentialSpec};
use crate::qes::{reconstruct, sextic_qes, EnergyGauge};
use crate::rect::{rdw_spectrum, rdw_wavefunction, RectDoubleWell};

/// What one scan row needs from a family member.
#[derive(Debug, Clone, PartialEq)]
pub struct RowData {
    pub energies: Vec<f64>,
    pub argmax: f64,
    pub n_wells: usize,
    pub well_distance: Option<f64>,
}

/// A one-parameter family of potentials solved at fixed settings.
pub trait ScanFamily: Sync {
    fn parameter(&self) -> &str;
    fn evaluate(&self, param: f64, k: usize) -> Result<RowData>;
}

type Builder = dyn Fn(f64) -> Result<PotentialSpec> + Send + Sync;

/// Finite-difference family: every member on the same grid.
pub struct FdFamily {
    name: String,
    build: Box<Builder>,
    pub grid: Grid,
}

impl FdFamily {
    pub fn new(name: impl Into<String>, grid: Grid, build: impl Fn(f64) -> Result<PotentialSpec> + Send + Sync + 'static) -> Self {
        Self { name: name.into(), build: Box::new(build), grid }
    }

    pub fn potential(&self, param: f64) -> Result<PotentialSpec> {
        (self.build)(param)
    }
}

impl ScanFamily for FdFamily {
    fn parameter(&self) -> &str {
        &self.name
    }

    /// The density argmax comes from the closed-form ground state when the
    /// potential has one: a tight doublet splits by less than the solver's
    /// `eps |T|` resolution, and its computed members are arbitrary mixtures.
    fn evaluate(&self, param: f64, k: usize) -> Result<RowData> {
        let v = (self.build)(param)?;
        let l = self.grid.half_width;
        let census = well_census(&v, [-l, l], DEFAULT_SCAN_POINTS)?;
        let sp = solve(&v, self.grid, k)?;
        let exact: Option<Vec<f64>> = sp.points().iter().map(|&r| v.exact_ground_state(r)).collect();
        Ok(RowData {
            energies: sp.energies.clone(),
            argmax: match exact {
                Some(psi) => leftmost_argmax(&sp.points(), &psi),
                None => sp.density_argmax(0),
            },
            n_wells: census.minima.len(),
            well_distance: census.min_well_distance(),
        })
    }
}

fn leftmost_argmax(r: &[f64], psi: &[f64]) -> f64 {
    let max = psi.iter().fold(0.0f64, |m, p| m.max(p * p));
    let i = psi.iter().position(|p| p * p >= max * (1.0 - ARGMAX_TIE)).unwrap_or(0);
    r[i]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RectParam {
    A2,
    B2,
    C2,
}

/// The exact rectangular double well with one plateau varied.
pub struct RectFamily {
    pub base: RectDoubleWell,
    pub vary: RectParam,
    /// Samples per unit length for the density argmax.
    pub density_resolution: usize,
}

impl RectFamily {
    pub fn new(base: RectDoubleWell, vary: RectParam) -> Self {
        Self { base, vary, density_resolution: 2000 }
    }

    pub fn well(&self, param: f64) -> Result<RectDoubleWell> {
        let RectDoubleWell { a2, b2, c2 } = self.base;
        match self.vary {
            RectParam::A2 => RectDoubleWell::new(param, b2, c2),
            RectParam::B2 => RectDoubleWell::new(a2, param, c2),
            RectParam::C2 => RectDoubleWell::new(a2, b2, param),
        }
    }
}

impl ScanFamily for RectFamily {
    fn parameter(&self) -> &str {
        match self.vary {
            RectParam::A2 => "a2",
            RectParam::B2 => "b2",
            RectParam::C2 => "c2",
        }
    }

    fn evaluate(&self, param: f64, k: usize) -> Result<RowData> {
        let well = self.well(param)?;
        let energies = rdw_spectrum(&well, k)?;
        let w = RectDoubleWell::WALL;
        let n = (2.0 * w * self.density_resolution as f64) as usize;
        let grid: Vec<f64> = (0..=n).map(|i| -w + 2.0 * w * i as f64 / n as f64).collect();
        let psi = rdw_wavefunction(&well, energies[0], &grid)?.psi;
        Ok(RowData { energies, argmax: leftmost_argmax(&grid, &psi), n_wells: 2, well_distance: Some(RectDoubleWell::WALL + RectDoubleWell::BREAK) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub param: f64,
    pub energies: Vec<f64>,
    /// `E1 - E0`, when at least two levels were requested.
    pub gap: Option<f64>,
    pub argmax: Option<f64>,
    pub n_wells: Option<usize>,
    #[serde(skip)]
    pub well_distance: Option<f64>,
    /// Solver failure for this value; the scan continues past it.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapMinimum {
    /// Parabolic vertex through the discrete minimum and its neighbours.
    pub param: f64,
    pub gap: f64,
    /// Row index of the discrete minimum.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Jump {
    pub from: f64,
    pub to: f64,
    pub argmax_from: f64,
    pub argmax_to: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub parameter: String,
    pub levels: usize,
    pub rows: Vec<ScanRow>,
    pub gap_minima: Vec<GapMinimum>,
    pub jumps: Vec<Jump>,
}

impl ScanResult {
    /// `param,E0,...,E{k-1},gap,argmax,n_wells`; failed rows keep their
    /// parameter and leave the other fields empty.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("param");
        for k in 0..self.levels {
            s.push_str(&format!(",E{k}"));
        }
        s.push_str(",gap,argmax,n_wells\n");
        let opt = |x: Option<f64>| x.map(csvfmt::num).unwrap_or_default();
        for row in &self.rows {
            s.push_str(&csvfmt::num(row.param));
            for k in 0..self.levels {
                s.push(',');
                s.push_str(&opt(row.energies.get(k).copied()));
            }
            s.push_str(&format!(
                ",{},{},{}\n",
                opt(row.gap),
                opt(row.argmax),
                row.n_wells.map(|n| n.to_string()).unwrap_or_default()
            ));
        }
        s
    }
}

fn run_rows(family: &dyn ScanFamily, values: &[f64], k: usize, jobs: Option<usize>) -> Result<Vec<ScanRow>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("scan needs at least one parameter value".into()));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("scan values must be strictly increasing".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("scan needs at least one level".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let results: Vec<Result<RowData>> = pool.install(|| values.par_iter().map(|&p| family.evaluate(p, k)).collect());
    let mut rows = Vec::with_capacity(values.len());
    for (&p, res) in values.iter().zip(results) {
        rows.push(match res {
            Ok(d) => ScanRow {
                param: p,
                gap: (d.energies.len() > 1).then(|| d.energies[1] - d.energies[0]),
                argmax: Some(d.argmax),
                n_wells: Some(d.n_wells),
                well_distance: d.well_distance,
                energies: d.energies,
                error: None,
            },
            // a malformed member is a config error, not a row to annotate
            Err(e) if !e.is_solver_failure() => return Err(e),
            Err(e) => ScanRow {
                param: p,
                energies: Vec::new(),
                gap: None,
                argmax: None,
                n_wells: None,
                well_distance: None,
                error: Some(e.to_string()),
            },
        });
    }
    Ok(rows)
}

fn gap_minima(rows: &[ScanRow]) -> Vec<GapMinimum> {
    let mut out = Vec::new();
    for i in 1..rows.len().saturating_sub(1) {
        let (Some(g0), Some(g1), Some(g2)) = (rows[i - 1].gap, rows[i].gap, rows[i + 1].gap) else { continue };
        if g1 < g0 && g1 <= g2 {
            let (x, y) = parabola_vertex([(rows[i - 1].param, g0), (rows[i].param, g1), (rows[i + 1].param, g2)]);
            out.push(GapMinimum { param: x, gap: y, index: i });
        }
    }
    out
}

fn jumps(rows: &[ScanRow]) -> Vec<Jump> {
    rows.windows(2)
        .filter_map(|w| {
            let (a, b) = (w[0].argmax?, w[1].argmax?);
            let d = match (w[0].well_distance, w[1].well_distance) {
                (Some(x), Some(y)) => x.min(y),
                (Some(x), None) | (None, Some(x)) => x,
                (None, None) => return None,
            };
            ((b - a).abs() > 0.5 * d).then_some(Jump { from: w[0].param, to: w[1].param, argmax_from: a, argmax_to: b })
        })
        .collect()
}

/// Lowest `k` levels and the gap `E1 - E0` along the family, with the
/// local minima of the gap curve. `jobs = None` uses every core.
pub fn alc_scan(family: &dyn ScanFamily, values: &[f64], k: usize, jobs: Option<usize>) -> Result<ScanResult> {
    let rows = run_rows(family, values, k.max(2), jobs)?;
    Ok(ScanResult {
        parameter: family.parameter().to_string(),
        levels: k.max(2),
        gap_minima: gap_minima(&rows),
        jumps: jumps(&rows),
        rows,
    })
}

/// Ground-density argmax along the family and the points where it moves
/// by more than half the inter-well distance between neighbouring values.
pub fn relocalization_scan(family: &dyn ScanFamily, values: &[f64], k: usize, jobs: Option<usize>) -> Result<ScanResult> {
    let rows = run_rows(family, values, k.max(1), jobs)?;
    Ok(ScanResult {
        parameter: family.parameter().to_string(),
        levels: k.max(1),
        gap_minima: gap_minima(&rows),
        jumps: jumps(&rows),
        rows,
    })
}

/// Parameter values as an inclusive range or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScanValues {
    // first, so a three-element list is never read as a positional range
    List(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ScanValues {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            ScanValues::List(v) => Ok(v.clone()),
            ScanValues::Range(r) => {
                if !(r.step > 0.0) || !(r.stop >= r.start) || !(r.start.is_finite() && r.stop.is_finite()) {
                    return Err(Error::InvalidArgument(format!("bad range {}..{} step {}", r.start, r.stop, r.step)));
                }
                Ok(linspace_step(r.start, r.stop, r.step))
            }
        }
    }
}

fn unit() -> f64 {
    1.0
}

/// JSON form of a scan family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    /// Exact rectangular model, one plateau varied.
    Rect { a2: f64, b2: f64, c2: f64, vary: RectParam },
    /// Two Gaussians at `+-spacing` with weights `(1, w)`; the parameter is `w`.
    WeightedPair {
        spacing: f64,
        #[serde(default = "unit")]
        width: f64,
        #[serde(default)]
        gauge: EnergyGauge,
    },
    /// Sextic QES potential in `alpha`.
    Sextic,
    /// Equidistant `M`-Gaussian QES potential in the spacing.
    QesSpacing {
        #[serde(rename = "M")]
        m: usize,
        #[serde(default = "unit")]
        width: f64,
        #[serde(default)]
        gauge: EnergyGauge,
    },
    /// One potential for every value.
    Fixed { potential: PotentialConfig },
}

pub fn weighted_pair(spacing: f64, width: f64, w: f64) -> Result<GaussianSuperposition> {
    let c = equidistant_centers(2, spacing);
    GaussianSuperposition::new(vec![GaussianTerm::new(c[0], width, 1.0)?, GaussianTerm::new(c[1], width, w)?])
}

impl FamilyConfig {
    /// Half-width that clears every member: the widest default over `values`.
    pub fn default_half_width(&self, values: &[f64]) -> Result<f64> {
        if let FamilyConfig::Rect { .. } = self {
            return Ok(RectDoubleWell::WALL);
        }
        let mut l = 0.0f64;
        for &p in values {
            l = l.max(self.potential(p)?.default_half_width());
        }
        Ok(l)
    }

    pub fn potential(&self, p: f64) -> Result<PotentialSpec> {
        match self {
            FamilyConfig::Rect { a2, b2, c2, vary } => {
                let f = RectFamily::new(RectDoubleWell::new(*a2, *b2, *c2)?, *vary);
                Ok(PotentialSpec::Rect(f.well(p)?))
            }
            FamilyConfig::WeightedPair { spacing, width, gauge } => {
                Ok(PotentialSpec::Qes(reconstruct(&weighted_pair(*spacing, *width, p)?, *gauge)?))
            }
            FamilyConfig::Sextic => Ok(PotentialSpec::Sextic(sextic_qes(p))),
            FamilyConfig::QesSpacing { m, width, gauge } => {
                Ok(PotentialSpec::Qes(reconstruct(&make_equidistant_ansatz(*m, p, *width)?, *gauge)?))
            }
            FamilyConfig::Fixed { potential } => potential.build(),
        }
    }

    /// The runnable family; `grid` is ignored by the exact rectangular model.
    pub fn family(&self, grid: Grid) -> Result<Box<dyn ScanFamily>> {
        Ok(match self {
            FamilyConfig::Rect { a2, b2, c2, vary } => {
                Box::new(RectFamily::new(RectDoubleWell::new(*a2, *b2, *c2)?, *vary))
            }
            other => {
                let name = match other {
                    FamilyConfig::WeightedPair { .. } => "w",
                    FamilyConfig::Sextic => "alpha",
                    FamilyConfig::QesSpacing { .. } => "spacing",
                    _ => "param",
                };
                let cfg = other.clone();
                Box::new(FdFamily::new(name, grid, move |p| cfg.potential(p)))
            }
        })
    }
}

/// The census of one family member, for reporting transitions.
pub fn member_census(cfg: &FamilyConfig, p: f64, half_width: f64) -> Result<WellCensus> {
    well_census(&cfg.potential(p)?, [-half_width, half_width], DEFAULT_SCAN_POINTS)
}
