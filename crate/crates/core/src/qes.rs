//! Quasi-exact inversion `V = E + psi''/psi` and its closed-form special cases.

use serde::{Deserialize, Serialize};

use crate::ansatz::{GaussianSuperposition, LogEval};
use crate::error::{Error, Result};
use crate::numeric::golden_min;

/// How the additive constant of a reconstructed potential is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "GaugeJson", into = "GaugeJson")]
pub enum EnergyGauge {
    /// `E = 0`, so `V = psi''/psi`.
    Raw,
    /// `V(0) = 0`.
    #[default]
    Origin,
    /// `min V = 0` on the interval.
    MinZero { interval: [f64; 2] },
}

// serde's internally tagged enums ignore deny_unknown_fields on unit variants
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaugeJson {
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interval: Option<[f64; 2]>,
}

impl TryFrom<GaugeJson> for EnergyGauge {
    type Error = Error;

    fn try_from(g: GaugeJson) -> Result<Self> {
        match (g.mode.as_str(), g.interval) {
            ("raw", None) => Ok(EnergyGauge::Raw),
            ("origin", None) => Ok(EnergyGauge::Origin),
            ("min_zero", Some(interval)) => Ok(EnergyGauge::MinZero { interval }),
            ("min_zero", None) => Err(Error::Gauge("min_zero needs an interval".into())),
            ("raw" | "origin", Some(_)) => Err(Error::Gauge(format!("mode {} takes no interval", g.mode))),
            (m, _) => Err(Error::Gauge(format!("unknown gauge mode {m:?}"))),
        }
    }
}

impl From<EnergyGauge> for GaugeJson {
    fn from(g: EnergyGauge) -> Self {
        match g {
            EnergyGauge::Raw => GaugeJson { mode: "raw".into(), interval: None },
            EnergyGauge::Origin => GaugeJson { mode: "origin".into(), interval: None },
            EnergyGauge::MinZero { interval } => GaugeJson { mode: "min_zero".into(), interval: Some(interval) },
        }
    }
}

/// A potential reconstructed from a Gaussian ansatz.
#[derive(Debug, Clone, PartialEq)]
pub struct QesPotential {
    pub ansatz: GaussianSuperposition,
    pub gauge: EnergyGauge,
    pub ground_energy: f64,
    /// Mixed-sign weights: `V` has poles at the nodes of the ansatz.
    pub singular: bool,
}

const MIN_ZERO_SCAN: usize = 2048;

pub fn reconstruct(ansatz: &GaussianSuperposition, gauge: EnergyGauge) -> Result<QesPotential> {
    let singular = !ansatz.all_positive();
    let ground_energy = match gauge {
        EnergyGauge::Raw => 0.0,
        EnergyGauge::Origin => match ansatz.evaluate(0.0) {
            Ok(e) => -e.d2_ratio,
            Err(_) => return Err(Error::Gauge("origin gauge needs psi(0) != 0".into())),
        },
        EnergyGauge::MinZero { interval: [lo, hi] } => {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Gauge(format!("min_zero needs a finite interval, got [{lo}, {hi}]")));
            }
            if singular {
                return Err(Error::Gauge("min_zero is unbounded below for a signed ansatz".into()));
            }
            -min_d2_ratio(ansatz, lo, hi)?
        }
    };
    Ok(QesPotential { ansatz: ansatz.clone(), gauge, ground_energy, singular })
}

fn min_d2_ratio(ansatz: &GaussianSuperposition, lo: f64, hi: f64) -> Result<f64> {
    let step = (hi - lo) / MIN_ZERO_SCAN as f64;
    let d2 = |r: f64| ansatz.evaluate(r).map(|e| e.d2_ratio);
    let mut best = (0, f64::INFINITY);
    for i in 0..=MIN_ZERO_SCAN {
        let v = d2(lo + i as f64 * step)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let x0 = lo + best.0 as f64 * step;
    let (_, v) = golden_min(
        |r| d2(r).unwrap_or(f64::INFINITY),
        (x0 - step).max(lo),
        (x0 + step).min(hi),
        1e-10,
    );
    Ok(v.min(best.1))
}

impl QesPotential {
    pub fn eval(&self, r: f64) -> Result<LogEval> {
        self.ansatz.evaluate(r)
    }

    /// `V(r) = E0 + psi''/psi`.
    pub fn value(&self, r: f64) -> Result<f64> {
        let e = self.eval(r).map_err(|_| Error::SingularPotential { r })?;
        Ok(self.ground_energy + e.d2_ratio)
    }

    /// Normalized Schrodinger residual `|-psi'' + (V - E0) psi| / max(|psi''|, |psi|, 1)`,
    /// with psi scaled so that the larger of the two terms is representable.
    pub fn residual(&self, r: f64) -> Result<f64> {
        let e = self.eval(r)?;
        let v = self.ground_energy + e.d2_ratio;
        let psi = e.value();
        let d2psi = e.d2_ratio * psi;
        let res = -d2psi + (v - self.ground_energy) * psi;
        Ok(res.abs() / d2psi.abs().max(psi.abs()).max(1.0))
    }
}

/// `V - E` for the two-Gaussian ansatz with centers `+-a`.
pub fn closed_form_m2(a: f64, r: f64) -> f64 {
    -2.0 + 4.0 * a * a + 4.0 * r * r - 8.0 * a * r * (2.0 * a * r).tanh()
}

/// `V - E` for three Gaussians at `0, +-b`, rescaled by the largest
/// exponential so that large `b r` stays finite.
pub fn closed_form_m3(b: f64, r: f64) -> f64 {
    let (b, u) = (b.abs(), r.abs());
    let x = 2.0 * b * u;
    let b2 = b * b;
    // e^{x - b^2}, e^{-x - b^2} and the constant 1, all relative to the largest
    let m = (x - b2).max(0.0);
    let ep = (x - b2 - m).exp();
    let em = (-x - b2 - m).exp();
    let one = (-m).exp();
    let num = -8.0 * b * u * (ep - em) - 4.0 * b2 * one;
    let den = ep + em + one;
    -2.0 + 4.0 * b2 + 4.0 * r * r + num / den
}

/// `V - E` for four Gaussians at `+-a, +-3a`, from
/// `F = cosh(2ar) + e^{-8a^2} cosh(6ar)` via `-2 + 4r^2 - 4r F'/F + F''/F`.
pub fn closed_form_m4(a: f64, r: f64) -> f64 {
    let (a, u) = (a.abs(), r.abs());
    let ex = [2.0 * a * u, -2.0 * a * u, 6.0 * a * u - 8.0 * a * a, -6.0 * a * u - 8.0 * a * a];
    let m = ex.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let [e1, e2, e3, e4] = ex.map(|x| (x - m).exp());
    let sum = e1 + e2 + e3 + e4;
    let g = (2.0 * a * (e1 - e2) + 6.0 * a * (e3 - e4)) / sum;
    let h = (4.0 * a * a * (e1 + e2) + 36.0 * a * a * (e3 + e4)) / sum;
    -2.0 + 4.0 * r * r - 4.0 * u * g + h
}

/// The printed numerator of the four-Gaussian potential, which is `psi''`
/// of `psi = e^{-r^2}(2cosh(2ar)e^{-a^2} + 2cosh(6ar)e^{-9a^2})`. Naive
/// arithmetic, for moderate arguments only.
pub fn closed_form_m4_numerator(a: f64, r: f64) -> f64 {
    let e = (-8.0 * a * a).exp();
    let (c2, c6) = ((2.0 * a * r).cosh(), (6.0 * a * r).cosh());
    let (s2, s6) = ((2.0 * a * r).sinh(), (6.0 * a * r).sinh());
    4.0 * (-a * a - r * r).exp()
        * (-c2 - c6 * e + 2.0 * r * r * c2 + 2.0 * r * r * c6 * e - 4.0 * r * s2 * a - 12.0 * r * s6 * a * e
            + 2.0 * c2 * a * a
            + 18.0 * c6 * a * a * e)
}

/// Coefficients of `r^0, r^2, r^4` in the expansion of the three-Gaussian
/// `V - E` about the origin.
pub fn taylor_coeffs_m3(b: f64) -> (f64, f64, f64) {
    let b2 = b * b;
    let b4 = b2 * b2;
    let e = (-b2).exp();
    let d = 2.0 * e + 1.0;
    let c0 = 2.0 * (4.0 * b2 * e - 2.0 * e - 1.0) / d;
    let c2 = 4.0 * (-16.0 * b2 * e * e - 8.0 * b2 * e + 4.0 * e * e + 4.0 * e + 1.0 + 4.0 * b4 * e) / (d * d);
    let c4 = -16.0 / 3.0 * b4 * e * (-32.0 * e * e - 8.0 * e + 4.0 + 10.0 * b2 * e - b2) / (d * d * d);
    (c0, c2, c4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WellShape {
    SingleWell,
    DoubleWell,
    TripleWell,
}

impl WellShape {
    pub fn minima(self) -> usize {
        match self {
            WellShape::SingleWell => 1,
            WellShape::DoubleWell => 2,
            WellShape::TripleWell => 3,
        }
    }
}

/// `V = (alpha^2 - 3) r^2 + 2 alpha r^4 + r^6` with ground state
/// `psi = exp(-(r^2 + alpha)^2 / 4)` at `E = alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SexticQes {
    pub alpha: f64,
    pub quadratic: f64,
    pub quartic: f64,
    pub ground_energy: f64,
}

pub fn sextic_qes(alpha: f64) -> SexticQes {
    SexticQes { alpha, quadratic: alpha * alpha - 3.0, quartic: 2.0 * alpha, ground_energy: alpha }
}

impl SexticQes {
    pub fn shape(&self) -> WellShape {
        let s3 = 3f64.sqrt();
        if self.alpha >= s3 {
            WellShape::SingleWell
        } else if self.alpha >= -s3 {
            WellShape::DoubleWell
        } else {
            WellShape::TripleWell
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        let r2 = r * r;
        r2 * (self.quadratic + r2 * (self.quartic + r2))
    }

    pub fn log_psi(&self, r: f64) -> f64 {
        let q = r * r + self.alpha;
        -0.25 * q * q
    }

    pub fn psi(&self, r: f64) -> f64 {
        self.log_psi(r).exp()
    }

    /// `psi''/psi` of the ground state, from `d(ln psi)/dr = -r(r^2 + alpha)`.
    pub fn d2_ratio(&self, r: f64) -> f64 {
        let dlog = -r * (r * r + self.alpha);
        dlog * dlog - 3.0 * r * r - self.alpha
    }
}

/// `V^(n) - V^(0)` for a sign-flipped ansatz against its all-positive base.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaReport {
    /// Both potentials in the raw gauge.
    pub raw: f64,
    /// Shifted so that the difference vanishes at the deepest well bottom of the base.
    pub aligned: f64,
    /// Nodes of the signed ansatz, where `V^(n)` has poles.
    pub poles: Vec<f64>,
    /// `r` lies where the base potential exceeds its ground energy.
    pub forbidden: bool,
}

pub const POLE_GUARD: f64 = 1e-9;

pub fn delta_excited(base: &QesPotential, pattern: &[f64], r: f64) -> Result<DeltaReport> {
    if base.singular {
        return Err(Error::InvalidArgument("base ansatz must have all-positive weights".into()));
    }
    let signed = base.ansatz.with_signs(pattern)?;
    let (lo, hi) = signed.center_range();
    let resolution = 1e-2 * signed.terms().iter().map(|t| t.width.recip().sqrt()).fold(1.0, f64::min);
    let poles = signed.find_nodes(lo - 1.0, hi + 1.0, resolution)?;
    if let Some(&node) = poles.iter().find(|&&p| (p - r).abs() <= POLE_GUARD) {
        return Err(Error::PoleProximity { r, node, distance: (node - r).abs() });
    }
    let pole_at = |r: f64| {
        let node = poles.iter().copied().min_by(|a, b| (a - r).abs().total_cmp(&(b - r).abs())).unwrap_or(r);
        Error::PoleProximity { r, node, distance: (node - r).abs() }
    };
    let raw_delta = |x: f64| -> Result<f64> {
        let en = signed.evaluate(x).map_err(|_| pole_at(x))?;
        let e0 = base.ansatz.evaluate(x)?;
        Ok(en.d2_ratio - e0.d2_ratio)
    };
    let raw = raw_delta(r)?;

    // deepest base well bottom among the centers, leftmost on ties
    let mut anchor: Option<(f64, f64)> = None;
    for t in base.ansatz.terms() {
        let d2 = base.ansatz.evaluate(t.center)?.d2_ratio;
        anchor = match anchor {
            Some((c, v)) if !(d2 < v - 1e-9 * v.abs().max(1.0)) && !(d2 <= v + 1e-9 * v.abs().max(1.0) && t.center < c) => {
                Some((c, v))
            }
            _ => Some((t.center, d2)),
        };
    }
    let offset = match anchor {
        Some((c, _)) => raw_delta(c).unwrap_or(0.0),
        None => 0.0,
    };
    let forbidden = base.ansatz.evaluate(r)?.d2_ratio > 0.0;
    Ok(DeltaReport { raw, aligned: raw - offset, poles, forbidden })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{make_equidistant_ansatz, sign_pattern_ansatz, GaussianTerm};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1.0)
    }

    #[test]
    fn m2_origin_gauge_energy() {
        for a in [0.25, 0.5, 1.0, 2.0, 3.0] {
            let q = reconstruct(&make_equidistant_ansatz(2, a, 1.0).unwrap(), EnergyGauge::Origin).unwrap();
            assert!(rel(q.ground_energy, 2.0 - 4.0 * a * a) < 1e-13);
            assert!(q.value(0.0).unwrap().abs() < 1e-12);
        }
        let q = reconstruct(&make_equidistant_ansatz(2, 1.0, 1.0).unwrap(), EnergyGauge::Origin).unwrap();
        assert!((q.ground_energy + 2.0).abs() < 1e-14);
    }

    #[test]
    fn single_gaussian_raw_is_harmonic() {
        let q = reconstruct(&make_equidistant_ansatz(1, 1.0, 1.0).unwrap(), EnergyGauge::Raw).unwrap();
        assert_eq!(q.ground_energy, 0.0);
        for r in [-3.0, -0.5, 0.0, 1.0, 2.5] {
            assert!((q.value(r).unwrap() - (4.0 * r * r - 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn origin_gauge_fails_on_node() {
        let a = sign_pattern_ansatz(2, &[1.0, -1.0], 1.0, 1.0).unwrap();
        assert!(matches!(reconstruct(&a, EnergyGauge::Origin), Err(Error::Gauge(_))));
        let q = reconstruct(&a, EnergyGauge::Raw).unwrap();
        assert!(q.singular);
    }

    #[test]
    fn min_zero_gauge() {
        let a = make_equidistant_ansatz(2, 3.0, 1.0).unwrap();
        let q = reconstruct(&a, EnergyGauge::MinZero { interval: [-6.0, 6.0] }).unwrap();
        let vmin = (0..=12000).map(|i| q.value(-6.0 + i as f64 * 1e-3).unwrap()).fold(f64::INFINITY, f64::min);
        assert!(vmin.abs() < 1e-8, "min V = {vmin}");
        assert!(reconstruct(&a, EnergyGauge::MinZero { interval: [1.0, f64::INFINITY] }).is_err());
    }

    #[test]
    fn gauge_json() {
        let g: EnergyGauge = serde_json::from_str(r#"{"mode":"min_zero","interval":[-1,2]}"#).unwrap();
        assert_eq!(g, EnergyGauge::MinZero { interval: [-1.0, 2.0] });
        let g: EnergyGauge = serde_json::from_str(r#"{"mode":"origin"}"#).unwrap();
        assert_eq!(g, EnergyGauge::Origin);
        assert!(serde_json::from_str::<EnergyGauge>(r#"{"mode":"origin","x":1}"#).is_err());
    }

    #[test]
    fn closed_form_m2_values() {
        assert_eq!(closed_form_m2(1.5, 0.0), 4.0 * 2.25 - 2.0);
        for r in [-2.0, 0.3, 5.0] {
            assert!((closed_form_m2(0.0, r) - (4.0 * r * r - 2.0)).abs() < 1e-14);
        }
        // far from the origin the potential is the harmonic well about a
        let h = 1e-4;
        let slope = (closed_form_m2(1.0, 50.0 + h) - closed_form_m2(1.0, 50.0 - h)) / (2.0 * h);
        assert!((slope - 8.0 * 49.0).abs() < 1e-6 * 400.0);
    }

    #[test]
    fn closed_form_m3_values() {
        for b in [0.5f64, 1.0, 2.0, 4.0] {
            let e = (-b * b).exp();
            let expect = -2.0 + 8.0 * b * b * e / (1.0 + 2.0 * e);
            assert!(rel(closed_form_m3(b, 0.0), expect) < 1e-14);
            assert!(rel(closed_form_m3(b, 0.0), taylor_coeffs_m3(b).0) < 1e-14);
        }
        assert!((closed_form_m3(4.0, 0.0) + 1.9999856).abs() < 1e-7);
        assert!((closed_form_m3(4.0, 4.0) + 2.0).abs() < 1e-4);
        assert!((closed_form_m3(4.0, -4.0) + 2.0).abs() < 1e-4);
        assert!(closed_form_m3(20.0, 100.0).is_finite());
    }

    #[test]
    fn closed_form_m4_values() {
        for a in [0.5f64, 1.0, 3.0] {
            let e = (-8.0 * a * a).exp();
            let expect = -2.0 + (4.0 * a * a + 36.0 * a * a * e) / (1.0 + e);
            assert!(rel(closed_form_m4(a, 0.0), expect) < 1e-14);
        }
        let inner = closed_form_m4(3.0, 3.0);
        let outer = closed_form_m4(3.0, 9.0);
        assert!((inner - outer).abs() < 1e-4);
        assert!((closed_form_m4(3.0, -3.0) - inner).abs() < 1e-12);
        for r in [-1.0, 0.0, 2.0] {
            assert!((closed_form_m4(0.0, r) - (4.0 * r * r - 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn printed_numerator_is_psi_second_derivative() {
        for a in [0.5, 1.0, 2.0] {
            let ans = make_equidistant_ansatz(4, a, 1.0).unwrap();
            for r in [-3.0, -1.1, 0.0, 0.7, 2.5] {
                let e = ans.evaluate(r).unwrap();
                let d2psi = e.d2_ratio * ans.psi(r);
                let n = closed_form_m4_numerator(a, r);
                assert!((n - d2psi).abs() <= 1e-12 * n.abs().max(1e-300) + 1e-300, "a={a} r={r}: {n} vs {d2psi}");
            }
        }
    }

    #[test]
    fn taylor_limits() {
        let (c0, c2, _) = taylor_coeffs_m3(0.0);
        assert!((c0 + 2.0).abs() < 1e-15 && (c2 - 4.0).abs() < 1e-15);
        let (c0, c2, c4) = taylor_coeffs_m3(10.0);
        assert!((c0 + 2.0).abs() < 1e-12 && (c2 - 4.0).abs() < 1e-12 && c4.abs() < 1e-12);
        let (c0, c2, c4) = taylor_coeffs_m3(1.0);
        assert!(rel(c0, -0.3044675390633164) < 1e-14);
        assert!(rel(c2, -0.8284800849183703) < 1e-14);
        assert!(rel(c4, 0.22321905092767075) < 1e-14);
    }

    #[test]
    fn sextic_family() {
        let s = sextic_qes(0.0);
        assert_eq!((s.quadratic, s.quartic, s.ground_energy), (-3.0, 0.0, 0.0));
        assert_eq!(s.value(1.0), -2.0);
        assert_eq!(sextic_qes(2.0).shape(), WellShape::SingleWell);
        assert_eq!(sextic_qes(0.0).shape(), WellShape::DoubleWell);
        assert_eq!(sextic_qes(-2.0).shape(), WellShape::TripleWell);
    }

    #[test]
    fn delta_of_identity_pattern_vanishes() {
        let base = reconstruct(&make_equidistant_ansatz(3, 4.0, 1.0).unwrap(), EnergyGauge::Raw).unwrap();
        for r in [-5.0, -2.0, 0.0, 3.3] {
            let d = delta_excited(&base, &[1.0; 3], r).unwrap();
            assert_eq!(d.raw, 0.0);
            assert_eq!(d.aligned, 0.0);
            assert!(d.poles.is_empty());
        }
    }

    #[test]
    fn delta_small_in_wells_large_in_barriers() {
        let base = reconstruct(&make_equidistant_ansatz(3, 4.0, 1.0).unwrap(), EnergyGauge::Raw).unwrap();
        let p = [1.0, 1.0, -1.0];
        let d = delta_excited(&base, &p, -4.0).unwrap();
        assert!(d.aligned.abs() < 1e-3, "{d:?}");
        assert!(!d.forbidden);
        assert_eq!(d.poles.len(), 1);
        // the node sits at 2 up to ~1e-15, so r = 2 is a pole hit
        assert!(matches!(delta_excited(&base, &p, 2.0), Err(Error::PoleProximity { .. })));
        let d = delta_excited(&base, &p, 2.05).unwrap();
        assert!(d.aligned.abs() > 1.0, "{d:?}");
        assert!(d.forbidden);
    }

    #[test]
    fn delta_rejects_signed_base() {
        let base = reconstruct(&sign_pattern_ansatz(2, &[1.0, -1.0], 2.0, 1.0).unwrap(), EnergyGauge::Raw).unwrap();
        assert!(delta_excited(&base, &[1.0, 1.0], 0.5).is_err());
    }

    proptest! {
        #[test]
        fn residual_vanishes(m in 1usize..=8, s in 0.1f64..10.0, seeds in prop::collection::vec((0.5f64..2.0, 0.2f64..5.0), 8), r in -40.0f64..40.0) {
            let terms = crate::ansatz::equidistant_centers(m, s)
                .into_iter()
                .zip(&seeds)
                .map(|(c, &(w, wt))| GaussianTerm::new(c, w, wt).unwrap())
                .collect();
            let a = GaussianSuperposition::new(terms).unwrap();
            let (lo, hi) = a.center_range();
            let q = reconstruct(&a, EnergyGauge::MinZero { interval: [lo - 2.0, hi + 2.0] }).unwrap();
            prop_assert!(q.residual(r).unwrap() < 1e-13);
        }

        #[test]
        fn oracles_agree(s in prop::sample::select(vec![0.5, 1.0, 2.0, 3.0, 4.0]), u in -1.0f64..1.0) {
            let r = 3.0 * s * u;
            let raw = |m: usize| {
                reconstruct(&make_equidistant_ansatz(m, s, 1.0).unwrap(), EnergyGauge::Raw).unwrap().value(r).unwrap()
            };
            prop_assert!(rel(closed_form_m2(s, r), raw(2)) < 1e-10);
            prop_assert!(rel(closed_form_m3(s, r), raw(3)) < 1e-10);
            prop_assert!(rel(closed_form_m4(s, r), raw(4)) < 1e-10);
        }

        #[test]
        fn parity_of_potential(m in 1usize..=8, s in 0.1f64..6.0, r in 0.0f64..20.0) {
            let q = reconstruct(&make_equidistant_ansatz(m, s, 1.0).unwrap(), EnergyGauge::Origin).unwrap();
            let (p, n) = (q.value(r).unwrap(), q.value(-r).unwrap());
            prop_assert!((p - n).abs() <= 1e-11 * p.abs().max(1.0));
        }

        #[test]
        fn sextic_identity(alpha in -3.0f64..3.0, r in -3.0f64..3.0) {
            let s = sextic_qes(alpha);
            let lhs = s.d2_ratio(r);
            let rhs = s.value(r) - s.ground_energy;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }

        #[test]
        fn m2_threshold(a in 0.05f64..3.0) {
            let q = reconstruct(&make_equidistant_ansatz(2, a, 1.0).unwrap(), EnergyGauge::Origin).unwrap();
            let expect = (0.5 - a * a).signum();
            prop_assume!((a * a - 0.5).abs() > 1e-12);
            prop_assert_eq!(q.ground_energy.signum(), expect);
        }
    }
}
