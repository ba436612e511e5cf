//! Self-checks of the inversion: Schrodinger residuals on random ansatzs
//! and agreement of the closed forms with the generic reconstruction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{equidistant_centers, make_equidistant_ansatz, GaussianSuperposition, GaussianTerm};
use crate::error::Result;
use crate::qes::{closed_form_m2, closed_form_m3, closed_form_m4, reconstruct, taylor_coeffs_m3, EnergyGauge};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub seed: u64,
    pub ansatzes: usize,
    pub points: usize,
    pub max_m: usize,
    pub max_spacing: f64,
    pub widths: [f64; 2],
    pub residual_tol: f64,
    pub spacings: Vec<f64>,
    pub closed_form_tol: f64,
    pub taylor_b: Vec<f64>,
    pub taylor_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            ansatzes: 200,
            points: 50,
            max_m: 8,
            max_spacing: 10.0,
            widths: [0.5, 2.0],
            residual_tol: 1e-13,
            spacings: vec![0.5, 1.0, 2.0, 3.0, 4.0],
            closed_form_tol: 1e-10,
            taylor_b: vec![0.5, 1.0, 1.5, 2.0, 3.0, 4.0],
            taylor_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn check(name: &str, samples: usize, worst: f64, tolerance: f64) -> Check {
    Check { name: name.into(), samples, worst, tolerance, passed: worst < tolerance }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(1.0)
}

/// Equidistant centers with per-term widths and positive weights.
pub fn random_ansatz(rng: &mut impl Rng, cfg: &VerifyConfig) -> Result<GaussianSuperposition> {
    let m = rng.gen_range(1..=cfg.max_m);
    let s = rng.gen_range(0.1..=cfg.max_spacing);
    let terms = equidistant_centers(m, s)
        .into_iter()
        .map(|c| GaussianTerm::new(c, rng.gen_range(cfg.widths[0]..=cfg.widths[1]), rng.gen_range(0.2..=5.0)))
        .collect::<Result<Vec<_>>>()?;
    GaussianSuperposition::new(terms)
}

/// Worst normalized residual over random ansatzs and random `r`, each
/// potential gauged to `min V = 0` around its centers.
pub fn residual_suite(cfg: &VerifyConfig) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    for _ in 0..cfg.ansatzes {
        let a = random_ansatz(&mut rng, cfg)?;
        let (lo, hi) = a.center_range();
        let q = reconstruct(&a, EnergyGauge::MinZero { interval: [lo - 2.0, hi + 2.0] })?;
        for _ in 0..cfg.points {
            let r = rng.gen_range(lo - 5.0..=hi + 5.0);
            worst = worst.max(q.residual(r)?);
        }
    }
    Ok(check("qes_residual", cfg.ansatzes * cfg.points, worst, cfg.residual_tol))
}

/// Closed forms for `M = 2, 3, 4` against the generic raw-gauge potential
/// on `[-3s, 3s]`.
pub fn closed_form_suite(cfg: &VerifyConfig) -> Result<Check> {
    const SAMPLES: usize = 601;
    let forms: [(usize, fn(f64, f64) -> f64); 3] = [(2, closed_form_m2), (3, closed_form_m3), (4, closed_form_m4)];
    let mut worst = 0.0f64;
    for &s in &cfg.spacings {
        for (m, form) in forms {
            let q = reconstruct(&make_equidistant_ansatz(m, s, 1.0)?, EnergyGauge::Raw)?;
            for i in 0..SAMPLES {
                let r = -3.0 * s + 6.0 * s * i as f64 / (SAMPLES - 1) as f64;
                worst = worst.max(rel(form(s, r), q.value(r)?));
            }
        }
    }
    Ok(check("closed_forms", cfg.spacings.len() * 3 * SAMPLES, worst, cfg.closed_form_tol))
}

/// Even-power Taylor coefficients `c0, c2, c4` of `r -> V(r)` at the
/// origin, by interpolation in `x = r^2` on small nodes.
pub fn taylor_fit(v: impl Fn(f64) -> Result<f64>) -> Result<[f64; 3]> {
    const K: usize = 7;
    const X_MAX: f64 = 0.02;
    let xs: Vec<f64> = (0..K).map(|i| X_MAX * i as f64 / (K - 1) as f64).collect();
    let mut a = vec![[0.0; K + 1]; K];
    for (row, &x) in a.iter_mut().zip(&xs) {
        for (j, c) in row.iter_mut().take(K).enumerate() {
            *c = x.powi(j as i32);
        }
        row[K] = v(x.sqrt())?;
    }
    // Gaussian elimination with partial pivoting
    for col in 0..K {
        let p = (col..K).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, p);
        for i in col + 1..K {
            let f = a[i][col] / a[col][col];
            for j in col..=K {
                a[i][j] -= f * a[col][j];
            }
        }
    }
    let mut c = [0.0; K];
    for i in (0..K).rev() {
        c[i] = (a[i][K] - (i + 1..K).map(|j| a[i][j] * c[j]).sum::<f64>()) / a[i][i];
    }
    Ok([c[0], c[1], c[2]])
}

/// The printed three-Gaussian expansion against a fit of the reconstruction.
pub fn taylor_suite(cfg: &VerifyConfig) -> Result<Check> {
    let mut worst = 0.0f64;
    for &b in &cfg.taylor_b {
        let q = reconstruct(&make_equidistant_ansatz(3, b, 1.0)?, EnergyGauge::Raw)?;
        let fit = taylor_fit(|r| q.value(r))?;
        let (c0, c2, c4) = taylor_coeffs_m3(b);
        for (x, y) in [c0, c2, c4].into_iter().zip(fit) {
            worst = worst.max(rel(x, y));
        }
    }
    Ok(check("taylor_m3", 3 * cfg.taylor_b.len(), worst, cfg.taylor_tol))
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let checks = vec![residual_suite(cfg)?, closed_form_suite(cfg)?, taylor_suite(cfg)?];
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { seed: cfg.seed, checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_defaults() {
        let cfg = VerifyConfig { ansatzes: 40, ..Default::default() };
        let report = run_verify(&cfg).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn fit_recovers_polynomial() {
        let c = taylor_fit(|r| Ok(1.0 - 2.0 * r * r + 0.5 * r.powi(4) + 3.0 * r.powi(6))).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] + 2.0).abs() < 1e-10 && (c[2] - 0.5).abs() < 1e-8, "{c:?}");
    }

    #[test]
    fn taylor_suite_detects_a_wrong_formula() {
        let q = reconstruct(&make_equidistant_ansatz(3, 1.0, 1.0).unwrap(), EnergyGauge::Raw).unwrap();
        let fit = taylor_fit(|r| q.value(r)).unwrap();
        let (_, _, c4) = taylor_coeffs_m3(1.0);
        assert!(rel(c4, fit[2]) < 1e-6);
        assert!(rel(1.01 * c4, fit[2]) > 1e-3);
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = VerifyConfig { ansatzes: 5, points: 5, ..Default::default() };
        assert_eq!(residual_suite(&cfg).unwrap(), residual_suite(&cfg).unwrap());
        let json = serde_json::to_string(&run_verify(&cfg).unwrap()).unwrap();
        assert!(serde_json::from_str::<VerifyReport>(&json).is_ok());
        assert!(serde_json::from_str::<VerifyConfig>(r#"{"seed":3,"bogus":1}"#).is_err());
    }
}
