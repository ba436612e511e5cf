//! Multi-Gaussian wave-function ansatzs.
//!
//! A superposition `psi(r) = sum_j w_j exp(-omega_j (r - c_j)^2)` is evaluated
//! in the log domain: the largest exponent is factored out before summing, so
//! widely separated centers (spacing 20, |r| = 100) never overflow or
//! underflow the ratios `psi'/psi` and `psi''/psi`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::bisect_sign;

/// One Gaussian `weight * exp(-width * (r - center)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawTerm")]
pub struct GaussianTerm {
    pub center: f64,
    pub width: f64,
    pub weight: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    center: f64,
    #[serde(default = "default_width")]
    width: f64,
    #[serde(default = "default_weight")]
    weight: f64,
}

fn default_width() -> f64 {
    1.0
}

fn default_weight() -> f64 {
    1.0
}

impl TryFrom<RawTerm> for GaussianTerm {
    type Error = Error;

    fn try_from(raw: RawTerm) -> Result<Self> {
        GaussianTerm::new(raw.center, raw.width, raw.weight)
    }
}

impl GaussianTerm {
    pub fn new(center: f64, width: f64, weight: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidArgument(format!("center must be finite, got {center}")));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidArgument(format!("width must be positive, got {width}")));
        }
        if weight == 0.0 || !weight.is_finite() {
            return Err(Error::InvalidArgument(format!("weight must be nonzero, got {weight}")));
        }
        Ok(Self { center, width, weight })
    }

    #[inline]
    fn exponent(&self, r: f64) -> f64 {
        let x = r - self.center;
        -self.width * x * x
    }
}

/// `ln|psi|`, the sign of `psi` and the two logarithmic derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEval {
    pub log_magnitude: f64,
    pub sign: f64,
    /// psi'/psi
    pub dlog: f64,
    /// psi''/psi
    pub d2_ratio: f64,
}

impl LogEval {
    /// `psi` itself; underflows to zero far in the tails.
    pub fn value(&self) -> f64 {
        self.sign * self.log_magnitude.exp()
    }
}

/// Weighted sum of Gaussians, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSuperposition {
    terms: Vec<GaussianTerm>,
    parity_symmetric: bool,
}

impl Serialize for GaussianSuperposition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        AnsatzSpec::Terms(self.terms.clone()).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GaussianSuperposition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        AnsatzSpec::deserialize(deserializer)?
            .build()
            .map_err(serde::de::Error::custom)
    }
}

/// JSON form of an ansatz: explicit terms or the equidistant shorthand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AnsatzSpec {
    Terms(Vec<GaussianTerm>),
    Equidistant(EquidistantSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquidistantSpec {
    #[serde(rename = "M")]
    pub m: usize,
    pub spacing: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Vec<f64>>,
}

impl AnsatzSpec {
    pub fn build(&self) -> Result<GaussianSuperposition> {
        match self {
            AnsatzSpec::Terms(terms) => GaussianSuperposition::new(terms.clone()),
            AnsatzSpec::Equidistant(e) => match &e.pattern {
                Some(p) => sign_pattern_ansatz(e.m, p, e.spacing, e.width),
                None => make_equidistant_ansatz(e.m, e.spacing, e.width),
            },
        }
    }
}

impl GaussianSuperposition {
    pub fn new(terms: Vec<GaussianTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("ansatz needs at least one term".into()));
        }
        let parity_symmetric = is_parity_symmetric(&terms);
        Ok(Self { terms, parity_symmetric })
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn parity_symmetric(&self) -> bool {
        self.parity_symmetric
    }

    pub fn all_positive(&self) -> bool {
        self.terms.iter().all(|t| t.weight > 0.0)
    }

    /// Largest |center| among the terms.
    pub fn outermost_center(&self) -> f64 {
        self.terms.iter().map(|t| t.center.abs()).fold(0.0, f64::max)
    }

    /// `(min center, max center)`.
    pub fn center_range(&self) -> (f64, f64) {
        self.terms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
            (lo.min(t.center), hi.max(t.center))
        })
    }

    /// Same centers and widths, weights multiplied by `signs`.
    pub fn with_signs(&self, signs: &[f64]) -> Result<Self> {
        if signs.len() != self.terms.len() {
            return Err(Error::InvalidArgument(format!(
                "pattern length {} does not match {} terms",
                signs.len(),
                self.terms.len()
            )));
        }
        let terms = self
            .terms
            .iter()
            .zip(signs)
            .map(|(t, &s)| GaussianTerm::new(t.center, t.width, t.weight * unit_sign(s)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    /// Evaluate `ln|psi|`, sign, `psi'/psi` and `psi''/psi` at `r`.
    pub fn evaluate(&self, r: f64) -> Result<LogEval> {
        let shift = self
            .terms
            .iter()
            .map(|t| t.exponent(r))
            .fold(f64::NEG_INFINITY, f64::max);
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for t in &self.terms {
            let x = r - t.center;
            let e = t.weight * (t.exponent(r) - shift).exp();
            let p1 = -2.0 * t.width * x;
            s0 += e;
            s1 += e * p1;
            s2 += e * (p1 * p1 - 2.0 * t.width);
        }
        if s0 == 0.0 {
            return Err(Error::AtNode { lo: r.next_down(), hi: r.next_up() });
        }
        Ok(LogEval {
            log_magnitude: shift + s0.abs().ln(),
            sign: s0.signum(),
            dlog: s1 / s0,
            d2_ratio: s2 / s0,
        })
    }

    /// `psi(r)` by direct summation (may underflow).
    pub fn psi(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.weight * t.exponent(r).exp()).sum()
    }

    /// Sign of psi at `r`, zero exactly at a node.
    fn sign_at(&self, r: f64) -> f64 {
        match self.evaluate(r) {
            Ok(e) => e.sign,
            Err(_) => 0.0,
        }
    }

    /// All sign changes of psi on `[lo, hi]`, sorted ascending.
    ///
    /// The interval is scanned at `resolution`; each sign change is bisected
    /// to a bracket of width 1e-12. Two nodes closer than `resolution` are
    /// invisible to the scan.
    pub fn find_nodes(&self, lo: f64, hi: f64, resolution: f64) -> Result<Vec<f64>> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
        }
        if !(resolution > 0.0) {
            return Err(Error::InvalidArgument(format!("resolution must be positive, got {resolution}")));
        }
        let mut nodes = Vec::new();
        if self.all_positive() {
            return Ok(nodes);
        }
        let steps = ((hi - lo) / resolution).ceil().max(1.0) as usize;
        let at = |i: usize| if i == steps { hi } else { lo + (hi - lo) * i as f64 / steps as f64 };
        let mut last: Option<(f64, f64)> = None;
        let mut just_hit_zero = false;
        for i in 0..=steps {
            let x = at(i);
            let s = self.sign_at(x);
            if s == 0.0 {
                nodes.push(x);
                just_hit_zero = true;
                continue;
            }
            if let Some((px, ps)) = last {
                if ps != s && !just_hit_zero {
                    let root = bisect_sign(
                        |y| {
                            let sy = self.sign_at(y);
                            (sy != 0.0).then_some(sy > 0.0)
                        },
                        px,
                        x,
                        1e-12,
                    );
                    nodes.push(root);
                }
            }
            just_hit_zero = false;
            last = Some((x, s));
        }
        Ok(nodes)
    }
}

/// Number of adjacent sign flips in a weight pattern.
pub fn flip_count(pattern: &[f64]) -> usize {
    pattern.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count()
}

fn unit_sign(s: f64) -> Result<f64> {
    if s == 1.0 || s == -1.0 {
        Ok(s)
    } else {
        Err(Error::InvalidArgument(format!("pattern entries must be +1 or -1, got {s}")))
    }
}

fn is_parity_symmetric(terms: &[GaussianTerm]) -> bool {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    let mut used = vec![false; terms.len()];
    for t in terms {
        let mirror = terms.iter().enumerate().position(|(j, u)| {
            !used[j] && close(u.center, -t.center) && close(u.width, t.width) && close(u.weight, t.weight)
        });
        match mirror {
            Some(j) => used[j] = true,
            None => return false,
        }
    }
    true
}

/// Centers of the equidistant ansatz: `{0, ±s, ±2s, ...}` for odd `m`,
/// `{±s, ±3s, ±5s, ...}` for even `m`, ascending.
pub fn equidistant_centers(m: usize, spacing: f64) -> Vec<f64> {
    let half = (m as f64 - 1.0) / 2.0;
    (0..m)
        .map(|j| {
            if m % 2 == 1 {
                (j as f64 - half) * spacing
            } else {
                (2.0 * j as f64 - (m as f64 - 1.0)) * spacing
            }
        })
        .collect()
}

/// `m` unit-weight Gaussians of common `width` on the equidistant grid.
pub fn make_equidistant_ansatz(m: usize, spacing: f64, width: f64) -> Result<GaussianSuperposition> {
    sign_pattern_ansatz(m, &vec![1.0; m], spacing, width)
}

/// Equidistant ansatz whose `j`-th weight is `pattern[j]` (each +1 or -1).
///
/// With `n` adjacent flips the result approximates the `n`-th excited member
/// of the low-lying multiplet.
pub fn sign_pattern_ansatz(
    m: usize,
    pattern: &[f64],
    spacing: f64,
    width: f64,
) -> Result<GaussianSuperposition> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    if !(spacing > 0.0) {
        return Err(Error::InvalidArgument(format!("spacing must be positive, got {spacing}")));
    }
    if pattern.len() != m {
        return Err(Error::InvalidArgument(format!(
            "pattern length {} does not match M = {m}",
            pattern.len()
        )));
    }
    let terms = equidistant_centers(m, spacing)
        .into_iter()
        .zip(pattern)
        .map(|(c, &s)| GaussianTerm::new(c, width, unit_sign(s)?))
        .collect::<Result<Vec<_>>>()?;
    GaussianSuperposition::new(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equidistant_conventions() {
        let a3 = make_equidistant_ansatz(3, 4.0, 1.0).unwrap();
        let c: Vec<f64> = a3.terms().iter().map(|t| t.center).collect();
        assert_eq!(c, vec![-4.0, 0.0, 4.0]);
        assert!(a3.terms().iter().all(|t| t.weight == 1.0 && t.width == 1.0));
        assert!(a3.parity_symmetric());

        let a4 = make_equidistant_ansatz(4, 2.5, 1.0).unwrap();
        let c: Vec<f64> = a4.terms().iter().map(|t| t.center).collect();
        assert_eq!(c, vec![-7.5, -2.5, 2.5, 7.5]);
        assert!(a4.parity_symmetric());

        let a1 = make_equidistant_ansatz(1, 1.0, 1.0).unwrap();
        assert_eq!(a1.terms()[0].center, 0.0);
    }

    #[test]
    fn rejects_invalid_arguments() {
        assert!(matches!(make_equidistant_ansatz(0, 1.0, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_equidistant_ansatz(2, 0.0, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_equidistant_ansatz(2, 1.0, -1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            sign_pattern_ansatz(3, &[1.0, -1.0], 1.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(GaussianTerm::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn single_gaussian_at_origin() {
        let a = make_equidistant_ansatz(1, 1.0, 1.0).unwrap();
        let e = a.evaluate(0.0).unwrap();
        assert_eq!(e.value(), 1.0);
        assert_eq!(e.dlog, 0.0);
        assert_eq!(e.d2_ratio, -2.0);
    }

    #[test]
    fn pair_at_origin_matches_direct_differentiation() {
        // psi = 2 exp(-r^2 - a^2) cosh(2ar): psi''/psi at 0 is 4a^2 - 2.
        for a in [0.3, 1.0, 2.0, 5.0] {
            let e = make_equidistant_ansatz(2, a, 1.0).unwrap().evaluate(0.0).unwrap();
            assert_eq!(e.dlog, 0.0);
            assert!((e.d2_ratio - (4.0 * a * a - 2.0)).abs() < 1e-12 * (4.0 * a * a).max(1.0));
        }
    }

    #[test]
    fn far_tail_is_finite() {
        let a = make_equidistant_ansatz(3, 4.0, 1.0).unwrap();
        let e = a.evaluate(40.0).unwrap();
        assert!(e.log_magnitude.is_finite() && e.dlog.is_finite() && e.d2_ratio.is_finite());
        // direct value underflows long before this
        assert_eq!(a.psi(40.0), 0.0);
    }

    #[test]
    fn mixed_sign_exact_node_is_reported() {
        let a = sign_pattern_ansatz(2, &[1.0, -1.0], 1.5, 1.0).unwrap();
        match a.evaluate(0.0) {
            Err(Error::AtNode { lo, hi }) => assert!(lo < 0.0 && hi > 0.0),
            other => panic!("expected node error, got {other:?}"),
        }
    }

    #[test]
    fn nodes_of_simple_patterns() {
        let plus = make_equidistant_ansatz(5, 3.0, 1.0).unwrap();
        assert!(plus.find_nodes(-20.0, 20.0, 0.01).unwrap().is_empty());

        let odd = sign_pattern_ansatz(2, &[1.0, -1.0], 2.0, 1.0).unwrap();
        let n = odd.find_nodes(-10.0, 10.0, 0.013).unwrap();
        assert_eq!(n.len(), 1);
        assert!(n[0].abs() < 1e-12);

        // (+, -, +) at b = 3: two nodes close to the midpoints
        let a = sign_pattern_ansatz(3, &[1.0, -1.0, 1.0], 3.0, 1.0).unwrap();
        let n = a.find_nodes(-10.0, 10.0, 0.01).unwrap();
        assert_eq!(n.len(), 2);
        assert!((n[0] + 1.5).abs() < 0.1 && (n[1] - 1.5).abs() < 0.1);
    }

    #[test]
    fn sign_patterns_from_the_tables() {
        // (+,+,-,-): one flip, node between the two inner wells at 0
        let a = sign_pattern_ansatz(4, &[1.0, 1.0, -1.0, -1.0], 3.0, 1.0).unwrap();
        let n = a.find_nodes(-20.0, 20.0, 0.01).unwrap();
        assert_eq!(n.len(), 1);
        assert!(n[0].abs() < 1e-9);
        // (+,-,+) at spacing a: nodes near +-a/2
        let a = sign_pattern_ansatz(3, &[1.0, -1.0, 1.0], 4.0, 1.0).unwrap();
        let n = a.find_nodes(-20.0, 20.0, 0.01).unwrap();
        assert_eq!(n.len(), 2);
        assert!((n[0] + 2.0).abs() < 1e-3 && (n[1] - 2.0).abs() < 1e-3);
        // all-plus pattern is the plain equidistant ansatz
        assert_eq!(
            sign_pattern_ansatz(6, &[1.0; 6], 2.0, 0.7).unwrap(),
            make_equidistant_ansatz(6, 2.0, 0.7).unwrap()
        );
    }

    #[test]
    fn json_forms() {
        let a: GaussianSuperposition =
            serde_json::from_str(r#"{"terms":[{"center":-1,"width":1,"weight":1},{"center":1,"width":1,"weight":1}]}"#)
                .unwrap();
        assert!(a.parity_symmetric());
        let b: GaussianSuperposition =
            serde_json::from_str(r#"{"equidistant":{"M":2,"spacing":1,"width":1}}"#).unwrap();
        assert_eq!(a, b);
        let c: GaussianSuperposition =
            serde_json::from_str(r#"{"equidistant":{"M":3,"spacing":2,"pattern":[1,-1,1]}}"#).unwrap();
        assert_eq!(c.terms()[1].weight, -1.0);
        assert!(serde_json::from_str::<GaussianSuperposition>(
            r#"{"equidistant":{"M":2,"spacing":1,"bogus":3}}"#
        )
        .is_err());
        let round: GaussianSuperposition = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(round, c);
    }

    fn random_ansatz() -> impl Strategy<Value = GaussianSuperposition> {
        (1usize..=8, 0.1f64..10.0, 0.5f64..2.0, prop::collection::vec(0.2f64..3.0, 8)).prop_map(
            |(m, s, w, weights)| {
                let terms = equidistant_centers(m, s)
                    .into_iter()
                    .zip(weights)
                    .map(|(c, wt)| GaussianTerm::new(c, w, wt).unwrap())
                    .collect();
                GaussianSuperposition::new(terms).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn derivatives_match_finite_differences(a in random_ansatz(), u in -1.0f64..1.0) {
            let (lo, hi) = a.center_range();
            let r = 0.5 * (lo + hi) + u * (0.5 * (hi - lo) + 2.0);
            let h = 1e-4;
            let e0 = a.evaluate(r).unwrap();
            // psi relative to psi(r), rebuilt from log magnitude and sign
            let rel = |x: f64| {
                let e = a.evaluate(x).unwrap();
                e.sign * e0.sign * (e.log_magnitude - e0.log_magnitude).exp()
            };
            // fourth-order centered stencils: steep inter-well transitions make
            // the second-order truncation error visible at this step
            let (p1, m1, p2, m2) = (rel(r + h), rel(r - h), rel(r + 2.0 * h), rel(r - 2.0 * h));
            let d1 = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
            let d2 = (16.0 * (p1 + m1) - (p2 + m2) - 30.0) / (12.0 * h * h);
            let scale1 = e0.dlog.abs().max(1.0);
            let scale2 = e0.d2_ratio.abs().max(e0.dlog * e0.dlog).max(1.0);
            prop_assert!((d1 - e0.dlog).abs() <= 1e-6 * scale1, "d1 {} vs {}", d1, e0.dlog);
            prop_assert!((d2 - e0.d2_ratio).abs() <= 1e-6 * scale2, "d2 {} vs {}", d2, e0.d2_ratio);
            // identity d2 = dlog^2 + (dlog)'
            let dl = |x: f64| a.evaluate(x).unwrap().dlog;
            let ddlog = (8.0 * (dl(r + h) - dl(r - h)) - (dl(r + 2.0 * h) - dl(r - 2.0 * h))) / (12.0 * h);
            prop_assert!((e0.d2_ratio - (e0.dlog * e0.dlog + ddlog)).abs() <= 1e-6 * scale2);
        }

        #[test]
        fn parity_symmetry(m in 1usize..=8, s in 0.1f64..10.0, w in 0.5f64..2.0, r in 0.0f64..30.0) {
            let a = make_equidistant_ansatz(m, s, w).unwrap();
            prop_assert!(a.parity_symmetric());
            let (p, n) = (a.evaluate(r).unwrap(), a.evaluate(-r).unwrap());
            prop_assert!((p.log_magnitude - n.log_magnitude).abs() <= 1e-12 * p.log_magnitude.abs().max(1.0));
            prop_assert!((p.dlog + n.dlog).abs() <= 1e-12 * p.dlog.abs().max(1.0));
            prop_assert!((p.d2_ratio - n.d2_ratio).abs() <= 1e-12 * p.d2_ratio.abs().max(1.0));
        }

        #[test]
        fn stable_for_positive_weights(m in 1usize..=8, s in 0.01f64..20.0, w in 0.5f64..2.0, r in -100.0f64..100.0) {
            let e = make_equidistant_ansatz(m, s, w).unwrap().evaluate(r).unwrap();
            prop_assert!(e.log_magnitude.is_finite() && e.dlog.is_finite() && e.d2_ratio.is_finite());
            prop_assert_eq!(e.sign, 1.0);
        }

        #[test]
        fn node_count_equals_flip_count(
            m in 1usize..=8,
            s in 3.0f64..6.0,
            bits in prop::collection::vec(any::<bool>(), 8),
        ) {
            let pattern: Vec<f64> = bits[..m].iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
            let a = sign_pattern_ansatz(m, &pattern, s, 1.0).unwrap();
            let (lo, hi) = a.center_range();
            let nodes = a.find_nodes(lo - 6.0, hi + 6.0, 0.01).unwrap();
            prop_assert_eq!(nodes.len(), flip_count(&pattern));
            prop_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
