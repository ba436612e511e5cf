//! Second-order finite differences for `-psi'' + V psi = E psi` with
//! Dirichlet walls, solved by Sturm-count bisection and inverse iteration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;

/// Interior points `r_i = -L + (i+1) h`, `i = 0..N`, `h = 2L/(N+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub half_width: f64,
    pub n_points: usize,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidArgument(format!("half-width must be positive, got {half_width}")));
        }
        if n_points < Self::MIN_POINTS {
            return Err(Error::InvalidArgument(format!(
                "need at least {} grid points, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { half_width, n_points })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.n_points as f64 + 1.0)
    }

    pub fn point(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 1.0) * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Same walls, half the step.
    pub fn refined(&self) -> Self {
        Self { half_width: self.half_width, n_points: 2 * self.n_points + 1 }
    }
}

/// Symmetric tridiagonal matrix: `diag[i]`, and `off[i]` couples `i` and `i+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn norm_inf(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `sigma`: negative pivots of
    /// `LDL^T = T - sigma I`, with tiny pivots pushed to `-pivmin`.
    pub fn sturm_count(&self, sigma: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.off.iter().map(|e| e * e).fold(1.0, f64::max);
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.len() {
            let e2 = if i > 0 { self.off[i - 1] * self.off[i - 1] } else { 0.0 };
            d = self.diag[i] - sigma - if i > 0 { e2 / d } else { 0.0 };
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            out[i] = v;
        }
    }
}

/// `-d^2/dr^2 + V` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteHamiltonian {
    pub grid: Grid,
    pub matrix: Tridiagonal,
    /// `V` at the outermost grid points, for the tail check.
    pub edge_potential: (f64, f64),
}

pub fn discretize(potential: &PotentialSpec, grid: Grid) -> Result<DiscreteHamiltonian> {
    if let Some(r) = potential.singular_point() {
        return Err(Error::SingularPotential { r });
    }
    let h = grid.step();
    let k = 1.0 / (h * h);
    let mut diag = Vec::with_capacity(grid.n_points);
    for i in 0..grid.n_points {
        let r = grid.point(i);
        let v = potential.value(r).map_err(|_| Error::SingularPotential { r })?;
        diag.push(2.0 * k + v);
    }
    let edge_potential = (diag[0] - 2.0 * k, diag[grid.n_points - 1] - 2.0 * k);
    Ok(DiscreteHamiltonian {
        grid,
        matrix: Tridiagonal { diag, off: vec![-k; grid.n_points - 1] },
        edge_potential,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Bisection stops at `rel_tol * max(1, |E|)`.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Vectors whose eigenvalues are closer than this (relative) are orthogonalized.
    pub ortho_gap: f64,
    /// Node counting ignores entries below this fraction of `max |psi|`.
    pub node_floor: f64,
    /// Solve even and odd blocks separately when `V` is mirror symmetric.
    pub use_parity: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_iter: 50, ortho_gap: 1e-8, node_floor: 1e-13, use_parity: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub grid: Grid,
    pub energies: Vec<f64>,
    /// Sampled on `grid.points()`, normalized to `sum psi^2 h = 1`.
    pub eigenfunctions: Vec<Vec<f64>>,
    pub node_counts: Vec<usize>,
    /// `max_i |(H psi - E psi)_i|`
    pub residuals: Vec<f64>,
    /// `min(V(-L), V(L)) - E_{k-1}`
    pub tail_margin: f64,
}

/// The recommended wall clearance `V(+-L) - E_k`.
pub const TAIL_MARGIN: f64 = 25.0;

pub const ARGMAX_TIE: f64 = 1e-6;

impl Spectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn points(&self) -> Vec<f64> {
        self.grid.points()
    }

    /// Location of the largest `|psi_k|^2`; ties within 1e-6 (relative) go left.
    /// The tolerance absorbs the parity mixing of a tight doublet.
    pub fn density_argmax(&self, k: usize) -> f64 {
        let psi = &self.eigenfunctions[k];
        let max = psi.iter().fold(0.0f64, |m, p| m.max(p * p));
        let i = psi.iter().position(|p| p * p >= max * (1.0 - ARGMAX_TIE)).unwrap_or(0);
        self.grid.point(i)
    }

    /// `level,energy,nodes,residual`
    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,energy,nodes,residual\n");
        for k in 0..self.len() {
            s.push_str(&format!(
                "{k},{},{},{}\n",
                crate::csvfmt::num(self.energies[k]),
                self.node_counts[k],
                crate::csvfmt::num(self.residuals[k])
            ));
        }
        s
    }

    /// `r,psi0,psi1,...`, each column scaled by `scale`.
    pub fn eigenfunctions_csv(&self, scale: f64) -> String {
        let mut s = String::from("r");
        for k in 0..self.len() {
            s.push_str(&format!(",psi{k}"));
        }
        s.push('\n');
        for (i, r) in self.points().into_iter().enumerate() {
            s.push_str(&crate::csvfmt::num(r));
            for psi in &self.eigenfunctions {
                s.push(',');
                s.push_str(&crate::csvfmt::num(scale * psi[i]));
            }
            s.push('\n');
        }
        s
    }
}

/// The `k`-th (0-based) eigenvalue by bisection on the Sturm count.
fn bisect_eigenvalue(t: &Tridiagonal, k: usize, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    // invariant: count(lo) <= k < count(hi)
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            return mid;
        }
        if t.sturm_count(mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// Partial-pivot LU of `T - sigma I`, as in LAPACK's `dgttrf`.
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swap: Vec<bool>,
}

impl ShiftedLu {
    fn new(t: &Tridiagonal, sigma: f64) -> Self {
        let n = t.len();
        let mut dl = t.off.clone();
        let mut d: Vec<f64> = t.diag.iter().map(|a| a - sigma).collect();
        let mut du = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swap = vec![false; n];
        let tiny = f64::EPSILON * t.norm_inf().max(1.0);
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                swap[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self { dl, d, du, du2, swap }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.du2[i] * b[i + 2];
            }
            b[i] = v / self.d[i];
        }
    }
}

fn start_vector(n: usize, k: usize) -> Vec<f64> {
    // SplitMix64 draws, fixed per level so runs are reproducible
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (k as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// Solution of `(T - sigma I) x = e_r` for the twist index `r` that
/// minimizes `|gamma_r|`, scaled so `x_r = 1`: one inverse-iteration step from
/// the best unit start vector. Built from the two one-sided `LDL^T` sweeps, so
/// decaying tails are accurate componentwise instead of sitting at a noise
/// floor of `eps |T| / gap`.
fn twisted_vector(t: &Tridiagonal, sigma: f64) -> Vec<f64> {
    let n = t.len();
    let pivmin = f64::MIN_POSITIVE * t.off.iter().map(|e| e * e).fold(1.0, f64::max);
    let guard = |d: f64| if d.abs() < pivmin { -pivmin } else { d };
    let mut dp = vec![0.0; n];
    dp[0] = guard(t.diag[0] - sigma);
    for i in 1..n {
        dp[i] = guard(t.diag[i] - sigma - t.off[i - 1] * t.off[i - 1] / dp[i - 1]);
    }
    let mut dm = vec![0.0; n];
    dm[n - 1] = guard(t.diag[n - 1] - sigma);
    for i in (0..n - 1).rev() {
        dm[i] = guard(t.diag[i] - sigma - t.off[i] * t.off[i] / dm[i + 1]);
    }
    let r = (0..n)
        .min_by(|&i, &j| {
            let g = |k: usize| (dp[k] + dm[k] - (t.diag[k] - sigma)).abs();
            g(i).total_cmp(&g(j))
        })
        .unwrap_or(0);
    let mut x = vec![0.0; n];
    x[r] = 1.0;
    for i in (0..r).rev() {
        x[i] = -(t.off[i] / dp[i]) * x[i + 1];
    }
    for i in r..n - 1 {
        x[i + 1] = -(t.off[i] / dm[i + 1]) * x[i];
    }
    x
}

fn normalize(x: &mut [f64]) -> f64 {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

fn residual_inf(t: &Tridiagonal, x: &[f64], e: f64, work: &mut [f64]) -> f64 {
    t.apply(x, work);
    work.iter().zip(x).map(|(tx, xi)| (tx - e * xi).abs()).fold(0.0, f64::max)
}

/// Lowest `k` eigenpairs of one tridiagonal block, vectors unit-normalized.
fn block_pairs(t: &Tridiagonal, k: usize, opts: &EigenOptions) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = t.len();
    let (glo, ghi) = t.gershgorin();
    let norm = t.norm_inf();
    // upper bracket for all k levels, refined once so each bisection starts short
    let mut top = ghi;
    if t.sturm_count(top) <= k {
        top = ghi + 1.0;
    }
    let mut energies = Vec::with_capacity(k);
    let mut lo = glo - 1.0;
    for j in 0..k {
        let e = bisect_eigenvalue(t, j, lo, top, opts.rel_tol);
        energies.push(e);
        lo = (e - opts.rel_tol * e.abs().max(1.0)).min(e);
        if t.sturm_count(lo) > j {
            lo = glo - 1.0;
        }
    }

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut work = vec![0.0; n];
    let threshold = |e: f64| opts.rel_tol * e.abs().max(1.0) + 64.0 * f64::EPSILON * norm;
    for (j, &e) in energies.iter().enumerate() {
        let cluster: Vec<usize> = (0..j)
            .filter(|&i| (energies[i] - e).abs() <= opts.ortho_gap * e.abs().max(1.0))
            .collect();
        let mut x = twisted_vector(t, e);
        let mut res = f64::INFINITY;
        let mut converged = false;
        if normalize(&mut x) > 0.0 && x.iter().all(|v| v.is_finite()) {
            res = residual_inf(t, &x, e, &mut work);
            converged = res <= threshold(e) && cluster.is_empty();
        }
        if !converged && !cluster.is_empty() && res.is_finite() {
            // keep the twisted vector as the start, then separate it from its cluster
        } else if !converged {
            x = start_vector(n, j);
            normalize(&mut x);
        }
        let lu = (!converged).then(|| ShiftedLu::new(t, e));
        for _ in 0..if converged { 0 } else { opts.max_iter } {
            let lu = lu.as_ref().expect("factorized when iterating");
            lu.solve(&mut x);
            for _ in 0..2 {
                for &i in &cluster {
                    let dot: f64 = x.iter().zip(&vectors[i]).map(|(a, b)| a * b).sum();
                    x.iter_mut().zip(&vectors[i]).for_each(|(a, b)| *a -= dot * b);
                }
            }
            if normalize(&mut x) == 0.0 || x.iter().any(|v| !v.is_finite()) {
                break;
            }
            res = residual_inf(t, &x, e, &mut work);
            if res <= threshold(e) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::SolverFailure { shift: e, residual: res });
        }
        vectors.push(x);
    }
    Ok((energies, vectors))
}

/// Mirror-symmetrized diagonal, if `T` is palindromic up to rounding.
fn palindromic(t: &Tridiagonal) -> Option<Vec<f64>> {
    let n = t.len();
    let tol = 64.0 * f64::EPSILON * t.norm_inf();
    let off_ok = (0..n - 1).all(|i| t.off[i] == t.off[n - 2 - i]);
    let diag_ok = (0..n / 2).all(|i| (t.diag[i] - t.diag[n - 1 - i]).abs() <= tol);
    (off_ok && diag_ok).then(|| (0..n).map(|i| 0.5 * (t.diag[i] + t.diag[n - 1 - i])).collect())
}

/// Even and odd blocks of a palindromic `T`, and the maps back to full vectors.
fn parity_pairs(t: &Tridiagonal, diag: &[f64], k: usize, opts: &EigenOptions) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = t.len();
    let m = n / 2;
    let s2 = std::f64::consts::SQRT_2;
    let (even, odd) = if n % 2 == 0 {
        let o = t.off[m - 1];
        let mut de = diag[..m].to_vec();
        let mut dd = de.clone();
        de[m - 1] += o;
        dd[m - 1] -= o;
        let off = t.off[..m - 1].to_vec();
        (Tridiagonal { diag: de, off: off.clone() }, Tridiagonal { diag: dd, off })
    } else {
        // center point kept in the even block with its couplings scaled by sqrt 2
        let mut off = t.off[..m].to_vec();
        off[m - 1] *= s2;
        let even = Tridiagonal { diag: diag[..=m].to_vec(), off };
        let odd = Tridiagonal { diag: diag[..m].to_vec(), off: t.off[..m - 1].to_vec() };
        (even, odd)
    };
    let mut out = Vec::with_capacity(2 * k);
    for (block, sign) in [(&even, 1.0), (&odd, -1.0)] {
        let (es, vs) = block_pairs(block, k.min(block.len()), opts)?;
        for (e, y) in es.into_iter().zip(vs) {
            let mut x = vec![0.0; n];
            for i in 0..m {
                x[i] = y[i] / s2;
                x[n - 1 - i] = sign * y[i] / s2;
            }
            if n % 2 == 1 && sign > 0.0 {
                x[m] = y[m];
            }
            out.push((e, x));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.truncate(k);
    Ok(out)
}

/// Lowest `k` eigenpairs of the discretized operator.
///
/// A mirror-symmetric operator is split into its even and odd blocks, so
/// the members of a tight doublet come out with exact parity however small
/// their splitting.
pub fn eigen_lowest(op: &DiscreteHamiltonian, k: usize, opts: EigenOptions) -> Result<Spectrum> {
    let t = &op.matrix;
    let n = t.len();
    if k == 0 || k > n / 4 {
        return Err(Error::InvalidArgument(format!("levels must be in 1..={} for {n} points, got {k}", n / 4)));
    }
    let pairs = match palindromic(t).filter(|_| opts.use_parity) {
        Some(diag) => parity_pairs(t, &diag, k, &opts)?,
        None => {
            let (es, vs) = block_pairs(t, k, &opts)?;
            es.into_iter().zip(vs).collect()
        }
    };
    let h = op.grid.step();
    let mut work = vec![0.0; n];
    let mut energies = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (e, mut x) in pairs {
        fix_sign(&mut x);
        residuals.push(residual_inf(t, &x, e, &mut work) / h.sqrt());
        energies.push(e);
        vectors.push(x);
    }

    let node_counts = vectors.iter().map(|v| count_nodes(v, opts.node_floor)).collect();
    let scale = h.sqrt().recip();
    let eigenfunctions = vectors.into_iter().map(|v| v.into_iter().map(|x| x * scale).collect()).collect();
    let edge = op.edge_potential.0.min(op.edge_potential.1);
    Ok(Spectrum {
        grid: op.grid,
        tail_margin: edge - energies[k - 1],
        energies,
        eigenfunctions,
        node_counts,
        residuals,
    })
}

/// Positive at the leftmost local maximum of `|psi|` that rises above
/// 1e-6 of the global maximum.
fn fix_sign(x: &mut [f64]) {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-6 * max;
    let n = x.len();
    let idx = (0..n).find(|&i| {
        let a = x[i].abs();
        a >= floor && (i == 0 || a >= x[i - 1].abs()) && (i + 1 == n || a >= x[i + 1].abs())
    });
    if let Some(i) = idx {
        if x[i] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Sign changes among entries above `floor * max |x|`.
pub fn count_nodes(x: &[f64], floor: f64) -> usize {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = floor * max;
    let mut last = 0.0;
    let mut n = 0;
    for &v in x {
        if v.abs() < cut {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            n += 1;
        }
        last = v;
    }
    n
}

pub fn solve(potential: &PotentialSpec, grid: Grid, k: usize) -> Result<Spectrum> {
    eigen_lowest(&discretize(potential, grid)?, k, EigenOptions::default())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub coarse: Spectrum,
    pub fine: Spectrum,
    /// `E_fine + (E_fine - E_coarse)/3`
    pub extrapolated: Vec<f64>,
    /// `|E_fine - E_coarse|/3`
    pub estimates: Vec<f64>,
    /// Levels whose estimate exceeds the caller's tolerance.
    pub flagged: Vec<usize>,
}

/// Solve on `grid` and on the grid with half the step, then
/// Richardson-extrapolate the second-order error away.
pub fn convergence_check(potential: &PotentialSpec, grid: Grid, k: usize, tol: f64) -> Result<ConvergenceReport> {
    let coarse = solve(potential, grid, k)?;
    let fine = solve(potential, grid.refined(), k)?;
    let estimates: Vec<f64> = coarse.energies.iter().zip(&fine.energies).map(|(c, f)| (f - c).abs() / 3.0).collect();
    let extrapolated = coarse.energies.iter().zip(&fine.energies).map(|(c, f)| f + (f - c) / 3.0).collect();
    let flagged = estimates.iter().enumerate().filter(|(_, e)| **e > tol).map(|(i, _)| i).collect();
    Ok(ConvergenceReport { coarse, fine, extrapolated, estimates, flagged })
}
