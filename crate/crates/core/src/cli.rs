//! The `qeswell` command line.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analysis::census::{leading_order_energy, well_census, LeadingOrder, WellCensus, DEFAULT_SCAN_POINTS};
use crate::analysis::nodal::{nodal_pattern, render_tokens, Token, DEFAULT_THRESHOLD};
use crate::analysis::scan::{alc_scan, relocalization_scan};
use crate::analysis::tables::reference_table;
use crate::config::{self, GridConfig, ProblemConfig, RectConfig, ScanConfig, SexticConfig, DEFAULT_POINTS};
use crate::csvfmt;
use crate::error::Error;
use crate::fd::{convergence_check, solve, Grid, Spectrum, TAIL_MARGIN};
use crate::potential::PotentialSpec;
use crate::qes::sextic_qes;
use crate::rect::{rdw_approx, rdw_spectrum, rdw_wavefunction, RectDoubleWell};
use crate::verify::{run_verify, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "qeswell", version, about = "Multi-Gaussian QES potentials, spectra and nodal patterns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output path prefix; files are written as `<out>_<artifact>.<ext>`.
    #[arg(long, global = true, default_value = "qeswell")]
    pub out: String,
    /// Grid half-width L.
    #[arg(long = "grid-L", global = true)]
    pub grid_l: Option<f64>,
    /// Number of interior grid points N.
    #[arg(long = "grid-N", global = true)]
    pub grid_n: Option<usize>,
    /// Number of levels to compute.
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Factor applied to written wave functions (default 6 for `potential`, 1 otherwise).
    #[arg(long = "psi-scale", global = true)]
    pub psi_scale: Option<f64>,
    /// Worker threads for scans (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Expected nodal table: a file of ASCII rows, or `builtin` / `builtin:M`.
    #[arg(long, global = true)]
    pub expect: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Potential curve, scaled ground state and well census.
    Potential,
    /// Lowest levels and eigenfunctions.
    Solve,
    /// Gap scan E1 - E0 along a one-parameter family.
    ScanAlc,
    /// Ground-density argmax scan along a one-parameter family.
    ScanReloc,
    /// Nodal patterns of the lowest multiplet, optionally against a table.
    Nodal,
    /// Sextic QES oracle table.
    Sextic,
    /// Exact rectangular double well against its approximations.
    Rectwell,
    /// Residual and closed-form self-checks.
    Verify,
}

/// Exit status classes.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Solver(String),
    Mismatch(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Mismatch(_) => 3,
        }
    }

    /// One-line JSON diagnostic for stderr.
    pub fn diagnostic(&self) -> String {
        let (kind, msg) = match self {
            Failure::Validation(m) => ("validation", m),
            Failure::Solver(m) => ("solver", m),
            Failure::Mismatch(m) => ("mismatch", m),
        };
        json!({ "error": kind, "code": self.code(), "message": msg }).to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.diagnostic())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_solver_failure() {
            Failure::Solver(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

type Outcome = std::result::Result<Vec<PathBuf>, Failure>;

/// Parses the arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("{}", Failure::Validation(e.to_string().trim().to_string()).diagnostic());
            return 1;
        }
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(f) => {
            eprintln!("{}", f.diagnostic());
            f.code()
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match cli.command {
        Command::Potential => cmd_potential(cli),
        Command::Solve => cmd_solve(cli),
        Command::ScanAlc | Command::ScanReloc => cmd_scan(cli),
        Command::Nodal => cmd_nodal(cli),
        Command::Sextic => cmd_sextic(cli),
        Command::Rectwell => cmd_rectwell(cli),
        Command::Verify => cmd_verify(cli),
    }
}

fn required<T: serde::de::DeserializeOwned>(cli: &Cli) -> Result<T, Failure> {
    let path = cli.config.as_ref().ok_or_else(|| Failure::Validation("--config is required".into()))?;
    Ok(config::load(path)?)
}

fn optional<T: serde::de::DeserializeOwned + Default>(cli: &Cli) -> Result<T, Failure> {
    match &cli.config {
        Some(p) => Ok(config::load(p)?),
        None => Ok(T::default()),
    }
}

fn grid(cli: &Cli, cfg: &GridConfig, default_l: f64) -> Result<Grid, Failure> {
    let l = cli.grid_l.or(cfg.half_width).unwrap_or(default_l);
    let n = cli.grid_n.or(cfg.n_points).unwrap_or(DEFAULT_POINTS);
    Ok(Grid::new(l, n)?)
}

fn write(cli: &Cli, artifact: &str, body: &str, files: &mut Vec<PathBuf>) -> Result<(), Failure> {
    let path = PathBuf::from(format!("{}_{artifact}", cli.out));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    fs::write(&path, body).map_err(|e| io_failure(&path, e))?;
    files.push(path);
    Ok(())
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Validation(format!("cannot write {}: {e}", path.display()))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("artifacts serialize");
    s.push('\n');
    s
}

/// JSON artifacts, each re-parseable under a strict schema.
pub mod artifacts {
    use serde::{Deserialize, Serialize};

    use crate::analysis::census::Maximum;
    use crate::analysis::nodal::NodalPattern;
    use crate::analysis::scan::{GapMinimum, Jump};

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct CensusEntry {
        pub location: f64,
        pub value: f64,
        pub curvature: f64,
        /// `V(a) + sqrt(V''(a)/2)`; absent for a flat minimum.
        pub leading_order: Option<f64>,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Census {
        pub interval: [f64; 2],
        pub minima: Vec<CensusEntry>,
        pub maxima: Vec<Maximum>,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Convergence {
        pub tolerance: f64,
        pub coarse: Vec<f64>,
        pub fine: Vec<f64>,
        pub extrapolated: Vec<f64>,
        pub estimates: Vec<f64>,
        pub flagged: Vec<usize>,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct FailedRow {
        pub param: f64,
        pub error: String,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Scan {
        pub parameter: String,
        pub gap_minima: Vec<GapMinimum>,
        pub jumps: Vec<Jump>,
        pub failed: Vec<FailedRow>,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct NodalRow {
        pub n: usize,
        pub energy: f64,
        pub nodes: usize,
        pub ascii: String,
        pub glyphs: String,
        pub pattern: NodalPattern,
        pub expected: Option<String>,
        pub matches: Option<bool>,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Nodal {
        pub wells: usize,
        pub threshold: f64,
        pub rows: Vec<NodalRow>,
    }
}

fn census_artifact(census: &WellCensus) -> artifacts::Census {
    let minima = census
        .minima
        .iter()
        .map(|m| artifacts::CensusEntry {
            location: m.location,
            value: m.value,
            curvature: m.curvature,
            leading_order: leading_order_energy(m, LeadingOrder::SquareRoot).ok(),
        })
        .collect();
    artifacts::Census { interval: census.interval, minima, maxima: census.maxima.clone() }
}

fn tail_warning(sp: &Spectrum) {
    if sp.tail_margin < TAIL_MARGIN {
        eprintln!(
            "{}",
            json!({ "warning": "tail", "message": format!("V at the walls exceeds the top level by only {:.3}; consider a larger --grid-L", sp.tail_margin) })
        );
    }
}

fn cmd_potential(cli: &Cli) -> Outcome {
    let cfg: ProblemConfig = required(cli)?;
    let v = cfg.potential.build()?;
    let g = grid(cli, &cfg.grid, v.default_half_width())?;
    let r = g.points();
    let psi: Vec<f64> = match &v {
        PotentialSpec::Qes(q) => r.iter().map(|&x| q.ansatz.psi(x)).collect(),
        PotentialSpec::Sextic(s) => r.iter().map(|&x| s.psi(x)).collect(),
        other => solve(other, g, 1)?.eigenfunctions.swap_remove(0),
    };
    let max = psi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let scale = cli.psi_scale.unwrap_or(6.0) / if max > 0.0 { max } else { 1.0 };
    let mut csv = String::from("r,V,psi\n");
    for (x, p) in r.iter().zip(&psi) {
        let vx = v.value(*x).unwrap_or(f64::NAN);
        csv.push_str(&csvfmt::row(&[*x, vx, scale * p]));
        csv.push('\n');
    }
    let l = g.half_width;
    let census = well_census(&v, [-l, l], DEFAULT_SCAN_POINTS)?;
    let mut files = Vec::new();
    write(cli, "potential.csv", &csv, &mut files)?;
    write(cli, "census.json", &to_json(&census_artifact(&census)), &mut files)?;
    Ok(files)
}

fn cmd_solve(cli: &Cli) -> Outcome {
    let cfg: ProblemConfig = required(cli)?;
    let v = cfg.potential.build()?;
    let g = grid(cli, &cfg.grid, v.default_half_width())?;
    let k = cli.levels.or(cfg.levels).unwrap_or(4);
    let mut files = Vec::new();
    let sp = match cfg.tolerance {
        Some(tol) => {
            let rep = convergence_check(&v, g, k, tol)?;
            let body = artifacts::Convergence {
                tolerance: tol,
                coarse: rep.coarse.energies.clone(),
                fine: rep.fine.energies.clone(),
                extrapolated: rep.extrapolated.clone(),
                estimates: rep.estimates.clone(),
                flagged: rep.flagged.clone(),
            };
            write(cli, "convergence.json", &to_json(&body), &mut files)?;
            if !rep.flagged.is_empty() {
                eprintln!("{}", json!({ "warning": "convergence", "flagged": rep.flagged }));
            }
            rep.fine
        }
        None => solve(&v, g, k)?,
    };
    tail_warning(&sp);
    write(cli, "spectrum.csv", &sp.to_csv(), &mut files)?;
    write(cli, "eigenfunctions.csv", &sp.eigenfunctions_csv(cli.psi_scale.unwrap_or(1.0)), &mut files)?;
    Ok(files)
}

fn cmd_scan(cli: &Cli) -> Outcome {
    let cfg: ScanConfig = required(cli)?;
    let values = cfg.values.values()?;
    let l = cfg.family.default_half_width(&values)?;
    let g = grid(cli, &cfg.grid, l)?;
    let family = cfg.family.family(g)?;
    let res = if cli.command == Command::ScanAlc {
        alc_scan(family.as_ref(), &values, cli.levels.or(cfg.levels).unwrap_or(2), cli.jobs)?
    } else {
        relocalization_scan(family.as_ref(), &values, cli.levels.or(cfg.levels).unwrap_or(1), cli.jobs)?
    };
    let mut files = Vec::new();
    write(cli, "scan.csv", &res.to_csv(), &mut files)?;
    let summary = artifacts::Scan {
        parameter: res.parameter.clone(),
        gap_minima: res.gap_minima.clone(),
        jumps: res.jumps.clone(),
        failed: res
            .rows
            .iter()
            .filter_map(|r| r.error.clone().map(|error| artifacts::FailedRow { param: r.param, error }))
            .collect(),
    };
    write(cli, "scan.json", &to_json(&summary), &mut files)?;
    Ok(files)
}

fn expected_table(spec: &str, m: usize) -> Result<Vec<Vec<Token>>, Failure> {
    if let Some(rest) = spec.strip_prefix("builtin") {
        let m = match rest.strip_prefix(':') {
            Some(n) => n.parse().map_err(|_| Failure::Validation(format!("bad table id {spec:?}")))?,
            None if rest.is_empty() => m,
            None => return Err(Failure::Validation(format!("bad table id {spec:?}"))),
        };
        return reference_table(m).ok_or_else(|| Failure::Validation(format!("no built-in table for M = {m}")));
    }
    let text = fs::read_to_string(spec).map_err(|e| Failure::Validation(format!("cannot read {spec}: {e}")))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| Token::parse_row(l).map_err(Failure::from))
        .collect()
}

fn cmd_nodal(cli: &Cli) -> Outcome {
    let cfg: ProblemConfig = required(cli)?;
    let v = cfg.potential.build()?;
    let g = grid(cli, &cfg.grid, v.default_half_width())?;
    let l = g.half_width;
    let census = well_census(&v, [-l, l], DEFAULT_SCAN_POINTS)?;
    let m = census.minima.len();
    let k = cli.levels.or(cfg.levels).unwrap_or(m.max(1));
    let sp = solve(&v, g, k)?;
    tail_warning(&sp);
    let threshold = cfg.threshold.unwrap_or(DEFAULT_THRESHOLD);
    let r = sp.points();
    let patterns = sp
        .eigenfunctions
        .iter()
        .map(|p| nodal_pattern(&r, p, &census, threshold))
        .collect::<crate::Result<Vec<_>>>()?;
    let expected = cli.expect.as_deref().map(|e| expected_table(e, m)).transpose()?;

    let mut text = String::new();
    let mut rows = Vec::new();
    let mut mismatched = Vec::new();
    for (n, p) in patterns.iter().enumerate() {
        let want = expected.as_ref().and_then(|t| t.get(n));
        let ok = want.map(|w| p.matches(w));
        if ok == Some(false) {
            mismatched.push(n);
        }
        text.push_str(&format!("n={n} {}  {}", p.render_ascii(), p.render_glyphs()));
        if let Some(w) = want {
            text.push_str(&format!("  expected {}{}", render_tokens(w), if ok == Some(true) { "" } else { "  MISMATCH" }));
        }
        text.push('\n');
        rows.push(artifacts::NodalRow {
            n,
            energy: sp.energies[n],
            nodes: p.node_count(),
            ascii: p.render_ascii(),
            glyphs: p.render_glyphs(),
            pattern: p.clone(),
            expected: want.map(|w| render_tokens(w)),
            matches: ok,
        });
    }
    if let Some(t) = &expected {
        if t.len() != patterns.len() {
            mismatched.extend(patterns.len().min(t.len())..patterns.len().max(t.len()));
        }
    }
    let mut files = Vec::new();
    write(cli, "nodal.txt", &text, &mut files)?;
    write(cli, "nodal.json", &to_json(&artifacts::Nodal { wells: m, threshold, rows }), &mut files)?;
    if !mismatched.is_empty() {
        return Err(Failure::Mismatch(format!("rows {mismatched:?} differ from the expected table")));
    }
    Ok(files)
}

fn cmd_sextic(cli: &Cli) -> Outcome {
    let cfg: SexticConfig = optional(cli)?;
    let g = grid(cli, &cfg.grid, 4.0)?;
    let k = cli.levels.unwrap_or(cfg.levels);
    let mut csv = String::from("alpha,exact_E0");
    for j in 0..k {
        csv.push_str(&format!(",E{j},E{j}_extrapolated,E{j}_estimate"));
    }
    csv.push_str(",shape_minima,census_minima\n");
    for &alpha in &cfg.alphas {
        let s = sextic_qes(alpha);
        let v = PotentialSpec::Sextic(s);
        let rep = convergence_check(&v, g, k, cfg.tolerance)?;
        let census = well_census(&v, [-g.half_width, g.half_width], DEFAULT_SCAN_POINTS)?;
        let mut vals = vec![alpha, s.ground_energy];
        for j in 0..k {
            vals.extend([rep.fine.energies[j], rep.extrapolated[j], rep.estimates[j]]);
        }
        csv.push_str(&csvfmt::row(&vals));
        csv.push_str(&format!(",{},{}\n", s.shape().minima(), census.minima.len()));
    }
    let mut files = Vec::new();
    write(cli, "sextic.csv", &csv, &mut files)?;
    Ok(files)
}

fn cmd_rectwell(cli: &Cli) -> Outcome {
    let cfg: RectConfig = optional(cli)?;
    let well = RectDoubleWell::new(cfg.a2, cfg.b2, cfg.c2)?;
    let k = cli.levels.unwrap_or(cfg.levels);
    if k == 0 || cfg.samples < 2 {
        return Err(Failure::Validation("rectwell needs at least one level and two samples".into()));
    }
    let exact = rdw_spectrum(&well, k)?;
    let (left, right) = rdw_approx(&well, cfg.p_max, cfg.q_max);
    let mut union: Vec<f64> = left.iter().chain(&right).copied().collect();
    union.sort_by(f64::total_cmp);
    let mut csv = String::from("n,exact,approx,rel_dev\n");
    for (n, &e) in exact.iter().enumerate() {
        let approx = union.get(n).copied().unwrap_or(f64::NAN);
        let dev = (e - approx).abs() / approx.abs().max(1.0);
        csv.push_str(&format!("{n},{}\n", csvfmt::row(&[e, approx, dev])));
    }
    let w = RectDoubleWell::WALL;
    let r: Vec<f64> = (0..cfg.samples).map(|i| -w + 2.0 * w * i as f64 / (cfg.samples - 1) as f64).collect();
    let waves = exact.iter().map(|&e| rdw_wavefunction(&well, e, &r)).collect::<crate::Result<Vec<_>>>()?;
    let scale = cli.psi_scale.unwrap_or(1.0);
    let mut psi = String::from("r,V");
    for n in 0..k {
        psi.push_str(&format!(",psi{n}"));
    }
    psi.push('\n');
    for (i, &x) in r.iter().enumerate() {
        let mut vals = vec![x, well.value(x)];
        vals.extend(waves.iter().map(|wf| scale * wf.psi[i]));
        psi.push_str(&csvfmt::row(&vals));
        psi.push('\n');
    }
    let mut files = Vec::new();
    write(cli, "rectwell.csv", &csv, &mut files)?;
    write(cli, "rectwell_psi.csv", &psi, &mut files)?;
    Ok(files)
}

fn cmd_verify(cli: &Cli) -> Outcome {
    let cfg: VerifyConfig = optional(cli)?;
    let report = run_verify(&cfg)?;
    let mut files = Vec::new();
    write(cli, "verify.json", &to_json(&report), &mut files)?;
    if !report.passed {
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        return Err(Failure::Mismatch(format!("checks failed: {failed:?}")));
    }
    Ok(files)
}
