use std::fmt;

use serde::{Deserialize, Serialize};

use super::census::WellCensus;
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.1;
/// Samples below this fraction of `max |psi|` carry no sign.
pub const NODE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cell", rename_all = "snake_case", deny_unknown_fields)]
pub enum Cell {
    Lobe { position: f64, sign: i8, dominant: bool },
    Node { position: f64 },
}

/// One eigenfunction read off over well centers and the midpoints between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodalPattern {
    /// Reference positions: minima interleaved with midpoints.
    pub columns: Vec<f64>,
    pub cells: Vec<Cell>,
    pub threshold: f64,
}

/// A table cell to compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Token {
    Dominant(i8),
    Suppressed(i8),
    /// Suppressed lobe of either sign.
    SuppressedAny,
    Node,
}

impl Token {
    pub fn parse(s: &str) -> Result<Token> {
        Ok(match s {
            "(^)" => Token::Dominant(1),
            "(v)" => Token::Dominant(-1),
            "[^]" => Token::Suppressed(1),
            "[v]" => Token::Suppressed(-1),
            "[.]" => Token::SuppressedAny,
            "(*)" => Token::Node,
            other => return Err(Error::InvalidArgument(format!("unknown pattern token {other:?}"))),
        })
    }

    /// Whitespace-separated ASCII tokens.
    pub fn parse_row(s: &str) -> Result<Vec<Token>> {
        s.split_whitespace().map(Token::parse).collect()
    }

    fn glyph(self) -> &'static str {
        match self {
            Token::Dominant(1) => "(^)",
            Token::Dominant(_) => "(v)",
            Token::Suppressed(1) => "[^]",
            Token::Suppressed(_) => "[v]",
            Token::SuppressedAny => "[.]",
            Token::Node => "(*)",
        }
    }

    fn accepts(self, cell: &Cell, flip: i8) -> bool {
        match (self, cell) {
            (Token::Node, Cell::Node { .. }) => true,
            (Token::Dominant(t), Cell::Lobe { sign, dominant: true, .. }) => *sign == t * flip,
            (Token::Suppressed(t), Cell::Lobe { sign, dominant: false, .. }) => *sign == t * flip,
            (Token::SuppressedAny, Cell::Lobe { dominant: false, .. }) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.glyph())
    }
}

pub fn render_tokens(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.glyph()).collect::<Vec<_>>().join(" ")
}

impl Cell {
    pub fn token(&self) -> Token {
        match *self {
            Cell::Node { .. } => Token::Node,
            Cell::Lobe { sign, dominant: true, .. } => Token::Dominant(sign),
            Cell::Lobe { sign, dominant: false, .. } => Token::Suppressed(sign),
        }
    }
}

impl NodalPattern {
    pub fn node_count(&self) -> usize {
        self.cells.iter().filter(|c| matches!(c, Cell::Node { .. })).count()
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.cells.iter().filter_map(|c| if let Cell::Node { position } = c { Some(*position) } else { None }).collect()
    }

    pub fn tokens(&self) -> Vec<Token> {
        self.cells.iter().map(Cell::token).collect()
    }

    /// `(^) (v) (*) [^] [v]`, space separated.
    pub fn render_ascii(&self) -> String {
        render_tokens(&self.tokens())
    }

    /// The table glyphs, with small half-circles for suppressed lobes.
    pub fn render_glyphs(&self) -> String {
        self.cells
            .iter()
            .map(|c| match c.token() {
                Token::Dominant(1) => "∩",
                Token::Dominant(_) => "∪",
                Token::Suppressed(1) => "ᴖ",
                Token::Suppressed(_) => "ᴗ",
                Token::SuppressedAny => "·",
                Token::Node => "•",
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Cell-by-cell agreement with a template, up to one global sign.
    pub fn matches(&self, template: &[Token]) -> bool {
        template.len() == self.cells.len()
            && [1i8, -1].iter().any(|&flip| template.iter().zip(&self.cells).all(|(t, c)| t.accepts(c, flip)))
    }
}

fn interp(r: &[f64], psi: &[f64], x: f64) -> f64 {
    let i = r.partition_point(|&v| v <= x).clamp(1, r.len() - 1);
    let t = (x - r[i - 1]) / (r[i] - r[i - 1]);
    psi[i - 1] + t * (psi[i] - psi[i - 1])
}

/// Lobes at the census minima and the midpoints between them, with every
/// sign change of `psi` placed as a node at the nearest reference position.
///
/// A center lobe is dominant when `|psi(center)| / max |psi| >= threshold`;
/// midpoint lobes never are. Nodes are located by linear interpolation
/// between the bracketing samples above the noise floor, so their count
/// equals the solver's node count.
pub fn nodal_pattern(r: &[f64], psi: &[f64], census: &WellCensus, threshold: f64) -> Result<NodalPattern> {
    if r.len() != psi.len() || r.len() < 2 {
        return Err(Error::InvalidArgument("nodal pattern needs matching r and psi samples".into()));
    }
    if census.minima.is_empty() {
        return Err(Error::InvalidArgument("census reports no minima".into()));
    }
    let centers = census.centers();
    let mut columns = Vec::with_capacity(2 * centers.len() - 1);
    for (j, &c) in centers.iter().enumerate() {
        if j > 0 {
            columns.push(0.5 * (centers[j - 1] + c));
        }
        columns.push(c);
    }

    let max = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = NODE_FLOOR * max;
    let mut nodes = Vec::new();
    let mut last: Option<usize> = None;
    for (i, &v) in psi.iter().enumerate() {
        if v.abs() < cut {
            continue;
        }
        if let Some(j) = last {
            if (v > 0.0) != (psi[j] > 0.0) {
                let t = psi[j] / (psi[j] - v);
                nodes.push(r[j] + t * (r[i] - r[j]));
            }
        }
        last = Some(i);
    }

    let nearest = |x: f64| {
        (0..columns.len()).min_by(|&a, &b| (columns[a] - x).abs().total_cmp(&(columns[b] - x).abs())).unwrap()
    };
    let mut per_column = vec![Vec::new(); columns.len()];
    for x in nodes {
        per_column[nearest(x)].push(x);
    }

    let mut cells = Vec::new();
    for (j, &x) in columns.iter().enumerate() {
        if !per_column[j].is_empty() {
            cells.extend(per_column[j].iter().map(|&position| Cell::Node { position }));
            continue;
        }
        let v = interp(r, psi, x);
        let sign = if v < 0.0 { -1 } else { 1 };
        let dominant = j % 2 == 0 && max > 0.0 && v.abs() / max >= threshold;
        cells.push(Cell::Lobe { position: x, sign, dominant });
    }
    Ok(NodalPattern { columns, cells, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::census::{well_census, DEFAULT_SCAN_POINTS};
    use crate::analysis::tables::reference_table;
    use crate::ansatz::make_equidistant_ansatz;
    use crate::fd::{solve, Grid, Spectrum};
    use crate::potential::PotentialSpec;
    use crate::qes::{reconstruct, EnergyGauge};

    fn setup(m: usize, s: f64, n: usize) -> (Spectrum, WellCensus) {
        let spec =
            PotentialSpec::Qes(reconstruct(&make_equidistant_ansatz(m, s, 1.0).unwrap(), EnergyGauge::Raw).unwrap());
        let l = spec.default_half_width();
        let census = well_census(&spec, [-l, l], DEFAULT_SCAN_POINTS).unwrap();
        (solve(&spec, Grid::new(l, n).unwrap(), m).unwrap(), census)
    }

    fn patterns(sp: &Spectrum, c: &WellCensus) -> Vec<NodalPattern> {
        let r = sp.points();
        sp.eigenfunctions.iter().map(|p| nodal_pattern(&r, p, c, DEFAULT_THRESHOLD).unwrap()).collect()
    }

    #[test]
    fn m3_b4_first_excited() {
        let (sp, c) = setup(3, 4.0, 3000);
        let p = &patterns(&sp, &c)[1];
        assert_eq!(p.node_count(), 1);
        assert!(p.nodes()[0].abs() < 1e-6);
        assert_eq!(p.tokens()[0], Token::Dominant(1));
        assert_eq!(p.tokens()[4], Token::Dominant(-1));
        assert_eq!(p.tokens()[2], Token::Node);
    }

    #[test]
    fn small_tables_match() {
        for (m, s) in [(3, 4.0), (3, 3.0), (4, 3.0)] {
            let (sp, c) = setup(m, s, 4000);
            let table = reference_table(m).unwrap();
            for (n, p) in patterns(&sp, &c).iter().enumerate() {
                assert_eq!(p.node_count(), sp.node_counts[n]);
                assert!(p.matches(&table[n]), "M={m} s={s} n={n}: {} vs {}", p.render_ascii(), render_tokens(&table[n]));
            }
        }
    }

    #[test]
    fn ground_state_has_no_nodes() {
        for m in 1..=6 {
            let (sp, c) = setup(m, 2.5, 2500);
            let p = &patterns(&sp, &c)[0];
            assert_eq!(p.node_count(), 0);
            assert!(p.cells.iter().all(|c| matches!(c, Cell::Lobe { sign: 1, .. })), "{}", p.render_ascii());
        }
    }

    #[test]
    fn structural_invariants() {
        for (m, s) in [(3, 3.0), (4, 3.0), (5, 3.0), (6, 3.0)] {
            let (sp, c) = setup(m, s, 4000);
            let d = c.min_well_distance().unwrap();
            for (n, p) in patterns(&sp, &c).iter().enumerate() {
                assert_eq!(p.node_count(), sp.node_counts[n]);
                // dominant lobes flip sign across an odd number of nodes
                let mut prev: Option<(i8, usize)> = None;
                let mut seen = 0;
                for cell in &p.cells {
                    match cell {
                        Cell::Node { .. } => seen += 1,
                        Cell::Lobe { sign, dominant: true, .. } => {
                            if let Some((s0, k0)) = prev {
                                assert_eq!(*sign != s0, (seen - k0) % 2 == 1, "M={m} n={n}: {}", p.render_ascii());
                            }
                            prev = Some((*sign, seen));
                        }
                        _ => {}
                    }
                }
                // nodes sit away from dominant centers
                for x in p.nodes() {
                    for cell in &p.cells {
                        if let Cell::Lobe { position, dominant: true, .. } = cell {
                            assert!((x - position).abs() > 0.1 * d, "M={m} n={n}: node {x} at lobe {position}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ascii_round_trip() {
        let row = "(^) [^] (*) [v] (v) [.]";
        let t = Token::parse_row(row).unwrap();
        assert_eq!(render_tokens(&t), row);
        assert!(Token::parse_row("(^) (x)").is_err());
    }

    #[test]
    fn sign_flip_and_any() {
        let p = NodalPattern {
            columns: vec![-1.0, 0.0, 1.0],
            cells: vec![
                Cell::Lobe { position: -1.0, sign: -1, dominant: true },
                Cell::Node { position: 0.0 },
                Cell::Lobe { position: 1.0, sign: 1, dominant: true },
            ],
            threshold: 0.1,
        };
        assert!(p.matches(&Token::parse_row("(^) (*) (v)").unwrap()));
        assert!(!p.matches(&Token::parse_row("(^) (*) (^)").unwrap()));
        assert!(!p.matches(&Token::parse_row("(^) [.] (v)").unwrap()));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<NodalPattern>(&json).unwrap(), p);
    }
}
