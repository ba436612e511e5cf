//! Node-and-lobe rows of the low-lying multiplets for `M = 3..=8`.
//!
//! Compact form: `n` a dominant positive lobe, `u` a dominant negative
//! lobe, `*` a node, `s` and `f` small positive and negative humps, `~` and
//! `_` suppressed cells of unstated sign.

use super::nodal::Token;

const ROWS: [&[&str]; 6] = [
    &["nsnsn", "n~*~u", "n*u*n"],
    &["nsnsnsn", "nsn*ufu", "n*ufu*n", "n*u*n*u"],
    &["n_n_n_n_n", "n_n_*_u_u", "n_n*u*n_n", "n*u_*_n*u", "n*u*n*u*n"],
    &["n_n_n_n_n_n", "n_n_n*u_u_u", "n_n*u_u*n_n", "n*u_u*n_n*u", "n*u*n_n*u*n", "n*u*n*u*n*u"],
    &[
        "n_n_n_n_n_n_n",
        "n_n_n_*_u_u_u",
        "n_n_n*u*n_n_n",
        "n_n*u_*_n*u_u",
        "n*u_u*n*u_u*n",
        "n*u*n_*_u*n*u",
        "n*u*n*u*n*u*n",
    ],
    &[
        "n_n_n_n_n_n_n_n",
        "n_n_n_n*u_u_u_u",
        "n_n_n*u_u*n_n_n",
        "n_n*u_u*n_n*u_u",
        "n*u_u*n_n*u_u*n",
        "n*u*n_n*u_u*n*u",
        "n*u*n*u_u*n*u*n",
        "n*u*n*u*n*u*n*u",
    ],
];

fn token(c: char) -> Token {
    match c {
        'n' => Token::Dominant(1),
        'u' => Token::Dominant(-1),
        '*' => Token::Node,
        's' => Token::Suppressed(1),
        'f' => Token::Suppressed(-1),
        _ => Token::SuppressedAny,
    }
}

/// Rows `n = 0..M` over the `2M - 1` reference positions.
pub fn reference_table(m: usize) -> Option<Vec<Vec<Token>>> {
    let rows = ROWS.get(m.checked_sub(3)?)?;
    Some(rows.iter().map(|r| r.chars().map(token).collect()).collect())
}
