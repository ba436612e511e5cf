use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd::Spectrum;

/// Width of the lowest `M` levels against the gap to the next one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Multiplet {
    /// `E_{M-1} - E_0`
    pub spread: f64,
    /// `E_M - E_{M-1}`
    pub gap: f64,
    pub ratio: f64,
}

pub fn multiplet_detect(spectrum: &Spectrum, m: usize) -> Result<Multiplet> {
    multiplet_of(&spectrum.energies, m)
}

pub fn multiplet_of(energies: &[f64], m: usize) -> Result<Multiplet> {
    if m == 0 || energies.len() < m + 1 {
        return Err(Error::InvalidArgument(format!("need {} levels for M = {m}, have {}", m + 1, energies.len())));
    }
    let spread = energies[m - 1] - energies[0];
    let gap = energies[m] - energies[m - 1];
    if gap == 0.0 {
        return Err(Error::DegenerateCut { energy: energies[m] });
    }
    Ok(Multiplet { spread, gap, ratio: spread / gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::make_equidistant_ansatz;
    use crate::fd::{solve, Grid};
    use crate::potential::PotentialSpec;
    use crate::qes::{reconstruct, EnergyGauge};

    fn ratio(m: usize, s: f64) -> f64 {
        let spec =
            PotentialSpec::Qes(reconstruct(&make_equidistant_ansatz(m, s, 1.0).unwrap(), EnergyGauge::Raw).unwrap());
        let sp = solve(&spec, Grid::new(spec.default_half_width(), 3000).unwrap(), m + 1).unwrap();
        multiplet_detect(&sp, m).unwrap().ratio
    }

    #[test]
    fn harmonic_has_no_multiplet() {
        let sp = solve(&PotentialSpec::Polynomial(vec![0.0, 0.0, 1.0]), Grid::new(10.0, 4000).unwrap(), 3).unwrap();
        assert!((multiplet_detect(&sp, 2).unwrap().ratio - 1.0).abs() < 1e-4);
    }

    #[test]
    fn doublet_and_onset() {
        assert!(ratio(2, 3.0) < 1e-5);
        assert!(ratio(3, 2.0) > ratio(3, 4.0));
    }

    #[test]
    fn monotone_in_spacing() {
        for m in 2..=4 {
            let r: Vec<f64> = [2.0, 3.0, 4.0].iter().map(|&s| ratio(m, s)).collect();
            assert!(r[0] >= r[1] && r[1] >= r[2], "M={m}: {r:?}");
        }
    }

    #[test]
    fn degenerate_cut() {
        assert!(matches!(multiplet_of(&[1.0, 2.0, 2.0], 2), Err(Error::DegenerateCut { .. })));
        assert!(multiplet_of(&[1.0, 2.0], 2).is_err());
    }
}
