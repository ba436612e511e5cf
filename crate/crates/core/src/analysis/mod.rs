//! Spectral diagnostics built on the solver: well census, multiplets,
//! parameter scans and nodal patterns.

pub mod census;
pub mod multiplet;
pub mod nodal;
pub mod scan;
pub mod tables;

pub use census::{leading_order_energy, well_census, LeadingOrder, Maximum, Minimum, WellCensus};
pub use multiplet::{multiplet_detect, Multiplet};
pub use nodal::{nodal_pattern, Cell, NodalPattern, Token};
pub use scan::{alc_scan, relocalization_scan, FamilyConfig, ScanFamily, ScanResult, ScanRow};
