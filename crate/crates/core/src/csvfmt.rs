//! Number formatting shared by every CSV artifact.

/// Scientific notation with 15 significant digits. `-0` prints as `0`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.14e}", 0.0);
    }
    format!("{x:.14e}")
}

/// A row of numbers joined by commas.
pub fn row(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(num(1.0), "1.00000000000000e0");
        assert_eq!(num(-0.0), num(0.0));
        assert_eq!(num(-1234.5), "-1.23450000000000e3");
        assert_eq!(row(&[1.0, 2.0]), "1.00000000000000e0,2.00000000000000e0");
        let x = std::f64::consts::PI;
        assert_eq!(num(x).parse::<f64>().unwrap(), 3.14159265358979);
    }
}
