//! Ordinary least squares for a line.

use crate::error::{Error, Result};

/// `(slope, intercept)` of the best line through `pts`.
pub fn least_squares(pts: &[(f64, f64)]) -> Result<(f64, f64)> {
    if pts.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} points", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) || pts.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::DegenerateFit("abscissae coincide or values are not finite".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Root-mean-square residual of the fitted line.
pub fn rms_residual(pts: &[(f64, f64)], slope: f64, intercept: f64) -> f64 {
    (pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum::<f64>() / pts.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 * i as f64 - 1.0)).collect();
        let (a, b) = least_squares(&pts).unwrap();
        assert!((a - 3.0).abs() < 1e-14 && (b + 1.0).abs() < 1e-14);
        assert!(least_squares(&[(1.0, 2.0), (1.0, 3.0)]).is_err());
    }
}
