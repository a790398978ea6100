use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default minimal relative SSE improvement a breakpoint must bring.
pub const DEFAULT_MIN_IMPROVEMENT: f64 = 0.05;

/// Continuous two-segment fit
/// `y = c + slope_low * min(h - bp, 0) + slope_high * max(h - bp, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElbowFit {
    pub breakpoint: f64,
    pub slope_low: f64,
    pub slope_high: f64,
    /// Value of the fit at the breakpoint.
    pub intercept: f64,
    pub sse: f64,
    /// True when the breakpoint does not earn its keep over a straight line.
    pub degenerate: bool,
    /// SSE of the single least-squares line.
    pub sse_line: f64,
    /// Slope of the single least-squares line.
    pub line_slope: f64,
}

impl ElbowFit {
    /// Predicted value at `h`.
    pub fn predict(&self, h: f64) -> f64 {
        let d = h - self.breakpoint;
        self.intercept + self.slope_low * d.min(0.0) + self.slope_high * d.max(0.0)
    }

    /// A hockey stick: a real breakpoint with the curve rising faster above it.
    pub fn is_hockey_stick(&self) -> bool {
        !self.degenerate && self.slope_low < self.slope_high
    }

    /// No elbow worth the name, or a curve that does not rise with height.
    pub fn is_flat_or_falling(&self) -> bool {
        self.degenerate || self.line_slope <= 0.0
    }
}

fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> (DVector<f64>, f64) {
    let coef = x.clone().svd(true, true).solve(y, 1e-12).expect("svd with both factors");
    let sse = (x * &coef - y).norm_squared();
    (coef, sse)
}

/// Exhaustive breakpoint search over midpoints of consecutive distinct
/// heights. `min_improvement` is the relative SSE reduction over a straight
/// line below which the fit is flagged degenerate.
pub fn elbow_fit(points: &[(f64, f64)], min_improvement: f64) -> Result<ElbowFit> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    if pts.iter().any(|(h, y)| !h.is_finite() || !y.is_finite()) {
        return Err(Error::invalid("points", "non-finite height or value"));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut heights: Vec<f64> = pts.iter().map(|p| p.0).collect();
    heights.dedup();
    if pts.len() < 4 || heights.len() < 2 {
        return Err(Error::TooFewPoints(pts.len()));
    }

    let n = pts.len();
    let y = DVector::from_iterator(n, pts.iter().map(|p| p.1));
    let line = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { pts[i].0 });
    let (line_coef, sse_line) = least_squares(&line, &y);

    let mut best: Option<(f64, DVector<f64>, f64)> = None;
    for pair in heights.windows(2) {
        let bp = 0.5 * (pair[0] + pair[1]);
        let x = DMatrix::from_fn(n, 3, |i, j| match j {
            0 => 1.0,
            1 => (pts[i].0 - bp).min(0.0),
            _ => (pts[i].0 - bp).max(0.0),
        });
        let (coef, sse) = least_squares(&x, &y);
        if best.as_ref().is_none_or(|b| sse < b.2) {
            best = Some((bp, coef, sse));
        }
    }
    let (breakpoint, coef, sse) = best.expect("at least one candidate");
    // a line that fits to round-off leaves nothing for a breakpoint to improve
    let round_off = 1e-20 * y.norm_squared();
    let degenerate = sse_line <= round_off || sse > (1.0 - min_improvement) * sse_line;
    Ok(ElbowFit {
        breakpoint,
        slope_low: coef[1],
        slope_high: coef[2],
        intercept: coef[0],
        sse,
        degenerate,
        sse_line,
        line_slope: line_coef[1],
    })
}
