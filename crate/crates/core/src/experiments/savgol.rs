//! Savitzky-Golay smoothing.
//!
//! Each output is the value at its own position of the least-squares
//! polynomial fitted to a window of neighbours. Interior points use a window
//! centered on them; the first and last half-windows are read off the fits to
//! the first and last full windows, so polynomials up to the fitted order
//! pass through unchanged everywhere.

use nalgebra::DMatrix;

use crate::{Error, Result};

pub const DEFAULT_WINDOW: usize = 21;
pub const DEFAULT_ORDER: usize = 3;

/// Hat matrix of a degree-`order` fit over `window` equally spaced points.
fn projection(window: usize, order: usize) -> DMatrix<f64> {
    let half = (window / 2) as f64;
    // offsets scaled into [-1, 1] keep the Vandermonde matrix well conditioned
    let design = DMatrix::from_fn(window, order + 1, |i, k| ((i as f64 - half) / half.max(1.0)).powi(k as i32));
    let q = design.qr().q();
    &q * q.transpose()
}

pub fn savitzky_golay_smooth(series: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    if window.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("window {window} must be odd")));
    }
    if window <= order {
        return Err(Error::InvalidArgument(format!(
            "window {window} must exceed the polynomial order {order}"
        )));
    }
    if series.len() < window {
        return Err(Error::InvalidArgument(format!(
            "series of length {} is shorter than the window {window}",
            series.len()
        )));
    }
    let hat = projection(window, order);
    let half = window / 2;
    let n = series.len();
    let fitted = |start: usize, row: usize| -> f64 {
        (0..window).map(|j| hat[(row, j)] * series[start + j]).sum()
    };
    Ok((0..n)
        .map(|i| {
            if i < half {
                fitted(0, i)
            } else if i + half >= n {
                fitted(n - window, i + window - n)
            } else {
                fitted(i - half, half)
            }
        })
        .collect())
}
