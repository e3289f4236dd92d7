//! Split of a density into a reference density plus a signed remainder.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numeric::trapezoid;

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// `rho_q - rho_c` at each grid point.
    pub interference: Vec<f64>,
    /// Trapezoid integral of the remainder over the grid.
    pub integral: f64,
    pub min: f64,
}

/// `rho_q - rho_c` on a shared grid, with its integral and minimum.
pub fn interference_decomposition(rho_q: &[f64], rho_c: &[f64], grid: &[f64]) -> Result<Decomposition> {
    if rho_q.len() != grid.len() || rho_c.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "grid has {} points, densities have {} and {}",
            grid.len(),
            rho_q.len(),
            rho_c.len()
        )));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::GridMismatch("grid must be strictly increasing with two or more points".into()));
    }
    let interference: Vec<f64> = rho_q.iter().zip(rho_c).map(|(q, c)| q - c).collect();
    let integral = trapezoid(grid, &interference);
    let min = interference.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Decomposition { interference, integral, min })
}
