//! Expectation-value series, spin densities and moments of the packets.
//!
//! Velocities are in units of `c`, spins in `ħ/2`, lengths in `a` and
//! times in `λ/c`.

mod series;
mod spin_density;
mod timeseries;

pub use series::{
    mean_spin_transverse, mean_spin_z_jc, mean_velocity_envelope, mean_velocity_jc,
    mean_velocity_nonrel, mean_velocity_positive, spin_z_envelope_jc, spin_z_plateau_jc,
    velocity_envelope_factor, JcVelocity,
};
pub use spin_density::{
    spin_density_classical, spin_density_fractional, SpinDensity, SpinDensityMap,
};
pub use timeseries::TimeSeries;

use num_complex::Complex64;

use crate::error::Result;
use crate::exec::Execution;
use crate::grid::{PolarGrid, PolarPoint, SpinorSample};
use crate::oracle::{quadrature_expectation, OperatorKind, OracleField};
use crate::spectrum::ModelParams;

/// Collapse threshold: late-time velocity amplitude relative to the first period.
pub const COLLAPSE_RATIO: f64 = 0.05;

/// Burst contrast: RMS of the ZB signal near `kT_cl/2` relative to in between.
pub const BURST_CONTRAST: f64 = 3.0;

/// Symmetric 2×2 quadrupole tensor `∫|ψ|²(3x_αx_β - r²δ_αβ) dA` about the
/// orbit centre, units `a²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrupole {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Quadrupole {
    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }
}

pub fn quadrupole_tensor(field: &OracleField) -> Quadrupole {
    let grid = field.grid;
    let moments = |f: &dyn Fn(PolarPoint) -> f64| -> f64 {
        let values: Vec<f64> = field
            .samples
            .iter()
            .enumerate()
            .map(|(k, s)| s.density() * f(grid.point(k)))
            .collect();
        grid.integrate(&values)
    };
    let xx = moments(&|p| {
        let (x, y) = (p.x(), p.y_rel());
        3.0 * x * x - (x * x + y * y)
    });
    let yy = moments(&|p| {
        let (x, y) = (p.x(), p.y_rel());
        3.0 * y * y - (x * x + y * y)
    });
    let xy = moments(&|p| 3.0 * p.x() * p.y_rel());
    Quadrupole { xx, xy, yy }
}

/// `max_τ |⟨Σ_z⟩(τ) - ⟨Σ_z⟩(τ₀)|` by grid quadrature of the given field.
pub fn sz_conservation_check<F>(
    taus: &[f64],
    grid: PolarGrid,
    params: &ModelParams,
    exec: Execution,
    field: F,
) -> Result<f64>
where
    F: Fn(PolarPoint, f64) -> SpinorSample + Sync + Send,
{
    let mut first = None;
    let mut worst: f64 = 0.0;
    for &tau in taus {
        let f = OracleField::sample(grid, tau, params, exec, &field);
        let sz = quadrature_expectation(OperatorKind::SigmaZ, &f)?;
        match first {
            None => first = Some(sz),
            Some(s0) => worst = worst.max((sz - s0).abs()),
        }
    }
    Ok(worst)
}

/// `(vx, vy)` packed as `vx + i vy`.
#[inline]
pub(crate) fn pair(z: Complex64) -> (f64, f64) {
    (z.re, z.im)
}
