use std::f64::consts::PI;

use num_complex::Complex64;

use crate::basis::truncation_window;
use crate::error::Result;
use crate::fields::{fractional_revival_coefficients, ClassicalPacket, PowerLadder};
use crate::grid::PolarPoint;
use crate::spectrum::{level_energy, mixing_from_level, ModelParams};

/// Local `ψ†Σ_xψ`, `ψ†Σ_yψ` in units of `1/a²`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpinDensity {
    pub sx: f64,
    pub sy: f64,
}

/// Transverse spin density of the positive-energy packet as the double sum
/// over level pairs. Coefficients are tabulated once; each evaluation costs
/// `O(|window|²)`.
#[derive(Clone, Debug)]
pub struct SpinDensityMap {
    params: ModelParams,
    first: u64,
    /// `coef[m][n]`, row `m` pairs with `φ_{m+1}`, column `n` with `φ_n`
    coef: Vec<Vec<f64>>,
    phi_upper: Vec<f64>,
    phi_lower: Vec<f64>,
    scale: f64,
}

impl SpinDensityMap {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let w = truncation_window(params)?;
        let e = params.lambda_over_a;
        // level k contributes when c_{k+1} is inside the window
        let first = w.n_min - 1;
        let ks: Vec<u64> = (first..w.n_max).collect();
        let mix: Vec<(f64, f64)> = (first..=w.n_max)
            .map(|n| mixing_from_level(n as f64, e))
            .collect();
        let at = |n: u64| mix[(n - first) as usize];
        let coef = ks
            .iter()
            .map(|&m| {
                let (d_up, b_up) = at(m + 1);
                ks.iter()
                    .map(|&n| {
                        let (d, b) = at(n);
                        let ratio = (n as f64 / (m + 1) as f64).sqrt();
                        2.0 * (d_up * d + ratio * b * b_up)
                    })
                    .collect()
            })
            .collect();
        let (wa, wb) = params.branch_weights();
        Ok(SpinDensityMap {
            params: *params,
            first,
            coef,
            phi_upper: ks.iter().map(|&m| level_energy((m + 1) as f64, e)).collect(),
            phi_lower: ks.iter().map(|&n| level_energy(n as f64, e)).collect(),
            scale: wa * wb / (2.0 * PI),
        })
    }

    pub fn eval(&self, pt: PolarPoint, tau: f64) -> SpinDensity {
        let qa = self.params.qa;
        let gamma = Complex64::new(-0.5 * qa * pt.rho, 0.0);
        let log_half = Complex64::new(-(qa * qa + pt.rho * pt.rho) / 4.0, 0.0);
        let mut ladder = PowerLadder::new(gamma, log_half, self.first);
        let mut upper = Vec::with_capacity(self.phi_upper.len());
        let mut lower = Vec::with_capacity(self.phi_lower.len());
        for (j, (pu, pl)) in self.phi_upper.iter().zip(&self.phi_lower).enumerate() {
            let k = (self.first + j as u64) as f64;
            let g = ladder.value();
            upper.push(g * Complex64::from_polar(1.0, pt.theta * k + pu * tau));
            lower.push(g * Complex64::from_polar(1.0, -pt.theta * k - pl * tau));
            ladder.step();
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (row, u) in self.coef.iter().zip(&upper) {
            let inner: Complex64 = row.iter().zip(&lower).map(|(c, v)| v * *c).sum();
            total += u * inner;
        }
        let z = total * self.scale;
        SpinDensity { sx: z.re, sy: z.im }
    }
}

/// Rigidly rotating spin density of the classical packet (`α = β`).
pub fn spin_density_classical(pt: PolarPoint, tau: f64, params: &ModelParams) -> Result<SpinDensity> {
    let cl = ClassicalPacket::new(params)?;
    Ok(classical_with(&cl, pt, tau, params))
}

fn classical_with(cl: &ClassicalPacket, pt: PolarPoint, tau: f64, params: &ModelParams) -> SpinDensity {
    let qa = params.qa;
    let rot = cl.expansion().dphi * tau;
    let envelope = (-(pt.rho * pt.rho + qa * qa + 2.0 * pt.rho * qa * (pt.theta + rot).cos()) / 2.0)
        .exp()
        / (2.0 * PI);
    let tilt = params.eps2() / 4.0 * qa * pt.rho;
    SpinDensity {
        sx: envelope * (rot.cos() - tilt * pt.theta.cos()),
        sy: envelope * (rot.sin() + tilt * pt.theta.sin()),
    }
}

/// Incoherent sum `Σ_j |p_j|² σ_cl(τ - s_j)` of the classical spin density
/// over the sub-packets of the `m/n` fractional revival.
pub fn spin_density_fractional(
    pt: PolarPoint,
    tau: f64,
    m: u64,
    n: u64,
    params: &ModelParams,
) -> Result<SpinDensity> {
    let cl = ClassicalPacket::new(params)?;
    let coeffs = fractional_revival_coefficients(m, n)?;
    let mut out = SpinDensity::default();
    for (j, p) in coeffs.iter().enumerate() {
        let weight = p.norm_sqr();
        if weight < 1e-15 {
            continue;
        }
        let shift = j as f64 * cl.period() / n as f64;
        let s = classical_with(&cl, pt, tau - shift, params);
        out.sx += weight * s.sx;
        out.sy += weight * s.sy;
    }
    Ok(out)
}
