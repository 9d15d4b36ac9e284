use num_complex::Complex64;

use super::pair;
use crate::basis::truncation_window;
use crate::error::Result;
use crate::spectrum::{level_energy, mixing_from_level, taylor, ModelParams};
use crate::sum::ComplexSum;

/// Positive-energy packet: `v_x + i v_y` as a single sum over adjacent-level
/// beats, `(vx, vy)` in `c`.
pub fn mean_velocity_positive(tau: f64, params: &ModelParams) -> Result<(f64, f64)> {
    params.validate()?;
    let w = truncation_window(params)?;
    let e = params.lambda_over_a;
    let qa = params.qa;
    let (wa, wb) = params.branch_weights();
    let phi = |n: u64| level_energy(n as f64, e);
    let mut acc = ComplexSum::new();
    for n in w.n_min.saturating_sub(1)..w.n_max {
        // couples c_{n+1} and c_{n+2}
        if !(w.contains(n + 1) && w.contains(n + 2)) {
            continue;
        }
        let weight = qa * w.coefficient(n + 1, qa).powi(2);
        let (_, b1) = mixing_from_level((n + 1) as f64, e);
        let (d2, _) = mixing_from_level((n + 2) as f64, e);
        let (d0, _) = mixing_from_level(n as f64, e);
        // √((φ-1)/(2(n+1)φ)) = b/√(n+1); √((φ+1)/φ) = √2·d
        let radial = b1 / ((n + 1) as f64).sqrt() * std::f64::consts::SQRT_2;
        let upper = Complex64::from_polar(wa * wa * d2, (phi(n + 2) - phi(n + 1)) * tau);
        let lower = Complex64::from_polar(wb * wb * d0, (phi(n + 1) - phi(n)) * tau);
        acc.add((upper + lower) * (weight * radial));
    }
    Ok(pair(acc.value()))
}

/// Cyclotron motion of a nonrelativistic charge: `qa·(λ/a)·(cos ωτ, sin ωτ)`
/// with `ω = (λ/a)²`.
pub fn mean_velocity_nonrel(tau: f64, params: &ModelParams) -> (f64, f64) {
    let speed = params.qa * params.lambda_over_a;
    let (s, c) = (params.eps2() * tau).sin_cos();
    (speed * c, speed * s)
}

/// Gaussian-damped approximation of [`mean_velocity_positive`] from the
/// quadratic spectrum.
pub fn mean_velocity_envelope(tau: f64, params: &ModelParams) -> Result<(f64, f64)> {
    let t = taylor(params)?;
    let n0 = t.n0.real;
    let half = 0.5 * t.ddphi * tau;
    let damping = (-(params.qa * half.sin()).powi(2)).exp() * half.cos();
    let phase = t.dphi * tau - t.ddphi * (n0 - 1.0) * tau + n0 * (t.ddphi * tau).sin();
    let amp = params.qa * params.lambda_over_a * damping;
    Ok((amp * phase.cos(), amp * phase.sin()))
}

/// `exp(-(qa sin(φ″τ/2))²)`, the factor that controls the collapse.
pub fn velocity_envelope_factor(tau: f64, params: &ModelParams) -> Result<f64> {
    let t = taylor(params)?;
    Ok((-(params.qa * (0.5 * t.ddphi * tau).sin()).powi(2)).exp())
}

/// `⟨Σ_x⟩, ⟨Σ_y⟩` of the positive-energy packet.
pub fn mean_spin_transverse(tau: f64, params: &ModelParams) -> Result<(f64, f64)> {
    params.validate()?;
    let w = truncation_window(params)?;
    let e = params.lambda_over_a;
    let (wa, wb) = params.branch_weights();
    let mut acc = ComplexSum::new();
    for n in w.n_min.saturating_sub(1)..w.n_max {
        if !w.contains(n + 1) {
            continue;
        }
        let weight = w.coefficient(n + 1, params.qa).powi(2);
        let (d0, b0) = mixing_from_level(n as f64, e);
        let (d1, b1) = mixing_from_level((n + 1) as f64, e);
        let ratio = (n as f64 / (n + 1) as f64).sqrt();
        let coef = 2.0 * (d0 * d1 + ratio * b0 * b1);
        let beat = level_energy((n + 1) as f64, e) - level_energy(n as f64, e);
        acc.add(Complex64::from_polar(weight * coef, beat * tau));
    }
    Ok(pair(acc.value() * (wa * wb)))
}

/// Velocity of the two-band packet split into the slow (difference-frequency)
/// and fast (sum-frequency) parts; `vx = cyclotron.0 + zb.0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JcVelocity {
    pub vx: f64,
    pub vy: f64,
    pub cyclotron: (f64, f64),
    pub zb: (f64, f64),
}

pub fn mean_velocity_jc(tau: f64, params: &ModelParams) -> Result<JcVelocity> {
    params.validate()?;
    let w = truncation_window(params)?;
    let e = params.lambda_over_a;
    let qa = params.qa;
    let mut slow = ComplexSum::new();
    let mut fast = ComplexSum::new();
    for n in w.iter().filter(|&n| n >= 1) {
        let weight = e * qa * w.coefficient(n, qa).powi(2);
        let p0 = level_energy(n as f64, e);
        let p1 = level_energy((n + 1) as f64, e);
        let (sd, cd) = ((p1 - p0) * tau).sin_cos();
        let (ss, cs) = ((p1 + p0) * tau).sin_cos();
        slow.add(Complex64::new(weight * cd / (p0 * p1), weight * sd / p0));
        fast.add(Complex64::new(-weight * cs / (p0 * p1), -weight * ss / p0));
    }
    let (slow, fast) = (slow.value(), fast.value());
    Ok(JcVelocity {
        vx: slow.re + fast.re,
        vy: slow.im + fast.im,
        cyclotron: pair(slow),
        zb: pair(fast),
    })
}

/// `⟨Σ_z⟩` of the two-band packet.
pub fn mean_spin_z_jc(tau: f64, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let w = truncation_window(params)?;
    let e2 = params.eps2();
    let mut acc = crate::sum::NeumaierSum::new();
    for n in w.iter().filter(|&n| n >= 1) {
        let phi = level_energy(n as f64, params.lambda_over_a);
        let weight = w.coefficient(n, params.qa).powi(2);
        acc.add(weight * (1.0 + 2.0 * n as f64 * e2 * (2.0 * phi * tau).cos()) / (phi * phi));
    }
    Ok(acc.value())
}

/// Time average of [`mean_spin_z_jc`] with the oscillating terms dropped,
/// `Σ|c_n|²/φ_n²`.
pub fn spin_z_plateau_jc(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let w = truncation_window(params)?;
    Ok(w
        .iter()
        .filter(|&n| n >= 1)
        .map(|n| {
            let phi = level_energy(n as f64, params.lambda_over_a);
            w.coefficient(n, params.qa).powi(2) / (phi * phi)
        })
        .sum())
}

/// Modulus of the complex amplitude of the fast `Σ_z` oscillation.
pub fn spin_z_envelope_jc(tau: f64, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let w = truncation_window(params)?;
    let e2 = params.eps2();
    let mut acc = ComplexSum::new();
    for n in w.iter().filter(|&n| n >= 1) {
        let phi = level_energy(n as f64, params.lambda_over_a);
        let weight = w.coefficient(n, params.qa).powi(2) * 2.0 * n as f64 * e2 / (phi * phi);
        acc.add(Complex64::from_polar(weight, 2.0 * phi * tau));
    }
    Ok(acc.value().norm())
}
