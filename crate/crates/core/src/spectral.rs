//! Dominant-frequency estimation for uniformly sampled real signals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Result of a windowed periodogram search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPeak {
    /// Angular frequency of the strongest bin.
    pub omega: f64,
    /// Bin spacing `2π/(N·dt)`.
    pub resolution: f64,
    pub power: f64,
}

/// Strongest non-DC bin of the Hann-windowed, mean-removed signal, restricted
/// to angular frequencies at or above `omega_min`.
pub fn dominant_frequency(samples: &[f64], dt: f64, omega_min: f64) -> Result<SpectralPeak> {
    let n = samples.len();
    if n < 4 || !(dt > 0.0) {
        return Err(Error::Numeric(format!(
            "spectrum needs >= 4 samples and dt > 0 (got {n}, {dt})"
        )));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let hann = 0.5 - 0.5 * (2.0 * PI * k as f64 / (n - 1) as f64).cos();
            Complex64::new((v - mean) * hann, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let resolution = 2.0 * PI / (n as f64 * dt);
    let (bin, power) = (1..=n / 2)
        .filter(|&k| k as f64 * resolution >= omega_min)
        .map(|k| (k, buf[k].norm_sqr()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Numeric("no frequency bins above the cutoff".into()))?;
    Ok(SpectralPeak {
        omega: bin as f64 * resolution,
        resolution,
        power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_a_pure_tone() {
        let dt = 0.01;
        let omega = 2.0 * PI * 7.0;
        let s: Vec<f64> = (0..4096).map(|k| 3.0 + (omega * k as f64 * dt).sin()).collect();
        let p = dominant_frequency(&s, dt, 0.0).unwrap();
        assert!((p.omega - omega).abs() <= p.resolution);
    }

    #[test]
    fn cutoff_skips_the_slow_component() {
        let dt = 0.01;
        let s: Vec<f64> = (0..4096)
            .map(|k| {
                let t = k as f64 * dt;
                5.0 * (2.0 * t).cos() + 0.3 * (40.0 * t).cos()
            })
            .collect();
        assert!((dominant_frequency(&s, dt, 0.0).unwrap().omega - 2.0).abs() < 0.2);
        assert!((dominant_frequency(&s, dt, 10.0).unwrap().omega - 40.0).abs() < 0.2);
        assert!(dominant_frequency(&[1.0; 2], dt, 0.0).is_err());
    }
}
