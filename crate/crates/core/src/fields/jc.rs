use std::f64::consts::PI;

use num_complex::Complex64;

use super::PowerLadder;
use crate::basis::{truncation_window, TruncationWindow};
use crate::error::Result;
use crate::grid::{PolarPoint, SpinorSample};
use crate::spectrum::{level_energy, ModelParams};
use crate::sum::ComplexSum;

/// Two-band packet that starts fully spin-up: `(Ψ₁, 0, 0, Ψ₄)` with
/// `Ψ₁ = ψ_c e^{qa·w/2} Σ u^{n-1}/(n-1)! (cos φ_nτ - i sin φ_nτ/φ_n)` and
/// `Ψ₄ = ψ_c e^{qa·w/2} Σ u^{n-1}/(n-1)! iε sin φ_nτ/φ_n · w`, where
/// `w = y - qa - ix` and `u = -qa·w/2`.
#[derive(Clone, Debug)]
pub struct JcPacket {
    params: ModelParams,
    window: TruncationWindow,
    phis: Vec<f64>,
}

impl JcPacket {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let window = truncation_window(params)?;
        let phis = window
            .iter()
            .map(|n| level_energy(n as f64, params.lambda_over_a))
            .collect();
        Ok(JcPacket {
            params: *params,
            window,
            phis,
        })
    }

    pub fn window(&self) -> TruncationWindow {
        self.window
    }

    pub fn field(&self, pt: PolarPoint, tau: f64) -> SpinorSample {
        let y0 = self.params.qa;
        let e = self.params.lambda_over_a;
        let x = pt.x();
        let y = pt.y(&self.params);
        let w = Complex64::new(y - y0, -x);
        let ln_c = Complex64::new(
            -(x * x + y * y) / 4.0 - 0.5 * (2.0 * PI).ln(),
            y0 * x + x * y / 2.0,
        );
        let u = -w * (y0 / 2.0);
        let mut ladder = PowerLadder::new(u, ln_c + w * (y0 / 2.0), self.window.n_min - 1);
        let mut up = ComplexSum::new();
        let mut down = ComplexSum::new();
        for &phi in &self.phis {
            let (s, c) = (phi * tau).sin_cos();
            let g = ladder.value();
            up.add(g * Complex64::new(c, -s / phi));
            down.add(g * Complex64::new(0.0, e * s / phi));
            ladder.step();
        }
        let zero = Complex64::new(0.0, 0.0);
        SpinorSample([up.value(), zero, zero, down.value() * w])
    }
}
