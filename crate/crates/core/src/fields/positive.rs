use std::f64::consts::PI;

use num_complex::Complex64;

use super::PowerLadder;
use crate::basis::{truncation_window, TruncationWindow};
use crate::error::Result;
use crate::grid::{PolarPoint, SpinorSample};
use crate::spectrum::{level_energy, mixing_from_level, ModelParams};
use crate::sum::ComplexSum;

#[derive(Clone, Copy, Debug)]
struct Level {
    phi: f64,
    d: f64,
    b: f64,
    /// `α`-branch (components 1, 4) uses `c_n`
    alpha_term: bool,
    /// `β`-branch (components 2, 3) uses `c_{n+1}`
    beta_term: bool,
}

/// Positive-energy packet: the grouped series in `γ^k/k!` with prefactor
/// `M(ρ, θ)`. Levels follow the same truncation window as every other route.
#[derive(Clone, Debug)]
pub struct PositivePacket {
    params: ModelParams,
    window: TruncationWindow,
    first: u64,
    levels: Vec<Level>,
    wa: f64,
    wb: f64,
}

impl PositivePacket {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let window = truncation_window(params)?;
        let first = window.n_min - 1;
        let levels = (first..=window.n_max)
            .map(|n| {
                let (d, b) = mixing_from_level(n as f64, params.lambda_over_a);
                Level {
                    phi: level_energy(n as f64, params.lambda_over_a),
                    d,
                    b,
                    alpha_term: n >= 1 && window.contains(n),
                    beta_term: window.contains(n + 1),
                }
            })
            .collect();
        let (wa, wb) = params.branch_weights();
        Ok(PositivePacket {
            params: *params,
            window,
            first,
            levels,
            wa,
            wb,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn window(&self) -> TruncationWindow {
        self.window
    }

    /// `ln M(ρ, θ)`.
    fn log_prefactor(&self, pt: PolarPoint) -> Complex64 {
        let y0 = self.params.qa;
        let (s, c) = pt.theta.sin_cos();
        Complex64::new(
            -(pt.rho * pt.rho + y0 * y0) / 4.0 - 0.5 * (2.0 * PI).ln(),
            pt.rho * s * (pt.rho * c + 2.0 * y0) / 2.0,
        )
    }

    pub fn field(&self, pt: PolarPoint, tau: f64) -> SpinorSample {
        let y0 = self.params.qa;
        let gamma = Complex64::new(-0.5 * y0 * pt.rho, 0.0);
        let e_theta = Complex64::from_polar(1.0, pt.theta);
        // G_k = M γ^k / k!, starting at k = first - 1 (clamped at 0)
        let start = self.first.saturating_sub(1);
        let mut ladder = PowerLadder::new(gamma, self.log_prefactor(pt), start);
        let mut prev = if self.first == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            let v = ladder.value();
            ladder.step();
            v
        };
        let mut sums = [ComplexSum::new(); 4];
        for (offset, lv) in self.levels.iter().enumerate() {
            let n = self.first + offset as u64;
            let g_n = ladder.value();
            let g_nm1 = prev;
            let phase = Complex64::from_polar(1.0, -(pt.theta * n as f64) - lv.phi * tau);
            if lv.beta_term {
                sums[1].add(g_n * (self.wb * lv.d) * phase);
            }
            if n >= 1 {
                let root = (2.0 * n as f64).sqrt();
                let base = g_nm1 * phase;
                if lv.alpha_term {
                    sums[0].add(base * e_theta * (self.wa * lv.d));
                    sums[3].add(base * (-self.wa * lv.b * pt.rho / root));
                }
                if lv.beta_term {
                    sums[2].add(base * e_theta * (self.wb * lv.b * y0 / root));
                }
            }
            prev = g_n;
            ladder.step();
        }
        SpinorSample(sums.map(|s| s.value()))
    }
}
