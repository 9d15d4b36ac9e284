use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{PolarPoint, SpinorSample};
use crate::spectrum::{fractional_revival_count, taylor, ModelParams, Taylor};

/// Weakly relativistic packet with the spectrum linearized about an integer
/// level. The whole orbital part is the rotating Gaussian
/// `M(ρ, θ)·exp(γ e^{-i(θ + φ′τ)})`.
#[derive(Clone, Copy, Debug)]
pub struct ClassicalPacket {
    params: ModelParams,
    expansion: Taylor,
    wa: f64,
    wb: f64,
}

impl ClassicalPacket {
    /// Expansion about `round((qa)²/2)`.
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let n0 = taylor(params)?.n0.integer;
        Ok(Self::about(params, n0))
    }

    /// Expansion about an explicit integer level.
    pub fn about(params: &ModelParams, level: u64) -> Self {
        let (wa, wb) = params.branch_weights();
        ClassicalPacket {
            params: *params,
            expansion: Taylor::at(level as f64, params.lambda_over_a),
            wa,
            wb,
        }
    }

    pub fn expansion(&self) -> Taylor {
        self.expansion
    }

    /// Period of the linearized motion, `2π/φ′`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.expansion.dphi
    }

    /// Angle of the density maximum, `π - φ′τ` reduced to `[0, 2π)`.
    pub fn peak_angle(&self, tau: f64) -> f64 {
        (PI - self.expansion.dphi * tau).rem_euclid(2.0 * PI)
    }

    /// `ln(M·S)` at the point, `S` taken at the rotated angle.
    fn log_orbital(&self, pt: PolarPoint, tau: f64) -> Complex64 {
        let y0 = self.params.qa;
        let (s, c) = pt.theta.sin_cos();
        let ln_m = Complex64::new(
            -(pt.rho * pt.rho + y0 * y0) / 4.0 - 0.5 * (2.0 * PI).ln(),
            pt.rho * s * (pt.rho * c + 2.0 * y0) / 2.0,
        );
        let u = pt.theta + self.expansion.dphi * tau;
        ln_m + Complex64::from_polar(-0.5 * y0 * pt.rho, -u)
    }

    pub fn field(&self, pt: PolarPoint, tau: f64) -> SpinorSample {
        let t = self.expansion;
        let e = self.params.lambda_over_a;
        let y0 = self.params.qa;
        let carrier = Complex64::new(0.0, -(t.phi + t.dphi * (1.0 - t.center)) * tau);
        let base = (self.log_orbital(pt, tau) + carrier).exp();
        let spin = [
            Complex64::new(self.wa, 0.0),
            Complex64::from_polar(self.wb, t.dphi * tau),
            Complex64::new(self.wb * e * y0 / 2.0, 0.0),
            Complex64::from_polar(-self.wa * e * pt.rho / 2.0, -pt.theta),
        ];
        SpinorSample(spin.map(|s| s * base))
    }

    /// `|ψ|²` in closed form.
    pub fn density(&self, pt: PolarPoint, tau: f64) -> f64 {
        let e2 = self.params.eps2();
        let y0 = self.params.qa;
        let orbital = (2.0 * self.log_orbital(pt, tau).re).exp();
        let spin = self.wa * self.wa * (1.0 + e2 * pt.rho * pt.rho / 4.0)
            + self.wb * self.wb * (1.0 + e2 * y0 * y0 / 4.0);
        orbital * spin
    }
}

/// `p_j = (1/n) Σ_k e^{2πi m k²/n} e^{-2πi jk/n}` for `j = 0..n`.
pub fn fractional_revival_coefficients(m: u64, n: u64) -> Result<Vec<Complex64>> {
    fractional_revival_count(m, n)?;
    let nf = n as f64;
    let gauss: Vec<Complex64> = (0..n)
        .map(|k| {
            let phase = 2.0 * PI * ((m * k * k) % n) as f64 / nf;
            Complex64::from_polar(1.0, phase)
        })
        .collect();
    Ok((0..n)
        .map(|j| {
            let s: Complex64 = gauss
                .iter()
                .enumerate()
                .map(|(k, g)| g * Complex64::from_polar(1.0, -2.0 * PI * ((j * k as u64) % n) as f64 / nf))
                .sum();
            s / nf
        })
        .collect())
}

/// State near `t = (m/n) T_R`: `Σ_j p_j e^{-iφ₀ s_j} ψ_cl(τ - s_j)` with
/// `s_j = j T_cl / n`.
#[derive(Clone, Debug)]
pub struct FractionalRevival {
    classical: ClassicalPacket,
    m: u64,
    n: u64,
    terms: Vec<(f64, Complex64)>,
}

impl FractionalRevival {
    pub fn new(params: &ModelParams, m: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("fractional revival needs n >= 1"));
        }
        let classical = ClassicalPacket::new(params)?;
        let coeffs = fractional_revival_coefficients(m, n)?;
        let t = classical.expansion();
        let terms = coeffs
            .into_iter()
            .enumerate()
            .map(|(j, p)| {
                let shift = j as f64 * classical.period() / n as f64;
                (shift, p * Complex64::from_polar(1.0, -t.phi * shift))
            })
            .collect();
        Ok(FractionalRevival {
            classical,
            m,
            n,
            terms,
        })
    }

    pub fn order(&self) -> (u64, u64) {
        (self.m, self.n)
    }

    pub fn classical(&self) -> &ClassicalPacket {
        &self.classical
    }

    /// `(s_j, weight_j)` of the sub-packets; zero weights are kept.
    pub fn terms(&self) -> &[(f64, Complex64)] {
        &self.terms
    }

    /// Angles of the sub-packets with non-negligible weight.
    pub fn sub_packet_angles(&self, tau: f64) -> Vec<f64> {
        self.terms
            .iter()
            .filter(|(_, w)| w.norm() > 1e-9)
            .map(|(s, _)| self.classical.peak_angle(tau - s))
            .collect()
    }

    pub fn field(&self, pt: PolarPoint, tau: f64) -> SpinorSample {
        self.terms
            .iter()
            .filter(|(_, w)| w.norm() > 0.0)
            .fold(SpinorSample::zero(), |acc, (s, w)| {
                acc + self.classical.field(pt, tau - s) * *w
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_revival_coefficients() {
        let p = fractional_revival_coefficients(1, 4).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((p[0] - Complex64::from_polar(h, PI / 4.0)).norm() < 1e-14);
        assert!(p[1].norm() < 1e-14 && p[3].norm() < 1e-14);
        assert!((p[2] - Complex64::from_polar(h, -PI / 4.0)).norm() < 1e-14);
    }

    #[test]
    fn half_revival_is_a_half_period_shift() {
        let p = fractional_revival_coefficients(1, 2).unwrap();
        assert!(p[0].norm() < 1e-14 && (p[1] - 1.0).norm() < 1e-14);
        assert!(fractional_revival_coefficients(2, 4).is_err());
    }

    #[test]
    fn coefficients_are_unitary() {
        for (m, n) in [(1, 3), (2, 3), (1, 5), (3, 7), (1, 8)] {
            let total: f64 = fractional_revival_coefficients(m, n)
                .unwrap()
                .iter()
                .map(|c| c.norm_sqr())
                .sum();
            assert!((total - 1.0).abs() < 1e-13, "{m}/{n}");
        }
    }

    #[test]
    fn density_closed_form_matches_field() {
        let q = ModelParams::weakly_relativistic();
        let cl = ClassicalPacket::new(&q).unwrap();
        for (rho, theta, tau) in [(5.0, PI, 0.0), (4.2, 1.0, 100.0), (6.1, 5.0, 333.0)] {
            let pt = PolarPoint::new(rho, theta);
            let a = cl.field(pt, tau).density();
            let b = cl.density(pt, tau);
            assert!((a - b).abs() <= 1e-13 * b.max(1e-300));
        }
    }

    #[test]
    fn peak_rotates_clockwise() {
        let q = ModelParams::weakly_relativistic();
        let cl = ClassicalPacket::new(&q).unwrap();
        let tau = cl.period() / 4.0;
        let want = cl.peak_angle(tau);
        assert!((want - PI / 2.0).abs() < 1e-12);
        let best = (0..720)
            .map(|j| j as f64 * PI / 360.0)
            .max_by(|&a, &b| {
                let f = |t: f64| cl.density(PolarPoint::new(q.qa, t), tau);
                f(a).total_cmp(&f(b))
            })
            .unwrap();
        assert!((best - want).abs() < 0.01);
    }
}
