//! Closed-form spinor wave functions on the plane.
//!
//! * [`PositivePacket`]: positive-energy coherent packet, grouped series in
//!   powers of `γ = -qa·ρ/2` with the Gaussian prefactor `M(ρ, θ)`.
//! * [`ClassicalPacket`]: the same packet with a linearized spectrum and
//!   weakly relativistic spinor, a rigidly rotating Gaussian.
//! * [`FractionalRevival`]: Gauss-sum superposition of rotated classical
//!   packets describing the state near `t = (m/n) T_R`.
//! * [`JcPacket`]: two-band spin-up coherent packet (`λ_k = +1` subspace).
//! * [`cat_decomposition`]: spin factors of the two counter-rotating
//!   sub-packets of the two-band packet.

mod cat;
mod classical;
mod jc;
mod positive;

pub use cat::{cat_decomposition, cat_overlap_closed_form, CatDecomposition};
pub use classical::{fractional_revival_coefficients, ClassicalPacket, FractionalRevival};
pub use jc::JcPacket;
pub use positive::PositivePacket;

use num_complex::Complex64;

/// `γ^k/k!·exp(log_prefactor)` for `k = start, start+1, …`, seeded in log space
/// so neither factor overflows on its own.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PowerLadder {
    k: u64,
    value: Complex64,
    base: Complex64,
}

impl PowerLadder {
    pub(crate) fn new(base: Complex64, log_prefactor: Complex64, start: u64) -> Self {
        let value = if base.norm() == 0.0 {
            if start == 0 {
                log_prefactor.exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else {
            let kf = start as f64;
            let ln_fact = statrs::function::factorial::ln_factorial(start);
            (log_prefactor + base.ln() * kf - ln_fact).exp()
        };
        PowerLadder {
            k: start,
            value,
            base,
        }
    }

    #[inline]
    pub(crate) fn value(&self) -> Complex64 {
        self.value
    }

    #[inline]
    pub(crate) fn step(&mut self) {
        self.k += 1;
        self.value *= self.base / self.k as f64;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_matches_direct_powers() {
        let base = Complex64::new(-3.5, 0.0);
        let pre = Complex64::new(-2.0, 0.4);
        let mut l = PowerLadder::new(base, pre, 2);
        let mut fact = 2.0;
        for k in 2..30u64 {
            if k > 2 {
                fact *= k as f64;
            }
            let direct = base.powu(k as u32) / fact * pre.exp();
            assert!((l.value() - direct).norm() < 1e-12 * direct.norm(), "k={k}");
            l.step();
        }
        let zero = PowerLadder::new(Complex64::new(0.0, 0.0), pre, 0);
        assert_eq!(zero.value(), pre.exp());
    }
}
