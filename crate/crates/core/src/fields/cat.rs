use num_complex::Complex64;

use crate::error::Result;
use crate::spectrum::{mixing_from_level, taylor, ModelParams};

/// Spin factors of the two sub-packets of the two-band packet. Each is a
/// four-spinor with vanishing middle components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatDecomposition {
    pub plus: [Complex64; 4],
    pub minus: [Complex64; 4],
    /// `|⟨plus|minus⟩|`
    pub overlap: f64,
}

/// `(e^{-iφ′τ} d₀, 0, 0, b₀)` and `(e^{iφ′τ} b₀, 0, 0, -d₀)` at the real
/// mean level.
pub fn cat_decomposition(tau: f64, params: &ModelParams) -> Result<CatDecomposition> {
    params.validate()?;
    let t = taylor(params)?;
    let (d0, b0) = mixing_from_level(t.n0.real, params.lambda_over_a);
    let zero = Complex64::new(0.0, 0.0);
    let plus = [
        Complex64::from_polar(d0, -t.dphi * tau),
        zero,
        zero,
        Complex64::new(b0, 0.0),
    ];
    let minus = [
        Complex64::from_polar(b0, t.dphi * tau),
        zero,
        zero,
        Complex64::new(-d0, 0.0),
    ];
    let overlap = plus
        .iter()
        .zip(&minus)
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        .norm();
    Ok(CatDecomposition {
        plus,
        minus,
        overlap,
    })
}

/// Overlap at a quarter period, `√(2n₀ε²/(1 + 2n₀ε²))`.
pub fn cat_overlap_closed_form(params: &ModelParams) -> Result<f64> {
    let n0 = taylor(params)?.n0.real;
    let x = 2.0 * n0 * params.eps2();
    Ok((x / (1.0 + x)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn overlap_follows_sine_of_rotation() {
        let q = ModelParams::strongly_relativistic();
        let t = taylor(&q).unwrap();
        let (d0, b0) = mixing_from_level(t.n0.real, q.lambda_over_a);
        for tau in [0.0, 3.0, 17.5, 40.0] {
            let c = cat_decomposition(tau, &q).unwrap();
            let want = 2.0 * d0 * b0 * (t.dphi * tau).sin().abs();
            assert!((c.overlap - want).abs() < 1e-14);
        }
        let quarter = PI / (2.0 * t.dphi);
        let c = cat_decomposition(quarter, &q).unwrap();
        let closed = cat_overlap_closed_form(&q).unwrap();
        assert!((c.overlap - closed).abs() < 1e-12);
        assert!((closed - 0.980_580_675_690_920_2).abs() < 1e-12);
    }

    #[test]
    fn sub_packets_are_normalized() {
        let q = ModelParams::weakly_relativistic();
        let c = cat_decomposition(12.0, &q).unwrap();
        let n = |v: &[Complex64; 4]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!((n(&c.plus) - 1.0).abs() < 1e-14 && (n(&c.minus) - 1.0).abs() < 1e-14);
    }
}
