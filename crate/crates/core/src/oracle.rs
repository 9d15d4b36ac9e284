//! Brute-force reference engine: term-by-term mode sums through the kernel
//! `Q_k`, grid quadrature of bilinear observables, and the direct momentum
//! integral that defines `Q_k`.

use std::f64::consts::PI;
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;
use std::sync::OnceLock;

use gauss_quad::GaussHermite;
use num_complex::Complex64;

use crate::basis::{KernelLadder, ModeSet};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{PolarGrid, PolarPoint, SpinorSample};
use crate::spectrum::{level_energy, mixing_from_level, taylor, ModeIndex, ModelParams, Sign, Taylor};
use crate::sum::{ComplexSum, NeumaierSum};

/// Gauss-Hermite order used for the momentum integral.
pub const B1_NODES: usize = 200;

/// Largest tolerated deviation of the grid norm from 1 before observables are
/// refused.
pub const NORM_REFUSAL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SpectrumMode {
    #[default]
    Exact,
    /// `φ_n` replaced by its quadratic expansion about `(qa)²/2`.
    Taylor2,
}

impl SpectrumMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumMode::Exact => "exact",
            SpectrumMode::Taylor2 => "taylor2",
        }
    }
}

impl FromStr for SpectrumMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SpectrumMode::Exact),
            "taylor2" => Ok(SpectrumMode::Taylor2),
            other => Err(Error::Params(format!("unknown spectrum mode `{other}`"))),
        }
    }
}

/// Spinor of one eigenmode given `Q_{n-1}` and `Q_n` at the point.
pub fn mode_spinor(index: ModeIndex, q_prev: Complex64, q_n: Complex64, params: &ModelParams) -> [Complex64; 4] {
    let zero = Complex64::new(0.0, 0.0);
    let (d, b) = mixing_from_level(index.n() as f64, params.lambda_over_a);
    match (index.lambda_k(), index.band()) {
        (Sign::Plus, Sign::Plus) => [q_prev * d, zero, zero, -q_n * b],
        (Sign::Plus, Sign::Minus) => [q_prev * b, zero, zero, q_n * d],
        (Sign::Minus, Sign::Plus) => [zero, q_n * d, -q_prev * b, zero],
        (Sign::Minus, Sign::Minus) => [zero, q_n * b, q_prev * d, zero],
    }
}

/// Mode set with precomputed level energies, evaluated term by term.
#[derive(Clone, Debug)]
pub struct ModeSum {
    params: ModelParams,
    modes: ModeSet,
    spectrum: SpectrumMode,
    energies: Vec<f64>,
    k_min: u64,
    k_max: u64,
}

impl ModeSum {
    pub fn new(modes: &ModeSet, spectrum: SpectrumMode, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let expansion: Option<Taylor> = match spectrum {
            SpectrumMode::Exact => None,
            SpectrumMode::Taylor2 => Some(taylor(params)?.expansion()),
        };
        let energies = modes
            .entries()
            .iter()
            .map(|e| {
                let n = e.index.n() as f64;
                let phi = match expansion {
                    None => level_energy(n, params.lambda_over_a),
                    Some(t) => t.eval(n),
                };
                e.index.band().value() * phi
            })
            .collect();
        let k_min = modes
            .entries()
            .iter()
            .map(|e| e.index.n() as u64)
            .min()
            .unwrap_or(0)
            .saturating_sub(1);
        let k_max = modes.entries().iter().map(|e| e.index.n() as u64).max().unwrap_or(0);
        Ok(ModeSum {
            params: *params,
            modes: modes.clone(),
            spectrum,
            energies,
            k_min,
            k_max,
        })
    }

    pub fn spectrum(&self) -> SpectrumMode {
        self.spectrum
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn field(&self, pt: PolarPoint, tau: f64) -> SpinorSample {
        let x = pt.x();
        let y = pt.y(&self.params);
        let kernels: Vec<Complex64> = KernelLadder::starting_at(self.k_min, x, y, &self.params)
            .take((self.k_max - self.k_min + 1) as usize)
            .collect();
        let q = |k: i64| -> Complex64 {
            if k < self.k_min as i64 {
                Complex64::new(0.0, 0.0)
            } else {
                kernels[(k as u64 - self.k_min) as usize]
            }
        };
        let mut acc = [ComplexSum::new(); 4];
        for (entry, &energy) in self.modes.entries().iter().zip(&self.energies) {
            let n = entry.index.n() as i64;
            let spinor = mode_spinor(entry.index, q(n - 1), q(n), &self.params);
            let coef = entry.amplitude * Complex64::from_polar(1.0, -energy * tau);
            for (a, s) in acc.iter_mut().zip(spinor) {
                a.add(coef * s);
            }
        }
        SpinorSample(acc.map(|a| a.value()))
    }
}

/// Free-standing form of [`ModeSum::field`].
pub fn mode_sum_field(
    pt: PolarPoint,
    tau: f64,
    modes: &ModeSet,
    spectrum: SpectrumMode,
    params: &ModelParams,
) -> Result<SpinorSample> {
    Ok(ModeSum::new(modes, spectrum, params)?.field(pt, tau))
}

/// Spinor samples on a grid at one time.
#[derive(Clone, Debug)]
pub struct OracleField {
    pub grid: PolarGrid,
    pub samples: Vec<SpinorSample>,
    pub tau: f64,
    pub spectrum: SpectrumMode,
    /// Laboratory `y` of the orbit centre, needed for `position_y`.
    pub y_center: f64,
}

impl OracleField {
    pub fn from_mode_sum(grid: PolarGrid, tau: f64, sum: &ModeSum, exec: Execution) -> Self {
        OracleField {
            grid,
            samples: grid.sample(exec, |pt| sum.field(pt, tau)),
            tau,
            spectrum: sum.spectrum,
            y_center: sum.params.qa,
        }
    }

    /// Samples any field on the grid.
    pub fn sample<F>(grid: PolarGrid, tau: f64, params: &ModelParams, exec: Execution, f: F) -> Self
    where
        F: Fn(PolarPoint, f64) -> SpinorSample + Sync + Send,
    {
        OracleField {
            grid,
            samples: grid.sample(exec, |pt| f(pt, tau)),
            tau,
            spectrum: SpectrumMode::Exact,
            y_center: params.qa,
        }
    }

    pub fn norm(&self) -> f64 {
        let d: Vec<f64> = self.samples.iter().map(SpinorSample::density).collect();
        self.grid.integrate(&d)
    }

    pub fn densities(&self) -> Vec<f64> {
        self.samples.iter().map(SpinorSample::density).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    VelocityX,
    VelocityY,
    SigmaX,
    SigmaY,
    SigmaZ,
    PositionX,
    PositionY,
    Norm,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 8] = [
        OperatorKind::VelocityX,
        OperatorKind::VelocityY,
        OperatorKind::SigmaX,
        OperatorKind::SigmaY,
        OperatorKind::SigmaZ,
        OperatorKind::PositionX,
        OperatorKind::PositionY,
        OperatorKind::Norm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            OperatorKind::VelocityX => "velocity_x",
            OperatorKind::VelocityY => "velocity_y",
            OperatorKind::SigmaX => "sigma_x",
            OperatorKind::SigmaY => "sigma_y",
            OperatorKind::SigmaZ => "sigma_z",
            OperatorKind::PositionX => "position_x",
            OperatorKind::PositionY => "position_y",
            OperatorKind::Norm => "norm",
        }
    }

    /// `ψ†Ôψ` at one point.
    pub fn local(&self, s: &SpinorSample, pt: PolarPoint, y_center: f64) -> f64 {
        let [p1, p2, p3, p4] = s.0;
        match self {
            OperatorKind::VelocityX => 2.0 * ((p1.conj() * p4).re + (p3.conj() * p2).re),
            OperatorKind::VelocityY => 2.0 * ((p1.conj() * p4).im + (p3.conj() * p2).im),
            OperatorKind::SigmaX => 2.0 * ((p1.conj() * p2).re + (p3.conj() * p4).re),
            OperatorKind::SigmaY => 2.0 * ((p1.conj() * p2).im + (p3.conj() * p4).im),
            OperatorKind::SigmaZ => p1.norm_sqr() - p2.norm_sqr() + p3.norm_sqr() - p4.norm_sqr(),
            OperatorKind::PositionX => pt.x() * s.density(),
            OperatorKind::PositionY => (y_center + pt.y_rel()) * s.density(),
            OperatorKind::Norm => s.density(),
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Params(format!("unknown operator kind `{s}`")))
    }
}

/// `∫ψ†Ôψ dA`, divided by the grid norm. Refuses when the norm is off by more
/// than [`NORM_REFUSAL`]; the `norm` kind itself is returned raw.
pub fn quadrature_expectation(kind: OperatorKind, field: &OracleField) -> Result<f64> {
    let norm = field.norm();
    if kind == OperatorKind::Norm {
        return Ok(norm);
    }
    if !((norm - 1.0).abs() <= NORM_REFUSAL) {
        return Err(Error::GridNorm {
            norm,
            limit: NORM_REFUSAL,
        });
    }
    let values: Vec<f64> = field
        .samples
        .iter()
        .enumerate()
        .map(|(k, s)| kind.local(s, field.grid.point(k), field.y_center))
        .collect();
    Ok(field.grid.integrate(&values) / norm)
}

/// `|⟨a|b⟩| / (‖a‖‖b‖)` on a shared grid.
pub fn fidelity(a: &OracleField, b: &OracleField) -> Result<f64> {
    if a.grid != b.grid || a.samples.len() != b.samples.len() {
        return Err(Error::GridMismatch);
    }
    let grid = a.grid;
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for (k, (sa, sb)) in a.samples.iter().zip(&b.samples).enumerate() {
        let z = sa.inner(sb) * grid.weight(k);
        re.add(z.re);
        im.add(z.im);
    }
    let overlap = Complex64::new(re.value(), im.value()).norm();
    let denom = (a.norm() * b.norm()).sqrt();
    if !(denom > 0.0) {
        return Err(Error::Numeric("fidelity of a vanishing field".into()));
    }
    Ok((overlap / denom).min(1.0))
}

/// Normalized oscillator functions `φ_0..=φ_k_max` at `u`.
pub fn oscillator_functions(k_max: usize, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(PI.powf(-0.25) * (-0.5 * u * u).exp());
    if k_max >= 1 {
        out.push(2f64.sqrt() * u * out[0]);
    }
    for k in 1..k_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * u * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

fn hermite_rule() -> &'static GaussHermite {
    static RULE: OnceLock<GaussHermite> = OnceLock::new();
    RULE.get_or_init(|| GaussHermite::new(NonZeroUsize::new(B1_NODES).expect("nonzero")))
}

/// `Q_k(x, y) = ∫dp e^{ipx}/√(2π) g(p) φ_k(y - p)` by Gauss-Hermite quadrature
/// about the peak of `g`.
pub fn b1_quadrature(k: u64, x: f64, y: f64, params: &ModelParams) -> Complex64 {
    let y0 = params.qa;
    let norm = PI.powf(-0.25) / (2.0 * PI).sqrt();
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for (t, w) in hermite_rule().iter() {
        // g(p) e^{t²} = π^{-1/4} e^{t²/2}
        let phi_k = oscillator_functions(k as usize, y - y0 - t)[k as usize];
        let z = Complex64::from_polar(norm * phi_k * (0.5 * t * t).exp() * w, (y0 + t) * x);
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}
