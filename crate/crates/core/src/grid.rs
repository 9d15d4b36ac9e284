//! Polar evaluation domain centred on the orbit centre `(0, qa)`.
//!
//! `x/a = ρ sin θ`, `(y - qa·a)/a = ρ cos θ`. The packet starts at `θ = π`,
//! i.e. at the origin of the laboratory frame.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::exec::Execution;
use crate::spectrum::ModelParams;
use crate::sum::NeumaierSum;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarPoint {
    pub rho: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(rho: f64, theta: f64) -> Self {
        PolarPoint { rho, theta }
    }

    /// Polar coordinates of the laboratory point `(x, y)` (units of `a`).
    pub fn from_cartesian(x: f64, y: f64, params: &ModelParams) -> Self {
        let dy = y - params.qa;
        let theta = x.atan2(dy).rem_euclid(2.0 * PI);
        PolarPoint {
            rho: x.hypot(dy),
            theta,
        }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.rho * self.theta.sin()
    }

    /// `y` relative to the orbit centre.
    #[inline]
    pub fn y_rel(&self) -> f64 {
        self.rho * self.theta.cos()
    }

    /// Laboratory `y`.
    #[inline]
    pub fn y(&self, params: &ModelParams) -> f64 {
        params.qa + self.y_rel()
    }
}

/// Four complex bispinor components at one point, units of `1/a`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpinorSample(pub [Complex64; 4]);

impl SpinorSample {
    pub fn zero() -> Self {
        SpinorSample::default()
    }

    pub fn density(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩ = Σ conj(self_i) other_i`.
    pub fn inner(&self, other: &SpinorSample) -> Complex64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &SpinorSample) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for SpinorSample {
    type Output = SpinorSample;

    fn add(self, rhs: SpinorSample) -> SpinorSample {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        SpinorSample(out)
    }
}

impl Mul<Complex64> for SpinorSample {
    type Output = SpinorSample;

    fn mul(self, rhs: Complex64) -> SpinorSample {
        SpinorSample(self.0.map(|c| c * rhs))
    }
}

/// Uniform polar grid: `n_rho` radial nodes on `[0, rho_max]` (trapezoidal
/// weights) times `n_theta` angles `2πj/n_theta` (uniform weights). Point order
/// is theta-major: all radii for `θ_0`, then all radii for `θ_1`, …
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarGrid {
    pub rho_max: f64,
    pub n_rho: usize,
    pub n_theta: usize,
}

impl PolarGrid {
    pub fn new(rho_max: f64, n_rho: usize, n_theta: usize) -> Self {
        assert!(rho_max > 0.0 && n_rho >= 2 && n_theta >= 1, "degenerate grid");
        PolarGrid {
            rho_max,
            n_rho,
            n_theta,
        }
    }

    /// `ρ_max = qa + 6`, 120 radial and 256 angular nodes.
    pub fn default_for(params: &ModelParams) -> Self {
        PolarGrid::new(params.qa + 6.0, 120, 256)
    }

    pub fn len(&self) -> usize {
        self.n_rho * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn d_rho(&self) -> f64 {
        self.rho_max / (self.n_rho - 1) as f64
    }

    #[inline]
    pub fn d_theta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    #[inline]
    pub fn rho(&self, i: usize) -> f64 {
        i as f64 * self.d_rho()
    }

    #[inline]
    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.d_theta()
    }

    #[inline]
    pub fn point(&self, flat: usize) -> PolarPoint {
        let j = flat / self.n_rho;
        let i = flat % self.n_rho;
        PolarPoint::new(self.rho(i), self.theta(j))
    }

    /// Area weight `ρ dρ dθ` of a node (units of `a²`).
    #[inline]
    pub fn weight(&self, flat: usize) -> f64 {
        let i = flat % self.n_rho;
        let end = if i == 0 || i + 1 == self.n_rho { 0.5 } else { 1.0 };
        end * self.rho(i) * self.d_rho() * self.d_theta()
    }

    pub fn points(&self) -> impl Iterator<Item = PolarPoint> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }

    /// Evaluates `f` at every node in grid order.
    pub fn sample<T, F>(&self, exec: Execution, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(PolarPoint) -> T + Sync + Send,
    {
        exec.map(self.len(), |k| f(self.point(k)))
    }

    /// `∫ f dA` for values sampled in grid order, accumulated in node order.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len());
        let mut acc = NeumaierSum::new();
        for (k, v) in values.iter().enumerate() {
            acc.add(v * self.weight(k));
        }
        acc.value()
    }

    /// Angular marginal `∫ f ρ dρ` for each `θ_j`.
    pub fn angular_marginal(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.len());
        (0..self.n_theta)
            .map(|j| {
                let mut acc = NeumaierSum::new();
                for i in 0..self.n_rho {
                    let k = j * self.n_rho + i;
                    acc.add(values[k] * self.weight(k) / self.d_theta());
                }
                acc.value()
            })
            .collect()
    }
}

/// Indices of strict local maxima of a periodic sequence whose value exceeds
/// `rel_floor` times the global maximum.
pub fn circular_peaks(values: &[f64], rel_floor: f64) -> Vec<usize> {
    let n = values.len();
    let top = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..n)
        .filter(|&j| {
            let prev = values[(j + n - 1) % n];
            let next = values[(j + 1) % n];
            values[j] > prev && values[j] >= next && values[j] >= rel_floor * top
        })
        .collect()
}

/// Smallest angular separation between two angles, in `[0, π]`.
pub fn angle_between(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}
