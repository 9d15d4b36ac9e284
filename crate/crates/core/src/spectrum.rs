//! Relativistic Landau spectrum, branch mixing, and the time scales that follow
//! from a quadratic expansion of the spectrum about the central level.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// `ħ/(mc²)` in seconds: one unit of `τ` for an electron.
pub const COMPTON_TIME_S: f64 = 1.288_088_667_12e-21;

/// Critical field `m²c²/(eħ)` in tesla.
pub const CRITICAL_FIELD_T: f64 = 4.414e9;

/// Dimensionless packet and field configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Compton length over magnetic length, `λ/a`.
    pub lambda_over_a: f64,
    /// Orbit-radius parameter `q·a`.
    pub qa: f64,
    /// Weight of the `λ_k = +1` branch (unnormalized).
    pub alpha: f64,
    /// Weight of the `λ_k = -1` branch (unnormalized).
    pub beta: f64,
    /// Relative tail tolerance for series truncation.
    pub trunc_tol: f64,
    /// Optional hard cap on the highest Landau level kept.
    pub n_max_override: Option<usize>,
}

pub const DEFAULT_TRUNC_TOL: f64 = 1e-12;

impl ModelParams {
    pub fn new(lambda_over_a: f64, qa: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = ModelParams {
            lambda_over_a,
            qa,
            alpha,
            beta,
            trunc_tol: DEFAULT_TRUNC_TOL,
            n_max_override: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// `qa = 5`, `λ/a = 0.1`, `α = β`: weakly relativistic positive-energy packet.
    pub fn weakly_relativistic() -> Self {
        ModelParams::new(0.1, 5.0, 1.0, 1.0).expect("valid preset")
    }

    /// `qa = 10`, `λ/a = 0.5`: strongly relativistic packet used for the
    /// two-band dynamics.
    pub fn strongly_relativistic() -> Self {
        ModelParams::new(0.5, 10.0, 1.0, 1.0).expect("valid preset")
    }

    pub fn with_trunc_tol(mut self, tol: f64) -> Result<Self> {
        self.trunc_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_n_max(mut self, n_max: Option<usize>) -> Self {
        self.n_max_override = n_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.lambda_over_a, self.qa, self.alpha, self.beta, self.trunc_tol]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Params("non-finite parameter".into()));
        }
        if self.lambda_over_a <= 0.0 {
            return Err(Error::Params(format!(
                "lambda_over_a must be > 0, got {}",
                self.lambda_over_a
            )));
        }
        if self.qa <= 0.0 {
            return Err(Error::Params(format!("qa must be > 0, got {}", self.qa)));
        }
        if self.alpha == 0.0 && self.beta == 0.0 {
            return Err(Error::Params("alpha and beta cannot both be zero".into()));
        }
        if !(self.trunc_tol > 0.0 && self.trunc_tol < 1.0) {
            return Err(Error::Params(format!(
                "trunc_tol must lie in (0, 1), got {}",
                self.trunc_tol
            )));
        }
        Ok(())
    }

    /// `(λ/a)²`
    #[inline]
    pub fn eps2(&self) -> f64 {
        self.lambda_over_a * self.lambda_over_a
    }

    /// Normalized branch weights `(α, β)/√(α²+β²)`.
    pub fn branch_weights(&self) -> (f64, f64) {
        let norm = self.alpha.hypot(self.beta);
        (self.alpha / norm, self.beta / norm)
    }

    /// Mean of the Poisson occupation of Landau levels, `(qa)²/2`.
    #[inline]
    pub fn mean_level(&self) -> f64 {
        0.5 * self.qa * self.qa
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Eigenstate label: Landau level `n`, band `s`, and `K̂` eigenvalue `λ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex {
    n: u32,
    band: Sign,
    lambda_k: Sign,
}

impl ModeIndex {
    /// The lowest level of each branch exists in one band only: `n = 0` is
    /// allowed for `(λ_k, s) = (+1, -1)` and `(-1, +1)`.
    pub fn new(n: u32, band: Sign, lambda_k: Sign) -> Result<Self> {
        let lowest_allowed = if band == lambda_k { 1 } else { 0 };
        if n < lowest_allowed {
            return Err(Error::domain(format!(
                "no eigenstate with n = {n}, s = {band}, lambda_k = {lambda_k}"
            )));
        }
        Ok(ModeIndex { n, band, lambda_k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn band(&self) -> Sign {
        self.band
    }

    pub fn lambda_k(&self) -> Sign {
        self.lambda_k
    }
}

/// `φ(n) = √(1 + 2n(λ/a)²)` for real `n ≥ 0`.
#[inline]
pub fn level_energy(n: f64, lambda_over_a: f64) -> f64 {
    (1.0 + 2.0 * n * lambda_over_a * lambda_over_a).sqrt()
}

/// Dimensionless Landau energy `φ_n` in units of `mc²`.
pub fn phi(n: i64, params: &ModelParams) -> Result<f64> {
    if n < 0 {
        return Err(Error::domain(format!("Landau index must be >= 0, got {n}")));
    }
    Ok(level_energy(n as f64, params.lambda_over_a))
}

/// Signed eigenenergy `s·φ_n`.
pub fn energy(idx: ModeIndex, params: &ModelParams) -> f64 {
    idx.band.value() * level_energy(f64::from(idx.n), params.lambda_over_a)
}

/// `(d, b)` for a level of energy `φ`; `b` avoids the `φ - 1` cancellation.
#[inline]
pub(crate) fn mixing_from_level(n: f64, lambda_over_a: f64) -> (f64, f64) {
    let phi = level_energy(n, lambda_over_a);
    let phi_minus_one = 2.0 * n * lambda_over_a * lambda_over_a / (phi + 1.0);
    let d = ((phi + 1.0) / (2.0 * phi)).sqrt();
    let b = (phi_minus_one / (2.0 * phi)).sqrt();
    (d, b)
}

/// Branch-mixing coefficients `(d_n, b_n)` of the eigenspinors.
pub fn branch_coefficients(n: i64, params: &ModelParams) -> Result<(f64, f64)> {
    if n < 0 {
        return Err(Error::domain(format!("Landau index must be >= 0, got {n}")));
    }
    Ok(mixing_from_level(n as f64, params.lambda_over_a))
}

/// Quadratic expansion of `φ(n)` about a centre `n_c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor {
    pub center: f64,
    pub phi: f64,
    pub dphi: f64,
    pub ddphi: f64,
}

impl Taylor {
    pub fn at(center: f64, lambda_over_a: f64) -> Self {
        let e2 = lambda_over_a * lambda_over_a;
        let phi = level_energy(center, lambda_over_a);
        Taylor {
            center,
            phi,
            dphi: e2 / phi,
            ddphi: -e2 * e2 / (phi * phi * phi),
        }
    }

    /// `φ₀ + φ′k + φ″k²/2` with `k = n - n_c`.
    #[inline]
    pub fn eval(&self, n: f64) -> f64 {
        let k = n - self.center;
        self.phi + self.dphi * k + 0.5 * self.ddphi * k * k
    }

    /// Linear part only, `φ₀ + φ′k`.
    #[inline]
    pub fn eval_linear(&self, n: f64) -> f64 {
        self.phi + self.dphi * (n - self.center)
    }
}

/// Central level of the packet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CentralLevel {
    /// `(qa)²/2`, used in every time-scale formula.
    pub real: f64,
    /// `round((qa)²/2)`, halves rounded away from zero; used for labelling and
    /// as the expansion point of the classical and fractional-revival fields.
    pub integer: u64,
}

/// Central level with expansion coefficients at the real-valued centre.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorExpansion {
    pub n0: CentralLevel,
    pub phi: f64,
    pub dphi: f64,
    pub ddphi: f64,
}

pub fn taylor(params: &ModelParams) -> Result<TaylorExpansion> {
    if params.qa < 1.0 {
        return Err(Error::domain(format!(
            "Taylor expansion needs qa >= 1, got {}",
            params.qa
        )));
    }
    let real = params.mean_level();
    let t = Taylor::at(real, params.lambda_over_a);
    Ok(TaylorExpansion {
        n0: CentralLevel {
            real,
            integer: real.round() as u64,
        },
        phi: t.phi,
        dphi: t.dphi,
        ddphi: t.ddphi,
    })
}

impl TaylorExpansion {
    pub fn expansion(&self) -> Taylor {
        Taylor {
            center: self.n0.real,
            phi: self.phi,
            dphi: self.dphi,
            ddphi: self.ddphi,
        }
    }
}

/// Characteristic scales of a packet; times in `λ/c`, frequencies in `c/λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedScales {
    pub n0: CentralLevel,
    pub phi0: f64,
    pub dphi: f64,
    pub ddphi: f64,
    pub t_cl: f64,
    pub t_d: f64,
    pub t_r: f64,
    pub omega_c: f64,
    pub omega_zb: f64,
    pub b_tesla: f64,
}

pub fn derived_scales(params: &ModelParams) -> Result<DerivedScales> {
    let t = taylor(params)?;
    let t_cl = 2.0 * PI / t.dphi;
    Ok(DerivedScales {
        n0: t.n0,
        phi0: t.phi,
        dphi: t.dphi,
        ddphi: t.ddphi,
        t_cl,
        t_d: 2.0 / (params.qa * t.ddphi.abs()),
        t_r: 4.0 * PI / t.ddphi.abs(),
        omega_c: 2.0 * PI / t_cl,
        omega_zb: 2.0 * t.phi,
        b_tesla: params.eps2() * CRITICAL_FIELD_T,
    })
}

impl DerivedScales {
    pub fn to_seconds(tau: f64) -> f64 {
        tau * COMPTON_TIME_S
    }

    pub fn to_per_second(omega: f64) -> f64 {
        omega / COMPTON_TIME_S
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Number of sub-packets at `t = (m/n) T_R`: `n(3 - (-1)ⁿ)/4`.
pub fn fractional_revival_count(m: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("revival denominator must be >= 1"));
    }
    if gcd(m, n) != 1 {
        return Err(Error::domain(format!(
            "{m}/{n} is not an irreducible fraction"
        )));
    }
    Ok(if n.is_multiple_of(2) { n / 2 } else { n })
}
