//! Coherent-state expansion machinery shared by every packet family.
//!
//! A packet is `∫dp φ_p(x) g(p) Σ C_mode U_mode(y - y_c(p))`. The coherent weights
//! `c_n` (1-indexed) carry the level occupation, `g(p)` the momentum profile,
//! and the `p` integral of one oscillator function is the kernel `Q_k(x, y)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::spectrum::{mixing_from_level, taylor, ModeIndex, ModelParams, Sign};
use crate::sum::NeumaierSum;

/// `ln|c_n|` for `n ≥ 1`.
fn ln_abs_coherent(n: u64, qa: f64) -> f64 {
    let k = (n - 1) as f64;
    let ln_qa_term = if n == 1 { 0.0 } else { k * qa.ln() };
    -0.25 * qa * qa + ln_qa_term - 0.5 * (k * std::f64::consts::LN_2 + ln_factorial(n - 1))
}

/// Coherent-state coefficient
/// `c_n = exp(-(qa)²/4) (-qa)^(n-1) / √(2^(n-1) (n-1)!)`.
pub fn coherent_coefficient(n: u64, qa: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("coherent coefficients are indexed from n = 1"));
    }
    Ok(coherent_unchecked(n, qa))
}

#[inline]
pub(crate) fn coherent_unchecked(n: u64, qa: f64) -> f64 {
    let mag = ln_abs_coherent(n, qa).exp();
    if (n - 1).is_multiple_of(2) {
        mag
    } else {
        -mag
    }
}

/// `|c_{k+1}|²`: Poisson probability of level `k` with mean `(qa)²/2`.
pub fn occupation(k: u64, qa: f64) -> f64 {
    (2.0 * ln_abs_coherent(k + 1, qa)).exp()
}

/// Momentum profile `g(p)`, `p` in units of `ħ/a`.
pub fn momentum_profile(p: f64, params: &ModelParams) -> f64 {
    let u = p - params.qa;
    PI.powf(-0.25) * (-0.5 * u * u).exp()
}

/// `Q_k(x, y)` evaluated directly with log-space magnitude;
/// `x, y` in units of `a`.
pub fn q_kernel(k: u64, x: f64, y: f64, params: &ModelParams) -> Complex64 {
    let y0 = params.qa;
    let w = Complex64::new(y - y0, -x);
    let gauss = Complex64::new(
        -(x * x + (y - y0) * (y - y0)) / 4.0,
        x * (y + y0) / 2.0,
    );
    let kf = k as f64;
    let ln_norm = -0.5 * ((kf + 1.0) * std::f64::consts::LN_2 + ln_factorial(k) + PI.ln());
    let r = w.norm();
    if r == 0.0 {
        return if k == 0 {
            (gauss + ln_norm).exp()
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let phase = kf * w.arg();
    (gauss + Complex64::new(ln_norm + kf * r.ln(), phase)).exp()
}

/// Successive kernels `Q_k, Q_{k+1}, …` at a fixed point via
/// `Q_{k+1} = Q_k · (y - qa - ix) / √(2(k+1))`.
#[derive(Clone, Debug)]
pub struct KernelLadder {
    k: u64,
    current: Complex64,
    w: Complex64,
}

impl KernelLadder {
    pub fn starting_at(k: u64, x: f64, y: f64, params: &ModelParams) -> Self {
        KernelLadder {
            k,
            current: q_kernel(k, x, y, params),
            w: Complex64::new(y - params.qa, -x),
        }
    }

    pub fn index(&self) -> u64 {
        self.k
    }

    pub fn value(&self) -> Complex64 {
        self.current
    }

    pub fn step(&mut self) {
        self.k += 1;
        self.current *= self.w / (2.0 * self.k as f64).sqrt();
    }
}

impl Iterator for KernelLadder {
    type Item = Complex64;

    fn next(&mut self) -> Option<Complex64> {
        let v = self.current;
        self.step();
        Some(v)
    }
}

/// Inclusive range of coherent indices `n` (of `c_n`) kept in every series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationWindow {
    pub n_min: u64,
    pub n_max: u64,
}

impl TruncationWindow {
    pub fn contains(&self, n: u64) -> bool {
        (self.n_min..=self.n_max).contains(&n)
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.n_min..=self.n_max
    }

    /// `c_n` inside the window, zero outside.
    #[inline]
    pub fn coefficient(&self, n: u64, qa: f64) -> f64 {
        if n >= 1 && self.contains(n) {
            coherent_unchecked(n, qa)
        } else {
            0.0
        }
    }

    /// `Σ_{n ∉ window} |c_n|²`, summed term by term on both sides.
    pub fn tail_mass(&self, qa: f64) -> f64 {
        let mut acc = NeumaierSum::new();
        for n in 1..self.n_min {
            acc.add(occupation(n - 1, qa));
        }
        let mean = 0.5 * qa * qa;
        let mut n = self.n_max + 1;
        loop {
            let w = occupation(n - 1, qa);
            acc.add(w);
            // Beyond the mode the terms fall faster than geometrically.
            if (n - 1) as f64 > mean && w < 1e-300_f64.max(acc.value() * 1e-18) {
                break;
            }
            n += 1;
        }
        acc.value()
    }
}

/// Smallest window `[n0 - h, n0 + h]` (clipped at 1) whose tail mass is below
/// `trunc_tol`. The half-width `h` grows in steps of `⌈√n0 / 4⌉`.
pub fn truncation_window(params: &ModelParams) -> Result<TruncationWindow> {
    let mean = params.mean_level();
    // coherent index of the Poisson mode
    let center = mean.floor() as u64 + 1;
    let step = ((mean.sqrt() / 4.0).ceil() as u64).max(1);
    let cap = params.n_max_override.map(|c| c as u64);
    let mut h = 0u64;
    loop {
        let n_min = center.saturating_sub(h).max(1);
        let mut n_max = center + h;
        if let Some(c) = cap {
            n_max = n_max.min(c.max(1));
        }
        let w = TruncationWindow {
            n_min: n_min.min(n_max),
            n_max,
        };
        let tail = w.tail_mass(params.qa);
        if tail < params.trunc_tol {
            return Ok(w);
        }
        if let Some(c) = cap {
            if center + h >= c && n_min == 1 {
                return Err(Error::Truncation {
                    tol: params.trunc_tol,
                    n_max: c as usize,
                    tail,
                });
            }
        }
        h += step;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PacketKind {
    /// Positive-energy coherent packet with both `λ_k` branches.
    PositiveOnly,
    /// Spin-up coherent packet in the `λ_k = +1` subspace, both bands.
    TwoBand,
    /// Coherent orbital state times the `n0` positive-energy spinor `|+⟩`.
    CatPlus,
    /// Coherent orbital state times the orthogonal spinor `|−⟩`.
    CatMinus,
}

impl PacketKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PacketKind::PositiveOnly => "positive_only",
            PacketKind::TwoBand => "two_band",
            PacketKind::CatPlus => "cat_plus",
            PacketKind::CatMinus => "cat_minus",
        }
    }
}

impl fmt::Display for PacketKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PacketKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive_only" => Ok(PacketKind::PositiveOnly),
            "two_band" => Ok(PacketKind::TwoBand),
            "cat_plus" => Ok(PacketKind::CatPlus),
            "cat_minus" => Ok(PacketKind::CatMinus),
            other => Err(Error::domain(format!("unknown packet kind `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeEntry {
    pub index: ModeIndex,
    pub amplitude: Complex64,
}

/// A packet in the energy representation: eigenmode labels with amplitudes,
/// sorted by ascending `n` (then band, then `λ_k`).
#[derive(Clone, Debug)]
pub struct ModeSet {
    kind: PacketKind,
    window: TruncationWindow,
    entries: Vec<ModeEntry>,
}

impl ModeSet {
    pub fn kind(&self) -> PacketKind {
        self.kind
    }

    pub fn window(&self) -> TruncationWindow {
        self.window
    }

    pub fn entries(&self) -> &[ModeEntry] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.amplitude.norm_sqr()).sum()
    }

    /// Total weight in band `s`.
    pub fn band_mass(&self, band: Sign) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.index.band() == band)
            .map(|e| e.amplitude.norm_sqr())
            .sum()
    }

    /// Sub-packet made of the modes of one band only.
    pub fn restrict_to_band(&self, band: Sign) -> ModeSet {
        ModeSet {
            kind: self.kind,
            window: self.window,
            entries: self
                .entries
                .iter()
                .copied()
                .filter(|e| e.index.band() == band)
                .collect(),
        }
    }

    pub fn amplitude(&self, index: ModeIndex) -> Complex64 {
        self.entries
            .iter()
            .find(|e| e.index == index)
            .map(|e| e.amplitude)
            .unwrap_or_default()
    }
}

pub fn build_mode_set(kind: PacketKind, params: &ModelParams) -> Result<ModeSet> {
    let window = truncation_window(params)?;
    let qa = params.qa;
    let e = params.lambda_over_a;
    let c = |n: u64| window.coefficient(n, qa);
    let mut entries = Vec::new();
    let mut push = |n: u64, band: Sign, lk: Sign, amp: f64| -> Result<()> {
        if amp != 0.0 {
            entries.push(ModeEntry {
                index: ModeIndex::new(n as u32, band, lk)?,
                amplitude: Complex64::new(amp, 0.0),
            });
        }
        Ok(())
    };
    let lo = window.n_min.saturating_sub(1);
    match kind {
        PacketKind::PositiveOnly => {
            let (wa, wb) = params.branch_weights();
            for n in lo..=window.n_max {
                push(n, Sign::Plus, Sign::Minus, wb * c(n + 1))?;
                if n >= 1 {
                    push(n, Sign::Plus, Sign::Plus, wa * c(n))?;
                }
            }
        }
        PacketKind::TwoBand => {
            for n in window.iter() {
                let (d, b) = mixing_from_level(n as f64, e);
                push(n, Sign::Minus, Sign::Plus, b * c(n))?;
                push(n, Sign::Plus, Sign::Plus, d * c(n))?;
            }
        }
        PacketKind::CatPlus | PacketKind::CatMinus => {
            let n0 = taylor(params)?.n0.real;
            let (d0, b0) = mixing_from_level(n0, e);
            // spinor components (upper ↑, lower ↓) of the initial state
            let (up, down) = if kind == PacketKind::CatPlus {
                (d0, b0)
            } else {
                (b0, -d0)
            };
            for n in lo..=window.n_max {
                let (d, b) = mixing_from_level(n as f64, e);
                // project (up·c_n Q_{n-1}, down·c_{n+1} Q_n) on the s = ∓ eigenspinors
                let minus = b * up * c(n) + d * down * c(n + 1);
                push(n, Sign::Minus, Sign::Plus, minus)?;
                if n >= 1 {
                    let plus = d * up * c(n) - b * down * c(n + 1);
                    push(n, Sign::Plus, Sign::Plus, plus)?;
                }
            }
        }
    }
    entries.sort_by_key(|e| e.index);
    Ok(ModeSet {
        kind,
        window,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(e: f64, qa: f64) -> ModelParams {
        ModelParams::new(e, qa, 1.0, 1.0).unwrap()
    }

    #[test]
    fn coherent_examples() {
        assert!((coherent_coefficient(1, 2.0).unwrap() - (-1f64).exp()).abs() < 1e-16);
        assert!(coherent_coefficient(0, 2.0).is_err());
        let total: f64 = (1..200).map(|n| coherent_unchecked(n, 5.0).powi(2)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // sign alternates with (-qa)^(n-1)
        assert!(coherent_unchecked(2, 5.0) < 0.0 && coherent_unchecked(3, 5.0) > 0.0);
        // large n without overflow
        assert!(coherent_unchecked(500, 10.0).is_finite());
    }

    #[test]
    fn coherent_peak_location() {
        let argmax = (1..=200u64)
            .max_by(|&a, &b| {
                coherent_unchecked(a, 10.0)
                    .powi(2)
                    .total_cmp(&coherent_unchecked(b, 10.0).powi(2))
            })
            .unwrap();
        assert!([49, 50].contains(&(argmax - 1)), "{argmax}");
    }

    #[test]
    fn coherent_matches_running_ratio() {
        let qa = 7.0;
        let mut c = (-qa * qa / 4.0f64).exp();
        for n in 1..100u64 {
            let direct = coherent_unchecked(n, qa);
            assert!((direct - c).abs() <= 1e-13 * c.abs().max(1e-300), "n={n}");
            c *= -qa / (2.0 * n as f64).sqrt();
        }
    }

    #[test]
    fn profile_normalized() {
        let q = p(0.1, 5.0);
        let h = 1e-3;
        let integral: f64 = (-10_000..=20_000)
            .map(|i| momentum_profile(i as f64 * h, &q).powi(2) * h)
            .sum();
        assert!((integral - 1.0).abs() < 1e-8);
        let peak = momentum_profile(5.0, &q);
        assert!((peak - 1.0 / PI.sqrt().sqrt()).abs() < 1e-15);
        assert!(momentum_profile(5.1, &q) < peak && momentum_profile(4.9, &q) < peak);
    }

    #[test]
    fn kernel_at_packet_centre() {
        let q = p(0.1, 5.0);
        let q0 = q_kernel(0, 0.0, 5.0, &q);
        assert!((q0.norm() - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert_eq!(q_kernel(3, 0.0, 5.0, &q), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn ladder_matches_direct() {
        let q = p(0.1, 5.0);
        for (x, y) in [(0.0, 6.0), (0.7, 3.2), (-2.0, 9.0)] {
            let ladder = KernelLadder::starting_at(0, x, y, &q);
            for (k, v) in ladder.take(61).enumerate() {
                let d = q_kernel(k as u64, x, y, &q);
                assert!((v - d).norm() <= 1e-12 * d.norm().max(1e-300), "k={k}");
            }
        }
    }

    #[test]
    fn window_examples() {
        let w5 = truncation_window(&p(0.1, 5.0)).unwrap();
        assert!(w5.n_min == 1 && w5.n_max >= 40 && w5.n_max <= 60, "{w5:?}");
        let w10 = truncation_window(&p(0.5, 10.0)).unwrap();
        assert!(w10.n_min <= 15 && w10.n_max >= 100, "{w10:?}");
        assert!(w10.tail_mass(10.0) < 1e-12);
        let loose = p(0.5, 10.0).with_trunc_tol(0.5).unwrap();
        let wl = truncation_window(&loose).unwrap();
        assert!(wl.contains(51) || wl.contains(50));
    }

    #[test]
    fn window_cap_errors() {
        let capped = p(0.5, 10.0).with_n_max(Some(40));
        assert!(matches!(
            truncation_window(&capped),
            Err(Error::Truncation { .. })
        ));
        let ok = p(0.5, 10.0).with_n_max(Some(400));
        assert!(truncation_window(&ok).unwrap().n_max <= 400);
    }

    #[test]
    fn window_tail_by_brute_force() {
        let qa = 5.0;
        let w = truncation_window(&p(0.1, qa)).unwrap();
        let inside: f64 = w.iter().map(|n| coherent_unchecked(n, qa).powi(2)).sum();
        let outside: f64 = (1..400u64)
            .filter(|&n| !w.contains(n))
            .map(|n| coherent_unchecked(n, qa).powi(2))
            .sum();
        assert!(outside < 1e-12);
        assert!((inside + outside - 1.0).abs() < 1e-14);
    }

    #[test]
    fn poisson_tends_to_gaussian() {
        let qa = 5.0;
        let n0 = 12.5f64;
        let poisson: Vec<f64> = (0..60).map(|k| occupation(k, qa)).collect();
        let gauss: Vec<f64> = (0..60)
            .map(|k| {
                let d = k as f64 - n0;
                (-d * d / (2.0 * n0)).exp() / (2.0 * PI * n0).sqrt()
            })
            .collect();
        let argmax = |v: &[f64]| {
            (0..v.len())
                .max_by(|&a, &b| v[a].total_cmp(&v[b]))
                .unwrap() as i64
        };
        assert!((argmax(&poisson) - argmax(&gauss)).abs() <= 1);
        let g_total: f64 = gauss.iter().sum();
        let tv: f64 = poisson
            .iter()
            .zip(&gauss)
            .map(|(a, b)| (a - b / g_total).abs())
            .sum::<f64>()
            * 0.5;
        assert!(tv < 0.1, "tv={tv}");
        let pmax = poisson.iter().cloned().fold(0.0, f64::max);
        let maxdev = poisson
            .iter()
            .zip(&gauss)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(maxdev <= 0.15 * pmax);
    }

    #[test]
    fn positive_only_with_zero_beta() {
        let q = ModelParams::new(0.1, 5.0, 1.0, 0.0).unwrap();
        let set = build_mode_set(PacketKind::PositiveOnly, &q).unwrap();
        assert!(set
            .entries()
            .iter()
            .all(|e| e.index.lambda_k() == Sign::Plus && e.index.band() == Sign::Plus));
        assert!((set.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mode_sets_normalized_and_sorted() {
        for kind in [
            PacketKind::PositiveOnly,
            PacketKind::TwoBand,
            PacketKind::CatPlus,
            PacketKind::CatMinus,
        ] {
            for q in [p(0.1, 5.0), p(0.5, 10.0)] {
                let set = build_mode_set(kind, &q).unwrap();
                assert!((set.norm_sqr() - 1.0).abs() < 1e-12, "{kind}");
                assert!(set.entries().windows(2).all(|w| w[0].index < w[1].index));
            }
        }
    }

    #[test]
    fn two_band_positive_mass() {
        let q = p(0.5, 10.0);
        let set = build_mode_set(PacketKind::TwoBand, &q).unwrap();
        let mass = set.band_mass(Sign::Plus);
        // Σ |c_n|² d_n² by direct summation
        let direct: f64 = (1..400u64)
            .map(|n| {
                let (d, _) = mixing_from_level(n as f64, 0.5);
                coherent_unchecked(n, 10.0).powi(2) * d * d
            })
            .sum();
        assert!((mass - direct).abs() < 1e-12);
        assert!((mass - 0.598).abs() < 2e-3, "{mass}");
        let (d0, _) = mixing_from_level(50.0, 0.5);
        assert!((d0 * d0 - 0.5981).abs() < 1e-4);
    }

    #[test]
    fn cat_plus_is_nearly_single_band() {
        let q = p(0.5, 10.0);
        let set = build_mode_set(PacketKind::CatPlus, &q).unwrap();
        for n in 45..=55u32 {
            let minus = set
                .amplitude(ModeIndex::new(n, Sign::Minus, Sign::Plus).unwrap())
                .norm();
            let plus = set
                .amplitude(ModeIndex::new(n, Sign::Plus, Sign::Plus).unwrap())
                .norm();
            // grows linearly with |n - n0|, vanishing at the centre
            assert!(minus < 0.05 * plus, "n={n} minus={minus} plus={plus}");
        }
        let other = build_mode_set(PacketKind::CatMinus, &q).unwrap();
        assert!(other.band_mass(Sign::Minus) > 0.99);
        assert!(set.band_mass(Sign::Plus) > 0.99);
    }

    #[test]
    fn unknown_kind() {
        assert!("three_band".parse::<PacketKind>().is_err());
        assert_eq!("cat_minus".parse::<PacketKind>().unwrap(), PacketKind::CatMinus);
    }
}
