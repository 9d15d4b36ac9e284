use std::f64::consts::PI;

use proptest::prelude::*;

use dirac_cyclotron::exec::Execution;
use dirac_cyclotron::fields::{JcPacket, PositivePacket};
use dirac_cyclotron::grid::{PolarGrid, PolarPoint};
use dirac_cyclotron::observables::{
    mean_spin_transverse, mean_spin_z_jc, mean_velocity_envelope, mean_velocity_jc,
    mean_velocity_positive, quadrupole_tensor, sz_conservation_check, SpinDensityMap,
    COLLAPSE_RATIO,
};
use dirac_cyclotron::oracle::OracleField;
use dirac_cyclotron::spectral::dominant_frequency;
use dirac_cyclotron::spectrum::{derived_scales, ModelParams};

fn speed_peak(t0: f64, t1: f64, q: &ModelParams) -> f64 {
    (0..400)
        .map(|j| {
            let t = t0 + (t1 - t0) * j as f64 / 399.0;
            let (vx, vy) = mean_velocity_positive(t, q).unwrap();
            vx.hypot(vy)
        })
        .fold(0.0, f64::max)
}

#[test]
fn velocity_collapses_between_revivals() {
    let q = ModelParams::weakly_relativistic();
    let s = derived_scales(&q).unwrap();
    let first = speed_peak(0.0, s.t_cl, &q);
    let late = (0..200)
        .map(|k| {
            let t0 = 2.0 * s.t_d + k as f64 * (0.4 * s.t_r - 2.0 * s.t_d) / 200.0;
            speed_peak(t0, t0 + (0.4 * s.t_r - 2.0 * s.t_d) / 200.0, &q)
        })
        .fold(0.0, f64::max);
    assert!(late < COLLAPSE_RATIO * first, "late {late} vs first {first}");
}

/// Largest speed of each orbit over `[0, cycles·T_cl]`.
fn cycle_maxima(q: &ModelParams, cycles: usize, v: impl Fn(f64) -> (f64, f64)) -> Vec<f64> {
    let t_cl = derived_scales(q).unwrap().t_cl;
    (0..cycles)
        .map(|c| {
            (0..200)
                .map(|j| {
                    let (vx, vy) = v((c as f64 + j as f64 / 200.0) * t_cl);
                    vx.hypot(vy)
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

#[test]
fn envelope_approximation_follows_the_series() {
    let q = ModelParams::weakly_relativistic();
    let s = derived_scales(&q).unwrap();
    // the approximation drops the 1/φ₀ prefactor and the cubic part of the
    // spectrum, so it holds for rescaled maxima while the damping is Gaussian
    let phi0 = (1.0 + 2.0 * q.mean_level() * q.eps2()).sqrt();
    let cycles = (1.5 * s.t_d / s.t_cl).floor() as usize;
    let exact = cycle_maxima(&q, cycles, |t| mean_velocity_positive(t, &q).unwrap());
    let approx = cycle_maxima(&q, cycles, |t| mean_velocity_envelope(t, &q).unwrap());
    let worst = exact
        .iter()
        .zip(&approx)
        .map(|(e, a)| (a - phi0 * e).abs() / (phi0 * e))
        .fold(0.0, f64::max);
    assert!(worst <= 0.1, "worst relative deviation {worst}");
    assert!((approx[0] - q.qa * q.lambda_over_a).abs() < 1e-12);
}

#[test]
fn velocity_oscillates_at_the_cyclotron_frequency() {
    let q = ModelParams::weakly_relativistic();
    let s = derived_scales(&q).unwrap();
    let n = 2048;
    let dt = 0.5 * s.t_d / n as f64;
    let vx: Vec<f64> = (0..n)
        .map(|k| mean_velocity_positive(k as f64 * dt, &q).unwrap().0)
        .collect();
    let peak = dominant_frequency(&vx, dt, 0.0).unwrap();
    let omega_c = 2.0 * PI / s.t_cl;
    assert!((peak.omega - omega_c).abs() <= peak.resolution, "{peak:?} vs {omega_c}");
}

#[test]
fn spin_density_integrates_to_the_mean_spin() {
    let q = ModelParams::weakly_relativistic();
    let map = SpinDensityMap::new(&q).unwrap();
    let g = PolarGrid::default_for(&q);
    for tau in [0.0, 333.0, 5000.0] {
        let vals = g.sample(Execution::default(), |pt| map.eval(pt, tau));
        let sx: Vec<f64> = vals.iter().map(|v| v.sx).collect();
        let sy: Vec<f64> = vals.iter().map(|v| v.sy).collect();
        let (mx, my) = mean_spin_transverse(tau, &q).unwrap();
        assert!((g.integrate(&sx) - mx).abs() < 1e-6, "sx at {tau}");
        assert!((g.integrate(&sy) - my).abs() < 1e-6, "sy at {tau}");
    }
}

#[test]
fn spin_density_shape_at_start() {
    let q = ModelParams::weakly_relativistic();
    let map = SpinDensityMap::new(&q).unwrap();
    let centre = map.eval(PolarPoint::new(q.qa, PI), 0.0).sx;
    for theta in [PI - 0.5, PI + 0.5, 0.0, 1.0] {
        assert!(map.eval(PolarPoint::new(q.qa, theta), 0.0).sx < centre);
    }
    let left = map.eval(PolarPoint::new(q.qa, PI - 0.3), 0.0).sy;
    let right = map.eval(PolarPoint::new(q.qa, PI + 0.3), 0.0).sy;
    assert!(left * right < 0.0, "sy {left} {right}");
}

#[test]
fn quadrupole_moments() {
    let q = ModelParams::weakly_relativistic();
    let s = derived_scales(&q).unwrap();
    let pos = PositivePacket::new(&q).unwrap();
    let g = PolarGrid::new(q.qa + 6.0, 60, 96);
    let at = |tau: f64| OracleField::sample(g, tau, &q, Execution::default(), |pt, t| pos.field(pt, t));

    let f0 = at(0.0);
    let d0 = quadrupole_tensor(&f0);
    assert!(d0.xy.abs() < 1e-10 * d0.xx.abs().max(1.0), "xy {}", d0.xy);
    let r2: Vec<f64> = f0
        .densities()
        .iter()
        .enumerate()
        .map(|(k, d)| d * g.point(k).rho.powi(2))
        .collect();
    assert!((d0.trace() - g.integrate(&r2)).abs() < 1e-9);

    let n = 64;
    let dt = 2.0 * s.t_cl / n as f64;
    let xx: Vec<f64> = (0..n).map(|k| quadrupole_tensor(&at(k as f64 * dt)).xx).collect();
    let peak = dominant_frequency(&xx, dt, 0.0).unwrap();
    let twice = 4.0 * PI / s.t_cl;
    assert!((peak.omega - twice).abs() <= peak.resolution, "{peak:?} vs {twice}");
}

#[test]
fn spin_z_is_not_conserved_for_the_two_band_packet() {
    let q = ModelParams::strongly_relativistic();
    let s = derived_scales(&q).unwrap();
    let jc = JcPacket::new(&q).unwrap();
    let g = PolarGrid::default_for(&q);
    let taus = [0.0, 0.125 * s.t_cl, 0.25 * s.t_cl];
    let drift = sz_conservation_check(&taus, g, &q, Execution::default(), |pt, t| jc.field(pt, t)).unwrap();
    assert!(drift >= 0.1, "drift {drift}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_stay_physical(tau in 0.0f64..3e4) {
        let q1 = ModelParams::weakly_relativistic();
        let q2 = ModelParams::strongly_relativistic();
        let (vx, vy) = mean_velocity_positive(tau, &q1).unwrap();
        prop_assert!(vx.hypot(vy) <= 1.0);
        let (sx, sy) = mean_spin_transverse(tau, &q1).unwrap();
        prop_assert!(sx.hypot(sy) <= 1.0 + 1e-12);
        let v = mean_velocity_jc(tau, &q2).unwrap();
        prop_assert!(v.vx.hypot(v.vy) <= 1.0);
        let sz = mean_spin_z_jc(tau, &q2).unwrap();
        prop_assert!(sz.abs() <= 1.0 + 1e-12);
    }
}
