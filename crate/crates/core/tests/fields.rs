use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dirac_cyclotron::basis::{build_mode_set, PacketKind};
use dirac_cyclotron::exec::Execution;
use dirac_cyclotron::fields::{ClassicalPacket, FractionalRevival, JcPacket, PositivePacket};
use dirac_cyclotron::grid::{angle_between, circular_peaks, PolarGrid, PolarPoint, SpinorSample};
use dirac_cyclotron::oracle::{fidelity, ModeSum, OracleField, SpectrumMode};
use dirac_cyclotron::spectrum::{derived_scales, ModelParams};
use dirac_cyclotron::Complex64;

const FIELD_TOL: f64 = 1e-8;

fn mode_sum(kind: PacketKind, q: &ModelParams) -> ModeSum {
    ModeSum::new(&build_mode_set(kind, q).unwrap(), SpectrumMode::Exact, q).unwrap()
}

fn field_on<F>(grid: PolarGrid, tau: f64, q: &ModelParams, f: F) -> OracleField
where
    F: Fn(PolarPoint, f64) -> SpinorSample + Sync + Send,
{
    OracleField::sample(grid, tau, q, Execution::default(), f)
}

fn peak_angles(field: &OracleField) -> Vec<f64> {
    let marginal = field.grid.angular_marginal(&field.densities());
    circular_peaks(&marginal, 0.1)
        .into_iter()
        .map(|j| field.grid.theta(j))
        .collect()
}

#[test]
fn closed_forms_match_mode_sums_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let q1 = ModelParams::weakly_relativistic();
    let q2 = ModelParams::strongly_relativistic();
    let pos = PositivePacket::new(&q1).unwrap();
    let pos_sum = mode_sum(PacketKind::PositiveOnly, &q1);
    let jc = JcPacket::new(&q2).unwrap();
    let jc_sum = mode_sum(PacketKind::TwoBand, &q2);
    for _ in 0..20 {
        let pt = PolarPoint::new(rng.gen_range(0.0..11.0), rng.gen_range(0.0..2.0 * PI));
        let tau = rng.gen_range(0.0..2e5);
        assert!(pos.field(pt, tau).max_abs_diff(&pos_sum.field(pt, tau)) < FIELD_TOL);
        let tau = rng.gen_range(0.0..300.0);
        assert!(jc.field(pt, tau).max_abs_diff(&jc_sum.field(pt, tau)) < FIELD_TOL);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn positive_field_agrees_with_modes(rho in 0.0f64..11.0, theta in 0.0f64..(2.0 * PI), tau in 0.0f64..2e5) {
        let q = ModelParams::weakly_relativistic();
        let pos = PositivePacket::new(&q).unwrap();
        let sum = mode_sum(PacketKind::PositiveOnly, &q);
        let pt = PolarPoint::new(rho, theta);
        prop_assert!(pos.field(pt, tau).max_abs_diff(&sum.field(pt, tau)) < FIELD_TOL);
    }

    #[test]
    fn classical_density_is_finite_and_nonnegative(rho in 0.0f64..15.0, theta in 0.0f64..(2.0 * PI), tau in -1e4f64..1e4) {
        let q = ModelParams::weakly_relativistic();
        let cl = ClassicalPacket::new(&q).unwrap();
        let d = cl.density(PolarPoint::new(rho, theta), tau);
        prop_assert!(d.is_finite() && d >= 0.0);
    }
}

#[test]
fn packets_stay_normalized() {
    let q1 = ModelParams::weakly_relativistic();
    let pos = PositivePacket::new(&q1).unwrap();
    let g = PolarGrid::default_for(&q1);
    for tau in [0.0, 1234.5, 4.4e4, 8.8e4] {
        let n = field_on(g, tau, &q1, |pt, t| pos.field(pt, t)).norm();
        assert!((n - 1.0).abs() < 1e-6, "norm {n} at {tau}");
    }
    let q2 = ModelParams::strongly_relativistic();
    let jc = JcPacket::new(&q2).unwrap();
    let g = PolarGrid::default_for(&q2);
    for tau in [0.0, 17.0, 64.0] {
        let n = field_on(g, tau, &q2, |pt, t| jc.field(pt, t)).norm();
        assert!((n - 1.0).abs() < 1e-6, "norm {n} at {tau}");
    }
}

#[test]
fn packet_starts_at_the_laboratory_origin() {
    let q = ModelParams::weakly_relativistic();
    let pos = PositivePacket::new(&q).unwrap();
    let g = PolarGrid::new(q.qa + 6.0, 111, 256);
    let f = field_on(g, 0.0, &q, |pt, t| pos.field(pt, t));
    let dens = f.densities();
    let best = (0..dens.len()).max_by(|&a, &b| dens[a].total_cmp(&dens[b])).unwrap();
    let pt = g.point(best);
    assert!(angle_between(pt.theta, PI) < 1e-12);
    assert!((pt.rho - q.qa).abs() <= g.d_rho());
}

#[test]
fn two_band_packet_splits_into_counter_rotating_lobes() {
    let q = ModelParams::strongly_relativistic();
    let s = derived_scales(&q).unwrap();
    let jc = JcPacket::new(&q).unwrap();
    let g = PolarGrid::new(q.qa + 6.0, 80, 360);
    let at = |tau: f64| peak_angles(&field_on(g, tau, &q, |pt, t| jc.field(pt, t)));
    let quarter = at(0.25 * s.t_cl);
    assert_eq!(quarter.len(), 2, "lobes {quarter:?}");
    // the lobes leave θ = π in opposite senses
    let early = at(0.05 * s.t_cl);
    let mut offsets: Vec<f64> = early.iter().map(|&a| (a - PI + PI).rem_euclid(2.0 * PI) - PI).collect();
    offsets.sort_by(f64::total_cmp);
    assert_eq!(offsets.len(), 2, "lobes {early:?}");
    assert!(offsets[0] < 0.0 && offsets[1] > 0.0, "offsets {offsets:?}");
}

#[test]
fn classical_packet_tracks_exact_packet_early_on() {
    let q = ModelParams::weakly_relativistic();
    let s = derived_scales(&q).unwrap();
    let pos = PositivePacket::new(&q).unwrap();
    let cl = ClassicalPacket::new(&q).unwrap();
    let g = PolarGrid::new(q.qa + 6.0, 80, 128);
    let fid = |tau: f64| {
        let a = field_on(g, tau, &q, |pt, t| cl.field(pt, t));
        let b = field_on(g, tau, &q, |pt, t| pos.field(pt, t));
        fidelity(&a, &b).unwrap()
    };
    for tau in [0.0, 0.1 * s.t_cl, 0.25 * s.t_cl] {
        let f = fid(tau);
        assert!(f > 0.99, "fidelity {f} at {tau}");
    }
    // dispersion erodes the match on the T_D scale
    assert!(fid(s.t_cl) < fid(0.25 * s.t_cl));
}

#[test]
fn half_revival_is_one_shifted_classical_packet() {
    let q = ModelParams::weakly_relativistic();
    let rev = FractionalRevival::new(&q, 1, 2).unwrap();
    let cl = rev.classical();
    let nonzero: Vec<&(f64, Complex64)> = rev.terms().iter().filter(|(_, p)| p.norm() > 1e-12).collect();
    assert_eq!(nonzero.len(), 1);
    assert!((nonzero[0].1.norm() - 1.0).abs() < 1e-12);
    for theta in [0.0, 1.0, PI, 4.0] {
        let pt = PolarPoint::new(q.qa, theta);
        let tau = 321.0;
        let lhs = rev.field(pt, tau).density();
        let rhs = cl.density(pt, tau - 0.5 * cl.period());
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs));
    }
}
