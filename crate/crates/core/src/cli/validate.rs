//! Closed-form vs reference-route comparison table.

use std::fmt::Write as _;

use crate::basis::{build_mode_set, q_kernel, PacketKind};
use crate::error::Result;
use crate::exec::Execution;
use crate::fields::{cat_decomposition, cat_overlap_closed_form, JcPacket, PositivePacket};
use crate::grid::{PolarGrid, SpinorSample};
use crate::observables::{mean_spin_transverse, mean_spin_z_jc, mean_velocity_jc, mean_velocity_positive};
use crate::oracle::{b1_quadrature, quadrature_expectation, ModeSum, OperatorKind, OracleField, SpectrumMode};
use crate::spectrum::{derived_scales, ModelParams};

pub const FIELD_TOL: f64 = 1e-8;
pub const OBSERVABLE_TOL: f64 = 1e-6;
pub const NORM_TOL: f64 = 1e-6;
pub const SZ_DRIFT_TOL: f64 = 1e-8;
pub const KERNEL_TOL: f64 = 1e-8;
pub const CAT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub check: &'static str,
    pub metric: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRow {
    fn at_most(check: &'static str, metric: &'static str, value: f64, threshold: f64) -> Self {
        CheckRow {
            check,
            metric,
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

/// `count` times in `[0, span]` from the golden-ratio sequence, sorted.
pub fn probe_times(count: usize, span: f64) -> Vec<f64> {
    let golden = 0.618_033_988_749_894_9;
    let mut t: Vec<f64> = (1..=count)
        .map(|j| (j as f64 * golden).fract() * span)
        .collect();
    t.sort_by(f64::total_cmp);
    t
}

fn max_field_deviation<F>(grid: PolarGrid, times: &[f64], exec: Execution, closed: F, oracle: &ModeSum) -> f64
where
    F: Fn(crate::grid::PolarPoint, f64) -> SpinorSample + Sync + Send,
{
    times
        .iter()
        .map(|&tau| {
            grid.sample(exec, |pt| closed(pt, tau).max_abs_diff(&oracle.field(pt, tau)))
                .into_iter()
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

pub fn validation_report(quick: bool, exec: Execution) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let set1 = ModelParams::weakly_relativistic();
    let set2 = ModelParams::strongly_relativistic();
    let s1 = derived_scales(&set1)?;
    let s2 = derived_scales(&set2)?;
    let n_obs = if quick { 3 } else { 10 };

    // kernel integral vs closed kernel
    let mut worst: f64 = 0.0;
    for k in 0..=5 {
        // off the centre, where Q_k vanishes for k >= 1 and relative error is undefined
        for dx in [-1.2, 0.4, 1.7] {
            for dy in [-1.1, 0.3, 1.6] {
                let (x, y) = (dx, set1.qa + dy);
                let a = b1_quadrature(k, x, y, &set1);
                let b = q_kernel(k, x, y, &set1);
                worst = worst.max((a - b).norm() / b.norm());
            }
        }
    }
    rows.push(CheckRow::at_most("kernel_b1_vs_b3", "max_rel", worst, KERNEL_TOL));

    // closed-form fields vs mode sums
    let pos = PositivePacket::new(&set1)?;
    let pos_sum = ModeSum::new(&build_mode_set(PacketKind::PositiveOnly, &set1)?, SpectrumMode::Exact, &set1)?;
    let coarse1 = PolarGrid::new(set1.qa + 6.0, 50, 64);
    let field_times1: Vec<f64> = if quick {
        vec![0.0, 0.5 * s1.t_r]
    } else {
        (0..5).map(|j| j as f64 * 0.25 * s1.t_r).collect()
    };
    let dev = max_field_deviation(coarse1, &field_times1, exec, |pt, t| pos.field(pt, t), &pos_sum);
    rows.push(CheckRow::at_most("field_positive_vs_oracle", "max_abs", dev, FIELD_TOL));

    let jc = JcPacket::new(&set2)?;
    let jc_sum = ModeSum::new(&build_mode_set(PacketKind::TwoBand, &set2)?, SpectrumMode::Exact, &set2)?;
    let coarse2 = PolarGrid::new(set2.qa + 6.0, 50, 64);
    let field_times2: Vec<f64> = if quick {
        vec![0.0, s2.t_cl]
    } else {
        (0..5).map(|j| j as f64 * 0.5 * s2.t_cl).collect()
    };
    let dev = max_field_deviation(coarse2, &field_times2, exec, |pt, t| jc.field(pt, t), &jc_sum);
    rows.push(CheckRow::at_most("field_two_band_vs_oracle", "max_abs", dev, FIELD_TOL));

    // series observables vs quadrature of the mode sums
    let grid1 = PolarGrid::default_for(&set1);
    let grid2 = PolarGrid::default_for(&set2);
    let mut v_dev: f64 = 0.0;
    let mut s_dev: f64 = 0.0;
    let mut norms1 = Vec::new();
    for &tau in &probe_times(n_obs, s1.t_r) {
        let f = OracleField::from_mode_sum(grid1, tau, &pos_sum, exec);
        let (vx, vy) = mean_velocity_positive(tau, &set1)?;
        let (sx, sy) = mean_spin_transverse(tau, &set1)?;
        v_dev = v_dev
            .max((vx - quadrature_expectation(OperatorKind::VelocityX, &f)?).abs())
            .max((vy - quadrature_expectation(OperatorKind::VelocityY, &f)?).abs());
        s_dev = s_dev
            .max((sx - quadrature_expectation(OperatorKind::SigmaX, &f)?).abs())
            .max((sy - quadrature_expectation(OperatorKind::SigmaY, &f)?).abs());
        norms1.push(quadrature_expectation(OperatorKind::Norm, &f)?);
    }
    rows.push(CheckRow::at_most("velocity_positive_vs_quadrature", "max_abs", v_dev, OBSERVABLE_TOL));
    rows.push(CheckRow::at_most("spin_transverse_vs_quadrature", "max_abs", s_dev, OBSERVABLE_TOL));

    let mut v_dev: f64 = 0.0;
    let mut z_dev: f64 = 0.0;
    let mut norms2 = Vec::new();
    for &tau in &probe_times(n_obs, 2.0 * s2.t_cl) {
        let f = OracleField::from_mode_sum(grid2, tau, &jc_sum, exec);
        let v = mean_velocity_jc(tau, &set2)?;
        v_dev = v_dev
            .max((v.vx - quadrature_expectation(OperatorKind::VelocityX, &f)?).abs())
            .max((v.vy - quadrature_expectation(OperatorKind::VelocityY, &f)?).abs());
        let sz = mean_spin_z_jc(tau, &set2)?;
        z_dev = z_dev.max((sz - quadrature_expectation(OperatorKind::SigmaZ, &f)?).abs());
        norms2.push(quadrature_expectation(OperatorKind::Norm, &f)?);
    }
    rows.push(CheckRow::at_most("velocity_two_band_vs_quadrature", "max_abs", v_dev, OBSERVABLE_TOL));
    rows.push(CheckRow::at_most("spin_z_two_band_vs_quadrature", "max_abs", z_dev, OBSERVABLE_TOL));

    let norm_dev = norms1
        .iter()
        .chain(&norms2)
        .map(|n| (n - 1.0).abs())
        .fold(0.0, f64::max);
    rows.push(CheckRow::at_most("grid_norm", "max_abs_dev", norm_dev, NORM_TOL));

    // conserved S_z of the positive-energy packet
    let sz_times = [0.0, s1.t_d, 0.25 * s1.t_r, 0.5 * s1.t_r];
    let sz_drift = crate::observables::sz_conservation_check(&sz_times, grid1, &set1, exec, |pt, t| pos.field(pt, t))?;
    rows.push(CheckRow::at_most("spin_z_positive_drift", "max_abs", sz_drift, SZ_DRIFT_TOL));

    // cat overlap: spinor inner product vs closed form
    let quarter = 0.25 * s2.t_cl;
    let numeric = cat_decomposition(quarter, &set2)?.overlap;
    let closed = cat_overlap_closed_form(&set2)?;
    rows.push(CheckRow::at_most("cat_overlap", "abs_dev", (numeric - closed).abs(), CAT_TOL));

    Ok(rows)
}

/// `check,metric,value,threshold,pass` CSV.
pub fn write_report(rows: &[CheckRow]) -> String {
    let mut out = String::from("check,metric,value,threshold,pass\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{}",
            r.check, r.metric, r.value, r.threshold, r.pass
        );
    }
    out
}
