use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use super::scenario::{MapPacket, Scenario, ScenarioKind};
use super::validate::{validation_report, write_report};
use crate::basis::{build_mode_set, truncation_window, PacketKind};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fields::{
    cat_decomposition, cat_overlap_closed_form, ClassicalPacket, FractionalRevival, JcPacket,
    PositivePacket,
};
use crate::grid::{PolarGrid, PolarPoint, SpinorSample};
use crate::observables::{
    mean_spin_transverse, mean_spin_z_jc, mean_velocity_envelope, mean_velocity_jc,
    mean_velocity_nonrel, mean_velocity_positive, spin_density_classical, spin_z_envelope_jc,
    spin_z_plateau_jc, SpinDensityMap, TimeSeries,
};
use crate::oracle::{ModeSum, SpectrumMode};
use crate::spectrum::{derived_scales, DerivedScales};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub exec: Execution,
    /// Adds a `#! timestamp` line to every header.
    pub timestamp: bool,
}

/// One output file: provenance header followed by the CSV payload.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub header: String,
    pub payload: String,
    /// `false` when the scenario ran to completion but reported failures
    /// (only `validate` does this).
    pub passed: bool,
}

impl Artifact {
    pub fn text(&self) -> String {
        format!("{}{}", self.header, self.payload)
    }
}

fn header(s: &Scenario, extra: &[(String, String)], opts: RunOptions) -> String {
    let mut out = String::new();
    for line in s.provenance_lines() {
        out.push_str(&line);
        out.push('\n');
    }
    let _ = writeln!(out, "#! code_version = {CODE_VERSION}");
    if let Ok(w) = truncation_window(&s.params) {
        let _ = writeln!(out, "#! truncation_window = {}..={}", w.n_min, w.n_max);
    }
    if !s.defaulted.is_empty() {
        let _ = writeln!(out, "#! defaulted = {}", s.defaulted.join(", "));
    }
    for (k, v) in extra {
        let _ = writeln!(out, "#! {k} = {v}");
    }
    if opts.timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let _ = writeln!(out, "#! timestamp = {secs}");
    }
    out
}

fn series_payload(ts: &TimeSeries) -> Result<String> {
    let mut buf = Vec::new();
    ts.write_csv(&mut buf)
        .map_err(|e| Error::Numeric(format!("csv formatting failed: {e}")))?;
    Ok(String::from_utf8(buf).expect("csv is ascii"))
}

/// Map CSV: `rho,theta,x_over_a,y_over_a,<columns>`, theta-major.
fn map_payload(grid: PolarGrid, s: &Scenario, names: &[&str], columns: &[Vec<f64>]) -> String {
    let mut out = String::from("rho,theta,x_over_a,y_over_a");
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for (k, pt) in grid.points().enumerate() {
        let _ = write!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            pt.rho,
            pt.theta,
            pt.x(),
            pt.y(&s.params)
        );
        for c in columns {
            let _ = write!(out, ",{:.16e}", c[k]);
        }
        out.push('\n');
    }
    out
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric(format!("non-finite values in {what}")))
    }
}

fn density_column<F>(grid: PolarGrid, exec: Execution, f: F) -> Vec<f64>
where
    F: Fn(PolarPoint) -> SpinorSample + Sync + Send,
{
    grid.sample(exec, |pt| f(pt).density())
}

pub fn run_scenario(s: &Scenario, opts: RunOptions) -> Result<Artifact> {
    let exec = opts.exec;
    let p = &s.params;
    let mut extra: Vec<(String, String)> = Vec::new();
    let mut passed = true;
    let times = || s.time.expect("time-series scenario").times();
    let payload = match s.kind {
        ScenarioKind::Timescales => {
            let d = derived_scales(p)?;
            let cols = [
                ("n0", d.n0.real),
                ("n0_integer", d.n0.integer as f64),
                ("phi0", d.phi0),
                ("dphi", d.dphi),
                ("ddphi", d.ddphi),
                ("T_cl", d.t_cl),
                ("T_D", d.t_d),
                ("T_R", d.t_r),
                ("T_cl_seconds", DerivedScales::to_seconds(d.t_cl)),
                ("T_D_seconds", DerivedScales::to_seconds(d.t_d)),
                ("T_R_seconds", DerivedScales::to_seconds(d.t_r)),
                ("omega_c", d.omega_c),
                ("omega_zb", d.omega_zb),
                ("omega_zb_per_second", DerivedScales::to_per_second(d.omega_zb)),
                ("B_tesla", d.b_tesla),
            ];
            let names: Vec<&str> = cols.iter().map(|c| c.0).collect();
            let values: Vec<String> = cols.iter().map(|c| format!("{:.16e}", c.1)).collect();
            format!("{}\n{}\n", names.join(","), values.join(","))
        }
        ScenarioKind::Velocity => {
            let mut ts = TimeSeries::new(times())?;
            let rows = exec.map_slice(ts.times(), |&t| -> Result<[f64; 6]> {
                let (vx, vy) = mean_velocity_positive(t, p)?;
                let (nx, ny) = mean_velocity_nonrel(t, p);
                let (ex, ey) = mean_velocity_envelope(t, p)?;
                Ok([vx, vy, nx, ny, ex, ey])
            });
            push_rows(
                &mut ts,
                ["vx", "vy", "vx_nonrel", "vy_nonrel", "vx_envelope", "vy_envelope"],
                rows,
            )?;
            series_payload(&ts)?
        }
        ScenarioKind::SpinTrace => {
            let mut ts = TimeSeries::new(times())?;
            let rows = exec.map_slice(ts.times(), |&t| -> Result<[f64; 2]> {
                let (sx, sy) = mean_spin_transverse(t, p)?;
                Ok([sx, sy])
            });
            push_rows(&mut ts, ["sx", "sy"], rows)?;
            series_payload(&ts)?
        }
        ScenarioKind::JcVelocity => {
            let mut ts = TimeSeries::new(times())?;
            let rows = exec.map_slice(ts.times(), |&t| -> Result<[f64; 6]> {
                let v = mean_velocity_jc(t, p)?;
                Ok([v.vx, v.vy, v.cyclotron.0, v.zb.0, v.cyclotron.1, v.zb.1])
            });
            push_rows(
                &mut ts,
                ["vx", "vy", "vx_cyclotron", "vx_zb", "vy_cyclotron", "vy_zb"],
                rows,
            )?;
            series_payload(&ts)?
        }
        ScenarioKind::JcSpin => {
            extra.push(("sz_plateau".into(), format!("{:.16e}", spin_z_plateau_jc(p)?)));
            let mut ts = TimeSeries::new(times())?;
            let rows = exec.map_slice(ts.times(), |&t| -> Result<[f64; 2]> {
                Ok([mean_spin_z_jc(t, p)?, spin_z_envelope_jc(t, p)?])
            });
            push_rows(&mut ts, ["sz", "sz_envelope"], rows)?;
            series_payload(&ts)?
        }
        ScenarioKind::Cat => {
            extra.push((
                "quarter_period_overlap".into(),
                format!("{:.16e}", cat_overlap_closed_form(p)?),
            ));
            let mut ts = TimeSeries::new(times())?;
            let rows = exec.map_slice(ts.times(), |&t| -> Result<[f64; 1]> {
                Ok([cat_decomposition(t, p)?.overlap])
            });
            push_rows(&mut ts, ["overlap"], rows)?;
            series_payload(&ts)?
        }
        ScenarioKind::DensityMap => {
            let grid = s.grid.expect("map scenario");
            let tau = s.tau.expect("map scenario");
            let spectrum = s.spectrum.unwrap_or_default();
            let column = match (s.packet.expect("density map"), spectrum) {
                (MapPacket::PositiveOnly, SpectrumMode::Exact) => {
                    let f = PositivePacket::new(p)?;
                    density_column(grid, exec, |pt| f.field(pt, tau))
                }
                (MapPacket::TwoBand, SpectrumMode::Exact) => {
                    let f = JcPacket::new(p)?;
                    density_column(grid, exec, |pt| f.field(pt, tau))
                }
                (MapPacket::Classical, _) => {
                    let f = ClassicalPacket::new(p)?;
                    grid.sample(exec, |pt| f.density(pt, tau))
                }
                (packet, SpectrumMode::Taylor2) => {
                    let kind = if packet == MapPacket::PositiveOnly {
                        PacketKind::PositiveOnly
                    } else {
                        PacketKind::TwoBand
                    };
                    let sum = ModeSum::new(&build_mode_set(kind, p)?, SpectrumMode::Taylor2, p)?;
                    density_column(grid, exec, |pt| sum.field(pt, tau))
                }
            };
            check_finite(&column, "density map")?;
            map_payload(grid, s, &["density"], &[column])
        }
        ScenarioKind::SpinMap => {
            let grid = s.grid.expect("map scenario");
            let tau = s.tau.expect("map scenario");
            let map = SpinDensityMap::new(p)?;
            let quantum = grid.sample(exec, |pt| map.eval(pt, tau));
            let classical = grid
                .sample(exec, |pt| spin_density_classical(pt, tau, p))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let cols = vec![
                quantum.iter().map(|s| s.sx).collect::<Vec<_>>(),
                quantum.iter().map(|s| s.sy).collect(),
                classical.iter().map(|s| s.sx).collect(),
                classical.iter().map(|s| s.sy).collect(),
            ];
            for c in &cols {
                check_finite(c, "spin map")?;
            }
            map_payload(
                grid,
                s,
                &["sigma_x", "sigma_y", "sigma_x_classical", "sigma_y_classical"],
                &cols,
            )
        }
        ScenarioKind::Fractional => {
            let grid = s.grid.expect("map scenario");
            let tau = s.tau.expect("map scenario");
            let (m, n) = s.fractional.expect("fractional scenario");
            let frac = FractionalRevival::new(p, m, n)?;
            let angles: Vec<String> = frac
                .sub_packet_angles(tau)
                .iter()
                .map(|a| format!("{a:.6}"))
                .collect();
            extra.push(("sub_packet_angles".into(), angles.join(" ")));
            let exact = PositivePacket::new(p)?;
            let cols = vec![
                density_column(grid, exec, |pt| frac.field(pt, tau)),
                density_column(grid, exec, |pt| exact.field(pt, tau)),
            ];
            for c in &cols {
                check_finite(c, "fractional map")?;
            }
            map_payload(grid, s, &["density_fractional", "density_exact"], &cols)
        }
        ScenarioKind::Validate => {
            let rows = validation_report(s.quick, exec)?;
            passed = rows.iter().all(|r| r.pass);
            write_report(&rows)
        }
    };
    Ok(Artifact {
        file_name: s.output.clone(),
        header: header(s, &extra, opts),
        payload,
        passed,
    })
}

fn push_rows<const N: usize>(
    ts: &mut TimeSeries,
    names: [&str; N],
    rows: Vec<Result<[f64; N]>>,
) -> Result<()> {
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    for (c, name) in names.iter().enumerate() {
        let values: Vec<f64> = rows.iter().map(|r| r[c]).collect();
        check_finite(&values, name)?;
        ts.push(*name, values)?;
    }
    Ok(())
}

/// Runs every scenario in order and writes its artifact into `out_dir`.
/// Returns the written paths and whether all scenarios passed.
pub fn run_all(scenarios: &[Scenario], out_dir: &Path, opts: RunOptions) -> Result<(Vec<PathBuf>, bool)> {
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let mut ok = true;
    for s in scenarios {
        let art = run_scenario(s, opts)?;
        let path = out_dir.join(&art.file_name);
        fs::write(&path, art.text()).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        ok &= art.passed;
        written.push(path);
    }
    Ok((written, ok))
}
