//! The two scripted experiments: a polarizer-angle sweep comparing recovered
//! Δ3 with theory, and per-pinhole phase shifts showing that the ridge
//! triangles translate without deforming.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::config::{FieldModel, RunConfig};
use crate::error::{Error, Result};
use crate::geometry::{Pair, PinholeGeometry, Vec2};
use crate::interferometer::{exact_intensity, paraxial_intensity, Interferogram, ObservationGrid, SourceConfig};
use crate::io::{encode_pgm, render_overlay, write_families_csv, write_triangles_csv, FieldMetadata};
use crate::raster::{quantize, NoiseSpec, RasterImage};
use crate::ridge::{analyze, RidgeAnalysis, RidgeLineFamily, RidgeTriangle};
use crate::scalar::circular_distance;
use crate::states::{delta3_theory, paper_states, JonesVector};

/// Sweep criteria apply where Δ3 stays this far from 0 and 2π.
pub const SWEEP_PHASE_MARGIN: f64 = 0.1;
pub const AREA_LAW_TOLERANCE: f64 = 0.01;
pub const NORMALIZED_CURVE_TOLERANCE: f64 = 0.01;
pub const ROUTE_AGREEMENT_TOLERANCE: f64 = 0.01;
pub const GAUGE_AREA_TOLERANCE: f64 = 0.005;
pub const GAUGE_PERPENDICULAR_TOLERANCE: f64 = 0.02;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub theta_deg: f64,
    pub delta3_analytic: f64,
    /// Mean elemental-triangle area of the `n = 0` and `n = 1` classes.
    pub area_n0: Option<f64>,
    pub area_n1: Option<f64>,
    /// `area_n0` over the largest `area_n0` of the sweep.
    pub area_n0_normalized: Option<f64>,
    pub delta3_area_route: Option<f64>,
    pub delta3_phase_route: f64,
    /// Circular distance between analytic and phase-route Δ3.
    pub abs_error: f64,
    /// The lattice was too close to Δ3 = 0 for the `n = 0` class.
    pub degenerate: bool,
    pub visibilities: [f64; 3],
}

/// One sweep point with the data needed for its figures.
#[derive(Clone, Debug)]
pub struct ThetaRun {
    pub record: SweepRecord,
    pub raster: RasterImage,
    pub wavenumber: f64,
    pub families: Vec<RidgeLineFamily<f64>>,
    pub triangles: Vec<RidgeTriangle<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeRecord {
    /// 1-based pinhole index; `None` for the unshifted baseline.
    pub shift_target: Option<usize>,
    pub shift_value: f64,
    pub triangle_vertices: [Vec2<f64>; 3],
    pub area: f64,
    /// Centroid displacement relative to the baseline triangle.
    pub displacement: Vec2<f64>,
    /// `|area − baseline| / baseline`.
    pub area_deviation: f64,
    /// Displacement across the ridges of the pair that excludes the shifted
    /// pinhole, as a fraction of that pair's fringe spacing.
    pub perpendicular_fraction: f64,
}

#[derive(Clone, Debug)]
pub struct GaugeRun {
    pub record: GaugeRecord,
    pub raster: RasterImage,
    pub wavenumber: f64,
    pub families: Vec<RidgeLineFamily<f64>>,
}

/// Everything `emit_report` writes.
#[derive(Clone, Debug, Default)]
pub struct ExperimentReport {
    pub sweep: Vec<ThetaRun>,
    pub gauge: Vec<GaugeRun>,
}

/// A single `PASS|FAIL <name> <measured> <bound>` summary line.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        self.measured < self.bound
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass() { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} {:.6e} {:.6e}", self.name, self.measured, self.bound)
    }
}

/// Geometry, source, float image and quantized frame of one simulation.
pub type Frame = (PinholeGeometry<f64>, SourceConfig<f64>, Interferogram<f64>, RasterImage);

/// Synthesizes one frame for `states`/`phases` and quantizes it.
pub fn simulate(
    cfg: &RunConfig,
    states: [JonesVector<f64>; 3],
    phases: [f64; 3],
    noise: Option<&NoiseSpec>,
) -> Result<Frame> {
    let geom = cfg.geometry()?;
    let grid = cfg.grid()?;
    let src = cfg.source(states, phases)?;
    let img = match cfg.model {
        FieldModel::Exact => exact_intensity(&geom, &src, &grid)?,
        FieldModel::Paraxial => paraxial_intensity(&geom, &src, &grid)?,
    };
    let raster = quantize(&img, cfg.bit_depth, noise)?;
    Ok((geom, src, img, raster))
}

fn analyze_raster(cfg: &RunConfig, geom: &PinholeGeometry<f64>, raster: &RasterImage) -> Result<RidgeAnalysis<f64>> {
    analyze(&raster.to_interferogram(), geom, cfg.wavenumber(), &cfg.analysis)
}

/// Runs the pipeline once per polarizer angle. Points are independent and run
/// in parallel; with noise, point `i` uses seed `noise.seed + i`.
pub fn run_theta_sweep(thetas_deg: &[f64], cfg: &RunConfig) -> Result<Vec<ThetaRun>> {
    let mut runs = thetas_deg
        .par_iter()
        .enumerate()
        .map(|(i, &theta_deg)| {
            let noise = cfg.noise.map(|n| NoiseSpec {
                seed: n.seed.wrapping_add(i as u64),
                ..n
            });
            let theta = theta_deg.to_radians();
            let (geom, src, _, raster) = simulate(cfg, paper_states(theta), cfg.phases, noise.as_ref())?;
            let analysis = analyze_raster(cfg, &geom, &raster)?;
            let delta3_analytic = delta3_theory(theta)?;
            let record = SweepRecord {
                theta_deg,
                delta3_analytic,
                area_n0: analysis.area_n0,
                area_n1: analysis.area_n1,
                area_n0_normalized: None,
                delta3_area_route: analysis.delta3_area,
                delta3_phase_route: analysis.delta3_phase,
                abs_error: circular_distance(delta3_analytic, analysis.delta3_phase),
                degenerate: analysis.triangles.near_degenerate,
                visibilities: analysis.fringes.map(|f| f.visibility),
            };
            Ok(ThetaRun {
                record,
                raster,
                wavenumber: src.wavenumber,
                families: analysis.families.to_vec(),
                triangles: analysis.triangles.triangles,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let max_area = runs
        .iter()
        .filter(|r| !r.record.degenerate)
        .filter_map(|r| r.record.area_n0)
        .fold(0.0_f64, f64::max);
    if max_area > 0.0 {
        for run in &mut runs {
            if !run.record.degenerate {
                run.record.area_n0_normalized = run.record.area_n0.map(|a| a / max_area);
            }
        }
    }
    Ok(runs)
}

fn nearest_n0(analysis: &RidgeAnalysis<f64>, target: Vec2<f64>) -> Option<RidgeTriangle<f64>> {
    analysis
        .triangles
        .class(0)
        .min_by(|a, b| {
            let da = (a.centroid() - target).norm();
            let db = (b.centroid() - target).norm();
            da.total_cmp(&db)
        })
        .cloned()
}

fn grid_center(grid: &ObservationGrid<f64>) -> Vec2<f64> {
    let (lo, hi) = grid.bounds();
    (lo + hi).scale(0.5)
}

/// Baseline run at `cfg.gauge_theta_deg` plus one run per `(pinhole, shift)`.
///
/// The tracked triangle is the `n = 0` triangle nearest the grid center in
/// the baseline and, in each shifted run, the one nearest the baseline
/// triangle.
pub fn run_gauge_shift(shifts: &[(usize, f64)], cfg: &RunConfig) -> Result<Vec<GaugeRun>> {
    let states = paper_states(cfg.gauge_theta_deg.to_radians());
    let mut cases: Vec<(Option<usize>, f64)> = vec![(None, 0.0)];
    for &(p, v) in shifts {
        if !(1..=3).contains(&p) {
            return Err(Error::InvalidSource(format!("gauge shift targets pinhole {p}; expected 1..3")));
        }
        cases.push((Some(p), v));
    }

    let runs = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(target, value))| {
            let mut phases = cfg.phases;
            if let Some(p) = target {
                phases[p - 1] += value;
            }
            let noise = cfg.noise.map(|n| NoiseSpec {
                seed: n.seed.wrapping_add(i as u64),
                ..n
            });
            let (geom, src, _, raster) = simulate(cfg, states, phases, noise.as_ref())?;
            let analysis = analyze_raster(cfg, &geom, &raster)?;
            Ok((geom, src.wavenumber, raster, analysis))
        })
        .collect::<Result<Vec<_>>>()?;

    let (geom, _, _, base_analysis) = &runs[0];
    let center = grid_center(&runs[0].2.grid);
    let base = nearest_n0(base_analysis, center).ok_or(Error::DegenerateLattice {
        delta3: base_analysis.triangles.delta3,
    })?;
    let base_centroid = base.centroid();

    let mut out = Vec::with_capacity(runs.len());
    for ((target, value), (_, wavenumber, raster, analysis)) in cases.iter().zip(runs.iter()) {
        let tri = nearest_n0(analysis, base_centroid).ok_or(Error::DegenerateLattice {
            delta3: analysis.triangles.delta3,
        })?;
        let displacement = tri.centroid() - base_centroid;
        let perpendicular_fraction = match target {
            Some(p) => {
                let (i, j) = [(2, 3), (3, 1), (1, 2)][p - 1];
                let k = geom.k_vector(Pair::new(i, j)?, *wavenumber, raster.grid.distance);
                let spacing = TAU / k.norm();
                (displacement.dot(k) / k.norm()).abs() / spacing
            }
            None => 0.0,
        };
        out.push(GaugeRun {
            record: GaugeRecord {
                shift_target: *target,
                shift_value: *value,
                triangle_vertices: tri.vertices,
                area: tri.area,
                displacement,
                area_deviation: (tri.area - base.area).abs() / base.area,
                perpendicular_fraction,
            },
            raster: raster.clone(),
            wavenumber: *wavenumber,
            families: analysis.families.to_vec(),
        });
    }
    Ok(out)
}

fn in_margin(delta3: f64) -> bool {
    (SWEEP_PHASE_MARGIN..=TAU - SWEEP_PHASE_MARGIN).contains(&delta3)
}

/// Sweep verdicts over points with Δ3 inside `[0.1, 2π − 0.1]`.
///
/// A point missing the data a criterion needs counts as an infinite error.
pub fn sweep_verdicts(records: &[SweepRecord]) -> Vec<Verdict> {
    let used: Vec<&SweepRecord> = records.iter().filter(|r| in_margin(r.delta3_analytic)).collect();
    let peak = records
        .iter()
        .filter(|r| r.area_n0_normalized == Some(1.0))
        .map(|r| r.delta3_analytic)
        .next();
    let mut area_law = 0.0_f64;
    let mut curve = 0.0_f64;
    let mut routes = 0.0_f64;
    let mut phase = 0.0_f64;
    for r in &used {
        area_law = area_law.max(match r.delta3_area_route {
            Some(d) if r.area_n0.is_some() => (d * d / (r.delta3_analytic * r.delta3_analytic) - 1.0).abs(),
            _ => f64::INFINITY,
        });
        curve = curve.max(match (r.area_n0_normalized, peak) {
            (Some(a), Some(p)) => (a - (r.delta3_analytic / p).powi(2)).abs(),
            _ => f64::INFINITY,
        });
        routes = routes.max(match r.delta3_area_route {
            Some(d) => circular_distance(d, r.delta3_phase_route) / TAU,
            None => f64::INFINITY,
        });
        phase = phase.max(r.abs_error / TAU);
    }
    vec![
        Verdict {
            name: "area_law_relative_error",
            measured: area_law,
            bound: AREA_LAW_TOLERANCE,
        },
        Verdict {
            name: "normalized_curve_residual",
            measured: curve,
            bound: NORMALIZED_CURVE_TOLERANCE,
        },
        Verdict {
            name: "route_agreement_fraction_of_2pi",
            measured: routes,
            bound: ROUTE_AGREEMENT_TOLERANCE,
        },
        Verdict {
            name: "phase_route_error_fraction_of_2pi",
            measured: phase,
            bound: ROUTE_AGREEMENT_TOLERANCE,
        },
    ]
}

pub fn gauge_verdicts(records: &[GaugeRecord]) -> Vec<Verdict> {
    let area = records.iter().map(|r| r.area_deviation).fold(0.0, f64::max);
    let perp = records.iter().map(|r| r.perpendicular_fraction).fold(0.0, f64::max);
    vec![
        Verdict {
            name: "gauge_area_deviation",
            measured: area,
            bound: GAUGE_AREA_TOLERANCE,
        },
        Verdict {
            name: "gauge_perpendicular_displacement",
            measured: perp,
            bound: GAUGE_PERPENDICULAR_TOLERANCE,
        },
    ]
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from(
        "theta_deg,delta3_analytic,area_n0,area_n1,area_n0_normalized,delta3_area_route,delta3_phase_route,abs_error,degenerate,visibility_12,visibility_23,visibility_31\n",
    );
    for r in records {
        let _ = writeln!(
            s,
            "{},{:e},{},{},{},{},{:e},{:e},{},{:e},{:e},{:e}",
            r.theta_deg,
            r.delta3_analytic,
            opt(r.area_n0),
            opt(r.area_n1),
            opt(r.area_n0_normalized),
            opt(r.delta3_area_route),
            r.delta3_phase_route,
            r.abs_error,
            r.degenerate,
            r.visibilities[0],
            r.visibilities[1],
            r.visibilities[2],
        );
    }
    s
}

pub fn gauge_csv(records: &[GaugeRecord]) -> String {
    let mut s = String::from(
        "shift_target,shift_value,x1,y1,x2,y2,x3,y3,area,displacement_x,displacement_y,area_deviation,perpendicular_fraction\n",
    );
    for r in records {
        let [a, b, c] = r.triangle_vertices;
        let target = r.shift_target.map(|p| p.to_string()).unwrap_or_else(|| "none".into());
        let _ = writeln!(
            s,
            "{target},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.shift_value, a.x, a.y, b.x, b.y, c.x, c.y, r.area, r.displacement.x, r.displacement.y, r.area_deviation, r.perpendicular_fraction,
        );
    }
    s
}

/// File stem for a sweep point, e.g. `theta_090.000`.
pub fn theta_stem(theta_deg: f64) -> String {
    format!("theta_{theta_deg:07.3}")
}

/// File stem for a gauge case, e.g. `gauge_00_base` or `gauge_01_p1_0.500`.
pub fn gauge_stem(index: usize, record: &GaugeRecord) -> String {
    match record.shift_target {
        Some(p) => format!("gauge_{index:02}_p{p}_{:.3}", record.shift_value),
        None => format!("gauge_{index:02}_base"),
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_frames(out_dir: &Path, stem: &str, raster: &RasterImage, wavenumber: f64, families: &[RidgeLineFamily<f64>]) -> Result<()> {
    let meta = FieldMetadata::new(&raster.grid, wavenumber);
    write(&out_dir.join(format!("{stem}_interferogram.pgm")), &encode_pgm(raster, &meta))?;
    let overlay = render_overlay(raster, families);
    write(&out_dir.join(format!("{stem}_ridges.pgm")), &encode_pgm(&overlay, &meta))?;
    write_families_csv(&out_dir.join(format!("{stem}_families.csv")), families)
}

/// Writes tables, frames, overlays and `summary.txt` into `out_dir`.
///
/// Returns the verdicts. An empty report still writes a summary noting zero
/// runs, then fails with [`Error::EmptyRun`].
pub fn emit_report(report: &ExperimentReport, out_dir: &Path) -> Result<Vec<Verdict>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut verdicts = Vec::new();
    let mut summary = String::new();
    let runs = report.sweep.len() + report.gauge.len();

    if !report.sweep.is_empty() {
        let records: Vec<SweepRecord> = report.sweep.iter().map(|r| r.record.clone()).collect();
        write(&out_dir.join("sweep.csv"), sweep_csv(&records).as_bytes())?;
        for run in &report.sweep {
            let stem = theta_stem(run.record.theta_deg);
            write_frames(out_dir, &stem, &run.raster, run.wavenumber, &run.families)?;
            write_triangles_csv(&out_dir.join(format!("{stem}_triangles.csv")), &run.triangles)?;
        }
        verdicts.extend(sweep_verdicts(&records));
    }
    if !report.gauge.is_empty() {
        let records: Vec<GaugeRecord> = report.gauge.iter().map(|r| r.record.clone()).collect();
        write(&out_dir.join("gauge.csv"), gauge_csv(&records).as_bytes())?;
        for (i, run) in report.gauge.iter().enumerate() {
            write_frames(out_dir, &gauge_stem(i, &run.record), &run.raster, run.wavenumber, &run.families)?;
        }
        verdicts.extend(gauge_verdicts(&records));
    }

    let _ = writeln!(summary, "# runs {runs}");
    for v in &verdicts {
        let _ = writeln!(summary, "{v}");
    }
    write(&out_dir.join("summary.txt"), summary.as_bytes())?;
    if runs == 0 {
        return Err(Error::EmptyRun(out_dir.display().to_string()));
    }
    Ok(verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> RunConfig {
        RunConfig {
            nx: 320,
            ny: 240,
            dx: 18e-6,
            dy: 16e-6,
            ..RunConfig::default()
        }
    }

    #[test]
    fn sweep_records_follow_theory() {
        let cfg = small_config();
        let runs = run_theta_sweep(&[0.0, 50.0, 90.0, 130.0, 175.0], &cfg).unwrap();
        assert!(runs[0].record.degenerate);
        for run in &runs[1..] {
            let r = &run.record;
            assert!(!r.degenerate);
            assert!(r.abs_error < 1e-3, "{r:?}");
            let area = r.delta3_area_route.unwrap();
            assert!(circular_distance(area, r.delta3_analytic) < 1e-2, "{r:?}");
        }
        let half = runs[2].record.area_n0_normalized.unwrap();
        let expected = (runs[2].record.delta3_analytic / runs[4].record.delta3_analytic).powi(2);
        assert!((half - expected).abs() < 5e-3, "{half} vs {expected}");
        assert_eq!(runs[4].record.area_n0_normalized, Some(1.0));
    }

    #[test]
    fn zero_shift_has_no_displacement() {
        let cfg = small_config();
        let runs = run_gauge_shift(&[(1, 0.0), (2, TAU)], &cfg).unwrap();
        assert_eq!(runs.len(), 3);
        assert_eq!(runs[1].record.displacement, Vec2::zero());
        assert_eq!(runs[1].record.area_deviation, 0.0);
        assert!(runs[2].record.displacement.norm() < 1e-9);
    }

    #[test]
    fn empty_report_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = emit_report(&ExperimentReport::default(), dir.path()).unwrap_err();
        assert!(matches!(err, Error::EmptyRun(_)));
        let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
        assert_eq!(summary, "# runs 0\n");
    }

    #[test]
    fn verdict_line_format() {
        let v = Verdict {
            name: "x",
            measured: 0.5,
            bound: 1.0,
        };
        assert_eq!(v.to_string(), "PASS x 5.000000e-1 1.000000e0");
    }
}
