use std::f64::consts::TAU;

use ridgephase::config::RunConfig;
use ridgephase::experiments::{emit_report, run_gauge_shift, run_theta_sweep, ExperimentReport};
use ridgephase::geometry::Vec2;
use ridgephase::interferometer::{paraxial_intensity, ObservationGrid, SourceConfig};
use ridgephase::ridge::{analyze, AnalysisOptions};
use ridgephase::states::{delta3_theory, paper_states};
use ridgephase::{Interferogram32, PinholeGeometry32, PinholeGeometry64, SourceConfig32};

fn circ(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn small() -> RunConfig {
    RunConfig {
        nx: 320,
        ny: 240,
        dx: 18e-6,
        dy: 16e-6,
        ..RunConfig::default()
    }
}

#[test]
fn scalene_pinholes_recover_the_same_phase() {
    let geom = PinholeGeometry64::new(Vec2::new(-0.9e-3, -0.3e-3), Vec2::new(0.8e-3, -0.5e-3), Vec2::new(0.2e-3, 0.9e-3)).unwrap();
    let grid = ObservationGrid::ccd(2.0);
    for theta_deg in [30.0_f64, 90.0, 150.0] {
        let theta = theta_deg.to_radians();
        let src = SourceConfig::from_wavelength(532e-9, [0.3, -1.1, 2.0], paper_states(theta)).unwrap();
        let img = paraxial_intensity(&geom, &src, &grid).unwrap();
        let a = analyze(&img, &geom, src.wavenumber, &AnalysisOptions::default()).unwrap();
        let truth = delta3_theory(theta).unwrap();
        assert!(circ(a.delta3_phase, truth) < 1e-3, "{theta_deg}: {} vs {truth}", a.delta3_phase);
        assert!(circ(a.delta3_area.unwrap(), truth) < 1e-3);
    }
}

#[test]
fn single_precision_pipeline_tracks_double() {
    let geom = PinholeGeometry32::equilateral(1.5e-3).unwrap();
    let grid = ObservationGrid::<f32>::ccd(2.0);
    let theta = 50.0_f32.to_radians();
    let src: SourceConfig32 = SourceConfig::from_wavelength(532e-9, [0.0; 3], paper_states(theta)).unwrap();
    let img: Interferogram32 = paraxial_intensity(&geom, &src, &grid).unwrap();
    let a = analyze(&img, &geom, src.wavenumber, &AnalysisOptions::default()).unwrap();
    let truth = delta3_theory(f64::from(theta)).unwrap();
    assert!(circ(f64::from(a.delta3_phase), truth) < 1e-2);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let mut cfg = small();
    cfg.noise = Some(ridgephase::raster::NoiseSpec {
        seed: 5,
        mean_counts: 1500.0,
    });
    let thetas = [40.0, 120.0];
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let report = ExperimentReport {
            sweep: run_theta_sweep(&thetas, &cfg).unwrap(),
            gauge: run_gauge_shift(&[(2, 1.0)], &cfg).unwrap(),
        };
        emit_report(&report, dir.path()).unwrap();
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 10);
    for name in names {
        let a = std::fs::read(dirs[0].path().join(&name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(&name)).unwrap();
        assert!(a == b, "{name:?} differs");
    }
}

#[test]
fn full_cycle_shift_leaves_triangles_in_place() {
    let runs = run_gauge_shift(&[(1, TAU), (2, TAU), (3, TAU)], &small()).unwrap();
    for run in &runs[1..] {
        assert!(run.record.displacement.norm() < 1e-9, "{:?}", run.record);
        assert!(run.record.area_deviation < 1e-6);
    }
}

#[test]
fn shift_on_each_pinhole_slides_along_the_untouched_fringes() {
    let cfg = small();
    let runs = run_gauge_shift(&[(1, 1.0), (2, 1.0), (3, 1.0)], &cfg).unwrap();
    let [a1, a2, a3] = cfg.pinholes;
    for (run, untouched) in runs[1..].iter().zip([a2 - a3, a3 - a1, a1 - a2]) {
        let d = run.record.displacement;
        let along = untouched.perp();
        let cos = d.dot(along).abs() / (d.norm() * along.norm());
        assert!(cos > 0.9999, "{:?}", run.record);
    }
}
