//! Plain-text run configuration: one `key = value` per line, `#` comments,
//! SI units. Length values accept an `nm`, `um`, `mm` or `m` suffix.

use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{PinholeGeometry, Vec2};
use crate::interferometer::{ObservationGrid, SourceConfig};
use crate::raster::NoiseSpec;
use crate::ridge::AnalysisOptions;
use crate::states::{paper_states, JonesVector};

/// How the three polarization states are specified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateSpec {
    /// The experiment's states at polarizer angle θ (degrees).
    Paper { theta_deg: f64 },
    Explicit([JonesVector<f64>; 3]),
}

impl StateSpec {
    pub fn states(&self) -> [JonesVector<f64>; 3] {
        match self {
            StateSpec::Paper { theta_deg } => paper_states(theta_deg.to_radians()),
            StateSpec::Explicit(s) => *s,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldModel {
    Exact,
    Paraxial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub wavelength: f64,
    pub distance: f64,
    pub pinholes: [Vec2<f64>; 3],
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub center: Vec2<f64>,
    pub states: StateSpec,
    pub phases: [f64; 3],
    pub amplitude: f64,
    pub model: FieldModel,
    pub noise: Option<NoiseSpec>,
    pub bit_depth: u32,
    pub output: PathBuf,
    /// Polarizer angles for the sweep, degrees.
    pub sweep_thetas_deg: Vec<f64>,
    pub gauge_theta_deg: f64,
    /// `(pinhole, phase shift in rad)` pairs for the gauge experiment.
    pub gauge_shifts: Vec<(usize, f64)>,
    pub validity_threshold: f64,
    pub analysis: AnalysisOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        let side = 1.5e-3;
        let h = side * 3.0_f64.sqrt() / 2.0;
        Self {
            wavelength: 532e-9,
            distance: 2.0,
            pinholes: [Vec2::new(-side / 2.0, 0.0), Vec2::new(side / 2.0, 0.0), Vec2::new(0.0, h)],
            nx: 640,
            ny: 480,
            dx: 9e-6,
            dy: 8e-6,
            center: Vec2::zero(),
            states: StateSpec::Paper { theta_deg: 90.0 },
            phases: [0.0; 3],
            amplitude: 1.0,
            model: FieldModel::Exact,
            noise: None,
            bit_depth: 16,
            output: PathBuf::from("out"),
            sweep_thetas_deg: (0..36).map(|i| 5.0 * i as f64).collect(),
            gauge_theta_deg: 90.0,
            gauge_shifts: [1, 2, 3]
                .iter()
                .flat_map(|&p| [0.5, 1.0, 2.0].map(|s| (p, s)))
                .collect(),
            validity_threshold: crate::interferometer::DEFAULT_VALIDITY_THRESHOLD,
            analysis: AnalysisOptions::default(),
        }
    }
}

/// Non-fatal findings while loading a config.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigWarning {
    pub line: usize,
    pub message: String,
}

/// Keys accepted in a config file.
pub const KEYS: &[&str] = &[
    "wavelength",
    "distance",
    "pinhole1",
    "pinhole2",
    "pinhole3",
    "nx",
    "ny",
    "dx",
    "dy",
    "center",
    "states",
    "state1",
    "state2",
    "state3",
    "phases",
    "amplitude",
    "model",
    "noise_mean_counts",
    "noise_seed",
    "bit_depth",
    "output",
    "sweep_thetas_deg",
    "gauge_theta_deg",
    "gauge_shifts",
    "validity_threshold",
    "demod_margin",
    "min_visibility",
];

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| err(line, format!("{key}: expected a number, got {:?}", s.trim())))
}

fn parse_length(line: usize, key: &str, s: &str) -> Result<f64> {
    let s = s.trim();
    for (suffix, scale) in [("nm", 1e-9), ("um", 1e-6), ("mm", 1e-3), ("m", 1.0)] {
        if let Some(num) = s.strip_suffix(suffix) {
            return Ok(parse_f64(line, key, num)? * scale);
        }
    }
    parse_f64(line, key, s)
}

fn parse_list(line: usize, key: &str, s: &str, n: usize, length: bool) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(err(line, format!("{key}: expected {n} comma-separated values, got {}", parts.len())));
    }
    parts
        .iter()
        .map(|p| if length { parse_length(line, key, p) } else { parse_f64(line, key, p) })
        .collect()
}

fn parse_usize(line: usize, key: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| err(line, format!("{key}: expected a non-negative integer, got {:?}", s.trim())))
}

fn positive(line: usize, key: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(err(line, format!("{key}: must be positive, got {v}")))
    }
}

/// `start:stop:step` (inclusive) or a comma-separated list.
fn parse_angles(line: usize, key: &str, s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| parse_f64(line, key, p))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(err(line, format!("{key}: range must be start:stop:step")));
        };
        if !(step > 0.0) || stop < start {
            return Err(err(line, format!("{key}: range needs step > 0 and stop >= start")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    s.split(',').map(|p| parse_f64(line, key, p)).collect()
}

fn parse_shifts(line: usize, s: &str) -> Result<Vec<(usize, f64)>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            let (p, v) = item
                .split_once(':')
                .ok_or_else(|| err(line, format!("gauge_shifts: expected pinhole:shift, got {:?}", item.trim())))?;
            let p = parse_usize(line, "gauge_shifts", p)?;
            if !(1..=3).contains(&p) {
                return Err(err(line, format!("gauge_shifts: pinhole must be 1..3, got {p}")));
            }
            Ok((p, parse_f64(line, "gauge_shifts", v)?))
        })
        .collect()
}

impl RunConfig {
    /// Parses config text over the defaults. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<(Self, Vec<ConfigWarning>)> {
        let mut cfg = RunConfig::default();
        let mut warnings = Vec::new();
        let mut explicit: [Option<(usize, JonesVector<f64>)>; 3] = [None; 3];
        let mut states_line = None;
        let mut states_explicit = false;
        let mut noise_counts: Option<f64> = None;
        let mut noise_seed: u64 = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected key = value, got {content:?}")))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "wavelength" => cfg.wavelength = positive(line, key, parse_length(line, key, value)?)?,
                "distance" => cfg.distance = positive(line, key, parse_length(line, key, value)?)?,
                "pinhole1" | "pinhole2" | "pinhole3" => {
                    let v = parse_list(line, key, value, 2, true)?;
                    let j = key.as_bytes()[7] as usize - b'1' as usize;
                    cfg.pinholes[j] = Vec2::new(v[0], v[1]);
                }
                "nx" => cfg.nx = parse_usize(line, key, value)?,
                "ny" => cfg.ny = parse_usize(line, key, value)?,
                "dx" => cfg.dx = positive(line, key, parse_length(line, key, value)?)?,
                "dy" => cfg.dy = positive(line, key, parse_length(line, key, value)?)?,
                "center" => {
                    let v = parse_list(line, key, value, 2, true)?;
                    cfg.center = Vec2::new(v[0], v[1]);
                }
                "states" => {
                    states_line = Some(line);
                    if let Some(theta) = value.strip_prefix("paper:") {
                        states_explicit = false;
                        cfg.states = StateSpec::Paper {
                            theta_deg: parse_f64(line, key, theta)?,
                        };
                    } else if value == "explicit" {
                        states_explicit = true;
                    } else {
                        return Err(err(line, format!("states: expected paper:<deg> or explicit, got {value:?}")));
                    }
                }
                "state1" | "state2" | "state3" => {
                    let v = parse_list(line, key, value, 4, false)?;
                    let h = Complex::new(v[0], v[1]);
                    let vv = Complex::new(v[2], v[3]);
                    let norm_sqr = h.norm_sqr() + vv.norm_sqr();
                    let state = match JonesVector::new(h, vv) {
                        Ok(s) => s,
                        Err(_) => {
                            if (norm_sqr - 1.0).abs() > 1e-3 {
                                warnings.push(ConfigWarning {
                                    line,
                                    message: format!("{key}: |psi|^2 = {norm_sqr}; normalized"),
                                });
                            }
                            JonesVector::normalized(h, vv).map_err(|_| err(line, format!("{key}: zero vector")))?
                        }
                    };
                    let j = key.as_bytes()[5] as usize - b'1' as usize;
                    explicit[j] = Some((line, state));
                }
                "phases" => {
                    let v = parse_list(line, key, value, 3, false)?;
                    cfg.phases = [v[0], v[1], v[2]];
                }
                "amplitude" => cfg.amplitude = positive(line, key, parse_f64(line, key, value)?)?,
                "model" => {
                    cfg.model = match value {
                        "exact" => FieldModel::Exact,
                        "paraxial" => FieldModel::Paraxial,
                        _ => return Err(err(line, format!("model: expected exact or paraxial, got {value:?}"))),
                    }
                }
                "noise_mean_counts" => {
                    noise_counts = if value == "none" {
                        None
                    } else {
                        Some(positive(line, key, parse_f64(line, key, value)?)?)
                    }
                }
                "noise_seed" => {
                    noise_seed = value
                        .parse()
                        .map_err(|_| err(line, format!("noise_seed: expected an unsigned integer, got {value:?}")))?
                }
                "bit_depth" => {
                    let b = parse_usize(line, key, value)?;
                    if b != 8 && b != 16 {
                        return Err(err(line, format!("bit_depth: expected 8 or 16, got {b}")));
                    }
                    cfg.bit_depth = b as u32;
                }
                "output" => cfg.output = PathBuf::from(value),
                "sweep_thetas_deg" => cfg.sweep_thetas_deg = parse_angles(line, key, value)?,
                "gauge_theta_deg" => cfg.gauge_theta_deg = parse_f64(line, key, value)?,
                "gauge_shifts" => cfg.gauge_shifts = parse_shifts(line, value)?,
                "validity_threshold" => cfg.validity_threshold = positive(line, key, parse_f64(line, key, value)?)?,
                "demod_margin" => cfg.analysis.margin = parse_usize(line, key, value)?,
                "min_visibility" => cfg.analysis.min_visibility = parse_f64(line, key, value)?,
                _ => return Err(err(line, format!("unknown key {key:?}"))),
            }
        }

        let given = explicit.iter().filter(|e| e.is_some()).count();
        if given > 0 {
            if given < 3 {
                let line = explicit.iter().flatten().map(|(l, _)| *l).max().unwrap_or(0);
                return Err(err(line, "state1, state2 and state3 must be given together"));
            }
            if let (Some(line), false) = (states_line, states_explicit) {
                return Err(err(line, "states = paper:<deg> conflicts with explicit state1..3"));
            }
            cfg.states = StateSpec::Explicit(explicit.map(|e| e.unwrap().1));
        } else if states_explicit {
            return Err(err(states_line.unwrap(), "states = explicit needs state1..3"));
        }
        cfg.noise = noise_counts.map(|mean_counts| NoiseSpec {
            seed: noise_seed,
            mean_counts,
        });
        if cfg.nx < 3 || cfg.ny < 3 {
            return Err(err(0, format!("grid must be at least 3x3, got {}x{}", cfg.nx, cfg.ny)));
        }
        Ok((cfg, warnings))
    }

    /// Serializes every field; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let v2 = |v: Vec2<f64>| format!("{}, {}", v.x, v.y);
        let _ = writeln!(s, "wavelength = {}", self.wavelength);
        let _ = writeln!(s, "distance = {}", self.distance);
        for (j, p) in self.pinholes.iter().enumerate() {
            let _ = writeln!(s, "pinhole{} = {}", j + 1, v2(*p));
        }
        let _ = writeln!(s, "nx = {}\nny = {}\ndx = {}\ndy = {}", self.nx, self.ny, self.dx, self.dy);
        let _ = writeln!(s, "center = {}", v2(self.center));
        match &self.states {
            StateSpec::Paper { theta_deg } => {
                let _ = writeln!(s, "states = paper:{theta_deg}");
            }
            StateSpec::Explicit(states) => {
                let _ = writeln!(s, "states = explicit");
                for (j, st) in states.iter().enumerate() {
                    let _ = writeln!(s, "state{} = {}, {}, {}, {}", j + 1, st.h().re, st.h().im, st.v().re, st.v().im);
                }
            }
        }
        let _ = writeln!(s, "phases = {}, {}, {}", self.phases[0], self.phases[1], self.phases[2]);
        let _ = writeln!(s, "amplitude = {}", self.amplitude);
        let model = match self.model {
            FieldModel::Exact => "exact",
            FieldModel::Paraxial => "paraxial",
        };
        let _ = writeln!(s, "model = {model}");
        match &self.noise {
            Some(n) => {
                let _ = writeln!(s, "noise_mean_counts = {}\nnoise_seed = {}", n.mean_counts, n.seed);
            }
            None => {
                let _ = writeln!(s, "noise_mean_counts = none");
            }
        }
        let _ = writeln!(s, "bit_depth = {}", self.bit_depth);
        let _ = writeln!(s, "output = {}", self.output.display());
        let thetas: Vec<String> = self.sweep_thetas_deg.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(s, "sweep_thetas_deg = {}", thetas.join(", "));
        let _ = writeln!(s, "gauge_theta_deg = {}", self.gauge_theta_deg);
        let shifts: Vec<String> = self.gauge_shifts.iter().map(|(p, v)| format!("{p}:{v}")).collect();
        let _ = writeln!(s, "gauge_shifts = {}", shifts.join(", "));
        let _ = writeln!(s, "validity_threshold = {}", self.validity_threshold);
        let _ = writeln!(s, "demod_margin = {}", self.analysis.margin);
        let _ = writeln!(s, "min_visibility = {}", self.analysis.min_visibility);
        s
    }

    pub fn wavenumber(&self) -> f64 {
        std::f64::consts::TAU / self.wavelength
    }

    pub fn geometry(&self) -> Result<PinholeGeometry<f64>> {
        let [a, b, c] = self.pinholes;
        PinholeGeometry::new(a, b, c)
    }

    pub fn grid(&self) -> Result<ObservationGrid<f64>> {
        ObservationGrid::new(self.distance, self.nx, self.ny, self.dx, self.dy, self.center)
    }

    pub fn source(&self, states: [JonesVector<f64>; 3], phases: [f64; 3]) -> Result<SourceConfig<f64>> {
        let mut src = SourceConfig::from_wavelength(self.wavelength, phases, states)?;
        src.amplitude = self.amplitude;
        Ok(src)
    }
}
