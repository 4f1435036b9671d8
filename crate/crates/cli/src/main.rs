//! `ridgephase` command-line front end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ridgephase::config::RunConfig;
use ridgephase::experiments::{emit_report, run_gauge_shift, run_theta_sweep, simulate, ExperimentReport, Verdict};
use ridgephase::interferometer::{check_paraxial_validity, exact_intensity, max_relative_deviation, paraxial_intensity};
use ridgephase::io::{
    encode_pgm, read_binary, render_overlay, write_binary, write_families_csv, write_interferogram_csv,
    write_triangles_csv, FieldMetadata, InterferogramFile,
};
use ridgephase::raster::quantize;
use ridgephase::ridge::analyze;
use ridgephase::Error;

#[derive(Parser, Debug)]
#[command(name = "ridgephase", version, about = "Three-pinhole interferometer simulation and geometric-phase recovery")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Run configuration (key = value lines); defaults mirror the reference experiment
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, overriding the config's `output`
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Noise seed, overriding the config's `noise_seed`
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads; 0 picks one per core
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize one interferogram and write it as PGM and binary
    Simulate {
        /// Also write the float samples as x,y,intensity CSV
        #[arg(long)]
        csv: bool,
    },
    /// Recover the ridge lattice and Δ3 from a binary interferogram
    Extract {
        /// Interferogram file written by `simulate`
        input: PathBuf,
    },
    /// Polarizer-angle sweep against the analytic Δ3
    Sweep,
    /// Per-pinhole phase shifts at fixed polarizer angle
    Gauge,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config { .. } | Error::EmptyRun(_) => 2,
            Error::Format(_) | Error::UnsupportedBitDepth(_) => 4,
            Error::Io { .. } => 5,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load_config(global: &GlobalArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &global.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure {
                code: 2,
                message: format!("{}: {e}", path.display()),
            })?;
            let (cfg, warnings) = RunConfig::parse(&text).map_err(|e| Failure {
                code: 2,
                message: format!("{}: {e}", path.display()),
            })?;
            for w in warnings {
                eprintln!("warning: {}:{}: {}", path.display(), w.line, w.message);
            }
            cfg
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &global.out {
        cfg.output = out.clone();
    }
    if let (Some(seed), Some(noise)) = (global.seed, cfg.noise.as_mut()) {
        noise.seed = seed;
    }
    Ok(cfg)
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure {
        code: 5,
        message: format!("{}: {e}", dir.display()),
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: 5,
        message: format!("{}: {e}", path.display()),
    })
}

fn cmd_simulate(cfg: &RunConfig, csv: bool) -> Result<(), Failure> {
    create_dir(&cfg.output)?;
    let (geom, src, img, raster) = simulate(cfg, cfg.states.states(), cfg.phases, cfg.noise.as_ref())?;
    let meta = FieldMetadata::new(&img.grid, src.wavenumber);
    write_text_bytes(&cfg.output.join("interferogram.pgm"), &encode_pgm(&raster, &meta))?;
    let file = InterferogramFile {
        image: img.clone(),
        wavenumber: src.wavenumber,
        pinholes: cfg.pinholes,
    };
    write_binary(&cfg.output.join("interferogram.rphase"), &file)?;
    if csv {
        write_interferogram_csv(&cfg.output.join("interferogram.csv"), &img)?;
    }

    let validity = check_paraxial_validity(&geom, &img.grid, src.wavenumber, cfg.validity_threshold);
    let exact = exact_intensity(&geom, &src, &img.grid)?;
    let paraxial = paraxial_intensity(&geom, &src, &img.grid)?;
    let mut report = String::new();
    let _ = writeln!(report, "scale_m {:e}", validity.scale);
    let _ = writeln!(report, "max_offset_m {:e}", validity.max_offset);
    let _ = writeln!(report, "offset_ratio {:e}", validity.offset_ratio);
    let _ = writeln!(report, "scale_ratio {:e}", validity.scale_ratio);
    let _ = writeln!(report, "threshold {:e}", validity.threshold);
    let _ = writeln!(report, "paraxial_condition {}", if validity.pass { "PASS" } else { "FAIL" });
    let _ = writeln!(report, "exact_vs_paraxial_max_relative_deviation {:e}", max_relative_deviation(&exact, &paraxial));
    write_text(&cfg.output.join("validity.txt"), &report)?;
    if !validity.pass {
        eprintln!(
            "note: paraxial condition margins exceed {} (offset ratio {:.3}, scale ratio {:.3})",
            validity.threshold, validity.offset_ratio, validity.scale_ratio
        );
    }
    println!("wrote {}x{} interferogram to {}", img.grid.nx, img.grid.ny, cfg.output.display());
    Ok(())
}

fn write_text_bytes(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure {
        code: 5,
        message: format!("{}: {e}", path.display()),
    })
}

fn cmd_extract(cfg: &RunConfig, input: &Path) -> Result<(), Failure> {
    let file = read_binary(input)?;
    let geom = file.geometry()?;
    create_dir(&cfg.output)?;
    let mut summary = format!("# input {}\n", input.display());
    let analysis = match analyze(&file.image, &geom, file.wavenumber, &cfg.analysis) {
        Ok(a) => a,
        Err(Error::ZeroAmplitude(i, j, v)) => {
            eprintln!("warning: fringe ({i},{j}) has zero visibility (estimate {v:e}); no ridge lattice");
            let _ = writeln!(summary, "warning zero_amplitude ({i},{j}) {v:e}");
            return write_text(&cfg.output.join("summary.txt"), &summary);
        }
        Err(e) => return Err(e.into()),
    };

    write_families_csv(&cfg.output.join("families.csv"), &analysis.families)?;
    write_triangles_csv(&cfg.output.join("triangles.csv"), &analysis.triangles.triangles)?;
    let raster = quantize(&file.image, 16, None)?;
    let meta = FieldMetadata::new(&file.image.grid, file.wavenumber);
    let overlay = render_overlay(&raster, &analysis.families);
    write_text_bytes(&cfg.output.join("ridges.pgm"), &encode_pgm(&overlay, &meta))?;

    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_else(|| "none".into());
    let _ = writeln!(summary, "delta3_phase_route {:e}", analysis.delta3_phase);
    let _ = writeln!(summary, "delta3_area_route {}", opt(analysis.delta3_area));
    let _ = writeln!(summary, "area_n0 {}", opt(analysis.area_n0));
    let _ = writeln!(summary, "area_n1 {}", opt(analysis.area_n1));
    for f in &analysis.fringes {
        let _ = writeln!(summary, "visibility_{} {:e}", f.pair.label(), f.visibility);
    }
    if analysis.triangles.near_degenerate {
        let _ = writeln!(summary, "warning degenerate_lattice");
    }
    write_text(&cfg.output.join("summary.txt"), &summary)?;
    println!("delta3 phase route {:.6} rad, area route {}", analysis.delta3_phase, opt(analysis.delta3_area));
    Ok(())
}

fn print_verdicts(verdicts: &[Verdict]) {
    for v in verdicts {
        println!("{v}");
    }
}

fn cmd_sweep(cfg: &RunConfig) -> Result<(), Failure> {
    let sweep = run_theta_sweep(&cfg.sweep_thetas_deg, cfg)?;
    let verdicts = emit_report(&ExperimentReport { sweep, gauge: Vec::new() }, &cfg.output)?;
    print_verdicts(&verdicts);
    Ok(())
}

fn cmd_gauge(cfg: &RunConfig) -> Result<(), Failure> {
    let gauge = run_gauge_shift(&cfg.gauge_shifts, cfg)?;
    let verdicts = emit_report(&ExperimentReport { sweep: Vec::new(), gauge }, &cfg.output)?;
    print_verdicts(&verdicts);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
            .map_err(|e| Failure {
                code: 5,
                message: e.to_string(),
            })?;
    }
    let cfg = load_config(&cli.global)?;
    match cli.command {
        Command::Simulate { csv } => cmd_simulate(&cfg, csv),
        Command::Extract { input } => cmd_extract(&cfg, &input),
        Command::Sweep => cmd_sweep(&cfg),
        Command::Gauge => cmd_gauge(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
