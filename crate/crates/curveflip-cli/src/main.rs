//! Command-line interface: validate, simplify, classify, trace, bench, gen.
//!
//! Exit codes: 0 on success, 1 on validation or input failure, 2 on an
//! internal invariant violation.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use curveflip::simplify::{
    replay, simplify_accelerated, simplify_flips_only, SimplifyConfig,
};
use curveflip::surface::surfaces;
use curveflip::tracer::{block_partition, max_edge};
use curveflip::{classify, gen, Error, MultiCurve, Side, Triangulation};

#[derive(Parser)]
#[command(name = "curveflip", version, about = "Curves on ideal triangulations: validation, simplification, classification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Flips,
    Accel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Pos,
    Neg,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a triangulation and curve pair against all structural invariants.
    Validate {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        curve: PathBuf,
    },
    /// Simplify the triangulation with respect to the curve.
    Simplify {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, value_enum, default_value = "accel")]
        mode: Mode,
        /// Write the move log (JSON Lines) here; stdout gets the summary.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Flip progress ratio as `num/den`; default 1/(64 zeta).
        #[arg(long)]
        ratio: Option<String>,
        #[arg(long)]
        max_moves: Option<u64>,
        /// Use the insulation-ordered block selection with exact thresholds.
        #[arg(long)]
        certified: bool,
        #[arg(long)]
        out_tri: Option<PathBuf>,
        #[arg(long)]
        out_curve: Option<PathBuf>,
        /// Re-apply the log from the initial state and verify the final state.
        #[arg(long)]
        verify_replay: bool,
    },
    /// Decompose a simple multicurve into components.
    Classify {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        curve: PathBuf,
    },
    /// Dump the block partition of an edge as JSON.
    Trace {
        #[arg(long)]
        tri: PathBuf,
        #[arg(long)]
        curve: PathBuf,
        /// Edge to trace; defaults to the maximal edge.
        #[arg(long)]
        edge: Option<usize>,
        #[arg(long, value_enum, default_value = "pos")]
        side: SideArg,
    },
    /// Benchmark the slope family: flips-only moves vs accelerated metric.
    Bench {
        /// Largest log2(slope).
        #[arg(long, default_value_t = 14)]
        kmax: u32,
        #[arg(long, default_value_t = 3)]
        samples: u32,
        /// Run the flips-only engine up to this log2(slope) only.
        #[arg(long, default_value_t = 14)]
        flips_kmax: u32,
    },
    /// Generate a hard instance from a named surface.
    Gen {
        #[arg(long, value_parser = surfaces::NAMES)]
        surface: String,
        #[arg(long)]
        seed: u64,
        /// Number of random flips applied after the twist phase.
        #[arg(long, default_value_t = 10)]
        moves: usize,
        /// Largest twist power magnitude.
        #[arg(long, default_value_t = 1 << 30)]
        max_power: u64,
        #[arg(long)]
        out_tri: PathBuf,
        #[arg(long)]
        out_curve: PathBuf,
    },
}

fn load_pair(tri: &PathBuf, curve: &PathBuf) -> Result<(Triangulation, MultiCurve), String> {
    let tri_text = fs::read_to_string(tri).map_err(|e| format!("{}: {e}", tri.display()))?;
    let t = Triangulation::from_text(&tri_text).map_err(|e| e.to_string())?;
    let curve_text = fs::read_to_string(curve).map_err(|e| format!("{}: {e}", curve.display()))?;
    let c = MultiCurve::from_text(&t, &curve_text).map_err(|e| e.to_string())?;
    Ok((t, c))
}

fn parse_ratio(s: &str) -> Result<(u64, u64), String> {
    let (num, den) = s.split_once('/').ok_or("ratio must look like 1/192")?;
    let num = num.trim().parse().map_err(|_| "bad ratio numerator")?;
    let den: u64 = den.trim().parse().map_err(|_| "bad ratio denominator")?;
    if den == 0 {
        return Err("ratio denominator must be positive".into());
    }
    Ok((num, den))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::LemmaViolation { .. } | Error::InadmissibleResult(_) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    match cli.cmd {
        Cmd::Validate { tri, curve } => {
            let (t, c) = load_pair(&tri, &curve).map_err(|e| (1, e))?;
            println!(
                "ok: zeta={} triangles={} punctures={} total={} simple={}",
                t.zeta(),
                t.triangle_count(),
                t.puncture_count(),
                c.total(),
                c.is_simple(&t)
            );
            Ok(())
        }
        Cmd::Simplify {
            tri,
            curve,
            mode,
            log,
            ratio,
            max_moves,
            certified,
            out_tri,
            out_curve,
            verify_replay,
        } => {
            let (t, c) = load_pair(&tri, &curve).map_err(|e| (1, e))?;
            let ratio = match ratio {
                Some(s) => Some(parse_ratio(&s).map_err(|e| (1, e))?),
                None => None,
            };
            let config = SimplifyConfig {
                flip_progress_ratio: ratio,
                certified_block_order: certified,
                max_moves,
                ..Default::default()
            };
            let out = match mode {
                Mode::Flips => simplify_flips_only(&t, &c, &config),
                Mode::Accel => simplify_accelerated(&t, &c, &config),
            }
            .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            if verify_replay {
                let (rt, rc) = replay(&t, &c, &out.log)
                    .map_err(|e| (2, format!("replay failed: {e}")))?;
                if rc.weights() != out.curve.weights()
                    || rt.unsigned_canonical() != out.tri.unsigned_canonical()
                {
                    return Err((2, "replay did not reproduce the final state".into()));
                }
            }
            let jsonl = out.log.to_jsonl();
            match log {
                Some(path) => {
                    fs::write(&path, &jsonl).map_err(|e| (1, format!("{}: {e}", path.display())))?;
                    // Stdout still gets the summary line.
                    println!("{}", jsonl.lines().last().unwrap_or_default());
                }
                None => print!("{jsonl}"),
            }
            if let Some(path) = out_tri {
                fs::write(&path, out.tri.to_text())
                    .map_err(|e| (1, format!("{}: {e}", path.display())))?;
            }
            if let Some(path) = out_curve {
                fs::write(&path, out.curve.to_text())
                    .map_err(|e| (1, format!("{}: {e}", path.display())))?;
            }
            if !out.reached_simple {
                eprintln!("note: stopped before reaching a simple position");
            }
            Ok(())
        }
        Cmd::Classify { tri, curve } => {
            let (t, c) = load_pair(&tri, &curve).map_err(|e| (1, e))?;
            let report = classify::decompose(&t, &c)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            println!("{}", report.to_json());
            Ok(())
        }
        Cmd::Trace { tri, curve, edge, side } => {
            let (t, c) = load_pair(&tri, &curve).map_err(|e| (1, e))?;
            let edge = edge.unwrap_or_else(|| max_edge(&c).0);
            let side = match side {
                SideArg::Pos => Side::Pos,
                SideArg::Neg => Side::Neg,
            };
            let bp = block_partition(&t, &c, edge, side)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            println!("{}", bp.to_json());
            Ok(())
        }
        Cmd::Bench { kmax, samples, flips_kmax } => {
            let rows = curveflip::bench::bench_slope(kmax, samples, flips_kmax)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            print!("{}", curveflip::bench::to_csv(&rows));
            Ok(())
        }
        Cmd::Gen { surface, seed, moves, max_power, out_tri, out_curve } => {
            let t = surfaces::by_name(&surface).ok_or((1, format!("unknown surface {surface}")))?;
            let inst = gen::generate(&t, &surface, seed, moves, max_power)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            let tri_text = format!("# {}\n{}", inst.provenance, inst.tri.to_text());
            let curve_text = format!("# {}\n{}", inst.provenance, inst.curve.to_text());
            fs::write(&out_tri, tri_text).map_err(|e| (1, format!("{}: {e}", out_tri.display())))?;
            fs::write(&out_curve, curve_text)
                .map_err(|e| (1, format!("{}: {e}", out_curve.display())))?;
            println!("wrote {} and {}", out_tri.display(), out_curve.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
