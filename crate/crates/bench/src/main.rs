use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rankaccess_bench::gen::{generate, CoordDistribution};
use rankaccess_bench::ingest::{load_csv, write_csv, Normalization};
use rankaccess_bench::persist::{load_dataset, save, Stored};
use rankaccess_bench::report::{write_rows, write_sweep};
use rankaccess_bench::workload::{run_sweep, run_workload, SweepAxis, WorkloadSpec};
use rankaccess_bench::{BenchError, Result};
use rankaccess_core::epsample::{build_eps_sample_with, SampleSizing, DEFAULT_SIZE_CONSTANT};
use rankaccess_core::hier::{HierConfig, HierIndex, DEFAULT_DECAY};
use rankaccess_core::kthlevel2d::build_levels_2d;
use rankaccess_core::srr::KdTree;

#[derive(Parser)]
#[command(name = "rankaccess", version, about = "Rank queries under linear scoring functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexKind {
    Kdtree,
    Hier,
    Kthlevel2d,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// `uniform` or `zipfian:S,V`.
        #[arg(long, default_value = "uniform")]
        dist: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; a `.csv` extension writes CSV instead of binary.
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert selected CSV columns into a dataset file.
    Ingest {
        #[arg(long)]
        csv: PathBuf,
        /// Comma-separated column names; all columns when omitted.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
        /// none, minmax or zscore.
        #[arg(long, default_value = "none")]
        normalize: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build and store an index over a dataset.
    Index {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        backend: IndexKind,
        /// Layer decay rate for the hierarchy.
        #[arg(long, default_value_t = DEFAULT_DECAY)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw and store a sample of a dataset.
    Sample {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        phi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SIZE_CONSTANT)]
        size_constant: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a workload spec and report per-query measurements.
    Query {
        #[arg(long)]
        workload: PathBuf,
        /// Check each answer against the exhaustive oracle.
        #[arg(long)]
        verify: bool,
        /// Per-query CSV; the summary always goes to stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a workload once per value of one parameter.
    Bench {
        /// Base workload; built-in defaults when omitted.
        #[arg(long)]
        workload: Option<PathBuf>,
        /// dim, size, width, epsilon or i.
        #[arg(long)]
        sweep: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        verify: bool,
        /// Summary CSV, one row per value; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| BenchError::Io {
            path: path.to_path_buf(),
            source: e,
        })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            n,
            d,
            dist,
            seed,
            out,
        } => {
            let dist: CoordDistribution = dist.parse()?;
            let data = generate(dist, n, d, seed)?;
            if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
                write_csv(&out, &data)?;
            } else {
                save(&out, &Stored::Dataset(data))?;
            }
            println!("wrote {n} points in d = {d} to {}", out.display());
        }
        Command::Ingest {
            csv,
            columns,
            normalize,
            out,
        } => {
            let how: Normalization = normalize.parse()?;
            let loaded = load_csv(&csv, &columns, how)?;
            println!(
                "read {} rows in d = {}, dropped {}",
                loaded.data.len(),
                loaded.data.dim(),
                loaded.dropped
            );
            save(&out, &Stored::Dataset(loaded.data))?;
        }
        Command::Index {
            data,
            backend,
            r,
            seed,
            out,
        } => {
            let data = load_dataset(&data)?;
            let stored = match backend {
                IndexKind::Kdtree => Stored::KdTree(KdTree::build(&data)),
                IndexKind::Hier => Stored::Hier(HierIndex::build(
                    &data,
                    HierConfig {
                        decay: r,
                        seed,
                        ..HierConfig::default()
                    },
                )?),
                IndexKind::Kthlevel2d => Stored::Levels2D(build_levels_2d(&data)?),
            };
            let bytes = save(&out, &stored)?;
            println!("wrote {bytes} bytes to {}", out.display());
        }
        Command::Sample {
            data,
            epsilon,
            phi,
            seed,
            size_constant,
            out,
        } => {
            let data = load_dataset(&data)?;
            let sizing = SampleSizing {
                constant: size_constant,
            };
            let sample = build_eps_sample_with(&data, epsilon, phi, seed, sizing)?;
            println!("sampled {} of {} points", sample.len(), data.len());
            save(&out, &Stored::Sample(sample))?;
        }
        Command::Query {
            workload,
            verify,
            report,
        } => {
            let mut spec = WorkloadSpec::from_file(&workload)?;
            spec.verify |= verify;
            let result = run_workload(&spec)?;
            if let Some(path) = report {
                write_rows(create(&path)?, &result.rows)?;
            }
            print!("{}", result.summary.to_text());
        }
        Command::Bench {
            workload,
            sweep,
            values,
            verify,
            report,
        } => {
            let mut spec = match workload {
                Some(path) => WorkloadSpec::from_file(&path)?,
                None => WorkloadSpec::default(),
            };
            spec.verify |= verify;
            let axis: SweepAxis = sweep.parse()?;
            let results = run_sweep(&spec, axis, &values)?;
            match report {
                Some(path) => write_sweep(create(&path)?, axis.name(), &results)?,
                None => {
                    let stdout = std::io::stdout();
                    write_sweep(stdout.lock(), axis.name(), &results)?;
                }
            }
        }
    }
    std::io::stdout().flush().ok();
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
