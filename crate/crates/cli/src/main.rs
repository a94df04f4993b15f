//! `hdl`: run seeded sweeps, write CSV/SVG/metadata, re-plot saved CSVs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use householder_dict::experiment::presets::{self, PRESET_NAMES};
use householder_dict::experiment::{metadata_toml, read_csv, run_experiment, write_plot, CsvSink, ExperimentSpec};

#[derive(Parser)]
#[command(name = "hdl", version, about = "Householder dictionary learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run one of the bundled presets (fig1 ... fig5).
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        name: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Re-draw the plot for a CSV written by `run` or `demo`.
    Plot {
        csv: PathBuf,
        /// Directory for the SVG; defaults to the CSV's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunOpts {
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write <name>.csv, <name>.svg and <name>.meta.toml.
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// Worker threads for trials (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Override the hard-threshold level for code recovery.
    #[arg(long)]
    zeta: Option<f64>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, opts } => {
            let spec = ExperimentSpec::from_path(&config)?;
            let stem = config
                .file_stem()
                .and_then(|s| s.to_str())
                .context("config path has no file name")?
                .to_owned();
            execute(spec, &stem, &opts)
        }
        Command::Demo { name, opts } => execute(presets::preset(&name)?, &name, &opts),
        Command::Plot { csv, out_dir } => {
            let rows = read_csv(&csv)?;
            let dir = match out_dir {
                Some(d) => d,
                None => csv.parent().map(Path::to_path_buf).unwrap_or_default(),
            };
            create_dir(&dir)?;
            let svg = dir.join(csv.with_extension("svg").file_name().context("CSV path has no file name")?);
            write_plot(&rows, &svg)?;
            println!("{}", svg.display());
            Ok(())
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    if dir.as_os_str().is_empty() {
        return Ok(());
    }
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn execute(mut spec: ExperimentSpec, stem: &str, opts: &RunOpts) -> Result<()> {
    if let Some(seed) = opts.seed {
        spec.seed = seed;
    }
    if let Some(zeta) = opts.zeta {
        spec.zeta = zeta;
    }
    spec.validate()?;
    if opts.threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .context("starting worker threads")?;

    create_dir(&opts.out_dir)?;
    let csv = opts.out_dir.join(format!("{stem}.csv"));
    let meta = opts.out_dir.join(format!("{stem}.meta.toml"));
    let svg = opts.out_dir.join(format!("{stem}.svg"));
    fs::write(&meta, metadata_toml(&spec)).with_context(|| format!("writing {}", meta.display()))?;

    let mut sink = CsvSink::create(&csv)?;
    let mut rows = Vec::new();
    pool.install(|| {
        run_experiment(&spec, |row| {
            sink.write(&row)?;
            rows.push(row);
            Ok(())
        })
    })?;
    sink.finish()?;
    write_plot(&rows, &svg)?;

    for path in [&csv, &svg, &meta] {
        println!("{}", path.display());
    }
    Ok(())
}
