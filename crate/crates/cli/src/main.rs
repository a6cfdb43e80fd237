use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fedcal_cli::experiment::run_baselines;
use fedcal_cli::{run_experiment, sweep, write_outputs, Axis, ExperimentConfig, LoadedData};
use fedcal_core::data::{default_codebook, write_csv};
use fedcal_core::{synthetic, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "fedcal",
    version,
    about = "Collaborative naive Bayes calibration over simulated networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its metrics.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run one experiment per value of an axis.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        out: OutArgs,
        /// m_v, n, topology, partition, iter, delta or fragmentation.
        #[arg(long)]
        axis: Axis,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Centralized RC and ML only, on the first repetition's training set.
    Baseline {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write a random communication graph as an edge list.
    Gengraph {
        #[arg(long, default_value = "tree")]
        topology: Topology,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic dataset as CSV (label in the last column).
    Gendata {
        #[arg(long, value_enum, default_value_t = DataKind::Blobs)]
        kind: DataKind,
        #[arg(long, default_value_t = 5000)]
        m: usize,
        /// Dimension of the blobs.
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        classes: usize,
        /// Distance between blob centres.
        #[arg(long, default_value_t = 4.0)]
        separation: f64,
        /// Discrete features of the mixture.
        #[arg(long, default_value_t = 3)]
        discrete: usize,
        /// Continuous features of the mixture.
        #[arg(long, default_value_t = 2)]
        continuous: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DataKind {
    Blobs,
    Mixed,
}

#[derive(Args)]
struct OutArgs {
    /// Output directory.
    #[arg(long = "out", env = "FEDCAL_OUT_DIR", default_value = "out")]
    dir: PathBuf,
}

/// Config file plus one flag per config key; flags win over the file.
#[derive(Args)]
struct ConfigArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long = "m-v", alias = "m_v")]
    m_v: Option<String>,
    #[arg(long = "t-max", alias = "t_max")]
    t_max: Option<String>,
    #[arg(long)]
    iter: Option<String>,
    #[arg(long)]
    lr: Option<String>,
    #[arg(long)]
    m0: Option<String>,
    #[arg(long)]
    topology: Option<String>,
    #[arg(long)]
    neighborhood: Option<String>,
    #[arg(long)]
    partition: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long = "train-size", alias = "train_size")]
    train_size: Option<String>,
    #[arg(long = "test-size", alias = "test_size")]
    test_size: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    repetitions: Option<String>,
    #[arg(long = "ml-smoothing", alias = "ml_smoothing")]
    ml_smoothing: Option<String>,
    #[arg(long)]
    parallel: Option<String>,
    #[arg(long = "m-total", alias = "m_total")]
    m_total: Option<String>,
}

impl ConfigArgs {
    fn resolve(self) -> Result<ExperimentConfig> {
        let pairs = [
            ("data", self.data),
            ("label", self.label),
            ("n", self.n),
            ("m_v", self.m_v),
            ("t_max", self.t_max),
            ("iter", self.iter),
            ("lr", self.lr),
            ("m0", self.m0),
            ("topology", self.topology),
            ("neighborhood", self.neighborhood),
            ("partition", self.partition),
            ("delta", self.delta),
            ("train_size", self.train_size),
            ("test_size", self.test_size),
            ("seed", self.seed),
            ("repetitions", self.repetitions),
            ("ml_smoothing", self.ml_smoothing),
            ("parallel", self.parallel),
            ("m_total", self.m_total),
        ];
        let overrides: Vec<(String, String)> = pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect();
        match &self.config {
            Some(path) => ExperimentConfig::load(path, &overrides),
            None => ExperimentConfig::parse_with_overrides("", &overrides),
        }
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(io::BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, out } => {
            let config = config.resolve()?;
            let data = LoadedData::from_config(&config)?;
            let result = run_experiment(&config, &data.dataset)?;
            write_outputs(&config, &result, &out.dir)?;
            let s = result.summary;
            println!(
                "{}: t = {}  crc test {:.4} (std {:.4})  rc test {:.4}  ml test {:.4}  test gap {:+.4}",
                data.name, config.t_max, s.crc_test_err, s.crc_test_std, s.rc_test_err, s.ml_test_err, s.test_gap
            );
        }
        Command::Sweep {
            config,
            out,
            axis,
            values,
        } => {
            let config = config.resolve()?;
            let data = LoadedData::from_config(&config)?;
            for p in sweep(&config, axis, &values, &data.name, &data.dataset, &out.dir)? {
                println!(
                    "{axis} = {:>8}  crc test {:.4}  rc test {:.4}  test gap {:+.4}",
                    p.value, p.summary.crc_test_err, p.summary.rc_test_err, p.summary.test_gap
                );
            }
        }
        Command::Baseline { config, out } => {
            let config = config.resolve()?;
            let data = LoadedData::from_config(&config)?;
            let b = run_baselines(&config, &data.dataset)?;
            fs::create_dir_all(&out.dir).with_context(|| format!("creating {}", out.dir.display()))?;
            b.trace.write_csv(fs::File::create(out.dir.join("rc_trace.csv"))?)?;
            fs::write(
                out.dir.join("rc_params.txt"),
                b.trace.final_iteration().params.to_dump(),
            )?;
            fs::write(out.dir.join("ml_params.txt"), b.ml_params.to_dump())?;
            println!(
                "{}: rc train {:.4} test {:.4}  ml train {:.4} test {:.4}",
                data.name, b.rc.train_err, b.rc.test_err, b.ml.train_err, b.ml.test_err
            );
        }
        Command::Gengraph { topology, n, seed, out } => {
            let graph = topology.generate(n, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let mut w = sink(out.as_deref())?;
            graph.write_edge_list(&mut w)?;
            w.flush()?;
        }
        Command::Gendata {
            kind,
            m,
            d,
            classes,
            separation,
            discrete,
            continuous,
            seed,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ds = match kind {
                DataKind::Blobs => synthetic::gaussian_blobs(m, d, classes, separation, &mut rng)?,
                DataKind::Mixed => synthetic::mixed(m, discrete, continuous, classes, &mut rng)?,
            };
            let mut w = sink(out.as_deref())?;
            write_csv(&ds, &default_codebook(ds.schema()), &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
