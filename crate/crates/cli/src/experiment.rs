//! One experiment: repeated train/test splits, partitions and graphs, the
//! centralized baselines, and a collaborative calibration run per repetition.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fedcal_core::data::{infer_schema, load_csv, train_test_split, LabelColumn};
use fedcal_core::partition::split;
use fedcal_core::{
    baseline_errors, run_baseline, run_crc, write_metrics_csv, BaselineConfig, BaselineKind, Codebook, CrcConfig,
    Dataset, Evaluation, Graph, NaiveBayes, NbParams, RcTrace, RewireSchedule, RoundErrors, RoundMetrics,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ExperimentConfig;

/// Seed distance between consecutive repetitions.
pub const REP_INCREMENT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Independent random streams of one repetition.
#[derive(Debug, Clone, Copy)]
pub enum Purpose {
    Split = 0,
    Partition = 1,
    Graph = 2,
}

/// Generator for `purpose` in repetition `rep`; depends on nothing else, so
/// any repetition can be replayed alone.
pub fn stream(seed: u64, rep: usize, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(REP_INCREMENT.wrapping_mul(rep as u64)));
    rng.set_stream(purpose as u64);
    rng
}

pub struct LoadedData {
    pub name: String,
    pub dataset: Dataset,
    pub codebook: Codebook,
}

impl LoadedData {
    pub fn load(path: &Path, label: Option<&str>) -> Result<Self> {
        let label = match label {
            Some(l) => LabelColumn::from(l),
            None => {
                // default to the last header column
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let width = csv::Reader::from_reader(text.as_bytes())
                    .headers()
                    .with_context(|| format!("reading header of {}", path.display()))?
                    .len();
                LabelColumn::Index(width.saturating_sub(1))
            }
        };
        let table = load_csv(path, &label)?;
        let (dataset, codebook) = infer_schema(&table).with_context(|| format!("typing {}", path.display()))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "data".into());
        Ok(Self {
            name,
            dataset,
            codebook,
        })
    }

    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        let path = config.data.as_deref().context("no dataset configured (set `data`)")?;
        Self::load(path, config.label.as_deref())
    }
}

/// Train/test split, node datasets and the round-1 graph of one repetition.
pub struct Setup {
    /// Pooled local data: the global training set.
    pub train: Dataset,
    pub test: Dataset,
    pub local: Vec<Dataset>,
    pub graph: Graph,
    pub graph_rng: ChaCha8Rng,
}

pub fn setup(config: &ExperimentConfig, dataset: &Dataset, rep: usize) -> Result<Setup> {
    let train_size = config.resolved_train_size();
    let test_size = match config.test_size {
        Some(t) => t,
        None => dataset
            .len()
            .checked_sub(train_size)
            .filter(|&t| t > 0)
            .with_context(|| {
                format!(
                    "dataset has {} instances, leaving none for testing after {train_size} training instances",
                    dataset.len()
                )
            })?,
    };
    let (pool, test) = train_test_split(
        dataset,
        train_size,
        test_size,
        &mut stream(config.seed, rep, Purpose::Split),
    )?;
    let plan = split(
        config.partition,
        &pool,
        config.n,
        config.m_v,
        &mut stream(config.seed, rep, Purpose::Partition),
    )?;
    let mut graph_rng = stream(config.seed, rep, Purpose::Graph);
    let graph = config.topology.generate(config.n, &mut graph_rng)?;
    Ok(Setup {
        train: pool.subset(&plan.global_sample()),
        test,
        local: plan.local_datasets(&pool),
        graph,
        graph_rng,
    })
}

pub struct Repetition {
    /// 1-based.
    pub rep: usize,
    pub metrics: Vec<RoundMetrics>,
    pub ml: RoundErrors,
    pub rc_params: NbParams,
    pub ml_params: NbParams,
    pub node_params: Vec<NbParams>,
    pub final_graph: Graph,
}

impl Repetition {
    pub fn last(&self) -> &RoundMetrics {
        self.metrics.last().expect("t_max ≥ 1")
    }

    pub fn params_dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# rc");
        out.push_str(&self.rc_params.to_dump());
        let _ = writeln!(out, "# ml");
        out.push_str(&self.ml_params.to_dump());
        for (v, p) in self.node_params.iter().enumerate() {
            let _ = writeln!(out, "# node {}", v + 1);
            out.push_str(&p.to_dump());
        }
        out
    }
}

fn baseline_config(config: &ExperimentConfig) -> BaselineConfig {
    BaselineConfig {
        lr: config.lr,
        t_max: config.t_max,
        ml_smoothing: config.ml_smoothing,
    }
}

pub fn crc_config(config: &ExperimentConfig) -> CrcConfig {
    CrcConfig {
        t_max: config.t_max,
        iter: config.iter,
        m0: config.resolved_m0(),
        neighborhood: config.neighborhood,
        parallel: config.parallel,
    }
}

pub fn run_repetition(config: &ExperimentConfig, dataset: &Dataset, rep: usize) -> Result<Repetition> {
    let Setup {
        train,
        test,
        local,
        graph,
        mut graph_rng,
    } = setup(config, dataset, rep)?;
    let model = NaiveBayes::new(dataset.schema().clone());
    let bcfg = baseline_config(config);

    let ml = run_baseline(&model, BaselineKind::Ml, &train, &bcfg)?;
    let ml_params = ml.final_params().clone();
    let ml_errors = RoundErrors::of(&model, &ml_params, &train, &test)?;

    let rc = run_baseline(&model, BaselineKind::Rc, &train, &bcfg)?;
    let rc_errors = baseline_errors(&model, &rc, &train, &test, config.t_max)?;

    let schedule = RewireSchedule {
        period: config.delta,
        topology: config.topology,
    };
    let eval = Evaluation {
        train: &train,
        test: &test,
        baseline: &rc_errors,
    };
    let outcome = run_crc(
        &model,
        &crc_config(config),
        local,
        graph,
        &schedule,
        &mut graph_rng,
        &eval,
    )?;
    Ok(Repetition {
        rep: rep + 1,
        metrics: outcome.metrics,
        ml: ml_errors,
        rc_params: rc.final_params().clone(),
        ml_params,
        node_params: outcome.nodes.into_iter().map(|n| n.params).collect(),
        final_graph: outcome.final_graph,
    })
}

/// Centralized baselines only, on the global training set of repetition 1.
pub struct BaselineRun {
    pub trace: RcTrace<NbParams>,
    pub rc: RoundErrors,
    pub ml: RoundErrors,
    pub ml_params: NbParams,
}

pub fn run_baselines(config: &ExperimentConfig, dataset: &Dataset) -> Result<BaselineRun> {
    let s = setup(config, dataset, 0)?;
    let model = NaiveBayes::new(dataset.schema().clone());
    let bcfg = baseline_config(config);
    let rc = run_baseline(&model, BaselineKind::Rc, &s.train, &bcfg)?;
    let ml = run_baseline(&model, BaselineKind::Ml, &s.train, &bcfg)?;
    Ok(BaselineRun {
        rc: RoundErrors::of(&model, rc.final_params(), &s.train, &s.test)?,
        ml: RoundErrors::of(&model, ml.final_params(), &s.train, &s.test)?,
        ml_params: ml.final_params().clone(),
        trace: rc.trace.expect("rc keeps its trace"),
    })
}

/// Final-round figures of one repetition, or their mean over repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub crc_train_err: f64,
    pub crc_test_err: f64,
    pub crc_test_std: f64,
    pub rc_train_err: f64,
    pub rc_test_err: f64,
    pub ml_train_err: f64,
    pub ml_test_err: f64,
    pub train_gap: f64,
    pub test_gap: f64,
}

pub const SUMMARY_FIELDS: [&str; 9] = [
    "crc_train_err",
    "crc_test_err",
    "crc_test_std",
    "rc_train_err",
    "rc_test_err",
    "ml_train_err",
    "ml_test_err",
    "train_gap",
    "test_gap",
];

impl Summary {
    fn of(rep: &Repetition) -> Self {
        let m = rep.last();
        Self {
            crc_train_err: m.train_err_mean,
            crc_test_err: m.test_err_mean,
            crc_test_std: m.test_err_std,
            rc_train_err: m.rc_train_err,
            rc_test_err: m.rc_test_err,
            ml_train_err: rep.ml.train_err,
            ml_test_err: rep.ml.test_err,
            train_gap: m.train_gap,
            test_gap: m.test_gap,
        }
    }

    pub fn fields(&self) -> [f64; 9] {
        [
            self.crc_train_err,
            self.crc_test_err,
            self.crc_test_std,
            self.rc_train_err,
            self.rc_test_err,
            self.ml_train_err,
            self.ml_test_err,
            self.train_gap,
            self.test_gap,
        ]
    }

    fn from_fields(f: [f64; 9]) -> Self {
        Self {
            crc_train_err: f[0],
            crc_test_err: f[1],
            crc_test_std: f[2],
            rc_train_err: f[3],
            rc_test_err: f[4],
            ml_train_err: f[5],
            ml_test_err: f[6],
            train_gap: f[7],
            test_gap: f[8],
        }
    }
}

fn mean_of<const N: usize>(rows: impl ExactSizeIterator<Item = [f64; N]>) -> [f64; N] {
    let k = rows.len() as f64;
    let mut acc = [0.0; N];
    for row in rows {
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
    }
    acc.map(|a| a / k)
}

pub struct ExperimentResult {
    pub repetitions: Vec<Repetition>,
    /// Per-round means over repetitions.
    pub aggregate: Vec<RoundMetrics>,
    pub summary: Summary,
}

fn average_metrics(reps: &[Repetition]) -> Vec<RoundMetrics> {
    let k = reps.len() as f64;
    let rounds = reps[0].metrics.len();
    (0..rounds)
        .map(|i| {
            let at = |f: fn(&RoundMetrics) -> f64| reps.iter().map(|r| f(&r.metrics[i])).sum::<f64>() / k;
            let per_node = |f: fn(&RoundMetrics) -> &Vec<f64>| {
                let n = f(&reps[0].metrics[i]).len();
                (0..n)
                    .map(|v| reps.iter().map(|r| f(&r.metrics[i])[v]).sum::<f64>() / k)
                    .collect()
            };
            RoundMetrics {
                t: reps[0].metrics[i].t,
                train_err: per_node(|m| &m.train_err),
                test_err: per_node(|m| &m.test_err),
                train_err_mean: at(|m| m.train_err_mean),
                train_err_std: at(|m| m.train_err_std),
                test_err_mean: at(|m| m.test_err_mean),
                test_err_std: at(|m| m.test_err_std),
                soft_train_mean: at(|m| m.soft_train_mean),
                rc_train_err: at(|m| m.rc_train_err),
                rc_test_err: at(|m| m.rc_test_err),
                train_gap: at(|m| m.train_gap),
                test_gap: at(|m| m.test_gap),
            }
        })
        .collect()
}

/// Runs every repetition; results do not depend on `config.parallel`.
pub fn run_experiment(config: &ExperimentConfig, dataset: &Dataset) -> Result<ExperimentResult> {
    config.validate()?;
    let run = |rep: usize| run_repetition(config, dataset, rep).with_context(|| format!("repetition {}", rep + 1));
    let repetitions: Vec<Repetition> = if config.parallel {
        (0..config.repetitions)
            .into_par_iter()
            .map(run)
            .collect::<Result<_>>()?
    } else {
        (0..config.repetitions).map(run).collect::<Result<_>>()?
    };
    let aggregate = average_metrics(&repetitions);
    let summary = Summary::from_fields(mean_of(repetitions.iter().map(|r| Summary::of(r).fields())));
    Ok(ExperimentResult {
        repetitions,
        aggregate,
        summary,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn metrics_bytes(metrics: &[RoundMetrics]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_metrics_csv(metrics, &mut buf)?;
    Ok(buf)
}

fn summary_bytes(result: &ExperimentResult) -> Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["rep"];
    header.extend(SUMMARY_FIELDS);
    wtr.write_record(&header)?;
    let rows = result
        .repetitions
        .iter()
        .map(|r| (r.rep.to_string(), Summary::of(r)))
        .chain(std::iter::once(("mean".to_string(), result.summary)));
    for (name, s) in rows {
        let mut record = vec![name];
        record.extend(s.fields().iter().map(f64::to_string));
        wtr.write_record(&record)?;
    }
    Ok(wtr.into_inner()?)
}

/// Writes the config echo, per-repetition metrics, parameter dumps and final
/// graphs, the per-round aggregate and the summary. File names depend only
/// on the repetition index.
pub fn write_outputs(config: &ExperimentConfig, result: &ExperimentResult, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = out_dir.join(name);
        write_file(&path, &bytes)?;
        written.push(path);
        Ok(())
    };
    put("config.txt".into(), config.to_string().into_bytes())?;
    for rep in &result.repetitions {
        let k = rep.rep;
        put(format!("rep{k}_metrics.csv"), metrics_bytes(&rep.metrics)?)?;
        put(format!("rep{k}_params.txt"), rep.params_dump().into_bytes())?;
        let mut graph = Vec::new();
        rep.final_graph.write_edge_list(&mut graph)?;
        put(format!("rep{k}_graph.txt"), graph)?;
    }
    put("metrics.csv".into(), metrics_bytes(&result.aggregate)?)?;
    put("summary.csv".into(), summary_bytes(result)?)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use fedcal_core::synthetic;

    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig::parse_str("n = 4\nm_v = 10\nt_max = 5\nrepetitions = 2\nseed = 3\n").unwrap()
    }

    fn blobs() -> Dataset {
        synthetic::gaussian_blobs(120, 2, 2, 4.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap()
    }

    #[test]
    fn streams_are_independent_per_purpose_and_rep() {
        use rand::Rng;
        let draw = |rep, p| stream(7, rep, p).random::<u64>();
        assert_eq!(draw(0, Purpose::Split), draw(0, Purpose::Split));
        assert_ne!(draw(0, Purpose::Split), draw(0, Purpose::Graph));
        assert_ne!(draw(0, Purpose::Split), draw(1, Purpose::Split));
    }

    #[test]
    fn setup_sizes() {
        let s = setup(&small_config(), &blobs(), 0).unwrap();
        assert_eq!(s.train.len(), 40);
        assert_eq!(s.test.len(), 80);
        assert_eq!(s.local.len(), 4);
        assert_eq!(s.graph.edge_count(), 3);
        let mut c = small_config();
        c.test_size = Some(81);
        assert!(setup(&c, &blobs(), 0).is_err());
    }

    #[test]
    fn single_repetition_aggregate_is_the_run() {
        let mut c = small_config();
        c.repetitions = 1;
        let r = run_experiment(&c, &blobs()).unwrap();
        assert_eq!(r.aggregate, r.repetitions[0].metrics);
        assert_eq!(r.summary, Summary::of(&r.repetitions[0]));
    }

    #[test]
    fn repetitions_replay_in_isolation() {
        let c = small_config();
        let all = run_experiment(&c, &blobs()).unwrap();
        let second = run_repetition(&c, &blobs(), 1).unwrap();
        assert_eq!(all.repetitions[1].metrics, second.metrics);
    }

    #[test]
    fn output_files() {
        let dir = tempfile::tempdir().unwrap();
        let c = small_config();
        let r = run_experiment(&c, &blobs()).unwrap();
        let files = write_outputs(&c, &r, dir.path()).unwrap();
        assert_eq!(files.len(), 1 + 3 * 2 + 2);
        let metrics = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        assert!(metrics.starts_with("t,train_err_mean,train_err_std,test_err_mean,test_err_std,soft_train_mean,"));
        assert_eq!(metrics.lines().count(), 6);
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert!(summary.lines().last().unwrap().starts_with("mean,"));
        let config = fs::read_to_string(dir.path().join("config.txt")).unwrap();
        assert_eq!(ExperimentConfig::parse_str(&config).unwrap(), c);
    }
}
