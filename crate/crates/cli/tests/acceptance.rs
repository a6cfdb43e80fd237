//! Acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fedcal_cli::{run_experiment, ExperimentConfig};
use fedcal_core::data::{FeatureSchema, FeatureSpec};
use fedcal_core::network::{add_random_edges, full_graph, random_tree};
use fedcal_core::partition::first_principal_component;
use fedcal_core::{
    lrc, m0_heuristic, posterior, prob_stat_map, project, rc, rc_update, stat_map_dataset, synthetic, CrcConfig,
    Dataset, FeatureParams, GenerativeClassifier, Graph, NaiveBayes, NbParams, Simulation, StatsVector,
};
use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (usize, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- fixtures

/// Schema with up to `max_d` features of random kind and `2..=max_r` classes.
fn random_schema(rng: &mut impl Rng, max_d: usize, max_r: usize) -> Arc<FeatureSchema> {
    let d = rng.random_range(1..=max_d);
    let features = (0..d)
        .map(|_| {
            if rng.random_bool(0.5) {
                FeatureSpec::Discrete {
                    cardinality: rng.random_range(2..=4),
                }
            } else {
                FeatureSpec::Continuous
            }
        })
        .collect();
    Arc::new(FeatureSchema::new(features, rng.random_range(2..=max_r)).unwrap())
}

fn random_instance(schema: &FeatureSchema, rng: &mut impl Rng, spread: f64) -> Vec<f64> {
    schema
        .features()
        .iter()
        .map(|f| match f {
            FeatureSpec::Discrete { cardinality } => rng.random_range(0..*cardinality) as f64,
            FeatureSpec::Continuous => rng.random_range(-spread..spread),
        })
        .collect()
}

fn random_dataset(schema: &Arc<FeatureSchema>, m: usize, rng: &mut impl Rng) -> Dataset {
    let rows = (0..m).map(|_| random_instance(schema, rng, 3.0)).collect();
    let labels = (0..m).map(|_| rng.random_range(0..schema.classes())).collect();
    Dataset::new(schema.clone(), rows, labels).unwrap()
}

/// Statistics of ess `m0` blending the uniform initialization with random data.
fn healthy_stats(model: &NaiveBayes, m0: f64, rng: &mut impl Rng) -> StatsVector {
    let data = random_dataset(model.schema(), rng.random_range(5..40), rng);
    let a: f64 = rng.random_range(0.1..0.9);
    let mut s = model.uniform_init(m0 * (1.0 - a)).unwrap();
    s.add_scaled(&stat_map_dataset(model, &data).unwrap(), a * m0 / data.len() as f64);
    s
}

/// One calibration step without projection.
fn raw_step(model: &NaiveBayes, s: &StatsVector, data: &Dataset, rate: f64) -> StatsVector {
    let params = model.param_map(s).unwrap();
    let mut out = s.clone();
    out.add_scaled(&stat_map_dataset(model, data).unwrap(), rate);
    out.add_scaled(&prob_stat_map(model, data, &params), -rate);
    out
}

fn is_feasible(model: &NaiveBayes, s: &StatsVector) -> bool {
    project(model, s) == *s
}

// ------------------------------------------------- criteria 1 and 2: equivalence

struct Deviation {
    params: f64,
    scaled_stats: f64,
}

fn equivalence_run(parts: Vec<Dataset>, lr: f64, rounds: usize) -> Deviation {
    let model = NaiveBayes::new(parts[0].schema().clone());
    let global = Dataset::concat(&parts).unwrap();
    let (m, n) = (global.len(), parts.len());
    let m0 = m0_heuristic(m, lr, n);
    // one extra round so that s̄ at round t + 1 can be compared with s_g at t = rounds
    let trace = rc(&model, &global, lr, rounds, &model.uniform_init(m as f64).unwrap()).unwrap();
    let config = CrcConfig {
        t_max: rounds + 1,
        iter: 1,
        m0,
        ..Default::default()
    };
    let mut sim = Simulation::new(&model, config, parts).unwrap();
    let graph = full_graph(n).unwrap();
    let mut dev = Deviation {
        params: 0.0,
        scaled_stats: 0.0,
    };
    for t in 1..=rounds + 1 {
        let aggregated = sim.step(&graph).unwrap();
        let reference = &trace.iterations()[t - 1];
        let want = reference.params.components();
        for agg in &aggregated {
            if t <= rounds {
                let got = model.param_map(agg).unwrap().components();
                for (a, b) in got.iter().zip(&want) {
                    dev.params = dev.params.max(rel(*a, *b));
                }
            }
            let scaled = agg.scaled(m as f64 / m0);
            dev.scaled_stats = dev
                .scaled_stats
                .max(scaled.max_abs_diff(&reference.stats) / reference.stats.max_abs());
        }
    }
    dev
}

/// Partitions of increasing hostility: random, label-sorted, sorted on a
/// continuous feature, and wildly unequal sizes.
fn adversarial_partitions(ds: &Dataset, n: usize, seed: u64) -> Vec<(&'static str, Vec<Dataset>)> {
    let m = ds.len();
    let chunks = |idx: &[usize]| -> Vec<Dataset> {
        let base = m / n;
        (0..n)
            .map(|v| {
                let end = if v + 1 == n { m } else { (v + 1) * base };
                ds.subset(&idx[v * base..end])
            })
            .collect()
    };
    let mut shuffled: Vec<usize> = (0..m).collect();
    shuffled.shuffle(&mut rng(seed));
    let mut by_label: Vec<usize> = (0..m).collect();
    by_label.sort_by_key(|&i| ds.label(i));
    let cont = ds
        .schema()
        .features()
        .iter()
        .position(|f| !f.is_discrete())
        .expect("mixed schema has a continuous feature");
    let mut by_feature: Vec<usize> = (0..m).collect();
    by_feature.sort_by(|&a, &b| ds.instance(a)[cont].total_cmp(&ds.instance(b)[cont]));
    // node v gets 1 instance except the last, which takes the remainder
    let skewed: Vec<Dataset> = (0..n)
        .map(|v| {
            if v + 1 < n {
                ds.subset(&by_label[v..v + 1])
            } else {
                ds.subset(&by_label[n - 1..])
            }
        })
        .collect();
    vec![
        ("iid", chunks(&shuffled)),
        ("label-sorted", chunks(&by_label)),
        ("feature-sorted", chunks(&by_feature)),
        ("skewed-sizes", skewed),
    ]
}

fn equivalence_grid() -> (f64, f64, Duration) {
    let start = Instant::now();
    let ds = synthetic::mixed(500, 3, 2, 3, &mut rng(2024)).unwrap();
    let (mut p, mut s) = (0.0f64, 0.0f64);
    for n in [2, 5, 10] {
        for lr in [0.05, 0.2] {
            for (_, parts) in adversarial_partitions(&ds, n, n as u64) {
                let d = equivalence_run(parts, lr, 20);
                p = p.max(d.params);
                s = s.max(d.scaled_stats);
            }
        }
    }
    (p, s, start.elapsed())
}

fn criterion_1(grid: &(f64, f64, Duration)) -> Outcome {
    let (p, _, elapsed) = *grid;
    check(
        p < 1e-9 && elapsed < Duration::from_secs(10),
        format!(
            "max relative parameter deviation {p:.2e} (< 1e-9) over n in {{2,5,10}}, lr in {{0.05,0.2}}, 4 partitions, t = 1..20; {:.2} s (< 10 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2(grid: &(f64, f64, Duration)) -> Outcome {
    let s = grid.1;
    check(
        s < 1e-9,
        format!("max ‖(m/m0)·s̄(t+1) − s_g(t)‖∞ / ‖s_g(t)‖∞ = {s:.2e} (< 1e-9), t = 0..20"),
    )
}

// ------------------------------------------------- criteria 3 and 4: convergence

fn blobs_runs(overrides: &str) -> Result<(f64, f64, f64, Duration), String> {
    let start = Instant::now();
    let (mut gap, mut std, mut worst_gap) = (0.0, 0.0, f64::NEG_INFINITY);
    for seed in 1..=5u64 {
        let data = synthetic::gaussian_blobs(5000, 2, 2, 4.0, &mut rng(seed)).unwrap();
        let text = format!("repetitions = 1\nseed = {seed}\n{overrides}");
        let config = ExperimentConfig::parse_str(&text).map_err(|e| format!("{e:#}"))?;
        let result = run_experiment(&config, &data).map_err(|e| format!("{e:#}"))?;
        gap += result.summary.test_gap / 5.0;
        std += result.summary.crc_test_std / 5.0;
        worst_gap = worst_gap.max(result.summary.test_gap);
    }
    Ok((gap, std, worst_gap, start.elapsed()))
}

fn criterion_3() -> Outcome {
    let (gap, std, worst, elapsed) = blobs_runs("")?;
    check(
        gap < 0.01 && std < 0.01 && elapsed < Duration::from_secs(60),
        format!(
            "blobs, random tree, n = 50, m_v = 50, t = 64: mean test gap {gap:.4} (< 0.01, worst seed {worst:.4}), cross-node test std {std:.4} (< 0.01); {:.1} s (< 60 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_4() -> Outcome {
    let (gap, std, worst, elapsed) = blobs_runs("partition = drift_y\ntopology = tree+80\n")?;
    check(
        gap < 0.05 && elapsed < Duration::from_secs(60),
        format!(
            "blobs, drift_y, tree+80, n = 50: mean test gap {gap:.4} (< 0.05, worst seed {worst:.4}), std {std:.4}; {:.1} s (< 60 s)",
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------- criterion 5: ess

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let (mut counted, mut skipped, mut worst) = (0usize, 0usize, 0.0f64);
    while counted < 1000 {
        if skipped > 5000 {
            return Err(format!("only {counted} of 1000 calls avoided every floor"));
        }
        let model = NaiveBayes::new(random_schema(&mut r, 4, 3));
        let m0: f64 = 10f64.powf(r.random_range(1.5..4.0));
        let s = healthy_stats(&model, m0, &mut r);
        let data = random_dataset(model.schema(), r.random_range(1..30), &mut r);
        let out = match counted % 3 {
            0 => {
                let lr = r.random_range(0.01..1.0);
                let raw = raw_step(&model, &s, &data, lr);
                if !is_feasible(&model, &raw) {
                    skipped += 1;
                    continue;
                }
                let params = model.param_map(&s).unwrap();
                rc_update(&model, &s, &data, lr, &params).unwrap()
            }
            1 => {
                let iter = r.random_range(1..4);
                let mut raw = s.clone();
                let mut feasible = true;
                for _ in 0..iter {
                    raw = raw_step(&model, &raw, &data, 1.0);
                    feasible &= is_feasible(&model, &raw);
                }
                if !feasible {
                    skipped += 1;
                    continue;
                }
                lrc(&model, &s, &data, iter).unwrap().1
            }
            _ => {
                let k = r.random_range(2..8);
                let inputs: Vec<StatsVector> = (0..k).map(|_| healthy_stats(&model, m0, &mut r)).collect();
                StatsVector::mean(inputs.iter()).unwrap()
            }
        };
        worst = worst.max((out.ess() - s.ess()).abs() / s.ess());
        counted += 1;
    }
    check(
        worst < 1e-9,
        format!("max |ess(out) − ess(in)| / ess(in) = {worst:.2e} (< 1e-9) over 1000 calls ({skipped} floor-triggering draws skipped)"),
    )
}

// --------------------------------------------------- criterion 6: fixed points

fn fixed_point_cases() -> Vec<(&'static str, NaiveBayes, StatsVector, Dataset)> {
    let mut r = rng(6);
    let mut cases = Vec::new();

    // far-apart continuous blobs
    let schema = Arc::new(FeatureSchema::new(vec![FeatureSpec::Continuous], 2).unwrap());
    let rows: Vec<Vec<f64>> = (0..40)
        .map(|i| vec![if i % 2 == 0 { -50.0 } else { 50.0 } + r.random_range(-1.0..1.0)])
        .collect();
    let labels = (0..40).map(|i| i % 2).collect();
    cases.push(("continuous", schema, rows, labels, 1.0));

    // a discrete feature that equals the class
    let schema = Arc::new(FeatureSchema::new(vec![FeatureSpec::Discrete { cardinality: 3 }], 3).unwrap());
    let rows = (0..30).map(|i| vec![(i % 3) as f64]).collect();
    let labels = (0..30).map(|i| i % 3).collect();
    cases.push(("discrete", schema, rows, labels, 1e9));

    // both, plus an uninformative continuous feature
    let schema = Arc::new(
        FeatureSchema::new(
            vec![
                FeatureSpec::Discrete { cardinality: 2 },
                FeatureSpec::Continuous,
                FeatureSpec::Continuous,
            ],
            2,
        )
        .unwrap(),
    );
    let rows = (0..50)
        .map(|i| {
            let y = (i % 2) as f64;
            vec![y, 80.0 * y + r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)]
        })
        .collect();
    let labels = (0..50).map(|i| i % 2).collect();
    cases.push(("mixed", schema, rows, labels, 1e6));

    cases
        .into_iter()
        .map(|(name, schema, rows, labels, scale)| {
            let ds = Dataset::new(schema.clone(), rows, labels).unwrap();
            let model = NaiveBayes::new(schema);
            let s = project(&model, &stat_map_dataset(&model, &ds).unwrap().scaled(scale));
            (name, model, s, ds)
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    let mut names = Vec::new();
    for (name, model, s, ds) in fixed_point_cases() {
        let params = model.param_map(&s).unwrap();
        let soft = fedcal_core::evaluate(&model, &params, &ds).unwrap().soft;
        if soft >= 1e-12 {
            return Err(format!("{name}: precondition failed, soft error {soft:e}"));
        }
        for lr in [0.05, 0.5, 1.0] {
            worst = worst.max(rc_update(&model, &s, &ds, lr, &params).unwrap().max_abs_diff(&s));
        }
        for iter in [1, 2, 5] {
            worst = worst.max(lrc(&model, &s, &ds, iter).unwrap().1.max_abs_diff(&s));
        }
        names.push(name);
    }
    check(
        worst <= 1e-12,
        format!(
            "max componentwise change {worst:.2e} (≤ 1e-12) for rc_update and lrc on {}",
            names.join(", ")
        ),
    )
}

// ------------------------------------------ criterion 7: posterior and mappings

/// Posterior as a plain normalized product of densities.
fn direct_posterior(params: &NbParams, x: &[f64]) -> Vec<f64> {
    let mut joint: Vec<f64> = params.class_probs().to_vec();
    for (f, &xi) in params.features().iter().zip(x) {
        for (y, j) in joint.iter_mut().enumerate() {
            *j *= match f {
                FeatureParams::Categorical { cardinality, probs } => probs[y * cardinality + xi as usize],
                FeatureParams::Gaussian { mean, var } => {
                    (-(xi - mean[y]).powi(2) / (2.0 * var[y])).exp() / (2.0 * std::f64::consts::PI * var[y]).sqrt()
                }
            };
        }
    }
    let total: f64 = joint.iter().sum();
    joint.iter().map(|j| j / total).collect()
}

/// Exact rational double sum over instances and classes.
fn rational_prob_stats(model: &NaiveBayes, params: &NbParams, ds: &Dataset) -> Vec<f64> {
    let rat = |v: f64| BigRational::from_float(v).unwrap();
    let mut acc = vec![BigRational::zero(); model.stats_len()];
    for x in ds.instances() {
        let post = direct_posterior(params, x);
        for (y, &py) in post.iter().enumerate() {
            let p = rat(py);
            acc[y] += &p;
            for (i, (f, &xi)) in model.schema().features().iter().zip(x).enumerate() {
                let off = model.offset(i);
                match f {
                    FeatureSpec::Discrete { cardinality } => acc[off + y * cardinality + xi as usize] += &p,
                    FeatureSpec::Continuous => {
                        let xr = rat(xi);
                        acc[off + 3 * y] += &p;
                        acc[off + 3 * y + 1] += &p * &xr;
                        acc[off + 3 * y + 2] += &p * &xr * &xr;
                    }
                }
            }
        }
    }
    acc.iter().map(|v| v.to_f64().unwrap()).collect()
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let mut norm_dev = 0.0f64;
    for _ in 0..10_000 {
        let model = NaiveBayes::new(random_schema(&mut r, 6, 5));
        let params = model
            .param_map(&healthy_stats(&model, r.random_range(1.0..1e4), &mut r))
            .unwrap();
        let x = random_instance(model.schema(), &mut r, 200.0);
        norm_dev = norm_dev.max((posterior(&model, &params, &x).iter().sum::<f64>() - 1.0).abs());
    }

    let mut scale_dev = 0.0f64;
    for _ in 0..1000 {
        let model = NaiveBayes::new(random_schema(&mut r, 6, 5));
        let s = healthy_stats(&model, r.random_range(1.0..1e4), &mut r);
        let c = 10f64.powf(r.random_range(-3.0..3.0));
        let a = model.param_map(&s).unwrap().components();
        let b = model.param_map(&s.scaled(c)).unwrap().components();
        for (x, y) in a.iter().zip(&b) {
            scale_dev = scale_dev.max((x - y).abs() / x.abs().max(1.0));
        }
    }

    let mut oracle_dev = 0.0f64;
    for _ in 0..200 {
        let model = NaiveBayes::new(random_schema(&mut r, 3, 3));
        let params = model
            .param_map(&healthy_stats(&model, r.random_range(1.0..100.0), &mut r))
            .unwrap();
        let ds = random_dataset(model.schema(), r.random_range(1..15), &mut r);
        let got = prob_stat_map(&model, &ds, &params);
        for (g, w) in got.values().iter().zip(rational_prob_stats(&model, &params, &ds)) {
            oracle_dev = oracle_dev.max((g - w).abs() / w.abs().max(1.0));
        }
    }

    check(
        norm_dev <= 1e-12 && scale_dev <= 1e-12 && oracle_dev <= 1e-12,
        format!(
            "posterior |Σp − 1| max {norm_dev:.2e} over 10^4 draws; param_map scaling deviation {scale_dev:.2e}; prob_stat_map vs exact oracle {oracle_dev:.2e} (all ≤ 1e-12)"
        ),
    )
}

// ---------------------------------------------------------- criterion 8: PCA

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = r.random_range(1..=5);
        let m = r.random_range(20..200);
        let mixing: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..d).map(|_| r.random_range(-1.0..1.0)).collect())
            .collect();
        let scales: Vec<f64> = (0..d).map(|k| 3.0 / (k + 1) as f64).collect();
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let z: Vec<f64> = (0..d).map(|k| scales[k] * r.random_range(-1.0..1.0)).collect();
                (0..d)
                    .map(|j| (0..d).map(|k| z[k] * mixing[k][j]).sum::<f64>() + 5.0)
                    .collect()
            })
            .collect();
        let pc = first_principal_component(&rows).map_err(|e| e.to_string())?;

        let mean: Vec<f64> = (0..d)
            .map(|j| rows.iter().map(|row| row[j]).sum::<f64>() / m as f64)
            .collect();
        let cov = DMatrix::from_fn(d, d, |a, b| {
            rows.iter()
                .map(|row| (row[a] - mean[a]) * (row[b] - mean[b]))
                .sum::<f64>()
                / (m - 1) as f64
        });
        let eig = SymmetricEigen::new(cov);
        let top = eig.eigenvalues.imax();
        let v = eig.eigenvectors.column(top);
        let dot: f64 = (0..d).map(|j| v[j] * pc[j]).sum::<f64>().abs().min(1.0);
        worst = worst.max(dot.acos());
    }
    check(
        worst < 1e-6,
        format!("max angle to the leading eigenvector {worst:.2e} rad (< 1e-6) over 100 matrices, d ≤ 5"),
    )
}

// ------------------------------------------------------- criterion 9: graphs

fn bfs_reaches_all(g: &Graph) -> bool {
    let mut adj = vec![Vec::new(); g.n()];
    for (u, v) in g.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; g.n()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !std::mem::replace(&mut seen[v], true) {
                queue.push_back(v);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    for i in 0..1000 {
        let n = r.random_range(2..=120);
        let tree = random_tree(n, &mut r).map_err(|e| e.to_string())?;
        if tree.edge_count() != n - 1 {
            return Err(format!("tree {i}: {} edges for n = {n}", tree.edge_count()));
        }
        if !bfs_reaches_all(&tree) {
            return Err(format!("tree {i}: disconnected"));
        }
        let possible = (n * (n - 1) / 2) as f64;
        if tree.sparseness() != (n - 1) as f64 / possible || tree.sparseness() != 2.0 / n as f64 {
            return Err(format!("tree {i}: sparseness {} for n = {n}", tree.sparseness()));
        }
        let absent = n * (n - 1) / 2 - (n - 1);
        let k = r.random_range(0..=absent.min(200));
        let dense = add_random_edges(&tree, k, &mut r).map_err(|e| e.to_string())?;
        let edges: Vec<(usize, usize)> = dense.edges().collect();
        let mut unique = edges.clone();
        unique.sort_unstable();
        unique.dedup();
        if unique.len() != edges.len() || edges.len() != n - 1 + k || !tree.edges().all(|(u, v)| dense.has_edge(u, v)) {
            return Err(format!("tree {i}: adding {k} edges gave {} edges", edges.len()));
        }
    }
    Ok("1000 random trees: n − 1 edges, connected by BFS, sparseness = |E| / C(n,2) = 2/n exactly; add_random_edges adds exactly k new distinct edges".into())
}

// --------------------------------------------------- criterion 10: determinism

fn fedcal(args: &[&str], dir: &Path, threads: &str) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fedcal"))
        .args(args)
        .current_dir(dir)
        .env("RAYON_NUM_THREADS", threads)
        .env_remove("FEDCAL_OUT_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    fedcal(
        &[
            "gendata", "--kind", "mixed", "--m", "1200", "--seed", "3", "--out", "data.csv",
        ],
        dir,
        "1",
    )?;
    let config = "data = data.csv\nn = 20\nm_v = 30\nt_max = 16\nrepetitions = 3\ntopology = tree+5\npartition = drift_xy\ndelta = 4\nseed = 99\n";
    fs::write(dir.join("exp.txt"), config).map_err(|e| e.to_string())?;

    fedcal(&["run", "--config", "exp.txt", "--out", "a"], dir, "8")?;
    fedcal(&["run", "--config", "exp.txt", "--out", "b"], dir, "8")?;
    fedcal(
        &["run", "--config", "exp.txt", "--parallel", "false", "--out", "c"],
        dir,
        "1",
    )?;
    let (a, b, c) = (
        read_dir_sorted(&dir.join("a")),
        read_dir_sorted(&dir.join("b")),
        read_dir_sorted(&dir.join("c")),
    );
    if a.len() != 3 * 3 + 3 {
        return Err(format!("expected 12 output files, found {}", a.len()));
    }
    if a != b {
        return Err("two parallel runs differ".into());
    }
    // the config echo records the parallel flag; everything else must match
    let strip = |v: &[(String, Vec<u8>)]| v.iter().filter(|(n, _)| n != "config.txt").cloned().collect::<Vec<_>>();
    check(
        strip(&a) == strip(&c),
        format!(
            "{} output files byte-identical across two 8-thread runs; metrics, dumps and graphs identical to a sequential run",
            a.len()
        ),
    )
}

// ------------------------------------------------ criterion 11: uniform init

fn criterion_11() -> Outcome {
    let mut r = rng(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let model = NaiveBayes::new(random_schema(&mut r, 6, 5));
        let m0 = 10f64.powf(r.random_range(-2.0..6.0));
        let params = model.param_map(&model.uniform_init(m0).unwrap()).unwrap();
        let x = random_instance(model.schema(), &mut r, 100.0);
        let r_inv = 1.0 / model.classes() as f64;
        for p in posterior(&model, &params, &x) {
            worst = worst.max((p - r_inv).abs());
        }
    }
    check(
        worst <= 1e-12,
        format!("max |p(y|x) − 1/r| = {worst:.2e} (≤ 1e-12) at 100 probes over random mixed schemas"),
    )
}

fn main() {
    let started = Instant::now();
    let grid = equivalence_grid();
    let criteria: Vec<Criterion> = vec![
        (1, "full-graph equivalence", Box::new(|| criterion_1(&grid))),
        (2, "scaling identity", Box::new(|| criterion_2(&grid))),
        (3, "convergence on separated blobs", Box::new(criterion_3)),
        (4, "label-drift resilience", Box::new(criterion_4)),
        (5, "ess conservation", Box::new(criterion_5)),
        (6, "fixed points", Box::new(criterion_6)),
        (7, "posterior and mapping correctness", Box::new(criterion_7)),
        (8, "principal component oracle", Box::new(criterion_8)),
        (9, "graph properties", Box::new(criterion_9)),
        (10, "determinism", Box::new(criterion_10)),
        (11, "uniform initialization", Box::new(criterion_11)),
    ];
    let mut failed = 0;
    for (id, name, run) in &criteria {
        let outcome =
            std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:>2} ({name}): {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        criteria.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
