//! Command-line front end: config-driven, seeded, reproducible experiment
//! runners. Every command writes its outputs plus a manifest into an output
//! directory; reruns with the same seed produce byte-identical result files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::data::{generate_labels, make_splits, synthetic_inputs};
use crate::error::{Error, Result};
use crate::learning::{
    baseline_grid_search, baseline_predict, fit_implicit, mse_of, train_explicit, BaselineKind,
    Dataset, Split, TrainConfig, C_GRID,
};
use crate::mappings::{
    map_approximate, map_exact_nested, map_exact_simple, verify_equivalence, MappingReport,
};
use crate::models::{
    hardware_efficient_ansatz, layer_schedule, ExplicitModel, FeatureEncoding, ParamModel,
    ReuploadingModel,
};
use crate::seplab::run_separation_experiment;
use crate::sim::Observable;

const SEED_ENV: &str = "QMLBK_SEED";

#[derive(Parser)]
#[command(name = "qmlbk", version, about = "Quantum model laboratory")]
struct Cli {
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map a data re-uploading model onto an equivalent explicit model.
    Map(MapArgs),
    /// Run the parity learning-separation experiment.
    Parity(ParityArgs),
    /// Run the regression comparison of explicit, implicit and classical models.
    Regression(RegressionArgs),
    /// Run the cross-module invariant suite.
    Selftest(SelftestArgs),
}

/// Entry point; returns the process exit code (0 success, 1 runtime failure,
/// 2 usage error — the latter is raised by the argument parser itself).
pub fn run() -> i32 {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        // Ignore the error when a pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let outcome = match cli.command {
        Command::Map(args) => cmd_map(args),
        Command::Parity(args) => cmd_parity(args),
        Command::Regression(args) => cmd_regression(args),
        Command::Selftest(args) => cmd_selftest(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                // Bad invocations (unreadable/invalid inputs and configs)
                // are distinguished from failed checks.
                Error::Io(_) | Error::Json(_) | Error::Config(_) | Error::InvalidArgument(_) => 2,
                _ => 1,
            }
        }
    }
}

fn load_config<T: for<'de> Deserialize<'de> + Default>(path: &Option<PathBuf>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

/// Final seed: QMLBK_SEED beats the command line, which beats the config file.
fn resolve_seed(flag: Option<u64>, config_seed: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}={v} is not a valid seed"))),
        Err(_) => Ok(flag.unwrap_or(config_seed)),
    }
}

fn write_manifest<C: Serialize>(
    out_dir: &Path,
    command: &str,
    config: &C,
    seed: u64,
    started: Instant,
) -> Result<()> {
    let manifest = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": config,
        "wall_time_ms": started.elapsed().as_millis() as u64,
    });
    fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(())
}

fn write_json<T: Serialize>(out_dir: &Path, name: &str, value: &T) -> Result<()> {
    fs::write(
        out_dir.join(name),
        serde_json::to_string_pretty(value)? + "\n",
    )?;
    Ok(())
}

// ---------------------------------------------------------------- map ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum MapKindArg {
    Approx,
    Simple,
    Nested,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct MapConfig {
    kind: MapKindArg,
    /// Approximation budget for the bit-string mapping.
    delta: f64,
    /// Per-model failure budget for the nested mapping.
    delta_prime: f64,
    /// Random (x, theta) draws for the equivalence check.
    trials: usize,
    /// Deviation tolerance for exact mappings.
    tolerance: f64,
    rng_seed: u64,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            kind: MapKindArg::Simple,
            delta: 0.1,
            delta_prime: 0.1,
            trials: 50,
            tolerance: 1e-9,
            rng_seed: 0,
        }
    }
}

#[derive(Args)]
struct MapArgs {
    /// Source model JSON ({"circuit": ..., "observable": ...}).
    #[arg(long)]
    input: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out/map")]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<MapKindArg>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    delta_prime: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    circuit: crate::sim::Circuit,
    observable: Observable,
}

fn cmd_map(args: MapArgs) -> Result<i32> {
    let started = Instant::now();
    let mut cfg: MapConfig = load_config(&args.config)?;
    if let Some(k) = args.kind {
        cfg.kind = k;
    }
    if let Some(d) = args.delta {
        cfg.delta = d;
    }
    if let Some(d) = args.delta_prime {
        cfg.delta_prime = d;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    cfg.rng_seed = resolve_seed(args.seed, cfg.rng_seed)?;

    let text = fs::read_to_string(&args.input)?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", args.input.display())))?;
    let source = ReuploadingModel::new(file.circuit, file.observable)?;

    let (mapped, report): (ExplicitModel, MappingReport) = match cfg.kind {
        MapKindArg::Approx => map_approximate(&source, cfg.delta)?,
        MapKindArg::Simple => map_exact_simple(&source)?,
        MapKindArg::Nested => map_exact_nested(&source, cfg.delta_prime)?,
    };
    let tolerance = match cfg.kind {
        MapKindArg::Approx => cfg.delta,
        _ => cfg.tolerance,
    };
    let equivalence = verify_equivalence(
        &ParamModel::Reuploading(source),
        &ParamModel::Explicit(mapped.clone()),
        cfg.trials,
        tolerance,
        cfg.rng_seed,
    )?;

    fs::create_dir_all(&args.out)?;
    write_json(&args.out, "mapped_model.json", &mapped)?;
    write_json(&args.out, "mapping_report.json", &report)?;
    write_json(&args.out, "equivalence.json", &equivalence)?;
    write_manifest(&args.out, "map", &cfg, cfg.rng_seed, started)?;
    if equivalence.pass {
        Ok(0)
    } else {
        eprintln!(
            "equivalence check failed: max deviation {} > {}",
            equivalence.max_abs_diff, tolerance
        );
        Ok(1)
    }
}

// ------------------------------------------------------------- parity ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ParityConfig {
    d_list: Vec<usize>,
    delta: f64,
    trials: usize,
    rng_seed: u64,
}

impl Default for ParityConfig {
    fn default() -> Self {
        Self {
            d_list: vec![4, 6],
            delta: 0.1,
            trials: 200,
            rng_seed: 0,
        }
    }
}

#[derive(Args)]
struct ParityArgs {
    #[arg(long, default_value = "out/parity")]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn cmd_parity(args: ParityArgs) -> Result<i32> {
    let started = Instant::now();
    let mut cfg: ParityConfig = load_config(&args.config)?;
    if let Some(d) = args.d {
        cfg.d_list = d;
    }
    if let Some(d) = args.delta {
        cfg.delta = d;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    cfg.rng_seed = resolve_seed(args.seed, cfg.rng_seed)?;

    let report = run_separation_experiment(&cfg.d_list, cfg.delta, cfg.trials, cfg.rng_seed)?;
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("separation.csv"), report.to_csv())?;
    write_json(&args.out, "summary.json", &report)?;
    write_manifest(&args.out, "parity", &cfg, cfg.rng_seed, started)?;
    Ok(0)
}

// --------------------------------------------------------- regression ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegressionConfig {
    pub qubit_sizes: Vec<usize>,
    pub m_train: usize,
    pub m_val: usize,
    pub m_test: usize,
    pub steps: usize,
    pub lr_params: f64,
    pub lr_weight: f64,
    /// Directory with IDX files (train-images-idx3-ubyte[.gz],
    /// t10k-images-idx3-ubyte[.gz]); synthetic inputs are drawn when absent.
    pub data_dir: Option<PathBuf>,
    pub rng_seed: u64,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        Self {
            qubit_sizes: vec![2, 3],
            m_train: 100,
            m_val: 50,
            m_test: 50,
            steps: 80,
            lr_params: 0.01,
            lr_weight: 0.1,
            data_dir: None,
            rng_seed: 0,
        }
    }
}

#[derive(Args)]
struct RegressionArgs {
    #[arg(long, default_value = "out/regression")]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Qubit counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    m_train: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegressionRow {
    pub n: usize,
    pub model: String,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegressionSummary {
    pub rows: Vec<RegressionRow>,
    pub gram_nonsingular: Vec<(usize, bool)>,
    pub implicit_best_lambda: Vec<(usize, f64)>,
    pub synthetic_inputs: bool,
}

fn source_inputs(cfg: &RegressionConfig, n: usize) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>, bool)> {
    match &cfg.data_dir {
        Some(dir) => {
            let find = |stem: &str| -> Result<crate::data::ImageSet> {
                for name in [format!("{stem}"), format!("{stem}.gz")] {
                    let p = dir.join(&name);
                    if p.exists() {
                        return crate::data::load_idx(&p);
                    }
                }
                Err(Error::Config(format!(
                    "missing {stem}[.gz] in {}",
                    dir.display()
                )))
            };
            let train = find("train-images-idx3-ubyte")?;
            let test = find("t10k-images-idx3-ubyte")?;
            let train_px: Vec<Vec<f64>> = (0..train.len()).map(|i| train.as_floats(i)).collect();
            let test_px: Vec<Vec<f64>> = (0..test.len()).map(|i| test.as_floats(i)).collect();
            let pca = crate::data::fit_pca(&train_px, n)?;
            Ok((pca.project_all(&train_px)?, pca.project_all(&test_px)?, false))
        }
        None => {
            // Synthetic stand-in, sized like the scaled experiment.
            let pool = cfg.m_train.max(512);
            Ok((
                synthetic_inputs(pool, n, cfg.rng_seed ^ 0xA5A5),
                synthetic_inputs(pool, n, cfg.rng_seed ^ 0x5A5A),
                true,
            ))
        }
    }
}

/// One qubit size of the regression comparison; exposed for the acceptance
/// suite, which inspects the rows directly.
pub fn regression_for_size(cfg: &RegressionConfig, n: usize) -> Result<RegressionSummary> {
    let (train_pool_x, test_pool_x, synthetic) = source_inputs(cfg, n)?;
    let splits = make_splits(
        train_pool_x.len(),
        test_pool_x.len(),
        cfg.m_train,
        cfg.m_val,
        cfg.m_test,
        cfg.rng_seed,
    )?;
    let take = |pool: &[Vec<f64>], idx: &[usize]| -> Vec<Vec<f64>> {
        idx.iter().map(|&i| pool[i].clone()).collect()
    };
    let train_x = take(&train_pool_x, &splits.train);
    let val_x = take(&test_pool_x, &splits.validation);
    let test_x = take(&test_pool_x, &splits.test);

    // Normalize on the training split, then label with a hidden quantum model.
    let norm = crate::data::Normalizer::fit(&train_x)?;
    let train_x = norm.apply_all(&train_x);
    let val_x = norm.apply_all(&val_x);
    let test_x = norm.apply_all(&test_x);
    let (labels, _record) = generate_labels(
        &train_x,
        &[&val_x, &test_x],
        n,
        cfg.rng_seed.wrapping_add(n as u64),
    )?;
    let train = Dataset::new(train_x, labels[0].clone(), Split::Train)?;
    let val = Dataset::new(val_x, labels[1].clone(), Split::Validation)?;
    let test = Dataset::new(test_x, labels[2].clone(), Split::Test)?;

    let mut rows = Vec::new();
    let mut push = |model: &str, metric: &str, value: f64| {
        rows.push(RegressionRow {
            n,
            model: model.into(),
            metric: metric.into(),
            value,
        });
    };

    // Explicit model: same ansatz family as the labeling function, fresh seed.
    let encoding = FeatureEncoding::havlicek(n);
    let ansatz = hardware_efficient_ansatz(n, layer_schedule(n)?)?;
    let explicit = ExplicitModel::new(encoding.clone(), ansatz, Observable::single(n, 0, 'Z')?)?;
    let train_cfg = TrainConfig {
        steps: cfg.steps,
        lr_params: cfg.lr_params,
        lr_weight: cfg.lr_weight,
        rng_seed: cfg.rng_seed.wrapping_add(101),
        ..TrainConfig::default()
    };
    let (trained, result) = train_explicit(&explicit, &train, &train_cfg)?;
    push("explicit", "train_loss", *result.loss_trace.last().unwrap());
    push(
        "explicit",
        "test_loss",
        mse_of(|x| trained.eval_from_state(&trained.encoding.encode(x)?, &result.theta), &test)?,
    );

    // Implicit model at lambda = 0 and at the best lambda on the grid.
    let gram = encoding.gram_matrix(&train.inputs)?;
    let min_eig = {
        let m = gram.len();
        let mat = nalgebra::DMatrix::from_fn(m, m, |i, j| gram[i][j]);
        mat.symmetric_eigen().eigenvalues.min()
    };
    let gram_nonsingular = min_eig > 1e-10;
    let implicit0 = fit_implicit(encoding.clone(), &train, 0.0)?;
    push("implicit_lambda0", "train_loss", mse_of(|x| implicit0.eval(x), &train)?);
    push("implicit_lambda0", "test_loss", mse_of(|x| implicit0.eval(x), &test)?);

    let mut best: Option<(f64, f64)> = None; // (validation loss, lambda)
    for lambda in std::iter::once(0.0).chain(C_GRID.iter().map(|c| 1.0 / (2.0 * c))) {
        let model = fit_implicit(encoding.clone(), &train, lambda)?;
        let val_loss = mse_of(|x| model.eval(x), &val)?;
        if best.is_none_or(|(l, _)| val_loss < l) {
            best = Some((val_loss, lambda));
        }
    }
    let (_, best_lambda) = best.unwrap();
    let implicit = fit_implicit(encoding.clone(), &train, best_lambda)?;
    push("implicit", "train_loss", mse_of(|x| implicit.eval(x), &train)?);
    push("implicit", "test_loss", mse_of(|x| implicit.eval(x), &test)?);

    // Classical baselines.
    for (kind, name) in [
        (BaselineKind::Linear, "linear"),
        (BaselineKind::Gaussian, "gaussian"),
    ] {
        let fit = baseline_grid_search(kind, &train, &val)?;
        push(name, "train_loss", fit.train_loss);
        let pred = baseline_predict(&fit, &train, &test.inputs);
        let test_loss = pred
            .iter()
            .zip(&test.labels)
            .map(|(p, y)| (p - y).powi(2))
            .sum::<f64>()
            / test.labels.len() as f64;
        push(name, "test_loss", test_loss);
    }

    Ok(RegressionSummary {
        rows,
        gram_nonsingular: vec![(n, gram_nonsingular)],
        implicit_best_lambda: vec![(n, best_lambda)],
        synthetic_inputs: synthetic,
    })
}

fn cmd_regression(args: RegressionArgs) -> Result<i32> {
    let started = Instant::now();
    let mut cfg: RegressionConfig = load_config(&args.config)?;
    if let Some(n) = args.n {
        cfg.qubit_sizes = n;
    }
    if let Some(m) = args.m_train {
        cfg.m_train = m;
    }
    if let Some(s) = args.steps {
        cfg.steps = s;
    }
    if let Some(d) = args.data_dir {
        cfg.data_dir = Some(d);
    }
    cfg.rng_seed = resolve_seed(args.seed, cfg.rng_seed)?;
    if cfg.qubit_sizes.is_empty() {
        return Err(Error::InvalidArgument("no qubit sizes given".into()));
    }

    let mut all_rows = Vec::new();
    let mut gram_flags = Vec::new();
    let mut lambdas = Vec::new();
    let mut synthetic = false;
    for &n in &cfg.qubit_sizes {
        let summary = regression_for_size(&cfg, n)?;
        all_rows.extend(summary.rows);
        gram_flags.extend(summary.gram_nonsingular);
        lambdas.extend(summary.implicit_best_lambda);
        synthetic = summary.synthetic_inputs;
    }

    let mut csv = String::from("n,model,metric,value\n");
    for r in &all_rows {
        csv.push_str(&format!("{},{},{},{:.12}\n", r.n, r.model, r.metric, r.value));
    }
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("regression.csv"), csv)?;
    let summary = RegressionSummary {
        rows: all_rows,
        gram_nonsingular: gram_flags,
        implicit_best_lambda: lambdas,
        synthetic_inputs: synthetic,
    };
    write_json(&args.out, "summary.json", &summary)?;
    write_manifest(&args.out, "regression", &cfg, cfg.rng_seed, started)?;
    Ok(0)
}

// ------------------------------------------------------------ selftest ----

#[derive(Args)]
struct SelftestArgs {
    /// Only run checks whose name contains this substring.
    #[arg(long)]
    filter: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

fn cmd_selftest(args: SelftestArgs) -> Result<i32> {
    let seed = resolve_seed(args.seed, 0)?;
    let checks: Vec<(&str, fn(u64) -> Result<()>)> = vec![
        ("simulator.norm_preservation", selftest::norm_preservation),
        ("models.kernel_gram", selftest::kernel_gram),
        ("mappings.exact_equivalence", selftest::mapping_equivalence),
        ("learning.gradient_check", selftest::gradient_check),
        ("learning.krr_interpolation", selftest::krr_interpolation),
        ("seplab.dimension_certificate", selftest::dimension_certificate),
        ("seplab.parity_learner", selftest::parity_learner),
        ("data.pca_orthonormality", selftest::pca_orthonormality),
        ("data.split_determinism", selftest::split_determinism),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        if let Some(f) = &args.filter {
            if !name.contains(f.as_str()) {
                continue;
            }
        }
        match check(seed) {
            Ok(()) => println!("ok   {name}"),
            Err(e) => {
                println!("FAIL {name}: {e}");
                failures += 1;
            }
        }
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

mod selftest {
    use super::*;
    use crate::learning::{krr_fit, parity_learn};
    use crate::models::parity_model;
    use crate::seplab::{
        best_linear_mse, binomial, MixtureDistribution, ParityConcept,
    };
    use crate::sim::{AngleSource, Circuit};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ensure(cond: bool, msg: &str) -> Result<()> {
        if cond {
            Ok(())
        } else {
            Err(Error::InvalidArgument(msg.into()))
        }
    }

    pub fn norm_preservation(seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circuit = hardware_efficient_ansatz(3, 2)?;
        for _ in 0..10 {
            let theta: Vec<f64> = (0..circuit.num_parameter_slots)
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect();
            let state = circuit.run(&theta, &[])?;
            ensure(
                (state.norm_sq() - 1.0).abs() < 1e-12,
                "circuit broke normalization",
            )?;
        }
        Ok(())
    }

    pub fn kernel_gram(seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let enc = FeatureEncoding::havlicek(2);
        let points: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let gram = enc.gram_matrix(&points)?;
        for i in 0..10 {
            ensure((gram[i][i] - 1.0).abs() < 1e-12, "gram diagonal not 1")?;
            for j in 0..10 {
                ensure(
                    (gram[i][j] - gram[j][i]).abs() < 1e-12,
                    "gram not symmetric",
                )?;
            }
        }
        let m = nalgebra::DMatrix::from_fn(10, 10, |i, j| gram[i][j]);
        ensure(
            m.symmetric_eigen().eigenvalues.min() > -1e-9,
            "gram not PSD",
        )?;
        Ok(())
    }

    pub fn mapping_equivalence(seed: u64) -> Result<()> {
        let c = Circuit::new(1)
            .ry(0, AngleSource::param(0))
            .rz(0, AngleSource::data(0, 1.0))
            .ry(0, AngleSource::param(1));
        let src = ReuploadingModel::new(c, Observable::single(1, 0, 'X')?)?;
        let (mapped, _) = map_exact_simple(&src)?;
        let report = verify_equivalence(
            &ParamModel::Reuploading(src),
            &ParamModel::Explicit(mapped),
            25,
            1e-9,
            seed,
        )?;
        ensure(report.pass, "simple mapping deviated")
    }

    pub fn gradient_check(seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Circuit::new(2)
            .h(0)
            .ry(0, AngleSource::param(0))
            .rz(1, AngleSource::data(0, 1.0))
            .cz(0, 1)
            .rx(1, AngleSource::param(1));
        let model = ParamModel::Reuploading(ReuploadingModel::new(
            c,
            Observable::single(2, 1, 'Z')?,
        )?);
        let theta: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..6.28)).collect();
        let x = vec![rng.random_range(-1.0..1.0)];
        let grad = crate::learning::model_gradient(&model, &theta, &x)?;
        let h = 1e-5;
        for k in 0..2 {
            let mut tp = theta.clone();
            tp[k] += h;
            let mut tm = theta.clone();
            tm[k] -= h;
            let fd = (model.eval(&tp, &x)? - model.eval(&tm, &x)?) / (2.0 * h);
            ensure((grad[k] - fd).abs() < 1e-6, "shift rule deviates from FD")?;
        }
        Ok(())
    }

    pub fn krr_interpolation(_seed: u64) -> Result<()> {
        let gram = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let alpha = krr_fit(&gram, &[1.0, -2.0, 0.5], 0.0)?;
        ensure(
            (alpha[0] - 1.0).abs() < 1e-10 && (alpha[1] + 2.0).abs() < 1e-10,
            "identity-gram KRR failed to interpolate",
        )
    }

    pub fn dimension_certificate(seed: u64) -> Result<()> {
        let enc = FeatureEncoding::havlicek(4);
        let report = best_linear_mse(&enc, 4, 2, None, seed)?;
        ensure(
            report.epsilon_avg + report.span_dim as f64 / binomial(4, 2) >= 1.0 - 1e-9,
            "span certificate violated",
        )
    }

    pub fn parity_learner(seed: u64) -> Result<()> {
        let d = 5;
        let concept = ParityConcept::new(d, vec![0, 2, 4])?;
        let dist = MixtureDistribution::new(concept.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let outcome = parity_learn(
            || {
                let x = dist.sample(&mut rng);
                let y = concept.label(&x);
                (x, y)
            },
            d,
            0.1,
        )?;
        ensure(outcome.subset == concept.subset, "learner missed the subset")?;
        let model = parity_model(d)?;
        let theta = crate::models::parity_params(d, &concept.subset);
        for b in 0..1usize << d {
            let x = crate::seplab::enumerate_signs(d, b);
            ensure(
                (model.eval(&theta, &x)? - concept.label(&x)).abs() < 1e-9,
                "single-qubit model is not exact on parities",
            )?;
        }
        Ok(())
    }

    pub fn pca_orthonormality(seed: u64) -> Result<()> {
        let x = synthetic_inputs(40, 5, seed);
        let pca = crate::data::fit_pca(&x, 3)?;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = pca.components[i]
                    .iter()
                    .zip(&pca.components[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                ensure((dot - expect).abs() < 1e-8, "PCA basis not orthonormal")?;
            }
        }
        ensure(
            pca.explained_variances.windows(2).all(|w| w[0] >= w[1]),
            "variances out of order",
        )
    }

    pub fn split_determinism(seed: u64) -> Result<()> {
        ensure(
            make_splits(300, 100, 50, 10, 10, seed)? == make_splits(300, 100, 50, 10, 10, seed)?,
            "splits not reproducible",
        )
    }
}
