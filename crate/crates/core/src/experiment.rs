//! End-to-end runs: repeated LHS trainings, min-index selection, Monte Carlo
//! and exact interval references, metrics, and the files written for a run.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::benchmarks::{default_sample_count, sample_training_set_with, BenchmarkSpec, TransferFunction};
use crate::dataset::{ingest, ExternalDataset};
use crate::error::{Error, Result};
use crate::interval::IntervalVector;
use crate::kriging::{train_all, BetaMode, BetaSearch, BetaStrategy, KrigingConfig, KrigingModel, TrainingSet};
use crate::mc::{mc_band, MCBand, McOptions};
use crate::metrics::{
    inclusion_metric_with, pattern_features, select_min_delta, tolerance_index_with, FeatureIntervals, InclusionReport,
    ReportingConvention,
};
use crate::sampling::{substream, Tolerance, ToleranceSpec};
use crate::surrogate::{bounds_curve, BoundsCurve};

/// What is being analysed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Benchmark(BenchmarkSpec),
    External {
        dataset: PathBuf,
        /// Held-out realizations standing in for the Monte Carlo band.
        validation: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: Source,
    /// Training samples per repeat; six per parameter when absent.
    pub s: Option<usize>,
    /// Relative tolerance. For external data, overrides the per-parameter
    /// tolerances of the file when present.
    pub delta: Option<f64>,
    /// Monte Carlo draws.
    pub m: usize,
    /// Independent trainings among which the narrowest bounds are kept.
    pub l: usize,
    pub seed: u64,
    pub kriging: KrigingConfig,
    /// Adds the nominal point to the Monte Carlo draws.
    pub include_nominal: bool,
}

impl ExperimentConfig {
    pub const DEFAULT_M: usize = 10_000;
    pub const DEFAULT_L: usize = 100;

    /// Kriging settings used by the bounds pipeline: one `β` for the whole
    /// grid, searched in standardized units with a floor.
    pub fn default_kriging() -> KrigingConfig {
        KrigingConfig {
            alpha: 2.0,
            beta: BetaStrategy::Optimize(BetaSearch::interval_calibrated()),
            mode: BetaMode::Shared,
            nugget: 1e-10,
        }
    }

    pub fn benchmark(spec: BenchmarkSpec, delta: f64, seed: u64) -> Self {
        ExperimentConfig {
            source: Source::Benchmark(spec),
            s: None,
            delta: Some(delta),
            m: Self::DEFAULT_M,
            l: Self::DEFAULT_L,
            seed,
            kriging: Self::default_kriging(),
            include_nominal: false,
        }
    }

    pub fn external(dataset: PathBuf, validation: Option<PathBuf>) -> Self {
        ExperimentConfig {
            source: Source::External { dataset, validation },
            s: None,
            delta: None,
            m: Self::DEFAULT_M,
            l: 1,
            seed: 0,
            kriging: Self::default_kriging(),
            include_nominal: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(Error::InvalidArgument("L must be at least 1".into()));
        }
        if self.s == Some(0) {
            return Err(Error::InvalidArgument("S must be at least 1".into()));
        }
        if self.m == 0 {
            return Err(Error::InvalidArgument("M must be at least 1".into()));
        }
        if let Some(d) = self.delta {
            if !(0.0..1.0).contains(&d) {
                return Err(Error::InvalidArgument(format!("tolerance must lie in [0, 1), got {d}")));
            }
        }
        Ok(())
    }
}

/// Metrics of one bounds curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMetrics {
    pub delta: f64,
    /// Absent when the reference band has zero width (nothing to compare).
    pub inclusion: Option<InclusionReport>,
    pub features: Option<FeatureIntervals>,
}

/// Everything computed for one response grid (one cut).
#[derive(Debug, Clone)]
pub struct CutResult {
    pub label: String,
    pub theta_grid: Vec<f64>,
    pub nominal: Vec<f64>,
    pub ia_lbe: BoundsCurve,
    pub ia_lbe_metrics: CurveMetrics,
    /// Repeat whose bounds were kept.
    pub selected_repeat: u64,
    pub training: TrainingSet,
    pub models: Vec<KrigingModel>,
    pub mc: Option<MCBand>,
    pub mc_metrics: Option<CurveMetrics>,
    pub ia_e: Option<BoundsCurve>,
    pub ia_e_metrics: Option<CurveMetrics>,
    pub nominal_features: Option<FeatureIntervals>,
    pub convention: ReportingConvention,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub bounds: IntervalVector,
    pub cuts: Vec<CutResult>,
    pub runtime_seconds: f64,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.inspect_err(|_| log::error!("stage {name} failed"))
}

fn curve_metrics(
    curve: &BoundsCurve,
    mc: Option<&MCBand>,
    nominal: &[f64],
    conv: ReportingConvention,
    features: bool,
) -> Result<CurveMetrics> {
    let delta = tolerance_index_with(curve, nominal, conv)?;
    let inclusion = match mc {
        Some(mc) => match inclusion_metric_with(curve, mc, nominal, conv) {
            Ok(r) => Some(r),
            Err(Error::ZeroNormalisation(why)) => {
                info!("inclusion metric undefined: {why}");
                None
            }
            Err(e) => return Err(e),
        },
        None => None,
    };
    let features = if features { Some(pattern_features(curve, nominal)?) } else { None };
    Ok(CurveMetrics { delta, inclusion, features })
}

/// Trains `l` surrogates on independent LHS designs and keeps the one with
/// the smallest tolerance index.
pub fn best_of_l(
    tf: &dyn TransferFunction,
    bounds: &IntervalVector,
    nominal_curve: &[f64],
    s: usize,
    l: usize,
    seed: u64,
    kriging: &KrigingConfig,
) -> Result<(BoundsCurve, u64, TrainingSet, Vec<KrigingModel>)> {
    let conv = tf.convention();
    let runs: Vec<(BoundsCurve, u64, TrainingSet, Vec<KrigingModel>)> = (0..l as u64)
        .into_par_iter()
        .map(|r| {
            let ts = sample_training_set_with(tf, bounds, s, &mut substream(seed, r))?;
            let models = train_all(&ts, kriging)?;
            let curve = bounds_curve(&models, ts.theta_grid(), bounds)?;
            Ok((curve, r, ts, models))
        })
        .collect::<Result<_>>()?;
    let (_, best, _) =
        select_min_delta(runs.iter().map(|(c, r, _, _)| (c.clone(), *r)).collect(), nominal_curve, conv)?;
    let run = runs.into_iter().find(|(_, r, _, _)| *r == best).expect("selected repeat exists");
    Ok(run)
}

/// Runs the full pipeline described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let start = Instant::now();
    let (bounds, cuts) = match &config.source {
        Source::Benchmark(spec) => run_benchmark(config, spec)?,
        Source::External { dataset, validation } => run_external(config, dataset, validation.as_deref())?,
    };
    Ok(ExperimentResult { config: config.clone(), bounds, cuts, runtime_seconds: start.elapsed().as_secs_f64() })
}

fn run_benchmark(config: &ExperimentConfig, spec: &BenchmarkSpec) -> Result<(IntervalVector, Vec<CutResult>)> {
    let (tf, nominal) = stage("setup", spec.build())?;
    let delta = config.delta.unwrap_or(0.0);
    let bounds = stage("setup", ToleranceSpec::relative(nominal.clone(), delta).expand())?;
    let nominal_curve = tf.eval_curve(&nominal);
    let conv = tf.convention();
    let is_array = matches!(spec, BenchmarkSpec::Array { .. });
    let s = config.s.unwrap_or_else(|| default_sample_count(tf.n_params()));

    info!("training {} surrogates with S = {s}", config.l);
    let (ia_lbe, repeat, training, models) =
        stage("training", best_of_l(tf.as_ref(), &bounds, &nominal_curve, s, config.l, config.seed, &config.kriging))?;

    info!("Monte Carlo band with M = {}", config.m);
    let opts = McOptions { include_nominal: config.include_nominal.then(|| nominal.clone()) };
    let mc = stage("monte carlo", mc_band(tf.as_ref(), &bounds, config.m, config.seed, &opts))?;
    let ia_e = match tf.ia_e_curve(&bounds) {
        Some(r) => Some(stage("exact bounds", r)?),
        None => None,
    };

    let (ia_lbe_metrics, mc_metrics, ia_e_metrics, nominal_features) = stage(
        "metrics",
        (|| {
            let lbe = curve_metrics(&ia_lbe, Some(&mc), &nominal_curve, conv, is_array)?;
            let mcm = curve_metrics(&mc.to_curve(), None, &nominal_curve, conv, is_array)?;
            let iae = ia_e.as_ref().map(|c| curve_metrics(c, Some(&mc), &nominal_curve, conv, is_array)).transpose()?;
            let nf = if is_array {
                let c = BoundsCurve::degenerate(
                    tf.theta_grid().to_vec(),
                    nominal_curve.clone(),
                    crate::surrogate::Provenance::IaE,
                )?;
                Some(pattern_features(&c, &nominal_curve)?)
            } else {
                None
            };
            Ok((lbe, mcm, iae, nf))
        })(),
    )?;

    let cut = CutResult {
        label: String::new(),
        theta_grid: tf.theta_grid().to_vec(),
        nominal: nominal_curve,
        ia_lbe,
        ia_lbe_metrics,
        selected_repeat: repeat,
        training,
        models,
        mc: Some(mc),
        mc_metrics: Some(mc_metrics),
        ia_e,
        ia_e_metrics,
        nominal_features,
        convention: conv,
    };
    Ok((bounds, vec![cut]))
}

fn run_external(
    config: &ExperimentConfig,
    dataset: &Path,
    validation: Option<&Path>,
) -> Result<(IntervalVector, Vec<CutResult>)> {
    let data = stage("ingest", ingest(dataset))?;
    let valid = validation.map(|p| stage("ingest", ingest(p))).transpose()?;
    if let Some(v) = &valid {
        if !data.same_layout(v) {
            return Err(Error::InvalidArgument(
                "validation file does not share the dataset's parameters and angles".into(),
            ));
        }
    }
    if config.l > 1 {
        warn!("external data provides a single training set; L = {} is ignored", config.l);
    }
    if config.s.is_some() {
        warn!("external data fixes S = {}; --s is ignored", data.n_samples());
    }
    let spec = ToleranceSpec {
        nominal: data.nominal.clone(),
        tolerance: match config.delta {
            Some(d) => Tolerance::Relative(d),
            None => Tolerance::PerParameter(data.deltas.clone()),
        },
    };
    let bounds = stage("setup", spec.expand())?;
    let conv = ReportingConvention::default();

    let cuts = (0..data.cuts.len())
        .map(|c| run_cut(config, &data, valid.as_ref(), c, &bounds, conv))
        .collect::<Result<_>>()?;
    Ok((bounds, cuts))
}

fn run_cut(
    config: &ExperimentConfig,
    data: &ExternalDataset,
    valid: Option<&ExternalDataset>,
    c: usize,
    bounds: &IntervalVector,
    conv: ReportingConvention,
) -> Result<CutResult> {
    let cut = &data.cuts[c];
    let ts = stage("ingest", TrainingSet::new(data.inputs.clone(), data.cut_outputs(c), cut.theta_deg.clone()))?;
    let models = stage("training", train_all(&ts, &config.kriging))?;
    let ia_lbe = stage("bounds", bounds_curve(&models, &cut.theta_deg, bounds))?;
    let nominal = match &cut.nominal {
        Some(v) => v.clone(),
        None => models.iter().map(|m| m.predict(&data.nominal)).collect(),
    };
    let mc = valid
        .map(|v| {
            let rows = v.cut_outputs(c);
            MCBand::from_curves(cut.theta_deg.clone(), rows.iter().map(Vec::as_slice))
        })
        .transpose()?;
    let ia_lbe_metrics = stage("metrics", curve_metrics(&ia_lbe, mc.as_ref(), &nominal, conv, false))?;
    let mc_metrics = mc.as_ref().map(|m| curve_metrics(&m.to_curve(), None, &nominal, conv, false)).transpose()?;
    Ok(CutResult {
        label: cut.label.clone(),
        theta_grid: cut.theta_deg.clone(),
        nominal,
        ia_lbe,
        ia_lbe_metrics,
        selected_repeat: 0,
        training: ts,
        models,
        mc,
        mc_metrics,
        ia_e: None,
        ia_e_metrics: None,
        nominal_features: None,
        convention: conv,
    })
}

fn inclusion_json(m: &CurveMetrics) -> serde_json::Value {
    match &m.inclusion {
        Some(r) => json!({
            "psi": r.psi,
            "psi_int": r.psi_int,
            "psi_ext": r.psi_ext,
            "psi_pen": r.psi_pen,
            "delta": m.delta,
        }),
        None => json!({
            "psi": null,
            "psi_int": null,
            "psi_ext": null,
            "psi_pen": null,
            "delta": m.delta,
        }),
    }
}

fn cut_json(cut: &CutResult) -> serde_json::Value {
    let mut v = inclusion_json(&cut.ia_lbe_metrics);
    let o = v.as_object_mut().expect("object");
    o.insert("label".into(), json!(cut.label));
    o.insert("selected_repeat".into(), json!(cut.selected_repeat));
    o.insert("training_samples".into(), json!(cut.training.n_samples()));
    o.insert("beta".into(), json!(cut.models.first().map(|m| m.beta().to_vec())));
    if let Some(m) = &cut.ia_e_metrics {
        o.insert("ia_e".into(), inclusion_json(m));
    }
    if let Some(m) = &cut.mc_metrics {
        o.insert("mc".into(), json!({ "delta": m.delta }));
    }
    let mut features = serde_json::Map::new();
    if let Some(f) = &cut.nominal_features {
        features.insert("nominal".into(), json!(f));
    }
    for (name, m) in
        [("ia_lbe", Some(&cut.ia_lbe_metrics)), ("ia_e", cut.ia_e_metrics.as_ref()), ("mc", cut.mc_metrics.as_ref())]
    {
        if let Some(f) = m.and_then(|m| m.features.as_ref()) {
            features.insert(name.into(), json!(f));
        }
    }
    o.insert("features".into(), serde_json::Value::Object(features));
    v
}

/// JSON summary of a run: the headline metrics of the (first) cut at top
/// level, every cut under `cuts`, timings and the configuration.
pub fn metrics_json(result: &ExperimentResult) -> serde_json::Value {
    let cuts: Vec<_> = result.cuts.iter().map(cut_json).collect();
    let mut top = cuts[0].clone();
    let o = top.as_object_mut().expect("object");
    o.insert("cuts".into(), json!(cuts));
    o.insert("runtime_seconds".into(), json!(result.runtime_seconds));
    o.insert("config".into(), json!(result.config));
    top
}

fn csv_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-grid-sample table with a two-line header (names, then roles).
pub fn bounds_csv(cut: &CutResult) -> String {
    let mut names = vec!["theta", "inf_ia_lbe", "sup_ia_lbe", "inf_mc", "sup_mc", "nominal"];
    let mut roles = vec!["grid", "lower", "upper", "lower", "upper", "response"];
    if cut.ia_e.is_some() {
        names.extend(["inf_ia_e", "sup_ia_e"]);
        roles.extend(["lower", "upper"]);
    }
    let mut out = format!("{}\n{}\n", names.join(","), roles.join(","));
    for k in 0..cut.theta_grid.len() {
        let mut row = vec![
            cut.theta_grid[k].to_string(),
            cut.ia_lbe.inf[k].to_string(),
            cut.ia_lbe.sup[k].to_string(),
            csv_cell(cut.mc.as_ref().map(|m| m.inf[k])),
            csv_cell(cut.mc.as_ref().map(|m| m.sup[k])),
            cut.nominal[k].to_string(),
        ];
        if let Some(e) = &cut.ia_e {
            row.push(e.inf[k].to_string());
            row.push(e.sup[k].to_string());
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn series(x: &[f64], y: &[f64]) -> String {
    x.iter().zip(y).map(|(a, b)| format!("{a} {b}\n")).collect()
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn file_tag(cut: &CutResult, multi: bool) -> String {
    if !multi {
        return String::new();
    }
    let clean: String =
        cut.label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
    format!("_{clean}")
}

/// Writes `bounds.csv`, `metrics.json`, `config_echo.json` and, on
/// request, two-column series under `plotdata/`. With several cuts the
/// bounds file of each is suffixed with its label.
pub fn emit(result: &ExperimentResult, out: &Path, plotdata: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut written = Vec::new();
    let multi = result.cuts.len() > 1;
    for cut in &result.cuts {
        let p = out.join(format!("bounds{}.csv", file_tag(cut, multi)));
        write(&p, &bounds_csv(cut))?;
        written.push(p);
    }
    let p = out.join("metrics.json");
    write(&p, &serde_json::to_string_pretty(&metrics_json(result))?)?;
    written.push(p);
    let p = out.join("config_echo.json");
    write(&p, &serde_json::to_string_pretty(&result.config)?)?;
    written.push(p);

    if plotdata {
        let dir = out.join("plotdata");
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for cut in &result.cuts {
            let tag = file_tag(cut, multi);
            let x = &cut.theta_grid;
            let mut files = vec![
                ("nominal", cut.nominal.clone()),
                ("ia_lbe_inf", cut.ia_lbe.inf.clone()),
                ("ia_lbe_sup", cut.ia_lbe.sup.clone()),
            ];
            if let Some(m) = &cut.mc {
                files.push(("mc_inf", m.inf.clone()));
                files.push(("mc_sup", m.sup.clone()));
            }
            if let Some(e) = &cut.ia_e {
                files.push(("ia_e_inf", e.inf.clone()));
                files.push(("ia_e_sup", e.sup.clone()));
            }
            for (name, y) in files {
                let p = dir.join(format!("{name}{tag}.dat"));
                write(&p, &series(x, &y))?;
                written.push(p);
            }
        }
    }
    Ok(written)
}
