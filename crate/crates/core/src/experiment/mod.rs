//! Seeded Monte-Carlo sweeps over `(θ, m, SNR, p)` grids.
//!
//! A sweep is described by an [`ExperimentSpec`], usually read from a TOML
//! file (see `presets/`). Every trial draws a fresh instance from a seed
//! derived from `(spec.seed, trial)`; the same trial index therefore sees
//! the same reflectors and code columns at every grid point. Rows are
//! emitted grid point by grid point, trials in order, regardless of how
//! the trials were scheduled across threads.

mod csv_io;
mod plot;
pub mod presets;

use std::path::Path;
use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::procrustes_known_x;
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_u_hx, estimate_u_hx_alt, recover_v_sequential, Moments, PrefixIndexing,
};
use crate::householder::OrthogonalProduct;
use crate::metrics::{frobenius_error_v, linf_error_up_to_sign, support_f1, x_error_per_entry};
use crate::sparse::SparseMatrix;
use crate::synthesis::{derive_seed, make_instance, FactorSampling, SparseModel, VectorDistribution};

pub use csv_io::{read_csv, write_csv, CsvSink, CSV_HEADER};
pub use plot::{build_plot, render_svg, write_plot, Plot, PlotSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentKind {
    #[serde(rename = "fig1_frobV_vs_m")]
    Fig1FrobVVsM,
    #[serde(rename = "fig2_frobV_vs_p")]
    Fig2FrobVVsP,
    #[serde(rename = "fig3_linf_vs_p")]
    Fig3LinfVsP,
    #[serde(rename = "fig4_xerr_vs_p")]
    Fig4XerrVsP,
    #[serde(rename = "fig5_noise")]
    Fig5Noise,
    #[serde(rename = "custom")]
    Custom,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Fig1FrobVVsM => "fig1_frobV_vs_m",
            ExperimentKind::Fig2FrobVVsP => "fig2_frobV_vs_p",
            ExperimentKind::Fig3LinfVsP => "fig3_linf_vs_p",
            ExperimentKind::Fig4XerrVsP => "fig4_xerr_vs_p",
            ExperimentKind::Fig5Noise => "fig5_noise",
            ExperimentKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            ExperimentKind::Fig1FrobVVsM,
            ExperimentKind::Fig2FrobVVsP,
            ExperimentKind::Fig3LinfVsP,
            ExperimentKind::Fig4XerrVsP,
            ExperimentKind::Fig5Noise,
            ExperimentKind::Custom,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Single reflector via `ĉ`.
    Alg1,
    /// Single reflector via `k_i = u_i c`.
    Alg1Alt,
    /// Sequential recovery of `m` reflectors.
    Alg3,
}

impl Estimator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Estimator::Alg1 => "alg1",
            Estimator::Alg1Alt => "alg1_alt",
            Estimator::Alg3 => "alg3",
        }
    }
}

pub const PROCRUSTES_METHOD: &str = "procrustes_known_x";

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Baselines {
    #[serde(default)]
    pub procrustes_known_x: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorConfig {
    pub distribution: VectorDistribution,
    pub min_abs_c: f64,
    pub value_low: f64,
    pub value_high: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            distribution: VectorDistribution::Uniform,
            min_abs_c: 0.0,
            value_low: 1.0,
            value_high: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefixIndexingConfig {
    #[default]
    Trailing,
    Inclusive,
}

impl From<PrefixIndexingConfig> for PrefixIndexing {
    fn from(c: PrefixIndexingConfig) -> Self {
        match c {
            PrefixIndexingConfig::Trailing => PrefixIndexing::Trailing,
            PrefixIndexingConfig::Inclusive => PrefixIndexing::Inclusive,
        }
    }
}

/// One sweep. `snr_db_list` entries that are infinite mean "no noise".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment_kind: ExperimentKind,
    pub n: usize,
    pub p_list: Vec<usize>,
    #[serde(default = "default_m_list")]
    pub m_list: Vec<usize>,
    pub theta_list: Vec<f64>,
    #[serde(default = "default_snr_list")]
    pub snr_db_list: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    pub estimator: Estimator,
    #[serde(default)]
    pub baselines: Baselines,
    #[serde(default)]
    pub generator: GeneratorConfig,
    #[serde(default)]
    pub prefix_indexing: PrefixIndexingConfig,
    /// Record `wall_time_ms`; off by default because timings break
    /// byte-identical reruns.
    #[serde(default)]
    pub timing: bool,
}

fn default_m_list() -> Vec<usize> {
    vec![1]
}

fn default_snr_list() -> Vec<f64> {
    vec![f64::INFINITY]
}

fn default_zeta() -> f64 {
    crate::estimators::DEFAULT_ZETA
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("spec serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n < 2 {
            return fail(format!("n must be at least 2, got {}", self.n));
        }
        for (name, empty) in [
            ("p_list", self.p_list.is_empty()),
            ("m_list", self.m_list.is_empty()),
            ("theta_list", self.theta_list.is_empty()),
            ("snr_db_list", self.snr_db_list.is_empty()),
        ] {
            if empty {
                return fail(format!("{name} must not be empty"));
            }
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.p_list.contains(&0) {
            return fail("p_list entries must be at least 1".into());
        }
        if let Some(t) = self.theta_list.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return fail(format!("theta {t} outside (0, 1]"));
        }
        if let Some(s) = self.snr_db_list.iter().find(|s| s.is_nan() || **s == f64::NEG_INFINITY) {
            return fail(format!("invalid snr_db {s}"));
        }
        if !(self.zeta >= 0.0) {
            return fail(format!("zeta must be non-negative, got {}", self.zeta));
        }
        if !(self.generator.min_abs_c >= 0.0) {
            return fail("generator.min_abs_c must be non-negative".into());
        }
        SparseModel::new(self.theta_list[0], self.generator.value_low, self.generator.value_high)
            .map_err(|e| Error::Config(e.to_string()))?;
        if matches!(self.estimator, Estimator::Alg1 | Estimator::Alg1Alt) && self.m_list.iter().any(|&m| m != 1) {
            return fail(format!("estimator {} needs m_list = [1]", self.estimator.as_str()));
        }
        if self.m_list.contains(&0) {
            return fail("m_list entries must be at least 1".into());
        }
        Ok(())
    }

    /// Methods in the order their rows are written.
    pub fn methods(&self) -> Vec<&'static str> {
        let mut out = vec![self.estimator.as_str()];
        if self.baselines.procrustes_known_x {
            out.push(PROCRUSTES_METHOD);
        }
        out
    }

    /// Grid points in canonical order: θ, then m, then SNR, then p.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &theta in &self.theta_list {
            for &m in &self.m_list {
                for &snr in &self.snr_db_list {
                    for &p in &self.p_list {
                        out.push(GridPoint {
                            p,
                            m,
                            theta,
                            snr_db: snr.is_finite().then_some(snr),
                        });
                    }
                }
            }
        }
        out
    }

    /// Seed of trial `t`; shared by all grid points.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        derive_seed(self.seed, trial as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub p: usize,
    pub m: usize,
    pub theta: f64,
    pub snr_db: Option<f64>,
}

/// One CSV record: a single method on a single trial at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment_kind: String,
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub theta: f64,
    pub snr_db: Option<f64>,
    pub trial: usize,
    pub seed: u64,
    pub method: String,
    pub linf_u: Option<f64>,
    pub frob_v: Option<f64>,
    pub x_err_per_entry: Option<f64>,
    pub support_f1: Option<f64>,
    pub wall_time_ms: Option<f64>,
    pub flags: String,
}

pub const FLAG_C_CLAMPED: &str = "c_clamped";
pub const FLAG_ILL_CONDITIONED: &str = "ill_conditioned";
pub const FLAG_SINGULAR_INPUT: &str = "singular_input";

impl ResultRow {
    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.split(';').any(|f| f == flag)
    }
}

/// Largest possible `‖V - V̂‖_F` between orthogonal matrices, `2√n`;
/// recorded for failed trials.
pub fn max_frobenius_error(n: usize) -> f64 {
    2.0 * (n as f64).sqrt()
}

struct Outcome {
    linf_u: Option<f64>,
    frob_v: Option<f64>,
    x_err: Option<f64>,
    f1: Option<f64>,
    flags: Vec<&'static str>,
}

impl Outcome {
    fn failed(n: usize, flag: &'static str) -> Self {
        Self {
            linf_u: None,
            frob_v: Some(max_frobenius_error(n)),
            x_err: None,
            f1: None,
            flags: vec![flag],
        }
    }

    fn from_estimate(truth: &OrthogonalProduct, x: &SparseMatrix, v_hat: &OrthogonalProduct, x_hat: &SparseMatrix) -> Result<Self> {
        let linf_u = match (truth.reflectors(), v_hat.reflectors()) {
            ([a], [b]) => match (a.factor(), b.factor()) {
                (Some(a), Some(b)) => Some(linf_error_up_to_sign(a.u(), b.u())?),
                _ => None,
            },
            _ => None,
        };
        Ok(Self {
            linf_u,
            frob_v: Some(frobenius_error_v(truth, v_hat)?),
            x_err: Some(x_error_per_entry(x, x_hat)?),
            f1: Some(support_f1(x, x_hat)?),
            flags: Vec::new(),
        })
    }
}

fn run_method(spec: &ExperimentSpec, method: &str, m: usize, inst: &crate::synthesis::SyntheticInstance) -> Result<Outcome> {
    let n = spec.n;
    let moments = Moments::from(&inst.model);
    let y = inst.y.view();
    let estimate = match method {
        "alg1" => estimate_u_hx(y, moments, Some(spec.zeta)).map(|r| {
            let clamped = r.diagnostics.c_clamped;
            let v = OrthogonalProduct::from_factors(n, vec![r.u_hat]).expect("dimension n");
            (v, r.x_hat.expect("zeta supplied"), clamped)
        }),
        "alg1_alt" => estimate_u_hx_alt(y, moments, Some(spec.zeta)).map(|r| {
            let v = OrthogonalProduct::from_factors(n, vec![r.u_hat]).expect("dimension n");
            (v, r.x_hat.expect("zeta supplied"), false)
        }),
        "alg3" => recover_v_sequential(y, m, moments, None, spec.zeta, spec.prefix_indexing.into())
            .map(|r| (r.v_hat, r.x_hat, false)),
        PROCRUSTES_METHOD => {
            let x = inst.x.to_dense();
            return match procrustes_known_x(y, x.view()) {
                Ok(v_hat) => procrustes_outcome(inst, &v_hat, spec.zeta),
                Err(Error::SingularInput(_)) => Ok(Outcome::failed(n, FLAG_SINGULAR_INPUT)),
                Err(e) => Err(e),
            };
        }
        other => return Err(Error::Config(format!("unknown method {other}"))),
    };
    match estimate {
        Ok((v_hat, x_hat, clamped)) => {
            let mut out = Outcome::from_estimate(&inst.v, &inst.x, &v_hat, &x_hat)?;
            if clamped {
                out.flags.push(FLAG_C_CLAMPED);
            }
            Ok(out)
        }
        Err(Error::IllConditioned { .. }) => Ok(Outcome::failed(n, FLAG_ILL_CONDITIONED)),
        Err(e) => Err(e),
    }
}

fn procrustes_outcome(inst: &crate::synthesis::SyntheticInstance, v_hat: &Array2<f64>, zeta: f64) -> Result<Outcome> {
    let x_hat = SparseMatrix::hard_threshold(&v_hat.t().dot(&inst.y), zeta);
    Ok(Outcome {
        linf_u: None,
        frob_v: Some(frobenius_error_v(&inst.v, v_hat)?),
        x_err: Some(x_error_per_entry(&inst.x, &x_hat)?),
        f1: Some(support_f1(&inst.x, &x_hat)?),
        flags: Vec::new(),
    })
}

fn run_trial(spec: &ExperimentSpec, point: &GridPoint, trial: usize) -> Result<Vec<ResultRow>> {
    let seed = spec.trial_seed(trial);
    let model = SparseModel::new(point.theta, spec.generator.value_low, spec.generator.value_high)?;
    let sampling = FactorSampling {
        distribution: spec.generator.distribution,
        min_abs_c: spec.generator.min_abs_c,
    };
    let inst = make_instance(spec.n, point.p, point.m, &model, point.snr_db, sampling, seed)?;
    spec.methods()
        .into_iter()
        .map(|method| {
            let start = Instant::now();
            let out = run_method(spec, method, point.m, &inst)?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            Ok(ResultRow {
                experiment_kind: spec.experiment_kind.as_str().to_owned(),
                n: spec.n,
                p: point.p,
                m: point.m,
                theta: point.theta,
                snr_db: point.snr_db,
                trial,
                seed,
                method: method.to_owned(),
                linf_u: out.linf_u,
                frob_v: out.frob_v,
                x_err_per_entry: out.x_err,
                support_f1: out.f1,
                wall_time_ms: spec.timing.then_some(elapsed),
                flags: out.flags.join(";"),
            })
        })
        .collect()
}

/// Runs the sweep, handing rows to `sink` in canonical order.
///
/// Trials of one grid point run in parallel on the current rayon pool.
pub fn run_experiment<F>(spec: &ExperimentSpec, mut sink: F) -> Result<()>
where
    F: FnMut(ResultRow) -> Result<()>,
{
    spec.validate()?;
    for point in spec.grid() {
        let per_trial: Vec<Result<Vec<ResultRow>>> = (0..spec.trials)
            .into_par_iter()
            .map(|t| run_trial(spec, &point, t))
            .collect();
        for rows in per_trial {
            for row in rows? {
                sink(row)?;
            }
        }
    }
    Ok(())
}

pub fn run_experiment_collect(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    run_experiment(spec, |r| {
        rows.push(r);
        Ok(())
    })?;
    Ok(rows)
}

/// Metadata written next to a CSV: resolved spec plus generator name.
pub fn metadata_toml(spec: &ExperimentSpec) -> String {
    format!(
        "# generated by householder-dict {}\nrng_algorithm = {:?}\ncsv_header = {:?}\n\n[spec]\n{}",
        env!("CARGO_PKG_VERSION"),
        crate::synthesis::RNG_ALGORITHM,
        CSV_HEADER,
        spec.to_toml_string()
    )
}
