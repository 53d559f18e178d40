//! Growth-model fitting, model comparison and singularity-date estimation.
//!
//! Five model families can be fitted to a [`TimeSeries`]: exponential,
//! logistic, hyperbolic (finite-time singularity), logistic escalation
//! (a sum of ever shorter and steeper S-curves) and the coupled
//! population-technology system itself. Fitting minimizes the sum of squared
//! residuals, either in linear space or in log space; series whose values
//! span three or more orders of magnitude default to log space so that the
//! largest points do not dominate.
//!
//! The minimizer is a derivative-free simplex descent with a deterministic
//! schedule of three seeded restarts; identical inputs and options always
//! produce identical fits.

mod bootstrap;
mod fitter;
mod model;
mod simplex;

pub use bootstrap::{estimate_singularity, SingularityEstimate, MIN_RESAMPLES};
pub use model::{GrowthModel, LogisticStage, ModelKind};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::timeseries::{SeriesError, TimeSeries};

/// Space in which residuals are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitSpace {
    Linear,
    Log,
}

impl FitSpace {
    pub fn name(&self) -> &'static str {
        match self {
            FitSpace::Linear => "linear",
            FitSpace::Log => "log",
        }
    }
}

/// Treatment of the hyperbolic exponent during a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    Fixed(f64),
    Free,
}

/// Fitting options. The defaults suit every series in this crate; the seed
/// feeds both the restart perturbations and the bootstrap streams.
#[derive(Debug, Clone, Serialize)]
pub struct FitOptions {
    /// Residual space; `None` selects log for series spanning >= 3 decades.
    pub fit_space: Option<FitSpace>,
    /// Total simplex iteration budget across restarts.
    pub max_iterations: usize,
    /// Restarts from perturbed incumbents after the initial descent.
    pub n_restarts: usize,
    /// Relative function-spread stopping tolerance.
    pub ftol: f64,
    pub seed: u64,
    /// Hyperbolic exponent mode.
    pub alpha: AlphaMode,
    /// Bootstrap resample count for singularity estimation.
    pub n_resamples: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            fit_space: None,
            max_iterations: 40_000,
            n_restarts: 3,
            ftol: 1e-15,
            seed: 0,
            alpha: AlphaMode::Free,
            n_resamples: 200,
        }
    }
}

/// Outcome of a fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: GrowthModel,
    /// Sum of squared residuals in `fit_space`.
    pub sse: f64,
    /// `1 - sse / ss_total`, computed in `fit_space`.
    pub r_squared: f64,
    pub n_points: usize,
    pub converged: bool,
    pub iterations: usize,
    pub fit_space: FitSpace,
}

impl FitResult {
    /// JSON report form:
    /// `{kind, params, sse, r_squared, n_points, fit_space, converged, iterations}`.
    pub fn to_json(&self) -> Value {
        let mut obj = self.model.to_json();
        let map = obj.as_object_mut().expect("model json is an object");
        map.insert("sse".into(), json!(self.sse));
        map.insert("r_squared".into(), json!(self.r_squared));
        map.insert("n_points".into(), json!(self.n_points));
        map.insert("fit_space".into(), json!(self.fit_space.name()));
        map.insert("converged".into(), json!(self.converged));
        map.insert("iterations".into(), json!(self.iterations));
        obj
    }
}

/// Errors from fitting and evaluation.
#[derive(Debug, Error)]
pub enum FitError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("degenerate data: series carries no variation to fit")]
    DegenerateData,
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("{n_stages} stages need at least {required} points, found {found}")]
    InfeasibleStages {
        n_stages: usize,
        found: usize,
        required: usize,
    },
    #[error("model evaluated at t={t} at or beyond its pole t0={t_pole}")]
    BeyondSingularity { t: f64, t_pole: f64 },
    #[error("coupled model evaluated at t={t} before its initial time {t_start}")]
    TimeBeforeStart { t: f64, t_start: f64 },
    #[error("model value is not positive in log space at t={t}")]
    NonPositiveModelValue { t: f64 },
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Macro(#[from] crate::macrodynamics::MacroError),
}

/// Default fit-space rule: log when the values span at least three orders
/// of magnitude (and are all positive), linear otherwise.
pub(crate) fn resolve_fit_space(series: &TimeSeries, requested: Option<FitSpace>) -> FitSpace {
    if let Some(space) = requested {
        return space;
    }
    match series.decades_spanned() {
        Ok(d) if d >= 3.0 => FitSpace::Log,
        _ => FitSpace::Linear,
    }
}

/// Fits `kind` to `series`, minimizing SSE in the resolved fit space.
///
/// Deterministic given `opts`. A fit that exhausts its iteration budget is
/// returned with `converged = false` and the best parameters found so far.
pub fn fit(kind: ModelKind, series: &TimeSeries, opts: &FitOptions) -> Result<FitResult, FitError> {
    fitter::fit_impl(kind, series, opts)
}

/// Fits a logistic escalation with `n_stages` stages. Durations are
/// parameterized by ratios in (0,1), so every fitted escalation has strictly
/// decreasing stage durations by construction.
pub fn fit_escalation(
    series: &TimeSeries,
    n_stages: usize,
    opts: &FitOptions,
) -> Result<FitResult, FitError> {
    if n_stages == 0 {
        return Err(FitError::InvalidOptions("n_stages must be >= 1".into()));
    }
    fitter::fit_impl(ModelKind::LogisticEscalation { n_stages }, series, opts)
}

/// Coefficient of determination of `model` against `series` in `fit_space`.
pub fn r_squared(
    series: &TimeSeries,
    model: &GrowthModel,
    fit_space: FitSpace,
) -> Result<f64, FitError> {
    let times: Vec<f64> = series.times().collect();
    let predicted = model.values_at(&times)?;
    let targets: Vec<f64> = match fit_space {
        FitSpace::Linear => series.values().collect(),
        FitSpace::Log => {
            series.ensure_positive()?;
            series.values().map(|v| v.ln()).collect()
        }
    };
    let mut sse = 0.0;
    for ((&m, y), &t) in predicted.iter().zip(&targets).zip(&times) {
        let fitted = match fit_space {
            FitSpace::Linear => m,
            FitSpace::Log => {
                if m <= 0.0 {
                    return Err(FitError::NonPositiveModelValue { t });
                }
                m.ln()
            }
        };
        sse += (y - fitted).powi(2);
    }
    if fitter::is_constant(&targets) {
        return Err(FitError::DegenerateData);
    }
    Ok(1.0 - sse / fitter::sum_sq_dev(&targets))
}

/// One entry of a model comparison.
#[derive(Debug, Clone)]
pub struct ModelRanking {
    pub kind: ModelKind,
    pub result: FitResult,
    pub aic: f64,
}

/// Ranked fits plus the kinds that failed to fit at all.
#[derive(Debug)]
pub struct ModelComparison {
    /// Ascending by AIC; ties broken by fewer free parameters.
    pub ranked: Vec<ModelRanking>,
    pub failures: Vec<(ModelKind, FitError)>,
}

/// Fits each kind and ranks by `AIC = n ln(sse/n) + 2k` with `k` the free
/// parameter count. Per-kind failures are recorded, not fatal.
pub fn compare_models(
    series: &TimeSeries,
    kinds: &[ModelKind],
    opts: &FitOptions,
) -> ModelComparison {
    let mut ranked = Vec::new();
    let mut failures = Vec::new();
    for &kind in kinds {
        match fit(kind, series, opts) {
            Ok(result) => {
                let n = result.n_points as f64;
                let k = fitter::free_param_count(kind, opts.alpha);
                let aic = n * (result.sse / n).ln() + 2.0 * k as f64;
                ranked.push(ModelRanking { kind, result, aic });
            }
            Err(err) => failures.push((kind, err)),
        }
    }
    ranked.sort_by(|a, b| {
        a.aic.total_cmp(&b.aic).then_with(|| {
            fitter::free_param_count(a.kind, opts.alpha)
                .cmp(&fitter::free_param_count(b.kind, opts.alpha))
        })
    });
    ModelComparison { ranked, failures }
}
