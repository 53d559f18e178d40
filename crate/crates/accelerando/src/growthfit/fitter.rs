//! Fit driver: parameter encodings, data-driven starting points, and the
//! simplex descent with its deterministic restart schedule.
//!
//! Every model family is searched in an unconstrained coordinate system:
//! positive quantities through `exp`, box-bounded quantities (the hyperbolic
//! pole offset, escalation duration ratios) through a logistic squash, and
//! locations relative to the data's time anchor. This keeps the simplex
//! well-conditioned across data whose values span many orders of magnitude.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::macrodynamics::{MacroParams, MacroState};
use crate::timeseries::TimeSeries;

use super::model::{GrowthModel, LogisticStage, ModelKind, LN_81};
use super::simplex::{nelder_mead, SimplexResult};
use super::{AlphaMode, FitError, FitOptions, FitResult, FitSpace};

const PENALTY: f64 = 1e300;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x.clamp(-700.0, 700.0)).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    (p / (1.0 - p)).ln()
}

/// Least-squares line through `(x, y)` pairs; returns `(slope, intercept)`.
fn linear_regression(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// One fitting problem: data in fit space plus the search-space codec.
pub(super) struct Problem {
    kind: ModelKind,
    times: Vec<f64>,
    values: Vec<f64>,
    targets: Vec<f64>,
    fit_space: FitSpace,
    alpha: AlphaMode,
    t_ref: f64,
    t_min: f64,
    t_max: f64,
    span: f64,
}

impl Problem {
    pub(super) fn new(
        kind: ModelKind,
        series: &TimeSeries,
        fit_space: FitSpace,
        alpha: AlphaMode,
    ) -> Self {
        let times: Vec<f64> = series.times().collect();
        let values: Vec<f64> = series.values().collect();
        let targets = match fit_space {
            FitSpace::Linear => values.clone(),
            FitSpace::Log => values.iter().map(|v| v.ln()).collect(),
        };
        let t_min = times[0];
        let t_max = *times.last().unwrap();
        let span = (t_max - t_min).max(f64::MIN_POSITIVE);
        Self {
            kind,
            t_ref: 0.5 * (t_min + t_max),
            times,
            values,
            targets,
            fit_space,
            alpha,
            t_min,
            t_max,
            span,
        }
    }

    fn pole_offset_bounds(&self) -> (f64, f64) {
        (1e-6 * self.span, 10.0 * self.span)
    }

    pub(super) fn decode(&self, theta: &[f64]) -> GrowthModel {
        match self.kind {
            ModelKind::Exponential => {
                let rate = theta[1];
                GrowthModel::Exponential {
                    scale: (theta[0] - rate * self.t_ref).exp(),
                    rate,
                }
            }
            ModelKind::Logistic => GrowthModel::Logistic {
                capacity: theta[0].clamp(-700.0, 700.0).exp(),
                rate: theta[1].clamp(-700.0, 700.0).exp(),
                midpoint: self.t_ref + theta[2] * self.span,
            },
            ModelKind::Hyperbolic => {
                let (d_lo, d_hi) = self.pole_offset_bounds();
                let d = d_lo + (d_hi - d_lo) * sigmoid(theta[1]);
                let t_pole = self.t_max + d;
                let exponent = match self.alpha {
                    AlphaMode::Fixed(a) => a,
                    AlphaMode::Free => theta[2].clamp(-700.0, 700.0).exp(),
                };
                // theta[0] is the log model value at the time anchor
                let coefficient = (theta[0] + exponent * (t_pole - self.t_ref).ln()).exp();
                GrowthModel::Hyperbolic {
                    coefficient,
                    t_pole,
                    exponent,
                }
            }
            ModelKind::LogisticEscalation { n_stages } => {
                let mut stages = Vec::with_capacity(n_stages);
                let mut duration = theta[2 * n_stages].clamp(-700.0, 700.0).exp();
                for i in 0..n_stages {
                    if i > 0 {
                        duration *= sigmoid(theta[2 * n_stages + i]);
                    }
                    stages.push(LogisticStage {
                        capacity: theta[2 * i].clamp(-700.0, 700.0).exp(),
                        rate: LN_81 / duration,
                        midpoint: self.t_ref + theta[2 * i + 1] * self.span,
                    });
                }
                GrowthModel::LogisticEscalation { stages }
            }
            ModelKind::CoupledOde => {
                let params = MacroParams {
                    relaxation: theta[0].clamp(-700.0, 700.0).exp(),
                    capacity_per_tech: 1.0,
                    innovation: theta[1].clamp(-700.0, 700.0).exp(),
                };
                let init = MacroState {
                    t: self.t_min,
                    population: theta[2].clamp(-700.0, 700.0).exp(),
                    technology: theta[3].clamp(-700.0, 700.0).exp(),
                };
                GrowthModel::CoupledOde { params, init }
            }
        }
    }

    pub(super) fn objective(&self, theta: &[f64]) -> f64 {
        let model = self.decode(theta);
        let predicted = match model.values_at(&self.times) {
            Ok(v) => v,
            Err(_) => return PENALTY,
        };
        let mut sse = 0.0;
        for (m, y) in predicted.iter().zip(&self.targets) {
            let fitted = match self.fit_space {
                FitSpace::Linear => *m,
                FitSpace::Log => {
                    if *m <= 0.0 {
                        return PENALTY;
                    }
                    m.ln()
                }
            };
            if !fitted.is_finite() {
                return PENALTY;
            }
            let r = y - fitted;
            sse += r * r;
        }
        if sse.is_finite() {
            sse
        } else {
            PENALTY
        }
    }

    /// Data-driven starting point in search coordinates.
    pub(super) fn initial(&self) -> Vec<f64> {
        match self.kind {
            ModelKind::Exponential => self.init_exponential(),
            ModelKind::Logistic => self.init_logistic(),
            ModelKind::Hyperbolic => self.init_hyperbolic(),
            ModelKind::LogisticEscalation { n_stages } => self.init_escalation(n_stages),
            ModelKind::CoupledOde => self.init_coupled(),
        }
    }

    fn init_exponential(&self) -> Vec<f64> {
        if self.values.iter().all(|&v| v > 0.0) {
            let pts: Vec<(f64, f64)> = self
                .times
                .iter()
                .zip(&self.values)
                .map(|(&t, &v)| (t - self.t_ref, v.ln()))
                .collect();
            if let Some((slope, intercept)) = linear_regression(&pts) {
                return vec![intercept, slope];
            }
        }
        let vmax = self.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        vec![vmax.max(1e-12).ln(), 0.1 / self.span]
    }

    fn init_logistic(&self) -> Vec<f64> {
        let vmax = self.values.iter().fold(0.0f64, |a, &v| a.max(v));
        let k0 = if vmax > 0.0 { 1.2 * vmax } else { 1.0 };
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(_, &v)| v > k0 * 1e-9 && v < k0 * (1.0 - 1e-9))
            .map(|(&t, &v)| (t, (v / (k0 - v)).ln()))
            .collect();
        let (mut r0, mut t_mid0) = (LN_81 / self.span, self.t_ref);
        if let Some((slope, intercept)) = linear_regression(&pts) {
            if slope > 0.0 {
                r0 = slope;
                let cand = -intercept / slope;
                if cand.is_finite() {
                    t_mid0 = cand;
                }
            }
        }
        vec![k0.ln(), r0.ln(), (t_mid0 - self.t_ref) / self.span]
    }

    fn init_hyperbolic(&self) -> Vec<f64> {
        let (d_lo, d_hi) = self.pole_offset_bounds();
        // pole guess from the last two increasing points: for alpha = 1,
        // v_a (t0 - t_a) = v_b (t0 - t_b) solves to a weighted extrapolation
        let n = self.times.len();
        let (ta, va) = (self.times[n - 2], self.values[n - 2]);
        let (tb, vb) = (self.times[n - 1], self.values[n - 1]);
        let mut d0 = 0.25 * self.span;
        if vb > va && va > 0.0 {
            let t0 = (vb * tb - va * ta) / (vb - va);
            if t0.is_finite() && t0 > self.t_max {
                d0 = t0 - self.t_max;
            }
        }
        let d0 = d0.clamp(2.0 * d_lo, 0.5 * d_hi);
        let theta_d = logit((d0 - d_lo) / (d_hi - d_lo));
        // anchor value: data point nearest the time anchor
        let mid = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - self.t_ref)
                    .abs()
                    .total_cmp(&(b.1 - self.t_ref).abs())
            })
            .map(|(i, _)| i)
            .unwrap_or(n / 2);
        let v_mid = self.values[mid].max(1e-300);
        match self.alpha {
            AlphaMode::Fixed(_) => vec![v_mid.ln(), theta_d],
            AlphaMode::Free => vec![v_mid.ln(), theta_d, 0.0],
        }
    }

    fn init_escalation(&self, n_stages: usize) -> Vec<f64> {
        let vmin = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let vmax = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let range = (vmax - vmin).max(1e-12);
        let seg = self.span / n_stages as f64;
        let mut theta = Vec::with_capacity(3 * n_stages);
        let mut level = vmin.max(0.0);
        for j in 0..n_stages {
            let lo = self.t_min + seg * j as f64;
            let hi = lo + seg;
            let seg_max = self
                .times
                .iter()
                .zip(&self.values)
                .filter(|(&t, _)| t >= lo && t <= hi)
                .map(|(_, &v)| v)
                .fold(level, f64::max);
            let k = (seg_max - level).max(0.02 * range);
            level = seg_max.max(level);
            theta.push(k.ln());
            theta.push((lo + 0.5 * seg - self.t_ref) / self.span);
        }
        theta.push((0.4 * seg).ln());
        for _ in 1..n_stages {
            theta.push(logit(0.6));
        }
        theta
    }

    fn init_coupled(&self) -> Vec<f64> {
        let n = self.times.len();
        let v0 = self.values[0].max(1e-300);
        let (t_a, v_a) = (self.times[n - 2], self.values[n - 2].max(1e-300));
        let (t_b, v_b) = (self.times[n - 1], self.values[n - 1].max(1e-300));
        let tail_rate = ((v_b / v_a).ln() / (t_b - t_a)).max(1e-12);
        // at quasi-equilibrium dN/N ~ c*N, so c ~ (log slope)/N
        let c0 = tail_rate / v_b;
        vec![(25.0 * c0).ln(), c0.ln(), v0.ln(), v0.ln()]
    }
}

/// Simplex descent with the deterministic restart schedule: one run from the
/// data-driven start, then `n_restarts` runs from small seeded perturbations
/// of the incumbent best, keeping the overall best vertex.
pub(super) fn minimize(
    problem: &Problem,
    opts: &FitOptions,
    ss_total: f64,
) -> (SimplexResult, usize) {
    let theta0 = problem.initial();
    let mut f = |x: &[f64]| problem.objective(x);
    let ftol_abs = opts.ftol * ss_total;

    let budget = opts.max_iterations;
    let mut used = 0usize;
    let scale0: Vec<f64> = theta0.iter().map(|x| 0.25 * (1.0 + x.abs())).collect();
    let mut best = nelder_mead(&mut f, &theta0, &scale0, budget, opts.ftol, ftol_abs);
    used += best.iterations;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.n_restarts {
        if used >= budget {
            break;
        }
        let start: Vec<f64> = best
            .x
            .iter()
            .map(|x| {
                let jitter = (rng.gen::<f64>() - 0.5) * 0.06 * (1.0 + x.abs());
                x + jitter
            })
            .collect();
        let scale: Vec<f64> = start.iter().map(|x| 0.02 * (1.0 + x.abs())).collect();
        let run = nelder_mead(&mut f, &start, &scale, budget - used, opts.ftol, ftol_abs);
        used += run.iterations;
        if run.fx < best.fx {
            best = run;
        }
    }

    // Near-perfect fits get one bounded polish pass at a floor ten orders
    // deeper, leaving noiseless fits residual-free at machine scale (the
    // zero-residual bootstrap depends on this); noisy fits skip it.
    if best.fx < 1e-6 * ss_total && used < budget {
        let converged_fast = best.converged;
        let scale: Vec<f64> = best.x.iter().map(|x| 1e-4 * (1.0 + x.abs())).collect();
        let run = nelder_mead(
            &mut f,
            &best.x,
            &scale,
            (budget - used).min(4000),
            opts.ftol,
            ftol_abs * 1e-10,
        );
        used += run.iterations;
        if run.fx < best.fx {
            best = run;
        }
        best.converged = best.converged || converged_fast;
    }
    (best, used)
}

/// Number of free parameters a fit of `kind` searches.
pub(super) fn free_param_count(kind: ModelKind, alpha: AlphaMode) -> usize {
    match kind {
        ModelKind::Exponential => 2,
        ModelKind::Logistic => 3,
        ModelKind::Hyperbolic => match alpha {
            AlphaMode::Fixed(_) => 2,
            AlphaMode::Free => 3,
        },
        ModelKind::LogisticEscalation { n_stages } => 3 * n_stages,
        ModelKind::CoupledOde => 4,
    }
}

/// Full fit pipeline shared by `fit`, `fit_escalation` and the bootstrap.
pub(super) fn fit_impl(
    kind: ModelKind,
    series: &TimeSeries,
    opts: &FitOptions,
) -> Result<FitResult, FitError> {
    let required = free_param_count(kind, opts.alpha) + 1;
    if series.len() < required {
        if let ModelKind::LogisticEscalation { n_stages } = kind {
            return Err(FitError::InfeasibleStages {
                n_stages,
                found: series.len(),
                required,
            });
        }
        return Err(FitError::Series(
            crate::timeseries::SeriesError::TooFewPoints {
                found: series.len(),
                required,
            },
        ));
    }

    let fit_space = super::resolve_fit_space(series, opts.fit_space);
    if fit_space == FitSpace::Log || kind == ModelKind::CoupledOde {
        series.ensure_positive()?;
    }

    let problem = Problem::new(kind, series, fit_space, opts.alpha);
    if is_constant(&problem.targets) {
        return Err(FitError::DegenerateData);
    }
    let ss_total = sum_sq_dev(&problem.targets);

    let (best, iterations) = minimize(&problem, opts, ss_total);
    let model = problem.decode(&best.x);
    let sse = best.fx;
    Ok(FitResult {
        model,
        sse,
        r_squared: 1.0 - sse / ss_total,
        n_points: series.len(),
        converged: best.converged && sse < PENALTY,
        iterations,
        fit_space,
    })
}

pub(super) fn sum_sq_dev(ys: &[f64]) -> f64 {
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    ys.iter().map(|y| (y - mean).powi(2)).sum()
}

pub(super) fn is_constant(ys: &[f64]) -> bool {
    ys.windows(2).all(|w| w[0] == w[1])
}
