//! Parametric growth laws.

use serde_json::{json, Value};

use crate::macrodynamics::{self, IntegratorConfig, MacroParams, MacroState, Termination};

use super::FitError;

/// Natural log of 81; a logistic stage rises from 10% to 90% of its
/// saturation over `ln(81) / rate` time units, which we call its duration.
pub(crate) const LN_81: f64 = 4.394449154672439;

/// One stage of a logistic escalation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticStage {
    pub capacity: f64,
    pub rate: f64,
    pub midpoint: f64,
}

impl LogisticStage {
    /// Time to go from 10% to 90% of the stage capacity.
    pub fn duration(&self) -> f64 {
        LN_81 / self.rate
    }

    fn value(&self, t: f64) -> f64 {
        let arg = (-self.rate * (t - self.midpoint)).clamp(-700.0, 700.0);
        self.capacity / (1.0 + arg.exp())
    }
}

/// A parametric growth model.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthModel {
    /// `A * exp(r t)`.
    Exponential { scale: f64, rate: f64 },
    /// `K / (1 + exp(-r (t - t_mid)))`.
    Logistic {
        capacity: f64,
        rate: f64,
        midpoint: f64,
    },
    /// `C / (t0 - t)^alpha`, defined for `t < t0`; the value grows without
    /// bound as `t` approaches the pole `t0`.
    Hyperbolic {
        coefficient: f64,
        t_pole: f64,
        exponent: f64,
    },
    /// A sum of logistic stages with strictly decreasing durations: each
    /// wave of saturation is shorter and steeper than its predecessor.
    LogisticEscalation { stages: Vec<LogisticStage> },
    /// The coupled population-technology system itself, evaluated by
    /// integrating from `init`; the model value is the population component.
    CoupledOde {
        params: MacroParams,
        init: MacroState,
    },
}

/// Identifies a fittable model family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Exponential,
    Logistic,
    Hyperbolic,
    LogisticEscalation { n_stages: usize },
    CoupledOde,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Exponential => "exponential",
            ModelKind::Logistic => "logistic",
            ModelKind::Hyperbolic => "hyperbolic",
            ModelKind::LogisticEscalation { .. } => "logistic_escalation",
            ModelKind::CoupledOde => "coupled_ode",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::LogisticEscalation { n_stages } => {
                write!(f, "logistic_escalation[{n_stages}]")
            }
            other => f.write_str(other.name()),
        }
    }
}

impl GrowthModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            GrowthModel::Exponential { .. } => ModelKind::Exponential,
            GrowthModel::Logistic { .. } => ModelKind::Logistic,
            GrowthModel::Hyperbolic { .. } => ModelKind::Hyperbolic,
            GrowthModel::LogisticEscalation { stages } => ModelKind::LogisticEscalation {
                n_stages: stages.len(),
            },
            GrowthModel::CoupledOde { .. } => ModelKind::CoupledOde,
        }
    }

    /// Model value at time `t`.
    pub fn value(&self, t: f64) -> Result<f64, FitError> {
        match self {
            GrowthModel::Exponential { scale, rate } => Ok(scale * (rate * t).exp()),
            GrowthModel::Logistic {
                capacity,
                rate,
                midpoint,
            } => {
                let arg = (-rate * (t - midpoint)).clamp(-700.0, 700.0);
                Ok(capacity / (1.0 + arg.exp()))
            }
            GrowthModel::Hyperbolic {
                coefficient,
                t_pole,
                exponent,
            } => {
                if t >= *t_pole {
                    return Err(FitError::BeyondSingularity {
                        t,
                        t_pole: *t_pole,
                    });
                }
                Ok(coefficient / (t_pole - t).powf(*exponent))
            }
            GrowthModel::LogisticEscalation { stages } => {
                Ok(stages.iter().map(|s| s.value(t)).sum())
            }
            GrowthModel::CoupledOde { .. } => Ok(self.values_at(&[t])?[0]),
        }
    }

    /// Model values at several times at once. For the coupled system this
    /// performs a single integration sweep instead of one per time.
    pub fn values_at(&self, times: &[f64]) -> Result<Vec<f64>, FitError> {
        match self {
            GrowthModel::CoupledOde { params, init } => {
                coupled_values_at(params, init, times)
            }
            _ => times.iter().map(|&t| self.value(t)).collect(),
        }
    }

    /// Number of free parameters when fitted (`b` of the coupled system is
    /// pinned to 1: only the product `b*T` is observable through `N`).
    pub fn param_count(&self) -> usize {
        match self {
            GrowthModel::Exponential { .. } => 2,
            GrowthModel::Logistic { .. } => 3,
            GrowthModel::Hyperbolic { .. } => 3,
            GrowthModel::LogisticEscalation { stages } => 3 * stages.len(),
            GrowthModel::CoupledOde { .. } => 4,
        }
    }

    /// JSON form: `{"kind": ..., "params": {...}}` fields, used by reports.
    pub fn to_json(&self) -> Value {
        let params = match self {
            GrowthModel::Exponential { scale, rate } => json!({"a": scale, "r": rate}),
            GrowthModel::Logistic {
                capacity,
                rate,
                midpoint,
            } => json!({"k": capacity, "r": rate, "t_mid": midpoint}),
            GrowthModel::Hyperbolic {
                coefficient,
                t_pole,
                exponent,
            } => json!({"c": coefficient, "t0": t_pole, "alpha": exponent}),
            GrowthModel::LogisticEscalation { stages } => {
                let stages: Vec<Value> = stages
                    .iter()
                    .map(|s| json!({"k": s.capacity, "r": s.rate, "t_mid": s.midpoint}))
                    .collect();
                json!({ "stages": stages })
            }
            GrowthModel::CoupledOde { params, init } => json!({
                "a": params.relaxation,
                "b": params.capacity_per_tech,
                "c": params.innovation,
                "n0": init.population,
                "tech0": init.technology,
                "t_start": init.t,
            }),
        };
        json!({"kind": self.kind().name(), "params": params})
    }
}

fn coupled_values_at(
    params: &MacroParams,
    init: &MacroState,
    times: &[f64],
) -> Result<Vec<f64>, FitError> {
    let mut out = Vec::with_capacity(times.len());
    let mut state = *init;
    for &t in times {
        if t < init.t {
            return Err(FitError::TimeBeforeStart { t, t_start: init.t });
        }
        if t > state.t {
            let span = t - state.t;
            let cfg = IntegratorConfig::adaptive(t)
                .with_h0((span * 1e-2).max(1e-8))
                .with_rel_tol(1e-10);
            let traj = macrodynamics::integrate(&state, params, &cfg)?;
            if let Termination::BlowUp { t_est } = traj.termination {
                return Err(FitError::BeyondSingularity { t, t_pole: t_est });
            }
            state = *traj.last();
        }
        out.push(state.population);
    }
    Ok(out)
}
