//! Growth curves racing toward a finite-time singularity, and the
//! stigmergic mechanics that drive them: a numerical and simulation toolkit.
//!
//! Two pillars:
//!
//! 1. **Macroscopic growth.** [`macrodynamics`] couples a logistic
//!    population equation to a bilinear technology equation; the positive
//!    feedback produces hyperbolic growth with a pole at finite time.
//!    [`growthfit`] fits exponential, logistic, hyperbolic, stacked-logistic
//!    and coupled-system models to historical series from [`timeseries`],
//!    compares them by AIC, and brackets the pole date with a residual
//!    bootstrap. Bundled [`datasets`] cover world population and the speed
//!    of long-distance information transmission.
//!
//! 2. **Stigmergy.** [`medium`] is a weighted directed graph agents modify
//!    instead of talking to each other. [`quantstig`] implements the
//!    mechanisms that *rank* existing options (ant-trail foraging, Hebbian
//!    link learning with shortcuts, spreading activation, link-structure
//!    ranking); [`qualstig`] implements a mechanism that *creates* new
//!    structure: collaborative editing of an append-only article where
//!    variation and selection push quality upward.
//!
//! Every stochastic entry point takes an explicit seed and is bitwise
//! reproducible.
//!
//! # Examples
//!
//! The `examples/` directory is the front door; each file exercises one
//! capability end to end:
//!
//! ```text
//! cargo run --example fit_population          # hyperbolic fit, R^2
//! cargo run --example singularity_date        # bootstrap pole estimate
//! cargo run --example compare_growth_models   # AIC ranking
//! cargo run --example coupled_blowup          # integrate to the pole
//! cargo run --example demographic_transition  # post-switch stabilization
//! cargo run --example logistic_escalation     # stacked S-curves
//! cargo run --example info_speed_trend        # doubling-time profile
//! cargo run --example double_bridge           # ant-trail lock-in
//! cargo run --example hebbian_shortcuts       # reinforcement + shortcuts
//! cargo run --example activation_search       # spreading activation
//! cargo run --example rank_pages              # link-structure ranking
//! cargo run --example wiki_quality            # collaborative editing
//! ```
//!
//! A thin `accelerando` binary exposes the same machinery as `fit`, `macro`
//! and `sim` subcommands; see the README.

pub mod cli;
pub mod datasets;
pub mod growthfit;
pub mod macrodynamics;
pub mod medium;
pub mod qualstig;
pub mod quantstig;
pub mod timeseries;

pub use growthfit::{
    compare_models, estimate_singularity, fit, fit_escalation, r_squared, AlphaMode, FitOptions,
    FitResult, FitSpace, GrowthModel, ModelKind, SingularityEstimate,
};
pub use macrodynamics::{
    derivatives, integrate, integrate_with_transition, IntegratorConfig, MacroParams, MacroState,
    QuasiEquilibrium, RegimeSwitch, Termination, Trajectory,
};
pub use medium::{LinkState, Medium, NodeId, WeightBounds};
pub use qualstig::{run_wiki_sim, Article, EditorAgent, QualityReport, WikiConfig};
pub use quantstig::{
    choose_next, hebbian_update, rank_nodes, run_foraging, spread_activation, ActivationState,
    AntConfig, ForagingReport, HebbianConfig,
};
pub use timeseries::{Dataset, Point, TimeSeries};
