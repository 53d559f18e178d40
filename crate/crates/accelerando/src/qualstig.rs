//! Qualitative stigmergy: a collaborative-editing simulation.
//!
//! An [`Article`] is an append-only sequence of [`Revision`]s; every past
//! revision stays retrievable forever, so any deletion can be undone by a
//! later [`revert`]. Statements are opaque quality scalars in `[0, 1]` whose
//! true value is hidden from the editing agents: an agent perceives each
//! statement through Gaussian noise, drafts replacements whose quality
//! reflects its own skill, and commits a replacement only when the draft
//! *looks* better than the incumbent. Noisy perception occasionally lets a
//! worse statement through; the steady revisioning by many agents is what
//! pushes quality upward, not any single editor being right.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

/// Concentration of the draft-quality distribution around an agent's skill.
const DRAFT_CONCENTRATION: f64 = 10.0;

#[derive(Debug, Error)]
pub enum WikiError {
    #[error("article has no statements")]
    EmptyArticle,
    #[error("revision index {index} out of range ({len} revisions)")]
    BadIndex { index: usize, len: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

/// Editing agent identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

/// One quality-scored statement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Statement {
    /// Latent true quality in [0, 1]; agents never see this directly.
    pub quality: f64,
    pub author: AgentId,
}

/// What a revision did to its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EditAction {
    Add,
    Replace(usize),
    Delete(usize),
    Revert(usize),
}

/// One article version. Revisions are immutable once appended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Revision {
    pub statements: Vec<Statement>,
    pub author: AgentId,
    /// Index of the parent revision; `None` for the initial revision.
    pub parent: Option<usize>,
    pub action: EditAction,
}

/// An append-only versioned document.
#[derive(Debug, Clone, PartialEq)]
pub struct Article {
    history: Vec<Revision>,
}

impl Article {
    /// Starts an article with `statements` as revision 0.
    pub fn new(statements: Vec<Statement>, author: AgentId) -> Self {
        Self {
            history: vec![Revision {
                statements,
                author,
                parent: None,
                action: EditAction::Add,
            }],
        }
    }

    /// The current head revision (always the last history entry).
    pub fn head(&self) -> &Revision {
        self.history.last().expect("history is never empty")
    }

    pub fn head_index(&self) -> usize {
        self.history.len() - 1
    }

    pub fn revision(&self, index: usize) -> Option<&Revision> {
        self.history.get(index)
    }

    pub fn history(&self) -> &[Revision] {
        &self.history
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn append(&mut self, statements: Vec<Statement>, author: AgentId, action: EditAction) -> usize {
        self.history.push(Revision {
            statements,
            author,
            parent: Some(self.history.len() - 1),
            action,
        });
        self.history.len() - 1
    }

    /// Appends a revision with `statement` added at the end.
    pub fn add_statement(&mut self, statement: Statement, author: AgentId) -> usize {
        let mut statements = self.head().statements.clone();
        statements.push(statement);
        self.append(statements, author, EditAction::Add)
    }

    /// Appends a revision with the statement at `position` replaced.
    pub fn replace_statement(
        &mut self,
        position: usize,
        statement: Statement,
        author: AgentId,
    ) -> Result<usize, WikiError> {
        let head = self.head();
        if position >= head.statements.len() {
            return Err(WikiError::BadIndex {
                index: position,
                len: head.statements.len(),
            });
        }
        let mut statements = head.statements.clone();
        statements[position] = statement;
        Ok(self.append(statements, author, EditAction::Replace(position)))
    }

    /// Appends a revision with the statement at `position` removed.
    pub fn delete_statement(&mut self, position: usize, author: AgentId) -> Result<usize, WikiError> {
        let head = self.head();
        if position >= head.statements.len() {
            return Err(WikiError::BadIndex {
                index: position,
                len: head.statements.len(),
            });
        }
        let mut statements = head.statements.clone();
        statements.remove(position);
        Ok(self.append(statements, author, EditAction::Delete(position)))
    }

    /// Mean true quality of the head revision's statements.
    pub fn mean_quality(&self) -> f64 {
        let s = &self.head().statements;
        if s.is_empty() {
            return 0.0;
        }
        s.iter().map(|st| st.quality).sum::<f64>() / s.len() as f64
    }

    /// Minimum true quality of the head revision's statements.
    pub fn min_quality(&self) -> f64 {
        self.head()
            .statements
            .iter()
            .map(|st| st.quality)
            .fold(f64::INFINITY, f64::min)
    }

    /// Full history export for audit.
    pub fn history_json(&self) -> Value {
        serde_json::to_value(&self.history).expect("history serializes")
    }
}

/// Restores the statements of revision `target` as a new head revision.
///
/// The target revision itself is untouched; history grows by exactly one.
pub fn revert(article: &mut Article, target: usize, author: AgentId) -> Result<usize, WikiError> {
    let statements = article
        .revision(target)
        .ok_or(WikiError::BadIndex {
            index: target,
            len: article.len(),
        })?
        .statements
        .clone();
    Ok(article.append(statements, author, EditAction::Revert(target)))
}

/// How an agent picks its replacement target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EditPolicy {
    /// Replace the statement that looks worst.
    ImproveWorst,
    /// Replace a uniformly random statement (same acceptance rule).
    RandomReplace,
}

/// An editing agent.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EditorAgent {
    pub id: AgentId,
    /// Mean of the agent's draft-quality distribution, in (0, 1].
    pub skill: f64,
    /// Standard deviation of its perception noise, >= 0.
    pub noise: f64,
    pub policy: EditPolicy,
}

impl EditorAgent {
    pub fn new(id: AgentId, skill: f64, noise: f64, policy: EditPolicy) -> Result<Self, WikiError> {
        if !(skill > 0.0 && skill <= 1.0) {
            return Err(WikiError::InvalidConfig(format!(
                "skill must lie in (0, 1], got {skill}"
            )));
        }
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(WikiError::InvalidConfig(format!(
                "noise must be finite and >= 0, got {noise}"
            )));
        }
        Ok(Self {
            id,
            skill,
            noise,
            policy,
        })
    }
}

fn perceive_one(quality: f64, noise: f64, rng: &mut impl Rng) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    (quality + noise * z).clamp(0.0, 1.0)
}

/// The agent's noisy view of the head revision: one clamped-Gaussian draw
/// per statement, in statement order.
pub fn perceive(
    agent: &EditorAgent,
    article: &Article,
    rng: &mut impl Rng,
) -> Result<Vec<f64>, WikiError> {
    let statements = &article.head().statements;
    if statements.is_empty() {
        return Err(WikiError::EmptyArticle);
    }
    Ok(statements
        .iter()
        .map(|s| perceive_one(s.quality, agent.noise, rng))
        .collect())
}

/// Draws a draft quality from a Beta distribution with mean `skill`.
fn draw_draft_quality(skill: f64, rng: &mut impl Rng) -> f64 {
    let a = skill * DRAFT_CONCENTRATION;
    let b = ((1.0 - skill) * DRAFT_CONCENTRATION).max(1e-9);
    let beta = Beta::new(a, b).expect("valid beta parameters");
    beta.sample(rng).clamp(0.0, 1.0)
}

/// Applies one replacement attempt with an already-drafted statement.
///
/// The target position comes from the policy (worst-looking statement, or a
/// random one); the draft replaces it only when the draft's perceived
/// quality beats the target's perceived quality. Returns the new revision
/// index, or `None` when the edit was rejected (no revision appended).
///
/// RNG order: one draw per statement (perception), then for `RandomReplace`
/// one draw for the target choice, then one draw for the draft's own
/// perceived quality.
pub fn apply_edit(
    agent: &EditorAgent,
    article: &mut Article,
    draft_quality: f64,
    rng: &mut impl Rng,
) -> Result<Option<usize>, WikiError> {
    let perceived = perceive(agent, article, rng)?;
    let target = match agent.policy {
        EditPolicy::ImproveWorst => {
            // first-lowest perceived quality
            perceived
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .expect("non-empty")
        }
        EditPolicy::RandomReplace => rng.gen_range(0..perceived.len()),
    };
    let draft_perceived = perceive_one(draft_quality, agent.noise, rng);
    if draft_perceived > perceived[target] {
        let statement = Statement {
            quality: draft_quality,
            author: agent.id,
        };
        Ok(Some(article.replace_statement(target, statement, agent.id)?))
    } else {
        Ok(None)
    }
}

/// One full edit step: the agent perceives the article, drafts a statement
/// near its skill level, and attempts the policy's replacement. History
/// grows by at most one revision.
pub fn edit_step(
    agent: &EditorAgent,
    article: &mut Article,
    rng: &mut impl Rng,
) -> Result<Option<usize>, WikiError> {
    if article.head().statements.is_empty() {
        return Err(WikiError::EmptyArticle);
    }
    let draft = draw_draft_quality(agent.skill, rng);
    apply_edit(agent, article, draft, rng)
}

/// Simulation configuration.
#[derive(Debug, Clone, Serialize)]
pub struct WikiConfig {
    pub n_agents: usize,
    pub n_edits: usize,
    pub init_statements: usize,
    pub init_quality: f64,
    /// Agent skills are spaced uniformly across this range.
    pub skill_range: (f64, f64),
    pub noise: f64,
    pub policy: EditPolicy,
    pub seed: u64,
}

impl Default for WikiConfig {
    fn default() -> Self {
        Self {
            n_agents: 10,
            n_edits: 500,
            init_statements: 20,
            init_quality: 0.5,
            skill_range: (0.3, 0.9),
            noise: 0.1,
            policy: EditPolicy::ImproveWorst,
            seed: 0,
        }
    }
}

impl WikiConfig {
    pub fn validate(&self) -> Result<(), WikiError> {
        if self.n_agents == 0 || self.init_statements == 0 {
            return Err(WikiError::InvalidConfig(
                "n_agents and init_statements must be >= 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.init_quality) {
            return Err(WikiError::InvalidConfig(format!(
                "init_quality must lie in [0, 1], got {}",
                self.init_quality
            )));
        }
        let (lo, hi) = self.skill_range;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(WikiError::InvalidConfig(format!(
                "skill_range must satisfy 0 < lo <= hi <= 1, got ({lo}, {hi})"
            )));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(WikiError::InvalidConfig(format!(
                "noise must be finite and >= 0, got {}",
                self.noise
            )));
        }
        Ok(())
    }

    /// The agent roster: skills evenly spaced across `skill_range`.
    pub fn agents(&self) -> Vec<EditorAgent> {
        let (lo, hi) = self.skill_range;
        (0..self.n_agents)
            .map(|i| {
                let frac = if self.n_agents == 1 {
                    0.5
                } else {
                    i as f64 / (self.n_agents - 1) as f64
                };
                EditorAgent {
                    id: AgentId(i as u32),
                    skill: lo + (hi - lo) * frac,
                    noise: self.noise,
                    policy: self.policy,
                }
            })
            .collect()
    }
}

/// One point of the quality trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    /// Number of edit steps applied so far (0 = initial article).
    pub edit: usize,
    pub mean_quality: f64,
    pub min_quality: f64,
}

/// Result of a full simulation run.
#[derive(Debug, Clone)]
pub struct QualityReport {
    /// `n_edits + 1` points: the initial state plus one per edit step.
    pub trajectory: Vec<TrajectoryPoint>,
    pub final_n_statements: usize,
    pub final_mean_quality: f64,
    pub seed: u64,
    pub config: WikiConfig,
    pub article: Article,
}

impl QualityReport {
    pub fn initial_mean_quality(&self) -> f64 {
        self.trajectory[0].mean_quality
    }

    pub fn to_json(&self) -> Value {
        let trajectory: Vec<Value> = self
            .trajectory
            .iter()
            .map(|p| {
                json!({
                    "edit": p.edit,
                    "mean_quality": p.mean_quality,
                    "min_quality": p.min_quality,
                })
            })
            .collect();
        json!({
            "trajectory": trajectory,
            "final": {
                "n_statements": self.final_n_statements,
                "mean_quality": self.final_mean_quality,
            },
            "seed": self.seed,
            "config": serde_json::to_value(&self.config).expect("config serializes"),
        })
    }
}

/// Runs the editing simulation: agents are scheduled uniformly at random
/// (seeded) for `n_edits` edit steps on an article that starts with
/// `init_statements` statements of quality `init_quality`. Deterministic per
/// seed; the RNG is consumed in schedule order, one agent draw then that
/// agent's edit draws.
pub fn run_wiki_sim(cfg: &WikiConfig) -> Result<QualityReport, WikiError> {
    cfg.validate()?;
    let agents = cfg.agents();
    let init_author = AgentId(u32::MAX);
    let statements = vec![
        Statement {
            quality: cfg.init_quality,
            author: init_author,
        };
        cfg.init_statements
    ];
    let mut article = Article::new(statements, init_author);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut trajectory = Vec::with_capacity(cfg.n_edits + 1);
    trajectory.push(TrajectoryPoint {
        edit: 0,
        mean_quality: article.mean_quality(),
        min_quality: article.min_quality(),
    });
    for edit in 1..=cfg.n_edits {
        let agent = &agents[rng.gen_range(0..agents.len())];
        edit_step(agent, &mut article, &mut rng)?;
        trajectory.push(TrajectoryPoint {
            edit,
            mean_quality: article.mean_quality(),
            min_quality: article.min_quality(),
        });
    }

    Ok(QualityReport {
        final_n_statements: article.head().statements.len(),
        final_mean_quality: article.mean_quality(),
        trajectory,
        seed: cfg.seed,
        config: cfg.clone(),
        article,
    })
}
