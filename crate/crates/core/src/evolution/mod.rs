//! Reward-steered evolution of class designs.
//!
//! A single population is evolved with generational replacement. Parents are
//! picked by binary tournaments whose comparison objective is itself drawn at
//! random, with probabilities given by the current selection [`Weights`].
//! Before the designer has rated anything the weights put all mass on
//! coupling, so the search starts as a plain coupling minimiser and drifts
//! towards whichever elegance measures the designer rewards.

mod episode;
pub mod log;
pub mod reward;

pub use episode::{Episode, EpisodeError, EpisodeStatus, Presentation, Progress};
pub use log::{EpisodeLog, GenerationRecord, HaltReason, HaltRecord, InteractionRecord, LogRecord, PopulationSummary};
pub use reward::{RewardState, Stars, Weights};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::genome::DesignSolution;
use crate::metrics::{MetricVector, Objective};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpisodeConfig {
    pub population_size: usize,
    #[serde(rename = "k")]
    pub class_count: usize,
    pub max_generations: usize,
    /// Per-element move probability; `None` means 2 / element count.
    pub mutation_rate: Option<f64>,
    pub crossover_rate: f64,
    /// Best-by-coupling individuals copied unchanged into the next generation.
    pub elitism: usize,
    /// Generations between designer presentations.
    pub interaction_interval: usize,
    pub seed: u64,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            class_count: 5,
            max_generations: 1000,
            mutation_rate: None,
            crossover_rate: 0.9,
            elitism: 1,
            interaction_interval: 10,
            seed: 1,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.population_size < 2 {
            return Err(format!(
                "population_size must be at least 2, got {}",
                self.population_size
            ));
        }
        if self.interaction_interval < 1 {
            return Err("interaction_interval must be at least 1".into());
        }
        if self.elitism >= self.population_size {
            return Err(format!(
                "elitism ({}) must be smaller than population_size ({})",
                self.elitism, self.population_size
            ));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(format!("crossover_rate {} outside [0, 1]", self.crossover_rate));
        }
        if let Some(m) = self.mutation_rate {
            if !(0.0..=1.0).contains(&m) {
                return Err(format!("mutation_rate {m} outside [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn effective_mutation_rate(&self, element_count: usize) -> f64 {
        self.mutation_rate
            .unwrap_or_else(|| (2.0 / element_count as f64).min(1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub solution: DesignSolution,
    pub metrics: MetricVector,
}

/// Picks the tournament objective: coupling with probability `w_c`, each
/// elegance measure with its own weight.
pub fn draw_objective<R: Rng + ?Sized>(weights: &Weights, rng: &mut R) -> Objective {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for objective in Objective::ALL {
        acc += weights.get(objective);
        if u < acc {
            return objective;
        }
    }
    // Rounding left the cumulative sum a hair under 1.
    Objective::ALL
        .into_iter()
        .rev()
        .find(|&o| weights.get(o) > 0.0)
        .unwrap_or(Objective::Coupling)
}

/// Binary tournament on a randomly drawn objective. Two distinct individuals
/// are compared and the lower value wins; ties are settled by a fair coin.
pub fn select_parent<'a, R: Rng + ?Sized>(
    population: &'a [Individual],
    weights: &Weights,
    rng: &mut R,
) -> &'a Individual {
    assert!(!population.is_empty(), "tournament on an empty population");
    let objective = draw_objective(weights, rng);
    if population.len() == 1 {
        return &population[0];
    }
    let n = population.len();
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let (a, b) = (&population[i], &population[j]);
    let (va, vb) = (a.metrics.get(objective), b.metrics.get(objective));
    if va < vb {
        a
    } else if vb < va {
        b
    } else if rng.gen_bool(0.5) {
        a
    } else {
        b
    }
}
