use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::log::{
    EpisodeLog, GenerationRecord, HaltReason, HaltRecord, InteractionRecord, LogRecord, PopulationSummary,
};
use super::reward::{RewardState, Stars, Weights};
use super::{select_parent, EpisodeConfig, Individual};
use crate::designer::Designer;
use crate::genome::{self, CandidateDesign, DesignSolution, GenomeError};
use crate::metrics::{evaluate, Elegance, MetricVector};
use crate::problem::DesignProblem;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EpisodeError {
    #[error("invalid episode configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Genome(#[from] GenomeError),
    #[error("episode has halted")]
    Halted,
    #[error("a presentation is awaiting its rating")]
    AwaitingRating,
    #[error("an interaction is due before evolution can continue")]
    InteractionDue,
    #[error("no presentation is pending")]
    NoPendingPresentation,
    #[error("generation cap reached; episode halted")]
    GenerationCapReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpisodeStatus {
    Running,
    AwaitingRating,
    Halted,
}

/// A candidate shown to the designer, waiting for its rating.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub generation: usize,
    /// Measure used to pick the candidate. Never shown to a human designer.
    pub measure: Elegance,
    pub population_index: usize,
    pub solution: DesignSolution,
    pub metrics: MetricVector,
}

impl Presentation {
    pub fn candidate(&self, problem: &DesignProblem) -> CandidateDesign {
        self.solution.to_classes(problem)
    }
}

/// What [`Episode::advance`] did.
#[derive(Debug, Clone, PartialEq)]
pub enum Progress {
    Generation(usize),
    Presented(Presentation),
    Halted(HaltReason),
}

/// One design episode: population, reward state, pending presentation and
/// the log. All randomness comes from a single seeded stream, so equal
/// (problem, config, ratings) give equal logs.
#[derive(Debug, Clone)]
pub struct Episode {
    problem: Arc<DesignProblem>,
    config: EpisodeConfig,
    mutation_rate: f64,
    rng: ChaCha8Rng,
    population: Vec<Individual>,
    generation: usize,
    reward: RewardState,
    pending: Option<Presentation>,
    last_presented: Option<usize>,
    halted: Option<HaltReason>,
    log: EpisodeLog,
}

impl Episode {
    pub fn new(problem: Arc<DesignProblem>, config: EpisodeConfig) -> Result<Self, EpisodeError> {
        config.validate().map_err(EpisodeError::Config)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let population = (0..config.population_size)
            .map(|_| {
                let solution = genome::random_solution(&problem, config.class_count, &mut rng)?;
                let metrics = evaluate(&problem, &solution);
                Ok(Individual { solution, metrics })
            })
            .collect::<Result<Vec<_>, GenomeError>>()?;
        Ok(Self {
            mutation_rate: config.effective_mutation_rate(problem.element_count()),
            problem,
            config,
            rng,
            population,
            generation: 0,
            reward: RewardState::new(),
            pending: None,
            last_presented: None,
            halted: None,
            log: EpisodeLog::default(),
        })
    }

    pub fn problem(&self) -> &Arc<DesignProblem> {
        &self.problem
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn reward(&self) -> &RewardState {
        &self.reward
    }

    pub fn weights(&self) -> Weights {
        self.reward.weights()
    }

    pub fn pending(&self) -> Option<&Presentation> {
        self.pending.as_ref()
    }

    pub fn log(&self) -> &EpisodeLog {
        &self.log
    }

    pub fn into_log(self) -> EpisodeLog {
        self.log
    }

    pub fn status(&self) -> EpisodeStatus {
        if self.halted.is_some() {
            EpisodeStatus::Halted
        } else if self.pending.is_some() {
            EpisodeStatus::AwaitingRating
        } else {
            EpisodeStatus::Running
        }
    }

    /// True at every `interaction_interval`-th generation until a candidate
    /// has been presented there.
    pub fn interaction_due(&self) -> bool {
        self.halted.is_none()
            && self.pending.is_none()
            && self.generation > 0
            && self.generation.is_multiple_of(self.config.interaction_interval)
            && self.last_presented != Some(self.generation)
    }

    fn metrics(&self) -> Vec<MetricVector> {
        self.population.iter().map(|i| i.metrics).collect()
    }

    /// Replaces the population with the next generation.
    pub fn step_generation(&mut self) -> Result<&GenerationRecord, EpisodeError> {
        if self.halted.is_some() {
            return Err(EpisodeError::Halted);
        }
        if self.pending.is_some() {
            return Err(EpisodeError::AwaitingRating);
        }
        if self.interaction_due() {
            return Err(EpisodeError::InteractionDue);
        }
        if self.generation >= self.config.max_generations {
            self.close(HaltReason::GenerationCap);
            return Err(EpisodeError::GenerationCapReached);
        }

        let weights = self.reward.weights();
        let size = self.config.population_size;
        let mut next = Vec::with_capacity(size);

        let mut by_coupling: Vec<usize> = (0..self.population.len()).collect();
        by_coupling.sort_by(|&a, &b| {
            self.population[a]
                .metrics
                .coupling
                .total_cmp(&self.population[b].metrics.coupling)
                .then(a.cmp(&b))
        });
        next.extend(
            by_coupling
                .iter()
                .take(self.config.elitism)
                .map(|&i| self.population[i].clone()),
        );

        while next.len() < size {
            let first = select_parent(&self.population, &weights, &mut self.rng);
            let second = select_parent(&self.population, &weights, &mut self.rng);
            let child = if self.rng.gen_bool(self.config.crossover_rate) {
                genome::crossover(&first.solution, &second.solution, &mut self.rng)?
            } else {
                first.solution.clone()
            };
            let solution = genome::mutate(&child, self.mutation_rate, &mut self.rng);
            let metrics = evaluate(&self.problem, &solution);
            next.push(Individual { solution, metrics });
        }

        self.population = next;
        self.generation += 1;
        let metrics = self.metrics();
        self.log.push(LogRecord::Generation(GenerationRecord {
            gen: self.generation,
            best: MetricVector::best_of(&metrics),
            mean: MetricVector::mean_of(&metrics),
            weights,
        }));
        match self.log.records.last() {
            Some(LogRecord::Generation(g)) => Ok(g),
            _ => unreachable!(),
        }
    }

    /// Draws an elegance measure uniformly and presents the individual that
    /// minimises it (lowest population index on ties).
    pub fn present_candidate(&mut self) -> Result<&Presentation, EpisodeError> {
        if self.halted.is_some() {
            return Err(EpisodeError::Halted);
        }
        if self.pending.is_some() {
            return Err(EpisodeError::AwaitingRating);
        }
        let measure = Elegance::ALL[self.rng.gen_range(0..Elegance::ALL.len())];
        let index = most_elegant(&self.population, measure);
        let chosen = &self.population[index];
        self.last_presented = Some(self.generation);
        Ok(self.pending.insert(Presentation {
            generation: self.generation,
            measure,
            population_index: index,
            solution: chosen.solution.clone(),
            metrics: chosen.metrics,
        }))
    }

    /// Consumes the pending presentation and folds its rating into the reward
    /// state and the selection weights.
    pub fn apply_rating(&mut self, stars: Stars) -> Result<&InteractionRecord, EpisodeError> {
        if self.halted.is_some() {
            return Err(EpisodeError::Halted);
        }
        let presentation = self.pending.take().ok_or(EpisodeError::NoPendingPresentation)?;
        self.reward.record(presentation.measure, stars);
        self.log.push(LogRecord::Interaction(InteractionRecord {
            generation: presentation.generation,
            chosen_measure: presentation.measure,
            candidate: presentation.candidate(&self.problem),
            candidate_metrics: presentation.metrics,
            stars,
            mean_rewards_after: self.reward.mean_rewards(),
            weights_after: self.reward.weights(),
        }));
        match self.log.records.last() {
            Some(LogRecord::Interaction(i)) => Ok(i),
            _ => unreachable!(),
        }
    }

    /// Designer-initiated stop. Any pending presentation is discarded.
    pub fn halt(&mut self) -> Result<&EpisodeLog, EpisodeError> {
        if self.halted.is_some() {
            return Err(EpisodeError::Halted);
        }
        self.close(HaltReason::Designer);
        Ok(&self.log)
    }

    fn close(&mut self, reason: HaltReason) {
        self.pending = None;
        self.halted = Some(reason);
        let metrics = self.metrics();
        self.log.push(LogRecord::Halt(HaltRecord {
            gen: self.generation,
            reason,
            final_population_summary: PopulationSummary {
                best: MetricVector::best_of(&metrics),
                mean: MetricVector::mean_of(&metrics),
                mean_rewards: self.reward.mean_rewards(),
                weights: self.reward.weights(),
                interactions: self.reward.total_ratings(),
            },
        }));
    }

    /// Does the next thing the protocol allows: present at an interaction
    /// point, halt at the generation cap, otherwise evolve one generation.
    pub fn advance(&mut self) -> Result<Progress, EpisodeError> {
        if self.halted.is_some() {
            return Err(EpisodeError::Halted);
        }
        if self.pending.is_some() {
            return Err(EpisodeError::AwaitingRating);
        }
        if self.interaction_due() {
            return self.present_candidate().map(|p| Progress::Presented(p.clone()));
        }
        if self.generation >= self.config.max_generations {
            self.close(HaltReason::GenerationCap);
            return Ok(Progress::Halted(HaltReason::GenerationCap));
        }
        self.step_generation().map(|g| Progress::Generation(g.gen))
    }

    /// Runs to the generation cap, answering every presentation with the
    /// given designer.
    pub fn run_with(&mut self, designer: &mut dyn Designer) -> Result<&EpisodeLog, EpisodeError> {
        loop {
            match self.advance()? {
                Progress::Generation(_) => {}
                Progress::Presented(p) => {
                    let stars = designer.rate(&p.metrics, p.measure);
                    self.apply_rating(stars)?;
                }
                Progress::Halted(_) => return Ok(&self.log),
            }
        }
    }
}

fn most_elegant(population: &[Individual], measure: Elegance) -> usize {
    let mut best = 0;
    for (i, ind) in population.iter().enumerate().skip(1) {
        if ind.metrics.elegance(measure) < population[best].metrics.elegance(measure) {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designer::DesignerSpec;
    use crate::problem::{generate_fixture, ReferenceScale};

    fn cbs() -> Arc<DesignProblem> {
        Arc::new(ReferenceScale::Cbs.fixture(1))
    }

    fn small_config(seed: u64) -> EpisodeConfig {
        EpisodeConfig {
            population_size: 20,
            max_generations: 30,
            interaction_interval: 5,
            seed,
            ..Default::default()
        }
    }

    fn stars(n: i64) -> Stars {
        Stars::new(n).unwrap()
    }

    #[test]
    fn initial_population_is_valid() {
        let e = Episode::new(cbs(), small_config(1)).unwrap();
        assert_eq!(e.population().len(), 20);
        assert_eq!(e.status(), EpisodeStatus::Running);
        assert!(e
            .population()
            .iter()
            .all(|i| i.solution.class_sizes().iter().all(|&s| s > 0)));
    }

    #[test]
    fn bad_config_rejected() {
        let cfg = EpisodeConfig {
            class_count: 1,
            ..small_config(1)
        };
        assert!(matches!(Episode::new(cbs(), cfg), Err(EpisodeError::Genome(_))));
        let cfg = EpisodeConfig {
            population_size: 1,
            elitism: 0,
            ..small_config(1)
        };
        assert!(matches!(Episode::new(cbs(), cfg), Err(EpisodeError::Config(_))));
    }

    #[test]
    fn pause_contract() {
        let mut e = Episode::new(cbs(), small_config(2)).unwrap();
        for _ in 0..5 {
            e.step_generation().unwrap();
        }
        assert!(e.interaction_due());
        assert_eq!(e.step_generation().unwrap_err(), EpisodeError::InteractionDue);
        let p = e.present_candidate().unwrap().clone();
        assert_eq!(p.generation, 5);
        assert_eq!(e.status(), EpisodeStatus::AwaitingRating);
        assert_eq!(e.step_generation().unwrap_err(), EpisodeError::AwaitingRating);
        assert_eq!(e.present_candidate().unwrap_err(), EpisodeError::AwaitingRating);
        e.apply_rating(stars(4)).unwrap();
        assert_eq!(
            e.apply_rating(stars(4)).unwrap_err(),
            EpisodeError::NoPendingPresentation
        );
        assert!(!e.interaction_due());
        e.step_generation().unwrap();
    }

    #[test]
    fn first_rating_updates_weights() {
        let mut e = Episode::new(cbs(), small_config(3)).unwrap();
        let measure = e.present_candidate().unwrap().measure;
        let rec = e.apply_rating(stars(5)).unwrap().clone();
        assert_eq!(rec.chosen_measure, measure);
        assert_eq!(rec.weights_after.elegance[measure.index()], 0.2);
        assert_eq!(rec.weights_after.coupling, 0.8);
        assert_eq!(rec.mean_rewards_after[measure.index()], 5.0);
    }

    #[test]
    fn presentation_picks_lowest_value_then_lowest_index() {
        let e = Episode::new(cbs(), small_config(4)).unwrap();
        for m in Elegance::ALL {
            let idx = most_elegant(e.population(), m);
            let v = e.population()[idx].metrics.elegance(m);
            for (i, ind) in e.population().iter().enumerate() {
                assert!(ind.metrics.elegance(m) > v || (ind.metrics.elegance(m) == v && i >= idx));
            }
        }
    }

    #[test]
    fn dominant_individual_is_always_presented() {
        let mut e = Episode::new(cbs(), small_config(5)).unwrap();
        let zero = MetricVector {
            coupling: 0.0,
            nac: 0.0,
            ec: 0.0,
            iu: 0.0,
            atmr: 0.0,
        };
        e.population[7].metrics = zero;
        e.population[12].metrics = zero;
        for _ in 0..20 {
            let p = e.present_candidate().unwrap();
            assert_eq!(p.population_index, 7);
            e.apply_rating(stars(3)).unwrap();
        }
    }

    #[test]
    fn measures_are_drawn_uniformly() {
        let p = Arc::new(generate_fixture(3, 3, 4, 1).unwrap());
        let cfg = EpisodeConfig {
            population_size: 2,
            class_count: 2,
            seed: 9,
            ..Default::default()
        };
        let mut e = Episode::new(p, cfg).unwrap();
        let mut counts = [0usize; 4];
        for _ in 0..4_000 {
            counts[e.present_candidate().unwrap().measure.index()] += 1;
            e.apply_rating(stars(1)).unwrap();
        }
        let sd = (4_000.0f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - 1_000.0).abs() <= 3.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn elitism_keeps_best_coupling() {
        let mut e = Episode::new(
            cbs(),
            EpisodeConfig {
                interaction_interval: 1000,
                ..small_config(6)
            },
        )
        .unwrap();
        let mut prev = f64::INFINITY;
        for _ in 0..30 {
            let best = e.step_generation().unwrap().best.coupling;
            assert!(best <= prev);
            prev = best;
        }
        assert_eq!(e.step_generation().unwrap_err(), EpisodeError::GenerationCapReached);
        assert_eq!(e.status(), EpisodeStatus::Halted);
        assert_eq!(e.log().generations().count(), 30);
        assert_eq!(e.log().halt().unwrap().reason, HaltReason::GenerationCap);
    }

    #[test]
    fn selection_only_collapses_diversity() {
        let cfg = EpisodeConfig {
            mutation_rate: Some(0.0),
            crossover_rate: 0.0,
            interaction_interval: 1000,
            max_generations: 60,
            ..small_config(7)
        };
        let mut e = Episode::new(cbs(), cfg).unwrap();
        let initial: Vec<_> = e.population().iter().map(|i| i.solution.clone()).collect();
        for _ in 0..60 {
            e.step_generation().unwrap();
        }
        // every individual is a copy of some initial individual
        assert!(e.population().iter().all(|i| initial.contains(&i.solution)));
        let mut distinct: Vec<_> = e
            .population()
            .iter()
            .map(|i| i.solution.assignment().to_vec())
            .collect();
        distinct.sort();
        distinct.dedup();
        assert!(distinct.len() < initial.len() / 2, "{} distinct", distinct.len());
        let best_initial = initial
            .iter()
            .map(|s| evaluate(e.problem(), s).coupling)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(e.log().generations().last().unwrap().best.coupling, best_initial);
    }

    #[test]
    fn halt_before_interaction() {
        let mut e = Episode::new(cbs(), small_config(8)).unwrap();
        for _ in 0..3 {
            e.step_generation().unwrap();
        }
        let log = e.halt().unwrap().clone();
        assert_eq!(log.interactions().count(), 0);
        assert_eq!(log.generations().count(), 3);
        let h = log.halt().unwrap();
        assert_eq!(h.gen, 3);
        assert_eq!(h.final_population_summary.weights.coupling, 1.0);
        assert_eq!(e.halt().unwrap_err(), EpisodeError::Halted);
        assert_eq!(e.apply_rating(stars(3)).unwrap_err(), EpisodeError::Halted);
    }

    #[test]
    fn halt_discards_pending() {
        let mut e = Episode::new(cbs(), small_config(9)).unwrap();
        e.present_candidate().unwrap();
        e.halt().unwrap();
        assert!(e.pending().is_none());
        assert_eq!(e.status(), EpisodeStatus::Halted);
    }

    #[test]
    fn constant_designer_converges_weights() {
        let mut e = Episode::new(
            cbs(),
            EpisodeConfig {
                max_generations: 200,
                interaction_interval: 2,
                ..small_config(10)
            },
        )
        .unwrap();
        let mut d = "constant:3".parse::<DesignerSpec>().unwrap().build();
        let log = e.run_with(d.as_mut()).unwrap();
        assert_eq!(log.interactions().count(), 100);
        let w = log.halt().unwrap().final_population_summary.weights;
        for x in w.elegance {
            assert!((x - 0.12).abs() < 1e-12);
        }
        assert!((w.coupling - 0.52).abs() < 1e-12);
    }

    #[test]
    fn identical_inputs_identical_logs() {
        let run = || {
            let mut e = Episode::new(cbs(), small_config(11)).unwrap();
            let mut d = "purist:ec".parse::<DesignerSpec>().unwrap().build();
            e.run_with(d.as_mut()).unwrap().to_jsonl_string()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn run_with_interaction_count() {
        let mut e = Episode::new(cbs(), small_config(12)).unwrap();
        let mut d = "random:4".parse::<DesignerSpec>().unwrap().build();
        let log = e.run_with(d.as_mut()).unwrap();
        // interactions at generations 5, 10, ..., 30
        assert_eq!(log.interactions().count(), 6);
        assert_eq!(log.generations().count(), 30);
        let gens: Vec<_> = log.interactions().map(|i| i.generation).collect();
        assert_eq!(gens, vec![5, 10, 15, 20, 25, 30]);
    }
}
