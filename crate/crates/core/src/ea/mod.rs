//! Steady-state evolutionary search over package orders and staff
//! allocations.

mod chromosome;
mod operators;
mod selection;

pub use chromosome::{Chromosome, Gene, StaffEntry};
pub use operators::{crossover, mutate, reassign, relocate, Mutation};
pub use selection::{tournament_select, tournament_worst};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decoder::Decoder;
use crate::domain::{InstanceIndex, ProblemInstance};
use crate::error::{Error, Result};
use crate::fitness::{FitnessReport, Penalties};
use crate::rng::{rng_from_seed, SolverRng};

/// Solver parameters. Missing fields in a JSON parameter file take the
/// defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EaParams {
    pub pop_size: usize,
    /// Total fitness evaluations, including the initial population.
    pub eval_budget: usize,
    /// Parent tournament size.
    pub ks: usize,
    /// Replacement tournament size.
    pub kr: usize,
    pub penalties: Penalties,
    /// Chance that a generation mutates a copy of one parent instead of
    /// recombining two.
    pub clone_probability: f64,
    pub seed: u64,
    /// Stop as soon as some individual reaches fitness zero. Nothing can
    /// improve on it, so this only saves time.
    pub stop_at_zero: bool,
}

impl Default for EaParams {
    fn default() -> Self {
        Self {
            pop_size: 1500,
            eval_budget: 200_000,
            ks: 2,
            kr: 2,
            penalties: Penalties::default(),
            clone_probability: 0.5,
            seed: 0,
            stop_at_zero: true,
        }
    }
}

impl EaParams {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::Config("population size must be at least 2".into()));
        }
        if self.ks == 0 || self.kr == 0 {
            return Err(Error::Config("tournament sizes must be at least 1".into()));
        }
        if self.eval_budget < self.pop_size {
            return Err(Error::Config(format!(
                "evaluation budget {} is smaller than the population {}",
                self.eval_budget, self.pop_size
            )));
        }
        if !(0.0..=1.0).contains(&self.clone_probability) {
            return Err(Error::Config("clone probability must lie in [0, 1]".into()));
        }
        let Penalties { wp, lp } = self.penalties;
        if !(wp.is_finite() && lp.is_finite() && wp >= 0.0 && lp >= 0.0) {
            return Err(Error::Config("penalty weights must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub report: FitnessReport,
}

impl Individual {
    pub fn fitness(&self) -> f64 {
        self.report.fitness
    }
}

/// A point where the best fitness in the population dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    /// One-based evaluation count at which the new best was scored.
    pub evaluation: usize,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub best: Individual,
    /// Evaluation count at which `best` was first reached.
    pub last_improvement: usize,
    pub evaluations: usize,
    pub eval_budget: usize,
    pub trace: Vec<Improvement>,
}

impl RunResult {
    pub fn best_fitness(&self) -> f64 {
        self.best.fitness()
    }

    /// Share of the budget spent before the final best appeared, in percent.
    pub fn pct_evals(&self) -> f64 {
        100.0 * self.last_improvement as f64 / self.eval_budget as f64
    }
}

/// What happened in one steady-state step, reported to an observer.
#[derive(Debug)]
pub struct StepEvent<'p> {
    pub evaluation: usize,
    pub child_fitness: f64,
    /// Population slot the child took over, if it was accepted.
    pub replaced: Option<usize>,
    pub population: &'p [Individual],
}

/// Runs the solver with the default no-op observer.
pub fn run_ea(instance: &ProblemInstance, params: &EaParams) -> Result<RunResult> {
    run_ea_with_observer(instance, params, |_| {})
}

/// Runs the steady-state loop: pick parents by tournament, build a child by
/// recombination or cloning, mutate it, and let it replace the loser of a
/// reverse tournament when strictly better.
pub fn run_ea_with_observer<F>(instance: &ProblemInstance, params: &EaParams, mut observe: F) -> Result<RunResult>
where
    F: FnMut(&StepEvent<'_>),
{
    params.validate()?;
    let index = InstanceIndex::new(instance)?;
    if let Some((wp, wo, slot)) = index.unstaffable_slot(instance) {
        return Err(Error::Unsolvable { wp: wp.0, wo, slot });
    }
    let mut rng = rng_from_seed(params.seed);
    let mut decoder = Decoder::new(instance, &index);
    let mut tracker = BestTracker::default();

    let mut population = Vec::with_capacity(params.pop_size);
    for _ in 0..params.pop_size {
        let chromosome = Chromosome::random(instance, &index, &mut rng)?;
        let report = decoder.evaluate(&chromosome, &params.penalties);
        tracker.offer(population.len(), report.fitness);
        population.push(Individual { chromosome, report });
        if params.stop_at_zero && tracker.fitness == 0.0 {
            break;
        }
    }
    let mut fitness: Vec<f64> = population.iter().map(Individual::fitness).collect();
    let mut evaluations = population.len();

    while evaluations < params.eval_budget && !(params.stop_at_zero && tracker.fitness == 0.0) {
        let mut child = breed(&population, &fitness, &index, params, &mut rng)?;
        child.report = decoder.evaluate(&child.chromosome, &params.penalties);
        evaluations += 1;

        let loser = tournament_worst(&fitness, params.kr, &mut rng);
        let replaced = (child.fitness() < fitness[loser]).then(|| {
            fitness[loser] = child.fitness();
            tracker.offer_at(evaluations, loser, child.fitness());
            population[loser] = child.clone();
            loser
        });
        observe(&StepEvent {
            evaluation: evaluations,
            child_fitness: child.fitness(),
            replaced,
            population: &population,
        });
    }

    Ok(RunResult {
        seed: params.seed,
        best: population[tracker.slot].clone(),
        last_improvement: tracker.evaluation,
        evaluations,
        eval_budget: params.eval_budget,
        trace: tracker.trace,
    })
}

fn breed(
    population: &[Individual],
    fitness: &[f64],
    index: &InstanceIndex,
    params: &EaParams,
    rng: &mut SolverRng,
) -> Result<Individual> {
    let first = tournament_select(fitness, params.ks, rng);
    let mut chromosome = if rng.gen_bool(params.clone_probability) {
        population[first].chromosome.clone()
    } else {
        let second = tournament_select(fitness, params.ks, rng);
        crossover(&population[first].chromosome, &population[second].chromosome)?
    };
    mutate(&mut chromosome, index, rng);
    Ok(Individual {
        chromosome,
        report: population[first].report,
    })
}

/// Follows the population minimum. Because a child replaces only something
/// strictly worse than itself, the best member is never evicted and the
/// population minimum equals the best fitness seen so far.
#[derive(Debug)]
struct BestTracker {
    fitness: f64,
    slot: usize,
    evaluation: usize,
    trace: Vec<Improvement>,
}

impl Default for BestTracker {
    fn default() -> Self {
        Self {
            fitness: f64::INFINITY,
            slot: 0,
            evaluation: 0,
            trace: Vec::new(),
        }
    }
}

impl BestTracker {
    fn offer(&mut self, slot: usize, fitness: f64) {
        self.offer_at(slot + 1, slot, fitness);
    }

    fn offer_at(&mut self, evaluation: usize, slot: usize, fitness: f64) {
        if fitness < self.fitness {
            self.fitness = fitness;
            self.slot = slot;
            self.evaluation = evaluation;
            self.trace.push(Improvement { evaluation, fitness });
        }
    }
}
