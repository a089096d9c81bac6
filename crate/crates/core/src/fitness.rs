//! Penalty fitness: `uncovered × wp + late × lp`, lower is better.

use serde::{Deserialize, Serialize};

use crate::decoder::Schedule;
use crate::domain::ProblemInstance;

/// Penalty weights per uncovered staff slot and per late aircraft.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalties {
    pub wp: f64,
    pub lp: f64,
}

impl Default for Penalties {
    fn default() -> Self {
        Self { wp: 1.0, lp: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    /// Staff slots left unstaffed.
    pub uncovered: usize,
    /// Aircraft whose last work order ends after departure.
    pub late: usize,
    pub fitness: f64,
}

impl FitnessReport {
    pub fn new(uncovered: usize, late: usize, penalties: &Penalties) -> Self {
        Self {
            uncovered,
            late,
            fitness: uncovered as f64 * penalties.wp + late as f64 * penalties.lp,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.uncovered == 0 && self.late == 0
    }
}

pub fn evaluate(schedule: &Schedule, instance: &ProblemInstance, penalties: &Penalties) -> FitnessReport {
    let late = schedule
        .completion_times(instance.aircraft.len())
        .iter()
        .zip(&instance.aircraft)
        .filter(|(done, ac)| done.is_some_and(|t| t > ac.departure))
        .count();
    FitnessReport::new(schedule.uncovered.len(), late, penalties)
}
