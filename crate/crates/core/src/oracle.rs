//! Exact solver for micro-instances, used as ground truth in tests.
//!
//! The search builds schedules one work order at a time. At every step it
//! picks an aircraft to advance (and, between packages, which of that
//! aircraft's remaining packages to start), then a crew for the next work
//! order where every slot is either a qualified technician or left
//! uncovered. The work order goes to the earliest event point at which its
//! crew is free and on shift. Enumerating every such build order reaches
//! every active schedule, and an active schedule is optimal for this
//! objective because lateness never improves when work finishes later.
//!
//! This is independent from the decoder: it interleaves work orders of
//! different packages freely and does not follow chromosome order, so its
//! optimum is a lower bound on what any chromosome can decode to.

use crate::decoder::{Booking, Decoder, Schedule, SlotLocator, WoTime};
use crate::domain::{GeneKey, InstanceIndex, Minute, ProblemInstance, TechId};
use crate::ea::{Chromosome, Gene, StaffEntry};
use crate::error::{Error, Result};
use crate::fitness::{FitnessReport, Penalties};

/// Size limits beyond which the oracle refuses to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub genes: usize,
    pub technicians: usize,
    pub work_orders: usize,
    pub slots: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            genes: 6,
            technicians: 5,
            work_orders: 8,
            slots: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub optimal_penalty: f64,
    pub report: FitnessReport,
    /// One optimal timetable.
    pub witness: Schedule,
}

pub fn brute_force_solve(instance: &ProblemInstance, penalties: &Penalties) -> Result<OracleResult> {
    brute_force_solve_with(instance, penalties, OracleLimits::default())
}

pub fn brute_force_solve_with(
    instance: &ProblemInstance,
    penalties: &Penalties,
    limits: OracleLimits,
) -> Result<OracleResult> {
    let index = InstanceIndex::new(instance)?;
    let genes = index.genes().len();
    let work_orders: usize = index
        .genes()
        .iter()
        .map(|g| instance.work_package(g.wp).map_or(0, |wp| wp.work_orders.len()))
        .sum();
    let slots: usize = index
        .genes()
        .iter()
        .map(|g| instance.work_package(g.wp).map_or(0, |wp| wp.slot_count()))
        .sum();
    let too_big = [
        ("packages", genes, limits.genes),
        ("technicians", instance.roster.len(), limits.technicians),
        ("work orders", work_orders, limits.work_orders),
        ("staff slots", slots, limits.slots),
    ]
    .into_iter()
    .find(|(_, n, cap)| n > cap);
    if let Some((what, n, cap)) = too_big {
        return Err(Error::OracleRefused(format!("{n} {what} exceeds the limit of {cap}")));
    }

    let mut search = Search::new(instance, &index, *penalties);
    search.branch();
    let (uncovered, late) = search.best_counts;
    Ok(OracleResult {
        optimal_penalty: search.best,
        report: FitnessReport::new(uncovered, late, penalties),
        witness: search.best_schedule,
    })
}

struct AircraftState {
    /// Genes of this aircraft not yet started.
    pending: Vec<GeneKey>,
    /// Package in progress and the index of its next work order.
    current: Option<(GeneKey, usize)>,
    cursor: Minute,
}

struct Search<'a> {
    instance: &'a ProblemInstance,
    index: &'a InstanceIndex,
    penalties: Penalties,
    aircraft: Vec<AircraftState>,
    lanes: Vec<Vec<(Minute, Minute)>>,
    schedule: Schedule,
    uncovered: usize,
    late: usize,
    remaining_work_orders: usize,
    best: f64,
    best_counts: (usize, usize),
    best_schedule: Schedule,
}

impl<'a> Search<'a> {
    fn new(instance: &'a ProblemInstance, index: &'a InstanceIndex, penalties: Penalties) -> Self {
        let mut aircraft: Vec<AircraftState> = instance
            .aircraft
            .iter()
            .map(|a| AircraftState {
                pending: Vec::new(),
                current: None,
                cursor: a.landing,
            })
            .collect();
        let mut remaining_work_orders = 0;
        for key in index.genes() {
            aircraft[key.aircraft as usize].pending.push(*key);
            remaining_work_orders += instance.work_package(key.wp).map_or(0, |wp| wp.work_orders.len());
        }
        Self {
            instance,
            index,
            penalties,
            aircraft,
            lanes: vec![Vec::new(); instance.roster.len()],
            schedule: Schedule::with_technicians(instance.roster.len()),
            uncovered: 0,
            late: 0,
            remaining_work_orders,
            best: f64::INFINITY,
            best_counts: (0, 0),
            best_schedule: Schedule::default(),
        }
    }

    fn penalty(&self) -> f64 {
        self.uncovered as f64 * self.penalties.wp + self.late as f64 * self.penalties.lp
    }

    fn branch(&mut self) {
        // Uncovered and late counts only grow along a branch.
        if self.penalty() >= self.best {
            return;
        }
        if self.remaining_work_orders == 0 {
            self.best = self.penalty();
            self.best_counts = (self.uncovered, self.late);
            self.best_schedule = self.schedule.clone();
            for lane in &mut self.best_schedule.bookings {
                lane.sort_by_key(|b| b.start);
            }
            return;
        }
        for a in 0..self.aircraft.len() {
            match self.aircraft[a].current {
                Some((gene, wo)) => self.place_work_order(a, gene, wo),
                None => {
                    for p in 0..self.aircraft[a].pending.len() {
                        let gene = self.aircraft[a].pending.remove(p);
                        self.place_work_order(a, gene, 0);
                        self.aircraft[a].pending.insert(p, gene);
                    }
                }
            }
        }
    }

    /// Tries every crew for work order `wo` of `gene` on aircraft `a`.
    fn place_work_order(&mut self, a: usize, gene: GeneKey, wo: usize) {
        let Some(def) = self.instance.work_package(gene.wp) else {
            return;
        };
        let slots = def.work_orders[wo].slots.len();
        let mut crew: Vec<Option<TechId>> = Vec::with_capacity(slots);
        self.choose_crew(a, gene, wo, slots, &mut crew);
    }

    fn choose_crew(&mut self, a: usize, gene: GeneKey, wo: usize, slots: usize, crew: &mut Vec<Option<TechId>>) {
        if crew.len() == slots {
            self.commit(a, gene, wo, crew);
            return;
        }
        let slot = crew.len();
        let options: Vec<TechId> = self.index.qualified(gene.wp, wo, slot).to_vec();
        for tech in options {
            if crew.contains(&Some(tech)) {
                continue;
            }
            crew.push(Some(tech));
            self.choose_crew(a, gene, wo, slots, crew);
            crew.pop();
        }
        crew.push(None);
        self.choose_crew(a, gene, wo, slots, crew);
        crew.pop();
    }

    fn commit(&mut self, a: usize, gene: GeneKey, wo: usize, crew: &[Option<TechId>]) {
        let def = self.instance.work_package(gene.wp).expect("checked by caller");
        let duration = def.work_orders[wo].duration;
        let techs: Vec<TechId> = crew.iter().flatten().copied().collect();
        let ready = self.aircraft[a].cursor;
        let start = if techs.is_empty() {
            ready
        } else {
            match self.earliest_start(&techs, ready, duration) {
                Some(t) => t,
                None => return,
            }
        };
        let end = start + duration;
        let missing = crew.len() - techs.len();

        // Apply.
        let saved = (self.aircraft[a].current, self.aircraft[a].cursor, self.late);
        let last_wo = wo + 1 == def.work_orders.len();
        self.aircraft[a].current = if last_wo { None } else { Some((gene, wo + 1)) };
        self.aircraft[a].cursor = end;
        self.remaining_work_orders -= 1;
        self.uncovered += missing;
        // The cursor never moves back, so an aircraft is late from the
        // moment its cursor first passes departure.
        let departure = self.instance.aircraft[a].departure;
        if end > departure && saved.1 <= departure {
            self.late += 1;
        }
        for &tech in &techs {
            let lane = &mut self.lanes[tech.0 as usize];
            let at = lane.partition_point(|b| b.0 < start);
            lane.insert(at, (start, end));
        }
        let wo16 = wo as u16;
        self.schedule.wo_times.push(WoTime {
            gene,
            wo: wo16,
            start,
            end,
            uncovered: missing as u16,
        });
        for (slot, tech) in crew.iter().enumerate() {
            match tech {
                Some(tech) => self.schedule.bookings[tech.0 as usize].push(Booking {
                    tech: *tech,
                    start,
                    end,
                    gene,
                    wo: wo16,
                    slot: slot as u16,
                }),
                None => self.schedule.uncovered.push(SlotLocator {
                    gene,
                    wo: wo16,
                    slot: slot as u16,
                }),
            }
        }

        self.branch();

        // Undo.
        for (slot, tech) in crew.iter().enumerate().rev() {
            match tech {
                Some(tech) => {
                    self.schedule.bookings[tech.0 as usize].pop();
                }
                None => {
                    let popped = self.schedule.uncovered.pop();
                    debug_assert_eq!(popped.map(|u| u.slot), Some(slot as u16));
                }
            }
        }
        self.schedule.wo_times.pop();
        for &tech in &techs {
            let lane = &mut self.lanes[tech.0 as usize];
            let at = lane.iter().position(|b| *b == (start, end)).expect("booked above");
            lane.remove(at);
        }
        self.uncovered -= missing;
        self.remaining_work_orders += 1;
        self.aircraft[a].current = saved.0;
        self.aircraft[a].cursor = saved.1;
        self.late = saved.2;
    }

    /// Smallest event point `t >= ready` with `[t, t + duration)` inside a
    /// shift window of, and clear of bookings for, every listed technician.
    fn earliest_start(&self, techs: &[TechId], ready: Minute, duration: Minute) -> Option<Minute> {
        let horizon = self.index.horizon_end();
        let mut candidates = vec![ready];
        for tech in techs {
            candidates.extend(self.index.availability(*tech).iter().map(|w| w.0));
            candidates.extend(self.lanes[tech.0 as usize].iter().map(|b| b.1));
        }
        candidates.retain(|t| *t >= ready && *t + duration <= horizon);
        candidates.sort_unstable();
        candidates.dedup();
        candidates.into_iter().find(|&t| {
            techs.iter().all(|tech| {
                let in_shift = self
                    .index
                    .availability(*tech)
                    .iter()
                    .any(|w| w.0 <= t && t + duration <= w.1);
                in_shift
                    && self.lanes[tech.0 as usize]
                        .iter()
                        .all(|b| b.1 <= t || t + duration <= b.0)
            })
        })
    }
}

/// Best decoded result over every chromosome: all gene orders times all
/// qualified staff allocations.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationResult {
    pub best: FitnessReport,
    pub witness: Chromosome,
    pub chromosomes: u64,
}

/// Decodes every chromosome of a micro-instance. Refuses when the count
/// exceeds `max_chromosomes`.
pub fn enumerate_chromosomes(
    instance: &ProblemInstance,
    penalties: &Penalties,
    max_chromosomes: u64,
) -> Result<EnumerationResult> {
    let index = InstanceIndex::new(instance)?;
    if let Some((wp, wo, slot)) = index.unstaffable_slot(instance) {
        return Err(Error::Unsolvable { wp: wp.0, wo, slot });
    }
    let keys = index.genes().to_vec();
    let mut layouts: Vec<Vec<(u16, u16, Vec<TechId>)>> = Vec::with_capacity(keys.len());
    let mut total: u64 = (1..=keys.len() as u64).product();
    for key in &keys {
        let wp = instance.work_package(key.wp).ok_or(Error::UnknownWorkPackage(key.wp.0))?;
        let mut layout = Vec::new();
        for (wo, def) in wp.work_orders.iter().enumerate() {
            for slot in 0..def.slots.len() {
                let q = index.qualified(key.wp, wo, slot).to_vec();
                total = total.saturating_mul(q.len() as u64);
                layout.push((wo as u16, slot as u16, q));
            }
        }
        layouts.push(layout);
    }
    if total > max_chromosomes {
        return Err(Error::OracleRefused(format!(
            "{total} chromosomes exceeds the limit of {max_chromosomes}"
        )));
    }

    // Every allocation per gene, enumerated once.
    let allocations: Vec<Vec<Vec<StaffEntry>>> = layouts
        .iter()
        .map(|layout| {
            let mut all = vec![Vec::new()];
            for (wo, slot, options) in layout {
                all = all
                    .into_iter()
                    .flat_map(|prefix: Vec<StaffEntry>| {
                        options.iter().map(move |tech| {
                            let mut next = prefix.clone();
                            next.push(StaffEntry { wo: *wo, slot: *slot, tech: *tech });
                            next
                        })
                    })
                    .collect();
            }
            all
        })
        .collect();

    let mut decoder = Decoder::new(instance, &index);
    let mut best: Option<(FitnessReport, Chromosome)> = None;
    let mut count = 0u64;
    let mut order: Vec<usize> = (0..keys.len()).collect();
    let mut choice = vec![0usize; keys.len()];
    loop {
        // Odometer over allocations for the current order.
        loop {
            let chromosome = Chromosome::new(
                order
                    .iter()
                    .map(|&g| Gene {
                        key: keys[g],
                        entries: allocations[g][choice[g]].clone(),
                    })
                    .collect(),
            );
            let report = decoder.evaluate(&chromosome, penalties);
            count += 1;
            if best.as_ref().is_none_or(|(b, _)| report.fitness < b.fitness) {
                best = Some((report, chromosome));
            }
            let mut g = 0;
            while g < choice.len() {
                choice[g] += 1;
                if choice[g] < allocations[g].len() {
                    break;
                }
                choice[g] = 0;
                g += 1;
            }
            if g == choice.len() {
                break;
            }
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    let (best, witness) = best.expect("at least one chromosome");
    Ok(EnumerationResult {
        best,
        witness,
        chromosomes: count,
    })
}

/// Advances to the next lexicographic permutation; false after the last.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
