//! Chromosome decoding: packages are placed in chromosome order, work orders
//! of a package back to back, and each staff entry is booked at the work
//! order's current interval or, failing that, at the earliest later start at
//! which the whole crew committed so far is free. Entries that cannot be
//! booked are left uncovered.

use serde::{Deserialize, Serialize};

use crate::domain::{GeneKey, InstanceIndex, Minute, ProblemInstance, TechId};
use crate::ea::Chromosome;
use crate::error::Result;
use crate::fitness::{FitnessReport, Penalties};

/// One technician committed to one work-order slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Booking {
    pub tech: TechId,
    pub start: Minute,
    pub end: Minute,
    pub gene: GeneKey,
    pub wo: u16,
    pub slot: u16,
}

/// A staff slot no technician was booked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotLocator {
    pub gene: GeneKey,
    pub wo: u16,
    pub slot: u16,
}

/// Placement of one work order of one package occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WoTime {
    pub gene: GeneKey,
    pub wo: u16,
    pub start: Minute,
    pub end: Minute,
    pub uncovered: u16,
}

/// Decoded timetable. `wo_times` is in placement order; each technician's
/// bookings are sorted by start.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub wo_times: Vec<WoTime>,
    pub bookings: Vec<Vec<Booking>>,
    pub uncovered: Vec<SlotLocator>,
}

impl Schedule {
    pub fn with_technicians(n: usize) -> Self {
        Self {
            wo_times: Vec::new(),
            bookings: vec![Vec::new(); n],
            uncovered: Vec::new(),
        }
    }

    fn reset(&mut self, technicians: usize) {
        self.wo_times.clear();
        self.uncovered.clear();
        self.bookings.resize_with(technicians, Vec::new);
        self.bookings.iter_mut().for_each(Vec::clear);
    }

    /// Latest work-order end per aircraft, `None` for aircraft with nothing
    /// placed.
    pub fn completion_times(&self, n_aircraft: usize) -> Vec<Option<Minute>> {
        let mut out = vec![None; n_aircraft];
        for t in &self.wo_times {
            if let Some(slot) = out.get_mut(t.gene.aircraft as usize) {
                *slot = Some(slot.map_or(t.end, |e: Minute| e.max(t.end)));
            }
        }
        out
    }
}

/// Whether `[start, start + duration)` overlaps nothing in `bookings`, which
/// are sorted and pairwise disjoint.
fn clear_of(bookings: &[Booking], start: Minute, end: Minute) -> std::result::Result<(), Minute> {
    let i = bookings.partition_point(|b| b.end <= start);
    match bookings.get(i) {
        Some(b) if b.start < end => Err(b.end),
        _ => Ok(()),
    }
}

/// Earliest time `>= start` at which `tech` could begin, considering only
/// that technician. Returns `start` when already feasible.
fn next_feasible(
    windows: &[(Minute, Minute)],
    bookings: &[Booking],
    start: Minute,
    duration: Minute,
) -> Option<Minute> {
    let mut t = start;
    loop {
        let window = windows.iter().find(|(_, w1)| t + duration <= *w1)?;
        if t < window.0 {
            t = window.0;
        }
        if t + duration > window.1 {
            continue;
        }
        match clear_of(bookings, t, t + duration) {
            Ok(()) => return Some(t),
            Err(after) => t = after,
        }
    }
}

/// Reusable decoding state bound to one instance.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    instance: &'a ProblemInstance,
    index: &'a InstanceIndex,
    schedule: Schedule,
    ready: Vec<Minute>,
    crew: Vec<(u16, TechId)>,
}

impl<'a> Decoder<'a> {
    pub fn new(instance: &'a ProblemInstance, index: &'a InstanceIndex) -> Self {
        Self {
            instance,
            index,
            schedule: Schedule::with_technicians(instance.roster.len()),
            ready: Vec::with_capacity(instance.aircraft.len()),
            crew: Vec::new(),
        }
    }

    pub fn instance(&self) -> &'a ProblemInstance {
        self.instance
    }

    pub fn index(&self) -> &'a InstanceIndex {
        self.index
    }

    /// Earliest common start `>= start` for the committed crew plus `extra`.
    fn common_start(&self, extra: TechId, start: Minute, duration: Minute) -> Option<Minute> {
        let horizon = self.index.horizon_end();
        let mut t = start;
        'search: loop {
            if t + duration > horizon {
                return None;
            }
            let techs = self.crew.iter().map(|(_, tech)| *tech).chain(std::iter::once(extra));
            for tech in techs {
                let found = next_feasible(
                    self.index.availability(tech),
                    &self.schedule.bookings[tech.0 as usize],
                    t,
                    duration,
                )?;
                if found != t {
                    t = found;
                    continue 'search;
                }
            }
            return Some(t);
        }
    }

    /// Decodes into the internal buffer and returns it.
    pub fn decode(&mut self, chromosome: &Chromosome) -> &Schedule {
        let instance = self.instance;
        self.schedule.reset(instance.roster.len());
        self.ready.clear();
        self.ready.extend(instance.aircraft.iter().map(|a| a.landing));

        for gene in &chromosome.genes {
            let Some(wp) = instance.work_package(gene.key.wp) else {
                continue;
            };
            let aircraft = gene.key.aircraft as usize;
            let mut cursor = self.ready[aircraft];
            let mut offset = 0;
            for (wo_index, wo) in wp.work_orders.iter().enumerate() {
                let entries = &gene.entries[offset..offset + wo.slots.len()];
                offset += wo.slots.len();
                let mut start = cursor;
                let mut uncovered = 0u16;
                self.crew.clear();
                for entry in entries {
                    let duplicate = self.crew.iter().any(|(_, t)| *t == entry.tech);
                    let placed = if duplicate {
                        None
                    } else {
                        self.common_start(entry.tech, start, wo.duration)
                    };
                    match placed {
                        Some(t) => {
                            start = t;
                            self.crew.push((entry.slot, entry.tech));
                        }
                        None => {
                            uncovered += 1;
                            self.schedule.uncovered.push(SlotLocator {
                                gene: gene.key,
                                wo: wo_index as u16,
                                slot: entry.slot,
                            });
                        }
                    }
                }
                let end = start + wo.duration;
                for &(slot, tech) in &self.crew {
                    let list = &mut self.schedule.bookings[tech.0 as usize];
                    let at = list.partition_point(|b| b.start < start);
                    list.insert(
                        at,
                        Booking {
                            tech,
                            start,
                            end,
                            gene: gene.key,
                            wo: wo_index as u16,
                            slot,
                        },
                    );
                }
                self.schedule.wo_times.push(WoTime {
                    gene: gene.key,
                    wo: wo_index as u16,
                    start,
                    end,
                    uncovered,
                });
                cursor = end;
            }
            self.ready[aircraft] = cursor;
        }
        &self.schedule
    }

    /// Decodes and scores in one pass.
    pub fn evaluate(&mut self, chromosome: &Chromosome, penalties: &Penalties) -> FitnessReport {
        self.decode(chromosome);
        let uncovered = self.schedule.uncovered.len();
        let late = self
            .instance
            .aircraft
            .iter()
            .zip(&self.ready)
            .filter(|(a, ready)| **ready > a.departure)
            .count();
        FitnessReport::new(uncovered, late, penalties)
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn into_schedule(self) -> Schedule {
        self.schedule
    }
}

/// Decodes `chromosome` against `instance`.
pub fn decode(chromosome: &Chromosome, instance: &ProblemInstance) -> Result<Schedule> {
    let index = InstanceIndex::new(instance)?;
    let mut decoder = Decoder::new(instance, &index);
    decoder.decode(chromosome);
    Ok(decoder.into_schedule())
}
