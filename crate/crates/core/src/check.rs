//! Independent re-verification of a decoded schedule. Nothing here reuses
//! decoder state: availability comes straight from the roster and every
//! interval is recomputed from the catalog.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::decoder::Schedule;
use crate::domain::{GeneKey, Minute, ProblemInstance, TechId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    /// A work order's length differs from its catalog duration.
    Duration { gene: GeneKey, wo: u16, expected: Minute, actual: Minute },
    /// A work order starts before its predecessor in the package ends.
    Sequencing { gene: GeneKey, wo: u16 },
    /// Two packages of one aircraft overlap in time.
    PackageOverlap { aircraft: u16, first: GeneKey, second: GeneKey },
    /// Work starts before the aircraft lands.
    BeforeLanding { gene: GeneKey },
    /// A package occurrence is placed twice, never, or with the wrong work
    /// orders.
    Coverage { gene: GeneKey, detail: String },
    /// Two bookings of one technician overlap.
    DoubleBooked { tech: TechId, first: (GeneKey, u16), second: (GeneKey, u16) },
    /// A booking is not contained in one availability window.
    OutsideShift { tech: TechId, start: Minute, end: Minute },
    /// A booking names a technician not qualified for its slot.
    Unqualified { tech: TechId, gene: GeneKey, wo: u16, slot: u16 },
    /// A booking disagrees with its work order's interval or slot layout.
    BookingMismatch { tech: TechId, gene: GeneKey, wo: u16, slot: u16 },
    /// Booked plus uncovered slots of a work order do not add up to its
    /// slot count, or a slot is both booked and uncovered.
    SlotAccounting { gene: GeneKey, wo: u16 },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Duration { gene, wo, expected, actual } => {
                write!(f, "{gene} wo {wo} lasts {actual} min, expected {expected}")
            }
            Self::Sequencing { gene, wo } => write!(f, "{gene} wo {wo} starts before its predecessor ends"),
            Self::PackageOverlap { aircraft, first, second } => {
                write!(f, "aircraft {aircraft}: {first} and {second} overlap")
            }
            Self::BeforeLanding { gene } => write!(f, "{gene} starts before landing"),
            Self::Coverage { gene, detail } => write!(f, "{gene}: {detail}"),
            Self::DoubleBooked { tech, first, second } => write!(
                f,
                "{tech} double booked on {} wo {} and {} wo {}",
                first.0, first.1, second.0, second.1
            ),
            Self::OutsideShift { tech, start, end } => write!(f, "{tech} booked [{start}, {end}) outside shift"),
            Self::Unqualified { tech, gene, wo, slot } => {
                write!(f, "{tech} unqualified for {gene} wo {wo} slot {slot}")
            }
            Self::BookingMismatch { tech, gene, wo, slot } => {
                write!(f, "{tech} booking for {gene} wo {wo} slot {slot} does not match the work order")
            }
            Self::SlotAccounting { gene, wo } => write!(f, "{gene} wo {wo} slot accounting is inconsistent"),
        }
    }
}

/// Lists every invariant the schedule breaks. An empty result means the
/// schedule is sound.
pub fn check_schedule(schedule: &Schedule, instance: &ProblemInstance) -> Vec<ScheduleViolation> {
    let mut out = Vec::new();
    let times = check_work_orders(schedule, instance, &mut out);
    check_bookings(schedule, instance, &times, &mut out);
    out
}

type WoIntervals = HashMap<(GeneKey, u16), (Minute, Minute)>;

fn check_work_orders(schedule: &Schedule, instance: &ProblemInstance, out: &mut Vec<ScheduleViolation>) -> WoIntervals {
    let mut expected: HashSet<GeneKey> = HashSet::new();
    for (a, aircraft) in instance.aircraft.iter().enumerate() {
        let mut seen: HashMap<u16, u16> = HashMap::new();
        for wp in &aircraft.wp_list {
            let n = seen.entry(wp.0).or_default();
            expected.insert(GeneKey::new(a, wp.0, *n));
            *n += 1;
        }
    }

    let mut per_gene: HashMap<GeneKey, Vec<(u16, Minute, Minute)>> = HashMap::new();
    let mut times = WoIntervals::new();
    for t in &schedule.wo_times {
        per_gene.entry(t.gene).or_default().push((t.wo, t.start, t.end));
        if times.insert((t.gene, t.wo), (t.start, t.end)).is_some() {
            out.push(ScheduleViolation::Coverage {
                gene: t.gene,
                detail: format!("wo {} placed twice", t.wo),
            });
        }
    }

    for key in &expected {
        if !per_gene.contains_key(key) {
            out.push(ScheduleViolation::Coverage {
                gene: *key,
                detail: "package never placed".into(),
            });
        }
    }

    let mut spans: HashMap<u16, Vec<(Minute, Minute, GeneKey)>> = HashMap::new();
    for (gene, wos) in &mut per_gene {
        let gene = *gene;
        let Some(def) = instance
            .work_package(gene.wp)
            .filter(|_| expected.contains(&gene))
        else {
            out.push(ScheduleViolation::Coverage {
                gene,
                detail: "not a package occurrence of this instance".into(),
            });
            continue;
        };
        wos.sort_by_key(|w| w.0);
        let indices: Vec<u16> = wos.iter().map(|w| w.0).collect();
        if indices != (0..def.work_orders.len() as u16).collect::<Vec<_>>() {
            out.push(ScheduleViolation::Coverage {
                gene,
                detail: format!("work orders {indices:?} placed"),
            });
            continue;
        }
        for (k, &(wo, start, end)) in wos.iter().enumerate() {
            let expected = def.work_orders[wo as usize].duration;
            if end - start != expected {
                out.push(ScheduleViolation::Duration {
                    gene,
                    wo,
                    expected,
                    actual: end - start,
                });
            }
            if k > 0 && start < wos[k - 1].2 {
                out.push(ScheduleViolation::Sequencing { gene, wo });
            }
        }
        let first = wos[0].1;
        let last = wos[wos.len() - 1].2;
        if first < instance.aircraft[gene.aircraft as usize].landing {
            out.push(ScheduleViolation::BeforeLanding { gene });
        }
        spans.entry(gene.aircraft).or_default().push((first, last, gene));
    }

    for (aircraft, mut list) in spans {
        list.sort_by_key(|s| (s.0, s.1));
        for pair in list.windows(2) {
            if pair[1].0 < pair[0].1 {
                out.push(ScheduleViolation::PackageOverlap {
                    aircraft,
                    first: pair[0].2,
                    second: pair[1].2,
                });
            }
        }
    }
    times
}

fn check_bookings(schedule: &Schedule, instance: &ProblemInstance, times: &WoIntervals, out: &mut Vec<ScheduleViolation>) {
    let horizon = instance.horizon_end();
    let mut filled: HashMap<(GeneKey, u16), Vec<u16>> = HashMap::new();

    for (tech_index, list) in schedule.bookings.iter().enumerate() {
        let Some(tech) = instance.roster.get(tech_index) else {
            if let Some(b) = list.first() {
                out.push(ScheduleViolation::BookingMismatch {
                    tech: b.tech,
                    gene: b.gene,
                    wo: b.wo,
                    slot: b.slot,
                });
            }
            continue;
        };
        let windows = tech.availability(instance.shift_mode, horizon);
        let mut sorted: Vec<_> = list.iter().collect();
        sorted.sort_by_key(|b| (b.start, b.end));
        for pair in sorted.windows(2) {
            if pair[1].start < pair[0].end {
                out.push(ScheduleViolation::DoubleBooked {
                    tech: tech.id,
                    first: (pair[0].gene, pair[0].wo),
                    second: (pair[1].gene, pair[1].wo),
                });
            }
        }
        for b in list {
            if b.tech != tech.id || b.start >= b.end {
                out.push(ScheduleViolation::BookingMismatch {
                    tech: tech.id,
                    gene: b.gene,
                    wo: b.wo,
                    slot: b.slot,
                });
                continue;
            }
            if !windows.iter().any(|&(w0, w1)| w0 <= b.start && b.end <= w1) {
                out.push(ScheduleViolation::OutsideShift {
                    tech: tech.id,
                    start: b.start,
                    end: b.end,
                });
            }
            let slot_def = instance
                .work_package(b.gene.wp)
                .and_then(|wp| wp.work_orders.get(b.wo as usize))
                .and_then(|wo| wo.slots.get(b.slot as usize));
            match slot_def {
                Some(slot) if !slot.admits(tech.cert) => out.push(ScheduleViolation::Unqualified {
                    tech: tech.id,
                    gene: b.gene,
                    wo: b.wo,
                    slot: b.slot,
                }),
                Some(_) if times.get(&(b.gene, b.wo)) == Some(&(b.start, b.end)) => {
                    filled.entry((b.gene, b.wo)).or_default().push(b.slot);
                }
                _ => out.push(ScheduleViolation::BookingMismatch {
                    tech: tech.id,
                    gene: b.gene,
                    wo: b.wo,
                    slot: b.slot,
                }),
            }
        }
    }

    for u in &schedule.uncovered {
        filled.entry((u.gene, u.wo)).or_default().push(u.slot);
    }
    for t in &schedule.wo_times {
        let Some(wo) = instance
            .work_package(t.gene.wp)
            .and_then(|wp| wp.work_orders.get(t.wo as usize))
        else {
            continue;
        };
        let mut slots = filled.remove(&(t.gene, t.wo)).unwrap_or_default();
        slots.sort_unstable();
        let uncovered = schedule
            .uncovered
            .iter()
            .filter(|u| u.gene == t.gene && u.wo == t.wo)
            .count();
        if slots != (0..wo.slots.len() as u16).collect::<Vec<_>>() || uncovered != t.uncovered as usize {
            out.push(ScheduleViolation::SlotAccounting { gene: t.gene, wo: t.wo });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::decode;
    use crate::domain::fixtures::*;
    use crate::domain::{Aircraft, Certification::*, WpId};
    use crate::ea::{Chromosome, Gene, StaffEntry};

    fn setup() -> (ProblemInstance, Schedule) {
        let catalog = vec![wp(0, vec![wo(60, &[&[B1Technician]]), wo(30, &[&[B1Technician], &[B2Technician]])])];
        let aircraft = vec![Aircraft::new("A", 100, 300, vec![WpId(0)])];
        let inst = instance(aircraft, catalog, roster([2, 1, 0, 0], 0, 480));
        let gene = Gene {
            key: GeneKey::new(0, 0, 0),
            entries: vec![
                StaffEntry { wo: 0, slot: 0, tech: TechId(0) },
                StaffEntry { wo: 1, slot: 0, tech: TechId(1) },
                StaffEntry { wo: 1, slot: 1, tech: TechId(2) },
            ],
        };
        let schedule = decode(&Chromosome::new(vec![gene]), &inst).unwrap();
        (inst, schedule)
    }

    #[test]
    fn decoded_schedule_is_clean() {
        let (inst, s) = setup();
        assert_eq!(check_schedule(&s, &inst), vec![]);
    }

    #[test]
    fn stretched_work_order_is_flagged() {
        let (inst, mut s) = setup();
        s.wo_times[0].end += 5;
        let v = check_schedule(&s, &inst);
        assert!(v.iter().any(|v| matches!(v, ScheduleViolation::Duration { wo: 0, .. })), "{v:?}");
        assert!(v.iter().any(|v| matches!(v, ScheduleViolation::BookingMismatch { .. })));
    }

    #[test]
    fn overlapping_bookings_are_flagged() {
        let (inst, mut s) = setup();
        let mut copy = s.bookings[1][0];
        copy.start -= 10;
        copy.end -= 10;
        s.bookings[1].push(copy);
        let v = check_schedule(&s, &inst);
        assert!(v.iter().any(|v| matches!(v, ScheduleViolation::DoubleBooked { .. })), "{v:?}");
    }

    #[test]
    fn out_of_order_work_is_flagged() {
        let (inst, mut s) = setup();
        s.wo_times[1].start = 120;
        s.wo_times[1].end = 150;
        let v = check_schedule(&s, &inst);
        assert!(v.iter().any(|v| matches!(v, ScheduleViolation::Sequencing { wo: 1, .. })), "{v:?}");
    }

    #[test]
    fn booking_past_shift_end_is_flagged() {
        let (inst, mut s) = setup();
        for t in &mut s.wo_times {
            t.start += 350;
            t.end += 350;
        }
        for list in &mut s.bookings {
            for b in list {
                b.start += 350;
                b.end += 350;
            }
        }
        let v = check_schedule(&s, &inst);
        assert!(v.iter().any(|v| matches!(v, ScheduleViolation::OutsideShift { .. })), "{v:?}");
    }

    #[test]
    fn missing_package_is_flagged() {
        let (inst, mut s) = setup();
        s.wo_times.clear();
        s.bookings.iter_mut().for_each(Vec::clear);
        let v = check_schedule(&s, &inst);
        assert!(v.iter().any(|v| matches!(v, ScheduleViolation::Coverage { .. })), "{v:?}");
    }
}
