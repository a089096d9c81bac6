//! Fixtures shared by the integration tests and the acceptance target.

#![allow(dead_code)]

use aero_core::generator::{Generator, GeneratorConfig};
use aero_core::*;

pub use aero_core::Certification::*;

pub fn slot(certs: &[Certification]) -> StaffSlotRequirement {
    StaffSlotRequirement::new(CertSet::new(certs.iter().copied()).unwrap())
}

pub fn wo(duration: Minute, slots: &[&[Certification]]) -> WorkOrderDef {
    WorkOrderDef::new(duration, slots.iter().map(|s| slot(s)).collect()).unwrap()
}

pub fn wp(id: u16, wos: Vec<WorkOrderDef>) -> WorkPackageDef {
    WorkPackageDef::from_work_orders(WpId(id), wos).unwrap()
}

pub fn tech(id: u16, cert: Certification, shift_start: Minute, shift_length: Minute) -> Technician {
    Technician {
        id: TechId(id),
        cert,
        shift_start,
        shift_length,
    }
}

pub fn aircraft(serial: &str, landing: Minute, turnaround: Minute, wps: &[u16]) -> Aircraft {
    Aircraft::new(serial, landing, turnaround, wps.iter().map(|&w| WpId(w)).collect())
}

pub fn instance(
    aircraft: Vec<Aircraft>,
    catalog: Vec<WorkPackageDef>,
    roster: Vec<Technician>,
    shift_mode: ShiftMode,
) -> ProblemInstance {
    let inst = ProblemInstance {
        aircraft,
        catalog,
        roster,
        base_day: 0,
        shift_mode,
        seed: None,
    };
    inst.check().expect("fixture instance is well formed");
    inst
}

/// Generator settings for small random instances: a few aircraft, a handful
/// of packages and a twelve-person roster over the usual three shift blocks.
pub fn small_config(seed: u64) -> GeneratorConfig {
    let mode = if seed.is_multiple_of(2) { ShiftMode::Daily } else { ShiftMode::Single };
    GeneratorConfig {
        n_aircraft: 2 + (seed % 3) as usize,
        n_work_packages: 2 + (seed % 3) as usize,
        n_technicians: 12,
        load_band: (0.01, 1.0),
        turnaround_factor: 1.0 + (seed % 5) as f64 * 0.3,
        shift_mode: mode,
        ..GeneratorConfig::default()
    }
    .with_seed(seed)
}

pub fn small_instance(seed: u64) -> ProblemInstance {
    Generator::new(small_config(seed))
        .and_then(|g| g.generate(0))
        .unwrap_or_else(|e| panic!("small instance {seed}: {e}"))
}

/// Whether the decoder can reach the oracle's optimum on a micro-instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reachability {
    /// Some chromosome decodes to an optimal timetable.
    Reachable,
    /// The optimum leaves a staffable slot empty on purpose, which the
    /// decoder never does, so the best chromosome is strictly worse.
    Unreachable { decoder_best: u32 },
    /// A slot has no qualified technician, so chromosomes cannot be built.
    NoChromosomes,
}

pub struct MicroCase {
    pub name: &'static str,
    pub instance: ProblemInstance,
    pub penalties: Penalties,
    /// Optimal penalty worked out by hand.
    pub optimum: u32,
    pub reachability: Reachability,
    /// Number of distinct chromosomes, when enumeration is possible.
    pub chromosomes: Option<u64>,
}

/// Hand-analysed micro-instances. Each comment gives the argument for the
/// expected optimum; none of the values come from running the solvers.
pub fn micro_suite() -> Vec<MicroCase> {
    use Reachability::*;
    let day = |counts: &[(Certification, Minute, Minute)]| -> Vec<Technician> {
        counts
            .iter()
            .enumerate()
            .map(|(i, &(c, s, l))| tech(i as u16, c, s, l))
            .collect()
    };
    let default = Penalties::default();
    let mut cases = Vec::new();

    // One 60-minute job, one free technician, a 100-minute window.
    cases.push(MicroCase {
        name: "single_job",
        instance: instance(
            vec![aircraft("A", 0, 100, &[0])],
            vec![wp(0, vec![wo(60, &[&[B1Technician]])])],
            day(&[(B1Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 0,
        reachability: Reachable,
        chromosomes: Some(1),
    });

    // Two aircraft share one technician; back to back the second job ends
    // exactly at its departure, which is on time.
    cases.push(MicroCase {
        name: "back_to_back",
        instance: instance(
            vec![aircraft("A", 0, 120, &[0]), aircraft("B", 0, 120, &[0])],
            vec![wp(0, vec![wo(60, &[&[B1Technician]])])],
            day(&[(B1Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 0,
        reachability: Reachable,
        chromosomes: Some(2),
    });

    // Same, but both leave at 100. Staffing the second job makes it late
    // (10); leaving its slot empty costs 1. The decoder always staffs, so
    // its best is 10.
    cases.push(MicroCase {
        name: "late_or_short_staffed",
        instance: instance(
            vec![aircraft("A", 0, 100, &[0]), aircraft("B", 0, 100, &[0])],
            vec![wp(0, vec![wo(60, &[&[B1Technician]])])],
            day(&[(B1Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 1,
        reachability: Unreachable { decoder_best: 10 },
        chromosomes: Some(2),
    });

    // As above with the weights swapped: an empty slot now costs 20 and a
    // late aircraft 1, so being late is optimal and the decoder finds it.
    cases.push(MicroCase {
        name: "late_is_cheaper",
        instance: instance(
            vec![aircraft("A", 0, 100, &[0]), aircraft("B", 0, 100, &[0])],
            vec![wp(0, vec![wo(60, &[&[B1Technician]])])],
            day(&[(B1Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: Penalties { wp: 20.0, lp: 1.0 },
        optimum: 1,
        reachability: Reachable,
        chromosomes: Some(2),
    });

    // Two engineer slots and nobody certified for them: both stay empty.
    cases.push(MicroCase {
        name: "nobody_qualified",
        instance: instance(
            vec![aircraft("A", 0, 100, &[0])],
            vec![wp(0, vec![wo(30, &[&[B2Engineer], &[B2Engineer]])])],
            day(&[(B1Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 2,
        reachability: NoChromosomes,
        chromosomes: None,
    });

    // Two work orders in sequence, each with its own technician; 60 + 60
    // fills the 120-minute window exactly.
    cases.push(MicroCase {
        name: "sequenced_work_orders",
        instance: instance(
            vec![aircraft("A", 0, 120, &[0])],
            vec![wp(0, vec![wo(60, &[&[B1Technician]]), wo(60, &[&[B2Technician]])])],
            day(&[(B1Technician, 0, 480), (B2Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 0,
        reachability: Reachable,
        chromosomes: Some(1),
    });

    // The only technician starts at 480; the job runs 480..540 and the
    // aircraft leaves at 600.
    cases.push(MicroCase {
        name: "wait_for_shift",
        instance: instance(
            vec![aircraft("A", 0, 600, &[0])],
            vec![wp(0, vec![wo(60, &[&[B1Technician]])])],
            day(&[(B1Technician, 480, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 0,
        reachability: Reachable,
        chromosomes: Some(1),
    });

    // Same shift, departure at 500: staffed the job ends at 540 and the
    // aircraft is late (10); unstaffed it costs 1.
    cases.push(MicroCase {
        name: "shift_starts_too_late",
        instance: instance(
            vec![aircraft("A", 0, 500, &[0])],
            vec![wp(0, vec![wo(60, &[&[B1Technician]])])],
            day(&[(B1Technician, 480, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 1,
        reachability: Unreachable { decoder_best: 10 },
        chromosomes: Some(1),
    });

    // A two-person job whose shifts overlap only on 240..480. The job runs
    // 240..360 and the aircraft leaves at 600.
    cases.push(MicroCase {
        name: "shift_overlap",
        instance: instance(
            vec![aircraft("A", 0, 600, &[0])],
            vec![wp(0, vec![wo(120, &[&[B1Technician], &[B2Technician]])])],
            day(&[(B1Technician, 0, 480), (B2Technician, 240, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 0,
        reachability: Reachable,
        chromosomes: Some(1),
    });

    // A has packages 0 (B1T) and 1 (B2T) and leaves at 200; B has package 2
    // (B1T) and leaves at 60. B must go first on the B1T technician, A does
    // package 1 at 0..60 then package 0 at 60..120. Three genes give six
    // orders.
    cases.push(MicroCase {
        name: "package_order_matters",
        instance: instance(
            vec![aircraft("A", 0, 200, &[0, 1]), aircraft("B", 0, 60, &[2])],
            vec![
                wp(0, vec![wo(60, &[&[B1Technician]])]),
                wp(1, vec![wo(60, &[&[B2Technician]])]),
                wp(2, vec![wo(60, &[&[B1Technician]])]),
            ],
            day(&[(B1Technician, 0, 480), (B2Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 0,
        reachability: Reachable,
        chromosomes: Some(6),
    });

    // Two simultaneous jobs that either technician may do; assigning them
    // to different people finishes both at 60. Two orders times 2 x 2
    // allocations.
    cases.push(MicroCase {
        name: "either_certification",
        instance: instance(
            vec![aircraft("A", 0, 60, &[0]), aircraft("B", 0, 60, &[0])],
            vec![wp(0, vec![wo(60, &[&[B1Technician, B2Technician]])])],
            day(&[(B1Technician, 0, 480), (B2Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 0,
        reachability: Reachable,
        chromosomes: Some(8),
    });

    // A two-slot job with two eligible people. Allocating the same person
    // twice leaves a slot empty; the distinct pair covers both.
    cases.push(MicroCase {
        name: "distinct_crew",
        instance: instance(
            vec![aircraft("A", 0, 30, &[0])],
            vec![wp(0, vec![wo(30, &[&[B1Technician, B2Technician], &[B1Technician, B2Technician]])])],
            day(&[(B1Technician, 0, 480), (B2Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 0,
        reachability: Reachable,
        chromosomes: Some(4),
    });

    // Three aircraft leaving at 60, 120 and 180 share one technician; the
    // earliest-departure order is on time. Six orders.
    cases.push(MicroCase {
        name: "staggered_departures",
        instance: instance(
            vec![
                aircraft("A", 0, 60, &[0]),
                aircraft("B", 0, 120, &[0]),
                aircraft("C", 0, 180, &[0]),
            ],
            vec![wp(0, vec![wo(60, &[&[B1Technician]])])],
            day(&[(B1Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 0,
        reachability: Reachable,
        chromosomes: Some(6),
    });

    // Landing at 400 with a 120-minute job: today's shift ends at 480, so
    // with daily shifts the job runs 1440..1560 before the 1600 departure.
    cases.push(MicroCase {
        name: "next_day_shift",
        instance: instance(
            vec![aircraft("A", 400, 1200, &[0])],
            vec![wp(0, vec![wo(120, &[&[B1Technician]])])],
            day(&[(B1Technician, 0, 480)]),
            ShiftMode::Daily,
        ),
        penalties: default,
        optimum: 0,
        reachability: Reachable,
        chromosomes: Some(1),
    });

    // The same with a single shift: no block can hold the job, so the slot
    // stays empty whoever schedules it.
    cases.push(MicroCase {
        name: "no_block_fits",
        instance: instance(
            vec![aircraft("A", 400, 1200, &[0])],
            vec![wp(0, vec![wo(120, &[&[B1Technician]])])],
            day(&[(B1Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 1,
        reachability: Reachable,
        chromosomes: Some(1),
    });

    // Both aircraft need B1T then B2T work in one package. Pipelining them
    // (A: 0..60, 60..120; B: 60..120, 120..180) meets both 180 departures.
    cases.push(MicroCase {
        name: "pipelined_crews",
        instance: instance(
            vec![aircraft("A", 0, 180, &[0]), aircraft("B", 0, 180, &[0])],
            vec![wp(0, vec![wo(60, &[&[B1Technician]]), wo(60, &[&[B2Technician]])])],
            day(&[(B1Technician, 0, 480), (B2Technician, 0, 480)]),
            ShiftMode::Single,
        ),
        penalties: default,
        optimum: 0,
        reachability: Reachable,
        chromosomes: Some(2),
    });

    cases
}
