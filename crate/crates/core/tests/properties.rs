mod common;

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use aero_core::ea::{crossover, mutate, reassign, relocate, Gene, Mutation};
use aero_core::export::{export_schedule, parse_schedule_json, ExportFormat};
use aero_core::io::{read_instance, write_aircraft, write_catalog, write_roster};
use aero_core::rng::rng_from_seed;
use aero_core::*;
use common::small_instance;
use proptest::prelude::*;

const POOL: usize = 20;

/// Small random instances shared by every property, built once.
fn pool() -> &'static [(ProblemInstance, InstanceIndex)] {
    static POOL_CELL: OnceLock<Vec<(ProblemInstance, InstanceIndex)>> = OnceLock::new();
    POOL_CELL.get_or_init(|| {
        (0..POOL as u64)
            .map(|seed| {
                let inst = small_instance(seed);
                let index = InstanceIndex::new(&inst).unwrap();
                (inst, index)
            })
            .collect()
    })
}

fn key_counts(c: &Chromosome) -> HashMap<GeneKey, usize> {
    let mut counts = HashMap::new();
    for k in c.keys() {
        *counts.entry(k).or_insert(0) += 1;
    }
    counts
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn crossover_child_is_a_permutation_of_parent_genes(i in 0..POOL, seed: u64) {
        let (inst, index) = &pool()[i];
        let mut rng = rng_from_seed(seed);
        let pa = Chromosome::random(inst, index, &mut rng).unwrap();
        let pb = Chromosome::random(inst, index, &mut rng).unwrap();
        let child = crossover(&pa, &pb).unwrap();
        prop_assert_eq!(key_counts(&child), key_counts(&pa));
        prop_assert!(child.validate(inst, index).is_ok());
        // Every gene is inherited whole, allocations included.
        let from_a: HashMap<GeneKey, &Gene> = pa.genes.iter().map(|g| (g.key, g)).collect();
        let from_b: HashMap<GeneKey, &Gene> = pb.genes.iter().map(|g| (g.key, g)).collect();
        for g in &child.genes {
            prop_assert!(from_a[&g.key] == g || from_b[&g.key] == g);
        }
        // The first two positions come from the heads of the parents.
        prop_assert_eq!(&child.genes[0], &pa.genes[0]);
        if child.len() > 1 && pb.genes[0].key != pa.genes[0].key {
            prop_assert_eq!(&child.genes[1], &pb.genes[0]);
        }
    }

    #[test]
    fn mutation_keeps_permutation_and_qualification(i in 0..POOL, seed: u64, steps in 1usize..20) {
        let (inst, index) = &pool()[i];
        let mut rng = rng_from_seed(seed);
        let mut c = Chromosome::random(inst, index, &mut rng).unwrap();
        let keys = key_counts(&c);
        for _ in 0..steps {
            mutate(&mut c, index, &mut rng);
            prop_assert!(c.validate(inst, index).is_ok());
        }
        prop_assert_eq!(key_counts(&c), keys);
    }

    #[test]
    fn reassign_touches_one_entry(i in 0..POOL, seed: u64) {
        let (inst, index) = &pool()[i];
        let mut rng = rng_from_seed(seed);
        let before = Chromosome::random(inst, index, &mut rng).unwrap();
        let mut after = before.clone();
        let Mutation::Reassign { gene, entry } = reassign(&mut after, index, &mut rng) else {
            panic!("reassign reported another mutation");
        };
        for (g, (x, y)) in before.genes.iter().zip(&after.genes).enumerate() {
            prop_assert_eq!(x.key, y.key);
            for (e, (p, q)) in x.entries.iter().zip(&y.entries).enumerate() {
                prop_assert_eq!((p.wo, p.slot), (q.wo, q.slot));
                if (g, e) != (gene, entry) {
                    prop_assert_eq!(p.tech, q.tech);
                }
            }
        }
        prop_assert!(after.validate(inst, index).is_ok());
    }

    #[test]
    fn relocate_moves_one_gene_unchanged(i in 0..POOL, seed: u64) {
        let (inst, index) = &pool()[i];
        let mut rng = rng_from_seed(seed);
        let before = Chromosome::random(inst, index, &mut rng).unwrap();
        let mut after = before.clone();
        let Mutation::Relocate { from, to } = relocate(&mut after, &mut rng) else {
            panic!("relocate reported another mutation");
        };
        let mut expected = before.genes.clone();
        let moved = expected.remove(from);
        expected.insert(to, moved);
        prop_assert_eq!(after.genes, expected);
    }

    #[test]
    fn decoded_schedules_pass_the_checker(i in 0..POOL, seed: u64) {
        let (inst, index) = &pool()[i];
        let mut rng = rng_from_seed(seed);
        let c = Chromosome::random(inst, index, &mut rng).unwrap();
        let mut decoder = Decoder::new(inst, index);
        let fast = decoder.evaluate(&c, &Penalties::default());
        let schedule = decoder.schedule();
        let violations = check_schedule(schedule, inst);
        prop_assert!(violations.is_empty(), "{:?}", violations);
        let slow = evaluate(schedule, inst, &Penalties::default());
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn qualified_staff_grows_with_the_eligible_set(i in 0..POOL, a in 1u8..16, extra in 0u8..16) {
        let (inst, _) = &pool()[i];
        let certs = |mask: u8| {
            CertSet::new(Certification::ALL.into_iter().filter(|c| mask & (1 << c.index()) != 0)).unwrap()
        };
        let small = StaffSlotRequirement::new(certs(a));
        let large = StaffSlotRequirement::new(certs(a | extra));
        let q_small = qualified_staff(inst, &small);
        let q_large = qualified_staff(inst, &large);
        prop_assert!(q_small.is_subset(&q_large));
        let by_hand: BTreeSet<TechId> = inst
            .roster
            .iter()
            .filter(|t| a & (1 << t.cert.index()) != 0)
            .map(|t| t.id)
            .collect();
        prop_assert_eq!(q_small, by_hand);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn csv_round_trip(seed in 0u64..10_000) {
        let inst = small_instance(seed);
        let (mut a, mut c, mut r) = (Vec::new(), Vec::new(), Vec::new());
        write_aircraft(&inst, &mut a).unwrap();
        write_catalog(&inst.catalog, &mut c).unwrap();
        write_roster(&inst.roster, &mut r).unwrap();
        let back = read_instance(&a[..], &c[..], &r[..], inst.shift_mode).unwrap();
        // The seed is generator metadata, not part of the file formats.
        prop_assert_eq!(back, ProblemInstance { seed: None, ..inst });
    }

    #[test]
    fn json_export_round_trip(i in 0..POOL, seed: u64) {
        let (inst, index) = &pool()[i];
        let mut rng = rng_from_seed(seed);
        let c = Chromosome::random(inst, index, &mut rng).unwrap();
        let schedule = decode(&c, inst).unwrap();
        let bytes = export_schedule(&schedule, inst, &Penalties::default(), ExportFormat::Json).unwrap();
        let back = parse_schedule_json(&bytes, inst).unwrap();
        prop_assert_eq!(normalized(&back), normalized(&schedule));
        prop_assert_eq!(
            evaluate(&back, inst, &Penalties::default()),
            evaluate(&schedule, inst, &Penalties::default())
        );
    }

    #[test]
    fn equal_seeds_give_equal_runs(i in 0..POOL, seed: u64) {
        let (inst, _) = &pool()[i];
        let params = EaParams {
            pop_size: 12,
            eval_budget: 200,
            seed,
            stop_at_zero: false,
            ..EaParams::default()
        };
        let first = run_ea(inst, &params).unwrap();
        let second = run_ea(inst, &params).unwrap();
        prop_assert_eq!(first, second);
    }
}

/// Placement order and uncovered-slot order are presentation details.
fn normalized(s: &Schedule) -> Schedule {
    let mut s = s.clone();
    s.wo_times.sort_by_key(|w| (w.gene, w.wo));
    s.uncovered.sort_by_key(|u| (u.gene, u.wo, u.slot));
    s
}

#[test]
fn decoder_soundness_over_twenty_instances() {
    // 25 chromosomes on each of 20 instances: 500 decodes.
    let mut decodes = 0;
    for (k, (inst, index)) in pool().iter().enumerate() {
        let mut rng = rng_from_seed(1000 + k as u64);
        let mut decoder = Decoder::new(inst, index);
        for _ in 0..25 {
            let c = Chromosome::random(inst, index, &mut rng).unwrap();
            let violations = check_schedule(decoder.decode(&c), inst);
            assert!(violations.is_empty(), "instance {k}: {violations:?}");
            decodes += 1;
        }
    }
    assert_eq!(decodes, 500);
}
