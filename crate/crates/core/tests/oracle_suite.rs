mod common;

use aero_core::oracle::{brute_force_solve, enumerate_chromosomes};
use aero_core::*;
use common::{micro_suite, Reachability};

const ENUMERATION_CAP: u64 = 5_000_000;

#[test]
fn suite_respects_oracle_limits() {
    let cases = micro_suite();
    assert!(cases.len() >= 10);
    for case in &cases {
        let index = InstanceIndex::new(&case.instance).unwrap();
        assert!(index.genes().len() <= 6, "{}", case.name);
        assert!(case.instance.roster.len() <= 5, "{}", case.name);
    }
}

#[test]
fn oracle_matches_hand_optima() {
    for case in micro_suite() {
        let r = brute_force_solve(&case.instance, &case.penalties).unwrap();
        assert_eq!(r.optimal_penalty, case.optimum as f64, "{}", case.name);
        assert!(check_schedule(&r.witness, &case.instance).is_empty(), "{}", case.name);
        assert_eq!(
            evaluate(&r.witness, &case.instance, &case.penalties).fitness,
            r.optimal_penalty,
            "{}",
            case.name
        );
    }
}

#[test]
fn enumeration_agrees_with_documented_reachability() {
    for case in micro_suite() {
        let enumerated = enumerate_chromosomes(&case.instance, &case.penalties, ENUMERATION_CAP);
        match case.reachability {
            Reachability::Reachable => {
                let e = enumerated.unwrap();
                assert_eq!(e.best.fitness, case.optimum as f64, "{}", case.name);
                assert_eq!(Some(e.chromosomes), case.chromosomes, "{}", case.name);
            }
            Reachability::Unreachable { decoder_best } => {
                let e = enumerated.unwrap();
                assert_eq!(e.best.fitness, decoder_best as f64, "{}", case.name);
                assert!(e.best.fitness > case.optimum as f64, "{}", case.name);
                assert_eq!(Some(e.chromosomes), case.chromosomes, "{}", case.name);
            }
            Reachability::NoChromosomes => {
                assert!(matches!(enumerated, Err(Error::Unsolvable { .. })), "{}", case.name);
            }
        }
    }
}

#[test]
fn enumeration_witness_decodes_to_its_score() {
    for case in micro_suite() {
        let Ok(e) = enumerate_chromosomes(&case.instance, &case.penalties, ENUMERATION_CAP) else {
            continue;
        };
        let index = InstanceIndex::new(&case.instance).unwrap();
        e.witness.validate(&case.instance, &index).unwrap();
        let mut decoder = Decoder::new(&case.instance, &index);
        assert_eq!(decoder.evaluate(&e.witness, &case.penalties), e.best, "{}", case.name);
    }
}

#[test]
fn oracle_never_exceeds_the_decoder() {
    // On small generated instances the exact optimum can only be at most
    // what the best decodable chromosome achieves.
    let mut compared = 0;
    for seed in 0..200u64 {
        let Some(inst) = tiny_generated(seed) else { continue };
        let penalties = Penalties::default();
        let Ok(e) = enumerate_chromosomes(&inst, &penalties, 200_000) else { continue };
        let r = brute_force_solve(&inst, &penalties).unwrap();
        assert!(r.optimal_penalty <= e.best.fitness, "seed {seed}");
        compared += 1;
        if compared == 12 {
            break;
        }
    }
    assert!(compared >= 5, "only {compared} generated instances were small enough");
}

/// A generated two-aircraft instance cut down to oracle size, or `None` when
/// it stays too large.
fn tiny_generated(seed: u64) -> Option<ProblemInstance> {
    let mut inst = common::small_instance(seed);
    inst.aircraft.truncate(2);
    for ac in &mut inst.aircraft {
        ac.wp_list.truncate(2);
    }
    let used: Vec<WpId> = inst.aircraft.iter().flat_map(|a| a.wp_list.clone()).collect();
    // Keep five technicians covering every certification; the roster lists
    // certifications in blocks, so take the head of each block plus one.
    let mut kept = Vec::new();
    for cert in Certification::ALL {
        kept.extend(inst.roster.iter().find(|t| t.cert == cert).cloned());
    }
    kept.extend(inst.roster.iter().find(|t| !kept.contains(t)).cloned());
    kept.sort_by_key(|t| t.id);
    for (k, t) in kept.iter_mut().enumerate() {
        t.id = TechId(k as u16);
    }
    inst.roster = kept;
    inst.catalog.retain(|wp| used.contains(&wp.id));
    let remap: Vec<(WpId, WpId)> = inst
        .catalog
        .iter()
        .enumerate()
        .map(|(k, wp)| (wp.id, WpId(k as u16)))
        .collect();
    for wp in &mut inst.catalog {
        wp.id = remap.iter().find(|(old, _)| *old == wp.id)?.1;
    }
    for ac in &mut inst.aircraft {
        for w in &mut ac.wp_list {
            *w = remap.iter().find(|(old, _)| old == w)?.1;
        }
    }
    inst.check().ok()?;
    let work_orders: usize = inst
        .aircraft
        .iter()
        .flat_map(|a| &a.wp_list)
        .map(|w| inst.work_package(*w).map_or(0, |d| d.work_orders.len()))
        .sum();
    let slots: usize = inst
        .aircraft
        .iter()
        .flat_map(|a| &a.wp_list)
        .map(|w| inst.work_package(*w).map_or(0, |d| d.slot_count()))
        .sum();
    (work_orders <= 8 && slots <= 10).then_some(inst)
}
