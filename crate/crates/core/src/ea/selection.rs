use rand::Rng;

/// Index of the lowest-fitness member among `k` uniform draws with
/// replacement. Ties go to the earliest draw.
pub fn tournament_select<R: Rng>(fitness: &[f64], k: usize, rng: &mut R) -> usize {
    tournament(fitness, k, rng, |candidate, incumbent| candidate < incumbent)
}

/// Index of the highest-fitness (worst) member among `k` uniform draws with
/// replacement. Ties go to the earliest draw.
pub fn tournament_worst<R: Rng>(fitness: &[f64], k: usize, rng: &mut R) -> usize {
    tournament(fitness, k, rng, |candidate, incumbent| candidate > incumbent)
}

fn tournament<R: Rng>(fitness: &[f64], k: usize, rng: &mut R, wins: impl Fn(f64, f64) -> bool) -> usize {
    assert!(!fitness.is_empty(), "tournament over an empty population");
    assert!(k >= 1, "tournament size must be at least one");
    let mut best = rng.gen_range(0..fitness.len());
    for _ in 1..k {
        let i = rng.gen_range(0..fitness.len());
        if wins(fitness[i], fitness[best]) {
            best = i;
        }
    }
    best
}
