//! Constraint-compliant instance generation.
//!
//! A [`Generator`] synthesizes a work-package catalog and a technician roster
//! from its seed, then builds instances attempt by attempt: random landing
//! times over the base day, package lists that first take an unused package,
//! turnarounds scaled from total package duration. An attempt is discarded
//! when a turnaround exceeds the cap, when some package is never used, or when
//! total man-hours fall outside the load band.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::*;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, SolverRng};

const CATALOG_STREAM: u64 = 0x0ca7_a10c;

/// Which capacity the load band is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CapacityMode {
    /// `n_technicians × shift_length`: one day of staff time.
    #[default]
    SingleDay,
    /// One day of staff time for every day spanned by the turnaround windows.
    PerHorizonDay,
}

/// Shape of the synthesized work-package catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogConfig {
    pub min_duration: Minute,
    pub max_duration: Minute,
    pub max_work_orders: usize,
    pub min_work_order_duration: Minute,
    /// Relative weights of 1, 2 and 3 staff slots per work order.
    pub slot_count_weights: [f64; 3],
    /// Relative weights of slot eligibility kinds: single technician cert,
    /// either technician cert, single engineer cert, either engineer cert.
    pub cert_set_weights: [f64; 4],
}

impl Default for CatalogConfig {
    fn default() -> Self {
        Self {
            min_duration: 45,
            max_duration: 150,
            max_work_orders: 4,
            min_work_order_duration: 15,
            slot_count_weights: [0.05, 0.2, 0.75],
            cert_set_weights: [0.35, 0.25, 0.25, 0.15],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_aircraft: usize,
    pub n_technicians: usize,
    pub n_work_packages: usize,
    /// Technicians per certification in `Certification::ALL` order. `None`
    /// scales the 12/10/8/6 mix to `n_technicians`.
    pub cert_mix: Option<[usize; 4]>,
    /// Shift blocks assigned round-robin.
    pub shift_starts: Vec<Minute>,
    pub shift_length: Minute,
    pub shift_mode: ShiftMode,
    pub turnaround_factor: f64,
    pub load_band: (f64, f64),
    pub capacity_mode: CapacityMode,
    pub max_turnaround: Minute,
    pub max_instance_attempts: usize,
    pub max_wp_retries: usize,
    pub wp_stop_threshold_min: Minute,
    pub wp_stop_probability: f64,
    pub catalog: CatalogConfig,
    pub seed: Option<u64>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n_aircraft: 20,
            n_technicians: 36,
            n_work_packages: 24,
            cert_mix: None,
            shift_starts: vec![0, 480, 960],
            shift_length: DEFAULT_SHIFT_LENGTH,
            shift_mode: ShiftMode::Daily,
            turnaround_factor: 1.2,
            load_band: (0.70, 0.90),
            capacity_mode: CapacityMode::SingleDay,
            max_turnaround: MAX_TURNAROUND,
            max_instance_attempts: 1000,
            max_wp_retries: 50,
            wp_stop_threshold_min: 20,
            wp_stop_probability: 0.5,
            catalog: CatalogConfig::default(),
            seed: None,
        }
    }
}

/// Named generation regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BatchKind {
    /// Long turnaround windows: package work fills about 35% of the window.
    Slack,
    /// Short windows: package work fills about 83% of the window.
    Tight,
    /// Three aircraft, six packages; a fast end-to-end configuration.
    Smoke,
}

impl GeneratorConfig {
    pub fn preset(kind: BatchKind) -> Self {
        match kind {
            BatchKind::Slack => Self {
                turnaround_factor: 2.8,
                wp_stop_probability: 0.3,
                ..Self::default()
            },
            BatchKind::Tight => Self {
                turnaround_factor: 1.2,
                wp_stop_probability: 0.55,
                ..Self::default()
            },
            BatchKind::Smoke => Self {
                n_aircraft: 3,
                n_work_packages: 6,
                turnaround_factor: 1.5,
                load_band: (0.02, 0.90),
                ..Self::default()
            },
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (low, high) = self.load_band;
        let fail = |msg: String| Err(Error::Config(msg));
        if !(0.0 < low && low < high && high <= 1.0) {
            return fail(format!("load band must satisfy 0 < low < high <= 1, got [{low}, {high}]"));
        }
        if self.turnaround_factor.is_nan() || self.turnaround_factor < 1.0 {
            return fail(format!("turnaround factor must be >= 1, got {}", self.turnaround_factor));
        }
        if self.n_aircraft == 0 || self.n_technicians == 0 || self.n_work_packages == 0 {
            return fail("aircraft, technician and package counts must be positive".into());
        }
        if self.n_work_packages > u16::MAX as usize || self.n_technicians > u16::MAX as usize {
            return fail("package and technician counts must fit in 16 bits".into());
        }
        if self.shift_starts.is_empty() || self.shift_length < 1 {
            return fail("at least one non-empty shift block is required".into());
        }
        if !(0.0..=1.0).contains(&self.wp_stop_probability) {
            return fail(format!("stop probability {} outside [0, 1]", self.wp_stop_probability));
        }
        if let Some(mix) = self.cert_mix {
            if mix.iter().sum::<usize>() != self.n_technicians {
                return fail(format!("cert mix {mix:?} does not sum to {}", self.n_technicians));
            }
        }
        let c = &self.catalog;
        if c.min_duration < c.min_work_order_duration || c.min_duration > c.max_duration {
            return fail("catalog duration range is empty or shorter than one work order".into());
        }
        if c.max_work_orders == 0 || c.min_work_order_duration < 1 {
            return fail("work orders per package and work order duration must be positive".into());
        }
        if c.slot_count_weights.iter().chain(&c.cert_set_weights).any(|w| *w < 0.0)
            || c.slot_count_weights.iter().sum::<f64>() <= 0.0
            || c.cert_set_weights.iter().sum::<f64>() <= 0.0
        {
            return fail("catalog weights must be non-negative with a positive sum".into());
        }
        Ok(())
    }

    /// Technicians per certification.
    pub fn certification_counts(&self) -> [usize; 4] {
        if let Some(mix) = self.cert_mix {
            return mix;
        }
        // Largest-remainder scaling of the 12/10/8/6 mix.
        const BASE: [usize; 4] = [12, 10, 8, 6];
        let n = self.n_technicians;
        let mut counts = BASE.map(|b| b * n / 36);
        let mut remainders: Vec<(usize, usize)> =
            BASE.iter().enumerate().map(|(i, b)| ((b * n) % 36, i)).collect();
        remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let short = n - counts.iter().sum::<usize>();
        for &(_, i) in remainders.iter().take(short) {
            counts[i] += 1;
        }
        counts
    }

    /// Person-minutes the load band is measured against.
    pub fn capacity(&self, aircraft: &[Aircraft]) -> Minute {
        let day = self.n_technicians as Minute * self.shift_length;
        match self.capacity_mode {
            CapacityMode::SingleDay => day,
            CapacityMode::PerHorizonDay => {
                let last = aircraft.iter().map(|a| a.departure).max().unwrap_or(0);
                let days = ((last + MINUTES_PER_DAY - 1) / MINUTES_PER_DAY).max(1);
                day * days
            }
        }
    }

    pub fn load_limits(&self, aircraft: &[Aircraft]) -> (f64, f64) {
        let capacity = self.capacity(aircraft) as f64;
        (self.load_band.0 * capacity, self.load_band.1 * capacity)
    }
}

/// Technicians with certifications in `Certification::ALL` order, shift
/// blocks assigned round-robin.
pub fn build_roster(config: &GeneratorConfig) -> Vec<Technician> {
    let counts = config.certification_counts();
    let certs = Certification::ALL
        .into_iter()
        .zip(counts)
        .flat_map(|(cert, n)| std::iter::repeat_n(cert, n));
    certs
        .enumerate()
        .map(|(i, cert)| Technician {
            id: TechId(i as u16),
            cert,
            shift_start: config.shift_starts[i % config.shift_starts.len()],
            shift_length: config.shift_length,
        })
        .collect()
}

fn weighted_index<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

fn draw_cert_set<R: Rng>(rng: &mut R, weights: &[f64; 4]) -> CertSet {
    use Certification::*;
    match weighted_index(rng, weights) {
        0 => CertSet::single(*[B1Technician, B2Technician].choose(rng).unwrap()),
        1 => CertSet::single(B1Technician).union(CertSet::single(B2Technician)),
        2 => CertSet::single(*[B1Engineer, B2Engineer].choose(rng).unwrap()),
        _ => CertSet::single(B1Engineer).union(CertSet::single(B2Engineer)),
    }
}

/// Whether distinct technicians from `pool` can fill every slot at once.
fn crew_assignable(slots: &[StaffSlotRequirement], pool: &[&Technician]) -> bool {
    fn fill(slots: &[StaffSlotRequirement], pool: &[&Technician], taken: &mut Vec<bool>) -> bool {
        let Some((first, rest)) = slots.split_first() else {
            return true;
        };
        for (i, t) in pool.iter().enumerate() {
            if !taken[i] && first.admits(t.cert) {
                taken[i] = true;
                if fill(rest, pool, taken) {
                    return true;
                }
                taken[i] = false;
            }
        }
        false
    }
    fill(slots, pool, &mut vec![false; pool.len()])
}

/// Splits `total` into `parts` random integer pieces, each at least `min`.
fn split_duration<R: Rng>(rng: &mut R, total: Minute, parts: usize, min: Minute) -> Vec<Minute> {
    let extra = total - min * parts as Minute;
    let mut cuts: Vec<Minute> = (1..parts).map(|_| rng.gen_range(0..=extra)).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(extra)) {
        out.push(min + c - prev);
        prev = c;
    }
    out
}

/// Draws a catalog in which every work order can be crewed by the
/// technicians of any single shift block.
pub fn synthesize_catalog<R: Rng>(
    rng: &mut R,
    config: &GeneratorConfig,
    roster: &[Technician],
) -> Result<Vec<WorkPackageDef>> {
    let cc = &config.catalog;
    let groups: Vec<Vec<&Technician>> = config
        .shift_starts
        .iter()
        .map(|s| roster.iter().filter(|t| t.shift_start == *s).collect::<Vec<_>>())
        .filter(|g| !g.is_empty())
        .collect();
    let mut catalog = Vec::with_capacity(config.n_work_packages);
    for id in 0..config.n_work_packages {
        let duration = rng.gen_range(cc.min_duration..=cc.max_duration);
        let max_parts = ((duration / cc.min_work_order_duration) as usize).min(cc.max_work_orders);
        let parts = rng.gen_range(1..=max_parts.max(1));
        let mut work_orders = Vec::with_capacity(parts);
        for wo_duration in split_duration(rng, duration, parts, cc.min_work_order_duration) {
            let n_slots = weighted_index(rng, &cc.slot_count_weights) + 1;
            let mut slots = None;
            for _ in 0..200 {
                let candidate: Vec<StaffSlotRequirement> = (0..n_slots)
                    .map(|_| StaffSlotRequirement::new(draw_cert_set(rng, &cc.cert_set_weights)))
                    .collect();
                if groups.iter().all(|g| crew_assignable(&candidate, g)) {
                    slots = Some(candidate);
                    break;
                }
            }
            let slots = slots.ok_or_else(|| {
                Error::Config(format!(
                    "roster cannot crew a {n_slots}-slot work order from every shift block"
                ))
            })?;
            work_orders.push(WorkOrderDef::new(wo_duration, slots)?);
        }
        catalog.push(WorkPackageDef::from_work_orders(WpId(id as u16), work_orders)?);
    }
    Ok(catalog)
}

/// Which catalog packages an instance under construction has used so far.
#[derive(Debug, Clone)]
pub struct CoverageTracker {
    used: Vec<bool>,
}

impl CoverageTracker {
    pub fn new(n_work_packages: usize) -> Self {
        Self {
            used: vec![false; n_work_packages],
        }
    }

    pub fn mark(&mut self, wp: WpId) {
        self.used[wp.0 as usize] = true;
    }

    pub fn unused(&self) -> Vec<WpId> {
        self.used
            .iter()
            .enumerate()
            .filter(|(_, u)| !**u)
            .map(|(i, _)| WpId(i as u16))
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.used.iter().all(|u| *u)
    }
}

/// Package list for one aircraft: an unused package first (any package once
/// all are used), then further random packages with repetition until the
/// cumulative duration passes the threshold and the stop draw fires, or the
/// retry cap is reached.
pub fn assign_wps_to_aircraft<R: Rng>(
    tracker: &mut CoverageTracker,
    catalog: &[WorkPackageDef],
    config: &GeneratorConfig,
    rng: &mut R,
) -> Vec<WpId> {
    let unused = tracker.unused();
    let first = match unused.choose(rng) {
        Some(wp) => *wp,
        None => WpId(rng.gen_range(0..catalog.len()) as u16),
    };
    let mut list = vec![first];
    tracker.mark(first);
    let mut cumulative = catalog[first.0 as usize].duration;
    let mut additions = 0;
    loop {
        if cumulative > config.wp_stop_threshold_min && rng.gen_bool(config.wp_stop_probability) {
            break;
        }
        if additions >= config.max_wp_retries {
            break;
        }
        let wp = WpId(rng.gen_range(0..catalog.len()) as u16);
        list.push(wp);
        tracker.mark(wp);
        cumulative += catalog[wp.0 as usize].duration;
        additions += 1;
    }
    list
}

/// Synthesized catalog and roster plus the per-instance construction loop.
#[derive(Debug, Clone)]
pub struct Generator {
    config: GeneratorConfig,
    seed: u64,
    catalog: Vec<WorkPackageDef>,
    roster: Vec<Technician>,
}

impl Generator {
    pub fn new(config: GeneratorConfig) -> Result<Self> {
        config.validate()?;
        let seed = config.seed.unwrap_or_else(rand::random);
        let roster = build_roster(&config);
        let mut rng = rng_from_seed(derive_seed(&[seed, CATALOG_STREAM]));
        let catalog = synthesize_catalog(&mut rng, &config, &roster)?;
        Ok(Self {
            config,
            seed,
            catalog,
            roster,
        })
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn catalog(&self) -> &[WorkPackageDef] {
        &self.catalog
    }

    pub fn roster(&self) -> &[Technician] {
        &self.roster
    }

    /// The `index`-th instance of this generator's batch.
    pub fn generate(&self, index: usize) -> Result<ProblemInstance> {
        self.generate_with_seed(derive_seed(&[self.seed, index as u64]))
    }

    pub fn generate_with_seed(&self, seed: u64) -> Result<ProblemInstance> {
        let mut rng = rng_from_seed(seed);
        let mut last_failure = String::new();
        for _ in 0..self.config.max_instance_attempts {
            match self.attempt(&mut rng) {
                Ok((base_day, aircraft)) => {
                    return Ok(ProblemInstance {
                        aircraft,
                        catalog: self.catalog.clone(),
                        roster: self.roster.clone(),
                        base_day,
                        shift_mode: self.config.shift_mode,
                        seed: Some(seed),
                    })
                }
                Err(reason) => last_failure = reason.to_string(),
            }
        }
        Err(Error::Exhausted {
            attempts: self.config.max_instance_attempts,
            last_failure,
        })
    }

    pub fn generate_batch(&self, count: usize) -> Result<Vec<ProblemInstance>> {
        (0..count).map(|k| self.generate(k)).collect()
    }

    fn attempt(&self, rng: &mut SolverRng) -> std::result::Result<(u32, Vec<Aircraft>), AttemptFailure> {
        let config = &self.config;
        let base_day = rng.gen_range(0..365);
        let mut tracker = CoverageTracker::new(self.catalog.len());
        let mut aircraft = Vec::with_capacity(config.n_aircraft);
        for i in 0..config.n_aircraft {
            let landing = rng.gen_range(0..MINUTES_PER_DAY);
            let wp_list = assign_wps_to_aircraft(&mut tracker, &self.catalog, config, rng);
            let work: Minute = wp_list.iter().map(|wp| self.catalog[wp.0 as usize].duration).sum();
            let turnaround = (work as f64 * config.turnaround_factor).round() as Minute;
            if turnaround > config.max_turnaround {
                return Err(AttemptFailure::Turnaround(turnaround));
            }
            aircraft.push(Aircraft::new(format!("AC{:02}", i + 1), landing, turnaround, wp_list));
        }
        if !tracker.is_complete() {
            return Err(AttemptFailure::Coverage(tracker.unused().len()));
        }
        let man_hours: Minute = aircraft
            .iter()
            .flat_map(|a| &a.wp_list)
            .map(|wp| self.catalog[wp.0 as usize].man_hours)
            .sum();
        let (low, high) = config.load_limits(&aircraft);
        if (man_hours as f64) < low || (man_hours as f64) > high {
            return Err(AttemptFailure::Load(man_hours));
        }
        Ok((base_day, aircraft))
    }
}

#[derive(Debug)]
enum AttemptFailure {
    Turnaround(Minute),
    Coverage(usize),
    Load(Minute),
}

impl fmt::Display for AttemptFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttemptFailure::Turnaround(t) => write!(f, "turnaround {t} min over the cap"),
            AttemptFailure::Coverage(n) => write!(f, "{n} packages unused"),
            AttemptFailure::Load(m) => write!(f, "{m} man-minutes outside the load band"),
        }
    }
}

/// Generates the first instance of the batch defined by `config`.
pub fn generate_instance(config: GeneratorConfig) -> Result<ProblemInstance> {
    Generator::new(config)?.generate(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    MissingWorkPackage(WpId),
    UnknownWorkPackage { serial: String, wp: WpId },
    EmptyWorkPackageList { serial: String },
    LoadOutOfBand { man_hours: Minute, low: f64, high: f64 },
    TurnaroundExceeded { serial: String, turnaround: Minute, max: Minute },
    DepartureMismatch { serial: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingWorkPackage(wp) => write!(f, "work package {wp} never used"),
            Violation::UnknownWorkPackage { serial, wp } => {
                write!(f, "{serial}: work package {wp} not in catalog")
            }
            Violation::EmptyWorkPackageList { serial } => write!(f, "{serial}: no work packages"),
            Violation::LoadOutOfBand { man_hours, low, high } => {
                write!(f, "{man_hours} man-minutes outside [{low:.0}, {high:.0}]")
            }
            Violation::TurnaroundExceeded { serial, turnaround, max } => {
                write!(f, "{serial}: turnaround {turnaround} exceeds {max}")
            }
            Violation::DepartureMismatch { serial } => {
                write!(f, "{serial}: departure != landing + turnaround")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_compliant(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_instance(instance: &ProblemInstance, config: &GeneratorConfig) -> ValidationReport {
    let mut violations = Vec::new();
    let mut tracker = CoverageTracker::new(instance.catalog.len());
    let mut man_hours = 0;
    for ac in &instance.aircraft {
        if ac.wp_list.is_empty() {
            violations.push(Violation::EmptyWorkPackageList { serial: ac.serial.clone() });
        }
        for &wp in &ac.wp_list {
            match instance.work_package(wp) {
                Some(def) => {
                    tracker.mark(wp);
                    man_hours += def.man_hours;
                }
                None => violations.push(Violation::UnknownWorkPackage {
                    serial: ac.serial.clone(),
                    wp,
                }),
            }
        }
        if ac.turnaround > config.max_turnaround {
            violations.push(Violation::TurnaroundExceeded {
                serial: ac.serial.clone(),
                turnaround: ac.turnaround,
                max: config.max_turnaround,
            });
        }
        if ac.departure != ac.landing + ac.turnaround {
            violations.push(Violation::DepartureMismatch { serial: ac.serial.clone() });
        }
    }
    violations.extend(tracker.unused().into_iter().map(Violation::MissingWorkPackage));
    let (low, high) = config.load_limits(&instance.aircraft);
    if (man_hours as f64) < low || (man_hours as f64) > high {
        violations.push(Violation::LoadOutOfBand { man_hours, low, high });
    }
    ValidationReport { violations }
}

/// Batch summary with one column per statistic of the batch table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub instances: usize,
    pub avg_aircraft: f64,
    pub avg_total_turnaround: f64,
    pub avg_total_wp_duration: f64,
    /// Total package duration over total turnaround, as a fraction.
    pub ratio: f64,
    pub avg_wps_per_aircraft: f64,
}

pub fn instance_statistics(batch: &[ProblemInstance]) -> Result<BatchStats> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let n = batch.len() as f64;
    let mut turnaround = 0.0;
    let mut work = 0.0;
    let mut aircraft = 0usize;
    let mut wps = 0usize;
    for inst in batch {
        for ac in &inst.aircraft {
            turnaround += ac.turnaround as f64;
            aircraft += 1;
            wps += ac.wp_list.len();
            for &wp in &ac.wp_list {
                work += inst.work_package(wp).ok_or(Error::UnknownWorkPackage(wp.0))?.duration as f64;
            }
        }
    }
    Ok(BatchStats {
        instances: batch.len(),
        avg_aircraft: aircraft as f64 / n,
        avg_total_turnaround: turnaround / n,
        avg_total_wp_duration: work / n,
        ratio: if turnaround > 0.0 { work / turnaround } else { 0.0 },
        avg_wps_per_aircraft: if aircraft > 0 { wps as f64 / aircraft as f64 } else { 0.0 },
    })
}

/// Writes `batch_stats.csv` rows.
pub fn write_batch_stats<W: std::io::Write>(rows: &[(&str, &BatchStats)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "batch",
        "instances",
        "aircraft_per_instance",
        "avg_total_turnaround_min",
        "avg_total_wp_duration_min",
        "pct_turnaround_needed",
        "avg_wps_per_aircraft",
    ])?;
    for (name, s) in rows {
        w.write_record([
            name.to_string(),
            s.instances.to_string(),
            format!("{:.1}", s.avg_aircraft),
            format!("{:.1}", s.avg_total_turnaround),
            format!("{:.2}", s.avg_total_wp_duration),
            format!("{:.1}", s.ratio * 100.0),
            format!("{:.2}", s.avg_wps_per_aircraft),
        ])?;
    }
    w.flush()?;
    Ok(())
}
