//! Problem-domain types shared by the generator, the solver and the evaluator.
//!
//! Time is measured in whole minutes from the horizon origin, which is
//! midnight of the instance base day.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minutes from the horizon origin.
pub type Minute = i64;

pub const MINUTES_PER_DAY: Minute = 1440;
pub const DEFAULT_SHIFT_LENGTH: Minute = 480;
pub const MAX_TURNAROUND: Minute = 1680;

/// Personnel qualification. Every technician holds exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Certification {
    B1Technician,
    B2Technician,
    B1Engineer,
    B2Engineer,
}

impl Certification {
    pub const ALL: [Certification; 4] = [
        Certification::B1Technician,
        Certification::B2Technician,
        Certification::B1Engineer,
        Certification::B2Engineer,
    ];

    /// Short token used in the CSV formats.
    pub fn token(self) -> &'static str {
        match self {
            Certification::B1Technician => "B1T",
            Certification::B2Technician => "B2T",
            Certification::B1Engineer => "B1E",
            Certification::B2Engineer => "B2E",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Certification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "B1T" | "B1_TECHNICIAN" => Ok(Certification::B1Technician),
            "B2T" | "B2_TECHNICIAN" => Ok(Certification::B2Technician),
            "B1E" | "B1_ENGINEER" => Ok(Certification::B1Engineer),
            "B2E" | "B2_ENGINEER" => Ok(Certification::B2Engineer),
            other => Err(Error::Parse(format!("unknown certification `{other}`"))),
        }
    }
}

/// Non-empty set of certifications, stored as a 4-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Certification>", into = "Vec<Certification>")]
pub struct CertSet(u8);

impl CertSet {
    pub fn new<I: IntoIterator<Item = Certification>>(certs: I) -> Result<Self> {
        let mask = certs.into_iter().fold(0u8, |m, c| m | (1 << c.index()));
        if mask == 0 {
            return Err(Error::InvalidInstance(
                "a staff slot must allow at least one certification".into(),
            ));
        }
        Ok(CertSet(mask))
    }

    pub fn single(cert: Certification) -> Self {
        CertSet(1 << cert.index())
    }

    pub fn contains(self, cert: Certification) -> bool {
        self.0 & (1 << cert.index()) != 0
    }

    pub fn is_subset(self, other: CertSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: CertSet) -> CertSet {
        CertSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = Certification> {
        Certification::ALL.into_iter().filter(move |c| self.contains(*c))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl TryFrom<Vec<Certification>> for CertSet {
    type Error = Error;

    fn try_from(v: Vec<Certification>) -> Result<Self> {
        CertSet::new(v)
    }
}

impl From<CertSet> for Vec<Certification> {
    fn from(s: CertSet) -> Self {
        s.iter().collect()
    }
}

impl fmt::Display for CertSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<&str> = self.iter().map(Certification::token).collect();
        f.write_str(&tokens.join("+"))
    }
}

impl FromStr for CertSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let certs = s
            .split('+')
            .map(str::parse)
            .collect::<Result<Vec<Certification>>>()?;
        CertSet::new(certs)
    }
}

/// One required technician position on a work order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaffSlotRequirement {
    pub allowed: CertSet,
}

impl StaffSlotRequirement {
    pub fn new(allowed: CertSet) -> Self {
        Self { allowed }
    }

    pub fn admits(&self, cert: Certification) -> bool {
        self.allowed.contains(cert)
    }
}

/// Atomic, non-preemptible task executed concurrently by its whole crew.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkOrderDef {
    pub duration: Minute,
    pub slots: Vec<StaffSlotRequirement>,
}

impl WorkOrderDef {
    pub fn new(duration: Minute, slots: Vec<StaffSlotRequirement>) -> Result<Self> {
        if duration < 1 {
            return Err(Error::InvalidInstance(format!(
                "work order duration must be at least one minute, got {duration}"
            )));
        }
        if slots.is_empty() {
            return Err(Error::InvalidInstance(
                "work order needs at least one staff slot".into(),
            ));
        }
        Ok(Self { duration, slots })
    }

    pub fn man_minutes(&self) -> Minute {
        self.duration * self.slots.len() as Minute
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WpId(pub u16);

impl fmt::Display for WpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Catalog entry. The order of `work_orders` is the mandatory execution
/// sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkPackageDef {
    pub id: WpId,
    pub duration: Minute,
    pub man_hours: Minute,
    pub crew_size: usize,
    pub work_orders: Vec<WorkOrderDef>,
}

impl WorkPackageDef {
    /// Builds a package whose duration, man-hours and crew size are derived
    /// from its work orders.
    pub fn from_work_orders(id: WpId, work_orders: Vec<WorkOrderDef>) -> Result<Self> {
        if work_orders.is_empty() {
            return Err(Error::InvalidInstance(format!(
                "work package {id} has no work orders"
            )));
        }
        let duration = work_orders.iter().map(|wo| wo.duration).sum();
        let man_hours = work_orders.iter().map(WorkOrderDef::man_minutes).sum();
        let crew_size = work_orders.iter().map(|wo| wo.slots.len()).max().unwrap_or(0);
        Ok(Self {
            id,
            duration,
            man_hours,
            crew_size,
            work_orders,
        })
    }

    /// Number of staff entries a gene for this package carries.
    pub fn slot_count(&self) -> usize {
        self.work_orders.iter().map(|wo| wo.slots.len()).sum()
    }

    pub fn check(&self) -> Result<()> {
        let derived = WorkPackageDef::from_work_orders(self.id, self.work_orders.clone())?;
        if derived.duration != self.duration
            || derived.man_hours != self.man_hours
            || derived.crew_size != self.crew_size
        {
            return Err(Error::InvalidInstance(format!(
                "work package {} summary fields disagree with its work orders",
                self.id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TechId(pub u16);

impl fmt::Display for TechId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Technician {
    pub id: TechId,
    pub cert: Certification,
    pub shift_start: Minute,
    pub shift_length: Minute,
}

/// Whether a technician's shift block repeats every day of the horizon or
/// happens once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ShiftMode {
    #[default]
    Daily,
    Single,
}

impl Technician {
    /// Availability windows `[start, end)` up to `horizon_end`, in time order.
    pub fn availability(&self, mode: ShiftMode, horizon_end: Minute) -> Vec<(Minute, Minute)> {
        let block = |day: Minute| {
            let start = self.shift_start + day * MINUTES_PER_DAY;
            (start, start + self.shift_length)
        };
        match mode {
            ShiftMode::Single => vec![block(0)],
            ShiftMode::Daily => (0..)
                .map(block)
                .take_while(|(start, _)| *start < horizon_end.max(1))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aircraft {
    pub serial: String,
    pub landing: Minute,
    pub departure: Minute,
    pub turnaround: Minute,
    pub wp_list: Vec<WpId>,
}

impl Aircraft {
    pub fn new(serial: impl Into<String>, landing: Minute, turnaround: Minute, wp_list: Vec<WpId>) -> Self {
        Self {
            serial: serial.into(),
            landing,
            departure: landing + turnaround,
            turnaround,
            wp_list,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub aircraft: Vec<Aircraft>,
    pub catalog: Vec<WorkPackageDef>,
    pub roster: Vec<Technician>,
    /// Days after the fixed epoch; only affects rendered datetimes.
    pub base_day: u32,
    pub shift_mode: ShiftMode,
    pub seed: Option<u64>,
}

impl ProblemInstance {
    pub fn work_package(&self, id: WpId) -> Option<&WorkPackageDef> {
        self.catalog.get(id.0 as usize).filter(|wp| wp.id == id)
    }

    /// Structural validation: catalog indexed by id, every referenced package
    /// exists, aircraft arithmetic holds, roster ids are dense.
    pub fn check(&self) -> Result<()> {
        for (i, wp) in self.catalog.iter().enumerate() {
            if wp.id.0 as usize != i {
                return Err(Error::InvalidInstance(format!(
                    "catalog row {i} has id {}; ids must be 0..n in order",
                    wp.id
                )));
            }
            wp.check()?;
        }
        for (i, tech) in self.roster.iter().enumerate() {
            if tech.id.0 as usize != i {
                return Err(Error::InvalidInstance(format!(
                    "roster row {i} has id {}; ids must be 0..n in order",
                    tech.id
                )));
            }
            if tech.shift_length < 1 {
                return Err(Error::InvalidInstance(format!(
                    "technician {} has an empty shift",
                    tech.id
                )));
            }
        }
        for ac in &self.aircraft {
            if ac.departure != ac.landing + ac.turnaround {
                return Err(Error::InvalidInstance(format!(
                    "aircraft {}: departure != landing + turnaround",
                    ac.serial
                )));
            }
            if let Some(wp) = ac.wp_list.iter().find(|wp| self.work_package(**wp).is_none()) {
                return Err(Error::UnknownWorkPackage(wp.0));
            }
        }
        Ok(())
    }

    /// Latest time any work order may end: the last departure plus the longest
    /// turnaround.
    pub fn horizon_end(&self) -> Minute {
        let last_departure = self.aircraft.iter().map(|a| a.departure).max().unwrap_or(0);
        let longest = self.aircraft.iter().map(|a| a.turnaround).max().unwrap_or(0);
        last_departure + longest
    }

    /// Total number of (aircraft, package occurrence) pairings.
    pub fn gene_count(&self) -> usize {
        self.aircraft.iter().map(|a| a.wp_list.len()).sum()
    }
}

/// Technicians whose certification is admitted by `slot`.
pub fn qualified_staff(instance: &ProblemInstance, slot: &StaffSlotRequirement) -> BTreeSet<TechId> {
    instance
        .roster
        .iter()
        .filter(|t| slot.admits(t.cert))
        .map(|t| t.id)
        .collect()
}

/// Person-minutes demanded by every package on every aircraft.
pub fn total_man_hours(instance: &ProblemInstance) -> Result<Minute> {
    let mut total = 0;
    for ac in &instance.aircraft {
        for &wp in &ac.wp_list {
            let def = instance.work_package(wp).ok_or(Error::UnknownWorkPackage(wp.0))?;
            total += def.man_hours;
        }
    }
    Ok(total)
}

/// Identity of one gene: the `occurrence`-th appearance of `wp` in the
/// aircraft's package list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeneKey {
    pub aircraft: u16,
    pub wp: WpId,
    pub occurrence: u16,
}

impl GeneKey {
    pub fn new(aircraft: usize, wp: u16, occurrence: u16) -> Self {
        Self {
            aircraft: aircraft as u16,
            wp: WpId(wp),
            occurrence,
        }
    }
}

impl fmt::Display for GeneKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}.wp{}", self.aircraft, self.wp)?;
        if self.occurrence > 0 {
            write!(f, "#{}", self.occurrence)?;
        }
        Ok(())
    }
}

/// Read-only lookup tables derived from an instance: gene identities,
/// qualified technicians per slot and availability windows.
#[derive(Debug, Clone)]
pub struct InstanceIndex {
    genes: Vec<GeneKey>,
    /// `qualified[wp][wo][slot]`
    qualified: Vec<Vec<Vec<Vec<TechId>>>>,
    availability: Vec<Vec<(Minute, Minute)>>,
    horizon_end: Minute,
}

impl InstanceIndex {
    pub fn new(instance: &ProblemInstance) -> Result<Self> {
        instance.check()?;
        let mut genes = Vec::with_capacity(instance.gene_count());
        for (a, ac) in instance.aircraft.iter().enumerate() {
            for (pos, wp) in ac.wp_list.iter().enumerate() {
                let occurrence = ac.wp_list[..pos].iter().filter(|w| *w == wp).count();
                genes.push(GeneKey::new(a, wp.0, occurrence as u16));
            }
        }
        let qualified = instance
            .catalog
            .iter()
            .map(|wp| {
                wp.work_orders
                    .iter()
                    .map(|wo| {
                        wo.slots
                            .iter()
                            .map(|slot| qualified_staff(instance, slot).into_iter().collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let horizon_end = instance.horizon_end();
        let availability = instance
            .roster
            .iter()
            .map(|t| t.availability(instance.shift_mode, horizon_end))
            .collect();
        Ok(Self {
            genes,
            qualified,
            availability,
            horizon_end,
        })
    }

    /// Every gene identity, grouped by aircraft in package-list order.
    pub fn genes(&self) -> &[GeneKey] {
        &self.genes
    }

    pub fn qualified(&self, wp: WpId, wo: usize, slot: usize) -> &[TechId] {
        &self.qualified[wp.0 as usize][wo][slot]
    }

    pub fn availability(&self, tech: TechId) -> &[(Minute, Minute)] {
        &self.availability[tech.0 as usize]
    }

    pub fn horizon_end(&self) -> Minute {
        self.horizon_end
    }

    /// First slot with no qualified technician, if any is referenced by the
    /// instance.
    pub fn unstaffable_slot(&self, instance: &ProblemInstance) -> Option<(WpId, usize, usize)> {
        let used: BTreeSet<WpId> = instance.aircraft.iter().flat_map(|a| a.wp_list.iter().copied()).collect();
        used.into_iter().find_map(|wp| {
            self.qualified[wp.0 as usize].iter().enumerate().find_map(|(wo, slots)| {
                slots.iter().position(Vec::is_empty).map(|slot| (wp, wo, slot))
            })
        })
    }
}
