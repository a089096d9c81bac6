//! Schedule rendering: a JSON document for machines and a fixed-width text
//! Gantt chart for people.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decoder::{Booking, Schedule, SlotLocator, WoTime};
use crate::domain::{GeneKey, Minute, ProblemInstance, TechId, WpId};
use crate::error::{Error, Result};
use crate::fitness::{evaluate, Penalties};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    /// Text chart where each character cell spans `minutes_per_char`.
    Gantt { minutes_per_char: u32 },
}

impl ExportFormat {
    pub const DEFAULT_GANTT_SCALE: u32 = 10;

    pub fn extension(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Gantt { .. } => "txt",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    /// Accepts `json`, `gantt`, or `gantt:<minutes per character>`.
    fn from_str(s: &str) -> Result<Self> {
        let token = s.trim().to_ascii_lowercase();
        match token.split_once(':') {
            None if token == "json" => Ok(Self::Json),
            None if token == "gantt" => Ok(Self::Gantt {
                minutes_per_char: Self::DEFAULT_GANTT_SCALE,
            }),
            Some(("gantt", scale)) => match scale.parse::<u32>() {
                Ok(n) if n > 0 => Ok(Self::Gantt { minutes_per_char: n }),
                _ => Err(Error::UnknownFormat(s.to_string())),
            },
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub instance_seed: Option<u64>,
    pub fitness: f64,
    pub w: usize,
    pub l: usize,
    pub aircraft: Vec<AircraftDoc>,
    pub technicians: Vec<TechnicianDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AircraftDoc {
    pub serial: String,
    pub landing: Minute,
    pub departure: Minute,
    pub wps: Vec<WpDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WpDoc {
    pub wp_id: u16,
    pub occurrence: u16,
    pub wos: Vec<WoDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WoDoc {
    pub start: Minute,
    pub end: Minute,
    pub techs: Vec<u16>,
    /// Slot index of each entry in `techs`.
    pub slots: Vec<u16>,
    pub uncovered_slots: u16,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnicianDoc {
    pub tech_id: u16,
    pub bookings: Vec<BookingDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BookingDoc {
    pub start: Minute,
    pub end: Minute,
    /// Aircraft serial.
    pub aircraft: String,
    pub wp_id: u16,
    pub wo: u16,
}

/// Builds the JSON document model. Packages appear per aircraft in the
/// order they were placed.
pub fn schedule_doc(schedule: &Schedule, instance: &ProblemInstance, penalties: &Penalties) -> ScheduleDoc {
    let report = evaluate(schedule, instance, penalties);
    let mut crews: BTreeMap<(GeneKey, u16), Vec<(u16, TechId)>> = BTreeMap::new();
    for b in schedule.bookings.iter().flatten() {
        crews.entry((b.gene, b.wo)).or_default().push((b.slot, b.tech));
    }

    let mut aircraft: Vec<AircraftDoc> = instance
        .aircraft
        .iter()
        .map(|a| AircraftDoc {
            serial: a.serial.clone(),
            landing: a.landing,
            departure: a.departure,
            wps: Vec::new(),
        })
        .collect();
    for t in &schedule.wo_times {
        let Some(doc) = aircraft.get_mut(t.gene.aircraft as usize) else {
            continue;
        };
        let position = doc
            .wps
            .iter()
            .position(|w| w.wp_id == t.gene.wp.0 && w.occurrence == t.gene.occurrence);
        let wp = match position {
            Some(i) => &mut doc.wps[i],
            None => {
                doc.wps.push(WpDoc {
                    wp_id: t.gene.wp.0,
                    occurrence: t.gene.occurrence,
                    wos: Vec::new(),
                });
                doc.wps.last_mut().expect("just pushed")
            }
        };
        let mut crew = crews.remove(&(t.gene, t.wo)).unwrap_or_default();
        crew.sort_unstable();
        wp.wos.push(WoDoc {
            start: t.start,
            end: t.end,
            techs: crew.iter().map(|c| c.1 .0).collect(),
            slots: crew.iter().map(|c| c.0).collect(),
            uncovered_slots: t.uncovered,
        });
    }

    let technicians = schedule
        .bookings
        .iter()
        .enumerate()
        .map(|(i, list)| TechnicianDoc {
            tech_id: i as u16,
            bookings: list
                .iter()
                .map(|b| BookingDoc {
                    start: b.start,
                    end: b.end,
                    aircraft: instance
                        .aircraft
                        .get(b.gene.aircraft as usize)
                        .map_or_else(|| b.gene.aircraft.to_string(), |a| a.serial.clone()),
                    wp_id: b.gene.wp.0,
                    wo: b.wo,
                })
                .collect(),
        })
        .collect();

    ScheduleDoc {
        instance_seed: instance.seed,
        fitness: report.fitness,
        w: report.uncovered,
        l: report.late,
        aircraft,
        technicians,
    }
}

pub fn export_schedule(
    schedule: &Schedule,
    instance: &ProblemInstance,
    penalties: &Penalties,
    format: ExportFormat,
) -> Result<Vec<u8>> {
    match format {
        ExportFormat::Json => Ok(serde_json::to_vec_pretty(&schedule_doc(schedule, instance, penalties))?),
        ExportFormat::Gantt { minutes_per_char } => Ok(render_gantt(schedule, instance, minutes_per_char).into_bytes()),
    }
}

/// Rebuilds a schedule from its JSON export. Bookings are recovered from
/// the per-aircraft crews; the per-technician lanes are a derived view and
/// are ignored.
pub fn parse_schedule_json(bytes: &[u8], instance: &ProblemInstance) -> Result<Schedule> {
    let doc: ScheduleDoc = serde_json::from_slice(bytes)?;
    if doc.aircraft.len() != instance.aircraft.len() {
        return Err(Error::Parse(format!(
            "document has {} aircraft, instance has {}",
            doc.aircraft.len(),
            instance.aircraft.len()
        )));
    }
    let mut schedule = Schedule::with_technicians(instance.roster.len());
    for (a, ac) in doc.aircraft.iter().enumerate() {
        for wp in &ac.wps {
            let gene = GeneKey::new(a, wp.wp_id, wp.occurrence);
            let def = instance
                .work_package(WpId(wp.wp_id))
                .ok_or(Error::UnknownWorkPackage(wp.wp_id))?;
            for (k, wo) in wp.wos.iter().enumerate() {
                let slot_count = def
                    .work_orders
                    .get(k)
                    .map(|w| w.slots.len())
                    .ok_or_else(|| Error::Parse(format!("{gene} has too many work orders")))?;
                if wo.techs.len() != wo.slots.len() {
                    return Err(Error::Parse(format!("{gene} wo {k}: techs and slots differ in length")));
                }
                let wo_index = k as u16;
                schedule.wo_times.push(WoTime {
                    gene,
                    wo: wo_index,
                    start: wo.start,
                    end: wo.end,
                    uncovered: wo.uncovered_slots,
                });
                for (&tech, &slot) in wo.techs.iter().zip(&wo.slots) {
                    let lane = schedule
                        .bookings
                        .get_mut(tech as usize)
                        .ok_or_else(|| Error::Parse(format!("unknown technician {tech}")))?;
                    lane.push(Booking {
                        tech: TechId(tech),
                        start: wo.start,
                        end: wo.end,
                        gene,
                        wo: wo_index,
                        slot,
                    });
                }
                for slot in 0..slot_count as u16 {
                    if !wo.slots.contains(&slot) {
                        schedule.uncovered.push(SlotLocator { gene, wo: wo_index, slot });
                    }
                }
            }
        }
    }
    for lane in &mut schedule.bookings {
        lane.sort_by_key(|b| (b.start, b.end));
    }
    Ok(schedule)
}

fn render_gantt(schedule: &Schedule, instance: &ProblemInstance, minutes_per_char: u32) -> String {
    let scale = Minute::from(minutes_per_char.max(1));
    let starts = schedule.wo_times.iter().map(|t| t.start);
    let ends = schedule.wo_times.iter().map(|t| t.end);
    let (Some(origin), Some(finish)) = (starts.min(), ends.max()) else {
        return "empty schedule\n".to_string();
    };
    let cells = ((finish - origin + scale - 1) / scale) as usize;
    let cell = |t: Minute| ((t - origin) / scale) as usize;
    let cell_end = |t: Minute| ((t - origin + scale - 1) / scale) as usize;

    let label_width = instance
        .aircraft
        .iter()
        .map(|a| a.serial.len())
        .chain([8])
        .max()
        .unwrap_or(8);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:label_width$} | minutes {origin}..{finish}, {scale} min per char; '=' work order, '!' work order with uncovered slots, '#' booking",
        ""
    );

    let mut lanes: Vec<Vec<u8>> = vec![vec![b' '; cells]; instance.aircraft.len()];
    for t in &schedule.wo_times {
        let Some(lane) = lanes.get_mut(t.gene.aircraft as usize) else {
            continue;
        };
        let mark = if t.uncovered > 0 { b'!' } else { b'=' };
        for c in &mut lane[cell(t.start)..cell_end(t.end)] {
            *c = mark;
        }
    }
    for (a, lane) in instance.aircraft.iter().zip(&lanes) {
        let _ = writeln!(out, "{:label_width$} |{}|", a.serial, String::from_utf8_lossy(lane));
    }

    for (i, list) in schedule.bookings.iter().enumerate() {
        let mut lane = vec![b' '; cells];
        for b in list {
            for c in &mut lane[cell(b.start).min(cells)..cell_end(b.end).min(cells)] {
                *c = b'#';
            }
        }
        let label = format!("tech {i}");
        let _ = writeln!(out, "{label:label_width$} |{}|", String::from_utf8_lossy(&lane));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::check_schedule;
    use crate::decoder::decode;
    use crate::domain::fixtures::*;
    use crate::domain::{Aircraft, Certification::*};
    use crate::ea::{Chromosome, Gene, StaffEntry};

    fn one_booking() -> (ProblemInstance, Schedule) {
        let catalog = vec![wp(0, vec![wo(60, &[&[B1Technician]])])];
        let aircraft = vec![Aircraft::new("A1", 100, 200, vec![WpId(0)])];
        let inst = instance(aircraft, catalog, roster([1, 0, 0, 0], 0, 480));
        let gene = Gene {
            key: GeneKey::new(0, 0, 0),
            entries: vec![StaffEntry { wo: 0, slot: 0, tech: TechId(0) }],
        };
        let s = decode(&Chromosome::new(vec![gene]), &inst).unwrap();
        (inst, s)
    }

    #[test]
    fn format_tokens() {
        assert_eq!("json".parse::<ExportFormat>().unwrap(), ExportFormat::Json);
        assert_eq!(
            "gantt".parse::<ExportFormat>().unwrap(),
            ExportFormat::Gantt { minutes_per_char: 10 }
        );
        assert_eq!(
            "gantt:5".parse::<ExportFormat>().unwrap(),
            ExportFormat::Gantt { minutes_per_char: 5 }
        );
        for bad in ["xml", "gantt:0", "gantt:x", "json:2"] {
            assert!(matches!(bad.parse::<ExportFormat>(), Err(Error::UnknownFormat(_))), "{bad}");
        }
    }

    #[test]
    fn single_bar_width_equals_duration() {
        let (inst, s) = one_booking();
        let text = String::from_utf8(
            export_schedule(&s, &inst, &Penalties::default(), ExportFormat::Gantt { minutes_per_char: 1 }).unwrap(),
        )
        .unwrap();
        let aircraft_line = text.lines().find(|l| l.starts_with("A1")).unwrap();
        assert_eq!(aircraft_line.matches('=').count(), 60);
        let tech_line = text.lines().find(|l| l.starts_with("tech 0")).unwrap();
        assert_eq!(tech_line.matches('#').count(), 60);
    }

    #[test]
    fn empty_schedule_exports() {
        let (inst, _) = one_booking();
        let empty = Schedule::with_technicians(inst.roster.len());
        let json = export_schedule(&empty, &inst, &Penalties::default(), ExportFormat::Json).unwrap();
        let doc: ScheduleDoc = serde_json::from_slice(&json).unwrap();
        assert!(doc.aircraft.iter().all(|a| a.wps.is_empty()));
        assert!(doc.technicians.iter().all(|t| t.bookings.is_empty()));
        let text = export_schedule(&empty, &inst, &Penalties::default(), "gantt".parse().unwrap()).unwrap();
        assert!(!text.is_empty());
    }

    #[test]
    fn json_round_trip_is_clean() {
        let (inst, s) = one_booking();
        let json = export_schedule(&s, &inst, &Penalties::default(), ExportFormat::Json).unwrap();
        let doc: ScheduleDoc = serde_json::from_slice(&json).unwrap();
        assert_eq!((doc.w, doc.l, doc.fitness), (0, 0, 0.0));
        assert_eq!(doc.aircraft[0].wps[0].wos[0].techs, vec![0]);
        let back = parse_schedule_json(&json, &inst).unwrap();
        assert_eq!(back, s);
        assert!(check_schedule(&back, &inst).is_empty());
    }
}
