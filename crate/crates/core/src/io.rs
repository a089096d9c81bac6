//! CSV formats for instances, catalogs and rosters.
//!
//! Instance rows: `serial,landing_datetime,departure_datetime,turnaround_minutes,wp_list`
//! with ISO-8601 `YYYY-MM-DDTHH:MM` datetimes and a `;`-separated package list.
//!
//! Catalog rows: `wp_id,duration_min,man_hours_min,crew_size,wo_spec` where each
//! work order is `duration@certset|certset...`, work orders joined by `;` and
//! certifications inside a slot joined by `+`.
//!
//! Roster rows: `tech_id,certification,shift_start_min,shift_length_min`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate, NaiveDateTime};

use crate::domain::*;
use crate::error::{Error, Result};

const DATETIME_FORMAT: &str = "%Y-%m-%dT%H:%M";

/// Day zero of the base-day offset.
pub fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(2025, 1, 1).expect("valid epoch")
}

fn origin(base_day: u32) -> NaiveDateTime {
    (epoch() + Duration::days(base_day as i64))
        .and_hms_opt(0, 0, 0)
        .expect("midnight")
}

pub fn format_datetime(base_day: u32, minute: Minute) -> String {
    (origin(base_day) + Duration::minutes(minute))
        .format(DATETIME_FORMAT)
        .to_string()
}

fn parse_datetime(s: &str) -> Result<NaiveDateTime> {
    NaiveDateTime::parse_from_str(s.trim(), DATETIME_FORMAT)
        .map_err(|e| Error::Parse(format!("bad datetime `{s}`: {e}")))
}

fn parse_int<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} `{s}`")))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::File {
        path: path.to_owned(),
        source,
    })
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::File {
        path: path.to_owned(),
        source,
    })
}

pub fn write_aircraft<W: Write>(instance: &ProblemInstance, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "serial",
        "landing_datetime",
        "departure_datetime",
        "turnaround_minutes",
        "wp_list",
    ])?;
    for ac in &instance.aircraft {
        let wps: Vec<String> = ac.wp_list.iter().map(ToString::to_string).collect();
        w.write_record([
            ac.serial.clone(),
            format_datetime(instance.base_day, ac.landing),
            format_datetime(instance.base_day, ac.departure),
            ac.turnaround.to_string(),
            wps.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses aircraft rows. Returns the base-day offset (date of the earliest
/// landing) and the aircraft with times relative to that day's midnight.
pub fn read_aircraft<R: Read>(input: R) -> Result<(u32, Vec<Aircraft>)> {
    let mut rows = Vec::new();
    for record in csv::Reader::from_reader(input).records() {
        let record = record?;
        if record.len() != 5 {
            return Err(Error::Parse(format!(
                "instance row needs 5 fields, got {}",
                record.len()
            )));
        }
        let landing = parse_datetime(&record[1])?;
        let departure = parse_datetime(&record[2])?;
        let turnaround: Minute = parse_int(&record[3], "turnaround")?;
        let wp_list = record[4]
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_int(s, "wp id").map(WpId))
            .collect::<Result<Vec<_>>>()?;
        rows.push((record[0].to_string(), landing, departure, turnaround, wp_list));
    }
    let base_date = rows
        .iter()
        .map(|r| r.1.date())
        .min()
        .unwrap_or_else(epoch);
    let base_day = (base_date - epoch()).num_days();
    let base_day = u32::try_from(base_day)
        .map_err(|_| Error::Parse(format!("landing date {base_date} precedes {}", epoch())))?;
    let midnight = origin(base_day);
    let aircraft = rows
        .into_iter()
        .map(|(serial, landing, departure, turnaround, wp_list)| Aircraft {
            serial,
            landing: (landing - midnight).num_minutes(),
            departure: (departure - midnight).num_minutes(),
            turnaround,
            wp_list,
        })
        .collect();
    Ok((base_day, aircraft))
}

fn wo_spec(wp: &WorkPackageDef) -> String {
    wp.work_orders
        .iter()
        .map(|wo| {
            let slots: Vec<String> = wo.slots.iter().map(|s| s.allowed.to_string()).collect();
            format!("{}@{}", wo.duration, slots.join("|"))
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_wo_spec(spec: &str) -> Result<Vec<WorkOrderDef>> {
    spec.split(';')
        .map(|wo| {
            let (duration, slots) = wo
                .split_once('@')
                .ok_or_else(|| Error::Parse(format!("work order `{wo}` lacks `@`")))?;
            let slots = slots
                .split('|')
                .map(|s| s.parse().map(StaffSlotRequirement::new))
                .collect::<Result<Vec<_>>>()?;
            WorkOrderDef::new(parse_int(duration, "work order duration")?, slots)
        })
        .collect()
}

pub fn write_catalog<W: Write>(catalog: &[WorkPackageDef], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["wp_id", "duration_min", "man_hours_min", "crew_size", "wo_spec"])?;
    for wp in catalog {
        w.write_record([
            wp.id.to_string(),
            wp.duration.to_string(),
            wp.man_hours.to_string(),
            wp.crew_size.to_string(),
            wo_spec(wp),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_catalog<R: Read>(input: R) -> Result<Vec<WorkPackageDef>> {
    let mut catalog = Vec::new();
    for record in csv::Reader::from_reader(input).records() {
        let record = record?;
        if record.len() != 5 {
            return Err(Error::Parse(format!(
                "catalog row needs 5 fields, got {}",
                record.len()
            )));
        }
        let wp = WorkPackageDef {
            id: WpId(parse_int(&record[0], "wp id")?),
            duration: parse_int(&record[1], "duration")?,
            man_hours: parse_int(&record[2], "man-hours")?,
            crew_size: parse_int(&record[3], "crew size")?,
            work_orders: parse_wo_spec(&record[4])?,
        };
        wp.check()?;
        catalog.push(wp);
    }
    Ok(catalog)
}

pub fn write_roster<W: Write>(roster: &[Technician], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tech_id", "certification", "shift_start_min", "shift_length_min"])?;
    for t in roster {
        w.write_record([
            t.id.to_string(),
            t.cert.token().to_string(),
            t.shift_start.to_string(),
            t.shift_length.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_roster<R: Read>(input: R) -> Result<Vec<Technician>> {
    let mut roster = Vec::new();
    for record in csv::Reader::from_reader(input).records() {
        let record = record?;
        if record.len() != 4 {
            return Err(Error::Parse(format!(
                "roster row needs 4 fields, got {}",
                record.len()
            )));
        }
        roster.push(Technician {
            id: TechId(parse_int(&record[0], "tech id")?),
            cert: record[1].parse()?,
            shift_start: parse_int(&record[2], "shift start")?,
            shift_length: parse_int(&record[3], "shift length")?,
        });
    }
    Ok(roster)
}

/// Assembles and validates an instance from its three CSV sources.
pub fn read_instance<A: Read, C: Read, R: Read>(
    aircraft: A,
    catalog: C,
    roster: R,
    shift_mode: ShiftMode,
) -> Result<ProblemInstance> {
    let (base_day, aircraft) = read_aircraft(aircraft)?;
    let instance = ProblemInstance {
        aircraft,
        catalog: read_catalog(catalog)?,
        roster: read_roster(roster)?,
        base_day,
        shift_mode,
        seed: None,
    };
    instance.check()?;
    Ok(instance)
}

pub fn load_instance(
    instance: &Path,
    catalog: &Path,
    roster: &Path,
    shift_mode: ShiftMode,
) -> Result<ProblemInstance> {
    read_instance(open(instance)?, open(catalog)?, open(roster)?, shift_mode)
}

pub fn save_aircraft(instance: &ProblemInstance, path: &Path) -> Result<()> {
    write_aircraft(instance, create(path)?)
}

pub fn save_catalog(catalog: &[WorkPackageDef], path: &Path) -> Result<()> {
    write_catalog(catalog, create(path)?)
}

pub fn save_roster(roster: &[Technician], path: &Path) -> Result<()> {
    write_roster(roster, create(path)?)
}

pub const CATALOG_FILE: &str = "catalog.csv";
pub const ROSTER_FILE: &str = "roster.csv";

/// Writes a batch directory: `instance_<k>.csv` per instance plus the shared
/// catalog and roster taken from the first instance.
pub fn save_batch(dir: &Path, instances: &[ProblemInstance]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::File {
        path: dir.to_path_buf(),
        source,
    })?;
    for (k, instance) in instances.iter().enumerate() {
        save_aircraft(instance, &dir.join(format!("instance_{k}.csv")))?;
    }
    if let Some(first) = instances.first() {
        save_catalog(&first.catalog, &dir.join(CATALOG_FILE))?;
        save_roster(&first.roster, &dir.join(ROSTER_FILE))?;
    }
    Ok(())
}

/// Instance files of a batch directory as `(id, path)`, ordered by the
/// numeric suffix so that `instance_10` follows `instance_9`.
pub fn list_batch(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = std::fs::read_dir(dir).map_err(|source| Error::File {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut found = Vec::new();
    for entry in entries {
        let path = entry?.path();
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let is_csv = path.extension().is_some_and(|e| e == "csv");
        if let Some(k) = stem.strip_prefix("instance_").filter(|_| is_csv) {
            let order = k.parse::<u64>().unwrap_or(u64::MAX);
            found.push((order, stem.to_string(), path.clone()));
        }
    }
    found.sort();
    Ok(found.into_iter().map(|(_, id, path)| (id, path)).collect())
}
