use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{PointSummary, SimError, TrialRecord};

fn write_rows<W: Write, R: Serialize>(w: W, rows: &[R]) -> Result<(), SimError> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

fn read_rows<R: Read, T: DeserializeOwned>(r: R) -> Result<Vec<T>, SimError> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(SimError::from)
}

pub fn write_trials_csv<W: Write>(w: W, records: &[TrialRecord]) -> Result<(), SimError> {
    write_rows(w, records)
}

pub fn write_summary_csv<W: Write>(w: W, summary: &[PointSummary]) -> Result<(), SimError> {
    write_rows(w, summary)
}

pub fn read_trials_csv<R: Read>(r: R) -> Result<Vec<TrialRecord>, SimError> {
    read_rows(r)
}

pub fn read_summary_csv<R: Read>(r: R) -> Result<Vec<PointSummary>, SimError> {
    read_rows(r)
}

pub fn trials_to_string(records: &[TrialRecord]) -> Result<String, SimError> {
    let mut buf = Vec::new();
    write_trials_csv(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn load_trials(path: &Path) -> Result<Vec<TrialRecord>, SimError> {
    read_trials_csv(std::fs::File::open(path)?)
}

/// Writes `trials.csv` and `summary.csv` under `dir`; returns their paths.
pub fn save_tables(
    dir: &Path,
    records: &[TrialRecord],
    summary: &[PointSummary],
) -> Result<Vec<std::path::PathBuf>, SimError> {
    std::fs::create_dir_all(dir)?;
    let trials = dir.join("trials.csv");
    let summ = dir.join("summary.csv");
    write_trials_csv(std::io::BufWriter::new(std::fs::File::create(&trials)?), records)?;
    write_summary_csv(std::io::BufWriter::new(std::fs::File::create(&summ)?), summary)?;
    Ok(vec![trials, summ])
}
