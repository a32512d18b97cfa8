use std::io::Write;

use anyhow::{Context, Result};
use serde::Serialize;

use pastctl::events::EventStructure;
use pastctl::monitor::{Verdict, Verdicts};

/// One verdict table line; also the CSV record layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub event: String,
    pub device: String,
    pub seq: u32,
    /// `F`..`T` tokens in six-valued mode, `false`/`true` in two-valued mode.
    pub verdict: String,
    pub rank: u8,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub formula: String,
    pub mode: &'static str,
    pub devices: usize,
    pub events: usize,
    pub verdicts: Vec<Row>,
}

impl RunReport {
    /// Table over every event of `e` in topological order.
    pub fn new(formula: &str, e: &EventStructure, verdicts: &Verdicts) -> Result<RunReport> {
        let mut rows = Vec::with_capacity(e.len());
        for id in e.topological_order()? {
            let event = e.event(&id).expect("ordered ids exist");
            let v = verdicts
                .get(&id)
                .with_context(|| format!("no verdict for event `{id}`"))?;
            let (verdict, rank) = match v {
                Verdict::Two(b) => (b.to_string(), u8::from(b)),
                Verdict::Six(v) => (v.token().to_string(), v.rank()),
            };
            rows.push(Row {
                event: id.to_string(),
                device: event.device.to_string(),
                seq: event.seq,
                verdict,
                rank,
            });
        }
        Ok(RunReport {
            formula: formula.to_string(),
            mode: match verdicts {
                Verdicts::Two(_) => "two",
                Verdicts::Six(_) => "six",
            },
            devices: e.devices().len(),
            events: e.len(),
            verdicts: rows,
        })
    }
}

pub fn write_csv(rows: &[Row], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(["event", "device", "seq", "verdict", "rank"])?;
    }
    w.flush()?;
    Ok(())
}
