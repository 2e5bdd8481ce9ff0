//! CSV event logs with a `case,activity,lifecycle,timestamp` header.
//!
//! Traces appear in order of their first event; events keep row order.

use std::collections::{BTreeMap, HashMap};

use crate::error::LogError;
use crate::log::{keys, Activity, Event, HierLog, HierTrace};

pub fn parse_csv(input: &[u8]) -> Result<HierLog, LogError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| LogError::MalformedCsv(e.to_string()))?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let case_col = column("case").ok_or_else(|| LogError::MalformedCsv("no case column".into()))?;
    let act_col = column("activity").ok_or_else(|| LogError::MalformedCsv("no activity column".into()))?;
    let life_col = column("lifecycle");
    let time_col = column("timestamp");

    let mut order: HashMap<String, usize> = HashMap::new();
    let mut traces: Vec<HierTrace> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| LogError::MalformedCsv(e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or("").to_string();
        let case = field(case_col);
        let mut attrs = BTreeMap::new();
        for (col, key) in [(life_col, keys::LIFECYCLE), (time_col, keys::TIMESTAMP)] {
            if let Some(c) = col {
                let v = field(c);
                if !v.is_empty() {
                    attrs.insert(key.to_string(), v);
                }
            }
        }
        let activity = Activity::new(field(act_col))?;
        let idx = *order.entry(case).or_insert_with(|| {
            traces.push(HierTrace::default());
            traces.len() - 1
        });
        traces[idx].events.push(Event::with_attrs(vec![activity], attrs));
    }
    Ok(HierLog::new(traces))
}
