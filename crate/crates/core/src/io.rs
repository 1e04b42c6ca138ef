//! Text formats: basket files, CSV event tables, pattern TSV and instance
//! matrix CSV.
//!
//! Basket lines are `<sequence_id><d><event_id><d><label[,label...]>` with no
//! header; labels joined by commas share one itemset. Event tables are CSV
//! with a header naming at least `sequence_id`, `event_id` and `label`.
//! Recognised optional columns are `timestamp`, `duration`, `actor` and
//! `group`; any other column is read as a numeric per-event attribute.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    canonical_render, parse_pattern, Alphabet, DatabaseBuilder, EventMeta, LabeledEvent, Pattern,
    PatternStats, SequenceDatabase,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Basket,
    Table,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "basket" => Ok(Self::Basket),
            "table" => Ok(Self::Table),
            other => Err(format!(
                "unknown format {other:?} (expected basket or table)"
            )),
        }
    }
}

pub fn load(path: &Path, format: InputFormat) -> Result<SequenceDatabase> {
    let file = File::open(path)?;
    match format {
        InputFormat::Basket => parse_basket(file, ';'),
        InputFormat::Table => parse_event_table(file),
    }
}

/// Collects events per sequence in first-appearance order, then sorts each
/// sequence by event id.
#[derive(Default)]
struct Grouper {
    order: Vec<String>,
    index: HashMap<String, usize>,
    events: Vec<Vec<(i64, LabeledEvent, Option<String>)>>,
}

impl Grouper {
    fn add(&mut self, seq_id: &str, event_id: i64, event: LabeledEvent, group: Option<String>) {
        let slot = match self.index.get(seq_id) {
            Some(&i) => i,
            None => {
                self.order.push(seq_id.to_owned());
                self.events.push(Vec::new());
                self.index.insert(seq_id.to_owned(), self.order.len() - 1);
                self.order.len() - 1
            }
        };
        self.events[slot].push((event_id, event, group));
    }

    fn finish(self) -> Result<SequenceDatabase> {
        let mut builder = DatabaseBuilder::new();
        for (id, mut events) in self.order.into_iter().zip(self.events) {
            events.sort_by_key(|(eid, _, _)| *eid);
            if let Some(w) = events.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::DuplicateEventId {
                    sequence_id: id,
                    event_id: w[0].0,
                });
            }
            let mut group: Option<String> = None;
            for g in events.iter().filter_map(|(_, _, g)| g.as_ref()) {
                match &group {
                    None => group = Some(g.clone()),
                    Some(seen) if seen != g => return Err(Error::InconsistentGroup(id)),
                    Some(_) => {}
                }
            }
            builder.push(&id, events.into_iter().map(|(_, e, _)| e).collect(), group);
        }
        builder.build()
    }
}

fn split_labels(field: &str) -> Vec<String> {
    field
        .split(',')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Parses a headerless basket file. Blank lines are skipped.
pub fn parse_basket<R: Read>(reader: R, delimiter: char) -> Result<SequenceDatabase> {
    let mut grouper = Grouper::default();
    for (n, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(delimiter).collect();
        if fields.len() != 3 {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let seq_id = fields[0].trim();
        if seq_id.is_empty() {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: "empty sequence id".into(),
            });
        }
        let event_id: i64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::NonIntegerEventId {
                line: line_no,
                value: fields[1].to_owned(),
            })?;
        let labels = split_labels(fields[2]);
        if labels.is_empty() {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: "empty label".into(),
            });
        }
        grouper.add(seq_id, event_id, LabeledEvent::new(labels), None);
    }
    grouper.finish()
}

const SEQ_COL: &str = "sequence_id";
const EVENT_COL: &str = "event_id";
const LABEL_COL: &str = "label";
const TIME_COL: &str = "timestamp";
const DURATION_COL: &str = "duration";
const ACTOR_COL: &str = "actor";
const GROUP_COL: &str = "group";

/// Parses a CSV event table with a header row.
pub fn parse_event_table<R: Read>(reader: R) -> Result<SequenceDatabase> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers: Vec<String> = csv.headers()?.iter().map(|h| h.trim().to_owned()).collect();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let need = |name: &str| col(name).ok_or_else(|| Error::MissingColumn(name.to_owned()));
    let (seq_col, event_col, label_col) = (need(SEQ_COL)?, need(EVENT_COL)?, need(LABEL_COL)?);
    let (time_col, duration_col, actor_col, group_col) = (
        col(TIME_COL),
        col(DURATION_COL),
        col(ACTOR_COL),
        col(GROUP_COL),
    );
    let known = [
        SEQ_COL,
        EVENT_COL,
        LABEL_COL,
        TIME_COL,
        DURATION_COL,
        ACTOR_COL,
        GROUP_COL,
    ];
    let extra: Vec<(usize, &str)> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| !known.contains(&h.as_str()))
        .map(|(i, h)| (i, h.as_str()))
        .collect();

    let mut grouper = Grouper::default();
    for record in csv.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let cell = |i: usize| record.get(i).map(str::trim).filter(|v| !v.is_empty());
        let number = |i: usize, name: &str| -> Result<Option<f64>> {
            cell(i)
                .map(|v| {
                    v.parse::<f64>().map_err(|_| Error::InvalidNumber {
                        line,
                        column: name.to_owned(),
                        value: v.to_owned(),
                    })
                })
                .transpose()
        };

        let seq_id = cell(seq_col).ok_or_else(|| Error::MalformedLine {
            line,
            reason: "empty sequence id".into(),
        })?;
        let raw_event = cell(event_col).unwrap_or_default();
        let event_id: i64 = raw_event.parse().map_err(|_| Error::NonIntegerEventId {
            line,
            value: raw_event.to_owned(),
        })?;
        let labels = split_labels(cell(label_col).unwrap_or_default());
        if labels.is_empty() {
            return Err(Error::MalformedLine {
                line,
                reason: "empty label".into(),
            });
        }
        let mut meta = EventMeta::default();
        if let Some(v) = time_col.and_then(cell) {
            meta.timestamp = Some(v.parse().map_err(|_| Error::InvalidNumber {
                line,
                column: TIME_COL.into(),
                value: v.to_owned(),
            })?);
        }
        if let Some(i) = duration_col {
            meta.duration = number(i, DURATION_COL)?;
            if meta.duration.is_some_and(|d| d.is_nan() || d < 0.0) {
                return Err(Error::InvalidNumber {
                    line,
                    column: DURATION_COL.into(),
                    value: cell(i).unwrap_or_default().to_owned(),
                });
            }
        }
        meta.actor = actor_col.and_then(cell).map(str::to_owned);
        for &(i, name) in &extra {
            if let Some(v) = number(i, name)? {
                meta.attributes.insert(name.to_owned(), v);
            }
        }
        let group = group_col.and_then(cell).map(str::to_owned);
        grouper.add(seq_id, event_id, LabeledEvent { labels, meta }, group);
    }
    grouper.finish()
}

fn sorted_labels(alphabet: &Alphabet, set: &crate::model::Itemset) -> Vec<String> {
    let mut labels: Vec<String> = set
        .items()
        .iter()
        .map(|&id| alphabet.label(id).unwrap_or_default().to_owned())
        .collect();
    labels.sort();
    labels
}

/// Writes a basket file; event ids are 1-based positions.
pub fn write_basket<W: Write>(db: &SequenceDatabase, mut out: W, delimiter: char) -> Result<()> {
    for seq in &db.sequences {
        for (k, set) in seq.itemsets.iter().enumerate() {
            let labels = sorted_labels(&db.alphabet, set).join(",");
            writeln!(out, "{}{d}{}{d}{}", seq.id, k + 1, labels, d = delimiter)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes an event table; only columns present somewhere in `db` are emitted.
pub fn write_event_table<W: Write>(db: &SequenceDatabase, out: W) -> Result<()> {
    let metas = || db.sequences.iter().flat_map(|s| s.meta.iter());
    let has_time = metas().any(|m| m.timestamp.is_some());
    let has_duration = metas().any(|m| m.duration.is_some());
    let has_actor = metas().any(|m| m.actor.is_some());
    let has_group = db.sequences.iter().any(|s| s.group.is_some());
    let attrs: BTreeSet<&str> = metas()
        .flat_map(|m| m.attributes.keys().map(String::as_str))
        .collect();

    let mut csv = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header = vec![SEQ_COL, EVENT_COL, LABEL_COL];
    if has_time {
        header.push(TIME_COL);
    }
    if has_duration {
        header.push(DURATION_COL);
    }
    if has_actor {
        header.push(ACTOR_COL);
    }
    if has_group {
        header.push(GROUP_COL);
    }
    header.extend(attrs.iter().copied());
    csv.write_record(&header)?;

    let opt = |v: Option<String>| v.unwrap_or_default();
    for seq in &db.sequences {
        for (k, (set, meta)) in seq.itemsets.iter().zip(&seq.meta).enumerate() {
            let mut row = vec![
                seq.id.clone(),
                (k + 1).to_string(),
                sorted_labels(&db.alphabet, set).join(","),
            ];
            if has_time {
                row.push(opt(meta.timestamp.map(|t| t.to_string())));
            }
            if has_duration {
                row.push(opt(meta.duration.map(|d| d.to_string())));
            }
            if has_actor {
                row.push(opt(meta.actor.clone()));
            }
            if has_group {
                row.push(opt(seq.group.clone()));
            }
            for a in &attrs {
                row.push(opt(meta.attributes.get(*a).map(|v| v.to_string())));
            }
            csv.write_record(&row)?;
        }
    }
    csv.flush()?;
    Ok(())
}

pub fn write_database<W: Write>(db: &SequenceDatabase, out: W, format: InputFormat) -> Result<()> {
    match format {
        InputFormat::Basket => write_basket(db, out, ';'),
        InputFormat::Table => write_event_table(db, out),
    }
}

pub const PATTERN_HEADER: &str = "pattern\tsupport_count\tf_support\ti_support_total";

/// Pattern table sorted by item count, then canonical string.
pub fn write_patterns<W: Write>(
    results: &[PatternStats],
    alphabet: &Alphabet,
    mut out: W,
) -> Result<()> {
    let mut rows = results
        .iter()
        .map(|r| {
            Ok((
                r.pattern.item_count(),
                canonical_render(&r.pattern, alphabet)?,
                r,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    writeln!(out, "{PATTERN_HEADER}")?;
    for (_, text, r) in rows {
        writeln!(
            out,
            "{}\t{}\t{:.6}\t{}",
            text, r.support_count, r.f_support, r.i_support_total
        )?;
    }
    out.flush()?;
    Ok(())
}

/// One row of a pattern table read back from text.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternRecord {
    pub pattern: Pattern,
    pub support_count: usize,
    pub f_support: f64,
    pub i_support_total: u64,
}

pub fn parse_patterns<R: Read>(reader: R, alphabet: &Alphabet) -> Result<Vec<PatternRecord>> {
    let mut out = Vec::new();
    for (n, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if n == 0 {
            if line != PATTERN_HEADER {
                return Err(Error::MissingColumn(PATTERN_HEADER.into()));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let malformed = |reason: &str| Error::MalformedLine {
            line: n + 1,
            reason: reason.to_owned(),
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(malformed("expected 4 tab-separated fields"));
        }
        out.push(PatternRecord {
            pattern: parse_pattern(fields[0], alphabet)?,
            support_count: fields[1].parse().map_err(|_| malformed("support_count"))?,
            f_support: fields[2].parse().map_err(|_| malformed("f_support"))?,
            i_support_total: fields[3]
                .parse()
                .map_err(|_| malformed("i_support_total"))?,
        });
    }
    Ok(out)
}

/// CSV with one row per sequence and one integer column per pattern.
/// `matrix[s][p]` is the count of pattern `p` in sequence `s`.
pub fn write_instance_matrix<W: Write>(
    db: &SequenceDatabase,
    patterns: &[Pattern],
    matrix: &[Vec<u32>],
    out: W,
) -> Result<()> {
    if matrix.len() != db.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} rows", db.len()),
            actual: format!("{} rows", matrix.len()),
        });
    }
    if let Some(row) = matrix.iter().find(|r| r.len() != patterns.len()) {
        return Err(Error::DimensionMismatch {
            expected: format!("{} columns", patterns.len()),
            actual: format!("{} columns", row.len()),
        });
    }
    let mut csv = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header = vec!["sequence_id".to_owned()];
    for p in patterns {
        header.push(canonical_render(p, &db.alphabet)?);
    }
    csv.write_record(&header)?;
    for (seq, row) in db.sequences.iter().zip(matrix) {
        let mut record = vec![seq.id.clone()];
        record.extend(row.iter().map(u32::to_string));
        csv.write_record(&record)?;
    }
    csv.flush()?;
    Ok(())
}
