//! Event-log transforms. Each maps a database to a new database (or, for
//! equal-size binning, to one database per bin) and leaves the input as is.
//!
//! Transforms that rebuild labels keep the input alphabet and append new
//! labels, so ids of surviving labels do not move.

use std::collections::BTreeSet;

use chrono::DateTime;

use crate::error::{Error, Result};
use crate::model::{
    labeled_events, DatabaseBuilder, EventMeta, LabeledEvent, Sequence, SequenceDatabase,
};

pub const DEFAULT_MULT_SUFFIX: &str = "-MULT";

fn rebuild(
    db: &SequenceDatabase,
    mut f: impl FnMut(&Sequence, Vec<LabeledEvent>) -> Result<Vec<(String, Vec<LabeledEvent>)>>,
) -> Result<SequenceDatabase> {
    let mut builder = DatabaseBuilder::with_alphabet(db.alphabet.clone());
    for seq in &db.sequences {
        for (id, events) in f(seq, labeled_events(seq, &db.alphabet))? {
            builder.push(&id, events, seq.group.clone());
        }
    }
    builder.build()
}

fn single_label(seq: &Sequence, events: &[LabeledEvent]) -> Result<()> {
    if events.iter().any(|e| e.labels.len() != 1) {
        return Err(Error::MultiItemItemset(seq.id.clone()));
    }
    Ok(())
}

/// Metadata of a merged run: first timestamp, actor and attributes, summed
/// duration.
fn merge_meta(run: &[LabeledEvent]) -> EventMeta {
    let mut meta = run[0].meta.clone();
    let durations: Vec<f64> = run.iter().filter_map(|e| e.meta.duration).collect();
    meta.duration = (!durations.is_empty()).then(|| durations.iter().sum());
    meta
}

/// Removes every event label in `excluded`. Emptied positions and sequences disappear.
pub fn filter_events(
    db: &SequenceDatabase,
    excluded: &BTreeSet<String>,
) -> Result<SequenceDatabase> {
    rebuild(db, |seq, events| {
        let kept = events
            .into_iter()
            .map(|mut e| {
                e.labels.retain(|l| !excluded.contains(l));
                e
            })
            .filter(|e| !e.labels.is_empty())
            .collect();
        Ok(vec![(seq.id.clone(), kept)])
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Targets {
    All,
    Labels(BTreeSet<String>),
}

impl Targets {
    fn matches(&self, label: &str) -> bool {
        match self {
            Targets::All => true,
            Targets::Labels(set) => set.contains(label),
        }
    }
}

/// Replaces each maximal run of two or more identical target labels with one
/// event labeled `label + suffix`.
pub fn collapse_runs(
    db: &SequenceDatabase,
    targets: &Targets,
    suffix: &str,
) -> Result<SequenceDatabase> {
    rebuild(db, |seq, events| {
        single_label(seq, &events)?;
        let mut out = Vec::with_capacity(events.len());
        let mut i = 0;
        while i < events.len() {
            let label = &events[i].labels[0];
            let mut j = i + 1;
            while j < events.len() && &events[j].labels[0] == label {
                j += 1;
            }
            if j - i >= 2 && targets.matches(label) {
                out.push(LabeledEvent {
                    labels: vec![format!("{label}{suffix}")],
                    meta: merge_meta(&events[i..j]),
                });
            } else {
                out.extend_from_slice(&events[i..j]);
            }
            i = j;
        }
        Ok(vec![(seq.id.clone(), out)])
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContextRule {
    pub attribute: String,
    pub threshold: f64,
    pub low_suffix: String,
    pub high_suffix: String,
}

impl ContextRule {
    pub fn new(attribute: impl Into<String>, threshold: f64) -> Self {
        Self {
            attribute: attribute.into(),
            threshold,
            low_suffix: "-short".into(),
            high_suffix: "-long".into(),
        }
    }
}

/// Appends `high_suffix` when the attribute is strictly above the threshold,
/// `low_suffix` otherwise. Events lacking the attribute are left alone unless
/// `strict`, in which case they are an error.
pub fn contextualize(
    db: &SequenceDatabase,
    rule: &ContextRule,
    strict: bool,
) -> Result<SequenceDatabase> {
    if rule.low_suffix.is_empty()
        || rule.high_suffix.is_empty()
        || rule.low_suffix == rule.high_suffix
    {
        return Err(Error::InvalidRule {
            line: 0,
            reason: "context suffixes must be non-empty and distinct".into(),
        });
    }
    rebuild(db, |seq, events| {
        let mut out = Vec::with_capacity(events.len());
        for (k, mut e) in events.into_iter().enumerate() {
            match e.meta.attribute(&rule.attribute) {
                Some(v) => {
                    let suffix = if v > rule.threshold {
                        &rule.high_suffix
                    } else {
                        &rule.low_suffix
                    };
                    for l in &mut e.labels {
                        l.push_str(suffix);
                    }
                }
                None if strict => {
                    return Err(Error::MissingAttribute {
                        sequence_id: seq.id.clone(),
                        position: k + 1,
                        attribute: rule.attribute.clone(),
                    })
                }
                None => {}
            }
            out.push(e);
        }
        Ok(vec![(seq.id.clone(), out)])
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: Vec<String>,
    pub rhs: String,
}

/// Single left-to-right pass: at each position the longest matching rule
/// (earliest in `rules` on ties) replaces its contiguous run with `rhs`, and
/// scanning resumes after the run. Produced labels are not rescanned.
pub fn abstract_rewrite(db: &SequenceDatabase, rules: &[RewriteRule]) -> Result<SequenceDatabase> {
    if let Some(r) = rules.iter().find(|r| r.lhs.is_empty()) {
        return Err(Error::InvalidRule {
            line: 0,
            reason: format!("rule for {:?} has an empty left-hand side", r.rhs),
        });
    }
    rebuild(db, |seq, events| {
        single_label(seq, &events)?;
        let mut out = Vec::with_capacity(events.len());
        let mut i = 0;
        while i < events.len() {
            let mut best: Option<&RewriteRule> = None;
            for rule in rules {
                let n = rule.lhs.len();
                let fits = i + n <= events.len()
                    && rule
                        .lhs
                        .iter()
                        .zip(&events[i..i + n])
                        .all(|(l, e)| &e.labels[0] == l);
                if fits && best.is_none_or(|b| n > b.lhs.len()) {
                    best = Some(rule);
                }
            }
            match best {
                Some(rule) => {
                    let n = rule.lhs.len();
                    out.push(LabeledEvent {
                        labels: vec![rule.rhs.clone()],
                        meta: merge_meta(&events[i..i + n]),
                    });
                    i += n;
                }
                None => {
                    out.push(events[i].clone());
                    i += 1;
                }
            }
        }
        Ok(vec![(seq.id.clone(), out)])
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentMode {
    ByActor,
    /// Calendar days after shifting timestamps by `offset_seconds` (0 = UTC).
    ByDay {
        offset_seconds: i64,
    },
    /// Split where consecutive timestamps differ by more than `gap_seconds`.
    BySession {
        gap_seconds: i64,
    },
    EqualBins(usize),
}

/// Output of [`segment`].
#[derive(Clone, Debug, PartialEq)]
pub enum Segmented {
    Split(SequenceDatabase),
    Bins(Binned),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binned {
    /// `bins[k]` holds the k-th bin of every sequence that has one.
    pub bins: Vec<SequenceDatabase>,
    /// Sequences shorter than the bin count; their trailing bins are empty.
    pub short_sequences: Vec<String>,
}

/// Bin sizes for a length-`len` sequence: the first `len % n` bins get one
/// extra event.
pub fn bin_sizes(len: usize, n: usize) -> Vec<usize> {
    let (base, extra) = (len / n, len % n);
    (0..n).map(|k| base + usize::from(k < extra)).collect()
}

fn slice_sequence(seq: &Sequence, id: String, range: std::ops::Range<usize>) -> Sequence {
    Sequence {
        id,
        itemsets: seq.itemsets[range.clone()].to_vec(),
        meta: seq.meta[range].to_vec(),
        group: seq.group.clone(),
    }
}

/// Every sequence cut into `n` contiguous bins.
pub fn equal_bins(db: &SequenceDatabase, n: usize) -> Result<Binned> {
    if n == 0 {
        return Err(Error::InvalidConstraints("bin count must be >= 1".into()));
    }
    let mut bins: Vec<Vec<Sequence>> = vec![Vec::new(); n];
    let mut short_sequences = Vec::new();
    for seq in &db.sequences {
        if seq.len() < n {
            short_sequences.push(seq.id.clone());
        }
        for (k, part) in split_bins(seq, n).into_iter().enumerate() {
            if !part.is_empty() {
                bins[k].push(part);
            }
        }
    }
    let bins = bins
        .into_iter()
        .map(|seqs| SequenceDatabase::new(db.alphabet.clone(), seqs))
        .collect::<Result<Vec<_>>>()?;
    Ok(Binned {
        bins,
        short_sequences,
    })
}

/// The `n` bins of one sequence, possibly empty, ids unchanged.
pub fn split_bins(seq: &Sequence, n: usize) -> Vec<Sequence> {
    let mut start = 0;
    bin_sizes(seq.len(), n)
        .into_iter()
        .map(|size| {
            let part = slice_sequence(seq, seq.id.clone(), start..start + size);
            start += size;
            part
        })
        .collect()
}

fn timestamps(seq: &Sequence) -> Result<Vec<i64>> {
    seq.meta
        .iter()
        .map(|m| {
            m.timestamp
                .ok_or_else(|| Error::MissingTimestamp(seq.id.clone()))
        })
        .collect()
}

fn day_label(ts: i64, offset: i64) -> String {
    let days = (ts + offset).div_euclid(86_400);
    DateTime::from_timestamp(days * 86_400, 0)
        .map(|d| d.date_naive().format("%Y-%m-%d").to_string())
        .unwrap_or_else(|| days.to_string())
}

/// Splits one sequence by actor, day or session; ids get a `:suffix`.
/// Equal bins are handled by [`split_bins`].
pub fn split_sequence(seq: &Sequence, mode: SegmentMode) -> Result<Vec<Sequence>> {
    // (id suffix, positions)
    let cuts: Vec<(String, Vec<usize>)> = match mode {
        SegmentMode::ByActor => {
            let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
            for (k, m) in seq.meta.iter().enumerate() {
                let actor = m
                    .actor
                    .clone()
                    .ok_or_else(|| Error::MissingActor(seq.id.clone()))?;
                match groups.iter_mut().find(|(a, _)| *a == actor) {
                    Some((_, ks)) => ks.push(k),
                    None => groups.push((actor, vec![k])),
                }
            }
            groups
        }
        SegmentMode::ByDay { offset_seconds } => {
            let ts = timestamps(seq)?;
            let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
            for (k, &t) in ts.iter().enumerate() {
                let day = day_label(t, offset_seconds);
                match groups.last_mut() {
                    Some((d, ks)) if *d == day => ks.push(k),
                    _ => groups.push((day, vec![k])),
                }
            }
            groups
        }
        SegmentMode::BySession { gap_seconds } => {
            let ts = timestamps(seq)?;
            let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
            for (k, &t) in ts.iter().enumerate() {
                let new_session = k == 0 || t - ts[k - 1] > gap_seconds;
                if new_session {
                    groups.push(((groups.len() + 1).to_string(), vec![k]));
                } else if let Some((_, ks)) = groups.last_mut() {
                    ks.push(k);
                }
            }
            groups
        }
        SegmentMode::EqualBins(n) => {
            return Ok(split_bins(seq, n)
                .into_iter()
                .filter(|s| !s.is_empty())
                .collect())
        }
    };
    Ok(cuts
        .into_iter()
        .map(|(key, ks)| Sequence {
            id: format!("{}:{}", seq.id, key),
            itemsets: ks.iter().map(|&k| seq.itemsets[k].clone()).collect(),
            meta: ks.iter().map(|&k| seq.meta[k].clone()).collect(),
            group: seq.group.clone(),
        })
        .collect())
}

pub fn segment(db: &SequenceDatabase, mode: SegmentMode) -> Result<Segmented> {
    if let SegmentMode::EqualBins(n) = mode {
        return equal_bins(db, n).map(Segmented::Bins);
    }
    let mut out = Vec::new();
    for seq in &db.sequences {
        out.extend(split_sequence(seq, mode)?);
    }
    SequenceDatabase::new(db.alphabet.clone(), out).map(Segmented::Split)
}

fn rule_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// `lhs1|lhs2|... -> rhs` per line; blank lines and `#` comments skipped.
pub fn parse_rewrite_rules(text: &str) -> Result<Vec<RewriteRule>> {
    rule_lines(text)
        .map(|(line, l)| {
            let (lhs, rhs) = l.split_once("->").ok_or_else(|| Error::InvalidRule {
                line,
                reason: "expected `lhs -> rhs`".into(),
            })?;
            let lhs: Vec<String> = lhs.split('|').map(|s| s.trim().to_owned()).collect();
            let rhs = rhs.trim().to_owned();
            if lhs.iter().any(String::is_empty) || rhs.is_empty() {
                return Err(Error::InvalidRule {
                    line,
                    reason: "empty label".into(),
                });
            }
            Ok(RewriteRule { lhs, rhs })
        })
        .collect()
}

/// `attribute,threshold[,low_suffix,high_suffix]` per line.
pub fn parse_context_rules(text: &str) -> Result<Vec<ContextRule>> {
    rule_lines(text)
        .map(|(line, l)| {
            let f: Vec<&str> = l.split(',').map(str::trim).collect();
            let bad = |reason: &str| Error::InvalidRule {
                line,
                reason: reason.to_owned(),
            };
            if f.len() != 2 && f.len() != 4 {
                return Err(bad("expected attribute,threshold[,low_suffix,high_suffix]"));
            }
            let threshold: f64 = f[1].parse().map_err(|_| bad("threshold is not a number"))?;
            let mut rule = ContextRule::new(f[0], threshold);
            if f.len() == 4 {
                rule.low_suffix = f[2].to_owned();
                rule.high_suffix = f[3].to_owned();
            }
            if rule.attribute.is_empty()
                || rule.low_suffix.is_empty()
                || rule.high_suffix.is_empty()
                || rule.low_suffix == rule.high_suffix
            {
                return Err(bad(
                    "attribute and suffixes must be non-empty, suffixes distinct",
                ));
            }
            Ok(rule)
        })
        .collect()
}
