//! Data model and the containment/support semantics shared by every other
//! module.
//!
//! Positions inside a sequence are itemset positions. The gap between two
//! consecutive embedded itemsets is the difference of their positions, so a
//! maximum gap of 1 only admits adjacent itemsets. The window of an embedding
//! is the position of its last itemset minus the position of its first.
//! Timestamps never take part in containment.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Dense integer id of an event label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl ItemId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Interned mapping between labels and ids, assigned from 0 in first-seen order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    label_to_id: HashMap<String, ItemId>,
    id_to_label: Vec<String>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> ItemId {
        if let Some(&id) = self.label_to_id.get(label) {
            return id;
        }
        let id = ItemId(self.id_to_label.len() as u32);
        self.id_to_label.push(label.to_owned());
        self.label_to_id.insert(label.to_owned(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<ItemId> {
        self.label_to_id.get(label).copied()
    }

    pub fn label(&self, id: ItemId) -> Option<&str> {
        self.id_to_label.get(id.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.id_to_label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_label.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ItemId> + '_ {
        (0..self.id_to_label.len() as u32).map(ItemId)
    }

    pub fn labels(&self) -> &[String] {
        &self.id_to_label
    }
}

/// Non-empty set of items held in ascending id order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Itemset(Vec<ItemId>);

impl Itemset {
    /// Sorts and deduplicates; `None` when no ids are given.
    pub fn new(ids: impl IntoIterator<Item = ItemId>) -> Option<Self> {
        let mut items: Vec<ItemId> = ids.into_iter().collect();
        if items.is_empty() {
            return None;
        }
        items.sort_unstable();
        items.dedup();
        Some(Self(items))
    }

    pub fn single(id: ItemId) -> Self {
        Self(vec![id])
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_item(&self) -> ItemId {
        // non-empty by construction
        self.0[self.0.len() - 1]
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    /// `true` when every item of `other` is in `self`.
    pub fn is_superset_of(&self, other: &Itemset) -> bool {
        let mut mine = self.0.iter();
        'outer: for want in &other.0 {
            for have in mine.by_ref() {
                match have.cmp(want) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub(crate) fn with_item(&self, id: ItemId) -> Self {
        let mut items = self.0.clone();
        if let Err(at) = items.binary_search(&id) {
            items.insert(at, id);
        }
        Self(items)
    }
}

/// Per-event metadata carried alongside an itemset.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EventMeta {
    /// Epoch seconds.
    pub timestamp: Option<i64>,
    /// Seconds.
    pub duration: Option<f64>,
    pub actor: Option<String>,
    pub attributes: BTreeMap<String, f64>,
}

impl EventMeta {
    /// Numeric attribute by name; `duration` resolves to the duration field.
    pub fn attribute(&self, name: &str) -> Option<f64> {
        if name == "duration" {
            return self.duration.or_else(|| self.attributes.get(name).copied());
        }
        self.attributes.get(name).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamp.is_none()
            && self.duration.is_none()
            && self.actor.is_none()
            && self.attributes.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sequence {
    pub id: String,
    pub itemsets: Vec<Itemset>,
    /// Same length as `itemsets`.
    pub meta: Vec<EventMeta>,
    pub group: Option<String>,
}

impl Sequence {
    pub fn new(id: impl Into<String>, itemsets: Vec<Itemset>) -> Self {
        let meta = vec![EventMeta::default(); itemsets.len()];
        Self {
            id: id.into(),
            itemsets,
            meta,
            group: None,
        }
    }

    pub fn len(&self) -> usize {
        self.itemsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.itemsets.is_empty()
    }

    pub fn item_count(&self) -> usize {
        self.itemsets.iter().map(Itemset::len).sum()
    }

    /// Ascending positions (0-based) whose itemset holds every item of `set`.
    pub fn positions_of(&self, set: &Itemset) -> Vec<usize> {
        self.itemsets
            .iter()
            .enumerate()
            .filter(|(_, here)| here.is_superset_of(set))
            .map(|(k, _)| k)
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SequenceDatabase {
    pub alphabet: Alphabet,
    pub sequences: Vec<Sequence>,
}

impl SequenceDatabase {
    /// Validates item ids, sequence id uniqueness and timestamp order.
    pub fn new(alphabet: Alphabet, sequences: Vec<Sequence>) -> Result<Self> {
        let mut seen = HashSet::new();
        for seq in &sequences {
            if !seen.insert(seq.id.as_str()) {
                return Err(Error::DuplicateSequenceId(seq.id.clone()));
            }
            for set in &seq.itemsets {
                for &id in set.items() {
                    if id.index() >= alphabet.len() {
                        return Err(Error::UnknownItemId(id.0));
                    }
                }
            }
            if seq.meta.len() != seq.itemsets.len() {
                return Err(Error::DimensionMismatch {
                    expected: format!("{} metadata records", seq.itemsets.len()),
                    actual: seq.meta.len().to_string(),
                });
            }
            let stamps: Vec<i64> = seq.meta.iter().filter_map(|m| m.timestamp).collect();
            if stamps.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::NonMonotonicTimestamp(seq.id.clone()));
            }
        }
        Ok(Self {
            alphabet,
            sequences,
        })
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn event_count(&self) -> usize {
        self.sequences.iter().map(Sequence::len).sum()
    }

    /// Sub-database with the selected sequences, sharing the alphabet.
    pub fn subset(&self, mut keep: impl FnMut(&Sequence) -> bool) -> Self {
        Self {
            alphabet: self.alphabet.clone(),
            sequences: self.sequences.iter().filter(|s| keep(s)).cloned().collect(),
        }
    }

    /// Distinct group labels in sorted order.
    pub fn groups(&self) -> Vec<String> {
        let mut groups: Vec<String> = self
            .sequences
            .iter()
            .filter_map(|s| s.group.clone())
            .collect();
        groups.sort();
        groups.dedup();
        groups
    }
}

/// One event of a sequence under construction, given by label.
#[derive(Clone, Debug, Default)]
pub struct LabeledEvent {
    pub labels: Vec<String>,
    pub meta: EventMeta,
}

impl LabeledEvent {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Self {
            labels: labels.into_iter().map(Into::into).collect(),
            meta: EventMeta::default(),
        }
    }
}

/// Builds a database from labeled events, interning labels in first-seen order.
#[derive(Debug, Default)]
pub struct DatabaseBuilder {
    alphabet: Alphabet,
    sequences: Vec<Sequence>,
}

impl DatabaseBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts from an existing alphabet; new labels are appended.
    pub fn with_alphabet(alphabet: Alphabet) -> Self {
        Self {
            alphabet,
            sequences: Vec::new(),
        }
    }

    /// Events with no labels are skipped; sequences left empty are dropped.
    pub fn push(&mut self, id: &str, events: Vec<LabeledEvent>, group: Option<String>) {
        let mut itemsets = Vec::with_capacity(events.len());
        let mut meta = Vec::with_capacity(events.len());
        for event in events {
            let ids: Vec<ItemId> = event
                .labels
                .iter()
                .map(|l| self.alphabet.intern(l))
                .collect();
            if let Some(set) = Itemset::new(ids) {
                itemsets.push(set);
                meta.push(event.meta);
            }
        }
        if itemsets.is_empty() {
            return;
        }
        self.sequences.push(Sequence {
            id: id.to_owned(),
            itemsets,
            meta,
            group,
        });
    }

    /// Convenience for single-label events.
    pub fn push_labels(&mut self, id: &str, labels: &[&str]) {
        let events = labels.iter().map(|l| LabeledEvent::new([*l])).collect();
        self.push(id, events, None);
    }

    pub fn build(self) -> Result<SequenceDatabase> {
        SequenceDatabase::new(self.alphabet, self.sequences)
    }
}

/// Labeled view of an existing sequence, used by transforms that rebuild a database.
pub(crate) fn labeled_events(seq: &Sequence, alphabet: &Alphabet) -> Vec<LabeledEvent> {
    seq.itemsets
        .iter()
        .zip(&seq.meta)
        .map(|(set, meta)| LabeledEvent {
            labels: set
                .items()
                .iter()
                .map(|&id| alphabet.label(id).unwrap_or_default().to_owned())
                .collect(),
            meta: meta.clone(),
        })
        .collect()
}

/// Ordered list of itemsets searched for inside sequences.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pattern(Vec<Itemset>);

impl Pattern {
    pub fn new(itemsets: Vec<Itemset>) -> Self {
        Self(itemsets)
    }

    /// Internal sentinel; its support is defined as 1.
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn single(id: ItemId) -> Self {
        Self(vec![Itemset::single(id)])
    }

    /// Builds a pattern from labels, one inner slice per itemset.
    pub fn from_labels(alphabet: &Alphabet, itemsets: &[&[&str]]) -> Result<Self> {
        let mut out = Vec::with_capacity(itemsets.len());
        for labels in itemsets {
            let ids = labels
                .iter()
                .map(|l| {
                    alphabet
                        .id(l)
                        .ok_or_else(|| Error::UnknownLabel((*l).to_owned()))
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(Itemset::new(ids).ok_or_else(|| Error::PatternSyntax("{}".into()))?);
        }
        Ok(Self(out))
    }

    pub fn itemsets(&self) -> &[Itemset] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn item_count(&self) -> usize {
        self.0.iter().map(Itemset::len).sum()
    }

    pub fn sequence_extension(&self, id: ItemId) -> Self {
        let mut sets = self.0.clone();
        sets.push(Itemset::single(id));
        Self(sets)
    }

    /// Adds `id` to the last itemset.
    pub fn itemset_extension(&self, id: ItemId) -> Self {
        let mut sets = self.0.clone();
        if let Some(last) = sets.last_mut() {
            *last = last.with_item(id);
        } else {
            sets.push(Itemset::single(id));
        }
        Self(sets)
    }

    /// Structural sub-pattern relation: the itemsets of `self` embed as
    /// subsets of `other`'s itemsets at increasing indices. Gaps are ignored.
    pub fn is_subpattern_of(&self, other: &Pattern) -> bool {
        let mut rest = other.0.iter();
        self.0
            .iter()
            .all(|want| rest.by_ref().any(|have| have.is_superset_of(want)))
    }

    pub fn split_last(&self) -> Option<(Pattern, Pattern)> {
        let (last, init) = self.0.split_last()?;
        Some((Pattern(init.to_vec()), Pattern(vec![last.clone()])))
    }
}

/// Minimum support, either relative to the database size or absolute.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MinSupport {
    Fraction(f64),
    Count(usize),
}

impl MinSupport {
    /// Absolute threshold: `ceil(fraction * n)`, never below 1.
    pub fn threshold(self, n: usize) -> usize {
        match self {
            MinSupport::Count(c) => c.max(1),
            MinSupport::Fraction(f) => {
                // absorb representation error such as 0.3 * 10 = 3.0000000000000004
                let raw = f * n as f64;
                let t = (raw - 1e-9 * raw.max(1.0)).ceil();
                (t.max(1.0)) as usize
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constraints {
    pub min_support: MinSupport,
    /// `None` is unbounded.
    pub max_gap: Option<usize>,
    /// `None` is unbounded.
    pub max_window: Option<usize>,
    pub min_items: usize,
    pub max_items: Option<usize>,
}

impl Default for Constraints {
    fn default() -> Self {
        Self {
            min_support: MinSupport::Count(1),
            max_gap: None,
            max_window: None,
            min_items: 1,
            max_items: None,
        }
    }
}

impl Constraints {
    /// Constraints with only positional limits, for containment checks.
    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn with_min_support(mut self, s: MinSupport) -> Self {
        self.min_support = s;
        self
    }

    pub fn with_max_gap(mut self, g: Option<usize>) -> Self {
        self.max_gap = g;
        self
    }

    pub fn with_max_window(mut self, w: Option<usize>) -> Self {
        self.max_window = w;
        self
    }

    pub fn with_min_items(mut self, n: usize) -> Self {
        self.min_items = n;
        self
    }

    pub fn with_max_items(mut self, n: Option<usize>) -> Self {
        self.max_items = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConstraints(m));
        match self.min_support {
            MinSupport::Fraction(f) if !(f > 0.0 && f <= 1.0) => {
                return bad(format!("fractional min support {f} not in (0, 1]"))
            }
            MinSupport::Count(0) => return bad("absolute min support must be >= 1".into()),
            _ => {}
        }
        if self.max_gap == Some(0) {
            return bad("max gap must be >= 1".into());
        }
        if self.max_window == Some(0) {
            return bad("max window must be >= 1".into());
        }
        if let (Some(g), Some(w)) = (self.max_gap, self.max_window) {
            if w < g {
                return bad(format!("max window {w} smaller than max gap {g}"));
            }
        }
        if self.min_items == 0 {
            return bad("min items must be >= 1".into());
        }
        if let Some(max) = self.max_items {
            if max < self.min_items {
                return bad(format!(
                    "max items {max} smaller than min items {}",
                    self.min_items
                ));
            }
        }
        Ok(())
    }

    pub(crate) fn gap(&self) -> usize {
        self.max_gap.unwrap_or(usize::MAX)
    }

    pub(crate) fn window(&self) -> usize {
        self.max_window.unwrap_or(usize::MAX)
    }

    pub(crate) fn admits_items(&self, n: usize) -> bool {
        n >= self.min_items && self.max_items.is_none_or(|m| n <= m)
    }
}

/// `(end, start)` pairs: an end position of the pattern's last itemset and
/// the latest start position over all satisfying embeddings with that end.
/// Sorted by end.
pub type Occurrences = Vec<(usize, usize)>;

/// Occurrences of a single itemset at the given ascending positions.
pub(crate) fn seed_occurrences(positions: &[usize]) -> Occurrences {
    positions.iter().map(|&k| (k, k)).collect()
}

/// Extends `prev` by one itemset that may sit at any of `candidates`
/// (ascending). A candidate `e` is reachable from `(end, start)` when
/// `end < e <= end + gap` and `e - start <= window`. For each reachable
/// candidate the latest start is kept; it dominates earlier starts for every
/// later window check.
pub(crate) fn extend_occurrences(
    prev: &[(usize, usize)],
    candidates: &[usize],
    gap: usize,
    window: usize,
) -> Occurrences {
    let mut out = Vec::new();
    // indices into prev with strictly decreasing start
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for &e in candidates {
        while next < prev.len() && prev[next].0 < e {
            let s = prev[next].1;
            while deque.back().is_some_and(|&b| prev[b].1 <= s) {
                deque.pop_back();
            }
            deque.push_back(next);
            next += 1;
        }
        let lowest_end = e.saturating_sub(gap);
        while deque.front().is_some_and(|&f| prev[f].0 < lowest_end) {
            deque.pop_front();
        }
        if let Some(&f) = deque.front() {
            let start = prev[f].1;
            if e - start <= window {
                out.push((e, start));
            }
        }
    }
    out
}

/// All `(end, latest start)` pairs of constraint-satisfying embeddings.
pub fn occurrences(seq: &Sequence, pat: &Pattern, c: &Constraints) -> Occurrences {
    let mut sets = pat.itemsets().iter();
    let Some(first) = sets.next() else {
        return Vec::new();
    };
    let mut occ = seed_occurrences(&seq.positions_of(first));
    for set in sets {
        if occ.is_empty() {
            break;
        }
        occ = extend_occurrences(&occ, &seq.positions_of(set), c.gap(), c.window());
    }
    occ
}

/// `true` when `pat` embeds in `seq` under the gap and window limits of `c`.
/// The empty pattern is contained everywhere.
pub fn contains(seq: &Sequence, pat: &Pattern, c: &Constraints) -> bool {
    pat.is_empty() || !occurrences(seq, pat, c).is_empty()
}

/// Number and fraction of sequences containing `pat`.
pub fn support(db: &SequenceDatabase, pat: &Pattern, c: &Constraints) -> Result<(usize, f64)> {
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let count = db.sequences.iter().filter(|s| contains(s, pat, c)).count();
    Ok((count, count as f64 / db.len() as f64))
}

/// `{a,b} -> {c}`: items sorted by label inside each itemset.
pub fn canonical_render(pat: &Pattern, alphabet: &Alphabet) -> Result<String> {
    let mut out = String::new();
    for (j, set) in pat.itemsets().iter().enumerate() {
        if j > 0 {
            out.push_str(" -> ");
        }
        let mut labels = set
            .items()
            .iter()
            .map(|&id| alphabet.label(id).ok_or(Error::UnknownItemId(id.0)))
            .collect::<Result<Vec<_>>>()?;
        labels.sort_unstable();
        out.push('{');
        out.push_str(&labels.join(","));
        out.push('}');
    }
    Ok(out)
}

/// Inverse of [`canonical_render`].
pub fn parse_pattern(text: &str, alphabet: &Alphabet) -> Result<Pattern> {
    let syntax = || Error::PatternSyntax(text.to_owned());
    let mut sets = Vec::new();
    for part in text.split(" -> ") {
        let inner = part
            .trim()
            .strip_prefix('{')
            .and_then(|p| p.strip_suffix('}'))
            .ok_or_else(syntax)?;
        let ids = inner
            .split(',')
            .map(|l| {
                let l = l.trim();
                alphabet
                    .id(l)
                    .ok_or_else(|| Error::UnknownLabel(l.to_owned()))
            })
            .collect::<Result<Vec<_>>>()?;
        sets.push(Itemset::new(ids).ok_or_else(syntax)?);
    }
    Ok(Pattern::new(sets))
}

/// Support and instance statistics of one pattern over a database.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternStats {
    pub pattern: Pattern,
    /// In database order.
    pub supporting_ids: Vec<String>,
    pub support_count: usize,
    pub f_support: f64,
    /// Per-sequence instance counts in database order, when computed.
    pub i_support: Option<Vec<u32>>,
    pub i_support_total: u64,
}

impl PatternStats {
    /// Support of `pat` under `c`, with instance counts filled in.
    pub fn compute(db: &SequenceDatabase, pat: &Pattern, c: &Constraints) -> Result<Self> {
        if db.is_empty() {
            return Err(Error::EmptyDatabase);
        }
        let counts: Vec<u32> = db
            .sequences
            .iter()
            .map(|s| crate::occurrence::count_instances(s, pat, c))
            .collect();
        Ok(Self::from_instances(db, pat.clone(), counts))
    }

    pub(crate) fn from_instances(
        db: &SequenceDatabase,
        pattern: Pattern,
        counts: Vec<u32>,
    ) -> Self {
        let supporting_ids: Vec<String> = db
            .sequences
            .iter()
            .zip(&counts)
            .filter(|(_, &n)| n > 0)
            .map(|(s, _)| s.id.clone())
            .collect();
        let support_count = supporting_ids.len();
        Self {
            pattern,
            supporting_ids,
            support_count,
            f_support: support_count as f64 / db.len() as f64,
            i_support_total: counts.iter().map(|&n| u64::from(n)).sum(),
            i_support: Some(counts),
        }
    }
}

/// Sorts by item count, then canonical string.
pub fn sort_canonical(results: &mut [PatternStats], alphabet: &Alphabet) {
    results.sort_by_cached_key(|r| {
        (
            r.pattern.item_count(),
            canonical_render(&r.pattern, alphabet).unwrap_or_default(),
        )
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::itemset_db;

    fn pat(db: &SequenceDatabase, sets: &[&[&str]]) -> Pattern {
        Pattern::from_labels(&db.alphabet, sets).unwrap()
    }

    #[test]
    fn alphabet_is_dense_and_bijective() {
        let mut a = Alphabet::new();
        assert_eq!(a.intern("x"), ItemId(0));
        assert_eq!(a.intern("y"), ItemId(1));
        assert_eq!(a.intern("x"), ItemId(0));
        for id in a.ids() {
            assert_eq!(a.id(a.label(id).unwrap()), Some(id));
        }
    }

    #[test]
    fn itemset_is_canonical() {
        let s = Itemset::new([ItemId(3), ItemId(1), ItemId(3)]).unwrap();
        assert_eq!(s.items(), &[ItemId(1), ItemId(3)]);
        assert!(Itemset::new([]).is_none());
        assert!(s.is_superset_of(&Itemset::single(ItemId(3))));
        assert!(!s.is_superset_of(&Itemset::single(ItemId(2))));
    }

    #[test]
    fn containment_examples() {
        let db = itemset_db();
        let bc = pat(&db, &[&["b"], &["c"]]);
        let bd = pat(&db, &[&["b"], &["d"]]);
        let s1 = &db.sequences[0];
        assert!(contains(s1, &bc, &Constraints::unbounded()));
        assert!(!contains(
            s1,
            &bd,
            &Constraints::unbounded().with_max_gap(Some(1))
        ));
        assert!(contains(
            s1,
            &bd,
            &Constraints::unbounded().with_max_gap(Some(2))
        ));
        for s in &db.sequences {
            let own = Pattern::new(vec![s.itemsets[0].clone()]);
            assert!(contains(
                s,
                &own,
                &Constraints::unbounded().with_max_gap(Some(1))
            ));
        }
    }

    #[test]
    fn itemset_supports() {
        let db = itemset_db();
        let c = Constraints::unbounded();
        let f = |sets: &[&[&str]]| support(&db, &pat(&db, sets), &c).unwrap().1;
        assert_eq!(f(&[&["b"], &["c"]]), 0.5);
        assert_eq!(f(&[&["b"], &["d"]]), 0.75);
        assert_eq!(f(&[&["c"], &["d"]]), 0.5);
        assert_eq!(f(&[&["a"], &["c"]]), 0.25);
    }

    #[test]
    fn support_of_empty_database() {
        let db = SequenceDatabase::default();
        assert!(matches!(
            support(&db, &Pattern::empty(), &Constraints::unbounded()),
            Err(Error::EmptyDatabase)
        ));
    }

    #[test]
    fn window_limits_first_to_last() {
        let mut b = DatabaseBuilder::new();
        b.push_labels("s", &["a", "x", "b", "x", "c"]);
        let db = b.build().unwrap();
        let abc = pat(&db, &[&["a"], &["b"], &["c"]]);
        let s = &db.sequences[0];
        let c = Constraints::unbounded().with_max_gap(Some(2));
        assert!(contains(s, &abc, &c));
        assert!(contains(s, &abc, &c.with_max_window(Some(4))));
        assert!(!contains(s, &abc, &c.with_max_window(Some(3))));
    }

    #[test]
    fn latest_start_is_kept_for_window() {
        // a at 0 and 2, b at 3: the embedding starting at 2 satisfies window 1
        let mut b = DatabaseBuilder::new();
        b.push_labels("s", &["a", "x", "a", "b"]);
        let db = b.build().unwrap();
        let ab = pat(&db, &[&["a"], &["b"]]);
        let c = Constraints::unbounded().with_max_window(Some(1));
        assert_eq!(occurrences(&db.sequences[0], &ab, &c), vec![(3, 2)]);
    }

    #[test]
    fn render_examples() {
        let mut a = Alphabet::new();
        for l in ["read", "attempt", "note", "b", "a", "c"] {
            a.intern(l);
        }
        let p = Pattern::from_labels(&a, &[&["read"], &["attempt"]]).unwrap();
        assert_eq!(canonical_render(&p, &a).unwrap(), "{read} -> {attempt}");
        let p = Pattern::from_labels(&a, &[&["b", "a"], &["c"]]).unwrap();
        assert_eq!(canonical_render(&p, &a).unwrap(), "{a,b} -> {c}");
        let p = Pattern::from_labels(&a, &[&["attempt"], &["note"], &["attempt"]]).unwrap();
        let text = canonical_render(&p, &a).unwrap();
        assert_eq!(text, "{attempt} -> {note} -> {attempt}");
        assert_eq!(parse_pattern(&text, &a).unwrap(), p);
        assert!(matches!(
            canonical_render(&Pattern::single(ItemId(99)), &a),
            Err(Error::UnknownItemId(99))
        ));
    }

    #[test]
    fn threshold_uses_ceiling() {
        assert_eq!(MinSupport::Fraction(0.5).threshold(4), 2);
        assert_eq!(MinSupport::Fraction(0.6).threshold(4), 3);
        assert_eq!(MinSupport::Fraction(0.3).threshold(10), 3);
        assert_eq!(MinSupport::Fraction(0.01).threshold(4), 1);
        assert_eq!(MinSupport::Count(3).threshold(4), 3);
    }

    #[test]
    fn constraint_validation() {
        let ok = Constraints::default();
        assert!(ok.validate().is_ok());
        assert!(ok
            .with_min_support(MinSupport::Fraction(1.5))
            .validate()
            .is_err());
        assert!(ok
            .with_min_support(MinSupport::Fraction(0.0))
            .validate()
            .is_err());
        assert!(ok.with_max_gap(Some(0)).validate().is_err());
        assert!(ok
            .with_max_gap(Some(3))
            .with_max_window(Some(2))
            .validate()
            .is_err());
        assert!(ok
            .with_min_items(3)
            .with_max_items(Some(2))
            .validate()
            .is_err());
    }

    #[test]
    fn subpattern_relation_ignores_gaps() {
        let db = itemset_db();
        let big = pat(&db, &[&["a", "b"], &["c"], &["d"]]);
        assert!(pat(&db, &[&["a"], &["d"]]).is_subpattern_of(&big));
        assert!(pat(&db, &[&["b"], &["c"]]).is_subpattern_of(&big));
        assert!(!pat(&db, &[&["c"], &["b"]]).is_subpattern_of(&big));
        assert!(Pattern::empty().is_subpattern_of(&big));
    }
}
