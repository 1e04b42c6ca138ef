//! Frequent pattern enumeration under support, gap, window and length limits.
//!
//! The search grows patterns depth first from single items with two kinds of
//! extension: a sequence extension appends a new one-item itemset and an
//! itemset extension adds an item larger than every item of the last itemset.
//! Each node carries, per supporting sequence, the end positions of the
//! pattern's last itemset together with the latest usable start (see
//! [`crate::model::Occurrences`]).
//!
//! Under a maximum gap, a pattern can be frequent while one of its
//! non-contiguous sub-patterns is not, so general sub-pattern pruning is
//! unsound. The only pruning here is on the extension's own support: every
//! embedding of an extension restricts to an embedding of its prefix with the
//! same gaps and no wider window, so an infrequent node has no frequent
//! descendant.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    extend_occurrences, seed_occurrences, sort_canonical, Constraints, ItemId, Itemset,
    Occurrences, Pattern, PatternStats, Sequence, SequenceDatabase,
};
use crate::occurrence::count_instances;

struct Index {
    /// Per sequence: ascending positions of every item it holds.
    positions: Vec<HashMap<ItemId, Vec<usize>>>,
}

impl Index {
    fn new(db: &SequenceDatabase) -> Self {
        let positions = db
            .sequences
            .iter()
            .map(|s| {
                let mut map: HashMap<ItemId, Vec<usize>> = HashMap::new();
                for (k, set) in s.itemsets.iter().enumerate() {
                    for &id in set.items() {
                        map.entry(id).or_default().push(k);
                    }
                }
                map
            })
            .collect();
        Self { positions }
    }

    fn of(&self, seq: usize, id: ItemId) -> &[usize] {
        self.positions[seq].get(&id).map_or(&[], Vec::as_slice)
    }
}

struct Search<'a> {
    db: &'a SequenceDatabase,
    index: Index,
    c: Constraints,
    threshold: usize,
    items: Vec<ItemId>,
}

type Projection = Vec<(usize, Occurrences)>;

impl Search<'_> {
    fn seed(&self, id: ItemId) -> Projection {
        (0..self.db.len())
            .filter_map(|s| {
                let pos = self.index.of(s, id);
                (!pos.is_empty()).then(|| (s, seed_occurrences(pos)))
            })
            .collect()
    }

    fn sequence_extension(&self, proj: &Projection, id: ItemId) -> Projection {
        proj.iter()
            .filter_map(|(s, occ)| {
                let next =
                    extend_occurrences(occ, self.index.of(*s, id), self.c.gap(), self.c.window());
                (!next.is_empty()).then_some((*s, next))
            })
            .collect()
    }

    fn itemset_extension(&self, proj: &Projection, id: ItemId) -> Projection {
        proj.iter()
            .filter_map(|(s, occ)| {
                let seq: &Sequence = &self.db.sequences[*s];
                let next: Occurrences = occ
                    .iter()
                    .copied()
                    .filter(|&(end, _)| seq.itemsets[end].contains(id))
                    .collect();
                (!next.is_empty()).then_some((*s, next))
            })
            .collect()
    }

    fn emit(&self, pattern: &Pattern, proj: &Projection) -> PatternStats {
        let mut counts = vec![0u32; self.db.len()];
        for (s, _) in proj {
            counts[*s] = count_instances(&self.db.sequences[*s], pattern, &self.c);
        }
        PatternStats::from_instances(self.db, pattern.clone(), counts)
    }

    fn grow(&self, pattern: Pattern, proj: Projection, out: &mut Vec<PatternStats>) {
        let size = pattern.item_count();
        if self.c.admits_items(size) {
            out.push(self.emit(&pattern, &proj));
        }
        if self.c.max_items.is_some_and(|m| size >= m) {
            return;
        }
        let last_max = pattern.itemsets().last().map(|s| s.max_item());
        for &id in &self.items {
            if last_max.is_some_and(|m| id > m) {
                let next = self.itemset_extension(&proj, id);
                if next.len() >= self.threshold {
                    self.grow(pattern.itemset_extension(id), next, out);
                }
            }
            let next = self.sequence_extension(&proj, id);
            if next.len() >= self.threshold {
                self.grow(pattern.sequence_extension(id), next, out);
            }
        }
    }
}

fn check_inputs(db: &SequenceDatabase, c: &Constraints) -> Result<()> {
    c.validate()?;
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    Ok(())
}

/// Every pattern whose item count lies in `[min_items, max_items]` and whose
/// support count under `c` reaches the threshold, with instance counts.
/// Sorted by item count, then canonical string.
pub fn mine(db: &SequenceDatabase, c: &Constraints) -> Result<Vec<PatternStats>> {
    check_inputs(db, c)?;
    let index = Index::new(db);
    let threshold = c.min_support.threshold(db.len());
    let mut search = Search {
        db,
        index,
        c: *c,
        threshold,
        items: Vec::new(),
    };
    search.items = db
        .alphabet
        .ids()
        .filter(|&id| {
            (0..db.len())
                .filter(|&s| !search.index.of(s, id).is_empty())
                .count()
                >= threshold
        })
        .collect();

    let search = &search;
    let mut results: Vec<PatternStats> = search
        .items
        .par_iter()
        .flat_map_iter(|&id| {
            let mut out = Vec::new();
            search.grow(Pattern::single(id), search.seed(id), &mut out);
            out
        })
        .collect();
    sort_canonical(&mut results, &db.alphabet);
    Ok(results)
}

pub const BRUTE_FORCE_MAX_EVENTS: usize = 128;
pub const BRUTE_FORCE_MAX_ALPHABET: usize = 8;
/// Per-sequence bound on the number of position/item-subset choices.
pub const BRUTE_FORCE_MAX_SUBPATTERNS: u64 = 1 << 20;

/// `true` when positions `k_1 < ... < k_m` exist with every embedding
/// condition met, found by trying every position tuple.
fn embeds_exhaustive(seq: &Sequence, pat: &Pattern, c: &Constraints) -> bool {
    fn go(
        seq: &Sequence,
        sets: &[Itemset],
        from: usize,
        prev: Option<usize>,
        first: usize,
        c: &Constraints,
    ) -> bool {
        let Some((want, rest)) = sets.split_first() else {
            return true;
        };
        for k in from..seq.len() {
            if let Some(p) = prev {
                if k - p > c.gap() || k - first > c.window() {
                    break;
                }
            }
            if seq.itemsets[k].is_superset_of(want) {
                let first = if prev.is_none() { k } else { first };
                if go(seq, rest, k + 1, Some(k), first, c) {
                    return true;
                }
            }
        }
        false
    }
    go(seq, pat.itemsets(), 0, None, 0, c)
}

/// Exhaustive reference miner for small inputs.
///
/// The candidate universe is every pattern contained, without positional
/// limits, in at least one sequence: each choice of positions together with
/// a non-empty item subset at every chosen position. Supports are then
/// checked one candidate at a time by exhaustive embedding search.
pub struct BruteForce<'a> {
    db: &'a SequenceDatabase,
    /// `levels[k]` holds the contained patterns with `k + 1` items.
    levels: Vec<BTreeSet<Pattern>>,
}

impl<'a> BruteForce<'a> {
    pub fn new(db: &'a SequenceDatabase) -> Result<Self> {
        if db.is_empty() {
            return Err(Error::EmptyDatabase);
        }
        if db.event_count() > BRUTE_FORCE_MAX_EVENTS {
            return Err(Error::InstanceTooLarge(format!(
                "{} events (limit {BRUTE_FORCE_MAX_EVENTS})",
                db.event_count()
            )));
        }
        if db.alphabet.len() > BRUTE_FORCE_MAX_ALPHABET {
            return Err(Error::InstanceTooLarge(format!(
                "{} labels (limit {BRUTE_FORCE_MAX_ALPHABET})",
                db.alphabet.len()
            )));
        }
        let mut universe = BTreeSet::new();
        for seq in &db.sequences {
            let choices = seq
                .itemsets
                .iter()
                .map(|s| 1u64.checked_shl(s.len() as u32).unwrap_or(u64::MAX))
                .try_fold(1u64, |acc, n| {
                    acc.checked_mul(n)
                        .filter(|&v| v <= BRUTE_FORCE_MAX_SUBPATTERNS)
                });
            if choices.is_none() {
                return Err(Error::InstanceTooLarge(format!(
                    "sequence {:?} has more than {BRUTE_FORCE_MAX_SUBPATTERNS} sub-patterns",
                    seq.id
                )));
            }
            sub_patterns(seq, 0, &mut Vec::new(), &mut universe);
        }
        let mut levels: Vec<BTreeSet<Pattern>> = Vec::new();
        for p in universe {
            let k = p.item_count() - 1;
            if levels.len() <= k {
                levels.resize_with(k + 1, BTreeSet::new);
            }
            levels[k].insert(p);
        }
        Ok(Self { db, levels })
    }

    pub fn mine(&self, c: &Constraints) -> Result<Vec<PatternStats>> {
        check_inputs(self.db, c)?;
        let threshold = c.min_support.threshold(self.db.len());
        let mut results = Vec::new();
        for (k, level) in self.levels.iter().enumerate() {
            if !c.admits_items(k + 1) {
                continue;
            }
            for p in level {
                let supported = self
                    .db
                    .sequences
                    .iter()
                    .filter(|s| embeds_exhaustive(s, p, c))
                    .count();
                if supported >= threshold {
                    results.push(PatternStats::compute(self.db, p, c)?);
                }
            }
        }
        sort_canonical(&mut results, &self.db.alphabet);
        Ok(results)
    }
}

/// Adds to `out` every pattern drawn from positions `from..` of `seq`
/// after the fixed prefix `cur`.
fn sub_patterns(seq: &Sequence, from: usize, cur: &mut Vec<Itemset>, out: &mut BTreeSet<Pattern>) {
    for k in from..seq.len() {
        let items = seq.itemsets[k].items();
        for mask in 1u32..(1 << items.len()) {
            let chosen = (0..items.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| items[i]);
            cur.push(Itemset::new(chosen).expect("non-empty subset"));
            out.insert(Pattern::new(cur.clone()));
            sub_patterns(seq, k + 1, cur, out);
            cur.pop();
        }
    }
}

/// Same contract as [`mine`], by exhaustive enumeration.
pub fn mine_bruteforce(db: &SequenceDatabase, c: &Constraints) -> Result<Vec<PatternStats>> {
    BruteForce::new(db)?.mine(c)
}
