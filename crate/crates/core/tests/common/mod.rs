//! Shared generators and exhaustive oracles for the integration tests.
//!
//! The oracles only read public fields and enumerate position tuples
//! directly, so they share no code with the library's matching routines.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;
use seqmine::{
    Constraints, DatabaseBuilder, ItemId, Itemset, LabeledEvent, Pattern, Sequence,
    SequenceDatabase,
};

pub const LABELS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

/// Random database with at most `max_seqs` sequences of at most `max_len`
/// itemsets over the first `alphabet` labels. Roughly one itemset in five
/// holds two items.
pub fn random_db<R: Rng>(
    rng: &mut R,
    max_seqs: usize,
    max_len: usize,
    alphabet: usize,
) -> SequenceDatabase {
    let mut b = DatabaseBuilder::new();
    let n = rng.gen_range(1..=max_seqs);
    for s in 0..n {
        let len = rng.gen_range(1..=max_len);
        let events = (0..len)
            .map(|_| {
                let first = LABELS[rng.gen_range(0..alphabet)];
                if rng.gen_bool(0.2) {
                    LabeledEvent::new([first, LABELS[rng.gen_range(0..alphabet)]])
                } else {
                    LabeledEvent::new([first])
                }
            })
            .collect();
        b.push(&s.to_string(), events, None);
    }
    b.build().unwrap()
}

/// Random single-item sequence over item ids `0..alphabet`.
pub fn random_sequence<R: Rng>(rng: &mut R, max_len: usize, alphabet: u32) -> Sequence {
    let len = rng.gen_range(1..=max_len);
    let sets = (0..len)
        .map(|_| Itemset::single(ItemId(rng.gen_range(0..alphabet))))
        .collect();
    Sequence::new("s", sets)
}

/// Random pattern of 1..=`max_items` items, occasionally with a two-item itemset.
pub fn random_pattern<R: Rng>(rng: &mut R, max_items: usize, alphabet: u32) -> Pattern {
    let target = rng.gen_range(1..=max_items);
    let mut sets: Vec<Vec<ItemId>> = Vec::new();
    let mut items = 0;
    while items < target {
        let id = ItemId(rng.gen_range(0..alphabet));
        match sets.last_mut() {
            Some(last) if rng.gen_bool(0.2) && !last.contains(&id) => last.push(id),
            _ => sets.push(vec![id]),
        }
        items += 1;
    }
    Pattern::new(sets.into_iter().map(|s| Itemset::new(s).unwrap()).collect())
}

pub fn random_constraints<R: Rng>(rng: &mut R) -> Constraints {
    let gap = [Some(1), Some(2), Some(3), None][rng.gen_range(0..4)];
    let window = [Some(2), Some(4), Some(6), None][rng.gen_range(0..4)];
    let window = match (gap, window) {
        (Some(g), Some(w)) if w < g => Some(g),
        _ => window,
    };
    Constraints::unbounded()
        .with_max_gap(gap)
        .with_max_window(window)
}

fn superset(have: &Itemset, want: &Itemset) -> bool {
    want.items().iter().all(|i| have.items().contains(i))
}

/// Every constraint-satisfying embedding as a position tuple.
pub fn embeddings(seq: &Sequence, pat: &Pattern, c: &Constraints) -> Vec<Vec<usize>> {
    fn go(
        seq: &Sequence,
        pat: &Pattern,
        c: &Constraints,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let j = cur.len();
        if j == pat.len() {
            out.push(cur.clone());
            return;
        }
        let from = cur.last().map_or(0, |&p| p + 1);
        for k in from..seq.len() {
            if let Some(&prev) = cur.last() {
                if c.max_gap.is_some_and(|g| k - prev > g)
                    || c.max_window.is_some_and(|w| k - cur[0] > w)
                {
                    continue;
                }
            }
            if superset(&seq.itemsets[k], &pat.itemsets()[j]) {
                cur.push(k);
                go(seq, pat, c, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if !pat.is_empty() {
        go(seq, pat, c, &mut Vec::new(), &mut out);
    }
    out
}

pub fn contains_exhaustive(seq: &Sequence, pat: &Pattern, c: &Constraints) -> bool {
    !embeddings(seq, pat, c).is_empty()
}

/// Largest set of embeddings with pairwise disjoint positions.
pub fn max_disjoint(seq: &Sequence, pat: &Pattern, c: &Constraints) -> u32 {
    let masks: Vec<u64> = embeddings(seq, pat, c)
        .iter()
        .map(|e| e.iter().fold(0u64, |m, &p| m | 1 << p))
        .collect();
    // by lowest position: each embedding is picked or skipped in that order
    let mut memo = HashMap::new();
    fn best(i: usize, used: u64, masks: &[u64], memo: &mut HashMap<(usize, u64), u32>) -> u32 {
        if i == masks.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, used)) {
            return v;
        }
        let mut v = best(i + 1, used, masks, memo);
        if masks[i] & used == 0 {
            v = v.max(1 + best(i + 1, used | masks[i], masks, memo));
        }
        memo.insert((i, used), v);
        v
    }
    best(0, 0, &masks, &mut memo)
}

pub fn render_all(db: &SequenceDatabase, rows: &[seqmine::PatternStats]) -> Vec<(String, usize)> {
    rows.iter()
        .map(|r| {
            (
                seqmine::canonical_render(&r.pattern, &db.alphabet).unwrap(),
                r.support_count,
            )
        })
        .collect()
}

pub fn db_from(seqs: &[(&str, Option<&str>, &[&str])]) -> SequenceDatabase {
    let mut b = DatabaseBuilder::new();
    for (id, group, labels) in seqs {
        let events = labels.iter().map(|l| LabeledEvent::new([*l])).collect();
        b.push(id, events, group.map(str::to_owned));
    }
    b.build().unwrap()
}

/// Group A: 20 sequences holding quiz -> read exactly twice, with varied
/// tails. Group B: 20 sequences where read never follows quiz.
pub fn planted_differential() -> SequenceDatabase {
    let tails: [&[&str]; 4] = [
        &["hint"],
        &["note", "hint"],
        &["attempt"],
        &["note", "attempt", "hint"],
    ];
    let mut b = DatabaseBuilder::new();
    for i in 0..20 {
        let mut labels = vec!["quiz", "read", "hint", "quiz", "read"];
        labels.extend_from_slice(tails[i % 4]);
        let events = labels.iter().map(|l| LabeledEvent::new([*l])).collect();
        b.push(&format!("a{i:02}"), events, Some("A".into()));
    }
    for i in 0..20 {
        let mut labels = vec!["read", "hint", "quiz"];
        labels.extend_from_slice(tails[(i + 1) % 4]);
        labels.push("quiz");
        let events = labels.iter().map(|l| LabeledEvent::new([*l])).collect();
        b.push(&format!("b{i:02}"), events, Some("B".into()));
    }
    b.build().unwrap()
}

/// 20 ten-event sequences whose last two events are quiz, submit; the first
/// eight are drawn from fillers that never include either.
pub fn planted_evolution<R: Rng>(rng: &mut R) -> SequenceDatabase {
    let fillers = ["read", "hint", "note", "attempt"];
    let mut b = DatabaseBuilder::new();
    for i in 0..20 {
        let mut labels: Vec<&str> = (0..8)
            .map(|_| fillers[rng.gen_range(0..fillers.len())])
            .collect();
        labels.extend(["quiz", "submit"]);
        b.push_labels(&format!("s{i:02}"), &labels);
    }
    b.build().unwrap()
}
