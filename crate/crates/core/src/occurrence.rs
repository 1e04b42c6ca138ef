//! Instance counting: the maximum number of position-disjoint,
//! constraint-satisfying embeddings of a pattern in one sequence.
//!
//! Two instances may not share a position, even through different items of a
//! multi-item itemset. The count is an exact maximum. A greedy left-to-right
//! matcher supplies a lower bound and a counting argument an upper bound;
//! when they meet the greedy count is returned, otherwise an exact forward
//! search over the sets of open partial instances decides.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{contains, Constraints, Pattern, Sequence, SequenceDatabase};

/// Embedding in progress: `matched` elements placed, the latest at `last`,
/// the first at `start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Partial {
    matched: u32,
    last: u32,
    start: u32,
}

struct Problem {
    /// Element indices whose itemset fits at each position.
    eligible: Vec<Vec<usize>>,
    elements: usize,
    gap: usize,
    window: usize,
}

impl Problem {
    fn new(seq: &Sequence, pat: &Pattern, c: &Constraints) -> Self {
        let eligible = seq
            .itemsets
            .iter()
            .map(|here| {
                pat.itemsets()
                    .iter()
                    .enumerate()
                    .filter(|(_, want)| here.is_superset_of(want))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        Self {
            eligible,
            elements: pat.len(),
            gap: c.gap(),
            window: c.window(),
        }
    }

    fn alive(&self, p: &Partial, k: usize) -> bool {
        let last = p.last as usize;
        let start = p.start as usize;
        last.saturating_add(self.gap) >= k && start.saturating_add(self.window) >= k
    }

    /// Drops fields that no constraint reads, so equivalent partials compare equal.
    fn normalize(&self, mut p: Partial) -> Partial {
        if self.gap == usize::MAX {
            p.last = 0;
        }
        if self.window == usize::MAX {
            p.start = 0;
        }
        p
    }

    /// Pigeonhole bound: each instance needs one distinct position per element.
    fn upper_bound(&self) -> u32 {
        let mut per_element = vec![0usize; self.elements];
        let mut usable = 0usize;
        for elig in &self.eligible {
            if !elig.is_empty() {
                usable += 1;
            }
            for &j in elig {
                per_element[j] += 1;
            }
        }
        let by_total = usable / self.elements;
        let by_element = per_element.iter().copied().min().unwrap_or(0);
        by_total.min(by_element) as u32
    }

    /// Left-to-right matching that always advances the most complete open
    /// instance it can, else opens a new one. Every instance it closes is a
    /// valid embedding, so the result is a lower bound.
    fn greedy(&self) -> u32 {
        let mut open: Vec<Partial> = Vec::new();
        let mut done = 0;
        for (k, elig) in self.eligible.iter().enumerate() {
            open.retain(|p| self.alive(p, k));
            if elig.is_empty() {
                continue;
            }
            let best = open
                .iter()
                .enumerate()
                .filter(|(_, p)| {
                    elig.contains(&(p.matched as usize)) && k - p.start as usize <= self.window
                })
                .max_by_key(|(_, p)| {
                    let deadline = (p.last as usize).saturating_add(self.gap);
                    (p.matched, std::cmp::Reverse(deadline))
                })
                .map(|(i, _)| i);
            match best {
                Some(i) => {
                    let p = &mut open[i];
                    p.matched += 1;
                    p.last = k as u32;
                    if p.matched as usize == self.elements {
                        open.swap_remove(i);
                        done += 1;
                    }
                }
                None if elig.first() == Some(&0) => {
                    if self.elements == 1 {
                        done += 1;
                    } else {
                        open.push(Partial {
                            matched: 1,
                            last: k as u32,
                            start: k as u32,
                        });
                    }
                }
                None => {}
            }
        }
        done
    }

    /// Forward search over multisets of open partial instances. At each
    /// position the choices are: leave it unused, open a new instance, or
    /// advance one open instance. Leaving a position unused is dropped when a
    /// new instance could open there, since an extra open instance can always
    /// be ignored later.
    fn exact(&self) -> u32 {
        let mut states: HashMap<Vec<Partial>, u32> = HashMap::new();
        states.insert(Vec::new(), 0);
        for (k, elig) in self.eligible.iter().enumerate() {
            let mut next: HashMap<Vec<Partial>, u32> = HashMap::with_capacity(states.len());
            let mut offer = |state: Vec<Partial>, done: u32| {
                let slot = next.entry(state).or_insert(done);
                *slot = (*slot).max(done);
            };
            for (state, done) in states {
                let open: Vec<Partial> = state.into_iter().filter(|p| self.alive(p, k)).collect();
                let opens_here = elig.first() == Some(&0);
                if !opens_here {
                    offer(open.clone(), done);
                }
                for &j in elig {
                    if j == 0 {
                        if self.elements == 1 {
                            offer(open.clone(), done + 1);
                        } else {
                            let mut s = open.clone();
                            s.push(self.normalize(Partial {
                                matched: 1,
                                last: k as u32,
                                start: k as u32,
                            }));
                            s.sort_unstable();
                            offer(s, done);
                        }
                        continue;
                    }
                    let mut previous: Option<Partial> = None;
                    for (i, p) in open.iter().enumerate() {
                        if p.matched as usize != j
                            || previous == Some(*p)
                            || k - p.start as usize > self.window
                        {
                            continue;
                        }
                        previous = Some(*p);
                        let mut s = open.clone();
                        if j + 1 == self.elements {
                            s.remove(i);
                            offer(s, done + 1);
                        } else {
                            s[i] = self.normalize(Partial {
                                matched: p.matched + 1,
                                last: k as u32,
                                start: p.start,
                            });
                            s.sort_unstable();
                            offer(s, done);
                        }
                    }
                }
            }
            states = next;
        }
        states.into_values().max().unwrap_or(0)
    }
}

/// Maximum number of pairwise position-disjoint embeddings of `pat` in `seq`
/// that satisfy the gap and window limits of `c`.
pub fn count_instances(seq: &Sequence, pat: &Pattern, c: &Constraints) -> u32 {
    if pat.is_empty() || !contains(seq, pat, c) {
        return 0;
    }
    let problem = Problem::new(seq, pat, c);
    let lower = problem.greedy();
    if lower == problem.upper_bound() {
        return lower;
    }
    problem.exact()
}

/// The greedy matcher alone; a lower bound on [`count_instances`].
pub fn count_instances_greedy(seq: &Sequence, pat: &Pattern, c: &Constraints) -> u32 {
    if pat.is_empty() {
        return 0;
    }
    Problem::new(seq, pat, c).greedy()
}

/// Rows follow the database's sequences, columns follow `patterns`.
pub fn instance_matrix(
    db: &SequenceDatabase,
    patterns: &[Pattern],
    c: &Constraints,
) -> Result<Vec<Vec<u32>>> {
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    Ok(db
        .sequences
        .par_iter()
        .map(|s| patterns.iter().map(|p| count_instances(s, p, c)).collect())
        .collect())
}
