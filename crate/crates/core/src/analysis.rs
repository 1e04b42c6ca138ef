//! Group comparison, temporal evolution ranking, closed/generator filtering
//! and rule interestingness.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::miner::mine;
use crate::model::{
    canonical_render, support, Alphabet, Constraints, Pattern, PatternStats, Sequence,
    SequenceDatabase,
};
use crate::occurrence::count_instances;
use crate::preprocess::{split_bins, split_sequence, SegmentMode};
use crate::stats::{
    bh_adjust, chi_square_2x2, eta_squared_bins, repeated_anova, welch_t_test, Degeneracy, Df,
    EffectKind, TestResult,
};

/// Per-group summary of one pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSummary {
    pub label: String,
    pub size: usize,
    pub support_count: usize,
    pub f_support: f64,
    pub mean_instances: f64,
    pub sd_instances: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialRow {
    pub pattern: Pattern,
    /// Groups in label order.
    pub groups: [GroupSummary; 2],
    /// Containment by group.
    pub chi_square: TestResult<f64>,
    /// Instance counts of the first group against the second.
    pub t_test: TestResult<f64>,
    pub q_support: f64,
    pub q_instance: f64,
}

impl DifferentialRow {
    pub fn min_q(&self) -> f64 {
        self.q_support.min(self.q_instance)
    }
}

fn summarize(label: &str, counts: &[f64]) -> GroupSummary {
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let support_count = counts.iter().filter(|&&c| c > 0.0).count();
    GroupSummary {
        label: label.to_owned(),
        size: counts.len(),
        support_count,
        f_support: support_count as f64 / n,
        mean_instances: mean,
        sd_instances: var.sqrt(),
    }
}

fn untestable_table() -> TestResult<f64> {
    TestResult {
        statistic: 0.0,
        df: Df::One(1.0),
        p_value: 1.0,
        effect_size: f64::NAN,
        effect_kind: EffectKind::OddsRatio,
        flag: Some(Degeneracy::ZeroMarginal),
    }
}

fn sort_key(p: &Pattern, alphabet: &Alphabet) -> (usize, String) {
    (
        p.item_count(),
        canonical_render(p, alphabet).unwrap_or_default(),
    )
}

/// Mines each of the two groups, then tests every pattern frequent in either
/// group: chi-square on containment by group and a Welch t test on instance
/// counts (sequences without the pattern count 0). Both p-value families are
/// Benjamini–Hochberg adjusted. Rows are sorted by the smaller q-value.
pub fn differential(db: &SequenceDatabase, c: &Constraints) -> Result<Vec<DifferentialRow>> {
    c.validate()?;
    if let Some(s) = db.sequences.iter().find(|s| s.group.is_none()) {
        return Err(Error::MissingGroup(s.id.clone()));
    }
    let labels = db.groups();
    if labels.len() != 2 {
        return Err(Error::NotTwoGroups(labels.len()));
    }
    let member: Vec<usize> = db
        .sequences
        .iter()
        .map(|s| usize::from(s.group.as_deref() != Some(labels[0].as_str())))
        .collect();
    for (g, label) in labels.iter().enumerate() {
        let size = member.iter().filter(|&&m| m == g).count();
        if size < 2 {
            return Err(Error::GroupTooSmall {
                group: label.clone(),
                size,
            });
        }
    }

    let mut candidates = BTreeSet::new();
    for label in &labels {
        let sub = db.subset(|s| s.group.as_deref() == Some(label.as_str()));
        candidates.extend(mine(&sub, c)?.into_iter().map(|r| r.pattern));
    }
    let candidates: Vec<Pattern> = candidates.into_iter().collect();

    let mut rows = candidates
        .par_iter()
        .map(|pat| {
            let mut counts: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
            for (seq, &g) in db.sequences.iter().zip(&member) {
                counts[g].push(f64::from(count_instances(seq, pat, c)));
            }
            let present = |g: usize| counts[g].iter().filter(|&&v| v > 0.0).count() as u64;
            let table = [
                [present(0), counts[0].len() as u64 - present(0)],
                [present(1), counts[1].len() as u64 - present(1)],
            ];
            let chi = match chi_square_2x2(table) {
                Ok(r) => r,
                Err(Error::ZeroMarginal) => untestable_table(),
                Err(e) => return Err(e),
            };
            let t = welch_t_test(&counts[0], &counts[1])?;
            Ok(DifferentialRow {
                pattern: pat.clone(),
                groups: [
                    summarize(&labels[0], &counts[0]),
                    summarize(&labels[1], &counts[1]),
                ],
                chi_square: chi,
                t_test: t,
                q_support: 1.0,
                q_instance: 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let qs = bh_adjust(
        &rows
            .iter()
            .map(|r| r.chi_square.p_value)
            .collect::<Vec<_>>(),
    )?;
    let qi = bh_adjust(&rows.iter().map(|r| r.t_test.p_value).collect::<Vec<_>>())?;
    for (r, (s, i)) in rows.iter_mut().zip(qs.into_iter().zip(qi)) {
        r.q_support = s;
        r.q_instance = i;
    }
    rows.sort_by_cached_key(|r| (OrderedQ(r.min_q()), sort_key(&r.pattern, &db.alphabet)));
    Ok(rows)
}

/// Total order on q-values and metrics, which are never NaN.
#[derive(Clone, Copy)]
struct OrderedQ(f64);

impl PartialEq for OrderedQ {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for OrderedQ {}

impl PartialOrd for OrderedQ {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderedQ {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binning {
    /// Every sequence cut into this many equal-size bins.
    Equal(usize),
    /// Natural segments (session, day or actor). The bin count is the most
    /// common segment count; sequences with another count are excluded.
    Segments(SegmentMode),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionRow {
    pub pattern: Pattern,
    /// Mean instance count per bin over included sequences.
    pub bin_means: Vec<f64>,
    /// `SS_bins / SS_total` of the subjects x bins instance matrix.
    pub metric: f64,
    pub anova: TestResult<f64>,
    pub q_anova: f64,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evolution {
    pub rows: Vec<EvolutionRow>,
    pub n_bins: usize,
    /// Ids of sequences left out because they could not fill every bin.
    pub excluded: Vec<String>,
}

fn bins_of(
    db: &SequenceDatabase,
    binning: Binning,
) -> Result<(usize, Vec<Vec<Sequence>>, Vec<String>)> {
    let mut included = Vec::new();
    let mut excluded = Vec::new();
    match binning {
        Binning::Equal(n) => {
            if n < 2 {
                return Err(Error::TooFewBins(n));
            }
            for seq in &db.sequences {
                if seq.len() < n {
                    excluded.push(seq.id.clone());
                } else {
                    included.push(split_bins(seq, n));
                }
            }
            Ok((n, included, excluded))
        }
        Binning::Segments(mode) => {
            let parts = db
                .sequences
                .iter()
                .map(|s| split_sequence(s, mode))
                .collect::<Result<Vec<_>>>()?;
            let mut freq: HashMap<usize, usize> = HashMap::new();
            for p in &parts {
                *freq.entry(p.len()).or_default() += 1;
            }
            let n = freq
                .into_iter()
                .max_by_key(|&(len, count)| (count, len))
                .map_or(0, |(len, _)| len);
            if n < 2 {
                return Err(Error::TooFewBins(n));
            }
            for (seq, p) in db.sequences.iter().zip(parts) {
                if p.len() == n {
                    included.push(p);
                } else {
                    excluded.push(seq.id.clone());
                }
            }
            Ok((n, included, excluded))
        }
    }
}

/// Ranks every frequent pattern of `db` by how strongly its per-bin
/// instance counts vary across bins, with a repeated-measures ANOVA per
/// pattern.
pub fn evolve(db: &SequenceDatabase, binning: Binning, c: &Constraints) -> Result<Evolution> {
    c.validate()?;
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let (n_bins, subjects, excluded) = bins_of(db, binning)?;
    if subjects.is_empty() {
        return Err(Error::AllSequencesExcluded);
    }
    let candidates = mine(db, c)?;
    let mut rows = candidates
        .par_iter()
        .map(|stats| {
            let matrix: Vec<Vec<f64>> = subjects
                .iter()
                .map(|bins| {
                    bins.iter()
                        .map(|b| f64::from(count_instances(b, &stats.pattern, c)))
                        .collect()
                })
                .collect();
            let bin_means = (0..n_bins)
                .map(|k| matrix.iter().map(|r| r[k]).sum::<f64>() / matrix.len() as f64)
                .collect();
            Ok(EvolutionRow {
                pattern: stats.pattern.clone(),
                bin_means,
                metric: eta_squared_bins(&matrix)?,
                anova: repeated_anova(&matrix)?,
                q_anova: 1.0,
                rank: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let q = bh_adjust(&rows.iter().map(|r| r.anova.p_value).collect::<Vec<_>>())?;
    for (r, q) in rows.iter_mut().zip(q) {
        r.q_anova = q;
    }
    rows.sort_by_cached_key(|r| {
        let name = canonical_render(&r.pattern, &db.alphabet).unwrap_or_default();
        (std::cmp::Reverse(OrderedQ(r.metric)), name)
    });
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(Evolution {
        rows,
        n_bins,
        excluded,
    })
}

/// Keeps patterns with no strict super-pattern of equal support count in
/// `results`. Meaningful only for a complete frequent set.
pub fn filter_closed(results: &[PatternStats]) -> Vec<PatternStats> {
    results
        .iter()
        .filter(|p| {
            !results.iter().any(|q| {
                q.support_count == p.support_count
                    && q.pattern != p.pattern
                    && p.pattern.is_subpattern_of(&q.pattern)
            })
        })
        .cloned()
        .collect()
}

/// Keeps patterns with no strict sub-pattern of equal support count, the
/// empty pattern (support 1) included.
pub fn filter_generators(results: &[PatternStats]) -> Vec<PatternStats> {
    results
        .iter()
        .filter(|p| {
            let like_empty = p.f_support == 1.0;
            !like_empty
                && !results.iter().any(|q| {
                    q.support_count == p.support_count
                        && q.pattern != p.pattern
                        && q.pattern.is_subpattern_of(&p.pattern)
                })
        })
        .cloned()
        .collect()
}

/// Lift and Jaccard of the rule "all but the last itemset" => "last itemset".
pub fn rule_metrics(pat: &Pattern, db: &SequenceDatabase, c: &Constraints) -> Result<(f64, f64)> {
    let (antecedent, consequent) = match pat.split_last() {
        Some(parts) if pat.len() >= 2 => parts,
        _ => return Err(Error::PatternTooShort(pat.len())),
    };
    let (_, s) = support(db, pat, c)?;
    let (_, sx) = support(db, &antecedent, c)?;
    let (_, sy) = support(db, &consequent, c)?;
    if sx == 0.0 || sy == 0.0 || s == 0.0 {
        return Err(Error::ZeroComponentSupport);
    }
    Ok((s / (sx * sy), s / (sx + sy - s)))
}

fn df_text(df: Df<f64>) -> (String, String) {
    match df {
        Df::One(d) => (format!("{d:.6}"), String::new()),
        Df::Two(a, b) => (format!("{a:.0}"), format!("{b:.0}")),
    }
}

pub const DIFFERENTIAL_COLUMNS: [&str; 22] = [
    "pattern",
    "group_a",
    "n_a",
    "support_count_a",
    "f_support_a",
    "mean_instances_a",
    "sd_instances_a",
    "group_b",
    "n_b",
    "support_count_b",
    "f_support_b",
    "mean_instances_b",
    "sd_instances_b",
    "chi_square",
    "p_support",
    "odds_ratio",
    "t",
    "t_df",
    "p_instance",
    "cohens_d",
    "q_support",
    "q_instance",
];

pub fn write_differential<W: Write>(
    rows: &[DifferentialRow],
    alphabet: &Alphabet,
    mut out: W,
) -> Result<()> {
    writeln!(
        out,
        "# chi_square/p_support: Pearson test of containment by group; t/p_instance: Welch test of instance counts (a minus b); q_*: Benjamini-Hochberg"
    )?;
    writeln!(out, "{}", DIFFERENTIAL_COLUMNS.join("\t"))?;
    for r in rows {
        let mut f = vec![canonical_render(&r.pattern, alphabet)?];
        for g in &r.groups {
            f.push(g.label.clone());
            f.push(g.size.to_string());
            f.push(g.support_count.to_string());
            f.push(format!("{:.6}", g.f_support));
            f.push(format!("{:.6}", g.mean_instances));
            f.push(format!("{:.6}", g.sd_instances));
        }
        f.push(format!("{:.6}", r.chi_square.statistic));
        f.push(format!("{:.6e}", r.chi_square.p_value));
        f.push(format!("{:.6}", r.chi_square.effect_size));
        f.push(format!("{:.6}", r.t_test.statistic));
        f.push(df_text(r.t_test.df).0);
        f.push(format!("{:.6e}", r.t_test.p_value));
        f.push(format!("{:.6}", r.t_test.effect_size));
        f.push(format!("{:.6e}", r.q_support));
        f.push(format!("{:.6e}", r.q_instance));
        writeln!(out, "{}", f.join("\t"))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_evolution<W: Write>(
    evolution: &Evolution,
    alphabet: &Alphabet,
    mut out: W,
) -> Result<()> {
    writeln!(
        out,
        "# eta_squared: share of instance-count variance between bins; F/p: repeated-measures ANOVA over bins; q: Benjamini-Hochberg; excluded sequences: {}",
        evolution.excluded.len()
    )?;
    let mut header = vec![
        "rank".to_owned(),
        "pattern".to_owned(),
        "eta_squared".to_owned(),
    ];
    header.extend((1..=evolution.n_bins).map(|k| format!("bin{k}_mean")));
    header.extend(["f", "df_bins", "df_error", "p", "partial_eta_squared", "q"].map(String::from));
    writeln!(out, "{}", header.join("\t"))?;
    for r in &evolution.rows {
        let mut f = vec![
            r.rank.to_string(),
            canonical_render(&r.pattern, alphabet)?,
            format!("{:.6}", r.metric),
        ];
        f.extend(r.bin_means.iter().map(|m| format!("{m:.6}")));
        let (d1, d2) = df_text(r.anova.df);
        f.push(format!("{:.6}", r.anova.statistic));
        f.push(d1);
        f.push(d2);
        f.push(format!("{:.6e}", r.anova.p_value));
        f.push(format!("{:.6}", r.anova.effect_size));
        f.push(format!("{:.6e}", r.q_anova));
        writeln!(out, "{}", f.join("\t"))?;
    }
    out.flush()?;
    Ok(())
}
