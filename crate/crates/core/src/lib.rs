//! Constrained sequential pattern mining over categorical event sequences.
//!
//! Patterns are mined depth-first under support, gap, window and length
//! constraints ([`mine`]), counted as non-overlapping instances per sequence
//! ([`count_instances`]) and fed to group comparison ([`differential`]) and
//! temporal ranking ([`evolve`]). The statistics in [`stats`] are generic over
//! the float type; the root aliases fix it to `f64`.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod miner;
pub mod model;
pub mod occurrence;
pub mod preprocess;
pub mod stats;

pub use analysis::{
    differential, evolve, filter_closed, filter_generators, rule_metrics, Binning, DifferentialRow,
    Evolution, EvolutionRow, GroupSummary,
};
pub use error::{Error, Result};
pub use io::InputFormat;
pub use miner::{mine, mine_bruteforce, BruteForce};
pub use model::{
    canonical_render, contains, occurrences, parse_pattern, support, Alphabet, Constraints,
    DatabaseBuilder, EventMeta, ItemId, Itemset, LabeledEvent, MinSupport, Pattern, PatternStats,
    Sequence, SequenceDatabase,
};
pub use occurrence::{count_instances, count_instances_greedy, instance_matrix};
pub use preprocess::SegmentMode;
pub use stats::{Degeneracy, Df, EffectKind, TTestKind};

pub type TestResult = stats::TestResult<f64>;
pub type TestResultF32 = stats::TestResult<f32>;
pub type SumsOfSquares = stats::SumsOfSquares<f64>;
/// Exact decomposition for integer or rational matrices.
pub type RationalSumsOfSquares = stats::SumsOfSquares<num_rational::Rational64>;
