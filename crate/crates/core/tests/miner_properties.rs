mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seqmine::{contains, mine, mine_bruteforce, Constraints, Error, MinSupport};

use common::{random_db, render_all};

fn limit() -> impl Strategy<Value = Option<usize>> {
    prop_oneof![Just(None), (1usize..=4).prop_map(Some)]
}

fn constraints() -> impl Strategy<Value = Constraints> {
    (
        0.1f64..=1.0,
        limit(),
        limit(),
        1usize..=2,
        prop_oneof![Just(None), (2usize..=4).prop_map(Some)],
    )
        .prop_map(|(s, g, w, min, max)| {
            let w = match (g, w) {
                (Some(g), Some(w)) => Some(w.max(g)),
                _ => w,
            };
            Constraints::default()
                .with_min_support(MinSupport::Fraction(s))
                .with_max_gap(g)
                .with_max_window(w)
                .with_min_items(min)
                .with_max_items(max)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn agrees_with_brute_force(seed in any::<u64>(), c in constraints()) {
        let db = random_db(&mut ChaCha8Rng::seed_from_u64(seed), 6, 8, 4);
        let fast = mine(&db, &c).unwrap();
        prop_assert_eq!(render_all(&db, &fast), render_all(&db, &mine_bruteforce(&db, &c).unwrap()));
        for r in &fast {
            let direct: Vec<String> = db.sequences.iter().filter(|s| contains(s, &r.pattern, &c)).map(|s| s.id.clone()).collect();
            prop_assert_eq!(&r.supporting_ids, &direct);
            prop_assert!(c.min_support.threshold(db.len()) <= r.support_count);
            let n = r.pattern.item_count();
            prop_assert!(n >= c.min_items && c.max_items.is_none_or(|m| n <= m));
        }
    }

    #[test]
    fn relaxing_never_removes(seed in any::<u64>(), c in constraints(), ds in 0.0f64..0.5, dg in 0usize..2) {
        let db = random_db(&mut ChaCha8Rng::seed_from_u64(seed), 6, 8, 4);
        let MinSupport::Fraction(s) = c.min_support else { unreachable!() };
        let looser = c
            .with_min_support(MinSupport::Fraction((s - ds).max(0.05)))
            .with_max_gap(c.max_gap.map(|g| g + dg))
            .with_max_window(c.max_window.map(|w| w + 2 * dg));
        let strict = render_all(&db, &mine(&db, &c).unwrap());
        let loose = render_all(&db, &mine(&db, &looser).unwrap());
        for (p, count) in &strict {
            let found = loose.iter().find(|(q, _)| q == p);
            prop_assert!(found.is_some_and(|(_, n)| n >= count), "{} lost", p);
        }
    }

    #[test]
    fn output_independent_of_thread_count(seed in any::<u64>(), c in constraints()) {
        let db = random_db(&mut ChaCha8Rng::seed_from_u64(seed), 8, 10, 5);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| mine(&db, &c).unwrap());
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| mine(&db, &c).unwrap());
        prop_assert_eq!(one, four);
    }
}

#[test]
fn rejects_bad_constraints_and_empty_input() {
    let db = seqmine::fixtures::learner_db();
    let bad = Constraints::default().with_min_support(MinSupport::Fraction(1.5));
    assert!(matches!(mine(&db, &bad), Err(Error::InvalidConstraints(_))));
    let bad = Constraints::default().with_max_gap(Some(0));
    assert!(matches!(mine(&db, &bad), Err(Error::InvalidConstraints(_))));
    let empty = seqmine::SequenceDatabase::new(seqmine::Alphabet::new(), vec![]).unwrap();
    assert!(matches!(
        mine(&empty, &Constraints::default()),
        Err(Error::EmptyDatabase)
    ));
}

#[test]
fn brute_force_refuses_large_inputs() {
    let mut b = seqmine::DatabaseBuilder::new();
    let labels: Vec<&str> =
        std::iter::repeat_n("x", seqmine::miner::BRUTE_FORCE_MAX_EVENTS + 1).collect();
    b.push_labels("big", &labels);
    let db = b.build().unwrap();
    assert!(matches!(
        mine_bruteforce(&db, &Constraints::default()),
        Err(Error::InstanceTooLarge(_))
    ));
}
