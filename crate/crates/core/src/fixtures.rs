//! Small reference databases used in docs, tests and the CLI test corpus.

use crate::model::{DatabaseBuilder, LabeledEvent, SequenceDatabase};

/// Four customer transaction histories with multi-item itemsets.
pub fn itemset_db() -> SequenceDatabase {
    let mut b = DatabaseBuilder::new();
    let seqs: [(&str, &[&[&str]]); 4] = [
        ("1", &[&["a", "b"], &["c"], &["d"]]),
        ("2", &[&["a", "c"]]),
        ("3", &[&["b"], &["c", "d", "e"], &["f", "b"], &["c"]]),
        ("4", &[&["b", "c"], &["d"], &["g"]]),
    ];
    for (id, sets) in seqs {
        let events = sets
            .iter()
            .map(|s| LabeledEvent::new(s.iter().copied()))
            .collect();
        b.push(id, events, None);
    }
    b.build().expect("fixture is valid")
}

/// Four synthetic learner sequences, in basket format with global event ids.
pub const LEARNER_BASKET: &str = "\
1;1;read
1;2;hint
1;3;attempt
1;4;note
1;5;attempt
1;6;attempt
2;7;read
2;8;attempt
3;9;hint
3;10;read
3;11;attempt
3;12;note
3;13;attempt
4;14;hint
4;15;note
4;16;read
4;17;attempt
";

/// [`itemset_db`] as a basket file; commas join items of one itemset.
pub const ITEMSET_BASKET: &str = "\
1;1;a,b
1;2;c
1;3;d
2;1;a,c
3;1;b
3;2;c,d,e
3;3;f,b
3;4;c
4;1;b,c
4;2;d
4;3;g
";

pub fn learner_db() -> SequenceDatabase {
    crate::io::parse_basket(LEARNER_BASKET.as_bytes(), ';').expect("fixture is valid")
}
