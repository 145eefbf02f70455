//! Dictionary lookup within an edit distance, using a deletion index.
//!
//! cargo run --example spelling -- домме

use l2gec::lexicon::{osa_distance, DeletionIndex, FrequencyLexicon};
use l2gec::text::tokenize;

fn main() {
    let query = std::env::args().nth(1).unwrap_or_else(|| "домме".into());
    let corpus = "Я живу в доме. Дома никого нет. Мы видели дом и домик. Он пришёл домой.";
    let sents: Vec<_> = l2gec::text::split_sentences(corpus).into_iter().map(tokenize).collect();
    let lexicon = FrequencyLexicon::from_sentences(&sents);
    let index = DeletionIndex::from_lexicon(&lexicon, 2);
    println!("{} words, {} index keys", index.num_terms(), index.num_variants());

    for d in 0..=2 {
        let hits: Vec<String> =
            index.lookup(&query, d).iter().map(|s| format!("{} (d={}, n={})", s.term, s.distance, s.count)).collect();
        println!("d <= {d}: {}", hits.join(", "));
    }
    // transpositions count as one edit
    println!("osa(дмоа, дома) = {}", osa_distance("дмоа", "дома"));
}
