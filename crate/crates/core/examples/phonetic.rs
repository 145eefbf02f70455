//! Phonetic codes and recovery of badly distorted words.
//!
//! cargo run --example phonetic -- пирикрасут

use l2gec::lexicon::FrequencyLexicon;
use l2gec::phonetic::{encode, PhoneticIndex};

fn main() {
    let word = std::env::args().nth(1).unwrap_or_else(|| "пирикрасут".into());
    let mut lexicon = FrequencyLexicon::new();
    for (w, n) in [("перекрасят", 5), ("перекрасит", 3), ("покрасят", 4), ("прекрасно", 9), ("красят", 2)] {
        lexicon.insert(w, n);
    }
    let index = PhoneticIndex::build(&lexicon, 1);

    match encode(&word) {
        Ok(code) => println!("{word} -> {}", code.as_str()),
        Err(e) => println!("{word}: {e}"),
    }
    for (w, _) in lexicon.entries() {
        println!("  {w:<12} {}", encode(w).map(|c| c.as_str().to_string()).unwrap_or_default());
    }
    for c in index.neighbors(&word, 1) {
        println!("neighbour {:<12} code distance {} edit distance {} count {}", c.word, c.code_distance, c.distance, c.count);
    }
    let best: Vec<String> = index.candidates(&word, 1).into_iter().map(|c| c.word).collect();
    println!("closest: {}", best.join(", "));
}
