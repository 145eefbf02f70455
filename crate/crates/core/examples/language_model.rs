//! Train a trigram model on a small corpus, score sentences, and round-trip
//! it through the ARPA format.
//!
//! cargo run --example language_model

use l2gec::lm::{NGramCounts, NGramModel, DEFAULT_UNK_LOGPROB};
use l2gec::text::tokenize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = [
        "Я живу в доме.",
        "Я живу в городе.",
        "Он живёт в доме.",
        "Мы были на рынке.",
        "Я был на рынке.",
        "Она была в парке.",
    ];
    let sents: Vec<_> = corpus.iter().map(|s| tokenize(s)).collect();
    let counts = NGramCounts::from_sentences(&sents)?;
    let model = NGramModel::estimate(&counts, DEFAULT_UNK_LOGPROB)?;
    println!("discounts per order: {:?}", model.discounts());

    for s in ["Я был на рынке.", "Я был в рынке.", "Рынке на был я."] {
        println!("{:>8.3}  {s}", model.score(&tokenize(s)));
    }
    println!("log10 p(доме | живу в) = {:.3}", model.logprob(&["живу", "в"], "доме"));

    let mut arpa = Vec::new();
    model.write_arpa(&mut arpa)?;
    let back = NGramModel::read_arpa(arpa.as_slice())?;
    let t = tokenize("Он живёт в городе.");
    println!("ARPA: {} bytes, score drift {:.1e}", arpa.len(), (model.score(&t) - back.score(&t)).abs());
    print!("{}", String::from_utf8(arpa)?.lines().take(8).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
