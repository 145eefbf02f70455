//! Agreement repair with grammatical chains: a chain missing from the
//! store is varied over the noun's paradigm until an attested one raises
//! the sentence probability.
//!
//! cargo run --example agreement -- "Здесь мало перспективы."

#[path = "../tests/support/synth.rs"]
mod synth;

use l2gec::beam::CandidateBeam;
use l2gec::chains::{correct_agreement, extract_chains, ChainStore, DEFAULT_MIN_GAIN};
use l2gec::lm::{NGramCounts, NGramModel, DEFAULT_UNK_LOGPROB};
use l2gec::text::tokenize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let input = std::env::args().nth(1).unwrap_or_else(|| "Здесь мало перспективы.".into());
    let lex = synth::load_morph();
    let corpus: Vec<_> = synth::Synth::new(lex.clone(), 2).corpus(5000).iter().map(|s| tokenize(s)).collect();
    let model = NGramModel::estimate(&NGramCounts::from_sentences(&corpus)?, DEFAULT_UNK_LOGPROB)?;
    let store = ChainStore::build(&corpus, &lex);
    println!("{} distinct chains", store.len());

    let sentence = tokenize(&input);
    for chain in extract_chains(&lex, &sentence) {
        let seen = store.count(&chain);
        println!("  {:<5} {chain}", if seen > 0 { seen.to_string() } else { "-".into() });
    }
    let beam = CandidateBeam::seed(sentence, 5, Some(&model));
    let beam = correct_agreement(&store, &model, &lex, &beam, DEFAULT_MIN_GAIN);
    let top = beam.top().expect("non-empty beam");
    println!("{input}\n  -> {}", top.text());
    for c in &top.changes {
        println!("     {:?} -> {:?}, gain {:.2}", c.before, c.after, c.gain.unwrap_or_default());
    }
    Ok(())
}
