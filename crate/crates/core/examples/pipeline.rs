//! The whole correction pipeline over a synthetic training corpus.
//!
//! cargo run --release --example pipeline -- "Я думаю что студентт живёт с своим другом."

#[path = "../tests/support/synth.rs"]
mod synth;

use l2gec::chains::ChainStore;
use l2gec::lexicon::FrequencyLexicon;
use l2gec::lm::{NGramCounts, NGramModel, DEFAULT_UNK_LOGPROB};
use l2gec::pipeline::{Artifacts, Pipeline, PipelineConfig};
use l2gec::text::tokenize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lex = synth::load_morph();
    let corpus: Vec<_> = synth::Synth::new(lex.clone(), 3).corpus(20_000).iter().map(|s| tokenize(s)).collect();
    let artifacts = Artifacts {
        lexicon: Some(FrequencyLexicon::from_sentences(&corpus)),
        lm: Some(NGramModel::estimate(&NGramCounts::from_sentences(&corpus)?, DEFAULT_UNK_LOGPROB)?),
        chains: Some(ChainStore::build(&corpus, &lex)),
        morph: Some(lex),
        ..Default::default()
    };
    let pipeline = Pipeline::new(PipelineConfig::default(), artifacts)?;

    let inputs: Vec<String> = match std::env::args().nth(1) {
        Some(s) => vec![s],
        None => [
            "Я думаю что студентт живёт с своим другом.",
            "Здесь много письма.",
            "Мы говорили о учёбе.",
            "Она читала новую книгу.",
        ]
        .map(String::from)
        .to_vec(),
    };
    for input in inputs {
        let r = pipeline.run(&input);
        println!("{input}\n  -> {}   (largest beam {})", r.text, r.max_beam);
        for c in &r.changes {
            let gain = c.change.gain.map(|g| format!(", gain {g:.2}")).unwrap_or_default();
            println!("     {} at {}: {:?} -> {:?}{gain}", c.change.stage, c.change.pos, c.change.before, c.change.after);
        }
    }
    Ok(())
}
