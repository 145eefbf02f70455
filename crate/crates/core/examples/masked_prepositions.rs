//! Preposition correction by masked prediction, using the n-gram model as
//! the predictor.
//!
//! cargo run --example masked_prepositions -- "Я живу с своим другом."

#[path = "../tests/support/synth.rs"]
mod synth;

use l2gec::beam::CandidateBeam;
use l2gec::lm::{NGramCounts, NGramModel, DEFAULT_UNK_LOGPROB};
use l2gec::masked::{correct_prepositions, LmPredictor, MaskedPredictor, PrepositionSet, DEFAULT_THRESHOLD};
use l2gec::text::tokenize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let input = std::env::args().nth(1).unwrap_or_else(|| "Я живу с своим другом.".into());
    let lex = synth::load_morph();
    let corpus: Vec<_> = synth::Synth::new(lex.clone(), 1).corpus(5000).iter().map(|s| tokenize(s)).collect();
    let model = NGramModel::estimate(&NGramCounts::from_sentences(&corpus)?, DEFAULT_UNK_LOGPROB)?;
    let predictor = LmPredictor::new(&model);
    let preps = PrepositionSet::default();

    let sentence = tokenize(&input);
    let words = sentence.lower_forms();
    if let Some(pos) = lex.tag_sentence(&sentence).iter().position(|e| e.pos == l2gec::morph::Upos::ADP) {
        let ranked = predictor.predict(&words[..pos], &words[pos + 1..], preps.words())?;
        println!("fillers for position {pos}:");
        for (w, score) in ranked.iter().take(5) {
            println!("  {w:<6} {score:.3}");
        }
    }

    let beam = CandidateBeam::seed(sentence, 5, Some(&model));
    let (beam, err) = correct_prepositions(&predictor, &lex, &model, &preps, &beam, DEFAULT_THRESHOLD);
    if let Some(e) = err {
        println!("predictor failed: {e}");
    }
    let top = beam.top().expect("non-empty beam");
    println!("{input}\n  -> {}", top.text());
    for c in &top.changes {
        println!("     {:?} -> {:?}, gain {:.2}", c.before, c.after, c.gain.unwrap_or_default());
    }
    Ok(())
}
