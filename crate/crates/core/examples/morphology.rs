//! Analysis, generation and tagging with the bundled lexicon.
//!
//! cargo run --example morphology

use l2gec::morph::{FeatKey, Feats, MorphLexicon, Upos};
use l2gec::text::tokenize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/morph_ru.tsv");
    let lex = MorphLexicon::load(path)?;
    println!("{} analyses", lex.len());

    for e in lex.analyze("местах") {
        println!("местах: {} {}", e.lemma, e.tag_string());
    }
    let gen_pl = Feats::new().with(FeatKey::Case, "Gen").with(FeatKey::Number, "Plur");
    println!("место Gen Plur -> {:?}", lex.generate("место", Upos::NOUN, &gen_pl)?);
    println!("перспектива paradigm: {}", lex.paradigm("перспектива", Upos::NOUN)?.len());

    let s = tokenize("В этих местах мало перспектив.");
    for (t, e) in s.tokens().iter().zip(lex.tag_sentence(&s)) {
        println!("{:<12} {}", t.surface, e.tag_string());
    }
    Ok(())
}
