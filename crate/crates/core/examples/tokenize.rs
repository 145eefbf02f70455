//! Tokenize text, edit a sentence, and split a paragraph into sentences.
//!
//! cargo run --example tokenize -- "Я думаю что кто-то прав."

use l2gec::text::{split_sentences, tokenize};

fn main() {
    let text = std::env::args().nth(1).unwrap_or_else(|| "Я думаю что кто-то прав.".into());
    let s = tokenize(&text);
    for t in s.tokens() {
        println!("{:>3}..{:<3} {:?} {:<12} {}", t.start, t.end, t.kind, t.surface, t.lower);
    }

    // edits keep the original spacing where they can
    if let Some(i) = s.tokens().iter().position(|t| t.lower == "что") {
        println!("with comma: {}", s.insert(i, ",").source());
    }

    let para = "Это первое предложение. А это второе! Третье?";
    for (i, sent) in split_sentences(para).iter().enumerate() {
        println!("sentence {i}: {sent}");
    }
}
