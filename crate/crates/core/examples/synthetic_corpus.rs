//! Write a template-generated training corpus, one sentence per line.
//!
//! cargo run --example synthetic_corpus -- 50000 corpus.txt [seed]

#[path = "../tests/support/synth.rs"]
mod synth;

use std::io::{BufWriter, Write};

fn main() -> std::io::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut gen = synth::Synth::new(synth::load_morph(), seed);
    let mut out: Box<dyn Write> = match args.get(2) {
        Some(path) => Box::new(BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    for line in gen.corpus(n) {
        writeln!(out, "{line}")?;
    }
    out.flush()
}
