//! Score system output against M2 gold annotations.
//!
//! cargo run --example m2_evaluation

use l2gec::m2::{extract_edits, parse_m2, score, split_tokens, DEFAULT_BETA, DEFAULT_MERGE_WINDOW};

const GOLD: &str = "\
S он пришол домой
A 1 2|||Spell|||пришёл|||REQUIRED|||-NONE-|||0

S я думаю о учёбе и о работе
A 2 3|||Prep|||об|||REQUIRED|||-NONE-|||0
A 4 5|||Conj|||а|||REQUIRED|||-NONE-|||0
A 6 7|||Spell|||работах|||REQUIRED|||-NONE-|||0
A 2 3|||Prep|||об|||REQUIRED|||-NONE-|||1
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gold = parse_m2(GOLD.as_bytes())?;
    let hyps: Vec<Vec<String>> =
        ["он пришёл домой", "я думаю о учёбе и об работе"].iter().map(|l| split_tokens(l)).collect();

    let report = score(&gold, &hyps, DEFAULT_BETA, DEFAULT_MERGE_WINDOW)?;
    print!("{}", report.to_table());
    for s in &report.sentences {
        println!("sentence {} scored against annotator {}: {:?}", s.index, s.annotator, s.edits);
    }

    // edits are chosen to line up with the gold edits when the alignment allows
    let src = split_tokens("я думаю о учёбе");
    let hyp = split_tokens("я думаю об учёбе");
    println!("{:?}", extract_edits(&src, &hyp, &[(2, 3, "об".to_string())], DEFAULT_MERGE_WINDOW));
    Ok(())
}
