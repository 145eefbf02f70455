//! The comma rule and the о/об rule.
//!
//! cargo run --example rules -- "Я думаю что он говорил о учёбе"

use l2gec::rules::{comma_rule, o_ob_rule, RuleConfig};
use l2gec::text::tokenize;

fn main() {
    let cfg = RuleConfig::default();
    let inputs: Vec<String> = match std::env::args().nth(1) {
        Some(s) => vec![s],
        None => [
            "Я думаю что он говорил о учёбе.",
            "Он пришёл потому что устал.",
            "Это город в котором я живу.",
            "Мы говорили об явлении и о ошибках.",
        ]
        .map(String::from)
        .to_vec(),
    };
    for input in inputs {
        let (s, commas) = comma_rule(&cfg, &tokenize(&input));
        let (s, preps) = o_ob_rule(&cfg, &s);
        println!("{input}\n  -> {}", s.source());
        for c in commas.iter().chain(&preps) {
            println!("     {} at {}: {:?} -> {:?}", c.stage, c.pos, c.before, c.after);
        }
    }
}
