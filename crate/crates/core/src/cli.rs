//! Command-line front end: `build`, `correct` and `evaluate`.
//!
//! Exit codes: 0 on success, 2 for missing files and other environment
//! problems, 3 for malformed input.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::chains::{ChainError, ChainStore};
use crate::config::{ConfigError, GlobalConfig, ENV_CONFIG_FILE};
use crate::lexicon::{FrequencyLexicon, LexiconError};
use crate::lm::{LmError, NGramCounts, NGramModel};
use crate::m2::{self, M2Error};
use crate::masked::{PrepositionSet, RemotePredictor};
use crate::morph::{MorphError, MorphLexicon};
use crate::pipeline::{Artifacts, Pipeline, PipelineError};
use crate::text::{CorpusReader, LineMode, Sentence, Tokenizer};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ENV: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "l2gec", version, about = "Grammatical error correction for learner Russian")]
pub struct Cli {
    /// Config file (`key = value` lines). Also read from L2GEC_CONFIG.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a config key, e.g. `--set beam_width=3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an artifact from a corpus of correct text.
    Build {
        #[command(subcommand)]
        what: BuildCommand,
    },
    /// Correct text line by line.
    Correct(CorrectArgs),
    /// Score tokenized hypotheses against an M2 file.
    Evaluate(EvaluateArgs),
    /// Print the effective configuration.
    Config,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CorpusMode {
    /// One sentence per line.
    Sentence,
    /// Paragraphs per line, split into sentences.
    Paragraph,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "sentence")]
    pub mode: CorpusMode,
}

#[derive(Debug, Subcommand)]
pub enum BuildCommand {
    /// Word frequency dictionary (and optionally a bigram dictionary).
    Dict {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Also write bigram counts here.
        #[arg(long)]
        bigrams: Option<PathBuf>,
    },
    /// Trigram language model in ARPA format.
    Lm {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Grammatical chain store.
    Chains {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Morphological lexicon; defaults to paths.morph.
        #[arg(long)]
        morph: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    /// Input file; stdin when absent.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated stage list.
    #[arg(long)]
    pub stages: Option<String>,
    /// Beam width.
    #[arg(long)]
    pub beam: Option<usize>,
    /// Edit distance limit for words longer than spell.short_len.
    #[arg(long)]
    pub max_edit_distance: Option<usize>,
    /// Remote masked predictor URL.
    #[arg(long)]
    pub masked_endpoint: Option<String>,
    /// Write the change log (JSON lines) here.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub m2: PathBuf,
    /// One tokenized hypothesis per line.
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Tokenize hypotheses instead of splitting on whitespace.
    #[arg(long)]
    pub tokenize: bool,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn env(message: impl Into<String>) -> Self {
        CliError { code: EXIT_ENV, message: message.into() }
    }

    fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, message: message.into() }
    }
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::env(format!("{}: {e}", path.display()))
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<LmError> for CliError {
    fn from(e: LmError) -> Self {
        match e {
            LmError::Io(_) => CliError::env(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> Self {
        match e {
            LexiconError::Io(_) => CliError::env(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<MorphError> for CliError {
    fn from(e: MorphError) -> Self {
        match e {
            MorphError::Io(_) => CliError::env(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<ChainError> for CliError {
    fn from(e: ChainError) -> Self {
        match e {
            ChainError::Io(_) => CliError::env(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<M2Error> for CliError {
    fn from(e: M2Error) -> Self {
        match e {
            M2Error::Io(_) => CliError::env(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::MissingArtifact { .. } => CliError::env(e.to_string()),
            PipelineError::Config(_) => CliError::input(e.to_string()),
        }
    }
}

/// Parse arguments, run, print errors, and return the exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ENV } else { EXIT_OK };
        }
    };
    match run(cli, std::env::vars()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

/// Layer config file, environment and command-line overrides.
pub fn load_config<I>(cli: &Cli, env: I) -> Result<GlobalConfig, CliError>
where
    I: IntoIterator<Item = (String, String)>,
{
    let env: Vec<(String, String)> = env.into_iter().collect();
    let mut config = GlobalConfig::default();
    let file = cli.config.clone().or_else(|| {
        env.iter()
            .find(|(k, _)| k == ENV_CONFIG_FILE)
            .map(|(_, v)| PathBuf::from(v))
    });
    if let Some(path) = file {
        let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
        config.apply_file(&text, &path.display().to_string())?;
    }
    config.apply_env(env)?;
    config.apply_overrides(&cli.overrides)?;
    Ok(config)
}

pub fn run<I>(cli: Cli, env: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut config = load_config(&cli, env)?;
    match cli.command {
        Command::Build { what } => cmd_build(&config, what),
        Command::Correct(args) => {
            let mut flags = Vec::new();
            if let Some(s) = &args.stages {
                flags.push(format!("stages={s}"));
            }
            if let Some(b) = args.beam {
                flags.push(format!("beam_width={b}"));
            }
            if let Some(d) = args.max_edit_distance {
                flags.push(format!("spell.max_d={d}"));
            }
            if let Some(u) = &args.masked_endpoint {
                flags.push(format!("masked.endpoint={u}"));
            }
            config.apply_overrides(&flags)?;
            cmd_correct(&config, &args)
        }
        Command::Evaluate(args) => {
            if let Some(b) = args.beta {
                config.apply_overrides(&[format!("eval.beta={b}")])?;
            }
            cmd_evaluate(&config, &args)
        }
        Command::Config => {
            print!("{}", config.render());
            Ok(())
        }
    }
}

fn read_corpus(args: &CorpusArgs, tokenizer: &Tokenizer) -> Result<Vec<Sentence>, CliError> {
    let mode = match args.mode {
        CorpusMode::Sentence => LineMode::Sentence,
        CorpusMode::Paragraph => LineMode::Paragraph,
    };
    let reader = CorpusReader::open(&args.corpus, mode).map_err(|e| io_err(&args.corpus, e))?;
    let mut out = Vec::new();
    for line in reader {
        let line = line.map_err(|e| match e.kind() {
            io::ErrorKind::InvalidData => CliError::input(format!("{}: {e}", args.corpus.display())),
            _ => io_err(&args.corpus, e),
        })?;
        let s = tokenizer.tokenize(&line);
        if !s.is_empty() {
            out.push(s);
        }
    }
    Ok(out)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

fn load_morph(config: &GlobalConfig, path: &Path) -> Result<MorphLexicon, CliError> {
    let mut morph = MorphLexicon::load(path)?;
    if let Some(freq) = config.path("paths.tag_freq") {
        let f = File::open(&freq).map_err(|e| io_err(&freq, e))?;
        morph.read_tag_frequencies(BufReader::new(f))?;
    }
    Ok(morph)
}

fn cmd_build(config: &GlobalConfig, what: BuildCommand) -> Result<(), CliError> {
    let tokenizer = Tokenizer::new(config.bool("text.fold_yo")?);
    match what {
        BuildCommand::Dict { corpus, bigrams } => {
            let sents = read_corpus(&corpus, &tokenizer)?;
            if sents.is_empty() {
                return Err(LmError::EmptyCorpus.into());
            }
            let mut lex = FrequencyLexicon::from_sentences(&sents);
            lex.retain_min_count(config.usize("lexicon.min_count")? as u64);
            let mut w = create(&corpus.out)?;
            lex.write_tsv(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(&corpus.out, e))?;
            if let Some(path) = bigrams {
                let mut w = create(&path)?;
                lex.write_bigrams_tsv(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(&path, e))?;
            }
            println!("sentences: {}", sents.len());
            println!("words: {}", lex.len());
            println!("bigrams: {}", lex.bigram_entries().len());
        }
        BuildCommand::Lm { corpus } => {
            let sents = read_corpus(&corpus, &tokenizer)?;
            let counts = NGramCounts::from_sentences(&sents)?;
            let model = NGramModel::estimate(&counts, config.f64("lm.unk_logprob")?)?;
            model.save_arpa(&corpus.out).map_err(|e| io_err(&corpus.out, e))?;
            println!("sentences: {}", sents.len());
            for n in 1..=model.order() {
                println!("{n}-grams: {}", model.num_ngrams(n));
            }
        }
        BuildCommand::Chains { corpus, morph } => {
            let morph_path = morph
                .or_else(|| config.path("paths.morph"))
                .ok_or_else(|| CliError::env("build chains needs --morph or paths.morph"))?;
            let morph = load_morph(config, &morph_path)?;
            let sents = read_corpus(&corpus, &tokenizer)?;
            if sents.is_empty() {
                return Err(LmError::EmptyCorpus.into());
            }
            let store = ChainStore::build(&sents, &morph);
            let mut w = create(&corpus.out)?;
            store.write_tsv(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(&corpus.out, e))?;
            println!("sentences: {}", sents.len());
            println!("chains: {}", store.len());
        }
    }
    Ok(())
}

/// Load every artifact whose path is configured.
pub fn load_artifacts(config: &GlobalConfig) -> Result<Artifacts, CliError> {
    let mut a = Artifacts::default();
    if let Some(p) = config.path("paths.lexicon") {
        let mut lex = FrequencyLexicon::load(&p)?;
        if let Some(b) = config.path("paths.bigrams") {
            let f = File::open(&b).map_err(|e| io_err(&b, e))?;
            lex.read_bigrams_tsv(BufReader::new(f))?;
        }
        lex.retain_min_count(config.usize("lexicon.min_count")? as u64);
        a.lexicon = Some(lex);
    }
    if let Some(p) = config.path("paths.lm") {
        a.lm = Some(NGramModel::load_arpa(&p)?);
    }
    if let Some(p) = config.path("paths.morph") {
        a.morph = Some(load_morph(config, &p)?);
    }
    if let Some(p) = config.path("paths.chains") {
        let f = File::open(&p).map_err(|e| io_err(&p, e))?;
        a.chains = Some(ChainStore::read_tsv(BufReader::new(f))?);
    }
    let endpoint = config.get("masked.endpoint");
    if !endpoint.is_empty() {
        a.predictor = Some(Box::new(RemotePredictor::new(endpoint, config.masked_timeout()?)));
    }
    Ok(a)
}

fn cmd_correct(config: &GlobalConfig, args: &CorrectArgs) -> Result<(), CliError> {
    let mut pc = config.pipeline_config()?;
    if let Some(p) = config.path("paths.prepositions") {
        let f = File::open(&p).map_err(|e| io_err(&p, e))?;
        pc.prepositions = PrepositionSet::read(BufReader::new(f))
            .map_err(|e| io_err(&p, e))?
            .ok_or_else(|| CliError::input(format!("{}: empty preposition list", p.display())))?;
    }
    let pipeline = Pipeline::new(pc, load_artifacts(config)?)?;

    let input: Box<dyn BufRead> = match &args.input {
        Some(p) => Box::new(BufReader::new(File::open(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(BufReader::new(io::stdin())),
    };
    let output: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout())),
    };
    let mut log_file = match &args.log {
        Some(p) => Some(create(p)?),
        None => None,
    };
    let stats = pipeline
        .correct_stream(input, output, log_file.as_mut().map(|f| f as &mut dyn Write))
        .map_err(|e| match e.kind() {
            io::ErrorKind::InvalidData => CliError::input(format!("input is not UTF-8: {e}")),
            _ => CliError::env(e.to_string()),
        })?;
    if let Some(f) = log_file.as_mut() {
        f.flush().map_err(|e| CliError::env(e.to_string()))?;
    }
    eprintln!(
        "lines: {}, sentences: {}, changed lines: {}, changes: {}",
        stats.lines,
        stats.sentences,
        stats.changed_lines,
        stats.total_changes()
    );
    for (stage, n) in &stats.changes {
        eprintln!("  {stage}: {n}");
    }
    for (stage, n) in &stats.skipped {
        eprintln!("  {stage} skipped on {n} lines");
    }
    Ok(())
}

fn cmd_evaluate(config: &GlobalConfig, args: &EvaluateArgs) -> Result<(), CliError> {
    let gold = m2::load_m2(&args.m2)?;
    let mut text = String::new();
    File::open(&args.hyp)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| match e.kind() {
            io::ErrorKind::InvalidData => CliError::input(format!("{}: not UTF-8", args.hyp.display())),
            _ => io_err(&args.hyp, e),
        })?;
    let tokenizer = Tokenizer::new(config.bool("text.fold_yo")?);
    let hyps: Vec<Vec<String>> = text
        .lines()
        .map(|l| {
            if args.tokenize {
                tokenizer.tokenize(l).surfaces().into_iter().map(str::to_string).collect()
            } else {
                m2::split_tokens(l)
            }
        })
        .collect();
    let report = m2::score(&gold, &hyps, config.f64("eval.beta")?, config.usize("eval.merge_window")?)?;
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}
