use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use phonolat::decoder::{decode_posteriors, DecodeConfig, TieBreak};
use phonolat::harness::{
    self, summarize, Condition, Design, DecodeOptions, ExperimentSpec, Metric, ResultsTable,
};
use phonolat::hmm::DEFAULT_FLOOR;
use phonolat::synth::{self, GeneratorConfig, Preset};

#[derive(Parser)]
#[command(name = "phonolat", version, about = "Low-latency phonetic decoding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus, one directory per posterior preset.
    GenCorpus(GenArgs),
    /// Decode a corpus under a factorial design and write results.csv.
    Run(RunArgs),
    /// Aggregate results into curves, box-plot data and Tukey grids.
    Summarize(SummarizeArgs),
    /// Print ANOVA and Tukey sign grids for one results file.
    Stats(StatsArgs),
    /// Decode a single utterance and print the frame decisions.
    Decode(DecodeArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 300)]
    utterances: usize,
    #[arg(long, default_value_t = 12)]
    phones: usize,
    #[arg(long, default_value_t = 3)]
    states: usize,
    #[arg(long, default_value_t = 0.5)]
    self_loop: f64,
    #[arg(long, default_value_t = 8)]
    min_phones: usize,
    #[arg(long, default_value_t = 16)]
    max_phones: usize,
    /// Comma-separated presets: static, dyn-short, dyn-long, clean.
    #[arg(long, value_delimiter = ',', default_value = "static,dyn-short,dyn-long")]
    preset: Vec<Preset>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct DecodeFlags {
    #[arg(long, default_value = "lowest")]
    tie_break: TieBreak,
    #[arg(long, default_value_t = DEFAULT_FLOOR)]
    floor: f64,
}

impl DecodeFlags {
    fn options(&self) -> DecodeOptions {
        DecodeOptions {
            tie_break: self.tie_break,
            floor: self.floor,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Corpus root written by gen-corpus.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    design: Design,
    #[arg(long, value_delimiter = ',')]
    alpha_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    wordlen_list: Option<Vec<usize>>,
    /// Phone-loop scopes: transcription, full.
    #[arg(long, value_delimiter = ',')]
    loop_list: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',', default_value = "1,3,5,10,20")]
    look_ahead_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "static,dyn-short,dyn-long")]
    preset: Vec<Preset>,
    /// Accepted for symmetry with gen-corpus; decoding is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    decode: DecodeFlags,
}

#[derive(Args)]
struct SummarizeArgs {
    /// results.csv, or the directory holding it.
    #[arg(long)]
    results: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, default_value = "frame_rate")]
    metric: String,
}

#[derive(Args)]
struct DecodeArgs {
    /// A single preset's corpus directory.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    utterance: String,
    #[arg(long, default_value = "phone-loop")]
    design: Design,
    #[arg(long, default_value = "transcription")]
    condition: String,
    #[arg(long, default_value_t = 5)]
    look_ahead: usize,
    #[command(flatten)]
    decode: DecodeFlags,
}

fn results_path(p: PathBuf) -> PathBuf {
    if p.is_dir() {
        p.join(harness::RESULTS_FILE)
    } else {
        p
    }
}

fn gen_corpus(a: GenArgs) -> Result<()> {
    for &preset in &a.preset {
        let mut config = GeneratorConfig::preset(a.phones, preset)?;
        config.states_per_phone = a.states;
        config.self_loop = a.self_loop;
        config.min_phones = a.min_phones;
        config.max_phones = a.max_phones;
        config.validate()?;
        let dir = harness::preset_dir(&a.out, preset);
        let corpus = synth::make_corpus(&config, a.utterances, a.seed, &dir)?;
        let frames: usize = corpus.utterances.iter().map(|u| u.labels.len()).sum();
        println!("{preset}: {} utterances, {frames} frames -> {}", corpus.utterances.len(), dir.display());
    }
    Ok(())
}

fn conditions(a: &RunArgs) -> Result<Vec<Condition>> {
    let list = match a.design {
        Design::Alpha => a.alpha_list.as_ref().map(|v| v.iter().map(|&x| Condition::Alpha(x)).collect()),
        Design::Wordlen => a.wordlen_list.as_ref().map(|v| v.iter().map(|&n| Condition::WordLen(n)).collect()),
        Design::PhoneLoop => a
            .loop_list
            .as_ref()
            .map(|v| {
                v.iter()
                    .map(|s| Condition::parse(Design::PhoneLoop, s))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?,
    };
    let list: Vec<Condition> = list.unwrap_or_else(|| a.design.default_conditions());
    for c in &list {
        c.validate()?;
    }
    Ok(list)
}

fn run(a: RunArgs) -> Result<()> {
    let spec = ExperimentSpec {
        design: a.design,
        conditions: conditions(&a)?,
        look_aheads: a.look_ahead_list.clone(),
        presets: a.preset.clone(),
        decode: a.decode.options(),
    };
    let table = harness::run_experiment(&spec, &a.corpus, &a.out)?;
    let failed = table.failed().count();
    println!("{} rows ({failed} failed) -> {}", table.rows.len(), a.out.join(harness::RESULTS_FILE).display());
    Ok(())
}

fn summarize_cmd(a: SummarizeArgs) -> Result<()> {
    let table = ResultsTable::read(&results_path(a.results))?;
    let summary = summarize(&table, a.level)?;
    summary.write(&a.out)?;
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    println!("{} curve points -> {}", summary.curves.len(), a.out.display());
    Ok(())
}

fn stats_cmd(a: StatsArgs) -> Result<()> {
    let metric = Metric::ALL
        .into_iter()
        .find(|m| m.name() == a.metric)
        .with_context(|| format!("unknown metric {:?}", a.metric))?;
    let table = ResultsTable::read(&results_path(a.results))?;
    let summary = summarize(&table, a.level)?;
    for b in summary.stats.iter().filter(|b| b.metric == metric) {
        println!("{} {} {}", b.preset, b.design, metric.name());
        for row in &b.summary.rows {
            println!(
                "  {:<14} F({},{}) = {:.3}  p = {:.3e}",
                row.condition, row.anova.df1, row.anova.df2, row.anova.f, row.anova.p
            );
        }
        print!("{}", b.summary.sign_table(&b.design));
    }
    Ok(())
}

fn decode_cmd(a: DecodeArgs) -> Result<()> {
    let corpus = synth::load_corpus(&a.corpus)?;
    let Some(u) = corpus.utterances.iter().find(|u| u.id() == a.utterance) else {
        bail!("no utterance {:?} in {}", a.utterance, a.corpus.display());
    };
    let cond = Condition::parse(a.design, &a.condition)?;
    let models = harness::decoding_models(&corpus)?;
    let net = cond.network(&u.transcription, &models)?;
    let config = DecodeConfig::new(a.look_ahead)?
        .with_tie_break(a.decode.tie_break)
        .with_floor(a.decode.floor);
    let out = decode_posteriors(&net, &u.posteriors, &corpus.priors, config)?;
    println!("frame\tref\thyp\tstate\tlatency");
    for (d, r) in out.decisions.iter().zip(&u.labels) {
        println!(
            "{}\t{}\t{}\t{}\t{}",
            d.frame,
            corpus.phones.label(*r),
            corpus.phones.label(d.phone),
            d.state,
            d.latency
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::GenCorpus(a) => gen_corpus(a),
        Command::Run(a) => run(a),
        Command::Summarize(a) => summarize_cmd(a),
        Command::Stats(a) => stats_cmd(a),
        Command::Decode(a) => decode_cmd(a),
    }
}
