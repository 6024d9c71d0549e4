use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use log::info;
use serde::Serialize;

use realword::confusion::ConfusionIndex;
use realword::corrector::{changes_to_tsv, correct_corpus, ChannelParams, DecoderConfig};
use realword::corruptor::{
    apply_records, corrupt_corpus, multi_error_census, records_from_tsv, records_to_tsv, Census, CorruptionConfig,
    CorruptionRecord,
};
use realword::evalkit::{botd_accuracy, botd_pairs, evaluate_run, format_table, EvalReport, RunParams};
use realword::lm::{export_arpa, import_arpa, train, Discount, TrigramModel};
use realword::textprep::{prepare_document, split_documents, AbbrevLexicon};
use realword::vocab::{VocabStats, Vocabulary};
use realword::{format_corpus, parse_corpus, Corpus};

use crate::config::{require, Beam, RunConfig};
use crate::{BotdArgs, Command, CorrectArgs, CorruptArgs, EvaluateArgs, PrepareArgs, StatsArgs, SweepArgs, TrainArgs};

pub const VOCAB_FILE: &str = "vocab.tsv";
pub const MODEL_FILE: &str = "model.arpa";
pub const INDEX_FILE: &str = "confusion.tsv";

/// Run one command; returns its name for diagnostics alongside the result.
pub fn run(config: Option<&Path>, command: Command) -> (&'static str, Result<()>) {
    let cfg = match config.map(RunConfig::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => return ("config", Err(e)),
    };
    match command {
        Command::Prepare(a) => ("prepare", prepare(&cfg, a)),
        Command::Train(a) => ("train", train_cmd(&cfg, a)),
        Command::Stats(a) => ("stats", stats(&cfg, a)),
        Command::Corrupt(a) => ("corrupt", corrupt(&cfg, a)),
        Command::Botd(a) => ("botd", botd(&cfg, a)),
        Command::Correct(a) => ("correct", correct(&cfg, a)),
        Command::Evaluate(a) => ("evaluate", evaluate(&cfg, a)),
        Command::Sweep(a) => ("sweep", sweep(&cfg, a)),
    }
}

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {what} {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize") + "\n"
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Ok(parse_corpus(&read(path, "corpus")?))
}

fn load_model(path: &Path) -> Result<TrigramModel> {
    let t = Instant::now();
    let m = import_arpa(&read(path, "model")?).with_context(|| format!("parsing model {}", path.display()))?;
    info!("loaded {} in {:.1?}", path.display(), t.elapsed());
    Ok(m)
}

fn load_index(path: &Path) -> Result<ConfusionIndex> {
    ConfusionIndex::from_tsv(&read(path, "confusion index")?)
        .with_context(|| format!("parsing confusion index {}", path.display()))
}

fn load_records(path: &Path) -> Result<Vec<CorruptionRecord>> {
    records_from_tsv(&read(path, "records")?).with_context(|| format!("parsing records {}", path.display()))
}

fn out_dir(flag: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    flag.or_else(|| cfg.paths.out.clone()).unwrap_or_else(|| PathBuf::from("."))
}

fn input_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut inside: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            inside.retain(|q| q.is_file());
            inside.sort();
            files.extend(inside);
        } else {
            files.push(p.clone());
        }
    }
    ensure!(!files.is_empty(), "no input files");
    Ok(files)
}

fn prepare(_cfg: &RunConfig, a: PrepareArgs) -> Result<()> {
    let mut lexicon = AbbrevLexicon::english();
    if let Some(p) = &a.abbreviations {
        lexicon.extend(&AbbrevLexicon::from_list(&read(p, "abbreviation list")?));
    }
    let mut corpus: Corpus = Vec::new();
    let mut documents = 0;
    for f in input_files(&a.inputs)? {
        let text = read(&f, "input")?;
        for doc in split_documents(&text) {
            documents += 1;
            let sentences = prepare_document(doc, &lexicon).with_context(|| format!("preparing {}", f.display()))?;
            corpus.extend(sentences.into_iter().map(|s| s.surfaces()));
        }
    }
    ensure!(!corpus.is_empty(), "inputs contain no text");
    let text = format_corpus(&corpus);
    match &a.out {
        Some(p) => {
            write(p, &text)?;
            let tokens: usize = corpus.iter().map(Vec::len).sum();
            println!("{documents} documents, {} sentences, {tokens} tokens -> {}", corpus.len(), p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct TrainSummary {
    vocabulary: VocabStats,
    base_size: usize,
    realword_size: usize,
    ngram_counts: [usize; 3],
    discounts: Option<[Discount; 3]>,
    realword_fingerprint: String,
}

fn train_cmd(cfg: &RunConfig, a: TrainArgs) -> Result<()> {
    let path = require(a.corpus, &cfg.paths.train_corpus, "corpus", "paths.train_corpus")?;
    let corpus = load_corpus(&path)?;
    let vocab = Vocabulary::from_corpus(&corpus).context("building vocabulary")?;
    let t = Instant::now();
    let model = train(&corpus, &vocab);
    info!("trained in {:.1?}", t.elapsed());
    let index = ConfusionIndex::build(&vocab);

    let out = out_dir(a.out, cfg);
    write(&out.join(VOCAB_FILE), &vocab.to_tsv())?;
    write(&out.join(MODEL_FILE), &export_arpa(&model))?;
    write(&out.join(INDEX_FILE), &index.to_tsv())?;
    let summary = TrainSummary {
        vocabulary: vocab.stats(),
        base_size: vocab.base().len(),
        realword_size: vocab.realword().len(),
        ngram_counts: model.ngram_counts(),
        discounts: model.discounts().copied(),
        realword_fingerprint: format!("{:016x}", index.fingerprint()),
    };
    write(&out.join("train.json"), &json(&summary))?;
    println!(
        "{} tokens, {} types, {} base words, {} real words; n-grams {:?} -> {}",
        summary.vocabulary.token_count,
        summary.vocabulary.type_count,
        summary.base_size,
        summary.realword_size,
        summary.ngram_counts,
        out.display()
    );
    Ok(())
}

fn stats(cfg: &RunConfig, a: StatsArgs) -> Result<()> {
    let vocab = match (a.vocab.or_else(|| cfg.paths.vocab.clone()), a.corpus) {
        (_, Some(c)) => Vocabulary::from_corpus(&load_corpus(&c)?)?,
        (Some(v), None) => {
            Vocabulary::from_tsv(&read(&v, "vocabulary")?).with_context(|| format!("parsing {}", v.display()))?
        }
        (None, None) => bail!("missing --vocab or --corpus (or paths.vocab in the config file)"),
    };
    print!("{}", json(&vocab.stats()));
    Ok(())
}

fn corrupt(cfg: &RunConfig, a: CorruptArgs) -> Result<()> {
    let corpus = load_corpus(&require(a.corpus, &cfg.paths.test_corpus, "corpus", "paths.test_corpus")?)?;
    let index = load_index(&require(a.index, &cfg.paths.index, "index", "paths.index")?)?;
    let rate = require(a.rate, &cfg.params.rate_denominator, "rate", "params.rate_denominator")?;
    let seed = require(a.seed, &cfg.params.seed, "seed", "params.seed")?;
    let (observed, records) = corrupt_corpus(&corpus, &index, &CorruptionConfig::new(rate, seed)?)?;
    let census = multi_error_census(&records, corpus.len());

    let out = out_dir(a.out, cfg);
    write(&out.join("corrupted.txt"), &format_corpus(&observed))?;
    write(&out.join("records.tsv"), &records_to_tsv(&records))?;
    write(&out.join("census.json"), &json(&census))?;
    print_census(&census, records.len());
    Ok(())
}

fn print_census(c: &Census, errors: usize) {
    println!(
        "{errors} errors; {} of {} sentences carry errors, {} carry more than one",
        c.sentences_with_errors, c.sentences_total, c.sentences_with_multiple_errors
    );
}

#[derive(Serialize)]
struct BotdReport {
    pairs: usize,
    accuracy: f64,
}

fn botd(cfg: &RunConfig, a: BotdArgs) -> Result<()> {
    let model = load_model(&require(a.model, &cfg.paths.model, "model", "paths.model")?)?;
    let original = load_corpus(&require(a.corpus, &cfg.paths.test_corpus, "corpus", "paths.test_corpus")?)?;
    let records = load_records(&require(a.records, &cfg.paths.records, "records", "paths.records")?)?;
    let observed = apply_records(&original, &records)?;
    let pairs = botd_pairs(&original, &observed, &records);
    let report = BotdReport { pairs: pairs.len(), accuracy: botd_accuracy(&model, &pairs)? };
    if let Some(p) = a.out {
        write(&p, &json(&report))?;
    }
    println!("BOTD accuracy {:.4} over {} pairs", report.accuracy, report.pairs);
    Ok(())
}

fn decoder(beam: Beam) -> Result<DecoderConfig> {
    Ok(DecoderConfig::new(beam.0)?)
}

fn correct(cfg: &RunConfig, a: CorrectArgs) -> Result<()> {
    let model = load_model(&require(a.model, &cfg.paths.model, "model", "paths.model")?)?;
    let index = load_index(&require(a.index, &cfg.paths.index, "index", "paths.index")?)?;
    let observed = load_corpus(&require(a.corpus, &cfg.paths.observed, "corpus", "paths.observed")?)?;
    let beta = require(a.beta, &cfg.params.beta, "beta", "params.beta")?;
    let beam = require(a.beam, &cfg.params.beam, "beam", "params.beam")?;
    let t = Instant::now();
    let result = correct_corpus(&observed, &model, &index, &ChannelParams::new(beta)?, &decoder(beam)?)?;
    info!("decoded {} sentences in {:.1?}", observed.len(), t.elapsed());

    let out = out_dir(a.out, cfg);
    write(&out.join("corrected.txt"), &format_corpus(&result.corrected))?;
    write(&out.join("changes.tsv"), &changes_to_tsv(&result.changes))?;
    println!("{} changes in {} sentences (beta {beta}, t {beam})", result.changes.len(), observed.len());
    Ok(())
}

fn evaluate(cfg: &RunConfig, a: EvaluateArgs) -> Result<()> {
    let original = load_corpus(&require(a.corpus, &cfg.paths.test_corpus, "corpus", "paths.test_corpus")?)?;
    let records = load_records(&require(a.records, &cfg.paths.records, "records", "paths.records")?)?;
    let corrected = load_corpus(&require(a.corrected, &cfg.paths.corrected, "corrected", "paths.corrected")?)?;
    let mut report = evaluate_run(&original, &records, &corrected)?;
    if let Some(beta) = a.beta.or(cfg.params.beta) {
        let t = a.beam.or(cfg.params.beam).and_then(|b| b.label());
        report = report.with_params(RunParams { beta, t, rate: a.rate.or(cfg.params.rate_denominator) });
    }
    if let Some(p) = a.out {
        write(&p, &json(&report))?;
    }
    print!("{}", format_table(&[report]));
    Ok(())
}

fn sweep(cfg: &RunConfig, a: SweepArgs) -> Result<()> {
    let betas = if a.betas.is_empty() { cfg.params.beta_list.clone().unwrap_or_default() } else { a.betas };
    let beams = if a.beams.is_empty() { cfg.params.t_list.clone().unwrap_or_default() } else { a.beams };
    ensure!(!betas.is_empty(), "empty beta grid (give --beta or params.beta_list)");
    ensure!(!beams.is_empty(), "empty beam grid (give --beam or params.t_list)");
    let model = load_model(&require(a.model, &cfg.paths.model, "model", "paths.model")?)?;
    let index = load_index(&require(a.index, &cfg.paths.index, "index", "paths.index")?)?;
    let original = load_corpus(&require(a.corpus, &cfg.paths.test_corpus, "corpus", "paths.test_corpus")?)?;
    let records = load_records(&require(a.records, &cfg.paths.records, "records", "paths.records")?)?;
    let observed = apply_records(&original, &records)?;
    let rate = a.rate.or(cfg.params.rate_denominator);

    let mut rows: Vec<EvalReport> = Vec::new();
    for &beam in &beams {
        for &beta in &betas {
            let cp = ChannelParams::new(beta)?;
            let result = correct_corpus(&observed, &model, &index, &cp, &decoder(beam)?)
                .with_context(|| format!("decoding at t {beam}, beta {beta}"))?;
            let report = evaluate_run(&original, &records, &result.corrected)?.with_params(RunParams {
                beta,
                t: beam.label(),
                rate,
            });
            info!("t {beam} beta {beta}: {} changes", result.changes.len());
            rows.push(report);
        }
    }

    let out = out_dir(a.out, cfg);
    write(&out.join("sweep.json"), &json(&rows))?;
    write(&out.join("sweep.tsv"), &sweep_tsv(&rows))?;
    print!("{}", format_table(&rows));
    Ok(())
}

fn sweep_tsv(rows: &[EvalReport]) -> String {
    let mut out =
        String::from("t\tbeta\trate\tdet_p\tdet_r\tdet_f\tcor_p\tcor_r\tcor_f\taccuracy\ttn\tfp\ttp\tfn\tmc\n");
    for r in rows {
        let p = r.params.expect("sweep rows carry their parameters");
        let c = r.counts;
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{}\t{}\n",
            p.t.map_or("inf".to_owned(), |t| t.to_string()),
            p.beta,
            p.rate.map_or("-".to_owned(), |x| x.to_string()),
            r.detection.precision,
            r.detection.recall,
            r.detection.f1,
            r.correction.precision,
            r.correction.recall,
            r.correction.f1,
            r.accuracy,
            c.tn,
            c.fp,
            c.tp,
            c.fn_,
            c.mc
        ));
    }
    out
}
