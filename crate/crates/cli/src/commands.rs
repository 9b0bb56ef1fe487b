use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gyrodebias::bias::{attach_direct_bias, bias_report, euclidean_gender_direction, gender_gyrovectors, GenderAxis};
use gyrodebias::defaults;
use gyrodebias::embedding::{load_embeddings, load_pairs, load_word_list, save_embeddings, save_embeddings_binary};
use gyrodebias::eval::datasets::{analogies_from_pairs, load_analogies, load_sembias, load_similarity};
use gyrodebias::eval::{
    analogy_eval, cross_validate_t, sembias_eval, similarity_eval, weat_test, CvResult, SemBiasOptions, Similarity,
    WeatOptions, WeatSpec,
};
use gyrodebias::{debias_vocabulary, karcher_mean, EmbeddingSet, MeanConfig, PgdConfig, PoincarePoint, Space};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    AnalogyArgs, BiasArgs, Cli, Command, DebiasArgs, EvalCommand, GenderWords, MeanArgs, SemBiasArgs,
    SimilarityArgs, TChoice, WeatArgs,
};

const SCHEMA_VERSION: u32 = 1;

struct RunContext {
    seed: u64,
    similarity: Option<Similarity>,
    space: Space,
    output: Option<PathBuf>,
}

impl RunContext {
    fn similarity(&self) -> Similarity {
        self.similarity.unwrap_or_default()
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let g = cli.global;
    let ctx = RunContext {
        seed: g.seed,
        similarity: g.similarity.map(Into::into),
        space: g.space.into(),
        output: g.output,
    };
    validate(&cli.command, &ctx)?;
    if let Some(n) = g.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let (name, report) = match &cli.command {
        Command::Mean(a) => ("mean", cmd_mean(a, &ctx)?),
        Command::Bias(a) => ("bias", cmd_bias(a, &ctx)?),
        Command::Debias(a) => ("debias", cmd_debias(a, &ctx)?),
        Command::Eval(EvalCommand::Weat(a)) => ("eval weat", cmd_weat(a, &ctx)?),
        Command::Eval(EvalCommand::Sembias(a)) => ("eval sembias", cmd_sembias(a, &ctx)?),
        Command::Eval(EvalCommand::Similarity(a)) => ("eval similarity", cmd_similarity(a, &ctx)?),
        Command::Eval(EvalCommand::Analogy(a)) => ("eval analogy", cmd_analogy(a, &ctx)?),
    };
    emit(name, report, ctx.output.as_deref())
}

fn mean_config(lr: f64, epochs: usize, tol: f64) -> Result<MeanConfig> {
    let cfg = MeanConfig {
        learning_rate: lr,
        max_epochs: epochs,
        tol,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn check_t(t: &TChoice) -> Result<()> {
    match t.t {
        Some(v) if !(0.0..=1.0).contains(&v) => bail!("--t must lie in [0, 1], got {v}"),
        None if !t.cv_t => bail!("pass either --t <value> or --cv-t"),
        _ => Ok(()),
    }
}

/// Flag checks that need no file access.
fn validate(cmd: &Command, ctx: &RunContext) -> Result<()> {
    let needs_ball = |what: &str| -> Result<()> {
        if ctx.space != Space::Poincare {
            bail!("{what} works on Poincaré embeddings only; drop --space euclidean");
        }
        Ok(())
    };
    if ctx.space == Space::Euclidean && ctx.similarity() == Similarity::NegPoincare && matches!(cmd, Command::Eval(_)) {
        bail!("--similarity neg-poincare needs Poincaré embeddings; use --similarity cosine with --space euclidean");
    }
    match cmd {
        Command::Mean(a) => {
            needs_ball("mean")?;
            mean_config(a.lr, a.epochs, a.tol)?;
        }
        Command::Bias(a) => {
            needs_ball("bias")?;
            mean_config(a.mean.lr, a.mean.epochs, a.mean.tol)?;
            if !(a.threshold >= 0.0) {
                bail!("--threshold must be non-negative");
            }
        }
        Command::Debias(a) => {
            needs_ball("debias")?;
            mean_config(a.mean.lr, a.mean.epochs, a.mean.tol)?;
            pgd_config(a).validate()?;
        }
        Command::Eval(EvalCommand::Weat(a)) => {
            if a.max_permutations == 0 {
                bail!("--max-permutations must be positive");
            }
        }
        Command::Eval(EvalCommand::Sembias(a)) => check_t(&a.t)?,
        Command::Eval(EvalCommand::Analogy(a)) => check_t(&a.t)?,
        Command::Eval(EvalCommand::Similarity(_)) => {}
    }
    Ok(())
}

fn emit(command: &str, report: Value, output: Option<&Path>) -> Result<()> {
    let mut doc = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    match report {
        Value::Object(fields) => doc.as_object_mut().expect("object").extend(fields),
        other => {
            doc["result"] = other;
        }
    }
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn to_value(v: &impl Serialize) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn load(path: &Path, space: Space) -> Result<EmbeddingSet> {
    load_embeddings(path, space).with_context(|| format!("loading embeddings from {}", path.display()))
}

fn cmd_mean(a: &MeanArgs, ctx: &RunContext) -> Result<Value> {
    let cfg = mean_config(a.lr, a.epochs, a.tol)?;
    let words = load_word_list(&a.words)?;
    let emb = load(&a.embeddings, ctx.space)?;
    let points: Vec<PoincarePoint> = words.iter().map(|w| emb.point(w)).collect::<gyrodebias::Result<_>>()?;
    let mean = karcher_mean(&points, &cfg)?;
    if !mean.converged {
        log::warn!(
            "mean did not reach tolerance {} within {} epochs (gradient norm {:e})",
            cfg.tol,
            cfg.max_epochs,
            mean.grad_norm
        );
    }
    Ok(json!({ "words": words, "config": to_value(&cfg)?, "mean": to_value(&mean)? }))
}

fn gender_sets(g: &GenderWords) -> Result<(Vec<String>, Vec<String>)> {
    match (&g.pairs, &g.male_words, &g.female_words) {
        (Some(p), _, _) => Ok(load_pairs(p)?.into_iter().unzip()),
        (None, Some(m), Some(f)) => Ok((load_word_list(m)?, load_word_list(f)?)),
        _ => Ok((defaults::male_words(), defaults::female_words())),
    }
}

fn specific_words(path: Option<&PathBuf>, male: &[String], female: &[String]) -> Result<Vec<String>> {
    let mut words = match path {
        Some(p) => load_word_list(p)?,
        None => defaults::gender_specific_words(),
    };
    let mut seen: HashSet<String> = words.iter().cloned().collect();
    for w in male.iter().chain(female) {
        if seen.insert(w.clone()) {
            words.push(w.clone());
        }
    }
    Ok(words)
}

fn axis_value(axis: &GenderAxis) -> Result<Value> {
    Ok(json!({
        "male_words_used": axis.male_used,
        "female_words_used": axis.female_used,
        "male_mean": to_value(&axis.male_mean)?,
        "female_mean": to_value(&axis.female_mean)?,
        "g_mf": axis.gyrovectors.g_mf.value(),
        "g_fm": axis.gyrovectors.g_fm.value(),
    }))
}

fn cmd_bias(a: &BiasArgs, ctx: &RunContext) -> Result<Value> {
    let cfg = mean_config(a.mean.lr, a.mean.epochs, a.mean.tol)?;
    let (male, female) = gender_sets(&a.gender)?;
    let specific = specific_words(a.gender_specific.as_ref(), &male, &female)?;
    let targets = a.target_words.as_ref().map(load_word_list).transpose()?;
    let mut emb = load(&a.embeddings, ctx.space)?;
    emb.set_partition(&specific);

    let axis = gender_gyrovectors(&emb, &male, &female, &cfg)?;
    let targets: Vec<String> = match targets {
        Some(t) if !t.is_empty() => t,
        _ => emb.neutral_words().into_iter().map(String::from).collect(),
    };
    let mut report = bias_report(&targets, &emb, &axis.gyrovectors, a.threshold)?;
    if let Some(path) = &a.euclidean_embeddings {
        let euc = load(path, Space::Euclidean)?;
        let dir = euclidean_gender_direction(&euc, &axis.male_used, &axis.female_used)?;
        attach_direct_bias(&mut report, &euc, &dir, a.absolute)?;
    }
    if let Some(path) = &a.tsv {
        report.save_tsv(path)?;
    }
    Ok(json!({ "axis": axis_value(&axis)?, "bias": to_value(&report)? }))
}

fn pgd_config(a: &DebiasArgs) -> PgdConfig {
    PgdConfig {
        lambda1: a.lambda1,
        lambda2: a.lambda2,
        learning_rate: a.lr,
        epochs: a.epochs,
    }
}

fn cmd_debias(a: &DebiasArgs, ctx: &RunContext) -> Result<Value> {
    let mean_cfg = mean_config(a.mean.lr, a.mean.epochs, a.mean.tol)?;
    let cfg = pgd_config(a);
    let (male, female) = gender_sets(&a.gender)?;
    let specific = specific_words(a.gender_specific.as_ref(), &male, &female)?;
    let mut emb = load(&a.embeddings, ctx.space)?;
    emb.set_partition(&specific);

    let axis = gender_gyrovectors(&emb, &male, &female, &mean_cfg)?;
    let (debiased, report) = debias_vocabulary(&emb, &axis.gyrovectors, &cfg)?;
    if a.binary {
        save_embeddings_binary(&debiased, &a.out)?;
    } else {
        save_embeddings(&debiased, &a.out)?;
    }
    log::info!("wrote {} vectors to {}", debiased.len(), a.out.display());
    Ok(json!({ "axis": axis_value(&axis)?, "debias": to_value(&report)? }))
}

fn cmd_weat(a: &WeatArgs, ctx: &RunContext) -> Result<Value> {
    let mut specs: Vec<WeatSpec> = if a.specs.is_empty() {
        defaults::weat_specs()
    } else {
        a.specs
            .iter()
            .map(|p| WeatSpec::load(p).with_context(|| format!("reading WEAT spec {}", p.display())))
            .collect::<Result<_>>()?
    };
    if let Some(sim) = ctx.similarity {
        specs.iter_mut().for_each(|s| s.similarity = sim);
    }
    let emb = load(&a.embeddings, ctx.space)?;
    let opts = WeatOptions {
        max_permutations: a.max_permutations,
        seed: ctx.seed,
    };
    let results = specs
        .iter()
        .map(|s| weat_test(s, &emb, opts))
        .collect::<gyrodebias::Result<Vec<_>>>()?;
    Ok(json!({ "seed": ctx.seed, "tests": to_value(&results)? }))
}

/// The fixed `--t`, or the cross-validated one together with its grid.
fn resolve_t(t: &TChoice, emb: &EmbeddingSet, sim: Similarity) -> Result<(f64, Option<CvResult>)> {
    if let Some(v) = t.t {
        return Ok((v, None));
    }
    let dataset = match &t.cv_dataset {
        Some(p) => load_analogies(p)?,
        None => analogies_from_pairs(&defaults::definitional_pairs()),
    };
    let cv = cross_validate_t(&dataset, emb, sim)?;
    log::info!("cross-validation selected t = {}", cv.t);
    Ok((cv.t, Some(cv)))
}

fn cmd_sembias(a: &SemBiasArgs, ctx: &RunContext) -> Result<Value> {
    let instances = load_sembias(&a.dataset)?;
    let emb = load(&a.embeddings, ctx.space)?;
    let sim = ctx.similarity();
    let (t, cv) = resolve_t(&a.t, &emb, sim)?;
    let opts = SemBiasOptions {
        t,
        similarity: sim,
        scoring: a.scoring.into(),
        male: &a.male,
        female: &a.female,
    };
    let result = sembias_eval(&instances, &emb, &opts)?;
    Ok(json!({ "sembias": to_value(&result)?, "cross_validation": to_value(&cv)? }))
}

fn cmd_similarity(a: &SimilarityArgs, ctx: &RunContext) -> Result<Value> {
    let dataset = load_similarity(&a.dataset)?;
    let emb = load(&a.embeddings, ctx.space)?;
    let result = similarity_eval(&dataset, &emb, ctx.similarity())?;
    Ok(json!({ "similarity": to_value(&result)? }))
}

fn cmd_analogy(a: &AnalogyArgs, ctx: &RunContext) -> Result<Value> {
    let dataset = load_analogies(&a.dataset)?;
    let emb = load(&a.embeddings, ctx.space)?;
    let sim = ctx.similarity();
    let (t, cv) = resolve_t(&a.t, &emb, sim)?;
    let result = analogy_eval(&dataset, &emb, t, sim)?;
    Ok(json!({ "analogy": to_value(&result)?, "cross_validation": to_value(&cv)? }))
}
