use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gyrodebias::eval::{SemBiasScoring, Similarity};
use gyrodebias::Space;

#[derive(Debug, Parser)]
#[command(name = "gyrodebias", version, about = "Measure and remove gender bias in Poincaré-ball word embeddings")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for sampled WEAT p-values.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Similarity used by the evaluations [default: neg-poincare, or the
    /// one named in a WEAT spec].
    #[arg(long, global = true, value_enum)]
    pub similarity: Option<SimilarityArg>,
    /// Geometry of the input embeddings.
    #[arg(long, global = true, value_enum, default_value_t = SpaceArg::Poincare)]
    pub space: SpaceArg,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SimilarityArg {
    NegPoincare,
    Cosine,
}

impl From<SimilarityArg> for Similarity {
    fn from(s: SimilarityArg) -> Self {
        match s {
            SimilarityArg::NegPoincare => Similarity::NegPoincare,
            SimilarityArg::Cosine => Similarity::Cosine,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SpaceArg {
    Poincare,
    Euclidean,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::Poincare => Space::Poincare,
            SpaceArg::Euclidean => Space::Euclidean,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScoringArg {
    Analogy,
    Gyrocosine,
}

impl From<ScoringArg> for SemBiasScoring {
    fn from(s: ScoringArg) -> Self {
        match s {
            ScoringArg::Analogy => SemBiasScoring::AnalogyProximity,
            ScoringArg::Gyrocosine => SemBiasScoring::Gyrocosine,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Karcher mean of a word list.
    Mean(MeanArgs),
    /// Gyrocosine bias of target words.
    Bias(BiasArgs),
    /// Debias every gender-neutral word.
    Debias(DebiasArgs),
    /// Run an evaluation benchmark.
    #[command(subcommand)]
    Eval(EvalCommand),
}

#[derive(Debug, Args)]
pub struct MeanOpts {
    /// Learning rate of the mean optimizer.
    #[arg(id = "mean_lr", long = "mean-lr", default_value_t = 3e-4)]
    pub lr: f64,
    #[arg(id = "mean_epochs", long = "mean-epochs", default_value_t = 2000)]
    pub epochs: usize,
    #[arg(id = "mean_tol", long = "mean-tol", default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct MeanArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    /// One word per line.
    #[arg(long)]
    pub words: PathBuf,
    #[arg(long, default_value_t = 3e-4)]
    pub lr: f64,
    #[arg(long, default_value_t = 2000)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

/// Where the definitional word sets come from. Without any of these flags
/// the bundled pair list is used.
#[derive(Debug, Args)]
pub struct GenderWords {
    /// Word pairs, male form first.
    #[arg(long, conflicts_with_all = ["male_words", "female_words"])]
    pub pairs: Option<PathBuf>,
    #[arg(long, requires = "female_words")]
    pub male_words: Option<PathBuf>,
    #[arg(long, requires = "male_words")]
    pub female_words: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[command(flatten)]
    pub gender: GenderWords,
    #[command(flatten)]
    pub mean: MeanOpts,
    /// Words to score; defaults to every gender-neutral word.
    #[arg(long)]
    pub target_words: Option<PathBuf>,
    /// Gender-specific words excluded from the default targets.
    #[arg(long)]
    pub gender_specific: Option<PathBuf>,
    /// |γ| above this counts as biased in the summary.
    #[arg(long, default_value_t = 0.05)]
    pub threshold: f64,
    /// Euclidean counterpart embeddings; adds a direct-bias column and the
    /// correlation between the two measures.
    #[arg(long)]
    pub euclidean_embeddings: Option<PathBuf>,
    /// Compare absolute values of both bias measures.
    #[arg(long, requires = "euclidean_embeddings")]
    pub absolute: bool,
    /// Also write `word<TAB>gamma[<TAB>direct]` rows here.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DebiasArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[command(flatten)]
    pub gender: GenderWords,
    #[command(flatten)]
    pub mean: MeanOpts,
    #[arg(long)]
    pub gender_specific: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub lambda1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub lambda2: f64,
    #[arg(long, default_value_t = 3e-4)]
    pub lr: f64,
    #[arg(long, default_value_t = 350)]
    pub epochs: usize,
    /// Debiased embedding file.
    #[arg(long)]
    pub out: PathBuf,
    /// Write the binary format instead of text.
    #[arg(long)]
    pub binary: bool,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Word Embedding Association Test.
    Weat(WeatArgs),
    /// SemBias analogy selection.
    Sembias(SemBiasArgs),
    /// Spearman correlation with human similarity ratings.
    Similarity(SimilarityArgs),
    /// Analogy completion accuracy.
    Analogy(AnalogyArgs),
}

#[derive(Debug, Args)]
pub struct WeatArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    /// WEAT spec files (JSON); defaults to the three bundled tests.
    #[arg(long = "spec")]
    pub specs: Vec<PathBuf>,
    /// Enumerate all splits up to this many, otherwise sample this many.
    #[arg(long, default_value_t = 200_000)]
    pub max_permutations: u64,
}

/// How to pick the interpolation weight of the analogy solver.
#[derive(Debug, Args)]
pub struct TChoice {
    /// Fixed weight in [0, 1].
    #[arg(long, conflicts_with = "cv_t")]
    pub t: Option<f64>,
    /// Choose the weight by two-fold cross-validation on gender-definition
    /// analogies.
    #[arg(long)]
    pub cv_t: bool,
    /// Analogy file for `--cv-t`; defaults to analogies built from the
    /// bundled definitional pairs.
    #[arg(long, requires = "cv_t")]
    pub cv_dataset: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SemBiasArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[command(flatten)]
    pub t: TChoice,
    #[arg(long, value_enum, default_value_t = ScoringArg::Analogy)]
    pub scoring: ScoringArg,
    #[arg(long, default_value = "he")]
    pub male: String,
    #[arg(long, default_value = "she")]
    pub female: String,
}

#[derive(Debug, Args)]
pub struct SimilarityArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalogyArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[command(flatten)]
    pub t: TChoice,
}
