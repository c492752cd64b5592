//! Command-line interface: argument shapes and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{
    cmd_ablate, cmd_curve, cmd_evaluate, cmd_featurize, cmd_harvest, cmd_pmi_build,
    cmd_preprocess, cmd_train, CommandContext, EvalSource,
};
use crate::error::{Error, Result};

/// Stance-classification pipeline: harvest weakly labeled tweets, extract
/// lexicon-generalized features, train and score per-topic models.
#[derive(Debug, Parser)]
#[command(name = "stancekit", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Arguments every subcommand shares.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Path to the run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Topic to operate on (a key under [topics] in the configuration).
    #[arg(long)]
    pub topic: String,
    /// Directory receiving output files and the run manifest.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a weakly labeled, balanced training corpus from seed rules.
    Harvest {
        #[command(flatten)]
        common: CommonArgs,
        /// Override the configured sampling seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Filter, normalize, and parse-attach a tweet file.
    Preprocess {
        #[command(flatten)]
        common: CommonArgs,
        /// Tweet file to preprocess; defaults to the topic's train path.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Build the topic-association model from the configured corpus.
    PmiBuild {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Extract features for a tweet file.
    Featurize {
        #[command(flatten)]
        common: CommonArgs,
        /// Tweet file to featurize; defaults to the topic's train file.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Remove hashtag tokens before extraction, whatever the config says.
        #[arg(long)]
        strip_hashtags: bool,
    },
    /// Train a model from a feature file.
    Train {
        #[command(flatten)]
        common: CommonArgs,
        /// Feature file written by `featurize`.
        #[arg(long)]
        features: PathBuf,
    },
    /// Score predictions and write a report.
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Saved model to predict with (requires --features).
        #[arg(long, requires = "features", conflicts_with = "pairs")]
        model: Option<PathBuf>,
        /// Labeled feature file to predict (requires --model).
        #[arg(long, requires = "model")]
        features: Option<PathBuf>,
        /// Finished id<TAB>predicted<TAB>gold rows to score directly.
        #[arg(long, conflicts_with = "features")]
        pairs: Option<PathBuf>,
        /// Name recorded in the report's config_name column.
        #[arg(long)]
        name: Option<String>,
    },
    /// Score feature-family subsets on the configured train/test split.
    Ablate {
        #[command(flatten)]
        common: CommonArgs,
        /// Family subsets: names joined by ',' within a subset, subsets by
        /// ';' (e.g. "unigram,bigram;dep"). Defaults to the standard groups.
        #[arg(long)]
        families: Option<String>,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Remove hashtags from train and test before extraction.
        #[arg(long)]
        strip_hashtags: bool,
    },
    /// Measure learning curves over nested training prefixes.
    Curve {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated, strictly increasing training sizes.
        #[arg(long)]
        sizes: String,
        /// Override the configured shuffle seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Remove hashtags from train and test before extraction.
        #[arg(long)]
        strip_hashtags: bool,
    },
}

fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::param("sizes", format!("bad size {part:?}")))
        })
        .collect()
}

/// Execute a parsed invocation.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Harvest { common, seed } => {
            let ctx = CommandContext::load(&common.config)?;
            cmd_harvest(&ctx, &common.topic, &common.out_dir, seed)
        }
        Command::Preprocess { common, input } => {
            let ctx = CommandContext::load(&common.config)?;
            cmd_preprocess(&ctx, &common.topic, input.as_deref(), &common.out_dir)
        }
        Command::PmiBuild { common } => {
            let ctx = CommandContext::load(&common.config)?;
            cmd_pmi_build(&ctx, &common.topic, &common.out_dir)
        }
        Command::Featurize {
            common,
            input,
            strip_hashtags,
        } => {
            let ctx = CommandContext::load(&common.config)?;
            cmd_featurize(&ctx, &common.topic, input.as_deref(), &common.out_dir, strip_hashtags)
        }
        Command::Train { common, features } => {
            let ctx = CommandContext::load(&common.config)?;
            cmd_train(&ctx, &common.topic, &features, &common.out_dir)
        }
        Command::Evaluate {
            common,
            model,
            features,
            pairs,
            name,
        } => {
            let ctx = CommandContext::load(&common.config)?;
            let source = match (&model, &features, &pairs) {
                (Some(model), Some(features), None) => EvalSource::ModelFeatures { model, features },
                (None, None, Some(pairs)) => EvalSource::Pairs { pairs },
                _ => {
                    return Err(Error::param(
                        "evaluate",
                        "pass either --model with --features, or --pairs",
                    ))
                }
            };
            cmd_evaluate(&ctx, &common.topic, source, &common.out_dir, name.as_deref())
        }
        Command::Ablate {
            common,
            families,
            seed,
            strip_hashtags,
        } => {
            let ctx = CommandContext::load(&common.config)?;
            cmd_ablate(
                &ctx,
                &common.topic,
                &common.out_dir,
                families.as_deref(),
                seed,
                strip_hashtags,
            )
        }
        Command::Curve {
            common,
            sizes,
            seed,
            strip_hashtags,
        } => {
            let ctx = CommandContext::load(&common.config)?;
            let sizes = parse_sizes(&sizes)?;
            cmd_curve(&ctx, &common.topic, &common.out_dir, &sizes, seed, strip_hashtags)
        }
    }
}
