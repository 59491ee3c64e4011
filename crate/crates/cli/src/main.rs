//! `hvc`: split binary secrets into expansionless shares, build two-level
//! hierarchies with key shares, reveal, and report pixel statistics.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hvc_core::analysis::{self, StatsReport};
use hvc_core::hvc::{self as hier, generate_key_share, reveal_chain_leaves, reveal_final};
use hvc_core::{
    encode, load_pbm, save_pbm, BinaryImage, EncodeConfig, Execution, KeyMapping, KeyRule, MixedPolicy,
    NormalizeMode, PbmVariant, RevealStrategy,
};

use hvc_core::pipeline::{run_pipeline, write_bundle, Manifest};

#[derive(Parser, Debug)]
#[command(name = "hvc", version, about = "Expansionless and hierarchical visual cryptography for PBM images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a secret into two shares.
    Encode {
        secret: PathBuf,
        out1: PathBuf,
        out2: PathBuf,
        #[command(flatten)]
        enc: EncodeFlags,
        #[arg(long, value_parser = parse_format)]
        format: Option<PbmVariant>,
    },
    /// Two-level split; writes s1..s22, keyshare.pbm and carrier.pbm into OUTDIR.
    EncodeHvc {
        secret: PathBuf,
        outdir: PathBuf,
        #[command(flatten)]
        enc: EncodeFlags,
        #[command(flatten)]
        key: KeyFlags,
        #[arg(long, value_parser = parse_format)]
        format: Option<PbmVariant>,
    },
    /// Stack shares. `A B OUT` for xor and xor-denoise, `S11 S12 S21 S22 OUT` for chain.
    Reveal {
        #[arg(required = true, num_args = 3..=5)]
        files: Vec<PathBuf>,
        #[arg(long, value_parser = parse_strategy, default_value = "xor")]
        strategy: RevealStrategy,
        #[arg(long, value_parser = parse_format)]
        format: Option<PbmVariant>,
    },
    /// Build a key share from three leaf shares given in mapping order.
    Keyshare {
        a: PathBuf,
        b: PathBuf,
        c: PathBuf,
        out: PathBuf,
        #[arg(long, value_parser = parse_rule, default_value = "table")]
        key_mapping: KeyRule,
        #[arg(long, value_parser = parse_format)]
        format: Option<PbmVariant>,
    },
    /// Black/white pixel counts for each image, as CSV.
    Analyze {
        #[arg(required = true)]
        images: Vec<PathBuf>,
        /// Write the CSV here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Full hierarchy, reveal, stats.csv and manifest in OUTDIR.
    Pipeline {
        secret: PathBuf,
        outdir: PathBuf,
        /// Replay settings from a manifest; explicit flags take precedence.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        enc: EncodeFlags,
        #[command(flatten)]
        key: KeyFlags,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Option<RevealStrategy>,
        #[arg(long, value_parser = parse_format)]
        format: Option<PbmVariant>,
    },
}

#[derive(Args, Debug)]
struct EncodeFlags {
    /// Integer seed, or `random` to draw one from the OS.
    #[arg(long, value_parser = parse_seed)]
    seed: Option<Seed>,
    #[arg(long, value_parser = parse_policy)]
    mixed_policy: Option<MixedPolicy>,
    #[arg(long = "normalize", value_parser = parse_normalize)]
    normalize: Option<NormalizeMode>,
}

#[derive(Args, Debug)]
struct KeyFlags {
    #[arg(long, value_parser = parse_rule)]
    key_mapping: Option<KeyRule>,
    /// Three distinct leaves, e.g. `s12,s21,s22`.
    #[arg(long)]
    keyshare_inputs: Option<String>,
}

#[derive(Clone, Copy, Debug)]
enum Seed {
    Fixed(u64),
    Random,
}

impl Seed {
    fn resolve(self) -> u64 {
        match self {
            Seed::Fixed(s) => s,
            Seed::Random => rand::random(),
        }
    }
}

fn parse_seed(s: &str) -> Result<Seed, String> {
    if s == "random" {
        return Ok(Seed::Random);
    }
    s.parse().map(Seed::Fixed).map_err(|_| format!("expected an unsigned integer or `random`, got {s:?}"))
}

fn parse_policy(s: &str) -> Result<MixedPolicy, String> {
    s.parse().map_err(|e: hvc_core::Error| e.to_string())
}

fn parse_normalize(s: &str) -> Result<NormalizeMode, String> {
    s.parse().map_err(|e: hvc_core::Error| e.to_string())
}

fn parse_rule(s: &str) -> Result<KeyRule, String> {
    s.parse().map_err(|e: hvc_core::Error| e.to_string())
}

fn parse_strategy(s: &str) -> Result<RevealStrategy, String> {
    s.parse().map_err(|e: hvc_core::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<PbmVariant, String> {
    match s {
        "p1" => Ok(PbmVariant::P1),
        "p4" => Ok(PbmVariant::P4),
        _ => Err(format!("expected p1 or p4, got {s:?}")),
    }
}

fn encode_config(flags: &EncodeFlags, base: Option<&Manifest>) -> EncodeConfig {
    EncodeConfig {
        seed: match flags.seed {
            Some(s) => s.resolve(),
            None => base.map_or(0, |m| m.seed),
        },
        mixed_policy: flags.mixed_policy.or(base.map(|m| m.mixed_policy)).unwrap_or_default(),
        normalize_mode: flags.normalize.or(base.map(|m| m.normalize)).unwrap_or_default(),
        execution: Execution::Parallel,
    }
}

fn key_mapping(flags: &KeyFlags, base: Option<&Manifest>) -> Result<KeyMapping> {
    let fallback = base.map(|m| m.mapping).unwrap_or_default();
    let rule = flags.key_mapping.unwrap_or(fallback.rule());
    let inputs = match &flags.keyshare_inputs {
        Some(s) => KeyMapping::parse_inputs(s)?,
        None => fallback.inputs(),
    };
    Ok(KeyMapping::new(rule, inputs)?)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Encode {
            secret,
            out1,
            out2,
            enc,
            format,
        } => {
            let img = load_pbm(&secret)?;
            let cfg = encode_config(&enc, None);
            let pair = encode(&img, &cfg);
            let format = format.unwrap_or_default();
            save_pbm(&pair.share1, &out1, format)?;
            save_pbm(&pair.share2, &out2, format)?;
            println!("normalized={} seed={}", pair.source_dims, cfg.seed);
        }
        Command::EncodeHvc {
            secret,
            outdir,
            enc,
            key,
            format,
        } => {
            let img = load_pbm(&secret)?;
            let cfg = encode_config(&enc, None);
            let mapping = key_mapping(&key, None)?;
            let bundle = hier::encode_hierarchical(&img, &cfg, mapping);
            create_dir(&outdir)?;
            write_bundle(&bundle, &outdir, format.unwrap_or_default())?;
            println!(
                "normalized={} seed={} carrier={}",
                bundle.resized.dims(),
                cfg.seed,
                mapping.carrier()
            );
        }
        Command::Reveal { files, strategy, format } => {
            let (inputs, out) = files.split_at(files.len() - 1);
            let expected = if strategy == RevealStrategy::Chain { 4 } else { 2 };
            if inputs.len() != expected {
                bail!(
                    "strategy {strategy} takes {expected} input shares and one output path, got {} paths",
                    files.len()
                );
            }
            let imgs = inputs.iter().map(load_pbm).collect::<hvc_core::Result<Vec<BinaryImage>>>()?;
            let revealed = match strategy {
                RevealStrategy::Chain => reveal_chain_leaves(&imgs[0], &imgs[1], &imgs[2], &imgs[3])?,
                s => reveal_final(&imgs[0], &imgs[1], s)?,
            };
            save_pbm(&revealed, &out[0], format.unwrap_or_default())?;
        }
        Command::Keyshare {
            a,
            b,
            c,
            out,
            key_mapping,
            format,
        } => {
            let (a, b, c) = (load_pbm(a)?, load_pbm(b)?, load_pbm(c)?);
            let key = generate_key_share(&a, &b, &c, key_mapping)?;
            save_pbm(&key, &out, format.unwrap_or_default())?;
        }
        Command::Analyze { images, output } => {
            let mut rows = Vec::with_capacity(images.len());
            for path in &images {
                let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
                rows.push(analysis::pixel_stats(&load_pbm(path)?, &name));
            }
            let rep = StatsReport { rows };
            match output {
                Some(path) => analysis::write_csv(&rep, path)?,
                None => print!("{}", String::from_utf8(rep.to_csv()?)?),
            }
        }
        Command::Pipeline {
            secret,
            outdir,
            manifest,
            enc,
            key,
            strategy,
            format,
        } => {
            let base = manifest.as_deref().map(Manifest::load).transpose()?;
            let cfg = encode_config(&enc, base.as_ref());
            let settings = Manifest {
                seed: cfg.seed,
                mixed_policy: cfg.mixed_policy,
                normalize: cfg.normalize_mode,
                mapping: key_mapping(&key, base.as_ref())?,
                strategy: strategy
                    .or(base.as_ref().map(|m| m.strategy))
                    .unwrap_or(RevealStrategy::XorDenoise),
                format: format.or(base.as_ref().map(|m| m.format)).unwrap_or_default(),
            };
            pipeline(&secret, &outdir, &settings)?;
        }
    }
    Ok(())
}

fn pipeline(secret: &Path, outdir: &Path, settings: &Manifest) -> Result<()> {
    let out = run_pipeline(secret, outdir, settings, Execution::Parallel)?;
    println!(
        "normalized={} seed={} carrier={} strategy={}",
        out.bundle.resized.dims(),
        settings.seed,
        settings.mapping.carrier(),
        settings.strategy
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
