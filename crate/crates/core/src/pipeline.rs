//! End-to-end run: hierarchy, reveal, statistics and a replayable manifest.
//!
//! The manifest is a flat `key=value` text file recording every setting that
//! affects output bytes. Re-running with the same secret and manifest
//! reproduces every file byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{self, StatsReport};
use crate::bitmap::{load_pbm, save_pbm, NormalizeMode, PbmVariant};
use crate::codec::MixedPolicy;
use crate::error::{Error, Result};
use crate::hvc::{encode_hierarchical, reveal_bundle, HierarchyBundle, KeyMapping, KeyRule, RevealStrategy};
use crate::rng::GENERATOR_ID;
use crate::vc2::{EncodeConfig, Execution};

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const STATS_FILE: &str = "stats.csv";
pub const CONCENTRATION_FILE: &str = "concentration.csv";

/// PBM outputs of a pipeline run, by file stem.
pub const IMAGE_FILES: [&str; 9] = ["s1", "s2", "s11", "s12", "s21", "s22", "keyshare", "carrier", "revealed"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub seed: u64,
    pub mixed_policy: MixedPolicy,
    pub normalize: NormalizeMode,
    pub mapping: KeyMapping,
    pub strategy: RevealStrategy,
    pub format: PbmVariant,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            seed: 0,
            mixed_policy: MixedPolicy::PaperRandom,
            normalize: NormalizeMode::Scale,
            mapping: KeyMapping::default(),
            strategy: RevealStrategy::XorDenoise,
            format: PbmVariant::P4,
        }
    }
}

const KEYS: [&str; 8] = [
    "generator",
    "seed",
    "mixed_policy",
    "normalize",
    "key_mapping",
    "keyshare_inputs",
    "strategy",
    "format",
];

impl Manifest {
    pub fn encode_config(&self, execution: Execution) -> EncodeConfig {
        EncodeConfig {
            seed: self.seed,
            mixed_policy: self.mixed_policy,
            normalize_mode: self.normalize,
            execution,
        }
    }

    pub fn render(&self, secret: &Path) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "generator={GENERATOR_ID}");
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "mixed_policy={}", self.mixed_policy);
        let _ = writeln!(out, "normalize={}", self.normalize);
        let _ = writeln!(out, "key_mapping={}", self.mapping.rule());
        let _ = writeln!(out, "keyshare_inputs={}", self.mapping.inputs_csv());
        let _ = writeln!(out, "strategy={}", self.strategy);
        let _ = writeln!(out, "format={}", self.format);
        let _ = writeln!(out, "secret={}", secret.display());
        out
    }

    /// `secret` is informational and ignored; any other unknown key is an
    /// error, as is a generator other than this build's.
    pub fn parse(text: &str) -> Result<Manifest> {
        let mut fields = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Manifest(format!("line {}: expected key=value", n + 1)))?;
            if k == "secret" {
                continue;
            }
            if !KEYS.contains(&k) {
                return Err(Error::Manifest(format!("line {}: unknown key {k:?}", n + 1)));
            }
            fields.insert(k, v.trim().to_owned());
        }
        let get = |k: &str| {
            fields
                .get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::Manifest(format!("missing {k:?}")))
        };
        let generator = get("generator")?;
        if generator != GENERATOR_ID {
            return Err(Error::Manifest(format!(
                "generator {generator:?} is not supported (this build uses {GENERATOR_ID})"
            )));
        }
        let seed = get("seed")?;
        let rule: KeyRule = get("key_mapping")?.parse()?;
        let inputs = KeyMapping::parse_inputs(get("keyshare_inputs")?)?;
        Ok(Manifest {
            seed: seed
                .parse()
                .map_err(|_| Error::Manifest(format!("seed {seed:?} is not an unsigned integer")))?,
            mixed_policy: get("mixed_policy")?.parse()?,
            normalize: get("normalize")?.parse()?,
            mapping: KeyMapping::new(rule, inputs)?,
            strategy: get("strategy")?.parse()?,
            format: get("format")?.parse()?,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Manifest> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Manifest::parse(&text)
    }
}

pub struct PipelineOutput {
    pub bundle: HierarchyBundle,
    pub report: StatsReport,
    /// Every file written, in write order.
    pub files: Vec<PathBuf>,
}

fn write_file(path: PathBuf, bytes: &[u8], files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, bytes).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    files.push(path);
    Ok(())
}

/// Writes the four leaves, both level-1 shares, key share and carrier.
pub fn write_bundle(bundle: &HierarchyBundle, outdir: &Path, format: PbmVariant) -> Result<Vec<PathBuf>> {
    let images = [
        &bundle.s1,
        &bundle.s2,
        &bundle.s11,
        &bundle.s12,
        &bundle.s21,
        &bundle.s22,
        &bundle.key_share,
        &bundle.carrier,
    ];
    let mut files = Vec::new();
    for (stem, img) in IMAGE_FILES.iter().zip(images) {
        let path = outdir.join(format!("{stem}.pbm"));
        save_pbm(img, &path, format)?;
        files.push(path);
    }
    Ok(files)
}

pub fn run_pipeline(secret_path: &Path, outdir: &Path, settings: &Manifest, execution: Execution) -> Result<PipelineOutput> {
    let secret = load_pbm(secret_path)?;
    let bundle = encode_hierarchical(&secret, &settings.encode_config(execution), settings.mapping);
    let revealed = reveal_bundle(&bundle, settings.strategy);
    let report = analysis::report(&bundle, &secret, &revealed);

    std::fs::create_dir_all(outdir).map_err(|source| Error::Io {
        path: outdir.to_owned(),
        source,
    })?;
    let mut files = write_bundle(&bundle, outdir, settings.format)?;
    let revealed_path = outdir.join("revealed.pbm");
    save_pbm(&revealed, &revealed_path, settings.format)?;
    files.push(revealed_path);
    write_file(outdir.join(STATS_FILE), &report.to_csv()?, &mut files)?;
    write_file(outdir.join(CONCENTRATION_FILE), &report.concentration_csv()?, &mut files)?;
    write_file(outdir.join(MANIFEST_FILE), settings.render(secret_path).as_bytes(), &mut files)?;
    Ok(PipelineOutput { bundle, report, files })
}
