//! Canonical spec enumeration and the on-disk catalog used for verification runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canonical_forms::{build_pair, d_total, is_regular, BlockSpec, Sign, SpecError, SymbolSpec};
use crate::exact_linalg::GaussianRational;
use crate::intersection_algebra::operator_is_nilpotent;

type Q = GaussianRational;

/// The eigenvalues the shipped catalog draws from.
pub fn standard_lambdas() -> Vec<Q> {
    vec![
        Q::from_int(0),
        Q::from_int(1),
        Q::from_int(2),
        Q::from_int(3),
        Q::i(),
        Q::from_ints(0, 2),
        Q::from_ints(1, 1),
    ]
}

/// Every block `(λ, m, ε)` with `λ` from `lambdas` and block size at most `max_size`,
/// in a fixed order.
fn block_types(lambdas: &[Q], max_size: usize) -> Vec<BlockSpec> {
    let mut out = Vec::new();
    for size in 1..=max_size {
        for l in lambdas {
            let m = if l.is_real() {
                size
            } else if size % 2 == 0 {
                size / 2
            } else {
                continue;
            };
            for e in [Sign::Plus, Sign::Minus] {
                out.push(BlockSpec::new(l.clone(), m, e));
            }
        }
    }
    out
}

/// All canonical specs with `n − 1 = size`, as multisets of blocks, excluding `A = 0`.
pub fn enumerate_specs(size: usize, lambdas: &[Q]) -> Vec<SymbolSpec> {
    let types = block_types(lambdas, size);
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn walk(types: &[BlockSpec], start: usize, left: usize, current: &mut Vec<BlockSpec>, out: &mut Vec<SymbolSpec>) {
        if left == 0 {
            if let Ok(s) = SymbolSpec::new(current.clone()) {
                out.push(s);
            }
            return;
        }
        for (i, b) in types.iter().enumerate().skip(start) {
            if b.size() <= left {
                current.push(b.clone());
                walk(types, i, left - b.size(), current, out);
                current.pop();
            }
        }
    }
    walk(&types, 0, size, &mut current, &mut out);
    out
}

/// Values a catalog entry is checked against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub regular: bool,
    pub nilpotent: bool,
    pub d_total: usize,
}

impl Expected {
    pub fn of(spec: &SymbolSpec) -> Result<Self, SpecError> {
        let pair = build_pair(spec)?;
        Ok(Self { regular: is_regular(&pair.h, &pair.a), nilpotent: operator_is_nilpotent(&pair.a), d_total: d_total(spec) })
    }
}

/// The set a catalog entry belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogSet {
    /// Regularity and intersection-algebra checks.
    Main,
    /// Non-regular specs fed to the reduced-datum search.
    NonRegular,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: String,
    pub set: CatalogSet,
    /// How the entry was chosen: `exhaustive`, `sampled`, or a family name.
    pub source: String,
    pub expected: Expected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub entries: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("manifest {path} is malformed: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("catalog entry {id} ({path}) is invalid: {source}")]
    Spec { id: String, path: String, source: SpecError },
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub set: CatalogSet,
    pub source: String,
    pub expected: Expected,
    pub spec: SymbolSpec,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn load(dir: &Path) -> Result<Self, CatalogError> {
        let path = dir.join(MANIFEST_FILE);
        let text = read(&path)?;
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|e| CatalogError::Manifest { path: path.clone(), message: e.to_string() })?;
        let mut entries = Vec::with_capacity(manifest.entries.len());
        for e in manifest.entries {
            let text = read(&dir.join(&e.path))?;
            let spec = SymbolSpec::from_json(&text)
                .map_err(|source| CatalogError::Spec { id: e.id.clone(), path: e.path.clone(), source })?;
            entries.push(CatalogEntry { id: e.id, set: e.set, source: e.source, expected: e.expected, spec });
        }
        Ok(Self { entries })
    }

    pub fn in_set(&self, set: CatalogSet) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(move |e| e.set == set)
    }
}

fn read(path: &Path) -> Result<String, CatalogError> {
    fs::read_to_string(path).map_err(|e| CatalogError::Io { path: path.to_path_buf(), message: e.to_string() })
}

/// A family name with the `(λ, m, ε)` triples of one spec.
pub type Family = (&'static str, Vec<(Q, usize, i64)>);

/// Non-regular specs searched for reduced data, by family.
pub fn nonregular_families() -> Vec<Family> {
    let z = |x: i64| Q::from_int(x);
    vec![
        ("diagonal", vec![(z(1), 1, 1), (z(2), 1, 1)]),
        ("diagonal", vec![(z(1), 1, 1), (z(2), 1, -1)]),
        ("diagonal", vec![(z(1), 1, 1), (z(2), 1, 1), (z(0), 1, 1)]),
        ("diagonal", vec![(z(1), 1, 1), (z(2), 1, 1), (z(3), 1, 1)]),
        ("nilpotent_block", vec![(z(0), 2, 1), (z(1), 1, 1)]),
        ("nilpotent_block", vec![(z(0), 2, 1), (z(2), 1, -1)]),
        ("nilpotent_block", vec![(z(0), 2, 1), (z(1), 1, 1), (z(0), 1, 1)]),
        ("nilpotent_block", vec![(z(0), 3, 1), (z(1), 1, 1)]),
        ("nilpotent_block", vec![(z(0), 2, 1), (Q::i(), 1, 1)]),
        ("jordan_block", vec![(z(1), 2, 1)]),
        ("jordan_block", vec![(z(2), 2, 1)]),
        ("jordan_block", vec![(z(1), 2, 1), (z(0), 1, 1)]),
        ("jordan_block", vec![(z(1), 3, 1)]),
        ("non_real_block", vec![(Q::from_ints(1, 1), 1, 1)]),
        ("non_real_block", vec![(Q::i(), 1, 1), (z(1), 1, 1)]),
        ("non_real_block", vec![(Q::i(), 2, 1)]),
        ("non_real_block", vec![(Q::i(), 1, 1), (z(0), 2, 1)]),
    ]
}

pub const SAMPLE_SEED: u64 = 20_260_101;
pub const SAMPLE_PER_SIZE: usize = 25;

/// The catalog as `(entry, spec json)` pairs: every spec with `n − 1 ≤ 3`, a seeded
/// sample for `n − 1 ∈ {4, 5, 6}`, and the non-regular families.
pub fn generate() -> Result<Vec<(ManifestEntry, String)>, SpecError> {
    let lambdas = standard_lambdas();
    let mut chosen: Vec<(SymbolSpec, CatalogSet, String)> = Vec::new();
    for size in 1..=3 {
        chosen.extend(enumerate_specs(size, &lambdas).into_iter().map(|s| (s, CatalogSet::Main, "exhaustive".to_string())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    for size in 4..=6 {
        let all = enumerate_specs(size, &lambdas);
        let mut picks = sample(&mut rng, all.len(), SAMPLE_PER_SIZE.min(all.len())).into_vec();
        picks.sort_unstable();
        chosen.extend(picks.into_iter().map(|i| (all[i].clone(), CatalogSet::Main, "sampled".to_string())));
    }
    for (family, triples) in nonregular_families() {
        chosen.push((SymbolSpec::from_triples(&triples)?, CatalogSet::NonRegular, family.to_string()));
    }
    let mut counters: BTreeMap<CatalogSet, usize> = BTreeMap::new();
    chosen
        .into_iter()
        .map(|(spec, set, source)| {
            let k = counters.entry(set).or_insert(0);
            *k += 1;
            let prefix = match set {
                CatalogSet::Main => "main",
                CatalogSet::NonRegular => "nonregular",
            };
            let id = format!("{prefix}-{:04}", k);
            let entry =
                ManifestEntry { path: format!("specs/{id}.json"), id, set, source, expected: Expected::of(&spec)? };
            Ok((entry, pretty_spec(&spec)))
        })
        .collect()
}

fn pretty_spec(spec: &SymbolSpec) -> String {
    let value: serde_json::Value = serde_json::from_str(&spec.to_json()).expect("spec json");
    serde_json::to_string_pretty(&value).expect("spec json") + "\n"
}

/// Write the generated catalog under `dir`, replacing its manifest and spec files.
pub fn write_catalog(dir: &Path) -> Result<usize, CatalogError> {
    let generated = generate().map_err(|source| CatalogError::Spec { id: "generated".into(), path: String::new(), source })?;
    let specs = dir.join("specs");
    let io = |path: &Path, e: std::io::Error| CatalogError::Io { path: path.to_path_buf(), message: e.to_string() };
    if specs.exists() {
        fs::remove_dir_all(&specs).map_err(|e| io(&specs, e))?;
    }
    fs::create_dir_all(&specs).map_err(|e| io(&specs, e))?;
    let mut entries = Vec::with_capacity(generated.len());
    for (entry, text) in generated {
        let p = dir.join(&entry.path);
        fs::write(&p, text).map_err(|e| io(&p, e))?;
        entries.push(entry);
    }
    let count = entries.len();
    let manifest = Manifest { version: 1, entries };
    let p = dir.join(MANIFEST_FILE);
    fs::write(&p, serde_json::to_string_pretty(&manifest).expect("manifest json") + "\n").map_err(|e| io(&p, e))?;
    Ok(count)
}
