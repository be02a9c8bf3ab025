//! The paper-level checks run by `crsym verify-paper` and the acceptance tests.

use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::canonical_forms::{build_pair, d_total, is_regular, SymbolSpec};
use crate::catalog::{enumerate_specs, standard_lambdas, Catalog, CatalogEntry, CatalogSet};
use crate::exact_linalg::{float_rank, ExactMatrix, GaussianRational, MatrixSubspace};
use crate::intersection_algebra::{check_eta_coupling, closed_form_a_orth, compute_a, operator_is_nilpotent};
use crate::reduced_symbol::{build_g0_red, check_invariants, search, SearchOptions};
use crate::symbol_algebra::{assemble_symbol, compute_g00, involution, involution_matrix, is_lie_algebra};
use crate::tanaka_prolongation::{first_prolongation_dim, universal, DEFAULT_K_MAX};

type Q = GaussianRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Criterion {
    Regularity,
    IntersectionDims,
    MaximalIntersection,
    MaximalProlongation,
    NonRegularVanishing,
    Properties,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::Regularity,
        Criterion::IntersectionDims,
        Criterion::MaximalIntersection,
        Criterion::MaximalProlongation,
        Criterion::NonRegularVanishing,
        Criterion::Properties,
    ];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Regularity => "regularity equivalence",
            Criterion::IntersectionDims => "intersection algebra dimensions",
            Criterion::MaximalIntersection => "maximal intersection algebra",
            Criterion::MaximalProlongation => "prolongation of maximal regular symbols",
            Criterion::NonRegularVanishing => "non-regular first prolongation",
            Criterion::Properties => "property suites",
        }
    }

    /// Words a `--filter` value is matched against.
    pub fn tags(self) -> &'static [&'static str] {
        match self {
            Criterion::Regularity => &["regularity", "symbol"],
            Criterion::IntersectionDims => &["intersection", "closed-form"],
            Criterion::MaximalIntersection => &["intersection", "maximal", "exhaustive"],
            Criterion::MaximalProlongation => &["prolongation", "maximal"],
            Criterion::NonRegularVanishing => &["prolongation", "reduced", "search"],
            Criterion::Properties => &["properties", "leibniz", "involution", "float"],
        }
    }

    pub fn matches(self, filter: &str) -> bool {
        let f = filter.to_ascii_lowercase();
        f == self.number().to_string() || self.name().contains(&f) || self.tags().iter().any(|t| t.contains(&f))
    }
}

/// Criteria selected by a comma-separated filter; `None` selects all.
pub fn select(filter: Option<&str>) -> Vec<Criterion> {
    match filter {
        None => Criterion::ALL.to_vec(),
        Some(f) => {
            let parts: Vec<&str> = f.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            Criterion::ALL.into_iter().filter(|c| parts.iter().any(|p| c.matches(p))).collect()
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub k_max: usize,
    pub search: SearchOptions,
    pub exhaustive_sizes: Vec<usize>,
    pub float_samples: usize,
    pub float_seed: u64,
    pub float_tolerance: f64,
    pub min_catalog: usize,
    pub min_specs_with_data: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            k_max: DEFAULT_K_MAX,
            search: SearchOptions::default(),
            exhaustive_sizes: vec![3, 4, 5],
            float_samples: 100,
            float_seed: 7,
            float_tolerance: 1e-9,
            min_catalog: 200,
            min_specs_with_data: 5,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub criterion: u8,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub failures: Vec<String>,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {} ({}): {} in {:.1}s: {}",
            self.criterion,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.summary
        )
    }
}

/// Failures are listed up to this many per criterion.
const MAX_LISTED: usize = 20;

struct Tally {
    failures: Vec<String>,
    failed: usize,
}

impl Tally {
    fn new() -> Self {
        Self { failures: Vec::new(), failed: 0 }
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < MAX_LISTED {
            self.failures.push(msg);
        }
    }

    fn absorb(&mut self, msgs: Vec<String>) {
        for m in msgs {
            self.fail(m);
        }
    }
}

pub fn run(c: Criterion, catalog: &Catalog, opts: &VerifyOptions) -> CriterionOutcome {
    let start = Instant::now();
    let (summary, tally) = match c {
        Criterion::Regularity => regularity(catalog, opts),
        Criterion::IntersectionDims => intersection_dims(catalog),
        Criterion::MaximalIntersection => maximal_intersection(opts),
        Criterion::MaximalProlongation => maximal_prolongation(opts),
        Criterion::NonRegularVanishing => nonregular_vanishing(catalog, opts),
        Criterion::Properties => properties(catalog, opts),
    };
    CriterionOutcome {
        criterion: c.number(),
        name: c.name(),
        passed: tally.failed == 0,
        summary,
        failures: tally.failures,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn main_entries(catalog: &Catalog) -> Vec<&CatalogEntry> {
    catalog.in_set(CatalogSet::Main).collect()
}

fn regularity(catalog: &Catalog, opts: &VerifyOptions) -> (String, Tally) {
    let entries = main_entries(catalog);
    let mut t = Tally::new();
    if entries.len() < opts.min_catalog {
        t.fail(format!("catalog has {} main specs, need {}", entries.len(), opts.min_catalog));
    }
    let lambdas = standard_lambdas();
    let results: Vec<Vec<String>> = entries
        .par_iter()
        .map(|e| {
            let mut out = Vec::new();
            if e.spec.size() > 6 || e.spec.blocks.iter().any(|b| !lambdas.contains(&b.lambda)) {
                out.push(format!("{}: outside the catalog range", e.id));
            }
            let sym = match assemble_symbol(&e.spec) {
                Ok(s) => s,
                Err(err) => return vec![format!("{}: {err}", e.id)],
            };
            let lie = is_lie_algebra(&sym);
            let regular = is_regular(&sym.pair.h, &sym.pair.a);
            if lie != regular {
                out.push(format!("{} {}: subalgebra {lie}, regular {regular}", e.id, e.spec.label()));
            }
            if regular != e.expected.regular {
                out.push(format!("{}: manifest says regular = {}", e.id, e.expected.regular));
            }
            out
        })
        .collect();
    for r in results {
        t.absorb(r);
    }
    let regular = entries.iter().filter(|e| e.expected.regular).count();
    (format!("{} specs ({} regular), {} mismatches", entries.len(), regular, t.failed), t)
}

fn intersection_dims(catalog: &Catalog) -> (String, Tally) {
    let entries = main_entries(catalog);
    let mut t = Tally::new();
    let results: Vec<Vec<String>> = entries
        .par_iter()
        .map(|e| {
            let mut out = Vec::new();
            let pair = match build_pair(&e.spec) {
                Ok(p) => p,
                Err(err) => return vec![format!("{}: {err}", e.id)],
            };
            let alg = match compute_a(&pair.h, &pair.a) {
                Ok(a) => a,
                Err(err) => return vec![format!("{}: {err}", e.id)],
            };
            let dims = alg.dims();
            let dt = d_total(&e.spec);
            if dims.orth != dt {
                out.push(format!("{} {}: dim orth {} but d_total {}", e.id, e.spec.label(), dims.orth, dt));
            }
            let nilpotent = operator_is_nilpotent(&pair.a);
            if (dims.full - dims.orth == 2) != nilpotent {
                out.push(format!(
                    "{} {}: dim full - dim orth = {} with nilpotent = {nilpotent}",
                    e.id,
                    e.spec.label(),
                    dims.full - dims.orth
                ));
            }
            if closed_form_a_orth(&e.spec) != alg.orth {
                out.push(format!("{} {}: closed form differs from the solved orth", e.id, e.spec.label()));
            }
            if dt != e.expected.d_total || nilpotent != e.expected.nilpotent {
                out.push(format!("{}: manifest expectations disagree", e.id));
            }
            out
        })
        .collect();
    for r in results {
        t.absorb(r);
    }
    (format!("{} specs, {} mismatches", entries.len(), t.failed), t)
}

/// `J_{0,2} ⊕ J_{0,1} ⊕ … ⊕ J_{0,1}` in any block order and with any signs.
pub fn is_maximal_shape(spec: &SymbolSpec) -> bool {
    spec.blocks.iter().all(|b| b.lambda.is_zero() && b.m <= 2) && spec.blocks.iter().filter(|b| b.m == 2).count() == 1
}

fn maximal_intersection(opts: &VerifyOptions) -> (String, Tally) {
    let lambdas = standard_lambdas();
    let mut t = Tally::new();
    let mut counts = Vec::new();
    for &size in &opts.exhaustive_sizes {
        let n = size as i64 + 1;
        let bound = (n * n - 4 * n + 6) as usize;
        let specs = enumerate_specs(size, &lambdas);
        let results: Vec<Vec<String>> = specs
            .par_iter()
            .map(|s| {
                let pair = build_pair(s).expect("enumerated specs are valid");
                let dim = match compute_a(&pair.h, &pair.a) {
                    Ok(a) => a.full.dim(),
                    Err(err) => return vec![format!("{}: {err}", s.label())],
                };
                let mut out = Vec::new();
                if dim > bound {
                    out.push(format!("{}: dim {dim} exceeds {bound}", s.label()));
                }
                if (dim == bound) != is_maximal_shape(s) {
                    out.push(format!("{}: dim {dim}, bound {bound}, maximal shape {}", s.label(), is_maximal_shape(s)));
                }
                out
            })
            .collect();
        counts.push(format!("n-1={size}: {}", specs.len()));
        for r in results {
            t.absorb(r);
        }
    }
    (format!("{} specs checked, {} violations", counts.join(", "), t.failed), t)
}

/// The maximal regular spec for each `n` together with the expected universal dimension.
pub fn maximal_regular_specs() -> Vec<(usize, SymbolSpec, usize)> {
    let z = |x: i64| Q::from_int(x);
    let mut out = vec![(2, SymbolSpec::from_triples(&[(z(1), 1, 1)]).expect("valid"), 10)];
    for n in 3..=5usize {
        let mut t = vec![(z(0), 2, 1)];
        t.extend(std::iter::repeat_n((z(0), 1, 1), n - 3));
        out.push((n, SymbolSpec::from_triples(&t).expect("valid"), n * n + 7));
    }
    out
}

fn maximal_prolongation(opts: &VerifyOptions) -> (String, Tally) {
    let mut t = Tally::new();
    let k_max = opts.k_max.max(4);
    let results: Vec<(String, Vec<String>)> = maximal_regular_specs()
        .par_iter()
        .map(|(n, spec, expected)| {
            let sym = match assemble_symbol(spec) {
                Ok(s) => s,
                Err(err) => return (String::new(), vec![format!("n={n}: {err}")]),
            };
            let report = match universal(&sym.space, &sym.g0(), k_max) {
                Ok(r) => r,
                Err(err) => return (String::new(), vec![format!("n={n}: {err}")]),
            };
            let got = report.universal_dim_value();
            let mut out = Vec::new();
            if got != Some(*expected) {
                out.push(format!(
                    "n={n}: universal dim {} (dims {:?}), expected {expected}",
                    got.map_or("not reached".to_string(), |d| d.to_string()),
                    report.dims
                ));
            }
            if report.dims.get(3).copied().unwrap_or(0) != 0 || report.first_zero.is_none_or(|k| k > 3) {
                out.push(format!("n={n}: dim g_3 = {:?}", report.dims.get(3)));
            }
            if !report.leibniz_ok || !report.persistence_ok {
                out.push(format!("n={n}: internal prolongation check failed"));
            }
            (format!("n={n} dims {:?}", report.dims), out)
        })
        .collect();
    let mut seen = Vec::new();
    for (s, r) in results {
        if !s.is_empty() {
            seen.push(s);
        }
        t.absorb(r);
    }
    (seen.join("; "), t)
}

struct SpecSearch {
    id: String,
    label: String,
    data: usize,
    failures: Vec<String>,
}

fn nonregular_vanishing(catalog: &Catalog, opts: &VerifyOptions) -> (String, Tally) {
    let entries: Vec<&CatalogEntry> = catalog.in_set(CatalogSet::NonRegular).collect();
    let results: Vec<SpecSearch> = entries.par_iter().map(|e| search_one(e, opts)).collect();
    let mut t = Tally::new();
    let mut with_data = 0;
    let mut total = 0;
    let mut skipped = Vec::new();
    for r in results {
        if r.data == 0 {
            skipped.push(r.id.clone());
        } else {
            with_data += 1;
            total += r.data;
        }
        t.absorb(r.failures);
        let _ = r.label;
    }
    if with_data < opts.min_specs_with_data {
        t.fail(format!("only {with_data} specs with data, need {}", opts.min_specs_with_data));
    }
    (
        format!(
            "{} specs, {with_data} with data ({total} data), skipped: [{}], {} failures",
            entries.len(),
            skipped.join(", "),
            t.failed
        ),
        t,
    )
}

fn search_one(e: &CatalogEntry, opts: &VerifyOptions) -> SpecSearch {
    let label = e.spec.label();
    let fail = |msg: String| SpecSearch { id: e.id.clone(), label: label.clone(), data: 0, failures: vec![msg] };
    let pair = match build_pair(&e.spec) {
        Ok(p) => p,
        Err(err) => return fail(format!("{}: {err}", e.id)),
    };
    if is_regular(&pair.h, &pair.a) {
        return fail(format!("{} {label}: spec is regular", e.id));
    }
    let outcome = match search(&e.spec, &opts.search) {
        Ok(o) => o,
        Err(err) => return fail(format!("{}: {err}", e.id)),
    };
    let n = e.spec.n();
    let nilpotent = operator_is_nilpotent(&pair.a);
    let cap = d_total(&e.spec) + 2 * n + if nilpotent { 4 } else { 3 };
    let sharp = (n - 1) * (n - 1) + 7;
    let mut failures = Vec::new();
    for (k, d) in outcome.data.iter().enumerate() {
        let red = match build_g0_red(&pair.h, &pair.a, d) {
            Ok(r) => r,
            Err(err) => {
                failures.push(format!("{} datum {k}: {err}", e.id));
                continue;
            }
        };
        match first_prolongation_dim(&red.space, &red.g0red) {
            Ok(0) => {}
            Ok(g1) => failures.push(format!("{} {label} datum {k} (omega {}, mu {}): dim g_1 = {g1}", e.id, flat(&d.omega), d.mu)),
            Err(err) => failures.push(format!("{} datum {k}: {err}", e.id)),
        }
        let total = red.space.total_dim() + red.dim_g0red();
        if total >= sharp || total > cap {
            failures.push(format!("{} {label} datum {k}: dim {total} against bounds {sharp} and {cap}", e.id));
        }
    }
    SpecSearch { id: e.id.clone(), label, data: outcome.data.len(), failures }
}

fn flat(m: &ExactMatrix) -> String {
    let rows: Vec<String> =
        m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join("; "))
}

/// A random `rows × cols` matrix of rank at most `rank` with small Gaussian-integer factors.
pub fn random_low_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank: usize) -> ExactMatrix {
    let entry = |rng: &mut ChaCha8Rng| Q::from_ints(rng.gen_range(-3..=3), rng.gen_range(-2..=2));
    let left = ExactMatrix::from_fn(rows, rank, |_, _| entry(rng));
    let right = ExactMatrix::from_fn(rank, cols, |_, _| entry(rng));
    &left * &right
}

fn properties(catalog: &Catalog, opts: &VerifyOptions) -> (String, Tally) {
    let mut t = Tally::new();
    let small: Vec<&CatalogEntry> = catalog.in_set(CatalogSet::Main).filter(|e| e.spec.size() <= 3).collect();
    let results: Vec<Vec<String>> = small
        .par_iter()
        .map(|e| {
            let mut out = Vec::new();
            let sym = match assemble_symbol(&e.spec) {
                Ok(s) => s,
                Err(err) => return vec![format!("{}: {err}", e.id)],
            };
            if sym.x_minus != involution(&sym.x_plus) {
                out.push(format!("{}: X- is not the involution of X+", e.id));
            }
            if !involution_closed(&sym.g00) {
                out.push(format!("{}: g00 not involution invariant", e.id));
            }
            let (h, a) = (&sym.pair.h, &sym.pair.a);
            match compute_g00(h, a) {
                Ok(g) if g == sym.g00 => {}
                _ => out.push(format!("{}: g00 differs between constructions", e.id)),
            }
            match compute_a(h, a) {
                Ok(alg) => {
                    if !alg.full.is_commutator_closed() {
                        out.push(format!("{}: intersection algebra not closed", e.id));
                    }
                    if !check_eta_coupling(&alg, a).holds() {
                        out.push(format!("{}: eta and eta' differ for non-nilpotent A", e.id));
                    }
                    for a0 in [&alg.full, &alg.orth] {
                        if !check_invariants(h, a0, &alg.full).all() {
                            out.push(format!("{}: candidate subalgebra fails its invariants", e.id));
                        }
                    }
                }
                Err(err) => out.push(format!("{}: {err}", e.id)),
            }
            if e.spec.size() <= 2 {
                match universal(&sym.space, &sym.g0(), 3) {
                    Ok(r) if r.leibniz_ok && r.persistence_ok => {}
                    Ok(_) => out.push(format!("{}: prolongation element breaks Leibniz", e.id)),
                    Err(err) => out.push(format!("{}: {err}", e.id)),
                }
            }
            out
        })
        .collect();
    for r in results {
        t.absorb(r);
    }
    let nonregular: Vec<&CatalogEntry> = catalog.in_set(CatalogSet::NonRegular).collect();
    let reduced: Vec<Vec<String>> = nonregular
        .par_iter()
        .map(|e| {
            let mut out = Vec::new();
            let pair = match build_pair(&e.spec) {
                Ok(p) => p,
                Err(err) => return vec![format!("{}: {err}", e.id)],
            };
            let options = SearchOptions { limit: 2, ..opts.search.clone() };
            let Ok(found) = search(&e.spec, &options) else {
                return vec![format!("{}: search failed", e.id)];
            };
            for d in &found.data {
                match build_g0_red(&pair.h, &pair.a, d).and_then(|r| r.splitting().map(|s| (r, s))) {
                    Ok((red, s)) => {
                        if !s.all() {
                            out.push(format!("{}: splitting properties {s:?}", e.id));
                        }
                        if !involution_closed(&red.g0red) {
                            out.push(format!("{}: g0red not involution invariant", e.id));
                        }
                        match universal(&red.space, &red.g0red, 2) {
                            Ok(r) if r.leibniz_ok => {}
                            _ => out.push(format!("{}: reduced prolongation breaks Leibniz", e.id)),
                        }
                    }
                    Err(err) => out.push(format!("{}: {err}", e.id)),
                }
            }
            out
        })
        .collect();
    for r in reduced {
        t.absorb(r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.float_seed);
    for k in 0..opts.float_samples {
        let rows = rng.gen_range(1..=8);
        let cols = rng.gen_range(1..=8);
        let rank = rng.gen_range(0..=rows.min(cols));
        let m = random_low_rank(&mut rng, rows, cols, rank);
        let exact = m.rank();
        let float = float_rank(&m, opts.float_tolerance);
        if exact != float {
            t.fail(format!("random matrix {k} ({rows}x{cols}): exact rank {exact}, float rank {float}"));
        }
    }
    (
        format!(
            "{} symbols, {} non-regular searches, {} random ranks, {} failures",
            small.len(),
            nonregular.len(),
            opts.float_samples,
            t.failed
        ),
        t,
    )
}

fn involution_closed(space: &MatrixSubspace) -> bool {
    space.basis().iter().all(|m| space.contains(&involution_matrix(m)))
}
