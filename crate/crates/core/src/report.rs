//! Machine-readable reports for a single spec.

use serde::Serialize;

use crate::canonical_forms::{build_pair, d_total, is_regular, validate, PairViolation, SpecError, SymbolSpec};
use crate::exact_linalg::{ExactMatrix, MatrixSubspace};
use crate::intersection_algebra::{
    check_eta_coupling, closed_form_a_orth, compute_a, operator_is_nilpotent, AlgebraDims, AlgebraError, EtaCoupling,
};
use crate::reduced_symbol::{build_g0_red, omega_in_a, search, CandidateSummary, ReducedDatum, ReducedError, SearchOptions, SplittingReport};
use crate::symbol_algebra::{assemble_symbol, block_representation, SymbolError};
use crate::tanaka_prolongation::{universal, ProlongError, ProlongationReport};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Reduced(#[from] ReducedError),
    #[error(transparent)]
    Prolong(#[from] ProlongError),
}

/// Decimal `(re, im)` pairs for human reading.
pub type FloatMatrix = Vec<Vec<(f64, f64)>>;

#[derive(Clone, Debug, Serialize)]
pub struct CanonReport {
    pub label: String,
    pub n: usize,
    pub h: ExactMatrix,
    pub a: ExactMatrix,
    pub valid: bool,
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub float: Option<CanonFloat>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonFloat {
    pub h: FloatMatrix,
    pub a: FloatMatrix,
}

pub fn canon_report(spec: &SymbolSpec, with_float: bool) -> Result<CanonReport, ReportError> {
    let pair = build_pair(spec)?;
    let violations = match validate(&pair.h, &pair.a) {
        Ok(()) => Vec::new(),
        Err(v) => v.iter().map(describe_violation).collect(),
    };
    let float = with_float.then(|| CanonFloat { h: pair.h.to_f64(), a: pair.a.to_f64() });
    Ok(CanonReport { label: spec.label(), n: spec.n(), valid: violations.is_empty(), violations, h: pair.h, a: pair.a, float })
}

fn describe_violation(v: &PairViolation) -> String {
    format!("{v:?}")
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub k_max: usize,
    pub search: SearchOptions,
    pub with_float: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionSection {
    pub dims: AlgebraDims,
    pub closed_form_matches: bool,
    pub eta_coupling: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct G00Section {
    pub dim: usize,
    /// `{diag(α, −H⁻¹αᵀH) + cI : α ∈ 𝒜}` lies in `g_{0,0}`.
    pub contains_a_representation: bool,
    pub equals_a_representation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    /// `None` when the quantity could not be computed (e.g. prolongation not terminated).
    pub value: Option<usize>,
    pub relation: &'static str,
    pub limit: usize,
    pub pass: bool,
}

impl BoundCheck {
    fn new(name: &'static str, value: Option<usize>, relation: &'static str, limit: usize) -> Self {
        let pass = value.is_some_and(|v| match relation {
            "<" => v < limit,
            "<=" => v <= limit,
            _ => v == limit,
        });
        Self { name, value, relation, limit, pass }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DatumFloat {
    pub omega: FloatMatrix,
    pub mu: (f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct DatumReport {
    pub datum: ReducedDatum,
    pub omega_in_a: bool,
    pub dim_g0red: usize,
    pub splitting: SplittingReport,
    pub g1_zero: bool,
    pub prolongation: ProlongationReport,
    pub bounds: Vec<BoundCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub float: Option<DatumFloat>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchSection {
    /// The search covers a finite lattice and a fixed list of candidate subalgebras.
    pub exhaustive: bool,
    pub candidates: Vec<CandidateSummary>,
    pub data: Vec<DatumReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FullReport {
    pub label: String,
    pub spec: SymbolSpec,
    pub n: usize,
    pub regular: bool,
    pub nilpotent: bool,
    pub d_total: usize,
    pub intersection: IntersectionSection,
    pub g00: G00Section,
    /// Prolongation of `g_- ⊕ g_{0,-2} ⊕ g_{0,0} ⊕ g_{0,2}`.
    pub symbol_prolongation: ProlongationReport,
    pub search: SearchSection,
    pub bounds: Vec<BoundCheck>,
}

pub fn full_report(spec: &SymbolSpec, opts: &ReportOptions) -> Result<FullReport, ReportError> {
    let pair = build_pair(spec)?;
    let (h, a) = (&pair.h, &pair.a);
    let n = spec.n();
    let regular = is_regular(h, a);
    let nilpotent = operator_is_nilpotent(a);
    let dt = d_total(spec);
    let alg = compute_a(h, a)?;
    let intersection = IntersectionSection {
        dims: alg.dims(),
        closed_form_matches: closed_form_a_orth(spec) == alg.orth,
        eta_coupling: match check_eta_coupling(&alg, a) {
            EtaCoupling::Coupled => "coupled",
            EtaCoupling::Uncoupled => "uncoupled",
            EtaCoupling::Nilpotent => "nilpotent",
        },
    };
    let sym = assemble_symbol(spec)?;
    let h_inv = h.inverse().expect("validated form");
    let mut reps: Vec<ExactMatrix> = alg.full.basis().iter().map(|al| block_representation(al, h, &h_inv)).collect();
    reps.push(ExactMatrix::identity(2 * h.rows()));
    let from_a = MatrixSubspace::span(sym.g00.shape(), &reps).map_err(AlgebraError::from)?;
    let g00 = G00Section {
        dim: sym.g00.dim(),
        contains_a_representation: from_a.is_subspace_of(&sym.g00),
        equals_a_representation: from_a == sym.g00,
    };
    let symbol_prolongation = universal(&sym.space, &sym.g0(), opts.k_max)?;

    let outcome = search(spec, &opts.search)?;
    let sharp = (n - 1) * (n - 1) + 7;
    let cap = dt + 2 * n + if nilpotent { 4 } else { 3 };
    let mut data = Vec::with_capacity(outcome.data.len());
    for d in outcome.data {
        let red = build_g0_red(h, a, &d)?;
        let prolongation = universal(&red.space, &red.g0red, opts.k_max)?;
        let g1_zero = prolongation.dims.get(1).is_none_or(|&x| x == 0);
        let total = prolongation.universal_dim_value();
        let bounds = if regular {
            Vec::new()
        } else {
            vec![
                BoundCheck::new("(n-1)^2+7", total, "<", sharp),
                BoundCheck::new(if nilpotent { "d_total+2n+4" } else { "d_total+2n+3" }, total, "<=", cap),
            ]
        };
        let float = opts.with_float.then(|| DatumFloat { omega: d.omega.to_f64(), mu: d.mu.to_f64_pair() });
        data.push(DatumReport {
            omega_in_a: omega_in_a(h, a, &d.omega)?,
            dim_g0red: red.dim_g0red(),
            splitting: red.splitting()?,
            g1_zero,
            prolongation,
            bounds,
            float,
            datum: d,
        });
    }

    let mut bounds = vec![BoundCheck::new("n^2+7", symbol_prolongation.universal_dim_value(), "<=", n * n + 7)];
    if n >= 4 {
        bounds.push(BoundCheck::new("n^2-4n+6", Some(alg.full.dim()), "<=", n * n - 4 * n + 6));
    }
    Ok(FullReport {
        label: spec.label(),
        spec: spec.clone(),
        n,
        regular,
        nilpotent,
        d_total: dt,
        intersection,
        g00,
        symbol_prolongation,
        search: SearchSection { exhaustive: false, candidates: outcome.candidates, data },
        bounds,
    })
}

/// Whether every bound in the report holds.
pub fn bounds_hold(r: &FullReport) -> bool {
    r.bounds.iter().all(|b| b.pass) && r.search.data.iter().all(|d| d.bounds.iter().all(|b| b.pass))
}
