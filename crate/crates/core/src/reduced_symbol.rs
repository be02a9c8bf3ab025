//! Reduced modified CR symbols in matrix form: the datum `(Ω, 𝒜₀, η, μ)`, its
//! defining system of relations, the algebra `g_0^red` it generates, and a
//! bounded search for data.

use std::collections::BTreeSet;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::canonical_forms::{build_pair, validate, SymbolSpec};
use crate::exact_linalg::{
    solve_with_scalars, Constraint, ExactMatrix, GaussianRational, LinalgError, MatrixSubspace, ScalarSolution,
};
use crate::intersection_algebra::{compute_a, AlgebraError, ScaledTargets};
use crate::symbol_algebra::{
    block_representation, build_g_minus, build_x_plus, compute_g00, involution_matrix, CspElement, HeisenbergSpace,
    SymbolError,
};

type Q = GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReducedError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("datum does not fit the pair: {0}")]
    Shape(String),
    #[error("datum fails the system of relations: {0:?}")]
    SystemFailed(SystemReport),
}

/// A candidate `(Ω, 𝒜₀, {η_α}, μ)`; `eta[k]` belongs to the k-th canonical basis element of `a0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedDatum {
    pub omega: ExactMatrix,
    pub a0: MatrixSubspace,
    pub eta: Vec<Q>,
    pub mu: Q,
}

#[derive(Serialize, Deserialize)]
struct DatumRepr {
    omega: ExactMatrix,
    a0: Vec<ExactMatrix>,
    eta: Vec<Q>,
    mu: Q,
}

impl Serialize for ReducedDatum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DatumRepr { omega: self.omega.clone(), a0: self.a0.basis().to_vec(), eta: self.eta.clone(), mu: self.mu.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ReducedDatum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = DatumRepr::deserialize(d)?;
        let a0 = MatrixSubspace::span(r.omega.shape(), &r.a0).map_err(serde::de::Error::custom)?;
        if a0.basis() != r.a0.as_slice() {
            return Err(serde::de::Error::custom("a0 basis is not in canonical reduced form"));
        }
        if r.eta.len() != a0.dim() {
            return Err(serde::de::Error::custom("eta must have one entry per a0 basis element"));
        }
        Ok(ReducedDatum { omega: r.omega, a0, eta: r.eta, mu: r.mu })
    }
}

/// Outcome of the four relations, item by item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemReport {
    pub i: bool,
    pub ii: bool,
    pub iii: bool,
    pub iv: bool,
}

impl SystemReport {
    pub fn all(&self) -> bool {
        self.i && self.ii && self.iii && self.iv
    }
}

/// `H̄⁻¹ M* H̄`, the adjoint-like map under which `𝒜₀` must be invariant.
pub fn form_adjoint(m: &ExactMatrix, h: &ExactMatrix) -> ExactMatrix {
    let hb = h.conj();
    let hb_inv = hb.inverse().expect("form is nondegenerate");
    &(&hb_inv * &m.adjoint()) * &hb
}

/// The element required to lie in `𝒜₀` by item iv.
pub fn curvature_term(h: &ExactMatrix, a: &ExactMatrix, omega: &ExactMatrix, mu: &Q) -> ExactMatrix {
    let om_t = form_adjoint(omega, h);
    let mut out = om_t.commutator(omega);
    out = &out + &(a * &a.conj());
    out = &out - &omega.scale(&mu.conj());
    &out - &om_t.scale(mu)
}

/// Membership conditions the datum itself must satisfy before the system makes sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DatumInvariants {
    pub within_a: bool,
    pub closed: bool,
    pub adjoint_invariant: bool,
}

impl DatumInvariants {
    pub fn all(&self) -> bool {
        self.within_a && self.closed && self.adjoint_invariant
    }
}

pub fn check_invariants(h: &ExactMatrix, a0: &MatrixSubspace, full: &MatrixSubspace) -> DatumInvariants {
    DatumInvariants {
        within_a: a0.is_subspace_of(full),
        closed: a0.is_commutator_closed(),
        adjoint_invariant: a0.basis().iter().all(|b| a0.contains(&form_adjoint(b, h))),
    }
}

pub fn verify_system(h: &ExactMatrix, a: &ExactMatrix, datum: &ReducedDatum) -> Result<SystemReport, ReducedError> {
    let n = h.rows();
    if datum.omega.shape() != (n, n) || datum.a0.shape() != (n, n) || a.shape() != (n, n) {
        return Err(ReducedError::Shape(format!("pair is {n}x{n}, omega is {:?}", datum.omega.shape())));
    }
    if datum.eta.len() != datum.a0.dim() {
        return Err(ReducedError::Shape("one eta per a0 basis element is required".into()));
    }
    let t = ScaledTargets::new(h, a)?;
    let omega = &datum.omega;
    let basis = datum.a0.basis();
    let i = basis.iter().zip(&datum.eta).all(|(al, eta)| t.first(al) == t.op_form_inv.scale(eta));
    let ii = basis
        .iter()
        .zip(&datum.eta)
        .all(|(al, eta)| datum.a0.contains(&(&al.commutator(omega) - &omega.scale(eta))));
    let iii = t.second(omega) == t.form_op_conj.scale(&datum.mu);
    let iv = datum.a0.contains(&curvature_term(h, a, omega, &datum.mu));
    Ok(SystemReport { i, ii, iii, iv })
}

/// All `(Ω, μ)` solving item iii, as augmented vectors `(vec Ω, μ)`.
pub fn solve_omega(h: &ExactMatrix, a: &ExactMatrix) -> Result<ScalarSolution, ReducedError> {
    let t = ScaledTargets::new(h, a)?;
    let n = h.rows();
    let sol = solve_with_scalars((n, n), &[Constraint::scaled(|x: &ExactMatrix| t.second(x), t.form_op_conj.clone())])?;
    Ok(sol)
}

/// `g_- ⊕ g_0^red` in matrix form.
#[derive(Clone, Debug)]
pub struct ReducedSymbol {
    pub h: ExactMatrix,
    pub a: ExactMatrix,
    pub space: HeisenbergSpace,
    pub x_plus: CspElement,
    pub x_minus: CspElement,
    /// `g_{0,0}^red`: block representations of `𝒜₀` plus the identity.
    pub g00red: MatrixSubspace,
    pub g0red: MatrixSubspace,
}

/// `[[Ω, A], [0, −H⁻¹ΩᵀH]]`.
pub fn twisted_x_plus(h: &ExactMatrix, a: &ExactMatrix, omega: &ExactMatrix) -> ExactMatrix {
    let h_inv = h.inverse().expect("form is nondegenerate");
    let lower = -&(&(&h_inv * &omega.transpose()) * h);
    ExactMatrix::block2x2(omega, a, &ExactMatrix::zeros(h.rows(), h.rows()), &lower)
}

pub fn build_g0_red(h: &ExactMatrix, a: &ExactMatrix, datum: &ReducedDatum) -> Result<ReducedSymbol, ReducedError> {
    validate(h, a).map_err(SymbolError::InvalidPair)?;
    let report = verify_system(h, a, datum)?;
    if !report.all() {
        return Err(ReducedError::SystemFailed(report));
    }
    let space = build_g_minus(h)?;
    let k = h.rows();
    let x_plus = CspElement::new(twisted_x_plus(h, a, &datum.omega), &space)?;
    let x_minus = CspElement::new(involution_matrix(x_plus.matrix()), &space)?;
    let h_inv = h.inverse().expect("validated form");
    let mut gens: Vec<ExactMatrix> = datum.a0.basis().iter().map(|al| block_representation(al, h, &h_inv)).collect();
    gens.push(ExactMatrix::identity(2 * k));
    let g00red = MatrixSubspace::span((2 * k, 2 * k), &gens)?;
    gens.push(x_plus.matrix().clone());
    gens.push(x_minus.matrix().clone());
    let g0red = MatrixSubspace::span((2 * k, 2 * k), &gens)?;
    Ok(ReducedSymbol { h: h.clone(), a: a.clone(), space, x_plus, x_minus, g00red, g0red })
}

/// The five structural properties of the splitting of `g_0^red`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SplittingReport {
    pub within_g00: bool,
    pub conjugate_lines: bool,
    pub projects_onto_g02: bool,
    pub involution_invariant: bool,
    pub subalgebra: bool,
}

impl SplittingReport {
    pub fn all(&self) -> bool {
        self.within_g00 && self.conjugate_lines && self.projects_onto_g02 && self.involution_invariant && self.subalgebra
    }
}

impl ReducedSymbol {
    pub fn dim_g0red(&self) -> usize {
        self.g0red.dim()
    }

    pub fn splitting(&self) -> Result<SplittingReport, ReducedError> {
        let g00 = compute_g00(&self.h, &self.a)?;
        let k = self.h.rows();
        let xp = self.x_plus.matrix();
        let plain = build_x_plus(&self.a, &self.space)?;
        // The (0,2) part of X₊^Ω is its upper-right block; the rest must be block diagonal.
        let mut diag_part = xp.clone();
        diag_part.set_block(0, k, &ExactMatrix::zeros(k, k));
        let off_lower = diag_part.block(k, 0, k, k);
        let projects = xp.block(0, k, k, k) == self.a && off_lower.is_zero() && !plain.matrix().is_zero();
        let sigma = self
            .g0red
            .map(self.g0red.shape(), involution_matrix)
            .map(|img| img == self.g0red)
            .unwrap_or(false);
        Ok(SplittingReport {
            within_g00: self.g00red.is_subspace_of(&g00),
            conjugate_lines: involution_matrix(xp) == *self.x_minus.matrix(),
            projects_onto_g02: projects,
            involution_invariant: sigma,
            subalgebra: self.g0red.is_commutator_closed(),
        })
    }
}

/// Which `𝒜₀` to try.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum A0Candidate {
    Full,
    Orth,
    Custom(MatrixSubspace),
}

impl A0Candidate {
    pub fn label(&self) -> &'static str {
        match self {
            A0Candidate::Full => "full",
            A0Candidate::Orth => "orth",
            A0Candidate::Custom(_) => "custom",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Lattice coefficients are `a + bi` with `|a|, |b| ≤ radius` and both
    /// parts multiples of `1/denominator`.
    pub radius: i64,
    pub denominator: i64,
    /// Stop after this many data.
    pub limit: usize,
    /// Lattice points tried per candidate.
    pub max_points: usize,
    pub candidates: Vec<A0Candidate>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { radius: 1, denominator: 2, limit: 8, max_points: 20_000, candidates: vec![A0Candidate::Full, A0Candidate::Orth] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateSummary {
    pub a0: String,
    pub dim_a0: usize,
    pub admissible: bool,
    pub free_parameters: usize,
    pub points_checked: usize,
    pub found: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub data: Vec<ReducedDatum>,
    pub candidates: Vec<CandidateSummary>,
}

fn lattice_values(radius: i64, denominator: i64) -> Vec<Q> {
    let r = radius * denominator;
    let mut vals: Vec<(i64, i64)> =
        (-r..=r).flat_map(|a| (-r..=r).map(move |b| (a, b))).filter(|&(a, b)| a != 0 || b != 0).collect();
    vals.sort_by_key(|&(a, b)| (a.abs() + b.abs(), -a, -b));
    let d = Q::from_int(denominator);
    vals.into_iter().map(|(a, b)| &Q::from_ints(a, b) / &d).collect()
}

/// Advance `idx` to the next strictly increasing index tuple below `bound`.
fn next_combination(idx: &mut [usize], bound: usize) -> bool {
    let size = idx.len();
    for i in (0..size).rev() {
        if idx[i] < bound - size + i {
            idx[i] += 1;
            for j in i + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Advance a mixed-radix counter with every digit below `radix`.
fn next_digits(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// Coefficient vectors ordered by support size, then support, then values.
fn lattice_points(dim: usize, vals: &[Q], max_points: usize) -> Vec<Vec<Q>> {
    let mut out = vec![vec![Q::zero(); dim]];
    for size in 1..=dim {
        let mut support: Vec<usize> = (0..size).collect();
        loop {
            let mut digits = vec![0usize; size];
            loop {
                if out.len() >= max_points {
                    return out;
                }
                let mut p = vec![Q::zero(); dim];
                for (&slot, &d) in support.iter().zip(&digits) {
                    p[slot] = vals[d].clone();
                }
                out.push(p);
                if !next_digits(&mut digits, vals.len()) {
                    break;
                }
            }
            if !next_combination(&mut support, dim) {
                break;
            }
        }
    }
    out
}

/// Bounded search for reduced data of a spec. Never claims exhaustiveness.
pub fn search(spec: &SymbolSpec, options: &SearchOptions) -> Result<SearchOutcome, ReducedError> {
    let pair = build_pair(spec).map_err(SymbolError::from)?;
    let (h, a) = (&pair.h, &pair.a);
    let alg = compute_a(h, a)?;
    let t = ScaledTargets::new(h, a)?;
    let n = h.rows();
    let mut data = Vec::new();
    let mut summaries = Vec::new();
    let mut seen = BTreeSet::new();

    for cand in &options.candidates {
        let a0 = match cand {
            A0Candidate::Full => alg.full.clone(),
            A0Candidate::Orth => alg.orth.clone(),
            A0Candidate::Custom(s) => s.clone(),
        };
        let mut summary = CandidateSummary {
            a0: cand.label().to_string(),
            dim_a0: a0.dim(),
            admissible: false,
            free_parameters: 0,
            points_checked: 0,
            found: 0,
        };
        if a0.shape() != (n, n) || !check_invariants(h, &a0, &alg.full).all() || options.limit == 0 {
            summaries.push(summary);
            continue;
        }
        summary.admissible = true;
        let etas: Vec<Q> = a0.basis().iter().map(|al| t.etas(al).expect("a0 ⊆ 𝒜").0).collect();

        // Items ii and iii are linear in (Ω, μ); μ is the first scalar.
        let mut constraints =
            vec![Constraint::scaled(|x: &ExactMatrix| t.second(x), t.form_op_conj.clone())];
        for (al, eta) in a0.basis().iter().zip(&etas) {
            constraints.push(Constraint::within(move |x: &ExactMatrix| &al.commutator(x) - &x.scale(eta), &a0));
        }
        let sol = solve_with_scalars((n, n), &constraints)?;
        let pairs: Vec<ExactMatrix> = sol
            .solutions()
            .into_iter()
            .map(|(x, s)| {
                let mut v = x.into_entries();
                v.push(s[0].clone());
                ExactMatrix::column(v)
            })
            .collect();
        let family = MatrixSubspace::span((n * n + 1, 1), &pairs)?;
        // Shifting Ω by α ∈ 𝒜₀ shifts μ by η′_α and gives the same g_0^red.
        let trivial: Vec<ExactMatrix> = a0
            .basis()
            .iter()
            .map(|al| {
                let mut v = al.entries().to_vec();
                v.push(t.etas(al).expect("a0 ⊆ 𝒜").1);
                ExactMatrix::column(v)
            })
            .collect();
        let trivial = MatrixSubspace::span((n * n + 1, 1), &trivial)?;
        let free = family.complement_of(&trivial);
        summary.free_parameters = free.dim();

        let values = lattice_values(options.radius, options.denominator.max(1));
        let points = lattice_points(free.dim(), &values, options.max_points);
        summary.points_checked = points.len();
        let found: Vec<ReducedDatum> = points
            .par_iter()
            .filter_map(|p| {
                let v = free.combine(p);
                let e = v.entries();
                let omega = ExactMatrix::from_vec(n, n, e[..n * n].to_vec()).expect("layout");
                let datum = ReducedDatum { omega, a0: a0.clone(), eta: etas.clone(), mu: e[n * n].clone() };
                let rep = verify_system(h, a, &datum).ok()?;
                rep.all().then_some(datum)
            })
            .collect();
        for d in found {
            if data.len() >= options.limit {
                break;
            }
            let key = serde_json::to_string(&d).expect("datum serializes");
            if seen.insert(key) {
                summary.found += 1;
                data.push(d);
            }
        }
        summaries.push(summary);
        if data.len() >= options.limit {
            break;
        }
    }
    Ok(SearchOutcome { data, candidates: summaries })
}

/// Whether `Ω ∈ 𝒜` for the given pair.
pub fn omega_in_a(h: &ExactMatrix, a: &ExactMatrix, omega: &ExactMatrix) -> Result<bool, ReducedError> {
    Ok(compute_a(h, a)?.full.contains(omega))
}

/// Sanity value used by tests: the trivial datum `(0, 𝒜, η, 0)`.
pub fn flat_datum(h: &ExactMatrix, a: &ExactMatrix) -> Result<ReducedDatum, ReducedError> {
    let alg = compute_a(h, a)?;
    let t = ScaledTargets::new(h, a)?;
    let eta = alg.full.basis().iter().map(|al| t.etas(al).expect("member").0).collect();
    Ok(ReducedDatum { omega: ExactMatrix::zeros(h.rows(), h.rows()), a0: alg.full, eta, mu: Q::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical_forms::is_regular;

    fn spec(t: &[(i64, usize, i64)]) -> SymbolSpec {
        let t: Vec<(Q, usize, i64)> = t.iter().map(|&(l, m, e)| (Q::from_int(l), m, e)).collect();
        SymbolSpec::from_triples(&t).unwrap()
    }

    #[test]
    fn flat_datum_on_regular_spec() {
        let p = build_pair(&spec(&[(0, 2, 1), (0, 1, 1)])).unwrap();
        let d = flat_datum(&p.h, &p.a).unwrap();
        assert!(verify_system(&p.h, &p.a, &d).unwrap().all());
        let red = build_g0_red(&p.h, &p.a, &d).unwrap();
        assert_eq!(red.dim_g0red(), d.a0.dim() + 3);
        assert!(red.splitting().unwrap().all());
    }

    #[test]
    fn item_iii_detects_perturbation() {
        let p = build_pair(&spec(&[(1, 1, 1), (2, 1, 1)])).unwrap();
        let mut d = flat_datum(&p.h, &p.a).unwrap();
        d.omega = ExactMatrix::from_ints(&[&[0, 1], &[0, 0]]);
        let r = verify_system(&p.h, &p.a, &d).unwrap();
        assert!(!r.iii);
    }

    #[test]
    fn omega_family_contains_zero_and_round_trips() {
        let h = ExactMatrix::identity(2);
        let a = ExactMatrix::diagonal(&[Q::from_int(1), Q::from_int(2)]);
        let sol = solve_omega(&h, &a).unwrap();
        let t = ScaledTargets::new(&h, &a).unwrap();
        for (om, mu) in sol.solutions() {
            assert_eq!(t.second(&om), t.form_op_conj.scale(&mu[0]));
        }
        assert!(sol.dim() >= 1);
    }

    #[test]
    fn search_finds_nonregular_data() {
        let s = spec(&[(1, 2, 1)]);
        let out = search(&s, &SearchOptions::default()).unwrap();
        assert!(!out.data.is_empty());
        let p = build_pair(&s).unwrap();
        assert!(!is_regular(&p.h, &p.a));
        for d in &out.data {
            assert!(verify_system(&p.h, &p.a, d).unwrap().all());
            assert!(!omega_in_a(&p.h, &p.a, &d.omega).unwrap());
            let red = build_g0_red(&p.h, &p.a, d).unwrap();
            assert!(red.splitting().unwrap().all());
        }
    }

    #[test]
    fn zero_limit_gives_nothing() {
        let opts = SearchOptions { limit: 0, ..SearchOptions::default() };
        assert!(search(&spec(&[(0, 2, 1)]), &opts).unwrap().data.is_empty());
    }

    #[test]
    fn datum_json_round_trip() {
        let p = build_pair(&spec(&[(0, 2, 1), (0, 1, -1)])).unwrap();
        let d = flat_datum(&p.h, &p.a).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        let back: ReducedDatum = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn lattice_enumeration_is_breadth_first() {
        let pts = lattice_points(2, &lattice_values(1, 1), 1000);
        assert_eq!(pts.len(), 81);
        assert!(pts[0].iter().all(Zero::is_zero));
        assert_eq!(pts[1].iter().filter(|x| !x.is_zero()).count(), 1);
        let distinct: BTreeSet<Vec<Q>> = pts.iter().cloned().collect();
        assert_eq!(distinct.len(), 81);
    }
}
