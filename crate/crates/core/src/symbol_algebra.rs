//! The CR symbol as matrices acting on `g_{-1}`: the Heisenberg bracket,
//! conformal symplectic elements, the lines spanned by `X₊` and `X₋`, the
//! subalgebra `g_{0,0}` and the conjugation involution.

use num_traits::{One, Zero};

use crate::canonical_forms::{build_pair, validate, CanonicalPair, PairViolation, SpecError, SymbolSpec};
use crate::exact_linalg::{solve_with_scalars_on, Constraint, ExactMatrix, GaussianRational, LinalgError, MatrixSubspace};

type Q = GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymbolError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("invalid pair: {0:?}")]
    InvalidPair(Vec<PairViolation>),
    #[error("bracket convention could not be pinned: {0}")]
    Pinning(String),
    #[error("matrix is not conformal symplectic")]
    NotCsp,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `g_{-1} ⊕ g_{-2}` with basis `e_1 … e_{2n−2}` of `g_{-1}` and a fixed
/// generator `z` of `g_{-2}`; `[e_a, e_b] = W_ab·z`.
///
/// The first `n − 1` basis vectors span `g_{-1,1}`, the last `n − 1` span
/// `g_{-1,-1}`, and `e_{n−1+i}` is the conjugate of `e_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeisenbergSpace {
    n: usize,
    bracket: ExactMatrix,
}

impl HeisenbergSpace {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `dim g_{-1} = 2n − 2`.
    pub fn dim(&self) -> usize {
        2 * (self.n - 1)
    }

    /// `dim g_- = 2n − 1`.
    pub fn total_dim(&self) -> usize {
        self.dim() + 1
    }

    pub fn bracket(&self) -> &ExactMatrix {
        &self.bracket
    }

    /// Conformal weight `c` with `MᵀW + WM = c·W`, if `M` is conformal symplectic.
    pub fn weight(&self, m: &ExactMatrix) -> Option<Q> {
        if m.shape() != self.bracket.shape() {
            return None;
        }
        csp_defect(m, &self.bracket).proportionality(&self.bracket)
    }

    /// `[g_{-1}, g_{-1}] = g_{-2}`.
    pub fn is_fundamental(&self) -> bool {
        !self.bracket.is_zero()
    }
}

fn csp_defect(m: &ExactMatrix, w: &ExactMatrix) -> ExactMatrix {
    &(&m.transpose() * w) + &(w * m)
}

fn bracket_for(form: &ExactMatrix) -> ExactMatrix {
    let k = form.rows();
    let z = ExactMatrix::zeros(k, k);
    let i = Q::i();
    ExactMatrix::block2x2(&z, &form.scale(&i), &form.transpose().scale(&(-&i)), &z)
}

/// `diag(α, −H⁻¹αᵀH)`: how an element of the intersection algebra acts on `g_{-1}`.
pub fn block_representation(alpha: &ExactMatrix, h: &ExactMatrix, h_inv: &ExactMatrix) -> ExactMatrix {
    let lower = -&(&(h_inv * &alpha.transpose()) * h);
    ExactMatrix::direct_sum(&[alpha.clone(), lower])
}

fn elementary(k: usize) -> Vec<ExactMatrix> {
    (0..k * k)
        .map(|idx| {
            let mut e = ExactMatrix::zeros(k, k);
            e.set(idx / k, idx % k, Q::one());
            e
        })
        .collect()
}

/// Build the Heisenberg bracket for the form `H`.
///
/// The off-diagonal block of `W` is either `iH` or `iHᵀ`. The choice is fixed by
/// requiring every `diag(α, −H⁻¹αᵀH)` to be conformal symplectic of weight 0;
/// exactly one candidate survives (they coincide when `H` is symmetric).
pub fn build_g_minus(h: &ExactMatrix) -> Result<HeisenbergSpace, SymbolError> {
    let k = h.rows();
    if k == 0 || !h.is_square() {
        return Err(SymbolError::Pinning("form must be a nonempty square matrix".into()));
    }
    let h_inv = h.inverse().ok_or(SymbolError::InvalidPair(vec![PairViolation::Degenerate]))?;
    let probes: Vec<ExactMatrix> = elementary(k).iter().map(|a| block_representation(a, h, &h_inv)).collect();
    let mut survivors: Vec<ExactMatrix> = Vec::new();
    for cand in [h.clone(), h.transpose()] {
        let w = bracket_for(&cand);
        if w.transpose() != -&w {
            continue;
        }
        if probes.iter().all(|p| csp_defect(p, &w).is_zero()) && !survivors.contains(&w) {
            survivors.push(w);
        }
    }
    match survivors.len() {
        1 => Ok(HeisenbergSpace { n: k + 1, bracket: survivors.pop().expect("one survivor") }),
        0 => Err(SymbolError::Pinning("neither iH nor iHᵀ makes the block representations weight-0 csp".into())),
        _ => Err(SymbolError::Pinning("both bracket conventions pass; the probe set is too small".into())),
    }
}

/// A conformal symplectic endomorphism of `g_{-1}` with its weight on `g_{-2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspElement {
    matrix: ExactMatrix,
    weight: Q,
}

impl CspElement {
    pub fn new(matrix: ExactMatrix, space: &HeisenbergSpace) -> Result<Self, SymbolError> {
        let weight = space.weight(&matrix).ok_or(SymbolError::NotCsp)?;
        Ok(Self { matrix, weight })
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn weight(&self) -> &Q {
        &self.weight
    }
}

/// The block swap `Σ = [[0, I], [I, 0]]` exchanging `e_i` and its conjugate.
fn swap_conj(m: &ExactMatrix) -> ExactMatrix {
    let k = m.rows() / 2;
    let c = m.conj();
    ExactMatrix::from_fn(m.rows(), m.cols(), |r, s| c.get((r + k) % (2 * k), (s + k) % (2 * k)).clone())
}

/// `Σ·conj(M)·Σ` on matrices.
pub fn involution_matrix(m: &ExactMatrix) -> ExactMatrix {
    swap_conj(m)
}

/// Conjugation of a csp element; the weight is conjugated too.
pub fn involution(e: &CspElement) -> CspElement {
    CspElement { matrix: swap_conj(&e.matrix), weight: e.weight.conj() }
}

/// `X₊ = [[0, A], [0, 0]]`: kills `g_{-1,1}` and sends `e_{n−1+j}` to `A e_j`.
pub fn build_x_plus(a: &ExactMatrix, space: &HeisenbergSpace) -> Result<CspElement, SymbolError> {
    let k = a.rows();
    let z = ExactMatrix::zeros(k, k);
    let e = CspElement::new(ExactMatrix::block2x2(&z, a, &z, &z), space)?;
    if !e.weight.is_zero() {
        return Err(SymbolError::Pinning("X₊ has nonzero conformal weight".into()));
    }
    Ok(e)
}

fn block_diagonal_domain(k: usize) -> Vec<ExactMatrix> {
    let mut out = Vec::with_capacity(2 * k * k);
    for half in 0..2 {
        for e in elementary(k) {
            let mut m = ExactMatrix::zeros(2 * k, 2 * k);
            m.set_block(half * k, half * k, &e);
            out.push(m);
        }
    }
    out
}

/// `g_{0,0}`: block-diagonal csp elements `v` with `[v, X₊] ∈ ℂX₊` and `[v, X₋] ∈ ℂX₋`.
pub fn compute_g00(h: &ExactMatrix, a: &ExactMatrix) -> Result<MatrixSubspace, SymbolError> {
    validate(h, a).map_err(SymbolError::InvalidPair)?;
    let space = build_g_minus(h)?;
    let xp = build_x_plus(a, &space)?;
    let xm = involution(&xp);
    g00_in(&space, xp.matrix(), xm.matrix())
}

fn g00_in(space: &HeisenbergSpace, xp: &ExactMatrix, xm: &ExactMatrix) -> Result<MatrixSubspace, SymbolError> {
    let k = space.dim() / 2;
    let w = space.bracket().clone();
    let constraints = [
        Constraint::scaled(|v: &ExactMatrix| csp_defect(v, &w), w.clone()),
        Constraint::scaled(|v: &ExactMatrix| v.commutator(xp), xp.clone()),
        Constraint::scaled(|v: &ExactMatrix| v.commutator(xm), xm.clone()),
    ];
    let sol = solve_with_scalars_on((2 * k, 2 * k), &block_diagonal_domain(k), &constraints)?;
    Ok(sol.project_x())
}

/// The symbol `g_- ⊕ g_{0,-2} ⊕ g_{0,0} ⊕ g_{0,2}` of a canonical spec.
#[derive(Clone, Debug)]
pub struct CRSymbol {
    pub pair: CanonicalPair,
    pub space: HeisenbergSpace,
    pub x_plus: CspElement,
    pub x_minus: CspElement,
    pub g00: MatrixSubspace,
}

impl CRSymbol {
    /// `g_{0,-2} ⊕ g_{0,0} ⊕ g_{0,2}` as one subspace.
    pub fn g0(&self) -> MatrixSubspace {
        let mut gens = self.g00.basis().to_vec();
        gens.push(self.x_plus.matrix().clone());
        gens.push(self.x_minus.matrix().clone());
        MatrixSubspace::span(self.g00.shape(), &gens).expect("same ambient shape")
    }
}

pub fn assemble_symbol(spec: &SymbolSpec) -> Result<CRSymbol, SymbolError> {
    let pair = build_pair(spec)?;
    validate(&pair.h, &pair.a).map_err(SymbolError::InvalidPair)?;
    let space = build_g_minus(&pair.h)?;
    let x_plus = build_x_plus(&pair.a, &space)?;
    let x_minus = involution(&x_plus);
    let g00 = g00_in(&space, x_plus.matrix(), x_minus.matrix())?;
    Ok(CRSymbol { pair, space, x_plus, x_minus, g00 })
}

/// Whether the symbol is a subalgebra, i.e. `[X₊, X₋] ∈ g_{0,0}`.
pub fn is_lie_algebra(sym: &CRSymbol) -> bool {
    sym.g00.contains(&sym.x_plus.matrix().commutator(sym.x_minus.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical_forms::anti_diagonal;

    fn spec(t: &[(i64, usize, i64)]) -> SymbolSpec {
        let t: Vec<(Q, usize, i64)> = t.iter().map(|&(l, m, e)| (Q::from_int(l), m, e)).collect();
        SymbolSpec::from_triples(&t).unwrap()
    }

    #[test]
    fn bracket_for_unit_form() {
        let s = build_g_minus(&ExactMatrix::identity(1)).unwrap();
        let i = Q::i();
        let expected =
            ExactMatrix::from_rows(vec![vec![Q::zero(), i.clone()], vec![-&i, Q::zero()]]).unwrap();
        assert_eq!(s.bracket(), &expected);
        assert!(s.is_fundamental());
    }

    #[test]
    fn bracket_for_antidiagonal_form() {
        let s2 = anti_diagonal(2);
        let s = build_g_minus(&s2).unwrap();
        assert_eq!(s.bracket().block(0, 2, 2, 2), s2.scale(&Q::i()));
        assert_eq!(s.bracket().rank(), 4);
    }

    #[test]
    fn pinning_picks_the_untransposed_form() {
        // A Hermitian form that is not symmetric separates the two candidates.
        let i = Q::i();
        let h = ExactMatrix::from_rows(vec![vec![Q::one(), i.clone()], vec![-&i, Q::from_int(2)]]).unwrap();
        let s = build_g_minus(&h).unwrap();
        assert_eq!(s.bracket().block(0, 2, 2, 2), h.scale(&i));
    }

    #[test]
    fn x_plus_and_involution() {
        let sym = assemble_symbol(&spec(&[(0, 2, 1)])).unwrap();
        assert_eq!(sym.x_plus.matrix().block(0, 2, 2, 2), sym.pair.a);
        assert_eq!(sym.x_minus.matrix().block(2, 0, 2, 2), sym.pair.a.conj());
        assert_eq!(involution(&sym.x_minus), sym.x_plus);
    }

    #[test]
    fn g00_of_scalar_operator_is_diagonal() {
        let sym = assemble_symbol(&spec(&[(1, 1, 1)])).unwrap();
        let diag = MatrixSubspace::span(
            (2, 2),
            &[ExactMatrix::from_ints(&[&[1, 0], &[0, 0]]), ExactMatrix::from_ints(&[&[0, 0], &[0, 1]])],
        )
        .unwrap();
        assert_eq!(sym.g00, diag);
    }

    #[test]
    fn regularity_examples() {
        assert!(is_lie_algebra(&assemble_symbol(&spec(&[(0, 2, 1), (0, 1, 1)])).unwrap()));
        assert!(!is_lie_algebra(&assemble_symbol(&spec(&[(1, 1, 1), (2, 1, 1)])).unwrap()));
    }

    #[test]
    fn g00_contains_identity_and_is_csp() {
        let sym = assemble_symbol(&spec(&[(0, 2, 1), (0, 1, -1)])).unwrap();
        assert!(sym.g00.contains(&ExactMatrix::identity(6)));
        for b in sym.g00.basis() {
            assert!(sym.space.weight(b).is_some());
        }
        assert!(sym.g00.is_commutator_closed());
    }
}
