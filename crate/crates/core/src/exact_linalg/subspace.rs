use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::echelon::{null_vectors, reduce_rows};
use super::{ExactMatrix, GaussianRational, LinalgError};

type Q = GaussianRational;

/// A linear subspace of `rows × cols` matrices.
///
/// The basis is the row-reduced echelon form of the row-major vectorized
/// generators, so two subspaces are equal exactly when their bases are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SubspaceRepr", into = "SubspaceRepr")]
pub struct MatrixSubspace {
    shape: (usize, usize),
    basis: Vec<ExactMatrix>,
    pivots: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    rows: usize,
    cols: usize,
    basis: Vec<ExactMatrix>,
}

impl TryFrom<SubspaceRepr> for MatrixSubspace {
    type Error = LinalgError;
    fn try_from(r: SubspaceRepr) -> Result<Self, Self::Error> {
        let s = MatrixSubspace::span((r.rows, r.cols), &r.basis)?;
        if s.dim() != r.basis.len() {
            return Err(LinalgError::Shape("basis matrices are linearly dependent".into()));
        }
        Ok(s)
    }
}

impl From<MatrixSubspace> for SubspaceRepr {
    fn from(s: MatrixSubspace) -> Self {
        SubspaceRepr { rows: s.shape.0, cols: s.shape.1, basis: s.basis }
    }
}

impl MatrixSubspace {
    pub fn zero(shape: (usize, usize)) -> Self {
        Self { shape, basis: Vec::new(), pivots: Vec::new() }
    }

    /// The whole matrix space of the given shape.
    pub fn full(shape: (usize, usize)) -> Self {
        let (r, c) = shape;
        let gens: Vec<ExactMatrix> = (0..r * c)
            .map(|k| {
                let mut e = ExactMatrix::zeros(r, c);
                e.set(k / c, k % c, Q::from_int(1));
                e
            })
            .collect();
        Self::span(shape, &gens).expect("elementary matrices share a shape")
    }

    pub fn span(shape: (usize, usize), generators: &[ExactMatrix]) -> Result<Self, LinalgError> {
        if let Some(bad) = generators.iter().find(|g| g.shape() != shape) {
            return Err(LinalgError::Shape(format!(
                "generator of shape {:?} in a subspace of {:?} matrices",
                bad.shape(),
                shape
            )));
        }
        let mut rows: Vec<Vec<Q>> = generators
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| g.entries().to_vec())
            .collect();
        Ok(Self::from_rows(shape, &mut rows))
    }

    fn from_rows(shape: (usize, usize), rows: &mut Vec<Vec<Q>>) -> Self {
        let pivots = reduce_rows(rows, shape.0 * shape.1);
        rows.truncate(pivots.len());
        let basis = rows
            .drain(..)
            .map(|v| ExactMatrix::from_vec(shape.0, shape.1, v).expect("vector length matches shape"))
            .collect();
        Self { shape, basis, pivots }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[ExactMatrix] {
        &self.basis
    }

    /// Coefficients of `x` in the canonical basis, or `None` if `x` is not a member.
    pub fn membership(&self, x: &ExactMatrix) -> Option<Vec<Q>> {
        if x.shape() != self.shape {
            return None;
        }
        // With a reduced basis the coefficient of basis vector k is the entry of x at its pivot.
        let coeffs: Vec<Q> = self.pivots.iter().map(|&p| x.entries()[p].clone()).collect();
        let mut residual = x.entries().to_vec();
        for (b, c) in self.basis.iter().zip(&coeffs) {
            if c.is_zero() {
                continue;
            }
            for (r, e) in residual.iter_mut().zip(b.entries()) {
                if !e.is_zero() {
                    *r -= &(c * e);
                }
            }
        }
        residual.iter().all(Zero::is_zero).then_some(coeffs)
    }

    pub fn contains(&self, x: &ExactMatrix) -> bool {
        self.membership(x).is_some()
    }

    /// The element with the given coordinates in the canonical basis.
    pub fn combine(&self, coeffs: &[Q]) -> ExactMatrix {
        assert_eq!(coeffs.len(), self.dim(), "coordinate count");
        let mut out = ExactMatrix::zeros(self.shape.0, self.shape.1);
        for (b, c) in self.basis.iter().zip(coeffs) {
            if !c.is_zero() {
                out = &out + &b.scale(c);
            }
        }
        out
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.shape == other.shape && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Self) -> Result<Self, LinalgError> {
        let gens: Vec<ExactMatrix> = self.basis.iter().chain(&other.basis).cloned().collect();
        Self::span(self.shape, &gens)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.shape != other.shape {
            return Err(LinalgError::Shape("intersection of subspaces of different shapes".into()));
        }
        // Solve Σ a_k u_k − Σ b_l v_l = 0 and keep Σ a_k u_k.
        let len = self.shape.0 * self.shape.1;
        let (p, q) = (self.dim(), other.dim());
        let sys = ExactMatrix::from_fn(len, p + q, |r, c| {
            if c < p {
                self.basis[c].entries()[r].clone()
            } else {
                -&other.basis[c - p].entries()[r]
            }
        });
        let gens: Vec<ExactMatrix> =
            null_vectors(&sys).iter().map(|v| self.combine(&v[..p])).collect();
        Self::span(self.shape, &gens)
    }

    /// `{x ∈ self : f(x) = 0}` for a linear map `f` into a coordinate space.
    pub fn kernel_of(&self, f: impl Fn(&ExactMatrix) -> Vec<Q>) -> Self {
        let images: Vec<Vec<Q>> = self.basis.iter().map(&f).collect();
        let out_len = images.first().map_or(0, Vec::len);
        if out_len == 0 {
            return self.clone();
        }
        let sys = ExactMatrix::from_fn(out_len, self.dim(), |r, c| images[c][r].clone());
        let gens: Vec<ExactMatrix> = null_vectors(&sys).iter().map(|v| self.combine(v)).collect();
        Self::span(self.shape, &gens).expect("combinations keep the shape")
    }

    /// Image of the subspace under a linear map.
    pub fn map(&self, shape: (usize, usize), f: impl Fn(&ExactMatrix) -> ExactMatrix) -> Result<Self, LinalgError> {
        let gens: Vec<ExactMatrix> = self.basis.iter().map(f).collect();
        Self::span(shape, &gens)
    }

    /// True when the commutator of any two elements stays inside the subspace.
    pub fn is_commutator_closed(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis[i + 1..].iter().all(|b| self.contains(&a.commutator(b)))
        })
    }

    /// Canonical basis of a complement of `sub` inside `self` (for `sub ⊆ self`).
    pub fn complement_of(&self, sub: &Self) -> Self {
        let sub_pivots = &sub.pivots;
        // Reduce each basis vector of self against sub, then re-reduce what is left.
        let mut rows: Vec<Vec<Q>> = self
            .basis
            .iter()
            .map(|b| {
                let mut v = b.entries().to_vec();
                for (s, &p) in sub.basis.iter().zip(sub_pivots) {
                    let c = v[p].clone();
                    if c.is_zero() {
                        continue;
                    }
                    for (x, e) in v.iter_mut().zip(s.entries()) {
                        if !e.is_zero() {
                            *x -= &(&c * e);
                        }
                    }
                }
                v
            })
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .collect();
        Self::from_rows(self.shape, &mut rows)
    }
}
