use num_traits::Zero;

use super::echelon::null_vectors;
use super::{ExactMatrix, GaussianRational, LinalgError, MatrixSubspace};

type Q = GaussianRational;

type LinearMap<'a> = Box<dyn Fn(&ExactMatrix) -> ExactMatrix + Sync + 'a>;

/// One homogeneous condition `L(X) = Σ_k η_k·T_k` with fresh scalar unknowns `η_k`.
///
/// With no targets the condition is simply `L(X) = 0`.
pub struct Constraint<'a> {
    map: LinearMap<'a>,
    targets: Vec<ExactMatrix>,
}

impl<'a> Constraint<'a> {
    pub fn new(map: impl Fn(&ExactMatrix) -> ExactMatrix + Sync + 'a, targets: Vec<ExactMatrix>) -> Self {
        Self { map: Box::new(map), targets }
    }

    /// `L(X) = η·T`.
    pub fn scaled(map: impl Fn(&ExactMatrix) -> ExactMatrix + Sync + 'a, target: ExactMatrix) -> Self {
        Self::new(map, vec![target])
    }

    /// `L(X) = 0`.
    pub fn homogeneous(map: impl Fn(&ExactMatrix) -> ExactMatrix + Sync + 'a) -> Self {
        Self::new(map, Vec::new())
    }

    /// `L(X) ∈ span(S)`: one scalar per basis element of `S`.
    pub fn within(map: impl Fn(&ExactMatrix) -> ExactMatrix + Sync + 'a, space: &MatrixSubspace) -> Self {
        Self::new(map, space.basis().to_vec())
    }
}

/// Solution space of a [`solve_with_scalars`] call, stored in the augmented
/// coordinates `(vec X, η_1, …, η_t)` as column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarSolution {
    x_shape: (usize, usize),
    scalar_count: usize,
    space: MatrixSubspace,
}

impl ScalarSolution {
    pub fn space(&self) -> &MatrixSubspace {
        &self.space
    }

    pub fn scalar_count(&self) -> usize {
        self.scalar_count
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    fn split(&self, v: &ExactMatrix) -> (ExactMatrix, Vec<Q>) {
        let (r, c) = self.x_shape;
        let e = v.entries();
        let x = ExactMatrix::from_vec(r, c, e[..r * c].to_vec()).expect("augmented layout");
        (x, e[r * c..].to_vec())
    }

    /// Basis solutions as `(X, η)` pairs.
    pub fn solutions(&self) -> Vec<(ExactMatrix, Vec<Q>)> {
        self.space.basis().iter().map(|v| self.split(v)).collect()
    }

    /// The set of admissible `X`, forgetting the scalars.
    pub fn project_x(&self) -> MatrixSubspace {
        let xs: Vec<ExactMatrix> = self.solutions().into_iter().map(|(x, _)| x).collect();
        MatrixSubspace::span(self.x_shape, &xs).expect("projection keeps the shape")
    }

    /// Solutions whose scalars all vanish, projected to `X`.
    pub fn zero_scalar_slice(&self) -> MatrixSubspace {
        let n = self.x_shape.0 * self.x_shape.1;
        let kept = self.space.kernel_of(|v| v.entries()[n..].to_vec());
        let xs: Vec<ExactMatrix> = kept.basis().iter().map(|v| self.split(v).0).collect();
        MatrixSubspace::span(self.x_shape, &xs).expect("projection keeps the shape")
    }
}

/// Solve `L_j(X) = Σ_k η_jk·T_jk` for all constraints simultaneously, with `X`
/// ranging over all matrices of `x_shape`.
pub fn solve_with_scalars(x_shape: (usize, usize), constraints: &[Constraint<'_>]) -> Result<ScalarSolution, LinalgError> {
    let (r, c) = x_shape;
    let domain: Vec<ExactMatrix> = (0..r * c)
        .map(|k| {
            let mut e = ExactMatrix::zeros(r, c);
            e.set(k / c, k % c, Q::from_int(1));
            e
        })
        .collect();
    solve_with_scalars_on(x_shape, &domain, constraints)
}

/// As [`solve_with_scalars`], but with `X` restricted to the span of `domain`
/// (which must be linearly independent).
pub fn solve_with_scalars_on(
    x_shape: (usize, usize),
    domain: &[ExactMatrix],
    constraints: &[Constraint<'_>],
) -> Result<ScalarSolution, LinalgError> {
    if let Some(bad) = domain.iter().find(|d| d.shape() != x_shape) {
        return Err(LinalgError::Shape(format!("domain matrix of shape {:?}, expected {:?}", bad.shape(), x_shape)));
    }
    let d = domain.len();
    let scalar_count: usize = constraints.iter().map(|k| k.targets.len()).sum();
    let unknowns = d + scalar_count;

    // Each constraint contributes one block of rows: columns are the images of
    // the domain basis followed by −T for each of its scalars.
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut scalar_offset = d;
    for k in constraints {
        let images: Vec<ExactMatrix> = domain.iter().map(|x| (k.map)(x)).collect();
        let out_shape = match (images.first(), k.targets.first()) {
            (Some(img), _) => img.shape(),
            (None, Some(t)) => t.shape(),
            (None, None) => continue,
        };
        if let Some(bad) = images.iter().chain(&k.targets).find(|m| m.shape() != out_shape) {
            return Err(LinalgError::Shape(format!(
                "constraint output shape {:?} does not match target shape {:?}",
                bad.shape(),
                out_shape
            )));
        }
        for e in 0..out_shape.0 * out_shape.1 {
            let mut row = vec![Q::zero(); unknowns];
            for (j, img) in images.iter().enumerate() {
                row[j] = img.entries()[e].clone();
            }
            for (t, target) in k.targets.iter().enumerate() {
                row[scalar_offset + t] = -&target.entries()[e];
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
        scalar_offset += k.targets.len();
    }

    let sys = if rows.is_empty() {
        ExactMatrix::zeros(0, unknowns)
    } else {
        ExactMatrix::from_rows(rows)?
    };
    let n = x_shape.0 * x_shape.1;
    let gens: Vec<ExactMatrix> = null_vectors(&sys)
        .into_iter()
        .map(|u| {
            let mut out = vec![Q::zero(); n + scalar_count];
            for (coef, basis) in u[..d].iter().zip(domain) {
                if coef.is_zero() {
                    continue;
                }
                for (o, e) in out.iter_mut().zip(basis.entries()) {
                    if !e.is_zero() {
                        *o += &(coef * e);
                    }
                }
            }
            out[n..].clone_from_slice(&u[d..]);
            ExactMatrix::column(out)
        })
        .collect();
    let space = MatrixSubspace::span((n + scalar_count, 1), &gens)?;
    Ok(ScalarSolution { x_shape, scalar_count, space })
}
