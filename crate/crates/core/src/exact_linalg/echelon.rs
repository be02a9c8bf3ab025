use num_traits::{One, Zero};

use super::{ExactMatrix, GaussianRational, MatrixSubspace};

type Q = GaussianRational;

/// Reduced row-echelon form together with its rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub reduced: ExactMatrix,
    pub pivots: Vec<usize>,
}

pub fn rref(m: &ExactMatrix) -> Rref {
    let mut rows = m.to_rows();
    let pivots = reduce_rows(&mut rows, m.cols());
    let reduced = if rows.is_empty() {
        ExactMatrix::zeros(0, m.cols())
    } else {
        ExactMatrix::from_rows(rows).expect("rows keep their width")
    };
    Rref { rank: pivots.len(), reduced, pivots }
}

/// In-place Gauss-Jordan elimination. Pivot rows end up first, normalized to a
/// leading one, with zeros above and below every pivot. Returns pivot columns.
pub(crate) fn reduce_rows(rows: &mut [Vec<Q>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let mut pivot_row = std::mem::take(&mut rows[next]);
        let inv = pivot_row[col].inv().expect("pivot is nonzero");
        if !inv.is_one() {
            for x in pivot_row[col..].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let support: Vec<usize> = (col..ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                row[j] -= &delta;
            }
        }
        rows[next] = pivot_row;
        pivots.push(col);
        next += 1;
    }
    pivots
}

/// Null space basis vectors of `m`, one per free column, in the standard
/// "free variable = 1" parametrization.
pub(crate) fn null_vectors(m: &ExactMatrix) -> Vec<Vec<Q>> {
    let red = rref(m);
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &p in &red.pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![Q::zero(); cols];
            x[f] = Q::one();
            for (r, &p) in red.pivots.iter().enumerate() {
                x[p] = -red.reduced.get(r, f);
            }
            x
        })
        .collect()
}

/// `{x : m·x = 0}` as a subspace of column vectors.
pub fn kernel(m: &ExactMatrix) -> MatrixSubspace {
    let gens = null_vectors(m).into_iter().map(ExactMatrix::column).collect::<Vec<_>>();
    MatrixSubspace::span((m.cols(), 1), &gens).expect("kernel vectors share a shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: i64, im: i64) -> Q {
        Q::from_ints(re, im)
    }

    #[test]
    fn proportional_rows() {
        let r = rref(&ExactMatrix::from_ints(&[&[1, 2], &[2, 4]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn identity_is_reduced() {
        let id = ExactMatrix::identity(3);
        let r = rref(&id);
        assert_eq!(r.rank, 3);
        assert_eq!(r.reduced, id);
    }

    #[test]
    fn complex_rank_one() {
        let m = ExactMatrix::from_rows(vec![vec![c(1, 0), c(0, 1)], vec![c(0, -1), c(1, 0)]]).unwrap();
        assert_eq!(rref(&m).rank, 1);
        let k = kernel(&m);
        assert_eq!(k.dim(), 1);
        let v = &k.basis()[0];
        // span{(-i, 1)}: the canonical representative has a leading one.
        let expected = ExactMatrix::column(vec![c(1, 0), c(0, 1)]);
        assert!(k.contains(&ExactMatrix::column(vec![c(0, -1), c(1, 0)])));
        assert_eq!(v, &expected);
        assert!((&m * v).is_zero());
    }

    #[test]
    fn trivial_kernels() {
        assert_eq!(kernel(&ExactMatrix::identity(3)).dim(), 0);
        assert_eq!(kernel(&ExactMatrix::zeros(2, 3)).dim(), 3);
    }
}
