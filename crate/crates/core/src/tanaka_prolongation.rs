//! Tanaka prolongation of `g_- ⊕ g_0` for the Heisenberg algebra `g_-`.
//!
//! Every component is stored by how its basis acts on `g_-`: for `x ∈ g_j`
//! the coordinates of `[x, e_b]` in `g_{j−1}` and of `[x, z]` in `g_{j−2}`.
//! That is all the recursion needs.

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::canonical_forms::{build_pair, SpecError, SymbolSpec};
use crate::exact_linalg::{kernel, ExactMatrix, GaussianRational, MatrixSubspace};
use crate::reduced_symbol::{build_g0_red, ReducedDatum, ReducedError};
use crate::symbol_algebra::HeisenbergSpace;

type Q = GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProlongError {
    #[error("g0 has matrices of shape {found:?}, expected {expected:?}")]
    Shape { expected: (usize, usize), found: (usize, usize) },
    #[error("g0 basis element {0} is not conformal symplectic")]
    NotCsp(usize),
    #[error("k_max must be at least 1")]
    KMax,
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Reduced(#[from] ReducedError),
}

/// One graded piece `g_j`, `j ≥ −1`, described by its action on `g_-`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub degree: i64,
    /// `on_e[x][b]`: coordinates of `[x, e_b]` in `g_{j−1}`.
    pub on_e: Vec<Vec<Vec<Q>>>,
    /// `on_z[x]`: coordinates of `[x, z]` in `g_{j−2}`.
    pub on_z: Vec<Vec<Q>>,
}

impl Component {
    pub fn dim(&self) -> usize {
        self.on_e.len()
    }
}

/// `g_- ⊕ g_0 ⊕ g_1 ⊕ …` computed so far.
#[derive(Clone, Debug)]
pub struct GradedState {
    g_minus: HeisenbergSpace,
    g0: MatrixSubspace,
    /// Index `j + 1` holds `g_j`, starting at `g_{-1}`.
    components: Vec<Component>,
}

impl GradedState {
    pub fn new(g_minus: HeisenbergSpace, g0: MatrixSubspace) -> Result<Self, ProlongError> {
        let d = g_minus.dim();
        if g0.shape() != (d, d) {
            return Err(ProlongError::Shape { expected: (d, d), found: g0.shape() });
        }
        let w = g_minus.bracket();
        let minus_one = Component {
            degree: -1,
            on_e: (0..d).map(|p| (0..d).map(|b| vec![w.get(p, b).clone()]).collect()).collect(),
            on_z: vec![Vec::new(); d],
        };
        let mut on_e = Vec::with_capacity(g0.dim());
        let mut on_z = Vec::with_capacity(g0.dim());
        for (idx, m) in g0.basis().iter().enumerate() {
            let weight = g_minus.weight(m).ok_or(ProlongError::NotCsp(idx))?;
            on_e.push((0..d).map(|b| m.col(b)).collect());
            on_z.push(vec![weight]);
        }
        let zero = Component { degree: 0, on_e, on_z };
        Ok(Self { g_minus, g0, components: vec![minus_one, zero] })
    }

    pub fn g_minus(&self) -> &HeisenbergSpace {
        &self.g_minus
    }

    pub fn g0(&self) -> &MatrixSubspace {
        &self.g0
    }

    /// Highest degree computed so far.
    pub fn top_degree(&self) -> i64 {
        self.components.len() as i64 - 2
    }

    /// `g_j` for `j ≥ −1`.
    pub fn component(&self, j: i64) -> &Component {
        &self.components[(j + 1) as usize]
    }

    /// `dim g_j` for `j ≥ −2`.
    pub fn dim(&self, j: i64) -> usize {
        if j == -2 {
            1
        } else if j < -2 {
            0
        } else {
            self.component(j).dim()
        }
    }

    /// `[dim g_0, dim g_1, …]`.
    pub fn dims(&self) -> Vec<usize> {
        self.components[1..].iter().map(Component::dim).collect()
    }

    pub fn push(&mut self, c: Component) {
        assert_eq!(c.degree, self.top_degree() + 1, "components are added in order");
        self.components.push(c);
    }

    /// Coordinates of `[x_p, e_b]` for `x_p ∈ g_j`.
    fn act_e(&self, j: i64, p: usize, b: usize) -> &[Q] {
        &self.component(j).on_e[p][b]
    }

    /// Coordinates of `[x_p, z]` for `x_p ∈ g_j`.
    fn act_z(&self, j: i64, p: usize) -> &[Q] {
        &self.component(j).on_z[p]
    }

    /// Residuals of the Leibniz rule for a candidate `φ` of degree `k`, given
    /// as `φ(e_a)` coordinates in `g_{k−1}` and `φ(z)` in `g_{k−2}`.
    fn leibniz_residuals(&self, k: i64, on_e: &[Vec<Q>], on_z: &[Q]) -> Vec<Q> {
        let d = self.g_minus.dim();
        let w = self.g_minus.bracket();
        let mut out = Vec::new();
        // φ([e_a, e_b]) = [φ(e_a), e_b] − [φ(e_b), e_a]
        for a in 0..d {
            for b in a + 1..d {
                let mut r = vec![Q::zero(); self.dim(k - 2)];
                for (p, c) in on_e[a].iter().enumerate() {
                    if !c.is_zero() {
                        add_scaled(&mut r, c, self.act_e(k - 1, p, b));
                    }
                }
                for (p, c) in on_e[b].iter().enumerate() {
                    if !c.is_zero() {
                        add_scaled(&mut r, &-c, self.act_e(k - 1, p, a));
                    }
                }
                let wab = w.get(a, b);
                if !wab.is_zero() {
                    for (x, y) in r.iter_mut().zip(on_z) {
                        *x -= &(wab * y);
                    }
                }
                out.extend(r);
            }
        }
        // 0 = φ([e_a, z]) = [φ(e_a), z] − [φ(z), e_a]
        for a in 0..d {
            let mut r = vec![Q::zero(); self.dim(k - 3)];
            for (p, c) in on_e[a].iter().enumerate() {
                if !c.is_zero() {
                    add_scaled(&mut r, c, self.act_z(k - 1, p));
                }
            }
            for (q, c) in on_z.iter().enumerate() {
                if !c.is_zero() {
                    add_scaled(&mut r, &-c, self.act_e(k - 2, q, a));
                }
            }
            out.extend(r);
        }
        out
    }

    /// Exact Leibniz check of every stored element of `g_k`, `k ≥ 1`.
    pub fn verify_leibniz(&self, k: i64) -> bool {
        let c = self.component(k);
        (0..c.dim()).all(|x| self.leibniz_residuals(k, &c.on_e[x], &c.on_z[x]).iter().all(Zero::is_zero))
    }

    /// `φ(z)` recovered from one bracket pair `W_ab ≠ 0` must match the stored value.
    pub fn verify_polarization(&self, k: i64) -> bool {
        let d = self.g_minus.dim();
        let w = self.g_minus.bracket();
        let c = self.component(k);
        (0..c.dim()).all(|x| {
            (0..d).all(|a| {
                (0..d).filter(|&b| !w.get(a, b).is_zero()).all(|b| {
                    let mut v = vec![Q::zero(); self.dim(k - 2)];
                    for (p, cf) in c.on_e[x][a].iter().enumerate() {
                        add_scaled(&mut v, cf, self.act_e(k - 1, p, b));
                    }
                    for (p, cf) in c.on_e[x][b].iter().enumerate() {
                        add_scaled(&mut v, &-cf, self.act_e(k - 1, p, a));
                    }
                    let inv = w.get(a, b).inv().expect("nonzero");
                    v.iter().map(|t| t * &inv).collect::<Vec<_>>() == c.on_z[x]
                })
            })
        })
    }
}

fn add_scaled(acc: &mut [Q], c: &Q, v: &[Q]) {
    for (x, y) in acc.iter_mut().zip(v) {
        if !y.is_zero() {
            *x += &(c * y);
        }
    }
}

/// Compute `g_{k}` for `k = top_degree + 1` as the kernel of the Leibniz system.
pub fn prolong_step(state: &GradedState) -> Component {
    let k = state.top_degree() + 1;
    let d = state.g_minus.dim();
    let prev = state.dim(k - 1);
    let below = state.dim(k - 2);
    let unknowns = d * prev + below;
    // Column j of the system is the residual vector of the j-th unit candidate.
    let columns: Vec<Vec<Q>> = (0..unknowns)
        .map(|j| {
            let mut on_e = vec![vec![Q::zero(); prev]; d];
            let mut on_z = vec![Q::zero(); below];
            if j < d * prev {
                on_e[j / prev][j % prev] = Q::from_int(1);
            } else {
                on_z[j - d * prev] = Q::from_int(1);
            }
            state.leibniz_residuals(k, &on_e, &on_z)
        })
        .collect();
    let rows = columns.first().map_or(0, Vec::len);
    let nonzero_rows: Vec<usize> = (0..rows).filter(|&r| columns.iter().any(|c| !c[r].is_zero())).collect();
    let sys = ExactMatrix::from_fn(nonzero_rows.len(), unknowns, |r, c| columns[c][nonzero_rows[r]].clone());
    let ker = kernel(&sys);
    let mut on_e = Vec::with_capacity(ker.dim());
    let mut on_z = Vec::with_capacity(ker.dim());
    for v in ker.basis() {
        let e = v.entries();
        on_e.push((0..d).map(|a| e[a * prev..(a + 1) * prev].to_vec()).collect());
        on_z.push(e[d * prev..].to_vec());
    }
    Component { degree: k, on_e, on_z }
}

/// Whether the universal prolongation was found to be finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Finite(usize),
    NotReached,
}

/// Dimensions of the prolongation up to where it stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlongationReport {
    /// `dim g_k` for `k = 0, 1, …`.
    pub dims: Vec<usize>,
    /// `dim g_- + Σ dims` when the prolongation vanished.
    pub universal_dim: Termination,
    /// First `k` with `dim g_k = 0`.
    pub first_zero: Option<usize>,
    /// Leibniz and polarization checks held on every computed element.
    pub leibniz_ok: bool,
    /// When a zero was found, the next degree was computed and was zero too.
    pub persistence_ok: bool,
}

impl ProlongationReport {
    pub fn universal_dim_value(&self) -> Option<usize> {
        match self.universal_dim {
            Termination::Finite(n) => Some(n),
            Termination::NotReached => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NumberOrNote {
    Number(usize),
    Note(String),
}

#[derive(Serialize, Deserialize)]
struct ReportRepr {
    dims: Vec<usize>,
    universal_dim: NumberOrNote,
    first_zero: NumberOrNote,
}

impl Serialize for ProlongationReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ReportRepr {
            dims: self.dims.clone(),
            universal_dim: match self.universal_dim {
                Termination::Finite(n) => NumberOrNote::Number(n),
                Termination::NotReached => NumberOrNote::Note("infinite?".into()),
            },
            first_zero: match self.first_zero {
                Some(k) => NumberOrNote::Number(k),
                None => NumberOrNote::Note("not reached".into()),
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProlongationReport {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ReportRepr::deserialize(d)?;
        Ok(ProlongationReport {
            dims: r.dims,
            universal_dim: match r.universal_dim {
                NumberOrNote::Number(n) => Termination::Finite(n),
                NumberOrNote::Note(_) => Termination::NotReached,
            },
            first_zero: match r.first_zero {
                NumberOrNote::Number(k) => Some(k),
                NumberOrNote::Note(_) => None,
            },
            leibniz_ok: true,
            persistence_ok: true,
        })
    }
}

pub const DEFAULT_K_MAX: usize = 6;

/// Prolong until a component vanishes or `k_max` is reached.
pub fn universal(g_minus: &HeisenbergSpace, g0: &MatrixSubspace, k_max: usize) -> Result<ProlongationReport, ProlongError> {
    if k_max == 0 {
        return Err(ProlongError::KMax);
    }
    let mut state = GradedState::new(g_minus.clone(), g0.clone())?;
    let mut leibniz_ok = true;
    let mut first_zero = (g0.dim() == 0).then_some(0);
    let mut k = 0;
    while first_zero.is_none() && k < k_max {
        let next = prolong_step(&state);
        state.push(next);
        k += 1;
        let deg = k as i64;
        leibniz_ok &= state.verify_leibniz(deg) && state.verify_polarization(deg);
        if state.dim(deg) == 0 {
            first_zero = Some(k);
        }
    }
    let mut persistence_ok = true;
    if first_zero.is_some() {
        let extra = prolong_step(&state);
        persistence_ok = extra.dim() == 0;
    }
    let dims = state.dims();
    let universal_dim = match first_zero {
        Some(_) => Termination::Finite(g_minus.total_dim() + dims.iter().sum::<usize>()),
        None => Termination::NotReached,
    };
    Ok(ProlongationReport { dims, universal_dim, first_zero, leibniz_ok, persistence_ok })
}

/// `dim g_1` of `g_- ⊕ g0`.
pub fn first_prolongation_dim(g_minus: &HeisenbergSpace, g0: &MatrixSubspace) -> Result<usize, ProlongError> {
    let state = GradedState::new(g_minus.clone(), g0.clone())?;
    Ok(prolong_step(&state).dim())
}

/// `g_1 = 0` for the reduced symbol built from `datum`.
pub fn first_prolongation_vanishes(spec: &SymbolSpec, datum: &ReducedDatum) -> Result<bool, ProlongError> {
    let pair = build_pair(spec)?;
    let red = build_g0_red(&pair.h, &pair.a, datum)?;
    Ok(first_prolongation_dim(&red.space, &red.g0red)? == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol_algebra::build_g_minus;

    fn csp_full(space: &HeisenbergSpace) -> MatrixSubspace {
        let d = space.dim();
        let w = space.bracket().clone();
        let sol = crate::exact_linalg::solve_with_scalars(
            (d, d),
            &[crate::exact_linalg::Constraint::scaled(
                |m: &ExactMatrix| &(&m.transpose() * &w) + &(&w * m),
                w.clone(),
            )],
        )
        .unwrap();
        sol.project_x()
    }

    #[test]
    fn zero_g0_gives_heisenberg_only() {
        let space = build_g_minus(&ExactMatrix::identity(2)).unwrap();
        let r = universal(&space, &MatrixSubspace::zero((4, 4)), 3).unwrap();
        assert_eq!(r.first_zero, Some(0));
        assert_eq!(r.universal_dim, Termination::Finite(5));
        assert!(r.persistence_ok);
    }

    #[test]
    fn contact_prolongation_is_infinite() {
        // csp of a 2-dimensional symplectic space: the contact algebra in 3 variables.
        let space = build_g_minus(&ExactMatrix::identity(1)).unwrap();
        let g0 = csp_full(&space);
        assert_eq!(g0.dim(), 4);
        let r = universal(&space, &g0, 3).unwrap();
        assert_eq!(r.dims, vec![4, 6, 9, 12]);
        assert_eq!(r.first_zero, None);
        assert!(r.leibniz_ok);
    }

    #[test]
    fn block_diagonal_csp_gives_sl() {
        // g_{-1} = C^2 ⊕ C^2 with the block-diagonal csp: the contact grading of sl(4).
        let space = build_g_minus(&ExactMatrix::identity(2)).unwrap();
        let g0 = csp_full(&space);
        let mut diag = MatrixSubspace::zero((4, 4));
        for b in g0.basis() {
            let mut m = b.clone();
            m.set_block(0, 2, &ExactMatrix::zeros(2, 2));
            m.set_block(2, 0, &ExactMatrix::zeros(2, 2));
            if space.weight(&m).is_some() {
                diag = diag.sum(&MatrixSubspace::span((4, 4), &[m]).unwrap()).unwrap();
            }
        }
        assert_eq!(diag.dim(), 5);
        let r = universal(&space, &diag, 4).unwrap();
        assert_eq!(r.dims, vec![5, 4, 1, 0]);
        assert_eq!(r.universal_dim, Termination::Finite(15));
        assert!(r.leibniz_ok && r.persistence_ok);
    }

    fn spec(triples: &[(i64, usize, i64)]) -> SymbolSpec {
        let t: Vec<_> = triples.iter().map(|&(l, m, e)| (Q::from_int(l), m, e)).collect();
        SymbolSpec::from_triples(&t).unwrap()
    }

    fn datum(omega: &[&[i64]], mu: i64, shape: usize) -> ReducedDatum {
        let rows: Vec<Vec<Q>> = omega.iter().map(|r| r.iter().map(|&x| Q::from_int(x)).collect()).collect();
        let omega = ExactMatrix::from_rows(rows).unwrap().scale(&Q::ratio(1, 2));
        ReducedDatum { omega, a0: MatrixSubspace::zero((shape, shape)), eta: Vec::new(), mu: Q::from_int(mu) }
    }

    #[test]
    fn nonregular_datum_without_prolongation() {
        let s = spec(&[(1, 2, 1)]);
        let d = datum(&[&[2, 1], &[0, 0]], 1, 2);
        assert!(first_prolongation_vanishes(&s, &d).unwrap());
    }

    #[test]
    fn identity_free_a0_can_prolong() {
        // The identity of g00red contributes to the lower-right block of φ(e_i),
        // so without I ∈ 𝒜₀ one degree-1 element survives.
        let s = spec(&[(1, 2, 1)]);
        let d = datum(&[&[1, 2], &[0, -3]], -1, 2);
        let pair = build_pair(&s).unwrap();
        let red = build_g0_red(&pair.h, &pair.a, &d).unwrap();
        let r = universal(&red.space, &red.g0red, 4).unwrap();
        assert_eq!(r.dims, vec![3, 1, 0]);
        assert!(r.leibniz_ok && r.persistence_ok);
    }

    #[test]
    fn flat_datum_on_maximal_spec_prolongs() {
        let s = spec(&[(0, 2, 1), (0, 1, 1)]);
        let pair = build_pair(&s).unwrap();
        let d = crate::reduced_symbol::flat_datum(&pair.h, &pair.a).unwrap();
        assert!(!first_prolongation_vanishes(&s, &d).unwrap());
    }

    #[test]
    fn shuffled_g0_basis_gives_same_dims() {
        let s = spec(&[(0, 2, 1), (1, 1, -1)]);
        let sym = crate::symbol_algebra::assemble_symbol(&s).unwrap();
        let g0 = sym.g0();
        let mut rev: Vec<ExactMatrix> = g0.basis().to_vec();
        rev.reverse();
        let mixed: Vec<ExactMatrix> =
            rev.iter().enumerate().map(|(i, m)| if i == 0 { m.clone() } else { m + &rev[0] }).collect();
        let state_a = GradedState::new(sym.space.clone(), g0.clone()).unwrap();
        let g0_b = MatrixSubspace::span(g0.shape(), &mixed).unwrap();
        let state_b = GradedState::new(sym.space.clone(), g0_b).unwrap();
        assert_eq!(prolong_step(&state_a).dim(), prolong_step(&state_b).dim());
    }

    #[test]
    fn report_json_shapes() {
        let r = ProlongationReport {
            dims: vec![3, 0],
            universal_dim: Termination::Finite(8),
            first_zero: Some(1),
            leibniz_ok: true,
            persistence_ok: true,
        };
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"dims":[3,0],"universal_dim":8,"first_zero":1}"#);
        let open = ProlongationReport { universal_dim: Termination::NotReached, first_zero: None, ..r };
        let text = serde_json::to_string(&open).unwrap();
        assert_eq!(text, r#"{"dims":[3,0],"universal_dim":"infinite?","first_zero":"not reached"}"#);
        let back: ProlongationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.universal_dim, Termination::NotReached);
    }
}
