//! The intersection algebra `𝒜` of a canonical pair: matrices that rescale both
//! `AH⁻¹` and `HĀ` under the congruence action. Computed by the generic solver
//! and, for its bi-orthogonal part, by explicit block formulas.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::canonical_forms::{jordan, scaling_diagonal, shift, alternating_sign, EigenClass, SymbolSpec};
use crate::exact_linalg::{solve_with_scalars, Constraint, ExactMatrix, GaussianRational, LinalgError, MatrixSubspace};

type Q = GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("operator A is zero")]
    ZeroOperator,
    #[error("form H is degenerate")]
    DegenerateForm,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `𝒜 = 𝒜^o ⊕ 𝒜^s` with the scaling pair `(η, η′)` of every basis element of `𝒜`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionAlgebra {
    pub full: MatrixSubspace,
    pub orth: MatrixSubspace,
    pub scal: MatrixSubspace,
    pub eta_table: Vec<(Q, Q)>,
}

impl IntersectionAlgebra {
    pub fn dims(&self) -> AlgebraDims {
        AlgebraDims { full: self.full.dim(), orth: self.orth.dim(), scal: self.scal.dim() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraDims {
    pub full: usize,
    pub orth: usize,
    pub scal: usize,
}

/// The two matrices whose conformal stabilizers are intersected.
pub struct ScaledTargets {
    /// `AH⁻¹`
    pub op_form_inv: ExactMatrix,
    /// `HĀ`
    pub form_op_conj: ExactMatrix,
}

impl ScaledTargets {
    pub fn new(h: &ExactMatrix, a: &ExactMatrix) -> Result<Self, AlgebraError> {
        let h_inv = h.inverse().ok_or(AlgebraError::DegenerateForm)?;
        Ok(Self { op_form_inv: a * &h_inv, form_op_conj: h * &a.conj() })
    }

    /// `αAH⁻¹ + AH⁻¹αᵀ`
    pub fn first(&self, alpha: &ExactMatrix) -> ExactMatrix {
        &(alpha * &self.op_form_inv) + &(&self.op_form_inv * &alpha.transpose())
    }

    /// `αᵀHĀ + HĀα`
    pub fn second(&self, alpha: &ExactMatrix) -> ExactMatrix {
        &(&alpha.transpose() * &self.form_op_conj) + &(&self.form_op_conj * alpha)
    }

    /// `(η, η′)` for a member of `𝒜`, `None` otherwise.
    pub fn etas(&self, alpha: &ExactMatrix) -> Option<(Q, Q)> {
        let eta = self.first(alpha).proportionality(&self.op_form_inv)?;
        let eta2 = self.second(alpha).proportionality(&self.form_op_conj)?;
        Some((eta, eta2))
    }
}

/// Nilpotency of the antilinear operator, i.e. of `AĀ`.
pub fn operator_is_nilpotent(a: &ExactMatrix) -> bool {
    let sq = a * &a.conj();
    sq.pow(a.rows() as u32).is_zero()
}

/// Solve for `𝒜`, split it into `𝒜^o` and the canonical scaling component.
pub fn compute_a(h: &ExactMatrix, a: &ExactMatrix) -> Result<IntersectionAlgebra, AlgebraError> {
    if a.is_zero() {
        return Err(AlgebraError::ZeroOperator);
    }
    let targets = ScaledTargets::new(h, a)?;
    let n = h.rows();
    let sol = solve_with_scalars(
        (n, n),
        &[
            Constraint::scaled(|x: &ExactMatrix| targets.first(x), targets.op_form_inv.clone()),
            Constraint::scaled(|x: &ExactMatrix| targets.second(x), targets.form_op_conj.clone()),
        ],
    )?;
    let full = sol.project_x();
    let orth = sol.zero_scalar_slice();
    let eta_table = full
        .basis()
        .iter()
        .map(|b| targets.etas(b).expect("solver output satisfies both conditions"))
        .collect();

    let id = ExactMatrix::identity(n);
    let mut scal_gens = vec![id.clone()];
    if full.dim() - orth.dim() == 2 {
        let with_id = orth.sum(&MatrixSubspace::span((n, n), &[id])?)?;
        let rep = nilpotent_scaling_element(a)
            .filter(|d| full.contains(d) && !with_id.contains(d))
            .unwrap_or_else(|| full.complement_of(&with_id).basis()[0].clone());
        scal_gens.push(rep);
    }
    let scal = MatrixSubspace::span((n, n), &scal_gens)?;
    Ok(IntersectionAlgebra { full, orth, scal, eta_table })
}

/// `⊕ D_{m_i}` when `A` is a direct sum of nilpotent shifts.
fn nilpotent_scaling_element(a: &ExactMatrix) -> Option<ExactMatrix> {
    let n = a.rows();
    let mut sizes = Vec::new();
    let mut run = 1;
    for r in 0..n {
        for c in 0..n {
            let v = a.get(r, c);
            let ok = if c == r + 1 { v.is_zero() || v.is_one() } else { v.is_zero() };
            if !ok {
                return None;
            }
        }
        if r + 1 < n && a.get(r, r + 1).is_one() {
            run += 1;
        } else {
            sizes.push(run);
            run = 1;
        }
    }
    let blocks: Vec<ExactMatrix> = sizes.into_iter().map(scaling_diagonal).collect();
    Some(ExactMatrix::direct_sum(&blocks))
}

/// `span{I}`, or `span{I, ⊕ D_{m_i}}` when every eigenvalue is zero.
pub fn scaling_component(spec: &SymbolSpec) -> MatrixSubspace {
    let n = spec.size();
    let mut gens = vec![ExactMatrix::identity(n)];
    if spec.is_nilpotent() {
        let blocks: Vec<ExactMatrix> = spec.blocks.iter().map(|b| scaling_diagonal(b.m)).collect();
        gens.push(ExactMatrix::direct_sum(&blocks));
    }
    MatrixSubspace::span((n, n), &gens).expect("square generators")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaCoupling {
    /// Non-nilpotent `A` and `η = η′` throughout.
    Coupled,
    /// Non-nilpotent `A` with some basis element having `η ≠ η′`.
    Uncoupled,
    /// Nilpotent `A`: the statement does not apply.
    Nilpotent,
}

impl EtaCoupling {
    pub fn holds(self) -> bool {
        self != EtaCoupling::Uncoupled
    }
}

pub fn check_eta_coupling(alg: &IntersectionAlgebra, a: &ExactMatrix) -> EtaCoupling {
    if operator_is_nilpotent(a) {
        EtaCoupling::Nilpotent
    } else if alg.eta_table.iter().all(|(e, e2)| e == e2) {
        EtaCoupling::Coupled
    } else {
        EtaCoupling::Uncoupled
    }
}

fn toeplitz_power(m: usize, k: usize) -> ExactMatrix {
    shift(m).pow(k as u32)
}

/// `[0 | x]`: `x` right-aligned in a block with `cols` columns.
fn pad_left(x: &ExactMatrix, cols: usize) -> ExactMatrix {
    let mut out = ExactMatrix::zeros(x.rows(), cols);
    out.set_block(0, cols - x.cols(), x);
    out
}

/// `[x; 0]`: `x` on top of a block with `rows` rows.
fn pad_below(x: &ExactMatrix, rows: usize) -> ExactMatrix {
    let mut out = ExactMatrix::zeros(rows, x.cols());
    out.set_block(0, 0, x);
    out
}

/// A block of size `2m_r × 2m_c` assembled from four `m_r × m_c` quarters.
fn quarters(tl: &ExactMatrix, tr: &ExactMatrix, bl: &ExactMatrix, br: &ExactMatrix) -> ExactMatrix {
    ExactMatrix::block2x2(tl, tr, bl, br)
}

struct Placement<'s> {
    spec: &'s SymbolSpec,
    offsets: Vec<usize>,
    n: usize,
}

impl Placement<'_> {
    fn place(&self, blocks: &[(usize, usize, ExactMatrix)]) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.n, self.n);
        for (r, c, b) in blocks {
            out.set_block(self.offsets[*r], self.offsets[*c], b);
        }
        out
    }

    fn diagonal_family(&self, i: usize) -> Vec<ExactMatrix> {
        let b = &self.spec.blocks[i];
        let m = b.m;
        match b.class() {
            EigenClass::Zero => (1..=m.div_ceil(2))
                .map(|k| {
                    let blk = &toeplitz_power(m, m + 1 - 2 * k) * &alternating_sign(m);
                    self.place(&[(i, i, blk)])
                })
                .collect(),
            EigenClass::Imaginary => {
                let j_inv = jordan(&b.lambda.square(), m).inverse().expect("λ ≠ 0");
                let z = ExactMatrix::zeros(m, m);
                (0..m)
                    .map(|k| {
                        let q = toeplitz_power(m, k);
                        let r = -&(&q * &j_inv);
                        self.place(&[(i, i, quarters(&z, &q, &r, &z))])
                    })
                    .collect()
            }
            EigenClass::PositiveReal | EigenClass::Generic => Vec::new(),
        }
    }

    /// Paired blocks `(s, l)` and `(l, s)` with `m_s ≤ m_l` and equal eigenvalues.
    fn pair_family(&self, s: usize, l: usize) -> Vec<ExactMatrix> {
        let (bs, bl) = (&self.spec.blocks[s], &self.spec.blocks[l]);
        let (ms, ml) = (bs.m, bl.m);
        let coupling = -(bs.epsilon * bl.epsilon).scalar();
        let mut out = Vec::new();
        match bs.class() {
            EigenClass::PositiveReal => {
                for k in 0..ms {
                    let t = toeplitz_power(ms, k);
                    out.push(self.place(&[
                        (s, l, pad_left(&t, ml)),
                        (l, s, pad_below(&t, ml).scale(&coupling)),
                    ]));
                }
            }
            EigenClass::Generic => {
                let zr = ExactMatrix::zeros(ms, ml);
                let zc = ExactMatrix::zeros(ml, ms);
                for top in [true, false] {
                    for k in 0..ms {
                        let t = toeplitz_power(ms, k);
                        let (up, down) = (pad_left(&t, ml), pad_below(&t, ml).scale(&coupling));
                        let (upper, lower) = if top {
                            (quarters(&up, &zr, &zr, &zr), quarters(&down, &zc, &zc, &zc))
                        } else {
                            (quarters(&zr, &zr, &zr, &up), quarters(&zc, &zc, &zc, &down))
                        };
                        out.push(self.place(&[(s, l, upper), (l, s, lower)]));
                    }
                }
            }
            EigenClass::Imaginary => {
                // Upper block [[P, Q], [R, U]] pairs with −ε_sε_l·[[P, RJ], [QJ⁻¹, U]].
                let j = jordan(&bs.lambda.square(), ms);
                let j_inv = j.inverse().expect("λ ≠ 0");
                let zr = ExactMatrix::zeros(ms, ml);
                let zc = ExactMatrix::zeros(ml, ms);
                for slot in 0..4 {
                    for k in 0..ms {
                        let t = toeplitz_power(ms, k);
                        let up = pad_left(&t, ml);
                        let (upper, lower) = match slot {
                            0 => (quarters(&up, &zr, &zr, &zr), quarters(&pad_below(&t, ml), &zc, &zc, &zc)),
                            1 => (
                                quarters(&zr, &up, &zr, &zr),
                                quarters(&zc, &zc, &pad_below(&(&t * &j_inv), ml), &zc),
                            ),
                            2 => (
                                quarters(&zr, &zr, &up, &zr),
                                quarters(&zc, &pad_below(&(&t * &j), ml), &zc, &zc),
                            ),
                            _ => (quarters(&zr, &zr, &zr, &up), quarters(&zc, &zc, &zc, &pad_below(&t, ml))),
                        };
                        out.push(self.place(&[(s, l, upper), (l, s, lower.scale(&coupling))]));
                    }
                }
            }
            EigenClass::Zero => {
                // Coefficient c^{parity}_t sits on the t-th superdiagonal of the
                // right-aligned square, on rows of that parity; its partner block
                // alternates parity along columns instead.
                for parity in [1usize, 0] {
                    for t in 1..=ms {
                        let mut upper = ExactMatrix::zeros(ms, ms);
                        let mut lower = ExactMatrix::zeros(ms, ms);
                        for r in 1..=ms + 1 - t {
                            let col = r + t - 1;
                            if r % 2 == parity {
                                upper.set(r - 1, col - 1, Q::one());
                            }
                            if (ms + col) % 2 == parity {
                                lower.set(r - 1, col - 1, Q::one());
                            }
                        }
                        if upper.is_zero() && lower.is_zero() {
                            continue;
                        }
                        out.push(self.place(&[
                            (s, l, pad_left(&upper, ml)),
                            (l, s, pad_below(&lower, ml).scale(&coupling)),
                        ]));
                    }
                }
            }
        }
        out
    }
}

/// `𝒜^o` assembled from the explicit block formulas.
pub fn closed_form_a_orth(spec: &SymbolSpec) -> MatrixSubspace {
    let n = spec.size();
    let place = Placement { spec, offsets: spec.offsets(), n };
    let g = spec.blocks.len();
    let mut gens = Vec::new();
    for i in 0..g {
        gens.extend(place.diagonal_family(i));
        for j in i + 1..g {
            if spec.blocks[i].lambda != spec.blocks[j].lambda {
                continue;
            }
            let (s, l) = if spec.blocks[i].m <= spec.blocks[j].m { (i, j) } else { (j, i) };
            gens.extend(place.pair_family(s, l));
        }
    }
    MatrixSubspace::span((n, n), &gens).expect("square generators")
}
