//! Canonical pairs `(H, A)`: a Hermitian form and an antilinear self-adjoint
//! operator in simultaneous normal form, plus the block-pair counts `d(i, j)`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact_linalg::{ExactMatrix, GaussianRational, LinalgError};

type Q = GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("malformed spec JSON: {0}")]
    Json(String),
    #[error("block {index}: {source}")]
    Literal { index: usize, source: LinalgError },
    #[error("block {index}: lambda = {lambda} lies outside the quadrant Re >= 0, Im >= 0")]
    Quadrant { index: usize, lambda: Box<Q> },
    #[error("block {index}: block size m must be at least 1")]
    ZeroSize { index: usize },
    #[error("block {index}: epsilon must be 1 or -1, got {value}")]
    Sign { index: usize, value: i64 },
    #[error("spec has no blocks")]
    Empty,
    #[error("operator A is zero; a 2-nondegenerate symbol needs A != 0")]
    ZeroOperator,
}

/// A sign `±1`, serialized as the integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn scalar(self) -> Q {
        Q::from_int(self.value())
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match i64::deserialize(d)? {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            v => Err(serde::de::Error::custom(format!("epsilon must be 1 or -1, got {v}"))),
        }
    }
}

/// Where an eigenvalue sits, which decides every block formula below.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenClass {
    Zero,
    PositiveReal,
    /// `λ² < 0`, i.e. λ purely imaginary.
    Imaginary,
    /// `λ² ∉ ℝ`.
    Generic,
}

impl EigenClass {
    pub fn of(lambda: &Q) -> Self {
        if lambda.is_zero() {
            EigenClass::Zero
        } else if lambda.is_real() {
            EigenClass::PositiveReal
        } else if lambda.re().is_zero() {
            EigenClass::Imaginary
        } else {
            EigenClass::Generic
        }
    }
}

/// One canonical block `(λ, m, ε)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockSpec {
    pub lambda: Q,
    pub m: usize,
    pub epsilon: Sign,
}

impl BlockSpec {
    pub fn new(lambda: Q, m: usize, epsilon: Sign) -> Self {
        Self { lambda, m, epsilon }
    }

    /// Real λ gives an `m × m` block, non-real λ a `2m × 2m` block.
    pub fn size(&self) -> usize {
        if self.lambda.is_real() {
            self.m
        } else {
            2 * self.m
        }
    }

    pub fn class(&self) -> EigenClass {
        EigenClass::of(&self.lambda)
    }

    fn check(&self, index: usize) -> Result<(), SpecError> {
        if self.m == 0 {
            return Err(SpecError::ZeroSize { index });
        }
        if self.lambda.re().is_negative() || self.lambda.im().is_negative() {
            return Err(SpecError::Quadrant { index, lambda: Box::new(self.lambda.clone()) });
        }
        Ok(())
    }
}

impl fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = if self.epsilon == Sign::Plus { "+1" } else { "-1" };
        write!(f, "({},{},{})", self.lambda, self.m, e)
    }
}

/// A CR symbol in normal form, as an ordered list of blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub blocks: Vec<BlockSpec>,
}

#[derive(Deserialize)]
struct RawBlock {
    lambda: RawComplex,
    m: usize,
    epsilon: i64,
}

#[derive(Deserialize)]
struct RawComplex {
    re: String,
    im: String,
}

#[derive(Deserialize)]
struct RawSpec {
    blocks: Vec<RawBlock>,
}

impl SymbolSpec {
    pub fn new(blocks: Vec<BlockSpec>) -> Result<Self, SpecError> {
        let spec = Self { blocks };
        spec.validate()?;
        Ok(spec)
    }

    /// Shorthand for tests and catalogs: `(λ, m, ε)` triples.
    pub fn from_triples(triples: &[(Q, usize, i64)]) -> Result<Self, SpecError> {
        let mut blocks = Vec::new();
        for (index, (l, m, e)) in triples.iter().enumerate() {
            let epsilon = match e {
                1 => Sign::Plus,
                -1 => Sign::Minus,
                v => return Err(SpecError::Sign { index, value: *v }),
            };
            blocks.push(BlockSpec::new(l.clone(), *m, epsilon));
        }
        Self::new(blocks)
    }

    /// Parse and validate the JSON form `{"blocks":[{"lambda":{"re":..,"im":..},"m":..,"epsilon":..}]}`.
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))?;
        let mut blocks = Vec::new();
        for (index, b) in raw.blocks.into_iter().enumerate() {
            let lambda = Q::parse_parts(&b.lambda.re, &b.lambda.im)
                .map_err(|source| SpecError::Literal { index, source })?;
            let epsilon = match b.epsilon {
                1 => Sign::Plus,
                -1 => Sign::Minus,
                value => return Err(SpecError::Sign { index, value }),
            };
            blocks.push(BlockSpec::new(lambda, b.m, epsilon));
        }
        Self::new(blocks)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.blocks.is_empty() {
            return Err(SpecError::Empty);
        }
        for (i, b) in self.blocks.iter().enumerate() {
            b.check(i)?;
        }
        if self.blocks.iter().all(|b| b.lambda.is_zero() && b.m == 1) {
            return Err(SpecError::ZeroOperator);
        }
        Ok(())
    }

    /// `n − 1`, the dimension of the form's space.
    pub fn size(&self) -> usize {
        self.blocks.iter().map(BlockSpec::size).sum()
    }

    /// `n`, with `2n + 1` the real dimension of the hypersurface.
    pub fn n(&self) -> usize {
        self.size() + 1
    }

    pub fn is_nilpotent(&self) -> bool {
        self.blocks.iter().all(|b| b.lambda.is_zero())
    }

    /// Offsets of each block inside the `(n−1) × (n−1)` matrices.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut at = 0;
        for b in &self.blocks {
            out.push(at);
            at += b.size();
        }
        out
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.blocks.iter().map(ToString::to_string).collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// The building blocks of canonical pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimitiveKind {
    /// Jordan block `J_{λ,m}`.
    Jordan,
    /// `S_m`, ones on the anti-diagonal.
    AntiDiagonal,
    /// Nilpotent shift `T_m = J_{0,m}`.
    Shift,
    /// The operator block: `J_{λ,m}` for real λ, `[[0, J_{λ²,m}], [I, 0]]` otherwise.
    Operator,
    /// The form block: `S_m` for real λ, `S_{2m}` otherwise.
    Form,
    /// `diag(1, −1, 1, …)`.
    AlternatingSign,
    /// `diag(m/2, m/2 − 1, …, m/2 − m + 1)`.
    Scaling,
}

pub fn jordan(lambda: &Q, m: usize) -> ExactMatrix {
    ExactMatrix::from_fn(m, m, |r, c| {
        if r == c {
            lambda.clone()
        } else if c == r + 1 {
            Q::one()
        } else {
            Q::zero()
        }
    })
}

pub fn anti_diagonal(m: usize) -> ExactMatrix {
    ExactMatrix::from_fn(m, m, |r, c| if r + c + 1 == m { Q::one() } else { Q::zero() })
}

pub fn shift(m: usize) -> ExactMatrix {
    jordan(&Q::zero(), m)
}

pub fn alternating_sign(m: usize) -> ExactMatrix {
    let d: Vec<Q> = (0..m).map(|k| Q::from_int(if k % 2 == 0 { 1 } else { -1 })).collect();
    ExactMatrix::diagonal(&d)
}

pub fn scaling_diagonal(m: usize) -> ExactMatrix {
    let d: Vec<Q> = (0..m).map(|k| Q::ratio(m as i64 - 2 * k as i64, 2)).collect();
    ExactMatrix::diagonal(&d)
}

pub fn build_primitive(kind: PrimitiveKind, lambda: &Q, m: usize) -> Result<ExactMatrix, SpecError> {
    if m == 0 {
        return Err(SpecError::ZeroSize { index: 0 });
    }
    Ok(match kind {
        PrimitiveKind::Jordan => jordan(lambda, m),
        PrimitiveKind::AntiDiagonal => anti_diagonal(m),
        PrimitiveKind::Shift => shift(m),
        PrimitiveKind::AlternatingSign => alternating_sign(m),
        PrimitiveKind::Scaling => scaling_diagonal(m),
        PrimitiveKind::Form => anti_diagonal(if lambda.is_real() { m } else { 2 * m }),
        PrimitiveKind::Operator => {
            if lambda.re().is_negative() || lambda.im().is_negative() {
                return Err(SpecError::Quadrant { index: 0, lambda: Box::new(lambda.clone()) });
            }
            if lambda.is_real() {
                jordan(lambda, m)
            } else {
                let z = ExactMatrix::zeros(m, m);
                ExactMatrix::block2x2(&z, &jordan(&lambda.square(), m), &ExactMatrix::identity(m), &z)
            }
        }
    })
}

/// The canonical Hermitian form `H` and operator `A` of a spec.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalPair {
    pub h: ExactMatrix,
    pub a: ExactMatrix,
}

pub fn build_pair(spec: &SymbolSpec) -> Result<CanonicalPair, SpecError> {
    spec.validate()?;
    let mut hs = Vec::new();
    let mut ops = Vec::new();
    for b in &spec.blocks {
        hs.push(build_primitive(PrimitiveKind::Form, &b.lambda, b.m)?.scale(&b.epsilon.scalar()));
        ops.push(build_primitive(PrimitiveKind::Operator, &b.lambda, b.m)?);
    }
    Ok(CanonicalPair { h: ExactMatrix::direct_sum(&hs), a: ExactMatrix::direct_sum(&ops) })
}

/// A failed condition in [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PairViolation {
    #[error("H and A must be square matrices of the same size")]
    Shape,
    #[error("H is not Hermitian")]
    NotHermitian,
    #[error("H is degenerate")]
    Degenerate,
    #[error("H·conj(A) is not symmetric")]
    FormOperatorNotSymmetric,
    #[error("A·H⁻¹ is not symmetric")]
    OperatorInverseFormNotSymmetric,
}

/// Check that `H` is a nondegenerate Hermitian form and `A` is self-adjoint for it.
pub fn validate(h: &ExactMatrix, a: &ExactMatrix) -> Result<(), Vec<PairViolation>> {
    if !h.is_square() || h.shape() != a.shape() {
        return Err(vec![PairViolation::Shape]);
    }
    let mut errs = Vec::new();
    if !h.is_hermitian() {
        errs.push(PairViolation::NotHermitian);
    }
    match h.inverse() {
        None => errs.push(PairViolation::Degenerate),
        Some(h_inv) => {
            if !(a * &h_inv).is_symmetric() {
                errs.push(PairViolation::OperatorInverseFormNotSymmetric);
            }
        }
    }
    if !(h * &a.conj()).is_symmetric() {
        errs.push(PairViolation::FormOperatorNotSymmetric);
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// `A·Ā·A ∈ ℂ·A`.
pub fn is_regular(_h: &ExactMatrix, a: &ExactMatrix) -> bool {
    let cube = &(a * &a.conj()) * a;
    cube.proportionality(a).is_some()
}

/// `d(i, j)` for blocks `i` and `j` (0-based, either order).
pub fn d_pair(spec: &SymbolSpec, i: usize, j: usize) -> usize {
    let (bi, bj) = (&spec.blocks[i], &spec.blocks[j]);
    if bi.lambda != bj.lambda {
        return 0;
    }
    let class = bi.class();
    if i == j {
        return match class {
            EigenClass::Zero => bi.m.div_ceil(2),
            EigenClass::Imaginary => bi.m,
            EigenClass::PositiveReal | EigenClass::Generic => 0,
        };
    }
    let min = bi.m.min(bj.m);
    match class {
        EigenClass::PositiveReal => min,
        EigenClass::Zero | EigenClass::Generic => 2 * min,
        EigenClass::Imaginary => 4 * min,
    }
}

pub fn d_total(spec: &SymbolSpec) -> usize {
    let g = spec.blocks.len();
    (0..g).flat_map(|i| (i..g).map(move |j| (i, j))).map(|(i, j)| d_pair(spec, i, j)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(t: &[(Q, usize, i64)]) -> SymbolSpec {
        SymbolSpec::from_triples(t).unwrap()
    }

    fn q(v: i64) -> Q {
        Q::from_int(v)
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(
            build_primitive(PrimitiveKind::Jordan, &q(2), 2).unwrap(),
            ExactMatrix::from_ints(&[&[2, 1], &[0, 2]])
        );
        assert_eq!(
            build_primitive(PrimitiveKind::Operator, &Q::i(), 1).unwrap(),
            ExactMatrix::from_ints(&[&[0, -1], &[1, 0]])
        );
        assert_eq!(
            build_primitive(PrimitiveKind::Scaling, &q(0), 2).unwrap(),
            ExactMatrix::from_ints(&[&[1, 0], &[0, 0]])
        );
        assert_eq!(
            build_primitive(PrimitiveKind::AlternatingSign, &q(0), 3).unwrap(),
            ExactMatrix::diagonal(&[q(1), q(-1), q(1)])
        );
        assert!(build_primitive(PrimitiveKind::Operator, &q(-1), 1).is_err());
    }

    #[test]
    fn pair_examples() {
        let p = build_pair(&spec(&[(q(0), 2, 1), (q(0), 1, 1)])).unwrap();
        assert_eq!(p.h, ExactMatrix::from_ints(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]));
        assert_eq!(p.a, ExactMatrix::from_ints(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]));
        let p = build_pair(&spec(&[(Q::i(), 1, -1)])).unwrap();
        assert_eq!(p.h, ExactMatrix::from_ints(&[&[0, -1], &[-1, 0]]));
        assert_eq!(p.a, ExactMatrix::from_ints(&[&[0, -1], &[1, 0]]));
    }

    #[test]
    fn validate_examples() {
        let h = ExactMatrix::identity(2);
        let a = ExactMatrix::from_ints(&[&[0, 1], &[0, 0]]);
        assert!(validate(&h, &a).unwrap_err().contains(&PairViolation::FormOperatorNotSymmetric));
        let s = ExactMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert!(validate(&s, &a).is_ok());
    }

    #[test]
    fn regularity_examples() {
        let id = ExactMatrix::identity(2);
        assert!(!is_regular(&id, &ExactMatrix::diagonal(&[q(1), q(2)])));
        assert!(is_regular(&id, &id));
        let p = build_pair(&spec(&[(q(0), 2, 1), (q(0), 1, 1)])).unwrap();
        assert!(is_regular(&p.h, &p.a));
    }

    #[test]
    fn d_examples() {
        let s = spec(&[(q(0), 3, 1)]);
        assert_eq!(d_pair(&s, 0, 0), 2);
        let s = spec(&[(q(0), 2, 1), (q(0), 1, 1)]);
        assert_eq!(d_pair(&s, 0, 1), 2);
        assert_eq!(d_total(&s), 4);
    }

    #[test]
    fn json_parsing() {
        let s = SymbolSpec::from_json(r#"{"blocks":[{"lambda":{"re":"0","im":"1"},"m":2,"epsilon":1}]}"#).unwrap();
        assert_eq!(s.size(), 4);
        assert_eq!(SymbolSpec::from_json(&s.to_json()).unwrap(), s);
        let err = SymbolSpec::from_json(r#"{"blocks":[{"lambda":{"re":"-1","im":"0"},"m":1,"epsilon":1}]}"#);
        assert!(matches!(err, Err(SpecError::Quadrant { .. })));
        assert_eq!(SymbolSpec::from_json(r#"{"blocks":[]}"#), Err(SpecError::Empty));
        let err = SymbolSpec::from_json(r#"{"blocks":[{"lambda":{"re":"sqrt(2)","im":"0"},"m":1,"epsilon":1}]}"#);
        assert!(err.unwrap_err().to_string().contains("exact rational"));
        let err = SymbolSpec::from_json(r#"{"blocks":[{"lambda":{"re":"0","im":"0"},"m":1,"epsilon":1}]}"#);
        assert_eq!(err, Err(SpecError::ZeroOperator));
    }
}
