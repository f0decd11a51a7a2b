//! Lattices with an Euler pairing, and integer operators acting on them.
//!
//! Conventions: classes are column vectors, `gram[(i, j)] = chi(e_i, e_j)`,
//! so `chi(u, v) = u^T G v`. An operator's matrix acts on columns. A shift
//! `[s]` contributes the scalar `(-1)^s`, kept apart from the matrix in
//! [`LatticeOperator::sign`].

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::{solve_lower_unitriangular, solve_upper_unitriangular, unit_vector, vec_dot, Sublattice};
use crate::{Int, IntMatrix, IntSublattice};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("left and right radicals of the pairing differ")]
    RadicalMismatch,
    #[error("twist operator does not preserve the radical")]
    TwistBreaksRadical,
    #[error("operator `{0}` is not invertible over the integers")]
    NotUnimodular(String),
    #[error("class is not numerically exceptional: chi(e, e) = {0}")]
    NotExceptional(Int),
    #[error("block Gram matrix is not unitriangular in the given order")]
    BlockNotUnitriangular,
    #[error("operator `{0}` does not preserve the sublattice")]
    NotInvariant(String),
    #[error("unknown class label `{0}`")]
    UnknownLabel(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

pub type LatticeResult<T> = Result<T, LatticeError>;

/// How a quotient lattice was obtained from its spanning classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// Number of spanning classes before the radical quotient.
    pub pre_rank: usize,
    /// `rank x pre_rank`; sends a spanning combination to quotient coordinates.
    pub projection: IntMatrix,
    /// `pre_rank x rank`; a section of `projection`.
    pub lift: IntMatrix,
}

/// Nondegenerate integer lattice with an Euler pairing and a twist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumLattice {
    gram: IntMatrix,
    alpha: IntMatrix,
    alpha_inv: IntMatrix,
    dim: i64,
    index: i64,
    labels: BTreeMap<String, Vec<Int>>,
    provenance: Provenance,
}

impl NumLattice {
    /// Quotients a spanning set by the radical of its pairing.
    ///
    /// `pre_alpha` gives the twist on the spanning classes (columns);
    /// `dim` and `index` fix the Serre operator `(-1)^dim alpha^-index`.
    pub fn from_spanning_form(
        pre_gram: &IntMatrix,
        pre_alpha: &IntMatrix,
        pre_labels: Vec<(String, Vec<Int>)>,
        dim: i64,
        index: i64,
    ) -> LatticeResult<Self> {
        let n = pre_gram.rows();
        let right = pre_gram.right_kernel();
        let left = pre_gram.left_kernel();
        let s = right.cols();
        if left.cols() != s || !pre_gram.transpose().mul(&right).is_zero() {
            return Err(LatticeError::RadicalMismatch);
        }
        let e = right.echelon();
        let u_inv = e.u.inverse().expect("echelon transform is unimodular");
        let projection = e.u.select_rows(s..n);
        let lift = u_inv.select_cols(s..n);
        if !projection.mul(pre_alpha).mul(&right).is_zero() {
            return Err(LatticeError::TwistBreaksRadical);
        }
        let gram = lift.transpose().mul(pre_gram).mul(&lift);
        let alpha = projection.mul(pre_alpha).mul(&lift);
        let alpha_inv = alpha.inverse().ok_or_else(|| LatticeError::NotUnimodular("alpha".into()))?;
        let labels = pre_labels.into_iter().map(|(k, v)| (k, projection.mul_vec(&v))).collect();
        Ok(NumLattice {
            gram,
            alpha,
            alpha_inv,
            dim,
            index,
            labels,
            provenance: Provenance { pre_rank: n, projection, lift },
        })
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn alpha(&self) -> &IntMatrix {
        &self.alpha
    }

    pub fn alpha_inv(&self) -> &IntMatrix {
        &self.alpha_inv
    }

    /// `alpha^k` for any integer `k`.
    pub fn alpha_pow(&self, k: i64) -> IntMatrix {
        if k >= 0 {
            self.alpha.pow(k as u64)
        } else {
            self.alpha_inv.pow(k.unsigned_abs())
        }
    }

    pub fn dim(&self) -> i64 {
        self.dim
    }

    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn labels(&self) -> &BTreeMap<String, Vec<Int>> {
        &self.labels
    }

    pub fn label(&self, name: &str) -> LatticeResult<Vec<Int>> {
        self.labels.get(name).cloned().ok_or_else(|| LatticeError::UnknownLabel(name.to_string()))
    }

    pub fn insert_label(&mut self, name: impl Into<String>, class: Vec<Int>) {
        assert_eq!(class.len(), self.rank());
        self.labels.insert(name.into(), class);
    }

    /// Class of the structure sheaf.
    pub fn structure_class(&self) -> LatticeResult<Vec<Int>> {
        self.label("O")
    }

    /// `[O(i)] = alpha^i [O]`.
    pub fn twisting_class(&self, i: i64) -> LatticeResult<Vec<Int>> {
        Ok(self.alpha_pow(i).mul_vec(&self.structure_class()?))
    }

    pub fn chi(&self, u: &[Int], v: &[Int]) -> Int {
        vec_dot(u, &self.gram.mul_vec(v))
    }

    pub fn serre_operator(&self) -> LatticeOperator {
        LatticeOperator::new("S", self.alpha_pow(-self.index), self.dim)
    }

    pub fn alpha_operator(&self) -> LatticeOperator {
        LatticeOperator::new("alpha", self.alpha.clone(), 0)
    }

    /// Checks twist equivariance, the Serre relation and nondegeneracy.
    pub fn check_invariants(&self) -> LatticeResult<()> {
        let g = &self.gram;
        if self.alpha.transpose().mul(g).mul(&self.alpha) != *g {
            return Err(LatticeError::InvariantViolated("pairing is not alpha-equivariant".into()));
        }
        let s = self.serre_operator().effective();
        if g.mul(&s).transpose() != *g {
            return Err(LatticeError::InvariantViolated("Serre relation fails".into()));
        }
        if g.determinant().is_zero() {
            return Err(LatticeError::InvariantViolated("pairing is degenerate".into()));
        }
        Ok(())
    }

    /// The rectangular block `[O], [O(1)], ..., [O(index-1)]`.
    pub fn rectangular_block(&self) -> LatticeResult<Vec<Vec<Int>>> {
        (0..self.index.max(0)).map(|i| self.twisting_class(i)).collect()
    }

    /// `L_e(v) = v - chi(e, v) e`.
    pub fn left_mutation(&self, e: &[Int], v: &[Int]) -> LatticeResult<Vec<Int>> {
        self.require_exceptional(e)?;
        Ok(axpy(v, &-self.chi(e, v), e))
    }

    /// `R_e(v) = v - chi(v, e) e`.
    pub fn right_mutation(&self, e: &[Int], v: &[Int]) -> LatticeResult<Vec<Int>> {
        self.require_exceptional(e)?;
        Ok(axpy(v, &-self.chi(v, e), e))
    }

    fn require_exceptional(&self, e: &[Int]) -> LatticeResult<()> {
        let c = self.chi(e, e);
        if c.is_one() {
            Ok(())
        } else {
            Err(LatticeError::NotExceptional(c))
        }
    }

    /// Gram matrix of an ordered list of classes.
    pub fn block_gram(&self, block: &[Vec<Int>]) -> IntMatrix {
        IntMatrix::from_fn(block.len(), block.len(), |i, j| self.chi(&block[i], &block[j]))
    }

    /// Projection along a semiorthogonal block.
    ///
    /// `Left` lands in `{x : chi(b, x) = 0}`, `Right` in `{x : chi(x, b) = 0}`.
    pub fn mutate_through_block(&self, block: &[Vec<Int>], v: &[Int], side: Side) -> LatticeResult<Vec<Int>> {
        let g = self.block_gram(block);
        if !is_upper_unitriangular(&g) {
            return Err(LatticeError::BlockNotUnitriangular);
        }
        let coeffs = match side {
            Side::Left => {
                let w: Vec<Int> = block.iter().map(|b| self.chi(b, v)).collect();
                solve_upper_unitriangular(&g, &w)
            }
            Side::Right => {
                let w: Vec<Int> = block.iter().map(|b| self.chi(v, b)).collect();
                solve_lower_unitriangular(&g.transpose(), &w)
            }
        };
        let mut out = v.to_vec();
        for (c, b) in coeffs.iter().zip(block) {
            out = axpy(&out, &-c.clone(), b);
        }
        Ok(out)
    }

    /// Matrix of [`Self::mutate_through_block`] as a linear map.
    pub fn block_projection(&self, block: &[Vec<Int>], side: Side) -> LatticeResult<IntMatrix> {
        let n = self.rank();
        let cols = (0..n)
            .map(|j| self.mutate_through_block(block, &unit_vector(n, j), side))
            .collect::<LatticeResult<Vec<_>>>()?;
        Ok(IntMatrix::from_columns(&cols, n))
    }

    /// `{v : chi(b, v) = 0 for every b in block}`.
    pub fn right_orthogonal(&self, block: &[Vec<Int>]) -> IntSublattice {
        let rows: Vec<Vec<Int>> = block.iter().map(|b| self.gram.transpose().mul_vec(b)).collect();
        kernel_sublattice(rows, self.rank())
    }

    /// `{v : chi(v, b) = 0 for every b in block}`.
    pub fn left_orthogonal(&self, block: &[Vec<Int>]) -> IntSublattice {
        let rows: Vec<Vec<Int>> = block.iter().map(|b| self.gram.mul_vec(b)).collect();
        kernel_sublattice(rows, self.rank())
    }

    /// Residual sublattice: the right orthogonal of the rectangular block.
    pub fn residual(&self) -> LatticeResult<Residual> {
        Ok(Residual::new(self, self.right_orthogonal(&self.rectangular_block()?)))
    }

    /// `v -> L_[O](alpha v)` on the whole lattice; plain `alpha` at index 0.
    pub fn rotation_operator(&self) -> LatticeResult<LatticeOperator> {
        if self.index == 0 {
            return Ok(LatticeOperator::new("O_B", self.alpha.clone(), 0));
        }
        let proj = self.block_projection(&[self.structure_class()?], Side::Left)?;
        Ok(LatticeOperator::new("O_B", proj.mul(&self.alpha), 0))
    }

    /// Numerical spherical twist `v -> v - sum_i chi(P_i, v) P_i`.
    pub fn twist_along(&self, classes: &[Vec<Int>]) -> IntMatrix {
        let n = self.rank();
        let cols: Vec<Vec<Int>> = (0..n)
            .map(|j| {
                let v = unit_vector(n, j);
                classes.iter().fold(v.clone(), |acc, p| axpy(&acc, &-self.chi(p, &v), p))
            })
            .collect();
        IntMatrix::from_columns(&cols, n)
    }
}

fn kernel_sublattice(rows: Vec<Vec<Int>>, n: usize) -> IntSublattice {
    let basis = if rows.is_empty() { IntMatrix::identity(n) } else { IntMatrix::from_rows(rows).right_kernel() };
    Sublattice::from_basis(basis).expect("kernels are saturated")
}

fn is_upper_unitriangular(g: &IntMatrix) -> bool {
    (0..g.rows()).all(|i| g[(i, i)].is_one() && (0..i).all(|j| g[(i, j)].is_zero()))
}

/// `v + s * e`.
pub(crate) fn axpy(v: &[Int], s: &Int, e: &[Int]) -> Vec<Int> {
    if s.is_zero() {
        return v.to_vec();
    }
    v.iter().zip(e).map(|(a, b)| a + s * b).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Sublattice together with its restricted pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub sub: IntSublattice,
    pub gram: IntMatrix,
}

impl Residual {
    pub fn new(lattice: &NumLattice, sub: IntSublattice) -> Self {
        let gram = sub.restrict_form(lattice.gram());
        Residual { sub, gram }
    }

    pub fn rank(&self) -> usize {
        self.sub.rank()
    }

    pub fn chi(&self, u: &[Int], v: &[Int]) -> Int {
        vec_dot(u, &self.gram.mul_vec(v))
    }

    /// Restricts an operator of the ambient lattice.
    pub fn restrict(&self, op: &LatticeOperator) -> LatticeResult<LatticeOperator> {
        let m = self.sub.restrict(&op.matrix).ok_or_else(|| LatticeError::NotInvariant(op.name.clone()))?;
        Ok(LatticeOperator { name: op.name.clone(), matrix: m, sign: op.sign })
    }

    pub fn coordinates(&self, v: &[Int]) -> LatticeResult<Vec<Int>> {
        self.sub.coordinates(v).ok_or_else(|| LatticeError::NotInvariant("class outside residual".into()))
    }
}

/// Integer matrix with a tracked shift parity.
#[derive(Clone, PartialEq, Eq)]
pub struct LatticeOperator {
    pub name: String,
    pub matrix: IntMatrix,
    /// `+1` or `-1`.
    pub sign: i8,
}

/// Outcome of comparing two operators as numerical maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    /// Matrices agree up to an overall sign that the shifts do not supply.
    SignMismatch,
    /// A basis vector on which the two maps differ.
    Mismatch {
        witness: Vec<Int>,
    },
}

impl Comparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, Comparison::Equal)
    }
}

impl LatticeOperator {
    /// Operator with matrix `matrix` and shift `[shift]`.
    pub fn new(name: impl Into<String>, matrix: IntMatrix, shift: i64) -> Self {
        LatticeOperator { name: name.into(), matrix, sign: if shift.is_odd() { -1 } else { 1 } }
    }

    pub fn identity(n: usize) -> Self {
        Self::new("id", IntMatrix::identity(n), 0)
    }

    pub fn shift(n: usize, s: i64) -> Self {
        Self::new(format!("[{s}]"), IntMatrix::identity(n), s)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `sign * matrix`.
    pub fn effective(&self) -> IntMatrix {
        if self.sign < 0 {
            self.matrix.neg()
        } else {
            self.matrix.clone()
        }
    }

    /// `self after other`.
    pub fn compose(&self, other: &LatticeOperator) -> LatticeOperator {
        LatticeOperator {
            name: format!("{} o {}", self.name, other.name),
            matrix: self.matrix.mul(&other.matrix),
            sign: self.sign * other.sign,
        }
    }

    pub fn shifted(&self, s: i64) -> LatticeOperator {
        let mut out = self.clone();
        if s.is_odd() {
            out.sign = -out.sign;
        }
        out
    }

    pub fn inverse(&self) -> LatticeResult<LatticeOperator> {
        let m = self.matrix.inverse().ok_or_else(|| LatticeError::NotUnimodular(self.name.clone()))?;
        Ok(LatticeOperator { name: format!("{}^-1", self.name), matrix: m, sign: self.sign })
    }

    pub fn pow(&self, e: i64) -> LatticeResult<LatticeOperator> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(LatticeOperator {
            name: format!("{}^{}", self.name, e),
            matrix: base.matrix.pow(k),
            sign: if k % 2 == 1 { base.sign } else { 1 },
        })
    }

    pub fn determinant(&self) -> Int {
        self.matrix.determinant()
    }

    pub fn is_unimodular(&self) -> bool {
        self.matrix.is_square() && self.determinant().abs().is_one()
    }

    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        let w = self.matrix.mul_vec(v);
        if self.sign < 0 {
            w.into_iter().map(|x| -x).collect()
        } else {
            w
        }
    }

    pub fn commutes_with(&self, other: &LatticeOperator) -> bool {
        self.matrix.mul(&other.matrix) == other.matrix.mul(&self.matrix)
    }

    pub fn compare(&self, other: &LatticeOperator) -> Comparison {
        let a = self.effective();
        let b = other.effective();
        if a == b {
            return Comparison::Equal;
        }
        if !a.is_zero() && a == b.neg() {
            return Comparison::SignMismatch;
        }
        let n = a.cols();
        let j = (0..n).find(|&j| a.col(j) != b.col(j)).expect("matrices differ in some column");
        Comparison::Mismatch { witness: unit_vector(n, j) }
    }
}

impl fmt::Debug for LatticeOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (sign {:+}) {:?}", self.name, self.sign, self.matrix)
    }
}

/// One named check in a verification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<Vec<Int>>,
}

/// Pass/fail record for a family of identities on one subject.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        VerificationReport { subject: subject.into(), checks: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into(), witness: None });
    }

    /// Records an operator equality, keeping the witness on failure.
    pub fn check_equal(&mut self, name: impl Into<String>, lhs: &LatticeOperator, rhs: &LatticeOperator) {
        let cmp = lhs.compare(rhs);
        let (passed, detail, witness) = match cmp {
            Comparison::Equal => (true, String::from("equal"), None),
            Comparison::SignMismatch => (false, String::from("matrices equal, sign mismatch"), None),
            Comparison::Mismatch { witness } => (false, String::from("matrices differ"), Some(witness)),
        };
        self.checks.push(Check { name: name.into(), passed, detail, witness });
    }

    /// Records a fallible step; an error becomes a failed check.
    pub fn check_result<T>(&mut self, name: impl Into<String>, r: Result<T, impl fmt::Display>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(name, false, e.to_string());
                None
            }
        }
    }

    pub fn extend(&mut self, other: VerificationReport) {
        let prefix = other.subject;
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.name = format!("{prefix}: {}", c.name);
            }
            self.checks.push(c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    /// Lattice of `P^1`: basis O, O(1), chi(O(a), O(b)) = b - a + 1.
    fn p1() -> NumLattice {
        let g = IntMatrix::from_rows(vec![ints(&[1, 2]), ints(&[0, 1])]);
        // O(2) = 2 O(1) - O
        let a = IntMatrix::from_rows(vec![ints(&[0, -1]), ints(&[1, 2])]);
        NumLattice::from_spanning_form(&g, &a, vec![("O".into(), ints(&[1, 0]))], 1, 2).unwrap()
    }

    #[test]
    fn projective_line_invariants() {
        let l = p1();
        l.check_invariants().unwrap();
        assert_eq!(l.residual().unwrap().rank(), 0);
    }

    #[test]
    fn single_mutations() {
        let l = p1();
        let e = ints(&[1, 0]);
        let v = ints(&[0, 1]);
        assert_eq!(l.left_mutation(&e, &v).unwrap(), ints(&[-2, 1]));
        assert_eq!(l.right_mutation(&e, &v).unwrap(), v);
        assert!(matches!(l.left_mutation(&ints(&[1, 1]), &v), Err(LatticeError::NotExceptional(_))));
    }

    #[test]
    fn block_order_matters() {
        let l = p1();
        let block = vec![ints(&[0, 1]), ints(&[1, 0])];
        assert_eq!(
            l.mutate_through_block(&block, &ints(&[1, 0]), Side::Left),
            Err(LatticeError::BlockNotUnitriangular)
        );
        assert_eq!(l.mutate_through_block(&[], &ints(&[3, 4]), Side::Left).unwrap(), ints(&[3, 4]));
    }

    #[test]
    fn operator_comparison_reports_sign() {
        let a = LatticeOperator::new("a", IntMatrix::identity(2), 0);
        let b = LatticeOperator::new("b", IntMatrix::identity(2), 1);
        assert_eq!(a.compare(&b), Comparison::SignMismatch);
        assert_eq!(a.compare(&b.shifted(1)), Comparison::Equal);
        let c = LatticeOperator::new("c", IntMatrix::from_rows(vec![ints(&[1, 1]), ints(&[0, 1])]), 0);
        assert_eq!(a.compare(&c), Comparison::Mismatch { witness: ints(&[0, 1]) });
    }

    #[test]
    fn radical_mismatch_is_reported() {
        // chi(e1, e0) = 1 only: left kernel e0, right kernel e1
        let g = IntMatrix::from_rows(vec![ints(&[0, 0]), ints(&[1, 0])]);
        let a = IntMatrix::identity(2);
        assert_eq!(NumLattice::from_spanning_form(&g, &a, vec![], 0, 0).unwrap_err(), LatticeError::RadicalMismatch);
    }
}
