//! Lattices of complete intersections and the identities checked on them.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::euler_ring::{pair, parity_sign, AmbientSpace, KClass};
use crate::lattice::{LatticeError, LatticeOperator, LatticeResult, NumLattice, Residual, VerificationReport};
use crate::linalg::{unit_vector, vec_dot};
use crate::presentation::{Presentation, ResidualSuite};
use crate::{Int, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CiError {
    #[error("degrees must be positive")]
    BadDegree,
    #[error("not Fano: degrees sum to {sum}, exceeding the total weight {total}")]
    NotFano { sum: i64, total: i64 },
    #[error("more equations than the ambient dimension")]
    NegativeDimension,
    #[error("split index {0} out of range")]
    InvalidSplit(usize),
    #[error("a split presentation is required")]
    SplitRequired,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Complete intersection of the given degrees in `P(w)`.
///
/// Degrees are kept in descending order. On straight projective space a
/// degree-1 equation is absorbed by lowering the ambient dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompleteIntersection {
    space: AmbientSpace,
    degrees: Vec<i64>,
    split: Option<usize>,
}

impl CompleteIntersection {
    pub fn new(space: AmbientSpace, degrees: &[i64]) -> Result<Self, CiError> {
        if degrees.iter().any(|&d| d < 1) {
            return Err(CiError::BadDegree);
        }
        let mut degrees = degrees.to_vec();
        let mut space = space;
        if space.is_straight() {
            let linear = degrees.iter().filter(|&&d| d == 1).count();
            degrees.retain(|&d| d != 1);
            if linear as i64 > space.n() {
                return Err(CiError::NegativeDimension);
            }
            space = AmbientSpace::projective((space.n() - linear as i64) as usize);
        }
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        if degrees.len() as i64 > space.n() {
            return Err(CiError::NegativeDimension);
        }
        let sum: i64 = degrees.iter().sum();
        if sum > space.total_weight() {
            return Err(CiError::NotFano { sum, total: space.total_weight() });
        }
        Ok(CompleteIntersection { space, degrees, split: None })
    }

    pub fn projective(n: usize, degrees: &[i64]) -> Result<Self, CiError> {
        Self::new(AmbientSpace::projective(n), degrees)
    }

    /// Chooses which degree (index into the sorted list) is split off.
    pub fn with_split(mut self, i: usize) -> Result<Self, CiError> {
        if i >= self.degrees.len() {
            return Err(CiError::InvalidSplit(i));
        }
        self.split = Some(i);
        Ok(self)
    }

    /// Splits off the smallest degree, if there is one.
    pub fn with_default_split(self) -> Self {
        match self.degrees.len() {
            0 => self,
            k => self.with_split(k - 1).expect("index in range"),
        }
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn split(&self) -> Option<usize> {
        self.split
    }

    pub fn codim(&self) -> i64 {
        self.degrees.len() as i64
    }

    pub fn dim(&self) -> i64 {
        self.space.n() - self.codim()
    }

    pub fn index(&self) -> i64 {
        self.space.total_weight() - self.degrees.iter().sum::<i64>()
    }

    pub fn d_max(&self) -> Option<i64> {
        self.degrees.first().copied()
    }

    pub fn d_min(&self) -> Option<i64> {
        self.degrees.last().copied()
    }

    /// `prod d_i`, the degree on straight projective space.
    pub fn degree(&self) -> i64 {
        self.degrees.iter().product()
    }

    pub fn is_straight(&self) -> bool {
        self.space.is_straight()
    }

    /// `(M, d)` with `M` cut out by the remaining degrees.
    pub fn presentation(&self) -> Result<(CompleteIntersection, i64), CiError> {
        let i = self.split.ok_or(CiError::SplitRequired)?;
        let mut rest = self.degrees.clone();
        let d = rest.remove(i);
        let m = CompleteIntersection { space: self.space.clone(), degrees: rest, split: None };
        Ok((m, d))
    }
}

impl fmt::Display for CompleteIntersection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.degrees.iter().map(i64::to_string).collect();
        write!(f, "{}({})", self.space, d.join(","))?;
        if let Some(i) = self.split {
            write!(f, " split {}", self.degrees[i])?;
        }
        Ok(())
    }
}

/// Window size `|w|`.
fn window(x: &CompleteIntersection) -> usize {
    x.space.total_weight() as usize
}

/// Coordinates of a reduced class in the window basis.
fn window_coords(c: &KClass, size: usize) -> Vec<Int> {
    let r = c.reduce();
    (0..size as i64).map(|i| r.coeff(i)).collect()
}

/// Twist on the window classes `[O(0)], ..., [O(|w|-1)]`.
fn window_alpha(space: &AmbientSpace) -> IntMatrix {
    let size = space.total_weight() as usize;
    let cols: Vec<Vec<Int>> = (0..size).map(|i| window_coords(&KClass::line(space, i as i64 + 1), size)).collect();
    IntMatrix::from_columns(&cols, size)
}

/// Radical quotient of the window classes restricted to `X`.
pub fn build_lattice(x: &CompleteIntersection) -> Result<NumLattice, CiError> {
    let size = window(x);
    let top = size as i64;
    let values: Vec<Int> = (-(top - 1)..top).map(|t| pair(&x.space, &x.degrees, 0, t)).collect();
    let pre_gram = IntMatrix::from_fn(size, size, |i, j| values[j + size - 1 - i].clone());
    let labels = std::iter::once(("O".to_string(), unit_vector(size, 0)))
        .chain((0..size).map(|i| (format!("O({i})"), unit_vector(size, i))))
        .collect();
    let lattice = NumLattice::from_spanning_form(&pre_gram, &window_alpha(&x.space), labels, x.dim(), x.index())?;
    if x.is_straight() && lattice.rank() as i64 != x.dim() + 1 {
        return Err(
            LatticeError::InvariantViolated(format!("rank {} but dim + 1 = {}", lattice.rank(), x.dim() + 1)).into()
        );
    }
    Ok(lattice)
}

/// `(-1)^dim alpha^-index`.
pub fn serre_operator(lattice: &NumLattice) -> LatticeOperator {
    lattice.serre_operator()
}

/// `v -> L_[O_X](alpha v)`.
pub fn rotation_operator(lattice: &NumLattice) -> LatticeResult<LatticeOperator> {
    lattice.rotation_operator()
}

/// Right orthogonal of `[O_X], ..., [O_X(ind-1)]`.
pub fn residual_sublattice(lattice: &NumLattice) -> LatticeResult<Residual> {
    lattice.residual()
}

/// Restriction and pushforward between the lattices of `M` and `X`.
pub fn build_presentation(x: &CompleteIntersection) -> Result<Presentation, CiError> {
    let (m, d) = x.presentation()?;
    let source = build_lattice(&m)?;
    let target = build_lattice(x)?;
    let size = window(x);
    let p_src = &source.provenance().projection;
    let p_tgt = &target.provenance().projection;
    let psi = p_tgt.mul(&source.provenance().lift);
    let push_cols: Vec<Vec<Int>> = (0..size as i64)
        .map(|i| {
            let c = KClass::from_terms(&x.space, [(i, Int::one()), (i - d, -Int::one())]);
            window_coords(&c, size)
        })
        .collect();
    let push = IntMatrix::from_columns(&push_cols, size);
    let psi_right = p_src.mul(&push).mul(&target.provenance().lift);
    Ok(Presentation::new(x.to_string(), source, target, psi, psi_right, d)?)
}

/// All six residual operators of a split complete intersection.
pub fn residual_operator_suite(x: &CompleteIntersection) -> Result<ResidualSuite, CiError> {
    Ok(build_presentation(x)?.residual_suite()?)
}

/// `chi(O_{X_p}, O_{X_q})` for `0 <= p, q <= dim X`, where `X_p` is cut by
/// `p` further hyperplanes.
pub fn gram_filtration(x: &CompleteIntersection) -> Result<IntMatrix, CiError> {
    let lattice = build_lattice(x)?;
    let size = window(x);
    let dim = x.dim().max(0) as usize;
    let classes: Vec<Vec<Int>> = (0..=dim)
        .map(|p| {
            let hyperplanes = vec![1; p];
            let c = crate::euler_ring::koszul_class(&x.space, &hyperplanes);
            lattice.provenance().projection.mul_vec(&window_coords(&c, size))
        })
        .collect();
    Ok(IntMatrix::from_fn(dim + 1, dim + 1, |p, q| lattice.chi(&classes[p], &classes[q])))
}

/// Numerical test for a sigma-spherical collection with the given parities.
///
/// `gram` is the pairing on the lattice containing the classes and `serre`
/// the Serre operator of that lattice.
pub fn check_spherical_collection(
    gram: &IntMatrix,
    serre: &LatticeOperator,
    classes: &[Vec<Int>],
    sigma: &[usize],
    parities: &[i64],
) -> bool {
    let r = classes.len();
    if sigma.len() != r || parities.len() != r {
        return false;
    }
    let mut inverse = vec![usize::MAX; r];
    for (j, &s) in sigma.iter().enumerate() {
        if s >= r || inverse[s] != usize::MAX {
            return false;
        }
        inverse[s] = j;
    }
    let chi = |u: &[Int], v: &[Int]| vec_dot(u, &gram.mul_vec(v));
    for i in 0..r {
        for j in 0..r {
            let mut expected = Int::zero();
            if i == j {
                expected += 1;
            }
            if i == sigma[j] {
                expected += parity_sign(parities[j]);
            }
            if chi(&classes[i], &classes[j]) != expected {
                return false;
            }
        }
    }
    (0..r).all(|i| {
        let k = inverse[i];
        let expected: Vec<Int> = classes[k].iter().map(|x| x * parity_sign(parities[k])).collect();
        serre.apply(&classes[i]) == expected
    })
}

/// Lattice invariants, residual rank and the presentation identities.
pub fn verify_identities(x: &CompleteIntersection) -> VerificationReport {
    let mut rep = VerificationReport::new(x.to_string());
    let Some(lattice) = rep.check_result("build lattice", build_lattice(x)) else {
        return rep;
    };
    rep.check_result("lattice invariants", lattice.check_invariants().map(|_| ()));
    let Some(residual) = rep.check_result("residual sublattice", lattice.residual()) else {
        return rep;
    };
    if x.is_straight() {
        let expected: i64 = x.degrees.iter().map(|d| d - 1).sum();
        rep.check(
            "residual rank = sum(d_i - 1)",
            residual.rank() as i64 == expected,
            format!("rank {}", residual.rank()),
        );
    }
    if x.degrees.is_empty() {
        rep.check("empty residual", residual.rank() == 0, "no degrees, nothing to verify");
        return rep;
    }
    let x = if x.split.is_some() { x.clone() } else { x.clone().with_default_split() };
    let Some(presentation) = rep.check_result("presentation", build_presentation(&x)) else {
        return rep;
    };
    rep.check_result("source lattice invariants", presentation.source.check_invariants());
    rep.extend(VerificationReport { subject: String::new(), ..presentation.verify() });

    if x.codim() == 1 && x.is_straight() {
        let n = x.space.n();
        let d = x.degrees[0];
        let suite = presentation.residual_suite();
        if let Some(suite) = rep.check_result("hypersurface suite", suite) {
            let s = &suite.target.serre_mutation;
            let r = suite.target.residual.rank();
            if let Some(p) = rep.check_result("S_R^d", s.pow(d)) {
                rep.check_equal("S_R^d = [(n+1)(d-2)]", &p, &LatticeOperator::shift(r, (n + 1) * (d - 2)));
            }
            if let Some(p) = rep.check_result("rotation power", suite.target.rotation.pow(d * (n + 1 - d))) {
                rep.check("O_B^(d(n+1-d)) = Id on residual", p.matrix.is_identity(), "rotation order");
            }
        }
    }
    rep
}

/// Determinant of an operator, for summaries.
pub fn determinant_sign(op: &LatticeOperator) -> Option<i8> {
    let det = op.determinant();
    if det.is_one() {
        Some(1)
    } else if det.is_negative() && det.abs().is_one() {
        Some(-1)
    } else {
        None
    }
}

/// Descending degree tuples of length `k`, entries at least 2, that are
/// Fano on `P^n`.
pub fn degree_tuples(n: usize, k: usize) -> Vec<Vec<i64>> {
    fn go(budget: i64, max: i64, left: usize, acc: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            out.push(acc.clone());
            return;
        }
        for d in (2..=max.min(budget - 2 * (left as i64 - 1))).rev() {
            acc.push(d);
            go(budget - d, d, left - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        let budget = n as i64 + 1;
        go(budget, budget, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Every straight complete intersection with `n <= max_n`, `1 <= k <= max_k`
/// and every choice of split degree.
pub fn split_family(max_n: usize, max_k: usize) -> Vec<CompleteIntersection> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for k in 1..=max_k {
            for degrees in degree_tuples(n, k) {
                let x = CompleteIntersection::projective(n, &degrees).expect("Fano by construction");
                let mut seen = Vec::new();
                for (i, d) in degrees.iter().enumerate() {
                    if !seen.contains(d) {
                        seen.push(*d);
                        out.push(x.clone().with_split(i).expect("index in range"));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Side;

    fn ci(n: usize, degrees: &[i64]) -> CompleteIntersection {
        CompleteIntersection::projective(n, degrees).unwrap()
    }

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    /// Oracle for the ambient Gram matrix: `chi(O(i), O(j)) = C(n + j - i, n)`.
    fn binomial_poly(n: i64, m: i64) -> i64 {
        let mut num: i128 = 1;
        let mut den: i128 = 1;
        for j in 1..=n {
            num *= (m + j) as i128;
            den *= j as i128;
        }
        (num / den) as i64
    }

    #[test]
    fn validation_and_normalization() {
        let x = ci(5, &[1, 3]);
        assert_eq!(x.space().n(), 4);
        assert_eq!(x.degrees(), &[3]);
        assert_eq!(ci(5, &[2, 3]).degrees(), &[3, 2]);
        assert!(matches!(CompleteIntersection::projective(3, &[3, 2]), Err(CiError::NotFano { .. })));
        assert_eq!(ci(3, &[4]).index(), 0);
        assert_eq!(CompleteIntersection::projective(3, &[0]), Err(CiError::BadDegree));
        assert_eq!(ci(5, &[3]).presentation(), Err(CiError::SplitRequired));
    }

    #[test]
    fn lattice_ranks() {
        assert_eq!(build_lattice(&ci(5, &[3])).unwrap().rank(), 5);
        assert_eq!(build_lattice(&ci(5, &[2, 3])).unwrap().rank(), 4);
        let pn = build_lattice(&ci(4, &[])).unwrap();
        assert_eq!(pn.rank(), 5);
        for i in 0..5 {
            for j in 0..5 {
                let u = pn.twisting_class(i).unwrap();
                let v = pn.twisting_class(j).unwrap();
                assert_eq!(pn.chi(&u, &v), int(binomial_poly(4, j - i)));
            }
        }
    }

    #[test]
    fn lattice_invariants_hold() {
        for x in [ci(5, &[3]), ci(5, &[2, 3]), ci(3, &[2]), ci(3, &[4]), ci(6, &[2, 2, 2])] {
            build_lattice(&x).unwrap().check_invariants().unwrap();
        }
        let w = CompleteIntersection::new(AmbientSpace::weighted(vec![1, 1, 1, 2]).unwrap(), &[4]).unwrap();
        build_lattice(&w).unwrap().check_invariants().unwrap();
    }

    #[test]
    fn serre_operator_signs() {
        let q = build_lattice(&ci(3, &[2])).unwrap();
        assert_eq!(serre_operator(&q).sign, 1);
        assert_eq!(serre_operator(&q).matrix, q.alpha_pow(-2));
        let g = build_lattice(&ci(5, &[2, 3])).unwrap();
        assert_eq!(serre_operator(&g).sign, -1);
        assert_eq!(serre_operator(&g).matrix, g.alpha_pow(-1));
    }

    #[test]
    fn mutation_example_on_cubic_fourfold() {
        let l = build_lattice(&ci(5, &[3])).unwrap();
        let o = l.twisting_class(0).unwrap();
        let o1 = l.twisting_class(1).unwrap();
        let expected: Vec<Int> = o1.iter().zip(&o).map(|(a, b)| a - int(6) * b).collect();
        assert_eq!(l.left_mutation(&o, &o1).unwrap(), expected);
    }

    #[test]
    fn block_mutation_reproduces_rotation_powers() {
        let x = ci(5, &[2, 3]);
        let l = build_lattice(&x).unwrap();
        let res = l.residual().unwrap();
        let rot = l.rotation_operator().unwrap();
        for i in 0..=l.index() {
            let block: Vec<Vec<Int>> = (0..i).map(|j| l.twisting_class(j).unwrap()).collect();
            for r in res.sub.basis.columns() {
                let moved = l.alpha_pow(i).mul_vec(&r);
                let via_block = l.mutate_through_block(&block, &moved, Side::Left).unwrap();
                assert_eq!(rot.pow(i).unwrap().apply(&r), via_block);
            }
        }
    }

    #[test]
    fn residual_ranks() {
        assert_eq!(build_lattice(&ci(5, &[3])).unwrap().residual().unwrap().rank(), 2);
        assert_eq!(build_lattice(&ci(5, &[2, 3])).unwrap().residual().unwrap().rank(), 3);
        assert_eq!(build_lattice(&ci(5, &[])).unwrap().residual().unwrap().rank(), 0);
    }

    #[test]
    fn rotation_examples() {
        let q = build_lattice(&ci(3, &[2])).unwrap();
        let res = q.residual().unwrap();
        let rot = res.restrict(&q.rotation_operator().unwrap()).unwrap();
        assert_eq!(rot.rank(), 1);
        assert!(rot.matrix[(0, 0)].abs().is_one());
        let c = build_lattice(&ci(5, &[3])).unwrap();
        let res = c.residual().unwrap();
        let rot = res.restrict(&c.rotation_operator().unwrap()).unwrap();
        assert!(rot.pow(3).unwrap().is_unimodular());
    }

    #[test]
    fn suite_examples() {
        let cubic = ci(5, &[3]).with_default_split();
        let suite = residual_operator_suite(&cubic).unwrap();
        let o = &suite.target.rotation;
        let expected = o.pow(-3).unwrap();
        assert_eq!(suite.target.twist_mutation.compare(&expected), crate::lattice::Comparison::Equal);
        assert_eq!(suite.target.twist_mutation.sign, 1);

        let quadric = ci(3, &[2]).with_default_split();
        let suite = residual_operator_suite(&quadric).unwrap();
        assert!(suite.target.serre_mutation.effective().is_identity());

        assert_eq!(residual_operator_suite(&ci(5, &[3])).unwrap_err(), CiError::SplitRequired);
    }

    #[test]
    fn cubic_fourfold_is_fractional_cy() {
        let suite = residual_operator_suite(&ci(5, &[3]).with_default_split()).unwrap();
        assert!(suite.target.serre_mutation.pow(3).unwrap().effective().is_identity());
    }

    #[test]
    fn verify_examples() {
        for x in [ci(5, &[3]), ci(5, &[2, 3]), ci(4, &[]), ci(3, &[4]), ci(5, &[3, 3])] {
            let rep = verify_identities(&x);
            assert!(rep.passed(), "{x}: {:?}", rep.first_failure());
        }
    }

    #[test]
    fn gram_filtration_examples() {
        for (x, deg) in [(ci(3, &[3]), 3), (ci(2, &[]), 1), (ci(5, &[2, 3]), 6)] {
            let g = gram_filtration(&x).unwrap();
            let dim = x.dim() as usize;
            for p in 0..=dim {
                for q in 0..=dim {
                    if p + q > dim {
                        assert!(g[(p, q)].is_zero());
                    } else if p + q == dim {
                        assert_eq!(g[(p, q)].abs(), int(deg));
                    }
                }
            }
        }
    }

    #[test]
    fn spherical_collection_single_class() {
        // P with chi(P, P) = 1 + (-1)^n and S(P) = (-1)^n P
        for n in [2i64, 3] {
            let chi = 1 + if n % 2 == 0 { 1 } else { -1 };
            let gram = IntMatrix::from_rows(vec![vec![int(chi)]]);
            let serre = LatticeOperator::new("S", IntMatrix::identity(1), n);
            assert!(check_spherical_collection(&gram, &serre, &[vec![int(1)]], &[0], &[n]));
        }
    }
}
