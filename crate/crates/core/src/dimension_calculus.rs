//! Serre dimensions and F-dimensions of residual categories, in exact
//! rational arithmetic.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::Signed;

use crate::ci_lattice::{CiError, CompleteIntersection};
use crate::{Int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimError {
    #[error("not Fano: index {0} is negative")]
    NotFano(i64),
    #[error("residual category is zero")]
    EmptyResidual,
    #[error("formula needs straight projective space")]
    WeightedAmbient,
    #[error("refined category needs odd n >= 5, got {0}")]
    BadParity(i64),
    #[error("split degree {split} is larger than the remaining minimum {min}")]
    SplitNotSmallest { split: i64, min: i64 },
    #[error("power must be positive, got {0}")]
    NonPositivePower(i64),
    #[error("spherical degree must be at least 1, got {0}")]
    BadSphericalDegree(i64),
    #[error("lower bound {lower} exceeds upper bound {upper}")]
    InvertedBounds { upper: String, lower: String },
    #[error(transparent)]
    Ci(#[from] CiError),
}

fn q(num: i64, den: i64) -> Rational {
    Rational::new(Int::from(num), Int::from(den))
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// A rational number or one of the two infinities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extended {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Extended {
    pub fn int(v: i64) -> Self {
        Extended::Finite(q(v, 1))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Extended::Finite(q(num, den))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(r) => Some(r),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Extended::NegInf => 0,
            Extended::Finite(_) => 1,
            Extended::PosInf => 2,
        }
    }

    fn add(&self, r: &Rational) -> Self {
        match self {
            Extended::Finite(x) => Extended::Finite(x + r),
            inf => inf.clone(),
        }
    }

    fn neg(&self) -> Self {
        match self {
            Extended::NegInf => Extended::PosInf,
            Extended::Finite(x) => Extended::Finite(-x),
            Extended::PosInf => Extended::NegInf,
        }
    }

    /// Multiplication by a positive rational.
    fn scale(&self, r: &Rational) -> Self {
        debug_assert!(r.is_positive());
        match self {
            Extended::Finite(x) => Extended::Finite(x * r),
            inf => inf.clone(),
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => write!(f, "-inf"),
            Extended::PosInf => write!(f, "inf"),
            Extended::Finite(r) => fmt_rational(r, f),
        }
    }
}

/// Upper and lower F-dimension of an endofunctor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FDim {
    upper: Extended,
    lower: Extended,
}

impl FDim {
    pub fn new(upper: Extended, lower: Extended) -> Result<Self, DimError> {
        if lower > upper {
            return Err(DimError::InvertedBounds { upper: upper.to_string(), lower: lower.to_string() });
        }
        Ok(FDim { upper, lower })
    }

    pub fn finite(upper: Rational, lower: Rational) -> Result<Self, DimError> {
        Self::new(Extended::Finite(upper), Extended::Finite(lower))
    }

    fn from_ints(upper: i64, lower: i64) -> Self {
        FDim { upper: Extended::int(upper), lower: Extended::int(lower) }
    }

    pub fn upper(&self) -> &Extended {
        &self.upper
    }

    pub fn lower(&self) -> &Extended {
        &self.lower
    }

    fn scaled(&self, r: &Rational) -> FDim {
        FDim { upper: self.upper.scale(r), lower: self.lower.scale(r) }
    }
}

impl fmt::Display for FDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.upper, self.lower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FDimOp {
    Shift(i64),
    Power(i64),
    Invert,
}

/// Effect of shifting, taking a positive power, or inverting.
pub fn fdim_algebra(dim: &FDim, op: FDimOp) -> Result<FDim, DimError> {
    Ok(match op {
        FDimOp::Shift(n) => {
            let n = q(n, 1);
            FDim { upper: dim.upper.add(&n), lower: dim.lower.add(&n) }
        }
        FDimOp::Power(p) if p < 1 => return Err(DimError::NonPositivePower(p)),
        FDimOp::Power(p) => dim.scaled(&q(p, 1)),
        FDimOp::Invert => FDim { upper: dim.lower.neg(), lower: dim.upper.neg() },
    })
}

/// Dimensions of `F^e`, allowing `e <= 0`.
fn signed_power(dim: &FDim, e: i64) -> Result<FDim, DimError> {
    match e.cmp(&0) {
        Ordering::Greater => fdim_algebra(dim, FDimOp::Power(e)),
        Ordering::Equal => Ok(FDim::from_ints(0, 0)),
        Ordering::Less => fdim_algebra(&fdim_algebra(dim, FDimOp::Invert)?, FDimOp::Power(-e)),
    }
}

/// Serre dimensions read off from `S^p = T^e [s]`.
fn dims_from_identity(twist: &FDim, serre_power: i64, twist_power: i64, shift: i64) -> Result<FDim, DimError> {
    let lhs = fdim_algebra(&signed_power(twist, twist_power)?, FDimOp::Shift(shift))?;
    Ok(lhs.scaled(&q(1, serre_power)))
}

fn require_fano_straight(x: &CompleteIntersection) -> Result<(), DimError> {
    if !x.is_straight() {
        return Err(DimError::WeightedAmbient);
    }
    if x.index() < 0 {
        return Err(DimError::NotFano(x.index()));
    }
    Ok(())
}

/// `(usdim, lsdim) = (dim - 2 ind / d_max, dim - 2 ind / d_min)`.
pub fn serre_dims(x: &CompleteIntersection) -> Result<(Rational, Rational), DimError> {
    require_fano_straight(x)?;
    let (dmax, dmin) = match (x.d_max(), x.d_min()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(DimError::EmptyResidual),
    };
    let dim = q(x.dim(), 1);
    let ind = x.index();
    Ok((dim.clone() - q(2 * ind, dmax), dim - q(2 * ind, dmin)))
}

fn is_odd_dimensional_quadric(x: &CompleteIntersection) -> bool {
    x.is_straight() && x.degrees() == [2] && x.dim().is_odd()
}

/// `dim - 2 ceil(ind / d_max)`, and 0 for odd-dimensional quadrics.
pub fn hochschild_level(x: &CompleteIntersection) -> i64 {
    if is_odd_dimensional_quadric(x) {
        return 0;
    }
    match x.d_max() {
        Some(dmax) => x.dim() - 2 * Integer::div_ceil(&x.index(), &dmax),
        None => x.dim(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geometricity {
    pub possible: bool,
    /// Dimension a geometric model would need.
    pub required_dim: Option<i64>,
}

/// Equal degrees `d` with `d | 2(n+1)` are necessary; then `dim Z = n + k - 2(n+1)/d`.
pub fn geometricity_test(x: &CompleteIntersection) -> Geometricity {
    let no = Geometricity { possible: false, required_dim: None };
    let Some(&d) = x.degrees().first() else { return no };
    if !x.is_straight() || x.degrees().iter().any(|&e| e != d) {
        return no;
    }
    let n = x.space().n();
    if (2 * (n + 1)) % d != 0 {
        return no;
    }
    Geometricity { possible: true, required_dim: Some(n + x.codim() - 2 * (n + 1) / d) }
}

/// True when no Serre-invariant pre-stability condition can exist.
pub fn obstruction_from_dims(usdim: &Rational, lsdim: &Rational) -> bool {
    usdim != lsdim
}

pub fn serre_invariance_obstruction(x: &CompleteIntersection) -> Result<bool, DimError> {
    let (u, l) = serre_dims(x)?;
    Ok(obstruction_from_dims(&u, &l))
}

/// F-dimensions of the residual twists of a split presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistDims {
    /// `None` when the source residual is zero.
    pub source: Option<FDim>,
    pub target: FDim,
}

fn split_data(x: &CompleteIntersection) -> Result<(CompleteIntersection, i64), DimError> {
    require_fano_straight(x)?;
    let x = if x.split().is_some() { x.clone() } else { x.clone().with_default_split() };
    let (m, dk) = x.presentation()?;
    if let Some(min) = m.d_min() {
        if dk > min {
            return Err(DimError::SplitNotSmallest { split: dk, min });
        }
    }
    Ok((m, dk))
}

/// Twist dimensions forced by the induction on codimension.
pub fn twist_dim_ledger(x: &CompleteIntersection) -> Result<TwistDims, DimError> {
    let (m, dk) = split_data(x)?;
    let target = match m.d_max() {
        Some(d1) => FDim { upper: Extended::Finite(q(2, 1) - q(2 * dk, d1)), lower: Extended::int(0) },
        None => FDim::from_ints(0, 0),
    };
    let source = match (m.d_max(), m.d_min()) {
        (Some(d1), Some(dlast)) => {
            Some(FDim { upper: Extended::ratio(-2 * dk, d1), lower: Extended::ratio(-2 * dk, dlast) })
        }
        _ => None,
    };
    Ok(TwistDims { source, target })
}

/// Serre dimensions recomputed from the twist ledger through
/// `S^(d/c) = T^(ind/c) [shift/c]` on both sides of the presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rederivation {
    pub source: Option<(FDim, (Rational, Rational))>,
    pub target: (FDim, (Rational, Rational)),
}

impl Rederivation {
    pub fn consistent(&self) -> bool {
        let agrees = |(dims, (u, l)): &(FDim, (Rational, Rational))| {
            dims.upper.finite() == Some(u) && dims.lower.finite() == Some(l)
        };
        agrees(&self.target) && self.source.as_ref().is_none_or(agrees)
    }
}

pub fn rederive_serre_dims(x: &CompleteIntersection) -> Result<Rederivation, DimError> {
    let (m, dk) = split_data(x)?;
    let ledger = twist_dim_ledger(x)?;
    let x_ind = x.index();
    let m_ind = m.index();
    let c = dk.gcd(&m_ind);
    let target_dims = dims_from_identity(&ledger.target, dk / c, x_ind / c, (dk * x.dim() - 2 * x_ind) / c)?;
    let target = (target_dims, serre_dims(x)?);
    let source = match ledger.source {
        Some(t) => Some((dims_from_identity(&t, dk / c, m_ind / c, dk * m.dim() / c)?, serre_dims(&m)?)),
        None => None,
    };
    Ok(Rederivation { source, target })
}

/// `(0, 1 - d)` for a `d`-spherical object with nonzero orthogonal.
pub fn spherical_twist_dims(d: i64) -> Result<FDim, DimError> {
    if d < 1 {
        return Err(DimError::BadSphericalDegree(d));
    }
    Ok(FDim::from_ints(0, 1 - d))
}

fn check_refined(n: i64) -> Result<(), DimError> {
    if n < 5 || n.is_even() {
        return Err(DimError::BadParity(n));
    }
    Ok(())
}

/// `(2n - 7, ((n-2)^2 - 2)/(n-2))`.
pub fn refined_ax_dims(n: i64) -> Result<(Rational, Rational), DimError> {
    check_refined(n)?;
    Ok((q(2 * n - 7, 1), q((n - 2) * (n - 2) - 2, n - 2)))
}

/// Same dimensions through `S^(n-2) = T_K^((3-n)/2) [(n-2)^2 - 2]`.
pub fn refined_ax_dims_from_twist(n: i64) -> Result<FDim, DimError> {
    check_refined(n)?;
    let twist = spherical_twist_dims(2 * n - 7)?;
    dims_from_identity(&twist, n - 2, (3 - n) / 2, (n - 2) * (n - 2) - 2)
}

/// `S^p = T^e tau^t [s]`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SerrePowerIdentity {
    pub serre_exponent: i64,
    pub twist_exponent: i64,
    pub involution_exponent: i64,
    pub shift: i64,
}

impl SerrePowerIdentity {
    pub fn shift_is_even(&self) -> bool {
        self.shift.is_even()
    }
}

impl fmt::Display for SerrePowerIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S^{} = T^{}", self.serre_exponent, self.twist_exponent)?;
        if self.involution_exponent != 0 {
            write!(f, " tau^{}", self.involution_exponent)?;
        }
        write!(f, " [{}]", self.shift)
    }
}

/// Double cover of `M` branched in degree `2 d_k`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct DoubleCoverReport {
    pub branch_degree: i64,
    pub c: i64,
    pub dim_m: i64,
    pub ind_m: i64,
    pub dim_x: i64,
    pub ind_x: i64,
    pub source: SerrePowerIdentity,
    pub target: SerrePowerIdentity,
}

pub fn double_cover_report(m: &CompleteIntersection, dk: i64) -> Result<DoubleCoverReport, DimError> {
    if dk < 1 {
        return Err(CiError::BadDegree.into());
    }
    let ind_m = m.index();
    let ind_x = ind_m - dk;
    if ind_x < 0 {
        return Err(DimError::NotFano(ind_x));
    }
    let dim = m.dim();
    let c = dk.gcd(&ind_m);
    let source = SerrePowerIdentity {
        serre_exponent: dk / c,
        twist_exponent: ind_m / c,
        involution_exponent: 0,
        shift: (dk * dim - ind_m) / c,
    };
    let target = SerrePowerIdentity {
        serre_exponent: dk / c,
        twist_exponent: ind_x / c,
        involution_exponent: ind_x / c,
        shift: (dk * dim - ind_x) / c,
    };
    Ok(DoubleCoverReport { branch_degree: 2 * dk, c, dim_m: dim, ind_m, dim_x: dim, ind_x, source, target })
}

/// Everything the formulas say about one complete intersection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionReport {
    pub x: CompleteIntersection,
    pub usdim: Rational,
    pub lsdim: Rational,
    /// Set when all degrees agree.
    pub frac_cy: Option<Rational>,
    pub hl: i64,
    pub geometricity: Geometricity,
    pub serre_invariant_possible: bool,
    pub twist_dims: TwistDims,
    /// Holds in characteristic zero for every smooth complete intersection.
    pub smoothly_attainable_assumed: bool,
    pub notes: Vec<String>,
}

pub fn dimension_report(x: &CompleteIntersection) -> Result<DimensionReport, DimError> {
    let (usdim, lsdim) = serre_dims(x)?;
    let hl = hochschild_level(x);
    assert!(lsdim <= usdim, "lsdim exceeds usdim for {x}");
    assert!(q(hl, 1) <= usdim, "hl exceeds usdim for {x}");
    let x_split = if x.split().is_some() { x.clone() } else { x.clone().with_default_split() };
    let twist_dims = twist_dim_ledger(&x_split)?;
    let frac_cy = (usdim == lsdim).then(|| usdim.clone());
    let mut notes = vec!["smooth attainability assumed (characteristic 0)".to_string()];
    if is_odd_dimensional_quadric(x) {
        notes.push("odd-dimensional quadric: hl = 0".to_string());
    }
    Ok(DimensionReport {
        x: x.clone(),
        serre_invariant_possible: !obstruction_from_dims(&usdim, &lsdim),
        usdim,
        lsdim,
        frac_cy,
        hl,
        geometricity: geometricity_test(x),
        twist_dims,
        smoothly_attainable_assumed: true,
        notes,
    })
}

/// `p/q` text, or just `p` for integers.
pub fn rational_string(r: &Rational) -> String {
    Extended::Finite(r.clone()).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ci(n: usize, d: &[i64]) -> CompleteIntersection {
        CompleteIntersection::projective(n, d).unwrap()
    }

    fn fd(u: (i64, i64), l: (i64, i64)) -> FDim {
        FDim::new(Extended::ratio(u.0, u.1), Extended::ratio(l.0, l.1)).unwrap()
    }

    #[test]
    fn serre_dims_examples() {
        assert_eq!(serre_dims(&ci(5, &[3])).unwrap(), (q(2, 1), q(2, 1)));
        assert_eq!(serre_dims(&ci(5, &[2, 3])).unwrap(), (q(7, 3), q(2, 1)));
        assert_eq!(serre_dims(&ci(3, &[2])).unwrap(), (q(0, 1), q(0, 1)));
        assert_eq!(serre_dims(&ci(4, &[])), Err(DimError::EmptyResidual));
    }

    #[test]
    fn hochschild_examples() {
        assert_eq!(hochschild_level(&ci(5, &[2, 3])), 1);
        assert_eq!(hochschild_level(&ci(4, &[2])), 0);
        assert_eq!(hochschild_level(&ci(5, &[3])), 2);
    }

    #[test]
    fn geometricity_examples() {
        assert_eq!(geometricity_test(&ci(6, &[2, 2, 2])), Geometricity { possible: true, required_dim: Some(2) });
        assert!(!geometricity_test(&ci(5, &[2, 3])).possible);
        assert_eq!(geometricity_test(&ci(5, &[3])).required_dim, Some(2));
    }

    #[test]
    fn obstruction_examples() {
        assert!(serre_invariance_obstruction(&ci(5, &[2, 3])).unwrap());
        assert!(!serre_invariance_obstruction(&ci(5, &[3])).unwrap());
        let (u, l) = refined_ax_dims(5).unwrap();
        assert!(obstruction_from_dims(&u, &l));
    }

    #[test]
    fn twist_ledger_examples() {
        let t = twist_dim_ledger(&ci(5, &[3, 2])).unwrap();
        assert_eq!(t.target, fd((2, 3), (0, 1)));
        assert_eq!(t.source, Some(fd((-4, 3), (-4, 3))));
        assert_eq!(twist_dim_ledger(&ci(5, &[3])).unwrap().source, None);
        assert_eq!(twist_dim_ledger(&ci(7, &[2, 2])).unwrap().target, fd((0, 1), (0, 1)));
        let bad = ci(5, &[3, 2]).with_split(0).unwrap();
        assert!(matches!(twist_dim_ledger(&bad), Err(DimError::SplitNotSmallest { .. })));
    }

    #[test]
    fn spherical_and_refined() {
        assert_eq!(spherical_twist_dims(1).unwrap(), fd((0, 1), (0, 1)));
        assert_eq!(spherical_twist_dims(3).unwrap(), fd((0, 1), (-2, 1)));
        assert_eq!(refined_ax_dims(5).unwrap(), (q(3, 1), q(7, 3)));
        assert_eq!(refined_ax_dims(7).unwrap(), (q(7, 1), q(23, 5)));
        assert_eq!(refined_ax_dims(6), Err(DimError::BadParity(6)));
        for n in [5, 7, 9, 11] {
            let (u, l) = refined_ax_dims(n).unwrap();
            assert_eq!(refined_ax_dims_from_twist(n).unwrap(), FDim::finite(u, l).unwrap());
        }
    }

    #[test]
    fn fdim_algebra_examples() {
        assert_eq!(fdim_algebra(&fd((2, 1), (2, 1)), FDimOp::Shift(3)).unwrap(), fd((5, 1), (5, 1)));
        assert_eq!(fdim_algebra(&fd((0, 1), (-2, 1)), FDimOp::Invert).unwrap(), fd((2, 1), (0, 1)));
        assert_eq!(fdim_algebra(&fd((7, 3), (2, 1)), FDimOp::Power(3)).unwrap(), fd((7, 1), (6, 1)));
        assert!(fdim_algebra(&fd((0, 1), (0, 1)), FDimOp::Power(0)).is_err());
        assert!(FDim::new(Extended::int(0), Extended::int(1)).is_err());
        assert!(Extended::NegInf < Extended::int(-100) && Extended::int(100) < Extended::PosInf);
    }

    #[test]
    fn double_cover_examples() {
        let r = double_cover_report(&ci(3, &[]), 2).unwrap();
        assert_eq!(r.c, 2);
        assert_eq!(
            r.target,
            SerrePowerIdentity { serre_exponent: 1, twist_exponent: 1, involution_exponent: 1, shift: 2 }
        );
        assert!(r.target.shift_is_even());
        assert_eq!(r.source.shift, 1);
        assert!(!r.source.shift_is_even());
        assert!(matches!(double_cover_report(&ci(3, &[]), 5), Err(DimError::NotFano(_))));
    }

    #[test]
    fn family_invariants() {
        for n in 1..=12usize {
            for k in 1..=4usize {
                for degrees in crate::ci_lattice::degree_tuples(n, k) {
                    let x = ci(n, &degrees);
                    if x.codim() == 0 {
                        continue;
                    }
                    let rep = dimension_report(&x).unwrap();
                    // at index 0 both dimensions equal dim X whatever the degrees
                    let all_equal = x.index() == 0 || x.degrees().iter().all(|&d| d == x.degrees()[0]);
                    assert_eq!(rep.usdim == rep.lsdim, all_equal, "{x}");
                    if let Some(dz) = rep.geometricity.required_dim {
                        assert_eq!(q(dz, 1), rep.usdim, "{x}");
                    }
                    assert!(rederive_serre_dims(&x).unwrap().consistent(), "{x}");
                }
            }
        }
    }

    fn arb_ext() -> impl Strategy<Value = Extended> {
        prop_oneof![
            1 => Just(Extended::NegInf),
            1 => Just(Extended::PosInf),
            8 => (-50i64..50, 1i64..12).prop_map(|(a, b)| Extended::ratio(a, b)),
        ]
    }

    fn arb_fdim() -> impl Strategy<Value = FDim> {
        (arb_ext(), arb_ext()).prop_map(|(a, b)| {
            let (u, l) = if a >= b { (a, b) } else { (b, a) };
            FDim::new(u, l).unwrap()
        })
    }

    proptest! {
        #[test]
        fn shift_is_additive(f in arb_fdim(), a in -20i64..20, b in -20i64..20) {
            let once = fdim_algebra(&f, FDimOp::Shift(a + b)).unwrap();
            let twice = fdim_algebra(&fdim_algebra(&f, FDimOp::Shift(a)).unwrap(), FDimOp::Shift(b)).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn power_is_homogeneous(f in arb_fdim(), a in 1i64..6, b in 1i64..6) {
            let once = fdim_algebra(&f, FDimOp::Power(a * b)).unwrap();
            let twice = fdim_algebra(&fdim_algebra(&f, FDimOp::Power(a)).unwrap(), FDimOp::Power(b)).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn invert_is_involutive(f in arb_fdim()) {
            let back = fdim_algebra(&fdim_algebra(&f, FDimOp::Invert).unwrap(), FDimOp::Invert).unwrap();
            prop_assert!(back.lower() <= back.upper());
            prop_assert_eq!(back, f);
        }
    }
}
