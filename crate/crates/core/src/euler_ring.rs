//! Euler characteristics on (weighted) projective space and the ring of
//! twisting-sheaf classes.
//!
//! A class is a finitely supported combination of `[O(i)]`. The only relation
//! used is the Koszul relation `prod_i (1 - [O(-w_i)]) = 0`, which lets every
//! class be rewritten into the window `0..|w|`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::Int;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AmbientError {
    #[error("weights must be a nonempty list of positive integers")]
    InvalidWeights,
}

/// `P(w)`; straight projective space when every weight is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmbientSpace {
    weights: Vec<i64>,
}

impl AmbientSpace {
    pub fn projective(n: usize) -> Self {
        AmbientSpace { weights: vec![1; n + 1] }
    }

    pub fn weighted(weights: Vec<i64>) -> Result<Self, AmbientError> {
        if weights.is_empty() || weights.iter().any(|&w| w < 1) {
            return Err(AmbientError::InvalidWeights);
        }
        Ok(AmbientSpace { weights })
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Dimension `n`, one less than the number of weights.
    pub fn n(&self) -> i64 {
        self.weights.len() as i64 - 1
    }

    pub fn total_weight(&self) -> i64 {
        self.weights.iter().sum()
    }

    pub fn is_straight(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }

    /// Coefficients `c_e` of `prod_i (1 - h^{-w_i}) = sum_e c_e h^{-e}`.
    pub fn koszul_relation(&self) -> Vec<Int> {
        let mut poly = vec![Int::one()];
        for &w in &self.weights {
            poly = multiply_by_one_minus(&poly, w as usize);
        }
        poly
    }
}

impl std::fmt::Display for AmbientSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_straight() {
            write!(f, "P^{}", self.n())
        } else {
            let w: Vec<String> = self.weights.iter().map(i64::to_string).collect();
            write!(f, "P({})", w.join(","))
        }
    }
}

/// `poly * (1 - t^shift)` on dense coefficient lists.
fn multiply_by_one_minus(poly: &[Int], shift: usize) -> Vec<Int> {
    let mut out = vec![Int::zero(); poly.len() + shift];
    for (e, c) in poly.iter().enumerate() {
        out[e] += c;
        out[e + shift] -= c;
    }
    out
}

/// `chi(O(m))` on the ambient space.
pub fn euler_char(space: &AmbientSpace, m: i64) -> Int {
    if space.is_straight() {
        return polynomial_binomial(space.n(), m);
    }
    if m >= 0 {
        return monomial_count(space.weights(), m as usize);
    }
    let dual = -m - space.total_weight();
    if dual < 0 {
        return Int::zero();
    }
    let sign = if space.n().is_odd() { -Int::one() } else { Int::one() };
    sign * monomial_count(space.weights(), dual as usize)
}

/// `C(n+m, n)` as the polynomial `prod_{j=1..n} (m+j) / n!`.
fn polynomial_binomial(n: i64, m: i64) -> Int {
    let mut num = Int::one();
    let mut den = Int::one();
    for j in 1..=n {
        num *= Int::from(m + j);
        den *= Int::from(j);
    }
    num / den
}

/// Number of monomials of weighted degree `m`.
fn monomial_count(weights: &[i64], m: usize) -> Int {
    let mut counts = vec![Int::zero(); m + 1];
    counts[0] = Int::one();
    for &w in weights {
        let w = w as usize;
        for deg in w..=m {
            let prev = counts[deg - w].clone();
            counts[deg] += prev;
        }
    }
    counts.swap_remove(m)
}

/// Integer combination of `[O(i)]` on an ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KClass {
    space: AmbientSpace,
    coeffs: BTreeMap<i64, Int>,
}

impl KClass {
    pub fn zero(space: &AmbientSpace) -> Self {
        KClass { space: space.clone(), coeffs: BTreeMap::new() }
    }

    /// The class `[O(i)]`.
    pub fn line(space: &AmbientSpace, i: i64) -> Self {
        Self::from_terms(space, [(i, Int::one())])
    }

    pub fn from_terms(space: &AmbientSpace, terms: impl IntoIterator<Item = (i64, Int)>) -> Self {
        let mut c = Self::zero(space);
        for (i, v) in terms {
            c.add_term(i, v);
        }
        c
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Int> {
        &self.coeffs
    }

    pub fn coeff(&self, i: i64) -> Int {
        self.coeffs.get(&i).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, i: i64, v: Int) {
        if v.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(i).or_default();
        *slot += v;
        if slot.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn add(&self, other: &KClass) -> KClass {
        let mut out = self.clone();
        for (&i, v) in &other.coeffs {
            out.add_term(i, v.clone());
        }
        out
    }

    pub fn scale(&self, s: &Int) -> KClass {
        KClass::from_terms(&self.space, self.coeffs.iter().map(|(&i, v)| (i, v * s)))
    }

    /// Product in `Z[h, h^-1]`, unreduced.
    pub fn mul(&self, other: &KClass) -> KClass {
        let mut out = KClass::zero(&self.space);
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                out.add_term(i + j, a * b);
            }
        }
        out
    }

    pub fn in_window(&self) -> bool {
        let top = self.space.total_weight();
        self.coeffs.keys().all(|&i| (0..top).contains(&i))
    }

    /// Representative supported in `0..|w|`.
    pub fn reduce(&self) -> KClass {
        let rel = self.space.koszul_relation();
        let top = self.space.total_weight();
        let lead = rel[top as usize].clone();
        let mut c = self.clone();
        // h^i = -sum_{e>=1} c_e h^{i-e}
        while let Some((&i, _)) = c.coeffs.iter().next_back().filter(|(&i, _)| i >= top) {
            let v = c.coeffs.remove(&i).unwrap();
            for (e, ce) in rel.iter().enumerate().skip(1) {
                c.add_term(i - e as i64, -(&v * ce));
            }
        }
        // h^i = -(1/c_top) sum_{e<top} c_e h^{i+top-e}, with c_top = +-1
        while let Some((&i, _)) = c.coeffs.iter().next().filter(|(&i, _)| i < 0) {
            let v = c.coeffs.remove(&i).unwrap();
            for (e, ce) in rel.iter().enumerate().take(top as usize) {
                c.add_term(i + top - e as i64, -(&v * ce) * &lead);
            }
        }
        c
    }

    /// Multiplication by `[O(j)]`, then reduction.
    pub fn twist(&self, j: i64) -> KClass {
        KClass::from_terms(&self.space, self.coeffs.iter().map(|(&i, v)| (i + j, v.clone()))).reduce()
    }

    /// `chi(O(j), c)`.
    pub fn pairing_from(&self, j: i64) -> Int {
        self.coeffs.iter().map(|(&i, v)| v * euler_char(&self.space, i - j)).sum()
    }

    /// `chi` of the class.
    pub fn euler_char(&self) -> Int {
        self.pairing_from(0)
    }
}

/// Unreduced `prod_i (1 - [O(-d_i)])`.
fn koszul_product(space: &AmbientSpace, degrees: &[i64]) -> KClass {
    degrees.iter().fold(KClass::line(space, 0), |acc, &d| {
        acc.mul(&KClass::from_terms(space, [(0, Int::one()), (-d, -Int::one())]))
    })
}

/// Reduced class of the structure sheaf of a complete intersection.
pub fn koszul_class(space: &AmbientSpace, degrees: &[i64]) -> KClass {
    koszul_product(space, degrees).reduce()
}

/// `chi_X(O_X(a), O_X(b))` for the complete intersection of the given degrees.
pub fn pair(space: &AmbientSpace, degrees: &[i64], a: i64, b: i64) -> Int {
    koszul_product(space, degrees).pairing_from(a - b)
}

/// Sign `(-1)^e`.
pub(crate) fn parity_sign(e: i64) -> Int {
    if e.is_odd() {
        -Int::one()
    } else {
        Int::one()
    }
}
