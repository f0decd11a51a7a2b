//! Numerical models of the generators.

use std::collections::HashMap;
use std::sync::Mutex;

use num_integer::Integer;
use num_traits::Zero;

use super::{normalize, parse_word_in, Cat, FunctorWord, Generator, WordError};
use crate::ci_lattice::{build_presentation, CompleteIntersection};
use crate::euler_ring::AmbientSpace;
use crate::lattice::{Comparison, LatticeOperator, LatticeResult};
use crate::linalg::unit_vector;
use crate::presentation::{Presentation, ResidualSuite};
use crate::quadric_spinor::quadric_presentation;
use crate::Int;

/// A presentation with its residual operators, used to evaluate words.
#[derive(Debug)]
pub struct Model {
    pub name: String,
    pub presentation: Presentation,
    pub suite: ResidualSuite,
    cache: Mutex<HashMap<(Generator, Cat), LatticeOperator>>,
}

fn bad(spec: &str, message: impl Into<String>) -> WordError {
    WordError::BadModel { spec: spec.into(), message: message.into() }
}

fn int_list(spec: &str, s: &str) -> Result<Vec<i64>, WordError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| bad(spec, format!("bad integer `{t}`")))).collect()
}

impl Model {
    pub fn new(presentation: Presentation) -> Result<Self, WordError> {
        let suite = presentation.residual_suite().map_err(|e| bad(&presentation.name, e.to_string()))?;
        Ok(Model { name: presentation.name.clone(), presentation, suite, cache: Mutex::new(HashMap::new()) })
    }

    /// Builds a model from `ci:P5:2,3`, `ci:P5:2,3:split=0`, `ci:w1,1,1,1,2:4`
    /// or `quadric:5:3` (quadric in `P^5`, divisor of degree 3).
    pub fn from_spec(spec: &str) -> Result<Self, WordError> {
        let parts: Vec<&str> = spec.split(':').collect();
        let presentation = match parts.as_slice() {
            ["ci", ambient, degrees, rest @ ..] => {
                let space = if let Some(n) = ambient.strip_prefix('P') {
                    AmbientSpace::projective(n.parse().map_err(|_| bad(spec, "bad ambient dimension"))?)
                } else if let Some(w) = ambient.strip_prefix('w') {
                    AmbientSpace::weighted(int_list(spec, w)?).map_err(|e| bad(spec, e.to_string()))?
                } else {
                    return Err(bad(spec, "ambient must be `P<n>` or `w<weights>`"));
                };
                let x = CompleteIntersection::new(space, &int_list(spec, degrees)?)
                    .map_err(|e| bad(spec, e.to_string()))?;
                let x = match rest {
                    [] => x.with_default_split(),
                    [s] => {
                        let i = s
                            .strip_prefix("split=")
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| bad(spec, "expected `split=<i>`"))?;
                        x.with_split(i).map_err(|e| bad(spec, e.to_string()))?
                    }
                    _ => return Err(bad(spec, "too many fields")),
                };
                build_presentation(&x).map_err(|e| bad(spec, e.to_string()))?
            }
            ["quadric", n, d] => {
                let n = n.parse().map_err(|_| bad(spec, "bad n"))?;
                let d = d.parse().map_err(|_| bad(spec, "bad d"))?;
                quadric_presentation(n, d).map_err(|e| bad(spec, e.to_string()))?
            }
            _ => return Err(bad(spec, "expected `ci:...` or `quadric:n:d`")),
        };
        let mut model = Model::new(presentation)?;
        model.name = spec.to_string();
        Ok(model)
    }

    /// `(m, d)`: source block length and divisor degree.
    pub fn params(&self) -> (i64, i64) {
        (self.presentation.m(), self.presentation.d())
    }

    pub fn rank(&self, cat: Cat) -> usize {
        match cat {
            Cat::C => self.presentation.source.rank(),
            Cat::D => self.presentation.target.rank(),
            Cat::RC => self.suite.source.residual.rank(),
            Cat::RD => self.suite.target.residual.rank(),
        }
    }

    fn build(&self, g: Generator, cat: Cat) -> LatticeResult<Option<LatticeOperator>> {
        use Generator::*;
        let p = &self.presentation;
        let side = match cat {
            Cat::RC => Some(&self.suite.source),
            Cat::RD => Some(&self.suite.target),
            _ => None,
        };
        Ok(Some(match (g, cat) {
            (SerreC, Cat::C) => p.source.serre_operator(),
            (SerreD, Cat::D) => p.target.serre_operator(),
            (AlphaC, Cat::C) => p.source.alpha_operator(),
            (AlphaD, Cat::D) => p.target.alpha_operator(),
            (Psi, Cat::C) => p.psi_op(),
            (PsiLeft, Cat::D) => p.psi_left_op(),
            (PsiRight, Cat::D) => p.psi_right_op(),
            (TwistC, Cat::C) => p.twist_source(),
            (TwistCInv, Cat::C) => p.twist_source_inv(),
            (TwistD, Cat::D) => p.twist_target(),
            (TwistDInv, Cat::D) => p.twist_target_inv(),
            (LeftMut, Cat::C) => p.left_projection_source()?,
            (LeftMut, Cat::D) => p.left_projection_target()?,
            (RightMut, Cat::C) => p.right_projection_source()?,
            (RightMut, Cat::D) => p.right_projection_target()?,
            (Rotation, Cat::C) => p.rotation_source()?,
            (Rotation, Cat::D) => p.rotation_target()?,
            (RotationInv, Cat::C) => p.inverse_rotation_source()?,
            (RotationInv, Cat::D) => p.inverse_rotation_target()?,
            (RotationInv, Cat::RC) => self.suite.source.residual.restrict(&p.inverse_rotation_source()?)?,
            (RotationInv, Cat::RD) => self.suite.target.residual.restrict(&p.inverse_rotation_target()?)?,
            (BlockTwistD, Cat::D) => p.block_twist_target()?,
            (ResidualTwistD, Cat::D) => p.residual_twist_on_target()?,
            (PsiRes, Cat::RC) => LatticeOperator::new("Psi_R", self.suite.psi_r.clone(), 0),
            (TwistRC, Cat::RC) => self.suite.source.twist_mutation.clone(),
            (TwistRD, Cat::RD) => self.suite.target.twist_mutation.clone(),
            (SerreRes, _) if side.is_some() => side.unwrap().serre_mutation.clone(),
            (Rotation, _) if side.is_some() => side.unwrap().rotation.clone(),
            (SerreFactor, _) if side.is_some() => side.unwrap().s.clone(),
            (TwistFactor, _) if side.is_some() => side.unwrap().t.clone(),
            _ => return Ok(None),
        }))
    }

    /// The operator of `g` read on `cat`.
    pub fn operator(&self, g: Generator, cat: Cat) -> Result<LatticeOperator, WordError> {
        if let Some(op) = self.cache.lock().expect("cache lock").get(&(g, cat)) {
            return Ok(op.clone());
        }
        let none = || WordError::NoInterpretation { generator: g.name().into(), cat };
        let op = self.build(g, cat).map_err(|_| none())?.ok_or_else(none)?.with_name(g.name());
        self.cache.lock().expect("cache lock").insert((g, cat), op.clone());
        Ok(op)
    }
}

/// Matrix-with-sign of a word in a model.
pub fn evaluate(w: &FunctorWord, model: &Model) -> Result<LatticeOperator, WordError> {
    let mut acc = LatticeOperator::shift(model.rank(w.source), w.shift);
    for l in w.letters.iter().rev() {
        let op = model.operator(l.generator, l.source)?;
        let powered = match l.exponent {
            1 => op,
            e => op.pow(e).map_err(|_| WordError::NotInvertible { name: l.generator.name().into(), cat: l.source })?,
        };
        acc = powered.compose(&acc);
    }
    Ok(acc.with_name(w.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equality {
    /// Same normal form.
    Equal,
    /// Different normal forms, same operator in each of this many models.
    EqualInAllModels(usize),
    /// Operators differ in `model`: on `witness`, or only by an overall sign.
    DistinguishedBy { model: String, witness: Vec<Int>, sign_only: bool },
}

fn sign_witness(op: &LatticeOperator) -> Vec<Int> {
    let n = op.matrix.cols();
    let j = (0..n).find(|&j| op.matrix.col(j).iter().any(|x| !x.is_zero())).unwrap_or(0);
    unit_vector(n, j)
}

pub fn equal_words(a: &FunctorWord, b: &FunctorWord, models: &[Model]) -> Result<Equality, WordError> {
    if (a.source, a.target) != (b.source, b.target) {
        return Err(WordError::DifferentTypes(a.to_string(), b.to_string()));
    }
    if normalize(a, None)? == normalize(b, None)? {
        return Ok(Equality::Equal);
    }
    for model in models {
        let ea = evaluate(a, model)?;
        let eb = evaluate(b, model)?;
        match ea.compare(&eb) {
            Comparison::Equal => {}
            Comparison::SignMismatch => {
                return Ok(Equality::DistinguishedBy {
                    model: model.name.clone(),
                    witness: sign_witness(&ea),
                    sign_only: true,
                })
            }
            Comparison::Mismatch { witness } => {
                return Ok(Equality::DistinguishedBy { model: model.name.clone(), witness, sign_only: false })
            }
        }
    }
    Ok(Equality::EqualInAllModels(models.len()))
}

/// Specs of the standard battery. Two of them have `d = m`.
pub const STANDARD_MODEL_SPECS: &[&str] = &[
    "ci:P5:3",
    "ci:P5:2,3",
    "ci:P5:3,2:split=0",
    "ci:P4:2,2",
    "ci:P3:4",
    "ci:P5:3,3",
    "ci:w1,1,1,1,2:4",
    "quadric:5:3",
];

pub fn standard_models() -> Vec<Model> {
    STANDARD_MODEL_SPECS.iter().map(|s| Model::from_spec(s).expect("standard model builds")).collect()
}

/// Which residual a Serre power identity lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

fn power(name: &str, e: i64) -> Option<String> {
    match e {
        0 => None,
        1 => Some(name.to_string()),
        e => Some(format!("{name}^{{{e}}}")),
    }
}

/// Both sides of `S_R^(d/c) = T^(m/c) t^(-m/c) s^(d/c)` on the source residual,
/// or `S_R^(d/c) = T^((m-d)/c) t^((d-m)/c) s^(d/c)` on the target residual.
pub fn serre_power_words(m: i64, d: i64, side: Side) -> Result<(FunctorWord, FunctorWord), WordError> {
    let c = d.gcd(&m);
    let (cat, twist, k) = match side {
        Side::Source => (Cat::RC, "T_RC", m),
        Side::Target => (Cat::RD, "T_RD", m - d),
    };
    let lhs = power("S_R", d / c).expect("d > 0");
    let rhs: Vec<String> =
        [power(twist, k / c), power("t_R", -k / c), power("s_R", d / c)].into_iter().flatten().collect();
    Ok((parse_word_in(&lhs, Some(cat))?, parse_word_in(&rhs.join(" ∘ "), Some(cat))?))
}
