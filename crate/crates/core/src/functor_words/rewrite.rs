//! Rewriting toward a normal form.
//!
//! Rules fire leftmost first, one step at a time, until nothing applies or
//! the step budget runs out. Shifts are central and live in the word's
//! shift counter. Commuting neighbours are sorted by generator name, and
//! equal neighbours are merged. No confluence is claimed.

use super::{Cat, FunctorWord, Generator, Letter, WordError};
use Generator::*;

pub const DEFAULT_BUDGET: usize = 10_000;

/// A relation used by the normalizer, with instances for testing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub id: &'static str,
    pub lhs: &'static str,
    pub rhs: &'static str,
    pub statement: &'static str,
    /// Needs the block length `m` and degree `d` of a presentation.
    pub needs_parameters: bool,
}

/// The rule table. Patterns use `m` and `d` for the presentation parameters.
pub fn rules() -> Vec<RewriteRule> {
    let r = |id, lhs, rhs, statement, needs_parameters| RewriteRule { id, lhs, rhs, statement, needs_parameters };
    vec![
        r("R1", "T_Cinv", "T_C^-1", "the two twists of a spherical functor are mutually inverse", false),
        r("R2", "Psi ∘ T_C ∘ [1]", "T_D ∘ [-1] ∘ Psi", "Psi intertwines the source and target twists", false),
        r(
            "R3",
            "S_D ∘ Psi ∘ S_C^-1",
            "T_D^-1 ∘ Psi ∘ [1]",
            "double right adjoint written through the target twist",
            false,
        ),
        r("R4", "S_C ∘ PsiL ∘ S_D^-1", "PsiR", "right adjoint from the left adjoint and Serre functors", false),
        r("R5", "S ∘ F", "F ∘ S", "Serre functors commute with autoequivalences", false),
        r("R6", "T_C ∘ a_C", "a_C ∘ T_C", "twists commute with the polarizations", false),
        r("R7", "T_RC", "O_B^-d ∘ t_R", "residual twist through rotation and t", true),
        r("R8", "S_R", "O_B^(len) ∘ s_R", "residual Serre functor through rotation and s", true),
        r("R9", "s_R ∘ t_R", "t_R ∘ s_R", "rotation, s, t and the residual twist commute", false),
        r(
            "R10",
            "T_D",
            "T_DR ∘ (T_DB ∘ a_D)^m ∘ a_D^-m",
            "twist factorization along the decomposition, d = m only",
            true,
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub word: FunctorWord,
    pub steps: usize,
    /// Rule ids in the order they fired.
    pub trace: Vec<&'static str>,
    pub budget_exceeded: bool,
}

fn letter(generator: Generator, exponent: i64, cat: Cat) -> Letter {
    Letter::new(generator, exponent, cat).expect("rule output is well typed")
}

fn is_serre(g: Generator) -> bool {
    matches!(g, SerreC | SerreD | SerreRes)
}

/// Rule id justifying a swap of adjacent endofunctors on the same category.
fn commutation(a: &Letter, b: &Letter) -> Option<&'static str> {
    if !(a.is_endo() && b.is_endo() && a.source == b.source) || a.generator == b.generator {
        return None;
    }
    let pair =
        |x: Generator, y: Generator| (a.generator == x && b.generator == y) || (a.generator == y && b.generator == x);
    let cat = a.source;
    let autoequivalence = |g: Generator| match cat {
        Cat::C => matches!(g, AlphaC | TwistC | TwistCInv),
        Cat::D => matches!(g, AlphaD | TwistD | TwistDInv),
        Cat::RC | Cat::RD => matches!(g, Rotation | RotationInv | SerreFactor | TwistFactor | TwistRC | TwistRD),
    };
    if is_serre(a.generator) && autoequivalence(b.generator) || is_serre(b.generator) && autoequivalence(a.generator) {
        return Some("R5");
    }
    if pair(TwistC, AlphaC) || pair(TwistCInv, AlphaC) || pair(TwistD, AlphaD) || pair(TwistDInv, AlphaD) {
        return Some("R6");
    }
    let clique = |g: Generator| matches!(g, Rotation | SerreFactor | TwistFactor | TwistRC | TwistRD);
    if cat.is_residual() && clique(a.generator) && clique(b.generator) {
        return Some("R9");
    }
    None
}

/// One rewrite at the leftmost position where any rule fires.
fn step(w: &mut FunctorWord, params: Option<(i64, i64)>) -> Option<&'static str> {
    for i in 0..w.letters.len() {
        let l = w.letters[i].clone();
        // R1: inverse names
        let renamed = match (l.generator, l.source) {
            (TwistCInv, _) => Some(TwistC),
            (TwistDInv, _) => Some(TwistD),
            (RotationInv, c) if c.is_residual() => Some(Rotation),
            _ => None,
        };
        if let Some(g) = renamed {
            w.letters[i] = letter(g, -l.exponent, l.source);
            return Some("R1");
        }
        let at =
            |k: usize, g: Generator, e: i64| w.letters.get(i + k).is_some_and(|x| x.generator == g && x.exponent == e);
        if at(0, SerreD, 1) && at(1, Psi, 1) && at(2, SerreC, -1) {
            w.letters.splice(i..i + 3, [letter(TwistD, -1, Cat::D), letter(Psi, 1, Cat::C)]);
            w.shift += 1;
            return Some("R3");
        }
        if at(0, SerreC, 1) && at(1, PsiLeft, 1) && at(2, SerreD, -1) {
            w.letters.splice(i..i + 3, [letter(PsiRight, 1, Cat::D)]);
            return Some("R4");
        }
        if l.generator == Psi {
            if let Some(next) = w.letters.get(i + 1).filter(|x| x.generator == TwistC).cloned() {
                let k = next.exponent;
                w.letters.splice(i..i + 2, [letter(TwistD, k, Cat::D), letter(Psi, 1, Cat::C)]);
                w.shift -= 2 * k;
                return Some("R2");
            }
        }
        if let Some((m, d)) = params {
            let cat = l.source;
            match l.generator {
                TwistRC | TwistRD => {
                    w.letters
                        .splice(i..=i, [letter(Rotation, -d * l.exponent, cat), letter(TwistFactor, l.exponent, cat)]);
                    return Some("R7");
                }
                SerreRes => {
                    let len = if cat == Cat::RC { m } else { m - d };
                    let mut out = Vec::new();
                    if len != 0 {
                        out.push(letter(Rotation, -len * l.exponent, cat));
                    }
                    out.push(letter(SerreFactor, l.exponent, cat));
                    w.letters.splice(i..=i, out);
                    return Some("R8");
                }
                _ => {}
            }
        }
        if let Some(next) = w.letters.get(i + 1).cloned() {
            if next.generator == l.generator && next.source == l.source && l.is_endo() {
                let e = l.exponent + next.exponent;
                if e == 0 {
                    w.letters.drain(i..i + 2);
                } else {
                    w.letters.splice(i..i + 2, [letter(l.generator, e, l.source)]);
                }
                return Some("merge");
            }
            if let Some(id) = commutation(&l, &next) {
                if l.generator.name() > next.generator.name() {
                    w.letters.swap(i, i + 1);
                    return Some(id);
                }
            }
        }
    }
    None
}

/// Normalizes with an explicit budget. `params` is `(m, d)` and enables
/// the rules tied to a presentation.
pub fn normalize_with(w: &FunctorWord, params: Option<(i64, i64)>, budget: usize) -> Normalized {
    let mut word = w.clone();
    let mut trace = Vec::new();
    for steps in 0..budget {
        match step(&mut word, params) {
            Some(id) => trace.push(id),
            None => return Normalized { word, steps, trace, budget_exceeded: false },
        }
    }
    let budget_exceeded = step(&mut word.clone(), params).is_some();
    Normalized { word, steps: budget, trace, budget_exceeded }
}

pub fn normalize(w: &FunctorWord, params: Option<(i64, i64)>) -> Result<FunctorWord, WordError> {
    let n = normalize_with(w, params, DEFAULT_BUDGET);
    if n.budget_exceeded {
        return Err(WordError::BudgetExceeded { partial: Box::new(n.word) });
    }
    Ok(n.word)
}

/// Replaces each positive power of `T_D` by its factorization along the
/// decomposition of the source. Only valid when `d = m`.
pub fn expand_twist_factorization(w: &FunctorWord, m: i64, d: i64) -> Result<FunctorWord, WordError> {
    if d != m {
        return Err(WordError::RuleNotApplicable("R10"));
    }
    let mut factor = vec![letter(ResidualTwistD, 1, Cat::D)];
    for _ in 0..m {
        factor.push(letter(BlockTwistD, 1, Cat::D));
        factor.push(letter(AlphaD, 1, Cat::D));
    }
    factor.push(letter(AlphaD, -m, Cat::D));
    let mut out = w.clone();
    out.letters.clear();
    for l in &w.letters {
        if l.generator == TwistD && l.exponent > 0 {
            for _ in 0..l.exponent {
                out.letters.extend(factor.iter().cloned());
            }
        } else {
            out.letters.push(l.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::parse_word;
    use super::*;

    fn norm(s: &str) -> String {
        normalize(&parse_word(s).unwrap(), None).unwrap().to_string()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(norm("T_C ∘ T_Cinv"), "id");
        assert_eq!(norm("S_D ∘ Psi ∘ S_C^-1"), "T_D^-1 ∘ Psi ∘ [1]");
        assert_eq!(norm("Psi ∘ T_C"), "T_D ∘ Psi ∘ [-2]");
    }

    #[test]
    fn serre_moves_past_autoequivalences() {
        assert_eq!(norm("S_C ∘ a_C ∘ T_C ∘ S_C^-1"), "T_C ∘ a_C");
        assert_eq!(norm("S_C ∘ PsiL ∘ S_D^-1"), "PsiR");
        // L_B is not an autoequivalence
        assert_eq!(norm("S_C ∘ L_B ∘ S_C^-1"), "S_C ∘ L_B ∘ S_C^-1");
    }

    #[test]
    fn parameter_rules() {
        let w = parse_word("T_RD ∘ S_R").unwrap();
        let n = normalize(&w, Some((4, 1))).unwrap();
        assert_eq!(n.to_string(), "O_B^-4 ∘ s_R ∘ t_R");
        assert_eq!(normalize(&w, None).unwrap().to_string(), "S_R ∘ T_RD");
    }

    #[test]
    fn residual_clique_sorts() {
        assert_eq!(norm("t_R ∘ s_R ∘ O_B ∘ t_R^-1"), "O_B ∘ s_R");
        assert_eq!(norm("O_Bprime ∘ O_B"), "id");
    }

    #[test]
    fn budget_is_reported() {
        let w = parse_word("t_R ∘ s_R ∘ O_B").unwrap();
        let n = normalize_with(&w, None, 1);
        assert!(n.budget_exceeded);
        assert!(!normalize_with(&w, None, 100).budget_exceeded);
    }

    #[test]
    fn factorization_needs_d_equal_m() {
        let w = parse_word("T_D").unwrap();
        assert!(expand_twist_factorization(&w, 3, 2).is_err());
        let e = expand_twist_factorization(&w, 2, 2).unwrap();
        assert_eq!(e.to_string(), "T_DR ∘ T_DB ∘ a_D ∘ T_DB ∘ a_D ∘ a_D^-2");
    }
}
