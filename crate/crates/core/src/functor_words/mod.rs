//! Words in the functors attached to a presentation, with a parser, a
//! rewriting normalizer and numerical evaluation.
//!
//! Equality of words is decided syntactically after normalization, or else
//! relative to a list of lattice models. Agreement in every model is weaker
//! than an isomorphism of functors and is reported as such.

use std::fmt;

mod eval;
mod parse;
mod rewrite;

pub use eval::{equal_words, evaluate, serre_power_words, standard_models, Equality, Model, Side};
pub use parse::{parse_word, parse_word_in};
pub use rewrite::{
    expand_twist_factorization, normalize, normalize_with, rules, Normalized, RewriteRule, DEFAULT_BUDGET,
};

/// Category a functor acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Cat {
    C,
    D,
    #[serde(rename = "R_C")]
    RC,
    #[serde(rename = "R_D")]
    RD,
}

impl Cat {
    /// Order in which an untyped word is tried.
    pub const PREFERENCE: [Cat; 4] = [Cat::RD, Cat::RC, Cat::D, Cat::C];

    pub fn is_residual(self) -> bool {
        matches!(self, Cat::RC | Cat::RD)
    }

    pub fn parse(s: &str) -> Option<Cat> {
        match s {
            "C" => Some(Cat::C),
            "D" => Some(Cat::D),
            "R_C" | "RC" => Some(Cat::RC),
            "R_D" | "RD" => Some(Cat::RD),
            _ => None,
        }
    }
}

impl fmt::Display for Cat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cat::C => "C",
            Cat::D => "D",
            Cat::RC => "R_C",
            Cat::RD => "R_D",
        })
    }
}

macro_rules! generators {
    ($($variant:ident => $name:literal : [$(($s:ident, $t:ident)),+]),+ $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Generator { $($variant),+ }

        impl Generator {
            pub const ALL: &'static [Generator] = &[$(Generator::$variant),+];

            pub fn name(self) -> &'static str {
                match self { $(Generator::$variant => $name),+ }
            }

            /// Every `(source, target)` this generator can be read with.
            pub fn signatures(self) -> &'static [(Cat, Cat)] {
                match self { $(Generator::$variant => &[$((Cat::$s, Cat::$t)),+]),+ }
            }
        }
    };
}

generators! {
    SerreC => "S_C": [(C, C)],
    SerreD => "S_D": [(D, D)],
    SerreRes => "S_R": [(RC, RC), (RD, RD)],
    AlphaC => "a_C": [(C, C)],
    AlphaD => "a_D": [(D, D)],
    Psi => "Psi": [(C, D)],
    PsiLeft => "PsiL": [(D, C)],
    PsiRight => "PsiR": [(D, C)],
    TwistC => "T_C": [(C, C)],
    TwistCInv => "T_Cinv": [(C, C)],
    TwistD => "T_D": [(D, D)],
    TwistDInv => "T_Dinv": [(D, D)],
    LeftMut => "L_B": [(C, C), (D, D)],
    RightMut => "R_B": [(C, C), (D, D)],
    Rotation => "O_B": [(C, C), (RC, RC), (D, D), (RD, RD)],
    RotationInv => "O_Bprime": [(C, C), (RC, RC), (D, D), (RD, RD)],
    PsiRes => "Psi_R": [(RC, RD)],
    TwistRC => "T_RC": [(RC, RC)],
    TwistRD => "T_RD": [(RD, RD)],
    SerreFactor => "s_R": [(RC, RC), (RD, RD)],
    TwistFactor => "t_R": [(RC, RC), (RD, RD)],
    BlockTwistD => "T_DB": [(D, D)],
    ResidualTwistD => "T_DR": [(D, D)],
}

impl Generator {
    pub fn from_name(name: &str) -> Option<Generator> {
        let name = match name {
            "alpha_C" => "a_C",
            "alpha_D" => "a_D",
            other => other,
        };
        Generator::ALL.iter().copied().find(|g| g.name() == name)
    }

    /// Whether negative powers make sense when read on `src`.
    pub fn invertible_on(self, src: Cat) -> bool {
        use Generator::*;
        match self {
            SerreC | SerreD | SerreRes | AlphaC | AlphaD | TwistC | TwistCInv | TwistD | TwistDInv | TwistRC
            | TwistRD | SerreFactor | TwistFactor | ResidualTwistD => true,
            Rotation | RotationInv => src.is_residual(),
            Psi | PsiLeft | PsiRight | LeftMut | RightMut | PsiRes | BlockTwistD => false,
        }
    }

    pub fn target_from(self, src: Cat) -> Option<Cat> {
        self.signatures().iter().find(|(s, _)| *s == src).map(|(_, t)| *t)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A generator raised to a nonzero power, read with a fixed signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: Generator,
    pub exponent: i64,
    pub source: Cat,
    pub target: Cat,
}

impl Letter {
    pub fn new(generator: Generator, exponent: i64, source: Cat) -> Option<Letter> {
        let target = generator.target_from(source)?;
        Some(Letter { generator, exponent, source, target })
    }

    fn is_endo(&self) -> bool {
        self.source == self.target
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent {
            1 => write!(f, "{}", self.generator),
            e => write!(f, "{}^{}", self.generator, e),
        }
    }
}

/// Composite `letters[0] o letters[1] o ... o [shift]`.
///
/// Shifts are central, so a word carries a single accumulated shift.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctorWord {
    pub letters: Vec<Letter>,
    pub shift: i64,
    pub source: Cat,
    pub target: Cat,
}

impl FunctorWord {
    pub fn identity(cat: Cat) -> Self {
        FunctorWord { letters: Vec::new(), shift: 0, source: cat, target: cat }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Identity with no shift.
    pub fn is_identity(&self) -> bool {
        self.letters.is_empty() && self.shift == 0
    }

    /// `self o other`.
    pub fn compose(&self, other: &FunctorWord) -> Result<FunctorWord, WordError> {
        if self.source != other.target {
            return Err(WordError::TypeMismatch { position: 0, expected: other.target, found: self.source });
        }
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Ok(FunctorWord { letters, shift: self.shift + other.shift, source: other.source, target: self.target })
    }
}

impl fmt::Display for FunctorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        if self.shift != 0 {
            parts.push(format!("[{}]", self.shift));
        }
        if parts.is_empty() {
            return f.write_str("id");
        }
        f.write_str(&parts.join(" ∘ "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown generator `{name}` at {position}")]
    UnknownGenerator { position: usize, name: String },
    #[error("type mismatch at {position}: expected a functor out of {expected}, found one out of {found}")]
    TypeMismatch { position: usize, expected: Cat, found: Cat },
    #[error("`{name}` has no inverse on {cat}")]
    NotInvertible { name: String, cat: Cat },
    #[error("rewrite budget exhausted; partial result {partial}")]
    BudgetExceeded { partial: Box<FunctorWord> },
    #[error("rule {0} does not apply to this model")]
    RuleNotApplicable(&'static str),
    #[error("`{generator}` has no interpretation on {cat}")]
    NoInterpretation { generator: String, cat: Cat },
    #[error("words with different types: {0} and {1}")]
    DifferentTypes(String, String),
    #[error("bad model `{spec}`: {message}")]
    BadModel { spec: String, message: String },
}
