//! `word := atom (('∘' | '*' | 'o') atom)*`
//! `atom := NAME ('^' INT)? | '[' INT ']' | '(' word ')' ('^' INT)? | 'id'`
//!
//! Exponents may be braced: `S_C^{-3}`.

use super::{Cat, FunctorWord, Generator, Letter, WordError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Int(i64),
    Compose,
    Caret,
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
}

fn syntax(position: usize, message: impl Into<String>) -> WordError {
    WordError::Syntax { position, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, WordError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let single = match c {
            '∘' | '*' => Some(Tok::Compose),
            '^' => Some(Tok::Caret),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            _ => None,
        };
        if let Some(t) = single {
            out.push((start, t));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '-' || c == '+' || c.is_ascii_digit() {
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<i64>().map_err(|_| syntax(start, format!("bad integer `{s}`")))?;
            out.push((start, Tok::Int(v)));
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, if s == "o" { Tok::Compose } else { Tok::Name(s) }));
        } else {
            return Err(syntax(start, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Item {
    Gen { generator: Generator, exponent: i64, position: usize },
    Shift(i64),
    Group { items: Vec<Item>, exponent: i64 },
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), WordError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(self.here(), format!("expected {what}")))
        }
    }

    fn int(&mut self) -> Result<i64, WordError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(syntax(self.here(), "expected an integer")),
        }
    }

    fn exponent(&mut self) -> Result<i64, WordError> {
        if self.peek() != Some(&Tok::Caret) {
            return Ok(1);
        }
        self.pos += 1;
        if self.peek() == Some(&Tok::LBrace) {
            self.pos += 1;
            let v = self.int()?;
            self.expect(Tok::RBrace, "`}`")?;
            Ok(v)
        } else {
            self.int()
        }
    }

    fn word(&mut self) -> Result<Vec<Item>, WordError> {
        let mut items = vec![self.atom()?];
        while self.peek() == Some(&Tok::Compose) {
            self.pos += 1;
            items.push(self.atom()?);
        }
        Ok(items)
    }

    fn atom(&mut self) -> Result<Item, WordError> {
        let position = self.here();
        match self.peek().cloned() {
            Some(Tok::Name(name)) => {
                self.pos += 1;
                if name == "id" || name == "Id" {
                    return Ok(Item::Shift(0));
                }
                let generator = Generator::from_name(&name).ok_or(WordError::UnknownGenerator { position, name })?;
                Ok(Item::Gen { generator, exponent: self.exponent()?, position })
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let v = self.int()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(Item::Shift(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let items = self.word()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Item::Group { items, exponent: self.exponent()? })
            }
            _ => Err(syntax(position, "expected a generator, `[n]` or `(`")),
        }
    }
}

/// Untyped letter: generator, exponent, source position.
type Raw = (Generator, i64, usize);

fn flatten(items: &[Item], out: &mut Vec<Raw>, shift: &mut i64) {
    for item in items {
        match item {
            Item::Gen { exponent: 0, .. } => {}
            Item::Gen { generator, exponent, position } => out.push((*generator, *exponent, *position)),
            Item::Shift(s) => *shift += s,
            Item::Group { items, exponent } => {
                let mut inner = Vec::new();
                let mut inner_shift = 0;
                flatten(items, &mut inner, &mut inner_shift);
                if *exponent < 0 {
                    inner.reverse();
                    inner.iter_mut().for_each(|l| l.1 = -l.1);
                    inner_shift = -inner_shift;
                }
                for _ in 0..exponent.unsigned_abs() {
                    out.extend(inner.iter().cloned());
                    *shift += inner_shift;
                }
            }
        }
    }
}

/// Reads `raw` right to left starting from `source`.
fn type_from(raw: &[Raw], shift: i64, source: Cat) -> Result<FunctorWord, (usize, WordError)> {
    let mut current = source;
    let mut letters = Vec::with_capacity(raw.len());
    for (k, &(generator, exponent, position)) in raw.iter().enumerate().rev() {
        // a letter that types but cannot be inverted got further than one that does not type
        let progress = 2 * (raw.len() - k);
        let Some(letter) = Letter::new(generator, exponent, current) else {
            let found = generator.signatures()[0].0;
            return Err((progress, WordError::TypeMismatch { position, expected: current, found }));
        };
        if exponent < 0 && !generator.invertible_on(current) {
            return Err((progress + 1, WordError::NotInvertible { name: generator.name().into(), cat: current }));
        }
        current = letter.target;
        letters.push(letter);
    }
    letters.reverse();
    Ok(FunctorWord { letters, shift, source, target: current })
}

/// Parses and types a word, reading polymorphic generators in the first
/// category of [`Cat::PREFERENCE`] that types the whole word.
pub fn parse_word(text: &str) -> Result<FunctorWord, WordError> {
    parse_word_in(text, None)
}

/// Like [`parse_word`] but with the source category fixed when given.
pub fn parse_word_in(text: &str, source: Option<Cat>) -> Result<FunctorWord, WordError> {
    let toks = lex(text)?;
    let end = text.chars().count();
    let mut p = Parser { toks, pos: 0, end };
    let items = p.word()?;
    if p.pos != p.toks.len() {
        return Err(syntax(p.here(), "unexpected trailing input"));
    }
    let mut raw = Vec::new();
    let mut shift = 0;
    flatten(&items, &mut raw, &mut shift);

    let candidates: Vec<Cat> = match source {
        Some(c) => vec![c],
        None => Cat::PREFERENCE.to_vec(),
    };
    let mut best: Option<(usize, WordError)> = None;
    for cat in candidates {
        match type_from(&raw, shift, cat) {
            Ok(w) => return Ok(w),
            Err((progress, e)) => {
                if best.as_ref().is_none_or(|(p, _)| progress > *p) {
                    best = Some((progress, e));
                }
            }
        }
    }
    Err(best.expect("at least one candidate").1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let w = parse_word("T_C ∘ T_Cinv").unwrap();
        assert_eq!((w.len(), w.source, w.target), (2, Cat::C, Cat::C));
        assert!(matches!(
            parse_word("Psi ∘ Psi"),
            Err(WordError::TypeMismatch { expected: Cat::D, found: Cat::C, .. })
        ));
        let w = parse_word("S_D ∘ Psi ∘ S_C^-1").unwrap();
        assert_eq!((w.source, w.target), (Cat::C, Cat::D));
    }

    #[test]
    fn separators_and_exponents() {
        let a = parse_word("O_B^{-3} o s_R * t_R").unwrap();
        let b = parse_word("O_B^-3 ∘ s_R ∘ t_R").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.letters[0].exponent, -3);
        assert_eq!(a.source, Cat::RD);
        assert_eq!(parse_word_in("O_B^-3", Some(Cat::RC)).unwrap().source, Cat::RC);
    }

    #[test]
    fn groups_expand() {
        let w = parse_word("(T_DB ∘ a_D)^2 ∘ [1]").unwrap();
        assert_eq!(w.to_string(), "T_DB ∘ a_D ∘ T_DB ∘ a_D ∘ [1]");
        let w = parse_word("(a_C ∘ T_C ∘ [1])^-1").unwrap();
        assert_eq!(w.to_string(), "T_C^-1 ∘ a_C^-1 ∘ [-1]");
        assert!(parse_word("(O_B)^{-1}").is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_word("T_C ∘ ").unwrap_err(),
            WordError::Syntax { position: 6, message: "expected a generator, `[n]` or `(`".into() }
        );
        assert!(matches!(parse_word("Foo"), Err(WordError::UnknownGenerator { position: 0, .. })));
        assert!(matches!(parse_word("[2"), Err(WordError::Syntax { position: 2, .. })));
        assert!(matches!(parse_word("L_B^-1"), Err(WordError::NotInvertible { .. })));
        assert!(matches!(parse_word("T_C T_C"), Err(WordError::Syntax { .. })));
    }

    #[test]
    fn identity_and_shift() {
        let w = parse_word("[2]").unwrap();
        assert_eq!((w.len(), w.shift), (0, 2));
        assert_eq!(parse_word("id").unwrap().to_string(), "id");
    }
}
