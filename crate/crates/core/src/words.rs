//! Free group elements as freely reduced syllable words.
//!
//! A word is stored run-length encoded: `x1^2 x2^-1` is the syllable list
//! `[(1, 2), (2, -1)]`. Exponents are arbitrary-precision integers.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One run `x_generator^exponent` of a reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syllable {
    pub generator: usize,
    pub exponent: BigInt,
}

impl Syllable {
    pub fn new(generator: usize, exponent: impl Into<BigInt>) -> Self {
        Syllable {
            generator,
            exponent: exponent.into(),
        }
    }
}

/// Element of the free group on `x_1, …, x_n`.
///
/// Invariants: adjacent syllables have distinct generators and no exponent
/// is zero. The empty syllable list is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    n: usize,
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Word {
            n,
            syllables: Vec::new(),
        })
    }

    /// The generator `x_i` (1-based).
    pub fn generator(n: usize, i: usize) -> Result<Self> {
        Self::reduce(vec![Syllable::new(i, 1)], n)
    }

    /// `x_i^e`.
    pub fn power_of_generator(n: usize, i: usize, e: impl Into<BigInt>) -> Result<Self> {
        Self::reduce(vec![Syllable::new(i, e)], n)
    }

    /// Freely reduce an arbitrary syllable list.
    pub fn reduce(raw: Vec<Syllable>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        for s in &raw {
            if s.generator == 0 || s.generator > n {
                return Err(Error::GeneratorOutOfRange {
                    index: s.generator,
                    n,
                });
            }
        }
        let mut out: Vec<Syllable> = Vec::with_capacity(raw.len());
        for s in raw {
            push_reduced(&mut out, s);
        }
        Ok(Word { n, syllables: out })
    }

    /// Convenience constructor from small integer pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, i64)]) -> Result<Self> {
        Self::reduce(pairs.iter().map(|&(g, e)| Syllable::new(g, e)).collect(), n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters, counting `x^e` as `|e|` letters.
    pub fn letter_length(&self) -> BigInt {
        self.syllables.iter().map(|s| s.exponent.abs()).sum()
    }

    pub fn multiply(&self, other: &Word) -> Result<Word> {
        if self.n != other.n {
            return Err(Error::RankMismatch(self.n, other.n));
        }
        let mut out = self.syllables.clone();
        for s in &other.syllables {
            push_reduced(&mut out, s.clone());
        }
        Ok(Word {
            n: self.n,
            syllables: out,
        })
    }

    /// In-place right multiplication.
    pub fn append(&mut self, other: &Word) -> Result<()> {
        if self.n != other.n {
            return Err(Error::RankMismatch(self.n, other.n));
        }
        for s in &other.syllables {
            push_reduced(&mut self.syllables, s.clone());
        }
        Ok(())
    }

    pub fn invert(&self) -> Word {
        Word {
            n: self.n,
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable {
                    generator: s.generator,
                    exponent: -&s.exponent,
                })
                .collect(),
        }
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, other: &Word) -> Result<Word> {
        self.multiply(other)?
            .multiply(&self.invert())?
            .multiply(&other.invert())
    }

    /// Integer power (negative powers invert).
    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.invert() } else { self.clone() };
        let mut out = Word {
            n: self.n,
            syllables: Vec::new(),
        };
        for _ in 0..e.unsigned_abs() {
            for s in &base.syllables {
                push_reduced(&mut out.syllables, s.clone());
            }
        }
        out
    }

    /// Exponent sum of each generator (the image in `Z^n`), 1-based index `i` at slot `i-1`.
    pub fn abelianization(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.n];
        for s in &self.syllables {
            v[s.generator - 1] += &s.exponent;
        }
        v
    }

    /// Apply the substitution `x_i ↦ images[i-1]^e` syllable by syllable.
    ///
    /// `power(i, e)` returns the image of `x_i^e`.
    pub fn substitute<F>(&self, mut power: F) -> Result<Word>
    where
        F: FnMut(usize, &BigInt) -> Result<Word>,
    {
        let mut out = Word::identity(self.n)?;
        for s in &self.syllables {
            out.append(&power(s.generator, &s.exponent)?)?;
        }
        Ok(out)
    }

    /// Lift to a larger alphabet (indices unchanged).
    pub fn with_rank(&self, n: usize) -> Result<Word> {
        Word::reduce(self.syllables.clone(), n)
    }

    /// Parse the text syntax `x1^2 x2^-1`, with `[a,b]` commutators,
    /// parentheses and `1` for the identity.
    pub fn parse(text: &str, n: usize) -> Result<Word> {
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let mut p = Parser {
            chars: text.chars().collect(),
            pos: 0,
            n,
        };
        let w = p.product()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error(format!("unexpected '{}'", p.chars[p.pos])));
        }
        Ok(w)
    }
}

fn push_reduced(out: &mut Vec<Syllable>, s: Syllable) {
    if s.exponent.is_zero() {
        return;
    }
    if let Some(last) = out.last_mut() {
        if last.generator == s.generator {
            last.exponent += s.exponent;
            if last.exponent.is_zero() {
                out.pop();
            }
            return;
        }
    }
    out.push(s);
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        for (idx, s) in self.syllables.iter().enumerate() {
            if idx > 0 {
                write!(f, " ")?;
            }
            if s.exponent.is_one() {
                write!(f, "x{}", s.generator)?;
            } else {
                write!(f, "x{}^{}", s.generator, s.exponent)?;
            }
        }
        Ok(())
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn error(&self, message: String) -> Error {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, pos: usize, message: String) -> Error {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Error::Parse {
            line,
            column,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_whitespace() || self.chars[self.pos] == '*')
        {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn product(&mut self) -> Result<Word> {
        let mut acc = Word::identity(self.n)?;
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(',') | Some(']') | Some(')') => return Ok(acc),
                _ => {
                    let f = self.factor()?;
                    acc = acc.multiply(&f)?;
                }
            }
        }
    }

    fn factor(&mut self) -> Result<Word> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            if let Some(g) = single_generator(&base) {
                return Word::reduce(vec![Syllable::new(g.0, g.1 * e)], self.n);
            }
            let small: i64 = i64::try_from(&e)
                .map_err(|_| self.error("exponent too large for a composite factor".into()))?;
            return Ok(base.pow(small));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Word> {
        self.skip_ws();
        match self.peek() {
            Some('x') | Some('X') => {
                let at = self.pos;
                self.pos += 1;
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.error("expected generator index after 'x'".into()));
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let i: usize = s
                    .parse()
                    .map_err(|_| self.error(format!("bad generator index '{s}'")))?;
                if i == 0 || i > self.n {
                    return Err(
                        self.error_at(at, format!("generator x{i} out of range 1..={}", self.n))
                    );
                }
                Word::generator(self.n, i)
            }
            Some('1') => {
                self.pos += 1;
                Word::identity(self.n)
            }
            Some('(') => {
                self.pos += 1;
                let w = self.product()?;
                self.expect(')')?;
                Ok(w)
            }
            Some('[') => {
                self.pos += 1;
                let a = self.product()?;
                self.expect(',')?;
                let b = self.product()?;
                self.expect(']')?;
                a.commutator(&b)
            }
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<BigInt>()
            .map_err(|_| self.error(format!("bad exponent '{s}'")))
    }
}

fn single_generator(w: &Word) -> Option<(usize, BigInt)> {
    match w.syllables() {
        [s] => Some((s.generator, s.exponent.clone())),
        _ => None,
    }
}
