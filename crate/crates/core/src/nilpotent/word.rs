//! Words in generators: `x1`, `[w,w]`, `(w)`, `w^k`, and `~` for inverse
//! (prefix `~w` or postfix `w~`). Generators are 1-based in text and
//! 0-based in the AST. Commutators are `[a,b] = a⁻¹b⁻¹ab`.

use std::fmt;

use super::{FreeNilGroup, NilElement};
use crate::error::{CllError, Result};
use crate::group::FiniteGroup;

/// Anything a word can be evaluated in.
pub trait WordGroup {
    type Elem: Clone;
    fn one(&self) -> Self::Elem;
    fn gen(&self, i: usize) -> Result<Self::Elem>;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn pow(&self, a: &Self::Elem, k: i64) -> Self::Elem {
        let mut base = if k < 0 { self.inv(a) } else { a.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let x = self.mul(&self.inv(a), &self.inv(b));
        self.mul(&x, &self.mul(a, b))
    }
}

impl WordGroup for FreeNilGroup {
    type Elem = NilElement;
    fn one(&self) -> NilElement {
        self.identity()
    }
    fn gen(&self, i: usize) -> Result<NilElement> {
        self.generator(i)
    }
    fn mul(&self, a: &NilElement, b: &NilElement) -> NilElement {
        FreeNilGroup::mul(self, a, b)
    }
    fn inv(&self, a: &NilElement) -> NilElement {
        FreeNilGroup::inv(self, a)
    }
    fn pow(&self, a: &NilElement, k: i64) -> NilElement {
        FreeNilGroup::pow(self, a, k)
    }
}

/// A finite group with chosen images of the word generators.
pub struct Images<'a> {
    pub group: &'a FiniteGroup,
    pub images: &'a [usize],
}

impl WordGroup for Images<'_> {
    type Elem = usize;
    fn one(&self) -> usize {
        self.group.identity()
    }
    fn gen(&self, i: usize) -> Result<usize> {
        self.images.get(i).copied().ok_or(CllError::BadIndex(i))
    }
    fn mul(&self, a: &usize, b: &usize) -> usize {
        self.group.mul(*a, *b)
    }
    fn inv(&self, a: &usize) -> usize {
        self.group.inv(*a)
    }
    fn pow(&self, a: &usize, k: i64) -> usize {
        self.group.pow(*a, k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    Gen(usize),
    Prod(Vec<Word>),
    Pow(Box<Word>, i64),
    Comm(Box<Word>, Box<Word>),
}

impl Word {
    pub fn one() -> Word {
        Word::Prod(Vec::new())
    }

    pub fn comm(a: Word, b: Word) -> Word {
        Word::Comm(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Word, k: i64) -> Word {
        Word::Pow(Box::new(a), k)
    }

    pub fn inverse(self) -> Word {
        Word::pow(self, -1)
    }

    /// `[x1,x2][x3,x4]⋯[x_{2n-1},x_{2n}]`.
    pub fn lambda_std(n: usize) -> Word {
        Word::Prod((0..n).map(|i| Word::comm(Word::Gen(2 * i), Word::Gen(2 * i + 1))).collect())
    }

    /// `x1⁻¹⋯x_m⁻¹ x1⋯x_m`.
    pub fn all_inverses(m: usize) -> Word {
        let mut f: Vec<Word> = (0..m).map(|i| Word::Gen(i).inverse()).collect();
        f.extend((0..m).map(Word::Gen));
        Word::Prod(f)
    }

    /// Largest generator index used, if any.
    pub fn max_gen(&self) -> Option<usize> {
        match self {
            Word::Gen(i) => Some(*i),
            Word::Prod(v) => v.iter().filter_map(Word::max_gen).max(),
            Word::Pow(w, _) => w.max_gen(),
            Word::Comm(a, b) => a.max_gen().max(b.max_gen()),
        }
    }

    pub fn eval<G: WordGroup>(&self, g: &G) -> Result<G::Elem> {
        Ok(match self {
            Word::Gen(i) => g.gen(*i)?,
            Word::Prod(v) => {
                let mut acc = g.one();
                for w in v {
                    acc = g.mul(&acc, &w.eval(g)?);
                }
                acc
            }
            Word::Pow(w, k) => g.pow(&w.eval(g)?, *k),
            Word::Comm(a, b) => g.commutator(&a.eval(g)?, &b.eval(g)?),
        })
    }

    pub fn parse(s: &str) -> Result<Word> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { s: &chars, i: 0 };
        let w = p.product()?;
        if p.i != chars.len() {
            return Err(p.err("trailing input"));
        }
        Ok(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Gen(i) => write!(f, "x{}", i + 1),
            Word::Prod(v) if v.is_empty() => write!(f, "()"),
            Word::Prod(v) => {
                for w in v {
                    match w {
                        Word::Prod(_) => write!(f, "({w})")?,
                        _ => write!(f, "{w}")?,
                    }
                }
                Ok(())
            }
            Word::Pow(w, k) => match **w {
                Word::Gen(_) | Word::Comm(..) => write!(f, "{w}^{k}"),
                _ => write!(f, "({w})^{k}"),
            },
            Word::Comm(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

struct Parser<'a> {
    s: &'a [char],
    i: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> CllError {
        CllError::Parse(format!("word: {msg} at position {}", self.i))
    }

    fn peek(&self) -> Option<char> {
        self.s.get(self.i).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn product(&mut self) -> Result<Word> {
        let mut factors = Vec::new();
        while let Some(c) = self.peek() {
            match c {
                ']' | ',' | ')' => break,
                '*' | '.' => self.i += 1,
                _ => factors.push(self.factor()?),
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Word::Prod(factors) })
    }

    fn factor(&mut self) -> Result<Word> {
        if self.peek() == Some('~') {
            self.i += 1;
            return Ok(self.factor()?.inverse());
        }
        let mut w = self.atom()?;
        loop {
            match self.peek() {
                Some('^') => {
                    self.i += 1;
                    let k = self.integer()?;
                    w = Word::pow(w, k);
                }
                Some('~') => {
                    self.i += 1;
                    w = w.inverse();
                }
                _ => return Ok(w),
            }
        }
    }

    fn atom(&mut self) -> Result<Word> {
        match self.peek() {
            Some('x') => {
                self.i += 1;
                let k = self.integer()?;
                if k < 1 {
                    return Err(self.err("generator indices are 1-based"));
                }
                Ok(Word::Gen(k as usize - 1))
            }
            Some('[') => {
                self.i += 1;
                let a = self.product()?;
                self.expect(',')?;
                let b = self.product()?;
                self.expect(']')?;
                Ok(Word::comm(a, b))
            }
            Some('(') => {
                self.i += 1;
                let a = self.product()?;
                self.expect(')')?;
                Ok(a)
            }
            _ => Err(self.err("expected generator, '[' or '('")),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.i;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.i += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        let t: String = self.s[start..self.i].iter().collect();
        t.parse().map_err(|_| self.err("expected integer"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_grammar() {
        assert_eq!(Word::parse("[x1,x2][x3,x4]").unwrap(), Word::lambda_std(2));
        assert_eq!(Word::parse("").unwrap(), Word::one());
        assert_eq!(Word::parse("~x2").unwrap(), Word::Gen(1).inverse());
        assert_eq!(Word::parse("x2~").unwrap(), Word::Gen(1).inverse());
        assert_eq!(Word::parse("x1^-3").unwrap(), Word::pow(Word::Gen(0), -3));
        assert_eq!(Word::parse("[x1, x2]^2").unwrap(), Word::pow(Word::comm(Word::Gen(0), Word::Gen(1)), 2));
        for bad in ["x0", "[x1,x2", "y1", "x1^", "x1)"] {
            assert!(Word::parse(bad).is_err(), "{bad}");
        }
        let w = Word::parse("(x1x2)^2[x3,~x1]").unwrap();
        assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn evaluates_in_a_finite_group() {
        let g = crate::group::catalog::dihedral(3);
        let imgs: Vec<usize> = g.gens().to_vec();
        let im = Images { group: &g, images: &imgs };
        let w = Word::parse("[x1,x2]").unwrap();
        assert_eq!(w.eval(&im).unwrap(), g.commutator(imgs[0], imgs[1]));
        assert!(matches!(Word::parse("x9").unwrap().eval(&im), Err(CllError::BadIndex(8))));
    }
}
