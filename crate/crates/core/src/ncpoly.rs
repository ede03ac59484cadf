//! Noncommutative polynomials in the two letters and a small expression
//! language for writing them, e.g. `[A,B]^3(A^2B+ABA+BA^2)`.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor factor*
//! factor := atom ['^' int]
//! atom   := letter | int ['/' int] | '(' expr ')' | '[' expr ',' expr ']'
//! ```

use std::fmt;

use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use crate::bracket::NecklaceSum;
use crate::error::{Error, Result};
use crate::necklace::{canonicalize, Letter, Word};
use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Letter(Letter),
    Scalar(Q),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Commutator(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser {
            src: text,
            chars,
            pos: 0,
        };
        let e = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(p.err(&format!("unexpected {:?}", p.chars[p.pos])));
        }
        Ok(e)
    }

    /// Expand into a sum of words.
    pub fn to_ncpoly(&self) -> NcPoly {
        match self {
            Expr::Letter(l) => NcPoly::word(Word::letter_word(*l)),
            Expr::Scalar(c) => NcPoly::scalar(c.clone()),
            Expr::Add(a, b) => a.to_ncpoly().add(&b.to_ncpoly()),
            Expr::Sub(a, b) => a.to_ncpoly().sub(&b.to_ncpoly()),
            Expr::Mul(a, b) => a.to_ncpoly().mul(&b.to_ncpoly()),
            Expr::Neg(a) => a.to_ncpoly().scale(&-Q::one()),
            Expr::Pow(a, k) => a.to_ncpoly().pow(*k),
            Expr::Commutator(a, b) => {
                let (a, b) = (a.to_ncpoly(), b.to_ncpoly());
                a.mul(&b).sub(&b.mul(&a))
            }
        }
    }

    /// Fold the tree into any ring: `add(x, y, true)` means `x - y`.
    pub fn eval<T, FL, FS, FA, FM>(&self, letter: &FL, scalar: &FS, add: &FA, mul: &FM) -> T
    where
        T: Clone,
        FL: Fn(Letter) -> T,
        FS: Fn(&Q) -> T,
        FA: Fn(&T, &T, bool) -> T,
        FM: Fn(&T, &T) -> T,
    {
        let rec = |e: &Expr| e.eval(letter, scalar, add, mul);
        match self {
            Expr::Letter(l) => letter(*l),
            Expr::Scalar(c) => scalar(c),
            Expr::Add(a, b) => add(&rec(a), &rec(b), false),
            Expr::Sub(a, b) => add(&rec(a), &rec(b), true),
            Expr::Mul(a, b) => mul(&rec(a), &rec(b)),
            Expr::Neg(a) => add(&scalar(&Q::zero()), &rec(a), true),
            Expr::Pow(a, k) => {
                let base = rec(a);
                let mut acc = base.clone();
                for _ in 1..*k {
                    acc = mul(&acc, &base);
                }
                acc
            }
            Expr::Commutator(a, b) => {
                let (x, y) = (rec(a), rec(b));
                add(&mul(&x, &y), &mul(&y, &x), true)
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, reason: &str) -> Error {
        Error::parse("expression", self.src, reason)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mut acc = self.term()?;
        if neg {
            acc = Expr::Neg(Box::new(acc));
        }
        loop {
            if self.eat('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(c) if c == '(' || c == '[' || c.is_ascii_alphanumeric())
        {
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        let atom = self.atom()?;
        if self.eat('^') {
            let k = self.integer()?;
            if k == 0 {
                return Err(self.err("zero exponent"));
            }
            let k = u32::try_from(k).map_err(|_| self.err("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(atom), k));
        }
        Ok(atom)
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("number too large"))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('A' | 'X') => {
                self.pos += 1;
                Ok(Expr::Letter(Letter::First))
            }
            Some('B' | 'Y') => {
                self.pos += 1;
                Ok(Expr::Letter(Letter::Second))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let den = if self.eat('/') { self.integer()? } else { 1 };
                if den == 0 {
                    return Err(self.err("zero denominator"));
                }
                Ok(Expr::Scalar(Q::new(num.into(), den.into())))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('[') => {
                self.pos += 1;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(']')?;
                Ok(Expr::Commutator(Box::new(a), Box::new(b)))
            }
            Some(c) => Err(self.err(&format!("unexpected {c:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// A finite rational combination of words.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct NcPoly {
    terms: FxHashMap<Word, Q>,
}

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn scalar(c: Q) -> Self {
        let mut p = NcPoly::zero();
        p.add_term(Word::EMPTY, c);
        p
    }

    pub fn word(w: Word) -> Self {
        let mut p = NcPoly::zero();
        p.add_term(w, Q::one());
        p
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(*w, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &NcPoly) -> NcPoly {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w, d) in &self.terms {
            out.add_term(*w, d * c);
        }
        out
    }

    pub fn mul(&self, o: &NcPoly) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                out.add_term(w1.concat(*w2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> NcPoly {
        (0..k).fold(NcPoly::scalar(Q::one()), |acc, _| acc.mul(self))
    }

    /// The trace, as a combination of necklaces.
    pub fn trace(&self) -> NecklaceSum {
        let mut out = NecklaceSum::zero();
        for (w, c) in &self.terms {
            out.add_term(canonicalize(*w), c.clone());
        }
        out
    }
}

impl fmt::Debug for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.cmp(a.0));
        f.debug_map().entries(terms).finish()
    }
}
