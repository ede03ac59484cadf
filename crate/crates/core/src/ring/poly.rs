//! Commutative polynomials in the abstract generators `a1, a2, ...`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

use crate::bracket::{parse_rational, split_signed_terms};
use crate::error::{Error, Result};
use crate::necklace::Bidegree;
use crate::ring::generators::{GeneratorSet, MAX_GENS};
use crate::Q;

/// Exponent vector; slot `i - 1` holds the exponent of `a_i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial([u8; MAX_GENS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(i: usize) -> Self {
        let mut m = Monomial::one();
        m.0[i - 1] = 1;
        m
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0[i - 1] as u32
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(o.0.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        out
    }

    pub fn mul_var(&self, i: usize) -> Monomial {
        let mut out = *self;
        out.0[i - 1] += 1;
        out
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(o.0.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(out)
    }

    /// `(index, exponent)` for every variable present, ascending.
    pub fn vars(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i + 1, e as u32))
    }

    pub fn bidegree(&self, gens: &GeneratorSet) -> Bidegree {
        self.vars().fold(Bidegree::default(), |acc, (i, e)| {
            let b = gens.bidegree(i);
            acc + Bidegree::new(b.r * e, b.s * e)
        })
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .vars()
            .map(|(i, e)| if e == 1 { format!("a{i}") } else { format!("a{i}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OrderKind {
    /// Weighted degree, then reverse lexicographic with `a1 > a2 > ...`.
    #[default]
    Grevlex,
    /// Weighted degree, then lexicographic with variables ranked by
    /// bidegree and the three same-bidegree ties `a15 < a12`,
    /// `a21 < a19`, `a27 < a25`.
    Custom,
}

impl OrderKind {
    pub fn name(self) -> &'static str {
        match self {
            OrderKind::Grevlex => "grevlex",
            OrderKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Result<OrderKind> {
        match s {
            "grevlex" => Ok(OrderKind::Grevlex),
            "custom" => Ok(OrderKind::Custom),
            _ => Err(Error::parse(
                "monomial order",
                s,
                "expected grevlex or custom",
            )),
        }
    }
}

/// A monomial order bound to one generator set.
#[derive(Clone, Debug)]
pub struct MonomialOrder {
    kind: OrderKind,
    degree: [u32; MAX_GENS],
    /// Variable indices from largest to smallest, for the lex tie-break.
    lex_rank: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, gens: &GeneratorSet) -> Self {
        let mut degree = [0; MAX_GENS];
        for i in 1..=gens.len() {
            degree[i - 1] = gens.bidegree(i).total();
        }
        let mut lex_rank: Vec<usize> = (1..=gens.len()).collect();
        let tie = |i: usize| -> u8 {
            // within a bidegree the commutator trace is the smaller variable
            match i {
                15 | 21 | 27 if gens.n() == 4 => 0,
                _ => 1,
            }
        };
        lex_rank.sort_by(|&a, &b| {
            let (ba, bb) = (gens.bidegree(a), gens.bidegree(b));
            bb.cmp(&ba).then_with(|| tie(b).cmp(&tie(a))).then_with(|| a.cmp(&b))
        });
        MonomialOrder {
            kind,
            degree,
            lex_rank,
        }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn weighted_degree(&self, m: &Monomial) -> u32 {
        m.0.iter().zip(self.degree.iter()).map(|(&e, &d)| e as u32 * d).sum()
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let d = self.weighted_degree(a).cmp(&self.weighted_degree(b));
        if d != Ordering::Equal {
            return d;
        }
        match self.kind {
            OrderKind::Grevlex => {
                for i in (0..MAX_GENS).rev() {
                    if a.0[i] != b.0[i] {
                        return b.0[i].cmp(&a.0[i]);
                    }
                }
                Ordering::Equal
            }
            OrderKind::Custom => {
                for &i in &self.lex_rank {
                    let (x, y) = (a.0[i - 1], b.0[i - 1]);
                    if x != y {
                        return x.cmp(&y);
                    }
                }
                Ordering::Equal
            }
        }
    }
}

/// A polynomial in the generators with exact rational coefficients.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct GenPoly {
    terms: FxHashMap<Monomial, Q>,
}

impl GenPoly {
    pub fn zero() -> Self {
        GenPoly::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = GenPoly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        GenPoly::constant(Q::one())
    }

    pub fn var(i: usize) -> Self {
        GenPoly::monomial(Monomial::var(i), Q::one())
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut p = GenPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_assign_scaled(&mut self, o: &GenPoly, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &o.terms {
            self.add_term(*m, d * c);
        }
    }

    pub fn add(&self, o: &GenPoly) -> GenPoly {
        let mut out = self.clone();
        out.add_assign_scaled(o, &Q::one());
        out
    }

    pub fn sub(&self, o: &GenPoly) -> GenPoly {
        let mut out = self.clone();
        out.add_assign_scaled(o, &-Q::one());
        out
    }

    pub fn scale(&self, c: &Q) -> GenPoly {
        if c.is_zero() {
            return GenPoly::zero();
        }
        GenPoly {
            terms: self.terms.iter().map(|(m, d)| (*m, d * c)).collect(),
        }
    }

    pub fn neg(&self) -> GenPoly {
        self.scale(&-Q::one())
    }

    pub fn mul(&self, o: &GenPoly) -> GenPoly {
        let mut out = GenPoly::zero();
        out.terms.reserve(self.len() * o.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// `self += a * b` without building the product separately.
    pub fn add_product(&mut self, a: &GenPoly, b: &GenPoly) {
        for (m1, c1) in &a.terms {
            for (m2, c2) in &b.terms {
                self.add_term(m1.mul(m2), c1 * c2);
            }
        }
    }

    pub fn pow(&self, k: u32) -> GenPoly {
        (0..k).fold(GenPoly::one(), |acc, _| acc.mul(self))
    }

    /// Partial derivative in `a_i`.
    pub fn derivative(&self, i: usize) -> GenPoly {
        let mut out = GenPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e > 0 {
                let mut r = *m;
                r.0[i - 1] -= 1;
                out.add_term(r, c * Q::from_integer(e.into()));
            }
        }
        out
    }

    /// Indices of the variables that occur.
    pub fn variables(&self) -> Vec<usize> {
        let mut seen = [false; MAX_GENS];
        for m in self.terms.keys() {
            for (i, _) in m.vars() {
                seen[i - 1] = true;
            }
        }
        (1..=MAX_GENS).filter(|&i| seen[i - 1]).collect()
    }

    /// The ring homomorphism `a_i ↦ images[i]` (`images[0]` unused).
    pub fn substitute(&self, images: &[GenPoly]) -> GenPoly {
        let mut powers: FxHashMap<(usize, u32), GenPoly> = FxHashMap::default();
        let mut out = GenPoly::zero();
        for (m, c) in &self.terms {
            let mut term = GenPoly::constant(c.clone());
            for (i, e) in m.vars() {
                let p = powers
                    .entry((i, e))
                    .or_insert_with(|| images[i].pow(e))
                    .clone();
                term = term.mul(&p);
                if term.is_zero() {
                    break;
                }
            }
            out.add_assign_scaled(&term, &Q::one());
        }
        out
    }

    /// Terms in descending order.
    pub fn sorted(&self, order: &MonomialOrder) -> Vec<(Monomial, Q)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        v.sort_by(|a, b| order.cmp(&b.0, &a.0));
        v
    }

    pub fn leading(&self, order: &MonomialOrder) -> Option<(Monomial, Q)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(m, c)| (*m, c.clone()))
    }

    /// Scaled to integer coefficients with content 1 and a positive
    /// leading coefficient.
    pub fn primitive(&self, order: &MonomialOrder) -> GenPoly {
        let Some((_, lead)) = self.leading(order) else {
            return GenPoly::zero();
        };
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        let mut content = BigInt::zero();
        for c in self.terms.values() {
            content = content.gcd(&(c.numer() * (&den / c.denom())));
        }
        let mut scale = Q::new(den, content);
        if lead.is_negative() {
            scale = -scale;
        }
        self.scale(&scale)
    }

    /// Homogeneous bidegree, if all terms share one.
    pub fn bidegree(&self, gens: &GeneratorSet) -> Option<Bidegree> {
        let mut it = self.terms.keys().map(|m| m.bidegree(gens));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn render(&self, order: &MonomialOrder) -> String {
        let mut s = String::new();
        let terms = self.sorted(order);
        if terms.is_empty() {
            return "0".into();
        }
        for (k, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            if m.is_one() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&m.render());
            } else {
                s.push_str(&format!("{a}*{}", m.render()));
            }
        }
        s
    }

    /// Parse `±p/q*a3^2*a7 ± ...`; `max_var` bounds the variable index.
    pub fn parse(text: &str, max_var: usize) -> Result<GenPoly> {
        let err = |r: &str| Error::parse("polynomial", text, r);
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty"));
        }
        let mut out = GenPoly::zero();
        for (neg, body) in split_signed_terms(&compact).map_err(|e| err(&e))? {
            let mut coef = Q::one();
            let mut mono = Monomial::one();
            for factor in body.split('*') {
                if let Some(rest) = factor.strip_prefix('a') {
                    let (idx, e) = match rest.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u8>().map_err(|_| err("bad exponent"))?),
                        None => (rest, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| err("bad variable"))?;
                    if idx == 0 || idx > max_var {
                        return Err(err(&format!("variable a{idx} out of range")));
                    }
                    if e == 0 {
                        return Err(err("zero exponent"));
                    }
                    mono.0[idx - 1] = mono.0[idx - 1]
                        .checked_add(e)
                        .ok_or_else(|| err("exponent overflow"))?;
                } else {
                    coef *= parse_rational(factor).ok_or_else(|| err("bad coefficient"))?;
                }
            }
            if neg {
                coef = -coef;
            }
            out.add_term(mono, coef);
        }
        Ok(out)
    }
}

impl fmt::Debug for GenPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0 .0.cmp(&a.0 .0));
        let parts: Vec<String> = terms
            .iter()
            .map(|(m, c)| format!("{c}*{}", m.render()))
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// All monomials of exactly bidegree `b` in the variables `vars`, in
/// descending order.
pub fn graded_basis(
    b: Bidegree,
    vars: &[usize],
    gens: &GeneratorSet,
    order: &MonomialOrder,
) -> Vec<Monomial> {
    fn go(
        k: usize,
        left: Bidegree,
        cur: Monomial,
        vars: &[usize],
        gens: &GeneratorSet,
        out: &mut Vec<Monomial>,
    ) {
        if left == Bidegree::default() {
            out.push(cur);
            return;
        }
        if k == vars.len() {
            return;
        }
        let i = vars[k];
        let bi = gens.bidegree(i);
        let mut m = cur;
        let mut rem = left;
        loop {
            go(k + 1, rem, m, vars, gens, out);
            match rem.checked_sub(bi) {
                Some(r) if bi.total() > 0 => {
                    rem = r;
                    m = m.mul_var(i);
                }
                _ => break,
            }
        }
    }
    let mut out = Vec::new();
    go(0, b, Monomial::one(), vars, gens, &mut out);
    out.sort_by(|x, y| order.cmp(y, x));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::generators::generator_set;

    #[test]
    fn custom_basis() {
        let gens = generator_set(4).unwrap();
        let order = MonomialOrder::new(OrderKind::Custom, &gens);
        let vars = gens.traceless_indices();
        let show = |b| {
            graded_basis(b, &vars, &gens, &order)
                .iter()
                .map(|m| m.render())
                .collect::<Vec<_>>()
        };
        assert_eq!(show(Bidegree::new(2, 2)), ["a12", "a15", "a3*a5", "a4^2"]);
        assert_eq!(show(Bidegree::new(2, 1)), ["a7"]);
        assert_eq!(show(Bidegree::new(1, 1)), ["a4"]);
    }

    #[test]
    fn grevlex_reference_line() {
        let gens = generator_set(4).unwrap();
        let order = MonomialOrder::new(OrderKind::Grevlex, &gens);
        let p = GenPoly::parse("-1/2*a16 + 1/4*a3*a8 + 1/2*a4*a7 + 1/12*a5*a6", 32).unwrap();
        assert_eq!(
            p.render(&order),
            "1/12*a5*a6 + 1/2*a4*a7 + 1/4*a3*a8 - 1/2*a16"
        );
    }

    #[test]
    fn primitive_form() {
        let gens = generator_set(4).unwrap();
        let order = MonomialOrder::new(OrderKind::Grevlex, &gens);
        let p = GenPoly::parse("-2/3*a3*a5 + 4/9*a4^2", 32).unwrap();
        assert_eq!(p.primitive(&order).render(&order), "2*a4^2 - 3*a3*a5");
    }

    #[test]
    fn derivative_and_substitution() {
        let p = GenPoly::parse("a3^2*a7 + 3*a4", 32).unwrap();
        assert_eq!(p.derivative(3), GenPoly::parse("2*a3*a7", 32).unwrap());
        let mut images: Vec<GenPoly> = (0..=32).map(|i| {
            if i == 0 { GenPoly::zero() } else { GenPoly::var(i) }
        }).collect();
        images[3] = GenPoly::parse("a5", 32).unwrap();
        images[4] = GenPoly::zero();
        assert_eq!(p.substitute(&images), GenPoly::parse("a5^2*a7", 32).unwrap());
    }

    #[test]
    fn parse_rejects() {
        for bad in ["", "a0", "a33", "2*", "a3^0", "+-a3"] {
            assert!(GenPoly::parse(bad, 32).is_err(), "{bad}");
        }
    }
}
