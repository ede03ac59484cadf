//! The necklace bracket, trace polynomials and the traceless shift.
//!
//! Sign convention: `ω(first, second) = 1`, so `{Tr x, Tr y} = n`.

use std::cmp::Ordering;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::{Arc, Mutex};

use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::necklace::{canonicalize, parse_word, Alphabet, Bidegree, Letter, Necklace, Word};
use crate::{qi, Q};

/// How the two letters are read: generic matrices `X, Y` or their
/// traceless parts `A, B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Interpretation {
    Generic,
    Traceless,
}

impl Interpretation {
    pub fn alphabet(self) -> Alphabet {
        match self {
            Interpretation::Generic => Alphabet::Generic,
            Interpretation::Traceless => Alphabet::Traceless,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Interpretation::Generic => "generic",
            Interpretation::Traceless => "traceless",
        }
    }
}

fn omega(a: Letter, b: Letter) -> i64 {
    match (a, b) {
        (Letter::First, Letter::Second) => 1,
        (Letter::Second, Letter::First) => -1,
        _ => 0,
    }
}

/// A rational combination of necklaces.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct NecklaceSum {
    terms: FxHashMap<Necklace, Q>,
}

impl NecklaceSum {
    pub fn zero() -> Self {
        NecklaceSum::default()
    }

    pub fn single(v: Necklace) -> Self {
        let mut s = NecklaceSum::zero();
        s.add_term(v, Q::one());
        s
    }

    pub fn add_term(&mut self, v: Necklace, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(v).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&v);
        }
    }

    pub fn get(&self, v: &Necklace) -> Q {
        self.terms.get(v).cloned().unwrap_or_else(Q::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Necklace, &Q)> {
        self.terms.iter()
    }

    /// Terms in descending deg-lex order of their necklaces.
    pub fn sorted(&self) -> Vec<(Necklace, Q)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (*k, c.clone())).collect();
        v.sort_by(|a, b| b.0.cmp(&a.0));
        v
    }

    pub fn add(&self, o: &NecklaceSum) -> NecklaceSum {
        let mut out = self.clone();
        for (v, c) in &o.terms {
            out.add_term(*v, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &NecklaceSum) -> NecklaceSum {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> NecklaceSum {
        let mut out = NecklaceSum::zero();
        for (v, d) in &self.terms {
            out.add_term(*v, d * c);
        }
        out
    }

    pub fn swap_letters(&self) -> NecklaceSum {
        let mut out = NecklaceSum::zero();
        for (v, c) in &self.terms {
            out.add_term(v.swap_letters(), c.clone());
        }
        out
    }

    /// The bidegree shared by every term, if there is one.
    pub fn bidegree(&self) -> Option<Bidegree> {
        let mut it = self.terms.keys().map(|v| v.bidegree());
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// `Tr` applied termwise.
    pub fn trace(&self, interp: Interpretation, n: usize) -> TracePolynomial {
        let mut out = TracePolynomial::zero(interp, n);
        for (v, c) in &self.terms {
            out.add_assign_scaled(&TracePolynomial::trace(*v, interp, n), c);
        }
        out
    }
}

impl fmt::Debug for NecklaceSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in self.sorted() {
            write_coef_term(f, &c, first, &format!("({v})"))?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn write_coef_term(f: &mut impl fmt::Write, c: &Q, first: bool, body: &str) -> fmt::Result {
    let neg = c.is_negative();
    if first {
        if neg {
            f.write_str("-")?;
        }
    } else {
        f.write_str(if neg { " - " } else { " + " })?;
    }
    let a = c.abs();
    if body.is_empty() {
        write!(f, "{a}")
    } else if a.is_one() {
        f.write_str(body)
    } else {
        write!(f, "{a}*{body}")
    }
}

/// A product of traces and the scalar variables `a1 = Tr X`, `a2 = Tr Y`.
/// Traces are kept sorted in descending deg-lex order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceMonomial {
    traces: Vec<Necklace>,
    scalars: [u8; 2],
}

impl TraceMonomial {
    pub fn one() -> Self {
        TraceMonomial::default()
    }

    pub fn traces(&self) -> &[Necklace] {
        &self.traces
    }

    pub fn scalars(&self) -> [u8; 2] {
        self.scalars
    }

    pub fn is_one(&self) -> bool {
        self.traces.is_empty() && self.scalars == [0, 0]
    }

    pub fn degree(&self) -> usize {
        self.traces.iter().map(|v| v.len()).sum::<usize>()
            + self.scalars[0] as usize
            + self.scalars[1] as usize
    }

    pub fn bidegree(&self) -> Bidegree {
        self.traces
            .iter()
            .fold(Bidegree::new(self.scalars[0].into(), self.scalars[1].into()), |b, v| {
                b + v.bidegree()
            })
    }

    fn mul(&self, o: &TraceMonomial) -> TraceMonomial {
        let mut traces = self.traces.clone();
        traces.extend_from_slice(&o.traces);
        traces.sort_by(|a, b| b.cmp(a));
        TraceMonomial {
            traces,
            scalars: [self.scalars[0] + o.scalars[0], self.scalars[1] + o.scalars[1]],
        }
    }

    /// Each distinct variable with its multiplicity and the cofactor.
    fn derivatives(&self) -> Vec<(TraceVar, u32, TraceMonomial)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.traces.len() {
            let v = self.traces[i];
            let mut j = i;
            while j < self.traces.len() && self.traces[j] == v {
                j += 1;
            }
            let mut rest = self.clone();
            rest.traces.remove(i);
            out.push((TraceVar::Trace(v), (j - i) as u32, rest));
            i = j;
        }
        for k in 0..2 {
            if self.scalars[k] > 0 {
                let mut rest = self.clone();
                rest.scalars[k] -= 1;
                out.push((TraceVar::Scalar(k), self.scalars[k] as u32, rest));
            }
        }
        out
    }

    fn render(&self, alphabet: Alphabet) -> String {
        let mut parts = Vec::new();
        for k in 0..2 {
            match self.scalars[k] {
                0 => {}
                1 => parts.push(format!("a{}", k + 1)),
                e => parts.push(format!("a{}^{e}", k + 1)),
            }
        }
        for v in &self.traces {
            parts.push(format!("T({})", v.render(alphabet)));
        }
        parts.join("*")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TraceVar {
    Trace(Necklace),
    Scalar(usize),
}

/// A commutative polynomial in traces of necklaces.
///
/// Eager rules: `Tr(empty) = n`; in the traceless reading `Tr A = Tr B = 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct TracePolynomial {
    interp: Interpretation,
    n: usize,
    terms: FxHashMap<TraceMonomial, Q>,
}

impl TracePolynomial {
    pub fn zero(interp: Interpretation, n: usize) -> Self {
        TracePolynomial {
            interp,
            n,
            terms: FxHashMap::default(),
        }
    }

    pub fn constant(c: Q, interp: Interpretation, n: usize) -> Self {
        let mut p = TracePolynomial::zero(interp, n);
        p.add_term(TraceMonomial::one(), c);
        p
    }

    pub fn trace(v: Necklace, interp: Interpretation, n: usize) -> Self {
        if v.is_empty() {
            return TracePolynomial::constant(qi(n as i64), interp, n);
        }
        if v.len() == 1 && interp == Interpretation::Traceless {
            return TracePolynomial::zero(interp, n);
        }
        let mut p = TracePolynomial::zero(interp, n);
        p.add_term(
            TraceMonomial {
                traces: vec![v],
                scalars: [0, 0],
            },
            Q::one(),
        );
        p
    }

    /// The scalar variable `a1` (`k = 0`) or `a2` (`k = 1`).
    pub fn scalar_var(k: usize, interp: Interpretation, n: usize) -> Self {
        let mut m = TraceMonomial::one();
        m.scalars[k] = 1;
        let mut p = TracePolynomial::zero(interp, n);
        p.add_term(m, Q::one());
        p
    }

    pub fn interpretation(&self) -> Interpretation {
        self.interp
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TraceMonomial, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &TraceMonomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// Terms by descending degree, then descending traces.
    pub fn sorted(&self) -> Vec<(TraceMonomial, Q)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        v.sort_by(|a, b| monomial_display_order(&b.0, &a.0));
        v
    }

    pub fn add_term(&mut self, m: TraceMonomial, c: Q) {
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

    fn check_compatible(&self, o: &TracePolynomial) {
        assert!(
            self.interp == o.interp && self.n == o.n,
            "trace polynomials from different sessions"
        );
    }

    pub fn add_assign_scaled(&mut self, o: &TracePolynomial, c: &Q) {
        self.check_compatible(o);
        for (m, d) in &o.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn add(&self, o: &TracePolynomial) -> TracePolynomial {
        let mut out = self.clone();
        out.add_assign_scaled(o, &Q::one());
        out
    }

    pub fn sub(&self, o: &TracePolynomial) -> TracePolynomial {
        let mut out = self.clone();
        out.add_assign_scaled(o, &-Q::one());
        out
    }

    pub fn scale(&self, c: &Q) -> TracePolynomial {
        let mut out = TracePolynomial::zero(self.interp, self.n);
        out.add_assign_scaled(self, c);
        out
    }

    pub fn mul(&self, o: &TracePolynomial) -> TracePolynomial {
        self.check_compatible(o);
        let mut out = TracePolynomial::zero(self.interp, self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// The part that is linear in traces with no scalar factor.
    pub fn linear_part(&self) -> NecklaceSum {
        let mut out = NecklaceSum::zero();
        for (m, c) in &self.terms {
            if m.traces.len() == 1 && m.scalars == [0, 0] {
                out.add_term(m.traces[0], c.clone());
            }
        }
        out
    }

    pub fn render(&self) -> String {
        let alphabet = self.interp.alphabet();
        let mut s = String::new();
        let mut first = true;
        for (m, c) in self.sorted() {
            let _ = write_coef_term(&mut s, &c, first, &m.render(alphabet));
            first = false;
        }
        if first {
            s.push('0');
        }
        s
    }

    /// Inverse of [`TracePolynomial::render`].
    pub fn parse(text: &str, interp: Interpretation, n: usize) -> Result<TracePolynomial> {
        let err = |r: &str| Error::parse("trace polynomial", text, r);
        let mut out = TracePolynomial::zero(interp, n);
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" {
            return Ok(out);
        }
        for (sign, body) in split_signed_terms(&compact).map_err(|e| err(&e))? {
            let mut coef = Q::one();
            let mut term = TracePolynomial::constant(Q::one(), interp, n);
            for factor in split_factors(body) {
                if let Some(inner) = factor.strip_prefix("T(").and_then(|f| f.strip_suffix(')')) {
                    let (w, _) = parse_word(inner)?;
                    term = term.mul(&TracePolynomial::trace(canonicalize(w), interp, n));
                } else if let Some(rest) = factor.strip_prefix('a') {
                    let (k, e) = match rest.split_once('^') {
                        Some((k, e)) => (k, e.parse::<u32>().map_err(|_| err("bad exponent"))?),
                        None => (rest, 1),
                    };
                    let k = match k {
                        "1" => 0,
                        "2" => 1,
                        _ => return Err(err("only a1, a2 are scalar variables")),
                    };
                    for _ in 0..e {
                        term = term.mul(&TracePolynomial::scalar_var(k, interp, n));
                    }
                } else {
                    coef *= parse_rational(factor).ok_or_else(|| err("bad coefficient"))?;
                }
            }
            if sign {
                coef = -coef;
            }
            out.add_assign_scaled(&term, &coef);
        }
        Ok(out)
    }
}

/// Split `a - b + c` into signed pieces, respecting parentheses.
pub(crate) fn split_signed_terms(s: &str) -> std::result::Result<Vec<(bool, &str)>, String> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut neg = false;
    if bytes.first() == Some(&b'-') {
        neg = true;
        start = 1;
    } else if bytes.first() == Some(&b'+') {
        start = 1;
    }
    for i in start..bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && i > start && bytes[i - 1] != b'^' => {
                out.push((neg, &s[start..i]));
                neg = bytes[i] == b'-';
                start = i + 1;
            }
            _ => {}
        }
    }
    if start >= s.len() {
        return Err("dangling sign".into());
    }
    out.push((neg, &s[start..]));
    if out.iter().any(|(_, t)| t.is_empty()) {
        return Err("empty term".into());
    }
    Ok(out)
}

fn split_factors(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

pub(crate) fn parse_rational(s: &str) -> Option<Q> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: num_bigint::BigInt = n.parse().ok()?;
    let d: num_bigint::BigInt = d.parse().ok()?;
    (!d.is_zero()).then(|| Q::new(n, d))
}

fn monomial_display_order(a: &TraceMonomial, b: &TraceMonomial) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| a.cmp(b))
}

impl fmt::Display for TracePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for TracePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} n={}] {}", self.interp.name(), self.n, self.render())
    }
}

/// The bracket of two words as a combination of necklaces.
pub fn kontsevich_bracket(w1: Word, w2: Word) -> NecklaceSum {
    let mut out = NecklaceSum::zero();
    for i in 0..w1.len() {
        let li = w1.letter(i);
        let ri = w1.remainder(i);
        for j in 0..w2.len() {
            let s = omega(li, w2.letter(j));
            if s != 0 {
                out.add_term(canonicalize(ri.concat(w2.remainder(j))), qi(s));
            }
        }
    }
    out
}

/// Bilinear extension of [`kontsevich_bracket`].
pub fn kontsevich_bracket_sums(a: &NecklaceSum, b: &NecklaceSum) -> NecklaceSum {
    let mut out = NecklaceSum::zero();
    for (v, c) in a.iter() {
        for (w, d) in b.iter() {
            let br = kontsevich_bracket(v.word(), w.word());
            for (k, e) in br.iter() {
                out.add_term(*k, c * d * e);
            }
        }
    }
    out
}

/// `Σ_{i : w_i = l} Tr(remainder_i(w))`.
fn deletion_traces(w: Word, l: Letter, n: usize) -> TracePolynomial {
    let mut out = TracePolynomial::zero(Interpretation::Traceless, n);
    for i in 0..w.len() {
        if w.letter(i) == l {
            out.add_assign_scaled(
                &TracePolynomial::trace(canonicalize(w.remainder(i)), Interpretation::Traceless, n),
                &Q::one(),
            );
        }
    }
    out
}

/// The bracket of `Tr(w1)` and `Tr(w2)` for traceless letters:
/// each opposite-letter position pair contributes
/// `ω·[Tr(rem_i w1 · rem_j w2) - Tr(rem_i w1)·Tr(rem_j w2)/n]`.
pub fn traceless_bracket(w1: Word, w2: Word, n: usize) -> TracePolynomial {
    let interp = Interpretation::Traceless;
    let main = kontsevich_bracket(w1, w2).trace(interp, n);
    let correction = deletion_traces(w1, Letter::First, n)
        .mul(&deletion_traces(w2, Letter::Second, n))
        .sub(&deletion_traces(w1, Letter::Second, n).mul(&deletion_traces(w2, Letter::First, n)));
    let mut out = main;
    out.add_assign_scaled(&correction, &-Q::new(1.into(), (n as i64).into()));
    out
}

fn var_bracket(a: TraceVar, b: TraceVar, interp: Interpretation, n: usize) -> TracePolynomial {
    match (a, b) {
        (TraceVar::Trace(v), TraceVar::Trace(w)) => match interp {
            Interpretation::Generic => kontsevich_bracket(v.word(), w.word()).trace(interp, n),
            Interpretation::Traceless => bracket_cache().bracket(v, w, interp, n).as_ref().clone(),
        },
        (TraceVar::Scalar(0), TraceVar::Scalar(1)) => {
            TracePolynomial::constant(qi(n as i64), interp, n)
        }
        (TraceVar::Scalar(1), TraceVar::Scalar(0)) => {
            TracePolynomial::constant(qi(-(n as i64)), interp, n)
        }
        _ => TracePolynomial::zero(interp, n),
    }
}

/// Leibniz extension of the word bracket to trace polynomials.
pub fn poisson_bracket(f: &TracePolynomial, g: &TracePolynomial) -> Result<TracePolynomial> {
    if f.interp != g.interp || f.n != g.n {
        return Err(Error::Mismatch(format!(
            "{} n={} against {} n={}",
            f.interp.name(),
            f.n,
            g.interp.name(),
            g.n
        )));
    }
    let (interp, n) = (f.interp, f.n);
    let mut out = TracePolynomial::zero(interp, n);
    for (m1, c1) in &f.terms {
        let d1 = m1.derivatives();
        for (m2, c2) in &g.terms {
            for (v, e1, r1) in &d1 {
                for (w, e2, r2) in m2.derivatives() {
                    let br = var_bracket(*v, w, interp, n);
                    if br.is_zero() {
                        continue;
                    }
                    let mut cof = TracePolynomial::zero(interp, n);
                    cof.add_term(r1.mul(&r2), c1 * c2 * qi((e1 * e2) as i64));
                    out.add_assign_scaled(&cof.mul(&br), &Q::one());
                }
            }
        }
    }
    Ok(out)
}

/// Substitute `A = x - Tr(x)/n`, `B = y - Tr(y)/n` into `Tr(w)`.
pub fn expand_traceless(w: Word, n: usize) -> TracePolynomial {
    let interp = Interpretation::Generic;
    let len = w.len();
    let shift = -Q::new(1.into(), (n as i64).into());
    let mut out = TracePolynomial::zero(interp, n);
    for subset in 0u64..(1u64 << len) {
        let mut rest = Word::EMPTY;
        let mut term = TracePolynomial::constant(Q::one(), interp, n);
        let mut coef = Q::one();
        for i in 0..len {
            let l = w.letter(i);
            if subset >> i & 1 == 1 {
                coef *= &shift;
                term = term.mul(&TracePolynomial::trace(
                    canonicalize(Word::letter_word(l)),
                    interp,
                    n,
                ));
            } else {
                rest.push(l);
            }
        }
        let term = term.mul(&TracePolynomial::trace(canonicalize(rest), interp, n));
        out.add_assign_scaled(&term, &coef);
    }
    out
}

/// Substitute `x = A + a1/n`, `y = B + a2/n` into a generic polynomial.
pub fn contract_to_traceless(f: &TracePolynomial) -> TracePolynomial {
    assert_eq!(f.interp, Interpretation::Generic, "contract expects generic input");
    let n = f.n;
    let interp = Interpretation::Traceless;
    let inv_n = Q::new(1.into(), (n as i64).into());
    let mut memo: FxHashMap<Necklace, TracePolynomial> = FxHashMap::default();
    let mut contract_trace = |v: Necklace| -> TracePolynomial {
        memo.entry(v)
            .or_insert_with(|| {
                let w = v.word();
                let mut out = TracePolynomial::zero(interp, n);
                for subset in 0u64..(1u64 << w.len()) {
                    let mut rest = Word::EMPTY;
                    let mut m = TraceMonomial::one();
                    let mut coef = Q::one();
                    for i in 0..w.len() {
                        let l = w.letter(i);
                        if subset >> i & 1 == 1 {
                            coef *= &inv_n;
                            m.scalars[if l == Letter::First { 0 } else { 1 }] += 1;
                        } else {
                            rest.push(l);
                        }
                    }
                    let mut scal = TracePolynomial::zero(interp, n);
                    scal.add_term(m, coef);
                    out.add_assign_scaled(
                        &scal.mul(&TracePolynomial::trace(canonicalize(rest), interp, n)),
                        &Q::one(),
                    );
                }
                out
            })
            .clone()
    };
    let mut out = TracePolynomial::zero(interp, n);
    for (m, c) in &f.terms {
        let mut term = TracePolynomial::constant(c.clone(), interp, n);
        for k in 0..2 {
            for _ in 0..m.scalars[k] {
                term = term.mul(&TracePolynomial::scalar_var(k, interp, n));
            }
        }
        for v in &m.traces {
            term = term.mul(&contract_trace(*v));
        }
        out.add_assign_scaled(&term, &Q::one());
    }
    out
}

type CacheKey = (Necklace, Necklace, Interpretation, usize);

/// Memo table for necklace brackets. Keys are ordered pairs with the
/// smaller necklace first; the reversed pair is served by negation.
#[derive(Default)]
pub struct BracketCache {
    map: Mutex<FxHashMap<CacheKey, Arc<TracePolynomial>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub entries: usize,
}

impl BracketCache {
    pub fn new() -> Self {
        BracketCache::default()
    }

    pub fn bracket(
        &self,
        v1: Necklace,
        v2: Necklace,
        interp: Interpretation,
        n: usize,
    ) -> Arc<TracePolynomial> {
        match v1.cmp(&v2) {
            Ordering::Equal => Arc::new(TracePolynomial::zero(interp, n)),
            Ordering::Less => self.ordered(v1, v2, interp, n),
            Ordering::Greater => Arc::new(self.ordered(v2, v1, interp, n).scale(&-Q::one())),
        }
    }

    fn ordered(
        &self,
        v1: Necklace,
        v2: Necklace,
        interp: Interpretation,
        n: usize,
    ) -> Arc<TracePolynomial> {
        let key = (v1, v2, interp, n);
        if let Some(hit) = self.map.lock().unwrap().get(&key) {
            self.hits.fetch_add(1, AtomicOrdering::Relaxed);
            return hit.clone();
        }
        self.misses.fetch_add(1, AtomicOrdering::Relaxed);
        let value = Arc::new(match interp {
            Interpretation::Generic => kontsevich_bracket(v1.word(), v2.word()).trace(interp, n),
            Interpretation::Traceless => traceless_bracket(v1.word(), v2.word(), n),
        });
        // first writer wins so every caller sees one value per key
        self.map
            .lock()
            .unwrap()
            .entry(key)
            .or_insert(value)
            .clone()
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(AtomicOrdering::Relaxed),
            misses: self.misses.load(AtomicOrdering::Relaxed),
            entries: self.map.lock().unwrap().len(),
        }
    }

    pub fn clear(&self) {
        self.map.lock().unwrap().clear();
    }

    /// Write every entry as `mode n v1 v2 : poly`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let map = self.map.lock().unwrap();
        let mut keys: Vec<_> = map.keys().copied().collect();
        keys.sort();
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "# bracket-cache v1")?;
        for k in keys {
            let (v1, v2, interp, n) = k;
            let alphabet = interp.alphabet();
            writeln!(
                out,
                "{} {} {} {} : {}",
                interp.name(),
                n,
                render_or_one(v1, alphabet),
                render_or_one(v2, alphabet),
                map[&k].render()
            )?;
        }
        Ok(())
    }

    /// Merge entries from a file written by [`BracketCache::save`].
    pub fn load(&self, path: &Path) -> Result<usize> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let fmt_err = |line: usize, reason: &str| Error::Format {
            path: path.display().to_string(),
            line,
            reason: reason.to_string(),
        };
        let mut loaded = 0;
        let mut map = self.map.lock().unwrap();
        for (idx, line) in file.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (head, poly) = line
                .split_once(" : ")
                .ok_or_else(|| fmt_err(line_no, "missing ' : '"))?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(fmt_err(line_no, "expected mode, n and two necklaces"));
            }
            let interp = match parts[0] {
                "generic" => Interpretation::Generic,
                "traceless" => Interpretation::Traceless,
                _ => return Err(fmt_err(line_no, "unknown mode")),
            };
            let n: usize = parts[1].parse().map_err(|_| fmt_err(line_no, "bad n"))?;
            let nk = |s: &str| -> Result<Necklace> {
                if s == "1" {
                    Ok(Necklace::EMPTY)
                } else {
                    Necklace::parse(s)
                }
            };
            let (v1, v2) = (nk(parts[2])?, nk(parts[3])?);
            if v1 >= v2 {
                return Err(fmt_err(line_no, "pair not in canonical order"));
            }
            let value = TracePolynomial::parse(poly, interp, n)?;
            map.entry((v1, v2, interp, n)).or_insert_with(|| Arc::new(value));
            loaded += 1;
        }
        Ok(loaded)
    }
}

fn render_or_one(v: Necklace, alphabet: Alphabet) -> String {
    if v.is_empty() {
        "1".into()
    } else {
        v.render(alphabet)
    }
}

static CACHE: std::sync::LazyLock<BracketCache> = std::sync::LazyLock::new(BracketCache::new);

/// The process-wide bracket memo.
pub fn bracket_cache() -> &'static BracketCache {
    &CACHE
}

/// Memoized bracket of two necklaces.
pub fn memoized_bracket(
    v1: Necklace,
    v2: Necklace,
    interp: Interpretation,
    n: usize,
) -> Arc<TracePolynomial> {
    bracket_cache().bracket(v1, v2, interp, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap().0
    }

    fn nk(s: &str) -> Necklace {
        Necklace::parse(s).unwrap()
    }

    #[test]
    fn reference_bracket() {
        let b = kontsevich_bracket(w("B^2"), w("A^4B"));
        assert_eq!(b.get(&nk("A^3B^2")), qi(-4));
        assert_eq!(b.get(&nk("A^2BAB")), qi(-4));
        assert_eq!(b.len(), 2);
        let xy = kontsevich_bracket(w("X"), w("Y"));
        assert_eq!(xy.get(&Necklace::EMPTY), qi(1));
        assert!(kontsevich_bracket(w("A^2BAB"), w("A^2BAB")).is_zero());
    }

    #[test]
    fn traceless_examples() {
        let t = traceless_bracket(w("B^2"), w("A^4B"), 4);
        assert_eq!(t.render(), "-4*T(A^3B^2) - 4*T(A^2BAB)");
        assert!(traceless_bracket(w("A"), w("B"), 4).is_zero());
        assert_eq!(traceless_bracket(w("A^2"), w("B^2"), 4).render(), "4*T(AB)");
    }

    #[test]
    fn generic_coordinates() {
        let g = Interpretation::Generic;
        let x = TracePolynomial::trace(nk("X"), g, 4);
        let y = TracePolynomial::trace(nk("Y"), g, 4);
        assert_eq!(poisson_bracket(&x, &y).unwrap().render(), "4");
    }

    #[test]
    fn expansion_example() {
        let e = expand_traceless(w("A^2B"), 4);
        let expected = TracePolynomial::parse(
            "T(X^2Y) - 1/2*T(XY)*T(X) - 1/4*T(X^2)*T(Y) + 1/8*T(X)*T(X)*T(Y)",
            Interpretation::Generic,
            4,
        )
        .unwrap();
        assert_eq!(e, expected);
        assert!(expand_traceless(w("A"), 3).is_zero());
    }

    #[test]
    fn contraction_examples() {
        let g = Interpretation::Generic;
        let t = contract_to_traceless(&TracePolynomial::trace(nk("X"), g, 4));
        assert_eq!(t.render(), "a1");
        let t = contract_to_traceless(&TracePolynomial::trace(nk("X^2"), g, 4));
        assert_eq!(t.render(), "T(A^2) + 1/4*a1^2");
        let round = contract_to_traceless(&expand_traceless(w("A^2B"), 4));
        assert_eq!(round.render(), "T(A^2B)");
    }

    #[test]
    fn routes_agree_small() {
        for (a, b) in [("A^2B", "AB^2"), ("AB", "A^3B"), ("A", "B^2A"), ("A^2", "AB")] {
            for n in 2..=4 {
                let direct = traceless_bracket(w(a), w(b), n);
                let gen = poisson_bracket(&expand_traceless(w(a), n), &expand_traceless(w(b), n))
                    .unwrap();
                assert_eq!(contract_to_traceless(&gen), direct, "{a} {b} n={n}");
            }
        }
    }

    #[test]
    fn cache_antisymmetry_and_hits() {
        let cache = BracketCache::new();
        let (a, b) = (nk("B^2"), nk("A^4B"));
        let first = cache.bracket(a, b, Interpretation::Traceless, 4);
        let again = cache.bracket(a, b, Interpretation::Traceless, 4);
        assert_eq!(first, again);
        assert_eq!(cache.stats().hits, 1);
        let rev = cache.bracket(b, a, Interpretation::Traceless, 4);
        assert_eq!(rev.scale(&-Q::one()), *first);
        cache.clear();
        assert_eq!(cache.bracket(a, b, Interpretation::Traceless, 4), first);
    }

    #[test]
    fn trace_poly_parse_roundtrip() {
        let p = TracePolynomial::parse(
            "-3/2*a1^2*T(A^2B) + T(AB)*T(AB) - 5",
            Interpretation::Traceless,
            3,
        )
        .unwrap();
        let back = TracePolynomial::parse(&p.render(), Interpretation::Traceless, 3).unwrap();
        assert_eq!(p, back);
        assert_eq!(p.coefficient(&TraceMonomial::one()), q(-5, 1));
    }
}
