//! Cayley–Hamilton reduction of necklace traces to generator polynomials.
//!
//! For a word `u` with power sums `p_k = Tr(u^k)` and characteristic
//! coefficients `c_k`, Cayley–Hamilton gives
//! `Tr(u^n t) = Σ_{k=1..n} (-1)^{k-1} c_k Tr(u^{n-k} t)`. When the tail `t`
//! is empty the same identity is circular in `p_n`; there `c_n = det(u)` is
//! taken from determinant multiplicativity and Newton's identity is solved
//! for `p_n` instead.

use std::sync::{Arc, Mutex};

use num_traits::One;
use rustc_hash::FxHashMap;

use crate::bracket::{contract_to_traceless, Interpretation, NecklaceSum, TracePolynomial};
use crate::error::{Error, Result};
use crate::ncpoly::Expr;
use crate::necklace::{canonicalize, find_ch_decomposition, Bidegree, Letter, Necklace, Word};
use crate::ring::{ExpressionTable, GenPoly, GeneratorSet};
use crate::{qi, Q};

/// `Tr(u), Tr(u^2), ..., Tr(u^n)`; slot `k - 1` holds `p_k`.
pub type PowerSums = Vec<GenPoly>;
/// `c_0 = 1, c_1, ..., c_n`; slot `k` holds `c_k`.
pub type CharCoeffs = Vec<GenPoly>;

/// Newton's identities: `k c_k = Σ_{i=1..k} (-1)^{i-1} c_{k-i} p_i`.
/// Uses `p_1..p_n`, so `p` must hold at least `n` entries.
pub fn newton_elementary(p: &[GenPoly], n: usize) -> CharCoeffs {
    assert!(p.len() >= n, "need {n} power sums");
    let mut c = vec![GenPoly::one()];
    for k in 1..=n {
        let mut acc = GenPoly::zero();
        for i in 1..=k {
            let sign = if i % 2 == 1 { Q::one() } else { -Q::one() };
            acc.add_assign_scaled(&c[k - i].mul(&p[i - 1]), &sign);
        }
        c.push(acc.scale(&Q::new(1.into(), (k as i64).into())));
    }
    c
}

/// Reduces traces using the generator table, an expression table of
/// already-processed necklaces, and Cayley–Hamilton.
pub struct Reducer<'a> {
    gens: &'a GeneratorSet,
    table: &'a ExpressionTable,
    memo: Mutex<FxHashMap<Necklace, GenPoly>>,
    letter_det: [GenPoly; 2],
}

impl<'a> Reducer<'a> {
    pub fn new(gens: &'a GeneratorSet, table: &'a ExpressionTable) -> Self {
        let n = gens.n();
        let letter_det = [Letter::First, Letter::Second].map(|l| {
            // Tr(L^k) for k <= n is always a generator
            let p: Vec<GenPoly> = (1..=n)
                .map(|k| match k {
                    1 => GenPoly::zero(),
                    _ => {
                        let v = canonicalize(Word::letter_word(l).pow(k));
                        GenPoly::var(gens.single_trace_index(v).expect("power generator"))
                    }
                })
                .collect();
            newton_elementary(&p, n).pop().unwrap()
        });
        Reducer {
            gens,
            table,
            memo: Mutex::new(FxHashMap::default()),
            letter_det,
        }
    }

    pub fn n(&self) -> usize {
        self.gens.n()
    }

    pub fn generators(&self) -> &GeneratorSet {
        self.gens
    }

    /// `det(w) = det(A)^r det(B)^s` for any word of bidegree `b`.
    pub fn det_word(&self, b: Bidegree) -> GenPoly {
        self.letter_det[0].pow(b.r).mul(&self.letter_det[1].pow(b.s))
    }

    /// `Tr(v)` in the traceless generators.
    pub fn reduce(&self, v: Necklace) -> Result<GenPoly> {
        if v.is_empty() {
            return Ok(GenPoly::constant(qi(self.n() as i64)));
        }
        if v.len() == 1 {
            return Ok(GenPoly::zero());
        }
        if let Some(i) = self.gens.single_trace_index(v) {
            return Ok(GenPoly::var(i));
        }
        if let Some(p) = self.table.get(&v) {
            return Ok(p.clone());
        }
        if let Some(p) = self.memo.lock().unwrap().get(&v) {
            return Ok(p.clone());
        }
        let Some((u, tail)) = find_ch_decomposition(v, self.n()) else {
            return Err(Error::Unreachable(v, self.table.frontier() as usize));
        };
        let p = self.ch_split(u, tail)?;
        self.memo.lock().unwrap().insert(v, p.clone());
        Ok(p)
    }

    fn word_trace(&self, w: Word) -> Result<GenPoly> {
        self.reduce(canonicalize(w))
    }

    /// Cayley–Hamilton substitution at a CH_n necklace, using the
    /// canonical decomposition.
    pub fn ch_substitute(&self, v: Necklace) -> Result<GenPoly> {
        let (u, tail) =
            find_ch_decomposition(v, self.n()).ok_or(Error::NotCayleyHamilton(v, self.n()))?;
        self.ch_split(u, tail)
    }

    /// Cayley–Hamilton substitution for the split `v ~ u^n · tail`;
    /// inner traces are reduced canonically.
    pub fn ch_split(&self, u: Word, tail: Word) -> Result<GenPoly> {
        let n = self.n();
        if tail.is_empty() {
            return self.pure_power(u);
        }
        let p: Vec<GenPoly> = (1..n)
            .map(|k| self.word_trace(u.pow(k)))
            .collect::<Result<_>>()?;
        let mut c = newton_elementary(&p, n - 1);
        c.push(self.det_word(u.bidegree()));
        let mut out = GenPoly::zero();
        for k in 1..=n {
            if c[k].is_zero() {
                continue;
            }
            let t = self.word_trace(u.pow(n - k).concat(tail))?;
            let sign = if k % 2 == 1 { Q::one() } else { -Q::one() };
            out.add_assign_scaled(&c[k].mul(&t), &sign);
        }
        Ok(out)
    }

    /// `p_n` from `n c_n = Σ_{i=1..n} (-1)^{i-1} c_{n-i} p_i` with
    /// `c_n = det(u)`.
    fn pure_power(&self, u: Word) -> Result<GenPoly> {
        let n = self.n();
        let p: Vec<GenPoly> = (1..n)
            .map(|k| self.word_trace(u.pow(k)))
            .collect::<Result<_>>()?;
        let c = newton_elementary(&p, n - 1);
        let mut rest = self.det_word(u.bidegree()).scale(&qi(n as i64));
        for i in 1..n {
            let sign = if i % 2 == 1 { -Q::one() } else { Q::one() };
            rest.add_assign_scaled(&c[n - i].mul(&p[i - 1]), &sign);
        }
        let sign = if n % 2 == 1 { Q::one() } else { -Q::one() };
        Ok(rest.scale(&sign))
    }

    /// A necklace sum reduced termwise.
    pub fn reduce_sum(&self, s: &NecklaceSum) -> Result<GenPoly> {
        let mut out = GenPoly::zero();
        for (v, c) in s.sorted() {
            out.add_assign_scaled(&self.reduce(v)?, &c);
        }
        Ok(out)
    }

    /// A traceless trace polynomial, with `a1`, `a2` kept as variables.
    pub fn reduce_trace_poly(&self, f: &TracePolynomial) -> Result<GenPoly> {
        let mut out = GenPoly::zero();
        for (m, c) in f.sorted() {
            let mut term = GenPoly::constant(c);
            for k in 0..2 {
                term = term.mul(&GenPoly::var(k + 1).pow(m.scalars()[k] as u32));
            }
            for v in m.traces() {
                term = term.mul(&self.reduce(*v)?);
            }
            out.add_assign_scaled(&term, &Q::one());
        }
        Ok(out)
    }

    /// A generic trace polynomial, via the traceless shift.
    pub fn reduce_generic(&self, f: &TracePolynomial) -> Result<GenPoly> {
        match f.interpretation() {
            Interpretation::Generic => self.reduce_trace_poly(&contract_to_traceless(f)),
            Interpretation::Traceless => self.reduce_trace_poly(f),
        }
    }

    /// Power sums of `C = [A,B]`: `p_k` for `k = 1..=n`.
    fn commutator_power_sums(&self) -> Result<PowerSums> {
        (1..=self.n() as u32)
            .map(|k| match self.gens.commutator_trace(k) {
                Some(p) => Ok(p),
                None => self.reduce_sum(&commutator_power_expand(k)),
            })
            .collect()
    }

    /// `Tr([A,B]^m)` with `[A,B]` treated as one matrix under Cayley–Hamilton.
    pub fn commutator_power_reduce(&self, m: u32) -> Result<GenPoly> {
        let n = self.n();
        let mut p = self.commutator_power_sums()?;
        if (m as usize) <= n {
            return Ok(p.swap_remove(m as usize - 1));
        }
        let c = newton_elementary(&p, n);
        for k in n + 1..=m as usize {
            let mut next = GenPoly::zero();
            for j in 1..=n {
                let sign = if j % 2 == 1 { Q::one() } else { -Q::one() };
                next.add_assign_scaled(&c[j].mul(&p[k - j - 1]), &sign);
            }
            p.push(next);
        }
        Ok(p.pop().unwrap())
    }
}

/// `Tr([A,B]^m)` expanded into necklaces.
pub fn commutator_power_expand(m: u32) -> NecklaceSum {
    static CACHE: Mutex<Option<FxHashMap<u32, Arc<NecklaceSum>>>> = Mutex::new(None);
    let mut guard = CACHE.lock().unwrap();
    let map = guard.get_or_insert_with(FxHashMap::default);
    map.entry(m)
        .or_insert_with(|| {
            let e = Expr::Pow(
                Box::new(Expr::Commutator(
                    Box::new(Expr::Letter(Letter::First)),
                    Box::new(Expr::Letter(Letter::Second)),
                )),
                m,
            );
            Arc::new(e.to_ncpoly().trace())
        })
        .as_ref()
        .clone()
}

/// The value of every CH decomposition of `v`, for confluence checks.
pub fn all_ch_values(r: &Reducer<'_>, v: Necklace) -> Result<Vec<GenPoly>> {
    crate::necklace::all_ch_decompositions(v, r.n())
        .into_iter()
        .map(|(u, t)| r.ch_split(u, t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::generator_set;
    use crate::q;

    fn p(s: &str) -> GenPoly {
        GenPoly::parse(s, 32).unwrap()
    }

    fn nk(s: &str) -> Necklace {
        Necklace::parse(s).unwrap()
    }

    #[test]
    fn newton_small_cases() {
        // identity matrix: p_k = n, c_k = binomial(n, k)
        for n in 1..=4usize {
            let ps = vec![GenPoly::constant(qi(n as i64)); n];
            let c = newton_elementary(&ps, n);
            let mut binom = 1i64;
            for k in 0..=n {
                assert_eq!(c[k], GenPoly::constant(qi(binom)), "n={n} k={k}");
                binom = binom * (n - k) as i64 / (k as i64 + 1);
            }
        }
        let c = newton_elementary(&[GenPoly::zero(), p("a3")], 2);
        assert_eq!(c[2], p("-1/2*a3"));
    }

    #[test]
    fn determinant_of_a_letter() {
        let gens = generator_set(4).unwrap();
        let t = ExpressionTable::new(4);
        let r = Reducer::new(&gens, &t);
        assert_eq!(r.det_word(Bidegree::new(1, 0)), p("1/8*a3^2 - 1/4*a10"));
        assert_eq!(r.det_word(Bidegree::new(0, 0)), GenPoly::one());
    }

    #[test]
    fn degree_five_ch_values() {
        let gens = generator_set(4).unwrap();
        let t = ExpressionTable::new(4);
        let r = Reducer::new(&gens, &t);
        assert_eq!(r.reduce(nk("A^5")).unwrap(), p("5/6*a3*a6"));
        assert_eq!(r.reduce(nk("A^4B")).unwrap(), p("1/2*a3*a7 + 1/3*a4*a6"));
        assert_eq!(r.reduce(nk("A^4")).unwrap(), p("a10"));
        assert!(matches!(r.reduce(nk("A^3B^2")), Err(Error::Unreachable(..))));
        assert!(r.ch_substitute(nk("A^3B^2")).is_err());
    }

    #[test]
    fn commutator_powers() {
        let e = commutator_power_expand(2);
        assert_eq!(e.get(&nk("A^2B^2")), qi(-2));
        assert_eq!(e.get(&nk("ABAB")), qi(2));
        let gens = generator_set(4).unwrap();
        let t = ExpressionTable::new(4);
        let r = Reducer::new(&gens, &t);
        assert_eq!(r.commutator_power_reduce(3).unwrap(), p("3*a21"));
        assert_eq!(r.commutator_power_reduce(2).unwrap(), p("2*a15"));
        let _ = q(1, 1);
    }
}
