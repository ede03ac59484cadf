//! Affine equations among the traces of one bidegree.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;

use num_traits::{One, Zero};
use rustc_hash::{FxHashMap, FxHashSet};

use crate::bracket::{memoized_bracket, traceless_bracket, Interpretation, NecklaceSum, TracePolynomial};
use crate::error::{Error, Result};
use crate::miner::ideal::{IdealPiece, Source};
use crate::miner::pairs::BreakingPair;
use crate::necklace::{Bidegree, Necklace};
use crate::reduce::{commutator_power_expand, Reducer};
use crate::ring::{GenPoly, GeneratorSet, MonomialOrder};
use crate::Q;

/// `Σ c_u Tr(u) + known`, where the `u` are unknown traces of the
/// target bidegree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Mixed {
    pub unknowns: BTreeMap<Necklace, Q>,
    pub known: GenPoly,
}

impl Mixed {
    pub fn known(p: GenPoly) -> Self {
        Mixed {
            unknowns: BTreeMap::new(),
            known: p,
        }
    }

    pub fn unknown(v: Necklace) -> Self {
        Mixed {
            unknowns: BTreeMap::from([(v, Q::one())]),
            known: GenPoly::zero(),
        }
    }

    pub fn is_known(&self) -> bool {
        self.unknowns.is_empty()
    }

    pub fn add_scaled(&mut self, o: &Mixed, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (v, d) in &o.unknowns {
            let e = self.unknowns.entry(*v).or_insert_with(Q::zero);
            *e += c * d;
            if e.is_zero() {
                self.unknowns.remove(v);
            }
        }
        self.known.add_assign_scaled(&o.known, c);
    }

    /// `p · self`; unknowns may only be scaled by constants, since any
    /// positive-degree factor would leave the target bidegree.
    pub fn mul_poly(&self, p: &GenPoly) -> Mixed {
        let mut out = Mixed::known(self.known.mul(p));
        if !self.unknowns.is_empty() {
            assert!(p.is_constant(), "unknown trace multiplied by a nonconstant polynomial");
            let c = p.constant_term();
            for (v, d) in &self.unknowns {
                if !(&c * d).is_zero() {
                    out.unknowns.insert(*v, &c * d);
                }
            }
        }
        out
    }
}

/// `Σ lhs_u Tr(u) = rhs` in one bidegree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub target: Bidegree,
    pub lhs: Vec<(Necklace, Q)>,
    pub rhs: GenPoly,
    pub source: Source,
}

impl Equation {
    /// `left = right` with unknowns moved left and knowns moved right.
    pub fn from_sides(target: Bidegree, left: &Mixed, right: &Mixed, source: Source) -> Self {
        let mut diff = left.clone();
        diff.add_scaled(right, &-Q::one());
        Equation {
            target,
            lhs: diff.unknowns.into_iter().collect(),
            rhs: diff.known.neg(),
            source,
        }
    }

    pub fn render(&self, order: &MonomialOrder) -> String {
        let mut s = String::new();
        for (k, (v, c)) in self.lhs.iter().enumerate() {
            let neg = c < &Q::zero();
            s.push_str(match (k, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            });
            let a = if neg { -c.clone() } else { c.clone() };
            if !a.is_one() {
                s.push_str(&format!("{a}*"));
            }
            s.push_str(&format!("T({v})"));
        }
        if self.lhs.is_empty() {
            s.push('0');
        }
        format!("{s} = {}", self.rhs.render(order))
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.target, self.source)
    }
}

/// `{a_i, a_j}` for generator pairs whose bracket lands in a finished
/// bidegree, reduced and normalized modulo the ideal there.
#[derive(Default)]
pub struct GeneratorBrackets {
    done: Mutex<FxHashMap<(usize, usize), GenPoly>>,
}

impl GeneratorBrackets {
    pub fn new() -> Self {
        GeneratorBrackets::default()
    }

    pub fn len(&self) -> usize {
        self.done.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Everything needed to write equations for one target bidegree.
pub struct EquationContext<'a> {
    pub gens: &'a GeneratorSet,
    pub reducer: Reducer<'a>,
    pub target: Bidegree,
    pub unknowns: &'a FxHashSet<Necklace>,
    pub brackets: &'a GeneratorBrackets,
    /// Finished pieces with a nonzero ideal, for normalizing cached brackets.
    pub pieces: &'a FxHashMap<Bidegree, IdealPiece>,
    pub finished: &'a FxHashSet<Bidegree>,
}

impl EquationContext<'_> {
    fn n(&self) -> usize {
        self.gens.n()
    }

    /// `Tr(v)`, kept symbolic when `v` is an unknown of the target.
    pub fn trace(&self, v: Necklace) -> Result<Mixed> {
        if v.bidegree() == self.target && self.unknowns.contains(&v) {
            return Ok(Mixed::unknown(v));
        }
        Ok(Mixed::known(self.reducer.reduce(v)?))
    }

    pub fn necklace_sum(&self, s: &NecklaceSum) -> Result<Mixed> {
        let mut out = Mixed::default();
        for (v, c) in s.sorted() {
            out.add_scaled(&self.trace(v)?, &c);
        }
        Ok(out)
    }

    /// A traceless trace polynomial; only single traces may be unknown.
    pub fn trace_poly(&self, f: &TracePolynomial) -> Result<Mixed> {
        let mut out = Mixed::default();
        for (m, c) in f.sorted() {
            debug_assert_eq!(m.scalars(), [0, 0], "scalar variable in a traceless bracket");
            if let [v] = m.traces() {
                out.add_scaled(&self.trace(*v)?, &c);
                continue;
            }
            let mut term = GenPoly::constant(c);
            for v in m.traces() {
                term = term.mul(&self.reducer.reduce(*v)?);
            }
            out.known.add_assign_scaled(&term, &Q::one());
        }
        Ok(out)
    }

    fn normalize(&self, b: Bidegree, p: GenPoly) -> GenPoly {
        match self.pieces.get(&b) {
            Some(piece) => piece.normal_form(&p),
            None => p,
        }
    }

    /// `{a_i, a_j}` for traceless generators.
    pub fn generator_bracket(&self, i: usize, j: usize) -> Result<Mixed> {
        if i == j {
            return Ok(Mixed::default());
        }
        let (lo, hi, sign) = if i < j { (i, j, Q::one()) } else { (j, i, -Q::one()) };
        let (bi, bj) = (self.gens.bidegree(lo), self.gens.bidegree(hi));
        if bi.r + bj.r == 0 || bi.s + bj.s == 0 {
            return Ok(Mixed::default());
        }
        let b = Bidegree::new(bi.r + bj.r - 1, bi.s + bj.s - 1);
        let cacheable = b != self.target && self.finished.contains(&b);
        if cacheable {
            if let Some(p) = self.brackets.done.lock().unwrap().get(&(lo, hi)) {
                return Ok(Mixed::known(p.scale(&sign)));
            }
        }
        let mut f = TracePolynomial::zero(Interpretation::Traceless, self.n());
        for (v, c) in self.gens.expand_generator(lo).iter() {
            for (w, d) in self.gens.expand_generator(hi).iter() {
                f.add_assign_scaled(&memoized_bracket(*v, *w, Interpretation::Traceless, self.n()), &(c * d));
            }
        }
        let mut value = self.trace_poly(&f)?;
        if cacheable {
            if !value.is_known() {
                return Err(Error::Mismatch(format!("bracket {{a{lo}, a{hi}}} left unknowns in {b}")));
            }
            value.known = self.normalize(b, value.known);
            self.brackets
                .done
                .lock()
                .unwrap()
                .insert((lo, hi), value.known.clone());
        }
        let mut out = Mixed::default();
        out.add_scaled(&value, &sign);
        Ok(out)
    }

    /// `{P, Q}` by the Leibniz rule over generator brackets.
    pub fn poly_bracket(&self, p: &GenPoly, q: &GenPoly) -> Result<Mixed> {
        let dq: Vec<(usize, GenPoly)> = q.variables().into_iter().map(|j| (j, q.derivative(j))).collect();
        let mut out = Mixed::default();
        for i in p.variables() {
            let dp = p.derivative(i);
            let mut inner = Mixed::default();
            for (j, dqj) in &dq {
                let br = self.generator_bracket(i, *j)?;
                if br.is_known() && br.known.is_zero() {
                    continue;
                }
                inner.add_scaled(&br.mul_poly(dqj), &Q::one());
            }
            out.add_scaled(&inner.mul_poly(&dp), &Q::one());
        }
        Ok(out)
    }

    /// Both evaluations of `{Tr(first), Tr(second)}`: necklace bracket
    /// first, then the bracket of the reduced polynomials.
    pub fn pair_equation(&self, pair: &BreakingPair) -> Result<Equation> {
        let direct = traceless_bracket(pair.first.word(), pair.second.word(), self.n());
        let left = self.trace_poly(&direct)?;
        let p = self.reducer.reduce(pair.first)?;
        let q = self.reducer.reduce(pair.second)?;
        let right = self.poly_bracket(&p, &q)?;
        Ok(Equation::from_sides(
            self.target,
            &left,
            &right,
            Source::Pair(pair.first, pair.second),
        ))
    }

    /// `Tr([A,B]^m)` expanded into necklaces against its reduction with
    /// `[A,B]` treated as a single matrix.
    pub fn special_equation(&self, m: u32) -> Result<Equation> {
        let left = self.necklace_sum(&commutator_power_expand(m))?;
        let right = Mixed::known(self.reducer.commutator_power_reduce(m)?);
        Ok(Equation::from_sides(self.target, &left, &right, Source::Special(m)))
    }

    /// The definition of generator `i` as a sum of necklace traces.
    pub fn generator_equation(&self, i: usize) -> Result<Equation> {
        let left = self.necklace_sum(self.gens.expand_generator(i))?;
        let right = Mixed::known(GenPoly::var(i));
        Ok(Equation::from_sides(self.target, &left, &right, Source::Generator(i)))
    }

    /// `{a_seed, ρ} = 0` for a relation `ρ`.
    pub fn propagation_equation(&self, seed: usize, rho: &GenPoly, relation: usize) -> Result<Equation> {
        let left = self.poly_bracket(&GenPoly::var(seed), rho)?;
        Ok(Equation::from_sides(
            self.target,
            &left,
            &Mixed::default(),
            Source::Propagation { seed, relation },
        ))
    }
}
