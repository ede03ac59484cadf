//! Minimal generating sets of the trace algebra of two `n x n` matrices.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use num_traits::One;
use rustc_hash::FxHashMap;

use crate::bracket::NecklaceSum;
use crate::error::{Error, Result};
use crate::ncpoly::Expr;
use crate::necklace::{Bidegree, Letter, Necklace, Word};
use crate::ring::linalg::{linear_solve, Solution};
use crate::ring::poly::GenPoly;
use crate::{check_size, Q};

pub const MAX_GENS: usize = 32;

/// `(coefficient, body, power of [A,B] when the body is exactly one)`.
type Def = (&'static str, &'static str, Option<u32>);

const COMMON: [Def; 7] = [
    ("1", "A^2", None),
    ("1", "AB", None),
    ("1", "B^2", None),
    ("1", "A^3", None),
    ("1", "A^2B", None),
    ("1", "AB^2", None),
    ("1", "B^3", None),
];

const N4_REST: [Def; 23] = [
    ("1", "A^4", None),
    ("1", "A^3B", None),
    ("1", "A^2B^2", None),
    ("1", "AB^3", None),
    ("1", "B^4", None),
    ("1/2", "[A,B]^2", Some(2)),
    ("1", "[A,B]^2A", None),
    ("1", "[A,B]^2B", None),
    ("1", "[A,B]^2A^2", None),
    ("1", "[A,B]^2(AB+BA)", None),
    ("1", "[A,B]^2B^2", None),
    ("1/3", "[A,B]^3", Some(3)),
    ("1", "[A,B]^3A", None),
    ("1", "[A,B]^3B", None),
    ("1", "[A,B]^3A^2", None),
    ("1/2", "[A,B]^3(AB+BA)", None),
    ("1", "[A,B]^3B^2", None),
    ("1/2", "[A,B]^4", Some(4)),
    ("1", "[A,B]^3A^3", None),
    ("1/3", "[A,B]^3(A^2B+ABA+BA^2)", None),
    ("1/3", "[A,B]^3(AB^2+BAB+B^2A)", None),
    ("1", "[A,B]^3B^3", None),
    ("1", "[A,B]^3(A^2B^2-AB^2A-BA^2B+B^2A^2)", None),
];

const N3_REST: [Def; 2] = [("1/2", "[A,B]^2", Some(2)), ("1/3", "[A,B]^3", Some(3))];

#[derive(Clone, Debug)]
pub struct Generator {
    pub index: usize,
    /// `a_index = coeff * Tr(body)`; for `a1`, `a2` the body is `X` or `Y`.
    pub coeff: Q,
    pub body: Expr,
    pub body_text: &'static str,
    pub bidegree: Bidegree,
    /// `coeff * Tr(body)` expanded into necklaces.
    pub expansion: NecklaceSum,
    /// `a1`, `a2`: traces of the generic matrices.
    pub scalar: bool,
    /// Set when the generator is the trace of a single necklace.
    pub single_trace: Option<Necklace>,
    /// `Some(m)` when `body = [A,B]^m`.
    pub commutator_power: Option<u32>,
    /// Whether `[A,B]` occurs in the body.
    pub has_commutator: bool,
}

impl Generator {
    pub fn name(&self) -> String {
        format!("a{}", self.index)
    }

    pub fn definition(&self) -> String {
        if self.coeff.is_one() {
            format!("Tr({})", self.body_text)
        } else {
            format!("{}*Tr({})", self.coeff, self.body_text)
        }
    }
}

#[derive(Debug)]
pub struct GeneratorSet {
    n: usize,
    gens: Vec<Generator>,
    single: FxHashMap<Necklace, usize>,
    support: BTreeSet<Necklace>,
    swap: OnceLock<std::result::Result<Vec<GenPoly>, usize>>,
}

/// The generator table for `n`, built once per process.
pub fn generator_set(n: usize) -> Result<Arc<GeneratorSet>> {
    check_size(n)?;
    static SETS: [OnceLock<Arc<GeneratorSet>>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    Ok(SETS[n - 2]
        .get_or_init(|| Arc::new(GeneratorSet::build(n)))
        .clone())
}

impl GeneratorSet {
    fn build(n: usize) -> GeneratorSet {
        let mut defs: Vec<Def> = Vec::new();
        match n {
            2 => defs.extend_from_slice(&COMMON[..3]),
            3 => {
                defs.extend_from_slice(&COMMON);
                defs.extend_from_slice(&N3_REST);
            }
            _ => {
                defs.extend_from_slice(&COMMON);
                defs.extend_from_slice(&N4_REST);
            }
        }
        let mut gens = Vec::with_capacity(defs.len() + 2);
        for (k, (letter, text)) in [(Letter::First, "X"), (Letter::Second, "Y")].into_iter().enumerate() {
            let v = Necklace::parse(text).unwrap();
            gens.push(Generator {
                index: k + 1,
                coeff: Q::one(),
                body: Expr::Letter(letter),
                body_text: text,
                bidegree: Word::letter_word(letter).bidegree(),
                expansion: NecklaceSum::single(v),
                scalar: true,
                single_trace: None,
                commutator_power: None,
                has_commutator: false,
            });
        }
        for (coeff, body_text, commutator_power) in defs {
            let coeff = crate::bracket::parse_rational(coeff).expect("table coefficient");
            let body = Expr::parse(body_text).expect("table expression");
            let expansion = body.to_ncpoly().trace().scale(&coeff);
            let bidegree = expansion.bidegree().expect("homogeneous generator");
            let single_trace = match expansion.sorted().as_slice() {
                [(v, c)] if c.is_one() => Some(*v),
                _ => None,
            };
            gens.push(Generator {
                index: gens.len() + 1,
                coeff,
                body,
                body_text,
                bidegree,
                expansion,
                scalar: false,
                single_trace,
                commutator_power,
                has_commutator: body_text.contains('['),
            });
        }
        let mut single = FxHashMap::default();
        let mut support = BTreeSet::new();
        for g in gens.iter().filter(|g| !g.scalar) {
            if let Some(v) = g.single_trace {
                single.insert(v, g.index);
            }
            support.extend(g.expansion.iter().map(|(v, _)| *v));
        }
        GeneratorSet {
            n,
            gens,
            single,
            support,
            swap: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of generators including `a1`, `a2`.
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn get(&self, i: usize) -> &Generator {
        &self.gens[i - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Generator> {
        self.gens.iter()
    }

    pub fn bidegree(&self, i: usize) -> Bidegree {
        self.gens[i - 1].bidegree
    }

    /// Indices of the generators in the traceless letters, `3..=len`.
    pub fn traceless_indices(&self) -> Vec<usize> {
        (3..=self.len()).collect()
    }

    pub fn traceless_degrees(&self) -> Vec<u32> {
        self.traceless_indices()
            .iter()
            .map(|&i| self.bidegree(i).total())
            .collect()
    }

    pub fn by_bidegree(&self, b: Bidegree) -> Vec<usize> {
        self.traceless_indices()
            .into_iter()
            .filter(|&i| self.bidegree(i) == b)
            .collect()
    }

    /// The generator that is exactly `Tr(v)`, if any.
    pub fn single_trace_index(&self, v: Necklace) -> Option<usize> {
        self.single.get(&v).copied()
    }

    /// Every necklace appearing in some generator expansion.
    pub fn support(&self) -> &BTreeSet<Necklace> {
        &self.support
    }

    pub fn in_support(&self, v: Necklace) -> bool {
        self.support.contains(&v)
    }

    pub fn expand_generator(&self, i: usize) -> &NecklaceSum {
        &self.gens[i - 1].expansion
    }

    /// `Tr([A,B]^m)` when it is a multiple of one generator.
    pub fn commutator_trace(&self, m: u32) -> Option<GenPoly> {
        self.gens
            .iter()
            .find(|g| g.commutator_power == Some(m))
            .map(|g| GenPoly::var(g.index).scale(&(Q::one() / &g.coeff)))
    }

    /// Image of every generator under `A ↔ B`, indexed by generator
    /// (slot 0 unused).
    pub fn swap_images(&self) -> Result<&[GenPoly]> {
        self.swap
            .get_or_init(|| self.compute_swap())
            .as_deref()
            .map_err(|&i| Error::SwapCoverage(i))
    }

    fn compute_swap(&self) -> std::result::Result<Vec<GenPoly>, usize> {
        let mut images = vec![GenPoly::zero(); self.len() + 1];
        images[1] = GenPoly::var(2);
        images[2] = GenPoly::var(1);
        for g in self.gens.iter().filter(|g| !g.scalar) {
            let target = g.expansion.swap_letters();
            let cands = self.by_bidegree(g.bidegree.swap());
            let mut cols: BTreeSet<Necklace> = target.iter().map(|(v, _)| *v).collect();
            for &c in &cands {
                cols.extend(self.get(c).expansion.iter().map(|(v, _)| *v));
            }
            let rows: Vec<Vec<Q>> = cols
                .iter()
                .map(|v| cands.iter().map(|&c| self.get(c).expansion.get(v)).collect())
                .collect();
            let rhs: Vec<GenPoly> = cols.iter().map(|v| GenPoly::constant(target.get(v))).collect();
            match linear_solve(&rows, &rhs) {
                Solution::Unique(xs) => {
                    let mut img = GenPoly::zero();
                    for (&c, x) in cands.iter().zip(xs) {
                        img.add_assign_scaled(&GenPoly::var(c), &x.constant_term());
                    }
                    images[g.index] = img;
                }
                _ => return Err(g.index),
            }
        }
        Ok(images)
    }

    /// `A ↔ B` applied to a generator polynomial.
    pub fn swap_involution(&self, p: &GenPoly) -> Result<GenPoly> {
        Ok(p.substitute(self.swap_images()?))
    }
}

/// Convenience: `{ generator index ↦ coefficient }` for a linear form.
pub fn linear_coefficients(p: &GenPoly) -> Vec<(usize, Q)> {
    let mut out: Vec<(usize, Q)> = p
        .terms()
        .filter_map(|(m, c)| {
            let vars: Vec<_> = m.vars().collect();
            match vars.as_slice() {
                [(i, 1)] => Some((*i, c.clone())),
                _ => None,
            }
        })
        .collect();
    out.sort_by_key(|(i, _)| *i);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qi;

    fn nk(s: &str) -> Necklace {
        Necklace::parse(s).unwrap()
    }

    #[test]
    fn table_shapes() {
        let g2 = generator_set(2).unwrap();
        assert_eq!(g2.len(), 5);
        let d2: Vec<u32> = g2.iter().map(|g| g.bidegree.total()).collect();
        assert_eq!(d2, [1, 1, 2, 2, 2]);
        let g3 = generator_set(3).unwrap();
        assert_eq!(g3.len(), 11);
        assert_eq!(g3.get(10).bidegree, Bidegree::new(2, 2));
        assert_eq!(g3.get(11).bidegree, Bidegree::new(3, 3));
        let g4 = generator_set(4).unwrap();
        assert_eq!(g4.len(), 32);
        let mut hist = [0usize; 11];
        for g in g4.iter() {
            hist[g.bidegree.total() as usize] += 1;
        }
        assert_eq!(hist, [0, 2, 3, 4, 6, 2, 4, 2, 4, 4, 1]);
        assert_eq!(g4.get(15).bidegree, Bidegree::new(2, 2));
        assert!(generator_set(5).is_err());
    }

    #[test]
    fn expansions() {
        let g = generator_set(4).unwrap();
        let a16 = g.expand_generator(16);
        assert_eq!(a16.get(&nk("A^3B^2")), qi(-1));
        assert_eq!(a16.get(&nk("A^2BAB")), qi(1));
        assert_eq!(a16.len(), 2);
        let a15 = g.expand_generator(15);
        assert_eq!(a15.get(&nk("ABAB")), qi(1));
        assert_eq!(a15.get(&nk("A^2B^2")), qi(-1));
        assert_eq!(g.get(7).single_trace, Some(nk("A^2B")));
        assert_eq!(g.get(16).single_trace, None);
    }

    #[test]
    fn support() {
        let g = generator_set(4).unwrap();
        assert!(g.in_support(nk("ABAB")));
        assert!(g.in_support(nk("A^2B")));
        assert!(!g.in_support(nk("A^4B")));
        assert_eq!(g.single_trace_index(nk("A^4")), Some(10));
    }

    #[test]
    fn swap_table() {
        let g = generator_set(4).unwrap();
        let img = g.swap_images().unwrap();
        let show = |i: usize| {
            let order = crate::ring::poly::MonomialOrder::new(Default::default(), &g);
            img[i].render(&order)
        };
        assert_eq!(show(16), "a17");
        assert_eq!(show(21), "-a21");
        assert_eq!(show(4), "a4");
        assert_eq!(show(3), "a5");
        assert_eq!(show(15), "a15");
        for i in 1..=32 {
            let twice = img[i].substitute(img);
            assert_eq!(twice, GenPoly::var(i), "a{i}");
        }
        let g3 = generator_set(3).unwrap();
        let order = crate::ring::poly::MonomialOrder::new(Default::default(), &g3);
        assert_eq!(g3.swap_images().unwrap()[11].render(&order), "-a11");
    }
}
