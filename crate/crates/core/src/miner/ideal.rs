//! The ideal of relations among the traceless generators, and its graded
//! pieces as exact row-reduced spans.

use std::fmt;

use num_traits::Zero;
use rustc_hash::FxHashMap;

use crate::necklace::{Bidegree, Necklace};
use crate::ring::{graded_basis, Echelon, GenPoly, GeneratorSet, Monomial, MonomialOrder};
use crate::Q;

/// Which equation produced a relation or closed a deficit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    /// `{a_seed, ρ}` for the relation with this index.
    Propagation { seed: usize, relation: usize },
    /// The commutator-power equation at `(m, m)`.
    Special(u32),
    /// The definition of a generator with several necklace terms.
    Generator(usize),
    Pair(Necklace, Necklace),
    /// A pair outside the breaking-pair conditions, used as a fallback.
    Auxiliary(Necklace, Necklace),
    /// `A ↔ B` image of the relation with this index.
    Mirror(usize),
    /// Read from a relation file.
    File,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Propagation { seed, relation } => write!(f, "propagate(a{seed}, #{relation})"),
            Source::Special(m) => write!(f, "special({m})"),
            Source::Generator(i) => write!(f, "generator(a{i})"),
            Source::Pair(a, b) => write!(f, "pair({a}, {b})"),
            Source::Auxiliary(a, b) => write!(f, "aux({a}, {b})"),
            Source::Mirror(k) => write!(f, "mirror(#{k})"),
            Source::File => f.write_str("file"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub bidegree: Bidegree,
    /// Primitive integer form with positive leading coefficient.
    pub poly: GenPoly,
    pub source: Source,
}

/// A list of relations, each independent of the ideal generated by the
/// ones before it.
#[derive(Clone, Debug, Default)]
pub struct RelationIdeal {
    relations: Vec<Relation>,
}

impl RelationIdeal {
    pub fn new() -> Self {
        RelationIdeal::default()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn get(&self, k: usize) -> &Relation {
        &self.relations[k]
    }

    pub fn push(&mut self, r: Relation) -> usize {
        self.relations.push(r);
        self.relations.len() - 1
    }

    /// Indices of the relations in bidegree `b`.
    pub fn in_bidegree(&self, b: Bidegree) -> Vec<usize> {
        (0..self.relations.len())
            .filter(|&k| self.relations[k].bidegree == b)
            .collect()
    }

    pub fn count_in_degree(&self, d: u32) -> usize {
        self.relations.iter().filter(|r| r.bidegree.total() == d).count()
    }

    /// The span of `{m·ρ}` in bidegree `b`. Relations of bidegree `b`
    /// itself are included only when `include_own` is set.
    pub fn piece(&self, b: Bidegree, gens: &GeneratorSet, order: &MonomialOrder, include_own: bool) -> IdealPiece {
        let mut piece = IdealPiece::new(b, gens, order);
        for rel in &self.relations {
            let Some(rest) = b.checked_sub(rel.bidegree) else {
                continue;
            };
            if rest == Bidegree::default() && !include_own {
                continue;
            }
            for m in graded_basis(rest, &gens.traceless_indices(), gens, order) {
                let shifted = rel.poly.mul(&GenPoly::monomial(m, Q::from_integer(1.into())));
                piece.insert(&shifted);
            }
        }
        piece
    }

    /// Dimension of the ideal in total degree `d`.
    pub fn graded_dim(&self, d: u32, gens: &GeneratorSet, order: &MonomialOrder) -> usize {
        (0..=d)
            .map(|r| self.piece(Bidegree::new(r, d - r), gens, order, true).rank())
            .sum()
    }
}

/// One bigraded piece of an ideal, in reduced row echelon form over the
/// monomial basis of its bidegree (descending).
#[derive(Clone, Debug)]
pub struct IdealPiece {
    bidegree: Bidegree,
    basis: Vec<Monomial>,
    index: FxHashMap<Monomial, usize>,
    echelon: Echelon,
}

impl IdealPiece {
    pub fn new(b: Bidegree, gens: &GeneratorSet, order: &MonomialOrder) -> Self {
        let basis = graded_basis(b, &gens.traceless_indices(), gens, order);
        let index = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let echelon = Echelon::new(basis.len());
        IdealPiece {
            bidegree: b,
            basis,
            index,
            echelon,
        }
    }

    pub fn bidegree(&self) -> Bidegree {
        self.bidegree
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn echelon(&self) -> &Echelon {
        &self.echelon
    }

    /// Coordinates of `p` in the monomial basis. Panics on a monomial of
    /// the wrong bidegree, which would mean an inhomogeneous input.
    pub fn to_row(&self, p: &GenPoly) -> Vec<Q> {
        let mut row = vec![Q::zero(); self.basis.len()];
        for (m, c) in p.terms() {
            let i = *self
                .index
                .get(m)
                .unwrap_or_else(|| panic!("monomial {} outside bidegree {}", m.render(), self.bidegree));
            row[i] = c.clone();
        }
        row
    }

    pub fn from_row(&self, row: &[Q]) -> GenPoly {
        let mut p = GenPoly::zero();
        for (m, c) in self.basis.iter().zip(row) {
            if !c.is_zero() {
                p.add_term(*m, c.clone());
            }
        }
        p
    }

    /// Returns whether `p` enlarged the span.
    pub fn insert(&mut self, p: &GenPoly) -> bool {
        let row = self.to_row(p);
        matches!(self.echelon.insert(row).0, crate::ring::Insert::Pivot(_))
    }

    pub fn contains(&self, p: &GenPoly) -> bool {
        self.normal_form(p).is_zero()
    }

    /// The remainder of `p` modulo the span: zero in every pivot column.
    pub fn normal_form(&self, p: &GenPoly) -> GenPoly {
        if self.echelon.rank() == 0 || p.is_zero() {
            return p.clone();
        }
        let mut row = self.to_row(p);
        self.echelon.reduce(&mut row);
        self.from_row(&row)
    }
}
