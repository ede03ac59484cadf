//! Relation mining: per-bidegree linear systems whose solutions extend the
//! expression table and whose inconsistencies are relations.
//!
//! Within a bidegree the unknowns are the necklace traces that are neither
//! generators nor reducible by Cayley–Hamilton. Equations come, in order,
//! from the commutator-power identity (diagonal bidegrees only), from
//! brackets of `a5`, `a6` with known relations, from generator definitions,
//! from breaking pairs and last from auxiliary pairs (see
//! [`auxiliary_pairs`]), which are reached only when the breaking pairs
//! leave an unknown free. Each is a row `[lhs | -rhs]` over the columns
//! `unknowns ++ monomials`, inserted into a reduced echelon form that
//! already holds the monomial multiples of earlier relations. A row whose
//! pivot falls among the monomials is a new relation.
//!
//! A bidegree is complete when every unknown has a pivot and the ideal
//! piece has the dimension of the kernel of the evaluation map on that
//! piece, measured by rank at random points mod a large prime.

pub mod equation;
pub mod ideal;
pub mod pairs;
pub mod relfile;

use std::sync::Arc;

use num_traits::Zero;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::hilbert;
use crate::necklace::{enumerate_necklaces, is_chn, Bidegree, Necklace};
use crate::numeric::{random_generator_values, rank, Fp};
use crate::par::{self, Exec};
use crate::reduce::Reducer;
use crate::ring::{generator_set, Echelon, ExpressionTable, GenPoly, GeneratorSet, Insert, MonomialOrder, OrderKind};
use crate::Q;

pub use equation::{Equation, EquationContext, GeneratorBrackets, Mixed};
pub use ideal::{IdealPiece, Relation, RelationIdeal, Source};
pub use pairs::{auxiliary_pairs, breaking_pairs, is_breaking_pair, BreakingPair};

/// Generators used to push relations into neighbouring bidegrees.
pub const PROPAGATION_SEEDS: [usize; 2] = [5, 6];

#[derive(Clone, Debug)]
pub struct MineConfig {
    /// Seeds the modular rank points; enumeration order never depends on it.
    pub seed: u64,
    pub order: OrderKind,
    /// Re-solve diagonal bidegrees without the commutator-power equation.
    /// Costs every remaining equation there; off by default.
    pub audit_special: bool,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig {
            seed: 1,
            order: OrderKind::Grevlex,
            audit_special: false,
        }
    }
}

/// Per-bidegree statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BidegreeLog {
    pub bidegree: Bidegree,
    pub necklaces: usize,
    pub unknowns: usize,
    pub monomials: usize,
    /// Equations inserted before the bidegree closed.
    pub equations: usize,
    pub rank: usize,
    /// Dimension of the kernel of the evaluation map on this piece.
    pub kernel_dim: usize,
    /// Dimension of the ideal piece coming from lower relations.
    pub inherited: usize,
    pub new_relations: usize,
    /// `kernel_dim - ideal dimension` when equations ran out.
    pub unfilled: usize,
    /// The last inserted equation.
    pub closed_by: Option<Source>,
    pub mirror_of: Option<Bidegree>,
    /// With [`MineConfig::audit_special`] on a diagonal bidegree: whether
    /// dropping the commutator-power row, with every other equation
    /// inserted, loses ideal dimension.
    pub special_essential: Option<bool>,
}

/// Per-degree Hilbert bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeLog {
    pub degree: u32,
    pub free: i128,
    pub series: i128,
    pub ideal_dim: usize,
    pub relations: usize,
}

impl DegreeLog {
    /// `free - series - ideal`: relations still missing at this degree.
    pub fn deficit(&self) -> i128 {
        self.free - self.series - self.ideal_dim as i128
    }
}

pub struct MineOutput {
    pub n: usize,
    pub max_degree: u32,
    pub config: MineConfig,
    pub table: ExpressionTable,
    pub ideal: RelationIdeal,
    pub log: Vec<BidegreeLog>,
    pub degrees: Vec<DegreeLog>,
}

impl MineOutput {
    /// `(degree, deficit)` for every degree left short of relations.
    pub fn unfilled(&self) -> Vec<(u32, i128)> {
        self.degrees
            .iter()
            .filter(|d| d.deficit() != 0)
            .map(|d| (d.degree, d.deficit()))
            .collect()
    }

    pub fn order(&self) -> MonomialOrder {
        let gens = generator_set(self.n).expect("size checked at mining time");
        MonomialOrder::new(self.config.order, &gens)
    }
}

enum EqSpec {
    Special(u32),
    Propagation(usize, usize),
    Generator(usize),
    Pair(BreakingPair),
    Auxiliary(BreakingPair),
}

pub struct Miner {
    gens: Arc<GeneratorSet>,
    order: MonomialOrder,
    config: MineConfig,
    table: ExpressionTable,
    ideal: RelationIdeal,
    pieces: FxHashMap<Bidegree, IdealPiece>,
    finished: FxHashSet<Bidegree>,
    brackets: GeneratorBrackets,
    points: Vec<Vec<Fp>>,
    log: Vec<BidegreeLog>,
    degrees: Vec<DegreeLog>,
    exec: Exec,
}

impl Miner {
    pub fn new(n: usize, config: MineConfig) -> Result<Self> {
        let gens = generator_set(n)?;
        let order = MonomialOrder::new(config.order, &gens);
        // traces of single traceless letters vanish, so degree 1 is done
        let mut table = ExpressionTable::new(n);
        table.set_frontier(1);
        Ok(Miner {
            table,
            gens,
            order,
            config,
            ideal: RelationIdeal::new(),
            pieces: FxHashMap::default(),
            finished: FxHashSet::default(),
            brackets: GeneratorBrackets::new(),
            points: Vec::new(),
            log: Vec::new(),
            degrees: Vec::new(),
            exec: Exec::current(),
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn table(&self) -> &ExpressionTable {
        &self.table
    }

    pub fn ideal(&self) -> &RelationIdeal {
        &self.ideal
    }

    pub fn log(&self) -> &[BidegreeLog] {
        &self.log
    }

    pub fn degrees(&self) -> &[DegreeLog] {
        &self.degrees
    }

    pub fn frontier(&self) -> u32 {
        self.table.frontier()
    }

    /// Process every bidegree of total degree `d`.
    pub fn run_degree(&mut self, d: u32) -> Result<DegreeLog> {
        assert_eq!(d, self.frontier() + 1, "degrees are processed in order");
        for r in (d.div_ceil(2)..=d).rev() {
            self.process_bidegree(Bidegree::new(r, d - r))?;
        }
        self.table.set_frontier(d);
        let free = hilbert::free_ring_series(&self.gens.traceless_degrees()).coefficient(d as usize);
        let series = hilbert::traceless_series(self.gens.n()).coefficient(d as usize);
        let ideal_dim = (0..=d)
            .map(|r| self.pieces.get(&Bidegree::new(r, d - r)).map_or(0, |p| p.rank()))
            .sum();
        let entry = DegreeLog {
            degree: d,
            free,
            series,
            ideal_dim,
            relations: self.ideal.count_in_degree(d),
        };
        self.degrees.push(entry.clone());
        Ok(entry)
    }

    /// Dimension of the kernel of evaluation on the monomials of `b`.
    pub fn kernel_dim(&mut self, b: Bidegree) -> usize {
        use crate::numeric::Scalar;
        let basis = crate::ring::graded_basis(b, &self.gens.traceless_indices(), &self.gens, &self.order);
        // a few spare points make an unlucky rank drop negligible
        let need = basis.len() + 8;
        if self.points.len() < need {
            self.points = random_generator_values(&self.gens, need.max(2 * self.points.len()), self.config.seed);
        }
        let rows: Vec<Vec<Fp>> = self.points[..need]
            .iter()
            .map(|vals| {
                basis
                    .iter()
                    .map(|m| {
                        m.vars().fold(Fp::one(), |acc, (i, e)| {
                            (0..e).fold(acc, |a, _| a.mul(&vals[i]))
                        })
                    })
                    .collect()
            })
            .collect();
        basis.len() - rank(rows)
    }

    fn equation_specs(&self, b: Bidegree) -> Vec<EqSpec> {
        let mut specs = Vec::new();
        if b.r == b.s && b.r >= 2 {
            specs.push(EqSpec::Special(b.r));
        }
        for seed in PROPAGATION_SEEDS.into_iter().filter(|&s| s <= self.gens.len()) {
            let sb = self.gens.bidegree(seed);
            // {a_seed, ρ} has bidegree b(ρ) + b(seed) - (1,1)
            let Some(src) = (b + Bidegree::new(1, 1)).checked_sub(sb) else {
                continue;
            };
            for k in self.ideal.in_bidegree(src) {
                specs.push(EqSpec::Propagation(seed, k));
            }
        }
        for i in self.gens.by_bidegree(b) {
            if self.gens.get(i).single_trace.is_none() {
                specs.push(EqSpec::Generator(i));
            }
        }
        specs.extend(breaking_pairs(b, &self.gens).into_iter().map(EqSpec::Pair));
        specs.extend(auxiliary_pairs(b, &self.gens).into_iter().map(EqSpec::Auxiliary));
        specs
    }

    /// Solve one bidegree, record its relations and table entries, and
    /// fill the mirror bidegree by swapping letters.
    pub fn process_bidegree(&mut self, b: Bidegree) -> Result<BidegreeLog> {
        let d = b.total();
        assert!(d > self.frontier(), "bidegree {b} already processed");
        assert!(d <= self.frontier() + 1, "lower degrees must be complete before {b}");
        let necklaces = enumerate_necklaces(b);
        let n = self.gens.n();
        let unknown_list: Vec<Necklace> = necklaces
            .iter()
            .copied()
            .filter(|&v| !is_chn(v, n) && self.gens.single_trace_index(v).is_none())
            .collect();
        let unknowns: FxHashSet<Necklace> = unknown_list.iter().copied().collect();
        let col: FxHashMap<Necklace, usize> = unknown_list.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let u = unknown_list.len();

        let kernel_dim = self.kernel_dim(b);
        let inherited_piece = self.ideal.piece(b, &self.gens, &self.order, false);
        let inherited = inherited_piece.rank();
        let m = inherited_piece.basis().len();
        let mut system = Echelon::new(u + m);
        for (_, row) in inherited_piece.echelon().rows() {
            let mut full = vec![Q::zero(); u];
            full.extend_from_slice(row);
            system.insert(full);
        }

        let specs = self.equation_specs(b);
        let mut new_relations: Vec<(GenPoly, Source)> = Vec::new();
        let mut equations = 0;
        let mut closed_by = None;
        let mut special_essential = None;
        let mut rows: Vec<Vec<Q>> = Vec::new();
        let to_row = |eq: &Equation| {
            let mut row = vec![Q::zero(); u];
            for (v, c) in &eq.lhs {
                row[col[v]] = c.clone();
            }
            row.extend(inherited_piece.to_row(&eq.rhs.neg()));
            row
        };
        let complete = |sys: &Echelon| sys.rank_in(0..u) == u && sys.rank_in(u..u + m) >= kernel_dim;
        {
            let reducer = Reducer::new(&self.gens, &self.table);
            let ctx = EquationContext {
                gens: &self.gens,
                reducer,
                target: b,
                unknowns: &unknowns,
                brackets: &self.brackets,
                pieces: &self.pieces,
                finished: &self.finished,
            };
            let batch = match self.exec {
                Exec::Sequential => 1,
                Exec::Parallel => 2 * par::available_jobs(),
            };
            let mut next = 0;
            while !complete(&system) && next < specs.len() {
                let end = (next + batch).min(specs.len());
                let computed = par::map(self.exec, &specs[next..end], |spec| self.equation(&ctx, spec));
                next = end;
                for eq in computed {
                    let eq = eq?;
                    equations += 1;
                    let row = to_row(&eq);
                    if self.config.audit_special {
                        rows.push(row.clone());
                    }
                    let (outcome, reduced) = system.insert(row);
                    if let Insert::Pivot(p) = outcome {
                        if p >= u {
                            debug_assert!(reduced[..u].iter().all(|c| c.is_zero()));
                            let rel = inherited_piece.from_row(&reduced[u..]).primitive(&self.order);
                            new_relations.push((rel, eq.source.clone()));
                        }
                    }
                    closed_by = Some(eq.source);
                    if complete(&system) {
                        break;
                    }
                }
            }
            if self.config.audit_special && matches!(specs.first(), Some(EqSpec::Special(_))) && !rows.is_empty() {
                let mut without = Echelon::new(u + m);
                for (_, row) in inherited_piece.echelon().rows() {
                    let mut full = vec![Q::zero(); u];
                    full.extend_from_slice(row);
                    without.insert(full);
                }
                for row in rows.drain(1..) {
                    without.insert(row);
                }
                let rest = par::map(self.exec, &specs[equations..], |spec| self.equation(&ctx, spec));
                for eq in rest {
                    without.insert(to_row(&eq?));
                }
                special_essential = Some(without.rank_in(u..u + m) < system.rank_in(u..u + m));
            }
        }
        let rank = system.rank_in(0..u);
        if rank < u {
            return Err(Error::RankDeficient {
                bidegree: b,
                rank,
                unknowns: u,
            });
        }
        let relation_ids: Vec<usize> = new_relations
            .into_iter()
            .map(|(poly, source)| {
                self.ideal.push(Relation {
                    bidegree: b,
                    poly,
                    source,
                })
            })
            .collect();
        let piece = self.ideal.piece(b, &self.gens, &self.order, true);
        let unfilled = kernel_dim.saturating_sub(piece.rank());

        // table entries: solved unknowns, then everything else normalized
        let mut entries: Vec<(Necklace, GenPoly)> = Vec::with_capacity(necklaces.len());
        {
            let reducer = Reducer::new(&self.gens, &self.table);
            for &v in &necklaces {
                let p = match col.get(&v) {
                    Some(&c) => {
                        let row = system.pivot_row(c).expect("full rank");
                        piece.from_row(&row[u..]).neg()
                    }
                    None => reducer.reduce(v)?,
                };
                entries.push((v, piece.normal_form(&p)));
            }
        }
        let mirror = (b.r != b.s).then(|| b.swap());
        let mirror_entries: Vec<(Necklace, GenPoly)> = if mirror.is_some() {
            entries
                .iter()
                .map(|(v, p)| Ok((v.swap_letters(), self.gens.swap_involution(p)?)))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        for (v, p) in entries {
            self.table.insert(v, p);
        }
        if piece.rank() > 0 {
            self.pieces.insert(b, piece);
        }
        self.finished.insert(b);

        let entry = BidegreeLog {
            bidegree: b,
            necklaces: necklaces.len(),
            unknowns: u,
            monomials: m,
            equations,
            rank,
            kernel_dim,
            inherited,
            new_relations: relation_ids.len(),
            unfilled,
            closed_by,
            mirror_of: None,
            special_essential,
        };
        self.log.push(entry.clone());

        if let Some(mb) = mirror {
            let mut swapped = 0;
            for &k in &relation_ids {
                let poly = self.gens.swap_involution(&self.ideal.get(k).poly)?.primitive(&self.order);
                self.ideal.push(Relation {
                    bidegree: mb,
                    poly,
                    source: Source::Mirror(k),
                });
                swapped += 1;
            }
            let mpiece = self.ideal.piece(mb, &self.gens, &self.order, true);
            for (v, p) in mirror_entries {
                self.table.insert(v, mpiece.normal_form(&p));
            }
            let mrank = mpiece.rank();
            if mrank > 0 {
                self.pieces.insert(mb, mpiece);
            }
            self.finished.insert(mb);
            self.log.push(BidegreeLog {
                bidegree: mb,
                necklaces: entry.necklaces,
                unknowns: entry.unknowns,
                monomials: entry.monomials,
                equations: 0,
                rank: entry.rank,
                kernel_dim: entry.kernel_dim,
                inherited: entry.inherited,
                new_relations: swapped,
                unfilled: entry.kernel_dim.saturating_sub(mrank),
                closed_by: None,
                mirror_of: Some(b),
                special_essential: None,
            });
        }
        Ok(entry)
    }

    fn equation(&self, ctx: &EquationContext<'_>, spec: &EqSpec) -> Result<Equation> {
        match spec {
            EqSpec::Special(m) => ctx.special_equation(*m),
            EqSpec::Propagation(seed, k) => ctx.propagation_equation(*seed, &self.ideal.get(*k).poly, *k),
            EqSpec::Generator(i) => ctx.generator_equation(*i),
            EqSpec::Pair(p) => ctx.pair_equation(p),
            EqSpec::Auxiliary(p) => ctx.pair_equation(p).map(|mut eq| {
                eq.source = Source::Auxiliary(p.first, p.second);
                eq
            }),
        }
    }

    /// Run `f` with an equation context for `b`, whose lower degrees must
    /// be complete. Used to inspect single equations.
    pub fn with_context<R>(&self, b: Bidegree, f: impl FnOnce(&EquationContext<'_>) -> R) -> R {
        let n = self.gens.n();
        let unknowns: FxHashSet<Necklace> = enumerate_necklaces(b)
            .into_iter()
            .filter(|&v| !is_chn(v, n) && self.gens.single_trace_index(v).is_none())
            .collect();
        let ctx = EquationContext {
            gens: &self.gens,
            reducer: Reducer::new(&self.gens, &self.table),
            target: b,
            unknowns: &unknowns,
            brackets: &self.brackets,
            pieces: &self.pieces,
            finished: &self.finished,
        };
        f(&ctx)
    }

    /// `{a_seed, ρ}` for every relation in the source bidegree of `b`,
    /// reduced to polynomials. Needs every bidegree involved finished.
    pub fn propagate(&self, seed: usize, b: Bidegree) -> Result<Vec<GenPoly>> {
        if seed > self.gens.len() {
            return Ok(Vec::new());
        }
        let sb = self.gens.bidegree(seed);
        let Some(src) = (b + Bidegree::new(1, 1)).checked_sub(sb) else {
            return Ok(Vec::new());
        };
        self.with_context(b, |ctx| {
            self.ideal
                .in_bidegree(src)
                .into_iter()
                .map(|k| {
                    let m = ctx.poly_bracket(&GenPoly::var(seed), &self.ideal.get(k).poly)?;
                    if !m.is_known() {
                        return Err(Error::Mismatch(format!("propagation into {b} left unknown traces")));
                    }
                    Ok(m.known)
                })
                .collect()
        })
    }

    pub fn finish(self, max_degree: u32) -> MineOutput {
        MineOutput {
            n: self.gens.n(),
            max_degree,
            config: self.config,
            table: self.table,
            ideal: self.ideal,
            log: self.log,
            degrees: self.degrees,
        }
    }
}

/// Mine relations and table entries up to `max_degree`. Progress events
/// go to `on_degree` as each degree completes. An unfilled deficit is
/// not an error: it shows up in [`MineOutput::unfilled`].
pub fn mine_with(
    n: usize,
    max_degree: u32,
    config: MineConfig,
    mut on_degree: impl FnMut(&DegreeLog, &[BidegreeLog]),
) -> Result<MineOutput> {
    let mut miner = Miner::new(n, config)?;
    for d in 2..=max_degree {
        let before = miner.log.len();
        let entry = miner.run_degree(d)?;
        on_degree(&entry, &miner.log[before..]);
    }
    Ok(miner.finish(max_degree))
}

pub fn mine(n: usize, max_degree: u32, config: MineConfig) -> Result<MineOutput> {
    mine_with(n, max_degree, config, |_, _| {})
}

/// Dimension of the ideal in degree `d`.
pub fn ideal_graded_dim(ideal: &RelationIdeal, d: u32, gens: &GeneratorSet, order: &MonomialOrder) -> usize {
    ideal.graded_dim(d, gens, order)
}
