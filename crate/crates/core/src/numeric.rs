//! Exact evaluation at concrete matrix pairs: the independent oracle every
//! symbolic result is checked against.
//!
//! Two exact fields are supported: the rationals, used for every verdict,
//! and `Z/p` with `p = 2^61 - 1`, used for fast rank estimates. Sampling is
//! deterministic: trial `k` of a run with master seed `s` always draws the
//! same pair, whatever the thread count.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bracket::{Interpretation, NecklaceSum, TracePolynomial};
use crate::error::{Error, Result};
use crate::necklace::{Letter, Necklace, Word};
use crate::par::{self, Exec};
use crate::ring::{GenPoly, GeneratorSet};
use crate::{qi, Q};

/// The exact fields the oracle computes in.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// `None` when the denominator vanishes in this field.
    fn from_q(q: &Q) -> Option<Self>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
}

impl Scalar for Q {
    fn zero() -> Self {
        <Q as Zero>::zero()
    }
    fn one() -> Self {
        <Q as One>::one()
    }
    fn from_i64(v: i64) -> Self {
        qi(v)
    }
    fn from_q(q: &Q) -> Option<Self> {
        Some(q.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// The Mersenne prime `2^61 - 1`.
pub const P61: u64 = (1 << 61) - 1;

/// An element of `Z/P61`, always fully reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fp(u64);

impl Fp {
    pub fn new(v: u64) -> Fp {
        Fp(v % P61)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    fn from_bigint(b: &BigInt) -> Fp {
        let m = b.mod_floor(&BigInt::from(P61));
        Fp(m.to_u64().expect("reduced below 2^61"))
    }

    pub fn random(rng: &mut impl Rng) -> Fp {
        Fp(rng.gen_range(0..P61))
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Scalar for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Fp::new(v as u64)
        } else {
            Fp::new(v.unsigned_abs()).neg()
        }
    }
    fn from_q(q: &Q) -> Option<Self> {
        let d = Fp::from_bigint(q.denom());
        d.inv().map(|d| Fp::from_bigint(q.numer()).mul(&d))
    }
    fn add(&self, o: &Self) -> Self {
        let s = self.0 + o.0;
        Fp(if s >= P61 { s - P61 } else { s })
    }
    fn sub(&self, o: &Self) -> Self {
        Fp(if self.0 >= o.0 { self.0 - o.0 } else { self.0 + P61 - o.0 })
    }
    fn mul(&self, o: &Self) -> Self {
        let w = self.0 as u128 * o.0 as u128;
        let lo = (w as u64) & P61;
        let hi = (w >> 61) as u64;
        Fp(lo).add(&Fp(hi))
    }
    fn neg(&self) -> Self {
        Fp(if self.0 == 0 { 0 } else { P61 - self.0 })
    }
    fn inv(&self) -> Option<Self> {
        (self.0 != 0).then(|| self.pow(P61 - 2))
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

/// A dense square matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    n: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zero(n: usize) -> Self {
        Matrix {
            n,
            data: vec![F::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::scalar(n, F::one())
    }

    pub fn scalar(n: usize, c: F) -> Self {
        let mut m = Matrix::zero(n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "square matrix expected");
        Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.n + j] = v;
    }

    pub fn add(&self, o: &Self) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Matrix::<F>::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = a.mul(&o.data[k * n + j]);
                    out.data[i * n + j] = out.data[i * n + j].add(&t);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> F {
        (0..self.n).fold(F::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    /// `Tr(self · o)` without forming the product.
    pub fn trace_product(&self, o: &Self) -> F {
        let n = self.n;
        let mut acc = F::zero();
        for i in 0..n {
            for k in 0..n {
                acc = acc.add(&self.data[i * n + k].mul(&o.data[k * n + i]));
            }
        }
        acc
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    /// `self - Tr(self)/n · I`.
    pub fn traceless_part(&self) -> Self {
        let c = self
            .trace()
            .mul(&F::from_i64(self.n as i64).inv().expect("n invertible"));
        self.sub(&Matrix::scalar(self.n, c))
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<F>> = self.data.chunks(self.n).map(|r| r.to_vec()).collect();
        rank(rows)
    }
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.data.chunks(self.n).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v:?}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for Matrix<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // BigRational's Debug is verbose; Display renders `p/q`
        f.write_str("[")?;
        for (i, row) in self.data.chunks(self.n).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        f.write_str("]")
    }
}

/// Rank by Gaussian elimination over an exact field.
pub fn rank<F: Scalar>(mut rows: Vec<Vec<F>>) -> usize {
    let width = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("nonzero pivot");
        let pivot: Vec<F> = rows[r].iter().map(|v| v.mul(&inv)).collect();
        for i in r + 1..rows.len() {
            let f = rows[i][col].clone();
            if f.is_zero() {
                continue;
            }
            for j in col..width {
                if !pivot[j].is_zero() {
                    rows[i][j] = rows[i][j].sub(&f.mul(&pivot[j]));
                }
            }
        }
        rows[r] = pivot;
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Where sample pairs come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    /// Independent uniform integer entries.
    Generic,
    /// `Y` a polynomial in `X`, so `[X,Y] = 0`.
    Commuting,
    /// Diagonal `X` and Cauchy-form `Y` with `[X,Y] + I` all ones.
    CalogeroMoser,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Generic => "generic",
            SamplerKind::Commuting => "commuting",
            SamplerKind::CalogeroMoser => "cm",
        }
    }

    fn salt(self) -> u64 {
        match self {
            SamplerKind::Generic => 0x9e37_79b9_7f4a_7c15,
            SamplerKind::Commuting => 0xc2b2_ae3d_27d4_eb4f,
            SamplerKind::CalogeroMoser => 0x1656_67b1_9e37_79f9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Entries are drawn from `[-bound, bound]`.
    pub bound: i64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { seed: 0, bound: 10 }
    }
}

impl SamplerConfig {
    pub fn with_seed(seed: u64) -> Self {
        SamplerConfig {
            seed,
            ..Default::default()
        }
    }

    /// The generator for trial `trial`; independent of scheduling.
    pub fn rng(&self, kind: SamplerKind, trial: u64) -> ChaCha8Rng {
        let mut z = self.seed ^ kind.salt() ^ trial.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        // splitmix64 finalizer
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
    }
}

/// A sample point with its provenance.
#[derive(Clone, PartialEq)]
pub struct RationalMatrixPair {
    pub x: Matrix<Q>,
    pub y: Matrix<Q>,
    pub kind: SamplerKind,
    pub seed: u64,
    pub trial: u64,
}

impl fmt::Debug for RationalMatrixPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} pair (seed {}, trial {}): X = {}, Y = {}",
            self.kind.name(),
            self.seed,
            self.trial,
            self.x,
            self.y
        )
    }
}

impl fmt::Display for RationalMatrixPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn random_matrix(n: usize, bound: i64, rng: &mut impl Rng) -> Matrix<Q> {
    let mut m = Matrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, qi(rng.gen_range(-bound..=bound)));
        }
    }
    m
}

const MAX_ATTEMPTS: usize = 1000;

/// Draw trial `trial` of the given sampler.
pub fn sample(kind: SamplerKind, n: usize, cfg: &SamplerConfig, trial: u64) -> Result<RationalMatrixPair> {
    let mut rng = cfg.rng(kind, trial);
    let bound = cfg.bound.max(1);
    let (x, y) = match kind {
        SamplerKind::Generic => (random_matrix(n, bound, &mut rng), random_matrix(n, bound, &mut rng)),
        SamplerKind::Commuting => {
            let x = random_matrix(n, bound, &mut rng);
            let mut y = Matrix::zero(n);
            let mut power = Matrix::identity(n);
            for _ in 0..n {
                y = y.add(&power.scale(&qi(rng.gen_range(-bound..=bound))));
                power = power.mul(&x);
            }
            (x, y)
        }
        SamplerKind::CalogeroMoser => {
            let mut xs: Vec<i64> = Vec::with_capacity(n);
            let mut attempts = 0;
            while xs.len() < n {
                attempts += 1;
                if attempts > MAX_ATTEMPTS {
                    return Err(Error::SamplingExhausted(MAX_ATTEMPTS));
                }
                // the range must hold n distinct values
                let v = rng.gen_range(-bound.max(n as i64)..=bound.max(n as i64));
                if !xs.contains(&v) {
                    xs.push(v);
                }
            }
            let mut x = Matrix::zero(n);
            let mut y = Matrix::zero(n);
            for i in 0..n {
                x.set(i, i, qi(xs[i]));
                for j in 0..n {
                    let v = if i == j {
                        qi(rng.gen_range(-bound..=bound))
                    } else {
                        Q::new(1.into(), (xs[i] - xs[j]).into())
                    };
                    y.set(i, j, v);
                }
            }
            (x, y)
        }
    };
    Ok(RationalMatrixPair {
        x,
        y,
        kind,
        seed: cfg.seed,
        trial,
    })
}

pub fn sample_generic(n: usize, cfg: &SamplerConfig, trial: u64) -> Result<RationalMatrixPair> {
    sample(SamplerKind::Generic, n, cfg, trial)
}

pub fn sample_commuting(n: usize, cfg: &SamplerConfig, trial: u64) -> Result<RationalMatrixPair> {
    sample(SamplerKind::Commuting, n, cfg, trial)
}

pub fn sample_cm(n: usize, cfg: &SamplerConfig, trial: u64) -> Result<RationalMatrixPair> {
    sample(SamplerKind::CalogeroMoser, n, cfg, trial)
}

/// A uniformly random pair over `Z/P61`.
pub fn random_fp_pair(n: usize, rng: &mut impl Rng) -> (Matrix<Fp>, Matrix<Fp>) {
    let mut gen = || {
        let mut m = Matrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, Fp::random(rng));
            }
        }
        m
    };
    let x = gen();
    let y = gen();
    (x, y)
}

/// Everything needed to evaluate symbolic objects at one point.
#[derive(Clone, Debug)]
pub struct Point<F> {
    n: usize,
    x: Matrix<F>,
    y: Matrix<F>,
    a: Matrix<F>,
    b: Matrix<F>,
}

impl<F: Scalar> Point<F> {
    pub fn new(x: Matrix<F>, y: Matrix<F>) -> Self {
        let a = x.traceless_part();
        let b = y.traceless_part();
        Point {
            n: x.size(),
            x,
            y,
            a,
            b,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn letter(&self, l: Letter, interp: Interpretation) -> &Matrix<F> {
        match (interp, l) {
            (Interpretation::Generic, Letter::First) => &self.x,
            (Interpretation::Generic, Letter::Second) => &self.y,
            (Interpretation::Traceless, Letter::First) => &self.a,
            (Interpretation::Traceless, Letter::Second) => &self.b,
        }
    }

    pub fn word_matrix(&self, w: Word, interp: Interpretation) -> Matrix<F> {
        let mut m = Matrix::identity(self.n);
        for l in w.letters() {
            m = m.mul(self.letter(l, interp));
        }
        m
    }

    pub fn trace_word(&self, w: Word, interp: Interpretation) -> F {
        if w.is_empty() {
            return F::from_i64(self.n as i64);
        }
        let head = w.slice(0, w.len() - 1);
        let last = self.letter(w.letter(w.len() - 1), interp);
        self.word_matrix(head, interp).trace_product(last)
    }

    pub fn eval_necklace(&self, v: Necklace, interp: Interpretation) -> F {
        self.trace_word(v.word(), interp)
    }

    pub fn eval_sum(&self, s: &NecklaceSum, interp: Interpretation) -> F {
        let mut acc = F::zero();
        for (v, c) in s.sorted() {
            let c = F::from_q(&c).expect("coefficient defined mod p");
            acc = acc.add(&c.mul(&self.eval_necklace(v, interp)));
        }
        acc
    }

    fn scalar_value(&self, k: usize) -> F {
        if k == 0 {
            self.x.trace()
        } else {
            self.y.trace()
        }
    }

    pub fn eval_trace_poly(&self, f: &TracePolynomial) -> F {
        let interp = f.interpretation();
        let mut acc = F::zero();
        for (m, c) in f.sorted() {
            let mut t = F::from_q(&c).expect("coefficient defined mod p");
            for k in 0..2 {
                for _ in 0..m.scalars()[k] {
                    t = t.mul(&self.scalar_value(k));
                }
            }
            for v in m.traces() {
                t = t.mul(&self.eval_necklace(*v, interp));
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Values of `a_1..a_len` (slot 0 unused), from the defining trace
    /// expressions in the traceless parts.
    pub fn generator_values(&self, gens: &GeneratorSet) -> Vec<F> {
        let mut out = vec![F::zero(); gens.len() + 1];
        out[1] = self.x.trace();
        out[2] = self.y.trace();
        let n = self.n;
        for g in gens.iter().filter(|g| !g.scalar) {
            let m = g.body.eval(
                &|l| self.letter(l, Interpretation::Traceless).clone(),
                &|c: &Q| Matrix::scalar(n, F::from_q(c).expect("coefficient defined mod p")),
                &|p: &Matrix<F>, q: &Matrix<F>, neg| if neg { p.sub(q) } else { p.add(q) },
                &|p: &Matrix<F>, q: &Matrix<F>| p.mul(q),
            );
            out[g.index] = F::from_q(&g.coeff).unwrap().mul(&m.trace());
        }
        out
    }

    /// Gradients `(∂/∂X, ∂/∂Y)` of `Tr(w)` as matrices `G` with
    /// `G_{ji} = ∂Tr(w)/∂X_{ij}`. In the traceless reading the gradient
    /// is projected onto traceless matrices.
    pub fn trace_gradient(&self, w: Word, interp: Interpretation) -> [Matrix<F>; 2] {
        let mut g = [Matrix::zero(self.n), Matrix::zero(self.n)];
        for i in 0..w.len() {
            let k = if w.letter(i) == Letter::First { 0 } else { 1 };
            g[k] = g[k].add(&self.word_matrix(w.remainder(i), interp));
        }
        if interp == Interpretation::Traceless {
            g = g.map(|m| m.traceless_part());
        }
        g
    }

    /// Gradient of a trace polynomial, by the product rule.
    pub fn poly_gradient(&self, f: &TracePolynomial) -> [Matrix<F>; 2] {
        let interp = f.interpretation();
        let n = self.n;
        let mut g = [Matrix::zero(n), Matrix::zero(n)];
        for (m, c) in f.sorted() {
            let c = F::from_q(&c).expect("coefficient defined mod p");
            // factors: scalar variables then traces, each with value and gradient
            let mut factors: Vec<(F, [Matrix<F>; 2])> = Vec::new();
            for k in 0..2 {
                for _ in 0..m.scalars()[k] {
                    let mut grad = [Matrix::zero(n), Matrix::zero(n)];
                    grad[k] = Matrix::identity(n);
                    factors.push((self.scalar_value(k), grad));
                }
            }
            for v in m.traces() {
                factors.push((
                    self.eval_necklace(*v, interp),
                    self.trace_gradient(v.word(), interp),
                ));
            }
            for i in 0..factors.len() {
                let mut cof = c.clone();
                for (j, (val, _)) in factors.iter().enumerate() {
                    if j != i {
                        cof = cof.mul(val);
                    }
                }
                if cof.is_zero() {
                    continue;
                }
                for k in 0..2 {
                    g[k] = g[k].add(&factors[i].1[k].scale(&cof));
                }
            }
        }
        g
    }

    /// Gradient of a generator polynomial by the chain rule through the
    /// generator expansions.
    pub fn genpoly_gradient(&self, p: &GenPoly, gens: &GeneratorSet) -> [Matrix<F>; 2] {
        let values = self.generator_values(gens);
        let n = self.n;
        let mut g = [Matrix::zero(n), Matrix::zero(n)];
        for i in p.variables() {
            let d = eval_genpoly(&p.derivative(i), &values);
            if d.is_zero() {
                continue;
            }
            let gi = self.generator_gradient(gens, i);
            for k in 0..2 {
                g[k] = g[k].add(&gi[k].scale(&d));
            }
        }
        g
    }

    fn generator_gradient(&self, gens: &GeneratorSet, i: usize) -> [Matrix<F>; 2] {
        let n = self.n;
        let gen = gens.get(i);
        if gen.scalar {
            let mut g = [Matrix::zero(n), Matrix::zero(n)];
            g[i - 1] = Matrix::identity(n);
            return g;
        }
        let f = gen.expansion.trace(Interpretation::Traceless, n);
        self.poly_gradient(&f)
    }
}

/// Evaluate a generator polynomial at generator values (slot `i` = `a_i`).
pub fn eval_genpoly<F: Scalar>(p: &GenPoly, values: &[F]) -> F {
    let mut acc = F::zero();
    for (m, c) in p.terms() {
        let mut t = F::from_q(c).expect("coefficient defined mod p");
        for (i, e) in m.vars() {
            for _ in 0..e {
                t = t.mul(&values[i]);
            }
        }
        acc = acc.add(&t);
    }
    acc
}

/// The symplectic bracket of two gradients:
/// `Tr(G^X_f G^Y_g - G^Y_f G^X_g)`.
pub fn bracket_of_gradients<F: Scalar>(gf: &[Matrix<F>; 2], gg: &[Matrix<F>; 2]) -> F {
    gf[0].trace_product(&gg[1]).sub(&gf[1].trace_product(&gg[0]))
}

/// `{f, g}` at a point, by matrix calculus.
pub fn numeric_poisson<F: Scalar>(f: &TracePolynomial, g: &TracePolynomial, pt: &Point<F>) -> F {
    bracket_of_gradients(&pt.poly_gradient(f), &pt.poly_gradient(g))
}

/// `{p, q}` for generator polynomials at a point.
pub fn numeric_poisson_genpoly<F: Scalar>(
    p: &GenPoly,
    q: &GenPoly,
    gens: &GeneratorSet,
    pt: &Point<F>,
) -> F {
    bracket_of_gradients(&pt.genpoly_gradient(p, gens), &pt.genpoly_gradient(q, gens))
}

impl RationalMatrixPair {
    pub fn point(&self) -> Point<Q> {
        Point::new(self.x.clone(), self.y.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass { trials: usize },
    Fail { witness: Box<RationalMatrixPair>, value: Q },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

/// Evaluate `f` at `trials` sampled pairs; pass iff every value is 0.
/// The first failing trial (in trial order) is the witness.
pub fn verify_identity<E>(
    f: E,
    kind: SamplerKind,
    n: usize,
    cfg: &SamplerConfig,
    trials: usize,
) -> Result<Verdict>
where
    E: Fn(&Point<Q>) -> Q + Sync + Send,
{
    let results = par::map_range(Exec::current(), trials, |t| -> Result<Option<(RationalMatrixPair, Q)>> {
        let pair = sample(kind, n, cfg, t as u64)?;
        let v = f(&pair.point());
        Ok((!Zero::is_zero(&v)).then_some((pair, v)))
    });
    for r in results {
        if let Some((pair, value)) = r? {
            return Ok(Verdict::Fail {
                witness: Box::new(pair),
                value,
            });
        }
    }
    Ok(Verdict::Pass { trials })
}

/// Rank of the evaluation matrix `[m_j(pt_i)]` of `monomials` at fresh
/// random points mod P61. Equals the dimension of their span as functions
/// with high probability; never exceeds it.
pub fn modular_span_dim(monomial_values: &[Vec<Fp>]) -> usize {
    rank(monomial_values.to_vec())
}

/// Generator values at `count` random points mod P61 (deterministic in
/// `seed`).
pub fn random_generator_values(gens: &GeneratorSet, count: usize, seed: u64) -> Vec<Vec<Fp>> {
    let cfg = SamplerConfig::with_seed(seed);
    par::map_range(Exec::current(), count, |t| {
        let mut rng = cfg.rng(SamplerKind::Generic, 1 << 40 | t as u64);
        let (x, y) = random_fp_pair(gens.n(), &mut rng);
        Point::new(x, y).generator_values(gens)
    })
}

/// Render a rational that is known to be an integer as `i64` if it fits.
pub fn as_small_integer(q: &Q) -> Option<i64> {
    q.is_integer().then(|| q.numer().to_i64()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::{kontsevich_bracket, traceless_bracket};
    use crate::necklace::parse_word;
    use crate::ring::generator_set;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap().0
    }

    #[test]
    fn field_arithmetic() {
        let a = Fp::from_i64(-3);
        assert_eq!(a.add(&Fp::from_i64(3)), Fp(0));
        assert_eq!(a.mul(&a.inv().unwrap()), Fp(1));
        assert_eq!(Fp::from_q(&Q::new(1.into(), 2.into())).unwrap().mul(&Fp(2)), Fp(1));
        assert_eq!(Fp(P61 - 1).mul(&Fp(P61 - 1)), Fp(1));
    }

    #[test]
    fn nilpotent_pair_trace() {
        let x = Matrix::from_rows(vec![vec![qi(0), qi(1)], vec![qi(0), qi(0)]]);
        let y = Matrix::from_rows(vec![vec![qi(0), qi(0)], vec![qi(1), qi(0)]]);
        let pt = Point::new(x, y);
        let v = Necklace::parse("XY").unwrap();
        assert_eq!(pt.eval_necklace(v, Interpretation::Generic), qi(1));
        assert_eq!(pt.eval_necklace(Necklace::parse("A").unwrap(), Interpretation::Traceless), qi(0));
    }

    #[test]
    fn samplers() {
        let cfg = SamplerConfig::with_seed(7);
        let c = sample_commuting(4, &cfg, 0).unwrap();
        assert_eq!(c.x.commutator(&c.y), Matrix::zero(4));
        let cm = sample_cm(4, &cfg, 3).unwrap();
        let e = cm.x.commutator(&cm.y).add(&Matrix::identity(4));
        assert_eq!(e.rank(), 1);
        assert_eq!(sample_generic(3, &cfg, 5).unwrap(), sample_generic(3, &cfg, 5).unwrap());
        assert_ne!(sample_generic(3, &cfg, 5).unwrap(), sample_generic(3, &cfg, 6).unwrap());
    }

    #[test]
    fn cm_commutator_square() {
        let gens = generator_set(4).unwrap();
        let pair = sample_cm(4, &SamplerConfig::with_seed(1), 0).unwrap();
        let vals = pair.point().generator_values(&gens);
        assert_eq!(vals[15], qi(6));
    }

    #[test]
    fn numeric_bracket_matches_symbolic() {
        let cfg = SamplerConfig::with_seed(11);
        for t in 0..3 {
            let pt = sample_generic(4, &cfg, t).unwrap().point();
            let tl = Interpretation::Traceless;
            let f = TracePolynomial::trace(crate::necklace::canonicalize(w("B^2")), tl, 4);
            let g = TracePolynomial::trace(crate::necklace::canonicalize(w("A^4B")), tl, 4);
            let sym = traceless_bracket(w("B^2"), w("A^4B"), 4);
            assert_eq!(numeric_poisson(&f, &g, &pt), pt.eval_trace_poly(&sym));
            let gi = Interpretation::Generic;
            let f = TracePolynomial::trace(crate::necklace::canonicalize(w("XY^2")), gi, 4);
            let g = TracePolynomial::trace(crate::necklace::canonicalize(w("X^2YX")), gi, 4);
            let sym = kontsevich_bracket(w("XY^2"), w("X^2YX")).trace(gi, 4);
            assert_eq!(numeric_poisson(&f, &g, &pt), pt.eval_trace_poly(&sym));
        }
    }

    #[test]
    fn verify_reports_witness() {
        let cfg = SamplerConfig::with_seed(3);
        let ok = verify_identity(|_| qi(0), SamplerKind::Generic, 3, &cfg, 4).unwrap();
        assert!(ok.passed());
        let bad = verify_identity(
            |pt| pt.eval_necklace(Necklace::parse("X").unwrap(), Interpretation::Generic),
            SamplerKind::Generic,
            3,
            &cfg,
            4,
        )
        .unwrap();
        assert!(!bad.passed());
    }

    #[test]
    fn modular_rank() {
        let rows = vec![vec![Fp(1), Fp(2)], vec![Fp(2), Fp(4)]];
        assert_eq!(modular_span_dim(&rows), 1);
        assert_eq!(rank(vec![vec![qi(1), qi(0)], vec![qi(0), qi(3)]]), 2);
    }
}
