//! Substitution homomorphisms from the generator ring onto the invariant
//! commuting variety and the Calogero–Moser space, and the n = 3 rewriting
//! of the defining relation through the Calogero–Moser relations.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::miner::RelationIdeal;
use crate::numeric::{eval_genpoly, sample, SamplerConfig, SamplerKind, Verdict};
use crate::par::{self, Exec};
use crate::ring::{generator_set, GenPoly, MonomialOrder, OrderKind};
use crate::{check_size, qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variety {
    /// Pairs with `[X,Y] = 0`.
    Commuting,
    /// Pairs with `rank([X,Y] + I) = 1`.
    CalogeroMoser,
}

impl Variety {
    pub fn sampler(self) -> SamplerKind {
        match self {
            Variety::Commuting => SamplerKind::Commuting,
            Variety::CalogeroMoser => SamplerKind::CalogeroMoser,
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Variety::Commuting => "com",
            Variety::CalogeroMoser => "cm",
        }
    }
}

/// Number of commutator-free generators, which every map fixes.
fn fixed_count(n: usize) -> usize {
    match n {
        2 => 5,
        3 => 9,
        _ => 14,
    }
}

/// A ring homomorphism `a_i ↦ images[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubstitutionMap {
    n: usize,
    variety: Variety,
    /// Slot 0 unused.
    images: Vec<GenPoly>,
    /// Generators whose image is a printed constant not yet checked
    /// against evaluation.
    unresolved: Vec<usize>,
}

impl SubstitutionMap {
    fn identity_part(n: usize, variety: Variety) -> Result<Self> {
        check_size(n)?;
        let gens = generator_set(n)?;
        let mut images = vec![GenPoly::zero(); gens.len() + 1];
        for (i, img) in images.iter_mut().enumerate().take(fixed_count(n) + 1).skip(1) {
            *img = GenPoly::var(i);
        }
        Ok(SubstitutionMap {
            n,
            variety,
            images,
            unresolved: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variety(&self) -> Variety {
        self.variety
    }

    /// `com4`, `cm3`, ...: the `target=` field of image relation files.
    pub fn target_name(&self) -> String {
        format!("{}{}", self.variety.prefix(), self.n)
    }

    pub fn image(&self, i: usize) -> &GenPoly {
        &self.images[i]
    }

    pub fn images(&self) -> &[GenPoly] {
        &self.images
    }

    /// Generators whose printed scalar image still awaits [`verify_map`].
    pub fn unresolved(&self) -> &[usize] {
        &self.unresolved
    }

    pub fn is_resolved(&self) -> bool {
        self.unresolved.is_empty()
    }

    pub fn apply(&self, p: &GenPoly) -> GenPoly {
        p.substitute(&self.images)
    }
}

/// Identity on commutator-free generators, zero on the rest.
pub fn com_map(n: usize) -> Result<SubstitutionMap> {
    SubstitutionMap::identity_part(n, Variety::Commuting)
}

/// The Calogero–Moser substitution with its printed constants. Constant
/// images are unresolved until checked by [`verify_map`].
pub fn cm_map(n: usize) -> Result<SubstitutionMap> {
    let mut map = SubstitutionMap::identity_part(n, Variety::CalogeroMoser)?;
    let (scalars, scaled): (&[(usize, i64)], &[(usize, i64, usize)]) = match n {
        2 => (&[], &[]),
        3 => (&[(10, -3), (11, 2)], &[]),
        _ => (
            &[(15, 6), (21, 24), (27, 42), (32, 168)],
            &[
                (18, 3, 3),
                (19, 6, 4),
                (20, 3, 5),
                (24, 6, 3),
                (25, 6, 4),
                (26, 6, 5),
                (28, 6, 6),
                (29, 6, 7),
                (30, 6, 8),
                (31, 6, 9),
            ],
        ),
    };
    for &(i, c) in scalars {
        map.images[i] = GenPoly::constant(qi(c));
        map.unresolved.push(i);
    }
    for &(i, c, j) in scaled {
        map.images[i] = GenPoly::var(j).scale(&qi(c));
    }
    Ok(map)
}

/// Outcome of checking one generator's image on sampled points.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorCheck {
    pub index: usize,
    pub image: GenPoly,
    pub verdict: Verdict,
    /// The generator's value when it is the same constant on every sample.
    pub constant: Option<Q>,
}

impl GeneratorCheck {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapReport {
    pub n: usize,
    pub target: String,
    pub trials: usize,
    pub checks: Vec<GeneratorCheck>,
    /// `(generator, printed, measured)` for constant images that evaluation
    /// contradicts.
    pub conventions: Vec<(usize, Q, Q)>,
}

impl MapReport {
    /// True when every image holds after convention resolution.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| {
            c.passed()
                || self
                    .conventions
                    .iter()
                    .any(|(i, _, m)| *i == c.index && c.constant.as_ref() == Some(m))
        })
    }

    pub fn check(&self, i: usize) -> Option<&GeneratorCheck> {
        self.checks.iter().find(|c| c.index == i)
    }
}

impl fmt::Display for MapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# map {} trials={}", self.target, self.trials)?;
        for c in &self.checks {
            let status = if c.passed() { "ok" } else { "FAIL" };
            write!(f, "a{} -> {}: {status}", c.index, render_image(&c.image, self.n))?;
            if let Verdict::Fail { witness, value } = &c.verdict {
                write!(f, " (trial {} gives a{} = {value})", witness.trial, c.index)?;
            }
            writeln!(f)?;
        }
        for (i, printed, measured) in &self.conventions {
            writeln!(f, "convention a{i}: printed {printed}, measured {measured}")?;
        }
        Ok(())
    }
}

fn render_image(p: &GenPoly, n: usize) -> String {
    match generator_set(n) {
        Ok(gens) => p.render(&MonomialOrder::new(OrderKind::Grevlex, &gens)),
        Err(_) => format!("{p:?}"),
    }
}

/// Evaluate every generator and its image on `trials` points of the
/// map's variety. A constant image that fails but matches a constant
/// measured value is recorded as a convention rather than a defect.
pub fn verify_map(map: &SubstitutionMap, cfg: &SamplerConfig, trials: usize) -> Result<MapReport> {
    let gens = generator_set(map.n)?;
    let kind = map.variety.sampler();
    let points: Vec<Vec<Q>> = par::map_range(Exec::current(), trials, |t| -> Result<Vec<Q>> {
        let pair = sample(kind, map.n, cfg, t as u64)?;
        Ok(pair.point().generator_values(&gens))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    let mut conventions = Vec::new();
    for i in 3..=gens.len() {
        let image = map.images[i].clone();
        let mut verdict = Verdict::Pass { trials };
        for (t, vals) in points.iter().enumerate() {
            let diff = &vals[i] - eval_genpoly(&image, vals);
            if !diff.is_zero() {
                verdict = Verdict::Fail {
                    witness: Box::new(sample(kind, map.n, cfg, t as u64)?),
                    value: vals[i].clone(),
                };
                break;
            }
        }
        let constant = points
            .first()
            .map(|v| v[i].clone())
            .filter(|c| points.iter().all(|v| &v[i] == c));
        if !verdict.passed() && image.is_constant() {
            if let Some(c) = &constant {
                conventions.push((i, image.constant_term(), c.clone()));
            }
        }
        checks.push(GeneratorCheck {
            index: i,
            image,
            verdict,
            constant,
        });
    }
    Ok(MapReport {
        n: map.n,
        target: map.target_name(),
        trials,
        checks,
        conventions,
    })
}

/// `map` with the constant images replaced by their measured values.
/// Fails if some image is contradicted by evaluation and not explained by
/// a convention.
pub fn resolve(map: &SubstitutionMap, report: &MapReport) -> Result<SubstitutionMap> {
    if !report.passed() {
        let bad: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.passed() && !report.conventions.iter().any(|(i, _, _)| *i == c.index))
            .map(|c| format!("a{}", c.index))
            .collect();
        return Err(Error::Mismatch(format!("{} images fail on sampled points: {}", report.target, bad.join(", "))));
    }
    let mut out = map.clone();
    for (i, _, measured) in &report.conventions {
        out.images[*i] = GenPoly::constant(measured.clone());
    }
    out.unresolved.clear();
    Ok(out)
}

/// [`cm_map`] after resolution on `trials` sampled points.
pub fn resolved_cm_map(n: usize, cfg: &SamplerConfig, trials: usize) -> Result<(SubstitutionMap, MapReport)> {
    let map = cm_map(n)?;
    let report = verify_map(&map, cfg, trials)?;
    Ok((resolve(&map, &report)?, report))
}

/// Images of the relations, made primitive, without zeros or repeats.
/// Constant images in an unresolved map are refused.
pub fn image_relations(ideal: &RelationIdeal, map: &SubstitutionMap, order: &MonomialOrder) -> Result<Vec<GenPoly>> {
    if !map.is_resolved() {
        return Err(Error::Mismatch(format!(
            "{} has unverified constant images; run verify_map first",
            map.target_name()
        )));
    }
    let mut out: Vec<GenPoly> = Vec::new();
    for rel in ideal.relations() {
        let img = map.apply(&rel.poly);
        if img.is_zero() {
            continue;
        }
        let img = img.primitive(order);
        if !out.contains(&img) {
            out.push(img);
        }
    }
    Ok(out)
}

/// The rewriting `a21² + (4/27)a15³ − (1/27)(r3r5 − r4²) − (1/18)(a3r1² −
/// 2a4r1r2 + a5r2²)` for n = 3, written in the n = 3 generators. The
/// n = 4 names alias as `a15 = −a10` and `a21 = a11`, under which the
/// Calogero–Moser point has `a15 = −3` and `δ = 1`.
pub fn n3_identity(delta: &GenPoly) -> GenPoly {
    let a = |i: usize| GenPoly::var(i);
    let c = |n: i64, d: i64| Q::new(n.into(), d.into());
    let nine_delta = delta.scale(&qi(9));
    let sum = |terms: &[(i64, GenPoly)]| {
        let mut p = GenPoly::zero();
        for (k, t) in terms {
            p.add_assign_scaled(t, &qi(*k));
        }
        p
    };
    let r1 = sum(&[(1, a(3).mul(&a(9))), (-2, a(4).mul(&a(8))), (1, a(5).mul(&a(7)))]);
    let r2 = sum(&[(1, a(5).mul(&a(6))), (-2, a(4).mul(&a(7))), (1, a(3).mul(&a(8)))]);
    let r3 = sum(&[
        (1, nine_delta.mul(&a(3))),
        (-1, a(3).mul(&a(4).pow(2))),
        (1, a(3).pow(2).mul(&a(5))),
        (6, a(6).mul(&a(8))),
        (-6, a(7).pow(2)),
    ]);
    let r4 = sum(&[
        (1, nine_delta.mul(&a(4))),
        (-1, a(4).pow(3)),
        (1, a(3).mul(&a(4)).mul(&a(5))),
        (3, a(6).mul(&a(9))),
        (-3, a(7).mul(&a(8))),
    ]);
    let r5 = sum(&[
        (1, nine_delta.mul(&a(5))),
        (-1, a(4).pow(2).mul(&a(5))),
        (1, a(3).mul(&a(5).pow(2))),
        (6, a(7).mul(&a(9))),
        (-6, a(8).pow(2)),
    ]);
    let a15 = a(10).neg();
    let a21 = a(11);
    let mut out = a21.pow(2);
    out.add_assign_scaled(&a15.pow(3), &c(4, 27));
    out.add_assign_scaled(&r3.mul(&r5).sub(&r4.pow(2)), &c(-1, 27));
    let quad = a(3)
        .mul(&r1.pow(2))
        .sub(&a(4).mul(&r1).mul(&r2).scale(&qi(2)))
        .add(&a(5).mul(&r2.pow(2)));
    out.add_assign_scaled(&quad, &c(-1, 18));
    out
}

/// `δ = a10/3`, which is 1 on the Calogero–Moser space and makes the
/// identity homogeneous.
pub fn n3_homogeneous_delta() -> GenPoly {
    GenPoly::var(10).scale(&Q::new(1.into(), 3.into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    /// `identity = factor · relation` when the two are proportional.
    pub factor: Option<Q>,
    /// `identity − factor · relation` (or the identity itself when no
    /// factor could be read off).
    pub difference: GenPoly,
    pub numeric: Verdict,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.factor.is_some() && self.numeric.passed()
    }
}

/// Compare the homogenized identity with `relation` (the mined n = 3
/// relation) symbolically, and check that it vanishes on random pairs.
pub fn n3_identity_check(relation: &GenPoly, cfg: &SamplerConfig, trials: usize) -> Result<IdentityCheck> {
    let gens = generator_set(3)?;
    let id = n3_identity(&n3_homogeneous_delta());
    let factor = proportionality(&id, relation);
    let difference = match &factor {
        Some(f) => id.sub(&relation.scale(f)),
        None => id.clone(),
    };
    let numeric = crate::numeric::verify_identity(
        |pt| eval_genpoly(&id, &pt.generator_values(&gens)),
        SamplerKind::Generic,
        3,
        cfg,
        trials,
    )?;
    Ok(IdentityCheck {
        factor,
        difference,
        numeric,
    })
}

/// `c` with `p = c · q`, if one exists and is nonzero.
pub fn proportionality(p: &GenPoly, q: &GenPoly) -> Option<Q> {
    let (m, c) = q.terms().next()?;
    let f = p.coefficient(m) / c;
    (!f.is_zero() && p.sub(&q.scale(&f)).is_zero()).then_some(f)
}
