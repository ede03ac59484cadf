//! Exact single-graded Hilbert series as ratios of integer polynomials.

use std::fmt;

/// Integer polynomial in `t`, lowest degree first.
pub type IntPoly = Vec<i128>;

fn trim(mut p: IntPoly) -> IntPoly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

pub fn poly_mul(a: &[i128], b: &[i128]) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn poly_sub(a: &[i128], b: &[i128]) -> IntPoly {
    let mut out = vec![0i128; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

/// `1 - t^k`.
pub fn one_minus(k: usize) -> IntPoly {
    let mut p = vec![0; k + 1];
    p[0] = 1;
    p[k] -= 1;
    p
}

/// `1 + t^k`.
fn one_plus(k: usize) -> IntPoly {
    let mut p = vec![0; k + 1];
    p[0] = 1;
    p[k] += 1;
    p
}

/// Polynomial from sparse `(degree, coefficient)` pairs.
pub fn sparse(terms: &[(usize, i128)]) -> IntPoly {
    let len = terms.iter().map(|(d, _)| d + 1).max().unwrap_or(0);
    let mut p = vec![0; len];
    for &(d, c) in terms {
        p[d] += c;
    }
    trim(p)
}

pub fn product(factors: &[IntPoly]) -> IntPoly {
    factors.iter().fold(vec![1], |acc, f| poly_mul(&acc, f))
}

/// `∏ (1 - t^{d_i})`.
pub fn denominator_of(degrees: &[u32]) -> IntPoly {
    product(&degrees.iter().map(|&d| one_minus(d as usize)).collect::<Vec<_>>())
}

/// Exact division; `None` when `den` does not divide `num`.
pub fn poly_div_exact(num: &[i128], den: &[i128]) -> Option<IntPoly> {
    let num = trim(num.to_vec());
    let den = trim(den.to_vec());
    assert!(!den.is_empty(), "division by zero polynomial");
    if num.is_empty() {
        return Some(Vec::new());
    }
    if num.len() < den.len() {
        return None;
    }
    let lead = *den.last().unwrap();
    let mut rem = num;
    let mut q = vec![0i128; rem.len() - den.len() + 1];
    for k in (0..q.len()).rev() {
        let top = rem[k + den.len() - 1];
        if top % lead != 0 {
            return None;
        }
        let c = top / lead;
        q[k] = c;
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= c * d;
        }
    }
    rem.iter().all(|&x| x == 0).then(|| trim(q))
}

/// `numerator / denominator` with `denominator(0) = ±1`.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalSeries {
    pub numerator: IntPoly,
    pub denominator: IntPoly,
}

impl RationalSeries {
    pub fn new(numerator: IntPoly, denominator: IntPoly) -> Self {
        let denominator = trim(denominator);
        assert!(
            matches!(denominator.first(), Some(1) | Some(-1)),
            "denominator must have constant term ±1"
        );
        RationalSeries {
            numerator: trim(numerator),
            denominator,
        }
    }

    /// The first `d + 1` Taylor coefficients, by long division.
    pub fn coefficients(&self, d: usize) -> Vec<i128> {
        let c0 = self.denominator[0];
        let mut out = Vec::with_capacity(d + 1);
        for k in 0..=d {
            let mut v = self.numerator.get(k).copied().unwrap_or(0);
            for j in 1..self.denominator.len().min(k + 1) {
                v -= self.denominator[j] * out[k - j];
            }
            out.push(v * c0);
        }
        out
    }

    pub fn coefficient(&self, d: usize) -> i128 {
        self.coefficients(d)[d]
    }

    pub fn mul_poly(&self, p: &[i128]) -> RationalSeries {
        RationalSeries::new(poly_mul(&self.numerator, p), self.denominator.clone())
    }

    pub fn mul(&self, o: &RationalSeries) -> RationalSeries {
        RationalSeries::new(
            poly_mul(&self.numerator, &o.numerator),
            poly_mul(&self.denominator, &o.denominator),
        )
    }

    /// Index of the first coefficient where the two series differ, by
    /// exact cross-multiplication.
    pub fn first_difference(&self, o: &RationalSeries) -> Option<usize> {
        let diff = poly_sub(
            &poly_mul(&self.numerator, &o.denominator),
            &poly_mul(&o.numerator, &self.denominator),
        );
        diff.iter().position(|&c| c != 0)
    }

    pub fn same_as(&self, o: &RationalSeries) -> bool {
        self.first_difference(o).is_none()
    }
}

impl fmt::Debug for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.numerator, self.denominator)
    }
}

/// The Hilbert series of the invariants of two generic 4x4 matrices.
pub fn c42_series() -> RationalSeries {
    let num = poly_mul(
        &sparse(&[(0, 1), (2, -1), (4, 1)]),
        &sparse(&[(0, 1), (1, -1), (3, -1), (4, 1), (5, 2), (6, 1), (7, -1), (9, -1), (10, 1)]),
    );
    let den = product(&[
        product(&vec![one_minus(1); 3]),
        product(&vec![one_minus(2); 4]),
        product(&vec![one_minus(3); 5]),
        product(&vec![one_minus(4); 5]),
    ]);
    RationalSeries::new(num, den)
}

/// Multiplying numerator and denominator of [`c42_series`] by this
/// factor turns the denominator into the primary one.
pub fn rescale_factor() -> IntPoly {
    product(&[one_plus(2), vec![1, 1, 1], one_plus(3), one_plus(3)])
}

/// Degrees of the 17 primary invariants of the 4x4 case.
pub const C42_PRIMARY_DEGREES: [u32; 17] = [1, 1, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4, 4, 4, 6, 6];

/// Degrees of the 48 secondary invariants of the 4x4 case, one entry per
/// invariant (1, a16, a17, a19, a21, ..., a25·a27²).
pub const C42_SECONDARY_DEGREES: [u32; 48] = [
    0, 5, 5, 6, 6, 7, 7, 8, 8, 8, 8, 9, 9, 9, 9, 10, 10, 10, 10, 11, 11, 11, 11, 12, 12, 13, 13, 13, 13, 14, 14, 14,
    14, 15, 15, 15, 15, 16, 16, 16, 16, 17, 17, 18, 18, 19, 19, 24,
];

/// Degrees of the 10 primary invariants of the 3x3 case.
pub const C32_PRIMARY_DEGREES: [u32; 10] = [1, 1, 2, 2, 2, 3, 3, 3, 3, 4];

/// The c42 series over `∏ (1 - t^{p})` for the primary degrees: the
/// numerator is the generating polynomial of the secondary degrees.
pub fn rescaled_numerator() -> IntPoly {
    let s = c42_series();
    let num = poly_mul(&s.numerator, &denominator_of(&C42_PRIMARY_DEGREES));
    poly_div_exact(&num, &s.denominator).expect("the primary denominator clears the series denominator")
}

pub fn free_ring_series(degrees: &[u32]) -> RationalSeries {
    RationalSeries::new(vec![1], denominator_of(degrees))
}

/// Hilbert series of the invariants of two generic 3x3 matrices: a
/// hypersurface on the 11 generators cut out in degree 12.
pub fn c32_series() -> RationalSeries {
    RationalSeries::new(one_minus(12), denominator_of(&[1, 1, 2, 2, 2, 3, 3, 3, 3, 4, 6]))
}

/// Hilbert series of the invariants of two generic 2x2 matrices.
pub fn c22_series() -> RationalSeries {
    free_ring_series(&[1, 1, 2, 2, 2])
}

/// The full invariant ring series for size `n`.
pub fn invariant_series(n: usize) -> RationalSeries {
    match n {
        2 => c22_series(),
        3 => c32_series(),
        4 => c42_series(),
        _ => panic!("no Hilbert series for n = {n}"),
    }
}

/// The traceless part: the full series times `(1 - t)^2`, which removes
/// the two free scalar generators.
pub fn traceless_series(n: usize) -> RationalSeries {
    invariant_series(n).mul_poly(&product(&[one_minus(1), one_minus(1)]))
}

/// `free(d) - target(d) - ideal(d)` for `d = 0..=max`; `ideal_dims[d]`
/// defaults to 0 past its end.
pub fn deficits(traceless_degrees: &[u32], n: usize, ideal_dims: &[usize], max: usize) -> Vec<i128> {
    let free = free_ring_series(traceless_degrees).coefficients(max);
    let target = traceless_series(n).coefficients(max);
    (0..=max)
        .map(|d| free[d] - target[d] - ideal_dims.get(d).copied().unwrap_or(0) as i128)
        .collect()
}

/// Outcome of comparing a Hironaka decomposition with a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accounting {
    pub primary_count: usize,
    pub secondary_count: usize,
    /// `(degree, decomposition coefficient, series coefficient)`.
    pub first_difference: Option<(usize, i128, i128)>,
}

impl Accounting {
    pub fn matches(&self) -> bool {
        self.first_difference.is_none()
    }
}

/// Compare `Σ t^{q_i} / ∏ (1 - t^{p_j})` with `target`.
pub fn hironaka_accounting(primary: &[u32], secondary: &[u32], target: &RationalSeries) -> Accounting {
    let num = secondary.iter().fold(Vec::new(), |acc, &d| {
        poly_sub(&acc, &sparse(&[(d as usize, -1)]))
    });
    let decomposition = RationalSeries::new(num, denominator_of(primary));
    let first_difference = decomposition.first_difference(target).map(|d| {
        (
            d,
            decomposition.coefficient(d),
            target.coefficient(d),
        )
    });
    Accounting {
        primary_count: primary.len(),
        secondary_count: secondary.len(),
        first_difference,
    }
}

/// Expected number of primary invariants for `d` matrices of size `n`.
pub fn primary_count(n: usize, d: usize) -> usize {
    (d - 1) * n * n + 1
}

/// Secondary degrees read off a numerator with nonnegative coefficients.
pub fn degrees_from_numerator(num: &[i128]) -> Vec<u32> {
    num.iter()
        .enumerate()
        .flat_map(|(d, &c)| std::iter::repeat(d as u32).take(c.max(0) as usize))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric() {
        let s = RationalSeries::new(vec![1], one_minus(1));
        assert_eq!(s.coefficients(3), [1, 1, 1, 1]);
    }

    #[test]
    fn exact_division() {
        assert_eq!(poly_div_exact(&poly_mul(&one_minus(3), &[1, 2]), &one_minus(3)), Some(vec![1, 2]));
        assert_eq!(poly_div_exact(&[1, 1], &[1, 2]), None);
    }

    #[test]
    fn c32_forms_agree() {
        let hironaka = RationalSeries::new(one_plus(6), denominator_of(&C32_PRIMARY_DEGREES));
        assert!(hironaka.same_as(&c32_series()));
    }

    #[test]
    fn secondary_numerator() {
        let expected = sparse(&[
            (0, 1), (5, 2), (6, 2), (7, 2), (8, 4), (9, 4), (10, 4), (11, 4), (12, 2),
            (13, 4), (14, 4), (15, 4), (16, 4), (17, 2), (18, 2), (19, 2), (24, 1),
        ]);
        let num = rescaled_numerator();
        assert_eq!(num, expected);
        assert_eq!(num.iter().sum::<i128>(), 48);
        assert_eq!(degrees_from_numerator(&num), C42_SECONDARY_DEGREES);
        let acc = hironaka_accounting(&C42_PRIMARY_DEGREES, &degrees_from_numerator(&num), &c42_series());
        assert!(acc.matches());
        assert_eq!(acc.primary_count, primary_count(4, 2));
        let s = c42_series();
        assert_eq!(poly_mul(&s.denominator, &rescale_factor()), denominator_of(&C42_PRIMARY_DEGREES));
    }

    #[test]
    fn accounting_reports_first_gap() {
        let acc = hironaka_accounting(&C42_PRIMARY_DEGREES, &[0, 5, 6], &c42_series());
        let (d, ours, theirs) = acc.first_difference.unwrap();
        assert_eq!(d, 5);
        assert_eq!(theirs - ours, 1);
    }

    #[test]
    fn n2_has_no_deficit() {
        let d = deficits(&[2, 2, 2], 2, &[], 12);
        assert!(d.iter().all(|&x| x == 0));
    }
}

#[cfg(test)]
mod generator_tests {
    use super::*;
    use crate::ring::generator_set;

    #[test]
    fn n4_deficits_with_empty_ideal() {
        let gens = generator_set(4).unwrap();
        let d = deficits(&gens.traceless_degrees(), 4, &[], 13);
        assert!(d[..=11].iter().all(|&x| x == 0), "{d:?}");
        assert_eq!(d[12], 5);
        assert_eq!(d[13], 8);
    }

    #[test]
    fn n3_deficits_with_empty_ideal() {
        let gens = generator_set(3).unwrap();
        let d = deficits(&gens.traceless_degrees(), 3, &[], 12);
        assert!(d[..=11].iter().all(|&x| x == 0), "{d:?}");
        assert_eq!(d[12], 1);
    }
}
