//! Breaking pairs: necklace pairs whose bracket lands in a target bidegree
//! and carries information beyond the generator definitions.

use std::fmt;

use crate::necklace::{enumerate_necklaces, is_chn, Bidegree, Necklace};
use crate::ring::GeneratorSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BreakingPair {
    pub first: Necklace,
    pub second: Necklace,
    pub target: Bidegree,
}

impl fmt::Display for BreakingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

/// The defining conditions, checked exactly.
pub fn is_breaking_pair(first: Necklace, second: Necklace, target: Bidegree, gens: &GeneratorSet) -> bool {
    let (b1, b2) = (first.bidegree(), second.bidegree());
    if b1.r + b2.r != target.r + 1 || b1.s + b2.s != target.s + 1 {
        return false;
    }
    if first.len() < 2 || first >= second {
        return false;
    }
    if first.len() == 2 && !is_chn(second, gens.n()) {
        return false;
    }
    !(gens.in_support(first) && gens.in_support(second))
}

/// Every breaking pair for `target`, ascending in `(first, second)`.
pub fn breaking_pairs(target: Bidegree, gens: &GeneratorSet) -> Vec<BreakingPair> {
    pairs_where(target, |first, second| is_breaking_pair(first, second, target, gens))
}

/// Ordered pairs landing in `target` that fail only the support or the
/// degree-2 condition. Their brackets are still identities between known
/// and unknown traces, so they serve as a fallback when the breaking pairs
/// leave the system short of full rank (n = 4 at (3,3) is the first case).
/// `first = AB` is excluded: its partner lies in `target` itself.
pub fn auxiliary_pairs(target: Bidegree, gens: &GeneratorSet) -> Vec<BreakingPair> {
    pairs_where(target, |first, second| {
        first.len() >= 2
            && first < second
            && first.bidegree() != Bidegree::new(1, 1)
            && !is_breaking_pair(first, second, target, gens)
    })
}

fn pairs_where(target: Bidegree, keep: impl Fn(Necklace, Necklace) -> bool) -> Vec<BreakingPair> {
    let total = Bidegree::new(target.r + 1, target.s + 1);
    let mut out = Vec::new();
    for p in 0..=total.r {
        for q in 0..=total.s {
            let b1 = Bidegree::new(p, q);
            let b2 = Bidegree::new(total.r - p, total.s - q);
            // first < second forces deg(first) <= deg(second)
            if b1.total() < 2 || b1.total() > b2.total() {
                continue;
            }
            let seconds = enumerate_necklaces(b2);
            for first in enumerate_necklaces(b1) {
                for &second in &seconds {
                    if keep(first, second) {
                        out.push(BreakingPair {
                            first,
                            second,
                            target,
                        });
                    }
                }
            }
        }
    }
    out.sort();
    out
}
