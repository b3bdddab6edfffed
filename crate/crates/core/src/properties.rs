//! Structural properties every congruence on `OR_n` is supposed to satisfy,
//! phrased as checks that list counterexamples instead of asserting.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::congruence::{FiniteMonoid, Partition};
use crate::error::{Error, Result};
use crate::rook::{element_type, Family, MSetType};
use crate::universe::{MonoidUniverse, ZERO};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyViolation {
    pub property: &'static str,
    pub detail: String,
}

pub const RANK_BOUND: &str = "rank of a product is at most the smaller rank";
pub const IDEAL_IN_CLASS: &str = "a class mixing ranks contains the ideal of its top element";
pub const ZERO_CLASS_GROWTH: &str = "a non-singleton class at rank k forces I_(k-1) into the zero class";
pub const RIGID_ABOVE_ZERO: &str = "above a zero class I_k, ranks beyond k+1 are singletons";

/// Elements of rank at most `k` (`I_k`; the whole monoid when `k = n`).
pub fn rank_ideal(u: &MonoidUniverse, k: usize) -> BTreeSet<usize> {
    (0..u.size()).filter(|&i| u.element(i).rank() <= k).collect()
}

/// Elements of rank below `m` plus the rank-`m` elements of type `t`.
pub fn type_ideal(u: &MonoidUniverse, t: MSetType) -> BTreeSet<usize> {
    let m = u.half_degree();
    (0..u.size())
        .filter(|&i| {
            let e = u.element(i);
            e.rank() < m || (e.rank() == m && element_type(e) == Some(t))
        })
        .collect()
}

/// Every pair whose product has a rank above either factor.
pub fn rank_bound_violations(u: &MonoidUniverse) -> Vec<PropertyViolation> {
    let mut out = Vec::new();
    for a in 0..u.size() {
        for b in 0..u.size() {
            let ra = u.element(a).rank();
            let rb = u.element(b).rank();
            let rp = u.element(u.product(a, b)).rank();
            if rp > ra.min(rb) {
                out.push(PropertyViolation {
                    property: RANK_BOUND,
                    detail: format!("{} ∘ {} has rank {rp}", u.element(a), u.element(b)),
                });
            }
        }
    }
    out
}

fn require_or(u: &MonoidUniverse) -> Result<()> {
    if u.family() != Family::OR {
        return Err(Error::domain("these properties are stated for OR_n"));
    }
    Ok(())
}

/// Checks the three class-structure properties on one congruence of `OR_n`.
pub fn congruence_property_violations(u: &MonoidUniverse, p: &Partition) -> Result<Vec<PropertyViolation>> {
    require_or(u)?;
    if p.len() != u.size() {
        return Err(Error::domain("partition size does not match the universe"));
    }
    let n = u.degree();
    let m = u.half_degree();
    let ideal_i = type_ideal(u, MSetType::I);
    let ideal_ii = type_ideal(u, MSetType::II);
    let zero: BTreeSet<usize> = p.class_of(ZERO).into_iter().collect();
    let mut out = Vec::new();

    for class in p.classes() {
        let set: BTreeSet<usize> = class.iter().copied().collect();
        let lowest = class.iter().map(|&i| u.element(i).rank()).min().unwrap_or(0);
        for &s in &class {
            let k = u.element(s).rank();
            if k > lowest {
                let ok = if k == m {
                    ideal_i.is_subset(&set) || ideal_ii.is_subset(&set)
                } else {
                    rank_ideal(u, k).is_subset(&set)
                };
                if !ok {
                    out.push(PropertyViolation {
                        property: IDEAL_IN_CLASS,
                        detail: format!("class of {} mixes ranks {lowest} and {k}", u.element(s)),
                    });
                }
            }
            if class.len() > 1 {
                let ok = if k == n {
                    ideal_i.is_subset(&zero) || ideal_ii.is_subset(&zero)
                } else if k == 0 {
                    true
                } else {
                    rank_ideal(u, k - 1).is_subset(&zero)
                };
                if !ok {
                    out.push(PropertyViolation {
                        property: ZERO_CLASS_GROWTH,
                        detail: format!("{} shares its class but the zero class is too small", u.element(s)),
                    });
                }
            }
        }
    }

    if let Some(k) = (0..m).find(|&k| rank_ideal(u, k) == zero) {
        for class in p.classes().iter().filter(|c| c.len() > 1) {
            for &s in class {
                if u.element(s).rank() > k + 1 {
                    out.push(PropertyViolation {
                        property: RIGID_ABOVE_ZERO,
                        detail: format!("zero class I_{k}, yet {} is not alone", u.element(s)),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Runs [`congruence_property_violations`] on every member of a lattice.
pub fn lattice_property_violations(u: &MonoidUniverse, lattice: &[Partition]) -> Result<Vec<(usize, PropertyViolation)>> {
    let mut out = Vec::new();
    for (i, p) in lattice.iter().enumerate() {
        out.extend(congruence_property_violations(u, p)?.into_iter().map(|v| (i, v)));
    }
    Ok(out)
}
