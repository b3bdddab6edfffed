//! The congruence families on `OR_n` and `SR_n`, the predicted congruence
//! set built from them, and the comparison against the full lattice.
//!
//! Every family has the same shape: a zero class (an ideal), one rank
//! stratum split into orbits of a normal subgroup acting inside H-classes,
//! and singletons everywhere else.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::congruence::{congruence_lattice, find_violation, naive_congruences, FiniteMonoid, Partition};
use crate::error::{Error, Result};
use crate::green::{apply_mu, classify_ideal, unit_group, IdealKind};
use crate::group::{normal_subgroups, NormalRef, PermGroup};
use crate::rook::{element_type, Family, MSetType, PartialInjection};
use crate::universe::{Budget, MonoidUniverse, ZERO};

/// Parameters of one family member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "family")]
pub enum FamilySpec {
    /// Zero class: ranks below `k`; rank `k` split by `N ⊴ S_k`.
    #[serde(rename = "OR_eqN")]
    OrEqN { k: usize, normal: NormalRef },
    /// Zero class: ranks below `m`; rank `m` split by `N1` on type I and `N2` on type II.
    #[serde(rename = "OR_eqN1N2")]
    OrEqN1N2 { n1: NormalRef, n2: NormalRef },
    /// Zero class: ranks below `m` and type-II rank `m`; type I split by `N`.
    #[serde(rename = "OR_eqI")]
    OrEqI { normal: NormalRef },
    #[serde(rename = "OR_eqII")]
    OrEqII { normal: NormalRef },
    /// The two extra congruences on `OR_4` that split the unit group.
    #[serde(rename = "OR_eq1")]
    OrEq1,
    #[serde(rename = "OR_eq2")]
    OrEq2,
    /// Zero class: ranks below `k`; rank `k` split by `N ⊴ S_k`, or by `N ⊴ W` when `k = n`.
    #[serde(rename = "SR_eqN")]
    SrEqN { k: usize, normal: NormalRef },
    /// Everything in one class.
    #[serde(rename = "universal")]
    Universal,
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::OrEqN { k, normal } => write!(f, "≡_N (k={k}, {normal})"),
            FamilySpec::OrEqN1N2 { n1, n2 } => write!(f, "≡_{{N1,N2}} ({n1}, {n2})"),
            FamilySpec::OrEqI { normal } => write!(f, "≡_N^I ({normal})"),
            FamilySpec::OrEqII { normal } => write!(f, "≡_N^II ({normal})"),
            FamilySpec::OrEq1 => f.write_str("≡_1"),
            FamilySpec::OrEq2 => f.write_str("≡_2"),
            FamilySpec::SrEqN { k, normal } => write!(f, "≡_N (k={k}, {normal})"),
            FamilySpec::Universal => f.write_str("universal"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Label {
    Zero,
    Orbit(usize),
    Single(usize),
}

/// Builds a partition from a zero-class predicate and, per element, the
/// group whose orbit (under [`apply_mu`]) forms its class.
fn orbit_partition<'g>(
    u: &MonoidUniverse,
    in_zero: impl Fn(&PartialInjection) -> bool,
    acting: impl Fn(&PartialInjection) -> Option<&'g PermGroup>,
) -> Result<Partition> {
    let mut labels = Vec::with_capacity(u.size());
    for (i, e) in u.elements().iter().enumerate() {
        let label = if in_zero(e) {
            Label::Zero
        } else if let Some(g) = acting(e) {
            let mut best = i;
            for mu in g.elements() {
                let t = apply_mu(e, mu)?;
                let j = u
                    .index_of(&t)
                    .ok_or_else(|| Error::invariant(format!("{t} left the universe")))?;
                best = best.min(j);
            }
            Label::Orbit(best)
        } else {
            Label::Single(i)
        };
        labels.push(label);
    }
    Ok(Partition::from_labels(&labels))
}

fn require_normal(n: &PermGroup, parent: &PermGroup, what: &str) -> Result<()> {
    if !n.is_normal_in(parent) {
        return Err(Error::domain(format!("{what}: not a normal subgroup")));
    }
    Ok(())
}

fn require_family(u: &MonoidUniverse, family: Family) -> Result<()> {
    if u.family() != family {
        return Err(Error::domain(format!(
            "expected a {family} universe, got {}",
            u.family()
        )));
    }
    Ok(())
}

/// `≡_N` on `OR_n` for `1 ≤ k ≤ m - 1` and `N ⊴ S_k`.
pub fn build_eq_n_or(u: &MonoidUniverse, k: usize, normal: &PermGroup) -> Result<Partition> {
    require_family(u, Family::OR)?;
    let m = u.half_degree();
    if k == 0 || k >= m {
        return Err(Error::domain(format!("level k = {k} outside 1..={}", m.saturating_sub(1))));
    }
    require_normal(normal, &PermGroup::symmetric(k), "N in S_k")?;
    orbit_partition(u, |e| e.rank() < k, |e| (e.rank() == k).then_some(normal))
}

/// `≡_{N1,N2}` on `OR_n` for `N1, N2 ⊴ S_m`.
pub fn build_eq_n1n2(u: &MonoidUniverse, n1: &PermGroup, n2: &PermGroup) -> Result<Partition> {
    require_family(u, Family::OR)?;
    let m = u.half_degree();
    let sm = PermGroup::symmetric(m);
    require_normal(n1, &sm, "N1 in S_m")?;
    require_normal(n2, &sm, "N2 in S_m")?;
    orbit_partition(
        u,
        |e| e.rank() < m,
        |e| match element_type(e) {
            Some(MSetType::I) => Some(n1),
            Some(MSetType::II) => Some(n2),
            None => None,
        },
    )
}

/// `≡_N^I` (variant `I`) or `≡_N^II` on `OR_n` for `N ⊴ S_m`.
///
/// Variant I: the zero class holds every element of rank below `m` and the
/// type-II elements of rank `m`; type-I elements of rank `m` are split into
/// `N`-orbits inside their H-classes; units are singletons. Variant II swaps
/// the types.
pub fn build_eq_type(u: &MonoidUniverse, variant: MSetType, normal: &PermGroup) -> Result<Partition> {
    require_family(u, Family::OR)?;
    let m = u.half_degree();
    require_normal(normal, &PermGroup::symmetric(m), "N in S_m")?;
    let collapsed = match variant {
        MSetType::I => MSetType::II,
        MSetType::II => MSetType::I,
    };
    orbit_partition(
        u,
        |e| e.rank() < m || element_type(e) == Some(collapsed),
        |e| (element_type(e) == Some(variant)).then_some(normal),
    )
}

/// `δ1 = (1 2)(3 4)` and `δ2 = (1 3)(2 4)` in `W'` of `OR_4`.
pub fn or4_deltas() -> (PartialInjection, PartialInjection) {
    (
        PartialInjection::from_images(&[2, 1, 4, 3]).expect("permutation"),
        PartialInjection::from_images(&[3, 4, 1, 2]).expect("permutation"),
    )
}

/// `≡_1` (`which = 1`) or `≡_2` on `OR_4`.
///
/// `≡_1`: units split as `{ε, δ1}`, `{δ2, δ1δ2}`; zero class `I_2^II`; type-I
/// rank-2 elements grouped by H-class. `≡_2` exchanges `δ1` with `δ2` and
/// type I with type II.
pub fn build_eq_special(u: &MonoidUniverse, which: u8) -> Result<Partition> {
    require_family(u, Family::OR)?;
    if u.degree() != 4 {
        return Err(Error::domain("the special congruences exist only on OR_4"));
    }
    let (d1, d2) = or4_deltas();
    let (paired, kept) = match which {
        1 => (d1, MSetType::I),
        2 => (d2, MSetType::II),
        _ => return Err(Error::domain(format!("no special congruence {which}"))),
    };
    let s2 = PermGroup::symmetric(2);
    let mut labels = Vec::with_capacity(u.size());
    for (i, e) in u.elements().iter().enumerate() {
        let label = if e.rank() < 2 || (e.rank() == 2 && element_type(e) != Some(kept)) {
            Label::Zero
        } else if e.rank() == 2 {
            let mut best = i;
            for mu in s2.elements() {
                best = best.min(u.index_of(&apply_mu(e, mu)?).expect("H-class member"));
            }
            Label::Orbit(best)
        } else {
            // coset of {ε, paired}
            let other = u.index_of(&e.compose(&paired)?).expect("unit");
            Label::Orbit(i.min(other))
        };
        labels.push(label);
    }
    Ok(Partition::from_labels(&labels))
}

/// `≡_N` on `SR_n`: `1 ≤ k ≤ m` with `N ⊴ S_k`, or `k = n` with `N ⊴ W`.
pub fn build_eq_n_sr(u: &MonoidUniverse, k: usize, normal: &PermGroup) -> Result<Partition> {
    require_family(u, Family::SR)?;
    let n = u.degree();
    let m = u.half_degree();
    if k == n {
        require_normal(normal, &unit_group(u)?, "N in W")?;
    } else if k >= 1 && k <= m {
        require_normal(normal, &PermGroup::symmetric(k), "N in S_k")?;
    } else {
        return Err(Error::domain(format!("level k = {k} must be in 1..={m} or {n}")));
    }
    orbit_partition(u, |e| e.rank() < k, |e| (e.rank() == k).then_some(normal))
}

/// One predicted congruence with every parameter choice that yields it.
#[derive(Clone, Debug)]
pub struct Prediction {
    pub specs: Vec<FamilySpec>,
    pub partition: Partition,
}

fn normal_list(parent: &PermGroup, name: &str, budget: &Budget) -> Result<Vec<(NormalRef, PermGroup)>> {
    let list = normal_subgroups(parent, budget.group_order)?;
    Ok(list
        .subgroups
        .into_iter()
        .enumerate()
        .map(|(index, g)| {
            (
                NormalRef {
                    parent: name.to_string(),
                    index,
                    order: g.order(),
                },
                g,
            )
        })
        .collect())
}

/// Every family member over every admissible parameter, plus the universal
/// relation, deduplicated by partition. Each one is checked to be a congruence.
pub fn predicted_congruences(u: &MonoidUniverse, budget: &Budget) -> Result<Vec<Prediction>> {
    let specs = instantiate_families(u, budget)?;
    let mut by_partition: BTreeMap<Partition, Vec<FamilySpec>> = BTreeMap::new();
    for (spec, p) in specs {
        if let Some(v) = find_violation(u, &p) {
            return Err(Error::invariant(format!(
                "{spec} is not a congruence: ({}, {}) separated by {} on the {}",
                u.element(v.a),
                u.element(v.b),
                u.element(v.multiplier),
                if v.left { "left" } else { "right" }
            )));
        }
        by_partition.entry(p).or_default().push(spec);
    }
    let mut out: Vec<Prediction> = by_partition
        .into_iter()
        .map(|(partition, specs)| Prediction { specs, partition })
        .collect();
    out.sort_by(|a, b| {
        b.partition
            .num_classes()
            .cmp(&a.partition.num_classes())
            .then_with(|| a.partition.cmp(&b.partition))
    });
    Ok(out)
}

/// All `(spec, partition)` pairs before deduplication.
pub fn instantiate_families(u: &MonoidUniverse, budget: &Budget) -> Result<Vec<(FamilySpec, Partition)>> {
    let n = u.degree();
    let m = u.half_degree();
    let mut out = Vec::new();
    match u.family() {
        Family::OR => {
            for k in 1..m {
                for (r, g) in normal_list(&PermGroup::symmetric(k), &format!("S_{k}"), budget)? {
                    out.push((FamilySpec::OrEqN { k, normal: r }, build_eq_n_or(u, k, &g)?));
                }
            }
            let sm = normal_list(&PermGroup::symmetric(m), &format!("S_{m}"), budget)?;
            for (r1, g1) in &sm {
                for (r2, g2) in &sm {
                    out.push((
                        FamilySpec::OrEqN1N2 {
                            n1: r1.clone(),
                            n2: r2.clone(),
                        },
                        build_eq_n1n2(u, g1, g2)?,
                    ));
                }
            }
            for (r, g) in &sm {
                out.push((FamilySpec::OrEqI { normal: r.clone() }, build_eq_type(u, MSetType::I, g)?));
                out.push((FamilySpec::OrEqII { normal: r.clone() }, build_eq_type(u, MSetType::II, g)?));
            }
            if n == 4 {
                out.push((FamilySpec::OrEq1, build_eq_special(u, 1)?));
                out.push((FamilySpec::OrEq2, build_eq_special(u, 2)?));
            }
        }
        Family::SR => {
            for k in 1..=m {
                for (r, g) in normal_list(&PermGroup::symmetric(k), &format!("S_{k}"), budget)? {
                    out.push((FamilySpec::SrEqN { k, normal: r }, build_eq_n_sr(u, k, &g)?));
                }
            }
            for (r, g) in normal_list(&unit_group(u)?, "W", budget)? {
                out.push((FamilySpec::SrEqN { k: n, normal: r }, build_eq_n_sr(u, n, &g)?));
            }
        }
        Family::R => {
            return Err(Error::domain("no congruence families are predicted for R_n"));
        }
    }
    out.push((FamilySpec::Universal, Partition::universal(u.size())));
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Matched {
    pub specs: Vec<FamilySpec>,
    pub lattice_index: usize,
}

/// A lattice member no family accounts for.
#[derive(Clone, Debug, Serialize)]
pub struct Unmatched {
    pub lattice_index: usize,
    pub classes: Vec<Vec<usize>>,
    pub zero_class_kind: IdealKind,
    /// Classes containing units, restricted to the units.
    pub unit_classes: Vec<Vec<usize>>,
    pub tags: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub family: Family,
    pub n: usize,
    pub lattice_size: usize,
    pub matched: Vec<Matched>,
    pub predicted_not_found: Vec<FamilySpec>,
    pub found_not_predicted: Vec<Unmatched>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    /// Every family member was found in the lattice.
    pub fn containment_holds(&self) -> bool {
        self.predicted_not_found.is_empty()
    }
}

/// Largest universe on which the lattice is also recomputed by the naive filter.
pub const NAIVE_CROSS_CHECK: usize = 7;

/// Computes the full congruence lattice and matches it against the predictions.
pub fn verify_classification(u: &MonoidUniverse, budget: &Budget) -> Result<ClassificationReport> {
    let lattice = congruence_lattice(u, budget.lattice_elements)?;
    let predictions = predicted_congruences(u, budget)?;
    Ok(compare(u, &lattice, &predictions))
        .and_then(|mut report| {
            if u.size() <= NAIVE_CROSS_CHECK {
                let naive = naive_congruences(u)?;
                if naive != lattice {
                    return Err(Error::invariant(format!(
                        "lattice has {} members, the naive filter finds {}",
                        lattice.len(),
                        naive.len()
                    )));
                }
                report.notes.push(format!(
                    "lattice agrees with the all-set-partitions filter ({} congruences)",
                    naive.len()
                ));
            }
            Ok(report)
        })
}

/// Matches lattice members against predictions by exact partition equality.
pub fn compare(u: &MonoidUniverse, lattice: &[Partition], predictions: &[Prediction]) -> ClassificationReport {
    let position: BTreeMap<&Partition, usize> = lattice.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut matched = Vec::new();
    let mut predicted_not_found = Vec::new();
    let mut covered = vec![false; lattice.len()];
    for pred in predictions {
        match position.get(&pred.partition) {
            Some(&i) => {
                covered[i] = true;
                matched.push(Matched {
                    specs: pred.specs.clone(),
                    lattice_index: i,
                });
            }
            None => predicted_not_found.extend(pred.specs.iter().cloned()),
        }
    }
    matched.sort_by_key(|m| m.lattice_index);

    let n = u.degree();
    let units: Vec<usize> = (0..u.size()).filter(|&i| u.element(i).rank() == n).collect();
    let mut found_not_predicted = Vec::new();
    for (i, p) in lattice.iter().enumerate() {
        if covered[i] {
            continue;
        }
        let zero_class: std::collections::BTreeSet<usize> = p.class_of(ZERO).into_iter().collect();
        let (kind, _) = classify_ideal(u, &zero_class);
        let mut unit_classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &x in &units {
            unit_classes.entry(p.class_id(x)).or_default().push(x);
        }
        let mut tags = Vec::new();
        if u.family() == Family::OR && kind == IdealKind::Union {
            tags.push("Rees-type over OR_n ∖ W′".to_string());
        }
        if p.num_classes() == 1 {
            tags.push("single class but not matched as universal".to_string());
        }
        found_not_predicted.push(Unmatched {
            lattice_index: i,
            classes: p.classes(),
            zero_class_kind: kind,
            unit_classes: unit_classes.into_values().collect(),
            tags,
        });
    }

    let mut notes = Vec::new();
    if u.family() == Family::OR {
        notes.push(
            "≡_N^I / ≡_N^II use the three-part reading: zero class = ranks below m plus the other type at rank m; \
             N-orbits inside H-classes on the named type; units singletons"
                .to_string(),
        );
    }
    notes.push("the uniform congruence is read as the universal relation".to_string());
    let single_class = lattice.iter().filter(|p| p.num_classes() == 1).count();
    if single_class != 1 {
        notes.push(format!(
            "tripwire: {single_class} single-class congruences in the lattice (expected exactly 1)"
        ));
    }
    for pred in predictions.iter().filter(|p| p.specs.len() > 1) {
        let names: Vec<String> = pred.specs.iter().map(|s| s.to_string()).collect();
        notes.push(format!("parameter collision: {}", names.join(" = ")));
    }
    if !found_not_predicted.is_empty() {
        notes.push(format!(
            "{} lattice member(s) not accounted for by any family",
            found_not_predicted.len()
        ));
    }

    ClassificationReport {
        family: u.family(),
        n,
        lattice_size: lattice.len(),
        matched,
        predicted_not_found,
        found_not_predicted,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::is_congruence;
    use crate::group::Perm;

    fn or(n: usize) -> MonoidUniverse {
        MonoidUniverse::enumerate(Family::OR, n).unwrap()
    }

    #[test]
    fn eq_n_identity_at_k1() {
        for n in [4, 6] {
            let u = or(n);
            let p = build_eq_n_or(&u, 1, &PermGroup::trivial(1)).unwrap();
            assert!(p.is_identity());
        }
    }

    #[test]
    fn eq_n_rejects_bad_level() {
        let u = or(4);
        assert!(build_eq_n_or(&u, 2, &PermGroup::symmetric(2)).is_err());
        assert!(build_eq_n_or(&u, 0, &PermGroup::trivial(0)).is_err());
        let non_normal =
            PermGroup::from_elements(3, vec![Perm::identity(3), Perm::from_one_based(&[2, 1, 3]).unwrap()]).unwrap();
        let u6 = or(6);
        assert!(build_eq_n1n2(&u6, &non_normal, &PermGroup::symmetric(3)).is_err());
    }

    #[test]
    fn eq_n_k2_on_or6() {
        let u = or(6);
        let p = build_eq_n_or(&u, 2, &PermGroup::symmetric(2)).unwrap();
        assert!(is_congruence(&u, &p));
        let zero: Vec<usize> = p.class_of(ZERO);
        assert!(zero.iter().all(|&i| u.element(i).rank() <= 1));
        assert_eq!(zero.len(), 1 + 36);
        for c in p.classes() {
            let r = u.element(c[0]).rank();
            match r {
                2 => assert_eq!(c.len(), 2),
                3 | 6 => assert_eq!(c.len(), 1),
                _ => {}
            }
        }
    }

    #[test]
    fn n1n2_on_or2_is_identity() {
        let u = or(2);
        let s1 = PermGroup::symmetric(1);
        assert!(build_eq_n1n2(&u, &s1, &s1).unwrap().is_identity());
    }

    #[test]
    fn n1n2_on_or4() {
        let u = or(4);
        let e = PermGroup::trivial(2);
        let s2 = PermGroup::symmetric(2);
        let rees = build_eq_n1n2(&u, &e, &e).unwrap();
        assert_eq!(rees.class_of(ZERO).len(), 17);
        assert_eq!(rees.num_classes(), 1 + 16 + 4);
        let a = build_eq_n1n2(&u, &s2, &e).unwrap();
        let b = build_eq_n1n2(&u, &e, &s2).unwrap();
        assert_ne!(a, b);
        assert!(is_congruence(&u, &a) && is_congruence(&u, &b));
        for c in a.classes() {
            if c.len() == 2 {
                assert_eq!(element_type(u.element(c[0])), Some(MSetType::I));
            }
        }
    }

    #[test]
    fn type_variants_on_or4() {
        let u = or(4);
        let p = build_eq_type(&u, MSetType::I, &PermGroup::trivial(2)).unwrap();
        assert!(is_congruence(&u, &p));
        let zero = p.class_of(ZERO);
        assert_eq!(zero.len(), 1 + 16 + 8);
        assert_eq!(p.num_classes(), 1 + 8 + 4);
        let q = build_eq_type(&u, MSetType::I, &PermGroup::symmetric(2)).unwrap();
        assert_eq!(q.num_classes(), 1 + 4 + 4);
        let r = build_eq_type(&u, MSetType::II, &PermGroup::trivial(2)).unwrap();
        assert_ne!(p, r);
    }

    #[test]
    fn specials_on_or4() {
        let u = or(4);
        let (d1, d2) = or4_deltas();
        let d12 = d1.compose(&d2).unwrap();
        let id = PartialInjection::identity(4);
        let ix = |e: &PartialInjection| u.index_of(e).unwrap();
        let one = build_eq_special(&u, 1).unwrap();
        assert!(is_congruence(&u, &one));
        assert!(one.related(ix(&id), ix(&d1)));
        assert!(one.related(ix(&d2), ix(&d12)));
        assert!(!one.related(ix(&id), ix(&d2)));
        let two = build_eq_special(&u, 2).unwrap();
        assert!(is_congruence(&u, &two));
        assert!(two.related(ix(&id), ix(&d2)));
        assert!(build_eq_special(&u, 3).is_err());
        assert!(build_eq_special(&or(6), 1).is_err());
    }

    #[test]
    fn sr_levels() {
        let u = MonoidUniverse::enumerate(Family::SR, 4).unwrap();
        assert!(build_eq_n_sr(&u, 1, &PermGroup::trivial(1)).unwrap().is_identity());
        let w = unit_group(&u).unwrap();
        assert_eq!(w.order(), 8);
        let top = build_eq_n_sr(&u, 4, &w).unwrap();
        assert!(is_congruence(&u, &top));
        assert_eq!(top.num_classes(), 2);
        let mid = build_eq_n_sr(&u, 2, &PermGroup::symmetric(2)).unwrap();
        assert!(is_congruence(&u, &mid));
        assert_eq!(mid.class_of(ZERO).len(), 17);
        assert!(build_eq_n_sr(&u, 3, &PermGroup::symmetric(3)).is_err());
    }
}
