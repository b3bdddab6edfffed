//! Green's relations, principal ideals, ideals and maximal subgroups of the
//! enumerated rook monoids.
//!
//! Classes are computed from the domain / image / rank / type
//! characterizations; the principal-ideal definitions are kept alongside as
//! brute-force cross-checks.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::congruence::{FiniteMonoid, Partition};
use crate::error::{Error, Result};
use crate::group::{Perm, PermGroup};
use crate::rook::{element_type, in_unit_group, Family, MSetType, PartialInjection};
use crate::universe::MonoidUniverse;

/// `σS`, by multiplying out.
pub fn principal_right(u: &MonoidUniverse, sigma: usize) -> BTreeSet<usize> {
    (0..u.size()).map(|t| u.product(sigma, t)).collect()
}

/// `Sσ`, by multiplying out.
pub fn principal_left(u: &MonoidUniverse, sigma: usize) -> BTreeSet<usize> {
    (0..u.size()).map(|t| u.product(t, sigma)).collect()
}

/// `SσS`, by multiplying out.
pub fn principal_twosided(u: &MonoidUniverse, sigma: usize) -> BTreeSet<usize> {
    let right = principal_right(u, sigma);
    let mut out = BTreeSet::new();
    for x in 0..u.size() {
        for &y in &right {
            out.insert(u.product(x, y));
        }
    }
    out
}

/// `{τ : J(τ) ⊆ J(σ)}`
pub fn right_ideal_by_image(u: &MonoidUniverse, sigma: usize) -> BTreeSet<usize> {
    let img = u.element(sigma).image();
    (0..u.size()).filter(|&t| u.element(t).image().is_subset(&img)).collect()
}

/// `{τ : I(τ) ⊆ I(σ)}`
pub fn left_ideal_by_domain(u: &MonoidUniverse, sigma: usize) -> BTreeSet<usize> {
    let dom = u.element(sigma).domain();
    (0..u.size()).filter(|&t| u.element(t).domain().is_subset(&dom)).collect()
}

/// The rank-and-type description of `SσS`: lower ranks, plus same-type
/// rank-`m` elements when `σ` has rank `m` in `OR_n`.
pub fn twosided_ideal_by_rank(u: &MonoidUniverse, sigma: usize) -> BTreeSet<usize> {
    let key = j_key(u.family(), u.element(sigma));
    (0..u.size())
        .filter(|&t| j_key(u.family(), u.element(t)).below_or_equal(&key))
        .collect()
}

/// J-class label: the rank, refined by type at rank `m` in `OR_n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize)]
pub struct JKey {
    pub rank: usize,
    pub mtype: Option<MSetType>,
}

impl JKey {
    /// The order on J-classes implied by the rank-and-type description.
    fn below_or_equal(&self, other: &JKey) -> bool {
        if self.rank < other.rank {
            return true;
        }
        self.rank == other.rank && self.mtype == other.mtype
    }
}

fn j_key(family: Family, e: &PartialInjection) -> JKey {
    let mtype = match family {
        Family::OR => element_type(e),
        _ => None,
    };
    JKey {
        rank: e.rank(),
        mtype,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JClassInfo {
    pub key: JKey,
    pub size: usize,
    pub representative: usize,
}

/// Green's relations on one universe. `D` equals `J` here and is not stored separately.
#[derive(Clone, Debug)]
pub struct GreenData {
    pub l: Partition,
    pub r: Partition,
    pub h: Partition,
    pub j: Partition,
    pub j_classes: Vec<JClassInfo>,
}

impl GreenData {
    pub fn d(&self) -> &Partition {
        &self.j
    }

    /// J-class index of an element.
    pub fn j_class(&self, e: usize) -> usize {
        self.j.class_id(e)
    }
}

pub fn green_partition(u: &MonoidUniverse) -> GreenData {
    let elems = u.elements();
    let l = Partition::from_labels(&elems.iter().map(|e| e.domain().bits()).collect::<Vec<_>>());
    let r = Partition::from_labels(&elems.iter().map(|e| e.image().bits()).collect::<Vec<_>>());
    let h = Partition::from_labels(
        &elems
            .iter()
            .map(|e| (e.domain().bits(), e.image().bits()))
            .collect::<Vec<_>>(),
    );
    let keys: Vec<JKey> = elems.iter().map(|e| j_key(u.family(), e)).collect();
    let j = Partition::from_labels(&keys);
    let j_classes = j
        .classes()
        .into_iter()
        .map(|c| JClassInfo {
            key: keys[c[0]],
            size: c.len(),
            representative: c[0],
        })
        .collect();
    GreenData {
        l,
        r,
        h,
        j,
        j_classes,
    }
}

/// How to recompute J without the rank/type characterization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JMethod {
    Skip,
    /// Equal two-sided principal ideals; cubic in the universe size.
    TwoSided,
    /// The equivalence join of brute-force L and R, which is D and hence J
    /// in a finite monoid.
    LrJoin,
}

/// Which relations to recompute from principal ideals.
#[derive(Clone, Copy, Debug)]
pub struct BruteForceScope {
    pub lr: bool,
    pub j: JMethod,
}

fn bitset(size: usize, members: impl Iterator<Item = usize>) -> Vec<u64> {
    let mut bits = vec![0u64; size.div_ceil(64)];
    for x in members {
        bits[x / 64] |= 1 << (x % 64);
    }
    bits
}

fn one_sided_partition(u: &MonoidUniverse, right: bool) -> Partition {
    use rayon::prelude::*;
    let size = u.size();
    let ideals: Vec<Vec<u64>> = (0..size)
        .into_par_iter()
        .map(|s| {
            bitset(
                size,
                (0..size).map(|t| if right { u.product(s, t) } else { u.product(t, s) }),
            )
        })
        .collect();
    Partition::from_labels(&ideals)
}

/// L, R, H and J recomputed from their definitions (equal principal ideals).
/// Relations left out of `scope` come back as `None`.
pub fn green_brute_force(u: &MonoidUniverse, scope: BruteForceScope) -> [Option<Partition>; 4] {
    use rayon::prelude::*;
    let size = u.size();
    let need_lr = scope.lr || scope.j == JMethod::LrJoin;
    let (l, r) = if need_lr {
        (Some(one_sided_partition(u, false)), Some(one_sided_partition(u, true)))
    } else {
        (None, None)
    };
    let j = match scope.j {
        JMethod::Skip => None,
        JMethod::TwoSided => {
            let ideals: Vec<Vec<u64>> = (0..size)
                .into_par_iter()
                .map(|s| {
                    let right = principal_right(u, s);
                    bitset(
                        size,
                        (0..size).flat_map(|x| right.iter().map(move |&y| (x, y))).map(|(x, y)| u.product(x, y)),
                    )
                })
                .collect();
            Some(Partition::from_labels(&ideals))
        }
        JMethod::LrJoin => {
            let (l, r) = (l.as_ref().expect("computed"), r.as_ref().expect("computed"));
            let mut parent: Vec<usize> = (0..size).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            for rel in [l, r] {
                let mut first = vec![usize::MAX; rel.num_classes()];
                for x in 0..size {
                    let c = rel.class_id(x);
                    if first[c] == usize::MAX {
                        first[c] = x;
                    } else {
                        let (a, b) = (find(&mut parent, first[c]), find(&mut parent, x));
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
            let roots: Vec<usize> = (0..size).map(|x| find(&mut parent, x)).collect();
            Some(Partition::from_labels(&roots))
        }
    };
    let h = match (&l, &r) {
        (Some(l), Some(r)) if scope.lr => Some(l.meet(r).expect("same size")),
        _ => None,
    };
    if scope.lr {
        [l, r, h, j]
    } else {
        [None, None, None, j]
    }
}

fn binom(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn factorial(n: u128) -> u128 {
    (1..=n).product()
}

/// Closed-form sizes for one rank stratum of `OR_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumFormula {
    pub rank: usize,
    pub l_class_size: u128,
    pub h_class_size: u128,
    /// The D-class size as printed in the closed form.
    pub d_class_size_printed: u128,
    /// The size of a single D-class (differs from the printed value at rank `m`).
    pub d_class_size_per_class: u128,
}

/// Closed-form class counts and sizes for `OR_{2m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountFormulas {
    pub m: usize,
    pub l_class_count: u128,
    pub r_class_count: u128,
    pub h_class_count: u128,
    pub j_class_count: u128,
    pub unit_group_order: u128,
    pub strata: Vec<StratumFormula>,
}

impl CountFormulas {
    pub fn stratum(&self, rank: usize) -> Option<&StratumFormula> {
        self.strata.iter().find(|s| s.rank == rank)
    }
}

pub fn class_count_formulas(m: usize) -> Result<CountFormulas> {
    if m == 0 {
        return Err(Error::domain("half-degree must be at least 1"));
    }
    let mm = m as u128;
    let units = (1u128 << (mm - 1)) * factorial(mm);
    let l_class_count = 1 + (0..=mm).map(|k| binom(mm, k) << k).sum::<u128>();
    let h_class_count =
        1 + (1u128 << (2 * mm)) / 2 + (0..mm).map(|k| binom(mm, k).pow(2) << (2 * k)).sum::<u128>();
    let mut strata = Vec::new();
    for k in 0..mm {
        let d = (binom(mm, k).pow(2) << (2 * k)) * factorial(k);
        strata.push(StratumFormula {
            rank: k as usize,
            l_class_size: (binom(mm, k) << k) * factorial(k),
            h_class_size: factorial(k),
            d_class_size_printed: d,
            d_class_size_per_class: d,
        });
    }
    strata.push(StratumFormula {
        rank: m,
        l_class_size: units,
        h_class_size: factorial(mm),
        d_class_size_printed: ((1u128 << (2 * mm)) / 2) * factorial(mm),
        d_class_size_per_class: (1u128 << (2 * (mm - 1))) * factorial(mm),
    });
    strata.push(StratumFormula {
        rank: 2 * m,
        l_class_size: units,
        h_class_size: units,
        d_class_size_printed: units,
        d_class_size_per_class: units,
    });
    Ok(CountFormulas {
        m,
        l_class_count,
        r_class_count: l_class_count,
        h_class_count,
        j_class_count: mm + 3,
        unit_group_order: units,
        strata,
    })
}

/// Observed class counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "R")]
    pub r: usize,
    #[serde(rename = "H")]
    pub h: usize,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "D")]
    pub d: usize,
}

pub fn class_counts(g: &GreenData) -> ClassCounts {
    ClassCounts {
        l: g.l.num_classes(),
        r: g.r.num_classes(),
        h: g.h.num_classes(),
        j: g.j.num_classes(),
        d: g.d().num_classes(),
    }
}

/// A printed closed form compared with what the enumeration shows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub quantity: String,
    pub rank: Option<usize>,
    pub formula: u128,
    pub observed: Vec<u128>,
    pub agrees: bool,
}

/// Compares every closed form against the enumerated `OR_n`.
///
/// Class sizes are compared per class, so a stratum whose classes all have
/// the formula's size agrees. The printed D-class size at rank `m` counts both
/// type classes together and is reported against the per-class sizes.
pub fn compare_with_formulas(u: &MonoidUniverse, g: &GreenData) -> Result<Vec<Comparison>> {
    if u.family() != Family::OR {
        return Err(Error::domain("closed forms are for the orthogonal rook monoid"));
    }
    let f = class_count_formulas(u.half_degree())?;
    let counts = class_counts(g);
    let mut out = Vec::new();
    let mut push_count = |name: &str, formula: u128, observed: usize| {
        out.push(Comparison {
            quantity: name.to_string(),
            rank: None,
            formula,
            observed: vec![observed as u128],
            agrees: formula == observed as u128,
        });
    };
    push_count("L-class count", f.l_class_count, counts.l);
    push_count("R-class count", f.r_class_count, counts.r);
    push_count("H-class count", f.h_class_count, counts.h);
    push_count("J-class count", f.j_class_count, counts.j);
    push_count("D-class count", f.j_class_count, counts.d);

    let sizes_at = |p: &Partition, rank: usize| -> Vec<u128> {
        let set: BTreeSet<u128> = p
            .classes()
            .iter()
            .filter(|c| u.element(c[0]).rank() == rank)
            .map(|c| c.len() as u128)
            .collect();
        set.into_iter().collect()
    };
    for s in &f.strata {
        for (name, p, formula) in [
            ("L-class size", &g.l, s.l_class_size),
            ("R-class size", &g.r, s.l_class_size),
            ("H-class size", &g.h, s.h_class_size),
            ("D-class size", &g.j, s.d_class_size_printed),
        ] {
            let observed = sizes_at(p, s.rank);
            let agrees = observed == vec![formula];
            out.push(Comparison {
                quantity: name.to_string(),
                rank: Some(s.rank),
                formula,
                observed,
                agrees,
            });
        }
    }
    Ok(out)
}

/// The order between J-classes: `le[a][b]` iff class `a` lies in the ideal
/// generated by class `b`.
///
/// Multiplied out when the universe has a product table, otherwise read off
/// the rank-and-type description.
pub fn j_order(u: &MonoidUniverse, g: &GreenData) -> Vec<Vec<bool>> {
    let classes = &g.j_classes;
    let c = classes.len();
    let mut le = vec![vec![false; c]; c];
    if u.has_table() {
        for b in 0..c {
            let ideal = principal_twosided(u, classes[b].representative);
            for a in 0..c {
                le[a][b] = ideal.contains(&classes[a].representative);
            }
        }
    } else {
        for a in 0..c {
            for b in 0..c {
                le[a][b] = classes[a].key.below_or_equal(&classes[b].key);
            }
        }
    }
    le
}

/// The covering pairs `(lower, upper)` of the J-order.
pub fn j_covers(le: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let c = le.len();
    let mut out = Vec::new();
    for a in 0..c {
        for b in 0..c {
            if a == b || !le[a][b] {
                continue;
            }
            let between = (0..c).any(|x| x != a && x != b && le[a][x] && le[x][b]);
            if !between {
                out.push((a, b));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum IdealKind {
    /// All elements of rank at most `k`.
    #[serde(rename = "I_k")]
    Rank { k: usize },
    /// Lower ranks plus the type-I elements of rank `m`.
    #[serde(rename = "I_m_I")]
    TypeI,
    #[serde(rename = "I_m_II")]
    TypeII,
    /// Both rank-`m` types together with everything below: every non-unit.
    #[serde(rename = "union")]
    Union,
    #[serde(rename = "other")]
    Other,
}

impl std::fmt::Display for IdealKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IdealKind::Rank { k } => write!(f, "I_{k}"),
            IdealKind::TypeI => f.write_str("I_m^I"),
            IdealKind::TypeII => f.write_str("I_m^II"),
            IdealKind::Union => f.write_str("I_m^I ∪ I_m^II"),
            IdealKind::Other => f.write_str("other"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealDescriptor {
    #[serde(flatten)]
    pub kind: IdealKind,
    pub members: Vec<usize>,
    /// Whether the set is one of the ideals listed for the family.
    pub listed: bool,
    pub absorbing: bool,
}

/// Labels a set of elements against the named ideals of the universe's family.
pub fn classify_ideal(u: &MonoidUniverse, members: &BTreeSet<usize>) -> (IdealKind, bool) {
    let n = u.degree();
    let m = u.half_degree();
    let matches = |pred: &dyn Fn(&PartialInjection) -> bool| -> bool {
        (0..u.size()).all(|i| pred(u.element(i)) == members.contains(&i))
    };
    if u.family() == Family::OR {
        for k in (0..m).chain([n]) {
            if matches(&|e| e.rank() <= k) {
                return (IdealKind::Rank { k }, true);
            }
        }
        let typed = |t: MSetType| move |e: &PartialInjection| e.rank() < m || (e.rank() == m && element_type(e) == Some(t));
        if matches(&typed(MSetType::I)) {
            return (IdealKind::TypeI, true);
        }
        if matches(&typed(MSetType::II)) {
            return (IdealKind::TypeII, true);
        }
        if matches(&|e| e.rank() <= m) {
            return (IdealKind::Union, false);
        }
    } else {
        for k in 0..=n {
            if matches(&|e| e.rank() <= k) {
                let listed = k <= m || k == n || u.family() == Family::R;
                return (IdealKind::Rank { k }, listed);
            }
        }
    }
    (IdealKind::Other, false)
}

pub fn is_absorbing(u: &MonoidUniverse, members: &BTreeSet<usize>) -> bool {
    let mut mask = vec![false; u.size()];
    for &i in members {
        mask[i] = true;
    }
    // closure under the generators suffices: every element is a product of them
    let gens = u.translators();
    members
        .iter()
        .all(|&a| gens.iter().all(|&x| mask[u.product(x, a)] && mask[u.product(a, x)]))
}

/// Largest J-poset for which down-sets are enumerated.
const MAX_J_CLASSES: usize = 20;

/// Every nonempty down-closed union of J-classes, each checked for absorption
/// and labelled against the family's named ideals.
pub fn enumerate_ideals(u: &MonoidUniverse, g: &GreenData) -> Result<Vec<IdealDescriptor>> {
    let le = j_order(u, g);
    let c = le.len();
    if c > MAX_J_CLASSES {
        return Err(Error::Budget {
            what: "J-classes",
            requested: c,
            limit: MAX_J_CLASSES,
        });
    }
    let class_members = g.j.classes();
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << c) {
        let inside = |i: usize| mask & (1 << i) != 0;
        let down_closed = (0..c).all(|b| !inside(b) || (0..c).all(|a| !le[a][b] || inside(a)));
        if !down_closed {
            continue;
        }
        let members: BTreeSet<usize> = (0..c)
            .filter(|&i| inside(i))
            .flat_map(|i| class_members[i].iter().copied())
            .collect();
        let absorbing = is_absorbing(u, &members);
        let (kind, listed) = classify_ideal(u, &members);
        out.push(IdealDescriptor {
            kind,
            members: members.into_iter().collect(),
            listed,
            absorbing,
        });
    }
    out.sort_by(|a, b| a.members.len().cmp(&b.members.len()).then_with(|| a.members.cmp(&b.members)));
    Ok(out)
}

/// `τ` with `I(τ) = I(σ)` and `τ(a_i) = σ(a_{μ(i)})`, the domain taken in increasing order.
pub fn apply_mu(sigma: &PartialInjection, mu: &Perm) -> Result<PartialInjection> {
    let pairs = sigma.pairs();
    if mu.degree() != pairs.len() {
        return Err(Error::domain(format!(
            "permutation of degree {} applied to an element of rank {}",
            mu.degree(),
            pairs.len()
        )));
    }
    let out: Vec<(usize, usize)> = (0..pairs.len())
        .map(|i| (pairs[i].0, pairs[mu.apply(i)].1))
        .collect();
    PartialInjection::new(sigma.degree(), &out)
}

/// The maximal subgroup at an idempotent.
#[derive(Clone, Debug)]
pub struct HClassGroup {
    /// Universe indices of the H-class, sorted.
    pub members: Vec<usize>,
    /// The group the H-class is identified with.
    pub group: PermGroup,
    /// For each member (same order), its permutation in `group`.
    pub labels: Vec<Perm>,
}

/// The H-class of an idempotent as a permutation group.
///
/// Below full rank each member `σ` is labelled by the `μ` with
/// `σ = apply_mu(ε, μ)`, i.e. by how it permutes the positions of the
/// domain; the labelling is checked to be a bijective homomorphism onto the
/// symmetric group. At full rank the members are the units themselves.
pub fn h_class_group(u: &MonoidUniverse, g: &GreenData, e: usize) -> Result<HClassGroup> {
    let eps = u.element(e);
    if !eps.is_idempotent() {
        return Err(Error::domain(format!("{eps} is not idempotent")));
    }
    let members = g.h.class_of(e);
    let k = eps.rank();
    let n = u.degree();
    let labels: Vec<Perm> = if k == n {
        members
            .iter()
            .map(|&i| {
                let images: Vec<u8> = (1..=n).map(|p| (u.element(i).apply(p).unwrap() - 1) as u8).collect();
                Perm::new(images)
            })
            .collect::<Result<_>>()?
    } else {
        let dom = eps.domain().to_vec();
        members
            .iter()
            .map(|&i| {
                let s = u.element(i);
                let images: Vec<u8> = dom
                    .iter()
                    .map(|&a| {
                        let t = s.apply(a).expect("same domain");
                        dom.iter().position(|&x| x == t).expect("same image") as u8
                    })
                    .collect();
                Perm::new(images)
            })
            .collect::<Result<_>>()?
    };
    let group = PermGroup::from_elements(labels[0].degree(), labels.clone())?;
    if group.order() != members.len() {
        return Err(Error::invariant("H-class labelling is not injective"));
    }
    // homomorphism: label(ab) = label(a) ∘ label(b)
    for (x, &a) in members.iter().enumerate() {
        for (y, &b) in members.iter().enumerate() {
            let ab = u.product(a, b);
            let pos = members
                .iter()
                .position(|&z| z == ab)
                .ok_or_else(|| Error::invariant("H-class of an idempotent not closed"))?;
            if labels[pos] != labels[x].compose(&labels[y]) {
                return Err(Error::invariant("H-class labelling is not a homomorphism"));
            }
        }
    }
    if k < n && k > 0 && group != PermGroup::symmetric(k) {
        return Err(Error::invariant(format!(
            "H-class at rank {k} is not the full symmetric group"
        )));
    }
    if k == n && !members.iter().all(|&i| in_unit_group(u.family(), u.element(i))) {
        return Err(Error::invariant("full-rank H-class is not the unit group"));
    }
    Ok(HClassGroup {
        members,
        group,
        labels,
    })
}

/// The unit group of the universe as a permutation group of degree `n`.
pub fn unit_group(u: &MonoidUniverse) -> Result<PermGroup> {
    let g = green_partition(u);
    Ok(h_class_group(u, &g, crate::universe::IDENTITY)?.group)
}
