//! Small permutation groups and their normal subgroups.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A permutation of `{0..k}` stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(k: usize) -> Self {
        Perm((0..k as u8).collect())
    }

    /// From 0-based images; rejects non-bijections.
    pub fn new(images: Vec<u8>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            let x = x as usize;
            if x >= k || seen[x] {
                return Err(Error::domain(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// From 1-based images, the way permutations are written in two-line notation.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let raw: Option<Vec<u8>> = images
            .iter()
            .map(|&x| x.checked_sub(1).map(|v| v as u8))
            .collect();
        raw.ok_or_else(|| Error::domain("point 0 in a 1-based permutation"))
            .and_then(Perm::new)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), rhs.degree());
        Perm(rhs.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0u8; self.degree()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x as usize] = i as u8;
        }
        Perm(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one: Vec<usize> = self.0.iter().map(|&x| x as usize + 1).collect();
        write!(f, "{one:?}")
    }
}

/// All permutations of `{0..k}` in lexicographic order.
pub fn all_permutations(k: usize) -> Vec<Perm> {
    let mut cur: Vec<u8> = (0..k as u8).collect();
    let mut out = vec![Perm(cur.clone())];
    // standard next-permutation
    loop {
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(Perm(cur.clone()));
    }
}

/// A finite permutation group, elements kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Perm>,
}

pub const DEFAULT_GROUP_BOUND: usize = 10_000;

impl PermGroup {
    /// Wraps an element list after checking identity, closure and inverses.
    pub fn from_elements(degree: usize, elements: impl IntoIterator<Item = Perm>) -> Result<Self> {
        let set: BTreeSet<Perm> = elements.into_iter().collect();
        if set.iter().any(|p| p.degree() != degree) {
            return Err(Error::domain("permutations of mixed degree"));
        }
        if !set.contains(&Perm::identity(degree)) {
            return Err(Error::domain("element set lacks the identity"));
        }
        for a in &set {
            if !set.contains(&a.inverse()) {
                return Err(Error::domain(format!("inverse of {a:?} missing")));
            }
            for b in &set {
                if !set.contains(&a.compose(b)) {
                    return Err(Error::domain(format!("{a:?}∘{b:?} missing")));
                }
            }
        }
        Ok(PermGroup {
            degree,
            elements: set.into_iter().collect(),
        })
    }

    /// The subgroup generated by `gens`, refusing to grow past `bound` elements.
    pub fn generated(degree: usize, gens: &[Perm], bound: usize) -> Result<Self> {
        let mut seen: HashSet<Perm> = HashSet::new();
        let id = Perm::identity(degree);
        seen.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(p) = frontier.pop() {
            for g in gens {
                let q = g.compose(&p);
                if seen.insert(q.clone()) {
                    if seen.len() > bound {
                        return Err(Error::Budget {
                            what: "group order",
                            requested: seen.len(),
                            limit: bound,
                        });
                    }
                    frontier.push(q);
                }
            }
        }
        let mut elements: Vec<Perm> = seen.into_iter().collect();
        elements.sort();
        Ok(PermGroup { degree, elements })
    }

    pub fn symmetric(k: usize) -> Self {
        PermGroup {
            degree: k,
            elements: all_permutations(k),
        }
    }

    pub fn trivial(k: usize) -> Self {
        PermGroup {
            degree: k,
            elements: vec![Perm::identity(k)],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|p| other.contains(p))
    }

    /// Subgroup of `parent` invariant under conjugation by every parent element.
    pub fn is_normal_in(&self, parent: &PermGroup) -> bool {
        self.is_subgroup_of(parent)
            && parent.elements.iter().all(|g| {
                let gi = g.inverse();
                self.elements
                    .iter()
                    .all(|h| self.contains(&g.compose(h).compose(&gi)))
            })
    }

    /// Conjugacy classes; the identity's class comes first, then by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut class_of = vec![usize::MAX; self.order()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.order() {
            if class_of[i] != usize::MAX {
                continue;
            }
            let x = &self.elements[i];
            let mut members = BTreeSet::new();
            for g in &self.elements {
                let c = g.compose(x).compose(&g.inverse());
                members.insert(self.elements.binary_search(&c).expect("closed"));
            }
            for &j in &members {
                class_of[j] = classes.len();
            }
            classes.push(members.into_iter().collect());
        }
        let id = self
            .elements
            .binary_search(&Perm::identity(self.degree))
            .expect("identity present");
        classes.sort_by_key(|c| (c[0] != id, c[0]));
        classes
    }
}

/// Normal subgroups of a parent group, smallest order first.
#[derive(Clone, Debug)]
pub struct NormalSubgroupList {
    pub parent: PermGroup,
    pub subgroups: Vec<PermGroup>,
}

/// Names a normal subgroup by its position in a [`NormalSubgroupList`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NormalRef {
    pub parent: String,
    pub index: usize,
    pub order: usize,
}

impl fmt::Display for NormalRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}⊴{}(|N|={})", self.index, self.parent, self.order)
    }
}

/// Every normal subgroup of `g`, found as unions of conjugacy classes that
/// contain the identity class and are closed under products.
pub fn normal_subgroups(g: &PermGroup, bound: usize) -> Result<NormalSubgroupList> {
    if g.order() > bound {
        return Err(Error::Budget {
            what: "group order",
            requested: g.order(),
            limit: bound,
        });
    }
    let classes = g.conjugacy_classes();
    let rest = &classes[1..];
    if rest.len() > 24 {
        return Err(Error::Budget {
            what: "conjugacy classes",
            requested: classes.len(),
            limit: 25,
        });
    }
    let order = g.order();
    let mut found: Vec<PermGroup> = Vec::new();
    for mask in 0u32..(1u32 << rest.len()) {
        let size: usize = 1 + (0..rest.len())
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| rest[i].len())
            .sum::<usize>();
        // Lagrange
        if order % size != 0 {
            continue;
        }
        let mut member = vec![false; order];
        member[classes[0][0]] = true;
        for (i, class) in rest.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for &j in class {
                    member[j] = true;
                }
            }
        }
        let idx: Vec<usize> = (0..order).filter(|&i| member[i]).collect();
        // finite, so product-closed implies subgroup
        let closed = idx.iter().all(|&a| {
            idx.iter().all(|&b| {
                let c = g.elements[a].compose(&g.elements[b]);
                member[g.elements.binary_search(&c).expect("closed")]
            })
        });
        if closed {
            found.push(PermGroup {
                degree: g.degree,
                elements: idx.iter().map(|&i| g.elements[i].clone()).collect(),
            });
        }
    }
    found.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    Ok(NormalSubgroupList {
        parent: g.clone(),
        subgroups: found,
    })
}
