//! Congruences on finite monoids given by a product oracle.
//!
//! A [`Partition`] is a flat class-id vector in canonical form: classes are
//! numbered in order of their smallest element index, so two partitions are
//! the same set partition exactly when their id vectors are equal.

use std::borrow::Cow;
use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// A finite monoid with elements `0..size()`.
pub trait FiniteMonoid: Sync {
    fn size(&self) -> usize;

    fn product(&self, a: usize, b: usize) -> usize;

    /// Elements whose left and right translations generate all translations.
    /// Any generating set works; the default is every element.
    fn translators(&self) -> Cow<'_, [usize]> {
        Cow::Owned((0..self.size()).collect())
    }
}

/// A monoid given by its full multiplication table, row-major.
#[derive(Clone, Debug)]
pub struct CayleyTable {
    size: usize,
    table: Vec<usize>,
}

impl CayleyTable {
    pub fn new(size: usize, table: Vec<usize>) -> Result<Self> {
        if table.len() != size * size || table.iter().any(|&x| x >= size) {
            return Err(Error::domain("multiplication table has the wrong shape"));
        }
        Ok(CayleyTable { size, table })
    }

    pub fn from_monoid<M: FiniteMonoid + ?Sized>(m: &M) -> Self {
        let size = m.size();
        let mut table = Vec::with_capacity(size * size);
        for a in 0..size {
            for b in 0..size {
                table.push(m.product(a, b));
            }
        }
        CayleyTable { size, table }
    }
}

impl FiniteMonoid for CayleyTable {
    fn size(&self) -> usize {
        self.size
    }

    fn product(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b]
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Partition {
    ids: Vec<u32>,
}

impl Partition {
    /// Canonicalizes an arbitrary labelling.
    pub fn from_labels<T: Eq + std::hash::Hash + Clone>(labels: &[T]) -> Self {
        let mut seen: std::collections::HashMap<T, u32> = std::collections::HashMap::new();
        let ids = labels
            .iter()
            .map(|l| {
                let next = seen.len() as u32;
                *seen.entry(l.clone()).or_insert(next)
            })
            .collect();
        Partition { ids }
    }

    /// From explicit classes; every index in `0..size` must appear exactly once.
    pub fn from_classes(size: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut label = vec![usize::MAX; size];
        for (c, class) in classes.iter().enumerate() {
            for &x in class {
                if x >= size || label[x] != usize::MAX {
                    return Err(Error::domain(format!("index {x} missing from range or repeated")));
                }
                label[x] = c;
            }
        }
        if label.contains(&usize::MAX) {
            return Err(Error::domain("classes do not cover every element"));
        }
        Ok(Self::from_labels(&label))
    }

    pub fn identity(size: usize) -> Self {
        Partition {
            ids: (0..size as u32).collect(),
        }
    }

    pub fn universal(size: usize) -> Self {
        Partition { ids: vec![0; size] }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn class_id(&self, i: usize) -> usize {
        self.ids[i] as usize
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.ids[a] == self.ids[b]
    }

    pub fn num_classes(&self) -> usize {
        self.ids.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }

    /// Classes as sorted index lists, ordered by smallest member.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (i, &c) in self.ids.iter().enumerate() {
            out[c as usize].push(i);
        }
        out
    }

    pub fn class_of(&self, i: usize) -> Vec<usize> {
        let c = self.ids[i];
        (0..self.len()).filter(|&j| self.ids[j] == c).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.num_classes() == self.len()
    }

    pub fn is_universal(&self) -> bool {
        self.ids.iter().all(|&c| c == 0)
    }

    /// Every class of `self` lies inside a class of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut image = vec![u32::MAX; self.num_classes()];
        self.ids.iter().zip(&other.ids).all(|(&a, &b)| {
            let slot = &mut image[a as usize];
            if *slot == u32::MAX {
                *slot = b;
            }
            *slot == b
        })
    }

    /// Pairwise intersection of classes.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        check_same(self, other)?;
        let labels: Vec<(u32, u32)> = self.ids.iter().copied().zip(other.ids.iter().copied()).collect();
        Ok(Partition::from_labels(&labels))
    }

    /// Pairs `(a, b)` with `a` the smallest member of its class, enough to regenerate it.
    pub fn spanning_pairs(&self) -> Vec<(usize, usize)> {
        let mut first = vec![usize::MAX; self.num_classes()];
        let mut out = Vec::new();
        for (i, &c) in self.ids.iter().enumerate() {
            let f = &mut first[c as usize];
            if *f == usize::MAX {
                *f = i;
            } else {
                out.push((*f, i));
            }
        }
        out
    }
}

fn check_same(a: &Partition, b: &Partition) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "partitions over different universes ({} vs {} elements)",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// A related pair and a multiplier that separates it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub a: usize,
    pub b: usize,
    pub multiplier: usize,
    pub left: bool,
}

/// First witness that `p` is not compatible with multiplication, checking
/// every element as a multiplier on both sides.
pub fn find_violation<M: FiniteMonoid + ?Sized>(monoid: &M, p: &Partition) -> Option<Violation> {
    let size = monoid.size();
    assert_eq!(p.len(), size, "partition over a different monoid");
    // comparing each element with its class leader covers every related pair
    let mut leader = vec![usize::MAX; p.num_classes()];
    for a in 0..size {
        let c = p.class_id(a);
        if leader[c] == usize::MAX {
            leader[c] = a;
            continue;
        }
        let r = leader[c];
        for x in 0..size {
            if !p.related(monoid.product(x, a), monoid.product(x, r)) {
                return Some(Violation { a: r, b: a, multiplier: x, left: true });
            }
            if !p.related(monoid.product(a, x), monoid.product(r, x)) {
                return Some(Violation { a: r, b: a, multiplier: x, left: false });
            }
        }
    }
    None
}

pub fn is_congruence<M: FiniteMonoid + ?Sized>(monoid: &M, p: &Partition) -> bool {
    find_violation(monoid, p).is_none()
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    /// Returns false if already joined. The smaller root wins.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo as u32;
        true
    }

    fn into_partition(mut self) -> Partition {
        let roots: Vec<usize> = (0..self.parent.len()).map(|i| self.find(i)).collect();
        Partition::from_labels(&roots)
    }
}

/// The least congruence containing `pairs`.
///
/// Union-find seeded with the pairs; every pair that causes a merge is queued
/// and its translates by each translator are merged in turn, to a fixpoint.
pub fn congruence_closure<M: FiniteMonoid + ?Sized>(
    monoid: &M,
    pairs: &[(usize, usize)],
) -> Result<Partition> {
    let size = monoid.size();
    if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a >= size || b >= size) {
        return Err(Error::domain(format!("pair ({a},{b}) outside 0..{size}")));
    }
    Ok(closure_unchecked(monoid, &monoid.translators(), pairs))
}

fn closure_unchecked<M: FiniteMonoid + ?Sized>(
    monoid: &M,
    translators: &[usize],
    pairs: &[(usize, usize)],
) -> Partition {
    let mut uf = UnionFind::new(monoid.size());
    let mut work: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a, b) {
            work.push((a, b));
        }
    }
    while let Some((a, b)) = work.pop() {
        for &g in translators {
            let (l1, l2) = (monoid.product(g, a), monoid.product(g, b));
            if uf.union(l1, l2) {
                work.push((l1, l2));
            }
            let (r1, r2) = (monoid.product(a, g), monoid.product(b, g));
            if uf.union(r1, r2) {
                work.push((r1, r2));
            }
        }
    }
    uf.into_partition()
}

/// Least congruence containing both.
pub fn join<M: FiniteMonoid + ?Sized>(monoid: &M, p1: &Partition, p2: &Partition) -> Result<Partition> {
    check_same(p1, p2)?;
    if p1.len() != monoid.size() {
        return Err(Error::domain("partition over a different monoid"));
    }
    let mut pairs = p1.spanning_pairs();
    pairs.extend(p2.spanning_pairs());
    Ok(closure_unchecked(monoid, &monoid.translators(), &pairs))
}

/// Canonical lattice order: coarser last, ties broken by id vector.
fn lattice_order(a: &Partition, b: &Partition) -> std::cmp::Ordering {
    b.num_classes().cmp(&a.num_classes()).then_with(|| a.ids.cmp(&b.ids))
}

/// Every congruence of `monoid`, finest first.
///
/// Principal congruences `Cg(a, b)` are generated in parallel, deduplicated,
/// then closed under pairwise joins. The result does not depend on the
/// number of worker threads.
pub fn congruence_lattice<M: FiniteMonoid + ?Sized>(monoid: &M, limit: usize) -> Result<Vec<Partition>> {
    let size = monoid.size();
    if size > limit {
        return Err(Error::Budget {
            what: "lattice universe size",
            requested: size,
            limit,
        });
    }
    let translators = monoid.translators();
    let principals: HashSet<Partition> = (0..size)
        .into_par_iter()
        .fold(HashSet::new, |mut acc, a| {
            for b in a + 1..size {
                acc.insert(closure_unchecked(monoid, &translators, &[(a, b)]));
            }
            acc
        })
        .reduce(HashSet::new, |mut x, y| {
            x.extend(y);
            x
        });

    let mut members: Vec<Partition> = principals.into_iter().collect();
    members.sort_by(lattice_order);
    let mut known: HashSet<Partition> = members.iter().cloned().collect();
    for p in [Partition::identity(size), Partition::universal(size)] {
        if known.insert(p.clone()) {
            members.push(p);
        }
    }

    let mut next = 0;
    while next < members.len() {
        let fresh = &members[next];
        let mut joined: Vec<Partition> = members[..next]
            .par_iter()
            .map(|other| {
                let mut pairs = fresh.spanning_pairs();
                pairs.extend(other.spanning_pairs());
                closure_unchecked(monoid, &translators, &pairs)
            })
            .collect();
        joined.sort_by(lattice_order);
        for p in joined {
            if known.insert(p.clone()) {
                members.push(p);
            }
        }
        next += 1;
    }
    members.sort_by(lattice_order);
    Ok(members)
}

/// Largest monoid the all-set-partitions filter accepts.
pub const NAIVE_LIMIT: usize = 10;

/// Every congruence, found by testing every set partition of the elements.
pub fn naive_congruences<M: FiniteMonoid + ?Sized>(monoid: &M) -> Result<Vec<Partition>> {
    let size = monoid.size();
    if size > NAIVE_LIMIT {
        return Err(Error::Budget {
            what: "naive filter universe size",
            requested: size,
            limit: NAIVE_LIMIT,
        });
    }
    let mut out = Vec::new();
    if size == 0 {
        return Ok(out);
    }
    // restricted growth strings
    let mut rgs = vec![0u32; size];
    let mut max = vec![0u32; size];
    loop {
        let p = Partition { ids: rgs.clone() };
        if is_congruence(monoid, &p) {
            out.push(p);
        }
        let mut i = size - 1;
        loop {
            if i == 0 {
                out.sort_by(lattice_order);
                return Ok(out);
            }
            if rgs[i] <= max[i - 1] {
                rgs[i] += 1;
                let top = max[i - 1].max(rgs[i]);
                max[i] = top;
                for j in i + 1..size {
                    rgs[j] = 0;
                    max[j] = top;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// `{"universe":{"family","n"},"classes":[[...],...]}`
#[derive(Serialize, Debug, Clone)]
pub struct PartitionJson<U: Serialize> {
    pub universe: U,
    pub classes: Vec<Vec<usize>>,
}
