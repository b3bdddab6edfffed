//! Enumerated rook monoids with indexed elements and a product oracle.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::congruence::FiniteMonoid;
use crate::error::{Error, Result};
use crate::group::all_permutations;
use crate::rook::{
    admissible_subsets, in_unit_group, is_member, Family, PartialInjection, PointSet, MAX_DEGREE,
};

/// Resource limits for enumeration and the heavier computations on top of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest degree a universe may be built for.
    pub max_degree: usize,
    /// Largest universe size (checked against the closed-form count before enumerating).
    pub max_elements: usize,
    /// Degrees up to this one get exhaustive product-closure verification on construction.
    pub closure_check_degree: usize,
    /// Largest universe for which the full congruence lattice is computed.
    pub lattice_elements: usize,
    pub group_order: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_degree: 8,
            max_elements: 20_000,
            closure_check_degree: 4,
            lattice_elements: 600,
            group_order: crate::group::DEFAULT_GROUP_BOUND,
        }
    }
}

impl Budget {
    /// No limits beyond what the element encoding supports.
    pub fn unlimited() -> Self {
        Budget {
            max_degree: MAX_DEGREE,
            max_elements: usize::MAX,
            closure_check_degree: 4,
            lattice_elements: usize::MAX,
            group_order: usize::MAX,
        }
    }
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn factorial(n: u128) -> u128 {
    (1..=n).product()
}

/// Closed-form size of `family` at degree `n`, summed over rank strata.
pub fn expected_size(family: Family, n: usize) -> u128 {
    let n = n as u128;
    let m = n / 2;
    match family {
        Family::R => (0..=n).map(|k| binom(n, k).pow(2) * factorial(k)).sum(),
        Family::SR => {
            let lower: u128 = (0..=m)
                .map(|k| (binom(m, k) << k).pow(2) * factorial(k))
                .sum();
            lower + (1u128 << m) * factorial(m)
        }
        Family::OR => {
            let lower: u128 = (0..m)
                .map(|k| (binom(m, k) << k).pow(2) * factorial(k))
                .sum();
            lower + (1u128 << (2 * m - 1)) * factorial(m) + (1u128 << (m - 1)) * factorial(m)
        }
    }
}

/// Products are tabulated for universes up to this size.
const TABLE_LIMIT: usize = 4096;

/// An enumerated finite monoid `R_n`, `SR_n` or `OR_n`.
///
/// Index 0 is the zero map and index 1 the identity; the remaining elements
/// follow the canonical element order. Immutable once built.
pub struct MonoidUniverse {
    family: Family,
    n: usize,
    elements: Vec<PartialInjection>,
    index: HashMap<PartialInjection, u32>,
    table: Option<Vec<u16>>,
    generators: OnceLock<Vec<usize>>,
}

pub const ZERO: usize = 0;
pub const IDENTITY: usize = 1;

impl MonoidUniverse {
    pub fn enumerate(family: Family, n: usize) -> Result<Self> {
        Self::enumerate_with(family, n, &Budget::default())
    }

    pub fn enumerate_with(family: Family, n: usize, budget: &Budget) -> Result<Self> {
        if n == 0 || n % 2 != 0 || n > MAX_DEGREE {
            return Err(Error::domain(format!(
                "degree must be even and in 2..={MAX_DEGREE}, got {n}"
            )));
        }
        if n > budget.max_degree {
            return Err(Error::Budget {
                what: "degree",
                requested: n,
                limit: budget.max_degree,
            });
        }
        let expected = expected_size(family, n);
        if expected > budget.max_elements as u128 {
            return Err(Error::Budget {
                what: "universe size",
                requested: expected.min(usize::MAX as u128) as usize,
                limit: budget.max_elements,
            });
        }

        let mut elements = match family {
            Family::R => enumerate_all(n),
            Family::SR | Family::OR => enumerate_admissible(family, n)?,
        };
        elements.sort();
        elements.dedup();
        if elements.len() as u128 != expected {
            return Err(Error::invariant(format!(
                "{family}_{n}: enumerated {} elements, closed form gives {expected}",
                elements.len()
            )));
        }
        if let Some(bad) = elements.iter().find(|e| !is_member(family, e)) {
            return Err(Error::invariant(format!("{bad} is not in {family}_{n}")));
        }

        // zero already sorts first; move the identity to index 1
        let id = PartialInjection::identity(n);
        let pos = elements.iter().position(|e| *e == id).expect("identity enumerated");
        let id = elements.remove(pos);
        elements.insert(IDENTITY, id);

        let index: HashMap<PartialInjection, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, i as u32))
            .collect();
        let mut universe = MonoidUniverse {
            family,
            n,
            elements,
            index,
            table: None,
            generators: OnceLock::new(),
        };
        if universe.size() <= TABLE_LIMIT {
            universe.table = Some(universe.build_table()?);
        } else if n <= budget.closure_check_degree {
            universe.verify_closure()?;
        }
        Ok(universe)
    }

    fn build_table(&self) -> Result<Vec<u16>> {
        let size = self.size();
        let mut table = Vec::with_capacity(size * size);
        for a in &self.elements {
            for b in &self.elements {
                let c = a.compose_unchecked(b);
                match self.index.get(&c) {
                    Some(&i) => table.push(i as u16),
                    None => {
                        return Err(Error::invariant(format!(
                            "{}_{}: product {a} · {b} = {c} leaves the monoid",
                            self.family, self.n
                        )))
                    }
                }
            }
        }
        Ok(table)
    }

    fn verify_closure(&self) -> Result<()> {
        for a in &self.elements {
            for b in &self.elements {
                let c = a.compose_unchecked(b);
                if !self.index.contains_key(&c) {
                    return Err(Error::invariant(format!("product {a} · {b} leaves the monoid")));
                }
            }
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn half_degree(&self) -> usize {
        self.n / 2
    }

    pub fn elements(&self) -> &[PartialInjection] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &PartialInjection {
        &self.elements[i]
    }

    pub fn index_of(&self, e: &PartialInjection) -> Option<usize> {
        self.index.get(e).map(|&i| i as usize)
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    /// Element counts per rank, indexed by rank.
    pub fn rank_strata(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n + 1];
        for e in &self.elements {
            counts[e.rank()] += 1;
        }
        counts
    }

    /// A small generating set, built greedily from the highest ranks down.
    pub fn generators(&self) -> &[usize] {
        self.generators.get_or_init(|| self.greedy_generators())
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let size = self.size();
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(self.elements[i].rank()), i));
        let mut gens = Vec::new();
        let mut in_sub = self.submonoid(&gens);
        for cand in order {
            if in_sub[cand] {
                continue;
            }
            gens.push(cand);
            in_sub = self.submonoid(&gens);
            if in_sub.iter().all(|&b| b) {
                break;
            }
        }
        gens.sort_unstable();
        gens
    }

    /// Membership mask of the submonoid generated by `gens`.
    fn submonoid(&self, gens: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.size()];
        seen[IDENTITY] = true;
        let mut stack = vec![IDENTITY];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.product(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    pub fn to_json(&self) -> UniverseJson {
        UniverseJson {
            family: self.family,
            n: self.n,
            elements: self.elements.clone(),
        }
    }
}

impl FiniteMonoid for MonoidUniverse {
    fn size(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    fn product(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.elements.len() + b] as usize,
            None => {
                let c = self.elements[a].compose_unchecked(&self.elements[b]);
                self.index[&c] as usize
            }
        }
    }

    fn translators(&self) -> std::borrow::Cow<'_, [usize]> {
        std::borrow::Cow::Borrowed(self.generators())
    }
}

impl std::fmt::Debug for MonoidUniverse {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}_{} ({} elements)", self.family, self.n, self.elements.len())
    }
}

/// `{"family":"OR","n":4,"elements":[...]}`
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct UniverseJson {
    pub family: Family,
    pub n: usize,
    pub elements: Vec<PartialInjection>,
}

fn enumerate_all(n: usize) -> Vec<PartialInjection> {
    let mut out = Vec::new();
    let subsets: Vec<Vec<usize>> = (0u32..(1 << n))
        .map(|bits| (1..=n).filter(|p| bits & (1 << (p - 1)) != 0).collect())
        .collect();
    for dom in &subsets {
        for img in subsets.iter().filter(|s| s.len() == dom.len()) {
            push_bijections(n, dom, img, &mut out);
        }
    }
    out
}

fn push_bijections(n: usize, dom: &[usize], img: &[usize], out: &mut Vec<PartialInjection>) {
    for p in all_permutations(dom.len()) {
        let pairs: Vec<(usize, usize)> = dom
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, img[p.apply(i)]))
            .collect();
        out.push(PartialInjection::new(n, &pairs).expect("valid bijection"));
    }
}

fn enumerate_admissible(family: Family, n: usize) -> Result<Vec<PartialInjection>> {
    let m = n / 2;
    let mut out = Vec::new();
    for k in 0..=m {
        let sets = admissible_subsets(n, k)?;
        for a in &sets {
            for b in &sets {
                if family == Family::OR
                    && k == m
                    && crate::rook::upper_parity(a.set()) != crate::rook::upper_parity(b.set())
                {
                    continue;
                }
                push_bijections(n, &a.set().to_vec(), &b.set().to_vec(), &mut out);
            }
        }
    }
    let full: Vec<usize> = PointSet::full(n).to_vec();
    for p in all_permutations(n) {
        let images: Vec<usize> = full.iter().map(|&i| p.apply(i - 1) + 1).collect();
        let sigma = PartialInjection::from_images(&images)?;
        if in_unit_group(family, &sigma) {
            out.push(sigma);
        }
    }
    Ok(out)
}
