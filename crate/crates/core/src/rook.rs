//! Partial injections of `{1..n}`, admissible sets, and membership in the
//! rook monoid families `R_n`, `SR_n` and `OR_n`.
//!
//! Points are 1-based in every public signature. Internally a point `i` is
//! bit `i - 1` of a `u16`, which caps the degree at [`MAX_DEGREE`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 16;

const UNDEF: u8 = u8::MAX;

pub(crate) fn check_degree(n: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 || n > MAX_DEGREE {
        return Err(Error::domain(format!(
            "degree must be even and in 2..={MAX_DEGREE}, got {n}"
        )));
    }
    Ok(())
}

fn low_mask(n: usize) -> u16 {
    if n >= 16 {
        u16::MAX
    } else {
        (1u16 << n) - 1
    }
}

/// The involution `i -> n + 1 - i`.
pub fn theta(n: usize, i: usize) -> Result<usize> {
    check_degree(n)?;
    if i == 0 || i > n {
        return Err(Error::domain(format!("point {i} outside 1..={n}")));
    }
    Ok(n + 1 - i)
}

/// Bitmask image of a set under `theta`: bit `j` goes to bit `n - 1 - j`.
fn theta_bits(n: usize, bits: u16) -> u16 {
    let rev = bits.reverse_bits();
    rev >> (16 - n)
}

/// A subset of `{1..n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PointSet {
    n: u8,
    bits: u16,
}

impl PointSet {
    pub fn new(n: usize, points: &[usize]) -> Result<Self> {
        check_degree(n)?;
        let mut bits = 0u16;
        for &p in points {
            if p == 0 || p > n {
                return Err(Error::domain(format!("point {p} outside 1..={n}")));
            }
            bits |= 1 << (p - 1);
        }
        Ok(PointSet { n: n as u8, bits })
    }

    pub(crate) fn from_bits(n: usize, bits: u16) -> Self {
        debug_assert_eq!(bits & !low_mask(n), 0);
        PointSet { n: n as u8, bits }
    }

    pub fn empty(n: usize) -> Self {
        PointSet { n: n as u8, bits: 0 }
    }

    pub fn full(n: usize) -> Self {
        PointSet {
            n: n as u8,
            bits: low_mask(n),
        }
    }

    pub fn degree(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u16 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, p: usize) -> bool {
        p >= 1 && p <= self.degree() && self.bits & (1 << (p - 1)) != 0
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.bits & !other.bits == 0
    }

    /// Points in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.degree())
            .filter(move |&j| self.bits & (1 << j) != 0)
            .map(|j| j + 1)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn theta_image(&self) -> PointSet {
        PointSet {
            n: self.n,
            bits: theta_bits(self.degree(), self.bits),
        }
    }

    /// Number of points strictly greater than `m = n / 2`.
    pub fn count_upper(&self) -> usize {
        let m = self.degree() / 2;
        (self.bits >> m).count_ones() as usize
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", pts.join(","))
    }
}

fn admissible_bits(n: usize, bits: u16) -> bool {
    bits == 0 || bits == low_mask(n) || bits & theta_bits(n, bits) == 0
}

/// `A` is admissible when it is empty, the whole of `{1..n}`, or disjoint from `theta(A)`.
pub fn is_admissible(set: &PointSet) -> bool {
    admissible_bits(set.degree(), set.bits)
}

/// An admissible subset of `{1..n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct AdmissibleSet(PointSet);

impl AdmissibleSet {
    pub fn new(set: PointSet) -> Result<Self> {
        if !is_admissible(&set) {
            return Err(Error::domain(format!("{set} is not admissible")));
        }
        Ok(AdmissibleSet(set))
    }

    pub fn from_points(n: usize, points: &[usize]) -> Result<Self> {
        Self::new(PointSet::new(n, points)?)
    }

    pub fn set(&self) -> &PointSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for AdmissibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// All admissible `k`-subsets of `{1..n}`, in lexicographic order of their sorted tuples.
///
/// Produced by filtering every `k`-subset, so the `C(m,k) 2^k` count is a
/// checkable consequence rather than a construction.
pub fn admissible_subsets(n: usize, k: usize) -> Result<Vec<AdmissibleSet>> {
    check_degree(n)?;
    if k > n {
        return Err(Error::domain(format!("cardinality {k} exceeds degree {n}")));
    }
    let mut out = Vec::new();
    for_each_combination(n, k, |pts| {
        let set = PointSet::new(n, pts).expect("points in range");
        if is_admissible(&set) {
            out.push(AdmissibleSet(set));
        }
    });
    Ok(out)
}

/// Every admissible subset of every cardinality, smallest first.
pub fn all_admissible_subsets(n: usize) -> Result<Vec<AdmissibleSet>> {
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend(admissible_subsets(n, k)?);
    }
    Ok(out)
}

/// Calls `f` with each `k`-subset of `{1..n}` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (1..=k).collect();
    loop {
        f(&idx);
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - (k - 1 - i) {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return;
            }
        }
    }
}

/// Type of an admissible `m`-subset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MSetType {
    I,
    II,
}

impl fmt::Display for MSetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MSetType::I => f.write_str("I"),
            MSetType::II => f.write_str("II"),
        }
    }
}

/// Type I when an even number of points exceed `m`, type II otherwise.
pub fn type_of(set: &AdmissibleSet) -> Result<MSetType> {
    let n = set.0.degree();
    if set.len() != n / 2 {
        return Err(Error::domain(format!(
            "type is only defined for admissible {}-subsets, got {}",
            n / 2,
            set
        )));
    }
    Ok(upper_parity(&set.0))
}

/// The parity rule behind [`type_of`], applied to a set of any size.
pub fn upper_parity(set: &PointSet) -> MSetType {
    if set.count_upper() % 2 == 0 {
        MSetType::I
    } else {
        MSetType::II
    }
}

/// An injective partial map of `{1..n}` into itself.
///
/// Stored as a fixed array of images (with an undefined marker) plus cached
/// domain and image bitsets.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartialInjection {
    n: u8,
    map: [u8; MAX_DEGREE],
    dom: u16,
    img: u16,
}

impl PartialInjection {
    /// Builds a map from 1-based `(source, target)` pairs.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        check_degree(n)?;
        let mut map = [UNDEF; MAX_DEGREE];
        let mut dom = 0u16;
        let mut img = 0u16;
        for &(s, t) in pairs {
            if s == 0 || s > n || t == 0 || t > n {
                return Err(Error::domain(format!("pair ({s},{t}) outside 1..={n}")));
            }
            if dom & (1 << (s - 1)) != 0 {
                return Err(Error::domain(format!("source {s} assigned twice")));
            }
            if img & (1 << (t - 1)) != 0 {
                return Err(Error::domain(format!("target {t} hit twice")));
            }
            map[s - 1] = (t - 1) as u8;
            dom |= 1 << (s - 1);
            img |= 1 << (t - 1);
        }
        Ok(PartialInjection {
            n: n as u8,
            map,
            dom,
            img,
        })
    }

    /// A full permutation given by its 1-based image list.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = images.iter().enumerate().map(|(i, &t)| (i + 1, t)).collect();
        Self::new(images.len(), &pairs)
    }

    pub fn identity(n: usize) -> Self {
        Self::restricted_identity(&PointSet::full(n))
    }

    pub fn zero(n: usize) -> Self {
        PartialInjection {
            n: n as u8,
            map: [UNDEF; MAX_DEGREE],
            dom: 0,
            img: 0,
        }
    }

    pub(crate) fn restricted_identity(set: &PointSet) -> Self {
        let mut map = [UNDEF; MAX_DEGREE];
        for p in set.iter() {
            map[p - 1] = (p - 1) as u8;
        }
        PartialInjection {
            n: set.n,
            map,
            dom: set.bits,
            img: set.bits,
        }
    }

    pub fn degree(&self) -> usize {
        self.n as usize
    }

    pub fn rank(&self) -> usize {
        self.dom.count_ones() as usize
    }

    pub fn domain(&self) -> PointSet {
        PointSet::from_bits(self.degree(), self.dom)
    }

    pub fn image(&self) -> PointSet {
        PointSet::from_bits(self.degree(), self.img)
    }

    pub fn apply(&self, i: usize) -> Option<usize> {
        if i == 0 || i > self.degree() {
            return None;
        }
        match self.map[i - 1] {
            UNDEF => None,
            t => Some(t as usize + 1),
        }
    }

    /// `(source, target)` pairs sorted by source.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.domain()
            .iter()
            .map(|s| (s, self.map[s - 1] as usize + 1))
            .collect()
    }

    /// Images of the domain points taken in increasing order.
    pub fn image_word(&self) -> Vec<usize> {
        self.pairs().into_iter().map(|(_, t)| t).collect()
    }

    /// `self ∘ rhs`: apply `rhs` first, then `self`.
    pub fn compose(&self, rhs: &PartialInjection) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::domain(format!(
                "degree mismatch: {} vs {}",
                self.n, rhs.n
            )));
        }
        Ok(self.compose_unchecked(rhs))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, rhs: &PartialInjection) -> Self {
        let mut map = [UNDEF; MAX_DEGREE];
        let mut dom = 0u16;
        let mut img = 0u16;
        let mut bits = rhs.dom;
        while bits != 0 {
            let x = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let y = rhs.map[x];
            let z = self.map[y as usize];
            if z != UNDEF {
                map[x] = z;
                dom |= 1 << x;
                img |= 1 << z;
            }
        }
        PartialInjection {
            n: self.n,
            map,
            dom,
            img,
        }
    }

    pub fn invert(&self) -> Self {
        let mut map = [UNDEF; MAX_DEGREE];
        let mut bits = self.dom;
        while bits != 0 {
            let x = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            map[self.map[x] as usize] = x as u8;
        }
        PartialInjection {
            n: self.n,
            map,
            dom: self.img,
            img: self.dom,
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.compose_unchecked(self) == *self
    }

    /// Image of an arbitrary point set; points outside the domain are dropped.
    pub fn image_of(&self, set: &PointSet) -> PointSet {
        let mut bits = 0u16;
        for p in set.iter() {
            if let Some(t) = self.apply(p) {
                bits |= 1 << (t - 1);
            }
        }
        PointSet::from_bits(self.degree(), bits)
    }

    /// Two-line notation: `"a1 a2 ... / b1 b2 ..."`, domain ascending.
    pub fn two_line(&self) -> String {
        let pairs = self.pairs();
        let top: Vec<String> = pairs.iter().map(|(s, _)| s.to_string()).collect();
        let bot: Vec<String> = pairs.iter().map(|(_, t)| t.to_string()).collect();
        format!("{} / {}", top.join(" "), bot.join(" "))
    }

    /// Parses two-line notation at degree `n`. The empty map is `"/"`.
    pub fn parse_two_line(n: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        let (top, bot) = text
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected 'top / bottom', got {text:?}")))?;
        let parse_row = |row: &str| -> Result<Vec<usize>> {
            row.split_whitespace()
                .map(|w| {
                    w.parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad point {w:?}: {e}")))
                })
                .collect()
        };
        let top = parse_row(top)?;
        let bot = parse_row(bot)?;
        if top.len() != bot.len() {
            return Err(Error::Parse(format!(
                "rows differ in length: {} vs {}",
                top.len(),
                bot.len()
            )));
        }
        let pairs: Vec<(usize, usize)> = top.into_iter().zip(bot).collect();
        Self::new(n, &pairs)
    }

    fn domain_list(&self) -> [u8; MAX_DEGREE] {
        let mut out = [UNDEF; MAX_DEGREE];
        for (slot, p) in out.iter_mut().zip(self.domain().iter()) {
            *slot = p as u8;
        }
        out
    }

    fn image_list(&self) -> [u8; MAX_DEGREE] {
        let mut out = [UNDEF; MAX_DEGREE];
        for (slot, (_, t)) in out.iter_mut().zip(self.pairs()) {
            *slot = t as u8;
        }
        out
    }
}

/// Canonical element order: rank, then the sorted domain, then the images in domain order.
impl Ord for PartialInjection {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.rank().cmp(&other.rank()))
            .then_with(|| self.domain_list().cmp(&other.domain_list()))
            .then_with(|| self.image_list().cmp(&other.image_list()))
    }
}

impl PartialOrd for PartialInjection {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.two_line())
    }
}

impl fmt::Display for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.two_line())
    }
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    n: usize,
    map: Vec<(usize, usize)>,
}

impl Serialize for PartialInjection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson {
            n: self.degree(),
            map: self.pairs(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialInjection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ElementJson::deserialize(d)?;
        PartialInjection::new(raw.n, &raw.map).map_err(serde::de::Error::custom)
    }
}

/// The idempotent acting as the identity on `A`.
pub fn idempotent_of(set: &AdmissibleSet) -> PartialInjection {
    PartialInjection::restricted_identity(&set.0)
}

/// Which rook monoid an element or universe belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    R,
    SR,
    OR,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::R => "R",
            Family::SR => "SR",
            Family::OR => "OR",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "r" => Ok(Family::R),
            "sr" => Ok(Family::SR),
            "or" => Ok(Family::OR),
            _ => Err(Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

/// Membership in `W` (for `SR`) or `W'` (for `OR`); for `R` any permutation.
pub fn in_unit_group(family: Family, sigma: &PartialInjection) -> bool {
    let n = sigma.degree();
    if sigma.rank() != n {
        return false;
    }
    if family == Family::R {
        return true;
    }
    let commutes = (1..=n).all(|i| sigma.apply(n + 1 - i) == sigma.apply(i).map(|t| n + 1 - t));
    if !commutes {
        return false;
    }
    match family {
        Family::OR => {
            let m = n / 2;
            let lower = PointSet::from_bits(n, low_mask(m));
            sigma.image_of(&lower).count_upper() % 2 == 0
        }
        _ => true,
    }
}

/// Whether a rank-`n` map sends every admissible set to an admissible set.
///
/// Exponential in `n`; exists to cross-check the commuting-with-theta test.
pub fn preserves_admissibility(sigma: &PartialInjection) -> bool {
    let n = sigma.degree();
    sigma.rank() == n
        && all_admissible_subsets(n)
            .expect("valid degree")
            .iter()
            .all(|a| is_admissible(&sigma.image_of(a.set())))
}

pub fn is_member(family: Family, sigma: &PartialInjection) -> bool {
    let n = sigma.degree();
    let m = n / 2;
    let rank = sigma.rank();
    match family {
        Family::R => true,
        Family::SR => {
            if rank == n {
                in_unit_group(Family::SR, sigma)
            } else {
                admissible_bits(n, sigma.dom) && admissible_bits(n, sigma.img)
            }
        }
        Family::OR => {
            if rank == n {
                in_unit_group(Family::OR, sigma)
            } else if rank > m {
                false
            } else {
                let ok = admissible_bits(n, sigma.dom) && admissible_bits(n, sigma.img);
                if rank < m || !ok {
                    ok
                } else {
                    upper_parity(&sigma.domain()) == upper_parity(&sigma.image())
                }
            }
        }
    }
}

/// The type of a rank-`m` element (the type of its domain); `None` at other ranks.
pub fn element_type(sigma: &PartialInjection) -> Option<MSetType> {
    let m = sigma.degree() / 2;
    if sigma.rank() == m && admissible_bits(sigma.degree(), sigma.dom) {
        Some(upper_parity(&sigma.domain()))
    } else {
        None
    }
}
