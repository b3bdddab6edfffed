use std::collections::BTreeSet;

use proptest::prelude::*;
use rookcong::congruence::*;
use rookcong::green::unit_group;
use rookcong::group::{normal_subgroups, Perm, PermGroup, DEFAULT_GROUP_BOUND};
use rookcong::{Error, Family, MonoidUniverse};

/// The same monoid, but translating by every element during closure.
struct AllTranslators<'a>(&'a MonoidUniverse);

impl FiniteMonoid for AllTranslators<'_> {
    fn size(&self) -> usize {
        self.0.size()
    }
    fn product(&self, a: usize, b: usize) -> usize {
        self.0.product(a, b)
    }
}

fn cyclic(k: usize) -> CayleyTable {
    CayleyTable::new(k, (0..k * k).map(|x| (x / k + x % k) % k).collect()).unwrap()
}

/// All maps {0,1} → {0,1} under composition (a∘b), identity first.
fn full_transformations_2() -> CayleyTable {
    let maps: [[usize; 2]; 4] = [[0, 1], [1, 0], [0, 0], [1, 1]];
    let idx = |m: [usize; 2]| maps.iter().position(|&x| x == m).unwrap();
    let mut table = Vec::new();
    for a in maps {
        for b in maps {
            table.push(idx([a[b[0]], a[b[1]]]));
        }
    }
    CayleyTable::new(4, table).unwrap()
}

/// The monogenic nilpotent monoid {1, a, ..., a^(k-2), 0}.
fn nilpotent_chain(k: usize) -> CayleyTable {
    // element i stands for a^i, with a^(k-1) = 0 absorbing
    CayleyTable::new(k, (0..k * k).map(|x| (x / k + x % k).min(k - 1)).collect()).unwrap()
}

#[test]
fn lattice_matches_naive_filter_on_small_monoids() {
    let tables: Vec<(&str, CayleyTable)> = vec![
        ("Z4", cyclic(4)),
        ("Z6", cyclic(6)),
        ("T2", full_transformations_2()),
        ("chain5", nilpotent_chain(5)),
        ("chain7", nilpotent_chain(7)),
    ];
    for (name, t) in &tables {
        let fast = congruence_lattice(t, 100).unwrap();
        let slow = naive_congruences(t).unwrap();
        assert_eq!(fast, slow, "{name}");
    }
    // Z6 has one congruence per subgroup: 4
    assert_eq!(congruence_lattice(&cyclic(6), 100).unwrap().len(), 4);
    // every congruence of a nilpotent chain is a Rees congruence, one per non-empty ideal
    assert_eq!(congruence_lattice(&nilpotent_chain(5), 100).unwrap().len(), 5);
}

#[test]
fn lattice_matches_naive_filter_on_rook_monoids() {
    for f in [Family::OR, Family::SR] {
        let u = MonoidUniverse::enumerate(f, 2).unwrap();
        assert!(u.size() <= 7);
        assert_eq!(congruence_lattice(&u, 100).unwrap(), naive_congruences(&u).unwrap(), "{f}_2");
    }
}

#[test]
fn naive_filter_refuses_large_inputs() {
    let u = MonoidUniverse::enumerate(Family::OR, 4).unwrap();
    assert!(matches!(naive_congruences(&u), Err(Error::Budget { .. })));
}

#[test]
fn lattice_is_sorted_distinct_and_bounded() {
    for (f, n) in [(Family::OR, 4), (Family::SR, 4)] {
        let u = MonoidUniverse::enumerate(f, n).unwrap();
        let lattice = congruence_lattice(&u, 100).unwrap();
        assert!(lattice[0].is_identity());
        assert!(lattice.last().unwrap().is_universal());
        let distinct: BTreeSet<&Partition> = lattice.iter().collect();
        assert_eq!(distinct.len(), lattice.len());
        for w in lattice.windows(2) {
            assert!(w[0].num_classes() >= w[1].num_classes());
        }
        for p in &lattice {
            assert!(is_congruence(&u, p));
        }
    }
}

#[test]
fn lattice_closed_under_meet_and_join() {
    let u = MonoidUniverse::enumerate(Family::OR, 4).unwrap();
    let lattice = congruence_lattice(&u, 100).unwrap();
    let members: BTreeSet<&Partition> = lattice.iter().collect();
    for a in &lattice {
        for b in &lattice {
            let j = join(&u, a, b).unwrap();
            assert!(members.contains(&j));
            assert!(a.refines(&j) && b.refines(&j));
            let m = a.meet(b).unwrap();
            assert!(members.contains(&m));
        }
    }
}

#[test]
fn generator_translation_equals_all_translation() {
    for (f, n) in [(Family::OR, 4), (Family::SR, 4), (Family::OR, 6)] {
        let u = MonoidUniverse::enumerate(f, n).unwrap();
        let all = AllTranslators(&u);
        assert!(u.translators().len() < u.size());
        let step = if n == 6 { 37 } else { 1 };
        for a in (0..u.size()).step_by(step) {
            for b in [0, 1, u.size() / 2, u.size() - 1] {
                let fast = congruence_closure(&u, &[(a, b)]).unwrap();
                let slow = congruence_closure(&all, &[(a, b)]).unwrap();
                assert_eq!(fast, slow, "{f}_{n} pair ({a},{b})");
            }
        }
    }
}

/// Every normal subgroup is generated by the normal closures of its elements.
fn normal_subgroups_oracle(g: &PermGroup) -> BTreeSet<Vec<Perm>> {
    let deg = g.degree();
    let normal_closure = |x: &Perm| {
        let conj: Vec<Perm> = g.elements().iter().map(|h| h.compose(x).compose(&h.inverse())).collect();
        PermGroup::generated(deg, &conj, DEFAULT_GROUP_BOUND).unwrap()
    };
    let mut found: BTreeSet<Vec<Perm>> = BTreeSet::new();
    found.insert(vec![Perm::identity(deg)]);
    let mut frontier: Vec<Vec<Perm>> = g.elements().iter().map(|x| normal_closure(x).elements().to_vec()).collect();
    while let Some(n) = frontier.pop() {
        if !found.insert(n.clone()) {
            continue;
        }
        for other in found.clone() {
            let gens: Vec<Perm> = n.iter().chain(other.iter()).cloned().collect();
            let j = PermGroup::generated(deg, &gens, DEFAULT_GROUP_BOUND).unwrap();
            if !found.contains(j.elements()) {
                frontier.push(j.elements().to_vec());
            }
        }
    }
    found
}

#[test]
fn normal_subgroups_match_oracle() {
    let mut groups = vec![PermGroup::symmetric(3), PermGroup::symmetric(4), PermGroup::symmetric(5)];
    for (f, n) in [(Family::SR, 4), (Family::SR, 6), (Family::OR, 4), (Family::OR, 6), (Family::OR, 8)] {
        groups.push(unit_group(&MonoidUniverse::enumerate(f, n).unwrap()).unwrap());
    }
    for g in &groups {
        let fast: BTreeSet<Vec<Perm>> = normal_subgroups(g, DEFAULT_GROUP_BOUND)
            .unwrap()
            .subgroups
            .iter()
            .map(|s| s.elements().to_vec())
            .collect();
        assert_eq!(fast, normal_subgroups_oracle(g), "group of order {}", g.order());
    }
}

#[test]
fn normal_subgroup_counts() {
    let count = |g: &PermGroup| normal_subgroups(g, DEFAULT_GROUP_BOUND).unwrap().subgroups.len();
    assert_eq!(count(&PermGroup::symmetric(1)), 1);
    assert_eq!(count(&PermGroup::symmetric(3)), 3);
    assert_eq!(count(&PermGroup::symmetric(4)), 4);
    let w4 = unit_group(&MonoidUniverse::enumerate(Family::SR, 4).unwrap()).unwrap();
    assert_eq!(count(&w4), 6);
    let wp4 = unit_group(&MonoidUniverse::enumerate(Family::OR, 4).unwrap()).unwrap();
    assert_eq!(count(&wp4), 5);
}

fn or4() -> &'static (MonoidUniverse, Vec<Partition>) {
    use std::sync::OnceLock;
    static CELL: OnceLock<(MonoidUniverse, Vec<Partition>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let u = MonoidUniverse::enumerate(Family::OR, 4).unwrap();
        let l = congruence_lattice(&u, 100).unwrap();
        (u, l)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closure_is_least(a in 0usize..37, b in 0usize..37, c in 0usize..37, d in 0usize..37) {
        let (u, lattice) = or4();
        let pairs = [(a, b), (c, d)];
        let p = congruence_closure(u, &pairs).unwrap();
        prop_assert!(is_congruence(u, &p));
        prop_assert!(p.related(a, b) && p.related(c, d));
        for q in lattice.iter().filter(|q| q.related(a, b) && q.related(c, d)) {
            prop_assert!(p.refines(q));
        }
        prop_assert!(lattice.contains(&p));
    }

    #[test]
    fn join_laws(i in 0usize..17, j in 0usize..17, k in 0usize..17) {
        let (u, lattice) = or4();
        prop_assume!(i < lattice.len() && j < lattice.len() && k < lattice.len());
        let (x, y, z) = (&lattice[i], &lattice[j], &lattice[k]);
        prop_assert_eq!(join(u, x, y).unwrap(), join(u, y, x).unwrap());
        prop_assert_eq!(&join(u, x, x).unwrap(), x);
        let left = join(u, &join(u, x, y).unwrap(), z).unwrap();
        let right = join(u, x, &join(u, y, z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn partitions_from_labels_are_canonical(labels in prop::collection::vec(0u8..5, 1..30)) {
        let p = Partition::from_labels(&labels);
        let relabelled: Vec<u8> = labels.iter().map(|x| 4 - x).collect();
        prop_assert_eq!(&Partition::from_labels(&relabelled), &p);
        for a in 0..labels.len() {
            for b in 0..labels.len() {
                prop_assert_eq!(p.related(a, b), labels[a] == labels[b]);
            }
        }
    }
}
