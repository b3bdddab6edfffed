use std::collections::BTreeSet;

use rookcong::congruence::FiniteMonoid;
use rookcong::green::*;
use rookcong::group::{Perm, PermGroup};
use rookcong::rook::{element_type, MSetType};
use rookcong::{Family, MonoidUniverse, PartialInjection};

fn universe(f: Family, n: usize) -> MonoidUniverse {
    MonoidUniverse::enumerate(f, n).unwrap()
}

#[test]
fn brute_force_matches_characterization_up_to_four() {
    for n in [2, 4] {
        for f in [Family::R, Family::SR, Family::OR] {
            let u = universe(f, n);
            let g = green_partition(&u);
            let [l, r, h, j] = green_brute_force(&u, BruteForceScope { lr: true, j: JMethod::TwoSided });
            assert_eq!(l.unwrap(), g.l, "{f}_{n} L");
            assert_eq!(r.unwrap(), g.r, "{f}_{n} R");
            assert_eq!(h.unwrap(), g.h, "{f}_{n} H");
            let j = j.unwrap();
            assert_eq!(j, g.j, "{f}_{n} J");
            let [_, _, _, joined] = green_brute_force(&u, BruteForceScope { lr: false, j: JMethod::LrJoin });
            assert_eq!(joined.unwrap(), j, "{f}_{n} D = J");
        }
    }
}

#[test]
fn brute_force_matches_characterization_at_six() {
    for f in [Family::SR, Family::OR] {
        let u = universe(f, 6);
        let g = green_partition(&u);
        let [l, r, _, j] = green_brute_force(&u, BruteForceScope { lr: true, j: JMethod::TwoSided });
        assert_eq!(l.unwrap(), g.l);
        assert_eq!(r.unwrap(), g.r);
        assert_eq!(j.unwrap(), g.j);
    }
}

#[test]
fn principal_ideals_match_descriptions() {
    for (f, n) in [(Family::SR, 2), (Family::OR, 2), (Family::SR, 4), (Family::OR, 4), (Family::SR, 6), (Family::OR, 6)] {
        let u = universe(f, n);
        for s in 0..u.size() {
            assert_eq!(principal_right(&u, s), right_ideal_by_image(&u, s), "{f}_{n} σS at {}", u.element(s));
            assert_eq!(principal_left(&u, s), left_ideal_by_domain(&u, s), "{f}_{n} Sσ at {}", u.element(s));
            assert_eq!(principal_twosided(&u, s), twosided_ideal_by_rank(&u, s), "{f}_{n} SσS at {}", u.element(s));
        }
    }
}

#[test]
fn rank_m_ideal_needs_matching_type() {
    let u = universe(Family::OR, 4);
    for s in (0..u.size()).filter(|&s| u.element(s).rank() == 2) {
        let ideal = principal_twosided(&u, s);
        for t in (0..u.size()).filter(|&t| u.element(t).rank() == 2) {
            assert_eq!(
                ideal.contains(&t),
                element_type(u.element(t)) == element_type(u.element(s))
            );
        }
    }
}

#[test]
fn counts_agree_with_closed_forms_for_small_degrees() {
    for n in [2, 4, 6] {
        let m = n / 2;
        let u = universe(Family::OR, n);
        let g = green_partition(&u);
        let c = class_counts(&g);
        let f = class_count_formulas(m).unwrap();
        assert_eq!(c.l as u128, f.l_class_count);
        assert_eq!(c.r as u128, f.r_class_count);
        assert_eq!(c.h as u128, f.h_class_count);
        assert_eq!(c.j as u128, f.j_class_count);
        assert_eq!(c.j, m + 3);
        for cmp in compare_with_formulas(&u, &g).unwrap() {
            let rank_m_d = cmp.quantity == "D-class size" && cmp.rank == Some(m);
            assert_eq!(cmp.agrees, !rank_m_d, "{} at {:?}", cmp.quantity, cmp.rank);
        }
        let per_class = f.stratum(m).unwrap().d_class_size_per_class;
        let observed: BTreeSet<usize> = g.j.classes().iter().filter(|c| u.element(c[0]).rank() == m).map(Vec::len).collect();
        assert_eq!(observed.into_iter().collect::<Vec<_>>(), vec![per_class as usize]);
    }
}

#[test]
fn h_count_at_six_evaluates_to_214() {
    let u = universe(Family::OR, 6);
    assert_eq!(class_counts(&green_partition(&u)).h, 214);
    assert_eq!(class_count_formulas(3).unwrap().h_class_count, 214);
}

#[test]
fn h_class_groups_are_symmetric() {
    for n in [4, 6] {
        let m = n / 2;
        let u = universe(Family::OR, n);
        let g = green_partition(&u);
        for e in (0..u.size()).filter(|&e| u.element(e).is_idempotent()) {
            let k = u.element(e).rank();
            let hg = h_class_group(&u, &g, e).unwrap();
            assert_eq!(hg.members.len(), g.h.class_of(e).len());
            if k == 0 {
                assert_eq!(hg.members.len(), 1);
            } else if k <= m {
                assert_eq!(hg.group, PermGroup::symmetric(k));
                // position bijection: member ↔ μ with σ(a_i) = a_{μ(i)}
                for (idx, mu) in hg.members.iter().zip(&hg.labels) {
                    assert_eq!(apply_mu(u.element(e), mu).unwrap(), *u.element(*idx));
                }
            } else {
                assert_eq!(hg.group, unit_group(&u).unwrap());
                assert_eq!(hg.group.order(), (1 << (m - 1)) * (1..=m).product::<usize>());
            }
        }
    }
}

#[test]
fn h_class_labelling_is_a_homomorphism() {
    let u = universe(Family::SR, 4);
    let g = green_partition(&u);
    for e in (0..u.size()).filter(|&e| u.element(e).is_idempotent() && u.element(e).rank() > 0) {
        let hg = h_class_group(&u, &g, e).unwrap();
        for (i, a) in hg.members.iter().enumerate() {
            for (j, b) in hg.members.iter().enumerate() {
                let p = u.product(*a, *b);
                let pos = hg.members.iter().position(|&x| x == p).expect("closed");
                assert_eq!(hg.labels[pos], hg.labels[i].compose(&hg.labels[j]));
            }
        }
    }
}

#[test]
fn apply_mu_chains() {
    let sigma = PartialInjection::new(6, &[(1, 4), (2, 6), (5, 2)]).unwrap();
    for mu in rookcong::group::all_permutations(3) {
        for nu in rookcong::group::all_permutations(3) {
            let once = apply_mu(&apply_mu(&sigma, &mu).unwrap(), &nu).unwrap();
            assert_eq!(once, apply_mu(&sigma, &mu.compose(&nu)).unwrap());
        }
    }
    assert!(apply_mu(&sigma, &Perm::identity(2)).is_err());
}

#[test]
fn ideals_of_small_orthogonal_monoids() {
    for n in [2, 4, 6] {
        let m = n / 2;
        let u = universe(Family::OR, n);
        let g = green_partition(&u);
        let ideals = enumerate_ideals(&u, &g).unwrap();
        assert!(ideals.iter().all(|d| d.absorbing));
        let mut kinds: Vec<IdealKind> = ideals.iter().filter(|d| d.listed).map(|d| d.kind).collect();
        kinds.sort_by_key(|k| format!("{k}"));
        let mut expected: Vec<IdealKind> = (0..m).map(|k| IdealKind::Rank { k }).collect();
        expected.extend([IdealKind::TypeI, IdealKind::TypeII, IdealKind::Rank { k: n }]);
        expected.sort_by_key(|k| format!("{k}"));
        assert_eq!(kinds, expected);
        let extra: Vec<&IdealDescriptor> = ideals.iter().filter(|d| !d.listed).collect();
        assert_eq!(extra.len(), 1);
        assert_eq!(extra[0].kind, IdealKind::Union);
        assert_eq!(extra[0].members.len(), u.size() - unit_group(&u).unwrap().order());
    }
}

#[test]
fn j_order_is_a_chain_with_one_diamond() {
    let u = universe(Family::OR, 6);
    let g = green_partition(&u);
    let le = j_order(&u, &g);
    let covers = j_covers(&le);
    // ranks 0 < 1 < 2 < {3 type I, 3 type II} < 6
    assert_eq!(g.j_classes.len(), 6);
    assert_eq!(covers.len(), 6);
    let key = |i: usize| g.j_classes[i].key;
    for (a, b) in covers {
        assert!(key(a).rank < key(b).rank);
    }
    let type_classes: Vec<usize> = (0..6).filter(|&i| key(i).mtype.is_some()).collect();
    assert_eq!(type_classes.len(), 2);
    assert!(!le[type_classes[0]][type_classes[1]] && !le[type_classes[1]][type_classes[0]]);
    assert!(type_classes.iter().any(|&i| key(i).mtype == Some(MSetType::I)));
}

#[test]
fn absorption_by_generators_matches_all_elements() {
    for (f, n) in [(Family::OR, 4), (Family::SR, 4)] {
        let u = universe(f, n);
        let g = green_partition(&u);
        let classes = g.j.classes();
        for mask in 1u32..(1 << classes.len()) {
            let members: BTreeSet<usize> = (0..classes.len())
                .filter(|i| mask & (1 << i) != 0)
                .flat_map(|i| classes[i].iter().copied())
                .collect();
            let full = members
                .iter()
                .all(|&a| (0..u.size()).all(|x| members.contains(&u.product(x, a)) && members.contains(&u.product(a, x))));
            assert_eq!(is_absorbing(&u, &members), full, "{f}_{n} mask {mask:b}");
        }
    }
}
