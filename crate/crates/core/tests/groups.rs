mod common;

use std::collections::BTreeSet;

use symvass::Group;

fn transitive_groups() -> Vec<Group> {
    let mut gs = Vec::new();
    for d in 1..=5 {
        gs.push(Group::Symmetric(d));
        gs.push(Group::Cyclic(d));
    }
    for d in 3..=5 {
        gs.push(Group::Alternating(d));
    }
    for (g, h) in [
        (Group::Symmetric(2), Group::Symmetric(2)),
        (Group::Symmetric(2), Group::Cyclic(2)),
        (Group::Cyclic(2), Group::Cyclic(2)),
        (Group::Trivial(1), Group::Cyclic(5)),
        (Group::Symmetric(2), Group::Trivial(1)),
    ] {
        gs.push(Group::wreath(g, h));
    }
    gs
}

#[test]
fn stabilizer_cosets_have_equal_size() {
    for g in transitive_groups() {
        let d = g.degree();
        let elems = g.elements(1000).unwrap();
        assert_eq!(elems.len() as u128, g.order().unwrap(), "{g}");
        assert!(g.is_transitive(), "{g}");
        for i in 0..d {
            for j in 0..d {
                let hits = elems.iter().filter(|p| p.at(i) == j).count();
                assert_eq!(hits * d, elems.len(), "{g}: i={i} j={j}");
            }
        }
    }
}

#[test]
fn elements_match_brute_force() {
    let mut gs = transitive_groups();
    gs.extend([Group::Trivial(3), Group::wreath(Group::Trivial(2), Group::Symmetric(2)), Group::wreath(Group::Alternating(3), Group::Trivial(2))]);
    for g in gs {
        let lib: BTreeSet<Vec<usize>> = g.elements(10_000).unwrap().iter().map(|p| p.image().to_vec()).collect();
        let brute: BTreeSet<Vec<usize>> = common::group_elements(&g).into_iter().collect();
        assert_eq!(lib, brute, "{g}");
        for p in common::permutations(g.degree()) {
            let perm = symvass::Permutation::from_image(p.clone()).unwrap();
            assert_eq!(g.contains(&perm), brute.contains(&p), "{g} {perm}");
        }
    }
}

#[test]
fn transitivity_matches_orbit_of_zero() {
    for g in [Group::Trivial(2), Group::wreath(Group::Trivial(2), Group::Symmetric(2)), Group::wreath(Group::Symmetric(2), Group::Trivial(2)), Group::Cyclic(4), Group::Trivial(1)] {
        let orbit: BTreeSet<usize> = common::group_elements(&g).iter().map(|p| p[0]).collect();
        assert_eq!(g.is_transitive(), orbit.len() == g.degree(), "{g}");
    }
}
