use std::sync::Arc;

use orbitfin::bounds::{is_s_bounded, SupportBound};
use orbitfin::language::{builtin_language, syntactic_language, words_over};
use orbitfin::monoid::builder;
use orbitfin::nominal::{atoms, OrbitFiniteSet, ProductSet};
use orbitfin::prolimit::{aperiodicity_family, satisfies_all};
use orbitfin::Budget;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Orbits of 𝔸^(n) × 𝔸^(m): choose how many atoms are shared and match them.
fn partial_matchings(n: usize, m: usize) -> usize {
    (0..=n.min(m)).map(|k| binomial(n, k) * binomial(m, k) * (1..=k).product::<usize>()).sum()
}

#[test]
fn strong_product_orbits_count_partial_matchings() {
    for n in 0..=3 {
        for m in 0..=3 {
            let x = Arc::new(OrbitFiniteSet::strong(&[n]));
            let y = Arc::new(OrbitFiniteSet::strong(&[m]));
            let p = ProductSet::new(x, y).unwrap();
            assert_eq!(p.set().orbit_count(), partial_matchings(n, m), "{n} × {m}");
        }
    }
}

#[test]
fn atoms_have_one_s_orbit_per_named_atom_plus_one() {
    let a = OrbitFiniteSet::atoms();
    for k in 0..5u32 {
        assert_eq!(a.s_orbit_reps(&atoms(1..=k)).len(), k as usize + 1);
    }
}

#[test]
fn words_over_counts_all_short_words() {
    let l = builtin_language("L0").unwrap();
    let words = words_over(l.alphabet(), &atoms(1..=3), 5);
    assert_eq!(words.len(), (0..=5).map(|i| 3usize.pow(i)).sum::<usize>());
}

#[test]
fn same_ends_is_not_one_bounded() {
    let b = Budget::default();
    let l = builtin_language("same-ends").unwrap();
    let (_, s) = syntactic_language(&l, &b).unwrap();
    let max_dim = s.monoid().carrier().orbits().iter().map(|o| o.dim()).max().unwrap();
    assert_eq!(max_dim, 2);
    for w in words_over(l.alphabet(), &atoms(1..=3), 4) {
        let a: Vec<_> = w.letters().iter().map(|x| x.atoms()[0]).collect();
        let expected = a.len() >= 2 && a[0] == a[a.len() - 1];
        assert_eq!(l.member(&w).unwrap(), expected);
    }
}

#[test]
fn first_letter_bounds_first_projection_only() {
    let b = Budget::default();
    let s = SupportBound::first_letter().unwrap();
    let l = builtin_language("first-a").unwrap();
    assert!(is_s_bounded(l.h0(), &s, &b).unwrap().bounded);
    let l = builtin_language("last-a").unwrap();
    assert!(!is_s_bounded(l.h0(), &s, &b).unwrap().bounded);
}

#[test]
fn cyclic_groups_are_not_aperiodic() {
    let b = Budget::default();
    for name in ["cyclic2", "cyclic3"] {
        let m = Arc::new(builder(name).unwrap());
        assert!(!m.is_aperiodic());
        assert!(!satisfies_all(&m, &aperiodicity_family(&m).unwrap(), &b).unwrap().holds);
    }
}
