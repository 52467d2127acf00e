use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use orbitfin::fs_sets::{BoolOp, FsSubset};
use orbitfin::language::{builtin_language, language_names, Word};
use orbitfin::monoid::{catalog, NominalMonoid};
use orbitfin::nominal::{atoms, Atom, AtomSet, Element, OrbitFiniteSet, Permutation};

fn monoids() -> &'static [Arc<NominalMonoid>] {
    static CATALOG: OnceLock<Vec<Arc<NominalMonoid>>> = OnceLock::new();
    CATALOG.get_or_init(|| catalog().unwrap().into_iter().map(Arc::new).collect())
}

fn perm_strategy(n: u32) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<u32>>()).prop_shuffle().prop_map(|images| {
        Permutation::from_mapping(images.into_iter().enumerate().map(|(i, b)| (Atom(i as u32 + 1), Atom(b))))
            .unwrap()
    })
}

fn pick(c: &OrbitFiniteSet, index: usize) -> Element {
    let xs = c.elements_over(&atoms(1..=4));
    xs[index % xs.len()].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn action_is_a_group_action(m in 0usize..12, i in 0usize..1000, p in perm_strategy(6), q in perm_strategy(6)) {
        let ms = monoids();
        let c = ms[m % ms.len()].carrier();
        let x = pick(c, i);
        prop_assert_eq!(c.act(&p, &c.act(&q, &x)), c.act(&p.compose(&q), &x));
        prop_assert_eq!(c.act(&p.inverse(), &c.act(&p, &x)), x.clone());
        prop_assert_eq!(c.act(&p, &x).support(), p.apply_set(&x.support()));
    }

    #[test]
    fn multiplication_is_equivariant_and_associative(
        m in 0usize..12, i in 0usize..1000, j in 0usize..1000, k in 0usize..1000, p in perm_strategy(6)
    ) {
        let ms = monoids();
        let m = &ms[m % ms.len()];
        let c = m.carrier();
        let (x, y, z) = (pick(c, i), pick(c, j), pick(c, k));
        let xy = m.multiply(&x, &y).unwrap();
        prop_assert_eq!(c.act(&p, &xy), m.multiply(&c.act(&p, &x), &c.act(&p, &y)).unwrap());
        prop_assert_eq!(m.multiply(&xy, &z).unwrap(), m.multiply(&x, &m.multiply(&y, &z).unwrap()).unwrap());
        prop_assert_eq!(m.multiply(m.unit(), &x).unwrap(), x.clone());
        prop_assert!(xy.support().is_subset(&x.support().union(&y.support()).cloned().collect()));
    }

    #[test]
    fn omega_power_is_an_idempotent_power(m in 0usize..12, i in 0usize..1000) {
        let ms = monoids();
        let m = &ms[m % ms.len()];
        let x = pick(m.carrier(), i);
        let e = m.omega_power(&x);
        prop_assert_eq!(m.multiply(&e, &e).unwrap(), e.clone());
        let mut p = x.clone();
        let mut found = p == e;
        for _ in 0..m.power_cycle(&x).powers.len() {
            p = m.multiply(&p, &x).unwrap();
            found |= p == e;
        }
        prop_assert!(found);
    }

    #[test]
    fn membership_is_equivariant(l in 0usize..8, letters in prop::collection::vec(1u32..5, 0..6), p in perm_strategy(5)) {
        let names = language_names();
        let l = builtin_language(names[l % names.len()]).unwrap();
        let w = Word::of_atoms(&letters);
        let moved = w.act(l.alphabet(), &p);
        prop_assert_eq!(l.act(&p).member(&moved).unwrap(), l.member(&w).unwrap());
        prop_assert_eq!(l.complement().member(&w).unwrap(), !l.member(&w).unwrap());
    }

    #[test]
    fn subsets_form_a_boolean_algebra(
        m in 0usize..12,
        su in prop::collection::btree_set(1u32..4, 0..3),
        sv in prop::collection::btree_set(1u32..4, 0..3),
        pick_u in prop::collection::vec(any::<bool>(), 16),
        pick_v in prop::collection::vec(any::<bool>(), 16),
    ) {
        let ms = monoids();
        let c = ms[m % ms.len()].carrier().clone();
        let build = |s: &std::collections::BTreeSet<u32>, keep: &[bool]| {
            let s: AtomSet = s.iter().map(|&a| Atom(a)).collect();
            let reps: Vec<Element> = c
                .s_orbit_reps(&s)
                .into_iter()
                .enumerate()
                .filter(|(i, _)| keep[i % keep.len()])
                .map(|(_, x)| x)
                .collect();
            FsSubset::from_elements(c.clone(), s, &reps).unwrap()
        };
        let (u, v) = (build(&su, &pick_u), build(&sv, &pick_v));
        prop_assert_eq!(u.union(&v).unwrap().complement(), u.complement().intersect(&v.complement()).unwrap());
        prop_assert_eq!(u.complement().complement(), u.clone());
        let d = u.boolean(BoolOp::Difference, &v).unwrap();
        for x in c.elements_over(&atoms(1..=4)) {
            prop_assert_eq!(d.member(&x).unwrap(), u.member(&x).unwrap() && !v.member(&x).unwrap());
        }
    }

    #[test]
    fn hull_contains_fixing_images(
        m in 0usize..12,
        s in prop::collection::btree_set(1u32..4, 0..3),
        p in perm_strategy(6),
    ) {
        let ms = monoids();
        let c = ms[m % ms.len()].carrier().clone();
        let last = c.orbit_count() - 1;
        let tuple: Vec<Atom> = (1..=c.orbits()[last].dim() as u32).map(Atom).collect();
        let u = FsSubset::singleton(c.clone(), &c.element(last, &tuple).unwrap()).unwrap();
        let s: AtomSet = s.into_iter().map(Atom).collect();
        let h = u.hull(&s);
        prop_assert!(u.is_subset(&h).unwrap());
        if p.fixes_all(&s) {
            prop_assert!(u.act(&p).is_subset(&h).unwrap());
        }
        prop_assert!(h.support().is_subset(&s));
    }
}
