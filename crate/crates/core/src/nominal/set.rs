use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nominal::atom::{fresh_atoms, Atom, AtomSet, Permutation};
use crate::nominal::orbit::{Element, OrbitDescriptor};

/// A finite coproduct of single orbits under the equality symmetry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrbitFiniteSet {
    orbits: Vec<OrbitDescriptor>,
}

impl OrbitFiniteSet {
    pub fn new(orbits: Vec<OrbitDescriptor>) -> Self {
        OrbitFiniteSet { orbits }
    }

    pub fn empty() -> Self {
        OrbitFiniteSet { orbits: Vec::new() }
    }

    /// The one-point set `1`.
    pub fn singleton(label: impl Into<String>) -> Self {
        OrbitFiniteSet { orbits: vec![OrbitDescriptor::strong(label, 0)] }
    }

    /// The set of atoms `𝔸`.
    pub fn atoms() -> Self {
        OrbitFiniteSet { orbits: vec![OrbitDescriptor::strong("A", 1)] }
    }

    /// Strong set `𝔸^{#d1} + … + 𝔸^{#dk}`.
    pub fn strong(dims: &[usize]) -> Self {
        let orbits = dims
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let label = match d {
                    0 => format!("U{i}"),
                    1 => format!("A{i}"),
                    _ => format!("A{d}_{i}"),
                };
                OrbitDescriptor::strong(label, d)
            })
            .collect();
        OrbitFiniteSet { orbits }
    }

    /// Disjoint union; returns the set and the orbit offset of `other`.
    ///
    /// Labels of the right summand are primed when they clash.
    pub fn coproduct(&self, other: &OrbitFiniteSet) -> (OrbitFiniteSet, usize) {
        let mut orbits = self.orbits.clone();
        let offset = orbits.len();
        let taken: BTreeSet<String> = orbits.iter().map(|o| o.label().to_string()).collect();
        for o in &other.orbits {
            let mut o = o.clone();
            let mut label = o.label().to_string();
            while taken.contains(&label) {
                label.push('\'');
            }
            o.set_label(label);
            orbits.push(o);
        }
        (OrbitFiniteSet { orbits }, offset)
    }

    /// The subset formed by the listed orbits, in the given order.
    pub fn restrict(&self, orbit_indices: &[usize]) -> OrbitFiniteSet {
        OrbitFiniteSet { orbits: orbit_indices.iter().map(|&i| self.orbits[i].clone()).collect() }
    }

    pub fn orbits(&self) -> &[OrbitDescriptor] {
        &self.orbits
    }

    pub fn orbit(&self, index: usize) -> Result<&OrbitDescriptor> {
        self.orbits
            .get(index)
            .ok_or(Error::NoSuchOrbit { index, count: self.orbits.len() })
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    /// Maximum orbit dimension `k`; 0 for the empty set.
    pub fn bound(&self) -> usize {
        self.orbits.iter().map(OrbitDescriptor::dim).max().unwrap_or(0)
    }

    pub fn orbit_by_label(&self, label: &str) -> Option<usize> {
        self.orbits.iter().position(|o| o.label() == label)
    }

    pub fn is_strong(&self) -> bool {
        self.orbits.iter().all(|o| o.group_order() == 1)
    }

    /// Canonicalizes `tuple` inside orbit `orbit`.
    pub fn element(&self, orbit: usize, tuple: &[Atom]) -> Result<Element> {
        let desc = self.orbit(orbit)?;
        desc.check_tuple(tuple)?;
        Ok(Element { orbit, atoms: desc.canonical_tuple(tuple) })
    }

    pub(crate) fn element_unchecked(&self, orbit: usize, tuple: &[Atom]) -> Element {
        Element { orbit, atoms: self.orbits[orbit].canonical_tuple(tuple) }
    }

    /// The orbit representative over atoms `1..=n`.
    pub fn rep(&self, orbit: usize) -> Element {
        let n = self.orbits[orbit].dim() as u32;
        let tuple: Vec<Atom> = (1..=n).map(Atom).collect();
        self.element_unchecked(orbit, &tuple)
    }

    pub fn reps(&self) -> Vec<Element> {
        (0..self.orbits.len()).map(|i| self.rep(i)).collect()
    }

    /// Whether `x` is a well-formed, canonical element of this set.
    pub fn contains(&self, x: &Element) -> bool {
        match self.orbits.get(x.orbit) {
            Some(desc) => desc.check_tuple(&x.atoms).is_ok() && desc.canonical_tuple(&x.atoms) == x.atoms,
            None => false,
        }
    }

    pub fn act(&self, pi: &Permutation, x: &Element) -> Element {
        let moved: Vec<Atom> = x.atoms.iter().map(|&a| pi.apply(a)).collect();
        self.element_unchecked(x.orbit, &moved)
    }

    pub fn least_support(&self, x: &Element) -> AtomSet {
        x.support()
    }

    /// Canonical representative of the `Perm_S`-orbit of `x`.
    ///
    /// Atoms outside `S` are renamed, in order of first appearance, to the
    /// smallest atoms not in `S`; the result is minimized over the
    /// positional group.
    pub fn s_key(&self, x: &Element, s: &AtomSet) -> Element {
        let desc = &self.orbits[x.orbit];
        let fresh = fresh_atoms(s, desc.dim());
        let mut best: Option<Vec<Atom>> = None;
        for g in desc.group() {
            let mut next = 0;
            let mut renamed: Vec<(Atom, Atom)> = Vec::new();
            let cand: Vec<Atom> = g
                .iter()
                .map(|&i| {
                    let a = x.atoms[i];
                    if s.contains(&a) {
                        a
                    } else if let Some(&(_, b)) = renamed.iter().find(|(old, _)| *old == a) {
                        b
                    } else {
                        let b = fresh[next];
                        next += 1;
                        renamed.push((a, b));
                        b
                    }
                })
                .collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        self.element_unchecked(x.orbit, &best.unwrap_or_default())
    }

    /// All elements whose support is contained in `s`.
    pub fn elements_with_support(&self, s: &AtomSet) -> Vec<Element> {
        let pool: Vec<Atom> = s.iter().copied().collect();
        let mut out = BTreeSet::new();
        for (orbit, desc) in self.orbits.iter().enumerate() {
            for_each_injection(desc.dim(), &pool, |tuple| {
                out.insert(self.element_unchecked(orbit, tuple));
            });
        }
        out.into_iter().collect()
    }

    /// One canonical representative per `Perm_S`-orbit.
    pub fn s_orbit_reps(&self, s: &AtomSet) -> Vec<Element> {
        let mut out = BTreeSet::new();
        for orbit in 0..self.orbits.len() {
            out.extend(self.s_orbit_reps_of(orbit, s));
        }
        out.into_iter().collect()
    }

    /// `Perm_S`-orbit representatives inside a single orbit.
    pub fn s_orbit_reps_of(&self, orbit: usize, s: &AtomSet) -> Vec<Element> {
        let desc = &self.orbits[orbit];
        let n = desc.dim();
        let pool: Vec<Atom> = s.iter().copied().collect();
        let fresh = fresh_atoms(s, n);
        let mut out = BTreeSet::new();
        // Each position holds either an atom of S or a fresh atom.
        let mut slots: Vec<Option<Atom>> = vec![None; n];
        fn rec(
            pos: usize,
            slots: &mut Vec<Option<Atom>>,
            pool: &[Atom],
            fresh: &[Atom],
            f: &mut dyn FnMut(&[Atom]),
        ) {
            if pos == slots.len() {
                let mut next = 0;
                let tuple: Vec<Atom> = slots
                    .iter()
                    .map(|s| match s {
                        Some(a) => *a,
                        None => {
                            next += 1;
                            fresh[next - 1]
                        }
                    })
                    .collect();
                f(&tuple);
                return;
            }
            slots[pos] = None;
            rec(pos + 1, slots, pool, fresh, f);
            for &a in pool {
                if !slots[..pos].contains(&Some(a)) {
                    slots[pos] = Some(a);
                    rec(pos + 1, slots, pool, fresh, f);
                }
            }
            slots[pos] = None;
        }
        rec(0, &mut slots, &pool, &fresh, &mut |tuple| {
            let x = self.element_unchecked(orbit, tuple);
            out.insert(self.s_key(&x, s));
        });
        out.into_iter().collect()
    }

    /// `Label(a b)`, or just `Label` for a point with empty support.
    pub fn show(&self, x: &Element) -> String {
        let label = self.orbits.get(x.orbit).map_or("?", |o| o.label());
        if x.atoms.is_empty() {
            return label.to_string();
        }
        let atoms: Vec<String> = x.atoms.iter().map(Atom::to_string).collect();
        format!("{label}({})", atoms.join(" "))
    }

    /// Every element whose atoms lie in `pool` (a concrete finite window onto
    /// the set).
    pub fn elements_over(&self, pool: &AtomSet) -> Vec<Element> {
        self.elements_with_support(pool)
    }
}

/// Calls `f` on every injective tuple of length `n` over `pool`.
pub(crate) fn for_each_injection(n: usize, pool: &[Atom], mut f: impl FnMut(&[Atom])) {
    fn rec(n: usize, pool: &[Atom], cur: &mut Vec<Atom>, f: &mut dyn FnMut(&[Atom])) {
        if cur.len() == n {
            f(cur);
            return;
        }
        for &a in pool {
            if !cur.contains(&a) {
                cur.push(a);
                rec(n, pool, cur, f);
                cur.pop();
            }
        }
    }
    let mut cur = Vec::with_capacity(n);
    rec(n, pool, &mut cur, &mut f);
}

impl fmt::Display for OrbitFiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orbits.is_empty() {
            return write!(f, "0");
        }
        for (i, o) in self.orbits.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}[dim {}", o.label(), o.dim())?;
            if o.group_order() > 1 {
                write!(f, ", |G|={}", o.group_order())?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nominal::atom::atoms;

    fn swap_pairs() -> OrbitFiniteSet {
        OrbitFiniteSet::new(vec![OrbitDescriptor::new("P", 2, vec![vec![1, 0]]).unwrap()])
    }

    #[test]
    fn canonicalize_examples() {
        let strong2 = OrbitFiniteSet::strong(&[2]);
        let x = strong2.element(0, &[Atom(7), Atom(3)]).unwrap();
        assert_eq!(x.atoms(), &[Atom(7), Atom(3)]);
        let sym = swap_pairs();
        let y = sym.element(0, &[Atom(7), Atom(3)]).unwrap();
        assert_eq!(y.atoms(), &[Atom(3), Atom(7)]);
        let unit = OrbitFiniteSet::singleton("1");
        let z = unit.element(0, &[]).unwrap();
        assert!(z.support().is_empty());
    }

    #[test]
    fn canonicalize_errors() {
        let strong2 = OrbitFiniteSet::strong(&[2]);
        assert_eq!(strong2.element(0, &[Atom(1), Atom(1)]), Err(Error::DuplicateAtom(Atom(1))));
        assert_eq!(
            strong2.element(0, &[Atom(1)]),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        );
        assert!(strong2.element(3, &[]).is_err());
    }

    #[test]
    fn act_examples() {
        let a = OrbitFiniteSet::atoms();
        let x = a.element(0, &[Atom(1)]).unwrap();
        let pi = Permutation::transposition(Atom(1), Atom(2));
        assert_eq!(a.act(&pi, &x).atoms(), &[Atom(2)]);
        // fixing the support acts trivially
        let fix = Permutation::transposition(Atom(5), Atom(6));
        assert_eq!(a.act(&fix, &x), x);
        let sym = swap_pairs();
        let ab = sym.element(0, &[Atom(1), Atom(2)]).unwrap();
        assert_eq!(sym.act(&pi, &ab), ab);
    }

    #[test]
    fn elements_with_support_examples() {
        let a = OrbitFiniteSet::atoms();
        assert_eq!(a.elements_with_support(&atoms([1, 2])).len(), 2);
        let a2 = OrbitFiniteSet::strong(&[2]);
        assert!(a2.elements_with_support(&atoms([1])).is_empty());
    }

    #[test]
    fn s_orbit_rep_examples() {
        let a = OrbitFiniteSet::atoms();
        assert_eq!(a.s_orbit_reps(&AtomSet::new()).len(), 1);
        assert_eq!(a.s_orbit_reps(&atoms([1])).len(), 2);
        let a2 = OrbitFiniteSet::strong(&[2]);
        assert_eq!(a2.s_orbit_reps(&atoms([1])).len(), 3);
    }

    #[test]
    fn s_key_identifies_s_orbits() {
        let a2 = OrbitFiniteSet::strong(&[2]);
        let s = atoms([1]);
        let x = a2.element(0, &[Atom(1), Atom(5)]).unwrap();
        let y = a2.element(0, &[Atom(1), Atom(9)]).unwrap();
        let z = a2.element(0, &[Atom(9), Atom(1)]).unwrap();
        assert_eq!(a2.s_key(&x, &s), a2.s_key(&y, &s));
        assert_ne!(a2.s_key(&x, &s), a2.s_key(&z, &s));
    }

    #[test]
    fn coproduct_examples() {
        let (x, off) = OrbitFiniteSet::singleton("1").coproduct(&OrbitFiniteSet::atoms());
        assert_eq!(x.orbit_count(), 2);
        assert_eq!(off, 1);
        let (aa, _) = OrbitFiniteSet::atoms().coproduct(&OrbitFiniteSet::atoms());
        assert_eq!(aa.orbit_count(), 2);
        assert_ne!(aa.orbits()[0].label(), aa.orbits()[1].label());
        assert_eq!(OrbitFiniteSet::empty().bound(), 0);
    }

    #[test]
    fn strong_set_examples() {
        assert_eq!(OrbitFiniteSet::strong(&[1]).orbits()[0].dim(), 1);
        let s = OrbitFiniteSet::strong(&[0, 1]);
        assert_eq!(s.orbit_count(), 2);
        assert!(OrbitFiniteSet::strong(&[2]).is_strong());
        // stabilizer of (a,b) fixes a and b: swapping changes the element
        let a2 = OrbitFiniteSet::strong(&[2]);
        let ab = a2.element(0, &[Atom(1), Atom(2)]).unwrap();
        assert_ne!(a2.act(&Permutation::transposition(Atom(1), Atom(2)), &ab), ab);
    }
}
