//! Recognizable data languages `L = h⁻¹[P]`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fs_sets::{BoolOp, FsSubset};
use crate::monoid::{
    builder, generated_image, pair_generator_maps, quotient, Congruence, GeneratorMap, NominalMonoid,
    Quotient, Submonoid,
};
use crate::nominal::{orbit_pair_reps, Atom, AtomSet, Element, OrbitFiniteSet, Permutation};

/// A finite word over an orbit-finite alphabet.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Element>);

impl Word {
    pub fn new(letters: Vec<Element>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// A word over the alphabet `𝔸` of atoms.
    pub fn of_atoms(ids: &[u32]) -> Self {
        Word(ids.iter().map(|&a| Element { orbit: 0, atoms: vec![Atom(a)] }).collect())
    }

    pub fn letters(&self) -> &[Element] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> AtomSet {
        self.0.iter().flat_map(|x| x.atoms().iter().copied()).collect()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn act(&self, alphabet: &OrbitFiniteSet, pi: &Permutation) -> Word {
        Word(self.0.iter().map(|x| alphabet.act(pi, x)).collect())
    }

    pub fn check(&self, alphabet: &OrbitFiniteSet) -> Result<()> {
        if self.0.iter().all(|x| alphabet.contains(x)) {
            Ok(())
        } else {
            Err(Error::CarrierMismatch)
        }
    }

    /// Letters separated by spaces, `ε` for the empty word.
    pub fn show(&self, alphabet: &OrbitFiniteSet) -> String {
        if self.0.is_empty() {
            return "ε".into();
        }
        let atoms_only = alphabet.orbit_count() == 1 && alphabet.orbits()[0].dim() == 1;
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|x| if atoms_only { x.atoms()[0].to_string() } else { alphabet.show(x) })
            .collect();
        parts.join(" ")
    }
}

/// Every word of length at most `max_len` with letters over `pool`.
pub fn words_over(alphabet: &OrbitFiniteSet, pool: &AtomSet, max_len: usize) -> Vec<Word> {
    let letters = alphabet.elements_over(pool);
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * letters.len());
        for w in &frontier {
            for x in &letters {
                let mut v = w.0.clone();
                v.push(x.clone());
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// `h(w)` for the free extension `h` of `h0`.
pub fn eval_word(h0: &GeneratorMap, w: &Word) -> Result<Element> {
    h0.eval(w.letters())
}

/// A language recognized by a generator map and a finitely supported
/// predicate on the monoid.
#[derive(Clone, Debug)]
pub struct Language {
    name: String,
    h0: GeneratorMap,
    predicate: FsSubset,
}

impl Language {
    pub fn new(h0: GeneratorMap, predicate: FsSubset) -> Result<Self> {
        if **predicate.carrier() != **h0.monoid().carrier() {
            return Err(Error::CarrierMismatch);
        }
        Ok(Language { name: "L".into(), h0, predicate })
    }

    /// The predicate `{m : keep(m)}`, decided on `Perm_S`-orbit
    /// representatives.
    pub fn from_fn(h0: GeneratorMap, support: AtomSet, mut keep: impl FnMut(&Element) -> bool) -> Result<Self> {
        let carrier = h0.monoid().carrier().clone();
        let chosen: Vec<Element> = carrier.s_orbit_reps(&support).into_iter().filter(|x| keep(x)).collect();
        let predicate = FsSubset::from_elements(carrier, support, &chosen)?;
        Language::new(h0, predicate)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn h0(&self) -> &GeneratorMap {
        &self.h0
    }

    pub fn predicate(&self) -> &FsSubset {
        &self.predicate
    }

    pub fn alphabet(&self) -> &Arc<OrbitFiniteSet> {
        self.h0.alphabet()
    }

    pub fn monoid(&self) -> &Arc<NominalMonoid> {
        self.h0.monoid()
    }

    /// A support of the language (the least support of the predicate).
    pub fn support(&self) -> &AtomSet {
        self.predicate.support()
    }

    pub fn member(&self, w: &Word) -> Result<bool> {
        self.predicate.member(&eval_word(&self.h0, w)?)
    }

    pub fn act(&self, pi: &Permutation) -> Language {
        Language { name: self.name.clone(), h0: self.h0.clone(), predicate: self.predicate.act(pi) }
    }

    pub fn complement(&self) -> Language {
        Language {
            name: format!("¬{}", self.name),
            h0: self.h0.clone(),
            predicate: self.predicate.complement(),
        }
    }

    /// The same language recognized by the image of `h`.
    pub fn restrict_to_image(&self, budget: &Budget) -> Result<Language> {
        let (image, onto) = generated_image(&self.h0, budget)?;
        let predicate = restrict_predicate(&self.predicate, &image)?;
        Ok(Language { name: self.name.clone(), h0: onto, predicate })
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = h⁻¹[P] with h = {} and P = {}", self.name, self.h0, self.predicate)
    }
}

fn restrict_predicate(p: &FsSubset, sub: &Submonoid) -> Result<FsSubset> {
    let reps: Vec<Element> = p.reps().filter_map(|x| sub.restrict(x)).collect();
    FsSubset::from_elements(sub.monoid.carrier().clone(), p.support().clone(), &reps)
}

pub fn member(l: &Language, w: &Word) -> Result<bool> {
    l.member(w)
}

/// A boolean combination, recognized by the image of the pairing of both
/// recognizers (or by the shared recognizer when they coincide).
pub fn language_boolean(op: BoolOp, l1: &Language, l2: &Language, budget: &Budget) -> Result<Language> {
    if l1.alphabet() != l2.alphabet() {
        return Err(Error::CarrierMismatch);
    }
    let name = format!("({} {} {})", l1.name, op_symbol(op), l2.name);
    if Arc::ptr_eq(l1.monoid(), l2.monoid()) && l1.h0.agrees_with(&l2.h0) {
        let predicate = l1.predicate.boolean(op, &l2.predicate)?;
        return Ok(Language { name, h0: l1.h0.clone(), predicate });
    }
    let (product, h) = pair_generator_maps(&l1.h0, &l2.h0)?;
    let (image, onto) = generated_image(&h, budget)?;
    let support: AtomSet = l1.support().union(l2.support()).copied().collect();
    let mut failure = None;
    let lang = Language::from_fn(onto, support, |z| {
        let (x, y) = product.unpair(&image.lift(z));
        match (l1.predicate.member(&x), l2.predicate.member(&y)) {
            (Ok(a), Ok(b)) => apply_op(op, a, b),
            (Err(e), _) | (_, Err(e)) => {
                failure = Some(e);
                false
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(lang?.with_name(name))
}

pub(crate) fn apply_op(op: BoolOp, a: bool, b: bool) -> bool {
    match op {
        BoolOp::Union => a || b,
        BoolOp::Intersect => a && b,
        BoolOp::Difference => a && !b,
        BoolOp::SymmetricDifference => a != b,
    }
}

fn op_symbol(op: BoolOp) -> &'static str {
    match op {
        BoolOp::Union => "∪",
        BoolOp::Intersect => "∩",
        BoolOp::Difference => "∖",
        BoolOp::SymmetricDifference => "△",
    }
}

/// The syntactic quotient of `M` with respect to `P`, and `P` transported
/// to it.
#[derive(Clone, Debug)]
pub struct Syntactic {
    pub quotient: Quotient,
    pub predicate: FsSubset,
}

impl Syntactic {
    pub fn monoid(&self) -> &Arc<NominalMonoid> {
        &self.quotient.monoid
    }
}

/// Quotient of `M` by the largest equivariant congruence saturating `P`.
///
/// A pair orbit is bad if some pair in it is separated by `P`, or if
/// multiplying it on one side by some `u` lands in a bad orbit. Two-sided
/// contexts decompose into one-sided steps, so the complement of the least
/// such set is the congruence.
pub fn syntactic_monoid(m: &Arc<NominalMonoid>, p: &FsSubset, budget: &Budget) -> Result<Syntactic> {
    if **p.carrier() != **m.carrier() {
        return Err(Error::CarrierMismatch);
    }
    let square = m.square()?.clone();
    let s = p.support().clone();
    let k = square.set().orbit_count();
    let mut bad = vec![false; k];
    for (o, flag) in bad.iter_mut().enumerate() {
        for z in square.set().s_orbit_reps_of(o, &s) {
            budget.charge(1)?;
            let (x, y) = square.unpair(&z);
            if p.member(&x)? != p.member(&y)? {
                *flag = true;
                break;
            }
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for o in 0..k {
            if bad[o] {
                continue;
            }
            'search: for j in 0..m.orbit_count() {
                for (c, u) in orbit_pair_reps(square.set(), o, m.carrier(), j) {
                    budget.charge(1)?;
                    let (x, y) = square.unpair(&c);
                    let left = square.pair(&m.mul(&u, &x), &m.mul(&u, &y)).orbit();
                    let right = square.pair(&m.mul(&x, &u), &m.mul(&y, &u)).orbit();
                    if bad[left] || bad[right] {
                        bad[o] = true;
                        changed = true;
                        break 'search;
                    }
                }
            }
        }
    }
    let keep: BTreeSet<usize> = (0..k).filter(|&o| !bad[o]).collect();
    let congruence = Congruence::from_orbits(m, &keep)?;
    let quotient = quotient(&congruence, budget)?;
    let images: Vec<Element> = p.reps().map(|x| quotient.projection.at(x)).collect();
    let predicate = FsSubset::from_elements(quotient.monoid.carrier().clone(), s, &images)?;
    Ok(Syntactic { quotient, predicate })
}

/// The syntactic monoid of a language: the recognizer is first cut down to
/// its image, then quotiented. Returns the language recognized by the
/// syntactic monoid.
pub fn syntactic_language(l: &Language, budget: &Budget) -> Result<(Language, Syntactic)> {
    let onto = l.restrict_to_image(budget)?;
    let syn = syntactic_monoid(onto.monoid(), &onto.predicate, budget)?;
    let h0 = onto.h0.then(&syn.quotient.projection)?;
    let lang = Language { name: format!("{}*", l.name), h0, predicate: syn.predicate.clone() };
    Ok((lang, syn))
}

/// Names accepted by [`builtin_language`].
pub fn language_names() -> &'static [&'static str] {
    &["L0", "first-a", "last-a", "L2", "same-ends", "even-length", "nonempty", "empty"]
}

fn atoms_alphabet() -> Arc<OrbitFiniteSet> {
    Arc::new(OrbitFiniteSet::atoms())
}

fn letter_map(monoid: &str, orbit: usize) -> Result<GeneratorMap> {
    let m = Arc::new(builder(monoid)?);
    GeneratorMap::from_fn(atoms_alphabet(), m, |x| Ok(Element { orbit, atoms: x.atoms().to_vec() }))
}

fn point_map(monoid: &str, orbit: usize) -> Result<GeneratorMap> {
    let m = Arc::new(builder(monoid)?);
    GeneratorMap::from_fn(atoms_alphabet(), m, |_| Ok(Element { orbit, atoms: Vec::new() }))
}

/// Example languages over `𝔸`. The letter `a` is the atom 1.
pub fn builtin_language(name: &str) -> Result<Language> {
    let a: AtomSet = [Atom(1)].into_iter().collect();
    let none = AtomSet::new();
    let b = Budget::default();
    let lang = match name {
        // some data value occurs twice in a row
        "L0" => Language::from_fn(letter_map("l0", 1)?, none, |x| x.orbit() == 2 || x.orbit() == 4)?,
        "first-a" => Language::from_fn(letter_map("first-proj", 1)?, a, |x| x.atoms() == [Atom(1)])?,
        "last-a" => Language::from_fn(letter_map("last-proj", 1)?, a, |x| x.atoms() == [Atom(1)])?,
        // a w a
        "L2" => {
            let ends = language_boolean(
                BoolOp::Intersect,
                &builtin_language("first-a")?,
                &builtin_language("last-a")?,
                &b,
            )?;
            let long = Language::from_fn(point_map("counter2", 1)?, none, |x| x.orbit() == 2)?;
            language_boolean(BoolOp::Intersect, &ends, &long, &b)?
        }
        // ⋃_a a 𝔸* a
        "same-ends" => {
            let (ends, h12) = pair_generator_maps(&letter_map("first-proj", 1)?, &letter_map("last-proj", 1)?)?;
            let (full, h) = pair_generator_maps(&h12, &point_map("counter2", 1)?)?;
            let (image, onto) = generated_image(&h, &b)?;
            Language::from_fn(onto, none, |z| {
                let (xy, count) = full.unpair(&image.lift(z));
                let (x, y) = ends.unpair(&xy);
                count.orbit() == 2 && x.orbit() == 1 && x.atoms() == y.atoms()
            })?
        }
        "even-length" => Language::from_fn(point_map("cyclic2", 1)?, none, |x| x.orbit() == 0)?,
        "nonempty" => Language::from_fn(letter_map("cutoff1", 1)?, none, |x| x.orbit() == 1)?,
        "empty" => Language::from_fn(point_map("trivial", 0)?, none, |_| false)?,
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(lang.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nominal::atoms;

    fn repeats(w: &Word) -> bool {
        w.letters().windows(2).any(|p| p[0] == p[1])
    }

    #[test]
    fn eval_examples() {
        let l0 = builtin_language("L0").unwrap();
        assert_eq!(eval_word(l0.h0(), &Word::empty()).unwrap(), *l0.monoid().unit());
        let abb = eval_word(l0.h0(), &Word::of_atoms(&[1, 2, 2])).unwrap();
        assert_eq!(l0.monoid().show(&abb), "NeRep(a b)");
        let p1 = builtin_language("first-a").unwrap();
        assert_eq!(p1.monoid().show(&eval_word(p1.h0(), &Word::of_atoms(&[1, 2, 3])).unwrap()), "A(a)");
    }

    #[test]
    fn membership_examples() {
        let l0 = builtin_language("L0").unwrap();
        assert!(l0.member(&Word::of_atoms(&[1, 2, 2, 1])).unwrap());
        assert!(!l0.member(&Word::of_atoms(&[1, 2, 1])).unwrap());
        assert!(!l0.member(&Word::empty()).unwrap());
        let l2 = builtin_language("L2").unwrap();
        assert!(l2.member(&Word::of_atoms(&[1, 2, 1])).unwrap());
        assert!(l2.member(&Word::of_atoms(&[1, 1])).unwrap());
        assert!(!l2.member(&Word::of_atoms(&[1])).unwrap());
        assert!(!l2.member(&Word::of_atoms(&[2, 1, 2])).unwrap());
    }

    #[test]
    fn l0_agrees_with_scan() {
        let l0 = builtin_language("L0").unwrap();
        for w in words_over(l0.alphabet(), &atoms(1..=3), 4) {
            assert_eq!(l0.member(&w).unwrap(), repeats(&w));
        }
    }

    #[test]
    fn syntactic_l0_has_four_orbits() {
        let l0 = builtin_language("L0").unwrap();
        let (syn, s) = syntactic_language(&l0, &Budget::default()).unwrap();
        assert_eq!(s.monoid().orbit_count(), 4);
        assert!(s.monoid().validate().is_valid());
        for w in words_over(l0.alphabet(), &atoms(1..=3), 4) {
            assert_eq!(syn.member(&w).unwrap(), repeats(&w));
        }
    }

    #[test]
    fn syntactic_of_empty_predicate_is_trivial() {
        let m = Arc::new(builder("barred").unwrap());
        let s = syntactic_monoid(&m, &FsSubset::empty(m.carrier().clone()), &Budget::default()).unwrap();
        assert_eq!(s.monoid().orbit_count(), 1);
    }

    #[test]
    fn same_ends_needs_two_atoms() {
        let l = builtin_language("same-ends").unwrap();
        let (_, s) = syntactic_language(&l, &Budget::default()).unwrap();
        assert!(s.monoid().carrier().orbits().iter().any(|o| o.dim() == 2));
        assert!(s.monoid().carrier().bound() <= 2);
    }
}
