//! Named example monoids.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::monoid::{product_monoid, MonoidMorphism, NominalMonoid};
use crate::nominal::{Atom, Element, OrbitDescriptor, OrbitFiniteSet};

const NAMES: &[&str] = &[
    "trivial",
    "cyclic2",
    "cyclic3",
    "cutoff1",
    "cutoff2",
    "first-proj",
    "last-proj",
    "zero-adjoined",
    "barred",
    "pair-zero",
    "l0",
    "counter2",
];

pub fn catalog_names() -> &'static [&'static str] {
    NAMES
}

/// Every catalog monoid, validated.
pub fn catalog() -> Result<Vec<NominalMonoid>> {
    NAMES.iter().map(|n| builder(n)).collect()
}

pub fn builder(name: &str) -> Result<NominalMonoid> {
    match name {
        "trivial" | "1" => trivial(),
        "first-proj" | "p1" => first_proj(),
        "last-proj" | "p2" => last_proj(),
        "zero-adjoined" | "n" => zero_adjoined(),
        "barred" | "m" => barred(),
        "pair-zero" => pair_zero(),
        "l0" => l0_recognizer(),
        "counter2" => counter(2),
        _ => {
            if let Some(k) = name.strip_prefix("cyclic").and_then(|k| k.parse().ok()) {
                cyclic(k)
            } else if let Some(n) = name.strip_prefix("cutoff").and_then(|n| n.parse().ok()) {
                cutoff(n)
            } else {
                Err(Error::UnknownName(name.to_string()))
            }
        }
    }
}

const QUOTIENTS: &[&str] = &["ex-compare", "no-s-quot", "proj-p1", "p1-collapse"];

pub fn quotient_names() -> &'static [&'static str] {
    QUOTIENTS
}

/// Named surjective morphisms between catalog monoids.
pub fn catalog_quotient(name: &str) -> Result<MonoidMorphism> {
    let zero_of = |target: &Arc<NominalMonoid>| el(target.carrier().orbit_count() - 1, &[]);
    match name {
        // barred ↠ zero-adjoined, everything barred goes to 0
        "ex-compare" => {
            let (m, n) = (Arc::new(barred()?), Arc::new(zero_adjoined()?));
            let zero = zero_of(&n);
            MonoidMorphism::from_fn(m, n, |x| Ok(if x.orbit < 2 { x.clone() } else { zero.clone() }))
        }
        // pair-zero ↠ zero-adjoined, pairs go to 0
        "no-s-quot" => {
            let (m, n) = (Arc::new(pair_zero()?), Arc::new(zero_adjoined()?));
            let zero = zero_of(&n);
            MonoidMorphism::from_fn(m, n, |x| Ok(if x.orbit < 2 { x.clone() } else { zero.clone() }))
        }
        "proj-p1" => {
            let (m, n) = (Arc::new(first_proj()?), Arc::new(trivial()?));
            MonoidMorphism::from_fn(m, n, |_| Ok(el(0, &[])))
        }
        // first projection P1 × P1 ↠ P1; the diagonal is a support-preserving section
        "p1-collapse" => {
            let p1 = Arc::new(first_proj()?);
            Ok(product_monoid(&p1, &p1)?.left)
        }
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

fn set_of(orbits: &[(&str, usize)]) -> Arc<OrbitFiniteSet> {
    Arc::new(OrbitFiniteSet::new(
        orbits.iter().map(|&(label, dim)| OrbitDescriptor::strong(label, dim)).collect(),
    ))
}

fn el(orbit: usize, atoms: &[Atom]) -> Element {
    Element { orbit, atoms: atoms.to_vec() }
}

fn trivial() -> Result<NominalMonoid> {
    let carrier = set_of(&[("1", 0)]);
    NominalMonoid::build("trivial", carrier, el(0, &[]), |x, _| Ok(x.clone()))
}

/// `Z/k` on `k` equivariant points `0, …, k-1`.
pub fn cyclic(k: usize) -> Result<NominalMonoid> {
    if k == 0 {
        return Err(Error::Invalid("cyclic group of order 0".into()));
    }
    let labels: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    let orbits: Vec<(&str, usize)> = labels.iter().map(|l| (l.as_str(), 0)).collect();
    NominalMonoid::build(format!("cyclic{k}"), set_of(&orbits), el(0, &[]), |x, y| {
        Ok(el((x.orbit + y.orbit) % k, &[]))
    })
}

/// Saturating length counter `{1, x, x², …, x^n = x^(n+1)}`.
fn counter(n: usize) -> Result<NominalMonoid> {
    let labels: Vec<String> =
        (0..=n).map(|i| if i == 0 { "1".to_string() } else { format!("X{i}") }).collect();
    let orbits: Vec<(&str, usize)> = labels.iter().map(|l| (l.as_str(), 0)).collect();
    NominalMonoid::build(format!("counter{n}"), set_of(&orbits), el(0, &[]), |x, y| {
        Ok(el((x.orbit + y.orbit).min(n), &[]))
    })
}

/// Equality patterns of words of length `≤ n`, in first-occurrence form.
fn word_patterns(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &frontier {
            let distinct = p.iter().max().map_or(0, |m| m + 1);
            for c in 0..=distinct {
                let mut q: Vec<usize> = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn pattern_label(p: &[usize]) -> String {
    if p.is_empty() {
        return "1".to_string();
    }
    p.iter().map(|&c| (b'A' + c as u8) as char).collect()
}

/// Words of length at most `n`; multiplication concatenates and keeps the
/// first `n` letters.
pub fn cutoff(n: usize) -> Result<NominalMonoid> {
    let patterns = word_patterns(n);
    let labels: Vec<String> = patterns.iter().map(|p| pattern_label(p)).collect();
    let orbits: Vec<(&str, usize)> = patterns
        .iter()
        .zip(&labels)
        .map(|(p, l)| (l.as_str(), p.iter().max().map_or(0, |m| m + 1)))
        .collect();
    let index: BTreeMap<Vec<usize>, usize> =
        patterns.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let word = |x: &Element| -> Vec<Atom> { patterns[x.orbit].iter().map(|&c| x.atoms[c]).collect() };
    NominalMonoid::build(format!("cutoff{n}"), set_of(&orbits), el(0, &[]), |x, y| {
        let mut w = word(x);
        w.extend(word(y));
        w.truncate(n);
        let mut distinct: Vec<Atom> = Vec::new();
        let pattern: Vec<usize> = w
            .iter()
            .map(|a| match distinct.iter().position(|b| b == a) {
                Some(i) => i,
                None => {
                    distinct.push(*a);
                    distinct.len() - 1
                }
            })
            .collect();
        Ok(el(index[&pattern], &distinct))
    })
}

fn first_proj() -> Result<NominalMonoid> {
    NominalMonoid::build("first-proj", set_of(&[("1", 0), ("A", 1)]), el(0, &[]), |x, y| {
        Ok(if x.orbit == 0 { y.clone() } else { x.clone() })
    })
}

fn last_proj() -> Result<NominalMonoid> {
    NominalMonoid::build("last-proj", set_of(&[("1", 0), ("A", 1)]), el(0, &[]), |x, y| {
        Ok(if y.orbit == 0 { x.clone() } else { y.clone() })
    })
}

/// `1 + 𝔸 + 0` with `x·y = 0` for `x, y ≠ 1`.
fn zero_adjoined() -> Result<NominalMonoid> {
    NominalMonoid::build("zero-adjoined", set_of(&[("1", 0), ("A", 1), ("0", 0)]), el(0, &[]), |x, y| {
        Ok(match (x.orbit, y.orbit) {
            (0, _) => y.clone(),
            (_, 0) => x.clone(),
            _ => el(2, &[]),
        })
    })
}

/// `1 + 𝔸 + 1̄ + 𝔸̄`: away from the unit, both factors are barred and the
/// first one other than `1̄` wins.
fn barred() -> Result<NominalMonoid> {
    let carrier = set_of(&[("1", 0), ("A", 1), ("1bar", 0), ("Abar", 1)]);
    let bar = |x: &Element| -> Element {
        match x.orbit {
            0 | 2 => el(2, &[]),
            _ => el(3, &x.atoms),
        }
    };
    NominalMonoid::build("barred", carrier, el(0, &[]), move |x, y| {
        Ok(match (x.orbit, y.orbit) {
            (0, _) => y.clone(),
            (_, 0) => x.clone(),
            _ => {
                let (bx, by) = (bar(x), bar(y));
                if bx.orbit == 2 {
                    by
                } else {
                    bx
                }
            }
        })
    })
}

/// `1 + 𝔸 + 𝔸∗𝔸 + 0`: two distinct letters form a pair, everything else
/// longer collapses to `0`.
fn pair_zero() -> Result<NominalMonoid> {
    let carrier = set_of(&[("1", 0), ("A", 1), ("AB", 2), ("0", 0)]);
    NominalMonoid::build("pair-zero", carrier, el(0, &[]), |x, y| {
        Ok(match (x.orbit, y.orbit) {
            (0, _) => y.clone(),
            (_, 0) => x.clone(),
            (1, 1) if x.atoms[0] != y.atoms[0] => el(2, &[x.atoms[0], y.atoms[0]]),
            _ => el(3, &[]),
        })
    })
}

/// Recognizer for "some letter occurs twice in a row": a non-empty word is
/// abstracted to its first letter, last letter and a repeat flag.
fn l0_recognizer() -> Result<NominalMonoid> {
    let carrier = set_of(&[("1", 0), ("Eq", 1), ("EqRep", 1), ("Ne", 2), ("NeRep", 2)]);
    let parts = |x: &Element| -> (Atom, Atom, bool) {
        match x.orbit {
            1 | 2 => (x.atoms[0], x.atoms[0], x.orbit == 2),
            _ => (x.atoms[0], x.atoms[1], x.orbit == 4),
        }
    };
    NominalMonoid::build("l0", carrier, el(0, &[]), move |x, y| {
        if x.orbit == 0 {
            return Ok(y.clone());
        }
        if y.orbit == 0 {
            return Ok(x.clone());
        }
        let (f1, l1, r1) = parts(x);
        let (f2, l2, r2) = parts(y);
        let rep = r1 || r2 || l1 == f2;
        Ok(if f1 == l2 {
            el(if rep { 2 } else { 1 }, &[f1])
        } else {
            el(if rep { 4 } else { 3 }, &[f1, l2])
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds() {
        for name in catalog_names() {
            let m = builder(name).unwrap();
            assert!(m.validate().is_valid(), "{name}");
        }
        assert!(matches!(builder("nope"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn quotients_are_surjective_morphisms() {
        for name in quotient_names() {
            let e = catalog_quotient(name).unwrap();
            assert!(e.validate().is_valid(), "{name}");
            assert!(e.is_surjective(), "{name}");
        }
    }

    #[test]
    fn cutoff_orbits() {
        assert_eq!(cutoff(2).unwrap().orbit_count(), 4);
        assert_eq!(cutoff(3).unwrap().orbit_count(), 9);
    }

    #[test]
    fn zero_adjoined_products() {
        let n = builder("zero-adjoined").unwrap();
        let a = n.carrier().element(1, &[Atom(1)]).unwrap();
        let b = n.carrier().element(1, &[Atom(2)]).unwrap();
        assert_eq!(n.multiply(&a, &b).unwrap().orbit(), 2);
        assert_eq!(n.multiply(n.unit(), &a).unwrap(), a);
    }
}
