use std::sync::Arc;

use crate::budget::Budget;
use crate::error::Result;
use crate::monoid::{fixed_elements, MonoidMorphism, NominalMonoid};
use crate::nominal::{Element, EquivariantMap, OrbitImage};

fn apply(assigned: &[Option<OrbitImage>], n: &NominalMonoid, x: &Element) -> Option<Element> {
    let img = assigned[x.orbit()].as_ref()?;
    let tuple: Vec<_> = img.positions.iter().map(|&p| x.atoms()[p]).collect();
    Some(n.carrier().element_unchecked(img.target_orbit, &tuple))
}

/// Checks multiplication on every pair of assigned orbits whose product
/// also lands in an assigned orbit.
fn consistent(m: &NominalMonoid, n: &NominalMonoid, assigned: &[Option<OrbitImage>], last: usize) -> bool {
    for other in 0..assigned.len() {
        if assigned[other].is_none() {
            continue;
        }
        for (a, b) in [(last, other), (other, last)] {
            for (x, y) in m.pair_reps(a, b) {
                let xy = m.mul(&x, &y);
                let Some(lhs) = apply(assigned, n, &xy) else { continue };
                let (Some(fx), Some(fy)) = (apply(assigned, n, &x), apply(assigned, n, &y)) else {
                    continue;
                };
                if lhs != n.mul(&fx, &fy) {
                    return false;
                }
            }
        }
    }
    true
}

fn search(
    m: &NominalMonoid,
    n: &NominalMonoid,
    assigned: &mut Vec<Option<OrbitImage>>,
    used: &mut Vec<bool>,
    next: usize,
    budget: &Budget,
) -> Result<bool> {
    if next == assigned.len() {
        return Ok(apply(assigned, n, m.unit()).as_ref() == Some(n.unit())
            && (0..next).all(|i| consistent(m, n, assigned, i)));
    }
    let src = &m.carrier().orbits()[next];
    for t in 0..n.orbit_count() {
        let tgt = &n.carrier().orbits()[t];
        if used[t] || tgt.dim() != src.dim() || tgt.group_order() != src.group_order() {
            continue;
        }
        let candidates: Vec<Element> = fixed_elements(n.carrier(), src.dim(), src.generators())
            .into_iter()
            .filter(|y| y.orbit() == t)
            .collect();
        for y in candidates {
            budget.charge(1)?;
            assigned[next] = Some(OrbitImage::new(t, y.atoms().iter().map(|a| a.0 as usize - 1).collect()));
            used[t] = true;
            if consistent(m, n, assigned, next) && search(m, n, assigned, used, next + 1, budget)? {
                return Ok(true);
            }
            used[t] = false;
            assigned[next] = None;
        }
    }
    Ok(false)
}

fn find_map(m: &NominalMonoid, n: &NominalMonoid, budget: &Budget) -> Result<Option<EquivariantMap>> {
    if m.orbit_count() != n.orbit_count() {
        return Ok(None);
    }
    let shape = |x: &NominalMonoid| {
        let mut s: Vec<(usize, usize)> =
            x.carrier().orbits().iter().map(|o| (o.dim(), o.group_order())).collect();
        s.sort_unstable();
        s
    };
    if shape(m) != shape(n) {
        return Ok(None);
    }
    let mut assigned = vec![None; m.orbit_count()];
    let mut used = vec![false; n.orbit_count()];
    if !search(m, n, &mut assigned, &mut used, 0, budget)? {
        return Ok(None);
    }
    let assignment: Vec<OrbitImage> = assigned.into_iter().map(|a| a.expect("complete")).collect();
    Ok(Some(EquivariantMap::from_parts(m.carrier().clone(), n.carrier().clone(), assignment)))
}

/// An isomorphism `m → n`, if one exists.
pub fn find_isomorphism(
    m: &Arc<NominalMonoid>,
    n: &Arc<NominalMonoid>,
    budget: &Budget,
) -> Result<Option<MonoidMorphism>> {
    match find_map(m, n, budget)? {
        Some(map) => Ok(Some(MonoidMorphism::from_parts(m.clone(), n.clone(), map)?)),
        None => Ok(None),
    }
}

pub fn isomorphic(m: &NominalMonoid, n: &NominalMonoid, budget: &Budget) -> Result<bool> {
    Ok(find_map(m, n, budget)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::builder;

    #[test]
    fn p1_and_p2_are_not_isomorphic() {
        let b = Budget::default();
        let p1 = builder("first-proj").unwrap();
        let p2 = builder("last-proj").unwrap();
        assert!(isomorphic(&p1, &p1, &b).unwrap());
        assert!(!isomorphic(&p1, &p2, &b).unwrap());
    }

    #[test]
    fn isomorphism_is_a_morphism() {
        let b = Budget::default();
        let m = Arc::new(builder("l0").unwrap());
        let iso = find_isomorphism(&m, &m, &b).unwrap().unwrap();
        assert!(iso.validate().is_valid());
        assert!(iso.is_injective() && iso.is_surjective());
    }
}
