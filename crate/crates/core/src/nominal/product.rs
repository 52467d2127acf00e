//! Orbits of binary products `X × Y`.
//!
//! An orbit of `X × Y` is determined by an orbit of `X`, an orbit of `Y` and
//! an equality pattern saying which positions of the right tuple repeat
//! atoms of the left tuple. Patterns are enumerated and minimized over the
//! two positional groups; each surviving pattern becomes one orbit of the
//! product, laid out as `left atoms ++ fresh right atoms`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::nominal::atom::Atom;
use crate::nominal::map::{EquivariantMap, OrbitImage};
use crate::nominal::orbit::{
    invert_positions, Element, OrbitDescriptor, PositionPerm, DEFAULT_GROUP_CAP,
};
use crate::nominal::set::OrbitFiniteSet;

/// Default cap on the number of product orbits.
pub const DEFAULT_ORBIT_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
struct PairLayout {
    left_orbit: usize,
    right_orbit: usize,
    left_dim: usize,
    /// Right position `j` sits at combined position `pattern[j]`.
    pattern: Vec<usize>,
}

/// `X × Y` with its pairing and unpairing maps.
#[derive(Clone, Debug)]
pub struct ProductSet {
    left: Arc<OrbitFiniteSet>,
    right: Arc<OrbitFiniteSet>,
    set: Arc<OrbitFiniteSet>,
    layouts: Vec<PairLayout>,
    index: HashMap<(usize, usize, Vec<usize>), usize>,
}

/// Rewrites `pattern` for the representatives `x ∘ g`, `y ∘ h`.
fn transform_pattern(pattern: &[usize], n: usize, g_inv: &[usize], h: &[usize]) -> Vec<usize> {
    let mut fresh_map: Vec<(usize, usize)> = Vec::new();
    h.iter()
        .map(|&hj| {
            let q = pattern[hj];
            if q < n {
                g_inv[q]
            } else if let Some(&(_, v)) = fresh_map.iter().find(|(old, _)| *old == q) {
                v
            } else {
                let v = n + fresh_map.len();
                fresh_map.push((q, v));
                v
            }
        })
        .collect()
}

fn canonical_pattern(pattern: &[usize], g: &OrbitDescriptor, h: &OrbitDescriptor) -> Vec<usize> {
    let n = g.dim();
    let mut best: Option<Vec<usize>> = None;
    for gp in g.group() {
        let g_inv = invert_positions(gp);
        for hp in h.group() {
            let cand = transform_pattern(pattern, n, &g_inv, hp);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

/// All canonical equality patterns for an orbit pair, sorted.
pub(crate) fn pair_patterns(g: &OrbitDescriptor, h: &OrbitDescriptor) -> Vec<Vec<usize>> {
    let n = g.dim();
    let m = h.dim();
    let mut out = BTreeSet::new();
    let mut cur: Vec<usize> = Vec::with_capacity(m);
    fn rec(
        n: usize,
        m: usize,
        fresh_used: usize,
        cur: &mut Vec<usize>,
        g: &OrbitDescriptor,
        h: &OrbitDescriptor,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        if cur.len() == m {
            out.insert(canonical_pattern(cur, g, h));
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, m, fresh_used, cur, g, h, out);
                cur.pop();
            }
        }
        cur.push(n + fresh_used);
        rec(n, m, fresh_used + 1, cur, g, h, out);
        cur.pop();
    }
    rec(n, m, 0, &mut cur, g, h, &mut out);
    out.into_iter().collect()
}

/// Positional group of the product orbit with the given layout.
fn product_group(
    layout: &PairLayout,
    g: &OrbitDescriptor,
    h: &OrbitDescriptor,
    d: usize,
    cap: usize,
) -> Result<Vec<PositionPerm>> {
    let n = layout.left_dim;
    let mut out = BTreeSet::new();
    for gp in g.group() {
        'h: for hp in h.group() {
            let mut sigma: Vec<Option<usize>> = vec![None; d];
            sigma[..n].iter_mut().zip(gp).for_each(|(s, &v)| *s = Some(v));
            for (j, &hj) in hp.iter().enumerate() {
                let src = layout.pattern[j];
                let dst = layout.pattern[hj];
                match sigma[src] {
                    Some(v) if v != dst => continue 'h,
                    Some(_) => {}
                    None => sigma[src] = Some(dst),
                }
            }
            let sigma: Vec<usize> = match sigma.into_iter().collect::<Option<Vec<usize>>>() {
                Some(s) => s,
                None => continue,
            };
            let distinct: BTreeSet<usize> = sigma.iter().copied().collect();
            if distinct.len() == d {
                out.insert(sigma);
                if out.len() > cap {
                    return Err(Error::GroupCap { cap });
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

impl ProductSet {
    pub fn new(left: Arc<OrbitFiniteSet>, right: Arc<OrbitFiniteSet>) -> Result<Self> {
        Self::with_caps(left, right, DEFAULT_ORBIT_CAP, DEFAULT_GROUP_CAP)
    }

    pub fn with_caps(
        left: Arc<OrbitFiniteSet>,
        right: Arc<OrbitFiniteSet>,
        orbit_cap: usize,
        group_cap: usize,
    ) -> Result<Self> {
        let mut orbits = Vec::new();
        let mut layouts = Vec::new();
        let mut index = HashMap::new();
        for (i, g) in left.orbits().iter().enumerate() {
            for (j, h) in right.orbits().iter().enumerate() {
                let patterns = pair_patterns(g, h);
                let many = patterns.len() > 1;
                for (k, pattern) in patterns.into_iter().enumerate() {
                    let n = g.dim();
                    let d = n + pattern.iter().filter(|&&p| p >= n).count();
                    let layout = PairLayout { left_orbit: i, right_orbit: j, left_dim: n, pattern };
                    let group = product_group(&layout, g, h, d, group_cap)?;
                    let label = if many {
                        format!("[{},{}]#{}", g.label(), h.label(), k)
                    } else {
                        format!("[{},{}]", g.label(), h.label())
                    };
                    orbits.push(OrbitDescriptor::from_group_elements(label, d, group, group_cap)?);
                    index.insert((i, j, layout.pattern.clone()), layouts.len());
                    layouts.push(layout);
                    if layouts.len() > orbit_cap {
                        return Err(Error::OrbitCap { cap: orbit_cap });
                    }
                }
            }
        }
        Ok(ProductSet { left, right, set: Arc::new(OrbitFiniteSet::new(orbits)), layouts, index })
    }

    /// `X × X`.
    pub fn square(x: Arc<OrbitFiniteSet>) -> Result<Self> {
        ProductSet::new(x.clone(), x)
    }

    pub fn left(&self) -> &Arc<OrbitFiniteSet> {
        &self.left
    }

    pub fn right(&self) -> &Arc<OrbitFiniteSet> {
        &self.right
    }

    pub fn set(&self) -> &Arc<OrbitFiniteSet> {
        &self.set
    }

    /// Left and right orbit indices of a product orbit.
    pub fn components(&self, orbit: usize) -> (usize, usize) {
        let l = &self.layouts[orbit];
        (l.left_orbit, l.right_orbit)
    }

    /// Combined-tuple positions of the right component of a product orbit.
    pub fn right_positions(&self, orbit: usize) -> &[usize] {
        &self.layouts[orbit].pattern
    }

    pub fn left_dim(&self, orbit: usize) -> usize {
        self.layouts[orbit].left_dim
    }

    /// The product orbits lying over a given pair of component orbits.
    pub fn orbits_over(&self, left_orbit: usize, right_orbit: usize) -> Vec<usize> {
        (0..self.layouts.len())
            .filter(|&o| {
                let l = &self.layouts[o];
                l.left_orbit == left_orbit && l.right_orbit == right_orbit
            })
            .collect()
    }

    pub fn pair(&self, x: &Element, y: &Element) -> Element {
        let g = &self.left.orbits()[x.orbit];
        let h = &self.right.orbits()[y.orbit];
        let n = g.dim();
        let mut best: Option<(Vec<usize>, Vec<Atom>)> = None;
        for gp in g.group() {
            let xs: Vec<Atom> = gp.iter().map(|&i| x.atoms[i]).collect();
            for hp in h.group() {
                let mut combined = xs.clone();
                let pattern: Vec<usize> = hp
                    .iter()
                    .map(|&j| {
                        let a = y.atoms[j];
                        match combined.iter().position(|&b| b == a) {
                            Some(p) => p,
                            None => {
                                combined.push(a);
                                combined.len() - 1
                            }
                        }
                    })
                    .collect();
                debug_assert!(combined.len() >= n);
                if best.as_ref().is_none_or(|(p, _)| pattern < *p) {
                    best = Some((pattern, combined));
                }
            }
        }
        let (pattern, combined) = best.expect("groups contain the identity");
        let orbit = self.index[&(x.orbit, y.orbit, pattern)];
        self.set.element_unchecked(orbit, &combined)
    }

    pub fn unpair(&self, z: &Element) -> (Element, Element) {
        let l = &self.layouts[z.orbit];
        let xs = &z.atoms[..l.left_dim];
        let ys: Vec<Atom> = l.pattern.iter().map(|&p| z.atoms[p]).collect();
        (
            self.left.element_unchecked(l.left_orbit, xs),
            self.right.element_unchecked(l.right_orbit, &ys),
        )
    }

    /// Orbit representative of each product orbit, unpaired.
    pub fn rep_pairs(&self) -> Vec<(Element, Element)> {
        (0..self.set.orbit_count()).map(|o| self.unpair(&self.set.rep(o))).collect()
    }

    pub fn left_projection(&self) -> EquivariantMap {
        let assignment = self
            .layouts
            .iter()
            .map(|l| OrbitImage::new(l.left_orbit, (0..l.left_dim).collect()))
            .collect();
        EquivariantMap::from_parts(self.set.clone(), self.left.clone(), assignment)
    }

    pub fn right_projection(&self) -> EquivariantMap {
        let assignment = self
            .layouts
            .iter()
            .map(|l| OrbitImage::new(l.right_orbit, l.pattern.clone()))
            .collect();
        EquivariantMap::from_parts(self.set.clone(), self.right.clone(), assignment)
    }
}

/// Representative pairs `(x, y)` for every orbit of `orbit(g) × orbit(h)`,
/// with `x` over atoms `1..=n` and fresh right atoms after it.
pub(crate) fn orbit_pair_reps(
    left: &OrbitFiniteSet,
    left_orbit: usize,
    right: &OrbitFiniteSet,
    right_orbit: usize,
) -> Vec<(Element, Element)> {
    let g = &left.orbits()[left_orbit];
    let h = &right.orbits()[right_orbit];
    let n = g.dim();
    pair_patterns(g, h)
        .into_iter()
        .map(|pattern| {
            let d = n + pattern.iter().filter(|&&p| p >= n).count();
            let combined: Vec<Atom> = (1..=d as u32).map(Atom).collect();
            let ys: Vec<Atom> = pattern.iter().map(|&p| combined[p]).collect();
            (
                left.element_unchecked(left_orbit, &combined[..n]),
                right.element_unchecked(right_orbit, &ys),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nominal::atom::Permutation;

    fn a() -> Arc<OrbitFiniteSet> {
        Arc::new(OrbitFiniteSet::atoms())
    }

    #[test]
    fn atoms_squared_has_two_orbits() {
        let p = ProductSet::square(a()).unwrap();
        assert_eq!(p.set().orbit_count(), 2);
    }

    #[test]
    fn unit_times_x_matches_x() {
        let one = Arc::new(OrbitFiniteSet::singleton("1"));
        let x = Arc::new(OrbitFiniteSet::strong(&[0, 1, 2]));
        let p = ProductSet::new(one, x.clone()).unwrap();
        assert_eq!(p.set().orbit_count(), x.orbit_count());
    }

    #[test]
    fn strong_pair_times_atoms_has_three_orbits() {
        let p = ProductSet::new(Arc::new(OrbitFiniteSet::strong(&[2])), a()).unwrap();
        assert_eq!(p.set().orbit_count(), 3);
    }

    #[test]
    fn pair_unpair_roundtrip() {
        let sym = Arc::new(OrbitFiniteSet::new(vec![
            OrbitDescriptor::new("P", 2, vec![vec![1, 0]]).unwrap(),
        ]));
        let p = ProductSet::new(sym.clone(), a()).unwrap();
        // {a,b} × A: c equal to one of them (1 orbit by symmetry) or fresh
        assert_eq!(p.set().orbit_count(), 2);
        let x = sym.element(0, &[Atom(4), Atom(2)]).unwrap();
        let y = a().element(0, &[Atom(4)]).unwrap();
        let z = p.pair(&x, &y);
        assert_eq!(p.unpair(&z), (x.clone(), y.clone()));
        let pi = Permutation::transposition(Atom(4), Atom(7));
        assert_eq!(p.pair(&sym.act(&pi, &x), &a().act(&pi, &y)), p.set().act(&pi, &z));
    }
}
