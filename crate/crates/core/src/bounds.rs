//! Support bounds, s-bounded morphisms and the classification of monoid
//! quotients.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::monoid::{
    builder, closure_orbits, congruence_generated, enumerate_monoid_maps, pair_generator_maps, product_monoid,
    quotient, submonoid_generated, submonoid_on, GeneratorMap, MonoidMorphism, NominalMonoid, ProductMonoid,
    Submonoid,
};
use crate::nominal::{AtomSet, Element, OrbitFiniteSet};

/// A bound `s : Σ* → P_k 𝔸` on the supports of evaluated words.
#[derive(Clone, Debug)]
pub enum SupportBound {
    /// `s(w) = S` for every word.
    Constant(AtomSet),
    /// `s(w) = supp q(w)` for the free extension `q` of the map.
    ViaMorphism(GeneratorMap),
}

impl SupportBound {
    /// `s(a1⋯an) = {a1}` on `𝔸`, realized through the first-letter monoid.
    pub fn first_letter() -> Result<Self> {
        let p1 = Arc::new(builder("first-proj")?);
        let q0 = GeneratorMap::from_fn(Arc::new(OrbitFiniteSet::atoms()), p1, |x| {
            Ok(Element { orbit: 1, atoms: x.atoms().to_vec() })
        })?;
        Ok(SupportBound::ViaMorphism(q0))
    }

    /// The size bound `k`.
    pub fn k(&self) -> usize {
        match self {
            SupportBound::Constant(s) => s.len(),
            SupportBound::ViaMorphism(q0) => q0.monoid().carrier().bound(),
        }
    }

    pub fn eval(&self, word: &[Element]) -> Result<AtomSet> {
        match self {
            SupportBound::Constant(s) => Ok(s.clone()),
            SupportBound::ViaMorphism(q0) => Ok(q0.eval(word)?.support()),
        }
    }
}

impl fmt::Display for SupportBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SupportBound::Constant(s) => write!(f, "const {}", show_atoms(s)),
            SupportBound::ViaMorphism(q0) => write!(f, "via {}", q0.monoid().name()),
        }
    }
}

pub(crate) fn show_atoms(s: &AtomSet) -> String {
    let parts: Vec<String> = s.iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

/// An image element whose support escapes the bound.
#[derive(Clone, Debug, Serialize)]
pub struct BoundWitness {
    pub value: String,
    pub value_support: Vec<String>,
    pub bound: String,
    pub bound_support: Vec<String>,
}

impl fmt::Display for BoundWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "supp {} = {{{}}} ⊄ {{{}}} = supp {}",
            self.value,
            self.value_support.join(", "),
            self.bound_support.join(", "),
            self.bound
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub bounded: bool,
    pub k: usize,
    /// Orbits of the image of `h` (or of `⟨h, q⟩`).
    pub image_orbits: usize,
    pub witness: Option<BoundWitness>,
}

fn witness(m: &NominalMonoid, x: &Element, bound: String, bound_support: &AtomSet) -> BoundWitness {
    BoundWitness {
        value: m.show(x),
        value_support: x.support().iter().map(|a| a.to_string()).collect(),
        bound,
        bound_support: bound_support.iter().map(|a| a.to_string()).collect(),
    }
}

fn letter_orbits(h0: &GeneratorMap) -> Vec<usize> {
    h0.alphabet().reps().iter().map(|x| h0.map().assignment()[x.orbit()].target_orbit).collect()
}

/// Decides `supp h(w) ⊆ s(w)` for every word `w`.
///
/// Both sides are equivariant in `w`, so it suffices to check one
/// representative per orbit of the image of `⟨h, q⟩`.
pub fn is_s_bounded(h0: &GeneratorMap, s: &SupportBound, budget: &Budget) -> Result<BoundReport> {
    match s {
        SupportBound::Constant(set) => {
            let orbits = closure_orbits(h0.monoid(), &letter_orbits(h0), budget)?;
            let bad = orbits.iter().find(|&&o| h0.monoid().carrier().orbits()[o].dim() > 0);
            let witness = bad.map(|&o| {
                // rename away from S so the escape is visible
                let x = h0.monoid().carrier().s_orbit_reps_of(o, set).into_iter().last().expect("orbit is non-empty");
                self::witness(h0.monoid(), &x, "S".into(), set)
            });
            Ok(BoundReport { bounded: witness.is_none(), k: set.len(), image_orbits: orbits.len(), witness })
        }
        SupportBound::ViaMorphism(q0) => {
            if h0.alphabet() != q0.alphabet() {
                return Err(Error::CarrierMismatch);
            }
            let (p, h) = pair_generator_maps(h0, q0)?;
            let orbits = closure_orbits(&p.monoid, &letter_orbits(&h), budget)?;
            let mut found = None;
            for &o in &orbits {
                let (x, y) = p.unpair(&p.monoid.carrier().rep(o));
                if !x.support().is_subset(&y.support()) {
                    found = Some(witness(h0.monoid(), &x, q0.monoid().show(&y), &y.support()));
                    break;
                }
            }
            Ok(BoundReport { bounded: found.is_none(), k: s.k(), image_orbits: orbits.len(), witness: found })
        }
    }
}

/// An element of the image of `h` with more than `k` atoms in its support.
pub fn exceeds_support(h0: &GeneratorMap, k: usize, budget: &Budget) -> Result<Option<Element>> {
    let orbits = closure_orbits(h0.monoid(), &letter_orbits(h0), budget)?;
    Ok(orbits
        .into_iter()
        .find(|&o| h0.monoid().carrier().orbits()[o].dim() > k)
        .map(|o| h0.monoid().carrier().rep(o)))
}

/// The coimage of the pairing of two s-bounded maps.
#[derive(Clone, Debug)]
pub struct Join {
    /// `Σ → E`, generating all of `E`.
    pub map: GeneratorMap,
    pub image: Submonoid,
    pub product: ProductMonoid,
    pub left: MonoidMorphism,
    pub right: MonoidMorphism,
    /// s-boundedness of the join, re-verified.
    pub report: BoundReport,
}

pub fn join_s_bounded(h1: &GeneratorMap, h2: &GeneratorMap, s: &SupportBound, budget: &Budget) -> Result<Join> {
    for h in [h1, h2] {
        let r = is_s_bounded(h, s, budget)?;
        if let Some(w) = r.witness {
            return Err(Error::Invalid(format!("{} is not s-bounded: {w}", h.monoid().name())));
        }
    }
    let (product, h) = pair_generator_maps(h1, h2)?;
    let gens: Vec<Element> = h.alphabet().reps().iter().map(|x| h.map().apply_unchecked(x)).collect();
    let image = submonoid_generated(&product.monoid, &gens, budget)?;
    let map = h.corestrict(&image)?;
    let left = image.inclusion.then(&product.left)?;
    let right = image.inclusion.then(&product.right)?;
    let report = is_s_bounded(&map, s, budget)?;
    Ok(Join { map, image, product, left, right, report })
}

/// Flags and certificates of a surjective morphism `e : M ↠ N`.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientClass {
    pub support_preserving: bool,
    pub support_reflecting: bool,
    pub msr: bool,
    /// Orbits of `R_e = {m : supp e(m) = supp m}`.
    pub reflecting_orbits: Vec<usize>,
    /// Orbits of a submonoid inside `R_e` mapping onto `N`.
    pub certificate: Option<Vec<usize>>,
    /// Candidate orbit sets fully examined by the search.
    pub subsets_examined: usize,
    pub witness: Option<String>,
}

/// Largest `R_e` the MSR search accepts.
pub const MSR_SEARCH_CAP: usize = 12;

pub fn classify_quotient(e: &MonoidMorphism, budget: &Budget) -> Result<QuotientClass> {
    if !e.is_surjective() {
        return Err(Error::InvalidMorphism("not surjective".into()));
    }
    let m = e.dom();
    let n = e.cod();
    let assignment = e.map().assignment();
    let mut reflecting_orbits = Vec::new();
    let mut witness = None;
    for (o, img) in assignment.iter().enumerate() {
        if img.positions.len() == m.carrier().orbits()[o].dim() {
            reflecting_orbits.push(o);
        } else if witness.is_none() {
            let x = m.carrier().rep(o);
            witness = Some(format!(
                "supp e({}) = {} ⊊ {}",
                m.show(&x),
                show_atoms(&e.map().apply_unchecked(&x).support()),
                show_atoms(&x.support())
            ));
        }
    }
    let support_preserving = reflecting_orbits.len() == m.orbit_count();
    let mut covered = vec![false; n.orbit_count()];
    for &o in &reflecting_orbits {
        covered[assignment[o].target_orbit] = true;
    }
    let support_reflecting = covered.iter().all(|&c| c);
    if !support_reflecting {
        let missing = covered.iter().position(|&c| !c).expect("uncovered orbit");
        witness = Some(format!(
            "no element of {} has a preimage of the same support",
            n.show(&n.carrier().rep(missing))
        ));
    }
    let mut class = QuotientClass {
        support_preserving,
        support_reflecting,
        msr: false,
        reflecting_orbits: reflecting_orbits.clone(),
        certificate: None,
        subsets_examined: 0,
        witness,
    };
    if support_preserving {
        class.msr = true;
        class.certificate = Some((0..m.orbit_count()).collect());
        class.subsets_examined = 1;
        return Ok(class);
    }
    if !support_reflecting {
        return Ok(class);
    }
    if reflecting_orbits.len() > MSR_SEARCH_CAP {
        return Err(Error::OrbitCap { cap: MSR_SEARCH_CAP });
    }
    let unit = m.unit().orbit();
    let optional: Vec<usize> = reflecting_orbits.iter().copied().filter(|&o| o != unit).collect();
    let mut chosen = vec![unit];
    let found = msr_search(e, &optional, 0, &mut chosen, &mut class.subsets_examined, budget)?;
    class.msr = found.is_some();
    class.certificate = found;
    if !class.msr {
        class.witness = Some(format!(
            "no multiplicatively closed union of R_e-orbits maps onto {} ({} candidates examined)",
            n.name(),
            class.subsets_examined
        ));
    }
    Ok(class)
}

fn msr_search(
    e: &MonoidMorphism,
    optional: &[usize],
    next: usize,
    chosen: &mut Vec<usize>,
    examined: &mut usize,
    budget: &Budget,
) -> Result<Option<Vec<usize>>> {
    budget.charge(1)?;
    let assignment = e.map().assignment();
    let mut reachable = vec![false; e.cod().orbit_count()];
    for &o in chosen.iter().chain(&optional[next..]) {
        reachable[assignment[o].target_orbit] = true;
    }
    if !reachable.iter().all(|&r| r) {
        return Ok(None);
    }
    if next == optional.len() {
        *examined += 1;
        let mut sorted = chosen.clone();
        sorted.sort_unstable();
        return Ok(e.dom().orbits_closed(&sorted).then_some(sorted));
    }
    chosen.push(optional[next]);
    if let Some(found) = msr_search(e, optional, next + 1, chosen, examined, budget)? {
        return Ok(Some(found));
    }
    chosen.pop();
    msr_search(e, optional, next + 1, chosen, examined, budget)
}

/// Restriction of `e` to the certificate submonoid, for re-checking.
pub fn restrict_to_certificate(e: &MonoidMorphism, orbits: &[usize]) -> Result<MonoidMorphism> {
    let sub = submonoid_on(e.dom(), orbits.to_vec())?;
    sub.inclusion.then(e)
}

/// `∀ m, n : supp(mn) = ∅ ⇔ supp(m, n) = ∅`, with a violating pair.
#[derive(Clone, Debug, Serialize)]
pub struct EqMsrReport {
    pub holds: bool,
    pub witness: Option<String>,
}

pub fn eq_msr_predicate(m: &NominalMonoid) -> Result<EqMsrReport> {
    let square = m.square()?;
    for (x, y) in square.rep_pairs() {
        let xy = m.mul(&x, &y);
        if xy.support().is_empty() && !(x.support().is_empty() && y.support().is_empty()) {
            return Ok(EqMsrReport {
                holds: false,
                witness: Some(format!("{} · {} = {}", m.show(&x), m.show(&y), m.show(&xy))),
            });
        }
    }
    Ok(EqMsrReport { holds: true, witness: None })
}

/// Every s-bounded `h0 : Σ → M`.
pub fn enumerate_s_bounded(
    alphabet: &Arc<OrbitFiniteSet>,
    m: &Arc<NominalMonoid>,
    s: &SupportBound,
    budget: &Budget,
) -> Result<Vec<GeneratorMap>> {
    let mut out = Vec::new();
    for h in enumerate_monoid_maps(alphabet, m, budget)? {
        if is_s_bounded(&h, s, budget)?.bounded {
            out.push(h);
        }
    }
    Ok(out)
}

/// An s-bounded `h'` with `e ∘ h' = h`, if one exists.
pub fn factor_through(
    h0: &GeneratorMap,
    e: &MonoidMorphism,
    s: &SupportBound,
    budget: &Budget,
) -> Result<Option<GeneratorMap>> {
    if **h0.monoid().carrier() != **e.cod().carrier() {
        return Err(Error::CarrierMismatch);
    }
    for h in enumerate_s_bounded(h0.alphabet(), e.dom(), s, budget)? {
        if h.then(e)?.agrees_with(h0) {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

/// One closure check: `construction` was built from members of the class,
/// and `member` says whether the result is one too.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureCheck {
    pub construction: String,
    /// Whether the class must contain the result (false for quotients that
    /// are not MSR).
    pub required: bool,
    pub member: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ClosureReport {
    pub checks: Vec<ClosureCheck>,
    pub skipped: Vec<String>,
}

impl ClosureReport {
    /// No required check fails.
    pub fn closed(&self) -> bool {
        self.checks.iter().all(|c| !c.required || c.member)
    }

    /// Results outside the class reached by quotients that are not MSR.
    pub fn escapes(&self) -> Vec<&ClosureCheck> {
        self.checks.iter().filter(|c| !c.required && !c.member).collect()
    }
}

/// Largest product the suite builds.
pub const CLOSURE_PRODUCT_CAP: usize = 24;

/// Checks closure of a class under binary products, single-generator
/// submonoids and single-seed quotients of its members among `monoids`,
/// plus the given extra quotients whose domain is a member.
pub fn msr_closure_suite(
    class: &dyn Fn(&NominalMonoid) -> Result<bool>,
    monoids: &[Arc<NominalMonoid>],
    extra_quotients: &[MonoidMorphism],
    budget: &Budget,
) -> Result<ClosureReport> {
    let mut report = ClosureReport::default();
    let mut members = Vec::new();
    for m in monoids {
        if class(m)? {
            members.push(m.clone());
        }
    }
    for (i, a) in members.iter().enumerate() {
        for b in &members[i..] {
            let p = product_monoid(a, b)?;
            if p.monoid.orbit_count() > CLOSURE_PRODUCT_CAP {
                report.skipped.push(format!("{} has {} orbits", p.monoid.name(), p.monoid.orbit_count()));
                continue;
            }
            report.checks.push(ClosureCheck {
                construction: p.monoid.name().to_string(),
                required: true,
                member: class(&p.monoid)?,
            });
        }
    }
    for m in &members {
        for x in m.carrier().reps() {
            let sub = submonoid_generated(m, std::slice::from_ref(&x), budget)?;
            report.checks.push(ClosureCheck {
                construction: format!("⟨{}⟩ ≤ {}", m.show(&x), m.name()),
                required: true,
                member: class(&sub.monoid)?,
            });
        }
        let square = m.square()?;
        for (x, y) in square.rep_pairs() {
            if x == y {
                continue;
            }
            let c = congruence_generated(m, &[(x.clone(), y.clone())], budget)?;
            let q = quotient(&c, budget)?;
            let msr = classify_quotient(&q.projection, budget)?.msr;
            report.checks.push(ClosureCheck {
                construction: format!("{} / ({} ~ {})", m.name(), m.show(&x), m.show(&y)),
                required: msr,
                member: class(&q.monoid)?,
            });
        }
    }
    for e in extra_quotients {
        if !class(e.dom())? {
            continue;
        }
        let msr = classify_quotient(e, budget)?.msr;
        report.checks.push(ClosureCheck {
            construction: format!("{} ↠ {}", e.dom().name(), e.cod().name()),
            required: msr,
            member: class(e.cod())?,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::catalog_quotient;

    fn atoms_alphabet() -> Arc<OrbitFiniteSet> {
        Arc::new(OrbitFiniteSet::atoms())
    }

    fn letter(m: &str) -> GeneratorMap {
        let m = Arc::new(builder(m).unwrap());
        GeneratorMap::from_fn(atoms_alphabet(), m, |x| Ok(Element { orbit: 1, atoms: x.atoms().to_vec() })).unwrap()
    }

    #[test]
    fn bounded_examples() {
        let b = Budget::default();
        let s = SupportBound::first_letter().unwrap();
        assert!(is_s_bounded(&letter("zero-adjoined"), &s, &b).unwrap().bounded);
        let r = is_s_bounded(&letter("pair-zero"), &s, &b).unwrap();
        assert!(!r.bounded);
        let w = r.witness.unwrap();
        assert_eq!(w.value_support.len(), 2);
        assert_eq!(w.bound_support.len(), 1);
    }

    #[test]
    fn constant_bound() {
        let b = Budget::default();
        let t = Arc::new(builder("trivial").unwrap());
        let h = GeneratorMap::from_fn(atoms_alphabet(), t, |_| Ok(Element { orbit: 0, atoms: vec![] })).unwrap();
        assert!(is_s_bounded(&h, &SupportBound::Constant(AtomSet::new()), &b).unwrap().bounded);
        assert!(!is_s_bounded(&letter("first-proj"), &SupportBound::Constant(AtomSet::new()), &b).unwrap().bounded);
    }

    #[test]
    fn ex_compare_classification() {
        let b = Budget::default();
        let e = catalog_quotient("ex-compare").unwrap();
        let c = classify_quotient(&e, &b).unwrap();
        assert!(c.support_reflecting);
        assert!(!c.msr);
        assert!(!c.support_preserving);
        assert_eq!(c.reflecting_orbits, vec![0, 1, 2]);
        assert!(c.subsets_examined <= 4);
        assert!(eq_msr_predicate(e.dom()).unwrap().holds);
        assert!(!eq_msr_predicate(e.cod()).unwrap().holds);
    }

    #[test]
    fn msr_certificates() {
        let b = Budget::default();
        let c = classify_quotient(&catalog_quotient("proj-p1").unwrap(), &b).unwrap();
        assert!(c.msr && !c.support_preserving);
        assert_eq!(c.certificate, Some(vec![0]));
        let e = catalog_quotient("p1-collapse").unwrap();
        let c = classify_quotient(&e, &b).unwrap();
        assert!(c.msr);
        let r = restrict_to_certificate(&e, c.certificate.as_ref().unwrap()).unwrap();
        assert!(r.is_surjective());
        assert!(classify_quotient(&r, &b).unwrap().support_preserving);
    }

    #[test]
    fn no_factorization_through_pair_zero() {
        let b = Budget::default();
        let s = SupportBound::first_letter().unwrap();
        let e = catalog_quotient("no-s-quot").unwrap();
        let h = GeneratorMap::from_fn(atoms_alphabet(), e.cod().clone(), |x| {
            Ok(Element { orbit: 1, atoms: x.atoms().to_vec() })
        })
        .unwrap();
        assert!(factor_through(&h, &e, &s, &b).unwrap().is_none());
        assert_eq!(enumerate_s_bounded(&atoms_alphabet(), &Arc::new(builder("p1").unwrap()), &s, &b).unwrap().len(), 2);
    }

    #[test]
    fn join_of_projections() {
        let b = Budget::default();
        let j = join_s_bounded(&letter("first-proj"), &letter("last-proj"), &SupportBound::Constant(AtomSet::new()), &b);
        assert!(j.is_err());
        let (_, pairing) = pair_generator_maps(&letter("first-proj"), &letter("last-proj")).unwrap();
        let s = SupportBound::ViaMorphism(pairing);
        let j = join_s_bounded(&letter("first-proj"), &letter("last-proj"), &s, &b).unwrap();
        assert!(j.report.bounded);
        assert_eq!(j.image.monoid.orbit_count(), 3);
        assert!(exceeds_support(&j.map, 1, &b).unwrap().is_some());
    }
}
