//! ω-terms, explicit equations, finite truncation stages of the space of
//! pro-orbit-finite words, and the separation pseudometric.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bounds::{enumerate_s_bounded, is_s_bounded, join_s_bounded, msr_closure_suite, ClosureReport, SupportBound};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fs_sets::FsSubset;
use crate::language::{Language, Word};
use crate::monoid::{
    catalog, enumerate_small_monoids, generated_image, pair_generator_maps, submonoid_generated, GeneratorMap,
    MonoidMorphism, NominalMonoid,
};
use crate::nominal::{AtomSet, Element, EquivariantMap, OrbitDescriptor, OrbitFiniteSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaTerm {
    Unit,
    Letter(Element),
    Concat(Vec<OmegaTerm>),
    Omega(Box<OmegaTerm>),
}

impl OmegaTerm {
    pub fn letter(x: Element) -> Self {
        OmegaTerm::Letter(x)
    }

    pub fn omega(t: OmegaTerm) -> Self {
        OmegaTerm::Omega(Box::new(t))
    }

    pub fn word(w: &Word) -> Self {
        match w.letters() {
            [] => OmegaTerm::Unit,
            [x] => OmegaTerm::Letter(x.clone()),
            xs => OmegaTerm::Concat(xs.iter().cloned().map(OmegaTerm::Letter).collect()),
        }
    }

    pub fn check(&self, alphabet: &OrbitFiniteSet) -> Result<()> {
        match self {
            OmegaTerm::Unit => Ok(()),
            OmegaTerm::Letter(x) => {
                if alphabet.contains(x) {
                    Ok(())
                } else {
                    Err(Error::CarrierMismatch)
                }
            }
            OmegaTerm::Concat(ts) => ts.iter().try_for_each(|t| t.check(alphabet)),
            OmegaTerm::Omega(t) => t.check(alphabet),
        }
    }

    pub fn show(&self, alphabet: &OrbitFiniteSet) -> String {
        match self {
            OmegaTerm::Unit => "1".into(),
            OmegaTerm::Letter(x) => Word::new(vec![x.clone()]).show(alphabet),
            OmegaTerm::Concat(ts) => ts.iter().map(|t| t.show(alphabet)).collect::<Vec<_>>().join(" "),
            OmegaTerm::Omega(t) => format!("({})^ω", t.show(alphabet)),
        }
    }
}

/// `ĥ(t)`: letters through `h0`, products folded, `ω` as the idempotent
/// power.
pub fn eval_omega_term(h0: &GeneratorMap, t: &OmegaTerm) -> Result<Element> {
    let m = h0.monoid();
    match t {
        OmegaTerm::Unit => Ok(m.unit().clone()),
        OmegaTerm::Letter(x) => h0.apply(x),
        OmegaTerm::Concat(ts) => {
            let mut acc = m.unit().clone();
            for t in ts {
                acc = m.multiply(&acc, &eval_omega_term(h0, t)?)?;
            }
            Ok(acc)
        }
        OmegaTerm::Omega(t) => Ok(m.omega_power(&eval_omega_term(h0, t)?)),
    }
}

/// An explicit equation `lhs = rhs` over `Σ` for the bound `s`.
#[derive(Clone, Debug)]
pub struct Equation {
    pub alphabet: Arc<OrbitFiniteSet>,
    pub bound: SupportBound,
    pub lhs: OmegaTerm,
    pub rhs: OmegaTerm,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} [s: {}]", self.lhs.show(&self.alphabet), self.rhs.show(&self.alphabet), self.bound)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub morphism: String,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h = {}: ĥ(lhs) = {} but ĥ(rhs) = {}", self.morphism, self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquationReport {
    pub holds: bool,
    pub morphisms_checked: usize,
    pub counterexample: Option<Counterexample>,
}

/// Whether every s-bounded `h : Σ* → M` identifies both sides.
pub fn satisfies_explicit(m: &Arc<NominalMonoid>, eq: &Equation, budget: &Budget) -> Result<EquationReport> {
    eq.lhs.check(&eq.alphabet)?;
    eq.rhs.check(&eq.alphabet)?;
    let maps = enumerate_s_bounded(&eq.alphabet, m, &eq.bound, budget)?;
    for (i, h) in maps.iter().enumerate() {
        let (l, r) = (eval_omega_term(h, &eq.lhs)?, eval_omega_term(h, &eq.rhs)?);
        if l != r {
            return Ok(EquationReport {
                holds: false,
                morphisms_checked: i + 1,
                counterexample: Some(Counterexample { morphism: h.to_string(), lhs: m.show(&l), rhs: m.show(&r) }),
            });
        }
    }
    Ok(EquationReport { holds: true, morphisms_checked: maps.len(), counterexample: None })
}

/// `x^ω · x = x^ω` for a single letter `x`.
pub fn aperiodicity_equation(alphabet: Arc<OrbitFiniteSet>, bound: SupportBound, x: Element) -> Equation {
    let xw = OmegaTerm::omega(OmegaTerm::letter(x.clone()));
    Equation { lhs: OmegaTerm::Concat(vec![xw.clone(), OmegaTerm::letter(x)]), rhs: xw, alphabet, bound }
}

/// One aperiodicity equation per orbit of `m`: the alphabet is a strong
/// orbit of the same dimension, bounded through the map hitting the orbit
/// representative.
pub fn aperiodicity_family(m: &Arc<NominalMonoid>) -> Result<Vec<Equation>> {
    let mut out = Vec::new();
    for (o, desc) in m.carrier().orbits().iter().enumerate() {
        let alphabet = Arc::new(OrbitFiniteSet::new(vec![OrbitDescriptor::strong("X", desc.dim())]));
        let target = m.carrier().rep(o);
        let q0 = GeneratorMap::from_fn(alphabet.clone(), m.clone(), |x| {
            Ok(Element { orbit: o, atoms: x.atoms().to_vec() })
        })?;
        debug_assert_eq!(q0.apply(&alphabet.rep(0))?, target);
        out.push(aperiodicity_equation(alphabet.clone(), SupportBound::ViaMorphism(q0), alphabet.rep(0)));
    }
    Ok(out)
}

/// Checks every equation of the family, stopping at the first failure.
pub fn satisfies_all(m: &Arc<NominalMonoid>, eqs: &[Equation], budget: &Budget) -> Result<EquationReport> {
    let mut checked = 0;
    for eq in eqs {
        let r = satisfies_explicit(m, eq, budget)?;
        checked += r.morphisms_checked;
        if !r.holds {
            return Ok(EquationReport { morphisms_checked: checked, ..r });
        }
    }
    Ok(EquationReport { holds: true, morphisms_checked: checked, counterexample: None })
}

/// Closure of the class of models of `equations` on the given monoids.
pub fn reiterman_instance_suite(
    equations: &[Equation],
    monoids: &[Arc<NominalMonoid>],
    extra_quotients: &[MonoidMorphism],
    budget: &Budget,
) -> Result<ClosureReport> {
    let class = |m: &NominalMonoid| -> Result<bool> {
        let m = Arc::new(m.clone());
        Ok(satisfies_all(&m, equations, budget)?.holds)
    };
    msr_closure_suite(&class, monoids, extra_quotients, budget)
}

/// A finite stage: the join `E` of finitely many s-bounded maps, with its
/// projections to each of them.
#[derive(Clone, Debug)]
pub struct TruncatedStage {
    pub alphabet: Arc<OrbitFiniteSet>,
    pub bound: SupportBound,
    pub quotients: Vec<GeneratorMap>,
    /// `Σ → E`, generating `E`.
    pub join: GeneratorMap,
    pub projections: Vec<MonoidMorphism>,
}

pub fn build_stage(
    alphabet: Arc<OrbitFiniteSet>,
    bound: SupportBound,
    quotients: Vec<GeneratorMap>,
    budget: &Budget,
) -> Result<TruncatedStage> {
    let first = quotients.first().ok_or_else(|| Error::Invalid("a stage needs at least one quotient".into()))?;
    for q in &quotients {
        if **q.alphabet() != *alphabet {
            return Err(Error::CarrierMismatch);
        }
        if let Some(w) = is_s_bounded(q, &bound, budget)?.witness {
            return Err(Error::Invalid(format!("{} is not s-bounded: {w}", q.monoid().name())));
        }
    }
    let (image, mut join) = generated_image(first, budget)?;
    let mut projections = vec![image.inclusion.clone()];
    for q in &quotients[1..] {
        let j = join_s_bounded(&join, q, &bound, budget)?;
        projections = projections.iter().map(|p| j.left.then(p)).collect::<Result<Vec<_>>>()?;
        projections.push(j.right);
        join = j.map;
    }
    Ok(TruncatedStage { alphabet, bound, quotients, join, projections })
}

impl TruncatedStage {
    pub fn monoid(&self) -> &Arc<NominalMonoid> {
        self.join.monoid()
    }

    /// `η(w)`.
    pub fn eta(&self, w: &Word) -> Result<Element> {
        self.join.eval(w.letters())
    }

    /// The `i`-th component of a stage element.
    pub fn stage_eval(&self, i: usize, x: &Element) -> Result<Element> {
        self.projections
            .get(i)
            .ok_or(Error::NoSuchOrbit { index: i, count: self.projections.len() })?
            .apply(x)
    }

    /// Whether this stage maps onto `coarser` compatibly with `η`.
    pub fn refines(&self, coarser: &TruncatedStage, budget: &Budget) -> Result<bool> {
        Ok(factor_map(&self.join, &coarser.join, budget)?.is_some())
    }
}

/// The map `f : E → M` with `h = f ∘ e`, where `e` generates `E`, if it
/// exists. It exists iff the pairing image projects injectively onto `E`.
pub fn factor_map(e: &GeneratorMap, h: &GeneratorMap, budget: &Budget) -> Result<Option<EquivariantMap>> {
    let (p, pair) = pair_generator_maps(e, h)?;
    let gens: Vec<Element> = pair.alphabet().reps().iter().map(|x| pair.map().apply_unchecked(x)).collect();
    let image = submonoid_generated(&p.monoid, &gens, budget)?;
    let left = image.inclusion.then(&p.left)?;
    if !left.is_injective() || !left.is_surjective() {
        return Ok(None);
    }
    let target = e.monoid().carrier().clone();
    let mut preimage = vec![None; target.orbit_count()];
    for (o, img) in left.map().assignment().iter().enumerate() {
        preimage[img.target_orbit] = Some(o);
    }
    let map = EquivariantMap::tabulate(target.clone(), h.monoid().carrier().clone(), |r| {
        let o = preimage[r.orbit()].expect("bijective on orbits");
        let (x, y) = p.unpair(&image.lift(&image.monoid.carrier().rep(o)));
        // rename so that x becomes the representative r
        let back = |a| x.atoms().iter().position(|&b| b == a).map(|i| r.atoms()[i]);
        let atoms: Option<Vec<_>> = y.atoms().iter().map(|&a| back(a)).collect();
        let atoms = atoms.ok_or_else(|| Error::Invalid("support of the factor escapes its argument".into()))?;
        h.monoid().carrier().element(y.orbit(), &atoms)
    })?;
    Ok(Some(map))
}

/// `C ⊆ E` with `L = η⁻¹[C]`.
pub fn clopen_of_language(stage: &TruncatedStage, l: &Language, budget: &Budget) -> Result<FsSubset> {
    if l.alphabet() != &stage.alphabet {
        return Err(Error::CarrierMismatch);
    }
    let f = factor_map(&stage.join, l.h0(), budget)?
        .ok_or_else(|| Error::Invalid(format!("{} is not recognized at this stage", l.name())))?;
    let carrier = stage.monoid().carrier().clone();
    let support: AtomSet = l.support().clone();
    let mut chosen = Vec::new();
    for x in carrier.s_orbit_reps(&support) {
        if l.predicate().member(&f.apply(&x)?)? {
            chosen.push(x);
        }
    }
    FsSubset::from_elements(carrier, support, &chosen)
}

/// `η⁻¹[C]`.
pub fn language_of_clopen(stage: &TruncatedStage, c: &FsSubset) -> Result<Language> {
    Language::new(stage.join.clone(), c.clone())
}

/// Where `d_s` looks for separating monoids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scope {
    Catalog,
    Exhaustive { max_orbits: usize, max_dim: usize },
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Catalog => write!(f, "catalog"),
            Scope::Exhaustive { max_orbits, max_dim } => write!(f, "exhaustive({max_orbits},{max_dim})"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Separation {
    pub monoid: String,
    pub orbits: usize,
    pub morphism: String,
    pub left: String,
    pub right: String,
}

/// `0` or `2^-exponent`.
#[derive(Clone, Debug, Serialize)]
pub struct DyadicDistance {
    pub exponent: Option<u32>,
    pub certificate: Option<Separation>,
    pub scope: Scope,
    /// True when the value is exact for every monoid in the scope; a catalog
    /// scope only gives a lower bound.
    pub exhaustive: bool,
}

impl DyadicDistance {
    pub fn is_zero(&self) -> bool {
        self.exponent.is_none()
    }

    pub fn value(&self) -> f64 {
        self.exponent.map_or(0.0, |e| 0.5f64.powi(e as i32))
    }
}

impl fmt::Display for DyadicDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent {
            None => write!(f, "0")?,
            Some(e) => write!(f, "1/{}", 1u64 << e)?,
        }
        let kind = if self.exhaustive { "exact within" } else { "lower bound over" };
        write!(f, " ({kind} {})", self.scope)
    }
}

/// The s-bounded maps of a scope, ordered by orbit count, reusable across
/// many distance queries.
pub struct DistanceOracle {
    scope: Scope,
    separators: Vec<GeneratorMap>,
}

impl DistanceOracle {
    pub fn new(alphabet: &Arc<OrbitFiniteSet>, s: &SupportBound, scope: Scope, budget: &Budget) -> Result<Self> {
        let mut monoids: Vec<Arc<NominalMonoid>> = match scope {
            Scope::Catalog => catalog()?.into_iter().map(Arc::new).collect(),
            Scope::Exhaustive { max_orbits, max_dim } => {
                enumerate_small_monoids(max_orbits, max_dim, budget)?.into_iter().map(Arc::new).collect()
            }
        };
        monoids.sort_by_key(|m| m.orbit_count());
        let mut separators = Vec::new();
        for m in &monoids {
            separators.extend(enumerate_s_bounded(alphabet, m, s, budget)?);
        }
        Ok(DistanceOracle { scope, separators })
    }

    /// The first map in scope, by orbit count, that separates the words.
    pub fn separator(&self, v: &Word, w: &Word) -> Result<Option<&GeneratorMap>> {
        for h in &self.separators {
            if h.eval(v.letters())? != h.eval(w.letters())? {
                return Ok(Some(h));
            }
        }
        Ok(None)
    }

    pub fn distance(&self, v: &Word, w: &Word) -> Result<DyadicDistance> {
        let certificate = match self.separator(v, w)? {
            Some(h) => {
                let m = h.monoid();
                Some(Separation {
                    monoid: m.name().to_string(),
                    orbits: m.orbit_count(),
                    morphism: h.to_string(),
                    left: m.show(&h.eval(v.letters())?),
                    right: m.show(&h.eval(w.letters())?),
                })
            }
            None => None,
        };
        Ok(DyadicDistance {
            exponent: certificate.as_ref().map(|c| c.orbits as u32),
            certificate,
            scope: self.scope,
            exhaustive: self.exhaustive(),
        })
    }

    fn exhaustive(&self) -> bool {
        matches!(self.scope, Scope::Exhaustive { .. })
    }
}

/// `d_s(v, w)`: `2^-n` for the fewest orbits `n` of a monoid in scope that
/// s-separates the words, `0` if none does.
pub fn d_s(
    alphabet: &Arc<OrbitFiniteSet>,
    v: &Word,
    w: &Word,
    s: &SupportBound,
    scope: Scope,
    budget: &Budget,
) -> Result<DyadicDistance> {
    DistanceOracle::new(alphabet, s, scope, budget)?.distance(v, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::builder;
    use crate::nominal::Atom;

    fn atoms() -> Arc<OrbitFiniteSet> {
        Arc::new(OrbitFiniteSet::atoms())
    }

    fn a() -> Element {
        Element { orbit: 0, atoms: vec![Atom(1)] }
    }

    #[test]
    fn omega_in_cutoff2() {
        let m = Arc::new(builder("cutoff2").unwrap());
        let h = GeneratorMap::from_fn(atoms(), m.clone(), |x| Ok(Element { orbit: 1, atoms: x.atoms().to_vec() })).unwrap();
        let v = eval_omega_term(&h, &OmegaTerm::omega(OmegaTerm::letter(a()))).unwrap();
        assert_eq!(m.show(&v), "AA(a)");
        assert_eq!(eval_omega_term(&h, &OmegaTerm::Unit).unwrap(), *m.unit());
    }

    #[test]
    fn aperiodicity_examples() {
        let b = Budget::default();
        let s = SupportBound::first_letter().unwrap();
        let eq = aperiodicity_equation(atoms(), s, a());
        assert!(satisfies_explicit(&Arc::new(builder("cutoff2").unwrap()), &eq, &b).unwrap().holds);
        let eq = aperiodicity_equation(atoms(), SupportBound::Constant(AtomSet::new()), a());
        let r = satisfies_explicit(&Arc::new(builder("cyclic2").unwrap()), &eq, &b).unwrap();
        assert!(!r.holds);
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn distances_over_small_monoids() {
        let b = Budget::default();
        let s = SupportBound::first_letter().unwrap();
        let scope = Scope::Exhaustive { max_orbits: 2, max_dim: 1 };
        let oracle = DistanceOracle::new(&atoms(), &s, scope, &b).unwrap();
        let ab = Word::of_atoms(&[1, 2]);
        assert!(oracle.distance(&ab, &Word::of_atoms(&[1, 3])).unwrap().is_zero());
        let d = oracle.distance(&ab, &Word::of_atoms(&[2, 1])).unwrap();
        assert_eq!(d.exponent, Some(2));
        assert!(oracle.distance(&ab, &ab).unwrap().is_zero());
    }

    #[test]
    fn two_projection_stage() {
        let b = Budget::default();
        let letter = |name: &str| {
            GeneratorMap::from_fn(atoms(), Arc::new(builder(name).unwrap()), |x| {
                Ok(Element { orbit: 1, atoms: x.atoms().to_vec() })
            })
            .unwrap()
        };
        let (_, pairing) = pair_generator_maps(&letter("p1"), &letter("p2")).unwrap();
        let s = SupportBound::ViaMorphism(pairing);
        let stage = build_stage(atoms(), s.clone(), vec![letter("p1"), letter("p2")], &b).unwrap();
        let x = stage.eta(&Word::of_atoms(&[1, 2])).unwrap();
        assert_eq!(stage.stage_eval(0, &x).unwrap().atoms(), [Atom(1)]);
        assert_eq!(stage.stage_eval(1, &x).unwrap().atoms(), [Atom(2)]);
        let coarse = build_stage(atoms(), s, vec![letter("p1")], &b).unwrap();
        assert!(stage.refines(&coarse, &b).unwrap());
        assert!(!coarse.refines(&stage, &b).unwrap());
    }
}
