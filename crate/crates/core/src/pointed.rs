//! Pointed fusion categories `Vec^ω(E)` and their monoidal functors.
//!
//! A functor `(φ, τ)` has tensorator scalars `τ(g, h)` on `F(g) ⊗ F(h) → F(gh)`;
//! monoidal coherence then reads `dτ = ω − φ*ω′`, and a monoidal natural
//! isomorphism changes `τ` by a coboundary.

use std::collections::HashMap;

use crate::cochain::{pullback_unchecked, Cochain};
use crate::cstar::{cstar_cohomology, CstarClassifier, ScalarSolver};
use crate::error::{Error, Result};
use crate::group::{isomorphisms, FiniteGroup, GradingSurjection, GroupHom};
use crate::zmod::lcm;

/// `Vec^ω(E)` with `ω` a normalized 3-cocycle over `Z/M`.
#[derive(Clone, Debug)]
pub struct PointedCategory {
    pub group: FiniteGroup,
    pub omega: Cochain,
}

impl PointedCategory {
    pub fn new(group: FiniteGroup, omega: Cochain) -> Result<Self> {
        if omega.degree != 3 || omega.group_order != group.order() || omega.rank() != 1 {
            return Err(Error::Mismatch("associator must be a scalar 3-cochain on the group".into()));
        }
        if let Some(t) = omega.normalization_violation() {
            return Err(Error::NotNormalized(t));
        }
        let d = crate::cochain::scalar_differential(&group, &omega);
        if let Some(i) = (0..d.len()).find(|&i| d.values[i] != 0) {
            return Err(Error::NotCocycle(crate::cochain::tuple_of(group.order(), 4, i)));
        }
        Ok(PointedCategory { group, omega })
    }

    /// `Vec(E)` with trivial associator.
    pub fn vec(group: FiniteGroup) -> Self {
        let n = group.order();
        PointedCategory { group, omega: Cochain::scalar_zero(3, n, 1) }
    }

    pub fn modulus(&self) -> i64 {
        self.omega.modulus()
    }

    pub fn name(&self) -> String {
        if self.omega.is_zero() {
            format!("Vec({})", self.group.name())
        } else {
            format!("Vec^ω({})", self.group.name())
        }
    }
}

/// Rescales two scalar cochains to a common modulus.
pub fn align(a: &Cochain, b: &Cochain) -> (Cochain, Cochain) {
    let m = lcm(a.modulus(), b.modulus());
    (a.rescale(m).expect("divides lcm"), b.rescale(m).expect("divides lcm"))
}

/// A monoidal functor `Vec^ω(E) → Vec^ω′(E′)`: group map `φ` and tensorator `τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedFunctor {
    pub phi: GroupHom,
    pub tau: Cochain,
}

impl PointedFunctor {
    pub fn identity(c: &PointedCategory) -> Self {
        let n = c.group.order();
        PointedFunctor { phi: GroupHom::identity(n), tau: Cochain::scalar_zero(2, n, 1) }
    }

    /// `dτ − ω + φ*ω′` over a common modulus; zero exactly when coherent.
    pub fn coherence_defect(&self, source: &PointedCategory, target: &PointedCategory) -> Cochain {
        let m = lcm(lcm(self.tau.modulus(), source.modulus()), target.modulus());
        let tau = self.tau.rescale(m).expect("divides lcm");
        let omega = source.omega.rescale(m).expect("divides lcm");
        let pulled = pullback_unchecked(&target.omega.rescale(m).expect("divides lcm"), &self.phi);
        let dtau = crate::cochain::scalar_differential(&source.group, &tau);
        dtau.sub(&omega).and_then(|x| x.add(&pulled)).expect("same shape")
    }

    pub fn check_coherence(&self, source: &PointedCategory, target: &PointedCategory) -> Result<()> {
        let d = self.coherence_defect(source, target);
        match (0..d.len()).find(|&i| d.values[i] != 0) {
            None => Ok(()),
            Some(i) => Err(Error::Coherence(format!(
                "dτ ≠ ω − φ*ω′ at {:?}",
                crate::cochain::tuple_of(d.group_order, 3, i)
            ))),
        }
    }
}

/// `F₂ ∘ F₁`: `φ = φ₂∘φ₁`, `τ = τ₁ + φ₁*τ₂`.
pub fn compose(f2: &PointedFunctor, f1: &PointedFunctor) -> Result<PointedFunctor> {
    if f1.phi.image.iter().any(|&x| x >= f2.phi.image.len()) || f2.tau.group_order != f2.phi.image.len() {
        return Err(Error::Mismatch("composable functors need matching groups".into()));
    }
    let pulled = pullback_unchecked(&f2.tau, &f1.phi);
    let (a, b) = align(&f1.tau, &pulled);
    Ok(PointedFunctor { phi: f2.phi.after(&f1.phi), tau: a.add(&b)? })
}

/// `(φ, H²-coordinates relative to the chosen base tensorator of φ)`.
pub type ClassKey = (Vec<usize>, Vec<i64>);

/// A functor with its canonical key; the class is `τ + B²(E, ℂ^×)`.
#[derive(Clone, Debug)]
pub struct FunctorClass {
    pub functor: PointedFunctor,
    pub key: ClassKey,
}

/// All monoidal equivalences between two pointed categories, up to monoidal
/// natural isomorphism.
#[derive(Clone, Debug)]
pub struct FunctorSpace {
    pub source: PointedCategory,
    pub target: PointedCategory,
    pub modulus: i64,
    pub isos: Vec<GroupHom>,
    bases: Vec<Option<Cochain>>,
    index: HashMap<Vec<usize>, usize>,
    classifier: CstarClassifier,
    h2: Vec<(Vec<i64>, Cochain)>,
}

impl FunctorSpace {
    pub fn new(source: &PointedCategory, target: &PointedCategory) -> Result<Self> {
        let e = &source.group;
        let n = e.order();
        let modulus = lcm(source.modulus(), target.modulus()) * n as i64;
        let isos = isomorphisms(e, &target.group)?;
        let classifier = CstarClassifier::new(e, 2)?;
        let h2 = h2_classes(e, &classifier, modulus)?;
        let omega = source.omega.rescale(lcm(source.modulus(), target.modulus()))?;
        let omega_t = target.omega.rescale(omega.modulus())?;
        let solver = if omega.is_zero() && omega_t.is_zero() {
            None
        } else {
            Some(ScalarSolver::new(e, 3, modulus, true)?)
        };
        let bases = isos
            .iter()
            .map(|phi| {
                let rhs = omega.sub(&pullback_unchecked(&omega_t, phi)).expect("same shape");
                if rhs.is_zero() {
                    return Some(Cochain::scalar_zero(2, n, modulus));
                }
                // rhs is trivial in ℂ^× iff dτ = |E|·rhs is solvable over Z/(M|E|)
                solver.as_ref().and_then(|s| s.solve(&rhs.rescale(modulus).expect("divides")))
            })
            .collect();
        let index = isos.iter().enumerate().map(|(i, p)| (p.image.clone(), i)).collect();
        Ok(FunctorSpace { source: source.clone(), target: target.clone(), modulus, isos, bases, index, classifier, h2 })
    }

    /// Isomorphisms `φ` with `φ*ω′ ≡ ω` in `H³(E, ℂ^×)`.
    pub fn coherent_isos(&self) -> impl Iterator<Item = &GroupHom> + '_ {
        self.isos.iter().zip(&self.bases).filter(|(_, b)| b.is_some()).map(|(p, _)| p)
    }

    pub fn h2_order(&self) -> usize {
        self.h2.len()
    }

    pub fn base(&self, phi: &GroupHom) -> Option<&Cochain> {
        self.index.get(&phi.image).and_then(|&i| self.bases[i].as_ref())
    }

    /// Every class, in canonical order (by `φ`, then by `H²` coordinates).
    pub fn classes(&self) -> Vec<FunctorClass> {
        let mut out = Vec::new();
        for (phi, base) in self.isos.iter().zip(&self.bases) {
            let Some(base) = base else { continue };
            for (key, h) in &self.h2 {
                let tau = base.add(h).expect("same modulus");
                out.push(FunctorClass {
                    functor: PointedFunctor { phi: phi.clone(), tau },
                    key: (phi.image.clone(), key.clone()),
                });
            }
        }
        out
    }

    /// The class key of a coherent functor.
    pub fn key(&self, f: &PointedFunctor) -> Result<ClassKey> {
        f.check_coherence(&self.source, &self.target)?;
        let base = self
            .base(&f.phi)
            .ok_or_else(|| Error::Mismatch("functor group map is not among the coherent isomorphisms".into()))?;
        let (a, b) = align(&f.tau, base);
        Ok((f.phi.image.clone(), self.classifier.key(&a.sub(&b)?)?))
    }

    /// The stored representative of a key.
    pub fn representative(&self, key: &ClassKey) -> Option<PointedFunctor> {
        let &i = self.index.get(&key.0)?;
        let base = self.bases[i].as_ref()?;
        let (_, h) = self.h2.iter().find(|(k, _)| *k == key.1)?;
        Some(PointedFunctor { phi: self.isos[i].clone(), tau: base.add(h).ok()? })
    }
}

/// All elements of `H²(E, ℂ^×)` as cochains over `Z/modulus`, keyed by the classifier.
pub fn h2_classes(e: &FiniteGroup, classifier: &CstarClassifier, modulus: i64) -> Result<Vec<(Vec<i64>, Cochain)>> {
    let n = e.order();
    let h = cstar_cohomology(e, 2, Some(modulus))?;
    let mut out = vec![(classifier.key(&Cochain::scalar_zero(2, n, modulus))?, Cochain::scalar_zero(2, n, modulus))];
    for (gen, &ord) in h.generators.iter().zip(&h.invariant_factors) {
        let mut next = Vec::new();
        for (_, c) in &out {
            for k in 0..ord {
                let x = c.add(&gen.scale(k))?;
                next.push((classifier.key(&x)?, x));
            }
        }
        out = next;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Monoidal auto-equivalence classes of `C`; their number is `|Stab([ω])|·|H²(E, ℂ^×)|`.
pub fn monoidal_autoequivalences(c: &PointedCategory) -> Result<Vec<FunctorClass>> {
    Ok(FunctorSpace::new(c, c)?.classes())
}

/// `Vec^ω(E)` with a faithful grading `E → G`.
#[derive(Clone, Debug)]
pub struct GradedPointedCategory {
    pub category: PointedCategory,
    pub grading: GradingSurjection,
}

impl GradedPointedCategory {
    pub fn new(category: PointedCategory, grading: GradingSurjection) -> Result<Self> {
        if grading.total != category.group {
            return Err(Error::Mismatch("grading is not on the category's group".into()));
        }
        Ok(GradedPointedCategory { category, grading })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub plain: bool,
    pub graded: bool,
    pub trivial_on_trivial_piece: bool,
    pub extension_equivalence: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predicate {
    Plain,
    Graded,
    TrivialOnTrivialPiece,
    ExtensionEquivalence,
}

impl Predicate {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Predicate::Plain),
            "graded" => Ok(Predicate::Graded),
            "ttp" => Ok(Predicate::TrivialOnTrivialPiece),
            "ext-eq" => Ok(Predicate::ExtensionEquivalence),
            _ => Err(Error::Descriptor(format!("predicate `{s}` (expected graded|ttp|ext-eq)"))),
        }
    }

    pub fn holds(&self, flags: &Flags) -> bool {
        match self {
            Predicate::Plain => flags.plain,
            Predicate::Graded => flags.graded,
            Predicate::TrivialOnTrivialPiece => flags.trivial_on_trivial_piece,
            Predicate::ExtensionEquivalence => flags.extension_equivalence,
        }
    }
}

/// Evaluates the grading flags of equivalences `C → D` between graded categories.
#[derive(Clone, Debug)]
pub struct FlagEvaluator {
    source: GradedPointedCategory,
    target: GradedPointedCategory,
    kernel: FiniteGroup,
    embedding: GroupHom,
    kernel_classifier: CstarClassifier,
}

impl FlagEvaluator {
    pub fn new(source: &GradedPointedCategory, target: &GradedPointedCategory) -> Result<Self> {
        let (kernel, emb) = source.grading.kernel_group();
        let kernel_classifier = CstarClassifier::new(&kernel, 2)?;
        Ok(FlagEvaluator {
            source: source.clone(),
            target: target.clone(),
            kernel,
            embedding: GroupHom { image: emb },
            kernel_classifier,
        })
    }

    /// `φ(B) = B′`.
    pub fn is_graded(&self, phi: &GroupHom) -> bool {
        let s = &self.source.grading;
        let t = &self.target.grading;
        s.kernel.len() == t.kernel.len() && s.kernel.iter().all(|&b| t.in_kernel(phi.apply(b)))
    }

    /// `φ|_B = id` (same element indices in source and target).
    pub fn fixes_kernel(&self, phi: &GroupHom) -> bool {
        self.source.grading.kernel.iter().all(|&b| phi.apply(b) == b)
    }

    /// Induced map on the grading group is the identity.
    pub fn induces_identity(&self, phi: &GroupHom) -> bool {
        let s = &self.source.grading;
        let t = &self.target.grading;
        s.total.elements().all(|x| t.degree(phi.apply(x)) == s.degree(x))
    }

    pub fn flags(&self, f: &PointedFunctor) -> Result<Flags> {
        let graded = self.is_graded(&f.phi);
        let ttp = graded && self.fixes_kernel(&f.phi) && {
            let restricted = pullback_unchecked(&f.tau, &self.embedding);
            debug_assert_eq!(restricted.group_order, self.kernel.order());
            self.kernel_classifier.is_trivial(&restricted)?
        };
        let ext = ttp && self.induces_identity(&f.phi);
        Ok(Flags { plain: true, graded, trivial_on_trivial_piece: ttp, extension_equivalence: ext })
    }
}

/// Flags of an auto-equivalence of a graded category.
pub fn classify_automorphism(c: &GradedPointedCategory, f: &PointedFunctor) -> Result<Flags> {
    FlagEvaluator::new(c, c)?.flags(f)
}

/// All classes `C → D` satisfying the predicate.
pub fn enumerate_graded_equivalences(
    c: &GradedPointedCategory,
    d: &GradedPointedCategory,
    predicate: Predicate,
) -> Result<Vec<FunctorClass>> {
    let space = FunctorSpace::new(&c.category, &d.category)?;
    let eval = FlagEvaluator::new(c, d)?;
    let mut out = Vec::new();
    for class in space.classes() {
        if predicate.holds(&eval.flags(&class.functor)?) {
            out.push(class);
        }
    }
    Ok(out)
}

/// φ-level count: isomorphisms satisfying the group-theoretic part of the predicate.
pub fn phi_level_count(c: &GradedPointedCategory, d: &GradedPointedCategory, predicate: Predicate) -> Result<usize> {
    let eval = FlagEvaluator::new(c, d)?;
    let space = FunctorSpace::new(&c.category, &d.category)?;
    Ok(space
        .coherent_isos()
        .filter(|phi| match predicate {
            Predicate::Plain => true,
            Predicate::Graded => eval.is_graded(phi),
            Predicate::TrivialOnTrivialPiece => eval.is_graded(phi) && eval.fixes_kernel(phi),
            Predicate::ExtensionEquivalence => {
                eval.is_graded(phi) && eval.fixes_kernel(phi) && eval.induces_identity(phi)
            }
        })
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar::cyclic_three_cocycle;
    use crate::group::{make_group, quotient};

    fn graded(e: &str, kernel: &[usize]) -> GradedPointedCategory {
        let g = make_group(e).unwrap();
        let grading = quotient(&g, kernel).unwrap();
        GradedPointedCategory::new(PointedCategory::vec(g), grading).unwrap()
    }

    #[test]
    fn autoequivalence_counts() {
        assert_eq!(monoidal_autoequivalences(&PointedCategory::vec(FiniteGroup::trivial())).unwrap().len(), 1);
        assert_eq!(monoidal_autoequivalences(&PointedCategory::vec(make_group("D6").unwrap())).unwrap().len(), 6);
        assert_eq!(monoidal_autoequivalences(&PointedCategory::vec(make_group("C3xC3").unwrap())).unwrap().len(), 144);
    }

    #[test]
    fn twisted_cyclic_stabilizers() {
        // φ = inversion pulls ω_k back to ω_k on Z/n (ω is quadratic in the generator)
        let c = PointedCategory::new(FiniteGroup::cyclic(5).unwrap(), cyclic_three_cocycle(5, 1)).unwrap();
        let classes = monoidal_autoequivalences(&c).unwrap();
        for cl in &classes {
            cl.functor.check_coherence(&c, &c).unwrap();
        }
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn d6_trivial_on_trivial_piece() {
        let c = graded("D6", &[0, 1, 2]);
        let ttp = enumerate_graded_equivalences(&c, &c, Predicate::TrivialOnTrivialPiece).unwrap();
        assert_eq!(ttp.len(), 3);
        // they close into a cyclic group of order 3
        let space = FunctorSpace::new(&c.category, &c.category).unwrap();
        let keys: Vec<ClassKey> = ttp.iter().map(|x| x.key.clone()).collect();
        for a in &ttp {
            let mut power = a.functor.clone();
            for _ in 0..2 {
                power = compose(&a.functor, &power).unwrap();
                assert!(keys.contains(&space.key(&power).unwrap()));
            }
            assert!(space.key(&power).unwrap().0 == (0..6).collect::<Vec<_>>());
        }
    }

    #[test]
    fn c3xc3_graded_counts() {
        // B = second factor = {0, 3, 6}
        let c = graded("C3xC3", &[0, 3, 6]);
        assert_eq!(phi_level_count(&c, &c, Predicate::Graded).unwrap(), 12);
        assert_eq!(phi_level_count(&c, &c, Predicate::TrivialOnTrivialPiece).unwrap(), 6);
        assert_eq!(enumerate_graded_equivalences(&c, &c, Predicate::Graded).unwrap().len(), 36);
        assert_eq!(enumerate_graded_equivalences(&c, &c, Predicate::TrivialOnTrivialPiece).unwrap().len(), 18);
    }

    #[test]
    fn identity_has_all_flags() {
        let c = graded("C4", &[0, 2]);
        let f = PointedFunctor::identity(&c.category);
        let flags = classify_automorphism(&c, &f).unwrap();
        assert!(flags.plain && flags.graded && flags.trivial_on_trivial_piece && flags.extension_equivalence);
    }

    #[test]
    fn non_isomorphic_groups_give_nothing() {
        let c = graded("C4", &[0, 2]);
        let d = graded("C2xC2", &[0, 1]);
        assert!(enumerate_graded_equivalences(&c, &d, Predicate::Plain).unwrap().is_empty());
    }

    /// Root-of-unity arithmetic on the unit circle, independent of the additive encoding.
    #[derive(Clone, Copy)]
    struct Unit(f64, f64);

    impl Unit {
        fn root(x: i64, m: i64) -> Self {
            let t = std::f64::consts::TAU * x as f64 / m as f64;
            Unit(t.cos(), t.sin())
        }
        fn mul(self, o: Unit) -> Unit {
            Unit(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
        }
        fn close(self, o: Unit) -> bool {
            (self.0 - o.0).abs() < 1e-9 && (self.1 - o.1).abs() < 1e-9
        }
    }

    #[test]
    fn coherence_convention_against_scalar_diagrams() {
        // E = C2, both associator classes on each side, every (unnormalized) tensorator over μ₄
        let g = FiniteGroup::cyclic(2).unwrap();
        let assoc = |w: i64| Cochain::scalar_from_fn(3, 2, 4, |t| if t == [1, 1, 1] { w } else { 0 });
        for (ws, wt) in [(0, 0), (0, 2), (2, 0), (2, 2)] {
            let (os, ot) = (assoc(ws), assoc(wt));
            let c = PointedCategory::new(g.clone(), os.clone()).unwrap();
            let d = PointedCategory::new(g.clone(), ot.clone()).unwrap();
            for code in 0..256usize {
                let tau = Cochain::scalar_from_fn(2, 2, 4, |t| ((code >> (2 * (2 * t[0] + t[1]))) & 3) as i64);
                let f = PointedFunctor { phi: GroupHom::identity(2), tau: tau.clone() };
                // F(α) ∘ J_{xy,z} ∘ (J_{x,y} ⊗ 1) = J_{x,yz} ∘ (1 ⊗ J_{y,z}) ∘ α′
                let r = |c: &Cochain, t: &[usize]| Unit::root(c.at(t), 4);
                let mut diagram = true;
                for x in 0..2 {
                    for y in 0..2 {
                        for z in 0..2 {
                            let lhs = r(&os, &[x, y, z]).mul(r(&tau, &[g.mul(x, y), z])).mul(r(&tau, &[x, y]));
                            let rhs = r(&tau, &[x, g.mul(y, z)]).mul(r(&tau, &[y, z])).mul(r(&ot, &[x, y, z]));
                            diagram &= lhs.close(rhs);
                        }
                    }
                }
                assert_eq!(f.check_coherence(&c, &d).is_ok(), diagram, "ω={ws} ω′={wt} τ={code}");
            }
        }
    }
}
