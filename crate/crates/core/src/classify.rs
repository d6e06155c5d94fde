//! Layered torsor counts for graded equivalences and graded extensions of
//! pointed categories, each paired with an enumeration oracle.

use std::collections::HashMap;
use std::path::Path;

use num_bigint::BigUint;

use crate::abelian::{AbelianGroup, Endo};
use crate::cochain::{pullback_unchecked, scalar_differential, Cochain, GModule};
use crate::cohomology::{cohomology, d1_subgroup, z1_order, CoboundarySolver, Support};
use crate::cstar::{cstar_cohomology, cstar_is_trivial};
use crate::error::{Error, Result};
use crate::group::{automorphisms, isomorphisms, make_group, quotient, FiniteGroup, GradingSurjection, GroupHom};
use crate::metric::HyperbolicCenter;
use crate::pointed::{
    compose, enumerate_graded_equivalences, ClassKey, FlagEvaluator, FunctorSpace, GradedPointedCategory,
    PointedCategory, PointedFunctor, Predicate,
};

/// Abelian invariant-factor model of a finite abelian group.
pub fn abelian_model(k: &FiniteGroup) -> Result<(AbelianGroup, GroupHom)> {
    if !k.is_abelian() {
        return Err(Error::Mismatch(format!("{} is not abelian", k.name())));
    }
    let profile = |g: &FiniteGroup| {
        let mut v: Vec<usize> = g.elements().map(|x| g.element_order(x)).collect();
        v.sort_unstable();
        v
    };
    let target = profile(k);
    for chain in divisor_chains(k.order() as i64) {
        let a = AbelianGroup::new(chain)?;
        if profile(&a.as_group()) != target {
            continue;
        }
        if let Some(iso) = isomorphisms(k, &a.as_group())?.into_iter().next() {
            return Ok((a, iso));
        }
    }
    Err(Error::Mismatch("no abelian model found".into()))
}

fn divisor_chains(n: i64) -> Vec<Vec<i64>> {
    fn go(rest: i64, min: i64, acc: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if rest == 1 {
            out.push(acc.clone());
            return;
        }
        for d in (2..=rest).filter(|d| rest % d == 0 && d % min == 0) {
            acc.push(d);
            go(rest / d, d, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 1, &mut Vec::new(), &mut out);
    out
}

/// A graded group `E → G` with abelian kernel `A`, normal form `x = a·s(g)`.
#[derive(Clone, Debug)]
pub struct GradedFrame {
    pub grading: GradingSurjection,
    pub kernel: FiniteGroup,
    pub embedding: GroupHom,
    pub abelian: AbelianGroup,
    to_abelian: GroupHom,
    position: Vec<Option<usize>>,
}

impl GradedFrame {
    pub fn new(grading: &GradingSurjection) -> Result<Self> {
        let (kernel, emb) = grading.kernel_group();
        let (abelian, to_abelian) = abelian_model(&kernel)?;
        let mut position = vec![None; grading.total.order()];
        for (i, &x) in emb.iter().enumerate() {
            position[x] = Some(i);
        }
        Ok(GradedFrame { grading: grading.clone(), kernel, embedding: GroupHom { image: emb }, abelian, to_abelian, position })
    }

    pub fn total(&self) -> &FiniteGroup {
        &self.grading.total
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.grading.grading
    }

    pub fn section(&self, g: usize) -> usize {
        self.grading.section[g]
    }

    /// Coordinates of a kernel element.
    pub fn coords(&self, x: usize) -> Vec<i64> {
        let k = self.position[x].expect("element lies in the kernel");
        self.abelian.element(self.to_abelian.apply(k))
    }

    pub fn element(&self, a: &[i64]) -> usize {
        let k = self.to_abelian.inverse().apply(self.abelian.index(a));
        self.embedding.apply(k)
    }

    /// `α_g(a) = s(g)·a·s(g)⁻¹`.
    pub fn action(&self, g: usize, a: &[i64]) -> Vec<i64> {
        self.coords(self.total().conj(self.section(g), self.element(a)))
    }

    pub fn module(&self) -> Result<GModule> {
        GModule::from_fn(self.group().clone(), self.abelian.clone(), |g, a| self.action(g, a))
    }

    /// `Λ = A × Â` with `g` acting by `(α_g, (α_g*)⁻¹)`.
    pub fn center_module(&self) -> Result<(HyperbolicCenter, GModule)> {
        center_of(&self.module()?)
    }

    /// `κ(g, h) = s(g)s(h)s(gh)⁻¹`.
    pub fn extension_cocycle(&self) -> Cochain {
        let e = self.total();
        let g = self.group();
        Cochain::from_fn(2, g.order(), self.abelian.factors(), |t| {
            let prod = e.mul(self.section(t[0]), self.section(t[1]));
            self.coords(e.mul(prod, e.inv(self.section(g.mul(t[0], t[1])))))
        })
    }

    pub fn preserves_kernel(&self, phi: &GroupHom) -> bool {
        self.embedding.image.iter().all(|&x| self.position[phi.apply(x)].is_some())
    }

    /// `φ|_A` as a homomorphism of the kernel group.
    pub fn kernel_map(&self, phi: &GroupHom) -> Option<GroupHom> {
        let image = self.embedding.image.iter().map(|&x| self.position[phi.apply(x)]).collect::<Option<Vec<_>>>()?;
        Some(GroupHom { image })
    }

    /// A kernel homomorphism in abelian coordinates.
    pub fn kernel_endo(&self, beta: &GroupHom) -> Result<Endo> {
        let inv = self.to_abelian.inverse();
        Endo::from_fn(&self.abelian, |a| {
            let k = inv.apply(self.abelian.index(a));
            self.abelian.element(self.to_abelian.apply(beta.apply(k)))
        })
    }

    /// The map induced on `G` by a kernel-preserving `φ`.
    pub fn induced(&self, phi: &GroupHom) -> GroupHom {
        GroupHom { image: self.group().elements().map(|g| self.grading.degree(phi.apply(self.section(g)))).collect() }
    }

    pub fn kernel_category(&self, c: &PointedCategory) -> Result<PointedCategory> {
        PointedCategory::new(self.kernel.clone(), pullback_unchecked(&c.omega, &self.embedding))
    }

    /// Restriction of a kernel-preserving functor to the trivial piece.
    pub fn restrict(&self, f: &PointedFunctor) -> Result<PointedFunctor> {
        let phi = self.kernel_map(&f.phi).ok_or_else(|| Error::Mismatch("functor does not preserve the kernel".into()))?;
        Ok(PointedFunctor { phi, tau: pullback_unchecked(&f.tau, &self.embedding) })
    }

    /// `ℓ(h) = φ̃(s(g))·s(h)⁻¹` for `h = φ̄(g)`: the object part of the system of equivalences.
    pub fn system_of(&self, phi: &GroupHom) -> Vec<Vec<i64>> {
        let e = self.total();
        let bar = self.induced(phi);
        let mut ell = vec![Vec::new(); self.group().order()];
        for g in self.group().elements() {
            let h = bar.apply(g);
            ell[h] = self.coords(e.mul(phi.apply(self.section(g)), e.inv(self.section(h))));
        }
        ell
    }

    /// `φ̃(a·s(g)) = β(a)·ℓ(φ̄g)·s(φ̄g)`; a homomorphism exactly when `T(ℓ) = 0`.
    pub fn assemble(&self, beta: &GroupHom, bar: &GroupHom, ell: &[Vec<i64>]) -> GroupHom {
        let e = self.total();
        let image = e
            .elements()
            .map(|x| {
                let g = self.grading.degree(x);
                let a = e.mul(x, e.inv(self.section(g)));
                let ba = self.embedding.apply(beta.apply(self.position[a].expect("kernel")));
                let h = bar.apply(g);
                e.mul(e.mul(ba, self.element(&ell[h])), self.section(h))
            })
            .collect();
        GroupHom { image }
    }

    /// `T(h₁, h₂) = Ψ(s g₁)·Ψ(s g₂)·Ψ(s g₁·s g₂)⁻¹ ∈ A` with `Ψ` assembled from `ℓ`, `g_i = φ̄⁻¹h_i`.
    pub fn t_cochain(&self, beta: &GroupHom, bar: &GroupHom, ell: &[Vec<i64>]) -> Cochain {
        let e = self.total();
        let psi = self.assemble(beta, bar, ell);
        let inv = bar.inverse();
        Cochain::from_fn(2, self.group().order(), self.abelian.factors(), |t| {
            let (x, y) = (self.section(inv.apply(t[0])), self.section(inv.apply(t[1])));
            let lhs = e.mul(psi.apply(x), psi.apply(y));
            self.coords(e.mul(lhs, e.inv(psi.apply(e.mul(x, y)))))
        })
    }

    /// `F̂ ↦ F̂^ρ` on object data: `ℓ(h) ↦ ρ(h) + ℓ(h)`.
    pub fn twist(&self, ell: &[Vec<i64>], rho: &Cochain) -> Vec<Vec<i64>> {
        ell.iter().enumerate().map(|(h, l)| self.abelian.add(rho.get(&[h]), l)).collect()
    }
}

/// `Λ_c = A × Â` for a `G`-module structure on `A`, in interleaved coordinates.
pub fn center_of(a: &GModule) -> Result<(HyperbolicCenter, GModule)> {
    let h = HyperbolicCenter::new(&a.coeffs)?;
    let action = a.group.elements().map(|g| h.lift_automorphism(a.action(g))).collect::<Result<Vec<_>>>()?;
    let m = GModule::new(a.group.clone(), h.group().clone(), action)?;
    Ok((h, m))
}

/// `|Z¹(G, Λ)|`, `|D¹(G, Λ)|` with `D¹` the cocycles of zero support.
pub fn z1_d1(a: &GModule) -> Result<(BigUint, BigUint)> {
    let (h, m) = center_of(a)?;
    let support = Support::new(h.group(), a.coeffs.clone(), h.support_matrix())?;
    Ok((z1_order(&m)?, d1_subgroup(&m, &support)?.order))
}

/// Two associators on one graded group with a constraint predicate.
#[derive(Clone, Debug)]
pub struct EquivalenceProblem {
    pub source: GradedPointedCategory,
    pub target: GradedPointedCategory,
    pub predicate: Predicate,
}

impl EquivalenceProblem {
    pub fn new(source: GradedPointedCategory, target: GradedPointedCategory, predicate: Predicate) -> Result<Self> {
        let (s, t) = (&source.grading, &target.grading);
        if s.total != t.total || s.proj != t.proj || s.grading != t.grading {
            return Err(Error::Mismatch("source and target must share the graded group".into()));
        }
        if predicate == Predicate::Plain {
            return Err(Error::Mismatch("torsor counts need a graded predicate".into()));
        }
        Ok(EquivalenceProblem { source, target, predicate })
    }

    /// Problem file with keys `group`, `kernel`, `source`, `target` (`zero` or a cochain
    /// path) and `predicate`.
    pub fn parse(text: &str, dir: &Path) -> Result<Self> {
        let kv = key_values(text)?;
        let get = |k: &str| kv.get(k).map(String::as_str).ok_or_else(|| Error::Parse(format!("missing `{k}`")));
        let e = make_group(get("group")?)?;
        let kernel = parse_indices(get("kernel")?)?;
        let grading = quotient(&e, &kernel)?;
        let cat = |k: &str| -> Result<GradedPointedCategory> {
            let omega = load_associator(get(k)?, &e, dir)?;
            GradedPointedCategory::new(PointedCategory::new(e.clone(), omega)?, grading.clone())
        };
        let predicate = Predicate::parse(kv.get("predicate").map(String::as_str).unwrap_or("graded"))?;
        Self::new(cat("source")?, cat("target")?, predicate)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, path.parent().unwrap_or(Path::new(".")))
    }
}

fn key_values(text: &str) -> Result<HashMap<String, String>> {
    let mut kv = HashMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (k, v) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        if kv.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("duplicate key `{k}`")));
        }
    }
    Ok(kv)
}

fn parse_indices(s: &str) -> Result<Vec<usize>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad element index `{t}`"))))
        .collect()
}

/// `zero` or a cochain file, relative to `dir`.
pub fn load_associator(spec: &str, e: &FiniteGroup, dir: &Path) -> Result<Cochain> {
    if spec == "zero" {
        return Ok(Cochain::scalar_zero(3, e.order(), 1));
    }
    let path = dir.join(spec);
    let (omega, g) = Cochain::read(&path)?;
    if g != *e {
        return Err(Error::Mismatch(format!("{} is over a different group", path.display())));
    }
    Ok(omega)
}

/// Category file with keys `group` and `associator` (`zero` or a cochain path).
pub fn parse_category(text: &str, dir: &Path) -> Result<PointedCategory> {
    let kv = key_values(text)?;
    let e = make_group(kv.get("group").ok_or_else(|| Error::Parse("missing `group`".into()))?)?;
    let omega = load_associator(kv.get("associator").map(String::as_str).unwrap_or("zero"), &e, dir)?;
    PointedCategory::new(e, omega)
}

pub fn read_category(path: &Path) -> Result<PointedCategory> {
    parse_category(&std::fs::read_to_string(path)?, path.parent().unwrap_or(Path::new(".")))
}

/// One `(F_e, φ)` row of the layered count.
#[derive(Clone, Debug)]
pub struct QuadrupleRow {
    pub fe: ClassKey,
    /// The map induced on `G`.
    pub phi: Vec<usize>,
    /// `inn(F_e)∘c∘φ = d`.
    pub condition: bool,
    /// `o₂` vanishes (`None` when the condition fails).
    pub o2: Option<bool>,
    /// Group isomorphisms realizing `(F_e, φ)`; equals `|Z¹(G, A)|` when `o₂` vanishes.
    pub systems: usize,
    /// `o₃` on the first system, and whether every system agrees.
    pub o3: Option<bool>,
    pub o3_uniform: bool,
    pub torsor: BigUint,
    pub h2: usize,
    pub contribution: BigUint,
    /// Enumerated classes with this `(F_e, φ)`.
    pub oracle: usize,
}

#[derive(Clone, Debug)]
pub struct QuadrupleSummary {
    pub rows: Vec<QuadrupleRow>,
    pub z1: BigUint,
    pub d1: BigUint,
    pub z1_kernel: BigUint,
    pub h2: usize,
    /// `|ker(H²(E, ℂ^×) → H²(A, ℂ^×))|`, the tensorator freedom seen by enumeration.
    pub h2_restriction_kernel: usize,
    pub total: BigUint,
    /// The same sum with `|H²(G, ℂ^×)|` replaced by the restriction kernel.
    pub refined_total: BigUint,
    pub oracle_total: usize,
}

impl QuadrupleSummary {
    pub fn agrees(&self) -> bool {
        self.total == BigUint::from(self.oracle_total)
    }

    pub fn refined_agrees(&self) -> bool {
        self.refined_total == BigUint::from(self.oracle_total)
    }
}

/// Kernel functor classes admissible under the predicate.
fn kernel_classes(space: &FunctorSpace, predicate: Predicate) -> Result<Vec<(ClassKey, PointedFunctor)>> {
    match predicate {
        Predicate::Plain | Predicate::Graded => {
            Ok(space.classes().into_iter().map(|c| (c.key, c.functor)).collect())
        }
        Predicate::TrivialOnTrivialPiece | Predicate::ExtensionEquivalence => {
            let id = PointedFunctor::identity(&space.source);
            let id = PointedFunctor { phi: id.phi, tau: Cochain::scalar_zero(2, space.source.group.order(), space.modulus) };
            let key = space
                .key(&id)
                .map_err(|_| Error::Mismatch("trivial pieces carry different associators".into()))?;
            Ok(vec![(key, id)])
        }
    }
}

/// Torsor-side count: `Σ |Z¹/D¹|·|H²(G, ℂ^×)|` over admissible `(F_e, φ)` with `o₂`, `o₃` vanishing.
pub fn equivalence_count(p: &EquivalenceProblem) -> Result<QuadrupleSummary> {
    let frame = GradedFrame::new(&p.source.grading)?;
    let (c, d) = (&p.source.category, &p.target.category);
    let (kc, kd) = (frame.kernel_category(c)?, frame.kernel_category(d)?);
    for k in [&kc, &kd] {
        if !cstar_is_trivial(&k.group, &k.omega)?.trivial {
            return Err(Error::Mismatch("trivial piece must be Vec(A) up to equivalence".into()));
        }
    }
    let module = frame.module()?;
    let (z1, d1) = z1_d1(&module)?;
    let torsor = &z1 / &d1;
    let z1_kernel = z1_order(&module)?;
    let h2 = if frame.group().order() == 1 { 1 } else { cstar_cohomology(frame.group(), 2, None)?.order() };
    let kernel_space = FunctorSpace::new(&kc, &kd)?;
    let space = FunctorSpace::new(c, d)?;
    let solver = CoboundarySolver::new(&module, 2)?;
    let eval = FlagEvaluator::new(&p.source, &p.target)?;
    let oracle_classes = enumerate_graded_equivalences(&p.source, &p.target, p.predicate)?;
    let oracle_keys: Vec<(ClassKey, Vec<usize>)> = oracle_classes
        .iter()
        .map(|cl| Ok((kernel_space.key(&frame.restrict(&cl.functor)?)?, frame.induced(&cl.functor.phi).image)))
        .collect::<Result<_>>()?;
    let graded_isos: Vec<&GroupHom> = space.isos.iter().filter(|phi| eval.is_graded(phi)).collect();
    let bars: Vec<GroupHom> = match p.predicate {
        Predicate::ExtensionEquivalence => vec![GroupHom::identity(frame.group().order())],
        _ => automorphisms(frame.group())?,
    };
    let classes = space.classes();
    let mut rows = Vec::new();
    for (fe, fe_functor) in kernel_classes(&kernel_space, p.predicate)? {
        let beta = &fe_functor.phi;
        let beta_a = frame.kernel_endo(beta)?;
        for bar in &bars {
            let g = frame.group();
            let condition = g.elements().all(|x| {
                frame.abelian.elements().all(|a| {
                    frame.action(bar.apply(x), &beta_a.apply(&frame.abelian, &a))
                        == beta_a.apply(&frame.abelian, &frame.action(x, &a))
                })
            });
            let oracle = oracle_keys.iter().filter(|(k, b)| *k == fe && *b == bar.image).count();
            let mut row = QuadrupleRow {
                fe: fe.clone(),
                phi: bar.image.clone(),
                condition,
                o2: None,
                systems: 0,
                o3: None,
                o3_uniform: true,
                torsor: torsor.clone(),
                h2,
                contribution: BigUint::from(0u32),
                oracle,
            };
            if condition {
                let zero = vec![frame.abelian.zero(); g.order()];
                let t0 = frame.t_cochain(beta, bar, &zero);
                let o2 = solver.witness(&t0)?.is_some();
                row.o2 = Some(o2);
                let systems: Vec<&GroupHom> = graded_isos
                    .iter()
                    .copied()
                    .filter(|phi| frame.kernel_map(phi).as_ref() == Some(beta) && frame.induced(phi) == *bar)
                    .collect();
                row.systems = systems.len();
                if o2 != !systems.is_empty() {
                    return Err(Error::Unresolved("o₂ verdict disagrees with the existence search".into()));
                }
                let verdicts: Vec<bool> = systems
                    .iter()
                    .map(|phi| {
                        Ok(classes.iter().filter(|cl| cl.functor.phi == **phi).any(|cl| {
                            frame.restrict(&cl.functor).and_then(|r| kernel_space.key(&r)).is_ok_and(|k| k == fe)
                        }))
                    })
                    .collect::<Result<_>>()?;
                if let Some(&first) = verdicts.first() {
                    row.o3 = Some(first);
                    row.o3_uniform = verdicts.iter().all(|&v| v == first);
                    if o2 && first {
                        row.contribution = &torsor * BigUint::from(h2);
                    }
                }
            }
            rows.push(row);
        }
    }
    let total: BigUint = rows.iter().map(|r| r.contribution.clone()).sum();
    let h2_restriction_kernel = restriction_kernel(&frame)?;
    let refined_total = if h2 == 0 { BigUint::from(0u32) } else { &total / BigUint::from(h2) * BigUint::from(h2_restriction_kernel) };
    Ok(QuadrupleSummary {
        rows,
        z1,
        d1,
        z1_kernel,
        h2,
        h2_restriction_kernel,
        total,
        refined_total,
        oracle_total: oracle_classes.len(),
    })
}

/// `|ker(H²(E, ℂ^×) → H²(A, ℂ^×))|`.
pub fn restriction_kernel(frame: &GradedFrame) -> Result<usize> {
    if frame.total().order() == 1 {
        return Ok(1);
    }
    let classifier = crate::cstar::CstarClassifier::new(&frame.kernel, 2)?;
    let mut count = 0;
    for c in cstar_classes(frame.total(), 2)? {
        if classifier.is_trivial(&pullback_unchecked(&c, &frame.embedding))? {
            count += 1;
        }
    }
    Ok(count)
}

/// `(F_e, φ, F̂, τ̂)` for a functor class: kernel class, induced map on `G`, object data `ℓ`,
/// and `H²(E, ℂ^×)` coordinates relative to the base tensorator of the assembled `φ̃`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quadruple {
    pub fe: ClassKey,
    pub phi: Vec<usize>,
    pub system: Vec<Vec<i64>>,
    pub tensor: Vec<i64>,
}

/// Functor spaces for one ordered pair of graded categories on a common graded group.
#[derive(Clone, Debug)]
pub struct QuadrupleContext {
    pub frame: GradedFrame,
    pub space: FunctorSpace,
    pub kernel_space: FunctorSpace,
}

impl QuadrupleContext {
    pub fn new(source: &GradedPointedCategory, target: &GradedPointedCategory) -> Result<Self> {
        let (s, t) = (&source.grading, &target.grading);
        if s.total != t.total || s.proj != t.proj {
            return Err(Error::Mismatch("categories must share the graded group".into()));
        }
        let frame = GradedFrame::new(s)?;
        let kernel_space =
            FunctorSpace::new(&frame.kernel_category(&source.category)?, &frame.kernel_category(&target.category)?)?;
        let space = FunctorSpace::new(&source.category, &target.category)?;
        Ok(QuadrupleContext { frame, space, kernel_space })
    }

    pub fn extract(&self, f: &PointedFunctor) -> Result<Quadruple> {
        let fe = self.kernel_space.key(&self.frame.restrict(f)?)?;
        let (_, tensor) = self.space.key(f)?;
        Ok(Quadruple {
            fe,
            phi: self.frame.induced(&f.phi).image,
            system: self.frame.system_of(&f.phi),
            tensor,
        })
    }

    pub fn reconstruct(&self, q: &Quadruple) -> Result<PointedFunctor> {
        let beta = GroupHom { image: q.fe.0.clone() };
        let phi = self.frame.assemble(&beta, &GroupHom { image: q.phi.clone() }, &q.system);
        GroupHom::new(self.frame.total(), self.frame.total(), phi.image.clone())
            .map_err(|_| Error::Mismatch("system of equivalences is not a homomorphism".into()))?;
        let f = self
            .space
            .representative(&(phi.image, q.tensor.clone()))
            .ok_or_else(|| Error::Mismatch("quadruple has no coherent realization".into()))?;
        if self.kernel_space.key(&self.frame.restrict(&f)?)? != q.fe {
            return Err(Error::Mismatch("tensor coordinates do not restrict to F_e".into()));
        }
        Ok(f)
    }
}

/// `(F_e′∘F_e, φ′∘φ, F̂′_{φ(g)}∘F̂_g, τ̂)` with `ℓ(φ′h) = β′(ℓ₁(h)) + ℓ₂(φ′h)`.
pub fn compose_quadruples(
    outer: &QuadrupleContext,
    inner: &QuadrupleContext,
    total: &QuadrupleContext,
    q2: &Quadruple,
    q1: &Quadruple,
) -> Result<Quadruple> {
    let same = |a: &PointedCategory, b: &PointedCategory| a.group == b.group && a.omega == b.omega;
    if !same(&inner.space.target, &outer.space.source)
        || !same(&inner.space.source, &total.space.source)
        || !same(&outer.space.target, &total.space.target)
    {
        return Err(Error::Mismatch("quadruples are not composable in these contexts".into()));
    }
    let k1 = inner
        .kernel_space
        .representative(&q1.fe)
        .ok_or_else(|| Error::Mismatch("unknown kernel class".into()))?;
    let k2 = outer
        .kernel_space
        .representative(&q2.fe)
        .ok_or_else(|| Error::Mismatch("unknown kernel class".into()))?;
    let fe = total.kernel_space.key(&compose(&k2, &k1)?)?;
    let frame = &total.frame;
    let (bar1, bar2) = (GroupHom { image: q1.phi.clone() }, GroupHom { image: q2.phi.clone() });
    let phi = bar2.after(&bar1);
    let beta2 = frame.kernel_endo(&k2.phi)?;
    let mut system = vec![Vec::new(); frame.group().order()];
    for h in frame.group().elements() {
        let h2 = bar2.apply(h);
        system[h2] = frame.abelian.add(&beta2.apply(&frame.abelian, &q1.system[h]), &q2.system[h2]);
    }
    let f1 = inner.reconstruct(q1)?;
    let f2 = outer.reconstruct(q2)?;
    let psi = frame.assemble(&k2.phi.after(&k1.phi), &phi, &system);
    if psi != f2.phi.after(&f1.phi) {
        return Err(Error::Mismatch("composed systems do not assemble to the composite".into()));
    }
    let tau = f1.tau.clone();
    let pulled = pullback_unchecked(&f2.tau, &f1.phi);
    let (a, b) = crate::pointed::align(&tau, &pulled);
    let (_, tensor) = total.space.key(&PointedFunctor { phi: psi, tau: a.add(&b)? })?;
    Ok(Quadruple { fe, phi: phi.image, system, tensor })
}

/// Supplied or computed verdict on an obstruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub vanishes: bool,
    pub how: String,
}

/// `G` acting on `A` through automorphisms, lifted to `A × Â`.
#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    pub action: GModule,
    pub o3: Option<bool>,
    pub o4: Option<bool>,
}

impl ExtensionProblem {
    /// Keys `base`, `group`, `act <g> : <matrix>` lines, optional `o3`/`o4` (`vanishes|obstructed`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut module = String::new();
        let (mut o3, mut o4) = (None, None);
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let verdict = |v: &str| match v.trim() {
                "vanishes" => Ok(Some(true)),
                "obstructed" => Ok(Some(false)),
                other => Err(Error::Parse(format!("bad obstruction verdict `{other}`"))),
            };
            match k {
                "base" => module.push_str(&format!("coefficients {v}\n")),
                "group" | "act" => module.push_str(&format!("{line}\n")),
                "o3" => o3 = verdict(v)?,
                "o4" => o4 = verdict(v)?,
                _ => return Err(Error::Parse(format!("unknown key `{k}`"))),
            }
        }
        Ok(ExtensionProblem { action: GModule::parse(&module, None)?, o3, o4 })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug)]
pub struct ExtensionCount {
    pub h2_order: BigUint,
    pub h3_order: usize,
    pub o3: Verdict,
    pub o4: Verdict,
    pub count: BigUint,
}

/// Largest `|G|` for which `H⁴(G, ℂ^×)` is computed to settle `o₄`.
pub const O4_GROUP_CAP: usize = 6;

/// `|H²(G, Λ_c)|·|H³(G, ℂ^×)|` when both obstructions vanish, else 0.
pub fn extension_count(p: &ExtensionProblem, cap: usize) -> Result<ExtensionCount> {
    let g = &p.action.group;
    if p.action.coeffs.order() * g.order() > cap && (p.o3.is_none() || p.o4.is_none()) {
        return Err(Error::Unresolved(format!(
            "obstruction flags must be supplied above |A|·|G| = {cap}"
        )));
    }
    let o3 = match p.o3 {
        Some(v) => Verdict { vanishes: v, how: "supplied".into() },
        None => {
            let grading = extension_group(&p.action, &Cochain::zero(2, g.order(), p.action.factors()))?;
            let frame = GradedFrame::new(&grading)?;
            let realized = g.elements().all(|x| {
                p.action.coeffs.elements().all(|a| {
                    let img = frame.coords(frame.total().conj(frame.section(x), embed(&p.action.coeffs, &a)));
                    img == p.action.act(x, &a)
                })
            });
            Verdict { vanishes: realized, how: "semidirect product realizes c".into() }
        }
    };
    let o4 = match p.o4 {
        Some(v) => Verdict { vanishes: v, how: "supplied".into() },
        None if g.order() == 1 => Verdict { vanishes: true, how: "trivial grading group".into() },
        None if g.order() <= O4_GROUP_CAP => {
            let h4 = cstar_cohomology(g, 4, None)?.order();
            if h4 != 1 {
                return Err(Error::Unresolved(format!("H⁴(G, ℂ^×) has order {h4}; supply o4")));
            }
            Verdict { vanishes: true, how: "H⁴(G, ℂ^×) = 0".into() }
        }
        None => return Err(Error::Unresolved("o4 must be supplied for this grading group".into())),
    };
    let (_, lambda) = center_of(&p.action)?;
    let h2_order = cohomology(&lambda, 2)?.order;
    let h3_order = if g.order() == 1 { 1 } else { cstar_cohomology(g, 3, None)?.order() };
    let count = if o3.vanishes && o4.vanishes { &h2_order * BigUint::from(h3_order) } else { BigUint::from(0u32) };
    Ok(ExtensionCount { h2_order, h3_order, o3, o4, count })
}

fn embed(a: &AbelianGroup, x: &[i64]) -> usize {
    a.index(x)
}

/// `E_κ` on pairs `(a, g)` (index `g·|A| + a`) with `(a,g)(b,h) = (a + g·b + κ(g,h), gh)`.
pub fn extension_group(action: &GModule, kappa: &Cochain) -> Result<GradingSurjection> {
    let a = &action.coeffs;
    let g = &action.group;
    let (na, ng) = (a.order(), g.order());
    let n = na * ng;
    let mut mul = vec![0; n * n];
    for x in 0..n {
        let (xa, xg) = (a.element(x % na), x / na);
        for y in 0..n {
            let (ya, yg) = (a.element(y % na), y / na);
            let sum = a.add(&a.add(&xa, &action.act(xg, &ya)), kappa.get(&[xg, yg]));
            mul[x * n + y] = g.mul(xg, yg) * na + a.index(&sum);
        }
    }
    let e = FiniteGroup::from_table(format!("{}.{}", a.descriptor(), g.name()), n, mul)?;
    GradingSurjection::from_projection(e, g.clone(), (0..n).map(|x| x / na).collect())
}

/// All classes of `H^n(E, ℂ^×)` as cocycles.
fn cstar_classes(e: &FiniteGroup, degree: usize) -> Result<Vec<Cochain>> {
    let h = cstar_cohomology(e, degree, None)?;
    let mut out = vec![Cochain::scalar_zero(degree, e.order(), h.modulus)];
    for (gen, &ord) in h.generators.iter().zip(&h.invariant_factors) {
        let mut next = Vec::new();
        for base in &out {
            for k in 0..ord {
                next.push(base.add(&gen.scale(k))?);
            }
        }
        out = next;
    }
    Ok(out)
}

/// All elements of `H²(G, A)` as cocycles.
fn module_classes(m: &GModule) -> Result<Vec<Cochain>> {
    let h = cohomology(m, 2)?;
    let mut out = vec![Cochain::zero(2, m.group.order(), m.factors())];
    for (gen, &ord) in h.generators.iter().zip(&h.invariant_factors) {
        let mut next = Vec::new();
        for base in &out {
            for k in 0..ord {
                next.push(base.add(&gen.scale(k))?);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Adjusts `ω` by a coboundary so that it vanishes on the kernel.
fn trivialize_on_kernel(frame: &GradedFrame, omega: &Cochain) -> Result<Option<Cochain>> {
    let restricted = pullback_unchecked(omega, &frame.embedding);
    let verdict = cstar_is_trivial(&frame.kernel, &restricted)?;
    if !verdict.trivial {
        return Ok(None);
    }
    let Some(w) = verdict.witness else { return Ok(Some(omega.clone())) };
    let m = w.modulus();
    let n = frame.total().order();
    let mut pos = vec![None; n];
    for (i, &x) in frame.embedding.image.iter().enumerate() {
        pos[x] = Some(i);
    }
    let lifted = Cochain::scalar_from_fn(2, n, m, |t| match (pos[t[0]], pos[t[1]]) {
        (Some(i), Some(j)) => w.at(&[i, j]),
        _ => 0,
    });
    let adjusted = omega.rescale(m)?.sub(&scalar_differential(frame.total(), &lifted))?;
    debug_assert!(pullback_unchecked(&adjusted, &frame.embedding).is_zero());
    Ok(Some(adjusted))
}

/// Enumerated pointed extensions, one representative per extension-equivalence class.
#[derive(Clone, Debug)]
pub struct BruteExtensions {
    pub classes: Vec<GradedPointedCategory>,
    /// Candidates examined: `(κ class, ω classes trivial on A)`.
    pub candidates: usize,
}

/// Pointed extensions `Vec^ω(E_κ)` of `Vec(A)` with action `c`, over all `κ ∈ H²(G, A_c)` and
/// `ω ∈ H³(E_κ, ℂ^×)` trivial on `A`, up to extension equivalence.
pub fn brute_force_extensions(action: &GModule, cap: usize) -> Result<BruteExtensions> {
    let n = action.coeffs.order() * action.group.order();
    if n > cap {
        return Err(Error::CapExceeded { what: "extension group order".into(), size: n, cap });
    }
    let mut classes = Vec::new();
    let mut candidates = 0;
    for kappa in module_classes(action)? {
        let grading = extension_group(action, &kappa)?;
        let frame = GradedFrame::new(&grading)?;
        let mut reps: Vec<GradedPointedCategory> = Vec::new();
        for omega in cstar_classes(frame.total(), 3)? {
            let Some(omega) = trivialize_on_kernel(&frame, &omega)? else { continue };
            candidates += 1;
            let cat = GradedPointedCategory::new(PointedCategory::new(frame.total().clone(), omega)?, grading.clone())?;
            let mut known = false;
            for r in &reps {
                if !enumerate_graded_equivalences(&cat, r, Predicate::ExtensionEquivalence)?.is_empty() {
                    known = true;
                    break;
                }
            }
            if !known {
                reps.push(cat);
            }
        }
        classes.extend(reps);
    }
    Ok(BruteExtensions { classes, candidates })
}

/// Orbits of extensions under twisting the trivial piece by auto-equivalences.
#[derive(Clone, Debug)]
pub struct TwistOrbits {
    pub orbits: Vec<Vec<usize>>,
    /// For each pair in a common orbit, the key of a certifying graded equivalence.
    pub certificates: Vec<((usize, usize), ClassKey)>,
}

/// Orbit count of `exts` under the `F`-twist by kernel classes in `auts` (all when `None`).
pub fn ftwist_orbits(exts: &[GradedPointedCategory], auts: Option<&[ClassKey]>) -> Result<TwistOrbits> {
    let Some(first) = exts.first() else {
        return Ok(TwistOrbits { orbits: Vec::new(), certificates: Vec::new() });
    };
    for e in exts {
        if e.grading.total != first.grading.total || e.grading.proj != first.grading.proj {
            return Err(Error::Mismatch("extensions have inconsistent trivial pieces".into()));
        }
    }
    let frame = GradedFrame::new(&first.grading)?;
    let n = exts.len();
    let mut link: HashMap<(usize, usize), ClassKey> = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let ctx_kernel = FunctorSpace::new(
                &frame.kernel_category(&exts[i].category)?,
                &frame.kernel_category(&exts[j].category)?,
            )?;
            let eval = FlagEvaluator::new(&exts[i], &exts[j])?;
            for cl in enumerate_graded_equivalences(&exts[i], &exts[j], Predicate::Graded)? {
                if !eval.induces_identity(&cl.functor.phi) {
                    continue;
                }
                let fe = ctx_kernel.key(&frame.restrict(&cl.functor)?)?;
                if auts.is_none_or(|a| a.contains(&fe)) {
                    link.insert((i, j), cl.key.clone());
                    break;
                }
            }
        }
    }
    let mut orbit_of = vec![usize::MAX; n];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&j| j == i || link.contains_key(&(i, j))).collect();
        for &j in &members {
            orbit_of[j] = orbits.len();
        }
        orbits.push(members);
    }
    let mut certificates = Vec::new();
    for o in &orbits {
        for &a in o {
            for &b in o {
                if a < b {
                    let key = link
                        .get(&(a, b))
                        .ok_or_else(|| Error::Unresolved(format!("extensions {a} and {b} share an orbit without a certificate")))?;
                    certificates.push(((a, b), key.clone()));
                }
            }
        }
    }
    Ok(TwistOrbits { orbits, certificates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::differential;
    use crate::cstar::cyclic_three_cocycle;

    fn graded(e: &str, kernel: &[usize]) -> GradedPointedCategory {
        let g = make_group(e).unwrap();
        let grading = quotient(&g, kernel).unwrap();
        GradedPointedCategory::new(PointedCategory::vec(g), grading).unwrap()
    }

    fn problem(e: &str, kernel: &[usize], p: Predicate) -> EquivalenceProblem {
        let c = graded(e, kernel);
        EquivalenceProblem::new(c.clone(), c, p).unwrap()
    }

    #[test]
    fn d6_torsor_layers() {
        let s = equivalence_count(&problem("D6", &[0, 1, 2], Predicate::TrivialOnTrivialPiece)).unwrap();
        assert_eq!((s.z1.clone(), s.d1.clone()), (BigUint::from(9u32), BigUint::from(3u32)));
        assert_eq!(s.total, BigUint::from(3u32));
        assert!(s.agrees());
        let g = equivalence_count(&problem("D6", &[0, 1, 2], Predicate::Graded)).unwrap();
        assert_eq!(g.total, BigUint::from(6u32));
        assert!(g.agrees());
        for r in &g.rows {
            if r.o2 == Some(true) {
                assert_eq!(BigUint::from(r.systems), g.z1_kernel);
            }
        }
    }

    #[test]
    fn trivial_grading_counts_autoequivalences() {
        let e = make_group("C3").unwrap();
        let c = GradedPointedCategory::new(
            PointedCategory::vec(e.clone()),
            GradingSurjection::trivial(e),
        )
        .unwrap();
        let s = equivalence_count(&EquivalenceProblem::new(c.clone(), c, Predicate::Graded).unwrap()).unwrap();
        assert_eq!(s.total, BigUint::from(2u32));
        assert!(s.agrees());
    }

    #[test]
    fn frame_t_cochain_matches_factor_set() {
        let c = graded("D6", &[0, 1, 2]);
        let frame = GradedFrame::new(&c.grading).unwrap();
        let m = frame.module().unwrap();
        assert!(crate::cochain::is_cocycle(&m, &frame.extension_cocycle()));
        let id = GroupHom::identity(frame.kernel.order());
        let bar = GroupHom::identity(2);
        let zero = vec![frame.abelian.zero(); 2];
        assert!(frame.t_cochain(&id, &bar, &zero).is_zero());
        // a random system shifts T by its coboundary
        let rho = Cochain::from_fn(1, 2, frame.abelian.factors(), |t| vec![if t[0] == 1 { 1 } else { 0 }]);
        let shifted = frame.t_cochain(&id, &bar, &frame.twist(&zero, &rho));
        assert_eq!(shifted, differential(&m, &rho));
    }

    #[test]
    fn quadruple_round_trip_and_composition() {
        let c = graded("D6", &[0, 1, 2]);
        let ctx = QuadrupleContext::new(&c, &c).unwrap();
        let classes = ctx.space.classes();
        for cl in &classes {
            let q = ctx.extract(&cl.functor).unwrap();
            assert_eq!(ctx.space.key(&ctx.reconstruct(&q).unwrap()).unwrap(), cl.key);
        }
        for a in &classes {
            for b in &classes {
                let direct = ctx.extract(&compose(&a.functor, &b.functor).unwrap()).unwrap();
                let (qa, qb) = (ctx.extract(&a.functor).unwrap(), ctx.extract(&b.functor).unwrap());
                assert_eq!(compose_quadruples(&ctx, &ctx, &ctx, &qa, &qb).unwrap(), direct);
            }
        }
    }

    #[test]
    fn extension_counts() {
        let c2 = make_group("C2").unwrap();
        let neg = GModule::from_descriptor(&c2, "neg:C3").unwrap();
        let p = ExtensionProblem { action: neg.clone(), o3: None, o4: None };
        let r = extension_count(&p, 64).unwrap();
        assert_eq!((r.h2_order.clone(), r.h3_order, r.count.clone()), (BigUint::from(1u32), 2, BigUint::from(2u32)));
        assert_eq!(brute_force_extensions(&neg, 64).unwrap().classes.len(), 2);
        let vec_only = GModule::trivial(c2.clone(), AbelianGroup::trivial());
        let r = extension_count(&ExtensionProblem { action: vec_only.clone(), o3: None, o4: None }, 64).unwrap();
        assert_eq!(r.count, BigUint::from(2u32));
        assert_eq!(brute_force_extensions(&vec_only, 64).unwrap().classes.len(), 2);
        let c1 = GModule::trivial(FiniteGroup::trivial(), AbelianGroup::cyclic(3));
        assert_eq!(extension_count(&ExtensionProblem { action: c1, o3: None, o4: None }, 64).unwrap().count, BigUint::from(1u32));
    }

    #[test]
    fn extension_problem_file() {
        let p = ExtensionProblem::parse("base C3\ngroup C2\nact 1 : -1\n").unwrap();
        assert_eq!(extension_count(&p, 64).unwrap().count, BigUint::from(2u32));
        assert!(ExtensionProblem::parse("base C3\ngroup C2\no3 maybe\n").is_err());
    }

    #[test]
    fn d6_ftwist_orbits() {
        let neg = GModule::from_descriptor(&make_group("C2").unwrap(), "neg:C3").unwrap();
        let exts = brute_force_extensions(&neg, 64).unwrap().classes;
        let o = ftwist_orbits(&exts, None).unwrap();
        assert_eq!(o.orbits.iter().map(Vec::len).sum::<usize>(), exts.len());
        let lone = ftwist_orbits(&exts[..1], None).unwrap();
        assert_eq!(lone.orbits, vec![vec![0]]);
    }

    #[test]
    fn twisted_associator_problem_file() {
        let dir = std::env::temp_dir().join("gradeq-classify-test");
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("w.cochain"), cyclic_three_cocycle(3, 1).to_text("C3")).unwrap();
        let text = "group C3\nkernel 0\nsource w.cochain\ntarget w.cochain\npredicate ext-eq\n";
        let p = EquivalenceProblem::parse(text, &dir).unwrap();
        let s = equivalence_count(&p).unwrap();
        assert!(s.agrees());
        assert_eq!(s.total, BigUint::from(1u32));
        assert!(EquivalenceProblem::parse("group C3\nkernel 0\nsource zero\n", &dir).is_err());
    }
}
