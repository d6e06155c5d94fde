//! The reproduction suite: ten exact checks shared by `gradeq reproduce` and the
//! acceptance test target.

use std::collections::HashSet;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian::AbelianGroup;
use crate::classify::{
    brute_force_extensions, compose_quadruples, equivalence_count, extension_count, ftwist_orbits, z1_d1,
    EquivalenceProblem, ExtensionProblem, GradedFrame, QuadrupleContext,
};
use crate::cochain::{differential, is_cocycle, pullback, pullback_unchecked, scalar_differential, tuple_of, Cochain, GModule};
use crate::cohomology::{cohomology, d1_subgroup, Support};
use crate::cstar::{cstar_cohomology, cstar_is_trivial, cyclic_three_cocycle, CstarClassifier, CstarTester};
use crate::error::{Error, Result};
use crate::group::{automorphisms, homomorphisms, make_group, quotient, FiniteGroup, GroupHom};
use crate::metric::{fermion_checks, metric_groups, HyperbolicCenter, Kind};
use crate::pointed::{
    classify_automorphism, compose, enumerate_graded_equivalences, FlagEvaluator, FunctorClass, monoidal_autoequivalences, phi_level_count,
    ClassKey, GradedPointedCategory, PointedCategory, PointedFunctor, Predicate,
};
use crate::report::{Claim, CheckLine, RunReport, Table};

/// Public operations that `reproduce` must exercise.
pub const PUBLIC_OPS: &[&str] = &[
    "make_group",
    "automorphisms",
    "quotient",
    "differential",
    "cohomology",
    "d1_subgroup",
    "cstar_is_trivial",
    "cstar_cohomology",
    "pullback",
    "monoidal_autoequivalences",
    "classify_automorphism",
    "compose",
    "enumerate_graded_equivalences",
    "find_distinguished",
    "em_realize",
    "build_fz",
    "is_braided",
    "hyperbolic_center",
    "extension_count",
    "equivalence_count",
    "compose_quadruples",
    "ftwist_orbits",
];

pub const CHECK_COUNT: usize = 10;

/// Seed of the randomized cocycle-identity instances.
pub const SEED: u64 = 0x6772_6164_6571;

/// Randomized instances in check 8.
pub const INSTANCES: usize = 120;

pub const NAMES: [&str; CHECK_COUNT] = [
    "Z1/B1/D1 for C2 on (Z/3)^2 by negation",
    "Vec(D6) graded by C2, trivial on the trivial piece",
    "Vec(C3xC3) graded by C3: phi-level and class-level counts",
    "|Aut(Vec^w(G))| = |Stab([w])|·|H^2(G,C^x)|",
    "H^n(G,C^x) by Smith normal form and by mu_M stabilization",
    "Bockstein against exhaustive coboundary search",
    "fermion twist coherent, braided iff fermion",
    "T and coherence-defect cocycle identities",
    "group axioms and quadruple composition",
    "extensions of Vec(Z/3) by C2 with inversion",
];

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub claims: Vec<Claim>,
    pub table: Option<Table>,
    pub notes: Vec<String>,
    pub ops: &'static [&'static str],
}

impl Outcome {
    fn new(id: usize, ops: &'static [&'static str]) -> Self {
        Outcome {
            id,
            name: NAMES[id - 1],
            passed: true,
            detail: String::new(),
            claims: Vec::new(),
            table: None,
            notes: Vec::new(),
            ops,
        }
    }

    fn claim(&mut self, name: &str, value: impl ToString, path: &str) {
        self.claims.push(Claim { name: name.into(), value: value.to_string(), path: path.into() });
    }

    fn expect(&mut self, ok: bool) {
        self.passed &= ok;
    }

    pub fn line(&self) -> String {
        format!("{:>2} {} {}: {}", self.id, if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Runs one check; errors become a failing outcome with the diagnostic.
pub fn run_check(id: usize) -> Outcome {
    let result = match id {
        1 => check_worked_example(),
        2 => check_d6(),
        3 => check_c3xc3(),
        4 => check_aut_formula(),
        5 => check_cstar_paths(),
        6 => check_bockstein(),
        7 => check_fermion(),
        8 => check_cocycle_identities(),
        9 => check_group_structure(),
        10 => check_extensions(),
        _ => Err(Error::Mismatch(format!("no check {id}"))),
    };
    result.unwrap_or_else(|e| {
        let mut o = Outcome::new(id.clamp(1, CHECK_COUNT), &[]);
        o.id = id;
        o.passed = false;
        o.detail = format!("error: {e}");
        o
    })
}

pub fn run_all() -> Vec<Outcome> {
    (1..=CHECK_COUNT).map(run_check).collect()
}

/// Operations of `PUBLIC_OPS` not exercised by the outcomes.
pub fn uncovered(outcomes: &[Outcome]) -> Vec<&'static str> {
    let seen: HashSet<&str> = outcomes.iter().flat_map(|o| o.ops.iter().copied()).collect();
    PUBLIC_OPS.iter().copied().filter(|op| !seen.contains(op)).collect()
}

/// The comparison table and one check line per criterion.
pub fn reproduce_report(command: &str) -> RunReport {
    let outcomes = run_all();
    let mut report = RunReport::new(command);
    report.input("seed", format!("{SEED:#x}"));
    let mut table = Table::new("comparison", &["check", "quantity", "value", "path"]);
    for o in &outcomes {
        for c in &o.claims {
            table.push(vec![o.id.to_string(), c.name.clone(), c.value.clone(), c.path.clone()]);
        }
    }
    report.tables.push(table);
    for o in &outcomes {
        if let Some(t) = &o.table {
            report.tables.push(t.clone());
        }
        report.notes.extend(o.notes.iter().cloned());
        report.checks.push(CheckLine { id: o.id, name: o.name.into(), passed: o.passed, detail: o.detail.clone() });
    }
    let missing = uncovered(&outcomes);
    report.checks.push(CheckLine {
        id: CHECK_COUNT + 1,
        name: "every public operation exercised".into(),
        passed: missing.is_empty(),
        detail: if missing.is_empty() {
            format!("{} operations", PUBLIC_OPS.len())
        } else {
            format!("missing {}", missing.join(", "))
        },
    });
    report
}

fn big(n: usize) -> BigUint {
    BigUint::from(n)
}

fn vec_graded(e: &str, kernel: &[usize]) -> Result<GradedPointedCategory> {
    let g = make_group(e)?;
    let grading = quotient(&g, kernel)?;
    GradedPointedCategory::new(PointedCategory::vec(g), grading)
}

fn check_worked_example() -> Result<Outcome> {
    let mut o = Outcome::new(1, &["make_group", "cohomology", "d1_subgroup", "hyperbolic_center"]);
    let g = make_group("C2")?;
    let m = GModule::from_descriptor(&g, "neg:C3xC3")?;
    let h = cohomology(&m, 1)?;
    let d1 = d1_subgroup(&m, &Support::coordinate_sum(&m.coeffs)?)?;
    let quotient_order = &h.cocycle_order / &d1.order;
    o.claim("|Z^1|", &h.cocycle_order, "Smith normal form of d^1");
    o.claim("|B^1|", &h.coboundary_order, "Smith normal form of d^0");
    o.claim("|D^1|", &d1.order, "kernel of d^1 and product support");
    o.claim("|Z^1/D^1|", &quotient_order, "quotient");
    let base = GModule::from_descriptor(&g, "neg:C3")?;
    let center = HyperbolicCenter::new(&base.coeffs)?;
    let (z1c, d1c) = z1_d1(&base)?;
    o.claim("|Z^1| on Z/3 x dual", &z1c, "hyperbolic center module");
    o.claim("|D^1| on Z/3 x dual", &d1c, "hyperbolic center support projection");
    o.expect(h.cocycle_order == big(9) && h.coboundary_order == big(9) && d1.order == big(3));
    o.expect(quotient_order == big(3) && z1c == big(9) && d1c == big(3) && center.group().order() == 9);
    o.detail = format!(
        "|Z1|={} |B1|={} |D1|={} |Z1/D1|={}; center path {}/{}",
        h.cocycle_order, h.coboundary_order, d1.order, quotient_order, z1c, d1c
    );
    Ok(o)
}

fn check_d6() -> Result<Outcome> {
    let mut o = Outcome::new(2, &["quotient", "equivalence_count", "enumerate_graded_equivalences"]);
    let c = vec_graded("D6", &[0, 1, 2])?;
    let s = equivalence_count(&EquivalenceProblem::new(c.clone(), c, Predicate::TrivialOnTrivialPiece)?)?;
    o.claim("ttp classes", &s.total, "torsor formula");
    o.claim("ttp classes", s.oracle_total, "brute-force enumeration");
    o.claim("|Z^1/D^1|", &s.z1 / &s.d1, "hyperbolic center");
    o.expect(s.total == big(3) && s.oracle_total == 3 && s.refined_total == big(3));
    o.detail = format!("torsor {} brute force {}", s.total, s.oracle_total);
    Ok(o)
}

fn check_c3xc3() -> Result<Outcome> {
    let mut o = Outcome::new(3, &["enumerate_graded_equivalences", "cstar_cohomology"]);
    let c = vec_graded("C3xC3", &[0, 3, 6])?;
    let h2 = cstar_cohomology(&c.category.group, 2, None)?.order();
    o.claim("|H^2(C3xC3,C^x)|", h2, "integral Smith normal form");
    let mut parts = Vec::new();
    for (p, label, phi_expected) in
        [(Predicate::Plain, "plain", 48), (Predicate::Graded, "graded", 12), (Predicate::TrivialOnTrivialPiece, "ttp", 6)]
    {
        let phi = phi_level_count(&c, &c, p)?;
        let classes = enumerate_graded_equivalences(&c, &c, p)?.len();
        o.claim(&format!("{label} phi-level"), phi, "group isomorphism filter");
        o.claim(&format!("{label} class-level"), classes, "brute-force enumeration");
        o.expect(phi == phi_expected && classes == phi_expected * h2);
        parts.push(format!("{label} {phi}/{classes}"));
    }
    o.expect(h2 == 3);
    for (p, label) in [(Predicate::Graded, "graded"), (Predicate::TrivialOnTrivialPiece, "ttp")] {
        let s = equivalence_count(&EquivalenceProblem::new(c.clone(), c.clone(), p)?)?;
        o.claim(&format!("{label} layered sum"), &s.total, "torsor formula with |H^2(G)|");
        o.claim(&format!("{label} refined sum"), &s.refined_total, "torsor formula with ker res");
        o.expect(s.refined_agrees());
    }
    o.detail = format!("phi/class: {}; |H2| = {h2}", parts.join(", "));
    Ok(o)
}

/// Groups of order at most 8, one per isomorphism type.
pub const SMALL_GROUPS: &[&str] =
    &["C1", "C2", "C3", "C4", "C2xC2", "C5", "C6", "D6", "C7", "C8", "C2xC4", "C2xC2xC2", "D8", "Q8"];

fn check_aut_formula() -> Result<Outcome> {
    let mut o = Outcome::new(4, &["automorphisms", "monoidal_autoequivalences", "pullback", "cstar_cohomology"]);
    let mut table = Table::new("autoequivalences of Vec^w(G)", &["G", "w", "brute force", "|Stab|", "|H^2|", "formula"]);
    let mut bad = 0;
    for name in SMALL_GROUPS {
        let g = make_group(name)?;
        let brute = monoidal_autoequivalences(&PointedCategory::vec(g.clone()))?.len();
        let aut = automorphisms(&g)?.len();
        let h2 = h2_order(&g)?;
        bad += usize::from(brute != aut * h2);
        table.push(vec![name.to_string(), "0".into(), brute.to_string(), aut.to_string(), h2.to_string(), (aut * h2).to_string()]);
    }
    for n in 1..=6usize {
        let g = FiniteGroup::cyclic(n)?;
        let auts = automorphisms(&g)?;
        let h2 = h2_order(&g)?;
        let classifier = CstarClassifier::new(&g, 3)?;
        let scalars = GModule::trivial(g.clone(), AbelianGroup::cyclic(n as i64));
        for k in 0..n as i64 {
            let omega = cyclic_three_cocycle(n, k);
            let key = classifier.key(&omega)?;
            let mut stab = 0;
            for phi in &auts {
                stab += usize::from(classifier.key(&pullback(&scalars, &omega, phi)?)? == key);
            }
            let brute = monoidal_autoequivalences(&PointedCategory::new(g.clone(), omega)?)?.len();
            bad += usize::from(brute != stab * h2);
            table.push(vec![format!("C{n}"), k.to_string(), brute.to_string(), stab.to_string(), h2.to_string(), (stab * h2).to_string()]);
        }
    }
    o.expect(bad == 0);
    o.claim("rows", table.rows.len(), "brute-force enumeration vs |Stab|·|H^2|");
    o.claim("mismatches", bad, "brute-force enumeration vs |Stab|·|H^2|");
    o.detail = format!("{} rows, {bad} mismatches", table.rows.len());
    o.table = Some(table);
    Ok(o)
}

fn h2_order(g: &FiniteGroup) -> Result<usize> {
    if g.order() == 1 {
        return Ok(1);
    }
    Ok(cstar_cohomology(g, 2, None)?.order())
}

/// Order of the image of `Hⁿ(G, Z/M) → Hⁿ(G, ℂ^×)`.
///
/// A `μ_M` cocycle is a `ℂ^×` coboundary iff it is `dw` with `w` over `μ_{MN}`, `N = |G|`, so the
/// image has order `|Zⁿ(Z/M)|·|Bⁿ(Z/N)| / |Bⁿ(Z/MN)|`.
pub fn mu_image_order(g: &FiniteGroup, degree: usize, m: i64) -> Result<BigUint> {
    let n = g.order() as i64;
    let triv = |k: i64| GModule::trivial(g.clone(), AbelianGroup::cyclic(k));
    let z = cohomology(&triv(m), degree)?.cocycle_order;
    let bn = cohomology(&triv(n), degree)?.coboundary_order;
    let bmn = cohomology(&triv(m * n), degree)?.coboundary_order;
    Ok(z * bn / bmn)
}

/// `|Hⁿ(G, ℂ^×)|` as the stable value of [`mu_image_order`] over `M = |G|^k`, with the `M` reached.
pub fn stabilized_order(g: &FiniteGroup, degree: usize) -> Result<(BigUint, i64)> {
    let n = g.order() as i64;
    if n == 1 {
        return Ok((big(1), 1));
    }
    let mut m = n;
    let mut last = mu_image_order(g, degree, m)?;
    loop {
        let next = mu_image_order(g, degree, m * n)?;
        if next == last {
            return Ok((last, m));
        }
        if m > 1 << 20 {
            return Err(Error::Unresolved("mu_M images did not stabilize".into()));
        }
        m *= n;
        last = next;
    }
}

fn check_cstar_paths() -> Result<Outcome> {
    let mut o = Outcome::new(5, &["cstar_cohomology", "cohomology"]);
    let mut table = Table::new("H^n(G,C^x)", &["G", "n", "Smith factors", "mu_M order", "stable at M"]);
    let mut cases: Vec<(FiniteGroup, usize, Vec<i64>)> = Vec::new();
    for n in 1..=6usize {
        let g = FiniteGroup::cyclic(n)?;
        cases.push((g.clone(), 2, vec![]));
        cases.push((g, 3, if n == 1 { vec![] } else { vec![n as i64] }));
    }
    cases.push((make_group("C3xC3")?, 2, vec![3]));
    let mut bad = 0;
    for (g, degree, expected) in cases {
        let factors = if g.order() == 1 { vec![] } else { cstar_cohomology(&g, degree, None)?.invariant_factors };
        let (order, m) = stabilized_order(&g, degree)?;
        let smith_order: usize = factors.iter().map(|&d| d as usize).product();
        bad += usize::from(factors != expected || order != big(smith_order));
        let shown = if factors.is_empty() { "0".to_string() } else { factors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join("+") };
        table.push(vec![g.name().to_string(), degree.to_string(), shown, order.to_string(), m.to_string()]);
    }
    o.expect(bad == 0);
    o.claim("groups checked", table.rows.len(), "integral Smith normal form vs mu_M stabilization");
    o.claim("mismatches", bad, "integral Smith normal form vs mu_M stabilization");
    o.detail = format!("{} cases, {bad} disagreements", table.rows.len());
    o.table = Some(table);
    Ok(o)
}

/// Positions of a normalized `degree`-cochain on a group of order `n` (no identity entry).
fn normalized_positions(n: usize, degree: usize) -> Vec<usize> {
    (0..n.pow(degree as u32)).filter(|&i| tuple_of(n, degree, i).iter().all(|&x| x != 0)).collect()
}

/// Every `μ_m`-valued coboundary `dw`, `w` a normalized cochain over `μ_big`, by exhaustion.
pub fn exhaustive_coboundaries(g: &FiniteGroup, degree: usize, m: i64, big_modulus: i64) -> HashSet<Vec<i64>> {
    let n = g.order();
    let positions = normalized_positions(n, degree - 1);
    let columns: Vec<Vec<i64>> = positions
        .iter()
        .map(|&p| {
            let mut w = Cochain::scalar_zero(degree - 1, n, big_modulus);
            w.values[p] = 1;
            scalar_differential(g, &w).values
        })
        .collect();
    let step = big_modulus / m;
    let mut out = HashSet::new();
    let mut digits = vec![0i64; positions.len()];
    let mut current = vec![0i64; n.pow(degree as u32)];
    loop {
        if current.iter().all(|&v| v % step == 0) {
            out.insert(current.iter().map(|&v| v / step).collect());
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return out;
            }
            digits[i] += 1;
            for (c, col) in current.iter_mut().zip(&columns[i]) {
                *c = (*c + col).rem_euclid(big_modulus);
            }
            if digits[i] < big_modulus {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn check_bockstein() -> Result<Outcome> {
    let mut o = Outcome::new(6, &["cstar_is_trivial", "differential"]);
    let mut table = Table::new("Bockstein vs exhaustive search", &["G", "n", "cocycles", "trivial", "agree"]);
    let mut bad = 0;
    for (name, m) in [("C2", 2i64), ("C3", 3)] {
        let g = make_group(name)?;
        let n = g.order();
        for degree in [2usize, 3] {
            let big_modulus = m * (n * n) as i64;
            let trivial = exhaustive_coboundaries(&g, degree, m, big_modulus);
            let tester = CstarTester::new(&g, degree, m, true)?;
            let positions = normalized_positions(n, degree);
            let (mut cocycles, mut trivial_count, mut agree) = (0, 0, 0);
            for code in 0..(m as usize).pow(positions.len() as u32) {
                let mut f = Cochain::scalar_zero(degree, n, m);
                let mut c = code;
                for &p in &positions {
                    f.values[p] = (c % m as usize) as i64;
                    c /= m as usize;
                }
                if !scalar_differential(&g, &f).is_zero() {
                    continue;
                }
                cocycles += 1;
                let verdict = tester.verdict(&f)?.trivial;
                let exhaustive = trivial.contains(&f.values);
                trivial_count += usize::from(exhaustive);
                agree += usize::from(verdict == exhaustive);
            }
            bad += cocycles - agree;
            table.push(vec![name.into(), degree.to_string(), cocycles.to_string(), trivial_count.to_string(), agree.to_string()]);
        }
    }
    let g = make_group("C2")?;
    let mut f = Cochain::scalar_zero(2, 2, 2);
    f.set(&[1, 1], &[1]);
    let v = cstar_is_trivial(&g, &f)?;
    let witness = v.witness.as_ref().map(|w| (w.modulus(), w.values.clone()));
    let exact = v.trivial && witness == Some((4, vec![0, 1]));
    o.claim("witness g(1) for f(1,1)=1/2", witness.as_ref().map_or("none".into(), |(m, w)| format!("{}/{m}", w[1])), "Bockstein solver");
    o.claim("disagreements", bad, "Bockstein vs exhaustive coboundary search over mu_{M|G|^2}");
    o.expect(bad == 0 && exact);
    o.detail = format!("{bad} disagreements over {} cases; witness g(1) = 1/4 {}", table.rows.len(), if exact { "exact" } else { "NOT reproduced" });
    o.table = Some(table);
    Ok(o)
}

/// Largest metric-group order in the fermion check.
pub const METRIC_MAX_ORDER: usize = 16;

fn check_fermion() -> Result<Outcome> {
    let mut o = Outcome::new(7, &["find_distinguished", "em_realize", "build_fz", "is_braided"]);
    let (mut forms, mut checks, mut bad, mut fermions, mut bosons) = (0, 0, 0, 0, 0);
    let (mut z4_fermion, mut toric_boson) = (false, false);
    for form in metric_groups(METRIC_MAX_ORDER)? {
        let rows = fermion_checks(&form)?;
        if rows.is_empty() {
            continue;
        }
        forms += 1;
        for c in rows {
            checks += 1;
            bad += usize::from(!c.coherent || c.braided != (c.kind == Kind::Fermion));
            match c.kind {
                Kind::Fermion => fermions += 1,
                Kind::Boson => bosons += 1,
                Kind::Neither => {}
            }
            let desc = form.group.descriptor();
            z4_fermion |= desc == "C4" && c.kind == Kind::Fermion;
            toric_boson |= desc == "C2xC2" && c.kind == Kind::Boson;
        }
    }
    o.claim("forms with a boson or fermion", forms, "block-sum corpus");
    o.claim("(form, f) pairs", checks, "coherence solver and braiding check");
    o.claim("violations", bad, "coherence solver and braiding check");
    o.expect(bad == 0 && z4_fermion && toric_boson);
    o.detail = format!("{forms} forms, {checks} pairs ({fermions} fermions, {bosons} bosons), {bad} violations");
    Ok(o)
}

/// Graded groups `E → E/A` with `A` abelian and normal, `|E|` at most `max_order`.
pub fn graded_corpus(max_order: usize) -> Result<Vec<(String, Vec<usize>)>> {
    let mut out = Vec::new();
    for name in SMALL_GROUPS.iter().copied().chain(["C9", "C3xC3", "C10", "D10", "C12", "C2xC6", "D12"]) {
        let g = make_group(name)?;
        if g.order() > max_order || g.order() == 1 {
            continue;
        }
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for x in g.elements() {
            for y in g.elements().filter(|&y| y >= x) {
                let mut sub = g.generated(&[x, y]);
                sub.sort_unstable();
                let abelian = sub.iter().all(|&a| sub.iter().all(|&b| g.mul(a, b) == g.mul(b, a)));
                if abelian && !seen.contains(&sub) && quotient(&g, &sub).is_ok() {
                    seen.push(sub);
                }
            }
        }
        seen.sort_by_key(|s| (s.len(), s.clone()));
        out.extend(seen.into_iter().map(|s| (name.to_string(), s)));
    }
    Ok(out)
}

struct Instance {
    frame: GradedFrame,
    module: GModule,
    autos: Vec<GroupHom>,
    /// Pullbacks of the cyclic generators `ω₁` along maps `E → Z/k`.
    pulled: Vec<Cochain>,
}

fn random_element(rng: &mut ChaCha8Rng, a: &AbelianGroup) -> Vec<i64> {
    a.factors().iter().map(|&d| rng.gen_range(0..d)).collect()
}

fn random_scalar(rng: &mut ChaCha8Rng, degree: usize, n: usize, m: i64) -> Cochain {
    let mut c = Cochain::scalar_zero(degree, n, m);
    for p in normalized_positions(n, degree) {
        c.values[p] = rng.gen_range(0..m);
    }
    c
}

/// A random 3-cocycle: a combination of pulled-back cyclic cocycles plus a random coboundary.
fn random_cocycle(rng: &mut ChaCha8Rng, inst: &Instance, n: usize, m: i64) -> Result<Cochain> {
    let e = inst.frame.total();
    let mut c = scalar_differential(e, &random_scalar(rng, 2, n, m));
    for w in &inst.pulled {
        c = c.add(&w.rescale(m)?.scale(rng.gen_range(0..m)))?;
    }
    Ok(c)
}

fn check_cocycle_identities() -> Result<Outcome> {
    let mut o = Outcome::new(8, &["differential", "automorphisms"]);
    let mut instances = Vec::new();
    for (name, kernel) in graded_corpus(8)? {
        let e = make_group(&name)?;
        let grading = quotient(&e, &kernel)?;
        let frame = GradedFrame::new(&grading)?;
        let module = frame.module()?;
        let autos: Vec<GroupHom> = automorphisms(&e)?.into_iter().filter(|p| frame.preserves_kernel(p)).collect();
        let mut pulled = Vec::new();
        for k in [2usize, 3, 4] {
            let w = cyclic_three_cocycle(k, 1);
            for chi in homomorphisms(&e, &FiniteGroup::cyclic(k)?).into_iter().filter(|h| !h.image.iter().all(|&x| x == 0)) {
                pulled.push(pullback_unchecked(&w, &chi));
            }
        }
        instances.push(Instance { frame, module, autos, pulled });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut t_bad, mut defect_bad) = (0, 0);
    for _ in 0..INSTANCES {
        let inst = &instances[rng.gen_range(0..instances.len())];
        let frame = &inst.frame;
        let (e, g) = (frame.total(), frame.group());
        let (n, ng) = (e.order(), g.order());
        let phi = &inst.autos[rng.gen_range(0..inst.autos.len())];
        let beta = frame.kernel_map(phi).ok_or_else(|| Error::Mismatch("automorphism leaves the kernel".into()))?;
        let bar = frame.induced(phi);
        let ell: Vec<Vec<i64>> = (0..ng).map(|_| random_element(&mut rng, &frame.abelian)).collect();
        let t = frame.t_cochain(&beta, &bar, &ell);
        let rho = Cochain::from_fn(1, ng, frame.abelian.factors(), |x| {
            if x[0] == 0 { frame.abelian.zero() } else { random_element(&mut rng, &frame.abelian) }
        });
        let shifted = frame.t_cochain(&beta, &bar, &frame.twist(&ell, &rho));
        let expected = t.add(&differential(&inst.module, &rho))?;
        t_bad += usize::from(!is_cocycle(&inst.module, &t) || shifted != expected);

        let m = crate::zmod::lcm((n * n) as i64, 12);
        let source = PointedCategory::new(e.clone(), random_cocycle(&mut rng, inst, n, m)?)?;
        let target = PointedCategory::new(e.clone(), random_cocycle(&mut rng, inst, n, m)?)?;
        let f = PointedFunctor { phi: phi.clone(), tau: random_scalar(&mut rng, 2, n, m) };
        let defect = f.coherence_defect(&source, &target);
        let lambda = random_scalar(&mut rng, 2, ng, m);
        let degree = |x: usize| frame.grading.degree(x);
        let inflated = Cochain::scalar_from_fn(2, n, m, |t| lambda.at(&[degree(t[0]), degree(t[1])]));
        let d_lambda = scalar_differential(g, &lambda);
        let inflated_d = Cochain::scalar_from_fn(3, n, m, |t| d_lambda.at(&[degree(t[0]), degree(t[1]), degree(t[2])]));
        let twisted = PointedFunctor { phi: phi.clone(), tau: f.tau.add(&inflated)? };
        let moved = twisted.coherence_defect(&source, &target);
        let ok = scalar_differential(e, &defect).is_zero()
            && scalar_differential(e, &inflated) == inflated_d
            && moved == defect.add(&inflated_d)?;
        defect_bad += usize::from(!ok);
    }
    o.claim("instances", INSTANCES, "seeded ChaCha8 over graded groups of order <= 8");
    o.claim("T violations", t_bad, "cocycle test and T(l + rho) = T(l) + d rho");
    o.claim("defect violations", defect_bad, "cocycle test and shift by inflated d lambda");
    o.expect(t_bad == 0 && defect_bad == 0);
    o.detail = format!("{INSTANCES} instances over {} graded groups, {t_bad} + {defect_bad} violations", instances.len());
    Ok(o)
}

/// Graded categories for the group-structure check.
pub fn structure_corpus() -> Result<Vec<GradedPointedCategory>> {
    let mut out = Vec::new();
    for (e, kernel) in [
        ("C4", vec![0, 2]),
        ("C2xC2", vec![0, 1]),
        ("D6", vec![0, 1, 2]),
        ("D8", vec![0, 2]),
        ("Q8", vec![0, 1]),
        ("C3xC3", vec![0, 3, 6]),
        ("C12", vec![0, 3, 6, 9]),
        ("D12", vec![0, 1, 2, 3, 4, 5]),
    ] {
        out.push(vec_graded(e, &kernel)?);
    }
    let c3 = FiniteGroup::cyclic(3)?;
    let twisted = PointedCategory::new(c3.clone(), cyclic_three_cocycle(3, 1))?;
    out.push(GradedPointedCategory::new(twisted, quotient(&c3, &[0])?)?);
    Ok(out)
}

fn check_group_structure() -> Result<Outcome> {
    let mut o = Outcome::new(9, &["compose", "classify_automorphism", "compose_quadruples", "enumerate_graded_equivalences"]);
    let mut table = Table::new("closure of equivalence classes", &["E", "|A|", "predicate", "classes", "violations"]);
    let (mut bad, mut pairs) = (0, 0);
    for c in structure_corpus()? {
        let ctx = QuadrupleContext::new(&c, &c)?;
        let space = &ctx.space;
        let eval = FlagEvaluator::new(&c, &c)?;
        let id = PointedFunctor::identity(&c.category);
        let flags = classify_automorphism(&c, &id)?;
        bad += usize::from(!(flags.graded && flags.trivial_on_trivial_piece && flags.extension_equivalence));
        let id_key = space.key(&id)?;
        let mut flagged = Vec::new();
        for class in space.classes() {
            let f = eval.flags(&class.functor)?;
            flagged.push((class, f));
        }
        let mut graded = Vec::new();
        for (p, label) in
            [(Predicate::Graded, "graded"), (Predicate::TrivialOnTrivialPiece, "ttp"), (Predicate::ExtensionEquivalence, "ext-eq")]
        {
            let classes: Vec<&FunctorClass> = flagged.iter().filter(|(_, f)| p.holds(f)).map(|(c, _)| c).collect();
            let keys: HashSet<&ClassKey> = classes.iter().map(|x| &x.key).collect();
            let mut v = usize::from(!keys.contains(&id_key));
            for a in &classes {
                let mut has_inverse = false;
                for b in &classes {
                    let k = space.key(&compose(&a.functor, &b.functor)?)?;
                    v += usize::from(!keys.contains(&k));
                    has_inverse |= k == id_key;
                }
                v += usize::from(!has_inverse);
            }
            bad += v;
            table.push(vec![
                c.category.name(),
                c.grading.kernel.len().to_string(),
                label.into(),
                classes.len().to_string(),
                v.to_string(),
            ]);
            if p == Predicate::Graded {
                graded = classes.into_iter().cloned().collect();
            }
        }
        let quads = graded.iter().map(|x| ctx.extract(&x.functor)).collect::<Result<Vec<_>>>()?;
        for (x, q) in graded.iter().zip(&quads) {
            bad += usize::from(space.key(&ctx.reconstruct(q)?)? != x.key);
        }
        for (a, qa) in graded.iter().zip(&quads) {
            for (b, qb) in graded.iter().zip(&quads) {
                let direct = ctx.extract(&compose(&a.functor, &b.functor)?)?;
                bad += usize::from(compose_quadruples(&ctx, &ctx, &ctx, qa, qb)? != direct);
                pairs += 1;
            }
        }
    }
    let d6 = vec_graded("D6", &[0, 1, 2])?;
    let listed = enumerate_graded_equivalences(&d6, &d6, Predicate::TrivialOnTrivialPiece)?.len();
    bad += usize::from(listed != 3);
    o.claim("class sets", table.rows.len(), "enumeration and composition");
    o.claim("quadruple pairs", pairs, "compose_quadruples vs extract(compose)");
    o.claim("violations", bad, "closure, identity, inverses, round trips");
    o.expect(bad == 0);
    o.detail = format!("{} class sets, {pairs} quadruple pairs, {bad} violations", table.rows.len());
    o.table = Some(table);
    Ok(o)
}

/// Largest `|A|·|G|` for the extension brute force.
pub const EXTENSION_CAP: usize = 64;

fn check_extensions() -> Result<Outcome> {
    let mut o = Outcome::new(10, &["extension_count", "ftwist_orbits"]);
    let action = GModule::from_descriptor(&make_group("C2")?, "neg:C3")?;
    let count = extension_count(&ExtensionProblem { action: action.clone(), o3: None, o4: None }, EXTENSION_CAP)?;
    let brute = brute_force_extensions(&action, EXTENSION_CAP)?;
    let orbits = ftwist_orbits(&brute.classes, None)?;
    o.claim("|H^2(G, Z/3 x dual)|", &count.h2_order, "twisted cohomology");
    o.claim("|H^3(G,C^x)|", count.h3_order, "integral Smith normal form");
    o.claim("extensions", &count.count, "torsor formula");
    o.claim("extensions", brute.classes.len(), "brute-force enumeration up to extension equivalence");
    o.claim("F-twist orbits", orbits.orbits.len(), "graded equivalences inducing the identity on G");
    o.expect(count.count == big(2) && brute.classes.len() == 2 && count.o3.vanishes && count.o4.vanishes);
    o.detail = format!(
        "torsor {} (o3: {}, o4: {}), brute force {}; 1/2 D10 out of scope",
        count.count,
        count.o3.how,
        count.o4.how,
        brute.classes.len()
    );
    o.notes.push(
        "out of scope: the count of twelve categories with D10 fusion rules falling to four up to \
         extension equivalence involves non-pointed trivial pieces and is not computed"
            .into(),
    );
    Ok(o)
}

