//! `ℂ^×`-valued cohomology through the Bockstein `Hⁿ(G, ℂ^×) ≅ Hⁿ⁺¹(G, Z)`.
//!
//! A `ℂ^×` cochain is stored as exponents in `Z/M` (the value `x` stands for
//! `exp(2πi x/M)`). Triviality is always decided integrally: lift to `Z`,
//! differentiate, divide by `M`, and test the resulting integral cocycle
//! against the image of the integral differential.

use crate::abelian::AbelianGroup;
use crate::cochain::{scalar_differential, Cochain, GModule};
use crate::cohomology::{coboundary_matrix, from_coords, to_coords, Basis, Coefficients};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::zmod::{gcd, lcm, md, quotient_structure, solve_many, Smith, SmithOptions, ZMatrix};

/// Kernel spans up to this size are searched for a canonical witness.
const CANONICAL_SPAN: usize = 4096;

/// Modulus large enough to read off the exact integral differential.
const EXACT: i64 = 1 << 30;

fn trivial_module(group: &FiniteGroup, modulus: i64) -> GModule {
    GModule::trivial(group.clone(), AbelianGroup::cyclic(modulus))
}

/// Modulus used for integral computations: `|G|²` annihilates every class involved.
fn integral_modulus(group: &FiniteGroup) -> i64 {
    let n = group.order() as i64;
    (n * n).max(2)
}

/// The integral cocycle `d(lift f)/M`, reduced mod `modulus`.
pub fn bockstein(group: &FiniteGroup, f: &Cochain, modulus: i64) -> Cochain {
    let m = f.modulus();
    let big = m * modulus;
    let lifted = Cochain { factors: vec![big], ..f.clone() };
    let d = scalar_differential(group, &lifted);
    Cochain {
        degree: d.degree,
        group_order: d.group_order,
        factors: vec![modulus],
        values: d.values.iter().map(|&v| {
            debug_assert_eq!(v % m, 0, "lift of a non-cocycle");
            v / m
        }).collect(),
    }
}

/// Classifies degree-`n` `ℂ^×` cocycles by coordinates in `Hⁿ⁺¹(G, Z)`.
///
/// For a torsion row `i` of the Smith form `P·D·Q = S` of the integral
/// differential, the coordinate of `f = y/M` is `(Pᵢ·D·y)/M mod gᵢ`; the row
/// vectors `Pᵢ·D` are precomputed exactly.
#[derive(Clone, Debug)]
pub struct CstarClassifier {
    pub group: FiniteGroup,
    pub degree: usize,
    normalized: bool,
    lower: Basis,
    functionals: Vec<(Vec<i64>, i64)>,
}

impl CstarClassifier {
    /// Classifier for normalized cocycles.
    pub fn new(group: &FiniteGroup, degree: usize) -> Result<Self> {
        Self::with_normalization(group, degree, true)
    }

    pub fn with_normalization(group: &FiniteGroup, degree: usize, normalized: bool) -> Result<Self> {
        let modulus = integral_modulus(group);
        let a = coboundary_matrix(Coefficients::Integers(group), degree, normalized, modulus)?;
        let smith = Smith::compute(&a, SmithOptions { log: true, ..Default::default() });
        let exact = coboundary_matrix(Coefficients::Integers(group), degree, normalized, EXACT)?;
        let signed = |v: i64| if v > EXACT / 2 { v - EXACT } else { v };
        let functionals = (0..a.rows)
            .map(|i| (i, smith.ideal(i)))
            .filter(|&(_, g)| g > 1 && g < modulus)
            .map(|(i, g)| {
                let p = smith.p_row(i);
                let mut w = vec![0i64; a.cols];
                for (r, &pr) in p.iter().enumerate().filter(|(_, &pr)| pr != 0) {
                    for (c, slot) in w.iter_mut().enumerate() {
                        *slot += pr * signed(exact.get(r, c));
                    }
                }
                (w, g)
            })
            .collect();
        let lower = Basis::new(group.order(), degree, normalized);
        Ok(CstarClassifier { group: group.clone(), degree, normalized, lower, functionals })
    }

    /// Orders of the cyclic factors of `Hⁿ(G, ℂ^×)` in this presentation.
    pub fn factor_orders(&self) -> Vec<i64> {
        self.functionals.iter().map(|&(_, g)| g).collect()
    }

    pub fn class_count(&self) -> usize {
        self.functionals.iter().map(|&(_, g)| g as usize).product()
    }

    fn check(&self, f: &Cochain) -> Result<()> {
        if f.degree != self.degree || f.group_order != self.group.order() || f.rank() != 1 {
            return Err(Error::Mismatch("cochain does not match the classifier".into()));
        }
        if self.normalized {
            if let Some(t) = f.normalization_violation() {
                return Err(Error::NotNormalized(t));
            }
        }
        let df = scalar_differential(&self.group, f);
        if let Some(i) = (0..df.len()).find(|&i| df.values[i] != 0) {
            return Err(Error::NotCocycle(crate::cochain::tuple_of(df.group_order, df.degree, i)));
        }
        Ok(())
    }

    /// Class coordinates of a cocycle; equal keys exactly when cohomologous.
    pub fn key(&self, f: &Cochain) -> Result<Vec<i64>> {
        self.check(f)?;
        Ok(self.key_unchecked(f))
    }

    /// [`key`](Self::key) without the shape and cocycle checks.
    pub fn key_unchecked(&self, f: &Cochain) -> Vec<i64> {
        let m = f.modulus() as i128;
        let y = to_coords(f, &self.lower);
        self.functionals
            .iter()
            .map(|(w, g)| {
                let dot: i128 = w.iter().zip(&y).map(|(&a, &b)| a as i128 * b as i128).sum();
                debug_assert_eq!(dot % m, 0);
                (dot / m).rem_euclid(*g as i128) as i64
            })
            .collect()
    }

    pub fn is_trivial(&self, f: &Cochain) -> Result<bool> {
        Ok(self.key(f)?.iter().all(|&v| v == 0))
    }
}

/// Solves `dw = b` over `Z/K` with trivial action, reusing one Smith form.
#[derive(Clone, Debug)]
pub struct ScalarSolver {
    pub degree: usize,
    pub modulus: i64,
    basis: Basis,
    lower: Basis,
    smith: Smith,
    kernel: Vec<(Vec<i64>, i64)>,
}

impl ScalarSolver {
    /// Solver for right-hand sides of degree `degree ≥ 1`.
    pub fn new(group: &FiniteGroup, degree: usize, modulus: i64, normalized: bool) -> Result<Self> {
        assert!(degree >= 1, "coboundaries start in degree 1");
        let module = trivial_module(group, modulus);
        let a = coboundary_matrix(Coefficients::Module(&module), degree - 1, normalized, modulus)?;
        let smith = Smith::compute(&a, SmithOptions { col_transform: true, log: true, ..Default::default() });
        let kernel = smith
            .kernel_generators()
            .into_iter()
            .filter(|v| v.iter().any(|&c| c != 0))
            .map(|v| {
                let ord = v.iter().filter(|&&c| c != 0).map(|&c| modulus / gcd(c, modulus)).fold(1, lcm);
                (v, ord)
            })
            .collect();
        Ok(ScalarSolver {
            degree,
            modulus,
            basis: Basis::new(group.order(), degree, normalized),
            lower: Basis::new(group.order(), degree - 1, normalized),
            smith,
            kernel,
        })
    }

    /// The lexicographically smallest `w` with `dw = b` when the solution set is
    /// small enough to scan, otherwise some solution.
    pub fn solve(&self, b: &Cochain) -> Option<Cochain> {
        let k = self.modulus;
        let x = self.smith.solve_transformed(&self.smith.apply_p(&to_coords(b, &self.basis)))?;
        let span = self
            .kernel
            .iter()
            .try_fold(1usize, |acc, (_, o)| acc.checked_mul(*o as usize))
            .unwrap_or(usize::MAX);
        let mut best = x.clone();
        if span <= CANONICAL_SPAN {
            let mut digits = vec![0i64; self.kernel.len()];
            loop {
                let mut p = 0;
                while p < digits.len() {
                    digits[p] += 1;
                    if digits[p] < self.kernel[p].1 {
                        break;
                    }
                    digits[p] = 0;
                    p += 1;
                }
                if p == digits.len() {
                    break;
                }
                let cand: Vec<i64> = (0..x.len())
                    .map(|i| md(x[i] + self.kernel.iter().zip(&digits).map(|((v, _), &d)| v[i] * d).sum::<i64>(), k))
                    .collect();
                if cand < best {
                    best = cand;
                }
            }
        }
        Some(from_coords(&best, &self.lower, &[k]))
    }
}

/// Outcome of a `ℂ^×` triviality test.
#[derive(Clone, Debug)]
pub struct CstarVerdict {
    pub trivial: bool,
    /// `w` over `Z/(M|G|)` with `dw = f` (as roots of unity), when trivial.
    pub witness: Option<Cochain>,
}

/// Reusable triviality test for degree-`n` cocycles over `Z/M`.
#[derive(Clone, Debug)]
pub struct CstarTester {
    pub classifier: CstarClassifier,
    solver: Option<ScalarSolver>,
    modulus: i64,
}

impl CstarTester {
    pub fn new(group: &FiniteGroup, degree: usize, modulus: i64, normalized: bool) -> Result<Self> {
        let classifier = CstarClassifier::with_normalization(group, degree, normalized)?;
        let solver = if degree == 0 {
            None
        } else {
            Some(ScalarSolver::new(group, degree, modulus * group.order() as i64, normalized)?)
        };
        Ok(CstarTester { classifier, solver, modulus })
    }

    pub fn verdict(&self, f: &Cochain) -> Result<CstarVerdict> {
        if f.modulus() != self.modulus {
            return Err(Error::Mismatch(format!("expected modulus {}, got {}", self.modulus, f.modulus())));
        }
        let Some(solver) = &self.solver else {
            return Ok(CstarVerdict { trivial: f.is_zero(), witness: None });
        };
        if !self.classifier.is_trivial(f)? {
            return Ok(CstarVerdict { trivial: false, witness: None });
        }
        // |G| kills Hⁿ(G, Z), so dw = |G|·f is solvable over Z/(M|G|)
        let target = f.rescale(solver.modulus)?;
        let w = solver
            .solve(&target)
            .ok_or_else(|| Error::Unresolved("Bockstein trivial but no witness over μ_{M|G|}".into()))?;
        if scalar_differential(&self.classifier.group, &w) != target {
            return Err(Error::Unresolved("witness failed re-differentiation".into()));
        }
        Ok(CstarVerdict { trivial: true, witness: Some(w) })
    }
}

/// Decides whether `f` (over `Z/M`) is a coboundary with values in `ℂ^×`.
pub fn cstar_is_trivial(group: &FiniteGroup, f: &Cochain) -> Result<CstarVerdict> {
    CstarTester::new(group, f.degree, f.modulus(), f.is_normalized())?.verdict(f)
}

/// `Hⁿ(G, ℂ^×)` with explicit generator cocycles.
#[derive(Clone, Debug)]
pub struct CstarCohomology {
    pub degree: usize,
    pub invariant_factors: Vec<i64>,
    /// Generators over `Z/modulus`.
    pub generators: Vec<Cochain>,
    pub modulus: i64,
}

impl CstarCohomology {
    pub fn order(&self) -> usize {
        self.invariant_factors.iter().map(|&d| d as usize).product()
    }
}

/// Computes `Hⁿ(G, ℂ^×)` as `Hⁿ⁺¹(G, Z)`; generators are recovered by
/// inverting the Bockstein and stored over `μ_M`, `M = |G|²` unless given.
pub fn cstar_cohomology(group: &FiniteGroup, degree: usize, modulus: Option<i64>) -> Result<CstarCohomology> {
    if degree == 0 {
        return Err(Error::Mismatch("H⁰(G, ℂ^×) = ℂ^× is not finite".into()));
    }
    let big = integral_modulus(group);
    let out_mod = modulus.unwrap_or(big);
    let a = coboundary_matrix(Coefficients::Integers(group), degree, true, big)?;
    let factors: Vec<_> = quotient_structure(&a).into_iter().filter(|f| f.order < big).collect();
    let lower = Basis::new(group.order(), degree, true);
    let mut generators = Vec::new();
    if !factors.is_empty() {
        let rhs: Vec<Vec<i64>> = factors.iter().map(|f| f.generator.iter().map(|&v| md(v * f.order, big)).collect()).collect();
        let sols = solve_many(&a, &ZMatrix::from_columns(a.rows, big, &rhs));
        for (f, y) in factors.iter().zip(sols) {
            let y = y.ok_or_else(|| Error::Unresolved("torsion class without a rational preimage".into()))?;
            if out_mod % f.order != 0 {
                return Err(Error::Mismatch(format!("modulus {out_mod} cannot represent a class of order {}", f.order)));
            }
            let coords: Vec<i64> = y.iter().map(|&v| md(v, f.order)).collect();
            generators.push(from_coords(&coords, &lower, &[f.order]).rescale(out_mod)?);
        }
    }
    let result = CstarCohomology {
        degree,
        invariant_factors: factors.iter().map(|f| f.order).collect(),
        generators,
        modulus: out_mod,
    };
    let classifier = CstarClassifier::new(group, degree)?;
    for (gen, &ord) in result.generators.iter().zip(&result.invariant_factors) {
        if classifier.is_trivial(gen)? || !classifier.is_trivial(&gen.scale(ord))? {
            return Err(Error::Unresolved("recovered generator has the wrong order".into()));
        }
    }
    Ok(result)
}

/// Standard representative of `k ∈ Z/n ≅ H³(Z/n, ℂ^×)` over `μ_n`:
/// `ω(a, b, c) = k·a·⌊(b + c)/n⌋`.
pub fn cyclic_three_cocycle(n: usize, k: i64) -> Cochain {
    Cochain::scalar_from_fn(3, n, n as i64, |t| k * t[0] as i64 * ((t[1] + t[2]) / n) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;

    #[test]
    fn half_on_c2_is_trivial_with_quarter_witness() {
        let g = make_group("C2").unwrap();
        let mut f = Cochain::scalar_zero(2, 2, 2);
        f.set(&[1, 1], &[1]);
        let v = cstar_is_trivial(&g, &f).unwrap();
        assert!(v.trivial);
        let w = v.witness.unwrap();
        assert_eq!(w.modulus(), 4);
        assert_eq!(w.at(&[1]), 1);
    }

    #[test]
    fn nontrivial_three_class_on_c2() {
        let g = make_group("C2").unwrap();
        let mut f = Cochain::scalar_zero(3, 2, 2);
        f.set(&[1, 1, 1], &[1]);
        assert!(!cstar_is_trivial(&g, &f).unwrap().trivial);
    }

    #[test]
    fn cyclic_groups() {
        for n in 1..=6 {
            let g = FiniteGroup::cyclic(n).unwrap();
            assert_eq!(cstar_cohomology(&g, 2, None).unwrap().order(), 1);
            let h3 = cstar_cohomology(&g, 3, None).unwrap();
            assert_eq!(h3.order(), n);
            let c = CstarClassifier::new(&g, 3).unwrap();
            let w = cyclic_three_cocycle(n, 1);
            for k in 1..n as i64 {
                assert!(!c.is_trivial(&w.scale(k)).unwrap());
            }
        }
    }

    #[test]
    fn schur_multiplier_of_c3xc3() {
        let g = make_group("C3xC3").unwrap();
        let h = cstar_cohomology(&g, 2, None).unwrap();
        assert_eq!(h.invariant_factors, vec![3]);
    }

    #[test]
    fn rejects_non_cocycles() {
        let g = make_group("C3").unwrap();
        let mut f = Cochain::scalar_zero(2, 3, 3);
        f.set(&[1, 2], &[1]);
        assert!(matches!(cstar_is_trivial(&g, &f), Err(Error::NotCocycle(_))));
    }
}
