//! Cohomology of finite groups with coefficients in finite modules, via Smith normal form.

use num_bigint::BigUint;

use crate::abelian::AbelianGroup;
use crate::cochain::{differential, tuple_index, tuple_of, Cochain, GModule};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::zmod::{md, quotient_structure, solve_many, Smith, SmithOptions, ZMatrix};

/// Largest dense matrix (in entries) the Smith normal form routines will allocate.
pub const MEMORY_CAP: usize = 1 << 26;

/// Tuples spanning a cochain group: all of `G^n`, or only the non-identity ones.
#[derive(Clone, Debug)]
pub struct Basis {
    pub group_order: usize,
    pub degree: usize,
    pub normalized: bool,
    pub tuples: Vec<Vec<usize>>,
    position: Vec<usize>,
}

impl Basis {
    pub fn new(group_order: usize, degree: usize, normalized: bool) -> Self {
        let total = group_order.pow(degree as u32);
        let mut tuples = Vec::new();
        let mut position = vec![usize::MAX; total];
        for idx in 0..total {
            let t = tuple_of(group_order, degree, idx);
            if !normalized || !t.contains(&0) {
                position[idx] = tuples.len();
                tuples.push(t);
            }
        }
        Basis { group_order, degree, normalized, tuples, position }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn position(&self, tuple: &[usize]) -> Option<usize> {
        let p = self.position[tuple_index(self.group_order, tuple)];
        (p != usize::MAX).then_some(p)
    }
}

/// Coefficients of a bar complex: a finite module, or the integers with trivial action.
#[derive(Clone, Copy, Debug)]
pub enum Coefficients<'a> {
    Module(&'a GModule),
    Integers(&'a FiniteGroup),
}

impl Coefficients<'_> {
    fn group(&self) -> &FiniteGroup {
        match self {
            Coefficients::Module(m) => &m.group,
            Coefficients::Integers(g) => g,
        }
    }

    fn rank(&self) -> usize {
        match self {
            Coefficients::Module(m) => m.rank(),
            Coefficients::Integers(_) => 1,
        }
    }

    /// Coordinate orders; `0` stands for `Z`.
    fn orders(&self) -> Vec<i64> {
        match self {
            Coefficients::Module(m) => m.factors().to_vec(),
            Coefficients::Integers(_) => vec![0],
        }
    }

    fn action_entry(&self, g: usize, row: usize, col: usize) -> i64 {
        match self {
            Coefficients::Module(m) => m.action(g).matrix[row * m.rank() + col],
            Coefficients::Integers(_) => 1,
        }
    }
}

fn check_memory(rows: usize, cols: usize) -> Result<()> {
    let size = rows.saturating_mul(cols);
    if size > MEMORY_CAP {
        return Err(Error::CapExceeded {
            what: "dense coboundary matrix (reduce the degree or the group)".into(),
            size,
            cap: MEMORY_CAP,
        });
    }
    Ok(())
}

/// Matrix of `dⁿ : Cⁿ → Cⁿ⁺¹` over `Z/modulus`.
///
/// Rows for a coordinate of order `d` are scaled by `modulus/d`, which embeds
/// `⊕ Z/dᵢ` into `(Z/modulus)^k`; integral coordinates are reduced mod `modulus`.
pub fn coboundary_matrix(coeffs: Coefficients<'_>, degree: usize, normalized: bool, modulus: i64) -> Result<ZMatrix> {
    let g = coeffs.group();
    let n = g.order();
    let k = coeffs.rank();
    let orders = coeffs.orders();
    let src = Basis::new(n, degree, normalized);
    let dst = Basis::new(n, degree + 1, normalized);
    check_memory(dst.len() * k, src.len() * k)?;
    let mut a = ZMatrix::zeros(dst.len() * k, src.len() * k, modulus);
    let scale: Vec<i64> = orders.iter().map(|&d| if d == 0 { 1 } else { modulus / d }).collect();
    let mut inner = Vec::with_capacity(degree);
    for (row, t) in dst.tuples.iter().enumerate() {
        let mut add = |tuple: &[usize], sign: i64, twist: Option<usize>| {
            let Some(col) = src.position(tuple) else { return };
            for r in 0..k {
                for c in 0..k {
                    let v = match twist {
                        Some(h) => coeffs.action_entry(h, r, c),
                        None => i64::from(r == c),
                    };
                    if v != 0 {
                        a.add_to(row * k + r, col * k + c, sign * v * scale[r]);
                    }
                }
            }
        };
        add(&t[1..], 1, Some(t[0]));
        for i in 0..degree {
            inner.clear();
            inner.extend_from_slice(&t[..i]);
            inner.push(g.mul(t[i], t[i + 1]));
            inner.extend_from_slice(&t[i + 2..]);
            add(&inner, if i % 2 == 0 { -1 } else { 1 }, None);
        }
        add(&t[..degree], if degree % 2 == 0 { -1 } else { 1 }, None);
    }
    Ok(a)
}

/// Flattens a cochain restricted to a basis into exponent coordinates.
pub fn to_coords(f: &Cochain, basis: &Basis) -> Vec<i64> {
    basis.tuples.iter().flat_map(|t| f.get(t).to_vec()).collect()
}

/// Expands basis coordinates into a full cochain (zero off the basis).
pub fn from_coords(coords: &[i64], basis: &Basis, factors: &[i64]) -> Cochain {
    let k = factors.len();
    let mut f = Cochain::zero(basis.degree, basis.group_order, factors);
    for (p, t) in basis.tuples.iter().enumerate() {
        f.set(t, &coords[p * k..(p + 1) * k]);
    }
    f
}

/// Decides membership in `Bⁿ` and produces witnesses.
#[derive(Clone, Debug)]
pub struct CoboundarySolver {
    module: GModule,
    degree: usize,
    basis: Basis,
    lower: Basis,
    smith: Option<Smith>,
}

impl CoboundarySolver {
    pub fn new(module: &GModule, degree: usize) -> Result<Self> {
        let n = module.group.order();
        let basis = Basis::new(n, degree, true);
        let lower = Basis::new(n, degree.saturating_sub(1), true);
        let smith = if degree == 0 {
            None
        } else {
            let a = coboundary_matrix(Coefficients::Module(module), degree - 1, true, module.coeffs.exponent())?;
            Some(Smith::compute(&a, SmithOptions { col_transform: true, log: true, ..Default::default() }))
        };
        Ok(CoboundarySolver { module: module.clone(), degree, basis, lower, smith })
    }

    /// A cochain `w` with `dw = b`, if `b` is a coboundary.
    pub fn witness(&self, b: &Cochain) -> Result<Option<Cochain>> {
        let m = &self.module;
        if b.degree != self.degree || b.factors != m.factors() {
            return Err(Error::Mismatch("cochain does not match the solver".into()));
        }
        if let Some(t) = b.normalization_violation() {
            return Err(Error::NotNormalized(t));
        }
        let Some(smith) = &self.smith else {
            return Ok(b.is_zero().then(|| b.clone()));
        };
        let e = m.coeffs.exponent();
        let k = m.rank();
        let rhs: Vec<i64> =
            to_coords(b, &self.basis).iter().enumerate().map(|(i, &v)| v * (e / m.factors()[i % k])).collect();
        let Some(x) = smith.solve_transformed(&smith.apply_p(&rhs)) else {
            return Ok(None);
        };
        let w = from_coords(&x, &self.lower, m.factors());
        debug_assert_eq!(&differential(m, &w), b);
        Ok(Some(w))
    }

    pub fn is_coboundary(&self, b: &Cochain) -> Result<bool> {
        Ok(self.witness(b)?.is_some())
    }
}

/// `Zⁿ`, `Bⁿ` and `Hⁿ` of a module in the normalized bar complex.
#[derive(Clone, Debug)]
pub struct CohomologyResult {
    pub degree: usize,
    pub cocycle_order: BigUint,
    pub coboundary_order: BigUint,
    pub order: BigUint,
    pub invariant_factors: Vec<i64>,
    pub generators: Vec<Cochain>,
    pub solver: CoboundarySolver,
}

fn cochain_group_order(orders: &[i64], basis: &Basis) -> BigUint {
    let per: BigUint = orders.iter().fold(BigUint::from(1u32), |acc, &d| acc * BigUint::from(d as u64));
    per.pow(basis.len() as u32)
}

pub fn cohomology(module: &GModule, degree: usize) -> Result<CohomologyResult> {
    let n = module.group.order();
    let e = module.coeffs.exponent();
    let factors = module.factors();
    let k = module.rank();
    let basis = Basis::new(n, degree, true);
    let upper = coboundary_matrix(Coefficients::Module(module), degree, true, e)?;
    let upper_smith = Smith::compute(&upper, SmithOptions { col_transform: true, ..Default::default() });
    let cocycle_order = cochain_group_order(factors, &basis) / upper_smith.image_order();
    let lower = if degree > 0 {
        Some(coboundary_matrix(Coefficients::Module(module), degree - 1, true, e)?)
    } else {
        None
    };
    let coboundary_order = match &lower {
        Some(a) => Smith::compute(a, SmithOptions::default()).image_order(),
        None => BigUint::from(1u32),
    };
    let order = &cocycle_order / &coboundary_order;

    // Zⁿ ≅ ⊕ Z/gᵢ on the kernel generators zᵢ = (e/gᵢ)·Q eᵢ; relations are Bⁿ
    // together with the lifts of zero (dᵢ in a coordinate of order dᵢ < e).
    let q = upper_smith.q.as_ref().expect("column transform");
    let dim = basis.len() * k;
    let kernel: Vec<(usize, i64)> =
        (0..dim).map(|i| (i, upper_smith.ideal(i))).filter(|&(_, g)| g > 1).collect();
    let mut relations: Vec<Vec<i64>> = Vec::new();
    if let Some(a) = &lower {
        for j in 0..a.cols {
            // undo the row scaling: a column of dⁿ⁻¹ in exponent coordinates
            relations.push((0..dim).map(|i| a.get(i, j) / (e / factors[i % k])).collect());
        }
    }
    for i in 0..dim {
        if factors[i % k] < e {
            let mut v = vec![0; dim];
            v[i] = factors[i % k];
            relations.push(v);
        }
    }
    let mut generators = Vec::new();
    let mut invariant_factors = Vec::new();
    if !kernel.is_empty() {
        let s = kernel.len();
        let mut columns: Vec<Vec<i64>> = kernel
            .iter()
            .enumerate()
            .map(|(p, &(_, g))| {
                let mut v = vec![0; s];
                v[p] = g;
                v
            })
            .collect();
        if !relations.is_empty() {
            let rhs = ZMatrix::from_columns(dim, e, &relations);
            for y in solve_many(q, &rhs) {
                let y = y.expect("Q is invertible");
                columns.push(kernel.iter().map(|&(i, g)| md(y[i], e) / (e / g)).collect());
            }
        }
        let rel = ZMatrix::from_columns(s, e, &columns);
        for factor in quotient_structure(&rel) {
            let mut coords = vec![0i64; dim];
            for (p, &(i, g)) in kernel.iter().enumerate() {
                let c = factor.generator[p] * (e / g);
                for (r, slot) in coords.iter_mut().enumerate() {
                    *slot = md(*slot + c * q.get(r, i), e);
                }
            }
            let coords: Vec<i64> = coords.iter().enumerate().map(|(i, &v)| md(v, factors[i % k])).collect();
            invariant_factors.push(factor.order);
            generators.push(from_coords(&coords, &basis, factors));
        }
    }
    let solver = CoboundarySolver::new(module, degree)?;
    Ok(CohomologyResult {
        degree,
        cocycle_order,
        coboundary_order,
        order,
        invariant_factors,
        generators,
        solver,
    })
}

/// A homomorphism `Λ → Λ₀` given by an integer matrix on exponent vectors.
#[derive(Clone, Debug)]
pub struct Support {
    pub target: AbelianGroup,
    /// Row-major, `target.rank() × source rank`.
    pub matrix: Vec<i64>,
}

impl Support {
    pub fn new(source: &AbelianGroup, target: AbelianGroup, matrix: Vec<i64>) -> Result<Self> {
        let s = Support { target, matrix };
        if s.matrix.len() != s.target.rank() * source.rank() {
            return Err(Error::NotHomomorphism("support matrix has the wrong shape".into()));
        }
        for (j, &d) in source.factors().iter().enumerate() {
            let raw: Vec<i64> = (0..s.target.rank()).map(|r| s.matrix[r * source.rank() + j] * d).collect();
            if !s.target.is_zero(&raw) {
                return Err(Error::NotHomomorphism(format!("generator {j} of order {d} maps to an element of larger order")));
            }
        }
        Ok(s)
    }

    pub fn zero(_source: &AbelianGroup) -> Self {
        Support { target: AbelianGroup::trivial(), matrix: Vec::new() }
    }

    /// Sum of coordinates, into `Z/d` for the smallest factor `d`.
    pub fn coordinate_sum(source: &AbelianGroup) -> Result<Self> {
        let d = source.factors().first().copied().unwrap_or(1);
        Self::new(source, AbelianGroup::cyclic(d), vec![1; source.rank()])
    }

    /// Projection onto the first `r` coordinates.
    pub fn projection(source: &AbelianGroup, r: usize) -> Result<Self> {
        let k = source.rank();
        let target = AbelianGroup::new(source.factors()[..r].to_vec())?;
        let mut m = vec![0; r * k];
        for i in 0..r {
            m[i * k + i] = 1;
        }
        Self::new(source, target, m)
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let k = x.len();
        let y: Vec<i64> =
            (0..self.target.rank()).map(|r| (0..k).map(|j| self.matrix[r * k + j] * x[j]).sum()).collect();
        self.target.reduce(&y)
    }
}

/// `{ρ ∈ Z¹ : support(ρ(g)) = 0 for all g}`.
#[derive(Clone, Debug)]
pub struct D1Subgroup {
    pub order: BigUint,
    pub generators: Vec<Cochain>,
}

pub fn d1_subgroup(module: &GModule, support: &Support) -> Result<D1Subgroup> {
    let n = module.group.order();
    let factors = module.factors();
    let k = module.rank();
    let t = &support.target;
    let e = crate::zmod::lcm(module.coeffs.exponent(), t.exponent());
    let basis = Basis::new(n, 1, true);
    let d1 = coboundary_matrix(Coefficients::Module(module), 1, true, module.coeffs.exponent())?;
    let rows = d1.rows + basis.len() * t.rank();
    let mut a = ZMatrix::zeros(rows, d1.cols, e);
    let lift = e / module.coeffs.exponent();
    for i in 0..d1.rows {
        for j in 0..d1.cols {
            a.set(i, j, d1.get(i, j) * lift);
        }
    }
    for p in 0..basis.len() {
        for r in 0..t.rank() {
            let row = d1.rows + p * t.rank() + r;
            for c in 0..k {
                a.set(row, p * k + c, support.matrix[r * k + c] * (e / t.factors()[r]));
            }
        }
    }
    let smith = Smith::compute(&a, SmithOptions { col_transform: true, ..Default::default() });
    let order = cochain_group_order(factors, &basis) / smith.image_order();
    let mut generators: Vec<Cochain> = Vec::new();
    for v in smith.kernel_generators() {
        let coords: Vec<i64> = v.iter().enumerate().map(|(i, &x)| md(x, factors[i % k])).collect();
        if coords.iter().any(|&x| x != 0) {
            let f = from_coords(&coords, &basis, factors);
            if !generators.contains(&f) {
                generators.push(f);
            }
        }
    }
    Ok(D1Subgroup { order, generators })
}

/// `|Z¹|` of the module (all 1-cocycles are normalized).
pub fn z1_order(module: &GModule) -> Result<BigUint> {
    Ok(cohomology(module, 1)?.cocycle_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::is_cocycle;
    use crate::group::make_group;

    fn neg_example() -> GModule {
        GModule::from_descriptor(&make_group("C2").unwrap(), "neg:C3xC3").unwrap()
    }

    #[test]
    fn worked_example_orders() {
        let m = neg_example();
        let h = cohomology(&m, 1).unwrap();
        assert_eq!(h.cocycle_order, BigUint::from(9u32));
        assert_eq!(h.coboundary_order, BigUint::from(9u32));
        assert_eq!(h.order, BigUint::from(1u32));
        let d1 = d1_subgroup(&m, &Support::coordinate_sum(&m.coeffs).unwrap()).unwrap();
        assert_eq!(d1.order, BigUint::from(3u32));
        let all = d1_subgroup(&m, &Support::zero(&m.coeffs)).unwrap();
        assert_eq!(all.order, BigUint::from(9u32));
    }

    #[test]
    fn injective_support_kills_d1() {
        let g = make_group("C3").unwrap();
        let m = GModule::trivial(g, AbelianGroup::cyclic(3));
        assert_eq!(cohomology(&m, 1).unwrap().cocycle_order, BigUint::from(3u32));
        let d1 = d1_subgroup(&m, &Support::projection(&m.coeffs, 1).unwrap()).unwrap();
        assert_eq!(d1.order, BigUint::from(1u32));
    }

    fn enumerate_orders(m: &GModule, degree: usize) -> (usize, usize) {
        // brute force over normalized cochains
        let n = m.group.order();
        let basis = Basis::new(n, degree, true);
        let lower = Basis::new(n, degree - 1, true);
        let per = m.coeffs.order();
        let all = |b: &Basis| -> Vec<Cochain> {
            let count = per.pow(b.len() as u32);
            (0..count)
                .map(|mut idx| {
                    let coords: Vec<i64> = (0..b.len())
                        .flat_map(|_| {
                            let x = m.coeffs.element(idx % per);
                            idx /= per;
                            x
                        })
                        .collect();
                    from_coords(&coords, b, m.factors())
                })
                .collect()
        };
        let z = all(&basis).into_iter().filter(|f| is_cocycle(m, f)).count();
        let mut b: Vec<Cochain> = all(&lower).iter().map(|w| differential(m, w)).collect();
        b.sort_by(|x, y| x.values.cmp(&y.values));
        b.dedup();
        (z, b.len())
    }

    #[test]
    fn orders_match_enumeration() {
        for (g, desc, deg) in
            [("C2", "triv:C2", 2), ("C3", "triv:C3", 2), ("C2", "neg:C4", 2), ("C2xC2", "triv:C2", 1), ("C4", "neg:C2xC2", 1), ("C2", "triv:C4", 3)]
        {
            let m = GModule::from_descriptor(&make_group(g).unwrap(), desc).unwrap();
            let h = cohomology(&m, deg).unwrap();
            let (z, b) = enumerate_orders(&m, deg);
            assert_eq!(h.cocycle_order, BigUint::from(z), "{g} {desc} {deg}");
            assert_eq!(h.coboundary_order, BigUint::from(b), "{g} {desc} {deg}");
            assert_eq!(h.invariant_factors.iter().product::<i64>() as usize, z / b);
            for gen in &h.generators {
                assert!(is_cocycle(&m, gen));
                assert!(!h.solver.is_coboundary(gen).unwrap());
            }
        }
    }

    #[test]
    fn trivial_group_has_no_cohomology() {
        let m = GModule::trivial(FiniteGroup::trivial(), AbelianGroup::cyclic(5));
        for n in 1..5 {
            assert_eq!(cohomology(&m, n).unwrap().order, BigUint::from(1u32));
        }
    }

    #[test]
    fn witness_round_trip() {
        let g = make_group("C3").unwrap();
        let m = GModule::trivial(g, AbelianGroup::cyclic(9));
        let s = CoboundarySolver::new(&m, 2).unwrap();
        let w = Cochain::scalar_from_fn(1, 3, 9, |t| [0, 4, 7][t[0]]);
        let b = differential(&m, &w);
        let found = s.witness(&b).unwrap().unwrap();
        assert_eq!(differential(&m, &found), b);
    }

    #[test]
    fn cyclic_groups_with_cyclic_coefficients() {
        // H²(Z/n, Z/m) = Z/gcd(n, m)
        for (n, mm) in [(2, 4), (4, 6), (3, 9), (6, 4)] {
            let m = GModule::trivial(FiniteGroup::cyclic(n).unwrap(), AbelianGroup::cyclic(mm));
            let h = cohomology(&m, 2).unwrap();
            assert_eq!(h.invariant_factors, vec![crate::zmod::gcd(n as i64, mm)]);
        }
    }
}
