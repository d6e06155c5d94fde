//! Quadratic forms on finite abelian groups, their braided pointed realizations,
//! and the auto-equivalence `F_z` attached to a boson or fermion.

use std::fmt::Write as _;
use std::path::Path;

use crate::abelian::{AbelianGroup, Endo};
use crate::cochain::{pullback_unchecked, scalar_differential, Cochain};
use crate::error::{Error, Result};
use crate::group::{isomorphisms, FiniteGroup, GroupHom};
use crate::pointed::{PointedCategory, PointedFunctor};
use crate::zmod::{gcd, lcm, md};

/// `q : A → Z/M` with `q(−x) = q(x)` and bilinear polarization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    pub group: AbelianGroup,
    pub modulus: i64,
    values: Vec<i64>,
}

impl QuadraticForm {
    pub fn new(group: AbelianGroup, modulus: i64, values: Vec<i64>) -> Result<Self> {
        if values.len() != group.order() || modulus < 1 {
            return Err(Error::Mismatch("quadratic form table has the wrong size".into()));
        }
        let q = QuadraticForm { values: values.iter().map(|&v| md(v, modulus)).collect(), group, modulus };
        q.validate()?;
        Ok(q)
    }

    pub fn from_fn(group: AbelianGroup, modulus: i64, f: impl Fn(&[i64]) -> i64) -> Result<Self> {
        let values = group.elements().map(|x| f(&x)).collect();
        Self::new(group, modulus, values)
    }

    fn validate(&self) -> Result<()> {
        let a = &self.group;
        if self.values.first().is_some_and(|&v| v != 0) {
            return Err(Error::Mismatch("q(0) ≠ 0".into()));
        }
        for x in a.elements() {
            if self.q(&x) != self.q(&a.neg(&x)) {
                return Err(Error::Mismatch(format!("q(−x) ≠ q(x) at {x:?}")));
            }
        }
        for x in a.elements() {
            for y in a.elements() {
                for z in a.elements() {
                    let lhs = self.b(&a.add(&x, &y), &z);
                    if lhs != md(self.b(&x, &z) + self.b(&y, &z), self.modulus) {
                        return Err(Error::Mismatch(format!("polarization not bilinear at {x:?}, {y:?}, {z:?}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn q(&self, x: &[i64]) -> i64 {
        self.values[self.group.index(x)]
    }

    pub fn q_index(&self, i: usize) -> i64 {
        self.values[i]
    }

    /// `b(x, y) = q(x + y) − q(x) − q(y)`.
    pub fn b(&self, x: &[i64], y: &[i64]) -> i64 {
        md(self.q(&self.group.add(x, y)) - self.q(x) - self.q(y), self.modulus)
    }

    /// `a ↦ b(a, ·)` is injective.
    pub fn is_nondegenerate(&self) -> bool {
        let a = &self.group;
        a.elements().filter(|x| !a.is_zero(x)).all(|x| a.elements().any(|y| self.b(&x, &y) != 0))
    }

    /// Parses `group <abelian> modulus M` followed by `x1,...,xk -> v` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty form file".into()))?;
        let w: Vec<&str> = header.split_whitespace().collect();
        if w.len() != 4 || w[0] != "group" || w[2] != "modulus" {
            return Err(Error::Parse(format!("bad form header `{header}`")));
        }
        let group = AbelianGroup::from_descriptor(w[1])?;
        let modulus: i64 = w[3].parse().map_err(|_| Error::Parse(format!("bad modulus `{}`", w[3])))?;
        let mut values = vec![None; group.order()];
        for line in lines {
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| Error::Parse(format!("missing `->` in `{line}`")))?;
            let x: Vec<i64> = if lhs.trim().is_empty() {
                Vec::new()
            } else {
                lhs.split(',')
                    .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad coordinate `{t}`"))))
                    .collect::<Result<_>>()?
            };
            if x.len() != group.rank() {
                return Err(Error::Parse(format!("expected {} coordinates in `{line}`", group.rank())));
            }
            let v: i64 = rhs.trim().parse().map_err(|_| Error::Parse(format!("bad value in `{line}`")))?;
            values[group.index(&x)] = Some(v);
        }
        let values = values
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Parse("form file does not list every element".into()))?;
        Self::new(group, modulus, values)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("group {} modulus {}\n", self.group.descriptor(), self.modulus);
        for x in self.group.elements() {
            let coords = x.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
            let _ = writeln!(out, "{coords} -> {}", self.q(&x));
        }
        out
    }

    /// Orthogonal sum of forms on cyclic products, transported to invariant-factor coordinates.
    pub fn orthogonal_sum(parts: &[QuadraticForm]) -> Result<Self> {
        let modulus = parts.iter().fold(1, |m, p| lcm(m, p.modulus));
        let orders: Vec<i64> = parts.iter().flat_map(|p| p.group.factors().to_vec()).collect();
        let value = |coords: &[i64]| -> i64 {
            let mut off = 0;
            let mut total = 0;
            for p in parts {
                let k = p.group.rank();
                total += p.q(&coords[off..off + k]) * (modulus / p.modulus);
                off += k;
            }
            total
        };
        if orders.is_empty() {
            return Self::new(AbelianGroup::trivial(), modulus, vec![0]);
        }
        if let Ok(target) = AbelianGroup::new(orders.clone()) {
            return Self::from_fn(target, modulus, value);
        }
        let target = AbelianGroup::from_orders(&orders)?;
        let src = FiniteGroup::product_of_cyclics(&orders.iter().map(|&d| d as usize).collect::<Vec<_>>())?;
        let iso = isomorphisms(&src, &target.as_group())?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Mismatch("cyclic product is not isomorphic to its invariant form".into()))?;
        let inv = iso.inverse();
        let digits = |mut i: usize| -> Vec<i64> {
            orders
                .iter()
                .map(|&d| {
                    let x = (i % d as usize) as i64;
                    i /= d as usize;
                    x
                })
                .collect()
        };
        let values = (0..target.order()).map(|t| value(&digits(inv.apply(t)))).collect();
        Self::new(target, modulus, values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Boson,
    Fermion,
    Neither,
}

/// An element `f` with `2f = 0`, its kind and its monodromy character `x ↦ b(x, f)`.
#[derive(Clone, Debug)]
pub struct Simple2Torsion {
    pub element: Vec<i64>,
    pub kind: Kind,
    pub monodromy: Vec<i64>,
}

impl Simple2Torsion {
    /// The `Z/2` grading `x ↦ b(x, f)/(M/2)`.
    pub fn degree(&self, form: &QuadraticForm, x: &[i64]) -> usize {
        usize::from(self.monodromy[form.group.index(x)] != 0)
    }
}

/// All elements of order ≤ 2, classified as boson, fermion or neither.
pub fn find_distinguished(form: &QuadraticForm) -> Vec<Simple2Torsion> {
    let a = &form.group;
    let m = form.modulus;
    a.elements()
        .filter(|f| a.is_zero(&a.scale(2, f)))
        .map(|f| {
            let qf = form.q(&f);
            let kind = if qf == 0 {
                Kind::Boson
            } else if m % 2 == 0 && qf == m / 2 {
                Kind::Fermion
            } else {
                Kind::Neither
            };
            let monodromy = a.elements().map(|x| form.b(&x, &f)).collect();
            Simple2Torsion { element: f, kind, monodromy }
        })
        .collect()
}

/// An abelian 3-cocycle `(ω, χ)` on `A` realizing a quadratic form.
#[derive(Clone, Debug)]
pub struct AbelianAssociatorPair {
    pub group: AbelianGroup,
    pub omega: Cochain,
    /// `χ(x, y)` at index `x·|A| + y`.
    pub chi: Vec<i64>,
    pub modulus: i64,
}

impl AbelianAssociatorPair {
    pub fn chi(&self, x: usize, y: usize) -> i64 {
        self.chi[x * self.group.order() + y]
    }

    pub fn category(&self) -> Result<PointedCategory> {
        PointedCategory::new(self.group.as_group(), self.omega.clone())
    }

    /// Checks `dω = 0`, both hexagon identities and `χ(x, x) = q(x)`.
    pub fn verify(&self, form: &QuadraticForm) -> Result<()> {
        let a = &self.group;
        let n = a.order();
        let g = a.as_group();
        let m = self.modulus;
        let w = |x: usize, y: usize, z: usize| self.omega.at(&[x, y, z]);
        if !scalar_differential(&g, &self.omega).is_zero() {
            return Err(Error::Coherence("ω is not a 3-cocycle".into()));
        }
        for x in 0..n {
            if md(self.chi(x, x) * (form.modulus) - form.q_index(x) * m, m * form.modulus) != 0 {
                return Err(Error::Coherence(format!("χ(x, x) ≠ q(x) at element {x}")));
            }
            for y in 0..n {
                for z in 0..n {
                    let h1 = w(y, z, x) + self.chi(x, g.mul(y, z)) + w(x, y, z)
                        - self.chi(x, z)
                        - w(y, x, z)
                        - self.chi(x, y);
                    let h2 = -w(z, x, y) + self.chi(g.mul(x, y), z) - w(x, y, z)
                        - self.chi(x, z)
                        + w(x, z, y)
                        - self.chi(y, z);
                    if md(h1, m) != 0 || md(h2, m) != 0 {
                        return Err(Error::Coherence(format!("hexagon fails at ({x}, {y}, {z})")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Explicit abelian cocycle for `q`: on coordinates `x = Σ xᵢeᵢ` (representatives `0 ≤ xᵢ < dᵢ`)
/// `χ(x, y) = Σ_{i<j} b(eᵢ, eⱼ)xᵢyⱼ + Σ q(eᵢ)xᵢyᵢ` and `ω(x, y, z) = Σ dᵢq(eᵢ)·xᵢ·⌊(yᵢ + zᵢ)/dᵢ⌋`.
pub fn em_realize(form: &QuadraticForm) -> Result<AbelianAssociatorPair> {
    let a = &form.group;
    let m = form.modulus;
    let k = a.rank();
    let d = a.factors().to_vec();
    let u: Vec<i64> = (0..k).map(|i| form.q(&a.basis(i))).collect();
    let bij = |i: usize, j: usize| form.b(&a.basis(i), &a.basis(j));
    let n = a.order();
    let elems: Vec<Vec<i64>> = a.elements().collect();
    let mut chi = vec![0; n * n];
    for (xi, x) in elems.iter().enumerate() {
        for (yi, y) in elems.iter().enumerate() {
            let mut v = 0;
            for i in 0..k {
                v += u[i] * x[i] * y[i];
                for j in i + 1..k {
                    v += bij(i, j) * x[i] * y[j];
                }
            }
            chi[xi * n + yi] = md(v, m);
        }
    }
    let omega = Cochain::scalar_from_fn(3, n, m, |t| {
        let (x, y, z) = (&elems[t[0]], &elems[t[1]], &elems[t[2]]);
        (0..k).map(|i| d[i] * u[i] * x[i] * ((y[i] + z[i]) / d[i])).sum()
    });
    let pair = AbelianAssociatorPair { group: a.clone(), omega, chi, modulus: m };
    pair.verify(form).map_err(|e| Error::Splitting(format!("realization failed: {e}")))?;
    Ok(pair)
}

/// `φ(x) = x + deg(x)·f`; `τ` transports `br_{m,f}` and `ev_f` through the associators of
/// `F(n) = f ⊗ n` on the odd part. Coherence is verified.
pub fn build_fz(form: &QuadraticForm, pair: &AbelianAssociatorPair, f: &Simple2Torsion) -> Result<PointedFunctor> {
    if f.kind == Kind::Neither {
        return Err(Error::Mismatch("F_z needs a boson or a fermion".into()));
    }
    let a = &form.group;
    let n = a.order();
    let fi = a.index(&f.element);
    let elems: Vec<Vec<i64>> = a.elements().collect();
    let deg: Vec<usize> = elems.iter().map(|x| f.degree(form, x)).collect();
    let phi = GroupHom {
        image: elems.iter().enumerate().map(|(i, x)| if deg[i] == 1 { a.index(&a.add(x, &f.element)) } else { i }).collect(),
    };
    let w = |x: usize, y: usize, z: usize| pair.omega.at(&[x, y, z]);
    let add = |x: usize, y: usize| a.index(&a.add(&elems[x], &elems[y]));
    let tau = Cochain::scalar_from_fn(2, n, pair.modulus, |t| {
        let (m, k) = (t[0], t[1]);
        match (deg[m], deg[k]) {
            (0, 0) => 0,
            (1, 0) => w(fi, m, k),
            (0, _) => w(fi, m, k) - w(m, fi, k) + pair.chi(m, fi),
            _ => w(fi, m, add(fi, k)) - w(m, fi, k) + pair.chi(m, fi) + w(fi, m, k) - w(fi, fi, add(m, k)),
        }
    });
    let functor = PointedFunctor { phi, tau };
    let c = pair.category()?;
    functor.check_coherence(&c, &c)?;
    Ok(functor)
}

/// The braided-functor condition `τ(n, m) + χ(φm, φn) = χ(m, n) + τ(m, n)`.
pub fn is_braided(f: &PointedFunctor, pair: &AbelianAssociatorPair) -> bool {
    let n = pair.group.order();
    let (tau, m) = {
        let l = lcm(f.tau.modulus(), pair.modulus);
        (f.tau.rescale(l).expect("divides"), l)
    };
    let s = m / pair.modulus;
    (0..n).all(|x| {
        (0..n).all(|y| {
            let lhs = tau.at(&[y, x]) + s * pair.chi(f.phi.apply(x), f.phi.apply(y));
            let rhs = s * pair.chi(x, y) + tau.at(&[x, y]);
            md(lhs - rhs, m) == 0
        })
    })
}

/// Reports on `F_z ∘ F_z`: its group map and whether its tensorator class is trivial.
#[derive(Clone, Debug)]
pub struct SquareReport {
    pub phi_is_identity: bool,
    pub tau_trivial: bool,
}

pub fn fz_square(pair: &AbelianAssociatorPair, fz: &PointedFunctor) -> Result<SquareReport> {
    let sq = crate::pointed::compose(fz, fz)?;
    let g = pair.group.as_group();
    let c = pair.category()?;
    sq.check_coherence(&c, &c)?;
    let phi_is_identity = sq.phi.is_identity();
    let tau_trivial = phi_is_identity && crate::cstar::cstar_is_trivial(&g, &sq.tau)?.trivial;
    Ok(SquareReport { phi_is_identity, tau_trivial })
}

/// `Inv(Z(Vec(A))) = A × Â` with `q(a, χ) = χ(a)`, in interleaved coordinates
/// `(a₁, χ₁, a₂, χ₂, …)`; the support is the projection to `A`.
#[derive(Clone, Debug)]
pub struct HyperbolicCenter {
    pub base: AbelianGroup,
    pub form: QuadraticForm,
}

impl HyperbolicCenter {
    pub fn new(base: &AbelianGroup) -> Result<Self> {
        let factors: Vec<i64> = base.factors().iter().flat_map(|&d| [d, d]).collect();
        let group = AbelianGroup::new(factors)?;
        let m = base.exponent();
        let form = QuadraticForm::from_fn(group, m, |v| {
            let (a, c) = split(v);
            base.pairing(&a, &c)
        })?;
        Ok(HyperbolicCenter { base: base.clone(), form })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.form.group
    }

    pub fn join(&self, a: &[i64], chi: &[i64]) -> Vec<i64> {
        a.iter().zip(chi).flat_map(|(&x, &y)| [x, y]).collect()
    }

    pub fn support(&self, v: &[i64]) -> Vec<i64> {
        split(v).0
    }

    /// `α ↦ (α, (α*)⁻¹)`.
    pub fn lift_automorphism(&self, alpha: &Endo) -> Result<Endo> {
        let dual = alpha
            .dual_inverse(&self.base)
            .ok_or_else(|| Error::NotHomomorphism("not an automorphism".into()))?;
        Endo::from_fn(self.group(), |v| {
            let (a, c) = split(v);
            self.join(&alpha.apply(&self.base, &a), &dual.apply(&self.base, &c))
        })
    }

    /// Support as a row-major matrix onto `A`.
    pub fn support_matrix(&self) -> Vec<i64> {
        let k = self.base.rank();
        let mut m = vec![0; k * 2 * k];
        for i in 0..k {
            m[i * 2 * k + 2 * i] = 1;
        }
        m
    }
}

fn split(v: &[i64]) -> (Vec<i64>, Vec<i64>) {
    (v.iter().step_by(2).copied().collect(), v.iter().skip(1).step_by(2).copied().collect())
}

/// Forms on `Z/n`: `q(x) = u·x²` over `Z/M`.
pub fn cyclic_form(n: i64, u: i64, modulus: i64) -> Result<QuadraticForm> {
    QuadraticForm::from_fn(AbelianGroup::cyclic(n), modulus, |x| u * x[0] * x[0])
}

/// Nondegenerate building blocks whose orthogonal sums exhaust metric groups.
fn blocks(max_order: i64) -> Vec<QuadraticForm> {
    let mut out = Vec::new();
    // 2-adic cyclic: q(x) = u x²/2^{k+1}, u odd
    let mut n = 2;
    while n <= max_order {
        for u in (1..2 * n).step_by(2).filter(|&u| u < 8) {
            out.push(cyclic_form(n, u, 2 * n).expect("cyclic form"));
        }
        n *= 2;
    }
    // 2-adic rank two: xy/2^k and (x² + xy + y²)/2^k
    let mut n = 2;
    while n * n <= max_order {
        let a = AbelianGroup::new(vec![n, n]).expect("rank two");
        out.push(QuadraticForm::from_fn(a.clone(), n, |v| v[0] * v[1]).expect("hyperbolic"));
        out.push(QuadraticForm::from_fn(a, n, |v| v[0] * v[0] + v[0] * v[1] + v[1] * v[1]).expect("anisotropic"));
        n *= 2;
    }
    // odd cyclic: q(x) = u x²/n for u a unit (both square classes appear)
    for n in (3..=max_order).step_by(2) {
        let p = (2..=n).find(|p| n % p == 0).expect("prime factor");
        if (1..).map(|e| p.pow(e)).take_while(|&q| q <= n).all(|q| q != n) {
            continue;
        }
        for u in 1..n {
            if gcd(u, n) == 1 && gcd(u, p) == 1 && u < 2 * p {
                out.push(cyclic_form(n, u, n).expect("odd cyclic"));
            }
        }
    }
    out.retain(QuadraticForm::is_nondegenerate);
    out
}

/// Every metric group (nondegenerate quadratic form) of order ≤ `max_order`, up to isometry,
/// as orthogonal sums of primary blocks; isometric duplicates may occur.
pub fn metric_groups(max_order: usize) -> Result<Vec<QuadraticForm>> {
    let blocks = blocks(max_order as i64);
    let mut out = vec![QuadraticForm::new(AbelianGroup::trivial(), 1, vec![0])?];
    let mut sums: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = sums.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &frontier {
            let order: usize = s.iter().map(|&i| blocks[i].group.order()).product();
            let start = s.last().copied().unwrap_or(0);
            for (i, b) in blocks.iter().enumerate().skip(start) {
                if order * b.group.order() <= max_order {
                    let mut t = s.clone();
                    t.push(i);
                    next.push(t);
                }
            }
        }
        for s in &next {
            let parts: Vec<QuadraticForm> = s.iter().map(|&i| blocks[i].clone()).collect();
            out.push(QuadraticForm::orthogonal_sum(&parts)?);
        }
        sums.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

/// Outcome of the fermion criterion on one `(form, f)`.
#[derive(Clone, Debug)]
pub struct FermionCheck {
    pub form: String,
    pub element: Vec<i64>,
    pub kind: Kind,
    pub coherent: bool,
    pub braided: bool,
}

/// Builds `F_z` for every nontrivial boson or fermion of a form and records the verdicts.
pub fn fermion_checks(form: &QuadraticForm) -> Result<Vec<FermionCheck>> {
    let pair = em_realize(form)?;
    let mut out = Vec::new();
    for f in find_distinguished(form) {
        if form.group.is_zero(&f.element) || f.kind == Kind::Neither {
            continue;
        }
        let (coherent, braided) = match build_fz(form, &pair, &f) {
            Ok(fz) => (true, is_braided(&fz, &pair)),
            Err(Error::Coherence(_)) => (false, false),
            Err(e) => return Err(e),
        };
        out.push(FermionCheck {
            form: form_label(form),
            element: f.element.clone(),
            kind: f.kind,
            coherent,
            braided,
        });
    }
    Ok(out)
}

pub fn form_label(form: &QuadraticForm) -> String {
    let vals = (0..form.group.order()).map(|i| form.q_index(i).to_string()).collect::<Vec<_>>().join(",");
    format!("{} mod {} [{}]", form.group.descriptor(), form.modulus, vals)
}

/// Pullback of the realization along an automorphism, for consistency checks.
pub fn pulled_pair_omega(pair: &AbelianAssociatorPair, phi: &GroupHom) -> Cochain {
    pullback_unchecked(&pair.omega, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toric() -> QuadraticForm {
        QuadraticForm::from_fn(AbelianGroup::new(vec![2, 2]).unwrap(), 2, |v| v[0] * v[1]).unwrap()
    }

    fn z4_fermion() -> QuadraticForm {
        cyclic_form(4, 1, 8).unwrap()
    }

    #[test]
    fn distinguished_elements() {
        let q = z4_fermion();
        let d = find_distinguished(&q);
        let two = d.iter().find(|s| s.element == vec![2]).unwrap();
        assert_eq!(two.kind, Kind::Fermion);
        assert_eq!(two.monodromy, vec![0, 4, 0, 4]);
        let t = toric();
        let kinds: Vec<(Vec<i64>, Kind)> = find_distinguished(&t).into_iter().map(|s| (s.element, s.kind)).collect();
        assert!(kinds.contains(&(vec![1, 0], Kind::Boson)));
        assert!(kinds.contains(&(vec![0, 1], Kind::Boson)));
        assert!(kinds.contains(&(vec![1, 1], Kind::Fermion)));
        assert_eq!(find_distinguished(&QuadraticForm::new(AbelianGroup::trivial(), 1, vec![0]).unwrap()).len(), 1);
    }

    #[test]
    fn toric_code_realization_is_bilinear() {
        let t = toric();
        let pair = em_realize(&t).unwrap();
        assert!(pair.omega.is_zero());
        let a = &t.group;
        for x in a.elements() {
            for y in a.elements() {
                assert_eq!(pair.chi(a.index(&x), a.index(&y)), md(x[1] * y[0], 2) * 0 + md(x[0] * y[1], 2));
            }
        }
    }

    #[test]
    fn z4_fermion_fz() {
        let q = z4_fermion();
        let pair = em_realize(&q).unwrap();
        assert!(!pair.omega.is_zero());
        let f = find_distinguished(&q).into_iter().find(|s| s.element == vec![2]).unwrap();
        let fz = build_fz(&q, &pair, &f).unwrap();
        assert_eq!(fz.phi.image, vec![0, 3, 2, 1]);
        assert!(is_braided(&fz, &pair));
    }

    #[test]
    fn toric_boson_is_not_braided() {
        let t = toric();
        let pair = em_realize(&t).unwrap();
        let e = find_distinguished(&t).into_iter().find(|s| s.element == vec![1, 0]).unwrap();
        let fz = build_fz(&t, &pair, &e).unwrap();
        // m = (0,1) ↔ em = (1,1)
        let a = &t.group;
        assert_eq!(fz.phi.apply(a.index(&[0, 1])), a.index(&[1, 1]));
        assert!(!is_braided(&fz, &pair));
    }

    #[test]
    fn identity_element_gives_identity_functor() {
        let q = z4_fermion();
        let pair = em_realize(&q).unwrap();
        let zero = find_distinguished(&q).into_iter().find(|s| s.element == vec![0]).unwrap();
        let fz = build_fz(&q, &pair, &zero).unwrap();
        assert!(fz.phi.is_identity() && fz.tau.is_zero());
        assert!(is_braided(&fz, &pair));
    }

    #[test]
    fn form_file_round_trip() {
        let q = toric();
        assert_eq!(QuadraticForm::parse(&q.to_text()).unwrap(), q);
        assert!(QuadraticForm::parse("group C3 modulus 3\n0 -> 0\n1 -> 1\n2 -> 2\n").is_err());
    }

    #[test]
    fn hyperbolic_center_of_z3() {
        let h = HyperbolicCenter::new(&AbelianGroup::cyclic(3)).unwrap();
        assert_eq!(h.group().order(), 9);
        assert!(h.form.is_nondegenerate());
        let inv = Endo::scalar(1, -1);
        let lifted = h.lift_automorphism(&inv).unwrap();
        for v in h.group().elements() {
            assert_eq!(lifted.apply(h.group(), &v), h.group().neg(&v));
        }
        assert_eq!(HyperbolicCenter::new(&AbelianGroup::trivial()).unwrap().group().order(), 1);
    }

    #[test]
    fn block_sums_cover_small_orders() {
        let forms = metric_groups(8).unwrap();
        assert!(forms.iter().all(QuadraticForm::is_nondegenerate));
        for order in [1, 2, 3, 4, 5, 6, 7, 8] {
            assert!(forms.iter().any(|f| f.group.order() == order), "order {order}");
        }
    }

    #[test]
    fn fermion_theorem_up_to_order_eight() {
        let mut seen = 0;
        for form in metric_groups(8).unwrap() {
            for c in fermion_checks(&form).unwrap() {
                assert!(c.coherent, "{}", c.form);
                assert_eq!(c.braided, c.kind == Kind::Fermion, "{} at {:?}", c.form, c.element);
                seen += 1;
            }
        }
        assert!(seen > 10);
    }
}
