//! Coefficient modules and bar-complex cochains.

use std::fmt::Write as _;
use std::path::Path;

use crate::abelian::{AbelianGroup, Endo};
use crate::error::{Error, Result};
use crate::group::{homomorphisms, make_group, FiniteGroup, GroupHom};
use crate::zmod::md;

/// A finite abelian group `Λ` with a left action of `G` by automorphisms.
#[derive(Clone, Debug)]
pub struct GModule {
    pub group: FiniteGroup,
    pub coeffs: AbelianGroup,
    action: Vec<Endo>,
}

impl GModule {
    pub fn trivial(group: FiniteGroup, coeffs: AbelianGroup) -> Self {
        let action = vec![Endo::identity(coeffs.rank()); group.order()];
        GModule { group, coeffs, action }
    }

    /// `G` acts through a homomorphism to `C2`, the non-identity element by negation.
    pub fn negation(group: FiniteGroup, coeffs: AbelianGroup, sign: &GroupHom) -> Result<Self> {
        let k = coeffs.rank();
        let action =
            group.elements().map(|g| Endo::scalar(k, if sign.apply(g) == 0 { 1 } else { -1 })).collect();
        Self::new(group, coeffs, action)
    }

    /// Validates `action(e) = 1`, `action(gh) = action(g)·action(h)` and invertibility.
    pub fn new(group: FiniteGroup, coeffs: AbelianGroup, action: Vec<Endo>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::IncompatibleAction(format!(
                "{} action matrices for a group of order {}",
                action.len(),
                group.order()
            )));
        }
        if !action[0].agrees(&Endo::identity(coeffs.rank()), &coeffs) {
            return Err(Error::IncompatibleAction("identity does not act trivially".into()));
        }
        for g in group.elements() {
            if !action[g].is_bijective(&coeffs) {
                return Err(Error::IncompatibleAction(format!("element {g} acts non-invertibly")));
            }
            for h in group.elements() {
                let gh = action[g].compose(&coeffs, &action[h]);
                if !gh.agrees(&action[group.mul(g, h)], &coeffs) {
                    return Err(Error::IncompatibleAction(format!("action({g}·{h}) ≠ action({g})·action({h})")));
                }
            }
        }
        Ok(GModule { group, coeffs, action })
    }

    /// Builds the action from a function `(g, x) ↦ g·x`.
    pub fn from_fn(
        group: FiniteGroup,
        coeffs: AbelianGroup,
        f: impl Fn(usize, &[i64]) -> Vec<i64>,
    ) -> Result<Self> {
        let action = group
            .elements()
            .map(|g| Endo::from_fn(&coeffs, |x| f(g, x)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, coeffs, action)
    }

    /// Parses `triv:<abelian>`, `neg:<abelian>` or a module file path.
    pub fn from_descriptor(group: &FiniteGroup, spec: &str) -> Result<Self> {
        if let Some(a) = spec.strip_prefix("triv:") {
            return Ok(Self::trivial(group.clone(), AbelianGroup::from_descriptor(a)?));
        }
        if let Some(a) = spec.strip_prefix("neg:") {
            let coeffs = AbelianGroup::from_descriptor(a)?;
            let c2 = FiniteGroup::cyclic(2)?;
            let sign = homomorphisms(group, &c2)
                .into_iter()
                .find(|h| group.elements().any(|g| h.apply(g) != 0))
                .ok_or_else(|| Error::Descriptor(format!("{} has no sign character", group.name())))?;
            return Self::negation(group.clone(), coeffs, &sign);
        }
        let text = std::fs::read_to_string(spec)?;
        Self::parse(&text, Some(group))
    }

    /// Module file: `group <descriptor>`, `coefficients <abelian>`, then lines
    /// `act <g> : <row-major integer matrix>` for a generating set.
    pub fn parse(text: &str, group: Option<&FiniteGroup>) -> Result<Self> {
        let mut g: Option<FiniteGroup> = group.cloned();
        let mut coeffs: Option<AbelianGroup> = None;
        let mut gens: Vec<(usize, Endo)> = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match key {
                "group" => {
                    if g.is_none() {
                        g = Some(make_group(rest.trim())?);
                    }
                }
                "coefficients" => coeffs = Some(AbelianGroup::from_descriptor(rest.trim())?),
                "act" => {
                    let k = coeffs.as_ref().ok_or_else(|| Error::Parse("act before coefficients".into()))?.rank();
                    let (elem, mat) =
                        rest.split_once(':').ok_or_else(|| Error::Parse(format!("missing `:` in `{line}`")))?;
                    let elem = parse_num::<usize>(elem.trim())?;
                    let matrix = mat.split_whitespace().map(parse_num::<i64>).collect::<Result<Vec<_>>>()?;
                    if matrix.len() != k * k {
                        return Err(Error::Parse(format!("expected {} matrix entries in `{line}`", k * k)));
                    }
                    gens.push((elem, Endo { rank: k, matrix }));
                }
                _ => return Err(Error::Parse(format!("unknown key `{key}`"))),
            }
        }
        let group = g.ok_or_else(|| Error::Parse("missing group".into()))?;
        let coeffs = coeffs.ok_or_else(|| Error::Parse("missing coefficients".into()))?;
        let n = group.order();
        let mut action: Vec<Option<Endo>> = vec![None; n];
        action[0] = Some(Endo::identity(coeffs.rank()));
        if gens.iter().any(|(e, _)| *e >= n) {
            return Err(Error::Parse("action element out of range".into()));
        }
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for (s, m) in &gens {
                let y = group.mul(*s, x);
                let img = m.compose(&coeffs, action[x].as_ref().expect("visited"));
                match &action[y] {
                    Some(existing) if !existing.agrees(&img, &coeffs) => {
                        return Err(Error::IncompatibleAction(format!("inconsistent action at element {y}")));
                    }
                    Some(_) => {}
                    None => {
                        action[y] = Some(img);
                        frontier.push(y);
                    }
                }
            }
        }
        let action = action
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::IncompatibleAction("listed elements do not generate the group".into()))?;
        Self::new(group, coeffs, action)
    }

    pub fn rank(&self) -> usize {
        self.coeffs.rank()
    }

    pub fn factors(&self) -> &[i64] {
        self.coeffs.factors()
    }

    pub fn action(&self, g: usize) -> &Endo {
        &self.action[g]
    }

    pub fn act(&self, g: usize, x: &[i64]) -> Vec<i64> {
        self.action[g].apply(&self.coeffs, x)
    }

    pub fn is_trivial_action(&self) -> bool {
        self.group.elements().all(|g| self.action[g].agrees(&Endo::identity(self.rank()), &self.coeffs))
    }

    /// Whether `action(φ g) = action(g)` for every `g`.
    pub fn is_compatible(&self, phi: &GroupHom) -> bool {
        self.group.elements().all(|g| self.action[phi.apply(g)].agrees(&self.action[g], &self.coeffs))
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse::<T>().map_err(|_| Error::Parse(format!("bad number `{s}`")))
}

/// Index arithmetic on `G^n` with `g₁` most significant.
pub fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &g| acc * n + g)
}

pub fn tuple_of(n: usize, degree: usize, mut index: usize) -> Vec<usize> {
    let mut t = vec![0; degree];
    for slot in t.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    t
}

/// A cochain `G^n → Λ` stored as a dense table of exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cochain {
    pub degree: usize,
    pub group_order: usize,
    pub factors: Vec<i64>,
    pub values: Vec<i64>,
}

impl Cochain {
    pub fn zero(degree: usize, group_order: usize, factors: &[i64]) -> Self {
        let len = group_order.pow(degree as u32) * factors.len();
        Cochain { degree, group_order, factors: factors.to_vec(), values: vec![0; len] }
    }

    /// A `Z/M`-valued cochain (exponents of `M`-th roots of unity).
    pub fn scalar_zero(degree: usize, group_order: usize, modulus: i64) -> Self {
        Self::zero(degree, group_order, &[modulus])
    }

    pub fn from_fn(
        degree: usize,
        group_order: usize,
        factors: &[i64],
        mut f: impl FnMut(&[usize]) -> Vec<i64>,
    ) -> Self {
        let mut c = Self::zero(degree, group_order, factors);
        for idx in 0..c.len() {
            let t = tuple_of(group_order, degree, idx);
            c.set_index(idx, &f(&t));
        }
        c
    }

    pub fn scalar_from_fn(degree: usize, group_order: usize, modulus: i64, f: impl Fn(&[usize]) -> i64) -> Self {
        Self::from_fn(degree, group_order, &[modulus], |t| vec![f(t)])
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Number of tuples.
    pub fn len(&self) -> usize {
        self.group_order.pow(self.degree as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_index(&self, idx: usize) -> &[i64] {
        let k = self.rank();
        &self.values[idx * k..(idx + 1) * k]
    }

    pub fn set_index(&mut self, idx: usize, v: &[i64]) {
        let k = self.rank();
        for (c, (&x, &d)) in v.iter().zip(&self.factors).enumerate() {
            self.values[idx * k + c] = md(x, d);
        }
    }

    pub fn get(&self, tuple: &[usize]) -> &[i64] {
        self.get_index(tuple_index(self.group_order, tuple))
    }

    pub fn set(&mut self, tuple: &[usize], v: &[i64]) {
        self.set_index(tuple_index(self.group_order, tuple), v);
    }

    /// The single coordinate of a scalar cochain.
    pub fn at(&self, tuple: &[usize]) -> i64 {
        self.get(tuple)[0]
    }

    pub fn modulus(&self) -> i64 {
        assert_eq!(self.rank(), 1, "not a scalar cochain");
        self.factors[0]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn check_shape(&self, other: &Cochain) -> Result<()> {
        if self.degree != other.degree || self.group_order != other.group_order || self.factors != other.factors {
            return Err(Error::Mismatch(format!(
                "cochain shapes differ: degree {} / {}, factors {:?} / {:?}",
                self.degree, other.degree, self.factors, other.factors
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.check_shape(other)?;
        let mut out = self.clone();
        let k = self.rank();
        for (i, v) in out.values.iter_mut().enumerate() {
            *v = md(*v + other.values[i], self.factors[i % k]);
        }
        Ok(out)
    }

    pub fn scale(&self, s: i64) -> Cochain {
        let mut out = self.clone();
        let k = self.rank();
        for (i, v) in out.values.iter_mut().enumerate() {
            *v = md(*v * s, self.factors[i % k]);
        }
        out
    }

    pub fn neg(&self) -> Cochain {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add(&other.neg())
    }

    /// Reinterprets a `Z/M` cochain over `Z/(kM)` via `μ_M ⊂ μ_{kM}`.
    pub fn rescale(&self, new_modulus: i64) -> Result<Cochain> {
        let m = self.modulus();
        if new_modulus % m != 0 {
            return Err(Error::Mismatch(format!("{m} does not divide {new_modulus}")));
        }
        let s = new_modulus / m;
        Ok(Cochain {
            degree: self.degree,
            group_order: self.group_order,
            factors: vec![new_modulus],
            values: self.values.iter().map(|&v| v * s).collect(),
        })
    }

    /// First tuple with an identity argument and a nonzero value.
    pub fn normalization_violation(&self) -> Option<Vec<usize>> {
        (0..self.len())
            .map(|i| tuple_of(self.group_order, self.degree, i))
            .find(|t| t.contains(&0) && self.get(t).iter().any(|&v| v != 0))
    }

    pub fn is_normalized(&self) -> bool {
        self.normalization_violation().is_none()
    }

    /// Text form: header `degree n modulus-vector d1,...,dk group <descriptor>`,
    /// then `g1 ... gn | x1 ... xk` for each nonzero value.
    pub fn to_text(&self, group_descriptor: &str) -> String {
        let mods = self.factors.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        let mut out = format!("degree {} modulus-vector {} group {}\n", self.degree, mods, group_descriptor);
        for idx in 0..self.len() {
            let v = self.get_index(idx);
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let t = tuple_of(self.group_order, self.degree, idx);
            let lhs = t.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            let rhs = v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
            let _ = writeln!(out, "{lhs} | {rhs}");
        }
        out
    }

    /// Parses the text form; returns the cochain and its group.
    pub fn parse(text: &str) -> Result<(Cochain, FiniteGroup)> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty cochain file".into()))?;
        let words: Vec<&str> = header.split_whitespace().collect();
        if words.len() != 6 || words[0] != "degree" || words[2] != "modulus-vector" || words[4] != "group" {
            return Err(Error::Parse(format!("bad cochain header `{header}`")));
        }
        let degree = parse_num::<usize>(words[1])?;
        let factors = words[3].split(',').map(parse_num::<i64>).collect::<Result<Vec<_>>>()?;
        if factors.iter().any(|&d| d < 1) {
            return Err(Error::Parse("moduli must be positive".into()));
        }
        let group = make_group(words[5])?;
        let n = group.order();
        let mut c = Cochain::zero(degree, n, &factors);
        for line in lines {
            let (lhs, rhs) = line.split_once('|').ok_or_else(|| Error::Parse(format!("missing `|` in `{line}`")))?;
            let t = lhs.split_whitespace().map(parse_num::<usize>).collect::<Result<Vec<_>>>()?;
            let v = rhs.split_whitespace().map(parse_num::<i64>).collect::<Result<Vec<_>>>()?;
            if t.len() != degree || v.len() != factors.len() || t.iter().any(|&g| g >= n) {
                return Err(Error::Parse(format!("malformed cochain line `{line}`")));
            }
            c.set(&t, &v);
        }
        Ok((c, group))
    }

    pub fn read(path: &Path) -> Result<(Cochain, FiniteGroup)> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// The left-action bar differential.
pub fn differential(module: &GModule, f: &Cochain) -> Cochain {
    let g = &module.group;
    let n = g.order();
    let deg = f.degree;
    let a = &module.coeffs;
    assert_eq!(f.group_order, n, "cochain and module groups differ");
    assert_eq!(f.factors, a.factors(), "cochain and module coefficients differ");
    let mut out = Cochain::zero(deg + 1, n, a.factors());
    let mut inner = vec![0usize; deg];
    for idx in 0..out.len() {
        let t = tuple_of(n, deg + 1, idx);
        let mut acc = module.act(t[0], f.get(&t[1..]));
        for i in 0..deg {
            inner.clear();
            inner.extend_from_slice(&t[..i]);
            inner.push(g.mul(t[i], t[i + 1]));
            inner.extend_from_slice(&t[i + 2..]);
            let v = f.get(&inner);
            acc = if i % 2 == 0 { a.add(&acc, &a.neg(v)) } else { a.add(&acc, v) };
        }
        let last = f.get(&t[..deg]);
        acc = if deg % 2 == 1 { a.add(&acc, last) } else { a.add(&acc, &a.neg(last)) };
        out.set_index(idx, &acc);
    }
    out
}

/// `ℂ^×`-valued (trivial action, `Z/M`) differential; `M = 1` is allowed.
pub fn scalar_differential(group: &FiniteGroup, f: &Cochain) -> Cochain {
    let n = group.order();
    let m = f.modulus();
    let deg = f.degree;
    assert_eq!(f.group_order, n, "cochain and group differ");
    let mut out = Cochain::scalar_zero(deg + 1, n, m);
    let mut inner = vec![0usize; deg];
    for idx in 0..out.len() {
        let t = tuple_of(n, deg + 1, idx);
        let mut acc = f.at(&t[1..]);
        for i in 0..deg {
            inner.clear();
            inner.extend_from_slice(&t[..i]);
            inner.push(group.mul(t[i], t[i + 1]));
            inner.extend_from_slice(&t[i + 2..]);
            let v = f.at(&inner);
            acc += if i % 2 == 0 { -v } else { v };
        }
        let last = f.at(&t[..deg]);
        acc += if deg % 2 == 1 { last } else { -last };
        out.values[idx] = md(acc, m);
    }
    out
}

pub fn is_cocycle(module: &GModule, f: &Cochain) -> bool {
    differential(module, f).is_zero()
}

/// First tuple where `df` is nonzero.
pub fn cocycle_violation(module: &GModule, f: &Cochain) -> Option<Vec<usize>> {
    let df = differential(module, f);
    (0..df.len()).find(|&i| df.get_index(i).iter().any(|&v| v != 0)).map(|i| tuple_of(df.group_order, df.degree, i))
}

/// `(φ*f)(g₁,…,g_n) = f(φg₁,…,φg_n)`.
pub fn pullback(module: &GModule, f: &Cochain, phi: &GroupHom) -> Result<Cochain> {
    if !module.is_compatible(phi) {
        return Err(Error::IncompatibleAction("the action is not invariant under the automorphism".into()));
    }
    Ok(pullback_unchecked(f, phi))
}

/// Pullback along any map of index sets, without an action check.
pub fn pullback_unchecked(f: &Cochain, phi: &GroupHom) -> Cochain {
    let n = phi.image.len();
    Cochain::from_fn(f.degree, n, &f.factors, |t| {
        let mapped: Vec<usize> = t.iter().map(|&x| phi.apply(x)).collect();
        f.get(&mapped).to_vec()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn neg_c2_z3z3() -> GModule {
        GModule::from_descriptor(&FiniteGroup::cyclic(2).unwrap(), "neg:C3xC3").unwrap()
    }

    #[test]
    fn worked_example_differential() {
        let m = neg_c2_z3z3();
        let mut rho = Cochain::zero(1, 2, m.factors());
        rho.set(&[1], &[1, 0]);
        let d = differential(&m, &rho);
        assert_eq!(d.get(&[1, 1]), &[0, 0]);
        assert!(d.is_zero());
    }

    fn random_module(rng: &mut ChaCha8Rng) -> GModule {
        let groups = ["C1", "C2", "C3", "C4", "C2xC2", "C5", "C6", "D6"];
        let g = make_group(groups[rng.gen_range(0..groups.len())]).unwrap();
        let coeffs = ["C2", "C3", "C4", "C2xC2", "C3xC3", "C6"];
        let a = coeffs[rng.gen_range(0..coeffs.len())];
        if rng.gen_bool(0.5) {
            if let Ok(m) = GModule::from_descriptor(&g, &format!("neg:{a}")) {
                return m;
            }
        }
        GModule::from_descriptor(&g, &format!("triv:{a}")).unwrap()
    }

    #[test]
    fn d_squared_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let m = random_module(&mut rng);
            let deg = rng.gen_range(0..4);
            let n = m.group.order();
            let f = Cochain::from_fn(deg, n, m.factors(), |_| {
                m.factors().iter().map(|&d| rng.gen_range(0..d)).collect()
            });
            assert!(differential(&m, &differential(&m, &f)).is_zero());
        }
    }

    #[test]
    fn module_file_round_trip() {
        let text = "group C2\ncoefficients C3xC3\nact 1 : -1 0 0 -1\n";
        let m = GModule::parse(text, None).unwrap();
        assert_eq!(m.act(1, &[1, 2]), vec![2, 1]);
        let bad = "group C2\ncoefficients C3\nact 1 : 2\nact 1 : 1\n";
        assert!(GModule::parse(bad, None).is_err());
        let not_hom = "group C3\ncoefficients C3\nact 1 : 2\n";
        assert!(matches!(GModule::parse(not_hom, None), Err(Error::IncompatibleAction(_))));
    }

    #[test]
    fn cochain_text_round_trip() {
        let f = Cochain::scalar_from_fn(2, 3, 9, |t| (t[0] * t[1]) as i64);
        let (g, grp) = Cochain::parse(&f.to_text("C3")).unwrap();
        assert_eq!(f, g);
        assert_eq!(grp.order(), 3);
        assert!(Cochain::parse("degree 2 modulus-vector 3 group C3\n1 | 1\n").is_err());
    }

    #[test]
    fn pullback_requires_compatible_action() {
        let g = make_group("C2xC2").unwrap();
        let m = GModule::from_descriptor(&g, "neg:C3").unwrap();
        let swap = crate::group::automorphisms(&g)
            .unwrap()
            .into_iter()
            .find(|phi| !m.is_compatible(phi))
            .expect("some automorphism moves the sign character");
        let f = Cochain::zero(1, 4, m.factors());
        assert!(pullback(&m, &f, &swap).is_err());
    }

    #[test]
    fn differential_preserves_normalization() {
        let g = make_group("C3").unwrap();
        let m = GModule::trivial(g, AbelianGroup::cyclic(9));
        let f = Cochain::scalar_from_fn(2, 3, 9, |t| if t.contains(&0) { 0 } else { (t[0] + 2 * t[1]) as i64 });
        assert!(differential(&m, &f).is_normalized());
    }
}
