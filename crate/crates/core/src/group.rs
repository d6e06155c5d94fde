//! Finite groups given by multiplication tables.
//!
//! Elements are dense indices `0..order` with the identity at index 0.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Largest group order accepted by the exhaustive searches.
pub const DEFAULT_CAP: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    name: String,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order)
    }
}

impl FiniteGroup {
    /// Validates a multiplication table and builds the group.
    ///
    /// Reports the first violating triple when associativity fails.
    pub fn from_table(name: impl Into<String>, order: usize, mul: Vec<usize>) -> Result<Self> {
        if order == 0 || mul.len() != order * order {
            return Err(Error::GroupAxiom(format!(
                "table has {} entries, expected {}",
                mul.len(),
                order * order
            )));
        }
        if let Some(&bad) = mul.iter().find(|&&x| x >= order) {
            return Err(Error::GroupAxiom(format!("entry {bad} out of range")));
        }
        for a in 0..order {
            if mul[a] != a || mul[a * order] != a {
                return Err(Error::GroupAxiom(format!("0 is not a two-sided identity at {a}")));
            }
        }
        for a in 0..order {
            for b in 0..order {
                let ab = mul[a * order + b];
                for c in 0..order {
                    let bc = mul[b * order + c];
                    if mul[ab * order + c] != mul[a * order + bc] {
                        return Err(Error::GroupAxiom(format!(
                            "associativity fails on ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let mut inv = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if mul[a * order + b] == 0 && mul[b * order + a] == 0 {
                    inv[a] = b;
                    break;
                }
            }
            if inv[a] == usize::MAX {
                return Err(Error::GroupAxiom(format!("element {a} has no inverse")));
            }
        }
        Ok(FiniteGroup { order, mul, inv, name: name.into() })
    }

    pub fn trivial() -> Self {
        FiniteGroup { order: 1, mul: vec![0], inv: vec![0], name: "C1".into() }
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::product_of_cyclics(&[n])
    }

    /// Direct product of cyclic groups; element index is mixed radix with the
    /// first factor least significant.
    pub fn product_of_cyclics(orders: &[usize]) -> Result<Self> {
        if orders.is_empty() || orders.iter().any(|&n| n == 0) {
            return Err(Error::Descriptor(format!("{orders:?}")));
        }
        let order: usize = orders.iter().product();
        let digits = |mut x: usize| {
            orders
                .iter()
                .map(|&n| {
                    let d = x % n;
                    x /= n;
                    d
                })
                .collect::<Vec<_>>()
        };
        let index = |ds: &[usize]| {
            ds.iter().zip(orders).rev().fold(0, |acc, (&d, &n)| acc * n + d)
        };
        let mut mul = vec![0; order * order];
        for a in 0..order {
            let da = digits(a);
            for b in 0..order {
                let db = digits(b);
                let s: Vec<usize> =
                    da.iter().zip(&db).zip(orders).map(|((x, y), n)| (x + y) % n).collect();
                mul[a * order + b] = index(&s);
            }
        }
        let name = orders.iter().map(|n| format!("C{n}")).collect::<Vec<_>>().join("x");
        Self::from_table(name, order, mul)
    }

    /// Dihedral group of order `n` (n even): index `k + (n/2)·e` stands for `r^k s^e`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::Descriptor(format!("D{n}: order must be even and ≥ 2")));
        }
        let m = n / 2;
        let mut mul = vec![0; n * n];
        for a in 0..n {
            let (ka, ea) = (a % m, a / m);
            for b in 0..n {
                let (kb, eb) = (b % m, b / m);
                let k = if ea == 0 { (ka + kb) % m } else { (ka + m - kb) % m };
                mul[a * n + b] = k + m * ((ea + eb) % 2);
            }
        }
        Self::from_table(format!("D{n}"), n, mul)
    }

    /// Quaternion group; index `2u + s` stands for `(−1)^s·u` with `u ∈ (1, i, j, k)`.
    pub fn quaternion() -> Self {
        // unit products as (sign, unit) for u, v in (1, i, j, k)
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let mut mul = vec![0; 64];
        for a in 0..8 {
            for b in 0..8 {
                let (s, u) = UNIT[a / 2][b / 2];
                mul[a * 8 + b] = 2 * u + (s + a % 2 + b % 2) % 2;
            }
        }
        Self::from_table("Q8", 8, mul).expect("quaternion table")
    }

    /// Reads `order` on the first line followed by `order` rows of indices.
    pub fn from_table_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut nums = text.split_whitespace().map(|t| {
            t.parse::<usize>().map_err(|_| Error::Parse(format!("bad table entry `{t}`")))
        });
        let order = nums.next().ok_or_else(|| Error::Parse("empty table file".into()))??;
        let mul = nums.collect::<Result<Vec<_>>>()?;
        Self::from_table(format!("table:{}", path.display()), order, mul)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn table(&self) -> &[usize] {
        &self.mul
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Subgroup generated by `gens`, sorted.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&x| seen[x]).collect()
    }

    /// Greedy generating set: scan elements in index order, keep those not yet generated.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![0];
        for x in 1..self.order {
            if span.binary_search(&x).is_err() {
                gens.push(x);
                span = self.generated(&gens);
            }
        }
        gens
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&z| (0..self.order).all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    /// Checks closure and identity membership; returns the sorted element list.
    pub fn check_subgroup(&self, elems: &[usize]) -> Result<Vec<usize>> {
        let mut sorted = elems.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.first() != Some(&0) {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        if let Some(&x) = sorted.iter().find(|&&x| x >= self.order) {
            return Err(Error::NotSubgroup(format!("element {x} out of range")));
        }
        for &a in &sorted {
            for &b in &sorted {
                if sorted.binary_search(&self.mul(a, b)).is_err() {
                    return Err(Error::NotSubgroup(format!("{a}·{b} not in subset")));
                }
            }
        }
        Ok(sorted)
    }

    /// The subgroup on `elems` re-indexed as its own group, with the embedding.
    pub fn subgroup(&self, elems: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        let sorted = self.check_subgroup(elems)?;
        let n = sorted.len();
        let pos = |x: usize| sorted.binary_search(&x).expect("closed subset");
        let mut mul = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                mul[i * n + j] = pos(self.mul(sorted[i], sorted[j]));
            }
        }
        let sub = FiniteGroup::from_table(format!("sub({})", self.name), n, mul)?;
        Ok((sub, sorted))
    }
}

/// Parses the group descriptor mini-language: `Cn`, `CnxCm[x...]`, `Dn`, `Q8`, `table:<path>`.
pub fn make_group(spec: &str) -> Result<FiniteGroup> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix("table:") {
        return FiniteGroup::from_table_file(Path::new(path));
    }
    if spec == "Q8" {
        return Ok(FiniteGroup::quaternion());
    }
    if let Some(rest) = spec.strip_prefix('D') {
        let n = rest.parse::<usize>().map_err(|_| Error::Descriptor(spec.into()))?;
        return FiniteGroup::dihedral(n);
    }
    let orders = parse_cyclic_product(spec)?;
    let mut g = FiniteGroup::product_of_cyclics(&orders)?;
    g.name = spec.to_string();
    Ok(g)
}

/// Parses `Cn` or `CnxCm...` into the list of cyclic orders.
pub fn parse_cyclic_product(spec: &str) -> Result<Vec<usize>> {
    spec.split('x')
        .map(|part| {
            part.strip_prefix('C')
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::Descriptor(spec.into()))
        })
        .collect()
}

/// A homomorphism stored as its image table; source and target are supplied by the caller.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupHom {
    pub image: Vec<usize>,
}

impl GroupHom {
    pub fn identity(n: usize) -> Self {
        GroupHom { image: (0..n).collect() }
    }

    pub fn new(source: &FiniteGroup, target: &FiniteGroup, image: Vec<usize>) -> Result<Self> {
        if image.len() != source.order() {
            return Err(Error::NotHomomorphism("image table has wrong length".into()));
        }
        if image.iter().any(|&y| y >= target.order()) {
            return Err(Error::NotHomomorphism("image out of range".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if image[source.mul(a, b)] != target.mul(image[a], image[b]) {
                    return Err(Error::NotHomomorphism(format!("fails on ({a}, {b})")));
                }
            }
        }
        Ok(GroupHom { image })
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &GroupHom) -> GroupHom {
        GroupHom { image: first.image.iter().map(|&x| self.image[x]).collect() }
    }

    pub fn inverse(&self) -> GroupHom {
        let mut inv = vec![0; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            inv[y] = x;
        }
        GroupHom { image: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.image.len()];
        self.image.iter().all(|&y| y < seen.len() && !std::mem::replace(&mut seen[y], true))
    }
}

/// Extends generator images to a map by breadth-first search over words.
fn extend_from_generators(
    source: &FiniteGroup,
    target: &FiniteGroup,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; source.order()];
    map[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for (&g, &h) in gens.iter().zip(images) {
            let y = source.mul(x, g);
            let fy = target.mul(map[x], h);
            if map[y] == usize::MAX {
                map[y] = fy;
                queue.push_back(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    if map.contains(&usize::MAX) {
        return None;
    }
    for a in source.elements() {
        for b in source.elements() {
            if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                return None;
            }
        }
    }
    Some(map)
}

/// All homomorphisms `source → target`, found by searching generator images.
pub fn homomorphisms(source: &FiniteGroup, target: &FiniteGroup) -> Vec<GroupHom> {
    let gens = source.generators();
    let orders: Vec<usize> = gens.iter().map(|&g| source.element_order(g)).collect();
    let candidates: Vec<Vec<usize>> = orders
        .iter()
        .map(|&k| target.elements().filter(|&y| k % target.element_order(y) == 0).collect())
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    loop {
        let images: Vec<usize> = choice.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
        if let Some(map) = extend_from_generators(source, target, &gens, &images) {
            out.push(GroupHom { image: map });
        }
        let mut k = 0;
        loop {
            if k == gens.len() {
                out.sort();
                return out;
            }
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// All isomorphisms `source → target`, sorted by image table.
pub fn isomorphisms(source: &FiniteGroup, target: &FiniteGroup) -> Result<Vec<GroupHom>> {
    let cap = DEFAULT_CAP.max(source.order());
    check_cap("isomorphism search", source.order(), cap)?;
    if source.order() != target.order() {
        return Ok(Vec::new());
    }
    let gens = source.generators();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let k = source.element_order(g);
            target.elements().filter(|&y| target.element_order(y) == k).collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    'outer: loop {
        let images: Vec<usize> = choice.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
        if let Some(map) = extend_from_generators(source, target, &gens, &images) {
            let hom = GroupHom { image: map };
            if hom.is_bijective() {
                out.push(hom);
            }
        }
        let mut k = 0;
        loop {
            if k == gens.len() {
                break 'outer;
            }
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
    out.sort();
    Ok(out)
}

pub fn automorphisms(g: &FiniteGroup) -> Result<Vec<GroupHom>> {
    automorphisms_with_cap(g, DEFAULT_CAP)
}

pub fn automorphisms_with_cap(g: &FiniteGroup, cap: usize) -> Result<Vec<GroupHom>> {
    check_cap("automorphism search", g.order(), cap)?;
    isomorphisms(g, g)
}

pub(crate) fn check_cap(what: &str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded { what: what.into(), size, cap })
    } else {
        Ok(())
    }
}

/// A faithful grading `E → G` with kernel `B` and a chosen section.
#[derive(Clone, Debug)]
pub struct GradingSurjection {
    pub total: FiniteGroup,
    pub grading: FiniteGroup,
    pub proj: GroupHom,
    pub kernel: Vec<usize>,
    pub section: Vec<usize>,
}

impl GradingSurjection {
    /// Builds a grading from an explicit surjective homomorphism onto `grading`.
    pub fn from_projection(total: FiniteGroup, grading: FiniteGroup, proj: Vec<usize>) -> Result<Self> {
        let proj = GroupHom::new(&total, &grading, proj)?;
        let mut section = vec![usize::MAX; grading.order()];
        for x in total.elements() {
            let g = proj.apply(x);
            if section[g] == usize::MAX {
                section[g] = x;
            }
        }
        if section.contains(&usize::MAX) {
            return Err(Error::NotHomomorphism("projection is not surjective".into()));
        }
        let kernel = total.elements().filter(|&x| proj.apply(x) == 0).collect();
        Ok(GradingSurjection { total, grading, proj, kernel, section })
    }

    /// The trivial grading `E → C1`.
    pub fn trivial(total: FiniteGroup) -> Self {
        let n = total.order();
        GradingSurjection::from_projection(total, FiniteGroup::trivial(), vec![0; n])
            .expect("constant map onto the trivial group")
    }

    pub fn degree(&self, x: usize) -> usize {
        self.proj.apply(x)
    }

    pub fn fiber(&self, g: usize) -> Vec<usize> {
        self.total.elements().filter(|&x| self.proj.apply(x) == g).collect()
    }

    pub fn in_kernel(&self, x: usize) -> bool {
        self.proj.apply(x) == 0
    }

    /// The kernel as a group together with its embedding into `total`.
    pub fn kernel_group(&self) -> (FiniteGroup, Vec<usize>) {
        self.total.subgroup(&self.kernel).expect("kernel is a subgroup")
    }
}

/// Quotient `E → E/B`; cosets are numbered by their smallest element.
pub fn quotient(e: &FiniteGroup, b: &[usize]) -> Result<GradingSurjection> {
    let b = e.check_subgroup(b)?;
    for g in e.elements() {
        for &x in &b {
            if b.binary_search(&e.conj(g, x)).is_err() {
                return Err(Error::NotNormal { conjugator: g, element: x });
            }
        }
    }
    let mut coset_of = vec![usize::MAX; e.order()];
    let mut reps = Vec::new();
    for g in e.elements() {
        if coset_of[g] == usize::MAX {
            let idx = reps.len();
            reps.push(g);
            for &x in &b {
                coset_of[e.mul(g, x)] = idx;
            }
        }
    }
    let k = reps.len();
    let mut mul = vec![0; k * k];
    for i in 0..k {
        for j in 0..k {
            mul[i * k + j] = coset_of[e.mul(reps[i], reps[j])];
        }
    }
    let grading = FiniteGroup::from_table(format!("{}/B", e.name()), k, mul)?;
    GradingSurjection::from_projection(e.clone(), grading, coset_of)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors() {
        assert_eq!(make_group("C1").unwrap().order(), 1);
        let g = make_group("C3xC3").unwrap();
        assert_eq!(g.order(), 9);
        assert!(g.is_abelian());
        assert!(g.elements().all(|x| g.pow(x, 3) == 0));
        assert!(make_group("D5").is_err());
        assert!(!make_group("Q8").unwrap().is_abelian());
        assert!(make_group("Q7").is_err());
        assert!(make_group("C0").is_err());
    }

    #[test]
    fn dihedral_presentation() {
        let d = make_group("D6").unwrap();
        let (r, s) = (1, 3);
        assert!(!d.is_abelian());
        assert_eq!(d.element_order(r), 3);
        assert_eq!(d.element_order(s), 2);
        assert_eq!(d.mul(d.mul(s, r), s), d.inv(r));
        assert_eq!(d.generated(&[r, s]).len(), 6);
    }

    #[test]
    fn bad_table_reports_triple() {
        // 0 is identity but 1·1 = 2 and 2·2 = 0 on a set of 3 with 1·2 = 1 breaks associativity
        let mul = vec![0, 1, 2, 1, 2, 1, 2, 1, 0];
        let err = FiniteGroup::from_table("bad", 3, mul).unwrap_err();
        assert!(err.to_string().contains("associativity") || err.to_string().contains("inverse"));
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&make_group("C1").unwrap()).unwrap().len(), 1);
        // |GL2(F3)| = (9 - 1)(9 - 3)
        assert_eq!(automorphisms(&make_group("C3xC3").unwrap()).unwrap().len(), (9 - 1) * (9 - 3));
        let d6 = make_group("D6").unwrap();
        assert_eq!(d6.center(), vec![0]);
        assert_eq!(automorphisms(&d6).unwrap().len(), 6);
        assert_eq!(automorphisms(&make_group("C4").unwrap()).unwrap().len(), 2);
        assert_eq!(automorphisms(&make_group("C2xC2").unwrap()).unwrap().len(), 6);
        assert_eq!(automorphisms(&make_group("D8").unwrap()).unwrap().len(), 8);
        assert_eq!(automorphisms(&make_group("Q8").unwrap()).unwrap().len(), 24);
        assert_eq!(automorphisms(&make_group("C2xC2xC2").unwrap()).unwrap().len(), 168);
    }

    #[test]
    fn automorphisms_form_a_group() {
        for spec in ["C6", "D6", "C2xC4", "D8"] {
            let g = make_group(spec).unwrap();
            let auts = automorphisms(&g).unwrap();
            assert!(auts.contains(&GroupHom::identity(g.order())));
            for a in &auts {
                assert!(auts.binary_search(&a.inverse()).is_ok());
                for b in &auts {
                    assert!(auts.binary_search(&a.after(b)).is_ok());
                }
            }
        }
    }

    #[test]
    fn automorphism_cap() {
        let g = make_group("C3xC3").unwrap();
        assert!(matches!(automorphisms_with_cap(&g, 8), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn quotients() {
        let d6 = make_group("D6").unwrap();
        let q = quotient(&d6, &[0, 1, 2]).unwrap();
        assert_eq!(q.grading.order(), 2);
        assert!((0..2).all(|g| q.fiber(g).len() == 3));
        assert_eq!(q.section[0], 0);

        let c33 = make_group("C3xC3").unwrap();
        // second factor = multiples of 3 in the mixed-radix index
        let q = quotient(&c33, &[0, 3, 6]).unwrap();
        assert_eq!(q.grading.order(), 3);

        let c4 = make_group("C4").unwrap();
        let q = quotient(&c4, &[0, 2]).unwrap();
        assert_eq!(q.grading.order(), 2);
        for &b in &q.kernel {
            assert_eq!(q.degree(b), 0);
        }
    }

    #[test]
    fn quotient_errors() {
        let d6 = make_group("D6").unwrap();
        assert!(matches!(quotient(&d6, &[0, 3]), Err(Error::NotNormal { .. })));
        assert!(matches!(quotient(&d6, &[0, 1]), Err(Error::NotSubgroup(_))));
    }

    #[test]
    fn table_file_roundtrip() {
        let g = make_group("D6").unwrap();
        let dir = std::env::temp_dir().join(format!("gradeq-table-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("d6.txt");
        let mut text = format!("{}\n", g.order());
        for a in g.elements() {
            let row: Vec<String> = g.elements().map(|b| g.mul(a, b).to_string()).collect();
            text.push_str(&row.join(" "));
            text.push('\n');
        }
        std::fs::write(&path, text).unwrap();
        let h = make_group(&format!("table:{}", path.display())).unwrap();
        assert_eq!(h.table(), g.table());
    }
}
