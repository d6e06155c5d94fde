//! Finite abelian groups in invariant-factor form, their elements and characters.

use crate::error::{Error, Result};
use crate::group::{parse_cyclic_product, FiniteGroup};
use crate::zmod::{gcd, lcm, md};

/// `Z/d₁ ⊕ … ⊕ Z/d_k` with `d₁ | d₂ | … | d_k`, all `dᵢ ≥ 2`.
///
/// Elements are exponent vectors; the flat index is mixed radix with the
/// first factor least significant, matching [`FiniteGroup::product_of_cyclics`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    factors: Vec<i64>,
}

impl AbelianGroup {
    pub fn new(factors: Vec<i64>) -> Result<Self> {
        let factors: Vec<i64> = factors.into_iter().filter(|&d| d != 1).collect();
        if factors.iter().any(|&d| d < 1) {
            return Err(Error::Descriptor(format!("invalid invariant factors {factors:?}")));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Descriptor(format!("{factors:?} is not a divisibility chain")));
        }
        Ok(AbelianGroup { factors })
    }

    pub fn trivial() -> Self {
        AbelianGroup { factors: Vec::new() }
    }

    pub fn cyclic(n: i64) -> Self {
        Self::new(vec![n]).expect("cyclic group")
    }

    /// Normalizes arbitrary cyclic orders into invariant factors.
    pub fn from_orders(orders: &[i64]) -> Result<Self> {
        let mut factors: Vec<i64> = Vec::new();
        for &n in orders {
            if n < 1 {
                return Err(Error::Descriptor(format!("order {n}")));
            }
            // merge n into the chain: Z/a ⊕ Z/b ≅ Z/gcd ⊕ Z/lcm
            let mut carry = n;
            for f in factors.iter_mut() {
                let (g, l) = (gcd(*f, carry), lcm(*f, carry));
                *f = l;
                carry = g;
            }
            factors.push(carry);
            factors.sort_unstable();
        }
        Self::new(factors)
    }

    /// Parses `C1`, `Cn` or `CnxCm…` (normalized to invariant factors).
    pub fn from_descriptor(spec: &str) -> Result<Self> {
        let orders = parse_cyclic_product(spec)?;
        Self::from_orders(&orders.iter().map(|&n| n as i64).collect::<Vec<_>>())
    }

    pub fn factors(&self) -> &[i64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product::<i64>() as usize
    }

    /// Largest invariant factor (1 for the trivial group).
    pub fn exponent(&self) -> i64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn descriptor(&self) -> String {
        if self.factors.is_empty() {
            "C1".into()
        } else {
            self.factors.iter().map(|d| format!("C{d}")).collect::<Vec<_>>().join("x")
        }
    }

    pub fn as_group(&self) -> FiniteGroup {
        if self.factors.is_empty() {
            return FiniteGroup::trivial();
        }
        let orders: Vec<usize> = self.factors.iter().map(|&d| d as usize).collect();
        FiniteGroup::product_of_cyclics(&orders).expect("valid factors")
    }

    pub fn element(&self, mut index: usize) -> Vec<i64> {
        self.factors
            .iter()
            .map(|&d| {
                let x = (index % d as usize) as i64;
                index /= d as usize;
                x
            })
            .collect()
    }

    pub fn index(&self, x: &[i64]) -> usize {
        self.factors
            .iter()
            .zip(x)
            .rev()
            .fold(0usize, |acc, (&d, &v)| acc * d as usize + md(v, d) as usize)
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.rank()]
    }

    pub fn reduce(&self, x: &[i64]) -> Vec<i64> {
        x.iter().zip(&self.factors).map(|(&v, &d)| md(v, d)).collect()
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        x.iter().zip(y).zip(&self.factors).map(|((&a, &b), &d)| md(a + b, d)).collect()
    }

    pub fn neg(&self, x: &[i64]) -> Vec<i64> {
        x.iter().zip(&self.factors).map(|(&a, &d)| md(-a, d)).collect()
    }

    pub fn scale(&self, k: i64, x: &[i64]) -> Vec<i64> {
        x.iter().zip(&self.factors).map(|(&a, &d)| md(k * a, d)).collect()
    }

    pub fn is_zero(&self, x: &[i64]) -> bool {
        x.iter().zip(&self.factors).all(|(&a, &d)| md(a, d) == 0)
    }

    pub fn basis(&self, i: usize) -> Vec<i64> {
        let mut e = self.zero();
        e[i] = 1;
        e
    }

    pub fn element_order(&self, x: &[i64]) -> i64 {
        x.iter().zip(&self.factors).fold(1, |acc, (&a, &d)| lcm(acc, d / gcd(md(a, d), d)))
    }

    /// Direct sum with concatenated coordinates, if that is still a divisibility chain.
    pub fn direct_sum_concat(&self, other: &AbelianGroup) -> Option<AbelianGroup> {
        let mut f = self.factors.clone();
        f.extend_from_slice(&other.factors);
        AbelianGroup::new(f).ok()
    }

    /// Character pairing `⟨x, y⟩ = Σ xᵢ yᵢ (E/dᵢ) ∈ Z/E`, `E` the exponent.
    pub fn pairing(&self, x: &[i64], y: &[i64]) -> i64 {
        let e = self.exponent();
        md(
            x.iter().zip(y).zip(&self.factors).map(|((&a, &b), &d)| a * b % d * (e / d)).sum(),
            e,
        )
    }

    /// The character `x ↦ χ_y(β x)` written again as an element of the dual.
    pub fn precompose_character(&self, y: &[i64], beta: &Endo) -> Vec<i64> {
        let e = self.exponent();
        (0..self.rank())
            .map(|j| {
                let v = self.pairing(&beta.apply(self, &self.basis(j)), y);
                v * self.factors[j] / e
            })
            .collect()
    }
}

/// An endomorphism of an [`AbelianGroup`] as an integer matrix (column `j` is the image of `e_j`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Endo {
    pub rank: usize,
    pub matrix: Vec<i64>,
}

impl Endo {
    pub fn identity(rank: usize) -> Self {
        let mut matrix = vec![0; rank * rank];
        for i in 0..rank {
            matrix[i * rank + i] = 1;
        }
        Endo { rank, matrix }
    }

    pub fn scalar(rank: usize, k: i64) -> Self {
        let mut e = Self::identity(rank);
        e.matrix.iter_mut().for_each(|v| *v *= k);
        e
    }

    /// Builds the matrix from a function on elements; checks it is a homomorphism.
    pub fn from_fn(a: &AbelianGroup, f: impl Fn(&[i64]) -> Vec<i64>) -> Result<Self> {
        let k = a.rank();
        let mut matrix = vec![0; k * k];
        for j in 0..k {
            let img = a.reduce(&f(&a.basis(j)));
            for i in 0..k {
                matrix[i * k + j] = img[i];
            }
        }
        let endo = Endo { rank: k, matrix };
        for x in a.elements() {
            if a.reduce(&f(&x)) != endo.apply(a, &x) {
                return Err(Error::NotHomomorphism(format!("map disagrees with its linear extension at {x:?}")));
            }
        }
        Ok(endo)
    }

    pub fn apply(&self, a: &AbelianGroup, x: &[i64]) -> Vec<i64> {
        let k = self.rank;
        let y: Vec<i64> = (0..k).map(|i| (0..k).map(|j| self.matrix[i * k + j] * x[j]).sum()).collect();
        a.reduce(&y)
    }

    /// `self ∘ other`.
    pub fn compose(&self, a: &AbelianGroup, other: &Endo) -> Endo {
        Endo::from_fn(a, |x| self.apply(a, &other.apply(a, x))).expect("composition of homomorphisms")
    }

    pub fn is_bijective(&self, a: &AbelianGroup) -> bool {
        let mut seen = vec![false; a.order()];
        a.elements().all(|x| !std::mem::replace(&mut seen[a.index(&self.apply(a, &x))], true))
    }

    pub fn inverse(&self, a: &AbelianGroup) -> Option<Endo> {
        if !self.is_bijective(a) {
            return None;
        }
        let mut inv = vec![0usize; a.order()];
        for x in a.elements() {
            inv[a.index(&self.apply(a, &x))] = a.index(&x);
        }
        Endo::from_fn(a, |x| a.element(inv[a.index(x)])).ok()
    }

    /// `(α*)⁻¹` on the dual group: `χ ↦ χ ∘ α⁻¹`.
    pub fn dual_inverse(&self, a: &AbelianGroup) -> Option<Endo> {
        let inv = self.inverse(a)?;
        Endo::from_fn(a, |y| a.precompose_character(y, &inv)).ok()
    }

    /// Same table on all elements.
    pub fn agrees(&self, other: &Endo, a: &AbelianGroup) -> bool {
        a.elements().all(|x| self.apply(a, &x) == other.apply(a, &x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        assert_eq!(AbelianGroup::from_descriptor("C2xC3").unwrap().factors(), &[6]);
        assert_eq!(AbelianGroup::from_descriptor("C4xC2").unwrap().factors(), &[2, 4]);
        assert_eq!(AbelianGroup::from_descriptor("C1").unwrap().rank(), 0);
        assert!(AbelianGroup::new(vec![3, 2]).is_err());
    }

    #[test]
    fn indexing_matches_group() {
        let a = AbelianGroup::new(vec![2, 4]).unwrap();
        let g = a.as_group();
        for i in 0..a.order() {
            assert_eq!(a.index(&a.element(i)), i);
            for j in 0..a.order() {
                assert_eq!(a.index(&a.add(&a.element(i), &a.element(j))), g.mul(i, j));
            }
        }
    }

    #[test]
    fn pairing_is_perfect() {
        let a = AbelianGroup::new(vec![2, 4]).unwrap();
        for y in a.elements().filter(|y| !a.is_zero(y)) {
            assert!(a.elements().any(|x| a.pairing(&x, &y) != 0));
        }
    }

    #[test]
    fn dual_inverse_preserves_pairing() {
        let a = AbelianGroup::new(vec![3, 3]).unwrap();
        let alpha = Endo { rank: 2, matrix: vec![1, 1, 0, 1] };
        let dual = alpha.dual_inverse(&a).unwrap();
        for x in a.elements() {
            for y in a.elements() {
                assert_eq!(a.pairing(&alpha.apply(&a, &x), &dual.apply(&a, &y)), a.pairing(&x, &y));
            }
        }
    }
}
