//! Exact linear algebra over `Z/N`.
//!
//! Everything in the cohomology engine reduces to Smith normal form of a
//! matrix over the principal ideal ring `Z/N`: image orders, kernels,
//! solving `A x = b`, and the structure of a quotient module. Entries are kept
//! in `[0, N)`; unimodular 2×2 Bezout steps keep every intermediate bounded.

use num_bigint::BigUint;

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Returns `(g, s, t)` with `s·a + t·b = g = gcd(a, b)`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

#[inline]
pub fn md(x: i64, n: i64) -> i64 {
    x.rem_euclid(n)
}

/// Solves `a·y ≡ b (mod n)`; returns one solution if it exists.
pub fn solve_linear(a: i64, b: i64, n: i64) -> Option<i64> {
    let (a, b) = (md(a, n), md(b, n));
    let g = gcd(a, n);
    if b % g != 0 {
        return None;
    }
    let (n_red, a_red, b_red) = (n / g, a / g, b / g);
    if n_red == 1 {
        return Some(0);
    }
    let (_, s, _) = ext_gcd(a_red, n_red);
    Some(md((md(s, n_red) as i128 * b_red as i128 % n_red as i128) as i64, n_red))
}

/// Dense row-major matrix with entries in `[0, N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMatrix {
    pub rows: usize,
    pub cols: usize,
    pub modulus: i64,
    pub data: Vec<i64>,
}

impl ZMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: i64) -> Self {
        assert!(modulus >= 1 && modulus < (1 << 31), "modulus out of supported range");
        ZMatrix { rows, cols, modulus, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, modulus: i64) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_columns(rows: usize, modulus: i64, columns: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len(), modulus);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = md(v, self.modulus);
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: i64) {
        let n = self.modulus;
        let e = &mut self.data[i * self.cols + j];
        *e = md(*e + md(v, n), n);
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, x: &[i64]) -> Vec<i64> {
        let n = self.modulus as i128;
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                (row.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum::<i128>()).rem_euclid(n)
                    as i64
            })
            .collect()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// rows (i, j) ← (s·ri + t·rj, u·ri + v·rj)
    fn mix_rows(&mut self, i: usize, j: usize, [s, t, u, v]: [i64; 4], from: usize) {
        let n = self.modulus as i128;
        let c = self.cols;
        for k in from..c {
            let (a, b) = (self.data[i * c + k] as i128, self.data[j * c + k] as i128);
            if a == 0 && b == 0 {
                continue;
            }
            self.data[i * c + k] = (s as i128 * a + t as i128 * b).rem_euclid(n) as i64;
            self.data[j * c + k] = (u as i128 * a + v as i128 * b).rem_euclid(n) as i64;
        }
    }

    /// cols (i, j) ← (s·ci + t·cj, u·ci + v·cj)
    fn mix_cols(&mut self, i: usize, j: usize, [s, t, u, v]: [i64; 4], from: usize) {
        let n = self.modulus as i128;
        let c = self.cols;
        for r in from..self.rows {
            let (a, b) = (self.data[r * c + i] as i128, self.data[r * c + j] as i128);
            if a == 0 && b == 0 {
                continue;
            }
            self.data[r * c + i] = (s as i128 * a + t as i128 * b).rem_euclid(n) as i64;
            self.data[r * c + j] = (u as i128 * a + v as i128 * b).rem_euclid(n) as i64;
        }
    }
}

/// A recorded row operation, replayable on vectors.
#[derive(Clone, Copy, Debug)]
pub enum RowOp {
    Swap(usize, usize),
    Mix(usize, usize, [i64; 4]),
}

impl RowOp {
    pub fn apply(&self, v: &mut [i64], modulus: i64) {
        match *self {
            RowOp::Swap(i, j) => v.swap(i, j),
            RowOp::Mix(i, j, [s, t, u, w]) => {
                let n = modulus as i128;
                let (a, b) = (v[i] as i128, v[j] as i128);
                v[i] = (s as i128 * a + t as i128 * b).rem_euclid(n) as i64;
                v[j] = (u as i128 * a + w as i128 * b).rem_euclid(n) as i64;
            }
        }
    }

    /// `x ↦ xᵀ·E` for the elementary matrix `E` of this operation.
    pub fn apply_transposed(&self, x: &mut [i64], modulus: i64) {
        match *self {
            RowOp::Swap(i, j) => x.swap(i, j),
            RowOp::Mix(i, j, [s, t, u, w]) => {
                let n = modulus as i128;
                let (a, b) = (x[i] as i128, x[j] as i128);
                x[i] = (a * s as i128 + b * u as i128).rem_euclid(n) as i64;
                x[j] = (a * t as i128 + b * w as i128).rem_euclid(n) as i64;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SmithOptions {
    /// Track `Q` with `P·A·Q = S`.
    pub col_transform: bool,
    /// Track `P⁻¹`.
    pub left_inverse: bool,
    /// Record row operations so `P·v` can be replayed later.
    pub log: bool,
}

/// Smith form `P·A·Q = S` over `Z/N`. The diagonal need not form a divisibility
/// chain; only the ideals `(gcd(sᵢ, N))` matter to callers.
#[derive(Clone, Debug)]
pub struct Smith {
    pub rows: usize,
    pub cols: usize,
    pub modulus: i64,
    /// `gcd(sᵢ, N)` for `i < rank_bound`; positions past the end are zero.
    pub diag: Vec<i64>,
    /// The pivot entries `sᵢ` themselves.
    pub pivots: Vec<i64>,
    pub q: Option<ZMatrix>,
    pub p_inv: Option<ZMatrix>,
    pub log: Option<Vec<RowOp>>,
    /// `P·B` for the augmented columns.
    pub augmented: Option<ZMatrix>,
}

impl Smith {
    pub fn compute(a: &ZMatrix, opts: SmithOptions) -> Smith {
        Self::compute_augmented(a, None, opts)
    }

    pub fn compute_augmented(a: &ZMatrix, aug: Option<&ZMatrix>, opts: SmithOptions) -> Smith {
        let n = a.modulus;
        let (rows, cols) = (a.rows, a.cols);
        let mut m = a.clone();
        let mut aug = aug.cloned();
        if let Some(b) = &aug {
            assert_eq!(b.rows, rows);
            assert_eq!(b.modulus, n);
        }
        let mut q = opts.col_transform.then(|| ZMatrix::identity(cols, n));
        let mut p_inv = opts.left_inverse.then(|| ZMatrix::identity(rows, n));
        let mut log = opts.log.then(Vec::new);
        let mut diag = Vec::new();
        let mut pivots = Vec::new();

        let row_op = |m: &mut ZMatrix,
                          aug: &mut Option<ZMatrix>,
                          p_inv: &mut Option<ZMatrix>,
                          log: &mut Option<Vec<RowOp>>,
                          op: RowOp,
                          from: usize| {
            match op {
                RowOp::Swap(i, j) => {
                    m.swap_rows(i, j);
                    if let Some(b) = aug {
                        b.swap_rows(i, j);
                    }
                    if let Some(p) = p_inv {
                        p.swap_cols(i, j);
                    }
                }
                RowOp::Mix(i, j, [s, t, u, v]) => {
                    m.mix_rows(i, j, [s, t, u, v], from);
                    if let Some(b) = aug {
                        b.mix_rows(i, j, [s, t, u, v], 0);
                    }
                    if let Some(p) = p_inv {
                        // inverse of [[s, t], [u, v]] with determinant 1
                        p.mix_cols(i, j, [v, -u, -t, s], 0);
                    }
                }
            }
            if let Some(l) = log {
                l.push(op);
            }
        };

        for t in 0..rows.min(cols) {
            // pivot: nonzero entry generating the largest ideal
            let mut best: Option<(i64, usize, usize)> = None;
            'search: for i in t..rows {
                let row = &m.data[i * cols..(i + 1) * cols];
                for (j, &v) in row.iter().enumerate().skip(t) {
                    if v != 0 {
                        let g = gcd(v, n);
                        if best.map_or(true, |(bg, _, _)| g < bg) {
                            best = Some((g, i, j));
                            if g == 1 {
                                break 'search;
                            }
                        }
                    }
                }
            }
            let Some((_, pi, pj)) = best else { break };
            if pi != t {
                row_op(&mut m, &mut aug, &mut p_inv, &mut log, RowOp::Swap(pi, t), 0);
            }
            if pj != t {
                m.swap_cols(pj, t);
                if let Some(q) = &mut q {
                    q.swap_cols(pj, t);
                }
            }
            loop {
                let mut dirty = false;
                for i in t + 1..rows {
                    let b = m.get(i, t);
                    if b == 0 {
                        continue;
                    }
                    let a = m.get(t, t);
                    let op = if a != 0 && b % a == 0 {
                        [1, 0, -(b / a), 1]
                    } else {
                        let (g, s, tt) = ext_gcd(a, b);
                        [s, tt, -(b / g), a / g]
                    };
                    row_op(&mut m, &mut aug, &mut p_inv, &mut log, RowOp::Mix(t, i, op), t);
                }
                for j in t + 1..cols {
                    let b = m.get(t, j);
                    if b == 0 {
                        continue;
                    }
                    let a = m.get(t, t);
                    let op = if a != 0 && b % a == 0 {
                        [1, 0, -(b / a), 1]
                    } else {
                        dirty = true;
                        let (g, s, tt) = ext_gcd(a, b);
                        [s, tt, -(b / g), a / g]
                    };
                    m.mix_cols(t, j, op, t);
                    if let Some(q) = &mut q {
                        q.mix_cols(t, j, op, 0);
                    }
                }
                if !dirty || (t + 1..rows).all(|i| m.get(i, t) == 0) {
                    break;
                }
            }
            pivots.push(m.get(t, t));
            diag.push(gcd(m.get(t, t), n));
        }
        // an all-zero trailing block leaves diag short; zero pivots mean gcd = N
        Smith { rows, cols, modulus: n, diag, pivots, q, p_inv, log, augmented: aug }
    }

    /// `gcd(sᵢ, N)` with implicit zeros past the computed diagonal.
    pub fn ideal(&self, i: usize) -> i64 {
        self.diag.get(i).copied().unwrap_or(self.modulus)
    }

    /// Order of the column span of `A` inside `(Z/N)^rows`.
    pub fn image_order(&self) -> BigUint {
        self.diag
            .iter()
            .fold(BigUint::from(1u32), |acc, &g| acc * BigUint::from((self.modulus / g) as u64))
    }

    /// Generators of `{x : A x = 0}`; requires the column transform.
    pub fn kernel_generators(&self) -> Vec<Vec<i64>> {
        let q = self.q.as_ref().expect("kernel needs the column transform");
        let n = self.modulus;
        (0..self.cols)
            .filter_map(|i| {
                let g = self.ideal(i);
                if g == 1 {
                    return None;
                }
                let scale = n / g;
                Some(q.column(i).into_iter().map(|v| md(v * scale, n)).collect())
            })
            .collect()
    }

    /// Solves `A x = b` given `P b`; requires the column transform.
    pub fn solve_transformed(&self, pb: &[i64]) -> Option<Vec<i64>> {
        let q = self.q.as_ref().expect("solve needs the column transform");
        let n = self.modulus;
        let mut y = vec![0i64; self.cols];
        for (i, &v) in pb.iter().enumerate() {
            if i < self.diag.len() {
                y[i] = solve_linear(self.pivots[i], v, n)?;
            } else if md(v, n) != 0 {
                return None;
            }
        }
        Some(q.mul_vec(&y))
    }

    /// Row `i` of `P`, by replaying the recorded operations backwards.
    pub fn p_row(&self, i: usize) -> Vec<i64> {
        let log = self.log.as_ref().expect("row operations were not recorded");
        let mut x = vec![0i64; self.rows];
        x[i] = 1;
        for op in log.iter().rev() {
            op.apply_transposed(&mut x, self.modulus);
        }
        x
    }

    /// Replays the recorded row operations: returns `P v`.
    pub fn apply_p(&self, v: &[i64]) -> Vec<i64> {
        let log = self.log.as_ref().expect("row operations were not recorded");
        let mut w: Vec<i64> = v.iter().map(|&x| md(x, self.modulus)).collect();
        for op in log {
            op.apply(&mut w, self.modulus);
        }
        w
    }
}

/// Solves `A x = b` for each column `b` of `rhs`.
pub fn solve_many(a: &ZMatrix, rhs: &ZMatrix) -> Vec<Option<Vec<i64>>> {
    let smith = Smith::compute_augmented(
        a,
        Some(rhs),
        SmithOptions { col_transform: true, ..Default::default() },
    );
    let pb = smith.augmented.as_ref().expect("augmented");
    (0..rhs.cols).map(|j| smith.solve_transformed(&pb.column(j))).collect()
}

/// A cyclic summand of a finite `Z/N`-module with an explicit generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicFactor {
    pub order: i64,
    pub generator: Vec<i64>,
}

/// Structure of `(Z/N)^r / span(columns of R)`: invariant factors in
/// ascending divisibility order, each with a generator in `(Z/N)^r`.
pub fn quotient_structure(relations: &ZMatrix) -> Vec<CyclicFactor> {
    let n = relations.modulus;
    let smith = Smith::compute(relations, SmithOptions { left_inverse: true, ..Default::default() });
    let p_inv = smith.p_inv.as_ref().expect("left inverse");
    let cyclic: Vec<CyclicFactor> = (0..relations.rows)
        .filter_map(|i| {
            let g = smith.ideal(i);
            (g > 1).then(|| CyclicFactor { order: g, generator: p_inv.column(i) })
        })
        .collect();
    to_invariant_factors(&cyclic, n)
}

fn prime_powers(mut x: i64) -> Vec<(i64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= x {
        if x % p == 0 {
            let mut e = 0;
            while x % p == 0 {
                x /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

/// Recombines cyclic summands into invariant-factor form `d₁ | d₂ | …`.
pub fn to_invariant_factors(cyclic: &[CyclicFactor], modulus: i64) -> Vec<CyclicFactor> {
    use std::collections::BTreeMap;
    let mut primary: BTreeMap<i64, Vec<(u32, Vec<i64>)>> = BTreeMap::new();
    for f in cyclic {
        for (p, e) in prime_powers(f.order) {
            let scale = f.order / p.pow(e);
            let gen = f.generator.iter().map(|&v| md(v * scale, modulus)).collect();
            primary.entry(p).or_default().push((e, gen));
        }
    }
    for list in primary.values_mut() {
        list.sort_by(|a, b| b.0.cmp(&a.0));
    }
    let count = primary.values().map(Vec::len).max().unwrap_or(0);
    let dim = cyclic.first().map_or(0, |f| f.generator.len());
    let mut out: Vec<CyclicFactor> = (0..count)
        .map(|j| {
            let mut order = 1;
            let mut gen = vec![0; dim];
            for (&p, list) in &primary {
                if let Some((e, g)) = list.get(j) {
                    order *= p.pow(*e);
                    for (acc, &v) in gen.iter_mut().zip(g) {
                        *acc = md(*acc + v, modulus);
                    }
                }
            }
            CyclicFactor { order, generator: gen }
        })
        .collect();
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_span_size(a: &ZMatrix) -> usize {
        let n = a.modulus as usize;
        let mut seen = std::collections::HashSet::new();
        let total = n.pow(a.cols as u32);
        for code in 0..total {
            let mut x = vec![0i64; a.cols];
            let mut c = code;
            for v in x.iter_mut() {
                *v = (c % n) as i64;
                c /= n;
            }
            seen.insert(a.mul_vec(&x));
        }
        seen.len()
    }

    #[test]
    fn p_rows_match_replay() {
        let a = ZMatrix::from_columns(3, 12, &[vec![2, 4, 6], vec![3, 9, 1], vec![0, 6, 6]]);
        let s = Smith::compute(&a, SmithOptions { log: true, ..Default::default() });
        let v = vec![5, 7, 11];
        let pv = s.apply_p(&v);
        for i in 0..3 {
            let row = s.p_row(i);
            let dot: i64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert_eq!(md(dot, 12), pv[i]);
        }
    }

    #[test]
    fn ext_gcd_identity() {
        for a in -20..20 {
            for b in -20..20 {
                let (g, s, t) = ext_gcd(a, b);
                assert_eq!(g, gcd(a, b));
                assert_eq!(s * a + t * b, g);
            }
        }
    }

    #[test]
    fn image_order_matches_enumeration() {
        let cases: Vec<(i64, usize, usize, Vec<i64>)> = vec![
            (6, 2, 2, vec![2, 3, 4, 0]),
            (12, 3, 2, vec![4, 6, 3, 0, 8, 9]),
            (9, 2, 3, vec![3, 6, 0, 0, 3, 6]),
            (8, 3, 3, vec![2, 4, 6, 4, 0, 2, 6, 4, 2]),
        ];
        for (n, r, c, data) in cases {
            let a = ZMatrix { rows: r, cols: c, modulus: n, data };
            let s = Smith::compute(&a, SmithOptions::default());
            assert_eq!(s.image_order(), BigUint::from(brute_span_size(&a)), "{a:?}");
        }
    }

    #[test]
    fn kernel_and_solve() {
        let a = ZMatrix { rows: 2, cols: 3, modulus: 12, data: vec![2, 4, 6, 3, 0, 9] };
        let s = Smith::compute(&a, SmithOptions { col_transform: true, ..Default::default() });
        for k in s.kernel_generators() {
            assert!(a.mul_vec(&k).iter().all(|&v| v == 0));
        }
        let b = ZMatrix::from_columns(2, 12, &[a.mul_vec(&[1, 5, 7]), vec![1, 0]]);
        let sols = solve_many(&a, &b);
        let x = sols[0].as_ref().unwrap();
        assert_eq!(a.mul_vec(x), b.column(0));
        assert!(sols[1].is_none());
    }

    #[test]
    fn quotient_of_z12_squared() {
        // (Z/12)^2 / <(2, 0), (0, 3)> = Z/2 ⊕ Z/3 = Z/6
        let r = ZMatrix::from_columns(2, 12, &[vec![2, 0], vec![0, 3]]);
        let q = quotient_structure(&r);
        assert_eq!(q.iter().map(|f| f.order).collect::<Vec<_>>(), vec![6]);
        // (Z/4)^2 / <(2, 2)> = Z/2 ⊕ Z/4
        let r = ZMatrix::from_columns(2, 4, &[vec![2, 2]]);
        let q = quotient_structure(&r);
        assert_eq!(q.iter().map(|f| f.order).collect::<Vec<_>>(), vec![2, 4]);
    }

    #[test]
    fn replayed_log_matches_augmented() {
        let a = ZMatrix { rows: 3, cols: 2, modulus: 10, data: vec![4, 6, 2, 8, 5, 5] };
        let b = ZMatrix::from_columns(3, 10, &[vec![1, 2, 3]]);
        let s = Smith::compute_augmented(&a, Some(&b), SmithOptions { log: true, ..Default::default() });
        assert_eq!(s.apply_p(&[1, 2, 3]), s.augmented.unwrap().column(0));
    }
}
