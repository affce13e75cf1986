use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }
    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }
    pub fn with_cols(cols: usize, rows: Vec<Vec<BigInt>>) -> IntMatrix {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r);
        }
        IntMatrix { rows: n, cols, data }
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }
    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows);
        let mut m = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        m[(i, j)] += a * b;
                    }
                }
            }
        }
        m
    }
    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
    /// Row vector times matrix.
    pub fn vec_mul(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.rows, x.len());
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            if !v.is_zero() {
                self.data[dst * self.cols + j] += v;
            }
        }
    }
    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            if !v.is_zero() {
                self.data[i * self.cols + dst] += v;
            }
        }
    }
    fn neg_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}
impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", r.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_string()).collect()).collect();
        serde_json::json!({"cols": self.cols, "rows": rows}).serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<IntMatrix, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            cols: usize,
            rows: Vec<Vec<String>>,
        }
        let raw = Raw::deserialize(d)?;
        let rows: Result<Vec<Vec<BigInt>>, _> =
            raw.rows.iter().map(|r| r.iter().map(|x| x.parse::<BigInt>()).collect()).collect();
        let rows = rows.map_err(serde::de::Error::custom)?;
        if rows.iter().any(|r| r.len() != raw.cols) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(IntMatrix::with_cols(raw.cols, rows))
    }
}

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal with
/// d₁ | d₂ | … and all dᵢ ≥ 0. `v_inv` is the inverse of `v`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Snf {
    pub d: IntMatrix,
    pub u: Option<IntMatrix>,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Snf {
    /// Diagonal entries (length min(rows, cols)).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).collect()
    }
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form with both transforms.
pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    snf_impl(a, true)
}

/// Smith normal form tracking only the column transform (cheaper when the
/// matrix has many rows).
pub fn smith_columns(a: &IntMatrix) -> Snf {
    snf_impl(a, false)
}

fn snf_impl(a: &IntMatrix, track_u: bool) -> Snf {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = if track_u { Some(IntMatrix::identity(m)) } else { None };
    let mut v = IntMatrix::identity(n);
    let mut vi = IntMatrix::identity(n);

    macro_rules! row_add {
        ($dst:expr, $src:expr, $k:expr) => {{
            d.add_row($dst, $src, $k);
            if let Some(u) = u.as_mut() {
                u.add_row($dst, $src, $k);
            }
        }};
    }
    macro_rules! col_add {
        ($dst:expr, $src:expr, $k:expr) => {{
            d.add_col($dst, $src, $k);
            v.add_col($dst, $src, $k);
            // inverse: row[src] -= k * row[dst]
            vi.add_row($src, $dst, &-($k));
        }};
    }
    macro_rules! row_swap {
        ($a:expr, $b:expr) => {{
            d.swap_rows($a, $b);
            if let Some(u) = u.as_mut() {
                u.swap_rows($a, $b);
            }
        }};
    }
    macro_rules! col_swap {
        ($a:expr, $b:expr) => {{
            d.swap_cols($a, $b);
            v.swap_cols($a, $b);
            vi.swap_rows($a, $b);
        }};
    }

    let k = m.min(n);
    for t in 0..k {
        loop {
            // pivot of least absolute value in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &d[(i, j)];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                        if x.abs().is_one() {
                            break;
                        }
                    }
                }
                if best.is_some_and(|(bi, bj)| d[(bi, bj)].abs().is_one()) {
                    break;
                }
            }
            let Some((pi, pj)) = best else {
                return finish(d, u, v, vi);
            };
            row_swap!(t, pi);
            col_swap!(t, pj);
            let p = d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let nq = -d[(i, t)].div_floor(&p);
                row_add!(i, t, &nq);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let nq = -d[(t, j)].div_floor(&p);
                col_add!(j, t, &nq);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold a bad row into row t
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&p)));
            match bad {
                Some(i) => row_add!(t, i, &BigInt::one()),
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.neg_row(t);
            if let Some(u) = u.as_mut() {
                u.neg_row(t);
            }
        }
    }
    finish(d, u, v, vi)
}

fn finish(d: IntMatrix, u: Option<IntMatrix>, v: IntMatrix, vi: IntMatrix) -> Snf {
    Snf { d, u, v, v_inv: vi }
}

/// Abelian group ℤ^cols / rowspan(A).
#[derive(Clone, Debug)]
pub struct Cokernel {
    pub free_rank: usize,
    /// Invariant factors > 1.
    pub torsion: Vec<BigInt>,
    /// Invariant factor per coordinate (0 for free, 1 for trivial).
    pub factors: Vec<BigInt>,
    /// Coordinates of a generator vector x are x·V.
    pub v: IntMatrix,
    /// Row j of V⁻¹ is the generator vector of basis element j.
    pub v_inv: IntMatrix,
}

impl Cokernel {
    pub fn coords(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.v.vec_mul(x)
    }
    /// Whether x lies in the row span.
    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.coords(x).iter().zip(&self.factors).all(|(c, f)| if f.is_zero() { c.is_zero() } else { c.is_multiple_of(f) })
    }
}

pub fn cokernel_structure(a: &IntMatrix) -> Cokernel {
    let snf = smith_columns(a);
    let n = a.cols;
    let diag = snf.diagonal();
    let factors: Vec<BigInt> = (0..n).map(|j| diag.get(j).cloned().unwrap_or_else(BigInt::zero)).collect();
    let free_rank = factors.iter().filter(|f| f.is_zero()).count();
    let torsion = factors.iter().filter(|f| **f > BigInt::one()).cloned().collect();
    Cokernel { free_rank, torsion, factors, v: snf.v, v_inv: snf.v_inv }
}

/// Some x with A·x = b, or `None` if b is not in the column lattice.
/// Uses column-Hermite elimination.
pub fn member_solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len());
    let (m, n) = (a.rows, a.cols);
    let mut h = a.clone();
    let mut w = IntMatrix::identity(n);
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut c = 0;
    for i in 0..m {
        if c == n {
            break;
        }
        // Euclid on row i over columns c..n
        loop {
            let nz: Vec<usize> = (c..n).filter(|&j| !h[(i, j)].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let &j0 = nz.iter().min_by_key(|&&j| h[(i, j)].abs()).unwrap();
            h.swap_cols(c, j0);
            w.swap_cols(c, j0);
            if nz.len() == 1 {
                break;
            }
            let p = h[(i, c)].clone();
            for j in c + 1..n {
                if !h[(i, j)].is_zero() {
                    let q = h[(i, j)].div_floor(&p);
                    h.add_col(j, c, &-&q);
                    w.add_col(j, c, &-&q);
                }
            }
        }
        if !h[(i, c)].is_zero() {
            pivots.push((i, c));
            c += 1;
        }
    }
    let mut y = vec![BigInt::zero(); n];
    let mut pi = 0;
    for i in 0..m {
        let mut r = b[i].clone();
        for (j, yj) in y.iter().enumerate().take(c) {
            if !yj.is_zero() {
                r -= &h[(i, j)] * yj;
            }
        }
        if pi < pivots.len() && pivots[pi].0 == i {
            let col = pivots[pi].1;
            // r currently excludes the pivot column (y[col] is still 0)
            let (q, rem) = r.div_rem(&h[(i, col)]);
            if !rem.is_zero() {
                return None;
            }
            y[col] = q;
            pi += 1;
        } else if !r.is_zero() {
            return None;
        }
    }
    Some(w.mul_vec(&y))
}

/// Same contract as `member_solve`, computed through the Smith normal form.
pub fn member_solve_snf(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let ub = snf.u.as_ref().unwrap().mul_vec(b);
    let diag = snf.diagonal();
    let mut z = vec![BigInt::zero(); a.cols];
    for (i, ubi) in ub.iter().enumerate() {
        let di = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if di.is_zero() {
            if !ubi.is_zero() {
                return None;
            }
        } else {
            let (q, r) = ubi.div_rem(&di);
            if !r.is_zero() {
                return None;
            }
            z[i] = q;
        }
    }
    Some(snf.v.mul_vec(&z))
}

/// Reduced row echelon form of an augmented rational system `[A | b]`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<Vec<crate::Q>>,
    pub pivots: Vec<usize>,
    pub consistent: bool,
}

impl Rref {
    /// The unique solution, when the system is consistent and of full column rank.
    pub fn unique_solution(&self, n: usize) -> Option<Vec<crate::Q>> {
        if !self.consistent || self.pivots.len() != n {
            return None;
        }
        Some(self.rows.iter().map(|r| r[n].clone()).collect())
    }
}

/// Gauss-Jordan elimination on rows of length `n + 1`, the last entry being the right-hand side.
pub fn rational_rref(mut rows: Vec<Vec<crate::Q>>, n: usize) -> Rref {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pr = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let consistent = rows[r..].iter().all(|row| row[n].is_zero());
    rows.truncate(r);
    Rref { rows, pivots, consistent }
}

/// Checks `u·a·v = d`, unimodularity of `u` and `v`, `v·v_inv = I` and the
/// divisibility chain. Returns the first violated condition.
pub fn check_snf(a: &IntMatrix, s: &Snf) -> Result<(), String> {
    let u = s.u.as_ref().ok_or("row transform not tracked")?;
    if u.mul(a).mul(&s.v) != s.d {
        return Err("u·a·v differs from d".into());
    }
    if !s.d.is_diagonal() {
        return Err("d is not diagonal".into());
    }
    if u.det().abs() != BigInt::one() || s.v.det().abs() != BigInt::one() {
        return Err("transform is not unimodular".into());
    }
    if s.v.mul(&s.v_inv) != IntMatrix::identity(s.v.rows) {
        return Err("v_inv is not the inverse of v".into());
    }
    let diag = s.diagonal();
    if diag.iter().any(|x| x.is_negative()) {
        return Err("negative invariant factor".into());
    }
    for w in diag.windows(2) {
        let ok = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
        if !ok {
            return Err(format!("divisibility fails: {} does not divide {}", w[0], w[1]));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn displayed_presentation() {
        let a = m(&[vec![1, 0, 0], vec![2, 1, 0], vec![0, 1, 0], vec![0, -1, 3]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal(), vec![1.into(), 1.into(), BigInt::from(3)]);
        assert_eq!(s.u.as_ref().unwrap().mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn zero_matrix() {
        let s = smith_normal_form(&IntMatrix::zeros(3, 2));
        assert!(s.d.is_zero());
        assert_eq!(s.u.unwrap(), IntMatrix::identity(3));
        assert_eq!(s.v, IntMatrix::identity(2));
    }

    #[test]
    fn cokernel_small() {
        let c = cokernel_structure(&IntMatrix::zeros(0, 2));
        assert_eq!((c.free_rank, c.torsion.len()), (2, 0));
        let c = cokernel_structure(&m(&[vec![2]]));
        assert_eq!((c.free_rank, c.torsion.clone()), (0, vec![BigInt::from(2)]));
    }

    #[test]
    fn member_small() {
        let b = vec![BigInt::from(5), BigInt::from(-7)];
        assert_eq!(member_solve(&IntMatrix::identity(2), &b), Some(b.clone()));
        assert_eq!(member_solve(&m(&[vec![2]]), &[BigInt::one()]), None);
        assert_eq!(member_solve_snf(&m(&[vec![2]]), &[BigInt::one()]), None);
    }
}
