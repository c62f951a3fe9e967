use std::fmt;

use super::Ring;

/// Dense row-major matrix over a ring.
#[derive(Clone, PartialEq)]
pub struct Matrix<K> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

impl<K: Ring> Matrix<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![K::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { K::one() } else { K::zero() })
    }

    pub fn scalar(n: usize, k: &K) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { k.clone() } else { K::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> K) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &K {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: K) {
        self.data[i * self.cols + j] = v;
    }

    pub fn map<L: Ring>(&self, f: impl Fn(&K) -> L) -> Matrix<L> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, k: &K) -> Self {
        self.map(|x| x.mul(k))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        out
    }

    pub fn trace(&self) -> K {
        (0..self.rows.min(self.cols)).fold(K::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Coefficients `[c_0, …, c_n]` of `det(λ·I - M) = Σ c_k λ^k`, computed
    /// by Berkowitz's division-free algorithm.
    pub fn charpoly(&self) -> Vec<K> {
        assert_eq!(self.rows, self.cols, "charpoly of a non-square matrix");
        let n = self.rows;
        // Coefficients from the top: v[0] = 1 (λ^m), v[1] λ^{m-1}, ...
        let mut v: Vec<K> = vec![K::one()];
        for r in 0..n {
            // Leading principal submatrix of size r+1; last row/col split off.
            let a = self.get(r, r).clone();
            let row: Vec<K> = (0..r).map(|j| self.get(r, j).clone()).collect();
            let col: Vec<K> = (0..r).map(|i| self.get(i, r).clone()).collect();
            // Toeplitz column: [1, -a, -R·C, -R·A·C, -R·A²·C, ...] of length r+2.
            let mut t = Vec::with_capacity(r + 2);
            t.push(K::one());
            t.push(a.neg());
            let mut cur = col;
            for _ in 0..r {
                let rc = row.iter().zip(&cur).fold(K::zero(), |acc, (x, y)| acc.add(&x.mul(y)));
                t.push(rc.neg());
                let mut next = vec![K::zero(); r];
                for (i, nx) in next.iter_mut().enumerate() {
                    for (j, cj) in cur.iter().enumerate() {
                        let m = self.get(i, j);
                        if !m.is_zero() && !cj.is_zero() {
                            *nx = nx.add(&m.mul(cj));
                        }
                    }
                }
                cur = next;
            }
            let mut nv = vec![K::zero(); r + 2];
            for (i, nvi) in nv.iter_mut().enumerate() {
                for (j, vj) in v.iter().enumerate() {
                    if i >= j && !vj.is_zero() {
                        let tij = &t[i - j];
                        if !tij.is_zero() {
                            *nvi = nvi.add(&tij.mul(vj));
                        }
                    }
                }
            }
            v = nv;
        }
        v.reverse();
        v
    }

    /// Determinant by Berkowitz; works over any commutative ring.
    pub fn det_berkowitz(&self) -> K {
        let c = self.charpoly();
        if self.rows.is_multiple_of(2) {
            c[0].clone()
        } else {
            c[0].neg()
        }
    }

    /// Determinant by Gaussian elimination with unit pivots; falls back to
    /// Berkowitz if some column has no recognisable unit.
    pub fn det(&self) -> K {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = K::one();
        for c in 0..n {
            let Some((piv, inv)) = (c..n).find_map(|r| m.get(r, c).inv().map(|i| (r, i))) else {
                if (c..n).all(|r| m.get(r, c).is_zero()) {
                    return K::zero();
                }
                return self.det_berkowitz();
            };
            if piv != c {
                for j in 0..n {
                    m.data.swap(piv * n + j, c * n + j);
                }
                det = det.neg();
            }
            let p = m.get(c, c).clone();
            det = det.mul(&p);
            for r in c + 1..n {
                let f = m.get(r, c).mul(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(r, j).sub(&f.mul(m.get(c, j)));
                    m.set(r, j, v);
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan with unit pivots, or via the adjugate from the
    /// characteristic polynomial when the determinant is a unit.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        self.inverse_gauss_jordan().or_else(|| self.inverse_adjugate())
    }

    fn inverse_gauss_jordan(&self) -> Option<Self> {
        let n = self.rows;
        let mut a = self.clone();
        let mut b = Self::identity(n);
        for c in 0..n {
            let (piv, inv) = (c..n).find_map(|r| a.get(r, c).inv().map(|i| (r, i)))?;
            if piv != c {
                for j in 0..n {
                    a.data.swap(piv * n + j, c * n + j);
                    b.data.swap(piv * n + j, c * n + j);
                }
            }
            for j in 0..n {
                let v = a.get(c, j).mul(&inv);
                a.set(c, j, v);
                let w = b.get(c, j).mul(&inv);
                b.set(c, j, w);
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a.get(r, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a.get(r, j).sub(&f.mul(a.get(c, j)));
                    a.set(r, j, v);
                    let w = b.get(r, j).sub(&f.mul(b.get(c, j)));
                    b.set(r, j, w);
                }
            }
        }
        Some(b)
    }

    fn inverse_adjugate(&self) -> Option<Self> {
        let n = self.rows;
        let c = self.charpoly();
        let det = if n.is_multiple_of(2) { c[0].clone() } else { c[0].neg() };
        let dinv = det.inv()?;
        // adj(M) = (-1)^{n+1} (M^{n-1} + c_{n-1} M^{n-2} + ... + c_1 I)
        let mut acc = Self::identity(n);
        for k in (1..n).rev() {
            acc = acc.mul(self).add(&Self::scalar(n, &c[k]));
        }
        let sign = if n % 2 == 1 { K::one() } else { K::one().neg() };
        Some(acc.scale(&sign.mul(&dinv)))
    }

    /// Inverse for call sites where invertibility is an internal invariant.
    pub fn inverse_unchecked(&self) -> Self {
        self.inverse().expect("internal invariant: matrix is invertible")
    }
}

impl<K: Ring> fmt::Debug for Matrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, Rat, UPoly};

    fn m(v: &[&[i64]]) -> Matrix<Rat> {
        Matrix::from_fn(v.len(), v[0].len(), |i, j| int(v[i][j]))
    }

    /// Permutation-expansion determinant as an independent oracle.
    fn leibniz(a: &Matrix<Rat>) -> Rat {
        fn rec(a: &Matrix<Rat>, row: usize, used: &mut Vec<bool>, sign: i64) -> Rat {
            let n = a.rows();
            if row == n {
                return int(sign);
            }
            let mut acc = int(0);
            for c in 0..n {
                if used[c] {
                    continue;
                }
                let s = if (0..c).filter(|&k| !used[k]).count() % 2 == 0 { sign } else { -sign };
                used[c] = true;
                let sub = rec(a, row + 1, used, s);
                used[c] = false;
                acc += a.get(row, c) * sub;
            }
            acc
        }
        rec(a, 0, &mut vec![false; a.rows()], 1)
    }

    #[test]
    fn determinant_routes_agree() {
        let a = m(&[&[2, -1, 0, 3], &[1, 4, 2, 0], &[0, 5, -2, 1], &[3, 0, 1, 1]]);
        let d = leibniz(&a);
        assert_eq!(a.det(), d);
        assert_eq!(a.det_berkowitz(), d);
        let inv = a.inverse().unwrap();
        assert_eq!(inv.mul(&a), Matrix::identity(4));
        assert_eq!(a.inverse_adjugate().unwrap(), inv);
    }

    #[test]
    fn charpoly_of_companion() {
        // companion matrix of λ^3 - 2λ^2 + 3λ - 5
        let c = m(&[&[0, 0, 5], &[1, 0, -3], &[0, 1, 2]]);
        assert_eq!(c.charpoly(), vec![int(-5), int(3), int(-2), int(1)]);
        let nil = m(&[&[0, 0], &[1, 0]]);
        assert_eq!(nil.charpoly(), vec![int(0), int(0), int(1)]);
    }

    #[test]
    fn polynomial_entries() {
        type P = UPoly<Rat>;
        let x = P::var();
        let a = Matrix::from_fn(2, 2, |i, j| if i == j { x.clone() } else { P::from_i64(1) });
        assert_eq!(a.det(), x.mul(&x).sub(&P::one()));
        assert!(Matrix::<Rat>::identity(3).det_berkowitz().is_one());
    }
}
