//! Dense linear algebra over any field: exact rationals, rational functions,
//! or floats.

use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::expr::complexity_cmp;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;

/// Field operations. Method names avoid clashing with `std::ops`.
pub trait Field: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    /// Division; `o` must be nonzero.
    fn over(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;

    /// True when `self` is the better pivot of the two. Exact fields prefer
    /// simple entries, floats prefer large magnitude.
    fn better_pivot(&self, _other: &Self) -> bool {
        false
    }
}

impl<T: Scalar> Field for T {
    fn zero() -> Self {
        <T as Zero>::zero()
    }
    fn one() -> Self {
        <T as One>::one()
    }
    fn from_i64(n: i64) -> Self {
        T::from_bigint(&n.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }
    fn minus(&self, o: &Self) -> Self {
        self.clone() - o.clone()
    }
    fn times(&self, o: &Self) -> Self {
        self.clone() * o.clone()
    }
    fn over(&self, o: &Self) -> Self {
        self.clone() / o.clone()
    }
    fn negate(&self) -> Self {
        -self.clone()
    }
    fn better_pivot(&self, other: &Self) -> bool {
        self.magnitude() > other.magnitude()
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn from_i64(n: i64) -> Self {
        RatFunc::from_int(n)
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn over(&self, o: &Self) -> Self {
        self.checked_div(o).expect("division by a nonzero pivot")
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn better_pivot(&self, other: &Self) -> bool {
        complexity_cmp(self, other) == std::cmp::Ordering::Less
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
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

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
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
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.plus(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.minus(b)).collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.times(s))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = F::zero();
            for k in 0..self.cols {
                let a = &self[(i, k)];
                let b = &o[(k, j)];
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.plus(&a.times(b));
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.plus(&a.times(b));
                    }
                }
                acc
            })
            .collect()
    }

    /// Stacks `blocks` vertically.
    pub fn vstack(blocks: &[Matrix<F>]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "column mismatch");
            data.extend(b.data.iter().cloned());
            rows += b.rows;
        }
        Matrix { rows, cols, data }
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best: Option<usize> = None;
            for i in r..m.rows {
                if m[(i, c)].is_zero() {
                    continue;
                }
                best = match best {
                    Some(b) if !m[(i, c)].better_pivot(&m[(b, c)]) => Some(b),
                    _ => Some(i),
                };
            }
            let Some(p) = best else { continue };
            m.swap_rows(r, p);
            let inv = F::one().over(&m[(r, c)]);
            for j in c..m.cols {
                let v = m[(r, j)].times(&inv);
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = m[(i, j)].minus(&f.times(&m[(r, j)]));
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = F::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = m[(row, f)].negate();
                }
                v
            })
            .collect()
    }

    /// Solves `self * x = b`; `None` if inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let aug =
            Self::from_fn(
                self.rows,
                self.cols + 1,
                |i, j| if j < self.cols { self[(i, j)].clone() } else { b[i].clone() },
            );
        let (m, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = m[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn determinant(&self) -> F {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        if n == 0 {
            return F::one();
        }
        if n <= 3 {
            return self.cofactor_det();
        }
        let mut m = self.clone();
        let mut det = F::one();
        for c in 0..n {
            let Some(p) =
                (c..n)
                    .filter(|&i| !m[(i, c)].is_zero())
                    .reduce(|b, i| if m[(i, c)].better_pivot(&m[(b, c)]) { i } else { b })
            else {
                return F::zero();
            };
            if p != c {
                m.swap_rows(c, p);
                det = det.negate();
            }
            let piv = m[(c, c)].clone();
            det = det.times(&piv);
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].over(&piv);
                for j in c..n {
                    let v = m[(i, j)].minus(&f.times(&m[(c, j)]));
                    m[(i, j)] = v;
                }
            }
        }
        det
    }

    fn cofactor_det(&self) -> F {
        let a = |i, j| &self[(i, j)];
        match self.rows {
            1 => a(0, 0).clone(),
            2 => a(0, 0).times(a(1, 1)).minus(&a(0, 1).times(a(1, 0))),
            _ => {
                let m0 = a(1, 1).times(a(2, 2)).minus(&a(1, 2).times(a(2, 1)));
                let m1 = a(1, 0).times(a(2, 2)).minus(&a(1, 2).times(a(2, 0)));
                let m2 = a(1, 0).times(a(2, 1)).minus(&a(1, 1).times(a(2, 0)));
                a(0, 0).times(&m0).minus(&a(0, 1).times(&m1)).plus(&a(0, 2).times(&m2))
            }
        }
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> Self {
        let n = self.rows;
        Self::from_fn(n - 1, n - 1, |i, j| {
            let ii = if i < skip_r { i } else { i + 1 };
            let jj = if j < skip_c { j } else { j + 1 };
            self[(ii, jj)].clone()
        })
    }

    /// Classical adjugate: `adj(A) * A = det(A) * I`.
    pub fn adjugate(&self) -> Self {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        if n == 1 {
            return Self::identity(1);
        }
        Self::from_fn(n, n, |i, j| {
            let d = self.minor(j, i).determinant();
            if (i + j) % 2 == 0 {
                d
            } else {
                d.negate()
            }
        })
    }

    /// Inverse via adjugate and determinant; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det.is_zero() {
            return None;
        }
        let inv = F::one().over(&det);
        Some(self.adjugate().scale(&inv))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn kernel_and_rank() {
        let m = Matrix::from_rows(vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(m.mul_vec(&v).iter().all(Field::is_zero));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_rows(vec![
            vec![q(2), q(1), q(0), q(0)],
            vec![q(1), q(3), q(1), q(0)],
            vec![q(0), q(1), q(4), q(1)],
            vec![q(0), q(0), q(1), q(5)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(4));
        assert_eq!(m.determinant(), m.transpose().determinant());
    }

    #[test]
    fn float_solve() {
        let m = Matrix::from_rows(vec![vec![1e-3f64, 1.0], vec![1.0, 1.0]]);
        let x = m.solve(&[1.0, 2.0]).unwrap();
        assert!((x[0] - 1.001).abs() < 1e-3 && (x[1] - 0.999).abs() < 1e-3);
    }
}
