//! Dense exact linear algebra over a [`Field`].
//!
//! Matrices act on column vectors. Elimination always pivots on the
//! cheapest available entry, which keeps rational-function entries small.

use std::fmt;

use crate::field::Field;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        Self {
            rows: r,
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors of length `rows`.
    pub fn from_cols(cols: &[Vec<F>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn col_vectors(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &F> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let t = a.mul_ref(b);
                        out[(i, j)] = out[(i, j)].add_ref(&t);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in apply");
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.sub_ref(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map(|x| x.mul_ref(c))
    }

    /// Columns picked out in the given order.
    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let cols: Vec<Vec<F>> = idx.iter().map(|&j| self.col(j)).collect();
        Self::from_cols(&cols, self.rows)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect(), self.cols)
    }

    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows);
        let mut cols = self.col_vectors();
        cols.extend(rhs.col_vectors());
        Self::from_cols(&cols, self.rows)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let best = (r..m.rows)
                .filter(|&i| !m[(i, c)].is_zero())
                .min_by_key(|&i| m[(i, c)].complexity());
            let Some(p) = best else { continue };
            m.swap_rows(r, p);
            let inv = F::one().div_ref(&m[(r, c)]);
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].mul_ref(&inv);
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
                    let t = f.mul_ref(&m[(r, j)]);
                    m[(i, j)] = m[(i, j)].sub_ref(&t);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let (r, piv) = self.hstack(&Self::identity(n)).rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        Some(r.select_cols(&idx))
    }

    /// A basis of `{x : self · x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let (r, piv) = self.rref();
        let mut out = Vec::new();
        let mut is_piv = vec![false; self.cols];
        for &p in &piv {
            is_piv[p] = true;
        }
        for free in (0..self.cols).filter(|&j| !is_piv[j]) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (k, &p) in piv.iter().enumerate() {
                v[p] = r[(k, free)].neg_ref();
            }
            out.push(v);
        }
        out
    }

    /// One solution `X` of `self · X = rhs`, if any.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows);
        let n = self.cols;
        let (r, piv) = self.hstack(rhs).rref();
        if piv.last().is_some_and(|&p| p >= n) {
            return None;
        }
        let mut x = Self::zeros(n, rhs.cols);
        for (k, &p) in piv.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(p, j)] = r[(k, n + j)].clone();
            }
        }
        Some(x)
    }

    pub fn solve_vec(&self, b: &[F]) -> Option<Vec<F>> {
        self.solve(&Self::from_cols(&[b.to_vec()], self.rows))
            .map(|x| x.col(0))
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

impl<F: fmt::Display> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.data[i * self.cols + j].to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc.add_ref(&x.mul_ref(y));
        }
    }
    acc
}

pub fn is_zero_vec<F: Field>(v: &[F]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// `a + c·b`, in place.
pub fn axpy<F: Field>(a: &mut [F], c: &F, b: &[F]) {
    if c.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = x.add_ref(&c.mul_ref(y));
        }
    }
}

pub fn scale_vec<F: Field>(v: &[F], c: &F) -> Vec<F> {
    v.iter().map(|x| x.mul_ref(c)).collect()
}

pub fn unit<F: Field>(n: usize, k: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[k] = F::one();
    v
}

/// Rank of a family of vectors of a common length.
pub fn rank_of<F: Field>(vs: &[Vec<F>], len: usize) -> usize {
    let mut e = Echelon::new(len);
    vs.iter().filter(|v| e.insert(v)).count()
}

/// Incremental echelon form of a growing family of vectors.
///
/// Each accepted vector is remembered, so membership queries can also
/// return coordinates with respect to the accepted family.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    len: usize,
    /// `(pivot, row)`: rows are normalized to 1 at their pivot and vanish at
    /// the pivots of all earlier rows.
    rows: Vec<(usize, Vec<F>)>,
    /// `combo[k]`: row k as a combination of the accepted vectors.
    combo: Vec<Vec<F>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            combo: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Residual of `v` and the combination of accepted vectors removed from it.
    fn reduce(&self, v: &[F]) -> (Vec<F>, Vec<F>) {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let mut r = v.to_vec();
        let mut used = vec![F::zero(); self.rows.len()];
        for (k, (p, row)) in self.rows.iter().enumerate() {
            if r[*p].is_zero() {
                continue;
            }
            let c = r[*p].clone();
            axpy(&mut r, &c.neg_ref(), row);
            axpy(&mut used, &c, &self.combo[k]);
        }
        (r, used)
    }

    pub fn contains(&self, v: &[F]) -> bool {
        is_zero_vec(&self.reduce(v).0)
    }

    /// Coefficients expressing `v` in the accepted vectors, if `v` lies in
    /// their span.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        let (r, used) = self.reduce(v);
        is_zero_vec(&r).then_some(used)
    }

    /// Accepts `v` if it is independent of what came before.
    pub fn insert(&mut self, v: &[F]) -> bool {
        let (mut r, used) = self.reduce(v);
        let Some(p) = (0..self.len)
            .filter(|&j| !r[j].is_zero())
            .min_by_key(|&j| r[j].complexity())
        else {
            return false;
        };
        let inv = F::one().div_ref(&r[p]);
        for x in r.iter_mut() {
            *x = x.mul_ref(&inv);
        }
        let n = self.rows.len();
        // row = (v - Σ used_k accepted_k) / r_p
        let mut combo: Vec<F> = used.iter().map(|c| c.neg_ref().mul_ref(&inv)).collect();
        combo.push(inv);
        for c in self.combo.iter_mut() {
            c.push(F::zero());
        }
        debug_assert_eq!(combo.len(), n + 1);
        self.rows.push((p, r));
        self.combo.push(combo);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rational, Scalar};
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        let c = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(), c)
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(is_zero_vec(&a.apply(&ns[0])));
    }

    #[test]
    fn inverse_over_rational_functions() {
        let s = |x: &str| x.parse::<Scalar>().unwrap();
        let a = Matrix::from_rows(
            vec![vec![s("q"), s("1")], vec![s("1"), s("q^-1+q")]],
            2,
        );
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        let singular = Matrix::from_rows(vec![vec![s("q"), s("1")], vec![s("q^2"), s("q")]], 2);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn echelon_coordinates() {
        let mut e = Echelon::new(3);
        assert!(e.insert(&[q(1), q(1), q(0)]));
        assert!(e.insert(&[q(0), q(1), q(1)]));
        assert!(!e.insert(&[q(1), q(2), q(1)]));
        assert_eq!(e.coordinates(&[q(2), q(5), q(3)]), Some(vec![q(2), q(3)]));
        assert_eq!(e.coordinates(&[q(0), q(0), q(1)]), None);
    }

    fn small_matrix() -> impl Strategy<Value = Matrix<Rational>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
                Matrix::from_rows(v.chunks(c).map(|ch| ch.iter().map(|&x| q(x)).collect()).collect(), c)
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(a in small_matrix()) {
            let ns = a.nullspace();
            prop_assert_eq!(a.rank() + ns.len(), a.cols());
            for v in &ns {
                prop_assert!(is_zero_vec(&a.apply(v)));
            }
            prop_assert_eq!(a.rank(), a.transpose().rank());
        }

        #[test]
        fn solve_is_consistent(a in small_matrix(), seed in prop::collection::vec(-3i64..=3, 4)) {
            let x: Vec<Rational> = (0..a.cols()).map(|j| q(seed[j % 4])).collect();
            let b = a.apply(&x);
            let y = a.solve_vec(&b).unwrap();
            prop_assert_eq!(a.apply(&y), b);
        }

        #[test]
        fn echelon_agrees_with_rank(a in small_matrix()) {
            prop_assert_eq!(rank_of(&a.col_vectors(), a.rows()), a.rank());
        }
    }
}
