use std::ops::Mul;

use crate::error::{Error, Result};

use super::scalar::{Field, Scalar};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Errors on ragged input. An empty row list gives a 0x0 matrix.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul_mat(&self, rhs: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self.get(i, k).clone() * rhs.get(k, j).clone();
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    /// Determinant by Bareiss fraction-free elimination. The pivot for
    /// column k is the topmost row at or below k with a nonzero entry.
    pub fn det(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(T::one());
        }
        let mut a: Vec<Vec<T>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut negate = false;
        let mut prev = T::one();
        for k in 0..n - 1 {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(T::zero());
            };
            if p != k {
                a.swap(p, k);
                negate = !negate;
            }
            let (top, bottom) = a.split_at_mut(k + 1);
            let pivot_row = &top[k];
            for row in bottom.iter_mut() {
                for j in k + 1..n {
                    let v = row[j].clone() * pivot_row[k].clone()
                        - row[k].clone() * pivot_row[j].clone();
                    row[j] = v.div_exact(&prev);
                }
                row[k] = T::zero();
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        Ok(if negate { -d } else { d })
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    /// Panics on mismatched shapes; see `mul_mat` for the checked form.
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.mul_mat(rhs).expect("matrix shape mismatch")
    }
}

/// Reduced row echelon form built one row at a time. Pivots are kept
/// sorted by column, each normalized to 1 and cleared from every other row.
#[derive(Clone, Debug)]
pub struct RowEchelon<T> {
    cols: usize,
    pivots: Vec<(usize, Vec<T>)>,
}

impl<T: Field> RowEchelon<T> {
    pub fn new(cols: usize) -> Self {
        RowEchelon {
            cols,
            pivots: Vec::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.pivots.len() == self.cols
    }

    pub fn pivot_rows(&self) -> impl Iterator<Item = (usize, &[T])> {
        self.pivots.iter().map(|(p, r)| (*p, r.as_slice()))
    }

    /// Reduce `row` and keep it if independent. Returns whether rank grew.
    pub fn push(&mut self, mut row: Vec<T>) -> Result<bool> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} for {} columns",
                row.len(),
                self.cols
            )));
        }
        if self.is_full_rank() {
            return Ok(false);
        }
        for (p, prow) in &self.pivots {
            if row[*p].is_zero() {
                continue;
            }
            let c = row[*p].clone();
            axpy(&mut row, &c, prow);
        }
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            return Ok(false);
        };
        let inv = T::one() / row[p].clone();
        for x in row.iter_mut().skip(p) {
            if !x.is_zero() {
                *x = x.clone() * inv.clone();
            }
        }
        for (_, prow) in self.pivots.iter_mut() {
            if !prow[p].is_zero() {
                let c = prow[p].clone();
                axpy(prow, &c, &row);
            }
        }
        let at = self.pivots.partition_point(|(q, _)| *q < p);
        self.pivots.insert(at, (p, row));
        Ok(true)
    }

    /// Basis of the right null space, one vector per free column in
    /// increasing column order.
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let mut is_pivot = vec![false; self.cols];
        for (p, _) in &self.pivots {
            is_pivot[*p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (p, prow) in &self.pivots {
                    if !prow[f].is_zero() {
                        v[*p] = -prow[f].clone();
                    }
                }
                v
            })
            .collect()
    }
}

/// row -= c * other
fn axpy<T: Field>(row: &mut [T], c: &T, other: &[T]) {
    for (x, o) in row.iter_mut().zip(other) {
        if !o.is_zero() {
            *x = x.clone() - c.clone() * o.clone();
        }
    }
}

impl<T: Field> Matrix<T> {
    pub fn echelon(&self) -> RowEchelon<T> {
        let mut e = RowEchelon::new(self.cols);
        for i in 0..self.rows {
            // Row length always matches.
            let _ = e.push(self.row(i).to_vec());
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }
}

/// Exact determinant over a field (rationals or complex rationals).
pub fn det_exact<T: Field>(m: &Matrix<T>) -> Result<T> {
    m.det()
}

/// Exact determinant of a polynomial matrix.
pub fn det_poly(m: &Matrix<super::poly::UniPoly>) -> Result<super::poly::UniPoly> {
    m.det()
}

/// Basis of the right null space; empty iff the columns are independent.
pub fn kernel_basis<T: Field>(m: &Matrix<T>) -> Vec<Vec<T>> {
    m.echelon().kernel_basis()
}

/// One solution of `m x = rhs`, or `None` if the system is inconsistent.
/// Free variables are set to zero.
pub fn solve_linear<T: Field>(m: &Matrix<T>, rhs: &[T]) -> Result<Option<Vec<T>>> {
    if rhs.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "rhs of length {} for {} rows",
            rhs.len(),
            m.rows()
        )));
    }
    let n = m.cols();
    let mut e = RowEchelon::new(n + 1);
    for (i, b) in rhs.iter().enumerate() {
        let mut row = m.row(i).to_vec();
        row.push(b.clone());
        e.push(row)?;
    }
    let mut x = vec![T::zero(); n];
    for (p, row) in e.pivot_rows() {
        if p == n {
            return Ok(None);
        }
        x[p] = row[n].clone();
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::UniPoly;
    use crate::algebra::scalar::{rat, rat_int, Rat};
    use num_traits::{One, Zero};

    fn q(rows: &[&[(i64, i64)]]) -> Matrix<Rat> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(a, b)| rat(a, b)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(q(&[&[(2, 1)]]).det().unwrap(), rat_int(2));
        assert_eq!(Matrix::<Rat>::identity(3).det().unwrap(), Rat::one());
        let hilbert = q(&[&[(1, 1), (1, 2)], &[(1, 2), (1, 3)]]);
        assert_eq!(det_exact(&hilbert).unwrap(), rat(1, 12));
        let swap = q(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        assert_eq!(swap.det().unwrap(), rat_int(-1));
        assert!(matches!(
            Matrix::<Rat>::zeros(2, 3).det(),
            Err(Error::NonSquare { .. })
        ));
    }

    #[test]
    fn det_of_polynomial_matrix() {
        let x = UniPoly::xi();
        let m = Matrix::from_rows(vec![
            vec![x.clone(), UniPoly::one()],
            vec![UniPoly::one(), x.clone()],
        ])
        .unwrap();
        assert_eq!(det_poly(&m).unwrap(), UniPoly::from_ints(&[-1, 0, 1]));
        assert_eq!(
            det_poly(&Matrix::<UniPoly>::identity(2)).unwrap(),
            UniPoly::one()
        );
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&Matrix::<Rat>::zeros(1, 2)).len(), 2);
        assert!(kernel_basis(&Matrix::<Rat>::identity(2)).is_empty());
        let k = kernel_basis(&q(&[&[(1, 1), (1, 1)]]));
        assert_eq!(k, vec![vec![rat_int(-1), rat_int(1)]]);
    }

    #[test]
    fn solve_examples() {
        let id = Matrix::<Rat>::identity(2);
        assert_eq!(
            solve_linear(&id, &[rat_int(3), rat_int(4)]).unwrap(),
            Some(vec![rat_int(3), rat_int(4)])
        );
        let wide = q(&[&[(1, 1), (1, 1)]]);
        assert_eq!(
            solve_linear(&wide, &[rat_int(5)]).unwrap(),
            Some(vec![rat_int(5), Rat::zero()])
        );
        let tall = q(&[&[(1, 1)], &[(1, 1)]]);
        assert_eq!(solve_linear(&tall, &[Rat::zero(), Rat::one()]).unwrap(), None);
        assert!(solve_linear(&tall, &[Rat::zero()]).is_err());
    }
}
