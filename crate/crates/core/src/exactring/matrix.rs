use num_traits::{One, Zero};

use super::base::{BaseElement, BaseRing, Rational};
use super::RingError;

/// Dense square or rectangular matrix over a base ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BaseElement>,
}

impl Matrix {
    pub fn zeros(ring: BaseRing, rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: BaseRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BaseElement>>) -> Result<Self, RingError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(RingError::Shape("ragged matrix rows".into()));
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

    pub fn get(&self, i: usize, j: usize) -> &BaseElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BaseElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn ring(&self) -> Option<BaseRing> {
        self.data.first().map(|e| e.ring())
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, RingError> {
        if self.cols != other.rows {
            return Err(RingError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ring = self.ring().or(other.ring()).expect("nonempty matrix");
        let mut out = Matrix::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = ring.zero();
                for k in 0..self.cols {
                    acc += &self.get(i, k).checked_mul(other.get(k, j))?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entries `(i, j)` where `m_ij + m_ji` does not vanish.
    pub fn skew_defects(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in i..self.cols {
                if !(self.get(i, j) + self.get(j, i)).is_zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_skew(&self) -> bool {
        self.is_square() && self.skew_defects().is_empty()
    }

    /// True when every entry of `self - I` vanishes through `horizon`.
    pub fn is_identity_through(&self, horizon: Option<u32>) -> bool {
        let ring = match self.ring() {
            Some(r) => r,
            None => return true,
        };
        let id = Matrix::identity(ring, self.rows);
        self.is_square()
            && self
                .sub(&id)
                .data
                .iter()
                .all(|e| e.check_zero(horizon).is_zero())
    }

    fn constant_part(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).constant_term())
                    .collect()
            })
            .collect()
    }

    /// Exact inverse.
    ///
    /// Jet mode inverts the constant part over the rationals and sums the
    /// Neumann series of the remainder. Polynomial mode requires a constant
    /// nonzero determinant and returns the adjugate divided by it.
    pub fn invert(&self) -> Result<Matrix, RingError> {
        if !self.is_square() {
            return Err(RingError::Shape(
                "matrix inverse needs a square matrix".into(),
            ));
        }
        let ring = self
            .ring()
            .ok_or_else(|| RingError::Shape("empty matrix".into()))?;
        match ring.mode {
            super::base::Mode::Jet { .. } => self.invert_jet(ring),
            super::base::Mode::Polynomial => self.invert_polynomial(ring),
        }
    }

    fn invert_jet(&self, ring: BaseRing) -> Result<Matrix, RingError> {
        let n = self.rows;
        let c_inv =
            rational_inverse(self.constant_part()).ok_or(RingError::SingularConstantTerm)?;
        let mut p0_inv = Matrix::zeros(ring, n, n);
        for i in 0..n {
            for j in 0..n {
                p0_inv.set(i, j, ring.constant(c_inv[i][j].clone()));
            }
        }
        // P = P0 (I + K) with K = P0^-1 (P - P0); P^-1 = sum (-K)^k P0^-1
        let mut p0 = Matrix::zeros(ring, n, n);
        for i in 0..n {
            for j in 0..n {
                p0.set(i, j, ring.constant(self.get(i, j).constant_term()));
            }
        }
        let minus_k = p0_inv.mul(&self.sub(&p0))?.neg();
        let mut term = p0_inv.clone();
        let mut sum = p0_inv;
        let max_iter = ring.order().unwrap_or(0) as usize + 2;
        for _ in 0..max_iter {
            term = minus_k.mul(&term)?;
            if term.data.iter().all(|e| e.is_zero()) {
                let tail_prec = term.data.iter().filter_map(|e| e.precision()).min();
                if let Some(p) = tail_prec {
                    sum.data = sum
                        .data
                        .into_iter()
                        .map(|e| e.with_precision_cap(p))
                        .collect();
                }
                return Ok(sum);
            }
            for (s, t) in sum.data.iter_mut().zip(&term.data) {
                *s += t;
            }
        }
        unreachable!("Neumann terms gain one degree per step and must vanish past the jet order")
    }

    fn invert_polynomial(&self, ring: BaseRing) -> Result<Matrix, RingError> {
        let n = self.rows;
        let det = determinant(self, ring);
        if det.is_zero() {
            return Err(RingError::SingularConstantTerm);
        }
        if !det.is_constant() {
            return Err(RingError::NoPolynomialInverse);
        }
        let inv_det = det.constant_term().recip();
        let mut out = Matrix::zeros(ring, n, n);
        for i in 0..n {
            for j in 0..n {
                // (P^-1)_ij = (-1)^(i+j) M_ji / det
                let minor = self.minor(j, i);
                let mut c = determinant(&minor, ring).scale(&inv_det);
                if (i + j) % 2 == 1 {
                    c = c.neg();
                }
                out.set(i, j, c);
            }
        }
        Ok(out)
    }

    fn minor(&self, row: usize, col: usize) -> Matrix {
        let mut data = Vec::new();
        for i in (0..self.rows).filter(|&i| i != row) {
            for j in (0..self.cols).filter(|&j| j != col) {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        }
    }
}

/// Determinant by Laplace expansion memoized over column subsets.
fn determinant(m: &Matrix, ring: BaseRing) -> BaseElement {
    let n = m.rows;
    if n == 0 {
        return ring.one();
    }
    // dets[mask] = det of rows (n - popcount .. n) restricted to columns in mask
    let mut dets: Vec<Option<BaseElement>> = vec![None; 1 << n];
    dets[0] = Some(ring.one());
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize;
        let row = n - k;
        let mut acc = ring.zero();
        let mut sign_pos = 0;
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            let rest = dets[mask & !(1 << col)]
                .as_ref()
                .expect("smaller subsets come first");
            let term = m.get(row, col) * rest;
            if sign_pos % 2 == 0 {
                acc += &term;
            } else {
                acc += &term.neg();
            }
            sign_pos += 1;
        }
        dets[mask] = Some(acc);
    }
    dets[(1 << n) - 1].take().expect("full mask")
}

/// Gauss-Jordan inverse over the rationals.
pub fn rational_inverse(mut a: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                    let t = &f * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}
