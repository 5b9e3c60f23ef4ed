use std::fmt;
use std::ops::{Index, IndexMut};

use super::{Field, LinalgError, Scalar};

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<S: Scalar> {
    field: S::Field,
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} over {}", self.rows, self.cols, self.field.descriptor())?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<S: Scalar> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Mat<S> {
    pub fn zeros<F: Field<Elem = S>>(field: &F, rows: usize, cols: usize) -> Self {
        Mat { field: field.zero().field(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity<F: Field<Elem = S>>(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_rows<F: Field<Elem = S>>(field: &F, rows: Vec<Vec<S>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(LinalgError::Ragged);
        }
        let data: Vec<S> = rows.into_iter().flatten().collect();
        let field = field.zero().field();
        if data.iter().any(|x| x.field() != field) {
            return Err(LinalgError::FieldMismatch);
        }
        Ok(Mat { field, rows: r, cols: c, data })
    }

    pub fn from_ints<F: Field<Elem = S>>(field: &F, rows: &[&[i64]]) -> Result<Self, LinalgError> {
        Self::from_rows(field, rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect())
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns<F: Field<Elem = S>>(field: &F, cols: &[Vec<S>]) -> Result<Self, LinalgError> {
        let n = cols.first().map_or(0, |c| c.len());
        if cols.iter().any(|c| c.len() != n) {
            return Err(LinalgError::Ragged);
        }
        let mut m = Self::zeros(field, n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> &S::Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut m = self.clone();
        for x in m.data.iter_mut() {
            *x = x.clone() * c;
        }
        m
    }

    fn same_shape(&self, other: &Self, what: &str) -> Result<(), LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Dimension(format!(
                "{what} of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_shape(other, "sum")?;
        let mut m = self.clone();
        for (x, y) in m.data.iter_mut().zip(&other.data) {
            *x = x.clone() + y;
        }
        Ok(m)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_shape(other, "difference")?;
        let mut m = self.clone();
        for (x, y) in m.data.iter_mut().zip(&other.data) {
            *x = x.clone() - y;
        }
        Ok(m)
    }

    /// Product; zero entries of `self` are skipped, which matters for the
    /// sparse generator matrices used elsewhere.
    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = out.data[idx].clone() + &(a.clone() * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Dimension(format!("{}x{} times vector of length {}", self.rows, self.cols, v.len())));
        }
        let mut out = vec![self.field.zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for (a, b) in self.row(i).iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    *o = o.clone() + &(a.clone() * b);
                }
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        self.field.invert_matrix(self)
    }

    /// Row-reduced echelon form together with the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        if !m[(r, j)].is_zero() {
                            m[(i, j)] = m[(i, j)].clone() - &(f.clone() * &m[(r, j)]);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self * x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![self.field.zero(); self.cols];
            v[f] = self.field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, f)].clone();
            }
            out.push(v);
        }
        out
    }

    /// Solves `self * x = b`; free variables are set to zero.
    pub fn solve(&self, b: &Self) -> Result<Self, LinalgError> {
        if self.field != b.field {
            return Err(LinalgError::FieldMismatch);
        }
        if b.rows != self.rows {
            return Err(LinalgError::Dimension(format!("{}x{} system with {} right-hand rows", self.rows, self.cols, b.rows)));
        }
        let mut aug = Self::zeros(&self.field, self.rows, self.cols + b.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..b.cols {
                aug[(i, self.cols + j)] = b[(i, j)].clone();
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return Err(LinalgError::Inconsistent);
        }
        let mut x = Self::zeros(&self.field, self.cols, b.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(pc, j)] = r[(row, self.cols + j)].clone();
            }
        }
        Ok(x)
    }

    pub fn det(&self) -> Result<S, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Dimension(format!("determinant of {}x{} matrix", self.rows, self.cols)));
        }
        let mut m = self.clone();
        let mut d = self.field.one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(self.field.zero());
            };
            if p != c {
                m.swap_rows(c, p);
                d = -d;
            }
            let piv = m[(c, c)].clone();
            d = d * &piv;
            let inv = piv.inv().expect("pivot is nonzero");
            for i in c + 1..m.rows {
                if !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone() * &inv;
                    for j in c..m.cols {
                        m[(i, j)] = m[(i, j)].clone() - &(f.clone() * &m[(c, j)]);
                    }
                }
            }
        }
        Ok(d)
    }
}

pub(super) fn gauss_jordan_inverse<S: Scalar>(m: &Mat<S>) -> Result<Mat<S>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Dimension(format!("inverse of {}x{} matrix", m.rows, m.cols)));
    }
    let id = Mat::identity(&m.field, m.rows);
    if m.rank() < m.rows {
        return Err(LinalgError::Singular);
    }
    m.solve(&id)
}

/// Incremental row echelon form for tall sparse systems.
///
/// Pivot rows are kept fully reduced, so reducing an incoming row only
/// touches the pivot columns where it is nonzero to begin with.
pub struct RowReducer<S: Scalar> {
    field: S::Field,
    cols: usize,
    pivot_of_col: Vec<Option<usize>>,
    rows: Vec<(usize, Vec<S>)>,
}

impl<S: Scalar> RowReducer<S> {
    pub fn new<F: Field<Elem = S>>(field: &F, cols: usize) -> Self {
        RowReducer { field: field.zero().field(), cols, pivot_of_col: vec![None; cols], rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row; returns whether it was independent of the rows so far.
    pub fn push(&mut self, mut row: Vec<S>) -> bool {
        assert_eq!(row.len(), self.cols);
        let hits: Vec<usize> =
            (0..self.cols).filter(|&c| !row[c].is_zero() && self.pivot_of_col[c].is_some()).collect();
        for c in hits {
            let f = row[c].clone();
            let (_, prow) = &self.rows[self.pivot_of_col[c].unwrap()];
            for (x, y) in row.iter_mut().zip(prow) {
                if !y.is_zero() {
                    *x = x.clone() - &(f.clone() * y);
                }
            }
        }
        let Some(pc) = (0..self.cols).find(|&c| !row[c].is_zero()) else { return false };
        let inv = row[pc].inv().expect("pivot is nonzero");
        for x in row.iter_mut() {
            *x = x.clone() * &inv;
        }
        for (_, prow) in self.rows.iter_mut() {
            if !prow[pc].is_zero() {
                let f = prow[pc].clone();
                for (x, y) in prow.iter_mut().zip(&row) {
                    if !y.is_zero() {
                        *x = x.clone() - &(f.clone() * y);
                    }
                }
            }
        }
        self.pivot_of_col[pc] = Some(self.rows.len());
        self.rows.push((pc, row));
        true
    }

    pub fn field(&self) -> &S::Field {
        &self.field
    }
}

#[cfg(test)]
mod tests {
    use super::super::{seeded_rng, PrimeField, Rational, Rationals};
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn solve_sets_free_variables_to_zero() {
        let a = Mat::from_ints(&Rationals, &[&[1, 1], &[1, 1]]).unwrap();
        let b = Mat::from_ints(&Rationals, &[&[2], &[2]]).unwrap();
        let x = a.solve(&b).unwrap();
        assert_eq!(x.to_rows(), vec![vec![q(2)], vec![q(0)]]);
        let b2 = Mat::from_ints(&Rationals, &[&[1], &[2]]).unwrap();
        assert_eq!(a.solve(&b2), Err(LinalgError::Inconsistent));
    }

    #[test]
    fn inverse_of_2x2() {
        let a = Mat::from_ints(&Rationals, &[&[1, 2], &[3, 4]]).unwrap();
        let inv = a.inverse().unwrap();
        let half = Rationals.from_frac(1, 2).unwrap();
        assert_eq!(inv.to_rows(), vec![vec![q(-2), q(1)], vec![Rationals.from_frac(3, 2).unwrap(), -half]]);
        let s = Mat::from_ints(&Rationals, &[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(s.inverse(), Err(LinalgError::Singular));
    }

    #[test]
    fn ragged_and_mismatched_inputs() {
        assert_eq!(
            Mat::from_rows(&Rationals, vec![vec![q(1)], vec![q(1), q(2)]]),
            Err(LinalgError::Ragged)
        );
        let f5 = PrimeField::new(5).unwrap();
        let f7 = PrimeField::new(7).unwrap();
        let a = Mat::identity(&f5, 2);
        let b = Mat::identity(&f7, 2);
        assert_eq!(a.mul(&b), Err(LinalgError::FieldMismatch));
    }

    fn random_mat<F: Field>(f: &F, n: usize, seed: u64) -> Mat<F::Elem> {
        let mut rng = seeded_rng(seed);
        let rows = (0..n).map(|_| (0..n).map(|_| f.random(&mut rng)).collect()).collect();
        Mat::from_rows(f, rows).unwrap()
    }

    #[test]
    fn inverse_round_trip() {
        for seed in 0..20 {
            let a = random_mat(&Rationals, 6, seed);
            if let Ok(inv) = a.inverse() {
                assert_eq!(a.mul(&inv).unwrap(), Mat::identity(&Rationals, 6));
                assert!(!a.det().unwrap().is_zero());
                // the generic path agrees with the fraction-free one
                assert_eq!(gauss_jordan_inverse(&a).unwrap(), inv);
            } else {
                assert!(a.det().unwrap().is_zero());
            }
            let f = PrimeField::new(7).unwrap();
            let b = random_mat(&f, 6, seed);
            match b.inverse() {
                Ok(inv) => assert_eq!(inv.mul(&b).unwrap(), Mat::identity(&f, 6)),
                Err(_) => assert!(b.det().unwrap().is_zero()),
            }
        }
    }

    #[test]
    fn det_is_multiplicative() {
        for seed in 0..10 {
            let a = random_mat(&Rationals, 4, seed);
            let b = random_mat(&Rationals, 4, seed + 100);
            let ab = a.mul(&b).unwrap();
            assert_eq!(ab.det().unwrap(), a.det().unwrap() * b.det().unwrap());
        }
    }

    #[test]
    fn nullspace_and_rank() {
        let a = Mat::from_ints(&Rationals, &[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]).unwrap();
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).unwrap().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn row_reducer_matches_rank() {
        let f = PrimeField::new(5).unwrap();
        for seed in 0..10 {
            let mut rng = seeded_rng(seed);
            let rows: Vec<Vec<_>> = (0..12)
                .map(|_| (0..9).map(|_| if rand::Rng::gen_bool(&mut rng, 0.3) { f.random(&mut rng) } else { f.zero() }).collect())
                .collect();
            let m = Mat::from_rows(&f, rows.clone()).unwrap();
            let mut rr = RowReducer::new(&f, 9);
            for r in rows {
                rr.push(r);
            }
            assert_eq!(rr.rank(), m.rank());
        }
    }
}
