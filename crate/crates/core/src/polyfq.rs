//! Dense univariate polynomials over `F_q`, hyper-derivatives, root
//! multiplicities, and exact Gaussian elimination.

use crate::digits::Lucas;
use crate::error::{Error, Result};
use crate::ffield::{FieldDesc, FieldElem};

/// Polynomial with coefficients indexed by degree; the zero polynomial has
/// no coefficients and the top coefficient is otherwise nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFq {
    field: FieldDesc,
    coeffs: Vec<FieldElem>,
}

impl PolyFq {
    pub fn zero(field: &FieldDesc) -> Self {
        PolyFq {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: &FieldDesc, c: FieldElem) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    pub fn from_coeffs(field: &FieldDesc, coeffs: Vec<FieldElem>) -> Self {
        let mut out = PolyFq {
            field: field.clone(),
            coeffs,
        };
        out.trim();
        out
    }

    pub fn from_labels(field: &FieldDesc, labels: &[u64]) -> Result<Self> {
        let coeffs = labels
            .iter()
            .map(|&l| field.elem_of(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(field, coeffs))
    }

    /// `x - c`.
    pub fn linear(field: &FieldDesc, c: &FieldElem) -> Self {
        Self::from_coeffs(field, vec![field.neg(c), field.one()])
    }

    /// `(x - c)^t` expanded with Lucas binomials:
    /// coefficient of `x^k` is `binom(t, k) (-c)^{t-k}`.
    pub fn linear_power(field: &FieldDesc, c: &FieldElem, t: u64) -> Self {
        let lucas = Lucas::new(field.p()).expect("field characteristic is prime");
        let neg_c = field.neg(c);
        let mut coeffs = vec![field.zero(); t as usize + 1];
        let mut power = field.one();
        for k in (0..=t).rev() {
            let b = lucas.binom(t, k);
            if b != 0 {
                coeffs[k as usize] = field.mul(&field.from_u64(b), &power);
            }
            power = field.mul(&power, &neg_c);
        }
        Self::from_coeffs(field, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(FieldElem::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn labels(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| self.field.label_of(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn same_field(&self, other: &PolyFq) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyFq) -> Result<PolyFq> {
        self.same_field(other)?;
        let f = &self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| f.add(&self.coeff(i), &other.coeff(i)))
            .collect();
        Ok(Self::from_coeffs(f, coeffs))
    }

    pub fn sub(&self, other: &PolyFq) -> Result<PolyFq> {
        self.same_field(other)?;
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyFq {
        let f = &self.field;
        PolyFq {
            field: f.clone(),
            coeffs: self.coeffs.iter().map(|c| f.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: &FieldElem) -> PolyFq {
        let f = &self.field;
        Self::from_coeffs(f, self.coeffs.iter().map(|a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &PolyFq) -> Result<PolyFq> {
        self.same_field(other)?;
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(f));
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Ok(Self::from_coeffs(f, out))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElem) -> FieldElem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    /// `f(x - c)`.
    pub fn compose_shift(&self, c: &FieldElem) -> PolyFq {
        let f = &self.field;
        let lin = Self::linear(f, c);
        self.coeffs.iter().rev().fold(Self::zero(f), |acc, a| {
            acc.mul(&lin)
                .and_then(|m| m.add(&Self::constant(f, a.clone())))
                .expect("same field")
        })
    }

    /// `E^(n)(f) = sum_j binom(j, n) a_j x^{j - n}`, binomials via Lucas.
    pub fn hyper_derivative(&self, n: usize) -> PolyFq {
        let f = &self.field;
        if n >= self.coeffs.len() {
            return Self::zero(f);
        }
        let lucas = Lucas::new(f.p()).expect("field characteristic is prime");
        let coeffs = (n..self.coeffs.len())
            .map(|j| {
                let b = lucas.binom(j as u64, n as u64);
                f.mul(&f.from_u64(b), &self.coeffs[j])
            })
            .collect();
        Self::from_coeffs(f, coeffs)
    }

    /// `E^(n)(f)(c)` without materialising the derivative.
    pub fn hyper_derivative_at(&self, n: usize, c: &FieldElem) -> FieldElem {
        let f = &self.field;
        if n >= self.coeffs.len() {
            return f.zero();
        }
        let lucas = Lucas::new(f.p()).expect("field characteristic is prime");
        let mut acc = f.zero();
        for j in (n..self.coeffs.len()).rev() {
            acc = f.mul(&acc, c);
            let b = lucas.binom(j as u64, n as u64);
            if b != 0 {
                acc = f.add(&acc, &f.mul(&f.from_u64(b), &self.coeffs[j]));
            }
        }
        acc
    }

    /// Synthetic division by `x - c`: returns `(quotient, remainder)`.
    pub fn div_rem_linear(&self, c: &FieldElem) -> (PolyFq, FieldElem) {
        let f = &self.field;
        if self.is_zero() {
            return (Self::zero(f), f.zero());
        }
        let d = self.coeffs.len() - 1;
        let mut quotient = vec![f.zero(); d];
        let mut carry = f.zero();
        for j in (0..=d).rev() {
            let v = f.add(&self.coeffs[j], &f.mul(&carry, c));
            if j == 0 {
                return (Self::from_coeffs(f, quotient), v);
            }
            quotient[j - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Largest `t` with `(x - c)^t | f`.
    pub fn root_multiplicity(&self, c: &FieldElem) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut t = 0;
        let mut cur = self.clone();
        loop {
            let (quot, rem) = cur.div_rem_linear(c);
            if !rem.is_zero() {
                return Ok(t);
            }
            t += 1;
            cur = quot;
        }
    }

    /// `E^(k)(f)(c) = 0` for every `k < m`.
    pub fn multiplicity_at_least_via_hyper(&self, c: &FieldElem, m: usize) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok((0..m).all(|k| self.hyper_derivative_at(k, c).is_zero()))
    }
}

/// Dense row-major matrix over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFq {
    field: FieldDesc,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl MatrixFq {
    pub fn zeros(field: &FieldDesc, rows: usize, cols: usize) -> Self {
        MatrixFq {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn from_rows(field: &FieldDesc, rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        if rows.iter().flatten().any(|e| !field.contains(e)) {
            return Err(Error::FieldMismatch);
        }
        Ok(MatrixFq {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Rows indexed by `exponents`, columns by `nodes`: entry `(-node)^e`.
    pub fn moment_matrix(field: &FieldDesc, nodes: &[FieldElem], exponents: &[u64]) -> Self {
        let mut m = Self::zeros(field, exponents.len(), nodes.len());
        for (j, node) in nodes.iter().enumerate() {
            let neg = field.neg(node);
            for (i, &e) in exponents.iter().enumerate() {
                m.set(i, j, field.pow(&neg, e as u128));
            }
        }
        m
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Submatrix made of the given rows.
    pub fn select_rows(&self, rows: &[usize]) -> MatrixFq {
        let data = rows.iter().flat_map(|&i| self.row(i).to_vec()).collect();
        MatrixFq {
            field: self.field.clone(),
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// Submatrix made of the given columns.
    pub fn select_cols(&self, cols: &[usize]) -> MatrixFq {
        let mut out = Self::zeros(&self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out.set(i, k, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[FieldElem]) -> Result<Vec<FieldElem>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{} columns, vector of length {}",
                self.cols,
                x.len()
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect())
    }

    /// Reduced row echelon form in place; returns pivot columns.
    fn reduce(&mut self, col_limit: usize) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..col_limit {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&i| !self.get(i, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, row * self.cols + j);
                }
            }
            let inv = f.inv(self.get(row, col)).expect("pivot is nonzero");
            for j in 0..self.cols {
                let v = f.mul(self.get(row, j), &inv);
                self.set(row, j, v);
            }
            for i in 0..self.rows {
                if i == row || self.get(i, col).is_zero() {
                    continue;
                }
                let factor = self.get(i, col).clone();
                for j in 0..self.cols {
                    let v = f.sub(self.get(i, j), &f.mul(&factor, self.get(row, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.reduce(self.cols).len()
    }

    /// Column indices of the leftmost maximal independent column set.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut m = self.clone();
        m.reduce(self.cols)
    }

    /// Solves `A x = b`. Returns `None` when inconsistent; free variables are
    /// set to zero otherwise.
    pub fn solve(&self, b: &[FieldElem]) -> Result<Option<Vec<FieldElem>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "{} rows, right-hand side of length {}",
                self.rows,
                b.len()
            )));
        }
        let f = &self.field;
        let mut aug = Self::zeros(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.reduce(self.cols);
        let rank = pivots.len();
        if (rank..self.rows).any(|i| !aug.get(i, self.cols).is_zero()) {
            return Ok(None);
        }
        let mut x = vec![f.zero(); self.cols];
        for (i, &col) in pivots.iter().enumerate() {
            x[col] = aug.get(i, self.cols).clone();
        }
        Ok(Some(x))
    }
}

pub fn gaussian_solve(a: &MatrixFq, b: &[FieldElem]) -> Result<Option<Vec<FieldElem>>> {
    a.solve(b)
}
