use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, stored column-major (one column per user).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from equally long columns.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::domain("columns have different lengths"));
        }
        Ok(Self {
            rows,
            cols: columns.len(),
            data: columns.concat(),
        })
    }

    /// Builds a matrix from real-valued rows (imaginary parts zero).
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::domain("rows have different lengths"));
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| {
            Complex64::new(rows[i][j], 0.0)
        }))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[col * self.rows + row]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[col * self.rows + row] = value;
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks_exact(self.rows.max(1)).take(self.cols)
    }

    /// Entries in column-major order.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for &j in indices {
            data.extend_from_slice(self.column(j));
        }
        Self {
            rows: self.rows,
            cols: indices.len(),
            data,
        }
    }

    pub fn column_norm_sqr(&self, col: usize) -> f64 {
        self.column(col).iter().map(Complex64::norm_sqr).sum()
    }

    /// Squared Frobenius norm, equal to `tr(A^H A)`.
    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Gram matrix `A^H A` (cols x cols).
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let v = dot(self.column(i), self.column(j));
                g.set(i, j, v);
                g.set(j, i, v.conj());
            }
        }
        g
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            for (l, b) in other.column(j).iter().enumerate() {
                let a = self.column(l);
                let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
                for (d, x) in dst.iter_mut().zip(a) {
                    *d += x * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::domain("shape mismatch in subtraction"));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Writes `rows`, `cols` as little-endian u64 followed by the entries in
    /// row-major order, each as interleaved little-endian f64 (re, im).
    pub fn write_le<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.rows as u64).to_le_bytes())?;
        w.write_all(&(self.cols as u64).to_le_bytes())?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.get(i, j);
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads the layout produced by [`ComplexMatrix::write_le`].
    pub fn read_le<R: Read>(mut r: R) -> Result<Self> {
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let rows = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let cols = u64::from_le_bytes(word) as usize;
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                r.read_exact(&mut word)?;
                let re = f64::from_le_bytes(word);
                r.read_exact(&mut word)?;
                let im = f64::from_le_bytes(word);
                m.set(i, j, Complex64::new(re, im));
            }
        }
        Ok(m)
    }
}

/// `a^H b`.
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_is_hermitian() {
        let a = ComplexMatrix::from_fn(4, 3, |i, j| {
            Complex64::new(i as f64 - j as f64, (i * j) as f64 * 0.5)
        });
        let g = a.gram();
        let expected = a.conj_transpose().matmul(&a).unwrap();
        assert!(g.max_abs_diff(&expected) < 1e-12);
        for i in 0..3 {
            assert_eq!(g.get(i, i).im, 0.0);
        }
    }

    #[test]
    fn dump_layout_is_row_major() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| Complex64::new((10 * i + j) as f64, -1.0));
        let mut buf = Vec::new();
        a.write_le(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 2 * 3 * 16);
        assert_eq!(u64::from_le_bytes(buf[0..8].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 3);
        // second entry on the wire is (row 0, col 1)
        let re = f64::from_le_bytes(buf[32..40].try_into().unwrap());
        assert_eq!(re, 1.0);
        assert_eq!(ComplexMatrix::read_le(buf.as_slice()).unwrap(), a);
    }

    #[test]
    fn truncated_dump_is_an_error() {
        let a = ComplexMatrix::identity(3);
        let mut buf = Vec::new();
        a.write_le(&mut buf).unwrap();
        buf.truncate(buf.len() - 1);
        assert!(ComplexMatrix::read_le(buf.as_slice()).is_err());
    }

    #[test]
    fn select_columns_keeps_order() {
        let a = ComplexMatrix::from_fn(2, 4, |i, j| Complex64::new(j as f64, i as f64));
        let s = a.select_columns(&[3, 1]);
        assert_eq!(s.column(0), a.column(3));
        assert_eq!(s.column(1), a.column(1));
    }
}
