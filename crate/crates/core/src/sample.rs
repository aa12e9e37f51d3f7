use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `n × d` matrix of observations, stored row-major. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    data: Vec<T>,
    n: usize,
    d: usize,
}

impl<T: Scalar> Sample<T> {
    pub fn new(data: Vec<T>, n: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("sample dimension must be positive"));
        }
        if n == 0 {
            return Err(Error::InsufficientSample { needed: 1, got: 0 });
        }
        if data.len() != n * d {
            return Err(Error::invalid(format!(
                "expected {} values for a {n}x{d} sample, got {}",
                n * d,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(Self { data, n, d })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let d = rows
            .first()
            .map(|r| r.as_ref().len())
            .ok_or(Error::InsufficientSample { needed: 1, got: 0 })?;
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != d {
                return Err(Error::invalid(format!(
                    "row {i} has {} columns, expected {d}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(data, rows.len(), d)
    }

    /// One-dimensional sample from a slice of values.
    pub fn from_values(values: &[T]) -> Result<Self> {
        Self::new(values.to_vec(), values.len(), 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Rows `start..end` as a new sample.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.n {
            return Err(Error::invalid(format!(
                "row range {start}..{end} is empty or exceeds {} rows",
                self.n
            )));
        }
        Ok(Self {
            data: self.data[start * self.d..end * self.d].to_vec(),
            n: end - start,
            d: self.d,
        })
    }

    /// Stacks `other` below `self`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::invalid("cannot stack samples of different dimension"));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            data,
            n: self.n + other.n,
            d: self.d,
        })
    }

    /// Sample whose rows are `self.row(idx[k])`.
    pub fn select(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            data,
            n: idx.len(),
            d: self.d,
        }
    }

    /// Applies `f` to every coordinate.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.data.iter().map(|&v| f(v)).collect(), self.n, self.d)
    }

    /// Adds `shift` to every row.
    pub fn translate(&self, shift: &[T]) -> Result<Self> {
        if shift.len() != self.d {
            return Err(Error::invalid("shift has wrong dimension"));
        }
        let data = self
            .data
            .chunks_exact(self.d)
            .flat_map(|r| r.iter().zip(shift).map(|(&a, &b)| a + b))
            .collect();
        Self::new(data, self.n, self.d)
    }

    /// Per-coordinate sample standard deviation averaged over coordinates.
    pub fn mean_coordinate_std(&self) -> T {
        if self.n < 2 {
            return T::zero();
        }
        let n = T::from_count(self.n);
        let mut total = T::zero();
        for j in 0..self.d {
            let mean = self.rows().map(|r| r[j]).sum::<T>() / n;
            let ss = self.rows().map(|r| (r[j] - mean) * (r[j] - mean)).sum::<T>();
            total = total + (ss / (n - T::one())).sqrt();
        }
        total / T::from_count(self.d)
    }

    /// First coordinates with row indices, sorted ascending.
    pub(crate) fn sorted_by_first(&self) -> Vec<(T, usize)> {
        let mut keyed: Vec<(T, usize)> = (0..self.n).map(|i| (self.data[i * self.d], i)).collect();
        keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
        keyed
    }
}
