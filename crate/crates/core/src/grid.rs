use crate::error::{Error, Result};

/// Uniform periodic grid `s_i = i·ds`, `ds = period_length / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    n: usize,
    period_length: f64,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n: usize, period_length: f64) -> Result<Self> {
        if n < Self::MIN_POINTS {
            return Err(Error::GridTooSmall(n));
        }
        if !(period_length.is_finite() && period_length > 0.0) {
            return Err(Error::BadPeriod(period_length));
        }
        Ok(Self { n, period_length })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn period_length(&self) -> f64 {
        self.period_length
    }

    #[inline]
    pub fn ds(&self) -> f64 {
        self.period_length / self.n as f64
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.ds()
    }

    #[inline]
    pub fn next(&self, i: usize) -> usize {
        if i + 1 == self.n {
            0
        } else {
            i + 1
        }
    }

    #[inline]
    pub fn prev(&self, i: usize) -> usize {
        if i == 0 {
            self.n - 1
        } else {
            i - 1
        }
    }

    /// Index arithmetic mod n.
    #[inline]
    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.n as isize) as usize
    }

    /// Same period, twice the points.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n,
            period_length: self.period_length,
        }
    }
}
