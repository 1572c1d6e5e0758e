//! Restrictions (partial assignments) over `{0,1,*}^n`.
//!
//! A restriction is stored as two parallel word-packed bit vectors: a fixed
//! mask and a value vector. A coordinate is fixed iff its mask bit is set;
//! value bits are kept zero on starred coordinates so that equality and
//! hashing see a canonical form. Composition and set-merging are word-wise.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{words_for, BitString, VarSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RestrictionError {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("index set universe {set} does not match dimension {dim}")]
    SetUniverseMismatch { set: usize, dim: usize },
    #[error("invalid restriction character {found:?} at position {pos} (expected 0, 1 or *)")]
    InvalidChar { found: char, pos: usize },
}

/// One cell of a restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Zero,
    One,
    Star,
}

/// A partial assignment over `{0,1,*}^n`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Restriction {
    n: usize,
    fixed: Vec<u64>,
    value: Vec<u64>,
}

impl Restriction {
    /// The all-star restriction of dimension `n`.
    pub fn all_star(n: usize) -> Self {
        Restriction { n, fixed: vec![0; words_for(n)], value: vec![0; words_for(n)] }
    }

    /// A total restriction fixing every coordinate to `x`.
    pub fn total(x: &BitString) -> Self {
        let n = x.len();
        let mut r = Self::all_star(n);
        for i in 0..n {
            r.assign(i, x.get(i));
        }
        r
    }

    /// The restriction that stars exactly the coordinates in `lambda` and
    /// fixes every other coordinate to the corresponding bit of `x`.
    pub fn fix_outside(lambda: &VarSet, x: &BitString) -> Result<Self, RestrictionError> {
        if lambda.universe() != x.len() {
            return Err(RestrictionError::SetUniverseMismatch {
                set: lambda.universe(),
                dim: x.len(),
            });
        }
        let mut r = Self::total(x);
        for i in lambda.iter() {
            r.clear(i);
        }
        Ok(r)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize) -> Cell {
        assert!(i < self.n, "index {i} out of range for dimension {}", self.n);
        let (w, b) = (i / 64, i % 64);
        if (self.fixed[w] >> b) & 1 == 0 {
            Cell::Star
        } else if (self.value[w] >> b) & 1 == 1 {
            Cell::One
        } else {
            Cell::Zero
        }
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        !matches!(self.get(i), Cell::Star)
    }

    /// Fixes coordinate `i` to `value`.
    pub fn assign(&mut self, i: usize, value: bool) {
        assert!(i < self.n);
        let (w, b) = (i / 64, i % 64);
        self.fixed[w] |= 1 << b;
        if value {
            self.value[w] |= 1 << b;
        } else {
            self.value[w] &= !(1 << b);
        }
    }

    /// Returns coordinate `i` to a star.
    pub fn clear(&mut self, i: usize) {
        assert!(i < self.n);
        let (w, b) = (i / 64, i % 64);
        self.fixed[w] &= !(1 << b);
        self.value[w] &= !(1 << b);
    }

    pub fn star_count(&self) -> usize {
        self.n - self.fixed_count()
    }

    pub fn fixed_count(&self) -> usize {
        self.fixed.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn stars(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| !self.is_fixed(i))
    }

    pub fn fixed_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.is_fixed(i))
    }

    /// The star positions as a set.
    pub fn star_set(&self) -> VarSet {
        VarSet::from_indices(self.n, self.stars()).expect("stars are in range")
    }

    pub fn is_total(&self) -> bool {
        self.star_count() == 0
    }

    /// Composition with left priority: the output keeps `self` on every fixed
    /// coordinate and falls back to `other` on stars.
    pub fn compose(&self, other: &Restriction) -> Result<Restriction, RestrictionError> {
        if self.n != other.n {
            return Err(RestrictionError::DimensionMismatch { left: self.n, right: other.n });
        }
        let mut out = Restriction::all_star(self.n);
        for w in 0..self.fixed.len() {
            out.fixed[w] = self.fixed[w] | other.fixed[w];
            out.value[w] = self.value[w] | (other.value[w] & !self.fixed[w]);
        }
        Ok(out)
    }

    /// Set-based merge: takes `sigma` on `lambda` and `rho` elsewhere.
    pub fn merge_by_set(
        lambda: &VarSet,
        rho: &Restriction,
        sigma: &Restriction,
    ) -> Result<Restriction, RestrictionError> {
        if rho.n != sigma.n {
            return Err(RestrictionError::DimensionMismatch { left: rho.n, right: sigma.n });
        }
        if lambda.universe() != rho.n {
            return Err(RestrictionError::SetUniverseMismatch { set: lambda.universe(), dim: rho.n });
        }
        let mut out = Restriction::all_star(rho.n);
        for (w, &mask) in lambda.words().iter().enumerate() {
            out.fixed[w] = (sigma.fixed[w] & mask) | (rho.fixed[w] & !mask);
            out.value[w] = (sigma.value[w] & mask) | (rho.value[w] & !mask);
        }
        Ok(out)
    }

    /// Stars out every coordinate outside `keep`.
    pub fn masked_to(&self, keep: &VarSet) -> Restriction {
        assert_eq!(keep.universe(), self.n);
        let mut out = self.clone();
        for (w, &mask) in keep.words().iter().enumerate() {
            out.fixed[w] &= mask;
            out.value[w] &= mask;
        }
        out
    }

    /// Completes the restriction with `y` on the starred coordinates,
    /// producing the full assignment `self ∘ y`.
    pub fn complete_with(&self, y: &BitString) -> Result<BitString, RestrictionError> {
        if y.len() != self.n {
            return Err(RestrictionError::DimensionMismatch { left: self.n, right: y.len() });
        }
        let mut out = BitString::zeros(self.n);
        for i in 0..self.n {
            let bit = match self.get(i) {
                Cell::Zero => false,
                Cell::One => true,
                Cell::Star => y.get(i),
            };
            if bit {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// The fixed part as a full bit string (stars read as zero).
    pub fn value_bits(&self) -> BitString {
        BitString::from_fn(self.n, |i| matches!(self.get(i), Cell::One))
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let c = match self.get(i) {
                Cell::Zero => '0',
                Cell::One => '1',
                Cell::Star => '*',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Restriction({self})")
    }
}

impl FromStr for Restriction {
    type Err = RestrictionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut r = Restriction::all_star(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => r.assign(i, false),
                '1' => r.assign(i, true),
                '*' => {}
                _ => return Err(RestrictionError::InvalidChar { found: c, pos: i }),
            }
        }
        Ok(r)
    }
}
