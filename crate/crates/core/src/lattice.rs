//! Dense arrays on finite rectangles `1 ≼ i ≼ n` of the positive lattice.
//!
//! Indices in the public API are 1-based; storage is row-major with the last
//! axis varying fastest.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of cells in a single array.
pub const DEFAULT_MAX_CELLS: u128 = 1 << 28;

/// Environment variable overriding [`DEFAULT_MAX_CELLS`].
pub const MAX_CELLS_ENV: &str = "ORTHOFIELD_MAX_CELLS";

/// Current lattice-size guard.
pub fn max_cells() -> u128 {
    std::env::var(MAX_CELLS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u128>().ok())
        .unwrap_or(DEFAULT_MAX_CELLS)
}

pub(crate) fn check_cells(cells: u128) -> Result<()> {
    let limit = max_cells();
    if cells > limit {
        return Err(Error::TooLarge { cells, limit });
    }
    Ok(())
}

/// A point of the positive lattice `N^d`, all coordinates at least 1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(coords: Vec<usize>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("multi-index must have d >= 1".into()));
        }
        if let Some(q) = coords.iter().position(|&c| c == 0) {
            return Err(Error::InvalidInput(format!(
                "coordinate {} is 0; lattice coordinates start at 1",
                q + 1
            )));
        }
        Ok(MultiIndex(coords))
    }

    /// The corner `(1, …, 1)`.
    pub fn ones(d: usize) -> Self {
        assert!(d >= 1);
        MultiIndex(vec![1; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    /// `|n| = ∏ n_q`.
    pub fn volume(&self) -> u128 {
        self.0.iter().map(|&c| c as u128).product()
    }

    /// Coordinatewise order `self ≼ other`.
    pub fn precedes(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Replaces coordinate `axis` (0-based).
    pub fn with(&self, axis: usize, value: usize) -> Result<Self> {
        let mut c = self.0.clone();
        c[axis] = value;
        MultiIndex::new(c)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl TryFrom<Vec<usize>> for MultiIndex {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        MultiIndex::new(v)
    }
}

impl From<MultiIndex> for Vec<usize> {
    fn from(m: MultiIndex) -> Self {
        m.0
    }
}

/// Real values indexed by `1 ≼ i ≼ shape`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeArray {
    shape: MultiIndex,
    strides: Vec<usize>,
    values: Vec<f64>,
}

fn strides_of(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for q in (0..shape.len().saturating_sub(1)).rev() {
        strides[q] = strides[q + 1] * shape[q + 1];
    }
    strides
}

impl LatticeArray {
    pub fn new(shape: MultiIndex, values: Vec<f64>) -> Result<Self> {
        check_cells(shape.volume())?;
        if values.len() as u128 != shape.volume() {
            return Err(Error::InvalidInput(format!(
                "expected {} values for shape {:?}, got {}",
                shape.volume(),
                shape,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("lattice values must be finite".into()));
        }
        Ok(Self::from_parts(shape, values))
    }

    pub(crate) fn from_parts(shape: MultiIndex, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len() as u128, shape.volume());
        let strides = strides_of(shape.coords());
        LatticeArray {
            shape,
            strides,
            values,
        }
    }

    pub fn zeros(shape: MultiIndex) -> Result<Self> {
        check_cells(shape.volume())?;
        let len = shape.volume() as usize;
        Ok(Self::from_parts(shape, vec![0.0; len]))
    }

    /// Builds an array from a function of the 1-based index.
    pub fn from_fn(shape: MultiIndex, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        check_cells(shape.volume())?;
        let mut values = Vec::with_capacity(shape.volume() as usize);
        for_each_index(shape.coords(), |idx| values.push(f(idx)));
        LatticeArray::new(shape, values)
    }

    pub fn shape(&self) -> &MultiIndex {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }


    /// Storage offset of a 1-based index, `None` outside the rectangle.
    pub fn offset(&self, idx: &[usize]) -> Option<usize> {
        if idx.len() != self.dim() {
            return None;
        }
        let mut off = 0;
        for ((&i, &n), &s) in idx.iter().zip(self.shape.coords()).zip(&self.strides) {
            if i == 0 || i > n {
                return None;
            }
            off += (i - 1) * s;
        }
        Some(off)
    }

    /// Value at a 1-based index. Panics outside the rectangle.
    pub fn get(&self, idx: &[usize]) -> f64 {
        let off = self
            .offset(idx)
            .unwrap_or_else(|| panic!("index {idx:?} outside shape {:?}", self.shape));
        self.values[off]
    }

    /// Value at a 0-or-more index where any zero coordinate reads as 0.
    ///
    /// Used for prefix arrays, where `S_k = 0` whenever some `k_q = 0`.
    pub fn get_or_zero(&self, idx: &[usize]) -> f64 {
        if idx.contains(&0) {
            0.0
        } else {
            self.get(idx)
        }
    }
}

/// Calls `f` on every 1-based index of `shape` in storage order.
pub fn for_each_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    let d = shape.len();
    if shape.contains(&0) {
        return;
    }
    let mut idx = vec![1usize; d];
    loop {
        f(&idx);
        let mut q = d;
        loop {
            if q == 0 {
                return;
            }
            q -= 1;
            if idx[q] < shape[q] {
                idx[q] += 1;
                break;
            }
            idx[q] = 1;
        }
    }
}

/// Adds the running sum along `axis` in place (one summed-area pass).
fn cumulate_axis(values: &mut [f64], shape: &[usize], strides: &[usize], axis: usize) {
    let n = shape[axis];
    let s = strides[axis];
    let block = n * s;
    for base in (0..values.len()).step_by(block) {
        for k in 1..n {
            let (head, tail) = values[base + (k - 1) * s..].split_at_mut(s);
            for (cur, prev) in tail[..s].iter_mut().zip(head.iter()) {
                *cur += *prev;
            }
        }
    }
}

/// Differences along `axis` in place (inverse of [`cumulate_axis`]).
fn difference_axis(values: &mut [f64], shape: &[usize], strides: &[usize], axis: usize) {
    let n = shape[axis];
    let s = strides[axis];
    let block = n * s;
    for base in (0..values.len()).step_by(block) {
        for k in (1..n).rev() {
            let (head, tail) = values[base + (k - 1) * s..].split_at_mut(s);
            for (cur, prev) in tail[..s].iter_mut().zip(head.iter()) {
                *cur -= *prev;
            }
        }
    }
}

/// Partial sums `S_k = Σ_{1≼i≼k} X_i` for every `k ≼ shape`.
///
/// One cumulative pass per axis, axis 1 first.
pub fn prefix_sum(field: &LatticeArray) -> LatticeArray {
    let mut values = field.values.clone();
    let shape = field.shape.coords();
    for axis in 0..shape.len() {
        cumulate_axis(&mut values, shape, &field.strides, axis);
    }
    LatticeArray::from_parts(field.shape.clone(), values)
}

/// Recovers the field from its prefix array by finite differencing each axis.
pub fn difference(prefix: &LatticeArray) -> LatticeArray {
    let mut values = prefix.values.clone();
    let shape = prefix.shape.coords();
    for axis in (0..shape.len()).rev() {
        difference_axis(&mut values, shape, &prefix.strides, axis);
    }
    LatticeArray::from_parts(prefix.shape.clone(), values)
}

/// `max_{1≼i≼shape} |S_i|`.
pub fn max_abs_prefix(field: &LatticeArray) -> f64 {
    max_abs(&prefix_sum(field))
}

/// Largest absolute entry of an array.
pub fn max_abs(values: &LatticeArray) -> f64 {
    values.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `Σ_{lo≼i≼hi} X_i` from the prefix array by 2^d-term inclusion–exclusion.
pub fn rect_sum(prefix: &LatticeArray, lo: &MultiIndex, hi: &MultiIndex) -> Result<f64> {
    let d = prefix.dim();
    if lo.dim() != d || hi.dim() != d {
        return Err(Error::InvalidRange(format!(
            "rectangle corners {lo:?}, {hi:?} do not match dimension {d}"
        )));
    }
    if !lo.precedes(hi) {
        return Err(Error::InvalidRange(format!("{lo:?} is not ≼ {hi:?}")));
    }
    if !hi.precedes(prefix.shape()) {
        return Err(Error::InvalidRange(format!(
            "{hi:?} lies outside shape {:?}",
            prefix.shape()
        )));
    }
    Ok(rect_sum_unchecked(prefix, lo.coords(), hi.coords()))
}

/// Inclusion–exclusion without validation; `lo` may contain coordinates
/// with `lo_q = hi_q + 1`, which yields an empty sum.
pub(crate) fn rect_sum_unchecked(prefix: &LatticeArray, lo: &[usize], hi: &[usize]) -> f64 {
    let d = lo.len();
    let mut corner = vec![0usize; d];
    let mut total = 0.0;
    for mask in 0u32..(1u32 << d) {
        let mut neg = false;
        for q in 0..d {
            if mask & (1 << q) != 0 {
                corner[q] = lo[q] - 1;
                neg = !neg;
            } else {
                corner[q] = hi[q];
            }
        }
        let v = prefix.get_or_zero(&corner);
        if neg {
            total -= v;
        } else {
            total += v;
        }
    }
    total
}
