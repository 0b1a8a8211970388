//! Level-set decomposition of a vector in the unit ball.
//!
//! Bucket `k >= 1` holds the indices with `base^-k < |s_i| <= base^-(k-1)`.
//! With `base = e` the label `k - 1` gives the `e^{-k-1} < |s_i| <= e^{-k}`
//! grid; with `base = d^{1/40}` the labels are used as they are. The label
//! shift is stored in [`LevelSets::label_offset`].

use std::collections::BTreeMap;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSets {
    pub base: f64,
    /// Added to the bucket index when reporting labels.
    pub label_offset: i64,
    pub buckets: BTreeMap<usize, Vec<usize>>,
}

impl LevelSets {
    /// Labels under the stored offset.
    pub fn labelled(&self) -> impl Iterator<Item = (i64, &[usize])> {
        self.buckets
            .iter()
            .map(|(&k, v)| (k as i64 + self.label_offset, v.as_slice()))
    }

    pub fn with_offset(mut self, offset: i64) -> Self {
        self.label_offset = offset;
        self
    }

    pub fn bucket(&self, k: usize) -> &[usize] {
        self.buckets.get(&k).map_or(&[], Vec::as_slice)
    }

    /// `sum_k base^{-2k} |I_k|`, which never exceeds `||s||_2^2`.
    pub fn weighted_mass(&self) -> f64 {
        self.buckets
            .iter()
            .map(|(&k, v)| self.base.powi(-2 * k as i32) * v.len() as f64)
            .sum()
    }
}

/// Bucket index of a nonzero magnitude `x <= 1`.
fn bucket_of(x: f64, base: f64) -> usize {
    let mut k = ((-x.ln() / base.ln()).floor() as i64 + 1).max(1) as usize;
    // repair rounding at the bucket edges
    while k > 1 && x > base.powi(-(k as i32 - 1)) {
        k -= 1;
    }
    while x <= base.powi(-(k as i32)) {
        k += 1;
    }
    k
}

pub fn level_sets(s: &[f64], base: f64) -> Result<LevelSets> {
    if !(base > 1.0) || !base.is_finite() {
        return Err(invalid(format!("level base must be > 1, got {base}")));
    }
    let norm2: f64 = s.iter().map(|x| x * x).sum();
    if !norm2.is_finite() || norm2 > 1.0 + 1e-12 {
        return Err(invalid("level sets need a vector in the unit ball"));
    }
    let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &x) in s.iter().enumerate() {
        if x != 0.0 {
            buckets.entry(bucket_of(x.abs().min(1.0), base)).or_default().push(i);
        }
    }
    Ok(LevelSets {
        base,
        label_offset: 0,
        buckets,
    })
}
