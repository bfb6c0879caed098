//! Rank transforms and the empirical tail functional
//! `Q̂ₙ(x, y) = n⁻¹ Σᵢ 1{R¹ᵢ ≥ n+1−⌊nx⌋, R²ᵢ ≥ n+1−⌊ny⌋}`.
//!
//! All estimators downstream only see ranks, so every result here is
//! invariant under strictly increasing transformations of the margins.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TailError};
use crate::rect::Rectangle;

/// Marginal ranks of an `n × d` data matrix; rank `n` is the largest value.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedSample {
    n: usize,
    d: usize,
    // column-major: ranks[j * n + i]
    ranks: Vec<u32>,
    tied_columns: Vec<usize>,
}

impl RankedSample {
    /// Columnwise ranks. Ties are broken by order of occurrence and the
    /// affected columns are reported by [`RankedSample::tied_columns`].
    pub fn from_data(data: &DMatrix<f64>) -> Result<Self> {
        let (n, d) = data.shape();
        if n < 2 || d < 1 {
            return Err(TailError::InvalidInput(format!("need at least 2 rows and 1 column, got {n}x{d}")));
        }
        if let Some((i, j)) = (0..d).flat_map(|j| (0..n).map(move |i| (i, j))).find(|&(i, j)| !data[(i, j)].is_finite()) {
            return Err(TailError::NonFiniteInput { row: i, col: j });
        }
        let mut ranks = vec![0u32; n * d];
        let mut tied_columns = Vec::new();
        let mut order: Vec<usize> = Vec::with_capacity(n);
        for j in 0..d {
            let col = data.column(j);
            order.clear();
            order.extend(0..n);
            // stable: equal values keep their order of occurrence
            order.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
            if order.windows(2).any(|w| col[w[0]] == col[w[1]]) {
                tied_columns.push(j);
            }
            for (r, &i) in order.iter().enumerate() {
                ranks[j * n + i] = (r + 1) as u32;
            }
        }
        Ok(Self { n, d, ranks, tied_columns })
    }

    /// Builds a sample from precomputed ranks (each column a permutation of `1..=n`).
    pub fn from_ranks(n: usize, columns: Vec<Vec<u32>>) -> Result<Self> {
        if n < 2 || columns.is_empty() {
            return Err(TailError::InvalidInput("need n >= 2 and at least one column".into()));
        }
        let mut ranks = Vec::with_capacity(n * columns.len());
        for (j, col) in columns.iter().enumerate() {
            let mut seen = vec![false; n];
            if col.len() != n {
                return Err(TailError::InvalidInput(format!("rank column {j} has length {}", col.len())));
            }
            for &r in col {
                let r = r as usize;
                if r == 0 || r > n || seen[r - 1] {
                    return Err(TailError::InvalidInput(format!("rank column {j} is not a permutation of 1..={n}")));
                }
                seen[r - 1] = true;
            }
            ranks.extend_from_slice(col);
        }
        Ok(Self { n, d: columns.len(), ranks, tied_columns: Vec::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.ranks[j * self.n..(j + 1) * self.n]
    }

    pub fn tied_columns(&self) -> &[usize] {
        &self.tied_columns
    }

    pub fn has_ties(&self) -> bool {
        !self.tied_columns.is_empty()
    }

    fn check_pair(&self, pair: (usize, usize)) -> Result<()> {
        if pair.0 >= self.d || pair.1 >= self.d {
            return Err(TailError::InvalidInput(format!("pair {pair:?} out of range for d={}", self.d)));
        }
        Ok(())
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n {
            return Err(TailError::InvalidInput(format!("k={k} must lie in 1..={}", self.n)));
        }
        Ok(())
    }

    /// Joint exceedance count `n·Q̂ₙ(kx/n, ky/n)`.
    pub fn joint_count(&self, pair: (usize, usize), k: usize, x: f64, y: f64) -> Result<usize> {
        self.check_pair(pair)?;
        self.check_k(k)?;
        if !(x >= 0.0 && y >= 0.0) {
            return Err(TailError::InvalidInput(format!("x, y must be nonnegative, got ({x}, {y})")));
        }
        let n1 = self.n as f64 + 1.0;
        let tx = n1 - (k as f64 * x).floor();
        let ty = n1 - (k as f64 * y).floor();
        let (a, b) = (self.column(pair.0), self.column(pair.1));
        Ok(a.iter().zip(b).filter(|(&r1, &r2)| r1 as f64 >= tx && r2 as f64 >= ty).count())
    }

    /// `Q̂ₙ(kx/n, ky/n)`.
    pub fn empirical_q(&self, pair: (usize, usize), k: usize, x: f64, y: f64) -> Result<f64> {
        Ok(self.joint_count(pair, k, x, y)? as f64 / self.n as f64)
    }

    /// Ratio estimator `c̃ₙ(x, y) = Q̂ₙ(kx/n, ky/n) / Q̂ₙ(k/n, k/n)`.
    pub fn tilde_c(&self, pair: (usize, usize), k: usize, x: f64, y: f64) -> Result<f64> {
        let denom = self.joint_count(pair, k, 1.0, 1.0)?;
        if denom == 0 {
            return Err(TailError::ZeroDenominator);
        }
        Ok(self.joint_count(pair, k, x, y)? as f64 / denom as f64)
    }

    /// Smallest `k` with `n·Q̂ₙ(k/n, k/n) ≥ m`.
    ///
    /// The joint count is a step function of `k` that can jump by more
    /// than one, so the achieved count is reported as `resolved_m`.
    pub fn select_khat(&self, pair: (usize, usize), m: usize) -> Result<TailIndexChoice> {
        self.check_pair(pair)?;
        if m == 0 || m > self.n {
            return Err(TailError::InvalidInput(format!("m={m} must lie in 1..={}", self.n)));
        }
        // point i is counted at level k iff k >= n + 1 - min(R¹ᵢ, R²ᵢ)
        let n1 = self.n as u32 + 1;
        let (a, b) = (self.column(pair.0), self.column(pair.1));
        let mut levels: Vec<u32> = a.iter().zip(b).map(|(&r1, &r2)| n1 - r1.min(r2)).collect();
        let (_, &mut k, _) = levels.select_nth_unstable(m - 1);
        let count = levels.iter().filter(|&&l| l <= k).count();
        Ok(TailIndexChoice { mode: TailIndexMode::EffectiveM(m), resolved_k: k as usize, resolved_m: count as f64 })
    }

    /// Resolves a thresholding mode into `(k, m)` for one pair.
    pub fn resolve(&self, pair: (usize, usize), mode: TailIndexMode) -> Result<TailIndexChoice> {
        match mode {
            TailIndexMode::FixedK(k) => {
                let count = self.joint_count(pair, k, 1.0, 1.0)?;
                Ok(TailIndexChoice { mode, resolved_k: k, resolved_m: count as f64 })
            }
            TailIndexMode::EffectiveM(m) => self.select_khat(pair, m),
        }
    }

    /// Tail points of a pair at level `k`, for exact rectangle integrals of `Q̂ₙ`.
    pub fn pair_tail(&self, pair: (usize, usize), k: usize, t_max: f64) -> Result<PairTail> {
        self.check_pair(pair)?;
        self.check_k(k)?;
        let n1 = self.n as f64 + 1.0;
        let kf = k as f64;
        let points = self
            .column(pair.0)
            .iter()
            .zip(self.column(pair.1))
            .map(|(&r1, &r2)| ((n1 - r1 as f64) / kf, (n1 - r2 as f64) / kf))
            .filter(|&(u, v)| u < t_max && v < t_max)
            .collect();
        Ok(PairTail { n: self.n, k, t_max, points })
    }

    /// `∫∫_rect Q̂ₙ(kx/n, ky/n) dx dy`, exact.
    pub fn rect_integral_q(&self, pair: (usize, usize), k: usize, rect: &Rectangle) -> Result<f64> {
        Ok(self.pair_tail(pair, k, rect.max_corner())?.rect_integral(rect))
    }
}

/// Shorthand for [`RankedSample::from_data`].
pub fn rank_transform(data: &DMatrix<f64>) -> Result<RankedSample> {
    RankedSample::from_data(data)
}

/// Points `(uᵢ, vᵢ) = ((n+1−R¹ᵢ)/k, (n+1−R²ᵢ)/k)` lying in `[0, t_max)²`.
///
/// `Q̂ₙ(kx/n, ky/n) = n⁻¹ #{i : uᵢ ≤ x, vᵢ ≤ y}` up to a null set, so the
/// integral over a rectangle is a sum of clipped box areas.
#[derive(Debug, Clone)]
pub struct PairTail {
    n: usize,
    k: usize,
    t_max: f64,
    points: Vec<(f64, f64)>,
}

impl PairTail {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact integral over `rect`; `rect` must lie inside `[0, t_max]²`.
    pub fn rect_integral(&self, rect: &Rectangle) -> f64 {
        debug_assert!(rect.max_corner() <= self.t_max);
        let sum: f64 = self
            .points
            .iter()
            .map(|&(u, v)| (rect.x_hi - u.max(rect.x_lo)).max(0.0) * (rect.y_hi - v.max(rect.y_lo)).max(0.0))
            .sum();
        sum / self.n as f64
    }
}

/// How the intermediate sequence `k` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailIndexMode {
    FixedK(usize),
    /// Choose `k̂` so that about `m` joint exceedances fall in `[0,1]²`.
    EffectiveM(usize),
}

/// A resolved thresholding choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailIndexChoice {
    pub mode: TailIndexMode,
    pub resolved_k: usize,
    /// `n·Q̂ₙ(k/n, k/n)` at the resolved `k`.
    pub resolved_m: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> RankedSample {
        // rank pairs {(4,4),(4,3),(3,4),(1,2)} would repeat rank 4, so use
        // an equivalent valid layout for the first column
        RankedSample::from_ranks(4, vec![vec![4, 2, 3, 1], vec![4, 3, 2, 1]]).unwrap()
    }

    #[test]
    fn rank_examples() {
        let data = DMatrix::from_column_slice(3, 1, &[3.2, 1.1, 7.7]);
        let s = rank_transform(&data).unwrap();
        assert_eq!(s.column(0), &[2, 1, 3]);
        assert!(!s.has_ties());
        let data = DMatrix::from_column_slice(3, 1, &[5.0, 5.0, 1.0]);
        let s = rank_transform(&data).unwrap();
        assert_eq!(s.column(0), &[2, 3, 1]);
        assert_eq!(s.tied_columns(), &[0]);
        let data = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let s = rank_transform(&data).unwrap();
        assert_eq!(s.column(0), &[1, 2]);
        assert_eq!(s.column(1), &[2, 1]);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, 2.0, 1.0]);
        assert_eq!(rank_transform(&bad), Err(TailError::NonFiniteInput { row: 0, col: 1 }));
    }

    #[test]
    fn empirical_q_counts() {
        // paired ranks (4,4), (2,3), (3,2), (1,1)
        let s = toy();
        assert_eq!(s.empirical_q((0, 1), 2, 0.0, 1.0).unwrap(), 0.0);
        // threshold n+1-⌊2⌋ = 3: (4,4) only
        assert_eq!(s.empirical_q((0, 1), 2, 1.0, 1.0).unwrap(), 0.25);
        assert_eq!(s.empirical_q((0, 1), 2, 2.0, 2.0).unwrap(), 1.0);
        assert_eq!(s.tilde_c((0, 1), 2, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(s.tilde_c((0, 1), 2, 2.0, 2.0).unwrap(), 4.0);
        assert_eq!(s.tilde_c((0, 1), 2, 0.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_denominator() {
        let s = RankedSample::from_ranks(4, vec![vec![4, 3, 2, 1], vec![1, 2, 3, 4]]).unwrap();
        assert_eq!(s.tilde_c((0, 1), 1, 1.0, 1.0), Err(TailError::ZeroDenominator));
    }

    #[test]
    fn khat_selection() {
        let s = toy();
        // levels n+1-min: (4,4)->1, (2,3)->3, (3,2)->3, (1,1)->4
        let c = s.select_khat((0, 1), 1).unwrap();
        assert_eq!((c.resolved_k, c.resolved_m), (1, 1.0));
        let c = s.select_khat((0, 1), 2).unwrap();
        // count jumps from 1 to 3 at k = 3
        assert_eq!((c.resolved_k, c.resolved_m), (3, 3.0));
        assert!(s.select_khat((0, 1), 0).is_err());
        let como = RankedSample::from_ranks(5, vec![vec![1, 2, 3, 4, 5], vec![1, 2, 3, 4, 5]]).unwrap();
        assert_eq!(como.select_khat((0, 1), 5).unwrap().resolved_k, 5);
    }

    #[test]
    fn rect_integral_toy() {
        let s = toy();
        let unit = Rectangle::square(0.0, 1.0).unwrap();
        // only (4,4) -> (0.5, 0.5) contributes (1-0.5)²/4
        assert_eq!(s.rect_integral_q((0, 1), 2, &unit).unwrap(), 0.0625);
        let far = Rectangle::square(0.0, 0.2).unwrap();
        assert_eq!(s.rect_integral_q((0, 1), 2, &far).unwrap(), 0.0);
        let mut last = 0.0;
        for t in [1.0, 2.0, 4.0, 8.0] {
            let v = s.rect_integral_q((0, 1), 2, &Rectangle::square(0.0, t).unwrap()).unwrap();
            assert!(v >= last);
            last = v;
        }
    }
}
