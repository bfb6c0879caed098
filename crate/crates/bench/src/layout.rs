//! Fixed location layouts for spatial studies.

/// Ten locations in a 2.1 × 2.1 square; pairwise distances range from
/// about 0.42 to 2.83, inside the `[0, 3]` band used for curve errors.
pub const DESK_LAYOUT_10: [[f64; 2]; 10] = [
    [0.0, 0.0],
    [0.9, 0.2],
    [1.8, 0.1],
    [0.3, 1.0],
    [1.2, 1.1],
    [2.1, 0.9],
    [0.1, 2.0],
    [1.0, 1.9],
    [1.9, 2.1],
    [0.6, 0.5],
];

pub fn desk_layout() -> Vec<[f64; 2]> {
    DESK_LAYOUT_10.to_vec()
}

/// Indices of `count` pairs spread evenly over the sorted distances.
pub fn spread_pairs(distances: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]).then(a.cmp(&b)));
    if count == 0 || order.is_empty() {
        return Vec::new();
    }
    if count == 1 {
        return vec![order[order.len() / 2]];
    }
    let mut picks: Vec<usize> = (0..count)
        .map(|i| order[(i * (order.len() - 1) + (count - 1) / 2) / (count - 1)])
        .collect();
    picks.dedup();
    picks
}
