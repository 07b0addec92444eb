//! Support-point filtering.
//!
//! Two independent rules clean the raw support stream:
//!
//! * the consistency filter keeps a point only when enough nearby points
//!   agree with its disparity (a symmetric, whole-frame rule);
//! * the redundancy filter drops a point when an already kept point close
//!   by on the same row or column carries nearly the same disparity.
//!
//! The redundancy rule looks strictly backwards in stream order. That makes
//! it a one-pass online filter: filtering any prefix of a stream yields the
//! prefix of the filtered stream, so the batch and streaming executors can
//! share it verbatim. [`redundancy_filter_bidirectional`] implements the
//! symmetric variant of the same rule; it exists only as a reference to
//! demonstrate that the symmetric search lacks the prefix property (mutual
//! redundancy can erase a value entirely).

use alloc::vec::Vec;

use crate::sparse::SupportPoint;

/// Filtering configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterConfig {
    /// Consistency window half-edge over `u` and `v`.
    pub consistency_radius: u32,
    /// Maximum disparity difference for a point to count as consistent.
    pub consistency_tolerance: u16,
    /// Minimum number of consistent other points required to keep a point.
    pub min_consistent: usize,
    /// Redundancy search distance along a row or column.
    pub redundancy_radius: u32,
    /// Maximum disparity difference for a point to count as redundant.
    pub redundancy_tolerance: u16,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            consistency_radius: 10,
            consistency_tolerance: 5,
            min_consistent: 2,
            redundancy_radius: 5,
            redundancy_tolerance: 1,
        }
    }
}

#[inline]
fn close(a: u16, b: u16, tol: u16) -> bool {
    a.abs_diff(b) <= tol
}

/// Keeps `p` iff at least `min_consistent` other points lie within the
/// `consistency_radius` window around it (in both `u` and `v`) with a
/// disparity within `consistency_tolerance`. Order is preserved.
pub fn consistency_filter(points: &[SupportPoint], cfg: &FilterConfig) -> Vec<SupportPoint> {
    use alloc::collections::BTreeMap;
    let mut rows: BTreeMap<u32, Vec<(u32, u16)>> = BTreeMap::new();
    for p in points {
        rows.entry(p.v).or_default().push((p.u, p.d));
    }
    for row in rows.values_mut() {
        row.sort_unstable();
    }
    let r = cfg.consistency_radius;
    points
        .iter()
        .filter(|p| {
            let mut needed = cfg.min_consistent + 1; // +1: p counts itself once
            let v_lo = p.v.saturating_sub(r);
            for (_, row) in rows.range(v_lo..=p.v + r) {
                let u_lo = p.u.saturating_sub(r);
                let start = row.partition_point(|&(u, _)| u < u_lo);
                for &(u, d) in &row[start..] {
                    if u > p.u + r {
                        break;
                    }
                    if close(d, p.d, cfg.consistency_tolerance) {
                        needed -= 1;
                        if needed == 0 {
                            return true;
                        }
                    }
                }
            }
            false
        })
        .copied()
        .collect()
}

/// Online backwards-only redundancy filter.
///
/// Feed points in row-major stream order; `push` answers whether the point
/// is kept. A point is dropped iff an already kept point `q` precedes it
/// with `|d_p - d_q| <= redundancy_tolerance` and either the same row and
/// `|u_p - u_q| <= redundancy_radius`, or the same column and
/// `|v_p - v_q| <= redundancy_radius`.
///
/// State is bounded: the kept points of the current row and, per column,
/// the kept points of the last `redundancy_radius` rows.
pub struct RedundancyFilter {
    cfg: FilterConfig,
    row: Option<u32>,
    row_kept: Vec<SupportPoint>,
    /// Per column: kept (v, d) pairs, pruned to the trailing window.
    col_kept: Vec<Vec<(u32, u16)>>,
}

impl RedundancyFilter {
    pub fn new(cfg: FilterConfig, width: usize) -> Self {
        let mut col_kept = Vec::new();
        col_kept.resize_with(width, Vec::new);
        RedundancyFilter {
            cfg,
            row: None,
            row_kept: Vec::new(),
            col_kept,
        }
    }

    /// Processes the next point of the stream; returns whether it is kept.
    pub fn push(&mut self, p: SupportPoint) -> bool {
        if self.row != Some(p.v) {
            debug_assert!(self.row.map_or(true, |v| v < p.v), "stream must be row-major");
            self.row = Some(p.v);
            self.row_kept.clear();
        }
        let r = self.cfg.redundancy_radius;
        let tol = self.cfg.redundancy_tolerance;
        let redundant_in_row = self
            .row_kept
            .iter()
            .rev()
            .take_while(|q| q.u + r >= p.u)
            .any(|q| close(q.d, p.d, tol));
        if redundant_in_row {
            return false;
        }
        let col = &mut self.col_kept[p.u as usize];
        col.retain(|&(v, _)| v + r >= p.v);
        if col.iter().any(|&(_, d)| close(d, p.d, tol)) {
            return false;
        }
        self.row_kept.push(p);
        col.push((p.v, p.d));
        true
    }
}

/// Runs [`RedundancyFilter`] over a row-major point list.
pub fn redundancy_filter_backwards(points: &[SupportPoint], cfg: &FilterConfig) -> Vec<SupportPoint> {
    let width = points.iter().map(|p| p.u as usize + 1).max().unwrap_or(0);
    let mut filter = RedundancyFilter::new(*cfg, width);
    points.iter().copied().filter(|&p| filter.push(p)).collect()
}

/// Symmetric redundancy search (reference variant, not used by the
/// pipeline): a point is dropped when *any* other input point, before or
/// after it, matches the row/column proximity rule. Runs of mutually
/// redundant points annihilate entirely, which is exactly why this variant
/// cannot be computed as a prefix-respecting stream filter.
pub fn redundancy_filter_bidirectional(
    points: &[SupportPoint],
    cfg: &FilterConfig,
) -> Vec<SupportPoint> {
    let r = cfg.redundancy_radius;
    let tol = cfg.redundancy_tolerance;
    points
        .iter()
        .enumerate()
        .filter(|&(i, p)| {
            !points.iter().enumerate().any(|(j, q)| {
                j != i
                    && close(q.d, p.d, tol)
                    && ((q.v == p.v && q.u.abs_diff(p.u) <= r)
                        || (q.u == p.u && q.v.abs_diff(p.v) <= r))
            })
        })
        .map(|(_, &p)| p)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(u: u32, v: u32, d: u16) -> SupportPoint {
        SupportPoint { u, v, d }
    }

    /// Quadratic reference for the consistency rule.
    fn consistency_oracle(points: &[SupportPoint], cfg: &FilterConfig) -> Vec<SupportPoint> {
        points
            .iter()
            .enumerate()
            .filter(|&(i, p)| {
                points
                    .iter()
                    .enumerate()
                    .filter(|&(j, q)| {
                        j != i
                            && q.u.abs_diff(p.u) <= cfg.consistency_radius
                            && q.v.abs_diff(p.v) <= cfg.consistency_radius
                            && q.d.abs_diff(p.d) <= cfg.consistency_tolerance
                    })
                    .count()
                    >= cfg.min_consistent
            })
            .map(|(_, &p)| p)
            .collect()
    }

    /// Quadratic reference for the backwards rule: scan all previously
    /// kept points directly.
    fn redundancy_oracle(points: &[SupportPoint], cfg: &FilterConfig) -> Vec<SupportPoint> {
        let mut kept: Vec<SupportPoint> = Vec::new();
        for &p in points {
            let redundant = kept.iter().any(|q| {
                q.d.abs_diff(p.d) <= cfg.redundancy_tolerance
                    && ((q.v == p.v && q.u.abs_diff(p.u) <= cfg.redundancy_radius)
                        || (q.u == p.u && q.v.abs_diff(p.v) <= cfg.redundancy_radius))
            });
            if !redundant {
                kept.push(p);
            }
        }
        kept
    }

    fn random_stream(seed: u64, n: usize, width: u32, height: u32) -> Vec<SupportPoint> {
        // Deterministic row-major stream with clustered disparities.
        let mut s = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let mut points = Vec::new();
        for v in 0..height {
            for u in 0..width {
                if next() % 3 == 0 {
                    points.push(pt(u, v, (next() % 8) as u16));
                    if points.len() == n {
                        return points;
                    }
                }
            }
        }
        points
    }

    #[test]
    fn isolated_point_is_dropped() {
        let cfg = FilterConfig::default();
        assert!(consistency_filter(&[pt(50, 50, 10)], &cfg).is_empty());
    }

    #[test]
    fn consistent_cluster_is_kept_and_outlier_dropped() {
        let cfg = FilterConfig::default();
        // Three mutually visible points with close disparities, plus one
        // with a wild disparity in the same window.
        let points = [pt(40, 40, 12), pt(45, 42, 14), pt(38, 47, 10), pt(42, 44, 60)];
        let kept = consistency_filter(&points, &cfg);
        assert_eq!(kept, vec![pt(40, 40, 12), pt(45, 42, 14), pt(38, 47, 10)]);
    }

    #[test]
    fn exactly_k_neighbors_suffice() {
        let cfg = FilterConfig::default();
        // p has exactly two others within the window and tolerance.
        let points = [pt(10, 10, 5), pt(15, 12, 8), pt(5, 18, 3)];
        let kept = consistency_filter(&points, &cfg);
        assert_eq!(kept.len(), 3);
    }

    #[test]
    fn consistency_matches_quadratic_oracle() {
        let cfg = FilterConfig::default();
        for seed in 0..8 {
            let points = random_stream(seed, 400, 120, 90);
            assert_eq!(consistency_filter(&points, &cfg), consistency_oracle(&points, &cfg));
        }
    }

    #[test]
    fn run_of_equal_points_keeps_every_sixth() {
        let cfg = FilterConfig::default();
        let run: Vec<_> = (0..13).map(|u| pt(u, 3, 9)).collect();
        let kept = redundancy_filter_backwards(&run, &cfg);
        assert_eq!(kept, vec![pt(0, 3, 9), pt(6, 3, 9), pt(12, 3, 9)]);
    }

    #[test]
    fn disparity_tolerance_separates_neighbors() {
        let cfg = FilterConfig::default();
        // Adjacent points whose disparities differ by more than the
        // tolerance are both kept.
        let kept = redundancy_filter_backwards(&[pt(10, 0, 5), pt(11, 0, 7)], &cfg);
        assert_eq!(kept.len(), 2);
        let kept = redundancy_filter_backwards(&[pt(10, 0, 5), pt(11, 0, 6)], &cfg);
        assert_eq!(kept, vec![pt(10, 0, 5)]);
    }

    #[test]
    fn column_rule_uses_kept_points_within_radius() {
        let cfg = FilterConfig::default();
        // Same column: row distance 5 is redundant, 6 is not.
        let kept = redundancy_filter_backwards(&[pt(20, 0, 9), pt(20, 5, 9)], &cfg);
        assert_eq!(kept, vec![pt(20, 0, 9)]);
        let kept = redundancy_filter_backwards(&[pt(20, 0, 9), pt(20, 6, 9)], &cfg);
        assert_eq!(kept.len(), 2);
        // A dropped point must not shadow later ones: the third point is
        // redundant against the first (kept) point, not the second.
        let kept = redundancy_filter_backwards(
            &[pt(20, 0, 9), pt(20, 3, 9), pt(20, 5, 9)],
            &cfg,
        );
        assert_eq!(kept, vec![pt(20, 0, 9)]);
        // An older kept point within the window still counts even when the
        // nearest kept point has an incompatible disparity.
        let kept = redundancy_filter_backwards(
            &[pt(20, 0, 5), pt(20, 2, 9), pt(20, 3, 5)],
            &cfg,
        );
        assert_eq!(kept, vec![pt(20, 0, 5), pt(20, 2, 9)]);
    }

    #[test]
    fn matches_quadratic_reference() {
        let cfg = FilterConfig::default();
        for seed in 0..12 {
            let points = random_stream(seed, 500, 160, 60);
            assert_eq!(
                redundancy_filter_backwards(&points, &cfg),
                redundancy_oracle(&points, &cfg),
                "seed {}",
                seed
            );
        }
    }

    #[test]
    fn backwards_filter_is_idempotent() {
        let cfg = FilterConfig::default();
        for seed in 0..6 {
            let points = random_stream(seed, 300, 100, 50);
            let once = redundancy_filter_backwards(&points, &cfg);
            assert_eq!(redundancy_filter_backwards(&once, &cfg), once);
        }
    }

    #[test]
    fn prefix_of_stream_filters_to_prefix_of_output() {
        let cfg = FilterConfig::default();
        let points = random_stream(99, 400, 140, 70);
        let full = redundancy_filter_backwards(&points, &cfg);
        for cut in [0, 1, 17, 100, 399, points.len()] {
            let prefix_out = redundancy_filter_backwards(&points[..cut], &cfg);
            assert!(full.starts_with(&prefix_out));
            // The prefix output is exactly the filtered points that fall
            // inside the prefix.
            let expected: Vec<_> = full
                .iter()
                .copied()
                .filter(|p| points[..cut].contains(p))
                .collect();
            assert_eq!(prefix_out, expected);
        }
    }

    #[test]
    fn bidirectional_variant_lacks_the_prefix_property() {
        let cfg = FilterConfig::default();
        // Two mutually redundant points erase each other entirely.
        let pair = [pt(10, 0, 4), pt(12, 0, 4)];
        assert!(redundancy_filter_bidirectional(&pair, &cfg).is_empty());
        // But the one-point prefix survives on its own: the filtered
        // prefix is not a prefix of the filtered stream.
        let prefix_out = redundancy_filter_bidirectional(&pair[..1], &cfg);
        assert_eq!(prefix_out, vec![pt(10, 0, 4)]);
        // The backwards rule anchors the first point instead.
        assert_eq!(
            redundancy_filter_backwards(&pair, &cfg),
            vec![pt(10, 0, 4)]
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn filters_are_order_preserving_subsets(seed in 0u64..500) {
            let cfg = FilterConfig::default();
            let points = random_stream(seed, 200, 90, 40);
            for out in [
                redundancy_filter_backwards(&points, &cfg),
                consistency_filter(&points, &cfg),
            ] {
                // Subset test doubling as an order test: advance through the
                // input for each output element in turn.
                let mut it = points.iter();
                for p in &out {
                    prop_assert!(it.any(|q| q == p));
                }
            }
        }

        #[test]
        fn streaming_state_machine_agrees_with_batch(seed in 0u64..200) {
            let cfg = FilterConfig::default();
            let points = random_stream(seed, 250, 100, 60);
            let mut filter = RedundancyFilter::new(cfg, 100);
            let streamed: Vec<_> = points.iter().copied().filter(|&p| filter.push(p)).collect();
            prop_assert_eq!(streamed, redundancy_filter_backwards(&points, &cfg));
        }
    }
}
