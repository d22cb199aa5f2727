//! From spectra to network statistics: spectral moments, convex-hull area
//! moments, degree bounds and clustering of eigenvector-ratio vectors.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default separation (as a fraction of the largest real part) below which
/// an estimated eigenvalue counts as the zero eigenvalue when picking λ₂.
pub const DEFAULT_ZERO_SEP_FRAC: f64 = 0.05;

/// First two spectral moments estimated from an eigenvalue multiset.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentEstimate {
    /// Mean of the real parts: estimate of (1/n)·tr(L).
    pub m1: f64,
    /// Real part of the mean of λ²: estimate of (1/n)·tr(L²).
    pub m2: f64,
    /// Leftover imaginary mass; nonzero when the multiset is not closed
    /// under conjugation. Diagnostic only.
    pub imag_residual: f64,
}

pub fn moments_from_spectrum(lambdas: &[Complex64]) -> Result<MomentEstimate> {
    if lambdas.is_empty() {
        return Err(Error::Parameter("empty eigenvalue list".into()));
    }
    let n = lambdas.len() as f64;
    let sum: Complex64 = lambdas.iter().sum();
    let sum_sq: Complex64 = lambdas.iter().map(|l| l * l).sum();
    let mean = sum / n;
    let mean_sq = sum_sq / n;
    Ok(MomentEstimate {
        m1: mean.re,
        m2: mean_sq.re,
        imag_residual: mean.im.abs().max(mean_sq.im.abs()),
    })
}

/// A counterclockwise convex polygon.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexHull {
    pub vertices: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Planar convex hull of eigenvalue points `(Re λ, Im λ)` by the monotone
/// chain algorithm. Fails with a degenerate-hull signal for fewer than
/// three non-collinear points; the caller then falls back to full-spectrum
/// moments.
pub fn hull_of(points: &[Complex64]) -> Result<ConvexHull> {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|l| (l.re, l.im)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegenerateHull(format!(
            "{} distinct points; need at least 3",
            pts.len()
        )));
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateHull("all points are collinear".into()));
    }
    Ok(ConvexHull { vertices: lower })
}

impl ConvexHull {
    /// Signed area (positive: counterclockwise).
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut acc = 0.0;
        for i in 0..n {
            let (x1, y1) = v[i];
            let (x2, y2) = v[(i + 1) % n];
            acc += x1 * y2 - x2 * y1;
        }
        acc / 2.0
    }

    /// Max pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, &(x1, y1)) in self.vertices.iter().enumerate() {
            for &(x2, y2) in &self.vertices[i + 1..] {
                best = best.max(((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt());
            }
        }
        best
    }

    /// True if the point lies inside or on the hull (counterclockwise).
    pub fn contains(&self, p: (f64, f64), tol: f64) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= -tol)
    }

    /// CSV document `x,y`, one vertex per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for &(x, y) in &self.vertices {
            out.push_str(&format!("{x:.16e},{y:.16e}\n"));
        }
        out
    }
}

/// Area moments of a convex hull, computed exactly per polygon edge via the
/// divergence theorem: `M1 = (∬x dA)/A`, `M2 = (∬(x²−y²) dA)/A`.
pub fn hull_moments(hull: &ConvexHull) -> Result<(f64, f64)> {
    let v = &hull.vertices;
    let n = v.len();
    let mut area2 = 0.0; // 2A
    let mut sx = 0.0; // 6 ∬x dA
    let mut sxx = 0.0; // 12 ∬x² dA
    let mut syy = 0.0; // 12 ∬y² dA
    for i in 0..n {
        let (x1, y1) = v[i];
        let (x2, y2) = v[(i + 1) % n];
        let w = x1 * y2 - x2 * y1;
        area2 += w;
        sx += (x1 + x2) * w;
        sxx += (x1 * x1 + x1 * x2 + x2 * x2) * w;
        syy += (y1 * y1 + y1 * y2 + y2 * y2) * w;
    }
    let area = area2 / 2.0;
    if area.abs() < f64::MIN_POSITIVE.sqrt() {
        return Err(Error::DegenerateHull("hull has zero area".into()));
    }
    let m1 = sx / 6.0 / area;
    let m2 = (sxx - syy) / 12.0 / area;
    Ok((m1, m2))
}

/// Fiedler-style degree bounds from the extreme Laplacian eigenvalues of an
/// undirected network: `d_min ≥ ((n−1)/n)·λ₂`, `d_max ≤ ((n−1)/n)·λₙ`.
pub fn degree_bounds(lambda2: f64, lambda_n: f64, n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Parameter(format!("degree bounds need n >= 2, got {n}")));
    }
    let factor = (n - 1) as f64 / n as f64;
    Ok((factor * lambda2, factor * lambda_n))
}

/// Interval that sandwiches the mean quadratic degree:
/// `max(M1², M2/2) ≤ (1/n)Σ dᵢ² ≤ M2`.
pub fn quadratic_mean_bounds(m1: f64, m2: f64) -> Result<[f64; 2]> {
    if m2 < 0.0 {
        return Err(Error::Parameter(format!("M2 = {m2} must be >= 0")));
    }
    Ok([(m1 * m1).max(m2 / 2.0), m2])
}

/// Mean number of edges per node: estimated mean degree divided by the mean
/// edge weight.
pub fn mean_edges_per_node(m1: f64, mean_weight: f64) -> Result<f64> {
    if !(mean_weight > 0.0) {
        return Err(Error::Parameter(format!(
            "mean edge weight {mean_weight} must be > 0"
        )));
    }
    Ok(m1 / mean_weight)
}

/// Real parts of the algebraic connectivity λ₂ and the largest eigenvalue
/// λₙ picked out of an estimated spectrum. λ₂ is the smallest real part
/// strictly above `zero_sep_frac · max Re λ` (falling back to the
/// second-smallest real part when nothing clears the separation).
pub fn spectrum_extremes(lambdas: &[Complex64], zero_sep_frac: f64) -> Result<(f64, f64)> {
    if lambdas.len() < 2 {
        return Err(Error::Parameter("need at least two eigenvalues".into()));
    }
    let mut res: Vec<f64> = lambdas.iter().map(|l| l.re).collect();
    res.sort_by(f64::total_cmp);
    let lambda_n = *res.last().unwrap();
    let zero_sep = zero_sep_frac * lambda_n.max(0.0);
    let lambda2 = res
        .iter()
        .copied()
        .find(|&r| r > zero_sep)
        .unwrap_or(res[1]);
    Ok((lambda2, lambda_n))
}

/// Heuristic diagnostic: true when the estimated eigenvalues split into two
/// lobes separated (along the real axis) by more than half the spectrum
/// spread, in which case a single convex hull over-covers the spectrum.
pub fn split_spectrum_warning(lambdas: &[Complex64]) -> bool {
    if lambdas.len() < 4 {
        return false;
    }
    let mut res: Vec<f64> = lambdas.iter().map(|l| l.re).collect();
    res.sort_by(f64::total_cmp);
    let spread = res[res.len() - 1] - res[0];
    if spread <= 0.0 {
        return false;
    }
    let max_gap = res.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    max_gap > 0.5 * spread
}

/// k-means labels plus the within-cluster scatter of the winning restart.
#[derive(Debug, Clone, Serialize)]
pub struct ClusterResult {
    pub labels: Vec<usize>,
    pub scatter: f64,
}

/// k-means (k-means++ seeding, 50 restarts, deterministic) on the real
/// ratio vectors of the measured nodes.
pub fn cluster_by_ratios(points: &[[f64; 2]], k: usize, seed: u64) -> Result<ClusterResult> {
    if k == 0 {
        return Err(Error::Parameter("cluster count must be >= 1".into()));
    }
    if points.len() < k {
        return Err(Error::Parameter(format!(
            "{} points cannot form {k} clusters",
            points.len()
        )));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("ratio vectors must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<ClusterResult> = None;
    for _ in 0..50 {
        let candidate = kmeans_once(points, k, &mut rng);
        if best.as_ref().map_or(true, |b| candidate.scatter < b.scatter) {
            best = Some(candidate);
        }
    }
    Ok(best.unwrap())
}

fn dist_sq(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn kmeans_once(points: &[[f64; 2]], k: usize, rng: &mut ChaCha8Rng) -> ClusterResult {
    let n = points.len();
    // k-means++ seeding.
    let mut centers: Vec<[f64; 2]> = Vec::with_capacity(k);
    centers.push(points[rng.random_range(0..n)]);
    while centers.len() < k {
        let weights: Vec<f64> = points
            .iter()
            .map(|&p| {
                centers
                    .iter()
                    .map(|&c| dist_sq(p, c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let next = if total <= 0.0 {
            // All mass on existing centers: any point works.
            rng.random_range(0..n)
        } else {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, w) in weights.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centers.push(points[next]);
    }

    let mut labels = vec![0usize; n];
    for _ in 0..100 {
        let mut changed = false;
        for (i, &p) in points.iter().enumerate() {
            let mut best = (0usize, f64::INFINITY);
            for (c, &center) in centers.iter().enumerate() {
                let d = dist_sq(p, center);
                if d < best.1 {
                    best = (c, d);
                }
            }
            if labels[i] != best.0 {
                labels[i] = best.0;
                changed = true;
            }
        }
        // Recompute centers; an emptied cluster grabs the point farthest
        // from its center.
        for c in 0..k {
            let members: Vec<&[f64; 2]> = points
                .iter()
                .zip(&labels)
                .filter(|&(_, &l)| l == c)
                .map(|(p, _)| p)
                .collect();
            if members.is_empty() {
                let (far_idx, _) = points
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| (i, dist_sq(p, centers[labels[i]])))
                    .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
                labels[far_idx] = c;
                centers[c] = points[far_idx];
                changed = true;
                continue;
            }
            let mut mean = [0.0, 0.0];
            for p in &members {
                mean[0] += p[0];
                mean[1] += p[1];
            }
            mean[0] /= members.len() as f64;
            mean[1] /= members.len() as f64;
            centers[c] = mean;
        }
        if !changed {
            break;
        }
    }
    let scatter = points
        .iter()
        .zip(&labels)
        .map(|(&p, &l)| dist_sq(p, centers[l]))
        .sum();
    ClusterResult { labels, scatter }
}

/// True when two labelings agree after the best relabeling of `a`'s
/// clusters (exhaustive over permutations; cluster counts are small).
pub fn labels_match_up_to_permutation(a: &[usize], b: &[usize], k: usize) -> bool {
    if a.len() != b.len() || k > 8 {
        return false;
    }
    fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 1 {
            return vec![vec![0]];
        }
        let mut out = Vec::new();
        for p in permutations(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }
    permutations(k).iter().any(|perm| {
        a.iter()
            .zip(b)
            .all(|(&la, &lb)| la < k && lb < k && perm[la] == lb)
    })
}

/// Aggregate network statistics derived from an estimated spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralSummary {
    pub mode: SummaryMode,
    pub m1: f64,
    pub m2: f64,
    /// Mean degree estimate (equals `m1`).
    pub d1: f64,
    /// `[lower, upper]` interval for the mean quadratic degree.
    pub d2_bounds: [f64; 2],
    pub lambda2: f64,
    pub lambda_n: f64,
    pub dmin_bound: f64,
    pub dmax_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_edges: Option<f64>,
    pub imag_residual: f64,
    pub split_spectrum_warning: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummaryMode {
    FullSpectrum,
    Hull,
}

/// Build the summary from an estimated eigenvalue multiset.
///
/// In hull mode the moments come from the convex-hull area integrals,
/// falling back to full-spectrum moments when the hull is degenerate;
/// `n` is the (known) node count used for the degree-bound prefactor.
pub fn summarize(
    lambdas: &[Complex64],
    n: usize,
    hull_mode: bool,
    mean_weight: Option<f64>,
    zero_sep_frac: f64,
) -> Result<(SpectralSummary, Option<ConvexHull>)> {
    let point_moments = moments_from_spectrum(lambdas)?;
    let (mode, hull, m1, m2) = if hull_mode {
        match hull_of(lambdas).and_then(|h| hull_moments(&h).map(|m| (h, m))) {
            Ok((h, (m1, m2))) => (SummaryMode::Hull, Some(h), m1, m2),
            Err(Error::DegenerateHull(_)) => (
                SummaryMode::FullSpectrum,
                None,
                point_moments.m1,
                point_moments.m2,
            ),
            Err(e) => return Err(e),
        }
    } else {
        (
            SummaryMode::FullSpectrum,
            None,
            point_moments.m1,
            point_moments.m2,
        )
    };
    let (lambda2, lambda_n) = spectrum_extremes(lambdas, zero_sep_frac)?;
    let (dmin_bound, dmax_bound) = degree_bounds(lambda2, lambda_n, n.max(2))?;
    let d2_bounds = quadratic_mean_bounds(m1, m2.max(0.0))?;
    let mean_edges = match mean_weight {
        Some(w) => Some(mean_edges_per_node(m1, w)?),
        None => None,
    };
    Ok((
        SpectralSummary {
            mode,
            m1,
            m2,
            d1: m1,
            d2_bounds,
            lambda2,
            lambda_n,
            dmin_bound,
            dmax_bound,
            mean_edges,
            imag_residual: point_moments.imag_residual,
            split_spectrum_warning: split_spectrum_warning(lambdas),
        },
        hull,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn moments_of_small_graphs() {
        let p2 = [c(0.0, 0.0), c(2.0, 0.0)];
        let m = moments_from_spectrum(&p2).unwrap();
        assert_eq!((m.m1, m.m2), (1.0, 2.0));

        let k3 = [c(0.0, 0.0), c(3.0, 0.0), c(3.0, 0.0)];
        let m = moments_from_spectrum(&k3).unwrap();
        assert_eq!((m.m1, m.m2), (2.0, 6.0));
    }

    #[test]
    fn moments_conjugate_pairs_cancel() {
        let lams = [c(1.0, 2.0), c(1.0, -2.0), c(0.5, 0.0)];
        let m = moments_from_spectrum(&lams).unwrap();
        assert!(m.imag_residual < 1e-15);
        // mean λ² = ((1+2i)² + (1-2i)² + 0.25)/3 = (-3 - 3 + 0.25)/3.
        assert_abs_diff_eq!(m.m2, (-6.0 + 0.25) / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn hull_of_square() {
        let pts = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)];
        let hull = hull_of(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 4);
        assert!(hull.area() > 0.0, "vertices must be counterclockwise");
    }

    #[test]
    fn hull_excludes_interior_point() {
        let pts = [
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 1.0),
            c(0.0, 1.0),
            c(0.5, 0.5),
        ];
        let hull = hull_of(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 4);
        assert!(!hull.vertices.contains(&(0.5, 0.5)));
    }

    #[test]
    fn hull_contains_all_generating_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let pts: Vec<Complex64> = (0..100)
            .map(|_| {
                let r: f64 = rng.random::<f64>().sqrt();
                let th: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                c(r * th.cos(), r * th.sin())
            })
            .collect();
        let hull = hull_of(&pts).unwrap();
        for p in &pts {
            assert!(hull.contains((p.re, p.im), 1e-12));
        }
    }

    #[test]
    fn hull_rejects_degenerate_input() {
        assert!(matches!(
            hull_of(&[c(0.0, 0.0), c(1.0, 0.0)]),
            Err(Error::DegenerateHull(_))
        ));
        let collinear = [c(0.0, 0.0), c(1.0, 1.0), c(2.0, 2.0), c(3.0, 3.0)];
        assert!(matches!(hull_of(&collinear), Err(Error::DegenerateHull(_))));
    }

    #[test]
    fn hull_moments_unit_square() {
        let hull = hull_of(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]).unwrap();
        let (m1, m2) = hull_moments(&hull).unwrap();
        assert_abs_diff_eq!(m1, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m2, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hull_moments_rectangle() {
        let hull = hull_of(&[c(1.0, -1.0), c(3.0, -1.0), c(3.0, 1.0), c(1.0, 1.0)]).unwrap();
        let (m1, m2) = hull_moments(&hull).unwrap();
        assert_abs_diff_eq!(m1, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m2, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn hull_moments_triangle_centroid() {
        let hull = hull_of(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let (m1, _) = hull_moments(&hull).unwrap();
        assert_abs_diff_eq!(m1, 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn degree_bound_examples() {
        let (lo, hi) = degree_bounds(2.0, 2.0, 2).unwrap();
        assert_eq!((lo, hi), (1.0, 1.0));
        let (lo, hi) = degree_bounds(3.0, 3.0, 3).unwrap();
        assert_eq!((lo, hi), (2.0, 2.0));
        assert!(degree_bounds(1.0, 1.0, 1).is_err());
    }

    #[test]
    fn quadratic_bounds_examples() {
        assert_eq!(quadratic_mean_bounds(1.0, 2.0).unwrap(), [1.0, 2.0]);
        // Star K_{1,3}: degrees (3,1,1,1), M1 = 1.5, M2 = mean(d² + d) = 4.5.
        let bounds = quadratic_mean_bounds(1.5, 4.5).unwrap();
        let mean_d_sq = (9.0 + 1.0 + 1.0 + 1.0) / 4.0;
        assert!(bounds[0] <= mean_d_sq && mean_d_sq <= bounds[1]);
        assert_eq!(bounds[0], 2.25);
    }

    #[test]
    fn mean_edges_examples() {
        assert_abs_diff_eq!(mean_edges_per_node(0.49, 0.05).unwrap(), 9.8, epsilon = 1e-12);
        assert_eq!(mean_edges_per_node(0.0, 0.05).unwrap(), 0.0);
        assert!(mean_edges_per_node(1.0, 0.0).is_err());
    }

    #[test]
    fn extremes_skip_zero_eigenvalue() {
        let lams = [c(1e-6, 0.0), c(0.4, 0.0), c(2.0, 0.0), c(5.0, 0.0)];
        let (l2, ln) = spectrum_extremes(&lams, 0.05).unwrap();
        assert_eq!(l2, 0.4);
        assert_eq!(ln, 5.0);
    }

    #[test]
    fn extremes_fall_back_to_second_smallest() {
        let lams = [c(0.0, 0.0), c(0.01, 0.0)];
        let (l2, _) = spectrum_extremes(&lams, 0.5).unwrap();
        assert_eq!(l2, 0.01);
    }

    #[test]
    fn split_warning_fires_on_two_lobes() {
        let lams = [c(0.0, 0.0), c(0.1, 0.0), c(10.0, 0.0), c(10.1, 0.0)];
        assert!(split_spectrum_warning(&lams));
        let tight = [c(0.0, 0.0), c(0.4, 0.0), c(0.6, 0.0), c(1.0, 0.0)];
        assert!(!split_spectrum_warning(&tight));
    }

    #[test]
    fn cluster_two_points() {
        let result = cluster_by_ratios(&[[1.0, 0.0], [-1.0, 0.0]], 2, 0).unwrap();
        assert_ne!(result.labels[0], result.labels[1]);
        assert_eq!(result.scatter, 0.0);
    }

    #[test]
    fn cluster_k_equals_one() {
        let result = cluster_by_ratios(&[[1.0, 0.0], [2.0, 0.0], [3.0, 1.0]], 1, 0).unwrap();
        assert!(result.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn cluster_rejects_too_few_points() {
        assert!(cluster_by_ratios(&[[0.0, 0.0]], 2, 0).is_err());
    }

    #[test]
    fn cluster_exact_planted_partition_eigenvectors() {
        use crate::graph::{exact_spectrum, generate_planted_partition, laplacian};
        let g = generate_planted_partition(3, 20, 0.3, 0.02, (1.0, 1.0), 7).unwrap();
        let truth = g.labels().unwrap().to_vec();
        let spec = exact_spectrum(&laplacian(&g)).unwrap();
        // Columns 1 and 2 are the two leading nontrivial eigenvectors.
        let v2 = spec.eigenvectors.column(1);
        let v3 = spec.eigenvectors.column(2);
        let reference = 0usize;
        let points: Vec<[f64; 2]> = (0..60)
            .map(|j| {
                [
                    (v2[j] / v2[reference]).re,
                    (v3[j] / v3[reference]).re,
                ]
            })
            .collect();
        let result = cluster_by_ratios(&points, 3, 123).unwrap();
        assert!(
            labels_match_up_to_permutation(&result.labels, &truth, 3),
            "labels {:?}",
            result.labels
        );
    }

    #[test]
    fn permutation_matching() {
        assert!(labels_match_up_to_permutation(&[0, 0, 1, 2], &[2, 2, 0, 1], 3));
        assert!(!labels_match_up_to_permutation(&[0, 0, 1], &[0, 1, 1], 2));
    }

    #[test]
    fn summarize_full_spectrum_k3() {
        let lams = [c(0.0, 0.0), c(3.0, 0.0), c(3.0, 0.0)];
        let (summary, hull) = summarize(&lams, 3, false, None, 0.05).unwrap();
        assert_eq!(summary.mode, SummaryMode::FullSpectrum);
        assert!(hull.is_none());
        assert_eq!((summary.m1, summary.m2), (2.0, 6.0));
        assert_eq!((summary.dmin_bound, summary.dmax_bound), (2.0, 2.0));
    }

    #[test]
    fn summarize_hull_mode_falls_back_when_degenerate() {
        let lams = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
        let (summary, hull) = summarize(&lams, 3, true, None, 0.05).unwrap();
        assert_eq!(summary.mode, SummaryMode::FullSpectrum);
        assert!(hull.is_none());
    }
}
