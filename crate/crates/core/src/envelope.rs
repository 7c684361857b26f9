//! Lower convex envelope of the `(C, E)` point cloud and the amplitude-level
//! relaxations of `F¹` and `F²` over it.
//!
//! A state `Σ aᵢ|vᵢ⟩` in the simultaneous eigenbasis maps to
//! `(Σ|aᵢ|²Cᵢ, Σ|aᵢ|²Eᵢ)`, a point in the convex hull of the cloud. `F²`
//! depends on the weights only through that point, so its minimum over all
//! states is the minimum of `E_hull(C) + μ(C − c)²` along the lower hull.

use thiserror::Error;

use crate::spectrum::SpectrumPoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePoint {
    pub c: f64,
    pub e: f64,
}

impl EnvelopePoint {
    pub fn new(c: f64, e: f64) -> Self {
        EnvelopePoint { c, e }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvelopeError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("point cloud contains a non-finite coordinate")]
    NonFinite,
    #[error("target ({c}, {e}) is not one of the points")]
    TargetNotInCloud { c: f64, e: f64 },
    #[error("target lies strictly above the lower envelope")]
    NotBoundary,
    #[error("penalty coefficient must be positive and finite, got {0}")]
    InvalidMu(f64),
    #[error("noise probability must lie in [0, 1), got {0}")]
    InvalidProbability(f64),
    #[error("first-order noise shifts need a tangent (not vertex-pinned) base")]
    NotTangent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetClass {
    /// On the lower envelope: reachable by `F²` as `μ → ∞`.
    Boundary,
    /// Strictly above it: `F²` never reaches the target energy.
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TangentCase {
    BoundaryTangent,
    /// The parabola touches a hull vertex instead of the adjacent edge.
    BoundaryVertex,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentResult {
    pub c_t: f64,
    pub e_t: f64,
    pub f_min: f64,
    pub alpha: f64,
    pub case: TangentCase,
}

/// Minimum of a relaxation, with the mixture of original points attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationMinimum {
    pub f_min: f64,
    pub c_at: f64,
    pub e_at: f64,
    /// `(index into the input points, weight)`; weights sum to 1.
    pub support: Vec<(usize, f64)>,
}

/// First-order-in-`p` shifts of the noisy `F²` tangent point and minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyShift {
    pub c_t: f64,
    pub e_t: f64,
    pub f_min: f64,
}

/// Charges are snapped to a 1e-9 grid so that numerically equal charges share
/// one `C` coordinate (otherwise round-off creates near-vertical hull edges).
pub fn points_from_spectrum(points: &[SpectrumPoint]) -> Vec<EnvelopePoint> {
    points
        .iter()
        .map(|p| EnvelopePoint::new(snap(p.charge()), p.energy))
        .collect()
}

fn snap(c: f64) -> f64 {
    let v = (c * 1e9).round() / 1e9;
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

fn check_cloud(points: &[EnvelopePoint]) -> Result<(), EnvelopeError> {
    if points.is_empty() {
        return Err(EnvelopeError::EmptyCloud);
    }
    if points.iter().any(|p| !(p.c.is_finite() && p.e.is_finite())) {
        return Err(EnvelopeError::NonFinite);
    }
    Ok(())
}

fn check_mu(mu: f64) -> Result<(), EnvelopeError> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(EnvelopeError::InvalidMu(mu))
    }
}

fn cross(o: EnvelopePoint, a: EnvelopePoint, b: EnvelopePoint) -> f64 {
    (a.c - o.c) * (b.e - o.e) - (a.e - o.e) * (b.c - o.c)
}

/// Monotone chain over C-sorted indices. Equal `C` keeps the lowest `E`.
fn hull_indices(points: &[EnvelopePoint]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .c
            .total_cmp(&points[b].c)
            .then(points[a].e.total_cmp(&points[b].e))
            .then(a.cmp(&b))
    });
    order.dedup_by(|later, earlier| points[*later].c == points[*earlier].c);

    let mut hull: Vec<usize> = Vec::with_capacity(order.len());
    for i in order {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if cross(points[o], points[a], points[i]) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Vertices of the lower convex hull, ascending in `C`, collinear points
/// dropped.
pub fn lower_hull(points: &[EnvelopePoint]) -> Vec<EnvelopePoint> {
    hull_indices(points).into_iter().map(|i| points[i]).collect()
}

/// Piecewise-linear hull value at `c`, `None` outside the hull's C-range.
pub fn hull_value(hull: &[EnvelopePoint], c: f64) -> Option<f64> {
    let first = hull.first()?;
    let last = hull.last()?;
    if c < first.c || c > last.c {
        return None;
    }
    if hull.len() == 1 {
        return Some(first.e);
    }
    let k = hull.partition_point(|p| p.c <= c).clamp(1, hull.len() - 1);
    let (a, b) = (hull[k - 1], hull[k]);
    Some(a.e + (b.e - a.e) * (c - a.c) / (b.c - a.c))
}

/// Height of `(c, e)` above the lower envelope.
pub fn hull_clearance(points: &[EnvelopePoint], c: f64, e: f64) -> Result<f64, EnvelopeError> {
    check_cloud(points)?;
    let hull = lower_hull(points);
    hull_value(&hull, c)
        .map(|h| e - h)
        .ok_or(EnvelopeError::TargetNotInCloud { c, e })
}

pub fn classify_target(
    points: &[EnvelopePoint],
    c: f64,
    e_target: f64,
    tol: f64,
) -> Result<TargetClass, EnvelopeError> {
    check_cloud(points)?;
    if !points
        .iter()
        .any(|p| (p.c - c).abs() <= tol && (p.e - e_target).abs() <= tol)
    {
        return Err(EnvelopeError::TargetNotInCloud { c, e: e_target });
    }
    if hull_clearance(points, c, e_target)? <= tol {
        Ok(TargetClass::Boundary)
    } else {
        Ok(TargetClass::Interior)
    }
}

/// `min_w Σwᵢ(Eᵢ + μ(Cᵢ − c)²)`: linear in the weights, so a vertex of the
/// simplex (a single point) attains it.
pub fn minimize_f1_relaxation(points: &[EnvelopePoint], c: f64, mu: f64) -> Result<RelaxationMinimum, EnvelopeError> {
    check_cloud(points)?;
    let value = |p: &EnvelopePoint| p.e + mu * (p.c - c).powi(2);
    let (i, best) = points
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| value(a).total_cmp(&value(b)))
        .expect("cloud is non-empty");
    Ok(RelaxationMinimum {
        f_min: value(best),
        c_at: best.c,
        e_at: best.e,
        support: vec![(i, 1.0)],
    })
}

/// `min_w Σwᵢ Eᵢ + μ(Σwᵢ Cᵢ − c)²` over the probability simplex.
pub fn minimize_f2_relaxation(points: &[EnvelopePoint], c: f64, mu: f64) -> Result<RelaxationMinimum, EnvelopeError> {
    check_cloud(points)?;
    check_mu(mu)?;
    let idx = hull_indices(points);
    let objective = |cc: f64, e: f64| e + mu * (cc - c).powi(2);

    let v0 = points[idx[0]];
    let mut best = RelaxationMinimum {
        f_min: objective(v0.c, v0.e),
        c_at: v0.c,
        e_at: v0.e,
        support: vec![(idx[0], 1.0)],
    };
    for w in idx.windows(2) {
        let (a, b) = (points[w[0]], points[w[1]]);
        let slope = (b.e - a.e) / (b.c - a.c);
        let cc = (c - slope / (2.0 * mu)).clamp(a.c, b.c);
        let t = (cc - a.c) / (b.c - a.c);
        let e = a.e + slope * (cc - a.c);
        let f = objective(cc, e);
        if f < best.f_min {
            let support = if t <= 0.0 {
                vec![(w[0], 1.0)]
            } else if t >= 1.0 {
                vec![(w[1], 1.0)]
            } else {
                vec![(w[0], 1.0 - t), (w[1], t)]
            };
            best = RelaxationMinimum {
                f_min: f,
                c_at: cc,
                e_at: e,
                support,
            };
        }
    }
    Ok(best)
}

/// `(C_t, E_t, f_min) = (c − α/2μ, E − α²/2μ, E − α²/4μ)` for a tangent
/// edge of slope `α` through `(c, E)`.
pub fn tangent_point(alpha: f64, c: f64, e_target: f64, mu: f64) -> (f64, f64, f64) {
    let shift = alpha / (2.0 * mu);
    (
        c - shift,
        e_target - alpha * shift,
        e_target - alpha * alpha / (4.0 * mu),
    )
}

/// Closed-form `F²` minimum for a boundary target.
///
/// The edge on the lower-energy side of the target supplies `α`. If the
/// target sits at a local minimum of the hull (no lower side), `α = 0`. If
/// the closed-form tangent point falls off that edge the parabola pins a
/// vertex; the exact relaxation minimum is returned as `BoundaryVertex`.
pub fn tangent_closed_form(
    points: &[EnvelopePoint],
    c: f64,
    e_target: f64,
    mu: f64,
    tol: f64,
) -> Result<TangentResult, EnvelopeError> {
    check_mu(mu)?;
    if classify_target(points, c, e_target, tol)? == TargetClass::Interior {
        return Err(EnvelopeError::NotBoundary);
    }
    let hull = lower_hull(points);
    let slope = |a: EnvelopePoint, b: EnvelopePoint| (b.e - a.e) / (b.c - a.c);
    // Edges touching c from either side; a vertex at c has distinct neighbours.
    let left = hull.windows(2).rev().find(|w| w[0].c < c - tol);
    let right = hull.windows(2).find(|w| w[1].c > c + tol);
    let s_left = left.map(|w| slope(w[0], w[1]));
    let s_right = right.map(|w| slope(w[0], w[1]));

    let (alpha, edge_end) = match (s_left, s_right) {
        (_, Some(s)) if s < 0.0 => (s, right.map(|w| w[1].c)),
        (Some(s), _) if s > 0.0 => (s, left.map(|w| w[0].c)),
        _ => (0.0, None),
    };
    let (c_t, e_t, f_min) = tangent_point(alpha, c, e_target, mu);
    let on_edge = match edge_end {
        Some(end) if alpha < 0.0 => c_t <= end,
        Some(end) => c_t >= end,
        None => true,
    };
    if on_edge {
        return Ok(TangentResult {
            c_t,
            e_t,
            f_min,
            alpha,
            case: TangentCase::BoundaryTangent,
        });
    }
    let exact = minimize_f2_relaxation(points, c, mu)?;
    Ok(TangentResult {
        c_t: exact.c_at,
        e_t: exact.e_at,
        f_min: exact.f_min,
        alpha,
        case: TangentCase::BoundaryVertex,
    })
}

/// `F²` relaxation under depolarizing noise `p`.
///
/// The noisy cost of a pure point `(C, E)` is
/// `(1−p)E + p·t_H + μ((1−p)C + p·t_C − c)²` with `t_O = Tr(Ô)/2ⁿ`. This is
/// the noiseless problem on the affinely mapped cloud; the returned `c_at`,
/// `e_at` are mapped back to pure-state coordinates.
pub fn minimize_noisy_f2_relaxation(
    points: &[EnvelopePoint],
    c: f64,
    mu: f64,
    p: f64,
    trace_h_over_dim: f64,
    trace_c_over_dim: f64,
) -> Result<RelaxationMinimum, EnvelopeError> {
    if !(0.0..1.0).contains(&p) {
        return Err(EnvelopeError::InvalidProbability(p));
    }
    let mapped: Vec<_> = points
        .iter()
        .map(|q| {
            EnvelopePoint::new(
                (1.0 - p) * q.c + p * trace_c_over_dim,
                (1.0 - p) * q.e + p * trace_h_over_dim,
            )
        })
        .collect();
    let mut m = minimize_f2_relaxation(&mapped, c, mu)?;
    m.c_at = (m.c_at - p * trace_c_over_dim) / (1.0 - p);
    m.e_at = (m.e_at - p * trace_h_over_dim) / (1.0 - p);
    Ok(m)
}

/// First-order shifts of the tangent point and minimum under noise `p`,
/// in pure-state coordinates.
///
/// Along the tangent edge the exact noisy values are
/// `C̃_t = (c − p·t_C − α/2μ)/(1−p)`, `Ẽ_t = E + α(C̃_t − c)` and
/// `f̃ = f_min + p(t_H − α·t_C + α·c − E)`, so
/// `δC_t = p(c − t_C − α/2μ)`, `δE_t = p(α(c − t_C) − α²/2μ)` and the
/// minimum shift is exact.
pub fn noisy_tangent_first_order(
    base: &TangentResult,
    p: f64,
    trace_h_over_dim: f64,
    trace_c_over_dim: f64,
    c: f64,
    e_target: f64,
    mu: f64,
) -> Result<NoisyShift, EnvelopeError> {
    if !(0.0..1.0).contains(&p) {
        return Err(EnvelopeError::InvalidProbability(p));
    }
    check_mu(mu)?;
    if base.case != TangentCase::BoundaryTangent {
        return Err(EnvelopeError::NotTangent);
    }
    let a = base.alpha;
    let k = a / (2.0 * mu);
    Ok(NoisyShift {
        c_t: p * (c - trace_c_over_dim - k),
        e_t: p * (a * (c - trace_c_over_dim) - a * k),
        f_min: p * (trace_h_over_dim - a * trace_c_over_dim + a * c - e_target),
    })
}
