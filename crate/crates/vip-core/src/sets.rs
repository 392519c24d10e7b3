//! Projectable closed convex sets.
//!
//! Every variant has an exact metric projection except [`ConvexSet::Intersection`],
//! which is handled by Dykstra's algorithm with correction terms. Sets are
//! validated at construction, immutable afterwards, and projections are pure
//! functions.

use crate::space::{inner, norm, Vector};
use crate::{Error, Result};

/// Default accuracy target used when an intersection is projected through the
/// generic [`ConvexSet::project`] entry point.
pub const DEFAULT_DYKSTRA_TOL: f64 = 1e-10;

/// Default cycle budget for Dykstra's algorithm.
pub const DEFAULT_DYKSTRA_MAX_ITER: usize = 50_000;

/// A closed convex subset of `R^d` with a computable metric projection.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    /// `{x : lower <= x <= upper}` componentwise.
    Box { lower: Vector, upper: Vector },
    /// `{x : ||x - center|| <= radius}`.
    Ball { center: Vector, radius: f64 },
    /// `{x : <normal, x> <= offset}`.
    Halfspace { normal: Vector, offset: f64 },
    /// `{x : <normal, x> = offset}`.
    Hyperplane { normal: Vector, offset: f64 },
    /// `basepoint + span(basis)` with an orthonormal basis. An empty basis
    /// describes the single point `{basepoint}`.
    AffineSubspace {
        basepoint: Vector,
        basis: Vec<Vector>,
    },
    /// All of `R^dim`.
    WholeSpace { dim: usize },
    /// A finite intersection of the above. Nonemptiness is the caller's
    /// responsibility.
    Intersection { members: Vec<ConvexSet> },
}

impl ConvexSet {
    pub fn boxed(lower: Vector, upper: Vector) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch {
                expected: lower.dim(),
                found: upper.dim(),
            });
        }
        for i in 0..lower.dim() {
            if !(lower[i] <= upper[i]) {
                return Err(Error::InvalidSet(format!(
                    "box bounds must satisfy lower <= upper; coordinate {i} has {} > {}",
                    lower[i], upper[i]
                )));
            }
        }
        Ok(ConvexSet::Box { lower, upper })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidSet(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        if norm(&normal) == 0.0 {
            return Err(Error::InvalidSet("halfspace normal must be nonzero".into()));
        }
        Ok(ConvexSet::Halfspace { normal, offset })
    }

    pub fn hyperplane(normal: Vector, offset: f64) -> Result<Self> {
        if norm(&normal) == 0.0 {
            return Err(Error::InvalidSet("hyperplane normal must be nonzero".into()));
        }
        Ok(ConvexSet::Hyperplane { normal, offset })
    }

    /// An affine subspace through `basepoint` spanned by `basis`, which must
    /// be pairwise orthonormal within `1e-10`. An empty basis is allowed and
    /// describes the singleton `{basepoint}`.
    pub fn affine_subspace(basepoint: Vector, basis: Vec<Vector>) -> Result<Self> {
        for b in &basis {
            if b.dim() != basepoint.dim() {
                return Err(Error::DimensionMismatch {
                    expected: basepoint.dim(),
                    found: b.dim(),
                });
            }
        }
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = inner(&basis[i], &basis[j])?;
                if (got - want).abs() > 1e-10 {
                    return Err(Error::InvalidSet(format!(
                        "affine basis not orthonormal: <b{i}, b{j}> = {got}"
                    )));
                }
            }
        }
        Ok(ConvexSet::AffineSubspace { basepoint, basis })
    }

    /// The singleton `{point}`.
    pub fn point(point: Vector) -> Self {
        ConvexSet::AffineSubspace {
            basepoint: point,
            basis: Vec::new(),
        }
    }

    pub fn whole_space(dim: usize) -> Self {
        ConvexSet::WholeSpace { dim }
    }

    /// An intersection of `members`, which must be nonempty as a list and
    /// share one dimension. Nested intersections are flattened in order, so
    /// member order (and hence the Dykstra cycle order) is exactly the order
    /// given here.
    pub fn intersection(members: Vec<ConvexSet>) -> Result<Self> {
        let mut flat = Vec::with_capacity(members.len());
        for m in members {
            match m {
                ConvexSet::Intersection { members: inner } => flat.extend(inner),
                other => flat.push(other),
            }
        }
        let first = flat
            .first()
            .ok_or_else(|| Error::InvalidSet("intersection needs at least one member".into()))?;
        let dim = first.dim();
        for m in &flat {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
        }
        Ok(ConvexSet::Intersection { members: flat })
    }

    /// Dimension of the ambient space.
    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Box { lower, .. } => lower.dim(),
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Halfspace { normal, .. } | ConvexSet::Hyperplane { normal, .. } => {
                normal.dim()
            }
            ConvexSet::AffineSubspace { basepoint, .. } => basepoint.dim(),
            ConvexSet::WholeSpace { dim } => *dim,
            ConvexSet::Intersection { members } => members[0].dim(),
        }
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// The metric projection of `x` onto this set.
    ///
    /// Exact for every variant except `Intersection`, which routes through
    /// [`ConvexSet::dykstra_project`] at [`DEFAULT_DYKSTRA_TOL`].
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        match self {
            ConvexSet::Box { lower, upper } => Ok(Vector::new(
                x.as_slice()
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| c.clamp(lower[i], upper[i]))
                    .collect(),
            )),
            ConvexSet::Ball { center, radius } => {
                let diff = x - center;
                let d = norm(&diff);
                if d <= *radius {
                    Ok(x.clone())
                } else {
                    Ok(center.axpy(*radius / d, &diff))
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let excess = inner(normal, x)? - offset;
                if excess <= 0.0 {
                    Ok(x.clone())
                } else {
                    let nn = inner(normal, normal)?;
                    Ok(x.axpy(-excess / nn, normal))
                }
            }
            ConvexSet::Hyperplane { normal, offset } => {
                let excess = inner(normal, x)? - offset;
                let nn = inner(normal, normal)?;
                Ok(x.axpy(-excess / nn, normal))
            }
            ConvexSet::AffineSubspace { basepoint, basis } => {
                let diff = x - basepoint;
                let mut p = basepoint.clone();
                for b in basis {
                    p = p.axpy(inner(&diff, b)?, b);
                }
                Ok(p)
            }
            ConvexSet::WholeSpace { .. } => Ok(x.clone()),
            ConvexSet::Intersection { .. } => {
                self.dykstra_project(x, DEFAULT_DYKSTRA_TOL, DEFAULT_DYKSTRA_MAX_ITER)
            }
        }
    }

    /// Projects onto an intersection with Dykstra's cyclic algorithm.
    ///
    /// The result `y` satisfies `||y - P(x)|| <= tol` under the stopping
    /// heuristic: both the cycle-to-cycle change of the iterate and the
    /// cycle-to-cycle change of every correction term must fall below
    /// `tol / 10`. The iterate alone can repeat across a cycle while the
    /// corrections still move (and the iterate is still far from the
    /// projection), so the correction test is load-bearing; the conservative
    /// factor stands in for the a-posteriori error bound Dykstra lacks.
    /// Member order is fixed at construction, making results deterministic.
    ///
    /// For non-intersection sets this is the exact projection and `tol` /
    /// `max_iter` are ignored.
    pub fn dykstra_project(&self, x: &Vector, tol: f64, max_iter: usize) -> Result<Vector> {
        if !(tol > 0.0) {
            return Err(Error::OutOfRange(format!(
                "dykstra tolerance must be positive, got {tol}"
            )));
        }
        self.check_dim(x)?;
        let members = match self {
            ConvexSet::Intersection { members } => members,
            _ => return self.project(x),
        };
        let stop = tol / 10.0;
        let mut y = x.clone();
        let mut corrections = vec![Vector::zeros(x.dim()); members.len()];
        let mut last_change = f64::INFINITY;
        for _cycle in 0..max_iter {
            let y_prev = y.clone();
            let mut corr_change = 0.0_f64;
            for (member, corr) in members.iter().zip(corrections.iter_mut()) {
                let shifted = &y + corr;
                let projected = member.project(&shifted)?;
                let updated = &shifted - &projected;
                corr_change += updated.dist(corr);
                *corr = updated;
                y = projected;
            }
            last_change = y.dist(&y_prev).max(corr_change);
            if last_change <= stop {
                return Ok(y);
            }
        }
        Err(Error::DykstraBudget {
            cycles: max_iter,
            last_change,
            last: y,
        })
    }

    /// True iff `x` is within `tol` of the set: `||x - P(x)|| <= tol`.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        if tol < 0.0 {
            return Err(Error::OutOfRange(format!(
                "containment tolerance must be nonnegative, got {tol}"
            )));
        }
        let p = match self {
            // A tighter inner target keeps the Dykstra error from polluting
            // the containment decision.
            ConvexSet::Intersection { .. } => {
                self.dykstra_project(x, (tol / 10.0).max(1e-12), DEFAULT_DYKSTRA_MAX_ITER)?
            }
            _ => self.project(x)?,
        };
        Ok(x.dist(&p) <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec())
    }

    fn unit_box2() -> ConvexSet {
        ConvexSet::boxed(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap()
    }

    fn unit_ball2() -> ConvexSet {
        ConvexSet::ball(Vector::zeros(2), 1.0).unwrap()
    }

    #[test]
    fn box_projection_clamps() {
        let p = unit_box2().project(&v(&[3.0, -1.0])).unwrap();
        assert_eq!(p, v(&[1.0, 0.0]));
    }

    #[test]
    fn ball_projection_scales_radially() {
        let p = unit_ball2().project(&v(&[2.0, 0.0])).unwrap();
        assert_eq!(p, v(&[1.0, 0.0]));
    }

    #[test]
    fn halfspace_projection_removes_positive_part() {
        let s = ConvexSet::halfspace(v(&[1.0, 0.0]), 0.0).unwrap();
        let p = s.project(&v(&[2.0, 3.0])).unwrap();
        assert_eq!(p, v(&[0.0, 3.0]));
    }

    #[test]
    fn affine_subspace_projection() {
        // the line through (0,1) in direction (1,0)
        let s = ConvexSet::affine_subspace(v(&[0.0, 1.0]), vec![v(&[1.0, 0.0])]).unwrap();
        let p = s.project(&v(&[3.0, 5.0])).unwrap();
        assert_eq!(p, v(&[3.0, 1.0]));
    }

    #[test]
    fn singleton_projection_returns_the_point() {
        let s = ConvexSet::point(v(&[2.0, -1.0]));
        assert_eq!(s.project(&v(&[9.0, 9.0])).unwrap(), v(&[2.0, -1.0]));
    }

    #[test]
    fn invalid_sets_are_rejected() {
        assert!(ConvexSet::boxed(v(&[1.0]), v(&[0.0])).is_err());
        assert!(ConvexSet::ball(Vector::zeros(2), 0.0).is_err());
        assert!(ConvexSet::halfspace(Vector::zeros(2), 1.0).is_err());
        assert!(ConvexSet::hyperplane(Vector::zeros(3), 0.0).is_err());
        assert!(ConvexSet::intersection(vec![]).is_err());
        // non-orthonormal basis
        assert!(
            ConvexSet::affine_subspace(v(&[0.0, 0.0]), vec![v(&[1.0, 1.0])]).is_err()
        );
        // mixed dims
        assert!(ConvexSet::intersection(vec![unit_box2(), ConvexSet::whole_space(3)]).is_err());
    }

    #[test]
    fn dykstra_two_halfspaces_meet_on_hyperplane() {
        // x1 <= 1 and x1 >= 1 intersect in the hyperplane x1 = 1
        let s = ConvexSet::intersection(vec![
            ConvexSet::halfspace(v(&[1.0, 0.0]), 1.0).unwrap(),
            ConvexSet::halfspace(v(&[-1.0, 0.0]), -1.0).unwrap(),
        ])
        .unwrap();
        let p = s.dykstra_project(&v(&[5.0, 2.0]), 1e-10, 10_000).unwrap();
        assert!(p.dist(&v(&[1.0, 2.0])) <= 2e-10, "got {:?}", p);
    }

    #[test]
    fn dykstra_whole_space_is_identity() {
        let s = ConvexSet::intersection(vec![ConvexSet::whole_space(2)]).unwrap();
        let x = v(&[3.5, -1.25]);
        assert_eq!(s.dykstra_project(&x, 1e-12, 10).unwrap(), x);
    }

    /// Brute-force nearest point by dense grid refinement over the feasible
    /// region; independent of the projection code paths.
    fn grid_nearest(inside: impl Fn(&Vector) -> bool, x: &Vector, lo: f64, hi: f64) -> Vector {
        let mut best = Vector::zeros(x.dim());
        let mut best_d = f64::INFINITY;
        let (mut lo_a, mut hi_a, mut lo_b, mut hi_b) = (lo, hi, lo, hi);
        for _level in 0..10 {
            let n = 40;
            let (step_a, step_b) = ((hi_a - lo_a) / n as f64, (hi_b - lo_b) / n as f64);
            for i in 0..=n {
                for j in 0..=n {
                    let cand = v(&[lo_a + i as f64 * step_a, lo_b + j as f64 * step_b]);
                    if inside(&cand) {
                        let d = cand.dist(x);
                        if d < best_d {
                            best_d = d;
                            best = cand;
                        }
                    }
                }
            }
            let (ba, bb) = (best[0], best[1]);
            let (ra, rb) = (2.0 * step_a, 2.0 * step_b);
            lo_a = ba - ra;
            hi_a = ba + ra;
            lo_b = bb - rb;
            hi_b = bb + rb;
        }
        best
    }

    #[test]
    fn dykstra_box_ball_intersection_matches_grid_oracle() {
        let s = ConvexSet::intersection(vec![
            ConvexSet::boxed(v(&[0.0, 0.0]), v(&[2.0, 2.0])).unwrap(),
            unit_ball2(),
        ])
        .unwrap();
        let x = v(&[2.0, 2.0]);
        let got = s.dykstra_project(&x, 1e-8, 50_000).unwrap();
        let oracle = grid_nearest(
            |p| p[0] >= 0.0 && p[0] <= 2.0 && p[1] >= 0.0 && p[1] <= 2.0 && norm(p) <= 1.0,
            &x,
            -0.5,
            2.5,
        );
        let expected = v(&[1.0 / 2.0_f64.sqrt(), 1.0 / 2.0_f64.sqrt()]);
        assert!(oracle.dist(&expected) <= 1e-6, "grid oracle sanity: {:?}", oracle);
        assert!(got.dist(&expected) <= 1e-7, "dykstra result {:?}", got);
    }

    #[test]
    fn dykstra_budget_error_carries_last_iterate() {
        let s = ConvexSet::intersection(vec![
            ConvexSet::halfspace(v(&[1.0, 0.0]), 0.0).unwrap(),
            unit_ball2(),
        ])
        .unwrap();
        let err = s.dykstra_project(&v(&[5.0, 5.0]), 1e-14, 1).unwrap_err();
        match err {
            Error::DykstraBudget { cycles, last, .. } => {
                assert_eq!(cycles, 1);
                assert_eq!(last.dim(), 2);
            }
            other => panic!("expected DykstraBudget, got {other:?}"),
        }
    }

    #[test]
    fn contains_examples() {
        assert!(unit_box2().contains(&v(&[0.5, 0.5]), 0.0).unwrap());
        assert!(!unit_ball2().contains(&v(&[1.0 + 1e-6, 0.0]), 1e-9).unwrap());
        let h = ConvexSet::hyperplane(v(&[1.0, 1.0]), 1.0).unwrap();
        assert!(h.contains(&v(&[0.5, 0.5]), 1e-12).unwrap());
    }

    #[test]
    fn contains_rejects_dimension_mismatch() {
        let e = unit_box2().contains(&v(&[1.0]), 0.0).unwrap_err();
        assert!(matches!(e, Error::DimensionMismatch { .. }));
    }

    fn arbitrary_set() -> impl Strategy<Value = ConvexSet> {
        prop_oneof![
            Just(unit_box2()),
            Just(unit_ball2()),
            Just(ConvexSet::halfspace(v(&[1.0, 2.0]), 1.5).unwrap()),
            Just(ConvexSet::hyperplane(v(&[1.0, -1.0]), 0.5).unwrap()),
            Just(ConvexSet::affine_subspace(v(&[0.0, 1.0]), vec![v(&[1.0, 0.0])]).unwrap()),
            Just(ConvexSet::whole_space(2)),
            Just(
                ConvexSet::intersection(vec![
                    unit_box2(),
                    ConvexSet::halfspace(v(&[1.0, 1.0]), 1.2).unwrap(),
                ])
                .unwrap()
            ),
        ]
    }

    fn point2() -> impl Strategy<Value = Vector> {
        prop::collection::vec(-5.0..5.0f64, 2).prop_map(Vector::new)
    }

    /// Exact projections where available; intersections driven well below the
    /// slacks asserted by the properties.
    fn tight_project(s: &ConvexSet, x: &Vector) -> Vector {
        match s {
            ConvexSet::Intersection { .. } => s.dykstra_project(x, 1e-13, 500_000).unwrap(),
            _ => s.project(x).unwrap(),
        }
    }

    proptest! {
        #[test]
        fn projection_is_idempotent(s in arbitrary_set(), x in point2()) {
            let p = tight_project(&s, &x);
            let pp = tight_project(&s, &p);
            prop_assert!(p.dist(&pp) <= 1e-12 * (1.0 + norm(&p)));
        }

        #[test]
        fn projection_is_nonexpansive(s in arbitrary_set(), x in point2(), y in point2()) {
            let (px, py) = (tight_project(&s, &x), tight_project(&s, &y));
            prop_assert!(px.dist(&py) <= x.dist(&y) * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn variational_characterization(s in arbitrary_set(), x in point2(), z0 in point2()) {
            // z is a genuine member: project an arbitrary sample into the set
            let z = tight_project(&s, &z0);
            let p = tight_project(&s, &x);
            let lhs = inner(&(&x - &p), &(&z - &p)).unwrap();
            prop_assert!(lhs <= 1e-10);
        }

        #[test]
        fn dykstra_singleton_matches_exact_projection(x in point2()) {
            let tol = 1e-8;
            for base in [unit_box2(), unit_ball2()] {
                let wrapped = ConvexSet::intersection(vec![base.clone()]).unwrap();
                let exact = base.project(&x).unwrap();
                let approx = wrapped.dykstra_project(&x, tol, 10_000).unwrap();
                prop_assert!(exact.dist(&approx) <= 2.0 * tol);
            }
        }
    }
}

