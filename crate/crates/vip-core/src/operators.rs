//! The mapping zoo: nonexpansive `T` with a known fixed-point set, Lipschitz
//! `f`, and strongly monotone Lipschitz `F`.
//!
//! Constants are certified analytically at construction time — operator norms
//! and symmetric-part eigenvalue bounds of the explicit matrices, computed by
//! power iteration with a deterministic seed — never estimated from samples.
//! [`certify_constants`] exists only as an empirical cross-check of those
//! certified values.

use crate::sets::ConvexSet;
use crate::space::{inner, norm, Vector};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a `d x d` matrix from its rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidOperator("matrix must be at least 1x1".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidOperator(format!(
                    "matrix row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidOperator("matrix entries must be finite".into()));
                }
                data.push(v);
            }
        }
        Ok(Matrix { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix {
            dim,
            data: vec![0.0; dim * dim],
        };
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    /// `c * I` for the ambient dimension.
    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let mut m = Matrix::identity(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(x.dim(), self.dim, "matrix apply dimension mismatch");
        let out = self
            .data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum())
            .collect();
        Vector::new(out)
    }

    pub fn transpose_apply(&self, x: &Vector) -> Vector {
        assert_eq!(x.dim(), self.dim, "matrix apply dimension mismatch");
        let mut out = vec![0.0; self.dim];
        for (i, &xi) in x.as_slice().iter().enumerate() {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        Vector::new(out)
    }

    /// `self + c * I`.
    pub fn add_scaled_identity(&self, c: f64) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.data[i * self.dim + i] += c;
        }
        m
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                if (self.data[i * self.dim + j] - self.data[j * self.dim + i]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

const POWER_ITER_TOL: f64 = 1e-12;
const POWER_ITER_CAP: usize = 200_000;

/// Dominant eigenvalue of a symmetric positive semidefinite operator given by
/// `apply`, via power iteration with Rayleigh-quotient convergence.
///
/// The primary seed is the normalized all-ones vector; a second deterministic
/// seed (the normalized ramp `1..=d`) guards against a start orthogonal to
/// the dominant eigenspace, and the larger estimate wins.
fn dominant_eigenvalue_psd(apply: &dyn Fn(&Vector) -> Vector, dim: usize) -> f64 {
    let ramp = Vector::new((1..=dim).map(|i| i as f64).collect());
    let mut best = 0.0_f64;
    for seed in [Vector::ones(dim), ramp] {
        let mut v = seed.normalized().expect("seed vectors are nonzero");
        let mut lambda = 0.0_f64;
        let mut prev = f64::NEG_INFINITY;
        for _ in 0..POWER_ITER_CAP {
            let w = apply(&v);
            // The explicit <v, v> denominator keeps the quotient bit-exact
            // for scaled-identity operators instead of 1 + O(eps).
            lambda = inner(&v, &w).expect("dims match") / inner(&v, &v).expect("dims match");
            let nw = norm(&w);
            if nw <= f64::MIN_POSITIVE {
                lambda = 0.0;
                break;
            }
            v = w.scale(1.0 / nw);
            if (lambda - prev).abs() <= POWER_ITER_TOL * lambda.abs().max(1.0) {
                break;
            }
            prev = lambda;
        }
        best = best.max(lambda.max(0.0));
    }
    best
}

/// The operator norm `||M||_2 = sqrt(lambda_max(M^T M))`.
pub fn operator_norm(m: &Matrix) -> f64 {
    let apply = |v: &Vector| m.transpose_apply(&m.apply(v));
    dominant_eigenvalue_psd(&apply, m.dim()).sqrt()
}

/// Extreme eigenvalues `(min, max)` of the symmetric part `(M + M^T) / 2`.
///
/// The minimum comes from a second, spectrum-shifted power iteration:
/// `lambda_min(S) = m - lambda_max(m I - S)` with `m = lambda_max(S)`.
pub fn symmetric_eigen_bounds(m: &Matrix) -> (f64, f64) {
    let sym = |v: &Vector| {
        let a = m.apply(v);
        let b = m.transpose_apply(v);
        (&a + &b).scale(0.5)
    };
    let lambda_max = {
        // lambda_max(S) can be negative in general; shift by a Gershgorin-style
        // bound to make the operator PSD before iterating.
        let shift: f64 = (0..m.dim)
            .map(|i| {
                (0..m.dim)
                    .map(|j| 0.5 * (m.data[i * m.dim + j].abs() + m.data[j * m.dim + i].abs()))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        let shifted = |v: &Vector| sym(v).axpy(shift, v);
        dominant_eigenvalue_psd(&shifted, m.dim()) - shift
    };
    let lambda_min = {
        let reflected = |v: &Vector| &v.scale(lambda_max) - &sym(v);
        lambda_max - dominant_eigenvalue_psd(&reflected, m.dim())
    };
    (lambda_min, lambda_max)
}

/// A nonexpansive mapping with a projectable description of its fixed-point
/// set.
#[derive(Debug, Clone, PartialEq)]
pub enum NonexpansiveMap {
    Identity { dim: usize },
    /// `T = P_C`, the metric projection onto `set`; `Fix(T) = set`.
    SetProjection { set: ConvexSet },
    /// Projections applied left to right: `x -> P_k(...P_2(P_1(x)))`.
    /// `Fix(T)` is the intersection of the sets when that is nonempty.
    ProjectionComposition { sets: Vec<ConvexSet> },
    /// `(1 - weight) I + weight * base`, `weight` in `(0, 1)`; same fixed set
    /// as `base`.
    Averaged {
        base: Box<NonexpansiveMap>,
        weight: f64,
    },
    /// Planar rotation; an isometry whose only fixed point is the origin
    /// (unless the angle is exactly zero).
    Rotation2D { angle: f64 },
}

impl NonexpansiveMap {
    pub fn identity(dim: usize) -> Self {
        NonexpansiveMap::Identity { dim }
    }

    pub fn set_projection(set: ConvexSet) -> Self {
        NonexpansiveMap::SetProjection { set }
    }

    pub fn projection_composition(sets: Vec<ConvexSet>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::InvalidOperator(
                "projection composition needs at least one set".into(),
            ));
        }
        let dim = sets[0].dim();
        for s in &sets {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
        }
        Ok(NonexpansiveMap::ProjectionComposition { sets })
    }

    pub fn averaged(base: NonexpansiveMap, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight < 1.0) {
            return Err(Error::InvalidOperator(format!(
                "averaging weight must lie in (0, 1), got {weight}"
            )));
        }
        Ok(NonexpansiveMap::Averaged {
            base: Box::new(base),
            weight,
        })
    }

    pub fn rotation_2d(angle: f64) -> Self {
        NonexpansiveMap::Rotation2D { angle }
    }

    pub fn dim(&self) -> usize {
        match self {
            NonexpansiveMap::Identity { dim } => *dim,
            NonexpansiveMap::SetProjection { set } => set.dim(),
            NonexpansiveMap::ProjectionComposition { sets } => sets[0].dim(),
            NonexpansiveMap::Averaged { base, .. } => base.dim(),
            NonexpansiveMap::Rotation2D { .. } => 2,
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        match self {
            NonexpansiveMap::Identity { .. } => Ok(x.clone()),
            NonexpansiveMap::SetProjection { set } => set.project(x),
            NonexpansiveMap::ProjectionComposition { sets } => {
                let mut y = x.clone();
                for s in sets {
                    y = s.project(&y)?;
                }
                Ok(y)
            }
            NonexpansiveMap::Averaged { base, weight } => {
                let ty = base.apply(x)?;
                Ok(x.scale(1.0 - weight).axpy(*weight, &ty))
            }
            NonexpansiveMap::Rotation2D { angle } => {
                let (s, c) = angle.sin_cos();
                Ok(Vector::new(vec![c * x[0] - s * x[1], s * x[0] + c * x[1]]))
            }
        }
    }

    /// A projectable description of `Fix(T)`.
    pub fn fix_set(&self) -> ConvexSet {
        match self {
            NonexpansiveMap::Identity { dim } => ConvexSet::whole_space(*dim),
            NonexpansiveMap::SetProjection { set } => set.clone(),
            NonexpansiveMap::ProjectionComposition { sets } => {
                ConvexSet::intersection(sets.clone()).expect("validated at construction")
            }
            NonexpansiveMap::Averaged { base, .. } => base.fix_set(),
            NonexpansiveMap::Rotation2D { angle } => {
                let (s, c) = angle.sin_cos();
                if s == 0.0 && c == 1.0 {
                    ConvexSet::whole_space(2)
                } else {
                    ConvexSet::point(Vector::zeros(2))
                }
            }
        }
    }

    /// `||x - Tx||`; zero exactly on the fixed-point set (up to arithmetic).
    pub fn fix_residual(&self, x: &Vector) -> Result<f64> {
        Ok(x.dist(&self.apply(x)?))
    }
}

/// A Lipschitz mapping `f` with its certified coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzMap {
    kind: LipschitzKind,
    alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LipschitzKind {
    Constant { value: Vector },
    Zero { dim: usize },
    Affine { matrix: Matrix, shift: Vector },
}

impl LipschitzMap {
    /// `f(x) = u` for all `x`; coefficient 0.
    pub fn constant(value: Vector) -> Self {
        LipschitzMap {
            kind: LipschitzKind::Constant { value },
            alpha: 0.0,
        }
    }

    /// `f(x) = 0`; coefficient 0.
    pub fn zero(dim: usize) -> Self {
        LipschitzMap {
            kind: LipschitzKind::Zero { dim },
            alpha: 0.0,
        }
    }

    /// `f(x) = Mx + b`; coefficient `||M||_2`, certified at construction.
    pub fn affine(matrix: Matrix, shift: Vector) -> Result<Self> {
        if matrix.dim() != shift.dim() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                found: shift.dim(),
            });
        }
        let alpha = operator_norm(&matrix);
        Ok(LipschitzMap {
            kind: LipschitzKind::Affine { matrix, shift },
            alpha,
        })
    }

    /// The certified Lipschitz coefficient.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kind(&self) -> &LipschitzKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            LipschitzKind::Constant { value } => value.dim(),
            LipschitzKind::Zero { dim } => *dim,
            LipschitzKind::Affine { matrix, .. } => matrix.dim(),
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(match &self.kind {
            LipschitzKind::Constant { value } => value.clone(),
            LipschitzKind::Zero { dim } => Vector::zeros(*dim),
            LipschitzKind::Affine { matrix, shift } => &matrix.apply(x) + shift,
        })
    }
}

/// A strongly monotone Lipschitz mapping `F` with certified `eta` (strong
/// monotonicity) and `kappa` (Lipschitz) coefficients, `0 < eta <= kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrongMonotoneMap {
    kind: StrongMonotoneKind,
    eta: f64,
    kappa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrongMonotoneKind {
    Identity { dim: usize },
    /// `F(x) = Ax + c` with `A` symmetric positive definite.
    AffineSpd { matrix: Matrix, shift: Vector },
    /// `F(x) = scale * x + shift`, `scale > 0`.
    ScaledIdentityShift { scale: f64, shift: Vector },
}

impl StrongMonotoneMap {
    pub fn identity(dim: usize) -> Self {
        StrongMonotoneMap {
            kind: StrongMonotoneKind::Identity { dim },
            eta: 1.0,
            kappa: 1.0,
        }
    }

    pub fn affine_spd(matrix: Matrix, shift: Vector) -> Result<Self> {
        if matrix.dim() != shift.dim() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                found: shift.dim(),
            });
        }
        if !matrix.is_symmetric(1e-12) {
            return Err(Error::InvalidOperator(
                "affine_spd matrix must be symmetric".into(),
            ));
        }
        let (eta, _) = symmetric_eigen_bounds(&matrix);
        if !(eta > 0.0) {
            return Err(Error::InvalidOperator(format!(
                "affine_spd matrix must be positive definite (lambda_min = {eta})"
            )));
        }
        let kappa = operator_norm(&matrix);
        Ok(StrongMonotoneMap {
            kind: StrongMonotoneKind::AffineSpd { matrix, shift },
            eta: eta.min(kappa),
            kappa,
        })
    }

    pub fn scaled_identity_shift(scale: f64, shift: Vector) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidOperator(format!(
                "scaled identity needs a positive finite scale, got {scale}"
            )));
        }
        Ok(StrongMonotoneMap {
            kind: StrongMonotoneKind::ScaledIdentityShift { scale, shift },
            eta: scale,
            kappa: scale,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn kind(&self) -> &StrongMonotoneKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            StrongMonotoneKind::Identity { dim } => *dim,
            StrongMonotoneKind::AffineSpd { matrix, .. } => matrix.dim(),
            StrongMonotoneKind::ScaledIdentityShift { shift, .. } => shift.dim(),
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(match &self.kind {
            StrongMonotoneKind::Identity { .. } => x.clone(),
            StrongMonotoneKind::AffineSpd { matrix, shift } => &matrix.apply(x) + shift,
            StrongMonotoneKind::ScaledIdentityShift { scale, shift } => {
                &x.scale(*scale) + shift
            }
        })
    }

    /// `F + eps * I`, which is `(eta + eps)`-strongly monotone and
    /// `(kappa + eps)`-Lipschitz; for the shipped variants (identity shifts
    /// and symmetric matrices) both updated constants are exact.
    pub fn regularized(&self, eps: f64) -> Result<StrongMonotoneMap> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::OutOfRange(format!(
                "regularization epsilon must be positive and finite, got {eps}"
            )));
        }
        let kind = match &self.kind {
            StrongMonotoneKind::Identity { dim } => StrongMonotoneKind::ScaledIdentityShift {
                scale: 1.0 + eps,
                shift: Vector::zeros(*dim),
            },
            StrongMonotoneKind::ScaledIdentityShift { scale, shift } => {
                StrongMonotoneKind::ScaledIdentityShift {
                    scale: scale + eps,
                    shift: shift.clone(),
                }
            }
            StrongMonotoneKind::AffineSpd { matrix, shift } => StrongMonotoneKind::AffineSpd {
                matrix: matrix.add_scaled_identity(eps),
                shift: shift.clone(),
            },
        };
        Ok(StrongMonotoneMap {
            kind,
            eta: self.eta + eps,
            kappa: self.kappa + eps,
        })
    }
}

/// The full problem data: constraint set `Q`, nonexpansive `T`, Lipschitz
/// viscosity term `f`, and strongly monotone operator `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    constraint: ConvexSet,
    mapping: NonexpansiveMap,
    viscosity: LipschitzMap,
    monotone: StrongMonotoneMap,
    limit_case: bool,
}

impl ProblemInstance {
    /// Validates dimensions and the coefficient regime: `alpha < eta` is
    /// required unless `limit_case` is set, which admits `alpha == eta` and
    /// routes through the regularization path.
    pub fn new(
        constraint: ConvexSet,
        mapping: NonexpansiveMap,
        viscosity: LipschitzMap,
        monotone: StrongMonotoneMap,
        limit_case: bool,
    ) -> Result<Self> {
        let dim = constraint.dim();
        for (name, d) in [
            ("nonexpansive mapping", mapping.dim()),
            ("viscosity term", viscosity.dim()),
            ("monotone operator", monotone.dim()),
        ] {
            if d != dim {
                return Err(Error::InvalidConfig(format!(
                    "{name} has dim {d}, constraint set has dim {dim}"
                )));
            }
        }
        let (alpha, eta) = (viscosity.alpha(), monotone.eta());
        if limit_case {
            if alpha > eta {
                return Err(Error::InvalidConfig(format!(
                    "limit-case instance needs alpha <= eta, got alpha = {alpha}, eta = {eta}"
                )));
            }
        } else if !(alpha < eta) {
            return Err(Error::InvalidConfig(format!(
                "strict regime needs alpha < eta, got alpha = {alpha}, eta = {eta}; \
                 flag the instance limit_case to use the regularization path"
            )));
        }
        Ok(ProblemInstance {
            constraint,
            mapping,
            viscosity,
            monotone,
            limit_case,
        })
    }

    pub fn constraint(&self) -> &ConvexSet {
        &self.constraint
    }

    pub fn mapping(&self) -> &NonexpansiveMap {
        &self.mapping
    }

    pub fn viscosity(&self) -> &LipschitzMap {
        &self.viscosity
    }

    pub fn monotone(&self) -> &StrongMonotoneMap {
        &self.monotone
    }

    pub fn limit_case(&self) -> bool {
        self.limit_case
    }

    pub fn dim(&self) -> usize {
        self.constraint.dim()
    }

    pub fn alpha(&self) -> f64 {
        self.viscosity.alpha()
    }

    pub fn eta(&self) -> f64 {
        self.monotone.eta()
    }

    pub fn kappa(&self) -> f64 {
        self.monotone.kappa()
    }

    /// The set the variational inequality is posed over: `T` is a mapping on
    /// `Q`, so its fixed-point set is `{x in Q : Tx = x}`, the intersection
    /// of the mapping's fixed set with `Q` (with whole-space short-circuits
    /// to keep the common cases exactly projectable).
    pub fn fix_set(&self) -> ConvexSet {
        let fix = self.mapping.fix_set();
        if matches!(fix, ConvexSet::WholeSpace { .. }) {
            return self.constraint.clone();
        }
        if matches!(self.constraint, ConvexSet::WholeSpace { .. }) || fix == self.constraint {
            return fix;
        }
        ConvexSet::intersection(vec![fix, self.constraint.clone()])
            .expect("dimensions validated at construction")
    }

    /// The variational-inequality operator `g(x) = F(x) - f(x)`, strongly
    /// monotone with coefficient `eta - alpha` in the strict regime.
    pub fn g_at(&self, x: &Vector) -> Result<Vector> {
        Ok(&self.monotone.apply(x)? - &self.viscosity.apply(x)?)
    }

    /// Replaces `F` by `F + eps I`, producing a strict-regime instance.
    pub fn regularized(&self, eps: f64) -> Result<ProblemInstance> {
        ProblemInstance::new(
            self.constraint.clone(),
            self.mapping.clone(),
            self.viscosity.clone(),
            self.monotone.regularized(eps)?,
            false,
        )
    }

    /// Probes whether `T` maps `Q` into `Q`: draws `n_probes` points, projects
    /// them into `Q`, applies `T`, and checks membership within `tol`.
    pub fn check_q_invariant(&self, seed: u64, n_probes: usize, tol: f64) -> Result<()> {
        let mut sampler = PairSampler::new(seed, self.dim(), 2.0);
        for k in 0..n_probes {
            let (raw, _) = sampler.pair();
            let z = self.constraint.project(&raw)?;
            let tz = self.mapping.apply(&z)?;
            if !self.constraint.contains(&tz, tol)? {
                return Err(Error::InvalidConfig(format!(
                    "T does not map Q into Q: probe {k} left Q by more than {tol:e}"
                )));
            }
        }
        Ok(())
    }
}

/// Deterministic source of random vector pairs for empirical cross-checks.
/// Coordinates are iid normal with standard deviation `scale`.
pub struct PairSampler {
    rng: ChaCha8Rng,
    dim: usize,
    scale: f64,
}

impl PairSampler {
    pub fn new(seed: u64, dim: usize, scale: f64) -> Self {
        PairSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
            scale,
        }
    }

    pub fn vector(&mut self) -> Vector {
        let coords = (0..self.dim)
            .map(|_| self.scale * self.rng.sample::<f64, _>(StandardNormal))
            .collect();
        Vector::new(coords)
    }

    pub fn pair(&mut self) -> (Vector, Vector) {
        (self.vector(), self.vector())
    }
}

/// Empirical cross-check of certified constants.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyReport {
    /// `max ||Phi(x) - Phi(y)|| / ||x - y||` over the sampled pairs.
    pub max_ratio_lipschitz: f64,
    /// `min <Phi(x) - Phi(y), x - y> / ||x - y||^2` over the sampled pairs.
    pub min_ratio_monotone: f64,
    /// Pairs that actually contributed (degenerate pairs are skipped).
    pub pairs_used: usize,
}

/// Samples `n_samples` pairs and reports the extreme Lipschitz and
/// monotonicity ratios of `map`. Degenerate pairs (`x == y`) are skipped;
/// if every pair degenerates the check fails.
pub fn certify_constants(
    map: impl Fn(&Vector) -> Result<Vector>,
    sampler: &mut PairSampler,
    n_samples: usize,
) -> Result<CertifyReport> {
    if n_samples == 0 {
        return Err(Error::OutOfRange("certify needs n_samples >= 1".into()));
    }
    let mut max_lip = 0.0_f64;
    let mut min_mono = f64::INFINITY;
    let mut used = 0;
    for _ in 0..n_samples {
        let (x, y) = sampler.pair();
        let dxy = x.dist(&y);
        if dxy == 0.0 {
            continue;
        }
        let dd = &map(&x)? - &map(&y)?;
        max_lip = max_lip.max(norm(&dd) / dxy);
        min_mono = min_mono.min(inner(&dd, &(&x - &y))? / (dxy * dxy));
        used += 1;
    }
    if used == 0 {
        return Err(Error::DegenerateSamples);
    }
    Ok(CertifyReport {
        max_ratio_lipschitz: max_lip,
        min_ratio_monotone: min_mono,
        pairs_used: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec())
    }

    fn diag(entries: &[f64]) -> Matrix {
        let d = entries.len();
        let rows = (0..d)
            .map(|i| {
                let mut r = vec![0.0; d];
                r[i] = entries[i];
                r
            })
            .collect();
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn operator_norm_of_diagonal() {
        assert!((operator_norm(&diag(&[1.0, 4.0])) - 4.0).abs() < 1e-10);
        assert!((operator_norm(&diag(&[0.5, 0.25])) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn operator_norm_survives_seed_orthogonal_to_dominant_eigenvector() {
        // M^T M has dominant eigenvector (1, -1)/sqrt(2), orthogonal to the
        // all-ones primary seed; the fallback seed must still find it.
        let m = Matrix::from_rows(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert!((operator_norm(&m) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_bounds_of_diagonal() {
        let (lo, hi) = symmetric_eigen_bounds(&diag(&[1.0, 4.0]));
        assert!((lo - 1.0).abs() < 1e-9, "lo = {lo}");
        assert!((hi - 4.0).abs() < 1e-9, "hi = {hi}");
    }

    #[test]
    fn symmetric_bounds_handle_negative_spectrum() {
        let (lo, hi) = symmetric_eigen_bounds(&diag(&[-3.0, 2.0]));
        assert!((lo + 3.0).abs() < 1e-9, "lo = {lo}");
        assert!((hi - 2.0).abs() < 1e-9, "hi = {hi}");
    }

    #[test]
    fn nonexpansive_apply_examples() {
        let id = NonexpansiveMap::identity(2);
        assert_eq!(id.apply(&v(&[1.0, 2.0])).unwrap(), v(&[1.0, 2.0]));

        let ball = ConvexSet::ball(Vector::zeros(2), 1.0).unwrap();
        let proj = NonexpansiveMap::set_projection(ball);
        assert_eq!(proj.apply(&v(&[2.0, 0.0])).unwrap(), v(&[1.0, 0.0]));

        let rot = NonexpansiveMap::rotation_2d(std::f64::consts::FRAC_PI_2);
        let r = rot.apply(&v(&[1.0, 0.0])).unwrap();
        assert!(r.dist(&v(&[0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn fix_residual_examples() {
        let id = NonexpansiveMap::identity(2);
        assert_eq!(id.fix_residual(&v(&[7.0, -3.0])).unwrap(), 0.0);

        let ball = ConvexSet::ball(Vector::zeros(2), 1.0).unwrap();
        let proj = NonexpansiveMap::set_projection(ball);
        assert!((proj.fix_residual(&v(&[2.0, 0.0])).unwrap() - 1.0).abs() < 1e-15);

        let rot = NonexpansiveMap::rotation_2d(std::f64::consts::PI);
        assert!((rot.fix_residual(&v(&[1.0, 0.0])).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_fix_set_is_origin() {
        let rot = NonexpansiveMap::rotation_2d(1.0);
        let fix = rot.fix_set();
        assert!(fix.contains(&Vector::zeros(2), 0.0).unwrap());
        assert!(!fix.contains(&v(&[0.5, 0.0]), 1e-6).unwrap());
    }

    #[test]
    fn lipschitz_apply_and_constants() {
        let c = LipschitzMap::constant(v(&[1.0, 1.0]));
        assert_eq!(c.apply(&v(&[9.0, -2.0])).unwrap(), v(&[1.0, 1.0]));
        assert_eq!(c.alpha(), 0.0);

        let a = LipschitzMap::affine(
            Matrix::scaled_identity(2, 0.5),
            Vector::zeros(2),
        )
        .unwrap();
        assert_eq!(a.apply(&v(&[2.0, 2.0])).unwrap(), v(&[1.0, 1.0]));
        assert!((a.alpha() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn strong_monotone_constants() {
        let f = StrongMonotoneMap::affine_spd(diag(&[1.0, 2.0]), Vector::zeros(2)).unwrap();
        assert_eq!(f.apply(&v(&[1.0, 1.0])).unwrap(), v(&[1.0, 2.0]));
        assert!((f.eta() - 1.0).abs() < 1e-9);
        assert!((f.kappa() - 2.0).abs() < 1e-9);
        assert!(f.eta() <= f.kappa());
    }

    #[test]
    fn spd_construction_rejects_indefinite_and_asymmetric() {
        assert!(StrongMonotoneMap::affine_spd(diag(&[1.0, -0.5]), Vector::zeros(2)).is_err());
        let asym = Matrix::from_rows(vec![vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        assert!(StrongMonotoneMap::affine_spd(asym, Vector::zeros(2)).is_err());
    }

    #[test]
    fn regularized_shifts_constants() {
        let f = StrongMonotoneMap::identity(2);
        let g = f.regularized(0.25).unwrap();
        assert_eq!(g.eta(), 1.25);
        assert_eq!(g.kappa(), 1.25);
        assert_eq!(g.apply(&v(&[2.0, 0.0])).unwrap(), v(&[2.5, 0.0]));

        let a = StrongMonotoneMap::affine_spd(diag(&[1.0, 2.0]), Vector::zeros(2)).unwrap();
        let ar = a.regularized(0.5).unwrap();
        assert!((ar.eta() - 1.5).abs() < 1e-9);
        assert!((ar.kappa() - 2.5).abs() < 1e-9);
        assert_eq!(ar.apply(&v(&[1.0, 1.0])).unwrap(), v(&[1.5, 2.5]));
    }

    #[test]
    fn certify_zero_map_has_zero_ratio() {
        let f = LipschitzMap::zero(3);
        let mut sampler = PairSampler::new(7, 3, 1.0);
        let report = certify_constants(|x| f.apply(x), &mut sampler, 100).unwrap();
        assert_eq!(report.max_ratio_lipschitz, 0.0);
    }

    #[test]
    fn certify_identity_has_unit_ratios() {
        let f = StrongMonotoneMap::identity(3);
        let mut sampler = PairSampler::new(7, 3, 1.0);
        let report = certify_constants(|x| f.apply(x), &mut sampler, 200).unwrap();
        assert!((report.max_ratio_lipschitz - 1.0).abs() < 1e-12);
        assert!((report.min_ratio_monotone - 1.0).abs() < 1e-12);
    }

    #[test]
    fn certify_spd_diag_1_4() {
        let f = StrongMonotoneMap::affine_spd(diag(&[1.0, 4.0]), Vector::zeros(2)).unwrap();
        let mut sampler = PairSampler::new(99, 2, 1.0);
        let report = certify_constants(|x| f.apply(x), &mut sampler, 10_000).unwrap();
        // The empirical sup approaches 4 from below (attained along e2).
        assert!(report.max_ratio_lipschitz <= 4.0 + 1e-9);
        assert!(report.max_ratio_lipschitz >= 3.5, "{}", report.max_ratio_lipschitz);
        assert!(report.min_ratio_monotone >= 1.0 - 1e-9);
    }

    #[test]
    fn certify_rejects_zero_samples() {
        let f = LipschitzMap::zero(2);
        let mut sampler = PairSampler::new(1, 2, 1.0);
        assert!(certify_constants(|x| f.apply(x), &mut sampler, 0).is_err());
    }

    #[test]
    fn instance_rejects_alpha_not_below_eta() {
        let q = ConvexSet::whole_space(2);
        let t = NonexpansiveMap::identity(2);
        let f = LipschitzMap::affine(Matrix::identity(2), Vector::zeros(2)).unwrap();
        let big_f = StrongMonotoneMap::identity(2);
        let err =
            ProblemInstance::new(q.clone(), t.clone(), f.clone(), big_f.clone(), false)
                .unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
        // ...but accepts it under the limit-case flag
        assert!(ProblemInstance::new(q, t, f, big_f, true).is_ok());
    }

    #[test]
    fn g_is_strongly_monotone_with_gap_coefficient() {
        let q = ConvexSet::whole_space(2);
        let t = NonexpansiveMap::identity(2);
        let f = LipschitzMap::affine(Matrix::scaled_identity(2, 0.25), Vector::zeros(2)).unwrap();
        let big_f = StrongMonotoneMap::affine_spd(diag(&[1.0, 2.0]), Vector::zeros(2)).unwrap();
        let p = ProblemInstance::new(q, t, f, big_f, false).unwrap();
        let gap = p.eta() - p.alpha();
        let mut sampler = PairSampler::new(5, 2, 2.0);
        for _ in 0..500 {
            let (x, y) = sampler.pair();
            let dg = &p.g_at(&x).unwrap() - &p.g_at(&y).unwrap();
            let dx = &x - &y;
            let lhs = inner(&dg, &dx).unwrap();
            assert!(lhs >= (gap - 1e-9) * norm(&dx).powi(2) - 1e-12);
        }
    }

    #[test]
    fn composition_fix_residual_vanishes_exactly_on_the_intersection() {
        let box2 = ConvexSet::boxed(v(&[0.0, 0.0]), v(&[2.0, 2.0])).unwrap();
        let hs = ConvexSet::halfspace(v(&[1.0, 1.0]), 3.0).unwrap();
        let t = NonexpansiveMap::projection_composition(vec![box2.clone(), hs.clone()]).unwrap();
        let inter = ConvexSet::intersection(vec![box2, hs]).unwrap();
        let mut sampler = PairSampler::new(31, 2, 2.0);
        for _ in 0..200 {
            let (raw, _) = sampler.pair();
            let inside = inter.dykstra_project(&raw, 1e-12, 100_000).unwrap();
            assert!(t.fix_residual(&inside).unwrap() <= 1e-10);
        }
        for outside in [v(&[3.0, 0.5]), v(&[-1.0, 1.0]), v(&[2.0, 2.0])] {
            assert!(!inter.contains(&outside, 1e-3).unwrap());
            assert!(t.fix_residual(&outside).unwrap() > 1e-6, "{:?}", outside);
        }
    }

    #[test]
    fn q_invariance_probe_detects_escape() {
        // T projects onto a ball that pokes outside Q, so T does not map Q
        // into Q.
        let q = ConvexSet::boxed(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let escape_ball = ConvexSet::ball(v(&[3.0, 3.0]), 0.5).unwrap();
        let t = NonexpansiveMap::set_projection(escape_ball);
        let f = LipschitzMap::zero(2);
        let big_f = StrongMonotoneMap::identity(2);
        let p = ProblemInstance::new(q, t, f, big_f, false).unwrap();
        assert!(p.check_q_invariant(3, 16, 1e-8).is_err());
    }
}
