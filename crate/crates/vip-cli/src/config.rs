//! Experiment configuration: JSON schema, loading with validation, saving,
//! and the conversion into solver-library types.
//!
//! The schema uses tagged records throughout, e.g.
//! `{"type":"box","lower":[0,0],"upper":[1,1]}` for sets and
//! `{"alpha":{"type":"power","a":1.0,"theta":1.0}, ...}` for schedules.
//! Loading validates every structural invariant (dimensions, coefficient
//! regime, x0 membership, delta0 range, Q-invariance of T) and reports the
//! violated invariant by name.

use crate::HarnessError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use vip_core::operators::{
    LipschitzMap, Matrix, NonexpansiveMap, ProblemInstance, StrongMonotoneMap,
};
use vip_core::schedules::{
    AlphaSchedule, BetaSchedule, CheckOptions, DirectionRule, ErrorSchedule, TailRule,
};
use vip_core::sets::ConvexSet;
use vip_core::solver::RunSettings;
use vip_core::space::Vector;

pub type Result<T> = std::result::Result<T, HarnessError>;

fn cfg_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

// ---------------------------------------------------------------------------
// serde DTOs (exact on-disk schema)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Hpa,
    ImplicitSweep,
    RegularizationSweep,
    Oracle,
    Validate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Hyperplane {
        normal: Vec<f64>,
        offset: f64,
    },
    Affine {
        basepoint: Vec<f64>,
        basis: Vec<Vec<f64>>,
    },
    WholeSpace {
        dim: usize,
    },
    Intersection {
        members: Vec<SetSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity {
        dim: usize,
    },
    SetProjection {
        set: SetSpec,
    },
    ProjectionComposition {
        sets: Vec<SetSpec>,
    },
    Averaged {
        base: Box<MapSpec>,
        weight: f64,
    },
    Rotation2d {
        angle: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LipschitzSpec {
    Constant { value: Vec<f64> },
    Zero { dim: usize },
    /// Dense row-major matrix: one inner list per row.
    Affine { matrix: Vec<Vec<f64>>, shift: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrongSpec {
    Identity { dim: usize },
    AffineSpd { matrix: Vec<Vec<f64>>, shift: Vec<f64> },
    ScaledIdentityShift { scale: f64, shift: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub q: SetSpec,
    pub t: MapSpec,
    pub f: LipschitzSpec,
    #[serde(rename = "F")]
    pub big_f: StrongSpec,
    #[serde(default)]
    pub limit_case: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSpec {
    HoldLast,
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaSpec {
    Power { a: f64, theta: f64 },
    Geometric { a: f64, rho: f64 },
    Constant { a: f64 },
    Custom { values: Vec<f64>, tail: TailSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BetaSpec {
    Constant { b: f64 },
    PowerDecay { b: f64, gamma: f64 },
    Custom { values: Vec<f64>, tail: TailSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DirectionSpec {
    Fixed {
        vector: Vec<f64>,
    },
    /// Deterministic per-index directions; `seed` defaults to the config
    /// seed (as possibly overridden on the command line).
    Seeded {
        #[serde(default)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ErrorSpec {
    Zero,
    Summable {
        c: f64,
        rho: f64,
        direction: DirectionSpec,
    },
    RelativelySmall {
        c: f64,
        direction: DirectionSpec,
    },
    Custom {
        norms: Vec<f64>,
        tail: TailSpec,
        direction: DirectionSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub alpha: AlphaSpec,
    pub beta: BetaSpec,
    pub error: ErrorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub x0: Vec<f64>,
    pub max_iter: usize,
    pub stop_tol: f64,
    #[serde(default)]
    pub delta0: Option<f64>,
    /// Accuracy of the independent oracle used in summaries.
    #[serde(default)]
    pub oracle_tol: Option<f64>,
    #[serde(default)]
    pub oracle_lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplicitSpec {
    /// Step parameters, swept in order.
    pub t_values: Vec<f64>,
    /// Perturbation magnitude rule `||e(t)|| = error_coeff * t^2`.
    #[serde(default)]
    pub error_coeff: f64,
    #[serde(default)]
    pub direction: Option<DirectionSpec>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationSpec {
    /// Strictly decreasing positive epsilons.
    pub epsilons: Vec<f64>,
}

/// The on-disk experiment description. Round-trips losslessly through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub h2_ratio_to_one: bool,
    pub problem: ProblemSpec,
    pub schedules: ScheduleSpec,
    pub solver: SolverSpec,
    #[serde(default)]
    pub reference: Option<Vec<f64>>,
    #[serde(default)]
    pub implicit: Option<ImplicitSpec>,
    #[serde(default)]
    pub regularization: Option<RegularizationSpec>,
}

// ---------------------------------------------------------------------------
// Conversion into library types
// ---------------------------------------------------------------------------

fn vector(coords: &[f64], what: &str) -> Result<Vector> {
    if coords.is_empty() {
        return Err(cfg_err(format!("{what}: vectors must have dim >= 1")));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(cfg_err(format!("{what}: coordinates must be finite")));
    }
    Ok(Vector::new(coords.to_vec()))
}

fn build_set(spec: &SetSpec) -> Result<ConvexSet> {
    let built = match spec {
        SetSpec::Box { lower, upper } => {
            ConvexSet::boxed(vector(lower, "box lower")?, vector(upper, "box upper")?)
        }
        SetSpec::Ball { center, radius } => ConvexSet::ball(vector(center, "ball center")?, *radius),
        SetSpec::Halfspace { normal, offset } => {
            ConvexSet::halfspace(vector(normal, "halfspace normal")?, *offset)
        }
        SetSpec::Hyperplane { normal, offset } => {
            ConvexSet::hyperplane(vector(normal, "hyperplane normal")?, *offset)
        }
        SetSpec::Affine { basepoint, basis } => {
            let base = vector(basepoint, "affine basepoint")?;
            let basis = basis
                .iter()
                .map(|b| vector(b, "affine basis vector"))
                .collect::<Result<Vec<_>>>()?;
            ConvexSet::affine_subspace(base, basis)
        }
        SetSpec::WholeSpace { dim } => {
            if *dim == 0 {
                return Err(cfg_err("whole_space: dim must be >= 1"));
            }
            Ok(ConvexSet::whole_space(*dim))
        }
        SetSpec::Intersection { members } => {
            let members = members.iter().map(build_set).collect::<Result<Vec<_>>>()?;
            ConvexSet::intersection(members)
        }
    };
    built.map_err(|e| cfg_err(e.to_string()))
}

fn build_map(spec: &MapSpec) -> Result<NonexpansiveMap> {
    match spec {
        MapSpec::Identity { dim } => Ok(NonexpansiveMap::identity(*dim)),
        MapSpec::SetProjection { set } => Ok(NonexpansiveMap::set_projection(build_set(set)?)),
        MapSpec::ProjectionComposition { sets } => {
            let sets = sets.iter().map(build_set).collect::<Result<Vec<_>>>()?;
            NonexpansiveMap::projection_composition(sets).map_err(|e| cfg_err(e.to_string()))
        }
        MapSpec::Averaged { base, weight } => {
            let base = build_map(base)?;
            NonexpansiveMap::averaged(base, *weight).map_err(|e| cfg_err(e.to_string()))
        }
        MapSpec::Rotation2d { angle } => Ok(NonexpansiveMap::rotation_2d(*angle)),
    }
}

fn build_matrix(rows: &[Vec<f64>], what: &str) -> Result<Matrix> {
    Matrix::from_rows(rows.to_vec()).map_err(|e| cfg_err(format!("{what}: {e}")))
}

fn build_lipschitz(spec: &LipschitzSpec) -> Result<LipschitzMap> {
    match spec {
        LipschitzSpec::Constant { value } => Ok(LipschitzMap::constant(vector(value, "f value")?)),
        LipschitzSpec::Zero { dim } => Ok(LipschitzMap::zero(*dim)),
        LipschitzSpec::Affine { matrix, shift } => LipschitzMap::affine(
            build_matrix(matrix, "f matrix")?,
            vector(shift, "f shift")?,
        )
        .map_err(|e| cfg_err(e.to_string())),
    }
}

fn build_strong(spec: &StrongSpec) -> Result<StrongMonotoneMap> {
    match spec {
        StrongSpec::Identity { dim } => Ok(StrongMonotoneMap::identity(*dim)),
        StrongSpec::AffineSpd { matrix, shift } => StrongMonotoneMap::affine_spd(
            build_matrix(matrix, "F matrix")?,
            vector(shift, "F shift")?,
        )
        .map_err(|e| cfg_err(e.to_string())),
        StrongSpec::ScaledIdentityShift { scale, shift } => {
            StrongMonotoneMap::scaled_identity_shift(*scale, vector(shift, "F shift")?)
                .map_err(|e| cfg_err(e.to_string()))
        }
    }
}

fn tail(spec: &TailSpec) -> TailRule {
    match spec {
        TailSpec::HoldLast => TailRule::HoldLast,
        TailSpec::Cycle => TailRule::Cycle,
    }
}

fn build_direction(spec: &DirectionSpec, default_seed: u64, dim: usize) -> Result<DirectionRule> {
    match spec {
        DirectionSpec::Fixed { vector: v } => {
            if v.len() != dim {
                return Err(cfg_err(format!(
                    "perturbation direction has dim {}, problem has dim {dim}",
                    v.len()
                )));
            }
            DirectionRule::fixed(vector(v, "perturbation direction")?)
                .map_err(|e| cfg_err(e.to_string()))
        }
        DirectionSpec::Seeded { seed } => Ok(DirectionRule::seeded(seed.unwrap_or(default_seed))),
    }
}

fn build_alpha(spec: &AlphaSpec) -> Result<AlphaSchedule> {
    let built = match spec {
        AlphaSpec::Power { a, theta } => AlphaSchedule::power_law(*a, *theta),
        AlphaSpec::Geometric { a, rho } => AlphaSchedule::geometric(*a, *rho),
        AlphaSpec::Constant { a } => AlphaSchedule::constant(*a),
        AlphaSpec::Custom { values, tail: t } => AlphaSchedule::custom(values.clone(), tail(t)),
    };
    built.map_err(|e| cfg_err(e.to_string()))
}

fn build_beta(spec: &BetaSpec) -> Result<BetaSchedule> {
    let built = match spec {
        BetaSpec::Constant { b } => BetaSchedule::constant(*b),
        BetaSpec::PowerDecay { b, gamma } => BetaSchedule::power_decay(*b, *gamma),
        BetaSpec::Custom { values, tail: t } => BetaSchedule::custom(values.clone(), tail(t)),
    };
    built.map_err(|e| cfg_err(e.to_string()))
}

fn build_error(spec: &ErrorSpec, default_seed: u64, dim: usize) -> Result<ErrorSchedule> {
    let built = match spec {
        ErrorSpec::Zero => Ok(ErrorSchedule::zero()),
        ErrorSpec::Summable { c, rho, direction } => {
            ErrorSchedule::summable(*c, *rho, build_direction(direction, default_seed, dim)?)
        }
        ErrorSpec::RelativelySmall { c, direction } => {
            ErrorSchedule::relatively_small(*c, build_direction(direction, default_seed, dim)?)
        }
        ErrorSpec::Custom {
            norms,
            tail: t,
            direction,
        } => ErrorSchedule::custom(
            norms.clone(),
            tail(t),
            build_direction(direction, default_seed, dim)?,
        ),
    };
    built.map_err(|e| cfg_err(e.to_string()))
}

/// Sweep parameters for the implicit mode, converted.
#[derive(Debug, Clone)]
pub struct ImplicitSweep {
    pub t_values: Vec<f64>,
    pub error_coeff: f64,
    pub direction: DirectionRule,
    pub tol: f64,
}

/// A fully validated experiment, ready to execute.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub mode: Mode,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub problem: ProblemInstance,
    pub settings: RunSettings,
    pub check_options: CheckOptions,
    pub oracle_tol: f64,
    pub oracle_lambda: Option<f64>,
    pub implicit: Option<ImplicitSweep>,
    pub epsilons: Option<Vec<f64>>,
    /// FNV-1a hash of the canonical problem + reference description; written
    /// into trace metadata and enforced by `compare`.
    pub problem_hash: String,
    /// Stem used for output file names (config file stem).
    pub stem: String,
    /// The raw on-disk form, for echoing and round-trips.
    pub raw: ExperimentConfig,
}

/// FNV-1a, 64-bit, over the canonical JSON of the hashed portion.
pub fn fnv1a64(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

fn problem_hash(cfg: &ExperimentConfig) -> String {
    let canon = serde_json::json!({
        "problem": cfg.problem,
        "reference": cfg.reference,
    });
    fnv1a64(canon.to_string().as_bytes())
}

/// Builds and validates an [`Experiment`] from its on-disk form.
///
/// `seed_override` replaces the config seed (CLI `--seed`);
/// `output_override` replaces the config output directory (CLI `--out`,
/// itself overridable by `VIP_OUT_DIR`).
pub fn build_experiment(
    raw: ExperimentConfig,
    stem: String,
    seed_override: Option<u64>,
    output_override: Option<PathBuf>,
) -> Result<Experiment> {
    let seed = seed_override.unwrap_or(raw.seed);

    let problem = ProblemInstance::new(
        build_set(&raw.problem.q)?,
        build_map(&raw.problem.t)?,
        build_lipschitz(&raw.problem.f)?,
        build_strong(&raw.problem.big_f)?,
        raw.problem.limit_case,
    )
    .map_err(|e| cfg_err(e.to_string()))?;

    let alpha = build_alpha(&raw.schedules.alpha)?;
    let beta = build_beta(&raw.schedules.beta)?;
    let error = build_error(&raw.schedules.error, seed, problem.dim())?;

    let x0 = vector(&raw.solver.x0, "x0")?;
    if x0.dim() != problem.dim() {
        return Err(cfg_err(format!(
            "x0 has dim {}, problem has dim {}",
            x0.dim(),
            problem.dim()
        )));
    }
    if !problem
        .constraint()
        .contains(&x0, 1e-10)
        .map_err(|e| cfg_err(e.to_string()))?
    {
        return Err(cfg_err("x0 must lie in Q (within 1e-10)"));
    }
    if !(raw.solver.stop_tol > 0.0) {
        return Err(cfg_err("stop_tol must be positive"));
    }
    if raw.solver.max_iter == 0 {
        return Err(cfg_err("max_iter must be at least 1"));
    }

    let reference = match &raw.reference {
        None => None,
        Some(r) => {
            let r = vector(r, "reference")?;
            if r.dim() != problem.dim() {
                return Err(cfg_err("reference point has the wrong dimension"));
            }
            Some(r)
        }
    };

    // delta0 admissibility: for strict instances against delta0_star directly;
    // limit-case instances get their delta0 checked per-epsilon on the
    // regularized problem, where delta0_star exists.
    if let Some(d) = raw.solver.delta0 {
        if problem.limit_case() {
            if !(d > 0.0) {
                return Err(cfg_err("delta0 out of range: must be positive"));
            }
        } else {
            let upper =
                vip_core::solver::delta0_star(&problem).map_err(|e| cfg_err(e.to_string()))?;
            if !(d > 0.0 && d < upper) {
                return Err(cfg_err(format!(
                    "delta0 out of range: must lie strictly inside (0, {upper}), got {d}"
                )));
            }
        }
    }

    // Mode/limit-case coherence.
    match raw.mode {
        Mode::RegularizationSweep => {
            if !problem.limit_case() {
                return Err(cfg_err(
                    "regularization-sweep requires a limit_case problem; strict instances run \
                     in hpa mode",
                ));
            }
            let spec = raw
                .regularization
                .as_ref()
                .ok_or_else(|| cfg_err("regularization-sweep needs a `regularization` section"))?;
            if spec.epsilons.is_empty() {
                return Err(cfg_err("regularization.epsilons must be nonempty"));
            }
            if spec.epsilons.iter().any(|e| !(*e > 0.0)) {
                return Err(cfg_err("regularization.epsilons must be positive"));
            }
            if spec.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
                return Err(cfg_err("regularization.epsilons must be strictly decreasing"));
            }
        }
        Mode::Validate => {}
        _ => {
            if problem.limit_case() {
                return Err(cfg_err(
                    "limit-case problem (alpha = eta): use mode \"regularization-sweep\"",
                ));
            }
        }
    }

    let implicit = match (&raw.mode, &raw.implicit) {
        (Mode::ImplicitSweep, None) => {
            return Err(cfg_err("implicit-sweep needs an `implicit` section"))
        }
        (_, Some(spec)) => {
            if spec.t_values.is_empty() {
                return Err(cfg_err("implicit.t_values must be nonempty"));
            }
            if spec.t_values.iter().any(|t| !(*t > 0.0)) {
                return Err(cfg_err("implicit.t_values must be positive"));
            }
            if !problem.limit_case() {
                let upper =
                    vip_core::solver::delta0_star(&problem).map_err(|e| cfg_err(e.to_string()))?;
                if let Some(t) = spec.t_values.iter().find(|t| !(**t < upper)) {
                    return Err(cfg_err(format!(
                        "implicit.t_values must stay below delta0_star = {upper}, got {t}"
                    )));
                }
            }
            if !(spec.tol > 0.0) {
                return Err(cfg_err("implicit.tol must be positive"));
            }
            if !(spec.error_coeff >= 0.0) {
                return Err(cfg_err("implicit.error_coeff must be >= 0"));
            }
            let direction = match &spec.direction {
                Some(d) => build_direction(d, seed, problem.dim())?,
                None => DirectionRule::seeded(seed),
            };
            Some(ImplicitSweep {
                t_values: spec.t_values.clone(),
                error_coeff: spec.error_coeff,
                direction,
                tol: spec.tol,
            })
        }
        (_, None) => None,
    };

    // Q-invariance of T on probe points.
    problem
        .check_q_invariant(seed, 32, 1e-8)
        .map_err(|e| cfg_err(e.to_string()))?;

    let settings = RunSettings {
        alpha,
        beta,
        error,
        x0,
        max_iter: raw.solver.max_iter,
        stop_tol: raw.solver.stop_tol,
        delta0: raw.solver.delta0,
        reference,
    };

    // For strict instances, surface SolverConfig-level validation now rather
    // than at run time.
    if !problem.limit_case() {
        vip_core::solver::SolverConfig::new(problem.clone(), settings.clone())
            .map_err(|e| cfg_err(e.to_string()))?;
    }

    Ok(Experiment {
        mode: raw.mode.clone(),
        seed,
        output: output_override.or_else(|| raw.output.as_ref().map(PathBuf::from)),
        problem_hash: problem_hash(&raw),
        problem,
        settings,
        check_options: CheckOptions {
            h2_ratio_to_one: raw.h2_ratio_to_one,
        },
        oracle_tol: raw.solver.oracle_tol.unwrap_or(1e-12),
        oracle_lambda: raw.solver.oracle_lambda,
        implicit,
        epsilons: raw.regularization.as_ref().map(|r| r.epsilons.clone()),
        stem,
        raw,
    })
}

/// Parses an experiment file without validating semantics.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(crate::io_err(path))?;
    serde_json::from_str(&text).map_err(|e| {
        cfg_err(format!(
            "{}: parse error at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Loads and fully validates an experiment file.
pub fn load_experiment(
    path: &Path,
    seed_override: Option<u64>,
    output_override: Option<PathBuf>,
) -> Result<Experiment> {
    let raw = parse_config(path)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".into());
    build_experiment(raw, stem, seed_override, output_override)
}

/// Writes a config back to disk (pretty JSON). `load(save(cfg)) == cfg`.
pub fn save_config(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(cfg)
        .map_err(|e| cfg_err(format!("serialize: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(crate::io_err(path))
}
