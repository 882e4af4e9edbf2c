//! Randomized property suites with reproducible seeds and JSON-lines reports.
//!
//! Every property is evaluated as a *slack*: a real number that is
//! nonnegative exactly when the property holds at the requested tolerance.
//! Equalities use `tol - relative_error`, order relations use
//! `margin / scale + tol` (see [`OrderVerdict::slack`]).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::geometry::{geodesic, geodesic_distance, metric_omega};
use crate::jcalc::{
    bullet, derive_seed, exp_j, log_j, pow_j, random_j_hermitian, random_kj, random_pj, rng_from_seed, sample_gl,
    sample_matrix,
};
use crate::jstruct::{is_j_hermitian, phi_j, phi_j_inv, sharp, JPositive, Signature, MEMBERSHIP_TOL};
use crate::matcore::{mat_exp_h, mat_log_pd, psi_matrix, structural_residual, Field, Matrix};
use crate::matfile::{matrix_value, to_canonical_json};
use crate::means::{
    bullet_product_commuting,    ando_hiai_check, ando_hiai_normalize, arithmetic_mean_j, classical_mean, comparable_pair, furuta_check,
    harmonic_mean_j, maximality_check, weighted_mean,
};
use crate::order::j_leq;
use crate::scalars::{Quaternion, Scalar, ScalarField};
use crate::{Error, Result};

/// Aggregate properties always draw at least this many samples.
pub const AGGREGATE_MIN_TRIALS: usize = 200;
/// Required fraction of trials with `exp_J(X)^{-1} != exp_J(-X)`.
pub const GENERIC_FRACTION: f64 = 0.9;
/// Absolute entrywise tolerance for the printed non-commutativity example.
pub const WITNESS_TOL: f64 = 5e-4;
/// Relative bound on the structural residual of computed matrix functions over H.
pub const IMAGE_RESIDUAL_TOL: f64 = 1e-10;
const MAX_SHRINK_STEPS: usize = 30;

/// Named groups of properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Powers,
    Order,
    Geometry,
    Means,
    Inequalities,
    Quaternion,
    All,
}

impl Suite {
    pub const NAMED: [Suite; 6] =
        [Suite::Powers, Suite::Order, Suite::Geometry, Suite::Means, Suite::Inequalities, Suite::Quaternion];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Powers => "powers",
            Suite::Order => "order",
            Suite::Geometry => "geometry",
            Suite::Means => "means",
            Suite::Inequalities => "inequalities",
            Suite::Quaternion => "quaternion",
            Suite::All => "all",
        }
    }

    /// Properties run by this suite, in report order.
    pub fn members(self) -> Vec<PropId> {
        PropId::ALL.iter().copied().filter(|p| self == Suite::All || p.suite() == self).collect()
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::NAMED
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|x| x.as_str() == s)
            .copied()
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! prop_ids {
    ($($variant:ident => $name:literal, $suite:ident;)*) => {
        /// Identifier of one checked property.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum PropId { $($variant),* }

        impl PropId {
            pub const ALL: &'static [PropId] = &[$(PropId::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self { $(PropId::$variant => $name),* }
            }

            pub fn suite(self) -> Suite {
                match self { $(PropId::$variant => Suite::$suite),* }
            }
        }
    };
}

prop_ids! {
    ExpNonInjective => "powers.exp_non_injective", Powers;
    InverseExponential => "powers.inverse_exponential", Powers;
    GenericInequality => "powers.generic_inequality", Powers;
    KjPowerCongruence => "powers.kj_congruence", Powers;
    BulletCommutingPowers => "powers.bullet_commuting", Powers;
    PowerMonotonicity => "order.power_monotonicity", Order;
    SquareNotMonotone => "order.square_not_monotone", Order;
    OrderCongruence => "order.congruence", Order;
    InverseAntiMonotone => "order.inverse_antimonotone", Order;
    GeodesicPullback => "geometry.pullback", Geometry;
    MetricPositivity => "geometry.metric_positivity", Geometry;
    MetricInvariance => "geometry.metric_invariance", Geometry;
    SegmentAdditivity => "geometry.segment_additivity", Geometry;
    MeanSymmetry => "means.symmetry", Means;
    MeanInversion => "means.inversion", Means;
    MeanIdempotence => "means.idempotence", Means;
    MeanScaling => "means.scaling", Means;
    MeanTimeReversal => "means.time_reversal", Means;
    MeanMonotonicity => "means.monotonicity", Means;
    MeanKjCongruence => "means.kj_congruence", Means;
    JointConcavity => "means.joint_concavity", Means;
    Composition => "means.composition", Means;
    AgmSandwich => "means.agm", Means;
    MeanPullback => "means.pullback", Means;
    NoncommutativityWitness => "means.noncommutative_witness", Means;
    Maximality => "inequalities.maximality", Inequalities;
    AndoHiai => "inequalities.ando_hiai", Inequalities;
    Furuta => "inequalities.furuta", Inequalities;
    PsiHomomorphism => "quaternion.psi_homomorphism", Quaternion;
    TrdCyclicity => "quaternion.trd_cyclicity", Quaternion;
    SpectralReconstruction => "quaternion.spectral_reconstruction", Quaternion;
    ExpLogRoundTrip => "quaternion.exp_log_round_trip", Quaternion;
    ImageResidual => "quaternion.image_residual", Quaternion;
    FunctionalCalculus => "quaternion.functional_calculus", Quaternion;
}

impl fmt::Display for PropId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which stated invariant each property checks, as `(property, module, invariant)`.
pub const REGISTRY: &[(PropId, &str, &str)] = &[
    (PropId::ExpNonInjective, "jcalc", "exp non-injectivity witness"),
    (PropId::InverseExponential, "jcalc", "inverse-exponential law"),
    (PropId::GenericInequality, "jcalc", "generic inequality"),
    (PropId::KjPowerCongruence, "jcalc", "K_J-congruence of powers"),
    (PropId::BulletCommutingPowers, "jcalc", "bullet-commuting powers"),
    (PropId::PowerMonotonicity, "order", "power monotonicity"),
    (PropId::SquareNotMonotone, "order", "restriction necessity"),
    (PropId::OrderCongruence, "order", "congruence"),
    (PropId::InverseAntiMonotone, "order", "inverse anti-monotonicity"),
    (PropId::GeodesicPullback, "geometry", "pullback consistency"),
    (PropId::MetricPositivity, "geometry", "metric positivity"),
    (PropId::MetricInvariance, "geometry", "metric GL-invariance"),
    (PropId::SegmentAdditivity, "geometry", "segment additivity"),
    (PropId::MeanSymmetry, "means", "symmetry"),
    (PropId::MeanInversion, "means", "inversion"),
    (PropId::MeanIdempotence, "means", "idempotence and strictness"),
    (PropId::MeanScaling, "means", "scaling"),
    (PropId::MeanTimeReversal, "means", "time reversal"),
    (PropId::MeanMonotonicity, "means", "monotonicity"),
    (PropId::MeanKjCongruence, "means", "K_J-congruence"),
    (PropId::JointConcavity, "means", "joint concavity"),
    (PropId::Composition, "means", "composition"),
    (PropId::AgmSandwich, "means", "AGM sandwich"),
    (PropId::MeanPullback, "means", "pullback identity"),
    (PropId::NoncommutativityWitness, "means", "non-commutativity witness"),
    (PropId::Maximality, "means", "maximality_check equivalence"),
    (PropId::AndoHiai, "means", "ando_hiai_check"),
    (PropId::Furuta, "means", "furuta_check"),
    (PropId::PsiHomomorphism, "scalars", "psi homomorphism"),
    (PropId::TrdCyclicity, "scalars", "trd cyclicity"),
    (PropId::SpectralReconstruction, "matcore", "quaternionic spectral reconstruction"),
    (PropId::ExpLogRoundTrip, "matcore", "round-trip"),
    (PropId::ImageResidual, "matcore", "psi image stability"),
    (PropId::FunctionalCalculus, "matcore", "quaternionic functional calculus consistency"),
];

/// Outcome of one property over all its trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property_id: String,
    pub trials: usize,
    pub failures: usize,
    /// Smallest slack seen; negative iff some trial failed.
    pub worst_margin: f64,
    pub seed: u64,
    pub counterexample: Option<Value>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// One line of the JSON-lines report, without the newline.
    pub fn to_json_line(&self) -> Result<String> {
        to_canonical_json(self)
    }
}

/// A weighted mean under test.
pub type MeanFn<T> = fn(&JPositive<T>, &JPositive<T>, f64) -> Result<JPositive<T>>;

/// The library's weighted mean as a [`MeanFn`].
pub fn library_mean<T: Field>(a: &JPositive<T>, b: &JPositive<T>, t: f64) -> Result<JPositive<T>> {
    Ok(weighted_mean(a, b, t)?.mean)
}

/// Parameters shared by all properties of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub signature: Signature,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

/// Runs a suite by name for a field chosen at run time.
///
/// `dim` must equal `p + q`. The quaternion suite always runs over H.
pub fn run_suite(
    suite_id: &str,
    sig: Signature,
    field: ScalarField,
    dim: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<PropertyReport>> {
    let suite: Suite = suite_id.parse()?;
    if dim != sig.n() {
        return Err(Error::DimensionMismatch { expected: sig.n(), found: dim });
    }
    let cfg = SuiteConfig { signature: sig, trials, seed, tol };
    match field {
        ScalarField::R => run_suite_typed::<f64>(suite, &cfg, library_mean),
        ScalarField::C => run_suite_typed::<Complex64>(suite, &cfg, library_mean),
        ScalarField::H => run_suite_typed::<Quaternion>(suite, &cfg, library_mean),
    }
}

/// Runs a suite over field `T` with an injectable mean.
pub fn run_suite_typed<T: Field>(suite: Suite, cfg: &SuiteConfig, mean: MeanFn<T>) -> Result<Vec<PropertyReport>> {
    if cfg.trials == 0 {
        return Ok(Vec::new());
    }
    let ctx = Ctx { sig: cfg.signature, tol: cfg.tol, mean };
    let qctx = Ctx::<Quaternion> { sig: cfg.signature, tol: cfg.tol, mean: library_mean };
    let mut reports = Vec::new();
    for id in suite.members() {
        let report = if id.suite() == Suite::Quaternion {
            quaternion_check(id).and_then(|c| run_check(&qctx, id, c, cfg))
        } else {
            generic_check::<T>(id, cfg.signature).and_then(|c| run_check(&ctx, id, c, cfg))
        };
        reports.extend(report);
    }
    Ok(reports)
}

struct Ctx<T> {
    sig: Signature,
    tol: f64,
    mean: MeanFn<T>,
}

impl<T: Field> Ctx<T> {
    fn mean(&self, a: &JPositive<T>, b: &JPositive<T>, t: f64) -> Result<JPositive<T>> {
        (self.mean)(a, b, t)
    }

    fn eq_slack(&self, x: &Matrix<T>, y: &Matrix<T>) -> f64 {
        self.tol - rel_err(x, y)
    }

    fn leq_slack(&self, x: &Matrix<T>, y: &Matrix<T>) -> Result<f64> {
        Ok(j_leq(x, y, self.sig, self.tol)?.slack(self.tol))
    }
}

fn rel_err<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> f64 {
    (x - y).frobenius_norm() / x.frobenius_norm().max(y.frobenius_norm()).max(1.0)
}

/// Result of one trial: its slack and the inputs that produced it.
struct Outcome {
    slack: f64,
    witness: Value,
}

type TrialFn<T> = fn(&Ctx<T>, &mut Draw, f64) -> Result<Outcome>;
type AggregateFn<T> = fn(&Ctx<T>, u64, usize) -> Result<(usize, Outcome)>;

enum Check<T> {
    /// Independent trials; `shrinkable` when the third argument scales a perturbation.
    Trial { f: TrialFn<T>, shrinkable: bool },
    /// One verdict over a batch of draws at a fixed configuration.
    Aggregate(AggregateFn<T>),
}

/// Per-trial source of independent seeds.
struct Draw {
    seed: u64,
    counter: u64,
}

impl Draw {
    fn new(seed: u64) -> Self {
        Draw { seed, counter: 0 }
    }

    fn seed(&mut self) -> u64 {
        self.counter += 1;
        derive_seed(self.seed, self.counter)
    }

    fn rng(&mut self) -> ChaCha8Rng {
        rng_from_seed(self.seed())
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng().random::<f64>()
    }

    /// An interior weight in `[0.1, 0.9]`.
    fn weight(&mut self) -> f64 {
        self.uniform(0.1, 0.9)
    }

    fn pj<T: Field>(&mut self, sig: Signature) -> JPositive<T> {
        random_pj(sig, self.seed())
    }

    /// `exp_J(H)` for a random J-Hermitian `H` with `||H||_F` in `[0.5, 2]`.
    fn tame_pj<T: Field>(&mut self, sig: Signature) -> Result<JPositive<T>> {
        let h = self.j_hermitian::<T>(sig);
        let radius = self.uniform(0.5, 2.0);
        exp_j(&h.scale(radius / h.frobenius_norm().max(f64::MIN_POSITIVE)), sig)
    }

    fn j_hermitian<T: Scalar>(&mut self, sig: Signature) -> Matrix<T> {
        random_j_hermitian(sig, self.seed())
    }

    /// `x + J (G G*)` with `G` Gaussian times `scale`.
    fn bumped<T: Field>(&mut self, x: &JPositive<T>, scale: f64) -> Result<JPositive<T>> {
        let n = x.dim();
        let g = sample_matrix::<T, _>(&mut self.rng(), n, n).scale(scale);
        JPositive::from_image(&x.image() + &(&g * &g.adjoint()), x.signature(), MEMBERSHIP_TOL)
    }
}

fn witness<T: Scalar>(mats: &[(&str, &Matrix<T>)], extra: Value) -> Value {
    let mut obj = serde_json::Map::new();
    for (name, m) in mats {
        obj.insert(name.to_string(), matrix_value(m));
    }
    if let Value::Object(more) = extra {
        obj.extend(more);
    }
    Value::Object(obj)
}

fn min_slack(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

fn failed(o: &Result<Outcome>) -> bool {
    o.as_ref().map_or(true, |o| !(o.slack >= 0.0))
}

fn describe(o: Result<Outcome>) -> (f64, Value) {
    match o {
        Ok(o) => (o.slack, o.witness),
        Err(e) => (f64::NEG_INFINITY, json!({ "error": e.to_string() })),
    }
}

fn run_check<T: Field>(ctx: &Ctx<T>, id: PropId, check: Check<T>, cfg: &SuiteConfig) -> Result<PropertyReport> {
    let ordinal = PropId::ALL.iter().position(|p| *p == id).expect("registered") as u64;
    let prop_seed = derive_seed(cfg.seed, ordinal);
    let mut report =
        PropertyReport { property_id: id.as_str().into(), trials: 0, failures: 0, worst_margin: 0.0, seed: cfg.seed, counterexample: None };
    match check {
        Check::Trial { f, shrinkable } => {
            let outcomes: Vec<Result<Outcome>> = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|i| f(ctx, &mut Draw::new(derive_seed(prop_seed, i)), 1.0))
                .collect();
            report.trials = outcomes.len();
            report.failures = outcomes.iter().filter(|o| failed(o)).count();
            report.worst_margin = min_slack(outcomes.iter().map(|o| o.as_ref().map_or(f64::NEG_INFINITY, |o| o.slack)));
            if let Some(idx) = outcomes.iter().position(failed) {
                let trial_seed = derive_seed(prop_seed, idx as u64);
                let mut scale = 1.0;
                let mut last = outcomes.into_iter().nth(idx).expect("index in range");
                if shrinkable {
                    for _ in 0..MAX_SHRINK_STEPS {
                        let next = f(ctx, &mut Draw::new(trial_seed), scale / 2.0);
                        if !failed(&next) {
                            break;
                        }
                        scale /= 2.0;
                        last = next;
                    }
                }
                let (slack, inputs) = describe(last);
                report.counterexample = Some(json!({
                    "trial": idx,
                    "trial_seed": trial_seed,
                    "perturbation_scale": scale,
                    "slack": slack,
                    "inputs": inputs,
                }));
            }
        }
        Check::Aggregate(f) => {
            let n = cfg.trials.max(AGGREGATE_MIN_TRIALS);
            let result = f(ctx, prop_seed, n);
            report.trials = match &result {
                Ok((used, _)) => *used,
                Err(_) => n,
            };
            let fail = result.as_ref().map_or(true, |(_, o)| !(o.slack >= 0.0));
            let (slack, inputs) = describe(result.map(|(_, o)| o));
            report.worst_margin = slack;
            if fail {
                report.failures = 1;
                report.counterexample = Some(json!({ "slack": slack, "inputs": inputs }));
            }
        }
    }
    Ok(report)
}

/// Looks up the check for a property over field `T`.
///
/// Returns an error for properties that do not apply, which drops them from
/// the report: the exponential witness needs both `p, q >= 1`.
fn generic_check<T: Field>(id: PropId, sig: Signature) -> Result<Check<T>> {
    use PropId::*;
    let trial = |f: TrialFn<T>| Ok(Check::Trial { f, shrinkable: false });
    let shrink = |f: TrialFn<T>| Ok(Check::Trial { f, shrinkable: true });
    match id {
        ExpNonInjective if sig.p() == 0 || sig.q() == 0 => Err(Error::PremiseViolated("definite signature".into())),
        ExpNonInjective => trial(exp_non_injective),
        InverseExponential => trial(inverse_exponential),
        GenericInequality => Ok(Check::Aggregate(generic_inequality)),
        KjPowerCongruence => trial(kj_power_congruence),
        BulletCommutingPowers => trial(bullet_commuting_powers),
        PowerMonotonicity => shrink(power_monotonicity),
        SquareNotMonotone => Ok(Check::Aggregate(square_not_monotone)),
        OrderCongruence => shrink(order_congruence),
        InverseAntiMonotone => shrink(inverse_antimonotone),
        GeodesicPullback => trial(geodesic_pullback),
        MetricPositivity => trial(metric_positivity),
        MetricInvariance => trial(metric_invariance),
        SegmentAdditivity => trial(segment_additivity),
        MeanSymmetry => trial(mean_symmetry),
        MeanInversion => trial(mean_inversion),
        MeanIdempotence => shrink(mean_idempotence),
        MeanScaling => trial(mean_scaling),
        MeanTimeReversal => trial(mean_time_reversal),
        MeanMonotonicity => shrink(mean_monotonicity),
        MeanKjCongruence => trial(mean_kj_congruence),
        JointConcavity => trial(joint_concavity),
        Composition => trial(composition),
        AgmSandwich => trial(agm_sandwich),
        MeanPullback => trial(mean_pullback),
        NoncommutativityWitness => Ok(Check::Aggregate(noncommutativity_witness)),
        Maximality => shrink(maximality),
        AndoHiai => trial(ando_hiai),
        Furuta => shrink(furuta),
        _ => Err(Error::PremiseViolated(format!("{id} runs over H only"))),
    }
}

fn quaternion_check(id: PropId) -> Result<Check<Quaternion>> {
    use PropId::*;
    let f: TrialFn<Quaternion> = match id {
        PsiHomomorphism => psi_homomorphism,
        TrdCyclicity => trd_cyclicity,
        SpectralReconstruction => spectral_reconstruction,
        ExpLogRoundTrip => exp_log_round_trip,
        ImageResidual => image_residual,
        FunctionalCalculus => functional_calculus,
        _ => return Err(Error::PremiseViolated(format!("{id} is not a quaternion property"))),
    };
    Ok(Check::Trial { f, shrinkable: false })
}

const POWER_EXPONENTS: [f64; 4] = [-1.0, 0.3, 0.5, 2.0];

/// A nonzero J-Hermitian `X` with `exp(X) = Id`, supported on coordinates `0` and `p`.
pub fn exp_witness<T: Scalar>(sig: Signature) -> Matrix<T> {
    let n = sig.n();
    let two_pi = 2.0 * std::f64::consts::PI;
    let (upper, lower) = match T::FIELD {
        ScalarField::R => (T::from_real(two_pi), T::from_real(-two_pi)),
        _ => {
            let mut c = vec![0.0; T::FIELD.real_dim()];
            c[1] = two_pi;
            let z = T::from_components(&c).expect("arity matches");
            (z, z)
        }
    };
    let p = sig.p();
    Matrix::from_fn(n, n, |i, j| match (i, j) {
        (0, j) if j == p => upper,
        (i, 0) if i == p => lower,
        _ => T::zero(),
    })
}

fn exp_non_injective<T: Field>(ctx: &Ctx<T>, _: &mut Draw, _: f64) -> Result<Outcome> {
    let x = exp_witness::<T>(ctx.sig);
    let id = Matrix::<T>::identity(ctx.sig.n());
    let e = x.exp()?;
    let hermitian = if is_j_hermitian(&x, ctx.sig, MEMBERSHIP_TOL)? { ctx.tol } else { -1.0 };
    let slack = min_slack([ctx.eq_slack(&e, &id), hermitian, x.frobenius_norm() - ctx.tol]);
    Ok(Outcome { slack, witness: witness(&[("x", &x), ("exp_x", &e)], json!({})) })
}

fn inverse_exponential<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let x = d.j_hermitian::<T>(ctx.sig);
    let h = exp_j(&x, ctx.sig)?;
    let lhs = h.matrix().inverse()?;
    let rhs = &mat_exp_h(&ctx.sig.left(&x).scale(-1.0).hermitian_part())? * &ctx.sig.j();
    Ok(Outcome { slack: ctx.eq_slack(&lhs, &rhs), witness: witness(&[("x", &x)], json!({})) })
}

fn generic_inequality<T: Field>(_: &Ctx<T>, seed: u64, n: usize) -> Result<(usize, Outcome)> {
    let sig = Signature::new(1, 1)?;
    let mut distinct = 0;
    for i in 0..n as u64 {
        let x = random_j_hermitian::<T>(sig, derive_seed(seed, i));
        let inv = exp_j(&x, sig)?.matrix().inverse()?;
        let neg = exp_j(&x.scale(-1.0), sig)?;
        if (&inv - neg.matrix()).frobenius_norm() > 1e-6 {
            distinct += 1;
        }
    }
    let fraction = distinct as f64 / n as f64;
    Ok((n, Outcome { slack: fraction - GENERIC_FRACTION, witness: json!({ "fraction_distinct": fraction, "samples": n }) }))
}

fn kj_power_congruence<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let x = d.pj::<T>(ctx.sig);
    let g = random_kj::<T>(ctx.sig, d.seed());
    let gs = sharp(&g, ctx.sig)?;
    let moved = x.congruence(&g)?;
    let mut slacks = Vec::new();
    for t in POWER_EXPONENTS {
        let lhs = pow_j(&moved, t)?;
        let rhs = &(&g * pow_j(&x, t)?.matrix()) * &gs;
        slacks.push(ctx.eq_slack(lhs.matrix(), &rhs));
    }
    Ok(Outcome { slack: min_slack(slacks), witness: witness(&[("x", x.matrix()), ("g", &g)], json!({})) })
}

fn bullet_commuting_powers<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let s = d.pj::<T>(ctx.sig);
    let (a, b) = (d.uniform(-1.0, 1.0), d.uniform(-1.0, 1.0));
    let (x, y) = (pow_j(&s, a)?, pow_j(&s, b)?);
    let xy = bullet_product_commuting(&x, &y)?;
    let mut slacks = Vec::new();
    for t in POWER_EXPONENTS {
        let lhs = pow_j(&xy, t)?;
        let rhs = bullet(pow_j(&x, t)?.matrix(), pow_j(&y, t)?.matrix(), ctx.sig)?;
        slacks.push(ctx.eq_slack(lhs.matrix(), &rhs));
    }
    Ok(Outcome { slack: min_slack(slacks), witness: witness(&[("s", s.matrix())], json!({ "a": a, "b": b })) })
}

fn power_monotonicity<T: Field>(ctx: &Ctx<T>, d: &mut Draw, scale: f64) -> Result<Outcome> {
    let (big, small) = comparable_pair::<T>(ctx.sig, d.seed(), scale)?;
    let mut slacks = Vec::new();
    for t in [0.25, 0.5, 0.75, 1.0] {
        slacks.push(ctx.leq_slack(pow_j(&small, t)?.matrix(), pow_j(&big, t)?.matrix())?);
    }
    Ok(Outcome { slack: min_slack(slacks), witness: witness(&[("x", small.matrix()), ("y", big.matrix())], json!({})) })
}

fn square_not_monotone<T: Field>(ctx: &Ctx<T>, seed: u64, n: usize) -> Result<(usize, Outcome)> {
    let sig = Signature::new(1, 1)?;
    let mut violations = 0usize;
    for i in 0..n as u64 {
        let (big, small) = comparable_pair::<T>(sig, derive_seed(seed, i), 1.0)?;
        let v = j_leq(pow_j(&small, 2.0)?.matrix(), pow_j(&big, 2.0)?.matrix(), sig, ctx.tol)?;
        if !v.holds {
            violations += 1;
        }
    }
    Ok((n, Outcome { slack: violations as f64 - 1.0, witness: json!({ "violations": violations, "samples": n }) }))
}

fn order_congruence<T: Field>(ctx: &Ctx<T>, d: &mut Draw, scale: f64) -> Result<Outcome> {
    let (big, small) = comparable_pair::<T>(ctx.sig, d.seed(), scale)?;
    let c = sample_gl::<T, _>(&mut d.rng(), ctx.sig.n());
    let cs = sharp(&c, ctx.sig)?;
    let lhs = &(&cs * small.matrix()) * &c;
    let rhs = &(&cs * big.matrix()) * &c;
    let slack = ctx.leq_slack(&lhs, &rhs)?;
    Ok(Outcome { slack, witness: witness(&[("x", small.matrix()), ("y", big.matrix()), ("c", &c)], json!({})) })
}

fn inverse_antimonotone<T: Field>(ctx: &Ctx<T>, d: &mut Draw, scale: f64) -> Result<Outcome> {
    let (big, small) = comparable_pair::<T>(ctx.sig, d.seed(), scale)?;
    let slack = ctx.leq_slack(big.inverse()?.matrix(), small.inverse()?.matrix())?;
    Ok(Outcome { slack, witness: witness(&[("x", small.matrix()), ("y", big.matrix())], json!({})) })
}

fn geodesic_pullback<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let (a, b) = (d.pj::<T>(ctx.sig), d.pj::<T>(ctx.sig));
    let mut slacks = Vec::new();
    for t in [0.1, 0.5, 0.9] {
        let got = phi_j(geodesic(&a, &b, t)?.matrix(), ctx.sig)?;
        slacks.push(ctx.eq_slack(&got, &classical_mean(&a.image(), &b.image(), t)?));
    }
    Ok(Outcome { slack: min_slack(slacks), witness: witness(&[("a", a.matrix()), ("b", b.matrix())], json!({})) })
}

fn metric_positivity<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let p = d.pj::<T>(ctx.sig);
    let (u, v) = (d.j_hermitian::<T>(ctx.sig), d.j_hermitian::<T>(ctx.sig));
    let uu = metric_omega(&p, &u, &u)?;
    let (uv, vu) = (metric_omega(&p, &u, &v)?, metric_omega(&p, &v, &u)?);
    let symmetric = ctx.tol - (uv - vu).abs() / uv.abs().max(1.0);
    let positive = if uu > 0.0 { ctx.tol } else { uu.min(-f64::MIN_POSITIVE) };
    Ok(Outcome { slack: symmetric.min(positive), witness: witness(&[("p", p.matrix()), ("u", &u), ("v", &v)], json!({})) })
}

fn metric_invariance<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let p = d.pj::<T>(ctx.sig);
    let (u, v) = (d.j_hermitian::<T>(ctx.sig), d.j_hermitian::<T>(ctx.sig));
    let g = sample_gl::<T, _>(&mut d.rng(), ctx.sig.n());
    let gs = sharp(&g, ctx.sig)?;
    let before = metric_omega(&p, &u, &v)?;
    let after = metric_omega(&p.congruence(&g)?, &(&(&g * &u) * &gs), &(&(&g * &v) * &gs))?;
    // |omega(U, V)| <= sqrt(omega(U, U) omega(V, V)) bounds the size of every term
    let scale = (metric_omega(&p, &u, &u)? * metric_omega(&p, &v, &v)?).sqrt().max(1.0);
    let slack = ctx.tol - (after - before).abs() / scale;
    Ok(Outcome { slack, witness: witness(&[("p", p.matrix()), ("u", &u), ("v", &v), ("g", &g)], json!({})) })
}

fn segment_additivity<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let (a, b) = (d.pj::<T>(ctx.sig), d.pj::<T>(ctx.sig));
    let t = d.weight();
    let mid = geodesic(&a, &b, t)?;
    let whole = geodesic_distance(&a, &b)?;
    let split = geodesic_distance(&a, &mid)? + geodesic_distance(&mid, &b)?;
    let slack = ctx.tol - (split - whole).abs() / whole.max(1.0);
    Ok(Outcome { slack, witness: witness(&[("a", a.matrix()), ("b", b.matrix())], json!({ "t": t })) })
}

fn pair_witness<T: Field>(a: &JPositive<T>, b: &JPositive<T>, extra: Value) -> Value {
    witness(&[("a", a.matrix()), ("b", b.matrix())], extra)
}

fn mean_symmetry<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let (a, b) = (d.pj::<T>(ctx.sig), d.pj::<T>(ctx.sig));
    let slack = ctx.eq_slack(ctx.mean(&a, &b, 0.5)?.matrix(), ctx.mean(&b, &a, 0.5)?.matrix());
    Ok(Outcome { slack, witness: pair_witness(&a, &b, json!({})) })
}

fn mean_inversion<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let (a, b) = (d.pj::<T>(ctx.sig), d.pj::<T>(ctx.sig));
    let lhs = ctx.mean(&a, &b, 0.5)?.inverse()?;
    let rhs = ctx.mean(&a.inverse()?, &b.inverse()?, 0.5)?;
    Ok(Outcome { slack: ctx.eq_slack(lhs.matrix(), rhs.matrix()), witness: pair_witness(&a, &b, json!({})) })
}

fn mean_idempotence<T: Field>(ctx: &Ctx<T>, d: &mut Draw, scale: f64) -> Result<Outcome> {
    let a = d.pj::<T>(ctx.sig);
    let t = d.weight();
    let b = d.bumped(&a, scale)?;
    let same = ctx.eq_slack(ctx.mean(&a, &a, t)?.matrix(), a.matrix());
    // a distinct second argument must move the mean away from `a`
    let strict = rel_err(ctx.mean(&a, &b, t)?.matrix(), a.matrix()) - ctx.tol;
    Ok(Outcome { slack: same.min(strict), witness: pair_witness(&a, &b, json!({ "t": t })) })
}

fn mean_scaling<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let (a, b) = (d.pj::<T>(ctx.sig), d.pj::<T>(ctx.sig));
    let t = d.weight();
    let base = ctx.mean(&a, &b, t)?;
    let mut slacks = Vec::new();
    for alpha in [0.5, 2.0, 3.0] {
        for beta in [0.5, 2.0, 3.0] {
            let lhs = ctx.mean(&a.scale(alpha)?, &b.scale(beta)?, t)?;
            let factor = alpha.powf(1.0 - t) * beta.powf(t);
            slacks.push(ctx.eq_slack(lhs.matrix(), &base.matrix().scale(factor)));
        }
    }
    Ok(Outcome { slack: min_slack(slacks), witness: pair_witness(&a, &b, json!({ "t": t })) })
}

fn mean_time_reversal<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let (a, b) = (d.pj::<T>(ctx.sig), d.pj::<T>(ctx.sig));
    let t = d.weight();
    let slack = ctx.eq_slack(ctx.mean(&a, &b, t)?.matrix(), ctx.mean(&b, &a, 1.0 - t)?.matrix());
    Ok(Outcome { slack, witness: pair_witness(&a, &b, json!({ "t": t })) })
}

fn mean_monotonicity<T: Field>(ctx: &Ctx<T>, d: &mut Draw, scale: f64) -> Result<Outcome> {
    let (a, b) = (d.pj::<T>(ctx.sig), d.pj::<T>(ctx.sig));
    let (c, dd) = (d.bumped(&a, scale)?, d.bumped(&b, scale)?);
    let t = d.weight();
    let slack = ctx.leq_slack(ctx.mean(&a, &b, t)?.matrix(), ctx.mean(&c, &dd, t)?.matrix())?;
    let w = witness(&[("a", a.matrix()), ("b", b.matrix()), ("c", c.matrix()), ("d", dd.matrix())], json!({ "t": t }));
    Ok(Outcome { slack, witness: w })
}

fn mean_kj_congruence<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let (a, b) = (d.pj::<T>(ctx.sig), d.pj::<T>(ctx.sig));
    let g = random_kj::<T>(ctx.sig, d.seed());
    let t = d.weight();
    let lhs = ctx.mean(&a.congruence(&g)?, &b.congruence(&g)?, t)?;
    let rhs = ctx.mean(&a, &b, t)?.congruence(&g)?;
    let w = witness(&[("a", a.matrix()), ("b", b.matrix()), ("g", &g)], json!({ "t": t }));
    Ok(Outcome { slack: ctx.eq_slack(lhs.matrix(), rhs.matrix()), witness: w })
}

fn joint_concavity<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let sig = ctx.sig;
    let (a, b, c, dd) = (d.pj::<T>(sig), d.pj::<T>(sig), d.pj::<T>(sig), d.pj::<T>(sig));
    let (s, t) = (d.weight(), d.weight());
    let mix = |x: &JPositive<T>, y: &JPositive<T>| arithmetic_mean_j(x, y, s);
    let lhs = &ctx.mean(&a, &c, t)?.matrix().scale(1.0 - s) + &ctx.mean(&b, &dd, t)?.matrix().scale(s);
    let rhs = ctx.mean(&mix(&a, &b)?, &mix(&c, &dd)?, t)?;
    let slack = ctx.leq_slack(&lhs, rhs.matrix())?;
    let w = witness(&[("a", a.matrix()), ("b", b.matrix()), ("c", c.matrix()), ("d", dd.matrix())], json!({ "s": s, "t": t }));
    Ok(Outcome { slack, witness: w })
}

fn composition<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let (a, b) = (d.pj::<T>(ctx.sig), d.pj::<T>(ctx.sig));
    let (t, s, u) = (d.weight(), d.weight(), d.weight());
    let lhs = ctx.mean(&ctx.mean(&a, &b, t)?, &ctx.mean(&a, &b, s)?, u)?;
    let rhs = ctx.mean(&a, &b, (1.0 - u) * t + u * s)?;
    Ok(Outcome { slack: ctx.eq_slack(lhs.matrix(), rhs.matrix()), witness: pair_witness(&a, &b, json!({ "t": t, "s": s, "u": u })) })
}

fn agm_sandwich<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let (a, b) = (d.pj::<T>(ctx.sig), d.pj::<T>(ctx.sig));
    let t = d.weight();
    let g = ctx.mean(&a, &b, t)?;
    let lower = ctx.leq_slack(harmonic_mean_j(&a, &b, t)?.matrix(), g.matrix())?;
    let upper = ctx.leq_slack(g.matrix(), arithmetic_mean_j(&a, &b, t)?.matrix())?;
    Ok(Outcome { slack: lower.min(upper), witness: pair_witness(&a, &b, json!({ "t": t })) })
}

fn mean_pullback<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let (a, b) = (d.pj::<T>(ctx.sig), d.pj::<T>(ctx.sig));
    let mut slacks = Vec::new();
    for t in [0.1, 0.5, 0.9] {
        let got = phi_j(ctx.mean(&a, &b, t)?.matrix(), ctx.sig)?;
        slacks.push(ctx.eq_slack(&got, &classical_mean(&a.image(), &b.image(), t)?));
    }
    Ok(Outcome { slack: min_slack(slacks), witness: pair_witness(&a, &b, json!({})) })
}

/// The fixed pair whose midpoint differs from the product of square roots.
pub fn noncommutative_pair<T: Field>() -> Result<(JPositive<T>, JPositive<T>)> {
    let sig = Signature::new(1, 1)?;
    let m = |rows: [[f64; 2]; 2]| Matrix::<T>::from_fn(2, 2, |i, j| T::from_real(rows[i][j]));
    let a = JPositive::new(m([[2.0, 1.0], [-1.0, -2.0]]), sig, MEMBERSHIP_TOL)?;
    let b = JPositive::new(m([[3.0, 1.0], [-1.0, -1.0]]), sig, MEMBERSHIP_TOL)?;
    Ok((a, b))
}

/// `(A # B) - A^{1/2}_J B^{1/2}_J` for the fixed pair, as printed to six digits.
pub const NONCOMMUTATIVE_DIFFERENCE: [[f64; 2]; 2] = [[0.263207, 0.768429], [-0.857469, -2.50336]];

fn noncommutativity_witness<T: Field>(ctx: &Ctx<T>, _: u64, _: usize) -> Result<(usize, Outcome)> {
    let (a, b) = noncommutative_pair::<T>()?;
    let naive = pow_j(&a, 0.5)?.matrix() * pow_j(&b, 0.5)?.matrix();
    let diff = ctx.mean(&a, &b, 0.5)?.matrix() - &naive;
    let mut worst = 0f64;
    for (i, row) in NONCOMMUTATIVE_DIFFERENCE.iter().enumerate() {
        for (j, &expected) in row.iter().enumerate() {
            worst = worst.max((diff[(i, j)] - T::from_real(expected)).abs());
        }
    }
    Ok((1, Outcome { slack: WITNESS_TOL - worst, witness: witness(&[("difference", &diff)], json!({})) }))
}

fn maximality<T: Field>(ctx: &Ctx<T>, d: &mut Draw, scale: f64) -> Result<Outcome> {
    let sig = ctx.sig;
    let (a, b) = (d.pj::<T>(sig), d.pj::<T>(sig));
    let m = ctx.mean(&a, &b, 0.5)?;
    let n = sig.n();
    // the mean itself is admissible
    let at_max = maximality_check(m.matrix(), &a, &b, ctx.tol)?.slack(ctx.tol);
    // anything strictly above it is not
    let above = m.matrix() + &phi_j_inv(&Matrix::identity(n).scale(0.1), sig)?;
    let v = maximality_check(&above, &a, &b, ctx.tol)?;
    let rejected = -v.margin / v.scale - ctx.tol;
    // admissible perturbations stay below the mean
    let h = d.j_hermitian::<T>(sig).scale(0.1 * scale * m.matrix().frobenius_norm());
    let near = m.matrix() - &h;
    let forward = if maximality_check(&near, &a, &b, ctx.tol)?.holds { ctx.leq_slack(&near, m.matrix())? } else { ctx.tol };
    // and the segment from 0 to the mean is admissible
    let c = d.uniform(0.0, 1.0);
    let shrunk = m.matrix().scale(c);
    let segment = maximality_check(&shrunk, &a, &b, ctx.tol)?.slack(ctx.tol).min(ctx.leq_slack(&shrunk, m.matrix())?);
    let w = witness(&[("a", a.matrix()), ("b", b.matrix()), ("perturbation", &h)], json!({ "c": c }));
    Ok(Outcome { slack: min_slack([at_max, rejected, forward, segment]), witness: w })
}

fn ando_hiai<T: Field>(ctx: &Ctx<T>, d: &mut Draw, _: f64) -> Result<Outcome> {
    // cubes of the inputs are formed, so draw them with bounded logarithms
    let (a0, b0) = (d.tame_pj::<T>(ctx.sig)?, d.tame_pj::<T>(ctx.sig)?);
    let t = d.weight();
    let (a, b) = ando_hiai_normalize(&a0, &b0, t)?;
    let mut slacks = Vec::new();
    for r in [1.0, 1.5, 2.0, 3.0] {
        let v = ando_hiai_check(&a, &b, t, r, ctx.tol)?;
        slacks.push(match v.conclusion {
            Some(c) => c.slack(ctx.tol),
            // normalization guarantees the premise, so a vacuous verdict is a failure
            None => v.premise.slack(ctx.tol).min(-ctx.tol),
        });
    }
    Ok(Outcome { slack: min_slack(slacks), witness: pair_witness(&a, &b, json!({ "t": t })) })
}

fn furuta<T: Field>(ctx: &Ctx<T>, d: &mut Draw, scale: f64) -> Result<Outcome> {
    let (a, b) = comparable_pair::<T>(ctx.sig, d.seed(), scale)?;
    let mut slacks = Vec::new();
    for p in [0.0, 1.0, 2.0] {
        for r in [1.0, 2.0, 3.0] {
            slacks.push(furuta_check(&a, &b, p, r, ctx.tol)?.slack(ctx.tol));
        }
    }
    Ok(Outcome { slack: min_slack(slacks), witness: pair_witness(&a, &b, json!({})) })
}

fn quaternion_hermitian(d: &mut Draw, n: usize) -> Matrix<Quaternion> {
    let x = sample_matrix::<Quaternion, _>(&mut d.rng(), n, n);
    (&x + &x.adjoint()).scale(0.5)
}

fn psi_homomorphism(ctx: &Ctx<Quaternion>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let n = ctx.sig.n();
    let x = sample_matrix::<Quaternion, _>(&mut d.rng(), n, n);
    let y = sample_matrix::<Quaternion, _>(&mut d.rng(), n, n);
    let product = rel_err(&psi_matrix(&(&x * &y)), &(&psi_matrix(&x) * &psi_matrix(&y)));
    let adjoint = rel_err(&psi_matrix(&x.adjoint()), &psi_matrix(&x).adjoint());
    let slack = ctx.tol - product.max(adjoint);
    Ok(Outcome { slack, witness: witness(&[("x", &x), ("y", &y)], json!({})) })
}

fn trd_cyclicity(ctx: &Ctx<Quaternion>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let n = ctx.sig.n();
    let x = sample_matrix::<Quaternion, _>(&mut d.rng(), n, n);
    let y = sample_matrix::<Quaternion, _>(&mut d.rng(), n, n);
    let scale = (x.frobenius_norm() * y.frobenius_norm()).max(1.0);
    let slack = ctx.tol - ((&x * &y).trd() - (&y * &x).trd()).abs() / scale;
    Ok(Outcome { slack, witness: witness(&[("x", &x), ("y", &y)], json!({})) })
}

fn spectral_reconstruction(ctx: &Ctx<Quaternion>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let x = quaternion_hermitian(d, ctx.sig.n());
    let dec = Quaternion::eigh(&x)?;
    let rebuilt = ctx.eq_slack(&dec.reconstruct(), &x);
    let u = &dec.unitary;
    let unitary = ctx.tol - (&(&u.adjoint() * u) - &Matrix::identity(x.rows())).frobenius_norm();
    Ok(Outcome { slack: rebuilt.min(unitary), witness: witness(&[("x", &x)], json!({})) })
}

fn exp_log_round_trip(ctx: &Ctx<Quaternion>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let x = quaternion_hermitian(d, ctx.sig.n());
    let top = Quaternion::eigh(&x)?.spectral_norm().max(f64::MIN_POSITIVE);
    let h = x.scale(d.uniform(0.1, 3.0) / top);
    let hermitian = ctx.eq_slack(&mat_log_pd(&mat_exp_h(&h)?)?, &h);
    let y = d.j_hermitian::<Quaternion>(ctx.sig);
    let cone = ctx.eq_slack(&log_j(&exp_j(&y, ctx.sig)?)?, &y);
    Ok(Outcome { slack: hermitian.min(cone), witness: witness(&[("h", &h), ("y", &y)], json!({})) })
}

fn image_residual(ctx: &Ctx<Quaternion>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let n = ctx.sig.n();
    let p = random_pj::<Quaternion>(Signature::new(n, 0)?, d.seed()).into_matrix();
    let g = sample_gl::<Quaternion, _>(&mut d.rng(), n);
    let embedded = psi_matrix(&p);
    let dec = Complex64::eigh(&embedded)?;
    let mut computed: Vec<Matrix<Complex64>> = [f64::exp, f64::ln, f64::sqrt, |l: f64| l.powf(0.3), f64::recip]
        .into_iter()
        .map(|f| dec.apply(f))
        .collect();
    computed.push(embedded.inverse()?);
    let pg = psi_matrix(&g);
    computed.push(&(&pg * &embedded) * &pg.adjoint());
    let mut slacks = Vec::new();
    for m in &computed {
        slacks.push(IMAGE_RESIDUAL_TOL - structural_residual(m)? / m.frobenius_norm().max(1.0));
    }
    Ok(Outcome { slack: min_slack(slacks), witness: witness(&[("p", &p), ("g", &g)], json!({})) })
}

fn functional_calculus(ctx: &Ctx<Quaternion>, d: &mut Draw, _: f64) -> Result<Outcome> {
    let x = quaternion_hermitian(d, ctx.sig.n());
    let dec = Quaternion::eigh(&x)?;
    let embedded = Complex64::eigh(&psi_matrix(&x))?;
    let mut slacks = Vec::new();
    for f in [f64::exp, f64::sin, |l: f64| l * l * l - l] {
        slacks.push(ctx.tol - rel_err(&psi_matrix(&dec.apply(f)), &embedded.apply(f)));
    }
    Ok(Outcome { slack: min_slack(slacks), witness: witness(&[("x", &x)], json!({})) })
}
