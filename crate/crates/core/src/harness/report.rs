use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::{HarnessError, Stage};
use crate::coherent::{
    correlation_closed, correlation_fock, is_exact_revival, near_revival_bound,
    phase_factorization_check, revival_times, CoherentConfig,
};
use crate::frac::frac_mul;
use crate::gaps::{
    empirical_gaps, empirical_gaps_rational, gap_distribution, mean_recurrence, verify_identity,
    GapDistribution,
};
use crate::phase_geometry::{
    berry_phase, euclidean_area, hyperbolic_area, loop_from_spec, Orientation, PhaseData,
};
use crate::rotation::{classify, iterate, rotation_params, RotationClass, RotationParams};

/// Per-hit correlations listed in a report; checks still cover every hit.
pub const MAX_REPORTED_HITS: usize = 1000;

const HANNAY_TOL: f64 = 1e-12;
const FOCK_TOL: f64 = 1e-10;
const FACTORIZATION_TOL: f64 = 1e-10;
const PROBABILITY_SUM_TOL: f64 = 1e-12;
const MEAN_TOL: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-9;
const EMPIRICAL_MEAN_SIGMAS: f64 = 3.0;

/// Outcome of one runtime invariant check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    /// Passes when `value <= limit`.
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: value <= limit,
            value,
            limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSection {
    pub area_a: f64,
    pub area_b: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub alpha_orientation: Option<Orientation>,
    pub beta_orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevivalCondition {
    /// `ωT + ℬ`.
    pub phase_per_cycle: f64,
    pub nearest_p: i64,
    /// `ωT + ℬ − 2πp` for the nearest `p`.
    pub residual: f64,
    pub exact_revival: bool,
    /// Cycle periods `(2πp − ℬ)/ω` that would give exact revivals.
    pub revival_periods: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPoint {
    pub k: u64,
    pub correlation_closed: f64,
    pub correlation_fock: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentSection {
    pub z_mod2: f64,
    pub omega_t: f64,
    pub truncation: usize,
    pub revival: RevivalCondition,
    pub factorization_modulus: f64,
    pub max_fock_discrepancy: f64,
    pub near_revival_bound: f64,
    pub series: Vec<CorrelationPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationSection {
    pub params: RotationParams,
    pub classification: RotationClass,
    pub declared: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitCorrelation {
    pub k: u64,
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalGaps {
    pub iterations: u64,
    pub hit_count: u64,
    pub transient_discarded: u64,
    pub gap_counts: BTreeMap<u64, u64>,
    pub frequencies: BTreeMap<u64, f64>,
    pub mean_gap: Option<f64>,
    pub mean_std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSection {
    pub delta: f64,
    pub epsilon: f64,
    pub analytic: Option<GapDistribution>,
    pub analytic_mean: Option<f64>,
    pub identity_residual: Option<f64>,
    pub empirical: EmpiricalGaps,
    #[serde(skip)]
    hits: Vec<u64>,
}

impl GapSection {
    pub fn hit_indices(&self) -> &[u64] {
        &self.hits
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub k: u64,
    pub theta: f64,
    pub is_hit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub omega: f64,
    #[serde(rename = "cycle_period_T")]
    pub cycle_period_t: f64,
    pub z: [f64; 2],
    pub epsilon: f64,
    pub phases: PhaseSection,
    pub coherent: CoherentSection,
    pub rotation: RotationSection,
    pub gaps: Option<GapSection>,
    /// Minimum correlation over all window hits, against the bound.
    pub min_hit_correlation: Option<f64>,
    pub hit_correlations: Vec<HitCorrelation>,
    pub orbit: Option<Vec<OrbitPoint>>,
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Result<String, HarnessError> {
        serde_json::to_string_pretty(self).map_err(|e| HarnessError::Serialize(e.to_string()))
    }
}

fn phase_section(
    config: &ExperimentConfig,
    checks: &mut Vec<Check>,
) -> Result<PhaseSection, HarnessError> {
    let stage = |e| HarnessError::stage(Stage::PhaseGeometry, e);
    let (area_a, alpha_orientation) = match &config.alpha_loop {
        Some(src) => {
            let desc = config.resolve_loop("alpha_loop", src)?;
            let lp = loop_from_spec(&desc).map_err(stage)?;
            let a = euclidean_area(&lp);
            (a, Some(Orientation::of_area(a)))
        }
        None => (0.0, None),
    };
    let desc = config.resolve_loop("beta_loop", &config.beta_loop)?;
    let lp = loop_from_spec(&desc).map_err(stage)?;
    let area_b = hyperbolic_area(&lp).map_err(stage)?;
    let phases = PhaseData::new(area_a, area_b);
    let gamma0 = berry_phase(0, &phases);
    let gamma1 = berry_phase(1, &phases);
    let scale = 1f64.max(area_a.abs()).max(area_b.abs());
    checks.push(Check::at_most(
        "hannay_angle_consistency",
        ((gamma0 - gamma1) - area_b).abs(),
        HANNAY_TOL * scale,
    ));
    Ok(PhaseSection {
        area_a,
        area_b,
        gamma0,
        gamma1,
        alpha_orientation,
        beta_orientation: Orientation::of_area(euclidean_area(&lp)),
    })
}

/// Loops only: areas and the Berry phases of the lowest `levels` states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub phases: PhaseSection,
    pub levels: Vec<PhaseLevel>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLevel {
    pub n: u64,
    pub gamma: f64,
}

pub fn run_phases(config: &ExperimentConfig, levels: u64) -> Result<PhaseReport, HarnessError> {
    let mut checks = Vec::new();
    let phases = phase_section(config, &mut checks)?;
    let data = PhaseData::new(phases.area_a, phases.area_b);
    let levels = (0..levels)
        .map(|n| PhaseLevel {
            n,
            gamma: berry_phase(n, &data),
        })
        .collect();
    Ok(PhaseReport {
        phases,
        levels,
        checks,
    })
}

/// Fractional rotation feeding the gap stage.
#[derive(Debug, Clone, Copy)]
enum Delta {
    Irrational(f64),
    /// `p/q` in lowest terms with `0 ≤ p < q`.
    Exact(u64, u64),
}

fn gap_section(
    delta: Delta,
    epsilon: f64,
    iterations: u64,
    checks: &mut Vec<Check>,
) -> Result<GapSection, HarnessError> {
    let stage = |e| HarnessError::stage(Stage::GapStatistics, e);
    let (dist, record) = match delta {
        Delta::Irrational(d) => (
            Some(gap_distribution(d, epsilon).map_err(stage)?),
            empirical_gaps(d, epsilon, iterations).map_err(stage)?,
        ),
        Delta::Exact(p, q) => (
            None,
            empirical_gaps_rational(p, q, epsilon, iterations).map_err(stage)?,
        ),
    };
    let delta = record.delta;
    let empirical = EmpiricalGaps {
        iterations,
        hit_count: record.hit_indices.len() as u64,
        transient_discarded: record.transient_discarded,
        gap_counts: record.gap_counts.clone(),
        frequencies: record.frequencies(),
        mean_gap: record.mean_gap(),
        mean_std_error: record.mean_std_error(),
    };
    let mut analytic_mean = None;
    let mut identity_residual = None;
    if let Some(d) = &dist {
        let mean = mean_recurrence(d);
        let residual = verify_identity(d.k1, d.k2, delta);
        analytic_mean = Some(mean);
        identity_residual = Some(residual);
        checks.push(Check::at_most(
            "probabilities_sum_to_one",
            (d.total_probability() - 1.0).abs(),
            PROBABILITY_SUM_TOL,
        ));
        checks.push(Check::at_most(
            "analytic_mean_is_inverse_epsilon",
            (mean - 1.0 / epsilon).abs(),
            MEAN_TOL,
        ));
        checks.push(Check::at_most(
            "first_return_identity",
            residual.abs(),
            IDENTITY_TOL,
        ));
        let allowed = d.gaps();
        let stray = record
            .gap_counts
            .keys()
            .filter(|g| !allowed.contains(g))
            .count();
        checks.push(Check::at_most(
            "empirical_gaps_within_three_values",
            stray as f64,
            0.0,
        ));
        if let (Some(m), Some(se)) = (empirical.mean_gap, empirical.mean_std_error) {
            checks.push(Check::at_most(
                "empirical_mean_within_3_standard_errors",
                (m - 1.0 / epsilon).abs(),
                EMPIRICAL_MEAN_SIGMAS * se,
            ));
        }
    } else {
        let distinct = record.gap_counts.len();
        checks.push(Check::at_most(
            "periodic_orbit_single_gap",
            distinct.saturating_sub(1) as f64,
            0.0,
        ));
    }
    Ok(GapSection {
        delta,
        epsilon,
        analytic: dist,
        analytic_mean,
        identity_residual,
        empirical,
        hits: record.hit_indices,
    })
}

/// δ and ε straight to analytic and empirical distributions.
pub fn run_gaps(
    delta: f64,
    epsilon: f64,
    iterations: u64,
) -> Result<(GapSection, Vec<Check>), HarnessError> {
    let mut checks = Vec::new();
    let class = classify(
        delta,
        crate::rotation::DEFAULT_Q_MAX,
        crate::rotation::DEFAULT_TOL,
    );
    let delta = match class {
        RotationClass::Irrational => Delta::Irrational(delta),
        RotationClass::Rational { p, q } => Delta::Exact(p.rem_euclid(q as i64) as u64, q),
        RotationClass::Integer { .. } => Delta::Exact(0, 1),
    };
    let section = gap_section(delta, epsilon, iterations, &mut checks)?;
    Ok((section, checks))
}

fn reduced_rational(p: i64, q: i64) -> (i64, u64) {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(p.unsigned_abs(), q as u64).max(1);
    (p / g as i64, q as u64 / g)
}

/// Run phases → coherent dynamics → rotation map → gap statistics.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let mut checks = Vec::new();
    let mut warnings = Vec::new();

    let phases = phase_section(config, &mut checks)?;
    let data = PhaseData::new(phases.area_a, phases.area_b);

    // Coherent dynamics.
    let cstage = |e| HarnessError::stage(Stage::CoherentDynamics, e);
    let z = config.z();
    let z_mod2 = z.norm_sqr();
    let cc = CoherentConfig::new(z, config.omega, config.cycle_period_t, data).map_err(cstage)?;
    warnings.extend(cc.adiabaticity_warning());
    let omega_t = cc.omega_t();
    let phase_per_cycle = omega_t + data.area_b;
    let nearest_p = (phase_per_cycle / TAU).round() as i64;
    let revival = RevivalCondition {
        phase_per_cycle,
        nearest_p,
        residual: phase_per_cycle - TAU * nearest_p as f64,
        exact_revival: is_exact_revival(omega_t, data.area_b, 1),
        revival_periods: revival_times(config.omega, data.area_b, 5).unwrap_or_default(),
    };
    let bound = near_revival_bound(z_mod2, config.epsilon).map_err(cstage)?;
    let mut series = Vec::with_capacity(config.series_cycles as usize);
    let mut max_disc: f64 = 0.0;
    for k in 1..=config.series_cycles {
        let closed = correlation_closed(z_mod2, omega_t, data.area_b, k);
        let fock = correlation_fock(&cc, k).map_err(cstage)?;
        max_disc = max_disc.max((closed - fock).abs());
        series.push(CorrelationPoint {
            k,
            correlation_closed: closed,
            correlation_fock: fock,
            bound,
        });
    }
    checks.push(Check::at_most(
        "fock_vs_closed_correlation",
        max_disc,
        FOCK_TOL,
    ));
    let factorization_modulus = phase_factorization_check(&cc).map_err(cstage)?;
    checks.push(Check::at_most(
        "coherent_state_factorization",
        (factorization_modulus - 1.0).abs(),
        FACTORIZATION_TOL,
    ));
    if revival.exact_revival {
        let worst = series
            .iter()
            .map(|p| (p.correlation_closed - 1.0).abs())
            .fold(0.0, f64::max);
        checks.push(Check::at_most("exact_revival_every_cycle", worst, 1e-12));
    }

    // Rotation map.
    let rstage = |e| HarnessError::stage(Stage::RotationMap, e);
    let params = rotation_params(
        config.omega,
        config.cycle_period_t,
        data.area_b,
        z.arg(),
        config.epsilon,
    )
    .map_err(rstage)?;
    let (classification, declared) = match config.declared_rational {
        Some([p, q]) => {
            let (p, q) = reduced_rational(p, q);
            let gap = (params.rotation_number - p as f64 / q as f64).abs();
            if gap > config.classify.tol {
                warnings.push(format!(
                    "declared rotation number {p}/{q} differs from computed {} by {gap:e}",
                    params.rotation_number
                ));
            }
            let class = if q == 1 {
                RotationClass::Integer { value: p }
            } else {
                RotationClass::Rational { p, q }
            };
            (class, true)
        }
        None => (
            classify(
                params.rotation_number,
                config.classify.q_max,
                config.classify.tol,
            ),
            false,
        ),
    };

    // Gap statistics.
    let gaps = match classification {
        RotationClass::Integer { .. } => None,
        RotationClass::Rational { p, q } => Some(gap_section(
            Delta::Exact(p.rem_euclid(q as i64) as u64, q),
            config.epsilon,
            config.iterations,
            &mut checks,
        )?),
        RotationClass::Irrational => Some(gap_section(
            Delta::Irrational(params.delta),
            config.epsilon,
            config.iterations,
            &mut checks,
        )?),
    };

    let mut min_hit_correlation = None;
    let mut hit_correlations = Vec::new();
    let mut orbit = None;
    if let Some(g) = &gaps {
        let mut min_corr = f64::INFINITY;
        for &k in g.hit_indices() {
            let c = correlation_closed(z_mod2, omega_t, data.area_b, k);
            min_corr = min_corr.min(c);
            if hit_correlations.len() < MAX_REPORTED_HITS {
                hit_correlations.push(HitCorrelation { k, correlation: c });
            }
        }
        if min_corr.is_finite() {
            min_hit_correlation = Some(min_corr);
            checks.push(Check {
                name: "near_revival_bound_at_every_hit".to_string(),
                passed: min_corr > bound,
                value: min_corr,
                limit: bound,
            });
        }
        let n = config.orbit_samples.min(config.iterations);
        orbit = Some(
            (1..=n)
                .map(|k| OrbitPoint {
                    k,
                    theta: iterate(params.theta0, g.delta, k),
                    is_hit: frac_mul(k, g.delta) < config.epsilon,
                })
                .collect(),
        );
    }

    Ok(ExperimentReport {
        omega: config.omega,
        cycle_period_t: config.cycle_period_t,
        z: config.z,
        epsilon: config.epsilon,
        phases,
        coherent: CoherentSection {
            z_mod2,
            omega_t,
            truncation: cc.truncation,
            revival,
            factorization_modulus,
            max_fock_discrepancy: max_disc,
            near_revival_bound: bound,
            series,
        },
        rotation: RotationSection {
            params,
            classification,
            declared,
        },
        gaps,
        min_hit_correlation,
        hit_correlations,
        orbit,
        warnings,
        checks,
    })
}
