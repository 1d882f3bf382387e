//! The circle rotation `θ_{k+1} = θ_k − 2πΔ (mod 2π)` with `2πΔ = ωT + ℬ`,
//! which carries the phase of the coherent-state label from cycle to cycle.
//!
//! Orbits are always evaluated in closed form, `θ_k = θ₀ − 2π{kδ}`, with
//! `{kδ}` reduced in double-double precision; nothing here iterates by
//! repeated subtraction.
//!
//! Window convention: a near revival at cycle `k` means `{kδ} < ε`, i.e.
//! `θ_k` sits within `2πε` of `θ₀` on the side the map rotates towards.
//! Hits with `1 − {kδ} < ε` approach from the other side and are reported
//! separately where needed.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::RotationError;
use crate::frac::{dist_to_int_mul, frac, frac_mul, Convergents};

/// Denominator cap used when no explicit policy is given.
pub const DEFAULT_Q_MAX: u64 = 1_000_000;
/// Tolerance on `‖qΔ‖` used when no explicit policy is given.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationParams {
    /// Rotation number `Δ = (ωT + ℬ) / 2π`.
    #[serde(rename = "Delta")]
    pub rotation_number: f64,
    /// `floor(Δ)`.
    pub int_part: i64,
    /// `Δ − floor(Δ)`, in `[0, 1)`.
    pub delta: f64,
    /// Initial phase, in `[0, 2π)`.
    pub theta0: f64,
    pub epsilon: f64,
}

pub fn check_epsilon(epsilon: f64) -> Result<(), RotationError> {
    if epsilon > 0.0 && epsilon < 0.5 {
        Ok(())
    } else {
        Err(RotationError::EpsilonOutOfRange(epsilon))
    }
}

fn finite(name: &'static str, value: f64) -> Result<(), RotationError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(RotationError::NonFinite { name, value })
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), RotationError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(RotationError::NonPositive { name, value })
    }
}

/// Wrap an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Split `Δ` into floor and fractional part.
pub fn split_rotation_number(rotation_number: f64) -> (i64, f64) {
    let int_part = rotation_number.floor();
    (int_part as i64, frac(rotation_number))
}

pub fn rotation_params(
    omega: f64,
    cycle_period: f64,
    area_b: f64,
    theta0: f64,
    epsilon: f64,
) -> Result<RotationParams, RotationError> {
    positive("omega", omega)?;
    positive("cycle_period_T", cycle_period)?;
    finite("B", area_b)?;
    finite("theta0", theta0)?;
    check_epsilon(epsilon)?;
    let rotation_number = (omega * cycle_period + area_b) / TAU;
    let (int_part, delta) = split_rotation_number(rotation_number);
    Ok(RotationParams {
        rotation_number,
        int_part,
        delta,
        theta0: wrap_angle(theta0),
        epsilon,
    })
}

/// `θ_k = (θ₀ − 2πkΔ) mod 2π`, in `[0, 2π)`.
pub fn iterate(theta0: f64, rotation_number: f64, k: u64) -> f64 {
    let delta = frac(rotation_number);
    wrap_angle(theta0 - TAU * frac_mul(k, delta))
}

/// Streaming orbit `(k, θ_k)` for `k = 1, 2, …`, each point in closed form.
#[derive(Debug, Clone)]
pub struct Orbit {
    theta0: f64,
    delta: f64,
    k: u64,
}

impl Orbit {
    pub fn new(theta0: f64, rotation_number: f64) -> Self {
        Self {
            theta0,
            delta: frac(rotation_number),
            k: 0,
        }
    }

    /// Orbit starting at index `start` (the first yielded index).
    pub fn starting_at(theta0: f64, rotation_number: f64, start: u64) -> Self {
        Self {
            k: start.saturating_sub(1),
            ..Self::new(theta0, rotation_number)
        }
    }
}

impl Iterator for Orbit {
    type Item = (u64, f64);

    fn next(&mut self) -> Option<(u64, f64)> {
        self.k = self.k.checked_add(1)?;
        Some((
            self.k,
            wrap_angle(self.theta0 - TAU * frac_mul(self.k, self.delta)),
        ))
    }
}

/// Angle from `theta` forward (counter-clockwise) to `theta0`, in
/// `[0, 2π)`. The map rotates clockwise by `2πδ`, so a window hit
/// `{kδ} < ε` has offset below `2πε`.
pub fn clockwise_offset(theta0: f64, theta: f64) -> f64 {
    wrap_angle(theta0 - theta)
}

/// All `k ∈ 1..=k_max` with `{kδ} < ε`.
pub fn window_hits(delta: f64, epsilon: f64, k_max: u64) -> Result<Vec<u64>, RotationError> {
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    Ok(window_hits_in(delta, epsilon, 1, k_max))
}

pub(crate) fn check_delta(delta: f64) -> Result<(), RotationError> {
    if (0.0..1.0).contains(&delta) {
        Ok(())
    } else {
        Err(RotationError::DeltaOutOfRange(delta))
    }
}

/// Hits with `start ≤ k ≤ end`; inputs assumed valid.
pub(crate) fn window_hits_in(delta: f64, epsilon: f64, start: u64, end: u64) -> Vec<u64> {
    (start..=end)
        .filter(|&k| frac_mul(k, delta) < epsilon)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RotationClass {
    Integer { value: i64 },
    Rational { p: i64, q: u64 },
    Irrational,
}

impl RotationClass {
    /// Orbit period in cycles, `None` for irrational rotation.
    pub fn period(&self) -> Option<u64> {
        match *self {
            RotationClass::Integer { .. } => Some(1),
            RotationClass::Rational { q, .. } => Some(q),
            RotationClass::Irrational => None,
        }
    }

    pub fn is_irrational(&self) -> bool {
        matches!(self, RotationClass::Irrational)
    }
}

/// Classify `Δ` as integer, rational `p/q` (`q ≤ q_max`, lowest terms) or
/// irrational.
///
/// `Δ` counts as rational with denominator `q` when `‖qΔ‖ ≤ tol`, the
/// distance from `qΔ` to the nearest integer. The smallest such `q` is
/// always a convergent denominator, since convergents are the record
/// minima of `‖qΔ‖`, so only convergents are tested.
pub fn classify(rotation_number: f64, q_max: u64, tol: f64) -> RotationClass {
    let nearest = rotation_number.round();
    if (rotation_number - nearest).abs() <= tol {
        return RotationClass::Integer {
            value: nearest as i64,
        };
    }
    let (int_part, delta) = split_rotation_number(rotation_number);
    for c in Convergents::new(delta) {
        if c.q > q_max {
            break;
        }
        if c.q > 1 && dist_to_int_mul(c.q, delta) <= tol {
            let p_frac = (c.q as f64 * delta).round() as i64;
            return RotationClass::Rational {
                p: int_part * c.q as i64 + p_frac,
                q: c.q,
            };
        }
    }
    RotationClass::Irrational
}

/// Circle distance between two angles, in `[0, π]`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(TAU - d).min(PI)
}
