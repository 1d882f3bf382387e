//! Coherent states of the deformed oscillator, held as Fock coefficients
//! over the (abstract, orthonormal) tilde basis, and their autocorrelation
//! after whole parameter cycles.
//!
//! Over one cycle level `n` picks up `exp[i(γₙ − (n + ½)ωT)]`. Two routes
//! to the return probability are provided: the closed form
//! `exp[2|z|²(cos k(ωT + ℬ) − 1)]` and a direct sum over the truncated
//! Fock expansion, which serves as its numerical oracle.

use num_complex::Complex64;

use crate::error::CoherentError;
use crate::phase_geometry::{berry_phase, PhaseData};

/// Upper bound on the discarded Poisson tail.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// `|cos(k(ωT + ℬ)) − 1|` at or below this counts as an exact revival.
pub const EXACT_REVIVAL_TOLERANCE: f64 = 1e-12;

/// Below this value of `ωT` the adiabatic picture is doubtful.
pub const ADIABATIC_WARNING_THRESHOLD: f64 = 10.0;

/// Fock cutoff `ceil(|z|² + 10 √(|z|² + 1) + 20)`.
pub fn truncation_for(z_mod2: f64) -> usize {
    (z_mod2 + 10.0 * (z_mod2 + 1.0).sqrt() + 20.0).ceil() as usize
}

/// Bound on `Σ_{n>N} |cₙ|²` from the geometric majorant of the Poisson tail.
pub fn poisson_tail_bound(z_mod2: f64, n: usize) -> f64 {
    if z_mod2 == 0.0 {
        return 0.0;
    }
    let m = (n + 1) as f64;
    // ln p_{N+1} = −|z|² + (N+1) ln|z|² − ln((N+1)!)
    let ln_fact: f64 = (1..=n + 1).map(|j| (j as f64).ln()).sum();
    let ln_p = -z_mod2 + m * z_mod2.ln() - ln_fact;
    let ratio = z_mod2 / (m + 1.0);
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    ln_p.exp() / (1.0 - ratio)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentConfig {
    pub z: Complex64,
    pub omega: f64,
    pub cycle_period: f64,
    pub phases: PhaseData,
    pub truncation: usize,
}

impl CoherentConfig {
    /// Config with the default truncation rule.
    pub fn new(
        z: Complex64,
        omega: f64,
        cycle_period: f64,
        phases: PhaseData,
    ) -> Result<Self, CoherentError> {
        Self::with_truncation(z, omega, cycle_period, phases, truncation_for(z.norm_sqr()))
    }

    pub fn with_truncation(
        z: Complex64,
        omega: f64,
        cycle_period: f64,
        phases: PhaseData,
        truncation: usize,
    ) -> Result<Self, CoherentError> {
        positive("omega", omega)?;
        positive("cycle_period_T", cycle_period)?;
        Ok(Self {
            z,
            omega,
            cycle_period,
            phases,
            truncation,
        })
    }

    pub fn omega_t(&self) -> f64 {
        self.omega * self.cycle_period
    }

    /// Warning text when `ωT` is too small for the adiabatic picture. Never
    /// an error: the formulas themselves are exact.
    pub fn adiabaticity_warning(&self) -> Option<String> {
        let wt = self.omega_t();
        (wt < ADIABATIC_WARNING_THRESHOLD).then(|| {
            format!("omega*T = {wt} is below {ADIABATIC_WARNING_THRESHOLD}; the cycle may not be adiabatic")
        })
    }

    fn check_tail(&self) -> Result<(), CoherentError> {
        let z_mod2 = self.z.norm_sqr();
        let tail = poisson_tail_bound(z_mod2, self.truncation);
        if tail < TAIL_TOLERANCE {
            Ok(())
        } else {
            Err(CoherentError::TruncationTooSmall {
                n: self.truncation,
                z_mod2,
                tail,
            })
        }
    }

    /// Phase `γₙ − (n + ½)ωT` accumulated by level `n` over one cycle.
    fn cycle_phase(&self, n: u64) -> f64 {
        berry_phase(n, &self.phases) - (n as f64 + 0.5) * self.omega_t()
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), CoherentError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(CoherentError::NonPositive { name, value })
    }
}

/// `cₙ = e^{−|z|²/2} zⁿ / √(n!)` for `n = 0..=N`, by the recursion
/// `cₙ₊₁ = cₙ z / √(n+1)`.
pub fn fock_coefficients(z: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    out.push(c);
    for n in 0..n_max {
        c = c * z / ((n + 1) as f64).sqrt();
        out.push(c);
    }
    out
}

/// Coefficients of `|z(kT)⟩` after `k` full cycles.
pub fn evolved_coefficients(
    config: &CoherentConfig,
    cycles: u64,
) -> Result<Vec<Complex64>, CoherentError> {
    config.check_tail()?;
    let k = cycles as f64;
    Ok(fock_coefficients(config.z, config.truncation)
        .into_iter()
        .enumerate()
        .map(|(n, c)| c * Complex64::from_polar(1.0, k * config.cycle_phase(n as u64)))
        .collect())
}

/// Return probability of the undeformed oscillator, `exp[2|ζ|²(cos ωt − 1)]`.
pub fn static_correlation(zeta_mod2: f64, omega_t: f64) -> f64 {
    (2.0 * zeta_mod2 * (omega_t.cos() - 1.0)).exp()
}

/// Return probability after `k` cycles, `exp[2|z|²(cos k(ωT + ℬ) − 1)]`.
pub fn correlation_closed(z_mod2: f64, omega_t: f64, area_b: f64, cycles: u64) -> f64 {
    let phi = cycles as f64 * (omega_t + area_b);
    (2.0 * z_mod2 * (phi.cos() - 1.0)).exp()
}

/// Return probability after `k` cycles summed over the truncated Fock
/// expansion: `|Σ |cₙ|² e^{ik(γₙ − (n+½)ωT)}|²`.
pub fn correlation_fock(config: &CoherentConfig, cycles: u64) -> Result<f64, CoherentError> {
    config.check_tail()?;
    let k = cycles as f64;
    let amp: Complex64 = fock_coefficients(config.z, config.truncation)
        .iter()
        .enumerate()
        .map(|(n, c)| c.norm_sqr() * Complex64::from_polar(1.0, k * config.cycle_phase(n as u64)))
        .sum();
    Ok(amp.norm_sqr())
}

/// `|⟨w | z(T)⟩|` with `w = z e^{−i(ωT + ℬ)}`. One cycle maps a coherent
/// state to another coherent state up to a global phase, so this is 1 up to
/// truncation error.
pub fn phase_factorization_check(config: &CoherentConfig) -> Result<f64, CoherentError> {
    let evolved = evolved_coefficients(config, 1)?;
    let w = config.z * Complex64::from_polar(1.0, -(config.omega_t() + config.phases.area_b));
    let target = fock_coefficients(w, config.truncation);
    let overlap: Complex64 = target.iter().zip(&evolved).map(|(a, b)| a.conj() * b).sum();
    Ok(overlap.norm())
}

/// Cycle periods `T_p = (2πp − ℬ)/ω`, `p = 1..=p_max`, that produce exact
/// revivals; non-positive candidates are dropped.
pub fn revival_times(omega: f64, area_b: f64, p_max: u32) -> Result<Vec<f64>, CoherentError> {
    positive("omega", omega)?;
    let times: Vec<f64> = (1..=p_max)
        .map(|p| (2.0 * std::f64::consts::PI * p as f64 - area_b) / omega)
        .filter(|&t| t > 0.0)
        .collect();
    if times.is_empty() {
        Err(CoherentError::NoPositiveRevival { p_max })
    } else {
        Ok(times)
    }
}

/// Lower bound `1 − 4|z|²π²ε²` on the return probability at a near revival.
pub fn near_revival_bound(z_mod2: f64, epsilon: f64) -> Result<f64, CoherentError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(CoherentError::EpsilonOutOfRange(epsilon));
    }
    Ok(1.0 - 4.0 * z_mod2 * std::f64::consts::PI.powi(2) * epsilon * epsilon)
}

/// Whether `k(ωT + ℬ) ≡ 0 (mod 2π)` within [`EXACT_REVIVAL_TOLERANCE`].
pub fn is_exact_revival(omega_t: f64, area_b: f64, cycles: u64) -> bool {
    let phi = cycles as f64 * (omega_t + area_b);
    (phi.cos() - 1.0).abs() <= EXACT_REVIVAL_TOLERANCE
}
