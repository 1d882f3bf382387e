//! Return-time statistics of the rotation by `δ` to the window `{kδ} < ε`.
//!
//! For irrational `δ` the times between successive hits take at most three
//! values `k₁`, `k₂`, `k₁ + k₂`, where `k₁` is the first `k` with
//! `{kδ} < ε` and `k₂` the first with `1 − {kδ} < ε`. Their invariant
//! weights are
//!
//! ```text
//!     F(k₁)      = (ε − {k₁δ}) / ε
//!     F(k₂)      = (ε − 1 + {k₂δ}) / ε
//!     F(k₁ + k₂) = ({k₁δ} + 1 − {k₂δ} − ε) / ε
//! ```
//!
//! and the mean gap is `1/ε` because `k₂{k₁δ} + k₁(1 − {k₂δ}) = 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::GapError;
use crate::frac::{frac_mul, Convergents};
use crate::rotation::{
    check_delta, check_epsilon, classify, window_hits_in, RotationClass, DEFAULT_Q_MAX, DEFAULT_TOL,
};

/// Hard ceiling on any first-return search.
pub const MAX_SEARCH_INDEX: u64 = 100_000_000;

/// Rounding slack tolerated on a weight before it counts as negative.
const WEIGHT_SLACK: f64 = 1e-12;

fn check_inputs(delta: f64, epsilon: f64) -> Result<(), GapError> {
    check_epsilon(epsilon)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(GapError::DeltaOutOfRange(delta));
    }
    Ok(())
}

/// Upper limit for the first-return scan: `10·⌈1/ε⌉ + q_cap`.
///
/// `q_cap` is the larger of the first convergent denominator landing in
/// `[0, ε)` and the first landing in `(1 − ε, 1)`. Either one is itself a
/// window hit on its side, so the bound can never cut a true first return.
pub fn search_bound(delta: f64, epsilon: f64) -> Result<u64, GapError> {
    check_inputs(delta, epsilon)?;
    let mut low = None;
    let mut high = None;
    for c in Convergents::new(delta) {
        if c.q > MAX_SEARCH_INDEX {
            break;
        }
        let f = frac_mul(c.q, delta);
        if low.is_none() && f < epsilon {
            low = Some(c.q);
        }
        if high.is_none() && 1.0 - f < epsilon {
            high = Some(c.q);
        }
        if let (Some(a), Some(b)) = (low, high) {
            let bound = 10 * (1.0 / epsilon).ceil() as u64 + a.max(b);
            return Ok(bound.min(MAX_SEARCH_INDEX));
        }
    }
    Err(GapError::SearchBoundExceeded {
        bound: MAX_SEARCH_INDEX,
    })
}

/// First returns `(k₁, k₂)` by direct scan of `k = 1, 2, …` up to
/// [`search_bound`]. Boundary equality `{kδ} = ε` is a miss.
pub fn first_return_indices(delta: f64, epsilon: f64) -> Result<(u64, u64), GapError> {
    let bound = search_bound(delta, epsilon)?;
    let mut k1 = None;
    let mut k2 = None;
    for k in 1..=bound {
        let f = frac_mul(k, delta);
        if k1.is_none() && f < epsilon {
            k1 = Some(k);
        }
        if k2.is_none() && 1.0 - f < epsilon {
            k2 = Some(k);
        }
        if let (Some(a), Some(b)) = (k1, k2) {
            return Ok((a, b));
        }
    }
    Err(GapError::SearchBoundExceeded { bound })
}

/// First returns via the subtractive continued-fraction walk.
///
/// Keeps the closest approach from below, `(k_a, {k_aδ})`, and from above,
/// `(k_b, 1 − {k_bδ})`. The next record on either side is always at
/// `k_a + k_b`, so the walk visits every one-sided record in order. Runs of
/// same-side steps are jumped in bulk, stopping two short so the final
/// steps are taken one at a time against exact fractional parts.
pub fn first_return_indices_cf(delta: f64, epsilon: f64) -> Result<(u64, u64), GapError> {
    check_inputs(delta, epsilon)?;
    let (mut ka, mut xa) = (1u64, frac_mul(1, delta));
    let (mut kb, mut yb) = (1u64, 1.0 - xa);
    let mut k1 = None;
    let mut k2 = None;
    loop {
        if k1.is_none() && xa < epsilon {
            k1 = Some(ka);
        }
        if k2.is_none() && yb < epsilon {
            k2 = Some(kb);
        }
        if let (Some(a), Some(b)) = (k1, k2) {
            return Ok((a, b));
        }
        if xa < yb {
            let target = if k2.is_none() { epsilon } else { xa };
            let t = bulk_steps(yb, xa, target);
            kb = advance(kb, ka, t)?;
            yb = 1.0 - frac_mul(kb, delta);
        } else {
            let target = if k1.is_none() { epsilon } else { yb };
            let t = bulk_steps(xa, yb, target);
            ka = advance(ka, kb, t)?;
            xa = frac_mul(ka, delta);
        }
    }
}

/// Number of steps `y ← y − x` to take at once: two fewer than needed to
/// bring `y` below `target` or below `x`, and at least one.
fn bulk_steps(y: f64, x: f64, target: f64) -> u64 {
    let stop = target.max(x);
    let needed = ((y - stop) / x).floor();
    if needed.is_finite() && needed > 2.0 {
        (needed as u64 - 2).min(MAX_SEARCH_INDEX)
    } else {
        1
    }
}

fn advance(k: u64, step: u64, times: u64) -> Result<u64, GapError> {
    let next = step
        .checked_mul(times)
        .and_then(|s| s.checked_add(k))
        .filter(|&v| v <= MAX_SEARCH_INDEX);
    next.ok_or(GapError::SearchBoundExceeded {
        bound: MAX_SEARCH_INDEX,
    })
}

/// One atom of the return-time distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapWeight {
    /// Return time in units of the cycle period.
    pub gap: u64,
    pub probability: f64,
}

/// Invariant distribution of return times to the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapDistribution {
    pub k1: u64,
    pub k2: u64,
    /// `{k₁δ}`.
    pub frac_k1: f64,
    /// `{k₂δ}`.
    pub frac_k2: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// Atoms at `k₁`, `k₂`, `k₁ + k₂`, in that order.
    pub weights: [GapWeight; 3],
}

impl GapDistribution {
    pub fn gaps(&self) -> [u64; 3] {
        self.weights.map(|w| w.gap)
    }

    /// Atoms sorted by gap value.
    pub fn sorted(&self) -> Vec<GapWeight> {
        let mut w = self.weights.to_vec();
        w.sort_by_key(|w| w.gap);
        w
    }

    pub fn probability_of(&self, gap: u64) -> f64 {
        self.weights
            .iter()
            .filter(|w| w.gap == gap)
            .map(|w| w.probability)
            .sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.weights.iter().map(|w| w.probability).sum()
    }

    /// Number of atoms with weight above rounding level.
    pub fn support_size(&self) -> usize {
        self.weights
            .iter()
            .filter(|w| w.probability > WEIGHT_SLACK)
            .count()
    }
}

/// Three-gap distribution for irrational `δ`. Rational `δ` (per
/// [`classify`] at the default policy) is refused.
pub fn gap_distribution(delta: f64, epsilon: f64) -> Result<GapDistribution, GapError> {
    check_inputs(delta, epsilon)?;
    match classify(delta, DEFAULT_Q_MAX, DEFAULT_TOL) {
        RotationClass::Irrational => {}
        RotationClass::Rational { p, q } => return Err(GapError::RationalDelta { delta, p, q }),
        RotationClass::Integer { value } => {
            return Err(GapError::RationalDelta {
                delta,
                p: value,
                q: 1,
            })
        }
    }
    let (k1, k2) = first_return_indices(delta, epsilon)?;
    let a = frac_mul(k1, delta);
    let b = frac_mul(k2, delta);
    let raw = [
        (k1, (epsilon - a) / epsilon),
        (k2, (epsilon - 1.0 + b) / epsilon),
        (k1 + k2, (a + 1.0 - b - epsilon) / epsilon),
    ];
    let mut weights = [GapWeight {
        gap: 0,
        probability: 0.0,
    }; 3];
    for (slot, (gap, p)) in weights.iter_mut().zip(raw) {
        if p < -WEIGHT_SLACK {
            return Err(GapError::NegativeWeight { gap, value: p });
        }
        *slot = GapWeight {
            gap,
            probability: p.max(0.0),
        };
    }
    Ok(GapDistribution {
        k1,
        k2,
        frac_k1: a,
        frac_k2: b,
        epsilon,
        delta,
        weights,
    })
}

/// Largest window `ε′ = {k₁δ} + 1 − {k₂δ}` keeping the first returns found
/// at `epsilon`; at `ε′` the `k₁ + k₂` gap has zero weight.
///
/// In exact arithmetic `ε′ = {(k₁ − k₂)δ}`, so `|k₁ − k₂|` sits exactly on
/// the window edge. Evaluating `ε′` through that fractional part makes the
/// scan see the same value on both sides of its comparison, so the edge
/// stays a miss instead of depending on how `a + 1 − b` happens to round.
pub fn two_gap_epsilon(delta: f64, epsilon: f64) -> Result<f64, GapError> {
    let (k1, k2) = first_return_indices(delta, epsilon)?;
    Ok(if k1 > k2 {
        frac_mul(k1 - k2, delta)
    } else {
        1.0 - frac_mul(k2 - k1, delta)
    })
}

/// `k₂{k₁δ} + k₁(1 − {k₂δ}) − 1`; vanishes for genuine first returns.
pub fn verify_identity(k1: u64, k2: u64, delta: f64) -> f64 {
    let a = frac_mul(k1, delta);
    let b = frac_mul(k2, delta);
    k2 as f64 * a + k1 as f64 * (1.0 - b) - 1.0
}

/// Mean return time `Σ k F(k)` in units of the cycle period.
pub fn mean_recurrence(dist: &GapDistribution) -> f64 {
    dist.weights
        .iter()
        .map(|w| w.gap as f64 * w.probability)
        .sum()
}

/// Window hits and inter-hit gaps observed along a simulated orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceRecord {
    pub delta: f64,
    pub epsilon: f64,
    pub iterations: u64,
    pub hit_indices: Vec<u64>,
    pub gap_counts: BTreeMap<u64, u64>,
    /// Iterations before the first hit.
    pub transient_discarded: u64,
}

impl RecurrenceRecord {
    fn from_hits(
        delta: f64,
        epsilon: f64,
        iterations: u64,
        hit_indices: Vec<u64>,
    ) -> Result<Self, GapError> {
        let first = *hit_indices.first().ok_or(GapError::NoHits { iterations })?;
        let mut gap_counts = BTreeMap::new();
        for w in hit_indices.windows(2) {
            *gap_counts.entry(w[1] - w[0]).or_insert(0) += 1;
        }
        Ok(Self {
            delta,
            epsilon,
            iterations,
            hit_indices,
            gap_counts,
            transient_discarded: first - 1,
        })
    }

    pub fn gap_total(&self) -> u64 {
        self.gap_counts.values().sum()
    }

    pub fn distinct_gaps(&self) -> Vec<u64> {
        self.gap_counts.keys().copied().collect()
    }

    /// Relative frequency of each observed gap.
    pub fn frequencies(&self) -> BTreeMap<u64, f64> {
        let n = self.gap_total() as f64;
        self.gap_counts
            .iter()
            .map(|(&g, &c)| (g, c as f64 / n))
            .collect()
    }

    pub fn frequency_of(&self, gap: u64) -> f64 {
        let n = self.gap_total();
        if n == 0 {
            return 0.0;
        }
        *self.gap_counts.get(&gap).unwrap_or(&0) as f64 / n as f64
    }

    /// Sample mean gap; `None` with fewer than two hits.
    pub fn mean_gap(&self) -> Option<f64> {
        let n = self.gap_total();
        (n > 0).then(|| {
            self.gap_counts
                .iter()
                .map(|(&g, &c)| g as f64 * c as f64)
                .sum::<f64>()
                / n as f64
        })
    }

    /// Standard error of the mean gap (sample standard deviation over √n).
    pub fn mean_std_error(&self) -> Option<f64> {
        let n = self.gap_total();
        if n < 2 {
            return None;
        }
        let mean = self.mean_gap()?;
        let ss: f64 = self
            .gap_counts
            .iter()
            .map(|(&g, &c)| c as f64 * (g as f64 - mean).powi(2))
            .sum();
        let var = ss / (n - 1) as f64;
        Some((var / n as f64).sqrt())
    }
}

/// Scan `k = 1..=iterations` and record hits `{kδ} < ε` and their gaps.
/// Rational `δ` is accepted; its hits are periodic.
pub fn empirical_gaps(
    delta: f64,
    epsilon: f64,
    iterations: u64,
) -> Result<RecurrenceRecord, GapError> {
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    let hits = window_hits_in(delta, epsilon, 1, iterations);
    RecurrenceRecord::from_hits(delta, epsilon, iterations, hits)
}

/// [`empirical_gaps`] for `δ = p/q` given exactly. Fractional parts are
/// taken as `(kp mod q)/q` in integers, so multiples of `q` land on 0
/// instead of a rounding error below 1.
pub fn empirical_gaps_rational(
    p: u64,
    q: u64,
    epsilon: f64,
    iterations: u64,
) -> Result<RecurrenceRecord, GapError> {
    check_epsilon(epsilon)?;
    if q == 0 {
        return Err(GapError::DeltaOutOfRange(f64::INFINITY));
    }
    let (p, q128) = ((p % q) as u128, q as u128);
    let hits = (1..=iterations)
        .filter(|&k| ((k as u128 * p) % q128) as f64 / (q as f64) < epsilon)
        .collect();
    RecurrenceRecord::from_hits(p as f64 / q as f64, epsilon, iterations, hits)
}

/// [`empirical_gaps`] with the index range split across `workers` threads.
/// Chunks are merged in index order, so the record is identical to the
/// sequential one.
pub fn empirical_gaps_parallel(
    delta: f64,
    epsilon: f64,
    iterations: u64,
    workers: usize,
) -> Result<RecurrenceRecord, GapError> {
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    let workers = workers.max(1) as u64;
    let chunk = iterations.div_ceil(workers).max(1);
    let ranges: Vec<(u64, u64)> = (0..workers)
        .map(|w| (w * chunk + 1, ((w + 1) * chunk).min(iterations)))
        .filter(|(s, e)| s <= e)
        .collect();
    let parts: Vec<Vec<u64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(s, e)| scope.spawn(move || window_hits_in(delta, epsilon, s, e)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("orbit scan worker panicked"))
            .collect()
    });
    let hits = parts.concat();
    RecurrenceRecord::from_hits(delta, epsilon, iterations, hits)
}
