//! Fractional parts at large multipliers and continued-fraction convergents.
//!
//! Orbit statistics need `{k x}` for `k` up to ~10⁹. Forming `k * x` in plain
//! `f64` loses up to `k` ulps of the product, which is enough to move a point
//! across a window edge. The product is therefore split with an error-free
//! FMA transformation and reduced mod 1 before the low word is added back.

/// Largest multiplier for which `k as f64` is exact.
pub const MAX_EXACT_MULTIPLIER: u64 = 1 << 53;

/// Largest value strictly below one.
const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

/// `x - floor(x)`, always in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    normalize(x - x.floor())
}

/// Fractional part of `k * x`, in `[0, 1)`, with the product carried in
/// double-double precision.
#[inline]
pub fn frac_mul(k: u64, x: f64) -> f64 {
    debug_assert!(k <= MAX_EXACT_MULTIPLIER);
    let kf = k as f64;
    let hi = kf * x;
    let lo = kf.mul_add(x, -hi);
    normalize((hi - hi.floor()) + lo)
}

/// Signed residual `k * x - p`, computed exactly up to one final rounding.
#[inline]
pub fn residual(k: u64, p: i64, x: f64) -> f64 {
    let kf = k as f64;
    let hi = kf * x;
    let lo = kf.mul_add(x, -hi);
    (hi - p as f64) + lo
}

/// Distance from `k * x` to the nearest integer.
#[inline]
pub fn dist_to_int_mul(k: u64, x: f64) -> f64 {
    let f = frac_mul(k, x);
    f.min(1.0 - f)
}

#[inline]
fn normalize(s: f64) -> f64 {
    if s < 0.0 {
        let t = s + 1.0;
        if t >= 1.0 {
            ONE_MINUS_ULP
        } else {
            t
        }
    } else if s >= 1.0 {
        s - 1.0
    } else {
        s
    }
}

/// A continued-fraction convergent `p / q` together with its signed
/// residual `q x - p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergent {
    pub p: i64,
    pub q: u64,
    pub residual: f64,
}

/// Iterator over the convergents of a finite real number, starting with
/// `floor(x) / 1`.
///
/// Partial quotients are recovered from the residuals of the two previous
/// convergents (`a = floor(-r₋₁ / r₀)`), each residual recomputed from its
/// integer pair. This avoids the error blow-up of the textbook
/// `x ← 1 / (x - a)` recursion and tracks the true convergents until the
/// residual reaches the rounding floor of `x` itself. Iteration stops at an
/// exact hit, or once denominators would overflow the exact-multiplier range.
#[derive(Debug, Clone)]
pub struct Convergents {
    x: f64,
    prev: (i64, u64, f64),
    cur: Option<(i64, u64, f64)>,
    started: bool,
    done: bool,
}

impl Convergents {
    pub fn new(x: f64) -> Self {
        let p0 = x.floor() as i64;
        let r0 = residual(1, p0, x);
        Self {
            x,
            prev: (1, 0, -1.0),
            cur: Some((p0, 1, r0)),
            started: false,
            done: !x.is_finite(),
        }
    }
}

impl Iterator for Convergents {
    type Item = Convergent;

    fn next(&mut self) -> Option<Convergent> {
        if self.done {
            return None;
        }
        let (p, q, r) = self.cur?;
        if !self.started {
            self.started = true;
            if r == 0.0 {
                self.done = true;
            }
            return Some(Convergent { p, q, residual: r });
        }
        let (pp, pq, pr) = self.prev;
        let ratio = (-pr / r).floor();
        if !ratio.is_finite() || ratio > MAX_EXACT_MULTIPLIER as f64 {
            self.done = true;
            return None;
        }
        let a = (ratio as u64).max(1);
        let nq = match a.checked_mul(q).and_then(|v| v.checked_add(pq)) {
            Some(v) if v <= MAX_EXACT_MULTIPLIER => v,
            _ => {
                self.done = true;
                return None;
            }
        };
        let np = a as i64 * p + pp;
        let nr = residual(nq, np, self.x);
        self.prev = (p, q, r);
        self.cur = Some((np, nq, nr));
        if nr == 0.0 {
            self.done = true;
        }
        Some(Convergent {
            p: np,
            q: nq,
            residual: nr,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_mul_matches_naive_at_small_k() {
        let x = std::f64::consts::FRAC_1_PI;
        for k in 1..1000u64 {
            let naive = (k as f64 * x).fract();
            assert!((frac_mul(k, x) - naive).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn frac_mul_exact_for_dyadic_inputs() {
        assert_eq!(frac_mul(3, 0.25), 0.75);
        assert_eq!(frac_mul(4, 0.25), 0.0);
        assert_eq!(frac_mul(1_000_000_007, 0.5), 0.5);
    }

    #[test]
    fn frac_handles_negative_values() {
        assert!((frac(-0.25) - 0.75).abs() < 1e-15);
        assert_eq!(frac(-3.0), 0.0);
        // 1 - 1e-300 is not representable; the result must still be in [0, 1).
        let f = frac(-1e-300);
        assert!((0.0..1.0).contains(&f));
        assert!((0.0..1.0).contains(&frac_mul(3, -1e-17)));
    }

    #[test]
    fn frac_mul_large_k_agrees_with_split_multiplier() {
        // k = a * b with a, b < 2^26: {k x} = {a {b x}} up to the rounding of {b x}.
        let x = std::f64::consts::SQRT_2 - 1.0;
        let k = 987_654_321u64;
        let f = frac_mul(k, x);
        assert!((0.0..1.0).contains(&f));
        let g = frac_mul(k + 1, x);
        let step = (g - f).rem_euclid(1.0);
        assert!((step - x).abs() < 1e-7);
    }

    #[test]
    fn convergents_of_pi() {
        let qs: Vec<u64> = Convergents::new(std::f64::consts::PI)
            .take(5)
            .map(|c| c.q)
            .collect();
        assert_eq!(qs, vec![1, 7, 106, 113, 33102]);
        let c = Convergents::new(std::f64::consts::PI).nth(3).unwrap();
        assert_eq!((c.p, c.q), (355, 113));
    }

    #[test]
    fn convergents_of_golden_mean_are_fibonacci() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let qs: Vec<u64> = Convergents::new(g).take(30).map(|c| c.q).collect();
        let mut fib = vec![1u64, 1];
        while fib.len() < 31 {
            let n = fib.len();
            fib.push(fib[n - 1] + fib[n - 2]);
        }
        // [0; 1, 1, 1, ...]: denominators 1, 1, 2, 3, 5, ...
        assert_eq!(qs, fib[..30].to_vec());
    }

    #[test]
    fn convergents_terminate_on_rationals() {
        let cs: Vec<Convergent> = Convergents::new(0.75).collect();
        let last = cs.last().unwrap();
        assert_eq!((last.p, last.q), (3, 4));
        assert_eq!(last.residual, 0.0);
    }
}
