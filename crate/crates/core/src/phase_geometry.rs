//! Loop areas in the displacement (α) and squeezing (β) parameter planes,
//! and the geometric phases they produce.
//!
//! Loops are closed polygonal chains. Both area functionals are signed:
//! counter-clockwise traversal is positive, reversing a loop negates them.
//!
//! # Hyperbolic area as a line integral
//!
//! The invariant area enclosed by a β-loop is the surface integral
//! `∫ d²β sinh(2|β|) / |β|`. In polar coordinates `(r, θ)` the area element
//! is `r dr dθ`, so the integrand becomes `sinh(2r) dr ∧ dθ`, which is the
//! exterior derivative of
//!
//! ```text
//!     ω = ½ (cosh 2r − 1) dθ = sinh²(r) dθ.
//! ```
//!
//! By Stokes the area equals `∮ sinh²(r) dθ` around the loop. The subtracted
//! constant makes the potential vanish like `r²` at the origin, where
//! `r² dθ = x dy − y dx` is smooth, so loops through or around the origin
//! need no special treatment. A circle of radius `R` about the origin gives
//! `π (cosh 2R − 1)`; small loops approach twice their Euclidean area.
//!
//! Each segment contributes `½ (sinh² r₀ + sinh² r₁) Δθ` with `Δθ` the
//! principal-branch angle between its endpoints. A segment ending at the
//! origin is radial and contributes nothing.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Traversal direction of a sampled primitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Ccw,
    Cw,
}

impl Orientation {
    /// Orientation implied by the sign of a signed area.
    pub fn of_area(area: f64) -> Self {
        if area < 0.0 {
            Orientation::Cw
        } else {
            Orientation::Ccw
        }
    }

    fn sign(self) -> f64 {
        match self {
            Orientation::Ccw => 1.0,
            Orientation::Cw => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum Primitive {
    Circle {
        center: [f64; 2],
        radius: f64,
        n_samples: usize,
    },
    Ellipse {
        center: [f64; 2],
        /// Semi-axes `[a, b]` along the rotated x and y directions.
        semiaxes: [f64; 2],
        /// Rotation of the major axis, radians.
        #[serde(default)]
        rotation: f64,
        n_samples: usize,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
}

/// On-disk loop description: a named primitive or an explicit point list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LoopDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitive: Option<Primitive>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
}

impl LoopDescriptor {
    pub fn circle(
        center: [f64; 2],
        radius: f64,
        n_samples: usize,
        orientation: Orientation,
    ) -> Self {
        Self {
            primitive: Some(Primitive::Circle {
                center,
                radius,
                n_samples,
            }),
            points: None,
            orientation: Some(orientation),
        }
    }

    pub fn points(points: Vec<[f64; 2]>) -> Self {
        Self {
            points: Some(points),
            ..Self::default()
        }
    }
}

/// A closed, ordered chain of points in a complex parameter plane. The edge
/// from the last point back to the first is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricLoop {
    points: Vec<Complex64>,
}

impl ParametricLoop {
    pub fn new(points: Vec<Complex64>) -> Result<Self, GeometryError> {
        let n = points.len();
        if n < 3 {
            return Err(GeometryError::TooFewPoints(n));
        }
        if let Some(i) = points
            .iter()
            .position(|p| !(p.re.is_finite() && p.im.is_finite()))
        {
            return Err(GeometryError::NonFinite(i));
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if points[i] == points[j] {
                return Err(GeometryError::RepeatedPoint(i, j));
            }
        }
        Ok(Self { points })
    }

    pub fn from_xy(points: &[[f64; 2]]) -> Result<Self, GeometryError> {
        Self::new(points.iter().map(|&[x, y]| Complex64::new(x, y)).collect())
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same loop traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    /// Loop scaled about the origin.
    pub fn scaled(&self, s: f64) -> Result<Self, GeometryError> {
        Self::new(self.points.iter().map(|p| p * s).collect())
    }

    /// Closed edges `(start, end)` including the wrap-around edge.
    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }
}

/// Build a validated loop from a descriptor. Sampled primitives use uniform
/// parameter steps starting at parameter zero.
pub fn loop_from_spec(spec: &LoopDescriptor) -> Result<ParametricLoop, GeometryError> {
    match (&spec.primitive, &spec.points) {
        (Some(prim), None) => sample_primitive(prim, spec.orientation),
        (None, Some(points)) => {
            if spec.orientation.is_some() {
                return Err(GeometryError::OrientationNotApplicable);
            }
            ParametricLoop::from_xy(points)
        }
        _ => Err(GeometryError::AmbiguousDescriptor),
    }
}

fn sample_primitive(
    prim: &Primitive,
    orientation: Option<Orientation>,
) -> Result<ParametricLoop, GeometryError> {
    match *prim {
        Primitive::Circle {
            center,
            radius,
            n_samples,
        } => {
            if !radius.is_finite() || radius <= 0.0 {
                return Err(GeometryError::Degenerate(format!("circle radius {radius}")));
            }
            sample_ellipse(
                center,
                [radius, radius],
                0.0,
                n_samples,
                orientation.unwrap_or_default(),
            )
        }
        Primitive::Ellipse {
            center,
            semiaxes,
            rotation,
            n_samples,
        } => {
            if semiaxes.iter().any(|a| !a.is_finite() || *a <= 0.0) {
                return Err(GeometryError::Degenerate(format!(
                    "ellipse semiaxes [{}, {}]",
                    semiaxes[0], semiaxes[1]
                )));
            }
            if !rotation.is_finite() {
                return Err(GeometryError::Degenerate(format!(
                    "ellipse rotation {rotation}"
                )));
            }
            sample_ellipse(
                center,
                semiaxes,
                rotation,
                n_samples,
                orientation.unwrap_or_default(),
            )
        }
        Primitive::Polygon { ref vertices } => {
            if orientation.is_some() {
                return Err(GeometryError::OrientationNotApplicable);
            }
            ParametricLoop::from_xy(vertices)
        }
    }
}

fn sample_ellipse(
    center: [f64; 2],
    [a, b]: [f64; 2],
    rotation: f64,
    n: usize,
    orientation: Orientation,
) -> Result<ParametricLoop, GeometryError> {
    if n < 3 {
        return Err(GeometryError::TooFewPoints(n));
    }
    let c = Complex64::new(center[0], center[1]);
    let rot = Complex64::from_polar(1.0, rotation);
    let sign = orientation.sign();
    let points = (0..n)
        .map(|j| {
            let t = sign * 2.0 * PI * j as f64 / n as f64;
            c + rot * Complex64::new(a * t.cos(), b * t.sin())
        })
        .collect();
    ParametricLoop::new(points)
}

/// Signed Euclidean area by the shoelace formula.
pub fn euclidean_area(lp: &ParametricLoop) -> f64 {
    0.5 * lp
        .segments()
        .map(|(p, q)| p.re * q.im - q.re * p.im)
        .sum::<f64>()
}

/// Signed invariant area `∫ d²β sinh(2|β|)/|β|` of the region enclosed by a
/// β-plane loop, evaluated as the trapezoid-rule line integral of
/// `sinh²(r) dθ` (see module docs).
pub fn hyperbolic_area(lp: &ParametricLoop) -> Result<f64, GeometryError> {
    let mut total = 0.0;
    for (i, (p, q)) in lp.segments().enumerate() {
        let p_origin = p.re == 0.0 && p.im == 0.0;
        let q_origin = q.re == 0.0 && q.im == 0.0;
        match (p_origin, q_origin) {
            (true, true) => return Err(GeometryError::SegmentAtOrigin(i)),
            (true, false) | (false, true) => continue,
            (false, false) => {}
        }
        let dtheta = angle_increment(p, q);
        if dtheta >= PI {
            return Err(GeometryError::SegmentThroughOrigin(i));
        }
        let fp = p.norm().sinh().powi(2);
        let fq = q.norm().sinh().powi(2);
        total += 0.5 * (fp + fq) * dtheta;
    }
    Ok(total)
}

/// Principal-branch angle from `p` to `q` seen from the origin, in `(−π, π]`.
fn angle_increment(p: Complex64, q: Complex64) -> f64 {
    let cross = p.re * q.im - p.im * q.re;
    let dot = p.re * q.re + p.im * q.im;
    let a = cross.atan2(dot);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// Loop areas `(𝒜, ℬ)` entering the geometric phase. `area_b` is the
/// Hannay angle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseData {
    pub area_a: f64,
    pub area_b: f64,
}

impl PhaseData {
    pub fn new(area_a: f64, area_b: f64) -> Self {
        Self { area_a, area_b }
    }
}

/// Berry phase of level `n`: `γₙ = −2𝒜 − (n + ½)ℬ`.
#[inline]
pub fn berry_phase(n: u64, phases: &PhaseData) -> f64 {
    -2.0 * phases.area_a - (n as f64 + 0.5) * phases.area_b
}

/// Recover the loop areas from the two lowest Berry phases.
pub fn areas_from_phases(gamma0: f64, gamma1: f64) -> PhaseData {
    PhaseData {
        area_a: (gamma1 - 3.0 * gamma0) / 4.0,
        area_b: gamma0 - gamma1,
    }
}

/// Heisenberg–Weyl composition phase: twice the signed area of the triangle
/// `(0, α′, α + α′)`, positive when that triangle is counter-clockwise.
pub fn weyl_phase_chi(alpha: Complex64, alpha_prime: Complex64) -> f64 {
    let v = alpha + alpha_prime;
    alpha_prime.re * v.im - alpha_prime.im * v.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_square() -> ParametricLoop {
        ParametricLoop::from_xy(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    fn circle(center: [f64; 2], radius: f64, n: usize) -> ParametricLoop {
        loop_from_spec(&LoopDescriptor::circle(center, radius, n, Orientation::Ccw)).unwrap()
    }

    #[test]
    fn circle_sampling_starts_at_angle_zero() {
        let lp = circle([0.0, 0.0], 1.0, 4);
        let expected = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, e) in lp.points().iter().zip(expected) {
            assert!((p.re - e[0]).abs() < 1e-15 && (p.im - e[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn clockwise_circle_runs_the_other_way() {
        let spec = LoopDescriptor::circle([0.0, 0.0], 1.0, 4, Orientation::Cw);
        let lp = loop_from_spec(&spec).unwrap();
        assert!((lp.points()[1].im + 1.0).abs() < 1e-15);
        assert!(euclidean_area(&lp) < 0.0);
    }

    #[test]
    fn polygon_is_ingested_verbatim() {
        let verts = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let spec = LoopDescriptor {
            primitive: Some(Primitive::Polygon {
                vertices: verts.clone(),
            }),
            ..Default::default()
        };
        assert_eq!(
            loop_from_spec(&spec).unwrap(),
            ParametricLoop::from_xy(&verts).unwrap()
        );
    }

    #[test]
    fn descriptor_errors() {
        let zero = LoopDescriptor::circle([0.0, 0.0], 0.0, 16, Orientation::Ccw);
        assert!(matches!(
            loop_from_spec(&zero),
            Err(GeometryError::Degenerate(_))
        ));
        let few = LoopDescriptor::points(vec![[0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(loop_from_spec(&few), Err(GeometryError::TooFewPoints(2)));
        let nan = LoopDescriptor::points(vec![[0.0, 0.0], [1.0, f64::NAN], [0.0, 1.0]]);
        assert_eq!(loop_from_spec(&nan), Err(GeometryError::NonFinite(1)));
        let flat = LoopDescriptor {
            primitive: Some(Primitive::Ellipse {
                center: [0.0, 0.0],
                semiaxes: [1.0, 0.0],
                rotation: 0.0,
                n_samples: 32,
            }),
            ..Default::default()
        };
        assert!(matches!(
            loop_from_spec(&flat),
            Err(GeometryError::Degenerate(_))
        ));
        let repeated = LoopDescriptor::points(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 0.0]]);
        assert_eq!(
            loop_from_spec(&repeated),
            Err(GeometryError::RepeatedPoint(3, 0))
        );
        let both = LoopDescriptor {
            points: Some(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]),
            primitive: Some(Primitive::Polygon { vertices: vec![] }),
            orientation: None,
        };
        assert_eq!(
            loop_from_spec(&both),
            Err(GeometryError::AmbiguousDescriptor)
        );
    }

    #[test]
    fn descriptor_json_forms() {
        let c: LoopDescriptor = serde_json::from_str(
            r#"{"primitive": {"name": "circle", "center": [0, 0], "radius": 0.5, "n_samples": 8}, "orientation": "cw"}"#,
        )
        .unwrap();
        assert_eq!(c.orientation, Some(Orientation::Cw));
        let p: LoopDescriptor = serde_json::from_str(r#"{"points": [[0,0],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(loop_from_spec(&p).unwrap().len(), 3);
        assert!(serde_json::from_str::<LoopDescriptor>(r#"{"pts": []}"#).is_err());
    }

    #[test]
    fn shoelace_on_unit_square() {
        assert_eq!(euclidean_area(&unit_square()), 1.0);
        assert_eq!(euclidean_area(&unit_square().reversed()), -1.0);
    }

    #[test]
    fn shoelace_converges_to_circle_area() {
        let a = euclidean_area(&circle([0.3, -0.2], 1.0, 10_000));
        assert!((a / PI - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hyperbolic_area_of_centered_circles() {
        let big = hyperbolic_area(&circle([0.0, 0.0], 0.5, 10_000)).unwrap();
        let exact = PI * (1f64.cosh() - 1.0);
        assert!((big / exact - 1.0).abs() < 1e-6);
        let small = hyperbolic_area(&circle([0.0, 0.0], 0.01, 10_000)).unwrap();
        assert!((small / (2.0 * PI * 1e-4) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn loop_through_origin_vertex() {
        // Triangle with a vertex at the origin: radial edges contribute nothing.
        let lp = ParametricLoop::from_xy(&[[0.0, 0.0], [0.1, 0.0], [0.0, 0.1]]).unwrap();
        let b = hyperbolic_area(&lp).unwrap();
        let arc = 0.5 * (0.1f64.sinh().powi(2) * 2.0) * (PI / 2.0);
        assert!((b - arc).abs() < 1e-15);
    }

    #[test]
    fn antipodal_segment_is_rejected() {
        let lp = ParametricLoop::from_xy(&[[1.0, 0.0], [-1.0, 0.0], [0.0, -1.0]]).unwrap();
        assert_eq!(
            hyperbolic_area(&lp),
            Err(GeometryError::SegmentThroughOrigin(0))
        );
    }

    #[test]
    fn retraced_loop_cancels() {
        let c = circle([0.2, 0.1], 0.4, 64);
        let mut pts: Vec<_> = c.points().to_vec();
        // Out along the loop, back along its reverse. Drop the duplicated
        // turning points so consecutive points stay distinct.
        let back: Vec<_> = c.points()[1..c.len() - 1].iter().rev().copied().collect();
        pts.extend(back);
        let there_and_back = ParametricLoop::new(pts).unwrap();
        assert!(hyperbolic_area(&there_and_back).unwrap().abs() < 1e-15);
        assert!(euclidean_area(&there_and_back).abs() < 1e-15);
    }

    #[test]
    fn berry_phase_substitution() {
        assert_eq!(berry_phase(0, &PhaseData::new(0.0, 0.0)), 0.0);
        assert_eq!(berry_phase(0, &PhaseData::new(1.0, 2.0)), -3.0);
        assert_eq!(berry_phase(1, &PhaseData::new(1.0, 2.0)), -5.0);
    }

    #[test]
    fn phase_inversion_examples() {
        assert_eq!(areas_from_phases(-3.0, -5.0), PhaseData::new(1.0, 2.0));
        assert_eq!(areas_from_phases(0.0, 0.0), PhaseData::new(0.0, 0.0));
    }

    #[test]
    fn weyl_phase_examples() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        // (0, i, 1+i) runs clockwise.
        assert_eq!(weyl_phase_chi(one, i), -1.0);
        assert_eq!(weyl_phase_chi(i, one), 1.0);
        assert_eq!(
            weyl_phase_chi(Complex64::new(2.0, 0.0), Complex64::new(-3.0, 0.0)),
            0.0
        );
        assert_eq!(
            weyl_phase_chi(Complex64::new(0.0, 0.0), Complex64::new(0.7, -1.3)),
            0.0
        );
    }

    proptest! {
        #[test]
        fn orientation_antisymmetry(
            cx in -1.0f64..1.0, cy in -1.0f64..1.0,
            a in 0.05f64..0.8, b in 0.05f64..0.8, rot in 0.0f64..PI,
            n in 16usize..400,
        ) {
            let spec = LoopDescriptor {
                primitive: Some(Primitive::Ellipse { center: [cx, cy], semiaxes: [a, b], rotation: rot, n_samples: n }),
                ..Default::default()
            };
            let lp = loop_from_spec(&spec).unwrap();
            let rev = lp.reversed();
            let (e, er) = (euclidean_area(&lp), euclidean_area(&rev));
            prop_assert!((e + er).abs() <= 1e-14 * (1.0 + e.abs()));
            let (h, hr) = (hyperbolic_area(&lp).unwrap(), hyperbolic_area(&rev).unwrap());
            prop_assert!((h + hr).abs() <= 1e-14 * (1.0 + h.abs()));
        }

        #[test]
        fn gamma_is_affine_in_n(a in -10.0f64..10.0, b in -10.0f64..10.0, n in 0u64..1000) {
            let p = PhaseData::new(a, b);
            let step = berry_phase(n + 1, &p) - berry_phase(n, &p);
            prop_assert!((step + b).abs() <= 1e-12 * (1.0 + (n as f64) * b.abs() + a.abs()));
        }

        #[test]
        fn phase_roundtrip(a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let p = PhaseData::new(a, b);
            let q = areas_from_phases(berry_phase(0, &p), berry_phase(1, &p));
            prop_assert!((q.area_a - a).abs() < 1e-12);
            prop_assert!((q.area_b - b).abs() < 1e-12);
        }
    }
}
