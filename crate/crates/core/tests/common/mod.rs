//! Independent oracles shared by the integration and acceptance suites.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use revival::phase_geometry::{
    loop_from_spec, LoopDescriptor, Orientation, ParametricLoop, Primitive,
};

/// `sinh(2r)/r`, the invariant area density, with its limit 2 at r = 0.
fn density(r: f64) -> f64 {
    if r < 1e-8 {
        2.0 + 4.0 * r * r / 3.0
    } else {
        (2.0 * r).sinh() / r
    }
}

/// `∫∫_disk sinh(2|β|)/|β| d²β` over the disk of radius `radius` about
/// `center`, by polar quadrature about the disk centre: composite Simpson in
/// the radial coordinate, periodic trapezoid in angle.
pub fn disk_area_oracle(center: [f64; 2], radius: f64) -> f64 {
    let nr = 2000;
    let nphi = 512;
    let h = radius / nr as f64;
    let dphi = 2.0 * PI / nphi as f64;
    let mut total = 0.0;
    for j in 0..nphi {
        let phi = j as f64 * dphi;
        let (s, c) = phi.sin_cos();
        let mut inner = 0.0;
        for i in 0..=nr {
            let rho = i as f64 * h;
            let x = center[0] + rho * c;
            let y = center[1] + rho * s;
            let w = if i == 0 || i == nr {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            inner += w * density(x.hypot(y)) * rho;
        }
        total += inner * h / 3.0;
    }
    total * dphi
}

pub fn circle(center: [f64; 2], radius: f64, n: usize) -> ParametricLoop {
    loop_from_spec(&LoopDescriptor::circle(center, radius, n, Orientation::Ccw)).unwrap()
}

/// A random β-loop: either a sampled ellipse or a star-shaped polygon about
/// a random centre, in either orientation.
pub fn random_loop<R: Rng>(rng: &mut R) -> ParametricLoop {
    let center = [rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)];
    let orientation = if rng.gen_bool(0.5) {
        Orientation::Ccw
    } else {
        Orientation::Cw
    };
    if rng.gen_bool(0.5) {
        let spec = LoopDescriptor {
            primitive: Some(Primitive::Ellipse {
                center,
                semiaxes: [rng.gen_range(0.05..0.9), rng.gen_range(0.05..0.9)],
                rotation: rng.gen_range(0.0..PI),
                n_samples: rng.gen_range(200..2000),
            }),
            points: None,
            orientation: Some(orientation),
        };
        loop_from_spec(&spec).unwrap()
    } else {
        let n = rng.gen_range(24..200);
        let mut pts: Vec<[f64; 2]> = (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                let r = rng.gen_range(0.1..0.7);
                [center[0] + r * t.cos(), center[1] + r * t.sin()]
            })
            .collect();
        if orientation == Orientation::Cw {
            pts.reverse();
        }
        ParametricLoop::from_xy(&pts).unwrap()
    }
}
