//! Geometric primitives for region-of-interest shapes.
//!
//! A region is a union of `include` primitives, minus a union of `exclude`
//! primitives, optionally intersected with an axial slab. All coordinates
//! are millimetres.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math;

/// Point or direction in 3-space, millimetres.
pub type Vec3 = [f64; 3];

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm2(a: Vec3) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    math::sqrt(norm2(a))
}

#[inline]
pub fn dist2(a: Vec3, b: Vec3) -> f64 {
    norm2(sub(a, b))
}

#[inline]
pub fn dist(a: Vec3, b: Vec3) -> f64 {
    math::sqrt(dist2(a, b))
}

/// Squared distance from `p` to the segment `[a, b]`.
pub fn dist2_to_segment(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = sub(b, a);
    let len2 = norm2(ab);
    if len2 == 0.0 {
        return dist2(p, a);
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    dist2(p, add(a, scale(ab, t)))
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            lo: [f64::INFINITY; 3],
            hi: [f64::NEG_INFINITY; 3],
        }
    }

    pub fn union(self, other: Aabb) -> Aabb {
        Aabb {
            lo: [
                self.lo[0].min(other.lo[0]),
                self.lo[1].min(other.lo[1]),
                self.lo[2].min(other.lo[2]),
            ],
            hi: [
                self.hi[0].max(other.hi[0]),
                self.hi[1].max(other.hi[1]),
                self.hi[2].max(other.hi[2]),
            ],
        }
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.lo[i] <= other.hi[i] && self.hi[i] >= other.lo[i])
    }

    pub fn is_empty(&self) -> bool {
        (0..3).any(|i| self.lo[i] > self.hi[i])
    }

    pub fn volume(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        (0..3).map(|i| self.hi[i] - self.lo[i]).product()
    }
}

/// Solid primitive. Ellipsoids and boxes are axis-aligned.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Primitive {
    Ellipsoid { center: Vec3, semi_axes: Vec3 },
    Cuboid { center: Vec3, half_extents: Vec3 },
    Shell { center: Vec3, inner_radius: f64, outer_radius: f64 },
    Capsule { start: Vec3, end: Vec3, radius: f64 },
}

impl Primitive {
    pub fn contains(&self, p: Vec3) -> bool {
        match *self {
            Primitive::Ellipsoid { center, semi_axes } => {
                let d = sub(p, center);
                let x = d[0] / semi_axes[0];
                let y = d[1] / semi_axes[1];
                let z = d[2] / semi_axes[2];
                x * x + y * y + z * z <= 1.0
            }
            Primitive::Cuboid {
                center,
                half_extents,
            } => {
                let d = sub(p, center);
                (0..3).all(|i| d[i].abs() <= half_extents[i])
            }
            Primitive::Shell {
                center,
                inner_radius,
                outer_radius,
            } => {
                let r2 = dist2(p, center);
                r2 >= inner_radius * inner_radius && r2 <= outer_radius * outer_radius
            }
            Primitive::Capsule { start, end, radius } => {
                dist2_to_segment(p, start, end) <= radius * radius
            }
        }
    }

    pub fn aabb(&self) -> Aabb {
        match *self {
            Primitive::Ellipsoid { center, semi_axes } => Aabb {
                lo: sub(center, semi_axes),
                hi: add(center, semi_axes),
            },
            Primitive::Cuboid {
                center,
                half_extents,
            } => Aabb {
                lo: sub(center, half_extents),
                hi: add(center, half_extents),
            },
            Primitive::Shell {
                center,
                outer_radius,
                ..
            } => Aabb {
                lo: sub(center, [outer_radius; 3]),
                hi: add(center, [outer_radius; 3]),
            },
            Primitive::Capsule { start, end, radius } => Aabb {
                lo: [
                    start[0].min(end[0]) - radius,
                    start[1].min(end[1]) - radius,
                    start[2].min(end[2]) - radius,
                ],
                hi: [
                    start[0].max(end[0]) + radius,
                    start[1].max(end[1]) + radius,
                    start[2].max(end[2]) + radius,
                ],
            },
        }
    }

    /// Exact analytic volume of the primitive alone.
    pub fn volume_mm3(&self) -> f64 {
        let pi = core::f64::consts::PI;
        match *self {
            Primitive::Ellipsoid { semi_axes, .. } => {
                4.0 / 3.0 * pi * semi_axes[0] * semi_axes[1] * semi_axes[2]
            }
            Primitive::Cuboid { half_extents, .. } => {
                8.0 * half_extents[0] * half_extents[1] * half_extents[2]
            }
            Primitive::Shell {
                inner_radius,
                outer_radius,
                ..
            } => {
                4.0 / 3.0
                    * pi
                    * (outer_radius * outer_radius * outer_radius
                        - inner_radius * inner_radius * inner_radius)
            }
            Primitive::Capsule { start, end, radius } => {
                let h = dist(start, end);
                pi * radius * radius * h + 4.0 / 3.0 * pi * radius * radius * radius
            }
        }
    }

    /// Lower bound on the distance from an outside point `p` to the primitive.
    ///
    /// Exact for cuboids, shells and capsules. For ellipsoids it scales the
    /// normalized radial excess by the smallest semi-axis, which never
    /// overestimates the true distance.
    pub fn distance_outside_lb(&self, p: Vec3) -> f64 {
        match *self {
            Primitive::Ellipsoid { center, semi_axes } => {
                let d = sub(p, center);
                let x = d[0] / semi_axes[0];
                let y = d[1] / semi_axes[1];
                let z = d[2] / semi_axes[2];
                let rho = math::sqrt(x * x + y * y + z * z);
                let a_min = semi_axes[0].min(semi_axes[1]).min(semi_axes[2]);
                ((rho - 1.0) * a_min).max(0.0)
            }
            Primitive::Cuboid {
                center,
                half_extents,
            } => {
                let d = sub(p, center);
                let mut acc = 0.0;
                for i in 0..3 {
                    let e = d[i].abs() - half_extents[i];
                    if e > 0.0 {
                        acc += e * e;
                    }
                }
                math::sqrt(acc)
            }
            Primitive::Shell {
                center,
                inner_radius,
                outer_radius,
            } => {
                let r = dist(p, center);
                if r < inner_radius {
                    inner_radius - r
                } else {
                    (r - outer_radius).max(0.0)
                }
            }
            Primitive::Capsule { start, end, radius } => {
                (math::sqrt(dist2_to_segment(p, start, end)) - radius).max(0.0)
            }
        }
    }

    /// Lower bound on the distance from an inside point `p` to the primitive
    /// boundary. Zero when `p` is outside.
    pub fn depth_inside_lb(&self, p: Vec3) -> f64 {
        match *self {
            Primitive::Ellipsoid { center, semi_axes } => {
                let d = sub(p, center);
                let x = d[0] / semi_axes[0];
                let y = d[1] / semi_axes[1];
                let z = d[2] / semi_axes[2];
                let rho = math::sqrt(x * x + y * y + z * z);
                let a_min = semi_axes[0].min(semi_axes[1]).min(semi_axes[2]);
                ((1.0 - rho) * a_min).max(0.0)
            }
            Primitive::Cuboid {
                center,
                half_extents,
            } => {
                let d = sub(p, center);
                let mut m = f64::INFINITY;
                for i in 0..3 {
                    m = m.min(half_extents[i] - d[i].abs());
                }
                m.max(0.0)
            }
            Primitive::Shell {
                center,
                inner_radius,
                outer_radius,
            } => {
                let r = dist(p, center);
                if r < inner_radius || r > outer_radius {
                    0.0
                } else {
                    (r - inner_radius).min(outer_radius - r)
                }
            }
            Primitive::Capsule { start, end, radius } => {
                (radius - math::sqrt(dist2_to_segment(p, start, end))).max(0.0)
            }
        }
    }

    /// Extent of the primitive projected on a unit axis, as `(lo, hi)`.
    pub fn axial_extent(&self, axis: Vec3) -> (f64, f64) {
        match *self {
            Primitive::Ellipsoid { center, semi_axes } => {
                let c = dot(center, axis);
                let r = math::sqrt(
                    (semi_axes[0] * axis[0]).powi(2)
                        + (semi_axes[1] * axis[1]).powi(2)
                        + (semi_axes[2] * axis[2]).powi(2),
                );
                (c - r, c + r)
            }
            Primitive::Cuboid {
                center,
                half_extents,
            } => {
                let c = dot(center, axis);
                let r = half_extents[0] * axis[0].abs()
                    + half_extents[1] * axis[1].abs()
                    + half_extents[2] * axis[2].abs();
                (c - r, c + r)
            }
            Primitive::Shell {
                center,
                outer_radius,
                ..
            } => {
                let c = dot(center, axis);
                (c - outer_radius, c + outer_radius)
            }
            Primitive::Capsule { start, end, radius } => {
                let a = dot(start, axis);
                let b = dot(end, axis);
                (a.min(b) - radius, a.max(b) + radius)
            }
        }
    }
}

/// Half-open axial slab: points with `lo <= dot(axis, p) < hi`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Slab {
    pub axis: Vec3,
    pub lo: f64,
    pub hi: f64,
}

impl Slab {
    pub fn contains(&self, p: Vec3) -> bool {
        let t = dot(self.axis, p);
        t >= self.lo && t < self.hi
    }

    /// Distance from `p` to the slab along the axis (zero inside).
    pub fn distance(&self, p: Vec3) -> f64 {
        let t = dot(self.axis, p);
        if t < self.lo {
            self.lo - t
        } else if t >= self.hi {
            t - self.hi
        } else {
            0.0
        }
    }
}

/// Constructive region: union of includes, minus excludes, cut to a slab.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Shape {
    pub include: Vec<Primitive>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclude: Vec<Primitive>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slab: Option<Slab>,
}

/// Samples used for Monte-Carlo volume estimation.
pub const VOLUME_MC_SAMPLES: u64 = 1_000_000;
/// Internal seed for Monte-Carlo volume estimation; fixed so stored and
/// recomputed volumes agree exactly.
pub const VOLUME_MC_SEED: u64 = 0xD05E_CA5E;

impl Shape {
    pub fn primitive(p: Primitive) -> Self {
        Shape {
            include: alloc::vec![p],
            exclude: Vec::new(),
            slab: None,
        }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        if let Some(slab) = &self.slab {
            if !slab.contains(p) {
                return false;
            }
        }
        if !self.include.iter().any(|prim| prim.contains(p)) {
            return false;
        }
        !self.exclude.iter().any(|prim| prim.contains(p))
    }

    /// Bounding box of the includes, tightened by a z-aligned slab.
    pub fn aabb(&self) -> Aabb {
        let mut bb = Aabb::empty();
        for prim in &self.include {
            bb = bb.union(prim.aabb());
        }
        if let Some(slab) = &self.slab {
            // Only an axis-aligned slab can tighten an axis-aligned box.
            for i in 0..3 {
                if slab.axis[i].abs() == 1.0 && slab.axis[(i + 1) % 3] == 0.0 && slab.axis[(i + 2) % 3] == 0.0 {
                    if slab.axis[i] > 0.0 {
                        bb.lo[i] = bb.lo[i].max(slab.lo);
                        bb.hi[i] = bb.hi[i].min(slab.hi);
                    } else {
                        bb.lo[i] = bb.lo[i].max(-slab.hi);
                        bb.hi[i] = bb.hi[i].min(-slab.lo);
                    }
                }
            }
        }
        bb
    }

    /// True when the shape is a single primitive with no cuts, so its volume
    /// is analytic.
    pub fn is_analytic(&self) -> bool {
        self.include.len() == 1 && self.exclude.is_empty() && self.slab.is_none()
    }

    /// Volume in mm^3: analytic for single primitives, Monte-Carlo with a
    /// fixed internal seed otherwise (so recomputation is reproducible).
    pub fn volume_mm3(&self) -> f64 {
        if self.is_analytic() {
            return self.include[0].volume_mm3();
        }
        let bb = self.aabb();
        if bb.is_empty() {
            return 0.0;
        }
        let mut rng = crate::seed::rng(VOLUME_MC_SEED, &[]);
        let mut hits = 0u64;
        for _ in 0..VOLUME_MC_SAMPLES {
            let p = sample_in_aabb(&bb, &mut rng);
            if self.contains(p) {
                hits += 1;
            }
        }
        bb.volume() * (hits as f64) / (VOLUME_MC_SAMPLES as f64)
    }

    /// Lower bound on the distance from `p` to the shape. Returns zero for
    /// points inside. Combines three valid bounds: distance to the include
    /// union, distance out of a containing exclude, and distance to the slab.
    pub fn clearance_lb(&self, p: Vec3) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let mut best = 0.0f64;
        if let Some(slab) = &self.slab {
            best = best.max(slab.distance(p));
        }
        if !self.include.iter().any(|prim| prim.contains(p)) {
            let mut min_inc = f64::INFINITY;
            for prim in &self.include {
                min_inc = min_inc.min(prim.distance_outside_lb(p));
            }
            if min_inc.is_finite() {
                best = best.max(min_inc);
            }
        }
        for prim in &self.exclude {
            if prim.contains(p) {
                best = best.max(prim.depth_inside_lb(p));
            }
        }
        best
    }
}

#[inline]
pub fn sample_in_aabb<R: Rng>(bb: &Aabb, rng: &mut R) -> Vec3 {
    // Component order is fixed; changing it would silently re-map seeds.
    let x = rng.gen_range(bb.lo[0]..=bb.hi[0]);
    let y = rng.gen_range(bb.lo[1]..=bb.hi[1]);
    let z = rng.gen_range(bb.lo[2]..=bb.hi[2]);
    [x, y, z]
}

/// Rejection-samples `n` points uniformly inside `shape`.
///
/// Fails when the acceptance rate suggests an empty region: no hit in the
/// first 200k draws, or the total draw budget `200 * n + 200_000` runs out.
pub fn sample_in_shape<R: Rng>(shape: &Shape, n: usize, rng: &mut R) -> Option<Vec<Vec3>> {
    let bb = shape.aabb();
    if bb.is_empty() {
        return None;
    }
    let mut points = Vec::with_capacity(n);
    let budget = 200 * (n as u64) + 200_000;
    let mut draws = 0u64;
    while points.len() < n {
        if draws >= budget || (draws >= 200_000 && points.is_empty()) {
            return None;
        }
        draws += 1;
        let p = sample_in_aabb(&bb, rng);
        if shape.contains(p) {
            points.push(p);
        }
    }
    Some(points)
}
