//! Ambient domains and small 3-vector helpers.

use std::f64::consts::PI;

use crate::error::{param, Result};

pub type Point3 = [f64; 3];

#[inline]
pub fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Point3, s: f64) -> Point3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn norm_sq(a: Point3) -> f64 {
    a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
}

#[inline]
pub fn norm(a: Point3) -> f64 {
    norm_sq(a).sqrt()
}

#[inline]
pub fn dist(a: Point3, b: Point3) -> f64 {
    norm(sub(a, b))
}

/// A bounded ambient domain containing the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainSpec {
    /// Ball of the given radius centered at the origin.
    Ball { radius: f64 },
    /// Axis-aligned box `[-h1,h1] x [-h2,h2] x [-h3,h3]`.
    Box { half_widths: [f64; 3] },
}

impl DomainSpec {
    pub fn unit_ball() -> Self {
        DomainSpec::Ball { radius: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            DomainSpec::Ball { radius } if !ok(radius) => {
                Err(param(format!("ball radius must be finite and positive, got {radius}")))
            }
            DomainSpec::Box { half_widths } if !half_widths.iter().all(|&h| ok(h)) => Err(param(
                format!("box half-widths must be finite and positive, got {half_widths:?}"),
            )),
            _ => Ok(()),
        }
    }

    /// Signed distance to the boundary; negative inside.
    pub fn signed_distance(&self, x: Point3) -> f64 {
        match *self {
            DomainSpec::Ball { radius } => norm(x) - radius,
            DomainSpec::Box { half_widths } => {
                let q = [
                    x[0].abs() - half_widths[0],
                    x[1].abs() - half_widths[1],
                    x[2].abs() - half_widths[2],
                ];
                let outside = norm([q[0].max(0.0), q[1].max(0.0), q[2].max(0.0)]);
                let inside = q[0].max(q[1]).max(q[2]).min(0.0);
                outside + inside
            }
        }
    }

    /// Open-set membership.
    pub fn contains(&self, x: Point3) -> bool {
        self.signed_distance(x) < 0.0
    }

    pub fn distance_to_boundary(&self, x: Point3) -> f64 {
        self.signed_distance(x).abs()
    }

    pub fn volume(&self) -> f64 {
        match *self {
            DomainSpec::Ball { radius } => 4.0 / 3.0 * PI * radius.powi(3),
            DomainSpec::Box { half_widths: h } => 8.0 * h[0] * h[1] * h[2],
        }
    }

    pub fn boundary_area(&self) -> f64 {
        match *self {
            DomainSpec::Ball { radius } => 4.0 * PI * radius * radius,
            DomainSpec::Box { half_widths: h } => 8.0 * (h[0] * h[1] + h[1] * h[2] + h[0] * h[2]),
        }
    }

    /// Volume of `{x in D : dist(x, boundary) > margin}`.
    pub fn inner_volume(&self, margin: f64) -> f64 {
        match *self {
            DomainSpec::Ball { radius } => {
                let r = (radius - margin).max(0.0);
                4.0 / 3.0 * PI * r.powi(3)
            }
            DomainSpec::Box { half_widths: h } => {
                h.iter().map(|&hk| 2.0 * (hk - margin).max(0.0)).product()
            }
        }
    }

    /// Half-extents of the axis-aligned bounding box (centered at the origin).
    pub fn half_extents(&self) -> Point3 {
        match *self {
            DomainSpec::Ball { radius } => [radius; 3],
            DomainSpec::Box { half_widths } => half_widths,
        }
    }

    pub fn bounding_box_volume(&self) -> f64 {
        let h = self.half_extents();
        8.0 * h[0] * h[1] * h[2]
    }

    /// The dilated set `factor * D`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            DomainSpec::Ball { radius } => DomainSpec::Ball { radius: radius * factor },
            DomainSpec::Box { half_widths } => DomainSpec::Box {
                half_widths: scale(half_widths, factor),
            },
        }
    }

    /// Boxes have edges, so they do not satisfy the C² boundary assumption.
    pub fn has_c2_boundary(&self) -> bool {
        matches!(self, DomainSpec::Ball { .. })
    }
}

impl std::fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainSpec::Ball { radius } => write!(f, "ball {radius}"),
            DomainSpec::Box { half_widths: h } => write!(f, "box {} {} {}", h[0], h[1], h[2]),
        }
    }
}
