//! The Heisenberg group `Nil(3)` in exponential coordinates, with the
//! metric that makes `X = ∂x − (y/2)∂z`, `Y = ∂y + (x/2)∂z`, `Z = ∂z`
//! orthonormal. Tangent vectors are exchanged in that frame.

use crate::error::{require, Result};
use crate::profile::ProfileCurve;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl GroupPoint {
    pub const IDENTITY: Self = Self { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn inverse(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }

    /// Rotation by `theta` about the centre (the z-axis).
    pub fn rotated(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(self.x * c - self.y * s, self.x * s + self.y * c, self.z)
    }
}

pub fn group_mul(p: GroupPoint, q: GroupPoint) -> GroupPoint {
    GroupPoint::new(p.x + q.x, p.y + q.y, p.z + q.z + 0.5 * (p.x * q.y - q.x * p.y))
}

impl Mul for GroupPoint {
    type Output = GroupPoint;
    fn mul(self, rhs: Self) -> Self {
        group_mul(self, rhs)
    }
}

/// Components on the orthonormal left-invariant frame `{X, Y, Z}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameVector {
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl FrameVector {
    pub const ZERO: Self = Self {
        cx: 0.0,
        cy: 0.0,
        cz: 0.0,
    };

    pub fn new(cx: f64, cy: f64, cz: f64) -> Self {
        Self { cx, cy, cz }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.cx * o.cx + self.cy * o.cy + self.cz * o.cz
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Canonical components `(∂x, ∂y, ∂z)` of this vector based at `p`.
    pub fn to_canonical(self, p: GroupPoint) -> [f64; 3] {
        [self.cx, self.cy, self.cz - 0.5 * p.y * self.cx + 0.5 * p.x * self.cy]
    }

    pub fn from_canonical(v: [f64; 3], p: GroupPoint) -> Self {
        Self::new(v[0], v[1], v[2] + 0.5 * p.y * v[0] - 0.5 * p.x * v[1])
    }
}

impl Add for FrameVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.cx + o.cx, self.cy + o.cy, self.cz + o.cz)
    }
}

impl Sub for FrameVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.cx - o.cx, self.cy - o.cy, self.cz - o.cz)
    }
}

impl Neg for FrameVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.cx, -self.cy, -self.cz)
    }
}

impl Mul<FrameVector> for f64 {
    type Output = FrameVector;
    fn mul(self, v: FrameVector) -> FrameVector {
        FrameVector::new(self * v.cx, self * v.cy, self * v.cz)
    }
}

/// Canonical components of `X`, `Y`, `Z` at `p`.
pub fn left_frame(p: GroupPoint) -> [[f64; 3]; 3] {
    [[1.0, 0.0, -0.5 * p.y], [0.0, 1.0, 0.5 * p.x], [0.0, 0.0, 1.0]]
}

/// The left-invariant metric in canonical coordinates at `p`.
pub fn metric(p: GroupPoint, u: [f64; 3], v: [f64; 3]) -> f64 {
    FrameVector::from_canonical(u, p).dot(FrameVector::from_canonical(v, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KillingField {
    Xi,
    Eta,
    Zeta,
    Rho,
}

impl KillingField {
    pub const ALL: [KillingField; 4] = [Self::Xi, Self::Eta, Self::Zeta, Self::Rho];

    pub fn at(self, p: GroupPoint) -> FrameVector {
        match self {
            Self::Xi => FrameVector::new(1.0, 0.0, p.y),
            Self::Eta => FrameVector::new(0.0, 1.0, -p.x),
            Self::Zeta => FrameVector::new(0.0, 0.0, 1.0),
            Self::Rho => FrameVector::new(p.y, -p.x, 0.5 * (p.x * p.x + p.y * p.y)),
        }
    }
}

/// `(ξ, η, ζ, ρ)` at `p`.
pub fn killing_fields(p: GroupPoint) -> [FrameVector; 4] {
    KillingField::ALL.map(|k| k.at(p))
}

/// Ricci curvature in the direction of a unit vector whose Z-component is `gamma`.
pub fn ricci_normal(gamma: f64) -> Result<f64> {
    require(gamma.abs() <= 1.0, "gamma", gamma, "|gamma| <= 1")?;
    Ok(gamma * gamma - 0.5)
}

const FLUX_NODES: usize = 256;

/// Flux of `field` through the parallel circle at height `t`, measured
/// against the unit conormal pointing towards increasing `t`.
pub fn flux_circle(profile: &ProfileCurve, t: f64, field: KillingField) -> Result<f64> {
    let st = profile.state(t)?;
    let (f, ft) = (st.f, st.f_t);
    let q = 4.0 + f * f;
    let alpha = 2.0 / q;
    let n_norm = (ft * ft + 4.0 / q).sqrt();
    let dsigma = f * (1.0 + 0.25 * f * f).sqrt();
    let d_theta = 2.0 * PI / FLUX_NODES as f64;
    // periodic trapezoid: spectrally accurate for smooth integrands
    let total: f64 = (0..FLUX_NODES)
        .map(|j| {
            let th = j as f64 * d_theta;
            let (s, c) = th.sin_cos();
            let nu = FrameVector::new(ft * c - alpha * f * s, ft * s + alpha * f * c, 4.0 / q);
            let p = GroupPoint::new(f * c, f * s, t);
            field.at(p).dot(nu)
        })
        .sum();
    Ok(total * d_theta * dsigma / n_norm)
}
