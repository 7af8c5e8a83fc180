//! Synthetic volumes with known sublevel topology.
//!
//! Shapes are drawn with value `inside` (default 0) on a background of
//! `outside` (default 1), so thresholding at 0.5 recovers the shape.
//! Voxel centres sit at integer coordinates; shapes are centred at
//! `((nx - 1) / 2, (ny - 1) / 2, (nz - 1) / 2)`.
//!
//! | kind           | sublevel set at 0.5 | (b0, b1, b2) | minimum dims |
//! |----------------|---------------------|--------------|--------------|
//! | `constant`     | everything or empty | (1, 0, 0)    | 1x1x1        |
//! | `solid-ball`   | ball                | (1, 0, 0)    | 1x1x1        |
//! | `hollow-shell` | spherical shell     | (1, 0, 1)    | 5x5x5        |
//! | `solid-torus`  | ring in the xy-plane| (1, 1, 0)    | 7x7x1        |
//! | `two-blobs`    | two balls along x   | (2, 0, 0)    | 7x1x1        |
//! | `fig2-line`    | `[-2, 1, -1, 2, -1]`| n/a          | exactly 5x1x1|
//!
//! Optional `noise` adds seeded uniform noise in `[-noise, noise]`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dims, Volume3D};
use crate::error::{Error, Result};

pub type PhantomParams = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhantomKind {
    Constant,
    SolidBall,
    HollowShell,
    SolidTorus,
    TwoBlobs,
    Fig2Line,
}

impl PhantomKind {
    pub const ALL: [PhantomKind; 6] = [
        PhantomKind::Constant,
        PhantomKind::SolidBall,
        PhantomKind::HollowShell,
        PhantomKind::SolidTorus,
        PhantomKind::TwoBlobs,
        PhantomKind::Fig2Line,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PhantomKind::Constant => "constant",
            PhantomKind::SolidBall => "solid-ball",
            PhantomKind::HollowShell => "hollow-shell",
            PhantomKind::SolidTorus => "solid-torus",
            PhantomKind::TwoBlobs => "two-blobs",
            PhantomKind::Fig2Line => "fig2-line",
        }
    }
}

impl fmt::Display for PhantomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhantomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PhantomKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownPhantom(s.to_string()))
    }
}

pub const FIG2_VALUES: [f64; 5] = [-2.0, 1.0, -1.0, 2.0, -1.0];

struct Params<'a> {
    map: &'a PhantomParams,
}

impl Params<'_> {
    fn get(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.map.get(key).copied().unwrap_or(default);
        if !v.is_finite() {
            return Err(Error::PhantomParam { key: key.into(), reason: "must be finite".into() });
        }
        Ok(v)
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.get(key, default)?;
        if v <= 0.0 {
            return Err(Error::PhantomParam { key: key.into(), reason: format!("must be positive, got {v}") });
        }
        Ok(v)
    }
}

fn too_small(kind: PhantomKind, reason: String) -> Error {
    Error::PhantomTooSmall { kind: kind.as_str(), reason }
}

pub fn generate_phantom(kind: PhantomKind, dims: Dims, params: &PhantomParams) -> Result<Volume3D> {
    let p = Params { map: params };
    let inside = p.get("inside", 0.0)?;
    let outside = p.get("outside", 1.0)?;
    let centre = [
        (dims.nx as f64 - 1.0) / 2.0,
        (dims.ny as f64 - 1.0) / 2.0,
        (dims.nz as f64 - 1.0) / 2.0,
    ];
    let offset = |x: usize, y: usize, z: usize| [x as f64 - centre[0], y as f64 - centre[1], z as f64 - centre[2]];
    let pick = |hit: bool| if hit { inside } else { outside };
    let min_dim = dims.nx.min(dims.ny).min(dims.nz) as f64;

    let base = match kind {
        PhantomKind::Constant => Volume3D::filled(dims, p.get("value", 0.0)?)?,
        PhantomKind::SolidBall => {
            let r = p.positive("radius", 0.35 * min_dim)?;
            Volume3D::from_fn(dims, |x, y, z| {
                let [dx, dy, dz] = offset(x, y, z);
                pick((dx * dx + dy * dy + dz * dz).sqrt() <= r)
            })?
        }
        PhantomKind::HollowShell => {
            if dims.nx < 5 || dims.ny < 5 || dims.nz < 5 {
                return Err(too_small(kind, format!("needs at least 5 voxels per axis, got {:?}", dims.as_tuple())));
            }
            let outer = p.positive("outer", (min_dim - 1.0) / 2.0)?;
            let inner = p.positive("inner", outer / 2.0)?;
            if inner >= outer {
                return Err(Error::PhantomParam { key: "inner".into(), reason: "must be below outer".into() });
            }
            Volume3D::from_fn(dims, |x, y, z| {
                let [dx, dy, dz] = offset(x, y, z);
                let d = (dx * dx + dy * dy + dz * dz).sqrt();
                pick(d >= inner && d <= outer)
            })?
        }
        PhantomKind::SolidTorus => {
            if dims.nx < 7 || dims.ny < 7 {
                return Err(too_small(kind, format!("needs at least 7x7 in the xy-plane, got {:?}", dims.as_tuple())));
            }
            let half = (dims.nx.min(dims.ny) as f64 - 1.0) / 2.0;
            let major = p.positive("major", 0.625 * half)?;
            let minor = p.positive("minor", 0.25 * half)?;
            if minor >= major {
                return Err(Error::PhantomParam { key: "minor".into(), reason: "must be below major".into() });
            }
            Volume3D::from_fn(dims, |x, y, z| {
                let [dx, dy, dz] = offset(x, y, z);
                let rho = (dx * dx + dy * dy).sqrt() - major;
                pick((rho * rho + dz * dz).sqrt() <= minor)
            })?
        }
        PhantomKind::TwoBlobs => {
            if dims.nx < 7 {
                return Err(too_small(kind, format!("needs nx >= 7, got {}", dims.nx)));
            }
            let span = dims.nx as f64 - 1.0;
            let (c1, c2) = (span / 4.0, 3.0 * span / 4.0);
            let cross = dims.ny.min(dims.nz) as f64;
            let r = p.positive("radius", (span / 4.0 - 1.0).min((cross - 1.0) / 2.0 + 0.5))?;
            // At least one background voxel must separate the blobs along x.
            if (c2 - r).ceil() - (c1 + r).floor() < 2.0 {
                return Err(Error::PhantomParam { key: "radius".into(), reason: format!("{r} makes the blobs touch") });
            }
            Volume3D::from_fn(dims, |x, y, z| {
                let [_, dy, dz] = offset(x, y, z);
                let (xf, side) = (x as f64, dy * dy + dz * dz);
                let d1 = ((xf - c1).powi(2) + side).sqrt();
                let d2 = ((xf - c2).powi(2) + side).sqrt();
                pick(d1 <= r || d2 <= r)
            })?
        }
        PhantomKind::Fig2Line => {
            if dims.as_tuple() != (5, 1, 1) {
                return Err(too_small(kind, format!("is fixed at 5x1x1, got {:?}", dims.as_tuple())));
            }
            Volume3D::new(dims, FIG2_VALUES.to_vec())?
        }
    };

    let noise = p.get("noise", 0.0)?;
    if noise == 0.0 {
        return Ok(base);
    }
    if noise < 0.0 {
        return Err(Error::PhantomParam { key: "noise".into(), reason: "must be non-negative".into() });
    }
    let seed = p.get("seed", 0.0)?;
    if seed < 0.0 || seed.fract() != 0.0 {
        return Err(Error::PhantomParam { key: "seed".into(), reason: "must be a non-negative integer".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let noisy = base.values().iter().map(|&v| v + rng.gen_range(-noise..=noise)).collect();
    Volume3D::new(dims, noisy)
}
