//! Dense 3D scalar volumes, label masks and per-class probability fields.
//!
//! All arrays use x-fastest linear ordering: `index = x + nx * (y + ny * z)`.

mod io;
mod phantom;

pub use io::{load_mask, load_volume, read_mask, read_volume, save_mask, save_volume, write_mask, write_volume};
pub use phantom::{generate_phantom, PhantomKind, PhantomParams};

use crate::error::{Error, Result};

/// Extent of a volume along x, y and z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::InvalidDims(nx, ny, nz));
        }
        nx.checked_mul(ny)
            .and_then(|n| n.checked_mul(nz))
            .ok_or(Error::DimsOverflow(nx as u64, ny as u64, nz as u64))?;
        Ok(Self { nx, ny, nz })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.nx * (y + self.ny * z)
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize, usize) {
        let x = index % self.nx;
        let rest = index / self.nx;
        (x, rest % self.ny, rest / self.ny)
    }

    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }

    fn check_same(&self, other: &Dims) -> Result<()> {
        if self != other {
            return Err(Error::DimMismatch(self.as_tuple(), other.as_tuple()));
        }
        Ok(())
    }
}

/// A dense scalar field over voxels. Values are finite 64-bit reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume3D {
    dims: Dims,
    data: Vec<f64>,
}

impl Volume3D {
    pub fn new(dims: Dims, data: Vec<f64>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::LengthMismatch { expected: dims.len(), actual: data.len() });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { dims, data })
    }

    pub fn filled(dims: Dims, value: f64) -> Result<Self> {
        Self::new(dims, vec![value; dims.len()])
    }

    /// Builds a volume by evaluating `f(x, y, z)` at every voxel.
    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(dims.len());
        for z in 0..dims.nz {
            for y in 0..dims.ny {
                for x in 0..dims.nx {
                    data.push(f(x, y, z));
                }
            }
        }
        Self::new(dims, data)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.data[self.dims.index(x, y, z)]
    }

    /// Applies `f` voxelwise. Fails if `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.dims, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }
}

/// Ground-truth segmentation: one class label per voxel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMask {
    dims: Dims,
    labels: Vec<u8>,
    num_classes: u8,
}

impl LabelMask {
    pub fn new(dims: Dims, labels: Vec<u8>, num_classes: u8) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::TooFewClasses(num_classes as usize));
        }
        if labels.len() != dims.len() {
            return Err(Error::LengthMismatch { expected: dims.len(), actual: labels.len() });
        }
        if let Some(voxel) = labels.iter().position(|&l| l >= num_classes) {
            return Err(Error::LabelOutOfRange { voxel, label: labels[voxel], num_classes });
        }
        Ok(Self { dims, labels, num_classes })
    }

    /// Labels voxels with value `<= threshold` as class 1, the rest as class 0.
    pub fn threshold(v: &Volume3D, threshold: f64) -> Self {
        let labels = v.values().iter().map(|&x| u8::from(x <= threshold)).collect();
        Self { dims: v.dims(), labels, num_classes: 2 }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes as usize
    }
}

/// Per-voxel class probabilities, stored class-major: one contiguous
/// x-fastest plane set per class.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityField {
    dims: Dims,
    num_classes: usize,
    probs: Vec<f64>,
}

const PROB_SUM_TOL: f64 = 1e-6;

impl ProbabilityField {
    /// `probs` is class-major: `probs[c * n + voxel]`.
    pub fn new(dims: Dims, num_classes: usize, probs: Vec<f64>) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::TooFewClasses(num_classes));
        }
        let n = dims.len();
        if probs.len() != n * num_classes {
            return Err(Error::LengthMismatch { expected: n * num_classes, actual: probs.len() });
        }
        for voxel in 0..n {
            let mut sum = 0.0;
            for c in 0..num_classes {
                let p = probs[c * n + voxel];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidProbability {
                        voxel,
                        reason: format!("class {c} probability {p} outside [0, 1]"),
                    });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::InvalidProbability {
                    voxel,
                    reason: format!("class probabilities sum to {sum}"),
                });
            }
        }
        Ok(Self { dims, num_classes, probs })
    }

    /// Stacks one volume per class.
    pub fn from_class_volumes(volumes: &[Volume3D]) -> Result<Self> {
        let first = volumes.first().ok_or(Error::TooFewClasses(0))?;
        let dims = first.dims();
        let mut probs = Vec::with_capacity(dims.len() * volumes.len());
        for v in volumes {
            dims.check_same(&v.dims())?;
            probs.extend_from_slice(v.values());
        }
        Self::new(dims, volumes.len(), probs)
    }

    pub fn one_hot(mask: &LabelMask) -> Self {
        let n = mask.dims().len();
        let l = mask.num_classes();
        let mut probs = vec![0.0; n * l];
        for (voxel, &label) in mask.labels().iter().enumerate() {
            probs[label as usize * n + voxel] = 1.0;
        }
        Self { dims: mask.dims(), num_classes: l, probs }
    }

    pub fn uniform(dims: Dims, num_classes: usize) -> Result<Self> {
        Self::new(dims, num_classes, vec![1.0 / num_classes as f64; dims.len() * num_classes])
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn class_probs(&self, class: usize) -> &[f64] {
        let n = self.dims.len();
        &self.probs[class * n..(class + 1) * n]
    }

    #[inline]
    pub fn prob(&self, voxel: usize, class: usize) -> f64 {
        self.probs[class * self.dims.len() + voxel]
    }

    pub fn class_volume(&self, class: usize) -> Result<Volume3D> {
        self.check_class(class)?;
        Volume3D::new(self.dims, self.class_probs(class).to_vec())
    }

    fn check_class(&self, class: usize) -> Result<()> {
        if class >= self.num_classes {
            return Err(Error::ClassOutOfRange { class, num_classes: self.num_classes });
        }
        Ok(())
    }

    pub(crate) fn check_compatible(&self, mask: &LabelMask) -> Result<()> {
        self.dims.check_same(&mask.dims())?;
        if self.num_classes != mask.num_classes() {
            return Err(Error::InvalidConfig(format!(
                "prediction has {} classes, ground truth has {}",
                self.num_classes,
                mask.num_classes()
            )));
        }
        Ok(())
    }
}

/// Ground-truth filtration for one class: 0 on the class, 1 elsewhere.
pub fn field_from_mask(mask: &LabelMask, class_id: usize) -> Result<Volume3D> {
    if class_id >= mask.num_classes() {
        return Err(Error::ClassOutOfRange { class: class_id, num_classes: mask.num_classes() });
    }
    let data = mask
        .labels()
        .iter()
        .map(|&l| if l as usize == class_id { 0.0 } else { 1.0 })
        .collect();
    Volume3D::new(mask.dims(), data)
}

/// Predicted filtration for one class: `1 - p_class`.
pub fn field_from_probs(probs: &ProbabilityField, class_id: usize) -> Result<Volume3D> {
    probs.check_class(class_id)?;
    let data = probs.class_probs(class_id).iter().map(|&p| 1.0 - p).collect();
    Volume3D::new(probs.dims(), data)
}
