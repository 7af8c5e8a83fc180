use crate::volume::{Dims, Volume3D};

/// Cell layout of the cubical complex over an `nx x ny x nz` voxel block.
///
/// Cells live on a `(2nx+1) x (2ny+1) x (2nz+1)` grid; a cell's dimension is
/// the number of odd coordinates. Voxel `(x, y, z)` is the cell
/// `(2x+1, 2y+1, 2z+1)`. Cell ids are x-fastest over the grid, so comparing
/// ids compares `(z, y, x)` lexicographically.
#[derive(Debug, Clone, Copy)]
pub struct CubicalGrid {
    pub gx: usize,
    pub gy: usize,
    pub gz: usize,
}

impl CubicalGrid {
    pub fn new(dims: Dims) -> Self {
        Self { gx: 2 * dims.nx + 1, gy: 2 * dims.ny + 1, gz: 2 * dims.nz + 1 }
    }

    pub fn num_cells(&self) -> usize {
        self.gx * self.gy * self.gz
    }

    #[inline]
    pub fn id(&self, a: usize, b: usize, c: usize) -> usize {
        a + self.gx * (b + self.gy * c)
    }

    #[inline]
    pub fn coords(&self, id: usize) -> (usize, usize, usize) {
        let a = id % self.gx;
        let rest = id / self.gx;
        (a, rest % self.gy, rest / self.gy)
    }

    #[inline]
    pub fn dim(&self, id: usize) -> usize {
        let (a, b, c) = self.coords(id);
        (a & 1) + (b & 1) + (c & 1)
    }

    /// Codimension-1 faces of a cell: step by one along each odd axis.
    pub fn boundary(&self, id: usize, out: &mut Vec<usize>) {
        out.clear();
        let (a, b, c) = self.coords(id);
        if a & 1 == 1 {
            out.push(id - 1);
            out.push(id + 1);
        }
        if b & 1 == 1 {
            out.push(id - self.gx);
            out.push(id + self.gx);
        }
        if c & 1 == 1 {
            out.push(id - self.gx * self.gy);
            out.push(id + self.gx * self.gy);
        }
    }

    /// Filtration value of every cell: the minimum over incident voxels.
    pub fn cell_values(&self, v: &Volume3D) -> Vec<f64> {
        let dims = v.dims();
        // Voxel indices adjacent to grid coordinate `g` along one axis.
        let span = |g: usize, n: usize| -> (usize, usize) {
            if g & 1 == 1 {
                let i = (g - 1) / 2;
                (i, i)
            } else {
                let hi = (g / 2).min(n - 1);
                let lo = if g == 0 { 0 } else { g / 2 - 1 };
                (lo, hi)
            }
        };
        let mut values = vec![f64::INFINITY; self.num_cells()];
        for c in 0..self.gz {
            let (z0, z1) = span(c, dims.nz);
            for b in 0..self.gy {
                let (y0, y1) = span(b, dims.ny);
                for a in 0..self.gx {
                    let (x0, x1) = span(a, dims.nx);
                    let mut m = f64::INFINITY;
                    for z in z0..=z1 {
                        for y in y0..=y1 {
                            for x in x0..=x1 {
                                m = m.min(v.get(x, y, z));
                            }
                        }
                    }
                    values[self.id(a, b, c)] = m;
                }
            }
        }
        values
    }
}
