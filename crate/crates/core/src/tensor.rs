//! Dense even-order tensors and the unfold/refold transforms.
//!
//! A tensor of order 2M over half-dimensions (I_1, ..., I_M) is stored as a
//! flat-by-flat grid keyed by the canonical index of the row multi-index and
//! the canonical index of the column multi-index. Unfolding under a pair of
//! bijective index maps rearranges that grid into a matrix; under the
//! canonical maps it is the stored grid itself.
//!
//! Multi-indices, flat indices, and map images are all 1-based at the API
//! boundary.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::exec;
use crate::matrix::Matrix;
use crate::ring::Scalar;

/// Errors for shape, index, and map validation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TensorError {
    #[error("a shape needs at least one half-dimension")]
    EmptyShape,
    #[error("half-dimension {axis} is zero")]
    ZeroDim { axis: usize },
    #[error("flat size overflows the addressable range")]
    TooLarge,
    #[error("index {index} out of range 1..={bound} on axis {axis}")]
    IndexOutOfRange {
        axis: usize,
        index: usize,
        bound: usize,
    },
    #[error("multi-index has {got} components, expected {expected}")]
    WrongArity { got: usize, expected: usize },
    #[error("index map table has {got} images, expected {expected}")]
    WrongTableLength { got: usize, expected: usize },
    #[error("image {image} outside 1..={bound}")]
    ImageOutOfRange { image: usize, bound: usize },
    #[error("duplicate image {image} breaks bijectivity")]
    DuplicateImage { image: usize },
    #[error("axis order must be a permutation of 1..={expected}")]
    BadAxisOrder { expected: usize },
    #[error("index maps disagree on the tensor shape")]
    ShapeMismatch,
    #[error("tensor has {got} entries, expected {expected}")]
    EntryCount { got: usize, expected: usize },
    #[error("matrix is {got_rows}x{got_cols}, expected {expected}x{expected}")]
    DimensionMismatch {
        got_rows: usize,
        got_cols: usize,
        expected: usize,
    },
}

/// Half-shape (I_1, ..., I_M) of an order-2M tensor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Shape {
    half_dims: Vec<usize>,
}

impl Shape {
    pub fn new(half_dims: Vec<usize>) -> Result<Self, TensorError> {
        if half_dims.is_empty() {
            return Err(TensorError::EmptyShape);
        }
        for (k, &dim) in half_dims.iter().enumerate() {
            if dim == 0 {
                return Err(TensorError::ZeroDim { axis: k + 1 });
            }
        }
        let flat = half_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or(TensorError::TooLarge)?;
        flat.checked_mul(flat).ok_or(TensorError::TooLarge)?;
        Ok(Shape { half_dims })
    }

    /// Number of half-axes M.
    pub fn order(&self) -> usize {
        self.half_dims.len()
    }

    pub fn half_dims(&self) -> &[usize] {
        &self.half_dims
    }

    /// Flat range size: the product of the half-dimensions.
    pub fn flat_len(&self) -> usize {
        self.half_dims.iter().product()
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dims = Vec::<usize>::deserialize(deserializer)?;
        Shape::new(dims).map_err(de::Error::custom)
    }
}

/// Canonical strided flat index of a 1-based multi-index:
/// `i_1 + sum_{k>=2} (i_k - 1) * prod_{l<k} I_l`.
pub fn canonical_index(multi_index: &[usize], shape: &Shape) -> Result<usize, TensorError> {
    if multi_index.len() != shape.order() {
        return Err(TensorError::WrongArity {
            got: multi_index.len(),
            expected: shape.order(),
        });
    }
    let mut flat = 1usize;
    let mut stride = 1usize;
    for (k, (&idx, &dim)) in multi_index.iter().zip(shape.half_dims()).enumerate() {
        if idx < 1 || idx > dim {
            return Err(TensorError::IndexOutOfRange {
                axis: k + 1,
                index: idx,
                bound: dim,
            });
        }
        flat += (idx - 1) * stride;
        stride *= dim;
    }
    Ok(flat)
}

/// Multi-index (1-based) at the given canonical enumeration position
/// (0-based), inverse of [`canonical_index`].
fn multi_index_at(position: usize, shape: &Shape) -> Vec<usize> {
    let mut rem = position;
    shape
        .half_dims()
        .iter()
        .map(|&dim| {
            let component = rem % dim + 1;
            rem /= dim;
            component
        })
        .collect()
}

/// Explicit bijection from multi-indices to flat indices `1..=flat_len`.
///
/// `images[j]` is the image of the j-th multi-index in canonical enumeration
/// order (the multi-index whose canonical index is `j + 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnfoldingIndexMap {
    shape: Shape,
    images: Vec<usize>,
}

impl UnfoldingIndexMap {
    /// The canonical map: images are `1, 2, ..., flat_len` in order.
    pub fn canonical(shape: Shape) -> Self {
        let images = (1..=shape.flat_len()).collect();
        UnfoldingIndexMap { shape, images }
    }

    /// Validates that `images` is a bijection onto `1..=flat_len`.
    pub fn from_table(shape: Shape, images: Vec<usize>) -> Result<Self, TensorError> {
        let n = shape.flat_len();
        if images.len() != n {
            return Err(TensorError::WrongTableLength {
                got: images.len(),
                expected: n,
            });
        }
        let mut seen = vec![false; n];
        for &image in &images {
            if image < 1 || image > n {
                return Err(TensorError::ImageOutOfRange { image, bound: n });
            }
            if seen[image - 1] {
                return Err(TensorError::DuplicateImage { image });
            }
            seen[image - 1] = true;
        }
        Ok(UnfoldingIndexMap { shape, images })
    }

    /// Strided map that enumerates axes in the given order (a 1-based
    /// permutation of the axes). The identity order yields the canonical map.
    pub fn axis_permuted(shape: Shape, order: &[usize]) -> Result<Self, TensorError> {
        let m = shape.order();
        let mut seen = vec![false; m];
        if order.len() != m {
            return Err(TensorError::BadAxisOrder { expected: m });
        }
        for &axis in order {
            if axis < 1 || axis > m || seen[axis - 1] {
                return Err(TensorError::BadAxisOrder { expected: m });
            }
            seen[axis - 1] = true;
        }
        let n = shape.flat_len();
        let mut images = Vec::with_capacity(n);
        for pos in 0..n {
            let multi = multi_index_at(pos, &shape);
            let mut image = 1usize;
            let mut stride = 1usize;
            for &axis in order {
                image += (multi[axis - 1] - 1) * stride;
                stride *= shape.half_dims()[axis - 1];
            }
            images.push(image);
        }
        Ok(UnfoldingIndexMap { shape, images })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of a 1-based multi-index under this map.
    pub fn map(&self, multi_index: &[usize]) -> Result<usize, TensorError> {
        let flat = canonical_index(multi_index, &self.shape)?;
        Ok(self.images[flat - 1])
    }

    /// `inverse[image - 1]` = 0-based canonical position mapping to `image`.
    pub(crate) fn inverse_table(&self) -> Vec<usize> {
        let mut inv = vec![0usize; self.images.len()];
        for (pos, &image) in self.images.iter().enumerate() {
            inv[image - 1] = pos;
        }
        inv
    }
}

#[derive(Serialize, Deserialize)]
struct IndexMapRepr {
    half_dims: Vec<usize>,
    images: Vec<usize>,
}

impl Serialize for UnfoldingIndexMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        IndexMapRepr {
            half_dims: self.shape.half_dims().to_vec(),
            images: self.images.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UnfoldingIndexMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = IndexMapRepr::deserialize(deserializer)?;
        let shape = Shape::new(repr.half_dims).map_err(de::Error::custom)?;
        UnfoldingIndexMap::from_table(shape, repr.images).map_err(de::Error::custom)
    }
}

/// Dense order-2M tensor with square shape (I_1,...,I_M,I_1,...,I_M).
///
/// Entry (i, j) for multi-indices i, j lives at
/// `entries[(canonical(i) - 1) * flat_len + (canonical(j) - 1)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor {
    shape: Shape,
    entries: Vec<Scalar>,
}

impl Tensor {
    pub fn new(shape: Shape, entries: Vec<Scalar>) -> Result<Self, TensorError> {
        let n = shape.flat_len();
        let expected = n * n;
        if entries.len() != expected {
            return Err(TensorError::EntryCount {
                got: entries.len(),
                expected,
            });
        }
        Ok(Tensor { shape, entries })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// Entry at a 1-based (row multi-index, column multi-index) pair.
    pub fn get(&self, i: &[usize], j: &[usize]) -> Result<&Scalar, TensorError> {
        let r = canonical_index(i, &self.shape)?;
        let c = canonical_index(j, &self.shape)?;
        Ok(&self.entries[(r - 1) * self.shape.flat_len() + (c - 1)])
    }
}

#[derive(Serialize, Deserialize)]
struct TensorRepr {
    half_dims: Vec<usize>,
    entries: Vec<Scalar>,
}

impl Serialize for Tensor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TensorRepr {
            half_dims: self.shape.half_dims().to_vec(),
            entries: self.entries.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Tensor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = TensorRepr::deserialize(deserializer)?;
        let shape = Shape::new(repr.half_dims).map_err(de::Error::custom)?;
        Tensor::new(shape, repr.entries).map_err(de::Error::custom)
    }
}

/// Unfolds a tensor into the flat_len x flat_len matrix with
/// `B[psi_r(i), psi_c(j)] = b_(i,j)`.
pub fn unfold(
    t: &Tensor,
    row_map: &UnfoldingIndexMap,
    col_map: &UnfoldingIndexMap,
) -> Result<Matrix, TensorError> {
    if row_map.shape() != t.shape() || col_map.shape() != t.shape() {
        return Err(TensorError::ShapeMismatch);
    }
    let n = t.shape().flat_len();
    let inv_r = row_map.inverse_table();
    let inv_c = col_map.inverse_table();
    let entries = t.entries();
    let data = exec::flat_rows(n, |r| {
        let src_row = inv_r[r];
        (0..n)
            .map(|c| entries[src_row * n + inv_c[c]].clone())
            .collect()
    });
    Ok(Matrix::from_flat(n, n, data))
}

/// Inverse of [`unfold`]: rebuilds the tensor whose unfolding under the
/// given maps is `m`.
pub fn refold(
    m: &Matrix,
    row_map: &UnfoldingIndexMap,
    col_map: &UnfoldingIndexMap,
) -> Result<Tensor, TensorError> {
    if row_map.shape() != col_map.shape() {
        return Err(TensorError::ShapeMismatch);
    }
    let n = row_map.shape().flat_len();
    if m.shape() != (n, n) {
        return Err(TensorError::DimensionMismatch {
            got_rows: m.nrows(),
            got_cols: m.ncols(),
            expected: n,
        });
    }
    let row_images = row_map.images();
    let col_images = col_map.images();
    let entries = exec::flat_rows(n, |a| {
        let r = row_images[a] - 1;
        (0..n)
            .map(|b| m.get(r, col_images[b] - 1).clone())
            .collect()
    });
    Tensor::new(row_map.shape().clone(), entries)
}
