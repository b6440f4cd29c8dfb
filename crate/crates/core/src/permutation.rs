//! Permutation matrices relating two unfoldings, and conjugation by them.
//!
//! A permutation is stored as its index array and materialized to a 0/1
//! matrix only at API boundaries, so conjugation is an O(n^2) entry
//! relabeling instead of two O(n^3) products.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::matrix::Matrix;
use crate::ring::Scalar;
use crate::tensor::UnfoldingIndexMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermutationError {
    #[error("images are not a bijection on 1..={size}")]
    InvalidImages { size: usize },
    #[error("matrix is {got_rows}x{got_cols}, expected square of size {expected}")]
    SizeMismatch {
        got_rows: usize,
        got_cols: usize,
        expected: usize,
    },
    #[error("index maps disagree on the tensor shape")]
    ShapeMismatch,
}

/// Permutation matrix `P` with `P[i, j] = 1` iff `i = images(j)`:
/// `images(j)` is the 1-based row index of the 1 in column `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationMatrix {
    images: Vec<usize>,
}

impl PermutationMatrix {
    pub fn identity(n: usize) -> Self {
        PermutationMatrix {
            images: (1..=n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermutationError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &image in &images {
            if image < 1 || image > n || seen[image - 1] {
                return Err(PermutationError::InvalidImages { size: n });
            }
            seen[image - 1] = true;
        }
        Ok(PermutationMatrix { images })
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    /// 1-based image array: `images()[j - 1]` is the row of the 1 in column j.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Inverse permutation; equals the transpose as a matrix.
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.images.len()];
        for (col, &row) in self.images.iter().enumerate() {
            inv[row - 1] = col + 1;
        }
        PermutationMatrix { images: inv }
    }

    pub fn transpose(&self) -> Self {
        self.inverse()
    }

    /// Matrix product `self * rhs` as a permutation.
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.size(), rhs.size(), "composing permutations of different size");
        let images = rhs.images.iter().map(|&j| self.images[j - 1]).collect();
        PermutationMatrix { images }
    }

    /// Materializes the 0/1 matrix.
    pub fn to_matrix(&self) -> Matrix {
        let n = self.size();
        let mut m = Matrix::zeros(n, n);
        for (col, &row) in self.images.iter().enumerate() {
            m.set_entry(row - 1, col, Scalar::one());
        }
        m
    }

    /// `P^-1 * m`: row `r` of the result is row `images(r)` of `m`.
    pub fn left_mul_inverse(&self, m: &Matrix) -> Result<Matrix, PermutationError> {
        self.check_size(m)?;
        Ok(Matrix::from_fn(m.nrows(), m.ncols(), |r, c| {
            m.get(self.images[r] - 1, c).clone()
        }))
    }

    /// `m * P`: column `c` of the result is column `images(c)` of `m`.
    pub fn right_mul(&self, m: &Matrix) -> Result<Matrix, PermutationError> {
        self.check_cols(m)?;
        Ok(Matrix::from_fn(m.nrows(), m.ncols(), |r, c| {
            m.get(r, self.images[c] - 1).clone()
        }))
    }

    /// `m * P^-1`.
    pub fn right_mul_inverse(&self, m: &Matrix) -> Result<Matrix, PermutationError> {
        self.inverse().right_mul(m)
    }

    /// `P^-1 v` for any cloneable component type: entry `a` of the result is
    /// `v[images(a)]`.
    pub fn apply_inverse_to_vec<T: Clone>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.size(), "vector length mismatch");
        self.images.iter().map(|&row| v[row - 1].clone()).collect()
    }

    /// `P v`: the entry at index `images(k)` of the result is `v[k]`.
    pub fn apply_to_vec<T: Clone>(&self, v: &[T]) -> Vec<T> {
        self.inverse().apply_inverse_to_vec(v)
    }

    fn check_size(&self, m: &Matrix) -> Result<(), PermutationError> {
        if m.nrows() != self.size() {
            return Err(PermutationError::SizeMismatch {
                got_rows: m.nrows(),
                got_cols: m.ncols(),
                expected: self.size(),
            });
        }
        Ok(())
    }

    fn check_cols(&self, m: &Matrix) -> Result<(), PermutationError> {
        if m.ncols() != self.size() {
            return Err(PermutationError::SizeMismatch {
                got_rows: m.nrows(),
                got_cols: m.ncols(),
                expected: self.size(),
            });
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PermutationRepr {
    images: Vec<usize>,
}

impl Serialize for PermutationMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PermutationRepr {
            images: self.images.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PermutationMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PermutationRepr::deserialize(deserializer)?;
        PermutationMatrix::from_images(repr.images).map_err(de::Error::custom)
    }
}

/// The permutation matrix `P` taking the unfolding under `from_map` to the
/// unfolding under `to_map`: for every tensor `t`,
/// `unfold(t, to, to) = P^-1 * unfold(t, from, from) * P`.
pub fn permutation_between(
    from_map: &UnfoldingIndexMap,
    to_map: &UnfoldingIndexMap,
) -> Result<PermutationMatrix, PermutationError> {
    if from_map.shape() != to_map.shape() {
        return Err(PermutationError::ShapeMismatch);
    }
    let n = from_map.shape().flat_len();
    let mut images = vec![0usize; n];
    for (&from_img, &to_img) in from_map.images().iter().zip(to_map.images()) {
        images[to_img - 1] = from_img;
    }
    Ok(PermutationMatrix { images })
}

/// Exact conjugation `P^-1 * b * P` by entry relabeling.
pub fn conjugate(b: &Matrix, p: &PermutationMatrix) -> Result<Matrix, PermutationError> {
    let n = p.size();
    if b.shape() != (n, n) {
        return Err(PermutationError::SizeMismatch {
            got_rows: b.nrows(),
            got_cols: b.ncols(),
            expected: n,
        });
    }
    let images = p.images();
    Ok(Matrix::from_fn(n, n, |r, c| {
        b.get(images[r] - 1, images[c] - 1).clone()
    }))
}

/// `Q^-1 * a * P`, the two-sided equivalence transform.
pub fn two_sided_transform(
    a: &Matrix,
    q: &PermutationMatrix,
    p: &PermutationMatrix,
) -> Result<Matrix, PermutationError> {
    let m = q.left_mul_inverse(a)?;
    p.right_mul(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape;

    fn perm(images: &[usize]) -> PermutationMatrix {
        PermutationMatrix::from_images(images.to_vec()).unwrap()
    }

    #[test]
    fn from_images_validation() {
        assert!(PermutationMatrix::from_images(vec![2, 1, 3]).is_ok());
        assert!(PermutationMatrix::from_images(vec![1, 1, 3]).is_err());
        assert!(PermutationMatrix::from_images(vec![0, 1]).is_err());
        assert!(PermutationMatrix::from_images(vec![1, 3]).is_err());
    }

    #[test]
    fn transpose_is_inverse() {
        let p = perm(&[4, 1, 3, 2]);
        let pt = p.transpose().to_matrix();
        let pm = p.to_matrix();
        assert_eq!(pt.mul(&pm), Matrix::identity(4));
        assert_eq!(pm.mul(&pt), Matrix::identity(4));
    }

    #[test]
    fn between_identical_maps_is_identity() {
        let shape = Shape::new(vec![2, 2]).unwrap();
        let map = UnfoldingIndexMap::from_table(shape, vec![3, 1, 4, 2]).unwrap();
        assert_eq!(
            permutation_between(&map, &map).unwrap(),
            PermutationMatrix::identity(4)
        );
    }

    #[test]
    fn between_is_antisymmetric() {
        let shape = Shape::new(vec![2, 2]).unwrap();
        let a = UnfoldingIndexMap::from_table(shape.clone(), vec![2, 4, 3, 1]).unwrap();
        let b = UnfoldingIndexMap::from_table(shape, vec![3, 1, 4, 2]).unwrap();
        let fwd = permutation_between(&a, &b).unwrap();
        let back = permutation_between(&b, &a).unwrap();
        assert_eq!(back, fwd.inverse());
    }

    #[test]
    fn between_composes_along_a_chain() {
        let shape = Shape::new(vec![2, 2]).unwrap();
        let a = UnfoldingIndexMap::from_table(shape.clone(), vec![1, 2, 3, 4]).unwrap();
        let b = UnfoldingIndexMap::from_table(shape.clone(), vec![2, 4, 3, 1]).unwrap();
        let c = UnfoldingIndexMap::from_table(shape, vec![4, 3, 2, 1]).unwrap();
        let ab = permutation_between(&a, &b).unwrap();
        let bc = permutation_between(&b, &c).unwrap();
        let ac = permutation_between(&a, &c).unwrap();
        assert_eq!(ab.compose(&bc), ac);
        assert_eq!(
            ab.to_matrix().mul(&bc.to_matrix()),
            ac.to_matrix()
        );
    }

    #[test]
    fn conjugate_by_identity() {
        let b = Matrix::from_int_rows(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(conjugate(&b, &PermutationMatrix::identity(2)).unwrap(), b);
    }

    #[test]
    fn conjugate_roundtrip_and_multiset() {
        let b = Matrix::from_int_rows(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        let p = perm(&[3, 1, 2]);
        let conj = conjugate(&b, &p).unwrap();
        // equals the materialized product
        let expect = p
            .to_matrix()
            .transpose()
            .mul(&b)
            .mul(&p.to_matrix());
        assert_eq!(conj, expect);
        // inverse roundtrip
        assert_eq!(conjugate(&conj, &p.inverse()).unwrap(), b);
        // entry multiset is preserved
        let mut got = conj.entries().to_vec();
        let mut want = b.entries().to_vec();
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn conjugate_size_mismatch() {
        let b = Matrix::zeros(2, 3);
        let p = PermutationMatrix::identity(2);
        assert!(matches!(
            conjugate(&b, &p).unwrap_err(),
            PermutationError::SizeMismatch { .. }
        ));
    }

    #[test]
    fn side_products_match_materialized() {
        let a = Matrix::from_int_rows(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        let p = perm(&[2, 3, 1]);
        let q = perm(&[3, 2, 1]);
        let pm = p.to_matrix();
        let qm = q.to_matrix();
        assert_eq!(
            q.left_mul_inverse(&a).unwrap(),
            qm.transpose().mul(&a)
        );
        assert_eq!(p.right_mul(&a).unwrap(), a.mul(&pm));
        assert_eq!(p.right_mul_inverse(&a).unwrap(), a.mul(&pm.transpose()));
        assert_eq!(
            two_sided_transform(&a, &q, &p).unwrap(),
            qm.transpose().mul(&a).mul(&pm)
        );
    }

    #[test]
    fn vector_application() {
        let p = perm(&[4, 1, 3, 2]);
        let v = [10, 20, 30, 40];
        assert_eq!(p.apply_inverse_to_vec(&v), vec![40, 10, 30, 20]);
        assert_eq!(p.apply_to_vec(&p.apply_inverse_to_vec(&v)), v.to_vec());
    }

    #[test]
    fn json_shape() {
        let p = perm(&[2, 1]);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"images":[2,1]}"#);
        let bad: Result<PermutationMatrix, _> = serde_json::from_str(r#"{"images":[2,2]}"#);
        assert!(bad.is_err());
    }
}
