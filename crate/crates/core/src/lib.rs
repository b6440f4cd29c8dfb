//! Exact-arithmetic toolkit for unfolding even-order tensors into matrices,
//! verifying the spectrum relations between unfoldings, and analyzing
//! integer-matrix equivalence via Smith normal forms, p-local forms, class
//! fingerprints, and class-counting formulas.
//!
//! All core arithmetic is exact (arbitrary-precision rationals); floating
//! point appears only in the numeric root finder and residual checks.
//!
//! The `parallel` feature (on by default) runs the data-parallel kernels
//! (unfolding, matrix products, Kronecker products, batch decompositions,
//! root sweeps) on rayon; disabling it yields a dependency-free sequential
//! build with bit-identical results.

pub mod bigfloat;
pub mod classes;
pub mod combinatorics;
mod exec;
pub mod matrix;
pub mod permutation;
pub mod ring;
pub mod smith;
pub mod spectral;
pub mod tensor;

pub use bigfloat::BigFloat;
pub use classes::{
    direct_sum, enumerate_local_classes, fingerprint, fingerprint_p, kronecker_product,
    ClassFingerprint,
};
pub use combinatorics::{
    class_count_formula, comb_with_repetition, partition_asymptotic, partition_number,
    permutation_class_counts, BigCount, PermutationClassCounts,
};
pub use matrix::Matrix;
pub use permutation::{conjugate, permutation_between, PermutationMatrix};
pub use ring::{bezout_gcd, in_localization, ord_p, Prime, Scalar, Valuation};
pub use smith::{
    equivalent, equivalent_local, local_global_reconstruct, local_smith_form, prime_support,
    smith_normal_form, smith_normal_form_batch, LocalSmithForm, SmithDecomposition,
};
pub use spectral::{
    char_poly, eigen_residual, poly_roots, verify_spectrum_relations, CharPoly, ComplexApprox,
    SpectrumReport,
};
pub use tensor::{canonical_index, refold, unfold, Shape, Tensor, UnfoldingIndexMap};
