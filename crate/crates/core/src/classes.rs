//! The equivalence-class semiring: direct sums and Kronecker products of
//! class representatives, the fingerprint homomorphism into per-prime
//! counting polynomials, and a brute-force enumerator of local classes.
//!
//! The fingerprint of a matrix at a prime p is the polynomial
//! `sum_k n_(p,k) x^k` where `n_(p,k)` counts invariant factors with p-adic
//! valuation k. Fingerprints add coefficientwise under direct sum and
//! multiply as polynomials under Kronecker product.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::exec;
use crate::matrix::Matrix;
use crate::ring::{Prime, Scalar};
use crate::smith::{local_form_of, smith_normal_form, SmithError};

/// Block-diagonal concatenation; sizes add.
pub fn direct_sum(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    Matrix::from_fn(ar + br, ac + bc, |r, c| {
        if r < ar && c < ac {
            a.get(r, c).clone()
        } else if r >= ar && c >= ac {
            b.get(r - ar, c - ac).clone()
        } else {
            Scalar::zero()
        }
    })
}

/// Kronecker product: the (i, j) block of the result is `a[i][j] * b`.
pub fn kronecker_product(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let cols = ac * bc;
    let data = exec::flat_rows(ar * br, |r| {
        let (ia, ib) = (r / br, r % br);
        let mut row = Vec::with_capacity(cols);
        for ja in 0..ac {
            let left = a.get(ia, ja);
            for jb in 0..bc {
                row.push(left * b.get(ib, jb));
            }
        }
        row
    });
    Matrix::from_flat(ar * br, ac * bc, data)
}

fn coefficients_from_exponents(exponents: &[u64]) -> Vec<u64> {
    match exponents.iter().max() {
        None => Vec::new(),
        Some(&max) => {
            let mut coeffs = vec![0u64; max as usize + 1];
            for &e in exponents {
                coeffs[e as usize] += 1;
            }
            coeffs
        }
    }
}

/// Counting polynomial of `a` at `p`: coefficient k is the number of
/// invariant factors with p-adic valuation k. Dense from degree 0, no
/// trailing zeros; empty for the zero matrix.
pub fn fingerprint_p(a: &Matrix, p: &Prime) -> Result<Vec<u64>, SmithError> {
    let snf = smith_normal_form(a)?;
    Ok(coefficients_from_exponents(local_form_of(&snf, p).exponents()))
}

/// The full fingerprint: per-prime counting polynomials over the prime
/// support, plus rank and size. Primes whose polynomial is the constant
/// `rank` (every exponent zero) are omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFingerprint {
    size: usize,
    rank: usize,
    components: BTreeMap<BigUint, Vec<u64>>,
}

impl ClassFingerprint {
    /// Diagonal slot count of the source matrix: min(rows, cols).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Prime -> coefficient list, ascending by prime.
    pub fn components(&self) -> &BTreeMap<BigUint, Vec<u64>> {
        &self.components
    }
}

impl Serialize for ClassFingerprint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            size: usize,
            rank: usize,
            components: ComponentsRepr<'a>,
        }
        struct ComponentsRepr<'a>(&'a BTreeMap<BigUint, Vec<u64>>);
        impl Serialize for ComponentsRepr<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (prime, coeffs) in self.0 {
                    map.serialize_entry(&prime.to_string(), coeffs)?;
                }
                map.end()
            }
        }
        Repr {
            size: self.size,
            rank: self.rank,
            components: ComponentsRepr(&self.components),
        }
        .serialize(serializer)
    }
}

/// Fingerprint over the full prime support of `a`.
pub fn fingerprint(a: &Matrix) -> Result<ClassFingerprint, SmithError> {
    let snf = smith_normal_form(a)?;
    let mut components = BTreeMap::new();
    for p in snf.prime_support()? {
        // support primes divide the last invariant factor, so their
        // polynomial is never the omitted constant
        let local = local_form_of(&snf, &p);
        components.insert(
            p.value().clone(),
            coefficients_from_exponents(local.exponents()),
        );
    }
    Ok(ClassFingerprint {
        size: snf.size(),
        rank: snf.rank(),
        components,
    })
}

/// Streams every nondecreasing length-n exponent sequence over `0..=cap`,
/// each the exponent list of a distinct full-rank local class. Yields
/// `C(n + cap, n)` sequences in lexicographic order.
pub fn enumerate_local_classes(n: usize, cap: u64) -> LocalClassIter {
    assert!(n >= 1, "class size must be at least 1");
    LocalClassIter {
        next: Some(vec![0; n]),
        cap,
    }
}

pub struct LocalClassIter {
    next: Option<Vec<u64>>,
    cap: u64,
}

impl Iterator for LocalClassIter {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        // successor: bump the rightmost entry below cap, then level the tail
        let mut succ = current.clone();
        let mut pos = succ.len();
        while pos > 0 {
            if succ[pos - 1] < self.cap {
                let bumped = succ[pos - 1] + 1;
                for slot in succ.iter_mut().skip(pos - 1) {
                    *slot = bumped;
                }
                self.next = Some(succ);
                return Some(current);
            }
            pos -= 1;
        }
        Some(current)
    }
}
