//! Exact counting: combinations with repetition, the equivalence-class count
//! formula, partition numbers, and their asymptotics.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Zero};

use crate::bigfloat::BigFloat;

/// Exact nonnegative count; arbitrary precision.
pub type BigCount = BigUint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CombinatoricsError {
    #[error("combination with repetition needs at least one variable")]
    ZeroVariables,
}

/// Binomial coefficient C(n, k).
pub fn binomial(n: u64, k: u64) -> BigCount {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Combinations with repetition `H_n^r = C(n + r - 1, n)`: the number of
/// nonnegative integer solutions of `r` variables summing to `n`.
pub fn comb_with_repetition(n: u64, r: u64) -> Result<BigCount, CombinatoricsError> {
    if r == 0 {
        return Err(CombinatoricsError::ZeroVariables);
    }
    Ok(binomial(n + r - 1, n))
}

/// Number of equivalence classes with `num_primes` nonassociated primes:
/// `(sum_{k=0}^{size} H_(size-1)^(k+1)) ^ num_primes`, evaluated literally.
/// Equals `C(2*size, size) ^ num_primes` in closed form.
pub fn class_count_formula(size: u64, num_primes: u64) -> BigCount {
    assert!(size >= 1, "class size must be at least 1");
    let mut base = BigUint::zero();
    for k in 0..=size {
        base += comb_with_repetition(size - 1, k + 1).expect("k + 1 >= 1");
    }
    base.pow(num_primes)
}

/// Partition number p(n) by the pentagonal-number recurrence.
pub fn partition_number(n: u64) -> BigCount {
    let n = usize::try_from(n).expect("partition argument fits usize");
    let mut table: Vec<BigUint> = Vec::with_capacity(n + 1);
    table.push(BigUint::one());
    for i in 1..=n {
        let mut acc = BigInt::zero();
        let mut k = 1usize;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > i {
                break;
            }
            let sign_positive = k % 2 == 1;
            let mut contribution = BigInt::from(table[i - g1].clone());
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= i {
                contribution += BigInt::from(table[i - g2].clone());
            }
            if sign_positive {
                acc += contribution;
            } else {
                acc -= contribution;
            }
            k += 1;
        }
        table.push(acc.try_into().expect("partition numbers are nonnegative"));
    }
    table.pop().expect("table is nonempty")
}

/// Hardy-Ramanujan leading term
/// `exp(sqrt(2 pi^2 n / 3)) / (4 sqrt(3) n)`, evaluated in high precision.
pub fn partition_asymptotic(n: u64) -> BigFloat {
    assert!(n >= 1, "asymptotic argument must be positive");
    let n_f = BigFloat::from_u64(n);
    let pi = BigFloat::pi();
    let arg = pi
        .mul(&pi)
        .mul(&n_f)
        .mul(&BigFloat::from_u64(2))
        .div(&BigFloat::from_u64(3))
        .sqrt();
    let denom = BigFloat::from_u64(4)
        .mul(&BigFloat::from_u64(3).sqrt())
        .mul(&n_f);
    arg.exp().div(&denom)
}

/// Squared-count asymptotic `exp(2 sqrt(2 pi^2 n / 3)) / (48 n^2)`, evaluated
/// from its own formula.
fn squared_partition_asymptotic(n: u64) -> BigFloat {
    let n_f = BigFloat::from_u64(n);
    let pi = BigFloat::pi();
    let arg = pi
        .mul(&pi)
        .mul(&n_f)
        .mul(&BigFloat::from_u64(2))
        .div(&BigFloat::from_u64(3))
        .sqrt()
        .mul(&BigFloat::from_u64(2));
    let denom = BigFloat::from_u64(48).mul(&n_f).mul(&n_f);
    arg.exp().div(&denom)
}

/// Permutation-similarity class counts for flat size `size`: exact partition
/// counts and their asymptotics, for shared and independent row/column maps.
#[derive(Debug, Clone)]
pub struct PermutationClassCounts {
    pub same_map_exact: BigCount,
    pub same_map_asymptotic: BigFloat,
    pub diff_map_exact: BigCount,
    pub diff_map_asymptotic: BigFloat,
}

pub fn permutation_class_counts(size: u64) -> PermutationClassCounts {
    assert!(size >= 1, "flat size must be positive");
    let exact = partition_number(size);
    PermutationClassCounts {
        same_map_exact: exact.clone(),
        same_map_asymptotic: partition_asymptotic(size),
        diff_map_exact: &exact * &exact,
        diff_map_asymptotic: squared_partition_asymptotic(size),
    }
}
