//! Randomized invariants: ring laws, unfold/refold bijectivity, Smith
//! decomposition soundness, local-global agreement, fingerprint
//! homomorphism laws, and the counting cross-checks.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tenfold::classes::{direct_sum, enumerate_local_classes, fingerprint_p, kronecker_product};
use tenfold::combinatorics::{class_count_formula, partition_number};
use tenfold::ring::{bezout_gcd, in_localization, ord_p, Prime, Scalar, Valuation};
use tenfold::smith::{
    equivalent, equivalent_local, local_form_of, local_global_reconstruct, smith_normal_form,
};
use tenfold::spectral::char_poly;
use tenfold::tensor::{refold, unfold, Shape, Tensor, UnfoldingIndexMap};
use tenfold::Matrix;

// ---------------------------------------------------------------- ring laws

proptest! {
    #[test]
    fn bezout_identity_holds(a in -10_000i64..=10_000, b in -10_000i64..=10_000) {
        let (ab, bb) = (BigInt::from(a), BigInt::from(b));
        let (g, u, v) = bezout_gcd(&ab, &bb);
        prop_assert!(!g.is_negative());
        prop_assert_eq!(&u * &ab + &v * &bb, g.clone());
        if a != 0 || b != 0 {
            prop_assert!((&ab % &g).is_zero());
            prop_assert!((&bb % &g).is_zero());
        }
    }

    #[test]
    fn ord_is_a_valuation(
        num1 in -500i64..=500, den1 in 1i64..=60,
        num2 in -500i64..=500, den2 in 1i64..=60,
        pick in 0usize..3,
    ) {
        let p = Prime::from_u64([2, 3, 5][pick]).unwrap();
        let f = Scalar::new(num1.into(), den1.into()).unwrap();
        let g = Scalar::new(num2.into(), den2.into()).unwrap();
        // multiplicativity
        let product_ord = ord_p(&(&f * &g), &p);
        let expected = match (ord_p(&f, &p), ord_p(&g, &p)) {
            (Valuation::Finite(x), Valuation::Finite(y)) => Valuation::Finite(x + y),
            _ => Valuation::Infinite,
        };
        prop_assert_eq!(product_ord, expected);
        // ultrametric inequality
        let sum_ord = ord_p(&(&f + &g), &p);
        let min = ord_p(&f, &p).min(ord_p(&g, &p));
        prop_assert!(sum_ord >= min);
        // localization membership is the sign of the valuation
        prop_assert_eq!(in_localization(&f, &p), ord_p(&f, &p) >= Valuation::Finite(0));
    }
}

// ------------------------------------------------------- unfolding round trip

fn arb_shape() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn unfold_is_a_bijection(
        dims in arb_shape(),
        seed in any::<u64>(),
    ) {
        let shape = Shape::new(dims).unwrap();
        let n = shape.flat_len();
        let mut rng = StdRng::seed_from_u64(seed);
        let entries: Vec<Scalar> = (0..n * n)
            .map(|_| Scalar::from_integer(rng.random_range(-9i64..=9)))
            .collect();
        let tensor = Tensor::new(shape.clone(), entries.clone()).unwrap();

        let random_map = |rng: &mut StdRng| {
            let mut images: Vec<usize> = (1..=n).collect();
            for i in (1..n).rev() {
                images.swap(i, rng.random_range(0..=i));
            }
            UnfoldingIndexMap::from_table(shape.clone(), images).unwrap()
        };
        let rmap = random_map(&mut rng);
        let cmap = random_map(&mut rng);
        let unfolded = unfold(&tensor, &rmap, &cmap).unwrap();
        prop_assert_eq!(refold(&unfolded, &rmap, &cmap).unwrap(), tensor.clone());

        // a second map pair permutes entries only
        let rmap2 = random_map(&mut rng);
        let cmap2 = random_map(&mut rng);
        let other = unfold(&tensor, &rmap2, &cmap2).unwrap();
        let mut lhs = unfolded.entries().to_vec();
        let mut rhs = other.entries().to_vec();
        lhs.sort();
        rhs.sort();
        prop_assert_eq!(lhs, rhs);
    }
}

// ------------------------------------------------------------ random matrices

fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize, bound: i64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        Scalar::from_integer(rng.random_range(-bound..=bound))
    })
}

/// Random unimodular matrix together with its exact inverse, built from
/// elementary operations.
fn random_unimodular(rng: &mut StdRng, n: usize) -> (Matrix, Matrix) {
    let mut m = Matrix::identity(n);
    let mut minv = Matrix::identity(n);
    for _ in 0..3 * n {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n);
        while j == i {
            j = rng.random_range(0..n);
        }
        let q = Scalar::from_integer(rng.random_range(-3i64..=3));
        // m <- E m with E = I + q e_i e_j^T; minv <- minv E^-1
        let mut next = m.clone();
        for c in 0..n {
            let v = next.get(i, c) + &q * m.get(j, c);
            next.set_entry(i, c, v);
        }
        m = next;
        let mut next_inv = minv.clone();
        for r in 0..n {
            let v = next_inv.get(r, j) - &q * minv.get(r, i);
            next_inv.set_entry(r, j, v);
        }
        minv = next_inv;
    }
    (m, minv)
}

#[test]
fn smith_decomposition_soundness() {
    let mut rng = StdRng::seed_from_u64(0xA11CE);
    for round in 0..120 {
        let rows = rng.random_range(1..=6);
        let cols = rng.random_range(1..=6);
        let a = random_matrix(&mut rng, rows, cols, 20);
        let snf = smith_normal_form(&a).expect("integral input");
        // U * A * V = S is asserted inside the constructor; check shape facts
        assert_eq!(snf.u().mul(&a).mul(snf.v()), *snf.s(), "round {round}");
        assert_eq!(snf.u().det().abs(), Scalar::one());
        assert_eq!(snf.v().det().abs(), Scalar::one());
        let factors = snf.invariant_factors();
        for w in factors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "chain broken: {factors:?}");
        }
        if rows == cols {
            let product = factors
                .iter()
                .fold(BigInt::from(1), |acc, d| acc * d);
            let det = a.det().to_integer().unwrap();
            if det.is_zero() {
                assert!(snf.rank() < rows);
            } else {
                assert_eq!(product, det.abs());
            }
        }
    }
}

#[test]
fn local_global_agreement() {
    let mut rng = StdRng::seed_from_u64(0xBEEF);
    for round in 0..60 {
        let n = rng.random_range(1..=5);
        let a = random_matrix(&mut rng, n, n, 12);
        // half the rounds compare against an equivalent-by-construction mate
        let b = if round % 2 == 0 {
            let (e, _) = random_unimodular(&mut rng, n);
            let (f, _) = random_unimodular(&mut rng, n);
            e.mul(&a).mul(&f)
        } else {
            random_matrix(&mut rng, n, n, 12)
        };
        let snf_a = smith_normal_form(&a).unwrap();
        let snf_b = smith_normal_form(&b).unwrap();
        let mut support = snf_a.prime_support().unwrap();
        for p in snf_b.prime_support().unwrap() {
            if !support.contains(&p) {
                support.push(p);
            }
        }
        let global = equivalent(&a, &b).unwrap();
        let local_all = support
            .iter()
            .map(|p| equivalent_local(&a, &b, p).unwrap())
            .all(|ok| ok)
            && snf_a.rank() == snf_b.rank();
        assert_eq!(global, local_all, "round {round}");

        // reconstruction over the full support reproduces the diagonal
        let locals: Vec<_> = snf_a
            .prime_support()
            .unwrap()
            .iter()
            .map(|p| local_form_of(&snf_a, p))
            .collect();
        let rebuilt =
            local_global_reconstruct(&locals, snf_a.rank(), snf_a.size()).unwrap();
        for i in 0..snf_a.size() {
            assert_eq!(rebuilt.get(i, i), snf_a.s().get(i, i), "slot {i}");
        }
    }
}

#[test]
fn fingerprint_homomorphism_laws() {
    let mut rng = StdRng::seed_from_u64(0xF1A9);
    for round in 0..60 {
        let n1 = rng.random_range(1..=3);
        let n2 = rng.random_range(1..=3);
        let a = random_matrix(&mut rng, n1, n1, 9);
        let b = random_matrix(&mut rng, n2, n2, 9);
        let sum = direct_sum(&a, &b);
        let product = kronecker_product(&a, &b);

        let mut support = smith_normal_form(&sum).unwrap().prime_support().unwrap();
        for p in smith_normal_form(&product)
            .unwrap()
            .prime_support()
            .unwrap()
        {
            if !support.contains(&p) {
                support.push(p);
            }
        }

        for p in &support {
            let fa = fingerprint_p(&a, p).unwrap();
            let fb = fingerprint_p(&b, p).unwrap();
            // additivity: coefficientwise sum
            let fsum = fingerprint_p(&sum, p).unwrap();
            let mut expected = vec![0u64; fa.len().max(fb.len())];
            for (k, &c) in fa.iter().enumerate() {
                expected[k] += c;
            }
            for (k, &c) in fb.iter().enumerate() {
                expected[k] += c;
            }
            while expected.last() == Some(&0) {
                expected.pop();
            }
            assert_eq!(fsum, expected, "additivity, round {round} p {p}");

            // multiplicativity: polynomial product
            let fprod = fingerprint_p(&product, p).unwrap();
            let mut conv = vec![
                0u64;
                (fa.len() + fb.len()).saturating_sub(1).max(
                    usize::from(fa.is_empty() || fb.is_empty())
                )
            ];
            if fa.is_empty() || fb.is_empty() {
                conv.clear();
            } else {
                for (i, &x) in fa.iter().enumerate() {
                    for (j, &y) in fb.iter().enumerate() {
                        conv[i + j] += x * y;
                    }
                }
            }
            while conv.last() == Some(&0) {
                conv.pop();
            }
            assert_eq!(fprod, conv, "multiplicativity, round {round} p {p}");
        }
    }
}

#[test]
fn char_poly_is_conjugation_invariant() {
    let mut rng = StdRng::seed_from_u64(0xC0DE);
    for _ in 0..25 {
        let n = rng.random_range(1..=4);
        let a = random_matrix(&mut rng, n, n, 8);
        let (m, minv) = random_unimodular(&mut rng, n);
        let conjugated = minv.mul(&a).mul(&m);
        assert_eq!(char_poly(&a).unwrap(), char_poly(&conjugated).unwrap());
    }
}

// ------------------------------------------------ test-only cofactor oracle

type Poly = Vec<Scalar>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Scalar::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let delta = x * y;
            out[i + j] += delta;
        }
    }
    out
}

fn poly_add_assign(acc: &mut Poly, other: &Poly, negate: bool) {
    if acc.len() < other.len() {
        acc.resize(other.len(), Scalar::zero());
    }
    for (k, c) in other.iter().enumerate() {
        if negate {
            acc[k] -= c;
        } else {
            acc[k] += c;
        }
    }
}

/// Determinant of a polynomial matrix by Laplace expansion on the first row.
fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return vec![Scalar::one()];
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc: Poly = Vec::new();
    for col in 0..n {
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = poly_mul(&m[0][col], &poly_det(&minor));
        poly_add_assign(&mut acc, &term, col % 2 == 1);
    }
    acc
}

#[test]
fn char_poly_matches_cofactor_expansion() {
    let mut rng = StdRng::seed_from_u64(0x0AC1E);
    for _ in 0..40 {
        let n = 3;
        let a = Matrix::from_fn(n, n, |_, _| {
            Scalar::new(
                rng.random_range(-9i64..=9).into(),
                rng.random_range(1i64..=5).into(),
            )
            .unwrap()
        });
        // xI - A as a matrix of polynomials
        let xi_minus_a: Vec<Vec<Poly>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        if r == c {
                            vec![-a.get(r, c), Scalar::one()]
                        } else {
                            vec![-a.get(r, c)]
                        }
                    })
                    .collect()
            })
            .collect();
        let mut oracle = poly_det(&xi_minus_a);
        while oracle.last().map(Scalar::is_zero) == Some(true) {
            oracle.pop();
        }
        let fast = char_poly(&a).unwrap();
        assert_eq!(fast.coefficients(), &oracle[..]);
    }
}

// ----------------------------------------------------------- counting checks

#[test]
fn partition_recurrences_agree() {
    // coin-style dynamic program as an independent oracle
    let limit = 60usize;
    let mut dp = vec![num_bigint::BigUint::ZERO; limit + 1];
    dp[0] = num_bigint::BigUint::from(1u32);
    for part in 1..=limit {
        for total in part..=limit {
            let add = dp[total - part].clone();
            dp[total] += add;
        }
    }
    for n in 0..=limit {
        assert_eq!(partition_number(n as u64), dp[n], "p({n})");
    }
}

#[test]
fn partition_matches_brute_force_enumeration() {
    fn count(remaining: u64, max_part: u64) -> u64 {
        if remaining == 0 {
            return 1;
        }
        (1..=max_part.min(remaining))
            .map(|p| count(remaining - p, p))
            .sum()
    }
    for n in 1..=30u64 {
        assert_eq!(partition_number(n).to_u64().unwrap(), count(n, n), "p({n})");
    }
}

#[test]
fn enumerator_counts_match_class_formula() {
    for size in 1..=5usize {
        let count = enumerate_local_classes(size, size as u64).count();
        assert_eq!(
            class_count_formula(size as u64, 1),
            num_bigint::BigUint::from(count),
            "size {size}"
        );
    }
}
