//! Exact characteristic polynomials, numeric root extraction, and the
//! spectrum-transfer checks between unfoldings related by permutations.
//!
//! The characteristic polynomial is computed exactly over the rationals by
//! the Faddeev-LeVerrier recurrence; roots come from Durand-Kerner
//! simultaneous iteration in double precision.

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::exec;
use crate::matrix::Matrix;
use crate::permutation::{conjugate, two_sided_transform, PermutationMatrix};
use crate::ring::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectralError {
    #[error("matrix is {rows}x{cols}, not square")]
    NonSquare { rows: usize, cols: usize },
    #[error("polynomial must be monic with degree >= 0")]
    MalformedPolynomial,
    #[error("a degree-zero polynomial has no roots")]
    DegreeZero,
    #[error("root iteration failed after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("eigenvector is zero")]
    ZeroVector,
    #[error("matrix size {n} disagrees with vector length {len}")]
    DimensionMismatch { n: usize, len: usize },
    #[error("matrix size {n} disagrees with permutation size {perm}")]
    SizeMismatch { n: usize, perm: usize },
}

/// Monic characteristic polynomial, coefficients ascending from the constant
/// term; `coefficients()[k]` multiplies x^k and the last entry is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPoly {
    coeffs: Vec<Scalar>,
}

impl CharPoly {
    /// Wraps an ascending coefficient list; the leading entry must be 1.
    pub fn from_coefficients(coeffs: Vec<Scalar>) -> Result<Self, SpectralError> {
        match coeffs.last() {
            Some(lead) if lead.is_one() => Ok(CharPoly { coeffs }),
            _ => Err(SpectralError::MalformedPolynomial),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &Scalar {
        &self.coeffs[0]
    }

    fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + Complex64::new(c.to_f64(), 0.0);
        }
        acc
    }
}

impl Serialize for CharPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coeffs.iter().map(Scalar::to_string).collect();
        strings.serialize(serializer)
    }
}

/// det(xI - A), exactly, by the Faddeev-LeVerrier recurrence
/// M_1 = I, c_(n-k) = -tr(A M_k) / k, M_(k+1) = A M_k + c_(n-k) I.
pub fn char_poly(a: &Matrix) -> Result<CharPoly, SpectralError> {
    if !a.is_square() {
        return Err(SpectralError::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    let mut coeffs = vec![Scalar::zero(); n + 1];
    coeffs[n] = Scalar::one();
    let mut m = Matrix::identity(n);
    for k in 1..=n {
        let am = a.mul(&m);
        let c = -(am.trace() / Scalar::from_integer(k as i64));
        coeffs[n - k] = c.clone();
        if k < n {
            m = am.add_scalar_diag(&c);
        }
    }
    Ok(CharPoly { coeffs })
}

/// Double-precision complex value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexApprox {
    pub re: f64,
    pub im: f64,
}

impl ComplexApprox {
    pub fn new(re: f64, im: f64) -> Self {
        ComplexApprox { re, im }
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<Complex64> for ComplexApprox {
    fn from(z: Complex64) -> Self {
        ComplexApprox { re: z.re, im: z.im }
    }
}

const MAX_ROOT_ITERATIONS: usize = 10_000;
const STEP_TOLERANCE: f64 = 1e-12;
const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// All complex roots by Durand-Kerner simultaneous iteration. Start points
/// sit on a circle of radius `1 + max|coef|`, rotated by a fixed offset of
/// one radian to break conjugate symmetry. Each sweep updates every root
/// from the previous iterate, so results are identical with and without the
/// `parallel` feature.
///
/// Returned roots satisfy `|p(root)| < 1e-9 * (1 + max|coef|)` and are
/// sorted by descending real part, then descending imaginary part.
pub fn poly_roots(p: &CharPoly) -> Result<Vec<ComplexApprox>, SpectralError> {
    let n = p.degree();
    if n == 0 {
        return Err(SpectralError::DegreeZero);
    }
    let max_coef = p
        .coefficients()
        .iter()
        .map(|c| c.to_f64().abs())
        .fold(0.0, f64::max);
    let radius = 1.0 + max_coef;
    let mut roots: Vec<Complex64> = (0..n)
        .map(|j| {
            let angle = std::f64::consts::TAU * j as f64 / n as f64 + 1.0;
            radius * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();
    let mut converged = false;
    for _ in 0..MAX_ROOT_ITERATIONS {
        let previous = roots;
        roots = exec::map_indexed(n, |i| {
            let zi = previous[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, zj) in previous.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm_sqr() == 0.0 {
                // coincident iterates: nudge instead of dividing by zero
                denom = Complex64::new(f64::EPSILON, f64::EPSILON);
            }
            zi - p.eval_complex(zi) / denom
        });
        let step = roots
            .iter()
            .zip(&previous)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if step < STEP_TOLERANCE * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpectralError::NonConvergence {
            iterations: MAX_ROOT_ITERATIONS,
        });
    }
    let bound = RESIDUAL_TOLERANCE * (1.0 + max_coef);
    for z in &roots {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(SpectralError::NonConvergence {
                iterations: MAX_ROOT_ITERATIONS,
            });
        }
        if p.eval_complex(*z).norm() >= bound {
            return Err(SpectralError::NonConvergence {
                iterations: MAX_ROOT_ITERATIONS,
            });
        }
    }
    let mut out: Vec<ComplexApprox> = roots.into_iter().map(ComplexApprox::from).collect();
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(out)
}

/// Relative eigen-equation residual `||A v - lambda v||_2 / ||v||_2` in
/// double precision.
pub fn eigen_residual(
    a: &Matrix,
    lambda: ComplexApprox,
    v: &[ComplexApprox],
) -> Result<f64, SpectralError> {
    if !a.is_square() {
        return Err(SpectralError::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    if v.len() != n {
        return Err(SpectralError::DimensionMismatch { n, len: v.len() });
    }
    let vc: Vec<Complex64> = v.iter().map(|z| z.to_complex()).collect();
    let norm_v = vc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm_v == 0.0 {
        return Err(SpectralError::ZeroVector);
    }
    let lam = lambda.to_complex();
    let mut norm_r = 0.0f64;
    for r in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..n {
            acc += a.get(r, c).to_f64() * vc[c];
        }
        norm_r += (acc - lam * vc[r]).norm_sqr();
    }
    Ok(norm_r.sqrt() / norm_v)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumCheck {
    pub name: String,
    pub pass: bool,
}

/// Outcome of [`verify_spectrum_relations`]: the shared characteristic
/// polynomial, its numeric roots, and the individual pass/fail checks.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub char_poly: CharPoly,
    pub roots: Vec<ComplexApprox>,
    pub checks: Vec<SpectrumCheck>,
}

impl SpectrumReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Spectrum-transfer verification.
///
/// Without `q`: checks `char_poly(A) = char_poly(P^-1 A P)` exactly. With
/// `q`: forms `B = Q^-1 A P` and checks `char_poly(B P^-1 Q) = char_poly(A)`
/// exactly (`B P^-1 Q` equals `Q^-1 A Q`).
pub fn verify_spectrum_relations(
    a: &Matrix,
    p: &PermutationMatrix,
    q: Option<&PermutationMatrix>,
) -> Result<SpectrumReport, SpectralError> {
    if !a.is_square() {
        return Err(SpectralError::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    if p.size() != n {
        return Err(SpectralError::SizeMismatch { n, perm: p.size() });
    }
    if let Some(q) = q {
        if q.size() != n {
            return Err(SpectralError::SizeMismatch { n, perm: q.size() });
        }
    }
    let reference = char_poly(a)?;
    let check = match q {
        None => {
            let conjugated = conjugate(a, p).expect("sizes checked");
            SpectrumCheck {
                name: "char_poly_conjugation_invariant".to_string(),
                pass: char_poly(&conjugated)? == reference,
            }
        }
        Some(q) => {
            let b = two_sided_transform(a, q, p).expect("sizes checked");
            let shifted = q
                .right_mul(&p.right_mul_inverse(&b).expect("sizes checked"))
                .expect("sizes checked");
            SpectrumCheck {
                name: "char_poly_eigen_shift".to_string(),
                pass: char_poly(&shifted)? == reference,
            }
        }
    };
    let roots = poly_roots(&reference)?;
    Ok(SpectrumReport {
        char_poly: reference,
        roots,
        checks: vec![check],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(lit: &str) -> Scalar {
        lit.parse().unwrap()
    }

    fn poly(coeffs: &[&str]) -> CharPoly {
        CharPoly::from_coefficients(coeffs.iter().map(|c| s(c)).collect()).unwrap()
    }

    #[test]
    fn char_poly_diagonal() {
        // roots are the diagonal: x^2 - 5x + 6
        let p = char_poly(&Matrix::diagonal_int(&[2, 3])).unwrap();
        assert_eq!(p, poly(&["6", "-5", "1"]));
    }

    #[test]
    fn char_poly_identity() {
        let p = char_poly(&Matrix::identity(2)).unwrap();
        assert_eq!(p, poly(&["1", "-2", "1"]));
    }

    #[test]
    fn char_poly_non_square() {
        assert!(matches!(
            char_poly(&Matrix::zeros(2, 3)).unwrap_err(),
            SpectralError::NonSquare { .. }
        ));
    }

    #[test]
    fn constant_term_is_signed_determinant() {
        let a = Matrix::from_int_rows(&[vec![3, 1, 2], vec![-1, 4, 0], vec![2, 2, 5]]);
        let p = char_poly(&a).unwrap();
        let n = 3;
        let sign = if n % 2 == 0 { s("1") } else { s("-1") };
        assert_eq!(p.constant_term(), &(sign * a.det()));
    }

    #[test]
    fn roots_of_x_squared_plus_one() {
        let roots = poly_roots(&poly(&["1", "0", "1"])).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].re).abs() < 1e-9 && (roots[0].im - 1.0).abs() < 1e-9);
        assert!((roots[1].re).abs() < 1e-9 && (roots[1].im + 1.0).abs() < 1e-9);
    }

    #[test]
    fn repeated_root_tolerance() {
        let roots = poly_roots(&poly(&["1", "-2", "1"])).unwrap();
        for r in roots {
            assert!((r.re - 1.0).abs() < 1e-6 && r.im.abs() < 1e-6);
        }
    }

    #[test]
    fn degree_zero_rejected() {
        assert_eq!(
            poly_roots(&poly(&["1"])).unwrap_err(),
            SpectralError::DegreeZero
        );
    }

    #[test]
    fn root_sum_and_product_match_symmetric_functions() {
        let a = Matrix::from_int_rows(&[vec![4, -2, 1], vec![0, 3, 7], vec![5, 1, -6]]);
        let p = char_poly(&a).unwrap();
        let roots = poly_roots(&p).unwrap();
        let sum: f64 = roots.iter().map(|z| z.re).sum();
        let trace = a.trace().to_f64();
        assert!((sum - trace).abs() < 1e-6 * (1.0 + trace.abs()));
        let prod = roots
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, z| acc * z.to_complex());
        let det = a.det().to_f64();
        assert!((prod.re - det).abs() < 1e-6 * (1.0 + det.abs()));
        assert!(prod.im.abs() < 1e-6 * (1.0 + det.abs()));
    }

    #[test]
    fn residual_of_exact_eigenpair() {
        let a = Matrix::diagonal_int(&[2, 3]);
        let v = [ComplexApprox::new(1.0, 0.0), ComplexApprox::new(0.0, 0.0)];
        let r = eigen_residual(&a, ComplexApprox::new(2.0, 0.0), &v).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn residual_input_validation() {
        let a = Matrix::diagonal_int(&[2, 3]);
        let zero = [ComplexApprox::new(0.0, 0.0), ComplexApprox::new(0.0, 0.0)];
        assert_eq!(
            eigen_residual(&a, ComplexApprox::new(2.0, 0.0), &zero).unwrap_err(),
            SpectralError::ZeroVector
        );
        let short = [ComplexApprox::new(1.0, 0.0)];
        assert!(matches!(
            eigen_residual(&a, ComplexApprox::new(2.0, 0.0), &short).unwrap_err(),
            SpectralError::DimensionMismatch { .. }
        ));
    }

    #[test]
    fn verify_with_identity_permutations() {
        let a = Matrix::from_int_rows(&[vec![1, 2], vec![3, 4]]);
        let id = PermutationMatrix::identity(2);
        let report = verify_spectrum_relations(&a, &id, None).unwrap();
        assert!(report.all_pass());
        let report = verify_spectrum_relations(&a, &id, Some(&id)).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.checks.len(), 1);
    }

    #[test]
    fn verify_size_mismatch() {
        let a = Matrix::identity(3);
        let p = PermutationMatrix::identity(2);
        assert!(matches!(
            verify_spectrum_relations(&a, &p, None).unwrap_err(),
            SpectralError::SizeMismatch { n: 3, perm: 2 }
        ));
    }

    #[test]
    fn report_json_shape() {
        let a = Matrix::diagonal_int(&[2, 3]);
        let report =
            verify_spectrum_relations(&a, &PermutationMatrix::identity(2), None).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["char_poly"], serde_json::json!(["6", "-5", "1"]));
        assert!((v["roots"][0]["re"].as_f64().unwrap() - 3.0).abs() < 1e-8);
        assert!((v["roots"][1]["re"].as_f64().unwrap() - 2.0).abs() < 1e-8);
        assert_eq!(v["checks"][0]["name"], "char_poly_conjugation_invariant");
        assert_eq!(v["checks"][0]["pass"], true);
    }
}
