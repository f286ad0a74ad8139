use super::eigen::eigenvalues;
use super::matrix::RealMatrix;
use crate::error::{Error, Result};

/// Orders up to this size use the Faddeev–LeVerrier recurrence; larger
/// matrices go through their eigenvalues.
const DIRECT_MAX_ORDER: usize = 4;

/// Monic coefficients of `det(z·I − M)`, highest degree first.
pub fn char_poly(m: &RealMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::dim("characteristic polynomial", "square matrix", format!("{}x{}", m.rows(), m.cols())));
    }
    if m.rows() <= DIRECT_MAX_ORDER {
        Ok(faddeev_leverrier(m))
    } else {
        Ok(eigenvalues(m)?.monic_poly())
    }
}

fn faddeev_leverrier(a: &RealMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = vec![1.0];
    let mut mk = RealMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a * &mk;
        let c_prev = *coeffs.last().unwrap();
        for i in 0..n {
            next[(i, i)] += c_prev;
        }
        let am = a * &next;
        let trace: f64 = (0..n).map(|i| am[(i, i)]).sum();
        coeffs.push(-trace / k as f64);
        mk = next;
    }
    coeffs
}

/// Evaluates a real polynomial (highest degree first) at a complex point.
pub fn poly_eval(coeffs: &[f64], z: num_complex::Complex64) -> num_complex::Complex64 {
    coeffs
        .iter()
        .fold(num_complex::Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `max |aᵢ − bᵢ| / max(1, ‖b‖∞)` for equal-length coefficient vectors.
pub fn relative_coeff_error(actual: &[f64], target: &[f64]) -> f64 {
    assert_eq!(actual.len(), target.len(), "coefficient length mismatch");
    let scale = target.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    actual
        .iter()
        .zip(target)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar() {
        let m = RealMatrix::from_rows(&[[0.5]]).unwrap();
        assert_eq!(char_poly(&m).unwrap(), vec![1.0, -0.5]);
    }

    #[test]
    fn nilpotent() {
        let m = RealMatrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert_eq!(char_poly(&m).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn companion_form() {
        let m = RealMatrix::from_rows(&[[0.0, 1.0], [-0.02, 0.3]]).unwrap();
        let p = char_poly(&m).unwrap();
        assert!(relative_coeff_error(&p, &[1.0, -0.3, 0.02]) < 1e-15, "{p:?}");
    }

    #[test]
    fn eigen_route_for_large_order() {
        let m = RealMatrix::diag(&[0.1, 0.2, 0.3, 0.4, 0.5]);
        let p = char_poly(&m).unwrap();
        let expect = crate::linalg::spectrum::poly_from_roots(
            &[0.1, 0.2, 0.3, 0.4, 0.5].map(|r| num_complex::Complex64::new(r, 0.0)),
        );
        assert!(relative_coeff_error(&p, &expect) < 1e-14);
    }

    #[test]
    fn rejects_non_square() {
        assert!(char_poly(&RealMatrix::zeros(1, 2)).is_err());
    }
}
