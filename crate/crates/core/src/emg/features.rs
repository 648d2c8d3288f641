use super::EmgWindow;
use crate::error::{config_err, Result};
use crate::scalar::Real;
use crate::signal::{fwht, WhtOrdering};

/// Magnitudes of the first `n_coeffs` sequency-ordered WHT coefficients,
/// scaled to unit L2 norm. An all-zero window maps to the zero vector.
pub fn extract_features<T: Real>(w: &EmgWindow<T>, n_coeffs: usize) -> Result<Vec<T>> {
    if n_coeffs == 0 {
        return Err(config_err("n_coeffs must be at least 1"));
    }
    if n_coeffs > w.len() {
        return Err(config_err(format!("n_coeffs {n_coeffs} exceeds window length {}", w.len())));
    }
    let mut v: Vec<T> = fwht(w.samples(), WhtOrdering::Sequency)?
        .into_iter()
        .take(n_coeffs)
        .map(|c| c.abs())
        .collect();
    let norm = v.iter().map(|&c| c * c).fold(T::zero(), |a, b| a + b).sqrt();
    if norm > T::zero() {
        for c in &mut v {
            *c /= norm;
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn win(x: Vec<f64>) -> EmgWindow<f64> {
        EmgWindow::new(x, 1000.0, None).unwrap()
    }

    #[test]
    fn constant_window_is_all_dc() {
        let f = extract_features(&win(vec![2.5; 64]), 16).unwrap();
        assert!((f[0] - 1.0).abs() < 1e-12);
        assert!(f[1..].iter().all(|&c| c.abs() < 1e-12));
    }

    #[test]
    fn zero_window_and_bad_args() {
        assert_eq!(extract_features(&win(vec![0.0; 32]), 8).unwrap(), vec![0.0; 8]);
        assert!(extract_features(&win(vec![1.0; 32]), 0).is_err());
        assert!(extract_features(&win(vec![1.0; 32]), 33).is_err());
        assert!(extract_features(&win(vec![1.0; 30]), 8).is_err());
    }

    #[test]
    fn alternating_window_lands_on_top_sequency() {
        let x = (0..16).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let f = extract_features(&win(x), 16).unwrap();
        assert!((f[15] - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn unit_norm_and_scale_invariant(x in prop::collection::vec(-5.0f64..5.0, 64), c in 1e-3f64..1e3) {
            prop_assume!(x.iter().any(|v| v.abs() > 1e-6));
            let a = extract_features(&win(x.clone()), 64).unwrap();
            let b = extract_features(&win(x.iter().map(|v| v * c).collect()), 64).unwrap();
            let n: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((n - 1.0).abs() < 1e-9);
            for (p, q) in a.iter().zip(&b) {
                prop_assert!((p - q).abs() < 1e-12);
            }
        }
    }
}
