use crate::error::{Error, Result};

/// A half-open box (lower, upper] given by two corner vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Rectangle {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Rectangle {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::argument("rectangle corners must be nonempty and equal length"));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if l.is_nan() || u.is_nan() || l > u {
                return Err(Error::argument(format!(
                    "rectangle requires lower <= upper, got [{l}, {u}]"
                )));
            }
        }
        Ok(Rectangle { lower, upper })
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }
}

/// Inclusion-exclusion volume: sum over the 2^d corners of f with sign
/// (-1)^{#lower coordinates}. The function must be finite on every corner;
/// a non-finite corner is an error, never treated as zero.
pub fn rectangle_volume(f: impl Fn(&[f64]) -> f64, r: &Rectangle) -> Result<f64> {
    let d = r.dimension();
    if d > 30 {
        return Err(Error::argument("rectangle dimension too large"));
    }
    let mut corner = vec![0.0; d];
    let mut total = 0.0;
    for mask in 0u32..(1 << d) {
        let mut lower_count = 0;
        for (i, c) in corner.iter_mut().enumerate() {
            if mask & (1 << i) == 0 {
                *c = r.lower[i];
                lower_count += 1;
            } else {
                *c = r.upper[i];
            }
        }
        let v = f(&corner);
        if !v.is_finite() {
            return Err(Error::Eval(format!(
                "non-finite value {v} at rectangle corner {corner:?}"
            )));
        }
        total += if lower_count % 2 == 0 { v } else { -v };
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_function() {
        let r = Rectangle::new(vec![0.2, 0.3], vec![0.5, 0.7]).unwrap();
        let v = rectangle_volume(|u| u[0] * u[1], &r).unwrap();
        assert!((v - 0.12).abs() <= 1e-15, "got {v}");
    }

    #[test]
    fn degenerate_rectangle_is_zero() {
        let r = Rectangle::new(vec![0.4, 0.4], vec![0.4, 0.9]).unwrap();
        let v = rectangle_volume(|u| u[0].powi(3) + u[1], &r).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn min_function() {
        let r = Rectangle::new(vec![0.2, 0.2], vec![0.5, 0.5]).unwrap();
        let v = rectangle_volume(|u| u[0].min(u[1]), &r).unwrap();
        assert!((v - 0.3).abs() <= 1e-15, "got {v}");
    }

    #[test]
    fn non_finite_corner_is_error() {
        let r = Rectangle::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let res = rectangle_volume(
            |u| {
                if u[0] == 0.0 {
                    f64::INFINITY
                } else {
                    u[0]
                }
            },
            &r,
        );
        assert!(matches!(res, Err(Error::Eval(_))));
    }
}
