//! Maps between the unit sphere and the extended complex plane.
//!
//! Projection is from the north pole `(0, 0, 1)`, so the south pole lands on
//! the origin and the equator on the unit circle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{norm, Point3};

pub type ComplexVector = Vec<Complex64>;

/// Points with third coordinate above `1 - POLE_GUARD` are rejected.
pub const POLE_GUARD: f64 = 1e-12;
/// Allowed deviation from unit norm for projected points.
pub const SPHERE_TOLERANCE: f64 = 1e-8;
/// Entries with modulus at or below this cannot be inverted.
pub const ZERO_GUARD: f64 = 1e-300;

/// Points are first pulled radially onto the sphere. In the northern
/// hemisphere `1 / (1 - z)` is evaluated as `(1 + z) / (x^2 + y^2)`, which
/// avoids the cancellation in `1 - z` near the pole.
pub fn stereo_project(f: &[Point3]) -> Result<ComplexVector> {
    f.iter()
        .enumerate()
        .map(|(i, p)| {
            let r = norm(p);
            if !r.is_finite() || (r - 1.0).abs() > SPHERE_TOLERANCE {
                return Err(Error::OffSphere { index: i, norm: r });
            }
            let [x, y, z] = [p[0] / r, p[1] / r, p[2] / r];
            if z > 1.0 - POLE_GUARD {
                return Err(Error::PolePoint { index: i });
            }
            let scale = if z > 0.0 { (1.0 + z) / (x * x + y * y) } else { 1.0 / (1.0 - z) };
            Ok(Complex64::new(x * scale, y * scale))
        })
        .collect()
}

pub fn inverse_stereo(h: &[Complex64]) -> Result<Vec<Point3>> {
    h.iter()
        .enumerate()
        .map(|(i, z)| {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            let r2 = z.norm_sqr();
            if !r2.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            let d = r2 + 1.0;
            Ok([2.0 * z.re / d, 2.0 * z.im / d, (r2 - 1.0) / d])
        })
        .collect()
}

/// `h / |h|^2` for one entry, i.e. `1 / conj(h)`.
#[inline]
pub fn invert(z: Complex64) -> Complex64 {
    let r = z.norm();
    z / r / r
}

/// Elementwise inversion `h_i / |h_i|^2`. Swaps the two hemispheres.
pub fn invert_plane(h: &[Complex64]) -> Result<ComplexVector> {
    h.iter()
        .enumerate()
        .map(|(i, &z)| {
            let r = z.norm();
            if !(r > ZERO_GUARD) || !r.is_finite() {
                return Err(Error::ZeroEntry { index: i });
            }
            Ok(z / r / r)
        })
        .collect()
}

/// Median of `|h|`; the mean of the two middle values for even lengths.
pub fn median_modulus(h: &[Complex64]) -> Result<f64> {
    if h.is_empty() {
        return Err(Error::EmptyVector);
    }
    let mut m: Vec<f64> = h.iter().map(|z| z.norm()).collect();
    m.sort_by(f64::total_cmp);
    let k = m.len() / 2;
    Ok(if m.len() % 2 == 1 { m[k] } else { 0.5 * (m[k - 1] + m[k]) })
}

pub fn median_normalize(h: &[Complex64]) -> Result<ComplexVector> {
    let med = median_modulus(h)?;
    if !(med > 0.0) || !med.is_finite() {
        return Err(Error::ZeroMedian);
    }
    Ok(h.iter().map(|z| z / med).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn projection_examples() {
        let h = stereo_project(&[[0.0, 0.0, -1.0], [1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(h, vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(stereo_project(&[[0.0, 0.0, 1.0]]), Err(Error::PolePoint { index: 0 })));
        assert!(matches!(stereo_project(&[[0.0, 0.0, -1.1]]), Err(Error::OffSphere { .. })));
        // Near the pole 1 - z loses every digit below 1e-12; the result must not.
        let far = c(3e5, -4e5);
        let back = stereo_project(&inverse_stereo(&[far]).unwrap()).unwrap()[0];
        assert!((back - far).norm() < 1e-14 * far.norm());
    }

    #[test]
    fn inverse_examples() {
        let f = inverse_stereo(&[c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(f[0], [0.0, 0.0, -1.0]);
        assert_eq!(f[1], [0.0, 1.0, 0.0]);
        assert!(matches!(inverse_stereo(&[c(f64::NAN, 0.0)]), Err(Error::NonFinite { index: 0 })));
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(invert_plane(&[c(0.0, 1.0)]).unwrap(), vec![c(0.0, 1.0)]);
        assert_eq!(invert_plane(&[c(2.0, 0.0)]).unwrap(), vec![c(0.5, 0.0)]);
        assert!(matches!(invert_plane(&[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::ZeroEntry { index: 1 })));
    }

    #[test]
    fn median_examples() {
        let h = median_normalize(&[c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)]).unwrap();
        assert_eq!(h, vec![c(0.5, 0.0), c(0.0, 1.0), c(-1.5, 0.0)]);
        let unit = vec![c(0.6, 0.8), c(-1.0, 0.0), c(0.0, -1.0)];
        assert_eq!(median_normalize(&unit).unwrap(), unit);
        assert_eq!(median_normalize(&[c(1.0, 0.0), c(3.0, 0.0)]).unwrap(), vec![c(0.5, 0.0), c(1.5, 0.0)]);
        assert!(matches!(median_normalize(&[]), Err(Error::EmptyVector)));
        assert!(matches!(median_normalize(&[c(0.0, 0.0)]), Err(Error::ZeroMedian)));
    }

    fn plane_point() -> impl Strategy<Value = Complex64> {
        // Moduli from 1e-6 to 1e6, so points near both poles are covered.
        (-6.0f64..6.0, 0.0f64..std::f64::consts::TAU).prop_map(|(e, t)| Complex64::from_polar(10f64.powf(e), t))
    }

    fn sphere_point() -> impl Strategy<Value = Point3> {
        // Uniform on the sphere away from the pole.
        (-1.0f64..0.999, 0.0f64..std::f64::consts::TAU).prop_map(|(z, t)| {
            let r = (1.0 - z * z).sqrt();
            [r * t.cos(), r * t.sin(), z]
        })
    }

    proptest! {
        #[test]
        fn plane_roundtrip(z in plane_point()) {
            let back = stereo_project(&inverse_stereo(&[z]).unwrap()).unwrap()[0];
            prop_assert!((back - z).norm() <= 1e-12 * z.norm().max(1.0));
        }

        #[test]
        fn sphere_roundtrip(p in sphere_point()) {
            let q = inverse_stereo(&stereo_project(&[p]).unwrap()).unwrap()[0];
            for k in 0..3 {
                prop_assert!((p[k] - q[k]).abs() < 1e-12);
            }
        }

        #[test]
        fn inverse_lands_on_sphere(z in plane_point()) {
            let p = inverse_stereo(&[z]).unwrap()[0];
            prop_assert!((norm(&p) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn inversion_is_involution(z in plane_point().prop_filter("nonzero", |z| z.norm() > 1e-6)) {
            let once = invert_plane(&[z]).unwrap()[0];
            let twice = invert_plane(&[once]).unwrap()[0];
            prop_assert!((twice - z).norm() <= 1e-14 * z.norm());
            prop_assert!((once.norm() - 1.0 / z.norm()).abs() <= 1e-14 / z.norm());
        }
    }
}
