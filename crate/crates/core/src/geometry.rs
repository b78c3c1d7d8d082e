//! Small fixed-size vector helpers shared by the mesh and diagnostic code.

pub type Point3 = [f64; 3];

#[inline]
pub fn sub(a: &Point3, b: &Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn dot(a: &Point3, b: &Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: &Point3, b: &Point3) -> Point3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm(a: &Point3) -> f64 {
    dot(a, a).sqrt()
}

pub fn triangle_area(a: &Point3, b: &Point3, c: &Point3) -> f64 {
    0.5 * norm(&cross(&sub(b, a), &sub(c, a)))
}

/// Interior angle at `apex` of the triangle (`apex`, `b`, `c`).
///
/// Uses `atan2(|u x v|, u . v)`, which stays accurate for angles near 0 and pi
/// where `acos` loses precision.
pub fn corner_angle(apex: &Point3, b: &Point3, c: &Point3) -> f64 {
    let u = sub(b, apex);
    let v = sub(c, apex);
    norm(&cross(&u, &v)).atan2(dot(&u, &v))
}

/// Cotangent of the angle at `apex`, computed as `u . v / |u x v|`.
pub fn corner_cot(apex: &Point3, b: &Point3, c: &Point3) -> f64 {
    let u = sub(b, apex);
    let v = sub(c, apex);
    dot(&u, &v) / norm(&cross(&u, &v))
}
