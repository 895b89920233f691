//! Small fixed-size vector helpers shared by every module.

pub type Point2 = [f64; 2];
pub type Point3 = [f64; 3];

#[inline]
pub fn sub3(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn cross3(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn dot3(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm3(a: Point3) -> f64 {
    dot3(a, a).sqrt()
}

#[inline]
pub fn dist3(a: Point3, b: Point3) -> f64 {
    norm3(sub3(a, b))
}

/// Unsigned area of a triangle in space.
#[inline]
pub fn triangle_area3(a: Point3, b: Point3, c: Point3) -> f64 {
    0.5 * norm3(cross3(sub3(b, a), sub3(c, a)))
}

#[inline]
pub fn sub2(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add2(a: Point2, b: Point2) -> Point2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn norm2(a: Point2) -> f64 {
    a[0].hypot(a[1])
}

/// Signed area of a planar triangle, positive when counterclockwise.
#[inline]
pub fn signed_area2(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Cotangent of the angle at `apex` in the triangle (`apex`, `p`, `q`).
#[inline]
pub fn cot_at3(apex: Point3, p: Point3, q: Point3) -> f64 {
    let u = sub3(p, apex);
    let v = sub3(q, apex);
    dot3(u, v) / norm3(cross3(u, v))
}

#[inline]
pub fn cot_at2(apex: Point2, p: Point2, q: Point2) -> f64 {
    let u = sub2(p, apex);
    let v = sub2(q, apex);
    (u[0] * v[0] + u[1] * v[1]) / (u[0] * v[1] - u[1] * v[0]).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_angle_has_zero_cotangent() {
        assert_eq!(cot_at2([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]), 0.0);
        assert!((cot_at3([0.0; 3], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orientation_sign() {
        assert_eq!(signed_area2([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]), 0.5);
        assert_eq!(signed_area2([0.0, 0.0], [0.0, 1.0], [1.0, 0.0]), -0.5);
    }
}
