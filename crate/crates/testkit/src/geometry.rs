//! Closed-form geometry.

/// Signed clearance between two spheres; positive means apart.
pub fn sphere_gap(c1: [f64; 3], r1: f64, c2: [f64; 3], r2: f64) -> f64 {
    let d: f64 = c1.iter().zip(&c2).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    d - r1 - r2
}

/// Point on the segment from `a` to `b` at fraction `s`.
pub fn lerp(a: [f64; 3], b: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s, a[2] + (b[2] - a[2]) * s]
}
