use super::pose::Pose;
use nalgebra::{Matrix3, Vector3};

/// A primitive body in its own frame, centered at the origin.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Sphere { radius: f64 },
    Box { half: Vector3<f64> },
}

impl Shape {
    pub fn is_valid(&self) -> bool {
        match self {
            Shape::Sphere { radius } => *radius > 0.0 && radius.is_finite(),
            Shape::Box { half } => half.iter().all(|h| *h > 0.0 && h.is_finite()),
        }
    }
}

fn box_axes(p: &Pose) -> Matrix3<f64> {
    p.rotation.to_rotation_matrix().into_inner()
}

fn sphere_box(c: &Vector3<f64>, r: f64, half: &Vector3<f64>, pb: &Pose) -> bool {
    let local = pb.rotation.inverse() * (c - pb.translation);
    let closest = Vector3::new(local.x.clamp(-half.x, half.x), local.y.clamp(-half.y, half.y), local.z.clamp(-half.z, half.z));
    (local - closest).norm() > r
}

/// Separating-axis test for two oriented boxes.
fn box_box(ha: &Vector3<f64>, pa: &Pose, hb: &Vector3<f64>, pb: &Pose) -> bool {
    let a = box_axes(pa);
    let b = box_axes(pb);
    let d = pb.translation - pa.translation;
    let mut axes: Vec<Vector3<f64>> = Vec::with_capacity(15);
    for i in 0..3 {
        axes.push(a.column(i).into_owned());
        axes.push(b.column(i).into_owned());
    }
    for i in 0..3 {
        for j in 0..3 {
            let c = a.column(i).cross(&b.column(j));
            // parallel edges add nothing beyond the face axes
            if c.norm() > 1e-12 {
                axes.push(c.normalize());
            }
        }
    }
    axes.iter().any(|n| {
        let ra: f64 = (0..3).map(|i| ha[i] * a.column(i).dot(n).abs()).sum();
        let rb: f64 = (0..3).map(|i| hb[i] * b.column(i).dot(n).abs()).sum();
        d.dot(n).abs() > ra + rb
    })
}

/// Whether two posed shapes are disjoint. Touching counts as overlapping.
pub fn disjoint(a: &Shape, pa: &Pose, b: &Shape, pb: &Pose) -> bool {
    match (a, b) {
        (Shape::Sphere { radius: ra }, Shape::Sphere { radius: rb }) => (pa.translation - pb.translation).norm() > ra + rb,
        (Shape::Sphere { radius }, Shape::Box { half }) => sphere_box(&pa.translation, *radius, half, pb),
        (Shape::Box { half }, Shape::Sphere { radius }) => sphere_box(&pb.translation, *radius, half, pa),
        (Shape::Box { half: ha }, Shape::Box { half: hb }) => box_box(ha, pa, hb, pb),
    }
}
