use nalgebra::{Rotation3, Unit, Vector3};

use super::map::{CandidateMap, Expected, MapTag};
use crate::geometry_core::GeometryId;
use crate::hyperbolic_plane::{H2Point, MobiusMap};
use crate::nil::{nil_inv, nil_mul, nil_reflection, nil_rotation, NilElement};
use crate::sl2r::{lift_mobius, lift_mobius_inverse, winding_map, SLPoint};
use crate::sol::{sol_inv, sol_mul, SolElement, StabilizerIsometry};

fn cyl(r1: f64, r2: f64) -> Vec<f64> {
    vec![r1.rem_euclid(1.0), r2]
}

fn mobius_h2(m: MobiusMap) -> CandidateMap {
    let inv = m.inverse();
    CandidateMap::new(
        "h2.mobius",
        GeometryId::H2,
        vec![MapTag::Isometry],
        Some(Expected::Pass),
        move |p| half_plane_apply(&m, p),
        move |p| half_plane_apply(&inv, p),
    )
}

fn half_plane_apply(m: &MobiusMap, p: &[f64]) -> Vec<f64> {
    match H2Point::half_plane(p[0], p[1]) {
        Ok(x) => {
            let z = m.apply(&x).z();
            vec![z.re, z.im]
        }
        Err(_) => vec![f64::NAN, f64::NAN],
    }
}

fn h2xr(id: &str, tags: Vec<MapTag>, m: MobiusMap, a: f64, b: f64) -> CandidateMap {
    let inv = m.inverse();
    CandidateMap::new(
        id,
        GeometryId::H2xR,
        tags,
        Some(Expected::Pass),
        move |p| {
            let mut q = half_plane_apply(&m, p);
            q.push(a * p[2] + b);
            q
        },
        move |p| {
            let mut q = half_plane_apply(&inv, p);
            q.push((p[2] - b) / a);
            q
        },
    )
}

fn rotate(r: &Rotation3<f64>, p: &[f64]) -> Vector3<f64> {
    r * Vector3::new(p[0], p[1], p[2])
}

fn s2xr_rigid(id: &str, tags: Vec<MapTag>, r: Rotation3<f64>, a: f64, b: f64) -> CandidateMap {
    let ri = r.inverse();
    CandidateMap::new(
        id,
        GeometryId::S2xR,
        tags,
        Some(Expected::Pass),
        move |p| {
            let q = rotate(&r, p);
            vec![q.x, q.y, q.z, a * p[3] + b]
        },
        move |p| {
            let q = rotate(&ri, p);
            vec![q.x, q.y, q.z, (p[3] - b) / a]
        },
    )
}

fn sl_point(p: &[f64]) -> Option<SLPoint> {
    SLPoint::new(p[0], p[1], p[2]).ok()
}

fn sl_vec(p: Option<SLPoint>) -> Vec<f64> {
    match p {
        Some(p) => p.to_vector().as_slice().to_vec(),
        None => vec![f64::NAN; 3],
    }
}

fn sl2r_lift(id: &str, m: MobiusMap) -> CandidateMap {
    CandidateMap::new(
        id,
        GeometryId::Sl2r,
        vec![MapTag::Isometry],
        Some(Expected::Pass),
        move |p| sl_vec(sl_point(p).map(|x| lift_mobius(&m, &x))),
        move |p| sl_vec(sl_point(p).map(|x| lift_mobius_inverse(&m, &x))),
    )
}

fn sl2r_winding(id: &str, c: f64) -> CandidateMap {
    CandidateMap::new(
        id,
        GeometryId::Sl2r,
        vec![MapTag::Isometry, MapTag::Winding],
        Some(Expected::Pass),
        move |p| sl_vec(sl_point(p).map(|x| winding_map(c, &x))),
        move |p| sl_vec(sl_point(p).map(|x| winding_map(-c, &x))),
    )
}

fn nil_map(
    id: &str,
    f: impl Fn(&NilElement) -> NilElement + Send + Sync + 'static,
    fi: impl Fn(&NilElement) -> NilElement + Send + Sync + 'static,
) -> CandidateMap {
    CandidateMap::new(
        id,
        GeometryId::Nil,
        vec![MapTag::Isometry],
        Some(Expected::Pass),
        move |p| {
            let q = f(&NilElement::new(p[0], p[1], p[2]));
            vec![q.x, q.y, q.z]
        },
        move |p| {
            let q = fi(&NilElement::new(p[0], p[1], p[2]));
            vec![q.x, q.y, q.z]
        },
    )
}

fn sol_map(
    id: &str,
    f: impl Fn(&SolElement) -> SolElement + Send + Sync + 'static,
    fi: impl Fn(&SolElement) -> SolElement + Send + Sync + 'static,
) -> CandidateMap {
    CandidateMap::new(
        id,
        GeometryId::Sol,
        vec![MapTag::Isometry],
        Some(Expected::Pass),
        move |p| {
            let q = f(&SolElement::new(p[0], p[1], p[2]));
            vec![q.x, q.y, q.z]
        },
        move |p| {
            let q = fi(&SolElement::new(p[0], p[1], p[2]));
            vec![q.x, q.y, q.z]
        },
    )
}

fn sol_stabilizer(id: &str, code: u8) -> CandidateMap {
    let s = StabilizerIsometry::from_code(code).expect("code below 8");
    let si = s.inverse();
    sol_map(id, move |p| s.apply(p), move |p| si.apply(p))
}

/// Built-in candidate maps for every geometry, with the verdict the
/// classification theorems predict.
pub fn registry() -> Vec<CandidateMap> {
    use GeometryId::*;
    let mut maps = Vec::new();

    maps.push(CandidateMap::identity(E2));
    let (s, c) = 0.7f64.sin_cos();
    maps.push(CandidateMap::new(
        "e2.rotation",
        E2,
        vec![MapTag::Isometry],
        Some(Expected::Pass),
        move |p| vec![c * p[0] - s * p[1] + 0.4, s * p[0] + c * p[1] - 0.2],
        move |p| {
            let (x, y) = (p[0] - 0.4, p[1] + 0.2);
            vec![c * x + s * y, -s * x + c * y]
        },
    ));
    maps.push(CandidateMap::new(
        "e2.shear",
        E2,
        vec![MapTag::Custom],
        Some(Expected::Pass),
        |p| vec![2.0 * p[0] + p[1], p[1] - 0.5],
        |p| {
            let y = p[1] + 0.5;
            vec![(p[0] - y) / 2.0, y]
        },
    ));
    maps.push(CandidateMap::new(
        "e2.cubic",
        E2,
        vec![MapTag::Custom],
        Some(Expected::Fail),
        |p| vec![p[0] + p[1].powi(3), p[1]],
        |p| vec![p[0] - p[1].powi(3), p[1]],
    ));

    maps.push(CandidateMap::identity(H2));
    maps.push(mobius_h2(MobiusMap::new(2.0, 1.0, 1.0, 1.0).expect("det 1")));

    maps.push(CandidateMap::identity(Cylinder));
    maps.push(CandidateMap::new(
        "cylinder.isometry",
        Cylinder,
        vec![MapTag::Isometry],
        Some(Expected::Pass),
        |p| cyl(p[0] + 0.3, -p[1] + 0.5),
        |p| cyl(p[0] - 0.3, 0.5 - p[1]),
    ));
    maps.push(CandidateMap::new(
        "cylinder.affine_r",
        Cylinder,
        vec![MapTag::AffineR],
        Some(Expected::Pass),
        |p| cyl(p[0], 2.0 * p[1] - 1.0),
        |p| cyl(p[0], (p[1] + 1.0) / 2.0),
    ));
    for (id, alpha) in [("cylinder.twist", 1.7), ("cylinder.twist_negative", -0.6)] {
        maps.push(CandidateMap::new(
            id,
            Cylinder,
            vec![MapTag::Twisting],
            Some(Expected::Pass),
            move |p| cyl(p[0] + alpha * p[1], p[1]),
            move |p| cyl(p[0] - alpha * p[1], p[1]),
        ));
    }
    maps.push(CandidateMap::new(
        "cylinder.nonlinear_twist",
        Cylinder,
        vec![MapTag::Custom],
        Some(Expected::Fail),
        |p| cyl(p[0] + p[1].sin(), p[1]),
        |p| cyl(p[0] - p[1].sin(), p[1]),
    ));

    maps.push(CandidateMap::identity(H2xR));
    let flip = MobiusMap::new(2.0, 1.0, 1.0, 1.0).expect("det 1");
    maps.push(h2xr("h2xr.isometry", vec![MapTag::Isometry], flip, -1.0, 0.3));
    maps.push(h2xr("h2xr.affine_r", vec![MapTag::AffineR], MobiusMap::IDENTITY, 3.0, 1.0));
    maps.push(h2xr(
        "h2xr.reflection_affine_r",
        vec![MapTag::Isometry, MapTag::AffineR],
        MobiusMap::reflection(),
        0.5,
        -2.0,
    ));
    maps.push(CandidateMap::new(
        "h2xr.height_shift",
        H2xR,
        vec![MapTag::Custom],
        Some(Expected::Fail),
        |p| vec![p[0], p[1], p[2] + p[0]],
        |p| vec![p[0], p[1], p[2] - p[0]],
    ));

    maps.push(CandidateMap::identity(S2xR));
    let axis = Unit::new_normalize(Vector3::new(1.0, 2.0, -0.5));
    maps.push(s2xr_rigid(
        "s2xr.rotation",
        vec![MapTag::Isometry],
        Rotation3::from_axis_angle(&axis, 1.1),
        1.0,
        0.5,
    ));
    maps.push(s2xr_rigid(
        "s2xr.affine_r",
        vec![MapTag::AffineR],
        Rotation3::identity(),
        -0.5,
        2.0,
    ));
    maps.push(CandidateMap::new(
        "s2xr.fiber_rotation",
        S2xR,
        vec![MapTag::FiberRotation],
        Some(Expected::Fail),
        |p| {
            let q = rotate(&Rotation3::from_axis_angle(&Vector3::z_axis(), p[3]), p);
            vec![q.x, q.y, q.z, p[3]]
        },
        |p| {
            let q = rotate(&Rotation3::from_axis_angle(&Vector3::z_axis(), -p[3]), p);
            vec![q.x, q.y, q.z, p[3]]
        },
    ));

    maps.push(CandidateMap::identity(Sl2r));
    maps.push(sl2r_lift("sl2r.lifted_mobius", MobiusMap::new(2.0, 1.0, 1.0, 1.0).expect("det 1")));
    maps.push(sl2r_lift("sl2r.reflection", MobiusMap::reflection()));
    maps.push(sl2r_winding("sl2r.winding_2pi", std::f64::consts::TAU));
    maps.push(sl2r_winding("sl2r.winding", 0.8));

    maps.push(CandidateMap::identity(Nil));
    let g = NilElement::new(0.5, -1.0, 0.7);
    let gi = nil_inv(&g);
    maps.push(nil_map("nil.left_translation", move |p| nil_mul(&g, p), move |p| nil_mul(&gi, p)));
    maps.push(nil_map("nil.rotation", |p| nil_rotation(0.9, p), |p| nil_rotation(-0.9, p)));
    maps.push(nil_map("nil.reflection", nil_reflection, nil_reflection));

    maps.push(CandidateMap::identity(Sol));
    let h = SolElement::new(0.4, -0.3, 0.6);
    let hi = sol_inv(&h);
    maps.push(sol_map("sol.left_translation", move |p| sol_mul(&h, p), move |p| sol_mul(&hi, p)));
    maps.push(sol_stabilizer("sol.swap", 4));
    maps.push(sol_stabilizer("sol.flip_x", 1));
    maps.push(sol_stabilizer("sol.swap_flip", 7));

    maps
}

/// The registered map with the given id.
pub fn lookup(id: &str) -> Option<CandidateMap> {
    registry().into_iter().find(|m| m.id == id)
}
