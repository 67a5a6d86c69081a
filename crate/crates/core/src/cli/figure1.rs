use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::hyperbolic_plane::{disk_to_half_plane, half_plane_distance, ConstantCurvatureCurve, IdealPoint, Model, C64};

pub const FIGURE1_SCHEMA: &str = "geolab.figure1/1";
pub const FIGURE1_CSV_HEADER: &str = "# geolab figure1 v1";
/// Integer labels `-R_MAX..=R_MAX` of the family.
pub const R_MAX: i32 = 5;
/// Ideal endpoints of the chord in the half-plane.
pub const CHORD_ENDS: [f64; 2] = [1.1, 2.9];
/// Arc-length half-window sampled on each curve.
pub const ARC_HALF_LENGTH: f64 = 6.0;
pub const DEFAULT_SAMPLES: usize = 201;

/// Radius of the half-plane semicircle `γ_r`. The radii increase with `r`
/// and accumulate at 1 and 3, so the family is nested and disjoint.
pub fn family_radius(r: i32) -> f64 {
    2.0 + f64::from(r).tanh()
}

/// `γ_r` meets the chord iff exactly one chord endpoint lies inside the
/// semicircle.
pub fn crosses_chord(radius: f64) -> bool {
    (CHORD_ENDS[0].abs() < radius) != (CHORD_ENDS[1].abs() < radius)
}

#[derive(Clone, Debug, Serialize)]
pub struct Arc {
    pub label: String,
    pub r: Option<i32>,
    /// Half-plane ideal endpoints.
    pub ends: [f64; 2],
    pub crosses_chord: bool,
    pub t: Vec<f64>,
    /// Disk-model points.
    pub points: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Figure1 {
    pub schema: &'static str,
    pub family: Vec<Arc>,
    pub chord: Arc,
    pub crossed: Vec<i32>,
    /// Smallest distance between samples of two different family members.
    pub min_sampled_distance: f64,
    /// Smallest exact distance `|ln(R_r / R_s)|` between family members.
    pub min_exact_distance: f64,
}

fn arc(label: String, r: Option<i32>, ends: [f64; 2], n: usize) -> Result<Arc> {
    let curve = ConstantCurvatureCurve::geodesic(IdealPoint::Real(ends[0]), IdealPoint::Real(ends[1]))?;
    let s = curve.sample(-ARC_HALF_LENGTH, ARC_HALF_LENGTH, n, Model::Disk)?;
    Ok(Arc {
        crosses_chord: r.is_some_and(|_| crosses_chord(ends[1])),
        label,
        r,
        ends,
        t: s.params,
        points: s.points.iter().map(|p| [p[0], p[1]]).collect(),
    })
}

fn half_plane(p: &[f64; 2]) -> C64 {
    disk_to_half_plane(C64::new(p[0], p[1]))
}

/// The family `γ_r`, `|r| ≤ R_MAX`, and one chord, each sampled at `n`
/// points.
pub fn figure1(n: usize) -> Result<Figure1> {
    if n < 2 {
        return Err(GeoError::InvalidArgument("need at least two samples per arc".into()));
    }
    let family = (-R_MAX..=R_MAX)
        .map(|r| {
            let radius = family_radius(r);
            arc(format!("gamma_{r}"), Some(r), [-radius, radius], n)
        })
        .collect::<Result<Vec<_>>>()?;
    let chord = arc("chord".into(), None, CHORD_ENDS, n)?;
    let crossed = family.iter().filter(|a| a.crosses_chord).filter_map(|a| a.r).collect();
    let lifted: Vec<Vec<C64>> = family.iter().map(|a| a.points.iter().map(half_plane).collect()).collect();
    let mut min_sampled = f64::INFINITY;
    let mut min_exact = f64::INFINITY;
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            min_exact = min_exact.min((family[j].ends[1] / family[i].ends[1]).ln().abs());
            for z in &lifted[i] {
                for w in &lifted[j] {
                    min_sampled = min_sampled.min(half_plane_distance(*z, *w));
                }
            }
        }
    }
    Ok(Figure1 {
        schema: FIGURE1_SCHEMA,
        family,
        chord,
        crossed,
        min_sampled_distance: min_sampled,
        min_exact_distance: min_exact,
    })
}

impl Figure1 {
    /// Columns `label,r,t,x,y`; `r` is empty on the chord.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{FIGURE1_CSV_HEADER}").unwrap();
        writeln!(
            s,
            "# crossed={:?} min_sampled_distance={} min_exact_distance={}",
            self.crossed, self.min_sampled_distance, self.min_exact_distance
        )
        .unwrap();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["label", "r", "t", "x", "y"]).unwrap();
        for a in self.family.iter().chain(std::iter::once(&self.chord)) {
            let r = a.r.map_or(String::new(), |r| r.to_string());
            for (t, p) in a.t.iter().zip(&a.points) {
                w.write_record([a.label.clone(), r.clone(), t.to_string(), p[0].to_string(), p[1].to_string()])
                    .unwrap();
            }
        }
        s.push_str(&String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8"));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_is_nested_disjoint_and_crossed_in_a_bounded_range() {
        let f = figure1(101).unwrap();
        assert_eq!(f.family.len(), 11);
        assert_eq!(f.crossed, vec![-1, 0, 1]);
        assert!(f.min_sampled_distance > 0.0);
        assert!(f.min_sampled_distance >= f.min_exact_distance - 1e-9);
        for a in f.family.iter().chain([&f.chord]) {
            assert!(a.points.iter().all(|p| p[0].hypot(p[1]) < 1.0));
        }
    }

    #[test]
    fn csv_has_one_block_per_curve() {
        let csv = figure1(5).unwrap().to_csv();
        assert!(csv.starts_with(FIGURE1_CSV_HEADER));
        assert_eq!(csv.lines().filter(|l| l.starts_with("chord")).count(), 5);
        assert_eq!(csv.lines().count(), 2 + 1 + 12 * 5);
    }
}
