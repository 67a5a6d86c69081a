use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::space::random_point;
use crate::error::{GeoError, Result};
use crate::geometry_core::GeometryId;

pub type PointFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapTag {
    Isometry,
    AffineR,
    Twisting,
    Winding,
    FiberRotation,
    Custom,
}

/// What the classification theorems predict for a map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    Pass,
    Fail,
}

/// A bijection of one of the model spaces, given with its inverse.
#[derive(Clone)]
pub struct CandidateMap {
    pub id: String,
    pub geometry: GeometryId,
    pub tags: Vec<MapTag>,
    pub expected: Option<Expected>,
    forward: PointFn,
    inverse: PointFn,
}

impl fmt::Debug for CandidateMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CandidateMap")
            .field("id", &self.id)
            .field("geometry", &self.geometry)
            .field("tags", &self.tags)
            .field("expected", &self.expected)
            .finish()
    }
}

impl CandidateMap {
    pub fn new(
        id: impl Into<String>,
        geometry: GeometryId,
        tags: Vec<MapTag>,
        expected: Option<Expected>,
        forward: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        inverse: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        CandidateMap {
            id: id.into(),
            geometry,
            tags,
            expected,
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
        }
    }

    pub fn identity(geometry: GeometryId) -> Self {
        CandidateMap::new(
            format!("{}.identity", geometry.name()),
            geometry,
            vec![MapTag::Isometry],
            Some(Expected::Pass),
            |p| p.to_vec(),
            |p| p.to_vec(),
        )
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        (self.forward)(p)
    }

    pub fn apply_inverse(&self, p: &[f64]) -> Vec<f64> {
        (self.inverse)(p)
    }

    pub fn has_tag(&self, tag: MapTag) -> bool {
        self.tags.contains(&tag)
    }

    pub fn inverse(&self) -> CandidateMap {
        CandidateMap {
            id: format!("{}^-1", self.id),
            geometry: self.geometry,
            tags: self.tags.clone(),
            expected: self.expected,
            forward: Arc::clone(&self.inverse),
            inverse: Arc::clone(&self.forward),
        }
    }

    /// `self ∘ other`. A composition of two maps expected to pass is
    /// expected to pass; one expected failure composed with an expected pass
    /// is expected to fail.
    pub fn compose(&self, other: &CandidateMap) -> Result<CandidateMap> {
        if self.geometry != other.geometry {
            return Err(GeoError::InvalidArgument(format!(
                "cannot compose a {} map with a {} map",
                self.geometry, other.geometry
            )));
        }
        let expected = match (self.expected, other.expected) {
            (Some(Expected::Pass), Some(Expected::Pass)) => Some(Expected::Pass),
            (Some(Expected::Pass), Some(Expected::Fail)) | (Some(Expected::Fail), Some(Expected::Pass)) => {
                Some(Expected::Fail)
            }
            _ => None,
        };
        let mut tags: Vec<MapTag> = self.tags.iter().chain(&other.tags).copied().collect();
        tags.sort();
        tags.dedup();
        let (f1, f2) = (Arc::clone(&self.forward), Arc::clone(&other.forward));
        let (i1, i2) = (Arc::clone(&self.inverse), Arc::clone(&other.inverse));
        Ok(CandidateMap {
            id: format!("{}*{}", self.id, other.id),
            geometry: self.geometry,
            tags,
            expected,
            forward: Arc::new(move |p| f1(&f2(p))),
            inverse: Arc::new(move |p| i2(&i1(p))),
        })
    }

    /// Largest relative error of `forward ∘ inverse` and `inverse ∘ forward`
    /// over `n` random points of the sampling patch.
    pub fn bijection_defect(&self, n: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..n {
            let p = random_point(self.geometry, &mut rng);
            for q in [self.apply(&self.apply_inverse(&p)), self.apply_inverse(&self.apply(&p))] {
                let err = p
                    .iter()
                    .zip(&q)
                    .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
                    .fold(0.0, f64::max);
                worst = worst.max(err);
            }
        }
        worst
    }

    /// For product geometries, the map induced on the base: the base
    /// component of `f(p, 0)`.
    pub fn induced_base(&self, base: &[f64]) -> Result<Vec<f64>> {
        let k = product_split(self.geometry)?;
        let mut p = base.to_vec();
        p.push(0.0);
        let mut q = self.apply(&p);
        q.truncate(k);
        Ok(q)
    }

    /// For product geometries, the map induced on heights: the height of
    /// `f(base, h)`.
    pub fn induced_height(&self, base: &[f64], h: f64) -> Result<f64> {
        let k = product_split(self.geometry)?;
        let mut p = base.to_vec();
        if p.len() != k {
            return Err(GeoError::InvalidArgument(format!("base point needs {k} coordinates")));
        }
        p.push(h);
        Ok(self.apply(&p)[k])
    }
}

/// Number of base coordinates of a product geometry.
fn product_split(g: GeometryId) -> Result<usize> {
    match g {
        GeometryId::Cylinder => Ok(1),
        GeometryId::H2xR => Ok(2),
        GeometryId::S2xR => Ok(3),
        other => Err(GeoError::Unsupported(format!("{other} is not a product"))),
    }
}
