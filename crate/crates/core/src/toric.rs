//! Strictly convex rational polyhedral cones and their face lattices.
//!
//! Faces are computed exactly: the cone is projected isomorphically onto a
//! coordinate subspace of its linear span, candidate facet normals are the
//! generalized cross products of `(d-1)`-subsets of rays, and the face
//! lattice is the intersection closure of the facets.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::{GradedClass, RingError};

/// Largest ambient rank accepted by [`cone_from_rays`].
pub const MAX_RANK: usize = 8;
/// Largest number of rays accepted by [`cone_from_rays`].
pub const MAX_RAYS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error("invalid ray: {0}")]
    InvalidRay(String),
    #[error("cone is not strictly convex")]
    NotSharp,
    #[error("cone exceeds the size budget (rank {rank}, {rays} rays; limits {MAX_RANK} and {MAX_RAYS})")]
    SizeBudget { rank: usize, rays: usize },
    #[error("the zero cone has no strata above it")]
    NoStratumCone,
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Cone input as it appears in scenario files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
}

/// A strictly convex cone given by its primitive extremal rays, together
/// with its face lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    rank: usize,
    rays: Vec<Vec<i64>>,
    dim: usize,
    faces: FaceLattice,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    /// Indices into the cone's ray list.
    pub rays: Vec<usize>,
    pub dim: usize,
}

/// Faces sorted by dimension, then by ray subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceLattice {
    faces: Vec<Face>,
    masks: Vec<u32>,
}

impl FaceLattice {
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Whether face `a` is contained in face `b`.
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.masks[a] & !self.masks[b] == 0
    }

    /// Number of faces in each dimension `0..=dim`.
    pub fn f_vector(&self) -> Vec<usize> {
        let top = self.faces.iter().map(|f| f.dim).max().unwrap_or(0);
        let mut out = vec![0; top + 1];
        for f in &self.faces {
            out[f.dim] += 1;
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let order: Vec<[usize; 2]> = (0..self.len())
            .flat_map(|a| (0..self.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && self.contains(a, b))
            .map(|(a, b)| [a, b])
            .collect();
        serde_json::json!({
            "faces": self.faces,
            "f_vector": self.f_vector(),
            "contains": order,
        })
    }
}

impl Cone {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn face_lattice(&self) -> &FaceLattice {
        &self.faces
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "rank": self.rank, "rays": self.rays, "dim": self.dim })
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cone(rank {}, dim {}, rays {:?})", self.rank, self.dim, self.rays)
    }
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, x| g.gcd(x));
    v.iter().map(|x| x / g).collect()
}

fn to_big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Fraction-free Gaussian elimination; returns the rank and, for square
/// input, the determinant.
fn bareiss(mut m: Vec<Vec<BigInt>>) -> (usize, BigInt) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    let mut sign = 1;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        if p != rank {
            m.swap(p, rank);
            sign = -sign;
        }
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = (&m[r][c] * &m[rank][col] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    let det = if rows == cols && rank == rows {
        if rows == 0 {
            BigInt::from(1)
        } else {
            prev * sign
        }
    } else {
        BigInt::zero()
    };
    (rank, det)
}

fn matrix_rank(rows: &[Vec<BigInt>]) -> usize {
    bareiss(rows.to_vec()).0
}

fn determinant(rows: Vec<Vec<BigInt>>) -> BigInt {
    bareiss(rows).1
}

/// Normal vector `n` with `n . v = det(rows; v)` for the `(d-1) x d` input.
fn cross(rows: &[Vec<BigInt>], d: usize) -> Vec<BigInt> {
    (0..d)
        .map(|j| {
            let minor: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let det = determinant(minor);
            if (d - 1 + j) % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn mask_of(idx: impl IntoIterator<Item = usize>) -> u32 {
    idx.into_iter().fold(0, |m, i| m | (1 << i))
}

fn indices(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

struct Raw {
    dim: usize,
    /// Projected rays in coordinates of the span.
    proj: Vec<Vec<BigInt>>,
    facets: Vec<(u32, Vec<BigInt>)>,
}

fn analyse(rays: &[Vec<i64>]) -> Raw {
    let big = to_big(rays);
    let dim = matrix_rank(&big);
    if dim == 0 {
        return Raw {
            dim,
            proj: Vec::new(),
            facets: Vec::new(),
        };
    }
    let rank = rays[0].len();
    // Coordinates on which projection restricts to an isomorphism of the span.
    let coords = subsets(rank, dim)
        .into_iter()
        .find(|cols| {
            let sub: Vec<Vec<BigInt>> = big
                .iter()
                .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
                .collect();
            matrix_rank(&sub) == dim
        })
        .expect("some coordinate subset realises the rank");
    let proj: Vec<Vec<BigInt>> = big
        .iter()
        .map(|r| coords.iter().map(|&c| r[c].clone()).collect())
        .collect();

    let mut seen = BTreeSet::new();
    let mut facets = Vec::new();
    for subset in subsets(proj.len(), dim - 1) {
        let rows: Vec<Vec<BigInt>> = subset.iter().map(|&i| proj[i].clone()).collect();
        if matrix_rank(&rows) != dim - 1 {
            continue;
        }
        let mut normal = cross(&rows, dim);
        let values: Vec<BigInt> = proj.iter().map(|r| dot(&normal, r)).collect();
        let pos = values.iter().any(Signed::is_positive);
        let neg = values.iter().any(Signed::is_negative);
        if pos && neg {
            continue;
        }
        if neg {
            normal = normal.into_iter().map(|x| -x).collect();
        }
        if !pos && !neg {
            // the whole cone lies in a hyperplane of its own span: impossible
            continue;
        }
        let on = mask_of(values.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(i, _)| i));
        if seen.insert(on) {
            facets.push((on, normal));
        }
    }
    Raw { dim, proj, facets }
}

/// Normalizes the rays, checks strict convexity and enumerates all faces.
pub fn cone_from_rays(rank: usize, rays: &[Vec<i64>]) -> Result<Cone, ToricError> {
    if rank == 0 {
        return Err(ToricError::InvalidRay("ambient rank must be positive".into()));
    }
    for r in rays {
        if r.len() != rank {
            return Err(ToricError::InvalidRay(format!(
                "{r:?} has length {} in rank {rank}",
                r.len()
            )));
        }
        if r.iter().all(|&x| x == 0) {
            return Err(ToricError::InvalidRay("zero ray".into()));
        }
    }
    let mut prim: Vec<Vec<i64>> = Vec::new();
    for r in rays {
        let p = primitive(r);
        if !prim.contains(&p) {
            prim.push(p);
        }
    }
    if rank > MAX_RANK || prim.len() > MAX_RAYS {
        return Err(ToricError::SizeBudget {
            rank,
            rays: prim.len(),
        });
    }

    let raw = analyse(&prim);
    if raw.dim > 0 {
        // Pointed iff the facet normals span the dual of the span.
        let normals: Vec<Vec<BigInt>> = raw.facets.iter().map(|(_, n)| n.clone()).collect();
        if normals.is_empty() || matrix_rank(&normals) < raw.dim {
            return Err(ToricError::NotSharp);
        }
    }

    // Keep only the extremal generators.
    let faces = closure(&raw, prim.len());
    let mut extremal: Vec<usize> = faces
        .iter()
        .filter(|(_, d)| *d == 1)
        .map(|(m, _)| m.trailing_zeros() as usize)
        .collect();
    extremal.sort_unstable();
    finish(rank, extremal.iter().map(|&i| prim[i].clone()).collect())
}

fn finish(rank: usize, rays: Vec<Vec<i64>>) -> Result<Cone, ToricError> {
    let raw = analyse(&rays);
    let mut faces = closure(&raw, rays.len());
    faces.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| indices(a.0, 32).cmp(&indices(b.0, 32))));
    let lattice = FaceLattice {
        faces: faces
            .iter()
            .map(|&(m, d)| Face {
                rays: indices(m, rays.len()),
                dim: d,
            })
            .collect(),
        masks: faces.iter().map(|&(m, _)| m).collect(),
    };
    Ok(Cone {
        rank,
        dim: raw.dim,
        rays,
        faces: lattice,
    })
}

/// Intersection closure of the facets together with the cone itself.
fn closure(raw: &Raw, n: usize) -> Vec<(u32, usize)> {
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut found: BTreeSet<u32> = BTreeSet::new();
    let mut queue = vec![full];
    found.insert(full);
    while let Some(f) = queue.pop() {
        for (facet, _) in &raw.facets {
            let g = f & facet;
            if found.insert(g) {
                queue.push(g);
            }
        }
    }
    found
        .into_iter()
        .map(|m| {
            let rows: Vec<Vec<BigInt>> = indices(m, n).into_iter().map(|i| raw.proj[i].clone()).collect();
            (m, if rows.is_empty() { 0 } else { matrix_rank(&rows) })
        })
        .collect()
}

/// Face lattice of a cone; the budget was enforced at construction.
pub fn face_lattice(c: &Cone) -> &FaceLattice {
    c.face_lattice()
}

/// `sum over faces F of (-1)^dim F`.
pub fn euler_number(fl: &FaceLattice) -> i64 {
    fl.faces()
        .iter()
        .map(|f| if f.dim % 2 == 0 { 1 } else { -1 })
        .sum()
}

/// `P(E)` read off the local cone: faces of dimension `k >= 1` contribute
/// `[G_m^(k-1)]` in grade `dim - 1`, then the sum is shifted to `grade`.
pub fn p_class_from_cone(c: &Cone, grade: u32) -> Result<GradedClass, ToricError> {
    if c.dim() == 0 {
        return Err(ToricError::NoStratumCone);
    }
    let top = (c.dim() - 1) as u32;
    if grade < top {
        return Err(RingError::GradeBelowDimension { grade, dim: top }.into());
    }
    let mut out = GradedClass::zero();
    for f in c.face_lattice().faces().iter().filter(|f| f.dim >= 1) {
        out += GradedClass::torus(f.dim as u32 - 1, top)?;
    }
    Ok(out.shift(grade - top))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> GradedClass {
        GradedClass::tau()
    }
    fn l() -> GradedClass {
        GradedClass::lef()
    }

    #[test]
    fn quadrant() {
        let c = cone_from_rays(2, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.face_lattice().f_vector(), vec![1, 2, 1]);
        assert_eq!(p_class_from_cone(&c, 1).unwrap(), &t() + &l());
    }

    #[test]
    fn line_is_not_sharp() {
        assert_eq!(cone_from_rays(2, &[vec![1, 0], vec![-1, 0]]), Err(ToricError::NotSharp));
        assert_eq!(
            cone_from_rays(2, &[vec![1, 0], vec![-1, 0], vec![0, 1]]),
            Err(ToricError::NotSharp)
        );
        assert_eq!(
            cone_from_rays(2, &[vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]]),
            Err(ToricError::NotSharp)
        );
    }

    #[test]
    fn bad_rays() {
        assert!(matches!(cone_from_rays(2, &[vec![0, 0]]), Err(ToricError::InvalidRay(_))));
        assert!(matches!(cone_from_rays(2, &[vec![1]]), Err(ToricError::InvalidRay(_))));
        assert!(matches!(
            cone_from_rays(9, &[vec![1; 9]]),
            Err(ToricError::SizeBudget { .. })
        ));
    }

    #[test]
    fn normalization() {
        let c = cone_from_rays(2, &[vec![2, 0], vec![1, 0], vec![0, 3], vec![1, 1]]).unwrap();
        assert_eq!(c.rays(), &[vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn simplicial_three() {
        let c = cone_from_rays(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(c.face_lattice().len(), 8);
        assert_eq!(c.face_lattice().f_vector(), vec![1, 3, 3, 1]);
        assert_eq!(euler_number(c.face_lattice()), 0);
        assert_eq!(p_class_from_cone(&c, 2).unwrap(), GradedClass::projective(2, 2).unwrap());
    }

    #[test]
    fn zero_cone() {
        let c = cone_from_rays(3, &[]).unwrap();
        assert_eq!(c.face_lattice().len(), 1);
        assert_eq!(euler_number(c.face_lattice()), 1);
        assert_eq!(p_class_from_cone(&c, 0), Err(ToricError::NoStratumCone));
    }

    #[test]
    fn square_cone() {
        let c = cone_from_rays(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!(c.face_lattice().len(), 10);
        assert_eq!(c.face_lattice().f_vector(), vec![1, 4, 4, 1]);
        assert_eq!(euler_number(c.face_lattice()), 0);
        let expected = (&t() + &l()).pow(2);
        assert_eq!(p_class_from_cone(&c, 2).unwrap(), expected);
    }

    #[test]
    fn non_simplicial_in_rank_three() {
        let c = cone_from_rays(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]]).unwrap();
        assert_eq!(c.dim(), 3);
        assert_eq!(c.rays().len(), 4);
        assert_eq!(euler_number(c.face_lattice()), 0);
    }

    #[test]
    fn lower_dimensional_cone_in_higher_rank() {
        let c = cone_from_rays(4, &[vec![1, 0, 0, 1], vec![0, 1, 0, 1]]).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.face_lattice().f_vector(), vec![1, 2, 1]);
        let ray = cone_from_rays(3, &[vec![0, 2, 0]]).unwrap();
        assert_eq!(ray.rays(), &[vec![0, 1, 0]]);
        assert_eq!(ray.face_lattice().f_vector(), vec![1, 1]);
        assert_eq!(p_class_from_cone(&ray, 3).unwrap(), GradedClass::tau_pow(3));
    }

    #[test]
    fn containment() {
        let c = cone_from_rays(2, &[vec![1, 0], vec![0, 1]]).unwrap();
        let fl = c.face_lattice();
        assert!(fl.contains(0, 3));
        assert!(!fl.contains(1, 2));
        assert!(fl.contains(1, 1));
    }
}
