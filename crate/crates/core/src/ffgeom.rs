//! Prime-field geometry: the parabolic quadric Q(6,q) in PG(6,q) and the
//! split Cayley hexagon H(q) whose points are all points of the quadric.
//!
//! Coordinates are `X0..X6` with quadratic form
//! `Q(X) = X0*X4 + X1*X5 + X2*X6 - X3^2`. A totally singular line of the
//! quadric belongs to the hexagon iff its Plücker coordinates satisfy
//!
//! ```text
//! p12 = p34   p20 = p35   p01 = p36
//! p03 = p56   p13 = p64   p23 = p45
//! ```
//!
//! with `pji = -pij`. This sign/index convention is the one that passes the
//! structural check in [`build_hexagon`] (point/line counts, (q+1)-regular
//! incidence, girth 12, diameter 6) for q = 2 and q = 3.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("field order {0} is not a prime below 256")]
    UnsupportedField(u32),
    #[error("points are equal; they do not span a line")]
    DependentPoints,
    #[error("coordinate {0} out of range for the field")]
    BadCoordinate(u8),
    #[error("zero vector is not a projective point")]
    ZeroVector,
    #[error("hexagon validation failed: {0}")]
    Validation(String),
}

/// The prime field GF(q) for a prime `q < 256`; elements are `u8` residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u8,
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self, GeometryError> {
        let is_prime = q >= 2
            && (2..q)
                .take_while(|d| d * d <= q)
                .all(|d| !q.is_multiple_of(d));
        if !is_prime || q >= 256 {
            return Err(GeometryError::UnsupportedField(q));
        }
        Ok(PrimeField { q: q as u8 })
    }

    pub fn order(self) -> u8 {
        self.q
    }

    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.q as u16) as u8
    }

    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    pub fn sub(self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.q as u16) as u8
    }

    /// Multiplicative inverse of a nonzero element (Fermat).
    pub fn inv(self, a: u8) -> u8 {
        assert!(a != 0, "zero has no inverse");
        let mut result = 1;
        let mut base = a;
        let mut e = self.q - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    pub fn elements(self) -> impl Iterator<Item = u8> {
        0..self.q
    }

    /// Scales `coords` so the first nonzero entry is 1. Returns `None` for
    /// the zero vector.
    pub fn normalize<const N: usize>(self, coords: [u8; N]) -> Option<[u8; N]> {
        let lead = *coords.iter().find(|&&c| c != 0)?;
        let s = self.inv(lead);
        Some(coords.map(|c| self.mul(c, s)))
    }
}

pub type Vec7 = [u8; 7];

/// Evaluates `X0*X4 + X1*X5 + X2*X6 - X3^2`.
pub fn quadric_eval(f: PrimeField, v: &Vec7) -> u8 {
    let hyperbolic = [(0, 4), (1, 5), (2, 6)]
        .iter()
        .fold(0, |acc, &(i, j)| f.add(acc, f.mul(v[i], v[j])));
    f.sub(hyperbolic, f.mul(v[3], v[3]))
}

/// A point of PG(6,q), stored with its first nonzero coordinate equal to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint(Vec7);

impl ProjPoint {
    pub fn new(f: PrimeField, coords: Vec7) -> Result<Self, GeometryError> {
        if let Some(&bad) = coords.iter().find(|&&c| c >= f.order()) {
            return Err(GeometryError::BadCoordinate(bad));
        }
        f.normalize(coords)
            .map(ProjPoint)
            .ok_or(GeometryError::ZeroVector)
    }

    pub fn coords(&self) -> &Vec7 {
        &self.0
    }
}

/// All points of Q(6,q), in lexicographic order of normalized coordinates.
pub fn enumerate_quadric_points(q: u32) -> Result<Vec<ProjPoint>, GeometryError> {
    let f = PrimeField::new(q)?;
    let q = f.order() as usize;
    let mut points = Vec::new();
    // Normalized vectors: some prefix of zeros, then a 1, then anything.
    for lead in 0..7 {
        let free = 6 - lead;
        for idx in 0..q.pow(free as u32) {
            let mut v = [0u8; 7];
            v[lead] = 1;
            let mut rest = idx;
            for slot in (lead + 1..7).rev() {
                v[slot] = (rest % q) as u8;
                rest /= q;
            }
            if quadric_eval(f, &v) == 0 {
                points.push(ProjPoint(v));
            }
        }
    }
    // Leading positions were visited in order 0..7, which is descending
    // lexicographic order of the vectors; sort to make it ascending.
    points.sort_unstable();
    Ok(points)
}

/// The q+1 points of the line through `a` and `b`, sorted.
pub fn line_points(
    f: PrimeField,
    a: &ProjPoint,
    b: &ProjPoint,
) -> Result<Vec<ProjPoint>, GeometryError> {
    if a == b {
        return Err(GeometryError::DependentPoints);
    }
    let mut pts = vec![*a];
    for lambda in f.elements() {
        let v: Vec7 = std::array::from_fn(|i| f.add(f.mul(lambda, a.0[i]), b.0[i]));
        pts.push(ProjPoint(f.normalize(v).expect("independent points")));
    }
    pts.sort_unstable();
    pts.dedup();
    debug_assert_eq!(pts.len(), f.order() as usize + 1);
    Ok(pts)
}

/// Index of the Plücker coordinate `p_ij`, `i < j`, in lexicographic order
/// of the pairs.
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < 7);
    // Pairs with first index < i: sum_{t<i} (6 - t).
    i * (13 - i) / 2 + (j - i - 1)
}

/// Plücker (Grassmann) coordinates of a line, first nonzero entry scaled to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GrassmannCoords {
    field: PrimeField,
    p: [u8; 21],
}

impl GrassmannCoords {
    /// `p_ij` for any `i != j`, using antisymmetry.
    pub fn get(&self, i: usize, j: usize) -> u8 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.p[pair_index(i, j)],
            std::cmp::Ordering::Greater => self.field.neg(self.p[pair_index(j, i)]),
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn as_array(&self) -> &[u8; 21] {
        &self.p
    }
}

pub fn grassmann(
    f: PrimeField,
    a: &ProjPoint,
    b: &ProjPoint,
) -> Result<GrassmannCoords, GeometryError> {
    let mut p = [0u8; 21];
    for i in 0..7 {
        for j in i + 1..7 {
            p[pair_index(i, j)] = f.sub(f.mul(a.0[i], b.0[j]), f.mul(a.0[j], b.0[i]));
        }
    }
    let p = f.normalize(p).ok_or(GeometryError::DependentPoints)?;
    Ok(GrassmannCoords { field: f, p })
}

/// The six linear conditions that cut the hexagon lines out of the
/// totally singular lines of Q(6,q).
pub const HEXAGON_LINE_CONDITIONS: [((usize, usize), (usize, usize)); 6] = [
    ((1, 2), (3, 4)),
    ((2, 0), (3, 5)),
    ((0, 1), (3, 6)),
    ((0, 3), (5, 6)),
    ((1, 3), (6, 4)),
    ((2, 3), (4, 5)),
];

pub fn is_hexagon_line(g: &GrassmannCoords) -> bool {
    HEXAGON_LINE_CONDITIONS
        .iter()
        .all(|&((a, b), (c, d))| g.get(a, b) == g.get(c, d))
}

/// Totally singular lines of Q(6,q) as sorted index lists into `points`.
pub fn totally_singular_lines(f: PrimeField, points: &[ProjPoint]) -> Vec<Vec<usize>> {
    let index: HashMap<ProjPoint, usize> =
        points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut lines = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let pts = line_points(f, &points[i], &points[j]).expect("distinct points");
            let Some(idx) = pts
                .iter()
                .map(|p| index.get(p).copied())
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            // Report each line once, from its two smallest points.
            let mut idx = idx;
            idx.sort_unstable();
            if idx[0] == i && idx[1] == j {
                lines.push(idx);
            }
        }
    }
    lines
}

/// Points and lines of the split Cayley hexagon H(q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HexagonGeometry {
    pub field_order: u32,
    pub points: Vec<ProjPoint>,
    /// Each line is the sorted list of its q+1 point indices.
    pub lines: Vec<Vec<usize>>,
    pub point_to_lines: Vec<Vec<usize>>,
}

/// Builds H(q) and validates it; never returns an unvalidated geometry.
pub fn build_hexagon(q: u32) -> Result<HexagonGeometry, GeometryError> {
    let f = PrimeField::new(q)?;
    let points = enumerate_quadric_points(q)?;
    let lines: Vec<Vec<usize>> = totally_singular_lines(f, &points)
        .into_iter()
        .filter(|line| {
            let g = grassmann(f, &points[line[0]], &points[line[1]]).expect("distinct points");
            is_hexagon_line(&g)
        })
        .collect();
    let mut point_to_lines = vec![Vec::new(); points.len()];
    for (j, line) in lines.iter().enumerate() {
        for &p in line {
            point_to_lines[p].push(j);
        }
    }
    let geom = HexagonGeometry {
        field_order: q,
        points,
        lines,
        point_to_lines,
    };
    geom.validate()?;
    Ok(geom)
}

impl HexagonGeometry {
    fn validate(&self) -> Result<(), GeometryError> {
        let fail = |msg: String| Err(GeometryError::Validation(msg));
        let k = self.field_order as usize + 1;
        if self.points.len() != self.lines.len() {
            return fail(format!(
                "{} points but {} lines",
                self.points.len(),
                self.lines.len()
            ));
        }
        if let Some(l) = self.lines.iter().position(|l| l.len() != k) {
            return fail(format!("line {l} has {} points", self.lines[l].len()));
        }
        if let Some(p) = self.point_to_lines.iter().position(|l| l.len() != k) {
            return fail(format!(
                "point {p} is on {} lines",
                self.point_to_lines[p].len()
            ));
        }
        let g = self
            .incidence_graph()
            .map_err(|e| GeometryError::Validation(format!("incidence graph: {e}")))?;
        if g.girth() != Some(12) {
            return fail(format!("incidence girth {:?}, expected 12", g.girth()));
        }
        if g.diameter() != 6 {
            return fail(format!("incidence diameter {}, expected 6", g.diameter()));
        }
        Ok(())
    }

    /// Bipartite incidence graph: points are vertices `0..P`, line `j` is
    /// vertex `P + j`.
    pub fn incidence_graph(&self) -> Result<Graph, crate::graph::GraphError> {
        let p = self.points.len();
        Graph::from_edges(
            p + self.lines.len(),
            self.lines
                .iter()
                .enumerate()
                .flat_map(|(j, line)| line.iter().map(move |&pt| (pt, p + j))),
        )
    }
}
