//! Point-cloud sampling and geometric graphs.
//!
//! Every random object in the crate starts from a [`PointCloud`] drawn with
//! [`sample_points`]. Draws are made with [`RNG_NAME`], seeded from a single
//! 64-bit integer, so a cloud is a pure function of `(density, n, seed)`.
//!
//! The geometric graph uses the closed threshold: `{i, j}` is an edge iff
//! `|x_i - x_j| <= r`. Distances are compared squared.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name and version of the generator behind every draw.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9)";

pub type VertexId = u32;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("radius must be finite and positive, got {0}")]
    InvalidRadius(f64),
    #[error("point {index} has {got} coordinates, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("too many points for 32-bit vertex ids: {0}")]
    TooManyPoints(usize),
    #[error("unknown density {0:?} (expected cube, ball or gaussian)")]
    UnknownDensity(String),
    #[error("malformed point file at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    /// Uniform on `[0, 1]^d`.
    #[serde(alias = "cube")]
    UniformCube,
    /// Uniform on the closed unit ball.
    #[serde(alias = "ball")]
    UniformBall,
    /// Standard `d`-variate normal.
    Gaussian,
}

impl DensityKind {
    pub fn name(self) -> &'static str {
        match self {
            DensityKind::UniformCube => "cube",
            DensityKind::UniformBall => "ball",
            DensityKind::Gaussian => "gaussian",
        }
    }

    /// Whether the support is a bounded convex body.
    pub fn is_bounded(self) -> bool {
        !matches!(self, DensityKind::Gaussian)
    }
}

impl fmt::Display for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DensityKind {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cube" | "uniform_cube" => Ok(DensityKind::UniformCube),
            "ball" | "uniform_ball" => Ok(DensityKind::UniformBall),
            "gaussian" => Ok(DensityKind::Gaussian),
            other => Err(GeometryError::UnknownDensity(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Density {
    pub kind: DensityKind,
    pub dim: usize,
}

impl Density {
    pub fn new(kind: DensityKind, dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        Ok(Density { kind, dim })
    }

    pub fn cube(dim: usize) -> Result<Self, GeometryError> {
        Density::new(DensityKind::UniformCube, dim)
    }

    pub fn ball(dim: usize) -> Result<Self, GeometryError> {
        Density::new(DensityKind::UniformBall, dim)
    }

    pub fn gaussian(dim: usize) -> Result<Self, GeometryError> {
        Density::new(DensityKind::Gaussian, dim)
    }

    /// Center of the support: the midpoint of the cube, the origin otherwise.
    pub fn center(&self) -> Vec<f64> {
        match self.kind {
            DensityKind::UniformCube => vec![0.5; self.dim],
            _ => vec![0.0; self.dim],
        }
    }

    /// Lebesgue measure of the support, `None` for the Gaussian.
    pub fn support_volume(&self) -> Option<f64> {
        match self.kind {
            DensityKind::UniformCube => Some(1.0),
            DensityKind::UniformBall => Some(unit_ball_volume(self.dim)),
            DensityKind::Gaussian => None,
        }
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    // V_d = V_{d-2} * 2*pi / d
    let (mut v, start) = if dim % 2 == 0 { (1.0, 2) } else { (2.0, 3) };
    let mut d = start;
    while d <= dim {
        v *= 2.0 * std::f64::consts::PI / d as f64;
        d += 2;
    }
    v
}

/// `n` points in `R^d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    seed: u64,
    density: Option<Density>,
}

impl PointCloud {
    /// Wraps explicit coordinates. Seed is recorded as 0 and the density as unknown.
    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        if points.len() > VertexId::MAX as usize {
            return Err(GeometryError::TooManyPoints(points.len()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (index, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(GeometryError::DimensionMismatch { index, expected: dim, got: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(GeometryError::NonFinite(index));
            }
            coords.extend_from_slice(p);
        }
        Ok(PointCloud { dim, coords, seed: 0, density: None })
    }

    pub fn with_provenance(mut self, seed: u64, density: Option<Density>) -> Self {
        self.seed = seed;
        self.density = density;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn density(&self) -> Option<Density> {
        self.density
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for p in self.points() {
            for (a, b) in c.iter_mut().zip(p) {
                *a += b;
            }
        }
        let n = self.len().max(1) as f64;
        c.iter_mut().for_each(|a| *a /= n);
        c
    }

    /// Squared Euclidean distance between points `i` and `j`.
    pub fn dist2(&self, i: usize, j: usize) -> f64 {
        squared_distance(self.point(i), self.point(j))
    }

    /// Writes the CSV format: optional `# dim=.. seed=.. density=..` header,
    /// then one row of `d` comma-separated reals per point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let density = self.density.map(|d| d.kind.name()).unwrap_or("unknown");
        writeln!(w, "# dim={} seed={} density={}", self.dim, self.seed, density)?;
        for p in self.points() {
            let mut first = true;
            for c in p {
                if !first {
                    w.write_all(b",")?;
                }
                first = false;
                // `{}` prints the shortest representation that round-trips exactly.
                write!(w, "{c}")?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, GeometryError> {
        let mut dim: Option<usize> = None;
        let mut seed = 0u64;
        let mut kind: Option<DensityKind> = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |reason: String| GeometryError::Parse { line: lineno + 1, reason };
            if let Some(header) = line.strip_prefix('#') {
                for token in header.split_whitespace() {
                    let Some((key, value)) = token.split_once('=') else { continue };
                    match key {
                        "dim" => dim = Some(value.parse().map_err(|_| parse_err(format!("bad dim {value:?}")))?),
                        "seed" => seed = value.parse().map_err(|_| parse_err(format!("bad seed {value:?}")))?,
                        "density" if value != "unknown" => kind = Some(value.parse()?),
                        _ => {}
                    }
                }
                continue;
            }
            let row = line
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| parse_err(format!("bad number {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        let dim = match (dim, rows.first()) {
            (Some(d), _) => d,
            (None, Some(row)) => row.len(),
            (None, None) => return Err(GeometryError::Parse { line: 0, reason: "no header and no points".into() }),
        };
        let density = kind.map(|k| Density::new(k, dim)).transpose()?;
        Ok(PointCloud::from_points(dim, &rows)?.with_provenance(seed, density))
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Draws `n` i.i.d. points from `density`.
pub fn sample_points(density: Density, n: usize, seed: u64) -> Result<PointCloud, GeometryError> {
    if density.dim == 0 {
        return Err(GeometryError::ZeroDimension);
    }
    if n > VertexId::MAX as usize {
        return Err(GeometryError::TooManyPoints(n));
    }
    let d = density.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(n * d);
    match density.kind {
        DensityKind::UniformCube => {
            for _ in 0..n * d {
                coords.push(rng.random::<f64>());
            }
        }
        DensityKind::Gaussian => {
            for _ in 0..n * d {
                coords.push(rng.sample::<f64, _>(StandardNormal));
            }
        }
        DensityKind::UniformBall => {
            let mut dir = vec![0.0; d];
            for _ in 0..n {
                let norm = loop {
                    for c in dir.iter_mut() {
                        *c = rng.sample(StandardNormal);
                    }
                    let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        break norm;
                    }
                };
                let radius = rng.random::<f64>().powf(1.0 / d as f64);
                let start = coords.len();
                coords.extend(dir.iter().map(|c| c * radius / norm));
                // Rounding can push a point just outside the closed ball.
                let p = &mut coords[start..];
                while p.iter().map(|c| c * c).sum::<f64>() > 1.0 {
                    p.iter_mut().for_each(|c| *c *= 1.0 - f64::EPSILON);
                }
            }
        }
    }
    Ok(PointCloud { dim: d, coords, seed, density: Some(density) })
}

/// Undirected graph with sorted adjacency lists. For a geometric graph the
/// radius is recorded; graphs built from explicit edges carry none.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricGraph {
    radius: Option<f64>,
    adjacency: Vec<Vec<VertexId>>,
}

impl GeometricGraph {
    /// Builds a graph from an edge list. Self-loops and duplicates are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for {n} vertices");
            if a != b {
                adjacency[a].push(b as VertexId);
                adjacency[b].push(a as VertexId);
            }
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        GeometricGraph { radius: None, adjacency }
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&(b as VertexId)).is_ok()
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j as usize > i).map(move |&j| (i, j as usize)))
    }

    /// Induced subgraph on `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[VertexId]) -> GeometricGraph {
        let index: HashMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for w in &self.adjacency[v as usize] {
                if let Some(&j) = index.get(w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        GeometricGraph::from_edges(vertices.len(), &edges)
    }
}

/// Builds `G(X; r)` with the closed condition `d(x_i, x_j) <= r`.
///
/// Points are bucketed into a uniform grid of cell side `r`; each point is
/// compared only against points in the `3^d` surrounding cells.
pub fn build_geometric_graph(cloud: &PointCloud, r: f64) -> Result<GeometricGraph, GeometryError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(GeometryError::InvalidRadius(r));
    }
    let n = cloud.len();
    let d = cloud.dim();
    let r2 = r * r;
    let cell_of = |p: &[f64]| -> Vec<i64> { p.iter().map(|c| (c / r).floor() as i64).collect() };

    let mut grid: HashMap<Vec<i64>, Vec<VertexId>> = HashMap::new();
    for (i, p) in cloud.points().enumerate() {
        grid.entry(cell_of(p)).or_default().push(i as VertexId);
    }

    let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
        .map(|mut code| {
            (0..d)
                .map(|_| {
                    let o = (code % 3) as i64 - 1;
                    code /= 3;
                    o
                })
                .collect()
        })
        .collect();

    let mut adjacency = vec![Vec::new(); n];
    let mut key = vec![0i64; d];
    for (i, p) in cloud.points().enumerate() {
        let cell = cell_of(p);
        for off in &offsets {
            for ((k, c), o) in key.iter_mut().zip(&cell).zip(off) {
                *k = c + o;
            }
            if let Some(bucket) = grid.get(&key) {
                for &j in bucket {
                    if j as usize != i && squared_distance(p, cloud.point(j as usize)) <= r2 {
                        adjacency[i].push(j);
                    }
                }
            }
        }
        adjacency[i].sort_unstable();
    }
    Ok(GeometricGraph { radius: Some(r), adjacency })
}
