//! Vietoris–Rips and Čech complexes, truncated at a dimension cap.
//!
//! Radius convention: the graph threshold is `r` and the Čech balls have
//! radius `r / 2`. A set spans a Čech face iff its minimal enclosing ball has
//! radius at most `r / 2` (accepted within [`MEB_TOL`], relative). Every Čech
//! face is therefore a Rips face at the same `r`, and the two complexes share
//! their 1-skeleton.

mod ball;

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ball::{min_enclosing_ball, Ball, MEB_TOL};

use crate::geometry::{GeometricGraph, PointCloud, VertexId};

/// Default ceiling on the total number of stored faces.
pub const DEFAULT_FACE_BUDGET: usize = 50_000_000;

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("minimal enclosing ball of an empty point set")]
    EmptyPointSet,
    #[error("point {index} has dimension {got}, expected {expected}")]
    MixedDimensions { index: usize, expected: usize, got: usize },
    #[error("face budget of {budget} faces exceeded while enumerating dimension {dim}")]
    FaceBudgetExceeded { budget: usize, dim: usize },
    #[error("radius must be finite and positive, got {0}")]
    InvalidRadius(f64),
    #[error("invalid simplex {0:?}: vertices must be strictly increasing")]
    UnsortedSimplex(Vec<VertexId>),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("face {0:?} exceeds the dimension cap {1}")]
    AboveCap(Vec<VertexId>, usize),
    #[error("malformed complex file at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A simplex as a strictly increasing vertex tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self, ComplexError> {
        if vertices.is_empty() || vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ComplexError::UnsortedSimplex(vertices));
        }
        Ok(Simplex(vertices))
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut vertices: Vec<VertexId>) -> Result<Self, ComplexError> {
        vertices.sort_unstable();
        vertices.dedup();
        Simplex::new(vertices)
    }

    pub(crate) fn from_sorted_unchecked(vertices: Vec<VertexId>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-1 faces, the `i`-th obtained by deleting vertex `i`.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| {
            let mut v = self.0.clone();
            v.remove(i);
            Simplex(v)
        })
    }

    /// `self` with `vertex` added, or `None` if already present.
    pub fn with_vertex(&self, vertex: VertexId) -> Option<Simplex> {
        match self.0.binary_search(&vertex) {
            Ok(_) => None,
            Err(pos) => {
                let mut v = self.0.clone();
                v.insert(pos, vertex);
                Some(Simplex(v))
            }
        }
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexKind {
    Rips,
    Cech,
    /// Built from explicit faces.
    Abstract,
}

impl ComplexKind {
    pub fn name(self) -> &'static str {
        match self {
            ComplexKind::Rips => "rips",
            ComplexKind::Cech => "cech",
            ComplexKind::Abstract => "abstract",
        }
    }
}

impl std::str::FromStr for ComplexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rips" => Ok(ComplexKind::Rips),
            "cech" => Ok(ComplexKind::Cech),
            "abstract" => Ok(ComplexKind::Abstract),
            other => Err(format!("unknown complex type {other:?} (expected rips or cech)")),
        }
    }
}

/// Faces of one dimension, stored flat and sorted lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct FaceList {
    width: usize,
    data: Vec<VertexId>,
}

impl FaceList {
    fn new(width: usize) -> Self {
        FaceList { width, data: Vec::new() }
    }

    fn len(&self) -> usize {
        self.data.len() / self.width
    }

    fn get(&self, i: usize) -> &[VertexId] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    fn index_of(&self, face: &[VertexId]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(face) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// A simplicial complex with faces of dimension `0..=max_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialComplex {
    n_vertices: usize,
    max_dim: usize,
    kind: ComplexKind,
    radius: Option<f64>,
    faces: Vec<FaceList>,
    complete: bool,
}

impl SimplicialComplex {
    fn empty(n_vertices: usize, max_dim: usize, kind: ComplexKind, radius: Option<f64>) -> Self {
        SimplicialComplex {
            n_vertices,
            max_dim,
            kind,
            radius,
            faces: (0..=max_dim).map(|d| FaceList::new(d + 1)).collect(),
            complete: true,
        }
    }

    /// Downward closure of `generators`, keeping faces up to `max_dim`.
    /// Generators above the cap contribute their `max_dim`-skeleton.
    pub fn from_generators<I>(n_vertices: usize, max_dim: usize, generators: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = Simplex>,
    {
        let mut per_dim: Vec<Vec<Vec<VertexId>>> = vec![Vec::new(); max_dim + 1];
        let mut complete = true;
        for s in generators {
            if let Some(&v) = s.vertices().iter().find(|&&v| v as usize >= n_vertices) {
                return Err(ComplexError::VertexOutOfRange { vertex: v, n: n_vertices });
            }
            if s.dim() > max_dim {
                complete = false;
            }
            let verts = s.vertices();
            let k = verts.len();
            // every nonempty subset up to the cap
            for mask in 1u64..(1u64 << k.min(63)) {
                let size = mask.count_ones() as usize;
                if size > max_dim + 1 {
                    continue;
                }
                let sub: Vec<VertexId> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
                per_dim[size - 1].push(sub);
            }
        }
        for v in 0..n_vertices {
            per_dim[0].push(vec![v as VertexId]);
        }
        let mut cx = SimplicialComplex::empty(n_vertices, max_dim, ComplexKind::Abstract, None);
        for (d, mut list) in per_dim.into_iter().enumerate() {
            list.sort_unstable();
            list.dedup();
            cx.faces[d].data = list.into_iter().flatten().collect();
        }
        cx.complete = complete;
        Ok(cx)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    /// True when no face of the defining rule was dropped by the dimension cap.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn n_faces(&self, dim: usize) -> usize {
        self.faces.get(dim).map_or(0, FaceList::len)
    }

    pub fn total_faces(&self) -> usize {
        self.faces.iter().map(FaceList::len).sum()
    }

    /// `f_0, ..., f_max_dim`.
    pub fn face_counts(&self) -> Vec<usize> {
        self.faces.iter().map(FaceList::len).collect()
    }

    /// Highest dimension with at least one face.
    pub fn top_dim(&self) -> Option<usize> {
        (0..=self.max_dim).rev().find(|&d| self.n_faces(d) > 0)
    }

    pub fn face(&self, dim: usize, i: usize) -> &[VertexId] {
        self.faces[dim].get(i)
    }

    pub fn faces(&self, dim: usize) -> impl ExactSizeIterator<Item = &[VertexId]> + '_ {
        let list = &self.faces[dim];
        (0..list.len()).map(move |i| list.get(i))
    }

    pub fn index_of(&self, face: &[VertexId]) -> Option<usize> {
        let dim = face.len().checked_sub(1)?;
        self.faces.get(dim)?.index_of(face)
    }

    pub fn contains(&self, face: &[VertexId]) -> bool {
        self.index_of(face).is_some()
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n_vertices()`.
    pub fn disjoint_union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let max_dim = self.max_dim.max(other.max_dim);
        let shift = self.n_vertices as VertexId;
        let mut cx = SimplicialComplex::empty(self.n_vertices + other.n_vertices, max_dim, ComplexKind::Abstract, None);
        for d in 0..=max_dim {
            let data = &mut cx.faces[d].data;
            if d <= self.max_dim {
                data.extend_from_slice(&self.faces[d].data);
            }
            if d <= other.max_dim {
                data.extend(other.faces[d].data.iter().map(|v| v + shift));
            }
        }
        cx.complete = self.complete && other.complete;
        cx
    }

    /// Writes the text format: header `# n=<v> max_dim=<m> type=<kind> r=<r>`,
    /// then one face per line as space-separated sorted vertex indices.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let r = self.radius.map_or_else(|| "none".to_string(), |r| r.to_string());
        writeln!(w, "# n={} max_dim={} type={} r={}", self.n_vertices, self.max_dim, self.kind.name(), r)?;
        for list in &self.faces {
            for face in list.data.chunks_exact(list.width) {
                let line: Vec<String> = face.iter().map(|v| v.to_string()).collect();
                writeln!(w, "{}", line.join(" "))?;
            }
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self, ComplexError> {
        let mut header: Option<(usize, usize, ComplexKind, Option<f64>)> = None;
        let mut per_dim: Vec<Vec<VertexId>> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let err = |reason: String| ComplexError::Parse { line: lineno + 1, reason };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let (mut n, mut m, mut kind, mut radius) = (None, None, ComplexKind::Abstract, None);
                for token in rest.split_whitespace() {
                    let Some((key, value)) = token.split_once('=') else { continue };
                    match key {
                        "n" => n = Some(value.parse().map_err(|_| err(format!("bad n {value:?}")))?),
                        "max_dim" => m = Some(value.parse().map_err(|_| err(format!("bad max_dim {value:?}")))?),
                        "type" => kind = value.parse().map_err(err)?,
                        "r" if value != "none" => {
                            radius = Some(value.parse().map_err(|_| err(format!("bad r {value:?}")))?)
                        }
                        _ => {}
                    }
                }
                let (Some(n), Some(m)) = (n, m) else {
                    return Err(err("header needs n= and max_dim=".into()));
                };
                header = Some((n, m, kind, radius));
                per_dim = vec![Vec::new(); m + 1];
                continue;
            }
            let Some((n, m, _, _)) = header else {
                return Err(err("face before header".into()));
            };
            let verts = line
                .split_whitespace()
                .map(|t| t.parse::<VertexId>().map_err(|_| err(format!("bad vertex {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let s = Simplex::new(verts)?;
            if let Some(&v) = s.vertices().iter().find(|&&v| v as usize >= n) {
                return Err(ComplexError::VertexOutOfRange { vertex: v, n });
            }
            if s.dim() > m {
                return Err(ComplexError::AboveCap(s.0, m));
            }
            per_dim[s.dim()].extend_from_slice(s.vertices());
        }
        let Some((n, m, kind, radius)) = header else {
            return Err(ComplexError::Parse { line: 0, reason: "missing header".into() });
        };
        let mut cx = SimplicialComplex::empty(n, m, kind, radius);
        for (d, data) in per_dim.into_iter().enumerate() {
            let mut rows: Vec<&[VertexId]> = data.chunks_exact(d + 1).collect();
            rows.sort_unstable();
            rows.dedup();
            cx.faces[d].data = rows.concat();
        }
        // Only the clique rule can be re-derived from the stored 1-skeleton.
        cx.complete = match kind {
            ComplexKind::Rips => !has_clique_above(&cx.one_skeleton(), m),
            _ => cx.n_faces(m) == 0,
        };
        Ok(cx)
    }

    /// Graph on the stored vertices and edges.
    pub fn one_skeleton(&self) -> GeometricGraph {
        let edges: Vec<(usize, usize)> = if self.max_dim >= 1 {
            self.faces(1).map(|e| (e[0] as usize, e[1] as usize)).collect()
        } else {
            Vec::new()
        };
        GeometricGraph::from_edges(self.n_vertices, &edges)
    }
}

/// Whether `graph` has a clique on `max_dim + 2` vertices.
fn has_clique_above(graph: &GeometricGraph, max_dim: usize) -> bool {
    enumerate_cliques(graph, max_dim, usize::MAX, &mut |_| true, &mut |_| {}).unwrap_or(true)
}

/// Depth-first clique expansion: each clique is extended only by vertices
/// larger than its maximum, drawn from the intersection of forward neighbor
/// lists. Within one size, cliques are visited in lexicographic order.
/// `accept` may veto a clique, which also prunes all its extensions.
/// Returns whether some accepted clique of size `max_dim + 2` exists
/// (it is visited but never extended).
fn enumerate_cliques(
    graph: &GeometricGraph,
    max_dim: usize,
    budget: usize,
    accept: &mut dyn FnMut(&[VertexId]) -> bool,
    visit: &mut dyn FnMut(&[VertexId]),
) -> Result<bool, ComplexError> {
    struct Walk<'a> {
        graph: &'a GeometricGraph,
        max_dim: usize,
        budget: usize,
        count: usize,
        overflow: bool,
    }

    impl Walk<'_> {
        fn forward(&self, v: VertexId) -> &[VertexId] {
            let nbrs = self.graph.neighbors(v as usize);
            let start = nbrs.partition_point(|&w| w <= v);
            &nbrs[start..]
        }

        fn expand(
            &mut self,
            clique: &mut Vec<VertexId>,
            candidates: &[VertexId],
            accept: &mut dyn FnMut(&[VertexId]) -> bool,
            visit: &mut dyn FnMut(&[VertexId]),
        ) -> Result<(), ComplexError> {
            for (i, &w) in candidates.iter().enumerate() {
                clique.push(w);
                if accept(clique) {
                    if clique.len() == self.max_dim + 2 {
                        self.overflow = true;
                        clique.pop();
                        // one witness is enough
                        return Ok(());
                    }
                    self.count += 1;
                    if self.count > self.budget {
                        return Err(ComplexError::FaceBudgetExceeded { budget: self.budget, dim: clique.len() - 1 });
                    }
                    visit(clique);
                    let rest = &candidates[i + 1..];
                    if !rest.is_empty() {
                        let next = intersect_sorted(rest, self.forward(w));
                        if !next.is_empty() {
                            self.expand(clique, &next, accept, visit)?;
                        }
                    }
                }
                clique.pop();
            }
            Ok(())
        }
    }

    let mut walk = Walk { graph, max_dim, budget, count: 0, overflow: false };
    let mut clique = Vec::with_capacity(max_dim + 2);
    for v in 0..graph.n_vertices() as VertexId {
        clique.push(v);
        walk.count += 1;
        if walk.count > budget {
            return Err(ComplexError::FaceBudgetExceeded { budget, dim: 0 });
        }
        visit(&clique);
        let fwd = walk.forward(v).to_vec();
        walk.expand(&mut clique, &fwd, accept, visit)?;
        clique.pop();
    }
    Ok(walk.overflow)
}

fn intersect_sorted(a: &[VertexId], b: &[VertexId]) -> Vec<VertexId> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn collect_complex(
    graph: &GeometricGraph,
    max_dim: usize,
    budget: usize,
    kind: ComplexKind,
    accept: &mut dyn FnMut(&[VertexId]) -> bool,
) -> Result<SimplicialComplex, ComplexError> {
    let mut cx = SimplicialComplex::empty(graph.n_vertices(), max_dim, kind, graph.radius());
    let mut faces = std::mem::take(&mut cx.faces);
    let overflow = enumerate_cliques(graph, max_dim, budget, accept, &mut |clique| {
        faces[clique.len() - 1].data.extend_from_slice(clique);
    })?;
    cx.faces = faces;
    cx.complete = !overflow;
    Ok(cx)
}

/// Vietoris–Rips complex: the clique complex of `graph`, up to `max_dim`.
pub fn rips_complex(graph: &GeometricGraph, max_dim: usize) -> Result<SimplicialComplex, ComplexError> {
    rips_complex_with_budget(graph, max_dim, DEFAULT_FACE_BUDGET)
}

pub fn rips_complex_with_budget(
    graph: &GeometricGraph,
    max_dim: usize,
    budget: usize,
) -> Result<SimplicialComplex, ComplexError> {
    collect_complex(graph, max_dim, budget, ComplexKind::Rips, &mut |_| true)
}

/// Čech complex at graph threshold `r`: `σ` is a face iff the balls of
/// radius `r / 2` around its points share a point.
pub fn cech_complex(cloud: &PointCloud, r: f64, max_dim: usize) -> Result<SimplicialComplex, ComplexError> {
    cech_complex_with_budget(cloud, r, max_dim, DEFAULT_FACE_BUDGET)
}

pub fn cech_complex_with_budget(
    cloud: &PointCloud,
    r: f64,
    max_dim: usize,
    budget: usize,
) -> Result<SimplicialComplex, ComplexError> {
    let graph = crate::geometry::build_geometric_graph(cloud, r).map_err(|_| ComplexError::InvalidRadius(r))?;
    cech_complex_on_graph(cloud, &graph, max_dim, budget)
}

/// Čech complex reusing an already built geometric graph at the same radius.
pub fn cech_complex_on_graph(
    cloud: &PointCloud,
    graph: &GeometricGraph,
    max_dim: usize,
    budget: usize,
) -> Result<SimplicialComplex, ComplexError> {
    let r = graph.radius().ok_or(ComplexError::InvalidRadius(f64::NAN))?;
    let mut pts: Vec<&[f64]> = Vec::with_capacity(max_dim + 2);
    let mut accept = |clique: &[VertexId]| {
        // pairs are decided by the graph itself
        if clique.len() <= 2 {
            return true;
        }
        pts.clear();
        pts.extend(clique.iter().map(|&v| cloud.point(v as usize)));
        cech_accepts(&pts, r)
    };
    collect_complex(graph, max_dim, budget, ComplexKind::Cech, &mut accept)
}

/// The Čech face test: minimal enclosing ball radius `<= r / 2` within tolerance.
pub fn cech_accepts(points: &[&[f64]], r: f64) -> bool {
    ball::enclosing_ball_unchecked(points).radius <= (r / 2.0) * (1.0 + MEB_TOL)
}
