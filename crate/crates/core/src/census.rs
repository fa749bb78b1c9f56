//! Component-level statistics of a geometric graph and its complexes.
//!
//! `o_tilde[k]` counts components whose graph is the 1-skeleton of the
//! boundary of the `(k+1)`-dimensional cross-polytope (complete multipartite
//! with `k+1` parts of size two). `s_tilde[k]` counts components that span
//! the boundary of a `(k+1)`-simplex in the Čech complex. `f_eq(k, i)` and
//! `f_ge(k, i)` count `k`-faces lying on components with exactly / at least
//! `i` vertices. For every instance
//!
//! ```text
//! o_tilde[k] <= beta_k(Rips) <= o_tilde[k] + f_ge(k, 2k + 3)
//! s_tilde[k] <= beta_k(Cech) <= s_tilde[k] + f_ge(k, k + 3)
//! ```

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{cech_accepts, SimplicialComplex};
use crate::geometry::{build_geometric_graph, GeometricGraph, PointCloud, VertexId};

/// Largest pattern accepted for canonical labelling.
pub const MAX_PATTERN_VERTICES: usize = 10;
/// Largest pattern accepted for induced-subgraph counting.
pub const MAX_INDUCED_PATTERN_VERTICES: usize = 7;
pub const DEFAULT_SUBSET_BUDGET: usize = 50_000_000;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("pattern has {0} vertices, at most {1} supported")]
    PatternTooLarge(usize, usize),
    #[error("pattern must be connected")]
    PatternDisconnected,
    #[error("pattern edge ({0}, {1}) out of range or a self-loop")]
    BadEdge(usize, usize),
    #[error("connected-subset budget of {0} exceeded")]
    SubsetBudgetExceeded(usize),
    #[error("malformed pattern file at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("radius must be finite and positive, got {0}")]
    InvalidRadius(f64),
}

/// Connected components, numbered in order of their smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentPartition {
    component_of: Vec<u32>,
    members: Vec<Vec<VertexId>>,
}

impl ComponentPartition {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn component_of(&self, v: VertexId) -> usize {
        self.component_of[v as usize] as usize
    }

    /// Sorted vertices of component `c`.
    pub fn members(&self, c: usize) -> &[VertexId] {
        &self.members[c]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[VertexId]> + '_ {
        self.members.iter().map(Vec::as_slice)
    }

    /// Number of components of each size.
    pub fn size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for m in &self.members {
            *h.entry(m.len()).or_insert(0) += 1;
        }
        h
    }
}

pub fn connected_components(graph: &GeometricGraph) -> ComponentPartition {
    let n = graph.n_vertices();
    let mut uf = UnionFind::<usize>::new(n);
    for (a, b) in graph.edges() {
        uf.union(a, b);
    }
    let mut id_of_root = vec![u32::MAX; n];
    let mut component_of = vec![0u32; n];
    let mut members: Vec<Vec<VertexId>> = Vec::new();
    for v in 0..n {
        let root = uf.find_mut(v);
        if id_of_root[root] == u32::MAX {
            id_of_root[root] = members.len() as u32;
            members.push(Vec::new());
        }
        let id = id_of_root[root];
        component_of[v] = id;
        members[id as usize].push(v as VertexId);
    }
    ComponentPartition { component_of, members }
}

/// Canonical labelling of a graph on at most [`MAX_PATTERN_VERTICES`] vertices:
/// the lexicographically smallest upper-triangle adjacency string over all
/// vertex orders, read column by column (`(0,1), (0,2), (1,2), (0,3), ...`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub n: u8,
    pub code: u64,
}

impl CanonicalForm {
    /// `adjacency[v]` is a bitmask of the neighbors of `v`.
    pub fn from_adjacency(adjacency: &[u16]) -> Self {
        let n = adjacency.len();
        assert!(n <= MAX_PATTERN_VERTICES);
        let total_bits = n * n.saturating_sub(1) / 2;
        let mut search = CanonSearch {
            adjacency,
            total_bits,
            best: u64::MAX,
            order: Vec::with_capacity(n),
            used: 0,
        };
        search.place(0, 0);
        let code = if n < 2 { 0 } else { search.best };
        CanonicalForm { n: n as u8, code }
    }
}

struct CanonSearch<'a> {
    adjacency: &'a [u16],
    total_bits: usize,
    best: u64,
    order: Vec<usize>,
    used: u16,
}

impl CanonSearch<'_> {
    /// `code` holds `bits` leading bits of the encoding.
    fn place(&mut self, code: u64, bits: usize) {
        let n = self.adjacency.len();
        let pos = self.order.len();
        if pos == n {
            if code < self.best {
                self.best = code;
            }
            return;
        }
        for v in 0..n {
            if self.used >> v & 1 == 1 {
                continue;
            }
            let mut next = code;
            for &u in &self.order {
                next = next << 1 | u64::from(self.adjacency[v] >> u & 1);
            }
            let next_bits = bits + pos;
            if self.best != u64::MAX && next > self.best >> (self.total_bits - next_bits) {
                continue;
            }
            self.order.push(v);
            self.used |= 1 << v;
            self.place(next, next_bits);
            self.used &= !(1 << v);
            self.order.pop();
        }
    }
}

/// A small graph to count inside geometric graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    canonical: CanonicalForm,
}

impl PatternGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, CensusError> {
        if n > MAX_PATTERN_VERTICES {
            return Err(CensusError::PatternTooLarge(n, MAX_PATTERN_VERTICES));
        }
        let mut adjacency = vec![0u16; n];
        let mut list = Vec::new();
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(CensusError::BadEdge(a, b));
            }
            if adjacency[a] >> b & 1 == 0 {
                list.push((a.min(b), a.max(b)));
            }
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
        }
        list.sort_unstable();
        Ok(PatternGraph { n, edges: list, canonical: CanonicalForm::from_adjacency(&adjacency) })
    }

    pub fn path(n: usize) -> Result<Self, CensusError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        PatternGraph::new(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self, CensusError> {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        PatternGraph::new(n, &edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        self.canonical
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && connected_components(&GeometricGraph::from_edges(self.n, &self.edges)).len() == 1
    }

    /// Edge-list text: optional `# n=<v>` header, then one `a b` pair per line.
    pub fn parse(text: &str) -> Result<Self, CensusError> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            let err = |reason: String| CensusError::Parse { line: lineno + 1, reason };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for tok in rest.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("n=") {
                        n = Some(v.parse().map_err(|_| err(format!("bad n {v:?}")))?);
                    }
                }
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| err(format!("bad vertex {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let [a, b] = nums[..] else {
                return Err(err("expected two vertices per line".into()));
            };
            edges.push((a, b));
        }
        let n = n.unwrap_or_else(|| edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0));
        PatternGraph::new(n, &edges)
    }
}

fn canonical_of_induced(graph: &GeometricGraph, vertices: &[VertexId]) -> CanonicalForm {
    let adjacency: Vec<u16> = vertices
        .iter()
        .map(|&v| {
            vertices
                .iter()
                .enumerate()
                .filter(|&(_, &w)| graph.adjacent(v as usize, w as usize))
                .fold(0u16, |m, (j, _)| m | 1 << j)
        })
        .collect();
    CanonicalForm::from_adjacency(&adjacency)
}

fn induced_edge_count(graph: &GeometricGraph, vertices: &[VertexId]) -> usize {
    vertices
        .iter()
        .map(|&v| vertices.iter().filter(|&&w| w > v && graph.adjacent(v as usize, w as usize)).count())
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// The 1-skeleton of the boundary of the `(k+1)`-dimensional cross-polytope, `k >= 1`.
    CrossPolytopeSkeleton(usize),
    /// Complete graph on `j + 1` vertices.
    Simplex(usize),
    Tree,
    /// Anything else; canonical form when small enough to compute.
    Other(Option<CanonicalForm>),
}

/// Classifies the induced subgraph on one component (given as its vertex list).
pub fn classify_component(graph: &GeometricGraph, component: &[VertexId]) -> Classification {
    let v = component.len();
    let e = induced_edge_count(graph, component);
    if let Some(k) = cross_polytope_order(graph, component, e) {
        return Classification::CrossPolytopeSkeleton(k);
    }
    if e == v * (v - 1) / 2 {
        return Classification::Simplex(v - 1);
    }
    if e + 1 == v {
        return Classification::Tree;
    }
    let form = (v <= MAX_PATTERN_VERTICES).then(|| canonical_of_induced(graph, component));
    Classification::Other(form)
}

/// `Some(k)` if the induced graph has `2k + 2 >= 4` vertices and its
/// complement is a perfect matching.
fn cross_polytope_order(graph: &GeometricGraph, component: &[VertexId], edges: usize) -> Option<usize> {
    let v = component.len();
    if v < 4 || v % 2 == 1 || edges != v * (v - 1) / 2 - v / 2 {
        return None;
    }
    let all_missing_one = component
        .iter()
        .all(|&a| component.iter().filter(|&&b| b != a && !graph.adjacent(a as usize, b as usize)).count() == 1);
    all_missing_one.then_some(v / 2 - 1)
}

/// Number of components isomorphic to the 1-skeleton of `O_k`.
pub fn crosspolytope_component_count(graph: &GeometricGraph, k: usize) -> usize {
    crosspolytope_count_in(graph, &connected_components(graph), k)
}

pub fn crosspolytope_count_in(graph: &GeometricGraph, partition: &ComponentPartition, k: usize) -> usize {
    let size = 2 * k + 2;
    partition
        .iter()
        .filter(|c| c.len() == size)
        .filter(|c| cross_polytope_order(graph, c, induced_edge_count(graph, c)) == Some(k))
        .count()
}

/// Components on exactly `k + 2` points whose every `(k+1)`-subset passes
/// the Čech test at `r` while the whole set fails it.
pub fn empty_simplex_count(cloud: &PointCloud, r: f64, k: usize) -> Result<usize, CensusError> {
    let graph = build_geometric_graph(cloud, r).map_err(|_| CensusError::InvalidRadius(r))?;
    Ok(empty_simplex_count_in(cloud, &graph, &connected_components(&graph), k))
}

pub fn empty_simplex_count_in(cloud: &PointCloud, graph: &GeometricGraph, partition: &ComponentPartition, k: usize) -> usize {
    let Some(r) = graph.radius() else { return 0 };
    if k == 0 {
        return 0;
    }
    let size = k + 2;
    partition
        .iter()
        .filter(|c| c.len() == size && induced_edge_count(graph, c) == size * (size - 1) / 2)
        .filter(|c| {
            let pts: Vec<&[f64]> = c.iter().map(|&v| cloud.point(v as usize)).collect();
            if cech_accepts(&pts, r) {
                return false;
            }
            (0..size).all(|skip| {
                let sub: Vec<&[f64]> = pts.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, p)| *p).collect();
                cech_accepts(&sub, r)
            })
        })
        .count()
}

/// `k`-faces grouped by the vertex count of their component.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceComponentCounts {
    /// `k -> (component size -> face count)`.
    pub f_eq: BTreeMap<usize, BTreeMap<usize, usize>>,
}

impl FaceComponentCounts {
    pub fn f_eq(&self, k: usize, i: usize) -> usize {
        self.f_eq.get(&k).and_then(|m| m.get(&i)).copied().unwrap_or(0)
    }

    pub fn f_ge(&self, k: usize, i: usize) -> usize {
        self.f_eq.get(&k).map_or(0, |m| m.range(i..).map(|(_, &c)| c).sum())
    }

    /// Tail sums at every size where `f_eq` is recorded.
    pub fn f_ge_table(&self) -> BTreeMap<usize, BTreeMap<usize, usize>> {
        self.f_eq
            .iter()
            .map(|(&k, m)| (k, m.keys().map(|&i| (i, self.f_ge(k, i))).collect()))
            .collect()
    }
}

pub fn face_component_counts(complex: &SimplicialComplex, partition: &ComponentPartition) -> FaceComponentCounts {
    let mut f_eq = BTreeMap::new();
    for k in 0..=complex.max_dim() {
        let mut by_size: BTreeMap<usize, usize> = BTreeMap::new();
        for face in complex.faces(k) {
            let size = partition.members(partition.component_of(face[0])).len();
            *by_size.entry(size).or_insert(0) += 1;
        }
        f_eq.insert(k, by_size);
    }
    FaceComponentCounts { f_eq }
}

/// Components whose graph is isomorphic to `pattern`.
pub fn component_iso_count(graph: &GeometricGraph, pattern: &PatternGraph) -> usize {
    component_iso_count_in(graph, &connected_components(graph), pattern)
}

pub fn component_iso_count_in(graph: &GeometricGraph, partition: &ComponentPartition, pattern: &PatternGraph) -> usize {
    partition
        .iter()
        .filter(|c| c.len() == pattern.n && induced_edge_count(graph, c) == pattern.edges.len())
        .filter(|c| canonical_of_induced(graph, c) == pattern.canonical)
        .count()
}

/// Induced subgraphs isomorphic to a connected `pattern`, found by
/// enumerating every connected vertex subset of the pattern's size once.
pub fn induced_subgraph_count(graph: &GeometricGraph, pattern: &PatternGraph) -> Result<usize, CensusError> {
    induced_subgraph_count_with_budget(graph, pattern, DEFAULT_SUBSET_BUDGET)
}

pub fn induced_subgraph_count_with_budget(
    graph: &GeometricGraph,
    pattern: &PatternGraph,
    budget: usize,
) -> Result<usize, CensusError> {
    if pattern.n > MAX_INDUCED_PATTERN_VERTICES {
        return Err(CensusError::PatternTooLarge(pattern.n, MAX_INDUCED_PATTERN_VERTICES));
    }
    if !pattern.is_connected() {
        return Err(CensusError::PatternDisconnected);
    }
    let mut count = 0;
    let mut visited = 0;
    let mut result = Ok(());
    for_each_connected_subset(graph, pattern.n, &mut |subset| {
        visited += 1;
        if visited > budget {
            result = Err(CensusError::SubsetBudgetExceeded(budget));
            return false;
        }
        if induced_edge_count(graph, subset) == pattern.edges.len() && canonical_of_induced(graph, subset) == pattern.canonical {
            count += 1;
        }
        true
    });
    result.map(|_| count)
}

/// ESU enumeration (each connected `size`-subset exactly once, rooted at its
/// smallest vertex). The callback returns `false` to stop.
fn for_each_connected_subset(graph: &GeometricGraph, size: usize, visit: &mut dyn FnMut(&[VertexId]) -> bool) {
    fn extend(
        graph: &GeometricGraph,
        size: usize,
        root: VertexId,
        subset: &mut Vec<VertexId>,
        mut ext: Vec<VertexId>,
        visit: &mut dyn FnMut(&[VertexId]) -> bool,
    ) -> bool {
        if subset.len() == size {
            return visit(subset);
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &u in graph.neighbors(w as usize) {
                // exclusive neighbors of w: beyond the root, outside and not adjacent to the subset
                if u > root
                    && !subset.contains(&u)
                    && !next.contains(&u)
                    && !subset.iter().any(|&s| graph.adjacent(s as usize, u as usize))
                {
                    next.push(u);
                }
            }
            subset.push(w);
            let go_on = extend(graph, size, root, subset, next, visit);
            subset.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    if size == 0 {
        return;
    }
    for v in 0..graph.n_vertices() as VertexId {
        let ext: Vec<VertexId> = graph.neighbors(v as usize).iter().copied().filter(|&w| w > v).collect();
        let mut subset = vec![v];
        if !extend(graph, size, v, &mut subset, ext, visit) {
            return;
        }
    }
}

/// Component statistics of one instance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    /// `k -> o_tilde_k` for `1 <= k <= k_max`.
    pub o_tilde: BTreeMap<usize, usize>,
    /// `k -> s_tilde_k`; empty unless computed from a Čech complex.
    pub s_tilde: BTreeMap<usize, usize>,
    pub f_eq: BTreeMap<usize, BTreeMap<usize, usize>>,
    pub f_ge: BTreeMap<usize, BTreeMap<usize, usize>>,
    pub component_size_histogram: BTreeMap<usize, usize>,
    pub components: usize,
}

impl CensusReport {
    pub fn o_tilde(&self, k: usize) -> usize {
        self.o_tilde.get(&k).copied().unwrap_or(0)
    }

    pub fn s_tilde(&self, k: usize) -> usize {
        self.s_tilde.get(&k).copied().unwrap_or(0)
    }

    pub fn f_eq(&self, k: usize, i: usize) -> usize {
        self.f_eq.get(&k).and_then(|m| m.get(&i)).copied().unwrap_or(0)
    }

    pub fn f_ge(&self, k: usize, i: usize) -> usize {
        self.f_eq.get(&k).map_or(0, |m| m.range(i..).map(|(_, &c)| c).sum())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("census serializes")
    }
}

/// Full census for `1 <= k <= k_max`. `cloud` enables the Čech counts `s_tilde`.
pub fn census_report(
    graph: &GeometricGraph,
    complex: &SimplicialComplex,
    partition: &ComponentPartition,
    cloud: Option<&PointCloud>,
    k_max: usize,
) -> CensusReport {
    let faces = face_component_counts(complex, partition);
    let o_tilde = (1..=k_max).map(|k| (k, crosspolytope_count_in(graph, partition, k))).collect();
    let s_tilde = match cloud {
        Some(cloud) => (1..=k_max).map(|k| (k, empty_simplex_count_in(cloud, graph, partition, k))).collect(),
        None => BTreeMap::new(),
    };
    CensusReport {
        o_tilde,
        s_tilde,
        f_ge: faces.f_ge_table(),
        f_eq: faces.f_eq,
        component_size_histogram: partition.size_histogram(),
        components: partition.len(),
    }
}
