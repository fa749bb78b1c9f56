//! Distance-ordered discrete gradient field on a Vietoris–Rips complex.
//!
//! Vertices are ranked by distance to an origin. A face `S` whose lowest
//! rank is `i1` is matched with `S + {x_a}` for the smallest rank `a < i1`
//! adjacent to every vertex of `S`, when such an `a` exists. Ranks strictly
//! decrease along V-paths, so the matching is acyclic; [`validate_gradient_field`]
//! checks both properties structurally rather than assuming them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ComplexKind, Simplex, SimplicialComplex};
use crate::geometry::{squared_distance, GeometricGraph, PointCloud, VertexId};

#[derive(Debug, Error)]
pub enum MorseError {
    #[error("origin has dimension {got}, cloud has dimension {expected}")]
    OriginDimension { expected: usize, got: usize },
    #[error("the distance-ordered field is defined for Vietoris–Rips complexes only, got {0:?}")]
    NotRips(ComplexKind),
    #[error("complex and graph disagree: {0}")]
    SkeletonMismatch(String),
    #[error("order covers {order} vertices, complex has {complex}")]
    OrderSize { order: usize, complex: usize },
}

/// Where to measure distances from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginRule {
    /// Center of the sampling domain (origin for the ball and the Gaussian,
    /// `(1/2, ..., 1/2)` for the cube); the centroid when the density is unknown.
    #[default]
    DomainCenter,
    Centroid,
    Explicit(Vec<f64>),
}

impl OriginRule {
    pub fn resolve(&self, cloud: &PointCloud) -> Vec<f64> {
        match self {
            OriginRule::DomainCenter => cloud.density().map_or_else(|| cloud.centroid(), |d| d.center()),
            OriginRule::Centroid => cloud.centroid(),
            OriginRule::Explicit(o) => o.clone(),
        }
    }
}

/// Vertices sorted by `(distance^2 to origin, index)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceOrder {
    origin: Vec<f64>,
    permutation: Vec<VertexId>,
    rank: Vec<u32>,
}

impl DistanceOrder {
    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    /// `permutation[i]` is the vertex of rank `i`.
    pub fn permutation(&self) -> &[VertexId] {
        &self.permutation
    }

    pub fn rank_of(&self, v: VertexId) -> u32 {
        self.rank[v as usize]
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn nearest(&self) -> Option<VertexId> {
        self.permutation.first().copied()
    }
}

pub fn distance_order(cloud: &PointCloud, origin: &[f64]) -> Result<DistanceOrder, MorseError> {
    if origin.len() != cloud.dim() {
        return Err(MorseError::OriginDimension { expected: cloud.dim(), got: origin.len() });
    }
    let dist: Vec<f64> = cloud.points().map(|p| squared_distance(p, origin)).collect();
    let mut permutation: Vec<VertexId> = (0..cloud.len() as VertexId).collect();
    permutation.sort_by(|&a, &b| dist[a as usize].total_cmp(&dist[b as usize]).then(a.cmp(&b)));
    let mut rank = vec![0u32; cloud.len()];
    for (i, &v) in permutation.iter().enumerate() {
        rank[v as usize] = i as u32;
    }
    Ok(DistanceOrder { origin: origin.to_vec(), permutation, rank })
}

pub fn distance_order_with(cloud: &PointCloud, rule: &OriginRule) -> Result<DistanceOrder, MorseError> {
    distance_order(cloud, &rule.resolve(cloud))
}

/// A matching of faces with cofaces one dimension up.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiscreteVectorField {
    pairs: Vec<(Simplex, Simplex)>,
    nearest: Option<VertexId>,
}

impl DiscreteVectorField {
    /// Hand-built field; no distinguished nearest vertex.
    pub fn from_pairs(pairs: Vec<(Simplex, Simplex)>) -> Self {
        DiscreteVectorField { pairs, nearest: None }
    }

    pub fn pairs(&self) -> &[(Simplex, Simplex)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn nearest_vertex(&self) -> Option<VertexId> {
        self.nearest
    }
}

/// Neighbor ranks per vertex, ascending.
struct RankedAdjacency {
    ranks: Vec<Vec<u32>>,
}

impl RankedAdjacency {
    fn new(graph: &GeometricGraph, order: &DistanceOrder) -> Self {
        let ranks = (0..graph.n_vertices())
            .map(|v| {
                let mut r: Vec<u32> = graph.neighbors(v).iter().map(|&w| order.rank_of(w)).collect();
                r.sort_unstable();
                r
            })
            .collect();
        RankedAdjacency { ranks }
    }

    /// Smallest rank `a < below` adjacent to every vertex of `face`.
    fn lowest_common_neighbor(&self, face: &[VertexId], below: u32) -> Option<u32> {
        let shortest = face.iter().min_by_key(|&&v| self.ranks[v as usize].len())?;
        self.ranks[*shortest as usize]
            .iter()
            .take_while(|&&a| a < below)
            .find(|&&a| face.iter().all(|&v| v == *shortest || self.ranks[v as usize].binary_search(&a).is_ok()))
            .copied()
    }
}

/// Builds the distance-ordered field on every stored face of a Rips complex.
/// A face in the top stored dimension may be matched with a coface above
/// the cap; such pairs are kept so that critical counts are those of the
/// full clique complex.
pub fn build_gradient_field(
    complex: &SimplicialComplex,
    graph: &GeometricGraph,
    order: &DistanceOrder,
) -> Result<DiscreteVectorField, MorseError> {
    if complex.kind() == ComplexKind::Cech {
        return Err(MorseError::NotRips(complex.kind()));
    }
    check_skeleton(complex, graph)?;
    if order.len() != complex.n_vertices() {
        return Err(MorseError::OrderSize { order: order.len(), complex: complex.n_vertices() });
    }
    let adj = RankedAdjacency::new(graph, order);
    let mut pairs = Vec::new();
    for dim in 0..=complex.max_dim() {
        for face in complex.faces(dim) {
            let lowest = face.iter().map(|&v| order.rank_of(v)).min().expect("faces are nonempty");
            if let Some(a) = adj.lowest_common_neighbor(face, lowest) {
                let sigma = Simplex::from_sorted_unchecked(face.to_vec());
                let tau = sigma.with_vertex(order.permutation()[a as usize]).expect("a common neighbor is not in the face");
                pairs.push((sigma, tau));
            }
        }
    }
    Ok(DiscreteVectorField { pairs, nearest: order.nearest() })
}

fn check_skeleton(complex: &SimplicialComplex, graph: &GeometricGraph) -> Result<(), MorseError> {
    if complex.n_vertices() != graph.n_vertices() {
        return Err(MorseError::SkeletonMismatch(format!(
            "{} vertices in the complex, {} in the graph",
            complex.n_vertices(),
            graph.n_vertices()
        )));
    }
    if complex.max_dim() >= 1 {
        if complex.n_faces(1) != graph.n_edges() {
            return Err(MorseError::SkeletonMismatch(format!(
                "{} edges in the complex, {} in the graph",
                complex.n_faces(1),
                graph.n_edges()
            )));
        }
        if let Some(e) = complex.faces(1).find(|e| !graph.adjacent(e[0] as usize, e[1] as usize)) {
            return Err(MorseError::SkeletonMismatch(format!("edge {e:?} is not in the graph")));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `sigma` is not a facet of `tau`, or a face is missing from the complex.
    BadPair { sigma: Simplex, tau: Simplex, reason: String },
    /// A face occurs in more than one pair.
    Repeated(Simplex),
    /// A closed V-path `a0 < b0 > a1 < b1 > ... > a0`.
    Cycle(Vec<Simplex>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn matching_ok(&self) -> bool {
        !self.violations.iter().any(|v| matches!(v, Violation::BadPair { .. } | Violation::Repeated(_)))
    }

    pub fn acyclic_ok(&self) -> bool {
        !self.violations.iter().any(|v| matches!(v, Violation::Cycle(_)))
    }

    pub fn cycle_witness(&self) -> Option<&[Simplex]> {
        self.violations.iter().find_map(|v| match v {
            Violation::Cycle(path) => Some(path.as_slice()),
            _ => None,
        })
    }
}

/// Dense ids for faces: stored faces by position, anything else on demand.
struct FaceIds<'a> {
    complex: &'a SimplicialComplex,
    offsets: Vec<usize>,
    extra: HashMap<Vec<VertexId>, usize>,
    extra_faces: Vec<Vec<VertexId>>,
}

impl<'a> FaceIds<'a> {
    fn new(complex: &'a SimplicialComplex) -> Self {
        let mut offsets = vec![0];
        for d in 0..=complex.max_dim() {
            offsets.push(offsets[d] + complex.n_faces(d));
        }
        FaceIds { complex, offsets, extra: HashMap::new(), extra_faces: Vec::new() }
    }

    fn stored(&self) -> usize {
        self.offsets[self.offsets.len() - 1]
    }

    fn find(&self, face: &[VertexId]) -> Option<usize> {
        match self.complex.index_of(face) {
            Some(i) => Some(self.offsets[face.len() - 1] + i),
            None => self.extra.get(face).copied(),
        }
    }

    fn intern(&mut self, face: &[VertexId]) -> usize {
        if let Some(id) = self.find(face) {
            return id;
        }
        let id = self.stored() + self.extra_faces.len();
        self.extra.insert(face.to_vec(), id);
        self.extra_faces.push(face.to_vec());
        id
    }

    fn vertices(&self, id: usize) -> &[VertexId] {
        if id >= self.stored() {
            return &self.extra_faces[id - self.stored()];
        }
        let dim = self.offsets.partition_point(|&o| o <= id) - 1;
        self.complex.face(dim, id - self.offsets[dim])
    }
}

/// Exhaustive check of the matching property and of acyclicity.
pub fn validate_gradient_field(complex: &SimplicialComplex, dvf: &DiscreteVectorField) -> ValidationReport {
    let mut report = ValidationReport { pairs_checked: dvf.len(), violations: Vec::new() };
    let mut ids = FaceIds::new(complex);
    let mut arcs = Vec::with_capacity(dvf.len());
    for (sigma, tau) in dvf.pairs() {
        let is_facet = tau.dim() == sigma.dim() + 1 && sigma.vertices().iter().all(|v| tau.vertices().binary_search(v).is_ok());
        let sigma_id = ids.find(sigma.vertices());
        let tau_id = ids.find(tau.vertices());
        let present = |id: Option<usize>, s: &Simplex| {
            id.is_some_and(|id| id < ids.stored())
                || (s.dim() == complex.max_dim() + 1 && s.facets().all(|f| complex.contains(f.vertices())))
        };
        if !is_facet {
            report.violations.push(Violation::BadPair {
                sigma: sigma.clone(),
                tau: tau.clone(),
                reason: "not a codimension-1 face".into(),
            });
        } else if !sigma_id.is_some_and(|id| id < ids.stored()) || !present(tau_id, tau) {
            report.violations.push(Violation::BadPair {
                sigma: sigma.clone(),
                tau: tau.clone(),
                reason: "face not in the complex".into(),
            });
        }
        let a = sigma_id.unwrap_or_else(|| ids.intern(sigma.vertices()));
        let b = tau_id.unwrap_or_else(|| ids.intern(tau.vertices()));
        arcs.push((a, b));
    }
    let total = ids.stored() + ids.extra_faces.len();
    let mut uses = vec![0u32; total];
    for &(a, b) in &arcs {
        uses[a] += 1;
        uses[b] += 1;
    }
    let mut repeated: Vec<Simplex> = (0..total)
        .filter(|&id| uses[id] > 1)
        .map(|id| Simplex::from_sorted_unchecked(ids.vertices(id).to_vec()))
        .collect();
    repeated.sort();
    report.violations.extend(repeated.into_iter().map(Violation::Repeated));

    if let Some(cycle) = find_closed_v_path(&ids, arcs) {
        report.violations.push(Violation::Cycle(cycle));
    }
    report
}

/// Directed graph on lower faces: `a -> a'` when `a` is matched with `b` and
/// `a'` is another facet of `b` that is itself matched upward.
fn find_closed_v_path(ids: &FaceIds, mut arcs: Vec<(usize, usize)>) -> Option<Vec<Simplex>> {
    arcs.sort_unstable();
    arcs.dedup();
    let total = ids.stored() + ids.extra_faces.len();
    // CSR layout of the upward arcs
    let mut start = vec![0usize; total + 1];
    for &(a, _) in &arcs {
        start[a + 1] += 1;
    }
    for i in 0..total {
        start[i + 1] += start[i];
    }
    let up = |a: usize| arcs[start[a]..start[a + 1]].iter().map(|&(_, b)| b);
    let successors = |a: usize| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let own = ids.vertices(a);
        for tau in up(a) {
            let verts = ids.vertices(tau);
            let mut facet = Vec::with_capacity(verts.len() - 1);
            for skip in 0..verts.len() {
                facet.clear();
                facet.extend(verts.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                if facet.as_slice() == own {
                    continue;
                }
                if let Some(f) = ids.find(&facet) {
                    if start[f] < start[f + 1] {
                        out.push((tau, f));
                    }
                }
            }
        }
        out
    };

    const NEW: u8 = 0;
    const OPEN: u8 = 1;
    const DONE: u8 = 2;
    let mut mark = vec![NEW; total];
    let to_simplex = |id: usize| Simplex::from_sorted_unchecked(ids.vertices(id).to_vec());
    let mut roots: Vec<usize> = (0..total).filter(|&a| start[a] < start[a + 1]).collect();
    roots.sort_by(|&x, &y| ids.vertices(x).len().cmp(&ids.vertices(y).len()).then_with(|| ids.vertices(x).cmp(ids.vertices(y))));
    for root in roots {
        if mark[root] != NEW {
            continue;
        }
        // iterative DFS; each frame holds (face, successors, next index)
        let mut stack: Vec<(usize, Vec<(usize, usize)>, usize)> = vec![(root, successors(root), 0)];
        mark[root] = OPEN;
        while let Some((face, succ, idx)) = stack.last_mut() {
            if *idx == succ.len() {
                mark[*face] = DONE;
                stack.pop();
                continue;
            }
            let (_, next) = succ[*idx];
            *idx += 1;
            match mark[next] {
                OPEN => {
                    // unwind the stack back to `next` to build the witness
                    let pos = stack.iter().position(|(f, _, _)| *f == next).expect("open face is on the stack");
                    let mut path = Vec::new();
                    for (f, s, i) in &stack[pos..] {
                        path.push(to_simplex(*f));
                        path.push(to_simplex(s[*i - 1].0));
                    }
                    path.push(to_simplex(next));
                    return Some(path);
                }
                DONE => {}
                _ => {
                    mark[next] = OPEN;
                    let s = successors(next);
                    stack.push((next, s, 0));
                }
            }
        }
    }
    None
}

/// Critical (unmatched) faces per dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalCensus {
    #[serde(rename = "C")]
    pub counts: Vec<usize>,
    pub nearest_vertex_critical: bool,
    pub pairs: usize,
}

impl CriticalCensus {
    pub fn count(&self, k: usize) -> usize {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("census serializes")
    }
}

/// Counts unmatched faces of each stored dimension. `nearest_vertex_critical`
/// holds when the only critical vertex is the one nearest the origin.
pub fn critical_cells(complex: &SimplicialComplex, dvf: &DiscreteVectorField) -> CriticalCensus {
    let mut matched: Vec<Vec<bool>> = (0..=complex.max_dim()).map(|d| vec![false; complex.n_faces(d)]).collect();
    for (sigma, tau) in dvf.pairs() {
        for s in [sigma, tau] {
            if s.dim() <= complex.max_dim() {
                if let Some(i) = complex.index_of(s.vertices()) {
                    matched[s.dim()][i] = true;
                }
            }
        }
    }
    let counts: Vec<usize> = matched.iter().map(|m| m.iter().filter(|&&x| !x).count()).collect();
    let nearest_vertex_critical = match dvf.nearest_vertex() {
        Some(v) => counts[0] == 1 && !matched[0][v as usize],
        None => false,
    };
    CriticalCensus { counts, nearest_vertex_critical, pairs: dvf.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::rips_complex;
    use crate::geometry::{build_geometric_graph, sample_points, Density};
    use crate::homology::{betti_numbers, PrimeField};

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    /// Points on the positive x-axis at the given distances from the origin.
    fn on_axis(xs: &[f64]) -> PointCloud {
        let pts: Vec<[f64; 2]> = xs.iter().map(|&x| [x, 0.0]).collect();
        PointCloud::from_points(2, &pts).unwrap()
    }

    #[test]
    fn order_by_distance() {
        let cloud = on_axis(&[3.0, 1.0, 2.0]);
        let o = distance_order(&cloud, &[0.0, 0.0]).unwrap();
        assert_eq!(o.permutation(), &[1, 2, 0]);
        assert_eq!(o.rank_of(0), 2);
    }

    #[test]
    fn ties_by_index() {
        let cloud = PointCloud::from_points(2, &[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let o = distance_order(&cloud, &[0.0, 0.0]).unwrap();
        assert_eq!(o.permutation(), &[0, 1]);
    }

    #[test]
    fn centroid_rule_matches_explicit_centroid() {
        let cloud = sample_points(Density::cube(2).unwrap(), 30, 4).unwrap();
        let a = distance_order_with(&cloud, &OriginRule::Centroid).unwrap();
        let b = distance_order(&cloud, &cloud.centroid()).unwrap();
        assert_eq!(a, b);
        let c = distance_order_with(&cloud, &OriginRule::DomainCenter).unwrap();
        assert_eq!(c.origin(), &[0.5, 0.5]);
    }

    #[test]
    fn origin_dimension_checked() {
        let cloud = on_axis(&[1.0]);
        assert!(matches!(distance_order(&cloud, &[0.0]), Err(MorseError::OriginDimension { .. })));
    }

    fn field_for(cloud: &PointCloud, r: f64, max_dim: usize) -> (SimplicialComplex, DiscreteVectorField) {
        let g = build_geometric_graph(cloud, r).unwrap();
        let cx = rips_complex(&g, max_dim).unwrap();
        let o = distance_order(cloud, &vec![0.0; cloud.dim()]).unwrap();
        let dvf = build_gradient_field(&cx, &g, &o).unwrap();
        (cx, dvf)
    }

    #[test]
    fn single_edge() {
        // x_1 = vertex 0, x_2 = vertex 1
        let (cx, dvf) = field_for(&on_axis(&[1.0, 1.5]), 1.0, 1);
        assert_eq!(dvf.pairs(), &[(s(&[1]), s(&[0, 1]))]);
        let c = critical_cells(&cx, &dvf);
        assert_eq!(c.counts, vec![1, 0]);
        assert!(c.nearest_vertex_critical);
    }

    #[test]
    fn triangle() {
        let (cx, dvf) = field_for(&on_axis(&[1.0, 1.2, 1.4]), 1.0, 2);
        let mut pairs = dvf.pairs().to_vec();
        pairs.sort();
        assert_eq!(
            pairs,
            vec![(s(&[1]), s(&[0, 1])), (s(&[1, 2]), s(&[0, 1, 2])), (s(&[2]), s(&[0, 2]))]
        );
        assert_eq!(critical_cells(&cx, &dvf).counts, vec![1, 0, 0]);
        assert!(validate_gradient_field(&cx, &dvf).is_valid());
    }

    #[test]
    fn two_components() {
        let (cx, dvf) = field_for(&on_axis(&[1.0, 1.5, 5.0, 5.5]), 1.0, 1);
        let c = critical_cells(&cx, &dvf);
        assert_eq!(c.counts, vec![2, 0]);
        assert!(!c.nearest_vertex_critical);
        let b = betti_numbers(&cx, 0, PrimeField::default()).unwrap();
        assert_eq!(b.betti(0), 2);
    }

    #[test]
    fn top_faces_pair_above_the_cap() {
        let (cx, dvf) = field_for(&on_axis(&[1.0, 1.2, 1.4]), 1.0, 1);
        // {1,2} pairs with the triangle, which is not stored
        assert!(dvf.pairs().contains(&(s(&[1, 2]), s(&[0, 1, 2]))));
        assert_eq!(critical_cells(&cx, &dvf).counts, vec![1, 0]);
        assert!(validate_gradient_field(&cx, &dvf).is_valid());
    }

    #[test]
    fn sparse_instance_seed_42() {
        let cloud = sample_points(Density::cube(2).unwrap(), 30, 42).unwrap();
        let (cx, dvf) = field_for(&cloud, 0.05, 2);
        let c = critical_cells(&cx, &dvf);
        let b = betti_numbers(&cx, 1, PrimeField::default()).unwrap();
        assert!(c.count(1) >= b.betti(1));
        assert!(c.count(0) >= b.betti(0));
        assert!(validate_gradient_field(&cx, &dvf).is_valid());
    }

    #[test]
    fn isolated_vertex_adds_one_critical_cell() {
        let base = sample_points(Density::ball(2).unwrap(), 25, 8).unwrap();
        let mut pts: Vec<Vec<f64>> = base.points().map(<[f64]>::to_vec).collect();
        let (cx, dvf) = field_for(&base, 0.4, 2);
        let before = critical_cells(&cx, &dvf);
        pts.push(vec![50.0, 50.0]);
        let grown = PointCloud::from_points(2, &pts).unwrap();
        let (cx2, dvf2) = field_for(&grown, 0.4, 2);
        let after = critical_cells(&cx2, &dvf2);
        assert_eq!(after.count(0), before.count(0) + 1);
        assert_eq!(after.counts[1..], before.counts[1..]);
    }

    #[test]
    fn double_pairing_reported() {
        let cx = SimplicialComplex::from_generators(3, 2, [s(&[0, 1, 2])]).unwrap();
        let dvf = DiscreteVectorField::from_pairs(vec![(s(&[0]), s(&[0, 1])), (s(&[0]), s(&[0, 2]))]);
        let rep = validate_gradient_field(&cx, &dvf);
        assert!(!rep.matching_ok());
        assert!(rep.violations.contains(&Violation::Repeated(s(&[0]))));
    }

    #[test]
    fn cycle_on_square_reported() {
        // square 0-1-2-3-0: {0}->{0,1}, {1}->{1,2}, {2}->{2,3}, {3}->{0,3}
        let cx = SimplicialComplex::from_generators(4, 1, [s(&[0, 1]), s(&[1, 2]), s(&[2, 3]), s(&[0, 3])]).unwrap();
        let dvf = DiscreteVectorField::from_pairs(vec![
            (s(&[0]), s(&[0, 1])),
            (s(&[1]), s(&[1, 2])),
            (s(&[2]), s(&[2, 3])),
            (s(&[3]), s(&[0, 3])),
        ]);
        let rep = validate_gradient_field(&cx, &dvf);
        assert!(rep.matching_ok());
        assert!(!rep.acyclic_ok());
        let w = rep.cycle_witness().unwrap();
        assert_eq!(w.len(), 9);
        assert_eq!(w.first(), w.last());
    }

    #[test]
    fn rejects_cech_and_mismatched_graphs() {
        let cloud = on_axis(&[1.0, 1.5, 2.0]);
        let cech = crate::complex::cech_complex(&cloud, 1.0, 1).unwrap();
        let g = build_geometric_graph(&cloud, 1.0).unwrap();
        let o = distance_order(&cloud, &[0.0, 0.0]).unwrap();
        assert!(matches!(build_gradient_field(&cech, &g, &o), Err(MorseError::NotRips(_))));
        let rips = rips_complex(&g, 1).unwrap();
        let other = build_geometric_graph(&cloud, 0.6).unwrap();
        assert!(matches!(build_gradient_field(&rips, &other, &o), Err(MorseError::SkeletonMismatch(_))));
    }

    #[test]
    fn json_shape() {
        let (cx, dvf) = field_for(&on_axis(&[1.0, 1.5]), 1.0, 1);
        assert_eq!(critical_cells(&cx, &dvf).to_json(), r#"{"C":[1,0],"nearest_vertex_critical":true,"pairs":1}"#);
    }
}
