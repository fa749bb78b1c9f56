//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use geocomplex::complex::{min_enclosing_ball, SimplicialComplex};
use geocomplex::geometry::{GeometricGraph, PointCloud};

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Bounds on the smallest enclosing radius from the dual problem
/// `max_{w in simplex} sum w_i |p_i|^2 - |sum w_i p_i|^2`, solved by
/// repeatedly shifting weight between the most violating pair of points.
/// Returns `(sqrt(dual value), max_i |c - p_i|)` for `c = sum w_i p_i`;
/// the true radius lies between them.
pub fn reference_meb_bounds(points: &[&[f64]]) -> (f64, f64) {
    let m = points.len();
    let d = points[0].len();
    let sq: Vec<f64> = points.iter().map(|p| p.iter().map(|x| x * x).sum()).collect();
    let mut w = vec![1.0 / m as f64; m];
    let center = |w: &[f64]| -> Vec<f64> { (0..d).map(|a| (0..m).map(|i| w[i] * points[i][a]).sum()).collect() };
    for _ in 0..200_000 {
        let c = center(&w);
        let grad: Vec<f64> = (0..m).map(|i| sq[i] - 2.0 * points[i].iter().zip(&c).map(|(x, y)| x * y).sum::<f64>()).collect();
        let up = (0..m).max_by(|&a, &b| grad[a].total_cmp(&grad[b])).unwrap();
        let Some(down) = (0..m).filter(|&j| w[j] > 0.0).min_by(|&a, &b| grad[a].total_cmp(&grad[b])) else { break };
        if grad[up] - grad[down] <= 1e-15 * (1.0 + sq.iter().cloned().fold(0.0, f64::max)) {
            break;
        }
        let u: Vec<f64> = points[up].iter().zip(points[down]).map(|(x, y)| x - y).collect();
        let uu: f64 = u.iter().map(|x| x * x).sum();
        if uu == 0.0 {
            w[up] += w[down];
            w[down] = 0.0;
            continue;
        }
        let t = ((grad[up] - grad[down]) / (2.0 * uu)).min(w[down]);
        w[up] += t;
        w[down] -= t;
    }
    let c = center(&w);
    let dual = (0..m).map(|i| w[i] * sq[i]).sum::<f64>() - c.iter().map(|x| x * x).sum::<f64>();
    let primal = points.iter().map(|p| dist(&c, p)).fold(0.0, f64::max);
    (dual.max(0.0).sqrt(), primal)
}

pub fn reference_meb_radius(points: &[&[f64]]) -> f64 {
    reference_meb_bounds(points).1
}

/// All subsets of `0..n` with at most `max_size` elements, as sorted vectors,
/// grouped by size - 1.
pub fn subsets_by_dim(n: usize, max_size: usize) -> Vec<Vec<Vec<u32>>> {
    fn extend(n: u32, max_size: usize, current: &mut Vec<u32>, out: &mut [Vec<Vec<u32>>]) {
        let start = current.last().map_or(0, |&v| v + 1);
        for v in start..n {
            current.push(v);
            out[current.len() - 1].push(current.clone());
            if current.len() < max_size {
                extend(n, max_size, current, out);
            }
            current.pop();
        }
    }
    let mut out = vec![Vec::new(); max_size];
    if max_size > 0 {
        extend(n as u32, max_size, &mut Vec::new(), &mut out);
    }
    for list in &mut out {
        list.sort();
    }
    out
}

pub fn brute_rips(cloud: &PointCloud, r: f64, max_dim: usize) -> Vec<Vec<Vec<u32>>> {
    subsets_by_dim(cloud.len(), max_dim + 1)
        .into_iter()
        .map(|list| {
            list.into_iter()
                .filter(|s| {
                    s.iter().all(|&a| s.iter().all(|&b| a >= b || dist(cloud.point(a as usize), cloud.point(b as usize)) <= r))
                })
                .collect()
        })
        .collect()
}

/// Čech faces by the enclosing-ball test on every subset; a subset whose
/// radius is within `1e-7` of `r / 2` is reported in `ambiguous` instead.
pub fn brute_cech(cloud: &PointCloud, r: f64, max_dim: usize) -> (Vec<Vec<Vec<u32>>>, Vec<Vec<u32>>) {
    let mut ambiguous = Vec::new();
    let faces = subsets_by_dim(cloud.len(), max_dim + 1)
        .into_iter()
        .map(|list| {
            list.into_iter()
                .filter(|s| {
                    let pts: Vec<&[f64]> = s.iter().map(|&v| cloud.point(v as usize)).collect();
                    // a pair farther apart than r already rules the set out
                    if pts.iter().enumerate().any(|(i, a)| pts[i + 1..].iter().any(|b| dist(a, b) > r * (1.0 + 1e-9))) {
                        return false;
                    }
                    let rad = reference_meb_radius(&pts);
                    if (rad - r / 2.0).abs() < 1e-7 {
                        ambiguous.push(s.clone());
                    }
                    rad <= r / 2.0
                })
                .collect()
        })
        .collect();
    (faces, ambiguous)
}

pub fn faces_of(cx: &SimplicialComplex) -> Vec<Vec<Vec<u32>>> {
    (0..=cx.max_dim()).map(|d| cx.faces(d).map(|f| f.to_vec()).collect()).collect()
}

pub fn library_meb_radius(points: &[&[f64]]) -> f64 {
    min_enclosing_ball(points).unwrap().radius
}

/// Rank of a dense matrix over `F_p` by row reduction.
pub fn dense_rank(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let inv = |a: u64| {
        let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c] % p != 0) else { continue };
        m.swap(rank, piv);
        let scale = inv(m[rank][c]);
        for x in m[rank].iter_mut() {
            *x = *x * scale % p;
        }
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for k in 0..cols {
                    m[r][k] = (m[r][k] + (p - f) * m[rank][k]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers `0..=k_max` from dense boundary matrices over `F_p`.
pub fn dense_betti(faces: &[Vec<Vec<u32>>], k_max: usize, p: u64) -> Vec<usize> {
    let count = |k: usize| faces.get(k).map_or(0, Vec::len);
    let boundary_rank = |k: usize| -> usize {
        if k == 0 || count(k) == 0 || count(k - 1) == 0 {
            return 0;
        }
        let index: HashMap<&[u32], usize> = faces[k - 1].iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
        let mut m = vec![vec![0u64; count(k)]; count(k - 1)];
        for (j, face) in faces[k].iter().enumerate() {
            for drop in 0..face.len() {
                let facet: Vec<u32> = face.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &v)| v).collect();
                let row = index[facet.as_slice()];
                m[row][j] = if drop % 2 == 0 { 1 } else { p - 1 };
            }
        }
        dense_rank(m, p)
    };
    let ranks: Vec<usize> = (0..=k_max + 1).map(boundary_rank).collect();
    (0..=k_max).map(|k| count(k) - ranks[k] - ranks[k + 1]).collect()
}

/// Heap's algorithm over all permutations of `0..n`.
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    if !visit(&perm) {
        return;
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if !visit(&perm) {
                return;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Whether the graph induced on `vertices` is isomorphic to `template`
/// (an adjacency predicate on `0..vertices.len()`), by trying every bijection.
pub fn isomorphic_to(graph: &GeometricGraph, vertices: &[u32], template: impl Fn(usize, usize) -> bool) -> bool {
    let n = vertices.len();
    let mut found = false;
    for_each_permutation(n, |perm| {
        let ok = (0..n).all(|i| {
            (i + 1..n).all(|j| graph.adjacent(vertices[perm[i]] as usize, vertices[perm[j]] as usize) == template(i, j))
        });
        found = ok;
        !ok
    });
    found
}

/// Connected components by breadth-first search.
pub fn bfs_components(graph: &GeometricGraph) -> Vec<Vec<u32>> {
    let n = graph.n_vertices();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s as u32];
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head] as usize;
            head += 1;
            for &w in graph.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Components isomorphic to the graph of the boundary of the
/// `(k+1)`-dimensional cross-polytope: vertices `i` and `i + k + 1` are the
/// only non-adjacent pairs.
pub fn brute_crosspolytope_count(graph: &GeometricGraph, k: usize) -> usize {
    let size = 2 * k + 2;
    bfs_components(graph)
        .iter()
        .filter(|c| c.len() == size)
        .filter(|c| isomorphic_to(graph, c, |i, j| j != i + k + 1))
        .count()
}
