//! Betti numbers over a prime field.
//!
//! `beta_k = f_k - rank d_k - rank d_{k+1}`. Ranks are computed by sparse
//! column elimination with pivot on the lowest (largest-index) row. Betti
//! numbers are obtained from the coboundary matrices `d_{k+1}^T`, reduced in
//! increasing degree; a row that becomes a pivot in degree `k-1` names a
//! column of degree `k` that is known to reduce to zero and is skipped.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::SimplicialComplex;

/// Default ceiling on stored nonzero entries across one boundary matrix.
pub const DEFAULT_MATRIX_BUDGET: usize = 400_000_000;

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error("{0} is not a prime below 2^16")]
    NotPrime(u32),
    #[error("boundary degree {k} outside the stored range 1..={max_dim}")]
    DegreeOutOfRange { k: usize, max_dim: usize },
    #[error("boundary matrix needs {needed} nonzeros, budget is {budget}")]
    MatrixBudgetExceeded { needed: usize, budget: usize },
    #[error("face {0:?} has a facet missing from the complex")]
    NotClosed(Vec<u32>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrimeField(u32);

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField(2)
    }
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, HomologyError> {
        let is_prime = p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0);
        if !is_prime || p >= 1 << 16 {
            return Err(HomologyError::NotPrime(p));
        }
        Ok(PrimeField(p))
    }

    pub fn modulus(self) -> u32 {
        self.0
    }

    fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    fn inv(self, a: u32) -> u32 {
        // Fermat: a^(p-2)
        let (mut base, mut exp, mut acc) = (a % self.0, self.0 - 2, 1u32);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `(-1)^i` in the field.
    fn sign(self, i: usize) -> u32 {
        if i % 2 == 0 {
            1
        } else {
            self.0 - 1
        }
    }
}

/// Sparse column: `(row, coefficient)` pairs sorted by row, coefficients nonzero.
pub type SparseColumn = Vec<(u32, u32)>;

/// Matrix of `d_k` (or its transpose) with columns in face order.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMatrix {
    k: usize,
    n_rows: usize,
    field: PrimeField,
    columns: Vec<SparseColumn>,
}

impl BoundaryMatrix {
    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn columns(&self) -> &[SparseColumn] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn transpose(&self) -> BoundaryMatrix {
        let mut columns = vec![Vec::new(); self.n_rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, c) in col {
                columns[i as usize].push((j as u32, c));
            }
        }
        BoundaryMatrix { k: self.k, n_rows: self.columns.len(), field: self.field, columns }
    }

    /// Product `self * other` as a dense check, for small matrices.
    pub fn compose_is_zero(&self, other: &BoundaryMatrix) -> bool {
        let p = self.field;
        other.columns.iter().all(|col| {
            let mut acc = vec![0u32; self.n_rows];
            for &(mid, c) in col {
                for &(row, d) in &self.columns[mid as usize] {
                    acc[row as usize] = (acc[row as usize] + p.mul(c, d)) % p.0;
                }
            }
            acc.iter().all(|&x| x == 0)
        })
    }

    pub fn rank(&self) -> usize {
        reduce(self.columns.clone(), self.n_rows, self.field, &[]).rank
    }
}

/// `d_k`: one column per `k`-face with `(-1)^i` on the facet missing vertex `i`.
pub fn boundary_matrix(complex: &SimplicialComplex, k: usize, field: PrimeField) -> Result<BoundaryMatrix, HomologyError> {
    boundary_matrix_with_budget(complex, k, field, DEFAULT_MATRIX_BUDGET)
}

pub fn boundary_matrix_with_budget(
    complex: &SimplicialComplex,
    k: usize,
    field: PrimeField,
    budget: usize,
) -> Result<BoundaryMatrix, HomologyError> {
    if k == 0 || k > complex.max_dim() {
        return Err(HomologyError::DegreeOutOfRange { k, max_dim: complex.max_dim() });
    }
    let needed = complex.n_faces(k) * (k + 1);
    if needed > budget {
        return Err(HomologyError::MatrixBudgetExceeded { needed, budget });
    }
    let mut columns = Vec::with_capacity(complex.n_faces(k));
    let mut facet = Vec::with_capacity(k);
    for face in complex.faces(k) {
        let mut col: SparseColumn = Vec::with_capacity(k + 1);
        for i in 0..=k {
            facet.clear();
            facet.extend(face.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
            let row = complex.index_of(&facet).ok_or_else(|| HomologyError::NotClosed(face.to_vec()))?;
            col.push((row as u32, field.sign(i)));
        }
        col.sort_unstable_by_key(|e| e.0);
        columns.push(col);
    }
    Ok(BoundaryMatrix { k, n_rows: complex.n_faces(k - 1), field, columns })
}

struct Reduction {
    rank: usize,
    /// Rows that became pivots.
    pivot_rows: Vec<u32>,
}

/// Left-to-right column reduction. Columns listed in `skip` are known to
/// reduce to zero and are not touched.
fn reduce(mut columns: Vec<SparseColumn>, n_rows: usize, field: PrimeField, skip: &[bool]) -> Reduction {
    let mut pivot_of_row: Vec<u32> = vec![u32::MAX; n_rows];
    let mut pivot_rows = Vec::new();
    let mut scratch: SparseColumn = Vec::new();
    for j in 0..columns.len() {
        if skip.get(j).copied().unwrap_or(false) {
            continue;
        }
        let mut col = std::mem::take(&mut columns[j]);
        while let Some(&(low, c)) = col.last() {
            let owner = pivot_of_row[low as usize];
            if owner == u32::MAX {
                break;
            }
            let other = &columns[owner as usize];
            let (_, d) = *other.last().expect("pivot column is nonzero");
            // col -= (c / d) * other
            let factor = field.neg(field.mul(c, field.inv(d)));
            axpy(&col, other, factor, field, &mut scratch);
            std::mem::swap(&mut col, &mut scratch);
        }
        if let Some(&(low, _)) = col.last() {
            pivot_of_row[low as usize] = j as u32;
            pivot_rows.push(low);
        }
        columns[j] = col;
    }
    Reduction { rank: pivot_rows.len(), pivot_rows }
}

/// `out = a + factor * b`, merged by row.
fn axpy(a: &SparseColumn, b: &SparseColumn, factor: u32, field: PrimeField, out: &mut SparseColumn) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&(ra, ca)), Some(&(rb, _))) if ra < rb => {
                i += 1;
                (ra, ca)
            }
            (Some(&(ra, _)), Some(&(rb, cb))) if rb < ra => {
                j += 1;
                (rb, field.mul(cb, factor))
            }
            (Some(&(ra, ca)), Some(&(_, cb))) => {
                i += 1;
                j += 1;
                (ra, (ca + field.mul(cb, factor)) % field.0)
            }
            (Some(&e), None) => {
                i += 1;
                e
            }
            (None, Some(&(rb, cb))) => {
                j += 1;
                (rb, field.mul(cb, factor))
            }
            (None, None) => unreachable!(),
        };
        if next.1 != 0 {
            out.push(next);
        }
    }
}

/// Betti numbers with face counts and the provenance of the computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiProfile {
    pub field: PrimeField,
    pub betti: Vec<usize>,
    #[serde(rename = "f")]
    pub face_counts: Vec<usize>,
    /// Faces of dimension `k_max + 1` were not stored, so the last entry of
    /// `betti` is only an upper bound.
    pub capped: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reduced: bool,
}

impl BettiProfile {
    pub fn k_max(&self) -> usize {
        self.betti.len() - 1
    }

    pub fn betti(&self, k: usize) -> usize {
        self.betti.get(k).copied().unwrap_or(0)
    }

    /// `sum (-1)^k beta_k`, with unreduced `beta_0`.
    pub fn euler_characteristic(&self) -> i64 {
        let shift = i64::from(self.reduced);
        self.betti
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum::<i64>()
            + shift
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BettiOptions {
    pub field: PrimeField,
    pub reduced: bool,
    pub matrix_budget: usize,
}

impl Default for BettiOptions {
    fn default() -> Self {
        BettiOptions { field: PrimeField::default(), reduced: false, matrix_budget: DEFAULT_MATRIX_BUDGET }
    }
}

/// Unreduced `beta_0..=beta_{k_max}` over `field`.
pub fn betti_numbers(complex: &SimplicialComplex, k_max: usize, field: PrimeField) -> Result<BettiProfile, HomologyError> {
    betti_numbers_with(complex, k_max, BettiOptions { field, ..BettiOptions::default() })
}

pub fn betti_numbers_with(
    complex: &SimplicialComplex,
    k_max: usize,
    opts: BettiOptions,
) -> Result<BettiProfile, HomologyError> {
    let field = opts.field;
    let face_counts: Vec<usize> = (0..=k_max + 1).map(|d| complex.n_faces(d)).collect();
    let capped = complex.max_dim() < k_max + 1;
    // rank_d[k] = rank of d_k; d_0 = 0.
    let mut rank_d = vec![0usize; k_max + 2];
    let mut cleared: Vec<bool> = Vec::new();
    for k in 0..=k_max.min(complex.max_dim().saturating_sub(1)) {
        if complex.max_dim() < k + 1 {
            break;
        }
        // coboundary d_{k+1}^T: columns are k-faces, rows (k+1)-faces
        let cob = boundary_matrix_with_budget(complex, k + 1, field, opts.matrix_budget)?.transpose();
        let n_rows = cob.n_rows;
        let red = reduce(cob.columns, n_rows, field, &cleared);
        rank_d[k + 1] = red.rank;
        cleared = vec![false; n_rows];
        for r in red.pivot_rows {
            cleared[r as usize] = true;
        }
    }
    let mut betti: Vec<usize> = (0..=k_max).map(|k| face_counts[k] - rank_d[k] - rank_d[k + 1]).collect();
    if opts.reduced && face_counts[0] > 0 {
        betti[0] -= 1;
    }
    Ok(BettiProfile { field, betti, face_counts, capped, reduced: opts.reduced })
}

/// Degree at which Betti numbers over two fields differ; only torsion in
/// integral homology can cause this.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDisagreement {
    pub k: usize,
    /// `(p, beta_k over F_p)` for every field compared.
    pub betti: Vec<(u32, usize)>,
}

/// Computes the profile over each field and reports every degree where they
/// disagree. The first profile is returned alongside.
pub fn field_disagreements(
    complex: &SimplicialComplex,
    k_max: usize,
    fields: &[PrimeField],
) -> Result<(Vec<BettiProfile>, Vec<FieldDisagreement>), HomologyError> {
    let profiles = fields.iter().map(|&p| betti_numbers(complex, k_max, p)).collect::<Result<Vec<_>, _>>()?;
    let disagreements = (0..=k_max)
        .filter(|&k| profiles.windows(2).any(|w| w[0].betti(k) != w[1].betti(k)))
        .map(|k| FieldDisagreement { k, betti: profiles.iter().map(|pr| (pr.field.modulus(), pr.betti(k))).collect() })
        .collect();
    Ok((profiles, disagreements))
}

/// `sum_k (-1)^k f_k` over the stored faces.
pub fn euler_characteristic(complex: &SimplicialComplex) -> i64 {
    complex
        .face_counts()
        .iter()
        .enumerate()
        .map(|(k, &f)| if k % 2 == 0 { f as i64 } else { -(f as i64) })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Simplex, SimplicialComplex};

    fn cx(n: usize, max_dim: usize, gens: &[&[u32]]) -> SimplicialComplex {
        SimplicialComplex::from_generators(n, max_dim, gens.iter().map(|g| Simplex::new(g.to_vec()).unwrap())).unwrap()
    }

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn projective_plane_depends_on_the_field() {
        let rp2 = cx(
            6,
            2,
            &[&[0, 1, 2], &[0, 2, 3], &[0, 3, 4], &[0, 4, 5], &[0, 1, 5], &[1, 2, 4], &[2, 3, 5], &[1, 3, 4], &[2, 4, 5], &[1, 3, 5]],
        );
        let (profiles, diff) = field_disagreements(&rp2, 2, &[f(2), f(3)]).unwrap();
        assert_eq!(profiles[0].betti, vec![1, 1, 1]);
        assert_eq!(profiles[1].betti, vec![1, 0, 0]);
        assert_eq!(diff.iter().map(|d| d.k).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(diff[0].betti, vec![(2, 1), (3, 0)]);
        let (_, none) = field_disagreements(&cx(3, 1, &[&[0, 1], &[1, 2], &[0, 2]]), 1, &[f(2), f(3), f(5)]).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn prime_validation() {
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(65521).is_ok());
        for bad in [0, 1, 4, 9, 65537, 100] {
            assert!(PrimeField::new(bad).is_err(), "{bad}");
        }
        let p = f(7);
        for a in 1..7 {
            assert_eq!(p.mul(a, p.inv(a)), 1);
        }
    }

    #[test]
    fn single_edge_column() {
        let c = cx(2, 1, &[&[0, 1]]);
        let d1 = boundary_matrix(&c, 1, f(2)).unwrap();
        assert_eq!(d1.columns(), &[vec![(0, 1), (1, 1)]]);
        let d1 = boundary_matrix(&c, 1, f(3)).unwrap();
        // deleting vertex 0 leaves {1} with sign +1, deleting vertex 1 leaves {0} with -1
        assert_eq!(d1.columns(), &[vec![(0, 2), (1, 1)]]);
    }

    #[test]
    fn triangle_boundary_rank() {
        let c = cx(3, 1, &[&[0, 1], &[0, 2], &[1, 2]]);
        assert_eq!(boundary_matrix(&c, 1, f(2)).unwrap().rank(), 2);
    }

    #[test]
    fn chain_complex_identity_on_full_simplex() {
        let c = cx(3, 2, &[&[0, 1, 2]]);
        let d1 = boundary_matrix(&c, 1, f(3)).unwrap();
        let d2 = boundary_matrix(&c, 2, f(3)).unwrap();
        assert!(d1.compose_is_zero(&d2));
        let c = cx(5, 4, &[&[0, 1, 2, 3, 4]]);
        for k in 1..4 {
            let a = boundary_matrix(&c, k, f(5)).unwrap();
            let b = boundary_matrix(&c, k + 1, f(5)).unwrap();
            assert!(a.compose_is_zero(&b));
        }
    }

    #[test]
    fn degree_out_of_range() {
        let c = cx(2, 1, &[&[0, 1]]);
        assert!(matches!(boundary_matrix(&c, 0, f(2)), Err(HomologyError::DegreeOutOfRange { .. })));
        assert!(matches!(boundary_matrix(&c, 2, f(2)), Err(HomologyError::DegreeOutOfRange { .. })));
    }

    #[test]
    fn sphere_from_tetrahedron_boundary() {
        let c = cx(4, 3, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]);
        for p in [2, 3] {
            let b = betti_numbers(&c, 2, f(p)).unwrap();
            assert_eq!(b.betti, vec![1, 0, 1]);
            assert!(!b.capped);
            assert_eq!(b.euler_characteristic(), euler_characteristic(&c));
        }
    }

    #[test]
    fn four_cycle_is_a_circle() {
        let c = cx(4, 2, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        let b = betti_numbers(&c, 1, f(2)).unwrap();
        assert_eq!(b.betti, vec![1, 1]);
        assert_eq!(euler_characteristic(&c), 0);
    }

    #[test]
    fn single_vertex() {
        let c = cx(1, 1, &[]);
        assert_eq!(euler_characteristic(&c), 1);
        assert_eq!(betti_numbers(&c, 0, f(2)).unwrap().betti, vec![1]);
    }

    #[test]
    fn capped_flag_and_upper_bound() {
        // filled triangle, but 2-faces not stored
        let c = cx(3, 1, &[&[0, 1, 2]]);
        let b = betti_numbers(&c, 1, f(2)).unwrap();
        assert!(b.capped);
        assert_eq!(b.betti, vec![1, 1]);
        let full = cx(3, 2, &[&[0, 1, 2]]);
        assert_eq!(betti_numbers(&full, 1, f(2)).unwrap().betti, vec![1, 0]);
    }

    #[test]
    fn reduced_homology() {
        let c = cx(4, 1, &[&[0, 1]]);
        let opts = BettiOptions { reduced: true, ..BettiOptions::default() };
        let b = betti_numbers_with(&c, 1, opts).unwrap();
        assert_eq!(b.betti, vec![2, 0]);
    }

    #[test]
    fn json_shape() {
        let c = cx(4, 2, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        let b = betti_numbers(&c, 1, f(2)).unwrap();
        assert_eq!(b.to_json(), r#"{"field":2,"betti":[1,1],"f":[4,4,0],"capped":false}"#);
    }

    #[test]
    fn matrix_budget() {
        let c = cx(5, 2, &[&[0, 1, 2, 3, 4]]);
        let opts = BettiOptions { matrix_budget: 5, ..BettiOptions::default() };
        assert!(matches!(betti_numbers_with(&c, 1, opts), Err(HomologyError::MatrixBudgetExceeded { .. })));
    }
}
