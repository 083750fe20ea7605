//! Diameter-bounded cycle and boundary spaces.
//!
//! A chain's diameter is the diameter of the union of its vertices. The
//! B-bounded cycle space is spanned by cycles of diameter at most B; a chain
//! has diameter at most B exactly when its vertex set is a clique of the
//! B-threshold graph on the point cloud, so both spaces are assembled clique
//! by clique.

use crate::complex::{facet_vertices, FilteredComplex};
use crate::error::{Error, Result};
use crate::gf2::{coordinate_intersection_basis, kernel_basis, BitVec, Echelon};
use crate::persistence::{check_nested, BoundReport};
use crate::pointcloud::PointCloud;
use std::collections::HashMap;

/// Basis of a subspace of the q-chains of a complex at a fixed level.
/// `ambient` lists the complex indices of those q-simplices in complex
/// order; `vectors` are row-reduced coordinates over that list.
#[derive(Clone, Debug)]
pub struct ChainBasis {
    ambient: Vec<usize>,
    vectors: Vec<BitVec>,
}

impl ChainBasis {
    pub fn ambient(&self) -> &[usize] {
        &self.ambient
    }

    pub fn vectors(&self) -> &[BitVec] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// True when every vector of `other` lies in the span of `self`. Both
    /// bases must live over the same ambient list.
    pub fn contains_subspace(&self, other: &ChainBasis) -> bool {
        if self.ambient != other.ambient {
            return false;
        }
        let mut span = Echelon::new(self.ambient.len());
        for v in &self.vectors {
            span.insert(v.clone());
        }
        other.vectors.iter().all(|v| span.contains(v))
    }
}

/// Maximal cliques of an undirected graph given as an adjacency matrix of
/// bit rows (diagonal off). Bron-Kerbosch with pivoting; the result is
/// sorted so the enumeration order never leaks downstream.
pub fn maximal_cliques(adjacency: &[BitVec]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut cliques = Vec::new();
    if n == 0 {
        return cliques;
    }
    let mut all = BitVec::zeros(n);
    for i in 0..n {
        all.set(i, true);
    }
    let mut current = Vec::new();
    expand_cliques(&mut current, all, BitVec::zeros(n), adjacency, &mut cliques);
    cliques.sort();
    cliques
}

fn expand_cliques(
    current: &mut Vec<usize>,
    mut p: BitVec,
    mut x: BitVec,
    adj: &[BitVec],
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_zero() && x.is_zero() {
        let mut clique = current.clone();
        clique.sort_unstable();
        out.push(clique);
        return;
    }
    // Pivot on the candidate covering the most of P; first index wins ties.
    let mut pivot = None;
    let mut best = 0usize;
    for u in p.iter_ones().chain(x.iter_ones()) {
        let cover = p.and(&adj[u]).count_ones();
        if pivot.is_none() || cover > best {
            pivot = Some(u);
            best = cover;
        }
    }
    let candidates: Vec<usize> = p.and_not(&adj[pivot.unwrap()]).iter_ones().collect();
    for v in candidates {
        let np = p.and(&adj[v]);
        let nx = x.and(&adj[v]);
        current.push(v);
        expand_cliques(current, np, nx, adj, out);
        current.pop();
        p.set(v, false);
        x.set(v, true);
    }
}

/// Adjacency of the threshold graph: points joined when their distance is
/// at most `bound`.
fn threshold_adjacency(cloud: &PointCloud, bound: f64) -> Vec<BitVec> {
    let n = cloud.len();
    let mut adj = vec![BitVec::zeros(n); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if cloud.distance(i, j) <= bound {
                adj[i].set(j, true);
                adj[j].set(i, true);
            }
        }
    }
    adj
}

fn validate_bound(bound: f64) -> Result<()> {
    if !(bound.is_finite() && bound >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "diameter bound must be finite and nonnegative, got {bound}"
        )));
    }
    Ok(())
}

fn check_level(complex: &FilteredComplex, level: f64) -> Result<()> {
    if !level.is_finite() || level > complex.r_max() {
        return Err(Error::OutOfRange(format!(
            "level {level} exceeds the built radius {}",
            complex.r_max()
        )));
    }
    Ok(())
}

/// Basis of span{x in Z_q(K^r) : diam(x) <= bound}: per maximal clique C of
/// the threshold graph, the kernel of the boundary on the induced
/// subcomplex, joined over all cliques.
pub fn bounded_cycle_space(
    complex: &FilteredComplex,
    q: usize,
    bound: f64,
    r: f64,
) -> Result<ChainBasis> {
    validate_bound(bound)?;
    check_level(complex, r)?;
    let simplices = complex.simplices();
    let ambient = complex.level_indices(q, r);
    let ambient_pos: HashMap<usize, usize> = ambient
        .iter()
        .enumerate()
        .map(|(pos, &idx)| (idx, pos))
        .collect();
    let facet_index: HashMap<&[u32], usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices.as_slice(), i))
        .collect();
    let rows = if q == 0 {
        Vec::new()
    } else {
        complex.level_indices(q - 1, r)
    };

    let mut span = Echelon::new(ambient.len());
    for clique in maximal_cliques(&threshold_adjacency(complex.cloud(), bound)) {
        if clique.len() < q + 1 {
            continue;
        }
        let member = BitVec::from_indices(complex.cloud().len(), &clique);
        let in_clique = |idx: usize| {
            simplices[idx]
                .vertices
                .iter()
                .all(|&v| member.get(v as usize))
        };
        let cols: Vec<usize> = ambient.iter().copied().filter(|&i| in_clique(i)).collect();
        if cols.is_empty() {
            continue;
        }
        if q == 0 {
            // Every vertex is a cycle of diameter zero.
            for &i in &cols {
                span.insert(BitVec::from_indices(ambient.len(), &[ambient_pos[&i]]));
            }
            continue;
        }
        let sub_rows: Vec<usize> = rows.iter().copied().filter(|&i| in_clique(i)).collect();
        let sub_row_pos: HashMap<usize, usize> = sub_rows
            .iter()
            .enumerate()
            .map(|(pos, &idx)| (idx, pos))
            .collect();
        let columns: Vec<BitVec> = cols
            .iter()
            .map(|&i| {
                let mut v = BitVec::zeros(sub_rows.len());
                let verts = &simplices[i].vertices;
                for skip in 0..verts.len() {
                    let facet = facet_vertices(verts, skip);
                    v.set(sub_row_pos[&facet_index[facet.as_slice()]], true);
                }
                v
            })
            .collect();
        for vec in kernel_basis(sub_rows.len(), &columns) {
            let mut w = BitVec::zeros(ambient.len());
            for p in vec.iter_ones() {
                w.set(ambient_pos[&cols[p]], true);
            }
            span.insert(w);
        }
    }
    Ok(ChainBasis {
        ambient,
        vectors: span.into_sorted_rows(),
    })
}

/// Basis of span{x in B_q(K^s) : diam(x) <= bound}: the full boundary space
/// intersected with each clique's coordinate subspace, joined over cliques.
/// The diameter restriction applies to the boundaries themselves; the chains
/// bounding them may be arbitrarily wide.
pub fn bounded_boundary_space(
    complex: &FilteredComplex,
    q: usize,
    bound: f64,
    s: f64,
) -> Result<ChainBasis> {
    validate_bound(bound)?;
    check_level(complex, s)?;
    if q > complex.q_max() {
        return Err(Error::OutOfRange(format!(
            "boundaries in dimension {q} need ({})-simplices beyond the built dimension",
            q + 1
        )));
    }
    let simplices = complex.simplices();
    let ambient = complex.level_indices(q, s);
    let ambient_pos: HashMap<usize, usize> = ambient
        .iter()
        .enumerate()
        .map(|(pos, &idx)| (idx, pos))
        .collect();
    let facet_index: HashMap<&[u32], usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices.as_slice(), i))
        .collect();

    let mut full = Echelon::new(ambient.len());
    for &i in &complex.level_indices(q + 1, s) {
        let mut v = BitVec::zeros(ambient.len());
        let verts = &simplices[i].vertices;
        for skip in 0..verts.len() {
            let facet = facet_vertices(verts, skip);
            v.set(ambient_pos[&facet_index[facet.as_slice()]], true);
        }
        full.insert(v);
    }
    let full_rows = full.rows().to_vec();

    let mut span = Echelon::new(ambient.len());
    for clique in maximal_cliques(&threshold_adjacency(complex.cloud(), bound)) {
        if clique.len() < q + 1 {
            continue;
        }
        let member = BitVec::from_indices(complex.cloud().len(), &clique);
        let mut allowed = BitVec::zeros(ambient.len());
        for (pos, &i) in ambient.iter().enumerate() {
            if simplices[i]
                .vertices
                .iter()
                .all(|&v| member.get(v as usize))
            {
                allowed.set(pos, true);
            }
        }
        if allowed.is_zero() {
            continue;
        }
        for v in coordinate_intersection_basis(&full_rows, &allowed) {
            span.insert(v);
        }
    }
    Ok(ChainBasis {
        ambient,
        vectors: span.into_sorted_rows(),
    })
}

/// dim Z_{q,B}(K^r) − dim(Z_{q,B}(K^r) ∩ B_{q,B}(K^s)).
pub fn bounded_persistent_betti(
    complex: &FilteredComplex,
    q: usize,
    bound: f64,
    r: f64,
    s: f64,
) -> Result<usize> {
    if !(r.is_finite() && s.is_finite() && r <= s) {
        return Err(Error::InvalidArgument(format!(
            "need finite r <= s, got ({r}, {s})"
        )));
    }
    let cycles = bounded_cycle_space(complex, q, bound, r)?;
    let boundaries = bounded_boundary_space(complex, q, bound, s)?;
    let dim_z = cycles.dim();
    let dim_b = boundaries.dim();
    // Join both bases over the level-s coordinates and use
    // dim(Z ∩ B) = dim Z + dim B − dim(Z + B).
    let pos: HashMap<usize, usize> = boundaries
        .ambient
        .iter()
        .enumerate()
        .map(|(p, &idx)| (idx, p))
        .collect();
    let mut join = Echelon::new(boundaries.ambient.len());
    for v in &boundaries.vectors {
        join.insert(v.clone());
    }
    for v in &cycles.vectors {
        let mut w = BitVec::zeros(boundaries.ambient.len());
        for p in v.iter_ones() {
            w.set(pos[&cycles.ambient[p]], true);
        }
        join.insert(w);
    }
    let dim_meet = dim_z + dim_b - join.rank();
    Ok(dim_z - dim_meet)
}

/// Checks |β_{q,B}^{r,s}(large) − β_{q,B}^{r,s}(small)| against the sum of
/// the two quotient dimensions dim(Z_{q,B}(K^r)/Z_{q,B}(J^r)) and
/// dim(B_{q,B}(K^s)/B_{q,B}(J^s)), each computed as a basis-extension count.
pub fn bounded_geometric_lemma_check(
    small: &FilteredComplex,
    large: &FilteredComplex,
    q: usize,
    bound: f64,
    r: f64,
    s: f64,
) -> Result<BoundReport> {
    check_nested(small, large)?;
    let beta_small = bounded_persistent_betti(small, q, bound, r, s)?;
    let beta_large = bounded_persistent_betti(large, q, bound, r, s)?;
    let lhs = beta_large.abs_diff(beta_small);

    let ext_z = extension_count(
        &bounded_cycle_space(small, q, bound, r)?,
        small,
        &bounded_cycle_space(large, q, bound, r)?,
        large,
    );
    let ext_b = extension_count(
        &bounded_boundary_space(small, q, bound, s)?,
        small,
        &bounded_boundary_space(large, q, bound, s)?,
        large,
    );
    let rhs = ext_z + ext_b;
    Ok(BoundReport {
        lhs,
        rhs,
        pass: lhs <= rhs,
    })
}

/// Number of basis vectors of the large space outside the span of the small
/// one, with the small basis re-expressed over the large ambient.
fn extension_count(
    small_basis: &ChainBasis,
    small: &FilteredComplex,
    large_basis: &ChainBasis,
    large: &FilteredComplex,
) -> usize {
    let large_pos: HashMap<&[u32], usize> = large_basis
        .ambient
        .iter()
        .enumerate()
        .map(|(pos, &idx)| (large.simplices()[idx].vertices.as_slice(), pos))
        .collect();
    let mut span = Echelon::new(large_basis.ambient.len());
    for v in &small_basis.vectors {
        let mut w = BitVec::zeros(large_basis.ambient.len());
        for p in v.iter_ones() {
            let verts = small.simplices()[small_basis.ambient[p]].vertices.as_slice();
            w.set(large_pos[verts], true);
        }
        span.insert(w);
    }
    let small_rank = span.rank();
    for v in &large_basis.vectors {
        span.insert(v.clone());
    }
    span.rank() - small_rank
}
