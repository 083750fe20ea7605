//! Persistent homology over the two-element field.
//!
//! Diagrams come from left-to-right boundary-matrix reduction. The same
//! quantities are also computable directly from kernel/image ranks, which
//! serves as an independent cross-check of the reduction.

use crate::complex::{facet_vertices, FilteredComplex};
use crate::error::{Error, Result};
use crate::gf2::{kernel_basis, BitVec, Echelon};
use serde::Serialize;
use std::collections::HashMap;

/// A feature dimension together with the (r, s) pairs at which persistent
/// Betti numbers are requested.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BettiQuery {
    q: usize,
    pairs: Vec<(f64, f64)>,
}

impl BettiQuery {
    pub fn new(q: usize, pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidArgument("query needs at least one (r, s) pair".into()));
        }
        for &(r, s) in &pairs {
            if !(r.is_finite() && s.is_finite() && r <= s) {
                return Err(Error::InvalidArgument(format!(
                    "query pair needs finite r <= s, got ({r}, {s})"
                )));
            }
        }
        Ok(BettiQuery { q, pairs })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// Largest death radius over the pairs; the complex must be built at
    /// least this far.
    pub fn max_s(&self) -> f64 {
        self.pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A single birth/death pair; `death` is `f64::INFINITY` for features that
/// survive the whole filtration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagramPoint {
    pub q: usize,
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// Persistence diagram of a filtered complex. Zero-persistence pairs are
/// kept internally so reduction output stays auditable, but listings and CSV
/// exports skip them.
#[derive(Clone, Debug)]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
    q_max: usize,
}

impl PersistenceDiagram {
    /// Points with strictly positive persistence.
    pub fn points(&self) -> impl Iterator<Item = &DiagramPoint> {
        self.points.iter().filter(|p| p.birth < p.death)
    }

    /// Every pair produced by the reduction, zero-persistence included.
    pub fn all_points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn q_max(&self) -> usize {
        self.q_max
    }

    pub fn points_of_dim(&self, q: usize) -> impl Iterator<Item = &DiagramPoint> {
        self.points().filter(move |p| p.q == q)
    }

    /// CSV listing `q,birth,death` with `inf` for infinite deaths.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,birth,death\n");
        for p in self.points() {
            if p.death.is_finite() {
                out.push_str(&format!("{},{},{}\n", p.q, p.birth, p.death));
            } else {
                out.push_str(&format!("{},{},inf\n", p.q, p.birth));
            }
        }
        out
    }
}

/// Multiplies births and deaths by a positive factor; infinite deaths stay
/// infinite. Used by the subsampling correction diagnostic.
pub fn rescale_diagram(diagram: &PersistenceDiagram, factor: f64) -> Result<PersistenceDiagram> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rescale factor must be positive, got {factor}"
        )));
    }
    Ok(PersistenceDiagram {
        points: diagram
            .points
            .iter()
            .map(|p| DiagramPoint {
                q: p.q,
                birth: p.birth * factor,
                death: p.death * factor,
            })
            .collect(),
        q_max: diagram.q_max,
    })
}

/// Computes the persistence diagram by column reduction in the complex's
/// total order. Infinite-death points are reported for dimensions up to the
/// complex's q_max; cycles in the extra top dimension are construction
/// artifacts and are suppressed.
pub fn compute_diagram(complex: &FilteredComplex) -> Result<PersistenceDiagram> {
    let simplices = complex.simplices();
    let n = simplices.len();
    let index: HashMap<&[u32], u32> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices.as_slice(), i as u32))
        .collect();

    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(n);
    for (j, s) in simplices.iter().enumerate() {
        let mut col: Vec<u32> = Vec::new();
        if s.dim() > 0 {
            for skip in 0..s.vertices.len() {
                let facet = facet_vertices(&s.vertices, skip);
                let &i = index.get(facet.as_slice()).ok_or_else(|| {
                    Error::MalformedComplex(format!(
                        "facet {facet:?} of {:?} is missing",
                        s.vertices
                    ))
                })?;
                if i as usize >= j {
                    return Err(Error::MalformedComplex(format!(
                        "facet {facet:?} is ordered after its coface"
                    )));
                }
                col.push(i);
            }
            col.sort_unstable();
        }
        cols.push(col);
    }

    let mut owner: Vec<u32> = vec![u32::MAX; n]; // pivot row -> owning column
    let mut paired: Vec<bool> = vec![false; n];
    let mut points: Vec<DiagramPoint> = Vec::new();
    for j in 0..n {
        let mut col = std::mem::take(&mut cols[j]);
        while let Some(&low) = col.last() {
            let k = owner[low as usize];
            if k == u32::MAX {
                break;
            }
            col = xor_sorted(&col, &cols[k as usize]);
        }
        if let Some(&low) = col.last() {
            owner[low as usize] = j as u32;
            paired[low as usize] = true;
            paired[j] = true;
            points.push(DiagramPoint {
                q: simplices[low as usize].dim(),
                birth: simplices[low as usize].filtration,
                death: simplices[j].filtration,
            });
        }
        cols[j] = col;
    }
    for j in 0..n {
        // Unpaired positive simplices carry features that never die.
        if !paired[j] && cols[j].is_empty() && simplices[j].dim() <= complex.q_max() {
            points.push(DiagramPoint {
                q: simplices[j].dim(),
                birth: simplices[j].filtration,
                death: f64::INFINITY,
            });
        }
    }
    points.sort_by(|a, b| {
        a.q.cmp(&b.q)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
    Ok(PersistenceDiagram {
        points,
        q_max: complex.q_max(),
    })
}

/// Symmetric difference of two ascending index lists.
fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Number of degree-q features born by radius r and still alive after
/// radius s, read off the diagram.
pub fn persistent_betti(diagram: &PersistenceDiagram, q: usize, r: f64, s: f64) -> Result<usize> {
    if !(r.is_finite() && s.is_finite() && r <= s) {
        return Err(Error::InvalidArgument(format!(
            "need finite r <= s, got ({r}, {s})"
        )));
    }
    Ok(diagram
        .all_points()
        .iter()
        .filter(|p| p.q == q && p.birth <= r && p.death > s)
        .count())
}

/// The same quantity from ranks: dim Z_q(K^r) − dim(B_q(K^s) ∩ Z_q(K^r)),
/// computed over the two-element field without any reduction pairing. Slower
/// than the diagram route; used as an oracle.
pub fn persistent_betti_direct(
    complex: &FilteredComplex,
    q: usize,
    r: f64,
    s: f64,
) -> Result<usize> {
    if !(r.is_finite() && s.is_finite() && r <= s) {
        return Err(Error::InvalidArgument(format!(
            "need finite r <= s, got ({r}, {s})"
        )));
    }
    if s > complex.r_max() {
        return Err(Error::OutOfRange(format!(
            "s = {s} exceeds the built radius {}",
            complex.r_max()
        )));
    }

    let ambient = complex.level_indices(q, s); // q-simplices at level s
    let ambient_pos: HashMap<usize, usize> = ambient
        .iter()
        .enumerate()
        .map(|(pos, &idx)| (idx, pos))
        .collect();

    // Row space for the boundary of q-simplices: (q-1)-simplices at level s.
    let rows = if q == 0 {
        Vec::new()
    } else {
        complex.level_indices(q - 1, s)
    };
    let row_pos: HashMap<usize, usize> = rows
        .iter()
        .enumerate()
        .map(|(pos, &idx)| (idx, pos))
        .collect();
    let simplices = complex.simplices();
    let facet_index: HashMap<&[u32], usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices.as_slice(), i))
        .collect();

    let boundary_of = |idx: usize, positions: &HashMap<usize, usize>, len: usize| -> BitVec {
        let mut v = BitVec::zeros(len);
        let verts = &simplices[idx].vertices;
        for skip in 0..verts.len() {
            let facet = facet_vertices(verts, skip);
            let fi = facet_index[facet.as_slice()];
            v.set(positions[&fi], true);
        }
        v
    };

    // Z_q(K^r): kernel of the boundary restricted to level r.
    let at_r: Vec<usize> = ambient
        .iter()
        .copied()
        .filter(|&i| simplices[i].filtration <= r)
        .collect();
    let columns: Vec<BitVec> = at_r
        .iter()
        .map(|&i| {
            if q == 0 {
                BitVec::zeros(0)
            } else {
                boundary_of(i, &row_pos, rows.len())
            }
        })
        .collect();
    let kernel = kernel_basis(rows.len(), &columns);

    // B_q(K^s): boundaries of (q+1)-simplices at level s, and the join with Z.
    let mut b_basis = Echelon::new(ambient.len());
    for &i in &complex.level_indices(q + 1, s) {
        b_basis.insert(boundary_of(i, &ambient_pos, ambient.len()));
    }
    let dim_b = b_basis.rank();
    let mut join = Echelon::new(ambient.len());
    for row in b_basis.rows() {
        join.insert(row.clone());
    }
    for vec in &kernel {
        // Embed the level-r kernel vector into the level-s coordinate system.
        let mut w = BitVec::zeros(ambient.len());
        for p in vec.iter_ones() {
            w.set(ambient_pos[&at_r[p]], true);
        }
        join.insert(w);
    }
    // dim Z − dim(Z ∩ B) = dim(Z + B) − dim B.
    Ok(join.rank() - dim_b)
}

/// Ordinary Betti number at each grid radius.
pub fn betti_curve(diagram: &PersistenceDiagram, q: usize, grid: &[f64]) -> Result<Vec<usize>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty radius grid".into()));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("radius grid must be ascending".into()));
    }
    grid.iter()
        .map(|&r| persistent_betti(diagram, q, r, r))
        .collect()
}

/// Euler characteristic of the complex at radius r over all built
/// dimensions.
pub fn euler_characteristic(complex: &FilteredComplex, r: f64) -> Result<i64> {
    if r > complex.r_max() {
        return Err(Error::OutOfRange(format!(
            "r = {r} exceeds the built radius {}",
            complex.r_max()
        )));
    }
    Ok(complex
        .simplices()
        .iter()
        .filter(|s| s.filtration <= r)
        .map(|s| if s.dim() % 2 == 0 { 1i64 } else { -1i64 })
        .sum())
}

/// Euler characteristic truncated at dimension q. Fails when the complex was
/// not built deep enough to make the sum meaningful.
pub fn truncated_euler(complex: &FilteredComplex, q: usize, r: f64) -> Result<i64> {
    if q > complex.q_max() + 1 {
        return Err(Error::OutOfRange(format!(
            "q = {q} exceeds built dimension {}",
            complex.q_max() + 1
        )));
    }
    if r > complex.r_max() {
        return Err(Error::OutOfRange(format!(
            "r = {r} exceeds the built radius {}",
            complex.r_max()
        )));
    }
    Ok(complex
        .simplices()
        .iter()
        .filter(|s| s.filtration <= r && s.dim() <= q)
        .map(|s| if s.dim() % 2 == 0 { 1i64 } else { -1i64 })
        .sum())
}

/// Outcome of a perturbation-bound check: |lhs difference| against the
/// simplex-count bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundReport {
    pub lhs: usize,
    pub rhs: usize,
    pub pass: bool,
}

/// Verifies that `small` embeds in `large` level by level, then checks
/// |β_q^{r,s}(large) − β_q^{r,s}(small)| against the number of q-simplices
/// at r plus (q+1)-simplices at s present in `large` but not `small`.
pub fn geometric_lemma_check(
    small: &FilteredComplex,
    large: &FilteredComplex,
    q: usize,
    r: f64,
    s: f64,
) -> Result<BoundReport> {
    check_nested(small, large)?;
    if q > small.q_max().min(large.q_max()) {
        return Err(Error::InvalidArgument(format!(
            "q = {q} needs simplices of dimension {} which were not built",
            q + 1
        )));
    }
    if s > small.r_max().min(large.r_max()) {
        return Err(Error::OutOfRange(format!(
            "s = {s} exceeds a built radius"
        )));
    }
    let beta_small = persistent_betti_direct(small, q, r, s)?;
    let beta_large = persistent_betti_direct(large, q, r, s)?;
    let lhs = beta_large.abs_diff(beta_small);
    let rhs = excess_count(small, large, q, r) + excess_count(small, large, q + 1, s);
    Ok(BoundReport {
        lhs,
        rhs,
        pass: lhs <= rhs,
    })
}

/// Number of q-simplices present in `large` at radius `level` but not in
/// `small` at that radius.
fn excess_count(small: &FilteredComplex, large: &FilteredComplex, q: usize, level: f64) -> usize {
    let small_map: HashMap<&[u32], f64> = small
        .simplices()
        .iter()
        .map(|s| (s.vertices.as_slice(), s.filtration))
        .collect();
    large
        .simplices()
        .iter()
        .filter(|s| s.dim() == q && s.filtration <= level)
        .filter(|s| match small_map.get(s.vertices.as_slice()) {
            Some(&f) => f > level,
            None => true,
        })
        .count()
}

/// Level-by-level containment: every simplex of `small` must exist in
/// `large` no later, and their clouds must agree where they overlap.
pub(crate) fn check_nested(small: &FilteredComplex, large: &FilteredComplex) -> Result<()> {
    if small.cloud().dim() != large.cloud().dim() {
        return Err(Error::NotNested("cloud dimensions differ".into()));
    }
    if small.cloud().len() > large.cloud().len() {
        return Err(Error::NotNested("small complex has more points".into()));
    }
    for i in 0..small.cloud().len() {
        if small.cloud().point(i) != large.cloud().point(i) {
            return Err(Error::NotNested(format!(
                "point {i} differs between the clouds"
            )));
        }
    }
    let large_map: HashMap<&[u32], f64> = large
        .simplices()
        .iter()
        .map(|s| (s.vertices.as_slice(), s.filtration))
        .collect();
    for s in small.simplices() {
        match large_map.get(s.vertices.as_slice()) {
            Some(&f) if f <= s.filtration + 1e-12 => {}
            _ => {
                return Err(Error::NotNested(format!(
                    "simplex {:?} enters later or is missing",
                    s.vertices
                )))
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_cech, build_vr};
    use crate::pointcloud::PointCloud;

    fn square() -> PointCloud {
        PointCloud::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn two_points_merge_and_survive() {
        let cloud = PointCloud::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let complex = build_vr(&cloud, 1.0, 1).unwrap();
        let diagram = compute_diagram(&complex).unwrap();
        let q0: Vec<&DiagramPoint> = diagram.points_of_dim(0).collect();
        assert_eq!(q0.len(), 2);
        assert_eq!((q0[0].birth, q0[0].death), (0.0, 0.5));
        assert_eq!(q0[1].birth, 0.0);
        assert!(q0[1].death.is_infinite());
    }

    #[test]
    fn vr_triangle_has_no_positive_loop() {
        let h = 3f64.sqrt() / 2.0;
        let cloud =
            PointCloud::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap();
        let complex = build_vr(&cloud, 1.0, 1).unwrap();
        let diagram = compute_diagram(&complex).unwrap();
        assert_eq!(diagram.points_of_dim(1).count(), 0);
        // The zero-persistence pair is retained internally.
        assert!(diagram
            .all_points()
            .iter()
            .any(|p| p.q == 1 && p.birth == p.death));
        assert_eq!(diagram.points_of_dim(0).count(), 3);
    }

    #[test]
    fn cech_triangle_loop_dies_at_circumradius() {
        let h = 3f64.sqrt() / 2.0;
        let cloud =
            PointCloud::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap();
        let complex = build_cech(&cloud, 1.0, 1).unwrap();
        let diagram = compute_diagram(&complex).unwrap();
        let loops: Vec<&DiagramPoint> = diagram.points_of_dim(1).collect();
        assert_eq!(loops.len(), 1);
        assert!((loops[0].birth - 0.5).abs() < 1e-12);
        assert!((loops[0].death - 1.0 / 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn square_loop_lives_until_the_diagonal() {
        let complex = build_vr(&square(), 1.0, 1).unwrap();
        let diagram = compute_diagram(&complex).unwrap();
        let loops: Vec<&DiagramPoint> = diagram.points_of_dim(1).collect();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].birth, 0.5);
        assert!((loops[0].death - 2f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn diagram_and_direct_rank_agree_on_a_grid() {
        let complex = build_vr(&square(), 1.0, 2).unwrap();
        let diagram = compute_diagram(&complex).unwrap();
        let grid = [0.0, 0.25, 0.5, 0.6, 0.71, 1.0];
        for q in 0..=2 {
            for (i, &r) in grid.iter().enumerate() {
                for &s in &grid[i..] {
                    assert_eq!(
                        persistent_betti(&diagram, q, r, s).unwrap(),
                        persistent_betti_direct(&complex, q, r, s).unwrap(),
                        "q={q} r={r} s={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn betti_curve_square() {
        let complex = build_cech(&square(), 1.0, 1).unwrap();
        let diagram = compute_diagram(&complex).unwrap();
        assert_eq!(betti_curve(&diagram, 1, &[0.6]).unwrap(), vec![1]);
        assert_eq!(
            betti_curve(&diagram, 0, &[0.1, 0.5, 0.8]).unwrap(),
            vec![4, 1, 1]
        );
        assert!(betti_curve(&diagram, 0, &[]).is_err());
        assert!(betti_curve(&diagram, 0, &[0.5, 0.1]).is_err());
    }

    #[test]
    fn high_dimensions_are_empty() {
        let complex = build_vr(&square(), 1.0, 2).unwrap();
        let diagram = compute_diagram(&complex).unwrap();
        assert_eq!(betti_curve(&diagram, 5, &[0.5]).unwrap(), vec![0]);
    }

    #[test]
    fn euler_full_simplex_is_one() {
        let cloud = PointCloud::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let complex = build_vr(&cloud, 1.0, 2).unwrap(); // saturates: all 15 faces
        assert_eq!(complex.len(), 15);
        assert_eq!(euler_characteristic(&complex, 1.0).unwrap(), 1);
        assert_eq!(truncated_euler(&complex, 0, 1.0).unwrap(), 4);
        assert_eq!(truncated_euler(&complex, 1, 1.0).unwrap(), 4 - 6);
        assert!(truncated_euler(&complex, 4, 1.0).is_err());
        assert!(matches!(
            euler_characteristic(&complex, 1.5),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            truncated_euler(&complex, 1, 1.5),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn euler_poincare_identity() {
        let cloud = PointCloud::from_rows(&[
            vec![0.0, 0.0],
            vec![1.1, 0.0],
            vec![0.9, 1.2],
            vec![0.1, 1.0],
            vec![0.5, 0.4],
        ])
        .unwrap();
        let complex = build_vr(&cloud, 2.0, 4).unwrap(); // deep enough to saturate
        let diagram = compute_diagram(&complex).unwrap();
        for r in [0.3, 0.5, 0.7, 0.9, 1.3, 2.0] {
            let chi = euler_characteristic(&complex, r).unwrap();
            let alt: i64 = (0..=4)
                .map(|q| {
                    let b = persistent_betti(&diagram, q, r, r).unwrap() as i64;
                    if q % 2 == 0 {
                        b
                    } else {
                        -b
                    }
                })
                .sum();
            assert_eq!(chi, alt, "r = {r}");
        }
    }

    #[test]
    fn direct_rejects_bad_ranges() {
        let complex = build_vr(&square(), 1.0, 1).unwrap();
        assert!(matches!(
            persistent_betti_direct(&complex, 1, 0.8, 0.5),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            persistent_betti_direct(&complex, 1, 0.5, 2.0),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn missing_facet_is_malformed() {
        use crate::complex::Simplex;
        let cloud = PointCloud::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let complex = FilteredComplex::from_simplices(
            cloud,
            1,
            1.0,
            vec![
                Simplex {
                    vertices: vec![0],
                    filtration: 0.0,
                },
                Simplex {
                    vertices: vec![0, 1],
                    filtration: 0.5,
                },
            ],
        )
        .unwrap();
        assert!(matches!(
            compute_diagram(&complex),
            Err(Error::MalformedComplex(_))
        ));
    }

    #[test]
    fn geometric_lemma_on_add_one() {
        let small_cloud = square();
        let big_cloud = small_cloud.with_point(&[0.5, 0.5]).unwrap();
        let small = build_vr(&small_cloud, 1.0, 1).unwrap();
        let large = build_vr(&big_cloud, 1.0, 1).unwrap();
        let report = geometric_lemma_check(&small, &large, 1, 0.55, 0.6).unwrap();
        assert!(report.pass, "{report:?}");
        // Adding the center point kills the square loop at small radii.
        assert!(report.lhs >= 1);
    }

    #[test]
    fn geometric_lemma_rejects_unrelated_complexes() {
        let a = build_vr(&square(), 1.0, 1).unwrap();
        let shifted = PointCloud::from_rows(&[
            vec![5.0, 5.0],
            vec![6.0, 5.0],
            vec![6.0, 6.0],
            vec![5.0, 6.0],
        ])
        .unwrap();
        let b = build_vr(&shifted, 1.0, 1).unwrap();
        assert!(matches!(
            geometric_lemma_check(&a, &b, 1, 0.5, 0.5),
            Err(Error::NotNested(_))
        ));
    }

    #[test]
    fn csv_listing_skips_zero_bars() {
        let h = 3f64.sqrt() / 2.0;
        let cloud =
            PointCloud::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap();
        let complex = build_vr(&cloud, 1.0, 1).unwrap();
        let diagram = compute_diagram(&complex).unwrap();
        let csv = diagram.to_csv();
        assert!(csv.starts_with("q,birth,death\n"));
        assert!(csv.contains("0,0,inf"));
        assert!(!csv.contains("1,0.5,0.5"));
    }
}
