//! Filtered simplicial complexes on point clouds: Vietoris-Rips and Čech
//! builders plus executable checks of the structural conditions a builder
//! must satisfy for stabilization arguments to apply.

use crate::error::{Error, Result};
use crate::meb::meb_radius;
use crate::pointcloud::{euclidean, DistanceMatrix, PointCloud};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

/// Simplex with ascending vertex indices and the radius at which it enters
/// the filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<u32>,
    pub filtration: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Simplices of a truncated filtration, sorted by (filtration, dimension,
/// lexicographic vertex order). The source cloud is kept for geometric
/// queries such as chain diameters.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    cloud: PointCloud,
    q_max: usize,
    r_max: f64,
    simplices: Vec<Simplex>,
}

impl FilteredComplex {
    /// Low-level constructor; sorts but performs no closure check. Intended
    /// for diagnostics and fault injection, not for routine use.
    pub fn from_simplices(
        cloud: PointCloud,
        q_max: usize,
        r_max: f64,
        mut simplices: Vec<Simplex>,
    ) -> Result<Self> {
        for s in &simplices {
            if s.vertices.is_empty() || s.vertices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::MalformedComplex(format!(
                    "vertices {:?} are not strictly ascending",
                    s.vertices
                )));
            }
            if s.vertices.iter().any(|&v| v as usize >= cloud.len()) {
                return Err(Error::MalformedComplex(format!(
                    "vertex out of bounds in {:?}",
                    s.vertices
                )));
            }
            if !s.filtration.is_finite() {
                return Err(Error::MalformedComplex("non-finite filtration".into()));
            }
        }
        sort_simplices(&mut simplices);
        Ok(FilteredComplex {
            cloud,
            q_max,
            r_max,
            simplices,
        })
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn q_max(&self) -> usize {
        self.q_max
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    /// Indices (into the sorted simplex list) of q-simplices present at
    /// radius `r`, in list order.
    pub fn level_indices(&self, q: usize, r: f64) -> Vec<usize> {
        self.simplices
            .iter()
            .enumerate()
            .filter(|(_, s)| s.dim() == q && s.filtration <= r)
            .map(|(i, _)| i)
            .collect()
    }

    /// Checks that every facet is present with a filtration no larger than
    /// its coface's.
    pub fn verify_closure(&self) -> Result<()> {
        let index: HashMap<&[u32], usize> = self
            .simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.vertices.as_slice(), i))
            .collect();
        for s in &self.simplices {
            if s.dim() == 0 {
                continue;
            }
            for skip in 0..s.vertices.len() {
                let facet = facet_vertices(&s.vertices, skip);
                match index.get(facet.as_slice()) {
                    None => {
                        return Err(Error::MalformedComplex(format!(
                            "facet {facet:?} of {:?} is missing",
                            s.vertices
                        )))
                    }
                    Some(&i) => {
                        if self.simplices[i].filtration > s.filtration {
                            return Err(Error::MalformedComplex(format!(
                                "facet {facet:?} enters after {:?}",
                                s.vertices
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Deterministic text form, one `filtration;v0,v1,...,vk` line per
    /// simplex in total order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in &self.simplices {
            out.push_str(&format!("{};", s.filtration));
            let verts: Vec<String> = s.vertices.iter().map(|v| v.to_string()).collect();
            out.push_str(&verts.join(","));
            out.push('\n');
        }
        out
    }

    /// Largest distance between vertices of the union of the given simplices.
    pub fn chain_diameter(&self, simplex_indices: &[usize]) -> f64 {
        let mut verts: Vec<u32> = simplex_indices
            .iter()
            .flat_map(|&i| self.simplices[i].vertices.iter().copied())
            .collect();
        verts.sort_unstable();
        verts.dedup();
        let mut diam = 0.0f64;
        for a in 0..verts.len() {
            for b in (a + 1)..verts.len() {
                diam = diam.max(
                    self.cloud
                        .distance(verts[a] as usize, verts[b] as usize),
                );
            }
        }
        diam
    }
}

pub fn facet_vertices(vertices: &[u32], skip: usize) -> Vec<u32> {
    vertices
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, v)| *v)
        .collect()
}

fn sort_simplices(simplices: &mut [Simplex]) {
    simplices.sort_unstable_by(|a, b| {
        a.filtration
            .total_cmp(&b.filtration)
            .then(a.vertices.len().cmp(&b.vertices.len()))
            .then_with(|| a.vertices.cmp(&b.vertices))
    });
}

/// Complex family selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexKind {
    VietorisRips,
    Cech,
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexKind::VietorisRips => write!(f, "vr"),
            ComplexKind::Cech => write!(f, "cech"),
        }
    }
}

impl std::str::FromStr for ComplexKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vr" | "rips" | "vietoris-rips" => Ok(ComplexKind::VietorisRips),
            "cech" | "čech" => Ok(ComplexKind::Cech),
            other => Err(Error::InvalidArgument(format!(
                "unknown complex kind {other:?}"
            ))),
        }
    }
}

/// A filtered-complex construction on point clouds. `phi(r)` bounds how far
/// from an added point the complex may change at scale r; both built-in
/// families satisfy it with 2r.
pub trait ComplexBuilder: Sync {
    fn build(&self, cloud: &PointCloud, r_max: f64, q_max: usize) -> Result<FilteredComplex>;

    fn phi(&self, r: f64) -> f64 {
        2.0 * r
    }
}

impl ComplexBuilder for ComplexKind {
    fn build(&self, cloud: &PointCloud, r_max: f64, q_max: usize) -> Result<FilteredComplex> {
        match self {
            ComplexKind::VietorisRips => build_vr(cloud, r_max, q_max),
            ComplexKind::Cech => build_cech(cloud, r_max, q_max),
        }
    }
}

/// Vietoris-Rips filtration: a simplex enters at half its largest pairwise
/// distance. Simplices are emitted up to dimension `q_max + 1` so that
/// degree-`q_max` homology can still die.
pub fn build_vr(cloud: &PointCloud, r_max: f64, q_max: usize) -> Result<FilteredComplex> {
    expand_cliques(cloud, r_max, q_max, Filtration::HalfDiameter)
}

/// Čech filtration: a simplex enters at the radius of the minimal enclosing
/// ball of its vertices.
pub fn build_cech(cloud: &PointCloud, r_max: f64, q_max: usize) -> Result<FilteredComplex> {
    expand_cliques(cloud, r_max, q_max, Filtration::EnclosingBall)
}

enum Filtration {
    HalfDiameter,
    EnclosingBall,
}

fn expand_cliques(
    cloud: &PointCloud,
    r_max: f64,
    q_max: usize,
    rule: Filtration,
) -> Result<FilteredComplex> {
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "r_max must be positive and finite, got {r_max}"
        )));
    }
    let n = cloud.len();
    let dists = cloud.distance_matrix();
    let max_vertices = q_max + 2;

    // Neighbors above each vertex in index order; the clique expansion walks
    // these lists so every simplex is produced exactly once, ascending.
    let threshold = 2.0 * r_max;
    let mut upper: Vec<Vec<u32>> = vec![Vec::new(); n];
    for u in 0..n {
        for v in (u + 1)..n {
            if dists.get(u, v) <= threshold {
                upper[u].push(v as u32);
            }
        }
    }

    let mut simplices: Vec<Simplex> = Vec::new();
    let mut stack: Vec<u32> = Vec::with_capacity(max_vertices);
    for u in 0..n {
        stack.push(u as u32);
        simplices.push(Simplex {
            vertices: stack.clone(),
            filtration: 0.0,
        });
        grow(
            &mut stack,
            &upper[u],
            0.0,
            &dists,
            &upper,
            cloud,
            r_max,
            max_vertices,
            &rule,
            &mut simplices,
        );
        stack.pop();
    }

    if matches!(rule, Filtration::EnclosingBall) {
        enforce_monotone_filtrations(&mut simplices);
    }
    sort_simplices(&mut simplices);
    Ok(FilteredComplex {
        cloud: cloud.clone(),
        q_max,
        r_max,
        simplices,
    })
}

#[allow(clippy::too_many_arguments)]
fn grow(
    stack: &mut Vec<u32>,
    cand: &[u32],
    max_dist: f64,
    dists: &DistanceMatrix,
    upper: &[Vec<u32>],
    cloud: &PointCloud,
    r_max: f64,
    max_vertices: usize,
    rule: &Filtration,
    out: &mut Vec<Simplex>,
) {
    if stack.len() == max_vertices {
        return;
    }
    for (k, &v) in cand.iter().enumerate() {
        let mut d = max_dist;
        for &w in stack.iter() {
            d = d.max(dists.get(w as usize, v as usize));
        }
        stack.push(v);
        let filtration = match rule {
            Filtration::HalfDiameter => d / 2.0,
            Filtration::EnclosingBall => {
                if stack.len() == 2 {
                    d / 2.0
                } else {
                    let pts: Vec<&[f64]> =
                        stack.iter().map(|&w| cloud.point(w as usize)).collect();
                    meb_radius(&pts)
                }
            }
        };
        if filtration <= r_max {
            out.push(Simplex {
                vertices: stack.clone(),
                filtration,
            });
            let next: Vec<u32> = intersect_sorted(&cand[k + 1..], &upper[v as usize]);
            grow(
                stack,
                &next,
                d,
                dists,
                upper,
                cloud,
                r_max,
                max_vertices,
                rule,
                out,
            );
        }
        stack.pop();
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
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

/// Rounding in the enclosing-ball solve can leave a facet a few ulps above
/// its coface; push filtrations up along the face order so closure holds
/// exactly.
fn enforce_monotone_filtrations(simplices: &mut Vec<Simplex>) {
    let mut filt: HashMap<Vec<u32>, f64> = simplices
        .iter()
        .map(|s| (s.vertices.clone(), s.filtration))
        .collect();
    let mut order: Vec<usize> = (0..simplices.len()).collect();
    order.sort_unstable_by_key(|&i| simplices[i].vertices.len());
    for &i in &order {
        if simplices[i].dim() == 0 {
            continue;
        }
        let mut f = simplices[i].filtration;
        for skip in 0..simplices[i].vertices.len() {
            let facet = facet_vertices(&simplices[i].vertices, skip);
            if let Some(&g) = filt.get(&facet) {
                f = f.max(g);
            }
        }
        simplices[i].filtration = f;
        filt.insert(simplices[i].vertices.clone(), f);
    }
}

/// One failed instance of a structural condition.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionWitness {
    pub cloud: usize,
    pub r: f64,
    pub simplex: Vec<u32>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    pub passed: bool,
    pub witnesses: Vec<ConditionWitness>,
}

impl ConditionCheck {
    fn new() -> Self {
        ConditionCheck {
            passed: true,
            witnesses: Vec::new(),
        }
    }

    fn fail(&mut self, w: ConditionWitness) {
        self.passed = false;
        // A handful of witnesses is enough to debug a broken builder.
        if self.witnesses.len() < 8 {
            self.witnesses.push(w);
        }
    }
}

/// Outcome of the four builder conditions: monotonicity under point addition
/// with new simplices through the new point (K1), translation invariance
/// (K2), the diameter bound diam(σ) ≤ phi(r) (D1), and locality of add-point
/// changes within B_z(phi(r)) (D2).
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub k1: ConditionCheck,
    pub k2: ConditionCheck,
    pub d1: ConditionCheck,
    pub d2: ConditionCheck,
}

impl ConditionReport {
    pub fn all_passed(&self) -> bool {
        self.k1.passed && self.k2.passed && self.d1.passed && self.d2.passed
    }
}

const FILT_EQ_TOL: f64 = 1e-12;
const GEOM_TOL: f64 = 1e-9;

/// Runs the four structural checks over trial clouds. Each cloud needs at
/// least two points: the last plays the added point z, the rest form S.
/// Checks are exact per simplex, so they cover every radius up to
/// max(r_grid) rather than just the sampled grid.
pub fn verify_complex_conditions(
    builder: &dyn ComplexBuilder,
    clouds: &[PointCloud],
    r_grid: &[f64],
) -> Result<ConditionReport> {
    if clouds.is_empty() {
        return Err(Error::EmptyInput);
    }
    if r_grid.is_empty() || r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidArgument(
            "r_grid must be nonempty with positive finite entries".into(),
        ));
    }
    let r_max = r_grid.iter().cloned().fold(f64::MIN, f64::max);
    let q_cap = 2usize;

    let mut report = ConditionReport {
        k1: ConditionCheck::new(),
        k2: ConditionCheck::new(),
        d1: ConditionCheck::new(),
        d2: ConditionCheck::new(),
    };

    for (ci, cloud) in clouds.iter().enumerate() {
        if cloud.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "trial cloud {ci} needs at least two points"
            )));
        }
        let z_index = cloud.len() - 1;
        let z = cloud.point(z_index).to_vec();
        let base = cloud.select(&(0..z_index).collect::<Vec<_>>());
        let with_z = builder.build(cloud, r_max, q_cap)?;
        let without_z = builder.build(&base, r_max, q_cap)?;

        let map_small: HashMap<&[u32], f64> = without_z
            .simplices()
            .iter()
            .map(|s| (s.vertices.as_slice(), s.filtration))
            .collect();
        let map_big: HashMap<&[u32], f64> = with_z
            .simplices()
            .iter()
            .map(|s| (s.vertices.as_slice(), s.filtration))
            .collect();

        // K1 monotonicity: nothing present over S may disappear or appear
        // later once z is added.
        for s in without_z.simplices() {
            match map_big.get(s.vertices.as_slice()) {
                None => report.k1.fail(ConditionWitness {
                    cloud: ci,
                    r: s.filtration,
                    simplex: s.vertices.clone(),
                    detail: "simplex disappeared after point addition".into(),
                }),
                Some(&f) if f > s.filtration + FILT_EQ_TOL => report.k1.fail(ConditionWitness {
                    cloud: ci,
                    r: s.filtration,
                    simplex: s.vertices.clone(),
                    detail: format!("filtration moved from {} to {f}", s.filtration),
                }),
                _ => {}
            }
        }
        // K1 novelty: anything new must contain z.
        for s in with_z.simplices() {
            let is_new = match map_small.get(s.vertices.as_slice()) {
                None => true,
                Some(&f) => s.filtration < f - FILT_EQ_TOL,
            };
            if is_new && !s.vertices.contains(&(z_index as u32)) {
                report.k1.fail(ConditionWitness {
                    cloud: ci,
                    r: s.filtration,
                    simplex: s.vertices.clone(),
                    detail: "new simplex avoids the added point".into(),
                });
            }
        }

        // K2: translate and compare.
        let shift: Vec<f64> = (0..cloud.dim()).map(|j| 0.5 + 0.25 * j as f64).collect();
        let translated = PointCloud::new(
            cloud.dim(),
            cloud
                .coords()
                .iter()
                .enumerate()
                .map(|(k, c)| c + shift[k % cloud.dim()])
                .collect(),
        )?;
        let moved = builder.build(&translated, r_max, q_cap)?;
        if moved.len() != with_z.len() {
            report.k2.fail(ConditionWitness {
                cloud: ci,
                r: r_max,
                simplex: Vec::new(),
                detail: format!(
                    "translation changed simplex count {} -> {}",
                    with_z.len(),
                    moved.len()
                ),
            });
        } else {
            let moved_map: HashMap<&[u32], f64> = moved
                .simplices()
                .iter()
                .map(|s| (s.vertices.as_slice(), s.filtration))
                .collect();
            for s in with_z.simplices() {
                match moved_map.get(s.vertices.as_slice()) {
                    Some(&f) if (f - s.filtration).abs() <= GEOM_TOL => {}
                    got => {
                        report.k2.fail(ConditionWitness {
                            cloud: ci,
                            r: s.filtration,
                            simplex: s.vertices.clone(),
                            detail: format!(
                                "filtration {} vs translated {:?}",
                                s.filtration, got
                            ),
                        });
                        break;
                    }
                }
            }
        }

        // D1: diam(σ) ≤ phi(filtration) for every simplex of both builds.
        for complex in [&without_z, &with_z] {
            for s in complex.simplices() {
                let mut diam = 0.0f64;
                for a in 0..s.vertices.len() {
                    for b in (a + 1)..s.vertices.len() {
                        diam = diam.max(euclidean(
                            complex.cloud().point(s.vertices[a] as usize),
                            complex.cloud().point(s.vertices[b] as usize),
                        ));
                    }
                }
                if diam > builder.phi(s.filtration) + GEOM_TOL {
                    report.d1.fail(ConditionWitness {
                        cloud: ci,
                        r: s.filtration,
                        simplex: s.vertices.clone(),
                        detail: format!("diameter {diam} exceeds phi = {}", builder.phi(s.filtration)),
                    });
                }
            }
        }

        // D2: every simplex of the symmetric difference sits inside
        // B_z(phi(r)) at the first radius where it differs.
        let mut changed: Vec<(Vec<u32>, f64)> = Vec::new();
        for s in with_z.simplices() {
            match map_small.get(s.vertices.as_slice()) {
                Some(&f) if (f - s.filtration).abs() <= FILT_EQ_TOL => {}
                Some(&f) => changed.push((s.vertices.clone(), s.filtration.min(f))),
                None => changed.push((s.vertices.clone(), s.filtration)),
            }
        }
        for s in without_z.simplices() {
            if !map_big.contains_key(s.vertices.as_slice()) {
                changed.push((s.vertices.clone(), s.filtration));
            }
        }
        for (verts, r) in changed {
            let reach = builder.phi(r) + GEOM_TOL;
            for &v in &verts {
                if euclidean(cloud.point(v as usize), &z) > reach {
                    report.d2.fail(ConditionWitness {
                        cloud: ci,
                        r,
                        simplex: verts.clone(),
                        detail: format!("vertex {v} lies outside B_z(phi({r}))"),
                    });
                    break;
                }
            }
        }
    }
    Ok(report)
}
