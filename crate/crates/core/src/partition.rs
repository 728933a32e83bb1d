//! Nodal partitions of (gauge-twisted) eigenvectors: sign-consistent flood
//! fill, per-domain ground energies, critical points with arity and parity,
//! the Euler-bound check and the hexagonal trend table.
//!
//! Two adjacent points belong to the same domain exactly when
//! u_i u_j sigma_ij > 0 and both values clear the zero threshold. Around a
//! plaquette holding an odd number of poles the sign-consistency product is
//! -1, so a walk encircling it must cross an odd number of nodal arcs; the
//! flood fill therefore reproduces the slit-like single domain of a one-pole
//! ground state rather than splitting it in two.

use serde::{Deserialize, Serialize};

use crate::eigen::{smallest_eigenpairs, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::operator::{assemble_masked_laplacian_filtered, GaugeField};
use crate::scalar::Real;

pub const BOUNDARY: i32 = -1;

/// Edge state relative to the nodal set.
const ARC_UNDEFINED: i8 = 0;
const ARC_CONSISTENT: i8 = 1;
const ARC_CROSSED: i8 = -1;

/// Where a critical point was localized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    /// Center of a plaquette whose four corners are all labeled.
    Plaquette,
    /// A near-zero grid point with all four axis neighbors in the grid.
    GridPoint,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalPoint<F> {
    pub x: F,
    pub y: F,
    pub arity: usize,
    pub odd: bool,
    pub kind: VertexKind,
}

/// A point of the nodal set adjacent to the domain boundary; its arity is
/// detected but not certified.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryContact<F> {
    pub x: F,
    pub y: F,
}

#[derive(Clone, Debug)]
pub struct NodalPartition<F: Real> {
    pub grid: Grid<F>,
    /// Per grid point: domain label 0..k-1, or BOUNDARY for near-zero points.
    pub labels: Vec<i32>,
    pub k: usize,
    pub domain_points: Vec<Vec<u32>>,
    /// Sign of u per point (0 on near-zero points).
    signs: Vec<i8>,
    /// Nodal-arc state of each right/up edge.
    right_arc: Vec<i8>,
    up_arc: Vec<i8>,
    /// Pole plaquettes inherited from the gauge field.
    pub pole_plaquettes: Vec<u32>,
    pub critical_points: Vec<CriticalPoint<F>>,
    pub boundary_contacts: Vec<BoundaryContact<F>>,
    /// Per pole: index into critical_points within 2h, or None.
    pub pole_association: Vec<Option<usize>>,
}

/// Labels the nodal domains of an eigenvector under the given gauge.
/// `zero_tol` is relative to max |u|; points below it become BOUNDARY.
pub fn extract_partition<F: Real>(
    u: &[F],
    gauge: &GaugeField,
    grid: &Grid<F>,
    zero_tol: F,
) -> Result<NodalPartition<F>> {
    let n = grid.len();
    assert_eq!(u.len(), n, "eigenvector length must match grid");
    if !(zero_tol > F::zero() && zero_tol < F::of(0.1)) {
        return Err(Error::Config("zero_tol must lie in (0, 0.1)".into()));
    }
    let mut max_abs = F::zero();
    for &x in u {
        if x.abs() > max_abs {
            max_abs = x.abs();
        }
    }
    if max_abs == F::zero() {
        return Err(Error::AllZero);
    }
    let tau = zero_tol * max_abs;

    let signs: Vec<i8> = u
        .iter()
        .map(|&x| {
            if x.abs() <= tau {
                0
            } else if x > F::zero() {
                1
            } else {
                -1
            }
        })
        .collect();

    let arc = |p: usize, q: usize, sigma: i8| -> i8 {
        if signs[p] == 0 || signs[q] == 0 {
            ARC_UNDEFINED
        } else if signs[p] * signs[q] * sigma > 0 {
            ARC_CONSISTENT
        } else {
            ARC_CROSSED
        }
    };
    let mut right_arc = vec![ARC_UNDEFINED; n];
    let mut up_arc = vec![ARC_UNDEFINED; n];
    for p in 0..n {
        if let Some(q) = grid.right(p) {
            right_arc[p] = arc(p, q, gauge.right_sign(p));
        }
        if let Some(q) = grid.up(p) {
            up_arc[p] = arc(p, q, gauge.up_sign(p));
        }
    }

    // Sign-consistent flood fill in ascending point order.
    let mut labels = vec![BOUNDARY; n];
    let mut domain_points: Vec<Vec<u32>> = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if signs[start] == 0 || labels[start] != BOUNDARY {
            continue;
        }
        let lbl = domain_points.len() as i32;
        let mut pts = Vec::new();
        labels[start] = lbl;
        stack.push(start);
        while let Some(p) = stack.pop() {
            pts.push(p as u32);
            let mut visit = |q: usize, state: i8| {
                if state == ARC_CONSISTENT && labels[q] == BOUNDARY {
                    labels[q] = lbl;
                    stack.push(q);
                }
            };
            if let Some(q) = grid.right(p) {
                visit(q, right_arc[p]);
            }
            if let Some(q) = grid.up(p) {
                visit(q, up_arc[p]);
            }
            let (ix, iy) = grid.lattice(p);
            if let Some(q) = grid.at(ix as i64 - 1, iy as i64) {
                visit(q, right_arc[q]);
            }
            if let Some(q) = grid.at(ix as i64, iy as i64 - 1) {
                visit(q, up_arc[q]);
            }
        }
        pts.sort_unstable();
        domain_points.push(pts);
    }
    let k = domain_points.len();

    let mut partition = NodalPartition {
        grid: grid.clone(),
        labels,
        k,
        domain_points,
        signs,
        right_arc,
        up_arc,
        pole_plaquettes: gauge.pole_plaquettes.clone(),
        critical_points: Vec::new(),
        boundary_contacts: Vec::new(),
        pole_association: Vec::new(),
    };
    detect_critical_points(&mut partition);
    Ok(partition)
}

/// Ground energy of one partition domain: the smallest eigenvalue of the
/// plain Dirichlet Laplacian restricted to the domain's grid points (poles
/// lie on domain boundaries, so no gauge is involved). Edges crossed by the
/// nodal set are removed even when both endpoints carry the same label: a
/// slit reaching into a domain is part of its Dirichlet boundary.
pub fn domain_energy<F: Real>(
    partition: &NodalPartition<F>,
    domain: usize,
    tol: F,
    seed: u64,
) -> Result<F> {
    let pts = partition
        .domain_points
        .get(domain)
        .ok_or(Error::EmptyDomain(domain))?;
    if pts.is_empty() {
        return Err(Error::EmptyDomain(domain));
    }
    let grid = &partition.grid;
    let keep_edge = |p: usize, horizontal: bool| -> bool {
        let state = if horizontal {
            partition.right_arc[p]
        } else {
            partition.up_arc[p]
        };
        state == ARC_CONSISTENT
    };
    let op = assemble_masked_laplacian_filtered(grid, pts, keep_edge);
    let sp = smallest_eigenpairs(&op, 1, tol, seed)?;
    Ok(sp.eigenvalues[0])
}

/// All domain energies (in parallel) and their maximum Lambda.
pub fn partition_energies<F: Real>(
    partition: &NodalPartition<F>,
    tol: F,
    seed: u64,
) -> Result<(Vec<F>, F)> {
    use rayon::prelude::*;
    let energies: Result<Vec<F>> = (0..partition.k)
        .into_par_iter()
        .map(|i| domain_energy(partition, i, tol, seed))
        .collect();
    let energies = energies?;
    let lambda = energies
        .iter()
        .copied()
        .fold(F::zero(), |a, b| if b > a { b } else { a });
    Ok((energies, lambda))
}

/// The critical points of a partition, as stored during extraction.
pub fn critical_points<F: Real>(partition: &NodalPartition<F>) -> &[CriticalPoint<F>] {
    &partition.critical_points
}

fn detect_critical_points<F: Real>(p: &mut NodalPartition<F>) {
    let grid = &p.grid;
    let mut cps: Vec<CriticalPoint<F>> = Vec::new();
    let mut contacts: Vec<BoundaryContact<F>> = Vec::new();

    // Plaquette vertices: all four corners labeled, >= 3 crossed cycle edges.
    for q in 0..grid.plaquette_count() {
        let (sw, se, nw, _ne) = grid.plaquette_corners(q);
        if p.signs[sw] == 0 || p.signs[se] == 0 || p.signs[nw] == 0 {
            continue;
        }
        let (_, _, _, ne) = grid.plaquette_corners(q);
        if p.signs[ne] == 0 {
            continue;
        }
        let edges = [p.right_arc[sw], p.right_arc[nw], p.up_arc[sw], p.up_arc[se]];
        let nu = edges.iter().filter(|&&e| e == ARC_CROSSED).count();
        if nu >= 3 {
            let (x, y) = grid.plaquette_center(q);
            cps.push(CriticalPoint {
                x,
                y,
                arity: nu,
                odd: nu % 2 == 1,
                kind: VertexKind::Plaquette,
            });
        }
    }

    // Grid-point vertices: near-zero points. Arcs continue through adjacent
    // near-zero axis neighbors and cross sign-inconsistent ring edges.
    for g in 0..grid.len() {
        if p.signs[g] != 0 {
            continue;
        }
        let (ix, iy) = grid.lattice(g);
        let (ix, iy) = (ix as i64, iy as i64);
        let axis = [
            grid.at(ix + 1, iy),
            grid.at(ix - 1, iy),
            grid.at(ix, iy + 1),
            grid.at(ix, iy - 1),
        ];
        if axis.iter().any(|a| a.is_none()) {
            let (x, y) = grid.point_coords(g);
            contacts.push(BoundaryContact { x, y });
            continue;
        }
        let mut nu = axis
            .iter()
            .map(|a| a.unwrap())
            .filter(|&q| p.signs[q] == 0)
            .count();
        // Ring edges (both endpoints labeled): E-NE, NE-N, N-NW, NW-W,
        // W-SW, SW-S, S-SE, SE-E.
        let ring_edges: [(Option<usize>, bool); 8] = [
            (grid.at(ix + 1, iy), false),     // E up-edge -> NE
            (grid.at(ix, iy + 1), true),      // N right-edge -> NE
            (grid.at(ix - 1, iy + 1), true),  // NW right-edge -> N
            (grid.at(ix - 1, iy), false),     // W up-edge -> NW
            (grid.at(ix - 1, iy - 1), false), // SW up-edge -> W
            (grid.at(ix - 1, iy - 1), true),  // SW right-edge -> S
            (grid.at(ix, iy - 1), true),      // S right-edge -> SE
            (grid.at(ix + 1, iy - 1), false), // SE up-edge -> E
        ];
        for (base, horizontal) in ring_edges {
            if let Some(b) = base {
                let state = if horizontal {
                    p.right_arc[b]
                } else {
                    p.up_arc[b]
                };
                if state == ARC_CROSSED {
                    nu += 1;
                }
            }
        }
        if nu >= 3 {
            let (x, y) = grid.point_coords(g);
            cps.push(CriticalPoint {
                x,
                y,
                arity: nu,
                odd: nu % 2 == 1,
                kind: VertexKind::GridPoint,
            });
        }
    }

    // Pole association: nearest critical point within 2h.
    let two_h = p.grid.h.to_f64_lossy() * 2.0;
    let mut assoc = Vec::with_capacity(p.pole_plaquettes.len());
    for &q in &p.pole_plaquettes {
        let (px, py) = grid.plaquette_center(q as usize);
        let (px, py) = (px.to_f64_lossy(), py.to_f64_lossy());
        let mut best: Option<(f64, usize)> = None;
        for (i, cp) in cps.iter().enumerate() {
            let d =
                ((cp.x.to_f64_lossy() - px).powi(2) + (cp.y.to_f64_lossy() - py).powi(2)).sqrt();
            if d <= two_h && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, i));
            }
        }
        assoc.push(best.map(|(_, i)| i));
    }

    p.critical_points = cps;
    p.boundary_contacts = contacts;
    p.pole_association = assoc;
}

/// Dual-lattice view of the nodal set: one vertex per lattice cell the
/// nodal set passes through (at least one crossed edge on its cycle), with
/// arcs joining cells that share a crossed primal edge. Near-zero grid
/// points appear as their own fat vertices joined to the four cells around
/// them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryGraph<F> {
    pub vertices: Vec<BoundaryVertex<F>>,
    /// Arcs as index pairs into `vertices`.
    pub arcs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryVertex<F> {
    pub x: F,
    pub y: F,
    /// Number of nodal arcs incident to the vertex.
    pub arity: usize,
    /// True for fat vertices sitting on a near-zero grid point.
    pub on_grid_point: bool,
}

/// Builds the dual-lattice boundary graph of a partition.
pub fn boundary_graph<F: Real>(p: &NodalPartition<F>) -> BoundaryGraph<F> {
    let grid = &p.grid;
    let ncells = (grid.nx - 1) * (grid.ny - 1);
    // Union near-zero grid points with their four surrounding cells.
    let mut owner: Vec<i64> = (0..ncells as i64).collect();
    fn find(owner: &mut [i64], mut a: usize) -> usize {
        while owner[a] != a as i64 {
            let up = owner[a] as usize;
            owner[a] = owner[up];
            a = up;
        }
        a
    }
    let cell_of = |ix: i64, iy: i64| -> Option<usize> {
        if ix < 0 || iy < 0 || ix as usize >= grid.nx - 1 || iy as usize >= grid.ny - 1 {
            None
        } else {
            Some(iy as usize * (grid.nx - 1) + ix as usize)
        }
    };
    let mut fat = vec![false; ncells];
    for g in 0..grid.len() {
        if p.signs[g] != 0 {
            continue;
        }
        let (ix, iy) = grid.lattice(g);
        let (ix, iy) = (ix as i64, iy as i64);
        let cells: Vec<usize> = [(ix - 1, iy - 1), (ix, iy - 1), (ix - 1, iy), (ix, iy)]
            .into_iter()
            .filter_map(|(cx, cy)| cell_of(cx, cy))
            .collect();
        if let Some(&first) = cells.first() {
            let root = find(&mut owner, first);
            fat[root] = true;
            for &c in &cells[1..] {
                let rc = find(&mut owner, c);
                let keep = root.min(rc);
                let drop = root.max(rc);
                owner[drop] = keep as i64;
                fat[keep] |= fat[drop];
            }
        }
    }

    // Crossed primal edges induce dual segments between cell groups.
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for g in 0..grid.len() {
        let (ix, iy) = grid.lattice(g);
        let (ix, iy) = (ix as i64, iy as i64);
        if p.right_arc[g] == ARC_CROSSED {
            // Horizontal edge: cells above and below.
            if let (Some(a), Some(b)) = (cell_of(ix, iy), cell_of(ix, iy - 1)) {
                segments.push((find(&mut owner, a), find(&mut owner, b)));
            }
        }
        if p.up_arc[g] == ARC_CROSSED {
            // Vertical edge: cells right and left.
            if let (Some(a), Some(b)) = (cell_of(ix, iy), cell_of(ix - 1, iy)) {
                segments.push((find(&mut owner, a), find(&mut owner, b)));
            }
        }
    }

    // Vertex set: groups with at least one incident segment or a fat core.
    let mut arity = std::collections::HashMap::<usize, usize>::new();
    for &(a, b) in &segments {
        *arity.entry(a).or_insert(0) += 1;
        if b != a {
            *arity.entry(b).or_insert(0) += 1;
        }
    }
    let mut index = std::collections::HashMap::<usize, usize>::new();
    let mut vertices = Vec::new();
    let mut groups: Vec<usize> = arity.keys().copied().collect();
    groups.sort_unstable();
    for gid in groups {
        let cy = (gid / (grid.nx - 1)) as i64;
        let cx = (gid % (grid.nx - 1)) as i64;
        let (x, y) = grid.cell_center(cx, cy);
        index.insert(gid, vertices.len());
        vertices.push(BoundaryVertex {
            x,
            y,
            arity: arity[&gid],
            on_grid_point: fat[gid],
        });
    }
    let mut arcs: Vec<(usize, usize)> = segments
        .iter()
        .filter(|(a, b)| a != b)
        .map(|&(a, b)| {
            let (i, j) = (index[&a], index[&b]);
            (i.min(j), i.max(j))
        })
        .collect();
    arcs.sort_unstable();
    arcs.dedup();
    BoundaryGraph { vertices, arcs }
}

/// Verdict of the odd-critical-point Euler bound #X_odd <= 2k - 4.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EulerReport {
    pub k: usize,
    pub odd_count: usize,
    /// Raw bound 2k - 4; negative for k < 2.
    pub bound: i64,
    pub pass: bool,
    /// True for k <= 2 where the bound carries no information.
    pub vacuous: bool,
}

pub fn euler_check<F: Real>(partition: &NodalPartition<F>) -> EulerReport {
    euler_check_counts(
        partition.k,
        partition.critical_points.iter().filter(|c| c.odd).count(),
    )
}

/// Same verdict from raw counts (used for synthetic checks).
pub fn euler_check_counts(k: usize, odd_count: usize) -> EulerReport {
    let bound = 2 * k as i64 - 4;
    EulerReport {
        k,
        odd_count,
        bound,
        pass: (odd_count as i64) <= bound.max(0),
        vacuous: k <= 2,
    }
}

/// Largest |u| over the nodal set estimate: number of nodal domains mu(u).
pub fn nodal_domain_count<F: Real>(
    u: &[F],
    gauge: &GaugeField,
    grid: &Grid<F>,
    zero_tol: F,
) -> Result<usize> {
    Ok(extract_partition(u, gauge, grid, zero_tol)?.k)
}

/// One row of the hexagonal trend table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HexaRow<F> {
    pub k: usize,
    /// A(Omega) * L_k / k.
    pub scaled_energy: F,
    /// nu_k / k when the odd-critical-point count is supplied.
    pub nu_ratio: Option<F>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HexaReport<F> {
    pub rows: Vec<HexaRow<F>>,
    /// Ground energy of the area-1 regular hexagon (grid reference value).
    pub hexa1_reference: F,
    /// Faber-Krahn floor pi j^2: every scaled energy must sit above it.
    pub faber_krahn_floor: F,
    /// Conjectured limit of nu_k / k.
    pub nu_limit_conjectured: F,
}

/// Assembles the trend table A L_k / k and nu_k / k against the hexagonal
/// reference energy.
pub fn hexagonal_diagnostic<F: Real>(
    entries: &[(usize, F, Option<usize>)],
    area: F,
    hexa1_reference: F,
) -> HexaReport<F> {
    let j = crate::constants::bessel_j01::<F>();
    let rows = entries
        .iter()
        .map(|&(k, lk, nu)| HexaRow {
            k,
            scaled_energy: area * lk / F::of(k as f64),
            nu_ratio: nu.map(|n| F::of(n as f64) / F::of(k as f64)),
        })
        .collect();
    HexaReport {
        rows,
        hexa1_reference,
        faber_krahn_floor: F::pi() * j * j,
        nu_limit_conjectured: F::of(2.0),
    }
}

/// Ground energy of the regular hexagon of area 1 at spacing h.
pub fn hexa1_energy<F: Real>(h: F, tol: F, seed: u64) -> Result<F> {
    let spec = crate::geometry::DomainSpec::RegularPolygon {
        sides: 6,
        area: F::one(),
    };
    let grid = crate::geometry::build_grid(&spec, h)?;
    let op = crate::operator::assemble_laplacian(&grid);
    Ok(smallest_eigenpairs(&op, 1, tol, seed)?.eigenvalues[0])
}

/// Convenience: spectrum of the k-th eigenfunction's partition.
pub fn partition_of_eigenfunction<F: Real>(
    spectrum: &Spectrum<F>,
    k: usize,
    gauge: &GaugeField,
    grid: &Grid<F>,
    zero_tol: F,
) -> Result<NodalPartition<F>> {
    let u = spectrum
        .eigenvectors
        .get(k - 1)
        .ok_or(Error::DimensionTooSmall {
            m: k,
            n: spectrum.eigenvectors.len(),
        })?;
    extract_partition(u, gauge, grid, zero_tol)
}

/// P2 (ASCII PGM) raster of the partition: BOUNDARY and exterior are 0,
/// domains get evenly spread gray levels.
pub fn partition_to_pgm<F: Real>(partition: &NodalPartition<F>) -> String {
    let grid = &partition.grid;
    let (nx, ny) = (grid.nx, grid.ny);
    let k = partition.k.max(1);
    let gray = |label: i32| -> u32 {
        if label < 0 {
            0
        } else {
            40 + (label as u32 * 215) / k as u32
        }
    };
    let mut out = String::new();
    out.push_str("P2\n");
    out.push_str(&format!("{} {}\n255\n", nx, ny));
    for row in (0..ny).rev() {
        let mut line = String::new();
        for col in 0..nx {
            let v = match grid.at(col as i64, row as i64) {
                Some(p) => gray(partition.labels[p]),
                None => 0,
            };
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&v.to_string());
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, default_cuts, DomainSpec, PoleConfig};
    use crate::operator::assemble_ab_with_gauge;

    type D = DomainSpec<f64>;

    fn synthetic(grid: &Grid<f64>, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..grid.len())
            .map(|p| {
                let (x, y) = grid.point_coords(p);
                f(x, y)
            })
            .collect()
    }

    #[test]
    fn sine_mode_splits_at_midline() {
        let grid = build_grid(&D::UnitSquare, 1.0 / 32.0).unwrap();
        let gauge = GaugeField::trivial(grid.len());
        let pi = std::f64::consts::PI;
        let u = synthetic(&grid, |x, y| (pi * x).sin() * (2.0 * pi * y).sin());
        let part = extract_partition(&u, &gauge, &grid, 1e-6).unwrap();
        assert_eq!(part.k, 2);
        for p in 0..grid.len() {
            let (_, y) = grid.point_coords(p);
            if part.labels[p] >= 0 {
                let expect = if y < 0.5 {
                    part.labels[0]
                } else {
                    1 - part.labels[0]
                };
                assert_eq!(part.labels[p], expect);
            }
        }
        // A line of near-zero points at y = 1/2, none of them critical.
        assert_eq!(euler_check(&part).odd_count, 0);
    }

    #[test]
    fn four_domain_mode_has_even_center_vertex() {
        let grid = build_grid(&D::UnitSquare, 1.0 / 32.0).unwrap();
        let gauge = GaugeField::trivial(grid.len());
        let pi = std::f64::consts::PI;
        let u = synthetic(&grid, |x, y| (2.0 * pi * x).sin() * (2.0 * pi * y).sin());
        let part = extract_partition(&u, &gauge, &grid, 1e-6).unwrap();
        assert_eq!(part.k, 4);
        let cps = critical_points(&part);
        assert_eq!(cps.len(), 1, "{cps:?}");
        assert_eq!(cps[0].arity, 4);
        assert!(!cps[0].odd);
        assert!((cps[0].x - 0.5).abs() < 1e-12 && (cps[0].y - 0.5).abs() < 1e-12);
        let euler = euler_check(&part);
        assert!(euler.pass); // 0 odd points <= 4
    }

    #[test]
    fn checkerboard_vertex_at_plaquette() {
        // Mode with nodal crossing between grid points: shift the sine so the
        // crossing sits mid-cell.
        let grid = build_grid(&D::UnitSquare, 1.0 / 33.0).unwrap();
        let gauge = GaugeField::trivial(grid.len());
        let pi = std::f64::consts::PI;
        let u = synthetic(&grid, |x, y| (2.0 * pi * x).sin() * (2.0 * pi * y).sin());
        let part = extract_partition(&u, &gauge, &grid, 1e-6).unwrap();
        assert_eq!(part.k, 4);
        let cps = critical_points(&part);
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].arity, 4);
        assert_eq!(cps[0].kind, VertexKind::Plaquette);
    }

    #[test]
    fn all_zero_rejected() {
        let grid = build_grid(&D::UnitSquare, 0.25).unwrap();
        let gauge = GaugeField::trivial(grid.len());
        let u = vec![0.0; grid.len()];
        assert!(matches!(
            extract_partition(&u, &gauge, &grid, 1e-6),
            Err(Error::AllZero)
        ));
    }

    #[test]
    fn single_pole_ground_state_is_one_slit_domain() {
        // Half-flux pole: the ground state carries one nodal ray, and the two
        // sides of the ray reconnect around the pole, leaving one domain.
        let grid = build_grid(&D::Disk { radius: 1.0 }, 1.0 / 40.0).unwrap();
        let poles = PoleConfig::snap(&grid, &[(0.0, 0.0)]).unwrap();
        let cuts = default_cuts(&grid, &poles).unwrap();
        let (op, gauge) = assemble_ab_with_gauge(&grid, &poles, &cuts).unwrap();
        let sp = smallest_eigenpairs(&op, 1, 1e-9, 42).unwrap();
        let part = extract_partition(&sp.eigenvectors[0], &gauge, &grid, 1e-6).unwrap();
        assert_eq!(part.k, 1, "slit disk must stay connected");
    }

    #[test]
    fn centered_pole_square_modes() {
        // Odd lattice puts a plaquette center exactly at the square's center.
        // The ground pair is exactly degenerate with one nodal ray each; the
        // next cluster has three rays meeting at the pole: three sectors and
        // an odd critical point sitting on the pole.
        let grid = build_grid(&D::UnitSquare, 1.0 / 65.0).unwrap();
        let poles = PoleConfig::snap(&grid, &[(0.5, 0.5)]).unwrap();
        assert_eq!(poles.coords()[0], (0.5, 0.5));
        let cuts = default_cuts(&grid, &poles).unwrap();
        let (op, gauge) = assemble_ab_with_gauge(&grid, &poles, &cuts).unwrap();
        let sp = smallest_eigenpairs(&op, 3, 1e-9, 42).unwrap();
        assert!((sp.eigenvalues[1] - sp.eigenvalues[0]).abs() < 1e-9 * sp.eigenvalues[0]);

        let ground = extract_partition(&sp.eigenvectors[0], &gauge, &grid, 1e-6).unwrap();
        assert_eq!(ground.k, 1, "one-ray slit leaves a single domain");

        let third = extract_partition(&sp.eigenvectors[2], &gauge, &grid, 1e-6).unwrap();
        assert_eq!(third.k, 3);
        let cp_idx = third.pole_association[0].expect("pole matches a critical point");
        let cp = &third.critical_points[cp_idx];
        assert_eq!(cp.arity, 3);
        assert!(cp.odd);
        assert!((cp.x - 0.5).abs() < 1e-12 && (cp.y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn courant_bound_on_square_modes() {
        // mu(u_k) <= k for plain Laplacian eigenfunctions.
        let grid = build_grid(&D::UnitSquare, 1.0 / 33.0).unwrap();
        let op = crate::operator::assemble_laplacian(&grid);
        let sp = smallest_eigenpairs(&op, 6, 1e-9, 42).unwrap();
        let gauge = GaugeField::trivial(grid.len());
        for k in 1..=6 {
            let part = extract_partition(&sp.eigenvectors[k - 1], &gauge, &grid, 1e-6).unwrap();
            assert!(part.k <= k, "mu(u_{k}) = {} exceeds {k}", part.k);
        }
    }

    #[test]
    fn hexagonal_trend_table() {
        let pi2 = std::f64::consts::PI.powi(2);
        let entries = [
            (1usize, 2.0 * pi2, Some(0usize)),
            (2, 5.0 * pi2, Some(0)),
            (3, 66.58, Some(1)),
        ];
        let hexa = 18.59;
        let report = hexagonal_diagnostic(&entries, 1.0, hexa);
        assert_eq!(report.rows.len(), 3);
        assert!((report.rows[0].scaled_energy - 2.0 * pi2).abs() < 1e-12);
        assert!((report.rows[2].scaled_energy - 66.58 / 3.0).abs() < 1e-12);
        assert!((report.rows[2].nu_ratio.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        // Faber-Krahn floor below every scaled energy.
        for row in &report.rows {
            assert!(row.scaled_energy >= report.faber_krahn_floor);
        }
        assert!((report.nu_limit_conjectured - 2.0).abs() < 1e-12);
        // Grid reference value for the area-1 hexagon lands in the expected
        // basin between the disk and square constants.
        let computed = hexa1_energy(1.0 / 64.0, 1e-9, 42).unwrap();
        assert!(
            computed > report.faber_krahn_floor && computed < 2.0 * pi2,
            "{computed}"
        );
    }

    #[test]
    fn offset_pole_disk_splits_third_mode() {
        // With the pole snapped off-center the three-ray junction is unstable:
        // the split pair gives one ray plus a detached arc (two domains), then
        // three domains. The odd-crossing parity at the pole plaquette holds
        // for every eigenfunction.
        let grid = build_grid(&D::Disk { radius: 1.0 }, 1.0 / 40.0).unwrap();
        let poles = PoleConfig::snap(&grid, &[(0.0, 0.0)]).unwrap();
        let cuts = default_cuts(&grid, &poles).unwrap();
        let (op, gauge) = assemble_ab_with_gauge(&grid, &poles, &cuts).unwrap();
        let sp = smallest_eigenpairs(&op, 4, 1e-9, 42).unwrap();
        let ks: Vec<usize> = (0..4)
            .map(|i| {
                extract_partition(&sp.eigenvectors[i], &gauge, &grid, 1e-6)
                    .unwrap()
                    .k
            })
            .collect();
        assert_eq!(ks, vec![1, 1, 2, 3]);
        // Parity law at the pole plaquette for each eigenvector.
        let q = poles.plaquette_ids()[0] as usize;
        let (sw, se, nw, ne) = grid.plaquette_corners(q);
        for u in &sp.eigenvectors {
            let cross =
                |a: usize, b: usize, s: i8| (u[a].signum() * u[b].signum() * s as f64) < 0.0;
            let crossings = [
                cross(sw, se, gauge.right_sign(sw)),
                cross(nw, ne, gauge.right_sign(nw)),
                cross(sw, nw, gauge.up_sign(sw)),
                cross(se, ne, gauge.up_sign(se)),
            ]
            .iter()
            .filter(|&&c| c)
            .count();
            assert_eq!(
                crossings % 2,
                1,
                "odd number of nodal crossings at the pole"
            );
        }
    }

    #[test]
    fn domain_energy_half_square() {
        let grid = build_grid(&D::UnitSquare, 1.0 / 64.0).unwrap();
        let gauge = GaugeField::trivial(grid.len());
        let pi = std::f64::consts::PI;
        let u = synthetic(&grid, |x, y| (pi * x).sin() * (2.0 * pi * y).sin());
        let part = extract_partition(&u, &gauge, &grid, 1e-6).unwrap();
        let (energies, lambda) = partition_energies(&part, 1e-9, 42).unwrap();
        // Half square (0,1)x(0,1/2): ground energy 5 pi^2.
        let expect = 5.0 * pi * pi;
        for e in &energies {
            assert!((e - expect).abs() / expect < 5e-3, "e={e}");
        }
        assert!((lambda - expect).abs() / expect < 5e-3);
    }

    #[test]
    fn relabeling_invariance_of_lambda() {
        let grid = build_grid(&D::UnitSquare, 1.0 / 48.0).unwrap();
        let gauge = GaugeField::trivial(grid.len());
        let pi = std::f64::consts::PI;
        let u = synthetic(&grid, |x, y| (2.0 * pi * x).sin() * (pi * y).sin());
        let v: Vec<f64> = u.iter().map(|x| -x).collect(); // flips label order
        let pu = extract_partition(&u, &gauge, &grid, 1e-6).unwrap();
        let pv = extract_partition(&v, &gauge, &grid, 1e-6).unwrap();
        let (_, lu) = partition_energies(&pu, 1e-9, 42).unwrap();
        let (_, lv) = partition_energies(&pv, 1e-9, 42).unwrap();
        assert!((lu - lv).abs() < 1e-9 * lu.abs());
    }

    #[test]
    fn euler_synthetic_counts() {
        let r = euler_check_counts(3, 2);
        assert!(r.pass && !r.vacuous);
        let r = euler_check_counts(2, 0);
        assert!(r.pass && r.vacuous);
        let r = euler_check_counts(3, 3);
        assert!(!r.pass);
    }

    #[test]
    fn loop_parity_law_exhaustive_32() {
        // Pure gauge statement: the sign product around every axis-aligned
        // rectangle loop is -1 exactly when it encloses an odd pole count.
        let grid = build_grid(&D::UnitSquare, 1.0 / 33.0).unwrap();
        // 32x32 interior points; lattice coords of the bottom-left one.
        assert_eq!(grid.len(), 32 * 32);
        let (ox, oy) = grid.lattice(0);
        let (ox, oy) = (ox as i64, oy as i64);
        let poles = PoleConfig::snap(&grid, &[(0.47, 0.47), (0.72, 0.28)]).unwrap();
        let cuts = default_cuts(&grid, &poles).unwrap();
        let gauge = GaugeField::from_cuts(&grid, &poles, &cuts);
        let side = 31i64;
        let at = |ix: i64, iy: i64| grid.at(ox + ix, oy + iy).unwrap();
        for x0 in 0..side {
            for y0 in 0..side {
                for x1 in (x0 + 1)..=side {
                    for y1 in (y0 + 1)..=side {
                        let mut sign = 1i32;
                        for x in x0..x1 {
                            sign *= gauge.right_sign(at(x, y0)) as i32;
                            sign *= gauge.right_sign(at(x, y1)) as i32;
                        }
                        for y in y0..y1 {
                            sign *= gauge.up_sign(at(x0, y)) as i32;
                            sign *= gauge.up_sign(at(x1, y)) as i32;
                        }
                        let mut enclosed = 0;
                        for &q in poles.plaquette_ids() {
                            let (cx, cy) = grid.plaquette_cell(q as usize);
                            let (cx, cy) = (cx as i64 - ox, cy as i64 - oy);
                            if cx >= x0 && cx < x1 && cy >= y0 && cy < y1 {
                                enclosed += 1;
                            }
                        }
                        let expect = if enclosed % 2 == 1 { -1 } else { 1 };
                        assert_eq!(sign, expect, "loop ({x0},{y0})-({x1},{y1})");
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_graph_regular_curve() {
        // Off-lattice nodal line: the dual chain is a path of arity-2 cells
        // with two arity-1 ends at the domain boundary.
        let grid = build_grid(&D::UnitSquare, 1.0 / 33.0).unwrap();
        let gauge = GaugeField::trivial(grid.len());
        let u = synthetic(&grid, |x, _| x - 0.512);
        let part = extract_partition(&u, &gauge, &grid, 1e-6).unwrap();
        let bg = boundary_graph(&part);
        assert!(!bg.vertices.is_empty());
        let interior_ok = bg.vertices.iter().filter(|v| v.arity >= 2).count();
        assert!(interior_ok >= bg.vertices.len() - 2);
        // A simple chain has exactly vertex_count - 1 arcs.
        assert_eq!(bg.arcs.len(), bg.vertices.len() - 1);
    }

    #[test]
    fn boundary_graph_crossing_has_arity_four() {
        let grid = build_grid(&D::UnitSquare, 1.0 / 33.0).unwrap();
        let gauge = GaugeField::trivial(grid.len());
        let pi = std::f64::consts::PI;
        let u = synthetic(&grid, |x, y| (2.0 * pi * x).sin() * (2.0 * pi * y).sin());
        let part = extract_partition(&u, &gauge, &grid, 1e-6).unwrap();
        let bg = boundary_graph(&part);
        let max_arity = bg.vertices.iter().map(|v| v.arity).max().unwrap();
        assert_eq!(max_arity, 4);
        assert_eq!(bg.vertices.iter().filter(|v| v.arity >= 3).count(), 1);
    }

    #[test]
    fn domain_monotonicity_nested_masks() {
        // Dirichlet monotonicity: a sub-mask has a larger ground energy.
        use crate::operator::assemble_masked_laplacian;
        let grid = build_grid(&D::UnitSquare, 1.0 / 32.0).unwrap();
        let all: Vec<u32> = (0..grid.len() as u32).collect();
        let half: Vec<u32> = all
            .iter()
            .copied()
            .filter(|&p| grid.point_coords(p as usize).1 < 0.5)
            .collect();
        let quarter: Vec<u32> = half
            .iter()
            .copied()
            .filter(|&p| grid.point_coords(p as usize).0 < 0.5)
            .collect();
        let energy = |mask: &[u32]| {
            let op = assemble_masked_laplacian(&grid, mask);
            smallest_eigenpairs(&op, 1, 1e-10, 42).unwrap().eigenvalues[0]
        };
        let (e_all, e_half, e_quarter) = (energy(&all), energy(&half), energy(&quarter));
        assert!(e_half > e_all);
        assert!(e_quarter > e_half);
    }

    #[test]
    fn pgm_roundtrip_header() {
        let grid = build_grid(&D::UnitSquare, 0.2).unwrap();
        let gauge = GaugeField::trivial(grid.len());
        let u = synthetic(&grid, |x, _| x - 0.5);
        let part = extract_partition(&u, &gauge, &grid, 1e-6).unwrap();
        let pgm = partition_to_pgm(&part);
        assert!(pgm.starts_with("P2\n"));
        let lines: Vec<&str> = pgm.lines().collect();
        let dims: Vec<usize> = lines[1]
            .split_whitespace()
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(lines.len(), 3 + dims[1]);
    }
}
