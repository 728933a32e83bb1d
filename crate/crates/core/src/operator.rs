//! Discrete Dirichlet Laplacian and its flux-pi gauge variants.
//!
//! Half-integer flux through a plaquette is realized by flipping the sign of
//! every grid edge crossed an odd number of times by the branch cuts. The
//! assembled matrix stays real symmetric: diagonal 4/h^2, off-diagonal
//! -sigma_ij/h^2 on grid edges, and the product of the four edge signs
//! around a plaquette is -1 exactly when the plaquette holds an odd number
//! of poles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CutSet, Grid, PoleConfig};
use crate::scalar::Real;

/// Edge signs on the grid graph, one per right-edge and up-edge of each point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaugeField {
    right: Vec<i8>,
    up: Vec<i8>,
    pub pole_plaquettes: Vec<u32>,
}

impl GaugeField {
    pub fn trivial(n: usize) -> Self {
        GaugeField {
            right: vec![1; n],
            up: vec![1; n],
            pole_plaquettes: Vec::new(),
        }
    }

    pub fn from_cuts<F: Real>(grid: &Grid<F>, poles: &PoleConfig<F>, cuts: &CutSet) -> Self {
        let mut right = vec![0u32; grid.len()];
        let mut up = vec![0u32; grid.len()];
        for path in &cuts.paths {
            for e in path {
                if e.horizontal {
                    right[e.point as usize] += 1;
                } else {
                    up[e.point as usize] += 1;
                }
            }
        }
        GaugeField {
            right: right
                .iter()
                .map(|&c| if c % 2 == 0 { 1 } else { -1 })
                .collect(),
            up: up
                .iter()
                .map(|&c| if c % 2 == 0 { 1 } else { -1 })
                .collect(),
            pole_plaquettes: poles.plaquette_ids().to_vec(),
        }
    }

    #[inline]
    pub fn right_sign(&self, p: usize) -> i8 {
        self.right[p]
    }

    #[inline]
    pub fn up_sign(&self, p: usize) -> i8 {
        self.up[p]
    }

    /// Sign of the edge between adjacent points p and q, if they are adjacent.
    pub fn edge_sign<F: Real>(&self, grid: &Grid<F>, p: usize, q: usize) -> Option<i8> {
        let (px, py) = grid.lattice(p);
        let (qx, qy) = grid.lattice(q);
        let (dx, dy) = (qx as i64 - px as i64, qy as i64 - py as i64);
        match (dx, dy) {
            (1, 0) => Some(self.right[p]),
            (-1, 0) => Some(self.right[q]),
            (0, 1) => Some(self.up[p]),
            (0, -1) => Some(self.up[q]),
            _ => None,
        }
    }

    /// Verifies the plaquette flux invariant: the sign product around every
    /// plaquette is -1 exactly when the plaquette holds an odd pole count.
    pub fn check_plaquettes<F: Real>(&self, grid: &Grid<F>) -> Result<()> {
        let mut pole_count = vec![0usize; grid.plaquette_count()];
        for &q in &self.pole_plaquettes {
            let q = q as usize;
            if q >= pole_count.len() {
                return Err(Error::InconsistentCuts(format!(
                    "pole plaquette {q} out of range"
                )));
            }
            pole_count[q] += 1;
        }
        for q in 0..grid.plaquette_count() {
            let (sw, se, nw, _ne) = grid.plaquette_corners(q);
            let prod = self.right[sw] * self.right[nw] * self.up[sw] * self.up[se];
            let expect = if pole_count[q] % 2 == 1 { -1 } else { 1 };
            if prod != expect {
                return Err(Error::InconsistentCuts(format!(
                    "plaquette {q}: sign product {prod}, expected {expect}"
                )));
            }
        }
        Ok(())
    }
}

/// Sparse real symmetric operator on the interior points of a grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SparseOperator<F: Real> {
    pub n: usize,
    pub h: F,
    pub pole_count: usize,
    row_ptr: Vec<u32>,
    col_idx: Vec<u32>,
    values: Vec<F>,
}

impl<F: Real> SparseOperator<F> {
    fn from_gauge(grid: &Grid<F>, gauge: &GaugeField) -> Self {
        let n = grid.len();
        let inv_h2 = F::one() / (grid.h * grid.h);
        let four = F::of(4.0);
        let mut rows: Vec<Vec<(u32, F)>> = vec![Vec::with_capacity(5); n];
        for p in 0..n {
            rows[p].push((p as u32, four * inv_h2));
            if let Some(q) = grid.right(p) {
                let v = F::of(-(gauge.right_sign(p) as f64)) * inv_h2;
                rows[p].push((q as u32, v));
                rows[q].push((p as u32, v));
            }
            if let Some(q) = grid.up(p) {
                let v = F::of(-(gauge.up_sign(p) as f64)) * inv_h2;
                rows[p].push((q as u32, v));
                rows[q].push((p as u32, v));
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0u32);
        for row in &mut rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            for &(c, v) in row.iter() {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len() as u32);
        }
        SparseOperator {
            n,
            h: grid.h,
            pole_count: gauge.pole_plaquettes.len(),
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn row(&self, i: usize) -> (&[u32], &[F]) {
        let a = self.row_ptr[i] as usize;
        let b = self.row_ptr[i + 1] as usize;
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn matvec(&self, x: &[F], y: &mut [F]) {
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut acc = F::zero();
            for (c, v) in cols.iter().zip(vals) {
                acc += *v * x[*c as usize];
            }
            y[i] = acc;
        }
    }

    /// Gershgorin bound on the spectral radius; equals 8/h^2 on a full stencil.
    pub fn norm_bound(&self) -> F {
        let mut best = F::zero();
        for i in 0..self.n {
            let (_, vals) = self.row(i);
            let s = vals.iter().fold(F::zero(), |a, v| a + v.abs());
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Largest |i - j| over stored entries.
    pub fn bandwidth(&self) -> usize {
        let mut b = 0usize;
        for i in 0..self.n {
            let (cols, _) = self.row(i);
            for &c in cols {
                b = b.max((c as i64 - i as i64).unsigned_abs() as usize);
            }
        }
        b
    }

    pub fn same_structure(&self, other: &Self) -> bool {
        self.n == other.n && self.row_ptr == other.row_ptr && self.col_idx == other.col_idx
    }

    /// Coordinate text dump: one `row col value` per line, 0-based, sorted.
    pub fn dump_coordinate_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                out.push_str(&format!("{} {} {}\n", i, c, v));
            }
        }
        out
    }
}

/// Standard 5-point Dirichlet Laplacian (all edge signs +1).
pub fn assemble_laplacian<F: Real>(grid: &Grid<F>) -> SparseOperator<F> {
    SparseOperator::from_gauge(grid, &GaugeField::trivial(grid.len()))
}

/// Dirichlet Laplacian restricted to a subset of grid points (a partition
/// domain): points outside the mask act as homogeneous boundary.
pub fn assemble_masked_laplacian<F: Real>(grid: &Grid<F>, mask: &[u32]) -> SparseOperator<F> {
    assemble_masked_laplacian_filtered(grid, mask, |_, _| true)
}

/// Masked Laplacian with an additional per-edge filter: `keep_edge(p, horizontal)`
/// decides whether the right/up edge of point p survives. Dropped edges act
/// as homogeneous Dirichlet boundary between their endpoints.
pub fn assemble_masked_laplacian_filtered<F: Real>(
    grid: &Grid<F>,
    mask: &[u32],
    keep_edge: impl Fn(usize, bool) -> bool,
) -> SparseOperator<F> {
    let mut renumber = vec![-1i64; grid.len()];
    let mut pts: Vec<u32> = mask.to_vec();
    pts.sort_unstable();
    pts.dedup();
    for (new, &old) in pts.iter().enumerate() {
        renumber[old as usize] = new as i64;
    }
    let n = pts.len();
    let inv_h2 = F::one() / (grid.h * grid.h);
    let four = F::of(4.0);
    let mut rows: Vec<Vec<(u32, F)>> = vec![Vec::with_capacity(5); n];
    for (new, &old) in pts.iter().enumerate() {
        rows[new].push((new as u32, four * inv_h2));
        for (q, horizontal) in [
            (grid.right(old as usize), true),
            (grid.up(old as usize), false),
        ] {
            let Some(q) = q else { continue };
            if !keep_edge(old as usize, horizontal) {
                continue;
            }
            let nq = renumber[q];
            if nq >= 0 {
                rows[new].push((nq as u32, -inv_h2));
                rows[nq as usize].push((new as u32, -inv_h2));
            }
        }
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0u32);
    for row in &mut rows {
        row.sort_unstable_by_key(|&(c, _)| c);
        for &(c, v) in row.iter() {
            col_idx.push(c);
            values.push(v);
        }
        row_ptr.push(col_idx.len() as u32);
    }
    SparseOperator {
        n,
        h: grid.h,
        pole_count: 0,
        row_ptr,
        col_idx,
        values,
    }
}

/// Flux-pi operator for the given poles and cuts. With no poles this equals
/// `assemble_laplacian` entry for entry.
pub fn assemble_ab<F: Real>(
    grid: &Grid<F>,
    poles: &PoleConfig<F>,
    cuts: &CutSet,
) -> Result<SparseOperator<F>> {
    if cuts.paths.len() != poles.len() {
        return Err(Error::InconsistentCuts(format!(
            "{} cut paths for {} poles",
            cuts.paths.len(),
            poles.len()
        )));
    }
    let gauge = GaugeField::from_cuts(grid, poles, cuts);
    gauge.check_plaquettes(grid)?;
    Ok(SparseOperator::from_gauge(grid, &gauge))
}

/// Gauge field + operator in one call; most analysis needs both.
pub fn assemble_ab_with_gauge<F: Real>(
    grid: &Grid<F>,
    poles: &PoleConfig<F>,
    cuts: &CutSet,
) -> Result<(SparseOperator<F>, GaugeField)> {
    if cuts.paths.len() != poles.len() {
        return Err(Error::InconsistentCuts(format!(
            "{} cut paths for {} poles",
            cuts.paths.len(),
            poles.len()
        )));
    }
    let gauge = GaugeField::from_cuts(grid, poles, cuts);
    gauge.check_plaquettes(grid)?;
    Ok((SparseOperator::from_gauge(grid, &gauge), gauge))
}

/// Outcome of the diagonal +-1 equivalence test between two operators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaugeVerdict {
    pub equivalent: bool,
    /// Diagonal sign vector d with d_i a_ij d_j = b_ij when equivalent.
    pub witness: Option<Vec<i8>>,
}

/// Decides whether a diagonal +-1 transformation maps opA to opB, by sign
/// propagation over a spanning forest followed by verification of every edge.
pub fn gauge_equivalent<F: Real>(
    op_a: &SparseOperator<F>,
    op_b: &SparseOperator<F>,
) -> Result<GaugeVerdict> {
    if !op_a.same_structure(op_b) {
        return Err(Error::DifferentStructure);
    }
    let n = op_a.n;
    let mut d = vec![0i8; n];
    let mut queue = std::collections::VecDeque::new();
    for root in 0..n {
        if d[root] != 0 {
            continue;
        }
        d[root] = 1;
        queue.push_back(root);
        while let Some(i) = queue.pop_front() {
            let (cols, va) = op_a.row(i);
            let (_, vb) = op_b.row(i);
            for ((&c, &a), &b) in cols.iter().zip(va).zip(vb) {
                let j = c as usize;
                if j == i || d[j] != 0 {
                    continue;
                }
                let sa = if a > F::zero() { 1i8 } else { -1 };
                let sb = if b > F::zero() { 1i8 } else { -1 };
                d[j] = d[i] * sa * sb;
                queue.push_back(j);
            }
        }
    }
    // Verify every entry: d_i a_ij d_j == b_ij exactly.
    for i in 0..n {
        let (cols, va) = op_a.row(i);
        let (_, vb) = op_b.row(i);
        for ((&c, &a), &b) in cols.iter().zip(va).zip(vb) {
            let j = c as usize;
            let lhs = F::of((d[i] * d[j]) as f64) * a;
            if lhs != b {
                return Ok(GaugeVerdict {
                    equivalent: false,
                    witness: None,
                });
            }
        }
    }
    Ok(GaugeVerdict {
        equivalent: true,
        witness: Some(d),
    })
}
