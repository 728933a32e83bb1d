//! Computational domains, uniform grids, Dirichlet masks, plaquette centers
//! and branch-cut paths.
//!
//! Grid points live on the global lattice `h * Z^2`; a lattice point is kept
//! when it lies in the domain at distance >= h/2 from the complement, so no
//! kept point ever sits on the boundary. Plaquettes are lattice cells whose
//! four corners are all kept; their centers are the only legal pole
//! locations, which keeps flux insertion exact and poles off grid points.

pub mod predicates;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use predicates::{point_in_polygon, point_segment_distance, segments_properly_intersect};

/// Planar domain description. Parsed from JSON configs, e.g.
/// `{"shape":"unit_square"}` or `{"shape":"polygon","vertices":[[0,0],...]}`.
///
/// Polygon vertex lists must be simple (non-self-intersecting); a simple
/// polygon's interior is simply connected, so every expressible domain is
/// simply connected, which the branch-cut gauge construction relies on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum DomainSpec<F: Real> {
    UnitSquare,
    Rectangle { width: F, height: F },
    Disk { radius: F },
    RegularPolygon { sides: usize, area: F },
    Polygon { vertices: Vec<[F; 2]> },
}

impl<F: Real> DomainSpec<F> {
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::UnitSquare => Ok(()),
            DomainSpec::Rectangle { width, height } => {
                if *width > F::zero() && *height > F::zero() {
                    Ok(())
                } else {
                    Err(Error::Config("rectangle sides must be positive".into()))
                }
            }
            DomainSpec::Disk { radius } => {
                if *radius > F::zero() {
                    Ok(())
                } else {
                    Err(Error::Config("disk radius must be positive".into()))
                }
            }
            DomainSpec::RegularPolygon { sides, area } => {
                if *sides < 3 {
                    return Err(Error::BadPolygon("need at least 3 sides".into()));
                }
                if *area <= F::zero() {
                    return Err(Error::BadPolygon("area must be positive".into()));
                }
                Ok(())
            }
            DomainSpec::Polygon { vertices } => validate_polygon(&to_f64_vertices(vertices)),
        }
    }

    /// Vertex list for polygonal shapes, in f64 for the exact predicates.
    fn polygon_vertices(&self) -> Option<Vec<[f64; 2]>> {
        match self {
            DomainSpec::Polygon { vertices } => Some(to_f64_vertices(vertices)),
            DomainSpec::RegularPolygon { sides, area } => {
                Some(regular_polygon_vertices(*sides, area.to_f64_lossy()))
            }
            _ => None,
        }
    }

    pub fn bounding_box(&self) -> (F, F, F, F) {
        match self {
            DomainSpec::UnitSquare => (F::zero(), F::zero(), F::one(), F::one()),
            DomainSpec::Rectangle { width, height } => (F::zero(), F::zero(), *width, *height),
            DomainSpec::Disk { radius } => (-*radius, -*radius, *radius, *radius),
            _ => {
                let vs = self.polygon_vertices().expect("polygonal shape");
                let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
                for v in &vs {
                    x0 = x0.min(v[0]);
                    y0 = y0.min(v[1]);
                    x1 = x1.max(v[0]);
                    y1 = y1.max(v[1]);
                }
                (F::of(x0), F::of(y0), F::of(x1), F::of(y1))
            }
        }
    }

    pub fn area(&self) -> F {
        match self {
            DomainSpec::UnitSquare => F::one(),
            DomainSpec::Rectangle { width, height } => *width * *height,
            DomainSpec::Disk { radius } => F::pi() * *radius * *radius,
            DomainSpec::RegularPolygon { area, .. } => *area,
            DomainSpec::Polygon { vertices } => {
                F::of(shoelace_area(&to_f64_vertices(vertices)).abs())
            }
        }
    }

    pub fn diameter(&self) -> F {
        match self {
            DomainSpec::UnitSquare => F::of(std::f64::consts::SQRT_2),
            DomainSpec::Rectangle { width, height } => (*width * *width + *height * *height).sqrt(),
            DomainSpec::Disk { radius } => *radius + *radius,
            _ => {
                let vs = self.polygon_vertices().expect("polygonal shape");
                let mut d2: f64 = 0.0;
                for i in 0..vs.len() {
                    for j in i + 1..vs.len() {
                        let dx = vs[i][0] - vs[j][0];
                        let dy = vs[i][1] - vs[j][1];
                        d2 = d2.max(dx * dx + dy * dy);
                    }
                }
                F::of(d2.sqrt())
            }
        }
    }

    /// Strict interior membership.
    pub fn contains(&self, x: F, y: F) -> bool {
        let (xf, yf) = (x.to_f64_lossy(), y.to_f64_lossy());
        match self {
            DomainSpec::UnitSquare => xf > 0.0 && xf < 1.0 && yf > 0.0 && yf < 1.0,
            DomainSpec::Rectangle { width, height } => {
                xf > 0.0 && xf < width.to_f64_lossy() && yf > 0.0 && yf < height.to_f64_lossy()
            }
            DomainSpec::Disk { radius } => {
                let r = radius.to_f64_lossy();
                xf * xf + yf * yf < r * r
            }
            _ => point_in_polygon(&self.polygon_vertices().expect("polygonal shape"), [xf, yf]),
        }
    }

    /// Closed membership: interior or boundary.
    pub fn contains_closed(&self, x: F, y: F) -> bool {
        self.contains(x, y)
            || self.boundary_distance(x, y) == F::zero() && {
                let (xf, yf) = (x.to_f64_lossy(), y.to_f64_lossy());
                match self {
                    DomainSpec::UnitSquare => {
                        (0.0..=1.0).contains(&xf) && (0.0..=1.0).contains(&yf)
                    }
                    DomainSpec::Rectangle { width, height } => {
                        (0.0..=width.to_f64_lossy()).contains(&xf)
                            && (0.0..=height.to_f64_lossy()).contains(&yf)
                    }
                    DomainSpec::Disk { radius } => {
                        let r = radius.to_f64_lossy();
                        xf * xf + yf * yf <= r * r
                    }
                    _ => {
                        let vs = self.polygon_vertices().expect("polygonal shape");
                        (0..vs.len()).any(|i| {
                            predicates::on_segment(vs[i], vs[(i + 1) % vs.len()], [xf, yf])
                        })
                    }
                }
            }
    }

    /// Distance from an interior point to the complement of the domain;
    /// zero for points on the boundary or outside.
    pub fn boundary_distance(&self, x: F, y: F) -> F {
        let (xf, yf) = (x.to_f64_lossy(), y.to_f64_lossy());
        let d = match self {
            DomainSpec::UnitSquare => {
                if !self.contains(x, y) {
                    0.0
                } else {
                    xf.min(1.0 - xf).min(yf).min(1.0 - yf)
                }
            }
            DomainSpec::Rectangle { width, height } => {
                if !self.contains(x, y) {
                    0.0
                } else {
                    xf.min(width.to_f64_lossy() - xf)
                        .min(yf)
                        .min(height.to_f64_lossy() - yf)
                }
            }
            DomainSpec::Disk { radius } => {
                (radius.to_f64_lossy() - (xf * xf + yf * yf).sqrt()).max(0.0)
            }
            _ => {
                if !self.contains(x, y) {
                    0.0
                } else {
                    let vs = self.polygon_vertices().expect("polygonal shape");
                    let mut d = f64::MAX;
                    for i in 0..vs.len() {
                        d = d.min(point_segment_distance(
                            vs[i],
                            vs[(i + 1) % vs.len()],
                            [xf, yf],
                        ));
                    }
                    d
                }
            }
        };
        F::of(d)
    }
}

fn to_f64_vertices<F: Real>(vertices: &[[F; 2]]) -> Vec<[f64; 2]> {
    vertices
        .iter()
        .map(|v| [v[0].to_f64_lossy(), v[1].to_f64_lossy()])
        .collect()
}

/// Vertices of the regular n-gon of given area, centered at the origin with
/// the first vertex on the positive x-axis.
fn regular_polygon_vertices(sides: usize, area: f64) -> Vec<[f64; 2]> {
    let n = sides as f64;
    let rho = (2.0 * area / (n * (2.0 * std::f64::consts::PI / n).sin())).sqrt();
    (0..sides)
        .map(|i| {
            let th = 2.0 * std::f64::consts::PI * i as f64 / n;
            [rho * th.cos(), rho * th.sin()]
        })
        .collect()
}

fn shoelace_area(vs: &[[f64; 2]]) -> f64 {
    let n = vs.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

fn validate_polygon(vs: &[[f64; 2]]) -> Result<()> {
    let n = vs.len();
    if n < 3 {
        return Err(Error::BadPolygon(format!("{n} vertices, need at least 3")));
    }
    for i in 0..n {
        if vs[i] == vs[(i + 1) % n] {
            return Err(Error::BadPolygon(format!("repeated vertex at index {i}")));
        }
    }
    if shoelace_area(vs).abs() == 0.0 {
        return Err(Error::BadPolygon("zero area".into()));
    }
    for i in 0..n {
        for j in i + 1..n {
            // Adjacent edges share an endpoint; the intersection test already
            // tolerates shared endpoints, so test every pair.
            let (a, b) = (vs[i], vs[(i + 1) % n]);
            let (c, d) = (vs[j], vs[(j + 1) % n]);
            if segments_properly_intersect(a, b, c, d) {
                return Err(Error::BadPolygon(format!(
                    "edges {i} and {j} intersect: polygon is not simple"
                )));
            }
        }
    }
    Ok(())
}

/// Uniform grid over a domain: the kept lattice points, their 4-neighbor
/// adjacency and the fully interior cells (plaquettes).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Grid<F: Real> {
    pub spec: DomainSpec<F>,
    pub h: F,
    /// Lattice offset: kept point (ix, iy) sits at ((i0+ix)*h, (j0+iy)*h).
    i0: i64,
    j0: i64,
    pub nx: usize,
    pub ny: usize,
    /// Lattice cell -> interior index, -1 if the lattice point is not kept.
    index: Vec<i32>,
    /// Interior index -> lattice cell.
    points: Vec<(u32, u32)>,
    /// Plaquettes: lattice cells (all four corners kept, center interior).
    plaquettes: Vec<(u32, u32)>,
    plaq_index: Vec<i32>,
}

impl<F: Real> Grid<F> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn plaquette_count(&self) -> usize {
        self.plaquettes.len()
    }

    #[inline]
    pub fn point_coords(&self, p: usize) -> (F, F) {
        let (ix, iy) = self.points[p];
        (
            F::of((self.i0 + ix as i64) as f64) * self.h,
            F::of((self.j0 + iy as i64) as f64) * self.h,
        )
    }

    #[inline]
    pub fn lattice(&self, p: usize) -> (u32, u32) {
        self.points[p]
    }

    #[inline]
    pub fn at(&self, ix: i64, iy: i64) -> Option<usize> {
        if ix < 0 || iy < 0 || ix as usize >= self.nx || iy as usize >= self.ny {
            return None;
        }
        let v = self.index[iy as usize * self.nx + ix as usize];
        if v < 0 {
            None
        } else {
            Some(v as usize)
        }
    }

    /// The four axis neighbors of point p, as present.
    pub fn neighbors(&self, p: usize) -> [Option<usize>; 4] {
        let (ix, iy) = self.points[p];
        let (ix, iy) = (ix as i64, iy as i64);
        [
            self.at(ix + 1, iy),
            self.at(ix - 1, iy),
            self.at(ix, iy + 1),
            self.at(ix, iy - 1),
        ]
    }

    /// Neighbor of p in +x direction (right edge), if kept.
    #[inline]
    pub fn right(&self, p: usize) -> Option<usize> {
        let (ix, iy) = self.points[p];
        self.at(ix as i64 + 1, iy as i64)
    }

    /// Neighbor of p in +y direction (up edge), if kept.
    #[inline]
    pub fn up(&self, p: usize) -> Option<usize> {
        let (ix, iy) = self.points[p];
        self.at(ix as i64, iy as i64 + 1)
    }

    pub fn plaquette_cell(&self, q: usize) -> (u32, u32) {
        self.plaquettes[q]
    }

    /// Plaquette id of the lattice cell (cx, cy), if that cell is one.
    pub fn plaquette_at(&self, cx: i64, cy: i64) -> Option<usize> {
        if cx < 0 || cy < 0 || cx as usize + 1 >= self.nx || cy as usize + 1 >= self.ny {
            return None;
        }
        let v = self.plaq_index[cy as usize * (self.nx - 1) + cx as usize];
        if v < 0 {
            None
        } else {
            Some(v as usize)
        }
    }

    pub fn plaquette_center(&self, q: usize) -> (F, F) {
        let (cx, cy) = self.plaquettes[q];
        self.cell_center(cx as i64, cy as i64)
    }

    /// Center of the lattice cell (cx, cy), whether or not it is a plaquette.
    pub fn cell_center(&self, cx: i64, cy: i64) -> (F, F) {
        let half = F::of(0.5);
        (
            (F::of((self.i0 + cx) as f64) + half) * self.h,
            (F::of((self.j0 + cy) as f64) + half) * self.h,
        )
    }

    /// Corner point ids of plaquette q: (sw, se, nw, ne).
    pub fn plaquette_corners(&self, q: usize) -> (usize, usize, usize, usize) {
        let (cx, cy) = self.plaquettes[q];
        let (cx, cy) = (cx as i64, cy as i64);
        (
            self.at(cx, cy).expect("plaquette corner"),
            self.at(cx + 1, cy).expect("plaquette corner"),
            self.at(cx, cy + 1).expect("plaquette corner"),
            self.at(cx + 1, cy + 1).expect("plaquette corner"),
        )
    }

    /// Diagnostic JSON dump: indices and coordinates.
    pub fn diagnostic_json(&self) -> serde_json::Value {
        let pts: Vec<serde_json::Value> = (0..self.len())
            .map(|p| {
                let (x, y) = self.point_coords(p);
                serde_json::json!([p, x.to_f64_lossy(), y.to_f64_lossy()])
            })
            .collect();
        serde_json::json!({
            "h": self.h.to_f64_lossy(),
            "interior_points": self.len(),
            "plaquettes": self.plaquette_count(),
            "points": pts,
        })
    }
}

/// Builds the grid for a domain at spacing h.
pub fn build_grid<F: Real>(spec: &DomainSpec<F>, h: F) -> Result<Grid<F>> {
    spec.validate()?;
    if h <= F::zero() {
        return Err(Error::Config("grid spacing must be positive".into()));
    }
    let two = F::of(2.0);
    if h * two > spec.diameter() {
        return Err(Error::Config(
            "grid spacing must be smaller than half the domain diameter".into(),
        ));
    }
    let (x0, y0, x1, y1) = spec.bounding_box();
    let hf = h.to_f64_lossy();
    let i0 = (x0.to_f64_lossy() / hf).floor() as i64 - 1;
    let j0 = (y0.to_f64_lossy() / hf).floor() as i64 - 1;
    let i1 = (x1.to_f64_lossy() / hf).ceil() as i64 + 1;
    let j1 = (y1.to_f64_lossy() / hf).ceil() as i64 + 1;
    let nx = (i1 - i0 + 1) as usize;
    let ny = (j1 - j0 + 1) as usize;

    let half = F::of(0.5);
    let margin = h * half;
    let mut index = vec![-1i32; nx * ny];
    let mut points = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let x = F::of((i0 + ix as i64) as f64) * h;
            let y = F::of((j0 + iy as i64) as f64) * h;
            if spec.contains(x, y) && spec.boundary_distance(x, y) >= margin {
                index[iy * nx + ix] = points.len() as i32;
                points.push((ix as u32, iy as u32));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }

    let mut plaquettes = Vec::new();
    let mut plaq_index = vec![-1i32; (nx - 1) * (ny - 1)];
    for cy in 0..ny - 1 {
        for cx in 0..nx - 1 {
            let corners = [
                index[cy * nx + cx],
                index[cy * nx + cx + 1],
                index[(cy + 1) * nx + cx],
                index[(cy + 1) * nx + cx + 1],
            ];
            if corners.iter().all(|&c| c >= 0) {
                let xc = (F::of((i0 + cx as i64) as f64) + half) * h;
                let yc = (F::of((j0 + cy as i64) as f64) + half) * h;
                if spec.contains(xc, yc) {
                    plaq_index[cy * (nx - 1) + cx] = plaquettes.len() as i32;
                    plaquettes.push((cx as u32, cy as u32));
                }
            }
        }
    }

    Ok(Grid {
        spec: spec.clone(),
        h,
        i0,
        j0,
        nx,
        ny,
        index,
        points,
        plaquettes,
        plaq_index,
    })
}

/// An ordered pole set, snapped exactly onto plaquette centers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoleConfig<F: Real> {
    plaquettes: Vec<u32>,
    coords: Vec<(F, F)>,
}

impl<F: Real> PoleConfig<F> {
    pub fn empty() -> Self {
        PoleConfig {
            plaquettes: Vec::new(),
            coords: Vec::new(),
        }
    }

    /// Snaps each requested position to the nearest plaquette center of the
    /// grid, searching a small neighborhood of the containing cell. Poles
    /// must end up pairwise distinct.
    pub fn snap(grid: &Grid<F>, desired: &[(F, F)]) -> Result<Self> {
        let mut plaquettes = Vec::with_capacity(desired.len());
        let mut coords = Vec::with_capacity(desired.len());
        for &(x, y) in desired {
            let q = nearest_plaquette(grid, x, y).ok_or(Error::PoleOutsideDomain {
                x: x.to_f64_lossy(),
                y: y.to_f64_lossy(),
            })?;
            plaquettes.push(q as u32);
            coords.push(grid.plaquette_center(q));
        }
        let mut sorted = plaquettes.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPoles(
                "two poles snapped to the same plaquette".into(),
            ));
        }
        Ok(PoleConfig { plaquettes, coords })
    }

    pub fn from_plaquettes(grid: &Grid<F>, ids: &[usize]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &q in ids {
            if q >= grid.plaquette_count() {
                return Err(Error::InvalidPoles(format!(
                    "plaquette id {q} out of range"
                )));
            }
            if !seen.insert(q) {
                return Err(Error::InvalidPoles("duplicate plaquette id".into()));
            }
        }
        Ok(PoleConfig {
            plaquettes: ids.iter().map(|&q| q as u32).collect(),
            coords: ids.iter().map(|&q| grid.plaquette_center(q)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plaquettes.is_empty()
    }

    pub fn plaquette_ids(&self) -> &[u32] {
        &self.plaquettes
    }

    pub fn coords(&self) -> &[(F, F)] {
        &self.coords
    }
}

fn nearest_plaquette<F: Real>(grid: &Grid<F>, x: F, y: F) -> Option<usize> {
    let hf = grid.h.to_f64_lossy();
    let cx = (x.to_f64_lossy() / hf - 0.5).round() as i64 - grid.i0;
    let cy = (y.to_f64_lossy() / hf - 0.5).round() as i64 - grid.j0;
    let mut best: Option<(f64, usize)> = None;
    // Search rings of cells outward; radius 3 covers every snap the
    // optimizer can request from an interior trial point.
    for r in 0..=3i64 {
        for dy in -r..=r {
            for dx in -r..=r {
                if dx.abs().max(dy.abs()) != r {
                    continue;
                }
                if let Some(q) = grid.plaquette_at(cx + dx, cy + dy) {
                    let (px, py) = grid.plaquette_center(q);
                    let ddx = px.to_f64_lossy() - x.to_f64_lossy();
                    let ddy = py.to_f64_lossy() - y.to_f64_lossy();
                    let d2 = ddx * ddx + ddy * ddy;
                    let better = match best {
                        None => true,
                        Some((bd, bq)) => d2 < bd || (d2 == bd && q < bq),
                    };
                    if better {
                        best = Some((d2, q));
                    }
                }
            }
        }
        if best.is_some() && r >= 1 {
            break;
        }
    }
    best.map(|(_, q)| q)
}

/// Which way the branch cut runs from each pole to the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutDirection {
    Down,
    Up,
    Left,
    Right,
}

/// A lattice edge, identified by its lower/left endpoint and orientation.
/// `Horizontal` joins (ix,iy)-(ix+1,iy); `Vertical` joins (ix,iy)-(ix,iy+1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeRef {
    pub point: u32,
    pub horizontal: bool,
}

/// Branch cuts: for each pole, the ordered grid edges its cut path crosses.
/// An edge may be crossed by several paths; crossing parity composes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CutSet {
    pub paths: Vec<Vec<EdgeRef>>,
    pub direction: CutDirection,
}

/// Canonical cuts: a straight ray from each pole, vertical-downward by
/// default, clipped at the first missing grid edge (the domain exit).
pub fn default_cuts<F: Real>(grid: &Grid<F>, poles: &PoleConfig<F>) -> Result<CutSet> {
    cuts_with_direction(grid, poles, CutDirection::Down)
}

pub fn cuts_with_direction<F: Real>(
    grid: &Grid<F>,
    poles: &PoleConfig<F>,
    direction: CutDirection,
) -> Result<CutSet> {
    let mut paths = Vec::with_capacity(poles.len());
    for &q in poles.plaquette_ids() {
        let q = q as usize;
        if q >= grid.plaquette_count() {
            let (x, y) = (f64::NAN, f64::NAN);
            return Err(Error::PoleOutsideDomain { x, y });
        }
        let (cx, cy) = grid.plaquette_cell(q);
        let (cx, cy) = (cx as i64, cy as i64);
        let mut path = Vec::new();
        match direction {
            CutDirection::Down => {
                // Crosses the horizontal edges (cx,j)-(cx+1,j) for j <= cy.
                let mut j = cy;
                while let (Some(a), Some(_b)) = (grid.at(cx, j), grid.at(cx + 1, j)) {
                    path.push(EdgeRef {
                        point: a as u32,
                        horizontal: true,
                    });
                    j -= 1;
                }
            }
            CutDirection::Up => {
                let mut j = cy + 1;
                while let (Some(a), Some(_b)) = (grid.at(cx, j), grid.at(cx + 1, j)) {
                    path.push(EdgeRef {
                        point: a as u32,
                        horizontal: true,
                    });
                    j += 1;
                }
            }
            CutDirection::Left => {
                // Crosses the vertical edges (i,cy)-(i,cy+1) for i <= cx.
                let mut i = cx;
                while let (Some(a), Some(_b)) = (grid.at(i, cy), grid.at(i, cy + 1)) {
                    path.push(EdgeRef {
                        point: a as u32,
                        horizontal: false,
                    });
                    i -= 1;
                }
            }
            CutDirection::Right => {
                let mut i = cx + 1;
                while let (Some(a), Some(_b)) = (grid.at(i, cy), grid.at(i, cy + 1)) {
                    path.push(EdgeRef {
                        point: a as u32,
                        horizontal: false,
                    });
                    i += 1;
                }
            }
        }
        paths.push(path);
    }
    Ok(CutSet { paths, direction })
}
