//! Derivative-free search for minimal-partition candidates: maximize the
//! k-th eigenvalue of the flux-pi operator over pole configurations, then
//! read off the nodal partition of the k-th eigenfunction.
//!
//! lambda_k as a function of pole positions is nonsmooth at eigenvalue
//! crossings, so the optimizer is a plain pattern search with shrinking
//! steps and seeded multi-start; positions are snapped to plaquette centers
//! at evaluation time and steps below h stop a start. Nothing here claims
//! global optimality.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{smallest_eigenpairs, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::{build_grid, default_cuts, DomainSpec, Grid, PoleConfig};
use crate::operator::assemble_ab_with_gauge;
use crate::partition::{
    euler_check, extract_partition, partition_energies, EulerReport, NodalPartition,
};
use crate::scalar::Real;

/// One search's evaluation context: the grid, the objective settings and a
/// value cache keyed by the snapped pole plaquettes.
pub struct EvalContext<F: Real> {
    pub grid: Grid<F>,
    pub k: usize,
    pub tol: F,
    pub seed: u64,
    cache: Mutex<HashMap<Vec<u32>, F>>,
    hits: Mutex<usize>,
}

impl<F: Real> EvalContext<F> {
    pub fn new(grid: Grid<F>, k: usize, tol: F, seed: u64) -> Self {
        EvalContext {
            grid,
            k,
            tol,
            seed,
            cache: Mutex::new(HashMap::new()),
            hits: Mutex::new(0),
        }
    }

    pub fn cache_hits(&self) -> usize {
        *self.hits.lock().unwrap()
    }

    /// lambda_k at the given pole positions (snapped). Deterministic for
    /// fixed inputs; identical snapped poles return the cached value.
    pub fn objective(&self, poles_xy: &[(F, F)]) -> Result<F> {
        let poles = PoleConfig::snap(&self.grid, poles_xy)?;
        let mut key: Vec<u32> = poles.plaquette_ids().to_vec();
        key.sort_unstable();
        if let Some(&v) = self.cache.lock().unwrap().get(&key) {
            *self.hits.lock().unwrap() += 1;
            return Ok(v);
        }
        let cuts = default_cuts(&self.grid, &poles)?;
        let (op, _) = assemble_ab_with_gauge(&self.grid, &poles, &cuts)?;
        let sp = smallest_eigenpairs(&op, self.k, self.tol, self.seed)?;
        let v = sp.eigenvalues[self.k - 1];
        self.cache.lock().unwrap().insert(key, v);
        Ok(v)
    }
}

/// One objective evaluation from scratch (builds the grid).
pub fn objective_lambda_k<F: Real>(
    spec: &DomainSpec<F>,
    k: usize,
    poles_xy: &[(F, F)],
    h: F,
    tol: F,
    seed: u64,
) -> Result<F> {
    let ctx = EvalContext::new(build_grid(spec, h)?, k, tol, seed);
    ctx.objective(poles_xy)
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchTrace<F> {
    /// Objective evaluations spent (cache hits do not consume budget).
    pub evaluations: usize,
    pub cache_hits: usize,
    pub restarts: usize,
    /// (cumulative evaluation index, incumbent lambda_k) improvements,
    /// concatenated in start order.
    pub incumbents: Vec<(usize, F)>,
    pub budget_exhausted: bool,
}

pub struct SearchResult<F: Real> {
    pub best_poles: Vec<(F, F)>,
    pub lambda_k: F,
    pub spectrum: Spectrum<F>,
    pub partition: NodalPartition<F>,
    /// Lambda of the extracted partition: the L_k estimate.
    pub frak_l_estimate: F,
    pub domain_energies: Vec<F>,
    pub equipartition_ratio: F,
    pub euler: EulerReport,
    pub trace: SearchTrace<F>,
}

struct StartOutcome<F> {
    best_poles: Vec<(F, F)>,
    best_value: F,
    evaluations: usize,
    incumbents: Vec<(usize, F)>,
    exhausted: bool,
}

/// Maximizes lambda_k over `l` pole positions and extracts the partition of
/// the k-th eigenfunction at the best configuration found.
#[allow(clippy::too_many_arguments)]
pub fn search_minimal_partition<F: Real>(
    spec: &DomainSpec<F>,
    k: usize,
    l: usize,
    h: F,
    budget: usize,
    seed: u64,
    tol: F,
    zero_tol: F,
) -> Result<SearchResult<F>> {
    if k < 1 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let l_max = if k >= 2 { 2 * k - 4 } else { 0 };
    if l > l_max {
        return Err(Error::InvalidPoleCount { l, k });
    }
    if budget < 1 {
        return Err(Error::BudgetExhausted(budget));
    }

    let grid = build_grid(spec, h)?;

    let (outcomes, restarts, cache_hits) = if l == 0 {
        let ctx = EvalContext::new(grid.clone(), k, tol, seed);
        let v = ctx.objective(&[])?;
        (
            vec![StartOutcome {
                best_poles: Vec::new(),
                best_value: v,
                evaluations: 1,
                incumbents: vec![(1, v)],
                exhausted: false,
            }],
            0,
            ctx.cache_hits(),
        )
    } else {
        let n_starts = (budget / 40).clamp(1, 6);
        let per_start = (budget / n_starts).max(1);
        let outcomes: Vec<Result<(StartOutcome<F>, usize)>> = (0..n_starts)
            .into_par_iter()
            .map(|s| {
                let ctx = EvalContext::new(grid.clone(), k, tol, seed);
                let out =
                    pattern_search(&ctx, spec, l, per_start, seed.wrapping_add(1 + s as u64))?;
                Ok((out, ctx.cache_hits()))
            })
            .collect();
        let mut outs = Vec::with_capacity(n_starts);
        let mut hits = 0usize;
        for r in outcomes {
            let (o, h) = r?;
            hits += h;
            outs.push(o);
        }
        (outs, n_starts - 1, hits)
    };

    // Deterministic winner: best value, earliest start on ties.
    let mut best_idx = 0usize;
    for (i, o) in outcomes.iter().enumerate() {
        if o.best_value > outcomes[best_idx].best_value {
            best_idx = i;
        }
    }

    let mut evaluations = 0usize;
    let mut incumbents = Vec::new();
    let mut exhausted = false;
    for o in &outcomes {
        for &(i, v) in &o.incumbents {
            incumbents.push((evaluations + i, v));
        }
        evaluations += o.evaluations;
        exhausted |= o.exhausted;
    }

    let best = &outcomes[best_idx];
    let poles = PoleConfig::snap(&grid, &best.best_poles)?;
    let cuts = default_cuts(&grid, &poles)?;
    let (op, gauge) = assemble_ab_with_gauge(&grid, &poles, &cuts)?;
    let spectrum = smallest_eigenpairs(&op, k, tol, seed)?;
    let lambda_k = spectrum.eigenvalues[k - 1];
    let partition = extract_partition(&spectrum.eigenvectors[k - 1], &gauge, &grid, zero_tol)?;
    let (domain_energies, frak_l) = partition_energies(&partition, tol, seed)?;
    let min_e = domain_energies
        .iter()
        .copied()
        .fold(F::infinity(), |a, b| if b < a { b } else { a });
    let equipartition_ratio = if partition.k > 0 {
        frak_l / min_e
    } else {
        F::one()
    };
    let euler = euler_check(&partition);

    Ok(SearchResult {
        best_poles: poles.coords().to_vec(),
        lambda_k,
        spectrum,
        partition,
        frak_l_estimate: frak_l,
        domain_energies,
        equipartition_ratio,
        euler,
        trace: SearchTrace {
            evaluations,
            cache_hits,
            restarts,
            incumbents,
            budget_exhausted: exhausted,
        },
    })
}

fn pattern_search<F: Real>(
    ctx: &EvalContext<F>,
    spec: &DomainSpec<F>,
    l: usize,
    budget: usize,
    seed: u64,
) -> Result<StartOutcome<F>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let (x0, y0, x1, y1) = spec.bounding_box();
    let h = ctx.grid.h;

    // Seeded initial placement: uniform in the box, kept when it snaps to
    // distinct plaquettes.
    let mut placement: Option<Vec<(F, F)>> = None;
    for _ in 0..200 {
        let cand: Vec<(F, F)> = (0..l)
            .map(|_| {
                let x = x0 + (x1 - x0) * F::of(rng.gen::<f64>());
                let y = y0 + (y1 - y0) * F::of(rng.gen::<f64>());
                (x, y)
            })
            .collect();
        if PoleConfig::snap(&ctx.grid, &cand).is_ok() {
            placement = Some(cand);
            break;
        }
    }
    let mut state = placement.ok_or(Error::InvalidPoles(
        "no valid seeded pole placement found".into(),
    ))?;

    let mut evals = 0usize;
    let mut incumbents = Vec::new();
    let eval = |pts: &[(F, F)], evals: &mut usize| -> Option<F> {
        if *evals >= budget {
            return None;
        }
        *evals += 1;
        ctx.objective(pts).ok()
    };

    let mut best_value = match eval(&state, &mut evals) {
        Some(v) => v,
        None => return Err(Error::BudgetExhausted(budget)),
    };
    incumbents.push((evals, best_value));

    let mut step = spec.diameter() * F::of(0.25);
    let mut exhausted = false;
    'outer: while step >= h {
        let mut improved = false;
        for p in 0..l {
            for (dx, dy) in [
                (F::one(), F::zero()),
                (-F::one(), F::zero()),
                (F::zero(), F::one()),
                (F::zero(), -F::one()),
            ] {
                let mut cand = state.clone();
                cand[p] = (cand[p].0 + dx * step, cand[p].1 + dy * step);
                match eval(&cand, &mut evals) {
                    Some(v) if v > best_value => {
                        best_value = v;
                        state = cand;
                        incumbents.push((evals, best_value));
                        improved = true;
                    }
                    Some(_) => {}
                    None => {
                        if evals >= budget {
                            exhausted = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
        if !improved {
            step *= F::of(0.5);
        }
    }

    Ok(StartOutcome {
        best_poles: state,
        best_value,
        evaluations: evals,
        incumbents,
        exhausted,
    })
}
