//! Brute-force verification oracles: golden-section search for concave
//! one-dimensional objectives, exhaustive grid search over the probability
//! simplex, and exhaustive grid search over knot-constrained increment
//! vectors. Deliberately simple and arithmetically independent of the
//! solvers they check; only the guard constants keep their exponential
//! cost at desk scale.

use crate::error::{Error, Result};
use crate::solve::KnotConstraints;

/// Largest simplex grid the oracle will enumerate.
pub const SIMPLEX_GRID_GUARD: u128 = 20_000_000;

/// Largest increment grid (summed over blocks) the oracle will enumerate.
pub const INCREMENT_GRID_GUARD: u128 = 5_000_000;

/// Grid description: a step size plus per-dimension closed bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    resolution: f64,
    bounds: Vec<(f64, f64)>,
}

impl GridSpec {
    pub fn new(resolution: f64, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if !resolution.is_finite() || resolution <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if bounds.is_empty() {
            return Err(Error::InvalidGrid("bounds must be non-empty".into()));
        }
        for &(lo, hi) in &bounds {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidGrid(format!(
                    "bad bound ({lo}, {hi})"
                )));
            }
        }
        Ok(Self { resolution, bounds })
    }

    /// Unit-box bounds in every dimension, the common case here.
    pub fn unit(dims: usize, resolution: f64) -> Result<Self> {
        Self::new(resolution, vec![(0.0, 1.0); dims.max(1)])
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a concave objective on an open
/// interval. Returns the best probe point and its value; for strictly
/// concave objectives the probe lands within `tol` of the true maximizer.
pub fn maximize_1d<F>(objective: F, interval: (f64, f64), tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "need a finite interval with lo < hi, got ({lo}, {hi})"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bad tolerance {tol}")));
    }
    let eval = |x: f64| -> Result<f64> {
        let v = objective(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteObjective(format!("x = {x}")))
        }
    };

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

fn compositions_of(total: u128, parts: u128) -> u128 {
    // C(total + parts - 1, parts - 1), saturating
    let mut result: u128 = 1;
    let k = parts - 1;
    for i in 1..=k {
        result = result.saturating_mul(total + i);
        result /= i;
    }
    result
}

fn for_each_composition<F>(total: usize, parts: usize, buf: &mut Vec<usize>, visit: &mut F)
where
    F: FnMut(&[usize]),
{
    if parts == 1 {
        buf.push(total);
        visit(buf);
        buf.pop();
        return;
    }
    for c in 0..=total {
        buf.push(c);
        for_each_composition(total - c, parts - 1, buf, visit);
        buf.pop();
    }
}

/// Exhaustive search over the probability simplex on a grid with spacing
/// `grid.resolution()`: all vectors (c_1/S, …, c_K/S) with Σ c_i = S where
/// S = round(1/resolution). Ties keep the first point in lexicographic grid
/// order. Guarded against combinatorial blowup.
pub fn maximize_simplex_grid<F>(objective: F, k: usize, grid: &GridSpec) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one dimension".into()));
    }
    let steps = (1.0 / grid.resolution()).round() as usize;
    if steps == 0 {
        return Err(Error::InvalidGrid(format!(
            "resolution {} is coarser than the whole simplex",
            grid.resolution()
        )));
    }
    let count = compositions_of(steps as u128, k as u128);
    if count > SIMPLEX_GRID_GUARD {
        return Err(Error::GuardExceeded(format!(
            "simplex grid has {count} points, above the guard of {SIMPLEX_GRID_GUARD}; \
             coarsen the resolution or reduce the dimension"
        )));
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut failure: Option<Error> = None;
    let mut buf = Vec::with_capacity(k);
    let mut point = vec![0.0; k];
    for_each_composition(steps, k, &mut buf, &mut |c| {
        if failure.is_some() {
            return;
        }
        for (i, &ci) in c.iter().enumerate() {
            point[i] = ci as f64 / steps as f64;
        }
        let value = objective(&point);
        if !value.is_finite() {
            failure = Some(Error::NonFiniteObjective(format!("p = {point:?}")));
            return;
        }
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((point.clone(), value));
        }
    });
    if let Some(err) = failure {
        return Err(err);
    }
    Ok(best.expect("grid is non-empty"))
}

/// Exhaustive search over monotone gradings on the chain {0..n} that pass
/// through the given knots, with increments quantized per inter-knot block.
/// Each block's mass Δm is split into a whole number of quanta no coarser
/// than the resolution (rounded up to a multiple of the block length so the
/// grid is never biased against flat spreads), and every composition is
/// scored by −Σ f ln f against the natural null.
///
/// The feasible set and the objective both decompose over blocks, so each
/// block is searched exhaustively on its own and the block optima are
/// concatenated; that is exactly the joint grid optimum.
///
/// Returns the best grading's values on 0..=n and its divergence.
pub fn maximize_increment_grid(
    n: usize,
    constraints: &KnotConstraints,
    grid: &GridSpec,
) -> Result<(Vec<f64>, f64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("chain length must be at least 1".into()));
    }
    if constraints.last_position() != n {
        return Err(Error::InvalidKnots(format!(
            "last knot must sit at position {n}, got {}",
            constraints.last_position()
        )));
    }

    struct Block {
        steps: usize,
        mass: f64,
        quanta: usize,
    }
    let mut blocks = Vec::new();
    let mut total_points: u128 = 0;
    for pair in constraints.knots().windows(2) {
        let ((n0, m0), (n1, m1)) = (pair[0], pair[1]);
        let steps = n1 - n0;
        let mass = (m1 - m0).max(0.0);
        let quanta = if mass > 0.0 {
            let base = (mass / grid.resolution()).ceil() as usize;
            steps * base.div_ceil(steps)
        } else {
            0
        };
        total_points =
            total_points.saturating_add(compositions_of(quanta as u128, steps as u128));
        blocks.push(Block {
            steps,
            mass,
            quanta,
        });
    }
    if total_points > INCREMENT_GRID_GUARD {
        return Err(Error::GuardExceeded(format!(
            "increment grid has {total_points} points, above the guard of {INCREMENT_GRID_GUARD}; \
             coarsen the resolution or shorten the chain"
        )));
    }

    let mut increments: Vec<f64> = Vec::with_capacity(n);
    let mut total_rd = 0.0;
    for block in &blocks {
        if block.quanta == 0 {
            increments.extend(std::iter::repeat_n(0.0, block.steps));
            continue;
        }
        let quantum = block.mass / block.quanta as f64;
        let mut best: Option<(Vec<usize>, f64)> = None;
        let mut buf = Vec::with_capacity(block.steps);
        for_each_composition(block.quanta, block.steps, &mut buf, &mut |c| {
            let rd: f64 = c
                .iter()
                .map(|&ci| {
                    let f = ci as f64 * quantum;
                    if f > 0.0 {
                        -f * f.ln()
                    } else {
                        0.0
                    }
                })
                .sum();
            if best.as_ref().is_none_or(|(_, b)| rd > *b) {
                best = Some((c.to_vec(), rd));
            }
        });
        let (composition, rd) = best.expect("block grid is non-empty");
        increments.extend(composition.iter().map(|&ci| ci as f64 * quantum));
        total_rd += rd;
    }

    let mut values = Vec::with_capacity(n + 1);
    let mut running = constraints.first_value();
    values.push(running);
    for &inc in &increments {
        running += inc;
        values.push(running);
    }
    Ok((values, total_rd))
}
