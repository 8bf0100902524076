//! Closed-form and semi-closed-form maximizers of relative divergence:
//! uniform increments under endpoint constraints, piecewise-linear
//! interpolation through fixed knots, the conditional-probability and
//! independence maximizers, cardinality-dependent power-set gradings,
//! height-linear bundle gradings, and the Lagrange type-distribution
//! solver with bracketed bisection on the normalization constraint.

use serde::Serialize;

use crate::divergence::rd_chain;
use crate::error::{Error, Result};
use crate::grading::{validate_grading, GradingFunction, IncrementSequence, VALUE_TOLERANCE};
use crate::poset::{bundle_poset, ChainBundle, ElementId, Poset};

/// Fixed values of a grading function on the chain {0..n}: pairs
/// (position, value) including both endpoints, positions strictly
/// increasing, values non-decreasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct KnotConstraints {
    knots: Vec<(usize, f64)>,
}

impl KnotConstraints {
    pub fn new(knots: Vec<(usize, f64)>) -> Result<Self> {
        Self::validated(knots, false)
    }

    /// Like [`KnotConstraints::new`] but demands strictly increasing values,
    /// as needed for a strict grading function.
    pub fn new_strict(knots: Vec<(usize, f64)>) -> Result<Self> {
        Self::validated(knots, true)
    }

    fn validated(knots: Vec<(usize, f64)>, strict: bool) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidKnots(
                "need at least the two endpoint knots".into(),
            ));
        }
        if knots[0].0 != 0 {
            return Err(Error::InvalidKnots(format!(
                "first knot must sit at position 0, got {}",
                knots[0].0
            )));
        }
        for pair in knots.windows(2) {
            let ((n0, m0), (n1, m1)) = (pair[0], pair[1]);
            if n1 <= n0 {
                return Err(Error::InvalidKnots(format!(
                    "positions must strictly increase: {n0} then {n1}"
                )));
            }
            if m0 - m1 > VALUE_TOLERANCE {
                return Err(Error::InvalidKnots(format!(
                    "values must not decrease: {m0} at {n0} vs {m1} at {n1}"
                )));
            }
            if strict && m1 - m0 <= VALUE_TOLERANCE {
                return Err(Error::InvalidKnots(format!(
                    "strict mode requires increasing values: {m0} at {n0} vs {m1} at {n1}"
                )));
            }
        }
        for &(n, m) in &knots {
            if !m.is_finite() {
                return Err(Error::InvalidKnots(format!(
                    "value {m} at position {n} is not finite"
                )));
            }
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(usize, f64)] {
        &self.knots
    }

    pub fn first_value(&self) -> f64 {
        self.knots[0].1
    }

    pub fn last_position(&self) -> usize {
        self.knots[self.knots.len() - 1].0
    }

    pub fn last_value(&self) -> f64 {
        self.knots[self.knots.len() - 1].1
    }
}

/// One linear piece of a solution: F(i) = intercept + slope · i on the
/// index interval (start, end].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub slope: f64,
    pub intercept: f64,
}

/// The piecewise-linear divergence maximizer through a set of knots,
/// together with the divergence it attains against the natural null.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinearGF {
    knots: Vec<(usize, f64)>,
    segments: Vec<Segment>,
    attained_rd: f64,
}

impl PiecewiseLinearGF {
    /// Value at an integer position of the domain chain {0..n}. Knot
    /// positions reproduce their fixed values exactly.
    pub fn eval(&self, i: usize) -> f64 {
        assert!(
            i <= self.domain_len(),
            "position {i} outside the domain 0..={}",
            self.domain_len()
        );
        if let Ok(k) = self.knots.binary_search_by_key(&i, |&(n, _)| n) {
            return self.knots[k].1;
        }
        let segment = self
            .segments
            .iter()
            .find(|s| s.start < i && i <= s.end)
            .expect("segments cover (0, n]");
        segment.intercept + segment.slope * i as f64
    }

    /// Length n of the domain chain {0..n}.
    pub fn domain_len(&self) -> usize {
        self.knots[self.knots.len() - 1].0
    }

    /// Per-step increments: the slope of the covering segment, repeated.
    pub fn increments(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.domain_len());
        for s in &self.segments {
            out.extend(std::iter::repeat_n(s.slope, s.end - s.start));
        }
        out
    }

    pub fn attained_rd(&self) -> f64 {
        self.attained_rd
    }

    pub fn knots(&self) -> &[(usize, f64)] {
        &self.knots
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }
}

/// The unconstrained entropy maximizer over n outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformSolution {
    pub p: Vec<f64>,
    pub entropy: f64,
}

/// Uniform distribution p_i = 1/n, attaining the maximum entropy ln n.
pub fn solve_uniform(n: usize) -> Result<UniformSolution> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(UniformSolution {
        p: vec![1.0 / n as f64; n],
        entropy: (n as f64).ln(),
    })
}

/// The divergence maximizer on the chain {0..n} under fixed knot values:
/// linear between consecutive knots with slope Δm/Δn, which spreads each
/// block's mass uniformly over its steps. The attained divergence is
/// evaluated directly from the resulting increments against the natural
/// null (all unit increments).
pub fn solve_interpolation(n: usize, constraints: &KnotConstraints) -> Result<PiecewiseLinearGF> {
    if n == 0 {
        return Err(Error::InvalidArgument("chain length must be at least 1".into()));
    }
    if constraints.last_position() != n {
        return Err(Error::InvalidKnots(format!(
            "last knot must sit at position {n}, got {}",
            constraints.last_position()
        )));
    }

    let knots = constraints.knots().to_vec();
    let mut segments = Vec::with_capacity(knots.len() - 1);
    for pair in knots.windows(2) {
        let ((n0, m0), (n1, m1)) = (pair[0], pair[1]);
        let slope = ((m1 - m0) / (n1 - n0) as f64).max(0.0);
        // Anchored at the left knot so the segment passes through both.
        let intercept = m0 - slope * n0 as f64;
        segments.push(Segment {
            start: n0,
            end: n1,
            slope,
            intercept,
        });
    }

    let increments: Vec<f64> = segments
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.slope, s.end - s.start))
        .collect();
    let ones = vec![1.0; increments.len()];
    let attained_rd = rd_chain(&IncrementSequence::new(increments, ones)?);

    Ok(PiecewiseLinearGF {
        knots,
        segments,
        attained_rd,
    })
}

/// Objective of the conditional-probability problem: the divergence of the
/// candidate grading (0, x, 1) from the null (0, p1, p2) on a three-element
/// chain, with boundary terms following the 0·ln 0 = 0 convention.
pub fn conditional_objective(p1: f64, p2: f64, x: f64) -> f64 {
    let mut q = 0.0;
    if x > 0.0 {
        q -= x * (x / p1).ln();
    }
    if 1.0 - x > 0.0 {
        q -= (1.0 - x) * ((1.0 - x) / (p2 - p1)).ln();
    }
    q
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalSolution {
    /// The maximizer x* = p1/p2 — the conditional probability.
    pub x_star: f64,
    /// Objective value at the maximizer.
    pub value: f64,
}

/// Maximizer of the conditional-probability divergence objective for
/// 0 < p1 ≤ p2 ≤ 1: x* = p1/p2. When p1 = p2 the maximizer sits on the
/// boundary x = 1 and the objective is evaluated with the zero-term
/// convention.
pub fn solve_conditional(p1: f64, p2: f64) -> Result<ConditionalSolution> {
    if !(p1.is_finite() && p2.is_finite()) || p1 <= 0.0 || p1 > p2 || p2 > 1.0 {
        return Err(Error::InvalidProbability(format!(
            "need 0 < p1 <= p2 <= 1, got p1 = {p1}, p2 = {p2}"
        )));
    }
    let x_star = p1 / p2;
    Ok(ConditionalSolution {
        x_star,
        value: conditional_objective(p1, p2, x_star),
    })
}

/// Objective of the independence problem: the shared divergence of the two
/// maximal chains through A and B as a function of x = P(A∩B), with the
/// 0·ln 0 = 0 convention on the boundary.
pub fn independence_objective(p1: f64, p2: f64, x: f64) -> f64 {
    let term = |v: f64| if v > 0.0 { -v * v.ln() } else { 0.0 };
    term(x) + term(p1 - x) + term(p2 - x) + term(1.0 - p1 - p2 + x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndependenceSolution {
    /// The maximizer x* = p1·p2 — the product formula.
    pub x_star: f64,
    /// Objective value at the maximizer.
    pub value: f64,
    /// Feasible interval (max(0, p1+p2−1), min(p1, p2)) containing x*.
    pub lower: f64,
    pub upper: f64,
    /// Second derivative at x*, always negative: the stationary point is
    /// the unique interior maximum.
    pub second_derivative: f64,
}

/// Maximizer of the independence divergence objective for p1, p2 in (0,1):
/// x* = p1·p2, interior to the feasible interval.
pub fn solve_independence(p1: f64, p2: f64) -> Result<IndependenceSolution> {
    for p in [p1, p2] {
        if !p.is_finite() || p <= 0.0 || p >= 1.0 {
            return Err(Error::InvalidProbability(format!(
                "need p1, p2 strictly inside (0, 1), got p1 = {p1}, p2 = {p2}"
            )));
        }
    }
    let x_star = p1 * p2;
    let second_derivative = -(1.0 / x_star
        + 1.0 / (p1 - x_star)
        + 1.0 / (p2 - x_star)
        + 1.0 / (1.0 - p1 - p2 + x_star));
    Ok(IndependenceSolution {
        x_star,
        value: independence_objective(p1, p2, x_star),
        lower: (p1 + p2 - 1.0).max(0.0),
        upper: p1.min(p2),
        second_derivative,
    })
}

/// The cardinality-dependent maximizer on the power set of an n-element
/// ground set: F(w) = M·|w|/n without interior knots, and the
/// piecewise-linear interpolation solution when some costs F(|w|) are
/// prespecified. Endpoint values must be 0 and M.
pub fn solve_cardinality_dependent(
    n: usize,
    budget: f64,
    knots: Option<&KnotConstraints>,
) -> Result<PiecewiseLinearGF> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "ground set must have at least one element".into(),
        ));
    }
    if !budget.is_finite() {
        return Err(Error::InvalidArgument(format!("M = {budget} is not finite")));
    }
    match knots {
        None => solve_interpolation(n, &KnotConstraints::new(vec![(0, 0.0), (n, budget)])?),
        Some(k) => {
            if k.first_value().abs() > VALUE_TOLERANCE {
                return Err(Error::InvalidKnots(format!(
                    "cardinality solution needs F(0) = 0, got {}",
                    k.first_value()
                )));
            }
            if (k.last_value() - budget).abs() > VALUE_TOLERANCE {
                return Err(Error::InvalidKnots(format!(
                    "cardinality solution needs F(n) = M = {budget}, got {}",
                    k.last_value()
                )));
            }
            solve_interpolation(n, k)
        }
    }
}

/// The height-linear maximizer on a chain bundle, with the bundle poset it
/// lives on and the divergence it attains against the natural grading.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightSolution {
    pub poset: Poset,
    pub gf: GradingFunction,
    pub max_rd: f64,
}

/// Among height-dependent gradings on a bundle with fixed extremes m < M,
/// the divergence from the natural grading is maximized by the height-linear
/// F(i) = m + N(i)(M−m)/Q, attaining (M−m)·ln Q − (M−m)·ln(M−m).
pub fn solve_height_dependent(bundle: &ChainBundle, m: f64, big_m: f64) -> Result<HeightSolution> {
    if !(m.is_finite() && big_m.is_finite()) || big_m <= m {
        return Err(Error::InvalidArgument(format!(
            "need finite m < M, got m = {m}, M = {big_m}"
        )));
    }
    let poset = bundle_poset(bundle)?;
    let q = bundle.total_height() as f64;
    let span = big_m - m;
    let values = bundle
        .vector_indices()
        .into_iter()
        .map(|idx| (idx.element_id(), m + idx.height() as f64 * span / q))
        .collect();
    let gf = validate_grading(&poset, &values, false)?;
    let max_rd = span * q.ln() - span * span.ln();
    Ok(HeightSolution { poset, gf, max_rd })
}

/// Per-type inputs of the type-distribution problem: the divergence D_k of
/// the type's cost grading from the natural grading on its queue chain,
/// and the cost span M_k − m_k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeParams {
    pub divergence: f64,
    pub span: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct QueueTypeParams {
    types: Vec<TypeParams>,
}

impl QueueTypeParams {
    pub fn new(types: Vec<TypeParams>) -> Result<Self> {
        if types.is_empty() {
            return Err(Error::InvalidArgument("need at least one type".into()));
        }
        for (k, t) in types.iter().enumerate() {
            if !t.divergence.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "divergence of type {k} is not finite"
                )));
            }
            if !t.span.is_finite() || t.span <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "span of type {k} must be positive, got {}",
                    t.span
                )));
            }
        }
        Ok(Self { types })
    }

    pub fn types(&self) -> &[TypeParams] {
        &self.types
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }
}

/// The objective the type distribution maximizes: Σ p_k (D_k − span_k ln p_k),
/// with zero probabilities contributing nothing.
pub fn type_objective(params: &QueueTypeParams, p: &[f64]) -> f64 {
    params
        .types()
        .iter()
        .zip(p)
        .map(|(t, &pk)| {
            if pk > 0.0 {
                pk * (t.divergence - t.span * pk.ln())
            } else {
                0.0
            }
        })
        .sum()
}

/// A probability distribution over types together with the Lagrange
/// multiplier that produced it and the attained objective value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeDistribution {
    p: Vec<f64>,
    lambda: f64,
    objective: f64,
}

impl TypeDistribution {
    /// Validates the probability vector: every entry in (0, 1], summing to
    /// one within 1e-10.
    pub fn new(p: Vec<f64>, lambda: f64, objective: f64) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidProbability("empty distribution".into()));
        }
        for (k, &pk) in p.iter().enumerate() {
            if !pk.is_finite() || pk <= 0.0 || pk > 1.0 {
                return Err(Error::InvalidProbability(format!(
                    "p[{k}] = {pk} outside (0, 1]"
                )));
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidProbability(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self {
            p,
            lambda,
            objective,
        })
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }
}

/// Residual of the normalization constraint at multiplier `lambda`:
/// Σ_k exp(−1 + (D_k − λ)/span_k) − 1. Strictly decreasing in λ.
pub fn normalization_residual(params: &QueueTypeParams, lambda: f64) -> f64 {
    params
        .types()
        .iter()
        .map(|t| (-1.0 + (t.divergence - lambda) / t.span).exp())
        .sum::<f64>()
        - 1.0
}

fn closed_form_p(params: &QueueTypeParams, lambda: f64) -> Vec<f64> {
    params
        .types()
        .iter()
        .map(|t| (-1.0 + (t.divergence - lambda) / t.span).exp())
        .collect()
}

/// The least-presuming type distribution: p_k = exp(−1 + (D_k − λ)/span_k)
/// with λ solved from Σ p_k = 1 by bracketed bisection. The residual is
/// strictly decreasing and continuous in λ, so a sign-changing bracket is
/// found by doubling expansion and bisection drives |residual| below 1e-12.
pub fn solve_type_distribution(params: &QueueTypeParams) -> Result<TypeDistribution> {
    let max_span = params
        .types()
        .iter()
        .map(|t| t.span)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_d = params
        .types()
        .iter()
        .map(|t| t.divergence)
        .fold(f64::INFINITY, f64::min);
    let max_d = params
        .types()
        .iter()
        .map(|t| t.divergence)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut lo = min_d - 10.0 * max_span;
    let mut hi = max_d;
    let mut step = max_span.max(1.0);
    let mut tries = 0;
    while normalization_residual(params, hi) > 0.0 {
        hi += step;
        step *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::BracketFailure);
        }
    }
    step = max_span.max(1.0);
    tries = 0;
    while normalization_residual(params, lo) < 0.0 {
        lo -= step;
        step *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::BracketFailure);
        }
    }

    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..500 {
        lambda = 0.5 * (lo + hi);
        let r = normalization_residual(params, lambda);
        if r.abs() < 1e-13 {
            break;
        }
        if r > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        if hi - lo <= f64::EPSILON * lambda.abs().max(1.0) {
            lambda = 0.5 * (lo + hi);
            break;
        }
    }

    let p = closed_form_p(params, lambda);
    let objective = type_objective(params, &p);
    TypeDistribution::new(p, lambda, objective)
}

/// Shift every component after the first by a constant so that shared
/// junction values agree; divergences are unchanged under constant shifts.
/// Component i and i+1 must both carry a value at `junctions[i]`.
pub fn align_components(
    solutions: &[GradingFunction],
    junctions: &[ElementId],
) -> Result<Vec<GradingFunction>> {
    if solutions.is_empty() {
        return Err(Error::InvalidArgument("no components to align".into()));
    }
    if junctions.len() + 1 != solutions.len() {
        return Err(Error::InvalidArgument(format!(
            "{} components need {} junctions, got {}",
            solutions.len(),
            solutions.len() - 1,
            junctions.len()
        )));
    }
    let mut aligned = Vec::with_capacity(solutions.len());
    aligned.push(solutions[0].clone());
    for (i, junction) in junctions.iter().enumerate() {
        let prev_value = aligned[i].value(junction).ok_or_else(|| Error::JunctionMissing {
            element: junction.clone(),
            component: i,
        })?;
        let next_value = solutions[i + 1]
            .value(junction)
            .ok_or_else(|| Error::JunctionMissing {
                element: junction.clone(),
                component: i + 1,
            })?;
        aligned.push(solutions[i + 1].shifted(prev_value - next_value));
    }
    Ok(aligned)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{rd_even_sided, RdResult};
    use crate::grading::natural_gf;

    fn knots(pairs: &[(usize, f64)]) -> KnotConstraints {
        KnotConstraints::new(pairs.to_vec()).unwrap()
    }

    #[test]
    fn uniform_solution_values() {
        let one = solve_uniform(1).unwrap();
        assert_eq!(one.p, vec![1.0]);
        assert_eq!(one.entropy, 0.0);

        let four = solve_uniform(4).unwrap();
        assert_eq!(four.p, vec![0.25; 4]);
        assert!((four.entropy - 4f64.ln()).abs() < 1e-15);

        assert!(solve_uniform(0).is_err());
    }

    #[test]
    fn interpolation_single_segment_reduces_to_uniform() {
        let sol = solve_interpolation(4, &knots(&[(0, 0.0), (4, 1.0)])).unwrap();
        assert_eq!(sol.segments().len(), 1);
        assert_eq!(sol.segments()[0].slope, 0.25);
        assert!((sol.attained_rd() - 4f64.ln()).abs() < 1e-12);
        assert_eq!(sol.eval(0), 0.0);
        assert_eq!(sol.eval(4), 1.0);
        assert!((sol.eval(2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interpolation_two_segments_slopes() {
        let sol = solve_interpolation(6, &knots(&[(0, 0.0), (2, 0.5), (6, 1.0)])).unwrap();
        let slopes: Vec<f64> = sol.segments().iter().map(|s| s.slope).collect();
        assert_eq!(slopes, vec![0.25, 0.125]);
        // passes through every knot
        for &(n, m) in sol.knots() {
            assert!((sol.eval(n) - m).abs() <= 1e-12);
        }
    }

    #[test]
    fn interpolation_attained_rd_is_blockwise_entropy() {
        let sol = solve_interpolation(5, &knots(&[(0, 0.0), (2, 0.6), (5, 1.0)])).unwrap();
        let direct: f64 = sol
            .increments()
            .iter()
            .map(|&b| if b > 0.0 { -b * b.ln() } else { 0.0 })
            .sum();
        assert!((sol.attained_rd() - direct).abs() < 1e-15);
    }

    #[test]
    fn interpolation_rejects_bad_knots() {
        assert!(KnotConstraints::new(vec![(0, 0.0), (2, 0.5), (2, 0.7)]).is_err());
        assert!(KnotConstraints::new(vec![(0, 0.5), (3, 0.2)]).is_err());
        assert!(KnotConstraints::new(vec![(1, 0.0), (3, 0.2)]).is_err());
        assert!(KnotConstraints::new(vec![(0, 0.0)]).is_err());
        assert!(KnotConstraints::new_strict(vec![(0, 0.0), (2, 0.0), (4, 1.0)]).is_err());
        // knots valid on their own, but not for this chain length
        let k = knots(&[(0, 0.0), (4, 1.0)]);
        assert!(solve_interpolation(6, &k).is_err());
    }

    #[test]
    fn interpolation_allows_flat_blocks() {
        let sol = solve_interpolation(4, &knots(&[(0, 0.0), (2, 0.0), (4, 1.0)])).unwrap();
        assert_eq!(sol.segments()[0].slope, 0.0);
        assert!((sol.attained_rd() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn conditional_closed_form() {
        let sol = solve_conditional(0.3, 0.6).unwrap();
        assert!((sol.x_star - 0.5).abs() < 1e-15);

        let boundary = solve_conditional(0.4, 0.4).unwrap();
        assert_eq!(boundary.x_star, 1.0);
        assert!((boundary.value - 0.4f64.ln()).abs() < 1e-12);

        assert!(solve_conditional(0.7, 0.6).is_err());
        assert!(solve_conditional(0.0, 0.6).is_err());
        assert!(solve_conditional(0.3, 1.2).is_err());
    }

    #[test]
    fn independence_closed_form() {
        let sol = solve_independence(0.5, 0.5).unwrap();
        assert!((sol.x_star - 0.25).abs() < 1e-15);
        assert!(sol.second_derivative < 0.0);

        let high = solve_independence(0.9, 0.9).unwrap();
        assert!((high.x_star - 0.81).abs() < 1e-15);
        assert!((high.lower - 0.8).abs() < 1e-12);
        assert!((high.upper - 0.9).abs() < 1e-12);
        assert!(high.lower < high.x_star && high.x_star < high.upper);

        assert!(solve_independence(0.0, 0.5).is_err());
        assert!(solve_independence(0.5, 1.0).is_err());
    }

    #[test]
    fn cardinality_dependent_defaults_to_linear() {
        let sol = solve_cardinality_dependent(10, 5.0, None).unwrap();
        assert_eq!(sol.segments().len(), 1);
        assert_eq!(sol.segments()[0].slope, 0.5);
        assert_eq!(sol.eval(10), 5.0);

        let endpoint_knots = knots(&[(0, 0.0), (4, 1.0)]);
        let with = solve_cardinality_dependent(4, 1.0, Some(&endpoint_knots)).unwrap();
        let without = solve_cardinality_dependent(4, 1.0, None).unwrap();
        assert_eq!(with, without);
    }

    #[test]
    fn cardinality_dependent_with_interior_knot() {
        let k = knots(&[(0, 0.0), (3, 2.0), (6, 3.0)]);
        let sol = solve_cardinality_dependent(6, 3.0, Some(&k)).unwrap();
        let slopes: Vec<f64> = sol.segments().iter().map(|s| s.slope).collect();
        assert!((slopes[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((slopes[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cardinality_dependent_rejects_mismatched_endpoints() {
        let k = knots(&[(0, 0.0), (6, 2.0)]);
        assert!(solve_cardinality_dependent(6, 3.0, Some(&k)).is_err());
        let k2 = knots(&[(0, 0.5), (6, 3.0)]);
        assert!(solve_cardinality_dependent(6, 3.0, Some(&k2)).is_err());
    }

    #[test]
    fn height_dependent_solution() {
        let bundle = ChainBundle::new(vec![2, 3]).unwrap();

        // M − m = Q makes the height function itself optimal with zero rd
        let tall = solve_height_dependent(&bundle, 0.0, 5.0).unwrap();
        assert!(tall.max_rd.abs() < 1e-12);
        assert_eq!(tall.gf.value(&"1,2".into()), Some(3.0));

        let unit = solve_height_dependent(&bundle, 0.0, 1.0).unwrap();
        assert!((unit.max_rd - 5f64.ln()).abs() < 1e-12);

        assert!(solve_height_dependent(&bundle, 1.0, 1.0).is_err());
        assert!(solve_height_dependent(&bundle, 2.0, 1.0).is_err());
    }

    #[test]
    fn height_dependent_matches_poset_evaluation_on_diamond() {
        let bundle = ChainBundle::new(vec![1, 1]).unwrap();
        let sol = solve_height_dependent(&bundle, 0.0, 1.0).unwrap();
        let natural = natural_gf(&sol.poset).unwrap();
        let rd = rd_even_sided(&sol.poset, &sol.gf, &natural).unwrap();
        assert!((rd.value - 2f64.ln()).abs() < 1e-12);
        assert!((rd.value - sol.max_rd).abs() < 1e-12);
    }

    #[test]
    fn type_distribution_symmetric_case() {
        let params = QueueTypeParams::new(vec![
            TypeParams {
                divergence: 0.0,
                span: 1.0,
            };
            2
        ])
        .unwrap();
        let dist = solve_type_distribution(&params).unwrap();
        assert!((dist.p()[0] - 0.5).abs() < 1e-12);
        assert!((dist.p()[1] - 0.5).abs() < 1e-12);
        assert!((dist.p().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // p = exp(−1 − λ) = 1/2 pins the multiplier
        assert!((dist.lambda() - (-1.0 - 0.5f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn type_distribution_single_type() {
        let params = QueueTypeParams::new(vec![TypeParams {
            divergence: 0.7,
            span: 2.5,
        }])
        .unwrap();
        let dist = solve_type_distribution(&params).unwrap();
        assert!((dist.p()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn type_distribution_residual_is_tiny() {
        let params = QueueTypeParams::new(vec![
            TypeParams {
                divergence: 0.2,
                span: 1.0,
            },
            TypeParams {
                divergence: 0.5,
                span: 2.0,
            },
            TypeParams {
                divergence: 0.9,
                span: 1.0,
            },
        ])
        .unwrap();
        let dist = solve_type_distribution(&params).unwrap();
        assert!(normalization_residual(&params, dist.lambda()).abs() < 1e-12);
        assert!((dist.p().iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn type_params_validation() {
        assert!(QueueTypeParams::new(vec![]).is_err());
        assert!(QueueTypeParams::new(vec![TypeParams {
            divergence: 0.0,
            span: 0.0,
        }])
        .is_err());
    }

    #[test]
    fn align_two_components() {
        let poset_a = Poset::new(
            vec!["a".into(), "j".into()],
            vec![("a".into(), "j".into())],
        )
        .unwrap();
        let poset_b = Poset::new(
            vec!["j".into(), "z".into()],
            vec![("j".into(), "z".into())],
        )
        .unwrap();
        let fa = validate_grading(
            &poset_a,
            &[("a".into(), 0.0), ("j".into(), 1.0)].into_iter().collect(),
            false,
        )
        .unwrap();
        let fb = validate_grading(
            &poset_b,
            &[("j".into(), 0.2), ("z".into(), 0.9)].into_iter().collect(),
            false,
        )
        .unwrap();
        let aligned = align_components(&[fa.clone(), fb], &["j".into()]).unwrap();
        assert_eq!(aligned[0], fa);
        assert!((aligned[1].value(&"j".into()).unwrap() - 1.0).abs() < 1e-15);
        assert!((aligned[1].value(&"z".into()).unwrap() - 1.7).abs() < 1e-15);
    }

    #[test]
    fn align_identical_junction_values_is_identity() {
        let poset = Poset::new(
            vec!["j".into(), "z".into()],
            vec![("j".into(), "z".into())],
        )
        .unwrap();
        let f = validate_grading(
            &poset,
            &[("j".into(), 0.5), ("z".into(), 1.5)].into_iter().collect(),
            false,
        )
        .unwrap();
        let aligned = align_components(&[f.clone(), f.clone()], &["j".into()]).unwrap();
        assert_eq!(aligned[1], f);
    }

    #[test]
    fn align_three_chained_components_accumulates_shifts() {
        let make = |ids: [&str; 2], lo: f64, hi: f64| {
            let poset = Poset::new(
                vec![ids[0].into(), ids[1].into()],
                vec![(ids[0].into(), ids[1].into())],
            )
            .unwrap();
            validate_grading(
                &poset,
                &[(ids[0].into(), lo), (ids[1].into(), hi)].into_iter().collect(),
                false,
            )
            .unwrap()
        };
        let a = make(["a", "j1"], 0.0, 1.0);
        let b = make(["j1", "j2"], 0.4, 0.9);
        let c = make(["j2", "z"], -1.0, 0.25);
        let aligned =
            align_components(&[a, b, c], &["j1".into(), "j2".into()]).unwrap();
        // junction values agree pairwise after shifting
        let j1_left = aligned[0].value(&"j1".into()).unwrap();
        let j1_right = aligned[1].value(&"j1".into()).unwrap();
        assert!((j1_left - j1_right).abs() <= 1e-12);
        let j2_left = aligned[1].value(&"j2".into()).unwrap();
        let j2_right = aligned[2].value(&"j2".into()).unwrap();
        assert!((j2_left - j2_right).abs() <= 1e-12);
        // spans (hence per-component divergences from any null) are unchanged
        assert!((aligned[1].span() - 0.5).abs() <= 1e-12);
        assert!((aligned[2].span() - 1.25).abs() <= 1e-12);
    }

    #[test]
    fn align_missing_junction_errors() {
        let poset = Poset::new(vec!["x".into()], vec![]).unwrap();
        let f = validate_grading(&poset, &[("x".into(), 0.0)].into_iter().collect(), false)
            .unwrap();
        let err = align_components(&[f.clone(), f], &["missing".into()]).unwrap_err();
        assert!(matches!(err, Error::JunctionMissing { .. }));
    }

    #[test]
    fn serial_composition_sums_interpolation_blocks() {
        // splitting {0..6} at the knot reproduces the whole-chain value
        let whole = solve_interpolation(6, &knots(&[(0, 0.0), (2, 0.5), (6, 1.0)])).unwrap();
        let left = solve_interpolation(2, &knots(&[(0, 0.0), (2, 0.5)])).unwrap();
        let right = solve_interpolation(4, &knots(&[(0, 0.5), (4, 1.0)])).unwrap();
        let total = crate::divergence::rd_blocks_serial(&[
            RdResult::defined(left.attained_rd()),
            RdResult::defined(right.attained_rd()),
        ]);
        assert!((total.value - whole.attained_rd()).abs() < 1e-12);
    }
}
