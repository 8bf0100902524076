//! Grading functions: order-comonotonic real assignments on a poset, their
//! validated construction, increments along chains, normalization, and the
//! built-in natural grading (unit increment on every cover edge).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poset::{Chain, ChainBundle, ElementId, Poset};

/// Absolute tolerance for value comparisons during validation, chosen so
/// solver outputs round-trip through validation.
pub const VALUE_TOLERANCE: f64 = 1e-12;

/// A validated grading function: a real value per element that never
/// decreases along a cover edge, with cached range extremes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradingFunction {
    values: BTreeMap<ElementId, f64>,
    range_min: f64,
    range_max: f64,
}

impl GradingFunction {
    pub fn value(&self, id: &ElementId) -> Option<f64> {
        self.values.get(id).copied()
    }

    pub fn values(&self) -> &BTreeMap<ElementId, f64> {
        &self.values
    }

    pub fn range_min(&self) -> f64 {
        self.range_min
    }

    pub fn range_max(&self) -> f64 {
        self.range_max
    }

    pub fn span(&self) -> f64 {
        self.range_max - self.range_min
    }

    /// The same grading shifted by a constant. Divergences are invariant
    /// under this, which is what component alignment relies on.
    pub fn shifted(&self, offset: f64) -> GradingFunction {
        let values: BTreeMap<ElementId, f64> = self
            .values
            .iter()
            .map(|(k, &v)| (k.clone(), v + offset))
            .collect();
        let range_min = values.values().copied().fold(f64::INFINITY, f64::min);
        let range_max = values.values().copied().fold(f64::NEG_INFINITY, f64::max);
        GradingFunction {
            values,
            range_min,
            range_max,
        }
    }
}

/// Validate `values` as a grading function on `poset`. Weak mode accepts
/// equal values across a cover edge; strict mode demands an increase.
/// The returned function is restricted to the poset's elements.
pub fn validate_grading(
    poset: &Poset,
    values: &BTreeMap<ElementId, f64>,
    strict: bool,
) -> Result<GradingFunction> {
    let mut restricted = BTreeMap::new();
    for element in poset.elements() {
        let v = *values
            .get(element)
            .ok_or_else(|| Error::MissingValue(element.clone()))?;
        if !v.is_finite() {
            return Err(Error::NonFiniteValue {
                element: element.clone(),
                value: v,
            });
        }
        restricted.insert(element.clone(), v);
    }
    for (lower, upper) in poset.cover_pairs() {
        let lo = restricted[lower];
        let hi = restricted[upper];
        let violated = if strict {
            hi - lo <= VALUE_TOLERANCE
        } else {
            lo - hi > VALUE_TOLERANCE
        };
        if violated {
            return Err(Error::ComonotonicityViolation {
                lower: lower.clone(),
                upper: upper.clone(),
                lower_value: lo,
                upper_value: hi,
            });
        }
    }
    let range_min = restricted.values().copied().fold(f64::INFINITY, f64::min);
    let range_max = restricted
        .values()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(GradingFunction {
        values: restricted,
        range_min,
        range_max,
    })
}

/// The natural grading function N: zero at the lowest element and unit
/// increment on every cover edge. It exists exactly on even-sided [l-g]
/// posets; there it equals subset cardinality on power sets and height on
/// bundles.
pub fn natural_gf(poset: &Poset) -> Result<GradingFunction> {
    let cls = poset.classify();
    if !cls.has_lowest || !cls.has_greatest {
        return Err(Error::NotEvenSided(
            "a lowest and a greatest element are required",
        ));
    }
    let ranks = poset.rank_levels().ok_or(Error::NotEvenSided(
        "maximal chains have unequal edge counts, so unit edge increments are inconsistent",
    ))?;
    let values: BTreeMap<ElementId, f64> = poset
        .elements()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), ranks[i] as f64))
        .collect();
    let range_max = cls.common_chain_length.unwrap_or(0) as f64;
    Ok(GradingFunction {
        values,
        range_min: 0.0,
        range_max,
    })
}

/// Increments of two grading functions along one chain — the raw input to
/// the divergence formula.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementSequence {
    f: Vec<f64>,
    g: Vec<f64>,
}

impl IncrementSequence {
    /// Validates equal lengths, non-negativity (negatives within
    /// [`VALUE_TOLERANCE`] are clamped to zero), and the finiteness
    /// condition: a positive F-increment over a zero G-increment makes the
    /// divergence undefined and is reported as an error rather than
    /// silently producing −∞.
    pub fn new(f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if f.len() != g.len() {
            return Err(Error::InvalidIncrements(format!(
                "length mismatch: {} vs {}",
                f.len(),
                g.len()
            )));
        }
        let clamp = |xs: Vec<f64>, name: &str| -> Result<Vec<f64>> {
            xs.into_iter()
                .enumerate()
                .map(|(i, x)| {
                    if !x.is_finite() {
                        Err(Error::InvalidIncrements(format!(
                            "{name}[{i}] = {x} is not finite"
                        )))
                    } else if x < -VALUE_TOLERANCE {
                        Err(Error::InvalidIncrements(format!(
                            "{name}[{i}] = {x} is negative"
                        )))
                    } else {
                        Ok(x.max(0.0))
                    }
                })
                .collect()
        };
        let f = clamp(f, "f")?;
        let g = clamp(g, "g")?;
        for (i, (&fi, &gi)) in f.iter().zip(&g).enumerate() {
            if fi > 0.0 && gi == 0.0 {
                return Err(Error::DivergenceUndefined { step: i + 1, f: fi });
            }
        }
        Ok(Self { f, g })
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }
}

/// Increments of `f` and `g` along `chain`, in chain order.
pub fn increments_along(
    chain: &Chain,
    f: &GradingFunction,
    g: &GradingFunction,
) -> Result<IncrementSequence> {
    let step = |gf: &GradingFunction, pair: &[ElementId]| -> Result<f64> {
        let lo = gf
            .value(&pair[0])
            .ok_or_else(|| Error::MissingValue(pair[0].clone()))?;
        let hi = gf
            .value(&pair[1])
            .ok_or_else(|| Error::MissingValue(pair[1].clone()))?;
        Ok(hi - lo)
    };
    let mut df = Vec::with_capacity(chain.edge_count());
    let mut dg = Vec::with_capacity(chain.edge_count());
    for pair in chain.path().windows(2) {
        df.push(step(f, pair)?);
        dg.push(step(g, pair)?);
    }
    IncrementSequence::new(df, dg)
}

/// Affine rescaling of a grading function onto the range [0, 1].
pub fn normalize(f: &GradingFunction) -> Result<GradingFunction> {
    let span = f.span();
    if span <= VALUE_TOLERANCE {
        return Err(Error::DegenerateRange(f.range_min));
    }
    let values: BTreeMap<ElementId, f64> = f
        .values
        .iter()
        .map(|(k, &v)| (k.clone(), (v - f.range_min) / span))
        .collect();
    Ok(GradingFunction {
        values,
        range_min: 0.0,
        range_max: 1.0,
    })
}

/// Values of the additive set function with the given atom weights, on
/// every subset of the atoms. Subset keys follow [`subset_id`].
///
/// [`subset_id`]: crate::poset::subset_id
pub fn additive_subset_values(atoms: &[(ElementId, f64)]) -> Result<BTreeMap<ElementId, f64>> {
    if atoms.len() > crate::poset::MAX_POWER_SET_GROUND {
        return Err(Error::ElementCapExceeded {
            required: 1u128 << atoms.len(),
            cap: 1u128 << crate::poset::MAX_POWER_SET_GROUND,
        });
    }
    let mut sorted: Vec<(&str, f64)> = atoms.iter().map(|(id, w)| (id.as_str(), *w)).collect();
    sorted.sort_unstable_by(|a, b| a.0.cmp(b.0));
    let n = sorted.len();
    let mut out = BTreeMap::new();
    for mask in 0..(1usize << n) {
        let members = (0..n).filter(|b| mask & (1 << b) != 0);
        let id = crate::poset::subset_id(members.clone().map(|b| sorted[b].0));
        let total: f64 = members.map(|b| sorted[b].1).sum();
        out.insert(id, total);
    }
    Ok(out)
}

/// Values of the additively separable function F(i) = Σ_k per_arm[k][i_k]
/// on every element of the bundle poset.
pub fn bundle_separable_values(
    bundle: &ChainBundle,
    per_arm: &[Vec<f64>],
) -> Result<BTreeMap<ElementId, f64>> {
    if per_arm.len() != bundle.arm_count() {
        return Err(Error::InvalidBundle(format!(
            "expected {} per-chain value vectors, got {}",
            bundle.arm_count(),
            per_arm.len()
        )));
    }
    for (k, values) in per_arm.iter().enumerate() {
        if values.len() != bundle.dims()[k] + 1 {
            return Err(Error::InvalidBundle(format!(
                "chain {k} needs {} values, got {}",
                bundle.dims()[k] + 1,
                values.len()
            )));
        }
    }
    let mut out = BTreeMap::new();
    for index in bundle.vector_indices() {
        let total: f64 = index
            .coords()
            .iter()
            .enumerate()
            .map(|(k, &i)| per_arm[k][i])
            .sum();
        out.insert(index.element_id(), total);
    }
    Ok(out)
}
