//! Relative divergence evaluation, in nats throughout: on a single chain,
//! by serial composition over concatenated blocks, by infimum over the
//! maximal chains of an even-sided [l-g] poset, on partitions, and by
//! additive separation over bundle component chains.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grading::{GradingFunction, IncrementSequence, VALUE_TOLERANCE};
use crate::poset::{Chain, ElementId, Poset, DEFAULT_CHAIN_CAP};

/// Relative divergence of one increment sequence: −Σ f_k ln(f_k / g_k),
/// with 0·ln 0 = 0 so zero F-increments contribute nothing. The sequence
/// type already guarantees the finiteness condition (no positive f over a
/// zero g), so this is total.
pub fn rd_chain(inc: &IncrementSequence) -> f64 {
    inc.f()
        .iter()
        .zip(inc.g())
        .map(|(&f, &g)| if f > 0.0 { -f * (f / g).ln() } else { 0.0 })
        .sum()
}

/// Outcome of a divergence computation. `witness_chain` is present exactly
/// when an infimum over at least two maximal chains was taken; `undefined`
/// marks results poisoned by a chain with a positive F-increment over a
/// zero G-increment (value is −∞ by convention).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RdResult {
    pub value: f64,
    pub witness_chain: Option<Chain>,
    pub undefined: bool,
}

impl RdResult {
    pub fn defined(value: f64) -> Self {
        Self {
            value,
            witness_chain: None,
            undefined: false,
        }
    }

    pub fn undefined() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            witness_chain: None,
            undefined: true,
        }
    }
}

/// Serial composition: divergence over concatenated [l-g] blocks is the sum
/// of the per-block divergences. Any undefined part poisons the sum.
pub fn rd_blocks_serial(parts: &[RdResult]) -> RdResult {
    if parts.iter().any(|p| p.undefined) {
        return RdResult::undefined();
    }
    RdResult::defined(parts.iter().map(|p| p.value).sum())
}

/// Additive separation on bundles: when both gradings split into per-chain
/// summands, every maximal chain carries the same increments up to order,
/// and the divergence is the sum of the per-component-chain divergences.
pub fn rd_bundle_separable(parts: &[RdResult]) -> RdResult {
    rd_blocks_serial(parts)
}

/// Divergence of `f` from `g` on an even-sided [l-g] poset: the minimum of
/// the chain divergence over all maximal chains (a finite set, so the
/// infimum is attained), with the first minimizing chain in enumeration
/// order as witness. A single undefined chain makes the whole result
/// undefined: one inadmissible chain means `g` is not a valid null model
/// anywhere on the poset.
pub fn rd_even_sided(poset: &Poset, f: &GradingFunction, g: &GradingFunction) -> Result<RdResult> {
    rd_even_sided_capped(poset, f, g, DEFAULT_CHAIN_CAP)
}

pub fn rd_even_sided_capped(
    poset: &Poset,
    f: &GradingFunction,
    g: &GradingFunction,
    cap: usize,
) -> Result<RdResult> {
    let cls = poset.classify();
    if !cls.is_even_sided {
        return Err(Error::NotEvenSided(
            "the chain infimum is defined only when all maximal chains have equal edge counts",
        ));
    }

    // Pull values into index order once; this also surfaces missing values
    // and comonotonicity violations before any chain work.
    let extract = |gf: &GradingFunction| -> Result<Vec<f64>> {
        poset
            .elements()
            .iter()
            .map(|e| gf.value(e).ok_or_else(|| Error::MissingValue(e.clone())))
            .collect()
    };
    let fv = extract(f)?;
    let gv = extract(g)?;
    for &(lo_i, hi_i) in poset.cover_indices() {
        for vals in [&fv, &gv] {
            if vals[lo_i] - vals[hi_i] > VALUE_TOLERANCE {
                return Err(Error::ComonotonicityViolation {
                    lower: poset.element_by_index(lo_i).clone(),
                    upper: poset.element_by_index(hi_i).clone(),
                    lower_value: vals[lo_i],
                    upper_value: vals[hi_i],
                });
            }
        }
    }

    let step = |vals: &[f64], a: usize, b: usize| -> f64 { (vals[b] - vals[a]).max(0.0) };
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut chain_count = 0usize;
    let mut poisoned = false;
    poset.for_each_maximal_chain(cap, |path| {
        chain_count += 1;
        let mut value = 0.0;
        for w in path.windows(2) {
            let df = step(&fv, w[0], w[1]);
            let dg = step(&gv, w[0], w[1]);
            if df > 0.0 {
                if dg == 0.0 {
                    poisoned = true;
                    return false;
                }
                value -= df * (df / dg).ln();
            }
        }
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, path.to_vec()));
        }
        true
    })?;

    if poisoned {
        return Ok(RdResult::undefined());
    }
    let (value, path) = best.expect("an [l-g] poset has at least one maximal chain");
    let witness_chain = (chain_count >= 2).then(|| {
        Chain::new(
            poset,
            path.iter()
                .map(|&i| poset.element_by_index(i).clone())
                .collect(),
        )
        .expect("enumerated path is a chain")
    });
    Ok(RdResult {
        value,
        witness_chain,
        undefined: false,
    })
}

/// Weights of two set functions over the blocks of a partition. Only the
/// weights enter the divergence; the blocks are kept to check that they
/// really partition the ground set.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionModel {
    blocks: Vec<BTreeSet<ElementId>>,
    f_weights: Vec<f64>,
    g_weights: Vec<f64>,
}

impl PartitionModel {
    pub fn new(
        blocks: Vec<BTreeSet<ElementId>>,
        f_weights: Vec<f64>,
        g_weights: Vec<f64>,
    ) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        if blocks.len() != f_weights.len() || blocks.len() != g_weights.len() {
            return Err(Error::InvalidPartition(format!(
                "{} blocks but {} f-weights and {} g-weights",
                blocks.len(),
                f_weights.len(),
                g_weights.len()
            )));
        }
        let mut seen: BTreeSet<&ElementId> = BTreeSet::new();
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {i} is empty")));
            }
            for member in block {
                if !seen.insert(member) {
                    return Err(Error::InvalidPartition(format!(
                        "element `{member}` appears in more than one block"
                    )));
                }
            }
        }
        for (name, weights) in [("f", &f_weights), ("g", &g_weights)] {
            for (i, &w) in weights.iter().enumerate() {
                if !w.is_finite() || w <= 0.0 {
                    return Err(Error::InvalidPartition(format!(
                        "{name}-weight {w} of block {i} is not positive"
                    )));
                }
            }
        }
        Ok(Self {
            blocks,
            f_weights,
            g_weights,
        })
    }

    /// A partition of anonymous singleton blocks s1..sK carrying the given
    /// weights; handy when only the weights matter.
    pub fn from_weights(f_weights: Vec<f64>, g_weights: Vec<f64>) -> Result<Self> {
        let blocks = (1..=f_weights.len())
            .map(|i| BTreeSet::from([ElementId::new(format!("s{i}"))]))
            .collect();
        Self::new(blocks, f_weights, g_weights)
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[BTreeSet<ElementId>] {
        &self.blocks
    }

    pub fn f_weights(&self) -> &[f64] {
        &self.f_weights
    }

    pub fn g_weights(&self) -> &[f64] {
        &self.g_weights
    }
}

/// Partition-induced divergence −Σ f(s_k) ln(f(s_k)/g(s_k)). With unit
/// g-weights this is the partition entropy of the f-weights.
pub fn rd_partition(model: &PartitionModel) -> f64 {
    model
        .f_weights
        .iter()
        .zip(&model.g_weights)
        .map(|(&f, &g)| -f * (f / g).ln())
        .sum()
}
