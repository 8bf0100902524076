//! End-to-end application drivers: population group-testing cost updating
//! on the power-set model, and batch costing on a bundle of queues with
//! inference of the least-presuming server-type distribution.

use serde::Serialize;

use crate::divergence::{rd_partition, PartitionModel};
use crate::error::{Error, Result};
use crate::grading::{IncrementSequence, VALUE_TOLERANCE};
use crate::poset::{ChainBundle, VectorIndex};
use crate::solve::{
    solve_cardinality_dependent, solve_interpolation, solve_type_distribution, KnotConstraints,
    PiecewiseLinearGF, QueueTypeParams, TypeDistribution, TypeParams,
};

/// A group-testing cost plan: the current least-presuming cost model
/// F(|w|) on groups from a population of size N under budget M, plus an
/// audit trail of every update applied so a plan can be reproduced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupTestPlan {
    population: usize,
    budget: f64,
    cost_fn: PiecewiseLinearGF,
    partition: Option<Vec<usize>>,
    history: Vec<PlanUpdate>,
}

/// One update step: the knots that were fixed and the model they produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanUpdate {
    pub knots: Vec<(usize, f64)>,
    pub cost_fn: PiecewiseLinearGF,
}

impl GroupTestPlan {
    pub fn population(&self) -> usize {
        self.population
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn cost_fn(&self) -> &PiecewiseLinearGF {
        &self.cost_fn
    }

    pub fn partition(&self) -> Option<&[usize]> {
        self.partition.as_deref()
    }

    pub fn with_partition(mut self, partition: Vec<usize>) -> Result<Self> {
        check_partition(self.population, &partition)?;
        self.partition = Some(partition);
        Ok(self)
    }

    pub fn history(&self) -> &[PlanUpdate] {
        &self.history
    }
}

/// The least-presuming null plan: linear cost G(w) = |w|·M/N.
pub fn group_test_null(population: usize, budget: f64) -> Result<GroupTestPlan> {
    if population == 0 {
        return Err(Error::InvalidArgument(
            "population must have at least one subject".into(),
        ));
    }
    if !budget.is_finite() || budget <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "budget must be positive, got {budget}"
        )));
    }
    Ok(GroupTestPlan {
        population,
        budget,
        cost_fn: solve_cardinality_dependent(population, budget, None)?,
        partition: None,
        history: Vec::new(),
    })
}

/// Update a plan with newly fixed group costs: the cost model is replaced
/// by the piecewise-linear divergence maximizer through the fixed knots,
/// which must include the endpoints (0, 0) and (N, M). The previous model
/// stays recoverable through the audit trail.
pub fn group_test_update(plan: &GroupTestPlan, fixed_costs: &KnotConstraints) -> Result<GroupTestPlan> {
    if fixed_costs.first_value().abs() > VALUE_TOLERANCE {
        return Err(Error::InvalidKnots(format!(
            "a group of size 0 costs 0, got {}",
            fixed_costs.first_value()
        )));
    }
    if fixed_costs.last_position() != plan.population {
        return Err(Error::InvalidKnots(format!(
            "last knot must sit at the population size {}, got {}",
            plan.population,
            fixed_costs.last_position()
        )));
    }
    if (fixed_costs.last_value() - plan.budget).abs() > VALUE_TOLERANCE {
        return Err(Error::InvalidKnots(format!(
            "testing everyone must cost the budget {}, got {}",
            plan.budget,
            fixed_costs.last_value()
        )));
    }
    let cost_fn = solve_interpolation(plan.population, fixed_costs)?;
    let mut history = plan.history.clone();
    history.push(PlanUpdate {
        knots: fixed_costs.knots().to_vec(),
        cost_fn: cost_fn.clone(),
    });
    Ok(GroupTestPlan {
        population: plan.population,
        budget: plan.budget,
        cost_fn,
        partition: plan.partition.clone(),
        history,
    })
}

fn check_partition(population: usize, sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::InvalidPartition("no groups".into()));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidPartition("groups must be non-empty".into()));
    }
    let total: usize = sizes.iter().sum();
    if total != population {
        return Err(Error::InvalidPartition(format!(
            "group sizes sum to {total}, expected the population size {population}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupCost {
    pub size: usize,
    pub cost: f64,
}

/// Per-group costs of a partition plus the partition-induced divergence of
/// the cost weights against uniform weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionCostReport {
    pub groups: Vec<GroupCost>,
    /// Partition-induced divergence of the normalized cost weights from
    /// unit weights; with weights summing to one this is partition entropy.
    pub rd: f64,
    /// How the weights were normalized, echoed so the report is
    /// self-describing.
    pub weight_normalization: &'static str,
}

/// Cost each group of the partition under the plan's current model and
/// report the partition-induced divergence of the cost shares.
pub fn group_test_partition_costs(
    plan: &GroupTestPlan,
    partition: &[usize],
) -> Result<PartitionCostReport> {
    check_partition(plan.population, partition)?;
    let groups: Vec<GroupCost> = partition
        .iter()
        .map(|&size| GroupCost {
            size,
            cost: plan.cost_fn.eval(size),
        })
        .collect();
    let weights: Vec<f64> = groups.iter().map(|g| g.cost / plan.budget).collect();
    if let Some(bad) = groups.iter().find(|g| g.cost <= 0.0) {
        return Err(Error::InvalidPartition(format!(
            "group of size {} has non-positive cost {}, so its weight is inadmissible",
            bad.size, bad.cost
        )));
    }
    let model = PartitionModel::from_weights(weights, vec![1.0; groups.len()])?;
    Ok(PartitionCostReport {
        groups,
        rd: rd_partition(&model),
        weight_normalization: "cost shares: each group cost divided by the total budget",
    })
}

/// One queue of the bundle model: a chain of 0..=capacity group sizes and
/// the non-decreasing service cost at each size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueueSpec {
    capacity: usize,
    costs: Vec<f64>,
}

impl QueueSpec {
    pub fn new(capacity: usize, costs: Vec<f64>) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidQueueModel(
                "queue capacity must be at least 1".into(),
            ));
        }
        if costs.len() != capacity + 1 {
            return Err(Error::InvalidQueueModel(format!(
                "capacity {capacity} needs {} cost values, got {}",
                capacity + 1,
                costs.len()
            )));
        }
        for (i, &c) in costs.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::InvalidQueueModel(format!(
                    "cost {c} at batch size {i} is not finite"
                )));
            }
        }
        for (i, pair) in costs.windows(2).enumerate() {
            if pair[0] - pair[1] > VALUE_TOLERANCE {
                return Err(Error::InvalidQueueModel(format!(
                    "costs must not decrease with batch size: {} at {} vs {} at {}",
                    pair[0],
                    i,
                    pair[1],
                    i + 1
                )));
            }
        }
        Ok(Self { capacity, costs })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn min_cost(&self) -> f64 {
        self.costs[0]
    }

    pub fn max_cost(&self) -> f64 {
        self.costs[self.capacity]
    }

    pub fn span(&self) -> f64 {
        self.max_cost() - self.min_cost()
    }
}

/// A single server forming batches from K separate queues; the conjoined
/// state space is the bundle of the queue chains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueueBundleModel {
    queues: Vec<QueueSpec>,
}

impl QueueBundleModel {
    pub fn new(queues: Vec<QueueSpec>) -> Result<Self> {
        if queues.is_empty() {
            return Err(Error::InvalidQueueModel("need at least one queue".into()));
        }
        Ok(Self { queues })
    }

    pub fn queues(&self) -> &[QueueSpec] {
        &self.queues
    }

    pub fn bundle(&self) -> ChainBundle {
        ChainBundle::new(self.queues.iter().map(|q| q.capacity).collect())
            .expect("capacities are validated positive")
    }
}

/// Cost of one batch: the separable sum Σ F_k(i_k), probability-weighted
/// when a type distribution is supplied.
pub fn batch_cost(
    model: &QueueBundleModel,
    batch: &VectorIndex,
    type_probs: Option<&TypeDistribution>,
) -> Result<f64> {
    if batch.coords().len() != model.queues.len() {
        return Err(Error::InvalidArgument(format!(
            "batch has {} coordinates for {} queues",
            batch.coords().len(),
            model.queues.len()
        )));
    }
    if let Some(dist) = type_probs {
        if dist.p().len() != model.queues.len() {
            return Err(Error::InvalidArgument(format!(
                "type distribution has {} entries for {} queues",
                dist.p().len(),
                model.queues.len()
            )));
        }
    }
    let mut total = 0.0;
    for (k, (&size, queue)) in batch.coords().iter().zip(&model.queues).enumerate() {
        if size > queue.capacity {
            return Err(Error::CapacityExceeded {
                queue: k,
                coord: size,
                capacity: queue.capacity,
            });
        }
        let weight = type_probs.map_or(1.0, |d| d.p()[k]);
        total += weight * queue.costs[size];
    }
    Ok(total)
}

/// Divergence of one queue's cost grading from the natural grading on its
/// chain: the increments scored against unit null increments.
pub fn queue_divergence(queue: &QueueSpec) -> Result<f64> {
    let increments: Vec<f64> = queue.costs.windows(2).map(|w| w[1] - w[0]).collect();
    let ones = vec![1.0; increments.len()];
    Ok(crate::divergence::rd_chain(&IncrementSequence::new(
        increments, ones,
    )?))
}

/// The least-presuming distribution of the server's type: each queue
/// contributes its cost divergence D_k and span M_k − m_k, and the Lagrange
/// solver turns those into probabilities.
pub fn infer_type_distribution(model: &QueueBundleModel) -> Result<TypeDistribution> {
    let mut types = Vec::with_capacity(model.queues.len());
    for (k, queue) in model.queues.iter().enumerate() {
        if queue.span() <= VALUE_TOLERANCE {
            return Err(Error::InvalidQueueModel(format!(
                "queue {k} has a degenerate cost span ({} to {})",
                queue.min_cost(),
                queue.max_cost()
            )));
        }
        types.push(TypeParams {
            divergence: queue_divergence(queue)?,
            span: queue.span(),
        });
    }
    solve_type_distribution(&QueueTypeParams::new(types)?)
}
