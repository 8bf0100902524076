//! JSON interchange formats consumed by the command-line tool.
//!
//! Posets: either an explicit Hasse diagram
//! `{"elements": ["a", ...], "covers": [["a","b"], ...]}` or a generative
//! form `{"powerset": ["a","b"]}` / `{"bundle": [2,3]}`.
//!
//! Grading functions: `{"values": {"<elementId>": <number>, ...}}` with
//! power-set subsets keyed by comma-joined sorted member names (empty
//! string for the empty set) and bundle elements keyed by comma-joined
//! coordinates such as "1,2".
//!
//! Group-test plans: `{"N": 10, "M": 10.0, "knots": [[0,0],[5,4],[10,10]],
//! "partition": [3,3,4]}` with knots and partition optional. Queue models:
//! `{"queues": [{"capacity": 2, "costs": [0,1,3]}, ...]}`.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::apps::{GroupTestPlan, QueueBundleModel, QueueSpec};
use crate::apps::{group_test_null, group_test_update};
use crate::error::{Error, Result};
use crate::poset::{bundle_poset, power_set_poset, ChainBundle, ElementId, Poset};
use crate::solve::KnotConstraints;

#[derive(Deserialize)]
#[serde(untagged)]
enum PosetFile {
    PowerSet { powerset: Vec<String> },
    Bundle { bundle: Vec<usize> },
    Explicit {
        elements: Vec<String>,
        covers: Vec<[String; 2]>,
    },
}

/// Parse a poset document in any of the three accepted forms.
pub fn poset_from_json(text: &str) -> Result<Poset> {
    let file: PosetFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("poset document: {e}")))?;
    match file {
        PosetFile::PowerSet { powerset } => {
            let ground: Vec<ElementId> = powerset.into_iter().map(ElementId::from).collect();
            power_set_poset(&ground)
        }
        PosetFile::Bundle { bundle } => bundle_poset(&ChainBundle::new(bundle)?),
        PosetFile::Explicit { elements, covers } => Poset::new(
            elements.into_iter().map(ElementId::from),
            covers
                .into_iter()
                .map(|[lo, hi]| (ElementId::from(lo), ElementId::from(hi))),
        ),
    }
}

#[derive(Deserialize)]
struct GradingFile {
    values: BTreeMap<String, f64>,
}

/// Parse a grading-function document into its raw value map; validation
/// against a poset happens separately.
pub fn grading_values_from_json(text: &str) -> Result<BTreeMap<ElementId, f64>> {
    let file: GradingFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("grading document: {e}")))?;
    Ok(file
        .values
        .into_iter()
        .map(|(k, v)| (ElementId::from(k), v))
        .collect())
}

#[derive(Deserialize)]
struct PlanFile {
    #[serde(rename = "N")]
    population: usize,
    #[serde(rename = "M")]
    budget: f64,
    #[serde(default)]
    knots: Option<Vec<(usize, f64)>>,
    #[serde(default)]
    partition: Option<Vec<usize>>,
}

/// Parse a group-test plan document: the null plan for (N, M), updated with
/// the file's knots when present. Endpoint knots (0,0) and (N,M) may be
/// omitted and are filled in; a conflicting endpoint is an error surfaced
/// by the update itself.
pub fn plan_from_json(text: &str) -> Result<GroupTestPlan> {
    let file: PlanFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("plan document: {e}")))?;
    let mut plan = group_test_null(file.population, file.budget)?;
    if let Some(knots) = file.knots {
        let full = complete_knots(knots, file.population, file.budget)?;
        plan = group_test_update(&plan, &full)?;
    }
    if let Some(partition) = file.partition {
        plan = plan.with_partition(partition)?;
    }
    Ok(plan)
}

/// Fill in missing endpoint knots (0, 0) and (n, budget); explicit endpoint
/// knots are kept as given so inconsistencies fail loudly downstream.
/// Repeated observations of the same position must agree: two groups of
/// equal size with different costs cannot both be pinned by a
/// cardinality-dependent model.
pub fn complete_knots(
    mut knots: Vec<(usize, f64)>,
    n: usize,
    budget: f64,
) -> Result<KnotConstraints> {
    knots.sort_by_key(|a| a.0);
    for pair in knots.windows(2) {
        let ((p0, v0), (p1, v1)) = (pair[0], pair[1]);
        if p0 == p1 && (v0 - v1).abs() > 1e-12 {
            return Err(Error::InvalidKnots(format!(
                "conflicting observed costs for size {p0}: {v0} vs {v1}; \
                 a size-dependent cost model cannot fit both"
            )));
        }
    }
    knots.dedup_by_key(|k| k.0);
    if knots.first().is_none_or(|&(pos, _)| pos != 0) {
        knots.insert(0, (0, 0.0));
    }
    if knots.last().is_none_or(|&(pos, _)| pos != n) {
        knots.push((n, budget));
    }
    KnotConstraints::new(knots)
}

#[derive(Deserialize)]
struct QueueFile {
    capacity: usize,
    costs: Vec<f64>,
}

#[derive(Deserialize)]
struct QueueModelFile {
    queues: Vec<QueueFile>,
}

/// Parse a queue-bundle model document.
pub fn queue_model_from_json(text: &str) -> Result<QueueBundleModel> {
    let file: QueueModelFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("queue model document: {e}")))?;
    let queues = file
        .queues
        .into_iter()
        .map(|q| QueueSpec::new(q.capacity, q.costs))
        .collect::<Result<Vec<_>>>()?;
    QueueBundleModel::new(queues)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_explicit_poset() {
        let poset = poset_from_json(
            r#"{"elements": ["l", "a", "b", "g"],
                "covers": [["l","a"], ["l","b"], ["a","g"], ["b","g"]]}"#,
        )
        .unwrap();
        assert_eq!(poset.len(), 4);
        assert!(poset.is_cover(&"l".into(), &"a".into()));
    }

    #[test]
    fn parses_generative_posets() {
        let ps = poset_from_json(r#"{"powerset": ["a", "b"]}"#).unwrap();
        assert_eq!(ps.len(), 4);
        let bundle = poset_from_json(r#"{"bundle": [2, 3]}"#).unwrap();
        assert_eq!(bundle.len(), 12);
    }

    #[test]
    fn rejects_malformed_poset_documents() {
        assert!(matches!(
            poset_from_json(r#"{"nonsense": 1}"#).unwrap_err(),
            Error::Parse(_)
        ));
        assert!(poset_from_json("not json").is_err());
    }

    #[test]
    fn parses_grading_values() {
        let values =
            grading_values_from_json(r#"{"values": {"": 0.0, "a": 0.5, "b": 0.5, "a,b": 1.0}}"#)
                .unwrap();
        assert_eq!(values.len(), 4);
        assert_eq!(values[&ElementId::from("a")], 0.5);
    }

    #[test]
    fn parses_plan_with_knots_and_partition() {
        let plan = plan_from_json(
            r#"{"N": 10, "M": 10.0, "knots": [[5, 4.0]], "partition": [5, 5]}"#,
        )
        .unwrap();
        let slopes: Vec<f64> = plan.cost_fn().segments().iter().map(|s| s.slope).collect();
        assert_eq!(slopes, vec![0.8, 1.2]);
        assert_eq!(plan.partition(), Some(&[5usize, 5][..]));
    }

    #[test]
    fn plan_endpoints_are_completed_but_not_overwritten() {
        let plan = plan_from_json(r#"{"N": 4, "M": 2.0, "knots": [[2, 1.0]]}"#).unwrap();
        assert_eq!(plan.cost_fn().eval(0), 0.0);
        assert_eq!(plan.cost_fn().eval(4), 2.0);

        let conflicting = plan_from_json(r#"{"N": 4, "M": 2.0, "knots": [[4, 1.0]]}"#);
        assert!(conflicting.is_err());
    }

    #[test]
    fn conflicting_equal_size_observations_are_rejected() {
        let err = complete_knots(vec![(5, 4.0), (5, 6.0)], 10, 10.0).unwrap_err();
        assert!(err.to_string().contains("conflicting observed costs"));
        // agreeing duplicates collapse into one knot
        let ok = complete_knots(vec![(5, 4.0), (5, 4.0)], 10, 10.0).unwrap();
        assert_eq!(ok.knots(), &[(0, 0.0), (5, 4.0), (10, 10.0)]);
    }

    #[test]
    fn parses_queue_model() {
        let model = queue_model_from_json(
            r#"{"queues": [{"capacity": 2, "costs": [0, 1, 3]},
                           {"capacity": 1, "costs": [0, 2]}]}"#,
        )
        .unwrap();
        assert_eq!(model.queues().len(), 2);
        assert_eq!(model.bundle().dims(), &[2, 1]);
    }
}
