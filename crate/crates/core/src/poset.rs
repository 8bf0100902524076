//! Finite posets represented by their Hasse diagrams (cover edges), with
//! maximal-chain enumeration, structural classification, [l-g] enclosure,
//! and the two generated families used throughout: power sets ordered by
//! inclusion and direct products of chains ("bundles").

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on maximal-chain enumeration. Chain counts are factorial in
/// poset size, so enumeration fails loudly instead of running away.
pub const DEFAULT_CHAIN_CAP: usize = 1_000_000;

/// Largest ground set accepted by [`power_set_poset`] (2^16 subsets).
pub const MAX_POWER_SET_GROUND: usize = 16;

/// Cap on the element count of a generated bundle poset.
pub const MAX_BUNDLE_ELEMENTS: u128 = 1_000_000;

/// Opaque element identifier. Only the order relation of the host poset
/// carries meaning; the lexicographic order on identifiers is used purely
/// for deterministic iteration and tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(String);

impl ElementId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl From<String> for ElementId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

/// Identifier of a subset: member names sorted and joined with commas, the
/// empty string standing for the empty set.
pub fn subset_id<'a, I>(members: I) -> ElementId
where
    I: IntoIterator<Item = &'a str>,
{
    let mut names: Vec<&str> = members.into_iter().collect();
    names.sort_unstable();
    ElementId(names.join(","))
}

/// A finite poset stored as its Hasse diagram: the element list plus the
/// cover edges. The full order relation is reachability over covers.
///
/// Construction validates that the cover relation is acyclic and that no
/// cover edge is implied by transitivity (a true Hasse diagram); transitive
/// edges are rejected rather than silently reduced, since dropping or
/// keeping them changes chain lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Poset {
    /// Sorted lexicographically; indices below refer to this order.
    elements: Vec<ElementId>,
    covers: Vec<(usize, usize)>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

impl Poset {
    pub fn new<E, C>(elements: E, covers: C) -> Result<Self>
    where
        E: IntoIterator<Item = ElementId>,
        C: IntoIterator<Item = (ElementId, ElementId)>,
    {
        let poset = Self::assemble(elements, covers)?;
        poset.check_acyclic()?;
        poset.check_transitively_reduced()?;
        Ok(poset)
    }

    /// Construction for covers that are a Hasse diagram by the way they
    /// were generated (power sets, bundles, [l-g] enclosures); skips the
    /// acyclicity and transitive-reduction passes, which are quadratic in
    /// the worst case and pointless for structurally valid input.
    fn from_generated<E, C>(elements: E, covers: C) -> Result<Self>
    where
        E: IntoIterator<Item = ElementId>,
        C: IntoIterator<Item = (ElementId, ElementId)>,
    {
        Self::assemble(elements, covers)
    }

    fn assemble<E, C>(elements: E, covers: C) -> Result<Self>
    where
        E: IntoIterator<Item = ElementId>,
        C: IntoIterator<Item = (ElementId, ElementId)>,
    {
        let mut elems: Vec<ElementId> = elements.into_iter().collect();
        if elems.is_empty() {
            return Err(Error::EmptyPoset);
        }
        elems.sort_unstable();
        for pair in elems.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateElement(pair[0].clone()));
            }
        }

        let index: BTreeMap<&ElementId, usize> =
            elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut edges = Vec::new();
        for (lo, hi) in covers {
            let li = *index
                .get(&lo)
                .ok_or_else(|| Error::UnknownElement(lo.clone()))?;
            let hi_i = *index
                .get(&hi)
                .ok_or_else(|| Error::UnknownElement(hi.clone()))?;
            edges.push((li, hi_i));
        }
        edges.sort_unstable();
        for pair in edges.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateCover(
                    elems[pair[0].0].clone(),
                    elems[pair[0].1].clone(),
                ));
            }
        }
        Ok(Self::from_parts(elems, edges))
    }

    /// Assemble adjacency from sorted, deduplicated parts. Callers that
    /// generate covers structurally (power sets, bundles, enclosures) skip
    /// the expensive Hasse validation.
    fn from_parts(elements: Vec<ElementId>, covers: Vec<(usize, usize)>) -> Self {
        let n = elements.len();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for &(lo, hi) in &covers {
            up[lo].push(hi);
            down[hi].push(lo);
        }
        // Neighbor lists sorted by index = sorted by identifier, which is
        // what makes enumeration order lexicographic.
        for list in up.iter_mut().chain(down.iter_mut()) {
            list.sort_unstable();
        }
        Self {
            elements,
            covers,
            up,
            down,
        }
    }

    fn check_acyclic(&self) -> Result<()> {
        let n = self.elements.len();
        let mut indegree: Vec<usize> = (0..n).map(|i| self.down[i].len()).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut seen = 0usize;
        while let Some(v) = queue.pop() {
            seen += 1;
            for &w in &self.up[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push(w);
                }
            }
        }
        if seen == n {
            Ok(())
        } else {
            let culprit = (0..n).find(|&i| indegree[i] > 0).expect("cycle member");
            Err(Error::CyclicCovers(self.elements[culprit].clone()))
        }
    }

    fn check_transitively_reduced(&self) -> Result<()> {
        // (u, v) is transitive iff v is reachable from u through >= 2 cover
        // edges. Acyclicity guarantees such a path never reuses (u, v), so
        // marking everything discovered at depth >= 2 suffices.
        let n = self.elements.len();
        let mut seen_from = vec![usize::MAX; n];
        let mut stack: Vec<usize> = Vec::new();
        for (u, ups) in self.up.iter().enumerate() {
            stack.clear();
            for &w in ups {
                for &x in &self.up[w] {
                    if seen_from[x] != u {
                        seen_from[x] = u;
                        stack.push(x);
                    }
                }
            }
            while let Some(x) = stack.pop() {
                for &y in &self.up[x] {
                    if seen_from[y] != u {
                        seen_from[y] = u;
                        stack.push(y);
                    }
                }
            }
            for &v in ups {
                if seen_from[v] == u {
                    return Err(Error::TransitiveCover(
                        self.elements[u].clone(),
                        self.elements[v].clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in lexicographic identifier order.
    pub fn elements(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn contains(&self, id: &ElementId) -> bool {
        self.index_of(id).is_some()
    }

    pub fn index_of(&self, id: &ElementId) -> Option<usize> {
        self.elements.binary_search(id).ok()
    }

    pub fn cover_count(&self) -> usize {
        self.covers.len()
    }

    pub fn cover_pairs(&self) -> impl Iterator<Item = (&ElementId, &ElementId)> {
        self.covers
            .iter()
            .map(|&(lo, hi)| (&self.elements[lo], &self.elements[hi]))
    }

    pub fn is_cover(&self, lower: &ElementId, upper: &ElementId) -> bool {
        match (self.index_of(lower), self.index_of(upper)) {
            (Some(lo), Some(hi)) => self.up[lo].binary_search(&hi).is_ok(),
            _ => false,
        }
    }

    /// Elements covering `id`, in identifier order.
    pub fn upper_covers(&self, id: &ElementId) -> Option<Vec<&ElementId>> {
        let i = self.index_of(id)?;
        Some(self.up[i].iter().map(|&j| &self.elements[j]).collect())
    }

    pub fn minimal_elements(&self) -> Vec<&ElementId> {
        (0..self.elements.len())
            .filter(|&i| self.down[i].is_empty())
            .map(|i| &self.elements[i])
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<&ElementId> {
        (0..self.elements.len())
            .filter(|&i| self.up[i].is_empty())
            .map(|i| &self.elements[i])
            .collect()
    }

    fn minimal_indices(&self) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&i| self.down[i].is_empty())
            .collect()
    }

    fn maximal_indices(&self) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&i| self.up[i].is_empty())
            .collect()
    }

    /// Indices in a topological order of the cover digraph.
    fn topological_order(&self) -> Vec<usize> {
        let n = self.elements.len();
        let mut indegree: Vec<usize> = (0..n).map(|i| self.down[i].len()).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            order.push(v);
            for &w in &self.up[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push(w);
                }
            }
        }
        debug_assert_eq!(order.len(), n);
        order
    }

    /// Distance-from-lowest rank of every element, if the poset has a
    /// unique minimal element and the rank is consistent across covers
    /// (every cover raises it by exactly 1). The latter holds exactly when
    /// all maximal chains between fixed endpoints have equal edge counts.
    pub(crate) fn rank_levels(&self) -> Option<Vec<usize>> {
        if self.minimal_indices().len() != 1 {
            return None;
        }
        let n = self.elements.len();
        let mut rank = vec![usize::MAX; n];
        for v in self.topological_order() {
            if self.down[v].is_empty() {
                rank[v] = 0;
                continue;
            }
            let mut level = None;
            for &u in &self.down[v] {
                let candidate = rank[u] + 1;
                match level {
                    None => level = Some(candidate),
                    Some(l) if l != candidate => return None,
                    Some(_) => {}
                }
            }
            rank[v] = level.expect("non-minimal element has a predecessor");
        }
        Some(rank)
    }

    /// Structural flags: unique bottom/top, and whether all maximal chains
    /// share one edge count. Computed via a rank-consistency pass, which
    /// agrees with chain enumeration without the factorial cost.
    pub fn classify(&self) -> PosetClassification {
        let has_lowest = self.minimal_indices().len() == 1;
        let maximals = self.maximal_indices();
        let has_greatest = maximals.len() == 1;
        let common_chain_length = if has_lowest && has_greatest {
            self.rank_levels().map(|ranks| ranks[maximals[0]])
        } else {
            None
        };
        PosetClassification {
            has_lowest,
            has_greatest,
            is_even_sided: common_chain_length.is_some(),
            common_chain_length,
        }
    }

    /// The minimal [l-g] order-enclosure: the poset itself when it already
    /// has a lowest and a greatest element, otherwise a copy augmented with
    /// a fresh bottom under all minimal elements and/or a fresh top over
    /// all maximal elements.
    pub fn lg_enclosure(&self) -> Poset {
        let minimals = self.minimal_elements();
        let maximals = self.maximal_elements();
        let need_bottom = minimals.len() != 1;
        let need_top = maximals.len() != 1;
        if !need_bottom && !need_top {
            return self.clone();
        }

        let mut elements: Vec<ElementId> = self.elements.clone();
        let mut covers: Vec<(ElementId, ElementId)> = self
            .cover_pairs()
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        if need_bottom {
            let bottom = self.fresh_id("l");
            for m in &minimals {
                covers.push((bottom.clone(), (*m).clone()));
            }
            elements.push(bottom);
        }
        if need_top {
            let top = self.fresh_id("g");
            for m in &maximals {
                covers.push(((*m).clone(), top.clone()));
            }
            elements.push(top);
        }
        // Fresh endpoints cannot introduce cycles or transitive covers.
        Poset::from_generated(elements, covers).expect("enclosure of a valid poset is valid")
    }

    fn fresh_id(&self, base: &str) -> ElementId {
        let mut candidate = base.to_owned();
        while self.contains(&ElementId(candidate.clone())) {
            candidate.push('_');
        }
        ElementId(candidate)
    }

    /// Visit every maximal chain (as a slice of element indices) in
    /// lexicographic identifier-sequence order. The visitor returns `false`
    /// to stop early. Errors out once more than `cap` chains are produced.
    pub(crate) fn for_each_maximal_chain<F>(&self, cap: usize, mut visit: F) -> Result<()>
    where
        F: FnMut(&[usize]) -> bool,
    {
        let mut count = 0usize;
        for start in self.minimal_indices() {
            let mut path = vec![start];
            let mut cursor = vec![0usize];
            while let Some(&node) = path.last() {
                let child = *cursor.last().expect("cursor tracks path");
                let ups = &self.up[node];
                if ups.is_empty() {
                    count += 1;
                    if count > cap {
                        return Err(Error::ChainCapExceeded { cap });
                    }
                    if !visit(&path) {
                        return Ok(());
                    }
                    path.pop();
                    cursor.pop();
                } else if child < ups.len() {
                    *cursor.last_mut().expect("cursor tracks path") += 1;
                    path.push(ups[child]);
                    cursor.push(0);
                } else {
                    path.pop();
                    cursor.pop();
                }
            }
        }
        Ok(())
    }

    /// All maximal chains, each an inextensible path of cover edges, in
    /// deterministic lexicographic order, subject to [`DEFAULT_CHAIN_CAP`].
    pub fn enumerate_maximal_chains(&self) -> Result<Vec<Chain>> {
        self.enumerate_maximal_chains_capped(DEFAULT_CHAIN_CAP)
    }

    pub fn enumerate_maximal_chains_capped(&self, cap: usize) -> Result<Vec<Chain>> {
        let mut chains = Vec::new();
        self.for_each_maximal_chain(cap, |path| {
            chains.push(Chain {
                path: path.iter().map(|&i| self.elements[i].clone()).collect(),
            });
            true
        })?;
        Ok(chains)
    }

    pub(crate) fn element_by_index(&self, i: usize) -> &ElementId {
        &self.elements[i]
    }

    pub(crate) fn cover_indices(&self) -> &[(usize, usize)] {
        &self.covers
    }
}

/// A path of cover edges in some host poset; at least one element, and
/// consecutive entries are cover-related.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Chain {
    path: Vec<ElementId>,
}

impl Chain {
    pub fn new(poset: &Poset, path: Vec<ElementId>) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::InvalidChain("a chain has at least one element".into()));
        }
        for id in &path {
            if !poset.contains(id) {
                return Err(Error::InvalidChain(format!(
                    "element `{id}` is not in the poset"
                )));
            }
        }
        for pair in path.windows(2) {
            if !poset.is_cover(&pair[0], &pair[1]) {
                return Err(Error::InvalidChain(format!(
                    "({}, {}) is not a cover edge",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self { path })
    }

    pub fn path(&self) -> &[ElementId] {
        &self.path
    }

    pub fn edge_count(&self) -> usize {
        self.path.len() - 1
    }
}

/// Structural flags of a poset; `common_chain_length` counts cover edges
/// and is present exactly when the poset is even-sided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PosetClassification {
    pub has_lowest: bool,
    pub has_greatest: bool,
    pub is_even_sided: bool,
    pub common_chain_length: Option<usize>,
}

/// Dimensions of a direct product of finite chains: `dims[k]` is the edge
/// count of the k-th component chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ChainBundle {
    dims: Vec<usize>,
}

impl ChainBundle {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidBundle("a bundle needs at least one chain".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidBundle(
                "every component chain needs at least one edge".into(),
            ));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of component chains, K.
    pub fn arm_count(&self) -> usize {
        self.dims.len()
    }

    /// Total height Q = n_1 + … + n_K; every maximal chain of the bundle
    /// poset has exactly Q edges.
    pub fn total_height(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn element_count(&self) -> u128 {
        self.dims.iter().map(|&n| n as u128 + 1).product()
    }

    pub fn contains(&self, index: &VectorIndex) -> bool {
        index.coords.len() == self.dims.len()
            && index.coords.iter().zip(&self.dims).all(|(&i, &n)| i <= n)
    }

    /// All vector indices of the bundle, odometer order (last coordinate
    /// fastest).
    pub fn vector_indices(&self) -> Vec<VectorIndex> {
        let mut out = Vec::new();
        let mut coords = vec![0usize; self.dims.len()];
        loop {
            out.push(VectorIndex::new(coords.clone()));
            let mut k = self.dims.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if coords[k] < self.dims[k] {
                    coords[k] += 1;
                    break;
                }
                coords[k] = 0;
            }
        }
    }
}

/// Coordinates of one element of a bundle poset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct VectorIndex {
    coords: Vec<usize>,
}

impl VectorIndex {
    pub fn new(coords: Vec<usize>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    /// Height N = i_1 + … + i_K.
    pub fn height(&self) -> usize {
        self.coords.iter().sum()
    }

    /// Identifier used for bundle poset elements: coordinates joined with
    /// commas, e.g. "1,2".
    pub fn element_id(&self) -> ElementId {
        ElementId(
            self.coords
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(","),
        )
    }
}

/// The power set of `ground` ordered by inclusion; covers are single-element
/// insertions. Subset identifiers follow [`subset_id`], which is why ground
/// names must be non-empty and comma-free.
pub fn power_set_poset(ground: &[ElementId]) -> Result<Poset> {
    if ground.len() > MAX_POWER_SET_GROUND {
        return Err(Error::ElementCapExceeded {
            required: 1u128 << ground.len(),
            cap: 1u128 << MAX_POWER_SET_GROUND,
        });
    }
    let mut names: Vec<&str> = Vec::with_capacity(ground.len());
    for id in ground {
        if id.as_str().is_empty() {
            return Err(Error::InvalidIdentifier {
                id: String::new(),
                reason: "ground element names must be non-empty",
            });
        }
        if id.as_str().contains(',') {
            return Err(Error::InvalidIdentifier {
                id: id.as_str().to_owned(),
                reason: "ground element names must not contain commas",
            });
        }
        names.push(id.as_str());
    }
    names.sort_unstable();
    for pair in names.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::DuplicateElement(ElementId::new(pair[0])));
        }
    }

    let n = names.len();
    let id_of = |mask: usize| -> ElementId {
        subset_id((0..n).filter(|b| mask & (1 << b) != 0).map(|b| names[b]))
    };
    let mut elements = Vec::with_capacity(1 << n);
    let mut covers = Vec::new();
    for mask in 0..(1usize << n) {
        elements.push(id_of(mask));
        for b in 0..n {
            if mask & (1 << b) == 0 {
                covers.push((id_of(mask), id_of(mask | (1 << b))));
            }
        }
    }
    Poset::from_generated(elements, covers)
}

/// The bundle poset: elements are all vector indices, covers connect indices
/// differing by +1 in exactly one coordinate.
pub fn bundle_poset(bundle: &ChainBundle) -> Result<Poset> {
    let count = bundle.element_count();
    if count > MAX_BUNDLE_ELEMENTS {
        return Err(Error::ElementCapExceeded {
            required: count,
            cap: MAX_BUNDLE_ELEMENTS,
        });
    }
    let mut elements = Vec::with_capacity(count as usize);
    let mut covers = Vec::new();
    for index in bundle.vector_indices() {
        let id = index.element_id();
        for k in 0..bundle.arm_count() {
            if index.coords()[k] < bundle.dims()[k] {
                let mut next = index.coords().to_vec();
                next[k] += 1;
                covers.push((id.clone(), VectorIndex::new(next).element_id()));
            }
        }
        elements.push(id);
    }
    Poset::from_generated(elements, covers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(names: &[&str]) -> Vec<ElementId> {
        names.iter().map(|&n| ElementId::from(n)).collect()
    }

    fn chain_poset(names: &[&str]) -> Poset {
        let covers = names
            .windows(2)
            .map(|w| (ElementId::from(w[0]), ElementId::from(w[1])))
            .collect::<Vec<_>>();
        Poset::new(ids(names), covers).unwrap()
    }

    #[test]
    fn rejects_transitive_cover() {
        let err = Poset::new(
            ids(&["a", "b", "c"]),
            vec![
                ("a".into(), "b".into()),
                ("b".into(), "c".into()),
                ("a".into(), "c".into()),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::TransitiveCover(_, _)));
    }

    #[test]
    fn rejects_cycle() {
        let err = Poset::new(
            ids(&["a", "b"]),
            vec![("a".into(), "b".into()), ("b".into(), "a".into())],
        )
        .unwrap_err();
        assert!(matches!(err, Error::CyclicCovers(_)));
    }

    #[test]
    fn rejects_unknown_cover_endpoint() {
        let err = Poset::new(ids(&["a"]), vec![("a".into(), "z".into())]).unwrap_err();
        assert!(matches!(err, Error::UnknownElement(_)));
    }

    #[test]
    fn power_set_of_two_has_two_maximal_chains() {
        let poset = power_set_poset(&ids(&["a", "b"])).unwrap();
        assert_eq!(poset.len(), 4);
        assert_eq!(poset.cover_count(), 4);
        let chains = poset.enumerate_maximal_chains().unwrap();
        assert_eq!(chains.len(), 2);
        assert_eq!(
            chains[0].path(),
            &[ElementId::from(""), "a".into(), "a,b".into()]
        );
        assert_eq!(
            chains[1].path(),
            &[ElementId::from(""), "b".into(), "a,b".into()]
        );
    }

    #[test]
    fn single_chain_is_its_own_maximal_chain() {
        let poset = chain_poset(&["p", "q", "r", "s"]);
        let chains = poset.enumerate_maximal_chains().unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].edge_count(), 3);
    }

    #[test]
    fn power_set_of_three_has_six_chains_of_three_edges() {
        let poset = power_set_poset(&ids(&["a", "b", "c"])).unwrap();
        assert_eq!(poset.len(), 8);
        // n * 2^(n-1) single-element insertions
        assert_eq!(poset.cover_count(), 12);
        let chains = poset.enumerate_maximal_chains().unwrap();
        assert_eq!(chains.len(), 6);
        assert!(chains.iter().all(|c| c.edge_count() == 3));
    }

    #[test]
    fn enumeration_cap_is_loud() {
        let poset = power_set_poset(&ids(&["a", "b", "c"])).unwrap();
        let err = poset.enumerate_maximal_chains_capped(3).unwrap_err();
        assert!(matches!(err, Error::ChainCapExceeded { cap: 3 }));
        assert!(err.to_string().contains('3'));
    }

    #[test]
    fn classify_power_set() {
        let poset = power_set_poset(&ids(&["a", "b", "c"])).unwrap();
        let cls = poset.classify();
        assert!(cls.has_lowest && cls.has_greatest && cls.is_even_sided);
        assert_eq!(cls.common_chain_length, Some(3));
    }

    #[test]
    fn classify_bundle_three_by_two() {
        let bundle = ChainBundle::new(vec![3, 2]).unwrap();
        let poset = bundle_poset(&bundle).unwrap();
        let cls = poset.classify();
        assert!(cls.is_even_sided);
        assert_eq!(cls.common_chain_length, Some(5));
    }

    #[test]
    fn classify_two_maximal_elements() {
        let poset = Poset::new(
            ids(&["l", "a", "b"]),
            vec![("l".into(), "a".into()), ("l".into(), "b".into())],
        )
        .unwrap();
        let cls = poset.classify();
        assert!(cls.has_lowest);
        assert!(!cls.has_greatest);
        assert!(!cls.is_even_sided);
        assert_eq!(cls.common_chain_length, None);
    }

    #[test]
    fn uneven_diamond_is_not_even_sided() {
        // l -> a -> b -> g and l -> c -> g: chain lengths 3 and 2.
        let poset = Poset::new(
            ids(&["l", "a", "b", "c", "g"]),
            vec![
                ("l".into(), "a".into()),
                ("a".into(), "b".into()),
                ("b".into(), "g".into()),
                ("l".into(), "c".into()),
                ("c".into(), "g".into()),
            ],
        )
        .unwrap();
        let cls = poset.classify();
        assert!(cls.has_lowest && cls.has_greatest);
        assert!(!cls.is_even_sided);
    }

    #[test]
    fn lg_enclosure_of_antichain_is_diamond() {
        let poset = Poset::new(ids(&["a", "b"]), Vec::new()).unwrap();
        let enclosed = poset.lg_enclosure();
        assert_eq!(enclosed.len(), 4);
        assert_eq!(enclosed.cover_count(), 4);
        let cls = enclosed.classify();
        assert!(cls.has_lowest && cls.has_greatest && cls.is_even_sided);
        assert_eq!(cls.common_chain_length, Some(2));
    }

    #[test]
    fn lg_enclosure_is_identity_on_lg_posets() {
        let poset = chain_poset(&["a", "b", "c"]);
        assert_eq!(poset.lg_enclosure(), poset);
    }

    #[test]
    fn lg_enclosure_adds_only_missing_top() {
        let poset = Poset::new(
            ids(&["l", "a", "b"]),
            vec![("l".into(), "a".into()), ("l".into(), "b".into())],
        )
        .unwrap();
        let enclosed = poset.lg_enclosure();
        assert_eq!(enclosed.len(), 4);
        let cls = enclosed.classify();
        assert!(cls.has_lowest && cls.has_greatest);
        assert_eq!(
            enclosed.minimal_elements(),
            vec![&ElementId::from("l")],
            "original bottom is kept"
        );
    }

    #[test]
    fn lg_enclosure_avoids_identifier_collisions() {
        let poset = Poset::new(ids(&["g", "l"]), Vec::new()).unwrap();
        let enclosed = poset.lg_enclosure();
        assert_eq!(enclosed.len(), 4);
        assert!(enclosed.contains(&"l_".into()));
        assert!(enclosed.contains(&"g_".into()));
    }

    #[test]
    fn power_set_rejects_bad_ground() {
        assert!(matches!(
            power_set_poset(&ids(&["a", "a"])).unwrap_err(),
            Error::DuplicateElement(_)
        ));
        assert!(matches!(
            power_set_poset(&ids(&["a,b"])).unwrap_err(),
            Error::InvalidIdentifier { .. }
        ));
        let big: Vec<ElementId> = (0..17).map(|i| ElementId::new(format!("x{i}"))).collect();
        assert!(matches!(
            power_set_poset(&big).unwrap_err(),
            Error::ElementCapExceeded { .. }
        ));
    }

    #[test]
    fn power_set_of_one() {
        let poset = power_set_poset(&ids(&["a"])).unwrap();
        assert_eq!(poset.len(), 2);
        assert_eq!(poset.cover_count(), 1);
    }

    #[test]
    fn bundle_of_one_chain_is_a_chain() {
        let bundle = ChainBundle::new(vec![2]).unwrap();
        let poset = bundle_poset(&bundle).unwrap();
        assert_eq!(poset.len(), 3);
        assert_eq!(poset.enumerate_maximal_chains().unwrap().len(), 1);
    }

    #[test]
    fn bundle_one_one_is_diamond() {
        let bundle = ChainBundle::new(vec![1, 1]).unwrap();
        let poset = bundle_poset(&bundle).unwrap();
        assert_eq!(poset.len(), 4);
        assert_eq!(poset.cover_count(), 4);
        assert_eq!(poset.enumerate_maximal_chains().unwrap().len(), 2);
    }

    #[test]
    fn bundle_two_by_three() {
        let bundle = ChainBundle::new(vec![2, 3]).unwrap();
        let poset = bundle_poset(&bundle).unwrap();
        assert_eq!(poset.len(), 12);
        let chains = poset.enumerate_maximal_chains().unwrap();
        assert!(chains.iter().all(|c| c.edge_count() == 5));
        // Q! / (n_1! n_2!) = 120 / 12
        assert_eq!(chains.len(), 10);
    }

    #[test]
    fn bundle_cap_is_enforced() {
        let bundle = ChainBundle::new(vec![999, 999, 999]).unwrap();
        assert!(matches!(
            bundle_poset(&bundle).unwrap_err(),
            Error::ElementCapExceeded { .. }
        ));
    }

    #[test]
    fn chain_validation() {
        let poset = power_set_poset(&ids(&["a", "b"])).unwrap();
        assert!(Chain::new(&poset, vec!["".into(), "a".into(), "a,b".into()]).is_ok());
        assert!(Chain::new(&poset, vec!["".into(), "a,b".into()]).is_err());
        assert!(Chain::new(&poset, Vec::new()).is_err());
        assert!(Chain::new(&poset, vec!["zzz".into()]).is_err());
    }

    #[test]
    fn maximal_chains_of_lg_poset_run_bottom_to_top() {
        let bundle = ChainBundle::new(vec![2, 2]).unwrap();
        let poset = bundle_poset(&bundle).unwrap();
        for chain in poset.enumerate_maximal_chains().unwrap() {
            assert_eq!(chain.path().first().unwrap().as_str(), "0,0");
            assert_eq!(chain.path().last().unwrap().as_str(), "2,2");
        }
    }

    #[test]
    fn vector_index_height_and_id() {
        let v = VectorIndex::new(vec![1, 2, 0]);
        assert_eq!(v.height(), 3);
        assert_eq!(v.element_id().as_str(), "1,2,0");
    }
}
