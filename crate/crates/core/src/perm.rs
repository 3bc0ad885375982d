//! Finite permutations and permutation groups.
//!
//! Points are the integers `0..degree`. Groups carry a stabilizer chain
//! (Schreier-Sims), so order and membership queries are exact even when the
//! group is astronomically large: the chain for `Sym(18)` is a few kilobytes
//! while its order is 18!.
//!
//! Composition convention, used everywhere in this crate: `p.compose(&q)`
//! applies `p` first, then `q`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PermError {
    #[error("images {images:?} are not a bijection on 0..{degree}")]
    NotBijective { degree: usize, images: Vec<usize> },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("subgroup generators are not contained in the ambient group")]
    NotASubgroup,
    #[error("group order {order} exceeds enumeration cap {cap}")]
    EnumerationInfeasible { order: BigUint, cap: u64 },
    #[error("invalid group kind parameter: {0}")]
    InvalidKindParameter(String),
}

/// A permutation of `{0, …, degree−1}`, stored as its image list:
/// point `i` maps to `images[i]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Validates that `images` is a bijection on `0..images.len()`.
    pub fn new(images: Vec<usize>) -> Result<Self, PermError> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &y in &images {
            if y >= degree || seen[y] {
                return Err(PermError::NotBijective { degree, images });
            }
            seen[y] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from cycles; points not mentioned stay fixed.
    /// Overlapping or repeated points are rejected via the bijection check.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cyc in cycles {
            for (w, &from) in cyc.iter().enumerate() {
                let to = cyc[(w + 1) % cyc.len()];
                if from >= degree {
                    return Err(PermError::PointOutOfRange {
                        point: from,
                        degree,
                    });
                }
                images[from] = to;
            }
        }
        Self::new(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i == y)
    }

    /// Apply `self` first, then `other`. Panics on degree mismatch.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(
            self.degree(),
            other.degree(),
            "cannot compose permutations of different degrees"
        );
        Permutation {
            images: self.images.iter().map(|&y| other.images[y]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &y) in self.images.iter().enumerate() {
            images[y] = i;
        }
        Permutation { images }
    }

    /// `self` conjugated by `c`: applies `c⁻¹`, then `self`, then `c`.
    pub fn conjugate_by(&self, c: &Permutation) -> Permutation {
        c.inverse().compose(self).compose(c)
    }

    pub fn power(&self, e: i64) -> Permutation {
        let mut sq = if e < 0 { self.inverse() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&sq);
            }
            sq = sq.compose(&sq);
            k >>= 1;
        }
        acc
    }

    /// Multiplicative order: lcm of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycle_type()
            .into_iter()
            .fold(1u64, |acc, len| acc.lcm(&(len as u64)))
    }

    /// All cycle lengths (fixed points included), sorted ascending.
    /// Conjugation-invariant, so it doubles as a cheap conjugacy fingerprint.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lengths: Vec<usize> = self.raw_cycles().into_iter().map(|c| c.len()).collect();
        lengths.sort_unstable();
        lengths
    }

    /// Cycles of length ≥ 2, each starting at its least point, ordered by
    /// least point. Fixed points are omitted.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.raw_cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .collect()
    }

    fn raw_cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut cycles = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cyc.push(x);
                x = self.images[x];
            }
            cycles.push(cyc);
        }
        cycles
    }

    fn min_moved_point(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|&(i, &y)| i != y)
            .map(|(i, _)| i)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cyc in cycles {
            write!(f, "(")?;
            for (i, p) in cyc.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{self}]")
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(d)?;
        Permutation::new(images).map_err(serde::de::Error::custom)
    }
}

/// One level of a stabilizer chain: a base point, the transversal mapping
/// each orbit point `q` to an element carrying `point` to `q`, the
/// generators of this level's group, and the chain of the stabilizer of
/// `point` inside it.
#[derive(Clone)]
pub(crate) struct ChainNode {
    pub(crate) point: usize,
    pub(crate) transversal: BTreeMap<usize, Permutation>,
    pub(crate) gens: Vec<Permutation>,
    pub(crate) next: Option<Box<ChainNode>>,
}

impl ChainNode {
    pub(crate) fn new(degree: usize, point: usize) -> Self {
        let mut transversal = BTreeMap::new();
        transversal.insert(point, Permutation::identity(degree));
        ChainNode {
            point,
            transversal,
            gens: Vec::new(),
            next: None,
        }
    }

    fn sift(&self, g: &Permutation) -> Permutation {
        let y = g.apply(self.point);
        match self.transversal.get(&y) {
            None => g.clone(),
            Some(u) => {
                let stripped = g.compose(&u.inverse());
                match &self.next {
                    None => stripped,
                    Some(next) => next.sift(&stripped),
                }
            }
        }
    }

    /// Re-runs the orbit closure from `gens`, inserting every Schreier
    /// generator into the deeper chain. Pre/post-condition: every chain node
    /// below this one is closed, so sifting there is an exact membership test.
    fn close(&mut self, degree: usize) {
        let mut queue: VecDeque<usize> = self.transversal.keys().copied().collect();
        while let Some(p) = queue.pop_front() {
            for si in 0..self.gens.len() {
                let s = self.gens[si].clone();
                let t = self.transversal[&p].compose(&s);
                let q = t.apply(self.point);
                if let Some(uq) = self.transversal.get(&q) {
                    let residue = t.compose(&uq.inverse());
                    chain_insert(&mut self.next, degree, residue);
                } else {
                    self.transversal.insert(q, t);
                    queue.push_back(q);
                }
            }
        }
    }

    fn order(&self) -> BigUint {
        let own = BigUint::from(self.transversal.len());
        match &self.next {
            None => own,
            Some(next) => own * next.order(),
        }
    }
}

/// Inserts `g` as a generator of the group this (sub)chain describes,
/// creating the level if needed and restoring closure. No-op when `g` is
/// already a member; membership is exact because the chain below is closed.
pub(crate) fn chain_insert(slot: &mut Option<Box<ChainNode>>, degree: usize, g: Permutation) {
    match slot {
        None => {
            if g.is_identity() {
                return;
            }
            let point = g.min_moved_point().expect("non-identity moves a point");
            *slot = Some(Box::new(ChainNode::new(degree, point)));
        }
        Some(node) => {
            if node.sift(&g).is_identity() {
                return;
            }
        }
    }
    let node = slot.as_mut().expect("slot filled above");
    node.gens.push(g);
    node.close(degree);
}

/// A permutation group given by generators, with a stabilizer chain for
/// exact order and membership queries.
#[derive(Clone, Serialize)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    #[serde(skip)]
    chain: Option<Box<ChainNode>>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            chain: None,
        }
    }

    pub fn from_generators(degree: usize, gens: &[Permutation]) -> Result<Self, PermError> {
        let mut kept: Vec<Permutation> = Vec::new();
        for g in gens {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch(degree, g.degree()));
            }
            if !g.is_identity() && !kept.contains(g) {
                kept.push(g.clone());
            }
        }
        let mut chain: Option<Box<ChainNode>> = None;
        // Deterministic base: the root point is the least point moved by any
        // generator; deeper points are least-moved among the residues.
        if let Some(root_point) = kept.iter().filter_map(|g| g.min_moved_point()).min() {
            chain = Some(Box::new(ChainNode::new(degree, root_point)));
        }
        for g in &kept {
            chain_insert(&mut chain, degree, g.clone());
        }
        Ok(PermGroup {
            degree,
            generators: kept,
            chain,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn order(&self) -> BigUint {
        match &self.chain {
            None => BigUint::from(1u32),
            Some(node) => node.order(),
        }
    }

    pub fn order_u64(&self) -> Option<u64> {
        u64::try_from(&self.order()).ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.chain.is_none()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        if p.degree() != self.degree {
            return false;
        }
        match &self.chain {
            None => p.is_identity(),
            Some(node) => node.sift(p).is_identity(),
        }
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    /// Equality as subgroups of Sym(degree): same order and mutual containment.
    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.degree == other.degree
            && self.order() == other.order()
            && other.generators.iter().all(|g| self.contains(g))
    }

    pub fn conjugated_by(&self, c: &Permutation) -> PermGroup {
        let gens: Vec<Permutation> = self.generators.iter().map(|g| g.conjugate_by(c)).collect();
        PermGroup::from_generators(self.degree, &gens).expect("conjugation preserves validity")
    }

    /// Orbit partition; orbits sorted by least element, points ascending.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut orbits = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < orbit.len() {
                let p = orbit[i];
                for g in &self.generators {
                    let q = g.apply(p);
                    if !seen[q] {
                        seen[q] = true;
                        orbit.push(q);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() == 1
    }

    /// Transitive with `|G| = degree`; equivalently transitive with trivial
    /// point stabilizers.
    pub fn is_regular(&self) -> bool {
        self.is_transitive() && self.order() == BigUint::from(self.degree)
    }

    /// All point stabilizers trivial: every orbit has length `|G|`.
    pub fn is_semiregular(&self) -> bool {
        let order = self.order();
        self.orbits()
            .into_iter()
            .all(|o| BigUint::from(o.len()) == order)
    }

    /// The subgroup fixing `x`, via a chain whose first base point is `x`.
    pub fn point_stabilizer(&self, x: usize) -> Result<PermGroup, PermError> {
        if x >= self.degree {
            return Err(PermError::PointOutOfRange {
                point: x,
                degree: self.degree,
            });
        }
        let mut slot = Some(Box::new(ChainNode::new(self.degree, x)));
        for g in &self.generators {
            chain_insert(&mut slot, self.degree, g.clone());
        }
        let root = slot.expect("root was created above");
        let stab_gens = root.next.map(|n| n.gens).unwrap_or_default();
        PermGroup::from_generators(self.degree, &stab_gens)
    }

    /// Lazily yields every element exactly once, in the deterministic order
    /// given by the chain transversals.
    pub fn iter_elements(&self) -> Elements<'_> {
        let mut levels = Vec::new();
        let mut node = self.chain.as_deref();
        while let Some(n) = node {
            levels.push(n.transversal.values().collect::<Vec<_>>());
            node = n.next.as_deref();
        }
        Elements {
            degree: self.degree,
            odometer: vec![0; levels.len()],
            levels,
            exhausted: false,
        }
    }

    /// Sorted image lists of all elements; the canonical identity of this
    /// group as a set. Only sensible for small groups.
    pub fn element_set_key(&self) -> Vec<Vec<usize>> {
        let mut key: Vec<Vec<usize>> = self.iter_elements().map(|p| p.images).collect();
        key.sort_unstable();
        key
    }
}

pub struct Elements<'a> {
    degree: usize,
    levels: Vec<Vec<&'a Permutation>>,
    odometer: Vec<usize>,
    exhausted: bool,
}

impl Iterator for Elements<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.exhausted {
            return None;
        }
        let mut acc = Permutation::identity(self.degree);
        for (level, &idx) in self.levels.iter().zip(&self.odometer).rev() {
            acc = acc.compose(level[idx]);
        }
        // Odometer increment, deepest level fastest.
        let mut carried = true;
        for i in (0..self.levels.len()).rev() {
            self.odometer[i] += 1;
            if self.odometer[i] < self.levels[i].len() {
                carried = false;
                break;
            }
            self.odometer[i] = 0;
        }
        if carried {
            self.exhausted = true;
        }
        Some(acc)
    }
}

/// Target shape for regular-subgroup enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    /// Dihedral group of the given order `2n`.
    Dihedral(usize),
    /// Cyclic group of the given order.
    Cyclic(usize),
    /// Klein four-group; covers D₄ ≅ C₂×C₂.
    ElementaryAbelian4,
}

impl GroupKind {
    pub fn order(&self) -> usize {
        match self {
            GroupKind::Dihedral(o) | GroupKind::Cyclic(o) => *o,
            GroupKind::ElementaryAbelian4 => 4,
        }
    }
}

/// Result of an exhaustive conjugacy search, with the counters needed to
/// assert exhaustiveness.
#[derive(Clone, Debug)]
pub struct ConjugacySearch {
    pub conjugator: Option<Permutation>,
    /// Candidates actually tested.
    pub candidates_scanned: u64,
    /// Candidates the search was obliged to test: 0 when the cycle-type
    /// fingerprints already refute conjugacy, else the order of the ambient
    /// group (minus early exit on success).
    pub search_space: u64,
}

const FINGERPRINT_CAP: u64 = 10_000;

fn cycle_fingerprint(g: &PermGroup) -> BTreeMap<Vec<usize>, usize> {
    let mut fp = BTreeMap::new();
    for p in g.iter_elements() {
        *fp.entry(p.cycle_type()).or_insert(0) += 1;
    }
    fp
}

/// Searches for `c ∈ ambient` with `h^c = k`.
///
/// Candidates are scanned in the ambient group's deterministic element
/// order; each candidate's induced images of `h`'s generators are tested by
/// membership in `k`. The scan is skipped entirely when the element-wise
/// (order, cycle type) fingerprints of `h` and `k` differ, since conjugation
/// preserves cycle types.
pub fn subgroup_conjugacy_search(
    ambient: &PermGroup,
    h: &PermGroup,
    k: &PermGroup,
    cap: u64,
) -> Result<ConjugacySearch, PermError> {
    if !h.is_subgroup_of(ambient) || !k.is_subgroup_of(ambient) {
        return Err(PermError::NotASubgroup);
    }
    let refuted = ConjugacySearch {
        conjugator: None,
        candidates_scanned: 0,
        search_space: 0,
    };
    if h.order() != k.order() {
        return Ok(refuted);
    }
    if h.order() <= BigUint::from(FINGERPRINT_CAP) && cycle_fingerprint(h) != cycle_fingerprint(k) {
        return Ok(refuted);
    }
    let order = ambient.order();
    if order > BigUint::from(cap) {
        return Err(PermError::EnumerationInfeasible { order, cap });
    }
    let search_space = ambient.order_u64().expect("order fits after cap check");
    let mut scanned = 0;
    for c in ambient.iter_elements() {
        scanned += 1;
        if h.generators()
            .iter()
            .all(|g| k.contains(&g.conjugate_by(&c)))
        {
            return Ok(ConjugacySearch {
                conjugator: Some(c),
                candidates_scanned: scanned,
                search_space,
            });
        }
    }
    debug_assert_eq!(scanned, search_space);
    Ok(ConjugacySearch {
        conjugator: None,
        candidates_scanned: scanned,
        search_space,
    })
}

/// Enumerates all regular subgroups of `ambient` of the given isomorphism
/// type, deduplicated by element set and sorted by it.
///
/// For `Dihedral(2n)` the search runs over pairs `(v, w)` with `o(v) = n`,
/// `o(w) = 2`, `v^w = v⁻¹`; regularity of `⟨v, w⟩` is then checked directly.
/// Refuses to enumerate ambient groups larger than `cap` (the verdict would
/// be too expensive, not wrong; callers surface this as "infeasible").
pub fn enumerate_regular_subgroups(
    ambient: &PermGroup,
    kind: GroupKind,
    cap: u64,
) -> Result<Vec<PermGroup>, PermError> {
    let degree = ambient.degree();
    let target = kind.order();
    if target < 2 || (matches!(kind, GroupKind::Dihedral(_)) && !target.is_multiple_of(2)) {
        return Err(PermError::InvalidKindParameter(format!("{kind:?}")));
    }
    if degree != target {
        return Err(PermError::DegreeMismatch(degree, target));
    }
    let order = ambient.order();
    if order > BigUint::from(cap) {
        return Err(PermError::EnumerationInfeasible { order, cap });
    }

    let elements: Vec<Permutation> = ambient.iter_elements().collect();
    let mut found: BTreeMap<Vec<Vec<usize>>, PermGroup> = BTreeMap::new();
    let record = |group: PermGroup, found: &mut BTreeMap<Vec<Vec<usize>>, PermGroup>| {
        if group.is_regular() {
            found.entry(group.element_set_key()).or_insert(group);
        }
    };

    match kind {
        GroupKind::Cyclic(m) => {
            for v in &elements {
                if v.order() == m as u64 {
                    let g = PermGroup::from_generators(degree, std::slice::from_ref(v))?;
                    record(g, &mut found);
                }
            }
        }
        GroupKind::ElementaryAbelian4 => {
            let invs: Vec<&Permutation> = elements.iter().filter(|p| p.order() == 2).collect();
            for (i, v) in invs.iter().enumerate() {
                for w in &invs[i + 1..] {
                    if v.compose(w) == w.compose(v) {
                        let g = PermGroup::from_generators(degree, &[(*v).clone(), (*w).clone()])?;
                        record(g, &mut found);
                    }
                }
            }
        }
        GroupKind::Dihedral(two_n) => {
            let half = (two_n / 2) as u64;
            let mut rotations = Vec::new();
            let mut involutions = Vec::new();
            for p in &elements {
                let o = p.order();
                if o == half {
                    rotations.push(p);
                }
                if o == 2 {
                    involutions.push(p);
                }
            }
            for v in &rotations {
                let vinv = v.inverse();
                for w in &involutions {
                    if v.conjugate_by(w) == vinv {
                        let g = PermGroup::from_generators(degree, &[(*v).clone(), (*w).clone()])?;
                        record(g, &mut found);
                    }
                }
            }
        }
    }
    Ok(found.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// Test-time oracle: group order by naive closure over products.
    fn naive_closure_order(degree: usize, gens: &[Permutation]) -> usize {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue = vec![Permutation::identity(degree)];
        seen.insert(queue[0].images.clone());
        while let Some(p) = queue.pop() {
            for g in gens {
                let q = p.compose(g);
                if seen.insert(q.images.clone()) {
                    assert!(seen.len() <= 10_000, "oracle cap exceeded");
                    queue.push(q);
                }
            }
        }
        seen.len()
    }

    fn perm(degree: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(degree, cycles).unwrap()
    }

    #[test]
    fn compose_applies_left_then_right() {
        // (0 1 2) then (0 1): 0→1→0, 1→2→2, 2→0→1, i.e. (1 2).
        let p = perm(3, &[&[0, 1, 2]]);
        let q = perm(3, &[&[0, 1]]);
        assert_eq!(p.compose(&q), perm(3, &[&[1, 2]]));
    }

    #[test]
    fn identity_and_inverse_laws() {
        let p = perm(5, &[&[0, 3], &[1, 4, 2]]);
        assert_eq!(Permutation::identity(5).compose(&p), p);
        assert_eq!(p.compose(&p.inverse()), Permutation::identity(5));
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3]).is_err());
    }

    #[test]
    fn cycle_structure() {
        let p = perm(6, &[&[0, 1, 2], &[3, 5]]);
        assert_eq!(p.cycle_type(), vec![1, 2, 3]);
        assert_eq!(p.order(), 6);
        assert_eq!(p.to_string(), "(0 1 2)(3 5)");
        assert_eq!(Permutation::identity(3).order(), 1);
    }

    #[test]
    fn chain_order_matches_naive_closure() {
        let cases: Vec<(usize, Vec<Permutation>)> = vec![
            (3, vec![perm(3, &[&[0, 1]])]),
            (4, vec![perm(4, &[&[0, 1]]), perm(4, &[&[0, 1, 2, 3]])]),
            (
                5,
                vec![perm(5, &[&[0, 1, 2, 3, 4]]), perm(5, &[&[1, 4], &[2, 3]])],
            ),
            (
                7,
                vec![
                    perm(7, &[&[0, 1, 2, 3, 4, 5, 6]]),
                    perm(7, &[&[1, 3], &[2, 6]]),
                ],
            ),
            (
                6,
                vec![
                    perm(6, &[&[0, 1]]),
                    perm(6, &[&[2, 3]]),
                    perm(6, &[&[4, 5]]),
                ],
            ),
        ];
        for (degree, gens) in cases {
            let g = PermGroup::from_generators(degree, &gens).unwrap();
            assert_eq!(g.order(), BigUint::from(naive_closure_order(degree, &gens)));
            for gen in &gens {
                assert!(g.contains(gen));
            }
        }
    }

    #[test]
    fn two_element_group() {
        let g = PermGroup::from_generators(2, &[perm(2, &[&[0, 1]])]).unwrap();
        assert_eq!(g.order_u64(), Some(2));
    }

    #[test]
    fn symmetric_group_order_and_elements() {
        let g = PermGroup::from_generators(4, &[perm(4, &[&[0, 1]]), perm(4, &[&[0, 1, 2, 3]])])
            .unwrap();
        assert_eq!(g.order_u64(), Some(24));
        let all: Vec<Permutation> = g.iter_elements().collect();
        assert_eq!(all.len(), 24);
        let distinct: BTreeSet<Vec<usize>> = all.iter().map(|p| p.images.clone()).collect();
        assert_eq!(distinct.len(), 24);
        assert!(all.iter().all(|p| g.contains(p)));
        assert!(!g.contains(&Permutation::identity(5)));
    }

    #[test]
    fn trivial_group_queries() {
        let g = PermGroup::trivial(4);
        assert_eq!(g.order_u64(), Some(1));
        assert_eq!(g.orbits(), vec![vec![0], vec![1], vec![2], vec![3]]);
        assert!(g.is_semiregular());
        assert!(!g.is_regular());
        assert_eq!(g.iter_elements().count(), 1);
    }

    #[test]
    fn regularity_tests() {
        // C₄ acting on itself: regular. Sym(4): transitive but not regular.
        let c4 = PermGroup::from_generators(4, &[perm(4, &[&[0, 1, 2, 3]])]).unwrap();
        assert!(c4.is_regular() && c4.is_semiregular());
        let s4 = PermGroup::from_generators(4, &[perm(4, &[&[0, 1]]), perm(4, &[&[0, 1, 2, 3]])])
            .unwrap();
        assert!(s4.is_transitive() && !s4.is_regular());
        // A fixed point plus order > 1: not semiregular.
        let fix = PermGroup::from_generators(3, &[perm(3, &[&[0, 1]])]).unwrap();
        assert!(!fix.is_semiregular());
    }

    #[test]
    fn point_stabilizer_in_sym3() {
        let s3 =
            PermGroup::from_generators(3, &[perm(3, &[&[0, 1]]), perm(3, &[&[0, 1, 2]])]).unwrap();
        let stab = s3.point_stabilizer(0).unwrap();
        assert_eq!(stab.order_u64(), Some(2));
        assert!(stab.contains(&perm(3, &[&[1, 2]])));
        assert!(s3.point_stabilizer(7).is_err());
    }

    #[test]
    fn stabilizer_of_whole_group_fixing_point() {
        let g = PermGroup::from_generators(3, &[perm(3, &[&[1, 2]])]).unwrap();
        let stab = g.point_stabilizer(0).unwrap();
        assert!(stab.same_group(&g));
    }

    #[test]
    fn conjugacy_of_equal_subgroups_yields_normalizer_element() {
        let s4 = PermGroup::from_generators(4, &[perm(4, &[&[0, 1]]), perm(4, &[&[0, 1, 2, 3]])])
            .unwrap();
        let h = PermGroup::from_generators(4, &[perm(4, &[&[0, 1, 2, 3]])]).unwrap();
        let out = subgroup_conjugacy_search(&s4, &h, &h, 1_000_000).unwrap();
        let c = out.conjugator.expect("H is conjugate to itself");
        assert!(h.same_group(&h.conjugated_by(&c)));
    }

    #[test]
    fn conjugacy_failure_is_exhaustive() {
        let s4 = PermGroup::from_generators(4, &[perm(4, &[&[0, 1]]), perm(4, &[&[0, 1, 2, 3]])])
            .unwrap();
        // Two non-conjugate order-2 subgroups: ⟨(0 1)⟩ vs ⟨(0 1)(2 3)⟩.
        let h = PermGroup::from_generators(4, &[perm(4, &[&[0, 1]])]).unwrap();
        let k = PermGroup::from_generators(4, &[perm(4, &[&[0, 1], &[2, 3]])]).unwrap();
        let out = subgroup_conjugacy_search(&s4, &h, &k, 1_000_000).unwrap();
        assert!(out.conjugator.is_none());
        // Refuted by fingerprints, before any scan.
        assert_eq!((out.candidates_scanned, out.search_space), (0, 0));

        // Same cycle structure but different subgroup: scan runs to the end.
        let k2 = PermGroup::from_generators(4, &[perm(4, &[&[2, 3]])]).unwrap();
        let out2 = subgroup_conjugacy_search(&s4, &h, &k2, 1_000_000).unwrap();
        assert!(out2.conjugator.is_some());
        let c = out2.conjugator.unwrap();
        assert!(k2.same_group(&h.conjugated_by(&c)));
    }

    #[test]
    fn conjugacy_requires_containment() {
        let s3 = PermGroup::from_generators(3, &[perm(3, &[&[0, 1, 2]])]).unwrap();
        let h = PermGroup::from_generators(3, &[perm(3, &[&[0, 1]])]).unwrap();
        assert!(matches!(
            subgroup_conjugacy_search(&s3, &h, &h, 1_000_000),
            Err(PermError::NotASubgroup)
        ));
    }

    #[test]
    fn regular_subgroup_enumeration_in_sym4() {
        let s4 = PermGroup::from_generators(4, &[perm(4, &[&[0, 1]]), perm(4, &[&[0, 1, 2, 3]])])
            .unwrap();
        // Exactly one regular Klein four-group in Sym(4).
        let ea = enumerate_regular_subgroups(&s4, GroupKind::ElementaryAbelian4, 100).unwrap();
        assert_eq!(ea.len(), 1);
        assert!(ea[0].is_regular());
        assert!(ea[0].contains(&perm(4, &[&[0, 1], &[2, 3]])));
        // Three regular C₄ subgroups (six 4-cycles, two per subgroup).
        let cy = enumerate_regular_subgroups(&s4, GroupKind::Cyclic(4), 100).unwrap();
        assert_eq!(cy.len(), 3);
        for g in &cy {
            assert!(g.is_regular());
        }
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let s4 = PermGroup::from_generators(4, &[perm(4, &[&[0, 1]]), perm(4, &[&[0, 1, 2, 3]])])
            .unwrap();
        assert!(matches!(
            enumerate_regular_subgroups(&s4, GroupKind::ElementaryAbelian4, 10),
            Err(PermError::EnumerationInfeasible { .. })
        ));
    }

    #[test]
    fn permutation_serialization_round_trip() {
        let p = perm(4, &[&[0, 2, 1]]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "[2,0,1,3]");
        let back: Permutation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Permutation>("[0,0,1]").is_err());
    }

    #[test]
    fn group_serialization_shape() {
        let g = PermGroup::from_generators(3, &[perm(3, &[&[0, 1, 2]])]).unwrap();
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v["degree"], 3);
        assert_eq!(v["generators"], serde_json::json!([[1, 2, 0]]));
    }

    fn arb_perm(degree: usize) -> impl Strategy<Value = Permutation> {
        proptest::collection::vec(any::<u64>(), degree).prop_map(move |keys| {
            let mut idx: Vec<usize> = (0..degree).collect();
            idx.sort_by_key(|&i| (keys[i], i));
            Permutation::new(idx).unwrap()
        })
    }

    proptest! {
        #[test]
        fn compose_is_associative(
            p in arb_perm(8),
            q in arb_perm(8),
            r in arb_perm(8),
        ) {
            prop_assert_eq!(p.compose(&q).compose(&r), p.compose(&q.compose(&r)));
        }

        #[test]
        fn inverse_law(p in arb_perm(8)) {
            prop_assert!(p.compose(&p.inverse()).is_identity());
            prop_assert!(p.inverse().compose(&p).is_identity());
        }

        #[test]
        fn power_matches_iteration(p in arb_perm(6), e in 0i64..20) {
            let mut acc = Permutation::identity(6);
            for _ in 0..e {
                acc = acc.compose(&p);
            }
            prop_assert_eq!(p.power(e), acc);
            prop_assert_eq!(p.power(-e), p.power(e).inverse());
        }

        #[test]
        fn generated_group_order_matches_naive_closure(
            p in arb_perm(5),
            q in arb_perm(5),
        ) {
            let gens = vec![p, q];
            let group = PermGroup::from_generators(5, &gens).unwrap();
            prop_assert_eq!(
                group.order(),
                BigUint::from(naive_closure_order(5, &gens))
            );
        }

        #[test]
        fn conjugation_preserves_cycle_type(p in arb_perm(7), c in arb_perm(7)) {
            prop_assert_eq!(p.conjugate_by(&c).cycle_type(), p.cycle_type());
        }
    }
}
