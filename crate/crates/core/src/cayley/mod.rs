//! Cayley digraphs of dihedral groups: construction, automorphism groups,
//! normality, and the CI property.
//!
//! Everything here works with vertex numbering to_vertex(a^i b^δ) = δn + i,
//! arcs (g, sg) for s in the connection set, and the right regular action
//! R(x): v ↦ vx. Aut(G,S) is the set-stabilizer of S inside Aut(G); a Cayley
//! digraph is normal exactly when |Aut(Γ)| = |R(G)| · |Aut(G,S)|, i.e. when
//! the vertex stabilizer of the identity is no larger than Aut(G,S).

mod autsearch;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};
use serde_json::json;
use thiserror::Error;

use crate::arith::factorize;
use crate::dihedral::{
    right_regular_group, Dihedral, DihedralAutomorphism, DihedralElement, DihedralError,
};
use crate::perm::{
    enumerate_regular_subgroups, subgroup_conjugacy_search, GroupKind, PermError, PermGroup,
    Permutation,
};

use autsearch::Adjacency;

#[derive(Debug, Error)]
pub enum CayleyError {
    #[error("the identity element cannot belong to a connection set")]
    IdentityInSet,
    #[error(
        "element with exponent {exp} does not live in a dihedral group of degree parameter {n}"
    )]
    ForeignElement { exp: usize, n: usize },
    #[error("{degree} vertices exceed the configured cap of {cap}")]
    VertexCapExceeded { degree: usize, cap: usize },
    #[error("backtracking node budget exhausted; raise backtrack_node_budget")]
    BudgetExhausted,
    #[error("digraph is not normal, so the normal-case CI test does not apply")]
    NotNormal,
    #[error("witness certification failed: {0}")]
    WitnessCertification(String),
    #[error(transparent)]
    Dihedral(#[from] DihedralError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

impl CayleyError {
    /// True for resource-limit failures, which callers must report as
    /// "infeasible" rather than as a verdict.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            CayleyError::BudgetExhausted
                | CayleyError::VertexCapExceeded { .. }
                | CayleyError::Perm(PermError::EnumerationInfeasible { .. })
        )
    }
}

/// Resource limits for the engine. Exceeding any of them is an error, never
/// a silently truncated answer.
#[derive(Clone, Copy, Debug)]
pub struct EngineConfig {
    /// Maximum number of vertices a digraph handed to the automorphism
    /// search may have (hard ceiling 64 from the bitmask representation).
    pub vertex_cap: usize,
    /// Maximum ambient group order for exhaustive element scans (regular
    /// subgroup enumeration, conjugacy search).
    pub enumeration_cap: u64,
    /// Maximum number of search-tree nodes for one automorphism-group
    /// computation.
    pub backtrack_node_budget: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            vertex_cap: 40,
            enumeration_cap: 1_000_000,
            backtrack_node_budget: 10_000_000,
        }
    }
}

/// An identity-free subset of D_2n, the "S" of Cay(D_2n, S).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConnectionSet {
    n: usize,
    members: BTreeSet<DihedralElement>,
}

impl ConnectionSet {
    pub fn new(
        n: usize,
        members: impl IntoIterator<Item = DihedralElement>,
    ) -> Result<Self, CayleyError> {
        Dihedral::new(n)?;
        let members: BTreeSet<DihedralElement> = members.into_iter().collect();
        for m in &members {
            if m.is_identity() {
                return Err(CayleyError::IdentityInSet);
            }
            if m.exp() >= n {
                return Err(CayleyError::ForeignElement { exp: m.exp(), n });
            }
        }
        Ok(ConnectionSet { n, members })
    }

    pub fn empty(n: usize) -> Result<Self, CayleyError> {
        Self::new(n, [])
    }

    /// Parses a comma-separated list of element tokens ("a^2,b,b*a^3"); the
    /// empty string is the empty set.
    pub fn parse(n: usize, text: &str) -> Result<Self, CayleyError> {
        let d = Dihedral::new(n)?;
        let mut members = Vec::new();
        for tok in text.split(',') {
            if tok.trim().is_empty() {
                continue;
            }
            members.push(d.parse_element(tok)?);
        }
        Self::new(n, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &BTreeSet<DihedralElement> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: &DihedralElement) -> bool {
        self.members.contains(x)
    }

    /// S is inverse-closed exactly when Cay(G, S) is an (undirected) graph.
    pub fn inverse_closed(&self) -> bool {
        let d = Dihedral::new(self.n).expect("validated in constructor");
        self.members
            .iter()
            .all(|&x| self.members.contains(&d.inv(x)))
    }

    /// The complementary connection set: all non-identity elements not in S.
    pub fn complement(&self) -> ConnectionSet {
        let d = Dihedral::new(self.n).expect("validated in constructor");
        let members = d
            .non_identity_elements()
            .into_iter()
            .filter(|x| !self.members.contains(x))
            .collect();
        ConnectionSet { n: self.n, members }
    }

    /// The image set σ(S). Group automorphisms fix the identity, so the
    /// image is again a valid connection set.
    pub fn apply_automorphism(&self, s: DihedralAutomorphism) -> ConnectionSet {
        let d = Dihedral::new(self.n).expect("validated in constructor");
        let members = self.members.iter().map(|&x| d.aut_apply(s, x)).collect();
        ConnectionSet { n: self.n, members }
    }

    /// Bit i of the mask selects the i-th entry of non_identity_elements().
    pub fn from_bitmask(n: usize, mask: u64) -> Result<Self, CayleyError> {
        let d = Dihedral::new(n)?;
        let pool = d.non_identity_elements();
        assert!(
            pool.len() < 64 && mask < (1u64 << pool.len()),
            "mask {mask} out of range for n = {n}"
        );
        let members = pool
            .into_iter()
            .enumerate()
            .filter(|&(i, _)| mask & (1 << i) != 0)
            .map(|(_, x)| x);
        Self::new(n, members)
    }

    pub fn to_bitmask(&self) -> u64 {
        let d = Dihedral::new(self.n).expect("validated in constructor");
        let mut mask = 0u64;
        for (i, x) in d.non_identity_elements().into_iter().enumerate() {
            if self.members.contains(&x) {
                mask |= 1 << i;
            }
        }
        mask
    }
}

impl fmt::Display for ConnectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = Dihedral::new(self.n).expect("validated in constructor");
        let parts: Vec<String> = self.members.iter().map(|&x| d.display_element(x)).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Cay(D_2n, S): vertex set D_2n, arcs (g, sg) for s in S.
#[derive(Clone, Debug)]
pub struct CayleyDigraph {
    d: Dihedral,
    s: ConnectionSet,
    is_graph: bool,
    out: Vec<u64>,
    inn: Vec<u64>,
}

pub fn build_cayley(set: &ConnectionSet) -> Result<CayleyDigraph, CayleyError> {
    let d = Dihedral::new(set.n())?;
    let degree = d.order();
    if degree > 64 {
        return Err(CayleyError::VertexCapExceeded { degree, cap: 64 });
    }
    let mut out = vec![0u64; degree];
    let mut inn = vec![0u64; degree];
    for (v, o) in out.iter_mut().enumerate() {
        let g = d.from_vertex(v).expect("v < 2n");
        for &s in set.members() {
            let w = d.to_vertex(d.mul(s, g));
            *o |= 1 << w;
            inn[w] |= 1 << v;
        }
    }
    Ok(CayleyDigraph {
        d,
        s: set.clone(),
        is_graph: set.inverse_closed(),
        out,
        inn,
    })
}

impl CayleyDigraph {
    pub fn n(&self) -> usize {
        self.d.n()
    }

    pub fn degree(&self) -> usize {
        self.d.order()
    }

    pub fn set(&self) -> &ConnectionSet {
        &self.s
    }

    pub fn is_graph(&self) -> bool {
        self.is_graph
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.degree() && v < self.degree() && self.out[u] & (1 << v) != 0
    }

    pub fn out_neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.degree()).filter(|&w| self.has_arc(v, w)).collect()
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs = Vec::new();
        for v in 0..self.degree() {
            for w in self.out_neighbors(v) {
                arcs.push((v, w));
            }
        }
        arcs
    }

    /// Graphviz source; inverse-closed sets render as an undirected graph
    /// with each edge emitted once.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let header = if self.is_graph { "graph" } else { "digraph" };
        s.push_str(&format!("{header} \"cay_n{}\" {{\n", self.n()));
        for v in 0..self.degree() {
            let g = self.d.from_vertex(v).expect("v < 2n");
            s.push_str(&format!(
                "  v{v} [label=\"{}\"];\n",
                self.d.display_element(g)
            ));
        }
        for (u, w) in self.arcs() {
            if self.is_graph {
                if u <= w {
                    s.push_str(&format!("  v{u} -- v{w};\n"));
                }
            } else {
                s.push_str(&format!("  v{u} -> v{w};\n"));
            }
        }
        s.push_str("}\n");
        s
    }

    fn adjacency(&self) -> Adjacency {
        Adjacency {
            out: self.out.clone(),
            inn: self.inn.clone(),
        }
    }
}

/// Aut(G,S) as abstract automorphisms (k, t), in (k, t) order. Only defined
/// for n ≥ 3, where Aut(D_2n) is exactly the (k, t) family; D_4 is handled
/// separately at the vertex level.
pub fn aut_g_s(set: &ConnectionSet) -> Result<Vec<DihedralAutomorphism>, CayleyError> {
    if set.n() < 3 {
        return Err(CayleyError::Dihedral(DihedralError::NTooSmall {
            n: set.n(),
            min: 3,
        }));
    }
    let d = Dihedral::new(set.n())?;
    Ok(d.all_automorphisms()
        .into_iter()
        .filter(|&s| set.apply_automorphism(s) == *set)
        .collect())
}

/// All six automorphisms of D_4 ≅ C_2 × C_2 as vertex permutations: any
/// permutation of the three involutions a, b, ab extends to one.
fn d4_automorphism_perms() -> Vec<Permutation> {
    let mut out = Vec::new();
    for p in [
        [0, 1, 2, 3],
        [0, 1, 3, 2],
        [0, 2, 1, 3],
        [0, 2, 3, 1],
        [0, 3, 1, 2],
        [0, 3, 2, 1],
    ] {
        out.push(Permutation::new(p.to_vec()).expect("bijective by listing"));
    }
    out
}

fn d4_aut_gs_perms(set: &ConnectionSet) -> Vec<Permutation> {
    let d = Dihedral::new(2).expect("2 >= 2");
    let vs: BTreeSet<usize> = set.members().iter().map(|&x| d.to_vertex(x)).collect();
    d4_automorphism_perms()
        .into_iter()
        .filter(|p| vs.iter().all(|&v| vs.contains(&p.apply(v))))
        .collect()
}

/// |Aut(G,S)|, uniformly over n.
pub fn aut_gs_count(set: &ConnectionSet) -> Result<u64, CayleyError> {
    if set.n() == 2 {
        Ok(d4_aut_gs_perms(set).len() as u64)
    } else {
        Ok(aut_g_s(set)?.len() as u64)
    }
}

/// The full automorphism group of the digraph, seeded with R(G) and
/// Aut(G,S). Connection sets with more than n elements are replaced by their
/// complement, which has the same automorphism group and a sparser mask.
pub fn digraph_automorphisms(
    gamma: &CayleyDigraph,
    cfg: &EngineConfig,
) -> Result<PermGroup, CayleyError> {
    let degree = gamma.degree();
    let cap = cfg.vertex_cap.min(64);
    if degree > cap {
        return Err(CayleyError::VertexCapExceeded { degree, cap });
    }
    if gamma.set().len() > gamma.n() {
        let comp = build_cayley(&gamma.set().complement())?;
        return digraph_automorphisms(&comp, cfg);
    }
    let d = gamma.d;
    let mut seeds = vec![
        d.right_regular_perm(d.rotation(1)),
        d.right_regular_perm(d.reflection(0)),
    ];
    if gamma.n() == 2 {
        seeds.extend(d4_aut_gs_perms(gamma.set()));
    } else {
        for s in aut_g_s(gamma.set())? {
            seeds.push(d.aut_to_perm(s));
        }
    }
    let mut budget = cfg.backtrack_node_budget;
    autsearch::automorphism_group(&gamma.adjacency(), &seeds, &mut budget)
        .map_err(|_| CayleyError::BudgetExhausted)
}

/// A certificate that the digraph is non-normal.
#[derive(Clone, Debug)]
pub enum NonNormalityWitness {
    /// Wreath-type witness: S∖K is a union of H-cosets for a normal H ≤ K,
    /// yet some x outside K fails to invert some y in H under conjugation.
    Wreath(WreathWitness),
    /// An order-p automorphism of G fixing S whose shape forces extra
    /// digraph automorphisms.
    OrderPAutomorphism(DihedralAutomorphism),
}

#[derive(Clone, Debug)]
pub struct NormalityReport {
    pub verdict: bool,
    pub aut_order: BigUint,
    pub aut_gs_order: u64,
    pub witness: Option<NonNormalityWitness>,
}

/// Decides normality of Cay(D_2n, S): the digraph is normal iff
/// |Aut(Γ)| = 2n · |Aut(G,S)|. On a non-normal digraph the report carries a
/// structural witness when one of the two witness searches finds one.
pub fn is_normal(
    gamma: &CayleyDigraph,
    cfg: &EngineConfig,
) -> Result<NormalityReport, CayleyError> {
    let aut = digraph_automorphisms(gamma, cfg)?;
    normality_from_aut(gamma, &aut)
}

/// Same as is_normal but reusing an already computed Aut(Γ).
pub fn normality_from_aut(
    gamma: &CayleyDigraph,
    aut: &PermGroup,
) -> Result<NormalityReport, CayleyError> {
    let gs = aut_gs_count(gamma.set())?;
    let expected = BigUint::from(gamma.degree() as u64) * BigUint::from(gs);
    let verdict = aut.order() == expected;
    let witness = if verdict {
        None
    } else {
        find_wreath_witness(gamma.set())
            .map(NonNormalityWitness::Wreath)
            .or_else(|| {
                lemma41_nonnormal_check(gamma.set()).map(NonNormalityWitness::OrderPAutomorphism)
            })
    };
    Ok(NormalityReport {
        verdict,
        aut_order: aut.order(),
        aut_gs_order: gs,
        witness,
    })
}

/// Wreath-type non-normality certificate: subgroups 1 < H ≤ K < G with
/// H normal in G, S∖K a union of H-cosets, and a pair x ∉ K, y ∈ H with
/// y^x ≠ y⁻¹. Under these conditions the stabilizer of the H-coset partition
/// inside Aut(Γ) is too big for the digraph to be normal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathWitness {
    pub h: Vec<DihedralElement>,
    pub k: Vec<DihedralElement>,
    pub x: DihedralElement,
    pub y: DihedralElement,
}

impl WreathWitness {
    /// Re-checks every clause of the certificate against the group and the
    /// connection set.
    pub fn verify(&self, set: &ConnectionSet) -> Result<(), CayleyError> {
        let d = Dihedral::new(set.n())?;
        let fail = |msg: &str| Err(CayleyError::WitnessCertification(msg.to_string()));
        let h: BTreeSet<DihedralElement> = self.h.iter().copied().collect();
        let k: BTreeSet<DihedralElement> = self.k.iter().copied().collect();
        if h.len() < 2 {
            return fail("H must be non-trivial");
        }
        if !h.contains(&d.identity()) || !k.contains(&d.identity()) {
            return fail("subgroups must contain the identity");
        }
        for &u in &h {
            for &v in &h {
                if !h.contains(&d.mul(u, v)) {
                    return fail("H is not closed under multiplication");
                }
            }
        }
        for &u in &k {
            for &v in &k {
                if !k.contains(&d.mul(u, v)) {
                    return fail("K is not closed under multiplication");
                }
            }
        }
        for g in d.elements() {
            for &u in &h {
                if !h.contains(&d.conj(u, g)) {
                    return fail("H is not normal in G");
                }
            }
        }
        if !h.is_subset(&k) {
            return fail("H must be contained in K");
        }
        if k.len() >= d.order() {
            return fail("K must be proper");
        }
        if k.contains(&self.x) {
            return fail("x must lie outside K");
        }
        if !h.contains(&self.y) {
            return fail("y must lie in H");
        }
        if d.conj(self.y, self.x) == d.inv(self.y) {
            return fail("x inverts y, so the pair certifies nothing");
        }
        for &s in set.members() {
            if k.contains(&s) {
                continue;
            }
            for &t in &h {
                if !set.contains(&d.mul(s, t)) {
                    return fail("S outside K is not a union of H-cosets");
                }
            }
        }
        Ok(())
    }
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn cyclic_subgroup(d: &Dihedral, step: usize) -> BTreeSet<DihedralElement> {
    (0..d.n() / step)
        .map(|m| d.rotation((step * m) as i64))
        .collect()
}

fn dihedral_subgroup(d: &Dihedral, step: usize, j: usize) -> BTreeSet<DihedralElement> {
    let mut out = cyclic_subgroup(d, step);
    for m in 0..d.n() / step {
        out.insert(d.reflection((j + step * m) as i64));
    }
    out
}

/// The non-trivial normal subgroups of D_2n usable as the H of a wreath
/// witness: all rotation subgroups, plus the two index-2 dihedral subgroups
/// when n is even. Listed in the deterministic order the witness search
/// scans them.
fn normal_subgroup_candidates(d: &Dihedral) -> Vec<BTreeSet<DihedralElement>> {
    let mut out = Vec::new();
    for step in divisors(d.n()) {
        if step < d.n() {
            out.push(cyclic_subgroup(d, step));
        }
    }
    if d.n().is_multiple_of(2) {
        out.push(dihedral_subgroup(d, 2, 0));
        out.push(dihedral_subgroup(d, 2, 1));
    }
    out
}

/// Every subgroup of D_2n: cyclic ⟨a^step⟩ for step | n, then dihedral
/// ⟨a^step, b a^j⟩ for step | n and 0 ≤ j < step, in (step, j) order.
fn all_subgroups(d: &Dihedral) -> Vec<BTreeSet<DihedralElement>> {
    let mut out = Vec::new();
    for step in divisors(d.n()) {
        out.push(cyclic_subgroup(d, step));
    }
    for step in divisors(d.n()) {
        for j in 0..step {
            out.push(dihedral_subgroup(d, step, j));
        }
    }
    out
}

/// Searches for a wreath-type non-normality witness, scanning H, K, x, y in
/// a fixed deterministic order (so results are reproducible). Returns None
/// when no subgroup pair admits one.
pub fn find_wreath_witness(set: &ConnectionSet) -> Option<WreathWitness> {
    let d = Dihedral::new(set.n()).expect("validated in constructor");
    let mut elements = d.elements();
    elements.sort();
    for h in normal_subgroup_candidates(&d) {
        for k in all_subgroups(&d) {
            if k.len() >= d.order() || !h.is_subset(&k) {
                continue;
            }
            let cosets_ok = set
                .members()
                .iter()
                .all(|&s| k.contains(&s) || h.iter().all(|&t| set.contains(&d.mul(s, t))));
            if !cosets_ok {
                continue;
            }
            for &x in &elements {
                if k.contains(&x) {
                    continue;
                }
                for &y in &h {
                    if d.conj(y, x) != d.inv(y) {
                        let w = WreathWitness {
                            h: h.iter().copied().collect(),
                            k: k.iter().copied().collect(),
                            x,
                            y,
                        };
                        w.verify(set).expect("constructed witness is certified");
                        return Some(w);
                    }
                }
            }
        }
    }
    None
}

/// Searches Aut(G,S) for an automorphism of odd prime order p with k ≢ 1
/// (mod n) but k ≡ 1 modulo every prime-power factor of n other than p^r,
/// where p² | n. Such an automorphism lives in the ⟨θ_a⟩⋊Aut(C_{p^r}) factor
/// without being a θ, which rules out normality of any digraph it fixes.
pub fn lemma41_nonnormal_check(set: &ConnectionSet) -> Option<DihedralAutomorphism> {
    let n = set.n();
    if n < 3 {
        return None;
    }
    let d = Dihedral::new(n).expect("validated in constructor");
    let mut auts: Option<Vec<DihedralAutomorphism>> = None;
    for (p, r) in factorize(n as u64) {
        if p == 2 || r < 2 {
            continue;
        }
        let q = (p as usize).pow(r);
        let rest = n / q;
        let auts = auts.get_or_insert_with(|| aut_g_s(set).expect("n >= 3"));
        for &s in auts.iter() {
            if s.k() != 1 && (s.k() - 1) % rest == 0 && d.aut_order(s) == p {
                return Some(s);
            }
        }
    }
    None
}

/// The isomorphism type a regular subgroup must have to certify CI: D_2n
/// itself, except that D_4 is the Klein four-group.
fn regular_kind(n: usize) -> GroupKind {
    if n == 2 {
        GroupKind::ElementaryAbelian4
    } else {
        GroupKind::Dihedral(2 * n)
    }
}

#[derive(Clone, Debug)]
pub struct CiReport {
    pub verdict: bool,
    pub regular_subgroup_count: usize,
    /// A regular subgroup witnessing failure: distinct from R(G) in the
    /// normal test, non-conjugate to R(G) in the Babai test.
    pub non_conjugate_witness: Option<PermGroup>,
    /// For the Babai test, one conjugator per regular subgroup found
    /// conjugate to R(G); empty for the normal test.
    pub conjugators: Vec<Permutation>,
}

/// CI test for normal digraphs: R(G) is normal in Aut(Γ), so it is its only
/// conjugate and Γ is CI iff Aut(Γ) has no other regular subgroup of the
/// right isomorphism type. Errors with NotNormal on non-normal input.
pub fn is_ci_normal(gamma: &CayleyDigraph, cfg: &EngineConfig) -> Result<CiReport, CayleyError> {
    let aut = digraph_automorphisms(gamma, cfg)?;
    ci_normal_from_aut(gamma, &aut, cfg)
}

pub fn ci_normal_from_aut(
    gamma: &CayleyDigraph,
    aut: &PermGroup,
    cfg: &EngineConfig,
) -> Result<CiReport, CayleyError> {
    let gs = aut_gs_count(gamma.set())?;
    if aut.order() != BigUint::from(gamma.degree() as u64) * BigUint::from(gs) {
        return Err(CayleyError::NotNormal);
    }
    let subs = enumerate_regular_subgroups(aut, regular_kind(gamma.n()), cfg.enumeration_cap)?;
    let r = right_regular_group(gamma.n())?;
    let witness = if subs.len() == 1 {
        None
    } else {
        subs.iter().find(|g| !g.same_group(&r)).cloned()
    };
    Ok(CiReport {
        verdict: subs.len() == 1,
        regular_subgroup_count: subs.len(),
        non_conjugate_witness: witness,
        conjugators: Vec::new(),
    })
}

/// Babai's criterion, valid for any Cayley digraph: Γ is CI iff every
/// regular subgroup of Aut(Γ) isomorphic to G is conjugate to R(G) inside
/// Aut(Γ). Exhaustive, so capped by enumeration_cap.
pub fn is_ci_babai(gamma: &CayleyDigraph, cfg: &EngineConfig) -> Result<CiReport, CayleyError> {
    let aut = digraph_automorphisms(gamma, cfg)?;
    ci_babai_from_aut(gamma.n(), &aut, cfg)
}

pub fn ci_babai_from_aut(
    n: usize,
    aut: &PermGroup,
    cfg: &EngineConfig,
) -> Result<CiReport, CayleyError> {
    let subs = enumerate_regular_subgroups(aut, regular_kind(n), cfg.enumeration_cap)?;
    let r = right_regular_group(n)?;
    let mut conjugators = Vec::new();
    let mut witness: Option<PermGroup> = None;
    for g in &subs {
        if g.same_group(&r) {
            conjugators.push(Permutation::identity(2 * n));
            continue;
        }
        let search = subgroup_conjugacy_search(aut, &r, g, cfg.enumeration_cap)?;
        match search.conjugator {
            Some(c) => conjugators.push(c),
            None => {
                if witness.is_none() {
                    witness = Some(g.clone());
                }
            }
        }
    }
    Ok(CiReport {
        verdict: witness.is_none(),
        regular_subgroup_count: subs.len(),
        non_conjugate_witness: witness,
        conjugators,
    })
}

pub(crate) fn ser_biguint<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match u64::try_from(x) {
        Ok(v) => s.serialize_u64(v),
        Err(_) => s.serialize_str(&x.to_string()),
    }
}

/// One digraph's full analysis in report form; this is the JSON the CLI
/// emits. aut_order serializes as a number when it fits in u64, else as a
/// decimal string.
#[derive(Clone, Debug, Serialize)]
pub struct SetReport {
    pub n: usize,
    #[serde(rename = "S")]
    pub s: String,
    pub is_graph: bool,
    #[serde(serialize_with = "ser_biguint")]
    pub aut_order: BigUint,
    pub normal: bool,
    pub ci: Option<bool>,
    pub regular_subgroup_count: Option<usize>,
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
}

fn witness_json(n: usize, w: &NonNormalityWitness) -> serde_json::Value {
    let d = Dihedral::new(n).expect("validated upstream");
    match w {
        NonNormalityWitness::Wreath(w) => json!({
            "type": "wreath",
            "h": w.h.iter().map(|&x| d.display_element(x)).collect::<Vec<_>>(),
            "k": w.k.iter().map(|&x| d.display_element(x)).collect::<Vec<_>>(),
            "x": d.display_element(w.x),
            "y": d.display_element(w.y),
        }),
        NonNormalityWitness::OrderPAutomorphism(s) => json!({
            "type": "order_p_automorphism",
            "k": s.k(),
            "t": s.t(),
            "order": d.aut_order(*s),
        }),
    }
}

/// Builds a full report for one connection set: automorphism group order,
/// normality (with witness), and, when `with_ci` is set, the CI verdict via
/// the normal-case test or Babai's criterion as appropriate. A CI
/// computation hitting a resource cap downgrades to status "infeasible"
/// instead of guessing.
pub fn analyze(
    set: &ConnectionSet,
    cfg: &EngineConfig,
    with_ci: bool,
) -> Result<SetReport, CayleyError> {
    let gamma = build_cayley(set)?;
    let aut = digraph_automorphisms(&gamma, cfg)?;
    let norm = normality_from_aut(&gamma, &aut)?;
    let mut report = SetReport {
        n: set.n(),
        s: set.to_string(),
        is_graph: gamma.is_graph(),
        aut_order: norm.aut_order.clone(),
        normal: norm.verdict,
        ci: None,
        regular_subgroup_count: None,
        witness: norm.witness.as_ref().map(|w| witness_json(set.n(), w)),
        status: None,
    };
    if with_ci {
        let ci = if norm.verdict {
            ci_normal_from_aut(&gamma, &aut, cfg)
        } else {
            ci_babai_from_aut(set.n(), &aut, cfg)
        };
        match ci {
            Ok(rep) => {
                report.ci = Some(rep.verdict);
                report.regular_subgroup_count = Some(rep.regular_subgroup_count);
            }
            Err(e) if e.is_infeasible() => report.status = Some("infeasible".to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
