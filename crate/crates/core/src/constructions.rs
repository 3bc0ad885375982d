//! Named constructions and the classification census.
//!
//! The ladder (prism) graphs Cay(D_2n, {a, a^{-1}, b}) are the engine's
//! standing example family: normal for even 4 < n, yet never CI there
//! because a second regular dihedral subgroup survives inside Aut. The n = 4
//! member degenerates into K_{4,4} minus a perfect matching and is the
//! smallest non-normal non-CI Cayley graph of a dihedral group. The census
//! machinery grinds through every connection set at small n and checks the
//! resulting classification: no normal non-CI examples exactly when
//! n ∈ {2, 4} or n is odd.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{
    aut_gs_count, build_cayley, ci_babai_from_aut, ci_normal_from_aut, digraph_automorphisms,
    ser_biguint, CayleyDigraph, CayleyError, ConnectionSet, EngineConfig,
};
use crate::dihedral::{right_regular_group, Dihedral, DihedralElement};
use crate::perm::{
    enumerate_regular_subgroups, subgroup_conjugacy_search, GroupKind, PermGroup, Permutation,
};

/// The ladder connection set {a, a^{-1}, b}.
pub fn ladder_set(n: usize) -> Result<ConnectionSet, CayleyError> {
    let d = Dihedral::new(n)?;
    if n < 3 {
        return Err(CayleyError::Dihedral(
            crate::dihedral::DihedralError::NTooSmall { n, min: 3 },
        ));
    }
    ConnectionSet::new(n, [d.rotation(1), d.rotation(-1), d.reflection(0)])
}

/// Cay(D_2n, {a, a^{-1}, b}): two n-cycles joined by a perfect matching of
/// "rungs" (the b-edges).
pub fn ladder(n: usize) -> Result<CayleyDigraph, CayleyError> {
    build_cayley(&ladder_set(n)?)
}

/// The second regular dihedral subgroup of Aut(ladder(n)) for even n > 4:
/// ⟨R(ab)·α, R(b)⟩ where α is the automorphism a ↦ a^{-1}, b ↦ b (as a
/// vertex permutation, applied after R(ab)). Every clause of the claim is
/// certified before the group is returned.
pub fn ladder_witness_subgroup(n: usize, cfg: &EngineConfig) -> Result<PermGroup, CayleyError> {
    if !n.is_multiple_of(2) || n <= 4 {
        return Err(CayleyError::WitnessCertification(format!(
            "witness subgroup requires even n > 4, got {n}"
        )));
    }
    let d = Dihedral::new(n)?;
    let certify = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(CayleyError::WitnessCertification(what.to_string()))
        }
    };
    let ab = d.mul(d.rotation(1), d.reflection(0));
    let alpha = d.automorphism(-1, 0).expect("-1 is a unit");
    let u = d.right_regular_perm(ab).compose(&d.aut_to_perm(alpha));
    let rb = d.right_regular_perm(d.reflection(0));
    certify(
        u.power(2) == d.right_regular_perm(d.rotation(2)),
        "(R(ab)·α)² must equal R(a²)",
    )?;
    certify(u.order() == n as u64, "R(ab)·α must have order n")?;
    certify(
        u.conjugate_by(&rb) == u.inverse(),
        "R(b) must invert R(ab)·α",
    )?;
    let witness = PermGroup::from_generators(2 * n, &[u, rb])?;
    certify(
        witness.order_u64() == Some(2 * n as u64),
        "witness must have order 2n",
    )?;
    certify(witness.is_regular(), "witness must act regularly")?;
    let r = right_regular_group(n)?;
    certify(
        !witness.same_group(&r),
        "witness must differ from R(D_2n) as an element set",
    )?;
    let aut = digraph_automorphisms(&ladder(n)?, cfg)?;
    certify(
        witness.is_subgroup_of(&aut),
        "witness must consist of ladder automorphisms",
    )?;
    Ok(witness)
}

/// Everything the n = 4 counterexample is supposed to exhibit, computed
/// from scratch.
#[derive(Clone, Debug, Serialize)]
pub struct D8Report {
    pub n: usize,
    pub s: String,
    pub aut_order: u64,
    pub normal: bool,
    pub sylow_two_order: u64,
    pub sylow_two_contains_regular: bool,
    pub regular_subgroup_count: usize,
    pub conjugacy_class_count: usize,
    pub babai_ci: bool,
}

impl D8Report {
    pub fn all_verified(&self) -> bool {
        self.aut_order == 48
            && !self.normal
            && self.sylow_two_order == 16
            && self.sylow_two_contains_regular
            && self.conjugacy_class_count == 2
            && !self.babai_ci
    }
}

/// Analyzes Cay(D_8, {a, a³, b}): the graph is K_{4,4} minus a perfect
/// matching, non-normal, and not CI even though every pair of regular D_8
/// subgroups inside one conjugacy class looks alike; there are exactly two
/// classes.
pub fn d8_counterexample_report(cfg: &EngineConfig) -> Result<D8Report, CayleyError> {
    let set = ladder_set(4)?;
    let gamma = build_cayley(&set)?;
    let aut = digraph_automorphisms(&gamma, cfg)?;
    let aut_order = aut.order_u64().expect("48 fits");
    let gs = aut_gs_count(&set)?;
    let normal = BigUint::from(aut_order) == BigUint::from(8u32) * BigUint::from(gs);
    let r = right_regular_group(4)?;
    // Smallest overgroup of R(D_8) generated by one extra element that is a
    // 2-group of order 16: a Sylow 2-subgroup containing R.
    let mut sylow: Option<PermGroup> = None;
    for p in aut.iter_elements() {
        if r.contains(&p) {
            continue;
        }
        let mut gens = r.generators().to_vec();
        gens.push(p);
        let candidate = PermGroup::from_generators(8, &gens)?;
        if candidate.order_u64() == Some(16) {
            sylow = Some(candidate);
            break;
        }
    }
    let (sylow_two_order, sylow_two_contains_regular) = match &sylow {
        Some(p) => (p.order_u64().expect("16 fits"), r.is_subgroup_of(p)),
        None => (0, false),
    };
    let subs = enumerate_regular_subgroups(&aut, GroupKind::Dihedral(8), cfg.enumeration_cap)?;
    let mut class_reps: Vec<&PermGroup> = Vec::new();
    for sub in &subs {
        let mut placed = false;
        for rep in &class_reps {
            let search = subgroup_conjugacy_search(&aut, rep, sub, cfg.enumeration_cap)?;
            if search.conjugator.is_some() {
                placed = true;
                break;
            }
        }
        if !placed {
            class_reps.push(sub);
        }
    }
    let babai = ci_babai_from_aut(4, &aut, cfg)?;
    Ok(D8Report {
        n: 4,
        s: set.to_string(),
        aut_order,
        normal,
        sylow_two_order,
        sylow_two_contains_regular,
        regular_subgroup_count: subs.len(),
        conjugacy_class_count: class_reps.len(),
        babai_ci: babai.verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CensusMode {
    Digraph,
    Graph,
}

impl CensusMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CensusMode::Digraph => "digraph",
            CensusMode::Graph => "graph",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CensusOptions {
    pub exhaustive: bool,
    /// Seed for the sampled mode's deterministic generator.
    pub seed: u64,
    /// Number of random sets added on top of the structured sample.
    pub sample_size: usize,
    pub config: EngineConfig,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            exhaustive: true,
            seed: 0,
            sample_size: 256,
            config: EngineConfig::default(),
        }
    }
}

/// One scanned connection set. `normal` is None only when a resource cap
/// aborted the analysis (and `status` says so).
#[derive(Clone, Debug, Serialize)]
pub struct CensusRecord {
    pub mask: u64,
    #[serde(rename = "S")]
    pub s: String,
    pub is_graph: bool,
    #[serde(serialize_with = "ser_biguint")]
    pub aut_order: BigUint,
    pub normal: Option<bool>,
    pub ci: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremVerdict {
    pub n: usize,
    pub mode: String,
    pub exhaustive: bool,
    pub total_sets_scanned: u64,
    pub normal_count: u64,
    pub normal_non_ci_examples: Vec<String>,
    pub claim_matches_paper: bool,
    /// False when any per-set analysis hit a resource cap.
    pub complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// The classification being tested: dihedral groups have no normal non-CI
/// Cayley (di)graph exactly when n is 2, 4, or odd.
pub fn paper_predicate(n: usize) -> bool {
    n == 2 || n == 4 || n % 2 == 1
}

/// The inverse-closed generating blocks: involutions alone, other elements
/// paired with their inverses. Ordered by first member in (exp, flip)
/// order.
fn inverse_closure_blocks(d: &Dihedral) -> Vec<Vec<DihedralElement>> {
    let mut blocks = Vec::new();
    let mut used: BTreeSet<DihedralElement> = BTreeSet::new();
    for x in d.non_identity_elements() {
        if used.contains(&x) {
            continue;
        }
        let inv = d.inv(x);
        used.insert(x);
        if inv == x {
            blocks.push(vec![x]);
        } else {
            used.insert(inv);
            blocks.push(vec![x, inv]);
        }
    }
    blocks
}

fn masks_to_scan(bits: u32, opts: &CensusOptions) -> Vec<u64> {
    let total: u64 = 1 << bits;
    if opts.exhaustive {
        return (0..total).collect();
    }
    let full = total - 1;
    let mut picked: BTreeSet<u64> = BTreeSet::new();
    for m in 0..total {
        if m.count_ones() <= 4 {
            picked.insert(m);
            picked.insert(full ^ m);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.sample_size {
        picked.insert(rng.gen_range(0..total));
    }
    picked.into_iter().collect()
}

fn record_one(set: &ConnectionSet, cfg: &EngineConfig) -> Result<CensusRecord, CayleyError> {
    let gamma = build_cayley(set)?;
    let mut record = CensusRecord {
        mask: set.to_bitmask(),
        s: set.to_string(),
        is_graph: gamma.is_graph(),
        aut_order: BigUint::from(0u32),
        normal: None,
        ci: None,
        status: None,
    };
    let aut = match digraph_automorphisms(&gamma, cfg) {
        Ok(aut) => aut,
        Err(e) if e.is_infeasible() => {
            record.status = Some("infeasible".to_string());
            return Ok(record);
        }
        Err(e) => return Err(e),
    };
    record.aut_order = aut.order();
    let gs = aut_gs_count(set)?;
    let normal = aut.order() == BigUint::from(gamma.degree() as u64) * BigUint::from(gs);
    record.normal = Some(normal);
    if normal {
        match ci_normal_from_aut(&gamma, &aut, cfg) {
            Ok(rep) => record.ci = Some(rep.verdict),
            Err(e) if e.is_infeasible() => record.status = Some("infeasible".to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(record)
}

/// Scans connection sets of D_2n (all of them when exhaustive, a structured
/// sample otherwise), decides normality and, for the normal ones, CI, and
/// compares the outcome against the classification. Returns the verdict
/// plus every per-set record in scan order.
pub fn run_census(
    n: usize,
    mode: CensusMode,
    opts: &CensusOptions,
) -> Result<(TheoremVerdict, Vec<CensusRecord>), CayleyError> {
    let d = Dihedral::new(n)?;
    let sets: Vec<ConnectionSet> = match mode {
        CensusMode::Digraph => {
            let bits = (2 * n - 1) as u32;
            masks_to_scan(bits, opts)
                .into_iter()
                .map(|m| ConnectionSet::from_bitmask(n, m).expect("mask in range"))
                .collect()
        }
        CensusMode::Graph => {
            let blocks = inverse_closure_blocks(&d);
            masks_to_scan(blocks.len() as u32, opts)
                .into_iter()
                .map(|m| {
                    let members = blocks
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| m & (1 << i) != 0)
                        .flat_map(|(_, b)| b.iter().copied());
                    ConnectionSet::new(n, members).expect("blocks exclude the identity")
                })
                .collect()
        }
    };
    let records: Vec<CensusRecord> = sets
        .par_iter()
        .map(|s| record_one(s, &opts.config))
        .collect::<Result<_, _>>()?;
    let normal_count = records.iter().filter(|r| r.normal == Some(true)).count() as u64;
    let examples: Vec<String> = records
        .iter()
        .filter(|r| r.normal == Some(true) && r.ci == Some(false))
        .map(|r| r.s.clone())
        .collect();
    let complete = records.iter().all(|r| r.status.is_none());
    let verdict = TheoremVerdict {
        n,
        mode: mode.as_str().to_string(),
        exhaustive: opts.exhaustive,
        total_sets_scanned: records.len() as u64,
        normal_count,
        claim_matches_paper: examples.is_empty() == paper_predicate(n),
        normal_non_ci_examples: examples,
        complete,
        seed: if opts.exhaustive {
            None
        } else {
            Some(opts.seed)
        },
    };
    Ok((verdict, records))
}

pub fn verify_theorem(
    n: usize,
    mode: CensusMode,
    opts: &CensusOptions,
) -> Result<TheoremVerdict, CayleyError> {
    run_census(n, mode, opts).map(|(v, _)| v)
}

/// Partitions connection sets into orbits under Aut(D_2n) and returns one
/// representative per orbit (the one with the smallest bitmask) with its
/// orbit size. CI and normality verdicts are constant on these orbits.
pub fn reduce_by_symmetry(sets: &[ConnectionSet]) -> Vec<(ConnectionSet, usize)> {
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut out = Vec::new();
    for set in sets {
        if seen.contains(&set.to_bitmask()) {
            continue;
        }
        let orbit = connection_set_orbit(set);
        let rep_mask = orbit.iter().copied().min().expect("orbit is non-empty");
        let size = orbit.len();
        for m in orbit {
            seen.insert(m);
        }
        out.push((
            ConnectionSet::from_bitmask(set.n(), rep_mask).expect("mask from valid set"),
            size,
        ));
    }
    out
}

/// The Aut(D_2n)-orbit of a connection set, as bitmasks. n = 2 uses the
/// vertex-level automorphisms of the Klein group; n ≥ 3 the (k, t) family.
pub fn connection_set_orbit(set: &ConnectionSet) -> BTreeSet<u64> {
    let n = set.n();
    let d = Dihedral::new(n).expect("validated");
    let mut orbit = BTreeSet::new();
    if n == 2 {
        for p in d4_all_aut_perms() {
            let members = set
                .members()
                .iter()
                .map(|&x| d.from_vertex(p.apply(d.to_vertex(x))).expect("degree 4"));
            let image = ConnectionSet::new(n, members).expect("automorphisms fix identity");
            orbit.insert(image.to_bitmask());
        }
    } else {
        for a in d.all_automorphisms() {
            orbit.insert(set.apply_automorphism(a).to_bitmask());
        }
    }
    orbit
}

fn d4_all_aut_perms() -> Vec<Permutation> {
    let mut out = Vec::new();
    for p in [
        [0usize, 1, 2, 3],
        [0, 1, 3, 2],
        [0, 2, 1, 3],
        [0, 2, 3, 1],
        [0, 3, 1, 2],
        [0, 3, 2, 1],
    ] {
        out.push(Permutation::new(p.to_vec()).expect("bijective"));
    }
    out
}
