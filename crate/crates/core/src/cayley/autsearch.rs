//! Digraph automorphism groups at desk scale (≤ 64 vertices): simultaneous
//! equitable-partition refinement over out- and in-neighbourhoods, plus
//! backtracking over vertex images with verification at the leaves.
//!
//! The group is discovered base point by base point: for each vertex b, the
//! candidates for images of b under automorphisms fixing 0..b−1 are read off
//! the refined partition, ones already reachable by known generators are
//! skipped, and the rest each get one extension search. Seeding with known
//! automorphisms (the regular representation and Aut(G,S) for Cayley
//! digraphs) makes the skip cover almost everything.

use std::collections::BTreeMap;

use crate::perm::{PermGroup, Permutation};

/// Bitmask adjacency; row v has bit w set iff there is an arc v → w.
pub(crate) struct Adjacency {
    pub out: Vec<u64>,
    pub inn: Vec<u64>,
}

/// Raised when the node budget for backtracking runs out; callers convert
/// this into their own "infeasible" error, never into a wrong answer.
#[derive(Debug)]
pub(crate) struct BudgetExhausted;

type Colors = Vec<u16>;

/// Refines the coloring induced by `pairs` (pair i pins domain vertex x_i
/// and codomain vertex y_i to the same fresh color) until equitable on both
/// sides. Returns None when the class structure of the two sides disagrees,
/// which proves no automorphism respects the pins.
fn refine(adj: &Adjacency, pairs: &[(usize, usize)]) -> Option<(Colors, Colors)> {
    let d = adj.out.len();
    let mut dom: Colors = vec![0; d];
    let mut cod: Colors = vec![0; d];
    for (i, &(x, y)) in pairs.iter().enumerate() {
        dom[x] = (i + 1) as u16;
        cod[y] = (i + 1) as u16;
    }
    let mut class_count = 0usize;
    loop {
        // Class masks per color, both sides in one map for the balance check.
        let mut classes: BTreeMap<u16, (u64, u64)> = BTreeMap::new();
        for v in 0..d {
            classes.entry(dom[v]).or_insert((0, 0)).0 |= 1 << v;
            classes.entry(cod[v]).or_insert((0, 0)).1 |= 1 << v;
        }
        for &(dm, cm) in classes.values() {
            if dm.count_ones() != cm.count_ones() {
                return None;
            }
        }
        // Signature: own color plus (out, in) degree into every class.
        let signature = |masks: &[(u64, u64)], colors: &Colors, side: usize, v: usize| {
            let mut sig = Vec::with_capacity(masks.len() + 1);
            sig.push((colors[v], 0u16));
            for &(dm, cm) in masks {
                let m = if side == 0 { dm } else { cm };
                sig.push((
                    (adj.out[v] & m).count_ones() as u16,
                    (adj.inn[v] & m).count_ones() as u16,
                ));
            }
            sig
        };
        let masks: Vec<(u64, u64)> = classes.values().copied().collect();
        let dom_sigs: Vec<_> = (0..d).map(|v| signature(&masks, &dom, 0, v)).collect();
        let cod_sigs: Vec<_> = (0..d).map(|v| signature(&masks, &cod, 1, v)).collect();
        let mut ids: BTreeMap<&Vec<(u16, u16)>, u16> = BTreeMap::new();
        for sig in dom_sigs.iter().chain(cod_sigs.iter()) {
            let next = ids.len() as u16;
            ids.entry(sig).or_insert(next);
        }
        // Renumber by sorted signature so the ids are canonical.
        let mut rank: BTreeMap<&Vec<(u16, u16)>, u16> = BTreeMap::new();
        for (i, (&sig, _)) in ids.iter().enumerate() {
            rank.insert(sig, i as u16);
        }
        let new_dom: Colors = (0..d).map(|v| rank[&dom_sigs[v]]).collect();
        let new_cod: Colors = (0..d).map(|v| rank[&cod_sigs[v]]).collect();
        let new_count = rank.len();
        dom = new_dom;
        cod = new_cod;
        if new_count == class_count {
            return Some((dom, cod));
        }
        class_count = new_count;
    }
}

fn map_mask(mask: u64, image: &[usize]) -> u64 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        out |= 1 << image[v];
        m &= m - 1;
    }
    out
}

/// Searches for one automorphism extending the pinned `pairs`. Complete:
/// returns Ok(None) only after exhausting the (refinement-pruned) search
/// space. Leaf candidates are verified arc-by-arc, so refinement never has
/// to be a certificate.
pub(crate) fn find_extension(
    adj: &Adjacency,
    pairs: &mut Vec<(usize, usize)>,
    budget: &mut u64,
) -> Result<Option<Permutation>, BudgetExhausted> {
    if *budget == 0 {
        return Err(BudgetExhausted);
    }
    *budget -= 1;
    let d = adj.out.len();
    let Some((dom, cod)) = refine(adj, pairs) else {
        return Ok(None);
    };
    // First color with a non-singleton class, if any.
    let mut count_per_color: BTreeMap<u16, u32> = BTreeMap::new();
    for &c in &dom {
        *count_per_color.entry(c).or_insert(0) += 1;
    }
    let branch_color = count_per_color
        .iter()
        .find(|&(_, &c)| c > 1)
        .map(|(&c, _)| c);
    match branch_color {
        None => {
            // Discrete: read the bijection off the colors and verify it.
            let mut by_color = vec![usize::MAX; d];
            for y in 0..d {
                by_color[cod[y] as usize] = y;
            }
            let image: Vec<usize> = (0..d).map(|v| by_color[dom[v] as usize]).collect();
            for v in 0..d {
                if map_mask(adj.out[v], &image) != adj.out[image[v]] {
                    return Ok(None);
                }
            }
            Ok(Some(
                Permutation::new(image).expect("colors pair off a bijection"),
            ))
        }
        Some(c) => {
            let x = (0..d).find(|&v| dom[v] == c).expect("class is non-empty");
            for (y, &cy) in cod.iter().enumerate() {
                if cy != c {
                    continue;
                }
                pairs.push((x, y));
                let found = find_extension(adj, pairs, budget)?;
                pairs.pop();
                if found.is_some() {
                    return Ok(found);
                }
            }
            Ok(None)
        }
    }
}

/// The full automorphism group. `seeds` must be known automorphisms; they
/// are trusted as search shortcuts but still end up in a verified stabilizer
/// chain, so a bad seed would surface as a contradiction in tests rather
/// than silently inflating the group.
pub(crate) fn automorphism_group(
    adj: &Adjacency,
    seeds: &[Permutation],
    budget: &mut u64,
) -> Result<PermGroup, BudgetExhausted> {
    let d = adj.out.len();
    let mut gens: Vec<Permutation> = Vec::new();
    for s in seeds {
        debug_assert!(is_automorphism(adj, s), "seed is not an automorphism");
        if !s.is_identity() && !gens.contains(s) {
            gens.push(s.clone());
        }
    }
    let mut stab = PermGroup::from_generators(d, &gens).expect("seed degrees match");
    let mut prefix: Vec<(usize, usize)> = Vec::new();
    for b in 0..d {
        let (dom, cod) = refine(adj, &prefix).expect("identity respects identical pins");
        if (0..d).all(|v| dom.iter().filter(|&&c| c == dom[v]).count() == 1) {
            // Discrete partition: no automorphism moves anything beyond the
            // pins, so later levels cannot contribute generators.
            break;
        }
        let mut orbit = orbit_mask(d, stab.generators(), b);
        for (y, &cy) in cod.iter().enumerate() {
            if y == b || cy != dom[b] || orbit & (1 << y) != 0 {
                continue;
            }
            let mut pairs = prefix.clone();
            pairs.push((b, y));
            if let Some(g) = find_extension(adj, &mut pairs, budget)? {
                gens.push(g.clone());
                let mut sg = stab.generators().to_vec();
                sg.push(g);
                stab = PermGroup::from_generators(d, &sg).expect("degrees match");
                orbit = orbit_mask(d, stab.generators(), b);
            }
        }
        prefix.push((b, b));
        stab = stab.point_stabilizer(b).expect("b < degree");
    }
    Ok(PermGroup::from_generators(d, &gens).expect("degrees match"))
}

fn orbit_mask(d: usize, gens: &[Permutation], start: usize) -> u64 {
    let mut mask: u64 = 1 << start;
    let mut frontier = vec![start];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q = g.apply(p);
            if mask & (1 << q) == 0 {
                mask |= 1 << q;
                frontier.push(q);
            }
        }
    }
    let _ = d;
    mask
}

pub(crate) fn is_automorphism(adj: &Adjacency, p: &Permutation) -> bool {
    let d = adj.out.len();
    p.degree() == d && (0..d).all(|v| map_mask(adj.out[v], p.images()) == adj.out[p.apply(v)])
}
