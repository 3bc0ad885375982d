//! Exact symbolic algebra of the dihedral group
//! D₂ₙ = ⟨a, b | aⁿ = b² = 1, b⁻¹ab = a⁻¹⟩, its automorphism group, and its
//! holomorph, with conversion to concrete permutations on 2n points.
//!
//! An element aⁱbᵟ is the pair (exp = i, flip = δ); multiplication follows
//! (i,δ)·(j,ε) = (i + (−1)^δ j mod n, δ+ε mod 2). Vertices number the
//! elements as δ·n + i, so 0..n−1 are the rotations and n..2n−1 the
//! reflections.
//!
//! For n ≥ 3 every automorphism is σ_{k,t}: a ↦ a^k, b ↦ b·a^t with
//! gcd(k,n) = 1, giving |Aut(D₂ₙ)| = n·φ(n); θ_{a^i} is σ_{1,i}. D₄ ≅ C₂×C₂
//! has extra automorphisms and is handled separately by callers.

use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::perm::{PermGroup, Permutation};

#[derive(Debug, Error)]
pub enum DihedralError {
    #[error("n = {n} is too small; this operation needs n ≥ {min}")]
    NTooSmall { n: usize, min: usize },
    #[error("k = {k} is not a unit modulo {n}")]
    NotAUnit { k: usize, n: usize },
    #[error("cannot parse {0:?} as a dihedral element")]
    Parse(String),
    #[error("vertex {vertex} out of range for a group of order {order}")]
    VertexOutOfRange { vertex: usize, order: usize },
}

/// The element aⁱbᵟ of D₂ₙ. Ordering is lexicographic in (exp, flip);
/// connection-set bitmasks and witness searches rely on it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DihedralElement {
    exp: usize,
    flip: bool,
}

impl DihedralElement {
    pub fn exp(&self) -> usize {
        self.exp
    }

    pub fn flip(&self) -> bool {
        self.flip
    }

    pub fn is_identity(&self) -> bool {
        self.exp == 0 && !self.flip
    }
}

/// The automorphism σ_{k,t}: a ↦ a^k, b ↦ b·a^t of D₂ₙ (n ≥ 3).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct DihedralAutomorphism {
    k: usize,
    t: usize,
}

impl DihedralAutomorphism {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn identity() -> Self {
        DihedralAutomorphism { k: 1, t: 0 }
    }

    pub fn is_identity(&self) -> bool {
        self.k == 1 && self.t == 0
    }
}

/// The group D₂ₙ itself; all element and automorphism arithmetic goes
/// through this handle since elements do not carry n.
#[derive(Clone, Copy, Debug)]
pub struct Dihedral {
    n: usize,
}

impl Dihedral {
    pub fn new(n: usize) -> Result<Self, DihedralError> {
        if n < 2 {
            return Err(DihedralError::NTooSmall { n, min: 2 });
        }
        Ok(Dihedral { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        2 * self.n
    }

    fn modn(&self, x: i64) -> usize {
        x.rem_euclid(self.n as i64) as usize
    }

    pub fn identity(&self) -> DihedralElement {
        DihedralElement {
            exp: 0,
            flip: false,
        }
    }

    pub fn element(&self, exp: i64, flip: bool) -> DihedralElement {
        DihedralElement {
            exp: self.modn(exp),
            flip,
        }
    }

    /// a^i
    pub fn rotation(&self, i: i64) -> DihedralElement {
        self.element(i, false)
    }

    /// b·a^j = a^(−j)·b
    pub fn reflection(&self, j: i64) -> DihedralElement {
        self.element(-j, true)
    }

    pub fn mul(&self, x: DihedralElement, y: DihedralElement) -> DihedralElement {
        let j = if x.flip {
            -(y.exp as i64)
        } else {
            y.exp as i64
        };
        DihedralElement {
            exp: self.modn(x.exp as i64 + j),
            flip: x.flip ^ y.flip,
        }
    }

    pub fn inv(&self, x: DihedralElement) -> DihedralElement {
        if x.flip {
            x
        } else {
            self.rotation(-(x.exp as i64))
        }
    }

    /// x^y = y⁻¹·x·y
    pub fn conj(&self, x: DihedralElement, y: DihedralElement) -> DihedralElement {
        self.mul(self.mul(self.inv(y), x), y)
    }

    pub fn power(&self, x: DihedralElement, e: i64) -> DihedralElement {
        if x.flip {
            if e.rem_euclid(2) == 1 {
                x
            } else {
                self.identity()
            }
        } else {
            self.rotation(x.exp as i64 * e)
        }
    }

    pub fn element_order(&self, x: DihedralElement) -> u64 {
        if x.flip {
            2
        } else if x.exp == 0 {
            1
        } else {
            (self.n as u64) / arith::gcd(self.n as u64, x.exp as u64)
        }
    }

    pub fn to_vertex(&self, x: DihedralElement) -> usize {
        (x.flip as usize) * self.n + x.exp
    }

    pub fn from_vertex(&self, v: usize) -> Result<DihedralElement, DihedralError> {
        if v >= 2 * self.n {
            return Err(DihedralError::VertexOutOfRange {
                vertex: v,
                order: 2 * self.n,
            });
        }
        Ok(DihedralElement {
            exp: v % self.n,
            flip: v >= self.n,
        })
    }

    /// All 2n elements in (exp, flip) order.
    pub fn elements(&self) -> Vec<DihedralElement> {
        let mut out = Vec::with_capacity(2 * self.n);
        for exp in 0..self.n {
            out.push(DihedralElement { exp, flip: false });
            out.push(DihedralElement { exp, flip: true });
        }
        out
    }

    /// The 2n−1 non-identity elements in (exp, flip) order; index in this
    /// list is the element's bit position in connection-set masks.
    pub fn non_identity_elements(&self) -> Vec<DihedralElement> {
        self.elements()
            .into_iter()
            .filter(|x| !x.is_identity())
            .collect()
    }

    pub fn display_element(&self, x: DihedralElement) -> String {
        if x.flip {
            format!("b*a^{}", self.modn(-(x.exp as i64)))
        } else {
            format!("a^{}", x.exp)
        }
    }

    /// Parses "a^i" / "b*a^i" tokens (also bare "a" and "b"); exponents may
    /// be negative and are reduced mod n.
    pub fn parse_element(&self, s: &str) -> Result<DihedralElement, DihedralError> {
        let s = s.trim();
        let err = || DihedralError::Parse(s.to_string());
        if s == "a" {
            return Ok(self.rotation(1));
        }
        if s == "b" {
            return Ok(self.reflection(0));
        }
        if let Some(exp) = s.strip_prefix("a^") {
            let i: i64 = exp.parse().map_err(|_| err())?;
            return Ok(self.rotation(i));
        }
        if let Some(rest) = s.strip_prefix("b*a") {
            let j: i64 = match rest.strip_prefix('^') {
                Some(exp) => exp.parse().map_err(|_| err())?,
                None if rest.is_empty() => 1,
                None => return Err(err()),
            };
            return Ok(self.reflection(j));
        }
        Err(err())
    }

    pub fn automorphism(&self, k: i64, t: i64) -> Result<DihedralAutomorphism, DihedralError> {
        let k = self.modn(k);
        if arith::gcd(k as u64, self.n as u64) != 1 {
            return Err(DihedralError::NotAUnit { k, n: self.n });
        }
        Ok(DihedralAutomorphism { k, t: self.modn(t) })
    }

    /// θ_{a^i} = σ_{1,i}: a ↦ a, b ↦ b·a^i.
    pub fn theta(&self, i: i64) -> DihedralAutomorphism {
        DihedralAutomorphism {
            k: 1,
            t: self.modn(i),
        }
    }

    /// σ_{k,t}(aⁱbᵟ) = a^{ik} (b a^t)^δ = a^{ik − tδ} bᵟ.
    pub fn aut_apply(&self, s: DihedralAutomorphism, x: DihedralElement) -> DihedralElement {
        let exp = x.exp as i64 * s.k as i64 - (x.flip as i64) * s.t as i64;
        DihedralElement {
            exp: self.modn(exp),
            flip: x.flip,
        }
    }

    /// Apply `s` first, then `u`: σ_{k₁,t₁}σ_{k₂,t₂} = σ_{k₁k₂, t₁k₂+t₂}.
    pub fn aut_compose(
        &self,
        s: DihedralAutomorphism,
        u: DihedralAutomorphism,
    ) -> DihedralAutomorphism {
        DihedralAutomorphism {
            k: s.k * u.k % self.n,
            t: (s.t * u.k + u.t) % self.n,
        }
    }

    pub fn aut_inverse(&self, s: DihedralAutomorphism) -> DihedralAutomorphism {
        let kinv = arith::mod_inverse(s.k as u64, self.n as u64)
            .expect("k is a unit by construction") as usize;
        DihedralAutomorphism {
            k: kinv,
            t: self.modn(-((s.t * kinv) as i64)),
        }
    }

    pub fn aut_conjugate(
        &self,
        s: DihedralAutomorphism,
        by: DihedralAutomorphism,
    ) -> DihedralAutomorphism {
        self.aut_compose(self.aut_compose(self.aut_inverse(by), s), by)
    }

    pub fn aut_order(&self, s: DihedralAutomorphism) -> u64 {
        let mut acc = s;
        let mut o = 1;
        while !acc.is_identity() {
            acc = self.aut_compose(acc, s);
            o += 1;
        }
        o
    }

    /// All n·φ(n) automorphisms σ_{k,t}, ordered by (k, t). For n ≥ 3 this
    /// is the whole of Aut(D₂ₙ); for n = 2 it misses the automorphisms of
    /// D₄ ≅ C₂×C₂ that move ⟨a⟩.
    pub fn all_automorphisms(&self) -> Vec<DihedralAutomorphism> {
        let mut out = Vec::new();
        for k in 1..self.n.max(2) {
            if arith::gcd(k as u64, self.n as u64) == 1 {
                for t in 0..self.n {
                    out.push(DihedralAutomorphism { k, t });
                }
            }
        }
        out
    }

    /// The vertex permutation of right multiplication by g: v ↦ v·g.
    pub fn right_regular_perm(&self, g: DihedralElement) -> Permutation {
        let images: Vec<usize> = (0..2 * self.n)
            .map(|v| {
                let x = self.from_vertex(v).expect("v in range");
                self.to_vertex(self.mul(x, g))
            })
            .collect();
        Permutation::new(images).expect("right multiplication is a bijection")
    }

    /// The vertex permutation induced by an automorphism.
    pub fn aut_to_perm(&self, s: DihedralAutomorphism) -> Permutation {
        let images: Vec<usize> = (0..2 * self.n)
            .map(|v| {
                let x = self.from_vertex(v).expect("v in range");
                self.to_vertex(self.aut_apply(s, x))
            })
            .collect();
        Permutation::new(images).expect("an automorphism is a bijection")
    }

    /// Fixed points of σ in D₂ₙ, in (exp, flip) order.
    pub fn fixed_point_set(&self, s: DihedralAutomorphism) -> Vec<DihedralElement> {
        self.elements()
            .into_iter()
            .filter(|&x| self.aut_apply(s, x) == x)
            .collect()
    }
}

/// R(D₂ₙ) = ⟨R(a), R(b)⟩ acting on the 2n vertices; always regular.
pub fn right_regular_group(n: usize) -> Result<PermGroup, DihedralError> {
    let d = Dihedral::new(n)?;
    let gens = [
        d.right_regular_perm(d.rotation(1)),
        d.right_regular_perm(d.reflection(0)),
    ];
    Ok(PermGroup::from_generators(2 * n, &gens).expect("regular generators are valid"))
}

/// Aut(D₂ₙ) as a permutation group on the 2n vertices; defined for n ≥ 3,
/// where it has order n·φ(n).
pub fn full_aut_group(n: usize) -> Result<PermGroup, DihedralError> {
    let d = Dihedral::new(n)?;
    if n < 3 {
        return Err(DihedralError::NTooSmall { n, min: 3 });
    }
    let mut gens = vec![d.aut_to_perm(d.theta(1))];
    for k in arith::unit_group_generators(n as u64) {
        let s = d.automorphism(k as i64, 0).expect("unit by construction");
        gens.push(d.aut_to_perm(s));
    }
    Ok(PermGroup::from_generators(2 * n, &gens).expect("valid generators"))
}

/// Hol(D₂ₙ) = R(D₂ₙ)⋊Aut(D₂ₙ) on 2n vertices, of order 2n·nφ(n); n ≥ 3.
pub fn holomorph(n: usize) -> Result<PermGroup, DihedralError> {
    let d = Dihedral::new(n)?;
    if n < 3 {
        return Err(DihedralError::NTooSmall { n, min: 3 });
    }
    let mut gens = vec![
        d.right_regular_perm(d.rotation(1)),
        d.right_regular_perm(d.reflection(0)),
        d.aut_to_perm(d.theta(1)),
    ];
    for k in arith::unit_group_generators(n as u64) {
        let s = d.automorphism(k as i64, 0).expect("unit by construction");
        gens.push(d.aut_to_perm(s));
    }
    Ok(PermGroup::from_generators(2 * n, &gens).expect("valid generators"))
}

/// Structural facts about Hol(D₂ₙ) around the subgroup ⟨R(a)⟩×⟨θ_a⟩,
/// checked by direct computation. The Sylow and commutation clauses are
/// statements about odd n; the report computes them regardless and callers
/// assert where they apply.
#[derive(Clone, Debug, Serialize)]
pub struct HolomorphReport {
    pub n: usize,
    pub hol_order: u64,
    /// ⟨R(a)⟩ and ⟨θ_a⟩ commute elementwise.
    pub rotation_theta_commute: bool,
    /// ⟨R(a)⟩ ∩ ⟨θ_a⟩ = 1, so their product is direct.
    pub rotation_theta_trivial_intersection: bool,
    /// ⟨R(a)⟩×⟨θ_a⟩ ⊴ Hol(D₂ₙ).
    pub product_normal_in_holomorph: bool,
    /// |⟨R(b)⟩ × (Sylow 2-subgroup of Aut(Cₙ))|.
    pub two_part_subgroup_order: u64,
    /// 2-part of |Hol(D₂ₙ)|; equals the previous field for odd n.
    pub hol_order_two_part: u64,
    /// Each α ∈ Aut(C_{pᵢ^{rᵢ}}) commutes with every p_j-element of
    /// ⟨R(a)⟩×⟨θ_a⟩, j ≠ i.
    pub component_commutes_cross_primes: bool,
    /// Only α = 1 in Aut(C_{pᵢ^{rᵢ}}) fixes an element of order pᵢ^{rᵢ}.
    pub only_identity_fixes_full_order: bool,
}

impl HolomorphReport {
    pub fn all_verified(&self) -> bool {
        self.rotation_theta_commute
            && self.rotation_theta_trivial_intersection
            && self.product_normal_in_holomorph
            && self.two_part_subgroup_order == self.hol_order_two_part
            && self.component_commutes_cross_primes
            && self.only_identity_fixes_full_order
    }
}

pub fn holomorph_structure_report(n: usize) -> Result<HolomorphReport, DihedralError> {
    let d = Dihedral::new(n)?;
    if n < 3 {
        return Err(DihedralError::NTooSmall { n, min: 3 });
    }
    let degree = 2 * n;
    let hol = holomorph(n)?;
    let hol_order = hol.order_u64().expect("holomorph order fits u64");

    let ra = d.right_regular_perm(d.rotation(1));
    let th = d.aut_to_perm(d.theta(1));
    let rotation_theta_commute = ra.compose(&th) == th.compose(&ra);

    let ra_group = PermGroup::from_generators(degree, std::slice::from_ref(&ra)).unwrap();
    let rotation_theta_trivial_intersection =
        (1..d.n).all(|m| !ra_group.contains(&th.power(m as i64)));

    let product = PermGroup::from_generators(degree, &[ra.clone(), th.clone()]).unwrap();
    let product_normal_in_holomorph = hol
        .generators()
        .iter()
        .all(|h| product.contains(&ra.conjugate_by(h)) && product.contains(&th.conjugate_by(h)));

    let mut two_gens = vec![d.right_regular_perm(d.reflection(0))];
    for k in arith::unit_group_two_part_generators(n as u64) {
        let s = d.automorphism(k as i64, 0).expect("unit by construction");
        two_gens.push(d.aut_to_perm(s));
    }
    let two_part_subgroup_order = PermGroup::from_generators(degree, &two_gens)
        .unwrap()
        .order_u64()
        .expect("small group");
    let hol_order_two_part = arith::two_part(hol_order);

    // ⟨R(a)⟩×⟨θ_a⟩ listed with element orders, for the p_j-element filter.
    let mut product_elements: Vec<(Permutation, u64)> = Vec::with_capacity(n * n);
    for s in 0..n {
        let rs = ra.power(s as i64);
        for m in 0..n {
            let p = rs.compose(&th.power(m as i64));
            let o = p.order();
            product_elements.push((p, o));
        }
    }

    let mut component_commutes_cross_primes = true;
    let mut only_identity_fixes_full_order = true;
    let factors = arith::factorize(n as u64);
    for &(p, r) in &factors {
        let q = p.pow(r);
        for u in 1..q {
            if arith::gcd(u, q) != 1 {
                continue;
            }
            let k = arith::embed_unit(n as u64, q, u);
            let alpha = d.automorphism(k as i64, 0).expect("unit by construction");
            let alpha_perm = d.aut_to_perm(alpha);
            for &(pj, _) in &factors {
                if pj == p {
                    continue;
                }
                for (el, o) in &product_elements {
                    let mut oo = *o;
                    while oo % pj == 0 {
                        oo /= pj;
                    }
                    if oo == 1 && el.compose(&alpha_perm) != alpha_perm.compose(el) {
                        component_commutes_cross_primes = false;
                    }
                }
            }
            let fixes_full_order = d
                .elements()
                .into_iter()
                .any(|x| d.element_order(x) == q && d.aut_apply(alpha, x) == x);
            if fixes_full_order != alpha.is_identity() {
                only_identity_fixes_full_order = false;
            }
        }
    }

    Ok(HolomorphReport {
        n,
        hol_order,
        rotation_theta_commute,
        rotation_theta_trivial_intersection,
        product_normal_in_holomorph,
        two_part_subgroup_order,
        hol_order_two_part,
        component_commutes_cross_primes,
        only_identity_fixes_full_order,
    })
}
