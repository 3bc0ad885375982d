//! Arithmetic in Z/n needed for dihedral automorphism groups: factorization,
//! Euler phi, CRT lifting, and explicit generators of the unit group (Z/n)*.
//!
//! Everything here targets desk-scale n (two-digit, occasionally three-digit
//! moduli), so the algorithms favour transparency over asymptotics.

/// Prime factorization with ascending primes.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut r = 0;
            while n.is_multiple_of(p) {
                n /= p;
                r += 1;
            }
            out.push((p, r));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .map(|(p, r)| p.pow(r - 1) * (p - 1))
        .product()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b: u128 = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `n` when `gcd(a, n) = 1`.
pub fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    // Extended Euclid on (a mod n, n).
    let (mut r0, mut r1) = ((a % n) as i128, n as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(n as i128) as u64)
}

/// Multiplicative order of a unit modulo `n`.
pub fn multiplicative_order(a: u64, n: u64) -> u64 {
    assert_eq!(gcd(a % n, n), 1, "order of a non-unit");
    let mut acc = a % n;
    let mut k = 1;
    while acc != 1 {
        acc = acc * (a % n) % n;
        k += 1;
    }
    k
}

/// Solves x ≡ r_i (mod m_i) for pairwise coprime moduli.
pub fn crt(residues: &[(u64, u64)]) -> u64 {
    let mut x: u64 = 0;
    let mut m: u64 = 1;
    for &(r, mi) in residues {
        // x' ≡ x (mod m), x' ≡ r (mod mi): x' = x + m·t.
        let minv = mod_inverse(m % mi, mi).expect("moduli must be coprime");
        let t = ((r as i128 - x as i128).rem_euclid(mi as i128) as u64) * minv % mi;
        x += m * t;
        m *= mi;
    }
    x % m
}

/// Smallest primitive root modulo an odd prime power p^r.
pub fn primitive_root(p: u64, r: u32) -> u64 {
    assert!(p % 2 == 1 && p > 2, "odd prime required");
    let q_primes: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    let g = (2..p)
        .find(|&g| q_primes.iter().all(|&q| mod_pow(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root");
    if r == 1 {
        return g;
    }
    // g lifts to p^r unless g^(p−1) ≡ 1 (mod p²), in which case g+p does.
    if mod_pow(g, p - 1, p * p) != 1 {
        g
    } else {
        g + p
    }
}

/// Generators of (Z/n)*, one or two per prime-power factor, each lifted by
/// CRT to be ≡ 1 modulo the other factors. Together they generate the whole
/// unit group.
pub fn unit_group_generators(n: u64) -> Vec<u64> {
    let mut gens = Vec::new();
    let factors = factorize(n);
    for &(p, r) in &factors {
        let q = p.pow(r);
        let locals: Vec<u64> = if p == 2 {
            match r {
                1 => vec![],
                2 => vec![3],
                // (Z/2^r)* = ⟨−1⟩ × ⟨5⟩ for r ≥ 3.
                _ => vec![q - 1, 5],
            }
        } else {
            vec![primitive_root(p, r) % q]
        };
        for g in locals {
            let residues: Vec<(u64, u64)> = factors
                .iter()
                .map(|&(p2, r2)| {
                    let q2 = p2.pow(r2);
                    (if q2 == q { g } else { 1 }, q2)
                })
                .collect();
            gens.push(crt(&residues));
        }
    }
    gens
}

/// Generators of the Sylow 2-subgroup of (Z/n)*: the odd-order power of
/// each unit-group generator, dropping those of odd order entirely.
pub fn unit_group_two_part_generators(n: u64) -> Vec<u64> {
    unit_group_generators(n)
        .into_iter()
        .filter_map(|g| {
            let o = multiplicative_order(g, n);
            let odd = o >> o.trailing_zeros();
            if o == odd {
                None
            } else {
                Some(mod_pow(g, odd, n))
            }
        })
        .collect()
}

/// The unit ≡ `k` mod p^r (the factor containing `q = p^r`), ≡ 1 mod the rest.
pub fn embed_unit(n: u64, q: u64, k: u64) -> u64 {
    let residues: Vec<(u64, u64)> = factorize(n)
        .into_iter()
        .map(|(p2, r2)| {
            let q2 = p2.pow(r2);
            (if q2 == q { k % q2 } else { 1 }, q2)
        })
        .collect();
    crt(&residues)
}

/// Largest power of 2 dividing x.
pub fn two_part(x: u64) -> u64 {
    assert!(x > 0);
    1 << x.trailing_zeros()
}
