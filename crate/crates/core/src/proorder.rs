//! Supernatural numbers (formal products of prime powers with infinite
//! exponents allowed), the pro-order of GL_n over the p-adic integers, and
//! the bad primes of GL_n(F_p) — the primes dividing the finite group order.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ff;
use crate::gl2;

#[derive(Debug, Error)]
pub enum SnError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("n must be at least 1, got {0}")]
    BadRank(u32),
}

/// An exponent slot of a supernatural number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exp {
    Finite(u32),
    Infinity,
}

impl Exp {
    fn add(self, other: Exp) -> Exp {
        match (self, other) {
            (Exp::Finite(a), Exp::Finite(b)) => Exp::Finite(a.saturating_add(b)),
            _ => Exp::Infinity,
        }
    }
}

/// A supernatural number: finitely many primes with exponents in
/// N ∪ {∞}. Zero exponents are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Supernatural {
    exponents: BTreeMap<u64, Exp>,
}

impl Supernatural {
    pub fn one() -> Supernatural {
        Supernatural {
            exponents: BTreeMap::new(),
        }
    }

    pub fn from_factor(p: u64, e: Exp) -> Supernatural {
        assert!(ff::is_prime(p), "{p} is not prime");
        let mut exponents = BTreeMap::new();
        if e != Exp::Finite(0) {
            exponents.insert(p, e);
        }
        Supernatural { exponents }
    }

    /// Factorize a positive integer by trial division.
    pub fn from_int(mut x: u128) -> Supernatural {
        assert!(x > 0, "only positive integers factor");
        let mut exponents = BTreeMap::new();
        let mut d: u128 = 2;
        while d * d <= x {
            if x % d == 0 {
                let mut e = 0u32;
                while x % d == 0 {
                    x /= d;
                    e += 1;
                }
                exponents.insert(d as u64, Exp::Finite(e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if x > 1 {
            exponents.insert(x as u64, Exp::Finite(1));
        }
        Supernatural { exponents }
    }

    pub fn exponent_of(&self, p: u64) -> Exp {
        self.exponents.get(&p).copied().unwrap_or(Exp::Finite(0))
    }

    /// The stored (nonzero) prime-exponent pairs in increasing prime order.
    pub fn factors(&self) -> impl Iterator<Item = (u64, Exp)> + '_ {
        self.exponents.iter().map(|(&p, &e)| (p, e))
    }

    pub fn primes(&self) -> Vec<u64> {
        self.exponents.keys().copied().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.exponents.values().all(|e| *e != Exp::Infinity)
    }

    /// Replace each infinite exponent with the given finite cap.
    pub fn truncate(&self, cap: u32) -> Supernatural {
        let mut out = Supernatural::one();
        for (p, e) in self.factors() {
            let e = match e {
                Exp::Infinity => Exp::Finite(cap),
                f => f,
            };
            out = sn_mul(&out, &Supernatural::from_factor(p, e));
        }
        out
    }
}

/// Product: exponents add, with ∞ absorbing.
pub fn sn_mul(a: &Supernatural, b: &Supernatural) -> Supernatural {
    let mut exponents = a.exponents.clone();
    for (p, e) in b.factors() {
        let slot = exponents.entry(p).or_insert(Exp::Finite(0));
        *slot = slot.add(e);
        if *slot == Exp::Finite(0) {
            exponents.remove(&p);
        }
    }
    Supernatural { exponents }
}

/// Least common multiple: exponents take maxima, with ∞ absorbing.
pub fn sn_lcm(a: &Supernatural, b: &Supernatural) -> Supernatural {
    let mut exponents = a.exponents.clone();
    for (p, e) in b.factors() {
        let slot = exponents.entry(p).or_insert(Exp::Finite(0));
        *slot = (*slot).max(e);
        if *slot == Exp::Finite(0) {
            exponents.remove(&p);
        }
    }
    Supernatural { exponents }
}

impl fmt::Display for Supernatural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let mut ordered: Vec<(u64, Exp)> = self.factors().collect();
        // finite factors first (ascending), infinite slots last
        ordered.sort_by_key(|&(p, e)| (e == Exp::Infinity, p));
        let parts: Vec<String> = ordered
            .into_iter()
            .map(|(p, e)| match e {
                Exp::Finite(1) => format!("{p}"),
                Exp::Finite(k) => format!("{p}^{k}"),
                Exp::Infinity => format!("{p}^inf"),
            })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// The pro-order of GL_n over the p-adic integers: the finite group order
/// |GL_n(F_p)| with its p-exponent promoted to ∞.
pub fn pro_order_gln(n: u32, p: u64) -> Result<Supernatural, SnError> {
    if n == 0 {
        return Err(SnError::BadRank(n));
    }
    if !ff::is_prime(p) {
        return Err(SnError::NotPrime(p));
    }
    let finite = Supernatural::from_int(gl2::group_order(n, p));
    let mut exponents = finite.exponents;
    exponents.insert(p, Exp::Infinity);
    Ok(Supernatural { exponents })
}

/// The primes dividing |GL_n(F_p)|, in increasing order; p is always
/// among them for n >= 2, and is included for n = 1 by convention of the
/// pro-order (the p-adic congruence filtration is pro-p).
pub fn bad_primes(n: u32, p: u64) -> Result<Vec<u64>, SnError> {
    Ok(pro_order_gln(n, p)?.primes())
}
