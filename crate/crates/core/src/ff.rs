//! Canonical finite fields GF(p^k) with elements packed into u64.
//!
//! An element with coordinates (c_0, ..., c_{k-1}) in the power basis of the
//! defining root is packed as the integer sum c_i * p^i. The defining
//! polynomial is the lexicographically least monic irreducible of degree k,
//! comparing coefficient tuples (c_0, c_1, ..., c_{k-1}) constant term first.
//!
//! The canonical multiplicative generator is chosen compatibly across the
//! subfield lattice: for every proper divisor d | k, raising the generator to
//! (p^k-1)/(p^d-1) lands on a root of the minimal polynomial of GF(p^d)'s own
//! canonical generator. That property is exactly what makes the
//! generator-power embedding rule a ring homomorphism, so [`Field::embed_into`]
//! can verify itself. Concretely: for k = 1 the generator is the least
//! primitive root mod p; for k >= 2 it is h^j where h is the least primitive
//! element in the same coordinate ordering and j is the least exponent >= 1,
//! coprime to p^k - 1, satisfying the subfield-compatibility congruences.

use crate::cyclo::CycNum;
use crate::memo::Memo;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Fields with at most this many elements get full log/exp tables.
pub const TABLE_MAX: u64 = 1 << 21;
/// Largest supported field size (packed elements must stay in u64 safely).
pub const FIELD_MAX: u64 = 1 << 62;

const MAX_K: usize = 64;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum FfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be >= 1")]
    DegreeZero,
    #[error("field GF({p}^{k}) exceeds the supported size 2^62")]
    TooLarge { p: u64, k: u32 },
    #[error("GF({ps}^{ks}) is not a subfield of GF({pt}^{kt})")]
    NotSubfield { ps: u64, ks: u32, pt: u64, kt: u32 },
    #[error("{m} does not divide the unit group order {q1}")]
    OrderNotDividing { m: u64, q1: u64 },
    #[error("conductor {n} is not a multiple of the element order {m}")]
    ConductorNotMultiple { n: u64, m: u64 },
}

// ---------------------------------------------------------------------------
// integer number theory helpers
// ---------------------------------------------------------------------------

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent-cycle Pollard rho; returns a nontrivial factor of composite n.
fn pollard_rho(n: u64) -> u64 {
    assert!(n > 1 && !is_prime(n));
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = num_integer::gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization, sorted by prime.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut counts: std::collections::BTreeMap<u64, u32> = Default::default();
    if n <= 1 {
        return Vec::new();
    }
    // strip small primes first, then fall back to rho
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            n /= p;
            *counts.entry(p).or_insert(0) += 1;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            *counts.entry(m).or_insert(0) += 1;
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    counts.into_iter().collect()
}

/// Largest divisor of n coprime to ell.
pub fn prime_to_part(mut n: u64, ell: u64) -> u64 {
    assert!(ell >= 2);
    while n % ell == 0 {
        n /= ell;
    }
    n
}

/// If q is a prime power p^k (k >= 1), return (p, k).
pub fn prime_power_split(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = factorize(q);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

/// All prime powers in [2, max], ascending.
pub fn prime_powers_up_to(max: u64) -> Vec<u64> {
    (2..=max).filter(|&q| prime_power_split(q).is_some()).collect()
}

// ---------------------------------------------------------------------------
// raw polynomial arithmetic on packed elements (pre-table and big fields)
// ---------------------------------------------------------------------------

fn unpack(p: u64, k: usize, mut x: u64, out: &mut [u64; MAX_K]) {
    for slot in out.iter_mut().take(k) {
        *slot = x % p;
        x /= p;
    }
}

fn pack(p: u64, k: usize, digits: &[u64]) -> u64 {
    let mut acc = 0u64;
    for i in (0..k).rev() {
        acc = acc * p + digits[i];
    }
    acc
}

mod polyops {
    use super::{pack, unpack, MAX_K};

    pub fn add(p: u64, k: usize, a: u64, b: u64) -> u64 {
        if k == 1 {
            return (a + b) % p;
        }
        let mut da = [0u64; MAX_K];
        let mut db = [0u64; MAX_K];
        unpack(p, k, a, &mut da);
        unpack(p, k, b, &mut db);
        for i in 0..k {
            da[i] = (da[i] + db[i]) % p;
        }
        pack(p, k, &da[..k])
    }

    pub fn neg(p: u64, k: usize, a: u64) -> u64 {
        if k == 1 {
            return (p - a % p) % p;
        }
        let mut da = [0u64; MAX_K];
        unpack(p, k, a, &mut da);
        for d in da.iter_mut().take(k) {
            *d = (p - *d) % p;
        }
        pack(p, k, &da[..k])
    }

    /// Schoolbook multiplication followed by reduction modulo the monic
    /// defining polynomial (little-endian, length k+1).
    pub fn mul(p: u64, poly: &[u64], a: u64, b: u64) -> u64 {
        let k = poly.len() - 1;
        if k == 1 {
            return ((a as u128 * b as u128) % p as u128) as u64;
        }
        let mut da = [0u64; MAX_K];
        let mut db = [0u64; MAX_K];
        unpack(p, k, a, &mut da);
        unpack(p, k, b, &mut db);
        let mut conv = [0u128; 2 * MAX_K];
        for i in 0..k {
            if da[i] == 0 {
                continue;
            }
            let ai = da[i] as u128;
            for j in 0..k {
                if db[j] != 0 {
                    conv[i + j] += ai * db[j] as u128;
                }
            }
        }
        let mut c = [0u64; 2 * MAX_K];
        for t in 0..2 * k - 1 {
            c[t] = (conv[t] % p as u128) as u64;
        }
        for t in (k..2 * k - 1).rev() {
            let cv = c[t];
            if cv == 0 {
                continue;
            }
            for j in 0..k {
                if poly[j] != 0 {
                    c[t - k + j] = (c[t - k + j] + cv * (p - poly[j])) % p;
                }
            }
        }
        pack(p, k, &c[..k])
    }

    pub fn pow(p: u64, poly: &[u64], a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(p, poly, acc, base);
            }
            base = mul(p, poly, base, base);
            e >>= 1;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// polynomials over the prime field (for irreducibility testing)
// ---------------------------------------------------------------------------

fn fp_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn fp_poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        // a mod b
        let lead_inv = powmod(b[b.len() - 1], p - 2, p);
        while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
            let shift = a.len() - b.len();
            let f = mulmod(a[a.len() - 1], lead_inv, p);
            if f != 0 {
                for (i, bc) in b.iter().enumerate() {
                    let idx = i + shift;
                    a[idx] = (a[idx] + mulmod(f, p - bc % p, p)) % p;
                }
            }
            fp_trim(&mut a);
            if a.len() < b.len() {
                break;
            }
            if a.len() == b.len() && a[a.len() - 1] == 0 {
                fp_trim(&mut a);
            }
        }
        std::mem::swap(&mut a, &mut b);
        fp_trim(&mut b);
    }
    a
}

/// Rabin irreducibility test for a monic degree-k polynomial over F_p.
fn is_irreducible(p: u64, poly: &[u64]) -> bool {
    let k = (poly.len() - 1) as u32;
    if k == 1 {
        return true;
    }
    let x_elt = p; // the element "x" packed
    // x^{p^k} must equal x
    let mut y = x_elt;
    for _ in 0..k {
        y = polyops::pow(p, poly, y, p);
    }
    if y != x_elt {
        return false;
    }
    // for each prime r | k: gcd(x^{p^{k/r}} - x, poly) must be constant
    for (r, _) in factorize(k as u64) {
        let steps = k as u64 / r;
        let mut z = x_elt;
        for _ in 0..steps {
            z = polyops::pow(p, poly, z, p);
        }
        let diff = polyops::add(p, k as usize, z, polyops::neg(p, k as usize, x_elt));
        let mut dcoeffs = [0u64; MAX_K];
        unpack(p, k as usize, diff, &mut dcoeffs);
        let g = fp_poly_gcd(poly.to_vec(), dcoeffs[..k as usize].to_vec(), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Lexicographically least monic irreducible of degree k over F_p, comparing
/// (c_0, ..., c_{k-1}) constant term first.
fn find_defining_poly(p: u64, k: u32) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1]; // the polynomial x
    }
    let k = k as usize;
    let total = (p as u128).pow(k as u32);
    let start = (p as u128).pow(k as u32 - 1); // skip c_0 = 0: divisible by x
    let mut m = start;
    while m < total {
        let mut mm = m;
        let mut poly = vec![0u64; k + 1];
        poly[k] = 1;
        for i in 0..k {
            poly[k - 1 - i] = (mm % p as u128) as u64;
            mm /= p as u128;
        }
        if is_irreducible(p, &poly) {
            return poly;
        }
        m += 1;
    }
    unreachable!("an irreducible polynomial of degree {k} over F_{p} exists");
}

// ---------------------------------------------------------------------------
// the Field handle
// ---------------------------------------------------------------------------

struct Tables {
    exp: Vec<u64>,
    log: Vec<u32>,
}

pub struct FieldRepr {
    p: u64,
    k: u32,
    q: u64,
    poly: Vec<u64>,
    gen: u64,
    q1_factors: Vec<(u64, u32)>,
    tables: Option<Tables>,
}

/// A canonical finite field; cheap to clone (shared internally).
#[derive(Clone)]
pub struct Field(Arc<FieldRepr>);

static FIELD_CACHE: OnceLock<Memo<(u64, u32), Field>> = OnceLock::new();
static EMBED_CACHE: OnceLock<Memo<(u64, u32, u32), Arc<Embedding>>> = OnceLock::new();

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.k)
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.k == other.0.k
    }
}
impl Eq for Field {}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.0.p, self.0.k).hash(state);
    }
}

impl Field {
    pub fn new(p: u64, k: u32) -> Result<Field, FfError> {
        if k == 0 {
            return Err(FfError::DegreeZero);
        }
        if !is_prime(p) {
            return Err(FfError::NotPrime(p));
        }
        let mut q: u64 = 1;
        for _ in 0..k {
            q = q.checked_mul(p).filter(|&v| v <= FIELD_MAX).ok_or(FfError::TooLarge { p, k })?;
        }
        let cache = FIELD_CACHE.get_or_init(Memo::new);
        Ok(cache.get_or_init((p, k), || Field(Arc::new(build_field(p, k, q)))))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn k(&self) -> u32 {
        self.0.k
    }
    pub fn q(&self) -> u64 {
        self.0.q
    }
    /// Monic defining polynomial, little-endian, length k+1.
    pub fn defining_poly(&self) -> &[u64] {
        &self.0.poly
    }
    /// Canonical generator of the unit group.
    pub fn gen(&self) -> u64 {
        self.0.gen
    }
    pub fn q1_factors(&self) -> &[(u64, u32)] {
        &self.0.q1_factors
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.0.q
    }

    /// Power-basis coordinates (c_0, ..., c_{k-1}).
    pub fn coords(&self, x: u64) -> Vec<u64> {
        debug_assert!(x < self.0.q);
        let mut out = Vec::with_capacity(self.0.k as usize);
        let mut v = x;
        for _ in 0..self.0.k {
            out.push(v % self.0.p);
            v /= self.0.p;
        }
        out
    }

    pub fn from_coords(&self, coords: &[u64]) -> u64 {
        assert!(coords.len() <= self.0.k as usize);
        let mut acc = 0u64;
        for &c in coords.iter().rev() {
            assert!(c < self.0.p, "coordinate {c} out of range for {self}");
            acc = acc * self.0.p + c;
        }
        acc
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        polyops::add(self.0.p, self.0.k as usize, a, b)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        polyops::add(self.0.p, self.0.k as usize, a, self.neg(b))
    }

    pub fn neg(&self, a: u64) -> u64 {
        polyops::neg(self.0.p, self.0.k as usize, a)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if let Some(t) = &self.0.tables {
            if a == 0 || b == 0 {
                return 0;
            }
            let q1 = self.0.q - 1;
            let s = t.log[a as usize] as u64 + t.log[b as usize] as u64;
            return t.exp[(s % q1) as usize];
        }
        polyops::mul(self.0.p, &self.0.poly, a, b)
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        if let Some(t) = &self.0.tables {
            let q1 = self.0.q - 1;
            let l = t.log[a as usize] as u64;
            return Some(t.exp[((q1 - l) % q1) as usize]);
        }
        Some(polyops::pow(self.0.p, &self.0.poly, a, self.0.q - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> u64 {
        self.mul(a, self.inv(b).expect("division by zero"))
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        if let Some(t) = &self.0.tables {
            if a == 0 {
                return if e == 0 { 1 } else { 0 };
            }
            let q1 = self.0.q - 1;
            let l = t.log[a as usize] as u128;
            return t.exp[((l * (e % q1) as u128) % q1 as u128) as usize];
        }
        polyops::pow(self.0.p, &self.0.poly, a, e)
    }

    pub fn frobenius(&self, a: u64) -> u64 {
        self.pow(a, self.0.p)
    }

    /// j-fold Frobenius x -> x^{p^j}.
    pub fn frobenius_iter(&self, a: u64, j: u32) -> u64 {
        let mut x = a;
        for _ in 0..j % self.0.k {
            x = self.frobenius(x);
        }
        x
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, a: u64) -> u64 {
        assert!(a != 0, "order of zero is undefined");
        let mut t = self.0.q - 1;
        for &(r, _) in &self.0.q1_factors {
            while t % r == 0 && self.pow(a, t / r) == 1 {
                t /= r;
            }
        }
        t
    }

    pub fn is_primitive(&self, a: u64) -> bool {
        a != 0 && self.order_of(a) == self.0.q - 1
    }

    /// Discrete logarithm base the canonical generator.
    pub fn dlog(&self, x: u64) -> u64 {
        assert!(x != 0, "dlog of zero");
        if let Some(t) = &self.0.tables {
            return t.log[x as usize] as u64;
        }
        // baby-step giant-step
        let q1 = self.0.q - 1;
        assert!(self.0.q <= 1 << 42, "dlog via BSGS not supported beyond 2^42 elements");
        let m = (q1 as f64).sqrt().ceil() as u64 + 1;
        let mut baby: HashMap<u64, u64> = HashMap::with_capacity(m as usize);
        let mut cur = 1u64;
        for j in 0..m {
            baby.entry(cur).or_insert(j);
            cur = self.mul(cur, self.0.gen);
        }
        let giant = self.inv(self.pow(self.0.gen, m)).unwrap();
        let mut y = x;
        for i in 0..=m {
            if let Some(&j) = baby.get(&y) {
                return (i * m + j) % q1;
            }
            y = self.mul(y, giant);
        }
        panic!("dlog: generator does not reach element {x} in {self}");
    }

    /// Canonical primitive m-th root of unity: gen^{(q-1)/m}.
    pub fn root_of_unity(&self, m: u64) -> Result<u64, FfError> {
        let q1 = self.0.q - 1;
        if m == 0 || q1 % m != 0 {
            return Err(FfError::OrderNotDividing { m, q1 });
        }
        Ok(self.pow(self.0.gen, q1 / m))
    }

    /// Discrete log of x inside the cyclic subgroup of order m (x^m = 1),
    /// base the canonical m-th root. Linear scan in m.
    pub fn dlog_in_subgroup(&self, x: u64, m: u64) -> Option<u64> {
        let g = self.root_of_unity(m).ok()?;
        let mut y = 1u64;
        for j in 0..m {
            if y == x {
                return Some(j);
            }
            y = self.mul(y, g);
        }
        None
    }

    /// Canonical lift of a root of unity to characteristic zero: the element
    /// gen^{(q-1)/m * j} of order m maps to zeta_m^j, expressed at the given
    /// conductor (which m must divide).
    pub fn lift_root_of_unity(&self, x: u64, conductor: u64) -> Result<CycNum, FfError> {
        assert!(x != 0, "cannot lift zero");
        let m = self.order_of(x);
        if conductor % m != 0 {
            return Err(FfError::ConductorNotMultiple { n: conductor, m });
        }
        let j = self.dlog_in_subgroup(x, m).expect("element of order m lies in the subgroup");
        Ok(CycNum::zeta(conductor, j * (conductor / m)))
    }

    /// Exponent of the canonical lift: x = gen^{(q-1)/m * j} of order m
    /// lifts to zeta_m^j; returns (j, m) in lowest terms of the subgroup.
    pub fn lift_exponent(&self, x: u64) -> (u64, u64) {
        assert!(x != 0);
        let m = self.order_of(x);
        let j = self.dlog_in_subgroup(x, m).expect("element lies in its own subgroup");
        (j, m)
    }

    /// The canonical embedding into a target field with the same p and
    /// k_src | k_tgt. Verified to be a ring homomorphism at construction.
    pub fn embed_into(&self, tgt: &Field) -> Result<Arc<Embedding>, FfError> {
        if self.0.p != tgt.0.p || tgt.0.k % self.0.k != 0 {
            return Err(FfError::NotSubfield {
                ps: self.0.p,
                ks: self.0.k,
                pt: tgt.0.p,
                kt: tgt.0.k,
            });
        }
        let cache = EMBED_CACHE.get_or_init(Memo::new);
        let key = (self.0.p, self.0.k, tgt.0.k);
        let src = self.clone();
        let tgt = tgt.clone();
        Ok(cache.get_or_init(key, move || Arc::new(Embedding::build(src, tgt))))
    }
}

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

/// Minimal polynomial over F_p of the canonical generator of `sub`,
/// returned as constants (little-endian, monic, degree k).
fn generator_minpoly(sub: &Field) -> Vec<u64> {
    let d = sub.k() as usize;
    // Frobenius orbit of the generator
    let mut orbit = Vec::with_capacity(d);
    let mut x = sub.gen();
    for _ in 0..d {
        orbit.push(x);
        x = sub.frobenius(x);
    }
    assert_eq!(x, sub.gen(), "Frobenius orbit must close after k steps");
    // product of (y - root) with coefficients in the subfield
    let mut coeffs: Vec<u64> = vec![1]; // constant polynomial 1 in y
    for r in &orbit {
        let neg_r = sub.neg(*r);
        let mut next = vec![0u64; coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = sub.add(next[i + 1], *c);
            next[i] = sub.add(next[i], sub.mul(*c, neg_r));
        }
        coeffs = next;
    }
    // every coefficient must be a constant of the prime field
    for c in &coeffs {
        assert!(*c < sub.p(), "generator minimal polynomial must have prime-field coefficients");
    }
    coeffs
}

/// CRT for x = r1 mod m1, x = r2 mod m2 with possibly non-coprime moduli.
fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<(u64, u64)> {
    let g = num_integer::gcd(m1, m2);
    if r1 % g != r2 % g {
        return None;
    }
    let lcm = m1 / g * m2;
    // x = r1 + m1 * t, with t = (r2 - r1)/g * inv(m1/g) mod (m2/g)
    let m2g = m2 / g;
    let diff = ((r2 as i128 - r1 as i128) / g as i128).rem_euclid(m2g as i128) as u64;
    let inv = mod_inverse(m1 / g % m2g, m2g)?;
    let t = mulmod(diff % m2g, inv, m2g.max(1));
    let x = (r1 as u128 + m1 as u128 * t as u128) % lcm as u128;
    Some((x as u64, lcm))
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        t -= q * new_t;
        std::mem::swap(&mut t, &mut new_t);
        r -= q * new_r;
        std::mem::swap(&mut r, &mut new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// m-th element (m >= 1) in the canonical element ordering: coordinate
/// vectors (c_0, ..., c_{k-1}) compared lexicographically constant term
/// first. Decodes m's base-p digits most-significant-first into c_0, c_1, ...
fn coord_lex_to_packed(p: u64, k: usize, mut m: u64) -> u64 {
    let mut coords = [0u64; MAX_K];
    for i in (0..k).rev() {
        coords[i] = m % p;
        m /= p;
    }
    pack(p, k, &coords[..k])
}

fn maximal_proper_divisors(k: u32) -> Vec<u32> {
    factorize(k as u64).iter().map(|&(r, _)| k / r as u32).collect()
}

fn proper_divisors(k: u32) -> Vec<u32> {
    (1..k).filter(|d| k % d == 0).collect()
}

fn build_field(p: u64, k: u32, q: u64) -> FieldRepr {
    let poly = find_defining_poly(p, k);
    let q1 = q - 1;
    let q1_factors = factorize(q1);

    let gen = if k == 1 {
        // least primitive root mod p (for p = 2 that is 1)
        (1..p)
            .find(|&g| {
                q1_factors.iter().all(|&(r, _)| powmod(g, q1 / r, p) != 1)
            })
            .expect("a primitive root exists")
    } else {
        find_generator_ext(p, k, q, &poly, &q1_factors)
    };

    let tables = if q <= TABLE_MAX {
        let mut exp = Vec::with_capacity(q1 as usize);
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = 1u64;
        for i in 0..q1 {
            exp.push(cur);
            assert!(log[cur as usize] == u32::MAX, "generator order defect");
            log[cur as usize] = i as u32;
            cur = polyops::mul(p, &poly, cur, gen);
        }
        assert_eq!(cur, 1, "generator does not have full order");
        Some(Tables { exp, log })
    } else {
        None
    };

    FieldRepr { p, k, q, poly, gen, q1_factors, tables }
}

fn find_generator_ext(p: u64, k: u32, q: u64, poly: &[u64], q1_factors: &[(u64, u32)]) -> u64 {
    let q1 = q - 1;
    let kk = k as usize;
    // least primitive element in the canonical coordinate-lex ordering
    let h = (1..q)
        .map(|m| coord_lex_to_packed(p, kk, m))
        .find(|&c| q1_factors.iter().all(|&(r, _)| polyops::pow(p, poly, c, q1 / r) != 1))
        .expect("a primitive element exists");

    // subfield compatibility in exponent space: for each maximal proper
    // divisor d of k, h^{j * (q-1)/(p^d-1)} must be a root of the minimal
    // polynomial of GF(p^d)'s generator.
    let mut progressions: Vec<(u64, u64)> = vec![(0, 1)];
    for d in maximal_proper_divisors(k) {
        let sub = Field::new(p, d).expect("subfield exists");
        let mu = generator_minpoly(&sub);
        let sub_order = sub.q() - 1;
        let e_d = q1 / sub_order;
        let big_h = polyops::pow(p, poly, h, e_d);
        // scan the cyclic subgroup of order p^d - 1 for a root of mu
        let mut t_found: Option<u64> = None;
        let mut cur = 1u64; // big_h^t
        for t in 0..sub_order {
            // Horner evaluation of mu at cur
            let mut acc = 0u64;
            for c in mu.iter().rev() {
                acc = polyops::mul(p, poly, acc, cur);
                acc = polyops::add(p, kk, acc, *c);
            }
            if acc == 0 {
                t_found = Some(t);
                break;
            }
            cur = polyops::mul(p, poly, cur, big_h);
        }
        let t0 = t_found.expect("subfield minimal polynomial splits in the extension");
        // allowed residues: t0 * p^i mod (p^d - 1), all Frobenius conjugates
        let mut allowed = Vec::with_capacity(d as usize);
        let mut a = t0 % sub_order;
        for _ in 0..d {
            allowed.push(a);
            a = ((a as u128 * p as u128) % sub_order as u128) as u64;
        }
        allowed.sort_unstable();
        allowed.dedup();
        let mut next: Vec<(u64, u64)> = Vec::new();
        for &(r, m) in &progressions {
            for &amt in &allowed {
                if let Some(merged) = crt_pair(r, m, amt, sub_order) {
                    next.push(merged);
                }
            }
        }
        assert!(!next.is_empty(), "no compatible generator exponent for GF({p}^{k})");
        next.sort_unstable();
        next.dedup();
        progressions = next;
    }

    // least exponent j >= 1 coprime to q-1 in any progression
    let mut best: Option<u64> = None;
    for &(r, m) in &progressions {
        let mut j = if r == 0 { m } else { r };
        let mut guard = 0u64;
        while num_integer::gcd(j, q1) != 1 {
            j += m;
            guard += 1;
            assert!(guard < 1_000_000, "no coprime exponent found in progression");
        }
        best = Some(best.map_or(j, |b| b.min(j)));
    }
    let j = best.expect("at least one progression exists");
    let g = polyops::pow(p, poly, h, j);

    // final verification: full order and compatibility over every proper divisor
    for &(r, _) in q1_factors {
        assert!(polyops::pow(p, poly, g, q1 / r) != 1, "generator lost primitivity");
    }
    for d in proper_divisors(k) {
        let sub = Field::new(p, d).expect("subfield exists");
        let mu = generator_minpoly(&sub);
        let img = polyops::pow(p, poly, g, q1 / (sub.q() - 1));
        let mut acc = 0u64;
        for c in mu.iter().rev() {
            acc = polyops::mul(p, poly, acc, img);
            acc = polyops::add(p, kk, acc, *c);
        }
        assert_eq!(acc, 0, "generator fails subfield compatibility at degree {d}");
    }
    g
}

// ---------------------------------------------------------------------------
// embeddings
// ---------------------------------------------------------------------------

/// The canonical field embedding GF(p^a) -> GF(p^ab) determined by the
/// generator-power rule g_src -> g_tgt^{(q_tgt-1)/(q_src-1)}. Verified to be
/// a ring homomorphism at construction.
pub struct Embedding {
    src: Field,
    tgt: Field,
    /// image of the source defining root, used for Horner evaluation
    root_image: u64,
}

impl Embedding {
    fn build(src: Field, tgt: Field) -> Embedding {
        let e = (tgt.q() - 1) / (src.q() - 1);
        let h = tgt.pow(tgt.gen(), e);
        let root_image = if src.k() == 1 {
            assert_eq!(
                h,
                src.gen(),
                "generator-power rule must fix the prime field generator"
            );
            0
        } else {
            let t0 = src.dlog(src.p()); // dlog of the defining root "x"
            let r = tgt.pow(h, t0);
            // the image must be a root of the source defining polynomial
            let mut acc = 0u64;
            for c in src.defining_poly().iter().rev() {
                acc = tgt.mul(acc, r);
                acc = tgt.add(acc, *c);
            }
            assert_eq!(acc, 0, "embedded root does not satisfy the defining polynomial");
            r
        };
        let emb = Embedding { src, tgt, root_image };
        // the generator-power rule must hold for the map we actually apply
        assert_eq!(
            emb.map(emb.src.gen()),
            h,
            "embedding is not compatible with canonical generators"
        );
        emb
    }

    pub fn src(&self) -> &Field {
        &self.src
    }
    pub fn tgt(&self) -> &Field {
        &self.tgt
    }

    /// Apply the embedding to a packed source element.
    pub fn map(&self, x: u64) -> u64 {
        debug_assert!(x < self.src.q());
        if self.src.k() == 1 {
            return x; // constants keep their packed value
        }
        let digits = self.src.coords(x);
        let mut acc = 0u64;
        for &c in digits.iter().rev() {
            acc = self.tgt.mul(acc, self.root_image);
            acc = self.tgt.add(acc, c);
        }
        acc
    }

    /// Pull a target element back along the embedding, or None when it lies
    /// outside the image subfield. Uses discrete logs, so the target must be
    /// within discrete-log range.
    pub fn preimage(&self, y: u64) -> Option<u64> {
        debug_assert!(y < self.tgt.q());
        if y == 0 {
            return Some(0);
        }
        let e = (self.tgt.q() - 1) / (self.src.q() - 1);
        let t = self.tgt.dlog(y);
        if t % e != 0 {
            return None;
        }
        let x = self.src.pow(self.src.gen(), t / e);
        debug_assert_eq!(self.map(x), y);
        Some(x)
    }
}
