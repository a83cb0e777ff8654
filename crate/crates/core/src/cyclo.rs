//! Exact arithmetic in cyclotomic fields Q(zeta_N).
//!
//! A [`CycNum`] stores rational coordinates in the power basis
//! `1, zeta, ..., zeta^{phi(N)-1}` of `Q[x]/(Phi_N)`. All arithmetic is exact;
//! [`CycNum::to_complex_approx`] is a display-only helper and must never feed
//! an assertion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::memo::Memo;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CycError {
    #[error("conductor must be >= 1")]
    BadConductor,
    #[error("galois exponent {j} is not coprime to the conductor {n}")]
    GaloisNotCoprime { j: u64, n: u64 },
    #[error("coordinate vector has length {got}, expected phi({n}) = {want}")]
    BadCoords { n: u64, got: usize, want: usize },
}

/// Euler totient by trial-division factorization.
pub fn phi(n: u64) -> u64 {
    assert!(n >= 1);
    let mut m = n;
    let mut result = n;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            result = result / d * (d - 1);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        result = result / m * (m - 1);
    }
    result
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut big = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                big.push(n / d);
            }
        }
        d += 1;
    }
    big.reverse();
    small.extend(big);
    small
}

// --- integer polynomial helpers (little-endian coefficient vectors) ---

fn int_poly_trim(p: &mut Vec<BigInt>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

/// Exact division of integer polynomials; panics if the division is inexact.
/// Divisor must be monic.
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false), "divisor must be monic");
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        assert!(rem.iter().all(|c| c.is_zero()));
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - dd] = c.clone();
        for (j, dc) in den.iter().enumerate() {
            let idx = i - dd + j;
            rem[idx] = &rem[idx] - &c * dc;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    int_poly_trim(&mut quot);
    quot
}

static CYCLOTOMIC_POLYS: OnceLock<Memo<u64, Arc<Vec<BigInt>>>> = OnceLock::new();

/// The N-th cyclotomic polynomial Phi_N as integer coefficients, little-endian.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<BigInt>> {
    let memo = CYCLOTOMIC_POLYS.get_or_init(Memo::new);
    memo.get_or_init(n, || {
        if n == 1 {
            return Arc::new(vec![BigInt::from(-1), BigInt::from(1)]);
        }
        // x^n - 1 divided by the product of Phi_d over proper divisors d | n.
        let mut num = vec![BigInt::zero(); (n + 1) as usize];
        num[0] = BigInt::from(-1);
        num[n as usize] = BigInt::from(1);
        let mut quot = num;
        for d in divisors(n) {
            if d < n {
                quot = int_poly_div_exact(&quot, &cyclotomic_poly(d));
            }
        }
        Arc::new(quot)
    })
}

/// Cached per-conductor data: Phi_N and the reduction table of all powers
/// zeta^t (t < N) expressed in the power basis. Those coordinates are integers.
pub struct CycCtx {
    pub n: u64,
    pub phi: usize,
    pub phi_poly: Arc<Vec<BigInt>>,
    /// rows[t] = integer coordinates of zeta^t in the power basis, t in [0, N).
    pub rows: Vec<Vec<BigInt>>,
    /// Same rows downcast to i64 for fast exact integer accumulation.
    pub int_rows: Vec<Vec<i64>>,
}

static CTX_CACHE: OnceLock<Memo<u64, Arc<CycCtx>>> = OnceLock::new();

pub fn ctx(n: u64) -> Arc<CycCtx> {
    assert!(n >= 1, "conductor must be >= 1");
    let memo = CTX_CACHE.get_or_init(Memo::new);
    memo.get_or_init(n, || {
        let phi_poly = cyclotomic_poly(n);
        let ph = phi_poly.len() - 1;
        // x^ph mod Phi = -(lower coefficients of Phi)
        let top_red: Vec<BigInt> = phi_poly[..ph].iter().map(|c| -c).collect();
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n as usize);
        let mut cur = vec![BigInt::zero(); ph];
        cur[0] = BigInt::one();
        for _ in 0..n {
            rows.push(cur.clone());
            // multiply by x and reduce
            let carry = cur[ph - 1].clone();
            for i in (1..ph).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = BigInt::zero();
            if !carry.is_zero() {
                for i in 0..ph {
                    cur[i] = &cur[i] + &carry * &top_red[i];
                }
            }
        }
        let int_rows = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        i64::try_from(c).unwrap_or_else(|_| {
                            panic!("reduction table coefficient overflows i64 at conductor {n}")
                        })
                    })
                    .collect()
            })
            .collect();
        Arc::new(CycCtx { n, phi: ph, phi_poly, rows, int_rows })
    })
}

/// An element of Q(zeta_N) in the power basis of the N-th cyclotomic field.
///
/// The conductor is representational: operations on mixed conductors raise to
/// the least common multiple and never attempt to descend afterwards.
#[derive(Clone, Debug)]
pub struct CycNum {
    n: u64,
    coords: Vec<BigRational>,
}

fn br_int(i: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(i))
}

impl CycNum {
    pub fn zero() -> Self {
        CycNum { n: 1, coords: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        CycNum { n: 1, coords: vec![BigRational::one()] }
    }

    pub fn from_int(v: i64) -> Self {
        CycNum { n: 1, coords: vec![br_int(v)] }
    }

    pub fn from_rational(v: BigRational) -> Self {
        CycNum { n: 1, coords: vec![v] }
    }

    /// zeta_N^k.
    pub fn zeta(n: u64, k: u64) -> Self {
        let c = ctx(n);
        let row = &c.rows[(k % n) as usize];
        CycNum { n, coords: row.iter().map(|x| BigRational::from_integer(x.clone())).collect() }
    }

    pub fn from_coords(n: u64, coords: Vec<BigRational>) -> Result<Self, CycError> {
        let c = ctx(n);
        if coords.len() != c.phi {
            return Err(CycError::BadCoords { n, got: coords.len(), want: c.phi });
        }
        Ok(CycNum { n, coords })
    }

    pub fn conductor(&self) -> u64 {
        self.n
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Some(r) iff the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    /// Rewrite in conductor `n` (current conductor must divide `n`).
    pub fn raise(&self, n: u64) -> CycNum {
        if n == self.n {
            return self.clone();
        }
        assert!(n % self.n == 0, "can only raise to a multiple of the conductor");
        let c = ctx(n);
        let step = n / self.n;
        let mut coords = vec![BigRational::zero(); c.phi];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let row = &c.rows[((i as u64) * step % n) as usize];
            for (j, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    coords[j] += a * r;
                }
            }
        }
        CycNum { n, coords }
    }

    fn common(a: &CycNum, b: &CycNum) -> (CycNum, CycNum, u64) {
        let n = num_integer::lcm(a.n, b.n);
        (a.raise(n), b.raise(n), n)
    }

    pub fn add(&self, rhs: &CycNum) -> CycNum {
        let (mut a, b, _) = CycNum::common(self, rhs);
        for (x, y) in a.coords.iter_mut().zip(b.coords.iter()) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, rhs: &CycNum) -> CycNum {
        let (mut a, b, _) = CycNum::common(self, rhs);
        for (x, y) in a.coords.iter_mut().zip(b.coords.iter()) {
            *x -= y;
        }
        a
    }

    pub fn neg(&self) -> CycNum {
        CycNum { n: self.n, coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, rhs: &CycNum) -> CycNum {
        let (a, b, n) = CycNum::common(self, rhs);
        let c = ctx(n);
        let ph = c.phi;
        // convolution
        let mut conv = vec![BigRational::zero(); 2 * ph - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !y.is_zero() {
                    conv[i + j] += x * y;
                }
            }
        }
        let mut coords = vec![BigRational::zero(); ph];
        for (t, v) in conv.into_iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if t < ph {
                coords[t] += v;
            } else {
                let row = &c.rows[(t as u64 % n) as usize];
                for (j, r) in row.iter().enumerate() {
                    if !r.is_zero() {
                        coords[j] += &v * r;
                    }
                }
            }
        }
        CycNum { n, coords }
    }

    pub fn scale(&self, r: &BigRational) -> CycNum {
        CycNum { n: self.n, coords: self.coords.iter().map(|c| c * r).collect() }
    }

    /// Galois action zeta -> zeta^j; requires gcd(j, N) = 1.
    pub fn galois(&self, j: u64) -> Result<CycNum, CycError> {
        let jm = j % self.n;
        if num_integer::gcd(jm, self.n) != 1 {
            return Err(CycError::GaloisNotCoprime { j, n: self.n });
        }
        let c = ctx(self.n);
        let mut coords = vec![BigRational::zero(); c.phi];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let row = &c.rows[((i as u64) * jm % self.n) as usize];
            for (k, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    coords[k] += a * r;
                }
            }
        }
        Ok(CycNum { n: self.n, coords })
    }

    /// Complex conjugation zeta -> zeta^{-1}.
    pub fn conj(&self) -> CycNum {
        if self.n == 1 {
            return self.clone();
        }
        self.galois(self.n - 1).expect("n-1 is coprime to n")
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// Phi_N over Q. Returns None for zero.
    pub fn inv(&self) -> Option<CycNum> {
        if self.is_zero() {
            return None;
        }
        let c = ctx(self.n);
        let phi_q: Vec<BigRational> =
            c.phi_poly.iter().map(|z| BigRational::from_integer(z.clone())).collect();
        let a = self.coords.clone();
        let inv = rat_poly_modinv(&a, &phi_q)?;
        let mut coords = inv;
        coords.resize(c.phi, BigRational::zero());
        Some(CycNum { n: self.n, coords })
    }

    /// Floating-point approximation (re, im). Display only: never use this in
    /// an assertion or verification path.
    pub fn to_complex_approx(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let v = rational_to_f64(a);
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / (self.n as f64);
            re += v * theta.cos();
            im += v * theta.sin();
        }
        (re, im)
    }

    /// Integer coordinates at conductor `n` if every coordinate is an integer
    /// fitting in i64.
    pub fn to_int_coords(&self, n: u64) -> Option<Vec<i64>> {
        let raised = self.raise(n);
        raised
            .coords
            .iter()
            .map(|c| {
                if c.is_integer() {
                    i64::try_from(c.numer()).ok()
                } else {
                    None
                }
            })
            .collect()
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // good enough for display purposes
    let num = r.numer();
    let den = r.denom();
    let fnum: f64 = num.to_string().parse().unwrap_or(f64::NAN);
    let fden: f64 = den.to_string().parse().unwrap_or(f64::NAN);
    fnum / fden
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        let (a, b, _) = CycNum::common(self, other);
        a.coords == b.coords
    }
}
impl Eq for CycNum {}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = if i == 0 {
                String::new()
            } else if i == 1 {
                format!("z{}", self.n)
            } else {
                format!("z{}^{}", self.n, i)
            };
            let coef = if mono.is_empty() {
                format!("{c}")
            } else if c.is_one() {
                mono.clone()
            } else if (-c).is_one() {
                format!("-{mono}")
            } else {
                format!("{c}*{mono}")
            };
            terms.push(coef);
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, t) in terms.iter().enumerate() {
            if i == 0 {
                out.push_str(t);
            } else if let Some(stripped) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        write!(f, "{out}")
    }
}

// --- rational polynomial helpers for the inverse ---

fn rat_poly_trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn rat_poly_is_zero(p: &[BigRational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn rat_poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    rat_poly_trim(&mut rem);
    let mut bb = b.to_vec();
    rat_poly_trim(&mut bb);
    assert!(!rat_poly_is_zero(&bb), "division by zero polynomial");
    let db = bb.len() - 1;
    if rem.len() - 1 < db || rat_poly_is_zero(&rem) {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    let lead = bb[db].clone();
    for i in (db..rem.len()).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = &rem[i] / &lead;
        quot[i - db] = c.clone();
        for (j, bc) in bb.iter().enumerate() {
            let idx = i - db + j;
            rem[idx] = &rem[idx] - &c * bc;
        }
    }
    rat_poly_trim(&mut rem);
    rat_poly_trim(&mut quot);
    (quot, rem)
}

fn rat_poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    rat_poly_trim(&mut out);
    out
}

fn rat_poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigRational::zero());
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    rat_poly_trim(&mut out);
    out
}

/// s with s*a = 1 mod m, if gcd(a, m) is a nonzero constant.
fn rat_poly_modinv(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    // extended Euclid: r0 = m, r1 = a
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    rat_poly_trim(&mut r0);
    rat_poly_trim(&mut r1);
    let mut s0: Vec<BigRational> = vec![BigRational::zero()];
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while !rat_poly_is_zero(&r1) {
        let (q, r) = rat_poly_divrem(&r0, &r1);
        let s = rat_poly_sub(&s0, &rat_poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // r0 = gcd; must be a nonzero constant
    if r0.len() != 1 || r0[0].is_zero() {
        return None;
    }
    let g = r0[0].clone();
    let mut inv = s0;
    for c in inv.iter_mut() {
        *c = &*c / &g;
    }
    let (_, rem) = rat_poly_divrem(&inv, m);
    Some(rem)
}

/// Outcome of exact linear solving over a cyclotomic field.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Unique(Vec<CycNum>),
    RankDeficient { rank: usize },
    Inconsistent,
}

/// Solve A x = b exactly over Q(zeta) by Gaussian elimination, raising all
/// entries to a common conductor first. `a` is row-major, rows of equal length.
pub fn solve_exact(a: &[Vec<CycNum>], b: &[CycNum]) -> SolveOutcome {
    let m = a.len();
    assert_eq!(m, b.len(), "matrix and rhs must have the same number of rows");
    let k = if m == 0 { 0 } else { a[0].len() };
    let mut n = 1u64;
    for row in a {
        assert_eq!(row.len(), k, "ragged matrix");
        for x in row {
            n = num_integer::lcm(n, x.conductor());
        }
    }
    for x in b {
        n = num_integer::lcm(n, x.conductor());
    }
    // augmented matrix
    let mut rows: Vec<Vec<CycNum>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let mut r: Vec<CycNum> = row.iter().map(|x| x.raise(n)).collect();
        r.push(b[i].raise(n));
        rows.push(r);
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut prow = 0usize;
    for col in 0..k {
        let Some(sel) = (prow..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(prow, sel);
        let pin = rows[prow][col].inv().expect("pivot is nonzero");
        for x in rows[prow].iter_mut() {
            *x = x.mul(&pin);
        }
        for r in 0..m {
            if r != prow && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c2 in col..=k {
                    let t = rows[prow][c2].mul(&f);
                    rows[r][c2] = rows[r][c2].sub(&t);
                }
            }
        }
        pivots.push((prow, col));
        prow += 1;
        if prow == m {
            break;
        }
    }
    // consistency: any row 0 ... 0 | nonzero ?
    for r in prow..m {
        if !rows[r][k].is_zero() {
            return SolveOutcome::Inconsistent;
        }
    }
    if pivots.len() < k {
        return SolveOutcome::RankDeficient { rank: pivots.len() };
    }
    let mut x = vec![CycNum::zero(); k];
    for &(r, c) in &pivots {
        x[c] = rows[r][k].clone();
    }
    SolveOutcome::Unique(x)
}

/// Basis of the right nullspace {x : A x = 0} over Q(zeta), one row per basis
/// vector. `a` is row-major with `cols` columns.
pub fn nullspace(a: &[Vec<CycNum>], cols: usize) -> Vec<Vec<CycNum>> {
    let m = a.len();
    let mut n = 1u64;
    for row in a {
        assert_eq!(row.len(), cols, "ragged matrix");
        for x in row {
            n = num_integer::lcm(n, x.conductor());
        }
    }
    let mut rows: Vec<Vec<CycNum>> =
        a.iter().map(|r| r.iter().map(|x| x.raise(n)).collect()).collect();
    let mut pivots: Vec<usize> = Vec::new(); // pivot column per pivot row
    let mut prow = 0usize;
    for col in 0..cols {
        let Some(sel) = (prow..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(prow, sel);
        let pin = rows[prow][col].inv().expect("pivot is nonzero");
        for x in rows[prow].iter_mut() {
            *x = x.mul(&pin);
        }
        for r in 0..m {
            if r != prow && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c2 in 0..cols {
                    let t = rows[prow][c2].mul(&f);
                    rows[r][c2] = rows[r][c2].sub(&t);
                }
            }
        }
        pivots.push(col);
        prow += 1;
        if prow == m {
            break;
        }
    }
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![CycNum::zero(); cols];
        v[free] = CycNum::one();
        for (prow, &pc) in pivots.iter().enumerate() {
            v[pc] = rows[prow][free].neg();
        }
        basis.push(v);
    }
    basis
}

// ---------------------------------------------------------------------------
// dense matrices over Q(zeta)
// ---------------------------------------------------------------------------

/// A dense row-major matrix over Q(zeta). Entries may carry different
/// conductors; arithmetic raises on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct CycMat {
    rows: usize,
    cols: usize,
    data: Vec<CycNum>,
}

impl CycMat {
    pub fn zeros(rows: usize, cols: usize) -> CycMat {
        CycMat {
            rows,
            cols,
            data: vec![CycNum::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> CycMat {
        let mut m = CycMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, CycNum::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> CycNum) -> CycMat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CycMat { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycNum {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycNum) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, rhs: &CycMat) -> CycMat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        CycMat::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = CycNum::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(rhs.get(k, j)));
            }
            acc
        })
    }

    pub fn trace(&self) -> CycNum {
        assert_eq!(self.rows, self.cols);
        let mut acc = CycNum::zero();
        for i in 0..self.rows {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    pub fn transpose(&self) -> CycMat {
        CycMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { CycNum::one() } else { CycNum::zero() };
                if *self.get(i, j) != want {
                    return false;
                }
            }
        }
        true
    }

    /// Exact inverse by Gauss-Jordan elimination; None when singular.
    pub fn inverse(&self) -> Option<CycMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = CycMat::identity(n);
        for col in 0..n {
            let sel = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if sel != col {
                for j in 0..n {
                    let x = a.get(sel, j).clone();
                    let y = a.get(col, j).clone();
                    a.set(sel, j, y);
                    a.set(col, j, x);
                    let x = inv.get(sel, j).clone();
                    let y = inv.get(col, j).clone();
                    inv.set(sel, j, y);
                    inv.set(col, j, x);
                }
            }
            let pin = a.get(col, col).inv().expect("pivot is nonzero");
            for j in 0..n {
                a.set(col, j, a.get(col, j).mul(&pin));
                inv.set(col, j, inv.get(col, j).mul(&pin));
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let t = a.get(col, j).mul(&f);
                    a.set(r, j, a.get(r, j).sub(&t));
                    let t = inv.get(col, j).mul(&f);
                    inv.set(r, j, inv.get(r, j).sub(&t));
                }
            }
        }
        Some(inv)
    }

    pub fn pow(&self, mut e: u64) -> CycMat {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = CycMat::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Signed power; negative exponents go through the inverse.
    pub fn pow_i(&self, e: i64) -> CycMat {
        if e < 0 {
            self.inverse()
                .expect("negative power of a singular matrix")
                .pow(e.unsigned_abs())
        } else {
            self.pow(e as u64)
        }
    }
}

/// Convenience: exact residual check A x - b = 0.
pub fn residual_is_zero(a: &[Vec<CycNum>], x: &[CycNum], b: &[CycNum]) -> bool {
    for (row, rhs) in a.iter().zip(b.iter()) {
        let mut acc = CycNum::zero();
        for (aij, xj) in row.iter().zip(x.iter()) {
            acc = acc.add(&aij.mul(xj));
        }
        if acc != *rhs {
            return false;
        }
    }
    true
}

/// Fast accumulator for Z-linear combinations of roots of unity at a fixed
/// conductor, used by inner products and zero tests on character values.
/// Exponents are stored mod N; the reduction to the power basis happens once.
pub struct RootAccumulator {
    n: u64,
    terms: HashMap<u64, i128>,
}

impl RootAccumulator {
    pub fn new(n: u64) -> Self {
        RootAccumulator { n, terms: HashMap::new() }
    }

    /// Add c * zeta_N^e.
    pub fn add_root(&mut self, e: u64, c: i128) {
        if c != 0 {
            *self.terms.entry(e % self.n).or_insert(0) += c;
        }
    }

    /// Reduce into integer power-basis coordinates.
    pub fn into_coords(self) -> Vec<i128> {
        let c = ctx(self.n);
        let mut out = vec![0i128; c.phi];
        for (t, v) in self.terms {
            if v == 0 {
                continue;
            }
            let row = &c.int_rows[t as usize];
            for (j, r) in row.iter().enumerate() {
                if *r != 0 {
                    out[j] += v * (*r as i128);
                }
            }
        }
        out
    }

    pub fn is_zero(self) -> bool {
        self.into_coords().iter().all(|&v| v == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta(n: u64) -> CycNum {
        CycNum::zeta(n, 1)
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(1), 1);
        assert_eq!(phi(4), 2);
        assert_eq!(phi(12), 4);
        assert_eq!(phi(168), 48);
    }

    #[test]
    fn cyclotomic_poly_small() {
        // Phi_4 = x^2 + 1
        let p4 = cyclotomic_poly(4);
        assert_eq!(*p4, vec![BigInt::from(1), BigInt::from(0), BigInt::from(1)]);
        // Phi_6 = x^2 - x + 1
        let p6 = cyclotomic_poly(6);
        assert_eq!(*p6, vec![BigInt::from(1), BigInt::from(-1), BigInt::from(1)]);
        // Phi_12 = x^4 - x^2 + 1
        let p12 = cyclotomic_poly(12);
        assert_eq!(
            *p12,
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(-1), BigInt::from(0), BigInt::from(1)]
        );
    }

    #[test]
    fn product_of_conjugate_pair_is_two() {
        // (1 + zeta_4)(1 - zeta_4) = 2
        let one = CycNum::one();
        let i = zeta(4);
        let prod = one.add(&i).mul(&one.sub(&i));
        assert_eq!(prod, CycNum::from_int(2));
    }

    #[test]
    fn mixed_conductors_raise_to_lcm() {
        let s = zeta(3).add(&zeta(5));
        assert_eq!(s.conductor(), 15);
        // and it is not rational
        assert!(s.as_rational().is_none());
    }

    #[test]
    fn conjugation_inverts_roots() {
        let z = zeta(8);
        assert_eq!(z.conj(), CycNum::zeta(8, 7));
        assert_eq!(z.mul(&z.conj()), CycNum::one());
    }

    #[test]
    fn galois_requires_coprime() {
        let z = zeta(8);
        assert!(z.galois(2).is_err());
        assert_eq!(z.galois(3).unwrap(), CycNum::zeta(8, 3));
    }

    #[test]
    fn inverse_of_golden_type_element() {
        // (1 + zeta_5)^{-1} exists and multiplies back to 1
        let v = CycNum::one().add(&zeta(5));
        let w = v.inv().unwrap();
        assert_eq!(v.mul(&w), CycNum::one());
        assert!(CycNum::zero().inv().is_none());
    }

    #[test]
    fn zeta_six_satisfies_its_polynomial() {
        // zeta_6^2 - zeta_6 + 1 = 0
        let z = zeta(6);
        let val = z.mul(&z).sub(&z).add(&CycNum::one());
        assert!(val.is_zero());
    }

    #[test]
    fn solve_three_by_three_with_roots() {
        // A deterministic 3x3 system with entries in Q(zeta_3).
        let z = zeta(3);
        let a = vec![
            vec![CycNum::one(), z.clone(), CycNum::from_int(2)],
            vec![z.clone(), CycNum::one(), CycNum::zero()],
            vec![CycNum::from_int(1), CycNum::from_int(3), z.mul(&z)],
        ];
        let b = vec![z.clone(), CycNum::from_int(1), CycNum::zero()];
        match solve_exact(&a, &b) {
            SolveOutcome::Unique(x) => assert!(residual_is_zero(&a, &x, &b)),
            other => panic!("expected unique solution, got {other:?}"),
        }
    }

    #[test]
    fn solve_reports_rank_deficiency_and_inconsistency() {
        let a = vec![
            vec![CycNum::one(), CycNum::one()],
            vec![CycNum::from_int(2), CycNum::from_int(2)],
        ];
        let b_consistent = vec![CycNum::one(), CycNum::from_int(2)];
        assert_eq!(solve_exact(&a, &b_consistent), SolveOutcome::RankDeficient { rank: 1 });
        let b_bad = vec![CycNum::one(), CycNum::from_int(3)];
        assert_eq!(solve_exact(&a, &b_bad), SolveOutcome::Inconsistent);
    }

    #[test]
    fn nullspace_over_cyclotomics() {
        // second row is zeta * first row: rank 1, nullity 2
        let z = zeta(4);
        let a = vec![
            vec![CycNum::one(), z.clone(), CycNum::zero()],
            vec![z.clone(), z.mul(&z), CycNum::zero()],
        ];
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let mut acc = CycNum::zero();
                for (x, y) in row.iter().zip(v.iter()) {
                    acc = acc.add(&x.mul(y));
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn root_accumulator_matches_dense_arithmetic() {
        // 2*zeta_12^5 - zeta_12^5 - zeta_12^5 = 0
        let mut acc = RootAccumulator::new(12);
        acc.add_root(5, 2);
        acc.add_root(5, -1);
        acc.add_root(17, -1); // 17 = 5 mod 12
        assert!(acc.is_zero());

        // sum over all 12-th roots of unity = 0
        let mut acc = RootAccumulator::new(12);
        for e in 0..12 {
            acc.add_root(e, 1);
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn display_reads_like_a_polynomial() {
        let v = CycNum::zeta(8, 3).sub(&CycNum::zeta(8, 1)).add(&CycNum::from_int(1));
        assert_eq!(format!("{v}"), "1 - z8 + z8^3");
    }

    #[test]
    fn matrix_inverse_and_powers() {
        // [[z4, 1], [0, 2]] over Q(zeta_4)
        let m = CycMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => CycNum::zeta(4, 1),
            (0, 1) => CycNum::one(),
            (1, 1) => CycNum::from_int(2),
            _ => CycNum::zero(),
        });
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
        assert_eq!(m.pow_i(-2), inv.mul(&inv));
        assert_eq!(m.pow(3), m.mul(&m).mul(&m));
        assert_eq!(
            m.trace(),
            CycNum::zeta(4, 1).add(&CycNum::from_int(2))
        );
        // zeta_4 * zeta_4^{-1} = 1 through matrix arithmetic
        let d = CycMat::from_fn(1, 1, |_, _| CycNum::zeta(4, 1));
        assert!(d.mul(&d.inverse().unwrap()).is_identity());
        // singular matrix has no inverse
        let s = CycMat::from_fn(2, 2, |_, _| CycNum::one());
        assert!(s.inverse().is_none());
        assert_eq!(s.transpose(), s);
    }
}
