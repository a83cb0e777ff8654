//! Conjugacy classes of GL2(F_q), group-order formulas for GL_n,
//! l-regularity, semisimple class counting, and generator/word machinery
//! for GL2 and its standard subgroups (Borel, torus, unipotent radical,
//! mirabolic).

use crate::ff::{self, Field, FfError};
use crate::linalg::FMat;
use num_integer::Integer;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use thiserror::Error;

/// Largest field size supported by the class machinery.
pub const MAX_Q: u64 = 128;

#[derive(Debug, Error)]
pub enum Gl2Error {
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("q = {q} exceeds the supported bound {max}")]
    TooLarge { q: u64, max: u64 },
    #[error("matrix {m} does not lie in {tag}({q})")]
    NotInSubgroup { m: String, tag: GroupTag, q: u64 },
    #[error(transparent)]
    Field(#[from] FfError),
}

// ---------------------------------------------------------------------------
// 2x2 matrices over a finite field
// ---------------------------------------------------------------------------

/// A 2x2 matrix over a finite field, row-major packed entries [a, b, c, d]
/// for [[a, b], [c, d]].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat2 {
    field: Field,
    e: [u64; 4],
}

impl Mat2 {
    pub fn new(field: &Field, e: [u64; 4]) -> Mat2 {
        debug_assert!(e.iter().all(|&x| x < field.q()));
        Mat2 {
            field: field.clone(),
            e,
        }
    }

    pub fn identity(field: &Field) -> Mat2 {
        Mat2::new(field, [1, 0, 0, 1])
    }

    pub fn scalar(field: &Field, z: u64) -> Mat2 {
        Mat2::new(field, [z, 0, 0, z])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn entries(&self) -> [u64; 4] {
        self.e
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.e[2 * i + j]
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        debug_assert_eq!(self.field, rhs.field);
        let f = &self.field;
        let [a, b, c, d] = self.e;
        let [e, g, h, i] = rhs.e;
        Mat2::new(
            f,
            [
                f.add(f.mul(a, e), f.mul(b, h)),
                f.add(f.mul(a, g), f.mul(b, i)),
                f.add(f.mul(c, e), f.mul(d, h)),
                f.add(f.mul(c, g), f.mul(d, i)),
            ],
        )
    }

    pub fn det(&self) -> u64 {
        let f = &self.field;
        f.sub(f.mul(self.e[0], self.e[3]), f.mul(self.e[1], self.e[2]))
    }

    pub fn trace(&self) -> u64 {
        self.field.add(self.e[0], self.e[3])
    }

    /// None when the matrix is singular.
    pub fn inverse(&self) -> Option<Mat2> {
        let f = &self.field;
        let dinv = f.inv(self.det())?;
        let [a, b, c, d] = self.e;
        Some(Mat2::new(
            f,
            [
                f.mul(d, dinv),
                f.mul(f.neg(b), dinv),
                f.mul(f.neg(c), dinv),
                f.mul(a, dinv),
            ],
        ))
    }

    pub fn is_identity(&self) -> bool {
        self.e == [1, 0, 0, 1]
    }

    pub fn pow(&self, mut e: u64) -> Mat2 {
        let mut base = self.clone();
        let mut acc = Mat2::identity(&self.field);
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
    pub fn pow_i(&self, e: i64) -> Mat2 {
        if e < 0 {
            self.inverse()
                .expect("negative power of a singular matrix")
                .pow(e.unsigned_abs())
        } else {
            self.pow(e as u64)
        }
    }

    /// Multiplicative order, computed by matrix powering: start from a known
    /// multiple p(q^2 - 1) of every element order in GL2(F_q) and strip
    /// prime factors while the power stays the identity.
    pub fn order(&self) -> u64 {
        let q = self.field.q();
        assert!(q <= (1 << 21), "order computation needs a table-mode field");
        assert_ne!(self.det(), 0, "order of a singular matrix");
        let mut ord = self.field.p() * (q * q - 1);
        for (r, _) in ff::factorize(ord) {
            while ord % r == 0 && self.pow(ord / r).is_identity() {
                ord /= r;
            }
        }
        debug_assert!(self.pow(ord).is_identity());
        ord
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.e[0], self.e[1], self.e[2], self.e[3]
        )
    }
}

// ---------------------------------------------------------------------------
// conjugacy classes
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Family {
    Central,
    Unipotent,
    Split,
    Elliptic,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Central => "central",
            Family::Unipotent => "unipotent",
            Family::Split => "split",
            Family::Elliptic => "elliptic",
        };
        f.write_str(s)
    }
}

/// Canonical parameters of a class. Central/unipotent/split values are
/// packed elements of F_q; the elliptic pair is packed in F_{q^2} with `x`
/// the Galois-orbit member of smaller discrete log and `x_conj = x^q`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ClassParams {
    Central { z: u64 },
    Unipotent { z: u64 },
    Split { a: u64, b: u64 },
    Elliptic { x: u64, x_conj: u64 },
}

#[derive(Clone, Debug)]
pub struct ClassData {
    pub family: Family,
    /// stable class name, e.g. "split:a=2,b=3" or "elliptic:dlog=7"
    pub label: String,
    pub params: ClassParams,
    pub rep: Mat2,
    pub size: u64,
    pub elt_order: u64,
}

/// The conjugacy classes of GL2(F_q) in a canonical order: central, then
/// unipotent, split, elliptic, each family sorted by its parameters.
///
/// Representatives are z*I, [[z,1],[0,z]], diag(a,b), and the companion
/// matrix of the degree-2 minimal polynomial of the elliptic parameter;
/// sizes are 1, q^2-1, q^2+q, q^2-q; element orders are computed by matrix
/// powering.
pub fn conj_classes(q: u64) -> Result<Vec<ClassData>, Gl2Error> {
    let (p, k) = ff::prime_power_split(q).ok_or(Gl2Error::NotPrimePower(q))?;
    if q > MAX_Q {
        return Err(Gl2Error::TooLarge { q, max: MAX_Q });
    }
    let f = Field::new(p, k)?;
    let ext = Field::new(p, 2 * k)?;
    let emb = f.embed_into(&ext)?;

    let mut classes = Vec::with_capacity((q * q - 1) as usize);
    for z in 1..q {
        let rep = Mat2::scalar(&f, z);
        classes.push(ClassData {
            family: Family::Central,
            label: format!("central:z={z}"),
            params: ClassParams::Central { z },
            elt_order: rep.order(),
            rep,
            size: 1,
        });
    }
    for z in 1..q {
        let rep = Mat2::new(&f, [z, 1, 0, z]);
        classes.push(ClassData {
            family: Family::Unipotent,
            label: format!("unipotent:z={z}"),
            params: ClassParams::Unipotent { z },
            elt_order: rep.order(),
            rep,
            size: q * q - 1,
        });
    }
    for a in 1..q {
        for b in (a + 1)..q {
            let rep = Mat2::new(&f, [a, 0, 0, b]);
            classes.push(ClassData {
                family: Family::Split,
                label: format!("split:a={a},b={b}"),
                params: ClassParams::Split { a, b },
                elt_order: rep.order(),
                rep,
                size: q * q + q,
            });
        }
    }
    // elliptic classes: Galois orbits {x, x^q} in F_{q^2} outside F_q; a
    // discrete log t lands in F_q exactly when q+1 divides t
    let big = q * q - 1;
    let mut seen = BTreeSet::new();
    for t in 1..big {
        if t % (q + 1) == 0 {
            continue;
        }
        let key = t.min((t * q) % big);
        if !seen.insert(key) {
            continue;
        }
        let x = ext.pow(ext.gen(), key);
        let xq = ext.frobenius_iter(x, k);
        debug_assert_ne!(x, xq);
        let tr = emb
            .preimage(ext.add(x, xq))
            .expect("trace lies in the base field");
        let nm = emb
            .preimage(ext.mul(x, xq))
            .expect("norm lies in the base field");
        // companion matrix of t^2 - tr*t + nm
        let rep = Mat2::new(&f, [0, f.neg(nm), 1, tr]);
        classes.push(ClassData {
            family: Family::Elliptic,
            label: format!("elliptic:dlog={key}"),
            params: ClassParams::Elliptic { x, x_conj: xq },
            elt_order: rep.order(),
            rep,
            size: q * q - q,
        });
    }

    assert_eq!(classes.len() as u64, q * q - 1, "class count");
    let semis = classes
        .iter()
        .filter(|c| c.family != Family::Unipotent)
        .count() as u64;
    assert_eq!(semis, q * (q - 1), "semisimple class count");
    let total: u128 = classes.iter().map(|c| c.size as u128).sum();
    assert_eq!(total, group_order(2, q), "class sizes sum to the group order");
    Ok(classes)
}

/// |GL_n(F_q)| = prod_{i=0}^{n-1} (q^n - q^i).
pub fn group_order(n: u32, q: u64) -> u128 {
    assert!(n >= 1 && q >= 2);
    let qn = (q as u128).checked_pow(n).expect("group order overflow");
    let mut acc: u128 = 1;
    let mut qi: u128 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(qn - qi).expect("group order overflow");
        qi = qi.checked_mul(q as u128).expect("group order overflow");
    }
    acc
}

/// A class is l-regular when its element order is coprime to l.
pub fn is_regular_class(c: &ClassData, ell: u64) -> bool {
    c.elt_order.gcd(&ell) == 1
}

/// Number of semisimple conjugacy classes of GL_n(F_q): q^{n-1} (q-1).
pub fn semisimple_class_count(n: u32, q: u64) -> u128 {
    assert!(n >= 1 && q >= 2);
    (q as u128)
        .checked_pow(n - 1)
        .and_then(|x| x.checked_mul(q as u128 - 1))
        .expect("semisimple count overflow")
}

/// Checking mode for `semisimple_class_count`: semisimple classes biject
/// with their characteristic polynomials, the monic degree-n polynomials
/// over F_q with nonzero constant term. Count those by direct enumeration
/// of all coefficient vectors and assert agreement with the closed form.
pub fn semisimple_class_count_enumerated(n: u32, q: u64) -> Result<u128, Gl2Error> {
    assert!((1..=4).contains(&n), "enumeration mode supports n <= 4");
    assert!(q <= 16, "enumeration mode supports q <= 16");
    if ff::prime_power_split(q).is_none() {
        return Err(Gl2Error::NotPrimePower(q));
    }
    let total = (q as u128).pow(n);
    let mut count: u128 = 0;
    for idx in 0..total {
        // idx encodes (c_0, ..., c_{n-1}) base q; the constant term is the
        // lowest digit
        if idx % (q as u128) != 0 {
            count += 1;
        }
    }
    assert_eq!(count, semisimple_class_count(n, q));
    Ok(count)
}

/// Exponent of GL2(F_q): the lcm of element orders over all classes.
pub fn group_exponent(q: u64) -> Result<u64, Gl2Error> {
    Ok(conj_classes(q)?
        .iter()
        .fold(1u64, |acc, c| acc.lcm(&c.elt_order)))
}

/// Largest divisor of the exponent of GL2(F_q) that is coprime to l.
pub fn prime_to_ell_exponent(q: u64, ell: u64) -> Result<u64, Gl2Error> {
    Ok(ff::prime_to_part(group_exponent(q)?, ell))
}

// ---------------------------------------------------------------------------
// generator sets and words
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GroupTag {
    /// all of GL2
    Gl2,
    /// Borel subgroup of upper-triangular matrices
    B,
    /// diagonal torus
    T,
    /// unipotent radical of B
    U,
    /// mirabolic subgroup: last row (0, 1)
    P0,
}

impl GroupTag {
    pub const ALL: [GroupTag; 5] = [
        GroupTag::Gl2,
        GroupTag::B,
        GroupTag::T,
        GroupTag::U,
        GroupTag::P0,
    ];

    /// display label including the field size, e.g. "GL2(9)"
    pub fn label(&self, q: u64) -> String {
        format!("{self}({q})")
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupTag::Gl2 => "GL2",
            GroupTag::B => "B",
            GroupTag::T => "T",
            GroupTag::U => "U",
            GroupTag::P0 => "P0",
        };
        f.write_str(s)
    }
}

/// A word in the generators of a `GenSet`: (generator index, exponent)
/// pairs multiplied left to right.
pub type Word = Vec<(usize, i64)>;

pub fn invert_word(w: &[(usize, i64)]) -> Word {
    w.iter().rev().map(|&(i, e)| (i, -e)).collect()
}

// s = u l^{-1} u = [[0,1],[-1,0]] in the GL2 generator indexing (u=0, l=1)
const S_WORD: [(usize, i64); 3] = [(0, 1), (1, -1), (0, 1)];
const S_INV_WORD: [(usize, i64); 3] = [(0, -1), (1, 1), (0, -1)];

/// Fixed generator list for GL2(F_q) or one of its standard subgroups,
/// with an algorithm writing any subgroup element as a word in the list.
///
/// Generators (g = canonical field generator):
/// - GL2: [[1,1],[0,1]], [[1,0],[1,1]], diag(g,1)
/// - B:   [[1,1],[0,1]], diag(g,1), diag(1,g)
/// - T:   diag(g,1), diag(1,g)
/// - U:   [[1,g^i],[0,1]] for 0 <= i < k (an F_p-basis of the top-right slot)
/// - P0:  [[1,1],[0,1]], diag(g,1)
pub struct GenSet {
    tag: GroupTag,
    field: Field,
    gens: Vec<Mat2>,
    /// tag U only: inverse of the matrix whose columns are the coordinates
    /// of 1, g, ..., g^{k-1}; rewrites field entries as exponent vectors
    u_basis_inv: Option<FMat>,
}

impl GenSet {
    pub fn new(field: &Field, tag: GroupTag) -> GenSet {
        let g = field.gen();
        let u = Mat2::new(field, [1, 1, 0, 1]);
        let l = Mat2::new(field, [1, 0, 1, 1]);
        let d1 = Mat2::new(field, [g, 0, 0, 1]);
        let d2 = Mat2::new(field, [1, 0, 0, g]);
        let (gens, u_basis_inv) = match tag {
            GroupTag::Gl2 => (vec![u, l, d1], None),
            GroupTag::B => (vec![u, d1, d2], None),
            GroupTag::T => (vec![d1, d2], None),
            GroupTag::P0 => (vec![u, d1], None),
            GroupTag::U => {
                let k = field.k() as usize;
                let gens = (0..k)
                    .map(|i| Mat2::new(field, [1, field.pow(g, i as u64), 0, 1]))
                    .collect();
                // invertible because a primitive element has degree k
                let prime = Field::new(field.p(), 1).expect("prime field");
                let basis = FMat::from_fn(&prime, k, k, |r, c| {
                    field.coords(field.pow(g, c as u64))[r]
                });
                (gens, Some(basis.inverse()))
            }
        };
        GenSet {
            tag,
            field: field.clone(),
            gens,
            u_basis_inv,
        }
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn gens(&self) -> &[Mat2] {
        &self.gens
    }

    /// Order of the generated subgroup.
    pub fn order(&self) -> u128 {
        let q = self.field.q() as u128;
        match self.tag {
            GroupTag::Gl2 => (q * q - 1) * (q * q - q),
            GroupTag::B => q * (q - 1) * (q - 1),
            GroupTag::T => (q - 1) * (q - 1),
            GroupTag::U => q,
            GroupTag::P0 => q * (q - 1),
        }
    }

    /// Membership test (by matrix shape and invertibility).
    pub fn contains(&self, m: &Mat2) -> bool {
        if m.field() != &self.field || m.det() == 0 {
            return false;
        }
        let [a, b, c, d] = m.entries();
        match self.tag {
            GroupTag::Gl2 => true,
            GroupTag::B => c == 0,
            GroupTag::T => b == 0 && c == 0,
            GroupTag::U => a == 1 && d == 1 && c == 0,
            GroupTag::P0 => c == 0 && d == 1,
        }
    }

    pub fn eval_word(&self, w: &[(usize, i64)]) -> Mat2 {
        let mut acc = Mat2::identity(&self.field);
        for &(i, e) in w {
            acc = acc.mul(&self.gens[i].pow_i(e));
        }
        acc
    }

    /// Word for [[1,t],[0,1]]: conjugate the elementary generator at
    /// `u_idx` by the torus generator diag(g,1) at `d_idx`.
    fn upper_word(&self, u_idx: usize, d_idx: usize, t: u64) -> Word {
        if t == 0 {
            return Vec::new();
        }
        let m = self.field.dlog(t) as i64;
        if m == 0 {
            return vec![(u_idx, 1)];
        }
        vec![(d_idx, m), (u_idx, 1), (d_idx, -m)]
    }

    /// GL2 word for diag(a, d) = D^dlog(a) * (s D^dlog(d) s^{-1}).
    fn gl2_diag_word(&self, a: u64, d: u64) -> Word {
        let alpha = self.field.dlog(a) as i64;
        let delta = self.field.dlog(d) as i64;
        let mut w = Vec::new();
        if alpha != 0 {
            w.push((2, alpha));
        }
        if delta != 0 {
            w.extend(S_WORD);
            w.push((2, delta));
            w.extend(S_INV_WORD);
        }
        w
    }

    /// Write a subgroup element as a word in the generators. The result is
    /// verified by re-evaluation before returning.
    pub fn word_for(&self, m: &Mat2) -> Result<Word, Gl2Error> {
        if !self.contains(m) {
            return Err(Gl2Error::NotInSubgroup {
                m: m.to_string(),
                tag: self.tag,
                q: self.field.q(),
            });
        }
        let f = &self.field;
        let [a, b, c, d] = m.entries();
        let w = match self.tag {
            GroupTag::Gl2 => {
                if c == 0 {
                    // upper triangular: u(b/d) * diag(a, d)
                    let mut w = self.upper_word(0, 2, f.div(b, d));
                    w.extend(self.gl2_diag_word(a, d));
                    w
                } else {
                    // Bruhat cell: u(a/c) * diag(-det/c, -c) * s * u(d/c)
                    let det = m.det();
                    let mut w = self.upper_word(0, 2, f.div(a, c));
                    w.extend(self.gl2_diag_word(f.div(f.neg(det), c), f.neg(c)));
                    w.extend(S_WORD);
                    w.extend(self.upper_word(0, 2, f.div(d, c)));
                    w
                }
            }
            GroupTag::B => {
                // u(b/d) * diag(g,1)^dlog(a) * diag(1,g)^dlog(d)
                let mut w = self.upper_word(0, 1, f.div(b, d));
                let alpha = f.dlog(a) as i64;
                let delta = f.dlog(d) as i64;
                if alpha != 0 {
                    w.push((1, alpha));
                }
                if delta != 0 {
                    w.push((2, delta));
                }
                w
            }
            GroupTag::T => {
                let mut w = Vec::new();
                let alpha = f.dlog(a) as i64;
                let delta = f.dlog(d) as i64;
                if alpha != 0 {
                    w.push((0, alpha));
                }
                if delta != 0 {
                    w.push((1, delta));
                }
                w
            }
            GroupTag::U => {
                // expand the top-right entry over the basis 1, g, ..., g^{k-1}
                let inv = self.u_basis_inv.as_ref().expect("U basis data");
                let p = f.p();
                let coords = f.coords(b);
                let mut w = Vec::new();
                for i in 0..coords.len() {
                    let mut ci = 0u64;
                    for (j, &xj) in coords.iter().enumerate() {
                        ci = (ci + inv.get(i, j) * xj) % p;
                    }
                    if ci != 0 {
                        w.push((i, ci as i64));
                    }
                }
                w
            }
            GroupTag::P0 => {
                // u(b) * diag(g,1)^dlog(a)
                let mut w = self.upper_word(0, 1, b);
                let alpha = f.dlog(a) as i64;
                if alpha != 0 {
                    w.push((1, alpha));
                }
                w
            }
        };
        assert_eq!(
            self.eval_word(&w),
            *m,
            "generator word must reproduce the matrix"
        );
        Ok(w)
    }

    /// Full subgroup element list by closure under the generators.
    pub fn enumerate(&self) -> Vec<Mat2> {
        assert!(
            self.order() <= (1 << 20),
            "closure enumeration is for small subgroups"
        );
        let mut seen: HashSet<[u64; 4]> = HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        let id = Mat2::identity(&self.field);
        seen.insert(id.entries());
        out.push(id.clone());
        queue.push_back(id);
        while let Some(m) = queue.pop_front() {
            for g in &self.gens {
                let next = m.mul(g);
                if seen.insert(next.entries()) {
                    out.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        out
    }

    /// Deterministic pseudo-random words whose group-element product is the
    /// identity: a random word followed by the inverse of a generator word
    /// for its product. Used to validate representation data.
    pub fn identity_words(&self, count: usize, seed: u64) -> Vec<Word> {
        let mut state = seed;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state
        };
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let len = 3 + (next() % 5) as usize;
            let mut w: Word = Vec::new();
            for _ in 0..len {
                let i = (next() % self.gens.len() as u64) as usize;
                let e = 1 + (next() % 3) as i64;
                let e = if next() & 1 == 0 { e } else { -e };
                w.push((i, e));
            }
            let prod = self.eval_word(&w);
            let back = self.word_for(&prod).expect("product stays in the subgroup");
            w.extend(invert_word(&back));
            debug_assert!(self.eval_word(&w).is_identity());
            out.push(w);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
