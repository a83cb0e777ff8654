//! Matrix-module constructors for GL2(F_q) and its standard subgroups:
//! the standard module, symmetric powers, determinant and Frobenius twists,
//! tensor and dual modules, the permutation module on the projective line,
//! modules induced from Borel characters, Whittaker-type modules on the
//! mirabolic subgroup, invariants/coinvariants under the unipotent radical,
//! and spaces of intertwining maps.
//!
//! Conventions. Modules are right modules: vectors are rows, a group element
//! g acts by v -> v * rho(g), and rho(gh) = rho(g) rho(h). Multiplicative
//! characters of F_q^x are specified by an integer exponent e against the
//! canonical field generator. Their values land in the coefficient domain as
//! follows: in characteristic p via the tautological embedding x -> x^e; in
//! characteristic l != p as powers of the canonical root of unity of order
//! m = prime-to-l part of q-1 (the character factors through the prime-to-l
//! quotient since the target has no l-torsion); in characteristic 0 as
//! powers of zeta_{q-1}.

use crate::cyclo::{self, CycMat, CycNum};
use crate::ff::{self, Field, FfError};
use crate::gl2::{GenSet, Gl2Error, GroupTag, Mat2, Word};
use crate::linalg::FMat;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RepError {
    #[error("module field has characteristic {found}, expected {expected}")]
    WrongCharacteristic { expected: u64, found: u64 },
    #[error(
        "field {field} lacks a root of unity of order {order}; the smallest \
         extension containing it has degree {degree} over the prime field"
    )]
    MissingRootOfUnity { order: u64, field: String, degree: u32 },
    #[error("additive character exponent {0} vanishes mod the characteristic")]
    TrivialPsi(u64),
    #[error("expected a 2-dimensional module, found dim {0}")]
    NotStandardDim(usize),
    #[error("symmetric power index {0} must be >= -1")]
    BadSymIndex(i64),
    #[error("operation requires finite-field coefficients")]
    NeedsFiniteScalars,
    #[error("incompatible modules: {0}")]
    Incompatible(String),
    #[error("invariants take a GL2 or B module and the subgroup tag U")]
    BadInvariantsInput,
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Group(#[from] Gl2Error),
}

/// Coefficient domain of a module: a finite field, or characteristic zero
/// with cyclotomic entries.
#[derive(Clone, PartialEq, Debug)]
pub enum Scalars {
    Fin(Field),
    Cyc,
}

impl Scalars {
    pub fn characteristic(&self) -> u64 {
        match self {
            Scalars::Fin(f) => f.p(),
            Scalars::Cyc => 0,
        }
    }

    pub fn fin(&self) -> Option<&Field> {
        match self {
            Scalars::Fin(f) => Some(f),
            Scalars::Cyc => None,
        }
    }
}

impl fmt::Display for Scalars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalars::Fin(fd) => write!(f, "{fd}"),
            Scalars::Cyc => f.write_str("Q(zeta)"),
        }
    }
}

/// A generator image: a square matrix over the coefficient domain.
#[derive(Clone, Debug)]
pub enum GMat {
    Fin(FMat),
    Cyc(CycMat),
}

impl GMat {
    pub fn dim(&self) -> usize {
        match self {
            GMat::Fin(m) => m.nrows(),
            GMat::Cyc(m) => m.nrows(),
        }
    }

    pub fn mul(&self, rhs: &GMat) -> GMat {
        match (self, rhs) {
            (GMat::Fin(a), GMat::Fin(b)) => GMat::Fin(a.matmul(b)),
            (GMat::Cyc(a), GMat::Cyc(b)) => GMat::Cyc(a.mul(b)),
            _ => panic!("mixed coefficient domains"),
        }
    }

    pub fn pow_i(&self, e: i64) -> GMat {
        match self {
            GMat::Fin(m) => {
                if e < 0 {
                    GMat::Fin(m.inverse().pow(e.unsigned_abs()))
                } else {
                    GMat::Fin(m.pow(e as u64))
                }
            }
            GMat::Cyc(m) => GMat::Cyc(m.pow_i(e)),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GMat::Fin(m) => *m == FMat::identity(m.field(), m.nrows()),
            GMat::Cyc(m) => m.is_identity(),
        }
    }

    pub fn as_fin(&self) -> &FMat {
        match self {
            GMat::Fin(m) => m,
            GMat::Cyc(_) => panic!("expected finite-field matrix"),
        }
    }

    pub fn as_cyc(&self) -> &CycMat {
        match self {
            GMat::Cyc(m) => m,
            GMat::Fin(_) => panic!("expected cyclotomic matrix"),
        }
    }
}

/// A matrix representation of GL2(F_q) or one of its standard subgroups,
/// given by images of the fixed generator list of the tagged group.
#[derive(Clone, Debug)]
pub struct MatRep {
    tag: GroupTag,
    group_field: Field,
    scalars: Scalars,
    dim: usize,
    gens: Vec<GMat>,
}

impl fmt::Display for MatRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} module of dim {} over {}",
            self.tag.label(self.group_field.q()),
            self.dim,
            self.scalars
        )
    }
}

impl MatRep {
    fn make(tag: GroupTag, gf: &Field, scalars: Scalars, dim: usize, gens: Vec<GMat>) -> MatRep {
        debug_assert_eq!(gens.len(), GenSet::new(gf, tag).gens().len());
        debug_assert!(gens.iter().all(|g| g.dim() == dim));
        MatRep {
            tag,
            group_field: gf.clone(),
            scalars,
            dim,
            gens,
        }
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn group_field(&self) -> &Field {
        &self.group_field
    }

    pub fn scalars(&self) -> &Scalars {
        &self.scalars
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gen_images(&self) -> &[GMat] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    pub fn gen_set(&self) -> GenSet {
        GenSet::new(&self.group_field, self.tag)
    }

    fn identity_gmat(&self) -> GMat {
        match &self.scalars {
            Scalars::Fin(f) => GMat::Fin(FMat::identity(f, self.dim)),
            Scalars::Cyc => GMat::Cyc(CycMat::identity(self.dim)),
        }
    }

    pub fn eval_word(&self, w: &Word) -> GMat {
        let mut acc = self.identity_gmat();
        for &(i, e) in w {
            acc = acc.mul(&self.gens[i].pow_i(e));
        }
        acc
    }

    /// Image of an arbitrary element of the tagged group, computed through
    /// a generator word.
    pub fn image_of(&self, m: &Mat2) -> Result<GMat, RepError> {
        let w = self.gen_set().word_for(m)?;
        Ok(self.eval_word(&w))
    }

    /// Evaluate `count` pseudo-random identity words; all must map to the
    /// identity matrix. This is the defining-relations check.
    pub fn satisfies_relations(&self, count: usize, seed: u64) -> bool {
        let gs = self.gen_set();
        gs.identity_words(count, seed)
            .iter()
            .all(|w| self.eval_word(w).is_identity())
    }
}

// ---------------------------------------------------------------------------
// character-value plumbing
// ---------------------------------------------------------------------------

/// A scalar in the coefficient domain.
#[derive(Clone, Debug, PartialEq)]
enum SVal {
    F(u64),
    C(CycNum),
}

fn sval_one(scal: &Scalars) -> SVal {
    match scal {
        Scalars::Fin(_) => SVal::F(1),
        Scalars::Cyc => SVal::C(CycNum::one()),
    }
}

fn sval_mul(scal: &Scalars, a: &SVal, b: &SVal) -> SVal {
    match (scal, a, b) {
        (Scalars::Fin(f), SVal::F(x), SVal::F(y)) => SVal::F(f.mul(*x, *y)),
        (Scalars::Cyc, SVal::C(x), SVal::C(y)) => SVal::C(x.mul(y)),
        _ => panic!("mixed scalar domains"),
    }
}

fn gmat_zeros(scal: &Scalars, rows: usize, cols: usize) -> GMat {
    match scal {
        Scalars::Fin(f) => GMat::Fin(FMat::zeros(f, rows, cols)),
        Scalars::Cyc => GMat::Cyc(CycMat::zeros(rows, cols)),
    }
}

fn gmat_set(m: &mut GMat, i: usize, j: usize, v: SVal) {
    match (m, v) {
        (GMat::Fin(m), SVal::F(x)) => m.set(i, j, x),
        (GMat::Cyc(m), SVal::C(x)) => m.set(i, j, x),
        _ => panic!("mixed scalar domains"),
    }
}

/// Multiplicative order of a mod m (gcd(a, m) = 1).
fn mult_order_mod(a: u64, m: u64) -> u32 {
    if m == 1 {
        return 1;
    }
    let mut x = a % m;
    let mut s = 1u32;
    while x != 1 {
        x = (x * (a % m)) % m;
        s += 1;
    }
    s
}

/// Value of the multiplicative character ("generator" ^ e) at the unit x,
/// in the given coefficient domain. See the module docs for the conventions
/// per characteristic.
fn unit_char_value(gf: &Field, scal: &Scalars, e: i64, x: u64) -> Result<SVal, RepError> {
    debug_assert!(x >= 1 && x < gf.q());
    let q1 = gf.q() - 1;
    match scal {
        Scalars::Fin(mf) if mf.p() == gf.p() => {
            let ee = e.rem_euclid(q1 as i64) as u64;
            let emb = gf.embed_into(mf)?;
            Ok(SVal::F(mf.pow(emb.map(x), ee)))
        }
        Scalars::Fin(mf) => {
            let m = ff::prime_to_part(q1, mf.p());
            let ee = e.rem_euclid(m as i64) as u64;
            let omega = mf.root_of_unity(m).map_err(|_| RepError::MissingRootOfUnity {
                order: m,
                field: mf.to_string(),
                degree: mult_order_mod(mf.p(), m),
            })?;
            Ok(SVal::F(mf.pow(omega, (ee * (gf.dlog(x) % m)) % m)))
        }
        Scalars::Cyc => {
            let ee = e.rem_euclid(q1 as i64) as u64;
            if q1 == 1 {
                return Ok(SVal::C(CycNum::one()));
            }
            Ok(SVal::C(CycNum::zeta(q1, (ee * gf.dlog(x)) % q1)))
        }
    }
}

// ---------------------------------------------------------------------------
// constructors
// ---------------------------------------------------------------------------

/// The zero module (dim 0) for any tag and coefficient domain.
pub fn zero_rep(gf: &Field, tag: GroupTag, scal: &Scalars) -> MatRep {
    let count = GenSet::new(gf, tag).gens().len();
    let gens = (0..count).map(|_| gmat_zeros(scal, 0, 0)).collect();
    MatRep::make(tag, gf, scal.clone(), 0, gens)
}

/// The standard 2-dimensional module of GL2(F_q) over a field of
/// characteristic p containing F_q: generators map to themselves.
pub fn standard_rep(gf: &Field, module_field: &Field) -> Result<MatRep, RepError> {
    if module_field.p() != gf.p() {
        return Err(RepError::WrongCharacteristic {
            expected: gf.p(),
            found: module_field.p(),
        });
    }
    let emb = gf.embed_into(module_field)?;
    let scal = Scalars::Fin(module_field.clone());
    let gens = GenSet::new(gf, GroupTag::Gl2)
        .gens()
        .iter()
        .map(|m| {
            let e = m.entries();
            GMat::Fin(FMat::from_rows(
                module_field,
                vec![
                    vec![emb.map(e[0]), emb.map(e[1])],
                    vec![emb.map(e[2]), emb.map(e[3])],
                ],
            ))
        })
        .collect();
    Ok(MatRep::make(GroupTag::Gl2, gf, scal, 2, gens))
}

/// Convolution product of coefficient vectors of homogeneous polynomials in
/// two variables, indexed by the degree in the second variable.
fn homog_mul(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

fn homog_pow(f: &Field, base: &[u64], e: usize) -> Vec<u64> {
    let mut acc = vec![1u64];
    for _ in 0..e {
        acc = homog_mul(f, &acc, base);
    }
    acc
}

/// The i-th symmetric power of a 2-dimensional module, on the basis of
/// monomials x^{i-s} y^s (s = 0..i). By convention i = -1 yields the zero
/// module.
pub fn sym_power(m: &MatRep, i: i64) -> Result<MatRep, RepError> {
    if i < -1 {
        return Err(RepError::BadSymIndex(i));
    }
    if m.dim != 2 {
        return Err(RepError::NotStandardDim(m.dim));
    }
    let Some(mf) = m.scalars.fin() else {
        return Err(RepError::NeedsFiniteScalars);
    };
    if i == -1 {
        return Ok(zero_rep(&m.group_field, m.tag, &m.scalars));
    }
    let i = i as usize;
    let dim = i + 1;
    let gens = m
        .gens
        .iter()
        .map(|g| {
            let g = g.as_fin();
            let x_img = [g.get(0, 0), g.get(0, 1)];
            let y_img = [g.get(1, 0), g.get(1, 1)];
            let rows = (0..=i)
                .map(|s| {
                    let a = homog_pow(mf, &x_img, i - s);
                    let b = homog_pow(mf, &y_img, s);
                    let mut row = homog_mul(mf, &a, &b);
                    row.resize(dim, 0);
                    row
                })
                .collect();
            GMat::Fin(FMat::from_rows(mf, rows))
        })
        .collect();
    Ok(MatRep::make(m.tag, &m.group_field, m.scalars.clone(), dim, gens))
}

/// Twist by the j-th power of the determinant character.
pub fn det_twist(m: &MatRep, j: i64) -> Result<MatRep, RepError> {
    let group_gens = GenSet::new(&m.group_field, m.tag);
    let mut gens = Vec::with_capacity(m.gens.len());
    for (img, gen) in m.gens.iter().zip(group_gens.gens()) {
        let v = unit_char_value(&m.group_field, &m.scalars, j, gen.det())?;
        let scaled = match (img, &v) {
            (GMat::Fin(a), SVal::F(c)) => GMat::Fin(a.scale(*c)),
            (GMat::Cyc(a), SVal::C(c)) => {
                GMat::Cyc(CycMat::from_fn(a.nrows(), a.ncols(), |r, s| {
                    a.get(r, s).mul(c)
                }))
            }
            _ => unreachable!(),
        };
        gens.push(scaled);
    }
    Ok(MatRep::make(
        m.tag,
        &m.group_field,
        m.scalars.clone(),
        m.dim,
        gens,
    ))
}

/// Tensor product (Kronecker product on generator images).
pub fn tensor_rep(m1: &MatRep, m2: &MatRep) -> Result<MatRep, RepError> {
    if m1.tag != m2.tag || m1.group_field != m2.group_field || m1.scalars != m2.scalars {
        return Err(RepError::Incompatible(format!("{m1} vs {m2}")));
    }
    if m1.scalars.fin().is_none() {
        return Err(RepError::NeedsFiniteScalars);
    }
    let gens = m1
        .gens
        .iter()
        .zip(&m2.gens)
        .map(|(a, b)| GMat::Fin(a.as_fin().kron(b.as_fin())))
        .collect();
    Ok(MatRep::make(
        m1.tag,
        &m1.group_field,
        m1.scalars.clone(),
        m1.dim * m2.dim,
        gens,
    ))
}

/// Dual (contragredient) module: inverse transpose on generator images.
pub fn dual_rep(m: &MatRep) -> MatRep {
    let gens = m
        .gens
        .iter()
        .map(|g| match g {
            GMat::Fin(a) => GMat::Fin(a.inverse().transpose()),
            GMat::Cyc(a) => GMat::Cyc(a.inverse().expect("invertible image").transpose()),
        })
        .collect();
    MatRep::make(m.tag, &m.group_field, m.scalars.clone(), m.dim, gens)
}

/// Frobenius twist: precompose with the entrywise p-th power automorphism
/// of GL2(F_q). On the fixed generators only diag(g,1) moves: its image is
/// raised to the p-th power.
pub fn frob_twist(m: &MatRep) -> Result<MatRep, RepError> {
    if m.tag != GroupTag::Gl2 {
        return Err(RepError::Incompatible(format!(
            "Frobenius twist needs a GL2 module, got {m}"
        )));
    }
    let Some(mf) = m.scalars.fin() else {
        return Err(RepError::NeedsFiniteScalars);
    };
    if mf.p() != m.group_field.p() {
        return Err(RepError::WrongCharacteristic {
            expected: m.group_field.p(),
            found: mf.p(),
        });
    }
    let p = m.group_field.p();
    let gens = vec![
        m.gens[0].clone(),
        m.gens[1].clone(),
        m.gens[2].pow_i(p as i64),
    ];
    Ok(MatRep::make(
        m.tag,
        &m.group_field,
        m.scalars.clone(),
        m.dim,
        gens,
    ))
}

/// Index of a projective-line point with homogeneous coordinates (c : d)
/// in the canonical basis order: the point at infinity (d = 0) first, then
/// the affine points t = c/d in coordinate order.
fn p1_index(gf: &Field, c: u64, d: u64) -> usize {
    if d == 0 {
        debug_assert_ne!(c, 0);
        0
    } else {
        1 + gf.div(c, d) as usize
    }
}

/// The permutation module on the q+1 points of the projective line. The
/// all-ones row spans the constant functions; the all-ones column is the
/// sum-of-values map.
pub fn perm_p1(gf: &Field, scal: &Scalars) -> MatRep {
    let q = gf.q();
    let dim = (q + 1) as usize;
    // row vector of homogeneous coordinates per basis index
    let point_row = |j: usize| -> (u64, u64) {
        if j == 0 {
            (1, 0)
        } else {
            ((j - 1) as u64, 1)
        }
    };
    let gens = GenSet::new(gf, GroupTag::Gl2)
        .gens()
        .iter()
        .map(|h| {
            let mut img = gmat_zeros(scal, dim, dim);
            for j in 0..dim {
                let (c, d) = point_row(j);
                let c2 = gf.add(gf.mul(c, h.get(0, 0)), gf.mul(d, h.get(1, 0)));
                let d2 = gf.add(gf.mul(c, h.get(0, 1)), gf.mul(d, h.get(1, 1)));
                gmat_set(&mut img, j, p1_index(gf, c2, d2), sval_one(scal));
            }
            img
        })
        .collect();
    MatRep::make(GroupTag::Gl2, gf, scal.clone(), dim, gens)
}

/// Coset representatives for B\GL2 in the canonical basis order used by
/// `perm_p1`: r_infinity = [[0,1],[-1,0]], then r_t = [[1,0],[t,1]].
pub(crate) fn borel_coset_reps(gf: &Field) -> Vec<Mat2> {
    let mut reps = Vec::with_capacity(gf.q() as usize + 1);
    reps.push(Mat2::new(gf, [0, 1, gf.neg(1), 0]));
    for t in 0..gf.q() {
        reps.push(Mat2::new(gf, [1, 0, t, 1]));
    }
    reps
}

/// The module induced from the Borel character diag(a, d) -> chi1(a)
/// chi2(d), with the characters given by exponents against the field
/// generator. Realized on coset functions with right-translation action;
/// dim q+1.
pub fn induced_from_borel(
    gf: &Field,
    e1: i64,
    e2: i64,
    scal: &Scalars,
) -> Result<MatRep, RepError> {
    let q = gf.q();
    let dim = (q + 1) as usize;
    let reps = borel_coset_reps(gf);
    let rep_invs: Vec<Mat2> = reps.iter().map(|r| r.inverse().expect("unit")).collect();
    let mut gens = Vec::new();
    for h in GenSet::new(gf, GroupTag::Gl2).gens() {
        let mut img = gmat_zeros(scal, dim, dim);
        for j in 0..dim {
            let x = reps[j].mul(h);
            let target = p1_index(gf, x.get(1, 0), x.get(1, 1));
            let b = x.mul(&rep_invs[target]);
            debug_assert_eq!(b.get(1, 0), 0, "factor must be upper triangular");
            let v1 = unit_char_value(gf, scal, e1, b.get(0, 0))?;
            let v2 = unit_char_value(gf, scal, e2, b.get(1, 1))?;
            gmat_set(&mut img, j, target, sval_mul(scal, &v1, &v2));
        }
        gens.push(img);
    }
    Ok(MatRep::make(GroupTag::Gl2, gf, scal.clone(), dim, gens))
}

/// Sum of base-p digits of a packed field element, mod p: the canonical
/// F_p-linear functional used for additive characters.
fn digit_sum(gf: &Field, t: u64) -> u64 {
    gf.coords(t).iter().sum::<u64>() % gf.p()
}

/// The mirabolic module induced from the additive character
/// u(t) -> omega_p^{psi_exp * digitsum(t)} of the unipotent radical:
/// a P0-module of dim q-1 on cosets U diag(g^j, 1). Requires a nontrivial
/// p-th root of unity in the coefficient domain, so char != p.
pub fn whittaker_mirabolic(gf: &Field, scal: &Scalars, psi_exp: u64) -> Result<MatRep, RepError> {
    let p = gf.p();
    let q = gf.q();
    if scal.characteristic() == p {
        return Err(RepError::WrongCharacteristic { expected: 0, found: p });
    }
    if psi_exp % p == 0 {
        return Err(RepError::TrivialPsi(psi_exp));
    }
    let root = match scal {
        Scalars::Fin(mf) => Some(mf.root_of_unity(p).map_err(|_| RepError::MissingRootOfUnity {
            order: p,
            field: mf.to_string(),
            degree: mult_order_mod(mf.p(), p),
        })?),
        Scalars::Cyc => None,
    };
    let psi = |t: u64| -> SVal {
        let e = (psi_exp * digit_sum(gf, t)) % p;
        match (scal, root) {
            (Scalars::Fin(mf), Some(w)) => SVal::F(mf.pow(w, e)),
            (Scalars::Cyc, None) => SVal::C(CycNum::zeta(p, e)),
            _ => unreachable!(),
        }
    };
    let dim = (q - 1) as usize;
    let g = gf.gen();
    let mut gens = Vec::new();
    for h in GenSet::new(gf, GroupTag::P0).gens() {
        let (alpha, beta) = (h.get(0, 0), h.get(0, 1));
        let mut img = gmat_zeros(scal, dim, dim);
        for j in 0..dim {
            let a = gf.pow(g, j as u64);
            let target = gf.dlog(gf.mul(a, alpha)) as usize;
            gmat_set(&mut img, j, target, psi(gf.mul(a, beta)));
        }
        gens.push(img);
    }
    Ok(MatRep::make(GroupTag::P0, gf, scal.clone(), dim, gens))
}

// ---------------------------------------------------------------------------
// invariants, coinvariants, Hom spaces
// ---------------------------------------------------------------------------

fn u_generator_images(m: &MatRep) -> Result<Vec<FMat>, RepError> {
    GenSet::new(&m.group_field, GroupTag::U)
        .gens()
        .iter()
        .map(|u| Ok(m.image_of(u)?.as_fin().clone()))
        .collect()
}

/// Row basis of the joint fixed space of the unipotent radical.
pub fn u_fixed_basis(m: &MatRep) -> Result<Vec<Vec<u64>>, RepError> {
    if !matches!(m.tag, GroupTag::Gl2 | GroupTag::B) {
        return Err(RepError::BadInvariantsInput);
    }
    let Some(mf) = m.scalars.fin() else {
        return Err(RepError::NeedsFiniteScalars);
    };
    if m.dim == 0 {
        return Ok(Vec::new());
    }
    let id = FMat::identity(mf, m.dim);
    let blocks: Vec<FMat> = u_generator_images(m)?
        .into_iter()
        .map(|g| g.sub(&id))
        .collect();
    let refs: Vec<&FMat> = blocks.iter().collect();
    Ok(FMat::hstack(&refs).left_nullspace())
}

/// Restrict the action matrices `bigs` to the row space of `basis`,
/// expressing images in basis coordinates.
fn restrict_to_basis(mf: &Field, basis: &[Vec<u64>], bigs: &[FMat]) -> Vec<FMat> {
    let r = basis.len();
    if r == 0 {
        return bigs.iter().map(|_| FMat::zeros(mf, 0, 0)).collect();
    }
    let b = FMat::from_rows(mf, basis.to_vec());
    let bt = b.transpose();
    bigs.iter()
        .map(|big| {
            let v = b.matmul(big);
            let x = bt
                .solve(&v.transpose())
                .expect("subspace is stable under the action");
            let c = x.transpose();
            debug_assert_eq!(c.matmul(&b), v);
            debug_assert_eq!(c.nrows(), r);
            c
        })
        .collect()
}

/// Invariants under the unipotent radical, as a module for the torus T
/// (which normalizes U). Input must be a GL2 or B module over a finite
/// field; `h` must be the tag U.
pub fn invariants(m: &MatRep, h: GroupTag) -> Result<MatRep, RepError> {
    if h != GroupTag::U {
        return Err(RepError::BadInvariantsInput);
    }
    let basis = u_fixed_basis(m)?;
    let mf = m.scalars.fin().expect("checked by u_fixed_basis").clone();
    let t_imgs: Vec<FMat> = GenSet::new(&m.group_field, GroupTag::T)
        .gens()
        .iter()
        .map(|t| Ok(m.image_of(t)?.as_fin().clone()))
        .collect::<Result<_, RepError>>()?;
    let gens = restrict_to_basis(&mf, &basis, &t_imgs)
        .into_iter()
        .map(GMat::Fin)
        .collect();
    Ok(MatRep::make(
        GroupTag::T,
        &m.group_field,
        m.scalars.clone(),
        basis.len(),
        gens,
    ))
}

/// Action matrices induced on the quotient by the row span of `span`
/// (which must be invariant under every matrix in `bigs`). The quotient
/// basis is the set of non-pivot coordinates of the reduced span.
fn quotient_action(mf: &Field, dim: usize, span: &[Vec<u64>], bigs: &[FMat]) -> (usize, Vec<FMat>) {
    if span.is_empty() {
        return (dim, bigs.to_vec());
    }
    let mut w = FMat::from_rows(mf, span.to_vec());
    let pivots = w.rref();
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = (0..dim).filter(|j| !pivot_set.contains(j)).collect();
    let qdim = free.len();

    // reduce a row vector modulo the row space of w (in reduced echelon form)
    let reduce = |v: &mut Vec<u64>| {
        for (prow, &pc) in pivots.iter().enumerate() {
            let c = v[pc];
            if c == 0 {
                continue;
            }
            for j in 0..dim {
                let t = mf.mul(c, w.get(prow, j));
                v[j] = mf.sub(v[j], t);
            }
        }
    };

    let gens = bigs
        .iter()
        .map(|big| {
            let mut img = FMat::zeros(mf, qdim, qdim);
            for (r, &j) in free.iter().enumerate() {
                let mut v: Vec<u64> = big.row(j).to_vec();
                reduce(&mut v);
                for (c, &jc) in free.iter().enumerate() {
                    img.set(r, c, v[jc]);
                }
                debug_assert!(
                    pivots.iter().all(|&pc| v[pc] == 0),
                    "span must be invariant"
                );
            }
            img
        })
        .collect();
    (qdim, gens)
}

/// Coinvariants under the unipotent radical (quotient by the span of
/// v - v*rho(u)), as a T-module. Same preconditions as `invariants`.
pub fn coinvariants(m: &MatRep, h: GroupTag) -> Result<MatRep, RepError> {
    if h != GroupTag::U || !matches!(m.tag, GroupTag::Gl2 | GroupTag::B) {
        return Err(RepError::BadInvariantsInput);
    }
    let Some(mf) = m.scalars.fin() else {
        return Err(RepError::NeedsFiniteScalars);
    };
    let mf = mf.clone();
    if m.dim == 0 {
        return Ok(zero_rep(&m.group_field, GroupTag::T, &m.scalars));
    }
    let id = FMat::identity(&mf, m.dim);
    let mut span: Vec<Vec<u64>> = Vec::new();
    for g in u_generator_images(m)? {
        let d = g.sub(&id);
        for i in 0..d.nrows() {
            span.push(d.row(i).to_vec());
        }
    }
    let t_imgs: Vec<FMat> = GenSet::new(&m.group_field, GroupTag::T)
        .gens()
        .iter()
        .map(|t| Ok(m.image_of(t)?.as_fin().clone()))
        .collect::<Result<_, RepError>>()?;
    let (qdim, gens) = quotient_action(&mf, m.dim, &span, &t_imgs);
    Ok(MatRep::make(
        GroupTag::T,
        &m.group_field,
        m.scalars.clone(),
        qdim,
        gens.into_iter().map(GMat::Fin).collect(),
    ))
}

/// Restriction of a finite-field module to an invariant row subspace,
/// expressed on the given basis rows. Panics if the span is not invariant.
pub fn sub_module(m: &MatRep, basis: &[Vec<u64>]) -> Result<MatRep, RepError> {
    let Some(mf) = m.scalars.fin() else {
        return Err(RepError::NeedsFiniteScalars);
    };
    let bigs: Vec<FMat> = m.gens.iter().map(|g| g.as_fin().clone()).collect();
    let gens = restrict_to_basis(mf, basis, &bigs)
        .into_iter()
        .map(GMat::Fin)
        .collect();
    Ok(MatRep::make(
        m.tag,
        &m.group_field,
        m.scalars.clone(),
        basis.len(),
        gens,
    ))
}

/// Quotient of a finite-field module by an invariant row subspace.
pub fn quotient_module(m: &MatRep, basis: &[Vec<u64>]) -> Result<MatRep, RepError> {
    let Some(mf) = m.scalars.fin() else {
        return Err(RepError::NeedsFiniteScalars);
    };
    let bigs: Vec<FMat> = m.gens.iter().map(|g| g.as_fin().clone()).collect();
    let (qdim, gens) = quotient_action(mf, m.dim, basis, &bigs);
    Ok(MatRep::make(
        m.tag,
        &m.group_field,
        m.scalars.clone(),
        qdim,
        gens.into_iter().map(GMat::Fin).collect(),
    ))
}

/// The trivial one-dimensional module of the tagged group.
pub fn trivial_rep(gf: &Field, tag: GroupTag, scal: &Scalars) -> MatRep {
    let count = GenSet::new(gf, tag).gens().len();
    let gens = (0..count)
        .map(|_| match scal {
            Scalars::Fin(f) => GMat::Fin(FMat::identity(f, 1)),
            Scalars::Cyc => GMat::Cyc(CycMat::identity(1)),
        })
        .collect();
    MatRep::make(tag, gf, scal.clone(), 1, gens)
}

/// The one-dimensional B-module given by the Borel character
/// diag(a, d) -> chi1(a) chi2(d) (exponents against the field generator).
pub fn borel_character_rep(
    gf: &Field,
    e1: i64,
    e2: i64,
    scal: &Scalars,
) -> Result<MatRep, RepError> {
    let mut gens = Vec::new();
    for b in GenSet::new(gf, GroupTag::B).gens() {
        let v1 = unit_char_value(gf, scal, e1, b.get(0, 0))?;
        let v2 = unit_char_value(gf, scal, e2, b.get(1, 1))?;
        let mut img = gmat_zeros(scal, 1, 1);
        gmat_set(&mut img, 0, 0, sval_mul(scal, &v1, &v2));
        gens.push(img);
    }
    Ok(MatRep::make(GroupTag::B, gf, scal.clone(), 1, gens))
}

/// Induction of a finite-field module from a proper subgroup tag up to the
/// full GL2: the basis is indexed by (right coset of H) x (input basis),
/// and a group element permutes the cosets with H-valued cocycle blocks.
/// The ambient group is enumerated, so this is for desk-scale q.
pub fn induced_module(sub: &MatRep) -> Result<MatRep, RepError> {
    let gf = sub.group_field().clone();
    let Some(mf) = sub.scalars().fin() else {
        return Err(RepError::NeedsFiniteScalars);
    };
    let mf = mf.clone();
    if sub.tag() == GroupTag::Gl2 {
        return Err(RepError::Incompatible(
            "induction starts from a proper subgroup".into(),
        ));
    }
    let hset = GenSet::new(&gf, sub.tag());
    let gset = GenSet::new(&gf, GroupTag::Gl2);
    // right-coset representatives: Hx = Hr iff x r^{-1} lies in H
    let mut reps: Vec<Mat2> = Vec::new();
    let mut rep_invs: Vec<Mat2> = Vec::new();
    for x in gset.enumerate() {
        if !rep_invs.iter().any(|rinv| hset.contains(&x.mul(rinv))) {
            rep_invs.push(x.inverse().expect("group element"));
            reps.push(x);
        }
    }
    let c = reps.len();
    debug_assert_eq!(c as u128 * hset.order(), gset.order());
    let d = sub.dim();
    let dim = c * d;
    let mut gens = Vec::new();
    for g in gset.gens() {
        let mut img = FMat::zeros(&mf, dim, dim);
        for i in 0..c {
            let x = reps[i].mul(g);
            let j = rep_invs
                .iter()
                .position(|rinv| hset.contains(&x.mul(rinv)))
                .expect("cosets partition the group");
            let b = x.mul(&rep_invs[j]);
            let blk = sub.image_of(&b)?;
            let blk = blk.as_fin();
            for r in 0..d {
                for s in 0..d {
                    img.set(i * d + r, j * d + s, blk.get(r, s));
                }
            }
        }
        gens.push(GMat::Fin(img));
    }
    Ok(MatRep::make(GroupTag::Gl2, &gf, sub.scalars().clone(), dim, gens))
}

/// Direct sum: block-diagonal generator images.
pub fn direct_sum(m1: &MatRep, m2: &MatRep) -> Result<MatRep, RepError> {
    if m1.tag != m2.tag || m1.group_field != m2.group_field || m1.scalars != m2.scalars {
        return Err(RepError::Incompatible(format!("{m1} vs {m2}")));
    }
    let Some(mf) = m1.scalars.fin() else {
        return Err(RepError::NeedsFiniteScalars);
    };
    let dim = m1.dim + m2.dim;
    let gens = m1
        .gens
        .iter()
        .zip(&m2.gens)
        .map(|(a, b)| {
            let (a, b) = (a.as_fin(), b.as_fin());
            GMat::Fin(FMat::from_fn(mf, dim, dim, |i, j| {
                if i < m1.dim && j < m1.dim {
                    a.get(i, j)
                } else if i >= m1.dim && j >= m1.dim {
                    b.get(i - m1.dim, j - m1.dim)
                } else {
                    0
                }
            }))
        })
        .collect();
    Ok(MatRep::make(
        m1.tag,
        &m1.group_field,
        m1.scalars.clone(),
        dim,
        gens,
    ))
}

/// A basis of the space of intertwining maps M1 -> M2: matrices X with
/// rho1(g) X = X rho2(g) for every generator g.
pub struct HomSpace {
    pub dim: usize,
    pub basis: Vec<GMat>,
}

pub fn hom_space(m1: &MatRep, m2: &MatRep) -> Result<HomSpace, RepError> {
    if m1.tag != m2.tag || m1.group_field != m2.group_field || m1.scalars != m2.scalars {
        return Err(RepError::Incompatible(format!("{m1} vs {m2}")));
    }
    let (d1, d2) = (m1.dim, m2.dim);
    let n = d1 * d2;
    if n == 0 {
        return Ok(HomSpace {
            dim: 0,
            basis: Vec::new(),
        });
    }
    assert!(n <= 1 << 13, "Hom-space solve is for desk-scale modules");
    let unk = |k: usize, j: usize| k * d2 + j;
    match &m1.scalars {
        Scalars::Fin(mf) => {
            let mut rows: Vec<Vec<u64>> = Vec::with_capacity(m1.gens.len() * n);
            for (a, b) in m1.gens.iter().zip(&m2.gens) {
                let (a, b) = (a.as_fin(), b.as_fin());
                for i in 0..d1 {
                    for j in 0..d2 {
                        let mut row = vec![0u64; n];
                        for k in 0..d1 {
                            row[unk(k, j)] = mf.add(row[unk(k, j)], a.get(i, k));
                        }
                        for k in 0..d2 {
                            row[unk(i, k)] = mf.sub(row[unk(i, k)], b.get(k, j));
                        }
                        rows.push(row);
                    }
                }
            }
            let sys = FMat::from_rows(mf, rows);
            let basis: Vec<GMat> = sys
                .right_nullspace()
                .into_iter()
                .map(|v| {
                    let x = FMat::from_fn(mf, d1, d2, |k, j| v[unk(k, j)]);
                    for (a, b) in m1.gens.iter().zip(&m2.gens) {
                        debug_assert_eq!(
                            a.as_fin().matmul(&x),
                            x.matmul(b.as_fin()),
                            "solver output must intertwine"
                        );
                    }
                    GMat::Fin(x)
                })
                .collect();
            Ok(HomSpace {
                dim: basis.len(),
                basis,
            })
        }
        Scalars::Cyc => {
            let mut rows: Vec<Vec<CycNum>> = Vec::with_capacity(m1.gens.len() * n);
            for (a, b) in m1.gens.iter().zip(&m2.gens) {
                let (a, b) = (a.as_cyc(), b.as_cyc());
                for i in 0..d1 {
                    for j in 0..d2 {
                        let mut row = vec![CycNum::zero(); n];
                        for k in 0..d1 {
                            row[unk(k, j)] = row[unk(k, j)].add(a.get(i, k));
                        }
                        for k in 0..d2 {
                            row[unk(i, k)] = row[unk(i, k)].sub(b.get(k, j));
                        }
                        rows.push(row);
                    }
                }
            }
            let basis: Vec<GMat> = cyclo::nullspace(&rows, n)
                .into_iter()
                .map(|v| {
                    let x = CycMat::from_fn(d1, d2, |k, j| v[unk(k, j)].clone());
                    for (a, b) in m1.gens.iter().zip(&m2.gens) {
                        debug_assert_eq!(
                            a.as_cyc().mul(&x),
                            x.mul(b.as_cyc()),
                            "solver output must intertwine"
                        );
                    }
                    GMat::Cyc(x)
                })
                .collect();
            Ok(HomSpace {
                dim: basis.len(),
                basis,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
