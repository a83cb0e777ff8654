//! Characteristic-zero Cartan-Weyl characters for GL_n diagonal tori
//! (exact bialternant evaluation and the product dimension formula), plus
//! the char-p Weyl-module avatars for GL2: det^{l2} (x) Sym^{l1-l2} of the
//! standard module and the restricted-range irreducibility checks.
//!
//! For n >= 3 only the formulas are provided; modules are built for GL2.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cyclo::CycNum;
use crate::ff::{self, Field, FfError};
use crate::gl2::Gl2Error;
use crate::meataxe::MtxError;
use crate::repmod::{self, MatRep, RepError};

#[derive(Debug, Error)]
pub enum WeylError {
    #[error("weight tuple must be weakly decreasing, got {0:?}")]
    NotDominant(Vec<i64>),
    #[error("torus point has a repeated coordinate; the bialternant denominator vanishes")]
    RepeatedCoordinate,
    #[error("weight has length {lambda} but the torus point has length {t}")]
    LengthMismatch { lambda: usize, t: usize },
    #[error("torus coordinates must be nonzero")]
    ZeroCoordinate,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {0} is beyond the checked range {1}")]
    TooLarge(u64, u64),
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Group(#[from] Gl2Error),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Mtx(#[from] MtxError),
    #[error(transparent)]
    Chars(#[from] crate::chars::CharError),
}

/// A dominant (weakly decreasing) integer weight for GL_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HighestWeight {
    lambda: Vec<i64>,
}

impl HighestWeight {
    pub fn new(lambda: Vec<i64>) -> Result<HighestWeight, WeylError> {
        if lambda.is_empty() || lambda.windows(2).any(|w| w[0] < w[1]) {
            return Err(WeylError::NotDominant(lambda));
        }
        Ok(HighestWeight { lambda })
    }

    pub fn lambda(&self) -> &[i64] {
        &self.lambda
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// The longest-Weyl-element action on weights: tuple reversal.
    pub fn w0_action(&self) -> Vec<i64> {
        let mut v = self.lambda.clone();
        v.reverse();
        v
    }
}

fn cyc_pow_i(x: &CycNum, e: i64) -> Result<CycNum, WeylError> {
    let base = if e < 0 {
        x.inv().ok_or(WeylError::ZeroCoordinate)?
    } else {
        x.clone()
    };
    let mut acc = CycNum::one();
    for _ in 0..e.unsigned_abs() {
        acc = acc.mul(&base);
    }
    Ok(acc)
}

/// Exact determinant by Gaussian elimination over the cyclotomic field.
fn cyc_det(mut m: Vec<Vec<CycNum>>) -> CycNum {
    let n = m.len();
    let mut det = CycNum::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return CycNum::zero();
        };
        if piv != col {
            m.swap(col, piv);
            det = det.neg();
        }
        let pivot = m[col][col].clone();
        det = det.mul(&pivot);
        let inv = pivot.inv().expect("pivot is nonzero");
        for j in col..n {
            m[col][j] = m[col][j].mul(&inv);
        }
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in col..n {
                let s = f.mul(&m[col][j]);
                m[r][j] = m[r][j].sub(&s);
            }
        }
    }
    det
}

/// The bialternant character value: the ratio of the lambda-shifted
/// alternant det(t_i^{lambda_j + n - j}) to the Vandermonde alternant
/// det(t_i^{n - j}), evaluated exactly at the given torus point.
pub fn cartan_weyl_char(lw: &HighestWeight, t: &[CycNum]) -> Result<CycNum, WeylError> {
    let n = lw.n();
    if t.len() != n {
        return Err(WeylError::LengthMismatch {
            lambda: n,
            t: t.len(),
        });
    }
    if t.iter().any(|x| x.is_zero()) {
        return Err(WeylError::ZeroCoordinate);
    }
    for i in 0..n {
        for j in i + 1..n {
            if t[i].sub(&t[j]).is_zero() {
                return Err(WeylError::RepeatedCoordinate);
            }
        }
    }
    let lam = lw.lambda();
    let num = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| cyc_pow_i(&t[i], lam[j] + (n - 1 - j) as i64))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let den = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| cyc_pow_i(&t[i], (n - 1 - j) as i64))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let d = cyc_det(den);
    debug_assert!(!d.is_zero(), "distinct coordinates give a unit Vandermonde");
    Ok(cyc_det(num).mul(&d.inv().expect("nonzero Vandermonde")))
}

/// The Weyl dimension: prod_{i<j} (lambda_i - lambda_j + j - i) / (j - i).
pub fn weyl_dimension(lw: &HighestWeight) -> BigInt {
    let lam = lw.lambda();
    let n = lam.len();
    let mut acc = BigRational::one();
    for i in 0..n {
        for j in i + 1..n {
            let num = lam[i] - lam[j] + (j as i64 - i as i64);
            let den = j as i64 - i as i64;
            acc *= BigRational::new(BigInt::from(num), BigInt::from(den));
        }
    }
    assert!(acc.is_integer(), "the Weyl product is integral");
    acc.to_integer()
}

// ---------------------------------------------------------------------------
// principal specialization: evaluate at (x^{n-1}, ..., x, 1) and let x -> 1
// ---------------------------------------------------------------------------

/// Sparse integer Laurent polynomial in one variable.
type Laurent = BTreeMap<i64, BigInt>;

fn laurent_add_term(p: &mut Laurent, e: i64, c: BigInt) {
    if c.is_zero() {
        return;
    }
    let slot = p.entry(e).or_insert_with(BigInt::zero);
    *slot += c;
    if slot.is_zero() {
        p.remove(&e);
    }
}

/// det of the monomial matrix with entry (i, j) = x^{(n-1-i) e_j}, by
/// permutation expansion (n <= 3 in practice).
fn monomial_alternant(exps: &[i64]) -> Laurent {
    let n = exps.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = Laurent::new();
    // Heap's algorithm, tracking sign
    fn visit(perm: &[usize], sign: i64, exps: &[i64], out: &mut Laurent) {
        let n = exps.len();
        let tot: i64 = (0..n).map(|i| (n - 1 - i) as i64 * exps[perm[i]]).sum();
        laurent_add_term(out, tot, BigInt::from(sign));
    }
    fn heaps(k: usize, perm: &mut Vec<usize>, sign: &mut i64, exps: &[i64], out: &mut Laurent) {
        if k <= 1 {
            visit(perm, *sign, exps, out);
            return;
        }
        for i in 0..k - 1 {
            heaps(k - 1, perm, sign, exps, out);
            if k % 2 == 0 {
                perm.swap(i, k - 1);
            } else {
                perm.swap(0, k - 1);
            }
            *sign = -*sign;
        }
        heaps(k - 1, perm, sign, exps, out);
    }
    let mut sign = 1i64;
    heaps(n, &mut perm, &mut sign, exps, &mut out);
    out
}

/// Exact quotient of Laurent polynomials with unit leading coefficient in
/// the divisor; panics if the division is not exact.
fn laurent_exact_div(num: &Laurent, den: &Laurent) -> Laurent {
    assert!(!den.is_empty(), "division by zero");
    if num.is_empty() {
        return Laurent::new();
    }
    // shift both to ordinary polynomials
    let nmin = *num.keys().next().unwrap();
    let dmin = *den.keys().next().unwrap();
    let nmax = *num.keys().next_back().unwrap();
    let dmax = *den.keys().next_back().unwrap();
    let (nd, dd) = ((nmax - nmin) as usize, (dmax - dmin) as usize);
    let mut ncoef: Vec<BigInt> = vec![BigInt::zero(); nd + 1];
    for (&e, c) in num {
        ncoef[(e - nmin) as usize] = c.clone();
    }
    let mut dcoef: Vec<BigInt> = vec![BigInt::zero(); dd + 1];
    for (&e, c) in den {
        dcoef[(e - dmin) as usize] = c.clone();
    }
    let lead = dcoef[dd].clone();
    assert!(lead.abs().is_one(), "unit divisor lead");
    assert!(nd >= dd, "quotient degree is nonnegative");
    let mut quot: Vec<BigInt> = vec![BigInt::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = &ncoef[k + dd] * &lead; // lead is +-1, so this divides exactly
        if !c.is_zero() {
            quot[k] = c.clone();
            for (j, dj) in dcoef.iter().enumerate() {
                let sub = &c * dj;
                ncoef[k + j] -= sub;
            }
        }
    }
    assert!(ncoef.iter().all(|c| c.is_zero()), "division must be exact");
    let shift = nmin - dmin;
    let mut out = Laurent::new();
    for (k, c) in quot.into_iter().enumerate() {
        laurent_add_term(&mut out, k as i64 + shift, c);
    }
    out
}

/// The character dimension via the principal specialization: evaluate the
/// bialternant at t = (x^{n-1}, ..., x, 1) as an exact Laurent-polynomial
/// quotient and then set x = 1. Agrees with `weyl_dimension`.
pub fn principal_specialization_dimension(lw: &HighestWeight) -> BigInt {
    let n = lw.n();
    let eshift: Vec<i64> = lw
        .lambda()
        .iter()
        .enumerate()
        .map(|(j, &l)| l + (n - 1 - j) as i64)
        .collect();
    let evdm: Vec<i64> = (0..n).map(|j| (n - 1 - j) as i64).collect();
    let q = laurent_exact_div(&monomial_alternant(&eshift), &monomial_alternant(&evdm));
    q.values().cloned().sum()
}

// ---------------------------------------------------------------------------
// char-p Weyl-module avatars for GL2
// ---------------------------------------------------------------------------

/// The GL2 module det^{l2} (x) Sym^{l1 - l2} of the standard module, over
/// the given coefficient field of characteristic p, as a module for
/// GL2(F_p). Its dimension is always l1 - l2 + 1 = weylDimension.
pub fn dual_weyl_gl2(lambda: (i64, i64), module_field: &Field) -> Result<MatRep, WeylError> {
    let (l1, l2) = lambda;
    if l1 < l2 {
        return Err(WeylError::NotDominant(vec![l1, l2]));
    }
    let gf = Field::new(module_field.p(), 1)?;
    let std = repmod::standard_rep(&gf, module_field)?;
    let sym = repmod::sym_power(&std, l1 - l2)?;
    Ok(repmod::det_twist(&sym, l2)?)
}

/// Report of the restricted-range irreducibles {det^j (x) Sym^i} for
/// GL2(F_p), 0 <= i <= p-1, 0 <= j <= p-2: each certified irreducible,
/// pairwise distinct, and exhausting the p(p-1) count.
pub struct RestrictedReport {
    pub p: u64,
    pub count: usize,
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
}

/// Build and certify the restricted-range irreducible list for GL2(F_p).
pub fn restricted_irreducible_check(p: u64) -> Result<RestrictedReport, WeylError> {
    const MAX_P: u64 = 13;
    if !ff::is_prime(p) {
        return Err(WeylError::NotPrime(p));
    }
    if p > MAX_P {
        return Err(WeylError::TooLarge(p, MAX_P));
    }
    // the defining-characteristic enumeration constructs exactly this list
    // and certifies irreducibility and pairwise distinctness
    let ed = crate::chars::enumerate_irreducibles(p, p)?;
    let count = ed.modules.len();
    assert_eq!(count as u64, p * (p - 1));
    Ok(RestrictedReport {
        p,
        count,
        labels: ed.labels.clone(),
        dims: ed.modules.iter().map(|m| m.dim()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl2::GroupTag;
    use crate::meataxe::{self, Lcg, SubSearch};
    use crate::repmod::Scalars;

    fn hw(v: &[i64]) -> HighestWeight {
        HighestWeight::new(v.to_vec()).unwrap()
    }

    fn cint(v: i64) -> CycNum {
        CycNum::from_int(v)
    }

    #[test]
    fn dominance_and_w0() {
        assert!(HighestWeight::new(vec![1, 2]).is_err());
        let l = hw(&[3, 1, 0]);
        assert_eq!(l.w0_action(), vec![0, 1, 3]);
        let mut back = l.w0_action();
        back.reverse();
        assert_eq!(back, l.lambda());
    }

    #[test]
    fn bialternant_examples() {
        // (1,0): the trace of the standard representation
        let t = vec![CycNum::zeta(5, 1), cint(2)];
        let v = cartan_weyl_char(&hw(&[1, 0]), &t).unwrap();
        assert_eq!(v, t[0].add(&t[1]));
        // (m,0) at (2,1): the complete homogeneous sum 2^{m+1} - 1
        for m in 0..=8i64 {
            let v = cartan_weyl_char(&hw(&[m, 0]), &[cint(2), cint(1)]).unwrap();
            assert_eq!(v, cint((1 << (m + 1)) - 1), "m = {m}");
        }
        // the zero weight is the trivial character
        for t in [
            vec![cint(7)],
            vec![cint(3), cint(-4)],
            vec![cint(2), cint(5), CycNum::zeta(3, 1)],
        ] {
            let lam = hw(&vec![0; t.len()]);
            assert_eq!(cartan_weyl_char(&lam, &t).unwrap(), CycNum::one());
        }
        // guards
        assert!(matches!(
            cartan_weyl_char(&hw(&[1, 0]), &[cint(2), cint(2)]),
            Err(WeylError::RepeatedCoordinate)
        ));
        assert!(matches!(
            cartan_weyl_char(&hw(&[1, 0]), &[cint(2)]),
            Err(WeylError::LengthMismatch { .. })
        ));
        assert!(matches!(
            cartan_weyl_char(&hw(&[1, 0]), &[cint(0), cint(2)]),
            Err(WeylError::ZeroCoordinate)
        ));
    }

    #[test]
    fn bialternant_matches_symmetric_power_traces() {
        // chi_{(l1,l2)}(diag(t)) = (t1 t2)^{l2} * sum_{a+b=l1-l2} t1^a t2^b
        let mut rng = Lcg::new(0x5EED_CA11);
        let mut done = 0;
        while done < 20 {
            let l2 = rng.below(9) as i64 - 3;
            let m = rng.below(11) as i64;
            let t1 = rng.below(28) as i64 + 2;
            let t2 = rng.below(28) as i64 + 2;
            if t1 == t2 {
                continue;
            }
            let lam = hw(&[l2 + m, l2]);
            let got = cartan_weyl_char(&lam, &[cint(t1), cint(t2)]).unwrap();
            let mut tr = CycNum::zero();
            for a in 0..=m {
                tr = tr.add(&cyc_pow_i(&cint(t1), a).unwrap().mul(&cyc_pow_i(&cint(t2), m - a).unwrap()));
            }
            let scale = cyc_pow_i(&cint(t1 * t2), l2).unwrap();
            assert_eq!(got, tr.mul(&scale), "lambda = {:?}, t = ({t1},{t2})", lam.lambda());
            done += 1;
        }
        // one genuinely cyclotomic point
        let t = vec![CycNum::zeta(7, 1), CycNum::zeta(7, 3)];
        let got = cartan_weyl_char(&hw(&[2, 0]), &t).unwrap();
        let want = t[0]
            .mul(&t[0])
            .add(&t[0].mul(&t[1]))
            .add(&t[1].mul(&t[1]));
        assert_eq!(got, want);
    }

    #[test]
    fn weyl_dimension_examples() {
        assert_eq!(weyl_dimension(&hw(&[1, 0, 0])), BigInt::from(3));
        assert_eq!(weyl_dimension(&hw(&[2, 1, 0])), BigInt::from(8));
        for m in 0..10i64 {
            assert_eq!(weyl_dimension(&hw(&[m, 0])), BigInt::from(m + 1));
        }
        assert_eq!(weyl_dimension(&hw(&[5, 5, 5])), BigInt::from(1));
    }

    #[test]
    fn principal_specialization_agrees_with_the_product_formula() {
        let cases: Vec<Vec<i64>> = vec![
            vec![4],
            vec![0, 0],
            vec![3, -1],
            vec![7, 0],
            vec![0, 0, 0],
            vec![1, 0, 0],
            vec![2, 1, 0],
            vec![4, 2, -1],
            vec![5, 0, 0],
            vec![6, 3, 1],
        ];
        for lam in cases {
            let l = hw(&lam);
            assert_eq!(
                principal_specialization_dimension(&l),
                weyl_dimension(&l),
                "lambda = {lam:?}"
            );
        }
    }

    #[test]
    fn dual_weyl_dimensions_and_restricted_irreducibility() {
        for p in [3u64, 5] {
            let fp = Field::new(p, 1).unwrap();
            for l1 in 0..p as i64 {
                for l2 in -2..=l1.min(2) {
                    let m = dual_weyl_gl2((l1, l2), &fp).unwrap();
                    assert_eq!(
                        BigInt::from(m.dim() as i64),
                        weyl_dimension(&hw(&[l1, l2]))
                    );
                }
            }
            // m <= p-1: irreducible as a GL2(F_p)-module
            for m in 0..p as i64 {
                let w = dual_weyl_gl2((m, 0), &fp).unwrap();
                assert!(matches!(
                    meataxe::find_submodule(&w, 11).unwrap(),
                    SubSearch::Irreducible
                ));
            }
        }
        assert!(dual_weyl_gl2((0, 1), &Field::new(3, 1).unwrap()).is_err());
    }

    #[test]
    fn symmetric_power_p_has_exactly_two_factors() {
        // Sym^p(V) over F_p: a Frobenius-twisted standard factor and
        // Sym^{p-2} (x) det
        for p in [3u64, 5] {
            let fp = Field::new(p, 1).unwrap();
            let w = dual_weyl_gl2((p as i64, 0), &fp).unwrap();
            let factors = meataxe::composition_factors(&w, 23).unwrap();
            assert_eq!(factors.entries.len(), 2, "p = {p}");
            assert!(factors.entries.iter().all(|f| f.multiplicity == 1));
            let std = repmod::standard_rep(&fp, &fp).unwrap();
            let frob = repmod::frob_twist(&std).unwrap();
            let lbl_frob = meataxe::canonical_label(&frob).unwrap();
            let other = repmod::det_twist(
                &repmod::sym_power(&std, p as i64 - 2).unwrap(),
                1,
            )
            .unwrap();
            let lbl_other = meataxe::canonical_label(&other).unwrap();
            let got: Vec<&String> = factors.entries.iter().map(|f| &f.label).collect();
            assert!(got.contains(&&lbl_frob), "p = {p}");
            assert!(got.contains(&&lbl_other), "p = {p}");
        }
    }

    #[test]
    fn weyl_modules_embed_into_principal_series() {
        // the avatar of the Borel-induction theorem: det^{i1} (x) Sym^{i2-i1}
        // maps injectively into the principal series with those exponents
        // (the coset realization carries the first exponent on the second
        // diagonal slot, hence the swap)
        for p in [2u64, 3, 5, 7] {
            let fp = Field::new(p, 1).unwrap();
            let scal = Scalars::Fin(fp.clone());
            for i1 in 0..p as i64 {
                for i2 in i1..p as i64 {
                    let w = dual_weyl_gl2((i2, i1), &fp).unwrap();
                    let ps = repmod::induced_from_borel(&fp, i2, i1, &scal).unwrap();
                    let hom = repmod::hom_space(&w, &ps).unwrap();
                    assert!(
                        hom.dim >= 1,
                        "p = {p}, (i1,i2) = ({i1},{i2}): no map into the series"
                    );
                    let rank = hom.basis[0].as_fin().rank();
                    assert_eq!(
                        rank,
                        w.dim(),
                        "p = {p}, (i1,i2) = ({i1},{i2}): map is not injective"
                    );
                }
            }
        }
    }

    #[test]
    fn restricted_report_counts() {
        let r2 = restricted_irreducible_check(2).unwrap();
        assert_eq!(r2.count, 2);
        let mut d2 = r2.dims.clone();
        d2.sort();
        assert_eq!(d2, vec![1, 2]);

        let r3 = restricted_irreducible_check(3).unwrap();
        assert_eq!(r3.count, 6);
        let mut d3 = r3.dims.clone();
        d3.sort();
        assert_eq!(d3, vec![1, 1, 2, 2, 3, 3]);

        let r5 = restricted_irreducible_check(5).unwrap();
        assert_eq!(r5.count, 20);

        assert!(restricted_irreducible_check(4).is_err());
        assert!(restricted_irreducible_check(17).is_err());
    }

    #[test]
    fn u_fixed_lines_in_restricted_range() {
        // inside the restricted range the finite unipotent fixed space of
        // det^j Sym^m is a single line, matching the algebraic statement
        for p in [3u64, 5, 7] {
            let fp = Field::new(p, 1).unwrap();
            for m in 0..p as i64 {
                let w = dual_weyl_gl2((m, 0), &fp).unwrap();
                let inv = repmod::invariants(&w, GroupTag::U).unwrap();
                assert_eq!(inv.dim(), 1, "p = {p}, m = {m}");
            }
        }
    }
}
