//! Finite fields `F_{p^r}` as quotients `F_p[x] / (m(x))`.
//!
//! The modulus `m` is the lexicographically smallest monic irreducible of
//! degree `r`, comparing coefficients from the highest degree down. Elements
//! are little-endian coefficient vectors in powers of the class of `x`, and
//! the label of an element is the integer `sum coeffs[i] * p^i`, a bijection
//! onto `[0, q)`.

mod fp_poly;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported characteristic (exclusive).
pub const MAX_PRIME: u64 = 1 << 31;
/// Largest supported field order (exclusive).
pub const MAX_ORDER: u64 = 1 << 63;

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Writes `q = p^r` with `p` prime, if possible.
pub fn prime_power_decomposition(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    for r in 1..64u32 {
        let root = integer_root(q, r);
        if root < 2 {
            break;
        }
        if root.checked_pow(r) == Some(q) && is_prime(root) {
            return Some((root, r));
        }
    }
    None
}

/// Floor of the `r`-th root of `n`.
fn integer_root(n: u64, r: u32) -> u64 {
    if r == 1 {
        return n;
    }
    let mut guess = (n as f64).powf(1.0 / r as f64).round() as u64;
    // float estimate is within a few units; fix it up exactly
    while guess > 0 && guess.checked_pow(r).is_none_or(|v| v > n) {
        guess -= 1;
    }
    while (guess + 1).checked_pow(r).is_some_and(|v| v <= n) {
        guess += 1;
    }
    guess
}

#[derive(Debug)]
struct FieldInner {
    p: u64,
    r: u32,
    q: u64,
    modulus: Vec<u64>,
    /// `x^{r+i} mod m(x)` for `0 <= i < r - 1`.
    reduction: Vec<Vec<u64>>,
}

/// Description of `F_{p^r}`. Cheap to clone; immutable after construction.
#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "FieldRepr", try_from = "FieldRepr")]
pub struct FieldDesc {
    inner: Arc<FieldInner>,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    p: u64,
    r: u32,
    q: u64,
    modulus: Vec<u64>,
}

impl From<FieldDesc> for FieldRepr {
    fn from(f: FieldDesc) -> Self {
        FieldRepr {
            p: f.p(),
            r: f.r(),
            q: f.q(),
            modulus: f.modulus().to_vec(),
        }
    }
}

impl TryFrom<FieldRepr> for FieldDesc {
    type Error = Error;

    fn try_from(repr: FieldRepr) -> Result<Self> {
        let field = FieldDesc::with_modulus(repr.p, repr.modulus)?;
        if field.r() != repr.r || field.q() != repr.q {
            return Err(Error::BadModulus(format!(
                "declared r = {}, q = {} disagree with the modulus",
                repr.r, repr.q
            )));
        }
        Ok(field)
    }
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldDesc {}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldDesc")
            .field("p", &self.p())
            .field("r", &self.r())
            .field("q", &self.q())
            .field("modulus", &self.modulus())
            .finish()
    }
}

/// An element of `F_{p^r}`: exactly `r` residues in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    coeffs: Vec<u64>,
}

impl FieldElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

fn check_prime(p: u64) -> Result<()> {
    if p == 2 || p >= MAX_PRIME {
        return Err(Error::UnsupportedPrime(p));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

fn checked_order(p: u64, r: u32) -> Result<u64> {
    match p.checked_pow(r) {
        Some(q) if q < MAX_ORDER => Ok(q),
        _ => Err(Error::Overflow { p, r }),
    }
}

impl FieldDesc {
    /// Builds `F_{p^r}` with the canonical modulus.
    pub fn new(p: u64, r: u32) -> Result<Self> {
        check_prime(p)?;
        if r == 0 {
            return Err(Error::BadModulus("extension degree must be at least 1".into()));
        }
        let q = checked_order(p, r)?;
        if r == 1 {
            return Self::from_parts(p, vec![0, 1]);
        }
        // enumerate monic candidates with c_{r-1} as the most significant digit
        for t in 0..q {
            let mut modulus = Vec::with_capacity(r as usize + 1);
            let mut v = t;
            for _ in 0..r {
                modulus.push(v % p);
                v /= p;
            }
            modulus.push(1);
            if fp_poly::is_irreducible(&modulus, p) {
                return Self::from_parts(p, modulus);
            }
        }
        unreachable!("an irreducible polynomial of every degree exists over F_p")
    }

    /// Builds the field of order `q`, which must be an odd prime power.
    pub fn from_order(q: u64) -> Result<Self> {
        let (p, r) = prime_power_decomposition(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, r)
    }

    /// Builds a field from an explicit monic irreducible modulus
    /// (little-endian coefficients, length `r + 1`).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        check_prime(p)?;
        if modulus.len() < 2 {
            return Err(Error::BadModulus("degree must be at least 1".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadModulus("coefficient not reduced mod p".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::BadModulus("modulus is not monic".into()));
        }
        let r = (modulus.len() - 1) as u32;
        checked_order(p, r)?;
        if !fp_poly::is_irreducible(&modulus, p) {
            return Err(Error::BadModulus("modulus is reducible".into()));
        }
        Self::from_parts(p, modulus)
    }

    fn from_parts(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let r = (modulus.len() - 1) as u32;
        let q = checked_order(p, r)?;
        let ru = r as usize;
        let mut reduction = Vec::with_capacity(ru.saturating_sub(1));
        if ru >= 2 {
            // x^r = -(m_0 + ... + m_{r-1} x^{r-1})
            let mut cur: Vec<u64> = modulus[..ru].iter().map(|&c| (p - c) % p).collect();
            for _ in 0..ru - 1 {
                reduction.push(cur.clone());
                let top = cur[ru - 1];
                let mut next = vec![0u64; ru];
                next[1..ru].copy_from_slice(&cur[..ru - 1]);
                for i in 0..ru {
                    let add = ((top as u128 * reduction[0][i] as u128) % p as u128) as u64;
                    next[i] = (next[i] + add) % p;
                }
                cur = next;
            }
        }
        Ok(FieldDesc {
            inner: Arc::new(FieldInner {
                p,
                r,
                q,
                modulus,
                reduction,
            }),
        })
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }

    pub fn r(&self) -> u32 {
        self.inner.r
    }

    pub fn q(&self) -> u64 {
        self.inner.q
    }

    /// `(q - 1) / 2`, the Euler exponent.
    pub fn half_order(&self) -> u64 {
        (self.inner.q - 1) / 2
    }

    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    fn width(&self) -> usize {
        self.inner.r as usize
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            coeffs: vec![0; self.width()],
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_u64(1)
    }

    /// The class of `x`. For prime fields the modulus is `x`, so this is zero.
    pub fn generator(&self) -> FieldElem {
        if self.width() == 1 {
            return self.zero();
        }
        let mut coeffs = vec![0; self.width()];
        coeffs[1] = 1;
        FieldElem { coeffs }
    }

    /// The image of the integer `k` under `Z -> F_p -> F_q`.
    pub fn from_u64(&self, k: u64) -> FieldElem {
        let mut coeffs = vec![0; self.width()];
        coeffs[0] = k % self.p();
        FieldElem { coeffs }
    }

    /// Builds an element from raw coefficients, reducing each mod `p`.
    pub fn elem_from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() != self.width() {
            return Err(Error::FieldMismatch);
        }
        Ok(FieldElem {
            coeffs: coeffs.iter().map(|&c| c % self.p()).collect(),
        })
    }

    pub fn contains(&self, a: &FieldElem) -> bool {
        a.coeffs.len() == self.width() && a.coeffs.iter().all(|&c| c < self.p())
    }

    pub fn elem_of(&self, label: u64) -> Result<FieldElem> {
        if label >= self.q() {
            return Err(Error::LabelOutOfRange {
                label,
                q: self.q(),
            });
        }
        let p = self.p();
        let mut v = label;
        let coeffs = (0..self.width())
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect();
        Ok(FieldElem { coeffs })
    }

    pub fn label_of(&self, a: &FieldElem) -> u64 {
        a.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p() + c)
    }

    /// Iterates all elements in label order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q()).map(move |l| self.elem_of(l).expect("label in range"))
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p();
        FieldElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| (x + y) % p)
                .collect(),
        }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p();
        FieldElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| (x + p - y) % p)
                .collect(),
        }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let p = self.p();
        FieldElem {
            coeffs: a.coeffs.iter().map(|&x| (p - x) % p).collect(),
        }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p() as u128;
        let r = self.width();
        if r == 1 {
            return FieldElem {
                coeffs: vec![((a.coeffs[0] as u128 * b.coeffs[0] as u128) % p) as u64],
            };
        }
        let mut prod = vec![0u128; 2 * r - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        let mut out: Vec<u128> = prod[..r].to_vec();
        for (k, &t) in prod[r..].iter().enumerate() {
            if t == 0 {
                continue;
            }
            for (o, &red) in out.iter_mut().zip(&self.inner.reduction[k]) {
                *o = (*o + t * red as u128) % p;
            }
        }
        FieldElem {
            coeffs: out.into_iter().map(|c| c as u64).collect(),
        }
    }

    /// Square-and-multiply. `0^0` is defined to be `1`.
    pub fn pow(&self, a: &FieldElem, mut e: u128) -> FieldElem {
        let mut result = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// Multiplicative inverse via `a^{q-2}`.
    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q() as u128 - 2))
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Checked arithmetic entry point; `b` is ignored for `Neg`.
    pub fn arith(&self, op: ArithOp, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        if !self.contains(a) || !self.contains(b) {
            return Err(Error::FieldMismatch);
        }
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
            ArithOp::Neg => self.neg(a),
        })
    }

    /// Euler's criterion. Zero is not a residue.
    pub fn is_quadratic_residue(&self, a: &FieldElem) -> bool {
        !a.is_zero() && self.pow(a, self.half_order() as u128) == self.one()
    }

    /// Labels of the nonzero squares, sorted.
    pub fn quadratic_residue_set(&self) -> Vec<u64> {
        let mut seen = vec![false; self.q() as usize];
        for y in 1..self.q() {
            let e = self.elem_of(y).expect("label in range");
            seen[self.label_of(&self.mul(&e, &e)) as usize] = true;
        }
        (0..self.q()).filter(|&l| seen[l as usize]).collect()
    }

    /// Label of `elem(a) + elem(b)`, digitwise without allocation.
    pub fn add_labels(&self, a: u64, b: u64) -> u64 {
        let p = self.p();
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.width() {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    /// Label of `elem(a) - elem(b)`.
    pub fn sub_labels(&self, a: u64, b: u64) -> u64 {
        let p = self.p();
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.width() {
            out += ((a % p + p - b % p) % p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f13() -> FieldDesc {
        FieldDesc::new(13, 1).unwrap()
    }

    #[test]
    fn prime_field_construction() {
        let f = f13();
        assert_eq!(f.q(), 13);
        assert_eq!(f.modulus(), &[0, 1]);
    }

    #[test]
    fn cubic_extension_modulus() {
        // x^3 + c always has a root mod 5 (cubing is a bijection), and
        // x^3 + x + 1 has none, so it is the first irreducible in lex order.
        let f = FieldDesc::new(5, 3).unwrap();
        assert_eq!(f.q(), 125);
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldDesc::new(4, 2).unwrap_err(), Error::NotPrime(4));
        assert_eq!(FieldDesc::new(2, 3).unwrap_err(), Error::UnsupportedPrime(2));
        assert!(matches!(FieldDesc::new(3, 40), Err(Error::Overflow { .. })));
        assert_eq!(FieldDesc::from_order(12).unwrap_err(), Error::NotPrimePower(12));
    }

    #[test]
    fn prime_field_examples() {
        let f = f13();
        let e = |l| f.elem_of(l).unwrap();
        assert_eq!(f.mul(&e(5), &e(8)), e(1));
        assert_eq!(f.inv(&e(12)).unwrap(), e(12));
        assert_eq!(f.inv(&e(1)).unwrap(), e(1));
        assert_eq!(f.pow(&e(3), 6), e(1));
        assert_eq!(f.pow(&e(2), 6), e(12));
        assert_eq!(f.pow(&e(7), 0), e(1));
        assert_eq!(f.pow(&f.zero(), 0), f.one());
        assert_eq!(f.label_of(&e(7)), 7);
        let f5 = FieldDesc::new(5, 1).unwrap();
        assert_eq!(f5.inv(&f5.zero()).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn extension_examples() {
        let f = FieldDesc::new(5, 3).unwrap();
        let g = f.generator();
        assert_eq!(f.label_of(&g), 5);
        assert_eq!(f.mul(&g, &f.one()), g);
        assert_eq!(f.elem_of(0).unwrap(), f.zero());
        assert_eq!(f.label_of(&f.elem_of(68).unwrap()), 68);
        assert!(matches!(
            f.elem_of(125),
            Err(Error::LabelOutOfRange { label: 125, q: 125 })
        ));
        // g^3 = -g - 1
        let g3 = f.pow(&g, 3);
        assert_eq!(g3.coeffs(), &[4, 4, 0]);
    }

    #[test]
    fn residues() {
        let f = f13();
        assert!(f.is_quadratic_residue(&f.elem_of(3).unwrap()));
        assert!(!f.is_quadratic_residue(&f.elem_of(2).unwrap()));
        assert!(!f.is_quadratic_residue(&f.zero()));
        assert_eq!(f.quadratic_residue_set(), vec![1, 3, 4, 9, 10, 12]);
        let f5 = FieldDesc::new(5, 1).unwrap();
        assert_eq!(f5.quadratic_residue_set(), vec![1, 4]);
        let f125 = FieldDesc::new(5, 3).unwrap();
        assert_eq!(f125.quadratic_residue_set().len(), 62);
    }

    #[test]
    fn arith_rejects_foreign_elements() {
        let f = f13();
        let g = FieldDesc::new(5, 3).unwrap();
        let a = g.generator();
        assert_eq!(f.arith(ArithOp::Add, &a, &f.one()).unwrap_err(), Error::FieldMismatch);
        let x = f.elem_of(4).unwrap();
        assert!(f.arith(ArithOp::Neg, &x, &x).unwrap().coeffs() == [9]);
    }

    #[test]
    fn label_arithmetic_matches_elements() {
        let f = FieldDesc::new(3, 4).unwrap();
        for a in (0..f.q()).step_by(7) {
            for b in (0..f.q()).step_by(5) {
                let (ea, eb) = (f.elem_of(a).unwrap(), f.elem_of(b).unwrap());
                assert_eq!(f.add_labels(a, b), f.label_of(&f.add(&ea, &eb)));
                assert_eq!(f.sub_labels(a, b), f.label_of(&f.sub(&ea, &eb)));
            }
        }
    }

    #[test]
    fn json_shape_and_validation() {
        let f = FieldDesc::new(5, 3).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"p":5,"r":3,"q":125,"modulus":[1,1,0,1]}"#);
        let back: FieldDesc = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        // reducible modulus x^3 + 1 = (x + 1)(x^2 - x + 1)
        let bad = r#"{"p":5,"r":3,"q":125,"modulus":[1,0,0,1]}"#;
        assert!(serde_json::from_str::<FieldDesc>(bad).is_err());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power_decomposition(125), Some((5, 3)));
        assert_eq!(prime_power_decomposition(13), Some((13, 1)));
        assert_eq!(prime_power_decomposition(371_293), Some((13, 5)));
        assert_eq!(prime_power_decomposition(1), None);
        assert_eq!(prime_power_decomposition(100), None);
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(3_215_031_751));
    }
}
