//! Base-`p` digits, Lucas binomials, and the digit constructions that pick
//! the auxiliary parameter `n` and the exponent sets `L(n)` and `M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{is_prime, prime_power_decomposition};

/// Little-endian base-`p` digits with no trailing zeros beyond position 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePDigits {
    p: u64,
    digits: Vec<u64>,
}

impl BasePDigits {
    pub fn from_digits(p: u64, mut digits: Vec<u64>) -> Result<Self> {
        if p < 2 {
            return Err(Error::BadBase(p));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::BadBase(d));
        }
        while digits.len() > 1 && digits.last() == Some(&0) {
            digits.pop();
        }
        if digits.is_empty() {
            digits.push(0);
        }
        Ok(BasePDigits { p, digits })
    }

    pub fn base(&self) -> u64 {
        self.p
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// Digit at position `j`, zero past the end.
    pub fn digit(&self, j: usize) -> u64 {
        self.digits.get(j).copied().unwrap_or(0)
    }

    /// Number of significant digits (`0` has one).
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self) -> u64 {
        self.digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }
}

pub fn to_base_p(n: u64, p: u64) -> Result<BasePDigits> {
    if p < 2 {
        return Err(Error::BadBase(p));
    }
    let mut digits = Vec::new();
    let mut v = n;
    loop {
        digits.push(v % p);
        v /= p;
        if v == 0 {
            break;
        }
    }
    Ok(BasePDigits { p, digits })
}

pub fn from_base_p(d: &BasePDigits) -> u64 {
    d.value()
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

/// Characteristics at or below this size get factorial tables.
const TABLE_LIMIT: u64 = 1 << 20;

/// Binomial coefficients modulo a fixed prime via Lucas's theorem.
#[derive(Clone, Debug)]
pub struct Lucas {
    p: u64,
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

impl Lucas {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let (mut fact, mut inv_fact) = (Vec::new(), Vec::new());
        if p <= TABLE_LIMIT {
            let n = p as usize;
            fact = vec![1u64; n];
            for i in 1..n {
                fact[i] = mulmod(fact[i - 1], i as u64, p);
            }
            inv_fact = vec![1u64; n];
            inv_fact[n - 1] = powmod(fact[n - 1], p - 2, p);
            for i in (1..n).rev() {
                inv_fact[i - 1] = mulmod(inv_fact[i], i as u64, p);
            }
        }
        Ok(Lucas { p, fact, inv_fact })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `binom(a, b) mod p` for single digits `a, b < p`.
    fn digit_binom(&self, a: u64, b: u64) -> u64 {
        if b > a {
            return 0;
        }
        let p = self.p;
        if !self.fact.is_empty() {
            let (a, b) = (a as usize, b as usize);
            return mulmod(mulmod(self.fact[a], self.inv_fact[b], p), self.inv_fact[a - b], p);
        }
        let k = b.min(a - b);
        let (mut num, mut den) = (1u64, 1u64);
        for i in 0..k {
            num = mulmod(num, a - i, p);
            den = mulmod(den, i + 1, p);
        }
        mulmod(num, powmod(den, p - 2, p), p)
    }

    /// `binom(m, n) mod p`; zero when `n > m`.
    pub fn binom(&self, mut m: u64, mut n: u64) -> u64 {
        if n > m {
            return 0;
        }
        let p = self.p;
        let mut acc = 1 % p;
        while n > 0 || m > 0 {
            let (mj, nj) = (m % p, n % p);
            if nj > mj {
                return 0;
            }
            acc = mulmod(acc, self.digit_binom(mj, nj), p);
            m /= p;
            n /= p;
        }
        acc
    }

    /// `binom(m, n) != 0 mod p`, i.e. every digit of `n` is at most the
    /// corresponding digit of `m`.
    pub fn nonzero(&self, mut m: u64, mut n: u64) -> bool {
        if n > m {
            return false;
        }
        while n > 0 {
            if n % self.p > m % self.p {
                return false;
            }
            m /= self.p;
            n /= self.p;
        }
        true
    }
}

pub fn binom_mod_p(m: u64, n: u64, p: u64) -> Result<u64> {
    Ok(Lucas::new(p)?.binom(m, n))
}

/// Checks that `q` is a power of the prime `p`; returns the exponent.
fn exponent_of(q: u64, p: u64) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    match prime_power_decomposition(q) {
        Some((base, r)) if base == p => Ok(r),
        _ => Err(Error::BadForm(format!("{q} is not a power of {p}"))),
    }
}

/// `binom(n - 1 + (q-1)/2, (q-1)/2) != 0 mod p`.
pub fn hp_hypothesis_holds(n: u64, q: u64, p: u64) -> Result<bool> {
    exponent_of(q, p)?;
    if n < 1 {
        return Err(Error::NOutOfRange { n, size: 0 });
    }
    let half = (q - 1) / 2;
    Ok(Lucas::new(p)?.nonzero(n - 1 + half, half))
}

fn require_one_mod_four(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p % 4 != 1 {
        return Err(Error::BadCongruence { q: p });
    }
    Ok(())
}

/// Choice of `n` for `q = p^3`: with `N - 1 = (A, B)_p`, take
/// `n - 1 = (A, min((p-1)/2, B))_p`.
///
/// Accepts `N - 1` with exactly two digits and leading digit `A <= (p-1)/2`;
/// larger `A` carries in `n - 1 + (q-1)/2` and the binomial vanishes.
pub fn select_n_cubic(clique_size: u64, p: u64) -> Result<u64> {
    require_one_mod_four(p)?;
    let half = (p - 1) / 2;
    let d = to_base_p(clique_size.saturating_sub(1), p)?;
    if clique_size == 0 || d.len() != 2 {
        return Err(Error::OutOfWindow(format!(
            "N - 1 = {} needs exactly two base-{p} digits",
            clique_size.saturating_sub(1)
        )));
    }
    let (a, b) = (d.digit(1), d.digit(0));
    if a > half {
        return Err(Error::OutOfWindow(format!(
            "leading digit {a} of N - 1 exceeds (p-1)/2 = {half}"
        )));
    }
    Ok(a * p + b.min(half) + 1)
}

/// Choice of `n` for `q = p^{2s+1}`, `s >= 2`, from `N - 1 = (z_s, ..., z_0)_p`.
///
/// If `z_{s-1} <= (p-1)/2`, `n - 1` keeps the top two digits and is the
/// largest number not above `N - 1` whose lower digits are all `<= (p-1)/2`.
/// Otherwise `n - 1 = (z_s, (p-1)/2, ..., (p-1)/2)_p`.
pub fn select_n_general(clique_size: u64, p: u64, s: u32) -> Result<u64> {
    require_one_mod_four(p)?;
    if s < 2 {
        return Err(Error::BadForm(format!("s = {s}; the general construction needs s >= 2")));
    }
    let half = (p - 1) / 2;
    let d = to_base_p(clique_size.saturating_sub(1), p)?;
    let s = s as usize;
    if clique_size == 0 || d.len() != s + 1 {
        return Err(Error::OutOfWindow(format!(
            "N - 1 = {} needs exactly {} base-{p} digits",
            clique_size.saturating_sub(1),
            s + 1
        )));
    }
    if d.digit(s) > half {
        return Err(Error::OutOfWindow(format!(
            "leading digit {} of N - 1 exceeds (p-1)/2 = {half}",
            d.digit(s)
        )));
    }
    let mut out = vec![0u64; s + 1];
    out[s] = d.digit(s);
    if d.digit(s - 1) <= half {
        out[s - 1] = d.digit(s - 1);
        let mut capped = false;
        for j in (0..s - 1).rev() {
            out[j] = if capped {
                half
            } else if d.digit(j) > half {
                capped = true;
                half
            } else {
                d.digit(j)
            };
        }
    } else {
        for slot in out.iter_mut().take(s) {
            *slot = half;
        }
    }
    Ok(BasePDigits::from_digits(p, out)?.value() + 1)
}

/// Digits of `n - 1` for the shape used by the variant construction:
/// `(z_s, z_{s-1}, (p-1)/2, ..., (p-1)/2, (p+1)/2)_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantShape {
    pub p: u64,
    pub s: u32,
    pub top: u64,
    pub second: u64,
}

impl VariantShape {
    /// Validates the shape: `1 <= z_s <= (p-3)/2` (no carry into position
    /// `s + 1` of `n - 1 + (q-1)/2`) and `(p+1)/2 < z_{s-1} < p`.
    pub fn new(p: u64, s: u32, top: u64, second: u64) -> Result<Self> {
        require_one_mod_four(p)?;
        if s < 2 {
            return Err(Error::BadForm(format!("s = {s}; the variant shape needs s >= 2")));
        }
        if top < 1 || top > (p - 3) / 2 {
            return Err(Error::OutOfWindow(format!(
                "z_s = {top} outside [1, {}]",
                (p - 3) / 2
            )));
        }
        if second <= (p + 1) / 2 || second >= p {
            return Err(Error::OutOfWindow(format!(
                "z_(s-1) = {second} outside ({}, {})",
                (p + 1) / 2,
                p
            )));
        }
        Ok(VariantShape { p, s, top, second })
    }

    /// Recognises `n` whose `n - 1` has the variant shape.
    pub fn of_n(n: u64, p: u64, s: u32) -> Option<Self> {
        let d = to_base_p(n.checked_sub(1)?, p).ok()?;
        let su = s as usize;
        if d.len() != su + 1 {
            return None;
        }
        let half = (p - 1) / 2;
        if d.digit(0) != half + 1 || (1..su - 1).any(|j| d.digit(j) != half) {
            return None;
        }
        Self::new(p, s, d.digit(su), d.digit(su - 1)).ok()
    }

    pub fn n_minus_one(&self) -> u64 {
        let half = (self.p - 1) / 2;
        let s = self.s as usize;
        let mut digits = vec![half; s + 1];
        digits[0] = half + 1;
        digits[s - 1] = self.second;
        digits[s] = self.top;
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    pub fn n(&self) -> u64 {
        self.n_minus_one() + 1
    }

    /// `z'_s = z_s + (p+1)/2`.
    pub fn top_shifted(&self) -> u64 {
        self.top + (self.p + 1) / 2
    }

    /// `z'_{s-1} = z_{s-1} - (p-1)/2`.
    pub fn second_shifted(&self) -> u64 {
        self.second - (self.p - 1) / 2
    }

    /// The largest `n` of this shape with `n - 1 <= N - 1`.
    pub fn largest_for(clique_size: u64, p: u64, s: u32) -> Result<Self> {
        let d = to_base_p(clique_size.saturating_sub(1), p)?;
        let su = s as usize;
        if d.len() != su + 1 {
            return Err(Error::OutOfWindow(format!(
                "N - 1 = {} needs exactly {} base-{p} digits",
                clique_size.saturating_sub(1),
                su + 1
            )));
        }
        let mut pair = d.digit(su) * p + d.digit(su - 1);
        loop {
            let (top, second) = (pair / p, pair % p);
            if let Ok(shape) = Self::new(p, s, top, second) {
                if shape.n() <= clique_size {
                    return Ok(shape);
                }
            }
            if pair == 0 {
                return Err(Error::OutOfWindow(format!(
                    "no n of the variant shape with n <= {clique_size}"
                )));
            }
            pair -= 1;
        }
    }

    /// `M` from the digits of `n - 1 + (q-1)/2 = ((p-1)/2, ..., (p-1)/2,
    /// z'_s, z'_{s-1}, 0, ..., 0)_p` via Lucas: `c_j <= (p-1)/2` for
    /// `s < j <= 2s`, `c_s <= z'_s`, `c_{s-1} <= z'_{s-1}`, lower digits zero,
    /// and `n <= m <= (q-1)/2`.
    pub fn m_by_digits(&self) -> Vec<u64> {
        self.enumerate_m(self.top_shifted())
    }

    /// The same enumeration with `c_s <= (p-1)/2` in place of `c_s <= z'_s`.
    pub fn m_by_digits_capped(&self) -> Vec<u64> {
        self.enumerate_m((self.p - 1) / 2)
    }

    fn enumerate_m(&self, cap_s: u64) -> Vec<u64> {
        let p = self.p;
        let s = self.s as usize;
        let half = (p - 1) / 2;
        let q_half = (p.pow(2 * self.s + 1) - 1) / 2;
        let n = self.n();
        // free digits at positions s-1 ..= 2s with their caps
        let mut caps = vec![self.second_shifted(), cap_s];
        caps.extend(std::iter::repeat_n(half, s));
        let unit = p.pow(self.s - 1);
        let mut out = Vec::new();
        let mut digits = vec![0u64; caps.len()];
        loop {
            let m = digits.iter().rev().fold(0u64, |acc, &d| acc * p + d) * unit;
            if m >= n && m <= q_half {
                out.push(m);
            }
            let mut i = 0;
            while i < digits.len() {
                if digits[i] < caps[i] {
                    digits[i] += 1;
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
        out.sort_unstable();
        out
    }
}

/// `L(n)`: all `l in [0, n-1]` with some `k in [0, n-1]` such that
/// `binom(n-1+(q-1)/2, k) * binom(n-1-k, l) != 0 mod p`.
pub fn compute_l(n: u64, q: u64, p: u64) -> Result<Vec<u64>> {
    exponent_of(q, p)?;
    if n < 1 {
        return Err(Error::NOutOfRange { n, size: 0 });
    }
    let lucas = Lucas::new(p)?;
    let top = n - 1 + (q - 1) / 2;
    let ks: Vec<u64> = (0..n).filter(|&k| lucas.nonzero(top, k)).collect();
    Ok((0..n)
        .filter(|&l| ks.iter().any(|&k| lucas.nonzero(n - 1 - k, l)))
        .collect())
}

/// `M`: all `m in [n, (q-1)/2]` with `binom(n-1+(q-1)/2, m) != 0 mod p`.
pub fn compute_m(n: u64, q: u64, p: u64) -> Result<Vec<u64>> {
    exponent_of(q, p)?;
    let half = (q - 1) / 2;
    if n < 1 || n > half {
        return Err(Error::PreconditionM(format!("n = {n} outside [1, {half}]")));
    }
    let lucas = Lucas::new(p)?;
    let top = n - 1 + half;
    Ok((n..=half).filter(|&m| lucas.nonzero(top, m)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_examples() {
        assert_eq!(to_base_p(68, 5).unwrap().digits(), &[3, 3, 2]);
        assert_eq!(to_base_p(62, 5).unwrap().digits(), &[2, 2, 2]);
        assert_eq!(to_base_p(0, 13).unwrap().digits(), &[0]);
        assert_eq!(to_base_p(5, 1).unwrap_err(), Error::BadBase(1));
        let d = BasePDigits::from_digits(5, vec![3, 3, 2, 0, 0]).unwrap();
        assert_eq!(d.digits(), &[3, 3, 2]);
        assert_eq!(from_base_p(&d), 68);
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binom_mod_p(7, 2, 5).unwrap(), 1);
        assert_eq!(binom_mod_p(68, 62, 5).unwrap(), 4);
        assert_eq!(binom_mod_p(1234, 0, 13).unwrap(), 1);
        assert_eq!(binom_mod_p(3, 5, 7).unwrap(), 0);
        assert_eq!(binom_mod_p(7, 2, 6).unwrap_err(), Error::NotPrime(6));
    }

    #[test]
    fn large_characteristic_uses_direct_products() {
        let p = 2_147_483_629; // prime below 2^31
        let lucas = Lucas::new(p).unwrap();
        assert!(lucas.fact.is_empty());
        assert_eq!(lucas.binom(10, 3), 120);
        assert_eq!(lucas.binom(p + 10, p + 3), 120);
    }

    #[test]
    fn hypothesis_examples() {
        assert!(hp_hypothesis_holds(3, 13, 13).unwrap());
        assert!(hp_hypothesis_holds(7, 125, 5).unwrap());
        // binom(12, 6) is a unit mod 13, binom(13, 6) is not
        assert!(hp_hypothesis_holds(7, 13, 13).unwrap());
        assert!(!hp_hypothesis_holds(8, 13, 13).unwrap());
        assert!(matches!(hp_hypothesis_holds(3, 12, 3), Err(Error::BadForm(_))));
    }

    #[test]
    fn cubic_selection() {
        assert_eq!(select_n_cubic(49, 13).unwrap(), 46);
        assert_eq!(select_n_cubic(3 * 13 + 2 + 1, 13).unwrap(), 3 * 13 + 2 + 1);
        assert!(matches!(select_n_cubic(5, 13), Err(Error::OutOfWindow(_))));
        // leading digit 3 > (5-1)/2 would carry
        assert!(matches!(select_n_cubic(17, 5), Err(Error::OutOfWindow(_))));
        assert!(matches!(select_n_cubic(10, 7), Err(Error::BadCongruence { .. })));
    }

    #[test]
    fn general_selection() {
        assert_eq!(select_n_general(60, 5, 2).unwrap(), 58);
        assert_eq!(select_n_general(71, 5, 2).unwrap(), 63);
        assert!(matches!(select_n_general(10, 5, 2), Err(Error::OutOfWindow(_))));
    }

    #[test]
    fn l_examples() {
        assert_eq!(compute_l(3, 13, 13).unwrap(), vec![0, 1, 2]);
        assert_eq!(compute_l(7, 125, 5).unwrap(), (0..7).collect::<Vec<_>>());
        assert_eq!(compute_l(1, 125, 5).unwrap(), vec![0]);
        assert_eq!(compute_l(1, 13, 13).unwrap(), vec![0]);
    }

    #[test]
    fn m_examples() {
        let m = compute_m(7, 125, 5).unwrap();
        assert!(m.contains(&7));
        assert!(!m.contains(&24));
        assert!(m.iter().all(|&x| (7..=62).contains(&x)));
    }

    #[test]
    fn variant_shape_at_5_pow_5() {
        let shape = VariantShape::new(5, 2, 1, 4).unwrap();
        assert_eq!(shape.n(), 49);
        assert_eq!(VariantShape::of_n(49, 5, 2), Some(shape));
        assert_eq!(VariantShape::of_n(48, 5, 2), None);
        assert_eq!(shape.top_shifted(), 4);
        assert_eq!(shape.second_shifted(), 2);
        assert_eq!(VariantShape::largest_for(55, 5, 2).unwrap(), shape);
        assert!(VariantShape::largest_for(40, 5, 2).is_err());
        assert!(VariantShape::new(5, 2, 2, 4).is_err());
        assert!(VariantShape::new(5, 2, 1, 3).is_err());
    }
}
