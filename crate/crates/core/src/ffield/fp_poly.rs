//! Dense polynomials over the prime field `F_p`, little-endian coefficient
//! vectors with no trailing zeros. Only what irreducibility testing needs.

pub(crate) fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn mul_mod_p(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn inv_mod_p(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod_p(result, base, p);
        }
        base = mul_mod_p(base, base, p);
        e >>= 1;
    }
    result
}

/// Remainder of `a` modulo `m` (`m` nonzero).
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod_p(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let factor = mul_mod_p(r[top], lead_inv, p);
        let shift = top - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = mul_mod_p(factor, c, p);
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mul_mod_p(x, y, p)) % p;
        }
    }
    rem(&prod, m, p)
}

pub(crate) fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(&result, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        e >>= 1;
    }
    result
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Ben-Or test: a monic `f` of degree `r` is irreducible iff
/// `gcd(f, x^{p^k} - x) = 1` for every `1 <= k <= r/2`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let r = f.len() - 1;
    if r == 0 {
        return false;
    }
    if r == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = vec![0, 1];
    let mut h = x.clone();
    for _ in 0..r / 2 {
        h = pow_mod(&h, p, f, p);
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        if diff.is_empty() {
            return false;
        }
        if gcd(f, &diff, p).len() > 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_irreducibility() {
        // x^2 + 1 over F_3 is irreducible, over F_5 it is (x-2)(x-3).
        assert!(is_irreducible(&[1, 0, 1], 3));
        assert!(!is_irreducible(&[1, 0, 1], 5));
        // x^4 + 1 over F_5 has no roots but factors into quadratics.
        assert!(!is_irreducible(&[1, 0, 0, 0, 1], 3));
        assert!(is_irreducible(&[2, 0, 0, 0, 1], 5));
    }

    #[test]
    fn gcd_of_coprime_is_constant() {
        let g = gcd(&[1, 1], &[2, 1], 7);
        assert_eq!(g.len(), 1);
    }
}
