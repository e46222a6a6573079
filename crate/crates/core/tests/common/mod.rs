//! Oracles and property bodies shared by the property tests and the
//! acceptance suite. Oracles avoid the library code paths they check.

#![allow(dead_code)]

use paley_core::digits::{select_n_cubic, select_n_general, Lucas};
use paley_core::paley::sumset_distinct;
use paley_core::polyfq::PolyFq;
use paley_core::{Clique, FieldDesc, PaleyGraph};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// `(p, r)` pairs small enough for exhaustive oracles.
pub const SMALL_FIELDS: &[(u64, u32)] = &[
    (3, 1),
    (5, 1),
    (7, 1),
    (13, 1),
    (17, 1),
    (3, 2),
    (5, 2),
    (7, 2),
    (3, 3),
    (5, 3),
    (3, 4),
];

/// Paley orders for clique properties.
pub const PALEY_ORDERS: &[u64] = &[5, 9, 13, 17, 25, 29, 37, 41, 49, 53, 61, 81, 89, 101, 109, 113, 121, 125];

pub fn field(idx: usize) -> FieldDesc {
    let (p, r) = SMALL_FIELDS[idx];
    FieldDesc::new(p, r).unwrap()
}

pub fn field_index() -> impl Strategy<Value = usize> {
    0..SMALL_FIELDS.len()
}

/// Pascal's triangle mod p up to row `rows`.
pub fn pascal_mod(p: u64, rows: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![1u64]];
    for m in 1..=rows {
        let prev = &t[m - 1];
        let mut row = vec![1u64; m + 1];
        for k in 1..m {
            row[k] = (prev[k - 1] + prev[k]) % p;
        }
        t.push(row);
    }
    t
}

/// Exact binomial, for small arguments.
pub fn binom_exact(m: u64, k: u64) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    (0..k).fold(1u128, |acc, i| acc * (m - i) as u128 / (i + 1) as u128)
}

/// Number of carries when adding `k` and `m - k` in base `p`; by Kummer the
/// p-adic valuation of `binom(m, k)`.
pub fn kummer_carries(m: u64, k: u64, p: u64) -> u32 {
    let (mut a, mut b, mut carry, mut count) = (k, m - k, 0, 0);
    while a > 0 || b > 0 || carry > 0 {
        let s = a % p + b % p + carry;
        carry = u64::from(s >= p);
        count += carry as u32;
        a /= p;
        b /= p;
    }
    count
}

/// Squares of all nonzero elements, as labels.
pub fn square_set(f: &FieldDesc) -> Vec<bool> {
    let mut is_sq = vec![false; f.q() as usize];
    for x in f.elements().filter(|x| !x.is_zero()) {
        is_sq[f.label_of(&f.mul(&x, &x)) as usize] = true;
    }
    is_sq
}

pub fn poly(f: &FieldDesc, labels: &[u64]) -> PolyFq {
    PolyFq::from_labels(f, labels).unwrap()
}

pub fn labels_strategy(max_len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(any::<u64>(), 0..=max_len)
}

pub fn reduce_labels(f: &FieldDesc, raw: &[u64]) -> Vec<u64> {
    raw.iter().map(|x| x % f.q()).collect()
}

/// Leibniz: `E^n(fg) = sum_{i+j=n} E^i f E^j g`.
pub fn prop_leibniz(idx: usize, a: &[u64], b: &[u64], n: usize) -> Result<(), TestCaseError> {
    let f = field(idx);
    let pf = poly(&f, &reduce_labels(&f, a));
    let pg = poly(&f, &reduce_labels(&f, b));
    let lhs = pf.mul(&pg).unwrap().hyper_derivative(n);
    let mut rhs = PolyFq::zero(&f);
    for i in 0..=n {
        let term = pf.hyper_derivative(i).mul(&pg.hyper_derivative(n - i)).unwrap();
        rhs = rhs.add(&term).unwrap();
    }
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// `E^n((x - c)^t) = binom(t, n) (x - c)^{t - n}`, binomial from the exact
/// integer value.
pub fn prop_shifted_power(idx: usize, c: u64, t: u64, n: u64) -> Result<(), TestCaseError> {
    let f = field(idx);
    let c = f.elem_of(c % f.q()).unwrap();
    let lhs = PolyFq::linear_power(&f, &c, t).hyper_derivative(n as usize);
    let b = (binom_exact(t, n) % f.p() as u128) as u64;
    let rhs = if n > t {
        PolyFq::zero(&f)
    } else {
        PolyFq::linear_power(&f, &c, t - n).scale(&f.from_u64(b))
    };
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// `(x - c)^k g` with `g(c) != 0` has multiplicity exactly `k` by both
/// synthetic division and the hyper-derivative criterion.
pub fn prop_multiplicity(idx: usize, c: u64, k: u64, g: &[u64]) -> Result<(), TestCaseError> {
    let f = field(idx);
    let c = f.elem_of(c % f.q()).unwrap();
    let mut g = poly(&f, &reduce_labels(&f, g));
    if g.is_zero() || g.eval(&c).is_zero() {
        g = g.add(&PolyFq::constant(&f, f.one())).unwrap();
        if g.eval(&c).is_zero() {
            g = g.add(&PolyFq::constant(&f, f.one())).unwrap();
        }
    }
    prop_assume!(!g.eval(&c).is_zero());
    let h = PolyFq::linear_power(&f, &c, k).mul(&g).unwrap();
    let division = h.root_multiplicity(&c).unwrap();
    let hyper = (0..=h.degree().unwrap() + 1)
        .take_while(|&m| h.multiplicity_at_least_via_hyper(&c, m).unwrap())
        .last()
        .unwrap();
    prop_assert_eq!(division as u64, k);
    prop_assert_eq!(hyper as u64, k);
    Ok(())
}

/// Euler's criterion against the explicit set of nonzero squares.
pub fn prop_euler(idx: usize, label: u64) -> Result<(), TestCaseError> {
    let f = field(idx);
    let squares = square_set(&f);
    let l = label % f.q();
    prop_assert_eq!(f.is_quadratic_residue(&f.elem_of(l).unwrap()), squares[l as usize]);
    Ok(())
}

/// A verified clique and a non-residue give `N^2` distinct sums
/// `a_i + rho a_j`; the clique survives translation and residue scaling.
pub fn prop_sumset(q_idx: usize, seed: u64, pick: u64) -> Result<(), TestCaseError> {
    let q = PALEY_ORDERS[q_idx];
    let f = FieldDesc::from_order(q).unwrap();
    let g = PaleyGraph::new(&f).unwrap();
    let clique = g.greedy_clique(seed);
    prop_assert!(clique.verify_in(&f).unwrap());
    let squares = square_set(&f);
    let non_residues: Vec<u64> = (1..q).filter(|&x| !squares[x as usize]).collect();
    let residues: Vec<u64> = (1..q).filter(|&x| squares[x as usize]).collect();
    let rho = non_residues[(pick % non_residues.len() as u64) as usize];
    prop_assert!(sumset_distinct(&f, &clique, rho).unwrap());
    let shifted = clique.translate(&f, pick % q);
    prop_assert!(shifted.verify_in(&f).unwrap());
    let lambda = residues[(pick % residues.len() as u64) as usize];
    prop_assert!(clique.scale(&f, lambda).unwrap().verify_in(&f).unwrap());
    Ok(())
}

/// Lucas against Pascal's triangle mod p.
pub fn prop_lucas(p: u64, table: &[Vec<u64>], m: u64, k: u64) -> Result<(), TestCaseError> {
    let lucas = Lucas::new(p).unwrap();
    let want = if k > m { 0 } else { table[m as usize][k as usize] };
    prop_assert_eq!(lucas.binom(m, k), want);
    prop_assert_eq!(lucas.nonzero(m, k), want != 0);
    Ok(())
}

/// Every clique size whose `N - 1` has `s + 1` digits and leading digit at
/// most `(p-1)/2`.
pub fn admissible_sizes(p: u64, s: u32) -> Vec<u64> {
    let h = (p - 1) / 2;
    let lo = p.pow(s);
    let hi = (h + 1) * p.pow(s);
    (lo..hi).map(|x| x + 1).collect()
}

/// `n <= N <= n + (p^s - 1)/2` and `binom(n - 1 + (q-1)/2, (q-1)/2) != 0`,
/// the binomial by Kummer's carry count.
pub fn check_select(p: u64, s: u32, size: u64) -> Result<(), String> {
    let n = if s == 1 {
        select_n_cubic(size, p)
    } else {
        select_n_general(size, p, s)
    }
    .map_err(|e| format!("N = {size}: {e}"))?;
    let q = p.pow(2 * s + 1);
    let half = (q - 1) / 2;
    if !(n <= size && size <= n + (p.pow(s) - 1) / 2) {
        return Err(format!("N = {size}, n = {n}: window violated"));
    }
    if n < 1 || kummer_carries(n - 1 + half, half, p) != 0 {
        return Err(format!("N = {size}, n = {n}: binomial vanishes"));
    }
    Ok(())
}

/// Pairwise residue check with plain modular arithmetic, prime `q` only.
pub fn is_clique_mod_p(q: u64, vs: &[u64]) -> bool {
    let half = (q - 1) / 2;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= q;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % q;
            }
            b = b * b % q;
            e >>= 1;
        }
        acc
    };
    vs.iter()
        .enumerate()
        .all(|(i, &a)| vs[i + 1..].iter().all(|&b| pow((a + q - b) % q, half) == 1))
}

/// Brute-force clique number for small prime `q`.
pub fn brute_omega_prime(q: u64) -> usize {
    let residue: Vec<bool> = {
        let mut r = vec![false; q as usize];
        for x in 1..q {
            r[(x * x % q) as usize] = true;
        }
        r
    };
    fn grow(q: u64, residue: &[bool], cur: &mut Vec<u64>, start: u64, best: &mut usize) {
        *best = (*best).max(cur.len());
        for v in start..q {
            if cur.iter().all(|&u| residue[((v + q - u) % q) as usize]) {
                cur.push(v);
                grow(q, residue, cur, v + 1, best);
                cur.pop();
            }
        }
    }
    let mut best = 0;
    grow(q, &residue, &mut vec![0], 1, &mut best);
    best
}

pub fn clique_of(q: u64, vs: &[u64]) -> Clique {
    Clique::new(q, vs.to_vec(), false)
}
