//! Upper bounds on `omega(P_q)` as exact integers.
//!
//! Every bound is the largest integer satisfying the quadratic integer
//! inequality behind it; no floating point takes part in any asserted value.

use std::io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{is_prime, prime_power_decomposition};

/// `floor(sqrt(n))`.
pub fn isqrt(n: u128) -> u128 {
    n.isqrt()
}

/// `ceil(sqrt(n))`.
fn ceil_isqrt(n: u128) -> u128 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

fn require_paley_order(q: u64) -> Result<(u64, u32)> {
    let (p, r) = prime_power_decomposition(q).ok_or(Error::NotPrimePower(q))?;
    if q % 4 != 1 {
        return Err(Error::BadCongruence { q });
    }
    Ok((p, r))
}

/// `(q + 1) / 2`.
pub fn trivial_bound(q: u64) -> Result<u64> {
    require_paley_order(q)?;
    Ok((q + 1) / 2)
}

/// `floor(sqrt(q))`.
pub fn sqrt_bound(q: u64) -> Result<u64> {
    require_paley_order(q)?;
    Ok(isqrt(q as u128) as u64)
}

/// Largest `N` with `2 N (N - 1) <= p - 1`.
pub fn hp_bound(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p % 4 != 1 {
        return Err(Error::BadCongruence { q: p });
    }
    Ok(largest_satisfying(1, |n| 2 * n * (n - 1) <= p as i128 - 1))
}

/// Smallest `c` with `2 c^2 >= p`.
pub fn ceil_sqrt_half(p: u64) -> u64 {
    // c = ceil(sqrt(p / 2)) = ceil(sqrt(2p) / 2)
    let mut c = ceil_isqrt(2 * p as u128).div_ceil(2) as u64;
    while c > 0 && 2 * (c as u128 - 1).pow(2) >= p as u128 {
        c -= 1;
    }
    while 2 * (c as u128).pow(2) < p as u128 {
        c += 1;
    }
    c
}

/// Largest `N >= start` satisfying a predicate that holds at `start` and,
/// past `start`, fails from some point on.
fn largest_satisfying(start: u64, holds: impl Fn(i128) -> bool) -> u64 {
    let mut lo = start as i128;
    debug_assert!(holds(lo));
    let mut step = 1i128;
    while holds(lo + step) {
        lo += step;
        step *= 2;
    }
    let mut hi = lo + step; // fails
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo as u64
}

fn odd_power_of_one_mod_four(q: u64) -> Result<(u64, u32)> {
    let (p, r) = prime_power_decomposition(q).ok_or(Error::NotPrimePower(q))?;
    if r % 2 == 0 || p % 4 != 1 {
        return Err(Error::BadForm(format!(
            "{q} is not an odd power of a prime congruent to 1 mod 4"
        )));
    }
    Ok((p, r))
}

/// If `floor(sqrt q)` is even, `w^2 + w - 1 <= q`; if odd, `w^2 + 2w - 2 <= q`.
pub fn brm_bound(q: u64) -> Result<u64> {
    odd_power_of_one_mod_four(q)?;
    let q = q as i128;
    if isqrt(q as u128) % 2 == 0 {
        Ok(largest_satisfying(1, |w| w * w + w - 1 <= q))
    } else {
        Ok(largest_satisfying(1, |w| w * w + 2 * w - 2 <= q))
    }
}

/// Both branches of the main bound for `q = p^{2s+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainBranches {
    /// `p^s * ceil(sqrt(p/2))`.
    pub ceil_branch: u64,
    /// Largest `N` with `(N-1)(N - (p^s-1)/2) <= (q-1)/2` (`s >= 1`), or the
    /// prime-field bound when `s = 0`.
    pub quadratic_branch: u64,
}

impl MainBranches {
    pub fn value(&self) -> u64 {
        self.ceil_branch.min(self.quadratic_branch)
    }
}

pub fn main_branches(p: u64, s: u32) -> Result<MainBranches> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p % 4 != 1 {
        return Err(Error::BadCongruence { q: p });
    }
    let ps = p.checked_pow(s).ok_or(Error::Overflow { p, r: s })?;
    let q = p
        .checked_pow(2 * s + 1)
        .filter(|&q| q < crate::ffield::MAX_ORDER)
        .ok_or(Error::Overflow { p, r: 2 * s + 1 })?;
    let ceil_branch = ps * ceil_sqrt_half(p);
    let quadratic_branch = if s == 0 {
        hp_bound(p)?
    } else {
        let shift = ((ps - 1) / 2) as i128;
        let rhs = ((q - 1) / 2) as i128;
        largest_satisfying(shift.max(1) as u64, |n| (n - 1) * (n - shift) <= rhs)
    };
    Ok(MainBranches {
        ceil_branch,
        quadratic_branch,
    })
}

/// `min(p^s ceil(sqrt(p/2)), largest N of the quadratic inequality)`.
pub fn main_bound(p: u64, s: u32) -> Result<u64> {
    Ok(main_branches(p, s)?.value())
}

/// Rational interval `[lower, upper] / 2^32` enclosing the closed form
/// `sqrt(q/2) + (p^s + 1)/4 + (sqrt(2p)/32) p^{s-1}`. Display only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormDisplay {
    pub lower_scaled: u128,
    pub upper_scaled: u128,
}

impl ClosedFormDisplay {
    pub const SCALE_BITS: u32 = 32;

    pub fn lower(&self) -> f64 {
        self.lower_scaled as f64 / (1u64 << Self::SCALE_BITS) as f64
    }

    pub fn upper(&self) -> f64 {
        self.upper_scaled as f64 / (1u64 << Self::SCALE_BITS) as f64
    }
}

pub fn closed_form_display(p: u64, s: u32) -> Result<ClosedFormDisplay> {
    let ps = p.checked_pow(s).ok_or(Error::Overflow { p, r: s })? as u128;
    let q = p
        .checked_pow(2 * s + 1)
        .filter(|&q| q < crate::ffield::MAX_ORDER)
        .ok_or(Error::Overflow { p, r: 2 * s + 1 })? as u128;
    let p = p as u128;
    // sqrt(q/2) * 2^32 = sqrt(q * 2^63)
    let a_lo = isqrt(q << 63);
    let a_hi = ceil_isqrt(q << 63);
    // (p^s + 1)/4 * 2^32 = (p^s + 1) * 2^30, exact
    let b = (ps + 1) << 30;
    // sqrt(2p) * 2^32 / 32 * p^{s-1}
    let r_lo = isqrt((2 * p) << 64);
    let r_hi = ceil_isqrt((2 * p) << 64);
    let (c_lo, c_hi) = if s == 0 {
        (r_lo / (32 * p), (r_hi).div_ceil(32 * p))
    } else {
        let pm = ps / p;
        ((r_lo * pm) / 32, (r_hi * pm).div_ceil(32))
    };
    Ok(ClosedFormDisplay {
        lower_scaled: a_lo + b + c_lo,
        upper_scaled: a_hi + b + c_hi,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub value: u64,
    pub inequality: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaExact {
    pub value: u64,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub q: u64,
    pub p: u64,
    pub r: u32,
    pub entries: Vec<BoundEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub main_branches: Option<MainBranches>,
    /// Outward-rounded closed form of the main bound, display only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_display: Option<ClosedFormDisplay>,
    pub omega_exact: Option<OmegaExact>,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<u64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.value)
    }

    /// Smallest bound in the table.
    pub fn best(&self) -> u64 {
        self.entries.iter().map(|e| e.value).min().expect("trivial bound is always present")
    }

    /// `omega <= value` for every entry (vacuous without a known omega).
    pub fn omega_respects_all(&self) -> bool {
        self.omega_exact
            .as_ref()
            .is_none_or(|w| self.entries.iter().all(|e| w.value <= e.value))
    }
}

pub fn bounds_table(q: u64, omega: Option<OmegaExact>) -> Result<BoundReport> {
    let (p, r) = require_paley_order(q)?;
    let mut entries = vec![
        BoundEntry {
            name: "trivial".into(),
            value: trivial_bound(q)?,
            inequality: "2w <= q + 1".into(),
        },
        BoundEntry {
            name: "sqrt".into(),
            value: sqrt_bound(q)?,
            inequality: "w^2 <= q".into(),
        },
    ];
    if r == 1 {
        entries.push(BoundEntry {
            name: "hp".into(),
            value: hp_bound(p)?,
            inequality: "2w(w-1) <= p - 1".into(),
        });
    }
    let mut branches = None;
    let mut display = None;
    if r % 2 == 1 {
        let even = isqrt(q as u128) % 2 == 0;
        entries.push(BoundEntry {
            name: "brm".into(),
            value: brm_bound(q)?,
            inequality: if even {
                "w^2 + w - 1 <= q".into()
            } else {
                "w^2 + 2w - 2 <= q".into()
            },
        });
        let s = (r - 1) / 2;
        let b = main_branches(p, s)?;
        let quadratic = match s {
            0 => "2w(w-1) <= p - 1".to_string(),
            1 => "(w-1)(w-(p-1)/2) <= (q-1)/2".to_string(),
            _ => "(w-1)(w-(p^s-1)/2) <= (q-1)/2".to_string(),
        };
        entries.push(BoundEntry {
            name: "main".into(),
            value: b.value(),
            inequality: format!("min(p^s*ceil(sqrt(p/2)), {quadratic})"),
        });
        branches = Some(b);
        display = Some(closed_form_display(p, s)?);
    }
    Ok(BoundReport {
        q,
        p,
        r,
        entries,
        main_branches: branches,
        closed_form_display: display,
        omega_exact: omega,
    })
}

/// Smallest applicable bound for `q`.
pub fn best_upper_bound(q: u64) -> Result<u64> {
    Ok(bounds_table(q, None)?.best())
}

/// CSV columns: `q,p,r,bound_name,value,inequality,omega_exact`. A known
/// omega adds a row named `omega`.
pub fn write_csv<W: io::Write>(mut w: W, reports: &[BoundReport], header: bool) -> io::Result<()> {
    if header {
        writeln!(w, "q,p,r,bound_name,value,inequality,omega_exact")?;
    }
    for rep in reports {
        let omega = rep
            .omega_exact
            .as_ref()
            .map_or(String::new(), |o| o.value.to_string());
        for e in &rep.entries {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                rep.q,
                rep.p,
                rep.r,
                e.name,
                e.value,
                csv_quote(&e.inequality),
                omega
            )?;
        }
        if let Some(o) = &rep.omega_exact {
            writeln!(
                w,
                "{},{},{},omega,{},{},{}",
                rep.q,
                rep.p,
                rep.r,
                o.value,
                csv_quote(&format!("exact ({})", o.provenance)),
                omega
            )?;
        }
    }
    Ok(())
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
