//! Polynomial certificates for clique bounds.
//!
//! For a clique `a_1 = 0, a_2, ..., a_N` and a parameter `n`, the auxiliary
//! polynomial is
//!
//! ```text
//! f(x) = sum_{i <= n} c_i (x - a_i)^{n - 1 + (q-1)/2} - 1
//! ```
//!
//! where the `c_i` solve the Vandermonde system
//! `sum_i c_i (-a_i)^j = [j = n - 1]` for `0 <= j <= n - 1`. When
//! `binom(n - 1 + (q-1)/2, (q-1)/2) != 0 mod p`, `f` has degree exactly
//! `(q-1)/2`, vanishes to order `n - 1` at `a_1..a_n` and to order `n` at the
//! other clique vertices, so `(N - 1) n <= (q-1)/2`.
//!
//! The variant system replaces the full moment conditions by the rows in
//! `L(n)` plus one row `m`; the scan over `m in M` tests whether the `m` row
//! of the moment matrix leaves the span of the `L(n)` rows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digits::{compute_l, compute_m, Lucas, VariantShape};
use crate::error::{Error, Result};
use crate::ffield::{FieldDesc, FieldElem};
use crate::paley::Clique;
use crate::polyfq::{MatrixFq, PolyFq};

/// Above this field order `f` is never materialised; checks run on closed
/// forms of its hyper-derivatives.
pub const MATERIALIZE_LIMIT: u64 = 100_000;

/// `lhs <= rhs` with both sides as integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: u64,
    pub rhs: u64,
    pub text: String,
}

impl Inequality {
    fn new(lhs: u64, rhs: u64, text: impl Into<String>) -> Self {
        Inequality {
            lhs,
            rhs,
            text: text.into(),
        }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

impl std::fmt::Display for Inequality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {} ≤ {}", self.text, self.lhs, self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplicityMethod {
    /// Exact, by repeated division by `x - a` of the materialised `f`.
    SyntheticDivision,
    /// Lower bound from vanishing closed-form hyper-derivatives.
    HyperClosedForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexMultiplicity {
    pub vertex: u64,
    pub required: u64,
    pub verified: u64,
    pub method: MultiplicityMethod,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepanovCertificate {
    pub field: FieldDesc,
    /// The clique as supplied.
    pub clique: Clique,
    /// Label of the vertex translated to zero.
    pub offset: u64,
    /// Translated vertices `a_1 = 0, ..., a_N`; the first `n` carry the system.
    pub vertices: Vec<u64>,
    pub n: u64,
    /// `c_1..c_n` as labels.
    pub coefficients: Vec<u64>,
    /// Coefficient labels of `f`, lowest degree first, when materialised.
    pub f: Option<Vec<u64>>,
    pub claimed_degree: u64,
    pub multiplicities: Vec<VertexMultiplicity>,
    pub conclusion: Inequality,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub checks: Vec<Check>,
    pub total_multiplicity: u64,
    pub required_multiplicity: u64,
    pub degree: u64,
    pub passed: bool,
}

impl CertificateReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn elems(field: &FieldDesc, labels: &[u64]) -> Result<Vec<FieldElem>> {
    labels.iter().map(|&l| field.elem_of(l)).collect()
}

fn labels(field: &FieldDesc, xs: &[FieldElem]) -> Vec<u64> {
    xs.iter().map(|x| field.label_of(x)).collect()
}

fn check_clique(field: &FieldDesc, clique: &Clique) -> Result<()> {
    if field.q() != clique.q {
        return Err(Error::FieldMismatch);
    }
    if clique.is_empty() || !clique.verify_in(field)? {
        return Err(Error::NotAClique);
    }
    Ok(())
}

/// Translates so the first vertex is zero, keeping the order.
fn normalise(field: &FieldDesc, vertices: &[u64]) -> (u64, Vec<u64>) {
    let offset = vertices[0];
    (offset, vertices.iter().map(|&v| field.sub_labels(v, offset)).collect())
}

/// `sum_i c_i (-a_i)^j` for `j` in `exponents`.
fn moments(field: &FieldDesc, nodes: &[FieldElem], c: &[FieldElem], exponents: &[u64]) -> Vec<FieldElem> {
    exponents
        .iter()
        .map(|&j| {
            nodes.iter().zip(c).fold(field.zero(), |acc, (a, ci)| {
                let t = field.mul(ci, &field.pow(&field.neg(a), j as u128));
                field.add(&acc, &t)
            })
        })
        .collect()
}

/// Coefficients of `sum_i c_i (x - a_i)^e` via moments: the coefficient of
/// `x^k` is `binom(e, k) * sum_i c_i (-a_i)^{e-k}`.
fn expand_by_moments(field: &FieldDesc, lucas: &Lucas, nodes: &[FieldElem], c: &[FieldElem], e: u64) -> Vec<FieldElem> {
    let len = e as usize + 1;
    let mut moment = vec![field.zero(); len];
    for (a, ci) in nodes.iter().zip(c) {
        let neg = field.neg(a);
        let mut power = ci.clone();
        for m in moment.iter_mut() {
            *m = field.add(m, &power);
            power = field.mul(&power, &neg);
        }
    }
    (0..len)
        .map(|k| {
            let b = lucas.binom(e, k as u64);
            if b == 0 {
                field.zero()
            } else {
                field.mul(&field.from_u64(b), &moment[len - 1 - k])
            }
        })
        .collect()
}

/// `sum_i c_i (x - a_i)^e` by summing expanded binomial powers.
fn expand_by_powers(field: &FieldDesc, nodes: &[FieldElem], c: &[FieldElem], e: u64) -> PolyFq {
    nodes.iter().zip(c).fold(PolyFq::zero(field), |acc, (a, ci)| {
        acc.add(&PolyFq::linear_power(field, a, e).scale(ci))
            .expect("same field")
    })
}

/// `E^(k) f (x)` for `f = sum_i c_i (x - a_i)^e - constant`, from the closed
/// form `binom(e, k) sum_i c_i (x - a_i)^{e-k} - [k = 0] constant`.
#[allow(clippy::too_many_arguments)]
fn hyper_closed_form(
    field: &FieldDesc,
    lucas: &Lucas,
    nodes: &[FieldElem],
    c: &[FieldElem],
    e: u64,
    k: u64,
    x: &FieldElem,
    constant: &FieldElem,
) -> FieldElem {
    let mut v = field.zero();
    if k <= e {
        let b = lucas.binom(e, k);
        if b != 0 {
            let sum = nodes.iter().zip(c).fold(field.zero(), |acc, (a, ci)| {
                let t = field.mul(ci, &field.pow(&field.sub(x, a), (e - k) as u128));
                field.add(&acc, &t)
            });
            v = field.mul(&field.from_u64(b), &sum);
        }
    }
    if k == 0 {
        v = field.sub(&v, constant);
    }
    v
}

/// Largest `m <= cap` with the closed-form hyper-derivatives of order `< m`
/// vanishing at `x`.
#[allow(clippy::too_many_arguments)]
fn closed_form_multiplicity(
    field: &FieldDesc,
    lucas: &Lucas,
    nodes: &[FieldElem],
    c: &[FieldElem],
    e: u64,
    x: &FieldElem,
    constant: &FieldElem,
    cap: u64,
) -> u64 {
    (0..cap)
        .find(|&k| !hyper_closed_form(field, lucas, nodes, c, e, k, x, constant).is_zero())
        .unwrap_or(cap)
}

fn certificate_exponent(field: &FieldDesc, n: u64) -> u64 {
    n - 1 + field.half_order()
}

pub fn build_certificate(field: &FieldDesc, clique: &Clique, n: u64) -> Result<StepanovCertificate> {
    check_clique(field, clique)?;
    let size = clique.len() as u64;
    if n < 2 || n > size {
        return Err(Error::NOutOfRange { n, size });
    }
    let lucas = Lucas::new(field.p())?;
    let half = field.half_order();
    let e = certificate_exponent(field, n);
    if !lucas.nonzero(e, half) {
        return Err(Error::HypothesisFails { n, q: field.q() });
    }
    let (offset, vertices) = normalise(field, &clique.vertices);
    let nodes = elems(field, &vertices)?;
    let system = MatrixFq::moment_matrix(field, &nodes[..n as usize], &(0..n).collect::<Vec<_>>());
    let mut rhs = vec![field.zero(); n as usize];
    rhs[n as usize - 1] = field.one();
    let c = system.solve(&rhs)?.ok_or(Error::NotAClique)?;

    let one = field.one();
    let active = &nodes[..n as usize];
    let (f, multiplicities) = if field.q() <= MATERIALIZE_LIMIT {
        let mut coeffs = expand_by_moments(field, &lucas, active, &c, e);
        coeffs[0] = field.sub(&coeffs[0], &one);
        let f = PolyFq::from_coeffs(field, coeffs);
        let mults = vertices
            .iter()
            .zip(&nodes)
            .enumerate()
            .map(|(j, (&v, a))| {
                Ok(VertexMultiplicity {
                    vertex: v,
                    required: if (j as u64) < n { n - 1 } else { n },
                    verified: f.root_multiplicity(a)? as u64,
                    method: MultiplicityMethod::SyntheticDivision,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        (Some(f.labels()), mults)
    } else {
        let mults = vertices
            .iter()
            .zip(&nodes)
            .enumerate()
            .map(|(j, (&v, a))| VertexMultiplicity {
                vertex: v,
                required: if (j as u64) < n { n - 1 } else { n },
                verified: closed_form_multiplicity(field, &lucas, active, &c, e, a, &one, n),
                method: MultiplicityMethod::HyperClosedForm,
            })
            .collect();
        (None, mults)
    };

    Ok(StepanovCertificate {
        field: field.clone(),
        clique: clique.clone(),
        offset,
        vertices,
        n,
        coefficients: labels(field, &c),
        f,
        claimed_degree: half,
        multiplicities,
        conclusion: Inequality::new((size - 1) * n, half, "(N-1)*n ≤ (q-1)/2"),
    })
}

/// Re-checks a certificate from its stored data alone.
pub fn verify_certificate(cert: &StepanovCertificate) -> CertificateReport {
    let field = &cert.field;
    let mut checks = Vec::new();
    let half = field.half_order();
    let size = cert.vertices.len() as u64;
    let n = cert.n;

    let fail = |checks: Vec<Check>, name: &str, detail: String| {
        let mut checks = checks;
        checks.push(Check::new(name, false, detail));
        CertificateReport {
            checks,
            total_multiplicity: 0,
            required_multiplicity: 0,
            degree: 0,
            passed: false,
        }
    };

    // clique
    let clique_ok = cert.clique.q == field.q()
        && !cert.clique.is_empty()
        && cert.clique.verify_in(field).unwrap_or(false);
    checks.push(Check::new(
        "clique",
        clique_ok,
        if clique_ok {
            format!("{} vertices, all differences are squares", cert.clique.len())
        } else {
            "NotAClique: some difference is not a nonzero square".to_string()
        },
    ));
    if !clique_ok {
        return fail(checks, "aborted", "clique check failed".into());
    }

    // normalisation
    let (offset, expected) = normalise(field, &cert.clique.vertices);
    let norm_ok = offset == cert.offset && expected == cert.vertices;
    checks.push(Check::new(
        "normalization",
        norm_ok,
        format!("offset {} translates a_1 to 0", cert.offset),
    ));
    if !norm_ok {
        return fail(checks, "aborted", "vertex list does not match the clique".into());
    }

    let n_ok = n >= 2 && n <= size && cert.coefficients.len() as u64 == n;
    checks.push(Check::new("n_range", n_ok, format!("2 ≤ n = {n} ≤ N = {size}")));
    if !n_ok {
        return fail(checks, "aborted", "n out of range".into());
    }

    let lucas = Lucas::new(field.p()).expect("field characteristic is prime");
    let e = certificate_exponent(field, n);
    let lead = lucas.binom(e, half);
    checks.push(Check::new(
        "hypothesis",
        lead != 0,
        format!("binom({e}, {half}) ≡ {lead} mod {}", field.p()),
    ));

    let nodes = elems(field, &cert.vertices).expect("clique labels checked");
    let c = match elems(field, &cert.coefficients) {
        Ok(c) => c,
        Err(err) => return fail(checks, "coefficients", err.to_string()),
    };
    let active = &nodes[..n as usize];

    // system (F)
    let residual = moments(field, active, &c, &(0..n).collect::<Vec<_>>());
    let bad: Vec<u64> = residual
        .iter()
        .enumerate()
        .filter(|(j, r)| {
            let want = if *j as u64 == n - 1 { field.one() } else { field.zero() };
            **r != want
        })
        .map(|(j, _)| j as u64)
        .collect();
    checks.push(Check::new(
        "system_f",
        bad.is_empty(),
        if bad.is_empty() {
            "all moment equations hold".to_string()
        } else {
            format!("residual nonzero at j = {bad:?}")
        },
    ));

    // direct re-evaluation of hyper-derivatives at the clique
    let one = field.one();
    let mut hyper_bad = Vec::new();
    for (j, a) in nodes.iter().enumerate() {
        let top = if (j as u64) < n { n - 1 } else { n };
        for k in 0..top {
            if !hyper_closed_form(field, &lucas, active, &c, e, k, a, &one).is_zero() {
                hyper_bad.push((cert.vertices[j], k));
            }
        }
    }
    checks.push(Check::new(
        "hyper_evaluations",
        hyper_bad.is_empty(),
        if hyper_bad.is_empty() {
            "E^(k) f vanishes as required at every vertex".to_string()
        } else {
            format!("nonzero (vertex, order) pairs: {hyper_bad:?}")
        },
    ));

    let required_total: u64 = (0..size).map(|j| if j < n { n - 1 } else { n }).sum();
    let mut degree = half;
    let mut total = 0;
    let mut mult_ok = cert.multiplicities.len() as u64 == size;
    let mut mult_detail = Vec::new();

    match &cert.f {
        Some(stored) => {
            let mut f = expand_by_powers(field, active, &c, e);
            f = f.sub(&PolyFq::constant(field, one.clone())).expect("same field");
            let same = PolyFq::from_labels(field, stored).is_ok_and(|s| s == f);
            checks.push(Check::new(
                "polynomial",
                same,
                if same {
                    "stored f matches the recomputed expansion".to_string()
                } else {
                    "stored f differs from the recomputed expansion".to_string()
                },
            ));
            let vanish: Vec<u64> = (0..n.saturating_sub(1))
                .filter(|&k| !f.coeff((e - k) as usize).is_zero())
                .collect();
            let lead_coeff = f.coeff(half as usize);
            let deg = f.degree().map_or(0, |d| d as u64);
            let degree_ok = vanish.is_empty()
                && lead_coeff == field.from_u64(lead)
                && deg == half
                && lead != 0;
            checks.push(Check::new(
                "degree",
                degree_ok,
                format!(
                    "deg f = {deg}; coefficient of x^{half} = {}; binom = {lead}; top coefficients nonzero at k = {vanish:?}",
                    field.label_of(&lead_coeff)
                ),
            ));
            degree = deg;
            for (j, a) in nodes.iter().enumerate() {
                let Some(rec) = cert.multiplicities.get(j) else { break };
                let exact = if f.is_zero() { 0 } else { f.root_multiplicity(a).unwrap_or(0) as u64 };
                let hyper_at = !f.is_zero()
                    && f.multiplicity_at_least_via_hyper(a, exact as usize).unwrap_or(false)
                    && !f.multiplicity_at_least_via_hyper(a, exact as usize + 1).unwrap_or(true);
                let ok = rec.vertex == cert.vertices[j]
                    && rec.verified == exact
                    && rec.required == if (j as u64) < n { n - 1 } else { n }
                    && exact >= rec.required
                    && hyper_at;
                if !ok {
                    mult_detail.push(format!("vertex {}: recorded {}, found {exact}", rec.vertex, rec.verified));
                }
                mult_ok &= ok;
                total += exact;
            }
        }
        None => {
            checks.push(Check::new("polynomial", true, "not materialized; closed-form checks only"));
            checks.push(Check::new(
                "degree",
                lead != 0,
                format!("coefficient of x^{half} is binom({e}, {half}) ≡ {lead}; higher ones vanish by system (F)"),
            ));
            for (j, a) in nodes.iter().enumerate() {
                let Some(rec) = cert.multiplicities.get(j) else { break };
                let found = closed_form_multiplicity(field, &lucas, active, &c, e, a, &one, n);
                let ok = rec.verified == found && found >= rec.required;
                if !ok {
                    mult_detail.push(format!("vertex {}: recorded {}, found {found}", rec.vertex, rec.verified));
                }
                mult_ok &= ok;
                total += found;
            }
        }
    }
    checks.push(Check::new(
        "multiplicities",
        mult_ok,
        if mult_detail.is_empty() {
            "synthetic division and hyper-derivative criterion agree; every vertex meets its requirement".to_string()
        } else {
            mult_detail.join("; ")
        },
    ));

    let accounting_ok = required_total == (size - 1) * n && required_total <= degree && total <= degree;
    checks.push(Check::new(
        "degree_accounting",
        accounting_ok,
        format!("n(n-1) + (N-n)n = {required_total}; verified total {total}; deg f = {degree}"),
    ));

    let concl_ok = cert.conclusion.lhs == (size - 1) * n && cert.conclusion.rhs == half && cert.conclusion.holds();
    checks.push(Check::new("conclusion", concl_ok, cert.conclusion.to_string()));

    let passed = checks.iter().all(|c| c.passed);
    CertificateReport {
        checks,
        total_multiplicity: total,
        required_multiplicity: required_total,
        degree,
        passed,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NSelection {
    SelectCubic,
    SelectGeneral,
    Scan,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct T1Bound {
    pub n: u64,
    pub method: NSelection,
    /// Largest `N'` with `(N' - 1) n <= (q-1)/2`.
    pub bound: u64,
    /// Whether `q` is an odd power, the setting the bound is stated for.
    pub odd_power: bool,
    pub largest_admissible_n: u64,
    pub certificate: StepanovCertificate,
}

/// Picks `n` (digit construction when it applies, otherwise the largest
/// admissible `n <= N`), builds the certificate and returns the implied bound.
pub fn t1_bound_for_clique(field: &FieldDesc, clique: &Clique) -> Result<T1Bound> {
    check_clique(field, clique)?;
    let size = clique.len() as u64;
    let (p, r, q) = (field.p(), field.r(), field.q());
    let lucas = Lucas::new(p)?;
    let half = field.half_order();
    let admissible = |n: u64| n >= 2 && n <= size && lucas.nonzero(n - 1 + half, half);

    let largest = (2..=size).rev().find(|&n| admissible(n));
    let selected = if r == 3 {
        crate::digits::select_n_cubic(size, p)
            .ok()
            .filter(|&n| admissible(n))
            .map(|n| (n, NSelection::SelectCubic))
    } else if r >= 5 && r % 2 == 1 {
        crate::digits::select_n_general(size, p, (r - 1) / 2)
            .ok()
            .filter(|&n| admissible(n))
            .map(|n| (n, NSelection::SelectGeneral))
    } else {
        None
    };
    let (n, method) = selected
        .or_else(|| largest.map(|n| (n, NSelection::Scan)))
        .ok_or(Error::NoAdmissibleN { q, size })?;
    let certificate = build_certificate(field, clique, n)?;
    Ok(T1Bound {
        n,
        method,
        bound: 1 + half / n,
        odd_power: r % 2 == 1,
        largest_admissible_n: largest.unwrap_or(n),
        certificate,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantReport {
    pub q: u64,
    pub n: u64,
    pub m: u64,
    /// The chosen `n`-subset, original labels.
    pub d: Vec<u64>,
    pub l_set: Vec<u64>,
    pub zero_in_l: bool,
    pub solvable: bool,
    pub coefficients: Option<Vec<u64>>,
    pub checks: Vec<Check>,
    /// Degree of `f` when materialised.
    pub degree: Option<u64>,
    /// `(n-1)n + n(N-n) <= n - 1 + (q-1)/2`.
    pub ledger: Option<Inequality>,
    /// `n(N-2) <= (q-3)/2`.
    pub conclusion: Option<Inequality>,
}

fn check_m(field: &FieldDesc, lucas: &Lucas, n: u64, m: u64) -> Result<()> {
    let half = field.half_order();
    if m < n || m > half {
        return Err(Error::PreconditionM(format!("m = {m} outside [{n}, {half}]")));
    }
    if !lucas.nonzero(certificate_exponent(field, n), m) {
        return Err(Error::PreconditionM(format!(
            "binom({}, {m}) vanishes mod {}",
            certificate_exponent(field, n),
            field.p()
        )));
    }
    Ok(())
}

pub fn build_variant_system(field: &FieldDesc, clique: &Clique, d: &[u64], n: u64, m: u64) -> Result<VariantReport> {
    check_clique(field, clique)?;
    let size = clique.len() as u64;
    if n < 2 || n > size {
        return Err(Error::NOutOfRange { n, size });
    }
    let mut d_sorted = d.to_vec();
    d_sorted.sort_unstable();
    d_sorted.dedup();
    if d_sorted.len() as u64 != n || d.len() as u64 != n {
        return Err(Error::BadSubset(format!("need {n} distinct vertices, got {d:?}")));
    }
    if let Some(x) = d_sorted.iter().find(|x| !clique.vertices.contains(x)) {
        return Err(Error::BadSubset(format!("{x} is not a clique vertex")));
    }
    let lucas = Lucas::new(field.p())?;
    check_m(field, &lucas, n, m)?;

    let q = field.q();
    let e = certificate_exponent(field, n);
    let l_set = compute_l(n, q, field.p())?;
    let zero_in_l = l_set.first() == Some(&0);

    let offset = clique.vertices[0];
    let all_nodes = elems(field, &clique.vertices.iter().map(|&v| field.sub_labels(v, offset)).collect::<Vec<_>>())?;
    let d_nodes = elems(field, &d_sorted.iter().map(|&v| field.sub_labels(v, offset)).collect::<Vec<_>>())?;
    let in_d: Vec<bool> = clique.vertices.iter().map(|v| d_sorted.contains(v)).collect();

    let mut exponents = l_set.clone();
    exponents.push(m);
    let system = MatrixFq::moment_matrix(field, &d_nodes, &exponents);
    let mut rhs = vec![field.zero(); exponents.len()];
    *rhs.last_mut().unwrap() = field.one();
    let solution = system.solve(&rhs)?;

    let mut report = VariantReport {
        q,
        n,
        m,
        d: d_sorted,
        l_set,
        zero_in_l,
        solvable: solution.is_some(),
        coefficients: None,
        checks: Vec::new(),
        degree: None,
        ledger: None,
        conclusion: None,
    };
    let Some(c) = solution else { return Ok(report) };
    report.coefficients = Some(labels(field, &c));

    let zero = field.zero();
    let mut bad = Vec::new();
    for (j, a) in all_nodes.iter().enumerate() {
        let top = if in_d[j] { n - 1 } else { n };
        for k in 0..top {
            if !hyper_closed_form(field, &lucas, &d_nodes, &c, e, k, a, &zero).is_zero() {
                bad.push((clique.vertices[j], k));
            }
        }
    }
    report.checks.push(Check::new(
        "hyper_evaluations",
        bad.is_empty(),
        if bad.is_empty() {
            "E^(k) f vanishes as required at every clique vertex".to_string()
        } else {
            format!("nonzero (vertex, order) pairs: {bad:?}")
        },
    ));
    report.checks.push(Check::new(
        "nonzero",
        lucas.binom(e, m) != 0,
        format!("coefficient of x^{} is binom({e}, {m}) ≡ {}", e - m, lucas.binom(e, m)),
    ));

    let mut degree_cap = e;
    if q <= MATERIALIZE_LIMIT {
        let f = PolyFq::from_coeffs(field, expand_by_moments(field, &lucas, &d_nodes, &c, e));
        let deg = f.degree().map_or(0, |d| d as u64);
        report.degree = Some(deg);
        degree_cap = deg;
        let mut short = Vec::new();
        let mut total = 0;
        for (j, a) in all_nodes.iter().enumerate() {
            let need = if in_d[j] { n - 1 } else { n };
            let got = f.root_multiplicity(a)? as u64;
            total += got;
            if got < need {
                short.push(clique.vertices[j]);
            }
        }
        report.checks.push(Check::new(
            "multiplicities",
            short.is_empty() && total <= deg,
            format!("synthetic division total {total}, deg f = {deg}, short at {short:?}"),
        ));
    }

    report.ledger = Some(Inequality::new(
        (n - 1) * n + n * (size - n),
        degree_cap.min(e),
        "(n-1)n + n(N-n) ≤ deg f ≤ n-1+(q-1)/2",
    ));
    report.conclusion = Some(Inequality::new(n * (size - 2), (q - 3) / 2, "n(N-2) ≤ (q-3)/2"));
    Ok(report)
}

/// `A_{m,n}`: rows `(-a_i)^l` for `l` in sorted `L(n)` then `m`, one column
/// per clique vertex (translated so the first vertex is zero).
pub fn build_a_matrix(field: &FieldDesc, clique: &Clique, n: u64, m: u64) -> Result<MatrixFq> {
    check_clique(field, clique)?;
    let lucas = Lucas::new(field.p())?;
    check_m(field, &lucas, n, m)?;
    let l_set = compute_l(n, field.q(), field.p())?;
    Ok(a_matrix_unchecked(field, clique, &l_set, m))
}

fn a_matrix_unchecked(field: &FieldDesc, clique: &Clique, l_set: &[u64], m: u64) -> MatrixFq {
    let (_, vertices) = normalise(field, &clique.vertices);
    let nodes = elems(field, &vertices).expect("clique labels in range");
    let mut exponents = l_set.to_vec();
    exponents.push(m);
    MatrixFq::moment_matrix(field, &nodes, &exponents)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MVerdict {
    pub m: u64,
    pub rank_l_rows: usize,
    pub rank_full: usize,
    /// The `m` row is outside the span of the `L(n)` rows.
    pub independent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureScanReport {
    pub q: u64,
    pub n: u64,
    pub clique_size: u64,
    pub strict: bool,
    pub l_set: Vec<u64>,
    pub m_count: u64,
    pub verdicts: Vec<MVerdict>,
    pub exists_independent: bool,
    pub variant: Option<VariantReport>,
    pub implied_bound: Option<Inequality>,
    /// `sqrt(q/2) + (12 + sqrt 2)/8 p^{s-1}`, display only; present when the
    /// strict-mode hypotheses verified on this instance.
    pub conditional_bound_display: Option<f64>,
}

/// Columns of `a` forming an independent set, extended by the smallest
/// remaining indices to `n` columns.
fn choose_subset(a: &MatrixFq, n: usize) -> Option<Vec<usize>> {
    let mut cols = a.pivot_columns();
    if cols.len() > n || n > a.cols() {
        return None;
    }
    for j in 0..a.cols() {
        if cols.len() == n {
            break;
        }
        if !cols.contains(&j) {
            cols.push(j);
        }
    }
    cols.sort_unstable();
    Some(cols)
}

pub fn conjecture_scan(field: &FieldDesc, clique: &Clique, n: u64, strict: bool) -> Result<ConjectureScanReport> {
    check_clique(field, clique)?;
    let (p, r, q) = (field.p(), field.r(), field.q());
    if n < 1 {
        return Err(Error::NOutOfRange { n, size: clique.len() as u64 });
    }
    let shape = if strict {
        if r % 2 == 0 || r < 5 {
            return Err(Error::BadForm(format!("strict mode needs q = p^(2s+1) with s >= 2, got {p}^{r}")));
        }
        let s = (r - 1) / 2;
        Some(VariantShape::of_n(n, p, s).ok_or_else(|| {
            Error::BadForm(format!("n - 1 = {} is not of the variant digit shape", n - 1))
        })?)
    } else {
        None
    };
    let l_set = compute_l(n, q, p)?;
    let m_set = if n <= field.half_order() { compute_m(n, q, p)? } else { Vec::new() };

    let mut verdicts: Vec<MVerdict> = m_set
        .par_iter()
        .map(|&m| {
            let a = a_matrix_unchecked(field, clique, &l_set, m);
            let l_rows: Vec<usize> = (0..l_set.len()).collect();
            let rank_l_rows = a.select_rows(&l_rows).rank();
            let rank_full = a.rank();
            MVerdict {
                m,
                rank_l_rows,
                rank_full,
                independent: rank_full > rank_l_rows,
            }
        })
        .collect();
    verdicts.sort_by_key(|v| v.m);
    let exists_independent = verdicts.iter().any(|v| v.independent);

    let size = clique.len() as u64;
    let mut variant = None;
    if n >= 2 && n <= size {
        if let Some(v) = verdicts.iter().find(|v| v.independent) {
            let a = a_matrix_unchecked(field, clique, &l_set, v.m);
            if let Some(cols) = choose_subset(&a, n as usize) {
                let d: Vec<u64> = cols.iter().map(|&j| clique.vertices[j]).collect();
                variant = Some(build_variant_system(field, clique, &d, n, v.m)?);
            }
        }
    }
    let implied_bound = variant
        .as_ref()
        .filter(|v| v.solvable && v.checks.iter().all(|c| c.passed))
        .and_then(|v| v.conclusion.clone());
    let conditional_bound_display = match (&shape, &implied_bound) {
        (Some(shape), Some(_)) => {
            let ps1 = (shape.p as f64).powi(shape.s as i32 - 1);
            Some((q as f64 / 2.0).sqrt() + (12.0 + 2f64.sqrt()) / 8.0 * ps1)
        }
        _ => None,
    };
    Ok(ConjectureScanReport {
        q,
        n,
        clique_size: size,
        strict,
        l_set,
        m_count: m_set.len() as u64,
        verdicts,
        exists_independent,
        variant,
        implied_bound,
        conditional_bound_display,
    })
}
