//! Paley graphs on bitset adjacency and exact clique search.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::FieldDesc;

type Bits = Vec<u64>;

fn bit_test(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bit_clear(bits: &mut [u64], i: usize) {
    bits[i / 64] &= !(1 << (i % 64));
}

fn popcount(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

fn first_bit(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .position(|&w| w != 0)
        .map(|i| i * 64 + bits[i].trailing_zeros() as usize)
}

fn and(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn iter_bits(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * 64 + t)
        })
    })
}

/// Paley graph `P_q`: `x ~ y` iff `x - y` is a nonzero square.
#[derive(Clone, Debug)]
pub struct PaleyGraph {
    field: FieldDesc,
    size: usize,
    words: usize,
    adjacency: Vec<u64>,
}

impl PaleyGraph {
    pub fn new(field: &FieldDesc) -> Result<Self> {
        let q = field.q();
        if q % 4 != 1 {
            return Err(Error::BadCongruence { q });
        }
        let size = usize::try_from(q).map_err(|_| Error::Overflow {
            p: field.p(),
            r: field.r(),
        })?;
        let words = size.div_ceil(64);
        let residues = field.quadratic_residue_set();
        let mut adjacency = vec![0u64; size * words];
        // N(i) = i + QR
        for i in 0..size {
            let row = &mut adjacency[i * words..(i + 1) * words];
            for &s in &residues {
                bit_set(row, field.add_labels(i as u64, s) as usize);
            }
        }
        Ok(PaleyGraph {
            field: field.clone(),
            size,
            words,
            adjacency,
        })
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn order(&self) -> u64 {
        self.size as u64
    }

    pub fn neighbors(&self, v: usize) -> &[u64] {
        &self.adjacency[v * self.words..(v + 1) * self.words]
    }

    pub fn neighbor_labels(&self, v: u64) -> Vec<u64> {
        iter_bits(self.neighbors(v as usize)).map(|x| x as u64).collect()
    }

    pub fn adjacent(&self, a: u64, b: u64) -> bool {
        bit_test(self.neighbors(a as usize), b as usize)
    }

    pub fn degree(&self, v: u64) -> usize {
        popcount(self.neighbors(v as usize))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.size).map(|v| popcount(self.neighbors(v))).sum::<usize>() / 2
    }

    /// DIMACS edge format, vertices numbered from 1.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("c Paley graph P_{}\np edge {} {}\n", self.size, self.size, self.edge_count());
        for a in 0..self.size {
            for b in iter_bits(self.neighbors(a)).filter(|&b| b > a) {
                out.push_str(&format!("e {} {}\n", a + 1, b + 1));
            }
        }
        out
    }

    fn check_labels(&self, vertices: &[u64]) -> Result<()> {
        match vertices.iter().find(|&&v| v >= self.order()) {
            Some(&label) => Err(Error::LabelOutOfRange {
                label,
                q: self.order(),
            }),
            None => Ok(()),
        }
    }

    /// All pairs adjacent; the empty set and singletons are cliques.
    pub fn verify_clique(&self, vertices: &[u64]) -> Result<bool> {
        self.check_labels(vertices)?;
        for (i, &a) in vertices.iter().enumerate() {
            for &b in &vertices[i + 1..] {
                if a == b || !self.adjacent(a, b) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn max_clique(&self, opts: &SearchOptions) -> Clique {
        Search::new(self, opts).run()
    }

    /// Randomised greedy: repeatedly add the candidate with the most
    /// neighbours among the remaining candidates, ties broken by the seeded
    /// shuffle. The result is maximal; `exact` is set only when its size
    /// meets the best applicable upper bound.
    pub fn greedy_clique(&self, seed: u64) -> Clique {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..self.size).collect();
        order.shuffle(&mut rng);
        let mut cand = vec![0u64; self.words];
        for v in 0..self.size {
            bit_set(&mut cand, v);
        }
        let mut chosen = Vec::new();
        while popcount(&cand) > 0 {
            let mut best: Option<(usize, usize)> = None;
            for &v in &order {
                if !bit_test(&cand, v) {
                    continue;
                }
                let score = self
                    .neighbors(v)
                    .iter()
                    .zip(&cand)
                    .map(|(a, b)| (a & b).count_ones() as usize)
                    .sum::<usize>();
                if best.is_none_or(|(s, _)| score > s) {
                    best = Some((score, v));
                }
            }
            let (_, v) = best.expect("candidate set is nonempty");
            chosen.push(v as u64);
            cand = and(&cand, self.neighbors(v));
        }
        let size = chosen.len() as u64;
        let exact = crate::bounds::best_upper_bound(self.order()).is_ok_and(|b| b == size);
        Clique::new(self.order(), chosen, exact)
    }
}

pub fn build_paley(field: &FieldDesc) -> Result<PaleyGraph> {
    PaleyGraph::new(field)
}

/// A vertex set of `P_q` given by labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clique {
    pub q: u64,
    pub vertices: Vec<u64>,
    pub exact: bool,
}

impl Clique {
    /// Sorts and deduplicates the labels.
    pub fn new(q: u64, mut vertices: Vec<u64>, exact: bool) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        Clique { q, vertices, exact }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Checks every pairwise difference by Euler's criterion, independently
    /// of any adjacency structure.
    pub fn verify_in(&self, field: &FieldDesc) -> Result<bool> {
        if field.q() != self.q {
            return Err(Error::FieldMismatch);
        }
        let elems = self
            .vertices
            .iter()
            .map(|&v| field.elem_of(v))
            .collect::<Result<Vec<_>>>()?;
        for (i, a) in elems.iter().enumerate() {
            for b in &elems[i + 1..] {
                if !field.is_quadratic_residue(&field.sub(a, b)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `C - x`.
    pub fn translate(&self, field: &FieldDesc, x: u64) -> Clique {
        let vs = self.vertices.iter().map(|&v| field.sub_labels(v, x)).collect();
        Clique::new(self.q, vs, self.exact)
    }

    /// `lambda * C`.
    pub fn scale(&self, field: &FieldDesc, lambda: u64) -> Result<Clique> {
        let l = field.elem_of(lambda)?;
        let vs = self
            .vertices
            .iter()
            .map(|&v| Ok(field.label_of(&field.mul(&l, &field.elem_of(v)?))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Clique::new(self.q, vs, self.exact))
    }
}

/// `|{a_i + rho a_j}| = N^2` for a clique and a non-residue `rho`.
pub fn sumset_distinct(field: &FieldDesc, clique: &Clique, rho: u64) -> Result<bool> {
    let rho = field.elem_of(rho)?;
    if rho.is_zero() || field.is_quadratic_residue(&rho) {
        return Err(Error::BadForm("rho must be a quadratic non-residue".into()));
    }
    let elems = clique
        .vertices
        .iter()
        .map(|&v| field.elem_of(v))
        .collect::<Result<Vec<_>>>()?;
    let mut sums: Vec<u64> = Vec::with_capacity(elems.len() * elems.len());
    for a in &elems {
        for b in &elems {
            sums.push(field.label_of(&field.add(a, &field.mul(&rho, b))));
        }
    }
    sums.sort_unstable();
    sums.dedup();
    Ok(sums.len() == elems.len() * elems.len())
}

/// Default node budget for exact search.
pub const DEFAULT_NODE_LIMIT: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Single-threaded; returns the lexicographically smallest maximum
    /// clique containing `{0, 1}`.
    Canonical,
    /// Top-level branches on the rayon pool; any maximum witness.
    Parallel,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
    /// Restrict to cliques containing `{0, 1}` (valid by edge transitivity).
    pub symmetry: bool,
    pub mode: SearchMode,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            node_limit: DEFAULT_NODE_LIMIT,
            time_limit: None,
            symmetry: true,
            mode: SearchMode::Canonical,
        }
    }
}

struct Search<'g> {
    graph: &'g PaleyGraph,
    opts: SearchOptions,
    start: Instant,
    nodes: AtomicU64,
    aborted: AtomicBool,
    best_size: AtomicUsize,
    best: Mutex<Vec<usize>>,
}

impl<'g> Search<'g> {
    fn new(graph: &'g PaleyGraph, opts: &SearchOptions) -> Self {
        Search {
            graph,
            opts: opts.clone(),
            start: Instant::now(),
            nodes: AtomicU64::new(0),
            aborted: AtomicBool::new(false),
            best_size: AtomicUsize::new(0),
            best: Mutex::new(Vec::new()),
        }
    }

    fn tick(&self) -> bool {
        if self.aborted.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over_time = n % 1024 == 0
            && self
                .opts
                .time_limit
                .is_some_and(|t| self.start.elapsed() > t);
        if n > self.opts.node_limit || over_time {
            self.aborted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn offer(&self, clique: &[usize]) {
        let mut best = self.best.lock().expect("best-clique lock");
        if clique.len() > best.len() {
            *best = clique.to_vec();
            self.best_size.store(clique.len(), Ordering::SeqCst);
        }
    }

    fn root(&self) -> (Vec<usize>, Bits) {
        let g = self.graph;
        if self.opts.symmetry && g.size >= 2 {
            (vec![0, 1], and(g.neighbors(0), g.neighbors(1)))
        } else {
            let mut all = vec![0u64; g.words];
            for v in 0..g.size {
                bit_set(&mut all, v);
            }
            (Vec::new(), all)
        }
    }

    fn run(self) -> Clique {
        let (current, cand) = self.root();
        self.offer(&current);
        match self.opts.mode {
            SearchMode::Parallel => self.expand_parallel(&current, cand),
            SearchMode::Canonical => {
                let mut cur = current.clone();
                self.expand(&mut cur, cand.clone());
                if !self.aborted.load(Ordering::Relaxed) {
                    let target = self.best_size.load(Ordering::SeqCst);
                    let mut cur = current.clone();
                    if let Some(found) = self.first_of_size(&mut cur, cand, target) {
                        *self.best.lock().expect("best-clique lock") = found;
                    }
                }
            }
        }
        let exact = !self.aborted.load(Ordering::Relaxed);
        let best = self.best.into_inner().expect("best-clique lock");
        Clique::new(
            self.graph.order(),
            best.into_iter().map(|v| v as u64).collect(),
            exact,
        )
    }

    /// Greedy sequential colouring of `cand` in label order. Returns the
    /// vertices grouped by colour and the colour of each (1-based).
    fn colour_sort(&self, cand: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = cand.to_vec();
        let mut order = Vec::new();
        let mut colours = Vec::new();
        let mut colour = 0;
        while first_bit(&uncoloured).is_some() {
            colour += 1;
            let mut open = uncoloured.clone();
            while let Some(v) = first_bit(&open) {
                bit_clear(&mut open, v);
                bit_clear(&mut uncoloured, v);
                for (o, n) in open.iter_mut().zip(self.graph.neighbors(v)) {
                    *o &= !n;
                }
                order.push(v);
                colours.push(colour);
            }
        }
        (order, colours)
    }

    fn expand(&self, current: &mut Vec<usize>, mut cand: Bits) {
        if !self.tick() {
            return;
        }
        let (order, colours) = self.colour_sort(&cand);
        for idx in (0..order.len()).rev() {
            if current.len() + colours[idx] <= self.best_size.load(Ordering::Relaxed) {
                return;
            }
            let v = order[idx];
            current.push(v);
            let next = and(&cand, self.graph.neighbors(v));
            if first_bit(&next).is_none() {
                self.offer(current);
            } else {
                self.expand(current, next);
            }
            current.pop();
            if self.aborted.load(Ordering::Relaxed) {
                return;
            }
            bit_clear(&mut cand, v);
        }
    }

    fn expand_parallel(&self, current: &[usize], cand: Bits) {
        if !self.tick() {
            return;
        }
        let (order, colours) = self.colour_sort(&cand);
        (0..order.len()).into_par_iter().for_each(|idx| {
            if current.len() + colours[idx] <= self.best_size.load(Ordering::Relaxed) {
                return;
            }
            let v = order[idx];
            let mut sub = vec![0u64; self.graph.words];
            for &u in &order[..idx] {
                bit_set(&mut sub, u);
            }
            let next = and(&sub, self.graph.neighbors(v));
            let mut cur = current.to_vec();
            cur.push(v);
            if first_bit(&next).is_none() {
                self.offer(&cur);
            } else {
                self.expand(&mut cur, next);
            }
        });
    }

    /// Lexicographic depth-first search for the first clique of `target`
    /// vertices; branches take candidates in increasing label order so the
    /// first hit is the lexicographically smallest.
    fn first_of_size(&self, current: &mut Vec<usize>, cand: Bits, target: usize) -> Option<Vec<usize>> {
        if current.len() >= target {
            return Some(current.clone());
        }
        if !self.tick() {
            return None;
        }
        let (_, colours) = self.colour_sort(&cand);
        if current.len() + colours.last().copied().unwrap_or(0) < target {
            return None;
        }
        let mut rest = cand;
        while let Some(v) = first_bit(&rest) {
            if current.len() + popcount(&rest) < target {
                return None;
            }
            bit_clear(&mut rest, v);
            let next = and(&rest, self.graph.neighbors(v));
            current.push(v);
            let hit = self.first_of_size(current, next, target);
            current.pop();
            if hit.is_some() || self.aborted.load(Ordering::Relaxed) {
                return hit;
            }
        }
        None
    }
}
