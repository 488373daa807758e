//! Reference implementations used by the integration tests. Nothing here
//! calls into the library's spread or greedy code.
#![allow(dead_code)]

use std::io::Write;

use boim_core::{CostVector, DirectedGraph, WeightVector};
use rand::Rng;

pub const ONE_MINUS_INV_E: f64 = 1.0 - 1.0 / std::f64::consts::E;

/// A small IC instance in plain vectors.
#[derive(Clone, Debug)]
pub struct Instance {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub w: Vec<f64>,
    pub costs: Vec<f64>,
    pub c0: f64,
}

impl Instance {
    pub fn graph(&self) -> DirectedGraph {
        DirectedGraph::from_edges(self.n, self.edges.clone()).unwrap()
    }

    pub fn weights(&self) -> WeightVector {
        WeightVector::new(self.w.clone()).unwrap()
    }

    pub fn cost_vector(&self) -> CostVector {
        CostVector::new(self.costs.clone(), self.c0).unwrap()
    }

    pub fn cost_of(&self, mask: usize) -> f64 {
        members(mask).map(|i| self.costs[i]).sum::<f64>() + self.c0
    }
}

pub fn members(mask: usize) -> impl Iterator<Item = usize> {
    (0..usize::BITS as usize).filter(move |&i| mask >> i & 1 == 1)
}

pub fn mask_of(set: &[usize]) -> usize {
    set.iter().fold(0, |m, &i| m | 1 << i)
}

/// Edges chosen independently with probability `density`, rejected until
/// the count is at most `max_edges`.
pub fn random_edges<R: Rng>(n: usize, density: f64, max_edges: usize, rng: &mut R) -> Vec<(usize, usize)> {
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(density) {
                    edges.push((u, v));
                }
            }
        }
        if edges.len() <= max_edges {
            return edges;
        }
    }
}

/// Random weights in [0, 1], costs in (0, 1], c0 in (0, 1].
pub fn random_instance<R: Rng>(n: usize, edges: Vec<(usize, usize)>, rng: &mut R) -> Instance {
    let w = edges.iter().map(|_| rng.gen_range(0.0..=1.0)).collect();
    let costs = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
    let c0 = 1.0 - rng.gen::<f64>();
    Instance { n, edges, w, costs, c0 }
}

pub fn weakly_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|i| find(&mut parent, i) == root)
}

/// Every live-edge realization with its probability and, per node, the
/// bitmask of nodes it reaches (found by depth-first search).
pub fn realizations(inst: &Instance) -> Vec<(f64, Vec<u64>)> {
    let m = inst.edges.len();
    assert!(m <= 22, "reference enumeration is limited to 22 edges");
    let mut out = Vec::with_capacity(1 << m);
    for live in 0..1usize << m {
        let mut prob = 1.0;
        let mut adj = vec![Vec::new(); inst.n];
        for (e, &(u, v)) in inst.edges.iter().enumerate() {
            if live >> e & 1 == 1 {
                prob *= inst.w[e];
                adj[u].push(v);
            } else {
                prob *= 1.0 - inst.w[e];
            }
        }
        let reach = (0..inst.n)
            .map(|s| {
                let mut seen = 1u64 << s;
                let mut stack = vec![s];
                while let Some(u) = stack.pop() {
                    for &v in &adj[u] {
                        if seen >> v & 1 == 0 {
                            seen |= 1 << v;
                            stack.push(v);
                        }
                    }
                }
                seen
            })
            .collect();
        out.push((prob, reach));
    }
    out
}

/// `p_i(S)` for every subset mask `S`.
pub fn subset_probs(inst: &Instance) -> Vec<Vec<f64>> {
    let n = inst.n;
    let mut table = vec![vec![0.0; n]; 1 << n];
    for (prob, reach) in realizations(inst) {
        if prob == 0.0 {
            continue;
        }
        for (mask, row) in table.iter_mut().enumerate() {
            let hit = members(mask).fold(0u64, |acc, s| acc | reach[s]);
            for (i, p) in row.iter_mut().enumerate() {
                if hit >> i & 1 == 1 {
                    *p += prob;
                }
            }
        }
    }
    table
}

pub fn subset_spreads(inst: &Instance) -> Vec<f64> {
    subset_probs(inst).iter().map(|row| row.iter().sum()).collect()
}

pub fn ratio(value: f64, cost: f64) -> f64 {
    if cost > 0.0 {
        value / cost
    } else if value > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Best `f(S) / (c(S) + c0)` over all subsets.
pub fn brute_force_ratio(inst: &Instance, table: &[f64]) -> f64 {
    (0..table.len()).map(|m| ratio(table[m], inst.cost_of(m))).fold(0.0, f64::max)
}

/// Eager greedy chain by bang-per-buck, zero-cost nodes first, ties to the
/// smaller id; returns the chain masks `S_0..S_n`.
pub fn eager_chain(inst: &Instance, f: &dyn Fn(usize) -> f64) -> Vec<usize> {
    let mut mask = 0usize;
    let mut chain = vec![0];
    for j in 0..inst.n {
        if inst.costs[j] <= 0.0 {
            mask |= 1 << j;
            chain.push(mask);
        }
    }
    while chain.len() <= inst.n {
        let base = f(mask);
        let mut best: Option<(f64, usize)> = None;
        for j in (0..inst.n).filter(|&j| mask >> j & 1 == 0) {
            let gain = (f(mask | 1 << j) - base) / inst.costs[j];
            if best.map_or(true, |(g, _)| gain > g) {
                best = Some((gain, j));
            }
        }
        mask |= 1 << best.unwrap().1;
        chain.push(mask);
    }
    chain
}

/// The eager greedy's output: the chain prefix with the best ratio, smallest on ties.
pub fn eager_greedy_ratio(inst: &Instance, f: &dyn Fn(usize) -> f64) -> usize {
    let chain = eager_chain(inst, f);
    let mut best = chain[0];
    let mut best_ratio = ratio(f(best), inst.cost_of(best));
    for &m in &chain[1..] {
        let r = ratio(f(m), inst.cost_of(m));
        if r > best_ratio {
            best_ratio = r;
            best = m;
        }
    }
    best
}

/// Writes a line straight to stderr so it shows up even for passing tests.
pub fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

/// Prints the criterion's verdict and panics if it failed.
pub fn verdict(name: &str, pass: bool, detail: &str) {
    report(&format!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" }));
    assert!(pass, "{name}: {detail}");
}
