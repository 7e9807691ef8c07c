//! Exact minimum and maximum cycle means on integer-weighted digraphs.
//!
//! Karp's recurrence gives the optimal mean; a witness cycle is then read off
//! the subgraph of edges that are tight for the shortest-path potentials of
//! the reweighted graph `w * q - p`, where every cycle has mean exactly `p/q`.

use num::{BigInt, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: i64,
}

/// A cycle with its exact mean. `vertices` is closed: first == last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeanCycle {
    pub mean: Rational,
    pub vertices: Vec<usize>,
    /// Index into the edge list for each step of the cycle.
    pub edges: Vec<usize>,
    pub weight: i64,
}

impl MeanCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Minimum cycle mean over all cycles of the graph on `n` vertices, or
/// `None` if the graph is acyclic.
pub fn min_mean_cycle(n: usize, edges: &[Edge]) -> Option<MeanCycle> {
    let mean = karp_min_mean(n, edges)?;
    let cycle = tight_cycle(n, edges, &mean);
    Some(cycle)
}

pub fn max_mean_cycle(n: usize, edges: &[Edge]) -> Option<MeanCycle> {
    let neg: Vec<Edge> = edges.iter().map(|e| Edge { weight: -e.weight, ..*e }).collect();
    let mut c = min_mean_cycle(n, &neg)?;
    c.mean = -c.mean;
    c.weight = -c.weight;
    Some(c)
}

fn karp_min_mean(n: usize, edges: &[Edge]) -> Option<Rational> {
    if n == 0 {
        return None;
    }
    // d[k][v]: minimum weight of a walk with exactly k edges ending at v,
    // starting anywhere.
    let mut d: Vec<Vec<Option<i64>>> = vec![vec![Some(0); n]];
    for k in 1..=n {
        let mut row = vec![None; n];
        for e in edges {
            if let Some(prev) = d[k - 1][e.from] {
                let cand = prev + e.weight;
                if row[e.to].is_none_or(|cur| cand < cur) {
                    row[e.to] = Some(cand);
                }
            }
        }
        d.push(row);
    }
    let mut best: Option<Rational> = None;
    for v in 0..n {
        let Some(dn) = d[n][v] else { continue };
        let mut worst: Option<Rational> = None;
        for (k, row) in d.iter().enumerate().take(n) {
            if let Some(dk) = row[v] {
                let m = Rational::new(BigInt::from(dn - dk), BigInt::from((n - k) as i64));
                if worst.as_ref().is_none_or(|w| &m > w) {
                    worst = Some(m);
                }
            }
        }
        if let Some(w) = worst {
            if best.as_ref().is_none_or(|b| &w < b) {
                best = Some(w);
            }
        }
    }
    best
}

fn tight_cycle(n: usize, edges: &[Edge], mean: &Rational) -> MeanCycle {
    let p = mean.numer().clone();
    let q = mean.denom().clone();
    let w: Vec<BigInt> = edges.iter().map(|e| BigInt::from(e.weight) * &q - &p).collect();
    // Bellman-Ford from a virtual source joined to every vertex by 0-edges.
    let mut dist = vec![BigInt::zero(); n];
    for _ in 0..n {
        let mut changed = false;
        for (i, e) in edges.iter().enumerate() {
            let cand = &dist[e.from] + &w[i];
            if cand < dist[e.to] {
                dist[e.to] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        if &dist[e.from] + &w[i] == dist[e.to] {
            adj[e.from].push(i);
        }
    }
    let cyc = find_cycle(n, edges, &adj).expect("an optimal-mean cycle is tight");
    let weight: i64 = cyc.iter().map(|&i| edges[i].weight).sum();
    let mut vertices: Vec<usize> = cyc.iter().map(|&i| edges[i].from).collect();
    vertices.push(vertices[0]);
    debug_assert_eq!(Rational::new(BigInt::from(weight), BigInt::from(cyc.len() as i64)), *mean);
    MeanCycle { mean: mean.clone(), vertices, edges: cyc, weight }
}

/// Any directed cycle in the subgraph given by `adj`, as a list of edge ids.
fn find_cycle(n: usize, edges: &[Edge], adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; n];
    for s in 0..n {
        if color[s] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        let mut via: Vec<usize> = Vec::new();
        color[s] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let ei = adj[v][*next];
                *next += 1;
                let u = edges[ei].to;
                match color[u] {
                    0 => {
                        color[u] = 1;
                        via.push(ei);
                        stack.push((u, 0));
                    }
                    1 => {
                        let start = stack.iter().position(|&(x, _)| x == u).unwrap();
                        let mut cyc: Vec<usize> = via[start..].to_vec();
                        cyc.push(ei);
                        return Some(cyc);
                    }
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
                via.pop();
            }
        }
    }
    None
}
