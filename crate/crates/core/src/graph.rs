//! Configuration-model sampling and connected-component censuses.
//!
//! Graphs are stub-matched multigraphs: self-loops and parallel edges are kept.
//! With bounded degree there are O(1) of them in expectation and they never
//! change which nodes share a component.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::degree_model::DegreePmf;
use crate::error::{Error, Result};

/// Default finite-n giant-component predicate: largest component ≥ 5% of nodes.
pub const DEFAULT_GC_THRESHOLD: f64 = 0.05;

/// One degree per agent, with an even total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        let total: usize = degrees.iter().sum();
        if !total.is_multiple_of(2) {
            return Err(Error::Validation(format!("degree sum {total} is odd")));
        }
        Ok(DegreeSequence { degrees })
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }

    /// `(1/n) Σ_i d_i (d_i − 2)`, the finite-n connectivity statistic.
    pub fn connectivity_statistic(&self) -> Result<f64> {
        connectivity_statistic(&self.degrees)
    }
}

/// `(1/n) Σ_i d_i (d_i − 2)` over raw degrees.
pub fn connectivity_statistic(degrees: &[usize]) -> Result<f64> {
    if degrees.is_empty() {
        return Err(Error::Domain("connectivity statistic of an empty population".into()));
    }
    let total: f64 = degrees
        .iter()
        .map(|&d| {
            let d = d as f64;
            d * (d - 2.0)
        })
        .sum();
    Ok(total / degrees.len() as f64)
}

/// Draws one degree per agent from its own PMF, then repairs an odd total by
/// lowering one uniformly chosen agent with non-zero degree.
pub fn sample_degrees<R: Rng + ?Sized>(pmfs: &[&DegreePmf], rng: &mut R) -> Result<DegreeSequence> {
    let mut degrees: Vec<usize> = pmfs.iter().map(|p| p.quantile(rng.random::<f64>())).collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        fix_parity(&mut degrees, rng)?;
    }
    Ok(DegreeSequence { degrees })
}

/// Same as [`sample_degrees`] when every agent shares one PMF.
pub fn sample_iid_degrees<R: Rng + ?Sized>(pmf: &DegreePmf, n: usize, rng: &mut R) -> Result<DegreeSequence> {
    let mut degrees: Vec<usize> = (0..n).map(|_| pmf.quantile(rng.random::<f64>())).collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        fix_parity(&mut degrees, rng)?;
    }
    Ok(DegreeSequence { degrees })
}

fn fix_parity<R: Rng + ?Sized>(degrees: &mut [usize], rng: &mut R) -> Result<()> {
    let positive: Vec<usize> = (0..degrees.len()).filter(|&i| degrees[i] > 0).collect();
    let Some(&i) = positive.choose(rng) else {
        return Err(Error::Domain("odd degree sum with every degree zero".into()));
    };
    degrees[i] -= 1;
    Ok(())
}

/// An undirected multigraph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(Error::Validation(format!(
                "edge ({u}, {v}) has an endpoint outside 0..{n}"
            )));
        }
        Ok(Graph { n, edges })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n: usize) -> Self {
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph { n, edges }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Multigraph degrees; a self-loop counts twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Neighbour lists with multiplicity.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            if u != v {
                adj[v].push(u);
            }
        }
        adj
    }

    /// Disjoint union with `other`, whose nodes are shifted by `self.n`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        Graph {
            n: self.n + other.n,
            edges,
        }
    }

    /// Adds the edges of `other`, which must live on the same node set.
    pub fn overlay(&self, other: &Graph) -> Result<Graph> {
        if other.n != self.n {
            return Err(Error::Validation(format!(
                "cannot overlay graphs on {} and {} nodes",
                self.n, other.n
            )));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(Graph { n: self.n, edges })
    }

    pub fn filter_edges(&self, mut keep: impl FnMut(usize, (usize, usize)) -> bool) -> Graph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, &e)| keep(i, e))
            .map(|(_, &e)| e)
            .collect();
        Graph { n: self.n, edges }
    }

    /// Deletes every edge incident to `i`; `i` stays as an isolated node.
    pub fn remove_agent(&self, i: usize) -> Result<Graph> {
        if i >= self.n {
            return Err(Error::Domain(format!("node {i} is outside 0..{}", self.n)));
        }
        Ok(self.filter_edges(|_, (u, v)| u != i && v != i))
    }

    pub fn components(&self) -> ComponentCensus {
        components(self)
    }

    /// Edge-list dump: header `n m`, then one `u v` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(12 * (self.edges.len() + 1));
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Validation("edge list is missing its `n m` header".into()))?;
        let pair = |line: &str| -> Result<(usize, usize)> {
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(Error::Validation(format!("malformed edge-list line `{line}`"))),
            }
        };
        let (n, m) = pair(header)?;
        let edges = lines.map(pair).collect::<Result<Vec<_>>>()?;
        if edges.len() != m {
            return Err(Error::Validation(format!(
                "header promises {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::new(n, edges)
    }

    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(self.to_edge_list().as_bytes())
            .map_err(|e| Error::io(path, e))
    }
}

/// Uniform stub matching. Node degrees of the result equal `seq` exactly.
pub fn sample_configuration<R: Rng + ?Sized>(seq: &DegreeSequence, rng: &mut R) -> Graph {
    let mut stubs = stub_list(seq.degrees(), 0);
    debug_assert!(stubs.len().is_multiple_of(2));
    stubs.shuffle(rng);
    let edges = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    Graph { n: seq.len(), edges }
}

/// Bipartite stub matching between side A (nodes `0..|a|`) and side B (nodes
/// `|a|..|a|+|b|`). Excess stubs on the heavier side are discarded uniformly
/// at random before matching.
pub fn sample_bipartite<R: Rng + ?Sized>(a: &[usize], b: &[usize], rng: &mut R) -> Graph {
    let mut stubs_a = stub_list(a, 0);
    let mut stubs_b = stub_list(b, a.len());
    stubs_a.shuffle(rng);
    stubs_b.shuffle(rng);
    // after a uniform shuffle, truncating drops a uniformly random subset
    let m = stubs_a.len().min(stubs_b.len());
    stubs_a.truncate(m);
    stubs_b.truncate(m);
    let edges = stubs_a.into_iter().zip(stubs_b).collect();
    Graph {
        n: a.len() + b.len(),
        edges,
    }
}

fn stub_list(degrees: &[usize], offset: usize) -> Vec<usize> {
    let mut stubs = Vec::with_capacity(degrees.iter().sum());
    for (i, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(i + offset, d));
    }
    stubs
}

/// Adds up to `count` edges, each joining a uniformly chosen node to a
/// uniformly chosen friend-of-a-friend. Candidate triads come from the input
/// graph. Such edges stay inside an existing component.
pub fn add_triadic_links<R: Rng + ?Sized>(g: &Graph, count: usize, rng: &mut R) -> Graph {
    if count == 0 {
        return g.clone();
    }
    let adj = g.adjacency();
    let fof: Vec<Vec<usize>> = (0..g.n)
        .map(|u| {
            let mut out: Vec<usize> = adj[u]
                .iter()
                .flat_map(|&v| adj[v].iter().copied())
                .filter(|&w| w != u)
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();
    let eligible: Vec<usize> = (0..g.n).filter(|&u| !fof[u].is_empty()).collect();
    let mut out = g.clone();
    if eligible.is_empty() {
        return out;
    }
    for _ in 0..count {
        let u = eligible[rng.random_range(0..eligible.len())];
        let w = fof[u][rng.random_range(0..fof[u].len())];
        out.edges.push((u, w));
    }
    out
}

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, x: usize, y: usize) -> bool {
        let (mut rx, mut ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        if self.size[rx] < self.size[ry] {
            std::mem::swap(&mut rx, &mut ry);
        }
        self.parent[ry] = rx;
        self.size[rx] += self.size[ry];
        true
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

/// Connected-component partition of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCensus {
    /// Component label per node; labels are dense and ordered by first node.
    pub component_of: Vec<usize>,
    pub sizes: Vec<usize>,
    pub largest: usize,
}

impl ComponentCensus {
    pub fn node_count(&self) -> usize {
        self.component_of.len()
    }

    pub fn gc_fraction(&self) -> f64 {
        if self.component_of.is_empty() {
            0.0
        } else {
            self.largest as f64 / self.component_of.len() as f64
        }
    }

    pub fn has_giant(&self, gamma: f64) -> bool {
        self.gc_fraction() >= gamma
    }

    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.component_of[u] == self.component_of[v]
    }

    /// Partitions compare equal regardless of label order.
    pub fn same_partition(&self, other: &ComponentCensus) -> bool {
        if self.component_of.len() != other.component_of.len() {
            return false;
        }
        // both label sets are canonical (first-appearance order)
        self.component_of == other.component_of
    }
}

pub fn components(g: &Graph) -> ComponentCensus {
    let mut dsu = DisjointSets::new(g.n);
    for &(u, v) in &g.edges {
        dsu.union(u, v);
    }
    let mut label = vec![usize::MAX; g.n];
    let mut component_of = Vec::with_capacity(g.n);
    let mut sizes = Vec::new();
    for i in 0..g.n {
        let r = dsu.find(i);
        if label[r] == usize::MAX {
            label[r] = sizes.len();
            sizes.push(0);
        }
        component_of.push(label[r]);
        sizes[label[r]] += 1;
    }
    let largest = sizes.iter().copied().max().unwrap_or(0);
    ComponentCensus {
        component_of,
        sizes,
        largest,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    fn seq(d: &[usize]) -> DegreeSequence {
        DegreeSequence::new(d.to_vec()).unwrap()
    }

    #[test]
    fn parity_fixup_lowers_one_agent() {
        let one = DegreePmf::point_mass(1, 6).unwrap();
        let mut rng = stream(1, 0, 0);
        let s = sample_degrees(&[&one, &one, &one], &mut rng).unwrap();
        assert_eq!(s.total(), 2);
        assert_eq!(s.degrees().iter().filter(|&&d| d == 0).count(), 1);
    }

    #[test]
    fn zero_pmfs_give_zero_sequence() {
        let zero = DegreePmf::point_mass(0, 6).unwrap();
        let s = sample_iid_degrees(&zero, 10, &mut stream(1, 0, 0)).unwrap();
        assert!(s.degrees().iter().all(|&d| d == 0));
    }

    #[test]
    fn odd_sequence_rejected() {
        assert!(DegreeSequence::new(vec![1, 1, 1]).is_err());
    }

    #[test]
    fn empirical_mean_matches_binomial() {
        let pmf = DegreePmf::binomial(6, 0.3).unwrap();
        let n = 100_000;
        let s = sample_iid_degrees(&pmf, n, &mut stream(2, 0, 0)).unwrap();
        let mean = s.total() as f64 / n as f64;
        let se = (6.0 * 0.3 * 0.7 / n as f64).sqrt();
        assert!((mean - 1.8).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn configuration_examples() {
        let g = sample_configuration(&seq(&[1, 1]), &mut stream(0, 0, 0));
        let e = g.edges()[0];
        assert_eq!(g.edge_count(), 1);
        assert!(e == (0, 1) || e == (1, 0));

        let g = sample_configuration(&seq(&[0; 5]), &mut stream(0, 0, 0));
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn two_regular_is_union_of_cycles() {
        let g = sample_configuration(&seq(&[2; 50]), &mut stream(3, 0, 0));
        assert!(g.degrees().iter().all(|&d| d == 2));
        // every component of a 2-regular multigraph has as many edges as nodes
        let census = g.components();
        let mut edges_per = vec![0; census.sizes.len()];
        for &(u, _) in g.edges() {
            edges_per[census.component_of[u]] += 1;
        }
        assert_eq!(edges_per, census.sizes);
    }

    #[test]
    fn bipartite_examples() {
        let g = sample_bipartite(&[1], &[1], &mut stream(0, 0, 0));
        assert_eq!(g.edges(), &[(0, 1)]);

        let g = sample_bipartite(&[2, 0], &[1, 1], &mut stream(0, 0, 0));
        let mut e = g.edges().to_vec();
        e.sort();
        assert_eq!(e, vec![(0, 2), (0, 3)]);

        let g = sample_bipartite(&[3, 2], &[2, 1], &mut stream(4, 0, 0));
        assert_eq!(g.edge_count(), 3);
        let deg = g.degrees();
        assert_eq!(deg[2], 2);
        assert_eq!(deg[3], 1);
        assert!(deg[0] <= 3 && deg[1] <= 2);
        assert!(g.edges().iter().all(|&(u, v)| u < 2 && v >= 2));
    }

    #[test]
    fn census_examples() {
        let g = Graph::new(4, vec![(0, 1), (1, 2)]).unwrap();
        let c = g.components();
        let mut sizes = c.sizes.clone();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3]);
        assert_eq!(c.largest, 3);

        let c = Graph::empty(5).components();
        assert_eq!(c.sizes, vec![1; 5]);

        assert_eq!(Graph::cycle(4).components().sizes, vec![4]);
    }

    #[test]
    fn connectivity_statistic_examples() {
        assert_eq!(connectivity_statistic(&[2, 2, 2]).unwrap(), 0.0);
        assert_eq!(connectivity_statistic(&[1, 1, 3, 3]).unwrap(), 1.0);
        assert_eq!(connectivity_statistic(&[1, 1]).unwrap(), -1.0);
        assert!(connectivity_statistic(&[]).is_err());
    }

    #[test]
    fn remove_agent_examples() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        assert_eq!(g.remove_agent(0).unwrap().edge_count(), 0);
        let tri = Graph::cycle(3);
        assert_eq!(tri.remove_agent(1).unwrap().edge_count(), 1);
        let g = Graph::new(3, vec![(0, 1)]).unwrap();
        assert_eq!(g.remove_agent(2).unwrap(), g);
        assert!(g.remove_agent(3).is_err());
    }

    #[test]
    fn triadic_examples() {
        let path = Graph::new(4, vec![(0, 1), (1, 2)]).unwrap();
        let out = add_triadic_links(&path, 1, &mut stream(0, 0, 0));
        let added = out.edges()[2];
        assert!(added == (0, 2) || added == (2, 0));
        assert!(out.components().same_partition(&path.components()));

        assert_eq!(add_triadic_links(&path, 0, &mut stream(0, 0, 0)), path);
        let empty = Graph::empty(6);
        assert_eq!(add_triadic_links(&empty, 5, &mut stream(0, 0, 0)), empty);
    }

    #[test]
    fn edge_list_roundtrip() {
        let g = Graph::new(4, vec![(0, 1), (2, 2), (1, 3)]).unwrap();
        let text = g.to_edge_list();
        assert!(text.starts_with("4 3\n"));
        assert_eq!(Graph::from_edge_list(&text).unwrap(), g);
        assert!(Graph::from_edge_list("3 2\n0 1\n").is_err());
        assert!(Graph::from_edge_list("2 1\n0 5\n").is_err());
    }

    #[test]
    fn threshold_brackets_molloy_reed_point() {
        let n = 20_000;
        let mean_gc = |theta: f64| {
            let pmf = DegreePmf::binomial(6, theta).unwrap();
            (0..20)
                .map(|r| {
                    let mut rng = stream(11, (theta * 1000.0) as u64, r);
                    let s = sample_iid_degrees(&pmf, n, &mut rng).unwrap();
                    sample_configuration(&s, &mut rng).components().gc_fraction()
                })
                .sum::<f64>()
                / 20.0
        };
        assert!(mean_gc(0.16) < 0.02);
        assert!(mean_gc(0.25) > 0.10);
    }

    #[test]
    fn statistic_converges_to_z() {
        let pmf = DegreePmf::binomial(6, 0.3).unwrap();
        let n = 100_000;
        let s = sample_iid_degrees(&pmf, n, &mut stream(5, 0, 0)).unwrap();
        let stat = s.connectivity_statistic().unwrap();
        // standard error of d(d−2) under the pmf
        let (m, m2): (f64, f64) = pmf.probs().iter().enumerate().fold((0.0, 0.0), |(a, b), (d, p)| {
            let x = d as f64 * (d as f64 - 2.0);
            (a + x * p, b + x * x * p)
        });
        let se = ((m2 - m * m) / n as f64).sqrt();
        assert!((stat - pmf.connectivity_z()).abs() < 3.0 * se);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn configuration_preserves_degrees(raw in proptest::collection::vec(0usize..7, 1..200), seed in any::<u64>()) {
            let mut d = raw;
            if d.iter().sum::<usize>() % 2 == 1 {
                d[0] += 1;
            }
            let s = DegreeSequence::new(d.clone()).unwrap();
            let g = sample_configuration(&s, &mut stream(seed, 0, 0));
            prop_assert_eq!(g.degrees(), d);
            let c = g.components();
            prop_assert_eq!(c.sizes.iter().sum::<usize>(), c.node_count());
            prop_assert_eq!(c.largest, *c.sizes.iter().max().unwrap());
        }

        #[test]
        fn triadic_links_keep_partition(raw in proptest::collection::vec(0usize..4, 2..120), count in 0usize..40, seed in any::<u64>()) {
            let mut d = raw;
            if d.iter().sum::<usize>() % 2 == 1 {
                d[0] += 1;
            }
            let s = DegreeSequence::new(d).unwrap();
            let mut rng = stream(seed, 1, 0);
            let g = sample_configuration(&s, &mut rng);
            let closed = add_triadic_links(&g, count, &mut rng);
            prop_assert!(closed.components().same_partition(&g.components()));
        }
    }
}
