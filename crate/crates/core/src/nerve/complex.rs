use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::VecDeque;
use std::fmt::Write as _;

use super::space::NetSpace;
use crate::error::{LabError, Result};

/// Default cap on the number of net centers.
pub const NET_CAP: usize = 100_000;

#[derive(Debug, Clone, Serialize)]
pub struct EpsNet<P> {
    pub centers: Vec<P>,
    pub epsilon: f64,
    /// Every sample lies within `epsilon` of a center.
    pub maximal: bool,
    pub samples_seen: usize,
}

/// Greedy maximal `epsilon`-separated subset of the sample stream.
pub fn build_eps_net<S: NetSpace>(
    space: &S,
    samples: &[S::Point],
    epsilon: f64,
    cap: usize,
) -> Result<EpsNet<S::Point>> {
    if !(epsilon > 0.0) {
        return Err(LabError::pre("epsilon must be positive"));
    }
    let mut centers: Vec<S::Point> = Vec::new();
    for p in samples {
        if centers.iter().all(|c| space.distance(c, p) >= epsilon) {
            if centers.len() >= cap {
                return Err(LabError::CapExceeded { cap });
            }
            centers.push(p.clone());
        }
    }
    // Greedy insertion covers every sample it rejected; checked anyway.
    let maximal = samples.par_iter().all(|p| centers.iter().any(|c| space.distance(c, p) < epsilon));
    Ok(EpsNet { centers, epsilon, maximal, samples_seen: samples.len() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NerveComplex {
    pub vertices: usize,
    /// `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// `(i, j, k)` with `i < j < k`, sorted.
    pub triangles: Vec<(usize, usize, usize)>,
}

/// Nerve of the cover by balls of radius `r` about the net centers.
///
/// The balls cover the sampled region only when `r >= epsilon`; smaller
/// radii are rejected.
pub fn nerve<S: NetSpace>(space: &S, net: &EpsNet<S::Point>, r: f64) -> Result<NerveComplex> {
    if !(r >= net.epsilon) {
        return Err(LabError::pre(format!("ball radius {r} is below the net spacing {}", net.epsilon)));
    }
    let c = &net.centers;
    let n = c.len();
    let adj: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| i != j && space.distance(&c[i], &c[j]) < 2.0 * r).collect())
        .collect();
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).filter(|&(i, j)| adj[i][j]).collect();
    let triangles: Vec<(usize, usize, usize)> = edges
        .par_iter()
        .flat_map_iter(|&(i, j)| {
            let adj = &adj;
            ((j + 1)..n).filter(move |&k| adj[i][k] && adj[j][k]).map(move |k| (i, j, k))
        })
        .filter(|&(i, j, k)| space.triple_radius(&c[i], &c[j], &c[k], r) < r)
        .collect();
    let mut triangles = triangles;
    triangles.sort_unstable();
    Ok(NerveComplex { vertices: n, edges, triangles })
}

/// Packing bound on the degree of a nerve vertex.
///
/// Neighbors of a center lie within `2r` of it and the `epsilon/2`-balls
/// about all of them are disjoint in the universal cover, so they fit in the
/// ball of radius `2r + epsilon/2`. At `r = epsilon` this is the classical
/// `vol(B_{2.5 eps}) / vol(B_{eps/2})`, less one for the center itself.
pub fn degree_bound<S: NetSpace>(space: &S, epsilon: f64, r: f64) -> usize {
    let ratio = space.ball_area(2.0 * r + epsilon / 2.0) / space.ball_area(epsilon / 2.0);
    // a ratio that is an integer in exact arithmetic must not floor down
    ((ratio * (1.0 + 1e-12)).floor() as usize).saturating_sub(1)
}

impl NerveComplex {
    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Largest vertex degree. Bounded by [`degree_bound`].
    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0; self.vertices];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for &(i, j) in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a] = b;
            }
        }
        (0..self.vertices).map(|x| find(&mut parent, x)).collect()
    }

    pub fn component_count(&self) -> usize {
        let mut roots = self.components();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// `vertices N`, then `edge i j` and `triangle i j k` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("vertices {}\n", self.vertices);
        for (i, j) in &self.edges {
            let _ = writeln!(s, "edge {i} {j}");
        }
        for (i, j, k) in &self.triangles {
            let _ = writeln!(s, "triangle {i} {j} {k}");
        }
        s
    }
}

/// How the spanning tree is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TreeChoice {
    /// Breadth-first from vertex 0.
    BreadthFirst,
    /// Kruskal over a seeded random edge order.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub generators: usize,
    /// Words over signed 1-based generator indices.
    pub relators: Vec<Vec<i32>>,
    pub tree_edges: Vec<(usize, usize)>,
    /// The nerve edge behind each generator.
    pub generator_edges: Vec<(usize, usize)>,
}

impl Presentation {
    pub fn new(generators: usize, relators: Vec<Vec<i32>>) -> Result<Self> {
        for r in &relators {
            if r.iter().any(|&l| l == 0 || l.unsigned_abs() as usize > generators) {
                return Err(LabError::pre(format!("relator {r:?} uses a letter outside 1..={generators}")));
            }
        }
        Ok(Self { generators, relators, tree_edges: Vec::new(), generator_edges: Vec::new() })
    }

    pub fn max_relator_length(&self) -> usize {
        self.relators.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `generators g` then one `relator ...` line per relator, letters
    /// written `x3` / `x3^-1`.
    pub fn to_text(&self) -> String {
        let mut s = format!("generators {}\n", self.generators);
        for r in &self.relators {
            let w: Vec<String> =
                r.iter().map(|&l| if l > 0 { format!("x{l}") } else { format!("x{}^-1", -l) }).collect();
            let _ = writeln!(s, "relator {}", w.join(" "));
        }
        s
    }
}

fn spanning_tree(c: &NerveComplex, choice: TreeChoice) -> Vec<(usize, usize)> {
    match choice {
        TreeChoice::BreadthFirst => {
            let mut nbrs = vec![Vec::new(); c.vertices];
            for &(i, j) in &c.edges {
                nbrs[i].push(j);
                nbrs[j].push(i);
            }
            let mut seen = vec![false; c.vertices];
            let mut tree = Vec::new();
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(v) = queue.pop_front() {
                for &w in &nbrs[v] {
                    if !seen[w] {
                        seen[w] = true;
                        tree.push((v.min(w), v.max(w)));
                        queue.push_back(w);
                    }
                }
            }
            tree
        }
        TreeChoice::Random(seed) => {
            let mut order = c.edges.clone();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let mut parent: Vec<usize> = (0..c.vertices).collect();
            let find = |p: &mut Vec<usize>, mut x: usize| {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            };
            let mut tree = Vec::new();
            for (i, j) in order {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                    tree.push((i, j));
                }
            }
            tree
        }
    }
}

/// Generators are the non-tree edges, oriented from the smaller vertex;
/// each triangle `i < j < k` gives the loop `(i j)(j k)(i k)^-1` with tree
/// edges deleted, so every relator has length at most 3.
pub fn presentation_from_nerve(c: &NerveComplex, tree: TreeChoice) -> Result<Presentation> {
    if c.vertices == 0 {
        return Err(LabError::Empty("complex has no vertices".into()));
    }
    let comps = c.component_count();
    if comps != 1 {
        return Err(LabError::Disconnected { components: comps });
    }
    let mut tree_edges = spanning_tree(c, tree);
    tree_edges.sort_unstable();
    let generator_edges: Vec<(usize, usize)> =
        c.edges.iter().copied().filter(|e| tree_edges.binary_search(e).is_err()).collect();
    let letter = |e: (usize, usize)| generator_edges.binary_search(&e).ok().map(|p| p as i32 + 1);
    let relators: Vec<Vec<i32>> = c
        .triangles
        .iter()
        .map(|&(i, j, k)| {
            [(letter((i, j)), 1), (letter((j, k)), 1), (letter((i, k)), -1)]
                .into_iter()
                .filter_map(|(l, s)| l.map(|l| s * l))
                .collect()
        })
        .collect();
    let p = Presentation { generators: generator_edges.len(), relators, tree_edges, generator_edges };
    debug_assert!(p.max_relator_length() <= 3);
    Ok(p)
}
