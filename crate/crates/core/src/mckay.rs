//! McKay graphs: tensor multiplicities, dimension vector, bipartition and
//! the weight vector given by the traces of -I.

use crate::groups::FiniteSubgroup;
use crate::irreps::{
    conjugacy_classes, tensor_multiplicity, trivial_rep, ConjugacyClasses, UnitaryIrrep,
};
use crate::{Error, Result};
use std::collections::VecDeque;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynkinType {
    /// Affine A~n (cycle with n+1 vertices)
    A(usize),
    /// Affine D~n
    D(usize),
    E6,
    E7,
    E8,
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynkinType::A(n) => write!(f, "A~{n}"),
            DynkinType::D(n) => write!(f, "D~{n}"),
            DynkinType::E6 => write!(f, "E~6"),
            DynkinType::E7 => write!(f, "E~7"),
            DynkinType::E8 => write!(f, "E~8"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct McKayGraph {
    /// Edge multiplicities between irreps; symmetric, 0/1 here.
    pub adjacency: Vec<Vec<usize>>,
    /// Vertex of the trivial representation.
    pub extending: usize,
    /// Dimension vector.
    pub delta: Vec<usize>,
    /// Bipartition signs, +1 on the extending side.
    pub sigma: Vec<i64>,
    /// Weights: sigma_i * delta_i, equal to the trace of -I on each irrep.
    pub lambda: Vec<i64>,
    /// Path-style vertex names keyed to the distance from the extending vertex.
    pub names: Vec<String>,
}

impl McKayGraph {
    pub fn vertex_count(&self) -> usize {
        self.delta.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].iter().sum()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&w| self.adjacency[v][w] > 0)
            .collect()
    }

    /// Vertex of maximal dimension (the algebra's center vertex).
    pub fn center_vertex(&self) -> usize {
        (0..self.vertex_count())
            .max_by_key(|&v| self.delta[v])
            .unwrap()
    }

    /// Arms of a star-shaped graph: paths from the center outward, longest
    /// first, each as a list of vertices excluding the center.
    pub fn arms(&self) -> Vec<Vec<usize>> {
        let c = self.star_center();
        let mut arms: Vec<Vec<usize>> = Vec::new();
        for start in self.neighbors(c) {
            let mut arm = vec![start];
            let mut prev = c;
            let mut cur = start;
            loop {
                let next: Vec<usize> = self
                    .neighbors(cur)
                    .into_iter()
                    .filter(|&w| w != prev)
                    .collect();
                match next.as_slice() {
                    [] => break,
                    [w] => {
                        arm.push(*w);
                        prev = cur;
                        cur = *w;
                    }
                    _ => break, // not a path; caller checks shapes separately
                }
            }
            arms.push(arm);
        }
        arms.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        arms
    }

    fn star_center(&self) -> usize {
        (0..self.vertex_count())
            .max_by_key(|&v| (self.degree(v), self.delta[v]))
            .unwrap()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph mckay {\n");
        for v in 0..self.vertex_count() {
            out.push_str(&format!(
                "  n{v} [label=\"{} d={} l={}\"];\n",
                self.names[v], self.delta[v], self.lambda[v]
            ));
        }
        for v in 0..self.vertex_count() {
            for w in (v + 1)..self.vertex_count() {
                for _ in 0..self.adjacency[v][w] {
                    out.push_str(&format!("  n{v} -- n{w};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the McKay graph of a group from its complete irrep set.
pub fn mckay_graph(group: &FiniteSubgroup, irreps: &[UnitaryIrrep]) -> Result<McKayGraph> {
    let classes = conjugacy_classes(group);
    // The tautological character comes straight from the defining matrices;
    // for cyclic groups the 2-dimensional representation is reducible, so it
    // need not appear among the irreps.
    let taut_char: Vec<_> = classes
        .representatives
        .iter()
        .map(|&g| group.matrix(g).trace())
        .collect();
    let m = irreps.len();
    let mut adjacency = vec![vec![0usize; m]; m];
    for i in 0..m {
        for j in 0..m {
            adjacency[i][j] =
                tensor_multiplicity(group, &classes, &taut_char, &irreps[i], &irreps[j])?;
        }
    }
    for i in 0..m {
        for j in 0..m {
            if adjacency[i][j] != adjacency[j][i] {
                return Err(Error::NotAde);
            }
            if adjacency[i][j] > 1 || (i == j && adjacency[i][j] != 0) {
                return Err(Error::NotAde);
            }
        }
    }
    let extending = trivial_rep(irreps);
    let delta: Vec<usize> = irreps.iter().map(|r| r.dim).collect();

    // bipartition by breadth-first 2-coloring from the extending vertex
    let mut sigma = vec![0i64; m];
    sigma[extending] = 1;
    let mut queue = VecDeque::from([extending]);
    let mut seen = 1;
    while let Some(v) = queue.pop_front() {
        for w in 0..m {
            if adjacency[v][w] > 0 {
                if sigma[w] == 0 {
                    sigma[w] = -sigma[v];
                    seen += 1;
                    queue.push_back(w);
                } else if sigma[w] != -sigma[v] {
                    return Err(Error::NotAde);
                }
            }
        }
    }
    if seen != m {
        return Err(Error::NotAde); // disconnected
    }

    let lambda: Vec<i64> = (0..m).map(|i| sigma[i] * delta[i] as i64).collect();
    // cross-check against the traces of tau
    for (i, r) in irreps.iter().enumerate() {
        let tr = r.character_on(&classes, group.tau());
        if (tr.re - lambda[i] as f64).abs() > 1e-6 || tr.im.abs() > 1e-6 {
            return Err(Error::NonIntegerMultiplicity(tr.re));
        }
    }
    let dot: i64 = (0..m).map(|i| lambda[i] * delta[i] as i64).sum();
    if dot != 0 {
        return Err(Error::NotAde);
    }

    // distance-from-extending names with a per-level counter
    let mut dist = vec![usize::MAX; m];
    dist[extending] = 0;
    let mut queue = VecDeque::from([extending]);
    while let Some(v) = queue.pop_front() {
        for w in 0..m {
            if adjacency[v][w] > 0 && dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut names = vec![String::new(); m];
    let maxd = *dist.iter().max().unwrap();
    for d in 0..=maxd {
        let level: Vec<usize> = (0..m).filter(|&v| dist[v] == d).collect();
        for (k, &v) in level.iter().enumerate() {
            names[v] = if d == 0 {
                "0".to_string()
            } else if level.len() == 1 {
                format!("{d}")
            } else {
                format!("{d}.{k}")
            };
        }
    }

    Ok(McKayGraph {
        adjacency,
        extending,
        delta,
        sigma,
        lambda,
        names,
    })
}

/// Identifies the affine ADE type from the degree sequence.
pub fn graph_shape(graph: &McKayGraph) -> Result<DynkinType> {
    let m = graph.vertex_count();
    let degrees: Vec<usize> = (0..m).map(|v| graph.degree(v)).collect();
    if degrees.iter().all(|&d| d == 2) {
        return Ok(DynkinType::A(m - 1));
    }
    let deg4 = degrees.iter().filter(|&&d| d == 4).count();
    let deg3 = degrees.iter().filter(|&&d| d == 3).count();
    let leaves = degrees.iter().filter(|&&d| d == 1).count();
    if deg4 == 1 && leaves == 4 && m == 5 {
        return Ok(DynkinType::D(4));
    }
    if deg3 == 2 && leaves == 4 {
        return Ok(DynkinType::D(m - 1));
    }
    if deg3 == 1 && leaves == 3 {
        let mut lens: Vec<usize> = graph.arms().iter().map(|a| a.len()).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        return match lens.as_slice() {
            [2, 2, 2] => Ok(DynkinType::E6),
            [3, 3, 1] => Ok(DynkinType::E7),
            [5, 2, 1] => Ok(DynkinType::E8),
            _ => Err(Error::NotAde),
        };
    }
    Err(Error::NotAde)
}

/// The lambda values along each arm read from the center outward, longest
/// arm first. Used to compare against the quiver pictures.
pub fn arm_weights(graph: &McKayGraph) -> Vec<Vec<i64>> {
    graph
        .arms()
        .iter()
        .map(|arm| arm.iter().map(|&v| graph.lambda[v]).collect())
        .collect()
}

pub fn classes_for(group: &FiniteSubgroup) -> ConjugacyClasses {
    conjugacy_classes(group)
}
