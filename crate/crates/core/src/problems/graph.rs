//! Problems given as explicit graphs with fitness labels, including the
//! 22-solution toy landscape and the complete and skewed control graphs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::Sense;
use crate::problem::ExplicitProblem;
use crate::rational::{self, Rational};

/// Solutions are `0..n`; `adj[s]` is sorted and free of duplicates and of `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphProblem {
    sense: Sense,
    labels: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl GraphProblem {
    /// Directed neighbour lists.
    pub fn from_adjacency(
        sense: Sense,
        labels: Vec<i64>,
        mut adj: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if labels.is_empty() || labels.len() != adj.len() {
            return Err(Error::InvalidInstance(
                "need one neighbour list per labelled solution".into(),
            ));
        }
        let n = labels.len();
        for (s, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.iter().any(|&t| t == s || t >= n) {
                return Err(Error::InvalidInstance(format!(
                    "solution {s} lists itself or an unknown neighbour"
                )));
            }
        }
        Ok(Self { sense, labels, adj })
    }

    /// Undirected edge list.
    pub fn from_edges(sense: Sense, labels: Vec<i64>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); labels.len()];
        for &(a, b) in edges {
            if a >= labels.len() || b >= labels.len() {
                return Err(Error::InvalidInstance(format!(
                    "edge ({a}, {b}) out of range"
                )));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        Self::from_adjacency(sense, labels, adj)
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Undirected edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }
}

impl ExplicitProblem for GraphProblem {
    type Solution = usize;

    fn sense(&self) -> Sense {
        self.sense
    }

    fn size(&self) -> u128 {
        self.labels.len() as u128
    }

    fn fitness(&self, s: &usize) -> Rational {
        rational::int(self.labels[*s])
    }

    fn neighbours(&self, s: &usize) -> Vec<usize> {
        self.adj[*s].clone()
    }

    fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.labels.len())
    }

    fn enumerate_shard(&self, _shard: usize) -> Box<dyn Iterator<Item = usize> + Send + '_> {
        Box::new(0..self.labels.len())
    }
}

/// Labels for the toy landscape: 6 × 1, 10 × 2, 4 × 3, 2 × 4.
const TOY_LABELS: [(i64, usize); 4] = [(1, 6), (2, 10), (3, 4), (4, 2)];

/// Undirected edges of the toy landscape. Solutions 0–5 have fitness 1,
/// 6–15 fitness 2, 16–19 fitness 3 and 20–21 fitness 4.
///
/// Generated by hand to meet the published aggregates: every edge spans a
/// fitness difference of at most 1; `Nf(3)` holds both fitness-4 solutions,
/// three fitness-3 solutions and all ten fitness-2 solutions (15 in all);
/// and the better share of the ±1 neighbours equals the global one at every
/// level (2/12 at fitness 3, 4/10 at fitness 2). Frozen for test stability.
pub const TOY_FIG3_EDGES: [(usize, usize); 22] = [
    // 4 – 3
    (20, 16),
    (21, 17),
    // 3 – 3
    (16, 17),
    (17, 18),
    // 3 – 2
    (16, 6),
    (16, 7),
    (17, 8),
    (17, 9),
    (18, 10),
    (18, 11),
    (18, 12),
    (19, 13),
    (19, 14),
    (19, 15),
    // 2 – 1
    (6, 0),
    (7, 1),
    (8, 2),
    (9, 3),
    (10, 4),
    (11, 5),
    // same-level pairs
    (13, 14),
    (0, 1),
];

fn expand(levels: &[(i64, usize)]) -> Vec<i64> {
    levels
        .iter()
        .flat_map(|&(v, c)| std::iter::repeat_n(v, c))
        .collect()
}

pub fn make_toy_fig3() -> GraphProblem {
    GraphProblem::from_edges(Sense::Maximize, expand(&TOY_LABELS), &TOY_FIG3_EDGES)
        .expect("toy landscape is well formed")
}

/// Every solution neighbours every other one.
pub fn complete_graph(levels: &[(i64, usize)]) -> Result<GraphProblem> {
    let labels = expand(levels);
    let n = labels.len();
    let adj = (0..n)
        .map(|s| (0..n).filter(|&t| t != s).collect())
        .collect();
    GraphProblem::from_adjacency(Sense::Maximize, labels, adj)
}

/// Every non-optimal solution neighbours exactly the strictly better
/// solutions; optimal solutions have no neighbours.
pub fn skewed_to_better(levels: &[(i64, usize)]) -> Result<GraphProblem> {
    let labels = expand(levels);
    let adj = labels
        .iter()
        .map(|&f| (0..labels.len()).filter(|&t| labels[t] > f).collect())
        .collect();
    GraphProblem::from_adjacency(Sense::Maximize, labels, adj)
}

/// Solutions `0..n` in a line, labelled in order.
pub fn path_graph(labels: Vec<i64>) -> Result<GraphProblem> {
    let edges: Vec<_> = (1..labels.len()).map(|i| (i - 1, i)).collect();
    GraphProblem::from_edges(Sense::Maximize, labels, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_edges_span_at_most_one() {
        let toy = make_toy_fig3();
        assert_eq!(toy.len(), 22);
        for (a, b) in toy.edges() {
            assert!(
                (toy.labels()[a] - toy.labels()[b]).abs() <= 1,
                "edge ({a}, {b})"
            );
        }
        assert!((0..22).all(|s| !toy.neighbours(&s).is_empty()));
    }

    #[test]
    fn rejects_self_loops() {
        assert!(GraphProblem::from_edges(Sense::Maximize, vec![1, 2], &[(0, 0)]).is_err());
        assert!(GraphProblem::from_edges(Sense::Maximize, vec![1, 2], &[(0, 2)]).is_err());
    }
}
