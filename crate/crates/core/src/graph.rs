use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected graph on vertices `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

/// JSON edge-list form: `{"n": 4, "edges": [[0, 1], [1, 2]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    /// Rejects loops and out-of-range endpoints; duplicate edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        Graph {
            adj: (0..n).map(|u| (0..n).filter(|&v| v != u).collect()).collect(),
        }
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Graph::from_edges(n, &edges).expect("cycle edges are valid")
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.adj.len();
        if u >= n || v >= n {
            return Err(Error::InvalidInstance(format!("edge ({u}, {v}) outside {n} vertices")));
        }
        if u == v {
            return Err(Error::InvalidInstance(format!("self-loop at {u}")));
        }
        if let Err(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(pos, v);
        }
        if let Err(pos) = self.adj[v].binary_search(&u) {
            self.adj[v].insert(pos, u);
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// `Some(d)` if every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// True iff the vertex set is pairwise adjacent (repeats are ignored).
    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().all(|&u| u < self.adj.len())
            && vertices.iter().enumerate().all(|(i, &u)| {
                vertices[i + 1..].iter().all(|&v| u == v || self.has_edge(u, v))
            })
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn to_edge_list(&self) -> EdgeList {
        EdgeList {
            n: self.num_vertices(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_edge_list().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let e = crate::graph::EdgeList::deserialize(d)?;
        Graph::try_from(e).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<EdgeList> for Graph {
    type Error = Error;
    fn try_from(e: EdgeList) -> Result<Self> {
        let edges: Vec<_> = e.edges.iter().map(|&[u, v]| (u, v)).collect();
        Graph::from_edges(e.n, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_queries() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (1, 0)]).unwrap();
        assert_eq!(g.num_edges(), 3);
        assert!(g.is_clique(&[0, 1, 2]));
        assert!(!g.is_clique(&[0, 3]));
        assert!(g.is_clique(&[]));
        assert_eq!(g.regular_degree(), None);
        assert_eq!(Graph::complete(5).regular_degree(), Some(4));
        assert_eq!(Graph::cycle(4).regular_degree(), Some(2));
    }

    #[test]
    fn invalid_edges() {
        assert!(Graph::from_edges(2, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
    }
}
