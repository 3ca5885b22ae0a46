//! The walk product: vertices are walks on an expander over the base
//! graph's vertex set, adjacent when their joint support is a clique.

use rayon::prelude::*;

use crate::amplify::expander::ExpanderCert;
use crate::error::{ensure_cap, Error, Result};
use crate::graph::Graph;

/// Default cap on the number of walks.
pub const DEFAULT_WALK_CAP: u128 = 1 << 12;

/// All walks with `ell` vertices on `x`, in lexicographic order.
pub fn enumerate_walks(x: &Graph, ell: usize, cap: u128) -> Result<Vec<Vec<usize>>> {
    if ell == 0 {
        return Err(Error::InvalidParameter("a walk has at least one vertex".into()));
    }
    let count = walk_count(x, ell);
    ensure_cap("walks", count, cap)?;
    let mut walks: Vec<Vec<usize>> = (0..x.num_vertices()).map(|v| vec![v]).collect();
    for _ in 1..ell {
        walks = walks
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().unwrap();
                x.neighbors(last).iter().map(move |&u| {
                    let mut next = w.clone();
                    next.push(u);
                    next
                })
            })
            .collect();
    }
    Ok(walks)
}

/// Number of walks with `ell` vertices (`n·d^(ell−1)` when regular).
pub fn walk_count(x: &Graph, ell: usize) -> u128 {
    let mut counts = vec![1u128; x.num_vertices()];
    for _ in 1..ell {
        counts = (0..x.num_vertices())
            .map(|v| x.neighbors(v).iter().map(|&u| counts[u]).fold(0u128, u128::saturating_add))
            .collect();
    }
    counts.into_iter().fold(0, u128::saturating_add)
}

/// The walk product `H` of a base graph with an expander.
#[derive(Clone, Debug)]
pub struct WalkGraph {
    base: Graph,
    expander: ExpanderCert,
    ell: usize,
    walks: Vec<Vec<usize>>,
    supports: Vec<u128>,
    base_adj: Vec<u128>,
    product: Graph,
}

fn adjacency_masks(g: &Graph) -> Vec<u128> {
    (0..g.num_vertices())
        .map(|u| g.neighbors(u).iter().fold(0u128, |m, &v| m | (1 << v)))
        .collect()
}

fn mask_is_clique(adj: &[u128], mask: u128) -> bool {
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if mask & !(1u128 << v) & !adj[v] != 0 {
            return false;
        }
    }
    true
}

fn mask_to_vec(mask: u128) -> Vec<usize> {
    (0..128).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Builds `H`: one vertex per walk, and an edge between distinct walks
/// whose union of vertices is a clique of `base`.
pub fn product_graph(base: &Graph, cert: &ExpanderCert, ell: usize) -> Result<WalkGraph> {
    product_graph_capped(base, cert, ell, DEFAULT_WALK_CAP)
}

pub fn product_graph_capped(base: &Graph, cert: &ExpanderCert, ell: usize, cap: u128) -> Result<WalkGraph> {
    let n = base.num_vertices();
    if cert.n() != n {
        return Err(Error::WidthMismatch { expected: n, actual: cert.n() });
    }
    ensure_cap("base graph vertices", n as u128, 128)?;
    let walks = enumerate_walks(&cert.graph, ell, cap)?;
    let supports: Vec<u128> = walks.iter().map(|w| w.iter().fold(0u128, |m, &v| m | (1 << v))).collect();
    let base_adj = adjacency_masks(base);
    let edges: Vec<(usize, usize)> = (0..walks.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (supports, base_adj) = (&supports, &base_adj);
            (i + 1..supports.len())
                .filter(move |&j| mask_is_clique(base_adj, supports[i] | supports[j]))
                .map(move |j| (i, j))
        })
        .collect();
    let product = Graph::from_edges(walks.len(), &edges)?;
    Ok(WalkGraph { base: base.clone(), expander: cert.clone(), ell, walks, supports, base_adj, product })
}

impl WalkGraph {
    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn expander(&self) -> &ExpanderCert {
        &self.expander
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn walks(&self) -> &[Vec<usize>] {
        &self.walks
    }

    /// `N = |W|`.
    pub fn num_walks(&self) -> usize {
        self.walks.len()
    }

    /// The product graph `H` on walk indices.
    pub fn graph(&self) -> &Graph {
        &self.product
    }

    /// Sorted distinct vertices of walk `i`.
    pub fn support(&self, i: usize) -> Vec<usize> {
        mask_to_vec(self.supports[i])
    }

    /// `D_C`: indices of walks whose vertices all lie in the clique `c`.
    pub fn lift_clique(&self, c: &[usize]) -> Result<Vec<usize>> {
        if !self.base.is_clique(c) {
            return Err(Error::InvalidInstance("lifted set is not a clique of the base graph".into()));
        }
        let mask = c.iter().fold(0u128, |m, &v| m | (1 << v));
        Ok((0..self.walks.len()).filter(|&i| self.supports[i] & !mask == 0).collect())
    }

    /// `C_D`: the union of the walks in `d`, which must be a clique of `H`
    /// whose union is a clique of the base graph. (A lone walk through a
    /// non-edge is a clique of `H` that fails the second condition.)
    pub fn project_clique(&self, d: &[usize]) -> Result<Vec<usize>> {
        if d.iter().any(|&i| i >= self.walks.len()) {
            return Err(Error::InvalidInstance("walk index out of range".into()));
        }
        if !self.product.is_clique(d) {
            return Err(Error::InvalidInstance("projected set is not a clique of the product".into()));
        }
        let mask = d.iter().fold(0u128, |m, &i| m | self.supports[i]);
        if !mask_is_clique(&self.base_adj, mask) {
            return Err(Error::InvalidInstance("projected walks do not span a clique of the base graph".into()));
        }
        Ok(mask_to_vec(mask))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_counts() {
        let k3 = Graph::complete(3);
        assert_eq!(enumerate_walks(&k3, 1, 100).unwrap().len(), 3);
        assert_eq!(enumerate_walks(&k3, 2, 100).unwrap().len(), 6);
        assert_eq!(enumerate_walks(&k3, 3, 100).unwrap().len(), 12);
        assert_eq!(walk_count(&k3, 3), 12);
        assert!(matches!(enumerate_walks(&k3, 3, 11), Err(Error::Capacity { .. })));
    }

    #[test]
    fn complete_base_gives_complete_product() {
        let cert = ExpanderCert::complete(4).unwrap();
        let h = product_graph(&Graph::complete(4), &cert, 2).unwrap();
        let n = h.num_walks();
        assert_eq!(n, 12);
        assert_eq!(h.graph().num_edges(), n * (n - 1) / 2);
    }

    #[test]
    fn path_base_rule() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let cert = ExpanderCert::complete(3).unwrap();
        let h = product_graph(&path, &cert, 2).unwrap();
        let idx = |w: &[usize]| h.walks().iter().position(|x| x == w).unwrap();
        assert!(h.graph().has_edge(idx(&[0, 1]), idx(&[1, 0])));
        assert!(!h.graph().has_edge(idx(&[0, 1]), idx(&[1, 2])));
        // A walk across the non-edge 0–2 is isolated.
        assert_eq!(h.graph().degree(idx(&[0, 2])), 0);
        assert!(h.project_clique(&[idx(&[0, 2])]).is_err());
    }

    #[test]
    fn edgeless_base_has_no_product_edges() {
        let cert = ExpanderCert::complete(4).unwrap();
        let h = product_graph(&Graph::empty(4), &cert, 2).unwrap();
        assert_eq!(h.graph().num_edges(), 0);
        assert_eq!(h.lift_clique(&[2]).unwrap(), Vec::<usize>::new());
        let h1 = product_graph(&Graph::empty(4), &cert, 1).unwrap();
        assert_eq!(h1.lift_clique(&[2]).unwrap(), vec![2]);
    }

    #[test]
    fn lift_and_project() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)]).unwrap();
        let cert = ExpanderCert::complete(5).unwrap();
        let h = product_graph(&g, &cert, 2).unwrap();
        assert!(h.lift_clique(&[]).unwrap().is_empty());
        let d = h.lift_clique(&[0, 1, 2]).unwrap();
        assert_eq!(d.len(), 3 * 2);
        assert!(h.graph().is_clique(&d));
        assert_eq!(h.project_clique(&d).unwrap(), vec![0, 1, 2]);
        let single = h.project_clique(&d[..1]).unwrap();
        assert_eq!(single, h.support(d[0]));
        assert!(h.lift_clique(&[0, 3]).is_err());
    }
}
