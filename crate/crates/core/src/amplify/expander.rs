//! Regular expanders with a certified bound on the second eigenvalue.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::value::{format_rational, Rational};

/// Residual tolerance for computed eigenpairs and the snapping window for
/// integral eigenvalues.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

/// Denominator of the grid non-integral bounds are rounded up to.
const BOUND_DENOMINATOR: i64 = 1_000_000;

/// Attempts before the pairing model gives up.
const MAX_PAIRING_ATTEMPTS: usize = 1_000_000;

/// A `d`-regular graph with a rational upper bound `lambda` on the largest
/// absolute non-principal adjacency eigenvalue, `lambda < d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpanderCert {
    pub graph: Graph,
    pub d: usize,
    #[serde(with = "crate::value::rational_str")]
    pub lambda: Rational,
    /// Largest eigenpair residual `‖A v − μ v‖` seen.
    pub max_residual: f64,
}

impl ExpanderCert {
    /// Certifies `graph`: it must be regular with `λ < d`.
    pub fn new(graph: Graph) -> Result<Self> {
        let (lambda, max_residual) = lambda_with_residual(&graph)?;
        let d = graph.regular_degree().expect("checked regular");
        if lambda >= Rational::from_integer(d.into()) {
            return Err(Error::InvalidInstance(format!(
                "lambda bound {} is not below the degree {d}: the graph is disconnected or bipartite",
                format_rational(&lambda)
            )));
        }
        Ok(ExpanderCert { graph, d, lambda, max_residual })
    }

    /// The complete graph `K_n`, with `λ = 1`.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("complete expander needs n >= 3, got {n}")));
        }
        ExpanderCert::new(Graph::complete(n))
    }

    pub fn n(&self) -> usize {
        self.graph.num_vertices()
    }

    /// `λ/d`.
    pub fn ratio(&self) -> Rational {
        &self.lambda / Rational::from_integer(self.d.into())
    }
}

/// `max |μ|` over the non-principal adjacency eigenvalues of a regular
/// graph, rounded up to a rational.
pub fn spectral_lambda(graph: &Graph) -> Result<Rational> {
    Ok(lambda_with_residual(graph)?.0)
}

fn lambda_with_residual(graph: &Graph) -> Result<(Rational, f64)> {
    let n = graph.num_vertices();
    let d = graph
        .regular_degree()
        .ok_or_else(|| Error::InvalidInstance("graph is not regular".into()))?;
    if n < 2 {
        return Err(Error::InvalidInstance("spectral bound needs at least two vertices".into()));
    }
    let a = DMatrix::<f64>::from_fn(n, n, |i, j| if graph.has_edge(i, j) { 1.0 } else { 0.0 });
    let eig = SymmetricEigen::new(a.clone());
    let mut max_residual = 0.0f64;
    for k in 0..n {
        let v = eig.eigenvectors.column(k);
        let r = (&a * v - v * eig.eigenvalues[k]).norm();
        max_residual = max_residual.max(r);
    }
    if max_residual > EIGEN_TOLERANCE {
        return Err(Error::AuditFailure(format!("eigenpair residual {max_residual:e} above tolerance")));
    }
    // Drop one copy of the principal eigenvalue d.
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let principal = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap();
    values.swap_remove(principal);
    let lambda = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok((round_up(lambda, d), max_residual))
}

/// Snaps to an integer within the tolerance, otherwise rounds
/// `λ + tolerance` up to the next multiple of `1/BOUND_DENOMINATOR`, capped
/// at `d`.
fn round_up(lambda: f64, d: usize) -> Rational {
    let nearest = lambda.round();
    if (lambda - nearest).abs() < EIGEN_TOLERANCE {
        return Rational::from_integer(BigInt::from(nearest as i64));
    }
    let scaled = ((lambda + EIGEN_TOLERANCE) * BOUND_DENOMINATOR as f64).ceil() as i64;
    let r = Rational::new(scaled.into(), BOUND_DENOMINATOR.into());
    std::cmp::min(r, Rational::from_integer(d.into()))
}

/// A uniformly random simple `d`-regular graph on `n` vertices from the
/// pairing model, resampled until it is simple and `λ < d`.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<ExpanderCert> {
    if d >= n || (n * d) % 2 == 1 || d < 2 {
        return Err(Error::InvalidParameter(format!(
            "no connected non-bipartite simple {d}-regular graph sampler for n = {n} (need 2 <= d < n, n*d even)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
    for _ in 0..MAX_PAIRING_ATTEMPTS {
        points.shuffle(&mut rng);
        if let Some(g) = pair_up(n, &points) {
            if let Ok(cert) = ExpanderCert::new(g) {
                return Ok(cert);
            }
        }
    }
    Err(Error::capacity("pairing model attempts", MAX_PAIRING_ATTEMPTS as u128 + 1, MAX_PAIRING_ATTEMPTS as u128))
}

fn pair_up(n: usize, points: &[usize]) -> Option<Graph> {
    let mut g = Graph::empty(n);
    for pair in points.chunks(2) {
        let (u, v) = (pair[0], pair[1]);
        if u == v || g.has_edge(u, v) {
            return None;
        }
        g.add_edge(u, v).ok()?;
    }
    Some(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(k: i64) -> Rational {
        Rational::from_integer(k.into())
    }

    #[test]
    fn small_spectra() {
        assert_eq!(spectral_lambda(&Graph::complete(4)).unwrap(), int(1));
        assert_eq!(spectral_lambda(&Graph::cycle(4)).unwrap(), int(2));
        assert_eq!(spectral_lambda(&Graph::complete(2)).unwrap(), int(1));
    }

    #[test]
    fn irrational_bound_is_rounded_up() {
        // C_5 has non-principal eigenvalues 2cos(2π/5) and 2cos(4π/5).
        let l = spectral_lambda(&Graph::cycle(5)).unwrap();
        let exact = (2.0 * (4.0 * std::f64::consts::PI / 5.0).cos()).abs();
        let approx = crate::value::rational_to_f64(&l);
        assert!(approx >= exact && approx - exact < 1e-5);
    }

    #[test]
    fn non_regular_is_rejected() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(spectral_lambda(&g), Err(Error::InvalidInstance(_))));
        assert!(ExpanderCert::new(Graph::cycle(4)).is_err());
    }

    #[test]
    fn forced_regular_graphs() {
        for seed in 0..3 {
            let c = random_regular(4, 3, seed).unwrap();
            assert_eq!(c.graph, Graph::complete(4));
            assert_eq!(c.lambda, int(1));
            let c = random_regular(6, 5, seed).unwrap();
            assert_eq!(c.graph, Graph::complete(6));
        }
    }

    #[test]
    fn random_cubic_graph() {
        let c = random_regular(8, 3, 1).unwrap();
        assert_eq!(c.graph.regular_degree(), Some(3));
        assert!(c.lambda < int(3));
        assert_eq!(random_regular(8, 3, 1).unwrap(), c);
        assert!(random_regular(5, 3, 0).is_err());
    }
}
