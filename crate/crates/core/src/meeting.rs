//! Estimators of the expected meeting time E[tau] of two independent
//! walkers started from the uniform distribution:
//!
//! * spectral: sum of reciprocals of the nonzero eigenvalues of L = I - P P^T
//! * absorbing: exact expectation on the product chain Q = P (x) P with the
//!   diagonal pair states absorbing
//! * relative: hitting time of the zero state in the relative chain M,
//!   valid on circle and torus walks
//!
//! tau counts simultaneous steps; a co-located uniform start contributes
//! tau = 0.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graphs::RegularGraph;
use crate::linalg::{kronecker, solve, solve_residual, DenseMatrix};
use crate::scalar::{cast, Scalar};
use crate::tol;
use crate::walks::{transition_matrix, Laplacian, RelativeChain, WalkSpec};

/// Diagnostics keys used in [`MeetingEstimate::diagnostics`].
pub mod diag {
    pub const DROPPED_ZERO_EIGENVALUES: &str = "dropped_zero_eigenvalues";
    pub const EIGEN_RESIDUAL: &str = "eigen_residual";
    pub const SOLVER_RESIDUAL: &str = "solver_residual";
    pub const ROUTE_DISCREPANCY: &str = "route_discrepancy";
    pub const STAY_PROBABILITY: &str = "stay_probability";
    pub const MC_HALF_WIDTH: &str = "mc_half_width";
    pub const MC_TRIALS: &str = "mc_trials";
    pub const MC_TRUNCATED: &str = "mc_truncated";
}

/// Which estimator produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spectral,
    Absorbing,
    Relative,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Absorbing => "absorbing",
            Method::Relative => "relative",
            Method::MonteCarlo => "mc",
        }
    }
}

/// An estimate of E[tau] with the method that produced it and numeric
/// diagnostics (keys in [`diag`]).
#[derive(Debug, Clone)]
pub struct MeetingEstimate<T> {
    pub value: T,
    pub method: Method,
    pub diagnostics: BTreeMap<String, f64>,
}

/// Sums reciprocals of the eigenvalues with `|lambda| >= zero_tol` and
/// reports how many were dropped as zero.
pub fn meeting_time_from_eigenvalues<T: Scalar>(eigenvalues: &[T], zero_tol: T) -> (T, usize) {
    let mut sum = T::zero();
    let mut dropped = 0usize;
    for &lambda in eigenvalues {
        if lambda.abs() < zero_tol {
            dropped += 1;
        } else {
            sum = sum + T::one() / lambda;
        }
    }
    (sum, dropped)
}

/// Spectral estimator: `E[tau] = sum over nonzero eigenvalues of 1/lambda`.
///
/// Exactly one eigenvalue must classify as zero; anything else signals a
/// disconnected graph or a threshold failure.
pub fn spectral_meeting_time<T: Scalar>(l: &Laplacian<T>) -> Result<MeetingEstimate<T>> {
    let (value, dropped) =
        meeting_time_from_eigenvalues(&l.spectrum().eigenvalues, l.zero_threshold());
    if dropped != 1 {
        return Err(Error::ZeroEigenvalueCount { found: dropped });
    }
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert(diag::DROPPED_ZERO_EIGENVALUES.into(), dropped as f64);
    diagnostics.insert(
        diag::EIGEN_RESIDUAL.into(),
        l.spectrum().residual.to_f64().unwrap_or(f64::NAN),
    );
    Ok(MeetingEstimate {
        value,
        method: Method::Spectral,
        diagnostics,
    })
}

/// Product chain of two independent walkers: `Q = P (x) P` over ordered pair
/// states, with the diagonal set absorbing.
#[derive(Debug, Clone)]
pub struct TwoWalkerChain<T> {
    n: usize,
    q: DenseMatrix<T>,
    transient: Vec<usize>,
    b: DenseMatrix<T>,
    exit: Vec<T>,
}

impl<T: Scalar> TwoWalkerChain<T> {
    /// Builds the chain from a row-stochastic single-walker matrix P.
    ///
    /// Validates that every transient row of Q splits exactly into its
    /// transient block mass plus the exit mass: `sum_k B(j,k) + b(j) = 1`.
    pub fn new(p: &DenseMatrix<T>) -> Result<Self> {
        let n = p.rows();
        let q = kronecker(p, p)?;
        let is_absorbing = |s: usize| s / n == s % n;
        let transient: Vec<usize> = (0..n * n).filter(|&s| !is_absorbing(s)).collect();

        let t = transient.len();
        let mut b = DenseMatrix::<T>::zeros(t, t);
        let mut exit = vec![T::zero(); t];
        for (bj, &j) in transient.iter().enumerate() {
            for (bk, &k) in transient.iter().enumerate() {
                b.set(bj, bk, q.get(j, k));
            }
            let mut mass = T::zero();
            for a in 0..n {
                mass = mass + q.get(j, a * n + a);
            }
            exit[bj] = mass;
        }

        let tol = tol::consistency::<T>() * cast::<T>(n as f64);
        for (bj, &j) in transient.iter().enumerate() {
            let total = b.row(bj).iter().fold(exit[bj], |a, &v| a + v);
            if (total - T::one()).abs() > tol {
                return Err(Error::BadProbabilities(format!(
                    "transient row for pair state {j} sums to {total}"
                )));
            }
        }

        Ok(Self {
            n,
            q,
            transient,
            b,
            exit,
        })
    }

    /// Number of single-walker states (pair state space has `n * n`).
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn product_matrix(&self) -> &DenseMatrix<T> {
        &self.q
    }

    /// Absorbing pair states `i*n + i`.
    pub fn absorbing_states(&self) -> Vec<usize> {
        (0..self.n).map(|i| i * self.n + i).collect()
    }

    /// Transient pair states in ascending order.
    pub fn transient_states(&self) -> &[usize] {
        &self.transient
    }

    /// Transient-to-transient block B.
    pub fn transient_block(&self) -> &DenseMatrix<T> {
        &self.b
    }

    /// Exit vector: probability of stepping from each transient state into
    /// the absorbing set.
    pub fn exit_vector(&self) -> &[T] {
        &self.exit
    }

    /// Uniform initial distribution over all `n * n` pair states.
    pub fn initial_distribution(&self) -> Vec<T> {
        vec![T::one() / cast::<T>((self.n * self.n) as f64); self.n * self.n]
    }

    /// Power-iteration estimate of the spectral radius of B. For lazy walks
    /// on connected graphs this sits strictly below 1.
    pub fn spectral_radius_estimate(&self, iterations: usize) -> T {
        let t = self.transient.len();
        if t == 0 {
            return T::zero();
        }
        let mut v = vec![T::one(); t];
        let mut radius = T::zero();
        for _ in 0..iterations {
            let w = self.b.matvec(&v);
            let norm = w.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
            if norm == T::zero() {
                return T::zero();
            }
            radius = norm;
            v = w.into_iter().map(|x| x / norm).collect();
        }
        radius
    }

    /// Pair states that cannot reach the absorbing set, found by BFS over
    /// reversed transitions. Nonempty exactly when I - B is singular.
    fn unreachable_witness(&self) -> Option<(usize, usize)> {
        let t = self.transient.len();
        let mut index_of = vec![usize::MAX; self.n * self.n];
        for (bj, &j) in self.transient.iter().enumerate() {
            index_of[j] = bj;
        }
        let mut reached = vec![false; t];
        let mut queue: Vec<usize> = (0..t).filter(|&j| self.exit[j] > T::zero()).collect();
        for &j in &queue {
            reached[j] = true;
        }
        while let Some(j) = queue.pop() {
            for k in 0..t {
                if !reached[k] && self.b.get(k, j) > T::zero() {
                    reached[k] = true;
                    queue.push(k);
                }
            }
        }
        reached.iter().position(|&r| !r).map(|bj| {
            let s = self.transient[bj];
            (s / self.n, s % self.n)
        })
    }
}

/// Exact estimator from the absorbing product chain.
///
/// Evaluates the expectation as `p0 (I-B)^{-2} b` via two linear solves and
/// independently as `p0 (I-B)^{-1} 1`; the two routes agree up to solver
/// error and their discrepancy is reported as a diagnostic. Mass of the
/// uniform start on the diagonal contributes tau = 0.
pub fn absorbing_meeting_time<T: Scalar>(
    g: &RegularGraph,
    w: &WalkSpec<T>,
) -> Result<MeetingEstimate<T>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let p = transition_matrix(g, w)?;
    let chain = TwoWalkerChain::new(&p)?;
    let n = chain.vertex_count();
    let t = chain.transient.len();

    let mut i_minus_b = DenseMatrix::<T>::zeros(t, t);
    for i in 0..t {
        for j in 0..t {
            let v = if i == j {
                T::one() - chain.b.get(i, j)
            } else {
                -chain.b.get(i, j)
            };
            i_minus_b.set(i, j, v);
        }
    }

    let solve_chain = |rhs: &[T]| -> Result<Vec<T>> {
        match solve(&i_minus_b, rhs) {
            Ok(x) => Ok(x),
            Err(Error::Singular { column, pivot }) => match chain.unreachable_witness() {
                Some((a, b)) => Err(Error::MeetingUnreachable(a, b)),
                None => Err(Error::Singular { column, pivot }),
            },
            Err(e) => Err(e),
        }
    };

    // route A: p0 (I-B)^{-2} b via two solves against the exit vector
    let x1 = solve_chain(&chain.exit)?;
    let x2 = solve_chain(&x1)?;
    // route B: p0 (I-B)^{-1} 1
    let ones = vec![T::one(); t];
    let y = solve_chain(&ones)?;

    let weight = T::one() / cast::<T>((n * n) as f64);
    let route_a = x2.iter().fold(T::zero(), |acc, &v| acc + v) * weight;
    let route_b = y.iter().fold(T::zero(), |acc, &v| acc + v) * weight;

    let residual =
        solve_residual(&i_minus_b, &x1, &chain.exit).max(solve_residual(&i_minus_b, &y, &ones));

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert(
        diag::SOLVER_RESIDUAL.into(),
        residual.to_f64().unwrap_or(f64::NAN),
    );
    diagnostics.insert(
        diag::ROUTE_DISCREPANCY.into(),
        (route_a - route_b).abs().to_f64().unwrap_or(f64::NAN),
    );
    diagnostics.insert(
        diag::STAY_PROBABILITY.into(),
        w.stay_probability(g).to_f64().unwrap_or(f64::NAN),
    );

    Ok(MeetingEstimate {
        value: route_a,
        method: Method::Absorbing,
        diagnostics,
    })
}

/// Per-state expected meeting times of the relative chain, with the
/// right-hand side of the Laplacian system they satisfy.
#[derive(Debug, Clone)]
pub struct MeetingVector<T> {
    /// `times[s]` is the expected meeting time started from relative state s;
    /// `times[0] = 0` (state 0 is the meeting state).
    pub times: Vec<T>,
    /// `rhs[0] = -(n-1)`, all other entries 1; satisfies `L times = rhs`.
    pub rhs: Vec<T>,
}

/// Solves the hitting-time system of the relative chain: over the transient
/// states, `(I - M_tt) T_t = 1`, with the meeting state pinned to zero.
pub fn hitting_times<T: Scalar>(rc: &RelativeChain<T>) -> Result<MeetingVector<T>> {
    let m = rc.matrix();
    let n = m.rows();
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    let t = n - 1;
    let mut system = DenseMatrix::<T>::zeros(t, t);
    for i in 0..t {
        for j in 0..t {
            let v = if i == j {
                T::one() - m.get(i + 1, j + 1)
            } else {
                -m.get(i + 1, j + 1)
            };
            system.set(i, j, v);
        }
    }
    let rhs_ones = vec![T::one(); t];
    let solution = solve(&system, &rhs_ones)?;

    let mut times = vec![T::zero(); n];
    times[1..].copy_from_slice(&solution);
    let mut rhs = vec![T::one(); n];
    rhs[0] = -cast::<T>((n - 1) as f64);
    Ok(MeetingVector { times, rhs })
}

/// Relative-position estimator: mean of the hitting times under the uniform
/// stationary distribution, `E[tau] = pi^T T`.
pub fn relative_meeting_time<T: Scalar>(rc: &RelativeChain<T>) -> Result<MeetingEstimate<T>> {
    let mv = hitting_times(rc)?;
    let n = mv.times.len();
    let value = mv.times.iter().fold(T::zero(), |a, &b| a + b) / cast::<T>(n as f64);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert(
        diag::SOLVER_RESIDUAL.into(),
        verify_laplacian_system_of_chain(rc, &mv)
            .to_f64()
            .unwrap_or(f64::NAN),
    );
    Ok(MeetingEstimate {
        value,
        method: Method::Relative,
        diagnostics,
    })
}

/// Residual `||L T - dt||_inf` of the meeting-time system.
pub fn verify_laplacian_system<T: Scalar>(l: &Laplacian<T>, mv: &MeetingVector<T>) -> T {
    l.matrix()
        .matvec(&mv.times)
        .iter()
        .zip(&mv.rhs)
        .fold(T::zero(), |acc, (&lt, &dt)| acc.max((lt - dt).abs()))
}

fn verify_laplacian_system_of_chain<T: Scalar>(rc: &RelativeChain<T>, mv: &MeetingVector<T>) -> T {
    let m = rc.matrix();
    let n = m.rows();
    let mut worst = T::zero();
    for i in 0..n {
        let mut lt = mv.times[i];
        for j in 0..n {
            lt = lt - m.get(i, j) * mv.times[j];
        }
        worst = worst.max((lt - mv.rhs[i]).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_circle, build_torus, RegularGraph};
    use crate::walks::{laplacian, relative_chain, CircleWalk, TorusWalk};
    use approx::assert_relative_eq;

    fn k2() -> RegularGraph {
        RegularGraph::from_adjacency(vec![vec![1], vec![0]]).unwrap()
    }

    fn spectral_for(g: &RegularGraph, w: &WalkSpec<f64>) -> f64 {
        let p = transition_matrix(g, w).unwrap();
        spectral_meeting_time(&laplacian(&p).unwrap())
            .unwrap()
            .value
    }

    #[test]
    fn triangle_spectral_is_two() {
        let g = build_circle(3).unwrap();
        assert_relative_eq!(
            spectral_for(&g, &WalkSpec::<f64>::Simple),
            2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn circle_four_spectral() {
        let g = build_circle(4).unwrap();
        assert_relative_eq!(
            spectral_for(&g, &WalkSpec::<f64>::Simple),
            27.0 / 8.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn k2_spectral_is_one() {
        assert_relative_eq!(
            spectral_for(&k2(), &WalkSpec::<f64>::Simple),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn k2_absorbing_is_one() {
        let est = absorbing_meeting_time(&k2(), &WalkSpec::<f64>::Simple).unwrap();
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn triangle_absorbing_is_two() {
        let g = build_circle(3).unwrap();
        let est = absorbing_meeting_time(&g, &WalkSpec::<f64>::Simple).unwrap();
        assert_relative_eq!(est.value, 2.0, epsilon = 1e-12);
        assert!(est.diagnostics[diag::ROUTE_DISCREPANCY] < 1e-9);
    }

    #[test]
    fn absorbing_matches_spectral_on_weighted_circle() {
        let g = build_circle(3).unwrap();
        let w = WalkSpec::Circle(CircleWalk::new(0.5, 0.3, 0.2).unwrap());
        let est = absorbing_meeting_time(&g, &w).unwrap();
        assert_relative_eq!(est.value, spectral_for(&g, &w), epsilon = 1e-9);
    }

    #[test]
    fn relative_triangle_hitting_times() {
        let g = build_circle(3).unwrap();
        let p = transition_matrix(&g, &WalkSpec::<f64>::Simple).unwrap();
        let rc = relative_chain(&p).unwrap();
        let mv = hitting_times(&rc).unwrap();
        assert_relative_eq!(mv.times[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(mv.times[1], 3.0, epsilon = 1e-12);
        assert_relative_eq!(mv.times[2], 3.0, epsilon = 1e-12);
        let est = relative_meeting_time(&rc).unwrap();
        assert_relative_eq!(est.value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn relative_matches_spectral_on_circle_five() {
        let g = build_circle(5).unwrap();
        let p = transition_matrix(&g, &WalkSpec::<f64>::Simple).unwrap();
        let rc = relative_chain(&p).unwrap();
        let est = relative_meeting_time(&rc).unwrap();
        assert_relative_eq!(
            est.value,
            spectral_for(&g, &WalkSpec::<f64>::Simple),
            epsilon = 1e-9
        );
    }

    #[test]
    fn relative_matches_absorbing_on_torus_three() {
        let g = build_torus(3).unwrap();
        let p = transition_matrix(&g, &WalkSpec::<f64>::Simple).unwrap();
        let rc = relative_chain(&p).unwrap();
        let rel = relative_meeting_time(&rc).unwrap().value;
        let abs = absorbing_meeting_time(&g, &WalkSpec::<f64>::Simple)
            .unwrap()
            .value;
        assert_relative_eq!(rel, abs, max_relative = 1e-9);
    }

    #[test]
    fn laplacian_system_residuals() {
        let g = build_circle(3).unwrap();
        let p = transition_matrix(&g, &WalkSpec::<f64>::Simple).unwrap();
        let rc = relative_chain(&p).unwrap();
        let lap = laplacian(&p).unwrap();
        let mv = hitting_times(&rc).unwrap();
        assert!(verify_laplacian_system(&lap, &mv) <= 1e-10);

        let g8 = build_circle(8).unwrap();
        let w = WalkSpec::Circle(CircleWalk::new(0.17, 0.44, 0.39).unwrap());
        let p8 = transition_matrix(&g8, &w).unwrap();
        let rc8 = relative_chain(&p8).unwrap();
        let lap8 = laplacian(&p8).unwrap();
        let mv8 = hitting_times(&rc8).unwrap();
        assert!(verify_laplacian_system(&lap8, &mv8) <= 1e-9);
    }

    #[test]
    fn torus_laplacian_system_rhs_arrangement() {
        let g = build_torus(3).unwrap();
        let p = transition_matrix(&g, &WalkSpec::Torus(TorusWalk::<f64>::simple())).unwrap();
        let rc = relative_chain(&p).unwrap();
        let lap = laplacian(&p).unwrap();
        let mv = hitting_times(&rc).unwrap();
        assert_relative_eq!(mv.rhs[0], -8.0, epsilon = 1e-15);
        assert!(mv.rhs[1..].iter().all(|&v| v == 1.0));
        assert!(verify_laplacian_system(&lap, &mv) <= 1e-9);
    }

    #[test]
    fn chain_identity_exit_vector() {
        let g = build_circle(5).unwrap();
        let w = WalkSpec::Circle(CircleWalk::new(0.25, 0.35, 0.4).unwrap());
        let p = transition_matrix(&g, &w).unwrap();
        let chain = TwoWalkerChain::new(&p).unwrap();
        // (I - B) 1 = exit vector, elementwise
        let t = chain.transient_states().len();
        let ones = vec![1.0; t];
        let b1 = chain.transient_block().matvec(&ones);
        for j in 0..t {
            assert_relative_eq!(1.0 - b1[j], chain.exit_vector()[j], epsilon = 1e-12);
        }
        // lazy walk: spectral radius strictly below 1
        assert!(chain.spectral_radius_estimate(300) < 1.0 - 1e-9);
    }

    #[test]
    fn pure_walk_on_even_circle_cannot_meet_from_odd_offsets() {
        // p3 = 0 on a 4-cycle preserves pair parity, so I - B is singular
        // and the error names a witness state
        let g = build_circle(4).unwrap();
        let w = WalkSpec::Circle(CircleWalk::new(0.5, 0.5, 0.0).unwrap());
        match absorbing_meeting_time(&g, &w) {
            Err(Error::MeetingUnreachable(a, b)) => assert_ne!((a + b) % 2, 0),
            other => panic!("expected MeetingUnreachable, got {other:?}"),
        }
    }

    #[test]
    fn disconnected_input_rejected() {
        let g = RegularGraph::from_adjacency(vec![vec![1], vec![0], vec![3], vec![2]]).unwrap();
        assert!(matches!(
            absorbing_meeting_time(&g, &WalkSpec::<f64>::Simple),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn disconnected_spectrum_fails_zero_count() {
        // two disjoint edges: the walk Laplacian has a zero eigenvalue per
        // component, which the spectral estimator must refuse
        let g = RegularGraph::from_adjacency(vec![vec![1], vec![0], vec![3], vec![2]]).unwrap();
        let p = transition_matrix(&g, &WalkSpec::<f64>::Simple).unwrap();
        let lap = laplacian(&p).unwrap();
        assert_eq!(lap.zero_multiplicity(), 2);
        assert!(matches!(
            spectral_meeting_time(&lap),
            Err(Error::ZeroEigenvalueCount { found: 2 })
        ));
    }
}
