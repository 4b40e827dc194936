//! Walker parameterizations and the matrices they induce: the single-walker
//! transition matrix P, the relative-position chain M = P P^T, and the walk
//! Laplacian L = I - P P^T.
//!
//! Meeting means co-location after a simultaneous step; two walkers swapping
//! ends of an edge do not meet. M = P P^T encodes exactly that, so a walk
//! with stay probability zero can trap walkers on bipartite structures in a
//! parity that never meets. Such specs are accepted but flagged by
//! [`WalkSpec::is_lazy`].

use crate::error::{Error, Result};
use crate::graphs::{RegularGraph, TorusCoord};
use crate::linalg::{sym_eigen, DenseMatrix, Spectrum};
use crate::scalar::{cast, Scalar};
use crate::tol;

/// Circle walk: move to `i-1` / `i+1` / stay with the given probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleWalk<T> {
    pub left: T,
    pub right: T,
    pub stay: T,
}

/// Torus walk over the five moves `(x+1, y)`, `(x-1, y)`, `(x, y+1)`,
/// `(x, y-1)`, stay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusWalk<T> {
    pub x_plus: T,
    pub x_minus: T,
    pub y_plus: T,
    pub y_minus: T,
    pub stay: T,
}

/// Per-step move law of a single walker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkSpec<T> {
    Circle(CircleWalk<T>),
    Torus(TorusWalk<T>),
    /// Uniform over self and neighbors, probability `1/(d+1)` each.
    Simple,
}

fn check_distribution<T: Scalar>(probs: &[T], what: &str) -> Result<()> {
    if probs.iter().any(|&p| p < T::zero()) {
        return Err(Error::BadProbabilities(format!(
            "{what}: negative probability"
        )));
    }
    let sum = probs.iter().fold(T::zero(), |a, &b| a + b);
    if (sum - T::one()).abs() > tol::prob_sum::<T>() {
        return Err(Error::BadProbabilities(format!(
            "{what}: probabilities sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

impl<T: Scalar> CircleWalk<T> {
    pub fn new(left: T, right: T, stay: T) -> Result<Self> {
        check_distribution(&[left, right, stay], "circle walk")?;
        Ok(Self { left, right, stay })
    }

    /// The simple circle walk with all three probabilities 1/3.
    pub fn simple() -> Self {
        let third = T::one() / cast::<T>(3.0);
        Self {
            left: third,
            right: third,
            stay: third,
        }
    }

    /// Relative-chain coefficients `q0 = p1^2 + p2^2 + p3^2`,
    /// `q1 = p3 (p1 + p2)`, `q2 = p1 p2`; they satisfy `q0 + 2q1 + 2q2 = 1`.
    pub fn relative_coefficients(&self) -> (T, T, T) {
        let q0 = self.left * self.left + self.right * self.right + self.stay * self.stay;
        let q1 = self.stay * (self.left + self.right);
        let q2 = self.left * self.right;
        (q0, q1, q2)
    }
}

impl<T: Scalar> TorusWalk<T> {
    pub fn new(probs: [T; 5]) -> Result<Self> {
        check_distribution(&probs, "torus walk")?;
        let [x_plus, x_minus, y_plus, y_minus, stay] = probs;
        Ok(Self {
            x_plus,
            x_minus,
            y_plus,
            y_minus,
            stay,
        })
    }

    /// The simple torus walk with all five probabilities 1/5.
    pub fn simple() -> Self {
        let fifth = T::one() / cast::<T>(5.0);
        Self {
            x_plus: fifth,
            x_minus: fifth,
            y_plus: fifth,
            y_minus: fifth,
            stay: fifth,
        }
    }

    fn moves(&self) -> [((isize, isize), T); 5] {
        [
            ((1, 0), self.x_plus),
            ((-1, 0), self.x_minus),
            ((0, 1), self.y_plus),
            ((0, -1), self.y_minus),
            ((0, 0), self.stay),
        ]
    }
}

impl<T: Scalar> WalkSpec<T> {
    /// Stay probability of the walk on graph `g`.
    pub fn stay_probability(&self, g: &RegularGraph) -> T {
        match self {
            WalkSpec::Circle(w) => w.stay,
            WalkSpec::Torus(w) => w.stay,
            WalkSpec::Simple => T::one() / cast::<T>(g.degree() as f64 + 1.0),
        }
    }

    /// Lazy walks have positive stay probability, which removes bipartite
    /// parity obstructions to meeting.
    pub fn is_lazy(&self, g: &RegularGraph) -> bool {
        self.stay_probability(g) > T::zero()
    }
}

/// Single-walker transition matrix P for the walk `w` on graph `g`.
///
/// `Simple` yields `P = (I + A) / (d + 1)` on any regular graph. Circle and
/// torus walks require the canonical circle/torus structure.
pub fn transition_matrix<T: Scalar>(g: &RegularGraph, w: &WalkSpec<T>) -> Result<DenseMatrix<T>> {
    match w {
        WalkSpec::Simple => {
            let n = g.n();
            let inv = T::one() / cast::<T>(g.degree() as f64 + 1.0);
            let mut p = DenseMatrix::<T>::zeros(n, n);
            for u in 0..n {
                p.set(u, u, inv);
                for &v in g.neighbors(u) {
                    p.set(u, v, inv);
                }
            }
            Ok(p)
        }
        WalkSpec::Circle(w) => {
            let n = g.circle_size().ok_or_else(|| {
                Error::IncompatibleWalk("circle walk requires a circle graph".into())
            })?;
            let mut p = DenseMatrix::<T>::zeros(n, n);
            for i in 0..n {
                let mut add = |j: usize, v: T| p.set(i, j, p.get(i, j) + v);
                add((i + n - 1) % n, w.left);
                add((i + 1) % n, w.right);
                add(i, w.stay);
            }
            Ok(p)
        }
        WalkSpec::Torus(w) => {
            let side = g.torus_size().ok_or_else(|| {
                Error::IncompatibleWalk("torus walk requires a torus graph".into())
            })?;
            let n = g.n();
            let mut p = DenseMatrix::<T>::zeros(n, n);
            for x in 0..side {
                for y in 0..side {
                    let i = TorusCoord { x, y }.index(side);
                    for ((dx, dy), prob) in w.moves() {
                        let to = TorusCoord {
                            x: (x as isize + dx).rem_euclid(side as isize) as usize,
                            y: (y as isize + dy).rem_euclid(side as isize) as usize,
                        }
                        .index(side);
                        p.set(i, to, p.get(i, to) + prob);
                    }
                }
            }
            Ok(p)
        }
    }
}

/// Relative-position chain M = P P^T.
///
/// For circle inputs (detected structurally from P) the coefficients
/// `(q0, q1, q2)` are extracted and cross-checked against the first row of M.
#[derive(Debug, Clone)]
pub struct RelativeChain<T> {
    m: DenseMatrix<T>,
    coefficients: Option<(T, T, T)>,
}

impl<T: Scalar> RelativeChain<T> {
    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.m
    }

    /// `(q0, q1, q2)` when the input was recognized as a circle walk.
    pub fn circle_coefficients(&self) -> Option<(T, T, T)> {
        self.coefficients
    }
}

/// Recognizes a circulant P supported on offsets {-1, 0, +1} and returns the
/// corresponding circle walk.
fn detect_circle_walk<T: Scalar>(p: &DenseMatrix<T>) -> Option<CircleWalk<T>> {
    let n = p.rows();
    if n < 3 {
        return None;
    }
    let tol = tol::consistency::<T>();
    for i in 0..n {
        for j in 0..n {
            let expected = p.get(0, (j + n - i) % n);
            if (p.get(i, j) - expected).abs() > tol {
                return None;
            }
        }
    }
    for k in 0..n {
        if k != 0 && k != 1 && k != n - 1 && p.get(0, k).abs() > tol {
            return None;
        }
    }
    CircleWalk::new(p.get(0, n - 1), p.get(0, 1), p.get(0, 0)).ok()
}

/// Builds the relative-position chain M = P P^T from a row-stochastic P.
///
/// M must come out symmetric and row-stochastic (true for every doubly
/// stochastic P, which all regular-graph walks here are); violations are
/// rejected rather than silently accepted.
pub fn relative_chain<T: Scalar>(p: &DenseMatrix<T>) -> Result<RelativeChain<T>> {
    validate_row_stochastic(p)?;
    let m = p.matmul(&p.transpose());
    let tol = tol::consistency::<T>();
    for i in 0..m.rows() {
        let sum = m.row(i).iter().fold(T::zero(), |a, &b| a + b);
        if (sum - T::one()).abs() > tol {
            return Err(Error::BadProbabilities(format!(
                "relative chain row {i} sums to {sum}; P must be doubly stochastic"
            )));
        }
    }
    if m.symmetry_defect() > tol {
        return Err(Error::Asymmetric {
            max_delta: m.symmetry_defect().to_f64().unwrap_or(f64::NAN),
        });
    }

    let coefficients = match detect_circle_walk(p) {
        Some(walk) => {
            let n = m.rows();
            let (q0, q1, q2) = walk.relative_coefficients();
            // fold the offsets 0, +-1, +-2 onto the first row; for n = 3, 4
            // the wrap-around makes contributions coincide
            let mut expected = vec![T::zero(); n];
            for (offset, value) in [(0usize, q0), (1, q1), (n - 1, q1), (2 % n, q2), (n - 2, q2)] {
                expected[offset] = expected[offset] + value;
            }
            for k in 0..n {
                if (m.get(0, k) - expected[k]).abs() > cast::<T>(16.0) * tol {
                    return Err(Error::BadProbabilities(format!(
                        "circle coefficient cross-check failed at offset {k}"
                    )));
                }
            }
            Some((q0, q1, q2))
        }
        None => None,
    };

    Ok(RelativeChain { m, coefficients })
}

fn validate_row_stochastic<T: Scalar>(p: &DenseMatrix<T>) -> Result<()> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let tol = tol::prob_sum::<T>();
    for i in 0..p.rows() {
        if p.row(i).iter().any(|&v| v < -tol) {
            return Err(Error::BadProbabilities(format!(
                "negative entry in row {i}"
            )));
        }
        let sum = p.row(i).iter().fold(T::zero(), |a, &b| a + b);
        if (sum - T::one()).abs() > tol * cast::<T>(p.cols() as f64) {
            return Err(Error::BadProbabilities(format!(
                "row {i} sums to {sum}, expected 1"
            )));
        }
    }
    Ok(())
}

/// Walk Laplacian L = I - P P^T with its spectrum and the count of
/// eigenvalues classified as zero.
#[derive(Debug, Clone)]
pub struct Laplacian<T> {
    matrix: DenseMatrix<T>,
    spectrum: Spectrum<T>,
    zero_multiplicity: usize,
    zero_threshold: T,
}

impl<T: Scalar> Laplacian<T> {
    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    pub fn zero_multiplicity(&self) -> usize {
        self.zero_multiplicity
    }

    /// Threshold below which |lambda| was classified as zero.
    pub fn zero_threshold(&self) -> T {
        self.zero_threshold
    }
}

/// Builds L = I - P P^T and eigendecomposes it.
///
/// Verifies the structural invariants: rows of L sum to zero, L is symmetric,
/// and no eigenvalue is meaningfully negative (M is positive semidefinite).
pub fn laplacian<T: Scalar>(p: &DenseMatrix<T>) -> Result<Laplacian<T>> {
    let rc = relative_chain(p)?;
    laplacian_of_chain(&rc)
}

/// Same as [`laplacian`] but reuses an existing relative chain.
pub fn laplacian_of_chain<T: Scalar>(rc: &RelativeChain<T>) -> Result<Laplacian<T>> {
    let m = rc.matrix();
    let n = m.rows();
    let mut l = DenseMatrix::<T>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = if i == j {
                T::one() - m.get(i, j)
            } else {
                -m.get(i, j)
            };
            l.set(i, j, v);
        }
    }

    let tol_sum = tol::consistency::<T>();
    for i in 0..n {
        let sum = l.row(i).iter().fold(T::zero(), |a, &b| a + b);
        if sum.abs() > tol_sum {
            return Err(Error::InvalidGraph(format!(
                "Laplacian row {i} sums to {sum}, expected 0"
            )));
        }
    }

    let spectrum = sym_eigen(&l, None)?;
    let zero_threshold = tol::zero_eigenvalue_factor::<T>() * (T::one() + l.norm_inf());
    let zero_multiplicity = spectrum
        .eigenvalues
        .iter()
        .filter(|lam| lam.abs() < zero_threshold)
        .count();
    if let Some(&min) = spectrum
        .eigenvalues
        .first()
        .filter(|&&min| min < -zero_threshold)
    {
        return Err(Error::InvalidGraph(format!(
            "Laplacian has negative eigenvalue {min}"
        )));
    }

    Ok(Laplacian {
        matrix: l,
        spectrum,
        zero_multiplicity,
        zero_threshold,
    })
}

/// First row of the relative chain M for a circle walk, as a circulant
/// generator, without forming any dense matrix. This is the autocorrelation
/// of the move distribution, folded modulo n.
pub fn circle_relative_generator<T: Scalar>(n: usize, w: &CircleWalk<T>) -> Vec<T> {
    let moves = [(-1isize, w.left), (1, w.right), (0, w.stay)];
    let mut gen = vec![T::zero(); n];
    for (d1, w1) in moves {
        for (d2, w2) in moves {
            let offset = (d1 - d2).rem_euclid(n as isize) as usize;
            gen[offset] = gen[offset] + w1 * w2;
        }
    }
    gen
}

/// Block generator of the relative chain M for a torus walk: entry `[l][k]`
/// is `M(0, l*n + k)`, the displacement autocorrelation folded modulo n.
pub fn torus_relative_generator<T: Scalar>(n: usize, w: &TorusWalk<T>) -> Vec<Vec<T>> {
    let moves = w.moves();
    let mut gen = vec![vec![T::zero(); n]; n];
    for ((x1, y1), w1) in moves {
        for ((x2, y2), w2) in moves {
            let dx = (x1 - x2).rem_euclid(n as isize) as usize;
            let dy = (y1 - y2).rem_euclid(n as isize) as usize;
            gen[dx][dy] = gen[dx][dy] + w1 * w2;
        }
    }
    gen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_circle, build_torus, random_regular};
    use approx::assert_relative_eq;

    #[test]
    fn triangle_simple_walk_is_uniform() {
        let g = build_circle(3).unwrap();
        let p = transition_matrix(&g, &WalkSpec::<f64>::Simple).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(p.get(i, j), 1.0 / 3.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn circle_walk_rows_are_circulant() {
        let g = build_circle(4).unwrap();
        let w = WalkSpec::Circle(CircleWalk::<f64>::simple());
        let p = transition_matrix(&g, &w).unwrap();
        let expected = [1.0 / 3.0, 1.0 / 3.0, 0.0, 1.0 / 3.0];
        for (j, e) in expected.iter().enumerate() {
            assert_relative_eq!(p.get(0, j), *e, epsilon = 1e-15);
        }
        // every row is the rotation of the first
        for i in 0..4 {
            for j in 0..4 {
                assert_relative_eq!(p.get(i, j), p.get(0, (j + 4 - i) % 4), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn torus_walk_rows_have_five_entries() {
        let g = build_torus(3).unwrap();
        let w = WalkSpec::Torus(TorusWalk::<f64>::simple());
        let p = transition_matrix(&g, &w).unwrap();
        for i in 0..9 {
            let nonzero: Vec<f64> = p.row(i).iter().copied().filter(|&v| v > 0.0).collect();
            assert_eq!(nonzero.len(), 5);
            for v in nonzero {
                assert_relative_eq!(v, 0.2, epsilon = 1e-15);
            }
            let sum: f64 = p.row(i).iter().sum();
            assert_relative_eq!(sum, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn circle_walk_rejects_non_circle() {
        let g = random_regular(4, 3, 0).unwrap();
        let w = WalkSpec::Circle(CircleWalk::<f64>::simple());
        assert!(matches!(
            transition_matrix(&g, &w),
            Err(Error::IncompatibleWalk(_))
        ));
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(CircleWalk::new(0.6, 0.6, -0.2).is_err());
        assert!(CircleWalk::new(0.5, 0.4, 0.2).is_err());
        assert!(TorusWalk::new([0.3, 0.3, 0.3, 0.3, 0.3]).is_err());
    }

    #[test]
    fn relative_chain_circle_five_coefficients() {
        let g = build_circle(5).unwrap();
        let p = transition_matrix(&g, &WalkSpec::Circle(CircleWalk::<f64>::simple())).unwrap();
        let rc = relative_chain(&p).unwrap();
        let (q0, q1, q2) = rc.circle_coefficients().unwrap();
        assert_relative_eq!(q0, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(q1, 2.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(q2, 1.0 / 9.0, epsilon = 1e-15);
        let expected = [q0, q1, q2, q2, q1];
        for (k, e) in expected.iter().enumerate() {
            assert_relative_eq!(rc.matrix().get(0, k), *e, epsilon = 1e-14);
        }
    }

    #[test]
    fn relative_chain_circle_four_wraparound() {
        let g = build_circle(4).unwrap();
        let p = transition_matrix(&g, &WalkSpec::Circle(CircleWalk::<f64>::simple())).unwrap();
        let rc = relative_chain(&p).unwrap();
        assert_relative_eq!(rc.matrix().get(0, 2), 2.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn relative_chain_rows_sum_to_one() {
        let g = build_torus(3).unwrap();
        let p = transition_matrix(&g, &WalkSpec::<f64>::Simple).unwrap();
        let rc = relative_chain(&p).unwrap();
        for i in 0..9 {
            let sum: f64 = rc.matrix().row(i).iter().sum();
            assert_relative_eq!(sum, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn triangle_laplacian_spectrum() {
        let g = build_circle(3).unwrap();
        let p = transition_matrix(&g, &WalkSpec::<f64>::Simple).unwrap();
        let lap = laplacian(&p).unwrap();
        let expected = [0.0, 1.0, 1.0];
        for (got, want) in lap.spectrum().eigenvalues.iter().zip(expected) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(lap.zero_multiplicity(), 1);
    }

    #[test]
    fn circle_four_laplacian_spectrum() {
        let g = build_circle(4).unwrap();
        let p = transition_matrix(&g, &WalkSpec::<f64>::Simple).unwrap();
        let lap = laplacian(&p).unwrap();
        let expected = [0.0, 8.0 / 9.0, 8.0 / 9.0, 8.0 / 9.0];
        for (got, want) in lap.spectrum().eigenvalues.iter().zip(expected) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn connected_walks_have_single_zero() {
        for g in [build_circle(6).unwrap(), build_torus(3).unwrap()] {
            let p = transition_matrix(&g, &WalkSpec::<f64>::Simple).unwrap();
            assert_eq!(laplacian(&p).unwrap().zero_multiplicity(), 1);
        }
    }

    #[test]
    fn generators_match_dense_first_rows() {
        let w = CircleWalk::new(0.5, 0.3, 0.2).unwrap();
        for n in [3usize, 4, 5, 9] {
            let g = build_circle(n).unwrap();
            let p = transition_matrix(&g, &WalkSpec::Circle(w)).unwrap();
            let m = p.matmul(&p.transpose());
            let gen = circle_relative_generator(n, &w);
            for k in 0..n {
                assert_relative_eq!(gen[k], m.get(0, k), epsilon = 1e-14);
            }
        }

        let tw = TorusWalk::new([0.3, 0.1, 0.25, 0.15, 0.2]).unwrap();
        for side in [3usize, 4, 5] {
            let g = build_torus(side).unwrap();
            let p = transition_matrix(&g, &WalkSpec::Torus(tw)).unwrap();
            let m = p.matmul(&p.transpose());
            let gen = torus_relative_generator(side, &tw);
            for l in 0..side {
                for k in 0..side {
                    assert_relative_eq!(gen[l][k], m.get(0, l * side + k), epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn simple_walk_stay_probability() {
        let g = build_torus(3).unwrap();
        assert_relative_eq!(
            WalkSpec::<f64>::Simple.stay_probability(&g),
            0.2,
            epsilon = 1e-15
        );
        assert!(WalkSpec::<f64>::Simple.is_lazy(&g));
        let pure = WalkSpec::Circle(CircleWalk::new(0.5, 0.5, 0.0).unwrap());
        assert!(!pure.is_lazy(&build_circle(4).unwrap()));
    }
}
