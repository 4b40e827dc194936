//! Asymptotic-order verification and the experimental conjecture checkers.
//!
//! The scaling studies use the circulant closed forms only, so no dense
//! matrix is ever built. The conjecture checkers report findings; they do
//! not assert that a conjecture holds.

use std::time::Instant;

use crate::circulant::{BlockCirculantSpec, CirculantSpec};
use crate::error::{Error, Result};
use crate::graphs::{random_regular, RegularGraph};
use crate::linalg::{sym_eigen, DenseMatrix};
use crate::meeting::{
    absorbing_meeting_time, meeting_time_from_eigenvalues, spectral_meeting_time,
};
use crate::montecarlo::{simulate_meeting, McConfig};
use crate::scalar::{cast, Scalar};
use crate::tol;
use crate::walks::{
    circle_relative_generator, laplacian, torus_relative_generator, transition_matrix, CircleWalk,
    TorusWalk, WalkSpec,
};

/// Graph family of a scaling study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Circle,
    Torus,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Circle => "circle",
            Family::Torus => "torus",
        }
    }
}

/// Torus sizes above this are rejected: the closed-form eigenvalue sum is
/// O(N^2) values and stays instant here, but the reciprocal sum is the
/// caller-facing knob we cap.
pub const TORUS_SCALING_CAP: usize = 128;

/// One row of a scaling study: E[tau] at size N against its conjectured
/// normalizer (N^2 for circles, N^2 ln N for tori).
#[derive(Debug, Clone)]
pub struct ScalingRow<T> {
    pub n: usize,
    pub e_tau: T,
    pub normalizer: T,
    pub ratio: T,
    pub wall_time_s: f64,
}

fn laplacian_generator<T: Scalar>(mut m_generator: Vec<T>) -> Vec<T> {
    for v in m_generator.iter_mut() {
        *v = -*v;
    }
    m_generator[0] = m_generator[0] + T::one();
    m_generator
}

fn laplacian_blocks<T: Scalar>(mut m_blocks: Vec<Vec<T>>) -> Vec<Vec<T>> {
    for row in m_blocks.iter_mut() {
        for v in row.iter_mut() {
            *v = -*v;
        }
    }
    m_blocks[0][0] = m_blocks[0][0] + T::one();
    m_blocks
}

/// Closed-form E[tau] for a circle of size `n` under walk `w`.
pub fn circle_meeting_time_closed_form<T: Scalar>(n: usize, w: &CircleWalk<T>) -> Result<T> {
    if n < 3 {
        return Err(Error::TooFewVertices { n, min: 3 });
    }
    let gen = laplacian_generator(circle_relative_generator(n, w));
    let norm = gen.iter().fold(T::zero(), |a, &b| a + b.abs());
    let spec = CirculantSpec::new(gen)?;
    let zero_tol = tol::zero_eigenvalue_factor::<T>() * (T::one() + norm);
    let (sum, dropped) = meeting_time_from_eigenvalues(&spec.eigenvalues(), zero_tol);
    if dropped != 1 {
        return Err(Error::ZeroEigenvalueCount { found: dropped });
    }
    Ok(sum)
}

/// Closed-form E[tau] for an N x N torus under walk `w`.
pub fn torus_meeting_time_closed_form<T: Scalar>(n: usize, w: &TorusWalk<T>) -> Result<T> {
    if n < 3 {
        return Err(Error::TooFewVertices { n, min: 3 });
    }
    if n > TORUS_SCALING_CAP {
        return Err(Error::DimensionCap {
            dim: n,
            cap: TORUS_SCALING_CAP,
        });
    }
    let blocks = laplacian_blocks(torus_relative_generator(n, w));
    let norm = blocks.iter().flatten().fold(T::zero(), |a, &b| a + b.abs());
    let spec = BlockCirculantSpec::new(blocks)?;
    let zero_tol = tol::zero_eigenvalue_factor::<T>() * (T::one() + norm);
    let (sum, dropped) = meeting_time_from_eigenvalues(&spec.eigenvalues(), zero_tol);
    if dropped != 1 {
        return Err(Error::ZeroEigenvalueCount { found: dropped });
    }
    Ok(sum)
}

/// Runs the closed-form meeting time over a list of sizes and normalizes by
/// the conjectured order (`N^2`, or `N^2 ln N` for the torus).
///
/// `walk` must match the family; `Simple` maps to the uniform 1/3 circle or
/// 1/5 torus walk.
pub fn scaling_study<T: Scalar>(
    family: Family,
    sizes: &[usize],
    walk: &WalkSpec<T>,
) -> Result<Vec<ScalingRow<T>>> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let started = Instant::now();
        let (e_tau, normalizer) = match family {
            Family::Circle => {
                let w = match walk {
                    WalkSpec::Simple => CircleWalk::simple(),
                    WalkSpec::Circle(w) => *w,
                    WalkSpec::Torus(_) => {
                        return Err(Error::IncompatibleWalk(
                            "torus walk on circle family".into(),
                        ))
                    }
                };
                let e = circle_meeting_time_closed_form(n, &w)?;
                (e, cast::<T>((n * n) as f64))
            }
            Family::Torus => {
                let w = match walk {
                    WalkSpec::Simple => TorusWalk::simple(),
                    WalkSpec::Torus(w) => *w,
                    WalkSpec::Circle(_) => {
                        return Err(Error::IncompatibleWalk(
                            "circle walk on torus family".into(),
                        ))
                    }
                };
                let e = torus_meeting_time_closed_form(n, &w)?;
                (e, cast::<T>((n * n) as f64 * (n as f64).ln()))
            }
        };
        rows.push(ScalingRow {
            n,
            e_tau,
            normalizer,
            ratio: e_tau / normalizer,
            wall_time_s: started.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

/// Checks `1/(1 - cos t1 cos t2) <= 4/(1 - cos 2t1 cos 2t2)` for
/// `t1, t2 in (0, pi/4]`.
pub fn lemma1_check<T: Scalar>(theta1: T, theta2: T) -> Result<bool> {
    let quarter_pi = cast::<T>(std::f64::consts::FRAC_PI_4);
    let slack = cast::<T>(1e-12);
    for theta in [theta1, theta2] {
        if theta <= T::zero() || theta > quarter_pi + slack {
            return Err(Error::Domain(format!("theta = {theta} outside (0, pi/4]")));
        }
    }
    let two = cast::<T>(2.0);
    let lhs = T::one() / (T::one() - theta1.cos() * theta2.cos());
    let rhs = cast::<T>(4.0) / (T::one() - (two * theta1).cos() * (two * theta2).cos());
    Ok(lhs <= rhs)
}

/// Dyadic-shell decomposition of the torus reciprocal sum
/// `sum_{p,q=1}^{N} (1 - cos(p pi / 2N) cos(q pi / 2N))^{-1}`.
///
/// Shell k covers `D_k \ D_{k-1}` with `D_k = {(p,q) : 1 <= p,q <= 2^k}`,
/// so the shells tile `{1..N}^2` exactly when N is a power of two.
#[derive(Debug, Clone)]
pub struct PartitionSums<T> {
    pub n: usize,
    /// `sums[k]` is the shell sum S_k, k = 0..=log2(N).
    pub sums: Vec<T>,
    pub shell_sizes: Vec<usize>,
    pub top_shell_min_term: T,
    pub top_shell_max_term: T,
}

impl<T: Scalar> PartitionSums<T> {
    pub fn shell_count(&self) -> usize {
        self.sums.len()
    }

    /// `S_k / N^2`.
    pub fn ratio_to_n_squared(&self, k: usize) -> T {
        self.sums[k] / cast::<T>((self.n * self.n) as f64)
    }

    /// Mean term of the outermost shell.
    pub fn top_shell_mean(&self) -> T {
        *self.sums.last().unwrap() / cast::<T>(*self.shell_sizes.last().unwrap() as f64)
    }
}

/// Computes the dyadic partition sums for a power-of-two N and verifies the
/// monotonicity `S_k <= S_{k+1}`.
pub fn torus_partition_sums<T: Scalar>(n: usize) -> Result<PartitionSums<T>> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let levels = n.trailing_zeros() as usize;
    let term = |p: usize, q: usize| -> T {
        let cp = (std::f64::consts::PI * p as f64 / (2.0 * n as f64)).cos();
        let cq = (std::f64::consts::PI * q as f64 / (2.0 * n as f64)).cos();
        cast::<T>(1.0 / (1.0 - cp * cq))
    };

    let mut sums = Vec::with_capacity(levels + 1);
    let mut shell_sizes = Vec::with_capacity(levels + 1);
    let mut top_min = T::infinity();
    let mut top_max = T::zero();
    for k in 0..=levels {
        let hi = 1usize << k;
        let lo = if k == 0 { 0 } else { 1usize << (k - 1) };
        let mut sum = T::zero();
        let mut count = 0usize;
        let top = k == levels;
        for p in 1..=hi {
            for q in 1..=hi {
                if k > 0 && p <= lo && q <= lo {
                    continue;
                }
                let t = term(p, q);
                sum = sum + t;
                count += 1;
                if top {
                    top_min = top_min.min(t);
                    top_max = top_max.max(t);
                }
            }
        }
        sums.push(sum);
        shell_sizes.push(count);
    }

    for k in 0..levels {
        if sums[k] > sums[k + 1] {
            return Err(Error::Domain(format!(
                "partition sums not monotone at shell {k}"
            )));
        }
    }

    Ok(PartitionSums {
        n,
        sums,
        shell_sizes,
        top_shell_min_term: top_min,
        top_shell_max_term: top_max,
    })
}

/// Boundary sum `sum_{q=1}^{N-1} (1 - cos(q pi / 2N))^{-1}`, which is
/// Theta(N^2).
pub fn boundary_reciprocal_sum<T: Scalar>(n: usize) -> T {
    let mut sum = T::zero();
    for q in 1..n {
        let c = (std::f64::consts::PI * q as f64 / (2.0 * n as f64)).cos();
        sum = sum + cast::<T>(1.0 / (1.0 - c));
    }
    sum
}

/// One sampled graph of the spectral-vs-exact experiment.
#[derive(Debug, Clone)]
pub struct Conjecture1Row<T> {
    pub n: usize,
    pub d: usize,
    pub graph_index: usize,
    pub graph_seed: u64,
    pub mc_seed: u64,
    pub spectral: T,
    pub absorbing: T,
    /// |spectral - absorbing| / absorbing.
    pub rel_discrepancy: T,
    pub mc_mean: f64,
    pub mc_half_width: f64,
    pub mc_trials: u64,
    /// Whether the exact value lies within 3.9 sigma / sqrt(trials) of the
    /// simulated mean.
    pub mc_covers_exact: bool,
}

/// splitmix64 step, used to derive independent sub-seeds.
pub fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut z = base
        .wrapping_add(salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// For each `(n, d)` cell, samples `graphs_per_cell` random connected
/// d-regular graphs and reports spectral value, exact absorbing value, and a
/// seeded Monte Carlo estimate per graph. Reports only; asserts nothing.
pub fn conjecture1_experiment<T: Scalar>(
    cells: &[(usize, usize)],
    graphs_per_cell: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<Conjecture1Row<T>>> {
    let mut rows = Vec::with_capacity(cells.len() * graphs_per_cell);
    let mut graph_index = 0usize;
    for (cell_idx, &(n, d)) in cells.iter().enumerate() {
        for g_idx in 0..graphs_per_cell {
            let salt = (cell_idx * graphs_per_cell + g_idx) as u64;
            let graph_seed = derive_seed(seed, 2 * salt);
            let mc_seed = derive_seed(seed, 2 * salt + 1);
            let graph = random_regular(n, d, graph_seed)?;
            let walk = WalkSpec::<T>::Simple;

            let p = transition_matrix(&graph, &walk)?;
            let spectral = spectral_meeting_time(&laplacian(&p)?)?.value;
            let absorbing = absorbing_meeting_time(&graph, &walk)?.value;
            let mc = simulate_meeting(&graph, &walk, &McConfig::new(trials, mc_seed))?;

            let exact = absorbing.to_f64().unwrap_or(f64::NAN);
            let wide = mc.half_width / 1.96 * 3.9;
            rows.push(Conjecture1Row {
                n,
                d,
                graph_index,
                graph_seed,
                mc_seed,
                spectral,
                absorbing,
                rel_discrepancy: (spectral - absorbing).abs() / absorbing,
                mc_mean: mc.mean,
                mc_half_width: mc.half_width,
                mc_trials: mc.trials,
                mc_covers_exact: (mc.mean - exact).abs() <= wide,
            });
            graph_index += 1;
        }
    }
    Ok(rows)
}

/// Outcome of the eigenvector-basis property check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conjecture2Status {
    Satisfied,
    Violated,
    Indeterminate,
}

impl Conjecture2Status {
    pub fn name(self) -> &'static str {
        match self {
            Conjecture2Status::Satisfied => "satisfied",
            Conjecture2Status::Violated => "violated",
            Conjecture2Status::Indeterminate => "indeterminate",
        }
    }
}

/// Report of the constructive search for an adjacency eigenbasis with:
///
/// (a) the top eigenvector is all-ones, (b) every vector has last entry 1,
/// (c) every non-top vector has zero entry sum, (d) column sums of the basis
/// vanish off the anchor vertex, (e) pairwise inner products are
/// `n * delta_ij`.
///
/// Properties (c) and (d) hold with the anchor exceptions forced by (a) and
/// (b): the top vector sums to n, and the anchor-vertex column sums to n.
/// `None` entries mean the property could not be evaluated because a
/// degenerate eigenspace of dimension >= 3 blocked the search.
#[derive(Debug, Clone)]
pub struct Conjecture2Report<T> {
    pub status: Conjecture2Status,
    /// Properties (a)..(e) in order.
    pub properties: [Option<bool>; 5],
    pub witness: Option<String>,
    /// Assembled basis (columns, ascending adjacency eigenvalue; the all-ones
    /// vector last) when the constructive search completed.
    pub basis: Option<DenseMatrix<T>>,
    /// Per-vertex column sums of the assembled basis.
    pub column_sums: Option<Vec<T>>,
    /// Dimension of the eigenspace that blocked the search, if any.
    pub blocking_dimension: Option<usize>,
    /// Adjacency eigenvalues, ascending.
    pub adjacency_eigenvalues: Vec<T>,
}

struct Eigenspace {
    value: f64,
    columns: Vec<usize>,
}

fn cluster_eigenvalues<T: Scalar>(eigenvalues: &[T], gap: T) -> Vec<Eigenspace> {
    let mut spaces: Vec<Eigenspace> = Vec::new();
    for (i, &lambda) in eigenvalues.iter().enumerate() {
        let v = lambda.to_f64().unwrap_or(f64::NAN);
        match spaces.last_mut() {
            Some(space) if (v - space.value).abs() <= gap.to_f64().unwrap_or(0.0) => {
                space.columns.push(i)
            }
            _ => spaces.push(Eigenspace {
                value: v,
                columns: vec![i],
            }),
        }
    }
    spaces
}

/// Runs the constructive basis search on a connected regular graph.
pub fn conjecture2_check<T: Scalar>(g: &RegularGraph) -> Result<Conjecture2Report<T>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let anchor = n - 1;
    let a = g.adjacency_matrix::<T>();
    let spectrum = sym_eigen(&a, None)?;
    let gap = tol::basis_property::<T>() * (T::one() + a.norm_inf());
    let spaces = cluster_eigenvalues(&spectrum.eigenvalues, gap);
    let prop_tol = tol::basis_property::<T>() * cast::<T>(n as f64);

    let sqrt_n = cast::<T>(n as f64).sqrt();
    let mut basis_columns: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut witness = None;
    let mut blocking_dimension = None;
    let mut prop_b = Some(true);

    // the top eigenvalue of a connected regular graph is d and simple, with
    // the all-ones eigenvector; take it as the anchor vector directly
    let top = spaces.len() - 1;
    if spaces[top].columns.len() != 1 {
        return Ok(Conjecture2Report {
            status: Conjecture2Status::Violated,
            properties: [Some(false), None, None, None, None],
            witness: Some("top eigenvalue is not simple".into()),
            basis: None,
            column_sums: None,
            blocking_dimension: None,
            adjacency_eigenvalues: spectrum.eigenvalues,
        });
    }
    let prop_a = Some(true);

    for (space_idx, space) in spaces.iter().enumerate() {
        if space_idx == top {
            basis_columns.push(vec![T::one(); n]);
            continue;
        }
        match space.columns.len() {
            1 => {
                let v = spectrum.eigenvector(space.columns[0]);
                let pinned = v[anchor].abs() * sqrt_n;
                if (pinned - T::one()).abs() > prop_tol {
                    prop_b = Some(false);
                    if witness.is_none() {
                        witness = Some(format!(
                            "(b): eigenvalue {:.6} has |sqrt(n) v(anchor)| = {:.6}",
                            space.value,
                            pinned.to_f64().unwrap_or(f64::NAN)
                        ));
                    }
                } else {
                    let sign = if v[anchor] >= T::zero() {
                        T::one()
                    } else {
                        -T::one()
                    };
                    basis_columns.push(v.iter().map(|&x| x * sign * sqrt_n).collect());
                }
            }
            2 => {
                let v1 = spectrum.eigenvector(space.columns[0]);
                let v2 = spectrum.eigenvector(space.columns[1]);
                // scaled vectors x*v1 + y*v2 with norm sqrt(n) and anchor
                // entry 1 exist in an orthogonal pair iff the anchor row has
                // squared projection 2/n onto this plane
                let cx = v1[anchor];
                let cy = v2[anchor];
                let proj_sq = cx * cx + cy * cy;
                if (proj_sq * cast::<T>(n as f64) - cast::<T>(2.0)).abs() > prop_tol {
                    prop_b = Some(false);
                    if witness.is_none() {
                        witness = Some(format!(
                            "(b/e): eigenvalue {:.6} plane has anchor projection n/2 * {:.6}",
                            space.value,
                            proj_sq.to_f64().unwrap_or(f64::NAN)
                        ));
                    }
                } else {
                    let norm = proj_sq.sqrt();
                    let (ux, uy) = (cx / norm, cy / norm);
                    let (tx, ty) = (-uy, ux);
                    let r = (cast::<T>(n as f64) / cast::<T>(2.0)).sqrt();
                    for (sx, sy) in [(ux + tx, uy + ty), (ux - tx, uy - ty)] {
                        let col: Vec<T> = (0..n).map(|i| r * (sx * v1[i] + sy * v2[i])).collect();
                        basis_columns.push(col);
                    }
                }
            }
            dim => {
                blocking_dimension = Some(dim);
            }
        }
    }

    // a definite per-eigenvector violation falsifies the conjecture even
    // when another eigenspace would have blocked the full search
    if prop_b == Some(false) {
        return Ok(Conjecture2Report {
            status: Conjecture2Status::Violated,
            properties: [prop_a, prop_b, None, None, None],
            witness,
            basis: None,
            column_sums: None,
            blocking_dimension,
            adjacency_eigenvalues: spectrum.eigenvalues,
        });
    }

    if let Some(dim) = blocking_dimension {
        if witness.is_none() {
            witness = Some(format!("eigenspace of dimension {dim} blocks the search"));
        }
        return Ok(Conjecture2Report {
            status: Conjecture2Status::Indeterminate,
            properties: [prop_a, None, None, None, None],
            witness,
            basis: None,
            column_sums: None,
            blocking_dimension,
            adjacency_eigenvalues: spectrum.eigenvalues,
        });
    }

    // assembled basis: ascending eigenvalue order puts the all-ones vector
    // in the last column
    debug_assert_eq!(basis_columns.len(), n);
    let mut basis = DenseMatrix::<T>::zeros(n, n);
    for (j, col) in basis_columns.iter().enumerate() {
        for i in 0..n {
            basis.set(i, j, col[i]);
        }
    }

    // (c) row sums vanish for non-top vectors (forced: they are orthogonal
    // to the ones eigenvector)
    let mut prop_c = Some(true);
    for j in 0..n - 1 {
        let sum = (0..n).fold(T::zero(), |acc, i| acc + basis.get(i, j));
        if sum.abs() > prop_tol {
            prop_c = Some(false);
            if witness.is_none() {
                witness = Some(format!("(c): basis vector {j} has entry sum {sum}"));
            }
        }
    }

    // (d) column sums vanish off the anchor vertex; the anchor column is
    // forced to n by (a) and (b)
    let column_sums: Vec<T> = (0..n)
        .map(|i| (0..n).fold(T::zero(), |acc, j| acc + basis.get(i, j)))
        .collect();
    let mut prop_d = Some(true);
    for (i, &sum) in column_sums.iter().enumerate() {
        let target = if i == anchor {
            cast::<T>(n as f64)
        } else {
            T::zero()
        };
        if (sum - target).abs() > prop_tol {
            prop_d = Some(false);
            if witness.is_none() {
                witness = Some(format!("(d): vertex {i} column sum {sum}"));
            }
        }
    }

    // (e) <xi_i, xi_j> = n delta_ij
    let mut prop_e = Some(true);
    'pairs: for i in 0..n {
        for j in i..n {
            let dot = (0..n).fold(T::zero(), |acc, r| acc + basis.get(r, i) * basis.get(r, j));
            let target = if i == j {
                cast::<T>(n as f64)
            } else {
                T::zero()
            };
            if (dot - target).abs() > prop_tol {
                prop_e = Some(false);
                if witness.is_none() {
                    witness = Some(format!("(e): <xi_{i}, xi_{j}> = {dot}"));
                }
                break 'pairs;
            }
        }
    }

    let properties = [prop_a, prop_b, prop_c, prop_d, prop_e];
    let all_hold = properties.iter().all(|p| *p == Some(true));
    Ok(Conjecture2Report {
        status: if all_hold {
            Conjecture2Status::Satisfied
        } else {
            Conjecture2Status::Violated
        },
        properties,
        witness: if all_hold { None } else { witness },
        basis: Some(basis),
        column_sums: Some(column_sums),
        blocking_dimension: None,
        adjacency_eigenvalues: spectrum.eigenvalues,
    })
}

/// Result of pushing a satisfied basis through the Kronecker machinery.
#[derive(Debug, Clone)]
pub struct Conjecture2Pipeline<T> {
    /// Largest deviation of `<dt, xi_i (x) xi_j>` from `-n^2 delta_ij` over
    /// all pairs except the top one.
    pub inner_product_defect: T,
    /// `sum_{i != top} 1 / (1 - beta_i^2)` with `beta_i = (mu_i + 1)/(d + 1)`.
    pub meeting_time: T,
}

/// Feeds an assembled basis through the product-chain inner products and the
/// diagonal eigenvalue sum. When the basis properties hold this reproduces
/// the spectral meeting time.
pub fn conjecture2_pipeline<T: Scalar>(
    g: &RegularGraph,
    report: &Conjecture2Report<T>,
) -> Result<Conjecture2Pipeline<T>> {
    let basis = report
        .basis
        .as_ref()
        .ok_or_else(|| Error::Domain("pipeline requires an assembled basis".into()))?;
    let n = g.n();
    let nf = cast::<T>(n as f64);

    // dt over pair states: 1 off the diagonal, -(n-1) on it
    let mut defect = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i == n - 1 && j == n - 1 {
                continue;
            }
            let mut inner = T::zero();
            for k in 0..n {
                for l in 0..n {
                    let dt = if k == l { -(nf - T::one()) } else { T::one() };
                    inner = inner + dt * basis.get(k, i) * basis.get(l, j);
                }
            }
            let target = if i == j { -nf * nf } else { T::zero() };
            defect = defect.max((inner - target).abs());
        }
    }

    let d1 = cast::<T>(g.degree() as f64 + 1.0);
    let mut meeting_time = T::zero();
    for (idx, &mu) in report.adjacency_eigenvalues.iter().enumerate() {
        if idx == n - 1 {
            continue; // top eigenvalue d gives beta = 1, the dropped zero
        }
        let beta = (mu + T::one()) / d1;
        meeting_time = meeting_time + T::one() / (T::one() - beta * beta);
    }

    Ok(Conjecture2Pipeline {
        inner_product_defect: defect,
        meeting_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::build_circle;
    use approx::assert_relative_eq;

    #[test]
    fn lemma1_endpoint() {
        let quarter = std::f64::consts::FRAC_PI_4;
        assert!(lemma1_check(quarter, quarter).unwrap());
        assert!(lemma1_check(quarter, quarter / 2.0).unwrap());
    }

    #[test]
    fn lemma1_domain() {
        assert!(lemma1_check(0.0, 0.1).is_err());
        assert!(lemma1_check(1.0, 0.1).is_err());
    }

    #[test]
    fn lemma1_full_grid() {
        for i in 1..=100 {
            for j in 1..=100 {
                let t1 = i as f64 * std::f64::consts::PI / 400.0;
                let t2 = j as f64 * std::f64::consts::PI / 400.0;
                assert!(lemma1_check(t1, t2).unwrap(), "failed at ({i}, {j})");
            }
        }
    }

    #[test]
    fn partition_sums_smallest() {
        let ps = torus_partition_sums::<f64>(2).unwrap();
        assert_eq!(ps.shell_count(), 2);
        assert!(ps.sums[0] <= ps.sums[1]);
        assert!(ps.sums.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn partition_sums_monotone_64() {
        let ps = torus_partition_sums::<f64>(64).unwrap();
        for k in 0..ps.shell_count() - 1 {
            assert!(ps.sums[k] <= ps.sums[k + 1]);
        }
        // every top-shell term is at least 1; mean stays within the stated
        // constant bounds
        assert!(ps.top_shell_min_term >= 0.5);
        let mean = ps.top_shell_mean();
        assert!(mean >= 0.5 && mean <= 2.0, "mean {mean}");
    }

    #[test]
    fn partition_sums_reject_non_power() {
        assert!(torus_partition_sums::<f64>(12).is_err());
    }

    #[test]
    fn torus_closed_form_respects_size_cap() {
        assert!(matches!(
            torus_meeting_time_closed_form(256, &TorusWalk::<f64>::simple()),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn circle_closed_form_matches_anchor() {
        let e = circle_meeting_time_closed_form(3, &CircleWalk::<f64>::simple()).unwrap();
        assert_relative_eq!(e, 2.0, epsilon = 1e-12);
        let e4 = circle_meeting_time_closed_form(4, &CircleWalk::<f64>::simple()).unwrap();
        assert_relative_eq!(e4, 27.0 / 8.0, epsilon = 1e-12);
    }

    #[test]
    fn closed_forms_match_dense_spectral() {
        let g = build_circle(9).unwrap();
        let w = CircleWalk::new(0.5, 0.3, 0.2).unwrap();
        let p = transition_matrix(&g, &WalkSpec::Circle(w)).unwrap();
        let dense = spectral_meeting_time(&laplacian(&p).unwrap())
            .unwrap()
            .value;
        let closed = circle_meeting_time_closed_form(9, &w).unwrap();
        assert_relative_eq!(closed, dense, max_relative = 1e-10);

        let gt = crate::graphs::build_torus(4).unwrap();
        let tw = TorusWalk::new([0.3, 0.1, 0.25, 0.15, 0.2]).unwrap();
        let pt = transition_matrix(&gt, &WalkSpec::Torus(tw)).unwrap();
        let dense_t = spectral_meeting_time(&laplacian(&pt).unwrap())
            .unwrap()
            .value;
        let closed_t = torus_meeting_time_closed_form(4, &tw).unwrap();
        assert_relative_eq!(closed_t, dense_t, max_relative = 1e-10);
    }

    #[test]
    fn scaling_rows_have_positive_ratios() {
        let rows =
            scaling_study::<f64>(Family::Circle, &[8, 16, 32], &WalkSpec::<f64>::Simple).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert!(r.e_tau > 0.0 && r.ratio > 0.0);
        }
    }

    #[test]
    fn torus_factored_eigenvalue_form() {
        // the closed-form simple-walk Laplacian eigenvalue factors as
        // C (2 t s + 3)(1 - t s) with a constant C = 8/25 across all (i, j);
        // the displayed 1/5 prefactor does not reproduce the oracle values
        for n in [4usize, 8, 16] {
            let blocks = laplacian_blocks(torus_relative_generator(n, &TorusWalk::<f64>::simple()));
            let eigs = BlockCirculantSpec::new(blocks).unwrap().eigenvalues();
            for i in 0..n {
                for j in 0..n {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let t = (std::f64::consts::PI * (i + j) as f64 / n as f64).cos();
                    let s = (std::f64::consts::PI * (i as f64 - j as f64) / n as f64).cos();
                    let factored = (2.0 * t * s + 3.0) * (1.0 - t * s);
                    if factored.abs() < 1e-12 {
                        continue;
                    }
                    let lambda = eigs[i * n + j];
                    assert_relative_eq!(lambda / factored, 8.0 / 25.0, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn conjecture1_k4_exact() {
        let rows = conjecture1_experiment::<f64>(&[(4, 3)], 1, 2_000, 5).unwrap();
        assert_eq!(rows.len(), 1);
        assert_relative_eq!(rows[0].spectral, rows[0].absorbing, epsilon = 1e-9);
        assert_relative_eq!(rows[0].absorbing, 3.0, epsilon = 1e-10);
    }

    #[test]
    fn conjecture1_reports_rows_per_graph() {
        let rows = conjecture1_experiment::<f64>(&[(8, 3), (10, 3)], 2, 1_000, 11).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!(row.spectral > 0.0 && row.absorbing > 0.0);
            assert!(row.rel_discrepancy >= 0.0);
        }
    }

    #[test]
    fn conjecture2_k3_satisfied() {
        let g = build_circle(3).unwrap();
        let report = conjecture2_check::<f64>(&g).unwrap();
        assert_eq!(report.status, Conjecture2Status::Satisfied);
        let basis = report.basis.as_ref().unwrap();
        // expected two-dimensional solve result for the degenerate pair
        let r3 = 3.0f64.sqrt();
        let mut entries: Vec<f64> = vec![basis.get(0, 0), basis.get(0, 1)];
        entries.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(entries[0], (-1.0 - r3) / 2.0, epsilon = 1e-9);
        assert_relative_eq!(entries[1], (-1.0 + r3) / 2.0, epsilon = 1e-9);
        // anchor entries are 1 and the last column is all-ones
        for j in 0..3 {
            assert_relative_eq!(basis.get(2, j), 1.0, epsilon = 1e-9);
            assert_relative_eq!(basis.get(j, 2), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn conjecture2_k4_indeterminate() {
        let g = random_regular(4, 3, 1).unwrap();
        let report = conjecture2_check::<f64>(&g).unwrap();
        assert_eq!(report.status, Conjecture2Status::Indeterminate);
        assert_eq!(report.blocking_dimension, Some(3));
    }

    #[test]
    fn conjecture2_violated_on_generic_cubic_graph() {
        // a random cubic graph breaks the anchor-magnitude condition for a
        // simple eigenvalue, so the constructive search reports a witness
        let g = random_regular(10, 3, 11).unwrap();
        let report = conjecture2_check::<f64>(&g).unwrap();
        assert_eq!(report.status, Conjecture2Status::Violated);
        assert_eq!(report.properties[1], Some(false));
        let witness = report.witness.as_deref().unwrap();
        assert!(witness.starts_with("(b)"), "witness: {witness}");
    }

    #[test]
    fn conjecture2_circle_four_two_dim_solve() {
        let g = build_circle(4).unwrap();
        let report = conjecture2_check::<f64>(&g).unwrap();
        // the 0-eigenspace has dimension 2 and the in-plane solve succeeds
        assert_eq!(report.status, Conjecture2Status::Satisfied);
        let sums = report.column_sums.as_ref().unwrap();
        for (i, &s) in sums.iter().enumerate() {
            let target = if i == 3 { 4.0 } else { 0.0 };
            assert_relative_eq!(s, target, epsilon = 1e-8);
        }
    }

    #[test]
    fn conjecture2_pipeline_matches_spectral_when_satisfied() {
        for g in [build_circle(3).unwrap(), build_circle(5).unwrap()] {
            let report = conjecture2_check::<f64>(&g).unwrap();
            assert_eq!(report.status, Conjecture2Status::Satisfied);
            let pipeline = conjecture2_pipeline(&g, &report).unwrap();
            assert!(pipeline.inner_product_defect < 1e-7);
            let p = transition_matrix(&g, &WalkSpec::<f64>::Simple).unwrap();
            let spectral = spectral_meeting_time(&laplacian(&p).unwrap())
                .unwrap()
                .value;
            assert_relative_eq!(pipeline.meeting_time, spectral, max_relative = 1e-8);
        }
    }

    #[test]
    fn boundary_sum_order() {
        let ratios: Vec<f64> = [16usize, 32, 64, 128]
            .iter()
            .map(|&n| boundary_reciprocal_sum::<f64>(n) / (n * n) as f64)
            .collect();
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(
            max / min < 1.1,
            "boundary ratios spread too far: {ratios:?}"
        );
    }

    #[test]
    fn derive_seed_is_stable() {
        assert_eq!(derive_seed(7, 0), derive_seed(7, 0));
        assert_ne!(derive_seed(7, 0), derive_seed(7, 1));
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
    }
}
