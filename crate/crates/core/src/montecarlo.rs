//! Seeded simulation of two independent walkers until co-location.
//!
//! Trial t draws from a ChaCha substream keyed by (seed, t), so results are
//! identical no matter how trials are scheduled, and aggregation uses exact
//! integer sums of tau and tau^2. Co-location is only tested after the
//! simultaneous step: walkers crossing an edge in opposite directions do not
//! meet.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphs::{RegularGraph, TorusCoord};
use crate::meeting::{diag, MeetingEstimate, Method};
use crate::scalar::Scalar;
use crate::walks::WalkSpec;

/// Default per-trial step cap.
pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

/// Simulation parameters.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub max_steps: u64,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

/// Aggregated simulation outcome.
///
/// `mean` and `half_width` (1.96 sigma / sqrt(trials)) cover the completed
/// trials; truncated trials are counted separately and never silently
/// dropped.
#[derive(Debug, Clone, Copy)]
pub struct McResult {
    pub mean: f64,
    pub half_width: f64,
    pub trials: u64,
    pub truncated: u64,
}

impl McResult {
    pub fn estimate<T: Scalar>(&self) -> MeetingEstimate<T> {
        let mut diagnostics = BTreeMap::new();
        diagnostics.insert(diag::MC_HALF_WIDTH.into(), self.half_width);
        diagnostics.insert(diag::MC_TRIALS.into(), self.trials as f64);
        diagnostics.insert(diag::MC_TRUNCATED.into(), self.truncated as f64);
        MeetingEstimate {
            value: T::from_f64(self.mean).expect("mean fits scalar"),
            method: Method::MonteCarlo,
            diagnostics,
        }
    }
}

/// One simulated trial.
#[derive(Debug, Clone, Copy)]
pub struct Trial {
    pub start: (usize, usize),
    /// Meeting time in steps, or `None` when the trial hit the step cap.
    pub steps: Option<u64>,
}

/// How a walker moves, resolved once per simulation.
enum Stepper<'g> {
    Simple { graph: &'g RegularGraph },
    Circle { n: usize, cum: [f64; 2] },
    Torus { side: usize, cum: [f64; 4] },
}

impl<'g> Stepper<'g> {
    fn new<T: Scalar>(g: &'g RegularGraph, w: &WalkSpec<T>) -> Result<Self> {
        let f = |v: T| v.to_f64().expect("probability fits f64");
        match w {
            WalkSpec::Simple => Ok(Stepper::Simple { graph: g }),
            WalkSpec::Circle(w) => {
                let n = g.circle_size().ok_or_else(|| {
                    Error::IncompatibleWalk("circle walk requires a circle graph".into())
                })?;
                Ok(Stepper::Circle {
                    n,
                    cum: [f(w.left), f(w.left) + f(w.right)],
                })
            }
            WalkSpec::Torus(w) => {
                let side = g.torus_size().ok_or_else(|| {
                    Error::IncompatibleWalk("torus walk requires a torus graph".into())
                })?;
                let c1 = f(w.x_plus);
                let c2 = c1 + f(w.x_minus);
                let c3 = c2 + f(w.y_plus);
                let c4 = c3 + f(w.y_minus);
                Ok(Stepper::Torus {
                    side,
                    cum: [c1, c2, c3, c4],
                })
            }
        }
    }

    fn step(&self, at: usize, rng: &mut ChaCha8Rng) -> usize {
        match self {
            Stepper::Simple { graph } => {
                let pick = rng.gen_range(0..=graph.degree());
                if pick == 0 {
                    at
                } else {
                    graph.neighbors(at)[pick - 1]
                }
            }
            Stepper::Circle { n, cum } => {
                let u: f64 = rng.gen();
                if u < cum[0] {
                    (at + n - 1) % n
                } else if u < cum[1] {
                    (at + 1) % n
                } else {
                    at
                }
            }
            Stepper::Torus { side, cum } => {
                let u: f64 = rng.gen();
                let c = TorusCoord::from_index(at, *side);
                let moved = if u < cum[0] {
                    TorusCoord {
                        x: (c.x + 1) % side,
                        y: c.y,
                    }
                } else if u < cum[1] {
                    TorusCoord {
                        x: (c.x + side - 1) % side,
                        y: c.y,
                    }
                } else if u < cum[2] {
                    TorusCoord {
                        x: c.x,
                        y: (c.y + 1) % side,
                    }
                } else if u < cum[3] {
                    TorusCoord {
                        x: c.x,
                        y: (c.y + side - 1) % side,
                    }
                } else {
                    c
                };
                moved.index(*side)
            }
        }
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_with_stepper(stepper: &Stepper, n: usize, seed: u64, trial: u64, max_steps: u64) -> Trial {
    let mut rng = trial_rng(seed, trial);
    let mut a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n);
    let start = (a, b);
    let mut steps = 0u64;
    while a != b {
        if steps >= max_steps {
            return Trial { start, steps: None };
        }
        a = stepper.step(a, &mut rng);
        b = stepper.step(b, &mut rng);
        steps += 1;
    }
    Trial {
        start,
        steps: Some(steps),
    }
}

/// Runs a single trial on its own substream. Exposed so callers can
/// instrument individual trajectories.
pub fn run_trial<T: Scalar>(
    g: &RegularGraph,
    w: &WalkSpec<T>,
    seed: u64,
    trial: u64,
    max_steps: u64,
) -> Result<Trial> {
    let stepper = Stepper::new(g, w)?;
    Ok(run_with_stepper(&stepper, g.n(), seed, trial, max_steps))
}

/// Simulates `cfg.trials` independent meetings and aggregates mean and
/// confidence half-width. Errors only if every trial truncated.
pub fn simulate_meeting<T: Scalar>(
    g: &RegularGraph,
    w: &WalkSpec<T>,
    cfg: &McConfig,
) -> Result<McResult> {
    let stepper = Stepper::new(g, w)?;
    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;
    let mut truncated = 0u64;
    for trial in 0..cfg.trials {
        match run_with_stepper(&stepper, g.n(), cfg.seed, trial, cfg.max_steps).steps {
            Some(tau) => {
                sum += tau as u128;
                sum_sq += (tau as u128) * (tau as u128);
            }
            None => truncated += 1,
        }
    }
    let completed = cfg.trials - truncated;
    if completed == 0 {
        return Err(Error::AllTrialsTruncated(cfg.trials));
    }
    let m = completed as f64;
    let mean = sum as f64 / m;
    let variance = if completed > 1 {
        (sum_sq as f64 - (sum as f64) * (sum as f64) / m) / (m - 1.0)
    } else {
        0.0
    };
    let half_width = 1.96 * (variance.max(0.0) / m).sqrt();
    Ok(McResult {
        mean,
        half_width,
        trials: cfg.trials,
        truncated,
    })
}

/// Histogram of observed meeting times. Truncated trials are binned at
/// `cfg.max_steps`, so counts always sum to `cfg.trials`.
pub fn meeting_time_histogram<T: Scalar>(
    g: &RegularGraph,
    w: &WalkSpec<T>,
    cfg: &McConfig,
) -> Result<BTreeMap<u64, u64>> {
    let stepper = Stepper::new(g, w)?;
    let mut histogram = BTreeMap::new();
    for trial in 0..cfg.trials {
        let tau = run_with_stepper(&stepper, g.n(), cfg.seed, trial, cfg.max_steps)
            .steps
            .unwrap_or(cfg.max_steps);
        *histogram.entry(tau).or_insert(0) += 1;
    }
    Ok(histogram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_circle, RegularGraph};
    use crate::walks::CircleWalk;

    fn k2() -> RegularGraph {
        RegularGraph::from_adjacency(vec![vec![1], vec![0]]).unwrap()
    }

    #[test]
    fn k2_mean_near_one() {
        let cfg = McConfig::new(100_000, 17);
        let res = simulate_meeting(&k2(), &WalkSpec::<f64>::Simple, &cfg).unwrap();
        assert_eq!(res.truncated, 0);
        assert!(
            (res.mean - 1.0).abs() <= res.half_width,
            "mean {} hw {}",
            res.mean,
            res.half_width
        );
    }

    #[test]
    fn triangle_mean_near_two() {
        let g = build_circle(3).unwrap();
        let cfg = McConfig::new(100_000, 99);
        let res = simulate_meeting(&g, &WalkSpec::<f64>::Simple, &cfg).unwrap();
        assert!(
            (res.mean - 2.0).abs() <= res.half_width,
            "mean {} hw {}",
            res.mean,
            res.half_width
        );
    }

    #[test]
    fn single_trial_is_deterministic() {
        let g = build_circle(6).unwrap();
        let w = WalkSpec::Circle(CircleWalk::<f64>::simple());
        let a = run_trial(&g, &w, 5, 0, DEFAULT_MAX_STEPS).unwrap();
        let b = run_trial(&g, &w, 5, 0, DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(a.start, b.start);
        assert_eq!(a.steps, b.steps);
    }

    #[test]
    fn trials_are_order_independent_substreams() {
        let g = build_circle(5).unwrap();
        let w = WalkSpec::<f64>::Simple;
        let forward: Vec<_> = (0..20)
            .map(|t| run_trial(&g, &w, 3, t, DEFAULT_MAX_STEPS).unwrap().steps)
            .collect();
        let mut backward: Vec<_> = (0..20)
            .rev()
            .map(|t| run_trial(&g, &w, 3, t, DEFAULT_MAX_STEPS).unwrap().steps)
            .collect();
        backward.reverse();
        assert_eq!(forward, backward);
    }

    #[test]
    fn histogram_counts_sum_to_trials() {
        let g = build_circle(3).unwrap();
        let cfg = McConfig::new(5_000, 4);
        let hist = meeting_time_histogram(&g, &WalkSpec::<f64>::Simple, &cfg).unwrap();
        let total: u64 = hist.values().sum();
        assert_eq!(total, cfg.trials);
        // co-located start probability 1/3
        let zero = hist[&0] as f64 / cfg.trials as f64;
        assert!((zero - 1.0 / 3.0).abs() < 0.03, "bin0 fraction {zero}");
    }

    #[test]
    fn k2_histogram_geometric_tail() {
        let cfg = McConfig::new(200_000, 12);
        let hist = meeting_time_histogram(&k2(), &WalkSpec::<f64>::Simple, &cfg).unwrap();
        let zero = hist[&0] as f64 / cfg.trials as f64;
        assert!((zero - 0.5).abs() < 0.01, "bin0 fraction {zero}");
        for k in 1..5u64 {
            let ratio = hist[&(k + 1)] as f64 / hist[&k] as f64;
            assert!((ratio - 0.5).abs() < 0.08, "tail ratio at {k}: {ratio}");
        }
    }

    #[test]
    fn swap_across_edge_is_not_a_meeting() {
        // pure walk on an even circle: pair parity is invariant, so trials
        // started at odd separation must truncate, never meet
        let g = build_circle(4).unwrap();
        let w = WalkSpec::Circle(CircleWalk::new(0.5, 0.5, 0.0).unwrap());
        let mut odd_seen = 0;
        for trial in 0..200 {
            let t = run_trial(&g, &w, 8, trial, 2_000).unwrap();
            let parity = (t.start.0 + t.start.1) % 2;
            if parity == 1 {
                odd_seen += 1;
                assert_eq!(
                    t.steps, None,
                    "odd-separation walkers met; swap was counted as meeting"
                );
            } else if t.start.0 == t.start.1 {
                assert_eq!(t.steps, Some(0));
            }
        }
        assert!(odd_seen > 50, "want plenty of odd-parity starts");
    }

    #[test]
    fn truncation_is_recorded() {
        let g = build_circle(4).unwrap();
        let w = WalkSpec::Circle(CircleWalk::new(0.5, 0.5, 0.0).unwrap());
        let cfg = McConfig {
            trials: 64,
            seed: 2,
            max_steps: 500,
        };
        let res = simulate_meeting(&g, &w, &cfg).unwrap();
        assert!(res.truncated > 0);
        assert!(res.mean >= 0.0);
    }
}
