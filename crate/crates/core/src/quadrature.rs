//! Gauss–Legendre rules with globally adaptive subdivision in one and two
//! dimensions.
//!
//! Both adaptive drivers estimate the error of a panel by comparing a
//! low-order and a high-order rule on it, then repeatedly split the panel with
//! the largest error estimate (bisection in 1-D, quartering in 2-D) until the
//! summed estimate meets the tolerance. Integrable endpoint singularities and
//! kinks are resolved by the refinement concentrating there.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{numeric, Result};

const MAX_RULE: usize = 32;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn build(n: usize) -> Self {
        let gl = GaussLegendre::new(n).expect("Gauss-Legendre order >= 2");
        let (nodes, weights) = gl.as_node_weight_pairs().iter().copied().unzip();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Tensor-product rule on `[a, b] x [c, d]`.
    pub fn integrate_rect(
        &self,
        (a, b): (f64, f64),
        (c, d): (f64, f64),
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> f64 {
        let mut total = 0.0;
        for (x, wx) in self.mapped(a, b) {
            let mut row = 0.0;
            for (y, wy) in self.mapped(c, d) {
                row += wy * f(x, y);
            }
            total += wx * row;
        }
        total
    }
}

/// Cached rule of order `n` (2 <= n <= 32).
pub fn rule(n: usize) -> &'static Rule {
    static RULES: OnceLock<Vec<Rule>> = OnceLock::new();
    assert!((2..=MAX_RULE).contains(&n), "rule order {n} out of range");
    &RULES.get_or_init(|| (2..=MAX_RULE).map(Rule::build).collect())[n - 2]
}

/// Tolerance settings for the adaptive drivers.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    /// Maximum number of panels before giving up.
    pub max_panels: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self { rel, abs: 1e-300, max_panels: 20_000 }
    }
}

const LO_1D: usize = 10;
const HI_1D: usize = 15;
const LO_2D: usize = 4;
const HI_2D: usize = 6;

#[derive(Debug, Clone, Copy)]
struct Panel<B> {
    bounds: B,
    value: f64,
    error: f64,
}

impl<B> PartialEq for Panel<B> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<B> Eq for Panel<B> {}

impl<B> PartialOrd for Panel<B> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<B> Ord for Panel<B> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Refine the panel set until the summed error estimate meets `tol`.
fn refine<B: Copy>(
    initial: Vec<B>,
    tol: Tolerance,
    mut estimate: impl FnMut(B) -> (f64, f64),
    split: impl Fn(B) -> Vec<B>,
    describe: impl Fn(B) -> String,
) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (0.0, 0.0);
    for bounds in initial {
        let (v, e) = estimate(bounds);
        value += v;
        error += e;
        heap.push(Panel { bounds, value: v, error: e });
    }
    loop {
        if !value.is_finite() {
            return Ok(value);
        }
        if error <= (tol.rel * value.abs()).max(tol.abs) {
            // re-sum to shed the drift of incremental updates
            return Ok(heap.iter().map(|p| p.value).sum());
        }
        if heap.len() >= tol.max_panels {
            let worst = heap.peek().expect("non-empty");
            return numeric(format!(
                "quadrature did not converge: estimate {value}, error {error}, worst panel {}",
                describe(worst.bounds)
            ));
        }
        let worst = heap.pop().expect("non-empty");
        value -= worst.value;
        error -= worst.error;
        for bounds in split(worst.bounds) {
            let (v, e) = estimate(bounds);
            value += v;
            error += e;
            heap.push(Panel { bounds, value: v, error: e });
        }
    }
}

/// Adaptive 1-D integral of `f` over `[a, b]`.
///
/// `breaks` are interior points where `f` is known to be non-smooth; they
/// seed the initial panels.
pub fn adaptive_1d(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<f64> {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let initial = pts.windows(2).map(|w| (w[0], w[1])).collect();
    refine(
        initial,
        tol,
        |(x0, x1)| {
            let hi = rule(HI_1D).integrate(x0, x1, &mut *f);
            let lo = rule(LO_1D).integrate(x0, x1, &mut *f);
            (hi, (hi - lo).abs())
        },
        |(x0, x1)| {
            let mid = 0.5 * (x0 + x1);
            vec![(x0, mid), (mid, x1)]
        },
        |(x0, x1)| format!("[{x0}, {x1}]"),
    )
}

/// Adaptive 2-D integral of `f(x, y)` over the rectangle `[a, b] x [c, d]`.
pub fn adaptive_rect(
    f: &mut dyn FnMut(f64, f64) -> f64,
    xs: (f64, f64),
    ys: (f64, f64),
    tol: Tolerance,
) -> Result<f64> {
    refine(
        vec![(xs, ys)],
        tol,
        |(x, y)| {
            let hi = rule(HI_2D).integrate_rect(x, y, &mut *f);
            let lo = rule(LO_2D).integrate_rect(x, y, &mut *f);
            (hi, (hi - lo).abs())
        },
        |(x, y)| {
            let xm = 0.5 * (x.0 + x.1);
            let ym = 0.5 * (y.0 + y.1);
            vec![
                ((x.0, xm), (y.0, ym)),
                ((x.0, xm), (ym, y.1)),
                ((xm, x.1), (y.0, ym)),
                ((xm, x.1), (ym, y.1)),
            ]
        },
        |(x, y)| format!("[{}, {}] x [{}, {}]", x.0, x.1, y.0, y.1),
    )
}
