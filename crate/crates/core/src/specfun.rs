//! Special functions and quadrature backing the closed-form expressions:
//! principal-branch Lambert W, the exponential integral Ei, and adaptive
//! piecewise Gauss-Legendre integration.

use std::sync::LazyLock;
use thiserror::Error;

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Error)]
pub enum SpecFunError {
    #[error("{func}: argument {arg} outside domain ({constraint})")]
    Domain {
        func: &'static str,
        arg: f64,
        constraint: &'static str,
    },
    #[error("{func}: no convergence after {limit} steps")]
    NoConvergence { func: &'static str, limit: u32 },
}

/// Principal branch of the Lambert W function, `w e^w = x` with `w >= -1`.
///
/// Halley iteration seeded from a log-based asymptotic guess; arguments in
/// this crate are nonnegative and modest so convergence takes a handful of
/// steps.
pub fn lambert_w0(x: f64) -> Result<f64, SpecFunError> {
    const INV_E: f64 = 1.0 / std::f64::consts::E;
    if x.is_nan() || x < -INV_E {
        return Err(SpecFunError::Domain {
            func: "lambert_w0",
            arg: x,
            constraint: "x >= -1/e",
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = if x < -0.25 {
        // near the branch point: W ~ -1 + p - p^2/3 with p = sqrt(2(ex+1))
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0
    } else if x < std::f64::consts::E {
        // ln(1+x) is within ~10% on this range
        x.ln_1p()
    } else {
        let l = x.ln();
        l - l.ln()
    };

    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let dw = f / denom;
        w -= dw;
        if dw.abs() <= 1e-14 * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    Err(SpecFunError::NoConvergence {
        func: "lambert_w0",
        limit: 50,
    })
}

/// Exponential integral Ei(x), principal value for x > 0.
///
/// Power series for moderate |x|, continued fraction (negative) or
/// asymptotic series (positive) beyond. The logarithmic singularity at 0 is
/// a domain error.
pub fn expint_ei(x: f64) -> Result<f64, SpecFunError> {
    if x == 0.0 || x.is_nan() {
        return Err(SpecFunError::Domain {
            func: "expint_ei",
            arg: x,
            constraint: "x != 0",
        });
    }
    if x > 0.0 {
        if x <= 40.0 {
            ei_series(x)
        } else {
            ei_asymptotic(x)
        }
    } else {
        let t = -x;
        if t <= 1.0 {
            ei_series(x)
        } else {
            // Ei(-t) = -E1(t); E1 via modified Lentz continued fraction
            e1_continued_fraction(t).map(|e1| -e1)
        }
    }
}

fn ei_series(x: f64) -> Result<f64, SpecFunError> {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..=200u32 {
        term *= x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() <= 1e-17 * sum.abs().max(1e-300) {
            return Ok(EULER_GAMMA + x.abs().ln() + sum);
        }
    }
    Err(SpecFunError::NoConvergence {
        func: "expint_ei",
        limit: 200,
    })
}

fn ei_asymptotic(x: f64) -> Result<f64, SpecFunError> {
    // Ei(x) ~ e^x/x (1 + 1!/x + 2!/x^2 + ...), truncated at the smallest term
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=100u32 {
        let next = term * k as f64 / x;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    Ok(x.exp() / x * sum)
}

fn e1_continued_fraction(t: f64) -> Result<f64, SpecFunError> {
    // E1(t) = e^-t / (t + 1 - 1/(t + 3 - 4/(t + 5 - 9/...)))  (Lentz)
    let tiny = 1e-300;
    let mut b = t + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for k in 1..=200u32 {
        let a = -(k as f64) * (k as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= 1e-15 {
            return Ok((-t).exp() * h);
        }
    }
    Err(SpecFunError::NoConvergence {
        func: "expint_ei",
        limit: 200,
    })
}

/// Controls for [`integrate`]: target relative tolerance, subdivision
/// budget, and integrand split points (piecewise boundaries).
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub max_subdivisions: u32,
    pub breakpoints: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            max_subdivisions: 4096,
            breakpoints: Vec::new(),
        }
    }
}

impl QuadratureSpec {
    pub fn with_breakpoints(mut self, pts: &[f64]) -> Self {
        self.breakpoints = pts.to_vec();
        self.breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        self
    }
}

/// 64-point Gauss-Legendre nodes/weights on [-1, 1], positive half.
/// Computed once by Newton iteration on P_64.
static GL64: LazyLock<([f64; 32], [f64; 32])> = LazyLock::new(|| {
    let n = 64usize;
    let mut nodes = [0.0f64; 32];
    let mut weights = [0.0f64; 32];
    for i in 0..32 {
        // Chebyshev-like initial guess for the i-th positive root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
});

/// Legendre polynomial P_n(x) and its derivative via the three-term
/// recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gl64_panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let (nodes, weights) = &*GL64;
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut acc = 0.0;
    for i in 0..32 {
        let dx = h * nodes[i];
        acc += weights[i] * (f(c + dx) + f(c - dx));
    }
    acc * h
}

/// Adaptive composite Gauss-Legendre quadrature of `f` over `[a, b]`.
///
/// The interval is first split at the spec's breakpoints, then each panel is
/// bisected recursively until the two-half refinement agrees with the whole
/// panel to the spec tolerance (scaled by the panel's share of the rough
/// total). Integrands here are smooth between breakpoints, so one or two
/// levels normally suffice.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, SpecFunError> {
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) {
        return Err(SpecFunError::Domain {
            func: "integrate",
            arg: a,
            constraint: "a <= b",
        });
    }
    let mut edges = vec![a];
    for &p in &spec.breakpoints {
        if p > a && p < b {
            edges.push(p);
        }
    }
    edges.push(b);

    // rough pass fixes the scale the tolerance is relative to
    let mut scale = 0.0;
    let mut rough = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let est = gl64_panel(&f, w[0], w[1]);
        scale += est.abs();
        rough.push(est);
    }
    let tol_abs = spec.rel_tol * scale.max(1e-300);
    let total_len = b - a;

    let mut budget = spec.max_subdivisions;
    let mut sum = 0.0;
    for (w, &est) in edges.windows(2).zip(&rough) {
        sum += refine_panel(&f, w[0], w[1], est, tol_abs, total_len, &mut budget)?;
    }
    Ok(sum)
}

fn refine_panel<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    whole: f64,
    tol_abs: f64,
    total_len: f64,
    budget: &mut u32,
) -> Result<f64, SpecFunError> {
    let mid = 0.5 * (lo + hi);
    let left = gl64_panel(f, lo, mid);
    let right = gl64_panel(f, mid, hi);
    let refined = left + right;
    let frac = ((hi - lo) / total_len).max(1e-6);
    if (whole - refined).abs() <= tol_abs * frac || mid <= lo || mid >= hi {
        return Ok(refined);
    }
    if *budget == 0 {
        return Err(SpecFunError::NoConvergence {
            func: "integrate",
            limit: 0,
        });
    }
    *budget -= 1;
    Ok(refine_panel(f, lo, mid, left, tol_abs, total_len, budget)?
        + refine_panel(f, mid, hi, right, tol_abs, total_len, budget)?)
}

/// `1 - e^{-u} (1 + u)` evaluated without cancellation for small `u`.
///
/// This combination is the unnormalized CDF of the `x e^{-eta x}` density
/// and appears throughout the closed forms; the naive expression loses all
/// precision below `u ~ 1e-6`.
pub fn one_minus_exp1p(u: f64) -> f64 {
    if u.is_infinite() {
        return 1.0;
    }
    if u.abs() < 0.05 {
        // sum_{k>=2} (-1)^k (k-1)/k! u^k
        let mut term = u * u / 2.0; // k = 2
        let mut sum = term;
        let mut k = 3.0;
        loop {
            term *= -u * (k - 1.0) / (k * (k - 2.0));
            sum += term;
            if term.abs() <= f64::EPSILON * sum.abs() || k > 20.0 {
                return sum;
            }
            k += 1.0;
        }
    } else {
        1.0 - (-u).exp() * (1.0 + u)
    }
}

/// `int_a^b x e^{-eta x} dx` in closed form, accepting `b = inf` (eta > 0)
/// and degenerate/empty intervals (result 0).
pub fn seg_x_exp(eta: f64, a: f64, b: f64) -> f64 {
    if !(b > a) || a.is_infinite() {
        return 0.0;
    }
    if eta == 0.0 {
        return 0.5 * (b * b - a * a);
    }
    // (g(a) - g(b)) / eta^2 with g(t) = e^{-eta t}(1 + eta t), g(inf) = 0,
    // rearranged through the stable CDF primitive
    (one_minus_exp1p(eta * b) - one_minus_exp1p(eta * a)) / (eta * eta)
}
