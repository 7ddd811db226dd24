//! Log-integral engine for the pushed beta kernel.
//!
//! Everything in this crate ultimately reduces to partial integrals of
//! `x^(a-1) (1-x)^(b-1) (1-x*phi)^g` (left push) or the mirrored
//! `(1-phi+x*phi)^g` version (right push), reported on the log scale. Two
//! stages are provided:
//!
//! 1. an adaptive Gauss-Kronrod pass over the kernel in linear space, which
//!    is fast and very accurate for moderate parameters but silently
//!    underflows to zero once the kernel peak drops below ~1e-308 (shape or
//!    intensity parameters in the thousands);
//! 2. a beta-quantile midpoint scheme that works entirely in log space and
//!    is immune to that underflow: nodes are beta quantiles at midpoint
//!    probabilities, so they clump exactly where the kernel mass sits, and
//!    the summation runs through [`log_sum_exp`].
//!
//! `AutoFallback` (the default) tries the adaptive pass first and switches
//! to the quantile scheme when the adaptive result is zero, non-finite, or
//! misses its own error target.

use crate::distribution::{Direction, PushBetaParams};
use crate::special::{inv_beta_reg, ln_gamma};
use crate::{Error, Result};

/// Which indicator the log-weights encode: `I(x <= r)` for a left-push
/// partial integral, `I(x >= 1-r)` for a right-push one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightSide {
    Left,
    Right,
}

/// Integration strategy selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureMode {
    /// Adaptive Gauss-Kronrod only; fails rather than falling back.
    Adaptive,
    /// Beta-quantile midpoint scheme only.
    QuantileMidpoint,
    /// Adaptive first, quantile midpoint when the adaptive result is
    /// untrustworthy.
    #[default]
    AutoFallback,
}

/// Configuration for [`log_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Number of quantile nodes M for the midpoint scheme.
    pub node_count: usize,
    pub mode: QuadratureMode,
    /// When set, a zero or non-finite adaptive result is treated as a
    /// failure (triggering fallback under `AutoFallback`). When cleared, a
    /// zero adaptive integral is accepted and reported as -inf, which
    /// reproduces the naive behaviour of stock adaptive routines.
    pub underflow_guard: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            node_count: 1_000_000,
            mode: QuadratureMode::AutoFallback,
            underflow_guard: true,
        }
    }
}

impl QuadratureConfig {
    pub fn with_nodes(node_count: usize) -> Self {
        QuadratureConfig {
            node_count,
            ..QuadratureConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count == 0 {
            return Err(Error::InvalidParameter(
                "node_count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A partial log-integral request: `log integral_0^r` of the kernel of
/// `params`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogIntegralRequest {
    pub upper_limit: f64,
    pub params: PushBetaParams,
}

impl LogIntegralRequest {
    pub fn new(upper_limit: f64, params: PushBetaParams) -> Result<Self> {
        if !(0.0..=1.0).contains(&upper_limit) || upper_limit.is_nan() {
            return Err(Error::Domain(format!(
                "upper limit must lie in [0, 1], got {upper_limit}"
            )));
        }
        Ok(LogIntegralRequest {
            upper_limit,
            params,
        })
    }

    /// Full-range request (r = 1), i.e. the log normalizing constant.
    pub fn full(params: PushBetaParams) -> Self {
        LogIntegralRequest {
            upper_limit: 1.0,
            params,
        }
    }
}

/// Relative tolerance requested from the adaptive stage.
const ADAPTIVE_REL_TOL: f64 = 1e-10;
/// Estimated relative error above which the adaptive result is distrusted.
const FALLBACK_REL_ERR: f64 = 1e-6;

/// Log of the pushed beta density kernel at `x`.
///
/// Returns `-inf` where the kernel is zero and `+inf` at an endpoint whose
/// shape parameter is below one (integrable singularity). Exact zero/one are
/// handled by combining exponents first, so e.g. a right push with phi = 1
/// contributes its power of x before the sign of the limit is decided.
pub fn log_kernel(x: f64, params: &PushBetaParams) -> f64 {
    let (alpha, beta, gamma, phi) = (params.alpha, params.beta, params.gamma, params.phi);
    debug_assert!((0.0..=1.0).contains(&x));
    let left = params.direction == Direction::Left;

    if x == 0.0 {
        // Net power of x at the left endpoint; the push term only
        // contributes a power of x for a right push at phi = 1.
        let mut pow_x = alpha - 1.0;
        let mut rest = 0.0;
        if !left && gamma != 0.0 {
            if phi == 1.0 {
                pow_x += gamma;
            } else {
                rest = gamma * (-phi).ln_1p();
            }
        }
        return endpoint_log(pow_x, rest);
    }
    if x == 1.0 {
        let mut pow_1mx = beta - 1.0;
        let mut rest = 0.0;
        if left && gamma != 0.0 {
            if phi == 1.0 {
                pow_1mx += gamma;
            } else {
                rest = gamma * (-phi).ln_1p();
            }
        }
        return endpoint_log(pow_1mx, rest);
    }

    let mut acc = (alpha - 1.0) * x.ln() + (beta - 1.0) * (-x).ln_1p();
    if gamma != 0.0 {
        acc += if left {
            gamma * (-x * phi).ln_1p()
        } else {
            gamma * (x * phi - phi).ln_1p()
        };
    }
    acc
}

fn endpoint_log(power: f64, rest: f64) -> f64 {
    if power < 0.0 {
        f64::INFINITY
    } else if power > 0.0 {
        f64::NEG_INFINITY
    } else {
        rest
    }
}

/// The slope-ratio function `S(x|phi) = log(1 - x*phi) - log(1 - x)`,
/// nonnegative on [0, 1) for phi in [0, 1].
pub fn log_slope_ratio(x: f64, phi: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "slope ratio requires 0 <= x < 1, got {x}"
        )));
    }
    Ok((-x * phi).ln_1p() - (-x).ln_1p())
}

/// Beta(a, b) quantiles at the midpoint probabilities (2i-1)/2M, i = 1..M.
///
/// Strictly increasing, all interior. Computed by a warm-started Newton
/// sweep so that large M stays cheap.
pub fn beta_quantile_nodes(a: f64, b: f64, m: usize) -> Result<Vec<f64>> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta quantile nodes require positive shapes, got ({a}, {b})"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one node".into()));
    }
    let mut nodes = Vec::with_capacity(m);
    let mut prev = 0.0_f64;
    let scale = 1.0 / (2 * m) as f64;
    for i in 1..=m {
        let p = (2 * i - 1) as f64 * scale;
        let hint = if i == 1 { None } else { Some(prev) };
        let mut q = inv_beta_reg(a, b, p, hint);
        // The sweep must stay strictly increasing even if two quantiles
        // round to the same double.
        if q <= prev {
            q = next_up(prev);
        }
        if q >= 1.0 {
            q = prev + 0.5 * (1.0 - prev);
        }
        nodes.push(q);
        prev = q;
    }
    Ok(nodes)
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

/// Log-weights encoding the integration-range indicator over the node bins.
///
/// Left side encodes `I(x <= r)`, right side `I(x >= 1-r)`. The bin below
/// the first node uses the sentinel q_0 = 0. A node whose bin straddles the
/// cut gets the log of the covered fraction of its bin; `r` equal to a node
/// counts as covered on the left side (non-strict inequality).
pub fn log_weights(nodes: &[f64], r: f64, side: WeightSide) -> Vec<f64> {
    debug_assert!((0.0..=1.0).contains(&r));
    let mut weights = Vec::with_capacity(nodes.len());
    match side {
        WeightSide::Left => {
            let mut prev = 0.0;
            for &q in nodes {
                let w = if q <= r {
                    0.0
                } else if prev <= r {
                    (r - prev).ln() - (q - prev).ln()
                } else {
                    f64::NEG_INFINITY
                };
                weights.push(w);
                prev = q;
            }
        }
        WeightSide::Right => {
            let u = 1.0 - r;
            let mut prev = 0.0;
            for &q in nodes {
                let w = if q < u {
                    f64::NEG_INFINITY
                } else if prev < u {
                    (q - u).ln() - (q - prev).ln()
                } else {
                    0.0
                };
                weights.push(w);
                prev = q;
            }
        }
    }
    weights
}

/// `log(sum(exp(v_i)))` by max-shifting; `-inf` for an empty or all-`-inf`
/// input, `+inf` if any input is `+inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let mut acc = LogSumAcc::new();
    for &v in values {
        acc.push(v);
    }
    acc.value()
}

/// Streaming log-sum-exp accumulator (single pass, rescaled on a new max).
pub(crate) struct LogSumAcc {
    max: f64,
    sum: f64,
}

impl LogSumAcc {
    pub(crate) fn new() -> Self {
        LogSumAcc {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub(crate) fn push(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v > self.max {
            if self.max > f64::NEG_INFINITY {
                self.sum = self.sum * (self.max - v).exp() + 1.0;
            } else {
                self.sum = 1.0;
            }
            self.max = v;
        } else {
            self.sum += (v - self.max).exp();
        }
    }

    pub(crate) fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else if self.max == f64::INFINITY {
            f64::INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// Partial log-integral `H_kappa(r | alpha, beta, gamma, phi)` of the pushed
/// beta kernel.
///
/// Left push (kappa = 0): `log integral_0^r x^(a-1)(1-x)^(b-1)(1-x*phi)^g dx`.
/// Right push (kappa = 1): same with `(1-phi+x*phi)^g`.
///
/// At r = 1 this equals `log B(alpha, beta) + log 2F1(-gamma, c, alpha+beta;
/// phi)` with c = alpha (left) or beta (right); the function is how this
/// crate evaluates that hypergeometric pattern.
pub fn log_integral(request: &LogIntegralRequest, config: &QuadratureConfig) -> Result<f64> {
    config.validate()?;
    let p = &request.params;
    log_integral_raw(
        request.upper_limit,
        p.alpha,
        p.beta,
        p.gamma,
        p.phi,
        p.direction,
        config,
    )
}

/// Raw-parameter entry point. Unlike the public request type this accepts
/// any `gamma > -1` (the score function differentiates the normalizer, which
/// shifts the intensity down by one).
pub(crate) fn log_integral_raw(
    r: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    phi: f64,
    direction: Direction,
    config: &QuadratureConfig,
) -> Result<f64> {
    if r == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let quantile = |m: usize| quantile_log_integral(r, alpha, beta, gamma, phi, direction, m);
    match config.mode {
        QuadratureMode::QuantileMidpoint => quantile(config.node_count),
        QuadratureMode::Adaptive => {
            match adaptive_log_integral(r, alpha, beta, gamma, phi, direction, config) {
                AdaptiveOutcome::Ok(v) => Ok(v),
                AdaptiveOutcome::Untrustworthy(reason) => Err(Error::QuadratureFailure(format!(
                    "adaptive integration failed ({reason}) and fallback is disabled"
                ))),
            }
        }
        QuadratureMode::AutoFallback => {
            match adaptive_log_integral(r, alpha, beta, gamma, phi, direction, config) {
                AdaptiveOutcome::Ok(v) => Ok(v),
                AdaptiveOutcome::Untrustworthy(_) => quantile(config.node_count),
            }
        }
    }
}

enum AdaptiveOutcome {
    Ok(f64),
    Untrustworthy(&'static str),
}

fn adaptive_log_integral(
    r: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    phi: f64,
    direction: Direction,
    config: &QuadratureConfig,
) -> AdaptiveOutcome {
    let params = PushBetaParams::raw(alpha, beta, gamma, phi, direction);
    let f = |x: f64| {
        let lk = log_kernel(x, &params);
        if lk == f64::INFINITY {
            // Endpoint singularity: Kronrod nodes are interior, but clamp
            // defensively so a poisoned evaluation cannot propagate.
            f64::MAX
        } else {
            lk.exp()
        }
    };
    let (value, err) = adaptive_gk(&f, 0.0, r, ADAPTIVE_REL_TOL, 1200);
    if config.underflow_guard && (value <= 0.0 || !value.is_finite()) {
        return AdaptiveOutcome::Untrustworthy("zero or non-finite result");
    }
    if !value.is_finite() {
        return AdaptiveOutcome::Untrustworthy("non-finite result");
    }
    if value > 0.0 && err > FALLBACK_REL_ERR * value {
        return AdaptiveOutcome::Untrustworthy("error estimate above tolerance");
    }
    if value <= 0.0 {
        // Guard disabled: report the naive answer.
        return AdaptiveOutcome::Ok(f64::NEG_INFINITY);
    }
    AdaptiveOutcome::Ok(value.ln())
}

/// The quantile-midpoint scheme for one parameter set: a beta node measure
/// plus the exact log residual `kernel / node_density` (up to the log-beta
/// prefactor), expressed in left-push coordinates (a right push is handled
/// by reflecting the kernel, which maps its indicator to the Right weight
/// scheme).
///
/// The estimator is exact-in-expectation for any node shapes; the shapes
/// only control how fast the midpoint sum converges. `Beta(alpha,
/// beta+gamma)` (the residual `gamma * S(x)`) is used where it is provably
/// adequate: push absorbed (`phi` at 0 or 1), no push, or a singular shape
/// below one, where the node measure must keep the endpoint behaviour. For
/// interior or flat-topped kernels the shapes are instead moment-fitted to
/// the kernel bulk, because the `gamma * S` residual grows without bound
/// toward x = 1 and its truncation error can dominate the whole integral
/// once the parameters reach the thousands.
pub(crate) struct QuantileScheme {
    /// Kernel parameters in left coordinates.
    ka: f64,
    kb: f64,
    gamma: f64,
    phi: f64,
    /// Node measure shapes.
    pub(crate) node_a: f64,
    pub(crate) node_b: f64,
    pub(crate) side: WeightSide,
}

impl QuantileScheme {
    pub(crate) fn new(
        alpha: f64,
        beta: f64,
        gamma: f64,
        phi: f64,
        direction: Direction,
    ) -> Result<Self> {
        let (ka, kb, side) = match direction {
            Direction::Left => (alpha, beta, WeightSide::Left),
            Direction::Right => (beta, alpha, WeightSide::Right),
        };
        let (node_a, node_b) = fit_node_measure(ka, kb, gamma, phi);
        if !(node_a > 0.0) || !(node_b > 0.0) {
            return Err(Error::QuadratureFailure(format!(
                "quantile scheme needs positive node shapes, got ({node_a}, {node_b})"
            )));
        }
        Ok(QuantileScheme {
            ka,
            kb,
            gamma,
            phi,
            node_a,
            node_b,
            side,
        })
    }

    pub(crate) fn nodes(&self, m: usize) -> Result<Vec<f64>> {
        beta_quantile_nodes(self.node_a, self.node_b, m)
    }

    /// log(kernel(q) / node_pdf(q)) - log B(node_a, node_b); reduces to
    /// `gamma * S(q)` for the plain `(alpha, beta+gamma)` node shapes.
    pub(crate) fn log_residual(&self, q: f64) -> f64 {
        (self.ka - self.node_a) * q.ln()
            + (self.kb - self.node_b) * (-q).ln_1p()
            + self.gamma * (-q * self.phi).ln_1p()
    }

    pub(crate) fn log_prefactor(&self) -> f64 {
        ln_gamma(self.node_a) + ln_gamma(self.node_b) - ln_gamma(self.node_a + self.node_b)
    }
}

/// Node-measure shapes for the quantile-midpoint scheme, in left-push
/// coordinates.
fn fit_node_measure(ka: f64, kb: f64, gamma: f64, phi: f64) -> (f64, f64) {
    if gamma == 0.0 || phi == 0.0 {
        return (ka, kb);
    }
    if phi == 1.0 {
        // Absorbed push: the node measure equals the kernel exactly.
        return (ka, kb + gamma);
    }
    if ka < 1.0 || kb < 1.0 {
        // Singular endpoint: keep the endpoint powers of the kernel. Mass
        // then sits against a boundary (or the parameters are small), where
        // this choice stays adequate.
        return (ka, kb + gamma);
    }
    moment_fit_node_measure(ka, kb, gamma, phi).unwrap_or((ka, kb + gamma))
}

/// Fit beta shapes to the kernel bulk by matching its first two moments,
/// computed from a max-shifted Simpson pass over the region where the
/// log-kernel is within `DROP` of its maximum. Requires `ka, kb >= 1` so the
/// log-kernel has no interior singularities.
fn moment_fit_node_measure(ka: f64, kb: f64, gamma: f64, phi: f64) -> Option<(f64, f64)> {
    let params = PushBetaParams::raw(ka, kb, gamma, phi, Direction::Left);
    let lk = |x: f64| log_kernel(x, &params);

    // The slope of the log-kernel has the sign of an upward quadratic with
    // Q(0) >= 0 >= Q(1), so the kernel max is the unique crossing.
    let aa = ka - 1.0;
    let bb = kb - 1.0;
    let q = |x: f64| aa - (aa + bb + aa * phi + gamma * phi) * x + phi * (aa + bb + gamma) * x * x;
    let x_hat = if q(0.0) <= 0.0 {
        0.0
    } else if q(1.0) >= 0.0 {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if q(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let peak = lk(x_hat);
    if !peak.is_finite() {
        return None;
    }

    // Bracket the bulk: log-kernel within DROP of the peak.
    const DROP: f64 = 34.0;
    let cut = peak - DROP;
    let bisect_to_cut = |mut outside: f64, mut inside: f64| -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (outside + inside);
            if mid == outside || mid == inside {
                break;
            }
            if lk(mid) < cut {
                outside = mid;
            } else {
                inside = mid;
            }
        }
        0.5 * (outside + inside)
    };
    let x_lo = if lk(0.0) >= cut { 0.0 } else { bisect_to_cut(0.0, x_hat) };
    let x_hi = if lk(1.0) >= cut { 1.0 } else { bisect_to_cut(1.0, x_hat) };
    if !(x_hi > x_lo) {
        return None;
    }

    // Shifted Simpson moments over the bulk.
    const N: usize = 2048;
    let h = (x_hi - x_lo) / N as f64;
    let mut z = 0.0;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    let mut grid_max = f64::NEG_INFINITY;
    let mut values = [0.0_f64; N + 1];
    for (i, v) in values.iter_mut().enumerate() {
        let x = x_lo + i as f64 * h;
        let l = lk(x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON));
        *v = l;
        if l.is_finite() && l > grid_max {
            grid_max = l;
        }
    }
    if !grid_max.is_finite() {
        return None;
    }
    for (i, &l) in values.iter().enumerate() {
        let w = if l.is_finite() { (l - grid_max).exp() } else { 0.0 };
        let simpson = if i == 0 || i == N {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let x = x_lo + i as f64 * h;
        z += simpson * w;
        m1 += simpson * w * x;
        m2 += simpson * w * x * x;
    }
    if z <= 0.0 {
        return None;
    }
    let mean = m1 / z;
    let var = m2 / z - mean * mean;
    if !(var > 0.0) || !(0.0..=1.0).contains(&mean) {
        return None;
    }
    let nu = mean * (1.0 - mean) / var - 1.0;
    if !(nu > 0.0) {
        return None;
    }
    Some(((mean * nu).max(0.5), ((1.0 - mean) * nu).max(0.5)))
}

/// Quantile-midpoint estimate of the partial log-integral.
fn quantile_log_integral(
    r: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    phi: f64,
    direction: Direction,
    m: usize,
) -> Result<f64> {
    let scheme = QuantileScheme::new(alpha, beta, gamma, phi, direction)?;
    let nodes = scheme.nodes(m)?;
    let weights = log_weights(&nodes, r, scheme.side);
    let mut acc = LogSumAcc::new();
    for (&q, &w) in nodes.iter().zip(&weights) {
        if w == f64::NEG_INFINITY {
            continue;
        }
        acc.push(w + scheme.log_residual(q));
    }
    let lse = acc.value();
    if lse.is_nan() {
        return Err(Error::QuadratureFailure(
            "quantile-midpoint sum is NaN".into(),
        ));
    }
    Ok(lse - (m as f64).ln() + scheme.log_prefactor())
}

/// Adaptive integral of an arbitrary (possibly signed) integrand over [0, 1],
/// returning the value and its error estimate. Used for the log-weighted
/// kernel expectations of the distribution module.
pub(crate) fn adaptive_expectation_integral<F: Fn(f64) -> f64>(f: &F) -> (f64, f64) {
    adaptive_gk(f, 0.0, 1.0, ADAPTIVE_REL_TOL, 1200)
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (G7/K15) with global interval subdivision.
// ---------------------------------------------------------------------------

/// Kronrod-15 abscissae on [0, 1] (positive half; symmetric).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod-15 weights.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss-7 weights (matching XGK indices 1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7/K15 panel on [lo, hi]: returns (kronrod value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let half = 0.5 * (hi - lo);
    let center = 0.5 * (lo + hi);

    let fc = f(center);
    let mut result_gauss = WG[3] * fc;
    let mut result_kronrod = WGK[7] * fc;
    let mut result_abs = WGK[7] * fc.abs();

    let mut fv = [0.0_f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        result_kronrod += WGK[j] * (f1 + f2);
        result_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * result_kronrod;
    let mut result_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        result_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let value = result_kronrod * half;
    let abs_integral = result_abs * half.abs();
    let asc = result_asc * half.abs();
    let mut err = ((result_kronrod - result_gauss) * half).abs();
    // QUADPACK-style error rescaling.
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let tiny = 50.0 * f64::MIN_POSITIVE / f64::EPSILON;
    if abs_integral > tiny {
        err = err.max(f64::EPSILON * 50.0 * abs_integral);
    }
    (value, err)
}

/// Globally adaptive bisection: split the panel with the largest error until
/// the total estimated error meets `rel_tol` or the panel budget runs out.
/// Returns (value, error estimate).
fn adaptive_gk<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, rel_tol: f64, max_panels: usize) -> (f64, f64) {
    #[derive(Debug)]
    struct Panel {
        lo: f64,
        hi: f64,
        value: f64,
        err: f64,
    }

    let (v, e) = gk15(f, lo, hi);
    let mut panels = vec![Panel {
        lo,
        hi,
        value: v,
        err: e,
    }];

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        if total_err <= rel_tol * total.abs() || panels.len() >= max_panels {
            return (total, total_err);
        }
        // Split the worst panel.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.partial_cmp(&b.1.err).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let Panel { lo, hi, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval exhausted at machine precision; put it back and stop.
            let (v, e) = gk15(f, lo, hi);
            panels.push(Panel {
                lo,
                hi,
                value: v,
                err: e,
            });
            let total: f64 = panels.iter().map(|p| p.value).sum();
            let total_err: f64 = panels.iter().map(|p| p.err).sum();
            return (total, total_err);
        }
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        panels.push(Panel {
            lo,
            hi: mid,
            value: v1,
            err: e1,
        });
        panels.push(Panel {
            lo: mid,
            hi,
            value: v2,
            err: e2,
        });
    }
}
