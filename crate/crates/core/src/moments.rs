//! Closed-form first and second moments of the dominating-set count X and
//! the near-dominating-set count N in G(n,p), all in the log domain.
//!
//! Two sets S, S' of size k with |S ∩ S'| = i split the vertices into
//! A = S∩S', B = S\S', C = S'\S and D = the rest, with |B| = |C| = j = k - i
//! and |D| = m = n - 2k + i. D vertices behave independently. Vertices of B
//! and C do not: an edge between b ∈ B and c ∈ C helps c toward S and b
//! toward S' at once. The exact forms below carry that coupling through
//! [`coupled_coverage`]; the `*_independent` forms multiply per-vertex
//! probabilities as if B and C were independent, and are kept for
//! comparison only (they undercount, most visibly at small n).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logreal::LogReal;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u64,
    pub k: u64,
    pub p: f64,
    pub delta: f64,
    pub c: f64,
}

pub const DEFAULT_DELTA: f64 = 0.5;
pub const DEFAULT_C: f64 = 0.5;

impl ModelParams {
    /// `delta` and `c` at their defaults.
    pub fn new(n: u64, k: u64, p: f64) -> Self {
        Self {
            n,
            k,
            p,
            delta: DEFAULT_DELTA,
            c: DEFAULT_C,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(Error::Domain(format!(
                "need 1 <= k <= n, got n={} k={}",
                self.n, self.k
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Domain(format!("p={} not in [0,1]", self.p)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Domain(format!("delta={} not in (0,1)", self.delta)));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::Domain(format!("c={} not in (0,1)", self.c)));
        }
        Ok(())
    }
}

/// Powers of q = 1 - p with the conventions `0^0 = 1` and exact endpoints.
#[derive(Clone, Copy, Debug)]
struct EdgeProb {
    p: f64,
    ln_q: f64,
}

impl EdgeProb {
    fn new(p: f64) -> Self {
        Self {
            p,
            ln_q: (-p).ln_1p(),
        }
    }

    fn pow_q(&self, e: f64) -> LogReal {
        if e == 0.0 {
            LogReal::ONE
        } else if self.p == 1.0 {
            LogReal::ZERO
        } else {
            LogReal::from_ln(e * self.ln_q)
        }
    }

    /// `1 - q^e` without cancellation.
    fn one_minus_pow_q(&self, e: f64) -> LogReal {
        if e == 0.0 || self.p == 0.0 {
            LogReal::ZERO
        } else if self.p == 1.0 {
            LogReal::ONE
        } else {
            let x = e * self.ln_q;
            let ln = if x > -std::f64::consts::LN_2 {
                (-x.exp_m1()).ln()
            } else {
                (-x.exp()).ln_1p()
            };
            LogReal::from_ln(ln)
        }
    }
}

/// `ln C(n, k)`; `None` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> Option<f64> {
    if k > n {
        return None;
    }
    let m = k.min(n - k);
    if m <= 64 {
        Some((1..=m).map(|t| ((n - m + t) as f64 / t as f64).ln()).sum())
    } else {
        use statrs::function::gamma::ln_gamma;
        Some(ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
    }
}

pub fn binomial(n: u64, k: u64) -> LogReal {
    ln_binomial(n, k).map_or(LogReal::ZERO, LogReal::from_ln)
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, t| acc * (n - k + t) as f64 / t as f64)
}

/// Probability that, in the bipartite random graph between `r` vertices on
/// one side and `s` on the other, every vertex has a neighbor on the other
/// side or is independently covered by one of its `i` private edges.
///
/// Computed by a forward pass over the `r` side tracking how many of the
/// `s` side have been hit; every term is nonnegative.
pub fn coupled_coverage(r: usize, s: usize, i: u64, p: f64) -> f64 {
    let ep = EdgeProb::new(p);
    let q_pow = |e: usize| ep.pow_q(e as f64).to_f64();
    let p_pow = |e: usize| if e == 0 { 1.0 } else { p.powi(e as i32) };
    let mut dp = vec![0.0f64; s + 1];
    dp[0] = 1.0;
    for _ in 0..r {
        let mut next = vec![0.0f64; s + 1];
        for (t, &mass) in dp.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let free = s - t;
            for h in 0..=free {
                let mut w = binomial_f64(free, h) * p_pow(h) * q_pow(free - h);
                if h == 0 {
                    // no new hits: must reach an already-hit vertex or A
                    w *= ep.one_minus_pow_q(i as f64 + t as f64).to_f64();
                }
                next[t + h] += mass * w;
            }
        }
        dp = next;
    }
    let a_cover = ep.one_minus_pow_q(i as f64).to_f64();
    dp.iter()
        .enumerate()
        .map(|(t, &mass)| mass * a_cover.powi((s - t) as i32))
        .sum()
}

/// Probability that `a` named vertices of C miss S, `b` named vertices of B
/// miss S', and every other vertex of B and C is dominated by its set.
fn pair_block(k: u64, j: u64, i: u64, a: u64, b: u64, p: f64) -> LogReal {
    let ep = EdgeProb::new(p);
    let forced = ep.pow_q(((a + b) * k - a * b) as f64);
    let cov = coupled_coverage((j - a) as usize, (j - b) as usize, i, p);
    forced * LogReal::from_f64(cov)
}

/// E[X] = C(n,k) (1 - (1-p)^k)^(n-k).
pub fn expected_x(params: &ModelParams) -> LogReal {
    let ModelParams { n, k, p, .. } = *params;
    let ep = EdgeProb::new(p);
    binomial(n, k) * ep.one_minus_pow_q(k as f64).powi(n - k)
}

/// E[N] = C(n,k) (n-k) μ (1-μ)^(n-k-1), μ = (1-p)^k.
pub fn expected_n(params: &ModelParams) -> LogReal {
    let ModelParams { n, k, p, .. } = *params;
    if n == k {
        return LogReal::ZERO;
    }
    let ep = EdgeProb::new(p);
    binomial(n, k)
        * LogReal::from_f64((n - k) as f64)
        * ep.pow_q(k as f64)
        * ep.one_minus_pow_q(k as f64).powi(n - k - 1)
}

fn check_overlap(params: &ModelParams, i: u64) -> Result<()> {
    if i > params.k {
        Err(Error::Domain(format!(
            "overlap i={i} exceeds k={}",
            params.k
        )))
    } else {
        Ok(())
    }
}

/// Number of ordered pairs (S, S') of k-sets with |S ∩ S'| = i:
/// C(n,i) C(n-i,k-i) C(n-k,k-i). Zero when the configuration is void.
pub fn phi(params: &ModelParams, i: u64) -> Result<LogReal> {
    check_overlap(params, i)?;
    let ModelParams { n, k, .. } = *params;
    if n + i < 2 * k {
        return Ok(LogReal::ZERO);
    }
    Ok(binomial(n, i) * binomial(n - i, k - i) * binomial(n - k, k - i))
}

/// ζ = 1 - 2μ + ϖ, evaluated as (1-μ)² + (1-p)^(2k-i) (1 - (1-p)^i).
fn zeta(ep: &EdgeProb, k: u64, i: u64) -> LogReal {
    ep.one_minus_pow_q(k as f64).powi(2)
        + ep.pow_q((2 * k - i) as f64) * ep.one_minus_pow_q(i as f64)
}

/// Contribution to E[X²] of ordered pairs with overlap i.
pub fn f_term(params: &ModelParams, i: u64) -> Result<LogReal> {
    let phi_i = phi(params, i)?;
    if phi_i.is_zero() {
        return Ok(LogReal::ZERO);
    }
    let ModelParams { n, k, p, .. } = *params;
    let ep = EdgeProb::new(p);
    let j = k - i;
    let m = n + i - 2 * k;
    Ok(phi_i * pair_block(k, j, i, 0, 0, p) * zeta(&ep, k, i).powi(m))
}

/// `f_term` with the B/C factor replaced by the independent product
/// (1 - μ)^(2(k-i)).
pub fn f_term_independent(params: &ModelParams, i: u64) -> Result<LogReal> {
    let phi_i = phi(params, i)?;
    if phi_i.is_zero() {
        return Ok(LogReal::ZERO);
    }
    let ModelParams { n, k, p, .. } = *params;
    let ep = EdgeProb::new(p);
    let j = k - i;
    let m = n + i - 2 * k;
    Ok(phi_i * ep.one_minus_pow_q(k as f64).powi(2 * j) * zeta(&ep, k, i).powi(m))
}

pub fn expected_x2(params: &ModelParams) -> LogReal {
    LogReal::sum((0..=params.k).map(|i| f_term(params, i).expect("i in range")))
}

pub fn expected_x2_independent(params: &ModelParams) -> LogReal {
    LogReal::sum((0..=params.k).map(|i| f_term_independent(params, i).expect("i in range")))
}

/// Joint probability terms for two near-dominating sets with overlap i.
///
/// `p1..p4` are the exact contributions of the four placements of the two
/// undominated vertices x (missed by S) and y (missed by S'):
/// x∈C,y∈B; x∈C,y∈D (counted twice for the mirror case); x=y∈D; x≠y both
/// in D. `w = p1 + 2 p2 + p3 + p4`. The `_indep` fields hold the same four
/// cases with B and C treated as independent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WTerms {
    pub i: u64,
    /// (1-p)^k
    pub mu: f64,
    /// 1 - (1-p)^(k-i)
    pub theta: f64,
    /// (1-p)^(2k-i)
    pub varpi: f64,
    /// n - 2k + i; negative means no such pair of sets exists
    pub m: i64,
    /// 1 - 2μ + ϖ
    pub zeta: f64,
    pub p1: LogReal,
    pub p2: LogReal,
    pub p3: LogReal,
    pub p4: LogReal,
    pub w: LogReal,
    pub p1_indep: LogReal,
    pub p2_indep: LogReal,
    pub p3_indep: LogReal,
    pub p4_indep: LogReal,
    pub w_indep: LogReal,
}

pub fn w_terms(params: &ModelParams, i: u64) -> Result<WTerms> {
    check_overlap(params, i)?;
    let ModelParams { n, k, p, .. } = *params;
    let ep = EdgeProb::new(p);
    let j = k - i;
    let m = n as i64 + i as i64 - 2 * k as i64;

    let mu = ep.pow_q(k as f64);
    let one_minus_mu = ep.one_minus_pow_q(k as f64);
    let theta = ep.one_minus_pow_q(j as f64);
    let varpi = ep.pow_q((2 * k - i) as f64);
    let z = zeta(&ep, k, i);

    let mut t = WTerms {
        i,
        mu: mu.to_f64(),
        theta: theta.to_f64(),
        varpi: varpi.to_f64(),
        m,
        zeta: z.to_f64(),
        p1: LogReal::ZERO,
        p2: LogReal::ZERO,
        p3: LogReal::ZERO,
        p4: LogReal::ZERO,
        w: LogReal::ZERO,
        p1_indep: LogReal::ZERO,
        p2_indep: LogReal::ZERO,
        p3_indep: LogReal::ZERO,
        p4_indep: LogReal::ZERO,
        w_indep: LogReal::ZERO,
    };
    if m < 0 {
        return Ok(t);
    }
    let m = m as u64;
    let num = |x: u64| LogReal::from_f64(x as f64);
    let mu_theta = mu * theta;
    let r00 = pair_block(k, j, i, 0, 0, p);

    if j >= 1 {
        t.p1 = num(j * j) * pair_block(k, j, i, 1, 1, p) * z.powi(m);
        t.p1_indep = num(j * j) * mu.powi(2) * one_minus_mu.powi(2 * j - 2) * z.powi(m);
    }
    if j >= 1 && m >= 1 {
        t.p2 = num(j * m) * mu_theta * pair_block(k, j, i, 1, 0, p) * z.powi(m - 1);
        t.p2_indep =
            num(j * m) * mu.powi(2) * theta * one_minus_mu.powi(2 * j - 1) * z.powi(m - 1);
    }
    if m >= 1 {
        t.p3 = num(m) * varpi * r00 * z.powi(m - 1);
        t.p3_indep = num(m) * varpi * one_minus_mu.powi(2 * j) * z.powi(m - 1);
    }
    if m >= 2 {
        t.p4 = num(m * (m - 1)) * mu_theta.powi(2) * r00 * z.powi(m - 2);
        t.p4_indep =
            num(m * (m - 1)) * mu_theta.powi(2) * one_minus_mu.powi(2 * j) * z.powi(m - 2);
    }
    let two = LogReal::from_f64(2.0);
    t.w = LogReal::sum([t.p1, two * t.p2, t.p3, t.p4]);
    t.w_indep = LogReal::sum([t.p1_indep, two * t.p2_indep, t.p3_indep, t.p4_indep]);
    Ok(t)
}

pub fn expected_n2(params: &ModelParams) -> LogReal {
    LogReal::sum((0..=params.k).map(|i| {
        phi(params, i).expect("i in range") * w_terms(params, i).expect("i in range").w
    }))
}

pub fn expected_n2_independent(params: &ModelParams) -> LogReal {
    LogReal::sum((0..=params.k).map(|i| {
        phi(params, i).expect("i in range") * w_terms(params, i).expect("i in range").w_indep
    }))
}

/// ε_n = ln ln n / ln n.
pub fn asymptotic_epsilon(n: u64) -> f64 {
    let l = (n as f64).ln();
    l.ln() / l
}

/// p = 1 - e^-1 ((1 - ε_n) ln² n)^(1/ln n), with the (1+o(1)) factor in ε_n
/// taken as exactly 1. Only a starting point for [`calibrate_p`].
pub fn asymptotic_p(n: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("asymptotic p needs n >= 3, got {n}")));
    }
    let l = (n as f64).ln();
    let eps = asymptotic_epsilon(n);
    Ok(1.0 - (-1.0f64).exp() * ((1.0 - eps) * l * l).powf(1.0 / l))
}

/// Relative tolerance on E[X] that [`calibrate_p`] guarantees.
pub const CALIBRATION_RTOL: f64 = 1e-9;

/// The unique p in (0,1) with E[X](p) = delta, by bisection on
/// ln E[X](p) - ln delta. E[X] increases strictly in p for k < n.
pub fn calibrate_p(n: u64, k: u64, delta: f64) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(Error::Domain(format!("need 1 <= k < n, got n={n} k={k}")));
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Domain(format!("delta={delta} must be positive")));
    }
    let ln_top = ln_binomial(n, k).expect("k <= n");
    let ln_delta = delta.ln();
    if ln_top <= ln_delta {
        return Err(Error::NoRoot(format!(
            "C({n},{k}) = {:.6e} does not exceed delta = {delta}",
            ln_top.exp()
        )));
    }
    let f = |p: f64| expected_x(&ModelParams::new(n, k, p)).ln_abs() - ln_delta;

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if let Ok(seed) = asymptotic_p(n) {
        if seed > 0.0 && seed < 1.0 {
            if f(seed) < 0.0 {
                lo = seed;
            } else {
                hi = seed;
            }
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..2000 {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            break;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let resid = f(mid);
    if resid.abs() > CALIBRATION_RTOL {
        return Err(Error::NoRoot(format!(
            "bisection stalled at p={mid} with log residual {resid:e}"
        )));
    }
    Ok(mid)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleNeighbor {
    /// P(v has exactly one neighbor in S | v has at least one)
    pub ratio: f64,
    /// (1 - ratio)^(n - n^c - k): no outside vertex qualifies
    pub no_witness: f64,
}

/// Conditional probability that a dominated vertex sees exactly one member
/// of S: k p (1-p)^(k-1) / (1 - (1-p)^k).
pub fn single_neighbor_ratio(k: u64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "p={p} makes the conditioning event degenerate"
        )));
    }
    let ep = EdgeProb::new(p);
    let num = LogReal::from_f64(k as f64 * p) * ep.pow_q((k - 1) as f64);
    Ok((num / ep.one_minus_pow_q(k as f64)).to_f64())
}

/// `(1 - ratio)^outside`, with `outside` clamped at zero.
pub fn no_witness_probability(ratio: f64, outside: f64) -> f64 {
    (1.0 - ratio).max(0.0).powf(outside.max(0.0))
}

pub fn prob_single_neighbor(params: &ModelParams) -> Result<SingleNeighbor> {
    let ratio = single_neighbor_ratio(params.k, params.p)?;
    let n = params.n as f64;
    let outside = n - n.powf(params.c) - params.k as f64;
    Ok(SingleNeighbor {
        ratio,
        no_witness: no_witness_probability(ratio, outside),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryBounds {
    /// δ(1-δ)/(1+δ)
    pub unique_lower: f64,
    /// δ/(δ+1)
    pub pz_lower_form: f64,
    /// δ
    pub markov_upper: f64,
}

pub fn corollary_bounds(delta: f64) -> Result<CorollaryBounds> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta={delta} not in (0,1)")));
    }
    Ok(CorollaryBounds {
        unique_lower: delta * (1.0 - delta) / (1.0 + delta),
        pz_lower_form: delta / (delta + 1.0),
        markov_upper: delta,
    })
}

/// Every moment quantity for one parameter set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub params: ModelParams,
    pub e_x: LogReal,
    pub e_x2: LogReal,
    pub e_n: LogReal,
    pub e_n2: LogReal,
    /// E[X]² / E[X²]
    pub pz_lower: LogReal,
    /// E[X]
    pub markov_upper: LogReal,
    /// δ(1-δ)/(1+δ)
    pub unique_lower: LogReal,
    /// δ/(δ+1)
    pub pz_lower_form: LogReal,
    /// E[N²] / E[N]², zero when E[N] = 0
    pub ratio_n: LogReal,
    pub e_x2_independent: LogReal,
    pub e_n2_independent: LogReal,
    pub pz_lower_independent: LogReal,
}

impl MomentReport {
    pub fn compute(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let e_x = expected_x(params);
        let e_x2 = expected_x2(params);
        let e_n = expected_n(params);
        let e_n2 = expected_n2(params);
        let e_x2_independent = expected_x2_independent(params);
        let bounds = corollary_bounds(params.delta)?;
        let ratio = |num: LogReal, den: LogReal| {
            if den.is_zero() {
                LogReal::ZERO
            } else {
                num / den
            }
        };
        Ok(Self {
            params: *params,
            e_x,
            e_x2,
            e_n,
            e_n2,
            pz_lower: ratio(e_x * e_x, e_x2),
            markov_upper: e_x,
            unique_lower: LogReal::from_f64(bounds.unique_lower),
            pz_lower_form: LogReal::from_f64(bounds.pz_lower_form),
            ratio_n: ratio(e_n2, e_n * e_n),
            e_x2_independent,
            e_n2_independent: expected_n2_independent(params),
            pz_lower_independent: ratio(e_x * e_x, e_x2_independent),
        })
    }

    fn entries(&self) -> Vec<(&'static str, LogReal)> {
        vec![
            ("e_x", self.e_x),
            ("e_x2", self.e_x2),
            ("e_n", self.e_n),
            ("e_n2", self.e_n2),
            ("pz_lower", self.pz_lower),
            ("markov_upper", self.markov_upper),
            ("unique_lower", self.unique_lower),
            ("pz_lower_form", self.pz_lower_form),
            ("ratio_n", self.ratio_n),
            ("e_x2_independent", self.e_x2_independent),
            ("e_n2_independent", self.e_n2_independent),
            ("pz_lower_independent", self.pz_lower_independent),
        ]
    }

    /// Flat `key,decimal,sign,log` record, parameters first.
    pub fn to_kv_text(&self) -> String {
        let p = &self.params;
        let mut s = String::from("key,decimal,sign,log\n");
        s.push_str(&format!("n,{},1,\n", p.n));
        s.push_str(&format!("k,{},1,\n", p.k));
        s.push_str(&format!("p,{:.12e},1,\n", p.p));
        s.push_str(&format!("delta,{:.12e},1,\n", p.delta));
        s.push_str(&format!("c,{:.12e},1,\n", p.c));
        for (key, v) in self.entries() {
            let log = if v.is_zero() {
                String::from("-inf")
            } else {
                format!("{:.17e}", v.ln_abs())
            };
            s.push_str(&format!("{key},{},{},{log}\n", v.to_decimal(), v.sign()));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut map = serde_json::Map::new();
        map.insert("params".into(), serde_json::to_value(self.params).expect("params"));
        for (key, v) in self.entries() {
            let mut entry = serde_json::to_value(v).expect("logreal");
            entry["decimal"] = v.to_decimal().into();
            map.insert(key.into(), entry);
        }
        serde_json::to_string_pretty(&serde_json::Value::Object(map)).expect("json")
    }
}
