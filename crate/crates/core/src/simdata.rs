//! Synthetic equicorrelated regression data and penalty calibration to a
//! target sparsity.

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::baselines::cd::{lambda_max, solve_cd, CdConfig};
use crate::error::{Result, SlogError};
use crate::kkt::kkt_check;
use crate::linalg::spd_solve;
use crate::penalty::{sign, PenaltySpec};
use crate::problem::{standardize, RegressionProblem};

#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientRule {
    /// `beta_j = (-1)^j exp(-(j - 1) / 10)` for `j = 1..p`.
    Alternating,
    Constant(f64),
    /// The first `round(fraction * p)` coefficients equal the value, the rest are zero.
    SubsetConstant { fraction: f64, value: f64 },
    UniformRange { low: f64, high: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub n: usize,
    pub p: usize,
    pub rho: f64,
    pub rule: CoefficientRule,
    pub snr: f64,
    pub seed: u64,
}

impl SimulationSpec {
    pub fn new(n: usize, p: usize, rho: f64, seed: u64) -> Self {
        Self {
            n,
            p,
            rho,
            rule: CoefficientRule::Alternating,
            snr: 3.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.p < 1 {
            return Err(SlogError::InvalidSpec(format!("need n >= 2 and p >= 1, got n = {}, p = {}", self.n, self.p)));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(SlogError::InvalidSpec(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        if !(self.snr > 0.0) || !self.snr.is_finite() {
            return Err(SlogError::InvalidSpec(format!("snr must be > 0, got {}", self.snr)));
        }
        match self.rule {
            CoefficientRule::SubsetConstant { fraction, value } if !(0.0..=1.0).contains(&fraction) || !value.is_finite() => {
                Err(SlogError::InvalidSpec("subset fraction must lie in [0, 1]".into()))
            }
            CoefficientRule::UniformRange { low, high } if !(low < high) || !low.is_finite() || !high.is_finite() => {
                Err(SlogError::InvalidSpec("uniform range needs low < high".into()))
            }
            CoefficientRule::Constant(v) if !v.is_finite() => Err(SlogError::InvalidSpec("constant must be finite".into())),
            _ => Ok(()),
        }
    }
}

/// Coefficients for the deterministic rules; `UniformRange` draws from `rng`.
pub fn coefficients<R: Rng>(rule: &CoefficientRule, p: usize, rng: &mut R) -> Array1<f64> {
    match rule {
        CoefficientRule::Alternating => Array1::from_shape_fn(p, |i| {
            let j = (i + 1) as f64;
            let s = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            s * (-(j - 1.0) / 10.0).exp()
        }),
        CoefficientRule::Constant(v) => Array1::from_elem(p, *v),
        CoefficientRule::SubsetConstant { fraction, value } => {
            let k = (fraction * p as f64).round() as usize;
            Array1::from_shape_fn(p, |j| if j < k { *value } else { 0.0 })
        }
        CoefficientRule::UniformRange { low, high } => Array1::from_shape_fn(p, |_| rng.random_range(*low..*high)),
    }
}

#[derive(Debug, Clone)]
pub struct SimulatedData {
    pub problem: RegressionProblem,
    /// Coefficients on the raw (unstandardized) scale.
    pub beta: Array1<f64>,
    pub raw_design: Array2<f64>,
    pub raw_response: Array1<f64>,
    pub noise_scale: f64,
}

/// Draws `x_ij = sqrt(rho) z_i + sqrt(1 - rho) e_ij` and
/// `y = X beta + k * noise` with `k = sd(X beta) / snr`, then standardizes.
pub fn generate(spec: &SimulationSpec) -> Result<SimulatedData> {
    spec.validate()?;
    let (n, p) = (spec.n, spec.p);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let beta = coefficients(&spec.rule, p, &mut rng);

    let (shared, own) = (spec.rho.sqrt(), (1.0 - spec.rho).sqrt());
    let mut x = Array2::<f64>::zeros((n, p));
    for mut row in x.axis_iter_mut(Axis(0)) {
        let z: f64 = rng.sample(StandardNormal);
        for v in row.iter_mut() {
            let e: f64 = rng.sample(StandardNormal);
            *v = shared * z + own * e;
        }
    }
    let signal = x.dot(&beta);
    let mean = signal.sum() / n as f64;
    let sd = (signal.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt();
    let k = sd / spec.snr;
    let y = Array1::from_shape_fn(n, |i| {
        let e: f64 = rng.sample(StandardNormal);
        signal[i] + k * e
    });

    let problem = standardize(x.view(), y.view())?;
    Ok(SimulatedData {
        problem,
        beta,
        raw_design: x,
        raw_response: y,
        noise_scale: k,
    })
}

/// Desired sparsity `s`: the solution should have `round((1 - s) min(n, p))` nonzeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsityTarget {
    pub s: f64,
}

impl SparsityTarget {
    pub fn new(s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(SlogError::InvalidSpec(format!("sparsity must lie in [0, 1], got {s}")));
        }
        Ok(Self { s })
    }

    pub fn nonzeros(&self, n: usize, p: usize) -> usize {
        ((1.0 - self.s) * n.min(p) as f64).round() as usize
    }
}

#[derive(Debug, Clone)]
pub struct Calibration {
    pub lambda: f64,
    pub nonzeros: usize,
    pub target: usize,
    /// Solution at `lambda`.
    pub solution: Array1<f64>,
    /// Every `(lambda, nonzero count)` pair evaluated during the search.
    pub evaluations: Vec<(f64, usize)>,
}

const MAX_STEPS: usize = 200;

fn count_nonzeros(b: &Array1<f64>) -> usize {
    b.iter().filter(|v| **v != 0.0).count()
}

/// Finds a penalty whose lasso solution has the target number of nonzeros
/// (within one, preferring the sparser side).
///
/// Counts come from warm-started coordinate descent inside a log-scale
/// bisection. Once a penalty with an acceptable count is found, it is moved to
/// the geometric middle of the penalty interval over which that support and
/// sign pattern stay optimal, so the returned problem sits away from the
/// breakpoints where the support changes.
pub fn calibrate_lambda(problem: &RegressionProblem, target: SparsityTarget) -> Result<Calibration> {
    let want = target.nonzeros(problem.n(), problem.p());
    let lmax = lambda_max(problem);
    let p = problem.p();
    if want == 0 || lmax == 0.0 {
        return Ok(Calibration {
            lambda: lmax,
            nonzeros: 0,
            target: want,
            solution: Array1::zeros(p),
            evaluations: vec![(lmax, 0)],
        });
    }

    let mut evaluations = Vec::new();
    let mut warm = Array1::<f64>::zeros(p);
    let eval = |lam: f64, warm: &mut Array1<f64>, evals: &mut Vec<(f64, usize)>| -> Result<Array1<f64>> {
        let b = certified_solution(problem, lam, warm)?;
        evals.push((lam, count_nonzeros(&b)));
        *warm = b.clone();
        Ok(b)
    };

    let mut best: Option<(f64, Array1<f64>)> = None;
    let consider = |lam: f64, b: &Array1<f64>, best: &mut Option<(f64, Array1<f64>)>| {
        let c = count_nonzeros(b);
        let score = |c: usize| -> (usize, usize) {
            // Exact first, then the sparser neighbour, then the denser one.
            let off = c.abs_diff(want);
            (off, usize::from(c > want))
        };
        if c.abs_diff(want) <= 1 && best.as_ref().is_none_or(|(_, bb)| score(c) < score(count_nonzeros(bb))) {
            *best = Some((lam, b.clone()));
        }
    };
    let exact = |best: &Option<(f64, Array1<f64>)>| best.as_ref().is_some_and(|(_, b)| count_nonzeros(b) == want);

    // Bracket: hi has too few nonzeros, lo enough.
    let mut hi = lmax;
    let mut lo = lmax;
    let mut bracketed = false;
    let mut steps = 0;
    while steps < MAX_STEPS {
        lo *= 0.5;
        steps += 1;
        let b = eval(lo, &mut warm, &mut evaluations)?;
        consider(lo, &b, &mut best);
        if count_nonzeros(&b) >= want {
            bracketed = true;
            break;
        }
        hi = lo;
        if lo < lmax * 1e-12 {
            break;
        }
    }

    if bracketed {
        while steps < MAX_STEPS && !exact(&best) && hi / lo - 1.0 > 1e-10 {
            let mid = (lo * hi).sqrt();
            let b = eval(mid, &mut warm, &mut evaluations)?;
            steps += 1;
            consider(mid, &b, &mut best);
            if count_nonzeros(&b) >= want {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    let Some((lam, b)) = best else {
        let closest = evaluations
            .iter()
            .map(|(_, c)| *c)
            .min_by_key(|c| c.abs_diff(want))
            .unwrap_or(0);
        return Err(SlogError::Unachievable { target: want, achieved: closest });
    };

    let (lambda, solution) = center_in_support_interval(problem, lam, &b, lmax).unwrap_or((lam, b));
    let nonzeros = count_nonzeros(&solution);
    Ok(Calibration {
        lambda,
        nonzeros,
        target: want,
        solution,
        evaluations,
    })
}

const CD_ROUND: usize = 2_000;
const CD_ROUNDS: usize = 100;

/// Lasso solution at `lam` for counting purposes: coordinate descent in
/// rounds, after each of which the support is re-solved exactly and accepted
/// once it passes a tight KKT check. Falls back to the plain CD iterate.
fn certified_solution(problem: &RegressionProblem, lam: f64, warm: &Array1<f64>) -> Result<Array1<f64>> {
    let mut b = warm.clone();
    for _ in 0..CD_ROUNDS {
        let cfg = CdConfig {
            start: Some(b.clone()),
            objective_tol: 1e-14,
            max_sweeps: CD_ROUND,
            ..CdConfig::single(lam)
        };
        let converged = match solve_cd(problem, lam, &cfg, None) {
            Ok(r) => {
                b = r.coefficients;
                true
            }
            Err(SlogError::NotConverged(r)) => {
                b = r.coefficients;
                false
            }
            Err(e) => return Err(e),
        };
        let peak = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for cutoff in [0.0, 1e-9, 1e-6, 1e-3] {
            if let Some(x) = solve_on_support(problem, lam, &b, cutoff * peak) {
                return Ok(x);
            }
        }
        if converged {
            break;
        }
    }
    Ok(b)
}

/// Solves the stationarity equations on `{j : |b_j| > cutoff}` with the signs
/// of `b`, keeping the result only if it is sign-consistent and KKT-certified.
fn solve_on_support(problem: &RegressionProblem, lam: f64, b: &Array1<f64>, cutoff: f64) -> Option<Array1<f64>> {
    let support: Vec<usize> = (0..b.len()).filter(|&j| b[j].abs() > cutoff).collect();
    if support.len() >= problem.n() {
        return None;
    }
    let mut out = Array1::zeros(b.len());
    if !support.is_empty() {
        let gaa = problem.gram().select(Axis(0), &support).select(Axis(1), &support);
        let xty = problem.xty();
        let rhs: Array1<f64> = support.iter().map(|&j| xty[j] - lam * sign(b[j])).collect();
        let sol = spd_solve(gaa, &rhs).ok()?;
        for (r, &j) in support.iter().enumerate() {
            if sign(sol[r]) != sign(b[j]) {
                return None;
            }
            out[j] = sol[r];
        }
    }
    let rep = kkt_check(problem, &PenaltySpec::lasso(lam), out.view(), 1e-9).ok()?;
    rep.is_optimal().then_some(out)
}

/// On a fixed support `A` with signs `s`, the solution is
/// `b_A(l) = G_AA^{-1} (X_A^T y - l s)`, linear in the penalty. This finds the
/// penalty range over which that stays sign-consistent and KKT-feasible and
/// returns the solution at its geometric midpoint.
fn center_in_support_interval(problem: &RegressionProblem, lam: f64, b: &Array1<f64>, lmax: f64) -> Option<(f64, Array1<f64>)> {
    let support: Vec<usize> = (0..b.len()).filter(|&j| b[j] != 0.0).collect();
    if support.is_empty() || support.len() >= problem.n() {
        return None;
    }
    let gram = problem.gram();
    let xty = problem.xty();
    let gaa = gram.select(Axis(0), &support).select(Axis(1), &support);
    let signs: Array1<f64> = support.iter().map(|&j| sign(b[j])).collect();
    let rhs: Array1<f64> = support.iter().map(|&j| xty[j]).collect();
    let u = spd_solve(gaa.clone(), &rhs).ok()?;
    let v = spd_solve(gaa, &signs).ok()?;

    // Collect constraints alpha + beta * l > 0.
    let mut low = 0.0f64;
    let mut high = lmax;
    let mut add = |alpha: f64, beta: f64| {
        if beta > 0.0 {
            low = low.max(-alpha / beta);
        } else if beta < 0.0 {
            high = high.min(-alpha / beta);
        } else if alpha < 0.0 {
            high = -1.0;
        }
    };
    for (r, _) in support.iter().enumerate() {
        // s_r (u_r - l v_r) > 0
        add(signs[r] * u[r], -signs[r] * v[r]);
    }
    let in_support = {
        let mut mask = vec![false; b.len()];
        support.iter().for_each(|&j| mask[j] = true);
        mask
    };
    for j in (0..b.len()).filter(|&j| !in_support[j]) {
        let row = gram.row(j);
        let gu: f64 = support.iter().zip(u.iter()).map(|(&k, uk)| row[k] * uk).sum();
        let gv: f64 = support.iter().zip(v.iter()).map(|(&k, vk)| row[k] * vk).sum();
        // g_j(l) = (xty_j - gu) + l gv must satisfy |g_j(l)| <= l.
        let a = xty[j] - gu;
        add(-a, 1.0 - gv);
        add(a, 1.0 + gv);
    }
    if !(high > low) || !(lam >= low && lam <= high) {
        return None;
    }
    let floor = low.max(high * 0.1);
    let mid = (floor * high).sqrt();
    let mut out = Array1::zeros(b.len());
    for (r, &j) in support.iter().enumerate() {
        out[j] = u[r] - mid * v[r];
    }
    let rep = kkt_check(problem, &PenaltySpec::lasso(mid), out.view(), 1e-8).ok()?;
    if !rep.is_optimal() || count_nonzeros(&out) != support.len() {
        return None;
    }
    Some((mid, out))
}
