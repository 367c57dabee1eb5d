//! Peak, zero-crossing and period extraction from sampled series, and
//! least-squares fits of a small family of closed-form trend models.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Local maxima of a sampled series, refined between grid points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakList {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Grid index of each raw maximum.
    pub indices: Vec<usize>,
}

impl PeakList {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_series(times: &[f64], values: &[f64], min_len: usize) -> Result<()> {
    if times.len() != values.len() {
        return Err(Error::invalid(format!(
            "series has {} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if times.len() < min_len {
        return Err(Error::invalid(format!(
            "series needs at least {min_len} samples, got {}",
            times.len()
        )));
    }
    if times.iter().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::invalid("series has non-finite entries"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("series times must be strictly ascending"));
    }
    Ok(())
}

/// Vertex of the parabola through three points, or the middle point if they
/// are collinear.
fn parabola_vertex(t: [f64; 3], v: [f64; 3]) -> (f64, f64) {
    let (h0, h1) = (t[1] - t[0], t[2] - t[1]);
    let s0 = (v[1] - v[0]) / h0;
    let s1 = (v[2] - v[1]) / h1;
    let curvature = (s1 - s0) / (t[2] - t[0]);
    if curvature == 0.0 {
        return (t[1], v[1]);
    }
    // v(t) = v1 + slope (t - t1) + curvature (t - t1)^2
    let slope = s0 + curvature * h0;
    let dt = -slope / (2.0 * curvature);
    (t[1] + dt, v[1] + slope * dt + curvature * dt * dt)
}

/// Interior samples strictly greater than both neighbours, each refined by
/// three-point parabolic interpolation.
pub fn local_maxima(times: &[f64], values: &[f64]) -> Result<PeakList> {
    check_series(times, values, 3)?;
    let mut out = PeakList::default();
    for i in 1..values.len() - 1 {
        if values[i] > values[i - 1] && values[i] > values[i + 1] {
            let (t, v) = parabola_vertex(
                [times[i - 1], times[i], times[i + 1]],
                [values[i - 1], values[i], values[i + 1]],
            );
            out.times.push(t);
            out.values.push(v.max(values[i]));
            out.indices.push(i);
        }
    }
    Ok(out)
}

/// Local minima, via maxima of the negated series.
pub fn local_minima(times: &[f64], values: &[f64]) -> Result<PeakList> {
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    let mut peaks = local_maxima(times, &negated)?;
    for v in &mut peaks.values {
        *v = -*v;
    }
    Ok(peaks)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub time: f64,
    /// True when the series goes from negative to positive.
    pub rising: bool,
}

/// Sign changes of a sampled series located by linear interpolation. Samples
/// with `|v| <= noise` carry no sign and are skipped, so a series that only
/// touches zero produces no crossing.
pub fn zero_crossings(times: &[f64], values: &[f64], noise: f64) -> Result<Vec<Crossing>> {
    check_series(times, values, 2)?;
    let mut out = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for (&t, &v) in times.iter().zip(values) {
        if v.abs() <= noise {
            continue;
        }
        if let Some((t0, v0)) = last {
            if (v0 < 0.0) != (v < 0.0) {
                let time = t0 + (t - t0) * v0 / (v0 - v);
                out.push(Crossing {
                    time,
                    rising: v > 0.0,
                });
            }
        }
        last = Some((t, v));
    }
    Ok(out)
}

/// Root of `f` in `[a, b]` by bisection, assuming a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Least-squares slope of `t_k = offset_g + P k` with one offset per group.
fn shared_slope(groups: &[Vec<f64>]) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for g in groups.iter().filter(|g| g.len() >= 2) {
        let n = g.len() as f64;
        let k_mean = (n - 1.0) / 2.0;
        let t_mean = g.iter().sum::<f64>() / n;
        for (k, t) in g.iter().enumerate() {
            let dk = k as f64 - k_mean;
            num += dk * (t - t_mean);
            den += dk * dk;
        }
    }
    (den > 0.0).then(|| num / den)
}

/// Period as the spacing between successive crossings in the same direction,
/// fitted by least squares over all of them.
pub fn period_from_crossings(crossings: &[Crossing]) -> Result<f64> {
    let rising: Vec<f64> = crossings.iter().filter(|c| c.rising).map(|c| c.time).collect();
    let falling: Vec<f64> = crossings.iter().filter(|c| !c.rising).map(|c| c.time).collect();
    shared_slope(&[rising, falling]).ok_or_else(|| {
        Error::NotEnoughData(format!(
            "need two crossings in the same direction, found {}",
            crossings.len()
        ))
    })
}

/// Period as the least-squares spacing of successive peak times.
pub fn period_from_peaks(peaks: &PeakList) -> Result<f64> {
    shared_slope(std::slice::from_ref(&peaks.times)).ok_or_else(|| {
        Error::NotEnoughData(format!("need two peaks, found {}", peaks.len()))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodMethod {
    ZeroCrossings,
    PeakSpacing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodEstimate {
    pub period: f64,
    pub method: PeriodMethod,
}

/// Period from the zero crossings of `indicator` (e.g. a determinant), or,
/// if it changes sign fewer than twice in one direction, from the peaks of
/// `signal`.
pub fn oscillation_period(
    times: &[f64],
    indicator: &[f64],
    noise: f64,
    signal: &[f64],
) -> Result<PeriodEstimate> {
    let crossings = zero_crossings(times, indicator, noise)?;
    if let Ok(period) = period_from_crossings(&crossings) {
        return Ok(PeriodEstimate {
            period,
            method: PeriodMethod::ZeroCrossings,
        });
    }
    let peaks = local_maxima(times, signal)?;
    Ok(PeriodEstimate {
        period: period_from_peaks(&peaks)?,
        method: PeriodMethod::PeakSpacing,
    })
}

/// First time a nonnegative series returns to `<= tol` after having exceeded
/// it, linearly interpolated between the bracketing samples.
pub fn first_zero_time(times: &[f64], values: &[f64], tol: f64) -> Result<Option<f64>> {
    check_series(times, values, 1)?;
    let Some(onset) = values.iter().position(|&v| v > tol) else {
        return Ok(None);
    };
    for i in onset + 1..values.len() {
        if values[i] <= tol {
            let (v0, v1) = (values[i - 1], values[i]);
            let frac = (v0 - tol) / (v0 - v1);
            return Ok(Some(times[i - 1] + frac * (times[i] - times[i - 1])));
        }
    }
    Ok(None)
}

/// Trend models with analytic derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitModel {
    /// `b ln(c x + d)`
    LogGrowth,
    /// `1 / (e sqrt(x) + f)`
    InverseSqrt,
    /// `b exp(-c sqrt(x))`
    ExpSqrtAlpha,
    /// `a + b exp(-c x)`
    OffsetExp,
    /// `a exp(-b x)`
    PureExp,
    /// `a + 1 / (b + c sqrt(x))`
    OffsetInverseSqrt,
}

impl FitModel {
    pub const ALL: [FitModel; 6] = [
        FitModel::LogGrowth,
        FitModel::InverseSqrt,
        FitModel::ExpSqrtAlpha,
        FitModel::OffsetExp,
        FitModel::PureExp,
        FitModel::OffsetInverseSqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FitModel::LogGrowth => "log_growth",
            FitModel::InverseSqrt => "inverse_sqrt",
            FitModel::ExpSqrtAlpha => "exp_sqrt",
            FitModel::OffsetExp => "offset_exp",
            FitModel::PureExp => "pure_exp",
            FitModel::OffsetInverseSqrt => "offset_inverse_sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn formula(self) -> &'static str {
        match self {
            FitModel::LogGrowth => "b*ln(c*x + d)",
            FitModel::InverseSqrt => "1/(e*sqrt(x) + f)",
            FitModel::ExpSqrtAlpha => "b*exp(-c*sqrt(x))",
            FitModel::OffsetExp => "a + b*exp(-c*x)",
            FitModel::PureExp => "a*exp(-b*x)",
            FitModel::OffsetInverseSqrt => "a + 1/(b + c*sqrt(x))",
        }
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            FitModel::LogGrowth => &["b", "c", "d"],
            FitModel::InverseSqrt => &["e", "f"],
            FitModel::ExpSqrtAlpha => &["b", "c"],
            FitModel::OffsetExp => &["a", "b", "c"],
            FitModel::PureExp => &["a", "b"],
            FitModel::OffsetInverseSqrt => &["a", "b", "c"],
        }
    }

    pub fn arity(self) -> usize {
        self.parameter_names().len()
    }

    pub fn eval(self, x: f64, p: &[f64]) -> f64 {
        match self {
            FitModel::LogGrowth => p[0] * (p[1] * x + p[2]).ln(),
            FitModel::InverseSqrt => 1.0 / (p[0] * x.sqrt() + p[1]),
            FitModel::ExpSqrtAlpha => p[0] * (-p[1] * x.sqrt()).exp(),
            FitModel::OffsetExp => p[0] + p[1] * (-p[2] * x).exp(),
            FitModel::PureExp => p[0] * (-p[1] * x).exp(),
            FitModel::OffsetInverseSqrt => p[0] + 1.0 / (p[1] + p[2] * x.sqrt()),
        }
    }

    /// Partial derivatives with respect to each parameter, written to `out`.
    pub fn gradient(self, x: f64, p: &[f64], out: &mut [f64]) {
        match self {
            FitModel::LogGrowth => {
                let u = p[1] * x + p[2];
                out[0] = u.ln();
                out[1] = p[0] * x / u;
                out[2] = p[0] / u;
            }
            FitModel::InverseSqrt => {
                let s = x.sqrt();
                let u = p[0] * s + p[1];
                let inv2 = 1.0 / (u * u);
                out[0] = -s * inv2;
                out[1] = -inv2;
            }
            FitModel::ExpSqrtAlpha => {
                let s = x.sqrt();
                let e = (-p[1] * s).exp();
                out[0] = e;
                out[1] = -p[0] * s * e;
            }
            FitModel::OffsetExp => {
                let e = (-p[2] * x).exp();
                out[0] = 1.0;
                out[1] = e;
                out[2] = -p[1] * x * e;
            }
            FitModel::PureExp => {
                let e = (-p[1] * x).exp();
                out[0] = e;
                out[1] = -p[0] * x * e;
            }
            FitModel::OffsetInverseSqrt => {
                let s = x.sqrt();
                let u = p[1] + p[2] * s;
                let inv2 = 1.0 / (u * u);
                out[0] = 1.0;
                out[1] = -inv2;
                out[2] = -s * inv2;
            }
        }
    }

    /// Starting point for the iterative solver.
    pub fn initial_guess(self, xs: &[f64], ys: &[f64]) -> Vec<f64> {
        match self {
            FitModel::LogGrowth => guess_log_growth(xs, ys),
            FitModel::InverseSqrt => {
                let inv: Vec<(f64, f64)> = xs
                    .iter()
                    .zip(ys)
                    .filter(|(_, y)| y.abs() > 0.0)
                    .map(|(x, y)| (x.sqrt(), 1.0 / y))
                    .collect();
                line_fit(&inv).map_or(vec![0.0, 1.0], |(f, e)| vec![e, f])
            }
            FitModel::ExpSqrtAlpha => {
                let logs: Vec<(f64, f64)> = xs
                    .iter()
                    .zip(ys)
                    .filter(|(_, y)| **y > 0.0)
                    .map(|(x, y)| (x.sqrt(), y.ln()))
                    .collect();
                line_fit(&logs).map_or(vec![1.0, 0.0], |(a, b)| vec![a.exp(), -b])
            }
            FitModel::PureExp => {
                let logs: Vec<(f64, f64)> = xs
                    .iter()
                    .zip(ys)
                    .filter(|(_, y)| **y > 0.0)
                    .map(|(x, y)| (*x, y.ln()))
                    .collect();
                line_fit(&logs).map_or(vec![1.0, 0.0], |(a, b)| vec![a.exp(), -b])
            }
            FitModel::OffsetExp => guess_offset_exp(xs, ys),
            FitModel::OffsetInverseSqrt => guess_offset_inverse_sqrt(xs, ys),
        }
    }
}

/// Ordinary least-squares line `y = a + b x`; `None` if degenerate.
fn line_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let b = sxy / sxx;
    Some((my - b * mx, b))
}

/// Best `(a, b, rss)` for `y = a + b g(x)` over the given basis values.
fn linear_in_basis(basis: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = basis.iter().copied().zip(ys.iter().copied()).collect();
    let (a, b) = line_fit(&pts)?;
    let rss = pts.iter().map(|(g, y)| (a + b * g - y).powi(2)).sum();
    Some((a, b, rss))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (l, h) = (lo.ln(), hi.ln());
    (0..n).map(move |k| (l + (h - l) * k as f64 / (n - 1) as f64).exp())
}

fn guess_log_growth(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    // y = A + b ln(x + s) with c = exp(A / b), d = s c.
    let xmin = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let span = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - xmin;
    let scale = span.abs().max(xmin.abs()).max(1e-6);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in log_grid(1e-4 * scale, 1e3 * scale, 141) {
        let shift = s - xmin.min(0.0);
        let basis: Vec<f64> = xs.iter().map(|x| (x + shift).ln()).collect();
        if let Some((a, b, rss)) = linear_in_basis(&basis, ys) {
            if b == 0.0 {
                continue;
            }
            let c = (a / b).exp();
            if !c.is_finite() || c == 0.0 {
                continue;
            }
            let p = vec![b, c, shift * c];
            if best.as_ref().is_none_or(|(r, _)| rss < *r) {
                best = Some((rss, p));
            }
        }
    }
    best.map_or(vec![1.0, 1.0, 1.0], |b| b.1)
}

fn guess_offset_exp(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let xmin = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let span = (xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - xmin).max(1e-12);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for c in log_grid(1e-3 / span, 1e3 / span, 181) {
        let basis: Vec<f64> = xs.iter().map(|x| (-c * x).exp()).collect();
        if let Some((a, b, rss)) = linear_in_basis(&basis, ys) {
            if best.as_ref().is_none_or(|(r, _)| rss < *r) {
                best = Some((rss, vec![a, b, c]));
            }
        }
    }
    best.map_or(vec![0.0, 1.0, 1.0 / span], |b| b.1)
}

fn guess_offset_inverse_sqrt(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    // y = a + k / (r + sqrt(x)) with c = 1/k, b = r/k; r must keep the
    // denominator positive on the data.
    let umin = xs.iter().map(|x| x.sqrt()).fold(f64::INFINITY, f64::min);
    let umax = xs.iter().map(|x| x.sqrt()).fold(f64::NEG_INFINITY, f64::max);
    let scale = umax.max(1e-6);
    let mut rs: Vec<f64> = log_grid(1e-4 * scale, 1e3 * scale, 121)
        .map(|d| d - umin)
        .collect();
    rs.extend((1..20).map(|k| -umin * k as f64 / 20.0));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in rs {
        let basis: Vec<f64> = xs.iter().map(|x| 1.0 / (r + x.sqrt())).collect();
        if basis.iter().any(|b| !b.is_finite()) {
            continue;
        }
        if let Some((a, k, rss)) = linear_in_basis(&basis, ys) {
            if k == 0.0 {
                continue;
            }
            if best.as_ref().is_none_or(|(q, _)| rss < *q) {
                best = Some((rss, vec![a, r / k, 1.0 / k]));
            }
        }
    }
    best.map_or(vec![0.0, 1.0, 1.0], |b| b.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: FitModel,
    /// `(name, value)` in the model's parameter order.
    pub coefficients: Vec<(&'static str, f64)>,
    /// `max |f(x) - y| / |y|` over points with `|y| > 1e-12`.
    pub max_relative_error: f64,
    pub rss: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn values(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.1).collect()
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.coefficients.iter().find(|c| c.0 == name).map(|c| c.1)
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.model.eval(x, &self.values())
    }
}

pub const MAX_ITERATIONS: usize = 200;
pub const GRADIENT_TOL: f64 = 1e-10;

/// Points with `|y|` at or below this are left out of the relative error.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-12;

fn rss(model: FitModel, xs: &[f64], ys: &[f64], p: &[f64]) -> f64 {
    let s: f64 = xs.iter().zip(ys).map(|(x, y)| (model.eval(*x, p) - y).powi(2)).sum();
    if s.is_finite() {
        s
    } else {
        f64::INFINITY
    }
}

/// Jacobian and residual vector at `p`.
fn linearize(model: FitModel, xs: &[f64], ys: &[f64], p: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
    let k = model.arity();
    let mut jac = DMatrix::zeros(xs.len(), k);
    let mut res = DVector::zeros(xs.len());
    let mut g = vec![0.0; k];
    for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
        model.gradient(*x, p, &mut g);
        for (j, gj) in g.iter().enumerate() {
            jac[(i, j)] = *gj;
        }
        res[i] = model.eval(*x, p) - y;
    }
    (jac, res)
}

/// Levenberg-Marquardt least squares. Stops when `|Jᵀr| < GRADIENT_TOL`, when
/// no damped step lowers the residual any more, or after `MAX_ITERATIONS`;
/// only the last case reports `converged = false`. Without an `initial`
/// guess the model's heuristic is used.
pub fn fit(model: FitModel, xs: &[f64], ys: &[f64], initial: Option<&[f64]>) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("x and y differ in length"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("fit data has non-finite values"));
    }
    let k = model.arity();
    if xs.len() < k + 1 {
        return Err(Error::NotEnoughData(format!(
            "{} needs at least {} points, got {}",
            model.name(),
            k + 1,
            xs.len()
        )));
    }
    let mut p = match initial {
        Some(init) if init.len() != k => {
            return Err(Error::invalid(format!(
                "{} takes {k} coefficients, got {}",
                model.name(),
                init.len()
            )))
        }
        Some(init) => init.to_vec(),
        None => model.initial_guess(xs, ys),
    };

    let mut current = rss(model, xs, ys, &p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jac, res) = linearize(model, xs, ys, &p);
        let grad = jac.transpose() * &res;
        if !grad.iter().all(|g| g.is_finite()) {
            break;
        }
        if grad.norm() < GRADIENT_TOL {
            converged = true;
            break;
        }
        let jtj = jac.transpose() * &jac;
        let mut stepped = false;
        while lambda <= 1e16 {
            let mut a = jtj.clone();
            for d in 0..k {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(delta) = a.lu().solve(&(-&grad)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = p.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            let trial_rss = rss(model, xs, ys, &trial);
            if trial_rss < current {
                p = trial;
                current = trial_rss;
                lambda = (lambda / 10.0).max(1e-12);
                stepped = true;
                break;
            }
            lambda *= 10.0;
        }
        if !stepped {
            converged = current.is_finite();
            break;
        }
    }

    let max_relative_error = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| y.abs() > RELATIVE_ERROR_FLOOR)
        .map(|(x, y)| ((model.eval(*x, &p) - y) / y).abs())
        .fold(0.0_f64, |m, e| if e.is_nan() { f64::INFINITY } else { m.max(e) });
    Ok(FitResult {
        model,
        coefficients: model.parameter_names().iter().copied().zip(p).collect(),
        max_relative_error,
        rss: current,
        converged: converged && max_relative_error.is_finite(),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(a: f64, b: f64, dt: f64) -> Vec<f64> {
        let n = ((b - a) / dt).round() as usize;
        (0..=n).map(|k| a + dt * k as f64).collect()
    }

    #[test]
    fn sine_peaks() {
        let t = grid(0.0, 4.0 * std::f64::consts::PI, 0.01);
        let v: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let p = local_maxima(&t, &v).unwrap();
        assert_eq!(p.len(), 2);
        assert_abs_diff_eq!(p.times[0], std::f64::consts::FRAC_PI_2, epsilon = 1e-4);
        assert_abs_diff_eq!(p.times[1], 2.5 * std::f64::consts::PI, epsilon = 1e-4);
        assert_abs_diff_eq!(p.values[0], 1.0, epsilon = 1e-4);
    }

    #[test]
    fn monotone_and_constant_have_no_peaks() {
        let t = grid(0.0, 1.0, 0.1);
        assert!(local_maxima(&t, &t).unwrap().is_empty());
        assert!(local_maxima(&t, &vec![2.0; t.len()]).unwrap().is_empty());
        assert!(local_maxima(&t[..2], &t[..2]).is_err());
    }

    #[test]
    fn sinusoid_period() {
        let period = 2.7;
        let t = grid(0.0, 20.0, 0.01);
        let v: Vec<f64> = t.iter().map(|x| (2.0 * std::f64::consts::PI * x / period + 0.3).sin()).collect();
        let est = oscillation_period(&t, &v, 0.0, &v).unwrap();
        assert_eq!(est.method, PeriodMethod::ZeroCrossings);
        assert!((est.period / period - 1.0).abs() < 1e-3);
        let peaks = local_maxima(&t, &v).unwrap();
        assert!((period_from_peaks(&peaks).unwrap() / period - 1.0).abs() < 1e-3);
    }

    #[test]
    fn touching_zero_is_not_a_crossing() {
        let t = grid(0.0, 10.0, 0.01);
        let v: Vec<f64> = t.iter().map(|x| x.sin().powi(2)).collect();
        assert!(zero_crossings(&t, &v, 1e-12).unwrap().is_empty());
        let est = oscillation_period(&t, &v, 1e-12, &v).unwrap();
        assert_eq!(est.method, PeriodMethod::PeakSpacing);
        assert!((est.period - std::f64::consts::PI).abs() < 1e-3);
    }

    #[test]
    fn first_zero() {
        let t = grid(0.0, 3.0, 0.5);
        let v = [0.0, 1.0, 2.0, 1.0, 0.0, 0.0, 1.0];
        assert_abs_diff_eq!(first_zero_time(&t, &v, 1e-10).unwrap().unwrap(), 2.0, epsilon = 1e-9);
        assert_eq!(first_zero_time(&t, &[0.0; 7], 1e-10).unwrap(), None);
    }

    #[test]
    fn bisection_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert_abs_diff_eq!(r, 2f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn names_round_trip() {
        for m in FitModel::ALL {
            assert_eq!(FitModel::from_name(m.name()), Some(m));
        }
        assert_eq!(FitModel::from_name("nope"), None);
    }

    #[test]
    fn log_growth_round_trip() {
        let xs: Vec<f64> = (1..=40).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * (2.0 * x + 0.9).ln()).collect();
        let r = fit(FitModel::LogGrowth, &xs, &ys, None).unwrap();
        assert!(r.converged);
        let p = r.values();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(p[1], 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p[2], 0.9, epsilon = 1e-6);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            fit(FitModel::OffsetExp, &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], None),
            Err(Error::NotEnoughData(_))
        ));
    }
}
