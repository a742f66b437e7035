//! Finite-size extrapolation λ₀(L) = λ₀ + A·exp(−L·B) by damped Gauss-Newton.

use nalgebra::{Matrix3, Vector3};

use crate::units::EnergyUnit;
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSeries {
    /// (L, λ₀(L)), L strictly increasing.
    pub points: Vec<(f64, f64)>,
    pub unit: EnergyUnit,
}

impl ScalingSeries {
    pub fn new(points: Vec<(f64, f64)>, unit: EnergyUnit) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "a scaling series needs at least 3 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|(l, y)| !l.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidParameter("non-finite point in scaling series".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter("supercell sizes must be strictly increasing".into()));
        }
        Ok(Self { points, unit })
    }

    /// Two whitespace- or comma-separated columns. `#` starts a comment; a
    /// comment of the form `# unit = GHz` tags the value column (default meV).
    pub fn parse(text: &str) -> Result<Self> {
        let mut unit = EnergyUnit::MeV;
        let mut points = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once('=') {
                    if k.trim().eq_ignore_ascii_case("unit") {
                        unit = v.trim().parse()?;
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let bad = || Error::Dataset {
                line: no + 1,
                msg: format!("expected two numeric columns, got '{line}'"),
            };
            if cols.len() != 2 {
                return Err(bad());
            }
            let l: f64 = cols[0].parse().map_err(|_| bad())?;
            let y: f64 = cols[1].parse().map_err(|_| bad())?;
            points.push((l, y));
        }
        Self::new(points, unit)
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }
}

pub fn model(l: f64, lambda0_inf: f64, a: f64, b: f64) -> f64 {
    lambda0_inf + a * (-l * b).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub lambda0_inf: f64,
    pub a: f64,
    pub b: f64,
    pub unit: EnergyUnit,
    /// data − model per point.
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// Residual-based standard errors of (λ₀, A, B); None with ≤ 3 points.
    pub stderr: Option<[f64; 3]>,
    /// (JᵀJ)⁻¹ at the solution; None when singular.
    pub covariance_unscaled: Option<Matrix3<f64>>,
    /// Cost ½·rss after the initial guess and every accepted step.
    pub cost_history: Vec<f64>,
    /// Set when A = 0, so the data say nothing about B.
    pub b_indeterminate: bool,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    /// Standard errors for a known per-point noise level σ.
    pub fn stderr_known_noise(&self, sigma: f64) -> Option<[f64; 3]> {
        let c = self.covariance_unscaled?;
        Some([0, 1, 2].map(|i| sigma * c[(i, i)].max(0.0).sqrt()))
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

fn residuals(l: &[f64], y: &[f64], p: &Vector3<f64>) -> Vec<f64> {
    l.iter().zip(y).map(|(&l, &y)| y - model(l, p[0], p[1], p[2])).collect()
}

fn cost(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

/// JᵀJ and Jᵀr for the model Jacobian ∂model/∂(λ₀, A, B).
fn normal_equations(l: &[f64], r: &[f64], p: &Vector3<f64>) -> (Matrix3<f64>, Vector3<f64>) {
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for (&l, &ri) in l.iter().zip(r) {
        let e = (-l * p[2]).exp();
        let j = Vector3::new(1.0, e, -p[1] * l * e);
        jtj += j * j.transpose();
        jtr += j * ri;
    }
    (jtj, jtr)
}

fn initial_guess(l: &[f64], y: &[f64]) -> Vector3<f64> {
    let last = y[y.len() - 1];
    let fallback = 1.0 / (l[l.len() - 1] - l[0]);
    let ratio = (y[0] - y[1]) / (y[1] - y[2]);
    let b = ratio.ln() / (0.5 * (l[2] - l[0]));
    let b = if b.is_finite() && b > 0.0 { b } else { fallback };
    Vector3::new(last, y[0] - last, b)
}

fn finish(
    l: &[f64],
    y: &[f64],
    p: Vector3<f64>,
    unit: EnergyUnit,
    cost_history: Vec<f64>,
    iterations: usize,
    converged: bool,
) -> FitResult {
    let r = residuals(l, y, &p);
    let rss = r.iter().map(|v| v * v).sum::<f64>();
    let (jtj, _) = normal_equations(l, &r, &p);
    let covariance_unscaled = jtj.try_inverse();
    let n = l.len();
    let stderr = match covariance_unscaled {
        Some(c) if n > 3 => {
            let s2 = rss / (n - 3) as f64;
            Some([0, 1, 2].map(|i| (s2 * c[(i, i)]).max(0.0).sqrt()))
        }
        _ => None,
    };
    FitResult {
        lambda0_inf: p[0],
        a: p[1],
        b: p[2],
        unit,
        residuals: r,
        rss,
        stderr,
        covariance_unscaled,
        cost_history,
        b_indeterminate: false,
        iterations,
        converged,
    }
}

pub fn fit_finite_size(series: &ScalingSeries) -> Result<FitResult> {
    let l = series.lengths();
    let y = series.values();
    let n = y.len();
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);

    let mean = y.iter().sum::<f64>() / n as f64;
    if y.iter().all(|v| (v - mean).abs() <= 1e-12 * scale) {
        let r: Vec<f64> = y.iter().map(|v| v - mean).collect();
        let rss = r.iter().map(|v| v * v).sum();
        return Ok(FitResult {
            lambda0_inf: mean,
            a: 0.0,
            b: 0.0,
            unit: series.unit,
            residuals: r,
            rss,
            stderr: None,
            covariance_unscaled: None,
            cost_history: vec![0.5 * rss],
            b_indeterminate: true,
            iterations: 0,
            converged: true,
        });
    }

    let mut p = initial_guess(&l, &y);
    let mut r = residuals(&l, &y, &p);
    let mut c = cost(&r);
    let mut history = vec![c];
    let mut mu = 1e-3;
    let floor = 0.5 * (1e-15 * scale).powi(2) * n as f64;

    for it in 1..=MAX_ITERATIONS {
        if c <= floor {
            return Ok(finish(&l, &y, p, series.unit, history, it - 1, true));
        }
        let (jtj, jtr) = normal_equations(&l, &r, &p);
        let mut damped = jtj;
        for i in 0..3 {
            damped[(i, i)] += mu * jtj[(i, i)].max(1e-300);
        }
        let step = match damped.cholesky() {
            Some(ch) => ch.solve(&jtr),
            None => {
                mu *= 10.0;
                continue;
            }
        };
        let trial = p + step;
        let tr = residuals(&l, &y, &trial);
        let tc = cost(&tr);
        if tc.is_finite() && tc < c {
            let rel = (c - tc) / c;
            let small_step = step.norm() <= 1e-14 * (p.norm() + 1e-14);
            p = trial;
            r = tr;
            c = tc;
            history.push(c);
            mu = (mu / 3.0).max(1e-12);
            if rel < 1e-14 || small_step {
                return Ok(finish(&l, &y, p, series.unit, history, it, true));
            }
        } else {
            mu *= 4.0;
            if mu > 1e16 {
                // no downhill step exists at machine precision: a minimum
                return Ok(finish(&l, &y, p, series.unit, history, it, true));
            }
        }
    }

    let best = finish(&l, &y, p, series.unit, history, MAX_ITERATIONS, false);
    Err(Error::NotConverged {
        iterations: MAX_ITERATIONS,
        best_cost: c,
        best: Box::new(best),
    })
}
