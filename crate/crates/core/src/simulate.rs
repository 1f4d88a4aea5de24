//! Finite-size stochastic simulation of the two communities.
//!
//! Each oscillator obeys
//!
//! ```text
//! dθ = [K/(2N) Σ_own sin(θ' - θ) + L/(2N) Σ_other sin(θ' - θ)] dt + dW
//! ```
//!
//! The sums collapse to the complex order parameters `Z = (1/N) Σ e^{iθ}`, so a
//! step costs `O(N)`. Integration is Euler–Maruyama.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::Coupling;

/// Largest accepted time step.
pub const MAX_DT: f64 = 0.05;

/// Initial phase distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    /// Independent uniform phases.
    Uniform,
    /// Every oscillator at phase 0.
    DeltaAtZero,
    /// Community 1 at phase 0, community 2 at phase π.
    TwoDelta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub coupling: Coupling,
    /// Oscillators per community.
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Samples before this time are discarded by [`OrderTrace::stationary`].
    pub burn_in: f64,
    pub seed: u64,
    pub init: Init,
    /// Record the order parameters every `stride` steps.
    pub stride: usize,
}

impl SimConfig {
    /// `dt = 0.01`, `t_end = 200`, `burn_in = 100`, uniform start, seed 0.
    pub fn new(coupling: Coupling, n: usize) -> Self {
        Self { coupling, n, dt: 0.01, t_end: 200.0, burn_in: 100.0, seed: 0, init: Init::Uniform, stride: 10 }
    }

    pub fn validate(&self) -> Result<()> {
        self.coupling.validate()?;
        if self.n < 2 {
            return domain(format!("need at least 2 oscillators per community, got {}", self.n));
        }
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return domain(format!("time step must lie in (0, {MAX_DT}], got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return domain(format!("horizon must be positive, got {}", self.t_end));
        }
        if !(self.burn_in >= 0.0 && self.burn_in < self.t_end) {
            return domain(format!("burn-in {} must lie in [0, t_end)", self.burn_in));
        }
        if self.stride == 0 {
            return domain("recording stride must be positive");
        }
        Ok(())
    }
}

/// Recorded order parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderTrace {
    pub times: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub psi1: Vec<f64>,
    pub psi2: Vec<f64>,
}

/// Time averages after burn-in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryMeans {
    pub r1: f64,
    pub r2: f64,
    /// Circular mean of `|ψ₁ - ψ₂|`, in `[0, π]`.
    pub phase_gap: f64,
    pub samples: usize,
}

impl OrderTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Means over samples at `t ≥ burn_in`.
    pub fn stationary(&self, burn_in: f64) -> Result<StationaryMeans> {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| self.times[i] >= burn_in).collect();
        if idx.is_empty() {
            return domain(format!("no samples after t = {burn_in}"));
        }
        let m = idx.len() as f64;
        let r1 = idx.iter().map(|&i| self.r1[i]).sum::<f64>() / m;
        let r2 = idx.iter().map(|&i| self.r2[i]).sum::<f64>() / m;
        let (c, s) = idx.iter().fold((0.0, 0.0), |(c, s), &i| {
            let d = self.psi1[i] - self.psi2[i];
            (c + d.cos(), s + d.sin())
        });
        Ok(StationaryMeans { r1, r2, phase_gap: s.atan2(c).abs(), samples: idx.len() })
    }
}

fn wrap(angle: f64) -> f64 {
    let a = (angle + PI).rem_euclid(2.0 * PI) - PI;
    if a <= -PI { PI } else { a }
}

/// Modulus and argument of `(1/n) Σ e^{iθ}`; the argument is 0 when the
/// modulus is below `1e-12`.
pub fn order_params(thetas: &[f64]) -> Result<(f64, f64)> {
    if thetas.is_empty() {
        return domain("order parameter of an empty population");
    }
    let n = thetas.len() as f64;
    let (c, s) = thetas.iter().fold((0.0, 0.0), |(c, s), t| (c + t.cos(), s + t.sin()));
    Ok(polar(c / n, s / n))
}

fn polar(x: f64, y: f64) -> (f64, f64) {
    let r = x.hypot(y);
    if r < 1e-12 {
        (0.0, 0.0)
    } else {
        (r, wrap(y.atan2(x)))
    }
}

fn mean_field(thetas: &[f64], trig: &mut [(f64, f64)]) -> (f64, f64) {
    let n = thetas.len() as f64;
    let (mut c, mut s) = (0.0, 0.0);
    for (t, slot) in thetas.iter().zip(trig.iter_mut()) {
        let (sn, cs) = t.sin_cos();
        *slot = (sn, cs);
        c += cs;
        s += sn;
    }
    (c / n, s / n)
}

/// Run one trajectory. Bit-identical for identical configurations.
pub fn simulate(cfg: &SimConfig) -> Result<OrderTrace> {
    cfg.validate()?;
    run(cfg, ChaCha8Rng::seed_from_u64(cfg.seed))
}

/// Independent trajectories with streams derived from the base seed: replica
/// `i` uses stream `i` of the seeded generator.
pub fn simulate_replicas(cfg: &SimConfig, replicas: usize) -> Result<Vec<OrderTrace>> {
    cfg.validate()?;
    (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            run(cfg, rng)
        })
        .collect()
}

fn run(cfg: &SimConfig, mut rng: ChaCha8Rng) -> Result<OrderTrace> {
    let n = cfg.n;
    let c = cfg.coupling;
    let mut th1: Vec<f64> = Vec::with_capacity(n);
    let mut th2: Vec<f64> = Vec::with_capacity(n);
    match cfg.init {
        Init::Uniform => {
            th1.extend((0..n).map(|_| rng.random_range(-PI..PI)));
            th2.extend((0..n).map(|_| rng.random_range(-PI..PI)));
        }
        Init::DeltaAtZero => {
            th1.resize(n, 0.0);
            th2.resize(n, 0.0);
        }
        Init::TwoDelta => {
            th1.resize(n, 0.0);
            th2.resize(n, PI);
        }
    }
    let steps = (cfg.t_end / cfg.dt).round() as usize;
    let sd = cfg.dt.sqrt();
    let mut trig1 = vec![(0.0, 0.0); n];
    let mut trig2 = vec![(0.0, 0.0); n];
    let cap = steps / cfg.stride + 2;
    let mut trace = OrderTrace {
        times: Vec::with_capacity(cap),
        r1: Vec::with_capacity(cap),
        r2: Vec::with_capacity(cap),
        psi1: Vec::with_capacity(cap),
        psi2: Vec::with_capacity(cap),
    };
    for step in 0..=steps {
        let (x1, y1) = mean_field(&th1, &mut trig1);
        let (x2, y2) = mean_field(&th2, &mut trig2);
        if step % cfg.stride == 0 {
            let (r1, p1) = polar(x1, y1);
            let (r2, p2) = polar(x2, y2);
            if !(r1 <= 1.0 + 1e-9 && r2 <= 1.0 + 1e-9) {
                return Err(Error::StepSize(format!("order parameter left [0, 1] at t = {}", step as f64 * cfg.dt)));
            }
            trace.times.push(step as f64 * cfg.dt);
            trace.r1.push(r1.min(1.0));
            trace.r2.push(r2.min(1.0));
            trace.psi1.push(p1);
            trace.psi2.push(p2);
        }
        if step == steps {
            break;
        }
        // r sin(ψ - θ) = Y cos θ - X sin θ
        let (a1, b1) = (0.5 * c.k1, 0.5 * c.l1);
        let (a2, b2) = (0.5 * c.k2, 0.5 * c.l2);
        for (t, &(s, co)) in th1.iter_mut().zip(&trig1) {
            let drift = a1 * (y1 * co - x1 * s) + b1 * (y2 * co - x2 * s);
            let dw: f64 = rng.sample(StandardNormal);
            *t = wrap(*t + drift * cfg.dt + sd * dw);
        }
        for (t, &(s, co)) in th2.iter_mut().zip(&trig2) {
            let drift = a2 * (y2 * co - x2 * s) + b2 * (y1 * co - x1 * s);
            let dw: f64 = rng.sample(StandardNormal);
            *t = wrap(*t + drift * cfg.dt + sd * dw);
        }
        if !(th1.iter().chain(&th2).all(|t| t.is_finite())) {
            return Err(Error::StepSize(format!("phases diverged at t = {}", (step + 1) as f64 * cfg.dt)));
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_params_of_point_mass_and_polygon() {
        let (r, psi) = order_params(&[0.7; 10]).unwrap();
        assert!((r - 1.0).abs() < 1e-15 && (psi - 0.7).abs() < 1e-15);
        let gon: Vec<f64> = (0..12).map(|k| 2.0 * PI * k as f64 / 12.0).collect();
        assert_eq!(order_params(&gon).unwrap(), (0.0, 0.0));
        assert!(order_params(&[]).is_err());
    }

    #[test]
    fn config_validation() {
        let c = Coupling::new(4.0, 4.0, 1.0, 1.0);
        assert!(SimConfig::new(c, 1).validate().is_err());
        assert!(SimConfig { dt: 0.1, ..SimConfig::new(c, 10) }.validate().is_err());
        assert!(SimConfig { burn_in: 300.0, ..SimConfig::new(c, 10) }.validate().is_err());
        assert!(SimConfig::new(c, 10).validate().is_ok());
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SimConfig { t_end: 2.0, burn_in: 0.0, seed: 7, ..SimConfig::new(Coupling::new(4.0, 4.0, 1.0, 1.0), 50) };
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        let other = simulate(&SimConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a, other);
        assert_eq!(a.len(), 21);
        let reps = simulate_replicas(&cfg, 3).unwrap();
        assert_ne!(reps[0], reps[1]);
        assert_eq!(reps, simulate_replicas(&cfg, 3).unwrap());
    }

    #[test]
    fn phases_wrap_into_half_open_interval() {
        assert_eq!(wrap(-PI), PI);
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap(0.5) - 0.5).abs() < 1e-15);
    }
}
