//! Lévy-stable step lengths drawn with Mantegna's algorithm.
//!
//! A step is `s = u / |v|^(1/beta)` with `u ~ N(0, sigma_u^2)` and
//! `v ~ N(0, 1)`, where
//!
//! ```text
//! sigma_u = { Γ(1+β) sin(πβ/2) / ( Γ((1+β)/2) β 2^((β-1)/2) ) }^(1/β)
//! ```
//!
//! At `beta = 2` the sine vanishes and `sigma_u` collapses to (numerically)
//! zero, so every step is negligible.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Scale of the numerator variate for stability exponent `beta`.
pub fn sigma_u(beta: f64) -> f64 {
    let num = libm::tgamma(1.0 + beta) * (PI * beta / 2.0).sin();
    let den = libm::tgamma((1.0 + beta) / 2.0) * beta * 2f64.powf((beta - 1.0) / 2.0);
    (num / den).max(0.0).powf(1.0 / beta)
}

/// One draw of Mantegna's construction, with its intermediate variates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevySample {
    pub u: f64,
    pub v_norm: f64,
    pub sigma_u: f64,
    pub sigma_v: f64,
    pub s: f64,
}

/// Sampler for Lévy steps with a fixed stability exponent.
#[derive(Debug, Clone, Copy)]
pub struct Mantegna {
    beta: f64,
    sigma_u: f64,
}

impl Mantegna {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 1.0 && beta <= 2.0) {
            return Err(Error::validation(format!(
                "Lévy exponent beta must lie in (1, 2], got {beta}"
            )));
        }
        Ok(Self {
            beta,
            sigma_u: sigma_u(beta),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma_u(&self) -> f64 {
        self.sigma_u
    }

    /// Draws `u` then `v` (redrawing `v` while it is exactly zero).
    pub fn sample_detailed<R: Rng + ?Sized>(&self, rng: &mut R) -> LevySample {
        let z: f64 = StandardNormal.sample(rng);
        let u = z * self.sigma_u;
        let v_norm = loop {
            let v: f64 = StandardNormal.sample(rng);
            if v != 0.0 {
                break v;
            }
        };
        LevySample {
            u,
            v_norm,
            sigma_u: self.sigma_u,
            sigma_v: 1.0,
            s: u / v_norm.abs().powf(1.0 / self.beta),
        }
    }

    pub fn step<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_detailed(rng).s
    }
}

impl Distribution<f64> for Mantegna {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.step(rng)
    }
}

/// Convenience wrapper: a single Lévy step for `beta`.
pub fn levy_step<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> Result<f64> {
    Ok(Mantegna::new(beta)?.step(rng))
}
