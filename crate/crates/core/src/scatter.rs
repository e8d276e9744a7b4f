//! Closed-form amplitudes for the point interaction `(i V1 + j V2 + k V3) δ(x)`.
//!
//! With `V1 = v1 + i v2` and `g² = V2² + V3²`:
//!
//! ```text
//! D = β(β + V1) + i (V1² + g² + V1 β)
//! r = -i (V1² + g² + V1 β) / D
//! t = β (β + V1) / D
//! ```
//!
//! `V2` and `V3` only enter through `g²`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qalg::{ComplexNum, Quaternion};

/// `|D|` below `TOL_SINGULAR · max(1, β²)` is reported as a singularity.
pub const TOL_SINGULAR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaPotential {
    /// Real part of `V1`.
    pub v1: f64,
    /// Imaginary part of `V1`.
    pub v2: f64,
    /// Strength of the `j` component.
    pub cap_v2: f64,
    /// Strength of the `k` component.
    pub cap_v3: f64,
}

impl DeltaPotential {
    pub fn new(v1: f64, v2: f64, cap_v2: f64, cap_v3: f64) -> Result<Self> {
        let p = DeltaPotential { v1, v2, cap_v2, cap_v3 };
        if [v1, v2, cap_v2, cap_v3].iter().all(|x| x.is_finite()) {
            Ok(p)
        } else {
            Err(Error::domain("potential strengths must be finite"))
        }
    }

    /// Builds the potential from `g²` directly, with `V2 = √g²` and `V3 = 0`.
    pub fn with_g_squared(v1: f64, v2: f64, g_squared: f64) -> Result<Self> {
        if !(g_squared >= 0.0) {
            return Err(Error::domain(format!("g² must be non-negative, got {g_squared}")));
        }
        Self::new(v1, v2, g_squared.sqrt(), 0.0)
    }

    pub fn free() -> Self {
        DeltaPotential { v1: 0.0, v2: 0.0, cap_v2: 0.0, cap_v3: 0.0 }
    }

    pub fn g_squared(&self) -> f64 {
        self.cap_v2 * self.cap_v2 + self.cap_v3 * self.cap_v3
    }

    /// `V1 = v1 + i v2`.
    pub fn v1_complex(&self) -> ComplexNum {
        ComplexNum::new(self.v1, self.v2)
    }

    /// The interaction strength as a real quaternion, `-v2 + v1 i + V2 j + V3 k`.
    pub fn strength(&self) -> Quaternion {
        Quaternion::new(-self.v2, self.v1, self.cap_v2, self.cap_v3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringResult {
    pub energy: f64,
    pub beta: f64,
    /// `None` when `at_singularity` is set.
    pub r: Option<ComplexNum>,
    pub t: Option<ComplexNum>,
    /// `|r|²`, infinite at a singularity.
    pub big_r: f64,
    /// `|t|²`, infinite at a singularity.
    pub big_t: f64,
    pub d_value: ComplexNum,
    pub at_singularity: bool,
}

pub fn beta_of_energy(energy: f64) -> Result<f64> {
    if energy > 0.0 && energy.is_finite() {
        Ok((2.0 * energy).sqrt())
    } else {
        Err(Error::domain(format!("energy must be positive and finite, got {energy}")))
    }
}

pub fn denominator(p: &DeltaPotential, beta: f64) -> ComplexNum {
    let Numerators { refl, trans } = numerators(p, beta);
    trans + ComplexNum::i() * refl
}

/// Real and imaginary parts of `D`, written out in terms of `v1`, `v2`, `g²`:
///
/// ```text
/// D_r = β² + β(v1 - v2) - 2 v1 v2
/// D_i = v1² - v2² + β(v1 + v2) + g²
/// ```
pub fn dr_di(p: &DeltaPotential, beta: f64) -> (f64, f64) {
    let (v1, v2) = (p.v1, p.v2);
    let dr = beta * beta + beta * (v1 - v2) - 2.0 * v1 * v2;
    let di = v1 * v1 - v2 * v2 + beta * (v1 + v2) + p.g_squared();
    (dr, di)
}

struct Numerators {
    /// `V1² + g² + V1 β`
    refl: ComplexNum,
    /// `β (β + V1)`
    trans: ComplexNum,
}

fn numerators(p: &DeltaPotential, beta: f64) -> Numerators {
    let v1 = p.v1_complex();
    Numerators {
        refl: v1 * v1 + p.g_squared() + v1 * beta,
        trans: beta * (v1 + beta),
    }
}

pub fn amplitudes(p: &DeltaPotential, energy: f64) -> Result<ScatteringResult> {
    let beta = beta_of_energy(energy)?;
    let Numerators { refl, trans } = numerators(p, beta);
    let d = trans + ComplexNum::i() * refl;

    if d.norm() < TOL_SINGULAR * beta.powi(2).max(1.0) {
        return Ok(ScatteringResult {
            energy,
            beta,
            r: None,
            t: None,
            big_r: f64::INFINITY,
            big_t: f64::INFINITY,
            d_value: d,
            at_singularity: true,
        });
    }

    let r = -ComplexNum::i() * refl / d;
    let t = trans / d;
    Ok(ScatteringResult {
        energy,
        beta,
        r: Some(r),
        t: Some(t),
        big_r: r.norm_sqr(),
        big_t: t.norm_sqr(),
        d_value: d,
        at_singularity: false,
    })
}

/// `steps` uniformly spaced energies from `e_min` to `e_max` inclusive.
pub fn energy_grid(e_min: f64, e_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(e_min > 0.0 && e_min < e_max && e_max.is_finite()) {
        return Err(Error::domain(format!(
            "energy range must satisfy 0 < e_min < e_max, got [{e_min}, {e_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::domain(format!("need at least 2 energy steps, got {steps}")));
    }
    let span = e_max - e_min;
    let last = (steps - 1) as f64;
    let mut grid: Vec<f64> = (0..steps).map(|i| e_min + span * (i as f64 / last)).collect();
    grid[steps - 1] = e_max;
    Ok(grid)
}

pub fn sweep(p: &DeltaPotential, e_min: f64, e_max: f64, steps: usize) -> Result<Vec<ScatteringResult>> {
    energy_grid(e_min, e_max, steps)?
        .into_par_iter()
        .map(|e| amplitudes(p, e))
        .collect()
}
