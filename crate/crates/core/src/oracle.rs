//! Independent numerical checks for the closed forms.
//!
//! Nothing here calls the closed-form amplitudes or the singular-branch
//! formulas. Roots come from simultaneous iteration. `|D|` is minimised
//! on a grid. The amplitudes come from assembling and solving the
//! matching conditions of the split wave function `ψ = ψ1 + j·ψ2` at the
//! delta.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qalg::ComplexNum;
use crate::scatter::{beta_of_energy, DeltaPotential};
use crate::singular::QuarticCoeffs;

pub const MAX_ITERATIONS: usize = 500;
pub const STEP_TOLERANCE: f64 = 1e-13;
/// Roots closer than this (relative to `max(1, |root|)`) are one cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-6;
/// `|Im|` at or below this (relative) tags a root as real.
pub const REAL_TOLERANCE: f64 = 1e-8;
/// Matching systems with `|det| < SINGULAR_SYSTEM_TOLERANCE · max(1, β²)` are singular.
pub const SINGULAR_SYSTEM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootMethod {
    DurandKerner,
    CompanionEigen,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    /// Sorted by real part, then imaginary part.
    pub roots: [ComplexNum; 4],
    /// Size of the cluster each root belongs to.
    pub multiplicity: [usize; 4],
    /// `true` when the simultaneous iteration met its stopping rule.
    pub converged: bool,
    pub method: RootMethod,
}

impl RootSet {
    pub fn is_real(&self, idx: usize) -> bool {
        let z = self.roots[idx];
        z.im.abs() <= REAL_TOLERANCE * z.re.abs().max(1.0)
    }

    /// Distinct real roots with their multiplicities.
    pub fn real_roots(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for i in 0..4 {
            if !self.is_real(i) {
                continue;
            }
            let x = self.roots[i].re;
            if !out.iter().any(|&(y, _)| (x - y).abs() <= CLUSTER_TOLERANCE * x.abs().max(1.0)) {
                out.push((x, self.multiplicity[i]));
            }
        }
        out
    }

    /// Coefficients of `∏ (β - root)`, imaginary parts dropped.
    pub fn reconstruct(&self) -> QuarticCoeffs {
        let mut poly = [ComplexNum::new(1.0, 0.0), ComplexNum::default(), ComplexNum::default(), ComplexNum::default(), ComplexNum::default()];
        for (n, &root) in self.roots.iter().enumerate() {
            for k in (1..=n + 1).rev() {
                poly[k] = poly[k] - root * poly[k - 1];
            }
        }
        QuarticCoeffs::new(poly[1].re, poly[2].re, poly[3].re, poly[4].re)
    }

    pub fn eval_product(&self, beta: ComplexNum) -> ComplexNum {
        self.roots.iter().fold(ComplexNum::new(1.0, 0.0), |acc, &r| acc * (beta - r))
    }
}

fn horner(q: &QuarticCoeffs, z: ComplexNum) -> ComplexNum {
    (((z + q.b) * z + q.c) * z + q.d) * z + q.e
}

/// Running-error bound for Horner evaluation at `|z|`.
fn horner_bound(q: &QuarticCoeffs, z: f64) -> f64 {
    let a = [q.b.abs(), q.c.abs(), q.d.abs(), q.e.abs()];
    let mut acc = 1.0;
    for c in a {
        acc = acc * z + c;
    }
    acc
}

/// All four roots of `β⁴ + bβ³ + cβ² + dβ + e`.
///
/// Durand–Kerner iteration from four points spread on a circle of the
/// Fujiwara radius. The iteration stops when the largest relative step is
/// below [`STEP_TOLERANCE`] or every residual sits at rounding level (the
/// usual outcome at a double root, where convergence is only linear).
/// If neither happens within [`MAX_ITERATIONS`] the eigenvalues of the
/// companion matrix are used instead.
pub fn quartic_roots(q: &QuarticCoeffs) -> Result<RootSet> {
    if ![q.b, q.c, q.d, q.e].iter().all(|x| x.is_finite()) {
        return Err(Error::Numerical("quartic coefficients must be finite".into()));
    }

    let (mut roots, converged) = durand_kerner(q);
    let method = if converged {
        RootMethod::DurandKerner
    } else {
        roots = companion_roots(q)?;
        RootMethod::CompanionEigen
    };

    let (roots, multiplicity) = cluster(roots);
    Ok(RootSet { roots, multiplicity, converged, method })
}

fn durand_kerner(q: &QuarticCoeffs) -> ([ComplexNum; 4], bool) {
    let radius = (2.0
        * [q.b.abs(), q.c.abs().sqrt(), q.d.abs().cbrt(), (0.5 * q.e.abs()).powf(0.25)]
            .into_iter()
            .fold(0.0, f64::max))
    .max(1.0);
    let mut z: [ComplexNum; 4] = std::array::from_fn(|k| ComplexNum::from_polar(radius, 0.4 + 0.5 * PI * k as f64));

    for _ in 0..MAX_ITERATIONS {
        let mut next = z;
        let mut max_step: f64 = 0.0;
        for k in 0..4 {
            let mut denom = ComplexNum::new(1.0, 0.0);
            for j in (0..4).filter(|&j| j != k) {
                denom *= z[k] - z[j];
            }
            if denom.norm() == 0.0 {
                // coincident iterates; nudge apart
                next[k] = z[k] + ComplexNum::new(1e-8, 1e-8) * z[k].norm().max(1.0);
                max_step = f64::INFINITY;
                continue;
            }
            let step = horner(q, z[k]) / denom;
            next[k] = z[k] - step;
            max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
        }
        z = next;

        let at_rounding = z
            .iter()
            .all(|&zk| horner(q, zk).norm() <= 16.0 * f64::EPSILON * horner_bound(q, zk.norm()));
        if max_step <= STEP_TOLERANCE || at_rounding {
            return (z, true);
        }
    }
    (z, false)
}

fn companion_roots(q: &QuarticCoeffs) -> Result<[ComplexNum; 4]> {
    #[rustfmt::skip]
    let m = Matrix4::new(
        0.0, 0.0, 0.0, -q.e,
        1.0, 0.0, 0.0, -q.d,
        0.0, 1.0, 0.0, -q.c,
        0.0, 0.0, 1.0, -q.b,
    );
    let eig = m.complex_eigenvalues();
    let roots: [ComplexNum; 4] = std::array::from_fn(|i| eig[i]);
    if roots.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(roots)
    } else {
        Err(Error::Numerical("companion eigenvalues did not converge".into()))
    }
}

/// Groups nearby roots, replaces each group by its centroid and sorts.
fn cluster(mut roots: [ComplexNum; 4]) -> ([ComplexNum; 4], [usize; 4]) {
    let mut multiplicity = [0usize; 4];
    for i in 0..4 {
        if multiplicity[i] != 0 {
            continue;
        }
        let tol = CLUSTER_TOLERANCE * roots[i].norm().max(1.0);
        let members: Vec<usize> = (i..4)
            .filter(|&j| multiplicity[j] == 0 && (roots[j] - roots[i]).norm() <= tol)
            .collect();
        let centroid = members.iter().map(|&j| roots[j]).sum::<ComplexNum>() / members.len() as f64;
        for &j in &members {
            roots[j] = centroid;
            multiplicity[j] = members.len();
        }
    }
    let mut pairs: Vec<(ComplexNum, usize)> = roots.into_iter().zip(multiplicity).collect();
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    (
        std::array::from_fn(|i| pairs[i].0),
        std::array::from_fn(|i| pairs[i].1),
    )
}

/// `|D(β)|²` built from `D_r` and `D_i` evaluated directly.
fn dsq_direct(p: &DeltaPotential, beta: f64) -> f64 {
    abs_d_direct(p, beta).powi(2)
}

fn abs_d_direct(p: &DeltaPotential, beta: f64) -> f64 {
    let (v1, v2, g2) = (p.v1, p.v2, p.g_squared());
    let dr = beta * beta + beta * (v1 - v2) - 2.0 * v1 * v2;
    let di = v1 * v1 - v2 * v2 + beta * (v1 + v2) + g2;
    dr.hypot(di)
}

pub const MINIMIZE_GRID_POINTS: usize = 10_000;

pub fn default_beta_max(p: &DeltaPotential) -> f64 {
    10.0 * (1.0 + p.v1.abs().max(p.v2.abs()).max(p.g_squared().sqrt()))
}

/// Global minimum of `|D|²` over `(0, beta_max]`, returned as `(β*, |D(β*)|²)`.
pub fn minimize_dsq(p: &DeltaPotential, beta_max: f64) -> Result<(f64, f64)> {
    if !(beta_max > 0.0 && beta_max.is_finite()) {
        return Err(Error::domain(format!("beta_max must be positive, got {beta_max}")));
    }
    let h = beta_max / MINIMIZE_GRID_POINTS as f64;
    let best = (1..=MINIMIZE_GRID_POINTS)
        .map(|k| (k, abs_d_direct(p, h * k as f64)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
        .unwrap_or(1);

    // |D| rather than |D|²: a V-shaped minimum resolves to full precision
    let mut lo = h * (best as f64 - 1.0);
    let mut hi = (h * (best as f64 + 1.0)).min(beta_max);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (abs_d_direct(p, x1), abs_d_direct(p, x2));
    while hi - lo > 1e-12 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = abs_d_direct(p, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = abs_d_direct(p, x2);
        }
    }
    let mut beta = 0.5 * (lo + hi);
    if beta <= 0.0 {
        beta = h.min(1e-12);
    }
    let grid_beta = h * best as f64;
    if abs_d_direct(p, grid_beta) < abs_d_direct(p, beta) {
        beta = grid_beta;
    }
    Ok((beta, dsq_direct(p, beta)))
}

/// How the `j`-channel sees the complex strength `V1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MatchingMode {
    /// `conj(V1)`: the literal real-quaternion potential `-v2 + v1 i + V2 j + V3 k`.
    Conjugate,
    /// `V1` itself, the analytic continuation the closed forms are built on.
    Continued,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchingAmplitudes {
    pub r: Option<ComplexNum>,
    pub t: Option<ComplexNum>,
    /// Left evanescent amplitude in the `j` channel.
    pub r_tilde: Option<ComplexNum>,
    /// Right evanescent amplitude in the `j` channel.
    pub t_tilde: Option<ComplexNum>,
    pub mode: MatchingMode,
    pub singular_system: bool,
    pub determinant: ComplexNum,
}

/// Solves the matching conditions at the delta for `(r, t, r̃, t̃)`.
///
/// With the ansatz
///
/// ```text
/// ψ1 = e^{iβx} + r e^{-iβx}  (x < 0),   t e^{iβx}   (x > 0)
/// ψ2 = r̃ e^{βx}              (x < 0),   t̃ e^{-βx}   (x > 0)
/// ```
///
/// the rows are continuity of `ψ1` and `ψ2` and the two derivative jumps
///
/// ```text
/// ½ Δψ1' = V1 ψ1(0) - (V3 - i V2) ψ2(0)
/// ½ Δψ2' = c ψ2(0) + (V3 + i V2) ψ1(0)
/// ```
///
/// where `c` depends on `mode`. The system is solved by LU.
pub fn matching_solver(p: &DeltaPotential, energy: f64, mode: MatchingMode) -> Result<MatchingAmplitudes> {
    let beta = beta_of_energy(energy)?;
    let i = ComplexNum::i();
    let v1 = p.v1_complex();
    let cj = match mode {
        MatchingMode::Conjugate => v1.conj(),
        MatchingMode::Continued => v1,
    };
    let mix_minus = ComplexNum::new(p.cap_v3, -p.cap_v2);
    let mix_plus = ComplexNum::new(p.cap_v3, p.cap_v2);
    let zero = ComplexNum::default();
    let one = ComplexNum::new(1.0, 0.0);
    let half_ib = i * (0.5 * beta);
    let half_b = ComplexNum::new(0.5 * beta, 0.0);

    // unknowns ordered (r, t, r̃, t̃); ψ(0) read from the right-hand side
    #[rustfmt::skip]
    let m = Matrix4::new(
        one,      -one,              zero,    zero,
        zero,     zero,              one,     -one,
        half_ib,  half_ib - v1,      zero,    mix_minus,
        zero,     -mix_plus,         -half_b, -half_b - cj,
    );
    let rhs = Vector4::new(-one, zero, half_ib, zero);

    let lu = m.lu();
    let det = lu.determinant();
    let singular = det.norm() < SINGULAR_SYSTEM_TOLERANCE * beta.powi(2).max(1.0);
    let solution = if singular { None } else { lu.solve(&rhs) };
    if !singular && solution.is_none() {
        return Err(Error::Numerical("matching system could not be solved".into()));
    }
    Ok(MatchingAmplitudes {
        r: solution.map(|x| x[0]),
        t: solution.map(|x| x[1]),
        r_tilde: solution.map(|x| x[2]),
        t_tilde: solution.map(|x| x[3]),
        mode,
        singular_system: singular,
        determinant: det,
    })
}

/// Finds the `(v1, v2)` for which every `(g², β)` target zeroes both
/// `D_r` and `D_i`.
///
/// A coarse grid over `[-bound, bound]²` picks the start and Gauss–Newton
/// polishes it. Fails unless the final residual vanishes.
pub fn recover_pair(targets: &[(f64, f64)], bound: f64, grid: usize) -> Result<(f64, f64)> {
    if targets.is_empty() || grid < 2 || !(bound > 0.0) {
        return Err(Error::domain("need at least one target and a non-trivial search grid"));
    }
    let residual = |v1: f64, v2: f64, (g2, beta): (f64, f64)| {
        [
            beta * beta + beta * (v1 - v2) - 2.0 * v1 * v2,
            v1 * v1 - v2 * v2 + beta * (v1 + v2) + g2,
        ]
    };
    let cost = |v1: f64, v2: f64| {
        targets.iter().map(|&t| residual(v1, v2, t).iter().map(|r| r * r).sum::<f64>()).sum::<f64>()
    };

    let step = 2.0 * bound / (grid - 1) as f64;
    let mut start = (0.0, 0.0, f64::INFINITY);
    for a in 0..grid {
        for b in 0..grid {
            let (v1, v2) = (-bound + step * a as f64, -bound + step * b as f64);
            let c = cost(v1, v2);
            if c < start.2 {
                start = (v1, v2, c);
            }
        }
    }

    let (mut v1, mut v2) = (start.0, start.1);
    for _ in 0..100 {
        // Jacobian rows: ∂D_r = (β - 2v2, -β - 2v1), ∂D_i = (2v1 + β, -2v2 + β)
        let (mut jtj, mut jtr) = ([[0.0f64; 2]; 2], [0.0f64; 2]);
        for &(g2, beta) in targets {
            let rows = [[beta - 2.0 * v2, -beta - 2.0 * v1], [2.0 * v1 + beta, beta - 2.0 * v2]];
            for (row, res) in rows.iter().zip(residual(v1, v2, (g2, beta))) {
                for a in 0..2 {
                    jtr[a] += row[a] * res;
                    for b in 0..2 {
                        jtj[a][b] += row[a] * row[b];
                    }
                }
            }
        }
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let d1 = (jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let d2 = (jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
        v1 -= d1;
        v2 -= d2;
        if d1.abs().max(d2.abs()) <= 1e-15 * v1.abs().max(v2.abs()).max(1.0) {
            break;
        }
    }
    let final_cost = cost(v1, v2);
    if final_cost.sqrt() > 1e-9 {
        return Err(Error::Numerical(format!(
            "no pair satisfies all targets (residual {:.3e})",
            final_cost.sqrt()
        )));
    }
    Ok((v1, v2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scatter::amplitudes;
    use crate::singular::{quartic_coeffs, ss_closed_form};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> ComplexNum {
        ComplexNum::new(re, im)
    }

    fn contains(set: &RootSet, z: ComplexNum, tol: f64) -> bool {
        set.roots.iter().any(|&r| (r - z).norm() <= tol)
    }

    #[test]
    fn reference_quartic_roots() {
        let set = quartic_roots(&QuarticCoeffs::new(-7.0, 24.5, -46.0, 34.0)).unwrap();
        assert!(contains(&set, c(2.0, 0.0), 1e-7));
        assert!(contains(&set, c(1.5, 2.5), 1e-10));
        assert!(contains(&set, c(1.5, -2.5), 1e-10));
        assert_eq!(set.real_roots().len(), 1);
        let (root, mult) = set.real_roots()[0];
        assert!((root - 2.0).abs() < 1e-7);
        assert_eq!(mult, 2);
    }

    #[test]
    fn four_distinct_roots() {
        let set = quartic_roots(&QuarticCoeffs::new(-10.0, 35.0, -50.0, 24.0)).unwrap();
        assert!(set.converged);
        for (k, want) in [1.0, 2.0, 3.0, 4.0].into_iter().enumerate() {
            assert!((set.roots[k] - c(want, 0.0)).norm() < 1e-12, "{:?}", set.roots);
            assert!(set.is_real(k));
            assert_eq!(set.multiplicity[k], 1);
        }
    }

    #[test]
    fn zero_polynomial() {
        let set = quartic_roots(&QuarticCoeffs::new(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(set.roots.iter().all(|z| z.norm() < 1e-10));
        assert_eq!(set.multiplicity, [4; 4]);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            quartic_roots(&QuarticCoeffs::new(f64::NAN, 0.0, 0.0, 0.0)),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn companion_fallback_agrees() {
        let q = QuarticCoeffs::new(-10.0, 35.0, -50.0, 24.0);
        let mut roots = companion_roots(&q).unwrap();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (r, want) in roots.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((r - c(want, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn reconstruction_on_random_quartics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let q = QuarticCoeffs::new(
                rng.gen_range(-20.0..20.0),
                rng.gen_range(-100.0..100.0),
                rng.gen_range(-500.0..500.0),
                rng.gen_range(-1000.0..1000.0),
            );
            let set = quartic_roots(&q).unwrap();
            let back = set.reconstruct();
            let scale = 1.0 + q.b.abs() + q.c.abs() + q.d.abs() + q.e.abs();
            for (x, y) in [(back.b, q.b), (back.c, q.c), (back.d, q.d), (back.e, q.e)] {
                assert!((x - y).abs() <= 1e-8 * scale, "{q:?} -> {back:?}");
            }
            for _ in 0..10 {
                let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
                let want = horner(&q, z);
                let got = set.eval_product(z);
                assert!((want - got).norm() <= 1e-8 * want.norm().max(scale));
            }
            // real coefficients: non-real roots pair up with their conjugates
            for k in (0..4).filter(|&k| !set.is_real(k)) {
                assert!(contains(&set, set.roots[k].conj(), 1e-6 * set.roots[k].norm().max(1.0)));
            }
        }
    }

    #[test]
    fn minimizer_finds_singularities() {
        let p = DeltaPotential::with_g_squared(-0.5, 3.0, 3.75).unwrap();
        let (beta, dsq) = minimize_dsq(&p, 10.0).unwrap();
        assert!((beta - 2.0).abs() < 1e-9, "{beta}");
        assert!(dsq < 1e-18);

        let p = DeltaPotential::with_g_squared(-0.5, 3.0, 5.0).unwrap();
        let (beta, dsq) = minimize_dsq(&p, 10.0).unwrap();
        assert!((beta - 1.5).abs() < 1e-9, "{beta}");
        assert!(dsq < 1e-18);

        let p = DeltaPotential::with_g_squared(1.0, 0.0, 1.0).unwrap();
        let (_, dsq) = minimize_dsq(&p, 10.0).unwrap();
        assert!(dsq > 1.0);
        assert!(minimize_dsq(&p, 0.0).is_err());
    }

    #[test]
    fn matching_hand_solved_case() {
        let p = DeltaPotential::new(1.0, 0.0, 1.0, 0.0).unwrap();
        for mode in [MatchingMode::Conjugate, MatchingMode::Continued] {
            let m = matching_solver(&p, 0.5, mode).unwrap();
            assert!(!m.singular_system);
            assert!((m.r.unwrap() - c(-9.0 / 13.0, -6.0 / 13.0)).norm() < 1e-14);
            assert!((m.t.unwrap() - c(4.0 / 13.0, -6.0 / 13.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn matching_free_particle() {
        for mode in [MatchingMode::Conjugate, MatchingMode::Continued] {
            let m = matching_solver(&DeltaPotential::free(), 1.3, mode).unwrap();
            assert!(m.r.unwrap().norm() < 1e-15);
            assert!((m.t.unwrap() - c(1.0, 0.0)).norm() < 1e-15);
            assert!(m.r_tilde.unwrap().norm() < 1e-15 && m.t_tilde.unwrap().norm() < 1e-15);
        }
        assert!(matching_solver(&DeltaPotential::free(), -1.0, MatchingMode::Continued).is_err());
    }

    #[test]
    fn matching_reference_singular_in_continued_mode() {
        let p = DeltaPotential::new(-0.5, 3.0, 15f64.sqrt() / 2.0, 0.0).unwrap();
        let m = matching_solver(&p, 2.0, MatchingMode::Continued).unwrap();
        assert!(m.singular_system);
        assert!(m.r.is_none());
        let m = matching_solver(&p, 2.0, MatchingMode::Conjugate).unwrap();
        assert!(!m.singular_system);
    }

    #[test]
    fn matching_continuity_and_continuation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2000 {
            let p = DeltaPotential::new(
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
            )
            .unwrap();
            let e = rng.gen_range(0.01..50.0);
            let cont = matching_solver(&p, e, MatchingMode::Continued).unwrap();
            let (r, t) = (cont.r.unwrap(), cont.t.unwrap());
            assert!((c(1.0, 0.0) + r - t).norm() <= 1e-12 * (1.0 + t.norm()));
            assert!((cont.r_tilde.unwrap() - cont.t_tilde.unwrap()).norm() <= 1e-12 * (1.0 + cont.t_tilde.unwrap().norm()));
            let closed = amplitudes(&p, e).unwrap();
            assert!((closed.r.unwrap() - r).norm() <= 1e-9 * r.norm().max(1.0));
            assert!((closed.t.unwrap() - t).norm() <= 1e-9 * t.norm().max(1.0));
            // |det| is |D| for the matching coefficient in use
            assert!((cont.determinant.norm() - closed.d_value.norm()).abs() <= 1e-9 * closed.d_value.norm().max(1.0));
        }
    }

    #[test]
    fn modes_diverge_for_complex_strength() {
        let p = DeltaPotential::with_g_squared(-0.5, 3.0, 3.75).unwrap();
        let a = matching_solver(&p, 1.0, MatchingMode::Conjugate).unwrap();
        let b = matching_solver(&p, 1.0, MatchingMode::Continued).unwrap();
        assert!((a.r.unwrap() - b.r.unwrap()).norm() > 1e-12);
    }

    #[test]
    fn double_roots_at_feasible_branches() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut seen = 0;
        while seen < 200 {
            let (v1, v2) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let (plus, minus) = ss_closed_form(v1, v2);
            for sol in [plus, minus].into_iter().filter(|s| s.feasible) {
                seen += 1;
                let q = quartic_coeffs(&sol.potential(v1, v2).unwrap());
                let set = quartic_roots(&q).unwrap();
                let hit = set
                    .real_roots()
                    .into_iter()
                    .find(|&(x, _)| (x - sol.beta).abs() <= 1e-6 * sol.beta.max(1.0));
                assert_eq!(hit.map(|h| h.1), Some(2), "({v1}, {v2}) {sol:?} {set:?}");
            }
        }
    }

    #[test]
    fn recovers_reference_pair() {
        let (v1, v2) = recover_pair(&[(3.75, 2.0), (5.0, 1.5)], 20.0, 401).unwrap();
        assert!((v1 + 0.5).abs() < 1e-12 && (v2 - 3.0).abs() < 1e-12, "({v1}, {v2})");
        // a single branch cannot be inverted uniquely but must still be consistent
        let (v1, v2) = recover_pair(&[(3.75, 2.0)], 20.0, 101).unwrap();
        let (dr, di) = crate::scatter::dr_di(&DeltaPotential::with_g_squared(v1, v2, 3.75).unwrap(), 2.0);
        assert!(dr.abs() < 1e-9 && di.abs() < 1e-9);
        // no real pair has both singularities at the same β with different g²
        assert!(recover_pair(&[(1.0, 2.0), (4.0, 2.0)], 20.0, 101).is_err());
    }
}
