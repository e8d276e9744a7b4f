//! Self-checks run by `qdelta verify`.
//!
//! Every check is deterministic for a given seed, and the rendered report
//! carries no timings, so repeated runs are byte-identical.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::{matching_solver, minimize_dsq, quartic_roots, recover_pair, MatchingMode};
use crate::qalg::{symplectic_join, symplectic_split, ComplexNum, Quaternion};
use crate::scatter::{amplitudes, denominator, dr_di, sweep, DeltaPotential};
use crate::singular::{
    a_factor, beta_from_g_squared, classify_region, discriminant_expanded_for, discriminant_factored,
    g_squared_direct, pq_classifiers, pq_simplified, quartic_coeffs, root_nature, ss_closed_form,
    Infeasibility, Region, RootNature, KAPPA,
};

/// Reference singular branches `(g², β)`.
pub const REFERENCE_BRANCHES: [(f64, f64); 2] = [(3.75, 2.0), (5.0, 1.5)];
/// Reference energies `E+ss = 2`, `E-ss = 9/8`.
pub const REFERENCE_ENERGIES: [f64; 2] = [2.0, 1.125];
/// Pair implied by the commonly printed potential `-10 - 0.5i`, read as `iV1 = -v2 + i v1`.
pub const PRINTED_PAIR: (f64, f64) = (-0.5, 10.0);

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "qdelta verify (seed {}, trials {})", self.seed, self.trials);
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{status}  {:width$}  {}", c.name, c.detail);
        }
        let _ = writeln!(s, "\ndocumented discrepancies:");
        for n in &self.notes {
            let _ = writeln!(s, "  * {n}");
        }
        let _ = writeln!(s, "\n{}/{} checks passed", self.checks.len() - self.failures(), self.checks.len());
        s
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check { name, passed, detail });
    }
}

pub fn run_suite(seed: u64, trials: usize) -> Report {
    let mut report = Report { seed, trials, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    quaternion_algebra(&mut report, &mut rng, trials);
    reference_constants(&mut report);
    reference_curves(&mut report);
    algebraic_identities(&mut report, &mut rng, trials);
    unitarity(&mut report, &mut rng, trials);
    oracle_equivalence(&mut report, &mut rng, trials);
    double_roots(&mut report, &mut rng);
    root_sets(&mut report, &mut rng, trials.min(2000));
    lossy_quadrant(&mut report, &mut rng, trials);
    region_boundary(&mut report);
    nhqm_limit(&mut report);
    anti_hermitian(&mut report, &mut rng);
    branch_consistency(&mut report, &mut rng, trials);
    discrepancy_notes(&mut report);
    report
}

fn random_quaternion(rng: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(
        rng.gen_range(-1e3..1e3),
        rng.gen_range(-1e3..1e3),
        rng.gen_range(-1e3..1e3),
        rng.gen_range(-1e3..1e3),
    )
}

fn random_potential(rng: &mut ChaCha8Rng, v2_zero: bool) -> DeltaPotential {
    let v1 = rng.gen_range(-10.0..10.0);
    let v2 = if v2_zero { 0.0 } else { rng.gen_range(-10.0..10.0) };
    let g = (100.0 - rng.gen_range(0.0..100.0f64)).sqrt();
    let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    DeltaPotential::new(v1, v2, g * angle.cos(), g * angle.sin()).expect("finite draw")
}

fn random_beta(rng: &mut ChaCha8Rng) -> f64 {
    20.0 - rng.gen_range(0.0..20.0)
}

fn quaternion_algebra(report: &mut Report, rng: &mut ChaCha8Rng, trials: usize) {
    use Quaternion as Q;
    let table = Q::I * Q::J == Q::K
        && Q::J * Q::K == Q::I
        && Q::K * Q::I == Q::J
        && Q::I * Q::I == -Q::ONE
        && Q::J * Q::J == -Q::ONE
        && Q::K * Q::K == -Q::ONE
        && Q::I * Q::J * Q::K == -Q::ONE;
    let (mut worst_norm, mut worst_assoc) = (0.0f64, 0.0f64);
    let mut exact = true;
    for _ in 0..trials {
        let (a, b, c) = (random_quaternion(rng), random_quaternion(rng), random_quaternion(rng));
        let n = a.norm() * b.norm();
        worst_norm = worst_norm.max(((a * b).norm() - n).abs() / n);
        worst_assoc = worst_assoc.max(((a * b) * c - a * (b * c)).norm() / (n * c.norm()));
        let (z1, z2) = symplectic_split(a);
        exact &= symplectic_join(z1, z2) == a;
        let z = ComplexNum::new(a.w, a.x);
        exact &= Q::J * Q::from_complex(z) == Q::from_complex(z.conj()) * Q::J;
    }
    report.push(
        "quaternion algebra",
        table && exact && worst_norm <= 1e-12 && worst_assoc <= 1e-12,
        format!("norm rel err {worst_norm:.2e}, assoc rel err {worst_assoc:.2e}, split/join exact {exact}"),
    );
}

fn reference_constants(report: &mut Report) {
    let Ok((v1, v2)) = recover_pair(&REFERENCE_BRANCHES, 20.0, 401) else {
        report.push("[1] reference constants", false, "pair recovery failed".into());
        return;
    };
    let (plus, minus) = ss_closed_form(v1, v2);
    let errs = [
        (plus.g_squared - 3.75).abs(),
        (minus.g_squared - 5.0).abs(),
        (plus.energy - REFERENCE_ENERGIES[0]).abs(),
        (minus.energy - REFERENCE_ENERGIES[1]).abs(),
    ];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    let d_plus = DeltaPotential::with_g_squared(v1, v2, 3.75).map(|p| denominator(&p, 2.0).norm());
    let d_minus = DeltaPotential::with_g_squared(v1, v2, 5.0).map(|p| denominator(&p, 1.5).norm());
    let (dp, dm) = (d_plus.unwrap_or(f64::INFINITY), d_minus.unwrap_or(f64::INFINITY));
    report.push(
        "[1] reference constants",
        plus.feasible && minus.feasible && worst <= 1e-12 && dp <= 1e-12 && dm <= 1e-12,
        format!("recovered ({v1}, {v2}), max const err {worst:.2e}, |D+| {dp:.2e}, |D-| {dm:.2e}"),
    );
}

fn peak_energy(rows: &[crate::ScatteringResult], pick: fn(&crate::ScatteringResult) -> f64) -> f64 {
    rows.iter()
        .max_by(|a, b| pick(a).total_cmp(&pick(b)))
        .map(|r| r.energy)
        .unwrap_or(f64::NAN)
}

fn reference_curves(report: &mut Report) {
    let step = (4.0 - 0.05) / 3999.0;
    let mut ok = true;
    let mut detail = Vec::new();
    for (g2, e_ss) in [(3.75, 2.0), (5.0, 1.125)] {
        let p = DeltaPotential::with_g_squared(-0.5, 3.0, g2).expect("valid");
        let Ok(rows) = sweep(&p, 0.05, 4.0, 4000) else {
            ok = false;
            continue;
        };
        let er = peak_energy(&rows, |r| r.big_r);
        let et = peak_energy(&rows, |r| r.big_t);
        ok &= (er - e_ss).abs() <= step && (et - e_ss).abs() <= step;
        let mut least = f64::INFINITY;
        for e in [e_ss - 1e-7, e_ss + 1e-7] {
            match amplitudes(&p, e) {
                Ok(res) => least = least.min(res.big_r.min(res.big_t)),
                Err(_) => ok = false,
            }
        }
        ok &= least > 1e6;
        detail.push(format!("g2={g2}: peaks R@{er:.4} T@{et:.4}, min(R,T) at E±1e-7 {least:.2e}"));
    }
    report.push("[2] reference curves", ok, detail.join("; "));
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn algebraic_identities(report: &mut Report, rng: &mut ChaCha8Rng, trials: usize) {
    let (mut w_dsq, mut w_delta, mut w_pq) = (0.0f64, 0.0f64, 0.0f64);
    let mut signs_ok = true;
    for _ in 0..trials {
        let p = random_potential(rng, false);
        let beta = random_beta(rng);
        let q = quartic_coeffs(&p);
        let (dr, di) = dr_di(&p, beta);
        let dsq = denominator(&p, beta).norm_sqr();
        w_dsq = w_dsq.max(rel(q.eval(beta), dr * dr + di * di)).max(rel(q.eval(beta), dsq));
        let (a, b, factored) = discriminant_factored(&p);
        let expanded = discriminant_expanded_for(&p);
        let d_err = (expanded - factored).abs();
        if d_err > 1e-8 {
            w_delta = w_delta.max(d_err / expanded.abs().max(factored.abs()));
        }
        signs_ok &= a >= 0.0 && b >= 0.0;
        let (pr, qr) = pq_classifiers(&q);
        let (ps, qs) = pq_simplified(&p);
        w_pq = w_pq.max(rel(pr, ps)).max(rel(qr, qs));
    }
    report.push(
        "[3] algebraic identities",
        w_dsq <= 1e-9 && w_delta <= 1e-6 && w_pq <= 1e-10 && signs_ok,
        format!("|D|^2 {w_dsq:.2e}, delta {w_delta:.2e}, P/Q {w_pq:.2e}, A,B >= 0 {signs_ok}"),
    );
}

fn unitarity(report: &mut Report, rng: &mut ChaCha8Rng, trials: usize) {
    let mut worst = 0.0f64;
    let mut failed = false;
    for _ in 0..trials {
        let p = random_potential(rng, true);
        let e = 0.5 * random_beta(rng).powi(2);
        match amplitudes(&p, e) {
            Ok(res) => worst = worst.max((res.big_r + res.big_t - 1.0).abs()),
            Err(_) => failed = true,
        }
    }
    report.push("[4] unitarity", !failed && worst <= 1e-10, format!("max |R+T-1| {worst:.2e}"));
}

fn amplitude_gap(p: &DeltaPotential, e: f64, mode: MatchingMode) -> Option<f64> {
    let closed = amplitudes(p, e).ok()?;
    let m = matching_solver(p, e, mode).ok()?;
    let (r0, t0) = (closed.r?, closed.t?);
    let (r1, t1) = (m.r?, m.t?);
    let scale = r0.norm().max(t0.norm());
    Some((r0 - r1).norm().max((t0 - t1).norm()) / scale)
}

fn oracle_equivalence(report: &mut Report, rng: &mut ChaCha8Rng, trials: usize) {
    let (mut worst_cont, mut worst_conj) = (0.0f64, 0.0f64);
    let mut missing = 0usize;
    for _ in 0..trials {
        let p = random_potential(rng, false);
        let e = 0.5 * random_beta(rng).powi(2);
        match amplitude_gap(&p, e, MatchingMode::Continued) {
            Some(g) => worst_cont = worst_cont.max(g),
            None => missing += 1,
        }
        let p = random_potential(rng, true);
        match amplitude_gap(&p, e, MatchingMode::Conjugate) {
            Some(g) => worst_conj = worst_conj.max(g),
            None => missing += 1,
        }
    }
    let probe = DeltaPotential::with_g_squared(-0.5, 3.0, 3.75).expect("valid");
    let a = matching_solver(&probe, 1.0, MatchingMode::Conjugate).ok().and_then(|m| m.r);
    let b = matching_solver(&probe, 1.0, MatchingMode::Continued).ok().and_then(|m| m.r);
    let deviation = match (a, b) {
        (Some(a), Some(b)) => (a - b).norm(),
        _ => f64::NAN,
    };
    report.push(
        "[5] oracle equivalence",
        missing == 0 && worst_cont <= 1e-9 && worst_conj <= 1e-9 && deviation > 1e-12,
        format!(
            "continued {worst_cont:.2e}, conjugate (v2=0) {worst_conj:.2e}, probe |r_conj - r_cont| {deviation:.6e}"
        ),
    );
}

fn double_roots(report: &mut Report, rng: &mut ChaCha8Rng) {
    let (mut ok, mut worst_root, mut worst_a) = (true, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let (v1, v2) = (-(10.0 - rng.gen_range(0.0..10.0)), -(10.0 - rng.gen_range(0.0..10.0)));
        let (plus, _) = ss_closed_form(v1, v2);
        if !plus.feasible {
            ok = false;
            continue;
        }
        let Ok(p) = plus.potential(v1, v2) else {
            ok = false;
            continue;
        };
        let q = quartic_coeffs(&p);
        let Ok(set) = quartic_roots(&q) else {
            ok = false;
            continue;
        };
        let hit = set.real_roots().into_iter().find(|&(x, m)| m == 2 && (x - plus.beta).abs() <= 1e-6);
        match hit {
            Some((x, _)) => worst_root = worst_root.max((x - plus.beta).abs()),
            None => ok = false,
        }
        let a = a_factor(v1, v2, plus.g_squared);
        worst_a = worst_a.max(a / plus.g_squared.powi(2).max(1.0));
        ok &= root_nature(&q) == RootNature::BoundaryDoubleRoot;
    }
    report.push(
        "[6] double root at boundary",
        ok && worst_a <= 1e-8,
        format!("max |root - beta+| {worst_root:.2e}, max scaled A {worst_a:.2e}"),
    );
}

fn root_sets(report: &mut Report, rng: &mut ChaCha8Rng, trials: usize) {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut fallbacks = 0usize;
    let mut minimizer_gap = 0.0f64;
    for n in 0..trials {
        let (v1, v2) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let (plus, minus) = ss_closed_form(v1, v2);
        for sol in [plus, minus].into_iter().filter(|s| s.feasible) {
            let Ok(p) = sol.potential(v1, v2) else { continue };
            let q = quartic_coeffs(&p);
            let Ok(set) = quartic_roots(&q) else {
                ok = false;
                continue;
            };
            if !set.converged {
                fallbacks += 1;
            }
            ok &= set
                .real_roots()
                .into_iter()
                .any(|(x, m)| m == 2 && (x - sol.beta).abs() <= 1e-6 * sol.beta.max(1.0));
            let back = set.reconstruct();
            let scale = 1.0 + q.b.abs() + q.c.abs() + q.d.abs() + q.e.abs();
            for (x, y) in [(back.b, q.b), (back.c, q.c), (back.d, q.d), (back.e, q.e)] {
                worst = worst.max((x - y).abs() / scale);
            }
            if n % 20 == 0 {
                if let Ok((beta, _)) = minimize_dsq(&p, crate::oracle::default_beta_max(&p)) {
                    // the global minimum may sit at the other branch's β only if both vanish
                    let (dr, di) = dr_di(&p, beta);
                    minimizer_gap = minimizer_gap.max(dr.hypot(di) / (1.0 + beta * beta));
                }
            }
        }
    }
    report.push(
        "root sets and minimizer",
        ok && worst <= 1e-8 && minimizer_gap <= 1e-6,
        format!("reconstruction {worst:.2e}, min |D| at argmin {minimizer_gap:.2e}, companion fallbacks {fallbacks}"),
    );
}

fn lossy_quadrant(report: &mut Report, rng: &mut ChaCha8Rng, trials: usize) {
    let mut none = 0usize;
    for _ in 0..trials {
        let (v1, v2) = (-(10.0 - rng.gen_range(0.0..10.0)), -(10.0 - rng.gen_range(0.0..10.0)));
        match classify_region(v1, v2) {
            Region::PlusOnly | Region::BothBranches => {}
            _ => none += 1,
        }
    }
    report.push("[7] lossy always singular", none == 0, format!("{none} of {trials} without a plus branch"));
}

fn region_boundary(report: &mut Report) {
    let v2 = 3.0;
    let inside = ss_closed_form(KAPPA * v2 + 1e-9, v2);
    let outside = ss_closed_form(KAPPA * v2 - 1e-3, v2);
    let ok = inside.0.reason != Infeasibility::ComplexSqrt
        && inside.1.reason != Infeasibility::ComplexSqrt
        && outside.0.reason == Infeasibility::ComplexSqrt
        && outside.1.reason == Infeasibility::ComplexSqrt;
    report.push(
        "[8] region boundary",
        ok,
        format!(
            "kappa*3+1e-9: {:?}/{:?}, kappa*3-1e-3: {:?}/{:?}",
            inside.0.reason, inside.1.reason, outside.0.reason, outside.1.reason
        ),
    );
}

fn nhqm_limit(report: &mut Report) {
    let v2 = 3.0;
    let mut ok = true;
    let mut prev_gap = f64::INFINITY;
    let mut parts = Vec::new();
    for v1 in [-1e-3, -1e-4, -1e-5] {
        let (plus, minus) = ss_closed_form(v1, v2);
        let gap = (plus.energy - v2 * v2 / 2.0).abs();
        let ratio = minus.energy / (2.0 * v1 * v1);
        ok &= plus.feasible && minus.feasible && gap <= 10.0 * v1.abs() && gap < prev_gap;
        ok &= (0.99..=1.01).contains(&ratio);
        prev_gap = gap;
        parts.push(format!("v1={v1:e}: |E+-4.5| {gap:.2e}, E-/(2v1^2) {ratio:.6}"));
    }
    report.push("[9] NHQM limit", ok, parts.join("; "));
}

fn anti_hermitian(report: &mut Report, rng: &mut ChaCha8Rng) {
    let mut bad = 0usize;
    for _ in 0..1000 {
        let mut v1: f64 = rng.gen_range(-10.0..10.0);
        if v1 == 0.0 {
            v1 = 1.0;
        }
        if classify_region(v1, 0.0) != Region::None {
            bad += 1;
        }
    }
    report.push("[10] anti-Hermitian no SS", bad == 0, format!("{bad} of 1000 singular"));
}

fn branch_consistency(report: &mut Report, rng: &mut ChaCha8Rng, trials: usize) {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (v1, v2) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let (plus, minus) = ss_closed_form(v1, v2);
        for sol in [plus, minus].into_iter().filter(|s| s.feasible) {
            let direct = g_squared_direct(v1, v2, sol.branch).unwrap_or(f64::NAN);
            let beta = beta_from_g_squared(v1, v2, sol.g_squared);
            let cond = 1.0 + (v1.abs() + v2.abs()) / (v1 + v2).abs();
            worst = worst.max(rel(direct, sol.g_squared) / cond).max(rel(beta, sol.beta) / cond);
        }
    }
    report.push("branch forms agree", worst <= 1e-10, format!("max scaled rel diff {worst:.2e}"));
}

fn discrepancy_notes(report: &mut Report) {
    let (v1, v2) = PRINTED_PAIR;
    let (plus, minus) = ss_closed_form(v1, v2);
    report.notes.push(format!(
        "The reference potential is commonly printed as -10 - 0.5i, i.e. (v1, v2) = ({v1}, {v2}); that pair gives \
         g+^2 = {:.6}, g-^2 = {:.6}, E+ = {:.6}, E- = {:.6}, not the reference 15/4, 5, 2, 9/8. \
         The reference constants are reproduced exactly by (v1, v2) = (-0.5, 3).",
        plus.g_squared, minus.g_squared, plus.energy, minus.energy
    ));

    let v1 = -1e-5;
    let (_, minus) = ss_closed_form(v1, 3.0);
    report.notes.push(format!(
        "v1 -> 0- limit of the minus branch: stated as E-ss -> v1^2/2, closed forms give 2 v1^2 \
         (at v1 = {v1:e}, v2 = 3: E- = {:.6e}, E-/(v1^2/2) = {:.6}, E-/(2 v1^2) = {:.6}).",
        minus.energy,
        minus.energy / (0.5 * v1 * v1),
        minus.energy / (2.0 * v1 * v1)
    ));

    let (pos, _) = ss_closed_form(v1, 3.0);
    let (neg, _) = ss_closed_form(v1, -3.0);
    report.notes.push(format!(
        "plus-branch limit E+ -> v2^2/2 holds for v2 > 0 (v2 = 3: E+ = {:.6}), not under the stated proviso \
         v2 < 0 (v2 = -3: E+ = {:.6e}, g+^2 = {:.6e}).",
        pos.energy, neg.energy, neg.g_squared
    ));

    let probe = DeltaPotential::with_g_squared(-0.5, 3.0, 3.75).expect("valid");
    if let (Ok(a), Ok(b)) = (
        matching_solver(&probe, 1.0, MatchingMode::Conjugate),
        matching_solver(&probe, 1.0, MatchingMode::Continued),
    ) {
        if let (Some(ra), Some(rb)) = (a.r, b.r) {
            report.notes.push(format!(
                "literal real-quaternion potential vs continued closed forms at (v1, v2, g^2, E) = (-0.5, 3, 3.75, 1): \
                 r_conj = {:.9}{:+.9}i, r_cont = {:.9}{:+.9}i, |diff| = {:.6e}.",
                ra.re,
                ra.im,
                rb.re,
                rb.im,
                (ra - rb).norm()
            ));
        }
    }
}
