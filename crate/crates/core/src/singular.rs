//! Spectral singularities of the quaternionic point interaction.
//!
//! A singularity is a real `β > 0` where `D(β) = 0`. Since
//! `|D|² = β⁴ + bβ³ + cβ² + dβ + e` with
//!
//! ```text
//! b = 2(v1 - v2)
//! c = 2(v1 - v2)²
//! d = 2[g²(v1 + v2) + (v1 - v2)(v1² + v2²)]
//! e = g⁴ + 2g²(v1² - v2²) + (v1² + v2²)²
//! ```
//!
//! the problem reduces to real roots of a non-negative quartic. Such roots
//! are always of even multiplicity, so the discriminant sits on `Δ = 0`
//! exactly when a singularity exists.
//!
//! The closed-form branches come from solving `D_r = 0` and `D_i = 0`
//! simultaneously for `(β, g²)` at fixed `(v1, v2)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scatter::DeltaPotential;

/// `-3 + 2√2`. Branches need a real square root, which fails for
/// `v1 ∈ ((-3 - 2√2) v2, KAPPA · v2)` when `v2 > 0`.
pub const KAPPA: f64 = 2.0 * std::f64::consts::SQRT_2 - 3.0;

/// `|Δ|` at or below this fraction of the summed term magnitudes counts as zero.
pub const TOL_DELTA: f64 = 1e-10;

/// Relative guard on `|v1 + v2|` before dividing by it.
pub const TOL_DEGENERATE: f64 = 1e-12;

/// Monic quartic `β⁴ + bβ³ + cβ² + dβ + e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarticCoeffs {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl QuarticCoeffs {
    pub fn new(b: f64, c: f64, d: f64, e: f64) -> Self {
        QuarticCoeffs { b, c, d, e }
    }

    pub fn eval(&self, beta: f64) -> f64 {
        (((beta + self.b) * beta + self.c) * beta + self.d) * beta + self.e
    }
}

pub fn quartic_coeffs(p: &DeltaPotential) -> QuarticCoeffs {
    let (v1, v2, g2) = (p.v1, p.v2, p.g_squared());
    let diff = v1 - v2;
    let sq = v1 * v1 + v2 * v2;
    QuarticCoeffs {
        b: 2.0 * diff,
        c: 2.0 * diff * diff,
        d: 2.0 * (g2 * (v1 + v2) + diff * sq),
        e: g2 * g2 + 2.0 * g2 * (v1 * v1 - v2 * v2) + sq * sq,
    }
}

/// The sixteen monomials of the quartic discriminant, in the usual order.
pub fn discriminant_terms(q: &QuarticCoeffs) -> [f64; 16] {
    let QuarticCoeffs { b, c, d, e } = *q;
    [
        256.0 * e.powi(3),
        -192.0 * b * d * e * e,
        -128.0 * c * c * e * e,
        144.0 * c * d * d * e,
        -27.0 * d.powi(4),
        144.0 * b * b * c * e * e,
        -6.0 * b * b * d * d * e,
        -80.0 * b * c * c * d * e,
        18.0 * b * c * d.powi(3),
        16.0 * c.powi(4) * e,
        -4.0 * c.powi(3) * d * d,
        -27.0 * b.powi(4) * e * e,
        18.0 * b.powi(3) * c * d * e,
        -4.0 * b.powi(3) * d.powi(3),
        -4.0 * b * b * c.powi(3) * e,
        b * b * c * c * d * d,
    ]
}

/// The sixteen-term expansion, accumulated in double-double arithmetic.
///
/// Near a repeated root the terms cancel by ten or more orders of
/// magnitude, which plain `f64` summation cannot resolve.
pub fn discriminant_expanded(q: &QuarticCoeffs) -> f64 {
    expand_discriminant([q.b, q.c, q.d, q.e].map(DoubleDouble::from)).value()
}

/// The same expansion for a potential's quartic, with the coefficients
/// themselves formed in double-double from `(v1, v2, g²)`.
///
/// Rounding `b, c, d, e` to `f64` first perturbs `Δ` by roughly
/// `ε · Σ|terms|`, which dominates `Δ` close to a singular configuration.
pub fn discriminant_expanded_for(p: &DeltaPotential) -> f64 {
    let dd = DoubleDouble::from;
    let (v1, v2, g2) = (dd(p.v1), dd(p.v2), dd(p.g_squared()));
    let diff = v1.add(v2.neg());
    let sum = v1.add(v2);
    let sq = v1.mul(v1).add(v2.mul(v2));
    let two = dd(2.0);
    let b = two.mul(diff);
    let c = two.mul(diff).mul(diff);
    let d = two.mul(g2.mul(sum).add(diff.mul(sq)));
    let e = g2.mul(g2).add(two.mul(g2).mul(sum.mul(diff))).add(sq.mul(sq));
    expand_discriminant([b, c, d, e]).value()
}

fn expand_discriminant([b, c, d, e]: [DoubleDouble; 4]) -> DoubleDouble {
    let monomials: [(f64, [Option<DoubleDouble>; 6]); 16] = {
        let s = Some;
        [
            (256.0, [s(e), s(e), s(e), None, None, None]),
            (-192.0, [s(b), s(d), s(e), s(e), None, None]),
            (-128.0, [s(c), s(c), s(e), s(e), None, None]),
            (144.0, [s(c), s(d), s(d), s(e), None, None]),
            (-27.0, [s(d), s(d), s(d), s(d), None, None]),
            (144.0, [s(b), s(b), s(c), s(e), s(e), None]),
            (-6.0, [s(b), s(b), s(d), s(d), s(e), None]),
            (-80.0, [s(b), s(c), s(c), s(d), s(e), None]),
            (18.0, [s(b), s(c), s(d), s(d), s(d), None]),
            (16.0, [s(c), s(c), s(c), s(c), s(e), None]),
            (-4.0, [s(c), s(c), s(c), s(d), s(d), None]),
            (-27.0, [s(b), s(b), s(b), s(b), s(e), s(e)]),
            (18.0, [s(b), s(b), s(b), s(c), s(d), s(e)]),
            (-4.0, [s(b), s(b), s(b), s(d), s(d), s(d)]),
            (-4.0, [s(b), s(b), s(c), s(c), s(c), s(e)]),
            (1.0, [s(b), s(b), s(c), s(c), s(d), s(d)]),
        ]
    };
    monomials
        .iter()
        .map(|(k, factors)| factors.iter().flatten().fold(DoubleDouble::from(*k), |acc, f| acc.mul(*f)))
        .fold(DoubleDouble::from(0.0), |acc, t| acc.add(t))
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

impl DoubleDouble {
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        DoubleDouble { hi: s, lo: b - (s - a) }
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        Self::quick_two_sum(p, err + (self.hi * o.lo + self.lo * o.hi))
    }

    fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let (t, f) = Self::two_sum(self.lo, o.lo);
        let r = Self::quick_two_sum(s, e + t);
        Self::quick_two_sum(r.hi, r.lo + f)
    }

    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Returns `(A, B, 64·A·B)`, the factored discriminant for a potential.
pub fn discriminant_factored(p: &DeltaPotential) -> (f64, f64, f64) {
    let (v1, v2, g2) = (p.v1, p.v2, p.g_squared());
    let a = a_factor(v1, v2, g2);
    let b = 4.0 * g2 * g2 + 4.0 * g2 * (v1 * v1 - v2 * v2) + (v1 * v1 + v2 * v2).powi(2);
    (a, b, 64.0 * a * b)
}

/// `A = [g⁴ + g²(v1² - v2²) - 2 v1 v2 (v1 + v2)²]²`
pub fn a_factor(v1: f64, v2: f64, g_squared: f64) -> f64 {
    let inner = g_squared * g_squared + g_squared * (v1 * v1 - v2 * v2) - 2.0 * v1 * v2 * (v1 + v2).powi(2);
    inner * inner
}

/// `(P, Q) = (8c - 3b², 64e - 16c² + 16b²c - 16bd - 3b⁴)`.
pub fn pq_classifiers(q: &QuarticCoeffs) -> (f64, f64) {
    let QuarticCoeffs { b, c, d, e } = *q;
    let p = 8.0 * c - 3.0 * b * b;
    let q = 64.0 * e - 16.0 * c * c + 16.0 * b * b * c - 16.0 * b * d - 3.0 * b.powi(4);
    (p, q)
}

/// `P` and `Q` after substituting the potential's coefficients:
/// `P = 4(v1 - v2)²`, `Q = 16[4g⁴ + 4g²(v1² - v2²) + (v1 + v2)⁴]`.
pub fn pq_simplified(p: &DeltaPotential) -> (f64, f64) {
    let (v1, v2, g2) = (p.v1, p.v2, p.g_squared());
    let pv = 4.0 * (v1 - v2).powi(2);
    let qv = 16.0 * (4.0 * g2 * g2 + 4.0 * g2 * (v1 * v1 - v2 * v2) + (v1 + v2).powi(4));
    (pv, qv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootNature {
    TwoDistinctReal,
    AllFourReal,
    NoReal,
    /// `Δ` vanishes to working precision: a repeated root.
    BoundaryDoubleRoot,
}

pub fn root_nature(q: &QuarticCoeffs) -> RootNature {
    let delta = discriminant_expanded(q);
    let scale: f64 = discriminant_terms(q).iter().map(|t| t.abs()).sum();
    if delta.abs() <= TOL_DELTA * scale {
        return RootNature::BoundaryDoubleRoot;
    }
    if delta < 0.0 {
        return RootNature::TwoDistinctReal;
    }
    let (p, qv) = pq_classifiers(q);
    if p < 0.0 && qv < 0.0 {
        RootNature::AllFourReal
    } else {
        RootNature::NoReal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarticAnalysis {
    pub coeffs: QuarticCoeffs,
    pub delta: f64,
    pub a_factor: f64,
    pub b_factor: f64,
    pub p_val: f64,
    pub q_val: f64,
    pub verdict: RootNature,
}

pub fn analyze(p: &DeltaPotential) -> QuarticAnalysis {
    let coeffs = quartic_coeffs(p);
    let (a_factor, b_factor, _) = discriminant_factored(p);
    let (p_val, q_val) = pq_classifiers(&coeffs);
    QuarticAnalysis {
        coeffs,
        delta: discriminant_expanded_for(p),
        a_factor,
        b_factor,
        p_val,
        q_val,
        verdict: root_nature(&coeffs),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Infeasibility {
    #[serde(rename = "OK")]
    Ok,
    NegativeGSquared,
    NonPositiveBeta,
    ComplexSqrt,
    DegenerateSum,
}

/// One branch of the simultaneous solution of `D_r = D_i = 0`.
///
/// Values that cannot be formed (a complex square root, a vanishing
/// `v1 + v2`) are NaN; `g_squared` is 0 for `DegenerateSum`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SSBranchSolution {
    pub branch: Branch,
    pub g_squared: f64,
    pub beta: f64,
    pub energy: f64,
    pub feasible: bool,
    pub reason: Infeasibility,
}

impl SSBranchSolution {
    fn unformed(branch: Branch, g_squared: f64, reason: Infeasibility) -> Self {
        SSBranchSolution {
            branch,
            g_squared,
            beta: f64::NAN,
            energy: f64::NAN,
            feasible: false,
            reason,
        }
    }

    /// The potential at which this branch is singular.
    pub fn potential(&self, v1: f64, v2: f64) -> Result<DeltaPotential> {
        DeltaPotential::with_g_squared(v1, v2, self.g_squared)
    }
}

/// Both branches at `(v1, v2)`.
///
/// `β±` are the roots of `β² + (v1 - v2)β - 2 v1 v2 = 0`, taken in the
/// cancellation-free order, and `g±² = (v1 + v2) β∓` follows from
/// `D_i = 0` together with `β+ + β- = -(v1 - v2)`. [`g_squared_direct`]
/// and [`beta_from_g_squared`] give the textbook forms of the same values.
pub fn ss_closed_form(v1: f64, v2: f64) -> (SSBranchSolution, SSBranchSolution) {
    use Branch::{Minus, Plus};

    let sum = v1 + v2;
    if sum.abs() <= TOL_DEGENERATE * v1.abs().max(v2.abs()).max(1.0) {
        return (
            SSBranchSolution::unformed(Plus, 0.0, Infeasibility::DegenerateSum),
            SSBranchSolution::unformed(Minus, 0.0, Infeasibility::DegenerateSum),
        );
    }
    let disc = branch_discriminant(v1, v2);
    if disc < 0.0 {
        return (
            SSBranchSolution::unformed(Plus, f64::NAN, Infeasibility::ComplexSqrt),
            SSBranchSolution::unformed(Minus, f64::NAN, Infeasibility::ComplexSqrt),
        );
    }

    let root = disc.sqrt();
    let lin = v1 - v2;
    let product = -2.0 * v1 * v2;
    let (beta_plus, beta_minus) = if lin <= 0.0 {
        let bp = 0.5 * (-lin + root);
        (bp, if bp != 0.0 { product / bp } else { 0.0 })
    } else {
        let bm = 0.5 * (-lin - root);
        (product / bm, bm)
    };

    let make = |branch: Branch, beta: f64, g_squared: f64| {
        let reason = if !(g_squared > 0.0) {
            Infeasibility::NegativeGSquared
        } else if !(beta > 0.0) {
            Infeasibility::NonPositiveBeta
        } else {
            Infeasibility::Ok
        };
        SSBranchSolution {
            branch,
            g_squared,
            beta,
            energy: 0.5 * beta * beta,
            feasible: reason == Infeasibility::Ok,
            reason,
        }
    };
    (
        make(Plus, beta_plus, sum * beta_minus),
        make(Minus, beta_minus, sum * beta_plus),
    )
}

/// `(v1 + v2)² + 4 v1 v2`, the radicand shared by both branches.
pub fn branch_discriminant(v1: f64, v2: f64) -> f64 {
    (v1 + v2).powi(2) + 4.0 * v1 * v2
}

/// `g±² = -½(v1 + v2)[(v1 - v2) ± √((v1 + v2)² + 4 v1 v2)]`, or `None` for a
/// negative radicand.
pub fn g_squared_direct(v1: f64, v2: f64, branch: Branch) -> Option<f64> {
    let disc = branch_discriminant(v1, v2);
    (disc >= 0.0).then(|| -0.5 * (v1 + v2) * ((v1 - v2) + branch.sign() * disc.sqrt()))
}

/// `β = -(v1 - v2) - g² / (v1 + v2)`, from `D_i = 0`.
pub fn beta_from_g_squared(v1: f64, v2: f64, g_squared: f64) -> f64 {
    -(v1 - v2) - g_squared / (v1 + v2)
}

/// `E±ss = ½[(v2 - v1) - g±²/(v1 + v2)]²`.
pub fn energy_from_g_squared(v1: f64, v2: f64, g_squared: f64) -> f64 {
    0.5 * ((v2 - v1) - g_squared / (v1 + v2)).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    BothBranches,
    PlusOnly,
    MinusOnly,
    None,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::BothBranches => "BothBranches",
            Region::PlusOnly => "PlusOnly",
            Region::MinusOnly => "MinusOnly",
            Region::None => "None",
        }
    }
}

pub fn region_of(plus: &SSBranchSolution, minus: &SSBranchSolution) -> Region {
    match (plus.feasible, minus.feasible) {
        (true, true) => Region::BothBranches,
        (true, false) => Region::PlusOnly,
        (false, true) => Region::MinusOnly,
        (false, false) => Region::None,
    }
}

pub fn classify_region(v1: f64, v2: f64) -> Region {
    let (plus, minus) = ss_closed_form(v1, v2);
    region_of(&plus, &minus)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub v1: f64,
    pub v2: f64,
    pub classification: Region,
    pub e_plus: Option<f64>,
    pub e_minus: Option<f64>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * (i as f64 / last)).collect();
    out[n - 1] = hi;
    out
}

/// Classifies an `n1 × n2` grid, rows ordered by `v1` then `v2`.
pub fn scan_region(v1_range: (f64, f64), v2_range: (f64, f64), n1: usize, n2: usize) -> Result<Vec<ScanRow>> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::domain(format!("scan grid needs at least 2 points per axis, got {n1}x{n2}")));
    }
    for (lo, hi) in [v1_range, v2_range] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::domain(format!("invalid scan interval [{lo}, {hi}]")));
        }
    }
    let v1s = linspace(v1_range.0, v1_range.1, n1);
    let v2s = linspace(v2_range.0, v2_range.1, n2);
    Ok((0..n1 * n2)
        .into_par_iter()
        .map(|idx| {
            let (v1, v2) = (v1s[idx / n2], v2s[idx % n2]);
            let (plus, minus) = ss_closed_form(v1, v2);
            ScanRow {
                v1,
                v2,
                classification: region_of(&plus, &minus),
                e_plus: plus.feasible.then_some(plus.energy),
                e_minus: minus.feasible.then_some(minus.energy),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scatter::{denominator, dr_di};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pot(v1: f64, v2: f64, g2: f64) -> DeltaPotential {
        DeltaPotential::with_g_squared(v1, v2, g2).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn coefficient_examples() {
        let q = quartic_coeffs(&pot(-0.5, 3.0, 3.75));
        assert_eq!((q.b, q.c, q.d), (-7.0, 24.5, -46.0));
        assert!((q.e - 34.0).abs() < 1e-13);
        assert!(q.eval(2.0).abs() < 1e-13);

        let q = quartic_coeffs(&pot(0.0, 0.0, 2.25));
        assert_eq!(q, QuarticCoeffs::new(0.0, 0.0, 0.0, 2.25 * 2.25));

        let q = quartic_coeffs(&pot(1.0, 0.0, 1.0));
        assert_eq!(q, QuarticCoeffs::new(2.0, 2.0, 4.0, 4.0));
        assert_eq!(q.eval(1.0), 13.0);
    }

    #[test]
    fn discriminant_examples() {
        let reference = QuarticCoeffs::new(-7.0, 24.5, -46.0, 34.0);
        assert_eq!(discriminant_expanded(&reference), 0.0);
        let reference = quartic_coeffs(&pot(-0.5, 3.0, 3.75));
        let scale: f64 = discriminant_terms(&reference).iter().map(|t| t.abs()).sum();
        assert!(discriminant_expanded(&reference).abs() <= 1e-12 * scale);
        assert_eq!(discriminant_expanded(&QuarticCoeffs::new(0.0, 0.0, 0.0, 3.0)), 256.0 * 27.0);
        assert_eq!(discriminant_expanded(&quartic_coeffs(&pot(1.0, 0.0, 1.0))), 2304.0);

        let (a, b, delta) = discriminant_factored(&pot(-0.5, 3.0, 3.75));
        assert!(a < 1e-26 && (b - 10.5625).abs() < 1e-12 && delta.abs() < 1e-23);
        assert_eq!(discriminant_factored(&pot(1.0, 0.0, 1.0)), (4.0, 9.0, 2304.0));
        let g2: f64 = 1.5;
        let (a, b, delta) = discriminant_factored(&pot(0.0, 0.0, g2));
        assert!(rel(a, g2.powi(4)) < 1e-15);
        assert!(rel(b, 4.0 * g2.powi(2)) < 1e-15);
        assert!(rel(delta, 256.0 * g2.powi(6)) < 1e-15);
    }

    #[test]
    fn pq_examples() {
        let exact = QuarticCoeffs::new(-7.0, 24.5, -46.0, 34.0);
        assert_eq!(pq_classifiers(&exact), (49.0, -575.0));
        let p = pot(-0.5, 3.0, 3.75);
        let (pr, qr) = pq_classifiers(&quartic_coeffs(&p));
        let (ps, qs) = pq_simplified(&p);
        assert_eq!((pr, ps), (49.0, 49.0));
        assert!((qr + 575.0).abs() < 1e-11 && (qs + 575.0).abs() < 1e-11);
        assert_eq!(pq_classifiers(&QuarticCoeffs::new(0.0, 0.0, 0.0, 2.0)), (0.0, 128.0));
        assert_eq!(pq_classifiers(&quartic_coeffs(&pot(1.0, 0.0, 1.0))), (4.0, 144.0));
    }

    #[test]
    fn root_nature_examples() {
        assert_eq!(root_nature(&quartic_coeffs(&pot(-0.5, 3.0, 3.75))), RootNature::BoundaryDoubleRoot);
        let four = QuarticCoeffs::new(-10.0, 35.0, -50.0, 24.0);
        assert_eq!(pq_classifiers(&four), (-20.0, -64.0));
        assert_eq!(root_nature(&four), RootNature::AllFourReal);
        assert_eq!(root_nature(&quartic_coeffs(&pot(1.0, 0.0, 1.0))), RootNature::NoReal);
        // (β² - 1)(β² + 1): two real, two imaginary
        assert_eq!(root_nature(&QuarticCoeffs::new(0.0, 0.0, 0.0, -1.0)), RootNature::TwoDistinctReal);
        let analysis = analyze(&pot(1.0, 0.0, 1.0));
        assert_eq!(analysis.delta, 2304.0);
        assert_eq!((analysis.a_factor, analysis.b_factor), (4.0, 9.0));
    }

    #[test]
    fn closed_form_reference_pair() {
        let (plus, minus) = ss_closed_form(-0.5, 3.0);
        assert!(plus.feasible && minus.feasible);
        assert!((plus.g_squared - 3.75).abs() < 1e-12);
        assert!((plus.beta - 2.0).abs() < 1e-12);
        assert!((plus.energy - 2.0).abs() < 1e-12);
        assert!((minus.g_squared - 5.0).abs() < 1e-12);
        assert!((minus.beta - 1.5).abs() < 1e-12);
        assert!((minus.energy - 1.125).abs() < 1e-12);
    }

    #[test]
    fn closed_form_lossy_pair() {
        let (plus, minus) = ss_closed_form(-1.0, -1.0);
        let s2 = std::f64::consts::SQRT_2;
        assert!(plus.feasible);
        assert!((plus.g_squared - 2.0 * s2).abs() < 1e-12);
        assert!((plus.beta - s2).abs() < 1e-12);
        assert!((plus.energy - 1.0).abs() < 1e-12);
        assert!(!minus.feasible);
        assert_eq!(minus.reason, Infeasibility::NegativeGSquared);
        assert!((minus.g_squared + 2.0 * s2).abs() < 1e-12);
    }

    #[test]
    fn closed_form_positive_v1_is_infeasible() {
        let (plus, minus) = ss_closed_form(1.0, 3.0);
        assert_eq!(plus.reason, Infeasibility::NegativeGSquared);
        assert!((plus.g_squared + 6.583005244258363).abs() < 1e-9);
        assert_eq!(minus.reason, Infeasibility::NonPositiveBeta);
        assert!((minus.beta + 1.6457513110645907).abs() < 1e-9);
    }

    #[test]
    fn degenerate_and_complex_guards() {
        let (plus, minus) = ss_closed_form(-1.0, 1.0);
        assert_eq!(plus.reason, Infeasibility::DegenerateSum);
        assert_eq!(minus.reason, Infeasibility::DegenerateSum);
        assert_eq!(plus.g_squared, 0.0);

        let (plus, minus) = ss_closed_form(-5.0, 3.0);
        assert_eq!(plus.reason, Infeasibility::ComplexSqrt);
        assert_eq!(minus.reason, Infeasibility::ComplexSqrt);
    }

    #[test]
    fn region_examples() {
        assert!(KAPPA * 3.0 <= -0.5);
        assert_eq!(classify_region(-0.5, 3.0), Region::BothBranches);
        assert_eq!(classify_region(-1.0, -1.0), Region::PlusOnly);
        assert_eq!(classify_region(-20.0, 3.0), Region::None);
        let (plus, minus) = ss_closed_form(-20.0, 3.0);
        assert!((plus.g_squared + 136.0).abs() < 1e-9);
        assert!((minus.g_squared + 255.0).abs() < 1e-9);
    }

    #[test]
    fn kappa_bounds_real_branches() {
        let v2 = 3.0;
        assert_ne!(ss_closed_form(KAPPA * v2 + 1e-9, v2).0.reason, Infeasibility::ComplexSqrt);
        assert_eq!(ss_closed_form(KAPPA * v2 - 1e-3, v2).0.reason, Infeasibility::ComplexSqrt);
        assert_eq!(ss_closed_form(KAPPA * v2 - 1e-3, v2).1.reason, Infeasibility::ComplexSqrt);
    }

    #[test]
    fn scan_examples() {
        let rows = scan_region((-1.0, -0.01), (-1.0, -0.01), 10, 10).unwrap();
        assert_eq!(rows.len(), 100);
        assert!(rows.iter().all(|r| r.classification != Region::None));
        assert_eq!((rows[0].v1, rows[0].v2), (-1.0, -1.0));
        assert_eq!((rows[1].v1, rows[1].v2), (-1.0, -0.89));
        assert_eq!(rows[99].v1, -0.01);

        let rows = scan_region((0.1, 1.0), (0.1, 1.0), 5, 5).unwrap();
        assert!(rows.iter().all(|r| r.classification == Region::None && r.e_plus.is_none()));

        assert!(scan_region((0.0, 1.0), (0.0, 1.0), 1, 5).is_err());
        assert!(scan_region((1.0, 0.0), (0.0, 1.0), 3, 3).is_err());
    }

    #[test]
    fn random_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..10_000 {
            let p = pot(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(1e-9..100.0));
            let beta = rng.gen_range(1e-9..20.0);
            let q = quartic_coeffs(&p);
            let (dr, di) = dr_di(&p, beta);
            let dsq = denominator(&p, beta).norm_sqr();
            assert!(rel(q.eval(beta), dr * dr + di * di) <= 1e-9);
            assert!(rel(q.eval(beta), dsq) <= 1e-9);
            assert_eq!(q.c, q.b * q.b / 2.0);

            let (a, b, factored) = discriminant_factored(&p);
            let expanded = discriminant_expanded_for(&p);
            assert!((discriminant_expanded(&q) - expanded).abs() <= 1e-9 * discriminant_terms(&q).iter().map(|t| t.abs()).sum::<f64>());
            let scale: f64 = discriminant_terms(&q).iter().map(|t| t.abs()).sum();
            assert!(
                (expanded - factored).abs() <= (1e-6 * expanded.abs().max(factored.abs())).max(1e-8),
                "{p:?} expanded {expanded} factored {factored} scale {scale}"
            );
            assert!(a >= 0.0 && b >= 0.0);

            let (p_raw, q_raw) = pq_classifiers(&q);
            let (p_s, q_s) = pq_simplified(&p);
            assert!((p_raw - p_s).abs() <= 1e-10 * p_s.abs().max(1.0));
            assert!((q_raw - q_s).abs() <= 1e-10 * q_s.abs().max(1.0));
        }
    }

    #[test]
    fn branch_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut checked = 0;
        for _ in 0..10_000 {
            let (v1, v2) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let (plus, minus) = ss_closed_form(v1, v2);
            for sol in [plus, minus] {
                if !sol.g_squared.is_finite() || sol.reason == Infeasibility::DegenerateSum {
                    continue;
                }
                let direct = g_squared_direct(v1, v2, sol.branch).unwrap();
                let scale = sol.g_squared.abs().max(1.0);
                assert!((direct - sol.g_squared).abs() <= 1e-10 * scale * (1.0 + (v1 + v2).abs()));
                let beta = beta_from_g_squared(v1, v2, sol.g_squared);
                assert!((beta - sol.beta).abs() <= 1e-10 * sol.beta.abs().max(1.0) * (1.0 + 1.0 / (v1 + v2).abs()));
                checked += 1;
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn feasible_branches_zero_the_denominator() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut feasible = 0;
        for _ in 0..10_000 {
            let (v1, v2) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let (plus, minus) = ss_closed_form(v1, v2);
            for sol in [plus, minus].into_iter().filter(|s| s.feasible) {
                feasible += 1;
                assert!(sol.g_squared > 0.0 && sol.beta > 0.0);
                assert_eq!(sol.energy, sol.beta * sol.beta / 2.0);
                let p = sol.potential(v1, v2).unwrap();
                let (dr, di) = dr_di(&p, sol.beta);
                let scale = 1.0 + v1 * v1 + v2 * v2 + sol.g_squared + sol.beta * sol.beta;
                assert!(dr.abs() <= 1e-10 * scale && di.abs() <= 1e-10 * scale, "{v1} {v2} {sol:?}");
                let a = a_factor(v1, v2, sol.g_squared);
                assert!(a <= 1e-8 * sol.g_squared.powi(2).max(1.0), "A = {a}");
            }
        }
        assert!(feasible > 1000);
    }

    #[test]
    fn lossy_quadrant_always_has_plus_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let (v1, v2) = (-rng.gen_range(1e-6..10.0), -rng.gen_range(1e-6..10.0));
            assert!(ss_closed_form(v1, v2).0.feasible, "({v1}, {v2})");
        }
    }

    #[test]
    fn anti_hermitian_never_singular() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let v1: f64 = rng.gen_range(-10.0..10.0);
            assert_eq!(classify_region(v1, 0.0), Region::None);
        }
    }
}
