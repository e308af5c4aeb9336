//! Integrability of boundary modules and the search for curves whose
//! `α`-periods are mutually rational.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::current::{hat_swap, required_charges};
use crate::error::{Error, Result};
use crate::periods::{elliptic_oracle, full_periods, reduced_alpha_periods, segment_integral, HyperellipticCurve, PeriodData};

/// Tolerance of the integer test in [`classify_charge`].
pub const CHARGE_TOL: f64 = 1e-9;
/// Target accuracy of the bisection in [`search_rational`].
pub const RATIO_TOL: f64 = 1e-11;
pub const MAX_BISECTIONS: usize = 200;
/// Sample count used to bracket the target and check monotonicity.
pub const BRACKET_SAMPLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChargeKind {
    IntegrableHighest,
    IntegrableLowest,
    Nonintegrable,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChargeClass {
    pub value: Complex64,
    pub class: ChargeKind,
}

/// Positive imaginary integers give integrable highest-weight modules,
/// negative ones integrable lowest-weight modules; everything else,
/// zero included, is nonintegrable.
pub fn classify_charge(c: Complex64) -> ChargeClass {
    let n = c.im.round();
    let imaginary_integer = c.re.abs() <= CHARGE_TOL && (c.im - n).abs() <= CHARGE_TOL && n != 0.0;
    let class = match (imaginary_integer, n > 0.0) {
        (true, true) => ChargeKind::IntegrableHighest,
        (true, false) => ChargeKind::IntegrableLowest,
        (false, _) => ChargeKind::Nonintegrable,
    };
    ChargeClass { value: c, class }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImpossibilityReport {
    /// Smallest distance from "all periods imaginary" over the sampled combinations.
    pub min_distance: f64,
    pub minimizer: (i64, i64),
    pub samples: usize,
}

/// The differential `i(m1 ω1 + m2 ω2)` in the dual basis has imaginary
/// a-periods `i m` and b-periods `i m τ`, whose real parts are `−m Im τ`.
/// Over integer `m ∈ [−5, 5]² \ {0}` this reports the smallest sup norm of
/// those real parts.
pub fn impossibility_check(tau: &Matrix2<Complex64>) -> Result<ImpossibilityReport> {
    if tau.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Input("tau has non-finite entries".into()));
    }
    if (tau[(0, 1)] - tau[(1, 0)]).norm() > 1e-6 * (1.0 + tau.norm()) {
        return Err(Error::Input("tau is not symmetric".into()));
    }
    let im = tau.map(|z| z.im);
    let mut best = (f64::INFINITY, (0, 0));
    let mut samples = 0;
    for m1 in -5i64..=5 {
        for m2 in -5i64..=5 {
            if m1 == 0 && m2 == 0 {
                continue;
            }
            samples += 1;
            let (a, b) = (m1 as f64, m2 as f64);
            let d = (a * im[(0, 0)] + b * im[(1, 0)]).abs().max((a * im[(0, 1)] + b * im[(1, 1)]).abs());
            if d < best.0 {
                best = (d, (m1, m2));
            }
        }
    }
    Ok(ImpossibilityReport { min_distance: best.0, minimizer: best.1, samples })
}

/// `∫_t^r R dx / ∫_s^t R dx`, the ratio `|Im a1| / |b2|` of the two nonzero `α`-periods.
pub fn period_ratio(curve: &HyperellipticCurve) -> Result<f64> {
    let HyperellipticCurve { s, t, r } = *curve;
    Ok(segment_integral(curve, 1, t, r)? / segment_integral(curve, 1, s, t)?)
}

/// Limit of [`period_ratio`] as `s → 0` with `t`, `r` fixed.
pub fn ratio_lower_limit(t: f64, r: f64) -> Result<f64> {
    let m = (t * t) / (r * r);
    Ok(elliptic_oracle(1.0 - m)? / elliptic_oracle(m)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub curve: HyperellipticCurve,
    pub ratio_found: f64,
    pub target: (u64, u64),
    pub scale: Complex64,
    /// Scaled `(a1, b2)` periods of `α`.
    pub scaled_periods: (Complex64, Complex64),
    /// Sign of the scaled b2-period.
    pub b2_sign: i32,
    pub iterations: usize,
    pub monotone: bool,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Parse `"p/q"`.
pub fn parse_target(text: &str) -> Result<(u64, u64)> {
    let (p, q) = text.split_once('/').ok_or_else(|| Error::Input(format!("target must look like p/q, got '{text}'")))?;
    let p: u64 = p.trim().parse().map_err(|_| Error::Input(format!("bad numerator '{p}'")))?;
    let q: u64 = q.trim().parse().map_err(|_| Error::Input(format!("bad denominator '{q}'")))?;
    Ok((p, q))
}

/// Outcome of [`solve_ratio`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioSolution {
    pub s: f64,
    pub ratio: f64,
    pub iterations: usize,
    pub monotone: bool,
}

/// Find `s ∈ (0, t)` with `period_ratio(s, t, r) = target`.
///
/// The ratio is sampled on a uniform grid in `s` (plus its `s → 0` limit) to
/// bracket the target and to check monotonicity; the first sign change is
/// refined by bisection.
pub fn solve_ratio(target: f64, t: f64, r: f64) -> Result<RatioSolution> {
    if !(t.is_finite() && r.is_finite() && 0.0 < t && t < r) {
        return Err(Error::Input(format!("search needs 0 < t < r, got t = {t}, r = {r}")));
    }
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::Input(format!("target ratio must be positive, got {target}")));
    }
    let ratio_at = |s: f64| -> Result<f64> { period_ratio(&HyperellipticCurve::new(s, t, r)?) };
    let s_min = t * 1e-9;
    let s_max = t * (1.0 - 1e-12);
    let mut samples = vec![(s_min, ratio_at(s_min)?)];
    for i in 1..BRACKET_SAMPLES {
        let s = t * i as f64 / BRACKET_SAMPLES as f64;
        samples.push((s, ratio_at(s)?));
    }
    samples.push((s_max, ratio_at(s_max)?));
    let monotone = samples.windows(2).all(|w| w[1].1 > w[0].1);
    let lo = ratio_lower_limit(t, r)?.min(samples.iter().map(|x| x.1).fold(f64::INFINITY, f64::min));
    let hi = samples.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    let bracket = samples.windows(2).find(|w| (w[0].1 - target) * (w[1].1 - target) <= 0.0);
    let (mut a, mut b, mut fa) = match bracket {
        Some(w) => (w[0].0, w[1].0, w[0].1 - target),
        None => return Err(Error::NoSolution { target, lo, hi }),
    };
    let mut s = 0.5 * (a + b);
    let mut fs = ratio_at(s)? - target;
    let mut iterations = 1;
    while iterations < MAX_BISECTIONS && fs.abs() > 0.01 * RATIO_TOL {
        if fa * fs <= 0.0 {
            b = s;
        } else {
            a = s;
            fa = fs;
        }
        let mid = 0.5 * (a + b);
        if mid == s || mid <= a || mid >= b {
            break;
        }
        s = mid;
        fs = ratio_at(s)? - target;
        iterations += 1;
    }
    if fs.abs() > RATIO_TOL {
        return Err(Error::Numerical(format!("bisection stalled at |ratio - target| = {:e}", fs.abs())));
    }
    Ok(RatioSolution { s, ratio: fs + target, iterations, monotone })
}

/// Find `s ∈ (0, t)` with `period_ratio = p/q`, then scale `α` by
/// `λ = p / Im(a1)` so that its periods become `(i p, −q)`.
pub fn search_rational(p: u64, q: u64, t: f64, r: f64) -> Result<SearchResult> {
    if p == 0 || q == 0 {
        return Err(Error::Input("target p/q needs p, q >= 1".into()));
    }
    if gcd(p, q) != 1 {
        return Err(Error::Input(format!("target {p}/{q} is not in lowest terms")));
    }
    let sol = solve_ratio(p as f64 / q as f64, t, r)?;
    let curve = HyperellipticCurve::new(sol.s, t, r)?;
    let periods = reduced_alpha_periods(&curve)?;
    let lambda = p as f64 / periods.a1.im;
    let scaled = periods.scale(lambda);
    Ok(SearchResult {
        curve,
        ratio_found: sol.ratio,
        target: (p, q),
        scale: Complex64::new(lambda, 0.0),
        scaled_periods: (scaled.a1, scaled.b2),
        b2_sign: if scaled.b2.re < 0.0 { -1 } else { 1 },
        iterations: sol.iterations,
        monotone: sol.monotone,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChargeEntry {
    pub cycle: String,
    pub charge: Complex64,
    pub class: ChargeKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    pub entries: Vec<ChargeEntry>,
    pub integrable: usize,
    pub nonintegrable: usize,
}

impl IntegrabilityReport {
    fn from_entries(entries: Vec<ChargeEntry>) -> Self {
        let integrable = entries.iter().filter(|e| e.class != ChargeKind::Nonintegrable).count();
        let nonintegrable = entries.len() - integrable;
        Self { entries, integrable, nonintegrable }
    }
}

/// Charges `−ĉ_j` of a torus differential with periods `(c1, c2)`, classified.
pub fn torus_integrability(c1: Complex64, c2: Complex64) -> IntegrabilityReport {
    IntegrabilityReport::from_entries(
        required_charges(c1, c2)
            .into_iter()
            .map(|(cycle, charge)| ChargeEntry { cycle: cycle.name().into(), charge, class: classify_charge(charge).class })
            .collect(),
    )
}

pub const GENUS2_CYCLES: [&str; 4] = ["a1", "a2", "b1", "b2"];

/// Charges `−ĉ_j` for a genus-2 period vector `(a1, a2, b1, b2)`, zero
/// charges omitted. The entry for cycle `γ_j` carries the dual period.
pub fn genus2_integrability(periods: &[Complex64; 4]) -> Result<IntegrabilityReport> {
    let hat = hat_swap(periods)?;
    Ok(IntegrabilityReport::from_entries(
        hat.iter()
            .zip(GENUS2_CYCLES)
            .filter(|(h, _)| h.norm() > CHARGE_TOL)
            .map(|(h, name)| ChargeEntry { cycle: name.into(), charge: -h, class: classify_charge(-h).class })
            .collect(),
    ))
}

/// Torus report for `coefficient · dz` and genus-2 reports for the scaled `α`
/// of a search result, in both the reduced and the canonical period forms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullReport {
    pub torus: IntegrabilityReport,
    pub genus2_reduced: IntegrabilityReport,
    pub genus2_canonical: IntegrabilityReport,
}

pub fn integrability_report(torus_periods: (Complex64, Complex64), search: &SearchResult) -> Result<FullReport> {
    let lambda = search.scale.re;
    let reduced = reduced_alpha_periods(&search.curve)?.scale(lambda).as_array();
    let pd: PeriodData = full_periods(&search.curve)?;
    let canonical = pd.alpha_row().map(|z| z * lambda);
    Ok(FullReport {
        torus: torus_integrability(torus_periods.0, torus_periods.1),
        genus2_reduced: genus2_integrability(&reduced)?,
        genus2_canonical: genus2_integrability(&canonical)?,
    })
}
