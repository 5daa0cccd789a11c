//! Adaptive quadrature and the upper incomplete gamma function.

use crate::error::{Error, Result};

/// Tolerances and limits for the quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Upper truncation point for semi-infinite integrals whose integrand
    /// carries an e^(-z) factor; at 50 the truncation error is below 2e-22.
    pub tail_cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_depth: 50,
            tail_cutoff: 50.0,
        }
    }
}

/// Adaptive Simpson integration of `f` over `[a, b]`.
pub fn integrate<F>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) {
        return Err(Error::Numeric(format!("bad integration bounds [{a}, {b}]")));
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    let eps = spec.abs_tol.max(spec.rel_tol * whole.abs());
    // intervals at floating-point resolution cannot be refined further and
    // contribute at most width * max|f|
    let width_floor = 8.0 * f64::EPSILON * (b - a);
    adaptive(f, a, b, fa, fm, fb, whole, eps, spec.max_depth, width_floor)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
    width_floor: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps || b - a <= width_floor {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!(
            "quadrature did not converge on [{a}, {b}] (residual {})",
            delta.abs()
        )));
    }
    let half = 0.5 * eps;
    Ok(adaptive(f, a, m, fa, flm, fm, left, half, depth - 1, width_floor)?
        + adaptive(f, m, b, fm, frm, fb, right, half, depth - 1, width_floor)?)
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Upper incomplete gamma function `Gamma(a, x)` for a > 0, x >= 0.
///
/// Series for the lower incomplete part when x < a + 1, Lentz continued
/// fraction otherwise.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    let gln = ln_gamma(a);
    if x == 0.0 {
        return gln.exp();
    }
    if x < a + 1.0 {
        // P(a,x) by series, then Gamma(a,x) = Gamma(a) (1 - P)
        let mut ap = a;
        let mut sum = 1.0 / a;
        let mut del = sum;
        loop {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * f64::EPSILON {
                break;
            }
        }
        let p = sum * (-x + a * x.ln() - gln).exp();
        gln.exp() * (1.0 - p)
    } else {
        // modified Lentz continued fraction for Q(a,x)
        let fpmin = f64::MIN_POSITIVE / f64::EPSILON;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / fpmin;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < fpmin {
                d = fpmin;
            }
            c = b + an / c;
            if c.abs() < fpmin {
                c = fpmin;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() <= f64::EPSILON {
                break;
            }
        }
        (-x + a * x.ln()).exp() * h
    }
}
