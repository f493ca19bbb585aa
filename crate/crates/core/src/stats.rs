//! Numerical kernels: Pearson correlation, the regularized incomplete beta
//! function, its inverse, and the Student-t two-sided tail.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const CF_MAX_ITER: usize = 500;
const QUANTILE_MAX_ITER: usize = 1200;

/// Sample Pearson correlation. `Ok(None)` when either vector is constant.
pub fn pearson<T: Scalar>(u: &[T], v: &[T]) -> Result<Option<T>> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    if u.len() < 2 {
        return Err(Error::Domain(format!("pearson needs at least 2 points, got {}", u.len())));
    }
    // Exact constancy check; a computed variance can be a rounding residue.
    let constant = |x: &[T]| x.iter().all(|&e| e == x[0]);
    if constant(u) || constant(v) {
        return Ok(None);
    }
    let n = T::from_count(u.len());
    let mu = u.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mv = v.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut suv, mut suu, mut svv) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in u.iter().zip(v) {
        let (da, db) = (a - mu, b - mv);
        suv = suv + da * db;
        suu = suu + da * da;
        svv = svv + db * db;
    }
    if suu <= T::zero() || svv <= T::zero() {
        return Ok(None);
    }
    let r = suv / (suu.sqrt() * svv.sqrt());
    Ok(Some(r.max(-T::one()).min(T::one())))
}

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7, n = 9).
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let half = T::lit(0.5);
    if x < half {
        // Reflection: Γ(x)Γ(1−x) = π / sin(πx)
        let pi = T::PI();
        return (pi / (pi * x).sin()).abs().ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(COEF[0]);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_count(i));
    }
    let t = x + T::lit(7.5);
    T::lit(0.918_938_533_204_672_8) + (x + half) * t.ln() - t + acc.ln()
}

/// ln B(a, b).
pub fn ln_beta<T: Scalar>(a: T, b: T) -> T {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

fn check_shapes<T: Scalar>(a: T, b: T) -> Result<()> {
    if !(a > T::zero() && b > T::zero()) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("beta shapes must be positive and finite, got a={a}, b={b}")));
    }
    Ok(())
}

/// Regularized incomplete beta function I_x(a, b).
pub fn regularized_incomplete_beta<T: Scalar>(x: T, a: T, b: T) -> Result<T> {
    check_shapes(a, b)?;
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::Domain(format!("incomplete beta argument must lie in [0,1], got {x}")));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x == T::one() {
        return Ok(T::one());
    }
    let two = T::lit(2.0);
    if x > (a + T::one()) / (a + b + two) {
        Ok(T::one() - incbeta_cf(T::one() - x, b, a)?)
    } else {
        incbeta_cf(x, a, b)
    }
}

/// Continued-fraction expansion evaluated with the modified Lentz method.
/// Converges quickly for `x < (a+1)/(a+b+2)`.
fn incbeta_cf<T: Scalar>(x: T, a: T, b: T) -> Result<T> {
    let one = T::one();
    let tiny = T::min_positive_value() / T::epsilon();
    let eps = T::epsilon();

    let ln_front = a * x.ln() + b * (one - x).ln() - ln_beta(a, b);
    let front = ln_front.exp() / a;

    let mut c = one;
    let mut d = one - (a + b) * x / (a + one);
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;

    for m in 1..=CF_MAX_ITER {
        let m = T::from_count(m);
        let m2 = m + m;

        // even step
        let num = m * (b - m) * x / ((a + m2 - one) * (a + m2));
        d = one + num * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + num / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;

        // odd step
        let num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + one));
        d = one + num * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + num / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let delta = d * c;
        h = h * delta;

        if (delta - one).abs() <= eps {
            return Ok((front * h).max(T::zero()).min(one));
        }
    }
    Err(Error::NonConvergence(format!(
        "incomplete beta continued fraction at x={x}, a={a}, b={b}"
    )))
}

/// Density of Beta(a, b) at `x` in (0, 1).
fn beta_pdf<T: Scalar>(x: T, a: T, b: T, ln_b: T) -> T {
    ((a - T::one()) * x.ln() + (b - T::one()) * (T::one() - x).ln() - ln_b).exp()
}

/// The `q`-th quantile of Beta(a, b): the `x` with I_x(a, b) = q.
///
/// Newton steps on I_x − q, safeguarded by a shrinking bracket; any step that
/// leaves the bracket falls back to bisection.
pub fn beta_quantile<T: Scalar>(q: T, a: T, b: T) -> Result<T> {
    check_shapes(a, b)?;
    if !(q > T::zero() && q < T::one()) {
        return Err(Error::Domain(format!("quantile level must lie in (0,1), got {q}")));
    }
    let ln_b = ln_beta(a, b);
    let two = T::lit(2.0);
    let (mut lo, mut hi) = (T::zero(), T::one());
    let mut x = a / (a + b);

    for _ in 0..QUANTILE_MAX_ITER {
        let f = regularized_incomplete_beta(x, a, b)? - q;
        if f == T::zero() {
            return Ok(x);
        }
        if f < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= T::epsilon() * hi {
            return Ok((lo + hi) / two);
        }
        let pdf = beta_pdf(x, a, b, ln_b);
        let newton = x - f / pdf;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / two
        };
        if (next - x).abs() <= T::lit(4.0) * T::epsilon() * x.max(next) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NonConvergence(format!(
        "beta quantile q={q}, a={a}, b={b} after {QUANTILE_MAX_ITER} iterations"
    )))
}

/// Two-sided tail probability 2·P(T ≥ |t|) for Student's t with `dof` degrees
/// of freedom. Infinite `t_stat` gives exactly 0.
pub fn student_t_two_sided_p<T: Scalar>(t_stat: T, dof: u32) -> Result<T> {
    if dof == 0 {
        return Err(Error::Domain("t distribution needs at least one degree of freedom".into()));
    }
    if t_stat.is_nan() {
        return Err(Error::Domain("t statistic is NaN".into()));
    }
    if t_stat.is_infinite() {
        return Ok(T::zero());
    }
    let nu = T::from_u32(dof).expect("dof representable");
    let x = nu / (nu + t_stat * t_stat);
    regularized_incomplete_beta(x, nu / T::lit(2.0), T::lit(0.5))
}
