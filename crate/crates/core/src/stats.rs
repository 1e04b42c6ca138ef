//! Statistical tests used by the differential and temporal analyses.
//!
//! Everything is generic over the float type through [`Real`]. The
//! sums-of-squares and Pearson statistic helpers only need field arithmetic
//! ([`Field`]) and also run on exact rationals.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num};

use crate::error::{Error, Result};

/// Field arithmetic with conversion from primitive numbers.
pub trait Field: Clone + Num + FromPrimitive + PartialOrd + Debug {}

impl<T: Clone + Num + FromPrimitive + PartialOrd + Debug> Field for T {}

/// Floating-point scalar for tests and distribution functions.
pub trait Real: Float + FromPrimitive + Debug + Send + Sync + 'static {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("representable literal")
    }
}

impl<T: Float + FromPrimitive + Debug + Send + Sync + 'static> Real for T {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Df<T> {
    One(T),
    Two(T, T),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EffectKind {
    CohensD,
    OddsRatio,
    EtaSquared,
}

/// Conditions under which a result was returned by convention rather than
/// computed from a proper distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degeneracy {
    /// Both samples constant with different values: p = 0, infinite statistic.
    DegenerateVariance,
    /// Zero residual variance with nonzero bin variance: p = 0.
    ZeroErrorVariance,
    /// A contingency marginal is zero; no association is testable.
    ZeroMarginal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestResult<T> {
    pub statistic: T,
    pub df: Df<T>,
    pub p_value: T,
    pub effect_size: T,
    pub effect_kind: EffectKind,
    pub flag: Option<Degeneracy>,
}

// ---- special functions ----

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
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

const MAX_ITER: usize = 1000;

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection
        let pi = T::lit(std::f64::consts::PI);
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::lit(i as f64));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    T::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + acc.ln()
}

fn tiny<T: Real>() -> T {
    T::min_positive_value() / T::epsilon()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf<T: Real>(a: T, b: T, x: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let eps = T::epsilon();
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny() {
        d = tiny();
    }
    d = one / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = T::lit(m as f64);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny() {
            d = tiny();
        }
        c = one + aa / c;
        if c.abs() < tiny() {
            c = tiny();
        }
        d = one / d;
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny() {
            d = tiny();
        }
        c = one + aa / c;
        if c.abs() < tiny() {
            c = tiny();
        }
        d = one / d;
        let del = d * c;
        h = h * del;
        if (del - one).abs() <= eps {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn reg_inc_beta<T: Real>(a: T, b: T, x: T) -> T {
    let one = T::one();
    if x <= T::zero() {
        return T::zero();
    }
    if x >= one {
        return one;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (one - x).ln();
    let front = ln_front.exp();
    if x < (a + one) / (a + b + T::lit(2.0)) {
        front * beta_cf(a, b, x) / a
    } else {
        one - front * beta_cf(b, a, one - x) / b
    }
}

fn gamma_series<T: Real>(a: T, x: T) -> T {
    let mut ap = a;
    let mut sum = T::one() / a;
    let mut del = sum;
    for _ in 0..MAX_ITER {
        ap = ap + T::one();
        del = del * x / ap;
        sum = sum + del;
        if del.abs() < sum.abs() * T::epsilon() {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_cf<T: Real>(a: T, x: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let mut b = x + one - a;
    let mut c = one / tiny::<T>();
    let mut d = one / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let i = T::lit(i as f64);
        let an = -i * (i - a);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny() {
            d = tiny();
        }
        c = b + an / c;
        if c.abs() < tiny() {
            c = tiny();
        }
        d = one / d;
        let del = d * c;
        h = h * del;
        if (del - one).abs() <= T::epsilon() {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn reg_gamma_q<T: Real>(a: T, x: T) -> T {
    if x <= T::zero() {
        return T::one();
    }
    if x < a + T::one() {
        T::one() - gamma_series(a, x)
    } else {
        gamma_cf(a, x)
    }
}

/// Two-sided tail probability of Student's t.
pub fn student_t_two_sided<T: Real>(t: T, df: T) -> T {
    if t.is_infinite() {
        return T::zero();
    }
    let half = T::lit(0.5);
    clamp01(reg_inc_beta(df * half, half, df / (df + t * t)))
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_sf<T: Real>(x: T, df: T) -> T {
    let half = T::lit(0.5);
    clamp01(reg_gamma_q(df * half, x * half))
}

/// Upper tail of the F distribution.
pub fn f_sf<T: Real>(f: T, d1: T, d2: T) -> T {
    if f <= T::zero() {
        return T::one();
    }
    if f.is_infinite() {
        return T::zero();
    }
    let half = T::lit(0.5);
    clamp01(reg_inc_beta(d2 * half, d1 * half, d2 / (d2 + d1 * f)))
}

fn clamp01<T: Real>(p: T) -> T {
    p.max(T::zero()).min(T::one())
}

// ---- t tests ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TTestKind {
    /// Unequal variances, Welch–Satterthwaite degrees of freedom.
    #[default]
    Welch,
    /// Pooled variance, `n_x + n_y - 2` degrees of freedom.
    Student,
}

fn mean_var<T: Real>(v: &[T]) -> (T, T) {
    let n = T::lit(v.len() as f64);
    let mean = v.iter().fold(T::zero(), |a, &x| a + x) / n;
    let ss = v
        .iter()
        .fold(T::zero(), |a, &x| a + (x - mean) * (x - mean));
    (mean, ss / (n - T::one()))
}

pub fn welch_t_test<T: Real>(x: &[T], y: &[T]) -> Result<TestResult<T>> {
    t_test(x, y, TTestKind::Welch)
}

/// Two-sample t test with Cohen's d (pooled SD) as effect size.
pub fn t_test<T: Real>(x: &[T], y: &[T], kind: TTestKind) -> Result<TestResult<T>> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "t test needs at least 2 observations per sample, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let (nx, ny) = (T::lit(x.len() as f64), T::lit(y.len() as f64));
    let one = T::one();
    let (mx, vx) = mean_var(x);
    let (my, vy) = mean_var(y);
    let diff = mx - my;
    let pooled_var = ((nx - one) * vx + (ny - one) * vy) / (nx + ny - T::lit(2.0));
    let (wx, wy) = (vx / nx, vy / ny);
    let se2 = match kind {
        TTestKind::Welch => wx + wy,
        TTestKind::Student => pooled_var * (one / nx + one / ny),
    };
    let df = match kind {
        TTestKind::Welch => {
            let denom = wx * wx / (nx - one) + wy * wy / (ny - one);
            if denom > T::zero() {
                se2 * se2 / denom
            } else {
                nx + ny - T::lit(2.0)
            }
        }
        TTestKind::Student => nx + ny - T::lit(2.0),
    };
    if se2 <= T::zero() {
        let (statistic, p_value, effect_size, flag) = if diff == T::zero() {
            (T::zero(), T::one(), T::zero(), None)
        } else {
            let inf = T::infinity() * diff.signum();
            (inf, T::zero(), inf, Some(Degeneracy::DegenerateVariance))
        };
        return Ok(TestResult {
            statistic,
            df: Df::One(df),
            p_value,
            effect_size,
            effect_kind: EffectKind::CohensD,
            flag,
        });
    }
    let t = diff / se2.sqrt();
    Ok(TestResult {
        statistic: t,
        df: Df::One(df),
        p_value: student_t_two_sided(t, df),
        effect_size: diff / pooled_var.sqrt(),
        effect_kind: EffectKind::CohensD,
        flag: None,
    })
}

// ---- contingency tables ----

/// Pearson statistic `N (ad - bc)^2 / (r1 r2 c1 c2)` without continuity
/// correction. Marginals must be nonzero.
pub fn pearson_2x2<F: Field>(table: [[u64; 2]; 2]) -> F {
    let f = |v: u64| F::from_u64(v).expect("count fits the field");
    let [[a, b], [c, d]] = table.map(|r| r.map(f));
    let n = a.clone() + b.clone() + c.clone() + d.clone();
    let cross = a.clone() * d.clone() - b.clone() * c.clone();
    let denom = (a.clone() + b.clone()) * (c.clone() + d.clone()) * (a + c) * (b + d);
    n * cross.clone() * cross / denom
}

pub fn chi_square_2x2<T: Real>(table: [[u64; 2]; 2]) -> Result<TestResult<T>> {
    chi_square_2x2_with(table, false)
}

/// Pearson chi-square on a 2x2 table, optionally Yates-corrected. The effect
/// size is the odds ratio `ad / bc`, with 0.5 added to every cell when any
/// cell is zero.
pub fn chi_square_2x2_with<T: Real>(table: [[u64; 2]; 2], yates: bool) -> Result<TestResult<T>> {
    let [[a, b], [c, d]] = table;
    if a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0 {
        return Err(Error::ZeroMarginal);
    }
    let statistic: T = if yates {
        let f = |v: u64| T::lit(v as f64);
        let n = f(a + b + c + d);
        let cross = ((f(a) * f(d) - f(b) * f(c)).abs() - n / T::lit(2.0)).max(T::zero());
        n * cross * cross / (f(a + b) * f(c + d) * f(a + c) * f(b + d))
    } else {
        pearson_2x2(table)
    };
    let haldane = if a == 0 || b == 0 || c == 0 || d == 0 {
        0.5
    } else {
        0.0
    };
    let g = |v: u64| T::lit(v as f64 + haldane);
    let odds_ratio = (g(a) * g(d)) / (g(b) * g(c));
    Ok(TestResult {
        statistic,
        df: Df::One(T::one()),
        p_value: chi_square_sf(statistic, T::one()),
        effect_size: odds_ratio,
        effect_kind: EffectKind::OddsRatio,
        flag: None,
    })
}

// ---- repeated measures ----

/// Sums-of-squares decomposition of a subjects x bins matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SumsOfSquares<F> {
    pub total: F,
    pub bins: F,
    pub subjects: F,
    /// `total - bins - subjects`.
    pub error: F,
    pub n_subjects: usize,
    pub n_bins: usize,
}

impl<F: Field> SumsOfSquares<F> {
    pub fn decompose(matrix: &[Vec<F>]) -> Result<Self> {
        let n = matrix.len();
        let b = matrix.first().map_or(0, Vec::len);
        if n < 2 || b < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 subjects and 2 bins, got {n} x {b}"
            )));
        }
        if matrix.iter().any(|r| r.len() != b) {
            return Err(Error::DimensionMismatch {
                expected: format!("{b} bins per subject"),
                actual: "ragged matrix".into(),
            });
        }
        let lift = |v: usize| F::from_usize(v).expect("size fits the field");
        let sq = |v: F| v.clone() * v;
        let (nf, bf) = (lift(n), lift(b));
        let sum = matrix
            .iter()
            .flatten()
            .cloned()
            .fold(F::zero(), |a, v| a + v);
        let grand = sum / (nf.clone() * bf.clone());
        let total = matrix
            .iter()
            .flatten()
            .fold(F::zero(), |a, v| a + sq(v.clone() - grand.clone()));
        let bins = (0..b).fold(F::zero(), |a, j| {
            let col = matrix.iter().fold(F::zero(), |s, r| s + r[j].clone()) / nf.clone();
            a + sq(col - grand.clone())
        }) * nf.clone();
        let subjects = matrix.iter().fold(F::zero(), |a, r| {
            let m = r.iter().cloned().fold(F::zero(), |s, v| s + v) / bf.clone();
            a + sq(m - grand.clone())
        }) * bf;
        let error = total.clone() - bins.clone() - subjects.clone();
        Ok(Self {
            total,
            bins,
            subjects,
            error,
            n_subjects: n,
            n_bins: b,
        })
    }
}

/// One-way repeated-measures ANOVA over bins; effect size is partial
/// eta-squared `SS_bins / (SS_bins + SS_error)`.
pub fn repeated_anova<T: Real>(matrix: &[Vec<T>]) -> Result<TestResult<T>> {
    let ss = SumsOfSquares::decompose(matrix)?;
    let d1 = T::lit((ss.n_bins - 1) as f64);
    let d2 = T::lit(((ss.n_bins - 1) * (ss.n_subjects - 1)) as f64);
    let scale = T::lit(64.0) * T::epsilon() * ss.total;
    let bins = if ss.bins <= scale { T::zero() } else { ss.bins };
    let error = if ss.error <= scale {
        T::zero()
    } else {
        ss.error
    };
    let df = Df::Two(d1, d2);
    if error == T::zero() {
        let result = if bins == T::zero() {
            (T::zero(), T::one(), T::zero(), None)
        } else {
            (
                T::infinity(),
                T::zero(),
                T::one(),
                Some(Degeneracy::ZeroErrorVariance),
            )
        };
        return Ok(TestResult {
            statistic: result.0,
            df,
            p_value: result.1,
            effect_size: result.2,
            effect_kind: EffectKind::EtaSquared,
            flag: result.3,
        });
    }
    let f = (bins / d1) / (error / d2);
    Ok(TestResult {
        statistic: f,
        df,
        p_value: f_sf(f, d1, d2),
        effect_size: bins / (bins + error),
        effect_kind: EffectKind::EtaSquared,
        flag: None,
    })
}

/// `SS_bins / SS_total`, defined as 0 when there is no variance at all.
pub fn eta_squared_bins<T: Real>(matrix: &[Vec<T>]) -> Result<T> {
    let ss = SumsOfSquares::decompose(matrix)?;
    if ss.total <= T::zero() {
        return Ok(T::zero());
    }
    Ok(clamp01(ss.bins / ss.total))
}

// ---- multiple comparisons ----

/// Benjamini–Hochberg step-up adjustment, in input order.
pub fn bh_adjust<T: Real>(p: &[T]) -> Result<Vec<T>> {
    if let Some(bad) = p.iter().find(|v| !(**v >= T::zero() && **v <= T::one())) {
        return Err(Error::OutOfRange(bad.to_f64().unwrap_or(f64::NAN)));
    }
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        p[i].partial_cmp(&p[j])
            .expect("finite p-values")
            .then(i.cmp(&j))
    });
    let mut out = vec![T::zero(); m];
    let mut running = T::one();
    for (rank, &i) in order.iter().enumerate().rev() {
        // factor first: it is >= 1, so rounding cannot push q below p
        let q = p[i] * (T::lit(m as f64) / T::lit((rank + 1) as f64));
        running = running.min(q);
        out[i] = running.min(T::one());
    }
    Ok(out)
}
