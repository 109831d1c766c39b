//! Standard operator monotone functions and the Morozova-Chentsov weight
//! kernel.
//!
//! A standard function satisfies `f(1) = 1`, `f(x) = x f(1/x)` and operator
//! monotonicity. Only regular functions (`f(0) > 0`) are admitted; the skew
//! information carries a prefactor `f(0)/2`.
//!
//! The spectral skew information is `sum_ij w(lambda_i, lambda_j) |<i|H|j>|^2`
//! with
//!
//! ```text
//! w(x, y) = f(0)/2 * (x - y)^2 / (y f(x/y))
//! ```
//!
//! and limits `w(x, x) = 0`, `w(x, 0) = x/2`, `w(0, y) = y/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative distance below which two arguments are treated as equal.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-8;
pub const AXIOM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    WignerYanase,
    Wyd { alpha: f64 },
    Sld,
    Table(TableFunction),
}

/// A registered regular standard monotone function.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneFunction {
    id: String,
    kind: Kind,
    f_at_zero: f64,
}

impl MonotoneFunction {
    /// `f(x) = ((1 + sqrt x)/2)^2`.
    pub fn wigner_yanase() -> Self {
        Self {
            id: "WY".into(),
            kind: Kind::WignerYanase,
            f_at_zero: 0.25,
        }
    }

    /// `f(x) = a(1-a)(x-1)^2 / ((x^a - 1)(x^(1-a) - 1))` for `0 < a < 1`.
    pub fn wyd(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "WYD parameter {alpha} outside (0, 1)"
            )));
        }
        Ok(Self {
            id: format!("WYD({alpha})"),
            kind: Kind::Wyd { alpha },
            f_at_zero: alpha * (1.0 - alpha),
        })
    }

    /// Symmetric logarithmic derivative, `f(x) = (1 + x)/2`.
    pub fn sld() -> Self {
        Self {
            id: "SLD".into(),
            kind: Kind::Sld,
            f_at_zero: 0.5,
        }
    }

    /// Wraps a sampled table after checking regularity and the axioms on the
    /// table's own sample range.
    pub fn from_table(table: TableFunction) -> Result<Self> {
        let f0 = table.f0;
        if !(f0 > 0.0) {
            return Err(Error::NonRegular {
                id: table.name.clone(),
                f0,
            });
        }
        let grid = table.validation_grid();
        let report = validate_standard(|x| table.eval(x), &grid);
        if !report.passed {
            return Err(Error::NotStandard {
                id: table.name.clone(),
                detail: report.summary(),
            });
        }
        Ok(Self {
            id: table.name.clone(),
            kind: Kind::Table(table),
            f_at_zero: f0,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn f_at_zero(&self) -> f64 {
        self.f_at_zero
    }

    /// The WYD parameter, `Some(0.5)` for Wigner-Yanase.
    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            Kind::WignerYanase => Some(0.5),
            Kind::Wyd { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::WignerYanase => {
                let s = (1.0 + x.sqrt()) / 2.0;
                s * s
            }
            Kind::Wyd { alpha } => wyd_eval(*alpha, x),
            Kind::Sld => (1.0 + x) / 2.0,
            Kind::Table(t) => t.eval(x),
        }
    }

    /// Kernel weight `w(x, y)` with the limit rules on the diagonal and axes.
    pub fn weight(&self, x: f64, y: f64) -> Result<f64> {
        if !(x >= 0.0 && y >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kernel arguments must be nonnegative, got ({x}, {y})"
            )));
        }
        Ok(self.weight_unchecked(x, y))
    }

    pub(crate) fn weight_unchecked(&self, x: f64, y: f64) -> f64 {
        let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
        if hi - lo <= COINCIDENCE_THRESHOLD * hi.max(1e-300) {
            return 0.0;
        }
        if lo == 0.0 {
            return hi / 2.0;
        }
        // y f(x/y) = x f(y/x): evaluate with the ratio in [0, 1)
        let d = hi - lo;
        self.f_at_zero / 2.0 * d * d / (hi * self.eval(lo / hi))
    }

    pub fn validate(&self, grid: &[f64]) -> AxiomReport {
        validate_standard(|x| self.eval(x), grid)
    }
}

fn wyd_eval(alpha: f64, x: f64) -> f64 {
    if (x - 1.0).abs() <= COINCIDENCE_THRESHOLD {
        return 1.0;
    }
    let num = alpha * (1.0 - alpha) * (x - 1.0) * (x - 1.0);
    num / ((x.powf(alpha) - 1.0) * (x.powf(1.0 - alpha) - 1.0))
}

/// Registry lookup: `WY`, `SLD`, `WYD` (needs `alpha`).
pub fn builtin(id: &str, alpha: Option<f64>) -> Result<MonotoneFunction> {
    match id.to_ascii_uppercase().as_str() {
        "WY" => Ok(MonotoneFunction::wigner_yanase()),
        "SLD" => Ok(MonotoneFunction::sld()),
        "WYD" => {
            let alpha = alpha
                .ok_or_else(|| Error::InvalidParameter("WYD requires an alpha parameter".into()))?;
            MonotoneFunction::wyd(alpha)
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown monotone function `{other}`"
        ))),
    }
}

/// `n` log-spaced points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

/// Maximum axiom violations of a candidate `f` on a sample grid.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub normalization_error: f64,
    /// `max |f(x) - x f(1/x)| / max(1, f(x))`
    pub symmetry_error: f64,
    /// Largest decrease between consecutive sorted grid points.
    pub monotonicity_violation: f64,
    pub passed: bool,
}

impl AxiomReport {
    fn summary(&self) -> String {
        format!(
            "normalization {:e}, symmetry {:e}, monotonicity {:e}",
            self.normalization_error, self.symmetry_error, self.monotonicity_violation
        )
    }
}

pub fn validate_standard(f: impl Fn(f64) -> f64, grid: &[f64]) -> AxiomReport {
    let normalization_error = (f(1.0) - 1.0).abs();
    let mut symmetry_error: f64 = 0.0;
    for &x in grid.iter().filter(|&&x| x > 0.0) {
        let fx = f(x);
        let mirrored = x * f(1.0 / x);
        symmetry_error = symmetry_error.max((fx - mirrored).abs() / fx.abs().max(1.0));
    }
    let mut sorted: Vec<f64> = grid.iter().copied().filter(|&x| x > 0.0).collect();
    sorted.sort_by(f64::total_cmp);
    let mut monotonicity_violation: f64 = 0.0;
    for w in sorted.windows(2) {
        monotonicity_violation = monotonicity_violation.max(f(w[0]) - f(w[1]));
    }
    let passed = normalization_error <= AXIOM_TOLERANCE
        && symmetry_error <= AXIOM_TOLERANCE
        && monotonicity_violation <= AXIOM_TOLERANCE
        && normalization_error.is_finite()
        && symmetry_error.is_finite()
        && monotonicity_violation.is_finite();
    AxiomReport {
        normalization_error,
        symmetry_error,
        monotonicity_violation,
        passed,
    }
}

/// On-disk form of a user-supplied function: `{name, f0, samples: [[x, fx], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableSpec {
    pub name: String,
    pub f0: f64,
    pub samples: Vec<[f64; 2]>,
}

/// Sampled function with monotone cubic (Fritsch-Carlson) interpolation.
///
/// Only samples on `[0, 1]` (plus the first one at or beyond 1) are used; the
/// knot `(0, f0)` is prepended and arguments above 1 are evaluated through
/// `f(x) = x f(1/x)`, so the symmetry axiom holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TableFunction {
    name: String,
    f0: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl TableFunction {
    pub fn new(spec: TableSpec) -> Result<Self> {
        let TableSpec { name, f0, samples } = spec;
        if samples.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "table `{name}` needs at least two samples"
            )));
        }
        let mut xs = Vec::with_capacity(samples.len() + 1);
        let mut ys = Vec::with_capacity(samples.len() + 1);
        if samples[0][0] > 0.0 {
            xs.push(0.0);
            ys.push(f0);
        }
        for [x, y] in &samples {
            if !(x.is_finite() && y.is_finite()) || *x < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "table `{name}` has an invalid sample ({x}, {y})"
                )));
            }
            if let Some(&last) = xs.last() {
                if *x <= last {
                    return Err(Error::InvalidParameter(format!(
                        "table `{name}` abscissae must be strictly increasing"
                    )));
                }
            }
            xs.push(*x);
            ys.push(*y);
        }
        match xs.iter().position(|&x| x >= 1.0) {
            Some(p) => {
                xs.truncate(p + 1);
                ys.truncate(p + 1);
            }
            None => {
                return Err(Error::InvalidParameter(format!(
                    "table `{name}` must sample up to x >= 1"
                )))
            }
        }
        if xs.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "table `{name}` needs a sample in [0, 1)"
            )));
        }
        let slopes = fritsch_carlson(&xs, &ys);
        Ok(Self {
            name,
            f0,
            xs,
            ys,
            slopes,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == 0.0 {
            return self.f0;
        }
        if x > 1.0 {
            return x * self.eval(1.0 / x);
        }
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p => (p - 1).min(self.xs.len() - 2),
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }

    fn validation_grid(&self) -> Vec<f64> {
        log_grid(1e-6, 1e6, 481)
    }
}

fn fritsch_carlson(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let secants: Vec<f64> = (0..n - 1)
        .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
        .collect();
    let mut m = vec![0.0; n];
    m[0] = secants[0];
    m[n - 1] = secants[n - 2];
    for i in 1..n - 1 {
        m[i] = if secants[i - 1] * secants[i] <= 0.0 {
            0.0
        } else {
            (secants[i - 1] + secants[i]) / 2.0
        };
    }
    for i in 0..n - 1 {
        let s = secants[i];
        if s == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / s;
        let b = m[i + 1] / s;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * a * s;
            m[i + 1] = tau * b * s;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sampled(name: &str, f0: f64, f: impl Fn(f64) -> f64) -> TableSpec {
        let samples = log_grid(1e-3, 1e3, 241)
            .into_iter()
            .map(|x| [x, f(x)])
            .collect();
        TableSpec {
            name: name.into(),
            f0,
            samples,
        }
    }

    #[test]
    fn wy_constants() {
        let wy = MonotoneFunction::wigner_yanase();
        assert_eq!(wy.eval(1.0), 1.0);
        assert_eq!(wy.f_at_zero(), 0.25);
        assert_abs_diff_eq!(wy.eval(1e-16), 0.25, epsilon = 1e-7);
        assert_abs_diff_eq!(wy.eval(0.0), 0.25, epsilon = 0.0);
    }

    #[test]
    fn wyd_half_is_wy() {
        let wy = MonotoneFunction::wigner_yanase();
        let wyd = MonotoneFunction::wyd(0.5).unwrap();
        for x in log_grid(1e-6, 1e6, 301) {
            let (a, b) = (wy.eval(x), wyd.eval(x));
            assert!((a - b).abs() <= 1e-12 * a.max(1.0), "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn wyd_regularity_constant() {
        for alpha in [0.1, 0.25, 0.3, 0.75, 0.9] {
            let f = MonotoneFunction::wyd(alpha).unwrap();
            assert_abs_diff_eq!(f.f_at_zero(), alpha * (1.0 - alpha), epsilon = 1e-15);
            // closed form evaluated at 0 matches the stored limit
            assert_abs_diff_eq!(wyd_eval(alpha, 0.0), alpha * (1.0 - alpha), epsilon = 1e-15);
            // convergence at the origin goes like x^min(a, 1-a)
            assert_abs_diff_eq!(f.eval(1e-80), f.f_at_zero(), epsilon = 1e-3);
        }
        assert!(MonotoneFunction::wyd(0.0).is_err());
        assert!(MonotoneFunction::wyd(1.0).is_err());
        assert!(builtin("WYD", Some(1.2)).is_err());
        assert!(builtin("WYD", None).is_err());
        assert!(builtin("RLD", None).is_err());
    }

    #[test]
    fn weight_examples() {
        let wy = MonotoneFunction::wigner_yanase();
        assert_abs_diff_eq!(wy.weight(1.0, 0.25).unwrap(), 0.125, epsilon = 1e-15);
        for f in [wy.clone(), MonotoneFunction::sld(), MonotoneFunction::wyd(0.3).unwrap()] {
            assert_eq!(f.weight(0.3, 0.3).unwrap(), 0.0);
            assert_abs_diff_eq!(f.weight(0.8, 0.0).unwrap(), 0.4, epsilon = 1e-15);
            assert_abs_diff_eq!(f.weight(0.0, 0.8).unwrap(), 0.4, epsilon = 1e-15);
            assert_eq!(f.weight(0.0, 0.0).unwrap(), 0.0);
            assert!(f.weight(-0.1, 0.2).is_err());
        }
    }

    #[test]
    fn weight_axis_continuity() {
        for f in [
            MonotoneFunction::wigner_yanase(),
            MonotoneFunction::sld(),
            MonotoneFunction::wyd(0.2).unwrap(),
        ] {
            for x in [0.05, 0.3, 0.9] {
                let w = f.weight(x, 1e-40).unwrap();
                assert!((w - x / 2.0).abs() <= 1e-4 * x / 2.0, "{}: {w}", f.id());
            }
        }
    }

    #[test]
    fn validate_examples() {
        let grid = log_grid(1e-6, 1e6, 241);
        assert!(MonotoneFunction::wigner_yanase().validate(&grid).passed);
        assert!(MonotoneFunction::sld().validate(&grid).passed);
        assert!(MonotoneFunction::wyd(0.3).unwrap().validate(&grid).passed);
        let square = validate_standard(|x| x * x, &grid);
        assert!(!square.passed);
        assert!(square.symmetry_error > 1.0);
    }

    #[test]
    fn table_reproduces_sld_and_wy() {
        let sld = MonotoneFunction::from_table(TableFunction::new(sampled("sld-table", 0.5, |x| (1.0 + x) / 2.0)).unwrap())
            .unwrap();
        for x in [0.0, 1e-4, 0.37, 1.0, 5.0, 2e4] {
            assert_abs_diff_eq!(sld.eval(x), (1.0 + x) / 2.0, epsilon = 1e-9 * (1.0 + x));
        }
        let wy = MonotoneFunction::wigner_yanase();
        let table = TableFunction::new(sampled("wy-table", 0.25, |x| wy.eval(x))).unwrap();
        let f = MonotoneFunction::from_table(table).unwrap();
        for x in [0.01, 0.5, 3.0] {
            assert!((f.eval(x) - wy.eval(x)).abs() < 1e-4);
        }
    }

    #[test]
    fn table_rejections() {
        let square = TableFunction::new(sampled("square", 0.1, |x| x * x)).unwrap();
        assert!(matches!(
            MonotoneFunction::from_table(square),
            Err(Error::NotStandard { .. })
        ));
        let rld = TableFunction::new(sampled("rld", 0.0, |x| 2.0 * x / (1.0 + x))).unwrap();
        assert!(matches!(
            MonotoneFunction::from_table(rld),
            Err(Error::NonRegular { .. })
        ));
        let short = TableSpec {
            name: "short".into(),
            f0: 0.5,
            samples: vec![[0.1, 0.55], [0.5, 0.75]],
        };
        assert!(TableFunction::new(short).is_err());
    }
}
