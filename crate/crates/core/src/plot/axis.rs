/// Data interval shown on one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
}

impl Axis {
    /// Data range widened by 5% on each side. A zero-width range is opened
    /// up around its value.
    pub fn padded(values: impl IntoIterator<Item = f64>) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Axis { lo: 0.0, hi: 1.0 };
        }
        let span = hi - lo;
        if span <= f64::EPSILON * lo.abs().max(hi.abs()) {
            let half = if lo == 0.0 { 0.5 } else { 0.05 * lo.abs() };
            return Axis {
                lo: lo - half,
                hi: hi + half,
            };
        }
        Axis {
            lo: lo - 0.05 * span,
            hi: hi + 0.05 * span,
        }
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }

    /// Fraction of the way from `lo` to `hi`.
    pub fn unit(&self, v: f64) -> f64 {
        (v - self.lo) / self.span()
    }

    pub fn ticks(&self, target: usize) -> Vec<f64> {
        let step = nice_step(self.span() / target.max(1) as f64);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }

    pub fn tick_step(&self, target: usize) -> f64 {
        nice_step(self.span() / target.max(1) as f64)
    }
}

/// Smallest 1, 2 or 5 times a power of ten not below `raw`.
pub fn nice_step(raw: f64) -> f64 {
    let exp = raw.log10().floor();
    let base = 10f64.powf(exp);
    let mantissa = raw / base;
    let m = if mantissa <= 1.0 + 1e-9 {
        1.0
    } else if mantissa <= 2.0 + 1e-9 {
        2.0
    } else if mantissa <= 5.0 + 1e-9 {
        5.0
    } else {
        10.0
    };
    m * base
}

/// Tick label with as many decimals as the step needs.
pub fn tick_label(v: f64, step: f64) -> String {
    let v = if v.abs() < step * 1e-9 { 0.0 } else { v };
    let mag = v.abs().max(step);
    if mag >= 1e6 || step < 1e-4 {
        let digits = ((mag.log10().floor() - step.log10().floor()).max(0.0) as usize).min(15);
        return format!("{v:.digits$e}");
    }
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.decimals$}")
}
