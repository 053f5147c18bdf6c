//! Small numeric helpers: streaming log-sum-exp and fixed-precision decimal
//! formatting for reports.

/// Streaming `ln(sum_i exp(x_i))`.
///
/// Keeps the running maximum so no term overflows; `-inf` terms are ignored.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled_sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled_sum: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled_sum += (x - self.max).exp();
        } else {
            self.scaled_sum = self.scaled_sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    /// Combines two partial accumulations.
    pub fn merge(mut self, other: LogSumExp) -> Self {
        if other.max == f64::NEG_INFINITY {
            return self;
        }
        if other.max <= self.max {
            self.scaled_sum += other.scaled_sum * (other.max - self.max).exp();
        } else {
            self.scaled_sum = self.scaled_sum * (self.max - other.max).exp() + other.scaled_sum;
            self.max = other.max;
        }
        self
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.max + self.scaled_sum.ln()
    }
}

impl FromIterator<f64> for LogSumExp {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSumExp::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `ln(sum_i exp(x_i))`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<LogSumExp>().value()
}

/// Decimal text with 17 significant digits, enough to round-trip any `f64`.
///
/// Positional notation for moderate magnitudes, scientific otherwise.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp10 = x.abs().log10().floor() as i32;
    if (-5..=15).contains(&exp10) {
        let decimals = (16 - exp10).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_naive_when_safe() {
        let xs = [0.5, 2.0, -1.0, 0.0];
        let naive = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - naive).abs() < 1e-15);
    }

    #[test]
    fn lse_survives_large_magnitudes() {
        // ln(e^1234 + e^1232) = 1232 + ln(1 + e^2)
        let v = log_sum_exp(&[1234.0, 1232.0]);
        assert!((v - (1232.0 + (1.0 + 2f64.exp()).ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 0.0]), 0.0);
    }

    #[test]
    fn merge_equals_single_pass() {
        let xs: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin() * 30.0).collect();
        let whole = log_sum_exp(&xs);
        let (a, b) = xs.split_at(17);
        let merged = a
            .iter()
            .copied()
            .collect::<LogSumExp>()
            .merge(b.iter().copied().collect());
        assert!((merged.value() - whole).abs() < 1e-13);
    }

    #[test]
    fn sig17_round_trips() {
        for &x in &[1.0, 2.02734375, 1.0 / 3.0, 123456.789, 1e-300, 9.87e20, 0.000123] {
            let s = format_sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_sig17(1.5), "1.5000000000000000");
    }
}
