use serde::Serialize;

/// One verified inequality: `lhs >= rhs` up to `tolerance`.
///
/// `asserted == false` marks informational reports (e.g. relations that are
/// not expected to hold on a finite time domain); they carry the numbers but
/// do not count toward pass/fail summaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub tag: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub asserted: bool,
}

impl BoundReport {
    pub fn new(tag: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = lhs - rhs;
        Self {
            tag: tag.into(),
            lhs,
            rhs,
            slack,
            tolerance,
            pass: slack >= -tolerance,
            asserted: true,
        }
    }

    /// Equality check `|lhs - rhs| <= tolerance`, encoded as the inequality
    /// `-|lhs - rhs| >= 0`.
    pub fn equality(tag: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let mut r = Self::new(tag, lhs, rhs, tolerance);
        r.slack = -(lhs - rhs).abs();
        r.pass = r.slack >= -tolerance;
        r
    }

    pub fn informational(mut self) -> Self {
        self.asserted = false;
        self
    }

    /// Relative slack `slack / |rhs|` (or the absolute slack when `rhs == 0`).
    pub fn relative_slack(&self) -> f64 {
        if self.rhs == 0.0 {
            self.slack
        } else {
            self.slack / self.rhs.abs()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_slack_within_tolerance() {
        assert!(BoundReport::new("x", 1.0, 1.0 + 1e-10, 1e-9).pass);
        assert!(!BoundReport::new("x", 1.0, 1.1, 1e-9).pass);
        let eq = BoundReport::equality("e", 2.0, 2.0 + 5e-9, 1e-8);
        assert!(eq.pass);
        assert!(eq.slack <= 0.0);
        assert!(!BoundReport::equality("e", 2.5, 2.0, 1e-8).pass);
    }
}
