use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How many past rounds MaxBid consults at round `t`: `phi(t)`, with
/// `1 <= phi(t) <= t - 1` and `phi` non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WindowFunction {
    /// `phi(t) = min(k, t - 1)`.
    Constant(u32),
    /// `phi(t) = t - 1`.
    FullHistory,
    /// `phi(t) = ceil(t / 2)`.
    HalfSliding,
    /// Explicit `phi(2), phi(3), ...`; the last entry repeats forever.
    Table(Vec<u32>),
}

impl WindowFunction {
    pub fn constant(k: u32) -> Result<Self> {
        let w = WindowFunction::Constant(k);
        w.validate()?;
        Ok(w)
    }

    pub fn table(values: Vec<u32>) -> Result<Self> {
        let w = WindowFunction::Table(values);
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WindowFunction::Constant(0) => Err(Error::InvalidWindow("constant window must be at least 1".into())),
            WindowFunction::Table(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidWindow("empty window table".into()));
                }
                for (i, &phi) in values.iter().enumerate() {
                    let t = i as u32 + 2;
                    if phi < 1 || phi > t - 1 {
                        return Err(Error::InvalidWindow(format!("phi({t}) = {phi} outside 1..={}", t - 1)));
                    }
                    if i > 0 && phi < values[i - 1] {
                        return Err(Error::InvalidWindow(format!("phi decreases at t = {t}")));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `phi(t)` for `t >= 2`.
    pub fn length(&self, t: u32) -> u32 {
        debug_assert!(t >= 2);
        match self {
            WindowFunction::Constant(k) => (*k).min(t - 1),
            WindowFunction::FullHistory => t - 1,
            WindowFunction::HalfSliding => t.div_ceil(2),
            WindowFunction::Table(values) => {
                let i = ((t - 2) as usize).min(values.len() - 1);
                values[i]
            }
        }
    }

    /// First round of the window used at round `t`: `t - phi(t)`.
    pub fn start(&self, t: u32) -> u32 {
        t - self.length(t)
    }

    /// `min(start(t'))` over every `t' >= t`, for `t >= 2`.
    pub fn earliest_start(&self, t: u32) -> u32 {
        match self {
            WindowFunction::Table(values) => {
                let last = values.len() as u32 + 1;
                (t..=t.max(last)).map(|u| self.start(u)).min().unwrap_or(t)
            }
            _ => self.start(t),
        }
    }

    /// `phi(t) -> infinity`.
    pub fn diverges(&self) -> bool {
        matches!(self, WindowFunction::FullHistory | WindowFunction::HalfSliding)
    }

    /// `t - phi(t)` is non-decreasing and unbounded.
    pub fn complement_diverges(&self) -> bool {
        match self {
            WindowFunction::FullHistory => false,
            WindowFunction::Constant(_) | WindowFunction::HalfSliding => true,
            // The tail is constant, so t - phi(t) grows; check monotonicity on the table.
            WindowFunction::Table(values) => values.windows(2).all(|w| w[1] <= w[0] + 1),
        }
    }
}

impl fmt::Display for WindowFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowFunction::Constant(k) => write!(f, "const({k})"),
            WindowFunction::FullHistory => f.write_str("full"),
            WindowFunction::HalfSliding => f.write_str("half"),
            WindowFunction::Table(values) => {
                let parts: Vec<String> = values.iter().map(u32::to_string).collect();
                write!(f, "table({})", parts.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legal(w: &WindowFunction, upto: u32) {
        let mut prev = 0;
        for t in 2..=upto {
            let phi = w.length(t);
            assert!(phi >= 1 && phi < t, "{w} at {t}: {phi}");
            assert!(phi >= prev, "{w} decreases at {t}");
            prev = phi;
        }
    }

    #[test]
    fn built_in_windows_are_legal() {
        for w in [
            WindowFunction::Constant(1),
            WindowFunction::Constant(4),
            WindowFunction::FullHistory,
            WindowFunction::HalfSliding,
            WindowFunction::table(vec![1, 1, 2, 3, 3]).unwrap(),
        ] {
            legal(&w, 200);
        }
    }

    #[test]
    fn lengths() {
        assert_eq!(WindowFunction::HalfSliding.length(2), 1);
        assert_eq!(WindowFunction::HalfSliding.length(3), 2);
        assert_eq!(WindowFunction::HalfSliding.start(10), 5);
        assert_eq!(WindowFunction::FullHistory.start(10), 1);
        assert_eq!(WindowFunction::Constant(3).length(2), 1);
        assert_eq!(WindowFunction::Constant(3).length(9), 3);
        assert_eq!(WindowFunction::Table(vec![1, 2]).length(50), 2);
    }

    #[test]
    fn earliest_start_looks_ahead_through_tables() {
        let w = WindowFunction::Table(vec![1, 2, 3, 3]);
        assert_eq!((2..=6).map(|t| w.start(t)).collect::<Vec<_>>(), vec![1, 1, 1, 2, 3]);
        assert_eq!(w.earliest_start(2), 1);
        assert_eq!(w.earliest_start(5), 2);
        let dip = WindowFunction::Table(vec![1, 1, 3]);
        assert_eq!((w.start(3), dip.start(3), dip.start(4)), (1, 2, 1));
        assert_eq!(dip.earliest_start(3), 1);
        assert_eq!(WindowFunction::HalfSliding.earliest_start(10), 5);
    }

    #[test]
    fn flags() {
        let c = WindowFunction::Constant(1);
        assert!(!c.diverges() && c.complement_diverges());
        let f = WindowFunction::FullHistory;
        assert!(f.diverges() && !f.complement_diverges());
        let h = WindowFunction::HalfSliding;
        assert!(h.diverges() && h.complement_diverges());
    }

    #[test]
    fn illegal_tables_are_rejected() {
        assert!(WindowFunction::table(vec![2]).is_err());
        assert!(WindowFunction::table(vec![1, 2, 1]).is_err());
        assert!(WindowFunction::table(vec![]).is_err());
        assert!(WindowFunction::table(vec![0]).is_err());
        assert!(WindowFunction::constant(0).is_err());
    }
}
