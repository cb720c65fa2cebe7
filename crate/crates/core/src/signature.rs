//! Monotonicity signatures.
//!
//! A system of `N` operators declares, for every operator `i` and every
//! variable `j`, whether `T_i` is nondecreasing or nonincreasing in `x_j`.
//! An operator that ignores a variable must still commit to one of the two
//! (either is valid, and the sampled checks accept it).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Direction of an operator in one of its variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

impl Monotonicity {
    pub fn is_increasing(&self) -> bool {
        matches!(self, Monotonicity::Increasing)
    }

    /// `+1` for increasing, `-1` for decreasing.
    pub fn sign(&self) -> i8 {
        match self {
            Monotonicity::Increasing => 1,
            Monotonicity::Decreasing => -1,
        }
    }
}

/// The `N x N` table of declared directions, row `i` describing operator `T_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneSignature {
    order: usize,
    entries: Vec<Monotonicity>,
}

impl MonotoneSignature {
    /// Builds a signature from row-major entries. The order must be at least 2;
    /// a single self-map has no coordinates to mix and is plain monotone
    /// iteration, which this crate does not model separately.
    pub fn new(order: usize, entries: Vec<Monotonicity>) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidSignature(format!(
                "order must be at least 2, got {order}"
            )));
        }
        if entries.len() != order * order {
            return Err(Error::InvalidSignature(format!(
                "expected {} entries for order {order}, got {}",
                order * order,
                entries.len()
            )));
        }
        Ok(Self { order, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Monotonicity>>) -> Result<Self> {
        let order = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidSignature(format!(
                    "row {i} has {} entries, expected {order}",
                    row.len()
                )));
            }
        }
        Self::new(order, rows.into_iter().flatten().collect())
    }

    /// All-increasing signature; every operator is nondecreasing in every
    /// variable, so the companion construction degenerates to the original
    /// system.
    pub fn all_increasing(order: usize) -> Result<Self> {
        Self::new(order, vec![Monotonicity::Increasing; order * order])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entry(&self, i: usize, j: usize) -> Result<Monotonicity> {
        if i >= self.order {
            return Err(Error::IndexOutOfRange {
                index: i,
                order: self.order,
            });
        }
        if j >= self.order {
            return Err(Error::IndexOutOfRange {
                index: j,
                order: self.order,
            });
        }
        Ok(self.entries[i * self.order + j])
    }

    /// Row `i`: the selector table for operator `T_i`.
    pub fn row(&self, i: usize) -> Result<&[Monotonicity]> {
        if i >= self.order {
            return Err(Error::IndexOutOfRange {
                index: i,
                order: self.order,
            });
        }
        Ok(&self.entries[i * self.order..(i + 1) * self.order])
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Monotonicity]> {
        self.entries.chunks(self.order)
    }
}

impl fmt::Display for MonotoneSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            for m in row {
                f.write_str(if m.is_increasing() { "+" } else { "-" })?;
            }
        }
        Ok(())
    }
}

/// Parses literals like `"++-/-++/---"`: rows separated by `/`, one `+` or
/// `-` per variable.
impl FromStr for MonotoneSignature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for chunk in s.split('/') {
            let mut row = Vec::new();
            for c in chunk.chars() {
                match c {
                    '+' => row.push(Monotonicity::Increasing),
                    '-' => row.push(Monotonicity::Decreasing),
                    ' ' => {}
                    other => {
                        return Err(Error::InvalidSignature(format!(
                            "unexpected character {other:?} in signature literal"
                        )))
                    }
                }
            }
            rows.push(row);
        }
        Self::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_round_trips_through_display() {
        let sig: MonotoneSignature = "++-/-++/---".parse().unwrap();
        assert_eq!(sig.order(), 3);
        assert_eq!(sig.entry(0, 2).unwrap(), Monotonicity::Decreasing);
        assert_eq!(sig.entry(1, 0).unwrap(), Monotonicity::Decreasing);
        assert_eq!(sig.entry(1, 1).unwrap(), Monotonicity::Increasing);
        assert_eq!(sig.to_string(), "++-/-++/---");
    }

    #[test]
    fn order_below_two_is_rejected() {
        assert!(MonotoneSignature::all_increasing(1).is_err());
        assert!("+".parse::<MonotoneSignature>().is_err());
    }

    #[test]
    fn ragged_or_misshapen_input_is_rejected() {
        assert!("++/-".parse::<MonotoneSignature>().is_err());
        assert!(MonotoneSignature::new(2, vec![Monotonicity::Increasing; 3]).is_err());
        assert!("+x/-+".parse::<MonotoneSignature>().is_err());
    }

    #[test]
    fn row_and_entry_indices_are_checked() {
        let sig = MonotoneSignature::all_increasing(3).unwrap();
        assert!(sig.row(3).is_err());
        assert!(sig.entry(0, 3).is_err());
        assert!(sig.entry(3, 0).is_err());
        assert_eq!(sig.row(2).unwrap().len(), 3);
    }
}
