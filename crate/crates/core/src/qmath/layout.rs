use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Ordered list of labelled registers.
///
/// The first register is the most significant factor of the row-major basis
/// ordering, so basis index `i` of a layout `[(A, dA), (B, dB)]` is
/// `a * dB + b`. An empty layout is the trivial one-dimensional system.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LayoutRecord", into = "LayoutRecord")]
pub struct RegisterLayout {
    names: Vec<String>,
    dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct LayoutRecord {
    names: Vec<String>,
    dims: Vec<usize>,
}

impl TryFrom<LayoutRecord> for RegisterLayout {
    type Error = Error;

    fn try_from(rec: LayoutRecord) -> Result<Self> {
        if rec.names.len() != rec.dims.len() {
            return Err(Error::Layout(format!(
                "{} names but {} dims",
                rec.names.len(),
                rec.dims.len()
            )));
        }
        RegisterLayout::new(rec.names.into_iter().zip(rec.dims))
    }
}

impl From<RegisterLayout> for LayoutRecord {
    fn from(l: RegisterLayout) -> Self {
        LayoutRecord {
            names: l.names,
            dims: l.dims,
        }
    }
}

impl RegisterLayout {
    pub fn new<I, S>(registers: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut names: Vec<String> = Vec::new();
        let mut dims = Vec::new();
        for (name, dim) in registers {
            let name = name.into();
            if name.is_empty() {
                return Err(Error::Layout("empty register label".into()));
            }
            if dim < 2 {
                return Err(Error::Layout(format!(
                    "register {name} has dimension {dim}, expected at least 2"
                )));
            }
            if names.contains(&name) {
                return Err(Error::Layout(format!("duplicate register label {name}")));
            }
            names.push(name);
            dims.push(dim);
        }
        Ok(Self { names, dims })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// One qubit register per label.
    pub fn qubits(labels: &[&str]) -> Result<Self> {
        Self::new(labels.iter().map(|l| (*l, 2)))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.names.iter().any(|n| n == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == label)
            .ok_or_else(|| Error::Layout(format!("unknown register {label} in layout {self}")))
    }

    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.position(l.as_ref())).collect()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.position(label)?])
    }

    /// Concatenation `self ⊗ other`; labels must be disjoint.
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self> {
        Self::new(
            self.names
                .iter()
                .chain(other.names.iter())
                .cloned()
                .zip(self.dims.iter().chain(other.dims.iter()).copied()),
        )
    }

    /// Sub-layout with the given registers, in the given order.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let pos = self.positions(labels)?;
        Self::new(pos.iter().map(|&p| (self.names[p].clone(), self.dims[p])))
    }

    /// Registers of `self` that are not in `labels`, in layout order.
    pub fn without<S: AsRef<str>>(&self, labels: &[S]) -> Self {
        let names = labels.iter().map(|l| l.as_ref()).collect::<Vec<_>>();
        let mut out = Self::empty();
        for (n, d) in self.names.iter().zip(&self.dims) {
            if !names.contains(&n.as_str()) {
                out.names.push(n.clone());
                out.dims.push(*d);
            }
        }
        out
    }

    /// Whether every register of `other` appears in `self` with the same dimension.
    pub fn covers(&self, other: &RegisterLayout) -> bool {
        other
            .names
            .iter()
            .zip(&other.dims)
            .all(|(n, d)| self.position(n).map(|p| self.dims[p] == *d).unwrap_or(false))
    }

    /// Same registers, possibly in a different order.
    pub fn same_registers(&self, other: &RegisterLayout) -> bool {
        self.len() == other.len() && self.covers(other)
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        self.strides()
            .iter()
            .zip(&self.dims)
            .map(|(s, d)| (index / s) % d)
            .collect()
    }

    pub fn compose(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(self.strides())
            .map(|(d, s)| d * s)
            .sum()
    }

    /// For every basis index of `self`, the combined index of the digits at
    /// `positions` (taken in that order, first most significant).
    pub(crate) fn sub_indices(&self, positions: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        (0..self.total_dim())
            .map(|i| {
                positions.iter().fold(0, |acc, &p| {
                    acc * self.dims[p] + (i / strides[p]) % self.dims[p]
                })
            })
            .collect()
    }

    /// Computational-basis string of `index`: concatenated register digits,
    /// dot-separated when any register has more than ten levels.
    pub fn basis_label(&self, index: usize) -> String {
        let digits = self.digits(index);
        if self.dims.iter().all(|&d| d <= 10) {
            digits.iter().map(|d| char::from(b'0' + *d as u8)).collect()
        } else {
            digits
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    pub fn basis_labels(&self) -> Vec<String> {
        (0..self.total_dim()).map(|i| self.basis_label(i)).collect()
    }

    pub fn basis_index(&self, label: &str) -> Result<usize> {
        (0..self.total_dim())
            .find(|&i| self.basis_label(i) == label)
            .ok_or_else(|| Error::Layout(format!("{label:?} is not a basis string of {self}")))
    }
}

impl fmt::Display for RegisterLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, (n, d)) in self.names.iter().zip(&self.dims).enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}:{d}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_register_is_most_significant() {
        let l = RegisterLayout::new([("A", 2), ("B", 3)]).unwrap();
        assert_eq!(l.total_dim(), 6);
        assert_eq!(l.compose(&[1, 2]), 5);
        assert_eq!(l.digits(4), vec![1, 1]);
        assert_eq!(l.basis_label(5), "12");
        assert_eq!(l.sub_indices(&[1]), vec![0, 1, 2, 0, 1, 2]);
        assert_eq!(l.sub_indices(&[1, 0]), vec![0, 2, 4, 1, 3, 5]);
    }

    #[test]
    fn rejects_bad_registers() {
        assert!(RegisterLayout::new([("A", 1)]).is_err());
        assert!(RegisterLayout::new([("A", 2), ("A", 2)]).is_err());
        let l = RegisterLayout::qubits(&["A"]).unwrap();
        assert!(l.concat(&l).is_err());
        assert!(l.position("Z").is_err());
    }

    #[test]
    fn empty_layout_is_one_dimensional() {
        assert_eq!(RegisterLayout::empty().total_dim(), 1);
        assert_eq!(RegisterLayout::empty().basis_label(0), "");
    }
}
