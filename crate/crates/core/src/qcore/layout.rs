use crate::error::{Error, Result};

pub const POL_A: &str = "pol_A";
pub const ET_A: &str = "et_A";
pub const POL_B: &str = "pol_B";
pub const ET_B: &str = "et_B";

/// Basis index of horizontal polarization.
pub const H: usize = 0;
/// Basis index of vertical polarization.
pub const V: usize = 1;
/// Basis index of the short arm / early time bin.
pub const S: usize = 0;
/// Basis index of the long arm / late time bin.
pub const L: usize = 1;

/// Names of the qubits making up a register.
///
/// Qubit `k` is the `k`-th tensor factor, most significant first: in a
/// four-qubit layout the basis index is `q0·8 + q1·4 + q2·2 + q3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    labels: Vec<String>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidSelection("layout has no qubits".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidSelection(format!("duplicate label `{l}`")));
            }
        }
        Ok(Self { labels })
    }

    /// The photon-pair layout `(pol_A, et_A, pol_B, et_B)`.
    pub fn pair() -> Self {
        Self { labels: [POL_A, ET_A, POL_B, ET_B].map(String::from).to_vec() }
    }

    /// Two polarization qubits `(pol_A, pol_B)`.
    pub fn polarization() -> Self {
        Self { labels: vec![POL_A.into(), POL_B.into()] }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Positions of `targets`, in the order given. Rejects repeats.
    pub fn positions(&self, targets: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(targets.len());
        for t in targets {
            let p = self.position(t)?;
            if out.contains(&p) {
                return Err(Error::InvalidSelection(format!("label `{t}` repeated")));
            }
            out.push(p);
        }
        Ok(out)
    }
}

/// Bit of qubit `pos` in basis index `index` of an `n`-qubit register.
#[inline]
pub(crate) fn bit(index: usize, pos: usize, n: usize) -> usize {
    (index >> (n - 1 - pos)) & 1
}

/// Sub-index formed by the bits at `positions` (first position most significant).
#[inline]
pub(crate) fn gather(index: usize, positions: &[usize], n: usize) -> usize {
    positions.iter().fold(0, |acc, &p| (acc << 1) | bit(index, p, n))
}

/// Mask with the bits of `positions` set.
#[inline]
pub(crate) fn mask(positions: &[usize], n: usize) -> usize {
    positions.iter().fold(0, |acc, &p| acc | (1 << (n - 1 - p)))
}
