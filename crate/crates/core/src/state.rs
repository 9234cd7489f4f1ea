use num_complex::Complex64;

use crate::error::{Error, Result};

/// Truncated single-mode pure state in the photon-number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amplitudes: Vec<Complex64>,
    m_parity: u8,
}

impl FockState {
    /// Normalizes `amplitudes`. Entries whose index has the wrong parity
    /// relative to `m` must already be exactly zero.
    pub fn from_unnormalized(mut amplitudes: Vec<Complex64>, m: usize) -> Result<Self> {
        let parity = (m % 2) as u8;
        if let Some(n) = amplitudes
            .iter()
            .enumerate()
            .find(|(n, c)| (n % 2) as u8 != parity && **c != Complex64::new(0.0, 0.0))
            .map(|(n, _)| n)
        {
            return Err(Error::invalid("amplitudes", n, "nonzero amplitude of the wrong parity"));
        }
        let norm2: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !(norm2 > 1e-300) || !norm2.is_finite() {
            return Err(Error::ZeroProbability(format!("state norm^2 = {norm2:e}")));
        }
        let inv = norm2.sqrt().recip();
        amplitudes.iter_mut().for_each(|c| *c *= inv);
        Ok(FockState { amplitudes, m_parity: parity })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude of `|n>`, zero beyond the truncation.
    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes.get(n).copied().unwrap_or_default()
    }

    pub fn m_parity(&self) -> u8 {
        self.m_parity
    }

    /// Highest photon number kept.
    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `|<self|other>|`, insensitive to a global phase.
    pub fn overlap_abs(&self, other: &FockState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }
}
