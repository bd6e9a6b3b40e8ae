//! Site indexing for the three-leg star graph.
//!
//! Qubit order is aux-first (when present), then leg-major:
//! `(leg α, position j) ↦ offset + (α−1)·L + (j−1)`, with `offset = 1` iff the
//! auxiliary site exists. Legs and positions are 1-based, as in the physics
//! notation; qubit indices are 0-based.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{sigma_minus, sigma_plus, OperatorSum, Pauli, PauliString};

/// Number of legs. Only the three-leg star is built.
pub const LEGS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteId {
    Aux,
    Leg { leg: usize, pos: usize },
}

impl SiteId {
    pub fn leg(leg: usize, pos: usize) -> Self {
        SiteId::Leg { leg, pos }
    }
}

/// Single-site operator kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteOp {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Cyclic successor of a leg label: 1→2→3→1.
pub fn next_leg(leg: usize) -> usize {
    leg % LEGS + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StarLayout {
    leg_length: usize,
    with_aux: bool,
}

impl StarLayout {
    pub fn new(leg_length: usize, with_aux: bool) -> Result<Self> {
        if leg_length == 0 {
            return Err(Error::InvalidArgument("leg length must be positive".into()));
        }
        let layout = Self {
            leg_length,
            with_aux,
        };
        if layout.total_sites() > crate::pauli::MAX_SITES {
            return Err(Error::TooManySites {
                n_sites: layout.total_sites(),
                max: crate::pauli::MAX_SITES,
            });
        }
        Ok(layout)
    }

    pub fn leg_length(&self) -> usize {
        self.leg_length
    }

    pub fn with_aux(&self) -> bool {
        self.with_aux
    }

    pub fn total_sites(&self) -> usize {
        LEGS * self.leg_length + usize::from(self.with_aux)
    }

    fn offset(&self) -> usize {
        usize::from(self.with_aux)
    }

    pub fn qubit_index(&self, site: SiteId) -> Result<usize> {
        match site {
            SiteId::Aux if self.with_aux => Ok(0),
            SiteId::Aux => Err(Error::InvalidSite(
                "auxiliary site requested on a layout without one".into(),
            )),
            SiteId::Leg { leg, pos } => {
                if !(1..=LEGS).contains(&leg) {
                    return Err(Error::InvalidSite(format!("leg {leg} not in 1..={LEGS}")));
                }
                if !(1..=self.leg_length).contains(&pos) {
                    return Err(Error::InvalidSite(format!(
                        "position {pos} not in 1..={}",
                        self.leg_length
                    )));
                }
                Ok(self.offset() + (leg - 1) * self.leg_length + (pos - 1))
            }
        }
    }

    /// Inverse of [`StarLayout::qubit_index`].
    pub fn site_at(&self, index: usize) -> Result<SiteId> {
        if index >= self.total_sites() {
            return Err(Error::InvalidSite(format!("qubit {index} out of range")));
        }
        if self.with_aux && index == 0 {
            return Ok(SiteId::Aux);
        }
        let k = index - self.offset();
        Ok(SiteId::Leg {
            leg: k / self.leg_length + 1,
            pos: k % self.leg_length + 1,
        })
    }

    /// Every site in qubit order.
    pub fn sites(&self) -> Vec<SiteId> {
        (0..self.total_sites())
            .map(|q| self.site_at(q).expect("index in range"))
            .collect()
    }

    /// Bit mask of one qubit.
    pub fn bit(&self, site: SiteId) -> Result<u64> {
        Ok(1u64 << self.qubit_index(site)?)
    }

    /// Mask of positions `1..=upto` on `leg` (empty when `upto == 0`).
    pub fn leg_prefix_mask(&self, leg: usize, upto: usize) -> Result<u64> {
        let mut mask = 0;
        for pos in 1..=upto {
            mask |= self.bit(SiteId::leg(leg, pos))?;
        }
        Ok(mask)
    }

    /// Mask of a whole leg.
    pub fn leg_mask(&self, leg: usize) -> Result<u64> {
        self.leg_prefix_mask(leg, self.leg_length)
    }

    /// Mask of all non-auxiliary qubits.
    pub fn legs_mask(&self) -> u64 {
        (1..=LEGS).fold(0, |m, leg| m | self.leg_mask(leg).expect("valid leg"))
    }

    pub fn pauli(&self, site: SiteId, pauli: Pauli) -> Result<PauliString> {
        PauliString::single(self.total_sites(), self.qubit_index(site)?, pauli)
    }

    /// The single-site operator embedded at `site`, identity elsewhere.
    pub fn site_op(&self, site: SiteId, kind: SiteOp) -> Result<OperatorSum> {
        let n = self.total_sites();
        let q = self.qubit_index(site)?;
        let one = Complex64::new(1.0, 0.0);
        match kind {
            SiteOp::X => OperatorSum::from_string(&PauliString::single(n, q, Pauli::X)?, one),
            SiteOp::Y => OperatorSum::from_string(&PauliString::single(n, q, Pauli::Y)?, one),
            SiteOp::Z => OperatorSum::from_string(&PauliString::single(n, q, Pauli::Z)?, one),
            SiteOp::Plus => sigma_plus(n, q),
            SiteOp::Minus => sigma_minus(n, q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{commutator, DEFAULT_PRUNE};

    #[test]
    fn index_examples() {
        let l = StarLayout::new(2, true).unwrap();
        assert_eq!(l.qubit_index(SiteId::Aux).unwrap(), 0);
        assert_eq!(l.qubit_index(SiteId::leg(1, 1)).unwrap(), 1);
        assert_eq!(l.qubit_index(SiteId::leg(3, 2)).unwrap(), 6);
        assert_eq!(l.total_sites(), 7);
    }

    #[test]
    fn index_errors() {
        let l = StarLayout::new(2, false).unwrap();
        assert!(l.qubit_index(SiteId::Aux).is_err());
        assert!(l.qubit_index(SiteId::leg(0, 1)).is_err());
        assert!(l.qubit_index(SiteId::leg(4, 1)).is_err());
        assert!(l.qubit_index(SiteId::leg(1, 3)).is_err());
        assert!(l.qubit_index(SiteId::leg(1, 0)).is_err());
        assert!(StarLayout::new(0, true).is_err());
        assert!(StarLayout::new(22, true).is_err());
    }

    #[test]
    fn index_round_trip() {
        for len in 1..=5 {
            for aux in [false, true] {
                let l = StarLayout::new(len, aux).unwrap();
                for q in 0..l.total_sites() {
                    let s = l.site_at(q).unwrap();
                    assert_eq!(l.qubit_index(s).unwrap(), q);
                }
                assert!(l.site_at(l.total_sites()).is_err());
            }
        }
    }

    #[test]
    fn z_on_first_site() {
        let l = StarLayout::new(1, false).unwrap();
        let z = l.site_op(SiteId::leg(1, 1), SiteOp::Z).unwrap();
        let (x, zm, c) = z.terms().next().unwrap();
        assert_eq!((x, zm), (0, 0b001));
        assert_eq!(c, Complex64::new(1.0, 0.0));
        assert_eq!(z.len(), 1);
    }

    #[test]
    fn ladder_ops() {
        let l = StarLayout::new(2, true).unwrap();
        let s = SiteId::leg(2, 2);
        let plus = l.site_op(s, SiteOp::Plus).unwrap();
        let minus = l.site_op(s, SiteOp::Minus).unwrap();
        assert_eq!(plus.adjoint(), minus);

        let proj = plus.product(&minus).unwrap().pruned(DEFAULT_PRUNE);
        let expected = OperatorSum::identity(l.total_sites())
            .unwrap()
            .plus(&l.site_op(s, SiteOp::Z).unwrap())
            .unwrap()
            .scaled(Complex64::new(0.5, 0.0));
        assert_eq!(proj, expected);
    }

    #[test]
    fn distinct_sites_commute() {
        let l = StarLayout::new(2, true).unwrap();
        let kinds = [SiteOp::X, SiteOp::Y, SiteOp::Z, SiteOp::Plus, SiteOp::Minus];
        let sites = l.sites();
        for (i, &a) in sites.iter().enumerate() {
            for &b in &sites[i + 1..] {
                for ka in kinds {
                    for kb in kinds {
                        let oa = l.site_op(a, ka).unwrap();
                        let ob = l.site_op(b, kb).unwrap();
                        assert!(commutator(&oa, &ob)
                            .unwrap()
                            .pruned(DEFAULT_PRUNE)
                            .is_empty());
                    }
                }
            }
        }
    }

    #[test]
    fn cyclic_legs() {
        assert_eq!(next_leg(1), 2);
        assert_eq!(next_leg(2), 3);
        assert_eq!(next_leg(3), 1);
    }
}
