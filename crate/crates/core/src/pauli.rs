//! Exact algebra of Pauli strings and complex linear combinations of them.
//!
//! A [`PauliString`] on `n` sites is `i^p · Π_k X_k^{x_k} Z_k^{z_k}`, stored as
//! two bit masks and a phase exponent reduced mod 4. Within each site the X
//! factor stands to the left of the Z factor, so `Y = i·XZ`.
//!
//! An [`OperatorSum`] keeps one complex coefficient per `(x_mask, z_mask)`
//! key. Every key denotes the canonical string `X^x Z^z` with phase 0; the
//! `i^p` of incoming strings is folded into the coefficient.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;

/// Widest supported register. Masks are `u64`.
pub const MAX_SITES: usize = 64;

/// Default threshold for [`OperatorSum::prune`].
pub const DEFAULT_PRUNE: f64 = 1e-12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `i^p` for `p` reduced mod 4.
pub fn i_pow(p: u8) -> Complex64 {
    match p & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites > MAX_SITES {
        return Err(Error::TooManySites {
            n_sites,
            max: MAX_SITES,
        });
    }
    Ok(())
}

fn check_same(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

fn site_mask(n_sites: usize) -> u64 {
    if n_sites == 64 {
        u64::MAX
    } else {
        (1u64 << n_sites) - 1
    }
}

/// Parity of `popcount(mask)` as a real sign.
#[inline]
fn parity_sign(mask: u64) -> f64 {
    if mask.count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Single-site Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// One tensor product of single-site Paulis with an exact `i^p` phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_sites: usize,
    x_mask: u64,
    z_mask: u64,
    phase_exp: u8,
}

impl PauliString {
    pub fn new(n_sites: usize, x_mask: u64, z_mask: u64, phase_exp: u8) -> Result<Self> {
        check_sites(n_sites)?;
        let full = site_mask(n_sites);
        if x_mask & !full != 0 || z_mask & !full != 0 {
            return Err(Error::InvalidSite(format!(
                "mask bits beyond site {} set",
                n_sites.saturating_sub(1)
            )));
        }
        Ok(Self {
            n_sites,
            x_mask,
            z_mask,
            phase_exp: phase_exp & 3,
        })
    }

    pub fn identity(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, 0, 0, 0)
    }

    /// A single Pauli factor at `site`, identity elsewhere.
    pub fn single(n_sites: usize, site: usize, pauli: Pauli) -> Result<Self> {
        if site >= n_sites {
            return Err(Error::InvalidSite(format!(
                "site {site} out of range for {n_sites} sites"
            )));
        }
        let bit = 1u64 << site;
        match pauli {
            Pauli::I => Self::new(n_sites, 0, 0, 0),
            Pauli::X => Self::new(n_sites, bit, 0, 0),
            // Y = i·XZ
            Pauli::Y => Self::new(n_sites, bit, bit, 1),
            Pauli::Z => Self::new(n_sites, 0, bit, 0),
        }
    }

    /// Product of `Z` over every set bit of `mask`.
    pub fn z_string(n_sites: usize, mask: u64) -> Result<Self> {
        Self::new(n_sites, 0, mask, 0)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Pauli group product `self · other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        check_same(self.n_sites, other.n_sites)?;
        let swaps = (self.z_mask & other.x_mask).count_ones() as u8;
        Ok(Self {
            n_sites: self.n_sites,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
            phase_exp: (self.phase_exp + other.phase_exp + 2 * (swaps & 1)) & 3,
        })
    }

    pub fn adjoint(&self) -> Self {
        let ys = ((self.x_mask & self.z_mask).count_ones() & 1) as u8;
        Self {
            phase_exp: ((4 - self.phase_exp) + 2 * ys) & 3,
            ..*self
        }
    }

    /// Two Pauli strings either commute or anticommute.
    pub fn commutes_with(&self, other: &Self) -> bool {
        let overlap =
            (self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones();
        overlap.is_multiple_of(2)
    }

    /// The factor acting on `site`, ignoring the global phase.
    pub fn pauli_at(&self, site: usize) -> Pauli {
        let bit = 1u64 << site;
        match (self.x_mask & bit != 0, self.z_mask & bit != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }
}

/// Complex linear combination of canonical Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    n_sites: usize,
    terms: BTreeMap<(u64, u64), Complex64>,
}

impl OperatorSum {
    /// The zero operator.
    pub fn zero(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        Ok(Self {
            n_sites,
            terms: BTreeMap::new(),
        })
    }

    pub fn identity(n_sites: usize) -> Result<Self> {
        Self::from_string(&PauliString::identity(n_sites)?, Complex64::new(1.0, 0.0))
    }

    pub fn from_string(p: &PauliString, coeff: Complex64) -> Result<Self> {
        let mut sum = Self::zero(p.n_sites)?;
        sum.add_string(p, coeff)?;
        Ok(sum)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical `(x_mask, z_mask)` order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, u64, Complex64)> + '_ {
        self.terms.iter().map(|(&(x, z), &c)| (x, z, c))
    }

    /// Coefficient of the canonical string `X^x Z^z`, zero if absent.
    pub fn coeff(&self, x_mask: u64, z_mask: u64) -> Complex64 {
        self.terms
            .get(&(x_mask, z_mask))
            .copied()
            .unwrap_or_default()
    }

    /// Accumulate `coeff · p`, folding the string phase into the coefficient.
    pub fn add_string(&mut self, p: &PauliString, coeff: Complex64) -> Result<()> {
        check_same(self.n_sites, p.n_sites)?;
        self.accumulate(p.x_mask, p.z_mask, coeff * i_pow(p.phase_exp));
        Ok(())
    }

    fn accumulate(&mut self, x: u64, z: u64, c: Complex64) {
        *self.terms.entry((x, z)).or_default() += c;
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        check_same(self.n_sites, other.n_sites)?;
        let mut out = self.clone();
        for (x, z, c) in other.terms() {
            out.accumulate(x, z, c);
        }
        Ok(out)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        check_same(self.n_sites, other.n_sites)?;
        let mut out = self.clone();
        for (x, z, c) in other.terms() {
            out.accumulate(x, z, -c);
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            n_sites: self.n_sites,
            terms: self.terms.iter().map(|(&k, &c)| (k, c * factor)).collect(),
        }
    }

    /// Distributive product `self · other`.
    ///
    /// Pairwise string products are formed in parallel; like terms are then
    /// merged sequentially in a fixed order so the floating-point result does
    /// not depend on scheduling.
    pub fn product(&self, other: &Self) -> Result<Self> {
        check_same(self.n_sites, other.n_sites)?;
        let left: Vec<((u64, u64), Complex64)> = self.terms.iter().map(|(&k, &c)| (k, c)).collect();
        let right: Vec<((u64, u64), Complex64)> =
            other.terms.iter().map(|(&k, &c)| (k, c)).collect();
        let blocks = par::map_slice(&left, |&((xa, za), ca)| {
            right
                .iter()
                .map(|&((xb, zb), cb)| {
                    // canonical strings: Z^za X^xb = (-1)^{|za & xb|} X^xb Z^za
                    let sign = parity_sign(za & xb);
                    ((xa ^ xb, za ^ zb), ca * cb * sign)
                })
                .collect::<Vec<_>>()
        });
        let mut out = Self::zero(self.n_sites)?;
        for ((x, z), c) in blocks.into_iter().flatten() {
            out.accumulate(x, z, c);
        }
        Ok(out)
    }

    /// Hermitian adjoint.
    pub fn adjoint(&self) -> Self {
        Self {
            n_sites: self.n_sites,
            terms: self
                .terms
                .iter()
                .map(|(&(x, z), &c)| ((x, z), c.conj() * parity_sign(x & z)))
                .collect(),
        }
    }

    /// Drop terms with `|coeff| < eps`.
    pub fn prune(&mut self, eps: f64) {
        self.terms.retain(|_, c| c.norm() >= eps);
    }

    pub fn pruned(mut self, eps: f64) -> Self {
        self.prune(eps);
        self
    }

    /// Largest coefficient magnitude (0 for the zero operator).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Max coefficient deviation of `self − self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.minus(&self.adjoint())
            .expect("adjoint preserves size")
            .max_abs_coeff()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Coefficient of the identity string.
    pub fn identity_coeff(&self) -> Complex64 {
        self.coeff(0, 0)
    }

    /// Line-oriented text form: `<re> <im> <word>` per term, canonical order.
    ///
    /// The word spells the string site 0 first over `{I,X,Y,Z}`; the
    /// coefficient is expressed relative to that word, so an `XZ` key is
    /// written as `Y` with its coefficient multiplied by `-i`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (x, z, c) in self.terms() {
            let ys = (x & z).count_ones() as u8;
            // X^x Z^z = (-i)^{#Y} · Pauli word
            let c = c * i_pow((4 - (ys & 3)) & 3);
            out.push_str(&format!(
                "{:.16e} {:.16e} {}\n",
                c.re,
                c.im,
                word(self.n_sites, x, z)
            ));
        }
        out
    }

    /// Parse the form written by [`OperatorSum::to_text`].
    pub fn from_text(n_sites: usize, text: &str) -> Result<Self> {
        let mut out = Self::zero(n_sites)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected 3 fields",
                    lineno + 1
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            let c = Complex64::new(parse(parts[0])?, parse(parts[1])?);
            let letters = parts[2];
            if letters.len() != n_sites {
                return Err(Error::Parse(format!(
                    "line {}: word has {} letters, expected {n_sites}",
                    lineno + 1,
                    letters.len()
                )));
            }
            let mut p = PauliString::identity(n_sites)?;
            for (site, ch) in letters.chars().enumerate() {
                let pauli = match ch {
                    'I' => Pauli::I,
                    'X' => Pauli::X,
                    'Y' => Pauli::Y,
                    'Z' => Pauli::Z,
                    other => {
                        return Err(Error::Parse(format!(
                            "line {}: bad letter {other:?}",
                            lineno + 1
                        )))
                    }
                };
                p = p.product(&PauliString::single(n_sites, site, pauli)?)?;
            }
            out.add_string(&p, c)?;
        }
        Ok(out)
    }
}

fn word(n_sites: usize, x: u64, z: u64) -> String {
    (0..n_sites)
        .map(|k| {
            let bit = 1u64 << k;
            match (x & bit != 0, z & bit != 0) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            }
        })
        .collect()
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `AB − BA`.
pub fn commutator(a: &OperatorSum, b: &OperatorSum) -> Result<OperatorSum> {
    a.product(b)?.minus(&b.product(a)?)
}

/// `AB + BA`.
pub fn anticommutator(a: &OperatorSum, b: &OperatorSum) -> Result<OperatorSum> {
    a.product(b)?.plus(&b.product(a)?)
}

/// `σ^± = (X ± iY)/2` at `site`.
pub fn sigma_plus(n_sites: usize, site: usize) -> Result<OperatorSum> {
    ladder(n_sites, site, 1.0)
}

pub fn sigma_minus(n_sites: usize, site: usize) -> Result<OperatorSum> {
    ladder(n_sites, site, -1.0)
}

fn ladder(n_sites: usize, site: usize, sign: f64) -> Result<OperatorSum> {
    let mut op = OperatorSum::zero(n_sites)?;
    op.add_string(
        &PauliString::single(n_sites, site, Pauli::X)?,
        Complex64::new(0.5, 0.0),
    )?;
    op.add_string(
        &PauliString::single(n_sites, site, Pauli::Y)?,
        I * (0.5 * sign),
    )?;
    Ok(op)
}
