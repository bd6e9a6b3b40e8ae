//! Star-graph Hamiltonians on the spin side and on the fermion side.
//!
//! Spin-side builders use the Pauli factories of [`crate::star`]; fermion-side
//! builders compose JW mode operators from [`crate::jw`]. Both sides are built
//! independently so that their equality is a checked identity. Every builder
//! writes a non-Hermitian part `T` and returns `T + T†`.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jw::{klein_eta, Axis, FamilyKind, FermionFamily, Mode};
use crate::pauli::{OperatorSum, DEFAULT_PRUNE};
use crate::star::{next_leg, SiteId, SiteOp, StarLayout, LEGS};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// XX model on the star graph with vertex coupling `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XXParams {
    pub leg_length: usize,
    pub rho: Complex64,
}

impl XXParams {
    pub fn new(leg_length: usize, rho: Complex64) -> Self {
        Self { leg_length, rho }
    }

    pub fn real(leg_length: usize, rho: f64) -> Self {
        Self::new(leg_length, Complex64::new(rho, 0.0))
    }
}

/// Quadratic fermion model: bulk hopping, pairing `gamma`, vertex hopping
/// `a[α]` and vertex pairing `b[α]` on the bond `α → α+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QFParams {
    pub leg_length: usize,
    pub gamma: f64,
    pub a: [Complex64; 3],
    pub b: [Complex64; 3],
}

impl QFParams {
    /// Equal real vertex hopping on every bond, no pairing.
    pub fn uniform_hopping(leg_length: usize, a: f64) -> Self {
        Self {
            leg_length,
            gamma: 0.0,
            a: [Complex64::new(a, 0.0); 3],
            b: [Complex64::new(0.0, 0.0); 3],
        }
    }

    pub fn is_particle_conserving(&self) -> bool {
        self.gamma == 0.0 && self.b.iter().all(|b| b.norm() == 0.0)
    }
}

fn plus_t_dagger(t: OperatorSum) -> Result<OperatorSum> {
    let td = t.adjoint();
    t.plus(&td)
}

fn hop(layout: &StarLayout, from: SiteId, to: SiteId) -> Result<OperatorSum> {
    layout
        .site_op(from, SiteOp::Plus)?
        .product(&layout.site_op(to, SiteOp::Minus)?)
}

fn pair(layout: &StarLayout, first: SiteId, second: SiteId) -> Result<OperatorSum> {
    layout
        .site_op(first, SiteOp::Minus)?
        .product(&layout.site_op(second, SiteOp::Minus)?)
}

/// Spin-side XX Hamiltonian; `with_aux` embeds it trivially on qubit 0.
pub fn build_xx_spin(p: &XXParams, with_aux: bool) -> Result<OperatorSum> {
    let layout = StarLayout::new(p.leg_length, with_aux)?;
    let mut t = OperatorSum::zero(layout.total_sites())?;
    for leg in 1..=LEGS {
        for pos in 1..p.leg_length {
            t = t.plus(&hop(
                &layout,
                SiteId::leg(leg, pos),
                SiteId::leg(leg, pos + 1),
            )?)?;
        }
    }
    for leg in 1..=LEGS {
        let v = hop(&layout, SiteId::leg(leg, 1), SiteId::leg(next_leg(leg), 1))?;
        t = t.plus(&v.scaled(p.rho))?;
    }
    plus_t_dagger(t)
}

fn leg_mode(leg: usize, pos: usize) -> Mode {
    Mode::Leg { leg, pos }
}

/// Axis of the Klein factor multiplying the vertex bond `leg → leg+1`:
/// `1→2` carries `η^z`, `2→3` carries `η^x`, `3→1` carries `η^y`.
pub fn vertex_axis(leg: usize) -> Axis {
    match leg {
        1 => Axis::Z,
        2 => Axis::X,
        _ => Axis::Y,
    }
}

/// Kondo-form Hamiltonian with Klein-factor fermions substituted:
/// `−Σ c†_α(j)c_α(j+1) + iρ Σ_α η^{a(α)} c†_α(1)c_{α+1}(1) + h.c.`
pub fn build_kondo_fermionic(p: &XXParams) -> Result<OperatorSum> {
    let fam = FermionFamily::new(FamilyKind::Klein, p.leg_length)?;
    let layout = *fam.layout();
    let mut t = OperatorSum::zero(layout.total_sites())?;
    for leg in 1..=LEGS {
        for pos in 1..p.leg_length {
            let term = fam
                .creator(leg_mode(leg, pos))?
                .product(&fam.annihilator(leg_mode(leg, pos + 1))?)?;
            t = t.minus(&term)?;
        }
    }
    for leg in 1..=LEGS {
        let term = klein_eta(vertex_axis(leg), &layout)?
            .product(&fam.creator(leg_mode(leg, 1))?)?
            .product(&fam.annihilator(leg_mode(next_leg(leg), 1))?)?;
        t = t.plus(&term.scaled(I * p.rho))?;
    }
    plus_t_dagger(t)
}

/// The spin-1 generators `(S^a)_{βγ} = −i ε_{aβγ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spin1Generators {
    pub x: Matrix3<Complex64>,
    pub y: Matrix3<Complex64>,
    pub z: Matrix3<Complex64>,
}

impl Default for Spin1Generators {
    fn default() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let i = I;
        Self {
            x: Matrix3::new(o, o, o, o, o, -i, o, i, o),
            y: Matrix3::new(o, o, i, o, o, o, -i, o, o),
            z: Matrix3::new(o, -i, o, i, o, o, o, o, o),
        }
    }
}

impl Spin1Generators {
    pub fn component(&self, axis: Axis) -> &Matrix3<Complex64> {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }
}

/// Real-`ρ` spin-1 form:
/// `−Σ (c†_α(j)c_α(j+1) + h.c.) − ρ Σ_a Σ_{αβ} η^a c†_α(1) (S^a)_{αβ} c_β(1)`.
pub fn build_kondo_spin1(leg_length: usize, rho: f64) -> Result<OperatorSum> {
    let fam = FermionFamily::new(FamilyKind::Klein, leg_length)?;
    let layout = *fam.layout();
    let mut hopping = OperatorSum::zero(layout.total_sites())?;
    for leg in 1..=LEGS {
        for pos in 1..leg_length {
            let term = fam
                .creator(leg_mode(leg, pos))?
                .product(&fam.annihilator(leg_mode(leg, pos + 1))?)?;
            hopping = hopping.minus(&term)?;
        }
    }
    let mut h = plus_t_dagger(hopping)?;
    let s = Spin1Generators::default();
    for axis in Axis::ALL {
        let eta = klein_eta(axis, &layout)?;
        let m = s.component(axis);
        for alpha in 1..=LEGS {
            for beta in 1..=LEGS {
                let entry = m[(alpha - 1, beta - 1)];
                if entry.norm() == 0.0 {
                    continue;
                }
                let term = eta
                    .product(&fam.creator(leg_mode(alpha, 1))?)?
                    .product(&fam.annihilator(leg_mode(beta, 1))?)?;
                h = h.minus(&term.scaled(entry * rho))?;
            }
        }
    }
    Ok(h)
}

/// Number of channels `2j(j+1)(2j+1)/3` of the multichannel Kondo model
/// equivalent to spin-`j` fermions.
pub fn kondo_channel_count(j: f64) -> Result<u64> {
    let two_j = 2.0 * j;
    if !(two_j.is_finite() && two_j >= 1.0 && two_j.fract() == 0.0) {
        return Err(Error::InvalidArgument(format!(
            "spin {j} is not a positive half-integer"
        )));
    }
    let t = two_j as u64;
    // 2j(j+1)(2j+1)/3 = t(t+1)(t+2)/6 with t = 2j
    Ok(t * (t + 1) * (t + 2) / 6)
}

/// Quadratic fermion Hamiltonian with auxiliary-site JW modes substituted.
pub fn build_qf_fermionic(p: &QFParams) -> Result<OperatorSum> {
    let fam = FermionFamily::new(FamilyKind::Aux, p.leg_length)?;
    let n = fam.layout().total_sites();
    let gamma = Complex64::new(p.gamma, 0.0);
    let mut t = OperatorSum::zero(n)?;
    for leg in 1..=LEGS {
        for pos in 1..p.leg_length {
            let (here, there) = (leg_mode(leg, pos), leg_mode(leg, pos + 1));
            let hopping = fam.creator(here)?.product(&fam.annihilator(there)?)?;
            let pairing = fam.annihilator(here)?.product(&fam.annihilator(there)?)?;
            t = t.plus(&hopping)?.minus(&pairing.scaled(gamma))?;
        }
    }
    for leg in 1..=LEGS {
        let (here, there) = (leg_mode(leg, 1), leg_mode(next_leg(leg), 1));
        let hopping = fam.creator(here)?.product(&fam.annihilator(there)?)?;
        let pairing = fam.annihilator(here)?.product(&fam.annihilator(there)?)?;
        t = t
            .plus(&hopping.scaled(I * p.a[leg - 1]))?
            .plus(&pairing.scaled(I * p.b[leg - 1]))?;
    }
    plus_t_dagger(t)
}

/// Spin chain obtained from [`build_qf_fermionic`]:
/// `−Σ (σ^+σ^- + γ σ^-σ^-) − H_V + h.c.`, where the vertex bond `α → α+1`
/// carries `σ^{a(α)}(0)` as in [`vertex_axis`].
pub fn build_qf_spin(p: &QFParams) -> Result<OperatorSum> {
    let layout = StarLayout::new(p.leg_length, true)?;
    let gamma = Complex64::new(p.gamma, 0.0);
    let mut t = OperatorSum::zero(layout.total_sites())?;
    for leg in 1..=LEGS {
        for pos in 1..p.leg_length {
            let (here, there) = (SiteId::leg(leg, pos), SiteId::leg(leg, pos + 1));
            t = t
                .minus(&hop(&layout, here, there)?)?
                .minus(&pair(&layout, here, there)?.scaled(gamma))?;
        }
    }
    for leg in 1..=LEGS {
        let (here, there) = (SiteId::leg(leg, 1), SiteId::leg(next_leg(leg), 1));
        let bond = hop(&layout, here, there)?
            .scaled(p.a[leg - 1])
            .plus(&pair(&layout, here, there)?.scaled(p.b[leg - 1]))?;
        let aux =
            OperatorSum::from_string(&layout.pauli(SiteId::Aux, vertex_axis(leg).pauli())?, ONE)?;
        t = t.minus(&aux.product(&bond)?)?;
    }
    plus_t_dagger(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equality {
    pub equal: bool,
    pub max_residual: f64,
}

/// Compare two operators coefficient-wise after pruning `A − B`.
pub fn operator_equal(a: &OperatorSum, b: &OperatorSum, tol: f64) -> Result<Equality> {
    let max_residual = a.minus(b)?.pruned(DEFAULT_PRUNE.min(tol)).max_abs_coeff();
    Ok(Equality {
        equal: max_residual <= tol,
        max_residual,
    })
}
