//! Free-fermion solution of the quadratic star-graph model.
//!
//! For equal real vertex hopping `a` and no pairing, the single-particle
//! matrix `A` has its `3L` eigenvalues split among three secular equations
//!
//! ```text
//! U_L(λ/2) + a√3 U_{L−1}(λ/2) = 0      (plus family)
//! U_L(λ/2) − a√3 U_{L−1}(λ/2) = 0      (minus family)
//! U_L(λ/2) = 0                          (chebyshev family)
//! ```
//!
//! with `U_n` the Chebyshev polynomials of the second kind. Roots are found
//! through `λ = 2cos θ` (in band) and `λ = ±2cosh t` (out of band) so that
//! no polynomial coefficients are ever formed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_diag::{eig_hermitian, hermiticity_deviation};
use crate::hamiltonians::QFParams;
use crate::par;
use crate::spectrum::{spectra_match, Spectrum};
use crate::star::{next_leg, LEGS};

/// Default cap on the number of modes enumerated into a many-body spectrum.
pub const DEFAULT_MODE_GUARD: usize = 12;

/// Agreement required between the sign-sum and occupation constructions.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

const BISECT_ITERS: usize = 200;

/// The `3L × 3L` single-particle matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingMatrix {
    pub leg_length: usize,
    pub a: f64,
    pub matrix: DMatrix<Complex64>,
}

impl HoppingMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Result<Spectrum> {
        eig_hermitian(&self.matrix)
    }
}

/// 0-based mode index of `(leg, pos)` after renumbering `(α, j) ↦ (α−1)L + j`.
fn mode_index(leg_length: usize, leg: usize, pos: usize) -> usize {
    (leg - 1) * leg_length + (pos - 1)
}

/// Hopping matrix: 1 on intra-leg nearest neighbours, `ia` on the vertex
/// bonds `1→L+1→2L+1→1` (1-based) and `−ia` on their transposes.
pub fn build_a(leg_length: usize, a: f64) -> Result<HoppingMatrix> {
    if leg_length == 0 {
        return Err(Error::InvalidArgument("leg length must be positive".into()));
    }
    let n = LEGS * leg_length;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for leg in 1..=LEGS {
        for pos in 1..leg_length {
            let i = mode_index(leg_length, leg, pos);
            m[(i, i + 1)] = Complex64::new(1.0, 0.0);
            m[(i + 1, i)] = Complex64::new(1.0, 0.0);
        }
        let p = mode_index(leg_length, leg, 1);
        let q = mode_index(leg_length, next_leg(leg), 1);
        m[(p, q)] += Complex64::new(0.0, a);
        m[(q, p)] += Complex64::new(0.0, -a);
    }
    Ok(HoppingMatrix {
        leg_length,
        a,
        matrix: m,
    })
}

/// Chebyshev polynomial of the second kind, by the three-term recurrence.
pub fn chebyshev_u(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RootFamily {
    Plus,
    Minus,
    Chebyshev,
}

impl RootFamily {
    pub const ALL: [RootFamily; 3] = [RootFamily::Plus, RootFamily::Minus, RootFamily::Chebyshev];

    pub fn name(self) -> &'static str {
        match self {
            RootFamily::Plus => "plus",
            RootFamily::Minus => "minus",
            RootFamily::Chebyshev => "chebyshev",
        }
    }
}

/// One single-particle energy with its family and 1-based rank `k` inside
/// the family (ascending in λ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeRoot {
    pub family: RootFamily,
    pub k: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSpectrum {
    pub leg_length: usize,
    pub a: f64,
    /// Ascending in λ.
    pub roots: Vec<ModeRoot>,
}

impl ModeSpectrum {
    pub fn lambdas(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.lambda).collect()
    }

    /// Roots of one family, ascending.
    pub fn family(&self, family: RootFamily) -> Vec<f64> {
        let mut v: Vec<(usize, f64)> = self
            .roots
            .iter()
            .filter(|r| r.family == family)
            .map(|r| (r.k, r.lambda))
            .collect();
        v.sort_by_key(|&(k, _)| k);
        v.into_iter().map(|(_, l)| l).collect()
    }

    /// Roots outside the band `[−2, 2]`.
    pub fn isolated(&self) -> Vec<ModeRoot> {
        self.roots
            .iter()
            .filter(|r| r.lambda.abs() > 2.0)
            .copied()
            .collect()
    }
}

/// `sin((L+1)θ) + c·sin(Lθ) = sin θ · (U_L + c·U_{L−1})(cos θ)`.
fn band_fn(leg_length: usize, c: f64, theta: f64) -> f64 {
    let l = leg_length as f64;
    ((l + 1.0) * theta).sin() + c * (l * theta).sin()
}

/// `(U_L + c·U_{L−1})` at `λ/2 = ±1`, i.e. at θ = 0 or π.
fn band_edge(leg_length: usize, c: f64, at_pi: bool) -> f64 {
    let l = leg_length as f64;
    if at_pi {
        let sign = if leg_length.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        sign * ((l + 1.0) - c * l)
    } else {
        (l + 1.0) + c * l
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// In-band roots θ ∈ [0, π] of `U_L + c·U_{L−1}` on a grid of `cells` cells.
fn band_roots(leg_length: usize, c: f64, cells: usize) -> Vec<f64> {
    let step = std::f64::consts::PI / cells as f64;
    let value = |i: usize| -> f64 {
        if i == 0 {
            band_edge(leg_length, c, false)
        } else if i == cells {
            band_edge(leg_length, c, true)
        } else {
            band_fn(leg_length, c, i as f64 * step)
        }
    };
    let values: Vec<f64> = (0..=cells).map(value).collect();
    let brackets: Vec<usize> = (0..cells)
        .filter(|&i| {
            values[i] != 0.0 && values[i + 1] != 0.0 && (values[i] > 0.0) != (values[i + 1] > 0.0)
        })
        .collect();
    let mut roots: Vec<f64> = (0..=cells)
        .filter(|&i| values[i] == 0.0)
        .map(|i| i as f64 * step)
        .collect();
    roots.extend(par::map_slice(&brackets, |&i| {
        let lo = i as f64 * step;
        let hi = (i + 1) as f64 * step;
        // the endpoints 0 and π carry the same sign as band_fn just inside
        bisect(
            |t| band_fn(leg_length, c, t),
            lo.max(f64::MIN_POSITIVE),
            hi.min(std::f64::consts::PI),
        )
    }));
    roots
}

/// Out-of-band root of `U_L + c·U_{L−1}`, if any. At most one exists.
fn isolated_root(leg_length: usize, c: f64) -> Option<f64> {
    let l = leg_length as f64;
    let threshold = (l + 1.0) / l;
    // λ = +2cosh t needs R(t) = −c; λ = −2cosh t needs R(t) = c, with
    // R(t) = sinh((L+1)t)/sinh(Lt) = cosh t + sinh t·coth(Lt) increasing
    // from (L+1)/L.
    let (target, sign) = if -c > threshold {
        (-c, 1.0)
    } else if c > threshold {
        (c, -1.0)
    } else {
        return None;
    };
    let ratio = |t: f64| t.cosh() + t.sinh() / (l * t).tanh() - target;
    let t = bisect(ratio, 1e-300, target.ln() + 1.0);
    Some(sign * 2.0 * t.cosh())
}

fn family_roots(leg_length: usize, a: f64, family: RootFamily) -> Result<Vec<f64>> {
    let l = leg_length;
    if family == RootFamily::Chebyshev {
        return Ok((1..=l)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (l as f64 + 1.0)).cos())
            .collect());
    }
    let c = match family {
        RootFamily::Plus => a * 3f64.sqrt(),
        _ => -a * 3f64.sqrt(),
    };
    let mut cells = 8 * (l + 1) + 3;
    let mut found = Vec::new();
    for _ in 0..6 {
        found = band_roots(l, c, cells)
            .into_iter()
            .map(|t| 2.0 * t.cos())
            .collect();
        if found.len() < l {
            found.extend(isolated_root(l, c));
        }
        if found.len() == l {
            return Ok(found);
        }
        cells = 2 * cells + 1;
    }
    Err(Error::RootCount {
        family: family.name(),
        found: found.len(),
        expected: l,
    })
}

/// All `3L` eigenvalues of [`build_a`] from the secular equations.
pub fn secular_roots(leg_length: usize, a: f64) -> Result<ModeSpectrum> {
    if leg_length == 0 {
        return Err(Error::InvalidArgument("leg length must be positive".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("coupling must be finite".into()));
    }
    let mut roots = Vec::with_capacity(LEGS * leg_length);
    for family in RootFamily::ALL {
        let mut lambdas = family_roots(leg_length, a, family)?;
        lambdas.sort_by(f64::total_cmp);
        roots.extend(lambdas.into_iter().enumerate().map(|(i, lambda)| ModeRoot {
            family,
            k: i + 1,
            lambda,
        }));
    }
    roots.sort_by(|x, y| x.lambda.total_cmp(&y.lambda).then(x.family.cmp(&y.family)));
    Ok(ModeSpectrum {
        leg_length,
        a,
        roots,
    })
}

/// Rows `(family, k, λ)`: families in order plus, minus, chebyshev; `k` and
/// λ ascending within each.
pub fn dispersion_table(leg_length: usize, a: f64) -> Result<Vec<ModeRoot>> {
    let modes = secular_roots(leg_length, a)?;
    let mut rows = modes.roots;
    rows.sort_by(|x, y| x.family.cmp(&y.family).then(x.k.cmp(&y.k)));
    Ok(rows)
}

pub fn dispersion_csv(rows: &[ModeRoot]) -> String {
    let mut out = String::from("family,k,lambda\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.16e}\n", r.family.name(), r.k, r.lambda));
    }
    out
}

fn mode_guard(n: usize, guard: usize) -> Result<()> {
    if n > guard || n >= 64 {
        return Err(Error::GuardExceeded {
            what: "many-body modes",
            requested: n,
            limit: guard.min(63),
        });
    }
    Ok(())
}

fn enumerate<F>(n: usize, energy: F) -> Result<Spectrum>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    let values = par::map_range(0..1usize << n, |mask| energy(mask as u64));
    Spectrum::new(values)
}

/// `{½ Σ_k ε_k |λ_k| : ε_k = ±1}`; bit `k` of the index selects `ε_k = +1`.
pub fn sign_sum_energies(lambdas: &[f64], guard: usize) -> Result<Spectrum> {
    mode_guard(lambdas.len(), guard)?;
    enumerate(lambdas.len(), |mask| {
        0.5 * lambdas
            .iter()
            .enumerate()
            .map(|(k, l)| {
                if mask >> k & 1 == 1 {
                    l.abs()
                } else {
                    -l.abs()
                }
            })
            .sum::<f64>()
    })
}

/// `{Σ_k n_k λ_k : n_k ∈ {0, 1}}`.
pub fn occupation_energies(lambdas: &[f64], guard: usize) -> Result<Spectrum> {
    mode_guard(lambdas.len(), guard)?;
    enumerate(lambdas.len(), |mask| {
        lambdas
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, l)| l)
            .sum()
    })
}

/// All `2^{3L}` many-body energies of the particle-conserving model.
///
/// The sign-sum form equals the occupation form only because `Σ λ_k = 0`;
/// both are computed and an error is returned if they disagree.
pub fn many_body_spectrum(modes: &ModeSpectrum, guard: usize) -> Result<Spectrum> {
    let lambdas = modes.lambdas();
    let signs = sign_sum_energies(&lambdas, guard)?;
    let occupations = occupation_energies(&lambdas, guard)?;
    let m = spectra_match(&signs, &occupations, 1, CONSTRUCTION_TOL)?;
    if !m.matched {
        return Err(Error::InvalidArgument(format!(
            "sign-sum and occupation spectra differ by {:e}",
            m.max_dev
        )));
    }
    Ok(signs)
}

/// `−½ Σ_k |λ_k|`.
pub fn ground_energy(modes: &ModeSpectrum) -> f64 {
    -0.5 * modes.roots.iter().map(|r| r.lambda.abs()).sum::<f64>()
}

/// Many-body spectrum of the general quadratic model from the BdG doubling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BdgSpectrum {
    pub spectrum: Spectrum,
    /// Non-negative quasiparticle energies, ascending.
    pub mode_energies: Vec<f64>,
    /// Energy of the quasiparticle vacuum, `½ tr A − ½ Σ_m E_m`.
    pub constant: f64,
}

/// Hopping block `A` and antisymmetric pairing block `Δ` of
/// `H = Σ A_ij d_i†d_j + ½ Σ (Δ_ij d_i†d_j† + h.c.)`.
pub fn bdg_blocks(p: &QFParams) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let l = p.leg_length;
    if l == 0 {
        return Err(Error::InvalidArgument("leg length must be positive".into()));
    }
    let n = LEGS * l;
    let mut hop = DMatrix::<Complex64>::zeros(n, n);
    let mut pair = DMatrix::<Complex64>::zeros(n, n);
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let gamma = Complex64::new(p.gamma, 0.0);
    for leg in 1..=LEGS {
        for pos in 1..l {
            let j = mode_index(l, leg, pos);
            hop[(j, j + 1)] += one;
            hop[(j + 1, j)] += one;
            // (−γ d_j d_{j+1})† = γ* d_j† d_{j+1}†
            pair[(j, j + 1)] += gamma.conj();
            pair[(j + 1, j)] -= gamma.conj();
        }
        let (pv, qv) = (mode_index(l, leg, 1), mode_index(l, next_leg(leg), 1));
        let t = i * p.a[leg - 1];
        hop[(pv, qv)] += t;
        hop[(qv, pv)] += t.conj();
        // (i b d_p d_q)† = i b* d_p† d_q†
        let s = i * p.b[leg - 1].conj();
        pair[(pv, qv)] += s;
        pair[(qv, pv)] -= s;
    }
    Ok((hop, pair))
}

/// Spectrum of the quadratic model for general `γ`, `a_α`, `b_α`.
pub fn bdg_spectrum(p: &QFParams, guard: usize) -> Result<BdgSpectrum> {
    let n = LEGS * p.leg_length;
    mode_guard(n, guard)?;
    let (hop, pair) = bdg_blocks(p)?;
    let mut h = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(&hop);
    h.view_mut((0, n), (n, n)).copy_from(&pair);
    h.view_mut((n, 0), (n, n)).copy_from(&pair.adjoint());
    h.view_mut((n, n), (n, n)).copy_from(&(-hop.transpose()));
    let dev = hermiticity_deviation(&h);
    if dev > 1e-14 {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let eig = eig_hermitian(&h)?;
    let mode_energies: Vec<f64> = eig.values()[n..].iter().map(|e| e.max(0.0)).collect();
    let trace: f64 = (0..n).map(|k| hop[(k, k)].re).sum();
    let constant = 0.5 * trace - 0.5 * mode_energies.iter().sum::<f64>();
    let spectrum = enumerate(n, |mask| {
        constant
            + mode_energies
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, e)| e)
                .sum::<f64>()
    })?;
    Ok(BdgSpectrum {
        spectrum,
        mode_energies,
        constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hopping_matrix_entries() {
        let h = build_a(2, 0.5).unwrap();
        let m = &h.matrix;
        let ia = Complex64::new(0.0, 0.5);
        // 1-based (1,3), (3,5), (5,1)
        assert_eq!(m[(0, 2)], ia);
        assert_eq!(m[(2, 4)], ia);
        assert_eq!(m[(4, 0)], ia);
        assert_eq!(m[(2, 0)], -ia);
        for (i, j) in [(0, 1), (2, 3), (4, 5)] {
            assert_eq!(m[(i, j)], Complex64::new(1.0, 0.0));
            assert_eq!(m[(j, i)], Complex64::new(1.0, 0.0));
        }
        assert_eq!(hermiticity_deviation(m), 0.0);
        assert_eq!(m.trace(), Complex64::new(0.0, 0.0));
        assert!(build_a(0, 1.0).is_err());
    }

    #[test]
    fn unit_length_matrix() {
        let h = build_a(1, 1.0).unwrap();
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(h.matrix[(0, 1)], i);
        assert_eq!(h.matrix[(1, 2)], i);
        assert_eq!(h.matrix[(2, 0)], i);
        let ev = h.eigenvalues().unwrap();
        let r3 = 3f64.sqrt();
        for (x, y) in ev.values().iter().zip([-r3, 0.0, r3]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(chebyshev_u(0, 0.3), 1.0);
        assert_eq!(chebyshev_u(1, 0.3), 0.6);
        assert_eq!(chebyshev_u(5, 1.0), 6.0);
        assert_eq!(chebyshev_u(4, -1.0), 5.0);
    }

    #[test]
    fn unit_length_roots() {
        let m = secular_roots(1, 1.0).unwrap();
        let r3 = 3f64.sqrt();
        let l = m.lambdas();
        for (x, y) in l.iter().zip([-r3, 0.0, r3]) {
            assert!((x - y).abs() < 1e-13, "{l:?}");
        }
        assert_eq!(
            m.family(RootFamily::Chebyshev),
            vec![2.0 * (PI / 2.0).cos()]
        );
    }

    #[test]
    fn isolated_root_threshold() {
        // |a|√3 must exceed (L+1)/L for an out-of-band root
        let l = 4;
        let below = secular_roots(l, 1.2 / 3f64.sqrt()).unwrap();
        assert!(below.isolated().is_empty());
        let above = secular_roots(l, 1.3 / 3f64.sqrt()).unwrap();
        let iso = above.isolated();
        assert_eq!(iso.len(), 2);
        assert!(iso
            .iter()
            .any(|r| r.family == RootFamily::Plus && r.lambda < -2.0));
        assert!(iso
            .iter()
            .any(|r| r.family == RootFamily::Minus && r.lambda > 2.0));
    }

    #[test]
    fn roots_at_band_edge() {
        // a√3 = (L+1)/L puts a root exactly at λ = ±2
        let l = 3;
        let a = (4.0 / 3.0) / 3f64.sqrt();
        let m = secular_roots(l, a).unwrap();
        assert_eq!(m.roots.len(), 9);
        let eig = build_a(l, a).unwrap().eigenvalues().unwrap();
        for (x, y) in m.lambdas().iter().zip(eig.values()) {
            assert!((x - y).abs() < 1e-7, "{x} vs {y}");
        }
    }

    #[test]
    fn many_body_examples() {
        let r3 = 3f64.sqrt();
        let s = sign_sum_energies(&[0.0, r3, -r3], 12).unwrap();
        let expected = [-r3, -r3, 0.0, 0.0, 0.0, 0.0, r3, r3];
        for (x, y) in s.values().iter().zip(expected) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(sign_sum_energies(&[], 12).unwrap().values(), &[0.0]);
        assert_eq!(
            sign_sum_energies(&[1.0], 12).unwrap().values(),
            &[-0.5, 0.5]
        );
        // the occupation form differs when Σλ ≠ 0
        assert_eq!(
            occupation_energies(&[1.0], 12).unwrap().values(),
            &[0.0, 1.0]
        );
        assert!(sign_sum_energies(&[0.0; 13], 12).is_err());
    }

    #[test]
    fn ground_energies() {
        let m = secular_roots(1, 1.0).unwrap();
        assert!((ground_energy(&m) + 3f64.sqrt()).abs() < 1e-14);
        let m0 = secular_roots(2, 0.0).unwrap();
        assert!((ground_energy(&m0) + 3.0).abs() < 1e-14);
    }

    #[test]
    fn bdg_reduces_to_hopping() {
        let p = QFParams::uniform_hopping(2, 0.7);
        let b = bdg_spectrum(&p, 12).unwrap();
        let f = many_body_spectrum(&secular_roots(2, 0.7).unwrap(), 12).unwrap();
        let m = spectra_match(&f, &b.spectrum, 1, 1e-12).unwrap();
        assert!(m.matched, "{}", m.max_dev);
        assert!(bdg_spectrum(&QFParams::uniform_hopping(5, 0.7), 12).is_err());
    }

    #[test]
    fn dispersion_rows() {
        let rows = dispersion_table(1, 1.0).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].family, RootFamily::Plus);
        let csv = dispersion_csv(&rows);
        assert!(csv.starts_with("family,k,lambda\nplus,1,"));
        assert_eq!(csv.lines().count(), 4);
    }
}
