//! Finite-range transfer matrix across the barrier-well profile.
//!
//! The transfer matrix `Λ` maps `(ψ(0), ψ'(0))` to `(ψ(x0), ψ'(x0))` with
//! `x0 = 2l + rho`. Inside the barrier the solution is built from `e^{±px}`,
//! in the gap from `sin kx, cos kx`, and in the well from `sin qx, cos qx`, with
//!
//! ```text
//! k = √E,   p = √(λ/l² − E),   q = √(λ/l² + E).
//! ```
//!
//! The barrier and well heights entering `p` and `q` are `±λ/l²`; they agree
//! with [`RectProfile::height`] only when `rho = 0`.
//!
//! Every entry of `Λ` is an even function of `p` and of `q`, so for real
//! inputs the matrix is real whichever side of `E = λ/l²` we are on. Entries
//! are evaluated in double-double precision: away from `l ~ 1` they reach
//! `10^6` and beyond, and `f64` rounding alone would move the determinant
//! away from 1 by far more than `10^-12`.

use num_complex::Complex64;

use crate::ddouble::Dd;
use crate::error::{positive, Error, Result};
use crate::profile::RectProfile;

/// Wavenumbers of the three interior regions at energy `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParams {
    pub energy: f64,
    pub k: f64,
    /// Barrier decay constant, principal branch (purely imaginary above the barrier).
    pub p: Complex64,
    /// Well wavenumber, principal branch.
    pub q: Complex64,
}

impl WaveParams {
    pub fn new(lambda: f64, l: f64, energy: f64) -> Result<Self> {
        positive("E", energy)?;
        positive("l", l)?;
        let v = lambda / (l * l);
        Ok(WaveParams {
            energy,
            k: energy.sqrt(),
            p: Complex64::new(v - energy, 0.0).sqrt(),
            q: Complex64::new(v + energy, 0.0).sqrt(),
        })
    }
}

/// 2×2 real transfer matrix with its range `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    m: [[Dd; 2]; 2],
    x0: f64,
}

impl TransferMatrix {
    pub fn from_entries(m: [[f64; 2]; 2], x0: f64) -> Self {
        TransferMatrix {
            m: m.map(|row| row.map(Dd::from)),
            x0,
        }
    }

    pub(crate) fn from_dd(m: [[Dd; 2]; 2], x0: f64) -> Self {
        TransferMatrix { m, x0 }
    }

    pub fn identity() -> Self {
        Self::from_entries([[1.0, 0.0], [0.0, 1.0]], 0.0)
    }

    /// Entries rounded to `f64`, row-major.
    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.m.map(|row| row.map(Dd::to_f64))
    }

    /// Entry `Λ_{ij}` with one-based indices.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i - 1][j - 1].to_f64()
    }

    /// `[Λ11, Λ12, Λ21, Λ22]`.
    pub fn flat(&self) -> [f64; 4] {
        let [[a, b], [c, d]] = self.entries();
        [a, b, c, d]
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn det(&self) -> f64 {
        self.det_dd().to_f64()
    }

    /// `|det Λ − 1|`, evaluated before rounding to `f64`.
    pub fn det_residual(&self) -> f64 {
        (self.det_dd() - 1.0).abs().to_f64()
    }

    fn det_dd(&self) -> Dd {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Largest entrywise relative difference, each entry scaled by
    /// `max(|a|, |b|, 1e-300)`.
    pub fn max_relative_difference(&self, other: &TransferMatrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let a = self.m[i][j];
                let b = other.m[i][j];
                let scale = a.abs().to_f64().max(b.abs().to_f64()).max(1e-300);
                worst = worst.max((a - b).abs().to_f64() / scale);
            }
        }
        worst
    }

    fn mul(&self, rhs: &TransferMatrix) -> TransferMatrix {
        let (a, b) = (&self.m, &rhs.m);
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        TransferMatrix::from_dd(m, self.x0 + rhs.x0)
    }
}

/// Reflection and transmission amplitudes for incidence from the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAmplitudes {
    pub r: Complex64,
    pub t: Complex64,
}

impl ScatteringAmplitudes {
    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }

    /// `| |R|² + |T|² − 1 |`.
    pub fn conservation_residual(&self) -> f64 {
        (self.reflectance() + self.transmittance() - 1.0).abs()
    }
}

/// `(cos(√a·w), sin(√a·w)/√a)`, continued to `a ≤ 0` as `(cosh, sinh/√−a)`.
fn wave_pair(a: Dd, w: Dd) -> (Dd, Dd) {
    let z = a * w.sqr();
    if z.hi().abs() < 1.0 {
        // cos = Σ (−z)^n/(2n)!,  sin/√a = w Σ (−z)^n/(2n+1)!
        let mut c = Dd::ONE;
        let mut s = Dd::ONE;
        let mut tc = Dd::ONE;
        let mut ts = Dd::ONE;
        let mut n = 0.0;
        loop {
            tc = -(tc * z) / ((n + 1.0) * (n + 2.0));
            ts = -(ts * z) / ((n + 2.0) * (n + 3.0));
            n += 2.0;
            c += tc;
            s += ts;
            if tc.hi().abs() < 1e-34 && ts.hi().abs() < 1e-34 {
                break;
            }
        }
        (c, s * w)
    } else if a.hi() > 0.0 {
        let r = a.sqrt();
        let (sin, cos) = (r * w).sin_cos();
        (cos, sin / r)
    } else {
        let r = (-a).sqrt();
        let (sinh, cosh) = (r * w).sinh_cosh();
        (cosh, sinh / r)
    }
}

fn validate_energy(energy: f64) -> Result<()> {
    if energy.is_nan() || energy <= 0.0 || energy.is_infinite() {
        return Err(Error::invalid(
            "E",
            format!("energy must be > 0, got {energy}"),
        ));
    }
    Ok(())
}

/// Region data `(κ², width)` with `ψ'' = −κ² ψ` inside: barrier, gap, well.
fn regions(profile: &RectProfile, energy: f64) -> [(Dd, Dd); 3] {
    let l = Dd::from(profile.l());
    let v = Dd::from(profile.lambda()) / l.sqr();
    let e = Dd::from(energy);
    [(e - v, l), (e, Dd::from(profile.rho())), (e + v, l)]
}

/// Closed-form transfer matrix.
pub fn transfer_matrix(profile: &RectProfile, energy: f64) -> Result<TransferMatrix> {
    validate_energy(energy)?;
    let [(barrier, l), (_, rho), (well, _)] = regions(profile, energy);
    let k = Dd::from(energy).sqrt();

    // cosh(pl), sinh(pl)/p, p sinh(pl)
    let (ch, sp) = wave_pair(barrier, l);
    let ps = -(barrier * sp);
    // cos(ql), sin(ql)/q, q sin(ql)
    let (cq, sq) = wave_pair(well, l);
    let qs = well * sq;
    let (sk, ck) = (k * rho).sin_cos();

    let l11 = (ch * cq + ps * sq) * ck + (ps * cq / k - k * ch * sq) * sk;
    let l12 = (sp * cq + ch * sq) * ck + (ch * cq / k - k * sp * sq) * sk;
    let l21 = (ps * cq - ch * qs) * ck - (k * ch * cq + ps * qs / k) * sk;
    let l22 = (ch * cq - sp * qs) * ck - (k * sp * cq + ch * qs / k) * sk;

    Ok(TransferMatrix::from_dd(
        [[l11, l12], [l21, l22]],
        profile.range(),
    ))
}

/// Basis matrix `[[f1, f2], [f1', f2']]` at `x` for the region starting at `a`.
///
/// Oscillatory regions use `sin κx, cos κx` in absolute coordinates; decaying
/// regions use `e^{±κ(x−a)}` so the exponentials stay bounded.
fn basis(kappa2: Dd, a: Dd, x: Dd) -> [[Dd; 2]; 2] {
    if kappa2.hi() > 0.0 {
        let w = kappa2.sqrt();
        let (s, c) = (w * x).sin_cos();
        [[s, c], [w * c, -(w * s)]]
    } else if kappa2.hi() < 0.0 {
        let w = (-kappa2).sqrt();
        let e = (w * (x - a)).exp();
        let ei = e.recip();
        [[e, ei], [w * e, -(w * ei)]]
    } else {
        [[x, Dd::ONE], [Dd::ONE, Dd::ZERO]]
    }
}

/// Propagator `W(b) W(a)^{-1}` across one region.
fn region_propagator(kappa2: Dd, a: Dd, b: Dd) -> TransferMatrix {
    let wa = basis(kappa2, a, a);
    let wb = basis(kappa2, a, b);
    let det = wa[0][0] * wa[1][1] - wa[0][1] * wa[1][0];
    let inv = [
        [wa[1][1] / det, -(wa[0][1] / det)],
        [-(wa[1][0] / det), wa[0][0] / det],
    ];
    let wb = TransferMatrix::from_dd(wb, (b - a).to_f64());
    wb.mul(&TransferMatrix::from_dd(inv, 0.0))
}

/// Transfer matrix from matching the piecewise solution at the interfaces
/// `0, l, l + rho, 2l + rho`. Independent of the closed form in
/// [`transfer_matrix`]; the two must agree.
pub fn piecewise_transfer(profile: &RectProfile, energy: f64) -> Result<TransferMatrix> {
    validate_energy(energy)?;
    let regions = regions(profile, energy);
    let mut start = Dd::ZERO;
    let mut total = TransferMatrix::from_dd([[Dd::ONE, Dd::ZERO], [Dd::ZERO, Dd::ONE]], 0.0);
    for (kappa2, width) in regions {
        let end = start + width;
        let step = region_propagator(kappa2, start, end);
        total = step.mul(&total);
        start = end;
    }
    Ok(TransferMatrix::from_dd(total.m, profile.range()))
}

/// Reflection and transmission amplitudes from a transfer matrix at
/// wavenumber `k`.
pub fn scattering(tm: &TransferMatrix, k: f64) -> Result<ScatteringAmplitudes> {
    positive("k", k)?;
    let [[a, b], [c, d]] = tm.entries();
    let i = Complex64::i();
    let delta = Complex64::from(a + d) - i * (k * b - c / k);
    // |Δ|² = (Λ11 + Λ22)² + (kΛ12 − Λ21/k)² ≥ 4 when det Λ = 1
    if delta.norm() < 2.0 - 1e-9 {
        return Err(Error::InvariantViolation {
            what: "|Δ| >= 2 for a unit-determinant real matrix",
            residual: 2.0 - delta.norm(),
        });
    }
    let r = -(Complex64::from(a - d) + i * (k * b + c / k)) / delta;
    let t = 2.0 / delta * Complex64::from_polar(1.0, -k * tm.x0());
    Ok(ScatteringAmplitudes { r, t })
}
