//! Resonance sets of the squeezed barrier-well and the limiting data at them.
//!
//! Along the adjacent path (and any `rho = c l^tau` with `tau >= 2`) the
//! resonances are the positive roots of `tanh σ = tan σ`, `σ = √λ`. Along
//! `rho = c l` they solve `tanh σ / (1 + cσ tanh σ) = tan σ`. Both equations
//! have exactly one root in each `(nπ, nπ + π/2)`, `n = 1, 2, ...`, and the
//! bracket index `n` fixes the sign factors `(−1)^n` of the limiting data.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{finite, positive, Error, Result};
use crate::limits::SqueezePath;
use crate::roots::{bracketed_root, Tolerance};
use crate::transfer::ScatteringAmplitudes;

const BRACKET_MARGIN: f64 = 1e-9;
/// Spread of redundant closed forms above which an input is rejected as a
/// non-root.
const ROOT_SPREAD_LIMIT: f64 = 1e-6;

/// Which resonance equation and which limiting data apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResonanceFamily {
    /// `rho = 0`, or `rho = c l^tau` with `tau > 2`: χ from the adjacent roots, g = 0.
    Adjacent,
    /// `rho = c l`: shifted roots, g = 0.
    Linear { c: f64 },
    /// `rho = c l²`: adjacent roots with a non-zero lower-left entry g.
    Quadratic { c: f64 },
}

impl ResonanceFamily {
    pub fn path(&self) -> SqueezePath {
        match *self {
            ResonanceFamily::Adjacent => SqueezePath::Adjacent,
            ResonanceFamily::Linear { c } => SqueezePath::PowerLaw { c, tau: 1.0 }.normalized(),
            ResonanceFamily::Quadratic { c } => SqueezePath::PowerLaw { c, tau: 2.0 }.normalized(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ResonanceFamily::Adjacent => Ok(()),
            ResonanceFamily::Linear { c } | ResonanceFamily::Quadratic { c } => {
                if finite("c", c)? < 0.0 {
                    Err(Error::invalid("c", format!("must be >= 0, got {c}")))
                } else {
                    Ok(())
                }
            }
        }
    }
}

impl fmt::Display for ResonanceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResonanceFamily::Adjacent => write!(f, "adjacent"),
            ResonanceFamily::Linear { c } => write!(f, "linear:{c}"),
            ResonanceFamily::Quadratic { c } => write!(f, "quadratic:{c}"),
        }
    }
}

impl FromStr for ResonanceFamily {
    type Err = Error;

    /// `adjacent`, `linear[:c]`, `quadratic[:c]`; `c` defaults to 1.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().splitn(2, ':');
        let name = parts.next().unwrap_or_default();
        let c = match parts.next() {
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::invalid("path", format!("bad constant `{v}`")))?,
            None => 1.0,
        };
        let family = match name {
            "adjacent" if s.trim() == "adjacent" => ResonanceFamily::Adjacent,
            "linear" => ResonanceFamily::Linear { c },
            "quadratic" => ResonanceFamily::Quadratic { c },
            _ => {
                return Err(Error::invalid(
                    "path",
                    format!("expected adjacent, linear[:c] or quadratic[:c], got `{s}`"),
                ))
            }
        };
        family.validate()?;
        Ok(family)
    }
}

/// A resonance with its limiting connection-matrix data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub n: usize,
    pub sigma: f64,
    /// `sigma²`.
    pub lambda: f64,
    /// Limit of `Λ11`; `Λ22` tends to `1/chi`.
    pub chi: f64,
    /// Limit of `Λ21`.
    pub g: f64,
    /// Bound-state decay constant, 0 when there is none.
    pub kappa: f64,
    pub path: SqueezePath,
}

impl Resonance {
    /// Zero-range scattering amplitudes at wavenumber `k`.
    pub fn scattering(&self, k: f64) -> Result<ScatteringAmplitudes> {
        resonant_scattering(self.chi, self.g, k)
    }
}

/// `tanh σ − tan σ`.
pub fn adjacent_equation(sigma: f64) -> f64 {
    sigma.tanh() - sigma.tan()
}

/// `tanh σ / (1 + cσ tanh σ) − tan σ`.
pub fn linear_equation(sigma: f64, c: f64) -> f64 {
    let th = sigma.tanh();
    th / (1.0 + c * sigma * th) - sigma.tan()
}

/// Bracket index `n` with `σ ∈ (nπ, nπ + π/2)`.
pub fn resonance_index(sigma: f64) -> usize {
    (sigma / PI).floor().max(0.0) as usize
}

fn bracket(n: usize) -> (f64, f64) {
    let lo = n as f64 * PI;
    (lo + BRACKET_MARGIN, lo + FRAC_PI_2 - BRACKET_MARGIN)
}

fn sign(n: usize) -> f64 {
    if n & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `n`-th positive root of `tanh σ = tan σ`.
pub fn adjacent_root(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "resonances are indexed from 1"));
    }
    let (lo, hi) = bracket(n);
    bracketed_root(adjacent_equation, lo, hi, Tolerance::default())
}

/// `n`-th positive root of `tanh σ / (1 + cσ tanh σ) = tan σ`.
pub fn linear_root(n: usize, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "resonances are indexed from 1"));
    }
    if finite("c", c)? < 0.0 {
        return Err(Error::invalid("c", format!("must be >= 0, got {c}")));
    }
    let (lo, hi) = bracket(n);
    bracketed_root(|s| linear_equation(s, c), lo, hi, Tolerance::default())
}

/// Relative spread `(max − min) / max|v|` of redundant evaluations.
pub fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        0.0
    } else {
        (max - min) / scale
    }
}

fn checked(sigma: f64, forms: [f64; 3]) -> Result<f64> {
    let spread = relative_spread(&forms);
    if spread.is_nan() || spread > ROOT_SPREAD_LIMIT {
        return Err(Error::NotARoot { sigma, spread });
    }
    Ok(forms[2])
}

/// `[cosh σ / cos σ, sinh σ / sin σ, (−1)^n √cosh 2σ]`; equal at adjacent roots.
pub fn chi_adjacent_forms(sigma: f64) -> [f64; 3] {
    let n = resonance_index(sigma);
    [
        sigma.cosh() / sigma.cos(),
        sigma.sinh() / sigma.sin(),
        sign(n) * (2.0 * sigma).cosh().sqrt(),
    ]
}

/// Limit of `Λ11` at an adjacent root.
pub fn chi_adjacent(sigma: f64) -> Result<f64> {
    positive("sigma", sigma)?;
    checked(sigma, chi_adjacent_forms(sigma))
}

/// `[(cosh σ + cσ sinh σ)/cos σ, sinh σ/sin σ, (−1)^n √((cosh σ + cσ sinh σ)² + sinh² σ)]`.
pub fn chi_linear_forms(sigma: f64, c: f64) -> [f64; 3] {
    let n = resonance_index(sigma);
    let (sh, ch) = (sigma.sinh(), sigma.cosh());
    let num = ch + c * sigma * sh;
    [num / sigma.cos(), sh / sigma.sin(), sign(n) * num.hypot(sh)]
}

/// Limit of `Λ11` at a root of the linear-path equation.
pub fn chi_linear(sigma: f64, c: f64) -> Result<f64> {
    positive("sigma", sigma)?;
    if finite("c", c)? < 0.0 {
        return Err(Error::invalid("c", format!("must be >= 0, got {c}")));
    }
    checked(sigma, chi_linear_forms(sigma, c))
}

/// `[−cσ² sinh σ sin σ, (−1)^{n+1} cσ² sinh² σ / √cosh 2σ]`.
pub fn g_quadratic_forms(sigma: f64, c: f64, n: usize) -> [f64; 2] {
    let s2 = sigma * sigma;
    let sh = sigma.sinh();
    [
        -c * s2 * sh * sigma.sin(),
        -sign(n) * c * s2 * sh * sh / (2.0 * sigma).cosh().sqrt(),
    ]
}

/// Limit of `Λ21` along `rho = c l²` at the `n`-th adjacent root.
pub fn g_quadratic(sigma: f64, c: f64, n: usize) -> f64 {
    g_quadratic_forms(sigma, c, n)[1]
}

/// `[−g/(χ + 1/χ), (c/2) σ² tanh² σ]` at the `n`-th adjacent root.
pub fn kappa_quadratic_forms(sigma: f64, c: f64, n: usize) -> [f64; 2] {
    let chi = sign(n) * (2.0 * sigma).cosh().sqrt();
    let g = g_quadratic(sigma, c, n);
    let th = sigma.tanh();
    [-g / (chi + chi.recip()), 0.5 * c * sigma * sigma * th * th]
}

/// Zero-range amplitudes for the connection matrix `[[χ, 0], [g, 1/χ]]`.
pub fn resonant_scattering(chi: f64, g: f64, k: f64) -> Result<ScatteringAmplitudes> {
    if finite("chi", chi)? == 0.0 {
        return Err(Error::invalid("chi", "must be non-zero"));
    }
    finite("g", g)?;
    positive("k", k)?;
    let inv = chi.recip();
    let denom = Complex64::new(inv + chi, g / k);
    Ok(ScatteringAmplitudes {
        r: Complex64::new(inv - chi, -g / k) / denom,
        t: 2.0 / denom,
    })
}

/// Decay constant of the bound state `e^{-κ|x|}`-type solution, if any.
pub fn bound_state_kappa(chi: f64, g: f64) -> Result<Option<f64>> {
    if finite("chi", chi)? == 0.0 {
        return Err(Error::invalid("chi", "must be non-zero"));
    }
    finite("g", g)?;
    let kappa = -g / (chi + chi.recip());
    Ok((kappa > 0.0).then_some(kappa))
}

fn build(n: usize, sigma: f64, chi: f64, g: f64, path: SqueezePath) -> Result<Resonance> {
    let kappa = if g != 0.0 {
        bound_state_kappa(chi, g)?.unwrap_or(0.0)
    } else {
        0.0
    };
    Ok(Resonance {
        n,
        sigma,
        lambda: sigma * sigma,
        chi,
        g,
        kappa,
        path,
    })
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        Err(Error::invalid("count", "must be >= 1"))
    } else {
        Ok(())
    }
}

/// First `count` resonances of `tanh σ = tan σ`.
pub fn solve_adjacent(count: usize) -> Result<Vec<Resonance>> {
    check_count(count)?;
    (1..=count)
        .map(|n| {
            let sigma = adjacent_root(n)?;
            build(n, sigma, chi_adjacent(sigma)?, 0.0, SqueezePath::Adjacent)
        })
        .collect()
}

/// First `count` resonances along `rho = c l`. At `c = 0` these are the
/// adjacent resonances.
pub fn solve_linear(c: f64, count: usize) -> Result<Vec<Resonance>> {
    check_count(count)?;
    if finite("c", c)? < 0.0 {
        return Err(Error::invalid("c", format!("must be >= 0, got {c}")));
    }
    if c == 0.0 {
        return solve_adjacent(count);
    }
    let path = ResonanceFamily::Linear { c }.path();
    (1..=count)
        .map(|n| {
            let sigma = linear_root(n, c)?;
            build(n, sigma, chi_linear(sigma, c)?, 0.0, path)
        })
        .collect()
}

/// First `count` resonances along `rho = c l²`, with their bound states.
pub fn solve_quadratic(c: f64, count: usize) -> Result<Vec<Resonance>> {
    check_count(count)?;
    if finite("c", c)? < 0.0 {
        return Err(Error::invalid("c", format!("must be >= 0, got {c}")));
    }
    let path = ResonanceFamily::Quadratic { c }.path();
    (1..=count)
        .map(|n| {
            let sigma = adjacent_root(n)?;
            build(
                n,
                sigma,
                chi_adjacent(sigma)?,
                g_quadratic(sigma, c, n),
                path,
            )
        })
        .collect()
}

pub fn solve(family: ResonanceFamily, count: usize) -> Result<Vec<Resonance>> {
    match family {
        ResonanceFamily::Adjacent => solve_adjacent(count),
        ResonanceFamily::Linear { c } => solve_linear(c, count),
        ResonanceFamily::Quadratic { c } => solve_quadratic(c, count),
    }
}

/// The `n`-th resonance of a family.
pub fn nth(family: ResonanceFamily, n: usize) -> Result<Resonance> {
    family.validate()?;
    if n == 0 {
        return Err(Error::invalid("n", "resonances are indexed from 1"));
    }
    match family {
        ResonanceFamily::Adjacent => {
            let sigma = adjacent_root(n)?;
            build(n, sigma, chi_adjacent(sigma)?, 0.0, family.path())
        }
        ResonanceFamily::Linear { c: 0.0 } => nth(ResonanceFamily::Adjacent, n),
        ResonanceFamily::Linear { c } => {
            let sigma = linear_root(n, c)?;
            build(n, sigma, chi_linear(sigma, c)?, 0.0, family.path())
        }
        ResonanceFamily::Quadratic { c } => {
            let sigma = adjacent_root(n)?;
            build(
                n,
                sigma,
                chi_adjacent(sigma)?,
                g_quadratic(sigma, c, n),
                family.path(),
            )
        }
    }
}
