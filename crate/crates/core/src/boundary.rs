//! Point-interaction connection matrices.
//!
//! A connection matrix `e^{iθ} Λ` with real unimodular `Λ` links
//! `(ψ(+0), ψ'(+0))` to `(ψ(−0), ψ'(−0))`. Only `θ = 0` matrices are
//! analysed; the phase is stored so the whole family can be represented.

use std::f64::consts::PI;

use crate::ddouble::Dd;
use crate::error::{finite, Error, Result};
use crate::transfer::{scattering, ScatteringAmplitudes, TransferMatrix};

/// Largest accepted `|det Λ − 1|`.
pub const DET_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionMatrix {
    theta: f64,
    m: [[f64; 2]; 2],
}

impl ConnectionMatrix {
    /// `θ ∈ [0, π)` and a real matrix with unit determinant.
    pub fn new(theta: f64, m: [[f64; 2]; 2]) -> Result<Self> {
        if !(0.0..PI).contains(&finite("theta", theta)?) {
            return Err(Error::invalid(
                "theta",
                format!("must lie in [0, π), got {theta}"),
            ));
        }
        for v in m.iter().flatten() {
            finite("entry", *v)?;
        }
        let cm = ConnectionMatrix { theta, m };
        let residual = (cm.det() - 1.0).abs();
        if residual.is_nan() || residual > DET_TOLERANCE {
            return Err(Error::InvariantViolation {
                what: "unit determinant of a connection matrix",
                residual,
            });
        }
        Ok(cm)
    }

    pub fn real(m: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(0.0, m)
    }

    pub fn identity() -> Self {
        ConnectionMatrix {
            theta: 0.0,
            m: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.m
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i - 1][j - 1]
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn is_real(&self) -> bool {
        self.theta == 0.0
    }

    /// Inverse of the real part; the phase flips to `−θ` modulo `π`.
    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        let theta = if self.theta == 0.0 {
            0.0
        } else {
            PI - self.theta
        };
        ConnectionMatrix {
            theta,
            m: [[d, -b], [-c, a]],
        }
    }

    fn require_real(&self) -> Result<()> {
        if self.is_real() {
            Ok(())
        } else {
            Err(Error::Unsupported(
                "connection matrices with a non-zero phase",
            ))
        }
    }
}

/// Weights of the generalized product `δ'(x)ψ(x)` for discontinuous `ψ`.
///
/// Stored in double-double: near the resonances `1 − αλ` is a tiny
/// difference and the matrix entries inherit its relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductParams {
    alpha: Dd,
    beta: Dd,
}

impl ProductParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Ok(ProductParams {
            alpha: Dd::from_f64(finite("alpha", alpha)?),
            beta: Dd::from_f64(finite("beta", beta)?),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.to_f64()
    }

    pub fn beta(&self) -> f64 {
        self.beta.to_f64()
    }

    pub fn alpha_dd(&self) -> Dd {
        self.alpha
    }

    pub fn beta_dd(&self) -> Dd {
        self.beta
    }
}

/// One-sided limits of `ψ` and `ψ'` at the interaction point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub psi_minus: f64,
    pub psi_plus: f64,
    pub dpsi_minus: f64,
    pub dpsi_plus: f64,
}

impl BoundaryData {
    /// Right-hand limits produced by `cm` from the left-hand ones.
    pub fn from_left(cm: &ConnectionMatrix, psi_minus: f64, dpsi_minus: f64) -> Result<Self> {
        cm.require_real()?;
        let [[a, b], [c, d]] = cm.m;
        Ok(BoundaryData {
            psi_minus,
            dpsi_minus,
            psi_plus: a * psi_minus + b * dpsi_minus,
            dpsi_plus: c * psi_minus + d * dpsi_minus,
        })
    }

    /// Largest deviation from `(ψ+, ψ'+) = Λ (ψ−, ψ'−)`, relative to the data scale.
    pub fn residual(&self, cm: &ConnectionMatrix) -> Result<f64> {
        let expected = BoundaryData::from_left(cm, self.psi_minus, self.dpsi_minus)?;
        let scale = [
            self.psi_plus,
            self.dpsi_plus,
            expected.psi_plus,
            expected.dpsi_plus,
        ]
        .iter()
        .fold(1.0f64, |m, v| m.max(v.abs()));
        Ok((self.psi_plus - expected.psi_plus)
            .abs()
            .max((self.dpsi_plus - expected.dpsi_plus).abs())
            / scale)
    }

    /// `(ψ(±0), ψ'(±0)) → (χ ψ(∓0), χ⁻¹ ψ'(∓0))`.
    pub fn mirrored(&self, chi: f64) -> Self {
        BoundaryData {
            psi_minus: chi * self.psi_plus,
            psi_plus: chi * self.psi_minus,
            dpsi_minus: self.dpsi_plus / chi,
            dpsi_plus: self.dpsi_minus / chi,
        }
    }
}

/// `[[χ, 0], [g, 1/χ]]`.
pub fn resonant_matrix(chi: f64, g: f64) -> Result<ConnectionMatrix> {
    if finite("chi", chi)? == 0.0 {
        return Err(Error::invalid("chi", "must be non-zero"));
    }
    ConnectionMatrix::real([[chi, 0.0], [finite("g", g)?, chi.recip()]])
}

fn seba_factor(lambda: f64) -> Result<f64> {
    finite("lambda", lambda)?;
    if lambda == 2.0 {
        return Err(Error::SingularParameter {
            condition: "lambda = 2 (2 - lambda = 0)",
        });
    }
    if lambda == -2.0 {
        return Err(Error::SingularParameter {
            condition: "lambda = -2 (2 + lambda = 0)",
        });
    }
    Ok((2.0 + lambda) / (2.0 - lambda))
}

/// `diag(A, 1/A)` with `A = (2 + λ)/(2 − λ)`.
pub fn seba_matrix(lambda: f64) -> Result<ConnectionMatrix> {
    let a = seba_factor(lambda)?;
    ConnectionMatrix::real([[a, 0.0], [0.0, (2.0 - lambda) / (2.0 + lambda)]])
}

/// Šeba diagonal with lower-left `γ/(1 − λ²/4)`.
pub fn delta_prime_delta_matrix(gamma: f64, lambda: f64) -> Result<ConnectionMatrix> {
    let a = seba_factor(lambda)?;
    let c = finite("gamma", gamma)? / (1.0 - lambda * lambda / 4.0);
    ConnectionMatrix::real([[a, 0.0], [c, (2.0 - lambda) / (2.0 + lambda)]])
}

/// Matrix of the boundary conditions induced by the `(α, β)` product:
/// diagonal `A = [1 + (1−α)λ]/(1 − αλ)`, lower-left
/// `B = βλ²/{(1 − αλ)[1 + (1−α)λ]}`.
pub fn bc_from_product(params: ProductParams, lambda: f64) -> Result<ConnectionMatrix> {
    finite("lambda", lambda)?;
    let (alpha, beta) = (params.alpha, params.beta);
    let minus = Dd::ONE - alpha * lambda;
    let plus = Dd::ONE + (Dd::ONE - alpha) * lambda;
    if minus.is_zero() {
        return Err(Error::SingularParameter {
            condition: "1 - alpha*lambda = 0",
        });
    }
    if plus.is_zero() {
        return Err(Error::SingularParameter {
            condition: "1 + (1 - alpha)*lambda = 0",
        });
    }
    let a = plus / minus;
    let a_inv = minus / plus;
    let b = beta * lambda * lambda / (minus * plus);
    ConnectionMatrix::real([[a.to_f64(), 0.0], [b.to_f64(), a_inv.to_f64()]])
}

/// `α = 1/λ + 1/(1 − χ)`, `β = χ g/(1 − χ)²`: the weights for which
/// `bc_from_product` reproduces the resonant matrix `(χ, g)`.
pub fn params_from_resonance(lambda: f64, chi: f64, g: f64) -> Result<ProductParams> {
    if finite("lambda", lambda)? == 0.0 {
        return Err(Error::SingularParameter {
            condition: "lambda = 0",
        });
    }
    if finite("chi", chi)? == 1.0 {
        return Err(Error::SingularParameter {
            condition: "chi = 1 (1 - chi = 0)",
        });
    }
    finite("g", g)?;
    let one_minus = Dd::ONE - chi;
    let alpha = Dd::from_f64(lambda).recip() + one_minus.recip();
    let beta = Dd::from_f64(chi) * g / one_minus.sqr();
    Ok(ProductParams { alpha, beta })
}

/// Worst relative mismatch between `bc_from_product(params, λ)` and `(χ, g)`.
pub fn round_trip_residual(params: ProductParams, lambda: f64, chi: f64, g: f64) -> Result<f64> {
    let cm = bc_from_product(params, lambda)?;
    let target = resonant_matrix(chi, g)?;
    let mut worst = 0.0f64;
    for (x, y) in cm.m.iter().flatten().zip(target.m.iter().flatten()) {
        let scale = x.abs().max(y.abs());
        if scale > 0.0 {
            worst = worst.max((x - y).abs() / scale);
        }
    }
    Ok(worst)
}

/// Amplitudes of a zero-range interaction (`x0 = 0`).
pub fn scattering_from_matrix(cm: &ConnectionMatrix, k: f64) -> Result<ScatteringAmplitudes> {
    cm.require_real()?;
    scattering(&TransferMatrix::from_entries(cm.m, 0.0), k)
}

/// Decay constants `κ > 0` of states `e^{κx}` (left) and `e^{−κx}` (right)
/// admitted by `cm`: positive roots of `λ12 κ² + (λ11 + λ22) κ + λ21 = 0`,
/// ascending. Bound-state energies are `−κ²`.
pub fn bound_state(cm: &ConnectionMatrix) -> Result<Vec<f64>> {
    cm.require_real()?;
    let [[l11, l12], [l21, l22]] = cm.m;
    let (a, b, c) = (l12, l11 + l22, l21);
    let mut roots = if a == 0.0 {
        if b == 0.0 {
            vec![]
        } else {
            vec![-c / b]
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            vec![]
        } else {
            // cancellation-free pair
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            if q == 0.0 {
                vec![0.0]
            } else {
                vec![q / a, c / q]
            }
        }
    };
    roots.retain(|k| *k > 0.0 && k.is_finite());
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    Ok(roots)
}
