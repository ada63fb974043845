//! Squeeze paths, numerical limit traces and their classification.
//!
//! A path fixes how the separation `rho` shrinks with the width `l`. Tracing
//! the transfer matrix on a geometric `l` grid and fitting log-log slopes tells
//! divergent entries from convergent ones; convergent entries are extrapolated
//! to `l = 0` with Richardson's scheme.

use std::fmt;
use std::str::FromStr;

use crate::boundary::{resonant_matrix, ConnectionMatrix};
use crate::error::{finite, positive, Error, Result};
use crate::profile::RectProfile;
use crate::resonance::{
    adjacent_root, chi_adjacent, chi_linear, g_quadratic, linear_root, resonance_index,
};
use crate::transfer::{scattering, transfer_matrix, TransferMatrix};

/// Smallest width at which traces and sweeps are trusted.
pub const PRECISION_FLOOR: f64 = 1e-6;
/// Fewest points in a trace.
pub const MIN_TRACE_POINTS: usize = 8;
/// Relative distance within which a coupling counts as a resonance.
pub const ROOT_MATCH: f64 = 1e-9;
/// Largest accepted `|det − 1|` on a traced row.
pub const DET_TOLERANCE: f64 = 1e-10;
/// Largest accepted `| |R|² + |T|² − 1 |` on a sweep sample.
pub const CONSERVATION_TOLERANCE: f64 = 1e-10;

/// How `rho` follows `l` as both shrink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SqueezePath {
    /// `l → 0` at fixed `rho`.
    BarrierFirst { rho: f64 },
    /// `rho = 0`.
    Adjacent,
    /// `rho = c l^tau`.
    PowerLaw { c: f64, tau: f64 },
}

impl SqueezePath {
    pub fn rho_at(&self, l: f64) -> f64 {
        match *self {
            SqueezePath::BarrierFirst { rho } => rho,
            SqueezePath::Adjacent => 0.0,
            SqueezePath::PowerLaw { c, tau } => c * l.powf(tau),
        }
    }

    /// `PowerLaw` with `c = 0` becomes `Adjacent`.
    pub fn normalized(self) -> Self {
        match self {
            SqueezePath::PowerLaw { c: 0.0, .. } => SqueezePath::Adjacent,
            other => other,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SqueezePath::BarrierFirst { rho } => positive("rho", rho).map(drop),
            SqueezePath::Adjacent => Ok(()),
            SqueezePath::PowerLaw { c, tau } => {
                if finite("c", c)? < 0.0 {
                    return Err(Error::invalid("c", format!("must be >= 0, got {c}")));
                }
                positive("tau", tau).map(drop)
            }
        }
    }
}

impl fmt::Display for SqueezePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SqueezePath::BarrierFirst { rho } => write!(f, "barrier-first:{rho}"),
            SqueezePath::Adjacent => write!(f, "adjacent"),
            SqueezePath::PowerLaw { c, tau } => write!(f, "power:{c}:{tau}"),
        }
    }
}

impl FromStr for SqueezePath {
    type Err = Error;

    /// `adjacent`, `barrier-first:RHO`, `power:C:TAU`, `linear[:C]`,
    /// `quadratic[:C]`; `C` defaults to 1.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::invalid("path", format!("bad number `{v}` in `{s}`")))
        };
        let path = match parts.as_slice() {
            ["adjacent"] => SqueezePath::Adjacent,
            ["barrier-first", rho] => SqueezePath::BarrierFirst { rho: num(rho)? },
            ["power", c, tau] => SqueezePath::PowerLaw {
                c: num(c)?,
                tau: num(tau)?,
            },
            ["linear"] => SqueezePath::PowerLaw { c: 1.0, tau: 1.0 },
            ["linear", c] => SqueezePath::PowerLaw {
                c: num(c)?,
                tau: 1.0,
            },
            ["quadratic"] => SqueezePath::PowerLaw { c: 1.0, tau: 2.0 },
            ["quadratic", c] => SqueezePath::PowerLaw {
                c: num(c)?,
                tau: 2.0,
            },
            _ => {
                return Err(Error::invalid(
                    "path",
                    format!(
                        "expected adjacent, barrier-first:RHO, power:C:TAU, linear[:C] or quadratic[:C], got `{s}`"
                    ),
                ))
            }
        };
        path.validate()?;
        Ok(path.normalized())
    }
}

/// Tunables for tracing and classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitConfig {
    pub precision_floor: f64,
    /// An entry diverges when its log-log slope is below `-divergence_slope`.
    pub divergence_slope: f64,
    /// Tails entirely below this magnitude converge to zero regardless of slope.
    pub zero_magnitude: f64,
    /// Points fed to the Richardson table.
    pub extrapolation_points: usize,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig {
            precision_floor: PRECISION_FLOOR,
            divergence_slope: 0.25,
            zero_magnitude: 1e-6,
            extrapolation_points: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub l: f64,
    pub rho: f64,
    pub matrix: TransferMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitTrace {
    pub path: SqueezePath,
    pub lambda: f64,
    pub energy: f64,
    pub rows: Vec<TraceRow>,
}

impl LimitTrace {
    pub fn l_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.l).collect()
    }

    /// Column of entry `(i, j)`, 1-based.
    pub fn column(&self, i: usize, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.matrix.get(i, j)).collect()
    }
}

/// `points` values from `start` down to `end`, evenly spaced in `ln l`.
pub fn geometric_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    let ratio = end / start;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                end
            } else {
                start * ratio.powf(i as f64 / (points - 1) as f64)
            }
        })
        .collect()
}

pub fn trace(
    path: SqueezePath,
    lambda: f64,
    energy: f64,
    l_start: f64,
    l_end: f64,
    points: usize,
) -> Result<LimitTrace> {
    trace_with(
        path,
        lambda,
        energy,
        l_start,
        l_end,
        points,
        &LimitConfig::default(),
    )
}

/// Transfer matrices along `path` on a geometric grid from `l_start` to `l_end`.
///
/// `lambda = 0` is accepted and traces free propagation.
pub fn trace_with(
    path: SqueezePath,
    lambda: f64,
    energy: f64,
    l_start: f64,
    l_end: f64,
    points: usize,
    config: &LimitConfig,
) -> Result<LimitTrace> {
    path.validate()?;
    if finite("lambda", lambda)? < 0.0 {
        return Err(Error::invalid(
            "lambda",
            format!("must be >= 0, got {lambda}"),
        ));
    }
    positive("E", energy)?;
    positive("l_end", l_end)?;
    if finite("l_start", l_start)? <= l_end {
        return Err(Error::invalid(
            "l_start",
            format!("must exceed l_end = {l_end}, got {l_start}"),
        ));
    }
    if l_end < config.precision_floor {
        return Err(Error::BelowPrecisionFloor {
            l: l_end,
            floor: config.precision_floor,
        });
    }
    if points < MIN_TRACE_POINTS {
        return Err(Error::invalid(
            "points",
            format!("must be >= {MIN_TRACE_POINTS}, got {points}"),
        ));
    }

    let rows = geometric_grid(l_start, l_end, points)
        .into_iter()
        .map(|l| {
            let rho = path.rho_at(l);
            let matrix = transfer_matrix(&RectProfile::new(l, rho, lambda)?, energy)?;
            let residual = matrix.det_residual();
            if residual.is_nan() || residual > DET_TOLERANCE {
                return Err(Error::InvariantViolation {
                    what: "det = 1 on a traced row",
                    residual,
                });
            }
            Ok(TraceRow { l, rho, matrix })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitTrace {
        path,
        lambda,
        energy,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntryVerdict {
    /// `|Λ| ~ l^slope` with `slope < 0`.
    Divergent {
        slope: f64,
    },
    Converges {
        value: f64,
        error: f64,
    },
}

impl EntryVerdict {
    pub fn is_divergent(&self) -> bool {
        matches!(self, EntryVerdict::Divergent { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            EntryVerdict::Converges { value, .. } => Some(value),
            EntryVerdict::Divergent { .. } => None,
        }
    }
}

/// Per-entry classification in the order `Λ11, Λ12, Λ21, Λ22`, with the
/// fitted tail slopes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitVerdict {
    pub entries: [EntryVerdict; 4],
    pub slopes: [f64; 4],
}

impl LimitVerdict {
    /// Entry `(i, j)`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> EntryVerdict {
        self.entries[2 * (i - 1) + (j - 1)]
    }

    pub fn all_converge(&self) -> bool {
        self.entries.iter().all(|e| !e.is_divergent())
    }

    /// The halves decouple: `Λ21` blows up.
    pub fn is_separated(&self) -> bool {
        self.entry(2, 1).is_divergent()
    }

    pub fn agrees_with(&self, prediction: &Prediction) -> bool {
        match prediction {
            Prediction::Separated => self.is_separated(),
            Prediction::Connection { .. } => self.all_converge(),
        }
    }
}

pub fn classify(trace: &LimitTrace) -> Result<LimitVerdict> {
    classify_with(trace, &LimitConfig::default())
}

pub fn classify_with(trace: &LimitTrace, config: &LimitConfig) -> Result<LimitVerdict> {
    let n = trace.rows.len();
    if n < MIN_TRACE_POINTS {
        return Err(Error::invalid(
            "trace",
            format!("needs >= {MIN_TRACE_POINTS} points, got {n}"),
        ));
    }
    let tail = &trace.rows[n / 2..];
    let ls: Vec<f64> = tail.iter().map(|r| r.l).collect();
    let mut entries = [EntryVerdict::Converges {
        value: 0.0,
        error: 0.0,
    }; 4];
    let mut slopes = [0.0; 4];
    for idx in 0..4 {
        let vs: Vec<f64> = tail.iter().map(|r| r.matrix.flat()[idx]).collect();
        let (verdict, slope) = classify_entry(&ls, &vs, config);
        entries[idx] = verdict;
        slopes[idx] = slope;
    }
    Ok(LimitVerdict { entries, slopes })
}

fn classify_entry(ls: &[f64], vs: &[f64], config: &LimitConfig) -> (EntryVerdict, f64) {
    let (xs, ys): (Vec<f64>, Vec<f64>) = ls
        .iter()
        .zip(vs)
        .filter(|(_, v)| **v != 0.0)
        .map(|(l, v)| (l.ln(), v.abs().ln()))
        .unzip();
    let slope = least_squares_slope(&xs, &ys).unwrap_or(0.0);
    let negligible = vs.iter().all(|v| v.abs() < config.zero_magnitude);
    if !negligible && slope < -config.divergence_slope {
        return (EntryVerdict::Divergent { slope }, slope);
    }
    let m = config.extrapolation_points.clamp(2, vs.len());
    let (value, error) = richardson(&ls[ls.len() - m..], &vs[vs.len() - m..]);
    (EntryVerdict::Converges { value, error }, slope)
}

/// Least-squares slope of `ys` against `xs`; `None` for fewer than two points.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Limit at `l = 0` of values sampled on a decreasing geometric grid,
/// assuming an error expansion in integer powers of `l`. Returns the last
/// diagonal extrapolant and its distance from the previous one.
pub fn richardson(ls: &[f64], vs: &[f64]) -> (f64, f64) {
    match vs.len() {
        0 => return (f64::NAN, f64::INFINITY),
        1 => return (vs[0], f64::INFINITY),
        _ => {}
    }
    let mut table = vs.to_vec();
    let mut prev_diag = vs[vs.len() - 2];
    let mut diag = vs[vs.len() - 1];
    for order in 1..vs.len() {
        // table[i] covers samples i..i + order - 1; its leading error term
        // scales as l^order
        let next: Vec<f64> = (0..table.len() - 1)
            .map(|i| {
                let r = (ls[i + order - 1] / ls[i + order]).powi(order as i32);
                table[i + 1] + (table[i + 1] - table[i]) / (r - 1.0)
            })
            .collect();
        prev_diag = diag;
        diag = *next.last().unwrap();
        table = next;
    }
    (diag, (diag - prev_diag).abs())
}

/// Analytic zero-range limit of a squeeze.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prediction {
    /// Opaque wall, no transmission.
    Separated,
    /// Resonant point interaction with connection matrix `[[chi, 0], [g, 1/chi]]`.
    Connection { n: usize, chi: f64, g: f64 },
}

impl Prediction {
    pub fn matrix(&self) -> Option<ConnectionMatrix> {
        match *self {
            Prediction::Connection { chi, g, .. } => resonant_matrix(chi, g).ok(),
            Prediction::Separated => None,
        }
    }
}

fn matching_index(
    lambda: f64,
    root: impl Fn(usize) -> Result<f64>,
) -> Result<Option<(usize, f64)>> {
    let n = resonance_index(lambda.sqrt());
    if n == 0 {
        return Ok(None);
    }
    let sigma = root(n)?;
    let target = sigma * sigma;
    Ok(((lambda - target).abs() <= ROOT_MATCH * target).then_some((n, sigma)))
}

/// Limit predicted by the case analysis of the squeeze paths.
pub fn predict(path: SqueezePath, lambda: f64) -> Result<Prediction> {
    path.validate()?;
    positive("lambda", lambda)?;
    let adjacent_like = |g_of: &dyn Fn(f64, usize) -> f64| -> Result<Prediction> {
        Ok(match matching_index(lambda, adjacent_root)? {
            Some((n, sigma)) => Prediction::Connection {
                n,
                chi: chi_adjacent(sigma)?,
                g: g_of(sigma, n),
            },
            None => Prediction::Separated,
        })
    };
    match path.normalized() {
        SqueezePath::BarrierFirst { .. } => Ok(Prediction::Separated),
        SqueezePath::Adjacent => adjacent_like(&|_, _| 0.0),
        SqueezePath::PowerLaw { c, tau } => {
            if tau == 1.0 {
                Ok(match matching_index(lambda, |n| linear_root(n, c))? {
                    Some((n, sigma)) => Prediction::Connection {
                        n,
                        chi: chi_linear(sigma, c)?,
                        g: 0.0,
                    },
                    None => Prediction::Separated,
                })
            } else if tau == 2.0 {
                adjacent_like(&|sigma, n| g_quadratic(sigma, c, n))
            } else if tau > 2.0 {
                adjacent_like(&|_, _| 0.0)
            } else {
                Ok(Prediction::Separated)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub lambda: f64,
    pub t2: f64,
    pub r2: f64,
}

/// A local transmission maximum refined by a parabola through its neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub lambda: f64,
    pub t2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub path: SqueezePath,
    pub l: f64,
    pub energy: f64,
    pub points: Vec<SweepPoint>,
    pub peaks: Vec<Peak>,
}

/// `|T|²` and `|R|²` on an evenly spaced coupling grid at fixed `l`.
pub fn transmission_sweep(
    path: SqueezePath,
    l: f64,
    lambda_min: f64,
    lambda_max: f64,
    samples: usize,
    energy: f64,
) -> Result<Sweep> {
    path.validate()?;
    positive("E", energy)?;
    if positive("l", l)? < PRECISION_FLOOR {
        return Err(Error::BelowPrecisionFloor {
            l,
            floor: PRECISION_FLOOR,
        });
    }
    if finite("lambda_max", lambda_max)? <= finite("lambda_min", lambda_min)? {
        return Err(Error::invalid(
            "lambda_max",
            format!("must exceed lambda_min = {lambda_min}, got {lambda_max}"),
        ));
    }
    if samples < 2 {
        return Err(Error::invalid(
            "samples",
            format!("must be >= 2, got {samples}"),
        ));
    }
    let rho = path.rho_at(l);
    let k = energy.sqrt();
    let step = (lambda_max - lambda_min) / (samples - 1) as f64;
    let points = (0..samples)
        .map(|i| {
            let lambda = if i + 1 == samples {
                lambda_max
            } else {
                lambda_min + step * i as f64
            };
            let tm = transfer_matrix(&RectProfile::new(l, rho, lambda)?, energy)?;
            let amps = scattering(&tm, k)?;
            let residual = amps.conservation_residual();
            if residual.is_nan() || residual > CONSERVATION_TOLERANCE {
                return Err(Error::InvariantViolation {
                    what: "|R|² + |T|² = 1 on a sweep sample",
                    residual,
                });
            }
            Ok(SweepPoint {
                lambda,
                t2: amps.transmittance(),
                r2: amps.reflectance(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let peaks = find_peaks(&points);
    Ok(Sweep {
        path,
        l,
        energy,
        points,
        peaks,
    })
}

fn find_peaks(points: &[SweepPoint]) -> Vec<Peak> {
    points
        .windows(3)
        .enumerate()
        .filter(|(_, w)| w[1].t2 > w[0].t2 && w[1].t2 > w[2].t2)
        .map(|(i, w)| {
            let (a, b, c) = (w[0].t2, w[1].t2, w[2].t2);
            let h = 0.5 * (w[2].lambda - w[0].lambda);
            let curvature = a - 2.0 * b + c;
            let shift = 0.5 * (a - c) / curvature;
            Peak {
                index: i + 1,
                lambda: w[1].lambda + shift * h,
                t2: b - 0.25 * (a - c) * shift,
            }
        })
        .collect()
}
