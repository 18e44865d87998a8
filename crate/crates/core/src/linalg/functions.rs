//! Scalar function descriptors and their spectral extension to Hermitian matrices.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::eigen::{eig_hermitian, EigenDecomposition};
use super::matrix::HermitianMatrix;
use crate::error::{Error, Result};

/// Relative width of the band below a closed lower bound that is clamped onto it.
pub const SPECTRAL_FLOOR: f64 = 1e-12;

/// A real interval with optional open ends; infinite ends are always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub lo_open: bool,
    #[serde(default)]
    pub hi_open: bool,
}

impl Interval {
    pub const fn all_reals() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_open: true,
            hi_open: true,
        }
    }

    pub const fn nonnegative() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
            lo_open: false,
            hi_open: true,
        }
    }

    pub const fn positive() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open {
            x > self.lo
        } else {
            x >= self.lo
        };
        let below = if self.hi_open {
            x < self.hi
        } else {
            x <= self.hi
        };
        above && below
    }

    /// True when every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lo_ok = self.lo > other.lo || (self.lo == other.lo && (self.lo_open || !other.lo_open));
        let hi_ok = self.hi < other.hi || (self.hi == other.hi && (self.hi_open || !other.hi_open));
        lo_ok && hi_ok
    }

    /// Snaps `x` onto the interval when it misses a closed end by at most `tol`;
    /// open ends must be cleared by more than `tol`.
    pub fn admit(&self, x: f64, tol: f64) -> Option<f64> {
        if !x.is_finite() {
            return None;
        }
        let x = if self.lo_open {
            if x <= self.lo + tol {
                return None;
            }
            x
        } else if x < self.lo {
            if x < self.lo - tol {
                return None;
            }
            self.lo
        } else {
            x
        };
        if self.hi_open {
            if x >= self.hi - tol {
                return None;
            }
            Some(x)
        } else if x > self.hi {
            if x > self.hi + tol {
                return None;
            }
            Some(self.hi)
        } else {
            Some(x)
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// Shape properties of a scalar function over some region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FnProps {
    pub increasing: bool,
    pub convex: bool,
    pub concave: bool,
    /// `f(x) → 0` as `x → −∞`.
    #[serde(default)]
    pub vanishes_at_neg_inf: bool,
}

type Callable = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied scalar function with explicitly declared domain and shape.
#[derive(Clone)]
pub struct CustomFn {
    name: String,
    domain: Interval,
    props: FnProps,
    body: CustomBody,
}

#[derive(Clone)]
enum CustomBody {
    /// Piecewise-linear interpolation through strictly increasing abscissae.
    Tabulated(Vec<(f64, f64)>),
    Callable(Callable),
}

impl CustomFn {
    /// Wraps a host closure. The declared properties are trusted.
    pub fn callable(
        name: impl Into<String>,
        domain: Interval,
        props: FnProps,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            props,
            body: CustomBody::Callable(Arc::new(f)),
        }
    }

    /// Piecewise-linear table; shape properties are read off the data.
    pub fn tabulated(name: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "a table needs at least two points".into(),
            ));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidParameter(
                "table entries must be finite".into(),
            ));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        let slopes: Vec<f64> = points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        let props = FnProps {
            increasing: slopes.iter().all(|&s| s >= 0.0),
            convex: slopes.windows(2).all(|w| w[1] >= w[0]),
            concave: slopes.windows(2).all(|w| w[1] <= w[0]),
            vanishes_at_neg_inf: false,
        };
        let domain = Interval::closed(points[0].0, points[points.len() - 1].0);
        Ok(Self {
            name: name.into(),
            domain,
            props,
            body: CustomBody::Tabulated(points),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, x: f64) -> f64 {
        match &self.body {
            CustomBody::Callable(f) => f(x),
            CustomBody::Tabulated(pts) => {
                let idx = pts.partition_point(|&(px, _)| px <= x);
                if idx == 0 {
                    return pts[0].1;
                }
                if idx == pts.len() {
                    return pts[pts.len() - 1].1;
                }
                let (x0, y0) = pts[idx - 1];
                let (x1, y1) = pts[idx];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("props", &self.props)
            .finish_non_exhaustive()
    }
}

impl PartialEq for CustomFn {
    fn eq(&self, other: &Self) -> bool {
        match (&self.body, &other.body) {
            (CustomBody::Tabulated(a), CustomBody::Tabulated(b)) => {
                a == b && self.name == other.name
            }
            (CustomBody::Callable(a), CustomBody::Callable(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// Scalar function `f` extended to matrices through the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFn {
    Identity,
    /// `x^r`, with `0^0 = 1`.
    Power(f64),
    Exp,
    Log,
    Custom(CustomFn),
}

fn is_integer(r: f64) -> bool {
    r.fract() == 0.0 && r.abs() < 9.0e15
}

impl ScalarFn {
    pub fn power(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power exponent must be finite, got {r}"
            )));
        }
        Ok(Self::Power(r))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Identity => x,
            Self::Power(r) => {
                if *r == 0.0 {
                    1.0
                } else if is_integer(*r) {
                    x.powi(*r as i32)
                } else {
                    x.powf(*r)
                }
            }
            Self::Exp => x.exp(),
            Self::Log => x.ln(),
            Self::Custom(c) => c.eval(x),
        }
    }

    pub fn domain(&self) -> Interval {
        match self {
            Self::Identity | Self::Exp => Interval::all_reals(),
            Self::Power(r) if is_integer(*r) && *r >= 0.0 => Interval::all_reals(),
            Self::Power(r) if *r < 0.0 => Interval::positive(),
            Self::Power(_) => Interval::nonnegative(),
            Self::Log => Interval::positive(),
            Self::Custom(c) => c.domain,
        }
    }

    /// Shape properties on the whole domain.
    pub fn props(&self) -> FnProps {
        self.props_on(&self.domain())
    }

    /// Shape properties restricted to `region ∩ domain`.
    pub fn props_on(&self, region: &Interval) -> FnProps {
        let nonneg_region = region.is_subset_of(&Interval::nonnegative());
        match self {
            Self::Identity => FnProps {
                increasing: true,
                convex: true,
                concave: true,
                vanishes_at_neg_inf: false,
            },
            Self::Exp => FnProps {
                increasing: true,
                convex: true,
                concave: false,
                vanishes_at_neg_inf: true,
            },
            Self::Log => FnProps {
                increasing: true,
                convex: false,
                concave: true,
                vanishes_at_neg_inf: false,
            },
            Self::Power(r) => {
                let r = *r;
                if r == 0.0 {
                    return FnProps {
                        increasing: true,
                        convex: true,
                        concave: true,
                        vanishes_at_neg_inf: false,
                    };
                }
                if r == 1.0 {
                    return Self::Identity.props();
                }
                if nonneg_region || r < 0.0 || !is_integer(r) {
                    FnProps {
                        increasing: r > 0.0,
                        convex: !(0.0..1.0).contains(&r),
                        concave: r > 0.0 && r <= 1.0,
                        vanishes_at_neg_inf: false,
                    }
                } else {
                    // Integer power over a region that reaches negative values.
                    let odd = (r as i64) % 2 != 0;
                    FnProps {
                        increasing: odd,
                        convex: !odd,
                        concave: false,
                        vanishes_at_neg_inf: false,
                    }
                }
            }
            Self::Custom(c) => c.props,
        }
    }

    /// Checks `f(−∞) = 0` by sampling at −10, −20, −40 against the declared flag.
    pub fn validate_vanishes_at_neg_inf(&self) -> Result<()> {
        if !self.props().vanishes_at_neg_inf {
            return Err(Error::Precondition(format!(
                "{} does not declare f(x) -> 0 as x -> -inf",
                self.label()
            )));
        }
        let dom = self.domain();
        let samples: Vec<f64> = [-10.0, -20.0, -40.0]
            .iter()
            .map(|&x| {
                if dom.contains(x) {
                    Ok(self.eval(x))
                } else {
                    Err(Error::Domain(format!("{} undefined at {x}", self.label())))
                }
            })
            .collect::<Result<_>>()?;
        let decaying = samples.windows(2).all(|w| w[1].abs() <= w[0].abs());
        if !decaying || samples[2].abs() > 1e-9 {
            return Err(Error::Precondition(format!(
                "{} declares f(-inf) = 0 but samples are {samples:?}",
                self.label()
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            Self::Identity => "identity".into(),
            Self::Power(r) => format!("pow:{r}"),
            Self::Exp => "exp".into(),
            Self::Log => "log".into(),
            Self::Custom(c) => c.name.clone(),
        }
    }

    /// Parses `identity`, `exp`, `log`, `pow:<r>`, `sqrt`, `square`, or a JSON descriptor.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()));
        }
        match t {
            "identity" | "id" => Ok(Self::Identity),
            "exp" => Ok(Self::Exp),
            "log" => Ok(Self::Log),
            "sqrt" => Ok(Self::Power(0.5)),
            "square" => Ok(Self::Power(2.0)),
            _ => {
                let r = t
                    .strip_prefix("pow:")
                    .ok_or_else(|| Error::Parse(format!("unknown scalar function '{t}'")))?;
                let r: f64 = r
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in '{t}'")))?;
                Self::power(r).map_err(|e| Error::Parse(e.to_string()))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum ScalarFnRepr {
    Identity,
    Power {
        r: f64,
    },
    Exp,
    Log,
    Tabulated {
        name: String,
        points: Vec<(f64, f64)>,
    },
}

impl Serialize for ScalarFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Self::Identity => ScalarFnRepr::Identity,
            Self::Power(r) => ScalarFnRepr::Power { r: *r },
            Self::Exp => ScalarFnRepr::Exp,
            Self::Log => ScalarFnRepr::Log,
            Self::Custom(c) => match &c.body {
                CustomBody::Tabulated(points) => ScalarFnRepr::Tabulated {
                    name: c.name.clone(),
                    points: points.clone(),
                },
                CustomBody::Callable(_) => {
                    return Err(serde::ser::Error::custom(format!(
                        "host callable '{}' cannot be serialized",
                        c.name
                    )))
                }
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScalarFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ScalarFnRepr::deserialize(d)?;
        match repr {
            ScalarFnRepr::Identity => Ok(Self::Identity),
            ScalarFnRepr::Power { r } => Self::power(r).map_err(serde::de::Error::custom),
            ScalarFnRepr::Exp => Ok(Self::Exp),
            ScalarFnRepr::Log => Ok(Self::Log),
            ScalarFnRepr::Tabulated { name, points } => CustomFn::tabulated(name, points)
                .map(Self::Custom)
                .map_err(serde::de::Error::custom),
        }
    }
}

/// Snaps a spectrum onto `domain`, using the relative floor `SPECTRAL_FLOOR * scale`.
pub fn admit_spectrum(
    eigenvalues: &[f64],
    domain: &Interval,
    scale: f64,
    what: &str,
) -> Result<Vec<f64>> {
    let tol = SPECTRAL_FLOOR * scale;
    eigenvalues
        .iter()
        .map(|&x| {
            domain.admit(x, tol).ok_or_else(|| {
                Error::Domain(format!("eigenvalue {x:e} outside {domain} for {what}"))
            })
        })
        .collect()
}

/// `f(A)` from an existing decomposition; `scale` sets the spectral floor (usually `‖A‖_F`).
pub fn apply_to_decomposition(
    eig: &EigenDecomposition,
    scale: f64,
    f: &ScalarFn,
) -> Result<HermitianMatrix> {
    let lam = admit_spectrum(&eig.eigenvalues, &f.domain(), scale, &f.label())?;
    let values: Vec<f64> = lam.iter().map(|&x| f.eval(x)).collect();
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "{} produced non-finite value {bad}",
            f.label()
        )));
    }
    Ok(HermitianMatrix::from_spectral(&eig.vectors, &values))
}

/// `f(A) = Σ f(λ_i) u_i u_i*`.
pub fn matrix_function(a: &HermitianMatrix, f: &ScalarFn) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(a)?;
    apply_to_decomposition(&eig, a.frobenius_norm(), f)
}

/// `A^r` for PSD `A`; `r = 0` gives the identity (`0^0 = 1`).
pub fn fractional_power(a: &HermitianMatrix, r: f64) -> Result<HermitianMatrix> {
    if r == 0.0 {
        return Ok(HermitianMatrix::identity(a.dim()));
    }
    matrix_function(a, &ScalarFn::power(r)?)
}

pub fn matrix_log(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    matrix_function(a, &ScalarFn::Log)
}

pub fn matrix_exp(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    matrix_function(a, &ScalarFn::Exp)
}
