//! Construction of distributed initial states and profile moment analysis.
//!
//! A distributed state assigns each vertex a real non-negative amplitude
//! taken from a distribution function of the wrapped offset from the center
//! vertex, then renormalizes over the discrete support. Six families are
//! supported: a one-vertex delta plus gaussian, logistic, gumbel,
//! lorentz-like, and truncated uniform profiles, all parameterized by the
//! target standard deviation `sigma0` in vertex units.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::WalkState;

/// Logistic shape constant; `|f|^2 = (α/σ₀) sech²(2αk/σ₀)` has std dev `σ₀`.
const LOGISTIC_ALPHA: f64 = 0.453_449_841_045_341_4; // π/(4√3)
/// Gumbel scale constant; `|f|^2 = (β/σ₀) e^{-βk/σ₀ - e^{-βk/σ₀}}` has std dev `σ₀`.
const GUMBEL_BETA: f64 = 1.282_549_830_161_864_3; // π/√6
                                                  // The lorentz-like density `|f|^2 = (6√2/π) σ₀⁵/(k⁶ + 8σ₀⁶)` carries its own
                                                  // normalization constant in continuous form; the discrete renormalization
                                                  // below absorbs it, so only the shape enters the amplitude.

/// Distribution family of an initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Delta,
    Gaussian,
    Logistic,
    Gumbel,
    Lorentz,
    Uniform,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Delta,
        Family::Gaussian,
        Family::Logistic,
        Family::Gumbel,
        Family::Lorentz,
        Family::Uniform,
    ];

    /// CLI-facing name.
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Delta => "delta",
            Family::Gaussian => "gaussian",
            Family::Logistic => "logistic",
            Family::Gumbel => "gumbel",
            Family::Lorentz => "lorentz",
            Family::Uniform => "uniform",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "delta" => Ok(Family::Delta),
            "gaussian" => Ok(Family::Gaussian),
            "logistic" => Ok(Family::Logistic),
            "gumbel" => Ok(Family::Gumbel),
            "lorentz" => Ok(Family::Lorentz),
            "uniform" => Ok(Family::Uniform),
            other => Err(Error::InvalidInput(format!(
                "unknown distribution family '{other}' (expected delta, gaussian, logistic, gumbel, lorentz, or uniform)"
            ))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Validated recipe for one distributed initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    n: usize,
    center: usize,
    sigma0: f64,
    narrow_warning: bool,
}

impl DistributionSpec {
    /// Validate a family/size/center/width combination.
    ///
    /// `sigma0` is ignored for the delta family. For the others the graph
    /// should satisfy `n >= 10 sigma0`; a narrower graph is accepted but
    /// flagged via [`DistributionSpec::narrow_graph_warning`].
    pub fn new(family: Family, n: usize, center: usize, sigma0: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!("cycle needs n >= 3, got {n}")));
        }
        if center >= n {
            return Err(Error::InvalidInput(format!(
                "center {center} out of range for n = {n}"
            )));
        }
        if family != Family::Delta && (!sigma0.is_finite() || sigma0 <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "sigma0 must be positive for the {family} family, got {sigma0}"
            )));
        }
        let narrow_warning = family != Family::Delta && (n as f64) < 10.0 * sigma0;
        Ok(Self {
            family,
            n,
            center,
            sigma0,
            narrow_warning,
        })
    }

    /// One-vertex state recipe.
    pub fn delta(n: usize, center: usize) -> Result<Self> {
        Self::new(Family::Delta, n, center, 0.0)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// True when `n < 10 sigma0`, i.e. the construction's localization
    /// assumption is marginal on this graph.
    pub fn narrow_graph_warning(&self) -> bool {
        self.narrow_warning
    }

    /// Integer half-width used by the uniform family: the rounded solution
    /// of `sigma0^2 = (a^2 + a)/3`. `None` for other families.
    pub fn uniform_half_width(&self) -> Option<i64> {
        (self.family == Family::Uniform).then(|| uniform_half_width(self.sigma0))
    }
}

fn uniform_half_width(sigma0: f64) -> i64 {
    ((-1.0 + (1.0 + 12.0 * sigma0 * sigma0).sqrt()) / 2.0).round() as i64
}

/// Offset of vertex `k` from `center`, wrapped into `(-n/2, n/2]`.
fn wrapped_offset(n: usize, center: usize, k: usize) -> f64 {
    let d = (k + n - center) % n;
    if 2 * d > n {
        d as f64 - n as f64
    } else {
        d as f64
    }
}

/// Unnormalized amplitude of `family` at offset `d` (square root of the
/// printed density; phases are carried by evolution, so amplitudes are real
/// and non-negative).
fn amplitude_shape(family: Family, sigma0: f64, d: f64) -> f64 {
    match family {
        Family::Delta => unreachable!("delta handled separately"),
        Family::Gaussian => (-(d / (2.0 * sigma0)).powi(2)).exp(),
        Family::Logistic => 1.0 / (2.0 * LOGISTIC_ALPHA * d / sigma0).cosh(),
        Family::Gumbel => {
            let z = GUMBEL_BETA * d / sigma0;
            (-(z + (-z).exp()) / 2.0).exp()
        }
        Family::Lorentz => (sigma0.powi(5) / (d.powi(6) + 8.0 * sigma0.powi(6))).sqrt(),
        Family::Uniform => {
            if d.abs() <= uniform_half_width(sigma0) as f64 {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Build the normalized state described by `spec`.
///
/// Amplitudes are `f((k - center) wrapped to (-n/2, n/2])` renormalized
/// numerically over the `n` vertices; the delta family returns the
/// one-vertex state.
pub fn make_state(spec: &DistributionSpec) -> WalkState {
    let n = spec.n;
    if spec.family == Family::Delta {
        return WalkState::delta(n, spec.center).expect("validated spec");
    }
    let mut amps: Vec<f64> = (0..n)
        .map(|k| amplitude_shape(spec.family, spec.sigma0, wrapped_offset(n, spec.center, k)))
        .collect();
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    WalkState::from_parts(
        amps.into_iter().map(|a| Complex64::new(a, 0.0)).collect(),
        0.0,
    )
}

/// Unwrapped moments of a probability profile concentrated on an arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileMoments {
    /// Circular mean position, in vertex units mod n.
    pub mean_vertex: f64,
    /// Standard deviation of the unwrapped offsets.
    pub std_dev: f64,
    /// Third standardized moment (0 for a point mass).
    pub skewness: f64,
    /// Fourth standardized moment (0 for a point mass).
    pub kurtosis: f64,
}

/// Fraction of probability that must sit on the half-cycle arc around the
/// circular mean for moments to be meaningful.
pub const LOCALIZATION_THRESHOLD: f64 = 0.99;

/// Moments of `state`'s probability profile after unwrapping vertices
/// relative to the circular mean.
///
/// Errors with [`Error::NotLocalized`] when less than
/// [`LOCALIZATION_THRESHOLD`] of the mass lies on the half-cycle arc
/// centered at the circular mean.
pub fn profile_moments(state: &WalkState) -> Result<ProfileMoments> {
    let profile = state.probability_profile();
    moments_of_profile(&profile)
}

pub(crate) fn moments_of_profile(profile: &[f64]) -> Result<ProfileMoments> {
    let n = profile.len();
    let nf = n as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    for (k, p) in profile.iter().enumerate() {
        let theta = 2.0 * PI * k as f64 / nf;
        re += p * theta.cos();
        im += p * theta.sin();
    }
    if (re * re + im * im).sqrt() < 1e-12 {
        return Err(Error::NotLocalized(
            "profile has no circular mean direction".into(),
        ));
    }
    let mut center = im.atan2(re) / (2.0 * PI) * nf;
    if center < 0.0 {
        center += nf;
    }

    // Unwrap offsets relative to the circular mean and check concentration
    // on the half-cycle arc.
    let mut mass_on_arc = 0.0;
    let mut m1 = 0.0;
    let mut offsets = Vec::with_capacity(n);
    for (k, p) in profile.iter().enumerate() {
        let mut d = k as f64 - center;
        d -= nf * (d / nf).round();
        offsets.push(d);
        if d.abs() <= nf / 4.0 {
            mass_on_arc += p;
        }
        m1 += p * d;
    }
    if mass_on_arc < LOCALIZATION_THRESHOLD {
        return Err(Error::NotLocalized(format!(
            "only {mass_on_arc:.6} of the probability lies on the half-cycle arc (need {LOCALIZATION_THRESHOLD})"
        )));
    }

    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for (d, p) in offsets.iter().zip(profile) {
        let c = d - m1;
        let c2 = c * c;
        m2 += p * c2;
        m3 += p * c2 * c;
        m4 += p * c2 * c2;
    }
    let std_dev = m2.sqrt();
    let (skewness, kurtosis) = if std_dev > 1e-9 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2))
    } else {
        (0.0, 0.0)
    };
    let mean_vertex = (center + m1).rem_euclid(nf);
    Ok(ProfileMoments {
        mean_vertex,
        std_dev,
        skewness,
        kurtosis,
    })
}
