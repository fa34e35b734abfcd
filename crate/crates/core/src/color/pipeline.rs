use serde::{Deserialize, Serialize};

use crate::cover::{
    build_instance, fractional_optimum, greedy_cover, ground_radius, lift_cover, measure_bound,
    saturate, InstanceStats,
};
use crate::error::{check_dim, Error, Result};
use crate::geom::{ConvexBody, Halfspace, Vector};
use crate::lattice::{Lattice, Multilattice};
use crate::tiling::{
    build_ball_multilattice, explicit_tiling, tiling_parameters, voronoi_tiling, PeriodicTiling,
    TilingParameters,
};

use super::bounds::{
    butler_bound_ln_ratio, chromatic_bound, finite_run_bound, incidence_bound, ChromaticBound,
};
use super::{verify_coloring, Coloring, VerificationReport};

/// Largest admissible lower estimate of |Λ|, vol(T)/vol(2ρK).
pub const MAX_GROUND_ESTIMATE: f64 = 200_000.0;

/// Which multilattice and tiling to start from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Construction {
    /// Hexagonal lattice of unit spacing with its Voronoi tiling (n = 2).
    Hexagonal,
    /// Unit square lattice (n = 2).
    Square,
    /// Saturated ball packing on (2ℤ)ⁿ with its Voronoi tiling, n ∈ [2, 4].
    BallGeneric { n: usize },
    /// A given multilattice; cells as halfspace lists, or its Voronoi tiling when absent.
    Explicit {
        lattice_basis: Lattice,
        translates: Vec<Vector>,
        #[serde(default)]
        cells: Option<Vec<Vec<Halfspace>>>,
    },
}

impl Construction {
    pub fn dim(&self) -> usize {
        match self {
            Construction::Hexagonal | Construction::Square => 2,
            Construction::BallGeneric { n } => *n,
            Construction::Explicit { lattice_basis, .. } => lattice_basis.dim(),
        }
    }

    pub fn build(&self) -> Result<PeriodicTiling> {
        match self {
            Construction::Hexagonal => {
                voronoi_tiling(&Multilattice::lattice_only(Lattice::hexagonal(1.0)?))
            }
            Construction::Square => {
                voronoi_tiling(&Multilattice::lattice_only(Lattice::cubic(2, 1.0)?))
            }
            Construction::BallGeneric { n } => Ok(build_ball_multilattice(*n)?.1),
            Construction::Explicit {
                lattice_basis,
                translates,
                cells,
            } => {
                let m = Multilattice::new(lattice_basis.clone(), translates.clone())?;
                match cells {
                    Some(cells) => explicit_tiling(m, cells),
                    None => voronoi_tiling(&m),
                }
            }
        }
    }
}

/// Everything that determines a run. Missing resolutions and δ fall back
/// to per-dimension defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub construction: Construction,
    /// The norm body; the Euclidean unit ball when absent.
    pub body: Option<ConvexBody>,
    pub eta: f64,
    /// Defaults to 1/(2n ln n).
    pub delta: Option<f64>,
    pub sat_res: Option<usize>,
    pub cand_res: Option<usize>,
    pub lift_res: Option<usize>,
    pub pair_samples: usize,
    pub seed: u64,
    /// Free constant of the Butler formula.
    pub butler_c: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            construction: Construction::Hexagonal,
            body: None,
            eta: 1e-6,
            delta: None,
            sat_res: None,
            cand_res: None,
            lift_res: None,
            pair_samples: 100_000,
            seed: 0,
            butler_c: 3.0,
        }
    }
}

/// Default (saturation, candidate, lift) grid resolutions.
pub fn default_resolutions(n: usize) -> (usize, usize, usize) {
    match n {
        0..=2 => (64, 64, 512),
        3 => (32, 16, 64),
        _ => (16, 8, 16),
    }
}

/// 1/(2n ln n).
pub fn default_delta(n: usize) -> f64 {
    let n = n as f64;
    1.0 / (2.0 * n * n.ln())
}

impl PipelineConfig {
    pub fn with_construction(construction: Construction) -> Self {
        PipelineConfig {
            construction,
            ..Default::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.construction.dim()
    }

    pub fn body(&self) -> ConvexBody {
        self.body
            .clone()
            .unwrap_or_else(|| ConvexBody::unit_ball(self.dim()))
    }

    /// Fills in defaults and validates ranges.
    pub fn resolved(&self) -> Result<ResolvedConfig> {
        let n = self.dim();
        if !(2..=4).contains(&n) {
            return Err(Error::Unsupported(format!(
                "dimension {n} (supported: 2..=4)"
            )));
        }
        if let Some(b) = &self.body {
            check_dim(n, b.dim())?;
        }
        if !(self.eta > 0.0 && self.eta < 0.01) {
            return Err(Error::invalid(format!(
                "eta must lie in (0, 0.01), got {}",
                self.eta
            )));
        }
        let delta = self.delta.unwrap_or_else(|| default_delta(n));
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        if !self.butler_c.is_finite() {
            return Err(Error::invalid("butler_c must be finite"));
        }
        let (s, c, l) = default_resolutions(n);
        let res = |name: &str, r: Option<usize>, d: usize| match r.unwrap_or(d) {
            r if r >= 2 => Ok(r),
            r => Err(Error::invalid(format!(
                "{name} must be at least 2, got {r}"
            ))),
        };
        Ok(ResolvedConfig {
            n,
            delta,
            sat_res: res("sat_res", self.sat_res, s)?,
            cand_res: res("cand_res", self.cand_res, c)?,
            lift_res: res("lift_res", self.lift_res, l)?,
        })
    }
}

/// The defaults actually used by a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub n: usize,
    pub delta: f64,
    pub sat_res: usize,
    pub cand_res: usize,
    pub lift_res: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauSource {
    /// Exact LP optimum over the finite candidate family.
    Lp,
    /// ((1+γ)/(1−δ))ⁿ, used when the LP is too large.
    MeasureBound,
}

/// The inequalities a run is expected to satisfy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundChecks {
    /// m ≤ (1 + ln max_set_size)·τ*.
    pub color_count_within_run_bound: bool,
    /// Whether the previous check counts; it does only when τ* is exact.
    pub run_bound_binding: bool,
    /// max_set_size ≤ k(2γ/δ)ⁿ.
    pub set_size_within_incidence_bound: bool,
    /// τ* ≥ |Λ|/max_set_size (exact τ* only).
    pub tau_at_least_lower_bound: Option<bool>,
}

impl BoundChecks {
    pub fn passed(&self) -> bool {
        (self.color_count_within_run_bound || !self.run_bound_binding)
            && self.set_size_within_incidence_bound
            && self.tau_at_least_lower_bound != Some(false)
    }
}

/// Every bound formula evaluated for one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub k: usize,
    pub gamma: f64,
    pub delta: f64,
    pub chromatic_bound: ChromaticBound,
    pub tau_star_finite: Option<f64>,
    pub tau_source: TauSource,
    pub measure_bound: f64,
    pub finite_run_bound: f64,
    pub butler_c: f64,
    /// Butler's formula with vol(DK)/vol(K) = 2ⁿ (n ≥ 3 only).
    pub butler_value: Option<f64>,
    pub color_count_m: usize,
    pub max_set_size: usize,
    pub incidence_bound: f64,
    pub ground_size: usize,
    pub lp_lower_bound: f64,
    pub checks: BoundChecks,
}

/// A finished run.
#[derive(Clone, Debug)]
pub struct ColoringRun {
    pub coloring: Coloring,
    pub params: TilingParameters,
    pub config: ResolvedConfig,
    pub instance: InstanceStats,
    pub verification: VerificationReport,
    pub bounds: BoundReport,
}

impl ColoringRun {
    pub fn passed(&self) -> bool {
        self.verification.passed() && self.bounds.checks.passed()
    }
}

/// Runs the whole construction: tiling, parameters, saturated ground set,
/// cover instance, greedy cover, lift, scaling to forbidden distance 1, and
/// verification. Verification outcomes are returned, not raised; check
/// [`ColoringRun::passed`].
pub fn build_coloring(config: &PipelineConfig) -> Result<ColoringRun> {
    let rc = config.resolved()?;
    let n = rc.n;
    let k = config.body();
    let tiling = config.construction.build()?;
    check_dim(n, tiling.dim())?;
    let params = tiling_parameters(&tiling, &k, config.eta)?;
    let nu = params.nu();
    let rho = ground_radius(&params, rc.delta);

    let estimate = tiling.torus().volume() / ((2.0 * rho).powi(n as i32) * k.volume());
    if estimate > MAX_GROUND_ESTIMATE {
        return Err(Error::Unsupported(format!(
            "the ground set would hold at least {estimate:.0} points at delta = {}; choose a larger delta",
            rc.delta
        )));
    }

    let ground = saturate(tiling.torus(), &k, rho, rc.sat_res)?;
    let inst = build_instance(ground, &tiling, &params, rc.delta, rc.cand_res)?;
    let selection = greedy_cover(inst.system())?;
    let tau_star = match fractional_optimum(inst.system()) {
        Ok((_, tau)) => Some(tau),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let cert = lift_cover(&inst, &tiling, &selection, rc.lift_res)?;

    let translates = selection.iter().map(|&j| inst.candidates()[j]).collect();
    let coloring = Coloring::shrunk_cover(k, tiling, nu, params.scale, translates)?;
    let mut verification = verify_coloring(&coloring, config.pair_samples, config.seed, None)?;
    verification.totality = Some(cert.grid.clone());
    verification.cover = Some(cert);

    let stats = inst.stats();
    let bounds = bound_report(&coloring, &params, &stats, tau_star, config.butler_c)?;
    Ok(ColoringRun {
        coloring,
        params,
        config: rc,
        instance: stats,
        verification,
        bounds,
    })
}

fn bound_report(
    c: &Coloring,
    params: &TilingParameters,
    stats: &InstanceStats,
    tau_star: Option<f64>,
    butler_c: f64,
) -> Result<BoundReport> {
    let n = c.dim();
    let k = c.tiling().cells().len();
    let delta = stats.delta;
    let measure = measure_bound(params, delta, n)?;
    let tau = tau_star.unwrap_or(measure);
    let run_bound = finite_run_bound(stats.max_set_size, tau)?;
    let incidence = incidence_bound(k, params.gamma, delta, n);
    let lower = stats.ground_size as f64 / stats.max_set_size as f64;
    let m = c.color_count();
    let butler_value = if n >= 3 {
        Some(butler_bound_ln_ratio(
            n as u64,
            n as f64 * std::f64::consts::LN_2,
            butler_c,
        )?)
    } else {
        None
    };
    Ok(BoundReport {
        n,
        k,
        gamma: params.gamma,
        delta,
        chromatic_bound: chromatic_bound(n as u64, k as u64, params.gamma)?,
        tau_star_finite: tau_star,
        tau_source: if tau_star.is_some() {
            TauSource::Lp
        } else {
            TauSource::MeasureBound
        },
        measure_bound: measure,
        finite_run_bound: run_bound,
        butler_c,
        butler_value,
        color_count_m: m,
        max_set_size: stats.max_set_size,
        incidence_bound: incidence,
        ground_size: stats.ground_size,
        lp_lower_bound: lower,
        checks: BoundChecks {
            color_count_within_run_bound: m as f64 <= run_bound + 1e-9,
            run_bound_binding: tau_star.is_some(),
            set_size_within_incidence_bound: stats.max_set_size as f64 <= incidence,
            tau_at_least_lower_bound: tau_star.map(|t| t >= lower - 1e-6),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_validation() {
        let c = PipelineConfig::default();
        let r = c.resolved().unwrap();
        assert_eq!((r.sat_res, r.cand_res, r.lift_res), (64, 64, 512));
        assert!((r.delta - 1.0 / (4.0 * 2f64.ln())).abs() < 1e-15);
        let bad = PipelineConfig {
            eta: 0.02,
            ..Default::default()
        };
        assert!(matches!(bad.resolved(), Err(Error::InvalidInput(_))));
        let bad = PipelineConfig {
            delta: Some(1.0),
            ..Default::default()
        };
        assert!(bad.resolved().is_err());
        let bad = PipelineConfig {
            lift_res: Some(1),
            ..Default::default()
        };
        assert!(bad.resolved().is_err());
        let five = PipelineConfig::with_construction(Construction::BallGeneric { n: 5 });
        assert!(matches!(five.resolved(), Err(Error::Unsupported(_))));
        let wrong_body = PipelineConfig {
            body: Some(ConvexBody::unit_ball(3)),
            ..Default::default()
        };
        assert!(matches!(
            wrong_body.resolved(),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn config_json_roundtrip() {
        let json = r#"{"construction": {"kind": "ball_generic", "n": 3}, "delta": 0.5, "seed": 9}"#;
        let c: PipelineConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.construction, Construction::BallGeneric { n: 3 });
        assert_eq!(c.delta, Some(0.5));
        assert_eq!(c.eta, 1e-6);
        let back: PipelineConfig =
            serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"colour": 1}"#).is_err());
    }

    #[test]
    fn oversized_ground_set_is_refused() {
        let c = PipelineConfig::with_construction(Construction::BallGeneric { n: 4 });
        assert!(matches!(build_coloring(&c), Err(Error::Unsupported(_))));
    }

    #[test]
    fn site_on_boundary_is_an_association_error() {
        // The cell [0, 1]² holds its site at a corner.
        let hs = vec![
            Halfspace::new(Vector::from_slice(&[1.0, 0.0]), 1.0),
            Halfspace::new(Vector::from_slice(&[-1.0, 0.0]), 0.0),
            Halfspace::new(Vector::from_slice(&[0.0, 1.0]), 1.0),
            Halfspace::new(Vector::from_slice(&[0.0, -1.0]), 0.0),
        ];
        let c = PipelineConfig::with_construction(Construction::Explicit {
            lattice_basis: Lattice::cubic(2, 1.0).unwrap(),
            translates: vec![Vector::zeros(2)],
            cells: Some(vec![hs]),
        });
        assert!(matches!(build_coloring(&c), Err(Error::Association(_))));
    }

    #[test]
    fn small_square_run_passes() {
        let c = PipelineConfig {
            construction: Construction::Square,
            delta: Some(0.5),
            sat_res: Some(32),
            cand_res: Some(16),
            lift_res: Some(64),
            pair_samples: 5000,
            ..Default::default()
        };
        let run = build_coloring(&c).unwrap();
        assert!(run.passed(), "{:?} {:?}", run.verification, run.bounds);
        assert_eq!(run.bounds.tau_source, TauSource::Lp);
        assert_eq!(run.bounds.color_count_m, run.coloring.color_count());
        assert!((run.params.gamma - 2f64.sqrt()).abs() < 1e-9);
        assert!(run.bounds.butler_value.is_none());
    }
}
