//! Run configuration: one TOML document, unknown keys rejected.

use cantor_scaling::branch::{BranchSystem, PerturbationShape};
use cantor_scaling::ratio::{Metric, RatioVector, Regrouped, ScalingSource, TailPolicy};
use cantor_scaling::realization::{FiniteMemory, HolderSeries, PrescribedScaling};
use cantor_scaling::symbolic::{DualPoint, Word};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub system: Option<SystemSpec>,
    pub scaling: Option<ScalingSpec>,
    #[serde(default)]
    pub params: Params,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    /// Children and gaps of `[0,1]` listed as child 1, gap 1, .., child d.
    Affine { d: usize, lengths: Vec<f64> },
    /// `f(x) = A((2d-1)x + x^{k+ε})` on the first domain, affine elsewhere.
    PowerExample { d: usize, k: usize, eps: f64 },
    PerturbedAffine {
        d: usize,
        lengths: Vec<f64>,
        amplitude: f64,
        #[serde(default = "one")]
        harmonic: u32,
    },
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryEntry {
    pub word: String,
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalingSpec {
    /// Interleaved ratios, child 1 first.
    Constant {
        ratios: Vec<f64>,
    },
    FiniteMemory {
        d: usize,
        entries: Vec<MemoryEntry>,
        fallback: Vec<f64>,
    },
    HolderSeries {
        d: usize,
        a0: f64,
        delta: f64,
        alpha: f64,
    },
}

/// Analysis parameters; each command reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// Alphabet size for commands without a source (`lemma`, `gen-example`).
    pub d: Option<usize>,
    pub depth: usize,
    /// Smoothness order; defaults to the system's own `k`.
    pub k: Option<usize>,
    pub eps: Option<f64>,
    pub eps1: Option<f64>,
    pub n_min: usize,
    pub n_max: usize,
    pub tail: String,
    pub tail2: String,
    pub symbol: u32,
    pub j0: u32,
    pub constraints: String,
    /// `rho_s` or `rho_delta:<δ>`.
    pub metric: String,
    pub max_lcp: usize,
    pub pairs_per_level: usize,
    pub expect_exponent: Option<f64>,
    pub exponent_tolerance: f64,
    pub min_r_squared: f64,
    pub levels: Vec<usize>,
    pub samples: usize,
    pub refinement: usize,
    pub root_tolerance: Option<f64>,
    pub pairs: usize,
    pub k_max: usize,
    pub grid: usize,
    pub eta_scale: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            d: None,
            depth: 6,
            k: None,
            eps: None,
            eps1: None,
            n_min: 3,
            n_max: 10,
            tail: "(2)".into(),
            tail2: "(3)".into(),
            symbol: 1,
            j0: 1,
            constraints: "combined".into(),
            metric: "rho_s".into(),
            max_lcp: 12,
            pairs_per_level: 24,
            expect_exponent: None,
            exponent_tolerance: 0.15,
            min_r_squared: 0.97,
            levels: vec![4, 12],
            samples: 64,
            refinement: 2,
            root_tolerance: None,
            pairs: 50,
            k_max: 4,
            grid: 2001,
            eta_scale: 1.0,
        }
    }
}

/// A built scaling function, geometric or prescribed.
pub enum Source {
    System(BranchSystem),
    Scaling(PrescribedScaling),
    RegroupedScaling(Regrouped<PrescribedScaling>),
}

impl Source {
    pub fn as_scaling(&self) -> &dyn ScalingSource {
        match self {
            Source::System(s) => s,
            Source::Scaling(s) => s,
            Source::RegroupedScaling(s) => s,
        }
    }

    pub fn system(&self) -> Option<&BranchSystem> {
        match self {
            Source::System(s) => Some(s),
            _ => None,
        }
    }

    pub fn d(&self) -> usize {
        self.as_scaling().d()
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    /// The `k` and `ε` of the system when it carries them.
    pub fn system_order(&self) -> Option<(usize, f64)> {
        match &self.system {
            Some(SystemSpec::PowerExample { k, eps, .. }) => Some((*k, *eps)),
            _ => None,
        }
    }

    pub fn k(&self) -> Result<usize, CliError> {
        self.params
            .k
            .or(self.system_order().map(|o| o.0))
            .ok_or_else(|| invalid("params.k is required for this system"))
    }

    pub fn eps(&self) -> Result<f64, CliError> {
        let eps = self
            .params
            .eps
            .or(self.system_order().map(|o| o.1))
            .ok_or_else(|| invalid("params.eps is required for this system"))?;
        check_eps(eps)?;
        Ok(eps)
    }

    /// Builds the source, regrouped in blocks of `regroup` symbols when given.
    pub fn source(&self, regroup: Option<usize>) -> Result<Source, CliError> {
        let src = match (&self.system, &self.scaling) {
            (Some(_), Some(_)) => return Err(invalid("give either [system] or [scaling], not both")),
            (None, None) => return Err(invalid("a [system] or [scaling] table is required")),
            (Some(sys), None) => Source::System(build_system(sys)?),
            (None, Some(sc)) => Source::Scaling(build_scaling(sc)?),
        };
        match regroup {
            None | Some(1) => Ok(src),
            Some(0) => Err(invalid("--regroup block size must be >= 1")),
            Some(n) => match src {
                Source::System(s) => Ok(Source::System(s.regroup(n)?)),
                Source::Scaling(s) => Ok(Source::RegroupedScaling(Regrouped::new(s, n)?)),
                Source::RegroupedScaling(_) => unreachable!("sources are regrouped once"),
            },
        }
    }

    pub fn tail(&self, d: usize) -> Result<DualPoint, CliError> {
        parse_tail(&self.params.tail, d)
    }

    pub fn tail2(&self, d: usize) -> Result<DualPoint, CliError> {
        parse_tail(&self.params.tail2, d)
    }

    pub fn metric(&self) -> Result<Metric, CliError> {
        let m = self.params.metric.trim();
        if m == "rho_s" {
            return Ok(Metric::RhoS(TailPolicy::default()));
        }
        if let Some(rest) = m.strip_prefix("rho_delta:") {
            let delta: f64 = rest
                .parse()
                .map_err(|_| invalid(format!("bad delta in metric '{m}'")))?;
            if !(delta > 0.0) {
                return Err(invalid(format!("rho_delta needs delta > 0, got {delta}")));
            }
            return Ok(Metric::RhoDelta(delta));
        }
        Err(invalid(format!(
            "metric must be 'rho_s' or 'rho_delta:<delta>', got '{m}'"
        )))
    }
}

fn parse_tail(text: &str, d: usize) -> Result<DualPoint, CliError> {
    DualPoint::decode(text, d).map_err(|e| invalid(format!("tail '{text}': {e}")))
}

pub fn check_eps(eps: f64) -> Result<(), CliError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("epsilon in (0,1] required, got {eps}")));
    }
    Ok(())
}

/// `1 <= k < 2d`: variation bounds need `k + 1` of the `2d` constraint points.
pub fn check_order(k: usize, d: usize) -> Result<(), CliError> {
    if k == 0 || k >= 2 * d {
        return Err(invalid(format!(
            "k < 2d required: the smoothness condition assumes 1 <= k < 2d (k = {k}, d = {d})"
        )));
    }
    Ok(())
}

fn build_system(spec: &SystemSpec) -> Result<BranchSystem, CliError> {
    Ok(match spec {
        SystemSpec::Affine { d, lengths } => BranchSystem::affine(*d, lengths)?,
        SystemSpec::PowerExample { d, k, eps } => {
            check_example(*d, *k, *eps)?;
            BranchSystem::power_example(*d, *k, *eps)?
        }
        SystemSpec::PerturbedAffine {
            d,
            lengths,
            amplitude,
            harmonic,
        } => BranchSystem::perturbed_affine(*d, lengths, *amplitude, PerturbationShape::Sine { harmonic: *harmonic })?,
    })
}

/// `k < 2d - 1` and `0 < ε < 1`: the range in which the example map is built.
pub fn check_example(d: usize, k: usize, eps: f64) -> Result<(), CliError> {
    if d < 2 {
        return Err(invalid(format!("d >= 2 required, got {d}")));
    }
    if k == 0 || k + 1 >= 2 * d {
        return Err(invalid(format!(
            "k < 2d-1 required: the example map exists for 1 <= k < 2d-1 (k = {k}, d = {d})"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("0 < eps < 1 required for the example map, got {eps}")));
    }
    Ok(())
}

fn build_scaling(spec: &ScalingSpec) -> Result<PrescribedScaling, CliError> {
    Ok(match spec {
        ScalingSpec::Constant { ratios } => PrescribedScaling::Constant(RatioVector::from_interleaved(ratios)?),
        ScalingSpec::FiniteMemory { d, entries, fallback } => {
            let entries = entries
                .iter()
                .map(|e| Ok((Word::decode(&e.word, *d)?, RatioVector::from_interleaved(&e.ratios)?)))
                .collect::<cantor_scaling::error::Result<Vec<_>>>()?;
            PrescribedScaling::FiniteMemory(FiniteMemory::new(
                *d,
                entries,
                RatioVector::from_interleaved(fallback)?,
            )?)
        }
        ScalingSpec::HolderSeries { d, a0, delta, alpha } => {
            let base = HolderSeries::default_base(*d, *delta)?;
            PrescribedScaling::HolderSeries(HolderSeries::new(base, *a0, *delta, *alpha)?)
        }
    })
}
