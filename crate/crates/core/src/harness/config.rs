use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bounds::TailModel;
use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::holder::{Modulus, SlowlyVarying};
use crate::lattice::MultiIndex;

/// One experiment, as read from a JSON config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    pub seed: u64,
    #[serde(default = "one")]
    pub replicas: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum Experiment {
    Deviation(DeviationParams),
    VerifyBound(VerifyParams),
    InductionCheck(DeviationParams),
    Tightness(TightnessParams),
    Fdd(FddParams),
    SheetCov(SheetParams),
    HolderNorm(HolderParams),
    Constants(ConstantsParams),
    LemmaChecks(LemmaParams),
    ExponentFit(ExponentParams),
}

impl Experiment {
    /// The CLI subcommand that runs this experiment.
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Deviation(_) => "deviation",
            Experiment::VerifyBound(_) => "verify-bound",
            Experiment::InductionCheck(_) => "induction-check",
            Experiment::Tightness(_) => "tightness",
            Experiment::Fdd(_) => "fdd",
            Experiment::SheetCov(_) => "sheet-cov",
            Experiment::HolderNorm(_) => "holder-norm",
            Experiment::Constants(_) => "constants",
            Experiment::LemmaChecks(_) => "lemma-checks",
            Experiment::ExponentFit(_) => "exponent-fit",
        }
    }

    /// Lattice dimension the experiment lives in, if it has one.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Experiment::Deviation(p) | Experiment::InductionCheck(p) => Some(p.generator.d),
            Experiment::VerifyBound(p) => Some(p.generator.d),
            Experiment::Tightness(p) => Some(p.generator.d),
            Experiment::Fdd(p) => Some(p.generator.d),
            Experiment::SheetCov(p) => Some(p.resolution.len()),
            Experiment::HolderNorm(p) => Some(p.generator.d),
            Experiment::Constants(p) => Some(p.d_max),
            Experiment::ExponentFit(p) => Some(p.d),
            Experiment::LemmaChecks(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationParams {
    pub generator: GeneratorSpec,
    pub shape: Vec<usize>,
    pub x_grid: Vec<f64>,
}

/// Which right-hand side `verify-bound` overlays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundSpec {
    /// `A exp(-(C x/K)^{2/d})` with `K` the generator's a.s. bound.
    Bounded,
    /// The general bound at a fixed `y`. `y` defaults to `K/C` for bounded
    /// generators and `tail` to the generator's own tail.
    Thm1 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<TailModel>,
    },
    /// The large-deviation bound on `P{|S_N| > x|N|}`.
    Thm2 { gamma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub generator: GeneratorSpec,
    pub shape: Vec<usize>,
    pub x_grid: Vec<f64>,
    pub bound: BoundSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessParams {
    pub generator: GeneratorSpec,
    /// `m`: the box has extent `2^{m_u}` on axis `u`.
    pub exponents: Vec<u32>,
    pub eps: f64,
    pub modulus: Modulus,
    /// Starting levels `J`, one estimate each.
    pub levels: Vec<u32>,
    #[serde(default = "first_axis")]
    pub axis: usize,
}

fn first_axis() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FddParams {
    pub generator: GeneratorSpec,
    pub shape: Vec<usize>,
    /// Grid points `t` with every `n_q t_q` integral.
    pub points: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SheetParams {
    /// Cells per axis.
    pub resolution: Vec<usize>,
    /// Node pairs `(t, t')`.
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderParams {
    pub generator: GeneratorSpec,
    /// Growing lattice sizes.
    pub shapes: Vec<Vec<usize>>,
    pub modulus: Modulus,
    /// Defaults to `⌈log2 max n_q⌉` of the largest shape.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_max: Option<u32>,
    /// Also evaluate the single-spike field on each shape.
    #[serde(default = "yes")]
    pub spike_control: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsParams {
    pub d_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Converge,
    Diverge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvaryingCase {
    pub l: SlowlyVarying,
    pub k_max: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesCase {
    pub l: SlowlyVarying,
    pub tail: TailModel,
    /// `A` for the summability condition and `C` for the moment sum.
    pub scale: f64,
    pub j_max: u32,
    pub expect: Expect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaParams {
    #[serde(default)]
    pub svarying: Vec<SvaryingCase>,
    #[serde(default)]
    pub series: Vec<SeriesCase>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentParams {
    /// Number of Gaussian factors in `∏ |N_q|`.
    pub d: usize,
    #[serde(default = "default_window")]
    pub window: (f64, f64),
    /// Accepted range for the fitted exponent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accept: Option<(f64, f64)>,
}

fn default_window() -> (f64, f64) {
    crate::bounds::lemmas::DEFAULT_WINDOW
}

fn check_grid(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::InvalidInput("x_grid is empty".into()));
    }
    if x.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidInput("x_grid entries must be positive".into()));
    }
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("x_grid must be strictly increasing".into()));
    }
    Ok(())
}

pub(crate) fn shape_of(gen: &GeneratorSpec, shape: &[usize]) -> Result<MultiIndex> {
    let n = MultiIndex::new(shape.to_vec())?;
    if n.dim() != gen.d {
        return Err(Error::InvalidInput(format!(
            "shape {shape:?} does not match generator dimension {}",
            gen.d
        )));
    }
    Ok(n)
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas < 1 {
            return Err(Error::InvalidInput("replicas must be >= 1".into()));
        }
        match &self.experiment {
            Experiment::Deviation(p) | Experiment::InductionCheck(p) => {
                p.generator.validate()?;
                shape_of(&p.generator, &p.shape)?;
                check_grid(&p.x_grid)
            }
            Experiment::VerifyBound(p) => {
                p.generator.validate()?;
                shape_of(&p.generator, &p.shape)?;
                check_grid(&p.x_grid)
            }
            Experiment::Tightness(p) => {
                p.generator.validate()?;
                if p.levels.is_empty() {
                    return Err(Error::InvalidInput("tightness needs at least one level".into()));
                }
                Ok(())
            }
            Experiment::Fdd(p) => {
                p.generator.validate()?;
                shape_of(&p.generator, &p.shape)?;
                if p.points.is_empty() {
                    return Err(Error::InvalidInput("fdd needs at least one point".into()));
                }
                Ok(())
            }
            Experiment::SheetCov(p) => {
                if p.resolution.is_empty() || p.resolution.iter().any(|&r| r < 2) {
                    return Err(Error::InvalidInput("sheet resolution must be >= 2 per axis".into()));
                }
                Ok(())
            }
            Experiment::HolderNorm(p) => {
                p.generator.validate()?;
                if p.shapes.is_empty() {
                    return Err(Error::InvalidInput("holder-norm needs at least one shape".into()));
                }
                for s in &p.shapes {
                    shape_of(&p.generator, s)?;
                }
                Ok(())
            }
            Experiment::Constants(p) => {
                if !(1..=crate::bounds::constants::MAX_DIM).contains(&p.d_max) {
                    return Err(Error::Unsupported(format!("d_max = {}", p.d_max)));
                }
                Ok(())
            }
            Experiment::LemmaChecks(_) => Ok(()),
            Experiment::ExponentFit(p) => {
                if p.d == 0 {
                    return Err(Error::InvalidInput("d must be >= 1".into()));
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::BaseDist;

    #[test]
    fn json_round_trip() {
        let cfg = ExperimentConfig {
            experiment: Experiment::VerifyBound(VerifyParams {
                generator: GeneratorSpec::iid(BaseDist::Rademacher, 2).unwrap(),
                shape: vec![8, 8],
                x_grid: vec![1.0, 2.0],
                bound: BoundSpec::Thm1 { y: None, tail: None },
            }),
            seed: 7,
            replicas: 100,
            output: None,
        };
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert!(cfg.to_json().contains("\"experiment\": \"verify-bound\""));
    }

    #[test]
    fn rejects_unsorted_grid_and_zero_replicas() {
        let text = r#"{"experiment":"deviation","seed":1,"replicas":10,
            "generator":{"variant":"product_rademacher","params":{},"d":1},
            "shape":[4],"x_grid":[2.0,1.0]}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
        let text = text.replace("[2.0,1.0]", "[1.0,2.0]").replace("\"replicas\":10", "\"replicas\":0");
        assert!(ExperimentConfig::from_json(&text).is_err());
    }
}
