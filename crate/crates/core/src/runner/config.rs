use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzKind;
use crate::encoding::Mapping;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_hubbard, read_fcidump, HubbardSpec, MolecularIntegrals};
use crate::optimize::OptimizerConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FcidumpPoint {
    pub file: PathBuf,
    #[serde(default)]
    pub label: Option<String>,
    pub coordinate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// A geometry scan given as one integral file per point.
    Fcidump {
        #[serde(default = "default_coordinate")]
        coordinate: String,
        points: Vec<FcidumpPoint>,
    },
    /// Hubbard chain swept over the on-site interaction.
    Hubbard {
        sites: usize,
        t: f64,
        u: Vec<f64>,
        filling: (usize, usize),
        #[serde(default = "yes")]
        periodic: bool,
    },
}

fn default_coordinate() -> String {
    "coordinate".into()
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodingConfig {
    pub mapping: Mapping,
    pub two_qubit_reduction: bool,
    pub taper: bool,
}

impl Default for EncodingConfig {
    fn default() -> Self {
        EncodingConfig {
            mapping: Mapping::JordanWigner,
            two_qubit_reduction: false,
            taper: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub frozen_core: Vec<usize>,
    #[serde(default)]
    pub encoding: EncodingConfig,
    pub methods: Vec<String>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    /// Also run every fixed-orbital method with the untrotterized exponential.
    #[serde(default)]
    pub exact_ucc: bool,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Reserved; no default code path draws random numbers.
    #[serde(default)]
    pub seed: u64,
    /// Point index used for shift alignment; defaults to the exact minimum.
    #[serde(default)]
    pub anchor: Option<usize>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

/// A method column: ansatz family, orbital optimization, optional singles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MethodSpec {
    pub kind: AnsatzKind,
    pub orbital_optimized: bool,
    pub include_singles: bool,
}

impl MethodSpec {
    /// The same method without orbital optimization.
    pub fn base(self) -> MethodSpec {
        MethodSpec {
            orbital_optimized: false,
            ..self
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orbital_optimized {
            f.write_str("oo-")?;
        }
        f.write_str(self.kind.name())?;
        if self.include_singles {
            f.write_str("+singles")?;
        }
        Ok(())
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    /// `[oo-]<uccsd|puccd|uccd0|uccd0_full>[+singles]`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let (oo, rest) = match t.strip_prefix("oo-") {
            Some(r) => (true, r),
            None => (false, t.as_str()),
        };
        let (singles, rest) = match rest.strip_suffix("+singles") {
            Some(r) => (true, r),
            None => (false, rest),
        };
        let kind: AnsatzKind = rest.parse()?;
        if singles && kind != AnsatzKind::Puccd {
            return Err(Error::Config(format!("'+singles' only applies to puccd, got {s:?}")));
        }
        Ok(MethodSpec {
            kind,
            orbital_optimized: oo,
            include_singles: singles,
        })
    }
}

/// One scan point after resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub label: String,
    pub coordinate: f64,
    pub source: PointSource,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointSource {
    File(PathBuf),
    Hubbard(HubbardSpec),
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut c: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.base_dir = base_dir.into();
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, dir)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output)
    }

    pub fn coordinate_name(&self) -> &str {
        match &self.system {
            SystemConfig::Fcidump { coordinate, .. } => coordinate,
            SystemConfig::Hubbard { .. } => "U",
        }
    }

    pub fn points(&self) -> Vec<ScanPoint> {
        match &self.system {
            SystemConfig::Fcidump { points, .. } => points
                .iter()
                .map(|p| ScanPoint {
                    label: p.label.clone().unwrap_or_else(|| {
                        p.file
                            .file_stem()
                            .map(|s| s.to_string_lossy().into_owned())
                            .unwrap_or_else(|| p.coordinate.to_string())
                    }),
                    coordinate: p.coordinate,
                    source: PointSource::File(self.resolve(&p.file)),
                })
                .collect(),
            SystemConfig::Hubbard {
                sites,
                t,
                u,
                filling,
                periodic,
            } => u
                .iter()
                .map(|&u| ScanPoint {
                    label: format!("U{u}"),
                    coordinate: u,
                    source: PointSource::Hubbard(HubbardSpec {
                        n_sites: *sites,
                        t: *t,
                        u,
                        periodic: *periodic,
                        filling: *filling,
                    }),
                })
                .collect(),
        }
    }

    pub fn methods(&self) -> Result<Vec<MethodSpec>> {
        self.methods.iter().map(|m| m.parse()).collect()
    }

    /// Integrals of one point with the frozen core applied.
    pub fn load_point(&self, point: &ScanPoint) -> Result<MolecularIntegrals> {
        let ints = match &point.source {
            PointSource::File(path) => read_fcidump(path)?,
            PointSource::Hubbard(spec) => build_hubbard(spec)?,
        };
        ints.freeze_core(&self.frozen_core)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for s in ["uccsd", "oo-puccd", "puccd+singles", "oo-uccd0_full"] {
            assert_eq!(s.parse::<MethodSpec>().unwrap().to_string(), s);
        }
        assert!("uccsd+singles".parse::<MethodSpec>().is_err());
        assert!("ccsd".parse::<MethodSpec>().is_err());
    }

    #[test]
    fn hubbard_config_parses() {
        let c = RunConfig::from_toml(
            r#"
methods = ["uccsd"]
[system]
kind = "hubbard"
sites = 4
t = -1.0
u = [0.0, 2.0]
filling = [2, 2]
"#,
            "",
        )
        .unwrap();
        let pts = c.points();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].label, "U2");
        assert_eq!(c.encoding, EncodingConfig::default());
        assert!(RunConfig::from_toml(
            "methods = []\nbogus = 1\n[system]\nkind='hubbard'\nsites=2\nt=1.0\nu=[1.0]\nfilling=[1,1]",
            ""
        )
        .is_err());
    }
}
