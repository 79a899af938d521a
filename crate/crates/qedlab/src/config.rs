//! Run configuration files.
//!
//! A configuration is a TOML document. It describes the grid, potential,
//! modes, solver settings and sweep axes shared by one or more runs; each
//! run names exactly one method and may override the solver settings.

use std::fmt;
use std::path::{Path, PathBuf};

use qedlab_core::exact_qed::PfForm;
use qedlab_core::grid::{Boundary, FdOrder};
use qedlab_core::pheg::{PhotonNumberMode, PotentialMode};
use qedlab_core::photon_free::{HistoryMode, Reconstruction};
use qedlab_core::qedft::SpinFactor;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactPf,
    ExactPzw,
    PzwSelfpol,
    PhotonFree,
    Pheg,
    QedftPx,
    QedftPxlda,
    Maxwell,
    PxldaMaxwell,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExactPf => "exact-pf",
            Method::ExactPzw => "exact-pzw",
            Method::PzwSelfpol => "pzw-selfpol",
            Method::PhotonFree => "photon-free",
            Method::Pheg => "pheg",
            Method::QedftPx => "qedft-px",
            Method::QedftPxlda => "qedft-pxlda",
            Method::Maxwell => "maxwell",
            Method::PxldaMaxwell => "pxlda-maxwell",
        }
    }

    /// Whether the method carries the quantized photon space explicitly.
    pub fn has_fock_space(self) -> bool {
        matches!(self, Method::ExactPf | Method::ExactPzw | Method::Pheg)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    #[default]
    Ground,
    Spectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BoundarySpec {
    #[default]
    Dirichlet,
    Periodic,
}

impl From<BoundarySpec> for Boundary {
    fn from(b: BoundarySpec) -> Self {
        match b {
            BoundarySpec::Dirichlet => Boundary::Dirichlet,
            BoundarySpec::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PfFormSpec {
    BareWithA2,
    #[default]
    DressedBilinear,
    Peierls,
}

impl From<PfFormSpec> for PfForm {
    fn from(f: PfFormSpec) -> Self {
        match f {
            PfFormSpec::BareWithA2 => PfForm::BareWithA2,
            PfFormSpec::DressedBilinear => PfForm::DressedBilinear,
            PfFormSpec::Peierls => PfForm::Peierls,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PhegPotentialSpec {
    #[default]
    Raw,
    Mollified00,
    Unmollified00,
}

impl From<PhegPotentialSpec> for PotentialMode {
    fn from(p: PhegPotentialSpec) -> Self {
        match p {
            PhegPotentialSpec::Raw => PotentialMode::Raw,
            PhegPotentialSpec::Mollified00 => PotentialMode::Mollified00,
            PhegPotentialSpec::Unmollified00 => PotentialMode::Unmollified00,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PhotonNumberSpec {
    /// Back transformation of the full state (pHEG) or the shifted dressed
    /// vacuum (photon-free and Kohn-Sham).
    #[default]
    Full,
    Adiabatic,
}

impl PhotonNumberSpec {
    pub fn pheg(self) -> PhotonNumberMode {
        match self {
            PhotonNumberSpec::Full => PhotonNumberMode::BackTransform,
            PhotonNumberSpec::Adiabatic => PhotonNumberMode::Adiabatic,
        }
    }

    pub fn reconstruction(self) -> Reconstruction {
        match self {
            PhotonNumberSpec::Full => Reconstruction::ShiftedVacuum,
            PhotonNumberSpec::Adiabatic => Reconstruction::Adiabatic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SpinSpec {
    #[default]
    ClosedShell,
    SingleElectronX2,
}

impl From<SpinSpec> for SpinFactor {
    fn from(s: SpinSpec) -> Self {
        match s {
            SpinSpec::ClosedShell => SpinFactor::ClosedShell,
            SpinSpec::SingleElectronX2 => SpinFactor::SingleElectronX2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum HistorySpec {
    MemoryIntegral,
    #[default]
    AuxiliaryOde,
}

impl From<HistorySpec> for HistoryMode {
    fn from(h: HistorySpec) -> Self {
        match h {
            HistorySpec::MemoryIntegral => HistoryMode::MemoryIntegral,
            HistorySpec::AuxiliaryOde => HistoryMode::AuxiliaryOde,
        }
    }
}

/// A cavity frequency: a number, or `"resonance"` for the first bare
/// excitation energy of the configured potential on the configured grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaSpec {
    Value(f64),
    Keyword(Resonance),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resonance {
    Resonance,
}

impl Default for OmegaSpec {
    fn default() -> Self {
        OmegaSpec::Keyword(Resonance::Resonance)
    }
}

impl fmt::Display for OmegaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaSpec::Value(w) => write!(f, "{w}"),
            OmegaSpec::Keyword(_) => f.write_str("resonance"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub points: usize,
    pub spacing: f64,
    #[serde(default)]
    pub boundary: BoundarySpec,
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_order() -> usize {
    4
}

impl GridSpec {
    pub fn fd_order(&self) -> Result<FdOrder, CliError> {
        FdOrder::from_usize(self.order).map_err(CliError::from)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    /// Soft-Coulomb softening `ξ` of `v(x) = -1/sqrt(x² + ξ²)`.
    #[serde(default = "one")]
    pub softening: f64,
    /// Replace the soft-Coulomb potential by `v = 0`.
    #[serde(default)]
    pub free: bool,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            softening: 1.0,
            free: false,
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    #[serde(default)]
    pub omega: OmegaSpec,
    #[serde(default)]
    pub lambda: Option<f64>,
    /// `g/ω` with `g = sqrt(ω/2) λ`; fixes `λ` per frequency.
    #[serde(default)]
    pub ratio: Option<f64>,
    #[serde(default = "one_usize")]
    pub count: usize,
}

impl Default for ModeSpec {
    fn default() -> Self {
        Self {
            omega: OmegaSpec::default(),
            lambda: Some(0.0),
            ratio: None,
            count: 1,
        }
    }
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_max_n")]
    pub max_n: usize,
    #[serde(default)]
    pub pf_form: PfFormSpec,
    #[serde(default)]
    pub pheg_potential: PhegPotentialSpec,
    #[serde(default)]
    pub photon_number: PhotonNumberSpec,
}

fn default_max_n() -> usize {
    40
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            max_n: default_max_n(),
            pf_form: PfFormSpec::default(),
            pheg_potential: PhegPotentialSpec::default(),
            photon_number: PhotonNumberSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalSpec {
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default = "one_u32")]
    pub dimension: u32,
    #[serde(default)]
    pub spin_factor: SpinSpec,
    #[serde(default)]
    pub mollify: bool,
}

fn one_u32() -> u32 {
    1
}

impl Default for FunctionalSpec {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            dimension: 1,
            spin_factor: SpinSpec::default(),
            mollify: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsSpec {
    pub dt: f64,
    pub t_end: f64,
    pub stride: usize,
    pub damping: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_omega: usize,
    pub kick_strength: f64,
    pub kick_t0: f64,
    pub kick_width: f64,
    pub history: HistorySpec,
}

impl Default for DynamicsSpec {
    fn default() -> Self {
        Self {
            dt: 5e-4,
            t_end: 1000.0,
            stride: 20,
            damping: 5e-3,
            omega_min: 0.0,
            omega_max: 1.5,
            n_omega: 1501,
            kick_strength: 1e-4,
            kick_t0: 1.0,
            kick_width: 1e-2,
            history: HistorySpec::default(),
        }
    }
}

/// `count` frequencies `min + (max - min) i/count`, `i = 1..=count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl OmegaGrid {
    pub fn values(&self) -> Vec<f64> {
        (1..=self.count)
            .map(|i| self.min + (self.max - self.min) * i as f64 / self.count as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub lambda: Option<Vec<f64>>,
    pub omega: Option<Vec<OmegaSpec>>,
    pub omega_grid: Option<OmegaGrid>,
    pub softening: Option<Vec<f64>>,
    pub kappa: Option<Vec<f64>>,
}

/// Reference solve that each point is compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    pub method: Method,
    pub max_n: Option<usize>,
    pub pf_form: Option<PfFormSpec>,
}

/// One run of a configuration: a method plus per-run overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunEntry {
    pub method: Method,
    /// Output name; defaults to the method name.
    pub label: Option<String>,
    pub max_n: Option<usize>,
    pub pf_form: Option<PfFormSpec>,
    pub pheg_potential: Option<PhegPotentialSpec>,
    pub mollify: Option<bool>,
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

/// A configuration file as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default = "default_preset")]
    pub preset: String,
    #[serde(default)]
    pub kind: Kind,
    /// Shorthand for a single `[[run]]`.
    pub method: Option<Method>,
    pub grid: GridSpec,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub modes: ModeSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub functional: FunctionalSpec,
    #[serde(default)]
    pub dynamics: DynamicsSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    pub reference: Option<ReferenceSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub run: Vec<RunEntry>,
}

fn default_preset() -> String {
    "custom".into()
}

/// A single resolved run: exactly one method with its settings applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: String,
    pub kind: Kind,
    pub label: String,
    pub method: Method,
    pub grid: GridSpec,
    pub potential: PotentialSpec,
    pub modes: ModeSpec,
    pub solver: SolverSpec,
    pub functional: FunctionalSpec,
    pub dynamics: DynamicsSpec,
    pub sweep: SweepSpec,
    pub reference: Option<ReferenceSpec>,
}

const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
    ("fig6", include_str!("../presets/fig6.toml")),
    ("fig8", include_str!("../presets/fig8.toml")),
    ("fig9", include_str!("../presets/fig9.toml")),
    ("fig10", include_str!("../presets/fig10.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_source(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))
}

/// Merges `overlay` into `base`; tables merge key by key, other values replace.
fn merge(base: &mut toml::Value, overlay: toml::Value) {
    match (base, overlay) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// A preset, a file, or a file layered over a preset.
    pub fn load(config: Option<&Path>, preset: Option<&str>) -> Result<Self, CliError> {
        let mut value = match preset {
            Some(p) => toml::from_str::<toml::Value>(preset_source(p)?).map_err(|e| CliError::Config(e.to_string()))?,
            None => toml::Value::Table(Default::default()),
        };
        if let Some(path) = config {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
            let overlay: toml::Value =
                toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            merge(&mut value, overlay);
        }
        if config.is_none() && preset.is_none() {
            return Err(CliError::Config("give --config, --preset or both".into()));
        }
        value.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    /// Resolves the runs; checks the invariants that need no computation.
    pub fn resolve(&self) -> Result<Vec<RunConfig>, CliError> {
        let entries: Vec<RunEntry> = match (&self.method, self.run.is_empty()) {
            (Some(m), true) => vec![RunEntry {
                method: *m,
                label: None,
                max_n: None,
                pf_form: None,
                pheg_potential: None,
                mollify: None,
                kappa: None,
            }],
            (None, false) => self.run.clone(),
            (Some(_), false) => {
                return Err(CliError::Config("give either `method` or `[[run]]` entries, not both".into()))
            }
            (None, true) => return Err(CliError::Config("no method given".into())),
        };
        self.check_sweep()?;
        let mut labels = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            let label = e.label.clone().unwrap_or_else(|| e.method.name().to_string());
            if !labels.insert(label.clone()) {
                return Err(CliError::Config(format!("duplicate run label `{label}`")));
            }
            let mut solver = self.solver.clone();
            if let Some(n) = e.max_n {
                solver.max_n = n;
            }
            if let Some(f) = e.pf_form {
                solver.pf_form = f;
            }
            if let Some(p) = e.pheg_potential {
                solver.pheg_potential = p;
            }
            let mut functional = self.functional.clone();
            if let Some(m) = e.mollify {
                functional.mollify = m;
            }
            if let Some(k) = e.kappa {
                functional.kappa = k;
            }
            out.push(RunConfig {
                preset: self.preset.clone(),
                kind: self.kind,
                label,
                method: e.method,
                grid: self.grid.clone(),
                potential: self.potential.clone(),
                modes: self.modes.clone(),
                solver,
                functional,
                dynamics: self.dynamics.clone(),
                sweep: self.sweep.clone(),
                reference: self.reference.clone(),
            });
        }
        Ok(out)
    }

    fn check_sweep(&self) -> Result<(), CliError> {
        let s = &self.sweep;
        let empty = |name: &str, len: Option<usize>| match len {
            Some(0) => Err(CliError::Config(format!("sweep axis `{name}` is empty"))),
            _ => Ok(()),
        };
        empty("lambda", s.lambda.as_ref().map(Vec::len))?;
        empty("omega", s.omega.as_ref().map(Vec::len))?;
        empty("omega_grid", s.omega_grid.map(|g| g.count))?;
        empty("softening", s.softening.as_ref().map(Vec::len))?;
        empty("kappa", s.kappa.as_ref().map(Vec::len))?;
        if s.omega.is_some() && s.omega_grid.is_some() {
            return Err(CliError::Config("give either sweep.omega or sweep.omega_grid".into()));
        }
        if self.modes.ratio.is_some() && s.lambda.is_some() {
            return Err(CliError::Config("a fixed g/ω ratio and a λ sweep exclude each other".into()));
        }
        if self.modes.count == 0 {
            return Err(CliError::Config("modes.count must be at least 1".into()));
        }
        Ok(())
    }
}

impl RunConfig {
    /// The resolved configuration as `#`-prefixed header lines.
    pub fn header(&self) -> String {
        let text = toml::to_string(self).unwrap_or_else(|e| format!("unserializable config: {e}"));
        text.lines().map(|l| format!("# {l}\n")).collect()
    }

    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.preset, self.label)
    }

    pub fn omega_axis(&self) -> Vec<OmegaSpec> {
        if let Some(g) = self.sweep.omega_grid {
            g.values().into_iter().map(OmegaSpec::Value).collect()
        } else if let Some(w) = &self.sweep.omega {
            w.clone()
        } else {
            vec![self.modes.omega]
        }
    }
}
