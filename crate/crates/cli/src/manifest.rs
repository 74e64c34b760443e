//! Run manifests and the model configuration they determine.

use std::collections::BTreeMap;
use std::path::PathBuf;

use ainfty::models::poly::PolyAlgebra;
use ainfty::models::weyl::WeylConfig;
use ainfty::space::TruncationPolicy;
use clap::Args;
use serde::Serialize;

use crate::Failure;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Number of polynomial variables (2m). Defaults to the size of `--omega`, or 2.
    #[arg(long, global = true)]
    pub vars: Option<usize>,
    /// Cap on the total polynomial degree of basis monomials.
    #[arg(long, global = true, default_value_t = 4)]
    pub degree_cap: u32,
    /// File holding the skew form ω, one row per line.
    #[arg(long, global = true)]
    pub omega: Option<PathBuf>,
    /// Highest power of the flow parameter `s`.
    #[arg(long, global = true, default_value_t = 3)]
    pub s_order: u32,
    /// Exponent cap for a context parameter (t, u, s or g), as NAME=K.
    #[arg(long = "param-cap", global = true, value_name = "NAME=K")]
    pub param_cap: Vec<String>,
    /// Longest basis tuple in verification banks and dumps.
    #[arg(long, global = true, default_value_t = 5)]
    pub tuple_len: usize,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Silently drop monomials beyond the degree cap instead of failing.
    #[arg(long, global = true)]
    pub truncate: bool,
    /// Directory for outputs; without it everything goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Everything that determines a run. Serialized next to its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub target: Option<String>,
    pub vars: usize,
    pub degree_cap: u32,
    pub omega: Option<String>,
    pub caps: BTreeMap<String, u32>,
    pub s_order: u32,
    pub tuple_len: usize,
    pub seed: u64,
    pub truncate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub outputs: Vec<String>,
}

impl ModelArgs {
    /// Resolves the flags into a model configuration and a manifest skeleton.
    pub fn resolve(&self, command: &str, target: Option<String>) -> Result<(WeylConfig, RunManifest), Failure> {
        let omega = match &self.omega {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read omega file {}: {e}", path.display())))?;
                let m = PolyAlgebra::parse_omega(&text).map_err(|e| Failure::Usage(format!("omega file: {e}")))?;
                if m.is_empty() {
                    return Err(Failure::Usage("omega file is empty".into()));
                }
                Some(m)
            }
            None => None,
        };
        let vars = match (self.vars, &omega) {
            (Some(v), Some(m)) if v != m.len() => {
                return Err(Failure::Usage(format!("--vars {v} does not match the {0}×{0} omega", m.len())))
            }
            (Some(v), _) => v,
            (None, Some(m)) => m.len(),
            (None, None) => 2,
        };
        let mut caps = BTreeMap::from([
            ("t".to_string(), self.degree_cap),
            ("u".to_string(), 2),
            ("s".to_string(), self.s_order),
            ("g".to_string(), 2),
        ]);
        for spec in &self.param_cap {
            let (name, k) = spec
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("--param-cap expects NAME=K, got `{spec}`")))?;
            let k: u32 = k.trim().parse().map_err(|_| Failure::Usage(format!("bad cap in `{spec}`")))?;
            let name = name.trim();
            match caps.get_mut(name) {
                Some(_) if name == "s" && k != self.s_order => {
                    return Err(Failure::Usage(format!("--param-cap s={k} conflicts with --s-order {}", self.s_order)))
                }
                Some(c) => *c = k,
                None => return Err(Failure::Usage(format!("unknown parameter `{name}` (expected t, u, s or g)"))),
            }
        }
        let config = WeylConfig {
            vars,
            degree_cap: self.degree_cap,
            omega,
            t_cap: Some(caps["t"]),
            u_cap: caps["u"],
            s_cap: caps["s"],
            g_cap: caps["g"],
            policy: if self.truncate { TruncationPolicy::Drop } else { TruncationPolicy::Error },
        };
        let manifest = RunManifest {
            command: command.to_string(),
            target,
            vars,
            degree_cap: self.degree_cap,
            omega: self.omega.as_ref().map(|p| p.display().to_string()),
            caps,
            s_order: self.s_order,
            tuple_len: self.tuple_len,
            seed: self.seed,
            truncate: self.truncate,
            a0: None,
            format: None,
            outputs: Vec::new(),
        };
        Ok((config, manifest))
    }
}
