pub mod bench;
pub mod check;
pub mod decompose;
pub mod gen;
pub mod reduce;
pub mod solve;

use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};
use num_traits::Zero;

use smc_core::{Rat, SmcInstance};

/// Parses a non-negative rational CLI argument (`p` or `p/q`).
pub fn parse_rat_arg(text: &str) -> Result<Rat> {
    let value = Rat::from_str(text).map_err(|e| anyhow::anyhow!("bad rational '{text}': {e}"))?;
    anyhow::ensure!(value >= Rat::zero(), "'{text}' must be non-negative");
    Ok(value)
}

pub fn read_instance(path: &Path) -> Result<SmcInstance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading instance {}", path.display()))?;
    Ok(smc_core::format::parse_instance(&text)?)
}

pub fn read_matching(path: &Path) -> Result<smc_core::FractionalMatching> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading matching {}", path.display()))?;
    Ok(smc_core::format::parse_matching(&text)?)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Enumeration cap: explicit flag, then the SMC_CAP environment variable,
/// then the built-in default.
pub fn effective_cap(flag: Option<usize>, default: usize) -> usize {
    if let Some(cap) = flag {
        return cap;
    }
    if let Ok(text) = std::env::var("SMC_CAP") {
        if let Ok(cap) = text.parse() {
            return cap;
        }
    }
    default
}
