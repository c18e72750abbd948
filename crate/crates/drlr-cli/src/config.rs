//! Key = value configuration files and the flag-over-file resolution rule.
//!
//! A config file holds one `key = value` pair per line; `#` starts a
//! comment. Keys are spelled like the long flags (either `train-size` or
//! `train_size`). Command line flags always win over file entries, which
//! win over built-in defaults.

use crate::error::{CliError, CliResult};
use drlr::data::BetaTrue;
use drlr::norms::NormKind;
use drlr::types::Kappa;
use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default)]
pub struct FileConfig {
    entries: HashMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl FileConfig {
    pub fn empty() -> FileConfig {
        FileConfig::default()
    }

    pub fn load(path: &Path) -> CliResult<FileConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "config {} line {}: expected `key = value`, got {raw:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            entries.insert(normalize(key), value.trim().to_string());
        }
        Ok(FileConfig { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(|s| s.as_str())
    }

    /// Flag wins, then the file entry, then the default.
    pub fn resolve<T: FromStr + Clone>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> CliResult<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|_| CliError::usage(format!("config key `{key}`: cannot parse {raw:?}"))),
            None => Ok(default),
        }
    }

    /// Like `resolve` for values that need a custom parser.
    pub fn resolve_with<T>(
        &self,
        flag: Option<&str>,
        key: &str,
        default: T,
        parse: impl Fn(&str) -> CliResult<T>,
    ) -> CliResult<T> {
        match flag.or_else(|| self.get(key)) {
            Some(raw) => parse(raw),
            None => Ok(default),
        }
    }

    /// A string-valued setting with no default.
    pub fn resolve_path(&self, flag: Option<&Path>, key: &str) -> Option<std::path::PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| self.get(key).map(std::path::PathBuf::from))
    }

    /// Flag, then the file entry, then `None`.
    pub fn resolve_optional<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::usage(format!("config key `{key}`: cannot parse {raw:?}"))),
            None => Ok(None),
        }
    }
}

pub fn parse_norm(s: &str) -> CliResult<NormKind> {
    match s.trim().to_ascii_lowercase().as_str() {
        "l1" | "1" => Ok(NormKind::L1),
        "l2" | "2" => Ok(NormKind::L2),
        "linf" | "inf" | "max" => Ok(NormKind::Linf),
        other => Err(CliError::usage(format!(
            "unknown norm {other:?}: expected l1, l2, or linf"
        ))),
    }
}

pub fn parse_kappa(s: &str) -> CliResult<Kappa> {
    let t = s.trim().to_ascii_lowercase();
    if t == "inf" || t == "infinity" {
        return Ok(Kappa::Infinite);
    }
    let v: f64 = t
        .parse()
        .map_err(|_| CliError::usage(format!("kappa: cannot parse {s:?}")))?;
    Kappa::new(v).map_err(CliError::from)
}

/// `sphere`, `spike`, or an explicit comma-separated vector.
pub fn parse_beta(s: &str) -> CliResult<BetaTrue> {
    match s.trim().to_ascii_lowercase().as_str() {
        "sphere" => Ok(BetaTrue::UniformSphere),
        "spike" => Ok(BetaTrue::FirstAxis10),
        _ => {
            let vals: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
            match vals {
                Ok(v) if !v.is_empty() => Ok(BetaTrue::Explicit(v)),
                _ => Err(CliError::usage(format!(
                    "beta: expected `sphere`, `spike`, or comma-separated numbers, got {s:?}"
                ))),
            }
        }
    }
}

/// Radius grids: either an explicit comma-separated list or
/// `log:<lo>:<hi>:<count>` for a logarithmic sweep.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::usage(format!(
                "grid: expected log:<lo>:<hi>:<count>, got {s:?}"
            )));
        }
        let lo: f64 = parts[0]
            .parse()
            .map_err(|_| CliError::usage(format!("grid lo: cannot parse {:?}", parts[0])))?;
        let hi: f64 = parts[1]
            .parse()
            .map_err(|_| CliError::usage(format!("grid hi: cannot parse {:?}", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| CliError::usage(format!("grid count: cannot parse {:?}", parts[2])))?;
        if !(lo > 0.0 && hi > lo && count >= 2) {
            return Err(CliError::usage(
                "grid: need 0 < lo < hi and count >= 2".to_string(),
            ));
        }
        let step = (hi / lo).ln() / (count - 1) as f64;
        return Ok((0..count).map(|i| lo * (step * i as f64).exp()).collect());
    }
    let vals: Result<Vec<f64>, _> = t.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match vals {
        Ok(mut v) if !v.is_empty() => {
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(CliError::usage(
                    "grid: radii must be finite and >= 0".to_string(),
                ));
            }
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v.dedup();
            Ok(v)
        }
        _ => Err(CliError::usage(format!(
            "grid: expected comma-separated radii or log:<lo>:<hi>:<count>, got {s:?}"
        ))),
    }
}

pub fn parse_usize_list(s: &str) -> CliResult<Vec<usize>> {
    let vals: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match vals {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::usage(format!(
            "expected a comma-separated list of positive integers, got {s:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_entries_parse_and_normalize() {
        let dir = std::env::temp_dir().join("drlr_cli_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(
            &path,
            "train-size = 25 # comment\n\n# full line\nepsilon=0.25\n",
        )
        .unwrap();
        let cfg = FileConfig::load(&path).unwrap();
        assert_eq!(cfg.get("train_size"), Some("25"));
        assert_eq!(cfg.resolve::<f64>(None, "epsilon", 0.0).unwrap(), 0.25);
        assert_eq!(cfg.resolve::<f64>(Some(0.5), "epsilon", 0.0).unwrap(), 0.5);
        assert_eq!(cfg.resolve::<u64>(None, "absent", 7).unwrap(), 7);
    }

    #[test]
    fn malformed_config_lines_are_rejected() {
        let dir = std::env::temp_dir().join("drlr_cli_cfg_bad");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.cfg");
        std::fs::write(&path, "no equals sign here\n").unwrap();
        assert!(FileConfig::load(&path).is_err());
    }

    #[test]
    fn grids_parse_both_forms() {
        let explicit = parse_grid("0.1, 0.0, 0.1").unwrap();
        assert_eq!(explicit, vec![0.0, 0.1]);
        let log = parse_grid("log:0.001:1:4").unwrap();
        assert_eq!(log.len(), 4);
        assert!((log[0] - 0.001).abs() < 1e-12 && (log[3] - 1.0).abs() < 1e-12);
        assert!(parse_grid("log:1:0.5:4").is_err());
        assert!(parse_grid("-0.1").is_err());
    }

    #[test]
    fn scalar_parsers_cover_the_spellings() {
        assert_eq!(parse_norm("LINF").unwrap(), NormKind::Linf);
        assert!(parse_norm("l3").is_err());
        assert!(parse_kappa("inf").unwrap().is_infinite());
        assert_eq!(parse_kappa("0.5").unwrap(), Kappa::Finite(0.5));
        assert!(parse_kappa("-1").is_err());
        assert_eq!(parse_beta("spike").unwrap(), BetaTrue::FirstAxis10);
        assert_eq!(
            parse_beta("1.0, -2").unwrap(),
            BetaTrue::Explicit(vec![1.0, -2.0])
        );
    }
}
