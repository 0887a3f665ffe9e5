//! `key = value` configuration files, mirrored onto `MALLE_*` environment
//! variables so that flags, then the environment, then the file take effect.

use std::path::Path;

use crate::error::CliError;

pub const ENV_PREFIX: &str = "MALLE_";

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// values may be wrapped in double quotes.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::validation(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim().to_ascii_lowercase().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::validation(format!("config line {}: empty key", i + 1)));
        }
        let value = value.trim();
        let value = value
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .unwrap_or(value);
        out.push((key, value.to_string()));
    }
    Ok(out)
}

/// `prime-bound` becomes `MALLE_PRIME_BOUND`.
pub fn env_name(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.to_ascii_uppercase().replace('-', "_"))
}

/// Finds `--config <path>` or `--config=<path>` in raw arguments, falling back
/// to `MALLE_CONFIG`.
pub fn locate(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    std::env::var(env_name("config")).ok()
}

/// Exports each entry as an environment variable unless already set.
pub fn apply(path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::resolution(format!("config file {}: {e}", path.display())))?;
    for (key, value) in parse(&text)? {
        let name = env_name(&key);
        if std::env::var_os(&name).is_none() {
            std::env::set_var(name, value);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs() {
        let text = "# comment\nprime-bound = 1000\n\ngroup=\"V4\"\nPER_DECADE = 4\n";
        let pairs = parse(text).unwrap();
        assert_eq!(
            pairs,
            vec![
                ("prime-bound".into(), "1000".into()),
                ("group".into(), "V4".into()),
                ("per-decade".into(), "4".into()),
            ]
        );
        assert_eq!(env_name("prime-bound"), "MALLE_PRIME_BOUND");
    }

    #[test]
    fn rejects_lines_without_equals() {
        assert_eq!(parse("oops").unwrap_err().code, 3);
    }

    #[test]
    fn locates_flag_forms() {
        let args = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(locate(&args(&["malle", "--config", "a.cfg"])), Some("a.cfg".into()));
        assert_eq!(locate(&args(&["malle", "--config=b.cfg", "count"])), Some("b.cfg".into()));
    }
}
