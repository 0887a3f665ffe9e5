//! Turns command-line references into groups, subgroups and twist groups.
//! A reference is a catalog name, a preset name, a JSON file, or inline
//! cycle notation.

use std::path::Path;

use malle_core::catalog::{self, CatalogEntry};
use malle_core::perm::{GroupSpec, PermGroup};
use malle_core::selmer::FiniteAbelianGroup;
use malle_core::twist::{TwistGroup, TwistSpec};
use serde::de::DeserializeOwned;

use crate::error::CliError;

pub const DEFAULT_ACTION: &str = "trivial-pi-over-Q";

/// Reads and deserializes a JSON file; a missing file is a resolution error.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::resolution(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn looks_like_path(s: &str) -> bool {
    s.ends_with(".json") || s.contains('/') || Path::new(s).is_file()
}

#[derive(Debug)]
pub struct ResolvedGroup {
    pub name: String,
    pub group: PermGroup,
    pub entry: Option<CatalogEntry>,
}

pub fn group(reference: &str) -> Result<ResolvedGroup, CliError> {
    if let Some(entry) = catalog::lookup(reference) {
        let entry = entry?;
        return Ok(ResolvedGroup {
            name: entry.name.clone(),
            group: entry.group.clone(),
            entry: Some(entry),
        });
    }
    if looks_like_path(reference) {
        let spec: GroupSpec = read_json(Path::new(reference))?;
        return Ok(ResolvedGroup {
            name: reference.to_string(),
            group: PermGroup::from_spec(&spec)?,
            entry: None,
        });
    }
    Err(CliError::resolution(format!(
        "unknown group {reference:?}; catalog names: {}",
        catalog::names().join(", ")
    )))
}

/// Splits `(1 2 3),(4 5 6)` into generator strings.
fn split_generators(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect()
}

fn cycles_group(degree: usize, s: &str) -> Result<PermGroup, CliError> {
    Ok(PermGroup::from_cycles(degree, &split_generators(s))?)
}

/// The abelian normal subgroup `T`: the catalog default, the whole group when
/// it is abelian, a catalog label, inline generators, or a group file.
pub fn normal(g: &ResolvedGroup, reference: Option<&str>) -> Result<(String, PermGroup), CliError> {
    let t = match reference {
        None => match &g.entry {
            Some(e) => return Ok((e.normals[e.default_normal].label.clone(), e.default_t().clone())),
            None if g.group.is_abelian() => g.group.clone(),
            None => {
                return Err(CliError::validation(
                    "group is not abelian; pass --normal with generators of T",
                ))
            }
        },
        Some(r) => {
            if let Some(n) = g.entry.as_ref().and_then(|e| e.normal(r)) {
                return Ok((n.label.clone(), n.group.clone()));
            }
            if r.trim_start().starts_with('(') {
                cycles_group(g.group.degree(), r)?
            } else if looks_like_path(r) {
                let spec: GroupSpec = read_json(Path::new(r))?;
                PermGroup::from_spec(&spec)?
            } else {
                return Err(CliError::resolution(format!("unknown normal subgroup {r:?}")));
            }
        }
    };
    if t.degree() != g.group.degree() {
        return Err(CliError::validation("T and G act on different degrees"));
    }
    if !t.is_abelian() {
        return Err(CliError::validation("T is not abelian"));
    }
    if !t.is_normal_in(&g.group) {
        return Err(CliError::validation("T is not normal in G"));
    }
    let label = t.generators().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
    Ok((label, t))
}

/// A preset name or a twist file in `{exponent, pairs}` form.
pub fn action(reference: Option<&str>, g: &PermGroup, t: &PermGroup) -> Result<(String, TwistGroup), CliError> {
    let reference = reference.unwrap_or(DEFAULT_ACTION);
    let gamma = if catalog::STANDARD_PRESETS.contains(&reference) || reference.starts_with("kluners-") {
        catalog::preset(reference, g, t)?
    } else if looks_like_path(reference) {
        let spec: TwistSpec = read_json(Path::new(reference))?;
        TwistGroup::from_spec(g.degree(), &spec)?
    } else {
        return Err(CliError::resolution(format!(
            "unknown action {reference:?}; presets: {}, kluners-split, kluners-nonsplit",
            catalog::STANDARD_PRESETS.join(", ")
        )));
    };
    gamma.check_normalizes(t)?;
    Ok((reference.to_string(), gamma))
}

/// Abelian targets: `C4`, `V4`, `C2xC6`, `2,6` or `[2,6]`, normalized to
/// invariant factors.
pub fn abelian(reference: &str) -> Result<FiniteAbelianGroup, CliError> {
    let r = reference.trim();
    let orders: Vec<u64> = if r.eq_ignore_ascii_case("V4") || r.eq_ignore_ascii_case("V4-regular") {
        vec![2, 2]
    } else {
        let body = r.trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<&str> = if body.contains(',') {
            body.split(',').collect()
        } else {
            body.split(['x', 'X', '*']).collect()
        };
        parts
            .into_iter()
            .map(|p| {
                let p = p.trim();
                let digits = p.strip_prefix('C').or_else(|| p.strip_prefix('c')).unwrap_or(p);
                digits.parse::<u64>().ok().filter(|&n| n >= 1)
            })
            .collect::<Option<_>>()
            .ok_or_else(|| CliError::resolution(format!("unknown abelian group {reference:?}")))?
    };
    Ok(FiniteAbelianGroup::new(invariant_factors(&orders))?)
}

/// Invariant factors of `⊕ ℤ/n_i`.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut powers: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &n in orders {
        let mut m = n;
        let mut p = 2;
        while m > 1 {
            if p * p > m {
                p = m;
            }
            if m % p == 0 {
                let mut q = 1;
                while m % p == 0 {
                    m /= p;
                    q *= p;
                }
                powers.entry(p).or_default().push(q);
            }
            p += 1;
        }
    }
    let rank = powers.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; rank];
    for qs in powers.values_mut() {
        qs.sort_unstable();
        let offset = rank - qs.len();
        for (i, q) in qs.iter().enumerate() {
            out[offset + i] *= q;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_factor_normalization() {
        assert_eq!(invariant_factors(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors(&[6, 4]), vec![2, 12]);
        assert_eq!(invariant_factors(&[2, 2, 2]), vec![2, 2, 2]);
        assert_eq!(invariant_factors(&[1]), Vec::<u64>::new());
        assert_eq!(invariant_factors(&[9, 3, 5]), vec![3, 45]);
    }

    #[test]
    fn abelian_spellings() {
        let f = |s: &str| abelian(s).unwrap().invariant_factors().to_vec();
        assert_eq!(f("C2"), vec![2]);
        assert_eq!(f("V4"), vec![2, 2]);
        assert_eq!(f("C2xC3"), vec![6]);
        assert_eq!(f("2,2"), vec![2, 2]);
        assert_eq!(f("[3,3]"), vec![3, 3]);
        assert_eq!(abelian("A5").unwrap_err().code, 2);
    }

    #[test]
    fn catalog_resolution() {
        let g = group("kluners").unwrap();
        let (label, t) = normal(&g, None).unwrap();
        assert_eq!(t.order(), 9);
        assert_eq!(label, "(1 2 3),(4 5 6)");
        assert!(action(Some("kluners-split"), &g.group, &t).is_ok());
        assert_eq!(action(Some("nope"), &g.group, &t).unwrap_err().code, 2);
        assert_eq!(group("A7").unwrap_err().code, 2);
    }

    #[test]
    fn inline_normal_is_checked() {
        let g = group("S4").unwrap();
        assert_eq!(normal(&g, Some("(1 2)")).unwrap_err().code, 3);
        let (_, t) = normal(&g, Some("(1 2)(3 4), (1 3)(2 4)")).unwrap();
        assert_eq!(t.order(), 4);
    }
}
