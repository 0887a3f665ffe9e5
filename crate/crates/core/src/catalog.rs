//! Named permutation groups with their abelian normal subgroups and twist presets.

use crate::error::{Error, Result};
use crate::perm::{PermGroup, Permutation};
use crate::twist::TwistGroup;

/// Preset names accepted by [`preset`] for every `(G, T)`.
pub const STANDARD_PRESETS: [&str; 4] =
    ["trivial", "trivial-pi-over-Q", "conjugation-only", "full-over-Q"];

struct Definition {
    name: &'static str,
    aliases: &'static [&'static str],
    degree: usize,
    generators: &'static [&'static str],
    default_normal: &'static [&'static str],
}

const DEFINITIONS: [Definition; 8] = [
    Definition {
        name: "C2",
        aliases: &[],
        degree: 2,
        generators: &["(1 2)"],
        default_normal: &["(1 2)"],
    },
    Definition {
        name: "C3",
        aliases: &[],
        degree: 3,
        generators: &["(1 2 3)"],
        default_normal: &["(1 2 3)"],
    },
    Definition {
        name: "C4",
        aliases: &["C4-S4"],
        degree: 4,
        generators: &["(1 2 3 4)"],
        default_normal: &["(1 2 3 4)"],
    },
    Definition {
        name: "V4-regular",
        aliases: &["V4"],
        degree: 4,
        generators: &["(1 2)(3 4)", "(1 3)(2 4)"],
        default_normal: &["(1 2)(3 4)", "(1 3)(2 4)"],
    },
    Definition {
        name: "S3",
        aliases: &[],
        degree: 3,
        generators: &["(1 2 3)", "(1 2)"],
        default_normal: &["(1 2 3)"],
    },
    Definition {
        name: "D4",
        aliases: &[],
        degree: 4,
        generators: &["(1 2 3 4)", "(1 3)"],
        default_normal: &["(1 2 3 4)"],
    },
    Definition {
        name: "S4",
        aliases: &[],
        degree: 4,
        generators: &["(1 2 3 4)", "(1 2)"],
        default_normal: &["(1 2)(3 4)", "(1 3)(2 4)"],
    },
    Definition {
        name: "kluners",
        aliases: &["C3wrC2"],
        degree: 6,
        generators: &["(1 2 3)", "(1 4)(2 5)(3 6)"],
        default_normal: &["(1 2 3)", "(4 5 6)"],
    },
];

#[derive(Clone, Debug)]
pub struct NormalSubgroup {
    /// Generators in cycle notation joined by `,`, e.g. `(1 2 3),(4 5 6)`.
    pub label: String,
    pub group: PermGroup,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub group: PermGroup,
    /// Nontrivial abelian normal subgroups, smallest first.
    pub normals: Vec<NormalSubgroup>,
    /// Index into `normals` of the distinguished subgroup.
    pub default_normal: usize,
}

impl CatalogEntry {
    pub fn default_t(&self) -> &PermGroup {
        &self.normals[self.default_normal].group
    }

    /// Preset names valid for `t`.
    pub fn preset_names(&self, t: &PermGroup) -> Vec<&'static str> {
        let mut names = STANDARD_PRESETS.to_vec();
        if self.name == "kluners" && t == self.default_t() {
            names.extend(["kluners-split", "kluners-nonsplit"]);
        }
        names
    }

    pub fn presets(&self, t: &PermGroup) -> Result<Vec<(&'static str, TwistGroup)>> {
        self.preset_names(t)
            .into_iter()
            .map(|n| Ok((n, preset(n, &self.group, t)?)))
            .collect()
    }

    /// Finds a normal subgroup by label.
    pub fn normal(&self, label: &str) -> Option<&NormalSubgroup> {
        let wanted = label.replace(' ', "");
        self.normals.iter().find(|n| n.label.replace(' ', "") == wanted)
    }
}

fn label(gens: &[Permutation]) -> String {
    if gens.is_empty() {
        return "()".into();
    }
    gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(",")
}

fn build(def: &Definition) -> Result<CatalogEntry> {
    let group = PermGroup::from_cycles(def.degree, def.generators)?;
    let distinguished = PermGroup::from_cycles(def.degree, def.default_normal)?;
    let normals: Vec<NormalSubgroup> = group
        .normal_subgroups_abelian()?
        .into_iter()
        .filter(|h| !h.is_trivial())
        .map(|h| {
            let h = if h == distinguished { distinguished.clone() } else { h };
            NormalSubgroup {
                label: label(h.generators()),
                group: h,
            }
        })
        .collect();
    let default_normal = normals
        .iter()
        .position(|n| n.group == distinguished)
        .ok_or_else(|| Error::InvalidFamily(format!("{}: distinguished subgroup is not abelian normal", def.name)))?;
    Ok(CatalogEntry {
        name: def.name.into(),
        group,
        normals,
        default_normal,
    })
}

pub fn names() -> Vec<&'static str> {
    DEFINITIONS.iter().map(|d| d.name).collect()
}

/// Looks up a group by name or alias, case-insensitively.
pub fn lookup(name: &str) -> Option<Result<CatalogEntry>> {
    DEFINITIONS
        .iter()
        .find(|d| d.name.eq_ignore_ascii_case(name) || d.aliases.iter().any(|a| a.eq_ignore_ascii_case(name)))
        .map(build)
}

pub fn entries() -> Result<Vec<CatalogEntry>> {
    DEFINITIONS.iter().map(build).collect()
}

/// Builds a named twist group for `t ⊴ g`, with exponent `exponent(t)`.
pub fn preset(name: &str, g: &PermGroup, t: &PermGroup) -> Result<TwistGroup> {
    let e = t.exponent();
    let n = g.degree();
    match name {
        "trivial" => TwistGroup::trivial(n, e),
        "trivial-pi-over-Q" => TwistGroup::trivial_pi_over_q(n, e),
        "conjugation-only" => TwistGroup::conjugation_only(g, e),
        "full-over-Q" => TwistGroup::full_over_q(g, e),
        "kluners-split" | "kluners-nonsplit" => {
            let gamma = if name == "kluners-split" {
                TwistGroup::kluners_split()
            } else {
                TwistGroup::kluners_nonsplit()
            };
            if gamma.degree() != n || e != 3 {
                return Err(Error::InvalidFamily(format!("{name} needs T = C3² in degree 6")));
            }
            Ok(gamma)
        }
        other => Err(Error::Parse {
            what: "action preset",
            detail: format!("unknown preset {other:?}"),
        }),
    }
}

/// Every `(group, T, preset)` triple in the catalog.
pub fn cases() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for entry in entries()? {
        for n in &entry.normals {
            for (preset, gamma) in entry.presets(&n.group)? {
                out.push(Case {
                    group: entry.name.clone(),
                    normal: n.label.clone(),
                    preset,
                    t: n.group.clone(),
                    gamma,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Case {
    pub group: String,
    pub normal: String,
    pub preset: &'static str,
    pub t: PermGroup,
    pub gamma: TwistGroup,
}
