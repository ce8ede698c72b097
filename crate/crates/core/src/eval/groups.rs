use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseGroup {
    Amplitude,
    Surface,
    Interval,
    Slope,
    Hpe,
}

impl BaseGroup {
    pub const MORPH: [BaseGroup; 4] = [
        BaseGroup::Amplitude,
        BaseGroup::Surface,
        BaseGroup::Interval,
        BaseGroup::Slope,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseGroup::Amplitude => "amplitude",
            BaseGroup::Surface => "surface",
            BaseGroup::Interval => "interval",
            BaseGroup::Slope => "slope",
            BaseGroup::Hpe => "hpe",
        }
    }

    /// Fixed descriptor columns; `None` for the Hermite coefficients, whose
    /// count depends on the basis.
    pub fn fixed_columns(self) -> Option<&'static [&'static str]> {
        match self {
            BaseGroup::Amplitude => Some(&["Pp", "Pn"]),
            BaseGroup::Surface => Some(&["ArP", "ArN", "Ar"]),
            BaseGroup::Interval => Some(&["No", "Ima", "Imi"]),
            BaseGroup::Slope => Some(&["S1", "S2"]),
            BaseGroup::Hpe => None,
        }
    }
}

/// A union of base feature groups, written `amplitude+surface`, `all`
/// (the four morphological groups) or `all+hpe`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureGroup(BTreeSet<BaseGroup>);

impl FeatureGroup {
    pub fn new(groups: impl IntoIterator<Item = BaseGroup>) -> Result<Self> {
        let set: BTreeSet<_> = groups.into_iter().collect();
        if set.is_empty() {
            return Err(Error::UnknownGroup(String::new()));
        }
        Ok(Self(set))
    }

    pub fn members(&self) -> impl Iterator<Item = BaseGroup> + '_ {
        self.0.iter().copied()
    }

    /// Column indices of this group in `table`, in group order.
    pub fn resolve(&self, table: &FeatureTable) -> Result<Vec<usize>> {
        let mut idx = Vec::new();
        for g in self.members() {
            match g.fixed_columns() {
                Some(cols) => {
                    for c in cols {
                        idx.push(table.column_index(c).ok_or_else(|| {
                            Error::Config(format!("feature table has no `{c}` column (group {})", g.name()))
                        })?);
                    }
                }
                None => {
                    let before = idx.len();
                    idx.extend(table.columns.iter().enumerate().filter_map(|(i, c)| {
                        let digits = c.strip_prefix('c')?;
                        (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then_some(i)
                    }));
                    if idx.len() == before {
                        return Err(Error::Config("feature table has no Hermite coefficient columns".into()));
                    }
                }
            }
        }
        Ok(idx)
    }
}

impl FromStr for FeatureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut set = BTreeSet::new();
        for part in s.split('+').map(str::trim) {
            match part {
                "amplitude" => set.insert(BaseGroup::Amplitude),
                "surface" => set.insert(BaseGroup::Surface),
                "interval" => set.insert(BaseGroup::Interval),
                "slope" => set.insert(BaseGroup::Slope),
                "hpe" => set.insert(BaseGroup::Hpe),
                "all" | "morph" => {
                    set.extend(BaseGroup::MORPH);
                    true
                }
                _ => return Err(Error::UnknownGroup(s.to_string())),
            };
        }
        Ok(Self(set))
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let all_morph = BaseGroup::MORPH.iter().all(|g| self.0.contains(g));
        let mut parts: Vec<&str> = Vec::new();
        if all_morph {
            parts.push("all");
        }
        for g in self.members() {
            if !(all_morph && g != BaseGroup::Hpe) {
                parts.push(g.name());
            }
        }
        f.write_str(&parts.join("+"))
    }
}

impl Serialize for FeatureGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FeatureGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The thirteen rows of the identification-rate table with the rates
/// published for them (percent).
pub fn table2_rows() -> Vec<(FeatureGroup, f64)> {
    [
        ("amplitude", 95.0),
        ("surface", 95.0),
        ("interval", 94.99),
        ("slope", 95.02),
        ("amplitude+surface", 95.91),
        ("surface+interval", 95.01),
        ("surface+slope", 95.0),
        ("amplitude+interval", 94.88),
        ("interval+slope", 95.0),
        ("amplitude+slope", 95.0),
        ("all", 96.45),
        ("hpe", 96.33),
        ("all+hpe", 98.97),
    ]
    .into_iter()
    .map(|(g, r)| (g.parse().expect("static group name"), r))
    .collect()
}
