//! Normalization of free-text user locations against a hand-curated
//! gazetteer, and aggregation of fine regions into supra-regions.
//!
//! Lookups fold case, diacritics, and whitespace. A raw string first gets
//! an exact match; failing that, its comma-separated components are tried
//! left to right, preferring a component that maps to a specific region
//! over one that maps to the country-level bucket. Strings that match
//! nothing, or only ambiguous gazetteer keys, stay unmapped; nothing is
//! guessed.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use log::warn;
use thiserror::Error;

/// Coarse geographic buckets. `Italy` is the country-generic bucket for
/// locations naming the country without a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SupraRegion {
    North,
    Centre,
    South,
    Islands,
    Italy,
}

impl SupraRegion {
    pub fn as_str(self) -> &'static str {
        match self {
            SupraRegion::North => "North",
            SupraRegion::Centre => "Centre",
            SupraRegion::South => "South",
            SupraRegion::Islands => "Islands",
            SupraRegion::Italy => "Italy",
        }
    }

    pub const ALL: [SupraRegion; 5] = [
        SupraRegion::North,
        SupraRegion::Centre,
        SupraRegion::South,
        SupraRegion::Islands,
        SupraRegion::Italy,
    ];
}

impl std::fmt::Display for SupraRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SupraRegion {
    type Err = String;

    /// Accepts the sub-division labels `North East` and `North West` as
    /// `North`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match fold_key(s).as_str() {
            "north" | "nord" | "north east" | "north west" | "north-east" | "north-west"
            | "northeast" | "northwest" => Ok(SupraRegion::North),
            "centre" | "center" | "central" | "centro" => Ok(SupraRegion::Centre),
            "south" | "sud" => Ok(SupraRegion::South),
            "islands" | "isole" => Ok(SupraRegion::Islands),
            "italy" | "italia" => Ok(SupraRegion::Italy),
            other => Err(format!("unknown supra-region `{other}`")),
        }
    }
}

/// Outcome of normalizing one raw location string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizedLocation {
    Mapped { fine: String, supra: SupraRegion },
    Unmapped,
}

impl NormalizedLocation {
    pub fn fine(&self) -> Option<&str> {
        match self {
            NormalizedLocation::Mapped { fine, .. } => Some(fine),
            NormalizedLocation::Unmapped => None,
        }
    }

    pub fn supra(&self) -> Option<SupraRegion> {
        match self {
            NormalizedLocation::Mapped { supra, .. } => Some(*supra),
            NormalizedLocation::Unmapped => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("unknown fine region `{region}`")]
    UnknownRegion { region: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum GazEntry {
    Fine(String),
    Ambiguous,
}

/// Gazetteer plus the fine-to-supra mapping, validated so every gazetteer
/// target is a known fine region.
#[derive(Debug, Clone)]
pub struct RegionHierarchy {
    gazetteer: HashMap<String, GazEntry>,
    // folded fine id → (display id, supra)
    fine: BTreeMap<String, (String, SupraRegion)>,
}

/// Folds a location string for lookup: lowercase, common Latin diacritics
/// stripped, typographic apostrophes normalized, whitespace collapsed.
pub fn fold_key(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for c in raw.chars().flat_map(char::to_lowercase) {
        let c = match c {
            'à' | 'á' | 'â' | 'ã' | 'ä' | 'å' => 'a',
            'è' | 'é' | 'ê' | 'ë' => 'e',
            'ì' | 'í' | 'î' | 'ï' => 'i',
            'ò' | 'ó' | 'ô' | 'õ' | 'ö' => 'o',
            'ù' | 'ú' | 'û' | 'ü' => 'u',
            'ç' => 'c',
            'ñ' => 'n',
            '\u{2019}' => '\'',
            other => other,
        };
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space {
            if !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
        }
        out.push(c);
    }
    out
}

impl RegionHierarchy {
    /// Builds the hierarchy from `(raw, fine)` gazetteer rows and
    /// `(fine, supra)` region rows. Gazetteer keys folding to the same
    /// string but naming different regions become ambiguous and resolve
    /// to unmapped at lookup time.
    pub fn from_rows(
        gazetteer_rows: &[(String, String)],
        fine_rows: &[(String, SupraRegion)],
    ) -> Result<Self, GeoError> {
        let mut fine = BTreeMap::new();
        for (id, supra) in fine_rows {
            let folded = fold_key(id);
            if fine.insert(folded.clone(), (id.clone(), *supra)).is_some() {
                return Err(GeoError::UnknownRegion {
                    region: format!("duplicate fine region `{id}`"),
                });
            }
        }

        let mut gazetteer: HashMap<String, GazEntry> = HashMap::new();
        for (raw, target) in gazetteer_rows {
            let target_folded = fold_key(target);
            if !fine.contains_key(&target_folded) {
                return Err(GeoError::UnknownRegion {
                    region: target.clone(),
                });
            }
            let key = fold_key(raw);
            match gazetteer.get(&key) {
                None => {
                    gazetteer.insert(key, GazEntry::Fine(target_folded));
                }
                Some(GazEntry::Fine(existing)) if *existing != target_folded => {
                    warn!("gazetteer key `{key}` is ambiguous; it will not map");
                    gazetteer.insert(key, GazEntry::Ambiguous);
                }
                Some(_) => {}
            }
        }
        Ok(RegionHierarchy { gazetteer, fine })
    }

    pub fn load(gazetteer_path: &Path, fine_path: &Path) -> Result<Self, GeoError> {
        let fine_rows = read_tsv_rows(fine_path)?
            .into_iter()
            .map(|(line, id, supra)| {
                supra
                    .parse::<SupraRegion>()
                    .map(|s| (id, s))
                    .map_err(|reason| GeoError::Parse {
                        path: fine_path.display().to_string(),
                        line,
                        reason,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let gazetteer_rows = read_tsv_rows(gazetteer_path)?
            .into_iter()
            .map(|(_, raw, fine)| (raw, fine))
            .collect::<Vec<_>>();
        Self::from_rows(&gazetteer_rows, &fine_rows)
    }

    /// Display ids of all fine regions, in folded-id order.
    pub fn fine_regions(&self) -> impl Iterator<Item = &str> {
        self.fine.values().map(|(id, _)| id.as_str())
    }

    /// Supra-region of a fine region id (folded for lookup).
    pub fn supra_of(&self, fine: &str) -> Result<SupraRegion, GeoError> {
        self.fine
            .get(&fold_key(fine))
            .map(|(_, supra)| *supra)
            .ok_or_else(|| GeoError::UnknownRegion {
                region: fine.to_string(),
            })
    }

    fn resolve(&self, key: &str) -> Option<&GazEntry> {
        self.gazetteer.get(key)
    }

    fn mapped(&self, fine_folded: &str) -> NormalizedLocation {
        let (display, supra) = &self.fine[fine_folded];
        NormalizedLocation::Mapped {
            fine: display.clone(),
            supra: *supra,
        }
    }

    /// Normalizes one raw location string. Exact folded lookup first,
    /// then comma components left to right with specific regions
    /// preferred over the country bucket. Ambiguous keys warn and stay
    /// unmapped.
    pub fn normalize_location(&self, raw: &str) -> NormalizedLocation {
        let folded = fold_key(raw);
        if folded.is_empty() {
            return NormalizedLocation::Unmapped;
        }
        match self.resolve(&folded) {
            Some(GazEntry::Fine(fine)) => return self.mapped(fine),
            Some(GazEntry::Ambiguous) => {
                warn!("location `{raw}` matches an ambiguous gazetteer key");
                return NormalizedLocation::Unmapped;
            }
            None => {}
        }

        let mut generic_hit: Option<&str> = None;
        let mut saw_ambiguous = false;
        for component in folded.split(',') {
            let component = component.trim();
            if component.is_empty() {
                continue;
            }
            match self.resolve(component) {
                Some(GazEntry::Fine(fine)) => {
                    let (_, supra) = &self.fine[fine];
                    if *supra == SupraRegion::Italy {
                        generic_hit.get_or_insert(fine);
                    } else {
                        return self.mapped(fine);
                    }
                }
                Some(GazEntry::Ambiguous) => saw_ambiguous = true,
                None => {}
            }
        }
        if let Some(fine) = generic_hit {
            return self.mapped(fine);
        }
        if saw_ambiguous {
            warn!("location `{raw}` matches only ambiguous gazetteer keys");
        }
        NormalizedLocation::Unmapped
    }
}

type TsvRow = (usize, String, String);

fn read_tsv_rows(path: &Path) -> Result<Vec<TsvRow>, GeoError> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|e| GeoError::Io {
        path: display.clone(),
        source: e,
    })?;
    let mut rows = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| GeoError::Io {
            path: display.clone(),
            source: e,
        })?;
        if line.trim().is_empty() || line.starts_with("# ") {
            continue;
        }
        let (left, right) = line.split_once('\t').ok_or_else(|| GeoError::Parse {
            path: display.clone(),
            line: idx + 1,
            reason: "expected two tab-separated columns".into(),
        })?;
        rows.push((idx + 1, left.trim().to_string(), right.trim().to_string()));
    }
    Ok(rows)
}
