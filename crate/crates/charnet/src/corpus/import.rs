//! Import adapter for externally published annotation layouts.
//!
//! The published releases of scene-annotated series do not follow the
//! canonical directory layout of this crate, so the adapter maps arbitrary
//! delimited files onto it through a declarative [`ImportSpec`]: per file,
//! which column holds which field, how participants are separated, and how
//! panels are numbered. The mapping is ordinary JSON and can be adjusted
//! to a concrete release without touching code.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    ArcRecord, ArcTypeLabel, Character, Corpus, CorpusError, PanelSpan, Scene, Series, Sex, Volume,
};

/// Reference to a column, by header name or zero-based position.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Name(String),
    Index(usize),
}

/// How panel coordinates are expressed in the source scene table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelNumbering {
    /// Panel indices already run through the whole volume.
    VolumeGlobal,
    /// Panel indices restart on every page; a page table with per-page
    /// panel counts is required to rebase them.
    PerPage,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterColumns {
    pub file: String,
    pub id: ColumnRef,
    pub name: Option<ColumnRef>,
    pub sex: ColumnRef,
    /// Mapping from source sex labels to F|M|X|U; keys are matched
    /// case-insensitively. Missing labels fall back to U.
    #[serde(default)]
    pub sex_values: HashMap<String, String>,
    pub named: Option<ColumnRef>,
    pub collective: Option<ColumnRef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeColumns {
    pub file: String,
    pub id: ColumnRef,
    pub title: Option<ColumnRef>,
    /// Publication order; when absent, file order is used.
    pub order: Option<ColumnRef>,
    pub pages: Option<ColumnRef>,
    pub panels: Option<ColumnRef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneColumns {
    pub file: String,
    pub id: Option<ColumnRef>,
    pub volume: ColumnRef,
    pub start_page: ColumnRef,
    pub start_panel: ColumnRef,
    pub end_page: ColumnRef,
    pub end_panel: ColumnRef,
    pub participants: ColumnRef,
    #[serde(default = "default_participant_separator")]
    pub participant_separator: String,
}

fn default_participant_separator() -> String {
    ",".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PageColumns {
    pub file: String,
    pub volume: ColumnRef,
    pub page: ColumnRef,
    pub panel_count: ColumnRef,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImportSpec {
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    pub characters: CharacterColumns,
    pub volumes: VolumeColumns,
    pub scenes: SceneColumns,
    pub pages: Option<PageColumns>,
    pub panel_numbering: PanelNumbering,
    /// Values of boolean-ish source columns treated as true.
    #[serde(default = "default_true_values")]
    pub true_values: Vec<String>,
}

fn default_delimiter() -> char {
    ','
}

fn default_true_values() -> Vec<String> {
    vec!["1", "true", "TRUE", "True", "yes", "y"]
        .into_iter()
        .map(String::from)
        .collect()
}

struct Table {
    header: HashMap<String, usize>,
    rows: Vec<Vec<String>>,
    path: String,
}

impl Table {
    fn read(dir: &Path, file: &str, delimiter: char) -> Result<Table, CorpusError> {
        let path = dir.join(file);
        if !path.is_file() {
            return Err(CorpusError::MissingFile(path.display().to_string()));
        }
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter as u8)
            .has_headers(true)
            .flexible(true)
            .from_path(&path)
            .map_err(|e| CorpusError::Malformed {
                file: path.display().to_string(),
                line: 0,
                message: e.to_string(),
            })?;
        let header: HashMap<String, usize> = reader
            .headers()
            .map_err(|e| CorpusError::Malformed {
                file: path.display().to_string(),
                line: 1,
                message: e.to_string(),
            })?
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_string(), i))
            .collect();
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CorpusError::Malformed {
                file: path.display().to_string(),
                line: i + 2,
                message: e.to_string(),
            })?;
            rows.push(record.iter().map(|f| f.trim().to_string()).collect());
        }
        Ok(Table {
            header,
            rows,
            path: path.display().to_string(),
        })
    }

    fn column(&self, r: &ColumnRef) -> Result<usize, CorpusError> {
        match r {
            ColumnRef::Index(i) => Ok(*i),
            ColumnRef::Name(n) => self.header.get(n.as_str()).copied().ok_or_else(|| {
                CorpusError::Malformed {
                    file: self.path.clone(),
                    line: 1,
                    message: format!("no column named `{n}`"),
                }
            }),
        }
    }

    fn get<'a>(&'a self, row: &'a [String], col: usize, line: usize) -> Result<&'a str, CorpusError> {
        row.get(col).map(|s| s.as_str()).ok_or_else(|| CorpusError::Malformed {
            file: self.path.clone(),
            line,
            message: format!("row has no column {col}"),
        })
    }
}

/// Source identifiers are often display names and can contain the
/// separator characters of the canonical format; those become spaces,
/// applied consistently everywhere the identifier is referenced.
fn sanitize_token(raw: &str) -> String {
    let mut out: String = raw
        .chars()
        .map(|c| if matches!(c, '\t' | ',' | '\n' | '\r') { ' ' } else { c })
        .collect();
    out = out.split_whitespace().collect::<Vec<_>>().join(" ");
    out
}

fn sanitize_text(raw: &str) -> String {
    raw.chars()
        .map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c })
        .collect()
}

fn parse_sex(raw: &str, mapping: &HashMap<String, String>) -> Sex {
    let mapped = mapping
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case(raw))
        .map(|(_, v)| v.as_str());
    let token = mapped.unwrap_or(raw);
    match token.to_ascii_uppercase().as_str() {
        "F" | "FEMALE" => Sex::Female,
        "M" | "MALE" => Sex::Male,
        "X" | "MIXED" => Sex::Mixed,
        _ => Sex::Unknown,
    }
}

/// Infers the spinoff series from conventional volume-id prefixes
/// (`K` = antagonist spinoff, `L` = daughter spinoff, `J` = youth spinoff,
/// digits = main series).
pub fn infer_series(volume_id: &str) -> Series {
    match volume_id.chars().next() {
        Some('K') | Some('k') => Series::Kriss,
        Some('L') | Some('l') => Series::Louve,
        Some('J') | Some('j') => Series::YoungThorgal,
        Some(c) if c.is_ascii_digit() => Series::Main,
        _ => Series::Other,
    }
}

/// Imports a published dataset directory into a validated corpus using the
/// supplied column mapping. When the source numbers panels per page, the
/// page table is used to rebase them to volume-global indices.
pub fn import_corpus(dir: &Path, spec: &ImportSpec) -> Result<Corpus, CorpusError> {
    let truthy = |v: &str| spec.true_values.iter().any(|t| t == v);

    let table = Table::read(dir, &spec.characters.file, spec.delimiter)?;
    let id_col = table.column(&spec.characters.id)?;
    let name_col = spec
        .characters
        .name
        .as_ref()
        .map(|c| table.column(c))
        .transpose()?;
    let sex_col = table.column(&spec.characters.sex)?;
    let named_col = spec
        .characters
        .named
        .as_ref()
        .map(|c| table.column(c))
        .transpose()?;
    let collective_col = spec
        .characters
        .collective
        .as_ref()
        .map(|c| table.column(c))
        .transpose()?;
    let mut characters = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        let line = i + 2;
        let id = sanitize_token(table.get(row, id_col, line)?);
        let name = match name_col {
            Some(c) => {
                let n = table.get(row, c, line)?;
                if n.is_empty() {
                    None
                } else {
                    Some(sanitize_text(n))
                }
            }
            None => None,
        };
        let sex = parse_sex(table.get(row, sex_col, line)?, &spec.characters.sex_values);
        let named = match named_col {
            Some(c) => truthy(table.get(row, c, line)?),
            None => name.is_some(),
        };
        let collective = match collective_col {
            Some(c) => truthy(table.get(row, c, line)?),
            None => sex == Sex::Mixed,
        };
        characters.push(Character {
            id,
            name,
            named,
            sex,
            collective,
        });
    }

    let table = Table::read(dir, &spec.volumes.file, spec.delimiter)?;
    let id_col = table.column(&spec.volumes.id)?;
    let title_col = spec
        .volumes
        .title
        .as_ref()
        .map(|c| table.column(c))
        .transpose()?;
    let order_col = spec
        .volumes
        .order
        .as_ref()
        .map(|c| table.column(c))
        .transpose()?;
    let pages_col = spec
        .volumes
        .pages
        .as_ref()
        .map(|c| table.column(c))
        .transpose()?;
    let panels_col = spec
        .volumes
        .panels
        .as_ref()
        .map(|c| table.column(c))
        .transpose()?;
    let parse_u32 = |table: &Table, v: &str, line: usize| -> Result<u32, CorpusError> {
        v.parse::<u32>().map_err(|_| CorpusError::Malformed {
            file: table.path.clone(),
            line,
            message: format!("expected integer, found `{v}`"),
        })
    };
    let mut volumes = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        let line = i + 2;
        let id = sanitize_token(table.get(row, id_col, line)?);
        let order = match order_col {
            Some(c) => parse_u32(&table, table.get(row, c, line)?, line)?,
            None => (i + 1) as u32,
        };
        volumes.push(Volume {
            series: infer_series(&id),
            title: match title_col {
                Some(c) => sanitize_text(table.get(row, c, line)?),
                None => id.clone(),
            },
            publication_order: order,
            page_count: match pages_col {
                Some(c) => parse_u32(&table, table.get(row, c, line)?, line)?,
                None => 0,
            },
            panel_count: match panels_col {
                Some(c) => parse_u32(&table, table.get(row, c, line)?, line)?,
                None => 0,
            },
            arc_id: None,
            id,
        });
    }

    // Page offsets for rebasing per-page panel coordinates.
    let mut offsets: HashMap<(String, u32), u32> = HashMap::new();
    if spec.panel_numbering == PanelNumbering::PerPage {
        let pages = spec.pages.as_ref().ok_or_else(|| CorpusError::Malformed {
            file: "<import spec>".to_string(),
            line: 0,
            message: "per-page panel numbering requires a page table".to_string(),
        })?;
        let table = Table::read(dir, &pages.file, spec.delimiter)?;
        let vol_col = table.column(&pages.volume)?;
        let page_col = table.column(&pages.page)?;
        let count_col = table.column(&pages.panel_count)?;
        let mut per_volume: HashMap<String, Vec<(u32, u32)>> = HashMap::new();
        for (i, row) in table.rows.iter().enumerate() {
            let line = i + 2;
            let vol = sanitize_token(table.get(row, vol_col, line)?);
            let page = parse_u32(&table, table.get(row, page_col, line)?, line)?;
            let count = parse_u32(&table, table.get(row, count_col, line)?, line)?;
            per_volume.entry(vol).or_default().push((page, count));
        }
        for (vol, mut pages) in per_volume {
            pages.sort_unstable();
            let mut offset = 0u32;
            for (page, count) in pages {
                offsets.insert((vol.clone(), page), offset);
                offset += count;
            }
        }
    }

    let table = Table::read(dir, &spec.scenes.file, spec.delimiter)?;
    let id_col = spec
        .scenes
        .id
        .as_ref()
        .map(|c| table.column(c))
        .transpose()?;
    let vol_col = table.column(&spec.scenes.volume)?;
    let sp_col = table.column(&spec.scenes.start_page)?;
    let spn_col = table.column(&spec.scenes.start_panel)?;
    let ep_col = table.column(&spec.scenes.end_page)?;
    let epn_col = table.column(&spec.scenes.end_panel)?;
    let part_col = table.column(&spec.scenes.participants)?;

    struct RawScene {
        id: String,
        volume: String,
        span: PanelSpan,
        participants: Vec<String>,
    }
    let mut raw = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        let line = i + 2;
        let volume = sanitize_token(table.get(row, vol_col, line)?);
        let start_page = parse_u32(&table, table.get(row, sp_col, line)?, line)?;
        let mut start_panel = parse_u32(&table, table.get(row, spn_col, line)?, line)?;
        let end_page = parse_u32(&table, table.get(row, ep_col, line)?, line)?;
        let mut end_panel = parse_u32(&table, table.get(row, epn_col, line)?, line)?;
        if spec.panel_numbering == PanelNumbering::PerPage {
            let so = offsets.get(&(volume.clone(), start_page)).copied().ok_or_else(|| {
                CorpusError::Malformed {
                    file: table.path.clone(),
                    line,
                    message: format!("page table has no entry for {volume} page {start_page}"),
                }
            })?;
            let eo = offsets.get(&(volume.clone(), end_page)).copied().ok_or_else(|| {
                CorpusError::Malformed {
                    file: table.path.clone(),
                    line,
                    message: format!("page table has no entry for {volume} page {end_page}"),
                }
            })?;
            start_panel += so;
            end_panel += eo;
        }
        let id = match id_col {
            Some(c) => sanitize_token(table.get(row, c, line)?),
            None => format!("s{:05}", i + 1),
        };
        let sep = &spec.scenes.participant_separator;
        let participants: Vec<String> = table
            .get(row, part_col, line)?
            .split(sep.as_str())
            .map(sanitize_token)
            .filter(|p| !p.is_empty())
            .collect();
        raw.push(RawScene {
            id,
            volume,
            span: PanelSpan {
                start_page,
                start_panel,
                end_page,
                end_panel,
            },
            participants,
        });
    }

    // Assign global order: publication order of the volume, then start
    // panel, ties broken by scene id.
    let volume_order: HashMap<&str, u32> = volumes
        .iter()
        .map(|v| (v.id.as_str(), v.publication_order))
        .collect();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = &raw[a];
        let rb = &raw[b];
        let va = volume_order.get(ra.volume.as_str()).copied().unwrap_or(u32::MAX);
        let vb = volume_order.get(rb.volume.as_str()).copied().unwrap_or(u32::MAX);
        va.cmp(&vb)
            .then_with(|| (ra.span.start_page, ra.span.start_panel).cmp(&(rb.span.start_page, rb.span.start_panel)))
            .then_with(|| ra.id.cmp(&rb.id))
    });
    let mut scenes = Vec::with_capacity(raw.len());
    for (pos, &idx) in order.iter().enumerate() {
        let r = &raw[idx];
        scenes.push(Scene {
            id: r.id.clone(),
            volume_id: r.volume.clone(),
            order_index: (pos + 1) as u64,
            span: r.span,
            participants: r.participants.clone(),
        });
    }

    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "imported".to_string());
    Corpus::new(name, characters, volumes, scenes, Vec::new())
}

/// Narrative arc catalog of the *Thorgal* series (per the publisher's
/// official breakdown), with the structural type commonly assigned to each
/// arc network. Volume ids follow the usual convention: plain numbers for
/// the main series, `K`/`L`/`J` prefixes for the spinoffs.
pub fn builtin_thorgal_arcs() -> Vec<ArcRecord> {
    use ArcTypeLabel::*;
    let arc = |id: &str, title: &str, vols: &[&str], t: ArcTypeLabel| ArcRecord {
        id: id.to_string(),
        title: title.to_string(),
        volumes: vols.iter().map(|v| v.to_string()).collect(),
        reference_type: Some(t),
    };
    vec![
        arc("a01", "The Queen of Frozen Seas", &["01", "02"], Unicentric),
        arc("a02", "The Cursed Village", &["03"], Acentric),
        arc("a03", "The Masters of Brek Zarith", &["04", "05", "06"], Kernel),
        arc("a04", "The Origins", &["07", "14"], Polycentric),
        arc("a05", "The Dreamed Child", &["08"], Acentric),
        arc("a06", "The Great Country", &["09", "10", "11", "12", "13"], Polycentric),
        arc("a07", "To the North", &["15", "16", "17"], Polycentric),
        arc("a08", "Shaigan-the-Merciless", &["18", "19", "20", "21", "22", "23"], Polycentric),
        arc("a09", "The Wandering Viking", &["24", "25", "26"], Kernel),
        arc("a10", "The Last Trip", &["27", "28", "29"], Polycentric),
        arc("a11", "The Successor", &["30", "31", "32"], Polycentric),
        arc("a12", "The Valkyries' Court", &["K1", "K2"], Unicentric),
        arc("a13", "The Red Mages", &["33", "34", "35", "36"], Polycentric),
        arc("a14", "The Fallen Mage", &["L1", "L2", "L3"], Unicentric),
        arc("a15", "North-Levant", &["K3", "K4", "K5"], Polycentric),
        arc("a16", "The Sald's Song", &["J1", "J2"], Polycentric),
        arc("a17", "The Black She-Wolf", &["L4", "L5"], Polycentric),
        arc("a18", "The Beast-Warriors", &["J3", "J4"], Acentric),
        arc("a19", "Aniel", &["K6", "K7", "K8"], Polycentric),
        arc("a20", "The Underground Kingdoms", &["L6", "L7"], Kernel),
        arc("a21", "The Betrayed Sorceress", &["J5", "J6"], Polycentric),
        arc("a22", "The Kingdom of the Danes", &["J7", "J8", "J9"], Unicentric),
        arc("a23", "New Horizons", &["37", "38", "39"], Polycentric),
    ]
}
