//! Canonical tab-separated corpus files.
//!
//! A corpus directory holds `characters.tsv`, `volumes.tsv`, `scenes.tsv`
//! and optionally `arcs.tsv`. All files are UTF-8 with a header row; fields
//! never contain tabs, so no quoting is involved. Empty fields encode
//! absent optional values.

use std::fs;
use std::path::Path;

use super::{
    ArcRecord, ArcTypeLabel, Character, Corpus, CorpusError, PanelSpan, Scene, Series, Sex, Volume,
};

const CHARACTERS_HEADER: &str = "id\tname\tnamed\tsex\tcollective";
const VOLUMES_HEADER: &str = "id\tseries\ttitle\torder\tpages\tpanels\tarc_id";
const SCENES_HEADER: &str = "id\tvolume_id\torder\tstart\tend\tparticipants";
const ARCS_HEADER: &str = "id\ttitle\tvolumes\ttype";

fn malformed(file: &Path, line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Malformed {
        file: file.display().to_string(),
        line,
        message: message.into(),
    }
}

fn read_rows<'a>(
    path: &Path,
    content: &'a str,
    header: &str,
    fields: usize,
) -> Result<Vec<(usize, Vec<&'a str>)>, CorpusError> {
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first == header => {}
        Some((_, first)) => {
            return Err(malformed(
                path,
                1,
                format!("expected header `{header}`, found `{first}`"),
            ))
        }
        None => return Err(malformed(path, 1, "empty file")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != fields {
            return Err(malformed(
                path,
                idx + 1,
                format!("expected {fields} tab-separated fields, found {}", cols.len()),
            ));
        }
        rows.push((idx + 1, cols));
    }
    Ok(rows)
}

fn parse_flag(path: &Path, line: usize, field: &str, what: &str) -> Result<bool, CorpusError> {
    match field {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(malformed(path, line, format!("{what} must be 0 or 1, found `{field}`"))),
    }
}

fn parse_num<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    field: &str,
    what: &str,
) -> Result<T, CorpusError> {
    field
        .parse::<T>()
        .map_err(|_| malformed(path, line, format!("{what} must be an integer, found `{field}`")))
}

fn parse_position(path: &Path, line: usize, field: &str) -> Result<(u32, u32), CorpusError> {
    let (page, panel) = field
        .split_once(':')
        .ok_or_else(|| malformed(path, line, format!("expected `page:panel`, found `{field}`")))?;
    Ok((
        parse_num(path, line, page, "page")?,
        parse_num(path, line, panel, "panel")?,
    ))
}

fn read_file(path: &Path) -> Result<String, CorpusError> {
    if !path.is_file() {
        return Err(CorpusError::MissingFile(path.display().to_string()));
    }
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses and validates a corpus from its canonical directory layout.
/// The corpus name defaults to the directory name.
pub fn parse_corpus(dir: &Path) -> Result<Corpus, CorpusError> {
    let characters_path = dir.join("characters.tsv");
    let content = read_file(&characters_path)?;
    let mut characters = Vec::new();
    for (line, cols) in read_rows(&characters_path, &content, CHARACTERS_HEADER, 5)? {
        let sex = Sex::from_code(cols[3]).ok_or_else(|| {
            malformed(
                &characters_path,
                line,
                format!("sex must be one of F|M|X|U, found `{}`", cols[3]),
            )
        })?;
        characters.push(Character {
            id: cols[0].to_string(),
            name: if cols[1].is_empty() {
                None
            } else {
                Some(cols[1].to_string())
            },
            named: parse_flag(&characters_path, line, cols[2], "named")?,
            sex,
            collective: parse_flag(&characters_path, line, cols[4], "collective")?,
        });
    }

    let volumes_path = dir.join("volumes.tsv");
    let content = read_file(&volumes_path)?;
    let mut volumes = Vec::new();
    for (line, cols) in read_rows(&volumes_path, &content, VOLUMES_HEADER, 7)? {
        let series = Series::from_token(cols[1]).ok_or_else(|| {
            malformed(
                &volumes_path,
                line,
                format!(
                    "series must be Main|Kriss|Louve|YoungThorgal|Other, found `{}`",
                    cols[1]
                ),
            )
        })?;
        volumes.push(Volume {
            id: cols[0].to_string(),
            series,
            title: cols[2].to_string(),
            publication_order: parse_num(&volumes_path, line, cols[3], "order")?,
            page_count: parse_num(&volumes_path, line, cols[4], "pages")?,
            panel_count: parse_num(&volumes_path, line, cols[5], "panels")?,
            arc_id: if cols[6].is_empty() {
                None
            } else {
                Some(cols[6].to_string())
            },
        });
    }

    let scenes_path = dir.join("scenes.tsv");
    let content = read_file(&scenes_path)?;
    let mut scenes = Vec::new();
    for (line, cols) in read_rows(&scenes_path, &content, SCENES_HEADER, 6)? {
        let (start_page, start_panel) = parse_position(&scenes_path, line, cols[3])?;
        let (end_page, end_panel) = parse_position(&scenes_path, line, cols[4])?;
        if cols[5].is_empty() {
            return Err(malformed(&scenes_path, line, "empty participant list"));
        }
        scenes.push(Scene {
            id: cols[0].to_string(),
            volume_id: cols[1].to_string(),
            order_index: parse_num(&scenes_path, line, cols[2], "order")?,
            span: PanelSpan {
                start_page,
                start_panel,
                end_page,
                end_panel,
            },
            participants: cols[5].split(',').map(|p| p.to_string()).collect(),
        });
    }

    let arcs_path = dir.join("arcs.tsv");
    let mut arcs = Vec::new();
    if arcs_path.is_file() {
        let content = read_file(&arcs_path)?;
        for (line, cols) in read_rows(&arcs_path, &content, ARCS_HEADER, 4)? {
            let reference_type = ArcTypeLabel::from_token(cols[3]).ok_or_else(|| {
                malformed(
                    &arcs_path,
                    line,
                    format!(
                        "type must be kernel|unicentric|polycentric|acentric|unlabeled, found `{}`",
                        cols[3]
                    ),
                )
            })?;
            arcs.push(ArcRecord {
                id: cols[0].to_string(),
                title: cols[1].to_string(),
                volumes: if cols[2].is_empty() {
                    Vec::new()
                } else {
                    cols[2].split(',').map(|v| v.to_string()).collect()
                },
                reference_type,
            });
        }
    }

    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());
    Corpus::new(name, characters, volumes, scenes, arcs)
}

/// Writes a corpus back to its canonical directory layout.
pub fn write_corpus(corpus: &Corpus, dir: &Path) -> Result<(), CorpusError> {
    let io_err = |path: &Path, source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    };
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let mut out = String::from(CHARACTERS_HEADER);
    out.push('\n');
    for c in corpus.characters() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            c.id,
            c.name.as_deref().unwrap_or(""),
            c.named as u8,
            c.sex.code(),
            c.collective as u8,
        ));
    }
    let path = dir.join("characters.tsv");
    fs::write(&path, out).map_err(|e| io_err(&path, e))?;

    let mut out = String::from(VOLUMES_HEADER);
    out.push('\n');
    for v in corpus.volumes() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            v.id,
            v.series.token(),
            v.title,
            v.publication_order,
            v.page_count,
            v.panel_count,
            v.arc_id.as_deref().unwrap_or(""),
        ));
    }
    let path = dir.join("volumes.tsv");
    fs::write(&path, out).map_err(|e| io_err(&path, e))?;

    let mut out = String::from(SCENES_HEADER);
    out.push('\n');
    for s in corpus.scenes() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}:{}\t{}:{}\t{}\n",
            s.id,
            s.volume_id,
            s.order_index,
            s.span.start_page,
            s.span.start_panel,
            s.span.end_page,
            s.span.end_panel,
            s.participants.join(","),
        ));
    }
    let path = dir.join("scenes.tsv");
    fs::write(&path, out).map_err(|e| io_err(&path, e))?;

    if !corpus.arcs().is_empty() {
        let mut out = String::from(ARCS_HEADER);
        out.push('\n');
        for arc in corpus.arcs().values() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                arc.id,
                arc.title,
                arc.volumes.join(","),
                arc.reference_type.map(|t| t.token()).unwrap_or("unlabeled"),
            ));
        }
        let path = dir.join("arcs.tsv");
        fs::write(&path, out).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}
