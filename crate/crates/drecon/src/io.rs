//! Newick and mapping files.

use std::fs;
use std::path::{Path, PathBuf};

use drecon_core::tree::newick::parse_forest;
use drecon_core::{LeafMapping, PhyloTree};

use crate::error::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_tree(path: &Path) -> Result<PhyloTree, CliError> {
    PhyloTree::from_newick(&read_text(path)?).map_err(|source| CliError::Core { path: path.into(), source })
}

pub fn read_forest(path: &Path) -> Result<Vec<PhyloTree>, CliError> {
    parse_forest(&read_text(path)?).map_err(|source| CliError::Core { path: path.into(), source })
}

/// Two-column `source<TAB>target` table; blank lines and `#` comments are skipped.
pub fn parse_mapping(text: &str, path: &Path) -> Result<LeafMapping, CliError> {
    let mut map = LeafMapping::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let bad = |msg: String| CliError::Format { path: path.into(), line: i + 1, msg };
        let mut cols = line.split('\t');
        let (Some(source), Some(target), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(bad("expected two tab-separated columns".into()));
        };
        let (source, target) = (source.trim(), target.trim());
        if source.is_empty() || target.is_empty() {
            return Err(bad("empty column".into()));
        }
        if let Some(old) = map.insert(source, target) {
            if old != target {
                return Err(bad(format!("`{source}` mapped to both `{old}` and `{target}`")));
            }
        }
    }
    Ok(map)
}

pub fn read_mapping(path: &Path) -> Result<LeafMapping, CliError> {
    parse_mapping(&read_text(path)?, path)
}

pub fn format_mapping(map: &LeafMapping) -> String {
    map.iter().map(|(s, t)| format!("{s}\t{t}\n")).collect()
}

/// Protein to gene by dropping the last character: `a31 -> a3`.
pub fn infer_protein_gene(protein: &PhyloTree) -> LeafMapping {
    protein
        .leaf_names()
        .filter_map(|n| n.char_indices().last().filter(|&(i, _)| i > 0).map(|(i, _)| (n, &n[..i])))
        .collect()
}

/// Gene to species by dropping trailing digits: `a3 -> a`.
pub fn infer_gene_species<'a>(genes: impl IntoIterator<Item = &'a str>) -> LeafMapping {
    genes
        .into_iter()
        .filter_map(|n| {
            let stem = n.trim_end_matches(|c: char| c.is_ascii_digit());
            (!stem.is_empty() && stem.len() < n.len()).then_some((n, stem))
        })
        .collect()
}

/// Explicit rows override inferred ones.
pub fn resolve_mapping(
    explicit: Option<&Path>,
    inferred: Option<LeafMapping>,
    what: &str,
) -> Result<LeafMapping, CliError> {
    let mut map = match (explicit, inferred) {
        (None, None) => return Err(CliError::Usage(format!("{what} mapping needs a TSV file or --infer-map"))),
        (_, inferred) => inferred.unwrap_or_default(),
    };
    if let Some(path) = explicit {
        for (s, t) in read_mapping(path)?.iter() {
            map.insert(s, t);
        }
    }
    Ok(map)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut tmp = PathBuf::from(path);
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    tmp.set_file_name(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}
