//! On-disk dataset layout and the train/test split.
//!
//! A dataset is a directory containing one game file and one solution file
//! per record (`g000000.pg`, `g000000.sol`, `g000001.pg`, ...) plus a
//! `manifest.tsv` that ties them together:
//!
//! ```text
//! # parity-game-dataset v1
//! # seed 7
//! # min_vertices 10
//! # max_vertices 200
//! # split_fraction 0.7
//! g000000.pg	g000000.sol	12	train
//! g000001.pg	g000001.sol	57	test
//! ```
//!
//! Header lines start with `# `; the first records the layout version and
//! the rest carry the generation parameters, so a dataset can be regenerated
//! byte-for-byte from its manifest alone. Each record line is
//! tab-separated: game file, solution file, vertex count, split. All files
//! live directly in the dataset directory and use `\n` line endings.
//!
//! The split assignment is a pure function of `(record count, fraction,
//! seed)` — see [`assign_splits`] — so shuffling is reproducible and no
//! record's split ever depends on the game contents.

// The manifest example above reproduces a literal file, tabs included.
#![allow(clippy::tabs_in_doc_comments)]

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use parity_core::ParityGame;

use crate::format::{
    FormatError, SolutionData, parse_game, parse_solution, serialize_game, serialize_solution,
};

/// Which side of the train/test split a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Train => write!(f, "train"),
            Split::Test => write!(f, "test"),
        }
    }
}

impl std::str::FromStr for Split {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            _ => Err(()),
        }
    }
}

/// Generation parameters recorded in the manifest header. Together with the
/// record count they determine every byte of a generated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMeta {
    /// Master seed the games were generated from.
    pub seed: u64,
    /// Smallest admissible vertex count.
    pub min_vertices: usize,
    /// Largest admissible vertex count.
    pub max_vertices: usize,
    /// Fraction of records assigned to the training split, in `[0, 1]`.
    pub split_fraction: f64,
}

/// One manifest line: the two files of a record plus cached facts about it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetRecord {
    /// Game file name, relative to the dataset directory.
    pub game_file: String,
    /// Solution file name, relative to the dataset directory.
    pub solution_file: String,
    /// Number of vertices in the game (cached for cheap filtering).
    pub vertex_count: usize,
    /// Split the record belongs to.
    pub split: Split,
}

/// Parsed `manifest.tsv`: header metadata plus the record table.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub meta: DatasetMeta,
    pub records: Vec<DatasetRecord>,
}

/// A fully loaded record: the game and its verified solution.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry {
    pub game: ParityGame,
    pub solution: SolutionData,
}

/// An entire dataset read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub manifest: DatasetManifest,
    /// Entries in manifest order; `entries[i]` matches `manifest.records[i]`.
    pub entries: Vec<DatasetEntry>,
}

impl LoadedDataset {
    /// Indices of the records in the given split, in manifest order.
    pub fn indices_of(&self, split: Split) -> Vec<usize> {
        self.manifest
            .records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.split == split)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Problems reading or writing a dataset directory.
#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("accessing {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {path}")]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },
    #[error("{path}: {reason}")]
    Inconsistent { path: PathBuf, reason: String },
}

const MANIFEST_NAME: &str = "manifest.tsv";
const VERSION_LINE: &str = "# parity-game-dataset v1";

/// File name for the game of record `index` (`g000042.pg`).
pub fn game_file_name(index: usize) -> String {
    format!("g{index:06}.pg")
}

/// File name for the solution of record `index` (`g000042.sol`).
pub fn solution_file_name(index: usize) -> String {
    format!("g{index:06}.sol")
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stateless 64-bit finalizer used to rank records for the split shuffle.
/// The split needs a hash, not a sequential stream, so this stays private to
/// the I/O layer instead of pulling in a generator dependency.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn shuffle_key(seed: u64, index: usize) -> u64 {
    mix64(seed ^ mix64((index as u64).wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Assigns each of `count` records to a split. Exactly
/// `ceil(count * fraction)` records become [`Split::Train`]; which ones is a
/// seeded pseudo-random choice, stable across runs and platforms.
///
/// # Panics
///
/// Panics if `fraction` is not in `[0, 1]`.
pub fn assign_splits(count: usize, fraction: f64, seed: u64) -> Vec<Split> {
    assert!(
        (0.0..=1.0).contains(&fraction),
        "split fraction must lie in [0, 1], got {fraction}"
    );
    let train_count = ((count as f64) * fraction).ceil().min(count as f64) as usize;
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by_key(|&i| (shuffle_key(seed, i), i));
    let mut splits = vec![Split::Test; count];
    for &i in order.iter().take(train_count) {
        splits[i] = Split::Train;
    }
    splits
}

impl DatasetManifest {
    /// Renders the manifest in its canonical text form.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(VERSION_LINE);
        out.push('\n');
        out.push_str(&format!("# seed {}\n", self.meta.seed));
        out.push_str(&format!("# min_vertices {}\n", self.meta.min_vertices));
        out.push_str(&format!("# max_vertices {}\n", self.meta.max_vertices));
        out.push_str(&format!("# split_fraction {}\n", self.meta.split_fraction));
        for record in &self.records {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                record.game_file, record.solution_file, record.vertex_count, record.split
            ));
        }
        out
    }

    /// Parses manifest text, validating the version line, the header keys
    /// and every record line.
    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let bad = |line: usize, reason: String| DatasetError::Manifest { line, reason };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        match lines.next() {
            Some((_, first)) if first.trim_end() == VERSION_LINE => {}
            Some((line, first)) => {
                return Err(bad(
                    line,
                    format!("expected version line {VERSION_LINE:?}, found {first:?}"),
                ));
            }
            None => return Err(bad(1, "manifest is empty".to_string())),
        }

        let mut header: HashMap<&str, (usize, &str)> = HashMap::new();
        let mut records = Vec::new();
        for (line_no, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut tokens = rest.split_whitespace();
                let (Some(key), Some(value)) = (tokens.next(), tokens.next()) else {
                    return Err(bad(line_no, format!("malformed header line {line:?}")));
                };
                if tokens.next().is_some() {
                    return Err(bad(line_no, format!("malformed header line {line:?}")));
                }
                if header.insert(key, (line_no, value)).is_some() {
                    return Err(bad(line_no, format!("duplicate header key {key:?}")));
                }
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(bad(
                    line_no,
                    format!("expected 4 tab-separated fields, found {}", fields.len()),
                ));
            }
            let vertex_count = fields[2]
                .parse::<usize>()
                .map_err(|_| bad(line_no, format!("bad vertex count {:?}", fields[2])))?;
            let split = fields[3].parse::<Split>().map_err(|()| {
                bad(
                    line_no,
                    format!("split must be train or test, found {:?}", fields[3]),
                )
            })?;
            records.push(DatasetRecord {
                game_file: fields[0].to_string(),
                solution_file: fields[1].to_string(),
                vertex_count,
                split,
            });
        }

        let mut take = |key: &str| -> Result<(usize, &str), DatasetError> {
            header.remove(key).ok_or(DatasetError::Manifest {
                line: 1,
                reason: format!("missing header key {key:?}"),
            })
        };
        let (seed_line, seed) = take("seed")?;
        let seed = seed
            .parse::<u64>()
            .map_err(|_| bad(seed_line, format!("bad seed {seed:?}")))?;
        let (min_line, min_vertices) = take("min_vertices")?;
        let min_vertices = min_vertices
            .parse::<usize>()
            .map_err(|_| bad(min_line, format!("bad min_vertices {min_vertices:?}")))?;
        let (max_line, max_vertices) = take("max_vertices")?;
        let max_vertices = max_vertices
            .parse::<usize>()
            .map_err(|_| bad(max_line, format!("bad max_vertices {max_vertices:?}")))?;
        let (frac_line, fraction) = take("split_fraction")?;
        let split_fraction = fraction
            .parse::<f64>()
            .ok()
            .filter(|f| (0.0..=1.0).contains(f))
            .ok_or_else(|| bad(frac_line, format!("bad split_fraction {fraction:?}")))?;
        if let Some((&key, &(line_no, _))) = header.iter().next() {
            return Err(bad(line_no, format!("unrecognized header key {key:?}")));
        }

        Ok(DatasetManifest {
            meta: DatasetMeta {
                seed,
                min_vertices,
                max_vertices,
                split_fraction,
            },
            records,
        })
    }
}

fn read_text(path: &Path) -> Result<String, DatasetError> {
    std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), DatasetError> {
    std::fs::write(path, text).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes games, solutions and the manifest into `root` (created if absent).
/// Splits are assigned by [`assign_splits`] from the metadata, records are
/// named `g<index>.pg` / `g<index>.sol`, and every solution is verified to
/// fit its game before anything is written.
pub fn save_dataset(
    root: &Path,
    meta: DatasetMeta,
    entries: &[(ParityGame, SolutionData)],
) -> Result<DatasetManifest, DatasetError> {
    for (index, (game, solution)) in entries.iter().enumerate() {
        solution
            .check_against(game)
            .map_err(|e| DatasetError::Inconsistent {
                path: root.join(solution_file_name(index)),
                reason: e.to_string(),
            })?;
    }
    std::fs::create_dir_all(root).map_err(|source| DatasetError::Io {
        path: root.to_path_buf(),
        source,
    })?;
    let splits = assign_splits(entries.len(), meta.split_fraction, meta.seed);
    let mut records = Vec::with_capacity(entries.len());
    for (index, ((game, solution), split)) in entries.iter().zip(splits).enumerate() {
        let game_file = game_file_name(index);
        let solution_file = solution_file_name(index);
        write_text(&root.join(&game_file), &serialize_game(game))?;
        write_text(&root.join(&solution_file), &serialize_solution(solution))?;
        records.push(DatasetRecord {
            game_file,
            solution_file,
            vertex_count: game.arena().vertex_count(),
            split,
        });
    }
    let manifest = DatasetManifest { meta, records };
    write_text(&root.join(MANIFEST_NAME), &manifest.render())?;
    Ok(manifest)
}

/// Reads a dataset back: parses the manifest, loads every referenced file,
/// and validates each record (vertex count matches the manifest, the
/// solution fits the game, recorded strategy moves run along real edges).
pub fn load_dataset(root: &Path) -> Result<LoadedDataset, DatasetError> {
    let manifest_text = read_text(&root.join(MANIFEST_NAME))?;
    let manifest = DatasetManifest::parse(&manifest_text)?;
    let mut entries = Vec::with_capacity(manifest.records.len());
    for record in &manifest.records {
        let game_path = root.join(&record.game_file);
        let game = parse_game(&read_text(&game_path)?).map_err(|source| DatasetError::Format {
            path: game_path.clone(),
            source,
        })?;
        let solution_path = root.join(&record.solution_file);
        let solution =
            parse_solution(&read_text(&solution_path)?).map_err(|source| DatasetError::Format {
                path: solution_path.clone(),
                source,
            })?;
        if game.arena().vertex_count() != record.vertex_count {
            return Err(DatasetError::Inconsistent {
                path: game_path,
                reason: format!(
                    "manifest says {} vertices but the file has {}",
                    record.vertex_count,
                    game.arena().vertex_count()
                ),
            });
        }
        solution
            .check_against(&game)
            .map_err(|e| DatasetError::Inconsistent {
                path: solution_path,
                reason: e.to_string(),
            })?;
        entries.push(DatasetEntry { game, solution });
    }
    Ok(LoadedDataset { manifest, entries })
}
