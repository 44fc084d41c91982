//! Parsing and serialization of parity games and their solutions.
//!
//! # Game files
//!
//! A game file starts with a header line `parity <max-id>;` followed by one
//! line per vertex:
//!
//! ```text
//! parity 1;
//! 0 3 0 1;
//! 1 2 1 0,1 "optional annotation";
//! ```
//!
//! Each vertex line carries the vertex identifier, its color (priority), its
//! owner (`0` or `1`), a comma-separated non-empty successor list, and an
//! optional quoted annotation. The parser is lenient where leniency is
//! harmless: the header's `<max-id>` is treated as a hint rather than
//! verified, extra whitespace is tolerated, blank lines are skipped, and
//! annotations are accepted and discarded. Vertex identifiers do not need to
//! be dense or sorted; the loader compacts them to `0..n` preserving file
//! order. Structural defects (duplicate identifiers, successors that name no
//! vertex, empty successor lists, malformed numbers) are hard errors that
//! report the offending line.
//!
//! # Solution files
//!
//! A solution file starts with `paritysol <max-id>;` followed by one line per
//! vertex: the vertex identifier, the winner (`0` or `1`), and — for vertices
//! owned by their winner — the successor the winner's strategy commits to:
//!
//! ```text
//! paritysol 1;
//! 0 0;
//! 1 0 1;
//! ```
//!
//! Every vertex of the game must be listed exactly once. Solutions use the
//! vertex numbering of the serialized game they accompany.
//!
//! # Canonical output
//!
//! [`serialize_game`] and [`serialize_solution`] emit a canonical form:
//! vertices in ascending order, successor lists sorted, single spaces, no
//! annotations, `\n` line endings, and a strategy successor exactly for the
//! vertices owned by their winner. Canonical output is byte-stable: parsing
//! and re-serializing a canonical file reproduces it exactly.

use parity_core::{Arena, ParityGame, Player, Strategy, VertexId, WinningRegions};

/// Reasons a game or solution file can be rejected with the 1-based line
/// where the defect was observed.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: expected header `{expected} <max-id>;`, found {found:?}")]
    BadHeader {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("missing header `{expected} <max-id>;`: file is empty")]
    MissingHeader { expected: &'static str },
    #[error("line {line}: expected `;` at end of statement")]
    MissingTerminator { line: usize },
    #[error("line {line}: expected {what}, found {found:?}")]
    BadField {
        line: usize,
        what: &'static str,
        found: String,
    },
    #[error("line {line}: vertex line needs identifier, color, owner and successors")]
    TruncatedVertexLine { line: usize },
    #[error("line {line}: owner must be 0 or 1, found {found:?}")]
    BadOwner { line: usize, found: String },
    #[error("line {line}: winner must be 0 or 1, found {found:?}")]
    BadWinner { line: usize, found: String },
    #[error("line {line}: vertex {id} declared twice")]
    DuplicateVertex { line: usize, id: u64 },
    #[error("line {line}: vertex {id} has an empty successor list")]
    NoSuccessors { line: usize, id: u64 },
    #[error("line {line}: successor {successor} of vertex {id} names no declared vertex")]
    UnknownSuccessor {
        line: usize,
        id: u64,
        successor: u64,
    },
    #[error("line {line}: unterminated annotation")]
    UnterminatedAnnotation { line: usize },
    #[error("line {line}: unexpected trailing text {found:?}")]
    TrailingText { line: usize, found: String },
    #[error("solution lists vertex {id} but the range is 0..{count}")]
    SolutionVertexOutOfRange { id: u64, count: usize },
    #[error("solution lists vertex {id} more than once")]
    SolutionDuplicateVertex { id: u64 },
    #[error("solution is missing vertex {id}")]
    SolutionMissingVertex { id: u64 },
}

/// Winner and committed strategy move for every vertex of one game, as read
/// from or written to a solution file.
///
/// The type is independent of any particular game value: it stores plain
/// per-vertex facts (`winner[v]`, optional `strategy_move[v]`) in the game's
/// vertex numbering. Use [`SolutionData::check_against`] to verify that it is
/// consistent with a concrete game before trusting the moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionData {
    winners: Vec<Player>,
    moves: Vec<Option<VertexId>>,
}

impl SolutionData {
    /// Bundles per-vertex winners and optional strategy moves.
    ///
    /// # Panics
    ///
    /// Panics if the two vectors disagree in length.
    pub fn new(winners: Vec<Player>, moves: Vec<Option<VertexId>>) -> Self {
        assert_eq!(
            winners.len(),
            moves.len(),
            "winners and moves must cover the same vertices"
        );
        Self { winners, moves }
    }

    /// Extracts the winner of every vertex plus the winners' committed moves
    /// from a solved game. The move for a vertex is recorded exactly when the
    /// vertex's owner is also its winner.
    pub fn from_solution(
        game: &ParityGame,
        regions: &WinningRegions,
        strategies: &[Strategy; 2],
    ) -> Self {
        let n = game.arena().vertex_count();
        let mut winners = Vec::with_capacity(n);
        let mut moves = Vec::with_capacity(n);
        for v in game.arena().vertices() {
            let winner = regions.winner_of(v);
            winners.push(winner);
            let owner = game.arena().owner(v);
            if owner == winner {
                moves.push(strategies[winner.index()].choice(v));
            } else {
                moves.push(None);
            }
        }
        Self { winners, moves }
    }

    /// Number of vertices covered.
    pub fn vertex_count(&self) -> usize {
        self.winners.len()
    }

    /// Winner of vertex `v`.
    pub fn winner(&self, v: VertexId) -> Player {
        self.winners[v]
    }

    /// Strategy move committed at `v`, if the file recorded one.
    pub fn strategy_move(&self, v: VertexId) -> Option<VertexId> {
        self.moves[v]
    }

    /// The two winning regions as vertex sets.
    pub fn regions(&self) -> WinningRegions {
        WinningRegions::from_winners(&self.winners)
    }

    /// Verifies this solution is structurally consistent with `game`:
    /// matching vertex count, every recorded move runs along an actual edge,
    /// and moves only appear at vertices whose owner is the recorded winner.
    /// Winner *correctness* is not checked here; that is the solvers' job.
    pub fn check_against(&self, game: &ParityGame) -> Result<(), SolutionMismatch> {
        let arena = game.arena();
        if self.vertex_count() != arena.vertex_count() {
            return Err(SolutionMismatch::VertexCount {
                solution: self.vertex_count(),
                game: arena.vertex_count(),
            });
        }
        for v in arena.vertices() {
            match self.moves[v] {
                None => {}
                Some(target) => {
                    if arena.owner(v) != self.winners[v] {
                        return Err(SolutionMismatch::MoveAtOpponentVertex { vertex: v });
                    }
                    if !arena.successors(v).contains(&target) {
                        return Err(SolutionMismatch::MoveOffTheGraph { vertex: v, target });
                    }
                }
            }
        }
        Ok(())
    }

    /// Splits the recorded moves into one [`Strategy`] per player. Call
    /// [`SolutionData::check_against`] first; this method only shapes data.
    pub fn strategies(&self) -> [Strategy; 2] {
        let n = self.vertex_count();
        let mut strategies = [
            Strategy::new(Player::Even, n),
            Strategy::new(Player::Odd, n),
        ];
        for v in 0..n {
            if let Some(target) = self.moves[v] {
                strategies[self.winners[v].index()].set_choice(v, target);
            }
        }
        strategies
    }
}

/// Ways a [`SolutionData`] can fail to fit a concrete game.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SolutionMismatch {
    #[error("solution covers {solution} vertices but the game has {game}")]
    VertexCount { solution: usize, game: usize },
    #[error("vertex {vertex}: strategy move recorded although the owner lost it")]
    MoveAtOpponentVertex { vertex: VertexId },
    #[error("vertex {vertex}: strategy move to {target} is not an edge of the game")]
    MoveOffTheGraph { vertex: VertexId, target: VertexId },
}

/// Splits `line` into the statement before the terminating `;` after
/// stripping comments-free trailing whitespace. Anything after the `;` other
/// than whitespace is an error.
fn strip_terminator(line: &str, line_no: usize) -> Result<&str, FormatError> {
    let trimmed = line.trim_end();
    match trimmed.find(';') {
        None => Err(FormatError::MissingTerminator { line: line_no }),
        Some(pos) => {
            let rest = &trimmed[pos + 1..];
            if !rest.trim().is_empty() {
                return Err(FormatError::TrailingText {
                    line: line_no,
                    found: rest.trim().to_string(),
                });
            }
            Ok(&trimmed[..pos])
        }
    }
}

fn parse_number(token: &str, what: &'static str, line_no: usize) -> Result<u64, FormatError> {
    token.parse::<u64>().map_err(|_| FormatError::BadField {
        line: line_no,
        what,
        found: token.to_string(),
    })
}

/// Strips an optional trailing `"annotation"` from a vertex statement.
fn strip_annotation(statement: &str, line_no: usize) -> Result<&str, FormatError> {
    let trimmed = statement.trim_end();
    if !trimmed.ends_with('"') {
        return Ok(statement);
    }
    let body = &trimmed[..trimmed.len() - 1];
    match body.rfind('"') {
        Some(open) => Ok(&trimmed[..open]),
        None => Err(FormatError::UnterminatedAnnotation { line: line_no }),
    }
}

/// Lines of `text` paired with their 1-based numbers, blank lines skipped.
fn statement_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn expect_header(first: Option<(usize, &str)>, keyword: &'static str) -> Result<(), FormatError> {
    let (line_no, line) = first.ok_or(FormatError::MissingHeader { expected: keyword })?;
    let statement = strip_terminator(line, line_no)?;
    let mut tokens = statement.split_whitespace();
    let word = tokens.next().unwrap_or("");
    let max_id = tokens.next();
    let extra = tokens.next();
    // The numeric field is a hint for readers that preallocate; it is
    // required to be present and numeric but deliberately not checked against
    // the vertex lines that follow.
    let looks_right =
        word == keyword && max_id.is_some_and(|t| t.parse::<u64>().is_ok()) && extra.is_none();
    if looks_right {
        Ok(())
    } else {
        Err(FormatError::BadHeader {
            line: line_no,
            expected: keyword,
            found: line.trim().to_string(),
        })
    }
}

/// Parses a game file. See the module documentation for the grammar and the
/// leniency rules. Vertex identifiers are compacted to `0..n` in file order.
pub fn parse_game(text: &str) -> Result<ParityGame, FormatError> {
    let mut lines = statement_lines(text);
    expect_header(lines.next(), "parity")?;

    // First pass over the vertex statements: collect raw records so that
    // forward references resolve, then compact identifiers in file order.
    struct RawVertex {
        line_no: usize,
        id: u64,
        color: u32,
        owner: Player,
        successors: Vec<u64>,
    }
    let mut raw: Vec<RawVertex> = Vec::new();

    for (line_no, line) in lines {
        let statement = strip_terminator(line, line_no)?;
        let statement = strip_annotation(statement, line_no)?;
        let mut tokens = statement.split_whitespace();
        let (Some(id_tok), Some(color_tok), Some(owner_tok), Some(succ_tok)) =
            (tokens.next(), tokens.next(), tokens.next(), tokens.next())
        else {
            return Err(FormatError::TruncatedVertexLine { line: line_no });
        };
        // The successor list may contain spaces after commas, in which case
        // it spans several whitespace tokens; glue them back together.
        let mut succ_text = succ_tok.to_string();
        for tok in tokens {
            succ_text.push_str(tok);
        }

        let id = parse_number(id_tok, "a vertex identifier", line_no)?;
        let color = u32::try_from(parse_number(color_tok, "a color", line_no)?).map_err(|_| {
            FormatError::BadField {
                line: line_no,
                what: "a color",
                found: color_tok.to_string(),
            }
        })?;
        let owner = match owner_tok {
            "0" => Player::Even,
            "1" => Player::Odd,
            other => {
                return Err(FormatError::BadOwner {
                    line: line_no,
                    found: other.to_string(),
                });
            }
        };
        let mut successors = Vec::new();
        for part in succ_text.split(',') {
            if part.is_empty() {
                return Err(FormatError::BadField {
                    line: line_no,
                    what: "a successor identifier",
                    found: succ_text.clone(),
                });
            }
            successors.push(parse_number(part, "a successor identifier", line_no)?);
        }
        if successors.is_empty() {
            return Err(FormatError::NoSuccessors { line: line_no, id });
        }
        raw.push(RawVertex {
            line_no,
            id,
            color,
            owner,
            successors,
        });
    }

    // Compact identifiers: file order defines the dense numbering.
    let mut dense: std::collections::HashMap<u64, VertexId> = std::collections::HashMap::new();
    for (index, vertex) in raw.iter().enumerate() {
        if dense.insert(vertex.id, index).is_some() {
            return Err(FormatError::DuplicateVertex {
                line: vertex.line_no,
                id: vertex.id,
            });
        }
    }

    let mut owners = Vec::with_capacity(raw.len());
    let mut colors = Vec::with_capacity(raw.len());
    let mut successors = Vec::with_capacity(raw.len());
    for vertex in &raw {
        let mut outgoing = Vec::with_capacity(vertex.successors.len());
        for &target in &vertex.successors {
            match dense.get(&target) {
                Some(&t) => outgoing.push(t),
                None => {
                    return Err(FormatError::UnknownSuccessor {
                        line: vertex.line_no,
                        id: vertex.id,
                        successor: target,
                    });
                }
            }
        }
        owners.push(vertex.owner);
        colors.push(vertex.color);
        successors.push(outgoing);
    }

    Ok(ParityGame::new(Arena::new(owners, successors), colors))
}

/// Serializes a game in canonical form (see the module documentation).
pub fn serialize_game(game: &ParityGame) -> String {
    let arena = game.arena();
    let n = arena.vertex_count();
    let mut out = String::new();
    out.push_str(&format!("parity {};\n", n.saturating_sub(1)));
    for v in arena.vertices() {
        out.push_str(&format!(
            "{} {} {} ",
            v,
            game.color(v),
            arena.owner(v).index()
        ));
        let mut first = true;
        for &s in arena.successors(v) {
            if !first {
                out.push(',');
            }
            out.push_str(&s.to_string());
            first = false;
        }
        out.push_str(";\n");
    }
    out
}

/// Parses a solution file. Every vertex `0..n` must appear exactly once,
/// where `n` is the number of vertex statements.
pub fn parse_solution(text: &str) -> Result<SolutionData, FormatError> {
    let mut lines = statement_lines(text);
    expect_header(lines.next(), "paritysol")?;

    struct RawEntry {
        id: u64,
        winner: Player,
        move_to: Option<u64>,
    }
    let mut raw: Vec<RawEntry> = Vec::new();
    for (line_no, line) in lines {
        let statement = strip_terminator(line, line_no)?;
        let mut tokens = statement.split_whitespace();
        let (Some(id_tok), Some(winner_tok)) = (tokens.next(), tokens.next()) else {
            return Err(FormatError::TruncatedVertexLine { line: line_no });
        };
        let move_tok = tokens.next();
        if let Some(extra) = tokens.next() {
            return Err(FormatError::TrailingText {
                line: line_no,
                found: extra.to_string(),
            });
        }
        let id = parse_number(id_tok, "a vertex identifier", line_no)?;
        let winner = match winner_tok {
            "0" => Player::Even,
            "1" => Player::Odd,
            other => {
                return Err(FormatError::BadWinner {
                    line: line_no,
                    found: other.to_string(),
                });
            }
        };
        let move_to = match move_tok {
            None => None,
            Some(tok) => Some(parse_number(tok, "a strategy successor", line_no)?),
        };
        raw.push(RawEntry {
            id,
            winner,
            move_to,
        });
    }

    let count = raw.len();
    let mut winners = vec![Player::Even; count];
    let mut moves = vec![None; count];
    let mut seen = vec![false; count];
    for entry in &raw {
        let id = usize::try_from(entry.id).unwrap_or(usize::MAX);
        if id >= count {
            return Err(FormatError::SolutionVertexOutOfRange {
                id: entry.id,
                count,
            });
        }
        if seen[id] {
            return Err(FormatError::SolutionDuplicateVertex { id: entry.id });
        }
        seen[id] = true;
        winners[id] = entry.winner;
        moves[id] = match entry.move_to {
            None => None,
            Some(target) => {
                let t = usize::try_from(target).unwrap_or(usize::MAX);
                if t >= count {
                    return Err(FormatError::SolutionVertexOutOfRange { id: target, count });
                }
                Some(t)
            }
        };
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(FormatError::SolutionMissingVertex { id: missing as u64 });
    }
    Ok(SolutionData::new(winners, moves))
}

/// Serializes a solution in canonical form: ascending vertices, winner digit,
/// and the committed move exactly where one is recorded.
pub fn serialize_solution(solution: &SolutionData) -> String {
    let n = solution.vertex_count();
    let mut out = String::new();
    out.push_str(&format!("paritysol {};\n", n.saturating_sub(1)));
    for v in 0..n {
        match solution.strategy_move(v) {
            Some(target) => {
                out.push_str(&format!(
                    "{} {} {};\n",
                    v,
                    solution.winner(v).index(),
                    target
                ));
            }
            None => {
                out.push_str(&format!("{} {};\n", v, solution.winner(v).index()));
            }
        }
    }
    out
}
