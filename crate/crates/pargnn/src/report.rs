//! Evaluation reports: a versioned text format that survives a save/load
//! round trip losslessly, plus human-facing renderings (summary table,
//! per-game CSV, scatter plot).

use std::fmt::Write as _;

use crate::metrics::{GameOutcome, Metrics, compute_metrics};
use pg_io::Split;

const VERSION_LINE: &str = "# eval-report v1";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("malformed report at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

fn malformed(line: usize, reason: impl Into<String>) -> ReportError {
    ReportError::Malformed {
        line,
        reason: reason.into(),
    }
}

/// A complete evaluation: provenance, both splits' metrics, and timing.
///
/// Two runs of the same evaluation produce reports that agree everywhere
/// except `timing_seconds`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Path of the evaluated checkpoint, as given on the command line.
    pub checkpoint: String,
    /// Path of the evaluated dataset directory.
    pub dataset: String,
    /// Configuration echo: checkpoint metadata (model and training keys)
    /// followed by dataset provenance, in insertion order.
    pub meta: Vec<(String, String)>,
    /// Wall-clock duration of the evaluation pass.
    pub timing_seconds: f64,
    pub train: Metrics,
    pub test: Metrics,
}

impl EvalReport {
    pub fn metrics_of(&self, split: Split) -> &Metrics {
        match split {
            Split::Train => &self.train,
            Split::Test => &self.test,
        }
    }

    /// First metadata value stored under `key`.
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Serializes the report. The output is line-oriented, uses `\n`
    /// endings, and round-trips through [`EvalReport::parse`] exactly.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(VERSION_LINE);
        out.push('\n');
        writeln!(out, "checkpoint {}", self.checkpoint).unwrap();
        writeln!(out, "dataset {}", self.dataset).unwrap();
        for (key, value) in &self.meta {
            writeln!(out, "meta {key} {value}").unwrap();
        }
        writeln!(out, "timing_seconds {}", self.timing_seconds).unwrap();
        for split in [Split::Train, Split::Test] {
            let m = self.metrics_of(split);
            writeln!(
                out,
                "split {split} accuracy {} games {} err0 {} err1 {} err2plus {}",
                m.vertex_accuracy,
                m.game_count(),
                m.games_err0,
                m.games_err1,
                m.games_err2plus
            )
            .unwrap();
            for g in &m.per_game {
                writeln!(out, "game {split} {} {}", g.vertex_count, g.misclassified).unwrap();
            }
        }
        out.push_str("end\n");
        out
    }

    /// Parses a report written by [`EvalReport::render`]. The per-game
    /// records are re-aggregated and must agree with the stored summary
    /// line, so tampered aggregates are rejected.
    pub fn parse(text: &str) -> Result<EvalReport, ReportError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, first)) if first == VERSION_LINE => {}
            Some((line, first)) => {
                return Err(malformed(
                    line,
                    format!("expected header {VERSION_LINE:?}, got {first:?}"),
                ));
            }
            None => return Err(malformed(1, "empty report")),
        }

        let mut checkpoint: Option<String> = None;
        let mut dataset: Option<String> = None;
        let mut meta: Vec<(String, String)> = Vec::new();
        let mut timing: Option<f64> = None;
        // Per-split accumulation: the declared summary and the game lines.
        let mut summaries: [Option<(usize, Metrics)>; 2] = [None, None];
        let mut games: [Vec<GameOutcome>; 2] = [Vec::new(), Vec::new()];
        let mut saw_end = false;

        fn split_index(token: &str, line: usize) -> Result<usize, ReportError> {
            match token {
                "train" => Ok(0),
                "test" => Ok(1),
                other => Err(malformed(line, format!("unknown split {other:?}"))),
            }
        }
        fn field<T: std::str::FromStr>(
            token: &str,
            what: &str,
            line: usize,
        ) -> Result<T, ReportError> {
            token
                .parse()
                .map_err(|_| malformed(line, format!("bad {what} {token:?}")))
        }

        for (line_no, line) in lines {
            if line == "end" {
                saw_end = true;
                break;
            }
            if let Some(rest) = line.strip_prefix("checkpoint ") {
                if checkpoint.replace(rest.to_string()).is_some() {
                    return Err(malformed(line_no, "duplicate checkpoint line"));
                }
            } else if let Some(rest) = line.strip_prefix("dataset ") {
                if dataset.replace(rest.to_string()).is_some() {
                    return Err(malformed(line_no, "duplicate dataset line"));
                }
            } else if let Some(rest) = line.strip_prefix("meta ") {
                let (key, value) = rest
                    .split_once(' ')
                    .ok_or_else(|| malformed(line_no, "meta needs a key and a value"))?;
                meta.push((key.to_string(), value.to_string()));
            } else if let Some(rest) = line.strip_prefix("timing_seconds ") {
                let value = field(rest, "timing", line_no)?;
                if timing.replace(value).is_some() {
                    return Err(malformed(line_no, "duplicate timing line"));
                }
            } else if let Some(rest) = line.strip_prefix("split ") {
                let tokens: Vec<&str> = rest.split(' ').collect();
                let labels_ok = tokens.len() == 11
                    && tokens[1] == "accuracy"
                    && tokens[3] == "games"
                    && tokens[5] == "err0"
                    && tokens[7] == "err1"
                    && tokens[9] == "err2plus";
                if !labels_ok {
                    return Err(malformed(
                        line_no,
                        "split line needs: <split> accuracy <v> games <n> err0 <n> err1 <n> err2plus <n>",
                    ));
                }
                let idx = split_index(tokens[0], line_no)?;
                let declared = Metrics {
                    vertex_accuracy: field(tokens[2], "accuracy", line_no)?,
                    games_err0: field(tokens[6], "err0 count", line_no)?,
                    games_err1: field(tokens[8], "err1 count", line_no)?,
                    games_err2plus: field(tokens[10], "err2plus count", line_no)?,
                    per_game: Vec::new(),
                };
                let declared_games: usize = field(tokens[4], "game count", line_no)?;
                if declared_games
                    != declared.games_err0 + declared.games_err1 + declared.games_err2plus
                {
                    return Err(malformed(
                        line_no,
                        "game count does not match the error buckets",
                    ));
                }
                if summaries[idx].replace((line_no, declared)).is_some() {
                    return Err(malformed(
                        line_no,
                        format!("duplicate split line for {}", tokens[0]),
                    ));
                }
            } else if let Some(rest) = line.strip_prefix("game ") {
                let tokens: Vec<&str> = rest.split(' ').collect();
                if tokens.len() != 3 {
                    return Err(malformed(
                        line_no,
                        "game line needs: <split> <vertex_count> <misclassified>",
                    ));
                }
                let idx = split_index(tokens[0], line_no)?;
                games[idx].push(GameOutcome {
                    vertex_count: field(tokens[1], "vertex count", line_no)?,
                    misclassified: field(tokens[2], "misclassified count", line_no)?,
                });
            } else {
                return Err(malformed(line_no, format!("unrecognized line {line:?}")));
            }
        }
        if !saw_end {
            return Err(malformed(0, "missing end marker"));
        }

        let checkpoint = checkpoint.ok_or_else(|| malformed(0, "missing checkpoint line"))?;
        let dataset = dataset.ok_or_else(|| malformed(0, "missing dataset line"))?;
        let timing = timing.ok_or_else(|| malformed(0, "missing timing line"))?;
        let mut metrics_out: Vec<Metrics> = Vec::new();
        for (idx, name) in ["train", "test"].iter().enumerate() {
            let (line_no, declared) = summaries[idx]
                .take()
                .ok_or_else(|| malformed(0, format!("missing split line for {name}")))?;
            let recomputed = compute_metrics(&games[idx]);
            if recomputed.games_err0 != declared.games_err0
                || recomputed.games_err1 != declared.games_err1
                || recomputed.games_err2plus != declared.games_err2plus
                || recomputed.vertex_accuracy.to_bits() != declared.vertex_accuracy.to_bits()
            {
                return Err(malformed(
                    line_no,
                    format!("{name} summary disagrees with its game records"),
                ));
            }
            metrics_out.push(recomputed);
        }
        let test = metrics_out.pop().expect("two splits pushed");
        let train = metrics_out.pop().expect("two splits pushed");
        Ok(EvalReport {
            checkpoint,
            dataset,
            meta,
            timing_seconds: timing,
            train,
            test,
        })
    }
}

/// Pads `text` to `width` columns with trailing spaces.
fn pad(text: &str, width: usize) -> String {
    format!("{text:<width$}")
}

fn render_rows(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            line.push_str(&pad(cell, widths[c]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Renders the headline summary table plus the full per-split matrix.
///
/// The headline row follows the usual presentation for this experiment:
/// accuracy is measured on the training split while the game error buckets
/// (`n_err=0`, `n_err=1`, `n_err>=2`) count test-split games.
pub fn render_table(report: &EvalReport) -> String {
    let model = report
        .meta_value("variant")
        .map(str::to_uppercase)
        .unwrap_or_else(|| "?".to_string());
    let headline = vec![
        vec![
            "Model".to_string(),
            "Acc.".to_string(),
            "n_err=0".to_string(),
            "n_err=1".to_string(),
            "n_err>=2".to_string(),
        ],
        vec![
            model,
            format!("{:.2}", report.train.vertex_accuracy),
            report.test.games_err0.to_string(),
            report.test.games_err1.to_string(),
            report.test.games_err2plus.to_string(),
        ],
    ];
    let mut full = vec![vec![
        "Split".to_string(),
        "Games".to_string(),
        "Vertex acc.".to_string(),
        "n_err=0".to_string(),
        "n_err=1".to_string(),
        "n_err>=2".to_string(),
    ]];
    for split in [Split::Train, Split::Test] {
        let m = report.metrics_of(split);
        full.push(vec![
            split.to_string(),
            m.game_count().to_string(),
            format!("{:.4}", m.vertex_accuracy),
            m.games_err0.to_string(),
            m.games_err1.to_string(),
            m.games_err2plus.to_string(),
        ]);
    }
    let mut out = render_rows(&headline);
    out.push_str("(Acc. on the train split; error buckets count test-split games.)\n\n");
    out.push_str(&render_rows(&full));
    out
}

/// Renders the per-game records of one metrics set as CSV with the exact
/// header `vertex_count,misclassified` and one row per game.
pub fn render_csv(metrics: &Metrics) -> String {
    let mut out = String::from("vertex_count,misclassified\n");
    for g in &metrics.per_game {
        writeln!(out, "{},{}", g.vertex_count, g.misclassified).unwrap();
    }
    out
}

/// Renders a self-contained scatter plot (vertex count on the x axis,
/// misclassified vertices on the y axis) as an SVG document.
pub fn render_scatter_svg(metrics: &Metrics) -> String {
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 480.0;
    const MARGIN: f64 = 56.0;

    let xs: Vec<f64> = metrics
        .per_game
        .iter()
        .map(|g| g.vertex_count as f64)
        .collect();
    let ys: Vec<f64> = metrics
        .per_game
        .iter()
        .map(|g| g.misclassified as f64)
        .collect();
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let (x_lo, x_hi) = if xs.is_empty() {
        (0.0, 1.0)
    } else {
        (min(&xs), max(&xs))
    };
    let (y_lo, y_hi) = (
        0.0,
        if ys.is_empty() {
            1.0
        } else {
            max(&ys).max(1.0)
        },
    );
    let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
    let y_span = y_hi - y_lo;

    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x_of = |v: f64| MARGIN + (v - x_lo) / x_span * plot_w;
    let y_of = |v: f64| HEIGHT - MARGIN - (v - y_lo) / y_span * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    )
    .unwrap();
    writeln!(
        svg,
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    )
    .unwrap();
    // Axes.
    writeln!(
        svg,
        "  <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    )
    .unwrap();
    writeln!(
        svg,
        "  <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN
    )
    .unwrap();
    // Axis labels and extreme-value ticks.
    writeln!(
        svg,
        "  <text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">vertices</text>",
        x = WIDTH / 2.0,
        y = HEIGHT - 12.0
    )
    .unwrap();
    writeln!(
        svg,
        "  <text x=\"16\" y=\"{y}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 16 {y})\">misclassified vertices</text>",
        y = HEIGHT / 2.0
    )
    .unwrap();
    for (value, x) in [(x_lo, MARGIN), (x_hi, WIDTH - MARGIN)] {
        writeln!(
            svg,
            "  <text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{value}</text>",
            y = HEIGHT - MARGIN + 18.0
        )
        .unwrap();
    }
    for (value, y) in [(y_lo, HEIGHT - MARGIN), (y_hi, MARGIN)] {
        writeln!(
            svg,
            "  <text x=\"{x}\" y=\"{y}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">{value}</text>",
            x = MARGIN - 8.0
        )
        .unwrap();
    }
    for g in &metrics.per_game {
        writeln!(
            svg,
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\" fill-opacity=\"0.6\"/>",
            x_of(g.vertex_count as f64),
            y_of(g.misclassified as f64)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> EvalReport {
        let train = compute_metrics(&[
            GameOutcome {
                vertex_count: 10,
                misclassified: 0,
            },
            GameOutcome {
                vertex_count: 12,
                misclassified: 1,
            },
            GameOutcome {
                vertex_count: 8,
                misclassified: 4,
            },
        ]);
        let test = compute_metrics(&[
            GameOutcome {
                vertex_count: 20,
                misclassified: 0,
            },
            GameOutcome {
                vertex_count: 15,
                misclassified: 3,
            },
        ]);
        EvalReport {
            checkpoint: "runs/model ckpt.txt".to_string(),
            dataset: "data/small".to_string(),
            meta: vec![
                ("variant".to_string(), "gcn".to_string()),
                ("train.dataset".to_string(), "data/small".to_string()),
                ("note".to_string(), "value with spaces".to_string()),
            ],
            timing_seconds: 1.25,
            train,
            test,
        }
    }

    #[test]
    fn render_parse_round_trip_is_lossless() {
        let report = sample_report();
        let text = report.render();
        let back = EvalReport::parse(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.render(), text);
        assert_eq!(back.meta_value("note"), Some("value with spaces"));
        assert_eq!(back.checkpoint, "runs/model ckpt.txt");
    }

    #[test]
    fn odd_float_timings_survive_the_round_trip() {
        let mut report = sample_report();
        report.timing_seconds = 0.1 + 0.2; // not exactly 0.3
        let back = EvalReport::parse(&report.render()).unwrap();
        assert_eq!(
            back.timing_seconds.to_bits(),
            report.timing_seconds.to_bits()
        );
    }

    #[test]
    fn tampered_summaries_are_rejected() {
        let report = sample_report();
        let text = report.render();
        let tampered = text.replacen("err0 1 err1 1 err2plus 1", "err0 2 err1 0 err2plus 1", 1);
        assert_ne!(tampered, text, "tampering should hit the train split line");
        match EvalReport::parse(&tampered) {
            Err(ReportError::Malformed { reason, .. }) => {
                assert!(reason.contains("disagrees"), "got {reason:?}")
            }
            other => panic!("expected summary mismatch, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_carry_line_numbers() {
        let cases: &[(&str, &str)] = &[
            ("nonsense\nend\n", "expected header"),
            ("# eval-report v1\nwhat is this\nend\n", "unrecognized"),
            ("# eval-report v1\ngame train 3\nend\n", "game line needs"),
            (
                "# eval-report v1\nsplit train accuracy 1 games 0 err0 0 err1 0\nend\n",
                "split line needs",
            ),
            ("# eval-report v1\ncheckpoint a\n", "missing end"),
            (
                "# eval-report v1\nsplit weird accuracy 1 games 0 err0 0 err1 0 err2plus 0\nend\n",
                "unknown split",
            ),
        ];
        for (input, needle) in cases {
            match EvalReport::parse(input) {
                Err(ReportError::Malformed { reason, .. }) => assert!(
                    reason.contains(needle),
                    "error {reason:?} should mention {needle:?} for {input:?}"
                ),
                Ok(_) => panic!("expected error for {input:?}"),
            }
        }
    }

    #[test]
    fn missing_sections_are_rejected() {
        let report = sample_report();
        let text = report.render();
        let without_timing: String = text
            .lines()
            .filter(|l| !l.starts_with("timing_seconds"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(EvalReport::parse(&without_timing).is_err());
        let without_train: String = text
            .lines()
            .filter(|l| !l.starts_with("split train") && !l.starts_with("game train"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(EvalReport::parse(&without_train).is_err());
    }

    #[test]
    fn headline_table_mixes_train_accuracy_with_test_buckets() {
        let report = sample_report();
        let table = render_table(&report);
        let lines: Vec<&str> = table.lines().collect();
        assert!(lines[0].starts_with("Model"));
        assert!(lines[0].contains("n_err=0"));
        // Train accuracy: (30 - 5) / 30 ≈ 0.8333 → "0.83".
        // Test buckets: one perfect game, none with 1 error, one with 3.
        let headline = lines[1];
        assert!(headline.starts_with("GCN"), "got {headline:?}");
        assert!(headline.contains("0.83"));
        let fields: Vec<&str> = headline.split_whitespace().collect();
        assert_eq!(fields, vec!["GCN", "0.83", "1", "0", "1"]);
        // The full matrix lists both splits explicitly.
        assert!(table.contains("train"));
        assert!(table.contains("test"));
        assert!(table.contains("0.8333"));
    }

    #[test]
    fn csv_has_the_exact_header_and_one_row_per_game() {
        let report = sample_report();
        let csv = render_csv(&report.test);
        assert_eq!(csv, "vertex_count,misclassified\n20,0\n15,3\n");
    }

    #[test]
    fn scatter_svg_contains_a_point_per_game() {
        let report = sample_report();
        let svg = render_scatter_svg(&report.test);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("misclassified vertices"));
        assert!(svg.starts_with("<svg"));
        // Degenerate input still renders a valid document.
        let empty = render_scatter_svg(&compute_metrics(&[]));
        assert!(empty.starts_with("<svg") && empty.ends_with("</svg>\n"));
    }
}
