//! Result tables with best / second-best highlighting.

use serde::Serialize;

use crate::registry::Registry;

/// Marker for absent cells (refused or invalid results).
pub const ABSENT: &str = "-/-";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Highlight {
    Best,
    SecondBest,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellFormat {
    Decimal(usize),
    Percent,
}

impl CellFormat {
    pub fn render(self, value: f64) -> String {
        match self {
            CellFormat::Decimal(d) => format!("{value:.d$}"),
            CellFormat::Percent => format!("{value:.2}%"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderboardTable {
    pub corner: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    /// `cells[row][column]`
    pub cells: Vec<Vec<Option<f64>>>,
    pub format: CellFormat,
}

impl LeaderboardTable {
    pub fn new(
        corner: impl Into<String>,
        rows: Vec<String>,
        columns: Vec<String>,
        format: CellFormat,
    ) -> Self {
        let cells = vec![vec![None; columns.len()]; rows.len()];
        LeaderboardTable {
            corner: corner.into(),
            rows,
            columns,
            cells,
            format,
        }
    }

    pub fn set(&mut self, row: usize, column: usize, value: Option<f64>) {
        self.cells[row][column] = value.filter(|v| v.is_finite());
    }

    pub fn column(&self, column: usize) -> Vec<Option<f64>> {
        self.cells.iter().map(|r| r[column]).collect()
    }

    /// `highlights()[row][column]`
    pub fn highlights(&self) -> Vec<Vec<Highlight>> {
        let mut marks = vec![vec![Highlight::None; self.columns.len()]; self.rows.len()];
        for c in 0..self.columns.len() {
            for (r, mark) in highlight_column(&self.column(c)).into_iter().enumerate() {
                marks[r][c] = mark;
            }
        }
        marks
    }

    fn cell_text(&self, row: usize, column: usize) -> String {
        match self.cells[row][column] {
            Some(v) => self.format.render(v),
            None => ABSENT.to_string(),
        }
    }
}

/// Marks the largest value best and the next distinct value second-best.
/// Cells tied on the maximum are all best and nothing is second-best;
/// cells tied on the runner-up value are all second-best.
pub fn highlight_column(values: &[Option<f64>]) -> Vec<Highlight> {
    let mut present: Vec<f64> = values.iter().flatten().copied().collect();
    present.sort_by(|a, b| b.total_cmp(a));
    present.dedup();
    let best = present.first().copied();
    let max_tied = best.is_some_and(|b| values.iter().filter(|v| **v == Some(b)).count() > 1);
    let second = if max_tied {
        None
    } else {
        present.get(1).copied()
    };
    values
        .iter()
        .map(|v| match v {
            Some(x) if Some(*x) == best => Highlight::Best,
            Some(x) if Some(*x) == second => Highlight::SecondBest,
            _ => Highlight::None,
        })
        .collect()
}

/// Output format for a leaderboard.
pub trait TableRenderer: Send + Sync {
    fn name(&self) -> &'static str;
    fn render(&self, table: &LeaderboardTable) -> String;
}

pub struct TextRenderer;
pub struct MarkdownRenderer;
pub struct CsvRenderer;

impl TableRenderer for TextRenderer {
    fn name(&self) -> &'static str {
        "text"
    }

    fn render(&self, table: &LeaderboardTable) -> String {
        let marks = table.highlights();
        let mut grid = vec![std::iter::once(table.corner.clone())
            .chain(table.columns.iter().cloned())
            .collect::<Vec<_>>()];
        for (r, label) in table.rows.iter().enumerate() {
            let mut line = vec![label.clone()];
            for c in 0..table.columns.len() {
                let mut text = table.cell_text(r, c);
                match marks[r][c] {
                    Highlight::Best => text.push_str("**"),
                    Highlight::SecondBest => text.push('*'),
                    Highlight::None => {}
                }
                line.push(text);
            }
            grid.push(line);
        }
        let widths: Vec<usize> = (0..=table.columns.len())
            .map(|c| grid.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, line) in grid.iter().enumerate() {
            let cells: Vec<String> = line
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    if c == 0 {
                        format!("{s:<w$}", w = widths[c])
                    } else {
                        format!("{s:>w$}", w = widths[c])
                    }
                })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
            if i == 0 {
                let total = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
                out.push_str(&"-".repeat(total));
                out.push('\n');
            }
        }
        out.push_str("(** best, * second best)\n");
        out
    }
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

impl TableRenderer for MarkdownRenderer {
    fn name(&self) -> &'static str {
        "markdown"
    }

    fn render(&self, table: &LeaderboardTable) -> String {
        let marks = table.highlights();
        let mut out = String::new();
        let header: Vec<String> = std::iter::once(&table.corner)
            .chain(&table.columns)
            .map(|s| md_escape(s))
            .collect();
        out.push_str(&format!("| {} |\n", header.join(" | ")));
        let align: Vec<&str> = std::iter::once(":---")
            .chain(std::iter::repeat_n("---:", table.columns.len()))
            .collect();
        out.push_str(&format!("| {} |\n", align.join(" | ")));
        for (r, label) in table.rows.iter().enumerate() {
            let mut line = vec![md_escape(label)];
            for c in 0..table.columns.len() {
                let text = table.cell_text(r, c);
                line.push(match marks[r][c] {
                    Highlight::Best => format!("**{text}**"),
                    Highlight::SecondBest => format!("_{text}_"),
                    Highlight::None => text,
                });
            }
            out.push_str(&format!("| {} |\n", line.join(" | ")));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl TableRenderer for CsvRenderer {
    fn name(&self) -> &'static str {
        "csv"
    }

    /// Plain values only; highlight marks are not representable in CSV.
    fn render(&self, table: &LeaderboardTable) -> String {
        let mut out = String::new();
        let header: Vec<String> = std::iter::once(&table.corner)
            .chain(&table.columns)
            .map(|s| csv_field(s))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for (r, label) in table.rows.iter().enumerate() {
            let mut line = vec![csv_field(label)];
            for c in 0..table.columns.len() {
                line.push(match table.cells[r][c] {
                    Some(v) => match table.format {
                        CellFormat::Decimal(d) => format!("{v:.d$}"),
                        CellFormat::Percent => format!("{v:.2}"),
                    },
                    None => ABSENT.to_string(),
                });
            }
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn renderers() -> Registry<(), dyn TableRenderer> {
    Registry::new("table format")
        .with("text", "aligned plain text", |_: &()| Ok(Box::new(TextRenderer) as Box<dyn TableRenderer>))
        .with("markdown", "GitHub-flavoured Markdown", |_: &()| {
            Ok(Box::new(MarkdownRenderer) as Box<dyn TableRenderer>)
        })
        .with("csv", "comma-separated values", |_: &()| Ok(Box::new(CsvRenderer) as Box<dyn TableRenderer>))
}

/// Renders with the named format.
pub fn render_leaderboard(
    table: &LeaderboardTable,
    format: &str,
) -> Result<Vec<u8>, crate::registry::RegistryError> {
    Ok(renderers().build(format, &())?.render(table).into_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Highlight::*;

    #[test]
    fn top_two() {
        assert_eq!(
            highlight_column(&[Some(0.9), Some(0.8), Some(0.7)]),
            vec![Best, SecondBest, None]
        );
    }

    #[test]
    fn tie_on_max() {
        assert_eq!(
            highlight_column(&[Some(0.9), Some(0.9), Some(0.7)]),
            vec![Best, Best, None]
        );
    }

    #[test]
    fn absent_cells_are_skipped() {
        assert_eq!(
            highlight_column(&[Option::None, Some(0.5), Some(0.6)]),
            vec![None, SecondBest, Best]
        );
        assert_eq!(highlight_column(&[Option::None, Option::None]), vec![None, None]);
        assert_eq!(highlight_column(&[Some(0.1)]), vec![Best]);
    }

    fn sample() -> LeaderboardTable {
        let mut t = LeaderboardTable::new(
            "Model",
            vec!["alpha".into(), "beta".into(), "gamma".into()],
            vec!["KonIQ".into(), "ISTA".into()],
            CellFormat::Decimal(4),
        );
        t.set(0, 0, Some(0.9));
        t.set(1, 0, Some(0.8));
        t.set(2, 0, Some(0.7));
        t.set(0, 1, Some(0.5));
        t.set(2, 1, Some(0.6));
        t
    }

    #[test]
    fn markdown_rendering() {
        let md = String::from_utf8(render_leaderboard(&sample(), "markdown").unwrap()).unwrap();
        assert_eq!(
            md,
            "| Model | KonIQ | ISTA |\n\
             | :--- | ---: | ---: |\n\
             | alpha | **0.9000** | _0.5000_ |\n\
             | beta | _0.8000_ | -/- |\n\
             | gamma | 0.7000 | **0.6000** |\n"
        );
    }

    #[test]
    fn text_and_csv_rendering() {
        let text = String::from_utf8(render_leaderboard(&sample(), "text").unwrap()).unwrap();
        assert!(text.contains("0.9000**"));
        assert!(text.contains("-/-"));
        let csv = String::from_utf8(render_leaderboard(&sample(), "csv").unwrap()).unwrap();
        assert_eq!(
            csv,
            "Model,KonIQ,ISTA\nalpha,0.9000,0.5000\nbeta,0.8000,-/-\ngamma,0.7000,0.6000\n"
        );
        assert!(render_leaderboard(&sample(), "html").is_err());
    }
}
