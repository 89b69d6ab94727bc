//! Fixed-width plain-text layout.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Align {
    Left,
    Right,
}

/// Rows of cells laid out in columns two spaces apart. Widths count
/// characters, and trailing whitespace is dropped from every line.
#[derive(Clone, Debug)]
pub struct Grid {
    align: Vec<Align>,
    rows: Vec<Vec<String>>,
}

impl Grid {
    pub fn new(align: Vec<Align>) -> Self {
        Grid {
            align,
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        assert_eq!(row.len(), self.align.len(), "row width does not match the grid");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let widths: Vec<usize> = (0..self.align.len())
            .map(|i| self.rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &self.rows {
            let mut line = String::new();
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    line.push_str("  ");
                }
                let pad = " ".repeat(widths[i] - cell.chars().count());
                match self.align[i] {
                    Align::Left => {
                        line.push_str(cell);
                        line.push_str(&pad);
                    }
                    Align::Right => {
                        line.push_str(&pad);
                        line.push_str(cell);
                    }
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

/// A right-aligned table whose first column is the row label `1)`, `2)`, …
/// under the heading `n`. Short rows are padded with blank cells.
pub fn numbered(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut grid = Grid::new(vec![Align::Right; headers.len() + 1]);
    grid.push(std::iter::once("n").chain(headers.iter().copied()));
    for (i, row) in rows.iter().enumerate() {
        let mut cells = vec![format!("{})", i + 1)];
        cells.extend(row.iter().cloned());
        cells.resize(headers.len() + 1, String::new());
        grid.push(cells);
    }
    grid.render()
}

/// `{x_1,x_2,…}`.
pub fn set(values: &[u64]) -> String {
    let inner: Vec<String> = values.iter().map(u64::to_string).collect();
    format!("{{{}}}", inner.join(","))
}
