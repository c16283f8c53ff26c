//! 0/1 transition matrices defining nearest-neighbour tree shifts.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

/// A `d x d` 0/1 matrix, `d >= 2`, irreducible by construction.
///
/// Entry `(i, j)` is 1 when a node labelled `i` may have a child labelled `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransitionMatrix {
    d: usize,
    entries: Vec<bool>,
}

fn strongly_connected(d: usize, entries: &[bool]) -> bool {
    let reach = |forward: bool| {
        let mut seen = vec![false; d];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in 0..d {
                let edge = if forward {
                    entries[i * d + j]
                } else {
                    entries[j * d + i]
                };
                if edge && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

impl TransitionMatrix {
    pub fn new(rows: &[Vec<u8>]) -> Result<Self> {
        let d = rows.len();
        if d < 2 {
            return Err(Error::MalformedMatrix(format!(
                "dimension must be at least 2, got {d}"
            )));
        }
        let mut entries = Vec::with_capacity(d * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::MalformedMatrix(format!(
                    "row {i} has {} entries, expected {d}",
                    row.len()
                )));
            }
            for &v in row {
                match v {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    _ => {
                        return Err(Error::MalformedMatrix(format!(
                            "entry {v} in row {i} is not 0 or 1"
                        )))
                    }
                }
            }
        }
        if !strongly_connected(d, &entries) {
            return Err(Error::Reducible);
        }
        Ok(Self { d, entries })
    }

    /// The hard-square matrix `[[1,1],[1,0]]`: no two adjacent 1s.
    pub fn golden() -> Self {
        Self {
            d: 2,
            entries: vec![true, true, true, false],
        }
    }

    /// All-ones matrix on `d` symbols.
    pub fn full(d: usize) -> Result<Self> {
        Self::new(&vec![vec![1u8; d]; d])
    }

    /// Reads the text format: the dimension on the first line, then `d` rows of
    /// `d` whitespace-separated 0/1 entries. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedMatrix("empty matrix file".into()))?;
        let d: usize = header
            .parse()
            .map_err(|_| Error::MalformedMatrix(format!("bad dimension line {header:?}")))?;
        let mut rows = Vec::with_capacity(d);
        for (i, line) in lines.by_ref().take(d).enumerate() {
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u8>().map_err(|_| {
                        Error::MalformedMatrix(format!("bad entry {t:?} in row {i}"))
                    })
                })
                .collect::<Result<Vec<u8>>>()?;
            rows.push(row);
        }
        if rows.len() != d {
            return Err(Error::MalformedMatrix(format!(
                "expected {d} rows, found {}",
                rows.len()
            )));
        }
        if lines.next().is_some() {
            return Err(Error::MalformedMatrix("trailing data after matrix rows".into()));
        }
        Self::new(&rows)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MalformedMatrix(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Uniformly random 0/1 entries, redrawn until the matrix is irreducible.
    pub fn random_irreducible<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        if d < 2 {
            return Err(Error::arg("random matrix dimension must be at least 2"));
        }
        loop {
            let entries: Vec<bool> = (0..d * d).map(|_| rng.gen_bool(0.5)).collect();
            if strongly_connected(d, &entries) {
                return Ok(Self { d, entries });
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.d + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.entries[i * self.d..(i + 1) * self.d]
    }

    pub fn row_sum(&self, i: usize) -> usize {
        self.row(i).iter().filter(|&&b| b).count()
    }

    pub fn is_full(&self) -> bool {
        self.entries.iter().all(|&b| b)
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.d)
            .map(|i| self.row(i).iter().map(|&b| u8::from(b)).collect())
            .collect()
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.d)?;
        for i in 0..self.d {
            let row: Vec<&str> = self
                .row(i)
                .iter()
                .map(|&b| if b { "1" } else { "0" })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
