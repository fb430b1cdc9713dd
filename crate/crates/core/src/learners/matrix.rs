use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Dense `rows x cols` matrix of raw 8-bit attribute values, row-major.
///
/// A column-major copy and per-column sort orders are built on first use
/// by the tree learners and then shared by every fit on the same matrix.
#[derive(Debug)]
pub struct AttributeMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
    index: OnceLock<ColumnIndex>,
}

#[derive(Debug)]
pub(crate) struct ColumnIndex {
    /// Column-major values: `columns[f * rows + r]`.
    pub columns: Vec<u8>,
    /// Per column, row indices sorted by value (ties in row order):
    /// `order[f * rows .. (f + 1) * rows]`.
    pub order: Vec<u32>,
}

impl Clone for AttributeMatrix {
    fn clone(&self) -> Self {
        AttributeMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
            index: OnceLock::new(),
        }
    }
}

impl PartialEq for AttributeMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl AttributeMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if rows > u32::MAX as usize {
            return Err(Error::InvalidConfig("too many rows".into()));
        }
        Ok(AttributeMatrix {
            rows,
            cols,
            data,
            index: OnceLock::new(),
        })
    }

    /// Stacks equally long rows.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    pub(crate) fn column_index(&self) -> &ColumnIndex {
        self.index.get_or_init(|| {
            let (n, d) = (self.rows, self.cols);
            let mut columns = vec![0u8; n * d];
            for r in 0..n {
                for (f, &v) in self.row(r).iter().enumerate() {
                    columns[f * n + r] = v;
                }
            }
            // Counting sort per column keeps equal values in row order.
            let mut order = vec![0u32; n * d];
            let mut counts = [0usize; 257];
            for f in 0..d {
                let col = &columns[f * n..(f + 1) * n];
                counts.fill(0);
                for &v in col {
                    counts[v as usize + 1] += 1;
                }
                for i in 1..257 {
                    counts[i] += counts[i - 1];
                }
                let out = &mut order[f * n..(f + 1) * n];
                for (r, &v) in col.iter().enumerate() {
                    out[counts[v as usize]] = r as u32;
                    counts[v as usize] += 1;
                }
            }
            ColumnIndex { columns, order }
        })
    }
}

/// Attributes plus one target per row.
#[derive(Debug, Clone, Copy)]
pub struct TrainingMatrix<'a> {
    x: &'a AttributeMatrix,
    y: &'a [f64],
}

impl<'a> TrainingMatrix<'a> {
    /// Requires at least one row, at least one column and one target per row.
    pub fn new(x: &'a AttributeMatrix, y: &'a [f64]) -> Result<Self> {
        if x.rows() == 0 {
            return Err(Error::InsufficientData("training matrix has no rows".into()));
        }
        if x.cols() == 0 {
            return Err(Error::InsufficientData("training matrix has no attributes".into()));
        }
        if y.len() != x.rows() {
            return Err(Error::Shape {
                expected: x.rows(),
                got: y.len(),
            });
        }
        Ok(TrainingMatrix { x, y })
    }

    pub fn x(&self) -> &'a AttributeMatrix {
        self.x
    }

    pub fn y(&self) -> &'a [f64] {
        self.y
    }

    pub fn rows(&self) -> usize {
        self.x.rows()
    }

    pub fn cols(&self) -> usize {
        self.x.cols()
    }
}
