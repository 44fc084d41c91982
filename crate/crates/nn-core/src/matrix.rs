use crate::error::NnError;

/// A dense row-major matrix of `f64`.
///
/// This is the only tensor type in the numeric stack. Row-major layout means
/// `data[r * cols + c]`; rows of network activations are per-vertex feature
/// vectors.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Builds a matrix by evaluating `f(row, col)` everywhere.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row slices. All rows must have equal length;
    /// panics otherwise (this is a literal-construction helper).
    pub fn from_rows(rows: &[&[f64]]) -> Matrix {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(height * width);
        for row in rows {
            assert_eq!(row.len(), width, "ragged rows in matrix literal");
            data.extend_from_slice(row);
        }
        Matrix {
            rows: height,
            cols: width,
            data,
        }
    }

    /// Takes ownership of a flat row-major buffer. Panics if the length is
    /// not `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Matrix {
        assert_eq!(data.len(), rows * cols, "buffer does not match shape");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Applies `f` elementwise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Largest absolute entry; 0 for empty matrices.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, &x| acc.max(x.abs()))
    }

    /// Largest absolute entrywise difference. Panics on shape mismatch
    /// (test/diagnostic helper).
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in comparison");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// `self += scale * other`. Errors on shape mismatch.
    pub fn add_scaled(&mut self, other: &Matrix, scale: f64) -> Result<(), NnError> {
        check_same_shape("add_scaled", self, other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
        Ok(())
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        if self.rows > 8 {
            writeln!(f, "  … {} more rows", self.rows - 8)?;
        }
        write!(f, "]")
    }
}

pub(crate) fn check_same_shape(op: &str, a: &Matrix, b: &Matrix) -> Result<(), NnError> {
    if a.shape() != b.shape() {
        return Err(NnError::ShapeMismatch {
            op: op.to_string(),
            expected: format!("{:?}", a.shape()),
            got: format!("{:?}", b.shape()),
        });
    }
    Ok(())
}

/// `a · bᵀ` — the product used by linear layers (`x · Wᵀ`), where both
/// operands are traversed row-wise, so it reduces to row-dot-row.
pub fn matmul_nt(a: &Matrix, b: &Matrix) -> Result<Matrix, NnError> {
    if a.cols != b.cols {
        return Err(NnError::ShapeMismatch {
            op: "matmul_nt".to_string(),
            expected: format!("inner dimension {}", a.cols),
            got: format!("{}x{} · ({}x{})ᵀ", a.rows, a.cols, b.rows, b.cols),
        });
    }
    let mut out = Matrix::zeros(a.rows, b.rows);
    for r in 0..a.rows {
        let lhs = a.row(r);
        let out_row = out.row_mut(r);
        for (c, cell) in out_row.iter_mut().enumerate() {
            let rhs = b.row(c);
            let mut acc = 0.0;
            for k in 0..lhs.len() {
                acc += lhs[k] * rhs[k];
            }
            *cell = acc;
        }
    }
    Ok(out)
}

/// `a · b`, accumulated row-wise (axpy form) to stay cache-friendly in
/// row-major layout.
pub fn matmul_nn(a: &Matrix, b: &Matrix) -> Result<Matrix, NnError> {
    if a.cols != b.rows {
        return Err(NnError::ShapeMismatch {
            op: "matmul_nn".to_string(),
            expected: format!("inner dimension {}", a.cols),
            got: format!("{}x{} · {}x{}", a.rows, a.cols, b.rows, b.cols),
        });
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    for r in 0..a.rows {
        let lhs = a.row(r);
        let out_row = out.row_mut(r);
        for (k, &scale) in lhs.iter().enumerate() {
            if scale == 0.0 {
                continue;
            }
            let rhs = b.row(k);
            for c in 0..rhs.len() {
                out_row[c] += scale * rhs[c];
            }
        }
    }
    Ok(out)
}

/// `aᵀ · b` — the product used for weight gradients (`dyᵀ · x`).
pub fn matmul_tn(a: &Matrix, b: &Matrix) -> Result<Matrix, NnError> {
    if a.rows != b.rows {
        return Err(NnError::ShapeMismatch {
            op: "matmul_tn".to_string(),
            expected: format!("inner dimension {}", a.rows),
            got: format!("({}x{})ᵀ · {}x{}", a.rows, a.cols, b.rows, b.cols),
        });
    }
    let mut out = Matrix::zeros(a.cols, b.cols);
    for k in 0..a.rows {
        let lhs = a.row(k);
        let rhs = b.row(k);
        for (r, &scale) in lhs.iter().enumerate() {
            if scale == 0.0 {
                continue;
            }
            let out_row = out.row_mut(r);
            for c in 0..rhs.len() {
                out_row[c] += scale * rhs[c];
            }
        }
    }
    Ok(out)
}

/// Column sums as a `1×cols` matrix — the reduction used for bias gradients.
pub fn column_sums(a: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(1, a.cols);
    for r in 0..a.rows {
        let row = a.row(r);
        let acc = out.row_mut(0);
        for c in 0..row.len() {
            acc[c] += row[c];
        }
    }
    out
}
