//! Persistent boundary matrices over `Q[t]`.
//!
//! A cell born at filtration step `b` appearing in the boundary of a cell
//! born at step `B` contributes `(-1)^i t^(B-b)`, where `i` is the position of
//! the face in the boundary. Column reduction by polynomial elimination
//! yields the rank over `Q(t)` and, through the pivot entries, the
//! persistence pairs.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::complex::Filtration;
use crate::error::{Error, Result};

/// Largest point count accepted by [`persistent_boundary_rank`].
pub const POLY_MAX_POINTS: usize = 64;

/// Dense polynomial with rational coefficients; `coeffs[i]` multiplies `t^i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * t^exp`.
    pub fn monomial(c: i64, exp: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); exp + 1];
        coeffs[exp] = BigRational::from_integer(BigInt::from(c));
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, exp: usize) -> BigRational {
        self.coeffs.get(exp).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Lowest power of `t` with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_monomial(&self) -> bool {
        self.coeffs.iter().filter(|c| !c.is_zero()).count() == 1
    }

    fn add_scaled(&self, other: &Self, scale: &Self) -> Self {
        // self + scale * other
        let prod = scale.mul(other);
        let len = self.coeffs.len().max(prod.coeffs.len());
        Self::from_coeffs((0..len).map(|i| self.coeff(i) + prod.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }

    /// Quotient when `divisor` divides `self` exactly.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return self.is_zero().then(Self::zero);
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] / &lead;
            if q.is_zero() {
                continue;
            }
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &q * c;
            }
            quot[k] = q;
        }
        rem.iter().all(Zero::is_zero).then(|| Self::from_coeffs(quot))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (exp, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let abs = c.abs();
            let var = match exp {
                0 => String::new(),
                1 => "t".to_string(),
                e => format!("t^{e}"),
            };
            if abs.is_one() && exp > 0 {
                f.write_str(&var)?;
            } else {
                write!(f, "{abs}{var}")?;
            }
        }
        Ok(())
    }
}

/// A filtered cell complex described by ordered boundary lists.
///
/// Unlike a Rips filtration it admits parallel edges and arbitrary face
/// orientations, which is what the textbook examples of persistent
/// boundary matrices use.
#[derive(Debug, Clone, Default)]
pub struct CellFiltration {
    cells: Vec<Cell>,
}

#[derive(Debug, Clone)]
struct Cell {
    dim: usize,
    step: usize,
    faces: Vec<usize>,
}

impl CellFiltration {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, step: usize) -> usize {
        self.cells.push(Cell {
            dim: 0,
            step,
            faces: Vec::new(),
        });
        self.cells.len() - 1
    }

    /// Adds a cell whose `i`-th face carries sign `(-1)^i`.
    pub fn add_cell(&mut self, step: usize, faces: Vec<usize>) -> Result<usize> {
        let first = *faces
            .first()
            .ok_or_else(|| Error::InvalidFiltration("a positive-dimensional cell needs faces".into()))?;
        let dim = self.cells.get(first).map(|c| c.dim + 1).ok_or_else(|| {
            Error::InvalidFiltration(format!("face {first} does not exist"))
        })?;
        for &f in &faces {
            let face = self
                .cells
                .get(f)
                .ok_or_else(|| Error::InvalidFiltration(format!("face {f} does not exist")))?;
            if face.dim + 1 != dim {
                return Err(Error::InvalidFiltration("faces of mixed dimension".into()));
            }
            if face.step > step {
                return Err(Error::InvalidFiltration(format!(
                    "face {f} enters at step {} after its coface at step {step}",
                    face.step
                )));
            }
        }
        if self.cells.last().is_some_and(|c| c.step > step) {
            return Err(Error::InvalidFiltration("cells must be added in step order".into()));
        }
        self.cells.push(Cell { dim, step, faces });
        Ok(self.cells.len() - 1)
    }

    /// Oriented edge `tail -> head`: boundary `head - tail`.
    pub fn add_edge(&mut self, step: usize, tail: usize, head: usize) -> Result<usize> {
        self.add_cell(step, vec![head, tail])
    }

    pub fn from_filtration(filt: &Filtration) -> Result<Self> {
        let index = filt.face_index()?;
        let mut steps = Vec::with_capacity(filt.len());
        let mut step = 0;
        let mut last = None;
        for s in filt.simplices() {
            if let Some(prev) = last {
                if s.birth > prev {
                    step += 1;
                }
            }
            last = Some(s.birth);
            steps.push(step);
        }
        let mut out = Self::new();
        for (i, s) in filt.simplices().iter().enumerate() {
            if s.dim() == 0 {
                out.add_vertex(steps[i]);
            } else {
                let faces = index.faces(i).iter().map(|&f| f as usize).collect();
                out.add_cell(steps[i], faces)?;
            }
        }
        Ok(out)
    }

    pub fn step(&self, cell: usize) -> usize {
        self.cells[cell].step
    }

    pub fn cells_of_dim(&self, dim: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].dim == dim).collect()
    }

    /// The `dim`-th persistent boundary matrix, rows and columns in filtration order.
    pub fn boundary_matrix(&self, dim: usize) -> PolyMatrix {
        let rows = if dim == 0 { Vec::new() } else { self.cells_of_dim(dim - 1) };
        let cols = self.cells_of_dim(dim);
        let columns = cols
            .iter()
            .map(|&c| {
                let cell = &self.cells[c];
                let mut column = vec![Polynomial::zero(); rows.len()];
                for (i, &face) in cell.faces.iter().enumerate() {
                    let r = rows.binary_search(&face).expect("face of matching dimension");
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    let term = Polynomial::monomial(sign, cell.step - self.cells[face].step);
                    column[r] = column[r].add_scaled(&term, &Polynomial::constant(1));
                }
                column
            })
            .collect();
        PolyMatrix { rows, cols, columns }
    }
}

/// Column-major matrix of polynomials labelled by cell ids.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub columns: Vec<Vec<Polynomial>>,
}

impl PolyMatrix {
    pub fn get(&self, row: usize, col: usize) -> &Polynomial {
        &self.columns[col][row]
    }

    fn low(column: &[Polynomial]) -> Option<usize> {
        column.iter().rposition(|p| !p.is_zero())
    }

    /// Reduces columns left to right: while column `j` shares its lowest
    /// nonzero row with an earlier column, that entry is eliminated.
    pub fn reduce(&self) -> PolyReduction {
        let mut columns = self.columns.clone();
        let mut pivot_of_row: Vec<Option<usize>> = vec![None; self.rows.len()];
        for j in 0..columns.len() {
            while let Some(low) = Self::low(&columns[j]) {
                let Some(k) = pivot_of_row[low] else {
                    pivot_of_row[low] = Some(j);
                    break;
                };
                let (head, tail) = columns.split_at_mut(j);
                let (pivot_col, col) = (&head[k], &mut tail[0]);
                let lead_k = &pivot_col[low];
                let lead_j = col[low].clone();
                match lead_j.exact_div(lead_k) {
                    Some(q) => {
                        let q = q.neg();
                        for (x, p) in col.iter_mut().zip(pivot_col) {
                            *x = x.add_scaled(p, &q);
                        }
                    }
                    None => {
                        // Fraction-free step: lead_k * col - lead_j * pivot_col.
                        let minus_lead_j = lead_j.neg();
                        for (x, p) in col.iter_mut().zip(pivot_col) {
                            *x = x.mul(lead_k).add_scaled(p, &minus_lead_j);
                        }
                    }
                }
            }
        }
        let rank = columns.iter().filter(|c| Self::low(c).is_some()).count();
        PolyReduction {
            reduced: PolyMatrix {
                rows: self.rows.clone(),
                cols: self.cols.clone(),
                columns,
            },
            rank,
        }
    }

    /// Same matrix with nonzero columns moved to the front, order otherwise kept.
    pub fn compacted(&self) -> PolyMatrix {
        let (nonzero, zero): (Vec<usize>, Vec<usize>) =
            (0..self.columns.len()).partition(|&j| Self::low(&self.columns[j]).is_some());
        let order: Vec<usize> = nonzero.into_iter().chain(zero).collect();
        PolyMatrix {
            rows: self.rows.clone(),
            cols: order.iter().map(|&j| self.cols[j]).collect(),
            columns: order.iter().map(|&j| self.columns[j].clone()).collect(),
        }
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows.len() {
            let cells: Vec<String> = self.columns.iter().map(|c| c[r].to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyReduction {
    pub reduced: PolyMatrix,
    pub rank: usize,
}

impl PolyReduction {
    /// `(row cell, column cell)` for every nonzero reduced column: the class
    /// created by the row cell dies when the column cell enters.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.reduced
            .columns
            .iter()
            .enumerate()
            .filter_map(|(j, c)| PolyMatrix::low(c).map(|r| (self.reduced.rows[r], self.reduced.cols[j])))
            .collect()
    }
}

/// Rank and reduced form of the `dim`-th persistent boundary matrix of a
/// Rips filtration, with filtration steps indexed by distinct birth values.
pub fn persistent_boundary_rank(filt: &Filtration, dim: usize) -> Result<PolyReduction> {
    if dim == 0 {
        return Err(Error::InvalidArgument("boundary dimension must be at least 1".into()));
    }
    if filt.n_points() > POLY_MAX_POINTS {
        return Err(Error::TooLarge {
            n: filt.n_points(),
            max: POLY_MAX_POINTS,
        });
    }
    Ok(CellFiltration::from_filtration(filt)?.boundary_matrix(dim).reduce())
}
