//! Exact linear algebra over the rationals.
//!
//! Matrices keep only their nonzero entries, row by row, because nearly every
//! operator in this crate is a signed sum of a handful of basis words.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

type Row = Vec<(usize, Rational)>;
type WorkRow = BTreeMap<usize, Rational>;

#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Row>,
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{}", self.rows, self.cols)?;
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Accumulates entries (duplicates are summed) and produces a matrix.
pub struct MatrixBuilder {
    rows: usize,
    cols: usize,
    data: Vec<WorkRow>,
}

impl MatrixBuilder {
    pub fn new(rows: usize, cols: usize) -> Self {
        MatrixBuilder { rows, cols, data: vec![WorkRow::new(); rows] }
    }

    pub fn add(&mut self, i: usize, j: usize, v: &Rational) {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) outside {}x{}", self.rows, self.cols);
        if v.is_zero() {
            return;
        }
        add_entry(&mut self.data[i], j, v);
    }

    pub fn add_block(&mut self, r0: usize, c0: usize, m: &ExactMatrix) {
        self.add_block_scaled(r0, c0, m, &Rational::one());
    }

    pub fn add_block_scaled(&mut self, r0: usize, c0: usize, m: &ExactMatrix, s: &Rational) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols, "block does not fit");
        if s.is_zero() {
            return;
        }
        for (i, row) in m.data.iter().enumerate() {
            for (j, v) in row {
                add_entry(&mut self.data[r0 + i], c0 + j, &(v * s));
            }
        }
    }

    pub fn build(self) -> ExactMatrix {
        let data = self.data.into_iter().map(|r| r.into_iter().collect()).collect();
        ExactMatrix { rows: self.rows, cols: self.cols, data }
    }
}

fn add_entry(row: &mut WorkRow, j: usize, v: &Rational) {
    match row.get_mut(&j) {
        Some(x) => {
            *x += v;
            if x.is_zero() {
                row.remove(&j);
            }
        }
        None => {
            row.insert(j, v.clone());
        }
    }
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &Rational::one())
    }

    pub fn scalar(n: usize, s: &Rational) -> Self {
        let data = (0..n).map(|i| if s.is_zero() { Vec::new() } else { vec![(i, s.clone())] }).collect();
        ExactMatrix { rows: n, cols: n, data }
    }

    /// Row-major dense constructor.
    pub fn from_dense(rows: usize, cols: usize, entries: &[Rational]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let data = (0..rows)
            .map(|i| {
                (0..cols)
                    .filter_map(|j| {
                        let v = &entries[i * cols + j];
                        (!v.is_zero()).then(|| (j, v.clone()))
                    })
                    .collect()
            })
            .collect();
        ExactMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let flat: Vec<Rational> = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                r.iter().cloned()
            })
            .collect();
        Self::from_dense(rows.len(), cols, &flat)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rs: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(&rs)
    }

    /// Matrix whose columns are the given (dense) vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut b = MatrixBuilder::new(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                b.add(i, j, v);
            }
        }
        b.build()
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        match self.data[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.data[i][k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn row_entries(&self, i: usize) -> &[(usize, Rational)] {
        &self.data[i]
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                out[i][*j] = v.clone();
            }
        }
        out
    }

    /// Row-major list of all entries.
    pub fn entries(&self) -> Vec<Rational> {
        self.to_dense().into_iter().flatten().collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns_sparse(&self) -> Vec<WorkRow> {
        let mut out = vec![WorkRow::new(); self.cols];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                out[*j].insert(i, v.clone());
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Vec::new(); self.cols];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                data[*j].push((i, v.clone()));
            }
        }
        ExactMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch {:?} * {:?}", self.shape(), other.shape());
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = WorkRow::new();
                for (k, a) in row {
                    for (j, b) in &other.data[*k] {
                        add_entry(&mut acc, *j, &(a * b));
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        ExactMatrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        self.data.iter().map(|row| row.iter().fold(Rational::zero(), |acc, (j, a)| acc + a * &v[*j])).collect()
    }

    fn combine(&self, other: &ExactMatrix, s: &Rational) -> ExactMatrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sum");
        let mut b = MatrixBuilder::new(self.rows, self.cols);
        b.add_block(0, 0, self);
        b.add_block_scaled(0, 0, other, s);
        b.build()
    }

    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        self.combine(other, &Rational::one())
    }

    pub fn sub(&self, other: &ExactMatrix) -> ExactMatrix {
        self.combine(other, &-Rational::one())
    }

    pub fn scale(&self, s: &Rational) -> ExactMatrix {
        if s.is_zero() {
            return ExactMatrix::zeros(self.rows, self.cols);
        }
        let data = self.data.iter().map(|r| r.iter().map(|(j, v)| (*j, v * s)).collect()).collect();
        ExactMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> ExactMatrix {
        self.scale(&-Rational::one())
    }

    pub fn pow(&self, k: usize) -> ExactMatrix {
        assert!(self.is_square());
        let mut out = ExactMatrix::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> ExactMatrix {
        let t = self.transpose();
        let data = cols.iter().map(|&c| t.data[c].clone()).collect();
        ExactMatrix { rows: cols.len(), cols: self.rows, data }.transpose()
    }

    pub fn select_rows(&self, rows: &[usize]) -> ExactMatrix {
        let data = rows.iter().map(|&r| self.data[r].clone()).collect();
        ExactMatrix { rows: rows.len(), cols: self.cols, data }
    }

    pub fn hstack(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.rows, other.rows);
        let mut b = MatrixBuilder::new(self.rows, self.cols + other.cols);
        b.add_block(0, 0, self);
        b.add_block(0, self.cols, other);
        b.build()
    }

    pub fn vstack(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.cols);
        let mut b = MatrixBuilder::new(self.rows + other.rows, self.cols);
        b.add_block(0, 0, self);
        b.add_block(self.rows, 0, other);
        b.build()
    }

    fn sparse_rows(&self) -> impl Iterator<Item = WorkRow> + '_ {
        self.data.iter().map(|r| r.iter().cloned().collect())
    }
}

/// Incremental echelon basis.  Each stored row has a distinct leading column
/// and, after `into_rref`, zeros in every other pivot column.
#[derive(Clone, Debug, Default)]
struct Echelon {
    by_pivot: BTreeMap<usize, WorkRow>,
}

impl Echelon {
    /// Eliminates every pivot column from `v`.
    fn reduce(&self, mut v: WorkRow) -> WorkRow {
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).map(|(c, _)| *c).find(|c| self.by_pivot.contains_key(c));
            let Some(c) = next else { break };
            let coeff = v[&c].clone();
            for (j, a) in &self.by_pivot[&c] {
                add_entry(&mut v, *j, &-(a * &coeff));
            }
            cursor = c + 1;
        }
        v
    }

    /// Adds `v` to the span; returns true when the rank grew.
    fn insert(&mut self, v: WorkRow) -> bool {
        let v = self.reduce(v);
        let Some((&c, lead)) = v.iter().next() else { return false };
        let inv = lead.recip();
        let row: WorkRow = v.into_iter().map(|(j, a)| (j, a * &inv)).collect();
        self.by_pivot.insert(c, row);
        true
    }

    fn rank(&self) -> usize {
        self.by_pivot.len()
    }

    fn into_rref(mut self) -> Vec<(usize, WorkRow)> {
        let pivots: Vec<usize> = self.by_pivot.keys().rev().cloned().collect();
        for &p in &pivots {
            let prow = self.by_pivot[&p].clone();
            for (_, row) in self.by_pivot.range_mut(..p) {
                if let Some(c) = row.get(&p).cloned() {
                    for (j, a) in &prow {
                        add_entry(row, *j, &-(a * &c));
                    }
                }
            }
        }
        self.by_pivot.into_iter().collect()
    }
}

pub fn rank(m: &ExactMatrix) -> usize {
    let mut e = Echelon::default();
    if m.rows <= m.cols {
        for r in m.sparse_rows() {
            e.insert(r);
        }
    } else {
        for c in m.columns_sparse() {
            e.insert(c);
        }
    }
    e.rank()
}

/// A linear subspace of ℚ^ambient, stored as the reduced row echelon form of
/// its basis (so two equal subspaces have identical storage).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    pivots: Vec<usize>,
    rows: Vec<Row>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, pivots: Vec::new(), rows: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_echelon(ambient, {
            let mut e = Echelon::default();
            for i in 0..ambient {
                e.insert(std::iter::once((i, Rational::one())).collect());
            }
            e
        })
    }

    fn from_echelon(ambient: usize, e: Echelon) -> Self {
        let (pivots, rows) = e.into_rref().into_iter().map(|(p, r)| (p, r.into_iter().collect())).unzip();
        Subspace { ambient, pivots, rows }
    }

    fn from_work_rows(ambient: usize, vs: impl IntoIterator<Item = WorkRow>) -> Self {
        let mut e = Echelon::default();
        for v in vs {
            e.insert(v);
        }
        Self::from_echelon(ambient, e)
    }

    pub fn from_vectors(ambient: usize, vs: &[Vec<Rational>]) -> Self {
        Self::from_work_rows(ambient, vs.iter().map(|v| dense_to_work(v)))
    }

    /// Column space of `m`.
    pub fn column_space(m: &ExactMatrix) -> Self {
        Self::from_work_rows(m.rows, m.columns_sparse())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| work_to_dense(&r.iter().cloned().collect(), self.ambient)).collect()
    }

    /// Basis vectors as the columns of an ambient × dim matrix.
    pub fn basis_matrix(&self) -> ExactMatrix {
        ExactMatrix { rows: self.dim(), cols: self.ambient, data: self.rows.clone() }.transpose()
    }

    fn reduce_work(&self, v: &WorkRow) -> WorkRow {
        let mut out = v.clone();
        for (p, row) in self.pivots.iter().zip(&self.rows) {
            if let Some(c) = v.get(p) {
                for (j, a) in row {
                    add_entry(&mut out, *j, &-(a * c));
                }
            }
        }
        out
    }

    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        work_to_dense(&self.reduce_work(&dense_to_work(v)), self.ambient)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient);
        self.reduce_work(&dense_to_work(v)).is_empty()
    }

    /// Coordinates of `v` in the stored basis, or None if `v` is outside.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        self.contains(v).then(|| self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.reduce_work(&r.iter().cloned().collect()).is_empty())
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let all = self.rows.iter().chain(&other.rows).map(|r| r.iter().cloned().collect());
        Self::from_work_rows(self.ambient, all)
    }

    /// Image of this subspace under `m`.
    pub fn image_under(&self, m: &ExactMatrix) -> Subspace {
        Subspace::column_space(&m.mul(&self.basis_matrix()))
    }
}

fn dense_to_work(v: &[Rational]) -> WorkRow {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

fn work_to_dense(v: &WorkRow, n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

pub fn kernel_basis(m: &ExactMatrix) -> Subspace {
    let mut e = Echelon::default();
    for r in m.sparse_rows() {
        e.insert(r);
    }
    let rref = e.into_rref();
    let pivot_cols: std::collections::BTreeSet<usize> = rref.iter().map(|(p, _)| *p).collect();
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivot_cols.contains(c)).collect();
    // column f of the RREF, read off row by row
    let mut by_col: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
    for (p, row) in &rref {
        for (j, a) in row {
            if *j != *p {
                by_col.entry(*j).or_default().push((*p, a.clone()));
            }
        }
    }
    let vs = free.iter().map(|&f| {
        let mut v = WorkRow::new();
        v.insert(f, Rational::one());
        if let Some(entries) = by_col.get(&f) {
            for (p, a) in entries {
                v.insert(*p, -a.clone());
            }
        }
        v
    });
    Subspace::from_work_rows(m.cols, vs.collect::<Vec<_>>())
}

pub fn image_basis(m: &ExactMatrix) -> Subspace {
    Subspace::column_space(m)
}

/// dim ker(d_out) − rank(d_in) at the spot between the two maps.
pub fn homology_dim(d_in: &ExactMatrix, d_out: &ExactMatrix) -> Result<usize> {
    check_composable(d_in, d_out)?;
    let spot = d_in.rows;
    Ok(spot - rank(d_out) - rank(d_in))
}

fn check_composable(d_in: &ExactMatrix, d_out: &ExactMatrix) -> Result<()> {
    if d_out.cols != d_in.rows {
        return Err(Error::CompositionNotZero(format!(
            "shapes {:?} then {:?} do not meet",
            d_in.shape(),
            d_out.shape()
        )));
    }
    if !d_out.mul(d_in).is_zero() {
        return Err(Error::CompositionNotZero(format!("spot of dimension {}", d_in.rows)));
    }
    Ok(())
}

/// Splits the ambient space into ker((K−I)²) and im((K−I)²).
pub fn generalized_eigen_split(k: &ExactMatrix) -> Result<(Subspace, Subspace)> {
    assert!(k.is_square());
    let n = k.rows;
    let s = k.sub(&ExactMatrix::identity(n));
    let q = s.mul(&s);
    let ker = kernel_basis(&q);
    let im = image_basis(&q);
    if ker.dim() + im.dim() != n || ker.sum(&im).dim() != n {
        return Err(Error::NotComplementary { ker: ker.dim(), im: im.dim(), ambient: n });
    }
    Ok((ker, im))
}

/// Projection onto `onto` along the complementary subspace `along`.
pub fn projector(onto: &Subspace, along: &Subspace) -> Result<ExactMatrix> {
    let n = onto.ambient;
    let basis = onto.basis_matrix().hstack(&along.basis_matrix());
    let inv = inverse(&basis).ok_or(Error::NotComplementary { ker: onto.dim(), im: along.dim(), ambient: n })?;
    let keep: Vec<usize> = (0..onto.dim()).collect();
    Ok(onto.basis_matrix().mul(&inv.select_rows(&keep)))
}

pub fn inverse(m: &ExactMatrix) -> Option<ExactMatrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows;
    let mut e = Echelon::default();
    for (i, r) in m.sparse_rows().enumerate() {
        let mut aug = r;
        aug.insert(n + i, Rational::one());
        e.insert(aug);
    }
    let rref = e.into_rref();
    if rref.len() != n || rref.iter().enumerate().any(|(i, (p, _))| *p != i) {
        return None;
    }
    let mut b = MatrixBuilder::new(n, n);
    for (i, (_, row)) in rref.iter().enumerate() {
        for (j, a) in row.range(n..) {
            b.add(i, j - n, a);
        }
    }
    Some(b.build())
}

/// Horner evaluation of c₀ + c₁X + … + c_kX^k at a square matrix.
pub fn matrix_poly_eval(k: &ExactMatrix, coeffs: &[Rational]) -> ExactMatrix {
    assert!(k.is_square());
    let n = k.rows;
    let mut acc = ExactMatrix::zeros(n, n);
    for c in coeffs.iter().rev() {
        acc = acc.mul(k).add(&ExactMatrix::scalar(n, c));
    }
    acc
}

/// Homology at one spot of a complex with a fixed basis: boundaries in RREF
/// and a canonical set of cycle representatives for the quotient.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    boundaries: Subspace,
    reps: Subspace,
    d_out: ExactMatrix,
}

impl HomologyBasis {
    pub fn new(d_in: &ExactMatrix, d_out: &ExactMatrix) -> Result<Self> {
        check_composable(d_in, d_out)?;
        let boundaries = image_basis(d_in);
        let cycles = kernel_basis(d_out);
        let reduced = cycles.rows.iter().map(|r| boundaries.reduce_work(&r.iter().cloned().collect()));
        let reps = Subspace::from_work_rows(d_in.rows, reduced.collect::<Vec<_>>());
        Ok(HomologyBasis { boundaries, reps, d_out: d_out.clone() })
    }

    pub fn dim(&self) -> usize {
        self.reps.dim()
    }

    pub fn spot_dim(&self) -> usize {
        self.boundaries.ambient
    }

    pub fn is_cycle(&self, z: &[Rational]) -> bool {
        self.d_out.mul_vec(z).iter().all(|x| x.is_zero())
    }

    pub fn is_boundary(&self, z: &[Rational]) -> bool {
        self.boundaries.contains(z)
    }

    pub fn boundaries(&self) -> &Subspace {
        &self.boundaries
    }

    /// Cycle representatives of a basis of homology, as columns.
    pub fn representatives(&self) -> ExactMatrix {
        self.reps.basis_matrix()
    }

    pub fn coordinates(&self, z: &[Rational]) -> Result<Vec<Rational>> {
        if !self.is_cycle(z) {
            return Err(Error::NotACycle);
        }
        let r = self.boundaries.reduce(z);
        Ok(self.reps.pivots.iter().map(|&p| r[p].clone()).collect())
    }
}

/// Matrix of the map induced on homology by the chain-level map `f`.
pub fn induced_map(src: &HomologyBasis, tgt: &HomologyBasis, f: &ExactMatrix) -> Result<ExactMatrix> {
    assert_eq!(f.cols, src.spot_dim());
    assert_eq!(f.rows, tgt.spot_dim());
    let images = f.mul(&src.representatives());
    let mut cols = Vec::with_capacity(src.dim());
    for j in 0..src.dim() {
        cols.push(tgt.coordinates(&images.column(j))?);
    }
    Ok(ExactMatrix::from_columns(tgt.dim(), &cols))
}

/// True when `f` sends every cycle of `src` to a boundary of `tgt`.
pub fn vanishes_on_homology(src: &HomologyBasis, tgt: &HomologyBasis, f: &ExactMatrix) -> bool {
    let images = f.mul(&src.representatives());
    (0..images.ncols()).all(|j| tgt.is_boundary(&images.column(j)))
}

/// Rank of the map induced on homology (cycles to classes).
pub fn induced_rank(src: &HomologyBasis, tgt: &HomologyBasis, f: &ExactMatrix) -> Result<usize> {
    Ok(rank(&induced_map(src, tgt, f)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_small_cases() {
        assert_eq!(rank(&ExactMatrix::identity(2)), 2);
        assert_eq!(rank(&ExactMatrix::from_i64(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&ExactMatrix::zeros(3, 5)), 0);
    }

    #[test]
    fn kernel_and_image_small_cases() {
        assert_eq!(kernel_basis(&ExactMatrix::zeros(3, 3)).dim(), 3);
        assert_eq!(kernel_basis(&ExactMatrix::identity(4)).dim(), 0);
        let k = kernel_basis(&ExactMatrix::from_i64(&[&[1, 1]]));
        assert_eq!(k.basis(), vec![vec![int(1), int(-1)]]);
        let im = image_basis(&ExactMatrix::from_i64(&[&[1], &[2]]));
        assert_eq!(im.basis(), vec![vec![int(1), int(2)]]);
        assert_eq!(image_basis(&ExactMatrix::zeros(2, 2)).dim(), 0);
        assert_eq!(image_basis(&ExactMatrix::identity(2)).dim(), 2);
    }

    #[test]
    fn homology_dim_cases() {
        let z = ExactMatrix::zeros(4, 4);
        assert_eq!(homology_dim(&z, &z).unwrap(), 4);
        let id = ExactMatrix::identity(3);
        assert_eq!(homology_dim(&id, &ExactMatrix::zeros(2, 3)).unwrap(), 0);
        assert!(matches!(homology_dim(&id, &id), Err(Error::CompositionNotZero(_))));
    }

    #[test]
    fn eigen_split_cases() {
        let (k, i) = generalized_eigen_split(&ExactMatrix::identity(3)).unwrap();
        assert_eq!((k.dim(), i.dim()), (3, 0));
        let (k, i) = generalized_eigen_split(&ExactMatrix::scalar(2, &int(-1))).unwrap();
        assert_eq!((k.dim(), i.dim()), (0, 2));
        // a 3x3 Jordan block at 1 is not split by the square
        let j = ExactMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        assert!(generalized_eigen_split(&j).is_err());
    }

    #[test]
    fn poly_eval_cases() {
        let id = ExactMatrix::identity(2);
        assert!(matrix_poly_eval(&id, &[int(-1), int(1)]).is_zero());
        let swap = ExactMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(matrix_poly_eval(&swap, &[int(0), int(0), int(1)]), id);
    }

    #[test]
    fn inverse_and_projector() {
        let m = ExactMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), ExactMatrix::identity(2));
        assert!(inverse(&ExactMatrix::from_i64(&[&[1, 2], &[2, 4]])).is_none());
        let a = Subspace::from_vectors(2, &[vec![int(1), int(1)]]);
        let b = Subspace::from_vectors(2, &[vec![int(1), int(0)]]);
        let p = projector(&a, &b).unwrap();
        assert_eq!(p.mul(&p), p);
        assert_eq!(p.mul_vec(&[int(0), int(1)]), vec![int(1), int(1)]);
    }

    #[test]
    fn homology_coordinates() {
        // circle: two vertices, two edges
        let d1 = ExactMatrix::from_i64(&[&[-1, -1], &[1, 1]]);
        let d0 = ExactMatrix::zeros(0, 2);
        let h1 = HomologyBasis::new(&ExactMatrix::zeros(2, 0), &d1).unwrap();
        let h0 = HomologyBasis::new(&d1, &d0).unwrap();
        assert_eq!((h1.dim(), h0.dim()), (1, 1));
        assert_eq!(h1.coordinates(&[int(2), int(-2)]).unwrap().len(), 1);
        assert!(h1.coordinates(&[int(1), int(0)]).is_err());
    }
}
