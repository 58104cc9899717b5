//! Exact integer linear algebra: dense matrices over arbitrary-precision
//! integers, Smith normal form, and finitely generated abelian groups in
//! invariant-factor normal form.
//!
//! Every operation here is exact; there is no modular shortcut and no
//! floating point anywhere. All values are immutable after construction.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense matrix of arbitrary-precision integers, row-major.
///
/// The universal carrier for maps between lattices. Matrices with zero rows
/// or zero columns are allowed everywhere.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Validation(format!(
                "matrix of shape {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Diagonal matrix of the given shape; surplus diagonal values are ignored.
    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.set(i, i, d.clone());
        }
        m
    }

    /// Convenience constructor from machine integers, mostly for tests and
    /// built-in constructions.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        Self { rows: r, cols: c, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn add(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        IntMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a - b)
            .collect();
        IntMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        let entries = self.entries.iter().map(|a| a * c).collect();
        IntMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Side-by-side concatenation `[self | rhs]`.
    pub fn hconcat(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, rhs.rows, "hconcat row mismatch");
        let mut out = IntMatrix::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..rhs.cols {
                out.set(i, self.cols + j, rhs.get(i, j).clone());
            }
        }
        out
    }

    /// Stacked concatenation, `self` on top.
    pub fn vconcat(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.cols, "vconcat column mismatch");
        let mut entries = self.entries.clone();
        entries.extend(rhs.entries.iter().cloned());
        IntMatrix {
            rows: self.rows + rhs.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn take_rows(&self, range: std::ops::Range<usize>) -> IntMatrix {
        assert!(range.end <= self.rows);
        let mut out = IntMatrix::zeros(range.len(), self.cols);
        for (oi, i) in range.enumerate() {
            for j in 0..self.cols {
                out.set(oi, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn take_cols(&self, range: std::ops::Range<usize>) -> IntMatrix {
        assert!(range.end <= self.cols);
        let mut out = IntMatrix::zeros(self.rows, range.len());
        for i in 0..self.rows {
            for (oj, j) in range.clone().enumerate() {
                out.set(i, oj, self.get(i, j).clone());
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    ///
    /// Deliberately independent of the Smith normal form code path so the two
    /// can cross-check each other.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let swap = (k + 1..n).find(|&i| !a.get(i, k).is_zero());
                match swap {
                    Some(i) => {
                        for j in 0..n {
                            let x = a.get(k, j).clone();
                            let y = a.get(i, j).clone();
                            a.set(k, j, y);
                            a.set(i, j, x);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j);
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    a.set(i, j, q);
                }
            }
            for i in k + 1..n {
                a.set(i, k, BigInt::zero());
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1).clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.determinant().abs().is_one()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A finitely generated abelian group in invariant-factor normal form:
/// free rank plus a divisibility chain d1 | d2 | ... with every di >= 2.
///
/// The representation is canonical, so structural equality is isomorphism.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinAbGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl FinAbGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        let two = BigInt::from(2);
        for d in &torsion {
            if d < &two {
                return Err(Error::Validation(format!(
                    "invariant factor {d} is below 2"
                )));
            }
        }
        for w in torsion.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return Err(Error::Validation(format!(
                    "invariant factors {} and {} break the divisibility chain",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { free_rank, torsion })
    }

    pub fn trivial() -> Self {
        Self { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, torsion: Vec::new() }
    }

    pub fn cyclic(n: u64) -> Self {
        if n <= 1 {
            Self::trivial()
        } else {
            Self { free_rank: 0, torsion: vec![BigInt::from(n)] }
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if !self.is_finite() {
            return None;
        }
        Some(self.torsion.iter().product())
    }

    /// Exponent of the torsion part (1 when torsion-free).
    pub fn exponent(&self) -> BigInt {
        self.torsion.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// Number of elements x with m*x = 0, for finite groups.
    pub fn count_killed_by(&self, m: &BigInt) -> BigInt {
        assert!(self.is_finite(), "torsion count of an infinite group");
        self.torsion.iter().map(|d| d.gcd(m)).product()
    }
}

impl fmt::Display for FinAbGroup {
    /// Canonical rendering: `Z^r + Z/d1 + Z/d2 + ...`, `0` when trivial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Smith normal form data: unimodular U, V with `U * of * V == D`,
/// D diagonal with its nonzero entries forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub of: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries of D.
    pub fn diag(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diag().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Which transforms the Smith worker should maintain.
#[derive(Clone, Copy, Default)]
struct Track {
    u: bool,
    uinv: bool,
    v: bool,
}

struct SmithWorker {
    a: IntMatrix,
    u: Option<IntMatrix>,
    uinv: Option<IntMatrix>,
    v: Option<IntMatrix>,
}

impl SmithWorker {
    fn new(m: &IntMatrix, track: Track) -> Self {
        Self {
            a: m.clone(),
            u: track.u.then(|| IntMatrix::identity(m.rows())),
            uinv: track.uinv.then(|| IntMatrix::identity(m.rows())),
            v: track.v.then(|| IntMatrix::identity(m.cols())),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        swap_rows(&mut self.a, i, j);
        if let Some(u) = &mut self.u {
            swap_rows(u, i, j);
        }
        if let Some(uinv) = &mut self.uinv {
            swap_cols(uinv, i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        swap_cols(&mut self.a, i, j);
        if let Some(v) = &mut self.v {
            swap_cols(v, i, j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        negate_row(&mut self.a, i);
        if let Some(u) = &mut self.u {
            negate_row(u, i);
        }
        if let Some(uinv) = &mut self.uinv {
            negate_col(uinv, i);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        add_row_multiple(&mut self.a, dst, src, q);
        if let Some(u) = &mut self.u {
            add_row_multiple(u, dst, src, q);
        }
        if let Some(uinv) = &mut self.uinv {
            // inverse of the elementary row operation, applied on the right
            let nq = -q;
            add_col_multiple(uinv, src, dst, &nq);
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        add_col_multiple(&mut self.a, dst, src, q);
        if let Some(v) = &mut self.v {
            add_col_multiple(v, dst, src, q);
        }
    }

    /// Least nonzero absolute value in the trailing submatrix, ties broken by
    /// lowest row-major index. Determinism of the whole form rests on this rule.
    fn pivot(&self, from: usize) -> Option<(usize, usize)> {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for i in from..self.a.rows() {
            for j in from..self.a.cols() {
                let e = self.a.get(i, j);
                if e.is_zero() {
                    continue;
                }
                let a = e.abs();
                match &best {
                    Some((b, _, _)) if *b <= a => {}
                    _ => best = Some((a, i, j)),
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn reduce(&mut self) {
        let lim = self.a.rows().min(self.a.cols());
        for t in 0..lim {
            let mut done_block = false;
            loop {
                let Some((pi, pj)) = self.pivot(t) else {
                    done_block = true;
                    break;
                };
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
                if self.a.get(t, t).is_negative() {
                    self.negate_row(t);
                }
                let pivot = self.a.get(t, t).clone();
                let mut dirty = false;
                for i in t + 1..self.a.rows() {
                    if !self.a.get(i, t).is_zero() {
                        let q = self.a.get(i, t).div_floor(&pivot);
                        self.add_row_multiple(i, t, &(-q));
                        if !self.a.get(i, t).is_zero() {
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..self.a.cols() {
                    if !self.a.get(t, j).is_zero() {
                        let q = self.a.get(t, j).div_floor(&pivot);
                        self.add_col_multiple(j, t, &(-q));
                        if !self.a.get(t, j).is_zero() {
                            dirty = true;
                        }
                    }
                }
                if dirty {
                    continue;
                }
                // cross at t is clear; enforce divisibility on the rest
                let offender = (t + 1..self.a.rows())
                    .flat_map(|i| (t + 1..self.a.cols()).map(move |j| (i, j)))
                    .find(|&(i, j)| !(self.a.get(i, j) % &pivot).is_zero());
                match offender {
                    Some((i, _)) => {
                        let one = BigInt::one();
                        self.add_row_multiple(t, i, &one);
                        continue;
                    }
                    None => break,
                }
            }
            if done_block {
                break;
            }
        }
    }
}

fn swap_rows(m: &mut IntMatrix, i: usize, j: usize) {
    for c in 0..m.cols() {
        let x = m.get(i, c).clone();
        let y = m.get(j, c).clone();
        m.set(i, c, y);
        m.set(j, c, x);
    }
}

fn swap_cols(m: &mut IntMatrix, i: usize, j: usize) {
    for r in 0..m.rows() {
        let x = m.get(r, i).clone();
        let y = m.get(r, j).clone();
        m.set(r, i, y);
        m.set(r, j, x);
    }
}

fn negate_row(m: &mut IntMatrix, i: usize) {
    for c in 0..m.cols() {
        let x = -m.get(i, c).clone();
        m.set(i, c, x);
    }
}

fn negate_col(m: &mut IntMatrix, j: usize) {
    for r in 0..m.rows() {
        let x = -m.get(r, j).clone();
        m.set(r, j, x);
    }
}

fn add_row_multiple(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for c in 0..m.cols() {
        let x = m.get(dst, c) + q * m.get(src, c);
        m.set(dst, c, x);
    }
}

fn add_col_multiple(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for r in 0..m.rows() {
        let x = m.get(r, dst) + q * m.get(r, src);
        m.set(r, dst, x);
    }
}

/// Smith normal form. D is the unique invariant-factor diagonal of `m`;
/// U and V are the accumulated unimodular transforms.
pub fn snf(m: &IntMatrix) -> SmithDecomposition {
    let mut w = SmithWorker::new(m, Track { u: true, uinv: false, v: true });
    w.reduce();
    SmithDecomposition {
        u: w.u.unwrap(),
        d: w.a,
        v: w.v.unwrap(),
        of: m.clone(),
    }
}

fn snf_d_only(m: &IntMatrix) -> IntMatrix {
    let mut w = SmithWorker::new(m, Track::default());
    w.reduce();
    w.a
}

fn snf_v_only(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut w = SmithWorker::new(m, Track { v: true, ..Track::default() });
    w.reduce();
    (w.a, w.v.unwrap())
}

fn snf_uinv(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut w = SmithWorker::new(m, Track { uinv: true, ..Track::default() });
    w.reduce();
    (w.a, w.uinv.unwrap())
}

/// Cokernel of `m` as a map Z^cols -> Z^rows: the group Z^rows / im(m)
/// in canonical form.
pub fn cokernel(m: &IntMatrix) -> FinAbGroup {
    let d = snf_d_only(m);
    cokernel_of_diagonal(&d)
}

fn cokernel_of_diagonal(d: &IntMatrix) -> FinAbGroup {
    let lim = d.rows().min(d.cols());
    let one = BigInt::one();
    let mut torsion = Vec::new();
    let mut rank = 0usize;
    for i in 0..lim {
        let e = d.get(i, i);
        if e.is_zero() {
            break;
        }
        rank += 1;
        if *e != one {
            torsion.push(e.clone());
        }
    }
    FinAbGroup {
        free_rank: d.rows() - rank,
        torsion,
    }
}

/// Basis of the integer kernel lattice of `m`, as matrix columns.
///
/// The kernel of a map of lattices is automatically saturated: the returned
/// columns extend to a basis of the full column space, so the quotient by the
/// kernel is torsion-free in the kernel directions.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let (d, v) = snf_v_only(m);
    let lim = d.rows().min(d.cols());
    let rank = (0..lim).take_while(|&i| !d.get(i, i).is_zero()).count();
    v.take_cols(rank..m.cols())
}

/// n-torsion subgroup of a finitely generated abelian group.
pub fn n_torsion(g: &FinAbGroup, n: &BigInt) -> FinAbGroup {
    assert!(n >= &BigInt::one(), "torsion modulus must be positive");
    let one = BigInt::one();
    let torsion = g
        .torsion
        .iter()
        .map(|d| d.gcd(n))
        .filter(|d| *d != one)
        .collect();
    FinAbGroup { free_rank: 0, torsion }
}

/// Full torsion subgroup; the free part is dropped.
pub fn torsion_part(g: &FinAbGroup) -> FinAbGroup {
    FinAbGroup {
        free_rank: 0,
        torsion: g.torsion.clone(),
    }
}

/// Some integer solution x of `m * x = target`, or `None` when there is none.
pub fn solve_linear(m: &IntMatrix, target: &[BigInt]) -> Option<Vec<BigInt>> {
    LatticeSolver::new(m).solve(target)
}

/// Reusable exact solver for `m * x = t` against a fixed matrix.
///
/// Also answers lattice membership: a vector lies in the column lattice of
/// `m` exactly when the system is solvable.
pub struct LatticeSolver {
    u: IntMatrix,
    v: IntMatrix,
    diag: Vec<BigInt>,
    rows: usize,
    cols: usize,
}

impl LatticeSolver {
    pub fn new(m: &IntMatrix) -> Self {
        let dec = {
            let mut w = SmithWorker::new(m, Track { u: true, uinv: false, v: true });
            w.reduce();
            (w.a, w.u.unwrap(), w.v.unwrap())
        };
        let (d, u, v) = dec;
        let lim = d.rows().min(d.cols());
        let diag = (0..lim).map(|i| d.get(i, i).clone()).collect();
        Self {
            u,
            v,
            diag,
            rows: m.rows(),
            cols: m.cols(),
        }
    }

    pub fn solve(&self, target: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(target.len(), self.rows, "target length mismatch");
        let b = self.u.mul_vec(target);
        let mut y = vec![BigInt::zero(); self.cols];
        for (i, bi) in b.iter().enumerate() {
            match self.diag.get(i) {
                Some(d) if !d.is_zero() => {
                    let (q, r) = bi.div_rem(d);
                    if !r.is_zero() {
                        return None;
                    }
                    y[i] = q;
                }
                _ => {
                    if !bi.is_zero() {
                        return None;
                    }
                }
            }
        }
        Some(self.v.mul_vec(&y))
    }

    pub fn contains(&self, target: &[BigInt]) -> bool {
        self.solve(target).is_some()
    }

    /// Solve `m * X = targets` column by column; `None` if any column fails.
    pub fn solve_all(&self, targets: &IntMatrix) -> Option<IntMatrix> {
        assert_eq!(targets.rows(), self.rows);
        let mut out = IntMatrix::zeros(self.cols, targets.cols());
        for j in 0..targets.cols() {
            let x = self.solve(&targets.column(j))?;
            for (i, e) in x.into_iter().enumerate() {
                out.set(i, j, e);
            }
        }
        Some(out)
    }
}

/// Inverse of a unimodular matrix.
///
/// Panics when the input is not unimodular; callers validate first.
pub(crate) fn inverse_unimodular(m: &IntMatrix) -> IntMatrix {
    assert!(m.is_square(), "inverse of non-square matrix");
    let dec = snf(m);
    assert!(
        dec.d == IntMatrix::identity(m.rows()),
        "matrix is not unimodular"
    );
    // u * m * v == I  =>  m^{-1} == v * u
    dec.v.mul(&dec.u)
}

/// A basis (independent columns) for the lattice generated by the columns
/// of `m`.
pub fn column_lattice_basis(m: &IntMatrix) -> IntMatrix {
    let (d, uinv) = snf_uinv(m);
    let lim = d.rows().min(d.cols());
    let rank = (0..lim).take_while(|&i| !d.get(i, i).is_zero()).count();
    let mut out = IntMatrix::zeros(m.rows(), rank);
    for j in 0..rank {
        let dj = d.get(j, j);
        for i in 0..m.rows() {
            out.set(i, j, uinv.get(i, j) * dj);
        }
    }
    out
}

/// Basis of the preimage lattice `{x : m * x lies in the column lattice of sub}`.
pub fn preimage_basis(m: &IntMatrix, sub: &IntMatrix) -> IntMatrix {
    assert_eq!(m.rows(), sub.rows(), "preimage shape mismatch");
    if sub.cols() == 0 {
        return kernel_basis(m);
    }
    let stacked = m.hconcat(sub);
    let k = kernel_basis(&stacked);
    let proj = k.take_rows(0..m.cols());
    column_lattice_basis(&proj)
}

/// Whether two column lattices in the same ambient space are equal.
pub fn lattices_equal(a: &IntMatrix, b: &IntMatrix) -> bool {
    assert_eq!(a.rows(), b.rows(), "ambient mismatch");
    let sa = LatticeSolver::new(a);
    let sb = LatticeSolver::new(b);
    (0..b.cols()).all(|j| sa.contains(&b.column(j)))
        && (0..a.cols()).all(|j| sb.contains(&a.column(j)))
}

/// Quotient of the lattice spanned by `basis` (independent columns) by the
/// sublattice generated by `sub` (columns in the same ambient coordinates).
///
/// Panics if `sub` does not lie inside the span of `basis`; that is an
/// internal bug at every call site.
pub fn quotient_group(basis: &IntMatrix, sub: &IntMatrix) -> FinAbGroup {
    let solver = LatticeSolver::new(basis);
    let rel = solver
        .solve_all(sub)
        .expect("quotient_group: sublattice escapes the ambient lattice");
    cokernel(&rel)
}
