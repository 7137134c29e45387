//! Point counts #W(F_q) by summing fiber sizes over the base ℙ¹×ℙ¹ of the
//! projection that forgets the third pair.
//!
//! The fiber over a base point is the zero set of α w² + β w u + γ u² in
//! ℙ¹(F_q). Over an affine base point (x, y) the coefficients α, γ and β²
//! only depend on X = x² and Y = y², which is what the table-mode loop
//! exploits.

mod checkpoint;

use std::ops::Range;
use std::path::PathBuf;

use thiserror::Error;

use crate::forms::{FiberQuadratic, Mk3Form, TriprojPoint};
use crate::gf::{FieldCtx, GfError, ZechElem, ZechField};
use crate::ring::Field;

pub use checkpoint::{CheckpointError, CheckpointState, CHECKPOINT_VERSION};

/// Default number of fibers processed between checkpoint writes.
pub const CHECKPOINT_FIBERS: u64 = 1 << 30;

#[derive(Debug, Error)]
pub enum CountError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("form vanishes identically modulo {0}")]
    FormVanishes(u64),
    #[error("row range {start}..{end} exceeds the {rows} base rows")]
    BadRange { start: u64, end: u64, rows: u64 },
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("could not build thread pool: {0}")]
    ThreadPool(String),
}

/// Zeros of α w² + β w u + γ u² in ℙ¹(F_q).
pub fn count_roots_in_p1<F: Field>(field: &F, q: &FiberQuadratic<F::Elem>) -> u64 {
    let order = field.order().expect("finite field");
    if !field.is_zero(&q.alpha) {
        let disc = field.sub(&field.square(&q.beta), &field.mul(&field.from_i64(4), &field.mul(&q.alpha, &q.gamma)));
        return (1 + field.quadratic_character(&disc) as i64) as u64;
    }
    if !field.is_zero(&q.beta) {
        2
    } else if !field.is_zero(&q.gamma) {
        1
    } else {
        order + 1
    }
}

/// The points of ℙ¹(F_q): affine elements followed by (1:0).
pub fn projective_line<F: Field>(field: &F, affine: &[F::Elem]) -> Vec<(F::Elem, F::Elem)> {
    affine
        .iter()
        .map(|x| (x.clone(), field.one()))
        .chain(std::iter::once((field.one(), field.zero())))
        .collect()
}

/// Reference count with any field backend, fibering along `axis`.
pub fn count_points_fibered<F: Field>(field: &F, form: &Mk3Form, axis: usize, affine: &[F::Elem]) -> u64 {
    let line = projective_line(field, affine);
    let mut total = 0;
    for u in &line {
        for v in &line {
            let pt = match axis {
                0 => [line[0].clone(), u.clone(), v.clone()],
                1 => [u.clone(), line[0].clone(), v.clone()],
                _ => [u.clone(), v.clone(), line[0].clone()],
            };
            let q = form.fiber_at(field, &TriprojPoint { pairs: pt }, axis);
            total += count_roots_in_p1(field, &q);
        }
    }
    total
}

#[derive(Debug, Clone)]
pub struct CountJob {
    pub form: Mk3Form,
    pub p: u64,
    pub n: usize,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Enumerate base orbits under x ↦ −x, y ↦ −y and x ↔ y instead of all
    /// base points.
    pub symmetry_reduction: bool,
    /// Restrict to a sub-range of base rows (see [`CountJob::row_count`]).
    pub rows: Option<Range<u64>>,
    pub checkpoint: Option<CheckpointConfig>,
}

#[derive(Debug, Clone)]
pub struct CheckpointConfig {
    pub path: PathBuf,
    pub resume: bool,
    pub every_fibers: u64,
}

impl CountJob {
    pub fn new(form: Mk3Form, p: u64, n: usize) -> Self {
        CountJob { form, p, n, threads: None, symmetry_reduction: false, rows: None, checkpoint: None }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_symmetry_reduction(mut self, on: bool) -> Self {
        self.symmetry_reduction = on;
        self
    }

    /// Number of base rows: q + 1 unreduced, (q + 1)/2 + 1 reduced.
    pub fn row_count(&self, q: u64) -> u64 {
        if self.symmetry_reduction {
            (q - 1) / 2 + 2
        } else {
            q + 1
        }
    }
}

/// Precomputed table-mode data for one job.
pub struct Counter {
    field: ZechField,
    q: u64,
    order: u32,
    a: ZechElem,
    b: ZechElem,
    d: ZechElem,
    e: ZechElem,
    c_sq: ZechElem,
    minus_four: ZechElem,
    reduced: bool,
}

impl Counter {
    pub fn new(job: &CountJob) -> Result<Self, CountError> {
        let ctx = FieldCtx::new(job.p, job.n)?;
        let field = ZechField::new(ctx)?;
        Self::with_field(job, field)
    }

    pub fn with_field(job: &CountJob, field: ZechField) -> Result<Self, CountError> {
        let prime = crate::ring::PrimeField::new(job.p);
        if job.form.vanishes_in(&prime) {
            return Err(CountError::FormVanishes(job.p));
        }
        let q = field.q();
        let [a, b, c, d, e] = job.form.coeffs().map(|v| field.from_int(v));
        let c_sq = field.square(c);
        let minus_four = field.from_int(&(-4).into());
        Ok(Counter { order: (q - 1) as u32, q, a, b, d, e, c_sq, minus_four, reduced: job.symmetry_reduction, field })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn rows(&self) -> u64 {
        if self.reduced {
            (self.q - 1) / 2 + 2
        } else {
            self.q + 1
        }
    }

    /// Fibers per row, used for checkpoint pacing.
    pub fn fibers_per_row(&self) -> u64 {
        if self.reduced {
            self.q.div_ceil(2) + 1
        } else {
            self.q + 1
        }
    }

    #[inline]
    fn roots(&self, alpha: ZechElem, beta_sq: ZechElem, gamma: ZechElem) -> u64 {
        let f = &self.field;
        if !alpha.is_zero() {
            let disc = f.add(beta_sq, f.mul(self.minus_four, f.mul(alpha, gamma)));
            return (1 + f.chi(disc) as i64) as u64;
        }
        if !beta_sq.is_zero() {
            2
        } else if !gamma.is_zero() {
            1
        } else {
            self.q + 1
        }
    }

    /// Fiber size over an affine base point given X = x², Y = y².
    #[inline]
    fn affine_fiber(&self, a1: ZechElem, a0: ZechElem, g0: ZechElem, cc: ZechElem, y_sq: ZechElem) -> u64 {
        let f = &self.field;
        let alpha = f.add(f.mul(a1, y_sq), a0);
        let gamma = f.add(f.mul(a0, y_sq), g0);
        self.roots(alpha, f.mul(cc, y_sq), gamma)
    }

    /// Fiber size when one base pair is (1:0) and the other has square X.
    #[inline]
    fn infinite_fiber(&self, x_sq: ZechElem) -> u64 {
        let f = &self.field;
        self.roots(f.add(f.mul(self.a, x_sq), self.b), ZechElem::ZERO, f.add(f.mul(self.b, x_sq), self.d))
    }

    fn square_of_index(&self, i: u64) -> ZechElem {
        // Index 0 is x = 0; index i ≥ 1 is x = g^(i-1).
        if i == 0 {
            ZechElem::ZERO
        } else {
            self.field.from_log((2 * (i - 1) % self.order as u64) as u32)
        }
    }

    /// Sum of fiber sizes over one base row.
    pub fn row_sum(&self, row: u64) -> u64 {
        if self.reduced {
            self.reduced_row_sum(row)
        } else {
            self.full_row_sum(row)
        }
    }

    fn full_row_sum(&self, row: u64) -> u64 {
        let f = &self.field;
        if row == self.q {
            // x = ∞: the fiber over y only depends on y².
            let mut s = self.roots(self.a, ZechElem::ZERO, self.b);
            for i in 0..self.q {
                s += self.infinite_fiber(self.square_of_index(i));
            }
            return s;
        }
        let x_sq = self.square_of_index(row);
        let a1 = f.add(f.mul(self.a, x_sq), self.b);
        let a0 = f.add(f.mul(self.b, x_sq), self.d);
        let g0 = f.add(f.mul(self.d, x_sq), self.e);
        let cc = f.mul(self.c_sq, x_sq);
        let mut s = self.infinite_fiber(x_sq);
        s += self.roots(a0, ZechElem::ZERO, g0);
        let order = self.order;
        let mut y_log = 0u32;
        for _ in 0..order {
            s += self.affine_fiber(a1, a0, g0, cc, f.from_log(y_log));
            y_log += 2;
            if y_log >= order {
                y_log -= order;
            }
        }
        s
    }

    /// Row t of the reduced enumeration. Rows 0..=(q-1)/2 carry X = 0 and
    /// the nonzero squares g^(2(t-1)); the last row gathers every fiber
    /// with a point at infinity.
    fn reduced_row_sum(&self, row: u64) -> u64 {
        let f = &self.field;
        let half = (self.q - 1) / 2;
        let weight = |t: u64| if t == 0 { 1 } else { 2 };
        let square = |t: u64| {
            if t == 0 {
                ZechElem::ZERO
            } else {
                f.from_log((2 * (t - 1)) as u32)
            }
        };
        if row == half + 1 {
            let mut s = self.roots(self.a, ZechElem::ZERO, self.b);
            for t in 0..=half {
                s += 2 * weight(t) * self.infinite_fiber(square(t));
            }
            return s;
        }
        let x_sq = square(row);
        let a1 = f.add(f.mul(self.a, x_sq), self.b);
        let a0 = f.add(f.mul(self.b, x_sq), self.d);
        let g0 = f.add(f.mul(self.d, x_sq), self.e);
        let cc = f.mul(self.c_sq, x_sq);
        if row == 0 {
            let mut s = self.roots(a0, ZechElem::ZERO, g0);
            for t in 1..=half {
                s += 4 * self.affine_fiber(a1, a0, g0, cc, square(t));
            }
            return s;
        }
        let mut off_diagonal = 0u64;
        let mut y_log = 2 * (row as u32 - 1);
        for _ in (row + 1)..=half {
            y_log += 2;
            off_diagonal += self.affine_fiber(a1, a0, g0, cc, f.from_log(y_log));
        }
        4 * self.affine_fiber(a1, a0, g0, cc, x_sq) + 8 * off_diagonal
    }

    /// Sum over a contiguous block of rows, in parallel when enabled.
    pub fn block_sum(&self, rows: Range<u64>) -> u64 {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            rows.into_par_iter().map(|r| self.row_sum(r)).sum()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.block_sum_sequential(rows)
        }
    }

    pub fn block_sum_sequential(&self, rows: Range<u64>) -> u64 {
        rows.map(|r| self.row_sum(r)).sum()
    }
}

/// Count projective points of the surface over F_{p^n}.
pub fn count_points(job: &CountJob) -> Result<u64, CountError> {
    let counter = Counter::new(job)?;
    run_job(job, &counter)
}

fn run_job(job: &CountJob, counter: &Counter) -> Result<u64, CountError> {
    let rows = counter.rows();
    let range = job.rows.clone().unwrap_or(0..rows);
    if range.start > range.end || range.end > rows {
        return Err(CountError::BadRange { start: range.start, end: range.end, rows });
    }
    let work = || -> Result<u64, CountError> {
        match &job.checkpoint {
            None => Ok(counter.block_sum(range.clone())),
            Some(cfg) => checkpoint::run_with_checkpoints(job, counter, range.clone(), cfg),
        }
    };
    match job.threads {
        #[cfg(feature = "parallel")]
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| CountError::ThreadPool(e.to_string()))?
            .install(work),
        _ => work(),
    }
}

/// Counts fibering along each of the three axes with the polynomial
/// backend. All three agree for symmetric forms.
pub fn count_points_all_axes(job: &CountJob) -> Result<[u64; 3], CountError> {
    let ctx = FieldCtx::new(job.p, job.n)?;
    count_points_all_axes_in(&ctx, &job.form)
}

pub fn count_points_all_axes_in(ctx: &FieldCtx, form: &Mk3Form) -> Result<[u64; 3], CountError> {
    let prime = crate::ring::PrimeField::new(ctx.p());
    if form.vanishes_in(&prime) {
        return Err(CountError::FormVanishes(ctx.p()));
    }
    let affine: Vec<_> = ctx.enumerate().collect();
    Ok(std::array::from_fn(|axis| count_points_fibered(ctx, form, axis, &affine)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::FamilyParams;
    use crate::ring::PrimeField;

    #[test]
    fn roots_in_p1_examples() {
        let f = PrimeField::new(7);
        let fq = |a: i64, b: i64, c: i64| FiberQuadratic {
            alpha: f.reduce_i128(a as i128),
            beta: f.reduce_i128(b as i128),
            gamma: f.reduce_i128(c as i128),
        };
        assert_eq!(count_roots_in_p1(&f, &fq(0, 0, 0)), 8);
        assert_eq!(count_roots_in_p1(&f, &fq(1, 0, -1)), 2);
        assert_eq!(count_roots_in_p1(&f, &fq(1, 0, -3)), 0);
        assert_eq!(count_roots_in_p1(&f, &fq(0, 1, 5)), 2);
        assert_eq!(count_roots_in_p1(&f, &fq(0, 0, 5)), 1);
    }

    #[test]
    fn reference_family_small_fields() {
        let form = FamilyParams::reference(1).expand();
        assert_eq!(count_points(&CountJob::new(form.clone(), 7, 1)).unwrap(), 43);
        assert_eq!(count_points(&CountJob::new(form.clone(), 7, 2)).unwrap(), 2843);
        let reduced = CountJob::new(form, 7, 2).with_symmetry_reduction(true);
        assert_eq!(count_points(&reduced).unwrap(), 2843);
    }
}
