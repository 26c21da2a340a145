//! Compensated, fixed-order summation and the chunked executor contract.
//!
//! Every parallel reduction in the crate splits its index range into chunks
//! of [`CHUNK`] items, sums each chunk with [`CompensatedSum`] in ascending
//! order and folds the chunk results in chunk order. The executor only
//! decides where chunks run, never how they are combined.

use alloc::vec::Vec;
use core::ops::Range;
use num_complex::Complex64;

/// Items per chunk in chunked reductions.
pub const CHUNK: usize = 1 << 14;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Fold another partial sum into this one.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of complex values, one accumulator per component.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexSum {
    pub re: CompensatedSum,
    pub im: CompensatedSum,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Runs `n` independent jobs and returns their results in job order.
pub trait Executor: Sync {
    fn map_jobs<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map_jobs<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(job).collect()
    }
}

/// Splits `range` into fixed chunks.
pub fn chunks(range: Range<i64>) -> impl Iterator<Item = Range<i64>> + Clone {
    blocks(range, CHUNK)
}

/// Splits `range` into consecutive blocks of `block` indices.
pub fn blocks(range: Range<i64>, block: usize) -> impl Iterator<Item = Range<i64>> + Clone {
    let start = range.start;
    let end = range.end.max(range.start);
    let n = ((end - start) as usize).div_ceil(block);
    (0..n).map(move |c| {
        let lo = start + (c * block) as i64;
        lo..(lo + block as i64).min(end)
    })
}

/// Chunked, order-fixed real reduction of `term` over `range`.
pub fn chunked_sum<E, F>(exec: &E, range: Range<i64>, term: F) -> CompensatedSum
where
    E: Executor + ?Sized,
    F: Fn(i64) -> f64 + Sync + Send,
{
    blocked_sum(exec, range, CHUNK, term)
}

/// Like [`chunked_sum`] with a caller-chosen block size, for loops whose
/// terms are themselves expensive.
pub fn blocked_sum<E, F>(exec: &E, range: Range<i64>, block: usize, term: F) -> CompensatedSum
where
    E: Executor + ?Sized,
    F: Fn(i64) -> f64 + Sync + Send,
{
    let pieces: Vec<Range<i64>> = blocks(range, block).collect();
    let partials = exec.map_jobs(pieces.len(), |c| {
        pieces[c].clone().map(&term).collect::<CompensatedSum>()
    });
    let mut total = CompensatedSum::new();
    for p in &partials {
        total.merge(p);
    }
    total
}

/// Exact integer reduction over blocks.
pub fn blocked_count<E, F>(exec: &E, range: Range<i64>, block: usize, term: F) -> u64
where
    E: Executor + ?Sized,
    F: Fn(i64) -> u64 + Sync + Send,
{
    let pieces: Vec<Range<i64>> = blocks(range, block).collect();
    exec.map_jobs(pieces.len(), |c| pieces[c].clone().map(&term).sum::<u64>())
        .into_iter()
        .sum()
}

/// Chunked, order-fixed complex reduction. The first error in index order wins.
pub fn chunked_complex_sum<E, F, Err>(
    exec: &E,
    range: Range<i64>,
    term: F,
) -> Result<ComplexSum, Err>
where
    E: Executor + ?Sized,
    F: Fn(i64) -> Result<Complex64, Err> + Sync + Send,
    Err: Send,
{
    let pieces: Vec<Range<i64>> = chunks(range).collect();
    let partials = exec.map_jobs(pieces.len(), |c| {
        let mut s = ComplexSum::default();
        for i in pieces[c].clone() {
            s.add(term(i)?);
        }
        Ok(s)
    });
    let mut total = ComplexSum::default();
    for p in partials {
        total.merge(&p?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..1_000_000 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-10).abs() < 1e-18);
    }

    #[test]
    fn chunks_cover_range_exactly() {
        let total: i64 = chunks(-5..(3 * CHUNK as i64 + 7)).map(|r| r.end - r.start).sum();
        assert_eq!(total, 3 * CHUNK as i64 + 12);
        assert_eq!(chunks(4..4).count(), 0);
    }

    #[test]
    fn chunked_sum_of_integers_is_exact() {
        let s = chunked_sum(&Serial, 1..100_001, |i| i as f64);
        assert_eq!(s.value(), 5_000_050_000.0);
    }
}
