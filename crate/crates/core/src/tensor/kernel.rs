//! Dense product kernel.
//!
//! Every output element is computed as `0.0 + a[i][0]*b[0][j] + a[i][1]*b[1][j] + ...`
//! with the additions performed strictly left to right over `k`. The register
//! tiles only change which elements are in flight at the same time, never the
//! order in which one element's terms are added, so every code path returns the
//! same bits as the textbook triple loop. Rust never contracts `a*b + c` into a
//! fused multiply-add, which keeps the SIMD variants bit-compatible with the
//! portable one.

/// Row-major view of the left operand with explicit strides, so `A^T` can be
/// fed to the kernel without materializing it.
#[derive(Clone, Copy)]
pub(crate) struct Lhs<'a> {
    pub data: &'a [f64],
    pub row_stride: usize,
    pub col_stride: usize,
}

impl<'a> Lhs<'a> {
    pub fn plain(data: &'a [f64], cols: usize) -> Self {
        Lhs { data, row_stride: cols, col_stride: 1 }
    }

    /// `data` holds a `rows x cols` matrix; the view is its transpose.
    pub fn transposed(data: &'a [f64], cols: usize) -> Self {
        Lhs { data, row_stride: 1, col_stride: cols }
    }

    #[inline(always)]
    fn at(&self, i: usize, p: usize) -> f64 {
        self.data[i * self.row_stride + p * self.col_stride]
    }
}

const MR: usize = 4;
const NR_WIDE: usize = 48;
const NR_NARROW: usize = 8;
const NR_MID: usize = 16;
const KC: usize = 256;
/// Rows per packed block; a multiple of `MR`.
const MC: usize = 64;

/// `out = lhs (m x k) * b (k x n)`, or `out += ...` when `accumulate` is set.
/// Accumulating continues each element's sum from its current value, so
/// splitting `k` across calls gives the same bits as one call.
pub(crate) fn gemm(lhs: Lhs<'_>, b: &[f64], m: usize, k: usize, n: usize, out: &mut [f64], accumulate: bool) {
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * n);
    #[cfg(target_arch = "x86_64")]
    {
        if std::is_x86_feature_detected!("avx512f") {
            // SAFETY: the feature was detected at runtime.
            unsafe { gemm_avx512(lhs, b, m, k, n, out, accumulate) };
            return;
        }
        if std::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime.
            unsafe { gemm_avx2(lhs, b, m, k, n, out, accumulate) };
            return;
        }
    }
    gemm_body(lhs, b, m, k, n, out, accumulate);
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn gemm_avx512(lhs: Lhs<'_>, b: &[f64], m: usize, k: usize, n: usize, out: &mut [f64], accumulate: bool) {
    gemm_body(lhs, b, m, k, n, out, accumulate)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn gemm_avx2(lhs: Lhs<'_>, b: &[f64], m: usize, k: usize, n: usize, out: &mut [f64], accumulate: bool) {
    gemm_body(lhs, b, m, k, n, out, accumulate)
}

/// Portable entry point, used by tests to cross-check the SIMD variants.
#[cfg(test)]
pub(crate) fn gemm_portable(lhs: Lhs<'_>, b: &[f64], m: usize, k: usize, n: usize, out: &mut [f64], accumulate: bool) {
    gemm_body(lhs, b, m, k, n, out, accumulate)
}

#[inline(always)]
fn gemm_body(lhs: Lhs<'_>, b: &[f64], m: usize, k: usize, n: usize, out: &mut [f64], accumulate: bool) {
    if k == 0 {
        if !accumulate {
            out.fill(0.0);
        }
        return;
    }
    // Blocking over `k` and over rows keeps a slab of `b` cache resident while
    // it is reused. Each `k` block resumes from the partial sums already in
    // `out`, so the summation chain is unchanged.
    let mut packed = vec![[0.0f64; MR]; KC.min(k) * (MC / MR)];
    let mut p0 = 0;
    while p0 < k {
        let p1 = (p0 + KC).min(k);
        let kb = p1 - p0;
        let fresh = p0 == 0 && !accumulate;
        let b_blk = &b[p0 * n..p1 * n];
        let mut i0 = 0;
        while i0 < m {
            let i1 = (i0 + MC).min(m);
            let groups = (i1 - i0) / MR;
            for g in 0..groups {
                let slab = &mut packed[g * kb..(g + 1) * kb];
                for (p, slot) in (p0..p1).zip(slab.iter_mut()) {
                    for (r, v) in slot.iter_mut().enumerate() {
                        *v = lhs.at(i0 + g * MR + r, p);
                    }
                }
            }
            let tiles = Tiles { packed: &packed, kb, i0, groups };
            let mut j = 0;
            while j + NR_WIDE <= n {
                tiles.run::<NR_WIDE>(b_blk, n, j, fresh, out);
                j += NR_WIDE;
            }
            while j + NR_MID <= n {
                tiles.run::<NR_MID>(b_blk, n, j, fresh, out);
                j += NR_MID;
            }
            while j + NR_NARROW <= n {
                tiles.run::<NR_NARROW>(b_blk, n, j, fresh, out);
                j += NR_NARROW;
            }
            for jj in j..n {
                for g in 0..groups {
                    let a = &packed[g * kb..(g + 1) * kb];
                    for r in 0..MR {
                        let o = (i0 + g * MR + r) * n + jj;
                        let mut acc = if fresh { 0.0 } else { out[o] };
                        for (ap, brow) in a.iter().zip(b_blk.chunks_exact(n)) {
                            acc += ap[r] * brow[jj];
                        }
                        out[o] = acc;
                    }
                }
            }
            for ii in i0 + groups * MR..i1 {
                let row = &mut out[ii * n..(ii + 1) * n];
                if fresh {
                    row.fill(0.0);
                }
                for (p, brow) in (p0..p1).zip(b_blk.chunks_exact(n)) {
                    let av = lhs.at(ii, p);
                    for (o, bv) in row.iter_mut().zip(brow) {
                        *o += av * bv;
                    }
                }
            }
            i0 = i1;
        }
        p0 = p1;
    }
}

/// Packed row groups of one `(k block, row block)` pair.
struct Tiles<'a> {
    packed: &'a [[f64; MR]],
    kb: usize,
    i0: usize,
    groups: usize,
}

impl Tiles<'_> {
    #[inline(always)]
    fn run<const NR: usize>(&self, b_blk: &[f64], n: usize, j: usize, fresh: bool, out: &mut [f64]) {
        for g in 0..self.groups {
            let a = &self.packed[g * self.kb..(g + 1) * self.kb];
            block::<NR>(a, b_blk, n, self.i0 + g * MR, j, fresh, out);
        }
    }
}

/// `MR x NR` register tile over one `k` block.
#[inline(always)]
fn block<const NR: usize>(a: &[[f64; MR]], b_blk: &[f64], n: usize, i: usize, j: usize, fresh: bool, out: &mut [f64]) {
    let mut acc = [[0.0f64; NR]; MR];
    if !fresh {
        for (r, acc_r) in acc.iter_mut().enumerate() {
            *acc_r = out[(i + r) * n + j..(i + r) * n + j + NR].try_into().unwrap();
        }
    }
    for (ap, brow) in a.iter().zip(b_blk.chunks_exact(n)) {
        let row: &[f64; NR] = brow[j..j + NR].try_into().unwrap();
        for r in 0..MR {
            let av = ap[r];
            for q in 0..NR {
                acc[r][q] += av * row[q];
            }
        }
    }
    for (r, acc_r) in acc.iter().enumerate() {
        out[(i + r) * n + j..(i + r) * n + j + NR].copy_from_slice(acc_r);
    }
}
