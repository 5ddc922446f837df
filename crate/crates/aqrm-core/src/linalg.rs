//! Symmetric eigensolvers.
//!
//! Three entry points, all returning ascending eigenvalues:
//! * [`sym_eigenvalues`] / [`sym_eigen`] — dense symmetric matrices via
//!   Householder reduction followed by implicit QL (tred2/tql2 lineage).
//! * [`tridiag_eigenvalues`] / [`tridiag_eigen`] — symmetric tridiagonal
//!   input, QL only.
//! * [`band2_eigenvalues`] — symmetric pentadiagonal (semi-bandwidth 2)
//!   input, reduced to tridiagonal by Givens rotations with bulge chasing.
//!   This is the fast path for the interleaved Rabi Hamiltonian, O(n²)
//!   instead of the dense O(n³).

use crate::error::{CoreError, Result};

const MAX_QL_ITERS: usize = 60;

/// Dense symmetric matrix, row-major full storage.
#[derive(Clone, Debug)]
pub struct SymDense {
    n: usize,
    a: Vec<f64>,
}

impl SymDense {
    pub fn zeros(n: usize) -> SymDense {
        SymDense { n, a: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> SymDense {
        let mut m = SymDense::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    /// max |a_ij − a_ji| over the matrix.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    fn check_symmetric(&self) -> Result<()> {
        let asym = self.asymmetry();
        let scale = self.max_abs().max(1e-300);
        if asym > 1e-12 * scale {
            return Err(CoreError::NotSymmetric(asym / scale));
        }
        Ok(())
    }
}

/// Symmetric banded matrix with semi-bandwidth 2 (pentadiagonal).
#[derive(Clone, Debug)]
pub struct SymBand2 {
    pub diag: Vec<f64>,
    pub off1: Vec<f64>,
    pub off2: Vec<f64>,
}

impl SymBand2 {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> SymDense {
        let n = self.n();
        SymDense::from_fn(n, |i, j| {
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            match hi - lo {
                0 => self.diag[lo],
                1 => self.off1[lo],
                2 => self.off2[lo],
                _ => 0.0,
            }
        })
    }
}

/// All eigenvalues of a dense symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &SymDense) -> Result<Vec<f64>> {
    m.check_symmetric()?;
    let (mut d, mut e) = householder_novec(m);
    shift_subdiagonal(&mut e);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Householder output stores e[i] = A[i, i−1]; the QL driver wants e[i]
/// coupling d[i] and d[i+1].
fn shift_subdiagonal(e: &mut [f64]) {
    let n = e.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    if n > 0 {
        e[n - 1] = 0.0;
    }
}

/// Eigen-decomposition of a dense symmetric matrix. Returns ascending
/// eigenvalues and the matrix whose columns are the matching eigenvectors.
pub fn sym_eigen(m: &SymDense) -> Result<(Vec<f64>, SymDense)> {
    m.check_symmetric()?;
    let n = m.n;
    let mut work = m.clone();
    let (mut d, mut e) = householder_withvec(&mut work);
    shift_subdiagonal(&mut e);
    ql_implicit(&mut d, &mut e, Some(&mut work))?;
    // sort ascending, permuting columns alongside
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut z = SymDense::zeros(n);
    for (newcol, &oldcol) in order.iter().enumerate() {
        for r in 0..n {
            z.set(r, newcol, work.get(r, oldcol));
        }
    }
    Ok((vals, z))
}

/// Eigenvalues of a symmetric tridiagonal matrix (diag d, subdiagonal e of
/// length n−1), ascending.
pub fn tridiag_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(e.len() + 1, d.len().max(1), "subdiagonal length mismatch");
    let mut dd = d.to_vec();
    let mut ee = Vec::with_capacity(d.len());
    ee.extend_from_slice(e);
    ee.push(0.0);
    ql_implicit(&mut dd, &mut ee, None)?;
    dd.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(dd)
}

/// Eigen-decomposition of a symmetric tridiagonal matrix.
pub fn tridiag_eigen(d: &[f64], e: &[f64]) -> Result<(Vec<f64>, SymDense)> {
    let n = d.len();
    assert_eq!(e.len() + 1, n.max(1));
    let mut dd = d.to_vec();
    let mut ee = Vec::with_capacity(n);
    ee.extend_from_slice(e);
    ee.push(0.0);
    let mut z = SymDense::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 });
    ql_implicit(&mut dd, &mut ee, Some(&mut z))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| dd[i].partial_cmp(&dd[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| dd[i]).collect();
    let mut zs = SymDense::zeros(n);
    for (newcol, &oldcol) in order.iter().enumerate() {
        for r in 0..n {
            zs.set(r, newcol, z.get(r, oldcol));
        }
    }
    Ok((vals, zs))
}

/// Eigenvalues of a symmetric pentadiagonal matrix, ascending.
pub fn band2_eigenvalues(b: &SymBand2) -> Result<Vec<f64>> {
    let (d, e) = band2_to_tridiagonal(b);
    tridiag_eigenvalues(&d, &e)
}

/// Householder reduction to tridiagonal form, eigenvalues-only variant.
fn householder_novec(m: &SymDense) -> (Vec<f64>, Vec<f64>) {
    let mut work = m.clone();
    householder_core(&mut work, false)
}

fn householder_withvec(work: &mut SymDense) -> (Vec<f64>, Vec<f64>) {
    householder_core(work, true)
}

/// tred2-style reduction. With `accumulate` the input is overwritten by the
/// orthogonal transformation matrix Q such that QᵀAQ is tridiagonal.
fn householder_core(a: &mut SymDense, accumulate: bool) -> (Vec<f64>, Vec<f64>) {
    let n = a.n;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += a.get(i, k).abs();
            }
            if scale == 0.0 {
                e[i] = a.get(i, l);
            } else {
                for k in 0..=l {
                    let v = a.get(i, k) / scale;
                    a.set(i, k, v);
                    h += v * v;
                }
                let f = a.get(i, l);
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a.set(i, l, f - g);
                let mut f_acc = 0.0;
                for j in 0..=l {
                    if accumulate {
                        a.set(j, i, a.get(i, j) / h);
                    }
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a.get(j, k) * a.get(i, k);
                    }
                    for k in (j + 1)..=l {
                        g += a.get(k, j) * a.get(i, k);
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a.get(i, j);
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a.get(i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let v = a.get(j, k) - (f * e[k] + g * a.get(i, k));
                        a.set(j, k, v);
                    }
                }
            }
        } else {
            e[i] = a.get(i, l);
        }
        d[i] = h;
    }
    if accumulate {
        d[0] = 0.0;
    }
    e[0] = 0.0;
    for i in 0..n {
        if accumulate {
            let l = i;
            if d[i] != 0.0 {
                for j in 0..l {
                    let mut g = 0.0;
                    for k in 0..l {
                        g += a.get(i, k) * a.get(k, j);
                    }
                    for k in 0..l {
                        let v = a.get(k, j) - g * a.get(k, i);
                        a.set(k, j, v);
                    }
                }
            }
            d[i] = a.get(i, i);
            a.set(i, i, 1.0);
            for j in 0..l {
                a.set(j, i, 0.0);
                a.set(i, j, 0.0);
            }
        } else {
            d[i] = a.get(i, i);
        }
    }
    (d, e)
}

/// Implicit-shift QL on a tridiagonal matrix; `e[i]` couples `d[i]` and
/// `d[i+1]`, with `e[n−1]` a scratch slot. On return `d` holds unsorted
/// eigenvalues and, when given, `z`'s columns are rotated alongside.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut SymDense>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERS {
                return Err(CoreError::EigenConvergence { iterations: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zm) = z.as_deref_mut() {
                    let nn = zm.n;
                    for k in 0..nn {
                        f = zm.get(k, i + 1);
                        zm.set(k, i + 1, s * zm.get(k, i) + c * f);
                        zm.set(k, i, c * zm.get(k, i) - s * f);
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Reduce a symmetric pentadiagonal matrix to tridiagonal form with Givens
/// rotations, chasing the single bulge each elimination creates.
pub fn band2_to_tridiagonal(b: &SymBand2) -> (Vec<f64>, Vec<f64>) {
    let n = b.n();
    let mut d0 = b.diag.clone();
    let mut d1 = b.off1.clone();
    let mut d2 = b.off2.clone();
    if n < 3 {
        return (d0, d1);
    }
    for k in 0..(n - 2) {
        if d2[k] == 0.0 {
            continue;
        }
        // zero A[k+2, k] with a rotation in the (k+1, k+2) plane; the pivot
        // pair (d1[k], d2[k]) is the row-(p−1) pair of the rotation and is
        // mapped to (r, 0) inside apply_plane_rotation
        let (c, s) = givens(d1[k], d2[k]);
        let mut p = k + 1;
        let mut bulge = apply_plane_rotation(&mut d0, &mut d1, &mut d2, p, c, s, 0.0);
        // chase: the bulge sits at (p, p+3); zero it against A[p, p+2] with
        // the (p+2, p+3) plane, which moves it two rows down
        while bulge != 0.0 && p + 3 < n {
            let (c, s) = givens(d2[p], bulge);
            let b_in = bulge;
            p += 2;
            bulge = apply_plane_rotation(&mut d0, &mut d1, &mut d2, p, c, s, b_in);
        }
    }
    (d0, d1)
}

fn givens(a: f64, bq: f64) -> (f64, f64) {
    let r = a.hypot(bq);
    if r == 0.0 {
        (1.0, 0.0)
    } else {
        (a / r, bq / r)
    }
}

/// Rotate rows/columns (p, q = p+1): x_p ← c x_p + s x_q, x_q ← −s x_p +
/// c x_q. `bulge_in` is the out-of-band entry at (p−2, q); the caller picks
/// (c, s) so that the rotated pair in the pivot row has zero q-component.
/// Returns the new bulge at (p, q+2), or 0 when the band ends first.
fn apply_plane_rotation(
    d0: &mut [f64],
    d1: &mut [f64],
    d2: &mut [f64],
    p: usize,
    c: f64,
    s: f64,
    bulge_in: f64,
) -> f64 {
    let n = d0.len();
    let q = p + 1;
    // row p−2: pair (A[p−2, p], A[p−2, q]) = (d2[p−2], bulge_in); its
    // q-component is annihilated by construction when chasing
    if p >= 2 {
        let t1 = d2[p - 2];
        d2[p - 2] = c * t1 + s * bulge_in;
    }
    // row p−1: pair (A[p−1, p], A[p−1, q]) = (d1[p−1], d2[p−1])
    let t1 = d1[p - 1];
    let t2 = d2[p - 1];
    d1[p - 1] = c * t1 + s * t2;
    d2[p - 1] = -s * t1 + c * t2;
    // 2x2 block
    let app = d0[p];
    let aqq = d0[q];
    let apq = d1[p];
    d0[p] = c * c * app + 2.0 * s * c * apq + s * s * aqq;
    d0[q] = s * s * app - 2.0 * s * c * apq + c * c * aqq;
    d1[p] = (c * c - s * s) * apq + s * c * (aqq - app);
    // couplings to the right
    let mut bulge = 0.0;
    if q + 1 < n {
        let t1 = d2[p]; // A[p, q+1]
        let t2 = d1[q]; // A[q, q+1]
        d2[p] = c * t1 + s * t2;
        d1[q] = -s * t1 + c * t2;
        if q + 2 < n {
            let t3 = d2[q]; // A[q, q+2]
            bulge = s * t3;
            d2[q] = c * t3;
        }
    }
    bulge
}
