//! Matrices and polynomials over prime fields, plus conjugacy-class data for
//! the full general linear group from canonical forms.

use crate::conjugacy::ClassIdentifier;
use crate::error::Error;
use crate::perm::Perm;
use std::collections::HashMap;

#[inline]
fn modp(x: i64, p: u16) -> u16 {
    let p = p as i64;
    (((x % p) + p) % p) as u16
}

/// Row-major square matrix over F_p, acting on row vectors from the right.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat {
    pub p: u16,
    pub e: usize,
    rows: Vec<u16>,
}

impl Mat {
    pub fn new(p: u16, e: usize, rows: Vec<u16>) -> Mat {
        assert_eq!(rows.len(), e * e);
        let rows = rows.iter().map(|&x| x % p).collect();
        Mat { p, e, rows }
    }

    pub fn identity(p: u16, e: usize) -> Mat {
        let mut rows = vec![0; e * e];
        for i in 0..e {
            rows[i * e + i] = 1;
        }
        Mat { p, e, rows }
    }

    pub fn scalar(p: u16, e: usize, c: u16) -> Mat {
        let mut m = Mat::identity(p, e);
        for i in 0..e {
            m.rows[i * e + i] = c % p;
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> u16 {
        self.rows[i * self.e + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u16) {
        self.rows[i * self.e + j] = v % self.p;
    }

    pub fn entries(&self) -> &[u16] {
        &self.rows
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let e = self.e;
        let p = self.p as u32;
        let mut rows = vec![0u16; e * e];
        for i in 0..e {
            for k in 0..e {
                let a = self.rows[i * e + k] as u32;
                if a == 0 {
                    continue;
                }
                for j in 0..e {
                    let cur = rows[i * e + j] as u32;
                    rows[i * e + j] = ((cur + a * other.rows[k * e + j] as u32) % p) as u16;
                }
            }
        }
        Mat { p: self.p, e, rows }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(&a, &b)| (a + b) % self.p)
            .collect();
        Mat { p: self.p, e: self.e, rows }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(&a, &b)| modp(a as i64 - b as i64, self.p))
            .collect();
        Mat { p: self.p, e: self.e, rows }
    }

    pub fn scale(&self, c: u16) -> Mat {
        let c = (c % self.p) as u32;
        let rows = self
            .rows
            .iter()
            .map(|&a| ((a as u32 * c) % self.p as u32) as u16)
            .collect();
        Mat { p: self.p, e: self.e, rows }
    }

    pub fn pow(&self, mut k: u64) -> Mat {
        let mut acc = Mat::identity(self.p, self.e);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Row vector times matrix.
    pub fn act_row(&self, v: &[u16]) -> Vec<u16> {
        let e = self.e;
        let p = self.p as u32;
        let mut out = vec![0u16; e];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for j in 0..e {
                out[j] = ((out[j] as u32 + vi as u32 * self.rows[i * e + j] as u32) % p) as u16;
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        gauss(self.p, self.e, self.e, &mut self.rows.clone())
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.e
    }

    pub fn inverse(&self) -> Result<Mat, Error> {
        let e = self.e;
        let p = self.p;
        // augmented [A | I], row reduce
        let mut aug = vec![0u16; e * 2 * e];
        for i in 0..e {
            for j in 0..e {
                aug[i * 2 * e + j] = self.rows[i * e + j];
            }
            aug[i * 2 * e + e + i] = 1;
        }
        let width = 2 * e;
        let mut row = 0;
        for col in 0..e {
            let pivot = (row..e).find(|&r| aug[r * width + col] != 0);
            let Some(pr) = pivot else {
                return Err(Error::SingularMatrix(p));
            };
            for j in 0..width {
                aug.swap(row * width + j, pr * width + j);
            }
            let inv = mod_inverse(aug[row * width + col], p);
            for j in 0..width {
                aug[row * width + j] = ((aug[row * width + j] as u32 * inv as u32) % p as u32) as u16;
            }
            for r in 0..e {
                if r != row && aug[r * width + col] != 0 {
                    let f = aug[r * width + col] as i64;
                    for j in 0..width {
                        let v = aug[r * width + j] as i64 - f * aug[row * width + j] as i64;
                        aug[r * width + j] = modp(v, p);
                    }
                }
            }
            row += 1;
        }
        let mut rows = vec![0u16; e * e];
        for i in 0..e {
            for j in 0..e {
                rows[i * e + j] = aug[i * width + e + j];
            }
        }
        Ok(Mat { p, e, rows })
    }

    /// Dimension of the left null space `{v : v A = 0}`.
    pub fn left_nullity(&self) -> usize {
        self.e - self.rank()
    }

    /// Basis of the left null space.
    pub fn left_kernel(&self) -> Vec<Vec<u16>> {
        // left kernel of A = right kernel of A^T; work with transpose rows.
        let e = self.e;
        let mut t = vec![0u16; e * e];
        for i in 0..e {
            for j in 0..e {
                t[j * e + i] = self.rows[i * e + j];
            }
        }
        right_kernel(self.p, e, e, &t)
    }

    /// Solves `x A = b` for a row vector `x`; `None` if inconsistent.
    pub fn solve_left(&self, b: &[u16]) -> Option<Vec<u16>> {
        // x A = b  <=>  A^T x^T = b^T
        let e = self.e;
        let mut t = vec![0u16; e * e];
        for i in 0..e {
            for j in 0..e {
                t[j * e + i] = self.rows[i * e + j];
            }
        }
        solve(self.p, e, e, &t, b)
    }
}

fn mod_inverse(a: u16, p: u16) -> u16 {
    // p prime; fermat
    let mut result = 1u32;
    let mut base = (a % p) as u32;
    let mut exp = (p - 2) as u32;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u32;
        }
        base = base * base % p as u32;
        exp >>= 1;
    }
    result as u16
}

/// In-place row echelon; returns rank. `rows` is `nrows x ncols`.
fn gauss(p: u16, nrows: usize, ncols: usize, rows: &mut [u16]) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..nrows).find(|&r| rows[r * ncols + col] != 0);
        let Some(pr) = pivot else { continue };
        for j in 0..ncols {
            rows.swap(rank * ncols + j, pr * ncols + j);
        }
        let inv = mod_inverse(rows[rank * ncols + col], p);
        for j in 0..ncols {
            rows[rank * ncols + j] =
                ((rows[rank * ncols + j] as u32 * inv as u32) % p as u32) as u16;
        }
        for r in 0..nrows {
            if r != rank && rows[r * ncols + col] != 0 {
                let f = rows[r * ncols + col] as i64;
                for j in 0..ncols {
                    let v = rows[r * ncols + j] as i64 - f * rows[rank * ncols + j] as i64;
                    rows[r * ncols + j] = modp(v, p);
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Basis of `{x : M x^T = 0}` where `M` is `nrows x ncols` (kernel on the right).
fn right_kernel(p: u16, nrows: usize, ncols: usize, m: &[u16]) -> Vec<Vec<u16>> {
    let mut a = m.to_vec();
    let _ = gauss(p, nrows, ncols, &mut a);
    // identify pivot columns
    let mut pivots = Vec::new();
    let mut lead = vec![None; nrows];
    for r in 0..nrows {
        if let Some(c) = (0..ncols).find(|&c| a[r * ncols + c] != 0) {
            lead[r] = Some(c);
            pivots.push(c);
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free {
        let mut v = vec![0u16; ncols];
        v[fc] = 1;
        for r in 0..nrows {
            if let Some(c) = lead[r] {
                // row: x_c + sum coeff * x_free = 0
                let coeff = a[r * ncols + fc];
                v[c] = modp(-(coeff as i64), p);
            }
        }
        basis.push(v);
    }
    basis
}

/// Solves `M x^T = b^T`; returns one solution.
fn solve(p: u16, nrows: usize, ncols: usize, m: &[u16], b: &[u16]) -> Option<Vec<u16>> {
    let width = ncols + 1;
    let mut aug = vec![0u16; nrows * width];
    for r in 0..nrows {
        for c in 0..ncols {
            aug[r * width + c] = m[r * ncols + c];
        }
        aug[r * width + ncols] = b[r];
    }
    let _ = gauss(p, nrows, width, &mut aug);
    // gauss produces fully reduced echelon, so with free variables at 0 the
    // solution reads off the pivot rows directly.
    let mut x = vec![0u16; ncols];
    for r in 0..nrows {
        match (0..width).find(|&c| aug[r * width + c] != 0) {
            Some(c) if c == ncols => return None, // row says 0 = nonzero
            Some(c) => x[c] = aug[r * width + ncols],
            None => {}
        }
    }
    // Recheck against the original system.
    for r in 0..nrows {
        let mut acc = 0u32;
        for c in 0..ncols {
            acc = (acc + m[r * ncols + c] as u32 * x[c] as u32) % p as u32;
        }
        if acc as u16 != b[r] % p {
            return None;
        }
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Polynomials over F_p (dense, low-to-high coefficients)

pub type Poly = Vec<u16>;

fn poly_trim(f: &mut Poly) {
    while f.len() > 1 && *f.last().unwrap() == 0 {
        f.pop();
    }
}

pub fn poly_deg(f: &Poly) -> usize {
    f.len() - 1
}

pub fn poly_mul(p: u16, f: &Poly, g: &Poly) -> Poly {
    let mut out = vec![0u16; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = ((out[i + j] as u32 + a as u32 * b as u32) % p as u32) as u16;
        }
    }
    poly_trim(&mut out);
    out
}

pub fn poly_pow(p: u16, f: &Poly, k: usize) -> Poly {
    let mut acc = vec![1u16];
    for _ in 0..k {
        acc = poly_mul(p, &acc, f);
    }
    acc
}

/// Remainder of `f` modulo monic `g`.
pub fn poly_rem(p: u16, f: &Poly, g: &Poly) -> Poly {
    let mut r = f.clone();
    poly_trim(&mut r);
    let dg = poly_deg(g);
    while poly_deg(&r) >= dg && !(r.len() == 1 && r[0] == 0) {
        let dr = poly_deg(&r);
        let lead = r[dr];
        if lead != 0 {
            let shift = dr - dg;
            for (j, &gc) in g.iter().enumerate() {
                let v = r[shift + j] as i64 - lead as i64 * gc as i64;
                r[shift + j] = modp(v, p);
            }
        }
        poly_trim(&mut r);
        if poly_deg(&r) < dg {
            break;
        }
    }
    r
}

fn poly_is_zero(f: &Poly) -> bool {
    f.iter().all(|&c| c == 0)
}

/// All monic irreducible polynomials over F_p of degree 1..=dmax, excluding
/// `x` itself (the invertibility constraint), ordered by degree then by
/// coefficient vector.
pub fn irreducibles_up_to(p: u16, dmax: usize) -> Vec<Poly> {
    let mut all: Vec<Poly> = Vec::new();
    for d in 1..=dmax {
        let fresh = irreducibles_raw(p, d, &all);
        all.extend(fresh);
    }
    all
}

/// Monic irreducibles of exactly degree `d`, excluding `x`.
pub fn irreducibles(p: u16, d: usize) -> Vec<Poly> {
    irreducibles_up_to(p, d)
        .into_iter()
        .filter(|f| poly_deg(f) == d)
        .collect()
}

fn irreducibles_raw(p: u16, d: usize, smaller: &[Poly]) -> Vec<Poly> {
    let poly_x: Poly = vec![0, 1];
    let mut out = Vec::new();
    let count = (p as u64).pow(d as u32);
    for idx in 0..count {
        let mut f = vec![0u16; d + 1];
        let mut v = idx;
        for c in f.iter_mut().take(d) {
            *c = (v % p as u64) as u16;
            v /= p as u64;
        }
        f[d] = 1;
        if d == 1 {
            // exclude f = x (constant term 0)
            if f[0] != 0 {
                out.push(f);
            }
            continue;
        }
        let reducible = smaller
            .iter()
            .chain(std::iter::once(&poly_x))
            .filter(|g| poly_deg(g) <= d / 2)
            .any(|g| poly_is_zero(&poly_rem(p, &f, g)));
        if !reducible {
            out.push(f);
        }
    }
    out
}

/// Companion matrix of a monic polynomial.
pub fn companion(p: u16, f: &Poly) -> Mat {
    let d = poly_deg(f);
    let mut m = Mat::new(p, d, vec![0; d * d]);
    for i in 0..d - 1 {
        m.set(i, i + 1, 1);
    }
    for j in 0..d {
        m.set(d - 1, j, modp(-(f[j] as i64), p));
    }
    m
}

/// Evaluates `f(A)`.
pub fn eval_poly(a: &Mat, f: &Poly) -> Mat {
    let mut acc = Mat::new(a.p, a.e, vec![0; a.e * a.e]);
    for &c in f.iter().rev() {
        acc = acc.mul(a);
        acc = acc.add(&Mat::scalar(a.p, a.e, c));
    }
    acc
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            cur.push(part);
            rec(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Conjugacy-class data for the full GL(e,p), built from canonical forms
/// (partitions attached to irreducible polynomials) rather than orbit
/// enumeration. Identification uses kernel-dimension invariants, which
/// determine the class exactly.
pub struct GlClasses {
    pub p: u16,
    pub e: usize,
    pub irr: Vec<Poly>,
    /// invariant key -> position in `reps`/`sizes`
    by_invariant: HashMap<Vec<(usize, Vec<usize>)>, usize>,
    pub reps: Vec<Mat>,
    pub sizes: Vec<u128>,
}

impl GlClasses {
    pub fn build(p: u16, e: usize) -> GlClasses {
        let irr = irreducibles_up_to(p, e);
        let parts_cache: Vec<Vec<Vec<usize>>> = (0..=e).map(partitions).collect();

        // DFS over irreducibles in order, assigning a (possibly empty)
        // partition to each until the total degree is e.
        type Shape = Vec<(usize, Vec<usize>, u128)>;
        let mut shapes: Vec<Shape> = Vec::new();
        fn rec(
            irr: &[Poly],
            parts_cache: &[Vec<Vec<usize>>],
            p: u16,
            i: usize,
            remaining: usize,
            cur: &mut Shape,
            shapes: &mut Vec<Shape>,
        ) {
            if remaining == 0 {
                shapes.push(cur.clone());
                return;
            }
            if i == irr.len() {
                return;
            }
            let d = poly_deg(&irr[i]);
            // weight 0: skip this polynomial
            rec(irr, parts_cache, p, i + 1, remaining, cur, shapes);
            let qf = (p as u128).pow(d as u32);
            let mut w = d;
            while w <= remaining {
                for lam in &parts_cache[w / d] {
                    cur.push((i, lam.clone(), qf));
                    rec(irr, parts_cache, p, i + 1, remaining - w, cur, shapes);
                    cur.pop();
                }
                w += d;
            }
        }
        rec(&irr, &parts_cache, p, 0, e, &mut Vec::new(), &mut shapes);

        let gl_order = gl_order(p, e);
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        for shape in &shapes {
            let mut blocks: Vec<Mat> = Vec::new();
            let mut centralizer: u128 = 1;
            for (fi, lam, qf) in shape {
                for &part in lam {
                    let fk = poly_pow(p, &irr[*fi], part);
                    blocks.push(companion(p, &fk));
                }
                centralizer *= centralizer_factor(*qf, lam);
            }
            reps.push(block_diag(p, e, &blocks));
            sizes.push(gl_order / centralizer);
        }
        assert_eq!(
            sizes.iter().sum::<u128>(),
            gl_order,
            "GL class sizes must cover the group"
        );

        let mut by_invariant = HashMap::new();
        for (ci, rep) in reps.iter().enumerate() {
            by_invariant.insert(invariant_key(rep, &irr), ci);
        }
        assert_eq!(by_invariant.len(), reps.len());
        GlClasses {
            p,
            e,
            irr,
            by_invariant,
            reps,
            sizes,
        }
    }

    /// Class position of a matrix.
    pub fn classify(&self, a: &Mat) -> usize {
        *self
            .by_invariant
            .get(&invariant_key(a, &self.irr))
            .expect("every invertible matrix matches a canonical form")
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

pub fn gl_order(p: u16, e: usize) -> u128 {
    let q = p as u128;
    let qe = q.pow(e as u32);
    (0..e).map(|i| qe - q.pow(i as u32)).product()
}

fn block_diag(p: u16, e: usize, blocks: &[Mat]) -> Mat {
    let mut m = Mat::new(p, e, vec![0; e * e]);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.e {
            for j in 0..b.e {
                m.set(off + i, off + j, b.at(i, j));
            }
        }
        off += b.e;
    }
    assert_eq!(off, e);
    m
}

/// `|C_{GL}|` contribution of one irreducible with partition `lam`:
/// `q^(sum min(li,lj)) * prod_k prod_{i=1}^{m_k} (1 - q^-i)` with
/// `m_k` the multiplicity of part `k`.
fn centralizer_factor(qf: u128, lam: &[usize]) -> u128 {
    let mut summin: u32 = 0;
    for &a in lam {
        for &b in lam {
            summin += a.min(b) as u32;
        }
    }
    let mut mult: HashMap<usize, u32> = HashMap::new();
    for &a in lam {
        *mult.entry(a).or_insert(0) += 1;
    }
    let mut denom_exp: u32 = 0;
    let mut prod: u128 = 1;
    for (_, m) in mult {
        for i in 1..=m {
            denom_exp += i;
            prod *= qf.pow(i) - 1;
        }
    }
    qf.pow(summin - denom_exp) * prod
}

/// Kernel-dimension profile `(irreducible, [dim ker f(A)^j])`, a complete
/// similarity invariant.
fn invariant_key(a: &Mat, irr: &[Poly]) -> Vec<(usize, Vec<usize>)> {
    let mut key = Vec::new();
    for (fi, f) in irr.iter().enumerate() {
        let d = poly_deg(f);
        if d > a.e {
            break;
        }
        let fa = eval_poly(a, f);
        if fa.rank() == a.e {
            continue;
        }
        let mut dims = Vec::new();
        let mut power = fa.clone();
        loop {
            let nullity = power.left_nullity();
            dims.push(nullity);
            if nullity == a.e || dims.len() * d >= a.e {
                break;
            }
            let prev = *dims.last().unwrap();
            power = power.mul(&fa);
            if power.left_nullity() == prev {
                break;
            }
        }
        key.push((fi, dims));
    }
    key
}

/// GL(e,p) identification backend over permutations that act linearly.
pub struct GlBackend {
    pub gl: GlClasses,
    pub p: u16,
    pub e: usize,
}

impl GlBackend {
    /// Matrix of a permutation that fixes 0 and acts linearly on the
    /// lexicographic vector encoding.
    pub fn matrix_of(&self, x: &Perm) -> Mat {
        perm_to_matrix(self.p, self.e, x)
    }
}

impl ClassIdentifier for GlBackend {
    fn same_class(&self, x: &Perm, y: &Perm) -> Result<bool, Error> {
        let ax = self.matrix_of(x);
        let ay = self.matrix_of(y);
        Ok(self.gl.classify(&ax) == self.gl.classify(&ay))
    }

    fn conjugator(&self, _x: &Perm, _y: &Perm) -> Result<Option<Perm>, Error> {
        Ok(None) // callers fall back to orbit search
    }
}

// ---------------------------------------------------------------------------
// Vector <-> point encoding (lexicographic, zero vector at index 0)

pub fn point_of_vec(p: u16, e: usize, v: &[u16]) -> u16 {
    let mut idx: u32 = 0;
    for k in 0..e {
        idx = idx * p as u32 + (v[k] % p) as u32;
    }
    idx as u16
}

pub fn vec_of_point(p: u16, e: usize, mut pt: u16) -> Vec<u16> {
    let mut v = vec![0u16; e];
    for k in (0..e).rev() {
        v[k] = pt % p;
        pt /= p;
    }
    v
}

/// Permutation of `p^e` points induced by `v -> v*A + t`.
pub fn affine_perm(a: &Mat, t: &[u16]) -> Perm {
    let p = a.p;
    let e = a.e;
    let n = (p as usize).pow(e as u32);
    let mut images = Vec::with_capacity(n);
    for pt in 0..n as u16 {
        let v = vec_of_point(p, e, pt);
        let mut w = a.act_row(&v);
        for k in 0..e {
            w[k] = (w[k] + t[k]) % p;
        }
        images.push(point_of_vec(p, e, &w));
    }
    Perm::new(images).expect("affine map is a bijection")
}

/// Recovers the matrix of a linear permutation (one fixing the zero vector).
pub fn perm_to_matrix(p: u16, e: usize, x: &Perm) -> Mat {
    let mut rows = vec![0u16; e * e];
    for i in 0..e {
        let mut basis = vec![0u16; e];
        basis[i] = 1;
        let img = vec_of_point(p, e, x.apply(point_of_vec(p, e, &basis)));
        rows[i * e..(i + 1) * e].copy_from_slice(&img);
    }
    Mat { p, e, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_inverse_round_trip() {
        let m = Mat::new(3, 2, vec![1, 1, 1, 2]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(3, 2));
        let singular = Mat::new(3, 2, vec![1, 2, 2, 1]); // det = 1 - 4 = -3 = 0 mod 3
        assert!(singular.inverse().is_err());
    }

    #[test]
    fn solve_and_kernel() {
        let m = Mat::new(5, 2, vec![1, 2, 2, 4]); // rank 1
        assert_eq!(m.rank(), 1);
        assert_eq!(m.left_nullity(), 1);
        let k = m.left_kernel();
        assert_eq!(k.len(), 1);
        for v in &k {
            assert_eq!(m.act_row(v), vec![0, 0]);
        }
        let sol = m.solve_left(&[2, 4]);
        let s = sol.unwrap();
        assert_eq!(m.act_row(&s), vec![2, 4]);
        assert!(m.solve_left(&[1, 0]).is_none());
    }

    #[test]
    fn irreducible_counts_over_f2() {
        assert_eq!(irreducibles(2, 1).len(), 1); // x+1
        assert_eq!(irreducibles(2, 2).len(), 1); // x^2+x+1
        assert_eq!(irreducibles(2, 3).len(), 2);
        assert_eq!(irreducibles(2, 4).len(), 3);
        assert_eq!(irreducibles(2, 5).len(), 6);
    }

    #[test]
    fn gl_class_counts_and_orders() {
        let g23 = GlClasses::build(3, 2);
        assert_eq!(gl_order(3, 2), 48);
        // GL(2,3) has 8 conjugacy classes
        assert_eq!(g23.len(), 8);

        let g52 = GlClasses::build(2, 5);
        assert_eq!(gl_order(2, 5), 9_999_360);
        assert_eq!(g52.len(), 27);
    }

    #[test]
    fn gl_classify_is_conjugation_invariant() {
        let gl = GlClasses::build(2, 3);
        let a = Mat::new(2, 3, vec![1, 1, 0, 0, 1, 0, 0, 0, 1]);
        let g = Mat::new(2, 3, vec![0, 1, 0, 1, 1, 0, 1, 0, 1]);
        assert!(g.is_invertible());
        let conj = g.inverse().unwrap().mul(&a).mul(&g);
        assert_eq!(gl.classify(&a), gl.classify(&conj));
    }

    #[test]
    fn point_encoding_is_lexicographic() {
        assert_eq!(point_of_vec(3, 2, &[0, 0]), 0);
        assert_eq!(point_of_vec(3, 2, &[0, 1]), 1);
        assert_eq!(point_of_vec(3, 2, &[1, 0]), 3);
        assert_eq!(vec_of_point(3, 2, 5), vec![1, 2]);
    }

    #[test]
    fn affine_perm_round_trip() {
        let a = Mat::new(3, 2, vec![1, 1, 1, 2]);
        let perm = affine_perm(&a, &[0, 0]);
        assert_eq!(perm.apply(0), 0);
        let back = perm_to_matrix(3, 2, &perm);
        assert_eq!(back, a);
        // with translation
        let t = affine_perm(&Mat::identity(3, 2), &[1, 2]);
        assert_eq!(t.apply(0), point_of_vec(3, 2, &[1, 2]));
    }
}
