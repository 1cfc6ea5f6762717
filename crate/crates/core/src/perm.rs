//! Permutations on `0..n` with GAP-style composition (act on the right).

use crate::error::Error;
use std::fmt;

/// A permutation of the points `0..degree`, stored as an image array.
///
/// Composition is left-to-right: `(p * q)(i) = q(p(i))`, so permutations act
/// on points from the right, matching `i^(p*q) = (i^p)^q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Box<[u16]>,
}

impl Perm {
    /// Builds a permutation from an image array, checking bijectivity.
    pub fn new(images: Vec<u16>) -> Result<Perm, Error> {
        let n = images.len();
        if n > u16::MAX as usize {
            return Err(Error::DegreeTooLarge(n));
        }
        let mut seen = vec![false; n];
        for &x in &images {
            if (x as usize) >= n || seen[x as usize] {
                return Err(Error::NotAPermutation);
            }
            seen[x as usize] = true;
        }
        Ok(Perm {
            images: images.into_boxed_slice(),
        })
    }

    pub fn identity(n: usize) -> Perm {
        Perm {
            images: (0..n as u16).collect(),
        }
    }

    /// From disjoint-cycle data given 0-based.
    pub fn from_cycles(n: usize, cycles: &[Vec<u16>]) -> Result<Perm, Error> {
        let mut images: Vec<u16> = (0..n as u16).collect();
        for c in cycles {
            for i in 0..c.len() {
                let from = c[i] as usize;
                if from >= n {
                    return Err(Error::NotAPermutation);
                }
                images[from] = c[(i + 1) % c.len()];
            }
        }
        Perm::new(images)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, point: u16) -> u16 {
        self.images[point as usize]
    }

    pub fn images(&self) -> &[u16] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self * other`, applying `self` first: `(self * other)(i) = other(self(i))`.
    pub fn mul(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        let images = self
            .images
            .iter()
            .map(|&i| other.images[i as usize])
            .collect();
        Perm { images }
    }

    /// Like [`Perm::mul`] but reuses `out`'s buffer.
    pub fn mul_into(&self, other: &Perm, out: &mut Vec<u16>) {
        out.clear();
        out.extend(self.images.iter().map(|&i| other.images[i as usize]));
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u16;
        }
        Perm {
            images: inv.into_boxed_slice(),
        }
    }

    /// Conjugate `self^g = g^-1 * self * g`.
    pub fn conj(&self, g: &Perm) -> Perm {
        // (self^g)(g(i)) = g(self(i))
        let mut images = vec![0u16; self.images.len()];
        for i in 0..self.images.len() {
            images[g.images[i] as usize] = g.images[self.images[i] as usize];
        }
        Perm {
            images: images.into_boxed_slice(),
        }
    }

    /// Writes `self^g` into `out` without allocating.
    pub fn conj_into(&self, g: &Perm, out: &mut Vec<u16>) {
        out.clear();
        out.resize(self.images.len(), 0);
        for i in 0..self.images.len() {
            out[g.images[i] as usize] = g.images[self.images[i] as usize];
        }
    }

    /// Commutation test without forming products.
    pub fn commutes_with(&self, other: &Perm) -> bool {
        (0..self.images.len() as u16)
            .all(|i| other.images[self.apply(i) as usize] == self.images[other.apply(i) as usize])
    }

    /// Cycle lengths including fixed points, sorted ascending.
    pub fn cycle_type(&self) -> Vec<u16> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut lens = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u16;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                len += 1;
                p = self.images[p] as usize;
            }
            lens.push(len);
        }
        lens.sort_unstable();
        lens
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        self.cycle_type().len()
    }

    /// Permutation index `ind x = degree - (number of cycles)`: the minimal
    /// number of 2-cycles whose product is `x`.
    pub fn index(&self) -> usize {
        self.degree() - self.cycle_count()
    }

    /// Number of fixed points.
    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i == x as usize)
            .count()
    }

    pub fn order(&self) -> u64 {
        self.cycle_type()
            .iter()
            .fold(1u64, |acc, &l| num_lcm(acc, l as u64))
    }

    pub fn pow(&self, k: u64) -> Perm {
        let mut acc = Perm::identity(self.degree());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Cycle-notation string, 1-based points, `()` for the identity.
    pub fn cycle_string(&self) -> String {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut p = start;
            let mut first = true;
            while !seen[p] {
                seen[p] = true;
                if !first {
                    out.push(',');
                }
                out.push_str(&(p + 1).to_string());
                first = false;
                p = self.images[p] as usize;
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    /// Parses cycle notation with 1-based points, e.g. `(1,2)(3,4)`.
    pub fn parse_cycles(s: &str, degree: usize) -> Result<Perm, Error> {
        let s = s.trim();
        if s == "()" || s.is_empty() {
            return Ok(Perm::identity(degree));
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::parse(format!("expected '(' in {rest:?}")))?;
            let close = rest
                .find(')')
                .ok_or_else(|| Error::parse(format!("unclosed cycle in {rest:?}")))?;
            let body = &rest[open + 1..close];
            let mut cyc = Vec::new();
            for tok in body.split(',') {
                let v: usize = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(format!("bad point {tok:?}")))?;
                if v == 0 || v > degree {
                    return Err(Error::parse(format!("point {v} out of range 1..{degree}")));
                }
                cyc.push((v - 1) as u16);
            }
            if cyc.len() > 1 {
                cycles.push(cyc);
            }
            rest = &rest[close + 1..];
        }
        Perm::from_cycles(degree, &cycles)
    }

    /// Image-list string with 1-based points: `[2, 1, 3]`.
    pub fn image_string(&self) -> String {
        let items: Vec<String> = self.images.iter().map(|&x| (x + 1).to_string()).collect();
        format!("[{}]", items.join(", "))
    }

    /// Parses a 1-based image list such as `[2, 1, 3]`.
    pub fn parse_images(s: &str) -> Result<Perm, Error> {
        let s = s.trim();
        let body = s
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::parse("image list must be bracketed".into()))?;
        let mut images = Vec::new();
        for tok in body.split(',') {
            let v: usize = tok
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad image {tok:?}")))?;
            if v == 0 {
                return Err(Error::parse("images are 1-based".into()));
            }
            images.push((v - 1) as u16);
        }
        Perm::new(images)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycle_string())
    }
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

pub(crate) fn num_lcm(a: u64, b: u64) -> u64 {
    a / num_gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_convention_is_left_to_right() {
        // (1 2)(3 4) then (2 3) must give the 4-cycle (1 3 4 2), pinning
        // the act-on-the-right convention.
        let p = Perm::parse_cycles("(1,2)(3,4)", 4).unwrap();
        let q = Perm::parse_cycles("(2,3)", 4).unwrap();
        let pq = p.mul(&q);
        assert_eq!(pq, Perm::parse_cycles("(1,3,4,2)", 4).unwrap());
        assert_eq!(pq.images(), &[2, 0, 3, 1]);
    }

    #[test]
    fn identity_and_inverse() {
        let id = Perm::identity(5);
        assert_eq!(id.mul(&id), id);
        let p = Perm::parse_cycles("(1,4,2)(3,5)", 5).unwrap();
        assert_eq!(p.mul(&p.inverse()), id);
        assert_eq!(p.inverse().mul(&p), id);
    }

    #[test]
    fn conjugation_matches_definition() {
        let x = Perm::parse_cycles("(1,2,3)", 5).unwrap();
        let g = Perm::parse_cycles("(1,4)(2,5)", 5).unwrap();
        assert_eq!(x.conj(&g), g.inverse().mul(&x).mul(&g));
    }

    #[test]
    fn index_and_fixed_points() {
        let id = Perm::identity(8);
        assert_eq!(id.index(), 0);
        assert_eq!(id.fixed_points(), 8);
        let c8 = Perm::parse_cycles("(1,2,3,4,5,6,7,8)", 8).unwrap();
        assert_eq!(c8.index(), 7);
        assert_eq!(c8.fixed_points(), 0);
        let t = Perm::parse_cycles("(1,2)", 8).unwrap();
        assert_eq!(t.index(), 1);
    }

    #[test]
    fn order_and_pow() {
        let p = Perm::parse_cycles("(1,2,3)(4,5)", 6).unwrap();
        assert_eq!(p.order(), 6);
        assert!(p.pow(6).is_identity());
        assert_eq!(p.pow(3), Perm::parse_cycles("(4,5)", 6).unwrap());
    }

    #[test]
    fn cycle_string_round_trip() {
        let p = Perm::parse_cycles("(1,3,2)(5,6)", 7).unwrap();
        let s = p.cycle_string();
        assert_eq!(Perm::parse_cycles(&s, 7).unwrap(), p);
        let q = Perm::parse_images("[3, 1, 2]").unwrap();
        assert_eq!(q.cycle_string(), "(1,3,2)");
        assert_eq!(Perm::parse_images(&q.image_string()).unwrap(), q);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::new(vec![0, 0, 1]).is_err());
        assert!(Perm::new(vec![0, 3, 1]).is_err());
    }
}
