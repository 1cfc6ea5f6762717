//! Generated permutation groups backed by a deterministic stabilizer chain.

use crate::error::Error;
use crate::perm::Perm;
use rand::Rng;
use std::collections::HashSet;
use std::sync::OnceLock;

/// One level of a base-and-strong-generators chain.
#[derive(Debug)]
pub struct ChainLevel {
    pub base: u16,
    gens: Vec<Perm>,
    /// `transversal[v]` maps `base` to `v`; indexed by point.
    transversal: Vec<Option<Perm>>,
    /// Orbit of `base` in BFS discovery order.
    orbit: Vec<u16>,
}

#[derive(Debug)]
pub struct StabChain {
    pub levels: Vec<ChainLevel>,
}

impl StabChain {
    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// Strips `g` through the chain; returns the residue.
    fn sift(&self, g: &Perm) -> Perm {
        let mut g = g.clone();
        for level in &self.levels {
            let v = g.apply(level.base);
            match &level.transversal[v as usize] {
                Some(t) => g = g.mul(&t.inverse()),
                None => return g,
            }
        }
        g
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.sift(g).is_identity()
    }
}

/// A permutation group given by generators, with a lazily built
/// deterministic stabilizer chain (base points are the smallest moved
/// points, so orders and enumeration are reproducible across runs).
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: OnceLock<StabChain>,
}

impl std::fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PermGroup(degree {}, {} gens)", self.degree, self.gens.len())
    }
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        PermGroup::new(self.degree, self.gens.clone())
    }
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> PermGroup {
        let gens: Vec<Perm> = gens.into_iter().filter(|g| !g.is_identity()).collect();
        for g in &gens {
            assert_eq!(g.degree(), degree, "generator degree mismatch");
        }
        PermGroup {
            degree,
            gens,
            chain: OnceLock::new(),
        }
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::new(degree, Vec::new())
    }

    pub fn symmetric(degree: usize) -> PermGroup {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Perm::from_cycles(degree, &[vec![0, 1]]).unwrap());
        }
        if degree >= 3 {
            gens.push(Perm::from_cycles(degree, &[(0..degree as u16).collect()]).unwrap());
        }
        PermGroup::new(degree, gens)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    /// Builds (or returns) the stabilizer chain.
    pub fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| build_chain(self.degree, &self.gens))
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.chain().contains(g)
    }

    pub fn is_subgroup(&self, h: &PermGroup) -> bool {
        h.degree == self.degree && h.gens.iter().all(|g| self.contains(g))
    }

    /// All elements in deterministic order. Errors when the order exceeds `cap`.
    pub fn elements(&self, cap: usize) -> Result<Vec<Perm>, Error> {
        let order = self.order();
        if order > cap as u128 {
            return Err(Error::ResourceCap(format!(
                "group order {order} exceeds element cap {cap}"
            )));
        }
        let mut elems = vec![Perm::identity(self.degree)];
        for level in self.chain().levels.iter().rev() {
            let mut next = Vec::with_capacity(elems.len() * level.orbit.len());
            for h in &elems {
                for &v in &level.orbit {
                    let t = level.transversal[v as usize].as_ref().unwrap();
                    next.push(h.mul(t));
                }
            }
            elems = next;
        }
        Ok(elems)
    }

    /// Streams every element without materializing the whole list.
    pub fn for_each_element(&self, mut f: impl FnMut(&Perm)) {
        let chain = self.chain();
        // Consume levels deepest-first so each product extends on the right.
        fn rec(levels: &[ChainLevel], acc: &Perm, f: &mut impl FnMut(&Perm)) {
            match levels.split_last() {
                None => f(acc),
                Some((deepest, rest)) => {
                    for &v in &deepest.orbit {
                        let t = deepest.transversal[v as usize].as_ref().unwrap();
                        let next = acc.mul(t);
                        rec(rest, &next, f);
                    }
                }
            }
        }
        rec(&chain.levels, &Perm::identity(self.degree), &mut f);
    }

    /// Uniformly random element via the chain transversals.
    pub fn random_element(&self, rng: &mut impl Rng) -> Perm {
        let chain = self.chain();
        let mut g = Perm::identity(self.degree);
        for level in chain.levels.iter().rev() {
            let v = level.orbit[rng.gen_range(0..level.orbit.len())];
            g = g.mul(level.transversal[v as usize].as_ref().unwrap());
        }
        g
    }

    /// Orbit of a point, in BFS order.
    pub fn point_orbit(&self, p: u16) -> Vec<u16> {
        let mut seen = vec![false; self.degree];
        let mut orbit = vec![p];
        seen[p as usize] = true;
        let mut i = 0;
        while i < orbit.len() {
            let u = orbit[i];
            i += 1;
            for g in &self.gens {
                let v = g.apply(u);
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    orbit.push(v);
                }
            }
        }
        orbit
    }

    pub fn point_orbits(&self) -> Vec<Vec<u16>> {
        let mut seen = vec![false; self.degree];
        let mut orbits = Vec::new();
        for p in 0..self.degree as u16 {
            if !seen[p as usize] {
                let orb = self.point_orbit(p);
                for &v in &orb {
                    seen[v as usize] = true;
                }
                orbits.push(orb);
            }
        }
        orbits
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.point_orbit(0).len() == self.degree
    }

    /// Size of the minimal block containing `{a, b}` for the natural action.
    pub fn minimal_block_size(&self, a: u16, b: u16) -> usize {
        let n = self.degree;
        let mut uf = UnionFind::new(n);
        let mut queue = Vec::new();
        if let Some(loser) = uf.union(a as usize, b as usize) {
            queue.push(loser);
        }
        while let Some(c) = queue.pop() {
            let d = uf.find(c);
            for g in &self.gens {
                let c1 = g.apply(c as u16) as usize;
                let d1 = g.apply(d as u16) as usize;
                if let Some(loser) = uf.union(c1, d1) {
                    queue.push(loser);
                }
            }
        }
        let root = uf.find(a as usize);
        (0..n).filter(|&i| uf.find(i) == root).count()
    }

    /// An element mapping `from` to `to`, or `None` if they lie in
    /// different orbits.
    pub fn transporter(&self, from: u16, to: u16) -> Option<Perm> {
        if from == to {
            return Some(Perm::identity(self.degree));
        }
        let mut transversal: Vec<Option<Perm>> = vec![None; self.degree];
        transversal[from as usize] = Some(Perm::identity(self.degree));
        let mut queue = vec![from];
        let mut i = 0;
        while i < queue.len() {
            let u = queue[i];
            i += 1;
            let tu = transversal[u as usize].clone().unwrap();
            for g in &self.gens {
                let v = g.apply(u);
                if transversal[v as usize].is_none() {
                    let t = tu.mul(g);
                    if v == to {
                        return Some(t);
                    }
                    transversal[v as usize] = Some(t);
                    queue.push(v);
                }
            }
        }
        None
    }

    /// Stabilizer of a point, from Schreier generators of the point orbit.
    pub fn point_stabilizer(&self, pt: u16) -> PermGroup {
        let orbit = self.point_orbit(pt);
        let target = self.order() / orbit.len() as u128;
        let mut transversal: Vec<Option<Perm>> = vec![None; self.degree];
        transversal[pt as usize] = Some(Perm::identity(self.degree));
        for &u in &orbit {
            let tu = transversal[u as usize].clone().unwrap();
            for g in &self.gens {
                let v = g.apply(u);
                if transversal[v as usize].is_none() {
                    transversal[v as usize] = Some(tu.mul(g));
                }
            }
        }
        let mut sgens: Vec<Perm> = Vec::new();
        let mut current = PermGroup::trivial(self.degree);
        if current.order() == target {
            return current;
        }
        for &u in &orbit {
            let tu = transversal[u as usize].clone().unwrap();
            for g in &self.gens {
                let v = g.apply(u);
                let tv = transversal[v as usize].as_ref().unwrap();
                let s = tu.mul(g).mul(&tv.inverse());
                if !s.is_identity() && !current.contains(&s) {
                    sgens.push(s);
                    current = PermGroup::new(self.degree, sgens.clone());
                    if current.order() == target {
                        return current;
                    }
                }
            }
        }
        debug_assert_eq!(current.order(), target);
        current
    }

    /// Exact primitivity test: transitive and no nontrivial block system.
    pub fn is_primitive(&self) -> bool {
        if !self.is_transitive() {
            return false;
        }
        if self.degree <= 2 {
            return true;
        }
        (1..self.degree as u16).all(|b| self.minimal_block_size(0, b) == self.degree)
    }
}

/// Orbit of `seed` under a supplied action, deterministic BFS order.
pub fn orbit_generic<T, F>(gens: &[Perm], seed: T, mut act: F) -> Vec<T>
where
    T: Clone + Eq + std::hash::Hash,
    F: FnMut(&T, &Perm) -> T,
{
    let mut seen = HashSet::new();
    seen.insert(seed.clone());
    let mut orbit = vec![seed];
    let mut i = 0;
    while i < orbit.len() {
        for g in gens {
            let img = act(&orbit[i], g);
            if seen.insert(img.clone()) {
                orbit.push(img);
            }
        }
        i += 1;
    }
    orbit
}

fn build_chain(degree: usize, gens: &[Perm]) -> StabChain {
    let mut chain = StabChain { levels: Vec::new() };
    if gens.is_empty() {
        return chain;
    }
    // Deterministic base selection: smallest point moved by any generator.
    let base = (0..degree as u16)
        .find(|&p| gens.iter().any(|g| g.apply(p) != p))
        .expect("non-identity generators move something");
    chain.levels.push(new_level(degree, base, gens.to_vec()));
    schreier_sims(&mut chain, degree, 0);
    chain
}

fn new_level(degree: usize, base: u16, gens: Vec<Perm>) -> ChainLevel {
    let mut transversal = vec![None; degree];
    transversal[base as usize] = Some(Perm::identity(degree));
    ChainLevel {
        base,
        gens,
        transversal,
        orbit: vec![base],
    }
}

/// Strips `g` through levels `from..`; returns the residue and the level at
/// which stripping stopped.
fn strip(chain: &StabChain, g: Perm, from: usize) -> (Perm, usize) {
    let mut g = g;
    for (off, level) in chain.levels[from..].iter().enumerate() {
        let v = g.apply(level.base);
        match &level.transversal[v as usize] {
            Some(t) => g = g.mul(&t.inverse()),
            None => return (g, from + off),
        }
    }
    (g, chain.levels.len())
}

/// Re-establishes the chain invariant at `level`, assuming deeper levels are
/// already consistent: rebuilds the orbit from this level's generators and
/// sifts every Schreier generator through the deeper chain.
fn schreier_sims(chain: &mut StabChain, degree: usize, level: usize) {
    rebuild_orbit(&mut chain.levels[level]);
    let mut i = 0;
    while i < chain.levels[level].orbit.len() {
        let u = chain.levels[level].orbit[i];
        let tu = chain.levels[level].transversal[u as usize]
            .clone()
            .unwrap();
        for si in 0..chain.levels[level].gens.len() {
            let s = chain.levels[level].gens[si].clone();
            let v = s.apply(u);
            let tv = chain.levels[level].transversal[v as usize]
                .clone()
                .expect("orbit is closed");
            let schreier = tu.mul(&s).mul(&tv.inverse());
            if schreier.is_identity() {
                continue;
            }
            let (residue, k) = strip(chain, schreier, level + 1);
            if residue.is_identity() {
                continue;
            }
            if k == chain.levels.len() {
                let base = (0..degree as u16)
                    .find(|&p| residue.apply(p) != p)
                    .unwrap();
                chain.levels.push(new_level(degree, base, Vec::new()));
            }
            // The residue fixes the base points above level k, so it joins
            // every generating set from level+1 down to k.
            for l in level + 1..=k {
                chain.levels[l].gens.push(residue.clone());
            }
            for l in (level + 1..=k).rev() {
                schreier_sims(chain, degree, l);
            }
        }
        i += 1;
    }
}

fn rebuild_orbit(level: &mut ChainLevel) {
    let degree = level.transversal.len();
    let mut transversal: Vec<Option<Perm>> = vec![None; degree];
    transversal[level.base as usize] = Some(Perm::identity(degree));
    let mut orbit = vec![level.base];
    let mut i = 0;
    while i < orbit.len() {
        let u = orbit[i];
        i += 1;
        let tu = transversal[u as usize].clone().unwrap();
        for s in &level.gens {
            let v = s.apply(u);
            if transversal[v as usize].is_none() {
                transversal[v as usize] = Some(tu.mul(s));
                orbit.push(v);
            }
        }
    }
    level.transversal = transversal;
    level.orbit = orbit;
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes; returns the representative that lost root-hood.
    fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return None;
        }
        self.parent[rb] = ra;
        Some(rb)
    }
}
