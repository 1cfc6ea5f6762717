//! Conjugacy classes, centralizers and conjugating elements.
//!
//! The workhorse is a conjugation-orbit BFS with parent links: it yields the
//! class elements, exact conjugating elements, and Schreier generators for
//! the centralizer without ever enumerating the ambient group.

use crate::error::Error;
use crate::group::PermGroup;
use crate::perm::Perm;
use rand::SeedableRng;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// Explicit conjugation orbit of one representative under a group.
pub struct ClassOrbit {
    pub rep: Perm,
    elems: Vec<Perm>,
    index_of: HashMap<Perm, u32>,
    /// `(parent index, generator index)`; entry 0 is the root.
    parents: Vec<(u32, u32)>,
}

impl ClassOrbit {
    /// BFS over `rep^G`. Errors if the class exceeds `cap` elements.
    pub fn build(group: &PermGroup, rep: Perm, cap: usize) -> Result<ClassOrbit, Error> {
        let gens = group.generators();
        let mut elems = vec![rep.clone()];
        let mut index_of = HashMap::new();
        index_of.insert(rep.clone(), 0u32);
        let mut parents = vec![(0u32, 0u32)];
        let mut i = 0usize;
        let mut buf = Vec::new();
        while i < elems.len() {
            for (gi, g) in gens.iter().enumerate() {
                elems[i].conj_into(g, &mut buf);
                if !index_of.contains_key(buf.as_slice()) {
                    let img = Perm::new(buf.clone()).expect("conjugate is a permutation");
                    let idx = elems.len() as u32;
                    index_of.insert(img.clone(), idx);
                    elems.push(img);
                    parents.push((i as u32, gi as u32));
                    if elems.len() > cap {
                        return Err(Error::ResourceCap(format!(
                            "conjugacy class larger than cap {cap}"
                        )));
                    }
                }
            }
            i += 1;
        }
        Ok(ClassOrbit {
            rep,
            elems,
            index_of,
            parents,
        })
    }

    pub fn size(&self) -> usize {
        self.elems.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elems
    }

    pub fn contains(&self, x: &Perm) -> bool {
        self.index_of.contains_key(x.images())
    }

    /// Position of an element given by its image array, if present.
    pub fn position_of(&self, images: &[u16]) -> Option<u32> {
        self.index_of.get(images).copied()
    }

    pub fn min_element(&self) -> &Perm {
        self.elems.iter().min().unwrap()
    }

    /// A `g` with `rep^g = self.elems[i]`.
    pub fn conjugator_to_index(&self, group: &PermGroup, mut i: u32) -> Perm {
        let mut word = Vec::new();
        while i != 0 {
            let (p, gi) = self.parents[i as usize];
            word.push(gi);
            i = p;
        }
        let mut g = Perm::identity(self.rep.degree());
        for &gi in word.iter().rev() {
            g = g.mul(&group.generators()[gi as usize]);
        }
        g
    }

    /// A `g` with `rep^g = x`, if `x` lies in this class.
    pub fn conjugator_to(&self, group: &PermGroup, x: &Perm) -> Option<Perm> {
        let &i = self.index_of.get(x.images())?;
        Some(self.conjugator_to_index(group, i))
    }

    /// Centralizer of `rep` from Schreier generators; stops as soon as the
    /// order reaches `|G| / |class|`.
    pub fn centralizer(&self, group: &PermGroup) -> PermGroup {
        let target = group.order() / self.elems.len() as u128;
        let degree = self.rep.degree();
        let mut cgens: Vec<Perm> = Vec::new();
        let mut current = PermGroup::new(degree, cgens.clone());
        if current.order() == target {
            return current;
        }
        let mut buf = Vec::new();
        for i in 0..self.elems.len() {
            let wi = self.conjugator_to_index(group, i as u32);
            for g in group.generators() {
                self.elems[i].conj_into(g, &mut buf);
                let j = *self.index_of.get(buf.as_slice()).expect("closed orbit");
                let wj = self.conjugator_to_index(group, j);
                // rep^(wi * g * wj^-1) = rep
                let s = wi.mul(g).mul(&wj.inverse());
                if !s.is_identity() && !current.contains(&s) {
                    cgens.push(s);
                    current = PermGroup::new(degree, cgens.clone());
                    if current.order() == target {
                        return current;
                    }
                }
            }
        }
        debug_assert_eq!(current.order(), target);
        current
    }
}

// HashMap<Perm, _> lookups keyed by a borrowed image slice.
impl std::borrow::Borrow<[u16]> for Perm {
    fn borrow(&self) -> &[u16] {
        self.images()
    }
}

/// Centralizer of `x` in `group`, via the conjugation orbit of `x`.
pub fn centralizer(group: &PermGroup, x: &Perm, cap: usize) -> Result<PermGroup, Error> {
    let orbit = ClassOrbit::build(group, x.clone(), cap)?;
    Ok(orbit.centralizer(group))
}

/// Finds `g` with `x^g = y`, or `None` when `x` and `y` are not conjugate.
pub fn conjugating_element(
    group: &PermGroup,
    x: &Perm,
    y: &Perm,
    cap: usize,
) -> Result<Option<Perm>, Error> {
    if x.cycle_type() != y.cycle_type() {
        return Ok(None);
    }
    if x == y {
        return Ok(Some(Perm::identity(x.degree())));
    }
    // BFS from x, stopping early if y shows up.
    let gens = group.generators();
    let mut elems = vec![x.clone()];
    let mut index_of: HashMap<Perm, u32> = HashMap::new();
    index_of.insert(x.clone(), 0);
    let mut parents = vec![(0u32, 0u32)];
    let mut i = 0usize;
    let mut buf = Vec::new();
    while i < elems.len() {
        for (gi, g) in gens.iter().enumerate() {
            elems[i].conj_into(g, &mut buf);
            if !index_of.contains_key(buf.as_slice()) {
                let img = Perm::new(buf.clone()).unwrap();
                let idx = elems.len() as u32;
                index_of.insert(img.clone(), idx);
                parents.push((i as u32, gi as u32));
                let hit = img == *y;
                elems.push(img);
                if elems.len() > cap {
                    return Err(Error::ResourceCap(format!(
                        "conjugacy search exceeded cap {cap}"
                    )));
                }
                if hit {
                    let mut word = Vec::new();
                    let mut k = idx;
                    while k != 0 {
                        let (p, gidx) = parents[k as usize];
                        word.push(gidx);
                        k = p;
                    }
                    let mut g = Perm::identity(x.degree());
                    for &gidx in word.iter().rev() {
                        g = g.mul(&gens[gidx as usize]);
                    }
                    return Ok(Some(g));
                }
            }
        }
        i += 1;
    }
    Ok(None)
}

/// Whether `x` and `y` are conjugate in `group`.
pub fn are_conjugate(group: &PermGroup, x: &Perm, y: &Perm, cap: usize) -> Result<bool, Error> {
    Ok(conjugating_element(group, x, y, cap)?.is_some())
}

/// Center of the group: start from the centralizer of the generator with
/// the smallest conjugation orbit and keep elements commuting with all
/// generators.
pub fn center(group: &PermGroup, cap: usize) -> Result<PermGroup, Error> {
    if group.generators().is_empty() {
        return Ok(PermGroup::trivial(group.degree()));
    }
    let mut best: Option<(usize, ClassOrbit)> = None;
    for g in group.generators() {
        let orbit = ClassOrbit::build(group, g.clone(), cap)?;
        let better = match &best {
            None => true,
            Some((size, _)) => orbit.size() < *size,
        };
        if better {
            best = Some((orbit.size(), orbit));
        }
    }
    let (_, orbit) = best.unwrap();
    let c = orbit.centralizer(group);
    let elems = c.elements(cap)?;
    let central: Vec<Perm> = elems
        .into_iter()
        .filter(|z| group.generators().iter().all(|g| z.commutes_with(g)))
        .collect();
    Ok(PermGroup::new(group.degree(), central))
}

/// Summary data for one conjugacy class.
#[derive(Clone, Debug)]
pub struct ClassInfo {
    /// Lexicographically smallest element of the class; canonical.
    pub rep: Perm,
    pub size: u128,
    pub order: u64,
    pub index: usize,
    pub fix: usize,
    pub cycle_type: Vec<u16>,
}

impl ClassInfo {
    fn from_rep(rep: Perm, size: u128) -> ClassInfo {
        let cycle_type = rep.cycle_type();
        ClassInfo {
            order: rep.order(),
            index: rep.index(),
            fix: rep.fixed_points(),
            cycle_type,
            rep,
            size,
        }
    }
}

/// Exact class identification supplied by a structured backend (linear or
/// affine groups), avoiding explicit class orbits in large groups.
pub trait ClassIdentifier: Send + Sync {
    /// Exact test: are `x` and `y` conjugate in the group?
    fn same_class(&self, x: &Perm, y: &Perm) -> Result<bool, Error>;
    /// A conjugator `g` with `x^g = y`, when one exists.
    fn conjugator(&self, x: &Perm, y: &Perm) -> Result<Option<Perm>, Error>;
    /// Centralizer of `x`, when the backend can build it cheaply.
    fn centralizer_of(&self, x: &Perm) -> Result<Option<PermGroup>, Error> {
        let _ = x;
        Ok(None)
    }
}

/// The conjugacy classes of a group.
///
/// Representatives are canonical (smallest class element for the generic
/// strategies), so the class list is independent of generator order and
/// discovery order. Explicit orbits are cached on demand; small ones are kept
/// from the initial computation.
pub struct ClassSet {
    pub group: Arc<PermGroup>,
    pub group_order: u128,
    pub classes: Vec<ClassInfo>,
    by_cycle_type: HashMap<Vec<u16>, Vec<usize>>,
    orbit_cache: RwLock<HashMap<usize, Arc<ClassOrbit>>>,
    external: Option<Arc<dyn ClassIdentifier>>,
    class_cap: usize,
}

impl ClassSet {
    /// Assembles a class set from an already-computed class list plus an
    /// identification backend. The sizes must sum to the group order.
    pub fn from_parts(
        group: Arc<PermGroup>,
        mut classes: Vec<ClassInfo>,
        external: Option<Arc<dyn ClassIdentifier>>,
        class_cap: usize,
    ) -> ClassSet {
        let order = group.order();
        assert_eq!(
            classes.iter().map(|c| c.size).sum::<u128>(),
            order,
            "class sizes must cover the group"
        );
        classes.sort_by(|a, b| a.rep.cmp(&b.rep));
        let mut by_cycle_type: HashMap<Vec<u16>, Vec<usize>> = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            by_cycle_type.entry(c.cycle_type.clone()).or_default().push(i);
        }
        ClassSet {
            group,
            group_order: order,
            classes,
            by_cycle_type,
            orbit_cache: RwLock::new(HashMap::new()),
            external,
            class_cap,
        }
    }

    /// Computes all classes. Groups of order up to 5*10^5 are walked
    /// exhaustively; bigger ones use seeded random discovery closed under
    /// powers, certified complete when the class sizes sum to `|G|`.
    pub fn compute(group: Arc<PermGroup>, class_cap: usize) -> Result<ClassSet, Error> {
        let order = group.order();
        let explicit_cap: u128 = 500_000;
        let retain_cap: usize = 250_000;

        // (info, retained orbit if small)
        let mut found: Vec<(ClassInfo, Option<Arc<ClassOrbit>>)> = Vec::new();
        let mut covered: u128 = 0;

        let absorb = |found: &mut Vec<(ClassInfo, Option<Arc<ClassOrbit>>)>,
                          covered: &mut u128,
                          x: &Perm|
         -> Result<bool, Error> {
            let t = x.cycle_type();
            for (info, orbit) in found.iter() {
                if info.cycle_type != t {
                    continue;
                }
                match orbit {
                    Some(o) => {
                        if o.contains(x) {
                            return Ok(false);
                        }
                    }
                    None => {
                        if are_conjugate(&group, x, &info.rep, class_cap)? {
                            return Ok(false);
                        }
                    }
                }
            }
            let orbit = ClassOrbit::build(&group, x.clone(), class_cap)?;
            let min = orbit.min_element().clone();
            let size = orbit.size();
            *covered += size as u128;
            let keep = if size <= retain_cap {
                // Re-root at the canonical rep so cached conjugators line up.
                Some(Arc::new(if min == orbit.rep {
                    orbit
                } else {
                    ClassOrbit::build(&group, min.clone(), class_cap)?
                }))
            } else {
                None
            };
            found.push((ClassInfo::from_rep(min, size as u128), keep));
            Ok(true)
        };

        if order <= explicit_cap {
            let elems = group.elements(explicit_cap as usize)?;
            for x in &elems {
                absorb(&mut found, &mut covered, x)?;
                if covered == order {
                    break;
                }
            }
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9e37_79b9);
            absorb(&mut found, &mut covered, &Perm::identity(group.degree()))?;
            let mut powered = 0usize;
            let mut stale = 0usize;
            while covered < order {
                let x = group.random_element(&mut rng);
                let mut fresh = absorb(&mut found, &mut covered, &x)?;
                // Close under powers: small classes usually appear as powers
                // of large ones long before a random element hits them.
                while powered < found.len() {
                    let rep = found[powered].0.rep.clone();
                    let d = rep.order();
                    for m in 2..d {
                        if d % m == 0 {
                            fresh |= absorb(&mut found, &mut covered, &rep.pow(m))?;
                        }
                    }
                    powered += 1;
                }
                stale = if fresh { 0 } else { stale + 1 };
                if stale > 20_000 {
                    return Err(Error::ResourceCap(
                        "class discovery stalled before covering the group".into(),
                    ));
                }
            }
        }
        debug_assert_eq!(covered, order);

        // Canonical order for the pre-label list: by the canonical reps.
        found.sort_by(|a, b| a.0.rep.cmp(&b.0.rep));

        let mut classes = Vec::with_capacity(found.len());
        let mut cache = HashMap::new();
        for (i, (info, orbit)) in found.into_iter().enumerate() {
            if let Some(o) = orbit {
                cache.insert(i, o);
            }
            classes.push(info);
        }
        let mut by_cycle_type: HashMap<Vec<u16>, Vec<usize>> = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            by_cycle_type.entry(c.cycle_type.clone()).or_default().push(i);
        }
        Ok(ClassSet {
            group,
            group_order: order,
            classes,
            by_cycle_type,
            orbit_cache: RwLock::new(cache),
            external: None,
            class_cap,
        })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Explicit orbit for class `idx`, building and caching it if needed.
    /// Cached orbits are always rooted at the canonical representative.
    pub fn orbit(&self, idx: usize) -> Result<Arc<ClassOrbit>, Error> {
        if let Some(o) = self.orbit_cache.read().unwrap().get(&idx) {
            return Ok(o.clone());
        }
        let built = Arc::new(ClassOrbit::build(
            &self.group,
            self.classes[idx].rep.clone(),
            self.class_cap,
        )?);
        let mut cache = self.orbit_cache.write().unwrap();
        Ok(cache.entry(idx).or_insert(built).clone())
    }

    /// Drops a cached orbit (used to bound memory after bulk work).
    pub fn release_orbit(&self, idx: usize) {
        self.orbit_cache.write().unwrap().remove(&idx);
    }

    /// Index of the class containing `x`: cycle-type fingerprint first,
    /// exact membership only among the ambiguous candidates.
    pub fn identify(&self, x: &Perm) -> Result<usize, Error> {
        let candidates = self
            .by_cycle_type
            .get(&x.cycle_type())
            .ok_or(Error::NotInGroup)?;
        if candidates.len() == 1 {
            return Ok(candidates[0]);
        }
        if let Some(ext) = &self.external {
            for &i in candidates {
                if ext.same_class(x, &self.classes[i].rep)? {
                    return Ok(i);
                }
            }
            return Err(Error::NotInGroup);
        }
        for &i in candidates {
            if self.orbit(i)?.contains(x) {
                return Ok(i);
            }
        }
        Err(Error::NotInGroup)
    }

    /// Classes sharing a cycle type with `x` (cheap over-approximation).
    pub fn candidates(&self, x: &Perm) -> &[usize] {
        self.by_cycle_type
            .get(&x.cycle_type())
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Index of the class of `rep^-1`.
    pub fn inverse_class(&self, idx: usize) -> Result<usize, Error> {
        self.identify(&self.classes[idx].rep.inverse())
    }

    /// A `g` with `rep(idx)^g = x`, or `None` when `x` is not in the class.
    pub fn conjugator_from_rep(&self, idx: usize, x: &Perm) -> Result<Option<Perm>, Error> {
        if let Some(ext) = &self.external {
            if !ext.same_class(&self.classes[idx].rep, x)? {
                return Ok(None);
            }
            // a backend may answer membership without producing an element;
            // fall back to orbit search in that case
            if let Some(g) = ext.conjugator(&self.classes[idx].rep, x)? {
                return Ok(Some(g));
            }
        }
        Ok(self.orbit(idx)?.conjugator_to(&self.group, x))
    }

    /// Centralizer of the representative of class `idx`.
    pub fn rep_centralizer(&self, idx: usize) -> Result<PermGroup, Error> {
        if let Some(ext) = &self.external {
            if let Some(c) = ext.centralizer_of(&self.classes[idx].rep)? {
                return Ok(c);
            }
        }
        Ok(self.orbit(idx)?.centralizer(&self.group))
    }

    /// Exact conjugacy test between arbitrary group elements.
    pub fn same_class(&self, x: &Perm, y: &Perm) -> Result<bool, Error> {
        if x.cycle_type() != y.cycle_type() {
            return Ok(false);
        }
        if let Some(ext) = &self.external {
            return ext.same_class(x, y);
        }
        Ok(self.identify(x)? == self.identify(y)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s4() -> Arc<PermGroup> {
        Arc::new(PermGroup::symmetric(4))
    }

    #[test]
    fn centralizer_of_identity_is_whole_group() {
        let g = s4();
        let c = centralizer(&g, &Perm::identity(4), 100).unwrap();
        assert_eq!(c.order(), 24);
    }

    #[test]
    fn centralizer_orders() {
        let g = s4();
        let t = Perm::parse_cycles("(1,2)", 4).unwrap();
        let c = centralizer(&g, &t, 100).unwrap();
        // C_S4((1 2)) = <(1 2)> x <(3 4)>
        assert_eq!(c.order(), 4);
        for e in c.elements(10).unwrap() {
            assert!(e.commutes_with(&t));
        }
    }

    #[test]
    fn conjugating_element_works_and_respects_classes() {
        let g = s4();
        let x = Perm::parse_cycles("(1,2)", 4).unwrap();
        let y = Perm::parse_cycles("(3,4)", 4).unwrap();
        let c = conjugating_element(&g, &x, &y, 1000).unwrap().unwrap();
        assert_eq!(x.conj(&c), y);
        // order-3 vs order-2: distinct classes
        let z = Perm::parse_cycles("(1,2,3)", 4).unwrap();
        assert!(conjugating_element(&g, &x, &z, 1000).unwrap().is_none());
        // identity conjugator allowed for x = y
        let same = conjugating_element(&g, &x, &x, 1000).unwrap().unwrap();
        assert_eq!(x.conj(&same), x);
    }

    #[test]
    fn s3_class_sizes() {
        let g = Arc::new(PermGroup::new(
            3,
            vec![
                Perm::parse_cycles("(1,2)", 3).unwrap(),
                Perm::parse_cycles("(1,2,3)", 3).unwrap(),
            ],
        ));
        let cs = ClassSet::compute(g, 100).unwrap();
        let mut sizes: Vec<u128> = cs.classes.iter().map(|c| c.size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(cs.classes.iter().map(|c| c.size).sum::<u128>(), 6);
    }

    #[test]
    fn abelian_group_has_singleton_classes() {
        let g = Arc::new(PermGroup::new(
            6,
            vec![Perm::parse_cycles("(1,2,3,4,5,6)", 6).unwrap()],
        ));
        let cs = ClassSet::compute(g, 100).unwrap();
        assert_eq!(cs.len(), 6);
        assert!(cs.classes.iter().all(|c| c.size == 1));
    }

    #[test]
    fn identify_uses_membership_on_fingerprint_ties() {
        // In A4 the two classes of 3-cycles share a cycle type.
        let a4 = Arc::new(PermGroup::new(
            4,
            vec![
                Perm::parse_cycles("(1,2,3)", 4).unwrap(),
                Perm::parse_cycles("(2,3,4)", 4).unwrap(),
            ],
        ));
        assert_eq!(a4.order(), 12);
        let cs = ClassSet::compute(a4, 100).unwrap();
        assert_eq!(cs.len(), 4);
        let x = Perm::parse_cycles("(1,2,3)", 4).unwrap();
        let i = cs.identify(&x).unwrap();
        assert!(cs.orbit(i).unwrap().contains(&x));
        let j = cs.identify(&x.inverse()).unwrap();
        assert_ne!(i, j);
        assert_eq!(cs.inverse_class(i).unwrap(), j);
    }

    #[test]
    fn class_orbit_conjugators_are_exact() {
        let g = s4();
        let rep = Perm::parse_cycles("(1,2,3)", 4).unwrap();
        let orbit = ClassOrbit::build(&g, rep.clone(), 100).unwrap();
        assert_eq!(orbit.size(), 8);
        for x in orbit.elements() {
            let c = orbit.conjugator_to(&g, x).unwrap();
            assert_eq!(rep.conj(&c), *x);
        }
    }

    #[test]
    fn classes_are_generator_order_independent() {
        let g1 = Arc::new(PermGroup::new(
            4,
            vec![
                Perm::parse_cycles("(1,2)", 4).unwrap(),
                Perm::parse_cycles("(1,2,3,4)", 4).unwrap(),
            ],
        ));
        let g2 = Arc::new(PermGroup::new(
            4,
            vec![
                Perm::parse_cycles("(2,3,4,1)", 4).unwrap(),
                Perm::parse_cycles("(3,4)", 4).unwrap(),
            ],
        ));
        let c1 = ClassSet::compute(g1, 1000).unwrap();
        let c2 = ClassSet::compute(g2, 1000).unwrap();
        let reps1: Vec<&Perm> = c1.classes.iter().map(|c| &c.rep).collect();
        let reps2: Vec<&Perm> = c2.classes.iter().map(|c| &c.rep).collect();
        assert_eq!(reps1, reps2);
    }
}
