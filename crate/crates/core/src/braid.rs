//! The braid action on product-one tuples, canonical forms modulo
//! simultaneous conjugation, and full orbit enumeration on Nielsen classes.

use crate::classes::Labeling;
use crate::error::Error;
use crate::perm::Perm;
use crate::search::{enumerate_tuples, NielsenTuple, SearchCtx};
use crate::types::RamificationType;
use std::collections::{HashMap, HashSet};
use std::sync::{Arc, RwLock};

/// Applies the braid generator at `index` (0-based, acting on positions
/// `index` and `index+1`) or its inverse. The tuple product is unchanged.
pub fn apply_braid(t: &NielsenTuple, index: usize, inverse: bool) -> NielsenTuple {
    assert!(index + 1 < t.r(), "braid index out of range");
    let mut elems = t.elems.clone();
    if !inverse {
        // (.., a, b, ..) -> (.., b, b^-1 a b, ..)
        let a = elems[index].clone();
        let b = elems[index + 1].clone();
        elems[index] = b.clone();
        elems[index + 1] = a.conj(&b);
    } else {
        // (.., a, b, ..) -> (.., a b a^-1, a, ..)
        let a = elems[index].clone();
        let b = elems[index + 1].clone();
        elems[index] = b.conj(&a.inverse());
        elems[index + 1] = a;
    }
    NielsenTuple::new(elems)
}

/// Canonical forms of tuples modulo simultaneous conjugation: the first
/// entry is conjugated onto its canonical class representative and the rest
/// is lexicographically minimized over the remaining centralizer coset,
/// narrowing the coset entry by entry.
pub struct Canonicalizer {
    labeling: Arc<Labeling>,
    cents: RwLock<HashMap<usize, Arc<Vec<Perm>>>>,
    /// largest centralizer that will be expanded into an element list
    pub centralizer_cap: usize,
}

impl Canonicalizer {
    pub fn new(labeling: Arc<Labeling>) -> Canonicalizer {
        Canonicalizer {
            labeling,
            cents: RwLock::new(HashMap::new()),
            centralizer_cap: 2_000_000,
        }
    }

    fn cent_elements(&self, class_idx: usize) -> Result<Arc<Vec<Perm>>, Error> {
        if let Some(v) = self.cents.read().unwrap().get(&class_idx) {
            return Ok(v.clone());
        }
        let c = self.labeling.set.rep_centralizer(class_idx)?;
        let elems = Arc::new(c.elements(self.centralizer_cap)?);
        self.cents
            .write()
            .unwrap()
            .insert(class_idx, elems.clone());
        Ok(elems)
    }

    /// The canonical representative of the conjugation class of `t`.
    pub fn canonical(&self, t: &NielsenTuple) -> Result<NielsenTuple, Error> {
        let set = &self.labeling.set;
        let idx0 = set.identify(&t.elems[0])?;
        let g = set
            .conjugator_from_rep(idx0, &t.elems[0])?
            .ok_or(Error::NotInGroup)?;
        let t0 = g.inverse();
        let cents = self.cent_elements(idx0)?;
        let mut out: Vec<Perm> = Vec::with_capacity(t.r());
        out.push(set.classes[idx0].rep.clone());
        let mut candidates: Vec<u32> = (0..cents.len() as u32).collect();
        let mut buf = Vec::new();
        for k in 1..t.r() {
            let y = t.elems[k].conj(&t0);
            let mut best: Option<Vec<u16>> = None;
            let mut keep: Vec<u32> = Vec::new();
            for &ci in &candidates {
                y.conj_into(&cents[ci as usize], &mut buf);
                match &best {
                    None => {
                        best = Some(buf.clone());
                        keep.push(ci);
                    }
                    Some(b) => match buf.as_slice().cmp(b.as_slice()) {
                        std::cmp::Ordering::Less => {
                            best = Some(buf.clone());
                            keep.clear();
                            keep.push(ci);
                        }
                        std::cmp::Ordering::Equal => keep.push(ci),
                        std::cmp::Ordering::Greater => {}
                    },
                }
            }
            out.push(Perm::new(best.unwrap()).unwrap());
            candidates = keep;
        }
        Ok(NielsenTuple::new(out))
    }
}

/// One braid orbit on a Nielsen class.
#[derive(Clone, Debug)]
pub struct BraidOrbit {
    /// Tuple classes of the normalized arrangement in this orbit (the
    /// published orbit-length normalization).
    pub length: usize,
    /// All stored canonical forms, across every arrangement of the type.
    pub total_forms: usize,
    pub example: NielsenTuple,
}

#[derive(Clone, Debug)]
pub struct OrbitCensus {
    pub orbits: Vec<BraidOrbit>,
    /// Conjugacy classes of generating tuples in the normalized arrangement.
    pub tuple_classes: usize,
}

impl OrbitCensus {
    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    pub fn largest(&self) -> usize {
        self.orbits.first().map(|o| o.length).unwrap_or(0)
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o.length).collect()
    }
}

/// Partitions the generating Nielsen class of `ty` into braid orbits.
///
/// The tuple-class ledger from [`enumerate_tuples`] is complete by
/// construction, so exhaustion needs no external certificate: breadth-first
/// closure from each unconsumed ledger entry, and an orbit's length is the
/// number of ledger entries it consumes.
pub fn braid_orbits_from_seeds(
    ctx: &SearchCtx,
    ty: &RamificationType,
    seeds: Vec<NielsenTuple>,
    form_cap: usize,
) -> Result<OrbitCensus, Error> {
    let canon = Canonicalizer::new(ctx.labeling.clone());
    let r = ty.r();
    let mut ledger: HashMap<NielsenTuple, usize> = HashMap::new();
    for (i, t) in seeds.iter().enumerate() {
        let c = canon.canonical(t)?;
        if ledger.insert(c, i).is_some() {
            return Err(Error::Other(
                "seed tuples are not conjugacy-distinct".into(),
            ));
        }
    }
    let normalized = ty.entries.clone();
    let mut consumed: Vec<bool> = vec![false; seeds.len()];
    let mut visited: HashSet<NielsenTuple> = HashSet::new();
    let mut orbits: Vec<BraidOrbit> = Vec::new();

    for start in 0..seeds.len() {
        if consumed[start] {
            continue;
        }
        let seed_canon = canon.canonical(&seeds[start])?;
        let mut frontier = vec![seed_canon.clone()];
        visited.insert(seed_canon.clone());
        consumed[start] = true;
        let mut length = 1usize;
        let mut total = 1usize;
        while let Some(t) = frontier.pop() {
            for index in 0..r - 1 {
                for inverse in [false, true] {
                    let moved = apply_braid(&t, index, inverse);
                    let c = canon.canonical(&moved)?;
                    if visited.contains(&c) {
                        continue;
                    }
                    if visited.len() >= form_cap {
                        return Err(Error::ResourceCap(format!(
                            "braid orbit store exceeded {form_cap} canonical forms"
                        )));
                    }
                    if let Some(&id) = ledger.get(&c) {
                        debug_assert!(!consumed[id]);
                        consumed[id] = true;
                        length += 1;
                    } else {
                        // a form in the normalized arrangement must be a
                        // ledger member, otherwise the enumeration missed a
                        // class
                        debug_assert_ne!(
                            c.arrangement(&ctx.labeling)?,
                            normalized,
                            "canonical form in the normalized arrangement missing from the ledger"
                        );
                    }
                    visited.insert(c.clone());
                    total += 1;
                    frontier.push(c);
                }
            }
        }
        orbits.push(BraidOrbit {
            length,
            total_forms: total,
            example: seed_canon,
        });
    }
    orbits.sort_by(|a, b| b.length.cmp(&a.length).then(a.example.elems.cmp(&b.example.elems)));
    Ok(OrbitCensus {
        orbits,
        tuple_classes: seeds.len(),
    })
}

/// Enumerates the Nielsen class and partitions it into braid orbits.
pub fn braid_orbits(
    ctx: &SearchCtx,
    ty: &RamificationType,
    form_cap: usize,
) -> Result<OrbitCensus, Error> {
    let seeds = enumerate_tuples(ctx, ty)?;
    braid_orbits_from_seeds(ctx, ty, seeds, form_cap)
}

/// Braid orbits for a triple type via the double-coset search: the
/// conjugacy classes of triples, grouped under braiding (braiding can merge
/// classes, so lengths above 1 do occur).
pub fn triple_orbits(
    ctx: &SearchCtx,
    ty: &RamificationType,
    form_cap: usize,
) -> Result<OrbitCensus, Error> {
    assert_eq!(ty.r(), 3);
    braid_orbits(ctx, ty, form_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use rand::Rng;
    use rand::SeedableRng;

    fn ctx_for(name: &str) -> SearchCtx {
        let aff = catalog::load(name).unwrap();
        let lab = Arc::new(Labeling::compute(aff.group_classes().unwrap()).unwrap());
        SearchCtx::new(aff.group.clone(), lab)
    }

    fn random_product_one_tuple(
        ctx: &SearchCtx,
        r: usize,
        rng: &mut impl Rng,
    ) -> NielsenTuple {
        loop {
            let mut elems: Vec<Perm> = (0..r - 1)
                .map(|_| ctx.group.random_element(rng))
                .collect();
            if elems.iter().any(|x| x.is_identity()) {
                continue;
            }
            let n = ctx.group.degree();
            let prod = elems.iter().fold(Perm::identity(n), |acc, x| acc.mul(x));
            let last = prod.inverse();
            if last.is_identity() {
                continue;
            }
            elems.push(last);
            return NielsenTuple::new(elems);
        }
    }

    #[test]
    fn braid_move_then_inverse_is_identity() {
        let ctx = ctx_for("ASL(3,2)");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let t = random_product_one_tuple(&ctx, 4, &mut rng);
            for i in 0..3 {
                let fwd = apply_braid(&t, i, false);
                assert!(fwd.is_product_one());
                assert_eq!(apply_braid(&fwd, i, true), t);
                let bwd = apply_braid(&t, i, true);
                assert_eq!(apply_braid(&bwd, i, false), t);
            }
        }
    }

    #[test]
    fn braid_relations_hold() {
        let ctx = ctx_for("ASL(3,2)");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let t = random_product_one_tuple(&ctx, 4, &mut rng);
            // sigma_1 sigma_2 sigma_1 = sigma_2 sigma_1 sigma_2
            let lhs = apply_braid(&apply_braid(&apply_braid(&t, 0, false), 1, false), 0, false);
            let rhs = apply_braid(&apply_braid(&apply_braid(&t, 1, false), 0, false), 1, false);
            assert_eq!(lhs, rhs);
            // commuting generators at distance >= 2
            let t5 = random_product_one_tuple(&ctx, 5, &mut rng);
            let ab = apply_braid(&apply_braid(&t5, 0, false), 2, false);
            let ba = apply_braid(&apply_braid(&t5, 2, false), 0, false);
            assert_eq!(ab, ba);
        }
    }

    #[test]
    fn product_invariant_under_random_move_sequences() {
        let ctx = ctx_for("AGL(2,3)");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let mut t = random_product_one_tuple(&ctx, 5, &mut rng);
            for _ in 0..50 {
                let i = rng.gen_range(0..4);
                let inv = rng.gen_bool(0.5);
                t = apply_braid(&t, i, inv);
                assert!(t.is_product_one());
            }
        }
    }

    #[test]
    fn canonical_form_is_conjugation_invariant_and_idempotent() {
        let ctx = ctx_for("ASL(3,2)");
        let canon = Canonicalizer::new(ctx.labeling.clone());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let t = random_product_one_tuple(&ctx, 4, &mut rng);
            let c = canon.canonical(&t).unwrap();
            assert_eq!(canon.canonical(&c).unwrap(), c);
            for _ in 0..5 {
                let g = ctx.group.random_element(&mut rng);
                assert_eq!(canon.canonical(&t.conj(&g)).unwrap(), c);
            }
        }
    }

    #[test]
    fn identity_tuple_is_its_own_canonical_form() {
        let ctx = ctx_for("ASL(3,2)");
        let canon = Canonicalizer::new(ctx.labeling.clone());
        let id = Perm::identity(8);
        let t = NielsenTuple::new(vec![id.clone(), id.clone(), id]);
        assert_eq!(canon.canonical(&t).unwrap(), t);
    }

    #[test]
    fn asl32_3a_quadruple_has_three_orbits() {
        let ctx = ctx_for("ASL(3,2)");
        let ty = RamificationType::parse("(3A,3A,3A,3A)", &ctx.labeling).unwrap();
        let census = braid_orbits(&ctx, &ty, 10_000_000).unwrap();
        // 180 + 144 + 144 tuple classes split into orbits of 180, 144, 144
        assert_eq!(census.tuple_classes, 468);
        assert_eq!(census.count(), 3);
        assert_eq!(census.lengths(), vec![180, 144, 144]);
    }

    #[test]
    fn asl23_triple_orbits_merge() {
        let ctx = ctx_for("ASL(2,3)");
        // (3D,3E,4A): 2 orbits; exhaustive enumeration over all arrangements
        // puts exactly one normalized-arrangement class in each (the
        // published largest-length of 2 for this row fails that oracle)
        let ty = RamificationType::parse("(3E,3D,4A)", &ctx.labeling).unwrap();
        let census = triple_orbits(&ctx, &ty, 1_000_000).unwrap();
        assert_eq!(census.count(), 2);
        assert_eq!(census.largest(), 1);
        let ty2 = RamificationType::parse("(6B,6B,6B)", &ctx.labeling).unwrap();
        let census2 = triple_orbits(&ctx, &ty2, 1_000_000).unwrap();
        assert_eq!(census2.count(), 2);
        assert_eq!(census2.lengths(), vec![2, 2]);
    }

    #[test]
    fn agl33_triple_merge_largest_two() {
        let ctx = ctx_for("AGL(3,3)");
        let ty = RamificationType::parse("(3E,4B,4B)", &ctx.labeling).unwrap();
        let census = triple_orbits(&ctx, &ty, 1_000_000).unwrap();
        assert_eq!(census.count(), 16);
        assert_eq!(census.largest(), 2);
    }
}
