//! Generating-tuple searches: exact enumeration of product-one tuple classes
//! through the centralizer chain, the double-coset triple search, the
//! incremental subgroup-closure generating test, and the random triple probe.

use crate::classes::Labeling;
use crate::conjugacy::{self, ClassOrbit};
use crate::error::Error;
use crate::group::PermGroup;
use crate::perm::Perm;
use crate::types::{ClassMult, RamificationType};
use rand::SeedableRng;
use std::collections::HashSet;
use std::sync::Arc;

/// A product-one tuple of class-tagged elements. Equality of tuples is
/// taken modulo simultaneous conjugation by the search and orbit layers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NielsenTuple {
    pub elems: Vec<Perm>,
}

impl NielsenTuple {
    pub fn new(elems: Vec<Perm>) -> NielsenTuple {
        NielsenTuple { elems }
    }

    pub fn r(&self) -> usize {
        self.elems.len()
    }

    pub fn product(&self) -> Perm {
        let n = self.elems[0].degree();
        self.elems
            .iter()
            .fold(Perm::identity(n), |acc, x| acc.mul(x))
    }

    pub fn is_product_one(&self) -> bool {
        self.product().is_identity()
    }

    pub fn conj(&self, g: &Perm) -> NielsenTuple {
        NielsenTuple {
            elems: self.elems.iter().map(|x| x.conj(g)).collect(),
        }
    }

    pub fn generates(&self, group: &PermGroup) -> bool {
        PermGroup::new(group.degree(), self.elems.clone()).order() == group.order()
    }

    /// The class positions of the entries, in tuple order.
    pub fn arrangement(&self, labeling: &Labeling) -> Result<Vec<usize>, Error> {
        self.elems.iter().map(|x| labeling.identify(x)).collect()
    }
}

/// Search context over one group and its labeling.
pub struct SearchCtx {
    pub group: Arc<PermGroup>,
    pub labeling: Arc<Labeling>,
    pub mult: Arc<ClassMult>,
}

impl SearchCtx {
    pub fn new(group: Arc<PermGroup>, labeling: Arc<Labeling>) -> SearchCtx {
        let mult = Arc::new(ClassMult::new(labeling.clone()));
        SearchCtx {
            group,
            labeling,
            mult,
        }
    }

    fn class_orbit(&self, pos: usize) -> Result<Arc<ClassOrbit>, Error> {
        self.labeling
            .set
            .orbit(self.labeling.classes[pos].class_idx)
    }

    fn rep(&self, pos: usize) -> &Perm {
        self.labeling.rep(pos)
    }
}

/// Classes `X` from which the identity is still reachable by multiplying one
/// element of each remaining class; `reach[k]` applies after `k` entries of
/// the tuple have been fixed.
fn reach_sets(ctx: &SearchCtx, ty: &RamificationType) -> Result<Vec<HashSet<usize>>, Error> {
    let r = ty.r();
    let lab = &ctx.labeling;
    let identity_pos = lab
        .classes
        .iter()
        .position(|c| c.order == 1)
        .expect("identity class");
    let mut reach: Vec<HashSet<usize>> = vec![HashSet::new(); r + 1];
    reach[r].insert(identity_pos);
    // Last step without a product distribution: X * C_last can reach the
    // identity exactly when X is the inverse class of the last entry.
    reach[r - 1].insert(lab.inverse_position(ty.entries[r - 1])?);
    for k in (1..r - 1).rev() {
        let cpos = ty.entries[k];
        let mut set = HashSet::new();
        for x in 0..lab.len() {
            let dist = ctx.mult.distribution(x, cpos)?;
            if dist.iter().any(|(y, _)| reach[k + 1].contains(y)) {
                set.insert(x);
            }
        }
        reach[k] = set;
    }
    Ok(reach)
}

/// Exact enumeration of the product-one generating tuples of the normalized
/// arrangement of `ty`, one representative per conjugacy class of tuples.
///
/// The first entry is pinned to its class representative; entry `k` then
/// ranges over orbit representatives of the pointwise stabilizer of the
/// prefix acting on the k-th class, which enumerates conjugacy classes of
/// prefixes exactly once. Partial products are pruned against the
/// class-reachability sets.
pub fn enumerate_tuples(ctx: &SearchCtx, ty: &RamificationType) -> Result<Vec<NielsenTuple>, Error> {
    let r = ty.r();
    assert!(r >= 3);
    let lab = &ctx.labeling;
    let group = &ctx.group;
    let reach = reach_sets(ctx, ty)?;

    let c1 = ctx.rep(ty.entries[0]).clone();
    let s1 = lab.set.rep_centralizer(lab.classes[ty.entries[0]].class_idx)?;
    let g_order = group.order();

    struct Frame<'a> {
        ctx: &'a SearchCtx,
        ty: &'a RamificationType,
        reach: &'a [HashSet<usize>],
        g_order: u128,
        out: Vec<NielsenTuple>,
        last_orbit: Arc<ClassOrbit>,
        last_pos: usize,
    }

    // depth k: prefix has k elements (x1..xk); S = pointwise stabilizer
    fn descend(
        f: &mut Frame,
        prefix: &mut Vec<Perm>,
        product: Perm,
        stab: PermGroup,
        locked: bool,
        k: usize,
    ) -> Result<(), Error> {
        let r = f.ty.r();
        if k == r - 1 {
            let xr = product.inverse();
            if f.last_orbit.contains(&xr) {
                let generates = locked || {
                    let mut gens = prefix.clone();
                    gens.push(xr.clone());
                    PermGroup::new(xr.degree(), gens).order() == f.g_order
                };
                if generates {
                    let mut elems = prefix.clone();
                    elems.push(xr);
                    f.out.push(NielsenTuple::new(elems));
                }
            }
            return Ok(());
        }
        let cpos = f.ty.entries[k];
        let orbit = if cpos == f.last_pos {
            f.last_orbit.clone()
        } else {
            f.ctx.class_orbit(cpos)?
        };
        let elems = orbit.elements();
        let mut visited = vec![false; elems.len()];
        for start in 0..elems.len() {
            if visited[start] {
                continue;
            }
            // mark the stabilizer orbit of this candidate
            let mut queue = vec![start as u32];
            visited[start] = true;
            let mut qi = 0;
            let mut buf = Vec::new();
            while qi < queue.len() {
                let cur = queue[qi] as usize;
                qi += 1;
                for g in stab.generators() {
                    elems[cur].conj_into(g, &mut buf);
                    let j = orbit
                        .position_of(&buf)
                        .expect("stabilizer preserves the class") as usize;
                    if !visited[j] {
                        visited[j] = true;
                        queue.push(j as u32);
                    }
                }
            }
            let b = elems[start].clone();
            let z = product.mul(&b);
            let zpos = f.ctx.labeling.identify(&z)?;
            if !f.reach[k + 1].contains(&zpos) {
                continue;
            }
            let new_locked = locked || {
                let mut gens = prefix.clone();
                gens.push(b.clone());
                PermGroup::new(b.degree(), gens).order() == f.g_order
            };
            let new_stab = if k + 1 == r - 1 {
                // the stabilizer is not needed at the last level
                PermGroup::trivial(b.degree())
            } else {
                ClassOrbit::build(&stab, b.clone(), usize::MAX)?.centralizer(&stab)
            };
            prefix.push(b);
            descend(f, prefix, z, new_stab, new_locked, k + 1)?;
            prefix.pop();
        }
        Ok(())
    }

    let last_pos = ty.entries[r - 1];
    let last_orbit = ctx.class_orbit(last_pos)?;
    let mut frame = Frame {
        ctx,
        ty,
        reach: &reach,
        g_order,
        out: Vec::new(),
        last_orbit,
        last_pos,
    };
    // feasibility of the pinned first entry
    if frame.reach[1].contains(&ty.entries[0]) {
        let locked = PermGroup::new(group.degree(), vec![c1.clone()]).order() == g_order;
        let mut prefix = vec![c1.clone()];
        descend(&mut frame, &mut prefix, c1, s1, locked, 1)?;
    }
    Ok(frame.out)
}

/// The double-coset triple search: one representative per conjugacy class of
/// generating product-one triples of the given (normalized) type.
pub fn find_triples(ctx: &SearchCtx, ty: &RamificationType) -> Result<Vec<NielsenTuple>, Error> {
    assert_eq!(ty.r(), 3);
    enumerate_tuples(ctx, ty)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratingVerdict {
    Yes,
    No,
    Unknown(String),
}

/// Incremental subgroup-closure test: maintains, per class of the partial
/// product, conjugacy-class representatives of the subgroups generated so
/// far; each new entry extends them over double cosets (realized as orbits
/// of the normalizer on the new class); the last step checks full-group
/// closure against the inverse class of the final entry.
pub fn is_generating_type(
    ctx: &SearchCtx,
    ty: &RamificationType,
    element_cap: usize,
) -> Result<GeneratingVerdict, Error> {
    let lab = &ctx.labeling;
    let group = &ctx.group;
    let r = ty.r();
    let degree = group.degree();

    if group.order() > element_cap as u128 {
        return Ok(GeneratingVerdict::Unknown(format!(
            "group order {} exceeds the closure-search cap {element_cap}",
            group.order()
        )));
    }

    struct Sub {
        group: PermGroup,
        gens: Vec<Perm>,
    }

    // subgroup lists keyed by the class position of the partial product
    let mut lists: Vec<Vec<Sub>> = (0..lab.len()).map(|_| Vec::new()).collect();
    let c1 = ctx.rep(ty.entries[0]).clone();
    lists[ty.entries[0]].push(Sub {
        group: PermGroup::new(degree, vec![c1.clone()]),
        gens: vec![c1],
    });

    let inv_last = lab.inverse_position(ty.entries[r - 1])?;

    for step in 1..r - 1 {
        let new_pos = ty.entries[step];
        let new_orbit = ctx.class_orbit(new_pos)?;
        let final_step = step == r - 2;
        let mut next: Vec<Vec<Sub>> = (0..lab.len()).map(|_| Vec::new()).collect();

        for b in 0..lab.len() {
            if lists[b].is_empty() {
                continue;
            }
            let x = ctx.rep(b).clone();
            let cgx = lab.set.rep_centralizer(lab.classes[b].class_idx)?;
            let cgx_elems = cgx.elements(element_cap)?;
            for sub in &lists[b] {
                // K = normalizer of the subgroup inside the centralizer of x
                let kgens: Vec<Perm> = cgx_elems
                    .iter()
                    .filter(|c| {
                        sub.gens.iter().all(|h| sub.group.contains(&h.conj(c)))
                    })
                    .cloned()
                    .collect();
                let k = PermGroup::new(degree, kgens);
                // t ranges over K-orbit representatives of the new class
                let elems = new_orbit.elements();
                let mut visited = vec![false; elems.len()];
                for start in 0..elems.len() {
                    if visited[start] {
                        continue;
                    }
                    let mut queue = vec![start];
                    visited[start] = true;
                    let mut qi = 0;
                    let mut buf = Vec::new();
                    while qi < queue.len() {
                        let cur = queue[qi];
                        qi += 1;
                        for g in k.generators() {
                            elems[cur].conj_into(g, &mut buf);
                            let j = new_orbit.position_of(&buf).unwrap() as usize;
                            if !visited[j] {
                                visited[j] = true;
                                queue.push(j);
                            }
                        }
                    }
                    let t = &elems[start];
                    let y = x.mul(t);
                    let ypos = lab.identify(&y)?;
                    if final_step {
                        if ypos != inv_last {
                            continue;
                        }
                        let mut gens = sub.gens.clone();
                        gens.push(t.clone());
                        if PermGroup::new(degree, gens).order() == group.order() {
                            return Ok(GeneratingVerdict::Yes);
                        }
                    } else {
                        // conjugate the partial pair so the product is the
                        // class representative again
                        let rho = lab
                            .set
                            .conjugator_from_rep(lab.classes[ypos].class_idx, &y)?
                            .ok_or(Error::NotInGroup)?
                            .inverse();
                        let mut gens: Vec<Perm> =
                            sub.gens.iter().map(|h| h.conj(&rho)).collect();
                        gens.push(t.conj(&rho));
                        let h = PermGroup::new(degree, gens.clone());
                        // dedup under conjugacy by the centralizer of the rep
                        let cy = lab.set.rep_centralizer(lab.classes[ypos].class_idx)?;
                        let cy_elems = cy.elements(element_cap)?;
                        let dup = next[ypos].iter().any(|old| {
                            old.group.order() == h.order()
                                && cy_elems.iter().any(|c| {
                                    gens.iter().all(|hg| old.group.contains(&hg.conj(c)))
                                })
                        });
                        if !dup {
                            next[ypos].push(Sub { group: h, gens });
                        }
                    }
                }
            }
        }
        if !final_step {
            lists = next;
        }
    }
    Ok(GeneratingVerdict::No)
}

#[derive(Clone, Debug)]
pub struct ProbeOutcome {
    /// Orbit census verified complete against the class size.
    pub complete: bool,
    /// Number of generating product-one triples found, up to conjugacy.
    pub triples: Vec<NielsenTuple>,
}

/// Random-conjugation triple probe: accumulates centralizer-orbit
/// representatives of the middle class until the orbit sizes sum to the
/// class size (completeness certificate), then filters by product class and
/// generation. Runs out of budget honestly: `complete = false`.
pub fn random_triple_probe(
    ctx: &SearchCtx,
    a_pos: usize,
    b_pos: usize,
    c_pos: usize,
    budget: usize,
    seed: u64,
) -> Result<ProbeOutcome, Error> {
    let lab = &ctx.labeling;
    let a = ctx.rep(a_pos).clone();
    let h = lab.set.rep_centralizer(lab.classes[a_pos].class_idx)?;
    let b_size = lab.classes[b_pos].size;
    let b_rep = ctx.rep(b_pos).clone();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    // (representative, order of a*x, h-orbit size)
    let mut orbs: Vec<(Perm, u64, u128)> = Vec::new();
    let mut covered: u128 = 0;
    for _ in 0..budget {
        if covered == b_size {
            break;
        }
        let g = ctx.group.random_element(&mut rng);
        let x = b_rep.conj(&g);
        let o = a.mul(&x).order();
        let mut known = false;
        for (y, oy, _) in &orbs {
            if *oy == o && conjugacy::are_conjugate(&h, y, &x, usize::MAX)? {
                known = true;
                break;
            }
        }
        if !known {
            let size = ClassOrbit::build(&h, x.clone(), usize::MAX)?.size() as u128;
            covered += size;
            orbs.push((x, o, size));
        }
    }
    let complete = covered == b_size;
    let mut triples = Vec::new();
    if complete {
        for (x, _, _) in &orbs {
            let z = a.mul(x).inverse();
            if lab.identify(&z)? == c_pos {
                let t = NielsenTuple::new(vec![a.clone(), x.clone(), z]);
                if t.generates(&ctx.group) {
                    triples.push(t);
                }
            }
        }
    }
    Ok(ProbeOutcome { complete, triples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn ctx_for(name: &str) -> SearchCtx {
        let aff = catalog::load(name).unwrap();
        let lab = Arc::new(Labeling::compute(aff.group_classes().unwrap()).unwrap());
        SearchCtx::new(aff.group.clone(), lab)
    }

    #[test]
    fn agl18_triple_count() {
        let ctx = ctx_for("AGL(1,8)");
        let ty = RamificationType::parse("(2A,7D,7F)", &ctx.labeling).unwrap();
        let triples = find_triples(&ctx, &ty).unwrap();
        assert_eq!(triples.len(), 1);
        for t in &triples {
            assert!(t.is_product_one());
            assert!(t.generates(&ctx.group));
        }
    }

    #[test]
    fn q8_3_triple_count_is_12() {
        let ctx = ctx_for("5^2:Q8:3");
        let ty = RamificationType::parse("(3A,3B,4A)", &ctx.labeling).unwrap();
        let triples = find_triples(&ctx, &ty).unwrap();
        assert_eq!(triples.len(), 12);
    }

    #[test]
    fn zero_structure_constant_type_has_no_triples() {
        use crate::types::structure_constant;
        let ctx = ctx_for("ASL(3,2)");
        let lab = &ctx.labeling;
        let a = lab.position("2A").unwrap();
        let dist = ctx.mult.distribution(a, a).unwrap();
        let reachable: Vec<usize> = dist.iter().map(|&(p, _)| p).collect();
        let missing = (1..lab.len()).find(|p| !reachable.contains(p)).unwrap();
        let inv = lab.inverse_position(missing).unwrap();
        let ty = RamificationType::new(vec![a, a, inv]);
        assert_eq!(structure_constant(&ty, &ctx.mult).unwrap(), Some(0));
        assert!(find_triples(&ctx, &ty).unwrap().is_empty());
    }

    #[test]
    fn enumeration_matches_brute_force_on_asl23() {
        // every generating product-one tuple class is hit exactly once
        let ctx = ctx_for("ASL(2,3)");
        let ty = RamificationType::parse("(3E,3D,4A)", &ctx.labeling).unwrap();
        let found = enumerate_tuples(&ctx, &ty).unwrap();
        // brute force over the full classes
        let lab = &ctx.labeling;
        let arrangement = &ty.entries;
        let o1 = ctx.class_orbit(arrangement[0]).unwrap();
        let o2 = ctx.class_orbit(arrangement[1]).unwrap();
        let mut raw: Vec<NielsenTuple> = Vec::new();
        for x1 in o1.elements() {
            for x2 in o2.elements() {
                let x3 = x1.mul(x2).inverse();
                if lab.identify(&x3).unwrap() == arrangement[2] {
                    let t = NielsenTuple::new(vec![x1.clone(), x2.clone(), x3]);
                    if t.generates(&ctx.group) {
                        raw.push(t);
                    }
                }
            }
        }
        // Generating tuples have trivial stabilizer under conjugation, so
        // each class has exactly |G| raw members.
        let order = ctx.group.order() as usize;
        assert_eq!(raw.len() % order, 0);
        assert_eq!(found.len(), raw.len() / order);
        // every found representative appears among the raw tuples
        let raw_set: HashSet<&NielsenTuple> = raw.iter().collect();
        for t in &found {
            assert!(raw_set.contains(t));
        }
    }

    #[test]
    fn generating_type_examples() {
        let ctx = ctx_for("ASL(3,2)");
        let ty = RamificationType::parse("(3A,3A,3A,3A)", &ctx.labeling).unwrap();
        assert_eq!(
            is_generating_type(&ctx, &ty, 100_000).unwrap(),
            GeneratingVerdict::Yes
        );
        let ctx9 = ctx_for("AGL(2,3)");
        let ty9 = RamificationType::parse("(2B,2B,3C,3C)", &ctx9.labeling).unwrap();
        assert_eq!(
            is_generating_type(&ctx9, &ty9, 100_000).unwrap(),
            GeneratingVerdict::Yes
        );
    }

    #[test]
    fn non_generating_type_detected() {
        // in 3^2:Q8 the socle-translation classes cannot generate
        let ctx = ctx_for("3^2:Q8");
        let lab = &ctx.labeling;
        let t3 = lab
            .classes
            .iter()
            .position(|c| c.order == 3)
            .expect("translation class");
        let ty = RamificationType::new(vec![t3, t3, t3, t3]);
        // may or may not satisfy RH; the closure search answers regardless
        assert_eq!(
            is_generating_type(&ctx, &ty, 100_000).unwrap(),
            GeneratingVerdict::No
        );
    }

    #[test]
    fn probe_budget_zero_is_incomplete() {
        let ctx = ctx_for("AGL(1,8)");
        let lab = &ctx.labeling;
        let a = lab.position("2A").unwrap();
        let d = lab.position("7D").unwrap();
        let f = lab.position("7F").unwrap();
        let out = random_triple_probe(&ctx, a, d, f, 0, 1).unwrap();
        assert!(!out.complete);
    }

    #[test]
    fn probe_matches_deterministic_path() {
        let ctx = ctx_for("AGL(1,8)");
        let lab = &ctx.labeling;
        let a = lab.position("2A").unwrap();
        let d = lab.position("7D").unwrap();
        let f = lab.position("7F").unwrap();
        let out = random_triple_probe(&ctx, a, d, f, 4000, 1).unwrap();
        assert!(out.complete);
        let ty = RamificationType::parse("(2A,7D,7F)", &ctx.labeling).unwrap();
        let direct = find_triples(&ctx, &ty).unwrap();
        assert_eq!(out.triples.len(), direct.len());
    }
}
