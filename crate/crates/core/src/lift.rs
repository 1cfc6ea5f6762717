//! The projection-fiber route: push a type through the canonical projection
//! onto the point stabilizer, compute braid orbits there, lift quotient
//! orbit representatives back through the socle fibers, and split the
//! surviving tuples into socle-conjugation orbits.

use crate::affine::AffineGroup;
use crate::braid::{apply_braid, braid_orbits, Canonicalizer, OrbitCensus};
use crate::classes::Labeling;
use crate::conjugacy::center;
use crate::error::Error;
use crate::group::PermGroup;
use crate::perm::Perm;
use crate::search::{NielsenTuple, SearchCtx};
use crate::types::RamificationType;
use serde::Serialize;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

/// Shared state for quotient work over one affine group.
pub struct QuotientSetup {
    pub aff: Arc<AffineGroup>,
    pub g_labeling: Arc<Labeling>,
    pub m_labeling: Arc<Labeling>,
    pub m_ctx: SearchCtx,
}

impl QuotientSetup {
    pub fn new(aff: Arc<AffineGroup>) -> Result<QuotientSetup, Error> {
        let g_labeling = Arc::new(Labeling::compute(aff.group_classes()?)?);
        let m_labeling = Arc::new(Labeling::compute(aff.stabilizer_classes()?)?);
        let m_ctx = SearchCtx::new(aff.stabilizer.clone(), m_labeling.clone());
        Ok(QuotientSetup {
            aff,
            g_labeling,
            m_labeling,
            m_ctx,
        })
    }

    pub fn with_g_labeling(
        aff: Arc<AffineGroup>,
        g_labeling: Arc<Labeling>,
    ) -> Result<QuotientSetup, Error> {
        let m_labeling = Arc::new(Labeling::compute(aff.stabilizer_classes()?)?);
        let m_ctx = SearchCtx::new(aff.stabilizer.clone(), m_labeling.clone());
        Ok(QuotientSetup {
            aff,
            g_labeling,
            m_labeling,
            m_ctx,
        })
    }
}

/// Pushes a type through the projection: the classes of `pi(rep_i)` in the
/// stabilizer, with its own labels. Errors when an entry lies in the socle
/// (its image would be the identity).
pub fn push_type(
    setup: &QuotientSetup,
    g_type: &RamificationType,
) -> Result<RamificationType, Error> {
    let mut entries = Vec::with_capacity(g_type.r());
    for &pos in &g_type.entries {
        let rep = setup.g_labeling.rep(pos);
        let m = setup.aff.project(rep);
        if m.is_identity() {
            return Err(Error::Other(format!(
                "entry {} projects into the socle; the quotient type must be identity-free",
                setup.g_labeling.classes[pos].label
            )));
        }
        entries.push(setup.m_labeling.identify(&m)?);
    }
    Ok(RamificationType::new(entries))
}

/// The pushed classes in the order of the (normalized) G-type entries.
fn pushed_arrangement(
    setup: &QuotientSetup,
    g_type: &RamificationType,
) -> Result<Vec<usize>, Error> {
    g_type
        .entries
        .iter()
        .map(|&pos| {
            let m = setup.aff.project(setup.g_labeling.rep(pos));
            setup.m_labeling.identify(&m)
        })
        .collect()
}

/// Finds a tuple in the orbit of `example` whose class arrangement equals
/// `target` (one always exists: the braid action realizes every arrangement).
fn orbit_member_with_arrangement(
    setup: &QuotientSetup,
    example: &NielsenTuple,
    target: &[usize],
    form_cap: usize,
) -> Result<NielsenTuple, Error> {
    let canon = Canonicalizer::new(setup.m_labeling.clone());
    let start = canon.canonical(example)?;
    if start.arrangement(&setup.m_labeling)? == target {
        return Ok(start);
    }
    let mut visited: HashSet<NielsenTuple> = HashSet::new();
    visited.insert(start.clone());
    let mut frontier = vec![start];
    while let Some(t) = frontier.pop() {
        for index in 0..t.r() - 1 {
            for inverse in [false, true] {
                let moved = apply_braid(&t, index, inverse);
                let c = canon.canonical(&moved)?;
                if visited.contains(&c) {
                    continue;
                }
                if c.arrangement(&setup.m_labeling)? == target {
                    return Ok(c);
                }
                if visited.len() >= form_cap {
                    return Err(Error::ResourceCap(
                        "arrangement search exceeded the form cap".into(),
                    ));
                }
                visited.insert(c.clone());
                frontier.push(c);
            }
        }
    }
    Err(Error::Other(
        "no orbit member with the requested arrangement".into(),
    ))
}

/// Outcome of lifting one quotient orbit.
#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub quotient_orbit: usize,
    pub quotient_length: usize,
    pub fiber_size: usize,
    pub u_sizes: Vec<usize>,
    /// product-one generating lifts of the quotient representative
    pub survivors: usize,
    /// socle-orbit count on the survivors (with the center correction)
    pub q: usize,
    #[serde(skip)]
    pub orbit_reps: Vec<NielsenTuple>,
    pub center_corrected: bool,
}

/// Lifts one quotient orbit: intersects each fiber with the prescribed
/// class, prunes the product search by right-to-left achievable sets, keeps
/// the generating product-one tuples, and splits them under diagonal
/// conjugation by the socle (extended by a lift of the stabilizer's center
/// when that is nontrivial).
pub fn lift_orbit(
    setup: &QuotientSetup,
    g_type: &RamificationType,
    orbit_id: usize,
    quotient_rep: &NielsenTuple,
    quotient_length: usize,
) -> Result<LiftReport, Error> {
    let aff = &setup.aff;
    let r = g_type.r();
    let n = aff.degree;

    // U_i = fiber over m_i intersected with the prescribed G-class
    let mut u_sets: Vec<Vec<Perm>> = Vec::with_capacity(r);
    for (i, &pos) in g_type.entries.iter().enumerate() {
        let fiber = aff.fiber(&quotient_rep.elems[i]);
        debug_assert_eq!(fiber.len(), n);
        let rep = setup.g_labeling.rep(pos);
        let mut u = Vec::new();
        for x in fiber {
            if setup.g_labeling.set.same_class(&x, rep)? {
                u.push(x);
            }
        }
        u_sets.push(u);
    }
    let u_sizes: Vec<usize> = u_sets.iter().map(|u| u.len()).collect();

    // achievable suffix products, right to left
    let mut suffix: Vec<HashSet<Perm>> = vec![HashSet::new(); r + 1];
    suffix[r].insert(Perm::identity(n));
    for k in (0..r).rev() {
        let mut set = HashSet::new();
        for x in &u_sets[k] {
            for s in &suffix[k + 1] {
                set.insert(x.mul(s));
            }
        }
        suffix[k] = set;
    }

    // depth-first search over the fibers with exact feasibility pruning
    let mut survivors: Vec<NielsenTuple> = Vec::new();
    let mut stack: Vec<(Vec<Perm>, Perm)> = vec![(Vec::new(), Perm::identity(n))];
    while let Some((prefix, prod)) = stack.pop() {
        let k = prefix.len();
        if k == r {
            if prod.is_identity() {
                let t = NielsenTuple::new(prefix);
                if t.generates(&aff.group) {
                    survivors.push(t);
                }
            }
            continue;
        }
        for x in &u_sets[k] {
            let next = prod.mul(x);
            // the remaining entries must multiply to next^-1
            if suffix[k + 1].contains(&next.inverse()) {
                let mut p = prefix.clone();
                p.push(x.clone());
                stack.push((p, next));
            }
        }
    }

    // socle action, extended by center lifts when Z(M) != 1
    let mut action_gens: Vec<Perm> = setup.aff.socle.generators().to_vec();
    let z_m = center(&setup.aff.stabilizer, 4_000_000)?;
    let center_corrected = z_m.order() > 1;
    if center_corrected {
        // stabilizer elements are their own preimages under the projection
        action_gens.extend(z_m.generators().iter().cloned());
    }
    let mut seen: HashSet<NielsenTuple> = HashSet::new();
    let mut orbit_reps = Vec::new();
    let mut q = 0usize;
    for t in &survivors {
        if seen.contains(t) {
            continue;
        }
        q += 1;
        orbit_reps.push(t.clone());
        let orbit = crate::group::orbit_generic(&action_gens, t.clone(), |s, g| s.conj(g));
        for s in orbit {
            seen.insert(s);
        }
    }
    debug_assert_eq!(seen.len(), survivors.len());

    Ok(LiftReport {
        quotient_orbit: orbit_id,
        quotient_length,
        fiber_size: n,
        u_sizes,
        survivors: survivors.len(),
        q,
        orbit_reps,
        center_corrected,
    })
}

/// Final orbit census above one quotient orbit.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub enum Resolution {
    /// no generating lifts above this quotient orbit for this type
    Empty,
    /// `orbits` orbits, each of length `length`
    Resolved { orbits: usize, length: usize },
    /// probe budget exhausted before the split stabilized
    Unresolved { q: usize },
}

/// Resolves the `q = q1 * q2` split: `q = 1` is the one-to-one case; for
/// `q > 1` a bounded braid-closure probe in the full group connects or
/// separates the socle-orbit representatives.
pub fn resolve_q(
    setup: &QuotientSetup,
    report: &LiftReport,
    probe_form_budget: usize,
) -> Result<Resolution, Error> {
    if report.q == 0 {
        return Ok(Resolution::Empty);
    }
    if report.q == 1 {
        return Ok(Resolution::Resolved {
            orbits: 1,
            length: report.quotient_length,
        });
    }
    // probe: braid BFS in G from each representative until the partition of
    // representatives into connected blocks stabilizes
    let canon = Canonicalizer::new(setup.g_labeling.clone());
    let mut rep_canons = Vec::new();
    for t in &report.orbit_reps {
        rep_canons.push(canon.canonical(t)?);
    }
    let mut block: Vec<usize> = (0..report.q).collect();
    let canon_index: HashMap<&NielsenTuple, usize> =
        rep_canons.iter().zip(0..).collect();

    let mut visited: HashSet<NielsenTuple> = HashSet::new();
    for start in 0..report.q {
        if block[start] != start {
            continue;
        }
        let c0 = rep_canons[start].clone();
        if visited.contains(&c0) {
            continue;
        }
        visited.insert(c0.clone());
        let mut frontier = vec![c0];
        while let Some(t) = frontier.pop() {
            for index in 0..t.r() - 1 {
                for inverse in [false, true] {
                    let moved = apply_braid(&t, index, inverse);
                    let c = canon.canonical(&moved)?;
                    if visited.contains(&c) {
                        continue;
                    }
                    if visited.len() >= probe_form_budget {
                        return Ok(Resolution::Unresolved { q: report.q });
                    }
                    if let Some(&other) = canon_index.get(&c) {
                        // merge blocks
                        let a = block[start];
                        let b = block[other];
                        let target = a.min(b);
                        for bb in block.iter_mut() {
                            if *bb == a || *bb == b {
                                *bb = target;
                            }
                        }
                    }
                    visited.insert(c.clone());
                    frontier.push(c);
                }
            }
        }
    }
    let blocks: HashSet<usize> = block.iter().copied().collect();
    let q1 = blocks.len();
    if report.q % q1 != 0 {
        return Err(Error::Other(format!(
            "socle-orbit blocks of unequal size: q = {}, blocks = {q1}",
            report.q
        )));
    }
    let q2 = report.q / q1;
    // each block must have the same size for the q1 x q2 accounting
    for b in &blocks {
        let size = block.iter().filter(|&&x| x == *b).count();
        if size != q2 {
            return Err(Error::Other(
                "socle-orbit blocks of unequal size".into(),
            ));
        }
    }
    Ok(Resolution::Resolved {
        orbits: q1,
        length: q2 * report.quotient_length,
    })
}

/// Full projection-fiber run for one type: quotient orbits, lifts, and the
/// resolved census. The census is directly comparable with the direct
/// engine's output.
pub struct ProjectionFiberOutcome {
    pub quotient_type: RamificationType,
    pub quotient_census: OrbitCensus,
    pub reports: Vec<LiftReport>,
    pub resolutions: Vec<Resolution>,
    /// orbit lengths in the full group, sorted descending
    pub lengths: Vec<usize>,
}

pub fn projection_fiber_orbits(
    setup: &QuotientSetup,
    g_type: &RamificationType,
    form_cap: usize,
    probe_budget: usize,
) -> Result<ProjectionFiberOutcome, Error> {
    let m_type = push_type(setup, g_type)?;
    let target = pushed_arrangement(setup, g_type)?;
    let quotient_census = braid_orbits(&setup.m_ctx, &m_type, form_cap)?;
    let mut reports = Vec::new();
    let mut resolutions = Vec::new();
    let mut lengths = Vec::new();
    for (oid, orbit) in quotient_census.orbits.iter().enumerate() {
        let rep = orbit_member_with_arrangement(setup, &orbit.example, &target, form_cap)?;
        let report = lift_orbit(setup, g_type, oid, &rep, orbit.length)?;
        let resolution = resolve_q(setup, &report, probe_budget)?;
        match &resolution {
            Resolution::Empty => {}
            Resolution::Resolved { orbits, length } => {
                for _ in 0..*orbits {
                    lengths.push(*length);
                }
            }
            Resolution::Unresolved { .. } => {
                reports.push(report);
                resolutions.push(resolution);
                return Err(Error::ResourceCap(format!(
                    "projection-fiber probe unresolved for {}",
                    g_type.display(&setup.g_labeling)
                )));
            }
        }
        reports.push(report);
        resolutions.push(resolution);
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    Ok(ProjectionFiberOutcome {
        quotient_type: m_type,
        quotient_census,
        reports,
        resolutions,
        lengths,
    })
}

/// Property report from the lift-lemma checks; any violation is a hard
/// failure inside the function, so a returned report means all passed.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub commutation_samples: usize,
    pub full_group_lifts: usize,
    pub complement_lifts: usize,
    pub genus_checks: usize,
}

/// Checks, on random samples: (a) the projection commutes with every braid
/// move; (b) an arbitrary lift of a generating tuple of the stabilizer
/// generates either the whole group or a complement to the socle; (c) for
/// product-one generating tuples, the quotient genus satisfies
/// `g* = g + 1` when every entry fixes a point and `g* = g + 1 - k` with
/// `k >= 1` otherwise.
pub fn verify_lift_lemmas(
    setup: &QuotientSetup,
    samples: usize,
    seed: u64,
) -> Result<LemmaReport, Error> {
    use rand::Rng;
    use rand::SeedableRng;
    let aff = &setup.aff;
    let n = aff.degree;
    let m = &aff.stabilizer;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    // (a) pi(t . sigma) = pi(t) . sigma
    for _ in 0..samples {
        let mut elems: Vec<Perm> = (0..3).map(|_| aff.group.random_element(&mut rng)).collect();
        let prod = elems.iter().fold(Perm::identity(n), |a, x| a.mul(x));
        elems.push(prod.inverse());
        let t = NielsenTuple::new(elems);
        let index = rng.gen_range(0..t.r() - 1);
        let inverse = rng.gen_bool(0.5);
        let moved_then_pushed = NielsenTuple::new(
            apply_braid(&t, index, inverse)
                .elems
                .iter()
                .map(|x| aff.project(x))
                .collect(),
        );
        let pushed_then_moved = apply_braid(
            &NielsenTuple::new(t.elems.iter().map(|x| aff.project(x)).collect()),
            index,
            inverse,
        );
        if moved_then_pushed != pushed_then_moved {
            return Err(Error::Other(
                "projection failed to commute with a braid move".into(),
            ));
        }
    }

    // (b) arbitrary lifts of generating stabilizer tuples
    let mut full = 0usize;
    let mut complement = 0usize;
    let socle_elems = aff.socle.elements(n)?;
    let mut tries = 0usize;
    while full + complement < samples && tries < samples * 20 {
        tries += 1;
        let m1 = m.random_element(&mut rng);
        let m2 = m.random_element(&mut rng);
        let m3 = m1.mul(&m2).inverse();
        if PermGroup::new(n, vec![m1.clone(), m2.clone()]).order() != m.order() {
            continue;
        }
        let lifted: Vec<Perm> = [m1, m2, m3]
            .iter()
            .map(|mi| {
                let pt = rng.gen_range(0..n as u16);
                let v = crate::linalg::vec_of_point(aff.p(), aff.e(), pt);
                aff.translation_perm(&v).mul(mi)
            })
            .collect();
        let h = PermGroup::new(n, lifted);
        if h.order() == aff.group.order() {
            full += 1;
        } else if h.order() == m.order() {
            for v in &socle_elems {
                if !v.is_identity() && h.contains(v) {
                    return Err(Error::Other(
                        "complement lift intersects the socle".into(),
                    ));
                }
            }
            complement += 1;
        } else {
            return Err(Error::Other(format!(
                "lifted subgroup of order {} is neither the full group nor a complement",
                h.order()
            )));
        }
    }

    // (c) quotient genus over random product-one generating tuples
    let mut genus_checks = 0usize;
    let mut attempts = 0usize;
    while genus_checks < samples && attempts < samples * 50 {
        attempts += 1;
        let r = rng.gen_range(3..=5);
        let mut elems: Vec<Perm> = (0..r - 1)
            .map(|_| aff.group.random_element(&mut rng))
            .collect();
        let prod = elems.iter().fold(Perm::identity(n), |a, x| a.mul(x));
        let last = prod.inverse();
        if last.is_identity() || elems.iter().any(|x| x.is_identity()) {
            continue;
        }
        elems.push(last);
        let t = NielsenTuple::new(elems);
        if !t.generates(&aff.group) {
            continue;
        }
        let pushed: Vec<Perm> = t.elems.iter().map(|x| aff.project(x)).collect();
        if pushed.iter().any(|x| x.is_identity()) {
            continue;
        }
        // Riemann-Hurwitz on n points for g, on n-1 for g*
        let ind_g: usize = t.elems.iter().map(|x| x.index()).sum();
        let ind_m: usize = pushed.iter().map(|x| x.index()).sum();
        if ind_g % 2 != 0 || ind_m % 2 != 0 {
            return Err(Error::Other("odd index sum".into()));
        }
        let two_g = ind_g as i64 - 2 * (n as i64 - 1);
        let two_gstar = ind_m as i64 - 2 * (n as i64 - 2);
        if two_g % 2 != 0 || two_gstar % 2 != 0 {
            return Err(Error::Other("non-integer genus".into()));
        }
        let g = two_g / 2;
        let gstar = two_gstar / 2;
        let all_fix = t.elems.iter().all(|x| x.fixed_points() > 0);
        if all_fix {
            if gstar != g + 1 {
                return Err(Error::Other(format!(
                    "expected quotient genus {} to be {} for a fixed-point tuple",
                    gstar,
                    g + 1
                )));
            }
        } else if gstar > g {
            return Err(Error::Other(format!(
                "quotient genus {gstar} exceeds {g} despite a fixed-point-free entry"
            )));
        }
        genus_checks += 1;
    }

    Ok(LemmaReport {
        commutation_samples: samples,
        full_group_lifts: full,
        complement_lifts: complement,
        genus_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn setup_for(name: &str) -> QuotientSetup {
        QuotientSetup::new(catalog::load(name).unwrap()).unwrap()
    }

    #[test]
    fn push_rejects_socle_entries() {
        let setup = setup_for("ASL(2,3)");
        // class 3A is the translation class: its projection is the identity
        let pos = setup.g_labeling.position("3A").unwrap();
        let ty = RamificationType::new(vec![pos, pos, pos]);
        assert!(push_type(&setup, &ty).is_err());
    }

    #[test]
    fn asl32_3a_pushes_to_quotient_3a() {
        let setup = setup_for("ASL(3,2)");
        let ty = RamificationType::parse("(3A,3A,3A,3A)", &setup.g_labeling).unwrap();
        let pushed = push_type(&setup, &ty).unwrap();
        let disp = pushed.display(&setup.m_labeling);
        assert_eq!(disp, "(3A,3A,3A,3A)");
    }

    #[test]
    fn commutation_of_projection_with_braiding() {
        use rand::SeedableRng;
        let setup = setup_for("ASL(3,2)");
        let aff = &setup.aff;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            // random product-one tuple in G
            let mut elems: Vec<Perm> = (0..3).map(|_| aff.group.random_element(&mut rng)).collect();
            let prod = elems
                .iter()
                .fold(Perm::identity(aff.degree), |a, x| a.mul(x));
            elems.push(prod.inverse());
            let t = NielsenTuple::new(elems);
            for index in 0..3 {
                for inverse in [false, true] {
                    let lhs = NielsenTuple::new(
                        apply_braid(&t, index, inverse)
                            .elems
                            .iter()
                            .map(|x| aff.project(x))
                            .collect(),
                    );
                    let pushed = NielsenTuple::new(
                        t.elems.iter().map(|x| aff.project(x)).collect(),
                    );
                    let rhs = apply_braid(&pushed, index, inverse);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn lift_lemma_complement_or_full() {
        use rand::Rng;
        use rand::SeedableRng;
        let setup = setup_for("ASL(3,2)");
        let aff = &setup.aff;
        let m = &aff.stabilizer;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        let mut both = [false, false];
        for _ in 0..300 {
            // random generating product-one tuple of M
            let m1 = m.random_element(&mut rng);
            let m2 = m.random_element(&mut rng);
            let m3 = m1.mul(&m2).inverse();
            if PermGroup::new(aff.degree, vec![m1.clone(), m2.clone()]).order() != m.order() {
                continue;
            }
            // arbitrary lifts
            let vs: Vec<Perm> = (0..3)
                .map(|_| {
                    let pt = rng.gen_range(0..aff.degree as u16);
                    let v = crate::linalg::vec_of_point(aff.p(), aff.e(), pt);
                    aff.translation_perm(&v)
                })
                .collect();
            let lifted: Vec<Perm> = [m1, m2, m3]
                .iter()
                .zip(&vs)
                .map(|(mi, v)| v.mul(mi))
                .collect();
            let h = PermGroup::new(aff.degree, lifted);
            let ho = h.order();
            if ho == aff.group.order() {
                both[0] = true;
            } else {
                assert_eq!(ho, m.order(), "complement or full group");
                // trivial intersection with the socle
                for v in aff.socle.elements(64).unwrap() {
                    if !v.is_identity() {
                        assert!(!h.contains(&v));
                    }
                }
                both[1] = true;
            }
        }
        assert!(both[0], "never saw a full-group lift");
    }

    #[test]
    fn asl32_projection_fiber_reproduces_direct() {
        let setup = setup_for("ASL(3,2)");
        let ty = RamificationType::parse("(3A,3A,3A,3A)", &setup.g_labeling).unwrap();
        let out = projection_fiber_orbits(&setup, &ty, 10_000_000, 10_000_000).unwrap();
        // quotient orbits of lengths 90 and 144; q = 2 above both; resolved
        // to one orbit of 180 and two of 144
        let mut qlens = out.quotient_census.lengths();
        qlens.sort_unstable();
        assert_eq!(qlens, vec![90, 144]);
        for rep in &out.reports {
            assert_eq!(rep.q, 2, "q = 2 over each quotient orbit");
            assert_eq!(rep.fiber_size, 8);
        }
        assert_eq!(out.lengths, vec![180, 144, 144]);
    }
}
