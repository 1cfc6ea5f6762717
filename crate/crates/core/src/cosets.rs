//! Double cosets `H\G/K` with exact sizes, by orbit refinement: K-orbits on
//! canonical representatives of the right cosets of H.

use crate::error::Error;
use crate::group::PermGroup;
use crate::perm::Perm;
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct DoubleCosetRep {
    pub rep: Perm,
    pub size: u128,
}

/// Canonical coset label: the smallest element of `H * x`.
fn coset_min(h_elems: &[Perm], x: &Perm) -> Perm {
    let mut best: Option<Perm> = None;
    let mut buf = Vec::new();
    for h in h_elems {
        h.mul_into(x, &mut buf);
        if best.as_ref().map(|b| buf.as_slice() < b.images()).unwrap_or(true) {
            best = Some(Perm::new(buf.clone()).unwrap());
        }
    }
    best.unwrap()
}

/// One representative per `H g K` double coset, with exact sizes summing to
/// `|G|`. `element_cap` bounds the element list of `H` and the coset count.
pub fn double_cosets(
    g: &PermGroup,
    h: &PermGroup,
    k: &PermGroup,
    element_cap: usize,
) -> Result<Vec<DoubleCosetRep>, Error> {
    if !g.is_subgroup(h) || !g.is_subgroup(k) {
        return Err(Error::NotASubgroup);
    }
    let h_elems = h.elements(element_cap)?;
    let coset_count = g.order() / h.order();
    if coset_count > element_cap as u128 {
        return Err(Error::ResourceCap(format!(
            "{coset_count} cosets exceed the cap {element_cap}"
        )));
    }

    // BFS over the right cosets of H under right multiplication by G's
    // generators, keyed by canonical representative.
    let identity = Perm::identity(g.degree());
    let start = coset_min(&h_elems, &identity);
    let mut index: HashMap<Perm, u32> = HashMap::new();
    index.insert(start.clone(), 0);
    let mut reps = vec![start];
    let mut i = 0;
    while i < reps.len() {
        let cur = reps[i].clone();
        i += 1;
        for gen in g.generators() {
            let moved = coset_min(&h_elems, &cur.mul(gen));
            if !index.contains_key(&moved) {
                index.insert(moved.clone(), reps.len() as u32);
                reps.push(moved);
            }
        }
    }
    debug_assert_eq!(reps.len() as u128, coset_count);

    // K-orbits on the cosets
    let mut seen = vec![false; reps.len()];
    let mut out = Vec::new();
    for start in 0..reps.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start as u32];
        let mut qi = 0;
        while qi < orbit.len() {
            let cur = orbit[qi] as usize;
            qi += 1;
            for gen in k.generators() {
                let moved = coset_min(&h_elems, &reps[cur].mul(gen));
                let j = index[&moved] as usize;
                if !seen[j] {
                    seen[j] = true;
                    orbit.push(j as u32);
                }
            }
        }
        out.push(DoubleCosetRep {
            rep: reps[start].clone(),
            size: orbit.len() as u128 * h.order(),
        });
    }
    debug_assert_eq!(out.iter().map(|d| d.size).sum::<u128>(), g.order());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_group_gives_one_coset() {
        let g = PermGroup::symmetric(4);
        let out = double_cosets(&g, &g.clone(), &g.clone(), 100).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].size, 24);
    }

    #[test]
    fn trivial_subgroups_give_singletons() {
        let g = PermGroup::symmetric(3);
        let t = PermGroup::trivial(3);
        let out = double_cosets(&g, &t, &t.clone(), 100).unwrap();
        assert_eq!(out.len(), 6);
        assert!(out.iter().all(|d| d.size == 1));
    }

    #[test]
    fn s4_transposition_cosets_sum_to_group_order() {
        let g = PermGroup::symmetric(4);
        let h = PermGroup::new(4, vec![Perm::parse_cycles("(1,2)", 4).unwrap()]);
        let out = double_cosets(&g, &h, &h.clone(), 100).unwrap();
        let total: u128 = out.iter().map(|d| d.size).sum();
        assert_eq!(total, 24);
        // brute-force partition of S4 into H g H sets
        let elems = g.elements(30).unwrap();
        let h_elems = h.elements(4).unwrap();
        let mut seen: Vec<Perm> = Vec::new();
        let mut brute_sizes = Vec::new();
        for x in &elems {
            if seen.contains(x) {
                continue;
            }
            let mut coset = Vec::new();
            for a in &h_elems {
                for b in &h_elems {
                    let y = a.mul(x).mul(b);
                    if !coset.contains(&y) {
                        coset.push(y);
                    }
                }
            }
            brute_sizes.push(coset.len() as u128);
            seen.extend(coset);
        }
        let mut got: Vec<u128> = out.iter().map(|d| d.size).collect();
        got.sort_unstable();
        brute_sizes.sort_unstable();
        assert_eq!(got, brute_sizes);
    }

    #[test]
    fn rejects_non_subgroups() {
        let g = PermGroup::new(
            4,
            vec![Perm::parse_cycles("(1,2,3)", 4).unwrap()],
        );
        let h = PermGroup::new(4, vec![Perm::parse_cycles("(1,2)", 4).unwrap()]);
        assert!(matches!(
            double_cosets(&g, &h, &h.clone(), 100),
            Err(Error::NotASubgroup)
        ));
    }

    #[test]
    fn mixed_subgroups() {
        let g = PermGroup::symmetric(4);
        let h = PermGroup::new(
            4,
            vec![
                Perm::parse_cycles("(1,2,3)", 4).unwrap(),
            ],
        );
        let k = PermGroup::new(4, vec![Perm::parse_cycles("(1,2)(3,4)", 4).unwrap()]);
        let out = double_cosets(&g, &h, &k, 100).unwrap();
        assert_eq!(out.iter().map(|d| d.size).sum::<u128>(), 24);
    }
}
