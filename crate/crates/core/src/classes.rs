//! Canonical ATLAS-style class labels.
//!
//! Classes are sorted by element order ascending, then centralizer order
//! descending, then permutation index ascending; remaining ties are split by
//! power maps into already-labeled classes, then by a deterministic product
//! fallback. Labels are `dA, dB, ...` within each element order `d`.

use crate::conjugacy::ClassSet;
use crate::error::Error;
use crate::perm::Perm;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct LabeledClass {
    pub label: String,
    /// Index into the underlying [`ClassSet`].
    pub class_idx: usize,
    pub order: u64,
    pub centralizer_order: u128,
    pub index: usize,
    pub fix: usize,
    pub size: u128,
    /// Set when the four sorting rules plus the product fallback could not
    /// separate this class from a partner (typically inverse classes); the
    /// relative letters of a paired family are a deterministic convention,
    /// not an invariant.
    pub paired: bool,
}

pub struct Labeling {
    pub set: Arc<ClassSet>,
    /// Classes in label order (identity first).
    pub classes: Vec<LabeledClass>,
    by_label: HashMap<String, usize>,
    pos_of_class: Vec<usize>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn letter(i: usize) -> String {
    if i < 26 {
        ((b'A' + i as u8) as char).to_string()
    } else {
        // beyond Z: AA, AB, ...
        format!(
            "{}{}",
            ((b'A' + (i / 26 - 1) as u8) as char),
            ((b'A' + (i % 26) as u8) as char)
        )
    }
}

/// Splits a label like `12B` into its numeric and letter parts.
pub fn split_label(label: &str) -> Option<(u64, String)> {
    let pos = label.find(|c: char| c.is_ascii_alphabetic())?;
    let (num, letters) = label.split_at(pos);
    Some((num.parse().ok()?, letters.to_string()))
}

/// Sort key ordering labels by element order first, then letters.
pub fn label_sort_key(label: &str) -> (u64, String) {
    split_label(label).unwrap_or((u64::MAX, label.to_string()))
}

impl Labeling {
    pub fn compute(set: Arc<ClassSet>) -> Result<Labeling, Error> {
        let n = set.len();
        // Blocks of class indices sharing (order, size, index); block key
        // sorts by order asc, centralizer desc (= class size asc), index asc.
        let mut idxs: Vec<usize> = (0..n).collect();
        idxs.sort_by_key(|&i| {
            let c = &set.classes[i];
            (c.order, c.size, c.index)
        });
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for i in idxs {
            let c = &set.classes[i];
            let key = (c.order, c.size, c.index);
            match blocks.last() {
                Some(b)
                    if {
                        let l = &set.classes[b[0]];
                        (l.order, l.size, l.index) == key
                    } =>
                {
                    blocks.last_mut().unwrap().push(i)
                }
                _ => blocks.push(vec![i]),
            }
        }

        let mut exponents: Vec<u64> = set.classes.iter().map(|c| c.order).collect();
        exponents.sort_unstable();
        exponents.dedup();

        // labeled[class_idx] = final position, assigned block by block
        let mut final_order: Vec<usize> = Vec::with_capacity(n);
        let mut labeled_pos: Vec<Option<usize>> = vec![None; n];
        let mut paired: Vec<bool> = vec![false; n];

        for block in blocks {
            let resolved = if block.len() == 1 {
                block
            } else {
                resolve_block(&set, block, &exponents, &labeled_pos, &mut paired)?
            };
            for i in resolved {
                labeled_pos[i] = Some(final_order.len());
                final_order.push(i);
            }
        }

        // assign letters per element order
        let mut counters: HashMap<u64, usize> = HashMap::new();
        let mut classes = Vec::with_capacity(n);
        let mut by_label = HashMap::new();
        let mut pos_of_class = vec![0usize; n];
        for (pos, &i) in final_order.iter().enumerate() {
            let c = &set.classes[i];
            let k = counters.entry(c.order).or_insert(0);
            let label = format!("{}{}", c.order, letter(*k));
            *k += 1;
            by_label.insert(label.clone(), pos);
            pos_of_class[i] = pos;
            classes.push(LabeledClass {
                label,
                class_idx: i,
                order: c.order,
                centralizer_order: set.group_order / c.size,
                index: c.index,
                fix: c.fix,
                size: c.size,
                paired: paired[i],
            });
        }
        Ok(Labeling {
            set,
            classes,
            by_label,
            pos_of_class,
        })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Position of a label, e.g. `"6F"`.
    pub fn position(&self, label: &str) -> Result<usize, Error> {
        self.by_label
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn get(&self, label: &str) -> Result<&LabeledClass, Error> {
        Ok(&self.classes[self.position(label)?])
    }

    pub fn rep(&self, pos: usize) -> &Perm {
        &self.set.classes[self.classes[pos].class_idx].rep
    }

    /// Label position of the class containing `x`.
    pub fn identify(&self, x: &Perm) -> Result<usize, Error> {
        Ok(self.pos_of_class[self.set.identify(x)?])
    }

    /// Label position of the inverse class of `pos`.
    pub fn inverse_position(&self, pos: usize) -> Result<usize, Error> {
        Ok(self.pos_of_class[self.set.inverse_class(self.classes[pos].class_idx)?])
    }

    /// The label table in display form: label, order, |centralizer|, index,
    /// fix count, class size.
    pub fn table(&self) -> Vec<(String, u64, u128, usize, usize, u128)> {
        self.classes
            .iter()
            .map(|c| (c.label.clone(), c.order, c.centralizer_order, c.index, c.fix, c.size))
            .collect()
    }
}

/// Orders a tied block. Tries power maps `rep^m` with `m` running over the
/// element orders of the group, lowest-order targets first (so for order-6
/// classes the involution parts `x^3` are compared before the squares,
/// matching the published label tables); an exponent decides only when every
/// member's target class is already labeled. Survivor ties fall back to
/// cycle types of products with labeled representatives, then to the
/// canonical representative order with the members flagged as paired.
fn resolve_block(
    set: &ClassSet,
    block: Vec<usize>,
    exponents: &[u64],
    labeled_pos: &[Option<usize>],
    paired: &mut [bool],
) -> Result<Vec<usize>, Error> {
    let d = set.classes[block[0]].order;
    let mut ms: Vec<u64> = exponents.to_vec();
    ms.sort_by_key(|&m| (d / gcd(d, m), m));
    let mut groups: Vec<Vec<usize>> = vec![block];
    for &m in &ms {
        let mut next: Vec<Vec<usize>> = Vec::new();
        for g in groups {
            if g.len() == 1 {
                next.push(g);
                continue;
            }
            // target class of rep^m per member
            let mut keys: Vec<Option<usize>> = Vec::new();
            for &i in &g {
                let t = set.identify(&set.classes[i].rep.pow(m))?;
                keys.push(labeled_pos[t]);
            }
            if keys.iter().any(|k| k.is_none()) {
                next.push(g);
                continue;
            }
            let mut tagged: Vec<(usize, usize)> =
                g.iter().zip(&keys).map(|(&i, k)| (k.unwrap(), i)).collect();
            tagged.sort();
            let mut sub: Vec<usize> = Vec::new();
            let mut last_key = None;
            for (k, i) in tagged {
                if last_key == Some(k) {
                    sub.push(i);
                } else {
                    if !sub.is_empty() {
                        next.push(std::mem::take(&mut sub));
                    }
                    sub.push(i);
                    last_key = Some(k);
                }
            }
            next.push(sub);
        }
        groups = next;
        if groups.iter().all(|g| g.len() == 1) {
            break;
        }
    }
    // fallback: cycle structures of rep * z over labeled class reps z
    let labeled: Vec<usize> = (0..set.len()).filter(|&i| labeled_pos[i].is_some()).collect();
    let mut final_groups: Vec<Vec<usize>> = Vec::new();
    for g in groups {
        if g.len() == 1 {
            final_groups.push(g);
            continue;
        }
        let mut keyed: Vec<(Vec<Vec<u16>>, usize)> = g
            .iter()
            .map(|&i| {
                let key: Vec<Vec<u16>> = labeled
                    .iter()
                    .map(|&z| set.classes[i].rep.mul(&set.classes[z].rep).cycle_type())
                    .collect();
                (key, i)
            })
            .collect();
        keyed.sort();
        let mut prev: Option<&Vec<Vec<u16>>> = None;
        let mut still_tied: Vec<Vec<usize>> = Vec::new();
        for (key, i) in &keyed {
            if prev.map(|p| p == key).unwrap_or(false) {
                still_tied.last_mut().unwrap().push(*i);
            } else {
                still_tied.push(vec![*i]);
            }
            prev = Some(key);
        }
        for tie in still_tied {
            if tie.len() > 1 {
                // keep canonical representative order; flag as paired
                let mut t = tie.clone();
                t.sort_by(|&a, &b| set.classes[a].rep.cmp(&set.classes[b].rep));
                for &i in &t {
                    paired[i] = true;
                }
                final_groups.push(t);
            } else {
                final_groups.push(tie);
            }
        }
    }
    Ok(final_groups.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn identity_class_is_1a() {
        let g = catalog::load("ASL(3,2)").unwrap();
        let lab = Labeling::compute(g.group_classes().unwrap()).unwrap();
        assert_eq!(lab.classes[0].label, "1A");
        assert_eq!(lab.classes[0].order, 1);
    }

    #[test]
    fn s3_labels() {
        use crate::group::PermGroup;
        use std::sync::Arc;
        let s3 = Arc::new(PermGroup::symmetric(3));
        let cs = Arc::new(ClassSet::compute(s3, 100).unwrap());
        let lab = Labeling::compute(cs).unwrap();
        let labels: Vec<&str> = lab.classes.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, vec!["1A", "2A", "3A"]);
        let sizes: Vec<u128> = lab.classes.iter().map(|c| c.size).collect();
        assert_eq!(sizes, vec![1, 3, 2]);
    }

    #[test]
    fn agl33_has_eight_order_six_classes() {
        let g = catalog::load("AGL(3,3)").unwrap();
        let lab = Labeling::compute(g.group_classes().unwrap()).unwrap();
        let sixes: Vec<&LabeledClass> =
            lab.classes.iter().filter(|c| c.order == 6).collect();
        assert_eq!(sixes.len(), 8);
        let cents: Vec<u128> = sixes.iter().map(|c| c.centralizer_order).collect();
        assert_eq!(cents, vec![144, 108, 108, 36, 36, 18, 18, 18]);
        let inds: Vec<usize> = sixes.iter().map(|c| c.index).collect();
        assert_eq!(inds, vec![22, 19, 21, 17, 18, 21, 21, 22]);
    }

    #[test]
    fn agl33_power_split_6f_6g() {
        let g = catalog::load("AGL(3,3)").unwrap();
        let lab = Labeling::compute(g.group_classes().unwrap()).unwrap();
        let f = lab.get("6F").unwrap();
        let g6 = lab.get("6G").unwrap();
        assert_eq!(f.centralizer_order, 18);
        assert_eq!(g6.centralizer_order, 18);
        assert_eq!(f.index, 21);
        assert_eq!(g6.index, 21);
        let fpos = lab.position("6F").unwrap();
        let gpos = lab.position("6G").unwrap();
        let f_cubed = lab.identify(&lab.rep(fpos).pow(3)).unwrap();
        let g_cubed = lab.identify(&lab.rep(gpos).pow(3)).unwrap();
        assert_eq!(lab.classes[f_cubed].label, "2A");
        assert_eq!(lab.classes[g_cubed].label, "2B");
    }

    #[test]
    fn labels_are_generator_order_independent() {
        use crate::affine::{AffineGen, AffineGroup, AffineGroupSpec};
        use crate::linalg::Mat;
        let spec1 = AffineGroupSpec::new(
            3,
            2,
            "AGL(2,3)",
            vec![
                AffineGen { matrix: Mat::new(3, 2, vec![2, 0, 0, 1]), translation: None },
                AffineGen { matrix: Mat::new(3, 2, vec![2, 1, 2, 0]), translation: None },
            ],
        );
        let spec2 = AffineGroupSpec::new(
            3,
            2,
            "AGL(2,3) shuffled",
            vec![
                AffineGen { matrix: Mat::new(3, 2, vec![2, 1, 2, 0]), translation: None },
                AffineGen { matrix: Mat::new(3, 2, vec![0, 2, 1, 0]), translation: None },
                AffineGen { matrix: Mat::new(3, 2, vec![2, 0, 0, 1]), translation: None },
            ],
        );
        let g1 = AffineGroup::build(spec1).unwrap();
        let g2 = AffineGroup::build(spec2).unwrap();
        assert_eq!(g1.group.order(), g2.group.order());
        let l1 = Labeling::compute(g1.group_classes().unwrap()).unwrap();
        let l2 = Labeling::compute(g2.group_classes().unwrap()).unwrap();
        let t1: Vec<(String, u128)> = l1.classes.iter().map(|c| (c.label.clone(), c.size)).collect();
        let t2: Vec<(String, u128)> = l2.classes.iter().map(|c| (c.label.clone(), c.size)).collect();
        assert_eq!(t1, t2);
        // the labeled representatives agree class by class
        for (a, b) in l1.classes.iter().zip(&l2.classes) {
            assert_eq!(
                l1.set.classes[a.class_idx].rep,
                l2.set.classes[b.class_idx].rep
            );
        }
    }

    #[test]
    fn asl32_order3_class_has_two_fixed_points() {
        // index 4 on 8 points forces cycle type 1^2 3^2
        let g = catalog::load("ASL(3,2)").unwrap();
        let lab = Labeling::compute(g.group_classes().unwrap()).unwrap();
        let c = lab.get("3A").unwrap();
        assert_eq!(c.fix, 2);
        assert_eq!(c.index, 4);
        let pos = lab.position("3A").unwrap();
        assert_eq!(lab.rep(pos).fixed_points(), 2);
    }

    #[test]
    fn index_is_class_invariant() {
        use rand::SeedableRng;
        let g = catalog::load("ASL(3,2)").unwrap();
        let lab = Labeling::compute(g.group_classes().unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for c in &lab.classes {
            let rep = &lab.set.classes[c.class_idx].rep;
            for _ in 0..5 {
                let h = g.group.random_element(&mut rng);
                assert_eq!(rep.conj(&h).index(), c.index);
            }
        }
    }

    #[test]
    fn class_size_index_parity() {
        // sum of size*index is even: a class and its inverse share an index
        for name in ["ASL(3,2)", "AGL(2,3)", "3^2:Q8"] {
            let g = catalog::load(name).unwrap();
            let lab = Labeling::compute(g.group_classes().unwrap()).unwrap();
            let total: u128 = lab
                .classes
                .iter()
                .map(|c| c.size * c.index as u128)
                .sum();
            assert_eq!(total % 2, 0, "{name}");
        }
    }
}
