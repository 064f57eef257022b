//! Colourings of ground sets in restricted-growth normal form.
//!
//! A colouring is stored as one colour index per element (in element order)
//! such that the first element gets colour 0 and every later element gets a
//! colour at most one larger than any colour seen before it. Each set
//! partition has exactly one such representative.

use std::collections::HashMap;
use std::hash::Hash;

use num_traits::Zero;
use serde::Serialize;

use crate::ap::{enumerate_aps, ArithmeticProgression, GroundSet};
use crate::{invalid, Error, Ratio, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colouring {
    domain: GroundSet,
    assignment: Vec<u32>,
    palette_size: u32,
}

/// How a fully coloured progression looks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum APColourClass {
    Monochromatic,
    Rainbow,
    Neither,
}

/// Counts of monochromatic, rainbow and remaining progressions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ColourCounts {
    pub mono: u64,
    pub rainbow: u64,
    pub neither: u64,
}

impl ColourCounts {
    pub fn total(&self) -> u64 {
        self.mono + self.rainbow + self.neither
    }
}

/// Relabels an arbitrary colour sequence into restricted-growth form.
pub fn normalize<T: Eq + Hash>(raw: &[T]) -> Vec<u32> {
    let mut labels: HashMap<&T, u32> = HashMap::new();
    raw.iter()
        .map(|c| {
            let next = labels.len() as u32;
            *labels.entry(c).or_insert(next)
        })
        .collect()
}

pub(crate) fn is_restricted_growth(assignment: &[u32]) -> bool {
    let mut next = 0u32;
    for &c in assignment {
        if c > next {
            return false;
        }
        if c == next {
            next += 1;
        }
    }
    true
}

impl Colouring {
    /// Normalizes `raw` (one colour per element, in element order).
    pub fn from_raw<T: Eq + Hash>(domain: GroundSet, raw: &[T]) -> Result<Self> {
        if raw.len() != domain.len() {
            return Err(invalid(format!(
                "colouring has {} entries but the domain has {} elements",
                raw.len(),
                domain.len()
            )));
        }
        let assignment = normalize(raw);
        Ok(Self::from_normalized(domain, assignment))
    }

    /// Normalizes a colour map keyed by element; every element must be present.
    pub fn from_map<T: Eq + Hash>(domain: GroundSet, map: &HashMap<u32, T>) -> Result<Self> {
        let raw = domain
            .elements()
            .iter()
            .map(|x| {
                map.get(x)
                    .ok_or_else(|| invalid(format!("element {x} is uncoloured")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_raw(domain, &raw)
    }

    /// Accepts an assignment only if it already is in restricted-growth form.
    pub fn from_rgs(domain: GroundSet, assignment: Vec<u32>) -> Result<Self> {
        if assignment.len() != domain.len() {
            return Err(invalid(format!(
                "colouring has {} entries but the domain has {} elements",
                assignment.len(),
                domain.len()
            )));
        }
        if !is_restricted_growth(&assignment) {
            return Err(invalid("colouring is not in restricted-growth form"));
        }
        Ok(Self::from_normalized(domain, assignment))
    }

    pub fn constant(domain: GroundSet) -> Self {
        let assignment = vec![0; domain.len()];
        Self::from_normalized(domain, assignment)
    }

    pub(crate) fn from_normalized(domain: GroundSet, assignment: Vec<u32>) -> Self {
        debug_assert!(is_restricted_growth(&assignment));
        let palette_size = assignment.iter().max().map_or(0, |&m| m + 1);
        Self {
            domain,
            assignment,
            palette_size,
        }
    }

    pub fn domain(&self) -> &GroundSet {
        &self.domain
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn palette_size(&self) -> u32 {
        self.palette_size
    }

    pub fn colour_of(&self, x: u32) -> Option<u32> {
        self.domain.index_of(x).map(|i| self.assignment[i])
    }

    /// Size of every colour class, indexed by colour.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.palette_size as usize];
        for &c in &self.assignment {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Elements of each colour class, indexed by colour.
    pub fn classes(&self) -> Vec<Vec<u32>> {
        let mut classes = vec![Vec::new(); self.palette_size as usize];
        for (&x, &c) in self.domain.elements().iter().zip(&self.assignment) {
            classes[c as usize].push(x);
        }
        classes
    }
}

fn check_alpha(alpha: Ratio) -> Result<()> {
    if alpha.is_zero() {
        return Err(invalid("alpha must be positive"));
    }
    Ok(())
}

/// `class_size <= alpha * total`, exactly.
pub(crate) fn within_fraction(class_size: usize, alpha: Ratio, total: usize) -> bool {
    (class_size as u128) * u128::from(*alpha.denom()) <= u128::from(*alpha.numer()) * total as u128
}

/// True iff every colour class has at most `alpha * |A|` elements.
pub fn is_alpha_bounded(chi: &Colouring, alpha: Ratio) -> Result<bool> {
    check_alpha(alpha)?;
    let total = chi.domain.len();
    Ok(chi
        .class_sizes()
        .into_iter()
        .all(|s| within_fraction(s, alpha, total)))
}

/// True iff `phi` is obtained from `chi` by merging colour classes, i.e.
/// the partition of `chi` refines that of `phi`.
pub fn is_merging(phi: &Colouring, chi: &Colouring) -> Result<bool> {
    if phi.domain != chi.domain {
        return Err(invalid("colourings are defined on different domains"));
    }
    let mut pi: Vec<Option<u32>> = vec![None; chi.palette_size as usize];
    for (&c, &f) in chi.assignment.iter().zip(&phi.assignment) {
        match pi[c as usize] {
            None => pi[c as usize] = Some(f),
            Some(g) if g != f => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

/// Greedy colour merging: while two classes both have at most
/// `alpha * |A| / 2` elements, merge the two smallest such colour indices.
///
/// The result is an alpha-bounded merging of `chi` using at most
/// `floor(4 / alpha)` colours.
pub fn merge_colours(chi: &Colouring, alpha: Ratio) -> Result<Colouring> {
    check_alpha(alpha)?;
    if alpha > Ratio::from_integer(1) {
        return Err(invalid("alpha must not exceed 1"));
    }
    if !is_alpha_bounded(chi, alpha)? {
        return Err(Error::Precondition("colouring is not alpha-bounded".into()));
    }
    let total = chi.domain.len();
    let half = alpha / Ratio::from_integer(2);
    // Classes indexed by their original colour; merged-away colours go empty.
    let mut sizes = chi.class_sizes();
    let mut alive = vec![true; sizes.len()];
    let mut target: Vec<u32> = (0..sizes.len() as u32).collect();
    loop {
        let mut small =
            (0..sizes.len()).filter(|&c| alive[c] && within_fraction(sizes[c], half, total));
        let (Some(i), Some(j)) = (small.next(), small.next()) else {
            break;
        };
        sizes[i] += sizes[j];
        sizes[j] = 0;
        alive[j] = false;
        for t in target.iter_mut() {
            if *t as usize == j {
                *t = i as u32;
            }
        }
    }
    let raw: Vec<u32> = chi.assignment.iter().map(|&c| target[c as usize]).collect();
    Ok(Colouring::from_normalized(
        chi.domain.clone(),
        normalize(&raw),
    ))
}

pub(crate) fn classify_colours(colours: &[u32]) -> APColourClass {
    let first = colours[0];
    if colours.iter().all(|&c| c == first) {
        return APColourClass::Monochromatic;
    }
    let distinct = colours
        .iter()
        .enumerate()
        .all(|(i, c)| !colours[..i].contains(c));
    if distinct {
        APColourClass::Rainbow
    } else {
        APColourClass::Neither
    }
}

pub fn classify_ap(chi: &Colouring, ap: &ArithmeticProgression) -> Result<APColourClass> {
    let colours = ap
        .elements()
        .map(|x| {
            chi.colour_of(x).ok_or_else(|| {
                invalid(format!(
                    "element {x} of {ap} is outside the colouring's domain"
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(classify_colours(&colours))
}

/// Classifies every k-AP of `set` under `chi`.
pub fn count_coloured_aps(set: &GroundSet, chi: &Colouring, k: u32) -> Result<ColourCounts> {
    let mut counts = ColourCounts::default();
    for ap in enumerate_aps(set, k)? {
        match classify_ap(chi, &ap)? {
            APColourClass::Monochromatic => counts.mono += 1,
            APColourClass::Rainbow => counts.rainbow += 1,
            APColourClass::Neither => counts.neither += 1,
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ap::count_aps_in_interval;
    use proptest::prelude::*;

    fn r(n: u64, d: u64) -> Ratio {
        Ratio::new(n, d)
    }

    fn col(assignment: &[u32]) -> Colouring {
        let n = assignment.len() as u32;
        Colouring::from_raw(GroundSet::interval(n), assignment).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&['b', 'b', 'a']), vec![0, 0, 1]);
        assert_eq!(normalize(&['a', 'b', 'c']), vec![0, 1, 2]);
        assert_eq!(normalize(&['x', 'y', 'x', 'z']), vec![0, 1, 0, 2]);
    }

    #[test]
    fn partial_assignments_are_rejected() {
        let dom = GroundSet::interval(3);
        assert!(Colouring::from_raw(dom.clone(), &[1, 2]).is_err());
        let map: HashMap<u32, u8> = [(1, 0), (3, 1)].into_iter().collect();
        assert!(Colouring::from_map(dom.clone(), &map).is_err());
        let map: HashMap<u32, u8> = [(1, 5), (2, 5), (3, 1)].into_iter().collect();
        assert_eq!(
            Colouring::from_map(dom, &map).unwrap().assignment(),
            &[0, 0, 1]
        );
    }

    #[test]
    fn rgs_ingest() {
        let dom = GroundSet::interval(3);
        assert!(Colouring::from_rgs(dom.clone(), vec![0, 0, 1]).is_ok());
        assert!(Colouring::from_rgs(dom.clone(), vec![1, 0, 0]).is_err());
        assert!(Colouring::from_rgs(dom, vec![0, 2, 1]).is_err());
    }

    #[test]
    fn boundedness() {
        assert!(is_alpha_bounded(&col(&[0, 1, 2, 3]), r(1, 4)).unwrap());
        assert!(!is_alpha_bounded(&col(&[0, 0]), r(1, 2)).unwrap());
        assert!(is_alpha_bounded(&col(&[0, 0, 1, 1, 2, 2]), r(1, 3)).unwrap());
        assert!(!is_alpha_bounded(&col(&[0, 0, 0, 1, 2, 2]), r(1, 3)).unwrap());
        assert!(is_alpha_bounded(&col(&[0]), r(0, 1)).is_err());
    }

    #[test]
    fn merging_relation() {
        let chi = col(&[0, 1, 2, 1]);
        assert!(is_merging(&col(&[0, 0, 0, 0]), &chi).unwrap());
        assert!(is_merging(&chi, &chi).unwrap());
        assert!(!is_merging(&col(&[0, 1, 0]), &col(&[0, 0, 1])).unwrap());
        assert!(is_merging(&col(&[0]), &col(&[0, 0])).is_err());
    }

    #[test]
    fn merge_is_noop_for_large_classes() {
        // Classes of size 3 and 3 with alpha = 1: both are <= 3, so they merge.
        let chi = col(&[0, 0, 0, 1, 1, 1]);
        assert_eq!(merge_colours(&chi, r(1, 1)).unwrap().palette_size(), 1);
        // One class of 5, one of 1: only one small class, nothing to do.
        let chi = col(&[0, 0, 0, 0, 0, 1]);
        assert_eq!(merge_colours(&chi, r(1, 1)).unwrap(), chi);
    }

    #[test]
    fn merge_sixteen_singletons() {
        let chi = col(&(0..16).collect::<Vec<_>>());
        let phi = merge_colours(&chi, r(1, 4)).unwrap();
        // Threshold alpha|A|/2 = 2. Colour 0 absorbs 1 (size 2, still small)
        // then 2 (size 3); colour 3 absorbs 4 and 5; and so on. Colour 15 is
        // left alone as the single small class.
        assert_eq!(phi.class_sizes(), vec![3, 3, 3, 3, 3, 1]);
        assert_eq!(phi.classes()[1], vec![4, 5, 6]);
        assert!(is_merging(&phi, &chi).unwrap());
        assert!(is_alpha_bounded(&phi, r(1, 4)).unwrap());
        assert!(phi.palette_size() <= 16);
    }

    #[test]
    fn merge_rejects_unbounded_input() {
        let chi = col(&[0, 0, 0, 1]);
        assert!(matches!(
            merge_colours(&chi, r(1, 2)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn classification() {
        let chi = col(&[0, 0, 0, 1, 2]);
        let ap = |a, d| ArithmeticProgression::new(a, d, 3).unwrap();
        assert_eq!(
            classify_ap(&chi, &ap(1, 1)).unwrap(),
            APColourClass::Monochromatic
        );
        assert_eq!(
            classify_ap(&chi, &ap(3, 1)).unwrap(),
            APColourClass::Rainbow
        );
        assert_eq!(
            classify_ap(&chi, &ap(2, 1)).unwrap(),
            APColourClass::Neither
        );
        assert!(classify_ap(&chi, &ap(4, 1)).is_err());
    }

    #[test]
    fn coloured_counts() {
        let nine = GroundSet::interval(9);
        let total = count_aps_in_interval(9, 3).unwrap();
        let c = count_coloured_aps(&nine, &Colouring::constant(nine.clone()), 3).unwrap();
        assert_eq!((c.mono, c.rainbow, c.neither), (total, 0, 0));
        let c = count_coloured_aps(&nine, &col(&(0..9).collect::<Vec<_>>()), 3).unwrap();
        assert_eq!((c.mono, c.rainbow, c.neither), (0, 16, 0));
        let c = count_coloured_aps(&GroundSet::interval(3), &col(&[0, 0, 1]), 3).unwrap();
        assert_eq!((c.mono, c.rainbow, c.neither), (0, 0, 1));
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent_and_preserves_partition(raw in prop::collection::vec(0u8..6, 0..20)) {
            let once = normalize(&raw);
            prop_assert!(is_restricted_growth(&once));
            prop_assert_eq!(normalize(&once), once.clone());
            for i in 0..raw.len() {
                for j in 0..raw.len() {
                    prop_assert_eq!(raw[i] == raw[j], once[i] == once[j]);
                }
            }
        }
    }
}
