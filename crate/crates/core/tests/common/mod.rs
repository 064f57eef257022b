//! Brute-force reference implementations used to check the library.
//! Nothing here calls the library's search code.

#![allow(dead_code)]

use rand::Rng;

/// k-APs inside `set` (sorted), as index tuples, by trying every start and
/// difference.
pub fn oracle_aps(set: &[u32], k: u32) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let Some(&max) = set.last() else {
        return out;
    };
    for (i, &a) in set.iter().enumerate() {
        for d in 1..=max {
            if u64::from(a) + u64::from(d) * u64::from(k - 1) > u64::from(max) {
                break;
            }
            let mut idx = vec![i];
            let mut ok = true;
            for j in 1..k {
                match set.binary_search(&(a + j * d)) {
                    Ok(p) => idx.push(p),
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                out.push(idx);
            }
        }
    }
    out
}

/// Calls `f` on every restricted-growth string of length `m` (each set
/// partition once) until it returns false. Returns whether it ran to the end.
pub fn for_each_partition(m: usize, mut f: impl FnMut(&[u32]) -> bool) -> bool {
    if m == 0 {
        return f(&[]);
    }
    let mut a = vec![0u32; m];
    // max_before[i] = max(a[0..i]) + 1
    loop {
        if !f(&a) {
            return false;
        }
        // Next RGS: increment the rightmost position that can grow.
        let mut i = m - 1;
        loop {
            let bound = a[..i].iter().copied().max().map_or(0, |x| x + 1);
            if i > 0 && a[i] < bound {
                a[i] += 1;
                for v in a.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
            if i <= 1 {
                return true;
            }
            i -= 1;
        }
    }
}

/// Calls `f` on every function `[m] -> [r]` until it returns false.
pub fn for_each_function(m: usize, r: u32, mut f: impl FnMut(&[u32]) -> bool) -> bool {
    let mut a = vec![0u32; m];
    loop {
        if !f(&a) {
            return false;
        }
        let mut i = 0;
        loop {
            if i == m {
                return true;
            }
            a[i] += 1;
            if a[i] < r {
                break;
            }
            a[i] = 0;
            i += 1;
        }
    }
}

pub fn is_mono(colours: &[u32], ap: &[usize]) -> bool {
    ap.iter().all(|&i| colours[i] == colours[ap[0]])
}

pub fn is_rainbow(colours: &[u32], ap: &[usize]) -> bool {
    let mut seen: Vec<u32> = ap.iter().map(|&i| colours[i]).collect();
    seen.sort_unstable();
    seen.windows(2).all(|w| w[0] != w[1])
}

/// Every colouring has a monochromatic or rainbow k-AP.
pub fn oracle_can_vdw(set: &[u32], k: u32) -> bool {
    let aps = oracle_aps(set, k);
    for_each_partition(set.len(), |c| {
        aps.iter().any(|ap| is_mono(c, ap) || is_rainbow(c, ap))
    })
}

/// Every r-colouring has a monochromatic k-AP.
pub fn oracle_r_vdw(set: &[u32], r: u32, k: u32) -> bool {
    let aps = oracle_aps(set, k);
    for_each_function(set.len(), r, |c| aps.iter().any(|ap| is_mono(c, ap)))
}

/// Every colouring whose classes have at most `num/den * |A|` elements has a
/// rainbow k-AP.
pub fn oracle_alpha_rb(set: &[u32], num: u64, den: u64, k: u32) -> bool {
    let aps = oracle_aps(set, k);
    let m = set.len();
    for_each_partition(m, |c| {
        let mut sizes = vec![0u64; m.max(1)];
        for &x in c {
            sizes[x as usize] += 1;
        }
        let bounded = sizes.iter().all(|&s| s * den <= num * m as u64);
        !bounded || aps.iter().any(|ap| is_rainbow(c, ap))
    })
}

/// Size of a largest AP-free subset and the lexicographically smallest such
/// subset (as a sorted element list).
pub fn oracle_max_free(set: &[u32], k: u32) -> (usize, Vec<u32>) {
    let aps = oracle_aps(set, k);
    let m = set.len();
    let mut best: Option<Vec<u32>> = None;
    for mask in 0u32..(1 << m) {
        let free = aps.iter().all(|ap| !ap.iter().all(|&i| mask >> i & 1 == 1));
        if !free {
            continue;
        }
        let subset: Vec<u32> = (0..m)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| set[i])
            .collect();
        best = match best {
            None => Some(subset),
            Some(b) if subset.len() > b.len() || (subset.len() == b.len() && subset < b) => {
                Some(subset)
            }
            keep => keep,
        };
    }
    let b = best.expect("the empty set is AP-free");
    (b.len(), b)
}

/// Each x in [n] kept with probability p.
pub fn random_subset(rng: &mut impl Rng, n: u32, p: f64) -> Vec<u32> {
    (1..=n).filter(|_| rng.random::<f64>() < p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_are_bell_numbers() {
        for (m, bell) in [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203)] {
            let mut count = 0;
            for_each_partition(m, |_| {
                count += 1;
                true
            });
            assert_eq!(count, bell, "m = {m}");
        }
    }
}
