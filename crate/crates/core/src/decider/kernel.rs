//! Reduction of a colouring problem to its hard core.
//!
//! An element lying in at most one progression can always be coloured last
//! so that this progression is neither monochromatic nor (for the canonical
//! property) rainbow. Repeatedly peeling such elements leaves a core whose
//! connected components can be searched independently.

/// Peels elements of AP-degree at most one. Returns the core membership and
/// the peel order, each peeled element paired with the progression that was
/// still live when it was removed.
pub(crate) fn peel(len: usize, k: usize, aps: &[u32]) -> (Vec<bool>, Vec<(usize, Option<usize>)>) {
    let m = aps.len() / k;
    let mut through = vec![Vec::new(); len];
    for (id, ap) in aps.chunks_exact(k).enumerate() {
        for &x in ap {
            through[x as usize].push(id);
        }
    }
    let mut live_ap = vec![true; m];
    let mut degree: Vec<usize> = through.iter().map(Vec::len).collect();
    let mut alive = vec![true; len];
    let mut order = Vec::new();
    let mut stack: Vec<usize> = (0..len).filter(|&x| degree[x] <= 1).collect();
    while let Some(x) = stack.pop() {
        if !alive[x] || degree[x] > 1 {
            continue;
        }
        alive[x] = false;
        let witness = through[x].iter().copied().find(|&id| live_ap[id]);
        order.push((x, witness));
        if let Some(id) = witness {
            live_ap[id] = false;
            for &y in &aps[id * k..(id + 1) * k] {
                let y = y as usize;
                degree[y] -= 1;
                if alive[y] && degree[y] <= 1 {
                    stack.push(y);
                }
            }
        }
    }
    (alive, order)
}

/// Connected components of the core under the live progressions, each as an
/// increasing list of element indices. Components are ordered by their
/// smallest element.
pub(crate) fn components(alive: &[bool], k: usize, aps: &[u32]) -> Vec<Vec<usize>> {
    let len = alive.len();
    let mut parent: Vec<usize> = (0..len).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for ap in aps.chunks_exact(k) {
        if ap.iter().all(|&x| alive[x as usize]) {
            let root = find(&mut parent, ap[0] as usize);
            for &x in &ap[1..] {
                let r = find(&mut parent, x as usize);
                parent[r] = root;
            }
        }
    }
    let mut slot = vec![usize::MAX; len];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for x in (0..len).filter(|&x| alive[x]) {
        let r = find(&mut parent, x);
        if slot[r] == usize::MAX {
            slot[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[slot[r]].push(x);
    }
    comps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_of_progressions_peels_completely() {
        // {0,1,2}, {2,3,4}: elements 0,1,3,4 have degree one.
        let aps = [0, 1, 2, 2, 3, 4];
        let (alive, order) = peel(5, 3, &aps);
        assert!(alive.iter().all(|a| !a));
        assert_eq!(order.len(), 5);
    }

    #[test]
    fn dense_core_survives() {
        // All 3-APs of [5] as indices 0..5.
        let aps = [0, 1, 2, 1, 2, 3, 2, 3, 4, 0, 2, 4];
        let (alive, _) = peel(5, 3, &aps);
        // Element 0 is in {0,1,2} and {0,2,4}; nothing has degree <= 1.
        assert!(alive.iter().all(|&a| a));
        assert_eq!(components(&alive, 3, &aps), vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn components_split() {
        let aps = [0, 1, 2, 3, 4, 5];
        let alive = vec![true; 6];
        assert_eq!(
            components(&alive, 3, &aps),
            vec![vec![0, 1, 2], vec![3, 4, 5]]
        );
    }
}
