/// All `k`-element subsets of `items`, in lexicographic order of positions.
pub(crate) fn subsets_of_size(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Subsets of size `0..=max`, smallest first.
pub(crate) fn subsets_up_to(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    (0..=max.min(items.len()))
        .flat_map(|k| subsets_of_size(items, k))
        .collect()
}
