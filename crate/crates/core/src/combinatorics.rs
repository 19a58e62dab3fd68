//! Permutation helpers shared by the trace and identity kernels.

/// Advances `items` to the next lexicographic permutation, treating equal
/// entries as indistinguishable. Returns `false` (leaving `items` sorted) once
/// the last permutation has been passed.
pub fn next_permutation<T: Ord>(items: &mut [T]) -> bool {
    if items.len() < 2 {
        return false;
    }
    let mut i = items.len() - 1;
    while i > 0 && items[i - 1] >= items[i] {
        i -= 1;
    }
    if i == 0 {
        items.reverse();
        return false;
    }
    let mut j = items.len() - 1;
    while items[j] <= items[i - 1] {
        j -= 1;
    }
    items.swap(i - 1, j);
    items[i..].reverse();
    true
}

/// Visits every distinct ordering of `items` (which is sorted first).
pub fn for_each_multiset_permutation<T: Ord + Clone>(items: &[T], mut visit: impl FnMut(&[T])) {
    let mut word = items.to_vec();
    word.sort();
    loop {
        visit(&word);
        if !next_permutation(&mut word) {
            break;
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_multiset_permutation(&(0..n).collect::<Vec<_>>(), |p| out.push(p.to_vec()));
    out
}

/// `true` for even permutations.
pub fn is_even(perm: &[usize]) -> bool {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}
