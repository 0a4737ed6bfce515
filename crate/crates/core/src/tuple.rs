//! Lexicographic indexing of tuples in `[0, k)^n`.
//!
//! The first coordinate is the most significant digit, so ranks follow the
//! lexicographic order of tuples.

/// Number of tuples in `[0, k)^n`, or `None` on overflow.
pub fn count(k: usize, n: usize) -> Option<usize> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total.checked_mul(k)?;
    }
    Some(total)
}

/// Same as [`count`] but saturating in `u128`, for cap diagnostics.
pub fn count_u128(k: usize, n: usize) -> u128 {
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.saturating_mul(k as u128);
    }
    total
}

pub fn rank(tuple: &[usize], k: usize) -> usize {
    tuple.iter().fold(0, |acc, &d| acc * k + d)
}

pub fn unrank(mut index: usize, k: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % k;
        index /= k;
    }
    out
}

/// Advances `tuple` to its lexicographic successor; false after the last one.
pub fn advance(tuple: &mut [usize], k: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < k {
            return true;
        }
        *slot = 0;
    }
    false
}

/// All tuples of `[0, k)^n` in lexicographic order.
pub fn all(k: usize, n: usize) -> Vec<Vec<usize>> {
    let total = count(k, n).expect("tuple space overflow");
    (0..total).map(|i| unrank(i, k, n)).collect()
}

/// All length-`m` sequences of items drawn (with repetition) from `0..base`,
/// visited lexicographically. Used for families of `m` tuples from a dom.
pub fn for_each_family<F: FnMut(&[usize])>(base: usize, m: usize, mut f: F) {
    if base == 0 && m > 0 {
        return;
    }
    let mut idx = vec![0usize; m];
    loop {
        f(&idx);
        if !advance(&mut idx, base) {
            break;
        }
    }
}
