//! Lexicographic combination ranking and factorial-number-system permutation
//! ranking. Both are exact bijections used to map index bits onto offset
//! selections and arrangements.

use super::CodecError;

/// Binomial coefficient C(n, k) in u128 (exact for the small array sizes
/// used here).
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 1..=k {
        result = result * u128::from(n - (k - i)) / u128::from(i);
    }
    result
}

/// n! in u128; callers keep n small enough that this cannot overflow
/// (n <= 33).
pub fn factorial(n: u64) -> u128 {
    (2..=u128::from(n)).product::<u128>().max(1)
}

/// floor(log2(x)) with floor_log2(0) = 0 by convention (an empty codebook
/// carries no bits).
pub fn floor_log2(x: u128) -> u32 {
    if x <= 1 {
        0
    } else {
        127 - x.leading_zeros()
    }
}

/// Rank of a sorted subset of `[0, pool)` in lexicographic order.
pub fn combination_rank(subset: &[usize], pool: usize) -> Result<u64, CodecError> {
    let k = subset.len();
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CodecError::SubsetNotSorted);
    }
    if let Some(&last) = subset.last() {
        if last >= pool {
            return Err(CodecError::ElementOutOfPool {
                element: last,
                pool,
            });
        }
    }
    let mut rank: u128 = 0;
    for (i, &c) in subset.iter().enumerate() {
        let start = if i == 0 { 0 } else { subset[i - 1] + 1 };
        for j in start..c {
            rank += binomial((pool - j - 1) as u64, (k - i - 1) as u64);
        }
    }
    Ok(rank as u64)
}

/// Inverse of [`combination_rank`]: the `rank`-th sorted `count`-subset of
/// `[0, pool)` in lexicographic order.
pub fn combination_unrank(rank: u64, pool: usize, count: usize) -> Result<Vec<usize>, CodecError> {
    let total = binomial(pool as u64, count as u64);
    if u128::from(rank) >= total {
        return Err(CodecError::RankOutOfRange {
            rank,
            space: "combination",
            size: total.min(u128::from(u64::MAX)) as u64,
        });
    }
    let mut rank = u128::from(rank);
    let mut subset = Vec::with_capacity(count);
    let mut next = 0usize;
    for i in 0..count {
        let mut c = next;
        loop {
            let below = binomial((pool - c - 1) as u64, (count - i - 1) as u64);
            if below <= rank {
                rank -= below;
                c += 1;
            } else {
                subset.push(c);
                next = c + 1;
                break;
            }
        }
    }
    Ok(subset)
}

/// Factorial-number-system rank of a permutation of `[0, len)`.
pub fn permutation_rank(perm: &[usize]) -> Result<u64, CodecError> {
    let len = perm.len();
    let mut seen = vec![false; len];
    for &x in perm {
        if x >= len || seen[x] {
            return Err(CodecError::NotAPermutation(len));
        }
        seen[x] = true;
    }
    let mut rank: u128 = 0;
    for i in 0..len {
        let smaller_later = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
        rank += smaller_later as u128 * factorial((len - 1 - i) as u64);
    }
    Ok(rank as u64)
}

/// Inverse of [`permutation_rank`].
pub fn permutation_unrank(rank: u64, len: usize) -> Result<Vec<usize>, CodecError> {
    let total = factorial(len as u64);
    if u128::from(rank) >= total {
        return Err(CodecError::RankOutOfRange {
            rank,
            space: "permutation",
            size: total.min(u128::from(u64::MAX)) as u64,
        });
    }
    let mut rank = u128::from(rank);
    let mut remaining: Vec<usize> = (0..len).collect();
    let mut perm = Vec::with_capacity(len);
    for i in 0..len {
        let base = factorial((len - 1 - i) as u64);
        let digit = (rank / base) as usize;
        rank %= base;
        perm.push(remaining.remove(digit));
    }
    Ok(perm)
}
