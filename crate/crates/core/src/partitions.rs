//! Integer partitions with bounded part multiplicities.

/// Calls `f(l)` for every `l = (l_1, ..., l_m)` with `sum_j j * l_j = m` and
/// `l_j <= bound(j)`. `l[j - 1]` holds the multiplicity of part `j`.
///
/// Parts whose bound is zero are skipped outright. Emission order is
/// deterministic: larger parts are fixed first, largest multiplicity first.
pub fn for_each_bounded_partition(
    m: usize,
    bound: impl Fn(usize) -> usize,
    mut f: impl FnMut(&[usize]),
) {
    let mut mult = vec![0usize; m];
    rec(m, m, &bound, &mut mult, &mut f);
}

fn rec(
    part: usize,
    remaining: usize,
    bound: &impl Fn(usize) -> usize,
    mult: &mut [usize],
    f: &mut impl FnMut(&[usize]),
) {
    if remaining == 0 {
        f(mult);
        return;
    }
    if part == 0 {
        return;
    }
    let cap = bound(part).min(remaining / part);
    for l in (0..=cap).rev() {
        mult[part - 1] = l;
        rec(part - 1, remaining - l * part, bound, mult, f);
    }
    mult[part - 1] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(m: usize, bound: impl Fn(usize) -> usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for_each_bounded_partition(m, bound, |l| out.push(l.to_vec()));
        out
    }

    #[test]
    fn unbounded_counts_match_partition_numbers() {
        let p = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for m in 1..=10 {
            assert_eq!(collect(m, |_| usize::MAX).len(), p[m], "m={m}");
        }
    }

    #[test]
    fn bounds_are_respected() {
        // partitions of 4 with at most one 1 and no 2s: {4}, {3,1}
        let got = collect(4, |j| match j {
            1 => 1,
            2 => 0,
            _ => 5,
        });
        assert_eq!(got, vec![vec![0, 0, 0, 1], vec![1, 0, 1, 0]]);
        for l in collect(6, |j| j) {
            assert_eq!(l.iter().enumerate().map(|(i, x)| (i + 1) * x).sum::<usize>(), 6);
            assert!(l.iter().enumerate().all(|(i, &x)| x <= i + 1));
        }
    }

    #[test]
    fn zero_target_yields_empty_partition_once() {
        assert_eq!(collect(0, |_| 3), vec![Vec::<usize>::new()]);
    }
}
