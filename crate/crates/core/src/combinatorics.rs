/// Size-`k` subsets of `0..n` as ascending index vectors, in lexicographic
/// order.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
        Some(out)
    }
}

/// Assignment vectors `owner[g] ∈ 0..n` for `m` goods in lexicographic
/// order (good 0 most significant).
pub struct Assignments {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Assignments {
    pub fn new(n: usize, m: usize) -> Self {
        Assignments {
            n,
            current: (n > 0).then(|| vec![0; m]),
        }
    }
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let mut i = next.len();
        while i > 0 {
            i -= 1;
            if next[i] + 1 < self.n {
                next[i] += 1;
                for x in &mut next[i + 1..] {
                    *x = 0;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_in_lex_order() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
        assert_eq!(Combinations::new(9, 3).count(), 84);
    }

    #[test]
    fn assignments_enumerate_all() {
        let all: Vec<_> = Assignments::new(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(Assignments::new(3, 4).count(), 81);
        assert_eq!(Assignments::new(3, 0).count(), 1);
    }
}
