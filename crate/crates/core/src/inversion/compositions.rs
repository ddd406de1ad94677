//! Weak compositions of m into n parts, in colexicographic order.

/// Iterator over all n-tuples of nonnegative integers summing to m.
///
/// Tuples come out in colexicographic order: ascending in the last component,
/// ties broken by the one before it, and so on. There are C(m+n−1, n−1) of them.
#[derive(Debug, Clone)]
pub struct Compositions {
    // the current tuple reversed, which makes colex order plain lex order
    reversed: Vec<u32>,
    done: bool,
}

impl Compositions {
    pub fn new(m: u32, n: usize) -> Self {
        assert!(n >= 1, "compositions need at least one part");
        let mut reversed = vec![0; n];
        reversed[n - 1] = m;
        Self { reversed, done: false }
    }

    fn advance(&mut self) {
        let n = self.reversed.len();
        // last nonzero entry; at index 0 (or none) this was the final tuple
        match self.reversed.iter().rposition(|&v| v > 0) {
            Some(j) if j > 0 => {
                let rest = self.reversed[j] - 1;
                self.reversed[j - 1] += 1;
                self.reversed[j] = 0;
                self.reversed[n - 1] = rest;
            }
            _ => self.done = true,
        }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out: Vec<u32> = self.reversed.iter().rev().copied().collect();
        self.advance();
        Some(out)
    }
}

/// Enumerate the compositions eagerly.
pub fn enumerate_compositions(m: u32, n: usize) -> Vec<Vec<u32>> {
    Compositions::new(m, n).collect()
}

/// Number of compositions, C(m+n−1, n−1), saturating at u64::MAX.
pub fn composition_count(m: u32, n: usize) -> u64 {
    let k = (n - 1) as u64;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(u64::from(m) + i + 1) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}
