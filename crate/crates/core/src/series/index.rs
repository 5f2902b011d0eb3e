use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// Upper bound on the number of variables in any signature.
pub const MAX_VARS: usize = 8;

/// Ordered variable alphabet `(z_1..z_n, zbar_1..zbar_m, u_1..u_c)`.
///
/// The middle block holds antiholomorphic or complexified partners, the last
/// block real or transverse slots. Labels are for display and comparison.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    n: usize,
    m: usize,
    c: usize,
    labels: Vec<String>,
}

fn block(prefix: &str, count: usize) -> Vec<String> {
    if count == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=count).map(|k| format!("{prefix}{k}")).collect()
    }
}

impl Signature {
    /// Panics if the labels do not match `n + m + c` or exceed [`MAX_VARS`].
    pub fn new(n: usize, m: usize, c: usize, labels: Vec<String>) -> Arc<Signature> {
        assert_eq!(labels.len(), n + m + c, "label count must equal variable count");
        assert!(n + m + c <= MAX_VARS, "at most {MAX_VARS} variables");
        Arc::new(Signature { n, m, c, labels })
    }

    fn with_prefixes(n: usize, m: usize, c: usize, p: [&str; 3]) -> Arc<Signature> {
        let mut labels = block(p[0], n);
        labels.extend(block(p[1], m));
        labels.extend(block(p[2], c));
        Signature::new(n, m, c, labels)
    }

    /// Real graphing alphabet `(z, zb, u)`.
    pub fn real(n: usize, c: usize) -> Arc<Signature> {
        Signature::with_prefixes(n, n, c, ["z", "zb", "u"])
    }

    /// Complexified alphabet `(z, zl, nu)` for a complexified graphing series.
    pub fn complexified(n: usize, c: usize) -> Arc<Signature> {
        Signature::with_prefixes(n, n, c, ["z", "zl", "nu"])
    }

    /// Alphabet `(z, zl, wl)` of the solved complex graph.
    pub fn theta(n: usize, c: usize) -> Arc<Signature> {
        Signature::with_prefixes(n, n, c, ["z", "zl", "wl"])
    }

    /// Alphabet `(z, zl, w)` of the conjugate complex graph.
    pub fn theta_bar(n: usize, c: usize) -> Arc<Signature> {
        Signature::with_prefixes(n, n, c, ["z", "zl", "w"])
    }

    /// Holomorphic alphabet `(z, w)` of a biholomorphism.
    pub fn holomorphic(n: usize, c: usize) -> Arc<Signature> {
        Signature::with_prefixes(n, 0, c, ["z", "", "w"])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn nvars(&self) -> usize {
        self.n + self.m + self.c
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Same block sizes, labels ignored.
    pub fn same_shape(&self, other: &Signature) -> bool {
        self.n == other.n && self.m == other.m && self.c == other.c
    }

    /// Every `z_k` has a barred partner.
    pub fn is_paired(&self) -> bool {
        self.n == self.m
    }

    /// Index of `z_k`.
    pub fn z(&self, k: usize) -> usize {
        debug_assert!(k < self.n);
        k
    }

    /// Index of the barred partner of `z_k`.
    pub fn bar(&self, k: usize) -> usize {
        debug_assert!(k < self.m);
        self.n + k
    }

    /// Index of the transverse slot `u_l`.
    pub fn u(&self, l: usize) -> usize {
        debug_assert!(l < self.c);
        self.n + self.m + l
    }
}

/// Exponent vector with cached total degree.
///
/// Ordering is graded lexicographic: total degree first, then exponents
/// compared left to right.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    deg: u16,
    e: [u8; MAX_VARS],
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex { deg: 0, e: [0; MAX_VARS] };

    pub fn new(exps: &[u32]) -> MultiIndex {
        assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
        let mut e = [0u8; MAX_VARS];
        let mut deg = 0u16;
        for (slot, &x) in e.iter_mut().zip(exps) {
            *slot = u8::try_from(x).expect("exponent exceeds 255");
            deg += x as u16;
        }
        MultiIndex { deg, e }
    }

    /// The monomial `x_var^power`.
    pub fn unit(var: usize, power: u32) -> MultiIndex {
        let mut e = [0u32; MAX_VARS];
        e[var] = power;
        MultiIndex::new(&e)
    }

    pub fn degree(&self) -> u32 {
        self.deg as u32
    }

    pub fn get(&self, var: usize) -> u32 {
        self.e[var] as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        self.e[..nvars].iter().map(|&x| x as u32).collect()
    }

    /// Product of monomials.
    pub fn mul(&self, other: &MultiIndex) -> MultiIndex {
        let mut e = self.e;
        for (a, b) in e.iter_mut().zip(other.e.iter()) {
            *a = a.checked_add(*b).expect("exponent exceeds 255");
        }
        MultiIndex { deg: self.deg + other.deg, e }
    }

    /// Lowers the exponent of `var` by one, if positive.
    pub fn lower(&self, var: usize) -> Option<MultiIndex> {
        if self.e[var] == 0 {
            return None;
        }
        let mut e = self.e;
        e[var] -= 1;
        Some(MultiIndex { deg: self.deg - 1, e })
    }

    /// Exchanges the exponents of the variable pairs `(a_k, b_k)`.
    pub fn swap_pairs(&self, pairs: impl Iterator<Item = (usize, usize)>) -> MultiIndex {
        let mut e = self.e;
        for (a, b) in pairs {
            e.swap(a, b);
        }
        MultiIndex { deg: self.deg, e }
    }

    /// Rewrites exponents through a variable map `new[map[i]] += old[i]`.
    pub fn remap(&self, map: &[usize]) -> MultiIndex {
        let mut e = [0u8; MAX_VARS];
        for (i, &j) in map.iter().enumerate() {
            e[j] += self.e[i];
        }
        MultiIndex { deg: self.deg, e }
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        weights.iter().zip(self.e.iter()).map(|(w, &x)| w * x as u32).sum()
    }

    /// Degree in the variables `range`.
    pub fn degree_in(&self, range: std::ops::Range<usize>) -> u32 {
        self.e[range].iter().map(|&x| x as u32).sum()
    }

    /// Last variable with a positive exponent.
    pub fn last_var(&self) -> Option<usize> {
        self.e.iter().rposition(|&x| x > 0)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| self.e.cmp(&other.e))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.last_var().map_or(0, |v| v + 1);
        write!(f, "{:?}", &self.e[..last])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order_puts_degree_first() {
        let a = MultiIndex::new(&[3, 0]);
        let b = MultiIndex::new(&[0, 4]);
        let c = MultiIndex::new(&[1, 3]);
        assert!(a < b);
        assert!(b < c);
    }

    #[test]
    fn weighted_degree_matches_weight_table() {
        // z zb u2 with weights z:1, zb:1, u1:2, u2:3
        let m = MultiIndex::new(&[1, 1, 0, 1]);
        assert_eq!(m.weighted_degree(&[1, 1, 2, 3]), 5);
    }

    #[test]
    fn lower_and_mul_are_inverse() {
        let m = MultiIndex::new(&[2, 1, 0]);
        let l = m.lower(0).unwrap();
        assert_eq!(l.mul(&MultiIndex::unit(0, 1)), m);
        assert!(m.lower(2).is_none());
    }

    #[test]
    fn signature_blocks() {
        let s = Signature::real(2, 1);
        assert_eq!(s.labels(), ["z1", "z2", "zb1", "zb2", "u"]);
        assert_eq!(s.bar(1), 3);
        assert_eq!(s.u(0), 4);
        let h = Signature::holomorphic(1, 2);
        assert_eq!(h.labels(), ["z", "w1", "w2"]);
    }
}
