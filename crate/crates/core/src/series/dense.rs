//! Dense complex-f64 kernel for float-mode products and substitutions.
//!
//! A [`Layout`] lists every monomial of degree `≤ max_deg` over `nvars`
//! variables in graded order, so the monomials of degree `≤ d` form the
//! prefix `0..deg_start[d + 1]`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::MultiIndex;
use crate::scalar::Scalar;

/// Below this many candidate term pairs the sparse product is cheaper.
pub(crate) const DENSE_THRESHOLD: usize = 4096;

pub(crate) struct Layout {
    pub(crate) max_deg: u32,
    pub(crate) monos: Vec<MultiIndex>,
    /// `deg_start[d]` is the index of the first monomial of degree `d`.
    pub(crate) deg_start: Vec<usize>,
    index: HashMap<MultiIndex, usize>,
    /// `table[i][j]` is the index of `monos[i]·monos[j]`, for every `j` in
    /// the prefix allowed by `max_deg`.
    table: Vec<Vec<u32>>,
}

fn monomials(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    if nvars == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=d)
        .rev()
        .flat_map(|first| {
            monomials(nvars - 1, d - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

impl Layout {
    fn build(nvars: usize, max_deg: u32) -> Layout {
        let mut monos = Vec::new();
        let mut deg_start = Vec::with_capacity(max_deg as usize + 2);
        for d in 0..=max_deg {
            deg_start.push(monos.len());
            let mut block: Vec<MultiIndex> = monomials(nvars, d).iter().map(|e| MultiIndex::new(e)).collect();
            block.sort();
            monos.extend(block);
        }
        deg_start.push(monos.len());
        let index: HashMap<MultiIndex, usize> = monos.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let table = monos
            .iter()
            .map(|a| {
                let room = max_deg - a.degree();
                monos[..deg_start[room as usize + 1]].iter().map(|b| index[&a.mul(b)] as u32).collect()
            })
            .collect();
        Layout { max_deg, monos, deg_start, index, table }
    }

    /// Shared layout for `(nvars, max_deg)`.
    pub(crate) fn get(nvars: usize, max_deg: u32) -> Arc<Layout> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<Layout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("layout cache poisoned");
        guard.entry((nvars, max_deg)).or_insert_with(|| Arc::new(Layout::build(nvars, max_deg))).clone()
    }

    pub(crate) fn len(&self, deg: u32) -> usize {
        self.deg_start[deg.min(self.max_deg) as usize + 1]
    }

    pub(crate) fn to_dense(&self, terms: &BTreeMap<MultiIndex, Scalar>, deg: u32) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.len(deg)];
        for (k, v) in terms {
            if k.degree() > deg {
                break;
            }
            out[self.index[k]] = v.to_complex64();
        }
        out
    }

    pub(crate) fn to_terms(&self, v: &[Complex64]) -> BTreeMap<MultiIndex, Scalar> {
        v.iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(i, c)| (self.monos[i], Scalar::Float(*c)))
            .collect()
    }

    /// `a·b` through degree `deg`.
    pub(crate) fn mul(&self, a: &[Complex64], b: &[Complex64], deg: u32) -> Vec<Complex64> {
        let len = self.len(deg);
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for (i, ai) in a.iter().enumerate().take(len) {
            if ai.re == 0.0 && ai.im == 0.0 {
                continue;
            }
            let room = deg - self.monos[i].degree();
            let end = self.deg_start[room as usize + 1].min(b.len());
            let row = &self.table[i];
            for j in 0..end {
                let bj = b[j];
                if bj.re != 0.0 || bj.im != 0.0 {
                    out[row[j] as usize] += ai * bj;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_counts_and_prefixes() {
        let l = Layout::get(3, 4);
        assert_eq!(l.monos.len(), 35);
        assert_eq!(l.len(1), 4);
        assert!(l.monos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn dense_product_matches_sparse() {
        let l = Layout::get(2, 5);
        let f = |re: f64, im: f64| Scalar::float(re, im);
        let a: BTreeMap<MultiIndex, Scalar> =
            [(MultiIndex::new(&[1, 0]), f(1.0, 2.0)), (MultiIndex::new(&[0, 2]), f(-0.5, 0.0))].into_iter().collect();
        let b: BTreeMap<MultiIndex, Scalar> =
            [(MultiIndex::new(&[0, 1]), f(3.0, 0.0)), (MultiIndex::new(&[2, 2]), f(0.0, 1.0))].into_iter().collect();
        let dense = l.to_terms(&l.mul(&l.to_dense(&a, 5), &l.to_dense(&b, 5), 5));
        let sparse = super::super::mul_terms(&a, &b, 5);
        assert_eq!(dense.len(), sparse.len());
        for (k, v) in &sparse {
            assert!(dense[k].approx_eq(v, 1e-15), "{k:?}");
        }
        assert!(dense.values().all(|v| !v.is_exact()));
    }

    fn terms(raw: Vec<(Vec<u32>, f64, f64)>) -> BTreeMap<MultiIndex, Scalar> {
        raw.into_iter().map(|(e, re, im)| (MultiIndex::new(&e), Scalar::float(re, im))).collect()
    }

    fn raw_terms() -> impl proptest::strategy::Strategy<Value = Vec<(Vec<u32>, f64, f64)>> {
        proptest::collection::vec((proptest::collection::vec(0u32..3, 3), -2.0..2.0f64, -2.0..2.0f64), 0..12)
    }

    proptest::proptest! {
        #[test]
        fn dense_convolution_matches_sparse_product(a in raw_terms(), b in raw_terms(), deg in 0u32..6) {
            let (a, b) = (terms(a), terms(b));
            let l = Layout::get(3, deg);
            let dense = l.to_terms(&l.mul(&l.to_dense(&a, deg), &l.to_dense(&b, deg), deg));
            let sparse = super::super::mul_terms(&a, &b, deg as i32);
            for k in dense.keys().chain(sparse.keys()) {
                let zero = Scalar::float(0.0, 0.0);
                let (x, y) = (dense.get(k).unwrap_or(&zero), sparse.get(k).unwrap_or(&zero));
                proptest::prop_assert!(x.approx_eq(y, 1e-12), "{:?}", k);
            }
        }
    }
}
