use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;

use super::dense::Layout;
use super::{check_sig, mul_terms, MultiIndex, SeriesError, Signature, TruncatedSeries};
use crate::scalar::{Mode, Scalar};

/// Reliable order given to exact coordinate functions.
pub const EXACT_ORDER: i32 = 1 << 20;

/// A full substitution `x_i ↦ images[i]` into a target signature.
///
/// Every image has zero constant term. Monomial products are shared when
/// several series are pushed through the same substitution.
#[derive(Clone, Debug)]
pub struct Substitution {
    target: Arc<Signature>,
    images: Vec<TruncatedSeries>,
    mode: Mode,
    min_valuation: i32,
}

impl Substitution {
    pub fn new(target: Arc<Signature>, images: Vec<TruncatedSeries>) -> Result<Substitution, SeriesError> {
        let mut mode = Mode::Exact;
        let mut images = images;
        for (var, img) in images.iter_mut().enumerate() {
            check_sig(&target, img.sig())?;
            let c0 = img.constant_term();
            if !c0.is_exact() || !c0.is_zero_tol(0.0) {
                if !c0.is_zero_tol(img.tol()) {
                    return Err(SeriesError::NonzeroConstant { var });
                }
                *img = img.filter(|k| k.degree() > 0);
            }
            mode = mode.join(img.mode());
        }
        let min_valuation = images.iter().map(|s| s.effective_valuation()).min().unwrap_or(1).max(1);
        Ok(Substitution { target, images, mode, min_valuation })
    }

    pub fn target(&self) -> &Arc<Signature> {
        &self.target
    }

    pub fn images(&self) -> &[TruncatedSeries] {
        &self.images
    }

    /// Reliable order of `a` after substitution.
    ///
    /// An error of image `i` beyond degree `N_i` enters through monomials of
    /// degree `≥ d_i` containing `x_i`, so it lands beyond `N_i + (d_i − 1)·v`.
    /// The unknown tail of `a` lands beyond `(N_a + 1)·v − 1`.
    fn result_order(&self, a: &TruncatedSeries) -> i32 {
        let mut min_deg = [i32::MAX; super::MAX_VARS];
        for (k, _) in a.terms() {
            for (i, d) in min_deg.iter_mut().enumerate().take(self.images.len()) {
                if k.get(i) > 0 {
                    *d = (*d).min(k.degree() as i32);
                }
            }
        }
        let v = self.min_valuation;
        let from_images = self
            .images
            .iter()
            .zip(min_deg)
            .filter(|(_, d)| *d != i32::MAX)
            .map(|(s, d)| s.order().saturating_add((d - 1).saturating_mul(v)))
            .min()
            .unwrap_or(EXACT_ORDER);
        let from_tail = (a.order().saturating_add(1)).saturating_mul(v) - 1;
        from_images.min(from_tail).min(EXACT_ORDER)
    }

    pub fn apply(&self, a: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        Ok(self.apply_all(std::slice::from_ref(a), None)?.pop().expect("one output"))
    }

    /// Substitutes into every series of `items`, optionally truncating at
    /// `degree_cap` (the result order never exceeds the cap).
    pub fn apply_all(
        &self,
        items: &[TruncatedSeries],
        degree_cap: Option<i32>,
    ) -> Result<Vec<TruncatedSeries>, SeriesError> {
        for a in items {
            if a.sig().nvars() != self.images.len() {
                return Err(SeriesError::ArityMismatch { expected: a.sig().nvars(), got: self.images.len() });
            }
        }
        let orders: Vec<i32> = items
            .iter()
            .map(|a| {
                let r = self.result_order(a);
                degree_cap.map_or(r, |cap| r.min(cap))
            })
            .collect();
        let bound = orders.iter().copied().max().unwrap_or(0);
        let float = items.iter().any(|a| !self.mode.join(a.mode()).is_exact());
        if float && bound >= 0 && orders.iter().all(|&o| o >= 0) {
            return Ok(self.apply_all_dense(items, &orders, bound as u32));
        }
        let mut cache: HashMap<MultiIndex, BTreeMap<MultiIndex, Scalar>> = HashMap::new();
        let mut out = Vec::with_capacity(items.len());
        for (a, &order) in items.iter().zip(&orders) {
            let mode = self.mode.join(a.mode());
            let mut acc: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
            for (k, coeff) in a.terms() {
                if (k.degree() as i32) * self.min_valuation > order {
                    break;
                }
                let prod = self.monomial(k, bound, &mut cache);
                for (pk, pv) in prod.iter() {
                    if pk.degree() as i32 > order {
                        break;
                    }
                    let t = coeff * pv;
                    acc.entry(*pk).or_insert_with(|| Scalar::zero(mode)).add_assign_ref(&t);
                }
            }
            out.push(TruncatedSeries::from_map(self.target.clone(), order, mode, acc));
        }
        Ok(out)
    }

    /// Float path of [`Substitution::apply_all`] over dense coefficient vectors.
    fn apply_all_dense(&self, items: &[TruncatedSeries], orders: &[i32], bound: u32) -> Vec<TruncatedSeries> {
        let layout = Layout::get(self.target.nvars(), bound);
        let images: Vec<Vec<Complex64>> = self.images.iter().map(|s| layout.to_dense(s.term_map(), bound)).collect();
        let mut cache: HashMap<MultiIndex, Vec<Complex64>> = HashMap::new();
        let mut out = Vec::with_capacity(items.len());
        for (a, &order) in items.iter().zip(orders) {
            let mode = self.mode.join(a.mode()).join(crate::scalar::Mode::float());
            let mut acc = vec![Complex64::new(0.0, 0.0); layout.len(order as u32)];
            for (k, coeff) in a.terms() {
                if (k.degree() as i32) * self.min_valuation > order {
                    break;
                }
                let c = coeff.to_complex64();
                let prod = dense_monomial(k, &layout, bound, &images, &mut cache);
                for (x, p) in acc.iter_mut().zip(prod) {
                    *x += c * p;
                }
            }
            out.push(TruncatedSeries::from_map(self.target.clone(), order, mode, layout.to_terms(&acc)));
        }
        out
    }

    /// Image of the monomial `k`, truncated at `bound`, memoized.
    fn monomial<'c>(
        &self,
        k: &MultiIndex,
        bound: i32,
        cache: &'c mut HashMap<MultiIndex, BTreeMap<MultiIndex, Scalar>>,
    ) -> &'c BTreeMap<MultiIndex, Scalar> {
        if !cache.contains_key(k) {
            let value = match k.last_var() {
                None => BTreeMap::from([(MultiIndex::ZERO, Scalar::one(self.mode))]),
                Some(v) => {
                    let parent = k.lower(v).expect("positive exponent");
                    self.monomial(&parent, bound, cache);
                    mul_terms(&cache[&parent], self.images[v].term_map(), bound)
                }
            };
            cache.insert(*k, value);
        }
        cache.get(k).expect("just inserted")
    }
}

/// Dense image of the monomial `k`, truncated at `bound`, memoized.
fn dense_monomial<'c>(
    k: &MultiIndex,
    layout: &Layout,
    bound: u32,
    images: &[Vec<Complex64>],
    cache: &'c mut HashMap<MultiIndex, Vec<Complex64>>,
) -> &'c [Complex64] {
    if !cache.contains_key(k) {
        let value = match k.last_var() {
            None => {
                let mut v = vec![Complex64::new(0.0, 0.0); layout.len(bound)];
                v[0] = Complex64::new(1.0, 0.0);
                v
            }
            Some(var) => {
                let parent = k.lower(var).expect("positive exponent");
                dense_monomial(&parent, layout, bound, images, cache);
                layout.mul(&cache[&parent], &images[var], bound)
            }
        };
        cache.insert(*k, value);
    }
    &cache[k]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_cache_matches_individual_application() {
        let sig = Signature::real(1, 1);
        let m = Mode::Exact;
        let one = Scalar::one(m);
        let img = |e: &[(&[u32], Scalar)]| TruncatedSeries::from_exponents(sig.clone(), 5, m, e);
        let sub = Substitution::new(
            sig.clone(),
            vec![
                img(&[(&[1, 0, 0], one.clone()), (&[0, 0, 1], one.clone())]),
                img(&[(&[0, 1, 0], one.clone()), (&[1, 1, 0], one.clone())]),
                img(&[(&[0, 0, 1], one.clone()), (&[2, 0, 0], one.clone())]),
            ],
        )
        .unwrap();
        let a = img(&[(&[1, 1, 0], one.clone()), (&[0, 0, 2], one.clone())]);
        let b = img(&[(&[2, 1, 1], one.clone()), (&[1, 0, 0], one.clone())]);
        let both = sub.apply_all(&[a.clone(), b.clone()], None).unwrap();
        assert_eq!(both[0], sub.apply(&a).unwrap());
        assert_eq!(both[1], sub.apply(&b).unwrap());
    }

    #[test]
    fn order_tracks_image_orders() {
        let sig = Signature::real(1, 1);
        let m = Mode::Exact;
        let a = TruncatedSeries::from_exponents(sig.clone(), 6, m, &[(&[1, 1, 0], Scalar::one(m))]);
        let z_low = TruncatedSeries::var(sig.clone(), 0, 3, m);
        let out = a.compose(&[(0, z_low)]).unwrap();
        // z + O(4) times zb lands in O(5)
        assert_eq!(out.order(), 4);
    }
}
