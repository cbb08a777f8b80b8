use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use rayon::prelude::*;

use super::source::{eta_p, GradedSource};
use super::weight::TrueWeight;
use crate::crystal::Window;
use crate::error::{Error, Result};
use crate::exactalg::{pow_big, IntegerMatrix, Lattice};

/// Engine parameters: stage cap, number of confirming isomorphisms, and the
/// largest denominator exponent of the true weights kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SaturationParams {
    pub k_max: usize,
    pub confirm: usize,
    pub max_exp: u32,
}

impl SaturationParams {
    /// Defaults for levels up to `r`: `K_max = r + 4`, two confirmations, denominators up to `p^r`.
    pub fn for_level(r: u32) -> Self {
        SaturationParams { k_max: r as usize + 4, confirm: 2, max_exp: r }
    }
}

struct Ambient {
    ranks: Vec<usize>,
    d: Vec<IntegerMatrix>,
    frob: Mutex<Option<Arc<Vec<IntegerMatrix>>>>,
    chain: Mutex<Vec<Arc<Vec<Lattice>>>>,
}

/// `Sat(M)` as the colimit of `M → η_p M → η_p² M → …` along `α_F`, with the
/// stage lattices computed lazily per ambient weight.
pub struct Saturation {
    source: Arc<dyn GradedSource>,
    p: u32,
    window: Window,
    params: SaturationParams,
    weights: Vec<TrueWeight>,
    cache: Mutex<HashMap<Vec<i64>, Arc<Ambient>>>,
}

impl std::fmt::Debug for Saturation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Saturation").field("p", &self.p).field("window", &self.window).field("params", &self.params).finish()
    }
}

impl Saturation {
    pub fn new(source: Arc<dyn GradedSource>, window: Window, params: SaturationParams) -> Result<Self> {
        let p = source.p();
        if params.confirm == 0 {
            return Err(Error::InvalidJob("the confirmation count must be at least 1".into()));
        }
        let weights = TrueWeight::enumerate(&window, source.nvars(), p, params.max_exp)?;
        Ok(Saturation { source, p, window, params, weights, cache: Mutex::new(HashMap::new()) })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn source(&self) -> &Arc<dyn GradedSource> {
        &self.source
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn params(&self) -> SaturationParams {
        self.params
    }

    pub fn max_degree(&self) -> usize {
        self.source.max_degree()
    }

    /// True weights handled by the engine, in increasing order.
    pub fn weights(&self) -> &[TrueWeight] {
        &self.weights
    }

    pub fn contains_weight(&self, u: &TrueWeight) -> bool {
        u.exp <= self.params.max_exp && u.in_window(&self.window, self.p)
    }

    fn ambient(&self, w: &[i64]) -> Result<Arc<Ambient>> {
        if let Some(a) = self.cache.lock().expect("cache lock").get(w) {
            return Ok(a.clone());
        }
        let top = self.max_degree();
        let ranks: Vec<usize> = (0..=top + 1).map(|i| if i > top { 0 } else { self.source.rank(i, w) }).collect();
        let d = (0..=top).map(|i| self.source.differential(i, w)).collect::<Result<Vec<_>>>()?;
        let base = Arc::new(ranks[..=top].iter().map(|&n| Lattice::full(n)).collect::<Vec<_>>());
        let amb = Arc::new(Ambient { ranks, d, frob: Mutex::new(None), chain: Mutex::new(vec![base]) });
        Ok(self.cache.lock().expect("cache lock").entry(w.to_vec()).or_insert(amb).clone())
    }

    pub fn rank(&self, i: usize, w: &[i64]) -> Result<usize> {
        Ok(self.ambient(w)?.ranks.get(i).copied().unwrap_or(0))
    }

    pub fn differential(&self, i: usize, w: &[i64]) -> Result<IntegerMatrix> {
        let a = self.ambient(w)?;
        Ok(a.d.get(i).cloned().unwrap_or_else(|| IntegerMatrix::zeros(0, 0)))
    }

    pub fn frobenius(&self, i: usize, w: &[i64]) -> Result<IntegerMatrix> {
        let a = self.ambient(w)?;
        let mut slot = a.frob.lock().expect("frobenius lock");
        if slot.is_none() {
            let fs = (0..=self.max_degree()).map(|k| self.source.frobenius(k, w)).collect::<Result<Vec<_>>>()?;
            *slot = Some(Arc::new(fs));
        }
        Ok(slot.as_ref().expect("filled")[i].clone())
    }

    /// `α_F = p^i F`: ambient block `(i, w)` → `(i, p·w)`.
    pub fn alpha(&self, i: usize, w: &[i64]) -> Result<IntegerMatrix> {
        Ok(self.frobenius(i, w)?.scale(&pow_big(self.p, i as u32)))
    }

    /// `η_p^k` of the full lattices at ambient weight `w`, all degrees.
    pub fn stage_lattices(&self, w: &[i64], k: usize) -> Result<Arc<Vec<Lattice>>> {
        let a = self.ambient(w)?;
        let mut chain = a.chain.lock().expect("chain lock");
        while chain.len() <= k {
            let next = eta_p(self.p, chain.last().expect("nonempty"), &a.d);
            chain.push(Arc::new(next));
        }
        Ok(chain[k].clone())
    }

    fn ambient_at(&self, u: &TrueWeight, k: usize) -> Result<Vec<i64>> {
        u.ambient(k, self.p).ok_or_else(|| Error::WindowIncoherent(format!("weight {} has no integral ambient at stage {k}", u.format(self.p))))
    }

    /// Stage-`k` lattice `L_k` of block `(i, u)`, inside ambient weight `u·p^k`.
    pub fn lattice(&self, i: usize, u: &TrueWeight, k: usize) -> Result<Lattice> {
        let w = self.ambient_at(u, k)?;
        Ok(self.stage_lattices(&w, k)?.get(i).cloned().unwrap_or_else(|| Lattice::zero(0)))
    }

    /// Lattice chain `L_{exp}, …, L_{up_to}` of block `(i, u)`.
    pub fn chain(&self, i: usize, u: &TrueWeight, up_to: usize) -> Result<Vec<Lattice>> {
        (u.exp as usize..=up_to).map(|k| self.lattice(i, u, k)).collect()
    }

    /// `V^r Sat + dV^r Sat` at stage `k`:
    /// `p^{r(i+1)} L_{k-r}^i + p^{ri} d(L_{k-r}^{i-1})`, all at ambient `u·p^k`.
    pub fn relations(&self, i: usize, u: &TrueWeight, k: usize, r: u32) -> Result<Lattice> {
        let r = r as usize;
        let w = self.ambient_at(u, k)?;
        let n = self.rank(i, &w)?;
        if k < r {
            return Err(Error::InvalidJob(format!("stage {k} is below level {r}")));
        }
        let base = self.stage_lattices(&w, k - r)?;
        let p = BigInt::from(self.p);
        let mut rel = base.get(i).map(|l| l.scale(&num_traits::pow(p.clone(), r * (i + 1)))).unwrap_or_else(|| Lattice::zero(n));
        if i >= 1 && n > 0 {
            let d = self.differential(i - 1, &w)?;
            if d.cols() > 0 {
                let img = base[i - 1].image(&d).scale(&num_traits::pow(p, r * i));
                rel = rel.sum(&img);
            }
        }
        Ok(rel)
    }

    /// Whether `α_F: L_k/N_k → L_{k+1}/N_{k+1}` is an isomorphism at level `r`.
    pub fn transition_is_iso(&self, i: usize, u: &TrueWeight, k: usize, r: u32) -> Result<bool> {
        let w = self.ambient_at(u, k)?;
        let (l0, n0) = (self.lattice(i, u, k)?, self.relations(i, u, k, r)?);
        let (l1, n1) = (self.lattice(i, u, k + 1)?, self.relations(i, u, k + 1, r)?);
        if l0.ambient() == 0 && l1.ambient() == 0 {
            return Ok(true);
        }
        let alpha = self.alpha(i, &w)?;
        let img = l0.image(&alpha);
        if !l1.contains_lattice(&img) {
            return Err(Error::ImageOutsideEta { degree: i, weight: u.format(self.p) });
        }
        if !n1.contains_lattice(&n0.image(&alpha)) {
            return Err(Error::NotDieudonne(format!("α_F does not preserve V^r + dV^r at degree {i}, weight {}", u.format(self.p))));
        }
        let order = |l: &Lattice, n: &Lattice| -> Option<(BigInt, BigInt)> { Some((n.determinant()?, l.determinant()?)) };
        let (Some((dn0, dl0)), Some((dn1, dl1))) = (order(&l0, &n0), order(&l1, &n1)) else {
            return Ok(false);
        };
        Ok(&dn0 * &dl1 == &dn1 * &dl0 && img.sum(&n1) == l1)
    }

    /// First stage from which `confirm` consecutive transitions are isomorphisms.
    pub fn first_stable(&self, i: usize, u: &TrueWeight, r: u32) -> Result<usize> {
        let k_max = self.params.k_max;
        let mut start = (u.exp as usize).max(r as usize);
        let mut streak = 0;
        let mut k = start;
        while k < k_max {
            if self.transition_is_iso(i, u, k, r)? {
                streak += 1;
                if streak == self.params.confirm {
                    return Ok(start);
                }
            } else {
                streak = 0;
                start = k + 1;
            }
            k += 1;
        }
        Err(Error::NotStabilized { degree: i, weight: u.format(self.p), k_max })
    }

    /// One stage `S` at which every block of every level `1..=r_max` is stable,
    /// including the step `S → S+1` needed by `V`, together with each block's
    /// first stable stage.
    pub fn common_stage(&self, r_max: u32, at_least: usize) -> Result<(usize, HashMap<(usize, TrueWeight, u32), usize>)> {
        let blocks: Vec<(usize, &TrueWeight, u32)> = (1..=r_max)
            .flat_map(|r| self.weights.iter().flat_map(move |u| (0..=self.max_degree()).map(move |i| (i, u, r))))
            .collect();
        let firsts = blocks.par_iter().map(|&(i, u, r)| self.first_stable(i, u, r)).collect::<Result<Vec<_>>>()?;
        let mut s = firsts.iter().copied().max().unwrap_or(r_max as usize).max(at_least);
        loop {
            if s + 1 > self.params.k_max {
                let (i, u, _) = blocks[0];
                return Err(Error::NotStabilized { degree: i, weight: u.format(self.p), k_max: self.params.k_max });
            }
            let bad = blocks
                .par_iter()
                .zip(&firsts)
                .filter(|(_, &k)| k < s)
                .map(|(&(i, u, r), _)| Ok::<_, Error>((self.transition_is_iso(i, u, s, r)?, i, u)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .find(|(ok, _, _)| !ok);
            match bad {
                None => {
                    let firsts = blocks.iter().zip(firsts).map(|(&(i, u, r), k)| ((i, u.clone(), r), k)).collect();
                    return Ok((s, firsts));
                }
                Some((_, i, u)) if s + 2 > self.params.k_max => {
                    return Err(Error::NotStabilized { degree: i, weight: u.format(self.p), k_max: self.params.k_max })
                }
                Some(_) => s += 1,
            }
        }
    }
}
