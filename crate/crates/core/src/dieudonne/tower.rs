use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::saturation::Saturation;
use super::weight::TrueWeight;
use crate::error::{Error, Result};
use crate::exactalg::{solve, IntegerMatrix, Lattice, Quotient};

/// One block `(i, u)` of a tower level, presented at the common stage as
/// `L_S / N_S` with Smith generators.
#[derive(Clone, Debug)]
pub struct LevelBlock {
    pub degree: usize,
    pub weight: TrueWeight,
    /// Ambient weight `u · p^S` of the representatives.
    pub ambient: Vec<i64>,
    /// First stable stage found for this block.
    pub stable_from: usize,
    quotient: Quotient,
    support: Vec<usize>,
    divisors: Vec<BigInt>,
}

impl LevelBlock {
    fn new(degree: usize, weight: TrueWeight, ambient: Vec<i64>, stable_from: usize, quotient: Quotient) -> Self {
        let support = quotient.support();
        let divisors = support.iter().map(|&j| quotient.divisors().all()[j].clone()).collect();
        LevelBlock { degree, weight, ambient, stable_from, quotient, support, divisors }
    }

    /// Nontrivial invariant factors; coordinates of elements live modulo these.
    pub fn divisors(&self) -> &[BigInt] {
        &self.divisors
    }

    pub fn is_zero(&self) -> bool {
        self.divisors.is_empty()
    }

    pub fn order(&self) -> BigInt {
        self.divisors.iter().product()
    }

    /// Coordinates of the class of an ambient representative.
    pub fn class(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let full = self.quotient.class_of(x)?;
        Some(self.support.iter().map(|&j| full[j].clone()).collect())
    }

    /// An ambient representative of the element with the given coordinates.
    pub fn representative(&self, c: &[BigInt]) -> Vec<BigInt> {
        let mut x = vec![BigInt::zero(); self.quotient.sup().ambient()];
        for (&j, cj) in self.support.iter().zip(c) {
            if cj.is_zero() {
                continue;
            }
            for (xi, g) in x.iter_mut().zip(self.quotient.generator(j)) {
                *xi += cj * g;
            }
        }
        x
    }

    pub fn stage_lattice(&self) -> &Lattice {
        self.quotient.sup()
    }

    pub fn relation_lattice(&self) -> &Lattice {
        self.quotient.sub()
    }
}

#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub r: u32,
    pub blocks: Vec<LevelBlock>,
    index: HashMap<(usize, TrueWeight), usize>,
}

impl TowerLevel {
    pub fn get(&self, i: usize, u: &TrueWeight) -> Option<&LevelBlock> {
        self.index.get(&(i, u.clone())).map(|&k| &self.blocks[k])
    }
}

/// Where an operator lands.
#[derive(Clone, Copy, Debug)]
pub enum Slot<'a> {
    Block(&'a LevelBlock),
    /// A block known to vanish (level 0 or a degree past the top).
    Zero,
    /// Outside the computed weight set.
    Outside,
}

impl Slot<'_> {
    pub fn divisors(&self) -> &[BigInt] {
        match self {
            Slot::Block(b) => b.divisors(),
            _ => &[],
        }
    }

    pub fn len(&self) -> usize {
        self.divisors().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Operators on the tower. Each acts on one block and names its target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    /// `d`: `(r, i, u) → (r, i+1, u)`.
    D,
    /// `F`: `(r, i, u) → (r-1, i, p u)`.
    F,
    /// `V`: `(r, i, u) → (r+1, i, u/p)`.
    V,
    /// `R`: `(r, i, u) → (r-1, i, u)`.
    R,
    /// `α_F = p^i F`: `(r, i, u) → (r, i, p u)`.
    Alpha,
}

impl Op {
    pub fn target(self, r: u32, i: usize, u: &TrueWeight, p: u32) -> (u32, usize, TrueWeight) {
        match self {
            Op::D => (r, i + 1, u.clone()),
            Op::F => (r.saturating_sub(1), i, u.times_p(p)),
            Op::V => (r + 1, i, u.div_p(p)),
            Op::R => (r.saturating_sub(1), i, u.clone()),
            Op::Alpha => (r, i, u.times_p(p)),
        }
    }
}

/// The truncated tower `W_1, …, W_{r_max}` of a saturation, all levels at one stage.
#[derive(Debug)]
pub struct Tower {
    sat: Arc<Saturation>,
    r_max: u32,
    stage: usize,
    levels: Vec<TowerLevel>,
}

impl Tower {
    pub fn build(sat: Arc<Saturation>, r_max: u32) -> Result<Self> {
        Self::build_at(sat, r_max, 0)
    }

    /// Like [`build`](Self::build), with the common stage at least `at_least`
    /// (so that several towers can share one stage).
    pub fn build_at(sat: Arc<Saturation>, r_max: u32, at_least: usize) -> Result<Self> {
        if r_max == 0 {
            return Err(Error::InvalidJob("r must be at least 1".into()));
        }
        let (stage, firsts) = sat.common_stage(r_max, at_least)?;
        let p = sat.p();
        let keys: Vec<(usize, TrueWeight)> =
            sat.weights().iter().flat_map(|u| (0..=sat.max_degree()).map(move |i| (i, u.clone()))).collect();
        let mut levels = Vec::new();
        for r in 1..=r_max {
            let blocks = keys
                .par_iter()
                .map(|(i, u)| {
                    let l = sat.lattice(*i, u, stage)?;
                    let n = sat.relations(*i, u, stage, r)?;
                    let ambient = u.ambient(stage, p).expect("stage covers every denominator");
                    let first = firsts.get(&(*i, u.clone(), r)).copied().unwrap_or(stage);
                    Ok(LevelBlock::new(*i, u.clone(), ambient, first, Quotient::new(&l, &n)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let index = blocks.iter().enumerate().map(|(k, b)| ((b.degree, b.weight.clone()), k)).collect();
            levels.push(TowerLevel { r, blocks, index });
        }
        Ok(Tower { sat, r_max, stage, levels })
    }

    pub fn saturation(&self) -> &Arc<Saturation> {
        &self.sat
    }

    pub fn p(&self) -> u32 {
        self.sat.p()
    }

    pub fn r_max(&self) -> u32 {
        self.r_max
    }

    /// The common stage `S` of all presentations.
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn max_degree(&self) -> usize {
        self.sat.max_degree()
    }

    pub fn weights(&self) -> &[TrueWeight] {
        self.sat.weights()
    }

    pub fn level(&self, r: u32) -> Option<&TowerLevel> {
        self.levels.get((r as usize).checked_sub(1)?)
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    pub fn slot(&self, r: u32, i: usize, u: &TrueWeight) -> Slot<'_> {
        if r == 0 || i > self.max_degree() {
            return Slot::Zero;
        }
        if !self.sat.contains_weight(u) || r > self.r_max {
            return Slot::Outside;
        }
        match self.level(r).and_then(|l| l.get(i, u)) {
            Some(b) => Slot::Block(b),
            None => Slot::Outside,
        }
    }

    fn block(&self, r: u32, i: usize, u: &TrueWeight) -> Result<&LevelBlock> {
        match self.slot(r, i, u) {
            Slot::Block(b) => Ok(b),
            _ => Err(Error::Dimension(format!("no block at level {r}, degree {i}, weight {}", u.format(self.p())))),
        }
    }

    /// Class at level `r` of a representative living in ambient block `(i, u·p^S)`.
    pub fn class(&self, r: u32, i: usize, u: &TrueWeight, x: &[BigInt]) -> Result<Vec<BigInt>> {
        match self.slot(r, i, u) {
            Slot::Block(b) => b.class(x).ok_or_else(|| Error::ImageOutsideEta { degree: i, weight: u.format(self.p()) }),
            _ => Ok(Vec::new()),
        }
    }

    pub fn representative(&self, r: u32, i: usize, u: &TrueWeight, c: &[BigInt]) -> Result<Vec<BigInt>> {
        Ok(self.block(r, i, u)?.representative(c))
    }

    /// Applies `op` to the element with coordinates `c` in block `(r, i, u)`.
    /// `None` when the target lies outside the computed weights.
    pub fn apply(&self, op: Op, r: u32, i: usize, u: &TrueWeight, c: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        let p = self.p();
        let (tr, ti, tu) = op.target(r, i, u, p);
        let target = self.slot(tr, ti, &tu);
        let src = match self.slot(r, i, u) {
            Slot::Block(b) => b,
            Slot::Zero => return Ok(Some(vec![BigInt::zero(); target.len()])),
            Slot::Outside => return Err(Error::Dimension(format!("no block at level {r}, degree {i}, weight {}", u.format(p)))),
        };
        let tb = match target {
            Slot::Outside => return Ok(None),
            Slot::Zero => return Ok(Some(Vec::new())),
            Slot::Block(b) => b,
        };
        let x = src.representative(c);
        let w = &src.ambient;
        let y = match op {
            Op::D => self.sat.differential(i, w)?.mul_vec(&x),
            Op::F => self.sat.frobenius(i, w)?.mul_vec(&x),
            Op::Alpha => self.sat.alpha(i, w)?.mul_vec(&x),
            Op::R => x,
            Op::V => self.solve_v(i, &tu, r + 1, &x)?,
        };
        tb.class(&y).map(Some).ok_or_else(|| Error::ImageOutsideEta { degree: ti, weight: tu.format(p) })
    }

    /// `V(S, x) = (S+1, p^{i+1} x)`, pulled back to stage `S` of block `(i, u/p)`
    /// by solving `α_F y ≡ p^{i+1} x` modulo the stage-`S+1` relations.
    fn solve_v(&self, i: usize, target: &TrueWeight, r: u32, x: &[BigInt]) -> Result<Vec<BigInt>> {
        let s = self.stage;
        let p = self.p();
        let l = self.sat.lattice(i, target, s)?;
        let n = self.sat.relations(i, target, s + 1, r)?;
        let w = target.ambient(s, p).expect("stage covers every denominator");
        let alpha = self.sat.alpha(i, &w)?;
        let rhs: Vec<BigInt> = x.iter().map(|v| v * num_traits::pow(BigInt::from(p), i + 1)).collect();
        if l.rank() == 0 {
            return Ok(Vec::new());
        }
        let lhs = alpha.mul(&l.basis());
        let system = if n.rank() == 0 { lhs } else { lhs.hcat(&n.basis()) };
        let sol = solve(&system, &rhs).map_err(|_| Error::Mismatch {
            check: "V membership".into(),
            witness: format!("p^{}·x has no α_F-preimage at degree {i}, weight {}", i + 1, target.format(p)),
        })?;
        Ok(l.combination(&sol[..l.rank()]))
    }

    /// Matrix of `op` on block `(r, i, u)`: columns are images of the Smith
    /// generators. `None` when the target is outside the computed weights.
    pub fn matrix(&self, op: Op, r: u32, i: usize, u: &TrueWeight) -> Result<Option<IntegerMatrix>> {
        let p = self.p();
        let (tr, ti, tu) = op.target(r, i, u, p);
        let rows = match self.slot(tr, ti, &tu) {
            Slot::Outside => return Ok(None),
            s => s.len(),
        };
        let n = match self.slot(r, i, u) {
            Slot::Block(b) => b.divisors().len(),
            Slot::Zero => 0,
            Slot::Outside => return Ok(None),
        };
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::from(1);
            match self.apply(op, r, i, u, &e)? {
                Some(c) => cols.push(c),
                None => return Ok(None),
            }
        }
        Ok(Some(IntegerMatrix::from_columns(rows, &cols)))
    }
}
