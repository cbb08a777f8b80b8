use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::crystal::Window;
use crate::error::{Error, Result};

/// A multiweight in `Z[1/p]^n`, stored as `num / p^exp` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TrueWeight {
    pub num: Vec<i64>,
    pub exp: u32,
}

impl TrueWeight {
    pub fn new(mut num: Vec<i64>, mut exp: u32, p: u32) -> Self {
        let p = p as i64;
        while exp > 0 && num.iter().all(|x| x % p == 0) {
            num.iter_mut().for_each(|x| *x /= p);
            exp -= 1;
        }
        TrueWeight { num, exp }
    }

    pub fn integral(w: &[i64]) -> Self {
        TrueWeight { num: w.to_vec(), exp: 0 }
    }

    pub fn is_integral(&self) -> bool {
        self.exp == 0
    }

    /// Ambient weight `u · p^k` at stage `k ≥ exp`.
    pub fn ambient(&self, k: usize, p: u32) -> Option<Vec<i64>> {
        let shift = (k as u32).checked_sub(self.exp)?;
        let f = (p as i64).checked_pow(shift)?;
        self.num.iter().map(|x| x.checked_mul(f)).collect()
    }

    pub fn times_p(&self, p: u32) -> Self {
        if self.exp > 0 {
            return TrueWeight { num: self.num.clone(), exp: self.exp - 1 };
        }
        TrueWeight { num: self.num.iter().map(|x| x * p as i64).collect(), exp: 0 }
    }

    pub fn div_p(&self, p: u32) -> Self {
        if self.num.is_empty() || self.num.iter().all(|&x| x == 0) {
            return self.clone();
        }
        Self::new(self.num.clone(), self.exp + 1, p)
    }

    pub fn add(&self, other: &Self, p: u32) -> Self {
        let e = self.exp.max(other.exp);
        let fa = (p as i64).pow(e - self.exp);
        let fb = (p as i64).pow(e - other.exp);
        Self::new(self.num.iter().zip(&other.num).map(|(a, b)| a * fa + b * fb).collect(), e, p)
    }

    pub fn in_window(&self, window: &Window, p: u32) -> bool {
        let f = (p as i64).pow(self.exp);
        self.num.iter().all(|&x| x >= window.min * f && x <= window.max * f)
    }

    /// Sum of the components as a reduced fraction `(numerator, exponent)`.
    pub fn total(&self, p: u32) -> (i64, u32) {
        let t = TrueWeight::new(vec![self.num.iter().sum()], self.exp, p);
        (t.num[0], t.exp)
    }

    /// Every weight of length `n` in the window with denominator at most `p^max_exp`.
    pub fn enumerate(window: &Window, n: usize, p: u32, max_exp: u32) -> Result<Vec<TrueWeight>> {
        let mut out = Vec::new();
        for exp in 0..=max_exp {
            let f = (p as i64)
                .checked_pow(exp)
                .and_then(|f| Some((window.min.checked_mul(f)?, window.max.checked_mul(f)?)))
                .ok_or_else(|| Error::WindowIncoherent("weight numerators overflow".into()))?;
            let count = (f.1 - f.0 + 1) as u128;
            if count.checked_pow(n as u32).is_none_or(|c| c > 2_000_000) {
                return Err(Error::WindowIncoherent(format!("too many fractional weights with denominator p^{exp}")));
            }
            let mut nums = vec![vec![]];
            for _ in 0..n {
                nums = nums.into_iter().flat_map(|v: Vec<i64>| (f.0..=f.1).map(move |x| [v.clone(), vec![x]].concat())).collect();
            }
            for num in nums {
                if exp == 0 || num.iter().any(|x| x % p as i64 != 0) {
                    out.push(TrueWeight { num, exp });
                }
            }
        }
        out.sort_by(|a, b| a.cmp_value(b, p));
        Ok(out)
    }

    /// Lexicographic comparison of the rational values, ties broken by exponent.
    pub fn cmp_value(&self, other: &Self, p: u32) -> Ordering {
        let e = self.exp.max(other.exp);
        let fa = (p as i128).pow(e - self.exp);
        let fb = (p as i128).pow(e - other.exp);
        let a: Vec<i128> = self.num.iter().map(|&x| x as i128 * fa).collect();
        let b: Vec<i128> = other.num.iter().map(|&x| x as i128 * fb).collect();
        a.cmp(&b).then(self.exp.cmp(&other.exp))
    }

    pub fn format(&self, p: u32) -> String {
        let den = (p as i64).pow(self.exp);
        let parts: Vec<String> = self.num.iter().map(|&x| if self.exp == 0 { x.to_string() } else { format!("{x}/{den}") }).collect();
        match parts.len() {
            1 => parts[0].clone(),
            _ => format!("({})", parts.join(", ")),
        }
    }
}

impl fmt::Display for TrueWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.num.iter().map(|x| x.to_string()).collect();
        write!(f, "({})/p^{}", parts.join(", "), self.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let u = TrueWeight::new(vec![6], 2, 3);
        assert_eq!(u, TrueWeight { num: vec![2], exp: 1 });
        assert_eq!(u.times_p(3), TrueWeight::integral(&[2]));
        assert_eq!(u.ambient(3, 3), Some(vec![18]));
        assert_eq!(u.ambient(0, 3), None);
        assert_eq!(u.div_p(3), TrueWeight { num: vec![2], exp: 2 });
        assert_eq!(u.add(&TrueWeight { num: vec![1], exp: 1 }, 3), TrueWeight::integral(&[1]));
        assert_eq!(u.format(3), "2/3");
    }

    #[test]
    fn enumeration() {
        let w = Window::new(0, 1).unwrap();
        let all = TrueWeight::enumerate(&w, 1, 2, 2).unwrap();
        let shown: Vec<String> = all.iter().map(|u| u.format(2)).collect();
        assert_eq!(shown, ["0", "1/4", "1/2", "3/4", "1"]);
        assert_eq!(TrueWeight::enumerate(&w, 0, 2, 3).unwrap().len(), 1);
    }
}
