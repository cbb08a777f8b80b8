use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{pow_big, LaurentPolynomial, Monomial, Ring, Variable};

const CACHE_MAGIC: &str = "drw-witt-laws 1";

/// A polynomial with integer coefficients in `X_0..X_{r-1}, Y_0..Y_{r-1}`,
/// stored as a lexicographically sorted term list for fast evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawPolynomial {
    nvars: usize,
    terms: Vec<(Vec<u32>, BigInt)>,
}

impl LawPolynomial {
    fn from_poly(f: &LaurentPolynomial) -> Self {
        let mut terms: Vec<(Vec<u32>, BigInt)> =
            f.terms().map(|(m, c)| (m.0.iter().map(|&e| e as u32).collect(), c.clone())).collect();
        terms.sort();
        LawPolynomial { nvars: f.ring().nvars(), terms }
    }

    pub fn terms(&self) -> &[(Vec<u32>, BigInt)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Evaluates at `values` (one per variable), all in the same ring.
    /// Terms whose coefficient vanishes in the target ring are skipped.
    pub fn eval(&self, values: &[LaurentPolynomial]) -> LaurentPolynomial {
        assert_eq!(values.len(), self.nvars, "one value per law variable");
        let ring = values[0].ring().clone();
        let terms: Vec<(&[u32], BigInt)> = self
            .terms
            .iter()
            .filter_map(|(e, c)| {
                let c = ring.normalize(c.clone());
                (!c.is_zero()).then_some((e.as_slice(), c))
            })
            .collect();
        let mut powers: Vec<Vec<LaurentPolynomial>> = values.iter().map(|v| vec![LaurentPolynomial::one(&ring), v.clone()]).collect();
        eval_trie(&terms, 0, values, &mut powers, &ring)
    }
}

// Horner scheme over the variables in order: group by the exponent of variable k.
fn eval_trie(
    terms: &[(&[u32], BigInt)],
    k: usize,
    values: &[LaurentPolynomial],
    powers: &mut [Vec<LaurentPolynomial>],
    ring: &Arc<Ring>,
) -> LaurentPolynomial {
    if terms.is_empty() {
        return LaurentPolynomial::zero(ring);
    }
    if k == values.len() {
        let c = terms.iter().fold(BigInt::zero(), |acc, (_, c)| acc + c);
        return LaurentPolynomial::constant(ring, c);
    }
    let mut out = LaurentPolynomial::zero(ring);
    let mut start = 0;
    while start < terms.len() {
        let e = terms[start].0[k] as usize;
        let mut end = start;
        while end < terms.len() && terms[end].0[k] as usize == e {
            end += 1;
        }
        let inner = eval_trie(&terms[start..end], k + 1, values, powers, ring);
        if !inner.is_zero() {
            while powers[k].len() <= e {
                let next = &powers[k][powers[k].len() - 1] * &values[k];
                powers[k].push(next);
            }
            out.add_assign(&(&inner * &powers[k][e]));
        }
        start = end;
    }
    out
}

/// Sum and product polynomials of p-typical Witt vectors of length `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalWittLaws {
    p: u32,
    r: usize,
    sum: Vec<LawPolynomial>,
    product: Vec<LawPolynomial>,
}

impl UniversalWittLaws {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn sum(&self, n: usize) -> &LawPolynomial {
        &self.sum[n]
    }

    pub fn product(&self, n: usize) -> &LawPolynomial {
        &self.product[n]
    }

    /// The `S_n`, `P_n` as polynomials in `X_0..X_{r-1}, Y_0..Y_{r-1}` over `Z`.
    pub fn as_polynomials(&self) -> (Vec<LaurentPolynomial>, Vec<LaurentPolynomial>) {
        let ring = law_ring(self.r);
        let conv = |l: &LawPolynomial| {
            let mut f = LaurentPolynomial::zero(&ring);
            for (e, c) in &l.terms {
                f.add_term(Monomial(e.iter().map(|&x| x as i64).collect()), c.clone());
            }
            f
        };
        (self.sum.iter().map(conv).collect(), self.product.iter().map(conv).collect())
    }

    /// Generates the laws from the ghost recursion over `Z`.
    pub fn generate(p: u32, r: usize) -> Self {
        assert!(r >= 1, "Witt length must be positive");
        let ring = law_ring(r);
        let x: Vec<LaurentPolynomial> = (0..r).map(|i| LaurentPolynomial::var(&ring, i)).collect();
        let y: Vec<LaurentPolynomial> = (0..r).map(|i| LaurentPolynomial::var(&ring, r + i)).collect();
        let gx = ghost_polys(p, &x);
        let gy = ghost_polys(p, &y);
        let sum = solve_recursion(p, r, |n| &gx[n] + &gy[n]);
        let product = solve_recursion(p, r, |n| &gx[n] * &gy[n]);
        UniversalWittLaws {
            p,
            r,
            sum: sum.iter().map(LawPolynomial::from_poly).collect(),
            product: product.iter().map(LawPolynomial::from_poly).collect(),
        }
    }

    /// Checks the ghost identities at an integer point.
    fn spot_check(&self) -> bool {
        let ring = Ring::integers(vec![]);
        let vals: Vec<LaurentPolynomial> =
            (0..2 * self.r).map(|i| LaurentPolynomial::constant(&ring, BigInt::from(2 + (i as i64 * 7) % 5 - (i as i64 % 3)))).collect();
        let (xv, yv) = vals.split_at(self.r);
        let s: Vec<_> = self.sum.iter().map(|l| l.eval(&vals)).collect();
        let m: Vec<_> = self.product.iter().map(|l| l.eval(&vals)).collect();
        let (gx, gy, gs, gm) = (ghost_polys(self.p, xv), ghost_polys(self.p, yv), ghost_polys(self.p, &s), ghost_polys(self.p, &m));
        (0..self.r).all(|n| gs[n] == &gx[n] + &gy[n] && gm[n] == &gx[n] * &gy[n])
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{CACHE_MAGIC}\n{} {}\n", self.p, self.r);
        for (tag, polys) in [("S", &self.sum), ("P", &self.product)] {
            for (n, l) in polys.iter().enumerate() {
                writeln!(out, "{tag} {n} {}", l.terms.len()).unwrap();
                for (e, c) in &l.terms {
                    write!(out, "{c}").unwrap();
                    for x in e {
                        write!(out, " {x}").unwrap();
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    /// Parses the cache format; the result is verified against the ghost
    /// identities at a test point before being accepted.
    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Parse { pos: line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate();
        let mut next = |what: &str| lines.next().ok_or_else(|| bad(0, &format!("truncated before {what}")));
        let (_, magic) = next("header")?;
        if magic != CACHE_MAGIC {
            return Err(bad(0, "unknown cache format"));
        }
        let (ln, pr) = next("parameters")?;
        let nums: Vec<u64> = pr.split_whitespace().map(|t| t.parse().map_err(|_| bad(ln, "bad integer"))).collect::<Result<_>>()?;
        let [p, r] = nums[..] else { return Err(bad(ln, "expected p and r")) };
        let small = p < 1 << 16 && r >= 1 && r <= 16 && (p as u128).checked_pow(r as u32 - 1).is_some_and(|b| b <= 1 << 12);
        if !small || !crate::exactalg::is_prime(p as u32) {
            return Err(bad(ln, "parameters out of range"));
        }
        let (p, r) = (p as u32, r as usize);
        let mut sum = Vec::new();
        let mut product = Vec::new();
        for (tag, out) in [("S", &mut sum), ("P", &mut product)] {
            for n in 0..r {
                let (ln, head) = next("polynomial header")?;
                let parts: Vec<&str> = head.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != tag || parts[1] != n.to_string() {
                    return Err(bad(ln, "unexpected polynomial header"));
                }
                let count: usize = parts[2].parse().map_err(|_| bad(ln, "bad term count"))?;
                if count > 10_000_000 {
                    return Err(bad(ln, "term count too large"));
                }
                let mut terms = Vec::with_capacity(count.min(4096));
                for _ in 0..count {
                    let (ln, t) = next("term")?;
                    let mut it = t.split_whitespace();
                    let c: BigInt = it.next().ok_or_else(|| bad(ln, "empty term"))?.parse().map_err(|_| bad(ln, "bad coefficient"))?;
                    let e: Vec<u32> = it.map(|x| x.parse().map_err(|_| bad(ln, "bad exponent"))).collect::<Result<_>>()?;
                    if e.len() != 2 * r || c.is_zero() {
                        return Err(bad(ln, "malformed term"));
                    }
                    let weight: u128 = e.iter().enumerate().map(|(i, &x)| x as u128 * (p as u128).pow((i % r) as u32)).sum();
                    if weight > 2 * (p as u128).pow(n as u32) {
                        return Err(bad(ln, "term of impossible weight"));
                    }
                    terms.push((e, c));
                }
                terms.sort();
                if terms.windows(2).any(|w| w[0].0 == w[1].0) {
                    return Err(bad(0, "repeated monomial"));
                }
                out.push(LawPolynomial { nvars: 2 * r, terms });
            }
        }
        let laws = UniversalWittLaws { p, r, sum, product };
        if !laws.spot_check() {
            return Err(bad(0, "cached laws fail the ghost identities"));
        }
        Ok(laws)
    }
}

fn law_ring(r: usize) -> Arc<Ring> {
    let names = (0..r).map(|i| format!("X{i}")).chain((0..r).map(|i| format!("Y{i}")));
    Ring::integers(names.map(|n| Variable::polynomial(&n)).collect())
}

/// `w_n = Σ_{i≤n} p^i x_i^{p^{n-i}}` for `n < len(x)`.
pub(crate) fn ghost_polys(p: u32, x: &[LaurentPolynomial]) -> Vec<LaurentPolynomial> {
    let r = x.len();
    // powers[i] = x_i^{p^{n-i}}, updated in place as n grows
    let mut powers: Vec<LaurentPolynomial> = x.to_vec();
    let mut out = Vec::with_capacity(r);
    for n in 0..r {
        if n > 0 {
            for pw in powers.iter_mut().take(n) {
                *pw = pw.pow(p as u64);
            }
        }
        let mut w = LaurentPolynomial::zero(x[0].ring());
        for (i, pw) in powers.iter().enumerate().take(n + 1) {
            w = &w + &pw.scale(&pow_big(p, i as u32));
        }
        out.push(w);
    }
    out
}

/// Solves `Σ_{i≤n} p^i a_i^{p^{n-i}} = target(n)` for `a_0, …, a_{r-1}` by exact division.
fn solve_recursion(p: u32, r: usize, target: impl Fn(usize) -> LaurentPolynomial) -> Vec<LaurentPolynomial> {
    let mut a: Vec<LaurentPolynomial> = Vec::with_capacity(r);
    // pw[i] = a_i^{p^{n-i}}
    let mut pw: Vec<LaurentPolynomial> = Vec::with_capacity(r);
    for n in 0..r {
        for q in pw.iter_mut() {
            *q = q.pow(p as u64);
        }
        let mut rest = target(n);
        for (i, q) in pw.iter().enumerate() {
            rest = &rest - &q.scale(&pow_big(p, i as u32));
        }
        let an = rest.exact_div_p(p, n as u32).expect("universal Witt laws have integral coefficients");
        pw.push(an.clone());
        a.push(an);
    }
    a
}

type LawKey = (u32, usize);

fn memory_cache() -> &'static Mutex<HashMap<LawKey, Arc<UniversalWittLaws>>> {
    static CACHE: OnceLock<Mutex<HashMap<LawKey, Arc<UniversalWittLaws>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Directory for cached law files: `$DRW_CACHE_DIR` if set (empty disables
/// the disk cache), else a directory under the system temp dir.
pub fn cache_dir() -> Option<PathBuf> {
    match std::env::var_os("DRW_CACHE_DIR") {
        Some(d) if d.is_empty() => None,
        Some(d) => Some(PathBuf::from(d)),
        None => Some(std::env::temp_dir().join("drw-cache")),
    }
}

fn cache_file(dir: &Path, p: u32, r: usize) -> PathBuf {
    dir.join(format!("witt-laws-p{p}-r{r}.txt"))
}

fn load_from_disk(p: u32, r: usize) -> Option<UniversalWittLaws> {
    let text = std::fs::read_to_string(cache_file(&cache_dir()?, p, r)).ok()?;
    UniversalWittLaws::from_text(&text).ok().filter(|l| l.p == p && l.r == r)
}

fn store_to_disk(laws: &UniversalWittLaws) {
    let Some(dir) = cache_dir() else { return };
    if std::fs::create_dir_all(&dir).is_err() {
        return;
    }
    let target = cache_file(&dir, laws.p, laws.r);
    let tmp = dir.join(format!(
        ".witt-laws-p{}-r{}.{}.{:?}.tmp",
        laws.p,
        laws.r,
        std::process::id(),
        std::thread::current().id()
    ));
    // best effort: a failed write only costs regeneration next time
    if std::fs::write(&tmp, laws.to_text()).is_ok() && std::fs::rename(&tmp, &target).is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
}

/// Memoized universal laws for `(p, r)`, backed by an on-disk cache.
pub fn universal_laws(p: u32, r: usize) -> Arc<UniversalWittLaws> {
    if let Some(l) = memory_cache().lock().unwrap().get(&(p, r)) {
        return l.clone();
    }
    // generation happens outside the lock; concurrent fills produce equal values
    let laws = match load_from_disk(p, r) {
        Some(l) => l,
        None => {
            let l = UniversalWittLaws::generate(p, r);
            store_to_disk(&l);
            l
        }
    };
    memory_cache().lock().unwrap().entry((p, r)).or_insert_with(|| Arc::new(laws)).clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_laws() {
        for p in [2, 3, 5] {
            let (s, m) = universal_laws(p, 1).as_polynomials();
            let ring = s[0].ring().clone();
            let x0 = LaurentPolynomial::var(&ring, 0);
            let y0 = LaurentPolynomial::var(&ring, 1);
            assert_eq!(s[0], &x0 + &y0);
            assert_eq!(m[0], &x0 * &y0);
        }
        let (s, _) = UniversalWittLaws::generate(2, 2).as_polynomials();
        let ring = s[0].ring().clone();
        let v = |i| LaurentPolynomial::var(&ring, i);
        assert_eq!(s[1], &(&v(1) + &v(3)) - &(&v(0) * &v(2)));
        let (s, _) = UniversalWittLaws::generate(3, 2).as_polynomials();
        let expected = &(&(&v(1) + &v(3)) - &(&v(0).pow(2) * &v(2))) - &(&v(0) * &v(2).pow(2));
        assert_eq!(s[1], expected);
    }

    #[test]
    fn text_round_trip_and_rejection() {
        let laws = UniversalWittLaws::generate(3, 2);
        let text = laws.to_text();
        assert_eq!(UniversalWittLaws::from_text(&text).unwrap(), laws);
        let corrupted = text.replacen("\n1 1 0 0 0\n", "\n2 1 0 0 0\n", 1);
        assert_ne!(corrupted, text);
        assert!(UniversalWittLaws::from_text(&corrupted).is_err());
        assert!(UniversalWittLaws::from_text("garbage").is_err());
        assert!(UniversalWittLaws::from_text("").is_err());
    }
}
