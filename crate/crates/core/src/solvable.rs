//! Exact arithmetic for two lattices.
//!
//! The first is the non-uniform lattice in the metabelian group
//! `G = (prod F*_{p_n}) x| (sum F_{p_n})` with `(a, b)(a', b') = (aa', ab' + b)`
//! coordinatewise, where `Gamma` is the set of finitely supported sequences
//! `(a_n, a_n - 1)`. The infinite product of the compact part is modelled by
//! truncation at level `M` (first `M` primes). Haar measure gives the compact
//! part measure 1, so in the truncation a set of `N` elements has measure
//! `N / prod_{n <= M} (p_n - 1)`.
//!
//! The second is the integral Heisenberg lattice in upper unipotent 3x3
//! matrices.
//!
//! Everything here is exact: machine-word modular arithmetic and big
//! rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{LabError, Result};

/// Cap on the number of elements enumerated in a truncated group; above it
/// indices come from the order formula instead of coset counting.
pub const MODEL_CAP: usize = 4_000_000;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The first `k` primes.
pub fn first_primes(k: usize) -> Vec<u64> {
    (2u64..).filter(|&n| is_prime(n)).take(k).collect()
}

/// `5, 11, 23, 47, 97, ...`: each term is the least prime at least twice the
/// previous one plus one.
pub fn doubling_primes(k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut p = 5u64;
    while out.len() < k {
        out.push(p);
        p = (2 * p + 1..).find(|&n| is_prime(n)).expect("primes are unbounded");
    }
    out
}

fn check_primes(primes: &[u64]) -> Result<()> {
    for (i, &p) in primes.iter().enumerate() {
        if !is_prime(p) {
            return Err(LabError::CompositeModulus(p));
        }
        if primes[..i].contains(&p) {
            return Err(LabError::pre(format!("prime {p} repeated")));
        }
    }
    Ok(())
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2)
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Element of the truncated group: multiplicative part `a` of length `M`,
/// additive part `b` supported on the first `m <= M` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AffineElement {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

impl AffineElement {
    pub fn identity(big_m: usize, m: usize) -> Self {
        Self { a: vec![1; big_m], b: vec![0; m] }
    }

    /// `(a, b)(a', b') = (aa', ab' + b)`.
    pub fn mul(&self, other: &Self, primes: &[u64]) -> Self {
        let a = self.a.iter().zip(&other.a).zip(primes).map(|((x, y), p)| x * y % p).collect();
        let b =
            self.b.iter().zip(&other.b).zip(&self.a).zip(primes).map(|(((b, b2), a), p)| (a * b2 + b) % p).collect();
        Self { a, b }
    }

    /// `(a, b)^-1 = (a^-1, -a^-1 b)`.
    pub fn inverse(&self, primes: &[u64]) -> Self {
        let a: Vec<u64> = self.a.iter().zip(primes).map(|(&x, &p)| inv_mod(x, p)).collect();
        let b = self.b.iter().zip(&a).zip(primes).map(|((&b, &ai), &p)| (p - ai * b % p) % p).collect();
        Self { a, b }
    }
}

/// The element `((a_n), (a_n - 1))` of `Gamma`, truncated to `M` coordinates
/// with additive part of length `m`.
pub fn gamma_element(a: &[u64], primes: &[u64], big_m: usize, m: usize) -> AffineElement {
    let mut full = vec![1u64; big_m];
    full[..a.len()].copy_from_slice(a);
    let b = (0..m).map(|n| (full[n] + primes[n] - 1) % primes[n]).collect();
    AffineElement { a: full, b }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport {
    pub prime: u64,
    pub exhaustive: bool,
    pub pairs_checked: usize,
    pub closed: bool,
    pub inverses: bool,
}

/// Checks that `{embed(a) : a in F*_p}` is closed under the affine product and
/// under inverses, exhaustively for `p <= 13` and on `samples` random pairs
/// above. `embed` maps `(a, p)` to the pair `(a, b)`.
pub fn closure_check_with(
    primes: &[u64],
    samples: usize,
    seed: u64,
    embed: impl Fn(u64, u64) -> (u64, u64),
) -> Result<Vec<ClosureReport>> {
    check_primes(primes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &p in primes {
        let member = |x: u64, y: u64| -> bool {
            let (a, b) = embed(x, p);
            (a, b) == (x % p, y % p)
        };
        let pair = |a: u64| {
            let (x, y) = embed(a, p);
            AffineElement { a: vec![x], b: vec![y] }
        };
        let exhaustive = p <= 13;
        let pairs: Vec<(u64, u64)> = if exhaustive {
            (1..p).flat_map(|a| (1..p).map(move |c| (a, c))).collect()
        } else {
            (0..samples).map(|_| (rng.gen_range(1..p), rng.gen_range(1..p))).collect()
        };
        let ps = [p];
        let closed = pairs.iter().all(|&(x, y)| {
            let g = pair(x).mul(&pair(y), &ps);
            member(g.a[0], g.b[0])
        });
        let inverses = pairs.iter().all(|&(x, _)| {
            let g = pair(x).inverse(&ps);
            member(g.a[0], g.b[0])
        });
        out.push(ClosureReport { prime: p, exhaustive, pairs_checked: pairs.len(), closed, inverses });
    }
    Ok(out)
}

/// `{(a, a - 1)}` is a subgroup of `F*_p x| F_p` for every listed prime, with
/// identity `(1, 0)`.
pub fn gamma_closure_check(primes: &[u64], samples: usize, seed: u64) -> Result<bool> {
    let reports = closure_check_with(primes, samples, seed, |a, p| (a % p, (a + p - 1) % p))?;
    Ok(reports.iter().all(|r| r.closed && r.inverses))
}

/// Finite truncation at level `M` with additive part on the first `m`
/// coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct TruncatedModel {
    primes: Vec<u64>,
    big_m: usize,
}

impl TruncatedModel {
    pub fn new(primes: &[u64], big_m: usize) -> Result<Self> {
        check_primes(primes)?;
        if big_m > primes.len() {
            return Err(LabError::pre(format!("truncation level {big_m} exceeds the {} primes", primes.len())));
        }
        Ok(Self { primes: primes[..big_m].to_vec(), big_m })
    }

    fn check_level(&self, m: usize) -> Result<()> {
        if m > self.big_m {
            return Err(LabError::pre(format!("level {m} exceeds the truncation level {}", self.big_m)));
        }
        Ok(())
    }

    /// `|G_m| = prod_{n <= M} (p_n - 1) prod_{n <= m} p_n`.
    pub fn order_g(&self, m: usize) -> u128 {
        self.compact_order() * self.primes[..m].iter().map(|&p| p as u128).product::<u128>()
    }

    /// `|Gamma_m| = prod_{n <= m} (p_n - 1)`.
    pub fn order_gamma(&self, m: usize) -> u128 {
        self.primes[..m].iter().map(|&p| (p - 1) as u128).product()
    }

    /// Order of the truncated compact part, which carries measure 1.
    pub fn compact_order(&self) -> u128 {
        self.primes.iter().map(|&p| (p - 1) as u128).product()
    }

    fn g_radices(&self, m: usize) -> Vec<u64> {
        self.primes.iter().map(|p| p - 1).chain(self.primes[..m].iter().copied()).collect()
    }

    fn g_decode(&self, m: usize, mut idx: usize) -> AffineElement {
        let mut e = AffineElement::identity(self.big_m, m);
        for (n, &p) in self.primes.iter().enumerate() {
            e.a[n] = (idx % (p as usize - 1)) as u64 + 1;
            idx /= p as usize - 1;
        }
        for (n, &p) in self.primes[..m].iter().enumerate() {
            e.b[n] = (idx % p as usize) as u64;
            idx /= p as usize;
        }
        e
    }

    fn g_encode(&self, e: &AffineElement) -> usize {
        let radices = self.g_radices(e.b.len());
        let digits = e.a.iter().map(|a| a - 1).chain(e.b.iter().copied());
        let mut idx = 0usize;
        let mut scale = 1usize;
        for (d, r) in digits.zip(radices) {
            idx += d as usize * scale;
            scale *= r as usize;
        }
        idx
    }

    /// Elements of `G_m` (within the level-`m` ambient group).
    fn g_elements(&self, m: usize, ambient: usize) -> Vec<AffineElement> {
        let sub = self.order_g(m) as usize;
        (0..sub)
            .map(|i| {
                let mut e = self.g_decode(m, i);
                e.b.resize(ambient, 0);
                e
            })
            .collect()
    }

    fn gamma_elements(&self, m: usize, ambient: usize) -> Vec<AffineElement> {
        let count = self.order_gamma(m) as usize;
        (0..count)
            .map(|mut i| {
                let a: Vec<u64> = self.primes[..m]
                    .iter()
                    .map(|&p| {
                        let d = (i % (p as usize - 1)) as u64 + 1;
                        i /= p as usize - 1;
                        d
                    })
                    .collect();
                gamma_element(&a, &self.primes, self.big_m, ambient)
            })
            .collect()
    }

    /// Number of left cosets `gH` of `sub` inside `whole` (elements of the
    /// level-`ambient` group), by greedy representatives.
    fn count_cosets(&self, whole: &[AffineElement], sub: &[AffineElement], ambient: usize) -> usize {
        let total = self.order_g(ambient) as usize;
        let mut covered = vec![false; total];
        let mut cosets = 0;
        for g in whole {
            if covered[self.g_encode(g)] {
                continue;
            }
            cosets += 1;
            for h in sub {
                covered[self.g_encode(&g.mul(h, &self.primes))] = true;
            }
        }
        cosets
    }

    fn within_cap(&self, m: usize) -> bool {
        self.order_g(m) <= MODEL_CAP as u128
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub m: usize,
    /// `[G_m : G_{m-1}]`.
    pub g_index: u64,
    /// `[Gamma_m : Gamma_{m-1}]`.
    pub gamma_index: u64,
    /// Counted by coset enumeration; otherwise from the order formula (each
    /// `G_m` is the product of the compact part with `m` additive factors,
    /// and the orbit of `G_m` on `G_m / G_{m-1}` has size `p_m`).
    pub enumerated: bool,
}

/// `([G_m : G_{m-1}], [Gamma_m : Gamma_{m-1}])` in the truncation at level
/// `M = m`.
pub fn indices(primes: &[u64], m: usize) -> Result<IndexReport> {
    if m < 1 {
        return Err(LabError::pre("m must be at least 1"));
    }
    let model = TruncatedModel::new(primes, m)?;
    model.check_level(m)?;
    if !model.within_cap(m) {
        let g = model.order_g(m) / model.order_g(m - 1);
        let c = model.order_gamma(m) / model.order_gamma(m - 1);
        return Ok(IndexReport { m, g_index: g as u64, gamma_index: c as u64, enumerated: false });
    }
    let g_whole = model.g_elements(m, m);
    let g_sub = model.g_elements(m - 1, m);
    let g_index = model.count_cosets(&g_whole, &g_sub, m);
    let c_whole = model.gamma_elements(m, m);
    let c_sub = model.gamma_elements(m - 1, m);
    let gamma_index = model.count_cosets(&c_whole, &c_sub, m);
    Ok(IndexReport { m, g_index: g_index as u64, gamma_index: gamma_index as u64, enumerated: true })
}

fn big(n: u128) -> BigInt {
    BigInt::from(n)
}

/// `vol(G_m / Gamma_m) = prod_{n <= m} p_n / (p_n - 1)`.
pub fn covolume_product(primes: &[u64], m: usize) -> Result<BigRational> {
    check_primes(primes)?;
    if m > primes.len() {
        return Err(LabError::pre(format!("m = {m} exceeds the {} primes", primes.len())));
    }
    Ok(primes[..m]
        .iter()
        .fold(BigRational::one(), |acc, &p| acc * BigRational::new(big(p as u128), big(p as u128 - 1))))
}

#[derive(Debug, Clone, Serialize)]
pub struct CovolumeCount {
    pub m: usize,
    /// `[G_m : Gamma_m]` by coset enumeration.
    pub cosets: u64,
    /// Order of the compact part, the measure normalization.
    pub compact_order: u64,
    #[serde(serialize_with = "crate::serde_rational::one")]
    pub covolume: BigRational,
}

/// `vol(G_m / Gamma_m)` as `[G_m : Gamma_m] / |K|` counted in the truncation
/// at level `M = m`.
pub fn covolume_by_enumeration(primes: &[u64], m: usize) -> Result<CovolumeCount> {
    let model = TruncatedModel::new(primes, m)?;
    if !model.within_cap(m) {
        return Err(LabError::CapExceeded { cap: MODEL_CAP });
    }
    let whole = model.g_elements(m, m);
    let gamma = model.gamma_elements(m, m);
    let cosets = model.count_cosets(&whole, &gamma, m) as u128;
    let k = model.compact_order();
    Ok(CovolumeCount {
        m,
        cosets: cosets as u64,
        compact_order: k as u64,
        covolume: BigRational::new(big(cosets), big(k)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LatticeVerdict {
    ConsistentNonUniform,
    /// One prime: `G = G_1` and the truncation is uniform.
    StabilizesAtOne,
    NotLatticeCandidate,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeCertificate {
    #[serde(serialize_with = "crate::serde_rational::many")]
    pub partial_products: Vec<BigRational>,
    pub strictly_increasing: bool,
    /// `sum 1/(p_n - 1)` over the whole list.
    #[serde(serialize_with = "crate::serde_rational::one")]
    pub series: BigRational,
    /// The same sum over the primes beyond `m_max`.
    #[serde(serialize_with = "crate::serde_rational::one")]
    pub tail: BigRational,
    /// `P_{m_max} / (1 - tail)`, an upper bound for the full product over the
    /// list since `prod (1 - x_n) >= 1 - sum x_n`.
    #[serde(serialize_with = "crate::serde_rational::opt")]
    pub limit_upper_bound: Option<BigRational>,
    pub verdict: LatticeVerdict,
}

/// Evidence that `Gamma` is a non-uniform lattice for this prime list.
///
/// `prod p/(p - 1)` converges iff `sum 1/(p - 1)` does; the list passes when
/// its series stays below `bound`.
pub fn lattice_certificate(primes: &[u64], m_max: usize, bound: &BigRational) -> Result<LatticeCertificate> {
    check_primes(primes)?;
    if primes.is_empty() || m_max == 0 || m_max > primes.len() {
        return Err(LabError::pre("need 1 <= m_max <= number of primes"));
    }
    let mut partial_products = Vec::with_capacity(m_max);
    let mut acc = BigRational::one();
    for &p in &primes[..m_max] {
        acc *= BigRational::new(big(p as u128), big(p as u128 - 1));
        partial_products.push(acc.clone());
    }
    let strictly_increasing = partial_products.windows(2).all(|w| w[1] > w[0]);
    let recip = |p: &u64| BigRational::new(BigInt::one(), big(*p as u128 - 1));
    let tail: BigRational = primes[m_max..].iter().map(recip).sum();
    let series: BigRational = primes[..m_max].iter().map(recip).sum::<BigRational>() + &tail;
    let one = BigRational::one();
    let limit_upper_bound = (tail < one).then(|| &partial_products[m_max - 1] / (&one - &tail));
    let verdict = if &series >= bound {
        LatticeVerdict::NotLatticeCandidate
    } else if primes.len() == 1 {
        LatticeVerdict::StabilizesAtOne
    } else {
        LatticeVerdict::ConsistentNonUniform
    };
    Ok(LatticeCertificate { partial_products, strictly_increasing, series, tail, limit_upper_bound, verdict })
}

/// Upper unipotent matrix `[[1, x, z], [0, 1, y], [0, 0, 1]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HeisenbergElement {
    #[serde(serialize_with = "crate::serde_rational::one")]
    pub x: BigRational,
    #[serde(serialize_with = "crate::serde_rational::one")]
    pub y: BigRational,
    #[serde(serialize_with = "crate::serde_rational::one")]
    pub z: BigRational,
}

impl HeisenbergElement {
    pub fn new(x: BigRational, y: BigRational, z: BigRational) -> Self {
        Self { x, y, z }
    }

    pub fn identity() -> Self {
        Self::new(BigRational::zero(), BigRational::zero(), BigRational::zero())
    }

    /// `(x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y')`.
    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z + &self.x * &o.y)
    }

    pub fn inverse(&self) -> Self {
        Self::new(-&self.x, -&self.y, &self.x * &self.y - &self.z)
    }

    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer() && self.z.is_integer()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HeisenbergSplit {
    /// The lattice element.
    pub gamma: HeisenbergElement,
    /// Representative in `[0, 1)^3`.
    pub rest: HeisenbergElement,
}

/// `g = gamma * r` with `gamma` integral and `r in [0, 1)^3`: take
/// `a = floor(x)`, `b = floor(y)`, then `c = floor(z - a (y - b))` absorbs
/// the correction term of the group law. The cube is a fundamental domain
/// of Lebesgue measure 1.
pub fn heisenberg_reduce(g: &HeisenbergElement) -> HeisenbergSplit {
    let a = g.x.floor();
    let b = g.y.floor();
    let ry = &g.y - &b;
    let c = (&g.z - &a * &ry).floor();
    let rest = HeisenbergElement::new(&g.x - &a, ry.clone(), &g.z - &c - &a * &ry);
    HeisenbergSplit { gamma: HeisenbergElement::new(a, b, c), rest }
}

/// Whether `r` lies in `[0, 1)^3`.
pub fn in_unit_cube(r: &HeisenbergElement) -> bool {
    let zero = BigRational::zero();
    let one = BigRational::one();
    [&r.x, &r.y, &r.z].iter().all(|t| **t >= zero && **t < one)
}

/// Least common multiple of the denominators, for reporting.
pub fn common_denominator(g: &HeisenbergElement) -> BigInt {
    [&g.x, &g.y, &g.z].iter().fold(BigInt::one(), |acc, t| acc.lcm(t.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn primes() {
        assert_eq!(first_primes(6), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(doubling_primes(5), vec![5, 11, 23, 47, 97]);
    }

    #[test]
    fn gamma_is_a_subgroup() {
        assert!(gamma_closure_check(&[5, 7, 101], 500, 1).unwrap());
        let corrupted = closure_check_with(&[5], 0, 1, |a, p| (a % p, a % p)).unwrap();
        assert!(!corrupted[0].closed);
        assert!(matches!(gamma_closure_check(&[9], 10, 1), Err(LabError::CompositeModulus(9))));
    }

    #[test]
    fn indices_and_covolume() {
        assert_eq!(indices(&[5, 7], 2).unwrap(), IndexReport { m: 2, g_index: 7, gamma_index: 6, enumerated: true });
        assert_eq!(indices(&[2], 1).unwrap().gamma_index, 1);
        assert_eq!(covolume_product(&[5, 7, 11], 3).unwrap(), rat(77, 48));
        assert_eq!(covolume_product(&[5, 7, 11], 0).unwrap(), rat(1, 1));
        assert_eq!(covolume_by_enumeration(&[5, 7, 11], 3).unwrap().covolume, rat(77, 48));
    }

    #[test]
    fn certificates() {
        let b = rat(1, 1);
        let c = lattice_certificate(&doubling_primes(8), 8, &b).unwrap();
        assert_eq!(c.verdict, LatticeVerdict::ConsistentNonUniform);
        assert!(c.strictly_increasing);
        let c = lattice_certificate(&first_primes(1000), 12, &b).unwrap();
        assert_eq!(c.verdict, LatticeVerdict::NotLatticeCandidate);
        let c = lattice_certificate(&[5], 1, &b).unwrap();
        assert_eq!(c.verdict, LatticeVerdict::StabilizesAtOne);
    }

    #[test]
    fn heisenberg_examples() {
        let g = HeisenbergElement::new(rat(5, 2), rat(-3, 4), rat(13, 4));
        let s = heisenberg_reduce(&g);
        assert_eq!(s.gamma, HeisenbergElement::new(rat(2, 1), rat(-1, 1), rat(2, 1)));
        assert_eq!(s.rest, HeisenbergElement::new(rat(1, 2), rat(1, 4), rat(3, 4)));
        assert_eq!(s.gamma.mul(&s.rest), g);
        let h = HeisenbergElement::new(rat(1, 2), rat(1, 4), rat(3, 4));
        assert_eq!(heisenberg_reduce(&h).gamma, HeisenbergElement::identity());
    }
}
