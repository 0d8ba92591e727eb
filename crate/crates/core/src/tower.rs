//! Finite-field towers `F_q ⊆ F_{q^m} ⊆ F_{q^N}` for `m | N`.
//!
//! The universe field `U = F_p[t]/(f)` with `deg f = base_degree * N`.
//! Elements are coefficient vectors (constant term first). They are also
//! indexed by `Σ c_i p^i`, which is how element tables refer to them.

use num_integer::Integer;
use thiserror::Error;

pub const DEFAULT_UNIVERSE_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("universe field has {size} elements, above the cap {cap}")]
    CapExceeded { size: u128, cap: u64 },
    #[error("modulus is not monic of degree {0}")]
    BadModulus(usize),
    #[error("modulus is reducible")]
    Reducible,
    #[error("{d} is not a divisor of N = {n}")]
    NotALevel { d: u64, n: u64 },
    #[error("base degree and N must be positive")]
    Degenerate,
}

pub fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Polynomials over `F_p` as little-endian coefficient vectors, trimmed.
mod poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    pub fn inv_mod(x: u64, p: u64) -> u64 {
        super::pow_mod(x, p - 2, p)
    }

    /// Remainder of `a` by `b` (`b` nonzero).
    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p);
        while r.len() > db {
            let k = r.len() - 1;
            let c = r[k] * lead_inv % p;
            for i in 0..=db {
                let t = k - db + i;
                r[t] = (r[t] + p - c * b[i] % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Irreducibility over `F_p`: `gcd(f, x^{p^i} - x) = 1` for `1 <= i < deg f`.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 1..d {
        // xp <- xp^p mod f
        let mut acc = vec![1u64];
        for _ in 0..p {
            acc = poly::rem(&poly::mul(&acc, &xp, p), f, p);
        }
        xp = acc;
        let g = poly::gcd(f, &poly::sub(&xp, &x, p), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// `F_{q^N}` presented over `F_p`, with its Frobenius `x -> x^q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTower {
    p: u64,
    base_degree: u32,
    n: u64,
    modulus: Vec<u64>,
    /// column `i` is `t^{i q}` reduced
    frob_matrix: Vec<Vec<u64>>,
}

/// Element of the universe field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    coeffs: Vec<u64>,
}

impl FieldElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

impl FieldTower {
    /// Builds the tower with the first irreducible modulus in the scan order:
    /// monic, non-leading coefficients read as a base-`p` number, constant
    /// term least significant, counting up from `start`.
    pub fn new(p: u64, base_degree: u32, n: u64, cap: u64, start: u64) -> Result<Self, TowerError> {
        let deg = Self::check_sizes(p, base_degree, n, cap)?;
        let total = (p as u128).pow(deg as u32);
        let mut k = start as u128 % total;
        for _ in 0..total {
            let mut f = vec![0u64; deg + 1];
            let mut x = k;
            for c in f.iter_mut().take(deg) {
                *c = (x % p as u128) as u64;
                x /= p as u128;
            }
            f[deg] = 1;
            if is_irreducible(&f, p) {
                return Ok(Self::assemble(p, base_degree, n, f));
            }
            k = (k + 1) % total;
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// Builds the tower from an explicit monic modulus (constant term first).
    pub fn with_modulus(
        p: u64,
        base_degree: u32,
        n: u64,
        cap: u64,
        modulus: Vec<u64>,
    ) -> Result<Self, TowerError> {
        let deg = Self::check_sizes(p, base_degree, n, cap)?;
        if modulus.len() != deg + 1 || modulus[deg] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(TowerError::BadModulus(deg));
        }
        if !is_irreducible(&modulus, p) {
            return Err(TowerError::Reducible);
        }
        Ok(Self::assemble(p, base_degree, n, modulus))
    }

    fn check_sizes(p: u64, base_degree: u32, n: u64, cap: u64) -> Result<usize, TowerError> {
        if !is_prime(p) {
            return Err(TowerError::NotPrime(p));
        }
        if base_degree == 0 || n == 0 {
            return Err(TowerError::Degenerate);
        }
        let deg = base_degree as u128 * n as u128;
        let size = (p as u128).checked_pow(deg as u32).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(TowerError::CapExceeded { size, cap });
        }
        Ok(deg as usize)
    }

    fn assemble(p: u64, base_degree: u32, n: u64, modulus: Vec<u64>) -> Self {
        let deg = modulus.len() - 1;
        let mut tower = FieldTower {
            p,
            base_degree,
            n,
            modulus,
            frob_matrix: vec![],
        };
        let q = p.pow(base_degree);
        let t = tower.from_coeffs(&[0, 1]);
        let tq = tower.pow(&t, q);
        let mut col = tower.one();
        let mut cols = Vec::with_capacity(deg);
        for _ in 0..deg {
            cols.push(col.coeffs.clone());
            col = tower.mul(&col, &tq);
        }
        tower.frob_matrix = cols;
        tower
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn base_degree(&self) -> u32 {
        self.base_degree
    }

    /// `q = p^base_degree`.
    pub fn q(&self) -> u64 {
        self.p.pow(self.base_degree)
    }

    /// Universe exponent `N`.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.degree() as u32)
    }

    pub fn levels(&self) -> Vec<u64> {
        divisors(self.n)
    }

    pub fn check_level(&self, d: u64) -> Result<(), TowerError> {
        if d == 0 || !self.n.is_multiple_of(d) {
            Err(TowerError::NotALevel { d, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            coeffs: vec![0; self.degree()],
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_coeffs(&[1])
    }

    pub fn from_coeffs(&self, c: &[u64]) -> FieldElem {
        let mut v: Vec<u64> = c.iter().map(|x| x % self.p).collect();
        poly::trim(&mut v);
        let mut coeffs = poly::rem(&v, &self.modulus, self.p);
        coeffs.resize(self.degree(), 0);
        FieldElem { coeffs }
    }

    pub fn from_index(&self, mut idx: u64) -> FieldElem {
        let mut coeffs = vec![0; self.degree()];
        for c in coeffs.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FieldElem { coeffs }
    }

    pub fn index(&self, x: &FieldElem) -> u64 {
        x.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn from_int(&self, k: i64) -> FieldElem {
        self.from_coeffs(&[k.rem_euclid(self.p as i64) as u64])
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| (x + y) % self.p)
                .collect(),
        }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| (x + self.p - y) % self.p)
                .collect(),
        }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.from_coeffs(&poly::mul(&a.coeffs, &b.coeffs, self.p))
    }

    pub fn pow(&self, a: &FieldElem, mut e: u64) -> FieldElem {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, a: &FieldElem) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    /// Inverse of a nonzero element, as `a^{|U|-2}`.
    pub fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        (!self.is_zero(a)).then(|| self.pow(a, self.size() - 2))
    }

    /// `x -> x^q`.
    pub fn frobenius(&self, x: &FieldElem) -> FieldElem {
        let mut out = vec![0u64; self.degree()];
        for (i, &c) in x.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(&self.frob_matrix[i]) {
                *o = (*o + c * m) % self.p;
            }
        }
        FieldElem { coeffs: out }
    }

    pub fn frobenius_pow(&self, x: &FieldElem, k: u64) -> FieldElem {
        let mut y = x.clone();
        for _ in 0..k % self.n {
            y = self.frobenius(&y);
        }
        y
    }

    /// Smallest level `m | N` whose field contains `x`.
    pub fn level_of(&self, x: &FieldElem) -> u64 {
        let mut y = x.clone();
        let mut orbit = 1;
        loop {
            y = self.frobenius(&y);
            if &y == x {
                return orbit;
            }
            orbit += 1;
        }
    }
}

/// Log/antilog tables over element indices, for hot loops.
#[derive(Clone, Debug)]
pub struct FastField {
    p: u64,
    deg: usize,
    size: u32,
    log: Vec<u32>,
    exp: Vec<u32>,
    frob: Vec<u32>,
}

impl FastField {
    pub fn new(tower: &FieldTower) -> Self {
        let size = tower.size();
        let order = size - 1;
        let primes: Vec<u64> = divisors(order)
            .into_iter()
            .filter(|&d| is_prime(d))
            .collect();
        let g = (1..size)
            .map(|i| tower.from_index(i))
            .find(|x| {
                primes
                    .iter()
                    .all(|&l| tower.pow(x, order / l) != tower.one())
            })
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; size as usize];
        let mut x = tower.one();
        for k in 0..order {
            let i = tower.index(&x);
            exp.push(i as u32);
            log[i as usize] = k as u32;
            x = tower.mul(&x, &g);
        }
        let frob = (0..size)
            .map(|i| tower.index(&tower.frobenius(&tower.from_index(i))) as u32)
            .collect();
        FastField {
            p: tower.p(),
            deg: tower.degree(),
            size: size as u32,
            log,
            exp,
            frob,
        }
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let (mut a, mut b) = (a as u64, b as u64);
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.deg {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        let mut a = a as u64;
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.deg {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.exp.len() as u64;
        self.exp[((self.log[a as usize] as u64 + self.log[b as usize] as u64) % n) as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let n = self.exp.len() as u64;
        self.exp[((n - self.log[a as usize] as u64) % n) as usize]
    }

    /// Index of the image of the integer `k` in the prime field.
    pub fn int(&self, k: i64) -> u32 {
        k.rem_euclid(self.p as i64) as u32
    }

    pub fn frobenius(&self, a: u32) -> u32 {
        self.frob[a as usize]
    }
}

/// Splitting of `F_{q^d} ⊗ F_{q^m}` over `F_{q^m}`: `gcd(d, m)` factors, each of
/// degree `lcm(d, m) / m`.
pub fn extension_splitting(d: u64, m: u64) -> (u64, u64) {
    (d.gcd(&m), d.lcm(&m) / m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_scan_gives_t2_plus_2() {
        let t = FieldTower::new(5, 1, 2, DEFAULT_UNIVERSE_CAP, 0).unwrap();
        assert_eq!(t.modulus(), &[2, 0, 1]);
        let x = t.from_coeffs(&[0, 1]);
        assert_eq!(t.frobenius(&x), t.neg(&x));
    }

    #[test]
    fn frobenius_fixes_base_field_and_has_order_n() {
        let t = FieldTower::new(3, 1, 4, DEFAULT_UNIVERSE_CAP, 0).unwrap();
        for k in 0..3 {
            let a = t.from_int(k);
            assert_eq!(t.frobenius(&a), a);
            assert_eq!(t.level_of(&a), 1);
        }
        for i in 0..t.size() {
            let x = t.from_index(i);
            assert_eq!(t.frobenius_pow(&x, 4), x);
        }
    }

    #[test]
    fn fixed_field_sizes() {
        for (p, n) in [(2u64, 6u64), (3, 4), (5, 2), (7, 3)] {
            let t = FieldTower::new(p, 1, n, 4096, 0).unwrap();
            for m in divisors(n) {
                let fixed = (0..t.size()).filter(|&i| {
                    let x = t.from_index(i);
                    t.frobenius_pow(&x, m) == x
                });
                assert_eq!(fixed.count() as u64, p.pow(m as u32), "p={p} n={n} m={m}");
            }
        }
    }

    #[test]
    fn frobenius_is_a_field_automorphism() {
        let t = FieldTower::new(5, 1, 3, DEFAULT_UNIVERSE_CAP, 0).unwrap();
        for i in (0..t.size()).step_by(7) {
            for j in (0..t.size()).step_by(11) {
                let (a, b) = (t.from_index(i), t.from_index(j));
                assert_eq!(
                    t.frobenius(&t.add(&a, &b)),
                    t.add(&t.frobenius(&a), &t.frobenius(&b))
                );
                assert_eq!(
                    t.frobenius(&t.mul(&a, &b)),
                    t.mul(&t.frobenius(&a), &t.frobenius(&b))
                );
            }
        }
    }

    #[test]
    fn generator_has_top_level() {
        let t = FieldTower::new(5, 1, 2, DEFAULT_UNIVERSE_CAP, 0).unwrap();
        let order = t.size() - 1;
        let g = (1..t.size())
            .map(|i| t.from_index(i))
            .find(|x| {
                divisors(order)
                    .iter()
                    .filter(|&&d| d < order)
                    .all(|&d| t.pow(x, d) != t.one())
            })
            .unwrap();
        assert_eq!(t.level_of(&g), 2);
        assert_eq!(t.level_of(&t.zero()), 1);
    }

    #[test]
    fn base_degree_two() {
        // q = 4, N = 2: U = F_16, level 1 is F_4
        let t = FieldTower::new(2, 2, 2, DEFAULT_UNIVERSE_CAP, 0).unwrap();
        assert_eq!(t.q(), 4);
        let fixed = (0..16)
            .filter(|&i| t.level_of(&t.from_index(i)) == 1)
            .count();
        assert_eq!(fixed, 4);
    }

    #[test]
    fn explicit_modulus() {
        assert!(FieldTower::with_modulus(5, 1, 2, 1 << 20, vec![1, 0, 1]).is_err());
        assert!(FieldTower::with_modulus(5, 1, 2, 1 << 20, vec![2, 0, 1]).is_ok());
        assert_eq!(
            FieldTower::new(5, 1, 9, 1000, 0),
            Err(TowerError::CapExceeded {
                size: 1953125,
                cap: 1000
            })
        );
        assert_eq!(
            FieldTower::new(6, 1, 2, 1000, 0),
            Err(TowerError::NotPrime(6))
        );
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(extension_splitting(1, 3), (1, 1));
        assert_eq!(extension_splitting(2, 2), (2, 1));
        assert_eq!(extension_splitting(2, 3), (1, 2));
        for d in 1..=6 {
            for m in 1..=6 {
                let (g, f) = extension_splitting(d, m);
                assert_eq!(g * f * m, d * m);
            }
        }
    }

    #[test]
    fn f4_tensor_f4_has_four_idempotents() {
        // x = 1⊗u + t⊗v in F_4 ⊗ F_4 with t^2 = t + 1 in the first factor, so
        // x^2 = 1⊗(u^2 + v^2) + t⊗v^2; four idempotents means two factors
        let t = FieldTower::new(2, 1, 2, 16, 0).unwrap();
        let mut count = 0;
        for u in (0..4).map(|i| t.from_index(i)) {
            for v in (0..4).map(|i| t.from_index(i)) {
                let v2 = t.mul(&v, &v);
                if t.add(&t.mul(&u, &u), &v2) == u && v2 == v {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 4);
        assert_eq!(extension_splitting(2, 2), (2, 1));
    }

    #[test]
    fn fast_field_agrees_with_polynomial_arithmetic() {
        let t = FieldTower::new(5, 1, 3, DEFAULT_UNIVERSE_CAP, 0).unwrap();
        let f = FastField::new(&t);
        for i in (0..t.size()).step_by(5) {
            for j in (0..t.size()).step_by(13) {
                let (a, b) = (t.from_index(i), t.from_index(j));
                assert_eq!(f.mul(i as u32, j as u32) as u64, t.index(&t.mul(&a, &b)));
                assert_eq!(f.add(i as u32, j as u32) as u64, t.index(&t.add(&a, &b)));
                assert_eq!(f.sub(i as u32, j as u32) as u64, t.index(&t.sub(&a, &b)));
            }
            if i != 0 {
                assert_eq!(f.mul(i as u32, f.inv(i as u32)), 1);
            }
            assert_eq!(
                f.frobenius(i as u32) as u64,
                t.index(&t.frobenius(&t.from_index(i)))
            );
        }
    }
}
