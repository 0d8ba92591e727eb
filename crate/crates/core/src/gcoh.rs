//! Cohomology of the cyclic quotient `Z/N` of the Galois group through the
//! bar resolution, with cup products, restriction, corestriction, the Kummer
//! map `δ`, the symbol map `s_n` and its descent to wedge powers.
//!
//! A cochain of degree `i` is a function `(Z/N)^i -> M`, stored as a flat
//! vector: the block of tuple `(g_1, .., g_i)` (base `N`, `g_1` most
//! significant) holds the raw coordinates of the value.
//!
//! Every H^2 and H^3 computed here is the cohomology of the finite quotient,
//! not of the profinite group.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::abgroup::{
    integer_kernel, kernel_of_map, quotient, wedge_power, AbError, AbHom, Elem, FgAbGroup, Lattice,
    Matrix, ModLattice, Presentation, WedgePower,
};
use crate::cycles::{Cycle, CycleSubgroup};
use crate::points::{NTorsion, PointModel, PointsError};
use crate::symbols::{phi, SymbolExpr, SymbolLayer, SymbolsError};

pub const MAX_ORDER: u64 = 6;
pub const MAX_DEGREE: usize = 3;
pub const MAX_MODULE: u128 = 10_000;
/// Largest cochain space (in raw coordinates) a coboundary may land in.
pub const COCHAIN_CAP: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GcohError {
    #[error(transparent)]
    Points(#[from] PointsError),
    #[error(transparent)]
    Symbols(#[from] SymbolsError),
    #[error(transparent)]
    Group(#[from] AbError),
    #[error("degree {0} outside 0..={MAX_DEGREE}")]
    Degree(usize),
    #[error("group order {0} outside 1..={MAX_ORDER}")]
    Order(u64),
    #[error("cochain space of {size} coordinates exceeds the cap {cap}")]
    Cap { size: usize, cap: usize },
    #[error("module of order {0} exceeds the cap {MAX_MODULE}")]
    ModuleSize(u128),
    #[error("invalid action: {0}")]
    Action(String),
    #[error("modules mixing finite and free coordinates are not supported")]
    Mixed,
    #[error("{m} does not divide the group order {n}")]
    Index { m: u64, n: u64 },
    #[error("modules or groups of the two operands differ")]
    Mismatch,
    #[error("cochain is not a cocycle")]
    NotCocycle,
    #[error("P{point} has no {n}-division point in the universe; use a larger N")]
    Division { point: u32, n: u64 },
    #[error("A[{n}] has order {got} in the universe, expected {expected}")]
    Torsion { n: u64, got: u128, expected: u128 },
    #[error("cycle is not in F^{0}")]
    Membership(usize),
}

fn reduce_mod(x: i128, d: i64) -> i64 {
    if d == 0 {
        i64::try_from(x).expect("free cochain coordinate fits in i64")
    } else {
        x.rem_euclid(d as i128) as i64
    }
}

fn decode(mut t: usize, n: usize, digits: &mut [usize]) {
    for s in (0..digits.len()).rev() {
        digits[s] = t % n;
        t /= n;
    }
}

fn encode(digits: impl IntoIterator<Item = usize>, n: usize) -> usize {
    digits.into_iter().fold(0, |acc, g| acc * n + g)
}

fn big(v: &[i64]) -> Elem {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn small(v: &[BigInt]) -> Vec<i64> {
    v.iter()
        .map(|x| x.to_i64().expect("coordinate fits in i64"))
        .collect()
}

/// `M` as a module over `Z/N = <g>`, on raw cyclic coordinates
/// `Z/d_1 + ... + Z/d_k` (`d_j = 0` free; finite and free are not mixed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    order: u64,
    moduli: Vec<i64>,
    /// `powers[k][j]` = `g^k e_j`
    powers: Vec<Vec<Vec<i64>>>,
}

impl GModule {
    /// `action[j]` is the image of the `j`-th generator under `g`.
    pub fn new(order: u64, moduli: Vec<i64>, action: Vec<Vec<i64>>) -> Result<Self, GcohError> {
        if order == 0 || order > MAX_ORDER {
            return Err(GcohError::Order(order));
        }
        let k = moduli.len();
        if moduli.iter().any(|&d| d < 0) {
            return Err(GcohError::Action("negative modulus".into()));
        }
        if moduli.contains(&0) && moduli.iter().any(|&d| d != 0) {
            return Err(GcohError::Mixed);
        }
        if action.len() != k || action.iter().any(|c| c.len() != k) {
            return Err(GcohError::Action(format!(
                "expected {k} columns of length {k}"
            )));
        }
        for (j, col) in action.iter().enumerate() {
            for (i, &c) in col.iter().enumerate() {
                let ok = if moduli[j] == 0 {
                    true
                } else {
                    reduce_mod(moduli[j] as i128 * c as i128, moduli[i]) == 0
                };
                if !ok {
                    return Err(GcohError::Action(format!(
                        "image of generator {j} is not killed by its order"
                    )));
                }
            }
        }
        let mut m = GModule {
            order,
            moduli,
            powers: vec![],
        };
        let identity: Vec<Vec<i64>> = (0..k)
            .map(|j| {
                let mut e = vec![0; k];
                e[j] = 1;
                m.reduce(&mut e);
                e
            })
            .collect();
        let action: Vec<Vec<i64>> = action
            .into_iter()
            .map(|mut c| {
                m.reduce(&mut c);
                c
            })
            .collect();
        let mut powers = vec![identity.clone()];
        for _ in 1..order {
            let prev = powers.last().unwrap();
            let next: Vec<Vec<i64>> = prev.iter().map(|c| m.apply_cols(&action, c)).collect();
            powers.push(next);
        }
        let wrap: Vec<Vec<i64>> = powers
            .last()
            .unwrap()
            .iter()
            .map(|c| m.apply_cols(&action, c))
            .collect();
        if wrap != identity {
            return Err(GcohError::Action(format!("g^{order} is not the identity")));
        }
        m.powers = powers;
        if let Some(size) = m.size() {
            if size > MAX_MODULE {
                return Err(GcohError::ModuleSize(size));
            }
        }
        Ok(m)
    }

    /// Trivial action.
    pub fn trivial(order: u64, moduli: Vec<i64>) -> Result<Self, GcohError> {
        let k = moduli.len();
        let action = (0..k)
            .map(|j| {
                let mut e = vec![0; k];
                e[j] = 1;
                e
            })
            .collect();
        GModule::new(order, moduli, action)
    }

    /// Module on the canonical coordinates of `hom.source()`, acted on by `hom`.
    pub fn from_hom(order: u64, hom: &AbHom) -> Result<Self, GcohError> {
        if hom.source() != hom.target() {
            return Err(GcohError::Mismatch);
        }
        let moduli = small(hom.source().invariant_factors());
        let action = (0..moduli.len())
            .map(|j| small(&hom.matrix().col(j)))
            .collect();
        GModule::new(order, moduli, action)
    }

    fn apply_cols(&self, cols: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
        let mut acc = vec![0i128; self.dim()];
        for (j, &c) in x.iter().enumerate() {
            if c != 0 {
                for (a, &v) in acc.iter_mut().zip(&cols[j]) {
                    *a += c as i128 * v as i128;
                }
            }
        }
        acc.iter()
            .zip(&self.moduli)
            .map(|(&a, &d)| reduce_mod(a, d))
            .collect()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_finite(&self) -> bool {
        self.moduli.iter().all(|&d| d > 0)
    }

    /// `|M|`, or `None` when free.
    pub fn size(&self) -> Option<u128> {
        self.moduli.iter().try_fold(1u128, |acc, &d| {
            if d > 0 {
                acc.checked_mul(d as u128)
            } else {
                None
            }
        })
    }

    pub fn reduce(&self, v: &mut [i64]) {
        for (x, &d) in v.iter_mut().zip(&self.moduli) {
            if d > 0 {
                *x = x.rem_euclid(d);
            }
        }
    }

    /// `g^k x`.
    pub fn act(&self, k: u64, x: &[i64]) -> Vec<i64> {
        self.apply_cols(&self.powers[(k % self.order) as usize], x)
    }

    /// Matrix of `g` (columns are images).
    pub fn action(&self) -> Vec<Vec<i64>> {
        if self.order == 1 {
            self.powers[0].clone()
        } else {
            self.powers[1].clone()
        }
    }

    /// `M ⊗ M'` with coordinates `(a, b) -> a * dim' + b` and the diagonal action.
    pub fn tensor(&self, other: &GModule) -> Result<GModule, GcohError> {
        if self.order != other.order {
            return Err(GcohError::Mismatch);
        }
        let (p, q) = (self.dim(), other.dim());
        let moduli: Vec<i64> = (0..p * q)
            .map(|t| self.moduli[t / q].gcd(&other.moduli[t % q]))
            .collect();
        let (ga, gb) = (self.action(), other.action());
        let action = (0..p * q)
            .map(|t| {
                let (a, b) = (t / q, t % q);
                (0..p * q).map(|s| ga[a][s / q] * gb[b][s % q]).collect()
            })
            .collect();
        GModule::new(self.order, moduli, action)
    }

    pub fn tensor_power(&self, r: usize) -> Result<GModule, GcohError> {
        assert!(r >= 1);
        let mut acc = self.clone();
        for _ in 1..r {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }

    /// The same module over the subgroup `<g^m>` of index `m`.
    pub fn restrict(&self, m: u64) -> Result<GModule, GcohError> {
        if m == 0 || !self.order.is_multiple_of(m) {
            return Err(GcohError::Index { m, n: self.order });
        }
        let action = self.powers[(m % self.order) as usize].clone();
        GModule::new(self.order / m, self.moduli.clone(), action)
    }

    /// Raw coordinates of the cochain space `C^i`.
    pub fn cochain_moduli(&self, i: usize) -> Vec<i64> {
        let count = (self.order as usize).pow(i as u32);
        (0..count)
            .flat_map(|_| self.moduli.iter().copied())
            .collect()
    }

    fn check_cochain_space(&self, i: usize) -> Result<usize, GcohError> {
        if i > MAX_DEGREE + 1 {
            return Err(GcohError::Degree(i));
        }
        let size = (self.order as usize).pow(i as u32) * self.dim();
        if size > COCHAIN_CAP {
            return Err(GcohError::Cap {
                size,
                cap: COCHAIN_CAP,
            });
        }
        Ok(size)
    }

    /// Bar coboundary `d^i f`.
    pub fn coboundary(&self, i: usize, f: &[i64]) -> Vec<i64> {
        let n = self.order as usize;
        let d = self.dim();
        assert_eq!(f.len(), n.pow(i as u32) * d, "cochain length");
        let total = n.pow(i as u32 + 1);
        let mut out = vec![0i64; total * d];
        let mut g = vec![0usize; i + 1];
        let mut acc = vec![0i128; d];
        for t in 0..total {
            decode(t, n, &mut g);
            acc.iter_mut().for_each(|a| *a = 0);
            let tail = encode(g[1..].iter().copied(), n);
            for (a, v) in acc
                .iter_mut()
                .zip(self.act(g[0] as u64, &f[tail * d..(tail + 1) * d]))
            {
                *a += v as i128;
            }
            for k in 0..i {
                let idx = encode(
                    (0..i).map(|s| match s.cmp(&k) {
                        std::cmp::Ordering::Less => g[s],
                        std::cmp::Ordering::Equal => (g[k] + g[k + 1]) % n,
                        std::cmp::Ordering::Greater => g[s + 1],
                    }),
                    n,
                );
                let sign: i128 = if (k + 1) % 2 == 0 { 1 } else { -1 };
                for (a, &v) in acc.iter_mut().zip(&f[idx * d..(idx + 1) * d]) {
                    *a += sign * v as i128;
                }
            }
            let head = encode(g[..i].iter().copied(), n);
            let sign: i128 = if (i + 1).is_multiple_of(2) { 1 } else { -1 };
            for (a, &v) in acc.iter_mut().zip(&f[head * d..(head + 1) * d]) {
                *a += sign * v as i128;
            }
            for (s, (&a, &m)) in acc.iter().zip(&self.moduli).enumerate() {
                out[t * d + s] = reduce_mod(a, m);
            }
        }
        out
    }

    /// Images of the unit cochains of `C^i` under `d^i`.
    fn coboundary_images(&self, i: usize) -> Vec<Vec<i64>> {
        let size = (self.order as usize).pow(i as u32) * self.dim();
        (0..size)
            .map(|k| {
                let mut e = vec![0i64; size];
                e[k] = 1;
                self.reduce(&mut e);
                self.coboundary(i, &e)
            })
            .collect()
    }
}

/// A cochain together with its module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub module: GModule,
    pub degree: usize,
    pub values: Vec<i64>,
}

impl Cochain {
    pub fn new(module: &GModule, degree: usize, mut values: Vec<i64>) -> Result<Self, GcohError> {
        if degree > MAX_DEGREE {
            return Err(GcohError::Degree(degree));
        }
        let len = (module.order as usize).pow(degree as u32) * module.dim();
        if values.len() != len {
            return Err(GcohError::Action(format!(
                "cochain of length {} expected, got {}",
                len,
                values.len()
            )));
        }
        module.reduce(&mut values);
        Ok(Cochain {
            module: module.clone(),
            degree,
            values,
        })
    }

    pub fn zero(module: &GModule, degree: usize) -> Self {
        let len = (module.order as usize).pow(degree as u32) * module.dim();
        Cochain {
            module: module.clone(),
            degree,
            values: vec![0; len],
        }
    }

    /// The constant cochain of degree 0.
    pub fn constant(module: &GModule, x: &[i64]) -> Self {
        let mut values = x.to_vec();
        module.reduce(&mut values);
        Cochain {
            module: module.clone(),
            degree: 0,
            values,
        }
    }

    /// Value at `(g_1, .., g_i)`.
    pub fn value(&self, g: &[u64]) -> &[i64] {
        let d = self.module.dim();
        let idx = encode(
            g.iter().map(|&x| (x % self.module.order) as usize),
            self.module.order as usize,
        );
        &self.values[idx * d..(idx + 1) * d]
    }

    pub fn coboundary(&self) -> Cochain {
        let values = self.module.coboundary(self.degree, &self.values);
        Cochain {
            module: self.module.clone(),
            degree: self.degree + 1,
            values,
        }
    }

    pub fn is_cocycle(&self) -> bool {
        self.coboundary().values.iter().all(|&x| x == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain, GcohError> {
        if self.module != other.module || self.degree != other.degree {
            return Err(GcohError::Mismatch);
        }
        let mut values: Vec<i64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        self.module.reduce_cochain(&mut values);
        Ok(Cochain {
            module: self.module.clone(),
            degree: self.degree,
            values,
        })
    }

    pub fn scale(&self, k: i64) -> Cochain {
        let mut values: Vec<i64> = self.values.iter().map(|&a| a * k).collect();
        self.module.reduce_cochain(&mut values);
        Cochain {
            module: self.module.clone(),
            degree: self.degree,
            values,
        }
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain, GcohError> {
        self.add(&other.scale(-1))
    }

    /// Applies a map of raw coordinates to every value.
    pub fn map_values(&self, target: &GModule, f: impl Fn(&[i64]) -> Vec<i64>) -> Cochain {
        let d = self.module.dim();
        let blocks = if d == 0 {
            (self.module.order as usize).pow(self.degree as u32)
        } else {
            self.values.len() / d
        };
        let mut values = Vec::with_capacity(blocks * target.dim());
        for b in 0..blocks {
            let mut v = f(&self.values[b * d..(b + 1) * d]);
            target.reduce(&mut v);
            values.extend(v);
        }
        Cochain {
            module: target.clone(),
            degree: self.degree,
            values,
        }
    }
}

impl GModule {
    fn reduce_cochain(&self, v: &mut [i64]) {
        let d = self.dim();
        if d == 0 {
            return;
        }
        for (i, x) in v.iter_mut().enumerate() {
            let m = self.moduli[i % d];
            if m > 0 {
                *x = x.rem_euclid(m);
            }
        }
    }
}

/// Hermite rows of a lattice in `Z^n` containing the relations of the ambient;
/// `rows[j]` is the row with pivot `j`, stored sparsely.
#[derive(Clone, Debug)]
struct Echelon {
    moduli: Vec<i64>,
    rows: Vec<Option<Vec<(usize, i64)>>>,
}

impl Echelon {
    fn sparse(row: &[i64]) -> Vec<(usize, i64)> {
        row.iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(k, &x)| (k, x))
            .collect()
    }

    fn from_mod(l: &ModLattice) -> Self {
        let rows = (0..l.dim()).map(|j| Some(Self::sparse(l.row(j)))).collect();
        Echelon {
            moduli: l.moduli().to_vec(),
            rows,
        }
    }

    fn from_big(l: &Lattice) -> Self {
        let rows = (0..l.dim())
            .map(|j| l.row(j).map(|r| Self::sparse(&small(r))))
            .collect();
        Echelon {
            moduli: small(l.moduli()),
            rows,
        }
    }

    fn pivot(&self, j: usize) -> Option<i64> {
        self.rows[j].as_ref().map(|r| r[0].1)
    }

    /// Coordinates of `v` in the row basis, or `None` if `v` is outside.
    /// With `exact` the solve happens in `Z^n`; otherwise `v` is only
    /// determined modulo the relations of the ambient.
    fn solve(&self, v: &[i64], exact: bool) -> Option<Vec<(usize, i64)>> {
        let mut w: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        let mut out = Vec::new();
        for j in 0..w.len() {
            let x = if exact {
                w[j]
            } else {
                reduce_mod(w[j], self.moduli[j]) as i128
            };
            if x == 0 {
                continue;
            }
            let row = self.rows[j].as_ref()?;
            let p = row[0].1 as i128;
            if x % p != 0 {
                return None;
            }
            let c = x / p;
            for &(k, a) in row {
                w[k] -= c * a as i128;
                if !exact && self.moduli[k] > 0 {
                    w[k] = w[k].rem_euclid(self.moduli[k] as i128);
                }
            }
            out.push((j, i64::try_from(c).expect("coordinate fits in i64")));
        }
        Some(out)
    }
}

/// `H^i(Z/N, M) = ker d^i / im d^{i-1}` with normal forms.
///
/// The cocycle lattice `Z` is kept in Hermite form. Each boundary row is
/// written in the `Z` basis; generators whose boundary row has leading
/// coefficient 1 are eliminated, and the rest go through Smith normal form.
#[derive(Clone, Debug)]
pub struct Cohomology {
    module: GModule,
    degree: usize,
    z: Echelon,
    keep: Vec<usize>,
    /// expression of the `Z` row with pivot `j` in the kept generators
    expr: Vec<Option<Vec<BigInt>>>,
    exponent: Option<BigInt>,
    presentation: Presentation,
}

impl Cohomology {
    pub fn new(module: &GModule, degree: usize) -> Result<Self, GcohError> {
        if degree > MAX_DEGREE {
            return Err(GcohError::Degree(degree));
        }
        module.check_cochain_space(degree + 1)?;
        let src = module.cochain_moduli(degree);
        let (z, b) = if module.is_finite() {
            let images = module.coboundary_images(degree);
            let z = kernel_of_map(&src, &module.cochain_moduli(degree + 1), &images);
            let mut b = ModLattice::new(src.clone());
            if degree > 0 {
                for img in module.coboundary_images(degree - 1) {
                    b.insert(&img);
                }
            }
            b.canonicalize();
            (Echelon::from_mod(&z), Echelon::from_mod(&b))
        } else {
            let zeros = vec![BigInt::zero(); src.len()];
            let images = module.coboundary_images(degree);
            let rows = module.cochain_moduli(degree + 1).len();
            let cols: Vec<Elem> = images.iter().map(|c| big(c)).collect();
            let mut z = Lattice::new(zeros.clone());
            for k in integer_kernel(&Matrix::from_cols(&cols, rows)) {
                z.insert(&k);
            }
            z.canonicalize();
            let mut b = Lattice::new(zeros);
            if degree > 0 {
                for img in module.coboundary_images(degree - 1) {
                    b.insert(&big(&img));
                }
            }
            b.canonicalize();
            (Echelon::from_big(&z), Echelon::from_big(&b))
        };
        let exponent = if module.is_finite() {
            Some(
                src.iter()
                    .fold(BigInt::from(1), |acc, &d| acc.lcm(&BigInt::from(d))),
            )
        } else {
            None
        };
        let n = src.len();
        // boundary rows in the Z basis
        let mut t: Vec<Option<Vec<(usize, i64)>>> = vec![None; n];
        for j in 0..n {
            if let Some(row) = &b.rows[j] {
                let mut dense = vec![0i64; n];
                for &(k, a) in row {
                    dense[k] = a;
                }
                t[j] = Some(z.solve(&dense, true).expect("boundaries are cocycles"));
            }
        }
        let is_unit = |j: usize| match (&t[j], z.pivot(j)) {
            (Some(row), Some(_)) => row.first() == Some(&(j, 1)),
            _ => false,
        };
        let keep: Vec<usize> = (0..n)
            .filter(|&j| z.pivot(j).is_some() && !is_unit(j))
            .collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(a, &j)| (j, a)).collect();
        let reduce = |v: &mut Vec<BigInt>| {
            if let Some(e) = &exponent {
                v.iter_mut().for_each(|x| *x = x.mod_floor(e));
            }
        };
        let mut expr: Vec<Option<Vec<BigInt>>> = vec![None; n];
        for j in (0..n).rev() {
            if z.pivot(j).is_none() {
                continue;
            }
            let mut v = vec![BigInt::zero(); keep.len()];
            if let Some(&a) = pos.get(&j) {
                v[a] = BigInt::from(1);
            } else {
                for &(k, c) in t[j].as_ref().unwrap().iter().skip(1) {
                    let ek = expr[k].as_ref().expect("later pivots are processed first");
                    for (x, y) in v.iter_mut().zip(ek) {
                        *x -= y * c;
                    }
                }
                reduce(&mut v);
            }
            expr[j] = Some(v);
        }
        let mut relations = Vec::new();
        for &j in &keep {
            if let Some(row) = &t[j] {
                let mut v = vec![BigInt::zero(); keep.len()];
                for &(k, c) in row {
                    for (x, y) in v.iter_mut().zip(expr[k].as_ref().unwrap()) {
                        *x += y * c;
                    }
                }
                reduce(&mut v);
                relations.push(v);
            }
        }
        if let Some(e) = &exponent {
            for a in 0..keep.len() {
                let mut v = vec![BigInt::zero(); keep.len()];
                v[a] = e.clone();
                relations.push(v);
            }
        }
        let presentation = Presentation::of_relations(keep.len(), &relations);
        Ok(Cohomology {
            module: module.clone(),
            degree,
            z,
            keep,
            expr,
            exponent,
            presentation,
        })
    }

    pub fn module(&self) -> &GModule {
        &self.module
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.presentation.group
    }

    /// Normal-form coordinates of a cocycle in `group()`.
    pub fn coords(&self, x: &Cochain) -> Result<Elem, GcohError> {
        if x.module != self.module || x.degree != self.degree {
            return Err(GcohError::Mismatch);
        }
        let c = self
            .z
            .solve(&x.values, false)
            .ok_or(GcohError::NotCocycle)?;
        let mut v = vec![BigInt::zero(); self.keep.len()];
        for (j, a) in c {
            for (s, y) in v.iter_mut().zip(self.expr[j].as_ref().unwrap()) {
                *s += y * a;
            }
        }
        if let Some(e) = &self.exponent {
            v.iter_mut().for_each(|s| *s = s.mod_floor(e));
        }
        Ok(self.presentation.project(&v))
    }

    pub fn class(&self, x: &Cochain) -> Result<CohClass, GcohError> {
        Ok(CohClass {
            coords: self.coords(x)?,
            cochain: x.clone(),
        })
    }

    /// A cocycle representing the class with the given coordinates.
    pub fn representative(&self, y: &[BigInt]) -> Cochain {
        let x = self.presentation.lift(y);
        let n = self.module.cochain_moduli(self.degree).len();
        let mut acc = vec![0i128; n];
        for (&j, c) in self.keep.iter().zip(&x) {
            let c = match &self.exponent {
                Some(e) => c.mod_floor(e),
                None => c.clone(),
            };
            let c = c.to_i128().expect("lift coefficient fits");
            for &(k, a) in self.z.rows[j].as_ref().unwrap() {
                acc[k] += c * a as i128;
            }
        }
        let moduli = self.module.cochain_moduli(self.degree);
        let values = acc
            .iter()
            .zip(&moduli)
            .map(|(&a, &d)| reduce_mod(a, d))
            .collect();
        Cochain {
            module: self.module.clone(),
            degree: self.degree,
            values,
        }
    }

    /// A cochain is a coboundary iff it is a cocycle with zero class.
    pub fn is_coboundary(&self, x: &Cochain) -> bool {
        self.coords(x)
            .map(|c| self.group().is_zero(&c))
            .unwrap_or(false)
    }

    pub fn same_class(&self, x: &Cochain, y: &Cochain) -> Result<bool, GcohError> {
        Ok(self.group().is_zero(&self.coords(&x.sub(y)?)?))
    }
}

/// A cocycle with its normal-form coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohClass {
    pub cochain: Cochain,
    pub coords: Elem,
}

/// `(x ∪ y)(g_1..g_{i+j}) = x(g_1..g_i) ⊗ (g_1 + .. + g_i)·y(g_{i+1}..g_{i+j})`.
pub fn cup(x: &Cochain, y: &Cochain) -> Result<Cochain, GcohError> {
    if x.module.order != y.module.order {
        return Err(GcohError::Mismatch);
    }
    let deg = x.degree + y.degree;
    if deg > MAX_DEGREE {
        return Err(GcohError::Degree(deg));
    }
    let target = x.module.tensor(&y.module)?;
    let n = x.module.order as usize;
    let (p, q) = (x.module.dim(), y.module.dim());
    let total = n.pow(deg as u32);
    let mut values = vec![0i64; total * p * q];
    let mut g = vec![0usize; deg];
    for t in 0..total {
        decode(t, n, &mut g);
        let (head, tail) = g.split_at(x.degree);
        let a = encode(head.iter().copied(), n);
        let b = encode(tail.iter().copied(), n);
        let shift: usize = head.iter().sum();
        let xv = &x.values[a * p..(a + 1) * p];
        let yv = y.module.act(shift as u64, &y.values[b * q..(b + 1) * q]);
        for s in 0..p {
            for u in 0..q {
                let idx = t * p * q + s * q + u;
                values[idx] = reduce_mod(xv[s] as i128 * yv[u] as i128, target.moduli[s * q + u]);
            }
        }
    }
    Ok(Cochain {
        module: target,
        degree: deg,
        values,
    })
}

/// Restriction to `<g^m>`: `(Res f)(u_1..u_i) = f(m u_1, .., m u_i)`.
pub fn res(x: &Cochain, m: u64) -> Result<Cochain, GcohError> {
    let sub = x.module.restrict(m)?;
    let n = x.module.order as usize;
    let k = sub.order as usize;
    let d = x.module.dim();
    let total = k.pow(x.degree as u32);
    let mut u = vec![0usize; x.degree];
    let mut values = Vec::with_capacity(total * d);
    for t in 0..total {
        decode(t, k, &mut u);
        let idx = encode(u.iter().map(|&v| (v * m as usize) % n), n);
        values.extend_from_slice(&x.values[idx * d..(idx + 1) * d]);
    }
    Ok(Cochain {
        module: sub,
        degree: x.degree,
        values,
    })
}

/// Corestriction from `<g^m>` to the group of `big`, with coset
/// representatives `g^t`, `0 <= t < m`:
/// `(Cor f)(g_1..g_i) = Σ_t g^{-t} f(h_1, .., h_i)` where `t_0 = t`,
/// `t_k = (t_{k-1} + g_k) mod m` and `h_k = t_{k-1} + g_k - t_k`.
pub fn cor(x: &Cochain, big: &GModule, m: u64) -> Result<Cochain, GcohError> {
    let sub = big.restrict(m)?;
    if sub != x.module {
        return Err(GcohError::Mismatch);
    }
    let n = big.order as usize;
    let k = sub.order as usize;
    let m = m as usize;
    let d = big.dim();
    let total = n.pow(x.degree as u32);
    let mut g = vec![0usize; x.degree];
    let mut values = vec![0i64; total * d];
    for t in 0..total {
        decode(t, n, &mut g);
        let mut acc = vec![0i128; d];
        for rep in 0..m {
            let mut cur = rep;
            let mut u = Vec::with_capacity(x.degree);
            for &gk in &g {
                let next = (cur + gk) % m;
                let h = (cur + gk - next) % n;
                u.push(h / m);
                cur = next;
            }
            let idx = encode(u.iter().map(|&v| v % k), k);
            let moved = big.act((n - rep % n) as u64, &x.values[idx * d..(idx + 1) * d]);
            for (a, v) in acc.iter_mut().zip(moved) {
                *a += v as i128;
            }
        }
        for (s, a) in acc.into_iter().enumerate() {
            values[t * d + s] = reduce_mod(a, big.moduli[s]);
        }
    }
    Ok(Cochain {
        module: big.clone(),
        degree: x.degree,
        values,
    })
}

/// The Kummer sequence `0 -> A[n] -> A(U) -> A(U)`, over the group `Z/N`.
#[derive(Clone, Debug)]
pub struct Kummer {
    n: u64,
    torsion: NTorsion,
    module: GModule,
    /// minimal-index `b` with `n b = a`
    division: Vec<Option<u32>>,
}

impl Kummer {
    /// Requires the full `n`-torsion to be rational over the universe.
    pub fn new(model: &PointModel, n: u64) -> Result<Self, GcohError> {
        if n == 0 {
            return Err(GcohError::Torsion {
                n,
                got: 0,
                expected: 0,
            });
        }
        let order = model.n();
        if order > MAX_ORDER {
            return Err(GcohError::Order(order));
        }
        let torsion = model.n_torsion(n, order)?;
        let rank = if model.is_elliptic() {
            2
        } else {
            model.universe_group().ngens() as u32
        };
        let expected = (n as u128).pow(rank);
        let got = torsion.points.len() as u128;
        if got != expected {
            return Err(GcohError::Torsion { n, got, expected });
        }
        let module = GModule::from_hom(order, &torsion.frob)?;
        let mut division = vec![None; model.size()];
        for b in 0..model.size() as u32 {
            let a = model.mul(n as i64, b) as usize;
            if division[a].is_none() {
                division[a] = Some(b);
            }
        }
        Ok(Kummer {
            n,
            torsion,
            module,
            division,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `A[n]` with the Frobenius action.
    pub fn module(&self) -> &GModule {
        &self.module
    }

    pub fn torsion(&self) -> &NTorsion {
        &self.torsion
    }

    pub fn division_point(&self, a: u32) -> Option<u32> {
        self.division[a as usize]
    }

    /// All `b` with `n b = a`.
    pub fn division_points(&self, model: &PointModel, a: u32) -> Vec<u32> {
        match self.division_point(a) {
            None => vec![],
            Some(b) => self
                .torsion
                .points
                .iter()
                .map(|&t| model.add(b, t))
                .collect(),
        }
    }

    /// `δ(a)` is represented over the finite quotient iff `a ∈ n A(U)`;
    /// then it is inflated from the Galois group of the universe.
    pub fn is_admissible(&self, a: u32) -> bool {
        self.division_point(a).is_some()
    }

    fn torsion_coords(&self, t: u32) -> Vec<i64> {
        self.torsion
            .basis
            .coords(t)
            .expect("difference of division points is n-torsion")
            .iter()
            .map(|&x| x as i64)
            .collect()
    }

    /// `u -> F^{m u}(b) - b` on `<g^m>`.
    pub fn delta_with(&self, model: &PointModel, m: u64, b: u32) -> Result<Cochain, GcohError> {
        let sub = self.module.restrict(m)?;
        let mut values = Vec::new();
        for u in 0..sub.order() {
            let moved = model.frob_pow(b, m * u);
            values.extend(self.torsion_coords(model.sub(moved, b)));
        }
        Ok(Cochain {
            module: sub,
            degree: 1,
            values,
        })
    }

    /// `δ(a)` over level `m`, using the minimal division point.
    pub fn delta(&self, model: &PointModel, a: u32, m: u64) -> Result<Cochain, GcohError> {
        if !model.is_at_level(a, m) {
            return Err(PointsError::NotAtLevel { point: a, level: m }.into());
        }
        let b = self.division_point(a).ok_or(GcohError::Division {
            point: a,
            n: self.n,
        })?;
        self.delta_with(model, m, b)
    }

    /// `A(m) ∩ n A(U)`, where the Kummer sequence over `<g^m>` is exact.
    pub fn domain(&self, model: &PointModel, m: u64) -> Vec<u32> {
        model
            .level_points(m)
            .into_iter()
            .filter(|&a| self.division_point(a).is_some())
            .collect()
    }

    /// `δ` on the whole domain at level `m`, with its exactness data.
    pub fn level_map(&self, model: &PointModel, m: u64) -> Result<KummerLevel, GcohError> {
        let h1 = Cohomology::new(&self.module.restrict(m)?, 1)?;
        let mut classes = Vec::new();
        for a in self.domain(model, m) {
            classes.push((a, h1.coords(&self.delta(model, a, m)?)?));
        }
        let multiples: std::collections::BTreeSet<u32> = model
            .level_points(m)
            .iter()
            .map(|&x| model.mul(self.n as i64, x))
            .collect();
        Ok(KummerLevel {
            level: m,
            h1,
            classes,
            multiples: multiples.into_iter().collect(),
        })
    }
}

/// `δ` at one level, tabulated on its domain.
#[derive(Clone, Debug)]
pub struct KummerLevel {
    pub level: u64,
    pub h1: Cohomology,
    /// `(a, coordinates of δ(a))` for every `a` in the domain
    pub classes: Vec<(u32, Elem)>,
    /// `n A(level)`
    pub multiples: Vec<u32>,
}

impl KummerLevel {
    pub fn kernel(&self) -> Vec<u32> {
        self.classes
            .iter()
            .filter(|(_, c)| self.h1.group().is_zero(c))
            .map(|&(a, _)| a)
            .collect()
    }

    /// `ker δ = n A(level)`.
    pub fn kernel_is_multiples(&self) -> bool {
        self.kernel() == self.multiples
    }

    pub fn image_size(&self) -> usize {
        self.classes
            .iter()
            .map(|(_, c)| c.clone())
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    }

    /// `|domain / n A(level)|`.
    pub fn quotient_size(&self) -> usize {
        self.classes.len() / self.multiples.len().max(1)
    }
}

/// `s_n` of a symbol expression over its base `B`: the class of
/// `Σ w · Cor_{E/B}(δ(a_1) ∪ .. ∪ δ(a_r))` in `H^r(<g^B>, A[n]^{⊗r})`.
pub fn somekawa_s(
    model: &PointModel,
    kummer: &Kummer,
    s: &SymbolExpr,
) -> Result<Cochain, GcohError> {
    let r = s.arity();
    if r == 0 || r > MAX_DEGREE {
        return Err(GcohError::Degree(r));
    }
    let base = s.base();
    let target = kummer.module.tensor_power(r)?.restrict(base)?;
    let mut acc = Cochain::zero(&target, r);
    for term in s.terms() {
        let mut c = kummer.delta(model, term.points[0], term.level)?;
        for &a in &term.points[1..] {
            c = cup(&c, &kummer.delta(model, a, term.level)?)?;
        }
        let pushed = cor(&c, &target, term.level / base)?;
        acc = acc.add(&pushed.scale(term.weight))?;
    }
    Ok(acc)
}

/// Every point of every term has a division point.
pub fn symbol_is_admissible(kummer: &Kummer, s: &SymbolExpr) -> bool {
    s.terms()
        .iter()
        .all(|t| t.points.iter().all(|&a| kummer.is_admissible(a)))
}

/// `A[n]^{⊗r} -> ∧^r A[n]` on cochains.
#[derive(Clone, Debug)]
pub struct WedgeDescent {
    pub r: usize,
    pub wedge: WedgePower,
    pub tensor_module: GModule,
    pub wedge_module: GModule,
}

impl WedgeDescent {
    pub fn new(kummer: &Kummer, r: usize, wedge1_is_m: bool) -> Result<Self, GcohError> {
        let base = kummer.module();
        let group = FgAbGroup::from_i64(base.moduli());
        let wedge = wedge_power(&group, r, wedge1_is_m);
        let tensor_module = base.tensor_power(r)?;
        let g = &wedge.group;
        let moduli = small(g.invariant_factors());
        let action = (0..g.ngens())
            .map(|i| {
                let raw = small(
                    &wedge
                        .tensor
                        .presentation
                        .lift(&wedge.projection.lift(&g.basis(i))),
                );
                small(&Self::project(&wedge, &tensor_module.act(1, &raw)))
            })
            .collect();
        let wedge_module = GModule::new(base.order(), moduli, action)?;
        Ok(WedgeDescent {
            r,
            wedge,
            tensor_module,
            wedge_module,
        })
    }

    fn project(wedge: &WedgePower, raw: &[i64]) -> Elem {
        wedge
            .projection
            .apply(&wedge.tensor.presentation.project(&big(raw)))
    }

    /// `p_∧` on one raw tensor.
    pub fn p_wedge(&self, raw: &[i64]) -> Vec<i64> {
        small(&Self::project(&self.wedge, raw))
    }

    /// Pushes a cochain with values in `A[n]^{⊗r}` (over any subgroup) forward along `p_∧`.
    pub fn descend(&self, x: &Cochain) -> Result<Cochain, GcohError> {
        if x.module.moduli() != self.tensor_module.moduli() {
            return Err(GcohError::Mismatch);
        }
        let m = self.tensor_module.order() / x.module.order();
        let target = self.wedge_module.restrict(m)?;
        Ok(x.map_values(&target, |v| self.p_wedge(v)))
    }

    /// `t_*`: swaps the first two tensor slots of every value.
    pub fn transpose(&self, x: &Cochain) -> Result<Cochain, GcohError> {
        if self.r < 2 || x.module.moduli() != self.tensor_module.moduli() {
            return Err(GcohError::Mismatch);
        }
        let mut perm: Vec<usize> = (0..self.r).collect();
        perm.swap(0, 1);
        let tp = &self.wedge.tensor;
        Ok(x.map_values(&x.module, |v| small(&tp.permute_raw(&big(v), &perm))))
    }
}

/// The cycle map `F^r -> H^r(Z/N, ∧^r A[n])`, `c -> p_∧ s_n(Φ_r(c))`.
#[derive(Clone, Debug)]
pub struct CycleClassMap<'l, 'a> {
    layer: &'l SymbolLayer<'a>,
    r: usize,
    kummer: Kummer,
    wedge: WedgeDescent,
    h: Cohomology,
}

impl<'l, 'a> CycleClassMap<'l, 'a> {
    pub fn new(
        layer: &'l SymbolLayer<'a>,
        n: u64,
        r: usize,
        wedge1_is_m: bool,
    ) -> Result<Self, GcohError> {
        if r == 0 || r > MAX_DEGREE || r > layer.r_max() {
            return Err(GcohError::Degree(r));
        }
        let kummer = Kummer::new(layer.model(), n)?;
        let wedge = WedgeDescent::new(&kummer, r, wedge1_is_m)?;
        let h = Cohomology::new(&wedge.wedge_module, r)?;
        Ok(CycleClassMap {
            layer,
            r,
            kummer,
            wedge,
            h,
        })
    }

    pub fn kummer(&self) -> &Kummer {
        &self.kummer
    }

    pub fn wedge(&self) -> &WedgeDescent {
        &self.wedge
    }

    pub fn cohomology(&self) -> &Cohomology {
        &self.h
    }

    /// Class of a cycle on admissible closed points, without the membership check.
    pub fn raw_class(&self, c: &Cycle) -> Result<Elem, GcohError> {
        let model = self.layer.model();
        let s = phi(model, c, self.r);
        let x = somekawa_s(model, &self.kummer, &s)?;
        self.h.coords(&self.wedge.descend(&x)?)
    }

    /// `cycle_class(c)` for `c ∈ F^r`.
    pub fn class(&self, c: &Cycle) -> Result<Elem, GcohError> {
        let model = self.layer.model();
        if !self
            .layer
            .f(self.r)?
            .contains(self.layer.quotient(), model, c)
            .map_err(SymbolsError::from)?
        {
            return Err(GcohError::Membership(self.r));
        }
        self.raw_class(c)
    }

    /// Closed points of level 1 on which the map is computable.
    pub fn admissible_orbits(&self) -> Vec<usize> {
        let basis = self.layer.orbit_basis();
        (0..basis.len())
            .filter(|&i| self.kummer.is_admissible(basis.rep(i)))
            .collect()
    }

    /// `p_∧ s_n({x,..,x}_{deg x})` for a closed point, by orbit index.
    pub fn orbit_class(&self, i: usize) -> Result<Elem, GcohError> {
        let basis = self.layer.orbit_basis();
        let mut v = vec![0i64; basis.len()];
        v[i] = 1;
        self.raw_class(&basis.cycle(&v))
    }
    /// Whether `scale · cycle_class` vanishes on `sub ∩ C_adm`, where `C_adm`
    /// is spanned by the admissible closed points. With `q: C_adm -> Q_S/sub`
    /// and `κ` the class map, this holds iff the image of `(q, scale·κ)` meets
    /// `0 + H` trivially.
    pub fn kills(
        &self,
        sub: &CycleSubgroup,
        scale: i64,
        orbit_classes: &[(usize, Elem)],
    ) -> Result<bool, GcohError> {
        let model = self.layer.model();
        let cq = self.layer.quotient();
        let (qg, proj) = quotient(cq.group(), &sub.image);
        let q_orbits = cq.q_orbits(model);
        let h = self.h.group();
        let split = qg.ngens();
        let moduli: Vec<BigInt> = qg
            .invariant_factors()
            .iter()
            .chain(h.invariant_factors())
            .cloned()
            .collect();
        let mut lattice = Lattice::new(moduli.clone());
        for (i, class) in orbit_classes {
            let mut v = proj.apply(&q_orbits[*i]);
            v.extend(class.iter().map(|c| c * scale));
            lattice.insert(&v);
        }
        Ok((split..moduli.len()).all(|j| match lattice.row(j) {
            Some(row) => row[j] == moduli[j] && row[j + 1..].iter().all(Zero::is_zero),
            None => false,
        }))
    }

    /// `orbit_class` on every admissible closed point.
    pub fn orbit_classes(&self) -> Result<Vec<(usize, Elem)>, GcohError> {
        self.admissible_orbits()
            .into_iter()
            .map(|i| Ok((i, self.orbit_class(i)?)))
            .collect()
    }
}
