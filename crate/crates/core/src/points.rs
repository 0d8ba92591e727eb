//! Point-group models over a tower: elliptic curves in short Weierstrass form
//! and mock finite abelian groups with a matrix Frobenius.
//!
//! Points are referred to by their index in the model's element table. For
//! elliptic curves index 0 is the point at infinity and the rest are sorted
//! by (x, y) field-element index; for mock groups the table lists coordinate
//! vectors lexicographically, so index 0 is again the neutral element.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::abgroup::{AbError, AbHom, Elem, FgAbGroup, Matrix, Subgroup};
use crate::tower::{divisors, is_prime, FastField, FieldTower, TowerError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PointsError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Group(#[from] AbError),
    #[error("curve is singular (4a^3 + 27b^2 = 0)")]
    Singular,
    #[error("characteristic {0} is not supported (need p > 3)")]
    SmallCharacteristic(u64),
    #[error("universe group has {size} elements, above the cap {cap}")]
    CapExceeded { size: u128, cap: u64 },
    #[error("mock universe group must be finite")]
    InfiniteUniverse,
    #[error("frobenius matrix is not an automorphism")]
    NotAutomorphism,
    #[error("frobenius order does not divide N = {0}")]
    FrobeniusOrder(u64),
    #[error("{d} is not a divisor of N = {n}")]
    NotALevel { d: u64, n: u64 },
    #[error("level {from} does not divide level {to}")]
    LevelOrder { from: u64, to: u64 },
    #[error("point P{point} is not defined at level {level}")]
    NotAtLevel { point: u32, level: u64 },
}

/// A point of the universe group together with its minimal level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub index: u32,
    pub level: u64,
}

#[derive(Clone, Debug)]
pub enum ModelKind {
    Elliptic {
        tower: FieldTower,
        a: i64,
        b: i64,
        xy: Vec<Option<(u32, u32)>>,
    },
    Mock {
        frob_matrix: Vec<Vec<i64>>,
    },
}

/// Fixed-point subgroup `A(level m)` with an explicit cyclic basis.
#[derive(Clone, Debug)]
pub struct LevelGroup {
    pub level: u64,
    pub group: FgAbGroup,
    /// orders of the basis points
    pub orders: Vec<u64>,
    /// point indices of the basis
    pub gens: Vec<u32>,
    /// all points of the level, in the coordinate order of `group.elements()`
    pub elements: Vec<u32>,
    coords: HashMap<u32, Vec<u64>>,
}

impl LevelGroup {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// Coordinates of a level point in the basis `gens`.
    pub fn coords(&self, point: u32) -> Option<&[u64]> {
        self.coords.get(&point).map(|v| v.as_slice())
    }

    pub fn contains(&self, point: u32) -> bool {
        self.coords.contains_key(&point)
    }
}

/// `A[n] ∩ A(level m)` with the Frobenius action.
#[derive(Clone, Debug)]
pub struct NTorsion {
    pub n: u64,
    pub level: u64,
    pub points: Vec<u32>,
    pub subgroup: Subgroup,
    pub basis: LevelGroup,
    /// Frobenius on the basis coordinates
    pub frob: AbHom,
}

#[derive(Clone, Debug)]
pub struct PointModel {
    n: u64,
    group: FgAbGroup,
    moduli: Vec<u64>,
    coords: Vec<Vec<u64>>,
    code_to_point: Vec<u32>,
    frob: Vec<u32>,
    frob_hom: AbHom,
    point_level: Vec<u64>,
    kind: ModelKind,
}

fn big_vec(v: &[u64]) -> Elem {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn small_vec(v: &[BigInt]) -> Vec<u64> {
    v.iter()
        .map(|x| x.to_u64().expect("coordinate fits in u64"))
        .collect()
}

impl PointModel {
    fn assemble(
        n: u64,
        moduli: Vec<u64>,
        coords: Vec<Vec<u64>>,
        frob: Vec<u32>,
        kind: ModelKind,
    ) -> Result<Self, PointsError> {
        let group = FgAbGroup::new(moduli.iter().map(|&d| BigInt::from(d)).collect())?;
        let size: usize = moduli.iter().product::<u64>() as usize;
        let mut code_to_point = vec![u32::MAX; size];
        for (i, c) in coords.iter().enumerate() {
            code_to_point[Self::code_with(&moduli, c)] = i as u32;
        }
        let point_level: Vec<u64> = (0..coords.len())
            .map(|i| {
                let mut j = frob[i];
                let mut k = 1;
                while j as usize != i {
                    j = frob[j as usize];
                    k += 1;
                }
                k
            })
            .collect();
        if point_level.iter().any(|&l| !n.is_multiple_of(l)) {
            return Err(PointsError::FrobeniusOrder(n));
        }
        let mut model = PointModel {
            n,
            group: group.clone(),
            moduli,
            coords,
            code_to_point,
            frob,
            frob_hom: AbHom::identity(group.clone()),
            point_level,
            kind,
        };
        let images: Vec<Elem> = (0..group.ngens())
            .map(|i| {
                let mut e = vec![0u64; group.ngens()];
                e[i] = 1;
                let p = model.point_of(&e);
                big_vec(&model.coords[model.frob[p as usize] as usize])
            })
            .collect();
        model.frob_hom = AbHom::from_images(group.clone(), group, &images)?;
        Ok(model)
    }

    fn code_with(moduli: &[u64], c: &[u64]) -> usize {
        c.iter()
            .zip(moduli)
            .fold(0usize, |acc, (&x, &d)| acc * d as usize + x as usize)
    }

    /// Mock model: a finite group in invariant-factor form with an explicit
    /// Frobenius matrix (columns are images of the basis vectors).
    pub fn build_mock(
        factors: &[u64],
        frob_matrix: Vec<Vec<i64>>,
        n: u64,
        cap: u64,
    ) -> Result<Self, PointsError> {
        if n == 0 {
            return Err(PointsError::FrobeniusOrder(0));
        }
        if factors.contains(&0) {
            return Err(PointsError::InfiniteUniverse);
        }
        let group = FgAbGroup::new(factors.iter().map(|&d| BigInt::from(d)).collect())?;
        let size: u128 = factors.iter().map(|&d| d as u128).product();
        if size > cap as u128 {
            return Err(PointsError::CapExceeded { size, cap });
        }
        let m = Matrix::from_i64(&frob_matrix);
        let m = if frob_matrix.is_empty() {
            Matrix::zeros(0, 0)
        } else {
            m
        };
        let hom = AbHom::new(group.clone(), group.clone(), m)?;
        if !hom.is_injective() {
            return Err(PointsError::NotAutomorphism);
        }
        let mut power = AbHom::identity(group.clone());
        for _ in 0..n {
            power = hom.compose(&power);
        }
        if power != AbHom::identity(group.clone()) {
            return Err(PointsError::FrobeniusOrder(n));
        }
        let coords: Vec<Vec<u64>> = group.elements().iter().map(|e| small_vec(e)).collect();
        let index: HashMap<Vec<u64>, u32> = coords
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u32))
            .collect();
        let frob = coords
            .iter()
            .map(|c| index[&small_vec(&hom.apply(&big_vec(c)))])
            .collect();
        Self::assemble(
            n,
            factors.to_vec(),
            coords,
            frob,
            ModelKind::Mock { frob_matrix },
        )
    }

    /// All points of `y^2 = x^3 + a x + b` over the universe field of `tower`,
    /// with `a, b` in the prime field.
    pub fn build_elliptic(tower: FieldTower, a: i64, b: i64) -> Result<Self, PointsError> {
        let p = tower.p();
        if p <= 3 || !is_prime(p) {
            return Err(PointsError::SmallCharacteristic(p));
        }
        let pi = p as i64;
        let disc = (4 * a.rem_euclid(pi).pow(3) + 27 * b.rem_euclid(pi).pow(2)).rem_euclid(pi);
        if disc == 0 {
            return Err(PointsError::Singular);
        }
        let ff = FastField::new(&tower);
        let curve = Curve {
            ff: &ff,
            a: ff.int(a),
        };
        let (fa, fb) = (ff.int(a), ff.int(b));
        let mut root = vec![u32::MAX; ff.size() as usize];
        for y in 0..ff.size() {
            let s = ff.mul(y, y) as usize;
            if root[s] == u32::MAX {
                root[s] = y;
            }
        }
        let mut xy: Vec<Option<(u32, u32)>> = vec![None];
        for x in 0..ff.size() {
            let rhs = ff.add(ff.add(ff.mul(ff.mul(x, x), x), ff.mul(fa, x)), fb);
            let y = root[rhs as usize];
            if y == u32::MAX {
                continue;
            }
            let (y1, y2) = (y.min(ff.neg(y)), y.max(ff.neg(y)));
            xy.push(Some((x, y1)));
            if y2 != y1 {
                xy.push(Some((x, y2)));
            }
        }
        let index: HashMap<Option<(u32, u32)>, u32> = xy
            .iter()
            .enumerate()
            .map(|(i, &pt)| (pt, i as u32))
            .collect();
        let (moduli, gens) = curve.structure(&xy);
        // coordinates by walking the lattice spanned by the basis
        let mut coords = vec![Vec::new(); xy.len()];
        match gens.as_slice() {
            [] => coords[0] = vec![],
            [pt] => {
                let mut r = None;
                for j in 0..moduli[0] {
                    coords[index[&r] as usize] = vec![j];
                    r = curve.add(r, *pt);
                }
            }
            [qt, pt] => {
                let mut row = None;
                for i in 0..moduli[0] {
                    let mut r = row;
                    for j in 0..moduli[1] {
                        coords[index[&r] as usize] = vec![i, j];
                        r = curve.add(r, *pt);
                    }
                    row = curve.add(row, *qt);
                }
            }
            _ => unreachable!("elliptic groups have at most two invariant factors"),
        }
        let frob = xy
            .iter()
            .map(|pt| index[&pt.map(|(x, y)| (ff.frobenius(x), ff.frobenius(y)))])
            .collect();
        let kind = ModelKind::Elliptic {
            tower: tower.clone(),
            a,
            b,
            xy,
        };
        Self::assemble(tower.n(), moduli, coords, frob, kind)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self.kind, ModelKind::Elliptic { .. })
    }

    /// Universe exponent `N`.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn levels(&self) -> Vec<u64> {
        divisors(self.n)
    }

    pub fn check_level(&self, d: u64) -> Result<(), PointsError> {
        if d == 0 || !self.n.is_multiple_of(d) {
            Err(PointsError::NotALevel { d, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn universe_group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn size(&self) -> usize {
        self.coords.len()
    }

    pub fn zero(&self) -> u32 {
        self.code_to_point[0]
    }

    pub fn coords(&self, a: u32) -> &[u64] {
        &self.coords[a as usize]
    }

    pub fn coords_big(&self, a: u32) -> Elem {
        big_vec(&self.coords[a as usize])
    }

    pub fn point_of(&self, c: &[u64]) -> u32 {
        self.code_to_point[Self::code_with(&self.moduli, c)]
    }

    pub fn point_of_big(&self, c: &[BigInt]) -> u32 {
        let red = self.group.reduced(c.to_vec());
        self.point_of(&small_vec(&red))
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (&self.coords[a as usize], &self.coords[b as usize]);
        let mut code = 0usize;
        for ((u, v), d) in x.iter().zip(y).zip(&self.moduli) {
            code = code * *d as usize + ((u + v) % d) as usize;
        }
        self.code_to_point[code]
    }

    pub fn neg(&self, a: u32) -> u32 {
        let c: Vec<u64> = self.coords[a as usize]
            .iter()
            .zip(&self.moduli)
            .map(|(x, d)| (d - x) % d)
            .collect();
        self.point_of(&c)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, k: i64, a: u32) -> u32 {
        let c: Vec<u64> = self.coords[a as usize]
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &d)| ((x as i128 * k as i128).rem_euclid(d as i128)) as u64)
            .collect();
        self.point_of(&c)
    }

    pub fn frob(&self, a: u32) -> u32 {
        self.frob[a as usize]
    }

    pub fn frob_pow(&self, a: u32, k: u64) -> u32 {
        let mut x = a;
        for _ in 0..k % self.n {
            x = self.frob[x as usize];
        }
        x
    }

    pub fn frob_hom(&self) -> &AbHom {
        &self.frob_hom
    }

    /// Minimal level of a point (its Frobenius orbit length).
    pub fn level_of(&self, a: u32) -> u64 {
        self.point_level[a as usize]
    }

    pub fn point(&self, index: u32) -> Point {
        Point {
            index,
            level: self.level_of(index),
        }
    }

    pub fn is_at_level(&self, a: u32, m: u64) -> bool {
        m.is_multiple_of(self.level_of(a))
    }

    /// Points of `A(level m)`, in table order.
    pub fn level_points(&self, m: u64) -> Vec<u32> {
        (0..self.size() as u32)
            .filter(|&a| self.is_at_level(a, m))
            .collect()
    }

    fn check_pair(&self, small: u64, big: u64) -> Result<(), PointsError> {
        self.check_level(small)?;
        self.check_level(big)?;
        if !big.is_multiple_of(small) {
            return Err(PointsError::LevelOrder {
                from: small,
                to: big,
            });
        }
        Ok(())
    }

    /// Galois trace `Σ_{i < L/E} F^{E i}(a)` for `a` at level `L`.
    pub fn trace(&self, a: Point, from: u64, to: u64) -> Result<Point, PointsError> {
        self.check_pair(to, from)?;
        if !self.is_at_level(a.index, from) {
            return Err(PointsError::NotAtLevel {
                point: a.index,
                level: from,
            });
        }
        Ok(self.point(self.trace_index(a.index, from, to)))
    }

    pub fn trace_index(&self, a: u32, from: u64, to: u64) -> u32 {
        let mut acc = self.zero();
        let mut x = a;
        for _ in 0..from / to {
            acc = self.add(acc, x);
            x = self.frob_pow(x, to);
        }
        acc
    }

    /// Inclusion `A(E) ⊆ A(L)`.
    pub fn restrict(&self, a: Point, from: u64, to: u64) -> Result<Point, PointsError> {
        self.check_pair(from, to)?;
        if !self.is_at_level(a.index, from) {
            return Err(PointsError::NotAtLevel {
                point: a.index,
                level: from,
            });
        }
        Ok(self.point(a.index))
    }

    /// `A(level m) = ker(F^m - 1)` as a subgroup of the universe group.
    pub fn level_subgroup(&self, m: u64) -> Subgroup {
        let gens: Vec<Elem> = self
            .level_points(m)
            .iter()
            .map(|&a| self.coords_big(a))
            .collect();
        Subgroup::new(self.group.clone(), &gens)
    }

    fn basis_of(&self, sub: &Subgroup, level: u64) -> LevelGroup {
        let (group, basis) = sub.basis();
        let gens: Vec<u32> = basis.iter().map(|b| self.point_of_big(b)).collect();
        let orders: Vec<u64> = group
            .invariant_factors()
            .iter()
            .map(|d| d.to_u64().unwrap())
            .collect();
        let mut elements = vec![self.zero()];
        let mut coords = vec![vec![]];
        for (&g, &d) in gens.iter().zip(&orders) {
            let mut next = Vec::with_capacity(elements.len() * d as usize);
            let mut next_coords = Vec::with_capacity(elements.len() * d as usize);
            for (e, c) in elements.iter().zip(&coords) {
                let mut x = *e;
                for k in 0..d {
                    next.push(x);
                    let mut cc: Vec<u64> = c.clone();
                    cc.push(k);
                    next_coords.push(cc);
                    x = self.add(x, g);
                }
            }
            elements = next;
            coords = next_coords;
        }
        let coords = elements.iter().copied().zip(coords).collect();
        LevelGroup {
            level,
            group,
            orders,
            gens,
            elements,
            coords,
        }
    }

    /// `A(level m)` with an explicit basis.
    pub fn level_group(&self, m: u64) -> LevelGroup {
        self.basis_of(&self.level_subgroup(m), m)
    }

    /// `A[n]` inside `A(level m)`, with the restricted Frobenius.
    pub fn n_torsion(&self, n: u64, m: u64) -> Result<NTorsion, PointsError> {
        self.check_level(m)?;
        let points: Vec<u32> = self
            .level_points(m)
            .into_iter()
            .filter(|&a| self.mul(n as i64, a) == self.zero())
            .collect();
        let gens: Vec<Elem> = points.iter().map(|&a| self.coords_big(a)).collect();
        let subgroup = Subgroup::new(self.group.clone(), &gens);
        let basis = self.basis_of(&subgroup, m);
        let images: Vec<Elem> = basis
            .gens
            .iter()
            .map(|&g| {
                big_vec(
                    basis
                        .coords(self.frob(g))
                        .expect("frobenius preserves n-torsion"),
                )
            })
            .collect();
        let frob = AbHom::from_images(basis.group.clone(), basis.group.clone(), &images)?;
        Ok(NTorsion {
            n,
            level: m,
            points,
            subgroup,
            basis,
            frob,
        })
    }

    /// Human-readable coordinates of a point.
    pub fn describe(&self, a: u32) -> String {
        match &self.kind {
            ModelKind::Elliptic { tower, xy, .. } => match xy[a as usize] {
                None => "O".to_string(),
                Some((x, y)) => {
                    format!("({}, {})", field_string(tower, x), field_string(tower, y))
                }
            },
            ModelKind::Mock { .. } => {
                let c: Vec<String> = self.coords(a).iter().map(|x| x.to_string()).collect();
                format!("({})", c.join(", "))
            }
        }
    }

    /// Element table listing: index, coordinates, level.
    pub fn dump_table(&self) -> String {
        let mut out = String::new();
        for a in 0..self.size() as u32 {
            let g: Vec<String> = self.coords(a).iter().map(|x| x.to_string()).collect();
            writeln!(
                out,
                "P{a}\t{}\t[{}]\tlevel {}",
                self.describe(a),
                g.join(","),
                self.level_of(a)
            )
            .unwrap();
        }
        out
    }
}

fn field_string(tower: &FieldTower, idx: u32) -> String {
    let e = tower.from_index(idx as u64);
    let terms: Vec<String> = e
        .coeffs()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => "t".to_string(),
            (1, c) => format!("{c}t"),
            (i, 1) => format!("t^{i}"),
            (i, c) => format!("{c}t^{i}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

type Affine = Option<(u32, u32)>;

struct Curve<'a> {
    ff: &'a FastField,
    a: u32,
}

impl Curve<'_> {
    fn add(&self, p: Affine, q: Affine) -> Affine {
        let f = self.ff;
        let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
            return p.or(q);
        };
        let lambda = if x1 != x2 {
            f.mul(f.sub(y2, y1), f.inv(f.sub(x2, x1)))
        } else if y1 == f.neg(y2) {
            return None;
        } else {
            let num = f.add(f.mul(f.int(3), f.mul(x1, x1)), self.a);
            f.mul(num, f.inv(f.add(y1, y1)))
        };
        let x3 = f.sub(f.sub(f.mul(lambda, lambda), x1), x2);
        let y3 = f.sub(f.mul(lambda, f.sub(x1, x3)), y1);
        Some((x3, y3))
    }

    fn neg(&self, p: Affine) -> Affine {
        p.map(|(x, y)| (x, self.ff.neg(y)))
    }

    fn mul(&self, k: u64, p: Affine) -> Affine {
        let (mut acc, mut base, mut k) = (None, p, k);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    fn order(&self, p: Affine, n: u64, primes: &[u64]) -> u64 {
        let mut ord = n;
        for &l in primes {
            while ord.is_multiple_of(l) && self.mul(ord / l, p).is_none() {
                ord /= l;
            }
        }
        ord
    }

    /// Invariant factors `(d1, d2)` of the point group and a basis realizing
    /// them (`d1` first; factors equal to 1 dropped).
    fn structure(&self, pts: &[Affine]) -> (Vec<u64>, Vec<Affine>) {
        let n = pts.len() as u64;
        let primes: Vec<u64> = divisors(n).into_iter().filter(|&d| is_prime(d)).collect();
        let (mut best, mut best_ord) = (None, 1u64);
        for &x in pts {
            if self.mul(best_ord, x).is_none() {
                continue;
            }
            let o = self.order(x, n, &primes);
            // combine into an element of order lcm(best_ord, o)
            let (mut keep_a, mut keep_b) = (1u64, 1u64);
            for &l in &primes {
                let (va, vb) = (valuation(best_ord, l), valuation(o, l));
                if va >= vb {
                    keep_a *= l.pow(va);
                } else {
                    keep_b *= l.pow(vb);
                }
            }
            best = self.add(self.mul(best_ord / keep_a, best), self.mul(o / keep_b, x));
            best_ord = keep_a * keep_b;
        }
        let e = best_ord;
        let d1 = n / e;
        if e == 1 {
            return (vec![], vec![]);
        }
        if d1 == 1 {
            return (vec![e], vec![best]);
        }
        let mut dlog: HashMap<Affine, u64> = HashMap::new();
        let mut r = None;
        for k in 0..e {
            dlog.insert(r, k);
            r = self.add(r, best);
        }
        let d1_primes: Vec<u64> = primes
            .iter()
            .copied()
            .filter(|l| d1.is_multiple_of(*l))
            .collect();
        for &x in pts {
            if d1_primes
                .iter()
                .any(|&l| dlog.contains_key(&self.mul(d1 / l, x)))
            {
                continue;
            }
            let t = dlog[&self.mul(d1, x)];
            debug_assert_eq!(t % d1, 0);
            let q = self.add(x, self.neg(self.mul(t / d1, best)));
            return (vec![d1, e], vec![q, best]);
        }
        unreachable!("a complement generator exists")
    }
}

fn valuation(mut x: u64, l: u64) -> u32 {
    let mut v = 0;
    while x.is_multiple_of(l) {
        x /= l;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::DEFAULT_UNIVERSE_CAP;

    fn elliptic(n: u64) -> PointModel {
        let t = FieldTower::new(5, 1, n, DEFAULT_UNIVERSE_CAP, 0).unwrap();
        PointModel::build_elliptic(t, 1, 1).unwrap()
    }

    fn swap() -> PointModel {
        PointModel::build_mock(&[3, 3], vec![vec![0, 1], vec![1, 0]], 2, 1 << 20).unwrap()
    }

    #[test]
    fn nine_points_over_f5() {
        let m = elliptic(1);
        assert_eq!(m.size(), 9);
        assert_eq!(m.moduli(), &[9]);
        assert_eq!(m.level_of(m.zero()), 1);
    }

    #[test]
    fn elliptic_counts_over_the_tower() {
        let m = elliptic(6);
        let counts: Vec<usize> = m
            .levels()
            .iter()
            .map(|&d| m.level_points(d).len())
            .collect();
        assert_eq!(counts, vec![9, 27, 108, 15552]);
        for d in m.levels() {
            assert_eq!(counts[0] as u64 % 9, 0);
            assert_eq!(m.level_points(d).len() % counts[0], 0);
        }
        let prod: u64 = m.moduli().iter().product();
        assert_eq!(prod, 15552);
        assert_eq!(m.moduli()[1] % m.moduli()[0], 0);
    }

    #[test]
    fn table_points_lie_on_the_curve() {
        let m = elliptic(2);
        let ModelKind::Elliptic { tower, xy, .. } = m.kind() else {
            panic!()
        };
        for pt in xy.iter().flatten() {
            let (x, y) = (tower.from_index(pt.0 as u64), tower.from_index(pt.1 as u64));
            let rhs = tower.add(&tower.add(&tower.pow(&x, 3), &x), &tower.one());
            assert_eq!(tower.mul(&y, &y), rhs);
        }
    }

    #[test]
    fn table_group_law_matches_curve_law() {
        let m = elliptic(2);
        let ModelKind::Elliptic { tower, xy, .. } = m.kind() else {
            panic!()
        };
        let ff = FastField::new(tower);
        let curve = Curve { ff: &ff, a: 1 };
        let idx: HashMap<Affine, u32> =
            xy.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        for i in (0..m.size() as u32).step_by(3) {
            for j in (0..m.size() as u32).step_by(5) {
                let s = curve.add(xy[i as usize], xy[j as usize]);
                assert_eq!(idx[&s], m.add(i, j));
                for k in (0..m.size() as u32).step_by(7) {
                    let l = curve.add(curve.add(xy[i as usize], xy[j as usize]), xy[k as usize]);
                    let r = curve.add(xy[i as usize], curve.add(xy[j as usize], xy[k as usize]));
                    assert_eq!(l, r);
                }
            }
        }
    }

    #[test]
    fn frobenius_respects_the_group_law() {
        let m = elliptic(3);
        for i in 0..m.size() as u32 {
            let j = (i * 7 + 3) % m.size() as u32;
            assert_eq!(m.frob(m.add(i, j)), m.add(m.frob(i), m.frob(j)));
            assert_eq!(m.frob_pow(i, 3), i);
        }
    }

    #[test]
    fn mock_examples() {
        let triv = PointModel::build_mock(&[2], vec![vec![1]], 1, 100).unwrap();
        assert!((0..2).all(|a| triv.level_of(a) == 1));
        let s = swap();
        let l1 = s.level_points(1);
        assert_eq!(l1.len(), 3);
        assert!(l1.iter().all(|&a| s.coords(a)[0] == s.coords(a)[1]));
        let z5 = PointModel::build_mock(&[5], vec![vec![2]], 4, 100).unwrap();
        assert_eq!(z5.level_points(1), vec![z5.zero()]);
        assert!(PointModel::build_mock(&[5], vec![vec![2]], 2, 100).is_err());
        assert!(PointModel::build_mock(&[4], vec![vec![2]], 1, 100).is_err());
    }

    #[test]
    fn swap_trace() {
        let s = swap();
        let a = s.point(s.point_of(&[1, 0]));
        assert_eq!(a.level, 2);
        let t = s.trace(a, 2, 1).unwrap();
        assert_eq!(s.coords(t.index), &[1, 1]);
    }

    #[test]
    fn trace_of_restriction_is_multiplication() {
        for m in [elliptic(2), swap()] {
            for e in m.levels() {
                for l in m.levels().into_iter().filter(|l| l % e == 0) {
                    for a in m.level_points(e) {
                        let r = m.restrict(m.point(a), e, l).unwrap();
                        assert_eq!(r.level, m.level_of(a));
                        let t = m.trace(r, l, e).unwrap();
                        assert_eq!(t.index, m.mul((l / e) as i64, a));
                        assert!(m.is_at_level(t.index, e));
                    }
                }
            }
        }
        let m = swap();
        assert!(m.trace(m.point(m.point_of(&[1, 0])), 1, 1).is_err());
        assert!(m.restrict(m.point(0), 2, 1).is_err());
    }

    #[test]
    fn level_groups_nest() {
        let m = elliptic(6);
        for e in m.levels() {
            let g = m.level_group(e);
            assert_eq!(g.size(), m.level_points(e).len());
            for l in m.levels().into_iter().filter(|l| l % e == 0) {
                assert!(m.level_subgroup(e).is_subgroup_of(&m.level_subgroup(l)));
            }
        }
        assert_eq!(m.level_group(1).orders, vec![9]);
    }

    #[test]
    fn torsion_examples() {
        let m = elliptic(6);
        let t1 = m.n_torsion(1, 6).unwrap();
        assert_eq!(t1.points.len(), 1);
        let t2 = m.n_torsion(2, 6).unwrap();
        assert_eq!(t2.basis.orders, vec![2, 2]);
        let t3 = m.n_torsion(3, 6).unwrap();
        assert_eq!(t3.basis.orders, vec![3, 3]);
        let all = m.n_torsion(15552, 6).unwrap();
        assert_eq!(all.points.len(), 15552);
    }

    #[test]
    fn dump_lists_every_point() {
        let m = elliptic(1);
        let d = m.dump_table();
        assert_eq!(d.lines().count(), 9);
        assert!(d.starts_with("P0\tO\t"));
    }
}
