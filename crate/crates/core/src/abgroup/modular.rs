//! Echelon lattices inside a finite ambient `Z/d_1 + ... + Z/d_n`, with
//! native-integer arithmetic.
//!
//! A lattice is stored as its Hermite basis in `Z^n` *including* the
//! relation vectors `d_j e_j`, so every column always owns a pivot row and
//! every entry of column `k` stays in `[0, d_k)`.

use num_integer::Integer;

/// Sublattice of `Z^n` containing `d_1 Z + ... + d_n Z`, i.e. a subgroup of a
/// finite abelian group given by its cyclic decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModLattice {
    moduli: Vec<i64>,
    rows: Vec<Vec<i64>>,
}

fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

impl ModLattice {
    /// The zero subgroup of `Z/moduli[0] + ...`. Every modulus must be positive.
    pub fn new(moduli: Vec<i64>) -> Self {
        assert!(
            moduli.iter().all(|&d| d > 0),
            "ModLattice needs a finite ambient"
        );
        let n = moduli.len();
        let rows = (0..n)
            .map(|j| {
                let mut r = vec![0i64; n];
                r[j] = moduli[j];
                r
            })
            .collect();
        ModLattice { moduli, rows }
    }

    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    fn normalize(&self, v: &mut [i64]) {
        for (x, &d) in v.iter_mut().zip(&self.moduli) {
            *x = x.rem_euclid(d);
        }
    }

    /// Adds a generator; returns whether the subgroup grew.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        assert_eq!(v.len(), self.dim());
        let n = self.dim();
        let mut v: Vec<i64> = v.to_vec();
        self.normalize(&mut v);
        let mut grew = false;
        for j in 0..n {
            if v[j] == 0 {
                continue;
            }
            let p = self.rows[j][j] as i128;
            let vj = v[j] as i128;
            if vj % p == 0 {
                let q = vj / p;
                let row = &self.rows[j];
                for k in j..n {
                    let d = self.moduli[k] as i128;
                    v[k] = ((v[k] as i128 - q * row[k] as i128).rem_euclid(d)) as i64;
                }
                continue;
            }
            grew = true;
            let (g, s, t) = xgcd(p, vj);
            let (a, b) = (p / g, vj / g);
            let row = std::mem::take(&mut self.rows[j]);
            let mut new_row = vec![0i64; n];
            for k in j..n {
                let d = self.moduli[k] as i128;
                let (r, x) = (row[k] as i128, v[k] as i128);
                new_row[k] = ((s * r + t * x).rem_euclid(d)) as i64;
                v[k] = ((a * x - b * r).rem_euclid(d)) as i64;
            }
            self.rows[j] = new_row;
        }
        grew
    }

    /// Canonical representative of the coset `v + L`.
    pub fn reduce(&self, v: &mut [i64]) {
        assert_eq!(v.len(), self.dim());
        self.normalize(v);
        let n = self.dim();
        for j in 0..n {
            let p = self.rows[j][j];
            let q = v[j].div_euclid(p);
            if q == 0 {
                continue;
            }
            let row = &self.rows[j];
            for k in j..n {
                let d = self.moduli[k] as i128;
                v[k] = ((v[k] as i128 - q as i128 * row[k] as i128).rem_euclid(d)) as i64;
            }
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Brings the basis to reduced Hermite form, which is unique for the subgroup.
    pub fn canonicalize(&mut self) {
        let n = self.dim();
        for j in (0..n).rev() {
            for k in j + 1..n {
                let p = self.rows[k][k];
                let q = self.rows[j][k].div_euclid(p);
                if q == 0 {
                    continue;
                }
                let (head, tail) = self.rows.split_at_mut(k);
                let rk = &tail[0];
                let rj = &mut head[j];
                for c in k..n {
                    let d = self.moduli[c] as i128;
                    rj[c] = ((rj[c] as i128 - q as i128 * rk[c] as i128).rem_euclid(d)) as i64;
                }
            }
        }
    }

    /// Pivot of column `j`; divides the modulus of that column.
    pub fn pivot(&self, j: usize) -> i64 {
        self.rows[j][j]
    }

    pub fn row(&self, j: usize) -> &[i64] {
        &self.rows[j]
    }

    /// Basis rows that are not pure relation vectors; together with the
    /// relations they generate the subgroup.
    pub fn generators(&self) -> Vec<Vec<i64>> {
        (0..self.dim())
            .filter(|&j| {
                self.rows[j][j] != self.moduli[j] || self.rows[j][j + 1..].iter().any(|&x| x != 0)
            })
            .map(|j| self.rows[j].clone())
            .collect()
    }

    /// log of the subgroup order is awkward in native ints; the order as `u128`
    /// is returned when it fits.
    pub fn order(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for j in 0..self.dim() {
            let f = (self.moduli[j] / self.rows[j][j]) as u128;
            acc = acc.checked_mul(f)?;
        }
        Some(acc)
    }

    /// Index of the subgroup in the ambient, when it fits.
    pub fn index(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for j in 0..self.dim() {
            acc = acc.checked_mul(self.rows[j][j] as u128)?;
        }
        Some(acc)
    }

    pub fn is_subgroup_of(&self, other: &ModLattice) -> bool {
        self.generators().iter().all(|g| other.contains(g))
    }
}

/// Kernel of the homomorphism `Z/d (source) -> Z/t (target)` whose image of
/// the `i`-th source generator is `images[i]`.
///
/// Returns kernel generators in source coordinates.
pub fn kernel_of_map(source: &[i64], target: &[i64], images: &[Vec<i64>]) -> ModLattice {
    let (s, t) = (source.len(), target.len());
    assert_eq!(images.len(), s);
    let mut moduli = target.to_vec();
    moduli.extend_from_slice(source);
    let mut big = ModLattice::new(moduli);
    for (i, img) in images.iter().enumerate() {
        assert_eq!(img.len(), t);
        let mut v = img.clone();
        v.extend(std::iter::repeat_n(0, s));
        v[t + i] = 1;
        big.insert(&v);
    }
    let mut kernel = ModLattice::new(source.to_vec());
    for j in t..t + s {
        let row = big.row(j);
        if row[j] != source[j - t] || row[j + 1..].iter().any(|&x| x != 0) {
            kernel.insert(&row[t..]);
        }
    }
    kernel.canonicalize();
    kernel
}
