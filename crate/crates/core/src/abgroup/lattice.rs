//! Echelon lattices over `Z` inside `Z/d_1 + ... + Z/d_n`, where `d_j = 0`
//! marks a free coordinate.
//!
//! This is the arbitrary-precision sibling of [`super::modular::ModLattice`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    moduli: Vec<BigInt>,
    rows: Vec<Option<Vec<BigInt>>>,
}

fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

fn reduce_entry(x: &mut BigInt, d: &BigInt) {
    if !d.is_zero() {
        *x = x.mod_floor(d);
    }
}

impl Lattice {
    /// The zero subgroup.
    pub fn new(moduli: Vec<BigInt>) -> Self {
        assert!(moduli.iter().all(|d| !d.is_negative()));
        let n = moduli.len();
        let rows = (0..n)
            .map(|j| {
                if moduli[j].is_zero() {
                    None
                } else {
                    let mut r = vec![BigInt::zero(); n];
                    r[j] = moduli[j].clone();
                    Some(r)
                }
            })
            .collect();
        Lattice { moduli, rows }
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    fn normalize(&self, v: &mut [BigInt]) {
        for (x, d) in v.iter_mut().zip(&self.moduli) {
            reduce_entry(x, d);
        }
    }

    /// Adds a generator; returns whether the lattice grew.
    pub fn insert(&mut self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.dim());
        let n = self.dim();
        let mut v = v.to_vec();
        self.normalize(&mut v);
        let mut grew = false;
        for j in 0..n {
            if v[j].is_zero() {
                continue;
            }
            let Some(row) = self.rows[j].take() else {
                if v[j].is_negative() {
                    for x in v[j..].iter_mut() {
                        *x = -std::mem::take(x);
                    }
                    self.normalize(&mut v);
                }
                self.rows[j] = Some(v);
                return true;
            };
            let p = row[j].clone();
            if v[j].is_multiple_of(&p) {
                let q = &v[j] / &p;
                for k in j..n {
                    v[k] -= &q * &row[k];
                    reduce_entry(&mut v[k], &self.moduli[k]);
                }
                self.rows[j] = Some(row);
                continue;
            }
            let (g, s, t) = xgcd(&p, &v[j]);
            let (a, b) = (&p / &g, &v[j] / &g);
            let mut new_row = vec![BigInt::zero(); n];
            for k in j..n {
                let x = std::mem::take(&mut v[k]);
                new_row[k] = &s * &row[k] + &t * &x;
                v[k] = &a * &x - &b * &row[k];
                reduce_entry(&mut new_row[k], &self.moduli[k]);
                reduce_entry(&mut v[k], &self.moduli[k]);
            }
            self.rows[j] = Some(new_row);
            grew = true;
        }
        grew
    }

    /// Canonical representative of `v` modulo the lattice.
    pub fn reduce(&self, v: &mut [BigInt]) {
        assert_eq!(v.len(), self.dim());
        self.normalize(v);
        for j in 0..self.dim() {
            let Some(row) = &self.rows[j] else { continue };
            let q = v[j].div_floor(&row[j]);
            if q.is_zero() {
                continue;
            }
            for k in j..self.dim() {
                v[k] -= &q * &row[k];
                reduce_entry(&mut v[k], &self.moduli[k]);
            }
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Zero::is_zero)
    }

    /// Reduced Hermite form; unique for the lattice.
    pub fn canonicalize(&mut self) {
        let n = self.dim();
        for j in (0..n).rev() {
            if self.rows[j].is_none() {
                continue;
            }
            for k in j + 1..n {
                let Some(rk) = self.rows[k].clone() else {
                    continue;
                };
                let rj = self.rows[j].as_mut().unwrap();
                let q = rj[k].div_floor(&rk[k]);
                if q.is_zero() {
                    continue;
                }
                for c in k..n {
                    rj[c] -= &q * &rk[c];
                    reduce_entry(&mut rj[c], &self.moduli[c]);
                }
            }
        }
    }

    pub fn row(&self, j: usize) -> Option<&[BigInt]> {
        self.rows[j].as_deref()
    }

    /// Rows that are not bare relation vectors.
    pub fn generators(&self) -> Vec<Vec<BigInt>> {
        (0..self.dim())
            .filter_map(|j| {
                let row = self.rows[j].as_ref()?;
                let bare = row[j] == self.moduli[j] && row[j + 1..].iter().all(Zero::is_zero);
                (!bare).then(|| row.clone())
            })
            .collect()
    }

    /// Rank of the free part of the ambient modulo the lattice, i.e. number of
    /// pivot-free columns.
    pub fn corank(&self) -> usize {
        self.rows.iter().filter(|r| r.is_none()).count()
    }

    /// Order of the subgroup, if finite.
    pub fn order(&self) -> Option<BigInt> {
        let mut acc = BigInt::one();
        for (j, d) in self.moduli.iter().enumerate() {
            match &self.rows[j] {
                Some(row) if !d.is_zero() => acc *= d / &row[j],
                None => {}
                Some(_) => return None,
            }
        }
        Some(acc)
    }

    /// Index in the ambient, if finite.
    pub fn index(&self) -> Option<BigInt> {
        let mut acc = BigInt::one();
        for (j, row) in self.rows.iter().enumerate() {
            acc *= &row.as_ref()?[j];
        }
        Some(acc)
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.generators().iter().all(|g| other.contains(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn free_lattice_membership() {
        let mut l = Lattice::new(v(&[0, 0]));
        l.insert(&v(&[2, 4]));
        l.insert(&v(&[0, 6]));
        assert!(l.contains(&v(&[2, -2])));
        assert!(!l.contains(&v(&[1, 0])));
        assert_eq!(l.index(), Some(BigInt::from(12)));
    }

    #[test]
    fn mixed_ambient() {
        let mut l = Lattice::new(v(&[4, 0]));
        l.insert(&v(&[1, 3]));
        assert!(l.contains(&v(&[0, 12])));
        assert!(!l.contains(&v(&[0, 3])));
        assert_eq!(l.order(), None);
        let mut a = l.clone();
        let mut b = Lattice::new(v(&[4, 0]));
        b.insert(&v(&[5, 15]));
        b.insert(&v(&[0, 12]));
        a.canonicalize();
        b.canonicalize();
        assert_eq!(a, b);
    }

    #[test]
    fn negative_pivot_normalized() {
        let mut l = Lattice::new(v(&[0]));
        l.insert(&v(&[-3]));
        l.canonicalize();
        assert_eq!(l.row(0).unwrap(), &v(&[3])[..]);
    }
}
