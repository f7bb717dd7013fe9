//! First homology of finitely presented groups via exact integer Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::words::{Presentation, SeifertData};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("no Euler class in [{lo}, {hi}] matches the target")]
    NoSolution { lo: i64, hi: i64 },
    #[error("Euler class not unique in [{lo}, {hi}]: candidates {candidates:?}")]
    NotUnique { lo: i64, hi: i64, candidates: Vec<i64> },
    #[error("bad Seifert data: {0}")]
    BadSeifertData(String),
}

/// Dense integer matrix with exact entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = q * &self[(src, j)];
            self[(dst, j)] -= v;
        }
    }

    /// col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = q * &self[(i, src)];
            self[(i, dst)] -= v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// Finitely generated abelian group `Z^free_rank ⊕ ⊕ Z/d_i`, `d_1 | d_2 | ...`, `d_i ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianInvariants {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    pub fn new(torsion: &[i64], free_rank: usize) -> Self {
        AbelianInvariants { torsion: torsion.iter().map(|&d| BigInt::from(d)).collect(), free_rank }
    }

    pub fn trivial() -> Self {
        AbelianInvariants::new(&[], 0)
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Builds invariants from an arbitrary SNF-style diagonal by re-running SNF
    /// on `diag(d)`, so non-chained input is normalized.
    pub fn from_cyclic_orders(orders: &[i64], free_rank: usize) -> Self {
        let n = orders.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, &d) in orders.iter().enumerate() {
            m[(i, i)] = BigInt::from(d);
        }
        let (inv, _) = smith_normal_form(&m);
        AbelianInvariants { torsion: inv.torsion, free_rank: inv.free_rank + free_rank }
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

fn big_to_json<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

impl Serialize for AbelianInvariants {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Big<'a>(&'a BigInt);
        impl Serialize for Big<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                big_to_json(self.0, s)
            }
        }
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AbelianInvariants", 2)?;
        let torsion: Vec<Big> = self.torsion.iter().map(Big).collect();
        st.serialize_field("torsion", &torsion)?;
        st.serialize_field("free_rank", &self.free_rank)?;
        st.end()
    }
}

/// Smith normal form diagonal (length `min(rows, cols)`, nonnegative, each
/// entry dividing the next) and the invariants of the cokernel `Z^cols / rowspace`.
pub fn smith_normal_form(m: &IntMatrix) -> (AbelianInvariants, Vec<BigInt>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let n = rows.min(cols);
    for t in 0..n {
        // Pivot: smallest nonzero magnitude in the trailing block.
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = &a[(i, j)];
                    if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            a.swap_rows(t, pi);
            a.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                if !a[(i, t)].is_zero() {
                    let q = a[(i, t)].div_floor(&a[(t, t)]);
                    a.row_axpy(i, t, &q);
                    if !a[(i, t)].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[(t, j)].is_zero() {
                    let q = a[(t, j)].div_floor(&a[(t, t)]);
                    a.col_axpy(j, t, &q);
                    if !a[(t, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into row t and retry.
            let pivot = a[(t, t)].clone();
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    a.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
    }
    let diag: Vec<BigInt> = (0..n).map(|i| a[(i, i)].abs()).collect();
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    let torsion = diag.iter().filter(|d| **d > BigInt::one()).cloned().collect();
    (AbelianInvariants { torsion, free_rank: cols - nonzero }, diag)
}

/// Exponent-sum matrix: one row per relator, one column per generator.
/// Central defects do not enter.
pub fn abelianize(p: &Presentation) -> IntMatrix {
    let gens = p.generators();
    let mut m = IntMatrix::zeros(p.relators().len(), gens.len());
    for (i, r) in p.relators().iter().enumerate() {
        for l in r.word.letters() {
            let j = p.index_of(&l.generator).expect("validated presentation");
            m[(i, j)] += l.exponent as i64;
        }
    }
    m
}

pub fn h1(p: &Presentation) -> AbelianInvariants {
    smith_normal_form(&abelianize(p)).0
}

/// Search window and fiber data for [`solve_euler_class`].
#[derive(Debug, Clone)]
pub struct EulerSearch {
    pub lo: i64,
    pub hi: i64,
    /// Seifert `b_i`; `None` means `b_i = 1` for every fiber.
    pub b: Option<Vec<i64>>,
}

impl Default for EulerSearch {
    fn default() -> Self {
        EulerSearch { lo: -50, hi: 50, b: None }
    }
}

/// The unique integer `e` in the window with `H_1(S^2(a_1..a_n; e)) ≅ target`.
pub fn solve_euler_class(
    multiplicities: &[i64],
    target: &AbelianInvariants,
    search: &EulerSearch,
) -> Result<i64, AbelianError> {
    let b = search.b.clone().unwrap_or_else(|| vec![1; multiplicities.len()]);
    let mut candidates = Vec::new();
    for e in search.lo..=search.hi {
        let data = SeifertData::new(multiplicities.to_vec(), e, b.clone())
            .map_err(|err| AbelianError::BadSeifertData(err.to_string()))?;
        if &h1(&data.presentation()) == target {
            candidates.push(e);
        }
    }
    match candidates.as_slice() {
        [] => Err(AbelianError::NoSolution { lo: search.lo, hi: search.hi }),
        [e] => Ok(*e),
        _ => Err(AbelianError::NotUnique { lo: search.lo, hi: search.hi, candidates }),
    }
}
