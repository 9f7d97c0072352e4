//! Brute-force oracle: enumeration of alternating sign matrices, the
//! bijection to six-vertex arrow configurations, and the exact weight
//! polynomial of the partition function with domain wall boundary
//! conditions.
//!
//! Arrow states are reconstructed from partial sums: the horizontal edge
//! left of cell (i, j) carries the row partial sum through column j-1
//! (0 or 1), the vertical edge above carries the column partial sum
//! through row i-1. Entry -1 is vertex type 1, +1 is type 2; the four
//! 0-entry states split into the a-pair {(0,0), (1,1)} (types 3, 4) and
//! the b-pair {(0,1), (1,0)} (types 5, 6). Domain wall boundaries force
//! n3 = n4 and n5 = n6, and the partition function is symmetric under
//! a <-> b, so the within-pair and pair labeling conventions do not
//! affect any computed value.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default enumeration cap (218348 configurations at N = 7).
pub const DEFAULT_CAP: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsmMatrix {
    pub n: usize,
    /// Row-major entries in {-1, 0, 1}.
    pub entries: Vec<i8>,
}

impl AsmMatrix {
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VertexTypeCounts {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
    pub n5: usize,
    pub n6: usize,
}

impl VertexTypeCounts {
    pub fn n_a(&self) -> usize {
        self.n3 + self.n4
    }
    pub fn n_b(&self) -> usize {
        self.n5 + self.n6
    }
    pub fn n_c(&self) -> usize {
        self.n1 + self.n2
    }
}

/// Exact integer counts keyed by (n_a, n_b, n_c).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightPolynomial {
    pub n: usize,
    pub terms: BTreeMap<(usize, usize, usize), u64>,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Usage("N must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

/// Classify the cell with entry `e`, given the incoming horizontal state
/// `s_l` (row partial sum so far) and vertical state `s_t` (column
/// partial sum so far). Returns a type index in 0..6.
#[inline]
fn vertex_type(e: i8, s_l: u8, s_t: u8) -> usize {
    match e {
        -1 => 0,
        1 => 1,
        _ => match (s_l, s_t) {
            (0, 0) => 2,
            (1, 1) => 3,
            (0, 1) => 4,
            _ => 5,
        },
    }
}

struct Dfs<'a, F: FnMut(&[i8], &[usize; 6])> {
    n: usize,
    entries: Vec<i8>,
    col: Vec<u8>,
    counts: [usize; 6],
    visit: &'a mut F,
}

impl<'a, F: FnMut(&[i8], &[usize; 6])> Dfs<'a, F> {
    fn place(&mut self, i: usize, j: usize, row_sum: u8, e: i8) {
        let n = self.n;
        let last_row = i == n - 1;
        let new_col = (self.col[j] as i8 + e) as u8;
        if last_row && new_col != 1 {
            return; // column sum would not close to 1
        }
        let t = vertex_type(e, row_sum, self.col[j]);
        let new_row = (row_sum as i8 + e) as u8;
        if j == n - 1 && new_row != 1 {
            return; // row sum must close to 1
        }
        self.entries[i * n + j] = e;
        self.col[j] = new_col;
        self.counts[t] += 1;
        if j == n - 1 {
            if last_row {
                (self.visit)(&self.entries, &self.counts);
            } else {
                self.cell(i + 1, 0, 0);
            }
        } else {
            self.cell(i, j + 1, new_row);
        }
        self.counts[t] -= 1;
        self.col[j] = (new_col as i8 - e) as u8;
    }

    fn cell(&mut self, i: usize, j: usize, row_sum: u8) {
        self.place(i, j, row_sum, 0);
        if row_sum == 0 && self.col[j] == 0 {
            self.place(i, j, row_sum, 1);
        }
        if row_sum == 1 && self.col[j] == 1 {
            self.place(i, j, row_sum, -1);
        }
    }
}

/// Run `visit` on every N x N alternating sign matrix (entries and vertex
/// type counts), with the first row pinned to the unit vector e_{j0}.
fn for_each_from_first_row<F: FnMut(&[i8], &[usize; 6])>(n: usize, j0: usize, visit: &mut F) {
    let mut d = Dfs {
        n,
        entries: vec![0; n * n],
        col: vec![0; n],
        counts: [0; 6],
        visit,
    };
    // first row of any ASM is a unit vector; seed its cells directly
    for j in 0..n {
        let e = if j == j0 { 1 } else { 0 };
        let s_l = u8::from(j > j0);
        d.entries[j] = e;
        d.counts[vertex_type(e, s_l, 0)] += 1;
    }
    d.col[j0] = 1;
    if n == 1 {
        (d.visit)(&d.entries, &d.counts);
    } else {
        d.cell(1, 0, 0);
    }
}

/// Visit every ASM once, sequentially.
pub fn for_each_asm<F: FnMut(&[i8], &[usize; 6])>(n: usize, mut visit: F) {
    for j0 in 0..n {
        for_each_from_first_row(n, j0, &mut visit);
    }
}

/// Materialized enumeration (small N only).
pub fn enumerate_asm(n: usize, cap: usize) -> Result<Vec<AsmMatrix>> {
    check_cap(n, cap)?;
    let mut out = Vec::new();
    for_each_asm(n, |entries, _| {
        out.push(AsmMatrix {
            n,
            entries: entries.to_vec(),
        })
    });
    Ok(out)
}

/// Vertex type counts of a single ASM, with full validation of the
/// alternation invariants.
pub fn asm_vertex_counts(m: &AsmMatrix) -> Result<VertexTypeCounts> {
    let n = m.n;
    if m.entries.len() != n * n {
        return Err(Error::InvalidAsm("wrong entry count".into()));
    }
    let mut col = vec![0i8; n];
    let mut c = [0usize; 6];
    for i in 0..n {
        let mut row = 0i8;
        for j in 0..n {
            let e = m.get(i, j);
            if !(-1..=1).contains(&e) {
                return Err(Error::InvalidAsm(format!("entry {e} at ({i}, {j})")));
            }
            c[vertex_type(e, row as u8, col[j] as u8)] += 1;
            row += e;
            col[j] += e;
            if !(0..=1).contains(&row) || !(0..=1).contains(&col[j]) {
                return Err(Error::InvalidAsm(format!(
                    "partial sum out of range at ({i}, {j})"
                )));
            }
        }
        if row != 1 {
            return Err(Error::InvalidAsm(format!("row {i} does not sum to 1")));
        }
    }
    if col.iter().any(|&s| s != 1) {
        return Err(Error::InvalidAsm("a column does not sum to 1".into()));
    }
    Ok(VertexTypeCounts {
        n1: c[0],
        n2: c[1],
        n3: c[2],
        n4: c[3],
        n5: c[4],
        n6: c[5],
    })
}

/// Exact weight polynomial; the search tree is split across workers on
/// the first-row pivot column, and per-worker maps merge by integer
/// addition, so the result is schedule-independent.
pub fn weight_polynomial(n: usize, cap: usize) -> Result<WeightPolynomial> {
    check_cap(n, cap)?;
    let maps: Vec<BTreeMap<(usize, usize, usize), u64>> = (0..n)
        .into_par_iter()
        .map(|j0| {
            let mut terms = BTreeMap::new();
            for_each_from_first_row(n, j0, &mut |_, c: &[usize; 6]| {
                let key = (c[2] + c[3], c[4] + c[5], c[0] + c[1]);
                *terms.entry(key).or_insert(0u64) += 1;
            });
            terms
        })
        .collect();
    let mut terms = BTreeMap::new();
    for m in maps {
        for (k, v) in m {
            *terms.entry(k).or_insert(0) += v;
        }
    }
    Ok(WeightPolynomial { n, terms })
}

impl WeightPolynomial {
    pub fn total_count(&self) -> u64 {
        self.terms.values().sum()
    }

    /// Lines "n_a,n_b,n_c,count".
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n_a,n_b,n_c,count\n");
        for (&(na, nb, nc), &cnt) in &self.terms {
            s.push_str(&format!("{na},{nb},{nc},{cnt}\n"));
        }
        s
    }
}

/// `Z_N(a, b, c) = sum count * a^{n_a} b^{n_b} c^{n_c}` at the working
/// precision.
pub fn evaluate_z<S: Scalar>(wp: &WeightPolynomial, a: &S, b: &S, c: &S) -> S {
    let prec = a.prec().max(b.prec()).max(c.prec());
    let mut acc = S::zero(prec);
    for (&(na, nb, nc), &cnt) in &wp.terms {
        let term = a.powi_s(na as i32) * b.powi_s(nb as i32) * c.powi_s(nc as i32)
            * S::from_i64(cnt as i64, prec);
        acc = acc + term;
    }
    acc
}

/// `A(N; x) = sum over ASMs of x^{number of -1 entries}`, exactly.
pub fn x_enumeration(n: usize, x: &BigRational, cap: usize) -> Result<BigRational> {
    let wp = weight_polynomial(n, cap)?;
    let mut acc = BigRational::zero();
    for (&(_, _, nc), &cnt) in &wp.terms {
        debug_assert!(nc >= n && (nc - n) % 2 == 0);
        let minus = (nc - n) / 2;
        let mut term = BigRational::from(BigInt::from(cnt));
        for _ in 0..minus {
            term *= x;
        }
        acc += term;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hankel::partition_z;
    use crate::params::{make_params, make_params_f64, weights_at, weights_of, Angle};
    use crate::scalar::{agreed_digits, Big};
    use num_traits::One;

    // A(1)..A(7)
    const ASM_COUNTS: [u64; 7] = [1, 2, 7, 42, 429, 7436, 218348];

    #[test]
    fn enumeration_counts_match_product_formula() {
        for n in 1..=6usize {
            let v = enumerate_asm(n, DEFAULT_CAP).unwrap();
            assert_eq!(v.len() as u64, ASM_COUNTS[n - 1], "N = {n}");
        }
    }

    #[test]
    fn n1_is_identity() {
        let v = enumerate_asm(1, DEFAULT_CAP).unwrap();
        assert_eq!(v, vec![AsmMatrix { n: 1, entries: vec![1] }]);
        let c = asm_vertex_counts(&v[0]).unwrap();
        assert_eq!(
            c,
            VertexTypeCounts { n2: 1, ..Default::default() }
        );
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_asm(8, DEFAULT_CAP),
            Err(Error::CapExceeded { n: 8, cap: 7 })
        ));
    }

    #[test]
    fn per_asm_invariants() {
        for n in 1..=5usize {
            for m in enumerate_asm(n, DEFAULT_CAP).unwrap() {
                let c = asm_vertex_counts(&m).unwrap();
                assert_eq!(c.n2, c.n1 + n);
                assert_eq!(c.n3, c.n4);
                assert_eq!(c.n5, c.n6);
                assert_eq!(c.n_a() + c.n_b() + c.n_c(), n * n);
            }
        }
    }

    #[test]
    fn closure_under_transpose_and_rotation() {
        for n in 2..=4usize {
            let set: std::collections::BTreeSet<Vec<i8>> = enumerate_asm(n, DEFAULT_CAP)
                .unwrap()
                .into_iter()
                .map(|m| m.entries)
                .collect();
            for e in &set {
                let mut tr = vec![0i8; n * n];
                let mut rot = vec![0i8; n * n];
                for i in 0..n {
                    for j in 0..n {
                        tr[j * n + i] = e[i * n + j];
                        rot[(n - 1 - i) * n + (n - 1 - j)] = e[i * n + j];
                    }
                }
                assert!(set.contains(&tr));
                assert!(set.contains(&rot));
            }
        }
    }

    #[test]
    fn fig5_style_n4_counts() {
        // the one N=4 ASM with a -1: central 2x2 pattern
        let m = AsmMatrix {
            n: 4,
            entries: vec![0, 1, 0, 0, 1, -1, 1, 0, 0, 1, -1, 1, 0, 0, 1, 0],
        };
        let c = asm_vertex_counts(&m).unwrap();
        assert_eq!(c.n1, 2);
        assert_eq!(c.n2, 6);
        assert_eq!(c.n3 + c.n4 + c.n5 + c.n6, 8);
    }

    #[test]
    fn invalid_asm_rejected() {
        let m = AsmMatrix { n: 2, entries: vec![1, 0, 1, 0] };
        assert!(matches!(asm_vertex_counts(&m), Err(Error::InvalidAsm(_))));
        let m = AsmMatrix { n: 2, entries: vec![-1, 1, 1, 0] };
        assert!(matches!(asm_vertex_counts(&m), Err(Error::InvalidAsm(_))));
    }

    #[test]
    fn weight_polynomial_n2() {
        // Z_2 = c^2 (a^2 + b^2)
        let wp = weight_polynomial(2, DEFAULT_CAP).unwrap();
        let mut expect = BTreeMap::new();
        expect.insert((2, 0, 2), 1u64);
        expect.insert((0, 2, 2), 1u64);
        assert_eq!(wp.terms, expect);
        assert_eq!(wp.total_count(), 2);
    }

    #[test]
    fn weight_polynomial_totals_and_keys() {
        for n in 1..=6usize {
            let wp = weight_polynomial(n, DEFAULT_CAP).unwrap();
            assert_eq!(wp.total_count(), ASM_COUNTS[n - 1]);
            for &(na, nb, nc) in wp.terms.keys() {
                assert_eq!(na + nb + nc, n * n);
                assert!(nc >= n && (nc - n) % 2 == 0);
            }
            // a <-> b symmetry of the counts
            let wp2 = &wp.terms;
            for (&(na, nb, nc), &cnt) in &wp.terms {
                assert_eq!(wp2.get(&(nb, na, nc)), Some(&cnt));
            }
        }
    }

    #[test]
    fn evaluate_matches_izergin() {
        let prec = 256;
        for &(g, t) in &[(1.0471975511965976, 0.0), (0.8, 0.3), (1.2, -0.5), (0.6, 0.1)] {
            let p = make_params_f64(g, t).unwrap();
            let (a, b, c) = weights_at::<Big>(&p, prec);
            for n in 1..=5usize {
                let wp = weight_polynomial(n, DEFAULT_CAP).unwrap();
                let ze = evaluate_z(&wp, &a, &b, &c);
                let zi = partition_z(&p, n, prec).unwrap();
                assert!(
                    agreed_digits(&ze, &zi) > 40.0,
                    "gamma = {g}, t = {t}, N = {n}"
                );
            }
        }
    }

    #[test]
    fn evaluate_scale_invariance() {
        let wp = weight_polynomial(4, DEFAULT_CAP).unwrap();
        let (a, b, c) = (0.7f64, 1.3, 0.9);
        let s = 1.17f64;
        let z1 = evaluate_z(&wp, &a, &b, &c);
        let z2 = evaluate_z(&wp, &(s * a), &(s * b), &(s * c));
        assert!((z2 - s.powi(16) * z1).abs() < 1e-10 * z2.abs());
    }

    #[test]
    fn x_enumeration_values() {
        let three = BigRational::from(BigInt::from(3));
        // A(3;3) = 6 + 3 = 9
        assert_eq!(
            x_enumeration(3, &three, DEFAULT_CAP).unwrap(),
            BigRational::from(BigInt::from(9))
        );
        // A(N;1) = A(N)
        let one = BigRational::one();
        for n in 1..=6usize {
            assert_eq!(
                x_enumeration(n, &one, DEFAULT_CAP).unwrap(),
                BigRational::from(BigInt::from(ASM_COUNTS[n - 1]))
            );
        }
        // A(N;2) = 2^{N(N-1)/2}
        let two = BigRational::from(BigInt::from(2));
        for n in 1..=6usize {
            let expect = BigInt::from(1u8) << (n * (n - 1) / 2);
            assert_eq!(
                x_enumeration(n, &two, DEFAULT_CAP).unwrap(),
                BigRational::from(expect)
            );
        }
    }

    #[test]
    fn csv_roundtrip_shape() {
        let wp = weight_polynomial(3, DEFAULT_CAP).unwrap();
        let csv = wp.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n_a,n_b,n_c,count"));
        let data: Vec<&str> = lines.collect();
        assert_eq!(data.len(), wp.terms.len());
        let total: u64 = data
            .iter()
            .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(total, 7);
    }

    #[test]
    fn z1_equals_sin_2gamma() {
        let p = make_params(Angle::PiTimes(2, 7), Angle::Value(0.1)).unwrap();
        let wp = weight_polynomial(1, DEFAULT_CAP).unwrap();
        let w = weights_of(&p);
        let z = evaluate_z(&wp, &w.a, &w.b, &w.c);
        assert!((z - (2.0 * p.gamma_f64()).sin()).abs() < 1e-14);
    }
}
