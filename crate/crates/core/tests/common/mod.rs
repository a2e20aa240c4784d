#![allow(dead_code)]

use exact_lu::field::rational;
use exact_lu::{Field, Matrix, PrimeField, Rationals};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn f2() -> PrimeField {
    PrimeField::new(2).unwrap()
}

pub fn f3() -> PrimeField {
    PrimeField::new(3).unwrap()
}

pub fn f5() -> PrimeField {
    PrimeField::new(5).unwrap()
}

pub fn q(rows: &[&[i64]]) -> Matrix<Rationals> {
    Matrix::from_i64(Rationals, rows).unwrap()
}

/// Random field elements: mostly zero-heavy small values so that leading
/// blocks are often singular.
pub trait Sample: Field {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Elem;
}

impl Sample for Rationals {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Elem {
        if rng.gen_bool(0.45) {
            return self.zero();
        }
        let num = rng.gen_range(-4i64..=4);
        let den = if rng.gen_bool(0.2) {
            rng.gen_range(1i64..=5)
        } else {
            1
        };
        rational(num, den)
    }
}

impl Sample for PrimeField {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Elem {
        if rng.gen_bool(0.4) {
            return 0;
        }
        rng.gen_range(0..self.modulus())
    }
}

pub fn random_matrix<F: Sample>(
    field: &F,
    rows: usize,
    cols: usize,
    rng: &mut ChaCha8Rng,
) -> Matrix<F> {
    let data = (0..rows * cols).map(|_| field.sample(rng)).collect();
    Matrix::from_vec(field.clone(), rows, cols, data).unwrap()
}

/// `n x n` matrix of rank exactly `r`, as a product of random `n x r` and
/// `r x n` factors (resampled until the rank is exact).
pub fn planted_rank<F: Sample>(field: &F, n: usize, r: usize, rng: &mut ChaCha8Rng) -> Matrix<F> {
    if r == 0 {
        return Matrix::zeros(field.clone(), n, n).unwrap();
    }
    loop {
        let x = random_matrix(field, n, r, rng);
        let y = random_matrix(field, r, n, rng);
        let a = x.multiply(&y).unwrap();
        if a.rank() == r {
            return a;
        }
    }
}

/// The random corpus: `count` matrices with `n` uniform in `1..=max_n` and
/// planted rank uniform in `0..=n`.
pub fn corpus<F: Sample>(field: &F, count: usize, max_n: usize, seed: u64) -> Vec<Matrix<F>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            let r = rng.gen_range(0..=n);
            planted_rank(field, n, r, &mut rng)
        })
        .collect()
}

pub fn random_invertible<F: Sample>(field: &F, max_n: usize, rng: &mut ChaCha8Rng) -> Matrix<F> {
    let n = rng.gen_range(1..=max_n);
    planted_rank(field, n, n, rng)
}

/// Every `n x n` matrix over GF(p), lexicographic.
pub fn all_matrices(field: PrimeField, n: usize) -> Vec<Matrix<PrimeField>> {
    exact_lu::oracle::all_matrices(field, n).collect()
}
