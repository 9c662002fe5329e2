//! Independent oracles: dense arrays and elementary recurrences, sharing no
//! code with the series engine.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Partition numbers `p(0..=n)` by the coin-change recurrence.
pub fn partitions(n: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = BigInt::one();
    for part in 1..=n {
        for total in part..=n {
            let add = p[total - part].clone();
            p[total] += add;
        }
    }
    p
}

/// 24-fold self-convolution of the partition generating function.
pub fn hilb_by_convolution(n: usize) -> Vec<BigInt> {
    let p = partitions(n);
    let mut acc = vec![BigInt::zero(); n + 1];
    acc[0] = BigInt::one();
    for _ in 0..24 {
        let mut next = vec![BigInt::zero(); n + 1];
        for i in 0..=n {
            if acc[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                next[i + j] += &acc[i] * &p[j];
            }
        }
        acc = next;
    }
    acc
}

/// KKV product as a dense array `a[h][j + h_max]` = coefficient of
/// `q^h y^j`. Each factor `1/(1 − y^s q^n)` is applied by the recurrence
/// `b[h][j] = a[h][j] + b[h − n][j − s]`.
pub fn kkv_dense(h_max: usize) -> Vec<Vec<BigInt>> {
    let width = 2 * h_max + 1;
    let mut a = vec![vec![BigInt::zero(); width]; h_max + 1];
    a[0][h_max] = BigInt::one();
    for n in 1..=h_max {
        let mut shifts = vec![0i64; 20];
        shifts.extend([1, 1, -1, -1]);
        for s in shifts {
            for h in n..=h_max {
                for j in 0..width {
                    let src = j as i64 - s;
                    if src < 0 || src >= width as i64 {
                        continue;
                    }
                    let add = a[h - n][src as usize].clone();
                    a[h][j] += add;
                }
            }
        }
    }
    a
}

/// `(y − 2 + y^{−1})^g` as a dense array over `y^{−g..=g}`.
pub fn z_power_dense(g: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::one()];
    for _ in 0..g {
        let mut next = vec![BigInt::zero(); p.len() + 2];
        for (i, c) in p.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * 2;
            next[i + 2] += c;
        }
        p = next;
    }
    p
}
