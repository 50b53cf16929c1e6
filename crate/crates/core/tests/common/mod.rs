//! Low-order coefficients of the two regular expansions, written out by hand.

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// `(component, order, value)` for the expansion closing on `S²`.
pub fn s2_rows(a: f64) -> Vec<(usize, usize, f64)> {
    let (a2, a4, a6) = (a * a, a.powi(4), a.powi(6));
    vec![
        (0, 1, 1.5),
        (0, 3, -(2.0 * a2 + 3.0) / (12.0 * a2)),
        (0, 5, (116.0 * a4 - 381.0 * a2 + 261.0) / (1440.0 * a4)),
        (
            0,
            7,
            (5500.0 * a6 - 26523.0 * a4 + 34209.0 * a2 - 13149.0) / (90720.0 * a6),
        ),
        (1, 0, a2),
        (1, 2, -3.0 * a2),
        (1, 4, (52.0 * a2 - 3.0) / 24.0),
        (1, 6, -(172.0 * a4 + 3.0 * a2 - 18.0) / (270.0 * a2)),
        (2, 0, a2),
        (2, 2, -1.5 * (2.0 * a2 - 1.0)),
        (2, 4, (52.0 * a4 - 32.0 * a2 - 3.0) / (24.0 * a2)),
        (
            2,
            6,
            -(2752.0 * a6 - 1688.0 * a4 + 93.0 * a2 - 261.0) / (4320.0 * a4),
        ),
        (3, 2, -1.5 * SQRT3 * a),
        (3, 4, SQRT3 * (16.0 * a2 - 3.0) / (12.0 * a)),
        (
            3,
            6,
            SQRT3 * (-3412.0 * a4 + 267.0 * a2 + 423.0) / (8640.0 * a * a2),
        ),
        (4, 2, 3.0 * a2),
        (4, 4, -(0.25 + 14.0 * a2 / 3.0)),
        (4, 6, (5516.0 * a4 + 429.0 * a2 + 261.0) / (2160.0 * a2)),
        (5, 2, 3.0 * a2),
        (5, 4, 2.0 - 14.0 * a2 / 3.0),
        (5, 6, (5516.0 * a4 - 2541.0 * a2 - 549.0) / (2160.0 * a2)),
        (6, 2, 1.5 * SQRT3 * a),
        (6, 4, -SQRT3 * (34.0 * a2 - 3.0) / (12.0 * a)),
        (
            6,
            6,
            SQRT3 * (13492.0 * a4 + 273.0 * a2 - 423.0) / (8640.0 * a * a2),
        ),
    ]
}

/// `(component, order, value)` for the bubble expansion closing on `S³`.
/// Component 7 stands for `λ²`.
pub fn s3_bubble_rows(b: f64) -> Vec<(usize, usize, f64)> {
    let (b2, b3, b4) = (b * b, b.powi(3), b.powi(4));
    vec![
        (1, 1, 2.0 * b),
        (1, 3, -4.0 * b3),
        (1, 5, 6.0 / 25.0 * b3 * (19.0 * b2 - 9.0)),
        (2, 1, 2.0),
        (2, 3, -0.4 * (13.0 * b2 - 3.0)),
        (2, 5, 6.0 / 175.0 * (172.0 * b4 - 111.0 * b2 + 9.0)),
        (3, 1, -2.0 * b),
        (3, 3, b * (4.0 * b2 - 3.0)),
        (3, 5, -0.03 * b * (152.0 * b4 - 192.0 * b2 + 45.0)),
        (4, 0, -2.0 / 3.0),
        (4, 2, 4.0 * b2),
        (4, 4, -0.4 * b2 * (19.0 * b2 - 9.0)),
        (5, 2, 4.0 * b),
        (5, 4, -0.8 * b * (11.0 * b2 - 6.0)),
        (6, 0, 2.0 / 3.0),
        (6, 2, -(4.0 * b2 - 3.0)),
        (6, 4, (152.0 * b4 - 192.0 * b2 + 45.0) / 20.0),
        (7, 0, 1.0),
        (7, 2, -1.8 * (b2 - 1.0)),
        (7, 4, 27.0 / 35.0 * (b2 - 1.0) * (2.0 * b2 - 1.0)),
    ]
}

/// Coefficients of `λ²` from the coefficients of `λ`.
pub fn square(c: &[f64]) -> Vec<f64> {
    (0..c.len())
        .map(|n| (0..=n).map(|i| c[i] * c[n - i]).sum())
        .collect()
}

/// Component `k` of a coefficient table, with `λ²` at index 7.
pub fn coefficient(c: &[Vec<f64>; 7], k: usize, h: usize) -> f64 {
    if k == 7 {
        square(&c[0])[h]
    } else {
        c[k][h]
    }
}
