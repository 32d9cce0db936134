//! Fixed quadrature rules in barycentric form; weights sum to one and are scaled by
//! the cell measure at the call site.

use crate::Scalar;

/// Triangle rule exact for degree 2 (interior points, equal weights).
pub const TRI_DEG2: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];

const D4A: f64 = 0.445_948_490_915_965;
const D4B: f64 = 0.091_576_213_509_771;
const D4WA: f64 = 0.223_381_589_678_011;
const D4WB: f64 = 0.109_951_743_655_322;

/// Six-point triangle rule exact for degree 4.
pub const TRI_DEG4: [([f64; 3], f64); 6] = [
    ([1.0 - 2.0 * D4A, D4A, D4A], D4WA),
    ([D4A, 1.0 - 2.0 * D4A, D4A], D4WA),
    ([D4A, D4A, 1.0 - 2.0 * D4A], D4WA),
    ([1.0 - 2.0 * D4B, D4B, D4B], D4WB),
    ([D4B, 1.0 - 2.0 * D4B, D4B], D4WB),
    ([D4B, D4B, 1.0 - 2.0 * D4B], D4WB),
];

/// Two-point Gauss-Legendre on [0, 1], exact for degree 3.
pub const SEG_GAUSS2: [(f64, f64); 2] = [(0.211_324_865_405_187_1, 0.5), (0.788_675_134_594_812_9, 0.5)];

const T2A: f64 = 0.138_196_601_125_010_5;
const T2B: f64 = 0.585_410_196_624_968_5;

/// Four-point tetrahedron rule exact for degree 2.
pub const TET_DEG2: [([f64; 4], f64); 4] = [
    ([T2B, T2A, T2A, T2A], 0.25),
    ([T2A, T2B, T2A, T2A], 0.25),
    ([T2A, T2A, T2B, T2A], 0.25),
    ([T2A, T2A, T2A, T2B], 0.25),
];

const T5A: f64 = 0.310_885_919_263_300_6;
const T5B: f64 = 0.092_735_250_310_891_2;
const T5C: f64 = 0.045_503_704_125_649_6;
const T5WA: f64 = 0.112_687_925_718_015_9;
const T5WB: f64 = 0.073_493_043_116_361_9;
const T5WC: f64 = 0.042_546_020_777_081_2;

/// Fourteen-point tetrahedron rule with positive weights, exact for degree 5.
pub const TET_DEG5: [([f64; 4], f64); 14] = [
    ([1.0 - 3.0 * T5A, T5A, T5A, T5A], T5WA),
    ([T5A, 1.0 - 3.0 * T5A, T5A, T5A], T5WA),
    ([T5A, T5A, 1.0 - 3.0 * T5A, T5A], T5WA),
    ([T5A, T5A, T5A, 1.0 - 3.0 * T5A], T5WA),
    ([1.0 - 3.0 * T5B, T5B, T5B, T5B], T5WB),
    ([T5B, 1.0 - 3.0 * T5B, T5B, T5B], T5WB),
    ([T5B, T5B, 1.0 - 3.0 * T5B, T5B], T5WB),
    ([T5B, T5B, T5B, 1.0 - 3.0 * T5B], T5WB),
    ([T5C, T5C, 0.5 - T5C, 0.5 - T5C], T5WC),
    ([T5C, 0.5 - T5C, T5C, 0.5 - T5C], T5WC),
    ([T5C, 0.5 - T5C, 0.5 - T5C, T5C], T5WC),
    ([0.5 - T5C, T5C, T5C, 0.5 - T5C], T5WC),
    ([0.5 - T5C, T5C, 0.5 - T5C, T5C], T5WC),
    ([0.5 - T5C, 0.5 - T5C, T5C, T5C], T5WC),
];

/// Converts a rule's barycentric weights into the scalar type.
#[inline]
pub fn bary<T: Scalar, const N: usize>(b: [f64; N]) -> [T; N] {
    b.map(T::lit)
}
