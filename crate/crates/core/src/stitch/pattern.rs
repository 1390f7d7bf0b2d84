//! Sampling pattern for the 256-bit binary descriptor.
//!
//! Point pairs `(x1, y1, x2, y2)` relative to the keypoint, drawn once from an
//! isotropic Gaussian (sigma 6.2 px) clipped to a 13 px radius so every
//! rotation of the pattern stays inside the 31 px patch. The table is data:
//! changing it changes every descriptor.

#[rustfmt::skip]
pub(super) const BRIEF_PAIRS: [[i8; 4]; 256] = [
    [-7, -3, -8, 0], [-4, -2, 0, -3], [-8, -5, 7, -4], [4, -4, -4, -1],
    [0, 2, 7, 10], [-5, -5, -5, 0], [5, 5, -11, 4], [2, -7, -5, 2],
    [-4, 8, -7, 0], [-3, -10, 7, -2], [-8, 8, -10, 1], [-1, 1, -10, 2],
    [5, 3, 2, 9], [-8, -9, 1, 10], [8, -2, 1, -4], [2, 4, -5, 0],
    [-3, -3, 5, -10], [1, 0, -3, -7], [6, 0, 1, -9], [-5, 2, -1, 10],
    [0, 1, -5, -2], [5, 4, -1, -4], [1, -10, 3, 7], [-6, 5, 3, 7],
    [-1, 4, 5, -3], [-3, -3, 3, 4], [-2, 4, -3, -4], [-3, 6, 3, 5],
    [-6, -3, 0, -3], [-4, -2, 5, 0], [-3, 1, 6, -2], [7, -6, -5, 6],
    [4, -5, 6, -2], [0, 2, 5, -6], [2, -4, 3, -7], [-3, 5, -1, -1],
    [-2, -6, -3, -8], [-2, -1, 11, -3], [-8, -4, -9, -3], [-4, -2, -9, -7],
    [-8, -6, -5, 7], [6, 4, 0, 12], [6, 1, 3, 4], [-1, 5, -5, -6],
    [-12, 5, -5, 0], [6, 3, 1, -4], [4, 7, -10, 2], [2, 1, 2, 6],
    [-2, 2, -9, -3], [8, -5, -11, 3], [-7, -2, 4, -9], [9, -4, 2, 1],
    [-1, -5, 0, 2], [-6, 0, 2, 1], [4, -9, -4, -2], [-8, 1, -8, 6],
    [7, 3, -3, -5], [1, 2, -4, 8], [0, 2, -12, -3], [-1, -1, 1, -6],
    [-3, -9, -6, -3], [-7, -3, -4, 5], [-2, -10, 8, 8], [9, 2, 3, 2],
    [10, 1, -9, 2], [-4, 10, 8, 6], [0, 6, 5, -4], [10, -6, 7, 2],
    [7, 5, 2, 0], [-7, 6, -8, 1], [-6, 1, 4, -6], [-5, 8, -3, 0],
    [0, 6, 6, 4], [-1, 3, 4, 1], [0, 1, -10, 8], [6, 4, -7, -3],
    [-6, 2, 2, -4], [9, -3, -5, 7], [-4, 0, 4, 3], [0, 3, -2, 2],
    [3, 0, -1, -8], [10, -6, -6, -7], [3, 6, 0, -13], [3, -6, -8, -8],
    [3, -8, 3, -4], [-3, 1, 0, -3], [-1, 5, -6, -8], [-1, -7, -9, 6],
    [-3, -7, 0, -5], [10, -6, 3, -9], [-4, 3, 3, 2], [-10, -1, -9, -2],
    [-12, 5, 1, -8], [-2, -8, 4, 6], [4, -4, 2, 6], [-2, -5, -5, -2],
    [10, -1, 9, 9], [7, -5, 4, -7], [-5, 0, 1, 9], [-2, -9, 8, 1],
    [-4, -1, -2, 0], [-2, 9, -1, -3], [0, 8, -3, -3], [-2, -4, -8, -4],
    [5, -1, 3, 2], [-8, -8, -7, 1], [-5, -7, -5, 11], [-3, -6, 9, 6],
    [-7, -6, 1, 8], [9, 2, 1, 2], [-2, -3, 1, 1], [-3, -4, 2, 9],
    [-3, -6, -9, -4], [-10, 7, -4, 1], [9, 4, 2, -2], [3, 3, 10, -4],
    [3, 4, -2, 4], [0, 2, -10, 1], [-6, -9, 8, 4], [-5, 2, 8, -3],
    [-5, -9, -4, 0], [-3, -7, 5, -4], [5, 6, -2, 9], [4, 11, 0, 4],
    [10, -7, -1, -5], [-8, -2, 2, -6], [6, -1, -9, 5], [-11, -1, 4, -2],
    [5, -5, -12, -4], [5, 0, -1, 8], [0, 2, 0, 11], [-4, 2, 2, -4],
    [-6, -2, 3, 11], [2, 3, -8, 2], [5, 7, -6, 3], [0, -2, 2, 4],
    [-2, -1, -3, 5], [-5, 2, -9, -1], [4, 9, 2, 12], [-4, -5, -6, -5],
    [-4, 3, 1, 3], [2, -4, -4, 6], [8, -2, 1, 1], [-4, -8, -8, 7],
    [-1, -4, 10, 8], [-2, -4, -11, -3], [-2, -1, -3, 2], [8, 7, -8, 10],
    [-6, -5, 5, 4], [-6, -3, 8, -1], [-3, -6, -3, -2], [4, 0, 2, -1],
    [-5, 4, -8, 1], [2, -1, 1, 9], [-7, -2, -5, -6], [-1, 10, -3, -3],
    [-1, 6, -4, -2], [5, -3, -2, -3], [-3, 8, 3, 0], [-12, 2, 9, -2],
    [-2, -10, -4, -2], [-10, 1, 5, 3], [10, -3, -7, -9], [5, -5, -1, 3],
    [5, 5, -1, 6], [12, -1, 0, -2], [-3, 2, 0, -2], [-4, -6, -2, -2],
    [1, -7, -5, -3], [3, 2, 4, 3], [4, 10, -1, 0], [0, 1, 5, 4],
    [0, 0, 5, 7], [10, -2, 5, 1], [2, 0, -10, -6], [5, 3, 6, 3],
    [3, -3, -4, 12], [-3, 4, 0, 11], [-1, 2, -7, -1], [-10, -1, -4, -7],
    [-9, 7, -7, -2], [-5, -6, 10, -3], [-6, -1, 0, -2], [1, 7, 0, -4],
    [-6, -10, 4, 2], [9, -5, -1, 8], [-4, -9, 6, -5], [-1, 0, -1, -3],
    [3, -1, -6, -1], [8, 7, 7, -5], [-8, 8, 2, 0], [-5, 1, -2, -7],
    [-9, -2, 3, -9], [-8, -1, 5, -4], [2, 0, -3, -12], [1, 3, -6, 6],
    [9, 1, 6, 0], [-5, 6, -10, 3], [-7, 1, 1, 8], [-2, -7, -6, 1],
    [-8, -4, -5, -9], [2, -1, 11, 1], [-3, 5, 4, 4], [10, -4, -5, -5],
    [3, 4, 5, -3], [1, 1, -9, 4], [2, 8, -9, 4], [0, 3, -1, 12],
    [1, -2, -3, 5], [5, -6, -3, -3], [1, 5, 1, -1], [-6, 7, 8, 10],
    [-4, -8, -5, -1], [5, 8, -2, 8], [2, -3, 4, 0], [4, 5, -8, -10],
    [3, 7, 2, -5], [2, 1, -5, 9], [-4, 8, 3, -1], [2, 2, -2, 0],
    [4, 0, 8, 5], [-10, -3, 4, 9], [-3, -4, -4, 3], [8, 0, -5, 5],
    [11, -3, 1, -1], [-9, -3, 7, -7], [7, -1, -3, 5], [7, -2, -5, -3],
    [2, -11, 8, 4], [5, -8, 12, -5], [1, 8, 1, 9], [5, 8, 0, 11],
    [-6, 0, 6, 5], [2, -1, 4, -3], [6, 0, 4, -11], [-3, 2, 5, -4],
    [12, 2, 0, -11], [3, -7, 4, 8], [0, -7, 0, -4], [6, 1, 1, -3],
    [-2, -1, -1, -2], [-7, 7, 1, -1], [-1, -2, 6, 5], [8, -2, 10, -3],
    [2, -2, 0, 2], [-5, -3, 0, -3], [-3, 8, 7, -5], [-10, -4, 2, -5],
    [5, 3, -2, 3], [6, -1, -11, 3], [5, -1, -3, 2], [-6, 7, 5, 6],
    [5, -3, -6, 10], [11, 3, -5, 0], [-6, -4, 2, 2], [-12, 0, 3, 2],
];
