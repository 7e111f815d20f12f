// Generated by `examples/gen_pattern.rs` (seed 20190611). Do not edit.

/// Point pairs `[x1, y1, x2, y2]` relative to the keypoint.
pub(crate) const PATTERN_PAIRS: [[i8; 4]; 256] = [
    [5, -3, 9, 5],
    [9, -5, -9, -10],
    [0, -3, 6, -4],
    [1, 9, 8, -7],
    [1, 1, 6, 12],
    [4, 6, 5, -4],
    [-6, 0, -7, 9],
    [-5, -6, 5, 6],
    [-1, 7, 3, -2],
    [-5, -10, 7, 7],
    [-9, 10, -7, 6],
    [-3, -10, 0, 6],
    [-5, -12, 0, 1],
    [-8, -10, 9, 4],
    [-7, -1, -5, -9],
    [-2, -8, -1, -9],
    [1, 4, 4, -3],
    [-8, 5, -4, -3],
    [0, -4, -12, -2],
    [2, -2, -12, -2],
    [5, 4, 0, 3],
    [-2, 4, -12, 0],
    [1, 11, 7, 7],
    [1, 9, 0, 6],
    [-5, 3, 1, -1],
    [6, 4, -4, -5],
    [8, 1, -8, 8],
    [-7, -2, -2, 0],
    [-1, -3, -8, -12],
    [2, 6, -12, -8],
    [0, -1, 7, 9],
    [9, -9, -8, 4],
    [6, -13, 7, 5],
    [6, 5, 5, 0],
    [-3, -6, 11, 5],
    [0, -11, 3, 11],
    [1, 0, 11, 1],
    [-4, -6, 4, -3],
    [0, 5, 3, -10],
    [-9, 6, -12, 7],
    [-1, 0, 1, 3],
    [2, 6, 1, -2],
    [13, 0, -7, 0],
    [2, -3, 4, 4],
    [4, 0, 2, -7],
    [4, -7, 6, 0],
    [1, 13, -9, 8],
    [-4, 2, 9, 1],
    [-2, -4, 0, 3],
    [-4, -2, 0, -5],
    [1, 1, -2, 9],
    [-3, 1, 0, -1],
    [-2, -13, -9, 2],
    [6, -7, 3, 8],
    [-3, -6, 1, -4],
    [8, -2, 11, 3],
    [1, -3, 0, 5],
    [-2, -6, 8, 1],
    [3, 14, 6, -2],
    [11, 8, -2, -2],
    [-5, 2, -3, 6],
    [2, -1, -4, -10],
    [3, 7, -5, -4],
    [3, -8, 1, 2],
    [3, 1, 2, 3],
    [-9, 5, -8, -2],
    [1, 1, -1, 6],
    [-3, 1, -5, 2],
    [1, -1, 3, -8],
    [5, -4, 4, -6],
    [-5, 0, 0, 1],
    [0, -11, 3, 5],
    [-1, -6, 12, 1],
    [6, 6, 4, -12],
    [4, 4, 7, -1],
    [-5, -5, 6, 3],
    [1, -1, 0, -2],
    [-15, 0, -5, 4],
    [-3, 0, 1, 5],
    [-6, 4, -3, -3],
    [2, 8, 0, -3],
    [-3, 5, -1, 3],
    [5, -2, -4, 3],
    [-3, -5, -11, 4],
    [2, 5, 2, -1],
    [8, 5, 6, 9],
    [-14, 0, 3, 0],
    [-1, 5, 10, -3],
    [-2, 10, 8, 2],
    [13, -2, 10, 4],
    [-8, 1, -10, 5],
    [-5, -6, 0, 0],
    [-10, -5, -2, 0],
    [0, 1, -3, -5],
    [-12, -5, -2, 8],
    [-7, -1, 4, -1],
    [2, -1, -3, 5],
    [7, -3, 9, -5],
    [-2, -6, -3, -4],
    [10, -5, 1, 9],
    [3, -2, -8, -5],
    [5, 10, -5, 10],
    [-4, 1, 1, -2],
    [-10, 7, 5, -4],
    [-8, 7, 1, 0],
    [4, 4, -2, 5],
    [-6, -1, 2, 7],
    [-3, -8, 3, 1],
    [-7, -4, 3, 8],
    [1, 6, -3, 0],
    [-3, -5, -9, -1],
    [6, -3, 5, 2],
    [-5, -4, 11, 0],
    [4, 1, -1, 8],
    [3, 3, -5, -4],
    [-5, -8, -4, 4],
    [-4, -10, 6, 7],
    [-2, 3, -11, 4],
    [0, -2, 4, -6],
    [-1, 12, -3, 5],
    [-5, -2, 6, 11],
    [1, 2, -2, -2],
    [-3, -4, -10, -7],
    [-8, -3, -6, 5],
    [0, 7, -4, 5],
    [-1, 5, -11, 2],
    [-2, -2, 8, 0],
    [10, -10, -3, 4],
    [5, 1, -1, 1],
    [-1, -1, -2, -10],
    [-8, 1, -2, -10],
    [-5, -10, 14, -4],
    [1, 5, -3, -4],
    [-15, 0, 5, -7],
    [-5, -14, 12, -6],
    [-7, -11, 3, -3],
    [4, 4, -3, 10],
    [0, -1, 4, 6],
    [-3, 12, 4, 7],
    [2, 8, 0, -1],
    [1, -12, 2, -1],
    [-5, 4, 6, -8],
    [-8, -1, -2, 10],
    [-2, 7, 2, -5],
    [-4, 2, 1, 5],
    [9, 7, -1, -5],
    [2, 1, -5, -1],
    [-6, -6, 5, -7],
    [-9, -2, -4, -9],
    [-9, -4, -2, -3],
    [0, -1, 3, -1],
    [-1, 5, 4, 6],
    [-2, -2, -12, 3],
    [0, 2, -3, -2],
    [-9, 8, 2, 3],
    [7, 11, -2, 0],
    [-1, 10, 1, 3],
    [-2, -3, 1, 13],
    [1, -1, -1, 2],
    [-4, 10, 5, -4],
    [-2, -7, -2, -1],
    [-8, 4, 5, 0],
    [-4, -7, 2, -14],
    [-9, 7, 0, -6],
    [-3, -1, 1, -8],
    [6, -6, 3, 4],
    [5, -9, 2, -6],
    [12, 7, 4, -6],
    [0, 6, 3, -1],
    [2, -4, 1, -6],
    [-4, -2, -1, 2],
    [-4, -7, -2, -2],
    [5, -1, -2, -3],
    [-4, -2, 6, 1],
    [-9, 3, -2, -5],
    [2, 4, -6, 8],
    [8, 5, 0, -4],
    [3, 1, 3, -4],
    [-7, 4, 7, 11],
    [4, 6, -8, -4],
    [-9, -4, -1, 1],
    [9, 1, -1, 6],
    [1, 5, 1, -4],
    [1, 8, -3, 3],
    [0, -1, 6, 4],
    [6, -4, -1, 1],
    [0, 2, -12, 0],
    [-11, -1, 2, 6],
    [-10, 8, 2, 1],
    [2, 5, 13, 2],
    [5, -4, 0, 1],
    [0, -9, 0, -1],
    [-3, -9, -11, 2],
    [-4, 1, 5, 13],
    [0, 2, 4, 14],
    [-6, -4, -2, 4],
    [2, 8, 1, -7],
    [2, -4, -5, -3],
    [-3, -7, -1, -8],
    [3, 3, 6, 7],
    [2, -3, 4, 2],
    [0, 5, 1, -4],
    [-9, -4, 7, 8],
    [7, -11, -4, -12],
    [2, 1, 10, 0],
    [7, 2, -6, 9],
    [5, -4, -4, -7],
    [9, 2, -3, 6],
    [-7, 1, 3, 5],
    [5, -6, -1, -6],
    [3, -2, 4, -1],
    [-8, -1, -10, 2],
    [10, 8, -3, -12],
    [8, 7, -10, 8],
    [-5, 5, 7, -4],
    [-8, 3, 7, 12],
    [1, -7, -10, 6],
    [5, 0, -1, -4],
    [2, 10, -6, -6],
    [-7, 8, -12, -5],
    [6, 7, -2, -9],
    [-5, 1, 8, 1],
    [10, 3, 1, -12],
    [13, -3, 12, 4],
    [-1, -13, 4, 0],
    [0, -6, 6, 3],
    [-9, -5, -7, -5],
    [-3, 0, -1, -4],
    [1, 3, 6, 2],
    [-4, -2, 8, -4],
    [4, 2, -7, -7],
    [-5, 2, -7, 9],
    [-6, -1, 4, -7],
    [6, -9, -2, 3],
    [-9, -6, -2, -9],
    [-2, 0, 10, -5],
    [-3, -11, 14, 3],
    [0, -3, 4, 8],
    [8, 6, 5, 3],
    [-4, 0, 1, -1],
    [1, 4, -2, 6],
    [1, 5, 13, -1],
    [7, 4, 6, 10],
    [-7, -8, -6, -1],
    [-3, 9, 4, -2],
    [-3, 1, 2, 12],
    [4, 7, 4, 1],
    [-6, 6, 5, 8],
    [3, 8, -6, 2],
    [-4, -5, 6, -2],
    [-6, -2, 4, 0],
    [-10, 11, 0, 1],
    [8, -7, 1, 2],
    [0, 3, -2, 1],
    [10, 3, -3, -2],
    [10, 3, -11, 6],
];
