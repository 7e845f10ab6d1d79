// Point pairs (x1, y1, x2, y2) of the steered binary test, offsets from the
// keypoint inside a radius-15 disk. Frozen: changing any entry changes every
// descriptor.
pub(super) const PATTERN: [[i8; 4]; 256] = [
    [0, -5, 2, -5], [-7, -2, -8, -3], [-3, -8, -11, 7], [-1, 4, 1, -3],
    [-1, 1, -2, -5], [2, -14, 0, 4], [-4, -1, -2, -2], [7, 6, -9, 9],
    [6, 3, 1, -12], [3, -10, -7, -8], [8, 0, 6, 8], [3, -7, -5, 5],
    [-3, 4, -6, -7], [-5, 1, 11, -3], [1, 7, -6, 6], [12, 2, 10, -11],
    [4, 6, -8, 8], [1, 0, 5, 12], [12, 3, 0, -3], [8, -2, 9, 6],
    [-3, -12, 1, 0], [2, -8, 2, 6], [7, -9, -6, -4], [-9, -9, 12, 4],
    [-8, -10, -7, -13], [3, 7, -6, 4], [-1, -2, 11, 8], [10, 1, 8, -8],
    [-3, -1, 1, 2], [-12, 5, -1, 12], [-7, 10, 3, 1], [1, -9, -4, -5],
    [9, 7, 1, 6], [-6, -7, -7, 9], [6, -3, 9, -2], [-13, 0, -3, 0],
    [-10, 7, 1, 4], [8, -1, 2, 4], [1, 11, 10, 4], [-1, -6, -2, 3],
    [-4, 13, 1, 7], [-8, -11, 1, 2], [-3, 11, 6, -9], [-9, -4, 1, 3],
    [-8, -6, 2, -9], [3, -1, -5, -6], [0, 5, 2, -1], [-10, 0, 1, 9],
    [-2, 5, 4, -1], [-7, 8, -1, 2], [7, -8, -1, 2], [-10, -1, 5, -8],
    [-2, 4, -6, 2], [3, 5, -4, 0], [0, -12, -4, 1], [1, 1, -4, 8],
    [6, 4, -5, 7], [5, -3, -8, -3], [4, 4, 8, 4], [-1, -5, -5, 5],
    [4, 2, -6, 6], [-2, 9, -3, 1], [-4, 4, -10, -7], [3, -7, 3, -2],
    [3, -1, 2, 0], [4, -2, 3, -13], [-7, 2, -1, -6], [7, -7, -6, 13],
    [2, -12, -1, 10], [6, -2, 1, 6], [-3, 4, 1, 3], [-3, 8, -9, 4],
    [6, 7, -2, -6], [3, -1, 2, -4], [13, -1, 2, -4], [0, -5, 1, -12],
    [3, 1, 8, -5], [5, -2, -5, 6], [8, -9, -7, 5], [-5, -5, -4, 6],
    [-5, -1, 1, 8], [-2, 10, -3, 4], [-1, 2, 1, -5], [-6, -6, 5, 6],
    [6, -3, 14, -2], [-9, 9, -1, 7], [-2, 3, -9, 0], [5, -3, 7, -4],
    [0, -2, 0, 4], [-5, 2, -9, -1], [-5, 5, -8, 7], [-8, 6, -1, 6],
    [-3, 0, -4, 7], [-2, 2, -2, -5], [-10, 5, 2, -1], [-1, 2, 9, -3],
    [5, 1, 1, 5], [2, -1, -6, 0], [-1, -2, 6, 7], [-2, 0, 4, 2],
    [6, -12, -9, -8], [-10, 6, 9, -10], [7, 1, 9, -1], [7, 5, 7, -2],
    [3, 3, 9, -1], [-6, 11, -9, -8], [-2, -1, -2, 3], [5, 1, -2, -1],
    [10, -1, -2, 0], [0, -2, -3, -3], [-6, -7, 1, 9], [3, -8, 0, 3],
    [-10, -7, 3, 14], [-11, -2, 8, 8], [-5, 6, -1, 11], [-1, 3, -3, 3],
    [0, -4, -2, -2], [4, 4, -2, 4], [11, 9, 2, -13], [5, 4, 5, 0],
    [-12, -1, -4, 3], [2, -9, 0, 3], [-2, -3, 4, -10], [2, -1, -1, -10],
    [-3, 5, 4, -2], [-4, -7, 1, 7], [11, -4, -1, -5], [8, -3, -1, 1],
    [-7, 0, -4, -7], [-1, -3, -3, -8], [1, -5, -7, 1], [-5, 0, 5, -5],
    [8, 8, 0, -1], [6, 2, -8, 4], [-5, 2, -5, -4], [7, -3, 6, -4],
    [-5, -6, 0, 4], [14, -3, 0, -3], [-7, -9, 5, 0], [3, -3, 7, 0],
    [-2, -2, 4, 4], [4, 2, 10, 1], [4, 6, -12, -3], [-11, 2, 6, -5],
    [-2, -8, -9, 1], [-3, 6, 0, -10], [-4, 0, -3, -12], [12, -3, 8, -6],
    [-6, -5, -10, -2], [2, 5, 1, -5], [-7, -4, -1, -1], [4, -8, 1, 1],
    [2, 2, -12, -7], [6, -7, -5, -3], [7, -1, 1, -8], [5, 7, 7, 3],
    [-3, -8, 2, -4], [3, 14, 2, -7], [-5, -3, 6, 2], [14, 0, 0, 5],
    [0, -7, -3, 1], [1, -3, 9, 2], [3, -8, -3, -4], [2, 8, -4, -1],
    [6, -10, 0, -4], [-8, 4, -8, -1], [-8, -10, -9, 7], [-2, -3, 0, 2],
    [0, 0, 4, -2], [-5, 5, -6, -7], [-9, 3, 3, -3], [7, -4, -4, 0],
    [-7, 5, 9, 2], [-1, 1, 10, 3], [-2, 5, 5, -7], [5, 3, -3, -3],
    [3, -3, -3, 3], [-1, -9, -12, -1], [5, 10, 10, -3], [-6, -8, -7, 9],
    [-10, -1, 5, 7], [-5, 2, 3, 8], [11, 2, 3, 3], [-4, 3, 4, 3],
    [-8, 7, -5, -7], [4, -4, -9, 0], [-1, -9, -1, -5], [-5, 2, -9, 6],
    [-1, 0, -8, 0], [-4, 7, 5, 1], [0, 3, -1, 3], [1, -9, 0, 6],
    [2, 3, 4, 1], [-1, 9, 2, -4], [2, 4, 3, 3], [-6, -9, 6, -1],
    [-5, 1, -8, -3], [12, 0, -1, 3], [-6, -9, -5, 7], [-8, -11, 11, -6],
    [11, -2, -9, 5], [4, 11, 10, -1], [1, 8, -5, -5], [2, -1, -4, 5],
    [13, -7, 7, -10], [10, 4, 0, -1], [-4, -3, 1, -7], [-2, -6, 1, -3],
    [0, 11, 1, 7], [-2, 5, -2, 7], [10, -6, -3, -1], [-1, 7, 6, -4],
    [-3, -1, -7, -12], [9, -4, -4, -3], [-3, 5, 6, -1], [-5, 0, 5, 4],
    [-4, -2, 5, 10], [1, -6, -4, -3], [9, 0, 11, -5], [-5, 1, 13, 1],
    [-8, -1, -9, 0], [-3, 8, -7, -4], [-7, 3, -7, 5], [7, -12, 5, -1],
    [-4, 1, -3, 9], [3, 1, -1, 4], [3, -2, 0, -6], [-1, 1, 2, 6],
    [-1, -9, 8, 9], [4, -8, 9, 5], [8, -2, 5, 1], [2, 11, -7, 0],
    [1, -5, 0, 6], [9, -5, -4, -5], [-7, -6, 12, 4], [3, 0, -4, -6],
    [0, -10, 8, 10], [-2, 0, -9, 4], [0, 2, -11, 7], [11, 1, -4, -5],
    [7, -3, 4, 9], [0, 11, -4, 0], [5, 6, 0, -5], [1, 6, 10, 9],
    [-2, -4, 0, 0], [12, 4, -2, -2], [-5, 5, -1, -2], [1, -2, -9, 8],
    [-1, 8, -1, 3], [8, -2, -11, 1], [7, 8, 4, -4], [7, -2, 11, -6],
    [-8, 10, -9, 5], [-3, 7, 1, -3], [3, -12, -3, 11], [-1, -5, 5, -3],
];
