"""Published reference values used by the verification suite.

``LOG_ZETA[m]`` holds log zeta on the sigma2 grid 0.1, 0.2, ..., 2.4 (beta=1).
``NEG_LOG_ZETA_SMALL`` holds -log zeta at sigma2 = 0.01 for even m.
``LOG_Z4[m]`` holds log z_4 on the same sigma2 grid, and
``NEG_LOG_Z4_SMALL`` holds -log z_4 at sigma2 = 0.02 for m = 1..20.
"""

SIGMA2_GRID = tuple(round(0.1 * k, 1) for k in range(1, 25))

LOG_ZETA = {
    2: (
        -0.68, 0.376, 1.001, 1.449, 1.801, 2.092,
        2.34, 2.557, 2.751, 2.926, 3.086, 3.234,
        3.372, 3.5, 3.621, 3.735, 3.844, 3.947,
        4.046, 4.141, 4.232, 4.319, 4.404, 4.486,
    ),
    3: (
        -2.776, -0.033, 1.561, 2.685, 3.553, 4.26,
        4.855, 5.37, 5.824, 6.23, 6.597, 6.933,
        7.243, 7.53, 7.799, 8.051, 8.29, 8.516,
        8.731, 8.936, 9.133, 9.322, 9.504, 9.68,
    ),
    4: (
        -2.173, 1.446, 3.628, 5.223, 6.495, 7.566,
        8.497, 9.328, 10.08, 10.773, 11.416, 12.02,
        12.59, 13.131, 13.649, 14.145, 14.624, 15.086,
        15.534, 15.969, 16.393, 16.807, 17.211, 17.607,
    ),
    5: (
        -6.142, 0.537, 4.492, 7.339, 9.583, 11.449,
        13.057, 14.478, 15.758, 16.93, 18.014, 19.028,
        19.984, 20.891, 21.757, 22.588, 23.388, 24.162,
        24.914, 25.645, 26.358, 27.055, 27.738, 28.409,
    ),
    6: (
        -4.374, 3.418, 8.2, 11.755, 14.641, 17.108,
        19.287, 21.259, 23.073, 24.765, 26.359, 27.874,
        29.323, 30.716, 32.062, 33.368, 34.638, 35.879,
        37.093, 38.283, 39.452, 40.602, 41.735, 42.854,
    ),
    7: (
        -9.899, 2.342, 9.725, 15.138, 19.485, 23.169,
        26.403, 29.315, 31.987, 34.473, 36.813, 39.035,
        41.161, 43.207, 45.186, 47.108, 48.981, 50.813,
        52.608, 54.371, 56.107, 57.817, 59.505, 61.173,
    ),
    8: (
        -7.182, 6.511, 15.056, 21.513, 26.837, 31.456,
        35.596, 39.39, 42.927, 46.264, 49.444, 52.496,
        55.443, 58.303, 61.09, 63.815, 66.486, 69.11,
        71.694, 74.242, 76.759, 79.248, 81.713, 84.154,
    ),
    9: (
        -14.007, 5.538, 17.541, 26.502, 33.829, 40.142,
        45.779, 50.935, 55.734, 60.261, 64.575, 68.72,
        72.726, 76.619, 80.417, 84.135, 87.785, 91.377,
        94.918, 98.4151, 101.874, 105.298, 108.692, 112.059,
    ),
    10: (
        -10.489, 10.945, 24.546, 34.983, 43.719, 51.401,
        58.374, 64.842, 70.936, 76.742, 82.323, 87.725,
        92.979, 98.112, 103.144, 108.09, 112.964, 117.774,
        122.529, 127.237, 131.902, 136.53, 141.126, 145.691,
    ),
    11: (
        -18.406, 10.309, 28.26, 41.895, 53.23, 63.156,
        72.146, 80.477, 88.324, 95.805, 103.003, 109.975,
        116.766, 123.408, 129.927, 136.343, 142.671, 148.924,
        155.111, 161.243, 167.325, 173.364, 179.364, 185.329,
    ),
    12: (
        -14.188, 16.951, 37.033, 52.678, 65.954, 77.778,
        88.632, 98.803, 108.472, 117.76, 126.751, 135.506,
        144.071, 152.479, 160.758, 168.927, 177.002, 184.999,
        192.926, 200.793, 208.607, 216.374, 224.101, 231.79,
    ),
}

LOG_Z4 = {
    2: (
        -5.46, -4.008, -3.115, -2.454, -1.917, -1.46,
        -1.057, -0.693, -0.359, -0.04683, 0.247, 0.526,
        0.794, 1.051, 1.301, 1.543, 1.78, 2.011,
        2.239, 2.462, 2.683, 2.901, 3.116, 3.33,
    ),
    3: (
        -12.993, -8.527, -5.737, -3.633, -1.902, -0.403,
        0.94, 2.171, 3.318, 4.402, 5.435, 6.43,
        7.392, 8.329, 9.244, 10.142, 11.026, 11.897,
        12.758, 13.61, 14.455, 15.293, 16.126, 16.955,
    ),
    4: (
        -22.443, -13.291, -7.477, -3.021, 0.703, 3.976,
        6.947, 9.706, 12.308, 14.793, 17.187, 19.511,
        21.779, 24.002, 26.189, 28.346, 30.478, 32.591,
        34.686, 36.767, 38.837, 40.896, 42.947, 44.991,
    ),
    5: (
        -33.163, -17.533, -7.439, 0.4189, 7.083, 13.019,
        18.475, 23.596, 28.476, 33.176, 37.74, 42.199,
        46.576, 50.887, 55.146, 59.365, 63.55, 67.705,
        71.846, 76.049, 80.407, 83.995, 94.476, 99.749,
    ),
    6: (
        -44.62, -20.597, -4.83, 7.629, 18.342, 28.002,
        36.977, 45.48, 53.649, 61.572, 69.319, 76.931,
        83.662, 94.386, 108.756, 120.963, 137.087, 134.41,
        165.131, 180.287, 171.118, 179.404, 230.606, 211.766,
    ),
    7: (
        -56.352, -21.896, 1.082, 19.502, 35.542, 50.166,
        63.881, 76.859, 91.584, 110.199, 132.388, 152.264,
        163.07, 198.697, 214.792, 202.635, 288.985, 277.438,
        344.463, 373.588, 361.125, 359.058, 413.542, 408.297,
    ),
}

NEG_LOG_ZETA_SMALL_SIGMA2 = 0.01
NEG_LOG_ZETA_SMALL = dict(zip(range(2, 41, 2), (
    4.150, 13.822, 29.007, 49.694, 71.487, 93.286, 113.424, 135.129, 156.057, 175.890,
    199.322, 219.185, 244.263, 267.156, 295.836, 319.471, 349.711, 378.587, 410.486, 444.106,
)))

NEG_LOG_Z4_SMALL_SIGMA2 = 0.02
NEG_LOG_Z4_SMALL = dict(zip(range(1, 21), (
    0.693, 8.789, 23.061, 42.750, 67.319, 92.443, 117.980, 141.695, 167.451, 191.576,
    211.572, 235.962, 256.665, 275.833, 293.453, 308.834, 321.895, 334.330, 343.452, 356.662,
)))
