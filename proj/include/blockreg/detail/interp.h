#pragma once

namespace blockreg::detail {

// Clamped axis setup for trilinear interpolation: i0/i1 are the two corner
// indices, f the fractional weight in [0,1]. Positions past the border clamp
// onto it. n == 1 degenerates to i0 == i1 == 0, f == 0.
inline void interp_axis(double p, int n, int& i0, int& i1, double& f) {
    // Comparison form chosen to coincide with vector max/min semantics.
    double pc = (p > 0.0) ? p : 0.0;
    double hi = (double)(n - 1);
    pc = (pc < hi) ? pc : hi;
    int i = (int)pc;
    if (i > n - 2) i = n - 2;
    if (i < 0) i = 0;
    f = pc - (double)i;
    i0 = i;
    i1 = i + 1;
    if (i1 > n - 1) i1 = n - 1;
}

inline double lerp(double a, double b, double t) {
    return a + t * (b - a);
}

// Volume linear index (x fastest, then y, then z). Kept in 32-bit arithmetic
// because the gather kernels index with int32; Volume construction enforces
// the matching size limit.
inline int voxel_index(int x, int y, int z, int nx, int ny) {
    return (z * ny + y) * nx + x;
}

// One trilinear sample of an interleaved volume. This is the reference
// evaluation order; the vector kernels replicate it operation for operation.
inline double sample_one(const float* vol, int nx, int ny, int nz, int nc,
                         double px, double py, double pz, int c) {
    int x0, x1, y0, y1, z0, z1;
    double fx, fy, fz;
    interp_axis(px, nx, x0, x1, fx);
    interp_axis(py, ny, y0, y1, fy);
    interp_axis(pz, nz, z0, z1, fz);

    auto idx = [&](int x, int y, int z) { return voxel_index(x, y, z, nx, ny) * nc + c; };

    double c000 = vol[idx(x0, y0, z0)];
    double c100 = vol[idx(x1, y0, z0)];
    double c010 = vol[idx(x0, y1, z0)];
    double c110 = vol[idx(x1, y1, z0)];
    double c001 = vol[idx(x0, y0, z1)];
    double c101 = vol[idx(x1, y0, z1)];
    double c011 = vol[idx(x0, y1, z1)];
    double c111 = vol[idx(x1, y1, z1)];

    double e00 = lerp(c000, c100, fx);
    double e10 = lerp(c010, c110, fx);
    double e01 = lerp(c001, c101, fx);
    double e11 = lerp(c011, c111, fx);
    double f0 = lerp(e00, e10, fy);
    double f1 = lerp(e01, e11, fy);
    return lerp(f0, f1, fz);
}

} // namespace blockreg::detail
