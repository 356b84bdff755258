#include "blockreg/kernels.h"

#include "blockreg/detail/interp.h"

namespace blockreg::kernels {

namespace {

void warp_row_scalar(const float* vol, int nx, int ny, int nz, int nc,
                     const float* disp, double x0, double y0, double z0,
                     double xstep, double dx, double dy, double dz,
                     double* out, int n) {
    if (disp) {
        for (int i = 0; i < n; ++i) {
            double px = (x0 + xstep * (double)i) + ((double)disp[3 * i] + dx);
            double py = y0 + ((double)disp[3 * i + 1] + dy);
            double pz = z0 + ((double)disp[3 * i + 2] + dz);
            for (int c = 0; c < nc; ++c) {
                out[i * nc + c] = detail::sample_one(vol, nx, ny, nz, nc, px, py, pz, c);
            }
        }
    } else {
        double py = y0 + dy;
        double pz = z0 + dz;
        for (int i = 0; i < n; ++i) {
            double px = (x0 + xstep * (double)i) + dx;
            for (int c = 0; c < nc; ++c) {
                out[i * nc + c] = detail::sample_one(vol, nx, ny, nz, nc, px, py, pz, c);
            }
        }
    }
}

void pair_sqdist_row_scalar(const float* a, const float* b, double* out, int n) {
    for (int i = 0; i < n; ++i) {
        double ddx = (double)a[3 * i] - (double)b[3 * i];
        double ddy = (double)a[3 * i + 1] - (double)b[3 * i + 1];
        double ddz = (double)a[3 * i + 2] - (double)b[3 * i + 2];
        out[i] = (ddx * ddx + ddy * ddy) + ddz * ddz;
    }
}

void blur5_rows_scalar(const float* r0, const float* r1, const float* r2,
                       const float* r3, const float* r4,
                       const double* w, float* out, int n) {
    for (int i = 0; i < n; ++i) {
        double t01 = w[0] * (double)r0[i] + w[1] * (double)r1[i];
        double t23 = w[2] * (double)r2[i] + w[3] * (double)r3[i];
        out[i] = (float)((t01 + t23) + w[4] * (double)r4[i]);
    }
}

} // namespace

const Kernels& scalar() {
    static const Kernels k{"scalar", warp_row_scalar, pair_sqdist_row_scalar, blur5_rows_scalar};
    return k;
}

} // namespace blockreg::kernels
