// AVX2 variants of the row kernels. Each lane performs the exact operation
// sequence of the scalar reference so results are bit-identical; anything
// that cannot keep that guarantee does not belong here.

#include "blockreg/kernels.h"

#if defined(__AVX2__)

#include "blockreg/detail/interp.h"

#include <immintrin.h>

namespace blockreg::kernels {

namespace {

struct AxisSetup {
    __m128i i0;
    __m128i i1;
    __m256d f;
};

// Vector twin of detail::interp_axis for 4 positions.
inline AxisSetup axis_setup(__m256d p, int n) {
    __m256d zero = _mm256_setzero_pd();
    __m256d hi = _mm256_set1_pd((double)(n - 1));
    __m256d pc = _mm256_max_pd(zero, p); // p > 0 ? p : 0
    pc = _mm256_min_pd(pc, hi);          // pc < hi ? pc : hi
    __m128i i = _mm256_cvttpd_epi32(pc);
    i = _mm_min_epi32(i, _mm_set1_epi32(n - 2));
    i = _mm_max_epi32(i, _mm_setzero_si128());
    __m256d f = _mm256_sub_pd(pc, _mm256_cvtepi32_pd(i));
    __m128i i1 = _mm_add_epi32(i, _mm_set1_epi32(1));
    i1 = _mm_min_epi32(i1, _mm_set1_epi32(n - 1));
    return {i, i1, f};
}

inline __m256d lerp4(__m256d a, __m256d b, __m256d t) {
    return _mm256_add_pd(a, _mm256_mul_pd(t, _mm256_sub_pd(b, a)));
}

inline __m256d gather4(const float* base, __m128i idx) {
    return _mm256_cvtps_pd(_mm_i32gather_ps(base, idx, 4));
}

// 4 trilinear samples for channel c given precomputed axis setups.
inline __m256d sample4(const float* vol, int nx, int ny, int nc, int c,
                       const AxisSetup& ax, const AxisSetup& ay, const AxisSetup& az) {
    __m128i vnx = _mm_set1_epi32(nx);
    __m128i vny = _mm_set1_epi32(ny);
    __m128i vnc = _mm_set1_epi32(nc);
    __m128i vc = _mm_set1_epi32(c);

    __m128i zy0 = _mm_add_epi32(_mm_mullo_epi32(az.i0, vny), ay.i0);
    __m128i zy1 = _mm_add_epi32(_mm_mullo_epi32(az.i0, vny), ay.i1);
    __m128i zy2 = _mm_add_epi32(_mm_mullo_epi32(az.i1, vny), ay.i0);
    __m128i zy3 = _mm_add_epi32(_mm_mullo_epi32(az.i1, vny), ay.i1);

    auto corner = [&](__m128i zy, __m128i ix) {
        __m128i idx = _mm_add_epi32(_mm_mullo_epi32(zy, vnx), ix);
        idx = _mm_add_epi32(_mm_mullo_epi32(idx, vnc), vc);
        return gather4(vol, idx);
    };

    __m256d c000 = corner(zy0, ax.i0);
    __m256d c100 = corner(zy0, ax.i1);
    __m256d c010 = corner(zy1, ax.i0);
    __m256d c110 = corner(zy1, ax.i1);
    __m256d c001 = corner(zy2, ax.i0);
    __m256d c101 = corner(zy2, ax.i1);
    __m256d c011 = corner(zy3, ax.i0);
    __m256d c111 = corner(zy3, ax.i1);

    __m256d e00 = lerp4(c000, c100, ax.f);
    __m256d e10 = lerp4(c010, c110, ax.f);
    __m256d e01 = lerp4(c001, c101, ax.f);
    __m256d e11 = lerp4(c011, c111, ax.f);
    __m256d f0 = lerp4(e00, e10, ay.f);
    __m256d f1 = lerp4(e01, e11, ay.f);
    return lerp4(f0, f1, az.f);
}

void warp_row_avx2(const float* vol, int nx, int ny, int nz, int nc,
                   const float* disp, double x0, double y0, double z0,
                   double xstep, double dx, double dy, double dz,
                   double* out, int n) {
    __m256d vx0 = _mm256_set1_pd(x0);
    __m256d vy0 = _mm256_set1_pd(y0);
    __m256d vz0 = _mm256_set1_pd(z0);
    __m256d vxstep = _mm256_set1_pd(xstep);
    __m256d vdx = _mm256_set1_pd(dx);
    __m256d vdy = _mm256_set1_pd(dy);
    __m256d vdz = _mm256_set1_pd(dz);
    __m256d off_py = _mm256_set1_pd(y0 + dy);
    __m256d off_pz = _mm256_set1_pd(z0 + dz);
    __m128i comp_idx = _mm_setr_epi32(0, 3, 6, 9);

    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d iv = _mm256_cvtepi32_pd(_mm_setr_epi32(i, i + 1, i + 2, i + 3));
        __m256d cx = _mm256_add_pd(vx0, _mm256_mul_pd(vxstep, iv));
        __m256d px, py, pz;
        if (disp) {
            const float* d = disp + 3 * i;
            px = _mm256_add_pd(cx, _mm256_add_pd(gather4(d, comp_idx), vdx));
            py = _mm256_add_pd(vy0, _mm256_add_pd(gather4(d + 1, comp_idx), vdy));
            pz = _mm256_add_pd(vz0, _mm256_add_pd(gather4(d + 2, comp_idx), vdz));
        } else {
            px = _mm256_add_pd(cx, vdx);
            py = off_py;
            pz = off_pz;
        }
        AxisSetup ax = axis_setup(px, nx);
        AxisSetup ay = axis_setup(py, ny);
        AxisSetup az = axis_setup(pz, nz);
        if (nc == 1) {
            _mm256_storeu_pd(out + i, sample4(vol, nx, ny, 1, 0, ax, ay, az));
        } else {
            alignas(32) double lane[4];
            for (int c = 0; c < nc; ++c) {
                _mm256_store_pd(lane, sample4(vol, nx, ny, nc, c, ax, ay, az));
                out[(i + 0) * nc + c] = lane[0];
                out[(i + 1) * nc + c] = lane[1];
                out[(i + 2) * nc + c] = lane[2];
                out[(i + 3) * nc + c] = lane[3];
            }
        }
    }
    // Tail goes through the scalar reference; identical math.
    for (; i < n; ++i) {
        double px, py, pz;
        if (disp) {
            px = (x0 + xstep * (double)i) + ((double)disp[3 * i] + dx);
            py = y0 + ((double)disp[3 * i + 1] + dy);
            pz = z0 + ((double)disp[3 * i + 2] + dz);
        } else {
            px = (x0 + xstep * (double)i) + dx;
            py = y0 + dy;
            pz = z0 + dz;
        }
        for (int c = 0; c < nc; ++c) {
            out[i * nc + c] = detail::sample_one(vol, nx, ny, nz, nc, px, py, pz, c);
        }
    }
}

void pair_sqdist_row_avx2(const float* a, const float* b, double* out, int n) {
    __m128i comp_idx = _mm_setr_epi32(0, 3, 6, 9);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const float* pa = a + 3 * i;
        const float* pb = b + 3 * i;
        __m256d ddx = _mm256_sub_pd(gather4(pa, comp_idx), gather4(pb, comp_idx));
        __m256d ddy = _mm256_sub_pd(gather4(pa + 1, comp_idx), gather4(pb + 1, comp_idx));
        __m256d ddz = _mm256_sub_pd(gather4(pa + 2, comp_idx), gather4(pb + 2, comp_idx));
        __m256d s = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(ddx, ddx), _mm256_mul_pd(ddy, ddy)),
            _mm256_mul_pd(ddz, ddz));
        _mm256_storeu_pd(out + i, s);
    }
    for (; i < n; ++i) {
        double ddx = (double)a[3 * i] - (double)b[3 * i];
        double ddy = (double)a[3 * i + 1] - (double)b[3 * i + 1];
        double ddz = (double)a[3 * i + 2] - (double)b[3 * i + 2];
        out[i] = (ddx * ddx + ddy * ddy) + ddz * ddz;
    }
}

void blur5_rows_avx2(const float* r0, const float* r1, const float* r2,
                     const float* r3, const float* r4,
                     const double* w, float* out, int n) {
    __m256d w0 = _mm256_set1_pd(w[0]);
    __m256d w1 = _mm256_set1_pd(w[1]);
    __m256d w2 = _mm256_set1_pd(w[2]);
    __m256d w3 = _mm256_set1_pd(w[3]);
    __m256d w4 = _mm256_set1_pd(w[4]);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_cvtps_pd(_mm_loadu_ps(r0 + i));
        __m256d b = _mm256_cvtps_pd(_mm_loadu_ps(r1 + i));
        __m256d c = _mm256_cvtps_pd(_mm_loadu_ps(r2 + i));
        __m256d d = _mm256_cvtps_pd(_mm_loadu_ps(r3 + i));
        __m256d e = _mm256_cvtps_pd(_mm_loadu_ps(r4 + i));
        __m256d t01 = _mm256_add_pd(_mm256_mul_pd(w0, a), _mm256_mul_pd(w1, b));
        __m256d t23 = _mm256_add_pd(_mm256_mul_pd(w2, c), _mm256_mul_pd(w3, d));
        __m256d t = _mm256_add_pd(_mm256_add_pd(t01, t23), _mm256_mul_pd(w4, e));
        _mm_storeu_ps(out + i, _mm256_cvtpd_ps(t));
    }
    for (; i < n; ++i) {
        double t01 = w[0] * (double)r0[i] + w[1] * (double)r1[i];
        double t23 = w[2] * (double)r2[i] + w[3] * (double)r3[i];
        out[i] = (float)((t01 + t23) + w[4] * (double)r4[i]);
    }
}

} // namespace

const Kernels* avx2_kernels() {
    static const Kernels k{"avx2", warp_row_avx2, pair_sqdist_row_avx2, blur5_rows_avx2};
    return &k;
}

} // namespace blockreg::kernels

#else

namespace blockreg::kernels {
const Kernels* avx2_kernels() { return nullptr; }
} // namespace blockreg::kernels

#endif
