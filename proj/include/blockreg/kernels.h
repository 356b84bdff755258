#pragma once

#include <string_view>
#include <vector>

namespace blockreg::kernels {

// Row kernels behind the hot loops. Every variant must produce bit-identical
// per-element results to the scalar reference: the optimizer's bookkeeping
// (exact move deltas, early-termination skips, replay determinism) assumes
// the same value regardless of which implementation computed it. Reductions
// therefore stay with the caller; kernels only emit per-element values.

// Trilinear samples of an interleaved volume along an x-run of positions
//   p_i = ((x0 + xstep*i) + (disp[3i] + dx), y0 + (disp[3i+1] + dy),
//          z0 + (disp[3i+2] + dz))
// with border clamping. `disp` may be null (offset-only positions). Writes
// n*nc doubles, channel-interleaved.
using WarpRowFn = void (*)(const float* vol, int nx, int ny, int nz, int nc,
                           const float* disp, double x0, double y0, double z0,
                           double xstep, double dx, double dy, double dz,
                           double* out, int n);

// out[i] = squared Euclidean distance of interleaved 3-vectors a_i, b_i.
using PairSqDistRowFn = void (*)(const float* a, const float* b, double* out, int n);

// out[i] = (float)(((w0*r0[i] + w1*r1[i]) + (w2*r2[i] + w3*r3[i])) + w4*r4[i])
using Blur5RowsFn = void (*)(const float* r0, const float* r1, const float* r2,
                             const float* r3, const float* r4,
                             const double* w, float* out, int n);

struct Kernels {
    const char* name;
    WarpRowFn warp_row;
    PairSqDistRowFn pair_sqdist_row;
    Blur5RowsFn blur5_rows;
};

const Kernels& scalar();

// Variants compiled in and usable on this CPU (always includes scalar).
std::vector<const Kernels*> available();

// Lookup by name ("scalar", "avx2"); nullptr if unknown or unsupported here.
const Kernels* find(std::string_view name);

// Selected once per process: best supported variant, overridable with the
// BLOCKREG_KERNELS environment variable.
const Kernels& active();

// Test hook; not thread-safe against concurrent kernel use.
void set_active(const Kernels& k);

} // namespace blockreg::kernels
