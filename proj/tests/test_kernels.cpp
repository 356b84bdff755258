#include "blockreg/kernels.h"

#include "oracles.h"

#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

using namespace blockreg;

namespace {

// Bitwise comparison of doubles, including signed zeros.
bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits_f(const std::vector<float>& a, const std::vector<float>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

} // namespace

TEST_CASE("kernel variants are bit-identical to the scalar reference") {
    auto variants = kernels::available();
    REQUIRE(!variants.empty());
    CHECK(kernels::find("scalar") == &kernels::scalar());

    std::mt19937_64 rng(99);
    const auto& ref = kernels::scalar();

    for (const auto* k : variants) {
        CAPTURE(k->name);

        // warp_row over many shapes, channels and edge lengths, positions
        // running past the borders.
        for (int rep = 0; rep < 40; ++rep) {
            int3 dims{oracle::uniform_int(rng, 1, 9), oracle::uniform_int(rng, 1, 7),
                      oracle::uniform_int(rng, 1, 6)};
            int nc = oracle::uniform_int(rng, 1, 3);
            Volume vol = oracle::random_volume(rng, dims, nc, -2.0, 2.0);
            int n = oracle::uniform_int(rng, 0, 13);
            std::vector<float> disp((std::size_t)n * 3);
            for (float& f : disp) f = (float)oracle::uniform(rng, -4.0, 4.0);
            double x0 = oracle::uniform(rng, -1.0, 2.0);
            double y0 = oracle::uniform(rng, -1.0, (double)dims.y);
            double z0 = oracle::uniform(rng, -1.0, (double)dims.z);
            double delta[3] = {oracle::uniform(rng, -1.0, 1.0), oracle::uniform(rng, -1.0, 1.0),
                               oracle::uniform(rng, -1.0, 1.0)};
            double xstep = rep % 2 == 0 ? 1.0 : 0.5;
            const float* dptr = rep % 3 == 0 ? nullptr : disp.data();

            std::vector<double> out_ref((std::size_t)n * nc), out_k((std::size_t)n * nc);
            ref.warp_row(vol.data(), dims.x, dims.y, dims.z, nc, dptr, x0, y0, z0, xstep,
                         delta[0], delta[1], delta[2], out_ref.data(), n);
            k->warp_row(vol.data(), dims.x, dims.y, dims.z, nc, dptr, x0, y0, z0, xstep,
                        delta[0], delta[1], delta[2], out_k.data(), n);
            CHECK(same_bits(out_ref, out_k));
        }

        // pair_sqdist_row
        for (int rep = 0; rep < 20; ++rep) {
            int n = oracle::uniform_int(rng, 0, 21);
            std::vector<float> a((std::size_t)n * 3), b((std::size_t)n * 3);
            for (float& f : a) f = (float)oracle::uniform(rng, -3.0, 3.0);
            for (float& f : b) f = (float)oracle::uniform(rng, -3.0, 3.0);
            std::vector<double> out_ref(n), out_k(n);
            ref.pair_sqdist_row(a.data(), b.data(), out_ref.data(), n);
            k->pair_sqdist_row(a.data(), b.data(), out_k.data(), n);
            CHECK(same_bits(out_ref, out_k));
        }

        // blur5_rows
        for (int rep = 0; rep < 20; ++rep) {
            int n = oracle::uniform_int(rng, 0, 19);
            std::vector<std::vector<float>> rows(5, std::vector<float>((std::size_t)n));
            for (auto& r : rows) {
                for (float& f : r) f = (float)oracle::uniform(rng, -5.0, 5.0);
            }
            double w[5];
            for (double& x : w) x = oracle::uniform(rng, 0.0, 0.5);
            std::vector<float> out_ref(n), out_k(n);
            ref.blur5_rows(rows[0].data(), rows[1].data(), rows[2].data(), rows[3].data(),
                           rows[4].data(), w, out_ref.data(), n);
            k->blur5_rows(rows[0].data(), rows[1].data(), rows[2].data(), rows[3].data(),
                          rows[4].data(), w, out_k.data(), n);
            CHECK(same_bits_f(out_ref, out_k));
        }
    }
}

TEST_CASE("active kernel honors the BLOCKREG_KERNELS override hook") {
    const auto& saved = kernels::active();
    kernels::set_active(kernels::scalar());
    CHECK(std::string(kernels::active().name) == "scalar");
    kernels::set_active(saved);
}
