#include "blockreg/metrics.h"

#include "blockreg/volume_ops.h"
#include "oracles.h"

#include <doctest.h>

#include <stdexcept>

#include <random>

using namespace blockreg;

TEST_CASE("vme of zero fields and exact constant inverses is zero") {
    const int3 dims{5, 5, 5};
    DisplacementField zero(dims);
    CHECK(vme(zero, zero) == 0.0);

    DisplacementField fwd(dims), rev(dims);
    for (int z = 0; z < dims.z; ++z) {
        for (int y = 0; y < dims.y; ++y) {
            for (int x = 0; x < dims.x; ++x) {
                fwd.set(x, y, z, {1.5, -0.5, 0.25});
                rev.set(x, y, z, {-1.5, 0.5, -0.25});
            }
        }
    }
    CHECK(vme(fwd, rev) == 0.0);
}

TEST_CASE("vme matches the direct composition oracle") {
    std::mt19937_64 rng(61);
    const int3 dims{6, 5, 4};
    DisplacementField fwd = oracle::random_field(rng, dims, 1.0);
    DisplacementField rev = oracle::random_field(rng, dims, 1.0);

    double want = 0.0;
    for (int z = 0; z < dims.z; ++z) {
        for (int y = 0; y < dims.y; ++y) {
            for (int x = 0; x < dims.x; ++x) {
                double3 uf = fwd.get(x, y, z);
                double3 p{x + uf.x, y + uf.y, z + uf.z};
                double3 ur{oracle::trilinear_component(rev, p, 0),
                           oracle::trilinear_component(rev, p, 1),
                           oracle::trilinear_component(rev, p, 2)};
                // residual of W_rev(W_fwd(x)) - x
                CompensatedSum dummy;
                (void)dummy;
                double3 res = uf + ur;
                want += norm(res);
            }
        }
    }
    want /= (double)dims.x * dims.y * dims.z;
    CHECK(vme(fwd, rev) == doctest::Approx(want).epsilon(1e-5));

    // Generally asymmetric.
    CHECK(vme(fwd, rev) != vme(rev, fwd));
}

TEST_CASE("vme requires a shared grid") {
    DisplacementField a({3, 3, 3}), b({4, 3, 3});
    CHECK_THROWS_AS(vme(a, b), std::invalid_argument);
}

TEST_CASE("checkerboard tiles follow parity and degenerate to one source") {
    std::mt19937_64 rng(62);
    const int3 dims{8, 6, 3};
    Volume a = oracle::random_volume(rng, dims, 1);
    Volume b = oracle::random_volume(rng, dims, 1);

    RgbImage img = checkerboard(a, b, 2, 2, 1);
    REQUIRE(img.width == 8);
    REQUIRE(img.height == 6);

    // Pixel source dictated by tile parity: A tiles are gray (r==g==b),
    // B tiles are pure red (g==b==0).
    for (int j = 0; j < img.height; ++j) {
        for (int i = 0; i < img.width; ++i) {
            const uint8_t* px = img.pixels.data() + ((std::size_t)j * img.width + i) * 3;
            bool a_tile = ((i / 2) + (j / 2)) % 2 == 0;
            if (a_tile) {
                CHECK(px[0] == px[1]);
                CHECK(px[1] == px[2]);
            } else {
                CHECK(px[1] == 0);
                CHECK(px[2] == 0);
            }
        }
    }

    // Tile as large as the slice: the image is exactly the A slice rendering.
    RgbImage whole = checkerboard(a, b, 64, 2, 1);
    for (int j = 0; j < whole.height; ++j) {
        for (int i = 0; i < whole.width; ++i) {
            const uint8_t* px = whole.pixels.data() + ((std::size_t)j * whole.width + i) * 3;
            CHECK(px[0] == px[1]);
            CHECK(px[1] == px[2]);
        }
    }

    // A == B: both tile kinds render the same underlying values in red.
    RgbImage same = checkerboard(a, a, 2, 2, 1);
    for (int j = 0; j < same.height; ++j) {
        for (int i = 0; i < same.width; ++i) {
            const uint8_t* px = same.pixels.data() + ((std::size_t)j * same.width + i) * 3;
            const uint8_t* full =
                whole.pixels.data() + ((std::size_t)j * whole.width + i) * 3;
            bool a_tile = ((i / 2) + (j / 2)) % 2 == 0;
            if (!a_tile) {
                // red channel carries the identical normalized value
                CHECK(px[0] == full[0]);
            }
        }
    }
}

TEST_CASE("checkerboard validates its inputs") {
    Volume a({{4, 4, 4}, {1, 1, 1}, 1});
    Volume b({{4, 4, 2}, {1, 1, 1}, 1});
    CHECK_THROWS_AS(checkerboard(a, b, 2, 2, 0), std::invalid_argument);
    Volume c({{4, 4, 4}, {1, 1, 1}, 1});
    CHECK_THROWS_AS(checkerboard(a, c, 2, 2, 7), std::invalid_argument);
    CHECK_THROWS_AS(checkerboard(a, c, 2, 5, 0), std::invalid_argument);
    CHECK_THROWS_AS(checkerboard(a, c, 0, 2, 0), std::invalid_argument);
}
