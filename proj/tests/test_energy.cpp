#include "blockreg/energy.h"

#include "oracles.h"

#include <doctest.h>

#include <stdexcept>

#include <random>

using namespace blockreg;

namespace {

Volume constant_volume(const int3& dims, float value, int channels = 1) {
    GridMeta meta;
    meta.dims = dims;
    meta.channels = channels;
    return Volume(meta, std::vector<float>(meta.value_count(), value));
}

} // namespace

TEST_CASE("energy params validation") {
    CHECK_THROWS_AS(EnergyParams{-0.1}.validate(), std::invalid_argument);
    CHECK_THROWS_AS(EnergyParams{1.5}.validate(), std::invalid_argument);
    CHECK_NOTHROW(EnergyParams{0.0}.validate());
    CHECK_NOTHROW(EnergyParams{1.0}.validate());
}

TEST_CASE("data term basics") {
    EnergyParams params{0.1};

    std::mt19937_64 rng(31);
    Volume t = oracle::random_volume(rng, {4, 4, 4}, 1);
    DisplacementField zero(t.dims());
    CHECK(data_term(t, t, zero, params) == 0.0);

    Volume a = constant_volume({1, 1, 1}, 2.0f);
    Volume b = constant_volume({1, 1, 1}, 5.0f);
    CHECK(data_term(a, b, DisplacementField({1, 1, 1}), params) == 9.0);

    Volume two_ch = constant_volume({1, 1, 1}, 0.0f, 2);
    CHECK_THROWS_AS(data_term(a, two_ch, DisplacementField({1, 1, 1}), params),
                    std::invalid_argument);
}

TEST_CASE("data term matches the per-voxel loop oracle") {
    std::mt19937_64 rng(32);
    EnergyParams params{0.1};
    Volume t = oracle::random_volume(rng, {4, 4, 4}, 2);
    Volume s = oracle::random_volume(rng, {4, 4, 4}, 2);
    DisplacementField u = oracle::random_field(rng, {4, 4, 4}, 1.2);

    double want = 0.0;
    for (int z = 0; z < 4; ++z) {
        for (int y = 0; y < 4; ++y) {
            for (int x = 0; x < 4; ++x) {
                double3 d = u.get(x, y, z);
                double acc = 0.0;
                for (int c = 0; c < 2; ++c) {
                    double sv = oracle::trilinear(s, x + d.x, y + d.y, z + d.z, c);
                    double diff = (double)t.at(x, y, z, c) - sv;
                    acc += diff * diff;
                }
                want += acc / 2.0;
            }
        }
    }
    CHECK(data_term(t, s, u, params) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("regularization term") {
    DisplacementField constant({3, 3, 3});
    for (int z = 0; z < 3; ++z) {
        for (int y = 0; y < 3; ++y) {
            for (int x = 0; x < 3; ++x) constant.set(x, y, z, {0.5, -1.0, 2.0});
        }
    }
    CHECK(regularization_term(constant) == 0.0);

    DisplacementField pairf({2, 1, 1});
    pairf.set(0, 0, 0, {0.0, 0.0, 0.0});
    pairf.set(1, 0, 0, {1.0, 0.0, 0.0});
    CHECK(regularization_term(pairf) == 1.0);

    std::mt19937_64 rng(33);
    DisplacementField u = oracle::random_field(rng, {3, 3, 3}, 2.0);
    double want = 0.0;
    constexpr int3 dirs[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int z = 0; z < 3; ++z) {
        for (int y = 0; y < 3; ++y) {
            for (int x = 0; x < 3; ++x) {
                for (const int3& d : dirs) {
                    int3 w{x + d.x, y + d.y, z + d.z};
                    if (w.x >= 3 || w.y >= 3 || w.z >= 3) continue;
                    want += norm_sq(u.get(x, y, z) - u.get(w));
                }
            }
        }
    }
    CHECK(regularization_term(u) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("total energy mixes the terms by alpha") {
    std::mt19937_64 rng(34);
    Volume t = oracle::random_volume(rng, {4, 4, 4}, 1);
    Volume s = oracle::random_volume(rng, {4, 4, 4}, 1);
    DisplacementField u = oracle::random_field(rng, {4, 4, 4}, 1.0);

    CHECK(total_energy(t, s, u, EnergyParams{0.0}) ==
          doctest::Approx(data_term(t, s, u, EnergyParams{0.0})).epsilon(1e-12));
    CHECK(total_energy(t, s, u, EnergyParams{1.0}) ==
          doctest::Approx(regularization_term(u)).epsilon(1e-12));

    EnergyParams params{0.1};
    double want = 0.9 * data_term(t, s, u, params) + 0.1 * regularization_term(u);
    CHECK(total_energy(t, s, u, params) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("unary terms") {
    std::mt19937_64 rng(35);
    EnergyParams params{0.1};
    Volume t = oracle::random_volume(rng, {3, 3, 3}, 1);
    Volume s = oracle::random_volume(rng, {3, 3, 3}, 1);
    DisplacementField u = oracle::random_field(rng, {3, 3, 3}, 0.8);

    UnaryPair same = unary_terms(t, s, u, {1, 1, 1}, {0, 0, 0}, params);
    CHECK(same.e0 == same.e1);

    Volume flat = constant_volume({3, 3, 3}, 1.5f);
    UnaryPair zero = unary_terms(flat, flat, u, {1, 1, 1}, {0.5, 0, 0}, params);
    CHECK(zero.e0 == 0.0);
    CHECK(zero.e1 == 0.0);

    for (int rep = 0; rep < 50; ++rep) {
        int3 v{oracle::uniform_int(rng, 0, 2), oracle::uniform_int(rng, 0, 2),
               oracle::uniform_int(rng, 0, 2)};
        double3 delta{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1),
                      oracle::uniform(rng, -1, 1)};
        UnaryPair up = unary_terms(t, s, u, v, delta, params);
        double3 d = u.get(v);
        double want0 = 0.9 * [&] {
            double sv = oracle::trilinear(s, v.x + d.x, v.y + d.y, v.z + d.z, 0);
            double diff = (double)t.at(v.x, v.y, v.z, 0) - sv;
            return diff * diff;
        }();
        double3 d1 = d + delta;
        double want1 = 0.9 * [&] {
            double sv = oracle::trilinear(s, v.x + d1.x, v.y + d1.y, v.z + d1.z, 0);
            double diff = (double)t.at(v.x, v.y, v.z, 0) - sv;
            return diff * diff;
        }();
        CHECK(up.e0 == doctest::Approx(want0).epsilon(1e-12));
        CHECK(up.e1 == doctest::Approx(want1).epsilon(1e-12));
    }
}

TEST_CASE("binary terms: direct values and the submodularity gap") {
    EnergyParams params{0.1};
    DisplacementField zero({2, 1, 1});

    BinaryQuad same = binary_terms(zero, {0, 0, 0}, {1, 0, 0}, {0, 0, 0}, params);
    CHECK(same.e00 == same.e01);
    CHECK(same.e00 == same.e10);
    CHECK(same.e00 == same.e11);

    BinaryQuad q = binary_terms(zero, {0, 0, 0}, {1, 0, 0}, {1, 0, 0}, params);
    CHECK(q.e00 == 0.0);
    CHECK(q.e11 == 0.0);
    CHECK(q.e10 == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(q.e01 == doctest::Approx(0.1).epsilon(1e-12));

    CHECK_THROWS_AS(binary_terms(zero, {0, 0, 0}, {0, 0, 0}, {1, 0, 0}, params),
                    std::invalid_argument);

    std::mt19937_64 rng(36);
    DisplacementField u = oracle::random_field(rng, {3, 3, 3}, 2.0);
    for (int rep = 0; rep < 1000; ++rep) {
        int3 v{oracle::uniform_int(rng, 0, 2), oracle::uniform_int(rng, 0, 2),
               oracle::uniform_int(rng, 0, 2)};
        int axis = oracle::uniform_int(rng, 0, 2);
        int3 w = v;
        (axis == 0 ? w.x : axis == 1 ? w.y : w.z) += 1;
        if (w.x > 2 || w.y > 2 || w.z > 2) continue;
        double3 delta{oracle::uniform(rng, -2, 2), oracle::uniform(rng, -2, 2),
                      oracle::uniform(rng, -2, 2)};
        BinaryQuad bq = binary_terms(u, v, w, delta, params);
        CHECK(bq.e00 == bq.e11);
        CHECK(check_submodular(bq));
        double gap = bq.e01 + bq.e10 - bq.e00 - bq.e11;
        double want = 2.0 * params.alpha * norm_sq(delta);
        CHECK(gap == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("check_submodular literal quads") {
    CHECK(check_submodular(BinaryQuad{0, 1, 1, 0}));
    CHECK(!check_submodular(BinaryQuad{2, 1, 1, 2}));
}

TEST_CASE("label decomposition reproduces the total energy of the moved field") {
    std::mt19937_64 rng(37);
    EnergyParams params{0.1};
    const int3 dims{3, 3, 2};
    Volume t = oracle::random_volume(rng, dims, 1);
    Volume s = oracle::random_volume(rng, dims, 1);

    constexpr int3 dirs[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int rep = 0; rep < 20; ++rep) {
        // Quarter-integer values keep u + delta exactly representable in the
        // field's f32 storage, so Eq. 5's field carries no rounding.
        DisplacementField u(dims);
        for (std::size_t i = 0; i < u.size(); ++i) {
            u.data()[i] = (float)(0.25 * oracle::uniform_int(rng, -4, 4));
        }
        double3 delta{0.25 * oracle::uniform_int(rng, -4, 4),
                      0.25 * oracle::uniform_int(rng, -4, 4),
                      0.25 * oracle::uniform_int(rng, -4, 4)};

        // Random labeling over the whole grid.
        DisplacementField moved = u;
        std::vector<uint8_t> label(u.voxel_count());
        for (auto& l : label) l = (uint8_t)(rng() & 1);
        auto lab = [&](int x, int y, int z) {
            return label[(z * dims.y + y) * dims.x + x] != 0;
        };

        double assembled = 0.0;
        for (int z = 0; z < dims.z; ++z) {
            for (int y = 0; y < dims.y; ++y) {
                for (int x = 0; x < dims.x; ++x) {
                    int3 v{x, y, z};
                    UnaryPair up = unary_terms(t, s, u, v, delta, params);
                    assembled += lab(x, y, z) ? up.e1 : up.e0;
                    if (lab(x, y, z)) moved.set(v, u.get(v) + delta);
                    for (const int3& d : dirs) {
                        int3 w = v + d;
                        if (w.x >= dims.x || w.y >= dims.y || w.z >= dims.z) continue;
                        BinaryQuad bq = binary_terms(u, v, w, delta, params);
                        bool lv = lab(x, y, z), lw = lab(w.x, w.y, w.z);
                        assembled += lv ? (lw ? bq.e11 : bq.e10) : (lw ? bq.e01 : bq.e00);
                    }
                }
            }
        }
        double direct = total_energy(t, s, moved, params);
        CHECK(assembled == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("terms are non-negative") {
    std::mt19937_64 rng(38);
    for (int rep = 0; rep < 10; ++rep) {
        Volume t = oracle::random_volume(rng, {3, 3, 3}, 1, -5.0, 5.0);
        Volume s = oracle::random_volume(rng, {3, 3, 3}, 1, -5.0, 5.0);
        DisplacementField u = oracle::random_field(rng, {3, 3, 3}, 3.0);
        CHECK(data_term(t, s, u, EnergyParams{0.5}) >= 0.0);
        CHECK(regularization_term(u) >= 0.0);
    }
}
