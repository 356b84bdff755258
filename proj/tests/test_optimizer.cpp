#include "blockreg/optimizer.h"

#include "blockreg/phantom.h"
#include "blockreg/volume_ops.h"
#include "oracles.h"

#include <doctest.h>

#include <stdexcept>

#include <random>
#include <set>

using namespace blockreg;

TEST_CASE("delta set order and magnitudes") {
    DeltaSet d(0.5);
    CHECK(d.vectors[0] == double3{0.5, 0, 0});
    CHECK(d.vectors[1] == double3{-0.5, 0, 0});
    CHECK(d.vectors[2] == double3{0, 0.5, 0});
    CHECK(d.vectors[3] == double3{0, -0.5, 0});
    CHECK(d.vectors[4] == double3{0, 0, 0.5});
    CHECK(d.vectors[5] == double3{0, 0, -0.5});
    CHECK_THROWS_AS(DeltaSet(0.0), std::invalid_argument);
}

TEST_CASE("config validation") {
    RegistrationConfig c;
    CHECK_NOTHROW(c.validate());
    c.block_size = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("block grid covers the volume with both lattices") {
    const int3 dims{10, 7, 5};
    BlockGrid bg = BlockGrid::make(dims, 4);

    // Every voxel in exactly one block of B, at most one of B_shift.
    std::vector<int> count_b(dims.x * dims.y * dims.z, 0);
    std::vector<int> count_s(dims.x * dims.y * dims.z, 0);
    for (const auto& blk : bg.blocks()) {
        for (int z = blk.region.origin.z; z < blk.region.origin.z + blk.region.extent.z; ++z) {
            for (int y = blk.region.origin.y; y < blk.region.origin.y + blk.region.extent.y; ++y) {
                for (int x = blk.region.origin.x; x < blk.region.origin.x + blk.region.extent.x;
                     ++x) {
                    int idx = (z * dims.y + y) * dims.x + x;
                    (blk.grid == 0 ? count_b : count_s)[idx] += 1;
                }
            }
        }
    }
    for (int c : count_b) CHECK(c == 1);
    for (int c : count_s) CHECK(c <= 1);

    // Same-colored blocks within one lattice are never 6-adjacent.
    for (const auto& a : bg.blocks()) {
        for (const auto& b : bg.blocks()) {
            if (&a == &b || a.grid != b.grid || a.color != b.color) continue;
            bool overlap_x = a.region.origin.x <= b.region.origin.x + b.region.extent.x &&
                             b.region.origin.x <= a.region.origin.x + a.region.extent.x;
            bool overlap_y = a.region.origin.y <= b.region.origin.y + b.region.extent.y &&
                             b.region.origin.y <= a.region.origin.y + a.region.extent.y;
            bool overlap_z = a.region.origin.z <= b.region.origin.z + b.region.extent.z &&
                             b.region.origin.z <= a.region.origin.z + a.region.extent.z;
            int touching = 0;
            if (a.region.origin.x + a.region.extent.x == b.region.origin.x ||
                b.region.origin.x + b.region.extent.x == a.region.origin.x) {
                ++touching;
            }
            if (a.region.origin.y + a.region.extent.y == b.region.origin.y ||
                b.region.origin.y + b.region.extent.y == a.region.origin.y) {
                ++touching;
            }
            if (a.region.origin.z + a.region.extent.z == b.region.origin.z ||
                b.region.origin.z + b.region.extent.z == a.region.origin.z) {
                ++touching;
            }
            bool face_adjacent = overlap_x && overlap_y && overlap_z && touching == 1;
            CHECK(!face_adjacent);
        }
    }
}

TEST_CASE("block size one omits the coincident shifted lattice") {
    BlockGrid bg = BlockGrid::make({4, 4, 4}, 1);
    CHECK(bg.grid_count() == 1);
    CHECK(bg.blocks().size() == 64);
}

TEST_CASE("identical images converge immediately with zero moves") {
    std::mt19937_64 rng(51);
    Volume vol = oracle::random_volume(rng, {8, 8, 8}, 1);
    DisplacementField u(vol.dims());
    RegistrationConfig config;
    config.block_size = 4;
    config.levels = 1;
    LevelReport lr = optimize_level(vol, vol, u, config);
    CHECK(lr.converged);
    CHECK(lr.moves_accepted == 0);
    CHECK(lr.final_energy == 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(u.data()[i] == 0.0f);
}

TEST_CASE("block size one equals the independent ICM oracle") {
    PhantomSpec spec;
    spec.kind = PhantomKind::SmoothWarp;
    spec.dims = {8, 8, 8};
    spec.seed = 3;
    spec.amplitude = 1.5;
    PhantomResult ph = make_phantom(spec);

    RegistrationConfig config;
    config.block_size = 1;
    config.levels = 1;
    config.max_sweeps = 200;

    DisplacementField u_opt(spec.dims);
    optimize_level(ph.target, ph.source, u_opt, config);

    DisplacementField u_icm(spec.dims);
    oracle::icm_reference(ph.target, ph.source, u_icm, config);

    CHECK(u_opt == u_icm);
}

TEST_CASE("early termination is exact and saves work") {
    PhantomSpec spec;
    spec.kind = PhantomKind::SmoothWarp;
    spec.dims = {12, 12, 12};
    spec.seed = 5;
    spec.amplitude = 1.5;
    PhantomResult ph = make_phantom(spec);

    RegistrationConfig config;
    config.block_size = 4;
    config.levels = 1;

    DisplacementField u_on(spec.dims), u_off(spec.dims);
    config.early_termination = true;
    LevelReport on = optimize_level(ph.target, ph.source, u_on, config);
    config.early_termination = false;
    LevelReport off = optimize_level(ph.target, ph.source, u_off, config);

    CHECK(u_on == u_off);
    CHECK(on.blocks_skipped > 0);
    CHECK(off.blocks_skipped == 0);
    CHECK(on.blocks_evaluated < off.blocks_evaluated);
    CHECK(on.final_energy == off.final_energy);
}

TEST_CASE("worker count does not change the result") {
    PhantomSpec spec;
    spec.kind = PhantomKind::SmoothWarp;
    spec.dims = {12, 12, 12};
    spec.seed = 6;
    spec.amplitude = 1.5;
    PhantomResult ph = make_phantom(spec);

    RegistrationConfig config;
    config.block_size = 4;
    config.levels = 1;

    DisplacementField u1(spec.dims), u2(spec.dims), u4(spec.dims);
    config.worker_count = 1;
    optimize_level(ph.target, ph.source, u1, config);
    config.worker_count = 2;
    optimize_level(ph.target, ph.source, u2, config);
    config.worker_count = 4;
    optimize_level(ph.target, ph.source, u4, config);
    CHECK(u1 == u2);
    CHECK(u1 == u4);
}

TEST_CASE("monotone energy trace and local optimality certificate") {
    PhantomSpec spec;
    spec.kind = PhantomKind::SmoothWarp;
    spec.dims = {10, 10, 10};
    spec.seed = 7;
    spec.amplitude = 1.2;
    PhantomResult ph = make_phantom(spec);

    RegistrationConfig config;
    config.block_size = 4;
    config.levels = 1;

    DisplacementField u(spec.dims);
    LevelReport lr = optimize_level(ph.target, ph.source, u, config);
    CHECK(lr.converged);

    double prev = lr.initial_energy;
    for (const SweepStats& s : lr.trace) {
        CHECK(s.energy <= prev + 1e-12);
        prev = s.energy;
    }

    // Re-running one full sweep accepts nothing.
    LevelReport again = optimize_level(ph.target, ph.source, u, config);
    CHECK(again.moves_accepted == 0);
    CHECK(again.sweeps == 1);
}

TEST_CASE("whole-volume blocking equals direct alpha-expansion") {
    PhantomSpec spec;
    spec.kind = PhantomKind::SmoothWarp;
    spec.dims = {6, 6, 6};
    spec.seed = 17;
    spec.amplitude = 1.0;
    PhantomResult ph = make_phantom(spec);

    RegistrationConfig config;
    config.levels = 1;
    config.block_size = 16; // both lattices degenerate to the whole grid

    DisplacementField u_blocked(spec.dims), u_direct(spec.dims);
    optimize_level(ph.target, ph.source, u_blocked, config);
    direct_alpha_expansion(ph.target, ph.source, u_direct, config);
    CHECK(u_blocked == u_direct);
}

TEST_CASE("register recovers a constant shift and reports per level") {
    PhantomSpec spec;
    spec.kind = PhantomKind::ConstantShift;
    spec.dims = {16, 16, 16};
    spec.seed = 9;
    spec.shift = {2.0, 0.0, 0.0};
    PhantomResult ph = make_phantom(spec);

    RegistrationConfig config;
    config.levels = 3;
    config.block_size = 8;

    DisplacementField u;
    RunReport report = register_pair(ph.target, ph.source, u, config);
    REQUIRE(report.levels.size() == 3);
    CHECK(report.levels.front().level == 2);
    CHECK(report.levels.back().level == 0);

    // Mean displacement error in the interior.
    double err = 0.0;
    int count = 0;
    for (int z = 4; z < 12; ++z) {
        for (int y = 4; y < 12; ++y) {
            for (int x = 4; x < 12; ++x) {
                err += norm(u.get(x, y, z) - double3{2.0, 0.0, 0.0});
                ++count;
            }
        }
    }
    err /= count;
    CHECK(err < 0.5);
}

TEST_CASE("register with identical images returns the zero field") {
    std::mt19937_64 rng(53);
    Volume vol = oracle::random_volume(rng, {8, 8, 8}, 1);
    RegistrationConfig config;
    config.levels = 2;
    config.block_size = 4;
    DisplacementField u;
    RunReport report = register_pair(vol, vol, u, config);
    CHECK(report.final_energy == 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(u.data()[i] == 0.0f);
}

TEST_CASE("register rejects too many levels for the dims") {
    std::mt19937_64 rng(54);
    Volume vol = oracle::random_volume(rng, {8, 8, 8}, 1);
    RegistrationConfig config;
    config.levels = 5;
    DisplacementField u;
    CHECK_THROWS_AS(register_pair(vol, vol, u, config), std::invalid_argument);
}

TEST_CASE("supplied initial fields are honored") {
    PhantomSpec spec;
    spec.kind = PhantomKind::ConstantShift;
    spec.dims = {8, 8, 8};
    spec.seed = 11;
    spec.shift = {1.0, 0.0, 0.0};
    PhantomResult ph = make_phantom(spec);

    RegistrationConfig config;
    config.levels = 2;
    config.block_size = 4;

    DisplacementField init(spec.dims);
    for (int z = 0; z < 8; ++z) {
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) init.set(x, y, z, {1.0, 0.0, 0.0});
        }
    }
    DisplacementField u;
    RunReport with_init = register_pair(ph.target, ph.source, u, config, {}, &init);
    // Starting on the answer: very little work to do at the coarse level.
    CHECK(with_init.levels.front().initial_energy <=
          total_energy(gaussian_downsample(ph.target), gaussian_downsample(ph.source),
                       downsample_field(init), config.energy_params()) + 1e-9);
}

TEST_CASE("blocked and direct optimization reach comparable optima") {
    std::mt19937_64 rng(55);
    const int3 dims{8, 8, 8};
    PhantomSpec spec;
    spec.kind = PhantomKind::SmoothWarp;
    spec.dims = dims;
    spec.seed = 13;
    spec.amplitude = 1.0;
    PhantomResult ph = make_phantom(spec);

    RegistrationConfig config;
    config.levels = 1;
    config.block_size = 4;

    DisplacementField u_blocked(dims), u_direct(dims);
    LevelReport blocked = optimize_level(ph.target, ph.source, u_blocked, config);
    LevelReport direct = direct_alpha_expansion(ph.target, ph.source, u_direct, config);

    CHECK(blocked.converged);
    CHECK(direct.converged);
    double rel = std::abs(blocked.final_energy - direct.final_energy) /
                 std::max(direct.final_energy, 1e-12);
    CHECK(rel < 0.05);
}
