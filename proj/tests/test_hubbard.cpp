#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "qsinglet/errors.hpp"
#include "qsinglet/hubbard.hpp"
#include "qsinglet/network.hpp"
#include "qsinglet/rng.hpp"

using namespace qsinglet;

namespace {

QuditNetwork dimer() { return make_topology(Topology::chain, 2, 1.0); }

}  // namespace

TEST_CASE("sector enumeration covers every placement with site-major masks") {
    const FockSector two = enumerate_sector(2, 2);
    REQUIRE(two.dim() == 4);
    CHECK(two.configs[0] == std::vector<int>{0, 0});
    CHECK(two.configs[1] == std::vector<int>{1, 0});
    CHECK(two.configs[2] == std::vector<int>{0, 1});
    CHECK(two.configs[3] == std::vector<int>{1, 1});
    CHECK(two.masks[0] == 0b0011u);
    CHECK(two.masks[1] == 0b0110u);
    CHECK(two.masks[2] == 0b1001u);
    CHECK(two.masks[3] == 0b1100u);
    for (int k = 0; k < two.dim(); ++k)
        CHECK(two.index_of(two.configs[static_cast<std::size_t>(k)]) == k);

    const FockSector three = enumerate_sector(3, 3);
    CHECK(three.dim() == 27);
    for (int k = 0; k < three.dim(); ++k)
        CHECK(three.index_of(three.configs[static_cast<std::size_t>(k)]) == k);

    CHECK_THROWS_AS(enumerate_sector(2, 3), PreconditionError);
    CHECK_THROWS_AS(enumerate_sector(5, 5), DomainError);
    CHECK_THROWS_AS(enumerate_sector(1, 1), DomainError);
}

TEST_CASE("hop parity counts occupied modes strictly between the endpoints") {
    CHECK(hop_parity(0b0110, 2, 0) == -1);  // mode 1 sits inside the window
    CHECK(hop_parity(0b1001, 0, 3) == 1);   // window {1,2} is empty
    CHECK(hop_parity(0b10011, 0, 2) == -1);
    CHECK(hop_parity(0b10011, 4, 2) == 1);
    CHECK(hop_parity(0b0011, 0, 1) == 1);   // adjacent modes, empty window
}

TEST_CASE("dimer hubbard matrix matches the closed-form spectrum") {
    const double t = 0.1;
    const double u = 10.0;
    const FockSector sector = enumerate_sector(2, 2);
    const Eigen::MatrixXd h = build_hubbard(dimer(), t, u, sector);
    REQUIRE(h.rows() == 4);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(h(0, 0) == Catch::Approx(u).margin(1e-14));
    CHECK(h(1, 1) == Catch::Approx(0.0).margin(1e-14));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    const double root = std::sqrt(u * u + 16.0 * t * t);
    CHECK(solver.eigenvalues()(0) == Catch::Approx(0.5 * (u - root)).margin(1e-12));
    CHECK(solver.eigenvalues()(1) == Catch::Approx(0.0).margin(1e-12));

    // singlet-triplet gap approaches 4t^2/U with a relative defect ~4(t/U)^2
    const double gap = solver.eigenvalues()(1) - solver.eigenvalues()(0);
    const double j = 4.0 * t * t / u;
    CHECK(std::abs(gap - j) / j <= 4.1e-4);

    CHECK_THROWS_AS(build_hubbard(dimer(), -0.1, u, sector), DomainError);
    CHECK_THROWS_AS(build_hubbard(dimer(), t, u, enumerate_sector(3, 3)), DomainError);
}

TEST_CASE("distinct digit indices enumerate the one-per-site manifold") {
    CHECK(distinct_digit_indices(2, 2).size() == 2);
    CHECK(distinct_digit_indices(3, 3).size() == 6);
    CHECK(distinct_digit_indices(2, 3).size() == 6);
    const std::vector<std::int64_t> pair = distinct_digit_indices(2, 2);
    CHECK(pair == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("effective comparison reproduces superexchange on the dimer") {
    const EffectiveComparison comparison = compare_effective(dimer(), 0.1, 10.0);
    CHECK(comparison.j_expected == Catch::Approx(0.004).margin(1e-15));
    CHECK(comparison.manifold_separation > 5.0);
    REQUIRE(comparison.hubbard_low_levels.size() == 2);
    REQUIRE(comparison.effective_levels.size() == 2);
    CHECK(comparison.effective_levels[1] - comparison.effective_levels[0] ==
          Catch::Approx(0.004).margin(1e-12));
    CHECK(comparison.max_relative_gap_error <= 4.1e-4);
}

TEST_CASE("effective comparison holds on the three-site chain at second order") {
    const QuditNetwork chain = make_topology(Topology::chain, 3, 1.0);
    const double t = 0.02;
    const double u = 1.0;
    const EffectiveComparison comparison = compare_effective(chain, t, u);
    CHECK(comparison.max_relative_gap_error <= 16.0 * (t / u) * (t / u));
}

TEST_CASE("requests outside the perturbative regime are refused") {
    CHECK_THROWS_AS(compare_effective(dimer(), 0.6, 10.0), RegimeError);
    CHECK_THROWS_AS(compare_effective(dimer(), 0.1, -1.0), DomainError);
}

TEST_CASE("dimer gap scales as t squared") {
    const double u = 1.0;
    std::vector<double> log_t, log_gap;
    for (double t : {0.005, 0.01, 0.02}) {
        const EffectiveComparison comparison = compare_effective(dimer(), t, u);
        const double gap = comparison.hubbard_low_levels[1] - comparison.hubbard_low_levels[0];
        log_t.push_back(std::log(t));
        log_gap.push_back(std::log(gap));
    }
    const int points = static_cast<int>(log_t.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (int k = 0; k < points; ++k) {
        mean_x += log_t[static_cast<std::size_t>(k)];
        mean_y += log_gap[static_cast<std::size_t>(k)];
    }
    mean_x /= points;
    mean_y /= points;
    double cov = 0.0, var = 0.0;
    for (int k = 0; k < points; ++k) {
        const double dx = log_t[static_cast<std::size_t>(k)] - mean_x;
        cov += dx * (log_gap[static_cast<std::size_t>(k)] - mean_y);
        var += dx * dx;
    }
    const double slope = cov / var;
    CHECK(std::abs(slope - 2.0) <= 0.02);
}
