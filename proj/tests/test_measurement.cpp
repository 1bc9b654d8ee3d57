#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "qsinglet/errors.hpp"
#include "qsinglet/measurement.hpp"
#include "qsinglet/perm_hamiltonian.hpp"
#include "qsinglet/rng.hpp"
#include "qsinglet/singlet.hpp"

using namespace qsinglet;

TEST_CASE("haar unitaries are unitary and seed-deterministic") {
    for (int d : {1, 2, 3, 5}) {
        Rng rng(100 + static_cast<std::uint64_t>(d));
        const Matrix u = haar_unitary(d, rng);
        CHECK(is_unitary(u, 1e-12));
    }
    Rng a(5), b(5), c(6);
    const Matrix ua = haar_unitary(4, a);
    const Matrix ub = haar_unitary(4, b);
    const Matrix uc = haar_unitary(4, c);
    CHECK(max_abs(Matrix(ua - ub)) == 0.0);
    CHECK(max_abs(Matrix(ua - uc)) > 1e-3);
    CHECK_THROWS_AS(haar_unitary(0, a), DomainError);
}

TEST_CASE("haar entries have the invariant column statistics") {
    // every |u_ij|^2 averages to 1/d under the Haar measure
    Rng rng(200);
    const int d = 3;
    const int samples = 1500;
    double mean00 = 0.0, mean21 = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Matrix u = haar_unitary(d, rng);
        mean00 += std::norm(u(0, 0));
        mean21 += std::norm(u(2, 1));
    }
    mean00 /= samples;
    mean21 /= samples;
    CHECK(std::abs(mean00 - 1.0 / d) < 0.02);
    CHECK(std::abs(mean21 - 1.0 / d) < 0.02);
}

TEST_CASE("fourier matrix is unitary with uniform magnitudes") {
    for (int d : {2, 3, 4, 6}) {
        const Matrix f = fourier_matrix(d);
        CHECK(is_unitary(f, 1e-12));
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                CHECK(std::abs(f(j, k)) == Catch::Approx(1.0 / std::sqrt(d)).margin(1e-12));
    }
}

TEST_CASE("outcome probabilities are a distribution; singlet sites are uniform") {
    Rng rng(201);
    const StateVector s = build_full_singlet(4);
    const Matrix u = haar_unitary(4, rng);
    for (int site = 1; site <= 4; ++site) {
        const std::vector<double> probs = outcome_probabilities(s, site, u);
        double total = 0.0;
        for (double p : probs) {
            CHECK(p >= 0.0);
            CHECK(p == Catch::Approx(0.25).margin(1e-12));
            total += p;
        }
        CHECK(total == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("forced measurement matches the probability table and renormalizes") {
    Rng rng(202);
    const StateVector psi = random_state(3, 3, rng);
    const Matrix u = haar_unitary(3, rng);
    const std::vector<double> probs = outcome_probabilities(psi, 2, u);
    for (int outcome = 0; outcome < 3; ++outcome) {
        const MeasurementOutcome m = measure_site_forced(psi, 2, u, outcome);
        CHECK(m.probability ==
              Catch::Approx(probs[static_cast<std::size_t>(outcome)]).margin(1e-12));
        CHECK(std::abs(norm(m.post_state) - 1.0) < 1e-12);
        CHECK(m.post_state.num_sites == 2);
    }
    CHECK_THROWS_AS(measure_site_forced(psi, 2, u, 3), DomainError);

    // conditioning on an impossible outcome is a numerical error
    const StateVector basis_state = make_basis_state(2, 2, {0, 0});
    CHECK_THROWS_AS(
        measure_site_forced(basis_state, 1, Matrix(Matrix::Identity(2, 2)), 1),
        NumericalError);
}

TEST_CASE("sampled outcomes follow the seeded stream and land in support") {
    const StateVector s = build_full_singlet(3);
    Rng rng_a(7), rng_b(7);
    const Matrix u = fourier_matrix(3);
    const MeasurementOutcome first = measure_site(s, 1, u, rng_a);
    const MeasurementOutcome second = measure_site(s, 1, u, rng_b);
    CHECK(first.outcome == second.outcome);
    CHECK(first.probability == Catch::Approx(1.0 / 3.0).margin(1e-12));
}

TEST_CASE("measuring one singlet site collapses the rest onto the reduced singlet") {
    // computational basis, n=3, outcome 0: the survivors carry levels {1,2}
    const CollapseCheck check =
        singlet_collapse_check(3, 1, Matrix(Matrix::Identity(3, 3)), 0);
    CHECK(check.probability == Catch::Approx(1.0 / 3.0).margin(1e-12));
    CHECK(check.fidelity == Catch::Approx(1.0).margin(1e-12));

    // hand oracle: contract the table state directly
    const StateVector s = build_full_singlet(3);
    Vector e0 = Vector::Zero(3);
    e0(0) = Complex(1.0, 0.0);
    StateVector collapsed = contract_site(s, 1, e0);
    normalize(collapsed);
    StateVector expected = make_state(2, 3);
    expected.amplitudes(encode_index({1, 2}, 3)) = Complex(1.0 / std::sqrt(2.0), 0.0);
    expected.amplitudes(encode_index({2, 1}, 3)) = Complex(-1.0 / std::sqrt(2.0), 0.0);
    CHECK((collapsed.amplitudes - expected.amplitudes).norm() < 1e-12);

    Rng rng(203);
    for (int n : {3, 4}) {
        const Matrix u = haar_unitary(n, rng);
        for (int outcome = 0; outcome < n; ++outcome) {
            const CollapseCheck haar_check = singlet_collapse_check(n, 1 + outcome % n, u, outcome);
            CHECK(haar_check.probability == Catch::Approx(1.0 / n).margin(1e-11));
            CHECK(haar_check.fidelity > 1.0 - 1e-11);
        }
    }
}

TEST_CASE("restricted basis keeps consumed columns and stays unitary") {
    Rng rng(204);
    const Matrix previous = haar_unitary(4, rng);
    const Matrix mixer = haar_unitary(2, rng);
    const Matrix next = restricted_basis(previous, {2, 0}, mixer);
    CHECK(is_unitary(next, 1e-12));
    CHECK((next.col(0) - previous.col(0)).norm() < 1e-13);
    CHECK((next.col(2) - previous.col(2)).norm() < 1e-13);
    // open columns only mix among themselves
    const Matrix open_block = previous.col(1) * mixer(0, 0) + previous.col(3) * mixer(1, 0);
    CHECK((next.col(1) - open_block).norm() < 1e-13);

    CHECK_THROWS_AS(restricted_basis(previous, {0, 0}, mixer), DomainError);
    CHECK_THROWS_AS(restricted_basis(previous, {4}, mixer), DomainError);
    CHECK_THROWS_AS(restricted_basis(previous, {0}, mixer), DomainError);  // size mismatch
}

TEST_CASE("restricted cascades leave the predicted singlet") {
    Rng rng(205);
    for (int m : {1, 2, 3}) {
        std::vector<int> sites;
        for (int site = 1; site <= m; ++site) sites.push_back(site);
        const MeasurementRecord record = cascade(5, sites, CascadePolicy::restricted_random, rng);
        CHECK(record.final_state.num_sites == 5 - m);
        CHECK(static_cast<int>(record.observed_levels.size()) == m);
        CHECK(remaining_singlet_fidelity(record) > 1.0 - 1e-11);
    }
}

TEST_CASE("fixed-basis cascades are a special restricted case") {
    Rng rng(206);
    const MeasurementRecord record = cascade(4, {2, 4}, CascadePolicy::fixed_basis, rng);
    CHECK(remaining_singlet_fidelity(record) > 1.0 - 1e-11);
    CHECK(record.remaining_sites == std::vector<int>{1, 3});
    // outcomes are distinct levels of the computational basis
    CHECK(record.observed_levels[0] != record.observed_levels[1]);
}

TEST_CASE("arbitrary cascades keep the residual antisymmetric") {
    Rng rng(207);
    for (int trial = 0; trial < 5; ++trial) {
        const MeasurementRecord record = cascade(4, {1, 3}, CascadePolicy::arbitrary_random, rng);
        CHECK(antisymmetry_deviation(record.final_state) < 1e-11);
    }
}

TEST_CASE("cascade input validation") {
    Rng rng(208);
    CHECK_THROWS_AS(cascade(3, {1, 2, 3}, CascadePolicy::fixed_basis, rng), DomainError);
    CHECK_THROWS_AS(cascade(3, {1, 1}, CascadePolicy::fixed_basis, rng), DomainError);
    CHECK_THROWS_AS(cascade(3, {0}, CascadePolicy::fixed_basis, rng), DomainError);
    CHECK_THROWS_AS(cascade(3, {4}, CascadePolicy::fixed_basis, rng), DomainError);
}

TEST_CASE("reck factorization reconstructs and respects the factor budget") {
    Rng rng(209);
    for (int d = 2; d <= 5; ++d)
        for (int k = 0; k < 10; ++k) {
            const Matrix u = haar_unitary(d, rng);
            const ReckDecomposition decomposition = reck_factorize(u);
            CHECK(static_cast<int>(decomposition.factors.size()) <= d * (d - 1) / 2);
            CHECK(max_abs(Matrix(reconstruct(decomposition, d) - u)) < 1e-12);
            for (const TwoLevelFactor& factor : decomposition.factors) {
                CHECK(factor.p < factor.q);
                CHECK(is_unitary(embed_two_level(factor, d), 1e-10));
            }
            for (int i = 0; i < d; ++i)
                CHECK(std::abs(std::abs(decomposition.phases(i)) - 1.0) < 1e-12);
        }
}

TEST_CASE("reck of structured matrices is economical") {
    const ReckDecomposition identity = reck_factorize(Matrix(Matrix::Identity(4, 4)));
    CHECK(identity.factors.empty());

    Vector phases(3);
    phases(0) = Complex(std::cos(0.3), std::sin(0.3));
    phases(1) = Complex(std::cos(-1.2), std::sin(-1.2));
    phases(2) = Complex(1.0, 0.0);
    const ReckDecomposition diagonal = reck_factorize(Matrix(phases.asDiagonal()));
    CHECK(diagonal.factors.empty());
    CHECK(max_abs(Matrix(Matrix(diagonal.phases.asDiagonal()) - Matrix(phases.asDiagonal()))) <
          1e-14);

    CHECK_THROWS_AS(reck_factorize(Matrix(Matrix::Ones(3, 3))), ValidationError);
}

TEST_CASE("subspace compatibility detects block structure") {
    Rng rng(210);
    Matrix block = Matrix::Zero(4, 4);
    block.block(0, 0, 2, 2) = haar_unitary(2, rng);
    block.block(2, 2, 2, 2) = haar_unitary(2, rng);
    CHECK(is_subspace_compatible(reck_factorize(block), {0, 1}));
    CHECK(is_subspace_compatible(reck_factorize(block), {2, 3}));
    CHECK_FALSE(is_subspace_compatible(reck_factorize(haar_unitary(4, rng)), {0, 1}));

    // compatible rotations keep the embedded pair singlet up to phase
    SingletSpec spec;
    spec.n_parties = 2;
    spec.local_dim = 4;
    spec.basis = Matrix::Identity(4, 4);
    spec.excluded_levels = {2, 3};
    const StateVector embedded = build_singlet(spec);
    StateVector rotated = apply_local_unitary(embedded, 1, block);
    rotated = apply_local_unitary(rotated, 2, block);
    CHECK(fidelity_up_to_phase(rotated, embedded) > 1.0 - 1e-11);
}
