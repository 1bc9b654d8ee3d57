#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qsinglet/errors.hpp"
#include "qsinglet/measurement.hpp"
#include "qsinglet/rng.hpp"
#include "qsinglet/state_vector.hpp"

using namespace qsinglet;

TEST_CASE("encode and decode are inverse over all small registers") {
    for (int d = 2; d <= 4; ++d)
        for (int n = 1; n <= 4; ++n) {
            const std::int64_t dim = pow_int(d, n);
            for (std::int64_t index = 0; index < dim; ++index) {
                const std::vector<int> digits = decode_index(index, n, d);
                REQUIRE(static_cast<int>(digits.size()) == n);
                REQUIRE(encode_index(digits, d) == index);
            }
        }
}

TEST_CASE("site 1 is the most significant digit") {
    // |digits 2,0,1> with d=3: index 2*9 + 0*3 + 1
    CHECK(encode_index({2, 0, 1}, 3) == 19);
    CHECK(decode_index(19, 3, 3) == std::vector<int>{2, 0, 1});
    CHECK(site_stride(make_state(3, 3), 1) == 9);
    CHECK(site_stride(make_state(3, 3), 3) == 1);
}

TEST_CASE("state construction guards") {
    CHECK_THROWS_AS(make_state(0, 2), DomainError);
    CHECK_THROWS_AS(make_state(2, 0), DomainError);
    CHECK(make_state(2, 1).dim() == 1);  // a one-level register is degenerate but legal
    CHECK_THROWS_AS(make_state(40, 3), DomainError);  // beyond the amplitude cap
    CHECK_THROWS_AS(encode_index({0, 3}, 3), DomainError);
    CHECK_THROWS_AS(make_basis_state(2, 2, {0, 2}), DomainError);
    const StateVector basis = make_basis_state(3, 2, {1, 0, 1});
    CHECK(basis.amplitudes(5).real() == 1.0);
    CHECK(norm(basis) == 1.0);
}

TEST_CASE("normalization and inner products") {
    Rng rng(2);
    StateVector psi = random_state(3, 2, rng);
    CHECK(std::abs(norm(psi) - 1.0) < 1e-12);
    const StateVector phi = random_state(3, 2, rng);
    const Complex forward = inner_product(psi, phi);
    const Complex backward = inner_product(phi, psi);
    CHECK(std::abs(forward - std::conj(backward)) < 1e-12);
    CHECK(fidelity_up_to_phase(psi, psi) == Catch::Approx(1.0).margin(1e-12));

    StateVector zero = make_state(2, 2);
    CHECK_THROWS_AS(normalize(zero), NumericalError);
    CHECK_THROWS_AS(inner_product(psi, make_state(2, 2)), DomainError);
}

TEST_CASE("local unitaries preserve norm and compose") {
    Rng rng(3);
    StateVector psi = random_state(3, 3, rng);
    const Matrix u = haar_unitary(3, rng);
    const Matrix v = haar_unitary(3, rng);
    const StateVector one_then_other =
        apply_local_unitary(apply_local_unitary(psi, 2, u), 2, v);
    const StateVector composed = apply_local_unitary(psi, 2, Matrix(v * u));
    CHECK(std::abs(norm(one_then_other) - 1.0) < 1e-12);
    CHECK((one_then_other.amplitudes - composed.amplitudes).norm() < 1e-12);

    const StateVector undone =
        apply_local_unitary(apply_local_unitary(psi, 1, u), 1, Matrix(u.adjoint()));
    CHECK((undone.amplitudes - psi.amplitudes).norm() < 1e-12);

    CHECK_THROWS_AS(apply_local_unitary(psi, 4, u), DomainError);
    CHECK_THROWS_AS(apply_local_unitary(psi, 1, haar_unitary(2, rng)), DomainError);
}

TEST_CASE("swap acts on digits and is an involution") {
    Rng rng(4);
    StateVector psi = random_state(4, 3, rng);
    const StateVector swapped = apply_swap(psi, 2, 4);
    for (std::int64_t index = 0; index < psi.dim(); ++index) {
        std::vector<int> digits = decode_index(index, 4, 3);
        std::swap(digits[1], digits[3]);
        REQUIRE(swapped.amplitudes(encode_index(digits, 3)) == psi.amplitudes(index));
    }
    const StateVector twice = apply_swap(swapped, 2, 4);
    CHECK((twice.amplitudes - psi.amplitudes).norm() == 0.0);
    CHECK_THROWS_AS(apply_swap(psi, 2, 2), DomainError);
}

TEST_CASE("contract and insert are mutually inverse") {
    Rng rng(5);
    const StateVector psi = random_state(3, 3, rng);
    for (int site = 1; site <= 3; ++site) {
        Vector local = Vector::Zero(3);
        local(1) = Complex(1.0, 0.0);
        const StateVector reduced = contract_site(psi, site, local);
        REQUIRE(reduced.num_sites == 2);
        const StateVector back = insert_site(reduced, site, local);
        // reinserting reproduces the projected component
        for (std::int64_t index = 0; index < psi.dim(); ++index) {
            const std::vector<int> digits = decode_index(index, 3, 3);
            if (digits[static_cast<std::size_t>(site - 1)] == 1)
                REQUIRE(std::abs(back.amplitudes(index) - psi.amplitudes(index)) < 1e-14);
            else
                REQUIRE(std::abs(back.amplitudes(index)) == 0.0);
        }
    }
}

TEST_CASE("contract against a superposed local vector conjugates") {
    //  <l| tensor 1 acting on |0>|x> + |1>|y>
    StateVector psi = make_state(2, 2);
    psi.amplitudes(encode_index({0, 1}, 2)) = Complex(0.8, 0.0);
    psi.amplitudes(encode_index({1, 0}, 2)) = Complex(0.0, 0.6);
    Vector local(2);
    local(0) = Complex(0.6, 0.0);
    local(1) = Complex(0.0, 0.8);
    const StateVector reduced = contract_site(psi, 1, local);
    REQUIRE(reduced.num_sites == 1);
    // <l|0> = 0.6 picks 0.8|1>, <l|1> = -0.8i picks 0.6i|0>
    CHECK(std::abs(reduced.amplitudes(0) - Complex(0.48, 0.0)) < 1e-14);
    CHECK(std::abs(reduced.amplitudes(1) - Complex(0.48, 0.0)) < 1e-14);
}
