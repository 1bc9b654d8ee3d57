#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qsinglet/errors.hpp"
#include "qsinglet/state_vector.hpp"

namespace qsinglet {

// Recipe for an n-party singlet living in d >= n levels: the totally
// antisymmetric state over the non-excluded levels, written in the basis
// given by the columns of `basis`. |excluded_levels| must equal d - n.
struct SingletSpec {
    int n_parties = 0;
    int local_dim = 0;
    Matrix basis;                      // d x d unitary; columns are the basis vectors
    std::vector<int> excluded_levels;  // level indices absent from every reduced state
};

inline SingletSpec full_singlet_spec(int n) {
    SingletSpec spec;
    spec.n_parties = n;
    spec.local_dim = n;
    spec.basis = Matrix::Identity(n, n);
    return spec;
}

// Parity of a sequence of distinct values: +1 for even inversion count.
inline int permutation_sign(const std::vector<int>& sequence) {
    int inversions = 0;
    for (std::size_t a = 0; a < sequence.size(); ++a)
        for (std::size_t b = a + 1; b < sequence.size(); ++b)
            if (sequence[a] > sequence[b]) ++inversions;
    return (inversions % 2 == 0) ? 1 : -1;
}

inline void validate_singlet_spec(const SingletSpec& spec) {
    if (spec.n_parties < 1) throw DomainError("singlet needs at least one party");
    if (spec.local_dim < spec.n_parties)
        throw DomainError("local dimension must be at least the party count");
    if (static_cast<int>(spec.excluded_levels.size()) != spec.local_dim - spec.n_parties)
        throw DomainError("excluded level count must equal local_dim - n_parties");
    for (int level : spec.excluded_levels)
        if (level < 0 || level >= spec.local_dim) throw DomainError("excluded level out of range");
    std::vector<int> sorted = spec.excluded_levels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw DomainError("excluded levels must be distinct");
    if (spec.basis.rows() != spec.local_dim || spec.basis.cols() != spec.local_dim)
        throw DomainError("basis dimension must equal local_dim");
    if (!is_unitary(spec.basis)) throw ValidationError("singlet basis must be unitary");
}

// Build the singlet by antisymmetrizing the occupied levels (sign +1 for the
// ascending-level assignment in site order) and then rotating every site by
// the basis matrix. n! nonzero amplitudes of magnitude 1/sqrt(n!) before
// rotation.
inline StateVector build_singlet(const SingletSpec& spec) {
    validate_singlet_spec(spec);
    const int n = spec.n_parties;
    const int d = spec.local_dim;

    std::vector<int> occupied;
    for (int level = 0; level < d; ++level)
        if (std::find(spec.excluded_levels.begin(), spec.excluded_levels.end(), level) ==
            spec.excluded_levels.end())
            occupied.push_back(level);

    StateVector state = make_state(n, d);
    std::vector<int> assignment = occupied;  // ascending start fixes the sign convention
    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) factorial *= k;
    const double amplitude = 1.0 / std::sqrt(factorial);
    do {
        state.amplitudes(encode_index(assignment, d)) =
            Complex(permutation_sign(assignment) * amplitude, 0.0);
    } while (std::next_permutation(assignment.begin(), assignment.end()));

    const bool identity_basis = max_abs(Matrix(spec.basis - Matrix::Identity(d, d))) == 0.0;
    if (!identity_basis)
        for (int site = 1; site <= n; ++site) state = apply_local_unitary(state, site, spec.basis);
    return state;
}

inline StateVector build_full_singlet(int n) { return build_singlet(full_singlet_spec(n)); }

// 1 - fidelity of U^{x n}|state> against |state|>. For a full singlet this
// vanishes for any unitary; for a reduced singlet it vanishes when U is
// block-diagonal on the occupied-level subspace.
inline double rotation_invariance_deviation(const StateVector& state, const Matrix& u) {
    StateVector rotated = state;
    for (int site = 1; site <= state.num_sites; ++site)
        rotated = apply_local_unitary(rotated, site, u);
    return 1.0 - fidelity_up_to_phase(rotated, state);
}

// Norm of the difference between the n-singlet and its expansion into
// first-site levels tensored with (n-1)-singlets with that level excluded,
// with alternating signs.
inline double one_site_expansion_deviation(int n) {
    if (n < 2 || n > 6) throw DomainError("one_site_expansion supports 2 <= n <= 6");
    const StateVector reference = build_full_singlet(n);
    StateVector expansion = make_state(n, n);
    for (int level = 0; level < n; ++level) {
        SingletSpec sub;
        sub.n_parties = n - 1;
        sub.local_dim = n;
        sub.basis = Matrix::Identity(n, n);
        sub.excluded_levels = {level};
        const StateVector smaller = build_singlet(sub);
        Vector front = Vector::Zero(n);
        front(level) = Complex(1.0, 0.0);
        StateVector term = insert_site(smaller, 1, front);
        const double sign = (level % 2 == 0) ? 1.0 : -1.0;  // (-1)^(i+1) with i = level+1
        expansion.amplitudes += sign / std::sqrt(static_cast<double>(n)) * term.amplitudes;
    }
    return (expansion.amplitudes - reference.amplitudes).norm();
}

// Phase-insensitive deviation of the identity that moves a single-site
// unitary across the singlet as its adjoint on all other sites:
// U x 1^(n-1) |S> = 1 x (U^dag)^(n-1) |S> up to a global phase (det U).
inline double transfer_identity_deviation(int n, const Matrix& u) {
    if (u.rows() != n || u.cols() != n) throw DomainError("unitary dimension must equal n");
    const StateVector singlet = build_full_singlet(n);
    const StateVector lhs = apply_local_unitary(singlet, 1, u);
    StateVector rhs = singlet;
    const Matrix u_dagger = u.adjoint();
    for (int site = 2; site <= n; ++site) rhs = apply_local_unitary(rhs, site, u_dagger);
    const double overlap = std::min(1.0, fidelity_up_to_phase(lhs, rhs));
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap));
}

}  // namespace qsinglet
