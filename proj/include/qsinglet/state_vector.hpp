#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qsinglet/errors.hpp"
#include "qsinglet/linalg.hpp"
#include "qsinglet/rng.hpp"

namespace qsinglet {

// Dense joint state of `num_sites` qudits of dimension `local_dim`.
//
// Indexing convention (shared by every module): amplitudes are addressed by
// base-d digit strings with site 1 as the most significant digit, i.e.
// flat index = sum_k digit[site k] * d^(n-k). Sites are 1-based throughout
// the public API, matching the network file format.
struct StateVector {
    int num_sites = 0;
    int local_dim = 0;
    Vector amplitudes;

    Eigen::Index dim() const { return amplitudes.size(); }
};

// Largest supported amplitude-vector length. Keeps accidental huge inputs
// from exhausting memory; a 7-party 7-level singlet (823543) still fits.
inline constexpr std::int64_t kMaxStateDim = 1'000'000;

inline std::int64_t pow_int(int base, int exp) {
    std::int64_t value = 1;
    for (int i = 0; i < exp; ++i) {
        value *= base;
        if (value > kMaxStateDim) throw DomainError("state dimension exceeds supported maximum");
    }
    return value;
}

inline void require_site(const StateVector& state, int site) {
    if (site < 1 || site > state.num_sites)
        throw DomainError("site index " + std::to_string(site) + " out of range [1, " +
                          std::to_string(state.num_sites) + "]");
}

// Flat index of a digit string: digits[k] is the level of site k+1.
inline std::int64_t encode_index(const std::vector<int>& digits, int d) {
    if (digits.empty()) throw DomainError("encode_index: empty digit list");
    std::int64_t index = 0;
    for (int digit : digits) {
        if (digit < 0 || digit >= d)
            throw DomainError("encode_index: digit " + std::to_string(digit) +
                              " out of range [0, " + std::to_string(d) + ")");
        index = index * d + digit;
    }
    return index;
}

inline std::vector<int> decode_index(std::int64_t index, int num_sites, int d) {
    std::vector<int> digits(num_sites);
    for (int k = num_sites - 1; k >= 0; --k) {
        digits[k] = static_cast<int>(index % d);
        index /= d;
    }
    return digits;
}

inline StateVector make_state(int num_sites, int local_dim) {
    if (num_sites < 1) throw DomainError("num_sites must be positive");
    if (local_dim < 1) throw DomainError("local_dim must be positive");
    StateVector state;
    state.num_sites = num_sites;
    state.local_dim = local_dim;
    state.amplitudes = Vector::Zero(pow_int(local_dim, num_sites));
    return state;
}

inline StateVector make_basis_state(int num_sites, int local_dim, const std::vector<int>& digits) {
    if (static_cast<int>(digits.size()) != num_sites)
        throw DomainError("digit count does not match num_sites");
    StateVector state = make_state(num_sites, local_dim);
    state.amplitudes(encode_index(digits, local_dim)) = Complex(1.0, 0.0);
    return state;
}

inline StateVector random_state(int num_sites, int local_dim, Rng& rng) {
    StateVector state = make_state(num_sites, local_dim);
    for (Eigen::Index i = 0; i < state.dim(); ++i)
        state.amplitudes(i) = rng.gaussian_complex();
    state.amplitudes /= state.amplitudes.norm();
    return state;
}

inline double norm(const StateVector& state) { return state.amplitudes.norm(); }

inline void normalize(StateVector& state) {
    const double n = norm(state);
    if (n < 1e-300) throw NumericalError("cannot normalize a zero state");
    state.amplitudes /= n;
}

inline Complex inner_product(const StateVector& a, const StateVector& b) {
    if (a.num_sites != b.num_sites || a.local_dim != b.local_dim)
        throw DomainError("inner_product: mismatched state shapes");
    return a.amplitudes.dot(b.amplitudes);  // conjugates the left argument
}

// |<a|b>| for normalized inputs; insensitive to global phase.
inline double fidelity_up_to_phase(const StateVector& a, const StateVector& b) {
    const double na = norm(a), nb = norm(b);
    if (na < 1e-300 || nb < 1e-300) throw NumericalError("fidelity of a zero state");
    return std::abs(inner_product(a, b)) / (na * nb);
}

// Stride between consecutive levels of `site` in the flat index.
inline std::int64_t site_stride(const StateVector& state, int site) {
    return pow_int(state.local_dim, state.num_sites - site);
}

// Apply a d x d unitary to one site: U acting as 1 x ... x U x ... x 1.
// The inverse is apply_local_unitary with U.adjoint().
inline StateVector apply_local_unitary(const StateVector& state, int site, const Matrix& u) {
    require_site(state, site);
    const int d = state.local_dim;
    if (u.rows() != d || u.cols() != d)
        throw DomainError("apply_local_unitary: matrix dimension " + std::to_string(u.rows()) +
                          " does not match local dimension " + std::to_string(d));
    const std::int64_t stride = site_stride(state, site);
    const std::int64_t block = stride * d;
    StateVector out = state;
    std::vector<Complex> scratch(d);
    for (std::int64_t outer = 0; outer < state.dim(); outer += block) {
        for (std::int64_t inner = 0; inner < stride; ++inner) {
            const std::int64_t base = outer + inner;
            for (int l = 0; l < d; ++l) scratch[l] = state.amplitudes(base + l * stride);
            for (int l = 0; l < d; ++l) {
                Complex acc(0.0, 0.0);
                for (int m = 0; m < d; ++m) acc += u(l, m) * scratch[m];
                out.amplitudes(base + l * stride) = acc;
            }
        }
    }
    return out;
}

// Exchange the states of sites i and j (the pair-permutation operator).
// An involution: applying it twice restores the input exactly.
inline StateVector apply_swap(const StateVector& state, int i, int j) {
    require_site(state, i);
    require_site(state, j);
    if (i == j) throw DomainError("apply_swap: sites must be distinct");
    const int d = state.local_dim;
    const std::int64_t stride_i = site_stride(state, i);
    const std::int64_t stride_j = site_stride(state, j);
    StateVector out = state;
    for (std::int64_t idx = 0; idx < state.dim(); ++idx) {
        const int di = static_cast<int>((idx / stride_i) % d);
        const int dj = static_cast<int>((idx / stride_j) % d);
        if (di == dj) continue;
        const std::int64_t swapped = idx + (dj - di) * stride_i + (di - dj) * stride_j;
        out.amplitudes(swapped) = state.amplitudes(idx);
    }
    return out;
}

// <local| contracted at `site`: removes the site, returning an (n-1)-site
// state with the remaining sites in their original order. Not normalized.
inline StateVector contract_site(const StateVector& state, int site, const Vector& local) {
    require_site(state, site);
    const int d = state.local_dim;
    if (local.size() != d) throw DomainError("contract_site: vector dimension mismatch");
    if (state.num_sites == 1) throw DomainError("contract_site: cannot remove the only site");
    StateVector out = make_state(state.num_sites - 1, d);
    const std::int64_t stride = site_stride(state, site);
    const std::int64_t block = stride * d;
    std::int64_t reduced = 0;
    for (std::int64_t outer = 0; outer < state.dim(); outer += block) {
        for (std::int64_t inner = 0; inner < stride; ++inner, ++reduced) {
            Complex acc(0.0, 0.0);
            for (int l = 0; l < d; ++l)
                acc += std::conj(local(l)) * state.amplitudes(outer + inner + l * stride);
            out.amplitudes(reduced) = acc;
        }
    }
    return out;
}

// |local> ⊗ state inserted so that the new factor sits at position `site`
// in the enlarged state. Inverse of contract_site for product states.
inline StateVector insert_site(const StateVector& state, int site, const Vector& local) {
    const int d = state.local_dim;
    if (local.size() != d) throw DomainError("insert_site: vector dimension mismatch");
    if (site < 1 || site > state.num_sites + 1) throw DomainError("insert_site: site out of range");
    StateVector out = make_state(state.num_sites + 1, d);
    const std::int64_t stride = pow_int(d, out.num_sites - site);
    const std::int64_t block = stride * d;
    std::int64_t reduced = 0;
    for (std::int64_t outer = 0; outer < out.dim(); outer += block) {
        for (std::int64_t inner = 0; inner < stride; ++inner, ++reduced) {
            for (int l = 0; l < d; ++l)
                out.amplitudes(outer + inner + l * stride) = local(l) * state.amplitudes(reduced);
        }
    }
    return out;
}

}  // namespace qsinglet
