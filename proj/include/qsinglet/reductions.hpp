#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <vector>

#include "qsinglet/errors.hpp"
#include "qsinglet/state_vector.hpp"

namespace qsinglet {

// A cut of the site set into two non-empty blocks. Both blocks are kept
// sorted; block ordering fixes the row/column layout of reshapes.
struct Bipartition {
    std::vector<int> block_a;
    std::vector<int> block_b;
};

inline std::vector<int> sorted_unique(std::vector<int> sites) {
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    return sites;
}

inline Bipartition make_bipartition(const std::vector<int>& block_a, int num_sites) {
    Bipartition cut;
    cut.block_a = sorted_unique(block_a);
    if (cut.block_a.size() != block_a.size()) throw DomainError("bipartition: duplicate sites in block");
    if (cut.block_a.empty()) throw DomainError("bipartition: block must be non-empty");
    for (int s : cut.block_a)
        if (s < 1 || s > num_sites) throw DomainError("bipartition: site out of range");
    for (int s = 1; s <= num_sites; ++s)
        if (!std::binary_search(cut.block_a.begin(), cut.block_a.end(), s))
            cut.block_b.push_back(s);
    if (cut.block_b.empty()) throw DomainError("bipartition: complement must be non-empty");
    return cut;
}

// Reshape the amplitude vector into a (block_a levels) x (block_b levels)
// matrix. Within each block, lower site indices are more significant.
inline Matrix reshape_by_blocks(const StateVector& state, const Bipartition& cut) {
    const int d = state.local_dim;
    const std::int64_t rows = pow_int(d, static_cast<int>(cut.block_a.size()));
    const std::int64_t cols = pow_int(d, static_cast<int>(cut.block_b.size()));
    Matrix m(rows, cols);
    std::vector<std::int64_t> row_weight(state.num_sites + 1, 0), col_weight(state.num_sites + 1, 0);
    {
        std::int64_t w = rows;
        for (int s : cut.block_a) row_weight[s] = (w /= d);
        w = cols;
        for (int s : cut.block_b) col_weight[s] = (w /= d);
    }
    for (std::int64_t idx = 0; idx < state.dim(); ++idx) {
        std::int64_t rest = idx, row = 0, col = 0;
        for (int s = state.num_sites; s >= 1; --s) {
            const int digit = static_cast<int>(rest % d);
            rest /= d;
            row += digit * row_weight[s];
            col += digit * col_weight[s];
        }
        m(row, col) = state.amplitudes(idx);
    }
    return m;
}

// Reduced density matrix of the kept sites (ascending site order fixes the
// basis layout). Summation over the traced-out sites runs in a fixed order.
inline Matrix partial_trace(const StateVector& state, const std::vector<int>& keep) {
    if (keep.empty()) throw DomainError("partial_trace: keep set must be non-empty");
    if (static_cast<int>(sorted_unique(keep).size()) == state.num_sites)
        throw DomainError("partial_trace: keep set must be a proper subset");
    const Bipartition cut = make_bipartition(keep, state.num_sites);
    const Matrix m = reshape_by_blocks(state, cut);
    return m * m.adjoint();
}

inline double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

struct SchmidtResult {
    Eigen::VectorXd coefficients;  // non-increasing, non-negative
    int rank = 0;
};

inline constexpr double kDefaultRankTolerance = 1e-10;

// Schmidt coefficients across a bipartition (singular values of the block
// reshape). Rank counts coefficients above the absolute tolerance.
inline SchmidtResult schmidt(const StateVector& state, const Bipartition& cut,
                             double rank_tolerance = kDefaultRankTolerance) {
    const Matrix m = reshape_by_blocks(state, cut);
    Eigen::JacobiSVD<Matrix> svd(m);
    SchmidtResult result;
    result.coefficients = svd.singularValues();
    result.rank = static_cast<int>(
        (result.coefficients.array() > rank_tolerance).count());
    return result;
}

// Von Neumann entropy in bits of the squared Schmidt coefficients.
inline double entropy_bits(const Eigen::VectorXd& coefficients) {
    double bits = 0.0;
    for (Eigen::Index i = 0; i < coefficients.size(); ++i) {
        const double p = coefficients(i) * coefficients(i);
        if (p > 1e-30) bits -= p * std::log2(p);
    }
    return bits;
}

}  // namespace qsinglet
