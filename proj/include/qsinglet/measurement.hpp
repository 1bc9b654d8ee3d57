#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qsinglet/errors.hpp"
#include "qsinglet/linalg.hpp"
#include "qsinglet/rng.hpp"
#include "qsinglet/singlet.hpp"
#include "qsinglet/state_vector.hpp"

namespace qsinglet {

inline constexpr double kProbabilityFloor = 1e-14;

// Haar-distributed unitary: QR of a complex Ginibre matrix with the R
// diagonal phases folded into Q so the distribution is exactly invariant.
inline Matrix haar_unitary(int dim, Rng& rng) {
    if (dim < 1) throw DomainError("unitary dimension must be positive");
    Matrix ginibre(dim, dim);
    for (int col = 0; col < dim; ++col)
        for (int row = 0; row < dim; ++row) ginibre(row, col) = rng.gaussian_complex();
    Matrix q, r;
    householder_qr(ginibre, q, r);
    for (int k = 0; k < dim; ++k) {
        const Complex diag = r(k, k);
        const double mag = std::abs(diag);
        const Complex phase = mag > 1e-300 ? diag / mag : Complex(1.0, 0.0);
        q.col(k) *= phase;
    }
    return q;
}

inline Matrix fourier_matrix(int dim) {
    if (dim < 1) throw DomainError("unitary dimension must be positive");
    Matrix f(dim, dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
            const double angle = 2.0 * std::numbers::pi * j * k / dim;
            f(j, k) = scale * Complex(std::cos(angle), std::sin(angle));
        }
    return f;
}

// Probabilities of the d outcomes when one site is measured in the basis
// given by the columns of `basis`.
inline std::vector<double> outcome_probabilities(const StateVector& state, int site,
                                                 const Matrix& basis) {
    if (basis.rows() != state.local_dim || basis.cols() != state.local_dim)
        throw DomainError("basis dimension must match the local dimension");
    const StateVector rotated = apply_local_unitary(state, site, Matrix(basis.adjoint()));
    const int d = state.local_dim;
    const std::int64_t stride = site_stride(state, site);
    const std::int64_t outer = state.dim() / (stride * d);
    std::vector<double> probs(static_cast<std::size_t>(d), 0.0);
    for (std::int64_t o = 0; o < outer; ++o)
        for (int digit = 0; digit < d; ++digit) {
            const std::int64_t base = (o * d + digit) * stride;
            for (std::int64_t in = 0; in < stride; ++in)
                probs[static_cast<std::size_t>(digit)] += std::norm(rotated.amplitudes(base + in));
        }
    return probs;
}

struct MeasurementOutcome {
    int outcome = 0;        // column of the basis that was observed
    double probability = 0.0;
    StateVector post_state;  // measured site removed, normalized
};

namespace detail {

inline MeasurementOutcome collapse(const StateVector& state, int site, const Matrix& basis,
                                   int outcome) {
    MeasurementOutcome result;
    result.outcome = outcome;
    const Vector column = basis.col(outcome);
    StateVector collapsed = contract_site(state, site, column);
    result.probability = norm(collapsed) * norm(collapsed);
    if (result.probability < kProbabilityFloor)
        throw NumericalError("conditioning on an outcome of negligible probability");
    normalize(collapsed);
    result.post_state = std::move(collapsed);
    return result;
}

}  // namespace detail

// Projective measurement of one site in the given basis, sampling the
// outcome. The measured site is removed from the register.
inline MeasurementOutcome measure_site(const StateVector& state, int site, const Matrix& basis,
                                       Rng& rng) {
    const std::vector<double> probs = outcome_probabilities(state, site, basis);
    double total = 0.0;
    for (double p : probs) total += p;
    if (total < kProbabilityFloor) throw NumericalError("state has negligible norm");

    const double r = rng.uniform() * total;
    double cumulative = 0.0;
    int chosen = -1;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        cumulative += probs[k];
        if (r < cumulative) {
            chosen = static_cast<int>(k);
            break;
        }
    }
    if (chosen < 0)  // roundoff pushed r past the total; take the likeliest bin
        chosen = static_cast<int>(
            std::max_element(probs.begin(), probs.end()) - probs.begin());
    return detail::collapse(state, site, basis, chosen);
}

// Same collapse with the outcome dictated by the caller.
inline MeasurementOutcome measure_site_forced(const StateVector& state, int site,
                                              const Matrix& basis, int outcome) {
    if (outcome < 0 || outcome >= state.local_dim) throw DomainError("outcome out of range");
    return detail::collapse(state, site, basis, outcome);
}

struct CollapseCheck {
    double probability = 0.0;  // chance of the requested outcome (1/n for a full singlet)
    double fidelity = 0.0;     // overlap with the predicted smaller singlet
};

// Measuring one party of the n-singlet in any basis collapses the rest onto
// the (n-1)-singlet built from the unmeasured basis vectors.
inline CollapseCheck singlet_collapse_check(int n, int site, const Matrix& basis, int outcome) {
    if (n < 2) throw DomainError("collapse check needs at least two parties");
    const StateVector singlet = build_full_singlet(n);
    const MeasurementOutcome measured = measure_site_forced(singlet, site, basis, outcome);

    SingletSpec reference;
    reference.n_parties = n - 1;
    reference.local_dim = n;
    reference.basis = basis;
    reference.excluded_levels = {outcome};

    CollapseCheck check;
    check.probability = measured.probability;
    check.fidelity = fidelity_up_to_phase(measured.post_state, build_singlet(reference));
    return check;
}

// New full basis whose measured columns are kept and whose remaining columns
// are remixed by `mixer` (acting on the unmeasured labels in ascending order).
inline Matrix restricted_basis(const Matrix& previous, const std::vector<int>& measured_levels,
                               const Matrix& mixer) {
    const int d = static_cast<int>(previous.rows());
    if (previous.cols() != d) throw DomainError("basis must be square");
    std::vector<bool> taken(static_cast<std::size_t>(d), false);
    for (int level : measured_levels) {
        if (level < 0 || level >= d) throw DomainError("measured level out of range");
        if (taken[static_cast<std::size_t>(level)]) throw DomainError("duplicate measured level");
        taken[static_cast<std::size_t>(level)] = true;
    }
    std::vector<int> open;
    for (int level = 0; level < d; ++level)
        if (!taken[static_cast<std::size_t>(level)]) open.push_back(level);
    if (mixer.rows() != static_cast<int>(open.size()) || mixer.cols() != mixer.rows())
        throw DomainError("mixer dimension must match the unmeasured level count");

    Matrix wall = Matrix::Identity(d, d);
    for (std::size_t a = 0; a < open.size(); ++a)
        for (std::size_t b = 0; b < open.size(); ++b)
            wall(open[a], open[b]) = mixer(static_cast<int>(a), static_cast<int>(b));
    return previous * wall;
}

enum class CascadePolicy {
    restricted_random,  // each step remixes only the still-unmeasured levels
    fixed_basis,        // computational basis at every step
    arbitrary_random,   // fresh Haar basis at every step, ignoring history
};

struct CascadeStep {
    int site = 0;       // original site label
    int outcome = 0;    // basis column observed
    double probability = 0.0;
    Matrix basis;       // full basis used at this step
};

struct MeasurementRecord {
    int n_parties = 0;
    std::vector<CascadeStep> steps;
    std::vector<int> remaining_sites;   // original labels still in the register
    std::vector<int> observed_levels;   // basis columns consumed, in order
    Matrix final_basis;                 // basis after the last step
    StateVector final_state;
};

// Sequential measurements on a fresh n-party singlet. `sites` lists original
// site labels in measurement order and must leave at least one party.
inline MeasurementRecord cascade(int n, const std::vector<int>& sites, CascadePolicy policy,
                                 Rng& rng) {
    if (n < 2) throw DomainError("cascade needs at least two parties");
    if (static_cast<int>(sites.size()) >= n)
        throw DomainError("cascade must leave at least one unmeasured party");
    std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
    for (int site : sites) {
        if (site < 1 || site > n) throw DomainError("site out of range");
        if (seen[static_cast<std::size_t>(site)]) throw DomainError("duplicate site");
        seen[static_cast<std::size_t>(site)] = true;
    }

    MeasurementRecord record;
    record.n_parties = n;
    record.final_basis = Matrix::Identity(n, n);
    record.final_state = build_full_singlet(n);
    for (int site = 1; site <= n; ++site) record.remaining_sites.push_back(site);

    for (int site : sites) {
        Matrix basis;
        switch (policy) {
            case CascadePolicy::restricted_random: {
                const int open = n - static_cast<int>(record.observed_levels.size());
                basis = restricted_basis(record.final_basis, record.observed_levels,
                                         haar_unitary(open, rng));
                break;
            }
            case CascadePolicy::fixed_basis:
                basis = Matrix::Identity(n, n);
                break;
            case CascadePolicy::arbitrary_random:
                basis = haar_unitary(n, rng);
                break;
        }

        const auto position = std::find(record.remaining_sites.begin(),
                                        record.remaining_sites.end(), site);
        const int current =
            static_cast<int>(position - record.remaining_sites.begin()) + 1;
        MeasurementOutcome outcome = measure_site(record.final_state, current, basis, rng);

        CascadeStep step;
        step.site = site;
        step.outcome = outcome.outcome;
        step.probability = outcome.probability;
        step.basis = basis;
        record.steps.push_back(std::move(step));
        record.observed_levels.push_back(outcome.outcome);
        record.final_basis = basis;
        record.final_state = std::move(outcome.post_state);
        record.remaining_sites.erase(position);
    }
    return record;
}

// Overlap of the cascade residual with the singlet over the unconsumed basis
// vectors. Equals 1 for restricted and fixed policies.
inline double remaining_singlet_fidelity(const MeasurementRecord& record) {
    SingletSpec reference;
    reference.n_parties = static_cast<int>(record.remaining_sites.size());
    reference.local_dim = record.n_parties;
    reference.basis = record.final_basis;
    reference.excluded_levels = record.observed_levels;
    return fidelity_up_to_phase(record.final_state, build_singlet(reference));
}

// ---- two-level (beam-splitter style) factorization ----

struct TwoLevelFactor {
    int p = 0;  // lower level index
    int q = 0;  // higher level index
    Eigen::Matrix2cd block;
};

struct ReckDecomposition {
    std::vector<TwoLevelFactor> factors;  // apply left to right, then the phases
    Vector phases;                        // unimodular diagonal remainder
};

inline Matrix embed_two_level(const TwoLevelFactor& factor, int dim) {
    if (factor.p < 0 || factor.q >= dim || factor.p >= factor.q)
        throw DomainError("two-level factor indices out of range");
    Matrix full = Matrix::Identity(dim, dim);
    full(factor.p, factor.p) = factor.block(0, 0);
    full(factor.p, factor.q) = factor.block(0, 1);
    full(factor.q, factor.p) = factor.block(1, 0);
    full(factor.q, factor.q) = factor.block(1, 1);
    return full;
}

// Write a unitary as at most d(d-1)/2 two-level rotations times a diagonal
// phase layer, by Givens-nulling the strict lower triangle column by column.
inline ReckDecomposition reck_factorize(const Matrix& u) {
    if (u.rows() != u.cols()) throw ValidationError("matrix must be square");
    if (!is_unitary(u, 1e-10)) throw ValidationError("matrix must be unitary");
    const int d = static_cast<int>(u.rows());

    Matrix work = u;
    ReckDecomposition decomposition;
    for (int col = 0; col < d - 1; ++col) {
        for (int row = d - 1; row > col; --row) {
            const Complex a = work(row - 1, col);
            const Complex b = work(row, col);
            const double r = std::hypot(std::abs(a), std::abs(b));
            if (std::abs(b) < 1e-15) continue;  // already null, no factor needed
            Eigen::Matrix2cd givens;
            givens << std::conj(a) / r, std::conj(b) / r, -b / r, a / r;
            for (int c = 0; c < d; ++c) {
                const Complex top = work(row - 1, c);
                const Complex bottom = work(row, c);
                work(row - 1, c) = givens(0, 0) * top + givens(0, 1) * bottom;
                work(row, c) = givens(1, 0) * top + givens(1, 1) * bottom;
            }
            TwoLevelFactor factor;
            factor.p = row - 1;
            factor.q = row;
            factor.block = givens.adjoint();
            decomposition.factors.push_back(std::move(factor));
        }
    }
    decomposition.phases = work.diagonal();
    return decomposition;
}

inline Matrix reconstruct(const ReckDecomposition& decomposition, int dim) {
    Matrix product = Matrix::Identity(dim, dim);
    for (const TwoLevelFactor& factor : decomposition.factors)
        product = product * embed_two_level(factor, dim);
    return product * decomposition.phases.asDiagonal();
}

// True when every factor mixes only levels inside the given set or only
// levels outside it, so the subspace carrying an embedded singlet is never
// coupled to the rest.
inline bool is_subspace_compatible(const ReckDecomposition& decomposition,
                                   const std::vector<int>& singlet_levels) {
    std::vector<int> levels = singlet_levels;
    std::sort(levels.begin(), levels.end());
    const auto inside = [&levels](int level) {
        return std::binary_search(levels.begin(), levels.end(), level);
    };
    for (const TwoLevelFactor& factor : decomposition.factors)
        if (inside(factor.p) != inside(factor.q)) return false;
    return true;
}

}  // namespace qsinglet
