#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <vector>

#include "qsinglet/errors.hpp"
#include "qsinglet/measurement.hpp"
#include "qsinglet/reductions.hpp"
#include "qsinglet/singlet.hpp"
#include "qsinglet/state_vector.hpp"

namespace qsinglet {

inline constexpr double kBranchFloor = 1e-12;  // outcome branches below this are pruned

inline double block_entropy(const StateVector& state, const std::vector<int>& block) {
    return entropy_bits(schmidt(state, make_bipartition(block, state.num_sites)).coefficients);
}

// True when every single-site cut has Schmidt rank 1, i.e. the state is a
// tensor product over all sites.
inline bool fully_product(const StateVector& state, double rank_tolerance = kDefaultRankTolerance) {
    if (state.num_sites <= 1) return true;
    for (int site = 1; site <= state.num_sites; ++site) {
        const SchmidtResult cut =
            schmidt(state, make_bipartition({site}, state.num_sites), rank_tolerance);
        if (cut.rank > 1) return false;
    }
    return true;
}

// Measurement bases tried by the persistency search, cheapest to describe
// first so deterministic strategies are found before random ones.
inline std::vector<Matrix> default_dictionary(int local_dim, int haar_count, Rng& rng) {
    std::vector<Matrix> dictionary;
    dictionary.push_back(Matrix::Identity(local_dim, local_dim));
    dictionary.push_back(fourier_matrix(local_dim));
    for (int k = 0; k < haar_count; ++k) dictionary.push_back(haar_unitary(local_dim, rng));
    return dictionary;
}

namespace detail {

struct PersistencySearch {
    const std::vector<Matrix>* dictionary = nullptr;
    long budget = 0;
    long evaluations = 0;
    int fallback = 0;  // trivial upper bound reported when the budget runs out

    // Can `state` be driven to a full product with at most `depth` more
    // measurements, for every outcome of each one?
    bool disentangled(const StateVector& state, int depth) {
        if (++evaluations > budget)
            throw BudgetError("persistency search budget exhausted", fallback);
        if (fully_product(state)) return true;
        if (depth == 0) return false;
        for (int site = 1; site <= state.num_sites; ++site) {
            for (const Matrix& basis : *dictionary) {
                const std::vector<double> probs = outcome_probabilities(state, site, basis);
                bool works = true;
                for (int outcome = 0; outcome < state.local_dim && works; ++outcome) {
                    if (probs[static_cast<std::size_t>(outcome)] <= kBranchFloor) continue;
                    const MeasurementOutcome branch =
                        measure_site_forced(state, site, basis, outcome);
                    works = disentangled(branch.post_state, depth - 1);
                }
                if (works) return true;
            }
        }
        return false;
    }
};

}  // namespace detail

struct PersistencyBound {
    int upper_bound = 0;
    long evaluations = 0;
};

// Smallest measurement count for which some adaptive strategy over the
// dictionary makes the state a product on every outcome branch. Never
// exceeds num_sites - 1.
inline PersistencyBound persistency_upper_bound(const StateVector& state,
                                                const std::vector<Matrix>& dictionary,
                                                long budget = 2'000'000) {
    if (dictionary.empty()) throw PreconditionError("dictionary must not be empty");
    for (const Matrix& basis : dictionary)
        if (basis.rows() != state.local_dim || basis.cols() != state.local_dim)
            throw DomainError("dictionary basis has wrong dimension");
    detail::PersistencySearch search;
    search.dictionary = &dictionary;
    search.budget = budget;
    search.fallback = state.num_sites - 1;
    for (int m = 0; m < state.num_sites; ++m)
        if (search.disentangled(state, m)) return {m, search.evaluations};
    return {state.num_sites - 1, search.evaluations};  // unreachable; one site always remains
}

struct CertificateResult {
    int measurements = 0;
    int trials = 0;
    int min_rank = INT_MAX;  // smallest Schmidt rank over every cut of every residual
    bool all_entangled = true;
};

// Randomized lower-bound evidence: arbitrary-basis cascades on random sites
// of the n-singlet must never leave a product residual when fewer than n-1
// parties are measured.
inline CertificateResult persistency_random_certificate(int n, int measurements, int trials,
                                                        Rng& rng) {
    if (measurements < 0 || measurements >= n - 1)
        throw PreconditionError("certificate needs 0 <= measurements < n-1");
    CertificateResult result;
    result.measurements = measurements;
    result.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<int> pool(static_cast<std::size_t>(n));
        for (int site = 1; site <= n; ++site) pool[static_cast<std::size_t>(site - 1)] = site;
        for (int k = 0; k < measurements; ++k)
            std::swap(pool[static_cast<std::size_t>(k)],
                      pool[static_cast<std::size_t>(k) + rng.below(
                                static_cast<std::uint64_t>(n - k))]);
        pool.resize(static_cast<std::size_t>(measurements));

        const MeasurementRecord record =
            cascade(n, pool, CascadePolicy::arbitrary_random, rng);
        const int remaining = record.final_state.num_sites;
        for (int mask = 0; mask < (1 << (remaining - 1)); ++mask) {
            std::vector<int> block = {1};  // pin site 1 to visit each cut once
            for (int site = 2; site <= remaining; ++site)
                if (mask & (1 << (site - 2))) block.push_back(site);
            if (static_cast<int>(block.size()) == remaining) continue;
            const int rank =
                schmidt(record.final_state, make_bipartition(block, remaining)).rank;
            result.min_rank = std::min(result.min_rank, rank);
        }
    }
    result.all_entangled = result.min_rank >= 2;
    return result;
}

struct PersistencyReport {
    int upper_bound = 0;
    int certified_floor = 0;  // upper_bound unless a sampled cascade ever disentangled
    long evaluations = 0;
    int min_rank_seen = INT_MAX;
    int trials_per_level = 0;
};

inline PersistencyReport singlet_persistency_report(int n, const std::vector<Matrix>& dictionary,
                                                    long budget, int trials, Rng& rng) {
    if (n < 2) throw DomainError("persistency report needs at least two parties");
    PersistencyReport report;
    report.trials_per_level = trials;
    const PersistencyBound bound = persistency_upper_bound(build_full_singlet(n), dictionary, budget);
    report.upper_bound = bound.upper_bound;
    report.evaluations = bound.evaluations;
    report.certified_floor = report.upper_bound;
    for (int m = 1; m <= n - 2; ++m) {
        const CertificateResult certificate = persistency_random_certificate(n, m, trials, rng);
        report.min_rank_seen = std::min(report.min_rank_seen, certificate.min_rank);
        if (!certificate.all_entangled)
            report.certified_floor = std::min(report.certified_floor, m);
    }
    return report;
}

// ---- measurement-localized entanglement between two blocks ----

struct LocalizeTrial {
    MeasurementRecord record;
    int schmidt_rank = 0;
    double entropy = 0.0;
};

// Measure every site outside the two blocks of a fresh n-singlet, then report
// the entanglement between the blocks in the residual state.
inline LocalizeTrial localisable_experiment(int n, const std::vector<int>& block_a,
                                            const std::vector<int>& block_b, Rng& rng,
                                            CascadePolicy policy = CascadePolicy::restricted_random) {
    if (block_a.empty() || block_b.empty()) throw DomainError("blocks must be nonempty");
    std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
    for (const std::vector<int>* block : {&block_a, &block_b})
        for (int site : *block) {
            if (site < 1 || site > n) throw DomainError("block site out of range");
            if (used[static_cast<std::size_t>(site)])
                throw DomainError("blocks must not overlap");
            used[static_cast<std::size_t>(site)] = true;
        }

    std::vector<int> measured;
    for (int site = 1; site <= n; ++site)
        if (!used[static_cast<std::size_t>(site)]) measured.push_back(site);

    LocalizeTrial trial;
    trial.record = cascade(n, measured, policy, rng);

    std::vector<int> block_now;
    for (int site : block_a) {
        const auto position = std::find(trial.record.remaining_sites.begin(),
                                        trial.record.remaining_sites.end(), site);
        block_now.push_back(
            static_cast<int>(position - trial.record.remaining_sites.begin()) + 1);
    }
    const SchmidtResult cut = schmidt(
        trial.record.final_state,
        make_bipartition(block_now, trial.record.final_state.num_sites));
    trial.schmidt_rank = cut.rank;
    trial.entropy = entropy_bits(cut.coefficients);
    return trial;
}

// ---- reference qubit states for persistency comparisons ----

inline StateVector ghz_state(int n) {
    if (n < 2) throw DomainError("ghz needs at least two parties");
    StateVector state = make_state(n, 2);
    const double amp = 1.0 / std::sqrt(2.0);
    state.amplitudes(0) = Complex(amp, 0.0);
    state.amplitudes(state.dim() - 1) = Complex(amp, 0.0);
    return state;
}

inline StateVector w_state(int n) {
    if (n < 2) throw DomainError("w state needs at least two parties");
    StateVector state = make_state(n, 2);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    for (int site = 0; site < n; ++site)
        state.amplitudes(std::int64_t{1} << (n - 1 - site)) = Complex(amp, 0.0);
    return state;
}

inline void apply_cz(StateVector& state, int site_i, int site_j) {
    if (state.local_dim != 2) throw DomainError("cz is a qubit gate");
    require_site(state, site_i);
    require_site(state, site_j);
    const std::int64_t stride_i = site_stride(state, site_i);
    const std::int64_t stride_j = site_stride(state, site_j);
    for (std::int64_t index = 0; index < state.dim(); ++index)
        if (((index / stride_i) & 1) && ((index / stride_j) & 1))
            state.amplitudes(index) = -state.amplitudes(index);
}

inline StateVector cluster_state_1d(int n) {
    if (n < 2) throw DomainError("cluster needs at least two parties");
    StateVector state = make_state(n, 2);
    const double amp = std::pow(2.0, -0.5 * n);
    state.amplitudes.setConstant(Complex(amp, 0.0));  // |+> on every site
    for (int site = 1; site < n; ++site) apply_cz(state, site, site + 1);
    return state;
}

}  // namespace qsinglet
