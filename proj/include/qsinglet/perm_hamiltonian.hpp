#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <vector>

#include "qsinglet/errors.hpp"
#include "qsinglet/linalg.hpp"
#include "qsinglet/network.hpp"
#include "qsinglet/state_vector.hpp"

namespace qsinglet {

// One coupling term J * P_ij acting on the full register. The permutation is
// stored as an index table (its own inverse, so gather equals scatter).
class PermutationTerm {
public:
    PermutationTerm(int num_sites, int local_dim, const Edge& edge) : coupling_(edge.coupling) {
        const std::int64_t dim = pow_int(local_dim, num_sites);
        target_.resize(static_cast<std::size_t>(dim));
        for (std::int64_t index = 0; index < dim; ++index) {
            std::vector<int> digits = decode_index(index, num_sites, local_dim);
            std::swap(digits[edge.i - 1], digits[edge.j - 1]);
            target_[static_cast<std::size_t>(index)] = encode_index(digits, local_dim);
        }
    }

    double coupling() const { return coupling_; }
    std::int64_t dim() const { return static_cast<std::int64_t>(target_.size()); }
    std::int64_t target(std::int64_t index) const {
        return target_[static_cast<std::size_t>(index)];
    }

    // out += coupling * P |in>
    template <typename VecIn, typename VecOut>
    void accumulate(const VecIn& in, VecOut& out) const {
        const std::int64_t n = dim();
        for (std::int64_t index = 0; index < n; ++index)
            out(index) += coupling_ * in(target_[static_cast<std::size_t>(index)]);
    }

private:
    double coupling_;
    std::vector<std::int64_t> target_;
};

// H = sum over edges of J_ij P_ij. Real and symmetric in the computational
// basis, so spectra are computed in real arithmetic.
struct PermHamiltonian {
    int num_sites = 0;
    int local_dim = 0;
    std::vector<PermutationTerm> terms;

    std::int64_t dim() const { return pow_int(local_dim, num_sites); }

    template <typename VecIn, typename VecOut>
    void apply(const VecIn& in, VecOut& out) const {
        out.setZero();
        for (const PermutationTerm& term : terms) term.accumulate(in, out);
    }

    Eigen::MatrixXd dense() const {
        const std::int64_t n = dim();
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        for (const PermutationTerm& term : terms)
            for (std::int64_t index = 0; index < n; ++index)
                h(index, term.target(index)) += term.coupling();
        return h;
    }
};

inline PermHamiltonian build_permutation_hamiltonian(const QuditNetwork& net, int local_dim) {
    if (local_dim < 2) throw DomainError("local dimension must be at least 2");
    QuditNetwork checked = net;
    normalize_edges(checked);
    PermHamiltonian ham;
    ham.num_sites = checked.num_vertices;
    ham.local_dim = local_dim;
    ham.terms.reserve(checked.edges.size());
    for (const Edge& edge : checked.edges)
        ham.terms.emplace_back(checked.num_vertices, local_dim, edge);
    return ham;
}

struct GroundStateOptions {
    std::int64_t dense_cutoff = 1024;  // full diagonalization up to this dimension
    int max_iterations = 400;
    std::uint64_t seed = 0;
};

struct SpectrumResult {
    std::vector<double> lowest_energies;  // ascending, as many as requested/resolved
    StateVector ground_state;
    int degeneracy = 0;             // states within the resolution window of the bottom
    bool degeneracy_certified = false;  // true when a level above the window was seen
    double gap = 0.0;               // first resolved energy above the window, minus E0
    double energy_scale = 0.0;      // sum of couplings, used for the window
};

// Lowest part of the spectrum of sum J_ij P_ij. `rel_tolerance` is relative
// to the coupling sum; eigenvalues closer than the resolution window
// max(10 * rel_tolerance, 1e-8) * scale are treated as one level.
inline SpectrumResult ground_state(const QuditNetwork& net, int local_dim, int num_levels,
                                   double rel_tolerance, const GroundStateOptions& opts = {}) {
    if (!is_connected(net)) throw PreconditionError("network must be connected");
    if (num_levels < 1) throw DomainError("need at least one level");
    const PermHamiltonian ham = build_permutation_hamiltonian(net, local_dim);
    const std::int64_t dim = ham.dim();
    const int want = static_cast<int>(std::min<std::int64_t>(num_levels, dim));
    const double scale = net.coupling_sum();

    SpectrumResult result;
    result.energy_scale = scale;

    std::vector<double> energies;
    Eigen::VectorXd ground;
    int resolved = 0;  // how many eigenvalues we actually know, beyond those reported

    if (dim <= opts.dense_cutoff) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ham.dense());
        if (solver.info() != Eigen::Success)
            throw ConvergenceError("dense eigensolver failed", 0);
        resolved = static_cast<int>(dim);
        energies.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + dim);
        ground = solver.eigenvectors().col(0);
    } else {
        LanczosOptions lopt;
        lopt.max_iterations = opts.max_iterations;
        lopt.residual_tolerance = rel_tolerance * std::max(scale, 1.0);
        lopt.seed = opts.seed;
        auto apply = [&ham](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
            ham.apply(in, out);
        };
        LanczosResult lr = lanczos_lowest(apply, dim, want, lopt);
        resolved = static_cast<int>(lr.eigenvalues.size());
        if (resolved == 0) throw ConvergenceError("no eigenvalues resolved", lr.iterations);
        energies = lr.eigenvalues;
        ground = lr.eigenvectors.front();
    }

    const double window = std::max(10.0 * rel_tolerance, 1e-8) * std::max(scale, 1.0);
    const double bottom = energies.front();
    int degeneracy = 0;
    double gap = 0.0;
    for (int k = 0; k < resolved; ++k) {
        if (energies[k] - bottom <= window) {
            ++degeneracy;
        } else {
            gap = energies[k] - bottom;
            break;
        }
    }
    result.degeneracy = degeneracy;
    result.degeneracy_certified = degeneracy < resolved;
    result.gap = gap;
    result.lowest_energies.assign(energies.begin(),
                                  energies.begin() + std::min(resolved, want));

    result.ground_state.num_sites = net.num_vertices;
    result.ground_state.local_dim = local_dim;
    result.ground_state.amplitudes = ground.cast<Complex>();
    return result;
}

// <state| P_ij |state> for normalized input.
inline double swap_expectation(const StateVector& state, int site_i, int site_j) {
    const StateVector swapped = apply_swap(state, site_i, site_j);
    return inner_product(state, swapped).real();
}

// Largest norm of (P_ij + 1)|state> over every site pair. Zero exactly when
// the state is antisymmetric under all transpositions.
inline double antisymmetry_deviation(const StateVector& state) {
    double worst = 0.0;
    for (int i = 1; i <= state.num_sites; ++i) {
        for (int j = i + 1; j <= state.num_sites; ++j) {
            const StateVector swapped = apply_swap(state, i, j);
            const double deviation = (swapped.amplitudes + state.amplitudes).norm();
            worst = std::max(worst, deviation);
        }
    }
    return worst;
}

}  // namespace qsinglet
