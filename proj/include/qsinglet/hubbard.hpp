#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qsinglet/errors.hpp"
#include "qsinglet/network.hpp"
#include "qsinglet/perm_hamiltonian.hpp"

namespace qsinglet {

// Fock space with exactly one fermion of each of `num_species` species on
// `num_sites` sites (no constraint on how many share a site). Mode order is
// site-major: mode(site, species) = site * num_species + species.
struct FockSector {
    int num_sites = 0;
    int num_species = 0;
    std::vector<std::vector<int>> configs;  // configs[k][species] = site
    std::vector<std::uint64_t> masks;       // occupied-mode bitmasks

    int dim() const { return static_cast<int>(configs.size()); }

    // Position of a configuration in enumeration order (species-0 site is the
    // fastest digit).
    int index_of(const std::vector<int>& config) const {
        int index = 0;
        for (int species = num_species - 1; species >= 0; --species)
            index = index * num_sites + config[static_cast<std::size_t>(species)];
        return index;
    }
};

inline int mode_index(int site, int species, int num_species) {
    return site * num_species + species;
}

inline FockSector enumerate_sector(int num_sites, int num_species) {
    if (num_sites != num_species)
        throw PreconditionError("reduction is set up at one fermion per site, so sites == species");
    if (num_species < 2 || num_species > 4)
        throw DomainError("species count must be 2, 3, or 4");
    FockSector sector;
    sector.num_sites = num_sites;
    sector.num_species = num_species;
    int dim = 1;
    for (int s = 0; s < num_species; ++s) dim *= num_sites;
    sector.configs.reserve(static_cast<std::size_t>(dim));
    sector.masks.reserve(static_cast<std::size_t>(dim));
    std::vector<int> config(static_cast<std::size_t>(num_species), 0);
    for (int code = 0; code < dim; ++code) {
        int rest = code;
        std::uint64_t mask = 0;
        for (int species = 0; species < num_species; ++species) {
            config[static_cast<std::size_t>(species)] = rest % num_sites;
            rest /= num_sites;
            mask |= std::uint64_t{1} << mode_index(config[static_cast<std::size_t>(species)],
                                                   species, num_species);
        }
        sector.configs.push_back(config);
        sector.masks.push_back(mask);
    }
    return sector;
}

// Sign of c^dag_to c_from on the given occupation, with `from` occupied and
// `to` empty: parity of the occupied modes strictly between the two.
inline int hop_parity(std::uint64_t mask, int from, int to) {
    const std::uint64_t without = mask & ~(std::uint64_t{1} << from);
    const int lo = std::min(from, to) + 1;
    const int hi = std::max(from, to);
    const std::uint64_t window =
        (hi > lo) ? ((std::uint64_t{1} << hi) - (std::uint64_t{1} << lo)) : 0;
    return (std::popcount(without & window) % 2 == 0) ? 1 : -1;
}

// Multi-species Hubbard Hamiltonian on the one-fermion-per-species sector:
// hopping -t_e per edge (t_e = t_scale * sqrt(edge coupling)) and on-site
// repulsion u per unlike pair sharing a site.
inline Eigen::MatrixXd build_hubbard(const QuditNetwork& net, double t_scale, double u,
                                     const FockSector& sector) {
    if (net.num_vertices != sector.num_sites)
        throw DomainError("network size must match the sector");
    if (t_scale <= 0.0 || u <= 0.0) throw DomainError("t and U must be positive");
    QuditNetwork checked = net;
    normalize_edges(checked);

    const int dim = sector.dim();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        const std::vector<int>& config = sector.configs[static_cast<std::size_t>(k)];
        double repulsion = 0.0;
        for (int a = 0; a < sector.num_species; ++a)
            for (int b = a + 1; b < sector.num_species; ++b)
                if (config[static_cast<std::size_t>(a)] == config[static_cast<std::size_t>(b)])
                    repulsion += u;
        h(k, k) += repulsion;

        for (const Edge& edge : checked.edges) {
            const double t_e = t_scale * std::sqrt(edge.coupling);
            const int site_a = edge.i - 1;
            const int site_b = edge.j - 1;
            for (int species = 0; species < sector.num_species; ++species) {
                const int here = config[static_cast<std::size_t>(species)];
                if (here != site_a && here != site_b) continue;
                const int there = (here == site_a) ? site_b : site_a;
                std::vector<int> moved = config;
                moved[static_cast<std::size_t>(species)] = there;
                const int target = sector.index_of(moved);
                const int sign =
                    hop_parity(sector.masks[static_cast<std::size_t>(k)],
                               mode_index(here, species, sector.num_species),
                               mode_index(there, species, sector.num_species));
                h(target, k) += -t_e * sign;
            }
        }
    }
    return h;
}

// Basis indices of the qudit register whose digits are all distinct; this is
// the sector the one-fermion-per-site manifold maps onto.
inline std::vector<std::int64_t> distinct_digit_indices(int num_sites, int local_dim) {
    std::vector<std::int64_t> indices;
    const std::int64_t dim = pow_int(local_dim, num_sites);
    for (std::int64_t index = 0; index < dim; ++index) {
        const std::vector<int> digits = decode_index(index, num_sites, local_dim);
        std::vector<int> sorted = digits;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end())
            indices.push_back(index);
    }
    return indices;
}

struct EffectiveComparison {
    double t = 0.0;
    double u = 0.0;
    double j_expected = 0.0;                 // 4 t^2 / U for a unit-coupling edge
    double manifold_separation = 0.0;        // gap between the low manifold and the rest
    std::vector<double> hubbard_low_levels;  // lowest d! Hubbard eigenvalues
    std::vector<double> effective_levels;    // spectrum of sum (J_e/2) P_e on the sector
    double max_relative_gap_error = 0.0;     // worst mismatch of level offsets from the bottom
};

// Second-order check of the superexchange reduction: level spacings inside
// the low-energy Hubbard manifold against the permutation model with
// J_e = 4 t_e^2 / U, whose exchange term is (J_e / 2) P_e.
inline EffectiveComparison compare_effective(const QuditNetwork& net, double t_scale, double u) {
    if (t_scale <= 0.0 || u <= 0.0) throw DomainError("t and U must be positive");
    if (t_scale / u > 0.05)
        throw RegimeError("perturbative reduction needs t/U <= 0.05");
    const int d = net.num_vertices;
    const FockSector sector = enumerate_sector(d, d);
    const Eigen::MatrixXd hubbard = build_hubbard(net, t_scale, u, sector);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hub_solver(hubbard);
    if (hub_solver.info() != Eigen::Success)
        throw ConvergenceError("hubbard eigensolver failed", 0);
    int manifold = 1;
    for (int k = 2; k <= d; ++k) manifold *= k;  // d! one-fermion-per-site states

    EffectiveComparison comparison;
    comparison.t = t_scale;
    comparison.u = u;
    comparison.j_expected = 4.0 * t_scale * t_scale / u;
    comparison.manifold_separation =
        hub_solver.eigenvalues()(manifold) - hub_solver.eigenvalues()(manifold - 1);
    if (comparison.manifold_separation < 0.5 * u)
        throw RegimeError("low-energy manifold is not separated; t/U too large");
    comparison.hubbard_low_levels.assign(hub_solver.eigenvalues().data(),
                                         hub_solver.eigenvalues().data() + manifold);

    const PermHamiltonian perm = build_permutation_hamiltonian(net, d);
    const std::vector<std::int64_t> sector_indices = distinct_digit_indices(d, d);
    const Eigen::MatrixXd full = perm.dense();
    Eigen::MatrixXd restricted(sector_indices.size(), sector_indices.size());
    for (std::size_t r = 0; r < sector_indices.size(); ++r)
        for (std::size_t c = 0; c < sector_indices.size(); ++c)
            restricted(static_cast<int>(r), static_cast<int>(c)) =
                full(sector_indices[r], sector_indices[c]);
    restricted *= 0.5 * comparison.j_expected;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> perm_solver(restricted);
    if (perm_solver.info() != Eigen::Success)
        throw ConvergenceError("effective-model eigensolver failed", 0);
    comparison.effective_levels.assign(perm_solver.eigenvalues().data(),
                                       perm_solver.eigenvalues().data() + manifold);

    for (int k = 1; k < manifold; ++k) {
        const double hub_offset = comparison.hubbard_low_levels[static_cast<std::size_t>(k)] -
                                  comparison.hubbard_low_levels.front();
        const double eff_offset = comparison.effective_levels[static_cast<std::size_t>(k)] -
                                  comparison.effective_levels.front();
        if (eff_offset <= 0.0) continue;
        comparison.max_relative_gap_error =
            std::max(comparison.max_relative_gap_error,
                     std::abs(hub_offset - eff_offset) / eff_offset);
    }
    return comparison;
}

}  // namespace qsinglet
