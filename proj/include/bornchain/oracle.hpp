#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bornchain/model.hpp"
#include "bornchain/state.hpp"

namespace bornchain::oracle {

/// Enumeration guard: the largest state space the oracle will materialize.
inline constexpr std::uint64_t kMaxStates = 1'000'000;

/// Transient-block size up to which linear systems are solved by direct
/// sparse factorization; larger systems fall back to Gauss-Seidel sweeps.
inline constexpr std::size_t kDirectSolveLimit = 20'000;

/// Number of configurations of `total` units in `components` parts,
/// C(total + components - 1, components - 1), saturated at 2^63 - 1.
std::uint64_t composition_count(int components, std::int64_t total);

/// The complete, deterministically ordered state space: every configuration
/// of `total` units in `components` parts, in descending lexicographic order,
/// so (N, 0, ..., 0) is first and (0, ..., 0, N) last.
struct StateSpace {
    int components = 0;
    std::int64_t total = 0;
    std::vector<std::vector<std::int64_t>> states;

    std::size_t size() const { return states.size(); }

    /// Ordinal of a configuration (binary search over the sorted list).
    std::size_t index_of(const std::vector<std::int64_t>& state) const;

    /// Component holding the full intensity, or -1 if the state is mixed.
    int pure_component(std::size_t index) const;
};

/// Enumerates the state space. Throws guard_error (carrying the computed
/// count) when it exceeds kMaxStates.
StateSpace enumerate_states(int components, std::int64_t total);

using TransitionMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// One-step transition matrix of the exchange process on `space`: the entry
/// s -> s' accumulates the probability of every (donor, recipient) pair
/// mapping s to s'; the diagonal carries the null mass sum_i p_i^2. Pure
/// states are absorbing rows. Every row sums to 1.
TransitionMatrix build_chain(const TransitionModel& model, const StateSpace& space);

struct SolveOptions {
    std::size_t direct_limit = kDirectSolveLimit;
    double iterative_tolerance = 1e-12;
    std::int64_t max_sweeps = 1'000'000;
};

/// Absorption probabilities: for every state, the probability of ending in
/// each component's pure state. Solves (I - Q) X = R on the transient block.
Eigen::MatrixXd absorption_probabilities(const TransitionMatrix& chain, const StateSpace& space,
                                         const SolveOptions& options = {});

/// Expected number of steps to absorption from every state. With count_nulls,
/// every transition (including the diagonal null mass) costs 1; without, a
/// step costs its probability of changing the configuration, which is 1 minus
/// the diagonal entry, so the result counts intensity-changing steps only.
Eigen::VectorXd expected_steps(const TransitionMatrix& chain, const StateSpace& space,
                               bool count_nulls, const SolveOptions& options = {});

/// Everything the oracle knows about a chain, solved in one pass.
struct ChainSolution {
    Eigen::MatrixXd absorb;            // states x components
    Eigen::VectorXd expected_total;    // nulls included
    Eigen::VectorXd expected_nontrivial;
};

ChainSolution solve_chain(const TransitionModel& model, const StateSpace& space,
                          const SolveOptions& options = {});

/// For a two-component space: the largest absolute second difference
/// |P(a+1) - 2 P(a) + P(a-1)| of the first absorption column over interior
/// counts. Near zero certifies that absorption probabilities are linear in a.
double second_difference_check(const Eigen::MatrixXd& absorb, const StateSpace& space);

}  // namespace bornchain::oracle
