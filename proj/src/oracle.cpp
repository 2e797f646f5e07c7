#include "bornchain/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SparseLU>

#include "bornchain/errors.hpp"

namespace bornchain::oracle {

namespace {

constexpr std::uint64_t kCountSaturation = ~std::uint64_t{0} >> 1;  // 2^63 - 1

// Transient block of the chain plus the per-state bookkeeping needed to map
// solutions back onto the full state list.
struct TransientSystem {
    std::vector<std::size_t> transient_states;       // indices into space.states
    std::vector<std::ptrdiff_t> transient_position;  // state index -> row, -1 if absorbing
    Eigen::SparseMatrix<double> coefficient;         // I - Q, column major for SparseLU
    TransitionMatrix q_rows;                         // Q, row major for sweeps
    std::vector<double> null_mass;                   // diagonal of the chain per transient row
};

TransientSystem build_transient_system(const TransitionMatrix& chain, const StateSpace& space) {
    TransientSystem system;
    system.transient_position.assign(space.size(), -1);
    for (std::size_t s = 0; s < space.size(); ++s) {
        if (space.pure_component(s) < 0) {
            system.transient_position[s] = static_cast<std::ptrdiff_t>(system.transient_states.size());
            system.transient_states.push_back(s);
        }
    }

    const auto rows = static_cast<Eigen::Index>(system.transient_states.size());
    system.null_mass.assign(system.transient_states.size(), 0.0);

    std::vector<Eigen::Triplet<double>> coefficient_entries;
    std::vector<Eigen::Triplet<double>> q_entries;
    for (Eigen::Index row = 0; row < rows; ++row) {
        const auto state_index = static_cast<Eigen::Index>(system.transient_states[static_cast<std::size_t>(row)]);
        coefficient_entries.emplace_back(row, row, 1.0);
        for (TransitionMatrix::InnerIterator it(chain, state_index); it; ++it) {
            const std::ptrdiff_t target = system.transient_position[static_cast<std::size_t>(it.col())];
            if (it.col() == state_index) {
                system.null_mass[static_cast<std::size_t>(row)] = it.value();
            }
            if (target < 0) continue;  // transition into an absorbing state
            coefficient_entries.emplace_back(row, static_cast<Eigen::Index>(target), -it.value());
            q_entries.emplace_back(row, static_cast<Eigen::Index>(target), it.value());
        }
    }

    system.coefficient.resize(rows, rows);
    system.coefficient.setFromTriplets(coefficient_entries.begin(), coefficient_entries.end());
    system.q_rows.resize(rows, rows);
    system.q_rows.setFromTriplets(q_entries.begin(), q_entries.end());
    return system;
}

// Gauss-Seidel sweeps on x = b + Q x. I - Q is weakly diagonally dominant
// with absorption reachable from every transient state, so the sweeps
// contract.
Eigen::MatrixXd sweep_solve(const TransientSystem& system, const Eigen::MatrixXd& rhs,
                            const SolveOptions& options) {
    const Eigen::Index rows = system.q_rows.rows();
    Eigen::MatrixXd x = rhs;
    for (std::int64_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index row = 0; row < rows; ++row) {
            const double diagonal = system.null_mass[static_cast<std::size_t>(row)];
            for (Eigen::Index col = 0; col < rhs.cols(); ++col) {
                double accumulated = rhs(row, col);
                for (TransitionMatrix::InnerIterator it(system.q_rows, row); it; ++it) {
                    if (it.col() == row) continue;
                    accumulated += it.value() * x(it.col(), col);
                }
                const double updated = accumulated / (1.0 - diagonal);
                max_change = std::max(max_change, std::abs(updated - x(row, col)));
                x(row, col) = updated;
            }
        }
        if (max_change < options.iterative_tolerance) return x;
    }
    throw std::runtime_error("absorbing-chain sweeps did not reach the residual target");
}

Eigen::MatrixXd solve_transient(const TransientSystem& system, const Eigen::MatrixXd& rhs,
                                const SolveOptions& options) {
    if (system.transient_states.size() <= options.direct_limit) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
        solver.analyzePattern(system.coefficient);
        solver.factorize(system.coefficient);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("transient block factorization failed (chain inconsistent)");
        }
        Eigen::MatrixXd solution = solver.solve(rhs);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("transient block solve failed (chain inconsistent)");
        }
        return solution;
    }
    return sweep_solve(system, rhs, options);
}

}  // namespace

std::uint64_t composition_count(int components, std::int64_t total) {
    if (components < 1 || total < 1) {
        throw std::invalid_argument("components and total must be positive");
    }
    // C(total + components - 1, components - 1), saturating on overflow.
    unsigned __int128 count = 1;
    for (std::int64_t i = 1; i < components; ++i) {
        count = count * static_cast<unsigned __int128>(total + i);
        count /= static_cast<unsigned __int128>(i);
        if (count > kCountSaturation) return kCountSaturation;
    }
    return static_cast<std::uint64_t>(count);
}

StateSpace enumerate_states(int components, std::int64_t total) {
    const std::uint64_t count = composition_count(components, total);
    if (count > kMaxStates) {
        throw guard_error("state space has " + std::to_string(count) +
                              " configurations, above the enumeration guard of " +
                              std::to_string(kMaxStates),
                          count);
    }

    StateSpace space;
    space.components = components;
    space.total = total;
    space.states.reserve(count);

    // Descending lexicographic generation: place the largest feasible count
    // first, recurse on the remainder.
    std::vector<std::int64_t> current(static_cast<std::size_t>(components), 0);
    auto emit = [&](auto&& self, int position, std::int64_t remaining) -> void {
        if (position == components - 1) {
            current[static_cast<std::size_t>(position)] = remaining;
            space.states.push_back(current);
            return;
        }
        for (std::int64_t count_here = remaining; count_here >= 0; --count_here) {
            current[static_cast<std::size_t>(position)] = count_here;
            self(self, position + 1, remaining - count_here);
        }
    };
    emit(emit, 0, total);
    return space;
}

std::size_t StateSpace::index_of(const std::vector<std::int64_t>& state) const {
    const auto it = std::lower_bound(states.begin(), states.end(), state,
                                     [](const auto& lhs, const auto& rhs) { return lhs > rhs; });
    if (it == states.end() || *it != state) {
        throw std::out_of_range("configuration is not in the state space");
    }
    return static_cast<std::size_t>(it - states.begin());
}

int StateSpace::pure_component(std::size_t index) const {
    const auto& state = states[index];
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state[i] == total) return static_cast<int>(i);
    }
    return -1;
}

TransitionMatrix build_chain(const TransitionModel& model, const StateSpace& space) {
    std::vector<Eigen::Triplet<double>> entries;
    std::vector<double> selection;
    std::vector<std::int64_t> scratch;

    for (std::size_t s = 0; s < space.size(); ++s) {
        const auto row = static_cast<Eigen::Index>(s);
        if (space.pure_component(s) >= 0) {
            entries.emplace_back(row, row, 1.0);
            continue;
        }

        IntensityState state;
        state.a = space.states[s];
        state.total = space.total;
        probabilities_into(model, state, selection);

        double null_mass = 0.0;
        for (std::size_t donor = 0; donor < selection.size(); ++donor) {
            if (selection[donor] <= 0.0) continue;
            null_mass += selection[donor] * selection[donor];
            for (std::size_t recipient = 0; recipient < selection.size(); ++recipient) {
                if (recipient == donor || selection[recipient] <= 0.0) continue;
                scratch = space.states[s];
                --scratch[donor];
                ++scratch[recipient];
                const auto target = static_cast<Eigen::Index>(space.index_of(scratch));
                entries.emplace_back(row, target, selection[donor] * selection[recipient]);
            }
        }
        entries.emplace_back(row, row, null_mass);
    }

    TransitionMatrix chain(static_cast<Eigen::Index>(space.size()),
                           static_cast<Eigen::Index>(space.size()));
    chain.setFromTriplets(entries.begin(), entries.end());
    return chain;
}

Eigen::MatrixXd absorption_probabilities(const TransitionMatrix& chain, const StateSpace& space,
                                         const SolveOptions& options) {
    const TransientSystem system = build_transient_system(chain, space);
    const auto transient_count = static_cast<Eigen::Index>(system.transient_states.size());

    // R: transition mass from each transient state into each pure state.
    Eigen::MatrixXd into_pure = Eigen::MatrixXd::Zero(transient_count, space.components);
    for (Eigen::Index row = 0; row < transient_count; ++row) {
        const auto state_index =
            static_cast<Eigen::Index>(system.transient_states[static_cast<std::size_t>(row)]);
        for (TransitionMatrix::InnerIterator it(chain, state_index); it; ++it) {
            const int component = space.pure_component(static_cast<std::size_t>(it.col()));
            if (component >= 0) into_pure(row, component) += it.value();
        }
    }

    Eigen::MatrixXd transient_solution =
        transient_count > 0 ? solve_transient(system, into_pure, options)
                            : Eigen::MatrixXd(0, space.components);

    Eigen::MatrixXd absorb = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(space.size()),
                                                   space.components);
    for (std::size_t s = 0; s < space.size(); ++s) {
        const int pure = space.pure_component(s);
        if (pure >= 0) {
            absorb(static_cast<Eigen::Index>(s), pure) = 1.0;
        } else {
            absorb.row(static_cast<Eigen::Index>(s)) =
                transient_solution.row(system.transient_position[s]);
        }
    }
    return absorb;
}

Eigen::VectorXd expected_steps(const TransitionMatrix& chain, const StateSpace& space,
                               bool count_nulls, const SolveOptions& options) {
    const TransientSystem system = build_transient_system(chain, space);
    const auto transient_count = static_cast<Eigen::Index>(system.transient_states.size());

    // Expected-reward formulation: each step from a transient state costs 1
    // when nulls count, otherwise its probability of changing the state.
    Eigen::MatrixXd cost(transient_count, 1);
    for (Eigen::Index row = 0; row < transient_count; ++row) {
        cost(row, 0) = count_nulls ? 1.0 : 1.0 - system.null_mass[static_cast<std::size_t>(row)];
    }

    Eigen::MatrixXd transient_solution =
        transient_count > 0 ? solve_transient(system, cost, options) : Eigen::MatrixXd(0, 1);

    Eigen::VectorXd expected = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
    for (std::size_t s = 0; s < space.size(); ++s) {
        if (system.transient_position[s] >= 0) {
            expected(static_cast<Eigen::Index>(s)) =
                transient_solution(system.transient_position[s], 0);
        }
    }
    return expected;
}

ChainSolution solve_chain(const TransitionModel& model, const StateSpace& space,
                          const SolveOptions& options) {
    const TransitionMatrix chain = build_chain(model, space);
    ChainSolution solution;
    solution.absorb = absorption_probabilities(chain, space, options);
    solution.expected_total = expected_steps(chain, space, true, options);
    solution.expected_nontrivial = expected_steps(chain, space, false, options);
    return solution;
}

double second_difference_check(const Eigen::MatrixXd& absorb, const StateSpace& space) {
    if (space.components != 2) {
        throw std::invalid_argument("second difference check applies to two components only");
    }
    // States are ordered (N,0), (N-1,1), ..., (0,N): row N - a holds count a.
    auto first_column = [&](std::int64_t a) {
        return absorb(static_cast<Eigen::Index>(space.total - a), 0);
    };
    double worst = 0.0;
    for (std::int64_t a = 1; a < space.total; ++a) {
        const double residual =
            std::abs(first_column(a + 1) - 2.0 * first_column(a) + first_column(a - 1));
        worst = std::max(worst, residual);
    }
    return worst;
}

}  // namespace bornchain::oracle
