#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bornchain/analytic.hpp"
#include "bornchain/errors.hpp"
#include "bornchain/model.hpp"
#include "bornchain/oracle.hpp"

using namespace bornchain;

namespace {

std::vector<double> quadratic_table(std::int64_t total) {
    std::vector<double> weights(static_cast<std::size_t>(total) + 1, 0.0);
    for (std::size_t a = 1; a < weights.size(); ++a) {
        weights[a] = static_cast<double>(a) * static_cast<double>(a);
    }
    return weights;
}

}  // namespace

TEST_CASE("state enumeration") {
    const oracle::StateSpace two = oracle::enumerate_states(2, 2);
    REQUIRE(two.size() == 3);
    CHECK(two.states[0] == std::vector<std::int64_t>{2, 0});
    CHECK(two.states[1] == std::vector<std::int64_t>{1, 1});
    CHECK(two.states[2] == std::vector<std::int64_t>{0, 2});

    CHECK(oracle::enumerate_states(3, 2).size() == 6);
    CHECK(oracle::enumerate_states(1, 5).size() == 1);

    CHECK(oracle::composition_count(3, 2) == 6);
    CHECK(oracle::composition_count(2, 10) == 11);
}

TEST_CASE("enumeration is ordered, duplicate free, and indexable") {
    const oracle::StateSpace space = oracle::enumerate_states(4, 6);
    CHECK(space.size() == oracle::composition_count(4, 6));
    for (std::size_t s = 0; s < space.size(); ++s) {
        if (s > 0) CHECK(space.states[s - 1] > space.states[s]);
        CHECK(space.index_of(space.states[s]) == s);
        std::int64_t sum = 0;
        for (std::int64_t v : space.states[s]) sum += v;
        CHECK(sum == 6);
    }
    CHECK_THROWS_AS(space.index_of({7, 0, 0, -1}), std::out_of_range);
}

TEST_CASE("enumeration guard refuses oversized spaces with the computed count") {
    try {
        oracle::enumerate_states(5, 100);
        FAIL("guard did not trip");
    } catch (const guard_error& e) {
        CHECK(e.size() == 4598126);  // C(104, 4)
    }
}

TEST_CASE("chain row for the two-unit coin flip state") {
    // From (1,1) both draws are fair: stay with 1/2, move a unit either way
    // with 1/4 each.
    const oracle::StateSpace space = oracle::enumerate_states(2, 2);
    const oracle::TransitionMatrix chain =
        oracle::build_chain(TransitionModel::uniform(), space);

    const auto row = static_cast<Eigen::Index>(space.index_of({1, 1}));
    CHECK(chain.coeff(row, static_cast<Eigen::Index>(space.index_of({1, 1}))) ==
          doctest::Approx(0.5));
    CHECK(chain.coeff(row, static_cast<Eigen::Index>(space.index_of({2, 0}))) ==
          doctest::Approx(0.25));
    CHECK(chain.coeff(row, static_cast<Eigen::Index>(space.index_of({0, 2}))) ==
          doctest::Approx(0.25));
}

TEST_CASE("chain rows are stochastic and pure states absorbing") {
    const std::vector<TransitionModel> models = {TransitionModel::uniform(),
                                                 TransitionModel::linear(),
                                                 TransitionModel::custom(quadratic_table(7))};
    for (const auto& model : models) {
        const oracle::StateSpace space = oracle::enumerate_states(3, 7);
        const oracle::TransitionMatrix chain = oracle::build_chain(model, space);
        for (std::size_t s = 0; s < space.size(); ++s) {
            double row_sum = 0.0;
            for (oracle::TransitionMatrix::InnerIterator it(chain,
                                                            static_cast<Eigen::Index>(s));
                 it; ++it) {
                row_sum += it.value();
            }
            CHECK(std::abs(row_sum - 1.0) <= 1e-12);
            if (space.pure_component(s) >= 0) {
                CHECK(chain.coeff(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) ==
                      1.0);
            }
        }
    }
}

TEST_CASE("absorption probabilities recover the intensity shares") {
    const oracle::StateSpace space = oracle::enumerate_states(3, 6);
    const oracle::TransitionMatrix chain = oracle::build_chain(TransitionModel::linear(), space);
    const Eigen::MatrixXd absorb = oracle::absorption_probabilities(chain, space);

    const auto row = static_cast<Eigen::Index>(space.index_of({1, 2, 3}));
    CHECK(absorb(row, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
    CHECK(absorb(row, 1) == doctest::Approx(2.0 / 6.0).epsilon(1e-9));
    CHECK(absorb(row, 2) == doctest::Approx(3.0 / 6.0).epsilon(1e-9));

    // Absorb rows sum to one; pure rows are unit vectors.
    for (std::size_t s = 0; s < space.size(); ++s) {
        CHECK(std::abs(absorb.row(static_cast<Eigen::Index>(s)).sum() - 1.0) <= 1e-10);
        const int pure = space.pure_component(s);
        if (pure >= 0) CHECK(absorb(static_cast<Eigen::Index>(s), pure) == 1.0);
    }
}

TEST_CASE("absorption is model independent for two components") {
    const std::vector<TransitionModel> models = {TransitionModel::uniform(),
                                                 TransitionModel::linear(),
                                                 TransitionModel::custom(quadratic_table(9))};
    const oracle::StateSpace space = oracle::enumerate_states(2, 9);
    for (const auto& model : models) {
        const Eigen::MatrixXd absorb =
            oracle::absorption_probabilities(oracle::build_chain(model, space), space);
        for (std::int64_t a = 0; a <= 9; ++a) {
            const auto row = static_cast<Eigen::Index>(space.index_of({a, 9 - a}));
            CHECK(std::abs(absorb(row, 0) - static_cast<double>(a) / 9.0) <= 1e-9);
        }
    }
}

TEST_CASE("expected step counts for the uniform rule") {
    const oracle::StateSpace space = oracle::enumerate_states(2, 10);
    const oracle::TransitionMatrix chain = oracle::build_chain(TransitionModel::uniform(), space);

    const Eigen::VectorXd total = oracle::expected_steps(chain, space, true);
    const Eigen::VectorXd nontrivial = oracle::expected_steps(chain, space, false);
    const auto row = static_cast<Eigen::Index>(space.index_of({3, 7}));
    CHECK(total(row) == doctest::Approx(42.0).epsilon(1e-8));
    CHECK(nontrivial(row) == doctest::Approx(21.0).epsilon(1e-8));

    // Pure states need no steps.
    CHECK(total(static_cast<Eigen::Index>(space.index_of({10, 0}))) == 0.0);
    CHECK(nontrivial(static_cast<Eigen::Index>(space.index_of({0, 10}))) == 0.0);
}

TEST_CASE("expected steps match the closed form for the linear rule") {
    const oracle::StateSpace space = oracle::enumerate_states(2, 4);
    const oracle::TransitionMatrix chain = oracle::build_chain(TransitionModel::linear(), space);
    const Eigen::VectorXd total = oracle::expected_steps(chain, space, true);
    CHECK(total(static_cast<Eigen::Index>(space.index_of({2, 2}))) ==
          doctest::Approx(28.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("second differences of two-component absorption vanish") {
    for (const auto& model : {TransitionModel::uniform(), TransitionModel::linear()}) {
        const oracle::StateSpace space = oracle::enumerate_states(2, 10);
        const Eigen::MatrixXd absorb =
            oracle::absorption_probabilities(oracle::build_chain(model, space), space);
        CHECK(oracle::second_difference_check(absorb, space) <= 1e-10);
    }
    // Two units: single interior point, fixed by the boundaries.
    const oracle::StateSpace tiny = oracle::enumerate_states(2, 2);
    const Eigen::MatrixXd absorb = oracle::absorption_probabilities(
        oracle::build_chain(TransitionModel::uniform(), tiny), tiny);
    CHECK(oracle::second_difference_check(absorb, tiny) <= 1e-12);
    CHECK(absorb(static_cast<Eigen::Index>(tiny.index_of({1, 1})), 0) == doctest::Approx(0.5));
}

TEST_CASE("sweep solver agrees with the direct factorization") {
    oracle::SolveOptions iterative;
    iterative.direct_limit = 0;  // force Gauss-Seidel sweeps

    const oracle::StateSpace space = oracle::enumerate_states(3, 6);
    const TransitionModel model = TransitionModel::custom(quadratic_table(6));
    const oracle::TransitionMatrix chain = oracle::build_chain(model, space);

    const Eigen::MatrixXd direct = oracle::absorption_probabilities(chain, space);
    const Eigen::MatrixXd swept = oracle::absorption_probabilities(chain, space, iterative);
    CHECK((direct - swept).cwiseAbs().maxCoeff() <= 1e-10);

    const Eigen::VectorXd direct_steps = oracle::expected_steps(chain, space, true);
    const Eigen::VectorXd swept_steps = oracle::expected_steps(chain, space, true, iterative);
    CHECK((direct_steps - swept_steps).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("solve_chain bundles absorption and step expectations") {
    const oracle::StateSpace space = oracle::enumerate_states(2, 6);
    const oracle::ChainSolution solution =
        oracle::solve_chain(TransitionModel::uniform(), space);
    const auto row = static_cast<Eigen::Index>(space.index_of({2, 4}));
    CHECK(solution.absorb(row, 0) == doctest::Approx(2.0 / 6.0).epsilon(1e-9));
    CHECK(solution.expected_total(row) == doctest::Approx(16.0).epsilon(1e-9));
    CHECK(solution.expected_nontrivial(row) == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("second difference check rejects wider spaces") {
    const oracle::StateSpace space = oracle::enumerate_states(3, 3);
    const Eigen::MatrixXd absorb = oracle::absorption_probabilities(
        oracle::build_chain(TransitionModel::uniform(), space), space);
    CHECK_THROWS_AS(oracle::second_difference_check(absorb, space), std::invalid_argument);
}
