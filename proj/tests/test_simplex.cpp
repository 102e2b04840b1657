#include <catch2/catch_amalgamated.hpp>

#include "gridswitch/model.hpp"
#include "gridswitch/simplex.hpp"

#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace gridswitch;

TEST_CASE("one-variable LP hits its lower bound") {
  LinearProgram lp;
  const int x = lp.add_variable("x", 3.0, kInf, 1.0);
  (void)x;
  const auto res = solve_lp(lp);
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK(res.primal[0] == Catch::Approx(3.0));
  CHECK(res.objective == Catch::Approx(3.0));
}

TEST_CASE("equality row with mixed senses and duals") {
  // min 2a + 3b  s.t.  a + b = 4, a - b <= 1, a,b >= 0
  LinearProgram lp;
  const int a = lp.add_variable("a", 0.0, kInf, 2.0);
  const int b = lp.add_variable("b", 0.0, kInf, 3.0);
  lp.add_row({{{a, 1.0}, {b, 1.0}}, RowSense::Equal, 4.0, {}});
  lp.add_row({{{a, 1.0}, {b, -1.0}}, RowSense::LessEqual, 1.0, {}});
  const auto res = solve_lp(lp);
  const auto ref = oracle::solve_lp_oracle(lp);
  REQUIRE(res.status == LpStatus::Optimal);
  REQUIRE(ref.status == oracle::LpOracleResult::Status::Optimal);
  CHECK(res.objective == Catch::Approx(ref.objective).margin(1e-9));
  // binding rows: a = 2.5, b = 1.5
  CHECK(res.primal[a] == Catch::Approx(2.5));
  CHECK(res.primal[b] == Catch::Approx(1.5));
  for (int i = 0; i < 2; ++i)
    CHECK(res.duals[i] == Catch::Approx(ref.row_duals[i]).margin(1e-8));
}

TEST_CASE("infeasible and unbounded are reported") {
  LinearProgram infeas;
  const int x = infeas.add_variable("x", 0.0, 1.0, 0.0);
  infeas.add_row({{{x, 1.0}}, RowSense::GreaterEqual, 2.0, {}});
  CHECK(solve_lp(infeas).status == LpStatus::Infeasible);

  LinearProgram unbounded;
  unbounded.add_variable("x", -kInf, kInf, 1.0);
  CHECK(solve_lp(unbounded).status == LpStatus::Unbounded);
}

TEST_CASE("two-bus dispatch and price") {
  const auto net = fixtures::two_bus();
  const auto lp = build_sdcopf(net, Topology::all(net));
  const auto res = solve_lp(lp);
  REQUIRE(res.status == LpStatus::Optimal);
  const auto pt = extract_dcopf(net, lp, res);
  CHECK(pt.generation[0] == Catch::Approx(1.0));
  CHECK(pt.flow[0] == Catch::Approx(1.0));
  CHECK(pt.objective == Catch::Approx(40.0));
  // uncongested line: both prices equal the marginal unit's cost
  CHECK(pt.price[0] == Catch::Approx(40.0));
  CHECK(pt.price[1] == Catch::Approx(40.0));
}

TEST_CASE("congested triangle prices match hand arithmetic") {
  const auto net = fixtures::triangle();
  const auto lp = build_sdcopf(net, Topology::all(net));
  const auto res = solve_lp(lp);
  REQUIRE(res.status == LpStatus::Optimal);
  const auto pt = extract_dcopf(net, lp, res);
  CHECK(pt.objective == Catch::Approx(7300.0));
  CHECK(pt.generation[0] == Catch::Approx(47.0 / 30.0));
  CHECK(pt.generation[1] == Catch::Approx(5.0 / 6.0));
  CHECK(pt.flow[0] == Catch::Approx(1.0));  // the tie line binds
  CHECK(pt.price[0] == Catch::Approx(2000.0));
  CHECK(pt.price[1] == Catch::Approx(5000.0));
  CHECK(pt.price[2] == Catch::Approx(4500.0));
}

TEST_CASE("empty topology with positive demand is infeasible") {
  const auto net = fixtures::triangle();
  const auto lp = build_sdcopf(net, Topology::none(net));
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("solver agrees with the oracle on random dispatch LPs") {
  for (unsigned seed = 1; seed <= 60; ++seed) {
    DYNAMIC_SECTION("seed " << seed) {
      const auto net = fixtures::random_network(seed);
      const auto lp = build_sdcopf(net, Topology::all(net));
      const auto mine = solve_lp(lp);
      const auto ref = oracle::solve_lp_oracle(lp);
      REQUIRE(mine.status == LpStatus::Optimal);
      REQUIRE(ref.status == oracle::LpOracleResult::Status::Optimal);
      CHECK(mine.objective == Catch::Approx(ref.objective).margin(1e-6));
      // strong duality on our side as well
      double dual_obj = lp.objective_const;
      for (std::size_t i = 0; i < lp.num_rows(); ++i)
        dual_obj += mine.duals[i] * lp.rows[i].rhs;
      for (std::size_t j = 0; j < lp.num_vars(); ++j) {
        double red = lp.objective[j];
        for (std::size_t i = 0; i < lp.num_rows(); ++i)
          for (auto [col, coef] : lp.rows[i].coeffs)
            if (col == static_cast<int>(j)) red -= mine.duals[i] * coef;
        if (red > 0 && lp.vars[j].lower > -kInf)
          dual_obj += red * lp.vars[j].lower;
        else if (red < 0 && lp.vars[j].upper < kInf)
          dual_obj += red * lp.vars[j].upper;
      }
      CHECK(dual_obj == Catch::Approx(mine.objective).margin(1e-5));
    }
  }
}

TEST_CASE("same LP solves to identical primal twice") {
  const auto net = fixtures::random_network(7);
  const auto lp = build_sdcopf(net, Topology::all(net));
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp);
  REQUIRE(a.status == LpStatus::Optimal);
  REQUIRE(a.primal == b.primal);
  REQUIRE(a.duals == b.duals);
  REQUIRE(a.iterations == b.iterations);
}

TEST_CASE("warm start from the optimal basis converges immediately") {
  const auto net = fixtures::random_network(11);
  const auto lp = build_sdcopf(net, Topology::all(net));
  SimplexSolver solver;
  const auto cold = solver.solve(lp);
  REQUIRE(cold.status == LpStatus::Optimal);
  const SimplexBasis basis = solver.basis();
  SimplexSolver warm_solver;
  const auto warm = warm_solver.solve(lp, &basis);
  REQUIRE(warm.status == LpStatus::Optimal);
  CHECK(warm.objective == Catch::Approx(cold.objective).margin(1e-9));
  CHECK(warm.iterations <= cold.iterations);
}
