#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support/coffee.hpp"
#include "whatif/model.hpp"

using namespace whatif;

namespace {

EntityRegistry small_registry() {
  EntityRegistry r;
  r.add_kind("supplier", {"supplier1", "supplier2", "supplier3"});
  r.add_kind("roastery", {"roastery1", "roastery2"});
  r.add_kind("cafe", {"cafe1", "cafe2", "cafe3"});
  return r;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("coffee model has 18 concrete variables and 11 constraints") {
  const Model m = testing_support::coffee().build();
  CHECK(m.num_vars() == 18);
  CHECK(m.constraints().size() == 11);
  CHECK(m.families().size() == 3);
  CHECK(m.find_family("x")->size == 6);
  CHECK(m.find_family("y_light")->size == 6);
}

TEST_CASE("empty model is valid and optimal at its bounds") {
  Model m(small_registry());
  m.add_family("x", {"supplier"}, VarDomain::Integer, 0, 4);
  m.set_objective(LinExpr(), ObjectiveSense::Minimize);
  CHECK(m.constraints().empty());
  CHECK(evaluate(m.objective(), Assignment(m.num_vars(), 0.0)) == 0.0);
}

TEST_CASE("references outside the registry are rejected") {
  const EntityRegistry reg = small_registry();
  const std::vector<FamilySpec> fams = {{"x", {"supplier", "roastery"}, VarDomain::Integer, 0, 10}};
  auto with_term = [&](VarKey key) {
    return [&, key] {
      build_model(reg, fams, {{"c", {{{1.0, key}}, 0.0}, Sense::LessEqual, 1.0}}, {},
                  ObjectiveSense::Minimize);
    };
  };
  CHECK(kind_of(with_term({"x", {"supplier9", "roastery1"}})) == ErrorKind::UnknownVariable);
  CHECK(kind_of(with_term({"z", {"supplier1", "roastery1"}})) == ErrorKind::UnknownVariable);
  CHECK(kind_of(with_term({"x", {"cafe1", "roastery1"}})) == ErrorKind::IndexOutOfSpace);
  CHECK(kind_of(with_term({"x", {"supplier1"}})) == ErrorKind::IndexOutOfSpace);
}

TEST_CASE("duplicate constraint names are rejected") {
  Model m = testing_support::coffee().build();
  CHECK(kind_of([&] { m.add_constraint({"flow_roastery1", LinExpr(), Sense::Equal, 0}); }) ==
        ErrorKind::DuplicateConstraintName);
}

TEST_CASE("add_constraint appends and keeps the model valid") {
  Model m = testing_support::coffee().build();
  m.add_constraint({"no_s1_r2", LinExpr().add(m.var("x", {"supplier1", "roastery2"})), Sense::Equal,
                    0});
  CHECK(m.constraints().size() == 12);

  LinExpr sum;
  for (const auto& c : m.registry().entities("cafe")) sum.add(m.var("y_light", {"roastery1", c}));
  m.add_constraint({"sum_r1", sum, Sense::LessEqual, 50});
  CHECK(m.constraints().back().lhs.terms().size() == 3);
}

TEST_CASE("integer families need finite bounds; binary is clamped") {
  Model m(small_registry());
  CHECK(kind_of([&] { m.add_family("x", {"cafe"}, VarDomain::Integer, 0, kInfinity); }) ==
        ErrorKind::InvalidModel);
  const auto& b = m.add_family("z", {"cafe"}, VarDomain::Binary, -3, 7);
  CHECK(m.lower(b.first) == 0.0);
  CHECK(m.upper(b.first) == 1.0);
  CHECK(kind_of([&] { m.set_bounds(b.first, 0, 2); }) == ErrorKind::InvalidModel);
}

TEST_CASE("snapshot copies are independent") {
  const Model original = testing_support::coffee().build();
  const std::string before = original.dump();
  Model copy = snapshot(original);
  copy.add_constraint({"extra", LinExpr().add(0), Sense::LessEqual, 1});
  CHECK(original.constraints().size() == 11);
  CHECK(original.dump() == before);

  std::vector<Model> copies;
  for (int i = 0; i < 1000; ++i) {
    copies.push_back(snapshot(original));
    copies.back().add_constraint({"c" + std::to_string(i), LinExpr().add(i % 18), Sense::LessEqual,
                                  static_cast<double>(i)});
    copies.back().set_bounds(static_cast<VarId>(i % 6), 0, 1);
  }
  CHECK(original.dump() == before);
  for (int i = 0; i < 1000; ++i) CHECK(copies[i].constraints().size() == 12);
}

TEST_CASE("evaluate: published plan costs 2470") {
  const Model m = testing_support::coffee().build();
  CHECK(evaluate(m.objective(), testing_support::coffee_published_plan(m)) == 2470.0);
}

TEST_CASE("evaluate: constant only") {
  CHECK(evaluate(LinExpr(5.0), Assignment(18, 0.0)) == 5.0);
}

TEST_CASE("evaluate: missing variable") {
  LinExpr e;
  e.add(3, 2.0);
  CHECK(kind_of([&] { evaluate(e, Assignment(2, 1.0)); }) == ErrorKind::MissingVariable);
  Assignment a(4, 1.0);
  a.at(3) = std::numeric_limits<double>::quiet_NaN();
  CHECK(kind_of([&] { evaluate(e, a); }) == ErrorKind::MissingVariable);
}

TEST_CASE("evaluate matches term-by-term sums and is linear") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    Assignment a(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) a.at(static_cast<VarId>(j)) = u(rng);
    LinExpr e1(u(rng)), e2(u(rng));
    double hand1 = e1.constant();
    for (int k = 0; k < 12; ++k) {
      const auto v = static_cast<VarId>(rng() % n);
      const double c = u(rng);
      e1.add(v, c);
      hand1 += c * a[v];
      e2.add(static_cast<VarId>(rng() % n), u(rng));
    }
    CHECK(evaluate(e1, a) == doctest::Approx(hand1).epsilon(1e-12));
    const double s = u(rng);
    const double combined = evaluate(s * e1 + e2, a);
    CHECK(std::abs(combined - (s * evaluate(e1, a) + evaluate(e2, a))) <= 1e-9);
  }
}

TEST_CASE("normalize merges duplicates and drops zeros") {
  LinExpr e;
  e.add(4, 1).add(2, 3).add(4, -1).add(2, 1);
  e.normalize();
  REQUIRE(e.terms().size() == 1);
  CHECK(e.terms()[0] == Term{2, 4.0});
}

TEST_CASE("reference closure holds for random models") {
  std::mt19937_64 rng(11);
  const EntityRegistry reg = small_registry();
  const std::vector<std::string> kinds = {"supplier", "roastery", "cafe"};
  for (int trial = 0; trial < 50; ++trial) {
    Model m(reg);
    const int fams = 1 + static_cast<int>(rng() % 3);
    for (int f = 0; f < fams; ++f) {
      std::vector<std::string> space;
      for (std::size_t d = 0; d < 1 + rng() % 2; ++d) space.push_back(kinds[rng() % 3]);
      m.add_family("f" + std::to_string(f), space, VarDomain::Integer, 0, 3);
    }
    for (int c = 0; c < 5; ++c) {
      LinExpr e;
      for (int k = 0; k < 4; ++k) e.add(static_cast<VarId>(rng() % m.num_vars()), 1.0);
      m.add_constraint({"c" + std::to_string(c), e, Sense::LessEqual, 2});
    }
    for (const auto& c : m.constraints()) {
      for (const auto& t : c.lhs.terms()) {
        const auto name = m.var_name(t.var);
        const auto idx = m.index_of(t.var);
        CHECK(m.var(m.family_of(t.var).name, std::span<const std::string>(idx)) == t.var);
        CHECK(!name.empty());
      }
    }
    // A column past the end never resolves.
    LinExpr bad;
    bad.add(static_cast<VarId>(m.num_vars()), 1.0);
    CHECK(kind_of([&] { m.add_constraint({"bad", bad, Sense::LessEqual, 0}); }) ==
          ErrorKind::UnknownVariable);
  }
}

TEST_CASE("canonical dump is stable and readable") {
  const Model m = testing_support::coffee().build();
  const std::string d = m.dump();
  CHECK(d == testing_support::coffee().build().dump());
  CHECK(d.find("constraint supply_supplier1: x[supplier1,roastery1] + x[supplier1,roastery2] <= 150") !=
        std::string::npos);
  CHECK(d.find("family y_dark integer [roastery,cafe]") != std::string::npos);
  CHECK(d.find("  purchase: 5 x[supplier1,roastery1]") != std::string::npos);
}

TEST_CASE("format_number round-trips shortest decimal") {
  CHECK(format_number(150) == "150");
  CHECK(format_number(1.1) == "1.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e10) == "1e+10");
  CHECK(format_number(kInfinity) == "inf");
}
