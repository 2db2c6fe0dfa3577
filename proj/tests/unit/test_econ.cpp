#include "doctest.h"

#include <cmath>
#include <random>

#include "innoflow/econ.hpp"
#include "innoflow/error.hpp"

using namespace innoflow;
using namespace innoflow::econ;

namespace {

IoTable table(const Eigen::MatrixXd& a) {
  IoTable t;
  const auto n = static_cast<std::size_t>(a.rows());
  for (std::size_t i = 0; i < n; ++i) t.sector_ids.push_back("s" + std::to_string(i + 1));
  t.a = a;
  t.x = Eigen::VectorXd::Constant(a.rows(), 10.0);
  t.y = Eigen::VectorXd::Constant(a.rows(), 1.0);
  t.r = Eigen::VectorXd::Constant(a.rows(), 1.0);
  t.q = Eigen::VectorXd::Constant(a.rows(), 1.0);
  return t;
}

// entries uniform, rows rescaled to random sums <= 0.9
Eigen::MatrixXd substochastic(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) a(i, k) = u(rng) < 0.3 ? 0.0 : u(rng);
    const double s = a.row(i).sum();
    if (s > 0.0) a.row(i) *= 0.9 * u(rng) / s;
  }
  return a;
}

}  // namespace

TEST_CASE("leontief examples") {
  CHECK(leontief(Eigen::MatrixXd::Zero(3, 3)).isIdentity());
  CHECK(leontief(Eigen::MatrixXd::Constant(1, 1, 0.5))(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  Eigen::MatrixXd a(2, 2);
  a << 0.2, 0.1, 0.3, 0.4;
  Eigen::MatrixXd want(2, 2);
  want << 0.6, 0.1, 0.3, 0.8;
  want /= 0.45;
  CHECK((leontief(a) - want).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(leontief(a)(0, 1) == doctest::Approx(0.222).epsilon(1e-3));

  const ProximityMatrix p = leontief(table(a), true);
  CHECK(p.kind == ProximityKind::leontief);
  CHECK(p.values.diagonal().isZero());
  CHECK(p.values(1, 0) == doctest::Approx(want(1, 0)));

  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.6, 0.6, 0.5;
  try {
    (void)leontief(bad);
    FAIL("expected a spectral radius error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("spectral radius 1.1") != std::string::npos);
  }
  CHECK_THROWS_AS(leontief(Eigen::MatrixXd::Identity(2, 2)), NumericError);
  CHECK_THROWS_AS(leontief(Eigen::MatrixXd::Zero(2, 3)), DataError);
}

TEST_CASE("leontief identity and series bound") {
  std::mt19937_64 rng(55);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::MatrixXd a = substochastic(rng, 6);
    const Eigen::MatrixXd l = leontief(a);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
    CHECK((l * (id - a) - id).cwiseAbs().maxCoeff() < 1e-10);
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    Eigen::MatrixXd series = id, power = id;
    for (int k = 1; k <= 50; ++k) {
      power = power * a;
      series += power;
    }
    CHECK((l - series).cwiseAbs().maxCoeff() <= std::pow(norm, 51) / (1.0 - norm) + 1e-13);
  }
}

TEST_CASE("embodied r&d flows") {
  IoTable t = table(Eigen::MatrixXd::Zero(3, 3));
  t.y << 1, 2, 3;
  t.r << 2, 3, 4;
  t.q = t.r;
  CHECK(rd_flows(t).values.isApprox(Eigen::MatrixXd(t.y.asDiagonal())));
  t.y.setOnes();
  CHECK(rd_flows(t).values.isIdentity());
  t.r.setZero();
  CHECK(rd_flows(t).values.isZero());

  IoTable s = table(Eigen::MatrixXd::Constant(1, 1, 0.5));
  s.r << 2;
  s.q << 4;
  s.y << 3;
  CHECK(rd_flows(s).values(0, 0) == doctest::Approx(3.0).epsilon(1e-15));

  t.q[1] = 0.0;
  try {
    (void)rd_flows(t);
    FAIL("expected a zero-output error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("s2") != std::string::npos);
  }
}

TEST_CASE("los index") {
  // rows (1,0), (1,1), (0,1), (0,0) padded to 4 inputs
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(4, 4);
  sq(0, 0) = sq(1, 0) = sq(1, 1) = sq(2, 1) = 1.0;
  const Eigen::MatrixXd w = los_index(sq);
  CHECK(w(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(w(0, 2) == 0.0);
  CHECK(w(0, 0) == 1.0);
  CHECK(w(3, 3) == 0.0);
  CHECK(w(3, 1) == 0.0);
  Eigen::MatrixXd same(2, 2);
  same << 0.2, 0.1, 0.4, 0.2;
  CHECK(los_index(same)(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  // columns compare deliveries instead
  CHECK(los_index(sq, LosOrientation::columns).isApprox(los_index(Eigen::MatrixXd(sq.transpose()))));

  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::MatrixXd m = substochastic(rng, 5);
    const Eigen::MatrixXd l = los_index(m);
    CHECK(l.isApprox(l.transpose(), 0.0));
    CHECK((l.array() >= 0.0).all());
    CHECK((l.array() <= 1.0 + 1e-15).all());
    for (int i = 0; i < 5; ++i)
      if (m.row(i).sum() > 0.0) CHECK(l(i, i) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("gravity") {
  CHECK((gravity(Eigen::Vector2d(1, 1)).array() == 0.25).all());
  CHECK(gravity(Eigen::Vector2d(1, 3), 0.0).isZero());
  const Eigen::Vector3d m(2, 5, 1);
  const Eigen::MatrixXd f = gravity(m, 2.5);
  CHECK(f.isApprox(f.transpose(), 0.0));
  CHECK(f.isApprox(gravity(m * 17.0, 2.5), 1e-15));
  CHECK(f(0, 1) == doctest::Approx(2.5 * 10.0 / 64.0));
  CHECK_THROWS_AS(gravity(Eigen::Vector2d(0, 0)), DataError);
  CHECK_THROWS_AS(gravity(Eigen::Vector2d(-1, 0.5)), DataError);
}

TEST_CASE("io table validation names the problem") {
  Eigen::MatrixXd a(2, 2);
  a << 0.1, -0.2, 0.0, 0.3;
  IoTable t = table(a);
  try {
    t.validate();
    FAIL("expected a negative coefficient error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("A(s1,s2)") != std::string::npos);
  }
  t.a(0, 1) = 0.2;
  CHECK_NOTHROW(t.validate());
  t.y = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(t.validate(), DataError);
  t.y = Eigen::VectorXd::Ones(2);
  t.a << 0.9, 0.9, 0.9, 0.9;
  CHECK_THROWS_AS(t.validate(), NumericError);
  CHECK(parse_proximity_kind("los") == ProximityKind::los);
  CHECK(to_string(ProximityKind::rd_flows) == "rd_flows");
  CHECK_THROWS_AS(parse_proximity_kind("distance"), UsageError);
}

TEST_CASE("sector mapping") {
  ProximityMatrix p;
  p.kind = ProximityKind::gravity;
  p.ids = {"s1", "s2", "s3"};
  p.values.resize(3, 3);
  p.values << 1, 2, 3, 4, 5, 6, 7, 8, 9;

  SectorMapping drop;
  drop.entries = {{"s1", "a", 1.0}, {"s3", "b", 1.0}};
  const MappedProximity d = apply_mapping(p, drop);
  REQUIRE(d.matrix.ids == std::vector<std::string>{"a", "b"});
  CHECK(d.matrix.values(0, 0) == 1.0);
  CHECK(d.matrix.values(0, 1) == 3.0);
  CHECK(d.matrix.values(1, 0) == 7.0);
  REQUIRE(d.warnings.size() == 1u);
  CHECK(d.warnings[0].find("s2") != std::string::npos);

  // many-to-one with weights
  SectorMapping merge;
  merge.entries = {{"s1", "a", 0.5}, {"s2", "a", 0.5}, {"s3", "b", 2.0}};
  const MappedProximity m = apply_mapping(p, merge);
  CHECK(m.warnings.empty());
  CHECK(m.matrix.values(0, 0) == doctest::Approx(0.25 * (1 + 2 + 4 + 5)));
  CHECK(m.matrix.values(0, 1) == doctest::Approx(0.5 * 2.0 * (3 + 6)));
  CHECK(m.matrix.values(1, 1) == doctest::Approx(4.0 * 9));

  SectorMapping extra;
  extra.entries = {{"s1", "a", 1.0}, {"s2", "b", 1.0}, {"s3", "c", 1.0}, {"s9", "d", 1.0}};
  const MappedProximity e = apply_mapping(p, extra);
  CHECK(e.matrix.values == p.values);
  CHECK(e.warnings.size() == 1u);

  SectorMapping twice;
  twice.entries = {{"s1", "a", 1.0}, {"s1", "b", 1.0}};
  CHECK_THROWS_AS(apply_mapping(p, twice), DataError);
  SectorMapping negative;
  negative.entries = {{"s1", "a", -1.0}};
  CHECK_THROWS_AS(apply_mapping(p, negative), DataError);
}
