#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "subfinsler/minkowski.hpp"

using namespace subfinsler;

namespace {

std::vector<Vec> sample_points(int dim, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Vec> pts;
  for (int s = 0; s < count; ++s) {
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x(i) = gauss(rng);
    if (x.norm() < 1e-3) continue;
    pts.push_back(x);
  }
  return pts;
}

Mat coupled_matrix() {
  Mat A(2, 2);
  A << 2.0, 0.3, 0.3, 1.0;
  return A;
}

}  // namespace

TEST_CASE("euclidean norm and its dual") {
  auto n = make_euclidean_norm(3);
  Vec x(3);
  x << 1.0, -2.0, 2.0;
  CHECK(n.value(x) == doctest::Approx(3.0));
  auto h = dual_norm(n);
  CHECK(h.mode == DualMode::closed_form);
  CHECK(h.dual_value(x) == doctest::Approx(3.0));
  CHECK((h.dual_gradient(x) - x / 3.0).norm() < 1e-14);
}

TEST_CASE("quadratic norm dual is the inverse-matrix form") {
  Mat A = coupled_matrix();
  auto n = make_quadratic_norm(A);
  auto h = dual_norm(n);
  Mat Ainv = A.inverse();
  for (const Vec& x : sample_points(2, 25, 11)) {
    double expect = std::sqrt(x.dot(Ainv * x));
    CHECK(h.dual_value(x) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS(make_quadratic_norm(-Mat::Identity(2, 2)), std::invalid_argument);
}

TEST_CASE("pnorm numeric dual matches the Hoelder conjugate norm") {
  double p = 3.0, q = p / (p - 1.0);
  auto n = make_pnorm(p, 3);
  auto h = dual_norm(n);
  CHECK(h.mode == DualMode::numeric);
  for (const Vec& x : sample_points(3, 25, 21)) {
    double expect = std::pow(x.array().abs().pow(q).sum(), 1.0 / q);
    CHECK(h.dual_value(x) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("norms are 1-homogeneous and obey the Euler identity") {
  std::vector<MinkowskiNorm> norms{make_euclidean_norm(2),
                                   make_quadratic_norm(coupled_matrix()),
                                   make_pnorm(3.0, 2), make_quartic_norm(0.1, 2)};
  for (const auto& n : norms) {
    for (const Vec& x : sample_points(2, 20, 31)) {
      CHECK(n.value(2.7 * x) == doctest::Approx(2.7 * n.value(x)).epsilon(1e-13));
      CHECK(n.gradient(x).dot(x) == doctest::Approx(n.value(x)).epsilon(1e-12));
      // gradient of M is 0-homogeneous
      CHECK((n.gradient(3.1 * x) - n.gradient(x)).norm() < 1e-11);
    }
  }
}

TEST_CASE("hessian_of_square matches finite differences") {
  std::vector<MinkowskiNorm> norms{make_quadratic_norm(coupled_matrix()),
                                   make_pnorm(3.0, 2), make_quartic_norm(0.1, 2)};
  double h = 1e-5;
  for (const auto& n : norms) {
    for (const Vec& x : sample_points(2, 10, 41)) {
      Mat H = n.hessian_of_square(x);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          Vec xp = x, xm = x;
          xp(i) += h;
          xm(i) -= h;
          auto m2 = [&](const Vec& y) { return n.value(y) * n.value(y); };
          auto d = [&](const Vec& y) {
            Vec yp = y, ym = y;
            yp(j) += h;
            ym(j) -= h;
            return (m2(yp) - m2(ym)) / (2.0 * h);
          };
          double fd = (d(xp) - d(xm)) / (2.0 * h);
          CHECK(H(i, j) == doctest::Approx(fd).epsilon(5e-5));
        }
    }
  }
}

TEST_CASE("duality identity report for closed-form duals") {
  for (auto norm : {make_euclidean_norm(3), make_quadratic_norm(coupled_matrix())}) {
    auto h = dual_norm(norm);
    auto rep = verify_duality_identities(norm, h, sample_points(norm.dim, 100, 51));
    CHECK(rep.max_residual() < 1e-8);
  }
}

TEST_CASE("duality identity report for numeric duals") {
  DualSolverOptions opts;
  for (auto norm : {make_pnorm(3.0, 2), make_quartic_norm(0.1, 3)}) {
    auto h = dual_norm(norm, opts);
    auto rep = verify_duality_identities(norm, h, sample_points(norm.dim, 100, 61));
    CHECK(rep.max_residual() < 10.0 * opts.tolerance * 1e3);  // scaled residual
    CHECK(rep.max_residual() < 1e-8);
  }
}

TEST_CASE("equivalence constants bracket the quadratic eigenvalue range") {
  Mat A = coupled_matrix();
  auto n = make_quadratic_norm(A);
  auto [lo, hi] = equivalence_constants(n, 4096);
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  double a = std::sqrt(es.eigenvalues().minCoeff());
  double b = std::sqrt(es.eigenvalues().maxCoeff());
  CHECK(lo >= a - 1e-12);
  CHECK(hi <= b + 1e-12);
  CHECK(lo == doctest::Approx(a).epsilon(1e-2));
  CHECK(hi == doctest::Approx(b).epsilon(1e-2));
}

TEST_CASE("degenerate inputs are rejected") {
  auto h = dual_norm(make_pnorm(3.0, 2));
  Vec zero = Vec::Zero(2);
  CHECK(h.dual_value(zero) == 0.0);
  CHECK_THROWS_AS(dual_gradient(h, zero), std::invalid_argument);
  CHECK_THROWS_AS(make_euclidean_norm(0), std::invalid_argument);
  CHECK_THROWS_AS(make_pnorm(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_quartic_norm(2.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_builtin_norm({"mystery", 2, {}, 2.0, 0.0}),
                  std::invalid_argument);
}
