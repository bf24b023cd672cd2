#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "lie_core.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace hksym;
using cd = std::complex<double>;

namespace {

  // Coordinates of a matrix in the orthonormal realization basis.
  Vec coords(const MatrixAlgebra& ma, const CMat& m)
  {
    Vec c(ma.algebra.dim());
    for (int i = 0; i < c.size(); ++i)
      c(i) = -ma.kappa * (m * ma.realization[i]).trace().real();
    return c;
  }

  CMat unit(int n, int i, int j)
  {
    CMat e = CMat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
  }

  Vec randomVec(std::mt19937_64& rng, int n)
  {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i)
      v(i) = u(rng);
    return v;
  }

  struct Su2 {
    MatrixAlgebra ma = buildMatrixAlgebra(Family::su, 2);
    CMat X = 0.5 * (unit(2, 0, 1) - unit(2, 1, 0));
    CMat Y = cd(0, 0.5) * (unit(2, 0, 1) + unit(2, 1, 0));
    CMat T = cd(0, 0.5) * (unit(2, 0, 0) - unit(2, 1, 1));
  };

}

TEST_CASE("dimensions of the classical algebras")
{
  CHECK(buildAlgebra(Family::su, 2).dim() == 3);
  CHECK(buildAlgebra(Family::sp, 2).dim() == 10);
  CHECK(buildAlgebra(Family::su, 4).dim() == 15);
  CHECK(buildAlgebra(Family::so, 5).dim() == 10);
  CHECK(buildAlgebra(Family::sp, 1).dim() == 3);
}

TEST_CASE("unsupported family parameters are rejected")
{
  CHECK_THROWS_AS(buildAlgebra(Family::su, 1), InputError);
  CHECK_THROWS_AS(buildAlgebra(Family::so, 2), InputError);
  CHECK_THROWS_AS(buildAlgebra(Family::sp, 0), InputError);
}

TEST_CASE("structure constant invariants hold for every family")
{
  const std::pair<Family, int> cases[] = {{Family::su, 2}, {Family::su, 3}, {Family::su, 4},
                                          {Family::sp, 1}, {Family::sp, 2}, {Family::so, 5},
                                          {Family::so, 6}};
  for (auto [f, n] : cases) {
    const CompactLieAlgebra g = buildAlgebra(f, n);
    CAPTURE(g.dim());
    CHECK(g.antisymmetryResidual() < 1e-12);
    CHECK(g.jacobiResidual() < 1e-12);
    CHECK(g.adInvarianceResidual() < 1e-12);
    CHECK(g.minGramEigenvalue() > 0.5);
  }
}

TEST_CASE("su(2) brackets match matrix commutators")
{
  Su2 s;
  const Vec x = coords(s.ma, s.X), y = coords(s.ma, s.Y), t = coords(s.ma, s.T);
  const CompactLieAlgebra& g = s.ma.algebra;

  CHECK((g.bracket(x, y) - t).norm() < 1e-14);
  CHECK((g.bracket(t, x) - y).norm() < 1e-14);
  CHECK((g.bracket(t, y) + x).norm() < 1e-14);
  CHECK(g.bracket(x, x).norm() == doctest::Approx(0.0));

  // ad(T) maps X -> Y and Y -> -X
  const Mat adT = g.ad(t);
  CHECK((adT * x - y).norm() < 1e-14);
  CHECK((adT * y + x).norm() < 1e-14);
  CHECK(g.ad(Vec::Zero(3)).norm() == 0.0);

  CHECK(g.form(x, x) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(g.form(x, y)) < 1e-15);
}

TEST_CASE("ad matrix columns are brackets with basis vectors")
{
  const CompactLieAlgebra g = buildAlgebra(Family::sp, 2);
  std::mt19937_64 rng(3);
  const Vec x = randomVec(rng, g.dim());
  const Mat a = g.ad(x);
  for (int j = 0; j < g.dim(); ++j)
    CHECK((a.col(j) - g.bracket(x, g.basisVector(j))).norm() < 1e-14);
  CHECK((a * x).norm() < 1e-13);
}

TEST_CASE("bracket is bilinear and the form is ad-invariant on random triples")
{
  const CompactLieAlgebra g = buildAlgebra(Family::su, 3);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec x = randomVec(rng, g.dim()), y = randomVec(rng, g.dim()), z = randomVec(rng, g.dim());
    const double a = u(rng), b = u(rng);
    const Vec lhs = g.bracket(a * x + b * y, z);
    const Vec rhs = a * g.bracket(x, z) + b * g.bracket(y, z);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(g.form(g.bracket(x, y), z) + g.form(y, g.bracket(x, z))) < 1e-13);
    CHECK(g.form(x, x) > 0.0);
  }
}

TEST_CASE("dimension mismatches raise input errors")
{
  const CompactLieAlgebra g = buildAlgebra(Family::su, 2);
  CHECK_THROWS_AS(g.bracket(Vec::Zero(3), Vec::Zero(4)), InputError);
  CHECK_THROWS_AS(g.form(Vec::Zero(2), Vec::Zero(3)), InputError);
  CHECK_THROWS_AS(g.ad(Vec::Zero(8)), InputError);
}

TEST_CASE("corrupting a structure constant breaks the Jacobi identity")
{
  const CompactLieAlgebra g = buildAlgebra(Family::su, 3);
  const CompactLieAlgebra bad = g.withStructureConstant(0, 1, 2, g.c(0, 1, 2) + 0.1);
  CHECK(bad.jacobiResidual() > 1e-3);
}

TEST_CASE("spectral calculus agrees with dense matrix functions")
{
  std::mt19937_64 rng(5);
  const int n = 7;
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    m.col(i) = randomVec(rng, n);
  const Mat spd = m * m.transpose() + 0.5 * Mat::Identity(n, n);
  const Vec v = randomVec(rng, n);
  SymmetricSpectrum s(spd);

  CHECK((s.apply([](double t) { return t; }, v) - spd * v).norm() < 1e-12);
  CHECK((s.apply([](double) { return 1.0; }, v) - v).norm() < 1e-12);
  // f(t) = 1/t against a dense solve
  const Vec solved = spd.ldlt().solve(v);
  CHECK((s.apply([](double t) { return 1.0 / t; }, v) - solved).norm() < 1e-10);

  Eigen::SelfAdjointEigenSolver<Mat> es(spd);
  const Vec expLam = es.eigenvalues().array().exp();
  const Mat dense = es.eigenvectors() * expLam.asDiagonal() * es.eigenvectors().transpose();
  CHECK((s.function([](double t) { return std::exp(t); }) * v - dense * v).norm()
        < 1e-10 * dense.norm());
}

TEST_CASE("spectral functions are only evaluated on the support of the vector")
{
  Mat a = Mat::Zero(3, 3);
  a(0, 0) = -1.0;
  a(1, 1) = 2.0;
  a(2, 2) = 2.0 + 1e-12;  // split multiplicity merges into one cluster
  SymmetricSpectrum s(a);
  CHECK(s.clusters().size() == 2);

  auto sq = [](double t) { return std::sqrt(t); };
  Vec v(3);
  v << 0.0, 1.0, 1.0;
  CHECK(s.apply(sq, v)(1) == doctest::Approx(std::sqrt(2.0)));

  v << 1.0, 1.0, 0.0;
  try {
    s.apply(sq, v);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.offendingValue() == doctest::Approx(-1.0));
  }
}

TEST_CASE("Frechet derivative matches central differences")
{
  std::mt19937_64 rng(9);
  const int n = 5;
  Mat m(n, n), e(n, n);
  for (int i = 0; i < n; ++i) {
    m.col(i) = randomVec(rng, n);
    e.col(i) = randomVec(rng, n);
  }
  const Mat a = m * m.transpose() + Mat::Identity(n, n);
  e = symmetrized(e);
  const Vec v = randomVec(rng, n);
  auto f = [](double t) { return std::sqrt(t); };
  auto fp = [](double t) { return 0.5 / std::sqrt(t); };
  const double h = 1e-5;
  const Vec fd = (SymmetricSpectrum(a + h * e).apply(f, v) - SymmetricSpectrum(a - h * e).apply(f, v))
                 / (2 * h);
  CHECK((SymmetricSpectrum(a).frechetApply(f, fp, e, v) - fd).norm() < 1e-8);
}

TEST_CASE("symmetricSpectral works in algebra coordinates")
{
  const CompactLieAlgebra g = buildAlgebra(Family::su, 2);
  std::mt19937_64 rng(1);
  const Vec x = randomVec(rng, 3);
  const Mat ad = g.ad(x);
  const Endo a = makeEndo(Mat(-ad * ad), std::make_shared<const Mat>(Mat::Identity(3, 3)), "g");
  const Vec v = randomVec(rng, 3);
  CHECK((symmetricSpectral(g, a, [](double t) { return t; }, v) - (-ad * ad) * v).norm() < 1e-12);
}

TEST_CASE("matrix exponential of a rotation generator")
{
  Mat a = Mat::Zero(2, 2);
  a(0, 1) = -M_PI / 2;
  a(1, 0) = M_PI / 2;
  const Mat e = expm(a);
  CHECK(std::abs(e(0, 0)) < 1e-14);
  CHECK(e(1, 0) == doctest::Approx(1.0));
}
