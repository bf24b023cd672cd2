#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "hermitian_pair.hpp"

#include <random>

using namespace hksym;

namespace {

  Vec randomVec(std::mt19937_64& rng, int n)
  {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i)
      v(i) = nd(rng);
    return v;
  }

  // Number of nonzero eigenvalues of ad(T) for a generic T in the
  // centralizer of a generic element of k, counted with a plain
  // nonsymmetric eigensolver.
  int bruteForceRootCount(const HermitianPair& p)
  {
    std::mt19937_64 rng(99);
    Vec zeta = Vec::Zero(p.dim());
    zeta.head(p.dimK()) = randomVec(rng, p.dimK());
    const Mat cent = nullSpace(p.algebra().ad(zeta), 1e-9);
    const Vec t = cent * randomVec(rng, static_cast<int>(cent.cols()));
    Eigen::EigenSolver<Mat> es(p.algebra().ad(t), false);
    int count = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()(i)) > 1e-7)
        ++count;
    return count;
  }

}

TEST_CASE("space grammar round-trips and rejects malformed input")
{
  for (const char* s : {"su:1,1", "su:2,3", "sp:2", "so*:3", "soB:4"})
    CHECK(SpaceSpec::parse(s).str() == s);
  CHECK(SpaceSpec::parse("su:1,2") == SpaceSpec::parse("su:1,2"));
  CHECK(SpaceSpec::parse("su:1,2") != SpaceSpec::parse("su:2,1"));
  for (const char* s : {"su:0,1", "su:1", "sp:0", "so*:2", "soB:2", "xx:3", "sp", "sp:2 ",
                        "su:1,-1", "sp:a"})
    CHECK_THROWS_AS(SpaceSpec::parse(s), InputError);
}

TEST_CASE("dimensions of m")
{
  CHECK(buildPair(SpaceSpec::parse("su:1,1")).dimM() == 2);
  CHECK(buildPair(SpaceSpec::parse("su:1,2")).dimM() == 4);
  CHECK(buildPair(SpaceSpec::parse("sp:2")).dimM() == 6);
  CHECK(buildPair(SpaceSpec::parse("su:2,2")).dimM() == 8);
  CHECK(buildPair(SpaceSpec::parse("so*:3")).dimM() == 6);
  CHECK(buildPair(SpaceSpec::parse("soB:3")).dimM() == 6);
}

TEST_CASE("pair invariants on every family")
{
  for (const char* s : {"su:1,1", "su:1,2", "su:2,2", "sp:2", "so*:3", "so*:4", "soB:3", "soB:4"}) {
    CAPTURE(s);
    const HermitianPair p = buildPair(SpaceSpec::parse(s));
    const CompactLieAlgebra& g = p.algebra();
    CHECK(g.jacobiResidual() < 1e-12);
    CHECK(g.adInvarianceResidual() < 1e-12);
    CHECK(p.cartanResidual() < 1e-10);
    const Mat& I = p.complexStructure();
    const int m = p.dimM();
    CHECK((I * I + Mat::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((I.transpose() * I - Mat::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
      const Vec xi = randomVec(rng, m), eta = randomVec(rng, m);
      const Vec zeta = p.fromK(randomVec(rng, p.dimK()));
      const Vec lhs = g.bracket(p.fromM(I * xi), p.fromM(I * eta));
      CHECK((lhs - g.bracket(p.fromM(xi), p.fromM(eta))).cwiseAbs().maxCoeff() < 1e-10);
      const Vec a = I * p.toM(g.bracket(zeta, p.fromM(eta)));
      const Vec b = p.toM(g.bracket(zeta, p.fromM(I * eta)));
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK(checkIInAdK(p) < 1e-10);
    CHECK(checkIInAdK(p, 1.1) > 1e-3);
  }
}

TEST_CASE("root counts agree with a brute-force diagonalization")
{
  struct Case {
    const char* s;
    int roots, pm, pk;
  };
  for (const Case c : {Case{"su:1,1", 2, 1, 0}, Case{"su:1,2", 6, 2, 1}, Case{"sp:2", 8, 3, 1},
                       Case{"su:2,2", 12, 4, 2}, Case{"soB:3", 8, 3, 1}, Case{"so*:3", 12, 3, 3}}) {
    CAPTURE(c.s);
    const HermitianPair p = buildPair(SpaceSpec::parse(c.s));
    const RootDatum d = computeRootDatum(p);
    CHECK(static_cast<int>(d.roots.size()) == c.roots);
    CHECK(static_cast<int>(d.roots.size()) == bruteForceRootCount(p));
    CHECK(static_cast<int>(d.positiveNoncompact().size()) == c.pm);
    CHECK(static_cast<int>(d.positiveCompact().size()) == c.pk);
    CHECK(p.dimM() == 2 * c.pm);
    CHECK(p.dimK() == d.tBasis.cols() + 2 * c.pk);

    const RootDatumResiduals r = rootDatumResiduals(p, d);
    CHECK(r.eigen < 1e-10);
    CHECK(r.triple < 1e-10);
    CHECK(r.realTriple < 1e-10);
    CHECK(r.complexStructure < 1e-10);
    CHECK(r.rootAction < 1e-10);
    CHECK(r.sumsThatAreRoots == 0);
    CHECK(r.badN1 == 0);
  }
}

TEST_CASE("su(2)/u(1): Z0 is parallel to T1 and I X1 = Y1")
{
  const HermitianPair p = buildPair(SpaceSpec::parse("su:1,1"));
  const RootDatum d = computeRootDatum(p);
  const Root& b = d.roots[d.positiveNoncompact().front()];
  const double cosine = p.z0().dot(b.t) / (p.z0().norm() * b.t.norm());
  CHECK(std::abs(std::abs(cosine) - 1.0) < 1e-12);
  CHECK((p.complexStructure() * p.toM(b.x) - p.toM(b.y)).norm() < 1e-12);
  CHECK(p.algebra().form(b.x, b.x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("root datum is reproducible for a fixed seed")
{
  const HermitianPair p = buildPair(SpaceSpec::parse("sp:2"));
  const RootDatum a = computeRootDatum(p, 4), b = computeRootDatum(p, 4);
  REQUIRE(a.roots.size() == b.roots.size());
  for (std::size_t i = 0; i < a.roots.size(); ++i)
    CHECK((a.roots[i].theta - b.roots[i].theta).norm() == 0.0);
}
