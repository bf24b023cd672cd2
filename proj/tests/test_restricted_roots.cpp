#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "restricted_roots.hpp"

#include <algorithm>
#include <map>
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

  struct Fixture {
    HermitianPair pair;
    RootDatum datum;
    StronglyOrthogonalSet sos;
    RestrictedRootSystem rrs;

    explicit Fixture(const char* s)
      : pair(buildPair(SpaceSpec::parse(s))), datum(computeRootDatum(pair)),
        sos(cascade(pair, datum)), rrs(restrictedDecomposition(pair, sos))
    {
    }
  };

  // Largest pairwise strongly orthogonal subset of Delta+_m by exhaustive
  // search over all subsets.
  int bruteForceCascadeSize(const RootDatum& d)
  {
    const auto pm = d.positiveNoncompact();
    const int n = static_cast<int>(pm.size());
    int best = 0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      bool ok = true;
      for (int a = 0; a < n && ok; ++a)
        for (int b = a + 1; b < n && ok; ++b)
          if ((mask >> a & 1) && (mask >> b & 1))
            ok = stronglyOrthogonal(d, d.roots[pm[a]], d.roots[pm[b]]);
      if (ok)
        best = std::max(best, __builtin_popcount(mask));
    }
    return best;
  }

  // Eigenvalues of -ad(w)^2 on m for w = sum x_j X_j, matched against the
  // values (c . x)^2 of every admissible covector. Returns covector label
  // -> multiplicity, built only from a dense eigensolver.
  std::map<std::string, int> bruteForceSigma(const HermitianPair& p, const StronglyOrthogonalSet& s)
  {
    const int r = s.rank();
    std::vector<Vec> candidates;
    for (int j = 0; j < r; ++j) {
      candidates.push_back(Vec::Unit(r, j));
      candidates.push_back(0.5 * Vec::Unit(r, j));
      for (int k = j + 1; k < r; ++k) {
        candidates.push_back(0.5 * (Vec::Unit(r, j) + Vec::Unit(r, k)));
        candidates.push_back(0.5 * (Vec::Unit(r, j) - Vec::Unit(r, k)));
      }
    }
    Vec x(r);
    for (int j = 0; j < r; ++j)
      x(j) = 1.0 + 0.37 * (j + 1) * (j + 1);  // generic: all (c.x)^2 distinct
    Vec w = Vec::Zero(p.dimM());
    for (int j = 0; j < r; ++j)
      w += x(j) * p.toM(s.X[j]);
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(-p.adSquaredOnM(w)));
    std::map<std::string, int> out;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double mu = es.eigenvalues()(i);
      if (std::abs(mu) < 1e-9) {
        ++out["0"];
        continue;
      }
      int hits = 0;
      for (const Vec& c : candidates)
        if (std::abs(c.dot(x) * c.dot(x) - mu) < 1e-8) {
          RestrictedRoot tmp;
          tmp.c = c;
          ++out[tmp.label()];
          ++hits;
        }
      if (hits != 1)
        ++out["?"];
    }
    return out;
  }

  std::map<std::string, int> computedSigma(const RestrictedRootSystem& rrs)
  {
    std::map<std::string, int> out;
    out["0"] = rrs.rank();
    for (const auto& root : rrs.sigmaPlus)
      out[root.label()] += root.multiplicity();
    return out;
  }

}

TEST_CASE("cascade length equals the rank and the maximal strongly orthogonal subset")
{
  for (const auto& [s, r] : std::vector<std::pair<const char*, int>>{
         {"su:1,1", 1}, {"su:1,2", 1}, {"su:2,2", 2}, {"sp:2", 2}, {"su:2,3", 2}, {"soB:3", 2}}) {
    CAPTURE(s);
    Fixture f(s);
    CHECK(f.sos.rank() == r);
    CHECK(bruteForceCascadeSize(f.datum) == r);
    const CascadeResiduals res = cascadeResiduals(f.pair, f.datum, f.sos);
    CHECK(res.brackets < 1e-10);
    CHECK(res.abelian < 1e-10);
    CHECK(res.dual < 1e-10);
    CHECK(res.notStronglyOrthogonal == 0);
  }
}

TEST_CASE("restricted roots agree with a brute-force eigenvalue match")
{
  for (const char* s : {"su:1,1", "su:1,2", "su:2,2", "sp:2", "su:2,3", "so*:3", "so*:4", "soB:3",
                        "soB:4"}) {
    CAPTURE(s);
    Fixture f(s);
    const auto oracle = bruteForceSigma(f.pair, f.sos);
    CHECK(oracle.count("?") == 0);
    CHECK(oracle == computedSigma(f.rrs));
    CHECK(pairingViolations(f.rrs) == 0);
    int total = f.rrs.rank();
    int totalK = static_cast<int>(f.rrs.kCentralizer.cols());
    for (const auto& root : f.rrs.sigmaPlus) {
      total += root.multiplicity();
      totalK += static_cast<int>(root.k.cols());
      CHECK(root.k.cols() == root.m.cols());
    }
    CHECK(total == f.pair.dimM());
    CHECK(totalK == f.pair.dimK());
  }
}

TEST_CASE("restricted root tables of the reference spaces")
{
  SUBCASE("su:1,2 is BC1")
  {
    Fixture f("su:1,2");
    CHECK(typeName(f.rrs.type, f.rrs.rank()) == "BC1");
    REQUIRE(f.rrs.sigmaPlus.size() == 2);
    CHECK(f.rrs.sigmaPlus[0].label() == "e1");
    CHECK(f.rrs.sigmaPlus[0].multiplicity() == 1);
    CHECK(f.rrs.sigmaPlus[0].partner == -1);
    CHECK(f.rrs.sigmaPlus[1].label() == "1/2 e1");
    CHECK(f.rrs.sigmaPlus[1].multiplicity() == 2);
    CHECK(f.rrs.sigmaPlus[1].partner == 1);
  }
  SUBCASE("su:2,2 is C2 with double half-sum roots")
  {
    Fixture f("su:2,2");
    CHECK(typeName(f.rrs.type, f.rrs.rank()) == "C2");
    const auto t = computedSigma(f.rrs);
    CHECK(t.at("1/2(e1+e2)") == 2);
    CHECK(t.at("1/2(e1-e2)") == 2);
    CHECK(t.at("e1") == 1);
    CHECK(t.at("e2") == 1);
    const int plus = f.rrs.find(Vec::Constant(2, 0.5));
    REQUIRE(plus >= 0);
    CHECK(f.rrs.sigmaPlus[f.rrs.sigmaPlus[plus].partner].label() == "1/2(e1-e2)");
  }
  SUBCASE("sp:2 is C2 with simple roots")
  {
    Fixture f("sp:2");
    CHECK(typeName(f.rrs.type, f.rrs.rank()) == "C2");
    for (const auto& root : f.rrs.sigmaPlus)
      CHECK(root.multiplicity() == 1);
    CHECK(f.rrs.sigmaPlus.size() == 4);
    CHECK(f.rrs.sigmaPlusPlus().size() == 3);
  }
  SUBCASE("i eps_j has multiplicity one and m_lambda = R I X_j")
  {
    for (const char* s : {"su:2,2", "sp:2", "su:1,3", "soB:5"}) {
      CAPTURE(s);
      Fixture f(s);
      for (int j = 0; j < f.rrs.rank(); ++j) {
        const int idx = f.rrs.find(Vec::Unit(f.rrs.rank(), j));
        REQUIRE(idx >= 0);
        const Mat& m = f.rrs.sigmaPlus[idx].m;
        REQUIRE(m.cols() == 1);
        const Vec ix = f.pair.complexStructure() * f.rrs.a.col(j);
        CHECK(std::abs(std::abs(m.col(0).dot(ix)) - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("k partner of Y_1 in su(2) is -T_1")
{
  Fixture f("su:1,1");
  const Vec y = f.pair.toM(f.sos.Y[0]);
  const AlgebraVector zeta = kPartner(f.pair, f.rrs, y);
  CHECK((zeta + f.sos.T[0]).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((kPartner(f.pair, f.rrs, 2.0 * y) - 2.0 * zeta).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(kPartner(f.pair, f.rrs, f.rrs.a.col(0)), InputError);
}

TEST_CASE("k partner satisfies both bracket relations")
{
  for (const char* s : {"su:1,2", "su:2,2", "sp:2", "soB:3"}) {
    CAPTURE(s);
    Fixture f(s);
    const CompactLieAlgebra& g = f.pair.algebra();
    for (const auto& root : f.rrs.sigmaPlus)
      for (int col = 0; col < root.m.cols(); ++col) {
        const Vec xi = root.m.col(col);
        const AlgebraVector zeta = kPartner(f.pair, f.rrs, xi);
        CHECK(f.pair.toM(zeta).norm() < 1e-12);
        for (int j = 0; j < f.rrs.rank(); ++j) {
          const double cj = root.c(j);
          CHECK((g.bracket(f.sos.X[j], f.pair.fromM(xi)) + cj * zeta).cwiseAbs().maxCoeff()
                < 1e-10);
          CHECK((g.bracket(f.sos.X[j], zeta) - cj * f.pair.fromM(xi)).cwiseAbs().maxCoeff()
                < 1e-10);
        }
        // zeta lies in k_lambda
        const Vec zk = f.pair.toK(zeta);
        CHECK((zk - root.k * (root.k.transpose() * zk)).norm() < 1e-10);
      }
  }
}

TEST_CASE("Moore maps")
{
  for (const char* s : {"su:1,1", "su:1,2", "su:2,2", "sp:2", "su:2,3", "so*:4", "soB:3"}) {
    CAPTURE(s);
    Fixture f(s);
    const MooreReport rep = mooreMaps(f.pair, f.datum, f.rrs);
    CHECK(rep.rhoSnap < 1e-10);
    CHECK(rep.rhoOutside == 0);
    CHECK(rep.rhoBeta < 1e-10);
    CHECK(rep.spanDimensionMismatch == 0);
    CHECK(rep.spans < 1e-10);
    CHECK(rep.kAction < 1e-10);
  }
  CHECK(rhoM((Vec(2) << 0.5, -0.5).finished()) == (Vec(2) << 0.5, 0.5).finished());
  CHECK(rhoK((Vec(2) << 0.5, 0.5).finished()) == (Vec(2) << 0.5, -0.5).finished());
  CHECK(rhoK((Vec(2) << 0.0, 1.0).finished()).isZero());
}

TEST_CASE("su:1,2: the root e1 pairs with zero and t' kills k_e1")
{
  Fixture f("su:1,2");
  const int idx = f.rrs.find(Vec::Ones(1));
  REQUIRE(idx >= 0);
  CHECK(f.rrs.sigmaPlus[idx].partner == -1);
  const CompactLieAlgebra& g = f.pair.algebra();
  const Mat& k = f.rrs.sigmaPlus[idx].k;
  for (int col = 0; col < k.cols(); ++col)
    CHECK(g.bracket(f.sos.T[0], f.pair.fromK(k.col(col))).norm() < 1e-12);
}

TEST_CASE("I ad([w,Iw]) = ad(w)^2 + ad(Iw)^2 on m")
{
  {
    Fixture f("su:1,1");
    const SquaresIdentity z = checkSquaresIdentity(f.pair, Vec::Zero(2));
    CHECK(z.identity == 0.0);
    CHECK(z.commutator == 0.0);
    const SquaresIdentity x = checkSquaresIdentity(f.pair, f.rrs.a.col(0));
    CHECK(x.identity < 1e-12);
    CHECK(x.commutator < 1e-12);
  }
  for (const char* s : {"sp:2", "su:2,2", "su:1,2", "soB:4"}) {
    CAPTURE(s);
    const HermitianPair p = buildPair(SpaceSpec::parse(s));
    std::mt19937_64 rng(17);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const SquaresIdentity r = checkSquaresIdentity(p, randomVec(rng, p.dimM()));
      worst = std::max({worst, r.identity, r.commutator});
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("centralizer of k^a in m is a + I a")
{
  {
    Fixture f("sp:2");
    CHECK(checkCentralizer(f.pair, f.rrs).vacuous);
  }
  {
    Fixture f("su:1,2");
    const CentralizerReport c = checkCentralizer(f.pair, f.rrs);
    CHECK_FALSE(c.vacuous);
    CHECK(c.dimension == 2);
    CHECK(c.residual < 1e-10);
  }
  {
    Fixture f("su:2,2");
    const CentralizerReport c = checkCentralizer(f.pair, f.rrs);
    CHECK_FALSE(c.vacuous);
    CHECK(c.dimension == 4);
    CHECK(c.residual < 1e-10);
  }
}
