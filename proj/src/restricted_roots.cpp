#include "restricted_roots.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hksym {

  namespace {

    constexpr double kClusterTol = 1e-7;
    constexpr double kSnapTol = 1e-6;

    // Successive refinement: each operator is diagonalized on the blocks
    // produced by the previous ones.
    std::vector<Mat> jointEigenspaces(const std::vector<Mat>& ops, int n)
    {
      std::vector<Mat> blocks{Mat::Identity(n, n)};
      for (const Mat& op : ops) {
        std::vector<Mat> next;
        for (const Mat& b : blocks) {
          const SymmetricSpectrum s(symmetrized(b.transpose() * op * b), kClusterTol);
          for (const auto& cl : s.clusters())
            next.push_back(b * cl.vectors);
        }
        blocks = std::move(next);
      }
      return blocks;
    }

    double snapHalf(double v) { return std::round(2.0 * v) / 2.0; }

    // Recover c from the eigenvalues d_j = c_j^2 and e_pk = -c_p c_k,
    // normalized so the first nonzero entry is positive.
    Vec covector(const Vec& d, const Mat& e)
    {
      const int r = static_cast<int>(d.size());
      Vec c = Vec::Zero(r);
      int lead = -1;
      for (int j = 0; j < r; ++j)
        if (d(j) > 1e-6) {
          lead = j;
          break;
        }
      if (lead < 0)
        return c;
      c(lead) = std::sqrt(d(lead));
      for (int k = 0; k < r; ++k)
        if (k != lead && d(k) > 1e-6)
          c(k) = -e(std::min(lead, k), std::max(lead, k)) / c(lead);
      for (int p = 0; p < r; ++p)
        for (int k = p + 1; k < r; ++k)
          if (std::abs(e(p, k) + c(p) * c(k)) > kSnapTol)
            throw MooreViolation("joint eigenvalues are not those of a covector");
      return c;
    }

    bool admissible(const Vec& c)
    {
      int halves = 0, ones = 0, other = 0;
      for (int j = 0; j < c.size(); ++j) {
        const double a = std::abs(c(j));
        if (a == 0.5)
          ++halves;
        else if (a == 1.0)
          ++ones;
        else if (a != 0.0)
          ++other;
      }
      if (other)
        return false;
      if (ones == 1 && halves == 0)
        return true;
      if (ones == 0 && halves == 1)
        return true;
      return ones == 0 && halves == 2;
    }

    struct Block {
      Vec c;
      Mat basis;
    };

    std::vector<Block> decompose(const std::vector<Mat>& squares, const std::vector<Mat>& products,
                                 int r, int n)
    {
      std::vector<Mat> ops = squares;
      ops.insert(ops.end(), products.begin(), products.end());
      std::vector<Block> out;
      for (const Mat& b : jointEigenspaces(ops, n)) {
        const double cols = static_cast<double>(b.cols());
        Vec d(r);
        for (int j = 0; j < r; ++j)
          d(j) = (b.transpose() * squares[j] * b).trace() / cols;
        Mat e = Mat::Zero(r, r);
        int idx = 0;
        for (int p = 0; p < r; ++p)
          for (int k = p + 1; k < r; ++k)
            e(p, k) = (b.transpose() * products[idx++] * b).trace() / cols;
        Vec c = covector(d, e);
        for (int j = 0; j < r; ++j) {
          const double s = snapHalf(c(j));
          if (std::abs(s - c(j)) > kSnapTol)
            throw MooreViolation("restricted root coefficient " + std::to_string(c(j))
                                 + " is not a half-integer");
          c(j) = s;
        }
        auto same = std::find_if(out.begin(), out.end(),
                                 [&](const Block& o) { return o.c == c; });
        if (same == out.end()) {
          out.push_back({c, b});
        } else {
          Mat merged(n, same->basis.cols() + b.cols());
          merged << same->basis, b;
          same->basis = merged;
        }
      }
      return out;
    }

    bool lexGreater(const Vec& a, const Vec& b)
    {
      for (int j = 0; j < a.size(); ++j)
        if (a(j) != b(j))
          return a(j) > b(j);
      return false;
    }

    double projectorDistance(const Mat& a, const Mat& b)
    {
      return (a * a.transpose() - b * b.transpose()).cwiseAbs().maxCoeff();
    }

  }

  bool stronglyOrthogonal(const RootDatum& datum, const Root& a, const Root& b)
  {
    const Vec sum = a.theta + b.theta, diff = a.theta - b.theta;
    if (sum.cwiseAbs().maxCoeff() < 1e-7 || diff.cwiseAbs().maxCoeff() < 1e-7)
      return false;
    return datum.find(sum) < 0 && datum.find(diff) < 0;
  }

  StronglyOrthogonalSet cascade(const HermitianPair& pair, const RootDatum& datum)
  {
    std::vector<int> remaining = datum.positiveNoncompact();
    std::sort(remaining.begin(), remaining.end(), [&](int a, int b) {
      return compareRoots(datum.roots[a], datum.roots[b]) > 0;
    });
    StronglyOrthogonalSet sos;
    while (!remaining.empty()) {
      const int top = remaining.front();
      sos.betas.push_back(top);
      std::vector<int> keep;
      for (int i : remaining)
        if (i != top && stronglyOrthogonal(datum, datum.roots[top], datum.roots[i]))
          keep.push_back(i);
      remaining = std::move(keep);
    }
    for (int b : sos.betas) {
      sos.X.push_back(datum.roots[b].x);
      sos.Y.push_back(datum.roots[b].y);
      sos.T.push_back(datum.roots[b].t);
    }
    if (sos.rank() != spaceRank(pair.space()))
      throw ConstructionError("cascade length " + std::to_string(sos.rank())
                              + " differs from the rank of " + pair.space().str());
    const CascadeResiduals res = cascadeResiduals(pair, datum, sos);
    if (res.brackets > 1e-8 || res.abelian > 1e-8)
      throw ConstructionError("cascade triples violate the bracket relations");
    return sos;
  }

  CascadeResiduals cascadeResiduals(const HermitianPair& pair, const RootDatum& datum,
                                    const StronglyOrthogonalSet& sos)
  {
    const CompactLieAlgebra& g = pair.algebra();
    CascadeResiduals out;
    const int r = sos.rank();
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) {
        const double d = j == k ? 1.0 : 0.0;
        out.brackets = std::max(
          {out.brackets, (g.bracket(sos.X[j], sos.Y[k]) - d * sos.T[j]).cwiseAbs().maxCoeff(),
           (g.bracket(sos.T[j], sos.X[k]) - d * sos.Y[j]).cwiseAbs().maxCoeff(),
           (g.bracket(sos.T[j], sos.Y[k]) + d * sos.X[j]).cwiseAbs().maxCoeff()});
        out.abelian = std::max(out.abelian, g.bracket(sos.X[j], sos.X[k]).cwiseAbs().maxCoeff());
        out.dual = std::max(out.dual,
                            std::abs(datum.value(datum.roots[sos.betas[k]], sos.T[j]) - d));
        if (j < k
            && !stronglyOrthogonal(datum, datum.roots[sos.betas[j]], datum.roots[sos.betas[k]]))
          ++out.notStronglyOrthogonal;
      }
    return out;
  }

  std::string typeName(RootSystemType t, int rank)
  {
    return (t == RootSystemType::BC ? "BC" : "C") + std::to_string(rank);
  }

  std::string RestrictedRoot::label() const
  {
    std::vector<int> idx;
    for (int j = 0; j < c.size(); ++j)
      if (c(j) != 0.0)
        idx.push_back(j);
    std::ostringstream o;
    if (idx.size() == 1) {
      if (std::abs(c(idx[0])) == 0.5)
        o << "1/2 ";
      o << "e" << idx[0] + 1;
    } else if (idx.size() == 2) {
      o << "1/2(e" << idx[0] + 1 << (c(idx[1]) > 0 ? "+" : "-") << "e" << idx[1] + 1 << ")";
    } else {
      o << "0";
    }
    return o.str();
  }

  int RestrictedRootSystem::find(const Vec& c) const
  {
    for (std::size_t i = 0; i < sigmaPlus.size(); ++i)
      if ((sigmaPlus[i].c - c).cwiseAbs().maxCoeff() < 1e-9)
        return static_cast<int>(i);
    return -1;
  }

  std::vector<int> RestrictedRootSystem::sigmaPlusPlus() const
  {
    std::vector<int> out;
    for (std::size_t i = 0; i < sigmaPlus.size(); ++i)
      if ((sigmaPlus[i].c.array() >= 0.0).all())
        out.push_back(static_cast<int>(i));
    return out;
  }

  RestrictedRootSystem restrictedDecomposition(const HermitianPair& pair,
                                               const StronglyOrthogonalSet& sos)
  {
    const int r = sos.rank();
    std::vector<Mat> mSquares, kSquares, mProducts, kProducts;
    for (int j = 0; j < r; ++j) {
      mSquares.push_back(-pair.adMK(sos.X[j]) * pair.adKM(sos.X[j]));
      kSquares.push_back(-pair.adKM(sos.X[j]) * pair.adMK(sos.X[j]));
    }
    for (int p = 0; p < r; ++p)
      for (int k = p + 1; k < r; ++k) {
        mProducts.push_back(pair.adMK(sos.X[p]) * pair.adKM(sos.X[k]));
        kProducts.push_back(pair.adKM(sos.X[p]) * pair.adMK(sos.X[k]));
      }
    const std::vector<Block> mBlocks = decompose(mSquares, mProducts, r, pair.dimM());
    const std::vector<Block> kBlocks = decompose(kSquares, kProducts, r, pair.dimK());

    RestrictedRootSystem rrs;
    rrs.cascade = sos;
    rrs.a = Mat(pair.dimM(), r);
    for (int j = 0; j < r; ++j)
      rrs.a.col(j) = pair.toM(sos.X[j]);
    rrs.kCentralizer = Mat(pair.dimK(), 0);

    for (const Block& b : mBlocks) {
      if (b.c.isZero()) {
        if (b.basis.cols() != r || projectorDistance(b.basis, rrs.a) > 1e-8)
          throw ConstructionError("zero restricted-root space of m is not the Cartan subspace");
        continue;
      }
      if (!admissible(b.c))
        throw MooreViolation("restricted root outside the admissible set");
      RestrictedRoot root;
      root.c = b.c;
      root.m = b.basis;
      root.k = Mat(pair.dimK(), 0);
      rrs.sigmaPlus.push_back(root);
    }
    for (const Block& b : kBlocks) {
      if (b.c.isZero()) {
        rrs.kCentralizer = b.basis;
        continue;
      }
      const int idx = rrs.find(b.c);
      if (idx < 0)
        throw MooreViolation("eigenspace of k without a matching restricted root of m");
      rrs.sigmaPlus[idx].k = b.basis;
    }
    std::sort(rrs.sigmaPlus.begin(), rrs.sigmaPlus.end(),
              [](const RestrictedRoot& a, const RestrictedRoot& b) { return lexGreater(a.c, b.c); });

    const Mat& I = pair.complexStructure();
    for (RestrictedRoot& root : rrs.sigmaPlus) {
      const Mat image = I * root.m;
      root.partner = -2;
      if ((image - rrs.a * (rrs.a.transpose() * image)).cwiseAbs().maxCoeff() < 1e-9) {
        root.partner = -1;
        continue;
      }
      for (std::size_t i = 0; i < rrs.sigmaPlus.size(); ++i) {
        const Mat& m = rrs.sigmaPlus[i].m;
        if ((image - m * (m.transpose() * image)).cwiseAbs().maxCoeff() < 1e-9) {
          root.partner = static_cast<int>(i);
          break;
        }
      }
      if (root.partner == -2)
        throw MooreViolation("I m_lambda is not contained in a single restricted-root space");
    }

    rrs.type = RootSystemType::C;
    for (const RestrictedRoot& root : rrs.sigmaPlus)
      if (root.c.cwiseAbs().sum() == 0.5)
        rrs.type = RootSystemType::BC;
    return rrs;
  }

  int pairingViolations(const RestrictedRootSystem& rrs)
  {
    int bad = 0;
    for (const RestrictedRoot& root : rrs.sigmaPlus) {
      if (root.m.cols() != root.k.cols())
        ++bad;
      const double l1 = root.c.cwiseAbs().sum();
      Vec expected = root.c;
      if (l1 == 1.0 && (root.c.array() != 0.0).count() == 2) {
        // 1/2(e_p + e_k) <-> 1/2(e_p - e_k)
        int last = static_cast<int>(root.c.size()) - 1;
        while (root.c(last) == 0.0)
          --last;
        expected(last) = -root.c(last);
      }
      if (l1 == 1.0 && (root.c.array() != 0.0).count() == 1) {
        if (root.partner != -1)
          ++bad;
        continue;
      }
      if (root.partner < 0 || rrs.sigmaPlus[root.partner].c != expected)
        ++bad;
    }
    return bad;
  }

  RestrictedRootSystem restrictedRoots(const HermitianPair& pair, std::uint64_t seed)
  {
    const RootDatum datum = computeRootDatum(pair, seed);
    return restrictedDecomposition(pair, cascade(pair, datum));
  }

  int locate(const RestrictedRootSystem& rrs, const Vec& xi, double tol)
  {
    const double scale = std::max(1.0, xi.norm());
    if ((xi - rrs.a * (rrs.a.transpose() * xi)).norm() < tol * scale)
      return -1;
    for (std::size_t i = 0; i < rrs.sigmaPlus.size(); ++i) {
      const Mat& m = rrs.sigmaPlus[i].m;
      if ((xi - m * (m.transpose() * xi)).norm() < tol * scale)
        return static_cast<int>(i);
    }
    return -2;
  }

  AlgebraVector kPartner(const HermitianPair& pair, const RestrictedRootSystem& rrs,
                         const Vec& xi)
  {
    const int idx = locate(rrs, xi);
    if (idx == -1)
      throw InputError("vector lies in the Cartan subspace, which is killed by every ad(X_j)");
    if (idx == -2)
      throw InputError("vector does not lie in a single restricted-root space");
    const Vec& c = rrs.sigmaPlus[idx].c;
    int j = 0;
    c.cwiseAbs().maxCoeff(&j);
    const CompactLieAlgebra& g = pair.algebra();
    return -g.bracket(rrs.cascade.X[j], pair.fromM(xi)) / c(j);
  }

  Vec rhoM(const Vec& c) { return c.cwiseAbs(); }

  Vec rhoK(const Vec& c)
  {
    Vec out = Vec::Zero(c.size());
    std::vector<int> idx;
    for (int j = 0; j < c.size(); ++j) {
      if (std::abs(c(j)) == 1.0)
        return out;
      if (c(j) != 0.0)
        idx.push_back(j);
    }
    if (idx.size() == 1) {
      out(idx[0]) = 0.5;
    } else if (idx.size() == 2) {
      out(idx[0]) = 0.5;
      out(idx[1]) = -0.5;
    }
    return out;
  }

  MooreReport mooreMaps(const HermitianPair& pair, const RootDatum& datum,
                        const RestrictedRootSystem& rrs)
  {
    const CompactLieAlgebra& g = pair.algebra();
    const StronglyOrthogonalSet& sos = rrs.cascade;
    const int r = sos.rank();
    MooreReport rep;

    const auto pm = datum.positiveNoncompact();
    std::vector<Vec> snapped;
    for (int a : pm) {
      Vec rho(r);
      for (int j = 0; j < r; ++j)
        rho(j) = datum.value(datum.roots[a], sos.T[j]);
      Vec s = rho.unaryExpr([](double v) { return snapHalf(v); });
      rep.rhoSnap = std::max(rep.rhoSnap, (s - rho).cwiseAbs().maxCoeff());
      if (!admissible(s) || (s.array() < 0.0).any())
        ++rep.rhoOutside;
      rep.rho.push_back(rho);
      snapped.push_back(s);
    }
    for (int j = 0; j < r; ++j) {
      const auto it = std::find(pm.begin(), pm.end(), sos.betas[j]);
      const Vec& rho = rep.rho[it - pm.begin()];
      rep.rhoBeta = std::max(rep.rhoBeta, (rho - Vec::Unit(r, j)).cwiseAbs().maxCoeff());
    }

    const Mat& I = pair.complexStructure();
    for (const RestrictedRoot& root : rrs.sigmaPlus) {
      Mat both(pair.dimM(), 2 * root.m.cols());
      both << root.m, I * root.m;
      const Mat big = columnSpan(both, 1e-8);
      const Vec target = rhoM(root.c);
      std::vector<Vec> cols;
      for (std::size_t i = 0; i < pm.size(); ++i)
        if ((snapped[i] - target).cwiseAbs().maxCoeff() == 0.0) {
          cols.push_back(pair.toM(datum.roots[pm[i]].x));
          cols.push_back(pair.toM(datum.roots[pm[i]].y));
        }
      Mat expected(pair.dimM(), static_cast<int>(cols.size()));
      for (std::size_t i = 0; i < cols.size(); ++i)
        expected.col(static_cast<int>(i)) = cols[i];
      const Mat span = cols.empty() ? expected : columnSpan(expected, 1e-8);
      if (span.cols() != big.cols()) {
        ++rep.spanDimensionMismatch;
        continue;
      }
      rep.spans = std::max(rep.spans, projectorDistance(big, span));
    }

    for (const RestrictedRoot& root : rrs.sigmaPlus) {
      const Vec rk = rhoK(root.c);
      for (int col = 0; col < root.m.cols(); ++col) {
        const Vec xi = root.m.col(col);
        const AlgebraVector zeta = kPartner(pair, rrs, xi);
        if (root.partner < 0) {
          for (int j = 0; j < r; ++j)
            rep.kAction = std::max(rep.kAction, g.bracket(sos.T[j], zeta).cwiseAbs().maxCoeff());
          continue;
        }
        const AlgebraVector zetaI = kPartner(pair, rrs, I * xi);
        for (int j = 0; j < r; ++j) {
          const Vec res = g.bracket(sos.T[j], zeta) + rk(j) * zetaI;
          rep.kAction = std::max(rep.kAction, res.cwiseAbs().maxCoeff());
        }
      }
    }
    return rep;
  }

  SquaresIdentity checkSquaresIdentity(const HermitianPair& pair, const Vec& wm)
  {
    const Mat& I = pair.complexStructure();
    const Vec iw = I * wm;
    const Mat a2 = pair.adSquaredOnM(wm);
    const Mat b2 = pair.adSquaredOnM(iw);
    const AlgebraVector br = pair.algebra().bracket(pair.fromM(wm), pair.fromM(iw));
    SquaresIdentity out;
    out.identity = (I * pair.adMM(br) - a2 - b2).cwiseAbs().maxCoeff();
    out.commutator = (a2 * b2 - b2 * a2).cwiseAbs().maxCoeff();
    return out;
  }

  CentralizerReport checkCentralizer(const HermitianPair& pair, const RestrictedRootSystem& rrs)
  {
    CentralizerReport rep;
    const int n = static_cast<int>(rrs.kCentralizer.cols());
    if (n == 0) {
      rep.vacuous = true;
      return rep;
    }
    const int m = pair.dimM();
    Mat stacked(n * m, m);
    for (int i = 0; i < n; ++i)
      stacked.middleRows(i * m, m) = pair.adMM(pair.fromK(rrs.kCentralizer.col(i)));
    const Mat cent = nullSpace(stacked, 1e-9);
    rep.dimension = static_cast<int>(cent.cols());
    Mat expected(m, 2 * rrs.rank());
    expected << rrs.a, pair.complexStructure() * rrs.a;
    const Mat span = columnSpan(expected, 1e-9);
    rep.residual = cent.cols() == span.cols() ? projectorDistance(cent, span) : 1.0;
    return rep;
  }

}
