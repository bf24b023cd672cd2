#include "hermitian_pair.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

namespace hksym {

  namespace {
    using cd = std::complex<double>;

    int parseCount(const std::string& s, const std::string& whole)
    {
      if (s.empty() || s.size() > 4)
        throw InputError("malformed space '" + whole + "'");
      for (char ch : s)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
          throw InputError("malformed space '" + whole + "'");
      return std::stoi(s);
    }

    CVec complexBracket(const CompactLieAlgebra& g, const CVec& x, const CVec& y)
    {
      const Vec xr = x.real(), xi = x.imag(), yr = y.real(), yi = y.imag();
      const Vec re = g.bracket(xr, yr) - g.bracket(xi, yi);
      const Vec im = g.bracket(xr, yi) + g.bracket(xi, yr);
      return re.cast<cd>() + cd(0.0, 1.0) * im.cast<cd>();
    }

    CMat commutator(const CMat& a, const CMat& b) { return a * b - b * a; }

    // Defining-representation data for a space: family, matrix size of
    // the algebra parameter, and the central element of k.
    struct Realization {
      Family family;
      int n;
      CMat z0;
    };

    Realization realize(const SpaceSpec& s)
    {
      const cd I(0.0, 1.0);
      switch (s.kind) {
      case SpaceSpec::Kind::su: {
        const int n = s.p + s.q;
        CMat z = CMat::Zero(n, n);
        for (int i = 0; i < s.p; ++i)
          z(i, i) = I * (double(s.q) / n);
        for (int i = s.p; i < n; ++i)
          z(i, i) = -I * (double(s.p) / n);
        return {Family::su, n, z};
      }
      case SpaceSpec::Kind::sp: {
        const int n = s.p;
        CMat z = CMat::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
          z(i, i) = 0.5 * I;
          z(n + i, n + i) = -0.5 * I;
        }
        return {Family::sp, n, z};
      }
      case SpaceSpec::Kind::soStar: {
        const int n = s.p;
        CMat z = CMat::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
          z(i, n + i) = 0.5;
          z(n + i, i) = -0.5;
        }
        return {Family::so, 2 * n, z};
      }
      case SpaceSpec::Kind::soB: {
        const int n = s.p + 2;
        CMat z = CMat::Zero(n, n);
        z(0, 1) = 1.0;
        z(1, 0) = -1.0;
        return {Family::so, n, z};
      }
      }
      throw InputError("unknown space kind");
    }
  }

  SpaceSpec SpaceSpec::parse(const std::string& text)
  {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
      throw InputError("malformed space '" + text + "' (expected su:p,q | sp:n | so*:n | soB:n)");
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    SpaceSpec s;
    if (head == "su") {
      const auto comma = tail.find(',');
      if (comma == std::string::npos)
        throw InputError("malformed space '" + text + "' (expected su:p,q)");
      s.kind = Kind::su;
      s.p = parseCount(tail.substr(0, comma), text);
      s.q = parseCount(tail.substr(comma + 1), text);
      if (s.p < 1 || s.q < 1)
        throw InputError("su:p,q requires p, q >= 1");
      return s;
    }
    s.p = parseCount(tail, text);
    s.q = 0;
    if (head == "sp") {
      s.kind = Kind::sp;
      if (s.p < 1)
        throw InputError("sp:n requires n >= 1");
    } else if (head == "so*") {
      s.kind = Kind::soStar;
      if (s.p < 3)
        throw InputError("so*:n requires n >= 3");
    } else if (head == "soB") {
      s.kind = Kind::soB;
      if (s.p < 3)
        throw InputError("soB:n requires n >= 3");
    } else {
      throw InputError("unknown space family '" + head + "'");
    }
    return s;
  }

  std::string SpaceSpec::str() const
  {
    std::ostringstream o;
    switch (kind) {
    case Kind::su: o << "su:" << p << "," << q; break;
    case Kind::sp: o << "sp:" << p; break;
    case Kind::soStar: o << "so*:" << p; break;
    case Kind::soB: o << "soB:" << p; break;
    }
    return o.str();
  }

  std::string SpaceSpec::describe() const
  {
    std::ostringstream o;
    switch (kind) {
    case Kind::su: o << "su(" << p + q << ")/s(u(" << p << ")+u(" << q << "))"; break;
    case Kind::sp: o << "sp(" << p << ")/u(" << p << ")"; break;
    case Kind::soStar: o << "so(" << 2 * p << ")/u(" << p << ")"; break;
    case Kind::soB: o << "so(" << p + 2 << ")/(so(2)+so(" << p << "))"; break;
    }
    return o.str();
  }

  int algebraRank(const SpaceSpec& s)
  {
    switch (s.kind) {
    case SpaceSpec::Kind::su: return s.p + s.q - 1;
    case SpaceSpec::Kind::sp: return s.p;
    case SpaceSpec::Kind::soStar: return s.p;
    case SpaceSpec::Kind::soB: return (s.p + 2) / 2;
    }
    return 0;
  }

  int spaceRank(const SpaceSpec& s)
  {
    switch (s.kind) {
    case SpaceSpec::Kind::su: return std::min(s.p, s.q);
    case SpaceSpec::Kind::sp: return s.p;
    case SpaceSpec::Kind::soStar: return s.p / 2;
    case SpaceSpec::Kind::soB: return 2;
    }
    return 0;
  }

  HermitianPair::HermitianPair(SpaceSpec space, std::shared_ptr<const MatrixAlgebra> matrices,
                               int dimK, AlgebraVector z0)
    : m_space(space), m_matrices(std::move(matrices)), m_dimK(dimK), m_z0(std::move(z0))
  {
    if (m_dimK <= 0 || m_dimK >= dim())
      throw ConstructionError("degenerate Cartan decomposition");
    m_I = adMM(m_z0);
  }

  Mat HermitianPair::kBasis() const { return Mat::Identity(dim(), dim()).leftCols(m_dimK); }
  Mat HermitianPair::mBasis() const { return Mat::Identity(dim(), dim()).rightCols(dimM()); }

  AlgebraVector HermitianPair::fromM(const Vec& mc) const
  {
    if (mc.size() != dimM())
      throw InputError("vector is not in m coordinates");
    AlgebraVector x = Vec::Zero(dim());
    x.tail(dimM()) = mc;
    return x;
  }

  Vec HermitianPair::toM(const AlgebraVector& x) const
  {
    if (x.size() != dim())
      throw InputError("vector does not belong to the algebra");
    return (algebra().gram() * x).tail(dimM());
  }

  AlgebraVector HermitianPair::fromK(const Vec& kc) const
  {
    if (kc.size() != m_dimK)
      throw InputError("vector is not in k coordinates");
    AlgebraVector x = Vec::Zero(dim());
    x.head(m_dimK) = kc;
    return x;
  }

  Vec HermitianPair::toK(const AlgebraVector& x) const
  {
    if (x.size() != dim())
      throw InputError("vector does not belong to the algebra");
    return (algebra().gram() * x).head(m_dimK);
  }

  Mat HermitianPair::adMM(const AlgebraVector& x) const
  {
    return algebra().ad(x).bottomRightCorner(dimM(), dimM());
  }
  Mat HermitianPair::adMK(const AlgebraVector& x) const
  {
    return algebra().ad(x).block(m_dimK, 0, dimM(), m_dimK);
  }
  Mat HermitianPair::adKM(const AlgebraVector& x) const
  {
    return algebra().ad(x).block(0, m_dimK, m_dimK, dimM());
  }
  Mat HermitianPair::adKK(const AlgebraVector& x) const
  {
    return algebra().ad(x).topLeftCorner(m_dimK, m_dimK);
  }

  Mat HermitianPair::adSquaredOnM(const Vec& xm) const
  {
    const Mat a = algebra().ad(fromM(xm));
    return a.block(m_dimK, 0, dimM(), m_dimK) * a.block(0, m_dimK, m_dimK, dimM());
  }

  Mat HermitianPair::adProductOnM(const Vec& xm, const Vec& ym) const
  {
    const Mat a = algebra().ad(fromM(xm));
    const Mat b = algebra().ad(fromM(ym));
    return a.block(m_dimK, 0, dimM(), m_dimK) * b.block(0, m_dimK, m_dimK, dimM());
  }

  Vec HermitianPair::doubleBracketM(const Vec& x, const Vec& y, const Vec& z) const
  {
    const CompactLieAlgebra& g = algebra();
    return toM(g.bracket(fromM(x), g.bracket(fromM(y), fromM(z))));
  }

  double HermitianPair::cartanResidual() const
  {
    const CompactLieAlgebra& g = algebra();
    const int n = dim();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const bool ik = i < m_dimK, jk = j < m_dimK;
        // [k,k] and [m,m] land in k; [k,m] lands in m.
        const bool targetK = (ik == jk);
        for (int k = 0; k < n; ++k) {
          const bool kk = k < m_dimK;
          if (kk != targetK)
            worst = std::max(worst, std::abs(g.c(i, j, k)));
        }
      }
    return worst;
  }

  HermitianPair buildPairWithKappa(const SpaceSpec& space, double kappa)
  {
    const Realization rz = realize(space);
    const MatrixAlgebra base = buildMatrixAlgebra(rz.family, rz.n);

    std::vector<CMat> kParts, mParts;
    std::vector<std::string> kLabels, mLabels;
    for (std::size_t i = 0; i < base.realization.size(); ++i) {
      const CMat& x = base.realization[i];
      const CMat xm = -commutator(rz.z0, commutator(rz.z0, x));
      kParts.push_back(x - xm);
      mParts.push_back(xm);
      kLabels.push_back("k:" + base.algebra.labels()[i]);
      mLabels.push_back("m:" + base.algebra.labels()[i]);
    }
    std::vector<CMat> spanning{rz.z0};
    std::vector<std::string> labels{"z0"};
    spanning.insert(spanning.end(), kParts.begin(), kParts.end());
    spanning.insert(spanning.end(), mParts.begin(), mParts.end());
    labels.insert(labels.end(), kLabels.begin(), kLabels.end());
    labels.insert(labels.end(), mLabels.begin(), mLabels.end());

    auto ma = std::make_shared<MatrixAlgebra>(algebraFromMatrices(spanning, labels, kappa));
    int dimK = 0;
    for (const auto& l : ma->algebra.labels())
      if (l == "z0" || l.rfind("k:", 0) == 0)
        ++dimK;
    if (ma->algebra.labels().front() != "z0")
      throw ConstructionError("center element was lost during orthonormalization");

    const double z0norm = std::sqrt(-kappa * (rz.z0 * rz.z0).trace().real());
    AlgebraVector z0 = Vec::Zero(ma->algebra.dim());
    z0(0) = z0norm;

    HermitianPair pair(space, ma, dimK, z0);
    const Mat& I = pair.complexStructure();
    const double sq = (I * I + Mat::Identity(pair.dimM(), pair.dimM())).cwiseAbs().maxCoeff();
    if (sq > 1e-10)
      throw ConstructionError("ad(Z0) does not square to -1 on m");
    return pair;
  }

  HermitianPair buildPair(const SpaceSpec& space)
  {
    const Realization rz = realize(space);
    const double k0 = defaultKappa(rz.family);
    HermitianPair first = buildPairWithKappa(space, k0);
    const RootDatum datum = computeRootDatum(first);
    const auto pm = datum.positiveNoncompact();
    if (pm.empty())
      throw ConstructionError("no noncompact positive roots");
    // The cascade starts with the highest root of Delta+_m.
    int top = pm.front();
    for (int i : pm)
      if (compareRoots(datum.roots[i], datum.roots[top]) > 0)
        top = i;
    const AlgebraVector& x = datum.roots[top].x;
    const double len2 = first.algebra().form(x, x);
    if (std::abs(len2 - 1.0) < 1e-13)
      return first;
    return buildPairWithKappa(space, k0 / len2);
  }

  double RootDatum::value(const Root& r, const AlgebraVector& T) const
  {
    return r.theta.dot(tBasis.transpose() * T);
  }

  int RootDatum::find(const Vec& theta, double tol) const
  {
    for (std::size_t i = 0; i < roots.size(); ++i)
      if ((roots[i].theta - theta).cwiseAbs().maxCoeff() < tol)
        return static_cast<int>(i);
    return -1;
  }

  std::vector<int> RootDatum::positiveNoncompact() const
  {
    std::vector<int> out;
    for (std::size_t i = 0; i < roots.size(); ++i)
      if (roots[i].positive && !roots[i].compact)
        out.push_back(static_cast<int>(i));
    return out;
  }

  std::vector<int> RootDatum::positiveCompact() const
  {
    std::vector<int> out;
    for (std::size_t i = 0; i < roots.size(); ++i)
      if (roots[i].positive && roots[i].compact)
        out.push_back(static_cast<int>(i));
    return out;
  }

  int RootDatum::countPositive() const
  {
    return static_cast<int>(std::count_if(roots.begin(), roots.end(),
                                          [](const Root& r) { return r.positive; }));
  }

  int compareRoots(const Root& a, const Root& b, double tol)
  {
    if (a.n1 != b.n1)
      return a.n1 < b.n1 ? -1 : 1;
    for (int k = 0; k < a.theta.size(); ++k) {
      const double d = a.theta(k) - b.theta(k);
      if (std::abs(d) > tol)
        return d < 0 ? -1 : 1;
    }
    return 0;
  }

  RootDatum computeRootDatum(const HermitianPair& pair, std::uint64_t seed)
  {
    const CompactLieAlgebra& g = pair.algebra();
    const int n = g.dim();
    const int l = algebraRank(pair.space());
    const cd I(0.0, 1.0);

    for (int attempt = 0; attempt < 8; ++attempt) {
      std::mt19937_64 rng(seed * 1000003ULL + 17ULL * attempt + 5ULL);
      std::normal_distribution<double> nd(0.0, 1.0);

      // Cartan subalgebra: centralizer of a random element of k.
      Vec zeta = Vec::Zero(n);
      for (int i = 0; i < pair.dimK(); ++i)
        zeta(i) = nd(rng);
      const Mat cent = nullSpace(g.ad(zeta), 1e-9);
      if (cent.cols() != l)
        continue;
      if (cent.bottomRows(pair.dimM()).cwiseAbs().maxCoeff() > 1e-9)
        continue;

      Mat t(n, l);
      t.col(0) = pair.z0() / pair.z0().norm();
      int filled = 1;
      for (int c = 0; c < cent.cols() && filled < l; ++c) {
        Vec v = cent.col(c);
        for (int pass = 0; pass < 2; ++pass)
          for (int j = 0; j < filled; ++j)
            v -= t.col(j).dot(v) * t.col(j);
        if (v.norm() < 1e-6)
          continue;
        t.col(filled++) = v / v.norm();
      }
      if (filled != l)
        continue;

      Vec coeff(l);
      for (int k = 0; k < l; ++k)
        coeff(k) = nd(rng);
      const Vec T = t * coeff;
      Mat adT = g.ad(T);
      adT = 0.5 * (adT - adT.transpose());
      const CMat herm = -I * adT.cast<cd>();
      Eigen::SelfAdjointEigenSolver<CMat> es(herm);
      const Vec mu = es.eigenvalues();
      const CMat vecs = es.eigenvectors();

      bool generic = true;
      int zeros = 0;
      for (int i = 0; i < n; ++i) {
        if (std::abs(mu(i)) < 1e-8)
          ++zeros;
        else if (std::abs(mu(i)) < 1e-4)
          generic = false;
        if (i > 0 && std::abs(mu(i)) >= 1e-8 && std::abs(mu(i - 1)) >= 1e-8
            && mu(i) - mu(i - 1) < 1e-6)
          generic = false;
      }
      if (!generic || zeros != l)
        continue;

      std::vector<Mat> adt(l);
      for (int k = 0; k < l; ++k)
        adt[k] = g.ad(t.col(k));

      RootDatum datum;
      datum.tBasis = t;
      const double z0norm = pair.z0().norm();
      bool ok = true;
      std::vector<Root> positives;
      for (int i = 0; i < n && ok; ++i) {
        if (std::abs(mu(i)) < 1e-8)
          continue;
        CVec e = vecs.col(i);
        Root r;
        r.theta.resize(l);
        for (int k = 0; k < l; ++k) {
          const CVec ae = adt[k].cast<cd>() * e;
          r.theta(k) = (e.dot(-I * ae)).real() / e.squaredNorm();
        }
        const double n1 = z0norm * r.theta(0);
        r.n1 = static_cast<int>(std::lround(n1));
        if (std::abs(n1 - r.n1) > 1e-7) {
          ok = false;
          break;
        }
        r.compact = (r.n1 == 0);
        Root zero;
        zero.theta = Vec::Zero(l);
        zero.n1 = 0;
        if (compareRoots(r, zero) <= 0)
          continue;
        r.positive = true;

        // Phase: first significant coordinate real and positive.
        const double big = e.cwiseAbs().maxCoeff();
        for (int c = 0; c < n; ++c)
          if (std::abs(e(c)) > 1e-6 * big) {
            e *= std::conj(e(c)) / std::abs(e(c));
            break;
          }
        // Scale: alpha(H) = 2 with H = -[E, conj(E)].
        const CVec h0 = -complexBracket(g, e, e.conjugate());
        cd ah = 0.0;
        for (int k = 0; k < l; ++k)
          ah += t.col(k).cast<cd>().dot(h0) * I * r.theta(k);
        if (std::abs(ah.imag()) > 1e-8 * std::abs(ah) || ah.real() <= 0.0) {
          ok = false;
          break;
        }
        e *= std::sqrt(2.0 / ah.real());
        r.e = e;
        r.h = -complexBracket(g, e, e.conjugate());
        r.x = e.real();
        r.y = -e.imag();
        r.t = -0.5 * r.h.imag();
        positives.push_back(r);
      }
      if (!ok)
        continue;

      std::sort(positives.begin(), positives.end(),
                [](const Root& a, const Root& b) { return compareRoots(a, b) > 0; });
      for (const Root& r : positives)
        datum.roots.push_back(r);
      for (const Root& r : positives) {
        Root neg;
        neg.theta = -r.theta;
        neg.n1 = -r.n1;
        neg.compact = r.compact;
        neg.positive = false;
        neg.e = r.e.conjugate();
        neg.h = -r.h;
        datum.roots.push_back(neg);
      }
      if (static_cast<int>(datum.roots.size()) != n - l)
        continue;
      return datum;
    }
    throw ConstructionError("could not find a regular Cartan subalgebra for " + pair.space().str());
  }

  double checkIInAdK(const HermitianPair& pair, double scale)
  {
    const Mat e = expm((std::numbers::pi / 2.0) * pair.algebra().ad(scale * pair.z0()));
    const Mat em = e.bottomRightCorner(pair.dimM(), pair.dimM());
    return (em - pair.complexStructure()).cwiseAbs().maxCoeff();
  }

  RootDatumResiduals rootDatumResiduals(const HermitianPair& pair, const RootDatum& datum)
  {
    const CompactLieAlgebra& g = pair.algebra();
    const cd I(0.0, 1.0);
    const int l = static_cast<int>(datum.tBasis.cols());
    RootDatumResiduals out;

    for (const Root& r : datum.roots) {
      for (int k = 0; k < l; ++k) {
        const CVec lhs = g.ad(datum.tBasis.col(k)).cast<cd>() * r.e;
        out.eigen = std::max(out.eigen, (lhs - I * r.theta(k) * r.e).cwiseAbs().maxCoeff());
      }
      if (std::abs(r.n1) > 1 || r.compact != (r.n1 == 0))
        ++out.badN1;
      if (!r.positive)
        continue;
      const CVec ebar = r.e.conjugate();
      const double t1 = (complexBracket(g, r.h, r.e) - 2.0 * r.e).cwiseAbs().maxCoeff();
      const double t2 = (complexBracket(g, r.h, ebar) + 2.0 * ebar).cwiseAbs().maxCoeff();
      const double t3 = (complexBracket(g, r.e, ebar) + r.h).cwiseAbs().maxCoeff();
      out.triple = std::max({out.triple, t1, t2, t3});

      const double u1 = (g.bracket(r.x, r.y) - r.t).cwiseAbs().maxCoeff();
      const double u2 = (g.bracket(r.t, r.x) - r.y).cwiseAbs().maxCoeff();
      const double u3 = (g.bracket(r.t, r.y) + r.x).cwiseAbs().maxCoeff();
      out.realTriple = std::max({out.realTriple, u1, u2, u3});

      if (r.compact)
        continue;
      const Vec xm = pair.toM(r.x), ym = pair.toM(r.y);
      const Mat& J = pair.complexStructure();
      out.complexStructure = std::max({out.complexStructure, (J * xm - ym).cwiseAbs().maxCoeff(),
                                       (J * ym + xm).cwiseAbs().maxCoeff()});
      for (int k = 0; k < l; ++k) {
        const Mat adt = pair.adMM(datum.tBasis.col(k));
        // -i alpha(t_k) = theta_k
        for (const Vec* xi : {&xm, &ym}) {
          const double res = (adt * *xi - r.theta(k) * (J * *xi)).cwiseAbs().maxCoeff();
          out.rootAction = std::max(out.rootAction, res);
        }
      }
    }

    const auto pm = datum.positiveNoncompact();
    for (int a : pm)
      for (int b : pm)
        if (datum.find(datum.roots[a].theta + datum.roots[b].theta) >= 0)
          ++out.sumsThatAreRoots;
    return out;
  }

}
