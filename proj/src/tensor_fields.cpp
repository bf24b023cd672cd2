#include "tensor_fields.hpp"

#include "errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

namespace hksym {

  namespace {

    double parseReal(const std::string& s, const std::string& whole)
    {
      double v = 0.0;
      const char* first = s.data();
      const char* last = s.data() + s.size();
      if (!s.empty() && *first == '+')
        ++first;
      const auto res = std::from_chars(first, last, v);
      if (s.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        throw InputError("malformed params '" + whole + "' (expected a0,a1,a2,+-1)");
      return v;
    }

    std::string shortest(double v)
    {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      return std::string(buf, res.ptr);
    }

    cd pairing(const CompactLieAlgebra& g, const CVec& x, const CVec& y)
    {
      return (x.transpose() * g.gram().cast<cd>() * y)(0, 0);
    }

    CVec complexBracket(const CompactLieAlgebra& g, const CVec& x, const CVec& y)
    {
      const Vec xr = x.real(), xi = x.imag(), yr = y.real(), yi = y.imag();
      const Vec re = g.bracket(xr, yr) - g.bracket(xi, yi);
      const Vec im = g.bracket(xr, yi) + g.bracket(xi, yr);
      return re.cast<cd>() + cd(0.0, 1.0) * im.cast<cd>();
    }

    CVec fromMc(const HermitianPair& pair, const CVec& m)
    {
      CVec x = CVec::Zero(pair.dim());
      x.tail(pair.dimM()) = m;
      return x;
    }

    SymmetricSpectrum spectrumOf(const HermitianPair& pair, const Vec& w)
    {
      return SymmetricSpectrum(aOp(pair, w));
    }

    Mat inverseOf(const SymmetricSpectrum& s)
    {
      if (s.minEigenvalue() < 1e-10) {
        std::ostringstream msg;
        msg << "A(w) is singular (smallest eigenvalue " << s.minEigenvalue() << ")";
        throw SingularPointError(msg.str());
      }
      return s.function([](double t) { return 1.0 / t; });
    }

  }

  double HKParams::aDagger() const
  {
    const double c = c2();
    if (c > 0.0)
      return 0.5 * (std::sqrt(a0 * a0 + 4.0 * c) - a0);
    return -a0;
  }

  HKParams HKParams::parse(const std::string& text)
  {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
      if (ch == ',') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
    if (parts.size() != 4)
      throw InputError("malformed params '" + text + "' (expected a0,a1,a2,+-1)");
    HKParams p;
    p.a0 = parseReal(parts[0], text);
    p.a1 = parseReal(parts[1], text);
    p.a2 = parseReal(parts[2], text);
    if (parts[3] == "1" || parts[3] == "+1")
      p.eps = 1;
    else if (parts[3] == "-1")
      p.eps = -1;
    else
      throw InputError("malformed params '" + text + "': eps must be +1 or -1");
    return p;
  }

  std::string HKParams::str() const
  {
    return shortest(a0) + "," + shortest(a1) + "," + shortest(a2) + "," + (eps > 0 ? "+1" : "-1");
  }

  void validateParams(const HKParams& p, RootSystemType type)
  {
    if (!std::isfinite(p.a0) || !std::isfinite(p.a1) || !std::isfinite(p.a2))
      throw InputError("params must be finite reals");
    if (p.eps != 1 && p.eps != -1)
      throw InputError("eps must be +1 or -1");
    if (type == RootSystemType::C) {
      if (p.eps != 1)
        throw InputError("params " + p.str() + " violate A^C = R^3 x {+1}: type C requires eps = +1");
      return;
    }
    if (p.a1 != 0.0 || p.a2 != 0.0)
      throw InputError("params " + p.str()
                       + " violate A^BC: type BC requires a1 = a2 = 0");
    if (p.a0 > 0.0)
      return;
    if (p.a0 == 0.0 && p.eps == -1)
      return;
    throw InputError("params " + p.str()
                     + " violate A^BC: type BC requires a0 > 0, or a0 = 0 with eps = -1");
  }

  bool admissibleParams(const HKParams& p, RootSystemType type)
  {
    try {
      validateParams(p, type);
      return true;
    } catch (const InputError&) {
      return false;
    }
  }

  bool DomainPoint::inDomain(const HKParams& p) const
  {
    const double ad = p.aDagger();
    for (int j = 0; j < x.size(); ++j) {
      if (x(j) * x(j) <= ad)
        return false;
      if ((p.eps == -1 || p.c2() > 0.0) && x(j) == 0.0)
        return false;
    }
    return true;
  }

  Mat adKOnM(const HermitianPair& pair, const std::vector<Vec>& kWord)
  {
    Mat k = Mat::Identity(pair.dimM(), pair.dimM());
    for (const Vec& zeta : kWord)
      k = k * expm(pair.adMM(pair.fromK(zeta)));
    return k;
  }

  DomainPoint makeDomainPoint(const HermitianPair& pair, const RestrictedRootSystem& rrs,
                              const Vec& x, const std::vector<Vec>& kWord)
  {
    if (x.size() != rrs.rank())
      throw InputError("point needs one coordinate per Cartan direction");
    DomainPoint d;
    d.x = x;
    d.kWord = kWord;
    d.adK = adKOnM(pair, kWord);
    d.w = d.adK * (rrs.a * x);
    return d;
  }

  Mat aOp(const HermitianPair& pair, const Vec& w)
  {
    const Vec iw = pair.complexStructure() * w;
    return symmetrized(-pair.adSquaredOnM(w) - pair.adSquaredOnM(iw));
  }

  Mat aDerivative(const HermitianPair& pair, const Vec& w, const Vec& xi)
  {
    const Mat& I = pair.complexStructure();
    const Vec iw = I * w, ixi = I * xi;
    return symmetrized(-(pair.adProductOnM(xi, w) + pair.adProductOnM(w, xi)
                         + pair.adProductOnM(ixi, iw) + pair.adProductOnM(iw, ixi)));
  }

  Vec upsilon(const HermitianPair& pair, const Vec& w)
  {
    return inverseOf(spectrumOf(pair, w)) * w;
  }

  Mat upsilonStar(const HermitianPair& pair, const Vec& w)
  {
    const Mat ainv = inverseOf(spectrumOf(pair, w));
    const Vec u = ainv * w;
    const Mat& I = pair.complexStructure();
    const Vec iw = I * w;
    const int m = pair.dimM();
    Mat out(m, m);
    for (int i = 0; i < m; ++i) {
      const Vec xi = Vec::Unit(m, i);
      const Vec ixi = I * xi;
      const Vec dA = -(pair.doubleBracketM(xi, w, u) + pair.doubleBracketM(w, xi, u)
                       + pair.doubleBracketM(ixi, iw, u) + pair.doubleBracketM(iw, ixi, u));
      out.col(i) = ainv * (xi - dA);
    }
    return out;
  }

  QHatValue qHat(const HermitianPair& pair, const Vec& w, const SpectralMap& q)
  {
    const SymmetricSpectrum s = spectrumOf(pair, w);
    QHatValue out;
    out.value = s.apply(q.f, w);
    out.radial = s.apply([&](double t) { return q.f(t) + 2.0 * t * q.fprime(t); }, w);
    return out;
  }

  Mat qHatStar(const HermitianPair& pair, const Vec& w, const SpectralMap& q)
  {
    const SymmetricSpectrum s = spectrumOf(pair, w);
    const Mat qa = s.function(q.f);
    const int m = pair.dimM();
    Mat out(m, m);
    for (int i = 0; i < m; ++i) {
      const Vec xi = Vec::Unit(m, i);
      out.col(i) = qa * xi + s.frechetApply(q.f, q.fprime, aDerivative(pair, w, xi), w);
    }
    return out;
  }

  double bScalar(double x, const HKParams& p)
  {
    const double rad = p.a0 + x * x - p.c2() / (x * x);
    if (!(rad > 0.0)) {
      std::ostringstream msg;
      msg << "b(x) is not real at x = " << x << " (radicand " << rad << ")";
      throw DomainError(msg.str(), x);
    }
    return std::sqrt(rad);
  }

  double phiScalar(double t, const HKParams& p)
  {
    const double c2 = p.c2();
    const double rad = p.a0 + t - c2 / t;
    if (!(rad >= 0.0) || t <= 0.0) {
      std::ostringstream msg;
      msg << "phi is not real at t = " << t;
      throw DomainError(msg.str(), t);
    }
    const double s = std::sqrt(std::abs(p.a0));
    if (p.eps < 0)
      return (std::sqrt(rad) + s) / t;
    // (rad - |a0|) / (t (sqrt(rad) + sqrt|a0|)) with the t divided out
    const double num = (p.a0 - std::abs(p.a0)) / t + 1.0 - c2 / (t * t);
    return num / (std::sqrt(rad) + s);
  }

  Mat bOp(const HermitianPair& pair, const Vec& w, const HKParams& p, const Faults& f)
  {
    const SymmetricSpectrum s = spectrumOf(pair, w);
    const Vec phiHat = s.apply([&](double t) { return phiScalar(t, p); }, w);
    const Mat& I = pair.complexStructure();
    const AlgebraVector br = pair.algebra().bracket(pair.fromM(I * phiHat), pair.fromM(w));
    const int eps = f.flipEps ? -p.eps : p.eps;
    Mat b = I * pair.adMM(br)
            + eps * std::sqrt(std::abs(p.a0)) * Mat::Identity(pair.dimM(), pair.dimM());
    if (f.bNoise.size())
      b += f.bNoise;
    return b;
  }

  CMat POp::P() const
  {
    return R.cast<cd>() + cd(0.0, 1.0) * S.cast<cd>();
  }

  POp pOp(const HermitianPair& pair, const Vec& w, const HKParams& p, const Faults& f)
  {
    POp out;
    out.B = bOp(pair, w, p, f);
    const int m = pair.dimM();
    const double c2 = p.c2();
    if (c2 > 0.0) {
      out.U = upsilonStar(pair, w);
      const Mat scale = Mat::Identity(m, m) + c2 * out.U * out.U;
      out.R = scale.partialPivLu().solve(out.B);
      const Mat coeff = p.a1 * Mat::Identity(m, m) + p.a2 * pair.complexStructure();
      out.S = coeff * out.U * out.R;
    } else {
      out.R = out.B;
      out.S = Mat::Zero(m, m);
    }
    if (f.sNoise.size())
      out.S += f.sNoise;
    return out;
  }

  Mat jTensor(const Mat& R, const Mat& S)
  {
    const Eigen::FullPivLU<Mat> lu(R);
    if (!lu.isInvertible())
      throw SingularPointError("Re P is singular");
    const Mat rinv = lu.inverse();
    const int m = static_cast<int>(R.rows());
    Mat j(2 * m, 2 * m);
    j.topLeftCorner(m, m) = -rinv * S;
    j.topRightCorner(m, m) = -rinv;
    j.bottomLeftCorner(m, m) = R + S * rinv * S;
    j.bottomRightCorner(m, m) = S * rinv;
    return j;
  }

  Mat jPlusMinus(const HermitianPair& pair, int sign)
  {
    const int m = pair.dimM();
    Mat j = Mat::Zero(2 * m, 2 * m);
    j.topLeftCorner(m, m) = pair.complexStructure();
    j.bottomRightCorner(m, m) = sign * pair.complexStructure();
    return j;
  }

  cd thetaForm(const HermitianPair& pair, const Vec& w, const TangentVector& a)
  {
    return pairing(pair.algebra(), pair.fromM(w).cast<cd>(), a.xi);
  }

  cd omegaForm(const HermitianPair& pair, const Vec& w, const TangentVector& a,
               const TangentVector& b)
  {
    const CompactLieAlgebra& g = pair.algebra();
    return pairing(g, b.xi, fromMc(pair, a.u)) - pairing(g, a.xi, fromMc(pair, b.u))
           - pairing(g, pair.fromM(w).cast<cd>(), complexBracket(g, a.xi, b.xi));
  }

  cd thetaPrimeForm(const HermitianPair& pair, const Vec& w, const TangentVector& a)
  {
    const Vec iw = pair.complexStructure() * w;
    return pairing(pair.algebra(), pair.fromM(iw).cast<cd>(), a.xi);
  }

  cd omegaPrimeForm(const HermitianPair& pair, const TangentVector& a, const TangentVector& b)
  {
    const CompactLieAlgebra& g = pair.algebra();
    const CMat I = pair.complexStructure().cast<cd>();
    return pairing(g, b.xi, fromMc(pair, I * a.u)) - pairing(g, a.xi, fromMc(pair, I * b.u));
  }

  cd dThetaPrime(const HermitianPair& pair, const Vec& w, const TangentVector& a,
                 const TangentVector& b)
  {
    // X theta'(Y) - Y theta'(X) - theta'([X, Y]) for left-invariant xi and
    // constant u; [X, Y] = ([xi1, xi2]^l, 0). theta' is linear in w, so the
    // central difference with unit step is exact.
    auto along = [&](const CVec& u, const TangentVector& y) {
      const Vec re = u.real(), im = u.imag();
      auto diff = [&](const Vec& d) {
        return 0.5 * (thetaPrimeForm(pair, w + d, y) - thetaPrimeForm(pair, w - d, y));
      };
      return diff(re) + cd(0, 1) * diff(im);
    };
    const TangentVector br{complexBracket(pair.algebra(), a.xi, b.xi), CVec::Zero(pair.dimM())};
    return along(a.u, b) - along(b.u, a) - thetaPrimeForm(pair, w, br);
  }

  Vec packTangent(const Vec& xiM, const Vec& u)
  {
    Vec v(xiM.size() + u.size());
    v << xiM, u;
    return v;
  }

  TangentVector unpackTangent(const HermitianPair& pair, const Vec& v)
  {
    const int m = pair.dimM();
    if (v.size() != 2 * m)
      throw InputError("tangent vector must have length 2 dim m");
    return {pair.fromM(v.head(m)).cast<cd>(), v.tail(m).cast<cd>()};
  }

  Potential::Potential(const HKParams& p)
    : m_p(p), m_t0(std::max(1.0, p.aDagger() + 1.0))
  {
    if (p.a2 != 0.0)
      throw InputError("the potential is only defined for a2 = 0");
  }

  double Potential::F(double t) const
  {
    const double a0 = m_p.a0, a1sq = m_p.a1 * m_p.a1;
    if (!(t > 0.0) || !(a0 + t - a1sq / t > 0.0))
      throw DomainError("potential evaluated outside its domain", t);
    if (a1sq == 0.0)
      return 2.0 * (std::sqrt(a0 + t) - std::sqrt(a0 + m_t0));
    // s = a_dagger + u^2 removes the inverse square root at s = a_dagger:
    // a0 + s - a1^2/s = u^2 (s + a0 + a_dagger) / s.
    const double ad = m_p.aDagger(), shift = a0 + ad;
    auto smooth = [&](double u) {
      const double s = ad + u * u;
      return 2.0 * std::sqrt(s / (s + shift));
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double lo = std::sqrt(m_t0 - ad), hi = std::sqrt(t - ad);
    double err = 0.0;
    double v = GK::integrate(smooth, lo, hi, 0, 0.0, &err);
    if (!(err <= 1e-13 * std::max(1.0, std::abs(v))))
      v = GK::integrate(smooth, lo, hi, 15, 1e-13, &err);
    if (!(err <= 1e-10 * std::max(1.0, std::abs(v))))
      throw DomainError("quadrature did not converge", t);
    return v;
  }

  double Potential::q(double t) const { return F(t) / (2.0 * t); }

  double Potential::qPrime(double t) const
  {
    const double rad = m_p.a0 + t - m_p.a1 * m_p.a1 / t;
    return 1.0 / (2.0 * t * std::sqrt(rad)) - F(t) / (2.0 * t * t);
  }

  SpectralMap Potential::map() const
  {
    return {[this](double t) { return q(t); }, [this](double t) { return qPrime(t); }};
  }

  double Potential::value(const HermitianPair& pair, const Vec& w) const
  {
    return qHat(pair, w, map()).value.dot(w);
  }

  Vec Potential::wPrime(const HermitianPair& pair, const Vec& w) const
  {
    const SpectralMap q = map();
    return qHat(pair, w, q).value + qHatStar(pair, w, q) * w;
  }

  cd Potential::dbar(const HermitianPair& pair, const Vec& /*w*/, const POp& P, const Vec& wPrime,
                     const TangentVector& a) const
  {
    const CompactLieAlgebra& g = pair.algebra();
    const Mat rinv = P.R.inverse();
    const Mat sr = P.S * rinv;
    const Vec first = (P.R + P.S * rinv * P.S) * wPrime;
    const CVec second = wPrime.cast<cd>() + cd(0.0, 1.0) * (sr * wPrime).cast<cd>();
    return cd(0.0, 0.5) * pairing(g, pair.fromM(first).cast<cd>(), a.xi)
           + 0.5 * pairing(g, fromMc(pair, second), fromMc(pair, a.u));
  }

  CMat centralDifference(const MatrixField& f, const Vec& w, const Vec& dir, double h)
  {
    return (f(w + h * dir) - f(w - h * dir)) / (2.0 * h);
  }

  CVec integrabilityResidual(const HermitianPair& pair, const MatrixField& P, const Vec& w,
                             const Vec& xi, const Vec& eta, double h)
  {
    const CMat pw = P(w);
    const cd I(0.0, 1.0);
    auto lieDerivative = [&](const CVec& v) {
      return CMat(centralDifference(P, w, v.real(), h) + I * centralDifference(P, w, v.imag(), h));
    };
    const CVec pxi = pw * xi.cast<cd>();
    const CVec peta = pw * eta.cast<cd>();
    const CVec lhs = lieDerivative(pxi) * eta.cast<cd>() - lieDerivative(peta) * xi.cast<cd>();
    const Vec rhs = -pair.doubleBracketM(w, xi, eta);
    return lhs - rhs.cast<cd>();
  }

}
