#pragma once

#include "restricted_roots.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hksym {

  /// The quadruple (a0, a1, a2, eps).
  struct HKParams {
    double a0 = 1.0;
    double a1 = 0.0;
    double a2 = 0.0;
    int eps = 1;

    double c2() const { return a1 * a1 + a2 * a2; }
    double aDagger() const;

    /// "a0,a1,a2,+1" (eps may be written 1, +1 or -1).
    static HKParams parse(const std::string& text);
    std::string str() const;

    bool operator==(const HKParams& o) const
    {
      return a0 == o.a0 && a1 == o.a1 && a2 == o.a2 && eps == o.eps;
    }
  };

  /// Throws InputError naming the violated constraint when the parameters
  /// are not admissible for the restricted root type.
  void validateParams(const HKParams& p, RootSystemType type);
  bool admissibleParams(const HKParams& p, RootSystemType type);

  /// w = Ad_k(sum x_j X_j) with k = exp(zeta_1) ... exp(zeta_n).
  struct DomainPoint {
    Vec x;
    std::vector<Vec> kWord;  // k coordinates
    Mat adK;                 // Ad_k on m, m coordinates
    Vec w;                   // m coordinates

    /// x_j^2 > a_dagger for every j; x_j != 0 when eps = -1 or c2 > 0.
    bool inDomain(const HKParams& p) const;
  };

  /// Ad_k restricted to m for the product of exponentials.
  Mat adKOnM(const HermitianPair& pair, const std::vector<Vec>& kWord);

  DomainPoint makeDomainPoint(const HermitianPair& pair, const RestrictedRootSystem& rrs,
                              const Vec& x, const std::vector<Vec>& kWord = {});

  // All operators below act on m and use m coordinates.

  /// A(w) = -ad(w)^2 - ad(Iw)^2.
  Mat aOp(const HermitianPair& pair, const Vec& w);

  /// Derivative of A along xi at w.
  Mat aDerivative(const HermitianPair& pair, const Vec& w, const Vec& xi);

  /// Upsilon(w) = A(w)^{-1} w; SingularPointError when A is degenerate.
  Vec upsilon(const HermitianPair& pair, const Vec& w);

  /// Exact derivative of Upsilon at w (columns are images of basis vectors).
  Mat upsilonStar(const HermitianPair& pair, const Vec& w);

  struct SpectralMap {
    ScalarFunction f;
    ScalarFunction fprime;
  };

  struct QHatValue {
    Vec value;
    Vec radial;  // d/ds q_hat(s w) at s = 1
  };
  QHatValue qHat(const HermitianPair& pair, const Vec& w, const SpectralMap& q);

  /// Derivative of w -> q(A(w)) w at w.
  Mat qHatStar(const HermitianPair& pair, const Vec& w, const SpectralMap& q);

  /// sqrt(a0 + x^2 - c2 / x^2); DomainError when the radicand is not positive.
  double bScalar(double x, const HKParams& p);

  /// (sqrt(a0 + t - c2/t) - eps sqrt|a0|) / t, in a cancellation-free form.
  double phiScalar(double t, const HKParams& p);

  /// Injected faults used by negative controls.
  struct Faults {
    Mat bNoise;          // added to B
    Mat sNoise;          // added to S
    bool flipEps = false;  // wrong sign of the scalar term of B

    bool any() const { return bNoise.size() || sNoise.size() || flipEps; }
  };

  /// B_w = I ad([I phi_hat(w), w]) + eps sqrt|a0|.
  Mat bOp(const HermitianPair& pair, const Vec& w, const HKParams& p, const Faults& f = {});

  struct POp {
    Mat B;
    Mat U;  // Upsilon_*; empty when c2 = 0
    Mat R;
    Mat S;
    CMat P() const;
  };

  /// P = (1 + i(a1 + a2 I) U)(1 + c2 U^2)^{-1} B.
  POp pOp(const HermitianPair& pair, const Vec& w, const HKParams& p, const Faults& f = {});

  /// Almost-complex tensors on T_h + T_v (2m x 2m).
  Mat jTensor(const Mat& R, const Mat& S);
  Mat jPlusMinus(const HermitianPair& pair, int sign);

  /// A tangent vector (xi^l, u) of G x m; xi in algebra coordinates,
  /// u in m coordinates. Complex to allow complexified arguments.
  struct TangentVector {
    CVec xi;
    CVec u;
  };

  using cd = std::complex<double>;

  cd thetaForm(const HermitianPair& pair, const Vec& w, const TangentVector& a);
  cd omegaForm(const HermitianPair& pair, const Vec& w, const TangentVector& a,
               const TangentVector& b);
  cd thetaPrimeForm(const HermitianPair& pair, const Vec& w, const TangentVector& a);

  /// <xi2, I u1> - <xi1, I u2> for xi_i in m.
  cd omegaPrimeForm(const HermitianPair& pair, const TangentVector& a, const TangentVector& b);

  /// d theta' by the Cartan formula with exact directional derivatives.
  cd dThetaPrime(const HermitianPair& pair, const Vec& w, const TangentVector& a,
                 const TangentVector& b);

  /// Pack (xi, u) with xi in m into a real 2m vector and back.
  Vec packTangent(const Vec& xiM, const Vec& u);
  TangentVector unpackTangent(const HermitianPair& pair, const Vec& v);

  /// The radial profile q(t) = F(t) / (2t), F(t) = int_{t0}^t ds / sqrt(a0 + s - a1^2/s).
  class Potential {
  public:
    explicit Potential(const HKParams& p);

    double t0() const { return m_t0; }
    double F(double t) const;
    double q(double t) const;
    double qPrime(double t) const;
    SpectralMap map() const;

    /// Q(w) = <q(A(w)) w, w>.
    double value(const HermitianPair& pair, const Vec& w) const;

    /// w' = q_hat(w) + q_hat_*(w).
    Vec wPrime(const HermitianPair& pair, const Vec& w) const;

    /// The pulled back (0,1)-part of dQ, evaluated on (eta, u).
    cd dbar(const HermitianPair& pair, const Vec& w, const POp& P, const Vec& wPrime,
            const TangentVector& a) const;

  private:
    HKParams m_p;
    double m_t0;
  };

  /// Directional derivative of a matrix field by central differences.
  using MatrixField = std::function<CMat(const Vec&)>;
  CMat centralDifference(const MatrixField& f, const Vec& w, const Vec& dir, double h = 1e-5);

  /// (L_{P xi} P)(eta) - (L_{P eta} P)(xi) + [w, [xi, eta]].
  CVec integrabilityResidual(const HermitianPair& pair, const MatrixField& P, const Vec& w,
                             const Vec& xi, const Vec& eta, double h = 1e-5);

}
