#pragma once

#include "hermitian_pair.hpp"

#include <string>
#include <vector>

namespace hksym {

  /// A maximal family of strongly orthogonal roots beta_1 > ... > beta_r in
  /// Delta+_m with their real triples.
  struct StronglyOrthogonalSet {
    std::vector<int> betas;  // indices into RootDatum::roots
    std::vector<AlgebraVector> X, Y, T;

    int rank() const { return static_cast<int>(betas.size()); }
  };

  /// Greedy cascade: take the highest remaining root of Delta+_m and drop
  /// every root that is not strongly orthogonal to it.
  StronglyOrthogonalSet cascade(const HermitianPair& pair, const RootDatum& datum);

  /// True when a +- b is neither a root nor zero.
  bool stronglyOrthogonal(const RootDatum& datum, const Root& a, const Root& b);

  struct CascadeResiduals {
    double brackets = 0.0;    // [X_j,Y_k] = d T_j, [T_j,X_k] = d Y_j, [T_j,Y_k] = -d X_j
    double abelian = 0.0;     // [X_j, X_k] = 0
    double dual = 0.0;        // -i beta_k(T_j) = d_jk
    int notStronglyOrthogonal = 0;
  };
  CascadeResiduals cascadeResiduals(const HermitianPair& pair, const RootDatum& datum,
                                    const StronglyOrthogonalSet& sos);

  enum class RootSystemType { C, BC };
  std::string typeName(RootSystemType t, int rank);  // "C2", "BC1"

  /// lambda = sum_j c_j (i eps_j), c_j in {0, +-1/2, 1}.
  struct RestrictedRoot {
    Vec c;
    Mat m;          // orthonormal basis of m_lambda, m coordinates
    Mat k;          // orthonormal basis of k_lambda, k coordinates
    int partner = -1;  // index of lambda_I in sigmaPlus, -1 when lambda_I = 0

    int multiplicity() const { return static_cast<int>(m.cols()); }
    std::string label() const;  // e.g. "1/2(e1+e2)"
  };

  struct RestrictedRootSystem {
    StronglyOrthogonalSet cascade;
    Mat a;            // X_j as columns, m coordinates
    Mat kCentralizer; // k^a, k coordinates
    std::vector<RestrictedRoot> sigmaPlus;  // lexicographically descending
    RootSystemType type = RootSystemType::C;

    int rank() const { return cascade.rank(); }
    int find(const Vec& c) const;
    std::vector<int> sigmaPlusPlus() const;  // excludes 1/2(e_p - e_k)
  };

  /// Joint diagonalization of -ad(X_j)^2 and ad(X_p)ad(X_k) on m and on k.
  /// Throws MooreViolation when a joint eigenvalue is not one of the
  /// admissible covectors.
  RestrictedRootSystem restrictedDecomposition(const HermitianPair& pair,
                                               const StronglyOrthogonalSet& sos);

  /// Number of (lambda, lambda_I) pairs outside the admissible list, plus
  /// restricted roots whose m and k eigenspaces differ in dimension.
  int pairingViolations(const RestrictedRootSystem& rrs);

  /// Convenience: root datum, cascade and decomposition in one call.
  RestrictedRootSystem restrictedRoots(const HermitianPair& pair, std::uint64_t seed = 0);

  /// Index of the restricted root whose m_lambda contains xi (m coordinates);
  /// -1 for a, -2 when xi is spread over several eigenspaces.
  int locate(const RestrictedRootSystem& rrs, const Vec& xi, double tol = 1e-9);

  /// The zeta in k_lambda (algebra coordinates) with [X_j, xi] = -c_j zeta
  /// and [X_j, zeta] = c_j xi.
  AlgebraVector kPartner(const HermitianPair& pair, const RestrictedRootSystem& rrs,
                         const Vec& xi);

  struct MooreReport {
    std::vector<Vec> rho;      // rho(alpha) in eps' coordinates per alpha in Delta+_m
    double rhoSnap = 0.0;      // distance of rho values from half-integers
    int rhoOutside = 0;        // rho(alpha) not in the admissible image
    double rhoBeta = 0.0;      // |rho(beta_j) - e'_j|
    double spans = 0.0;        // projector distance, M_lambda vs its root spaces
    int spanDimensionMismatch = 0;
    double kAction = 0.0;      // [T_j, zeta] against rho_k(lambda)
  };

  /// rho_m and rho_k graphs as eps' coordinates.
  Vec rhoM(const Vec& c);
  Vec rhoK(const Vec& c);

  MooreReport mooreMaps(const HermitianPair& pair, const RootDatum& datum,
                        const RestrictedRootSystem& rrs);

  /// I ad([w,Iw]) = ad(w)^2 + ad(Iw)^2 on m, and [ad(w)^2, ad(Iw)^2] = 0 on m.
  struct SquaresIdentity {
    double identity = 0.0;
    double commutator = 0.0;
  };
  SquaresIdentity checkSquaresIdentity(const HermitianPair& pair, const Vec& wm);

  struct CentralizerReport {
    bool vacuous = false;
    int dimension = 0;   // dim of the centralizer of k^a in m
    double residual = 0.0;
  };
  CentralizerReport checkCentralizer(const HermitianPair& pair, const RestrictedRootSystem& rrs);

}
