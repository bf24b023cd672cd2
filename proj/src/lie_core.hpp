#pragma once

#include "spectral.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hksym {

  /// Coefficients of an element of a Lie algebra relative to its basis.
  using AlgebraVector = Vec;

  enum class Family { su, sp, so };

  /// Finite-dimensional real Lie algebra given by structure constants
  /// [e_i, e_j] = sum_k c(i,j,k) e_k together with a positive-definite
  /// ad-invariant form <e_i, e_j> = gram(i,j).
  class CompactLieAlgebra {
  public:
    CompactLieAlgebra(std::vector<std::string> labels, std::vector<double> structureConstants,
                      Mat gram);

    int dim() const { return m_dim; }
    const std::vector<std::string>& labels() const { return m_labels; }
    const Mat& gram() const { return m_gram; }

    double c(int i, int j, int k) const { return m_c[(i * m_dim + j) * m_dim + k]; }

    AlgebraVector basisVector(int i) const;

    AlgebraVector bracket(const AlgebraVector& x, const AlgebraVector& y) const;

    /// Matrix of ad(x) on the whole algebra; column j is [x, e_j].
    Mat ad(const AlgebraVector& x) const;

    /// ad of the i-th basis vector (precomputed).
    const Mat& adBasis(int i) const { return m_ad[i]; }

    double form(const AlgebraVector& x, const AlgebraVector& y) const;

    // Invariant residuals over all basis index tuples.
    double antisymmetryResidual() const;
    double jacobiResidual() const;
    double adInvarianceResidual() const;
    double minGramEigenvalue() const;

    /// Copy with one structure constant replaced (used to build faulty
    /// algebras for negative controls).
    CompactLieAlgebra withStructureConstant(int i, int j, int k, double value) const;

  private:
    void checkLength(const AlgebraVector& x, const char* what) const;

    int m_dim;
    std::vector<std::string> m_labels;
    std::vector<double> m_c;
    Mat m_gram;
    std::vector<Mat> m_ad;
  };

  /// An endomorphism of a subspace, stored as a (possibly complex) matrix in
  /// an orthonormal basis of that subspace. The basis columns are algebra
  /// coordinates.
  struct Endo {
    CMat matrix;
    std::shared_ptr<const Mat> basis;
    std::string subspaceTag;

    int dim() const { return static_cast<int>(matrix.rows()); }
    Mat real() const { return matrix.real(); }
    Mat imag() const { return matrix.imag(); }
  };

  Endo makeEndo(const Mat& m, std::shared_ptr<const Mat> basis, std::string tag);
  Endo makeEndo(const CMat& m, std::shared_ptr<const Mat> basis, std::string tag);

  /// ad(x) as an endomorphism of the whole algebra ("g").
  Endo adEndo(const CompactLieAlgebra& g, const AlgebraVector& x);

  /// Spectral function application for an operator symmetric with respect
  /// to the invariant form; v is given in algebra coordinates and the
  /// result is returned in algebra coordinates.
  AlgebraVector symmetricSpectral(const CompactLieAlgebra& g, const Endo& a,
                                  const ScalarFunction& f, const AlgebraVector& v);

  /// A compact classical algebra together with the matrices realizing its
  /// (orthonormal) basis in the defining representation.
  struct MatrixAlgebra {
    CompactLieAlgebra algebra;
    std::vector<CMat> realization;
    double kappa;
  };

  /// Gram-Schmidt the given matrices under -kappa Re tr(XY) and extract
  /// structure constants; residual of the expansion of every commutator must
  /// be below 1e-10.
  MatrixAlgebra algebraFromMatrices(const std::vector<CMat>& spanning,
                                    const std::vector<std::string>& labels, double kappa);

  /// Scale for which the root vectors X_beta of long roots have unit length
  /// in the defining representation of the given family.
  double defaultKappa(Family family);

  /// su(n) (n >= 2), sp(n) (n >= 1) or so(n) (n >= 3) as matrices.
  MatrixAlgebra buildMatrixAlgebra(Family family, int n);

  CompactLieAlgebra buildAlgebra(Family family, int n);

}
