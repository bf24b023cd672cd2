#include "lie_core.hpp"

#include "errors.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace hksym {

  namespace {
    using cd = std::complex<double>;

    double traceForm(const CMat& x, const CMat& y, double kappa)
    {
      return -kappa * (x * y).trace().real();
    }

    CMat unit(int n, int i, int j)
    {
      CMat e = CMat::Zero(n, n);
      e(i, j) = 1.0;
      return e;
    }
  }

  CompactLieAlgebra::CompactLieAlgebra(std::vector<std::string> labels,
                                       std::vector<double> structureConstants, Mat gram)
    : m_dim(static_cast<int>(gram.rows())),
      m_labels(std::move(labels)),
      m_c(std::move(structureConstants)),
      m_gram(std::move(gram))
  {
    if (m_dim <= 0 || m_gram.cols() != m_dim)
      throw InputError("gram matrix must be square and nonempty");
    if (static_cast<int>(m_labels.size()) != m_dim)
      throw InputError("one basis label per dimension is required");
    if (static_cast<long>(m_c.size()) != static_cast<long>(m_dim) * m_dim * m_dim)
      throw InputError("structure constant table has the wrong size");

    m_ad.assign(m_dim, Mat::Zero(m_dim, m_dim));
    for (int i = 0; i < m_dim; ++i)
      for (int j = 0; j < m_dim; ++j)
        for (int k = 0; k < m_dim; ++k)
          m_ad[i](k, j) = c(i, j, k);
  }

  void CompactLieAlgebra::checkLength(const AlgebraVector& x, const char* what) const
  {
    if (x.size() != m_dim) {
      std::ostringstream msg;
      msg << what << ": vector of length " << x.size() << " in algebra of dimension " << m_dim;
      throw InputError(msg.str());
    }
  }

  AlgebraVector CompactLieAlgebra::basisVector(int i) const
  {
    if (i < 0 || i >= m_dim)
      throw InputError("basis index out of range");
    return Vec::Unit(m_dim, i);
  }

  AlgebraVector CompactLieAlgebra::bracket(const AlgebraVector& x, const AlgebraVector& y) const
  {
    checkLength(x, "bracket");
    checkLength(y, "bracket");
    return ad(x) * y;
  }

  Mat CompactLieAlgebra::ad(const AlgebraVector& x) const
  {
    checkLength(x, "ad");
    Mat out = Mat::Zero(m_dim, m_dim);
    for (int i = 0; i < m_dim; ++i)
      if (x(i) != 0.0)
        out += x(i) * m_ad[i];
    return out;
  }

  double CompactLieAlgebra::form(const AlgebraVector& x, const AlgebraVector& y) const
  {
    checkLength(x, "invariant form");
    checkLength(y, "invariant form");
    return x.dot(m_gram * y);
  }

  double CompactLieAlgebra::antisymmetryResidual() const
  {
    double worst = 0.0;
    for (int i = 0; i < m_dim; ++i)
      for (int j = 0; j < m_dim; ++j)
        for (int k = 0; k < m_dim; ++k)
          worst = std::max(worst, std::abs(c(i, j, k) + c(j, i, k)));
    return worst;
  }

  double CompactLieAlgebra::jacobiResidual() const
  {
    const int n = m_dim;
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int m = 0; m < n; ++m)
              s += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l);
            worst = std::max(worst, std::abs(s));
          }
    return worst;
  }

  double CompactLieAlgebra::adInvarianceResidual() const
  {
    // <[e_i,e_j], e_k> + <e_j, [e_i,e_k]>
    double worst = 0.0;
    for (int i = 0; i < m_dim; ++i) {
      const Mat lhs = m_gram * m_ad[i];
      const Mat sum = lhs + lhs.transpose();
      worst = std::max(worst, sum.cwiseAbs().maxCoeff());
    }
    return worst;
  }

  double CompactLieAlgebra::minGramEigenvalue() const
  {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(m_gram), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  }

  CompactLieAlgebra CompactLieAlgebra::withStructureConstant(int i, int j, int k, double value) const
  {
    std::vector<double> cs = m_c;
    cs[(i * m_dim + j) * m_dim + k] = value;
    return CompactLieAlgebra(m_labels, std::move(cs), m_gram);
  }

  Endo makeEndo(const Mat& m, std::shared_ptr<const Mat> basis, std::string tag)
  {
    return makeEndo(CMat(m.cast<cd>()), std::move(basis), std::move(tag));
  }

  Endo makeEndo(const CMat& m, std::shared_ptr<const Mat> basis, std::string tag)
  {
    if (!basis || m.rows() != m.cols() || m.rows() != basis->cols())
      throw InputError("endomorphism matrix does not match its subspace basis");
    return Endo{m, std::move(basis), std::move(tag)};
  }

  Endo adEndo(const CompactLieAlgebra& g, const AlgebraVector& x)
  {
    auto basis = std::make_shared<const Mat>(Mat::Identity(g.dim(), g.dim()));
    return makeEndo(g.ad(x), std::move(basis), "g");
  }

  AlgebraVector symmetricSpectral(const CompactLieAlgebra& g, const Endo& a,
                                  const ScalarFunction& f, const AlgebraVector& v)
  {
    if (v.size() != g.dim())
      throw InputError("symmetric_spectral: vector does not belong to the algebra");
    if (a.matrix.imag().cwiseAbs().maxCoeff() > 1e-12)
      throw InputError("symmetric_spectral: operator must be real");
    const Mat& basis = *a.basis;
    const Vec coords = basis.transpose() * (g.gram() * v);
    SymmetricSpectrum spec(a.real());
    return basis * spec.apply(f, coords);
  }

  MatrixAlgebra algebraFromMatrices(const std::vector<CMat>& spanning,
                                    const std::vector<std::string>& labels, double kappa)
  {
    if (spanning.size() != labels.size())
      throw InputError("one label per spanning matrix is required");
    if (kappa <= 0.0)
      throw InputError("form scale must be positive");

    std::vector<CMat> ortho;
    std::vector<std::string> kept;
    for (std::size_t s = 0; s < spanning.size(); ++s) {
      CMat v = spanning[s];
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : ortho)
          v -= traceForm(v, b, kappa) * b;
      const double nrm2 = traceForm(v, v, kappa);
      if (nrm2 < 1e-20)
        continue;
      ortho.push_back(v / std::sqrt(nrm2));
      kept.push_back(labels[s]);
    }

    const int n = static_cast<int>(ortho.size());
    std::vector<double> cs(static_cast<std::size_t>(n) * n * n, 0.0);
    double residual = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const CMat comm = ortho[i] * ortho[j] - ortho[j] * ortho[i];
        CMat rest = comm;
        for (int k = 0; k < n; ++k) {
          const double ck = traceForm(comm, ortho[k], kappa);
          cs[(i * n + j) * n + k] = ck;
          rest -= ck * ortho[k];
        }
        residual = std::max(residual, rest.cwiseAbs().maxCoeff());
      }
    if (residual > 1e-10) {
      std::ostringstream msg;
      msg << "matrix span is not closed under the commutator (residual " << residual << ")";
      throw ConstructionError(msg.str());
    }

    Mat gram(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        gram(i, j) = traceForm(ortho[i], ortho[j], kappa);

    return MatrixAlgebra{CompactLieAlgebra(kept, std::move(cs), gram), ortho, kappa};
  }

  double defaultKappa(Family family)
  {
    switch (family) {
    case Family::su:
    case Family::sp:
      return 2.0;
    case Family::so:
      return 1.0;
    }
    return 1.0;
  }

  MatrixAlgebra buildMatrixAlgebra(Family family, int n)
  {
    const cd I(0.0, 1.0);
    std::vector<CMat> mats;
    std::vector<std::string> labels;
    auto name = [](const char* stem, int a, int b) {
      std::ostringstream s;
      s << stem << a << b;
      return s.str();
    };

    switch (family) {
    case Family::su:
      if (n < 2)
        throw InputError("su(n) requires n >= 2");
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          mats.push_back(unit(n, i, j) - unit(n, j, i));
          labels.push_back(name("a", i, j));
          mats.push_back(I * (unit(n, i, j) + unit(n, j, i)));
          labels.push_back(name("b", i, j));
        }
      for (int k = 0; k + 1 < n; ++k) {
        mats.push_back(I * (unit(n, k, k) - unit(n, k + 1, k + 1)));
        labels.push_back(name("h", k, k + 1));
      }
      break;
    case Family::sp: {
      if (n < 1)
        throw InputError("sp(n) requires n >= 1");
      const int d = 2 * n;
      auto embed = [&](const CMat& a, const CMat& b) {
        CMat x = CMat::Zero(d, d);
        x.topLeftCorner(n, n) = a;
        x.topRightCorner(n, n) = b;
        x.bottomLeftCorner(n, n) = -b.conjugate();
        x.bottomRightCorner(n, n) = a.conjugate();
        return x;
      };
      const CMat z = CMat::Zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          if (i != j) {
            mats.push_back(embed(unit(n, i, j) - unit(n, j, i), z));
            labels.push_back(name("ka", i, j));
            mats.push_back(embed(I * (unit(n, i, j) + unit(n, j, i)), z));
            labels.push_back(name("kb", i, j));
          } else {
            mats.push_back(embed(I * unit(n, i, i), z));
            labels.push_back(name("kh", i, i));
          }
        }
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          const CMat s = (i == j) ? unit(n, i, i) : CMat(unit(n, i, j) + unit(n, j, i));
          mats.push_back(embed(z, s));
          labels.push_back(name("mr", i, j));
          mats.push_back(embed(z, I * s));
          labels.push_back(name("mi", i, j));
        }
      break;
    }
    case Family::so:
      if (n < 3)
        throw InputError("so(n) requires n >= 3");
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          mats.push_back(unit(n, i, j) - unit(n, j, i));
          labels.push_back(name("r", i, j));
        }
      break;
    }
    return algebraFromMatrices(mats, labels, defaultKappa(family));
  }

  CompactLieAlgebra buildAlgebra(Family family, int n)
  {
    return buildMatrixAlgebra(family, n).algebra;
  }

}
