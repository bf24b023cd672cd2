#include "spectral.hpp"

#include "errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace hksym {

  double evaluateChecked(const ScalarFunction& f, double x)
  {
    const double y = f(x);
    if (!std::isfinite(y)) {
      std::ostringstream msg;
      msg << "scalar function undefined at eigenvalue " << x;
      throw DomainError(msg.str(), x);
    }
    return y;
  }

  Mat symmetrized(const Mat& a)
  {
    return 0.5 * (a + a.transpose());
  }

  SymmetricSpectrum::SymmetricSpectrum(const Mat& a, double clusterTol)
    : m_dim(static_cast<int>(a.rows()))
  {
    if (a.rows() != a.cols())
      throw InputError("spectral decomposition needs a square operator");
    if (m_dim == 0)
      return;
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(a));
    if (es.info() != Eigen::Success)
      throw ConstructionError("symmetric eigen-decomposition did not converge");
    const Vec& mu = es.eigenvalues();
    const Mat& u = es.eigenvectors();

    int start = 0;
    for (int i = 1; i <= m_dim; ++i) {
      const bool split = (i == m_dim)
        || (mu(i) - mu(i - 1) > clusterTol * (1.0 + std::abs(mu(i - 1))));
      if (!split)
        continue;
      const int count = i - start;
      m_clusters.push_back({mu.segment(start, count).mean(), u.middleCols(start, count)});
      start = i;
    }
  }

  std::vector<int> SymmetricSpectrum::support(const Vec& v, double supportTol) const
  {
    std::vector<int> idx;
    const double scale = v.norm();
    if (scale == 0.0)
      return idx;
    for (int c = 0; c < static_cast<int>(m_clusters.size()); ++c) {
      const double part = (m_clusters[c].vectors.transpose() * v).norm();
      if (part > supportTol * scale)
        idx.push_back(c);
    }
    return idx;
  }

  Vec SymmetricSpectrum::apply(const ScalarFunction& f, const Vec& v, double supportTol) const
  {
    if (v.size() != m_dim)
      throw InputError("vector length does not match operator dimension");
    Vec out = Vec::Zero(m_dim);
    for (int c : support(v, supportTol)) {
      const Mat& b = m_clusters[c].vectors;
      out += evaluateChecked(f, m_clusters[c].value) * (b * (b.transpose() * v));
    }
    return out;
  }

  Mat SymmetricSpectrum::function(const ScalarFunction& f) const
  {
    Mat out = Mat::Zero(m_dim, m_dim);
    for (const auto& cl : m_clusters)
      out += evaluateChecked(f, cl.value) * (cl.vectors * cl.vectors.transpose());
    return out;
  }

  Vec SymmetricSpectrum::frechetApply(const ScalarFunction& f, const ScalarFunction& fprime,
                                      const Mat& e, const Vec& v, double supportTol) const
  {
    if (v.size() != m_dim || e.rows() != m_dim || e.cols() != m_dim)
      throw InputError("dimension mismatch in Frechet derivative");
    const int nc = static_cast<int>(m_clusters.size());
    std::vector<double> fv(nc);
    for (int i = 0; i < nc; ++i)
      fv[i] = evaluateChecked(f, m_clusters[i].value);

    Vec out = Vec::Zero(m_dim);
    for (int j : support(v, supportTol)) {
      const Mat& bj = m_clusters[j].vectors;
      const Vec evj = e * (bj * (bj.transpose() * v));
      for (int i = 0; i < nc; ++i) {
        const double mi = m_clusters[i].value;
        const double mj = m_clusters[j].value;
        const double dd = (i == j) ? evaluateChecked(fprime, mj) : (fv[i] - fv[j]) / (mi - mj);
        const Mat& bi = m_clusters[i].vectors;
        out += dd * (bi * (bi.transpose() * evj));
      }
    }
    return out;
  }

  double SymmetricSpectrum::minEigenvalue() const
  {
    return m_clusters.empty() ? 0.0 : m_clusters.front().value;
  }

  double SymmetricSpectrum::maxEigenvalue() const
  {
    return m_clusters.empty() ? 0.0 : m_clusters.back().value;
  }

  Mat nullSpace(const Mat& m, double tol)
  {
    const int n = static_cast<int>(m.cols());
    if (m.rows() == 0)
      return Mat::Identity(n, n);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    const double cut = tol * std::max(1.0, s.size() ? s(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > cut)
        ++rank;
    return svd.matrixV().rightCols(n - rank);
  }

  Mat columnSpan(const Mat& m, double tol)
  {
    if (m.cols() == 0)
      return Mat(m.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
    const Vec& s = svd.singularValues();
    const double cut = tol * std::max(1.0, s.size() ? s(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > cut)
        ++rank;
    return svd.matrixU().leftCols(rank);
  }

  Mat expm(const Mat& a)
  {
    return a.exp();
  }

}
