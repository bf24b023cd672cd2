#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace hksym {

  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;
  using CVec = Eigen::VectorXcd;
  using CMat = Eigen::MatrixXcd;

  using ScalarFunction = std::function<double(double)>;

  /// Eigen-decomposition of a real symmetric operator with eigenvalues
  /// merged into clusters, so that numerically split multiplicities behave
  /// as a single eigenspace under functional calculus.
  ///
  /// Two consecutive eigenvalues mu < nu belong to the same cluster when
  /// nu - mu <= clusterTol * (1 + |mu|).
  class SymmetricSpectrum {
  public:
    struct Cluster {
      double value;   // mean of the merged eigenvalues
      Mat vectors;    // orthonormal columns spanning the eigenspace
    };

    static constexpr double kDefaultClusterTol = 1e-8;

    explicit SymmetricSpectrum(const Mat& a, double clusterTol = kDefaultClusterTol);

    const std::vector<Cluster>& clusters() const { return m_clusters; }
    int dim() const { return m_dim; }

    /// Indices of clusters whose projection of v has norm above
    /// supportTol * |v|.
    std::vector<int> support(const Vec& v, double supportTol = 1e-10) const;

    /// Sum over the support of v of f(mu_i) * proj_i(v). f is never called
    /// on clusters orthogonal to v. Throws DomainError if f returns a
    /// non-finite value.
    Vec apply(const ScalarFunction& f, const Vec& v, double supportTol = 1e-10) const;

    /// U f(Lambda) U^T with f evaluated on every cluster.
    Mat function(const ScalarFunction& f) const;

    /// Directional (Frechet) derivative of X -> f(X) at this operator
    /// along the symmetric direction E, applied to v:
    ///   sum_{i, j in supp v} f^[1](mu_i, mu_j) P_i E P_j v
    /// with f^[1] the first divided difference (f' on the diagonal).
    Vec frechetApply(const ScalarFunction& f, const ScalarFunction& fprime,
                     const Mat& e, const Vec& v, double supportTol = 1e-10) const;

    double minEigenvalue() const;
    double maxEigenvalue() const;

  private:
    int m_dim;
    std::vector<Cluster> m_clusters;
  };

  /// Calls f(x) and throws DomainError when the result is not finite.
  double evaluateChecked(const ScalarFunction& f, double x);

  /// (A + A^T) / 2.
  Mat symmetrized(const Mat& a);

  /// Orthonormal basis of the null space of m (columns), via SVD with
  /// singular values below tol * max(1, sigma_max) treated as zero.
  Mat nullSpace(const Mat& m, double tol = 1e-10);

  /// Orthonormal basis of the column span of m.
  Mat columnSpan(const Mat& m, double tol = 1e-10);

  /// exp of a real square matrix (Pade scaling and squaring).
  Mat expm(const Mat& a);

}
