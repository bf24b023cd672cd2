#pragma once

#include "lie_core.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace hksym {

  /// One of the four classical families of compact irreducible Hermitian
  /// symmetric spaces, written "su:p,q", "sp:n", "so*:n" or "soB:n".
  struct SpaceSpec {
    enum class Kind { su, sp, soStar, soB };
    Kind kind = Kind::su;
    int p = 1;
    int q = 1;  // only used by su

    static SpaceSpec parse(const std::string& text);
    std::string str() const;
    std::string describe() const;  // e.g. "su(3)/s(u(1)+u(2))"

    bool operator==(const SpaceSpec& o) const
    {
      return kind == o.kind && p == o.p && (kind != Kind::su || q == o.q);
    }
    bool operator!=(const SpaceSpec& o) const { return !(*this == o); }
    bool operator<(const SpaceSpec& o) const { return str() < o.str(); }
  };

  /// A compact Lie algebra split as g = k + m. The algebra basis is ordered
  /// with the k basis first (Z0 normalized is its first vector) followed by
  /// the m basis; both are orthonormal. Vectors of m are usually handled in
  /// "m coordinates", i.e. the trailing dimM() algebra coordinates.
  class HermitianPair {
  public:
    HermitianPair(SpaceSpec space, std::shared_ptr<const MatrixAlgebra> matrices, int dimK,
                  AlgebraVector z0);

    const SpaceSpec& space() const { return m_space; }
    const CompactLieAlgebra& algebra() const { return m_matrices->algebra; }
    const MatrixAlgebra& matrices() const { return *m_matrices; }
    double kappa() const { return m_matrices->kappa; }

    int dim() const { return algebra().dim(); }
    int dimK() const { return m_dimK; }
    int dimM() const { return dim() - m_dimK; }

    const AlgebraVector& z0() const { return m_z0; }

    /// I = ad(Z0)|m as a dimM x dimM matrix in m coordinates.
    const Mat& complexStructure() const { return m_I; }

    Mat kBasis() const;  // columns in algebra coordinates
    Mat mBasis() const;

    AlgebraVector fromM(const Vec& mc) const;
    Vec toM(const AlgebraVector& x) const;    // orthogonal projection to m
    AlgebraVector fromK(const Vec& kc) const;
    Vec toK(const AlgebraVector& x) const;

    /// Blocks of ad(x): mk maps k -> m, km maps m -> k, mm and kk as named.
    Mat adMM(const AlgebraVector& x) const;
    Mat adMK(const AlgebraVector& x) const;
    Mat adKM(const AlgebraVector& x) const;
    Mat adKK(const AlgebraVector& x) const;

    /// ad(x)^2 restricted to m for x in m (given in m coordinates).
    Mat adSquaredOnM(const Vec& xm) const;

    /// Operator ad(x) ad(y) restricted to m for x, y in m (m coordinates).
    Mat adProductOnM(const Vec& xm, const Vec& ym) const;

    /// [x, [y, z]] for x, y, z in m coordinates; result is in m.
    Vec doubleBracketM(const Vec& x, const Vec& y, const Vec& z) const;

    /// Largest projection residual over basis pairs for [k,k] in k,
    /// [k,m] in m, [m,m] in k.
    double cartanResidual() const;

  private:
    SpaceSpec m_space;
    std::shared_ptr<const MatrixAlgebra> m_matrices;
    int m_dimK;
    AlgebraVector m_z0;
    Mat m_I;
  };

  /// Rank of the simple algebra and of the symmetric space for a spec.
  int algebraRank(const SpaceSpec& s);
  int spaceRank(const SpaceSpec& s);

  /// Builds the pair. The invariant form is scaled so that the first
  /// strongly orthogonal root vector X_1 has unit length.
  HermitianPair buildPair(const SpaceSpec& space);

  /// Same with an explicit form scale (no rescaling).
  HermitianPair buildPairWithKappa(const SpaceSpec& space, double kappa);

  struct Root {
    Vec theta;        // alpha(t_k)/i for the t basis
    int n1 = 0;       // alpha(Z0)/i
    bool compact = false;
    bool positive = false;
    CVec e;           // E_alpha, algebra coordinates
    CVec h;           // H_alpha in i t, algebra coordinates
    AlgebraVector x;  // X_alpha, Y_alpha, T_alpha (for positive roots)
    AlgebraVector y;
    AlgebraVector t;
  };

  struct RootDatum {
    Mat tBasis;  // columns, algebra coordinates; first column is Z0/|Z0|
    std::vector<Root> roots;

    /// alpha(T)/i for T in t (algebra coordinates).
    double value(const Root& r, const AlgebraVector& T) const;

    /// Index of the root whose theta equals the given one, or -1.
    int find(const Vec& theta, double tol = 1e-7) const;

    std::vector<int> positiveNoncompact() const;
    std::vector<int> positiveCompact() const;
    int countPositive() const;
  };

  /// Lexicographic comparison of root coordinates (n1 first, then theta)
  /// with tolerance; returns -1, 0 or 1.
  int compareRoots(const Root& a, const Root& b, double tol = 1e-8);

  RootDatum computeRootDatum(const HermitianPair& pair, std::uint64_t seed = 0);

  /// max |exp((pi/2) ad(scale * Z0))|m - I| (entrywise).
  double checkIInAdK(const HermitianPair& pair, double scale = 1.0);

  /// Residual report for the root datum invariants.
  struct RootDatumResiduals {
    double eigen = 0.0;        // [H, E_a] = a(H) E_a
    double triple = 0.0;       // [H_a, E_{+-a}] = +-2 E_{+-a}, [E_a, E_-a] = -H_a
    double realTriple = 0.0;   // [X,Y]=T, [T,X]=Y, [T,Y]=-X
    double complexStructure = 0.0;  // I X_a = Y_a, I Y_a = -X_a on positive m-roots
    double rootAction = 0.0;   // [T, xi_a] = -i a(T) I xi_a
    int sumsThatAreRoots = 0;  // alpha + beta in Delta for alpha, beta in Delta+_m
    int badN1 = 0;             // n1 outside {0, 1, -1} or wrong k/m tag
  };
  RootDatumResiduals rootDatumResiduals(const HermitianPair& pair, const RootDatum& datum);

}
