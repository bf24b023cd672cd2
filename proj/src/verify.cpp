#include "verify.hpp"

#include "errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace hksym {

  namespace {

    using Params = std::optional<HKParams>;

    std::string num(double v)
    {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      return std::string(buf, res.ptr);
    }

    std::string vecText(const Vec& v)
    {
      std::string s = "[";
      for (int i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + num(v(i));
      return s + "]";
    }

    template <typename Derived>
    double maxAbs(const Eigen::MatrixBase<Derived>& m)
    {
      return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
    }

    Vec gaussian(std::mt19937_64& rng, int n, double sigma = 1.0)
    {
      std::normal_distribution<double> nd(0.0, sigma);
      Vec v(n);
      for (int i = 0; i < n; ++i)
        v(i) = nd(rng);
      return v;
    }

    // [[a, b], c] for a, b, c in m coordinates
    Vec outerBracket(const HermitianPair& p, const Vec& a, const Vec& b, const Vec& c)
    {
      return -p.doubleBracketM(c, a, b);
    }

    Mat directional(const std::function<Mat(const Vec&)>& f, const Vec& w, const Vec& d,
                    double h = 1e-5)
    {
      return (f(w + h * d) - f(w - h * d)) / (2.0 * h);
    }

    // Symmetric, I-commuting matrix with largest entry 1.
    Mat commutingNoise(const HermitianPair& pair, std::mt19937_64& rng)
    {
      const int m = pair.dimM();
      const Mat& I = pair.complexStructure();
      const Mat g = gaussian(rng, m * m).reshaped(m, m);
      const Mat s = symmetrized(g);
      const Mat c = 0.5 * (s - I * s * I);
      return c / maxAbs(c);
    }

    // Eigenvalue of A(X_j) on m_lambda: c_j^2 + (c_I)_j^2, and 1 on e_j.
    double aWeight(const RestrictedRootSystem& rrs, const RestrictedRoot& root, int j)
    {
      if (root.partner < 0)
        return std::abs(root.c(j)) > 0.75 ? 1.0 : root.c(j) * root.c(j);
      const Vec& ci = rrs.sigmaPlus[root.partner].c;
      return root.c(j) * root.c(j) + ci(j) * ci(j);
    }

    // Expected eigenvalue of Upsilon_* on m_lambda at sum x_j X_j.
    double upsilonEigen(const RestrictedRoot& root, const Vec& x)
    {
      std::vector<int> nz;
      for (int j = 0; j < root.c.size(); ++j)
        if (root.c(j) != 0.0)
          nz.push_back(j);
      if (nz.size() == 2)
        return (root.c(nz[0]) * root.c(nz[1]) > 0 ? 1.0 : -1.0) / (x(nz[0]) * x(nz[1]));
      return 1.0 / (x(nz[0]) * x(nz[0]));
    }

    Vec randomCartanX(const SpaceModel& model, const HKParams& p, std::mt19937_64& rng)
    {
      const double lo = std::max(0.04, p.aDagger());
      std::uniform_real_distribution<double> u(0.15, 2.15);
      std::bernoulli_distribution sign(0.5);
      Vec x(model.rrs.rank());
      for (int j = 0; j < x.size(); ++j)
        x(j) = (sign(rng) ? -1.0 : 1.0) * std::sqrt(lo + u(rng));
      return x;
    }

    struct Job {
      const SpaceModel& model;
      Params params;
      const Campaign& c;
      std::vector<CheckResult>& out;

      std::string space() const { return model.spec.str(); }

      std::mt19937_64 rng(const std::string& id) const
      {
        return checkRng(c.seed, space() + "|" + (params ? params->str() : "-") + "|" + id);
      }

      CheckResult& push(const Tally& t, const std::string& id, double threshold,
                        CheckRole role = CheckRole::Check)
      {
        out.push_back(t.result(id, space(), params, threshold));
        out.back().role = role;
        return out.back();
      }

      // Runs fn once per sample, catching library errors into the tally.
      template <typename Fn>
      void each(Tally& t, int n, Fn&& fn)
      {
        for (int i = 0; i < n; ++i) {
          try {
            fn(i);
          } catch (const std::exception& e) {
            t.fail("sample " + std::to_string(i) + ": " + e.what());
          }
        }
      }
    };

    int countWorst(bool bad) { return bad ? 1 : 0; }

  }

  // ---------------------------------------------------------------- Tally

  void Tally::add(double residual, const std::string& sample)
  {
    ++m_samples;
    if (std::isnan(residual))
      residual = std::numeric_limits<double>::infinity();
    m_max = std::max(m_max, residual);
    m_worst.push_back({residual, sample});
    std::stable_sort(m_worst.begin(), m_worst.end(),
                     [](const SampleDetail& a, const SampleDetail& b) { return a.residual > b.residual; });
    if (m_worst.size() > 3)
      m_worst.resize(3);
  }

  void Tally::fail(const std::string& why)
  {
    add(std::numeric_limits<double>::infinity(), why);
  }

  CheckResult Tally::result(std::string id, const std::string& space, const Params& params,
                            double threshold) const
  {
    CheckResult r;
    r.checkId = std::move(id);
    r.space = space;
    r.params = params;
    r.samples = m_samples;
    r.maxResidual = m_max;
    r.threshold = threshold;
    r.passed = m_samples > 0 && m_max < threshold;
    if (!r.passed) {
      r.details = m_worst;
      if (r.details.empty())
        r.details.push_back({0.0, "no samples"});
    }
    return r;
  }

  // ------------------------------------------------------------ plumbing

  SpaceModel SpaceModel::build(const SpaceSpec& spec)
  {
    HermitianPair pair = buildPair(spec);
    RootDatum datum = computeRootDatum(pair);
    RestrictedRootSystem rrs = restrictedDecomposition(pair, cascade(pair, datum));
    return {spec, std::move(pair), std::move(datum), std::move(rrs)};
  }

  std::vector<HKParams> defaultParamGrid(RootSystemType type)
  {
    if (type == RootSystemType::C)
      return {{1, 0, 0, 1}, {0.5, 0.3, -0.2, 1}, {-0.5, 0.4, 0, 1}, {2, 0, 0.5, 1}};
    return {{1, 0, 0, 1}, {1, 0, 0, -1}, {0, 0, 0, -1}, {2.5, 0, 0, 1}};
  }

  std::mt19937_64 checkRng(std::uint64_t seed, const std::string& key)
  {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](unsigned char b) {
      h ^= b;
      h *= 1099511628211ull;
    };
    for (int i = 0; i < 8; ++i)
      mix(static_cast<unsigned char>(seed >> (8 * i)));
    for (char ch : key)
      mix(static_cast<unsigned char>(ch));
    return std::mt19937_64(h);
  }

  DomainPoint sampleDomainPoint(const SpaceModel& model, const HKParams& p, std::mt19937_64& rng)
  {
    const Vec x = randomCartanX(model, p, rng);
    const int k = model.pair.dimK();
    return makeDomainPoint(model.pair, model.rrs, x, {gaussian(rng, k, 0.7), gaussian(rng, k, 0.7)});
  }

  std::string describePoint(const DomainPoint& d)
  {
    std::string s = "x=" + vecText(d.x) + " k=[";
    for (std::size_t i = 0; i < d.kWord.size(); ++i)
      s += (i ? "," : "") + vecText(d.kWord[i]);
    return s + "]";
  }

  // ---------------------------------------------------- root table oracle

  int restrictedRootOracleMismatches(const SpaceModel& model, std::string* diagnostic)
  {
    const HermitianPair& pair = model.pair;
    const RestrictedRootSystem& rrs = model.rrs;
    const int r = rrs.rank();
    std::ostringstream diag;
    int bad = 0;

    struct Candidate {
      Vec c;
      std::string label;
    };
    std::vector<Candidate> candidates;
    auto addCandidate = [&](const Vec& c) {
      RestrictedRoot tmp;
      tmp.c = c;
      candidates.push_back({c, tmp.label()});
    };
    for (int j = 0; j < r; ++j) {
      addCandidate(Vec::Unit(r, j));
      addCandidate(0.5 * Vec::Unit(r, j));
      for (int k = j + 1; k < r; ++k) {
        addCandidate(0.5 * (Vec::Unit(r, j) + Vec::Unit(r, k)));
        addCandidate(0.5 * (Vec::Unit(r, j) - Vec::Unit(r, k)));
      }
    }
    Vec x(r);
    for (int j = 0; j < r; ++j)
      x(j) = 1.0 + 0.41 * (j + 1) * (j + 1) + 0.07 * j * j * j;
    const Vec w = rrs.a * x;
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(-pair.adSquaredOnM(w)));
    const Vec& mu = es.eigenvalues();
    const Mat& vecs = es.eigenvectors();

    // label -> eigenvectors
    std::map<std::string, std::vector<int>> spaces;
    for (int i = 0; i < mu.size(); ++i) {
      if (std::abs(mu(i)) < 1e-8) {
        spaces["0"].push_back(i);
        continue;
      }
      std::vector<std::string> hits;
      for (const auto& cand : candidates)
        if (std::abs(std::pow(cand.c.dot(x), 2) - mu(i)) < 1e-7)
          hits.push_back(cand.label);
      if (hits.size() != 1) {
        ++bad;
        diag << "eigenvalue " << mu(i) << " matches " << hits.size() << " covectors; ";
        continue;
      }
      spaces[hits[0]].push_back(i);
    }
    if (static_cast<int>(spaces["0"].size()) != r) {
      ++bad;
      diag << "zero eigenspace has dimension " << spaces["0"].size() << "; ";
    }

    auto basisOf = [&](const std::vector<int>& idx) {
      Mat b(vecs.rows(), static_cast<int>(idx.size()));
      for (std::size_t i = 0; i < idx.size(); ++i)
        b.col(static_cast<int>(i)) = vecs.col(idx[i]);
      return b;
    };
    // I maps each eigenspace onto a single eigenspace; find which.
    std::map<std::string, std::string> partner;
    for (const auto& [label, idx] : spaces) {
      if (label == "0")
        continue;
      const Mat img = pair.complexStructure() * basisOf(idx);
      std::string found;
      for (const auto& [other, oidx] : spaces) {
        const Mat b = basisOf(oidx);
        if ((img - b * (b.transpose() * img)).norm() < 1e-8 * std::max(1.0, img.norm()))
          found = other;
      }
      if (found.empty()) {
        ++bad;
        diag << "I m_" << label << " is not an eigenspace; ";
      }
      partner[label] = found;
    }

    bool oracleBC = false;
    for (const auto& [label, idx] : spaces)
      for (const auto& cand : candidates)
        if (cand.label == label && std::abs(cand.c.lpNorm<1>() - 0.5) < 1e-12)
          oracleBC = true;
    if (oracleBC != (rrs.type == RootSystemType::BC)) {
      ++bad;
      diag << "type mismatch; ";
    }

    std::size_t seen = 0;
    for (const auto& root : rrs.sigmaPlus) {
      const std::string label = root.label();
      const auto it = spaces.find(label);
      if (it == spaces.end() || static_cast<int>(it->second.size()) != root.multiplicity()) {
        ++bad;
        diag << "root " << label << " multiplicity " << root.multiplicity() << " vs "
             << (it == spaces.end() ? 0 : it->second.size()) << "; ";
        continue;
      }
      ++seen;
      const std::string mine = root.partner < 0 ? "0" : rrs.sigmaPlus[root.partner].label();
      if (partner[label] != mine) {
        ++bad;
        diag << "partner of " << label << " is " << mine << " vs " << partner[label] << "; ";
      }
    }
    if (seen + 1 != spaces.size()) {
      ++bad;
      diag << "oracle found " << spaces.size() - 1 << " roots, computed " << rrs.sigmaPlus.size() << "; ";
    }
    if (diagnostic)
      *diagnostic = diag.str();
    return bad;
  }

  // ------------------------------------------------------ structure suite

  std::vector<CheckResult> runStructureSuite(const SpaceModel& model, const Campaign& c)
  {
    std::vector<CheckResult> out;
    Job job{model, std::nullopt, c, out};
    const HermitianPair& pair = model.pair;
    const CompactLieAlgebra& g = pair.algebra();
    const RestrictedRootSystem& rrs = model.rrs;
    const double str = c.tol.structural;
    const int n = c.samples;
    const Mat& I = pair.complexStructure();
    const int m = pair.dimM();
    auto single = [&](const std::string& id, double residual, double thr, const std::string& what) {
      Tally t;
      t.add(residual, what);
      job.push(t, id, thr);
    };

    single("structure.algebra_antisymmetry", g.antisymmetryResidual(), str, "all basis pairs");
    single("structure.algebra_jacobi", g.jacobiResidual(), str, "all basis triples");
    single("structure.form_invariance", g.adInvarianceResidual(), str, "all basis triples");
    single("structure.form_positive", countWorst(g.minGramEigenvalue() <= 0.0), 0.5,
           "min eigenvalue " + num(g.minGramEigenvalue()));
    single("structure.cartan_decomposition", pair.cartanResidual(), str, "all basis pairs");
    single("structure.complex_structure_square", maxAbs(I * I + Mat::Identity(m, m)), str, "I^2 + 1");
    single("structure.i_from_center", checkIInAdK(pair), str, "exp((pi/2) ad Z0) on m");

    {
      Tally t;
      auto rng = job.rng("structure.i_bracket_invariance");
      job.each(t, n, [&](int i) {
        const Vec xi = gaussian(rng, m), eta = gaussian(rng, m);
        const Vec zeta = gaussian(rng, pair.dimK());
        const double r1 = maxAbs(g.bracket(pair.fromM(I * xi), pair.fromM(I * eta))
                                 - g.bracket(pair.fromM(xi), pair.fromM(eta)));
        const Vec zk = pair.fromK(zeta);
        const double r2 = maxAbs(I * pair.toM(g.bracket(zk, pair.fromM(eta)))
                                 - pair.toM(g.bracket(zk, pair.fromM(I * eta))));
        t.add(std::max(r1, r2), "sample " + std::to_string(i));
      });
      job.push(t, "structure.i_bracket_invariance", str);
    }

    const RootDatumResiduals rd = rootDatumResiduals(pair, model.datum);
    single("structure.root_eigenvectors", rd.eigen, str, "all roots");
    single("structure.root_triples", std::max(rd.triple, rd.realTriple), str, "all roots");
    single("structure.root_complex_structure", rd.complexStructure, str, "positive noncompact roots");
    single("structure.root_action", rd.rootAction, str, "positive noncompact roots");
    single("structure.noncompact_root_sums", rd.sumsThatAreRoots + rd.badN1, 0.5,
           "pairs of positive noncompact roots");

    const CascadeResiduals cr = cascadeResiduals(pair, model.datum, rrs.cascade);
    single("structure.cascade_relations", std::max({cr.brackets, cr.abelian, cr.dual}), str,
           "cascade triples");
    single("structure.strong_orthogonality",
           cr.notStronglyOrthogonal + std::abs(rrs.rank() - spaceRank(model.spec)), 0.5,
           "cascade of length " + std::to_string(rrs.rank()));

    {
      // m_0 = a: the centralizer of a in m is a itself
      Mat stacked(rrs.rank() * pair.dimK(), m);
      for (int j = 0; j < rrs.rank(); ++j)
        stacked.middleRows(j * pair.dimK(), pair.dimK()) = pair.adKM(pair.fromM(rrs.a.col(j)));
      const int dim = static_cast<int>(nullSpace(stacked, 1e-9).cols());
      single("structure.cartan_subspace", std::abs(dim - rrs.rank()), 0.5,
             "centralizer dimension " + std::to_string(dim));
    }

    {
      // m = a + sum m_lambda and k = k^a + sum k_lambda, direct and orthogonal
      std::vector<Mat> mb{rrs.a}, kb{rrs.kCentralizer};
      for (const auto& root : rrs.sigmaPlus) {
        mb.push_back(root.m);
        kb.push_back(root.k);
      }
      auto residual = [](const std::vector<Mat>& blocks, int dim) {
        int cols = 0;
        for (const Mat& b : blocks)
          cols += static_cast<int>(b.cols());
        if (cols != dim)
          return 1.0;
        Mat q(dim, cols);
        int at = 0;
        for (const Mat& b : blocks) {
          q.middleCols(at, b.cols()) = b;
          at += static_cast<int>(b.cols());
        }
        return maxAbs(q.transpose() * q - Mat::Identity(cols, cols));
      };
      single("structure.orthogonal_splitting",
             std::max(residual(mb, m), residual(kb, pair.dimK())), str, "a, k^a and root spaces");
    }

    {
      std::string diag;
      const int bad = restrictedRootOracleMismatches(model, &diag);
      single("structure.restricted_root_oracle", bad, 0.5, diag.empty() ? "tables agree" : diag);
    }
    single("structure.restricted_root_pairing", pairingViolations(rrs), 0.5, "lambda -> lambda_I");

    const MooreReport mr = mooreMaps(pair, model.datum, rrs);
    single("structure.moore_snap", mr.rhoSnap, 1e-6, "rho on positive noncompact roots");
    single("structure.moore_containment", mr.rhoOutside, 0.5, "rho on positive noncompact roots");
    single("structure.moore_cascade", mr.rhoBeta, str, "rho(beta_j) = e_j");
    single("structure.moore_root_spaces", mr.spans + mr.spanDimensionMismatch, str,
           "m_lambda against its root spaces");
    single("structure.moore_k_action", mr.kAction, str, "[T_j, zeta] on k_lambda");

    {
      Tally t;
      auto rng = job.rng("structure.squares_identity");
      job.each(t, n, [&](int i) {
        const Vec w = gaussian(rng, m);
        const SquaresIdentity s = checkSquaresIdentity(pair, w);
        t.add(std::max(s.identity, s.commutator), "w=" + vecText(w) + " (sample " + std::to_string(i) + ")");
      });
      job.push(t, "structure.squares_identity", str);
    }

    {
      const CentralizerReport cent = checkCentralizer(pair, rrs);
      const double residual = cent.vacuous ? 0.0
                              : cent.residual + std::abs(cent.dimension - 2 * rrs.rank());
      single("structure.centralizer", residual, str, "centralizer of k^a in m");
      out.back().note = cent.vacuous ? "vacuous: k^a = 0"
                                     : "dimension " + std::to_string(cent.dimension);
    }

    out.push_back(CheckResult{});
    out.back().checkId = "structure.type";
    out.back().space = job.space();
    out.back().samples = 1;
    out.back().threshold = 0.5;
    out.back().passed = true;
    out.back().note = typeName(rrs.type, rrs.rank());
    return out;
  }

  // ------------------------------------------------------------- hk suite

  std::vector<CheckResult> runHkSuite(const SpaceModel& model, const HKParams& p, const Campaign& c)
  {
    validateParams(p, model.rrs.type);
    std::vector<CheckResult> out;
    Job job{model, p, c, out};
    const HermitianPair& pair = model.pair;
    const RestrictedRootSystem& rrs = model.rrs;
    const int n = c.samples;
    const int m = pair.dimM(), dim = pair.dim();
    const Mat& I = pair.complexStructure();
    const Mat id = Mat::Identity(m, m);
    const double alg = c.tol.algebraic, fd = c.tol.finiteDifference, str = c.tol.structural;
    const bool typeC = rrs.type == RootSystemType::C;
    const double c2 = p.c2();
    const double base = p.eps * std::sqrt(std::abs(p.a0));

    auto sampled = [&](const std::string& id0, double thr, int count, auto&& body) {
      Tally t;
      auto rng = job.rng(id0);
      job.each(t, count, [&](int i) { body(t, rng, i); });
      return &job.push(t, id0, thr);
    };
    auto atPoint = [&](std::mt19937_64& rng) { return sampleDomainPoint(model, p, rng); };
    auto atCartan = [&](std::mt19937_64& rng) {
      return makeDomainPoint(pair, rrs, randomCartanX(model, p, rng));
    };

    sampled("hk.domain_membership", 0.5, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      t.add(countWorst(!d.inDomain(p)), describePoint(d));
    });

    // Upsilon and its derivative
    sampled("hk.upsilon_derivative", fd, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const Mat u = upsilonStar(pair, d.w);
      const double h = 1e-5;
      double r = 0.0;
      for (int i = 0; i < m; ++i) {
        const Vec e = Vec::Unit(m, i);
        const Vec col = (upsilon(pair, d.w + h * e) - upsilon(pair, d.w - h * e)) / (2 * h);
        r = std::max(r, maxAbs(col - u.col(i)));
      }
      t.add(r, describePoint(d));
    });
    sampled("hk.upsilon_cartan_eigenvalues", alg, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atCartan(rng);
      const Mat u = upsilonStar(pair, d.w);
      double r = 0.0;
      for (int j = 0; j < rrs.rank(); ++j) {
        const Vec xj = rrs.a.col(j);
        const double s = 1.0 / (d.x(j) * d.x(j));
        r = std::max({r, maxAbs(u * xj + s * xj), maxAbs(u * (I * xj) - s * (I * xj))});
      }
      for (const auto& root : rrs.sigmaPlus)
        r = std::max(r, maxAbs(u * root.m - upsilonEigen(root, d.x) * root.m));
      t.add(r, describePoint(d));
    });
    if (typeC) {
      sampled("hk.upsilon_anticommutes_i", alg, n, [&](Tally& t, std::mt19937_64& rng, int) {
        const DomainPoint d = atPoint(rng);
        const Mat u = upsilonStar(pair, d.w);
        t.add(maxAbs(u * I + I * u), describePoint(d));
      });
    } else {
      // halved roots present: anticommutation must fail somewhere
      sampled("hk.upsilon_commutator_on_halved_roots", 0.5, n, [&](Tally& t, std::mt19937_64& rng, int) {
        const DomainPoint d = atPoint(rng);
        const Mat u = upsilonStar(pair, d.w);
        t.add(countWorst(maxAbs(u * I + I * u) < 1e-3), describePoint(d));
      });
    }

    // spectral maps
    const SpectralMap poly{[](double t) { return 1.0 + t - 0.3 * t * t; },
                           [](double t) { return 1.0 - 0.6 * t; }};
    sampled("hk.qhat_cartan", 1e-8, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atCartan(rng);
      const QHatValue v = qHat(pair, d.w, poly);
      Vec val(d.x.size()), rad(d.x.size());
      for (int j = 0; j < d.x.size(); ++j) {
        const double s = d.x(j) * d.x(j);
        val(j) = d.x(j) * poly.f(s);
        rad(j) = poly.f(s) + 2 * s * poly.fprime(s);
      }
      const Mat star = qHatStar(pair, d.w, poly);
      double r = maxAbs(v.value - rrs.a * val);
      for (int j = 0; j < d.x.size(); ++j)
        r = std::max(r, maxAbs(star * rrs.a.col(j) - rad(j) * rrs.a.col(j)));
      t.add(r, describePoint(d));
    });
    sampled("hk.qhat_root_eigenvalues", 1e-8, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atCartan(rng);
      const Mat star = qHatStar(pair, d.w, poly);
      Vec val(d.x.size());
      for (int j = 0; j < d.x.size(); ++j)
        val(j) = d.x(j) * poly.f(d.x(j) * d.x(j));
      double r = 0.0;
      for (const auto& root : rrs.sigmaPlus) {
        const double den = root.c.dot(d.x);
        if (std::abs(den) < 1e-6)
          continue;
        r = std::max(r, maxAbs(star * root.m - (root.c.dot(val) / den) * root.m));
      }
      t.add(r, describePoint(d));
    });
    sampled("hk.qhat_splitting", alg, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atCartan(rng);
      const Mat star = qHatStar(pair, d.w, poly);
      std::vector<const Mat*> blocks{&rrs.a};
      for (const auto& root : rrs.sigmaPlus)
        blocks.push_back(&root.m);
      double r = 0.0;
      for (const Mat* b : blocks) {
        const Mat img = star * *b;
        r = std::max(r, maxAbs(img - *b * (b->transpose() * img)));
      }
      t.add(r, describePoint(d));
    });
    sampled("hk.derivation_identity", 1e-7, n, [&](Tally& t, std::mt19937_64& rng, int i) {
      const DomainPoint d = i % 2 ? atPoint(rng) : atCartan(rng);
      const Mat u = upsilonStar(pair, d.w);
      const Vec xi = gaussian(rng, m), eta = gaussian(rng, m);
      auto residual = [&](const Mat& f) {
        const Vec lhs = f * pair.doubleBracketM(d.w, xi, eta);
        return maxAbs(lhs - outerBracket(pair, d.w, f * xi, eta) + outerBracket(pair, d.w, f * eta, xi));
      };
      double r = residual(u);
      if (typeC)
        r = std::max(r, residual((p.a1 * id + p.a2 * I) * u));
      t.add(r, describePoint(d));
    });

    // B
    sampled("hk.b_derivative", 1e-8, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const Vec x = randomCartanX(model, p, rng);
      const double xv = std::abs(x(0)), h = 1e-6;
      const double d = (bScalar(xv + h, p) - bScalar(xv - h, p)) / (2 * h);
      t.add(std::abs(d - xv * (1 + c2 / std::pow(xv, 4)) / bScalar(xv, p)), "x=" + num(xv));
    });
    sampled("hk.b_root_eigenvalues", alg, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atCartan(rng);
      const Mat b = bOp(pair, d.w, p);
      double r = 0.0;
      for (int j = 0; j < d.x.size(); ++j)
        r = std::max(r, maxAbs(b * rrs.a.col(j) - bScalar(d.x(j), p) * rrs.a.col(j)));
      for (const auto& root : rrs.sigmaPlus) {
        double ev = base;
        for (int j = 0; j < d.x.size(); ++j)
          ev += aWeight(rrs, root, j) * (bScalar(d.x(j), p) - base);
        r = std::max(r, maxAbs(b * root.m - ev * root.m));
      }
      t.add(r, describePoint(d));
    });
    sampled("hk.b_cartan_form", alg, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atCartan(rng);
      AlgebraVector tw = AlgebraVector::Zero(dim);
      for (int j = 0; j < d.x.size(); ++j)
        tw -= (bScalar(d.x(j), p) - base) * rrs.cascade.T[j];
      const Mat alt = I * pair.adMM(tw) + base * id;
      t.add(maxAbs(bOp(pair, d.w, p) - alt), describePoint(d));
    });
    sampled("hk.b_symmetric_commutes_i", str, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const Mat b = bOp(pair, d.w, p);
      t.add(std::max(maxAbs(b - b.transpose()), maxAbs(b * I - I * b)), describePoint(d));
    });

    // P, R, S
    sampled("hk.p_symmetric", str, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const POp op = pOp(pair, d.w, p);
      t.add(std::max(maxAbs(op.R - op.R.transpose()), maxAbs(op.S - op.S.transpose())), describePoint(d));
    });
    sampled("hk.r_positive", 0.5, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const POp op = pOp(pair, d.w, p);
      Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(op.R));
      t.add(countWorst(!(es.eigenvalues().minCoeff() > 0.0)),
            describePoint(d) + " min eigenvalue " + num(es.eigenvalues().minCoeff()));
    });
    sampled("hk.r_commutes_i", str, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const POp op = pOp(pair, d.w, p);
      t.add(maxAbs(op.R * I - I * op.R), describePoint(d));
    });
    sampled("hk.s_anticommutes_i", str, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const POp op = pOp(pair, d.w, p);
      t.add(maxAbs(op.S * I + I * op.S), describePoint(d));
    });
    sampled("hk.r_s_commute", str, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const POp op = pOp(pair, d.w, p);
      t.add(maxAbs(op.R * op.S - op.S * op.R), describePoint(d));
    });
    if (c2 > 0) {
      sampled("hk.s_over_r", alg, n, [&](Tally& t, std::mt19937_64& rng, int) {
        const DomainPoint d = atPoint(rng);
        const POp op = pOp(pair, d.w, p);
        t.add(maxAbs(op.S * op.R.inverse() - (p.a1 * id + p.a2 * I) * op.U), describePoint(d));
      });
    }
    {
      // S vanishes identically iff a1 = a2 = 0
      Tally t;
      auto rng = job.rng("hk.s_vanishing");
      double maxS = 0.0;
      std::string where;
      job.each(t, n, [&](int) {
        const DomainPoint d = atPoint(rng);
        const double s = maxAbs(pOp(pair, d.w, p).S);
        if (s >= maxS) {
          maxS = s;
          where = describePoint(d);
        }
      });
      Tally summary;
      if (c2 == 0.0)
        summary.add(maxS, where);
      else
        summary.add(maxS > 1e-3 ? 0.0 : 1.0, "largest |S| " + num(maxS) + " at " + where);
      if (t.max() > 0)
        summary.fail("evaluation error");
      job.push(summary, "hk.s_vanishing", c2 == 0.0 ? str : 0.5);
    }
    sampled("hk.r_preserves_root_spaces", alg, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atCartan(rng);
      const POp op = pOp(pair, d.w, p);
      double r = 0.0;
      for (int j = 0; j < d.x.size(); ++j) {
        const Vec xj = rrs.a.col(j);
        const Vec img = op.R * xj;
        r = std::max(r, maxAbs(img - xj.dot(img) * xj));
      }
      for (const auto& root : rrs.sigmaPlus) {
        const Mat img = op.R * root.m;
        r = std::max(r, maxAbs(img - root.m * (root.m.transpose() * img)));
      }
      t.add(r, describePoint(d));
    });
    sampled("hk.equivariance", alg, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const Mat k = adKOnM(pair, {gaussian(rng, pair.dimK(), 0.7)});
      const POp a = pOp(pair, d.w, p), b = pOp(pair, k * d.w, p);
      const Mat ua = upsilonStar(pair, d.w), ub = upsilonStar(pair, k * d.w);
      auto conj = [&](const Mat& f) { return Mat(k * f * k.transpose()); };
      t.add(std::max({maxAbs(conj(ua) - ub), maxAbs(conj(a.B) - b.B), maxAbs(conj(a.R) - b.R),
                      maxAbs(conj(a.S) - b.S)}),
            describePoint(d));
    });
    if (p.a1 == 0 && p.a2 == 0 && p.a0 > 0 && p.eps == 1) {
      sampled("hk.p_at_origin", 1e-4, n, [&](Tally& t, std::mt19937_64& rng, int) {
        const DomainPoint d = makeDomainPoint(pair, rrs, Vec::Constant(rrs.rank(), 1e-6),
                                              {gaussian(rng, pair.dimK(), 0.7)});
        const CMat target = std::sqrt(p.a0) * CMat::Identity(m, m);
        const double r0 = maxAbs(pOp(pair, Vec::Zero(m), p).P() - target);
        t.add(std::max(r0, maxAbs(pOp(pair, d.w, p).P() - target)), describePoint(d));
      });
    }
    if (typeC && p.aDagger() > 0) {
      sampled("hk.boundary", 0.5, n, [&](Tally& t, std::mt19937_64& rng, int) {
        Vec x = randomCartanX(model, p, rng);
        x(0) = std::sqrt(p.aDagger() + 1e-3);
        const DomainPoint d = makeDomainPoint(pair, rrs, x, {gaussian(rng, pair.dimK(), 0.7)});
        Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(pOp(pair, d.w, p).R));
        const double lo = es.eigenvalues().minCoeff();
        t.add(countWorst(!(lo > 0.0 && lo < 0.1)), describePoint(d) + " min eigenvalue " + num(lo));
      });
    }
    if (model.spec.kind == SpaceSpec::Kind::su && model.spec.p == 1 && model.spec.q == 1) {
      sampled("hk.su2_closed_form", alg, 50, [&](Tally& t, std::mt19937_64& rng, int) {
        std::uniform_real_distribution<double> ur(0.05, 3.0), ua(0.0, 2 * M_PI);
        const double r = std::sqrt(std::max(0.0, p.aDagger()) + ur(rng));
        const std::complex<double> z = std::polar(r, ua(rng));
        const Vec x1 = rrs.a.col(0), y1 = I * x1;
        const POp op = pOp(pair, z.real() * x1 + z.imag() * y1, p);
        const double psi = bScalar(r, p) * std::pow(r, 4) / (std::pow(r, 4) + c2);
        double res = maxAbs(op.R - psi * id);
        for (const std::complex<double> v : {std::complex<double>(1, 0), std::complex<double>(0, 1)}) {
          const std::complex<double> img = -psi * std::complex<double>(p.a1, p.a2) * std::conj(v / (z * z));
          res = std::max(res, maxAbs(op.S * (v.real() * x1 + v.imag() * y1) - (img.real() * x1 + img.imag() * y1)));
        }
        t.add(res, "z=" + num(z.real()) + "+" + num(z.imag()) + "i");
      })->note = "S compared with -psi (a1 + i a2) conj(z^-2 v)";
    }

    // almost complex tensors and forms
    const Mat jm = jPlusMinus(pair, -1);
    const Mat id2 = Mat::Identity(2 * m, 2 * m);
    sampled("hk.j_square", str, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const POp op = pOp(pair, d.w, p);
      const Mat j = jTensor(op.R, op.S);
      t.add(std::max({maxAbs(j * j + id2), maxAbs(jm * jm + id2)}), describePoint(d));
    });
    sampled("hk.anticommutation", str, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const POp op = pOp(pair, d.w, p);
      const Mat j = jTensor(op.R, op.S);
      t.add(maxAbs(jm * j + j * jm), describePoint(d));
    });
    sampled("hk.omega_prime", c.tol.omegaPrime, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const POp op = pOp(pair, d.w, p);
      const Mat j = jTensor(op.R, op.S);
      const Vec v1 = gaussian(rng, 2 * m), v2 = gaussian(rng, 2 * m);
      const TangentVector a = unpackTangent(pair, v1), b = unpackTangent(pair, v2);
      const cd lhs = omegaPrimeForm(pair, a, b);
      const cd rhs = omegaForm(pair, d.w, unpackTangent(pair, jm * j * j * v1), b);
      t.add(std::abs(lhs - rhs), describePoint(d));
    });
    sampled("hk.dtheta_prime", c.tol.omegaPrime, std::max(n, 1000), [&](Tally& t, std::mt19937_64& rng, int i) {
      const DomainPoint d = atPoint(rng);
      const TangentVector a = unpackTangent(pair, gaussian(rng, 2 * m));
      const TangentVector b = unpackTangent(pair, gaussian(rng, 2 * m));
      t.add(std::abs(dThetaPrime(pair, d.w, a, b) - omegaPrimeForm(pair, a, b)),
            "pair " + std::to_string(i) + " at " + describePoint(d));
    });
    sampled("hk.isotropy", alg, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const CMat P = pOp(pair, d.w, p).P();
      auto lift = [&](const CVec& z) {
        CVec xi = CVec::Zero(dim);
        xi.tail(m) = z;
        return TangentVector{xi, cd(0, 1) * (P * z)};
      };
      auto rc = [&]() { return CVec(gaussian(rng, m).cast<cd>() + cd(0, 1) * gaussian(rng, m).cast<cd>()); };
      const TangentVector a = lift(rc()), b = lift(rc());
      t.add(std::abs(omegaForm(pair, d.w, a, b)), describePoint(d));
    });
    sampled("hk.isotropy_positive", 0.5, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const CMat P = pOp(pair, d.w, p).P();
      const CVec z = gaussian(rng, m).cast<cd>() + cd(0, 1) * gaussian(rng, m).cast<cd>();
      CVec xi = CVec::Zero(dim);
      xi.tail(m) = z;
      const TangentVector a{xi, cd(0, 1) * (P * z)};
      const TangentVector ab{a.xi.conjugate(), a.u.conjugate()};
      const cd q = cd(0, -1) * omegaForm(pair, d.w, a, ab);
      t.add(countWorst(!(q.real() > 0.0) || std::abs(q.imag()) > 1e-9 * std::abs(q)),
            describePoint(d) + " value " + num(q.real()));
    });

    // integrability and its consequences
    const MatrixField pField = [&](const Vec& v) { return pOp(pair, v, p).P(); };
    sampled("hk.integrability", fd, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const Vec xi = gaussian(rng, m), eta = gaussian(rng, m);
      t.add(maxAbs(integrabilityResidual(pair, pField, d.w, xi, eta)), describePoint(d));
    });
    sampled("hk.integrability_sign_variants", fd, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const Vec xi = gaussian(rng, m), eta = gaussian(rng, m);
      const MatrixField minus = [&](const Vec& v) { return CMat(-pField(v)); };
      const MatrixField bar = [&](const Vec& v) { return CMat(pField(v).conjugate()); };
      t.add(std::max(maxAbs(integrabilityResidual(pair, minus, d.w, xi, eta)),
                     maxAbs(integrabilityResidual(pair, bar, d.w, xi, eta))),
            describePoint(d));
    });
    const std::function<Mat(const Vec&)> rsr = [&](const Vec& v) {
      const POp op = pOp(pair, v, p);
      return Mat(op.R + op.S * op.R.inverse() * op.S);
    };
    const std::function<Mat(const Vec&)> sr = [&](const Vec& v) {
      const POp op = pOp(pair, v, p);
      return Mat(op.S * op.R.inverse());
    };
    sampled("hk.rsr_derivative", fd, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const Vec xi = gaussian(rng, m), eta = gaussian(rng, m);
      const Mat rinv = pOp(pair, d.w, p).R.inverse();
      const Vec lhs = directional(rsr, d.w, xi) * (I * eta);
      t.add(maxAbs(lhs - outerBracket(pair, d.w, I * rinv * xi, eta)), describePoint(d));
    });
    sampled("hk.sr_derivative_symmetry", fd, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const Vec xi = gaussian(rng, m), eta = gaussian(rng, m);
      t.add(maxAbs(directional(sr, d.w, xi) * eta - directional(sr, d.w, eta) * xi), describePoint(d));
    });
    sampled("hk.sr_bracket", alg, n, [&](Tally& t, std::mt19937_64& rng, int) {
      const DomainPoint d = atPoint(rng);
      const Vec xi = gaussian(rng, m), eta = gaussian(rng, m);
      const POp op = pOp(pair, d.w, p);
      const Mat rinv = op.R.inverse();
      const Mat rs = rinv * op.S;
      const Vec lhs = op.S * rinv * pair.doubleBracketM(d.w, xi, eta);
      const Vec rhs = outerBracket(pair, d.w, rs * xi, eta) - outerBracket(pair, d.w, rs * eta, xi);
      t.add(maxAbs(lhs - rhs), describePoint(d));
    });
    if (c2 == 0.0) {
      sampled("hk.hypercomplex_pair", str, n, [&](Tally& t, std::mt19937_64& rng, int) {
        const DomainPoint d = atPoint(rng);
        const POp op = pOp(pair, d.w, p);
        const Mat j1 = jTensor(op.R, op.S), j2 = jTensor(op.R * I, op.S * I);
        t.add(std::max(maxAbs(j1 * j2 + j2 * j1), maxAbs(j2 * j2 + id2)), describePoint(d));
      });
      sampled("hk.hypercomplex_integrability", fd, n, [&](Tally& t, std::mt19937_64& rng, int) {
        const DomainPoint d = atPoint(rng);
        const Vec xi = gaussian(rng, m), eta = gaussian(rng, m);
        const CMat ic = I.cast<cd>();
        const MatrixField pi = [&](const Vec& v) { return CMat(pField(v) * ic); };
        t.add(maxAbs(integrabilityResidual(pair, pi, d.w, xi, eta)), describePoint(d));
      });
    }

    // potential
    if (p.a2 == 0.0) {
      const Potential pot(p);
      sampled("hk.potential_ode", fd, std::max(n, 100), [&](Tally& t, std::mt19937_64&, int i) {
        const double lo = std::sqrt(std::max(0.0, p.aDagger())) + 0.05;
        const double x = lo + 0.03 * i, h = 1e-5;
        auto g = [&](double y) { return y * y * pot.q(y * y); };
        t.add(std::abs(bScalar(x, p) * (g(x + h) - g(x - h)) / (2 * h) - x), "x=" + num(x));
      })->note = "integration base point t0 = " + num(pot.t0());
      sampled("hk.potential_gradient", fd, n, [&](Tally& t, std::mt19937_64& rng, int) {
        const DomainPoint d = atPoint(rng);
        const Vec wp = pot.wPrime(pair, d.w);
        const double h = 1e-5;
        double r = 0.0;
        for (int i = 0; i < m; ++i) {
          const Vec e = Vec::Unit(m, i);
          const double g = (pot.value(pair, d.w + h * e) - pot.value(pair, d.w - h * e)) / (2 * h);
          r = std::max(r, std::abs(g - wp(i)));
        }
        t.add(r, describePoint(d));
      });
      sampled("hk.potential_invariance", str, n, [&](Tally& t, std::mt19937_64& rng, int) {
        const DomainPoint d = atPoint(rng);
        const Mat k = adKOnM(pair, {gaussian(rng, pair.dimK(), 0.7)});
        const double q0 = pot.value(pair, d.w);
        t.add(std::abs(pot.value(pair, k * d.w) - q0) / std::max(1.0, std::abs(q0)), describePoint(d));
      });
      auto dbarSample = [&](std::mt19937_64& rng, const DomainPoint& d, auto&& fn) {
        const POp op = pOp(pair, d.w, p);
        const Vec wp = pot.wPrime(pair, d.w);
        return fn(op, wp, rng);
      };
      if (c2 == 0.0) {
        sampled("hk.potential_theta", fd, n, [&](Tally& t, std::mt19937_64& rng, int) {
          const DomainPoint d = atPoint(rng);
          t.add(dbarSample(rng, d, [&](const POp& op, const Vec& wp, std::mt19937_64& r) {
            const TangentVector a{gaussian(r, dim).cast<cd>(), gaussian(r, m).cast<cd>()};
            return std::abs(2.0 * pot.dbar(pair, d.w, op, wp, a).imag() - thetaForm(pair, d.w, a).real());
          }), describePoint(d));
        })->note = "dbar Q(eta, u) = (i/2)<(R + S R^-1 S) w', eta> + (1/2)<(1 + i S R^-1) w', u>";
      }
      sampled("hk.potential_type", alg, n, [&](Tally& t, std::mt19937_64& rng, int) {
        const DomainPoint d = atPoint(rng);
        t.add(dbarSample(rng, d, [&](const POp& op, const Vec& wp, std::mt19937_64& r) {
          const Vec xi = gaussian(r, m);
          CVec xa = CVec::Zero(dim);
          xa.tail(m) = xi.cast<cd>();
          const TangentVector z{xa, cd(0, -1) * (op.P().conjugate() * xi.cast<cd>())};
          const Vec zeta = gaussian(r, pair.dimK());
          const AlgebraVector zk = pair.fromK(zeta);
          const Vec wz = pair.toM(pair.algebra().bracket(pair.fromM(d.w), zk));
          const TangentVector fib{zk.cast<cd>(), wz.cast<cd>()};
          return std::max(std::abs(pot.dbar(pair, d.w, op, wp, z)),
                          std::abs(pot.dbar(pair, d.w, op, wp, fib)));
        }), describePoint(d));
      });
    }
    return out;
  }

  // ---------------------------------------------------- negative controls

  std::vector<CheckResult> runNegativeControls(const SpaceModel& model, const Campaign& c)
  {
    const HKParams p{1, 0, 0, 1};
    std::vector<CheckResult> out;
    Job job{model, p, c, out};
    const HermitianPair& pair = model.pair;
    const RestrictedRootSystem& rrs = model.rrs;
    const int m = pair.dimM();
    const int n = std::min(c.samples, 20);

    for (double amp : {0.0, 1e-2}) {
      const CheckRole role = amp > 0 ? CheckRole::Control : CheckRole::Check;
      const std::string suffix = amp > 0 ? "" : ".baseline";
      {
        Tally t;
        auto rng = job.rng("control.b_noise" + suffix);
        Faults f;
        f.bNoise = amp * commutingNoise(pair, rng);
        const MatrixField field = [&](const Vec& v) { return pOp(pair, v, p, f).P(); };
        job.each(t, n, [&](int) {
          const DomainPoint d = sampleDomainPoint(model, p, rng);
          const Vec xi = gaussian(rng, m), eta = gaussian(rng, m);
          t.add(maxAbs(integrabilityResidual(pair, field, d.w, xi, eta)), describePoint(d));
        });
        job.push(t, "control.b_noise" + suffix, c.tol.finiteDifference, role).note =
          "integrability with B + " + num(amp) + " N";
      }
      {
        Tally t;
        auto rng = job.rng("control.s_perturbation" + suffix);
        Faults f;
        f.sNoise = amp * commutingNoise(pair, rng);
        const Mat jm = jPlusMinus(pair, -1);
        job.each(t, n, [&](int) {
          const DomainPoint d = sampleDomainPoint(model, p, rng);
          const POp op = pOp(pair, d.w, p, f);
          const Mat j = jTensor(op.R, op.S);
          t.add(maxAbs(jm * j + j * jm), describePoint(d));
        });
        job.push(t, "control.s_perturbation" + suffix, c.tol.structural, role).note =
          "anticommutation with S + " + num(amp) + " N";
      }
    }
    {
      Tally t;
      auto rng = job.rng("control.eps_flip");
      Faults f;
      f.flipEps = true;
      job.each(t, n, [&](int) {
        const DomainPoint d = makeDomainPoint(pair, rrs, randomCartanX(model, p, rng));
        const Mat b = bOp(pair, d.w, p, f);
        double r = 0.0;
        for (int j = 0; j < d.x.size(); ++j)
          r = std::max(r, maxAbs(b * rrs.a.col(j) - bScalar(d.x(j), p) * rrs.a.col(j)));
        t.add(r, describePoint(d));
      });
      job.push(t, "control.eps_flip", c.tol.algebraic, CheckRole::Control).note =
        "B eigenvalues with the sign of eps flipped";
    }
    {
      const CompactLieAlgebra& g = pair.algebra();
      int i = 0, j = 1, k = 0;
      double best = 0.0;
      for (int kk = 0; kk < g.dim(); ++kk)
        if (std::abs(g.c(0, 1, kk)) > best) {
          best = std::abs(g.c(0, 1, kk));
          k = kk;
        }
      const CompactLieAlgebra bad = g.withStructureConstant(i, j, k, g.c(i, j, k) * 1.1 + 0.1);
      Tally t;
      t.add(bad.jacobiResidual(), "c(0,1," + std::to_string(k) + ") corrupted");
      job.push(t, "control.structure_constant", c.tol.structural, CheckRole::Control).note =
        "Jacobi identity with one corrupted structure constant";
    }
    {
      Tally t;
      t.add(checkIInAdK(pair, 1.1), "Z0 scaled by 1.1");
      job.push(t, "control.center_scale", c.tol.structural, CheckRole::Control).note =
        "I against exp((pi/2) ad(1.1 Z0))";
    }
    return out;
  }

  // --------------------------------------------------------------- driver

  int Report::failedChecks() const
  {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& r) {
      return r.role == CheckRole::Check && !r.passed;
    }));
  }

  int Report::controlsThatPassed() const
  {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& r) {
      return r.role == CheckRole::Control && r.passed;
    }));
  }

  Report runCampaign(const Campaign& c)
  {
    if (c.spaces.empty())
      throw InputError("campaign needs at least one space");
    if (c.samples < 1)
      throw InputError("samples must be positive");

    struct Built {
      std::optional<SpaceModel> model;
      std::string error;
    };
    std::vector<Built> models;
    for (const SpaceSpec& s : c.spaces) {
      Built b;
      try {
        b.model.emplace(SpaceModel::build(s));
      } catch (const InputError&) {
        throw;
      } catch (const Error& e) {
        b.error = e.what();
      }
      models.push_back(std::move(b));
    }
    // parameter admissibility is a config error, checked before any work
    for (const Built& b : models)
      if (b.model)
        for (const HKParams& p : c.params)
          try {
            validateParams(p, b.model->rrs.type);
          } catch (const InputError& e) {
            throw InputError(std::string(e.what()) + " on " + b.model->spec.str() + " ("
                             + typeName(b.model->rrs.type, b.model->rrs.rank()) + ")");
          }

    std::vector<std::function<std::vector<CheckResult>()>> jobs;
    for (std::size_t i = 0; i < models.size(); ++i) {
      const Built& b = models[i];
      if (!b.model) {
        const std::string space = c.spaces[i].str(), err = b.error;
        jobs.push_back([space, err]() {
          Tally t;
          t.fail(err);
          return std::vector<CheckResult>{t.result("structure.construction", space, std::nullopt, 0.5)};
        });
        continue;
      }
      const SpaceModel& model = *b.model;
      jobs.push_back([&model, &c]() { return runStructureSuite(model, c); });
      const auto grid = c.params.empty() ? defaultParamGrid(model.rrs.type) : c.params;
      for (const HKParams& p : grid)
        jobs.push_back([&model, &c, p]() { return runHkSuite(model, p, c); });
      if (c.negativeControls)
        jobs.push_back([&model, &c]() { return runNegativeControls(model, c); });
    }

    std::vector<std::vector<CheckResult>> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t i = next++; i < jobs.size(); i = next++)
        results[i] = jobs[i]();
    };
    int threads = c.threads > 0 ? c.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i)
      pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
      th.join();

    Report r;
    r.seed = c.seed;
    for (const SpaceSpec& s : c.spaces)
      r.spaces.push_back(s.str());
    r.params = c.params;
    r.samples = c.samples;
    r.tol = c.tol;
    for (auto& part : results)
      for (auto& cr : part)
        r.checks.push_back(std::move(cr));
    auto key = [](const CheckResult& x) {
      return std::make_tuple(x.space, x.params ? x.params->str() : std::string(), x.checkId);
    };
    std::stable_sort(r.checks.begin(), r.checks.end(),
                     [&](const CheckResult& a, const CheckResult& b) { return key(a) < key(b); });
    return r;
  }

  // -------------------------------------------------------------- reports

  const std::map<std::string, std::string>& coverageManifest()
  {
    static const std::map<std::string, std::string> manifest = {
      {"structure.construction", "construction of the Hermitian pair"},
      {"structure.algebra_antisymmetry", "structure constants are antisymmetric"},
      {"structure.algebra_jacobi", "Jacobi identity"},
      {"structure.form_invariance", "ad-invariance of the form"},
      {"structure.form_positive", "positive definite invariant form"},
      {"structure.cartan_decomposition", "g = k + m with [k,m] in m and [m,m] in k"},
      {"structure.complex_structure_square", "I^2 = -1 on m"},
      {"structure.i_from_center", "I = exp((pi/2) ad Z0) on m"},
      {"structure.i_bracket_invariance", "[I xi, I eta] = [xi, eta] and I commutes with ad k"},
      {"structure.root_eigenvectors", "root vectors diagonalize ad t"},
      {"structure.root_triples", "root triples X, Y, T"},
      {"structure.root_complex_structure", "I X_a = Y_a, I Y_a = -X_a"},
      {"structure.root_action", "[T, xi_a] = -i a(T) I xi_a"},
      {"structure.noncompact_root_sums", "sums of positive noncompact roots are not roots"},
      {"structure.cascade_relations", "bracket relations of the cascade triples"},
      {"structure.strong_orthogonality", "maximal strongly orthogonal family of rank r"},
      {"structure.cartan_subspace", "a is maximal abelian in m"},
      {"structure.orthogonal_splitting", "orthogonal root space splittings of m and k"},
      {"structure.restricted_root_oracle", "restricted roots, multiplicities, type and lambda_I"},
      {"structure.restricted_root_pairing", "admissible (lambda, lambda_I) pairs"},
      {"structure.moore_snap", "rho takes half-integer values"},
      {"structure.moore_containment", "rho maps noncompact roots into the admissible image"},
      {"structure.moore_cascade", "rho(beta_j) = e_j"},
      {"structure.moore_root_spaces", "m_lambda is spanned by its root spaces"},
      {"structure.moore_k_action", "t acts on k_lambda through rho_k"},
      {"structure.squares_identity", "I ad([w, Iw]) = ad(w)^2 + ad(Iw)^2 on m"},
      {"structure.centralizer", "centralizer of k^a in m is a + I a"},
      {"structure.type", "restricted root type tag"},
      {"hk.domain_membership", "sampled points lie in the domain"},
      {"hk.upsilon_derivative", "Upsilon_* is the derivative of Upsilon"},
      {"hk.upsilon_cartan_eigenvalues", "eigenvalues of Upsilon_* on a and root spaces"},
      {"hk.upsilon_anticommutes_i", "Upsilon_* anticommutes with I for type C"},
      {"hk.upsilon_commutator_on_halved_roots", "Upsilon_* does not anticommute with I for type BC"},
      {"hk.qhat_cartan", "q_hat on a and its radial derivative"},
      {"hk.qhat_root_eigenvalues", "q_hat_* on m_lambda is lambda(q_hat(w)) / lambda(w)"},
      {"hk.qhat_splitting", "root space splitting diagonalizes q_hat_*"},
      {"hk.derivation_identity", "derivation identity for Upsilon and (a1 + a2 I) Upsilon"},
      {"hk.b_derivative", "b' = b^-1 (1 + c^2 x^-4) x"},
      {"hk.b_root_eigenvalues", "eigenvalues of B on root spaces"},
      {"hk.b_cartan_form", "B = I ad(T(w)) + eps sqrt|a0|"},
      {"hk.b_symmetric_commutes_i", "B is symmetric and commutes with I"},
      {"hk.p_symmetric", "P is symmetric"},
      {"hk.r_positive", "Re P is positive definite"},
      {"hk.r_commutes_i", "R commutes with I"},
      {"hk.s_anticommutes_i", "S anticommutes with I"},
      {"hk.r_s_commute", "R and S commute"},
      {"hk.s_over_r", "S R^-1 = (a1 + a2 I) Upsilon_*"},
      {"hk.s_vanishing", "S vanishes iff a1 = a2 = 0"},
      {"hk.r_preserves_root_spaces", "R preserves a and every m_lambda"},
      {"hk.equivariance", "K-equivariance of Upsilon_*, B, R, S"},
      {"hk.p_at_origin", "P_0 = sqrt(a0)"},
      {"hk.boundary", "R degenerates at the boundary of the domain"},
      {"hk.su2_closed_form", "closed form of R and S on su(2)/u(1)"},
      {"hk.j_square", "J(P)^2 = -1 and (J^-)^2 = -1"},
      {"hk.anticommutation", "J^- anticommutes with J(P)"},
      {"hk.omega_prime", "Omega' = Omega(J^- J ., .)"},
      {"hk.dtheta_prime", "d theta' = Omega'"},
      {"hk.isotropy", "F(P) is isotropic for Omega"},
      {"hk.isotropy_positive", "-i Omega(Z, conj Z) > 0"},
      {"hk.integrability", "integrability of J(P)"},
      {"hk.integrability_sign_variants", "integrability of J(-P) and J(conj P)"},
      {"hk.rsr_derivative", "derivative of R + S R^-1 S"},
      {"hk.sr_derivative_symmetry", "symmetry of the derivative of S R^-1"},
      {"hk.sr_bracket", "bracket identity for S R^-1"},
      {"hk.hypercomplex_pair", "J(P) and J(PI) anticommute for real P"},
      {"hk.hypercomplex_integrability", "integrability of J(PI)"},
      {"hk.potential_ode", "b(x) (x^2 q(x^2))' = x"},
      {"hk.potential_gradient", "gradient of Q is w'"},
      {"hk.potential_invariance", "Q is Ad K invariant"},
      {"hk.potential_theta", "2 Im dbar Q = theta"},
      {"hk.potential_type", "dbar Q vanishes on (0,1) directions and on fibres"},
      {"control.b_noise", "integrability detects noise in B"},
      {"control.b_noise.baseline", "integrability with zero noise"},
      {"control.s_perturbation", "anticommutation detects an I-commuting part of S"},
      {"control.s_perturbation.baseline", "anticommutation with zero perturbation"},
      {"control.eps_flip", "B eigenvalue check detects a flipped eps"},
      {"control.structure_constant", "Jacobi check detects a corrupted structure constant"},
      {"control.center_scale", "I check detects a rescaled Z0"},
    };
    return manifest;
  }

  std::vector<std::string> unmappedChecks(const Report& r)
  {
    std::vector<std::string> out;
    for (const auto& c : r.checks)
      if (!coverageManifest().count(c.checkId))
        out.push_back(c.checkId);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  namespace {

    nlohmann::json residualJson(double v)
    {
      if (std::isfinite(v))
        return v;
      return "inf";
    }

  }

  std::string reportJson(const Report& r, const std::string& timestamp)
  {
    using nlohmann::json;
    json j;
    j["version"] = "hksym-report/1";
    j["seed"] = r.seed;
    j["space"] = r.spaces;
    json params = json::array();
    for (const auto& p : r.params)
      params.push_back(p.str());
    j["params"] = params;
    j["samples"] = r.samples;
    j["tolerances"] = {{"algebraic", r.tol.algebraic},
                       {"finite_difference", r.tol.finiteDifference},
                       {"structural", r.tol.structural},
                       {"omega_prime", r.tol.omegaPrime}};
    json checks = json::array();
    for (const auto& c : r.checks) {
      json e;
      e["check_id"] = c.checkId;
      e["space"] = c.space;
      e["params"] = c.params ? json(c.params->str()) : json(nullptr);
      e["role"] = c.role == CheckRole::Check ? "check" : "control";
      e["samples"] = c.samples;
      e["max_residual"] = residualJson(c.maxResidual);
      e["threshold"] = c.threshold;
      e["passed"] = c.passed;
      e["ok"] = c.ok();
      json details = json::array();
      for (const auto& d : c.details)
        details.push_back({{"residual", residualJson(d.residual)}, {"sample", d.sample}});
      e["details"] = details;
      if (!c.note.empty())
        e["note"] = c.note;
      checks.push_back(e);
    }
    j["checks"] = checks;
    json manifest = json::object();
    for (const auto& [id, what] : coverageManifest())
      manifest[id] = what;
    j["coverage_manifest"] = manifest;
    j["summary"] = {{"checks", r.checks.size()},
                    {"failed_checks", r.failedChecks()},
                    {"controls_passed", r.controlsThatPassed()},
                    {"ok", r.ok()}};
    if (!timestamp.empty())
      j["timestamp"] = timestamp;
    return j.dump(2) + "\n";
  }

  std::string reportText(const Report& r)
  {
    std::ostringstream o;
    o << "seed " << r.seed << ", " << r.samples << " samples per check\n";
    o << std::left << std::setw(42) << "check" << std::setw(10) << "space" << std::setw(18) << "params"
      << std::right << std::setw(8) << "samples" << std::setw(13) << "max resid" << std::setw(11)
      << "threshold" << "  status\n";
    for (const auto& c : r.checks) {
      std::ostringstream res;
      res << std::setprecision(3) << std::scientific << c.maxResidual;
      std::ostringstream thr;
      thr << std::setprecision(1) << std::scientific << c.threshold;
      const char* status = c.role == CheckRole::Check ? (c.passed ? "pass" : "FAIL")
                                                      : (c.passed ? "CONTROL MISSED" : "control ok");
      o << std::left << std::setw(42) << c.checkId << std::setw(10) << c.space << std::setw(18)
        << (c.params ? c.params->str() : "-") << std::right << std::setw(8) << c.samples
        << std::setw(13) << res.str() << std::setw(11) << thr.str() << "  " << status << "\n";
      if (!c.ok())
        for (const auto& d : c.details)
          o << "    worst " << d.residual << " at " << d.sample << "\n";
    }
    o << r.checks.size() << " results, " << r.failedChecks() << " failed checks, "
      << r.controlsThatPassed() << " controls not triggered\n";
    return o.str();
  }

}
