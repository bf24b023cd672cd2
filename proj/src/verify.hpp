#pragma once

#include "tensor_fields.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hksym {

  struct Tolerances {
    double algebraic = 1e-9;
    double finiteDifference = 1e-6;
    double structural = 1e-10;
    double omegaPrime = 1e-12;

    bool operator==(const Tolerances& o) const
    {
      return algebraic == o.algebraic && finiteDifference == o.finiteDifference
             && structural == o.structural && omegaPrime == o.omegaPrime;
    }
  };

  enum class CheckRole { Check, Control };

  struct SampleDetail {
    double residual = 0.0;
    std::string sample;
  };

  struct CheckResult {
    std::string checkId;
    std::string space;
    std::optional<HKParams> params;
    CheckRole role = CheckRole::Check;
    int samples = 0;
    double maxResidual = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::vector<SampleDetail> details;  // worst three, only when failed
    std::string note;

    /// Checks must pass; controls must fail.
    bool ok() const { return role == CheckRole::Check ? passed : !passed; }
  };

  /// Tracks the largest residuals of a check over its samples.
  class Tally {
  public:
    void add(double residual, const std::string& sample);
    void fail(const std::string& why);  // an exception during a sample

    int samples() const { return m_samples; }
    double max() const { return m_max; }
    CheckResult result(std::string id, const std::string& space,
                       const std::optional<HKParams>& params, double threshold) const;

  private:
    int m_samples = 0;
    double m_max = 0.0;
    std::vector<SampleDetail> m_worst;
  };

  /// Everything derived from a space spec once per campaign.
  struct SpaceModel {
    SpaceSpec spec;
    HermitianPair pair;
    RootDatum datum;
    RestrictedRootSystem rrs;

    static SpaceModel build(const SpaceSpec& spec);
  };

  /// Default parameter grid for a restricted root type.
  std::vector<HKParams> defaultParamGrid(RootSystemType type);

  struct Campaign {
    std::uint64_t seed = 0;
    std::vector<SpaceSpec> spaces;
    std::vector<HKParams> params;  // empty: the default grid of each space
    int samples = 100;
    Tolerances tol;
    bool negativeControls = true;
    int threads = 0;  // 0: hardware concurrency
  };

  /// Deterministic per-check generator from the campaign seed and a key.
  std::mt19937_64 checkRng(std::uint64_t seed, const std::string& key);

  /// Random point Ad_k(sum x_j X_j) with x_j^2 safely inside the domain.
  DomainPoint sampleDomainPoint(const SpaceModel& model, const HKParams& p, std::mt19937_64& rng);
  std::string describePoint(const DomainPoint& d);

  std::vector<CheckResult> runStructureSuite(const SpaceModel& model, const Campaign& c);
  std::vector<CheckResult> runHkSuite(const SpaceModel& model, const HKParams& p, const Campaign& c);
  std::vector<CheckResult> runNegativeControls(const SpaceModel& model, const Campaign& c);

  /// Independent root-table oracle: eigenvalues of -ad(w)^2 at a generic
  /// point of a matched against every admissible covector. Returns the
  /// number of disagreements with the computed restricted root system
  /// (labels, multiplicities, type, lambda -> lambda_I).
  int restrictedRootOracleMismatches(const SpaceModel& model, std::string* diagnostic = nullptr);

  struct Report {
    std::uint64_t seed = 0;
    std::vector<std::string> spaces;
    std::vector<HKParams> params;
    int samples = 0;
    Tolerances tol;
    std::vector<CheckResult> checks;  // sorted by (space, params, id)

    int failedChecks() const;
    int controlsThatPassed() const;
    bool ok() const { return failedChecks() == 0 && controlsThatPassed() == 0; }
  };

  /// Validates params against every space (InputError naming the violated
  /// constraint), then runs all suites on a work queue.
  Report runCampaign(const Campaign& c);

  /// check id (without space/params) -> what it certifies.
  const std::map<std::string, std::string>& coverageManifest();

  /// Ids in the report missing from the manifest.
  std::vector<std::string> unmappedChecks(const Report& r);

  std::string reportJson(const Report& r, const std::string& timestamp = "");
  std::string reportText(const Report& r);

}
