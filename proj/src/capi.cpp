#include "hksym/hksym.h"

#include "errors.hpp"
#include "verify.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>

struct hksym_space {
  hksym::SpaceModel model;
};

struct hksym_campaign {
  hksym::Campaign campaign;
};

struct hksym_report {
  hksym::Report report;
};

namespace {

  thread_local std::string lastError;

  hksym_status fail(hksym_status s, const std::string& what)
  {
    lastError = what;
    return s;
  }

  template <typename Fn>
  hksym_status guarded(Fn&& fn)
  {
    try {
      fn();
      lastError.clear();
      return HKSYM_OK;
    } catch (const hksym::InputError& e) {
      return fail(HKSYM_ERR_INPUT, e.what());
    } catch (const hksym::DomainError& e) {
      std::ostringstream o;
      o << e.what() << " (at " << e.offendingValue() << ")";
      return fail(HKSYM_ERR_DOMAIN, o.str());
    } catch (const hksym::SingularPointError& e) {
      return fail(HKSYM_ERR_SINGULAR, e.what());
    } catch (const hksym::ConstructionError& e) {
      return fail(HKSYM_ERR_CONSTRUCTION, e.what());
    } catch (const hksym::MooreViolation& e) {
      return fail(HKSYM_ERR_CONSTRUCTION, e.what());
    } catch (const std::bad_alloc&) {
      return fail(HKSYM_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
      return fail(HKSYM_ERR_INTERNAL, e.what());
    }
  }

  hksym_status nullArgument(const char* name)
  {
    return fail(HKSYM_ERR_ARGUMENT, std::string("null argument: ") + name);
  }

  char* dup(const std::string& s)
  {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
      throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
  }

  hksym::HKParams toCore(const hksym_params& p)
  {
    return {p.a0, p.a1, p.a2, p.eps};
  }

  hksym_params fromCore(const hksym::HKParams& p)
  {
    return {p.a0, p.a1, p.a2, p.eps};
  }

  nlohmann::json matrixJson(const hksym::Mat& m)
  {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < m.cols(); ++j)
        row.push_back(m(i, j));
      rows.push_back(row);
    }
    return rows;
  }

  nlohmann::json vectorJson(const hksym::Vec& v)
  {
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i)
      out.push_back(v(i));
    return out;
  }

  std::string partnerLabel(const hksym::RestrictedRootSystem& rrs, const hksym::RestrictedRoot& r)
  {
    return r.partner < 0 ? "0" : rrs.sigmaPlus[r.partner].label();
  }

  std::string rootsJson(const hksym::SpaceModel& m)
  {
    const auto& rrs = m.rrs;
    nlohmann::json j;
    j["space"] = m.spec.str();
    j["description"] = m.spec.describe();
    j["type"] = hksym::typeName(rrs.type, rrs.rank());
    j["rank"] = rrs.rank();
    j["dim_g"] = m.pair.dim();
    j["dim_k"] = m.pair.dimK();
    j["dim_m"] = m.pair.dimM();
    j["dim_k_centralizer"] = rrs.kCentralizer.cols();
    nlohmann::json roots = nlohmann::json::array();
    for (const auto& r : rrs.sigmaPlus)
      roots.push_back({{"label", r.label()},
                       {"c", vectorJson(r.c)},
                       {"multiplicity", r.multiplicity()},
                       {"partner", partnerLabel(rrs, r)}});
    j["roots"] = roots;
    return j.dump(2) + "\n";
  }

  std::string rootsText(const hksym::SpaceModel& m)
  {
    const auto& rrs = m.rrs;
    std::ostringstream o;
    o << m.spec.describe() << "  type " << hksym::typeName(rrs.type, rrs.rank()) << "  rank "
      << rrs.rank() << "  dim m " << m.pair.dimM() << "\n";
    o << std::left;
    o.width(18);
    o << "root";
    o << "mult  lambda_I\n";
    for (const auto& r : rrs.sigmaPlus) {
      o.width(18);
      o << r.label();
      o.width(6);
      o << r.multiplicity() << partnerLabel(rrs, r) << "\n";
    }
    return o.str();
  }

}

extern "C" {

const char* hksym_version(void)
{
  return "0.1.0";
}

const char* hksym_last_error(void)
{
  return lastError.c_str();
}

const char* hksym_status_name(hksym_status s)
{
  switch (s) {
  case HKSYM_OK: return "ok";
  case HKSYM_ERR_ARGUMENT: return "argument";
  case HKSYM_ERR_INPUT: return "input";
  case HKSYM_ERR_DOMAIN: return "domain";
  case HKSYM_ERR_SINGULAR: return "singular";
  case HKSYM_ERR_CONSTRUCTION: return "construction";
  case HKSYM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void hksym_string_free(char* s)
{
  std::free(s);
}

hksym_status hksym_params_parse(const char* text, hksym_params* out)
{
  if (!text)
    return nullArgument("text");
  if (!out)
    return nullArgument("out");
  return guarded([&] { *out = fromCore(hksym::HKParams::parse(text)); });
}

hksym_status hksym_params_format(const hksym_params* p, char** out)
{
  if (!p)
    return nullArgument("p");
  if (!out)
    return nullArgument("out");
  return guarded([&] { *out = dup(toCore(*p).str()); });
}

hksym_status hksym_space_create(const char* spec, hksym_space** out)
{
  if (!spec)
    return nullArgument("spec");
  if (!out)
    return nullArgument("out");
  *out = nullptr;
  return guarded([&] { *out = new hksym_space{hksym::SpaceModel::build(hksym::SpaceSpec::parse(spec))}; });
}

void hksym_space_destroy(hksym_space* s)
{
  delete s;
}

hksym_status hksym_space_name(const hksym_space* s, char** out)
{
  if (!s)
    return nullArgument("s");
  if (!out)
    return nullArgument("out");
  return guarded([&] { *out = dup(s->model.spec.describe()); });
}

hksym_status hksym_space_rank(const hksym_space* s, int* out)
{
  if (!s)
    return nullArgument("s");
  if (!out)
    return nullArgument("out");
  *out = s->model.rrs.rank();
  return HKSYM_OK;
}

hksym_status hksym_space_dim_m(const hksym_space* s, int* out)
{
  if (!s)
    return nullArgument("s");
  if (!out)
    return nullArgument("out");
  *out = s->model.pair.dimM();
  return HKSYM_OK;
}

hksym_status hksym_space_check_params(const hksym_space* s, const hksym_params* p)
{
  if (!s)
    return nullArgument("s");
  if (!p)
    return nullArgument("p");
  return guarded([&] { hksym::validateParams(toCore(*p), s->model.rrs.type); });
}

hksym_status hksym_space_roots(const hksym_space* s, int text, char** out)
{
  if (!s)
    return nullArgument("s");
  if (!out)
    return nullArgument("out");
  return guarded([&] { *out = dup(text ? rootsText(s->model) : rootsJson(s->model)); });
}

hksym_status hksym_space_eval(const hksym_space* s, const hksym_params* p, const double* x, size_t n,
                              uint64_t seed, int no_k, int text, char** out)
{
  if (!s)
    return nullArgument("s");
  if (!p)
    return nullArgument("p");
  if (!x && n)
    return nullArgument("x");
  if (!out)
    return nullArgument("out");
  return guarded([&] {
    const hksym::SpaceModel& m = s->model;
    const hksym::HKParams hp = toCore(*p);
    hksym::validateParams(hp, m.rrs.type);
    if (static_cast<int>(n) != m.rrs.rank())
      throw hksym::InputError("x must have " + std::to_string(m.rrs.rank()) + " entries (the rank)");
    const hksym::Vec xv = Eigen::Map<const hksym::Vec>(x, static_cast<Eigen::Index>(n));
    std::vector<hksym::Vec> word;
    if (!no_k) {
      auto rng = hksym::checkRng(seed, "eval");
      std::normal_distribution<double> nd(0.0, 0.7);
      hksym::Vec z(m.pair.dimK());
      for (int i = 0; i < z.size(); ++i)
        z(i) = nd(rng);
      word.push_back(z);
    }
    const hksym::DomainPoint d = hksym::makeDomainPoint(m.pair, m.rrs, xv, word);
    if (!d.inDomain(hp))
      throw hksym::DomainError("x is outside the domain: need x_j^2 > " + std::to_string(hp.aDagger()),
                               xv.cwiseAbs2().minCoeff());
    const hksym::POp op = hksym::pOp(m.pair, d.w, hp);
    const hksym::Mat u = hksym::upsilonStar(m.pair, d.w);
    if (text) {
      std::ostringstream o;
      const Eigen::IOFormat fmt(6, 0, " ", "\n", "  ", "");
      o << m.spec.describe() << "  params " << hp.str() << "\n";
      o << "x = " << xv.transpose().format(fmt) << "\nw = " << d.w.transpose().format(fmt) << "\n";
      o << "B_w =\n" << op.B.format(fmt) << "\nUpsilon_* =\n" << u.format(fmt) << "\n";
      o << "Re P_w =\n" << op.R.format(fmt) << "\nIm P_w =\n" << op.S.format(fmt) << "\n";
      *out = dup(o.str());
      return;
    }
    nlohmann::json j;
    j["space"] = m.spec.str();
    j["params"] = hp.str();
    j["seed"] = seed;
    j["x"] = vectorJson(xv);
    j["k_word"] = nlohmann::json::array();
    for (const auto& z : d.kWord)
      j["k_word"].push_back(vectorJson(z));
    j["w"] = vectorJson(d.w);
    j["B"] = matrixJson(op.B);
    j["upsilon_star"] = matrixJson(u);
    j["P_real"] = matrixJson(op.R);
    j["P_imag"] = matrixJson(op.S);
    *out = dup(j.dump(2) + "\n");
  });
}

hksym_status hksym_campaign_create(hksym_campaign** out)
{
  if (!out)
    return nullArgument("out");
  return guarded([&] { *out = new hksym_campaign{}; });
}

void hksym_campaign_destroy(hksym_campaign* c)
{
  delete c;
}

hksym_status hksym_campaign_add_space(hksym_campaign* c, const char* spec)
{
  if (!c)
    return nullArgument("c");
  if (!spec)
    return nullArgument("spec");
  return guarded([&] { c->campaign.spaces.push_back(hksym::SpaceSpec::parse(spec)); });
}

hksym_status hksym_campaign_add_params(hksym_campaign* c, const hksym_params* p)
{
  if (!c)
    return nullArgument("c");
  if (!p)
    return nullArgument("p");
  return guarded([&] {
    const hksym::HKParams hp = toCore(*p);
    if (hp.eps != 1 && hp.eps != -1)
      throw hksym::InputError("eps must be +1 or -1");
    c->campaign.params.push_back(hp);
  });
}

hksym_status hksym_campaign_set_seed(hksym_campaign* c, uint64_t seed)
{
  if (!c)
    return nullArgument("c");
  c->campaign.seed = seed;
  return HKSYM_OK;
}

hksym_status hksym_campaign_set_samples(hksym_campaign* c, int samples)
{
  if (!c)
    return nullArgument("c");
  if (samples < 1)
    return fail(HKSYM_ERR_INPUT, "samples must be positive");
  c->campaign.samples = samples;
  return HKSYM_OK;
}

hksym_status hksym_campaign_set_tolerances(hksym_campaign* c, double algebraic, double finite_difference)
{
  if (!c)
    return nullArgument("c");
  if (algebraic > 0)
    c->campaign.tol.algebraic = algebraic;
  if (finite_difference > 0)
    c->campaign.tol.finiteDifference = finite_difference;
  return HKSYM_OK;
}

hksym_status hksym_campaign_set_threads(hksym_campaign* c, int threads)
{
  if (!c)
    return nullArgument("c");
  c->campaign.threads = threads < 0 ? 0 : threads;
  return HKSYM_OK;
}

hksym_status hksym_campaign_run(const hksym_campaign* c, hksym_report** out)
{
  if (!c)
    return nullArgument("c");
  if (!out)
    return nullArgument("out");
  *out = nullptr;
  return guarded([&] { *out = new hksym_report{hksym::runCampaign(c->campaign)}; });
}

void hksym_report_destroy(hksym_report* r)
{
  delete r;
}

hksym_status hksym_report_json(const hksym_report* r, const char* timestamp, char** out)
{
  if (!r)
    return nullArgument("r");
  if (!out)
    return nullArgument("out");
  return guarded([&] { *out = dup(hksym::reportJson(r->report, timestamp ? timestamp : "")); });
}

hksym_status hksym_report_text(const hksym_report* r, char** out)
{
  if (!r)
    return nullArgument("r");
  if (!out)
    return nullArgument("out");
  return guarded([&] { *out = dup(hksym::reportText(r->report)); });
}

hksym_status hksym_report_counts(const hksym_report* r, int* checks, int* failed_checks, int* controls_passed)
{
  if (!r)
    return nullArgument("r");
  if (checks)
    *checks = static_cast<int>(r->report.checks.size());
  if (failed_checks)
    *failed_checks = r->report.failedChecks();
  if (controls_passed)
    *controls_passed = r->report.controlsThatPassed();
  return HKSYM_OK;
}

int hksym_report_ok(const hksym_report* r)
{
  return r && !r->report.checks.empty() && r->report.ok() ? 1 : 0;
}

}
