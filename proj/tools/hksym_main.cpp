#include "config.hpp"

#include "hksym/hksym.h"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

  using namespace hksym_cli;

  enum Exit { ok = 0, checkFailure = 1, configError = 2, ioError = 3 };

  struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  // A C API call that failed; status decides the exit code.
  struct ApiError : std::runtime_error {
    hksym_status status;
    ApiError(hksym_status s, const std::string& what)
      : std::runtime_error(what), status(s) {}
  };

  void call(hksym_status s)
  {
    if (s != HKSYM_OK)
      throw ApiError(s, std::string(hksym_status_name(s)) + " error: " + hksym_last_error());
  }

  std::string take(char* s)
  {
    std::unique_ptr<char, decltype(&hksym_string_free)> owned(s, hksym_string_free);
    return s ? std::string(s) : std::string();
  }

  using Space = std::unique_ptr<hksym_space, decltype(&hksym_space_destroy)>;

  Space openSpace(const std::string& spec)
  {
    hksym_space* s = nullptr;
    call(hksym_space_create(spec.c_str(), &s));
    return Space(s, hksym_space_destroy);
  }

  std::string readFile(const std::string& path)
  {
    std::ifstream in(path);
    if (!in)
      throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void emit(const std::string& text, const std::string& path)
  {
    if (path.empty()) {
      std::cout << text << std::flush;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush())
      throw IoError("cannot write " + path);
  }

  std::string utcTimestamp()
  {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  std::vector<double> parseReals(const std::string& text)
  {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size())
        throw ConfigError("--x expects comma-separated reals, got '" + text + "'");
      out.push_back(v);
    }
    if (out.empty())
      throw ConfigError("--x must not be empty");
    return out;
  }

  struct Flags {
    std::vector<std::string> spaces;
    std::vector<std::string> params;
    std::uint64_t seed = 0;
    int samples = 100;
    double tolAlg = 0;
    double tolFd = 0;
    std::string format = "text";
    std::string out;
    std::string config;
    int threads = 0;
    bool noTimestamp = false;
    std::string x;
    bool noK = false;
  };

  // Config file first, explicitly given flags override it.
  Config resolve(const CLI::App& cmd, const Flags& f)
  {
    Config c;
    if (!f.config.empty())
      c = parseConfig(readFile(f.config));
    auto given = [&](const char* name) {
      const CLI::Option* o = cmd.get_option_no_throw(name);
      return o && o->count() > 0;
    };
    if (given("--space"))
      c.spaces = f.spaces;
    if (given("--params")) {
      c.params.clear();
      for (const auto& p : f.params)
        c.params.push_back(parseParams(p));
    }
    if (given("--seed"))
      c.seed = f.seed;
    if (given("--samples"))
      c.samples = f.samples;
    if (given("--tol-alg"))
      c.tolAlgebraic = f.tolAlg;
    if (given("--tol-fd"))
      c.tolFiniteDifference = f.tolFd;
    if (given("--format"))
      c.format = parseFormat(f.format);
    if (given("--out"))
      c.out = f.out;
    if (c.spaces.empty())
      throw ConfigError("at least one --space is required");
    if (c.samples < 1)
      throw ConfigError("--samples must be positive");
    if (!(c.tolAlgebraic > 0) || !(c.tolFiniteDifference > 0))
      throw ConfigError("tolerances must be positive");
    return c;
  }

  int runVerify(const Config& c, const Flags& f)
  {
    hksym_campaign* raw = nullptr;
    call(hksym_campaign_create(&raw));
    std::unique_ptr<hksym_campaign, decltype(&hksym_campaign_destroy)> camp(raw, hksym_campaign_destroy);
    for (const auto& s : c.spaces)
      call(hksym_campaign_add_space(raw, s.c_str()));
    for (const auto& p : c.params)
      call(hksym_campaign_add_params(raw, &p));
    call(hksym_campaign_set_seed(raw, c.seed));
    call(hksym_campaign_set_samples(raw, c.samples));
    call(hksym_campaign_set_tolerances(raw, c.tolAlgebraic, c.tolFiniteDifference));
    call(hksym_campaign_set_threads(raw, f.threads));
    hksym_report* rep = nullptr;
    call(hksym_campaign_run(raw, &rep));
    std::unique_ptr<hksym_report, decltype(&hksym_report_destroy)> report(rep, hksym_report_destroy);
    char* s = nullptr;
    if (c.format == Format::json)
      call(hksym_report_json(rep, f.noTimestamp ? "" : utcTimestamp().c_str(), &s));
    else
      call(hksym_report_text(rep, &s));
    emit(take(s), c.out);
    if (!hksym_report_ok(rep)) {
      int checks = 0, failed = 0, controls = 0;
      hksym_report_counts(rep, &checks, &failed, &controls);
      std::cerr << "hksym: " << failed << " checks failed, " << controls
                << " negative controls were not detected\n";
      return checkFailure;
    }
    return ok;
  }

  int runRoots(const Config& c)
  {
    std::string all;
    if (c.format == Format::json)
      all += "[\n";
    for (std::size_t i = 0; i < c.spaces.size(); ++i) {
      const Space s = openSpace(c.spaces[i]);
      char* out = nullptr;
      call(hksym_space_roots(s.get(), c.format == Format::text, &out));
      std::string part = take(out);
      if (c.format == Format::json) {
        part.pop_back();
        all += part + (i + 1 < c.spaces.size() ? ",\n" : "\n");
      } else {
        all += (i ? "\n" : "") + part;
      }
    }
    if (c.format == Format::json)
      all += "]\n";
    emit(all, c.out);
    return ok;
  }

  int runEval(const Config& c, const Flags& f)
  {
    if (c.spaces.size() != 1)
      throw ConfigError("eval takes exactly one --space");
    if (c.params.size() > 1)
      throw ConfigError("eval takes at most one --params");
    if (f.x.empty())
      throw ConfigError("eval needs --x x1,...,xr");
    const hksym_params p = c.params.empty() ? hksym_params{1, 0, 0, 1} : c.params[0];
    const std::vector<double> x = parseReals(f.x);
    const Space s = openSpace(c.spaces[0]);
    char* out = nullptr;
    call(hksym_space_eval(s.get(), &p, x.data(), x.size(), c.seed, f.noK ? 1 : 0, c.format == Format::text,
                          &out));
    emit(take(out), c.out);
    return ok;
  }

  void addCommon(CLI::App* cmd, Flags& f, bool campaign)
  {
    cmd->add_option("--space", f.spaces, "space spec: su:p,q  sp:n  so*:n  soB:n (repeatable)");
    cmd->add_option("--format", f.format, "text or json");
    cmd->add_option("--out", f.out, "output path (default stdout)");
    cmd->add_option("--config", f.config, "JSON config mirroring the flags");
    if (!campaign)
      return;
    cmd->add_option("--params", f.params, "a0,a1,a2,+-1 (repeatable)");
    cmd->add_option("--seed", f.seed, "64-bit seed (default 0)");
  }

}

int main(int argc, char** argv)
{
  CLI::App app{"Numerical verification of hyperkaehler structures on Hermitian symmetric spaces"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* verify = app.add_subcommand("verify", "run structure, hk and negative control suites");
  addCommon(verify, f, true);
  verify->add_option("--samples", f.samples, "samples per check (default 100)");
  verify->add_option("--tol-alg", f.tolAlg, "algebraic tolerance (default 1e-9)");
  verify->add_option("--tol-fd", f.tolFd, "finite difference tolerance (default 1e-6)");
  verify->add_option("--threads", f.threads, "worker threads (default: all cores)");
  verify->add_flag("--no-timestamp", f.noTimestamp, "omit the timestamp from JSON reports");

  CLI::App* roots = app.add_subcommand("roots", "print the restricted root table");
  addCommon(roots, f, false);

  CLI::App* eval = app.add_subcommand("eval", "print B_w, Upsilon_* and P_w at a point");
  addCommon(eval, f, true);
  eval->add_option("--x", f.x, "Cartan coordinates x1,...,xr");
  eval->add_flag("--no-k", f.noK, "evaluate on the Cartan subspace (k = 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : configError;
  }

  try {
    if (verify->parsed())
      return runVerify(resolve(*verify, f), f);
    if (roots->parsed())
      return runRoots(resolve(*roots, f));
    return runEval(resolve(*eval, f), f);
  } catch (const ConfigError& e) {
    std::cerr << "hksym: " << e.what() << "\n";
    return configError;
  } catch (const IoError& e) {
    std::cerr << "hksym: " << e.what() << "\n";
    return ioError;
  } catch (const ApiError& e) {
    std::cerr << "hksym: " << e.what() << "\n";
    const bool input = e.status == HKSYM_ERR_INPUT || e.status == HKSYM_ERR_DOMAIN
                       || e.status == HKSYM_ERR_ARGUMENT;
    return input ? configError : checkFailure;
  }
}
