#pragma once

#include "hksym/hksym.h"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hksym_cli {

  class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  enum class Format { text, json };

  /// Mirrors the command line flags; the optional JSON config file uses the
  /// same fields.
  struct Config {
    std::vector<std::string> spaces;
    std::vector<hksym_params> params;
    std::uint64_t seed = 0;
    int samples = 100;
    double tolAlgebraic = 1e-9;
    double tolFiniteDifference = 1e-6;
    Format format = Format::text;
    std::string out;  // empty: stdout

    bool operator==(const Config& o) const;
  };

  Format parseFormat(const std::string& s);
  std::string formatName(Format f);

  hksym_params parseParams(const std::string& text);
  std::string renderParams(const hksym_params& p);

  /// Throws ConfigError on malformed JSON, unknown keys or wrong types.
  Config parseConfig(const std::string& json);
  std::string renderConfig(const Config& c);

}
