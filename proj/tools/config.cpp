#include "config.hpp"

#include <json.hpp>

#include <memory>

namespace hksym_cli {

  namespace {

    bool sameParams(const hksym_params& a, const hksym_params& b)
    {
      return a.a0 == b.a0 && a.a1 == b.a1 && a.a2 == b.a2 && a.eps == b.eps;
    }

    template <typename T>
    T field(const nlohmann::json& j, const char* key)
    {
      try {
        return j.at(key).get<T>();
      } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
      }
    }

  }

  bool Config::operator==(const Config& o) const
  {
    if (params.size() != o.params.size())
      return false;
    for (std::size_t i = 0; i < params.size(); ++i)
      if (!sameParams(params[i], o.params[i]))
        return false;
    return spaces == o.spaces && seed == o.seed && samples == o.samples && tolAlgebraic == o.tolAlgebraic
           && tolFiniteDifference == o.tolFiniteDifference && format == o.format && out == o.out;
  }

  Format parseFormat(const std::string& s)
  {
    if (s == "text")
      return Format::text;
    if (s == "json")
      return Format::json;
    throw ConfigError("format must be text or json, got '" + s + "'");
  }

  std::string formatName(Format f)
  {
    return f == Format::json ? "json" : "text";
  }

  hksym_params parseParams(const std::string& text)
  {
    hksym_params p{};
    if (hksym_params_parse(text.c_str(), &p) != HKSYM_OK)
      throw ConfigError(hksym_last_error());
    return p;
  }

  std::string renderParams(const hksym_params& p)
  {
    char* s = nullptr;
    if (hksym_params_format(&p, &s) != HKSYM_OK)
      throw ConfigError(hksym_last_error());
    std::unique_ptr<char, decltype(&hksym_string_free)> owned(s, hksym_string_free);
    return s;
  }

  Config parseConfig(const std::string& text)
  {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
      throw ConfigError("config must be a JSON object");
    Config c;
    for (const auto& [key, value] : j.items()) {
      if (key == "spaces")
        c.spaces = field<std::vector<std::string>>(j, "spaces");
      else if (key == "params") {
        for (const auto& s : field<std::vector<std::string>>(j, "params"))
          c.params.push_back(parseParams(s));
      } else if (key == "seed") {
        if (!value.is_number_unsigned())
          throw ConfigError("config field 'seed' must be a non-negative integer");
        c.seed = field<std::uint64_t>(j, "seed");
      }
      else if (key == "samples")
        c.samples = field<int>(j, "samples");
      else if (key == "tolerances") {
        const auto& t = value;
        if (!t.is_object())
          throw ConfigError("config field 'tolerances' must be an object");
        for (const auto& [tk, tv] : t.items()) {
          if (tk == "algebraic")
            c.tolAlgebraic = field<double>(t, "algebraic");
          else if (tk == "finite_difference")
            c.tolFiniteDifference = field<double>(t, "finite_difference");
          else
            throw ConfigError("unknown tolerance '" + tk + "'");
        }
      } else if (key == "format")
        c.format = parseFormat(field<std::string>(j, "format"));
      else if (key == "out")
        c.out = field<std::string>(j, "out");
      else
        throw ConfigError("unknown config field '" + key + "'");
    }
    return c;
  }

  std::string renderConfig(const Config& c)
  {
    nlohmann::json j;
    j["spaces"] = c.spaces;
    j["params"] = nlohmann::json::array();
    for (const auto& p : c.params)
      j["params"].push_back(renderParams(p));
    j["seed"] = c.seed;
    j["samples"] = c.samples;
    j["tolerances"] = {{"algebraic", c.tolAlgebraic}, {"finite_difference", c.tolFiniteDifference}};
    j["format"] = formatName(c.format);
    j["out"] = c.out;
    return j.dump(2) + "\n";
  }

}
