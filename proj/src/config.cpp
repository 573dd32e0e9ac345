#include "mpslearn/config.hpp"

#include "mpslearn/errors.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mpslearn {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw Error(ErrorCode::ParseError, "bad value for " + key + ": '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorCode::ParseError, "bad boolean for " + key + ": '" + value + "'");
}

template <typename F>
auto parse_enum(const std::string& key, const std::string& value, F&& parse) {
  try {
    return parse(value);
  } catch (const Error&) {
    throw Error(ErrorCode::ParseError, "bad value for " + key + ": '" + value + "'");
  }
}

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"n", [](RunConfig& c, const std::string& k, const std::string& v) { c.state.n = parse_number<int>(k, v); }},
      {"d", [](RunConfig& c, const std::string& k, const std::string& v) { c.state.d = parse_number<int>(k, v); }},
      {"D",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.state.D = parse_number<int>(k, v);
         c.learn.D = c.state.D;
       }},
      {"boundary",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.state.boundary = parse_enum(k, v, parse_boundary); }},
      {"kind",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.state.kind = parse_enum(k, v, parse_state_kind); }},
      {"state_seed",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.state.seed = parse_number<std::uint64_t>(k, v); }},
      {"input", [](RunConfig& c, const std::string&, const std::string& v) { c.input = v; }},
      {"mixture", [](RunConfig& c, const std::string& k, const std::string& v) { c.mixture = parse_number<double>(k, v); }},
      {"variant",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.learn.variant = parse_enum(k, v, parse_variant); }},
      {"epsilon",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.learn.epsilon = parse_number<double>(k, v); }},
      {"delta", [](RunConfig& c, const std::string& k, const std::string& v) { c.learn.delta = parse_number<double>(k, v); }},
      {"p", [](RunConfig& c, const std::string& k, const std::string& v) { c.learn.p_override = parse_number<int>(k, v); }},
      {"theta", [](RunConfig& c, const std::string& k, const std::string& v) { c.learn.theta = parse_number<double>(k, v); }},
      {"audit", [](RunConfig& c, const std::string& k, const std::string& v) { c.learn.audit = parse_bool(k, v); }},
      {"seed",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.learn.seed = parse_number<std::uint64_t>(k, v); }},
      {"constant",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.learn.constant = parse_number<double>(k, v); }},
      {"mode",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle.kind = parse_enum(k, v, parse_oracle_kind); }},
      {"eta", [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle.eta = parse_number<double>(k, v); }},
      {"copies",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle.copies = parse_number<std::uint64_t>(k, v); }},
      {"oracle_seed",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle.seed = parse_number<std::uint64_t>(k, v); }},
      {"project_psd",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle.project_psd = parse_bool(k, v); }},
      {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; }},
  };
  return table;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  config.learn.D = config.state.D;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (value.empty()) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty value");
    it->second(config, key, value);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return parse_config(in);
}

std::string canonical_text(const RunConfig& c) {
  std::ostringstream out;
  out << "n = " << c.state.n << "\nd = " << c.state.d << "\nD = " << c.learn.D << '\n';
  out << "boundary = " << to_string(c.state.boundary) << "\nkind = " << to_string(c.state.kind) << '\n';
  out << "state_seed = " << c.state.seed << "\ninput = " << c.input << "\nmixture = " << fmt(c.mixture) << '\n';
  out << "variant = " << to_string(c.learn.variant) << "\nepsilon = " << fmt(c.learn.epsilon)
      << "\ndelta = " << fmt(c.learn.delta) << '\n';
  out << "p = " << (c.learn.p_override ? std::to_string(*c.learn.p_override) : "auto") << '\n';
  out << "theta = " << (c.learn.theta ? fmt(*c.learn.theta) : "none") << '\n';
  out << "audit = " << (c.learn.audit ? "true" : "false") << "\nseed = " << c.learn.seed
      << "\nconstant = " << fmt(c.learn.constant) << '\n';
  out << "mode = " << to_string(c.oracle.kind) << "\neta = " << (c.oracle.eta ? fmt(*c.oracle.eta) : "auto")
      << "\ncopies = " << c.oracle.copies << "\noracle_seed = " << c.oracle.seed
      << "\nproject_psd = " << (c.oracle.project_psd ? "true" : "false") << '\n';
  return out.str();
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace mpslearn
