#include "mpslearn/circuit_io.hpp"

#include "mpslearn/errors.hpp"
#include "text_io.hpp"

#include <fstream>

namespace mpslearn {

namespace {

using detail::expect_token;
using detail::fmt_real;
using detail::read_value;

constexpr int kFormatVersion = 1;

void write_optional(std::ostream& out, const char* key, const std::optional<double>& value) {
  out << key << ' ' << (value ? fmt_real(*value) : std::string("none")) << '\n';
}

std::optional<double> read_optional(std::istream& in, const char* key) {
  expect_token(in, key);
  const auto token = read_value<std::string>(in, key);
  if (token == "none") return std::nullopt;
  try {
    return std::stod(token);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, std::string("bad value for ") + key);
  }
}

template <typename T>
T read_field(std::istream& in, const char* key) {
  expect_token(in, key);
  return read_value<T>(in, key);
}

}  // namespace

void write_circuit(std::ostream& out, const CircuitDescription& c) {
  validate(c);
  const auto& m = c.meta;
  out << "mpslearn-circuit " << kFormatVersion << '\n';
  out << "n " << c.n << "\nd " << c.d << "\np " << c.p << "\ntrivial " << (c.trivial ? 1 : 0) << '\n';
  out << "variant " << to_string(m.variant) << '\n';
  out << "oracle " << to_string(m.oracle.kind) << '\n';
  write_optional(out, "oracle_eta", m.oracle.eta);
  out << "oracle_copies " << m.oracle.copies << "\noracle_seed " << m.oracle.seed << '\n';
  out << "oracle_psd " << (m.oracle.project_psd ? 1 : 0) << '\n';
  out << "seed " << m.seed << "\nD " << m.D << '\n';
  out << "epsilon " << fmt_real(m.epsilon) << "\nepsilon_used " << fmt_real(m.epsilon_used) << '\n';
  out << "delta " << fmt_real(m.delta) << "\neta " << fmt_real(m.eta) << "\ntau " << fmt_real(m.tau) << '\n';
  write_optional(out, "theta", m.theta);
  out << "deviations " << m.deviations.size() << '\n';
  for (const auto& dev : m.deviations) out << "deviation " << dev << '\n';
  out << "layers " << c.depth() << '\n';
  for (int j = 1; j <= c.depth(); ++j) {
    const auto& layer = c.plan.layers[static_cast<std::size_t>(j - 1)];
    out << "layer " << j << ' ' << layer.size() << '\n';
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const auto& block = layer[i];
      out << "block " << i + 1 << " acted " << (block.acted ? 1 : 0) << " projected " << block.projected
          << " support " << block.support.size();
      for (int s : block.support) out << ' ' << s;
      out << '\n';
      const auto& u = c.unitaries[static_cast<std::size_t>(j - 1)][i];
      out << "unitary " << u.rows() << ' ' << u.cols() << '\n';
      detail::write_matrix(out, u);
    }
  }
  out << "residual " << c.residual_sites.size();
  for (int s : c.residual_sites) out << ' ' << s;
  out << '\n';
  detail::write_matrix(out, c.residual);
  out << "end\n";
}

CircuitDescription read_circuit(std::istream& in) {
  expect_token(in, "mpslearn-circuit");
  const int version = read_value<int>(in, "format version");
  if (version != kFormatVersion) {
    throw Error(ErrorCode::ParseError, "unsupported circuit format version " + std::to_string(version));
  }
  CircuitDescription c;
  auto& m = c.meta;
  c.n = read_field<int>(in, "n");
  c.d = read_field<int>(in, "d");
  c.p = read_field<int>(in, "p");
  c.trivial = read_field<int>(in, "trivial") != 0;
  if (c.n < 1 || c.n > 64 || c.d < 2 || c.d > 64 || c.p < 1 || c.p > 64) {
    throw Error(ErrorCode::ParseError, "implausible circuit header");
  }
  try {
    m.variant = parse_variant(read_field<std::string>(in, "variant"));
    m.oracle.kind = parse_oracle_kind(read_field<std::string>(in, "oracle"));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  m.oracle.eta = read_optional(in, "oracle_eta");
  m.oracle.copies = read_field<std::uint64_t>(in, "oracle_copies");
  m.oracle.seed = read_field<std::uint64_t>(in, "oracle_seed");
  m.oracle.project_psd = read_field<int>(in, "oracle_psd") != 0;
  m.seed = read_field<std::uint64_t>(in, "seed");
  m.D = read_field<int>(in, "D");
  m.epsilon = read_field<double>(in, "epsilon");
  m.epsilon_used = read_field<double>(in, "epsilon_used");
  m.delta = read_field<double>(in, "delta");
  m.eta = read_field<double>(in, "eta");
  m.tau = read_field<double>(in, "tau");
  m.theta = read_optional(in, "theta");
  const auto deviations = read_field<std::size_t>(in, "deviations");
  if (deviations > 1000) throw Error(ErrorCode::ParseError, "too many deviations");
  for (std::size_t k = 0; k < deviations; ++k) {
    expect_token(in, "deviation");
    std::string text;
    std::getline(in >> std::ws, text);
    m.deviations.push_back(text);
  }

  const int layers = read_field<int>(in, "layers");
  if (c.trivial != (layers == 0)) throw Error(ErrorCode::MalformedCircuit, "layer count contradicts the trivial flag");
  if (!c.trivial) {
    try {
      c.plan = plan_layers(c.n, c.d, c.p);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedCircuit, std::string("plan cannot be rebuilt: ") + e.what());
    }
    if (layers != c.plan.M) throw Error(ErrorCode::MalformedCircuit, "layer count does not match the plan");
  }
  for (int j = 1; j <= layers; ++j) {
    expect_token(in, "layer");
    if (read_value<int>(in, "layer index") != j) throw Error(ErrorCode::ParseError, "layers out of order");
    const auto blocks = read_value<std::size_t>(in, "block count");
    auto& layer = c.plan.layers[static_cast<std::size_t>(j - 1)];
    if (blocks != layer.size()) throw Error(ErrorCode::MalformedCircuit, "block count does not match the plan");
    auto& unitaries = c.unitaries.emplace_back();
    for (std::size_t i = 0; i < blocks; ++i) {
      expect_token(in, "block");
      if (read_value<std::size_t>(in, "block index") != i + 1) throw Error(ErrorCode::ParseError, "blocks out of order");
      PlanBlock stored;
      stored.acted = read_field<int>(in, "acted") != 0;
      stored.projected = read_field<int>(in, "projected");
      const auto size = read_field<std::size_t>(in, "support");
      if (size > 128) throw Error(ErrorCode::ParseError, "support too large");
      for (std::size_t k = 0; k < size; ++k) stored.support.push_back(read_value<int>(in, "support site"));
      if (stored.support != layer[i].support || stored.projected != layer[i].projected ||
          stored.acted != layer[i].acted) {
        throw Error(ErrorCode::MalformedCircuit, "block " + std::to_string(i + 1) + " of layer " + std::to_string(j) +
                                                     " does not match the plan");
      }
      expect_token(in, "unitary");
      const auto rows = read_value<Index>(in, "rows");
      const auto cols = read_value<Index>(in, "cols");
      if (rows < 0 || cols < 0 || rows > 4096 || cols > 4096) throw Error(ErrorCode::ParseError, "bad unitary shape");
      unitaries.push_back(detail::read_matrix(in, rows, cols));
    }
  }
  const auto residual_count = read_field<std::size_t>(in, "residual");
  if (residual_count > 64) throw Error(ErrorCode::ParseError, "residual too large");
  for (std::size_t k = 0; k < residual_count; ++k) c.residual_sites.push_back(read_value<int>(in, "residual site"));
  const auto length = static_cast<Index>(ipow(static_cast<std::uint64_t>(c.d), static_cast<unsigned>(residual_count)));
  if (length > (Index{1} << 20)) throw Error(ErrorCode::ParseError, "residual too large");
  c.residual = detail::read_matrix(in, length, 1);
  expect_token(in, "end");
  validate(c);
  return c;
}

void save_circuit(const std::string& path, const CircuitDescription& circuit) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  write_circuit(out, circuit);
}

CircuitDescription load_circuit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return read_circuit(in);
}

}  // namespace mpslearn
