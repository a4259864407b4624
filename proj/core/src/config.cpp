#include "holderbt/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace holderbt {
namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 6> kAlgorithmNames = {{
    {Algorithm::kHolderKnown, "holder_known"},
    {Algorithm::kBacktrackHolder, "backtrack_holder"},
    {Algorithm::kNonmonotoneHolder, "nonmonotone_holder"},
    {Algorithm::kNonmonotoneArmijo, "nonmonotone_armijo"},
    {Algorithm::kHeuristicMinmax, "heuristic_minmax"},
    {Algorithm::kConstant, "constant"},
}};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ParameterError("setting '" + std::string(key) + "' expects a number, got '" +
                         std::string(value) + "'");
  return out;
}

template <class Int>
Int to_int(std::string_view key, std::string_view value) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ParameterError("setting '" + std::string(key) + "' expects an integer, got '" +
                         std::string(value) + "'");
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParameterError("setting '" + std::string(key) + "' expects true/false");
}

Vector to_vector(std::string_view key, std::string_view value) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::string_view item =
        trim(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start));
    parts.push_back(to_real(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return Eigen::Map<const Vector>(parts.data(), static_cast<Index>(parts.size()));
}

template <class T>
std::string num(T value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ec == std::errc() ? ptr - buf.data() : 0);
}

}  // namespace

std::string_view to_string(Algorithm algo) {
  for (const auto& [a, name] : kAlgorithmNames)
    if (a == algo) return name;
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (const auto& [a, n] : kAlgorithmNames)
    if (n == name) return a;
  throw ParameterError("unknown algorithm '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (id.empty()) throw ParameterError("config id must not be empty");
  if (id.find_first_of("/\\") != std::string::npos)
    throw ParameterError("config id must not contain path separators");
  stop.validate();
  if (sample_size < 1) throw ParameterError("sample_size must be positive");
  if (epsilon && !(*epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (gamma && !(*gamma > 0.0)) throw ParameterError("gamma must be positive");
  switch (algorithm) {
    case Algorithm::kConstant:
    case Algorithm::kHolderKnown:
      break;
    case Algorithm::kNonmonotoneHolder:
    case Algorithm::kNonmonotoneArmijo:
      if (!params.delta_plus)
        throw ParameterError("algorithm " + std::string(to_string(algorithm)) +
                             " requires delta_plus");
      [[fallthrough]];
    case Algorithm::kBacktrackHolder:
    case Algorithm::kHeuristicMinmax: {
      BacktrackParams p = params;
      p.gamma = base_gamma();
      p.validate();
      if (algorithm == Algorithm::kHeuristicMinmax) inner.validate();
      break;
    }
  }
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "id") c.id = std::string(value);
  else if (key == "problem") c.problem_id = std::string(value);
  else if (key == "algorithm" || key == "algo") c.algorithm = parse_algorithm(value);
  else if (key == "gamma") c.gamma = to_real(key, value);
  else if (key == "alpha") c.params.alpha = to_real(key, value);
  else if (key == "delta") c.params.delta = to_real(key, value);
  else if (key == "rho") c.params.rho = to_real(key, value);
  else if (key == "delta_plus") c.params.delta_plus = to_real(key, value);
  else if (key == "k_max") c.params.k_max = to_int<int>(key, value);
  else if (key == "grad_tol") c.stop.grad_tol = to_real(key, value);
  else if (key == "max_iters") c.stop.max_iters = to_int<std::int64_t>(key, value);
  else if (key == "max_oracle_calls") c.stop.max_oracle_calls = to_int<std::uint64_t>(key, value);
  else if (key == "seed") c.seed = to_int<std::uint64_t>(key, value);
  else if (key == "sample_size" || key == "N") c.sample_size = to_int<int>(key, value);
  else if (key == "epsilon") {
    if (value == "auto") c.epsilon.reset();
    else c.epsilon = to_real(key, value);
  }
  else if (key == "sinkhorn_tol") c.sinkhorn_tol = to_real(key, value);
  else if (key == "max_sweeps") c.max_sweeps = to_int<int>(key, value);
  else if (key == "inner_steps") c.inner.steps = to_int<int>(key, value);
  else if (key == "inner_step_size") c.inner.step_size = to_real(key, value);
  else if (key == "warm_start") c.inner.warm_start = to_bool(key, value);
  else if (key == "x0") c.x0 = to_vector(key, value);
  else throw ParameterError("unknown setting '" + std::string(key) + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ParameterError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    try {
      apply_setting(base, trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const ParameterError& e) {
      throw ParameterError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file " + path.string());
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << "id = " << c.id << '\n';
  out << "problem = " << c.problem_id << '\n';
  out << "algorithm = " << to_string(c.algorithm) << '\n';
  if (c.gamma) out << "gamma = " << num(*c.gamma) << '\n';
  out << "alpha = " << num(c.params.alpha) << '\n';
  out << "delta = " << num(c.params.delta) << '\n';
  out << "rho = " << num(c.params.rho) << '\n';
  if (c.params.delta_plus) out << "delta_plus = " << num(*c.params.delta_plus) << '\n';
  out << "k_max = " << c.params.k_max << '\n';
  out << "grad_tol = " << num(c.stop.grad_tol) << '\n';
  out << "max_iters = " << c.stop.max_iters << '\n';
  out << "max_oracle_calls = " << c.stop.max_oracle_calls << '\n';
  out << "seed = " << c.seed << '\n';
  out << "sample_size = " << c.sample_size << '\n';
  out << "epsilon = " << (c.epsilon ? num(*c.epsilon) : std::string("auto")) << '\n';
  out << "sinkhorn_tol = " << num(c.sinkhorn_tol) << '\n';
  out << "max_sweeps = " << c.max_sweeps << '\n';
  out << "inner_steps = " << c.inner.steps << '\n';
  out << "inner_step_size = " << num(c.inner.step_size) << '\n';
  out << "warm_start = " << (c.inner.warm_start ? "true" : "false") << '\n';
  if (c.x0) {
    out << "x0 = ";
    for (Index i = 0; i < c.x0->size(); ++i) out << (i ? "," : "") << num((*c.x0)[i]);
    out << '\n';
  }
}

}  // namespace holderbt
