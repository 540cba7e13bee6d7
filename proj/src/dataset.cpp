#include "plastokit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

namespace plastokit {

LoadingPath LoadingPath::training_default() {
  return {{{0.0125, 125}, {-0.0125, 250}, {0.0125, 250}, {-0.0125, 250}, {0.0125, 250}}};
}

LoadingPath LoadingPath::testing_default() {
  LoadingPath p = training_default();
  p.segments.push_back({-0.0125, 250});
  p.segments.push_back({0.0125, 250});
  return p;
}

LoadingPath LoadingPath::parse(const std::string& text) {
  static const std::regex pair_re(R"(\(\s*([-+0-9.eE]+)\s*,\s*([0-9]+)\s*\))");
  LoadingPath p;
  std::string rest;
  auto it = std::sregex_iterator(text.begin(), text.end(), pair_re);
  std::size_t consumed = 0;
  for (; it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    rest += text.substr(consumed, static_cast<std::size_t>(m.position()) - consumed);
    consumed = static_cast<std::size_t>(m.position() + m.length());
    try {
      std::size_t used = 0;
      const std::string num = m[1].str();
      const double t = std::stod(num, &used);
      if (used != num.size()) throw ParseError("bad loading target '" + num + "'");
      p.segments.push_back({t, std::stoi(m[2].str())});
    } catch (const std::logic_error&) {
      throw ParseError("bad loading segment '" + m.str() + "'");
    }
  }
  rest += text.substr(consumed);
  for (char ch : rest)
    if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '[' && ch != ']' && ch != ',')
      throw ParseError("unexpected text in loading path: " + text);
  p.validate();
  return p;
}

std::string LoadingPath::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i) os << ", ";
    os << '(' << segments[i].target << ", " << segments[i].increments << ')';
  }
  os << ']';
  return os.str();
}

void LoadingPath::validate() const {
  if (segments.empty()) throw InvalidArgument("loading path has no segments");
  for (const Segment& s : segments) {
    if (s.increments < 1) throw InvalidArgument("loading segment needs at least one increment");
    if (!std::isfinite(s.target)) throw InvalidArgument("loading target is not finite");
  }
}

int LoadingPath::num_increments() const {
  int n = 0;
  for (const Segment& s : segments) n += s.increments;
  return n;
}

std::vector<double> LoadingPath::targets() const {
  validate();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(num_increments()));
  double start = 0.0;
  for (const Segment& s : segments) {
    for (int i = 1; i <= s.increments; ++i) out.push_back(start + (s.target - start) * i / s.increments);
    start = s.target;
  }
  return out;
}

namespace {
int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }
}  // namespace

void UniaxialDataset::detect_branches() {
  branch_start.assign(1, 0);
  int dir = 0;
  for (int i = 1; i < size(); ++i) {
    const int s = sign_of(eps[static_cast<std::size_t>(i)] - eps[static_cast<std::size_t>(i) - 1]);
    if (s == 0) continue;
    if (dir != 0 && s != dir) branch_start.push_back(i - 1);
    dir = s;
  }
}

std::vector<int> branch_of_increments(const std::vector<double>& eps_path) {
  std::vector<int> out(eps_path.size(), 0);
  int branch = 0, dir = 0;
  double prev = 0.0;
  for (std::size_t i = 0; i < eps_path.size(); ++i) {
    const int s = sign_of(eps_path[i] - prev);
    if (s != 0) {
      if (dir != 0 && s != dir) ++branch;
      dir = s;
    }
    out[i] = branch;
    prev = eps_path[i];
  }
  return out;
}

UniaxialDataset load_dataset(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open dataset " + file);
  std::string line;
  if (!std::getline(in, line)) throw EmptyDataset("dataset " + file + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  int skip = 0;
  if (line == "step,eps11,sig11")
    skip = 1;
  else if (line != "eps11,sig11")
    throw ParseError("dataset " + file + ": expected header 'eps11,sig11', got '" + line + "'");

  UniaxialDataset d;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (static_cast<int>(fields.size()) != 2 + skip)
      throw ParseError("dataset " + file + " row " + std::to_string(row) + ": wrong field count");
    double v[2];
    for (int k = 0; k < 2; ++k) {
      const std::string& s = fields[static_cast<std::size_t>(k + skip)];
      char* end = nullptr;
      v[k] = std::strtod(s.c_str(), &end);
      if (s.empty() || end == s.c_str() || *end != '\0')
        throw ParseError("dataset " + file + " row " + std::to_string(row) + ": cannot parse '" + s + "'");
      if (!std::isfinite(v[k]))
        throw NonFiniteValue("dataset " + file + " row " + std::to_string(row) + ": non-finite value '" + s + "'");
    }
    d.eps.push_back(v[0]);
    d.sig.push_back(v[1]);
  }
  if (d.eps.empty()) throw EmptyDataset("dataset " + file + " has no rows");
  d.detect_branches();
  return d;
}

void write_dataset(const UniaxialDataset& d, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file);
  out.precision(17);
  out << "step,eps11,sig11\n";
  for (int i = 0; i < d.size(); ++i)
    out << i << ',' << d.eps[static_cast<std::size_t>(i)] << ',' << d.sig[static_cast<std::size_t>(i)] << '\n';
}

UniaxialDataset generate_uniaxial_dataset(const LoadingPath& path, const Material& material, double noise,
                                          std::uint64_t seed) {
  const std::vector<double> eps = path.targets();
  UniaxialDataset d;
  d.eps.reserve(eps.size() + 1);
  d.sig.reserve(eps.size() + 1);
  d.eps.push_back(0.0);
  d.sig.push_back(0.0);
  std::vector<double> s = material.initial_state();
  for (double e : eps) {
    MaterialUpdate u = material.uniaxial_step(s, e);
    d.eps.push_back(e);
    d.sig.push_back(u.sigma[0]);
    s = std::move(u.state);
  }
  if (noise > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, noise * material.sigma_y());
    for (std::size_t i = 1; i < d.sig.size(); ++i) d.sig[i] += g(rng);
  }
  d.detect_branches();
  return d;
}

std::vector<double> interpolate_targets(const UniaxialDataset& d, const std::vector<double>& eps_path) {
  if (d.size() == 0) throw EmptyDataset("dataset has no samples");
  const std::vector<int> br = branch_of_increments(eps_path);
  std::vector<double> out(eps_path.size());
  for (std::size_t n = 0; n < eps_path.size(); ++n) {
    const int b = br[n];
    if (b >= d.num_branches())
      throw PathOutsideData("increment " + std::to_string(n + 1) + " lies on branch " + std::to_string(b) +
                            " but the dataset has " + std::to_string(d.num_branches()));
    const int lo = d.branch_start[static_cast<std::size_t>(b)];
    const int hi = d.branch_end(b);
    const double e = eps_path[n];
    const double e_lo = d.eps[static_cast<std::size_t>(lo)], e_hi = d.eps[static_cast<std::size_t>(hi)];
    const double tol = 1e-12 * std::max({1e-3, std::abs(e_lo), std::abs(e_hi)});
    if (e < std::min(e_lo, e_hi) - tol || e > std::max(e_lo, e_hi) + tol)
      throw PathOutsideData("increment " + std::to_string(n + 1) + " at eps11 = " + std::to_string(e) +
                            " is outside the data on branch " + std::to_string(b));
    if (lo == hi) {
      out[n] = d.sig[static_cast<std::size_t>(lo)];
      continue;
    }
    const bool up = e_hi >= e_lo;
    // First sample along the branch that is at or past e.
    int j = lo + 1;
    while (j < hi && (up ? d.eps[static_cast<std::size_t>(j)] < e : d.eps[static_cast<std::size_t>(j)] > e)) ++j;
    int i = j - 1;
    const double e0 = d.eps[static_cast<std::size_t>(i)], e1 = d.eps[static_cast<std::size_t>(j)];
    const double t = e1 == e0 ? 1.0 : std::clamp((e - e0) / (e1 - e0), 0.0, 1.0);
    const double s0 = d.sig[static_cast<std::size_t>(i)], s1 = d.sig[static_cast<std::size_t>(j)];
    out[n] = t == 1.0 ? s1 : t == 0.0 ? s0 : s0 + t * (s1 - s0);
  }
  return out;
}

}  // namespace plastokit
