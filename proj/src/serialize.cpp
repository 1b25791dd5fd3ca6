#include "waylab/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace waylab {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw StructuralError(std::string("json: expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw StructuralError(std::string("json: missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("json: field '") + key + "': " + e.what());
  }
}

// NaN and infinities are written as null.
double number_or_nan(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw StructuralError("json: expected a number");
  return j.get<double>();
}

Json sequence_to_json(const Sequence& s) {
  return {{"first", s.first}, {"values", std::vector<double>(s.values.data(), s.values.data() + s.values.size())}};
}

Sequence sequence_from_json(const Json& j) {
  Sequence s;
  s.first = get<int>(j, "first");
  const auto v = get<std::vector<double>>(j, "values");
  s.values = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line != "\r") out.push_back(line);
  return out;
}

}  // namespace

Json graded_to_json(const GradedVector& v) {
  Json sectors = Json::array();
  for (const auto& [nu, b] : v.sectors()) {
    Json amp = Json::array();
    for (Eigen::Index i = 0; i < b.size(); ++i) amp.push_back({b(i).real(), b(i).imag()});
    sectors.push_back({{"nu", nu}, {"amp", std::move(amp)}});
  }
  return {{"d", v.dim()}, {"sectors", std::move(sectors)}};
}

GradedVector graded_from_json(const Json& j) {
  GradedVector v(get<int>(j, "d"));
  const Json& sectors = field(j, "sectors");
  if (!sectors.is_array()) throw StructuralError("json: 'sectors' must be an array");
  for (const Json& s : sectors) {
    const int nu = get<int>(s, "nu");
    const Json& amp = field(s, "amp");
    if (!amp.is_array() || static_cast<int>(amp.size()) != v.dim())
      throw StructuralError("json: sector " + std::to_string(nu) + " must hold " + std::to_string(v.dim()) +
                            " amplitudes");
    VectorXc b(v.dim());
    for (int i = 0; i < v.dim(); ++i) {
      const Json& p = amp[static_cast<std::size_t>(i)];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw StructuralError("json: amplitudes in sector " + std::to_string(nu) + " must be [re, im] pairs");
      b(i) = Complex(p[0].get<double>(), p[1].get<double>());
    }
    if (v.contains(nu)) throw StructuralError("json: duplicate sector " + std::to_string(nu));
    v.set(nu, std::move(b));
  }
  return v;
}

Json scheme_to_json(const ApproxScheme& s) {
  return {{"n", s.n},
          {"d", s.d},
          {"c", s.c},
          {"cprime", s.cprime},
          {"xi", graded_to_json(s.xi)},
          {"sigma", graded_to_json(s.sigma)},
          {"tau", graded_to_json(s.tau)},
          {"rho", graded_to_json(s.rho)}};
}

ApproxScheme scheme_from_json(const Json& j) {
  ApproxScheme s;
  s.n = get<int>(j, "n");
  s.d = get<int>(j, "d");
  s.c = number_or_nan(field(j, "c"));
  s.cprime = number_or_nan(field(j, "cprime"));
  s.xi = graded_from_json(field(j, "xi"));
  s.sigma = graded_from_json(field(j, "sigma"));
  s.tau = graded_from_json(field(j, "tau"));
  s.rho = graded_from_json(field(j, "rho"));
  s.check_structure();
  return s;
}

Json exact_data_to_json(const ExactSchemeData& d) {
  return {{"n", d.n},
          {"x", sequence_to_json(d.x)},
          {"s", sequence_to_json(d.s)},
          {"t", sequence_to_json(d.t)},
          {"a", sequence_to_json(d.a)},
          {"b", sequence_to_json(d.b)}};
}

ExactSchemeData exact_data_from_json(const Json& j) {
  ExactSchemeData d;
  d.n = get<int>(j, "n");
  d.x = sequence_from_json(field(j, "x"));
  d.s = sequence_from_json(field(j, "s"));
  d.t = sequence_from_json(field(j, "t"));
  d.a = sequence_from_json(field(j, "a"));
  d.b = sequence_from_json(field(j, "b"));
  d.check_windows();
  return d;
}

Json certificate_to_json(const InfeasibilityCertificate& c) {
  return {{"n", c.n},
          {"min_violation", c.min_violation},
          {"minimizer", exact_data_to_json(c.minimizer)},
          {"witness", c.witness},
          {"pinned_minimizer", exact_data_to_json(c.pinned_minimizer)},
          {"pinned_violation", c.pinned_violation},
          {"best_start", c.best_start}};
}

InfeasibilityCertificate certificate_from_json(const Json& j) {
  InfeasibilityCertificate c;
  c.n = get<int>(j, "n");
  c.min_violation = number_or_nan(field(j, "min_violation"));
  c.minimizer = exact_data_from_json(field(j, "minimizer"));
  c.witness = get<std::vector<std::string>>(j, "witness");
  if (j.contains("pinned_minimizer")) c.pinned_minimizer = exact_data_from_json(j["pinned_minimizer"]);
  if (j.contains("pinned_violation")) c.pinned_violation = number_or_nan(j["pinned_violation"]);
  if (j.contains("best_start")) c.best_start = get<int>(j, "best_start");
  return c;
}

Json verdict_to_json(const CaseVerdict& v) {
  Json viol = Json::array();
  for (const SupportViolation& sv : v.violations) viol.push_back({sv.nu, sv.mu});
  return {{"kind", to_string(v.kind)},
          {"finite_components", v.finite_components},
          {"cross_condition_residual", v.cross_condition_residual},
          {"violations", std::move(viol)},
          {"note", v.note}};
}

CaseVerdict verdict_from_json(const Json& j) {
  CaseVerdict v;
  v.kind = case_kind_from_string(get<std::string>(j, "kind"));
  v.finite_components = get<std::vector<std::string>>(j, "finite_components");
  v.cross_condition_residual = number_or_nan(field(j, "cross_condition_residual"));
  for (const auto& p : get<std::vector<std::vector<int>>>(j, "violations")) {
    if (p.size() != 2) throw StructuralError("json: violations must be [nu, mu] pairs");
    v.violations.push_back({p[0], p[1]});
  }
  if (j.contains("note")) v.note = get<std::string>(j, "note");
  return v;
}

Json distribution_to_json(const OutcomeDistribution& d) {
  Json outs = Json::array();
  for (const Outcome& o : d.outcomes)
    outs.push_back({{"label", o.label}, {"probability", o.probability}, {"post_state", graded_to_json(o.post_state)}});
  return {{"outcomes", std::move(outs)}};
}

OutcomeDistribution distribution_from_json(const Json& j) {
  OutcomeDistribution d;
  const Json& outs = field(j, "outcomes");
  if (!outs.is_array()) throw StructuralError("json: 'outcomes' must be an array");
  for (const Json& o : outs)
    d.outcomes.push_back({get<std::string>(o, "label"), number_or_nan(field(o, "probability")),
                          graded_from_json(field(o, "post_state"))});
  return d;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw StructuralError("not a number: '" + s + "'");
  return v;
}

std::string sweep_to_csv(const SweepTable& t) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const SweepRow& r : t.rows) {
    out += std::to_string(r.n) + "," + format_double(r.error_wigner) + "," + format_double(r.error_optimized) + "," +
           format_double(r.constraint_residual) + "," + std::to_string(r.iters) + "\n";
  }
  return out;
}

SweepTable sweep_from_csv(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty() || lines.front() != kSweepCsvHeader) throw StructuralError("sweep csv: bad header");
  SweepTable t;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != 5) throw StructuralError("sweep csv: line " + std::to_string(i + 1) + " needs 5 fields");
    SweepRow r;
    r.n = static_cast<int>(parse_double(cells[0]));
    r.error_wigner = parse_double(cells[1]);
    r.error_optimized = parse_double(cells[2]);
    r.constraint_residual = parse_double(cells[3]);
    r.iters = static_cast<int>(parse_double(cells[4]));
    if (std::isnan(r.error_optimized)) r.annotation = "failed";
    t.rows.push_back(std::move(r));
  }
  return t;
}

std::string counts_to_csv(const std::vector<OutcomeCount>& counts) {
  std::string out = "label,count,probability\n";
  for (const OutcomeCount& c : counts)
    out += c.label + "," + std::to_string(c.count) + "," + format_double(c.probability) + "\n";
  return out;
}

std::vector<OutcomeCount> counts_from_csv(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty() || lines.front() != "label,count,probability") throw StructuralError("counts csv: bad header");
  std::vector<OutcomeCount> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != 3) throw StructuralError("counts csv: line " + std::to_string(i + 1) + " needs 3 fields");
    std::uint64_t count = 0;
    const auto res = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), count);
    if (res.ec != std::errc() || res.ptr != cells[1].data() + cells[1].size())
      throw StructuralError("counts csv: bad count '" + cells[1] + "'");
    out.push_back({cells[0], count, parse_double(cells[2])});
  }
  return out;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place at " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace waylab
