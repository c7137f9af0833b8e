#include "bmo/trace.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "bmo/errors.hpp"

namespace bmo {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

const char* kind_name(RowKind k) { return k == RowKind::warmup ? "warmup" : "play"; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Comma-separated fields with RFC 4180 double-quote handling.
std::vector<std::string> split_csv(const std::string& s, std::size_t line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quoted) {
      if (c == '"' && i + 1 < s.size() && s[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw MalformedTrace("line " + std::to_string(line) + ": unterminated quote");
  return out;
}

std::string quoted_cube(const DyadicCube& q) { return '"' + q.to_string() + '"'; }

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw MalformedTrace("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

std::int64_t parse_int(const std::string& s, std::size_t line) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw MalformedTrace("line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "# algo=" << trace.algo << "\n# dim=" << trace.dim << "\n";
  for (const auto& [k, v] : trace.provenance) {
    if (k == "algo" || k == "dim") continue;
    out << "# " << k << "=" << v << "\n";
  }
  out << "kind,t,cube,arm,y,n_cubes,min_cube_measure\n";
  for (const auto& r : trace.rows) {
    out << kind_name(r.kind) << ',' << r.t << ',' << quoted_cube(r.cube) << ',';
    for (std::size_t i = 0; i < r.arm.dim(); ++i) {
      if (i) out << ';';
      out << format_double(r.arm[i]);
    }
    out << ',' << format_double(r.y) << ',' << r.n_cubes << ',' << format_double(r.min_cube_measure)
        << '\n';
  }
  for (const auto& q : trace.final_cubes) out << "final,," << quoted_cube(q) << ",,,,\n";
}

RunTrace read_trace_csv(std::istream& in) {
  RunTrace trace;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      trace.provenance[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (!header_seen) {
      if (line != "kind,t,cube,arm,y,n_cubes,min_cube_measure") {
        throw MalformedTrace("line " + std::to_string(lineno) + ": unexpected header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const auto cols = split_csv(line, lineno);
    if (cols.size() != 7) {
      throw MalformedTrace("line " + std::to_string(lineno) + ": expected 7 columns, got " +
                           std::to_string(cols.size()));
    }
    DyadicCube cube = DyadicCube::root(1);
    try {
      cube = DyadicCube::parse(cols[2]);
    } catch (const std::invalid_argument& e) {
      throw MalformedTrace("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (cols[0] == "final") {
      trace.final_cubes.push_back(std::move(cube));
      continue;
    }
    TraceRow r;
    if (cols[0] == "warmup") {
      r.kind = RowKind::warmup;
    } else if (cols[0] != "play") {
      throw MalformedTrace("line " + std::to_string(lineno) + ": unknown row kind '" + cols[0] + "'");
    }
    r.t = parse_int(cols[1], lineno);
    r.cube = std::move(cube);
    std::vector<double> arm;
    for (const auto& c : split(cols[3], ';')) arm.push_back(parse_double(c, lineno));
    r.arm = Point(std::move(arm));
    if (r.arm.dim() != r.cube.dim()) {
      throw MalformedTrace("line " + std::to_string(lineno) + ": arm/cube dimension mismatch");
    }
    r.y = parse_double(cols[4], lineno);
    r.n_cubes = static_cast<std::size_t>(parse_int(cols[5], lineno));
    r.min_cube_measure = parse_double(cols[6], lineno);
    trace.rows.push_back(std::move(r));
  }
  if (!header_seen) throw MalformedTrace("trace has no header row");
  if (auto it = trace.provenance.find("algo"); it != trace.provenance.end()) trace.algo = it->second;
  if (auto it = trace.provenance.find("dim"); it != trace.provenance.end()) {
    trace.dim = static_cast<std::size_t>(parse_int(it->second, 0));
  } else if (!trace.rows.empty()) {
    trace.dim = trace.rows.front().cube.dim();
  }
  trace.provenance.erase("algo");
  trace.provenance.erase("dim");
  return trace;
}

}  // namespace bmo
