#include "rieszlab/trace_io.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include "rieszlab/asymptotics.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/io.hpp"

namespace rieszlab {

namespace {

constexpr const char* kHeader = "N,E_best,G,N1,N2,frac1,min_dist,status";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("trace: bad number '" + s + "'");
  return v;
}

std::size_t to_size(const std::string& s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("trace: bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string format_trace_csv(const AsymptoticTrace& trace) {
  std::ostringstream out;
  out << "# rieszlab-trace schema_version=" << kTraceSchemaVersion << "\n";
  out << "# kind=" << (trace.is_union ? "union" : "single") << "\n";
  out << "# set_hash=" << trace.set_id << "\n";
  if (trace.is_union) {
    out << "# a1_hash=" << trace.a1_id << "\n";
    out << "# a2_hash=" << trace.a2_id << "\n";
  }
  out << "# s=" << format_double(trace.s) << "\n";
  out << "# d=" << format_double(trace.d) << "\n";
  out << kHeader << "\n";
  for (const auto& r : trace.records) {
    out << r.N << ',' << format_double(r.E_best) << ',' << format_double(r.G) << ',' << r.N1 << ',' << r.N2 << ','
        << format_double(r.frac1) << ',' << format_double(r.min_dist) << ',' << r.status << "\n";
  }
  return out.str();
}

AsymptoticTrace parse_trace_csv(const std::string& text) {
  AsymptoticTrace trace;
  std::istringstream in(text);
  std::string line;
  bool saw_version = false, saw_header = false, saw_s = false, saw_d = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(line.find_first_not_of("# "));
      if (body.rfind("rieszlab-trace", 0) == 0) {
        const auto pos = body.find("schema_version=");
        if (pos == std::string::npos) throw ValidationError("trace: missing schema_version");
        const int v = static_cast<int>(to_size(body.substr(pos + 15)));
        if (v != kTraceSchemaVersion) {
          throw ValidationError("trace: unsupported schema_version " + std::to_string(v));
        }
        saw_version = true;
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq), value = body.substr(eq + 1);
      if (key == "kind") {
        if (value != "union" && value != "single") throw ValidationError("trace: bad kind '" + value + "'");
        trace.is_union = value == "union";
      } else if (key == "set_hash") {
        trace.set_id = value;
      } else if (key == "a1_hash") {
        trace.a1_id = value;
      } else if (key == "a2_hash") {
        trace.a2_id = value;
      } else if (key == "s") {
        trace.s = to_double(value);
        saw_s = true;
      } else if (key == "d") {
        trace.d = to_double(value);
        saw_d = true;
      }
      continue;
    }
    if (!saw_header) {
      if (line != kHeader) throw ValidationError("trace: unexpected column header '" + line + "'");
      saw_header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 8) throw ValidationError("trace: expected 8 columns in '" + line + "'");
    TraceRecord r;
    r.N = to_size(f[0]);
    r.E_best = to_double(f[1]);
    r.G = to_double(f[2]);
    r.N1 = to_size(f[3]);
    r.N2 = to_size(f[4]);
    r.frac1 = to_double(f[5]);
    r.min_dist = to_double(f[6]);
    r.status = f[7];
    trace.records.push_back(std::move(r));
  }
  if (!saw_version) throw ValidationError("trace: missing '# rieszlab-trace schema_version=' line");
  if (!saw_header || !saw_s || !saw_d || trace.set_id.empty()) throw ValidationError("trace: incomplete metadata");
  check_trace(trace);
  return trace;
}

void write_trace_csv(const std::string& path, const AsymptoticTrace& trace) {
  write_file_atomic(path, format_trace_csv(trace));
}

AsymptoticTrace read_trace_csv(const std::string& path) { return parse_trace_csv(read_file(path)); }

}  // namespace rieszlab
