#include "rieszlab/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rieszlab/error.hpp"

namespace rieszlab {

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!keys.count(key)) throw ValidationError(std::string("unknown key '") + key + "' in " + what);
  }
}

const Json& require(const Json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ValidationError(std::string("missing key '") + key + "' in " + what);
  return j.at(key);
}

Vec parse_vec(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ValidationError(std::string(what) + " must be a non-empty array of numbers");
  Vec out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError(std::string(what) + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Component parse_component(const Json& j) {
  const std::string type = require(j, "type", "set").is_string() ? j.at("type").get<std::string>() : "";
  if (type == "segment") {
    reject_unknown(j, {"type", "a", "b"}, "segment");
    return Segment(parse_vec(require(j, "a", "segment"), "a"), parse_vec(require(j, "b", "segment"), "b"));
  }
  if (type == "ifs") {
    reject_unknown(j, {"type", "maps", "outer_ball"}, "ifs");
    const Json& maps_j = require(j, "maps", "ifs");
    if (!maps_j.is_array()) throw ValidationError("ifs maps must be an array");
    std::vector<Similitude> maps;
    for (const auto& m : maps_j) {
      reject_unknown(m, {"scale", "translation", "rotation"}, "map");
      const Json& sc = require(m, "scale", "map");
      if (!sc.is_number()) throw ValidationError("map scale must be a number");
      Vec t = parse_vec(require(m, "translation", "map"), "translation");
      Vec rot;
      if (m.contains("rotation")) {
        const Json& r = m.at("rotation");
        if (!r.is_array() || r.size() != t.size()) throw ValidationError("rotation must be a p x p nested array");
        for (const auto& rowj : r) {
          Vec rowv = parse_vec(rowj, "rotation row");
          if (rowv.size() != t.size()) throw ValidationError("rotation must be a p x p nested array");
          rot.insert(rot.end(), rowv.begin(), rowv.end());
        }
      }
      maps.emplace_back(sc.get<double>(), std::move(t), std::move(rot));
    }
    std::optional<Ball> ball;
    if (j.contains("outer_ball")) {
      const Json& b = j.at("outer_ball");
      reject_unknown(b, {"center", "radius"}, "outer_ball");
      const Json& r = require(b, "radius", "outer_ball");
      if (!r.is_number()) throw ValidationError("outer_ball radius must be a number");
      ball = Ball{parse_vec(require(b, "center", "outer_ball"), "center"), r.get<double>()};
    }
    return SelfSimilarSet::create(std::move(maps), std::move(ball));
  }
  throw ValidationError("set type must be 'ifs', 'segment' or 'union'");
}

Json vec_json(const Vec& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

}  // namespace

SetSpec preset_set(const std::string& name) {
  if (name == "example-union") return example_union();
  if (name == "example-a1") return example_fractal();
  if (name == "example-a2") return example_segment();
  throw ValidationError("unknown preset '" + name + "' (known: example-union, example-a1, example-a2)");
}

namespace {

// A union component may itself be given as a preset, as long as that preset
// is not a union.
Component union_part(const Json& j) {
  if (!(j.is_object() && j.contains("preset"))) return parse_component(j);
  SetSpec s = parse_set(j);
  if (auto* f = std::get_if<SelfSimilarSet>(&s)) return std::move(*f);
  if (auto* seg = std::get_if<Segment>(&s)) return std::move(*seg);
  throw ValidationError("a union component cannot itself be a union");
}

}  // namespace

SetSpec parse_set(const Json& j) {
  if (j.is_object() && j.contains("preset")) {
    reject_unknown(j, {"preset"}, "preset");
    if (!j.at("preset").is_string()) throw ValidationError("preset must be a string");
    return preset_set(j.at("preset").get<std::string>());
  }
  if (!j.is_object()) throw ValidationError("set definition must be a JSON object");
  if (j.contains("type") && j.at("type") == "union") {
    reject_unknown(j, {"type", "A1", "A2"}, "union");
    return validate_union(union_part(require(j, "A1", "union")), union_part(require(j, "A2", "union")));
  }
  Component c = parse_component(j);
  if (auto* f = std::get_if<SelfSimilarSet>(&c)) return std::move(*f);
  return std::get<Segment>(std::move(c));
}

Json to_json(const Component& set) {
  if (const auto* seg = std::get_if<Segment>(&set)) {
    return Json{{"type", "segment"}, {"a", vec_json(seg->a())}, {"b", vec_json(seg->b())}};
  }
  const auto& f = std::get<SelfSimilarSet>(set);
  Json maps = Json::array();
  for (const auto& m : f.maps()) {
    Json mj{{"scale", m.scale()}, {"translation", vec_json(m.translation())}};
    if (!m.rotation().empty()) {
      const std::size_t p = m.ambient_dim();
      Json rot = Json::array();
      for (std::size_t i = 0; i < p; ++i) {
        rot.push_back(vec_json(Vec(m.rotation().begin() + static_cast<std::ptrdiff_t>(i * p),
                                   m.rotation().begin() + static_cast<std::ptrdiff_t>((i + 1) * p))));
      }
      mj["rotation"] = rot;
    }
    maps.push_back(mj);
  }
  Json out{{"type", "ifs"}, {"maps", maps}};
  if (f.outer_ball_explicit()) {
    out["outer_ball"] = Json{{"center", vec_json(f.outer_ball().center)}, {"radius", f.outer_ball().radius}};
  }
  return out;
}

Json to_json(const SetSpec& set) {
  if (const auto* u = std::get_if<UnionSet>(&set)) {
    return Json{{"type", "union"}, {"A1", to_json(u->A1)}, {"A2", to_json(u->A2)}};
  }
  if (const auto* f = std::get_if<SelfSimilarSet>(&set)) return to_json(Component(*f));
  return to_json(Component(std::get<Segment>(set)));
}

Configuration parse_configuration(const Json& j) {
  reject_unknown(j, {"dim", "points"}, "configuration");
  const Json& dj = require(j, "dim", "configuration");
  if (!dj.is_number_unsigned()) throw ValidationError("configuration dim must be a non-negative integer");
  Configuration config(dj.get<std::size_t>());
  const Json& pts = require(j, "points", "configuration");
  if (!pts.is_array()) throw ValidationError("configuration points must be an array");
  for (const auto& p : pts) {
    reject_unknown(p, {"x", "host", "address", "t"}, "point");
    Vec x = parse_vec(require(p, "x", "point"), "x");
    const Json& hj = require(p, "host", "point");
    const std::string h = hj.is_string() ? hj.get<std::string>() : "";
    Host host;
    if (h == "whole") host = Host::Whole;
    else if (h == "A1") host = Host::A1;
    else if (h == "A2") host = Host::A2;
    else throw ValidationError("point host must be 'whole', 'A1' or 'A2'");
    if (p.contains("address") == p.contains("t")) throw ValidationError("point needs exactly one of 'address' or 't'");
    if (p.contains("address")) {
      FractalAddress addr;
      for (const auto& s : p.at("address")) {
        if (!s.is_number_unsigned() || s.get<unsigned>() > 254) throw ValidationError("address symbols must be small non-negative integers");
        addr.word.push_back(static_cast<std::uint8_t>(s.get<unsigned>()));
      }
      config.push_back(x, host, std::move(addr));
    } else {
      if (!p.at("t").is_number()) throw ValidationError("segment parameter t must be a number");
      config.push_back(x, host, p.at("t").get<double>());
    }
  }
  return config;
}

Json to_json(const Configuration& config) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < config.size(); ++i) {
    auto x = config.point(i);
    Json p{{"x", Json(Vec(x.begin(), x.end()))}, {"host", to_string(config.host(i))}};
    if (const auto* addr = std::get_if<FractalAddress>(&config.intrinsic(i))) {
      Json w = Json::array();
      for (auto s : addr->word) w.push_back(static_cast<unsigned>(s));
      p["address"] = w;
    } else {
      p["t"] = std::get<double>(config.intrinsic(i));
    }
    pts.push_back(std::move(p));
  }
  return Json{{"dim", config.dim()}, {"points", std::move(pts)}};
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::string set_hash(const SetSpec& set) { return hex64(fnv1a(to_json(set).dump())); }
std::string set_hash(const Component& set) { return hex64(fnv1a(to_json(set).dump())); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path + "': " + ec.message());
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace rieszlab
