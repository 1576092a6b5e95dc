#include "llrp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace llrp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Strips '#' comments, returns trimmed payload.
std::string strip_comment(const std::string& line) {
  std::size_t h = line.find('#');
  return trim(h == std::string::npos ? line : line.substr(0, h));
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

InstanceFormat format_from_string(const std::string& s) {
  if (s == "canonical") return InstanceFormat::canonical;
  if (s == "tuzun") return InstanceFormat::tuzun;
  if (s == "prodhon") return InstanceFormat::prodhon;
  if (s == "barreto") return InstanceFormat::barreto;
  throw ParseError("unknown instance format '" + s + "'");
}

const char* format_to_string(InstanceFormat f) {
  switch (f) {
    case InstanceFormat::canonical: return "canonical";
    case InstanceFormat::tuzun: return "tuzun";
    case InstanceFormat::prodhon: return "prodhon";
    case InstanceFormat::barreto: return "barreto";
  }
  return "?";
}

double Instance::total_demand() const {
  return std::accumulate(demands.begin(), demands.end(), 0.0);
}

bool Instance::is_near(int a, int b) const {
  if (!is_depot(a)) {
    const auto& la = neighbor_lists_[a];
    if (std::find(la.begin(), la.end(), b) != la.end()) return true;
  }
  if (!is_depot(b)) {
    const auto& lb = neighbor_lists_[b];
    if (std::find(lb.begin(), lb.end(), a) != lb.end()) return true;
  }
  return false;
}

int Instance::vertex_from_orig(int orig_id) const {
  for (int v = 0; v < n_vertices(); ++v)
    if (orig_ids[v] == orig_id) return v;
  throw ValidationError("unknown original vertex id " + std::to_string(orig_id));
}

std::vector<std::vector<int>> build_neighbor_lists(const Instance& inst, int delta_nearest) {
  if (delta_nearest < 1) throw ValidationError("delta must be >= 1");
  const int n = inst.n_vertices();
  const int k = std::min(delta_nearest, n - 1);
  std::vector<std::vector<int>> lists(n);
  std::vector<int> order(n);
  for (int c = inst.n_depots; c < n; ++c) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double da = inst.dist(c, a), db = inst.dist(c, b);
      if (da != db) return da < db;
      return a < b;
    });
    auto& list = lists[c];
    list.reserve(k);
    for (int v : order) {
      if (v == c) continue;
      list.push_back(v);
      if (static_cast<int>(list.size()) == k) break;
    }
  }
  return lists;
}

void Instance::finalize(int delta_nearest) {
  const int n = n_vertices();
  n_vert_ = static_cast<std::size_t>(n);
  if (n_depots < 1) throw ValidationError("instance has no depots");
  if (n_customers < 1) throw ValidationError("instance has no customers");
  if (fleet_size < 1) throw ValidationError("fleet size must be >= 1");
  if (max_open_depots < 1) throw ValidationError("max open depots must be >= 1");
  if (max_open_depots > n_depots)
    throw ValidationError("max open depots exceeds number of depots");
  if (capacity <= 0) throw ValidationError("vehicle capacity must be positive");
  for (int v = n_depots; v < n; ++v) {
    if (demands[v] < 0)
      throw ValidationError("customer " + std::to_string(orig_ids[v]) + " has negative demand");
    if (demands[v] > capacity)
      throw ValidationError("customer " + std::to_string(orig_ids[v]) +
                            " demand exceeds vehicle capacity");
  }
  {
    std::vector<int> ids = orig_ids;
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
      throw ValidationError("duplicate vertex id in instance file");
  }

  dist_.assign(n_vert_ * n_vert_, 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      double dx = xs[a] - xs[b], dy = ys[a] - ys[b];
      double d = std::sqrt(dx * dx + dy * dy);
      dist_[static_cast<std::size_t>(a) * n_vert_ + b] = d;
      dist_[static_cast<std::size_t>(b) * n_vert_ + a] = d;
    }
  }

  // Triangle inequality holds for exact Euclidean distances; a violation past
  // tolerance indicates degenerate input and is reported as a warning only.
  warnings_.clear();
  bool triangle_ok = true;
  for (int a = 0; a < n && triangle_ok; ++a)
    for (int b = 0; b < n && triangle_ok; ++b)
      for (int c = 0; c < n; ++c)
        if (dist(a, b) > dist(a, c) + dist(c, b) + 1e-9) {
          warnings_.push_back("triangle inequality violated at vertices " + std::to_string(a) +
                              "," + std::to_string(b) + "," + std::to_string(c));
          triangle_ok = false;
          break;
        }

  delta = delta_nearest;
  neighbor_lists_ = build_neighbor_lists(*this, delta_nearest);
}

Instance Instance::parse_canonical(std::istream& in, int delta_nearest) {
  Instance inst;
  int line_no = 0;
  auto next_payload = [&]() -> std::string {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      std::string p = strip_comment(line);
      if (!p.empty()) return p;
    }
    throw ParseError("unexpected end of file", line_no);
  };
  auto expect_kv = [&](const char* key) -> std::string {
    std::string p = next_payload();
    std::istringstream ss(p);
    std::string k;
    ss >> k;
    if (k != key) throw ParseError(std::string("expected ") + key + ", got '" + k + "'", line_no);
    std::string rest;
    std::getline(ss, rest);
    rest = trim(rest);
    if (rest.empty()) throw ParseError(std::string(key) + " requires a value", line_no);
    return rest;
  };
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      int v = std::stoi(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ParseError("expected integer, got '" + s + "'", line_no);
    }
  };
  auto to_real = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ParseError("expected real number, got '" + s + "'", line_no);
    }
  };

  inst.name = expect_kv("NAME");
  inst.fleet_size = to_int(expect_kv("VEHICLES"));
  inst.max_open_depots = to_int(expect_kv("MAX_DEPOTS"));
  inst.capacity = to_real(expect_kv("CAPACITY"));
  int nd = to_int(expect_kv("DEPOTS"));
  if (nd < 1) throw ParseError("DEPOTS must be >= 1", line_no);
  inst.n_depots = nd;
  for (int i = 0; i < nd; ++i) {
    std::istringstream ss(next_payload());
    int id;
    double x, y;
    if (!(ss >> id >> x >> y)) throw ParseError("bad depot line", line_no);
    inst.orig_ids.push_back(id);
    inst.xs.push_back(x);
    inst.ys.push_back(y);
    inst.demands.push_back(0.0);
  }
  int nc = to_int(expect_kv("CUSTOMERS"));
  if (nc < 1) throw ParseError("CUSTOMERS must be >= 1", line_no);
  inst.n_customers = nc;
  for (int i = 0; i < nc; ++i) {
    std::istringstream ss(next_payload());
    int id;
    double x, y, dem;
    if (!(ss >> id >> x >> y >> dem)) throw ParseError("bad customer line", line_no);
    inst.orig_ids.push_back(id);
    inst.xs.push_back(x);
    inst.ys.push_back(y);
    inst.demands.push_back(dem);
  }
  if (next_payload() != "EOF") throw ParseError("expected EOF marker", line_no);

  inst.finalize(delta_nearest);
  return inst;
}

// The three benchmark sets circulate in the same token layout (the one used
// for the capacitated LRP instances):
//   n_customers n_depots
//   depot coordinates (x y) * n_depots
//   customer coordinates (x y) * n_customers
//   vehicle capacity
//   depot capacities * n_depots        (ignored here)
//   customer demands * n_customers
//   depot opening costs * n_depots     (ignored)
//   route opening cost                 (ignored)
//   cost type flag                     (ignored)
// Fleet size and the open-depot limit come from the companion manifest.
Instance Instance::parse_raw(std::istream& in, const std::string& name, const RawMeta& meta,
                             int delta_nearest) {
  if (meta.n_vehicles < 1 || meta.max_open_depots < 1)
    throw ParseError("raw instance '" + name +
                     "' requires n_vehicles and max_open_depots metadata");
  std::vector<double> tok;
  double v;
  while (in >> v) tok.push_back(v);
  std::size_t p = 0;
  auto take = [&](const char* what) {
    if (p >= tok.size()) throw ParseError(std::string("raw file truncated, expected ") + what);
    return tok[p++];
  };
  Instance inst;
  inst.name = name;
  int nc = static_cast<int>(take("customer count"));
  int nd = static_cast<int>(take("depot count"));
  if (nc < 1 || nd < 1) throw ParseError("raw file has invalid counts");
  inst.n_customers = nc;
  inst.n_depots = nd;
  std::vector<double> dx(nd), dy(nd), cx(nc), cy(nc);
  for (int i = 0; i < nd; ++i) {
    dx[i] = take("depot x");
    dy[i] = take("depot y");
  }
  for (int i = 0; i < nc; ++i) {
    cx[i] = take("customer x");
    cy[i] = take("customer y");
  }
  inst.capacity = take("vehicle capacity");
  for (int i = 0; i < nd; ++i) take("depot capacity");
  std::vector<double> dem(nc);
  for (int i = 0; i < nc; ++i) dem[i] = take("customer demand");
  // Trailing cost blocks are optional in some distributions.

  for (int i = 0; i < nd; ++i) {
    inst.orig_ids.push_back(i + 1);
    inst.xs.push_back(dx[i]);
    inst.ys.push_back(dy[i]);
    inst.demands.push_back(0.0);
  }
  for (int i = 0; i < nc; ++i) {
    inst.orig_ids.push_back(nd + i + 1);
    inst.xs.push_back(cx[i]);
    inst.ys.push_back(cy[i]);
    inst.demands.push_back(dem[i]);
  }
  inst.fleet_size = meta.n_vehicles;
  inst.max_open_depots = meta.max_open_depots;
  inst.finalize(delta_nearest);
  return inst;
}

Instance Instance::parse_file(const std::string& path, InstanceFormat fmt,
                              const std::optional<RawMeta>& meta, int delta_nearest) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file '" + path + "'");
  if (fmt == InstanceFormat::canonical) return parse_canonical(in, delta_nearest);
  if (!meta)
    throw ParseError("raw format '" + std::string(format_to_string(fmt)) +
                     "' requires manifest metadata (n_vehicles, max_open_depots)");
  std::string name = path;
  std::size_t slash = name.find_last_of("/\\");
  if (slash != std::string::npos) name = name.substr(slash + 1);
  std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return parse_raw(in, name, *meta, delta_nearest);
}

void Instance::write_canonical(std::ostream& out) const {
  out << "NAME " << name << "\n";
  out << "VEHICLES " << fleet_size << "\n";
  out << "MAX_DEPOTS " << max_open_depots << "\n";
  out << "CAPACITY " << fmt_double(capacity) << "\n";
  out << "DEPOTS " << n_depots << "\n";
  for (int v = 0; v < n_depots; ++v)
    out << orig_ids[v] << " " << fmt_double(xs[v]) << " " << fmt_double(ys[v]) << "\n";
  out << "CUSTOMERS " << n_customers << "\n";
  for (int v = n_depots; v < n_vertices(); ++v)
    out << orig_ids[v] << " " << fmt_double(xs[v]) << " " << fmt_double(ys[v]) << " "
        << fmt_double(demands[v]) << "\n";
  out << "EOF\n";
}

void Instance::write_canonical_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_canonical(out);
}

std::vector<ManifestRow> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest '" + path + "'");
  std::vector<ManifestRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string p = strip_comment(line);
    if (p.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(p);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(trim(col));
    if (!cols.empty() && cols[0] == "name") continue;  // header
    if (cols.size() < 7) throw ParseError("manifest row needs at least 7 columns", line_no);
    ManifestRow r;
    r.name = cols[0];
    r.path = cols[1];
    r.format = format_from_string(cols[2]);
    try {
      r.n_customers = std::stoi(cols[3]);
      r.n_depots = std::stoi(cols[4]);
      r.n_vehicles = std::stoi(cols[5]);
      r.max_open_depots = std::stoi(cols[6]);
      if (cols.size() > 7 && !cols[7].empty()) r.bks = std::stod(cols[7]);
    } catch (const ParseError&) {
      throw;
    } catch (...) {
      throw ParseError("bad numeric column in manifest", line_no);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace llrp
