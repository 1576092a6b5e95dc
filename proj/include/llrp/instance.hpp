#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace llrp {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_no(line) {}
  int line_no;
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class InstanceFormat { canonical, tuzun, prodhon, barreto };

InstanceFormat format_from_string(const std::string& s);
const char* format_to_string(InstanceFormat f);

// Fleet/depot limits that raw benchmark files do not carry themselves.
struct RawMeta {
  int n_vehicles = 0;
  int max_open_depots = 0;
};

// Immutable problem data. Vertices are re-indexed densely with depots first:
// depot vertex ids are [0, n_depots), customer ids [n_depots, n_vertices).
// Original file ids are kept for I/O.
class Instance {
 public:
  std::string name;
  int n_depots = 0;
  int n_customers = 0;
  std::vector<double> xs, ys;       // per vertex
  std::vector<int> orig_ids;        // per vertex
  std::vector<double> demands;      // per vertex, 0 for depots
  double capacity = 0.0;            // P
  int fleet_size = 0;               // N_v
  int max_open_depots = 0;          // N_d
  int delta = 20;                   // granularity used for the neighbor lists

  int n_vertices() const { return n_depots + n_customers; }
  bool is_depot(int v) const { return v < n_depots; }
  double dist(int a, int b) const { return dist_[static_cast<std::size_t>(a) * n_vert_ + b]; }
  double demand_of(int v) const { return demands[v]; }
  double total_demand() const;
  const std::vector<int>& neighbors_of(int v) const { return neighbor_lists_[v]; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  // True when b is in a's candidate list or vice versa (depots have no list).
  bool is_near(int a, int b) const;

  // Maps an original id back to the dense vertex id; throws if unknown.
  int vertex_from_orig(int orig_id) const;

  // Computes distances and candidate lists and checks the structural
  // invariants. Must be called once after the raw fields are filled.
  void finalize(int delta_nearest);

  static Instance parse_file(const std::string& path, InstanceFormat fmt,
                             const std::optional<RawMeta>& meta = std::nullopt,
                             int delta_nearest = 20);
  static Instance parse_canonical(std::istream& in, int delta_nearest = 20);
  static Instance parse_raw(std::istream& in, const std::string& name, const RawMeta& meta,
                            int delta_nearest = 20);

  void write_canonical(std::ostream& out) const;
  void write_canonical_file(const std::string& path) const;

 private:
  std::size_t n_vert_ = 0;
  std::vector<double> dist_;
  std::vector<std::vector<int>> neighbor_lists_;
  std::vector<std::string> warnings_;
};

// Candidate lists: for every customer the delta nearest other vertices
// (customers and depots), ascending by distance, ties broken by vertex id.
// delta is clamped to |V|-1. Depot entries get empty lists.
std::vector<std::vector<int>> build_neighbor_lists(const Instance& inst, int delta_nearest);

// One row of the benchmark manifest CSV:
// name,path,format,n_customers,n_depots,n_vehicles,max_open_depots,bks
struct ManifestRow {
  std::string name;
  std::string path;
  InstanceFormat format = InstanceFormat::canonical;
  int n_customers = 0;
  int n_depots = 0;
  int n_vehicles = 0;
  int max_open_depots = 0;
  double bks = -1.0;  // negative when unknown
};

std::vector<ManifestRow> read_manifest(const std::string& path);

}  // namespace llrp
