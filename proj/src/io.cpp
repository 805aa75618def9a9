#include "ringheom/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace ringheom {

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  return in;
}

void write_field_csv(const fs::path& file, const Eigen::ArrayXXd& v, long n0) {
  std::ofstream out = open_out(file);
  out << "n,theta_index,value\n";
  for (long r = 0; r < v.rows(); ++r) {
    for (long j = 0; j < v.cols(); ++j) {
      out << n0 + r << ',' << j << ',' << format_double(v(r, j)) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

Eigen::ArrayXXd read_field_csv(const fs::path& file, long rows, long cols, long n0) {
  std::ifstream in = open_in(file);
  std::string line;
  if (!std::getline(in, line) || line != "n,theta_index,value") {
    throw std::runtime_error("bad snapshot header in " + file.string());
  }
  Eigen::ArrayXXd v(rows, cols);
  long count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long n = 0, j = 0;
    double val = 0.0;
    if (std::sscanf(line.c_str(), "%ld,%ld,%lf", &n, &j, &val) != 3) {
      throw std::runtime_error("bad snapshot row in " + file.string() + ": " + line);
    }
    const long r = n - n0;
    if (r < 0 || r >= rows || j < 0 || j >= cols) {
      throw std::runtime_error("snapshot index out of range in " + file.string() + ": " + line);
    }
    v(r, j) = val;
    ++count;
  }
  if (count != rows * cols) {
    throw std::runtime_error("snapshot " + file.string() + " has " + std::to_string(count) +
                             " rows, expected " + std::to_string(rows * cols));
  }
  return v;
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p += ".json";
  return p;
}

json ring_grid_json(const RingGrid& g) {
  return json{{"kind", "ring"}, {"n_theta", g.n_theta}, {"n_max", g.n_max}};
}

json cl_grid_json(const CLGrid& g) {
  return json{{"kind", "cl"}, {"n_p", g.n_p}, {"dp", g.dp}, {"n_theta", g.n_theta}};
}

void write_json(const fs::path& file, const json& j) {
  std::ofstream out = open_out(file);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

json read_json(const fs::path& file) {
  std::ifstream in = open_in(file);
  json j;
  in >> j;
  return j;
}

RingGrid ring_grid_from_json(const json& j, const fs::path& file) {
  if (j.value("kind", "") != "ring") {
    throw std::runtime_error(file.string() + " does not describe a ring grid");
  }
  return make_grid(j.at("n_theta").get<int>(), j.at("n_max").get<int>());
}

CLGrid cl_grid_from_json(const json& j, const fs::path& file) {
  if (j.value("kind", "") != "cl") {
    throw std::runtime_error(file.string() + " does not describe a cl grid");
  }
  return make_cl_grid(j.at("n_p").get<int>(), j.at("dp").get<double>(),
                      j.at("n_theta").get<int>());
}

json meta_json(const CheckpointMeta& meta, std::int64_t n_fields) {
  return json{{"model", meta.model},
              {"K", meta.K},
              {"n_trunc", meta.n_trunc},
              {"n_fields", n_fields},
              {"bath", {{"eta", meta.bath.eta}, {"gamma", meta.bath.gamma}, {"beta", meta.bath.beta}}},
              {"ring",
               {{"mass", meta.ring.mass}, {"radius", meta.ring.radius}, {"charge", meta.ring.charge}}},
              {"flux_bar", meta.ring.flux_bar}};
}

CheckpointMeta meta_from_json(const json& j) {
  CheckpointMeta m;
  m.model = j.at("model").get<std::string>();
  m.K = j.at("K").get<int>();
  m.n_trunc = j.at("n_trunc").get<int>();
  m.bath.eta = j.at("bath").at("eta").get<double>();
  m.bath.gamma = j.at("bath").at("gamma").get<double>();
  m.bath.beta = j.at("bath").at("beta").get<double>();
  m.ring.mass = j.at("ring").at("mass").get<double>();
  m.ring.radius = j.at("ring").at("radius").get<double>();
  m.ring.charge = j.at("ring").at("charge").get<double>();
  m.ring.flux_bar = j.at("flux_bar").get<double>();
  return m;
}

fs::path field_file(const fs::path& dir, std::int64_t i) {
  char name[32];
  std::snprintf(name, sizeof name, "field_%06lld.csv", static_cast<long long>(i));
  return dir / name;
}

void check_model(const CheckpointMeta& meta, const char* expected) {
  if (meta.model != expected) {
    throw std::runtime_error("checkpoint model is '" + meta.model + "', expected '" + expected +
                             "'");
  }
}

}  // namespace

void write_csv(const fs::path& file, const std::vector<std::string>& header,
               const std::vector<const Eigen::ArrayXd*>& columns) {
  if (header.size() != columns.size() || columns.empty()) {
    throw std::invalid_argument("write_csv: header and column counts differ");
  }
  const Eigen::Index n = columns[0]->size();
  for (const auto* c : columns) {
    if (c->size() != n) throw std::invalid_argument("write_csv: ragged columns");
  }
  std::ofstream out = open_out(file);
  for (std::size_t k = 0; k < header.size(); ++k) {
    out << (k ? "," : "") << header[k];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      out << (k ? "," : "") << format_double((*columns[k])[i]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

void save_snapshot(const fs::path& csv, const WignerField& w) {
  write_field_csv(csv, w.values, -w.grid.n_max);
  write_json(sidecar_path(csv), ring_grid_json(w.grid));
}

void save_snapshot(const fs::path& csv, const CLField& w) {
  write_field_csv(csv, w.values, 0);
  write_json(sidecar_path(csv), cl_grid_json(w.grid));
}

WignerField load_ring_snapshot(const fs::path& csv) {
  const fs::path side = sidecar_path(csv);
  WignerField w(ring_grid_from_json(read_json(side), side));
  w.values = read_field_csv(csv, w.grid.rows(), w.grid.n_theta, -w.grid.n_max);
  return w;
}

CLField load_cl_snapshot(const fs::path& csv) {
  const fs::path side = sidecar_path(csv);
  CLField w(cl_grid_from_json(read_json(side), side));
  w.values = read_field_csv(csv, w.grid.n_p, w.grid.n_theta, 0);
  return w;
}

void save_checkpoint(const fs::path& dir, const AdoStack& stack, const CheckpointMeta& meta) {
  check_model(meta, "risb");
  if (stack.space->n_slots() != 2 * (meta.K + 1) || stack.space->n_trunc() != meta.n_trunc) {
    throw std::invalid_argument("save_checkpoint: metadata does not match the stack hierarchy");
  }
  fs::create_directories(dir);
  write_json(dir / "grid.json", ring_grid_json(stack.grid));
  write_json(dir / "manifest.json", meta_json(meta, stack.space->size()));
  for (std::int64_t i = 0; i < stack.space->size(); ++i) {
    write_field_csv(field_file(dir, i), stack.field(i), -stack.grid.n_max);
  }
}

void save_checkpoint(const fs::path& dir, const CLStack& stack, const CheckpointMeta& meta) {
  check_model(meta, "cl");
  if (stack.space->n_slots() != meta.K + 1 || stack.space->n_trunc() != meta.n_trunc) {
    throw std::invalid_argument("save_checkpoint: metadata does not match the stack hierarchy");
  }
  fs::create_directories(dir);
  write_json(dir / "grid.json", cl_grid_json(stack.grid));
  write_json(dir / "manifest.json", meta_json(meta, stack.space->size()));
  for (std::int64_t i = 0; i < stack.space->size(); ++i) {
    write_field_csv(field_file(dir, i), stack.field(i), 0);
  }
}

AdoStack load_ring_checkpoint(const fs::path& dir, CheckpointMeta* meta_out) {
  const CheckpointMeta meta = meta_from_json(read_json(dir / "manifest.json"));
  check_model(meta, "risb");
  const fs::path gridfile = dir / "grid.json";
  const RingGrid grid = ring_grid_from_json(read_json(gridfile), gridfile);
  auto space = std::make_shared<const HierarchySpace>(enumerate_hierarchy(meta.K, meta.n_trunc));
  AdoStack stack(space, grid);
  for (std::int64_t i = 0; i < space->size(); ++i) {
    stack.field(i) = read_field_csv(field_file(dir, i), grid.rows(), grid.n_theta, -grid.n_max);
  }
  if (meta_out) *meta_out = meta;
  return stack;
}

CLStack load_cl_checkpoint(const fs::path& dir, CheckpointMeta* meta_out) {
  const CheckpointMeta meta = meta_from_json(read_json(dir / "manifest.json"));
  check_model(meta, "cl");
  const fs::path gridfile = dir / "grid.json";
  const CLGrid grid = cl_grid_from_json(read_json(gridfile), gridfile);
  auto space = std::make_shared<const HierarchySpace>(make_hierarchy(meta.K + 1, meta.n_trunc));
  CLStack stack(space, grid);
  for (std::int64_t i = 0; i < space->size(); ++i) {
    stack.field(i) = read_field_csv(field_file(dir, i), grid.n_p, grid.n_theta, 0);
  }
  if (meta_out) *meta_out = meta;
  return stack;
}

}  // namespace ringheom
