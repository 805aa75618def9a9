#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "ringheom/io.hpp"

using namespace ringheom;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(bool(in));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// deterministic full-precision filler
double probe(long r, long j) { return std::sin(1.7 * double(r) + 0.3 * double(j)) * 1e-3 + 1.0 / 3.0; }

}  // namespace

TEST_CASE("format_double parses back to the same bits") {
  const double vals[] = {1.0 / 3.0, 0.1 + 0.2, 1e22, -0.0, 1e-300, 6.626e-34, 2.0, M_PI};
  for (double v : vals) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("write_csv emits header plus full-precision rows") {
  const fs::path dir = fresh_dir("ringheom_io_csv");
  Eigen::ArrayXd a(3), b(3);
  a << 0.0, 0.5, 1.0;
  b << 1.0 / 3.0, -2.0, 0.25;
  write_csv(dir / "t.csv", {"t", "value"}, {&a, &b});
  const std::string text = slurp(dir / "t.csv");
  CHECK(text.substr(0, 8) == "t,value\n");
  CHECK(text.find("0.5,-2\n") != std::string::npos);
  CHECK(text.find(format_double(1.0 / 3.0)) != std::string::npos);

  Eigen::ArrayXd c(2);
  c << 1.0, 2.0;
  CHECK_THROWS_AS(write_csv(dir / "bad.csv", {"t", "value"}, {&a, &c}), std::invalid_argument);
  CHECK_THROWS_AS(write_csv(dir / "bad.csv", {"t"}, {&a, &b}), std::invalid_argument);
}

TEST_CASE("ring snapshot round trips bit exactly") {
  const fs::path dir = fresh_dir("ringheom_io_ring");
  WignerField w(make_grid(6, 3));
  for (long r = 0; r < w.values.rows(); ++r) {
    for (long j = 0; j < w.values.cols(); ++j) w.values(r, j) = probe(r, j);
  }
  save_snapshot(dir / "w.csv", w);

  const std::string head = slurp(dir / "w.csv").substr(0, 20);
  CHECK(head.substr(0, 20) == "n,theta_index,value\n");

  const WignerField back = load_ring_snapshot(dir / "w.csv");
  CHECK(back.grid == w.grid);
  CHECK((back.values == w.values).all());

  // resaving the loaded field reproduces the file byte for byte
  save_snapshot(dir / "w2.csv", back);
  CHECK(slurp(dir / "w2.csv") == slurp(dir / "w.csv"));
}

TEST_CASE("cl snapshot round trips bit exactly") {
  const fs::path dir = fresh_dir("ringheom_io_cl");
  CLField w(make_cl_grid(10, 0.25, 8));
  for (long r = 0; r < w.values.rows(); ++r) {
    for (long j = 0; j < w.values.cols(); ++j) w.values(r, j) = probe(r + 7, j);
  }
  save_snapshot(dir / "w.csv", w);
  const CLField back = load_cl_snapshot(dir / "w.csv");
  CHECK(back.grid == w.grid);
  CHECK((back.values == w.values).all());

  // a ring loader must reject the cl sidecar
  CHECK_THROWS_AS(load_ring_snapshot(dir / "w.csv"), std::runtime_error);
}

TEST_CASE("ring checkpoint restores stack and metadata") {
  const fs::path dir = fresh_dir("ringheom_io_ckpt");
  auto space = std::make_shared<const HierarchySpace>(enumerate_hierarchy(1, 2));
  AdoStack stack(space, make_grid(6, 3));
  for (std::int64_t i = 0; i < stack.data.size(); ++i) stack.data[i] = probe(i % 13, i % 7);

  CheckpointMeta meta;
  meta.model = "risb";
  meta.K = 1;
  meta.n_trunc = 2;
  meta.bath = BathSpec{0.37, 1.5, 2.25};
  meta.ring = RingParams{0.5, 1.0, -1.0, 0.3};
  save_checkpoint(dir / "ck", stack, meta);

  CHECK(fs::exists(dir / "ck" / "manifest.json"));
  CHECK(fs::exists(dir / "ck" / "grid.json"));
  CHECK(fs::exists(dir / "ck" / "field_000000.csv"));

  CheckpointMeta got;
  const AdoStack back = load_ring_checkpoint(dir / "ck", &got);
  CHECK(back.grid == stack.grid);
  CHECK(back.space->size() == stack.space->size());
  CHECK((back.data == stack.data).all());
  CHECK(got.model == "risb");
  CHECK(got.K == 1);
  CHECK(got.n_trunc == 2);
  CHECK(got.bath.eta == 0.37);
  CHECK(got.bath.beta == 2.25);
  CHECK(got.ring.flux_bar == 0.3);

  CheckpointMeta wrong = meta;
  wrong.n_trunc = 3;
  CHECK_THROWS_AS(save_checkpoint(dir / "bad", stack, wrong), std::invalid_argument);
}

TEST_CASE("cl checkpoint carries the model tag") {
  const fs::path dir = fresh_dir("ringheom_io_ckpt_cl");
  auto space = std::make_shared<const HierarchySpace>(make_hierarchy(2, 1));
  CLStack stack(space, make_cl_grid(8, 0.5, 6));
  for (std::int64_t i = 0; i < stack.data.size(); ++i) stack.data[i] = probe(i % 11, i % 5);

  CheckpointMeta meta;
  meta.model = "cl";
  meta.K = 1;
  meta.n_trunc = 1;
  save_checkpoint(dir / "ck", stack, meta);

  CheckpointMeta got;
  const CLStack back = load_cl_checkpoint(dir / "ck", &got);
  CHECK(back.grid == stack.grid);
  CHECK((back.data == stack.data).all());
  CHECK(got.model == "cl");

  // the tag keeps the two models from being confused
  CHECK_THROWS_AS(load_ring_checkpoint(dir / "ck"), std::runtime_error);
}
