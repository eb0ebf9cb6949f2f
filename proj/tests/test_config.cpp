#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ssom/config.hpp"

using namespace ssom;

TEST_CASE("odds is the log probability ratio") {
  CHECK(odds(0.5) == 0.0);
  CHECK(odds(0.6) == doctest::Approx(0.4054651081081642).epsilon(1e-12));
  CHECK(odds(0.6) + odds(0.4) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(odds(0.0), std::domain_error);
  CHECK_THROWS_AS(odds(1.0), std::domain_error);
  CHECK_THROWS_AS(odds(-0.1), std::domain_error);
}

TEST_CASE("defaults") {
  const RunConfig cfg;
  CHECK(cfg.width == 900);
  CHECK(cfg.height == 64);
  CHECK(cfg.fov_up_deg == 3.0);
  CHECK(cfg.fov_down_deg == -25.0);
  CHECK(cfg.p_stable == 0.6);
  CHECK(cfg.p_prior == 0.5);
  CHECK(cfg.p_penalty == 0.6);
  CHECK(cfg.l_stable == doctest::Approx(5.0 * odds(0.6)).epsilon(1e-12));
  CHECK(cfg.l_unstable == doctest::Approx(-2.0 * odds(0.6)).epsilon(1e-12));
  CHECK(cfg.flood_kernel == 5);
  CHECK(cfg.flood_theta == 0.05);
  CHECK(cfg.huber_delta == 0.1);
  CHECK(cfg.default_confidence == 0.8);
  CHECK(cfg.grace_frames == 5);
  CHECK(cfg.init_prune_frames == 1);
}

TEST_CASE("set parses typed values and rejects junk") {
  RunConfig cfg;
  cfg.set("width", "512");
  CHECK(cfg.width == 512);
  cfg.set("sigma_d", "0.25");
  CHECK(cfg.sigma_d == 0.25);
  cfg.set("seed", "7");
  CHECK(cfg.seed == 7u);
  cfg.set("class_table", "some/path.txt");
  CHECK(cfg.class_table == "some/path.txt");
  cfg.set("movable_classes", "10,30,252");
  CHECK(cfg.movable_classes == std::vector<uint16_t>{10, 30, 252});

  CHECK_THROWS_AS(cfg.set("no_such_key", "1"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.set("width", "abc"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.set("sigma_d", ""), std::invalid_argument);
}

TEST_CASE("to_string round-trips through the stream parser") {
  RunConfig cfg;
  cfg.set("width", "720");
  cfg.set("p_stable", "0.61");
  cfg.set("movable_classes", "10,11");
  cfg.set("threads", "3");

  std::istringstream in(cfg.to_string());
  RunConfig back;
  apply_config_stream(in, back, "mem");
  CHECK(back.width == 720);
  CHECK(back.p_stable == 0.61);
  CHECK(back.movable_classes == std::vector<uint16_t>{10, 11});
  CHECK(back.threads == 3);
  CHECK(back.to_string() == cfg.to_string());
}

TEST_CASE("stream parser handles comments, blanks, and reports line numbers") {
  std::istringstream in("# comment\n\nwidth = 256\n  height=32 # trailing\nbogus_key = 1\n");
  RunConfig cfg;
  try {
    apply_config_stream(in, cfg, "unit");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("unit:5") != std::string::npos);
  }
  CHECK(cfg.width == 256);
  CHECK(cfg.height == 32);
}

TEST_CASE("load_config reads a file and errors on missing path") {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / "ssom_test_config.cfg";
  {
    std::ofstream out(p);
    out << "max_range = 90\nicp_max_iter = 12\n";
  }
  const RunConfig cfg = load_config(p.string());
  CHECK(cfg.max_range == 90.0);
  CHECK(cfg.icp_max_iter == 12);
  fs::remove(p);
  CHECK_THROWS(load_config((fs::temp_directory_path() / "ssom_no_such.cfg").string()));
}
