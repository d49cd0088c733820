#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ncl/cli.hpp"
#include "ncl/config.hpp"
#include "ncl/verify.hpp"

using namespace ncl;
using namespace ncl::cli;

TEST_CASE("empty config text yields all defaults") {
  RunConfig c = parse_config("");
  CHECK(c.n == 256);
  CHECK(c.length == 40.0);
  CHECK(c.tau == 1.0);
  CHECK(c.gamma == 0.0);
  CHECK(c.epsilon == 0.0);
  CHECK(c.dt == 1e-4);
  CHECK(c.t_final == 0.1);
  CHECK(c.s == 5.0);
  CHECK(c.scheme == "imex");
  CHECK(c.background == "flat");
  CHECK(c.window_inner_fraction == 0.6);
  CHECK(c.picard_tol == 1e-10);
  CHECK(c.picard_max_iter == 50);
}

TEST_CASE("comments and blank lines are ignored") {
  RunConfig c = parse_config("# a comment\n\n  tau = 2.0  # trailing\n");
  CHECK(c.tau == 2.0);
}

TEST_CASE("validation failures name the problem") {
  CHECK_THROWS_WITH_AS(parse_config("gamma = 1.0"),
                       doctest::Contains("gamma"), ConfigError);
  CHECK_THROWS_AS(parse_config("n = 8"), ConfigError);
  CHECK_THROWS_AS(parse_config("n = 255"), ConfigError);
  CHECK_THROWS_AS(parse_config("scheme = rk4"), ConfigError);
  CHECK_THROWS_AS(parse_config("background = parabolic"), ConfigError);
  CHECK_THROWS_AS(parse_config("window_inner_fraction = 0.9"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("tau = 1\nbogus_key = 3\n"),
                       doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("just some words\n"),
                       doctest::Contains("key = value"), ConfigError);
  CHECK_THROWS_AS(parse_config("dt = fast"), ConfigError);
  CHECK_THROWS_AS(parse_config("init = single_mode 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("init = sawtooth 1 2"), ConfigError);
}

TEST_CASE("picard scheme with a single-mode preset parses") {
  RunConfig c = parse_config("scheme = picard\ninit = single_mode 1 0.001\n");
  CHECK(c.scheme == "picard");
  CHECK(c.init.kind == InitSpec::Kind::single_mode);
  CHECK(c.init.k == 1);
  CHECK(c.init.amplitude == 0.001);
}

TEST_CASE("config round trips through the canonical serialization") {
  const char* samples[] = {
      "",
      "tau = 0.5\ngamma = 0.25\nscheme = picard\ninit = single_mode 3 0.02\n",
      "init = gaussian_bump 0.1 2.5 -1.0\nn = 512\nseed = 12345\n",
      "init = random_bandlimited 12 1.0\nepsilon = 1e-3\nout_dir = somewhere\n",
  };
  for (const char* text : samples) {
    RunConfig once = parse_config(text);
    RunConfig twice = parse_config(emit_config(once));
    CHECK(once == twice);
    CHECK(emit_config(once) == emit_config(twice));
  }
}

TEST_CASE("dispatch exit codes") {
  namespace fs = std::filesystem;
  // missing config file
  CHECK(dispatch({"simulate", "--config", "/nonexistent/missing.cfg"}) == 1);
  // usage errors
  CHECK(dispatch({"frobnicate"}) == 1);
  CHECK(dispatch(std::vector<std::string>{}) == 1);

  // a numerical abort: the overflow guard trips immediately at |u0| = 55
  const std::string dir = (fs::temp_directory_path() / "ncl_cli_test").string();
  fs::remove_all(dir);
  const std::string cfg_path = dir + "/abort.cfg";
  fs::create_directories(dir);
  {
    std::ofstream out(cfg_path);
    out << "n = 64\nlength = 6.283185307179586\ndt = 1e-6\nt_final = 1e-5\n"
           "init = single_mode 1 55\noutput_stride = 1\n";
  }
  CHECK(dispatch({"simulate", "--config", cfg_path, "--out", dir + "/out"}) == 2);

  // a healthy tiny simulate run
  const std::string ok_path = dir + "/ok.cfg";
  {
    std::ofstream out(ok_path);
    out << "n = 64\nlength = 6.283185307179586\ndt = 1e-4\nt_final = 1e-2\n"
           "init = single_mode 1 0.001\noutput_stride = 20\n";
  }
  CHECK(dispatch({"simulate", "--config", ok_path, "--out", dir + "/out2"}) == 0);
  CHECK(fs::exists(dir + "/out2/norms.csv"));
  CHECK(fs::exists(dir + "/out2/run.json"));

  // forcing an over-long picard slab fails the contraction thresholds
  const std::string slab_path = dir + "/slab.cfg";
  {
    std::ofstream out(slab_path);
    out << "n = 64\nlength = 6.283185307179586\ndt = 2e-5\nt_final = 1\n"
           "scheme = picard\npicard_max_iter = 8\ninit = single_mode 1 0.2\n";
  }
  CHECK(dispatch({"contraction", "--config", slab_path, "--slab-dt", "0.008"}) == 3);
  fs::remove_all(dir);
}

TEST_CASE("NCL_OUT_DIR is the out-dir fallback") {
  namespace fs = std::filesystem;
  const std::string dir = (fs::temp_directory_path() / "ncl_env_test").string();
  fs::remove_all(dir);
  setenv("NCL_OUT_DIR", dir.c_str(), 1);
  const std::string cfg_path = dir + "_cfg";
  {
    std::ofstream out(cfg_path);
    out << "n = 64\nlength = 6.283185307179586\ndt = 1e-4\nt_final = 1e-3\n"
           "init = single_mode 1 0.001\noutput_stride = 10\n";
  }
  CHECK(dispatch({"simulate", "--config", cfg_path}) == 0);
  CHECK(fs::exists(dir + "/norms.csv"));
  unsetenv("NCL_OUT_DIR");
  fs::remove_all(dir);
  fs::remove(cfg_path);
}

TEST_CASE("verify suite passes, is deterministic, and fits the time budget") {
  const auto t0 = std::chrono::steady_clock::now();
  lab::StudyReport a = verify::verify_suite(7);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 10.0);
  lab::StudyReport b = verify::verify_suite(7);
  CHECK(a.pass());
  REQUIRE(a.checks.size() == b.checks.size());
  for (size_t i = 0; i < a.checks.size(); ++i) {
    CHECK(a.checks[i].name == b.checks[i].name);
    CHECK(a.checks[i].measured == b.checks[i].measured);  // bitwise
  }
}

TEST_CASE("flipping the Hilbert sign fails at least five checks") {
  lab::StudyReport rep = verify::verify_suite(7, verify::Fault::flip_hilbert_sign);
  int failed = 0;
  for (const auto& c : rep.checks)
    if (!c.pass) ++failed;
  CHECK(failed >= 5);
}

TEST_CASE("prepare_run wires the config into runnable pieces") {
  RunConfig rc = parse_config(
      "n = 64\nlength = 40\nbackground = ivantsov\nscheme = picard\n"
      "init = random_bandlimited 5 0.25\nseed = 9\n");
  PreparedRun run = prepare_run(rc);
  CHECK(run.grid->size() == 64);
  CHECK(run.cfg.bg.kind == crystal::BackgroundKind::ivantsov);
  CHECK(run.cfg.scheme == evolve::Scheme::picard);
  CHECK(spectral::sobolev_norm(run.u0, spectral::SobolevIndex(5.5)) ==
        doctest::Approx(0.25).epsilon(1e-12));
  // same seed, same field
  PreparedRun run2 = prepare_run(rc);
  CHECK(spectral::max_abs(run.u0 - run2.u0) == 0.0);
}

TEST_CASE("gaussian preset evaluates pointwise") {
  RunConfig rc = parse_config("n = 64\nlength = 20\ninit = gaussian_bump 0.5 2 1\n");
  PreparedRun run = prepare_run(rc);
  double worst = 0.0;
  for (int j = 0; j < 64; ++j) {
    const double xi = run.grid->node(j);
    const double r = (xi - 1.0) / 2.0;
    worst = std::max(worst, std::abs(run.u0[j] - 0.5 * std::exp(-r * r)));
  }
  CHECK(worst == 0.0);
}
