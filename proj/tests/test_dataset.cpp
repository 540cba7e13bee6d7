#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "plastokit/dataset.hpp"

using namespace plastokit;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("plastokit_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("loading path parsing and expansion") {
  const LoadingPath p = LoadingPath::parse("[(0.0125, 125), (-0.0125, 250)]");
  REQUIRE(p.segments.size() == 2);
  CHECK(p.num_increments() == 375);
  const auto t = p.targets();
  CHECK(t.size() == 375u);
  CHECK(t[124] == doctest::Approx(0.0125));
  CHECK(t.back() == doctest::Approx(-0.0125));
  CHECK(LoadingPath::parse(p.to_string()).targets() == t);
  CHECK(LoadingPath::training_default().num_increments() == 1125);
  CHECK(LoadingPath::testing_default().num_increments() == 1625);
  CHECK_THROWS_AS(LoadingPath::parse("[(0.01, x)]"), ParseError);
  CHECK_THROWS_AS(LoadingPath::parse("[]"), InvalidArgument);
  CHECK_THROWS_AS(LoadingPath::parse("[(0.01, 0)]"), InvalidArgument);
}

TEST_CASE("dataset files") {
  const UniaxialDataset mono = load_dataset(temp_file("mono.csv", "eps11,sig11\n0,0\n0.001,200\n0.002,210\n"));
  CHECK(mono.size() == 3);
  CHECK(mono.num_branches() == 1);

  const UniaxialDataset tct =
      load_dataset(temp_file("tct.csv", "eps11,sig11\n0,0\n0.01,210\n0,-150\n-0.01,-210\n0.01,220\n"));
  CHECK(tct.num_branches() == 3);
  CHECK(tct.branch_start == std::vector<int>{0, 1, 3});

  CHECK_THROWS_AS(load_dataset(temp_file("nan.csv", "eps11,sig11\n0,0\n0.001,NaN\n")), NonFiniteValue);
  try {
    load_dataset(temp_file("nan2.csv", "eps11,sig11\n0,0\n0.001,nan\n"));
  } catch (const NonFiniteValue& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_dataset(temp_file("bad.csv", "eps11,sig11\n0,zero\n")), ParseError);
  CHECK_THROWS_AS(load_dataset(temp_file("short.csv", "eps11,sig11\n0\n")), ParseError);
  CHECK_THROWS_AS(load_dataset(temp_file("empty.csv", "eps11,sig11\n")), EmptyDataset);
  CHECK_THROWS_AS(load_dataset(temp_file("header.csv", "a,b\n0,0\n")), ParseError);
}

TEST_CASE("dataset round trip keeps full precision") {
  UniaxialDataset d;
  d.eps = {0.0, 1.0 / 3.0, 2.0 / 7.0, -1e-5};
  d.sig = {0.0, 123.456789012345678, -1.0 / 9.0, 3e-300};
  d.detect_branches();
  const std::string f = temp_file("rt.csv", "");
  write_dataset(d, f);
  const UniaxialDataset back = load_dataset(f);
  CHECK(back.eps == d.eps);
  CHECK(back.sig == d.sig);
  CHECK(back.branch_start == d.branch_start);
}

TEST_CASE("generation and interpolation") {
  const auto m = make_material(SingleNlkParams::table2());
  const LoadingPath path = LoadingPath::training_default();
  const UniaxialDataset d = generate_uniaxial_dataset(path, *m);
  CHECK(d.size() == path.num_increments() + 1);
  CHECK(d.num_branches() == 5);
  const UniaxialDataset d2 = generate_uniaxial_dataset(path, *m);
  CHECK(d2.sig == d.sig);

  // The knee sits at the elastic limit.
  CHECK(d.sig[10] == doctest::Approx(200000.0 * 0.001));
  CHECK(d.sig[11] < 200000.0 * 0.0011);

  // Interpolating at the sample points returns the samples.
  const auto targets = interpolate_targets(d, path.targets());
  for (std::size_t i = 0; i < targets.size(); ++i) CHECK(targets[i] == doctest::Approx(d.sig[i + 1]).epsilon(1e-12));

  // Extra reversals are not covered by the training data.
  CHECK_THROWS_AS(interpolate_targets(d, LoadingPath::testing_default().targets()), PathOutsideData);
  CHECK_THROWS_AS(interpolate_targets(d, LoadingPath{{{0.02, 10}}}.targets()), PathOutsideData);

  const UniaxialDataset zero = generate_uniaxial_dataset(LoadingPath{{{0.0, 5}}}, *m);
  for (double v : zero.sig) CHECK(v == 0.0);

  const UniaxialDataset noisy_a = generate_uniaxial_dataset(path, *m, 0.01, 3);
  const UniaxialDataset noisy_b = generate_uniaxial_dataset(path, *m, 0.01, 3);
  CHECK(noisy_a.sig == noisy_b.sig);
  CHECK(noisy_a.sig != d.sig);
}

TEST_CASE("interpolation between samples is linear within a branch") {
  UniaxialDataset d;
  d.eps = {0.0, 0.01, 0.0, -0.01};
  d.sig = {0.0, 100.0, 40.0, -60.0};
  d.detect_branches();
  const auto t = interpolate_targets(d, {0.005, 0.01, 0.005, -0.005});
  CHECK(t[0] == doctest::Approx(50.0));
  CHECK(t[1] == doctest::Approx(100.0));
  CHECK(t[2] == doctest::Approx(70.0));
  CHECK(t[3] == doctest::Approx(-10.0));
}
