#include <gtest/gtest.h>

#include <sstream>

#include "bmo/errors.hpp"
#include "bmo/trace.hpp"

using bmo::DyadicCube;

namespace {

bmo::RunTrace sample_trace() {
  bmo::RunTrace t;
  t.algo = "z";
  t.dim = 2;
  t.provenance["env"] = "himmelblau";
  t.provenance["seed"] = "4";
  bmo::TraceRow w;
  w.kind = bmo::RowKind::warmup;
  w.cube = DyadicCube::root(2);
  w.arm = bmo::Point{0.1, 1.0 / 3.0};
  w.y = -0.123456789012345678;
  w.n_cubes = 1;
  t.rows.push_back(w);
  bmo::TraceRow p;
  p.t = 1;
  p.cube = DyadicCube(1, {1, 0});
  p.arm = bmo::Point{0.75, 0.2};
  p.y = 3.0e-17;
  p.n_cubes = 5;
  p.min_cube_measure = 0.25;
  t.rows.push_back(p);
  t.final_cubes = DyadicCube::root(2).direct_subcubes();
  return t;
}

}  // namespace

TEST(TraceCsv, RoundTripsExactly) {
  const auto t = sample_trace();
  std::stringstream ss;
  bmo::write_trace_csv(ss, t);
  const auto back = bmo::read_trace_csv(ss);
  EXPECT_EQ(back.algo, "z");
  EXPECT_EQ(back.dim, 2u);
  EXPECT_EQ(back.provenance.at("env"), "himmelblau");
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0].kind, bmo::RowKind::warmup);
  EXPECT_EQ(back.rows[0].arm, t.rows[0].arm);
  EXPECT_EQ(back.rows[0].y, t.rows[0].y);
  EXPECT_EQ(back.rows[1].cube, t.rows[1].cube);
  EXPECT_EQ(back.rows[1].n_cubes, 5u);
  EXPECT_EQ(back.rows[1].min_cube_measure, 0.25);
  EXPECT_EQ(back.final_cubes, t.final_cubes);

  std::stringstream again;
  bmo::write_trace_csv(again, back);
  std::stringstream first;
  bmo::write_trace_csv(first, t);
  EXPECT_EQ(again.str(), first.str());
}

TEST(TraceCsv, MalformedInputNamesTheLine) {
  std::stringstream ss;
  bmo::write_trace_csv(ss, sample_trace());
  std::string text = ss.str();
  const auto pos = text.find("1:1,0");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 5, "1:9,0");  // coordinate outside [0, 2)
  std::istringstream in(text);
  try {
    bmo::read_trace_csv(in);
    FAIL() << "expected MalformedTrace";
  } catch (const bmo::MalformedTrace& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
  }
}

TEST(TraceCsv, RejectsMissingHeader) {
  std::istringstream in("play,1,0:0,0.5,1,1,1\n");
  EXPECT_THROW(bmo::read_trace_csv(in), bmo::MalformedTrace);
}

TEST(FormatDouble, SeventeenDigits) {
  EXPECT_EQ(bmo::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(bmo::format_double(2.0), "2");
}
