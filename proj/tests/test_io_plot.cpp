#include "flocklab/io.hpp"
#include "flocklab/plot.hpp"
#include "flocklab/stability.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace flocklab;

namespace {

io::CsvTable parse(const std::string& text)
{
  std::istringstream in(text);
  return io::parse_csv(in);
}

std::size_t error_line(const std::string& text)
{
  try {
    parse(text);
  } catch (const io::CsvError& e) {
    return e.line();
  }
  return 0;
}

std::filesystem::path scratch(const std::string& name)
{
  const auto dir = std::filesystem::temp_directory_path() / "flocklab_io_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

} // namespace

TEST(Numbers, ShortestRoundTrip)
{
  EXPECT_EQ(io::format_number(0.1), "0.1");
  EXPECT_EQ(io::format_number(-2.0), "-2");
  EXPECT_EQ(io::format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(io::format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(io::format_number(std::nan("")), "nan");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, i % 40 - 20);
    EXPECT_EQ(std::stod(io::format_number(x)), x);
  }
}

TEST(Csv, TrajectoryRoundTripIsExact)
{
  StandardExampleParams p;
  p.followers = 4;
  p.rho = p.r = 0.45;
  IntegrateOptions o;
  o.horizon = 3.0;
  const auto tr = step_response(build_standard_example(p), 0.1, o);
  std::ostringstream out;
  io::write_trajectory(out, tr);
  std::istringstream in(out.str());
  const auto t = io::parse_csv(in);
  ASSERT_EQ(t.header.size(), 11u);
  EXPECT_EQ(t.header[0], "t");
  EXPECT_EQ(t.header[1], "z0");
  EXPECT_EQ(t.header[6], "zdot0");
  ASSERT_EQ(t.rows.size(), tr.states.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(t.rows[i][0], tr.times[i]);
    for (int k = 0; k < 5; ++k) {
      EXPECT_EQ(t.rows[i][1 + k], tr.states[i].z(k));
      EXPECT_EQ(t.rows[i][6 + k], tr.states[i].zdot(k));
    }
  }
}

TEST(Csv, CommentsAndBlankLinesSkipped)
{
  const auto t = parse("# comment\n\na,b\n1,2\n# mid\n3,4\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.line_numbers, (std::vector<std::size_t>{4, 6}));
}

TEST(Csv, ErrorsCarryLineNumbers)
{
  EXPECT_EQ(error_line("a,b\n1,2\n3\n"), 3u);
  EXPECT_EQ(error_line("a,b\n1,2\n3,x\n"), 3u);
  EXPECT_EQ(error_line("a,b\n\n1,2,3\n"), 3u);
  EXPECT_THROW(parse(""), io::CsvError);
  EXPECT_THROW(parse("# only a comment\n"), io::CsvError);
}

TEST(Csv, ClassificationSummaryLine)
{
  Classification c;
  c.verdict = Verdict::FlockStable;
  c.harmonic = fit_exponent({1, 2, 3}, {0.0, 0.0, 0.0});
  c.impulse = c.harmonic;
  c.slope_threshold = 0.01;
  std::ostringstream out;
  io::write_classification(out, c);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("N,ln_max_harmonic,ln_max_impulse\n", 0), 0u);
  EXPECT_NE(text.find("verdict=flock-stable"), std::string::npos);
  std::istringstream in(text);
  EXPECT_EQ(io::parse_csv(in).rows.size(), 3u);
}

TEST(Plot, SingleStationaryAgentIsVertical)
{
  const auto t = parse("t,z0,zdot0\n0,0.5,0\n1,0.5,0\n2,0.5,0\n");
  const auto fig = plot::space_time(t);
  EXPECT_EQ(fig.extent.series, 1u);
  EXPECT_EQ(fig.extent.x_min, fig.extent.x_max);
  EXPECT_EQ(fig.extent.y_min, 0.0);
  EXPECT_EQ(fig.extent.y_max, 2.0);
  EXPECT_NE(fig.svg.find("<svg"), std::string::npos);
}

TEST(Plot, SpaceTimeExtentUsesSpacing)
{
  const auto t = parse("t,z0,z1,zdot0,zdot1\n0,0,0,0,0\n1,1,0.5,1,1\n");
  plot::Style st;
  st.offset_spacing = 2.0;
  const auto fig = plot::space_time(t, st);
  EXPECT_EQ(fig.extent.series, 2u);
  EXPECT_EQ(fig.extent.x_min, -2.0);
  EXPECT_EQ(fig.extent.x_max, 1.0);
}

TEST(Plot, ResponseAndSpectrumExtents)
{
  const auto r = plot::response(parse("omega,re_a0,im_a0,re_a1,im_a1,gain_a1\n0.1,1,0,1,0,1\n10,1,0,0.01,0,0.01\n"));
  EXPECT_EQ(r.extent.x_min, 0.1);
  EXPECT_EQ(r.extent.x_max, 10.0);
  EXPECT_EQ(r.extent.y_min, 0.01);
  const auto s = plot::spectrum(parse("re,im\n-1,2\n-3,-2\n"));
  EXPECT_EQ(s.extent.x_min, -3.0);
  EXPECT_EQ(s.extent.y_max, 2.0);
}

TEST(Plot, Errors)
{
  auto line_of = [](auto&& fn) -> std::size_t {
    try {
      fn();
    } catch (const io::CsvError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of([] { plot::space_time(parse("t,z0\n")); }), 2u);
  EXPECT_EQ(line_of([] { plot::response(parse("omega,x\n1,2\n")); }), 1u);
  EXPECT_EQ(line_of([] { plot::spectrum(parse("re,im\n1,2\n1,inf\n")); }), 3u);
  EXPECT_THROW(plot::parse_kind("histogram"), std::invalid_argument);
  EXPECT_EQ(plot::parse_kind("spacetime"), plot::Kind::SpaceTime);
}

TEST(Plot, RenderFileIsDeterministic)
{
  const auto csv = scratch("spec.csv");
  {
    std::ofstream out(csv);
    out << "re,im\n-1,0.5\n-1,-0.5\n-0.2,0\n";
  }
  const auto svg = plot::render_file(plot::Kind::Spectrum, csv);
  EXPECT_EQ(svg, scratch("spec.svg"));
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string first = slurp(svg);
  plot::render_file(plot::Kind::Spectrum, csv);
  EXPECT_EQ(slurp(svg), first);
  EXPECT_FALSE(first.empty());
}
