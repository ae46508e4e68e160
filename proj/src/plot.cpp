#include "flocklab/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace flocklab::plot {

namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 50.0;

struct Axis
{
  double lo, hi;
  bool log;

  double map(double v) const
  {
    if (log)
      return (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
    return (v - lo) / (hi - lo);
  }
};

// Pads a degenerate or tight range so the data does not touch the frame.
Axis make_axis(double lo, double hi, bool log)
{
  if (log) {
    lo = std::pow(10.0, std::floor(std::log10(lo)));
    hi = std::pow(10.0, std::ceil(std::log10(hi)));
    if (hi <= lo)
      hi = lo * 10.0;
    return {lo, hi, true};
  }
  if (hi - lo <= 0.0) {
    const double pad = std::max(1.0, std::abs(lo) * 0.1);
    return {lo - pad, hi + pad, false};
  }
  const double pad = 0.04 * (hi - lo);
  return {lo - pad, hi + pad, false};
}

std::vector<double> ticks(const Axis& a)
{
  std::vector<double> out;
  if (a.log) {
    const double lo = std::round(std::log10(a.lo));
    const double hi = std::round(std::log10(a.hi));
    const double step = std::max(1.0, std::ceil((hi - lo) / 8.0));
    for (double e = std::ceil(lo / step) * step; e <= hi + 1e-9; e += step)
      out.push_back(std::pow(10.0, e));
    return out;
  }
  const double raw = (a.hi - a.lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  for (double v = std::ceil(a.lo / step) * step; v <= a.hi + 1e-12 * step; v += step)
    out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return out;
}

std::string tick_label(double v, bool log)
{
  if (log)
    return fmt::format("1e{}", static_cast<int>(std::round(std::log10(v))));
  return fmt::format("{:g}", v);
}

std::string escape(const std::string& s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

class Canvas
{
public:
  Canvas(const Style& st, Axis x, Axis y, const std::string& xlabel,
         const std::string& ylabel)
      : st_(st), x_(x), y_(y)
  {
    pw_ = st.width - kLeft - kRight;
    ph_ = st.height - kTop - kBottom;
    svg_ += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"11\">\n",
        st.width, st.height);
    svg_ += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
                        st.width, st.height);
    if (!st.title.empty())
      svg_ += fmt::format("<text x=\"{:.2f}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                          st.width / 2, escape(st.title));
    for (double t : ticks(x_)) {
      const double px = X(t);
      svg_ += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#ddd\"/>\n",
                          px, kTop, kTop + ph_);
      svg_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                          px, kTop + ph_ + 15, tick_label(t, x_.log));
    }
    for (double t : ticks(y_)) {
      const double py = Y(t);
      svg_ += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n",
                          kLeft, py, kLeft + pw_);
      svg_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n",
                          kLeft - 5, py + 4, tick_label(t, y_.log));
    }
    svg_ += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
                        "fill=\"none\" stroke=\"black\"/>\n",
                        kLeft, kTop, pw_, ph_);
    svg_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                        kLeft + pw_ / 2, st.height - 12, escape(xlabel));
    svg_ += fmt::format("<text x=\"14\" y=\"{0:.2f}\" text-anchor=\"middle\" "
                        "transform=\"rotate(-90 14 {0:.2f})\">{1}</text>\n",
                        kTop + ph_ / 2, escape(ylabel));
  }

  double X(double v) const { return kLeft + x_.map(v) * pw_; }
  double Y(double v) const { return kTop + (1.0 - y_.map(v)) * ph_; }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color, double width)
  {
    const std::size_t n = xs.size();
    const std::size_t step = std::max<std::size_t>(1, (n + st_.max_points - 1) / st_.max_points);
    std::string pts;
    for (std::size_t i = 0; i < n; i += step)
      pts += fmt::format("{:.2f},{:.2f} ", X(xs[i]), Y(ys[i]));
    if (n > 0 && (n - 1) % step != 0)
      pts += fmt::format("{:.2f},{:.2f} ", X(xs[n - 1]), Y(ys[n - 1]));
    if (!pts.empty())
      pts.pop_back();
    svg_ += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"{}\"/>\n",
                        color, width, pts);
  }

  void dot(double x, double y, const std::string& color)
  {
    svg_ += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n",
                        X(x), Y(y), color);
  }

  void vline(double x, const std::string& color)
  {
    svg_ += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" "
                        "stroke=\"{3}\" stroke-dasharray=\"4 3\"/>\n",
                        X(x), kTop, kTop + ph_, color);
  }

  std::string finish() { return svg_ + "</svg>\n"; }

private:
  Style st_;
  Axis x_, y_;
  double pw_ = 0.0, ph_ = 0.0;
  std::string svg_;
};

std::size_t column(const io::CsvTable& t, const std::string& name)
{
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end())
    throw io::CsvError(1, fmt::format("missing column '{}'", name));
  return static_cast<std::size_t>(it - t.header.begin());
}

void require_rows(const io::CsvTable& t)
{
  if (t.rows.empty())
    throw io::CsvError(t.line_numbers.empty() ? 2 : t.line_numbers.back(), "no data rows");
}

void require_finite(const io::CsvTable& t, std::size_t row, double v)
{
  if (!std::isfinite(v))
    throw io::CsvError(t.line_numbers[row], "non-finite value");
}

const char* palette(std::size_t i)
{
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  return colors[i % 8];
}

} // namespace

Kind parse_kind(const std::string& name)
{
  if (name == "spacetime")
    return Kind::SpaceTime;
  if (name == "response")
    return Kind::Response;
  if (name == "spectrum")
    return Kind::Spectrum;
  throw std::invalid_argument("unknown plot kind '" + name + "'");
}

Figure space_time(const io::CsvTable& table, const Style& style)
{
  require_rows(table);
  const std::size_t tc = column(table, "t");
  std::vector<std::size_t> zc;
  for (int k = 0;; ++k) {
    const auto it = std::find(table.header.begin(), table.header.end(), "z" + std::to_string(k));
    if (it == table.header.end())
      break;
    zc.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  if (zc.empty())
    throw io::CsvError(1, "missing column 'z0'");

  const std::size_t rows = table.rows.size();
  std::vector<double> ts(rows);
  std::vector<std::vector<double>> xs(zc.size(), std::vector<double>(rows));
  Extent e;
  e.x_min = e.y_min = std::numeric_limits<double>::infinity();
  e.x_max = e.y_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows; ++i) {
    ts[i] = table.rows[i][tc];
    require_finite(table, i, ts[i]);
    e.y_min = std::min(e.y_min, ts[i]);
    e.y_max = std::max(e.y_max, ts[i]);
    for (std::size_t k = 0; k < zc.size(); ++k) {
      const double x = table.rows[i][zc[k]] - style.offset_spacing * static_cast<double>(k);
      require_finite(table, i, x);
      xs[k][i] = x;
      e.x_min = std::min(e.x_min, x);
      e.x_max = std::max(e.x_max, x);
    }
  }
  e.series = zc.size();

  Canvas c(style, make_axis(e.x_min, e.x_max, false), make_axis(e.y_min, e.y_max, false),
           "position", "time");
  for (std::size_t k = 0; k < zc.size(); ++k)
    c.polyline(xs[k], ts, k == 0 ? "#d62728" : "#1f4e79", k == 0 ? 1.5 : 0.7);
  return {c.finish(), e};
}

Figure response(const io::CsvTable& table, const Style& style)
{
  require_rows(table);
  const std::size_t oc = column(table, "omega");
  std::size_t gc = table.header.size();
  for (std::size_t j = 0; j < table.header.size(); ++j)
    if (table.header[j].rfind("gain_a", 0) == 0)
      gc = j;
  if (gc == table.header.size())
    throw io::CsvError(1, "missing gain column");

  std::vector<double> w, gain;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const double o = table.rows[i][oc];
    const double g = table.rows[i][gc];
    if (!(o > 0.0) || !std::isfinite(o))
      throw io::CsvError(table.line_numbers[i], "omega must be positive and finite");
    if (!(g > 0.0) || !std::isfinite(g))
      throw io::CsvError(table.line_numbers[i], "gain must be positive and finite");
    w.push_back(o);
    gain.push_back(g);
  }
  Extent e;
  e.x_min = *std::min_element(w.begin(), w.end());
  e.x_max = *std::max_element(w.begin(), w.end());
  e.y_min = *std::min_element(gain.begin(), gain.end());
  e.y_max = *std::max_element(gain.begin(), gain.end());
  e.series = 1;

  Canvas c(style, make_axis(e.x_min, e.x_max, true), make_axis(e.y_min, e.y_max, true),
           "omega", table.header[gc]);
  c.polyline(w, gain, palette(0), 1.2);
  return {c.finish(), e};
}

Figure spectrum(const io::CsvTable& table, const Style& style)
{
  require_rows(table);
  const std::size_t rc = column(table, "re");
  const std::size_t ic = column(table, "im");
  Extent e;
  e.x_min = e.y_min = std::numeric_limits<double>::infinity();
  e.x_max = e.y_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const double re = table.rows[i][rc], im = table.rows[i][ic];
    require_finite(table, i, re);
    require_finite(table, i, im);
    e.x_min = std::min(e.x_min, re);
    e.x_max = std::max(e.x_max, re);
    e.y_min = std::min(e.y_min, im);
    e.y_max = std::max(e.y_max, im);
  }
  e.series = 1;

  // keep the imaginary axis in view
  const Axis xa = make_axis(std::min(e.x_min, 0.0), std::max(e.x_max, 0.0), false);
  Canvas c(style, xa, make_axis(e.y_min, e.y_max, false), "Re", "Im");
  c.vline(0.0, "#888");
  for (const auto& row : table.rows)
    c.dot(row[rc], row[ic], palette(0));
  return {c.finish(), e};
}

Figure render(Kind kind, const io::CsvTable& table, const Style& style)
{
  switch (kind) {
  case Kind::SpaceTime: return space_time(table, style);
  case Kind::Response: return response(table, style);
  case Kind::Spectrum: return spectrum(table, style);
  }
  throw std::logic_error("bad plot kind");
}

std::filesystem::path render_file(Kind kind, const std::filesystem::path& csv,
                                  std::filesystem::path svg, const Style& style)
{
  if (svg.empty()) {
    svg = csv;
    svg.replace_extension(".svg");
  }
  const Figure fig = render(kind, io::read_csv(csv), style);
  io::write_file(svg, [&](std::ostream& out) { out << fig.svg; });
  return svg;
}

} // namespace flocklab::plot
