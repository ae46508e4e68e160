#include "flocklab/io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace flocklab::io {

std::string format_number(double x)
{
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvError::CsvError(std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("line {}: {}", line, what)), line_(line)
{
}

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ','))
    out.push_back(field);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

std::string trim(std::string s)
{
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, std::size_t line)
{
  const std::string s = trim(raw);
  if (s == "nan")
    return std::nan("");
  if (s == "inf")
    return INFINITY;
  if (s == "-inf")
    return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw CsvError(line, fmt::format("not a number: '{}'", s));
  return v;
}

} // namespace

CsvTable parse_csv(std::istream& in)
{
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#')
      continue;
    auto fields = split_fields(body);
    if (!have_header) {
      for (auto& f : fields)
        t.header.push_back(trim(f));
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw CsvError(lineno, fmt::format("expected {} fields, found {}",
                                         t.header.size(), fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields)
      row.push_back(parse_number(f, lineno));
    t.rows.push_back(std::move(row));
    t.line_numbers.push_back(lineno);
  }
  if (!have_header)
    throw CsvError(lineno == 0 ? 1 : lineno, "empty CSV (no header)");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw CsvError(0, "cannot open " + path.string());
  return parse_csv(in);
}

void write_trajectory(std::ostream& out, const Trajectory& traj)
{
  const auto n = traj.states.empty() ? 0 : traj.states.front().z.size();
  out << "t";
  for (Eigen::Index k = 0; k < n; ++k)
    out << ",z" << k;
  for (Eigen::Index k = 0; k < n; ++k)
    out << ",zdot" << k;
  out << '\n';
  for (const FlockState& s : traj.states) {
    out << format_number(s.t);
    for (Eigen::Index k = 0; k < n; ++k)
      out << ',' << format_number(s.z(k));
    for (Eigen::Index k = 0; k < n; ++k)
      out << ',' << format_number(s.zdot(k));
    out << '\n';
  }
}

void write_spectrum(std::ostream& out, const std::vector<Complex>& eigs)
{
  out << "re,im\n";
  for (const Complex& l : eigs)
    out << format_number(l.real()) << ',' << format_number(l.imag()) << '\n';
}

void write_response(std::ostream& out, const ResponseTable& table)
{
  Eigen::Index n = 0;
  for (const auto& row : table.rows)
    if (row.ok()) {
      n = row.amplitudes.size();
      break;
    }
  out << "omega";
  for (Eigen::Index k = 0; k < n; ++k)
    out << ",re_a" << k << ",im_a" << k;
  out << ",gain_a" << (n > 0 ? n - 1 : 0) << '\n';
  for (const auto& row : table.rows) {
    if (!row.ok())
      continue;
    out << format_number(row.omega);
    for (Eigen::Index k = 0; k < n; ++k)
      out << ',' << format_number(row.amplitudes(k).real()) << ','
          << format_number(row.amplitudes(k).imag());
    out << ',' << format_number(row.gains(n - 1)) << '\n';
  }
}

void write_classification(std::ostream& out, const Classification& c)
{
  out << "N,ln_max_harmonic,ln_max_impulse\n";
  for (std::size_t i = 0; i < c.harmonic.N_list.size(); ++i)
    out << c.harmonic.N_list[i] << ','
        << format_number(c.harmonic.per_N_values[i]) << ','
        << format_number(c.impulse.per_N_values[i]) << '\n';
  out << "# harmonic_slope=" << format_number(c.harmonic.slope)
      << " impulse_slope=" << format_number(c.impulse.slope)
      << " harmonic_linear_slope=" << format_number(c.harmonic.linear_slope)
      << " impulse_linear_slope=" << format_number(c.impulse.linear_slope)
      << " threshold=" << format_number(c.slope_threshold)
      << " verdict=" << to_string(c.verdict) << '\n';
}

void write_ledger(std::ostream& out, const LedgerSeries& series)
{
  out << "t,lhs,rhs,residual\n";
  for (std::size_t i = 0; i < series.times.size(); ++i)
    out << format_number(series.times[i]) << ',' << format_number(series.lhs[i])
        << ',' << format_number(series.rhs[i]) << ','
        << format_number(series.residual[i]) << '\n';
}

void write_planar(std::ostream& out, const std::vector<PlanarState>& states)
{
  const std::size_t n = states.empty() ? 0 : states.front().positions.size();
  out << "t";
  for (std::size_t k = 0; k < n; ++k)
    out << ",x" << k << ",y" << k;
  for (std::size_t k = 0; k < n; ++k)
    out << ",vx" << k << ",vy" << k;
  out << '\n';
  for (const PlanarState& s : states) {
    out << format_number(s.t);
    for (const Vec2& p : s.positions)
      out << ',' << format_number(p.x()) << ',' << format_number(p.y());
    for (const Vec2& v : s.velocities)
      out << ',' << format_number(v.x()) << ',' << format_number(v.y());
    out << '\n';
  }
}

void write_snapshot(std::ostream& out, const PlanarState& state)
{
  out << "agent,x,y,vx,vy\n";
  for (std::size_t k = 0; k < state.positions.size(); ++k)
    out << k << ',' << format_number(state.positions[k].x()) << ','
        << format_number(state.positions[k].y()) << ','
        << format_number(state.velocities[k].x()) << ','
        << format_number(state.velocities[k].y()) << '\n';
}

} // namespace flocklab::io
