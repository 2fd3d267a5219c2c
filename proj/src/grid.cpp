#include "spin7/grid.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "spin7/errors.hpp"

namespace spin7 {

GridSpec GridSpec::cube(int dim, double lo, double hi, int n) {
  GridSpec s;
  s.dim = dim;
  for (int a = 0; a < dim; ++a) {
    s.lo[a] = lo;
    s.hi[a] = hi;
    s.n[a] = n;
  }
  s.validate();
  return s;
}

void GridSpec::validate() const {
  if (dim < 1 || dim > 4) throw std::invalid_argument("grid dimension must be 1..4");
  for (int a = 0; a < dim; ++a) {
    if (n[a] < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
    if (!(hi[a] > lo[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a])) {
      throw std::invalid_argument("grid box must satisfy lo < hi");
    }
  }
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n[a]);
  return s;
}

std::size_t GridSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int a = dim - 1; a > axis; --a) s *= static_cast<std::size_t>(n[a]);
  return s;
}

std::array<int, 4> GridSpec::unflatten(std::size_t flat) const {
  std::array<int, 4> idx{};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n[a]);
    flat /= n[a];
  }
  return idx;
}

std::size_t GridSpec::flatten(const std::array<int, 4>& idx) const {
  std::size_t f = 0;
  for (int a = 0; a < dim; ++a) f = f * n[a] + idx[a];
  return f;
}

bool GridSpec::on_boundary(const std::array<int, 4>& idx) const {
  for (int a = 0; a < dim; ++a) {
    if (idx[a] == 0 || idx[a] == n[a] - 1) return true;
  }
  return false;
}

std::array<double, 4> GridSpec::point(std::size_t flat) const {
  auto idx = unflatten(flat);
  std::array<double, 4> p{};
  for (int a = 0; a < dim; ++a) p[a] = coord(a, idx[a]);
  return p;
}

GridField GridField::sample(const GridSpec& spec, std::vector<std::string> axis_names,
                            const std::function<double(const std::array<double, 4>&)>& f) {
  spec.validate();
  GridField g;
  g.spec = spec;
  g.axis_names = std::move(axis_names);
  g.values.resize(spec.size());
  g.boundary.resize(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    g.values[i] = f(spec.point(i));
    g.boundary[i] = spec.on_boundary(spec.unflatten(i)) ? 1 : 0;
  }
  return g;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

double parse_double(const std::string& s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad number in grid csv: " + s);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

void write_csv(std::ostream& os, const GridField& f) {
  const GridSpec& s = f.spec;
  os << "# axes=";
  for (int a = 0; a < s.dim; ++a) os << (a ? "," : "") << f.axis_names.at(a);
  os << "\n# box=";
  for (int a = 0; a < s.dim; ++a) os << (a ? "," : "") << fmt(s.lo[a]) << ":" << fmt(s.hi[a]);
  os << "\n# n=";
  for (int a = 0; a < s.dim; ++a) os << (a ? "," : "") << s.n[a];
  os << "\n";
  for (int a = 0; a < s.dim; ++a) os << f.axis_names[a] << ",";
  os << "value,boundary\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto p = s.point(i);
    for (int a = 0; a < s.dim; ++a) os << fmt(p[a]) << ",";
    os << fmt(f.values[i]) << "," << static_cast<int>(f.boundary[i]) << "\n";
  }
}

GridField read_csv(std::istream& is) {
  GridField f;
  std::string line;
  bool have_axes = false, have_box = false, have_n = false;
  while (is.peek() == '#' && std::getline(is, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(2, eq - 2), val = line.substr(eq + 1);
    if (key == "axes") {
      f.axis_names = split(val, ',');
      have_axes = true;
    } else if (key == "box") {
      auto parts = split(val, ',');
      for (std::size_t a = 0; a < parts.size() && a < 4; ++a) {
        auto lh = split(parts[a], ':');
        if (lh.size() != 2) throw ParseError("bad box entry in grid csv");
        f.spec.lo[a] = parse_double(lh[0]);
        f.spec.hi[a] = parse_double(lh[1]);
      }
      have_box = true;
    } else if (key == "n") {
      auto parts = split(val, ',');
      for (std::size_t a = 0; a < parts.size() && a < 4; ++a) f.spec.n[a] = std::stoi(parts[a]);
      f.spec.dim = static_cast<int>(parts.size());
      have_n = true;
    }
  }
  if (!have_axes || !have_box || !have_n) throw ParseError("grid csv header incomplete");
  f.spec.validate();
  std::getline(is, line);  // column titles
  const std::size_t total = f.spec.size();
  f.values.reserve(total);
  f.boundary.reserve(total);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != static_cast<std::size_t>(f.spec.dim) + 2) throw ParseError("bad row in grid csv");
    f.values.push_back(parse_double(cols[f.spec.dim]));
    f.boundary.push_back(static_cast<std::uint8_t>(std::stoi(cols[f.spec.dim + 1])));
  }
  if (f.values.size() != total) throw ParseError("grid csv row count does not match n");
  return f;
}

}  // namespace spin7
