#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace spin7 {

// Uniform tensor grid with n[a] points per axis including both end points.
struct GridSpec {
  int dim = 3;
  std::array<double, 4> lo{};
  std::array<double, 4> hi{};
  std::array<int, 4> n{};

  static GridSpec cube(int dim, double lo, double hi, int n);
  void validate() const;  // throws std::invalid_argument

  std::size_t size() const;
  std::size_t stride(int axis) const;
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (n[axis] - 1); }
  double coord(int axis, int i) const { return lo[axis] + i * spacing(axis); }
  std::array<int, 4> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<int, 4>& idx) const;
  bool on_boundary(const std::array<int, 4>& idx) const;
  std::array<double, 4> point(std::size_t flat) const;
};

struct GridField {
  GridSpec spec;
  std::vector<std::string> axis_names;
  std::vector<double> values;
  std::vector<std::uint8_t> boundary;

  static GridField sample(const GridSpec& spec, std::vector<std::string> axis_names,
                          const std::function<double(const std::array<double, 4>&)>& f);
  double at(const std::array<int, 4>& idx) const { return values[spec.flatten(idx)]; }
};

// CSV with '#'-prefixed header lines for axes, box and resolution, then one row per
// grid point in row-major order (last axis fastest): coordinates followed by value.
void write_csv(std::ostream& os, const GridField& f);
GridField read_csv(std::istream& is);

}  // namespace spin7
