#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cuspidal {

/// Runs body(i) for i in [0, count) on the available hardware threads. Each
/// index must write only its own output slot; results are then independent
/// of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

struct TorusPoint {
  double theta2 = 0.0;
  double theta3 = 0.0;
};

/// Samples of a scalar field on the N x N grid over [-pi, pi)^2. Node (i, j)
/// sits at (theta(i), theta(j)); i runs along theta2, j along theta3.
class TorusGrid {
 public:
  using Field = std::function<double(double theta2, double theta3)>;

  TorusGrid(int n, const Field& field);

  int size() const { return n_; }
  double step() const;
  double theta(int index) const;
  int wrap(int index) const { return ((index % n_) + n_) % n_; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(wrap(j) * n_ + wrap(i))]; }
  std::size_t node(int i, int j) const { return static_cast<std::size_t>(wrap(j) * n_ + wrap(i)); }
  /// Grid node nearest to a torus point.
  std::size_t nearest_node(const TorusPoint& p) const;
  const Field& field() const { return field_; }

 private:
  int n_;
  Field field_;
  std::vector<double> values_;
};

/// A zero-level polyline of the sampled field. Vertices are wrapped to the
/// torus; consecutive vertices are at most one cell apart.
struct ContourLoop {
  std::vector<TorusPoint> vertices;
  bool closed = true;
};

/// Marching squares on the torus. Crossings are refined by bisection of the
/// field along grid edges; saddle cells are resolved by the field value at
/// the cell centre.
std::vector<ContourLoop> extract_contours(const TorusGrid& grid);

/// Connected components of grid nodes with the same sign (4-connected, with
/// wraparound). Returns the label of every node and the component count.
struct Labeling {
  std::vector<int> labels;
  int count = 0;
};
Labeling label_sign_components(const TorusGrid& grid);

/// Components of the nodes where mask is true (4-connected, wraparound);
/// other nodes get label -1.
Labeling label_mask_components(int n, const std::vector<char>& mask);

}  // namespace cuspidal
