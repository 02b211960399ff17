#include "cuspidal/torus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <thread>
#include <unordered_map>

#include "cuspidal/model.hpp"

namespace cuspidal {

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

TorusGrid::TorusGrid(int n, const Field& field) : n_(n), field_(field) {
  values_.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    const double t3 = theta(static_cast<int>(j));
    for (int i = 0; i < n_; ++i) values_[j * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)] = field_(theta(i), t3);
  });
}

double TorusGrid::step() const { return 2.0 * std::numbers::pi / n_; }

double TorusGrid::theta(int index) const { return -std::numbers::pi + index * step(); }

std::size_t TorusGrid::nearest_node(const TorusPoint& p) const {
  const int i = static_cast<int>(std::lround((p.theta2 + std::numbers::pi) / step()));
  const int j = static_cast<int>(std::lround((p.theta3 + std::numbers::pi) / step()));
  return node(i, j);
}

namespace {

struct Edge {
  std::size_t id;
  int i, j;
  bool vertical;
};

TorusPoint refine_edge(const TorusGrid& grid, const Edge& e) {
  double lo = 0.0, hi = grid.step();
  const double t2 = grid.theta(e.i), t3 = grid.theta(e.j);
  auto eval = [&](double s) {
    return e.vertical ? grid.field()(t2, t3 + s) : grid.field()(t2 + s, t3);
  };
  double flo = grid.at(e.i, e.j);
  for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = eval(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double s = 0.5 * (lo + hi);
  return e.vertical ? TorusPoint{t2, wrap_angle(t3 + s)} : TorusPoint{wrap_angle(t2 + s), t3};
}

}  // namespace

std::vector<ContourLoop> extract_contours(const TorusGrid& grid) {
  const int n = grid.size();
  const std::size_t nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  auto pos = [&](int i, int j) { return grid.at(i, j) > 0.0; };
  auto h_id = [&](int i, int j) { return grid.node(i, j); };
  auto v_id = [&](int i, int j) { return nn + grid.node(i, j); };

  // Segments as pairs of edge ids, in cell order.
  std::vector<std::array<std::size_t, 2>> segments;
  std::unordered_map<std::size_t, Edge> edges;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const bool a = pos(i, j), b = pos(i + 1, j), c = pos(i + 1, j + 1), d = pos(i, j + 1);
      std::array<Edge, 4> side = {Edge{h_id(i, j), i, j, false}, Edge{v_id(i + 1, j), grid.wrap(i + 1), j, true},
                                  Edge{h_id(i, j + 1), i, grid.wrap(j + 1), false}, Edge{v_id(i, j), i, j, true}};
      std::array<bool, 4> cross = {a != b, b != c, d != c, a != d};
      std::vector<int> hit;
      for (int k = 0; k < 4; ++k)
        if (cross[static_cast<std::size_t>(k)]) hit.push_back(k);
      if (hit.empty()) continue;
      for (int k : hit) edges.emplace(side[static_cast<std::size_t>(k)].id, side[static_cast<std::size_t>(k)]);
      if (hit.size() == 2) {
        segments.push_back({side[static_cast<std::size_t>(hit[0])].id, side[static_cast<std::size_t>(hit[1])].id});
        continue;
      }
      const double h = grid.step();
      const bool centre = grid.field()(grid.theta(i) + 0.5 * h, grid.theta(j) + 0.5 * h) > 0.0;
      if (centre == a) {
        segments.push_back({side[0].id, side[1].id});
        segments.push_back({side[2].id, side[3].id});
      } else {
        segments.push_back({side[0].id, side[3].id});
        segments.push_back({side[1].id, side[2].id});
      }
    }
  }

  std::vector<Edge> edge_list;
  edge_list.reserve(edges.size());
  for (const auto& [id, e] : edges) edge_list.push_back(e);
  std::sort(edge_list.begin(), edge_list.end(), [](const Edge& x, const Edge& y) { return x.id < y.id; });
  std::vector<TorusPoint> points(edge_list.size());
  parallel_for(edge_list.size(), [&](std::size_t k) { points[k] = refine_edge(grid, edge_list[k]); });
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t k = 0; k < edge_list.size(); ++k) slot.emplace(edge_list[k].id, k);

  // Each crossing edge borders exactly two segments.
  std::vector<std::array<std::size_t, 2>> incident(edge_list.size(), {SIZE_MAX, SIZE_MAX});
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (std::size_t e : segments[s]) {
      auto& inc = incident[slot.at(e)];
      (inc[0] == SIZE_MAX ? inc[0] : inc[1]) = s;
    }
  }

  std::vector<char> used(segments.size(), 0);
  std::vector<ContourLoop> loops;
  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    ContourLoop loop;
    std::size_t seg = start;
    std::size_t edge = segments[start][0];
    const std::size_t first_edge = edge;
    while (true) {
      used[seg] = 1;
      loop.vertices.push_back(points[slot.at(edge)]);
      const std::size_t next_edge = segments[seg][0] == edge ? segments[seg][1] : segments[seg][0];
      if (next_edge == first_edge) break;
      const auto& inc = incident[slot.at(next_edge)];
      const std::size_t next_seg = inc[0] == seg ? inc[1] : inc[0];
      edge = next_edge;
      if (next_seg == SIZE_MAX || used[next_seg]) {
        loop.vertices.push_back(points[slot.at(edge)]);
        loop.closed = false;
        break;
      }
      seg = next_seg;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

namespace {

Labeling flood(int n, const std::function<bool(std::size_t)>& active,
               const std::function<bool(std::size_t, std::size_t)>& joins) {
  const std::size_t nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  Labeling out;
  out.labels.assign(nn, -1);
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < nn; ++seed) {
    if (out.labels[seed] != -1 || !active(seed)) continue;
    const int label = out.count++;
    out.labels[seed] = label;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(cur % static_cast<std::size_t>(n));
      const int j = static_cast<int>(cur / static_cast<std::size_t>(n));
      const std::array<std::size_t, 4> nb = {
          static_cast<std::size_t>(j * n + (i + 1) % n), static_cast<std::size_t>(j * n + (i + n - 1) % n),
          static_cast<std::size_t>(((j + 1) % n) * n + i), static_cast<std::size_t>(((j + n - 1) % n) * n + i)};
      for (std::size_t k : nb) {
        if (out.labels[k] != -1 || !active(k) || !joins(cur, k)) continue;
        out.labels[k] = label;
        stack.push_back(k);
      }
    }
  }
  return out;
}

}  // namespace

Labeling label_sign_components(const TorusGrid& grid) {
  const int n = grid.size();
  auto sign = [&](std::size_t k) {
    return grid.at(static_cast<int>(k % static_cast<std::size_t>(n)), static_cast<int>(k / static_cast<std::size_t>(n))) > 0.0;
  };
  return flood(n, [](std::size_t) { return true; },
               [&](std::size_t a, std::size_t b) { return sign(a) == sign(b); });
}

Labeling label_mask_components(int n, const std::vector<char>& mask) {
  return flood(n, [&](std::size_t k) { return mask[k] != 0; },
               [](std::size_t, std::size_t) { return true; });
}

}  // namespace cuspidal
