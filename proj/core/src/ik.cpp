#include "cuspidal/ik.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

#include "cuspidal/errors.hpp"
#include "cuspidal/polynomial.hpp"

namespace cuspidal {

namespace {

constexpr double kPi = std::numbers::pi;
// Roots of P closer than this (in theta3) are candidates for merging.
constexpr double kClusterRadius = 1e-3;
// A merged root of multiplicity m must annihilate Q..Q^(m-1) to this
// fraction of the coefficient norm.
constexpr double kCertifyTol = 1e-10;
// Leading coefficient below this fraction of max|c|: root at t = infinity.
constexpr double kDegreeDropTol = 1e-10;

struct Candidate {
  std::complex<double> theta;  // 2 atan(t); real part wrapped to [-pi, pi)
};

double wrapped_distance(std::complex<double> a, std::complex<double> b) {
  const double dr = angle_difference(a.real(), b.real());
  return std::hypot(dr, a.imag() - b.imag());
}

double newton_on_derivative(const Eliminant& q, double theta, int order) {
  for (int it = 0; it < 40; ++it) {
    const double f = q.value(theta, order);
    const double df = q.value(theta, order + 1);
    if (df == 0.0 || !std::isfinite(df)) break;
    double step = f / df;
    step = std::clamp(step, -0.05, 0.05);
    theta -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return theta;
}

bool certified(const Eliminant& q, double theta, int multiplicity) {
  const double tol = kCertifyTol * q.norm();
  for (int k = 0; k < multiplicity; ++k)
    if (std::abs(q.value(theta, k)) > tol * std::pow(2.0, k)) return false;
  return true;
}

// Tries to certify a group of candidates as one real root of multiplicity
// group.size(). Returns the polished root or nothing.
std::optional<EliminantRoot> certify_group(const Eliminant& q, const std::vector<Candidate>& group) {
  const int m = static_cast<int>(group.size());
  std::complex<double> mean = 0.0;
  const double ref = group.front().theta.real();
  for (const auto& c : group)
    mean += std::complex<double>(ref + angle_difference(ref, c.theta.real()), c.theta.imag());
  mean /= static_cast<double>(m);
  if (std::abs(mean.imag()) > 1e-9) return std::nullopt;
  const double seed = wrap_angle(mean.real());
  double theta = newton_on_derivative(q, seed, m - 1);
  if (std::abs(angle_difference(seed, theta)) > kClusterRadius) theta = seed;
  if (!certified(q, theta, m)) return std::nullopt;
  return EliminantRoot{wrap_angle(theta), m};
}

std::optional<EliminantRoot> simple_root(const Eliminant& q, const Candidate& c) {
  if (std::abs(c.theta.imag()) > 1e-12) return std::nullopt;
  const double seed = c.theta.real();
  double theta = newton_on_derivative(q, seed, 0);
  if (std::abs(angle_difference(seed, theta)) > 1e-4) theta = seed;
  return EliminantRoot{wrap_angle(theta), 1};
}

void resolve_cluster(const Eliminant& q, std::vector<Candidate> cluster,
                     std::vector<EliminantRoot>& out) {
  if (cluster.empty()) return;
  if (cluster.size() == 1) {
    if (auto r = simple_root(q, cluster.front())) out.push_back(*r);
    return;
  }
  if (auto r = certify_group(q, cluster)) {
    out.push_back(*r);
    return;
  }
  // Largest certifiable sub-cluster first, then the remainder.
  const std::size_t n = cluster.size();
  for (std::size_t size = n - 1; size >= 2; --size) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    // Enumerate combinations of `size` members.
    while (true) {
      std::vector<Candidate> sub, rest;
      std::vector<bool> used(n, false);
      for (std::size_t i : idx) {
        sub.push_back(cluster[i]);
        used[i] = true;
      }
      for (std::size_t i = 0; i < n; ++i)
        if (!used[i]) rest.push_back(cluster[i]);
      if (auto r = certify_group(q, sub)) {
        out.push_back(*r);
        resolve_cluster(q, std::move(rest), out);
        return;
      }
      std::size_t k = size;
      while (k > 0 && idx[k - 1] == n - size + k - 1) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t j = k; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  for (const auto& c : cluster)
    if (auto r = simple_root(q, c)) out.push_back(*r);
}

}  // namespace

IKQuery IKQuery::from_point(const WorkspacePoint& p) {
  return {p.x * p.x + p.y * p.y, p.z * p.z, (p.z > 0.0) - (p.z < 0.0)};
}

double Eliminant::value(double theta, int order) const {
  // d^k/dθ^k of cos(nθ), sin(nθ) via phase shifts of k * pi / 2.
  const double shift = order * kPi / 2.0;
  const double f2 = std::pow(2.0, order);
  double v = order == 0 ? q0 : 0.0;
  v += (qc * std::cos(theta + shift) + qs * std::sin(theta + shift));
  v += f2 * (qc2 * std::cos(2.0 * theta + shift) + qs2 * std::sin(2.0 * theta + shift));
  return v;
}

double Eliminant::norm() const {
  return std::abs(q0) + std::abs(qc) + std::abs(qs) + std::abs(qc2) + std::abs(qs2);
}

QuarticCoefficients Eliminant::half_angle() const {
  // Back to the monomial form A0 + B c + C s + Dc c^2 + Ds s^2 + E c s.
  // q0 = A0 + (Dc + Ds)/2, qc2 = (Dc - Ds)/2. Choosing Ds = 0 is exact: the
  // split between A0, Dc and Ds is not unique since c^2 + s^2 = 1.
  const double Dc = 2.0 * qc2;
  const double A0 = q0 - qc2;
  const double B = qc, C = qs, E = 2.0 * qs2, Ds = 0.0;
  return {A0 + B + Dc, 2.0 * C + 2.0 * E, 2.0 * A0 - 2.0 * Dc + 4.0 * Ds, 2.0 * C - 2.0 * E,
          A0 - B + Dc};
}

void require_quartic_inverse(const ManipulatorModel& model) {
  if (!model.orthogonal())
    throw AnalysisError(ErrorKind::NotOrthogonal,
                        "closed-form inverse kinematics needs mutually orthogonal axes");
  if (model.length_is_zero(model.params().a1) || model.params().a1 <= 0.0)
    throw AnalysisError(ErrorKind::ZeroA1, "elimination divides by a1; a1 must be > 0");
}

namespace {

struct MonomialForm {
  double A0, B, C, Dc, Ds, E, K0;
};

MonomialForm monomial_form(const ManipulatorModel& model, double R, double Z) {
  const DHParams& p = model.params();
  const double s = model.sin_alpha2();
  const double a1sq = p.a1 * p.a1;
  const double K0 = R + Z + a1sq - p.d3 * p.d3 - (p.a2 * p.a2 + p.a3 * p.a3 + p.d2 * p.d2);
  const double kc = -2.0 * p.a2 * p.a3;
  const double ks = -2.0 * s * p.d2 * p.a3;
  const double ls = s * p.a3;
  MonomialForm f{};
  f.K0 = K0;
  f.A0 = K0 * K0 - 4.0 * a1sq * R + 4.0 * a1sq * p.d2 * p.d2;
  f.B = 2.0 * K0 * kc;
  f.C = 2.0 * K0 * ks + 8.0 * a1sq * p.d2 * ls;
  f.Dc = kc * kc;
  f.Ds = ks * ks + 4.0 * a1sq * ls * ls;
  f.E = 2.0 * kc * ks;
  return f;
}

}  // namespace

Eliminant eliminant(const ManipulatorModel& model, double R, double Z) {
  require_quartic_inverse(model);
  const MonomialForm f = monomial_form(model, R, Z);
  return {f.A0 + 0.5 * (f.Dc + f.Ds), f.B, f.C, 0.5 * (f.Dc - f.Ds), 0.5 * f.E};
}

QuarticCoefficients quartic_coefficients(const ManipulatorModel& model, const IKQuery& query) {
  require_quartic_inverse(model);
  const MonomialForm f = monomial_form(model, query.R, query.Z);
  return {f.A0 + f.B + f.Dc, 2.0 * f.C + 2.0 * f.E, 2.0 * f.A0 - 2.0 * f.Dc + 4.0 * f.Ds,
          2.0 * f.C - 2.0 * f.E, f.A0 - f.B + f.Dc};
}

QuarticSensitivity quartic_sensitivity(const ManipulatorModel& model, double R, double Z) {
  require_quartic_inverse(model);
  const DHParams& p = model.params();
  const MonomialForm f = monomial_form(model, R, Z);
  const double kc = -2.0 * p.a2 * p.a3;
  const double ks = -2.0 * model.sin_alpha2() * p.d2 * p.a3;
  const double a1sq = p.a1 * p.a1;

  auto coeffs = [](double dA0, double dB, double dC) -> QuarticCoefficients {
    return {dA0 + dB, 2.0 * dC, 2.0 * dA0, 2.0 * dC, dA0 - dB};
  };
  QuarticSensitivity s;
  s.d_R = coeffs(2.0 * f.K0 - 4.0 * a1sq, 2.0 * kc, 2.0 * ks);
  s.d_Z = coeffs(2.0 * f.K0, 2.0 * kc, 2.0 * ks);
  return s;
}

std::vector<EliminantRoot> eliminant_roots(const Eliminant& q) {
  const QuarticCoefficients c = q.half_angle();
  const double norm = poly_norm(c);
  if (norm == 0.0) return {};
  const auto troots = poly_roots(c, kDegreeDropTol);

  std::vector<Candidate> cands;
  for (const auto& t : troots) {
    std::complex<double> th = 2.0 * std::atan(t);
    th = {wrap_angle(th.real()), th.imag()};
    cands.push_back({th});
  }
  for (std::size_t k = troots.size(); k < 4; ++k) cands.push_back({{-kPi, 0.0}});

  // Union-find clustering on the circle.
  const std::size_t n = cands.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (wrapped_distance(cands[i].theta, cands[j].theta) < kClusterRadius)
        parent[find(i)] = find(j);

  std::vector<EliminantRoot> roots;
  for (std::size_t i = 0; i < n; ++i) {
    if (find(i) != i) continue;
    std::vector<Candidate> cluster;
    for (std::size_t j = 0; j < n; ++j)
      if (find(j) == i) cluster.push_back(cands[j]);
    resolve_cluster(q, std::move(cluster), roots);
  }
  std::sort(roots.begin(), roots.end(),
            [](const EliminantRoot& a, const EliminantRoot& b) { return a.theta3 < b.theta3; });
  return roots;
}

double ik_tolerance(const ManipulatorModel& model) { return 1e-8 * model.length_scale(); }

std::vector<IKSolution> solve_ik(const ManipulatorModel& model, const WorkspacePoint& p) {
  require_quartic_inverse(model);
  const DHParams& dh = model.params();
  const double L = model.length_scale();
  const IKQuery query = IKQuery::from_point(p);
  const Eliminant q = eliminant(model, query.R, query.Z);

  std::vector<IKSolution> out;
  for (const EliminantRoot& root : eliminant_roots(q)) {
    const double th3 = root.theta3;
    const double c3 = std::cos(th3), s3 = std::sin(th3);
    const double sa1 = model.sin_alpha1(), sa2 = model.sin_alpha2();
    const double x3 = dh.a2 + dh.a3 * c3;
    const double y3 = -dh.d3 * sa2;
    const double K = query.R + query.Z + dh.a1 * dh.a1 - dh.d3 * dh.d3 -
                     (dh.a2 * dh.a2 + dh.a3 * dh.a3 + dh.d2 * dh.d2) - 2.0 * dh.a2 * dh.a3 * c3 -
                     2.0 * sa2 * dh.d2 * dh.a3 * s3;
    const double x2 = K / (2.0 * dh.a1);

    IKSolution sol;
    sol.multiplicity = root.multiplicity;
    sol.t = std::abs(angle_difference(th3, kPi)) < 1e-12 ? std::numeric_limits<double>::infinity()
                                                         : std::tan(th3 / 2.0);
    double th2 = 0.0;
    const double det = x3 * x3 + y3 * y3;
    if (det < 1e-20 * L * L) {
      sol.free_theta2 = true;
    } else {
      const double rhs1 = x2 - dh.a1, rhs2 = sa1 * p.z;
      const double c2 = (x3 * rhs1 + y3 * rhs2) / det;
      const double s2 = (x3 * rhs2 - y3 * rhs1) / det;
      th2 = std::atan2(s2, c2);
    }
    const Eigen::Vector3d h = arm_point(model, th2, th3).position;
    double th1 = 0.0;
    const double n = h.x() * h.x() + h.y() * h.y();
    if (n < 1e-20 * L * L) {
      sol.free_theta1 = true;
    } else {
      th1 = std::atan2(h.x() * p.y - h.y() * p.x, h.x() * p.x + h.y() * p.y);
    }
    sol.config = JointConfig{th1, th2, th3}.normalized();
    const WorkspacePoint f = forward(model, sol.config);
    sol.residual = std::sqrt((f.x - p.x) * (f.x - p.x) + (f.y - p.y) * (f.y - p.y) +
                             (f.z - p.z) * (f.z - p.z));
    // Merged multiple roots carry the error of the cluster mean.
    const double gate = root.multiplicity == 1 ? ik_tolerance(model) : 1e-6 * L;
    if (sol.residual < gate) out.push_back(sol);
  }
  return out;
}

int IKCount::total() const { return std::accumulate(multiplicities.begin(), multiplicities.end(), 0); }

IKCount count_ik(const ManipulatorModel& model, const WorkspacePoint& p) {
  IKCount c;
  for (const auto& s : solve_ik(model, p)) c.multiplicities.push_back(s.multiplicity);
  std::sort(c.multiplicities.rbegin(), c.multiplicities.rend());
  c.distinct = static_cast<int>(c.multiplicities.size());
  return c;
}

}  // namespace cuspidal
