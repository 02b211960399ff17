#include "cuspidal/model.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "cuspidal/errors.hpp"

namespace cuspidal {

namespace {

constexpr double kPi = std::numbers::pi;

double characteristic_length(const DHParams& p) {
  return std::abs(p.a1) + std::abs(p.a2) + std::abs(p.a3) + std::abs(p.d2) +
         std::abs(p.d3);
}

// Reference length for zero tests: a1 when the chain is normalizable,
// otherwise the total length.
double reference_length(const DHParams& p) {
  const double total = characteristic_length(p);
  return p.a1 > kLengthTolerance * total ? p.a1 : total;
}

double snap_unit(double value) {
  if (std::abs(value) < kAngleTolerance) return 0.0;
  if (std::abs(value - 1.0) < kAngleTolerance) return 1.0;
  if (std::abs(value + 1.0) < kAngleTolerance) return -1.0;
  return value;
}

}  // namespace

DHParams illustrative_params() {
  return DHParams{1.0, 2.0, 1.5, 1.0, 0.0, -kPi / 2, kPi / 2};
}

void ConditionSet::insert(int id) {
  if (id >= 1 && id <= 6) mask_ = static_cast<std::uint8_t>(mask_ | (1u << id));
}

bool ConditionSet::contains(int id) const {
  return id >= 1 && id <= 6 && (mask_ & (1u << id)) != 0;
}

int ConditionSet::size() const { return std::popcount(mask_); }

std::vector<int> ConditionSet::ids() const {
  std::vector<int> out;
  for (int id = 1; id <= 6; ++id)
    if (contains(id)) out.push_back(id);
  return out;
}

bool ManipulatorModel::closed_form_determinant() const {
  return orthogonal_ && length_is_zero(params_.d3);
}

bool ManipulatorModel::length_is_zero(double value) const {
  return std::abs(value) < kLengthTolerance * reference_length(params_);
}

JointConfig JointConfig::normalized() const {
  return {wrap_angle(theta1), wrap_angle(theta2), wrap_angle(theta3)};
}

double wrap_angle(double angle) {
  double wrapped = std::fmod(angle + kPi, 2.0 * kPi);
  if (wrapped < 0.0) wrapped += 2.0 * kPi;
  wrapped -= kPi;
  // fmod can land exactly on +pi after the shift because of rounding.
  if (wrapped >= kPi) wrapped -= 2.0 * kPi;
  return wrapped;
}

double angle_difference(double a, double b) { return wrap_angle(b - a); }

ConditionSet geometric_class(const DHParams& p) {
  const double ref = reference_length(p);
  auto zero_len = [&](double v) { return std::abs(v) < kLengthTolerance * ref; };
  auto zero_ang = [](double v) { return std::abs(v) < kAngleTolerance; };

  const double s1 = std::sin(p.alpha1), c1 = std::cos(p.alpha1);
  const double s2 = std::sin(p.alpha2), c2 = std::cos(p.alpha2);

  ConditionSet set;
  if (zero_ang(s1)) set.insert(1);
  if (zero_ang(s2)) set.insert(2);
  if (zero_len(p.a1)) set.insert(3);
  if (zero_len(p.a2)) set.insert(4);
  if (zero_ang(c1) && zero_len(p.d2) && zero_len(p.d3)) set.insert(5);
  if (zero_ang(c1) && zero_ang(c2) && zero_len(p.d2)) set.insert(6);
  return set;
}

ManipulatorModel validate_params(const DHParams& raw) {
  const double fields[] = {raw.a1, raw.a2, raw.a3, raw.d2, raw.d3, raw.alpha1, raw.alpha2};
  for (double v : fields)
    if (!std::isfinite(v))
      throw AnalysisError(ErrorKind::InvalidParams, "non-finite DH parameter");
  if (raw.a1 < 0.0 || raw.a2 < 0.0 || raw.a3 < 0.0)
    throw AnalysisError(ErrorKind::InvalidParams, "link lengths a1, a2, a3 must be >= 0");
  if (!(raw.a1 > 0.0 || raw.a2 > 0.0 || raw.a3 > 0.0))
    throw AnalysisError(ErrorKind::InvalidParams, "all link lengths are zero");

  ManipulatorModel m;
  m.params_ = raw;
  // (-pi, pi]: wrap_angle gives [-pi, pi), so map -pi to +pi.
  for (double* a : {&m.params_.alpha1, &m.params_.alpha2}) {
    *a = wrap_angle(*a);
    if (*a == -kPi) *a = kPi;
  }
  m.ca1_ = snap_unit(std::cos(m.params_.alpha1));
  m.sa1_ = snap_unit(std::sin(m.params_.alpha1));
  m.ca2_ = snap_unit(std::cos(m.params_.alpha2));
  m.sa2_ = snap_unit(std::sin(m.params_.alpha2));
  m.orthogonal_ = m.ca1_ == 0.0 && m.ca2_ == 0.0;
  m.conditions_ = geometric_class(m.params_);
  m.length_scale_ = characteristic_length(m.params_);
  m.unit_scale_ = 1.0;
  return m;
}

ManipulatorModel normalize(const ManipulatorModel& model) {
  const DHParams& p = model.params();
  if (!(p.a1 > kLengthTolerance * characteristic_length(p)))
    throw AnalysisError(ErrorKind::NotScalable, "a1 = 0: cannot normalize by a1");
  const double k = p.a1;
  DHParams q = p;
  q.a1 = 1.0;
  q.a2 /= k;
  q.a3 /= k;
  q.d2 /= k;
  q.d3 /= k;
  ManipulatorModel out = validate_params(q);
  out.unit_scale_ = model.unit_scale() * k;
  return out;
}

ManipulatorModel scaled(const ManipulatorModel& model, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw AnalysisError(ErrorKind::InvalidParams, "scale factor must be positive");
  DHParams q = model.params();
  q.a1 *= factor;
  q.a2 *= factor;
  q.a3 *= factor;
  q.d2 *= factor;
  q.d3 *= factor;
  return validate_params(q);
}

ManipulatorModel with_a3(const ManipulatorModel& model, double a3) {
  DHParams q = model.params();
  q.a3 = a3;
  return validate_params(q);
}

}  // namespace cuspidal
