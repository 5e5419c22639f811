#include "pdbc/fields.hpp"

#include <algorithm>

#include "pdbc/error.hpp"

namespace pdbc {
namespace {

template <class Field>
void check_same_shape(const Field& a, const Field& b) {
  bool ok = a.slabs.size() == b.slabs.size();
  for (std::size_t m = 0; ok && m < a.slabs.size(); ++m) ok = a.slabs[m].size() == b.slabs[m].size();
  if (!ok) throw Error(ErrorCode::kDimensionMismatch, "field arithmetic on mismatched discretizations");
}

}  // namespace

SpaceTimeField& SpaceTimeField::operator+=(const SpaceTimeField& o) {
  check_same_shape(*this, o);
  for (std::size_t m = 0; m < slabs.size(); ++m) slabs[m] += o.slabs[m];
  if (initial.size() == o.initial.size()) initial += o.initial;
  return *this;
}

SpaceTimeField& SpaceTimeField::operator-=(const SpaceTimeField& o) {
  check_same_shape(*this, o);
  for (std::size_t m = 0; m < slabs.size(); ++m) slabs[m] -= o.slabs[m];
  if (initial.size() == o.initial.size()) initial -= o.initial;
  return *this;
}

SpaceTimeField& SpaceTimeField::operator*=(double a) {
  for (auto& s : slabs) s *= a;
  initial *= a;
  return *this;
}

BoundaryField& BoundaryField::operator+=(const BoundaryField& o) { return axpy(1.0, o); }

BoundaryField& BoundaryField::operator-=(const BoundaryField& o) { return axpy(-1.0, o); }

BoundaryField& BoundaryField::operator*=(double a) {
  for (auto& s : slabs) s *= a;
  return *this;
}

BoundaryField& BoundaryField::axpy(double a, const BoundaryField& x) {
  check_same_shape(*this, x);
  for (std::size_t m = 0; m < slabs.size(); ++m) slabs[m] += a * x.slabs[m];
  return *this;
}

double BoundaryField::max_abs() const {
  double out = 0.0;
  for (const auto& s : slabs) {
    if (s.size() > 0) out = std::max(out, s.cwiseAbs().maxCoeff());
  }
  return out;
}

}  // namespace pdbc
