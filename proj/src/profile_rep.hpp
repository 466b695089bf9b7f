#pragma once

// Internal representations behind systolic::Profile.

#include <cstddef>
#include <memory>
#include <vector>

#include "systolic/profile.hpp"

namespace systolic {

class ProfileRep {
 public:
  virtual ~ProfileRep() = default;
  virtual ProfilePoint eval(double s) const = 0;
  virtual double half_length() const = 0;
  /// Uniform s-samples used to scan r' for critical points.
  virtual std::size_t scan_points() const = 0;
};

class RoundRep final : public ProfileRep {
 public:
  explicit RoundRep(double R) : R_(R) {}
  ProfilePoint eval(double s) const override;
  double half_length() const override;
  std::size_t scan_points() const override { return 4096; }

 private:
  double R_;
};

/// Quintic Hermite interpolation of (r, r', r'', z, z', z'') on uniform knots.
class TableRep final : public ProfileRep {
 public:
  struct Knot {
    double r, dr, d2r, z, dz, d2z;
  };
  TableRep(double half_length, std::vector<Knot> knots);
  ProfilePoint eval(double s) const override;
  double half_length() const override { return half_; }
  std::size_t scan_points() const override { return knots_.size() - 1; }
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  double half_;
  double h_;
  std::vector<Knot> knots_;
};

class ScaledRep final : public ProfileRep {
 public:
  ScaledRep(std::shared_ptr<const ProfileRep> base, double c) : base_(std::move(base)), c_(c) {}
  ProfilePoint eval(double s) const override;
  double half_length() const override { return c_ * base_->half_length(); }
  std::size_t scan_points() const override { return base_->scan_points(); }

 private:
  std::shared_ptr<const ProfileRep> base_;
  double c_;
};

/// Arc-length table from a regular parametrization.
std::shared_ptr<const TableRep> build_table(const ParametricCurve& curve);

/// Downsampled (r, z) polyline self-intersection test; true if embedded.
bool polyline_embedded(const std::vector<double>& r, const std::vector<double>& z);

}  // namespace systolic
