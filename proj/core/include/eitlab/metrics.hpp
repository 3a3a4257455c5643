#pragma once

// Reconstruction metrics on masked N x N grids over (-1,1)^2 (cell area
// (2/N)^2), and offset power/log law fits.

#include <span>
#include <string>

#include "eitlab/conductivity.hpp"

namespace eit {

/// ||pred - target||_p / ||target||_p over masked cells. Throws
/// std::domain_error if the target norm vanishes.
double rel_lp_error(const RealGrid& pred, const RealGrid& target, const MaskGrid& mask, double p = 1.0);
double rel_lp_error(const RealGrid& pred, const ConductivityField& target, double p = 1.0);

/// Area of masked cells where the indicators {pred > c} and {target > c} differ.
double l0_distance(const RealGrid& pred, const RealGrid& target, const MaskGrid& mask, double c = 50.0);
double l0_distance(const RealGrid& pred, const ConductivityField& target, double c = 50.0);

/// 2|A n B| / (eps + |A| + |B|) for the thresholded masked sets, measured in area.
double dice(const RealGrid& pred, const RealGrid& target, const MaskGrid& mask, double c = 50.0,
            double eps = 1e-8);
double dice(const RealGrid& pred, const ConductivityField& target, double c = 50.0, double eps = 1e-8);

/// Isotropic forward-difference TV: sum of sqrt(dx^2 + dy^2) h over masked
/// cells whose right and lower neighbours are also masked.
double total_variation(const RealGrid& field, const MaskGrid& mask);
double total_variation(const ConductivityField& field);

enum class LawKind { Power, Log, SamplePower };

LawKind parse_law_kind(const std::string& name);
std::string to_string(LawKind kind);

/// Power: y = e + C x^rho. Log: y = e + C (log 1/x)^(-rho), x < 1.
/// SamplePower: y = e + C x^(-rho).
struct FitResult {
  LawKind kind = LawKind::Power;
  double C = 0.0;
  double rho = 0.0;
  double e = 0.0;
  /// RMS of log y - log model.
  double residual = 0.0;
  /// False if ys are not monotone in the direction the law implies.
  bool monotone = true;
};

double law_value(const FitResult& fit, double x);

/// Scans the offset e over [0, min y), refines with golden-section search,
/// and fits (log C, rho) by linear regression of log(y - e) at each e.
FitResult fit_law(std::span<const double> xs, std::span<const double> ys, LawKind kind);

}  // namespace eit
