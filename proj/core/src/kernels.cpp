#include "ibmi/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace ibmi {

namespace {

std::size_t exact_sqrt(std::size_t p) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(p))));
  while (r * r > p) --r;
  while ((r + 1) * (r + 1) <= p) ++r;
  return r;
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void check_hyperparameters(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::RBF:
      if (!positive(spec.sigma)) throw InvalidHyperparameter("RBF needs sigma > 0");
      break;
    case KernelFamily::MATERN32:
    case KernelFamily::MATERN52:
      if (!positive(spec.tau)) throw InvalidHyperparameter("Matern needs tau > 0");
      break;
    default:
      break;
  }
}

double kernel_value(const KernelSpec& spec, double d) {
  switch (spec.family) {
    case KernelFamily::EXP:
      return std::exp(-d / 5.0);
    case KernelFamily::RBF:
      return std::exp(-(d * d) / (2.0 * spec.sigma * spec.sigma));
    case KernelFamily::IQUAD:
      return 1.0 / std::sqrt(1.0 + d * d);
    case KernelFamily::MATERN32: {
      const double s = std::sqrt(3.0) * d / spec.tau;
      return (1.0 + s) * std::exp(-s);
    }
    case KernelFamily::MATERN52: {
      const double s = std::sqrt(5.0) * d / spec.tau;
      return (1.0 + s + 5.0 * d * d / (3.0 * spec.tau * spec.tau)) * std::exp(-s);
    }
  }
  return 0.0;
}

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::EXP: return "exp";
    case KernelFamily::RBF: return "rbf";
    case KernelFamily::IQUAD: return "iquad";
    case KernelFamily::MATERN32: return "matern32";
    case KernelFamily::MATERN52: return "matern52";
  }
  return "?";
}

KernelFamily parse_kernel_family(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "exp") return KernelFamily::EXP;
  if (s == "rbf") return KernelFamily::RBF;
  if (s == "iquad") return KernelFamily::IQUAD;
  if (s == "matern32" || s == "m32") return KernelFamily::MATERN32;
  if (s == "matern52" || s == "m52") return KernelFamily::MATERN52;
  throw InvalidArgument("unknown kernel '" + std::string(name) + "'");
}

std::string describe(const KernelSpec& spec) {
  std::ostringstream out;
  out << to_string(spec.family);
  if (spec.family == KernelFamily::RBF) out << "(sigma=" << spec.sigma << ")";
  if (spec.family == KernelFamily::MATERN32 || spec.family == KernelFamily::MATERN52)
    out << "(tau=" << spec.tau << ")";
  return out.str();
}

PointSet grid_1d(std::size_t p) {
  if (p < 2) throw InvalidArgument("grid_1d needs p >= 2");
  PointSet g;
  g.dim = 1;
  g.points.resize(p);
  const double pd = static_cast<double>(p);
  const double step = std::pow(pd, 0.9) / (pd - 1.0);
  for (std::size_t i = 0; i < p; ++i) g.points[i] = {static_cast<double>(i) * step, 0.0};
  return g;
}

PointSet grid_2d(std::size_t p) {
  const std::size_t n = exact_sqrt(p);
  if (n * n != p) throw NotPerfectSquare("grid_2d: " + std::to_string(p) + " is not a perfect square");
  if (n < 2) throw InvalidArgument("grid_2d needs p >= 4");
  const double step = std::pow(static_cast<double>(p), 0.45) / static_cast<double>(n - 1);
  PointSet g;
  g.dim = 2;
  g.points.reserve(p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g.points.push_back({static_cast<double>(i) * step, static_cast<double>(j) * step});
  return g;
}

PointSet make_grid(std::size_t dim, std::size_t p) {
  if (dim == 1) return grid_1d(p);
  if (dim == 2) return grid_2d(p);
  throw InvalidArgument("grid dimension must be 1 or 2");
}

DenseMatrix kernel_matrix(const KernelSpec& spec, const PointSet& pts) {
  if (pts.points.empty()) throw InvalidArgument("kernel_matrix: empty point set");
  check_hyperparameters(spec);
  const std::size_t p = pts.size();
  DenseMatrix a(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    a(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      const double dx = pts.points[i][0] - pts.points[j][0];
      const double dy = pts.points[i][1] - pts.points[j][1];
      const double v = kernel_value(spec, std::sqrt(dx * dx + dy * dy));
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

}  // namespace ibmi
