#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ibmi/matrix.hpp"

namespace ibmi {

enum class KernelFamily { EXP, RBF, IQUAD, MATERN32, MATERN52 };

struct KernelSpec {
  KernelFamily family = KernelFamily::RBF;
  double sigma = 0.5;  // RBF length scale
  double tau = 3.0;    // Matern length scale
};

// Evaluates the kernel at Euclidean distance d.
double kernel_value(const KernelSpec& spec, double d);

// Throws InvalidHyperparameter when the family's parameter is not positive and finite.
void check_hyperparameters(const KernelSpec& spec);

std::string_view to_string(KernelFamily family);
// Accepts exp, rbf, iquad, matern32/m32, matern52/m52 (case-insensitive).
KernelFamily parse_kernel_family(std::string_view name);
// Short label such as "rbf(sigma=0.5)" or "exp".
std::string describe(const KernelSpec& spec);

struct PointSet {
  std::size_t dim = 1;
  std::vector<std::array<double, 2>> points;  // second coordinate unused when dim == 1

  std::size_t size() const noexcept { return points.size(); }
};

// p points x_i = i * p^0.9 / (p - 1).
PointSet grid_1d(std::size_t p);
// sqrt(p) values per axis on [0, p^0.45], row-major product. Throws NotPerfectSquare.
PointSet grid_2d(std::size_t p);
PointSet make_grid(std::size_t dim, std::size_t p);

DenseMatrix kernel_matrix(const KernelSpec& spec, const PointSet& pts);

}  // namespace ibmi
