#ifndef VERTRACE_GRADED_FAMILY_HPP
#define VERTRACE_GRADED_FAMILY_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include "vertrace/graded_form.hpp"

namespace vertrace {

/// A family b -> GradedForm over a strictly increasing 1-d base grid.
/// All members share (beta, np, nm); the grid is uniform with spacing h.
class GradedFamily {
 public:
  GradedFamily(std::vector<double> grid, std::vector<GradedFormC> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() != values_.size() || grid_.size() < 2)
      throw std::invalid_argument("GradedFamily: grid/value mismatch");
    for (size_t i = 1; i < grid_.size(); ++i)
      if (grid_[i] <= grid_[i - 1]) throw std::invalid_argument("GradedFamily: grid must be strictly increasing");
    for (size_t i = 1; i < values_.size(); ++i)
      if (!values_[i].compatible(values_[0]))
        throw std::invalid_argument("GradedFamily: members must share (beta, np, nm)");
  }

  static GradedFamily sample(std::function<GradedFormC(double)> f, double b0, double h, int n) {
    std::vector<double> grid(n);
    std::vector<GradedFormC> vals;
    vals.reserve(n);
    for (int i = 0; i < n; ++i) {
      grid[i] = b0 + i * h;
      vals.push_back(f(grid[i]));
    }
    return GradedFamily(std::move(grid), std::move(vals));
  }

  size_t size() const { return grid_.size(); }
  double grid(size_t i) const { return grid_[i]; }
  const GradedFormC& at(size_t i) const { return values_[i]; }
  double step() const { return grid_[1] - grid_[0]; }

  bool interior(size_t i) const { return i > 0 && i + 1 < grid_.size(); }

 private:
  std::vector<double> grid_;
  std::vector<GradedFormC> values_;
};

/// Central-difference exterior derivative db_axis ^ d/db of the family at an
/// interior grid point, O(h^2). With one_sided set, falls back to a
/// second-order one-sided stencil at the boundary.
inline GradedFormC numeric_dB(const GradedFamily& fam, size_t i, int axis = 1, bool one_sided = false) {
  const double h = fam.step();
  GradedFormC deriv(fam.at(0).beta(), fam.at(0).plus_dim(), fam.at(0).minus_dim());
  if (fam.interior(i)) {
    deriv = (1.0 / (2.0 * h)) * (fam.at(i + 1) - fam.at(i - 1));
  } else if (one_sided) {
    if (i == 0)
      deriv = (1.0 / (2.0 * h)) * ((-3.0) * fam.at(0) + 4.0 * fam.at(1) - fam.at(2));
    else
      deriv = (1.0 / (2.0 * h)) * (3.0 * fam.at(i) - 4.0 * fam.at(i - 1) + fam.at(i - 2));
  } else {
    throw std::invalid_argument("numeric_dB: boundary point without one-sided fallback requested");
  }
  GradedFormC db = GradedFormC::monomial(deriv.beta(), deriv.plus_dim(), deriv.minus_dim(),
                                         MultiIndex::from_labels({axis}),
                                         MatC::identity(deriv.dim()));
  return wedge_compose(db, deriv);
}

/// Same stencil applied to a scalar-valued form (e.g. a supertrace).
inline std::map<MultiIndex, std::complex<double>> numeric_dB_scalar(
    const std::vector<double>& grid,
    const std::vector<std::map<MultiIndex, std::complex<double>>>& vals, size_t i, int axis = 1) {
  if (i == 0 || i + 1 >= grid.size()) throw std::invalid_argument("numeric_dB_scalar: interior point required");
  double h = grid[1] - grid[0];
  std::map<MultiIndex, std::complex<double>> out;
  auto accum = [&](const std::map<MultiIndex, std::complex<double>>& m, double w) {
    for (const auto& [I, c] : m) {
      std::uint32_t axis_bit = 1u << (axis - 1);
      int sg = koszul_sign(axis_bit, I.mask());
      if (sg == 0) continue;
      out[MultiIndex(axis_bit | I.mask())] += double(sg) * w * c;
    }
  };
  accum(vals[i + 1], 1.0 / (2.0 * h));
  accum(vals[i - 1], -1.0 / (2.0 * h));
  return out;
}

}  // namespace vertrace

#endif
