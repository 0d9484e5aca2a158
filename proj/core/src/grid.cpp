#include "ddspde/grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ddspde {

namespace {

std::string node_text(double x1, double x2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%.6g, %.6g)", x1, x2);
    return buf;
}

}  // namespace

ScalarField::ScalarField(const Grid2D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw std::invalid_argument("ScalarField: value count " +
                                    std::to_string(values_.size()) +
                                    " does not match grid size " +
                                    std::to_string(grid_.size()));
    }
}

Grid2D build_grid(int n_interior) {
    if (n_interior < 1) {
        throw std::invalid_argument("build_grid: n_interior must be >= 1, got " +
                                    std::to_string(n_interior));
    }
    return Grid2D{n_interior, 1.0 / (n_interior + 1)};
}

ScalarField sample_function(const Grid2D& grid,
                            const std::function<double(double, double)>& f) {
    ScalarField field(grid);
    for (int i1 = 0; i1 < grid.n_interior; ++i1) {
        const double x1 = grid.coord(i1);
        for (int i2 = 0; i2 < grid.n_interior; ++i2) {
            const double x2 = grid.coord(i2);
            const double value = f(x1, x2);
            if (!std::isfinite(value)) {
                throw std::invalid_argument(
                    "sample_function: non-finite value at " + node_text(x1, x2));
            }
            field.at(i1, i2) = value;
        }
    }
    return field;
}

double inner_product(const ScalarField& v, const ScalarField& w) {
    if (v.grid() != w.grid()) {
        throw std::invalid_argument("inner_product: grid mismatch");
    }
    double acc = 0.0;
    const auto vv = v.values();
    const auto wv = w.values();
    for (std::size_t i = 0; i < vv.size(); ++i) acc += vv[i] * wv[i];
    const double h = v.grid().spacing;
    return h * h * acc;
}

double norm_h_sq(const ScalarField& v) {
    double acc = 0.0;
    for (double x : v.values()) acc += x * x;
    const double h = v.grid().spacing;
    return h * h * acc;
}

double norm_l2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

WeightedDiffusionOperator::WeightedDiffusionOperator(
    const Grid2D& grid, std::vector<double> edge_weights_x,
    std::vector<double> edge_weights_y, double alpha_scale)
    : grid_(grid),
      edge_weights_x_(std::move(edge_weights_x)),
      edge_weights_y_(std::move(edge_weights_y)),
      alpha_scale_(alpha_scale) {
    const int n = grid_.n_interior;
    const std::size_t nx = static_cast<std::size_t>(n + 1) * n;
    if (edge_weights_x_.size() != nx || edge_weights_y_.size() != nx) {
        throw std::invalid_argument("WeightedDiffusionOperator: bad edge array size");
    }

    // Active window: i1-columns with at least one nonzero adjacent weight.
    int lo = n, hi = 0;
    for (int i1 = 0; i1 < n; ++i1) {
        bool active = false;
        for (int i2 = 0; i2 < n && !active; ++i2) {
            active = edge_weight_x(i1, i2) != 0.0 || edge_weight_x(i1 + 1, i2) != 0.0 ||
                     edge_weight_y(i1, i2) != 0.0 || edge_weight_y(i1, i2 + 1) != 0.0;
        }
        if (active) {
            lo = std::min(lo, i1);
            hi = std::max(hi, i1 + 1);
        }
    }
    active_lo_ = std::min(lo, hi);
    active_hi_ = hi;
    if (alpha_scale_ == 0.0) active_lo_ = active_hi_ = 0;
}

void WeightedDiffusionOperator::apply_raw(std::span<const double> v,
                                          std::span<double> out) const {
    const int n = grid_.n_interior;
    const double c = alpha_scale_ / (grid_.spacing * grid_.spacing);
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            const std::size_t id = grid_.index(i1, i2);
            const double vc = v[id];
            const double left = i1 > 0 ? v[id - n] : 0.0;
            const double right = i1 + 1 < n ? v[id + n] : 0.0;
            const double down = i2 > 0 ? v[id - 1] : 0.0;
            const double up = i2 + 1 < n ? v[id + 1] : 0.0;
            out[id] = c * (edge_weight_x(i1, i2) * (vc - left) +
                           edge_weight_x(i1 + 1, i2) * (vc - right) +
                           edge_weight_y(i1, i2) * (vc - down) +
                           edge_weight_y(i1, i2 + 1) * (vc - up));
        }
    }
}

ScalarField WeightedDiffusionOperator::apply(const ScalarField& v) const {
    if (v.grid() != grid_) {
        throw std::invalid_argument("WeightedDiffusionOperator::apply: grid mismatch");
    }
    ScalarField out(grid_);
    apply_raw(v.values(), out.values());
    return out;
}

double WeightedDiffusionOperator::diagonal(int i1, int i2) const {
    const double c = alpha_scale_ / (grid_.spacing * grid_.spacing);
    return c * (edge_weight_x(i1, i2) + edge_weight_x(i1 + 1, i2) +
                edge_weight_y(i1, i2) + edge_weight_y(i1, i2 + 1));
}

WeightedDiffusionOperator assemble_weighted_diffusion(const Grid2D& grid,
                                                      const ScalarField& chi_nodes,
                                                      double alpha_value) {
    if (alpha_value < 0.0) {
        throw std::invalid_argument(
            "assemble_weighted_diffusion: alpha_value must be >= 0, got " +
            std::to_string(alpha_value));
    }
    if (chi_nodes.grid() != grid) {
        throw std::invalid_argument("assemble_weighted_diffusion: grid mismatch");
    }
    constexpr double slack = 1e-12;
    for (double chi : chi_nodes.values()) {
        if (chi < -slack || chi > 1.0 + slack) {
            throw std::invalid_argument(
                "assemble_weighted_diffusion: chi value " + std::to_string(chi) +
                " outside [0,1]");
        }
    }

    const int n = grid.n_interior;
    std::vector<double> wx(static_cast<std::size_t>(n + 1) * n);
    std::vector<double> wy(static_cast<std::size_t>(n + 1) * n);
    for (int e = 0; e <= n; ++e) {
        for (int i2 = 0; i2 < n; ++i2) {
            double w;
            if (e == 0) {
                w = chi_nodes.at(0, i2);
            } else if (e == n) {
                w = chi_nodes.at(n - 1, i2);
            } else {
                w = 0.5 * (chi_nodes.at(e - 1, i2) + chi_nodes.at(e, i2));
            }
            wx[static_cast<std::size_t>(e) * n + i2] = w;
        }
    }
    for (int i1 = 0; i1 < n; ++i1) {
        for (int e = 0; e <= n; ++e) {
            double w;
            if (e == 0) {
                w = chi_nodes.at(i1, 0);
            } else if (e == n) {
                w = chi_nodes.at(i1, n - 1);
            } else {
                w = 0.5 * (chi_nodes.at(i1, e - 1) + chi_nodes.at(i1, e));
            }
            wy[static_cast<std::size_t>(i1) * (n + 1) + e] = w;
        }
    }
    return WeightedDiffusionOperator(grid, std::move(wx), std::move(wy), alpha_value);
}

void write_field_csv(const ScalarField& field, std::ostream& os) {
    const Grid2D& g = field.grid();
    os << "x1,x2,value\n";
    char buf[96];
    for (int i1 = 0; i1 < g.n_interior; ++i1) {
        for (int i2 = 0; i2 < g.n_interior; ++i2) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", g.coord(i1),
                          g.coord(i2), field.at(i1, i2));
            os << buf;
        }
    }
}

}  // namespace ddspde
