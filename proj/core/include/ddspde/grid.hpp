#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace ddspde {

/// Uniform tensor grid on (0,1)^2 with homogeneous Dirichlet boundary.
/// Only interior nodes are represented; boundary values are identically
/// zero and never stored. Node i (0-based) sits at (i+1)*spacing.
struct Grid2D {
    int n_interior = 0;
    double spacing = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(n_interior) * n_interior; }
    double coord(int i) const { return (i + 1) * spacing; }
    std::size_t index(int i1, int i2) const {
        return static_cast<std::size_t>(i1) * n_interior + i2;
    }
    bool operator==(const Grid2D&) const = default;
};

/// One real value per interior node, row-major by (i1, i2).
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid2D& grid, double fill = 0.0)
        : grid_(grid), values_(grid.size(), fill) {}
    ScalarField(const Grid2D& grid, std::vector<double> values);

    const Grid2D& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& at(int i1, int i2) { return values_[grid_.index(i1, i2)]; }
    double at(int i1, int i2) const { return values_[grid_.index(i1, i2)]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

private:
    Grid2D grid_;
    std::vector<double> values_;
};

/// Builds the uniform grid with spacing 1/(n_interior+1).
/// Throws std::invalid_argument for n_interior < 1.
Grid2D build_grid(int n_interior);

/// Samples f(x1, x2) at the interior nodes. Throws std::invalid_argument
/// if f produces a non-finite value.
ScalarField sample_function(const Grid2D& grid,
                            const std::function<double(double, double)>& f);

/// Grid inner product <v,w>_H = spacing^2 * sum_i v_i w_i and induced norm.
double inner_product(const ScalarField& v, const ScalarField& w);
double norm_h_sq(const ScalarField& v);

/// Euclidean norm of the raw value vector (solver residual metric).
double norm_l2(std::span<const double> v);

/// True if every entry is finite.
bool all_finite(std::span<const double> v);

/// Discrete weighted diffusion operator
///
///   (Op v)_(i,j) = (alpha/spacing^2) * [ w_(i-1/2,j) (v_ij - v_(i-1,j))
///                                      + w_(i+1/2,j) (v_ij - v_(i+1,j))
///                                      + w_(i,j-1/2) (v_ij - v_(i,j-1))
///                                      + w_(i,j+1/2) (v_ij - v_(i,j+1)) ]
///
/// with v = 0 outside the interior and w the interface-averaged weight
/// function. With unit weights this is the standard 5-point Dirichlet
/// Laplacian. The operator is symmetric positive semi-definite in the
/// grid inner product. Application is matrix-free.
class WeightedDiffusionOperator {
public:
    WeightedDiffusionOperator(const Grid2D& grid,
                              std::vector<double> edge_weights_x,
                              std::vector<double> edge_weights_y,
                              double alpha_scale);

    const Grid2D& grid() const { return grid_; }
    double alpha_scale() const { return alpha_scale_; }

    /// Weight on the x1-interface between nodes (e-1, i2) and (e, i2),
    /// e in [0, n_interior]; e = 0 and e = n_interior touch the boundary.
    double edge_weight_x(int e, int i2) const {
        return edge_weights_x_[static_cast<std::size_t>(e) * grid_.n_interior + i2];
    }
    /// Weight on the x2-interface between nodes (i1, e-1) and (i1, e).
    double edge_weight_y(int i1, int e) const {
        return edge_weights_y_[static_cast<std::size_t>(i1) * (grid_.n_interior + 1) + e];
    }

    /// Matrix-free stencil application. Throws on grid mismatch.
    ScalarField apply(const ScalarField& v) const;

    /// Writes Op v into out (raw spans, both of grid size).
    void apply_raw(std::span<const double> v, std::span<double> out) const;

    /// Diagonal entry of the operator at node (i1, i2).
    double diagonal(int i1, int i2) const;

    /// Smallest half-open range [lo, hi) of i1-columns outside of which
    /// every adjacent interface weight vanishes; rows there act as zero.
    /// Empty range (lo == hi) means the operator is identically zero.
    std::pair<int, int> active_columns() const { return {active_lo_, active_hi_}; }

private:
    Grid2D grid_;
    std::vector<double> edge_weights_x_;  // (n+1) * n, x-interfaces
    std::vector<double> edge_weights_y_;  // n * (n+1), y-interfaces
    double alpha_scale_;
    int active_lo_ = 0;
    int active_hi_ = 0;
};

/// Assembles the weighted diffusion operator from nodal weight samples.
/// Interface weights are the arithmetic mean of the two adjacent nodal
/// values; interfaces touching the boundary use the interior node's value.
/// Throws std::invalid_argument for alpha_value < 0 or chi values outside
/// [0,1] beyond 1e-12 slack.
WeightedDiffusionOperator assemble_weighted_diffusion(const Grid2D& grid,
                                                      const ScalarField& chi_nodes,
                                                      double alpha_value);

/// Field snapshot export: CSV `x1,x2,value`, one row per interior node,
/// row-major, 17 significant digits.
void write_field_csv(const ScalarField& field, std::ostream& os);

}  // namespace ddspde
