#pragma once

#include <vector>

namespace ddspde {

/// Strictly increasing time nodes t_0 = 0 < t_1 < ... < t_N = T.
/// Steps are h_n = t_n - t_{n-1}, indexed by n in [1, N].
class TimeGrid {
public:
    /// Builds from explicit nodes. Throws std::invalid_argument unless
    /// nodes start at 0, are strictly increasing, and N >= 1.
    explicit TimeGrid(std::vector<double> nodes);

    int steps() const { return static_cast<int>(nodes_.size()) - 1; }
    double final_time() const { return nodes_.back(); }
    double node(int n) const { return nodes_[n]; }
    double step_size(int n) const { return nodes_[n] - nodes_[n - 1]; }
    double max_step() const { return h_max_; }
    const std::vector<double>& nodes() const { return nodes_; }

    bool is_uniform(double rel_tol = 1e-12) const;
    bool operator==(const TimeGrid&) const = default;

private:
    std::vector<double> nodes_;
    double h_max_ = 0.0;
};

/// Uniform grid with N steps of size T/N on [0, T].
TimeGrid make_uniform_time_grid(double final_time, int steps);

}  // namespace ddspde
