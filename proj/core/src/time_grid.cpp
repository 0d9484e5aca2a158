#include "ddspde/time_grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ddspde {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) {
        throw std::invalid_argument("TimeGrid: need at least one step");
    }
    if (nodes_.front() != 0.0) {
        throw std::invalid_argument("TimeGrid: nodes must start at t = 0");
    }
    for (std::size_t n = 1; n < nodes_.size(); ++n) {
        const double h = nodes_[n] - nodes_[n - 1];
        if (!(h > 0.0)) {
            throw std::invalid_argument("TimeGrid: nodes must be strictly increasing");
        }
        h_max_ = std::max(h_max_, h);
    }
}

bool TimeGrid::is_uniform(double rel_tol) const {
    const double h0 = step_size(1);
    for (int n = 2; n <= steps(); ++n) {
        if (std::abs(step_size(n) - h0) > rel_tol * h0) return false;
    }
    return true;
}

TimeGrid make_uniform_time_grid(double final_time, int steps) {
    if (!(final_time > 0.0)) {
        throw std::invalid_argument("make_uniform_time_grid: final time must be > 0");
    }
    if (steps < 1) {
        throw std::invalid_argument("make_uniform_time_grid: steps must be >= 1, got " +
                                    std::to_string(steps));
    }
    std::vector<double> nodes(steps + 1);
    for (int n = 0; n <= steps; ++n) {
        nodes[n] = final_time * n / steps;
    }
    nodes.back() = final_time;
    return TimeGrid(std::move(nodes));
}

}  // namespace ddspde
