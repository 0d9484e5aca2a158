#include "ddspde/partition.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ddspde {

namespace {

// Trapezoid profile of strip l (0-based) for s >= 2: ramps of width
// `overlap` centered on the internal interfaces l/s and (l+1)/s; end
// strips are flat up to the domain boundary.
double strip_value(int l, int s, double overlap, double x1) {
    double value = 1.0;
    if (l > 0) {
        const double left = static_cast<double>(l) / s;
        value = std::min(value, (x1 - (left - overlap / 2)) / overlap);
    }
    if (l + 1 < s) {
        const double right = static_cast<double>(l + 1) / s;
        value = std::min(value, ((right + overlap / 2) - x1) / overlap);
    }
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace

const ScalarField& PartitionOfUnity::chi(int l) const {
    if (l < 0 || l >= s_) {
        throw std::out_of_range("PartitionOfUnity::chi: subdomain index " +
                                std::to_string(l) + " outside [0, " +
                                std::to_string(s_) + ")");
    }
    return chi_nodes_[l];
}

double PartitionOfUnity::chi_at(int l, double x1) const {
    if (l < 0 || l >= s_) {
        throw std::out_of_range("PartitionOfUnity::chi_at: bad subdomain index");
    }
    if (s_ == 1) return 1.0;
    return strip_value(l, s_, overlap_, x1);
}

std::pair<int, int> PartitionOfUnity::support(int l) const {
    if (l < 0 || l >= s_) {
        throw std::out_of_range("PartitionOfUnity::support: bad subdomain index");
    }
    return support_[l];
}

ScalarField PartitionOfUnity::apply_weight(int l, const ScalarField& v) const {
    const ScalarField& weights = chi(l);
    if (v.grid() != grid_) {
        throw std::invalid_argument("PartitionOfUnity::apply_weight: grid mismatch");
    }
    ScalarField out(grid_);
    const auto wv = weights.values();
    const auto vv = v.values();
    auto ov = out.values();
    for (std::size_t i = 0; i < vv.size(); ++i) ov[i] = wv[i] * vv[i];
    return out;
}

PartitionOfUnity build_strip_partition(const Grid2D& grid, int s, double overlap) {
    if (s < 1) {
        throw std::invalid_argument("build_strip_partition: s must be >= 1, got " +
                                    std::to_string(s));
    }
    if (s >= 2 && !(overlap > 0.0 && overlap < 1.0 / s)) {
        throw std::invalid_argument(
            "build_strip_partition: overlap " + std::to_string(overlap) +
            " violates 0 < overlap < 1/s (s = " + std::to_string(s) + ")");
    }

    PartitionOfUnity p;
    p.grid_ = grid;
    p.s_ = s;
    p.overlap_ = s == 1 ? 0.0 : overlap;
    p.chi_nodes_.reserve(s);
    p.support_.reserve(s);
    for (int l = 0; l < s; ++l) {
        ScalarField chi(grid);
        int lo = -1, hi = -1;
        for (int i1 = 0; i1 < grid.n_interior; ++i1) {
            const double value =
                s == 1 ? 1.0 : strip_value(l, s, overlap, grid.coord(i1));
            for (int i2 = 0; i2 < grid.n_interior; ++i2) chi.at(i1, i2) = value;
            if (value > 0.0) {
                if (lo < 0) lo = i1;
                hi = i1;
            }
        }
        p.chi_nodes_.push_back(std::move(chi));
        p.support_.emplace_back(lo, hi);
    }
    return p;
}

void write_partition_csv(const PartitionOfUnity& partition, std::ostream& os) {
    os << "x1";
    for (int l = 0; l < partition.subdomains(); ++l) os << ",chi_" << l + 1;
    os << "\n";
    const Grid2D& g = partition.grid();
    char buf[48];
    for (int i1 = 0; i1 < g.n_interior; ++i1) {
        std::snprintf(buf, sizeof(buf), "%.17g", g.coord(i1));
        os << buf;
        for (int l = 0; l < partition.subdomains(); ++l) {
            std::snprintf(buf, sizeof(buf), ",%.17g", partition.chi(l).at(i1, 0));
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace ddspde
