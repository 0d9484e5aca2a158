#pragma once

#include <iosfwd>
#include <vector>

#include "ddspde/grid.hpp"

namespace ddspde {

/// Overlapping-strip partition of unity {chi_l} on (0,1)^2. The weights
/// depend on x1 only: chi_l is 1 on the interior of strip l, ramps
/// linearly to 0 over a band of width `overlap` centered on each internal
/// interface l/s, and the ramps of adjacent strips are complementary so
/// that sum_l chi_l = 1 at every node. End strips stay flat up to the
/// domain boundary. Immutable after construction.
class PartitionOfUnity {
public:
    int subdomains() const { return s_; }
    double overlap() const { return overlap_; }
    const Grid2D& grid() const { return grid_; }

    /// Nodal samples of chi_l, l in [0, s).
    const ScalarField& chi(int l) const;

    /// chi_l evaluated at an arbitrary x1 in [0,1].
    double chi_at(int l, double x1) const;

    /// Closed node-index interval [lo, hi] in x1 where chi_l > 0,
    /// or {-1, -1} when chi_l vanishes at every node.
    std::pair<int, int> support(int l) const;

    /// Pointwise product chi_l * v. Throws on bad index or grid mismatch.
    ScalarField apply_weight(int l, const ScalarField& v) const;

    friend PartitionOfUnity build_strip_partition(const Grid2D& grid, int s,
                                                  double overlap);

private:
    PartitionOfUnity() = default;

    Grid2D grid_;
    int s_ = 0;
    double overlap_ = 0.0;
    std::vector<ScalarField> chi_nodes_;
    std::vector<std::pair<int, int>> support_;
};

/// Builds the strip partition. Requires s >= 1 and, for s >= 2,
/// 0 < overlap < 1/s so the ramps of adjacent interfaces do not collide.
/// For s = 1 the overlap is ignored and chi_1 = 1 everywhere.
PartitionOfUnity build_strip_partition(const Grid2D& grid, int s, double overlap);

/// CSV `x1,chi_1,...,chi_s` along the x1-axis nodes, 17 significant digits.
void write_partition_csv(const PartitionOfUnity& partition, std::ostream& os);

}  // namespace ddspde
