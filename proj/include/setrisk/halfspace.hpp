#pragma once

#include "setrisk/geom2d.hpp"

#include <span>
#include <vector>

namespace setrisk {

struct HalfSpace {
    std::vector<double> normal;  // unit, nonnegative coordinates
    double offset;
};

// Intersection of half-spaces <x,u> >= c with u in the nonnegative orthant.
class HalfSpaceSet {
public:
    explicit HalfSpaceSet(std::size_t dim);

    // Normalizes u to unit length and rescales c accordingly.
    void add(std::span<const double> u, double c);
    void add(Point2 u, double c);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return constraints_.size(); }
    bool empty() const { return constraints_.empty(); }
    const std::vector<HalfSpace>& constraints() const { return constraints_; }

    bool contains(std::span<const double> x, double tol = kGeomTol) const;
    // inf <u,x> over the set, or -infinity. Solved as the dual LP
    // max sum lambda_j c_j s.t. sum lambda_j u_j = u, lambda >= 0.
    double scalarize(std::span<const double> u) const;

private:
    std::size_t dim_;
    std::vector<HalfSpace> constraints_;
};

}  // namespace setrisk
