#include "setrisk/halfspace.hpp"

#include "setrisk/errors.hpp"

#include <cmath>
#include <limits>

namespace setrisk {

namespace {

constexpr double kPivotEps = 1e-12;

// Dense tableau for max obj.z s.t. T z = b, z >= 0, with a feasible basis.
// Bland's rule keeps it from cycling on the degenerate vertices that
// near-parallel constraints produce.
struct Simplex {
    std::size_t rows, cols;              // cols excludes the rhs column
    std::vector<std::vector<double>> t;  // rows x (cols + 1)
    std::vector<std::size_t> basis;

    void pivot(std::size_t r, std::size_t c)
    {
        double p = t[r][c];
        for (double& v : t[r]) v /= p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || t[i][c] == 0.0) continue;
            double f = t[i][c];
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
        }
        basis[r] = c;
    }

    // Returns false if unbounded.
    bool run(const std::vector<double>& obj, std::size_t allowed)
    {
        for (int guard = 0; guard < 100000; ++guard) {
            std::size_t enter = cols;
            for (std::size_t j = 0; j < allowed; ++j) {
                double rc = obj[j];
                for (std::size_t i = 0; i < rows; ++i) rc -= obj[basis[i]] * t[i][j];
                if (rc > 1e-12) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols) return true;
            std::size_t leave = rows;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows; ++i) {
                if (t[i][enter] <= kPivotEps) continue;
                double ratio = t[i][cols] / t[i][enter];
                if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == rows) return false;
            pivot(leave, enter);
        }
        throw ModelingError("simplex iteration limit reached");
    }

    double value(const std::vector<double>& obj) const
    {
        double v = 0.0;
        for (std::size_t i = 0; i < rows; ++i) v += obj[basis[i]] * t[i][cols];
        return v;
    }
};

}  // namespace

HalfSpaceSet::HalfSpaceSet(std::size_t dim) : dim_(dim)
{
    if (dim == 0) throw ValidationError("dimension must be positive");
}

void HalfSpaceSet::add(std::span<const double> u, double c)
{
    if (u.size() != dim_) throw ValidationError("constraint dimension mismatch");
    if (!std::isfinite(c)) throw ValidationError("constraint offset must be finite");
    std::vector<double> v(u.begin(), u.end());
    double nn = 0.0;
    for (double& x : v) {
        if (!std::isfinite(x) || x < -1e-12) throw ValidationError("constraint normal must lie in the nonnegative orthant");
        if (x < 0.0) x = 0.0;
        nn += x * x;
    }
    nn = std::sqrt(nn);
    if (nn == 0.0) throw ValidationError("constraint normal must be nonzero");
    for (double& x : v) x /= nn;
    constraints_.push_back({std::move(v), c / nn});
}

void HalfSpaceSet::add(Point2 u, double c)
{
    const double v[2] = {u.x, u.y};
    add(std::span<const double>(v, 2), c);
}

bool HalfSpaceSet::contains(std::span<const double> x, double tol) const
{
    if (x.size() != dim_) throw ValidationError("point dimension mismatch");
    for (const auto& h : constraints_) {
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += h.normal[i] * x[i];
        if (s < h.offset - tol) return false;
    }
    return true;
}

double HalfSpaceSet::scalarize(std::span<const double> u) const
{
    if (u.size() != dim_) throw ValidationError("direction dimension mismatch");
    const double minus_inf = -std::numeric_limits<double>::infinity();
    const std::size_t m = constraints_.size();
    if (m == 0) return minus_inf;

    Simplex s;
    s.rows = dim_;
    s.cols = m + dim_;
    s.t.assign(dim_, std::vector<double>(s.cols + 1, 0.0));
    s.basis.resize(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        double sign = u[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < m; ++j) s.t[i][j] = sign * constraints_[j].normal[i];
        s.t[i][m + i] = 1.0;
        s.t[i][s.cols] = sign * u[i];
        s.basis[i] = m + i;
    }

    std::vector<double> phase1(s.cols, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) phase1[m + i] = -1.0;
    s.run(phase1, s.cols);
    double scale = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) scale = std::max(scale, std::abs(u[i]));
    if (s.value(phase1) < -1e-9 * std::max(1.0, scale)) return minus_inf;

    // drive zero-level artificials out of the basis where possible
    for (std::size_t i = 0; i < dim_; ++i) {
        if (s.basis[i] < m) continue;
        for (std::size_t j = 0; j < m; ++j)
            if (std::abs(s.t[i][j]) > 1e-9) {
                s.pivot(i, j);
                break;
            }
    }
    std::vector<double> phase2(s.cols, 0.0);
    for (std::size_t j = 0; j < m; ++j) phase2[j] = constraints_[j].offset;
    if (!s.run(phase2, m)) throw ModelingError("half-space set is empty");
    return s.value(phase2);
}

}  // namespace setrisk
