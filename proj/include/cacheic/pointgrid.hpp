#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "cacheic/errors.hpp"

namespace cacheic {

// Uniform-grid nearest-neighbor index over points in the complex plane.
// Exact: ring expansion continues until no unscanned cell can beat the best
// candidate.  Scan order is deterministic, and ties report the smallest point
// index, so callers that store points in label order get lexicographic
// tie-breaking for free.
class PointGrid {
  public:
    struct Nearest {
        std::size_t idx = 0;
        double dist2 = std::numeric_limits<double>::infinity();
        bool tie = false;
    };

    explicit PointGrid(std::vector<std::complex<double>> pts, double target_per_cell = 2.0)
        : pts_(std::move(pts)) {
        if (pts_.empty()) throw domain_error("point grid: no points");
        double xmin = pts_[0].real(), xmax = xmin;
        double ymin = pts_[0].imag(), ymax = ymin;
        for (const auto& p : pts_) {
            xmin = std::min(xmin, p.real());
            xmax = std::max(xmax, p.real());
            ymin = std::min(ymin, p.imag());
            ymax = std::max(ymax, p.imag());
        }
        double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
        double cells = std::max(1.0, double(pts_.size()) / target_per_cell);
        n_ = std::min<std::int64_t>(std::int64_t(std::ceil(std::sqrt(cells))), 2048);
        cw_ = span / double(n_);
        x0_ = xmin;
        y0_ = ymin;
        x1_ = xmax;
        y1_ = ymax;

        // counting-sort points into cells (stable, CSR layout)
        start_.assign(std::size_t(n_ * n_) + 1, 0);
        for (const auto& p : pts_) ++start_[cell_of(p) + 1];
        for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
        order_.resize(pts_.size());
        std::vector<std::size_t> cursor(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < pts_.size(); ++i)
            order_[cursor[cell_of(pts_[i])]++] = i;
    }

    const std::vector<std::complex<double>>& points() const { return pts_; }

    // Nearest point to p; `exclude` skips one index (or pass npos to keep all).
    // `init_dist2` seeds the pruning bound: points at squared distance >= it
    // are ignored, and when nothing beats it the result keeps idx == npos.
    Nearest nearest(std::complex<double> p, std::size_t exclude = std::size_t(-1),
                    double init_dist2 = std::numeric_limits<double>::infinity()) const {
        Nearest best;
        best.idx = std::size_t(-1);
        best.dist2 = init_dist2;
        std::int64_t cx = clamp_idx((p.real() - x0_) / cw_);
        std::int64_t cy = clamp_idx((p.imag() - y0_) / cw_);
        // Any point in a cell of ring >= r is at least (r-1) cell widths from
        // p, whether p lies inside its clamped cell or beyond the box; no
        // tighter bound is safe when the ring displacement and the outward
        // offset share an axis.
        for (std::int64_t ring = 0; ring < 2 * n_ + 2; ++ring) {
            if (best.dist2 < std::numeric_limits<double>::infinity()) {
                double reach = double(ring - 1) * cw_;
                if (ring >= 1 && reach * reach > best.dist2) break;
            }
            bool any_cell = false;
            for (std::int64_t dy = -ring; dy <= ring; ++dy) {
                std::int64_t y = cy + dy;
                if (y < 0 || y >= n_) continue;
                std::int64_t xlo = cx - ring, xhi = cx + ring;
                std::int64_t step = (std::abs(dy) == ring) ? 1 : 2 * ring;
                if (step == 0) step = 1;
                for (std::int64_t x = xlo; x <= xhi; x += step) {
                    if (x < 0 || x >= n_) continue;
                    any_cell = true;
                    scan_cell(std::size_t(y * n_ + x), p, exclude, best);
                }
            }
            if (!any_cell && ring > 2 * n_) break;
        }
        return best;
    }

  private:
    std::int64_t clamp_idx(double v) const {
        if (!(v > 0)) return 0;
        if (v >= double(n_)) return n_ - 1;
        return std::int64_t(v);
    }

    std::size_t cell_of(std::complex<double> p) const {
        return std::size_t(clamp_idx((p.imag() - y0_) / cw_) * n_ +
                           clamp_idx((p.real() - x0_) / cw_));
    }

    void scan_cell(std::size_t c, std::complex<double> p, std::size_t exclude,
                   Nearest& best) const {
        for (std::size_t t = start_[c]; t < start_[c + 1]; ++t) {
            std::size_t i = order_[t];
            if (i == exclude) continue;
            double dx = pts_[i].real() - p.real();
            double dy = pts_[i].imag() - p.imag();
            double d2 = dx * dx + dy * dy;
            if (d2 < best.dist2) {
                best.idx = i;
                best.dist2 = d2;
                best.tie = false;
            } else if (d2 == best.dist2 && i != best.idx) {
                best.tie = true;
                if (i < best.idx) best.idx = i;
            }
        }
    }

    std::vector<std::complex<double>> pts_;
    std::int64_t n_ = 1;
    double cw_ = 1.0, x0_ = 0.0, y0_ = 0.0, x1_ = 0.0, y1_ = 0.0;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> order_;
};

} // namespace cacheic
