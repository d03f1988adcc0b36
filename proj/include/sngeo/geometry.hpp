#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sngeo/common.hpp"

namespace sngeo {

/// A finite window W contained in the integer lattice Z^d. The continuous
/// fill is the disjoint union of half-open unit cells k + [-1/2,1/2)^d over
/// k in W, so the fill has volume exactly |W|.
///
/// Constructed windows are axis-aligned lattice cubes (make_cube_window) or
/// explicit cell sets. Cube windows have a box fill, which the field grid and
/// the jump machinery rely on.
class LatticeWindow {
  public:
    /// Lattice cube: all k in Z^d with k in [-a/2, a/2)^d. Requires a >= 1,
    /// d >= 1.
    static LatticeWindow cube(double side, int dim);

    /// Explicit cell set (flat coordinates, stride = dim). Cells are
    /// deduplicated and stored in lexicographic order.
    static LatticeWindow from_cells(int dim, std::vector<int> flat_cells);

    int dim() const { return dim_; }
    std::int64_t cell_count() const {
        return static_cast<std::int64_t>(cells_.size()) / dim_;
    }
    std::span<const int> cell(std::int64_t i) const {
        return {cells_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<const int> cells_flat() const { return cells_; }

    bool contains_cell(std::span<const int> k) const;

    /// True when the fill is exactly a box (always true for cube windows).
    bool is_box() const { return is_box_; }
    /// Box bounds (cells lo..hi inclusive per axis); valid only when is_box().
    std::span<const int> lo() const { return lo_; }
    std::span<const int> hi() const { return hi_; }

    /// Fill membership: x is in the union of half-open cells of W.
    bool fill_contains(std::span<const double> x) const;
    /// Strict interior of the closed fill; valid only for box windows.
    bool open_fill_contains(std::span<const double> x) const;

    double fill_volume() const { return static_cast<double>(cell_count()); }

    /// Cells of W at lattice distance 1 from the complement (axis neighbours).
    std::vector<int> lattice_boundary() const;

  private:
    LatticeWindow() = default;

    int dim_ = 0;
    std::vector<int> cells_;  // flat, lexicographic, stride dim_
    bool is_box_ = false;
    std::vector<int> lo_, hi_;
};

/// Spatial region of R^d with deterministic membership and, where it exists in
/// closed form, a volume. Boxes and box annuli are half-open (consistent with
/// the cell convention); balls are closed.
class Region {
  public:
    enum class Kind { box, ball, ball_complement, box_annulus, window_fill };

    static Region box(std::vector<double> lo, std::vector<double> hi);
    /// Centered cube [-a/2, a/2)^d.
    static Region centered_cube(double side, int dim);
    static Region ball(std::vector<double> center, double radius);
    /// Complement of a closed ball (infinite volume; membership only).
    static Region ball_complement(std::vector<double> center, double radius);
    /// Points of the outer box not in the inner box.
    static Region box_annulus(double inner_side, double outer_side, int dim);
    static Region window_fill(const LatticeWindow& w);
    /// Bounding box of the window fill dilated by pad on every axis. Used as
    /// the sampling region for infinite-input (padded) evaluation.
    static Region padded_fill(const LatticeWindow& w, double pad);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool contains(std::span<const double> x) const;
    /// Throws invalid_parameter when the region has no finite volume.
    double volume() const;
    bool has_finite_volume() const { return kind_ != Kind::ball_complement; }

    /// Axis-aligned bounding box (throws for complements).
    void bounding_box(std::vector<double>& lo, std::vector<double>& hi) const;

  private:
    Region() = default;

    Kind kind_ = Kind::box;
    int dim_ = 0;
    std::vector<double> lo_, hi_;      // box / annulus outer
    std::vector<double> inner_lo_, inner_hi_;
    std::vector<double> center_;
    double radius_ = 0.0;
    std::vector<int> window_cells_;   // window_fill: flat cell list
    int window_dim_ = 0;
};

}  // namespace sngeo
