#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sngeo/geometry.hpp"
#include "sngeo/random.hpp"

namespace sngeo {

enum class MarkKind { unit, scalar_amplitude, disc_grain, radial_kernel_tag };

/// One mark. amplitude/radius are meaningful depending on the kind.
struct Mark {
    double amplitude = 0.0;
    double radius = 0.0;
};

/// Law of the i.i.d. marks attached to Poisson points.
///   unit              - no mark information (amplitude fixed to 1)
///   scalar_amplitude  - discrete law on R \ {0}
///   disc_grain        - amplitude law paired with radius ~ U[r_lo, r_hi]
///   radial_kernel_tag - all points share the configured radial kernel
class MarkDistribution {
  public:
    static MarkDistribution unit();
    static MarkDistribution radial_kernel_tag();
    static MarkDistribution scalar_amplitude(std::vector<double> values,
                                             std::vector<double> probs);
    static MarkDistribution disc_grain(std::vector<double> amp_values,
                                       std::vector<double> amp_probs, double radius_lo,
                                       double radius_hi);

    MarkKind kind() const { return kind_; }
    Mark sample(std::mt19937_64& g) const;
    /// Largest radius the law can produce (0 for non-grain kinds).
    double max_radius() const { return radius_hi_; }
    const std::vector<double>& amplitude_values() const { return values_; }
    const std::vector<double>& amplitude_probs() const { return probs_; }
    double radius_lo() const { return radius_lo_; }
    double radius_hi() const { return radius_hi_; }

  private:
    MarkKind kind_ = MarkKind::unit;
    std::vector<double> values_, probs_, cum_;
    double radius_lo_ = 0.0, radius_hi_ = 0.0;
};

/// A finite marked point configuration. Points are stored sorted
/// lexicographically by location; this fixes the summation order of every
/// field evaluation, so results never depend on sampling or merge order.
class MarkedConfiguration {
  public:
    MarkedConfiguration() = default;
    MarkedConfiguration(int dim, std::vector<double> flat_coords, std::vector<Mark> marks,
                        MarkKind mark_kind);

    int dim() const { return dim_; }
    std::int64_t size() const {
        return dim_ == 0 ? 0 : static_cast<std::int64_t>(coords_.size()) / dim_;
    }
    bool empty() const { return size() == 0; }
    std::span<const double> point(std::int64_t i) const {
        return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    const Mark& mark(std::int64_t i) const { return marks_[i]; }
    MarkKind mark_kind() const { return mark_kind_; }
    std::span<const double> coords_flat() const { return coords_; }

    /// Configuration translated by -shift (i.e. the paper's zeta - k).
    MarkedConfiguration translated(std::span<const double> shift) const;

  private:
    int dim_ = 0;
    std::vector<double> coords_;
    std::vector<Mark> marks_;
    MarkKind mark_kind_ = MarkKind::unit;
};

/// Homogeneous unit-intensity Poisson sample on a finite-volume region with
/// i.i.d. marks. Deterministic given the seed stream. Exact location
/// coincidences are resolved by re-drawing the later point.
MarkedConfiguration sample_poisson(const Region& region, const MarkDistribution& marks,
                                   const SeedStream& seed);

/// Multiset union. Dimensions must agree.
MarkedConfiguration superpose(const MarkedConfiguration& a, const MarkedConfiguration& b);

/// Keeps exactly the points whose location lies in the region; marks unchanged.
MarkedConfiguration restrict(const MarkedConfiguration& c, const Region& region);

/// CSV schema: header x1,...,xd,mark_kind[,amplitude[,radius]]; one row per
/// point, reals with 17 significant digits, RFC 4180 line endings.
void write_configuration_csv(std::ostream& os, const MarkedConfiguration& c);
MarkedConfiguration read_configuration_csv(std::istream& is);

}  // namespace sngeo
