#pragma once

#include <cstdint>
#include <vector>

#include "sngeo/geometry.hpp"
#include "sngeo/point_process.hpp"

namespace sngeo {

/// Recursive k-nearest-neighbour structure of a configuration. nn[i] holds
/// the indices of the k nearest points of point i in increasing distance,
/// ties broken by lexicographic comparison of coordinates. symmetric[i] is
/// N_k(x_i): indices j such that i is among j's k nearest or j among i's.
struct NeighborStructure {
    int k = 0;
    std::vector<std::vector<std::int32_t>> nn;
    std::vector<std::vector<std::int32_t>> symmetric;
};

/// kd-tree accelerated construction. Requires |config| > k.
NeighborStructure nn_structure(const MarkedConfiguration& config, int k);

/// Total edge length of the undirected k-NN graph of the configuration
/// restricted to the window fill: sum over points of half the sum of
/// distances to their symmetric neighbour set. Configurations with at most k
/// points contribute 0 (score convention).
double nn_length_functional(const MarkedConfiguration& config, const LatticeWindow& window,
                            int k);

/// Same value computed from an already-restricted configuration.
double nn_length_of(const MarkedConfiguration& restricted, int k);

}  // namespace sngeo
