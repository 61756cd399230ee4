#ifndef PSPACE_SPACE_HPP
#define PSPACE_SPACE_HPP

#include <string>
#include <utility>
#include <vector>

#include "pspace/factor_model.hpp"

namespace pspace {

/// Euclidean distance between two item rows.
double distance(const PerceptualSpace& space, int32_t item_a, int32_t item_b);

/// k nearest items to `item` (the query itself excluded), non-decreasing
/// distance, ties broken by ascending internal index. Exact linear scan.
std::vector<std::pair<int32_t, double>> nearest_neighbors(const PerceptualSpace& space,
                                                          int32_t item, int k);

/// Tab-separated space file, header tag PSPACE for rating-trained spaces
/// and MSPACE for metadata (LSI) spaces. Doubles are written with enough
/// digits for an exact binary round trip.
void save_space(const PerceptualSpace& space, const std::string& path);
PerceptualSpace load_space(const std::string& path);

} // namespace pspace

#endif
