#ifndef PSPACE_LSI_HPP
#define PSPACE_LSI_HPP

#include <string>
#include <vector>

#include "pspace/factor_model.hpp"

namespace pspace {

/// Tokenize (lowercase, split on non-alphanumerics, drop tokens shorter
/// than 2), weight tf x idf, and take the rank-k truncated SVD of the
/// term-document matrix. Item coordinates are the document factors
/// scaled by singular values. The result is a PerceptualSpace of kind
/// Lsi (item rows only), so distance queries and expansion plug in
/// unchanged.
PerceptualSpace build_metadata_space(const MetadataCorpus& corpus, int k);

std::vector<std::string> tokenize(const std::string& text);

} // namespace pspace

#endif
