#ifndef PSPACE_IDS_HPP
#define PSPACE_IDS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pspace {

/// Interning table mapping opaque external string ids to dense indices.
/// Indices are assigned in first-seen order, so loading is deterministic.
class IdTable {
public:
    int32_t intern(std::string_view id) {
        auto it = index_.find(std::string(id));
        if (it != index_.end()) return it->second;
        int32_t idx = static_cast<int32_t>(names_.size());
        names_.emplace_back(id);
        index_.emplace(names_.back(), idx);
        return idx;
    }

    // -1 when the id is unknown.
    int32_t find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        return it == index_.end() ? -1 : it->second;
    }

    const std::string& name(int32_t idx) const {
        if (idx < 0 || idx >= static_cast<int32_t>(names_.size()))
            throw std::out_of_range("IdTable: index " + std::to_string(idx) + " out of range");
        return names_[idx];
    }

    int32_t size() const { return static_cast<int32_t>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }

    bool operator==(const IdTable& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int32_t> index_;
};

} // namespace pspace

#endif
