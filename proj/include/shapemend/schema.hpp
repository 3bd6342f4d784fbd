#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shapemend/errors.hpp"

namespace shapemend {

/// Per-organ declaration: label binding, pairedness, and the thresholds
/// the correction steps use for this organ.
struct OrganSpec {
    std::string name;
    bool paired = false;
    int label = 0;       // unpaired organs
    int right_label = 0; // paired organs
    int left_label = 0;
    std::optional<int> keep_top;  // absent = unbounded (no suppression)
    int min_component_voxels = 0; // 0 disables small-component removal
    bool mergeable = false;
    std::vector<std::string> adjacency; // organ names, for reassignment
};

/// A case-level mask key: unpaired organs map 1:1, paired organs expand
/// to `<name>_right` / `<name>_left`.
struct CaseKey {
    std::string key;
    int label = 0;
    std::size_t organ_index = 0;
    int side = 0; // 0 unpaired, +1 right, -1 left
};

class OrganSchema {
  public:
    OrganSchema() = default;
    explicit OrganSchema(std::vector<OrganSpec> organs);

    static OrganSchema from_yaml_file(const std::string& path);
    static OrganSchema from_yaml_string(const std::string& text);
    std::string to_yaml() const;

    const std::vector<OrganSpec>& organs() const { return organs_; }
    const OrganSpec* find(const std::string& name) const;
    bool has_label(int label) const;

    /// Deterministic expansion to case keys, in schema order (right side
    /// before left for paired organs).
    const std::vector<CaseKey>& case_keys() const { return keys_; }
    const CaseKey* find_key(const std::string& key) const;
    const CaseKey* key_for_label(int label) const;

  private:
    void validate() const;
    std::vector<OrganSpec> organs_;
    std::vector<CaseKey> keys_;
};

} // namespace shapemend
