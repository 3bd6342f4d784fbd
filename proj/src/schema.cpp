#include "shapemend/schema.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace shapemend {

OrganSchema::OrganSchema(std::vector<OrganSpec> organs)
    : organs_(std::move(organs)) {
    validate();
    for (std::size_t i = 0; i < organs_.size(); ++i) {
        const OrganSpec& o = organs_[i];
        if (o.paired) {
            keys_.push_back({o.name + "_right", o.right_label, i, +1});
            keys_.push_back({o.name + "_left", o.left_label, i, -1});
        } else {
            keys_.push_back({o.name, o.label, i, 0});
        }
    }
}

void OrganSchema::validate() const {
    std::set<std::string> names;
    std::set<int> labels;
    auto claim_label = [&](int l, const std::string& who) {
        if (l <= 0)
            throw ConfigError("organ " + who + ": label ids must be positive");
        if (!labels.insert(l).second)
            throw ConfigError("duplicate label id " + std::to_string(l));
    };
    for (const OrganSpec& o : organs_) {
        if (o.name.empty()) throw ConfigError("organ with empty name");
        if (!names.insert(o.name).second)
            throw ConfigError("duplicate organ name: " + o.name);
        if (o.paired) {
            if (o.label != 0)
                throw ConfigError("paired organ " + o.name +
                                  " must not declare a single label");
            claim_label(o.right_label, o.name);
            claim_label(o.left_label, o.name);
        } else {
            if (o.right_label != 0 || o.left_label != 0)
                throw ConfigError("unpaired organ " + o.name +
                                  " must not declare side labels");
            claim_label(o.label, o.name);
        }
        if (o.keep_top && *o.keep_top < 1)
            throw ConfigError("organ " + o.name + ": keep_top must be >= 1");
        if (o.min_component_voxels < 0)
            throw ConfigError("organ " + o.name +
                              ": min_component_voxels must be >= 0");
    }
    for (const OrganSpec& o : organs_)
        for (const std::string& adj : o.adjacency) {
            if (adj == o.name)
                throw ConfigError("organ " + o.name + " lists itself as adjacent");
            if (!names.count(adj))
                throw ConfigError("organ " + o.name +
                                  " lists unknown adjacent organ " + adj);
        }
}

const OrganSpec* OrganSchema::find(const std::string& name) const {
    for (const OrganSpec& o : organs_)
        if (o.name == name) return &o;
    return nullptr;
}

bool OrganSchema::has_label(int label) const {
    return key_for_label(label) != nullptr;
}

const CaseKey* OrganSchema::find_key(const std::string& key) const {
    for (const CaseKey& k : keys_)
        if (k.key == key) return &k;
    return nullptr;
}

const CaseKey* OrganSchema::key_for_label(int label) const {
    for (const CaseKey& k : keys_)
        if (k.label == label) return &k;
    return nullptr;
}

OrganSchema OrganSchema::from_yaml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schema file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_yaml_string(buf.str());
}

OrganSchema OrganSchema::from_yaml_string(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("schema YAML parse error: ") + e.what());
    }
    if (!root["organs"] || !root["organs"].IsSequence())
        throw ConfigError("schema must contain an 'organs' sequence");
    std::vector<OrganSpec> organs;
    for (const auto& node : root["organs"]) {
        OrganSpec o;
        o.name = node["name"].as<std::string>("");
        o.paired = node["paired"].as<bool>(false);
        if (o.paired) {
            o.right_label = node["right_label"].as<int>(0);
            o.left_label = node["left_label"].as<int>(0);
        } else {
            o.label = node["label"].as<int>(0);
        }
        if (node["keep_top"]) o.keep_top = node["keep_top"].as<int>();
        o.min_component_voxels = node["min_component_voxels"].as<int>(0);
        o.mergeable = node["mergeable"].as<bool>(false);
        if (node["adjacency"])
            for (const auto& a : node["adjacency"])
                o.adjacency.push_back(a.as<std::string>());
        organs.push_back(std::move(o));
    }
    return OrganSchema(std::move(organs));
}

std::string OrganSchema::to_yaml() const {
    YAML::Emitter out;
    out << YAML::BeginMap << YAML::Key << "organs" << YAML::Value
        << YAML::BeginSeq;
    for (const OrganSpec& o : organs_) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << o.name;
        out << YAML::Key << "paired" << YAML::Value << o.paired;
        if (o.paired) {
            out << YAML::Key << "right_label" << YAML::Value << o.right_label;
            out << YAML::Key << "left_label" << YAML::Value << o.left_label;
        } else {
            out << YAML::Key << "label" << YAML::Value << o.label;
        }
        if (o.keep_top)
            out << YAML::Key << "keep_top" << YAML::Value << *o.keep_top;
        out << YAML::Key << "min_component_voxels" << YAML::Value
            << o.min_component_voxels;
        out << YAML::Key << "mergeable" << YAML::Value << o.mergeable;
        if (!o.adjacency.empty()) {
            out << YAML::Key << "adjacency" << YAML::Value << YAML::BeginSeq;
            for (const auto& a : o.adjacency) out << a;
            out << YAML::EndSeq;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace shapemend
