#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsnn/errors.hpp"
#include "tsnn/model.hpp"
#include "tsnn/version.hpp"

namespace tsnn {

using json = nlohmann::json;

namespace detail {

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw config_error("invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

/// Strict object reader: every present key must be known, every required key
/// must be present, and errors name the offending key.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string context) : j_(j), context_(std::move(context)) {
        if (!j.is_object()) throw config_error(context_ + ": expected a JSON object");
    }

    ~ObjectReader() = default;

    template <typename T>
    T require(const std::string& key) {
        known_.insert(key);
        if (!j_.contains(key)) throw config_error(context_ + ": missing required field '" + key + "'");
        return get<T>(key);
    }

    template <typename T>
    T get_or(const std::string& key, T fallback) {
        known_.insert(key);
        if (!j_.contains(key)) return fallback;
        return get<T>(key);
    }

    bool has(const std::string& key) {
        known_.insert(key);
        return j_.contains(key);
    }

    const json& raw(const std::string& key) {
        known_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!known_.count(it.key()))
                throw config_error(context_ + ": unknown field '" + it.key() + "'");
    }

private:
    template <typename T>
    T get(const std::string& key) {
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw config_error(context_ + ": field '" + key + "' has the wrong type");
        }
    }

    const json& j_;
    std::string context_;
    std::set<std::string> known_;
};

}  // namespace detail

inline Mechanism mechanism_from_json(const json& j, const std::string& context) {
    detail::ObjectReader reader(j, context);
    const std::string kind = reader.require<std::string>("kind");
    Mechanism mech;
    if (kind == "mcar") {
        mech = Mechanism::mcar(reader.get_or<double>("p", 0.75));
    } else if (kind == "mnar") {
        mech = Mechanism::mnar(reader.get_or<double>("p_dead", 0.2), reader.get_or<double>("base", 0.4),
                               reader.get_or<double>("bump", 0.2));
    } else {
        throw config_error(context + ": kind must be 'mcar' or 'mnar'");
    }
    reader.finish();
    mech.validate();
    return mech;
}

inline json mechanism_to_json(const Mechanism& mech) {
    if (mech.kind == Mechanism::Kind::mcar) return json{{"kind", "mcar"}, {"p", mech.p}};
    return json{{"kind", "mnar"}, {"p_dead", mech.p_dead}, {"base", mech.base}, {"bump", mech.bump}};
}

/// Percentile band for an eta grid: [lo, hi] with `count` evenly spaced
/// points. Serialized as [lo, hi, count].
struct GridSpec {
    double lo = 1.5;
    double hi = 10.0;
    int count = 8;
};

inline GridSpec gridspec_from_json(const json& j, const std::string& context) {
    if (!j.is_array() || j.size() != 3)
        throw config_error(context + ": expected [lo, hi, count]");
    GridSpec spec;
    spec.lo = j.at(0).get<double>();
    spec.hi = j.at(1).get<double>();
    spec.count = j.at(2).get<int>();
    if (!(spec.lo > 0.0 && spec.hi < 100.0 && spec.lo <= spec.hi))
        throw config_error(context + ": percentiles must satisfy 0 < lo <= hi < 100");
    if (spec.count < 1) throw config_error(context + ": count must be >= 1");
    return spec;
}

/// Every CLI run records what produced its outputs.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> flags;
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    double duration_ms = 0.0;
};

inline void write_manifest(const RunManifest& manifest, const std::string& path) {
    json j;
    j["command"] = manifest.command;
    j["flags"] = manifest.flags;
    j["seed"] = manifest.seed;
    j["version"] = kVersion;
    j["config_schema_version"] = kConfigSchemaVersion;
    j["inputs"] = manifest.inputs;
    j["outputs"] = manifest.outputs;
    j["duration_ms"] = manifest.duration_ms;
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw io_error("write failed on '" + path + "'");
}

}  // namespace tsnn
