#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

namespace steinlab {

inline constexpr const char* kCodeVersion = "0.1.0";

// Full provenance of a stochastic run: with the same binary and manifest the
// statistics reproduce bit-for-bit (fixed-order reductions throughout).
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;
    std::string rng_algorithm = "philox4x32-10";
    int chains = 1;
    std::uint64_t burnin = 0;
    std::uint64_t thin = 1;
    std::string code_version = kCodeVersion;
    double wall_time_seconds = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["params"] = params;
        j["seed"] = seed;
        j["rng_algorithm"] = rng_algorithm;
        j["chains"] = chains;
        j["burnin"] = burnin;
        j["thin"] = thin;
        j["code_version"] = code_version;
        j["wall_time_seconds"] = wall_time_seconds;
        return j;
    }
};

}  // namespace steinlab
