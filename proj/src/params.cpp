#include "pnr/params.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pnr/io.hpp"

namespace pnr {

void validate(const DetectorParams& params) {
    if (params.bit_count < 1 || params.bit_count > 10)
        throw DomainError("DetectorParams: B must be in [1, 10]");
    const auto B = static_cast<std::size_t>(params.bit_count);
    if (params.kappa_t.size() != B)
        throw DomainError("DetectorParams: kappa_t must have length B");
    if (params.eps_g.size() != B)
        throw DomainError("DetectorParams: eps_g must have length B");
    if (params.eps_e.size() != B)
        throw DomainError("DetectorParams: eps_e must have length B");
    for (double kt : params.kappa_t)
        if (!(kt >= 0.0) || !std::isfinite(kt))
            throw DomainError("DetectorParams: kappa_t entries must be >= 0");
    if (!(params.kappa_t_reset >= 0.0) || !std::isfinite(params.kappa_t_reset))
        throw DomainError("DetectorParams: kappa_t_reset must be >= 0");
    for (std::size_t k = 0; k < B; ++k) {
        if (!(params.eps_g[k] >= 0.0 && params.eps_g[k] < 1.0))
            throw DomainError("DetectorParams: eps_g[" + std::to_string(k) +
                              "] must be in [0, 1)");
        if (!(params.eps_e[k] >= 0.0 && params.eps_e[k] < 1.0))
            throw DomainError("DetectorParams: eps_e[" + std::to_string(k) +
                              "] must be in [0, 1)");
    }
}

namespace {

std::vector<double> require_float_array(const nlohmann::json& j, const char* key,
                                        std::size_t length) {
    if (!j.contains(key))
        throw DomainError(std::string(key) + ": missing required field");
    const auto& node = j.at(key);
    if (!node.is_array())
        throw DomainError(std::string(key) + ": expected an array of floats");
    std::vector<double> out;
    out.reserve(node.size());
    for (const auto& item : node) {
        if (!item.is_number())
            throw DomainError(std::string(key) + ": expected an array of floats");
        out.push_back(item.get<double>());
    }
    if (out.size() != length)
        throw DomainError(std::string(key) + ": expected length " + std::to_string(length) +
                          ", got " + std::to_string(out.size()));
    return out;
}

}  // namespace

DetectorParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw DomainError("params: expected a JSON object");
    if (!j.contains("B"))
        throw DomainError("B: missing required field");
    if (!j.at("B").is_number_integer())
        throw DomainError("B: expected an integer");

    DetectorParams params;
    params.bit_count = j.at("B").get<int>();
    if (params.bit_count < 1 || params.bit_count > 10)
        throw DomainError("B: must be in [1, 10]");
    const auto B = static_cast<std::size_t>(params.bit_count);
    params.kappa_t = require_float_array(j, "kappa_t", B);
    params.eps_g = require_float_array(j, "eps_g", B);
    params.eps_e = require_float_array(j, "eps_e", B);
    if (!j.contains("kappa_t_reset"))
        throw DomainError("kappa_t_reset: missing required field");
    if (!j.at("kappa_t_reset").is_number())
        throw DomainError("kappa_t_reset: expected a float");
    params.kappa_t_reset = j.at("kappa_t_reset").get<double>();
    validate(params);
    return params;
}

nlohmann::json params_to_json(const DetectorParams& params) {
    return nlohmann::json{{"B", params.bit_count},
                          {"kappa_t", params.kappa_t},
                          {"kappa_t_reset", params.kappa_t_reset},
                          {"eps_g", params.eps_g},
                          {"eps_e", params.eps_e}};
}

DetectorParams load_params(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError("params file " + path + ": " + e.what());
    }
    return params_from_json(j);
}

void save_params(const std::string& path, const DetectorParams& params) {
    write_file(path, params_to_json(params).dump(2) + "\n");
}

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ull;  // FNV-1a prime
    }
}

void hash_double(std::uint64_t& h, double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    hash_bytes(h, &bits, sizeof(bits));
}

}  // namespace

std::string params_hash(const DetectorParams& params) {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV offset basis
    hash_bytes(h, &params.bit_count, sizeof(params.bit_count));
    for (double x : params.kappa_t) hash_double(h, x);
    hash_double(h, params.kappa_t_reset);
    for (double x : params.eps_g) hash_double(h, x);
    for (double x : params.eps_e) hash_double(h, x);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace pnr
