#include "tabaug/arch.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "tabaug/errors.hpp"

namespace tabaug {

const char* to_string(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::unconstrained: return "unconstrained";
        case ConstraintKind::isomorphic: return "isomorphic";
        case ConstraintKind::mirror: return "mirror";
        case ConstraintKind::self_symmetric: return "self_symmetric";
        case ConstraintKind::relative_isomorphic: return "relative_isomorphic";
    }
    return "?";
}

ConstraintKind constraint_from_string(const std::string& s) {
    if (s == "unconstrained") return ConstraintKind::unconstrained;
    if (s == "isomorphic") return ConstraintKind::isomorphic;
    if (s == "mirror") return ConstraintKind::mirror;
    if (s == "self_symmetric") return ConstraintKind::self_symmetric;
    if (s == "relative_isomorphic") return ConstraintKind::relative_isomorphic;
    throw InvalidArgument("unknown constraint kind: " + s);
}

bool is_permitted_delta(double delta) {
    for (double d : kRelativeDeltas) {
        if (std::abs(delta - d) < 1e-12) return true;
    }
    return false;
}

std::size_t scaled_width(std::size_t width, double delta) {
    const long long scaled = std::llround(static_cast<double>(width) * (1.0 + delta));
    return static_cast<std::size_t>(std::max(1LL, scaled));
}

namespace {

void require_hidden(const std::vector<std::size_t>& hidden, const char* where) {
    if (hidden.empty()) throw InvalidArgument(std::string(where) + ": hidden width list is empty");
    for (std::size_t w : hidden) {
        if (w == 0) throw InvalidArgument(std::string(where) + ": zero hidden width");
    }
}

ArchSpec assemble(std::size_t data_dim, const std::vector<std::size_t>& g_hidden,
                  const std::vector<std::size_t>& d_hidden, Constraint constraint) {
    if (data_dim == 0) throw InvalidArgument("arch: data_dim must be >= 1");
    ArchSpec spec;
    spec.data_dim = data_dim;
    spec.noise_dim = data_dim; // input layers match; only outputs differ
    spec.constraint = constraint;
    spec.g_widths.push_back(spec.noise_dim);
    spec.g_widths.insert(spec.g_widths.end(), g_hidden.begin(), g_hidden.end());
    spec.g_widths.push_back(data_dim);
    spec.d_widths.push_back(data_dim);
    spec.d_widths.insert(spec.d_widths.end(), d_hidden.begin(), d_hidden.end());
    spec.d_widths.push_back(1);
    return spec;
}

} // namespace

ArchSpec build_isomorphic(std::size_t data_dim, const std::vector<std::size_t>& hidden) {
    require_hidden(hidden, "build_isomorphic");
    return assemble(data_dim, hidden, hidden, {ConstraintKind::isomorphic, 0.0});
}

ArchSpec build_mirror(std::size_t data_dim, const std::vector<std::size_t>& g_hidden) {
    require_hidden(g_hidden, "build_mirror");
    std::vector<std::size_t> reversed(g_hidden.rbegin(), g_hidden.rend());
    return assemble(data_dim, g_hidden, reversed, {ConstraintKind::mirror, 0.0});
}

ArchSpec build_self_symmetric(std::size_t data_dim, const std::vector<std::size_t>& half) {
    require_hidden(half, "build_self_symmetric");
    std::vector<std::size_t> palindrome = half;
    for (std::size_t i = half.size() - 1; i-- > 0;) palindrome.push_back(half[i]);
    return assemble(data_dim, palindrome, palindrome, {ConstraintKind::self_symmetric, 0.0});
}

ArchSpec build_relative_isomorphic(std::size_t data_dim, const std::vector<std::size_t>& hidden,
                                   double delta) {
    require_hidden(hidden, "build_relative_isomorphic");
    if (!is_permitted_delta(delta))
        throw InvalidArgument("build_relative_isomorphic: delta must be one of "
                              "{+-0.10, +-0.20, +-0.30}");
    std::vector<std::size_t> d_hidden;
    d_hidden.reserve(hidden.size());
    for (std::size_t w : hidden) d_hidden.push_back(scaled_width(w, delta));
    return assemble(data_dim, hidden, d_hidden, {ConstraintKind::relative_isomorphic, delta});
}

ArchSpec build_unconstrained(std::size_t data_dim, const std::vector<std::size_t>& g_hidden,
                             const std::vector<std::size_t>& d_hidden) {
    require_hidden(g_hidden, "build_unconstrained");
    require_hidden(d_hidden, "build_unconstrained");
    return assemble(data_dim, g_hidden, d_hidden, {ConstraintKind::unconstrained, 0.0});
}

std::vector<std::string> validate(const ArchSpec& spec) {
    std::vector<std::string> violations;
    const auto add = [&](std::string msg) { violations.push_back(std::move(msg)); };

    if (spec.data_dim == 0) add("data_dim is 0");
    if (spec.noise_dim == 0) add("noise_dim is 0");
    if (spec.g_widths.size() < 2) add("g_widths has fewer than 2 entries");
    if (spec.d_widths.size() < 2) add("d_widths has fewer than 2 entries");
    if (!violations.empty()) return violations;

    if (spec.g_widths.front() != spec.noise_dim) add("g_widths first entry != noise_dim");
    if (spec.g_widths.back() != spec.data_dim) add("g_widths last entry != data_dim");
    if (spec.d_widths.front() != spec.data_dim) add("d_widths first entry != data_dim");
    if (spec.d_widths.back() != 1) add("d_widths last entry != 1");
    for (std::size_t w : spec.g_widths)
        if (w == 0) { add("g_widths contains a zero width"); break; }
    for (std::size_t w : spec.d_widths)
        if (w == 0) { add("d_widths contains a zero width"); break; }

    const auto g_hidden = spec.g_hidden();
    const auto d_hidden = spec.d_hidden();

    switch (spec.constraint.kind) {
        case ConstraintKind::unconstrained:
            break;
        case ConstraintKind::isomorphic:
            if (spec.noise_dim != spec.data_dim) add("isomorphic: noise_dim != data_dim");
            if (g_hidden.size() != d_hidden.size()) {
                add("isomorphic: hidden layer counts differ");
            } else {
                for (std::size_t i = 0; i < g_hidden.size(); ++i) {
                    if (g_hidden[i] != d_hidden[i])
                        add("isomorphic: hidden widths differ at layer " + std::to_string(i));
                }
            }
            break;
        case ConstraintKind::mirror:
            if (spec.noise_dim != spec.data_dim) add("mirror: noise_dim != data_dim");
            if (g_hidden.size() != d_hidden.size()) {
                add("mirror: hidden layer counts differ");
            } else {
                for (std::size_t i = 0; i < g_hidden.size(); ++i) {
                    if (d_hidden[i] != g_hidden[g_hidden.size() - 1 - i])
                        add("mirror: d hidden is not the reverse of g hidden at layer " +
                            std::to_string(i));
                }
            }
            break;
        case ConstraintKind::self_symmetric: {
            if (spec.noise_dim != spec.data_dim) add("self_symmetric: noise_dim != data_dim");
            if (g_hidden != d_hidden) add("self_symmetric: G and D hidden trunks differ");
            std::vector<std::size_t> reversed(g_hidden.rbegin(), g_hidden.rend());
            if (g_hidden != reversed) add("self_symmetric: hidden trunk is not a palindrome");
            break;
        }
        case ConstraintKind::relative_isomorphic:
            if (spec.noise_dim != spec.data_dim) add("relative_isomorphic: noise_dim != data_dim");
            if (!is_permitted_delta(spec.constraint.delta))
                add("relative_isomorphic: delta not in the permitted set");
            if (g_hidden.size() != d_hidden.size()) {
                add("relative_isomorphic: hidden layer counts differ");
            } else {
                for (std::size_t i = 0; i < g_hidden.size(); ++i) {
                    if (d_hidden[i] != scaled_width(g_hidden[i], spec.constraint.delta))
                        add("relative_isomorphic: d hidden width off the scaling rule at layer " +
                            std::to_string(i));
                }
            }
            break;
    }
    return violations;
}

std::string to_json(const ArchSpec& spec) {
    nlohmann::ordered_json j;
    j["data_dim"] = spec.data_dim;
    j["noise_dim"] = spec.noise_dim;
    j["g_widths"] = spec.g_widths;
    j["d_widths"] = spec.d_widths;
    j["constraint"]["kind"] = to_string(spec.constraint.kind);
    if (spec.constraint.kind == ConstraintKind::relative_isomorphic)
        j["constraint"]["delta"] = spec.constraint.delta;
    return j.dump(2);
}

ArchSpec arch_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("arch_from_json: ") + e.what());
    }
    try {
        ArchSpec spec;
        spec.data_dim = j.at("data_dim").get<std::size_t>();
        spec.noise_dim = j.at("noise_dim").get<std::size_t>();
        spec.g_widths = j.at("g_widths").get<std::vector<std::size_t>>();
        spec.d_widths = j.at("d_widths").get<std::vector<std::size_t>>();
        spec.constraint.kind = constraint_from_string(j.at("constraint").at("kind").get<std::string>());
        if (spec.constraint.kind == ConstraintKind::relative_isomorphic)
            spec.constraint.delta = j.at("constraint").at("delta").get<double>();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("arch_from_json: missing or mistyped field: ") + e.what());
    }
}

} // namespace tabaug
